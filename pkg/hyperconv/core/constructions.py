"""
Closed-form hypergroups and idempotent deformations

cp1/cp2 are the Chebyshev hypergroups of the first and second kind on Z+,
dunkl_ramirez and max_deformation deform (Z+, max) on its diagonal, and
check_idempotent_deformation/deform handle a general commutative
semigroup with identity.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .algebra import CarrierAlgebra
from .elements import Element, element_to_json, sort_elements
from .errors import ConditionsNotVerified, NoIdentity, NotCommutative, ParamRange, RuleDomainError, SpecError, WeightConditionViolated
from .hypergroup import CarrierKind, CheckResult, Claim, HypergroupDescriptor, VerificationReport, Window
from .measure import FiniteMeasure, as_fraction, point_mass

logger = logging.getLogger(__name__)

_HALF = Fraction(1, 2)


def _is_nonneg_int(x: Element) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= 0


def _nonneg_window(size: int) -> List[int]:
    return list(range(size))


def cp1() -> HypergroupDescriptor:
    """δ_m*δ_n = ½δ_|n-m| + ½δ_(n+m)"""

    def rule(m: int, n: int) -> FiniteMeasure:
        return FiniteMeasure(((abs(n - m), _HALF), (n + m, _HALF)))

    return HypergroupDescriptor(
        name="CP1", carrier=CarrierKind.NONNEG_INTEGERS, rule=rule, identity=0,
        contains=_is_nonneg_int, involution=lambda x: x,
        claims=(Claim.HYPERGROUP, Claim.HERMITIAN, Claim.COMMUTATIVE),
        enumerate_elements=_nonneg_window, spec={"builtin": "cp1"},
        involution_kind="identity", family="polynomial",
    )


def cp2() -> HypergroupDescriptor:
    """δ_m*δ_n = Σ_{k=0}^{min(m,n)} (|m-n|+2k+1)/((m+1)(n+1)) δ_(|m-n|+2k)"""

    def rule(m: int, n: int) -> FiniteMeasure:
        d = abs(m - n)
        den = (m + 1) * (n + 1)
        return FiniteMeasure((d + 2 * k, Fraction(d + 2 * k + 1, den)) for k in range(min(m, n) + 1))

    return HypergroupDescriptor(
        name="CP2", carrier=CarrierKind.NONNEG_INTEGERS, rule=rule, identity=0,
        contains=_is_nonneg_int, involution=lambda x: x,
        claims=(Claim.HYPERGROUP, Claim.HERMITIAN, Claim.COMMUTATIVE),
        enumerate_elements=_nonneg_window, spec={"builtin": "cp2"},
        involution_kind="identity", family="polynomial",
    )


def dunkl_ramirez(a) -> HypergroupDescriptor:
    """max off the diagonal; δ_n*δ_n = a^n/(1-a) δ_0 + Σ_{0<k<n} a^(n-k) δ_k + (1-2a)/(1-a) δ_n"""
    a = as_fraction(a)
    if not 0 < a <= _HALF:
        raise ParamRange(f"Invalid a={a}: must satisfy 0 < a <= 1/2")

    def rule(m: int, n: int) -> FiniteMeasure:
        if m != n or n == 0:
            return point_mass(max(m, n))
        terms = [(0, a ** n / (1 - a))]
        terms.extend((k, a ** (n - k)) for k in range(1, n))
        terms.append((n, (1 - 2 * a) / (1 - a)))
        return FiniteMeasure(terms)

    return HypergroupDescriptor(
        name=f"DunklRamirez(a={a})", carrier=CarrierKind.NONNEG_INTEGERS, rule=rule, identity=0,
        contains=_is_nonneg_int, involution=lambda x: x,
        claims=(Claim.HYPERGROUP, Claim.HERMITIAN, Claim.COMMUTATIVE),
        enumerate_elements=_nonneg_window, spec={"builtin": "dunkl_ramirez", "a": str(a)},
        involution_kind="identity",
    )


# ==================== Deformation weights ====================

_POWER = re.compile(r"^\s*(?P<base>\d+(?:/\d+)?)\s*\^\s*\(?\s*n\s*(?:-\s*(?P<shift>\d+))?\s*\)?\s*$")


@dataclass(frozen=True)
class DeformationWeights:
    """v: Z+ -> positive rationals with v_0 = 1

    value(n) is only consulted for n >= 1.
    """
    describe: str
    value: Callable[[int], Fraction]

    def __call__(self, n: int) -> Fraction:
        if n == 0:
            return Fraction(1)
        v = as_fraction(self.value(n))
        if v <= 0:
            raise ParamRange(f"Invalid weight v_{n} = {v}: must be positive")
        return v

    def validate(self, n_max: int) -> None:
        """Σ_{k<n} v_k <= v_n for 1 <= n <= n_max"""
        partial = Fraction(0)
        for n in range(1, n_max + 1):
            partial += self(n - 1)
            if partial > self(n):
                raise WeightConditionViolated(n, partial, self(n))

    def q(self, n: int) -> FiniteMeasure:
        """q_n = Σ_{m<n} (v_m/v_n) δ_m + (1 - Σ_{m<n} v_m/v_n) δ_n"""
        if n == 0:
            return point_mass(0)
        vn = self(n)
        terms = [(m, self(m) / vn) for m in range(n)]
        rest = 1 - sum((w for _, w in terms), Fraction(0))
        terms.append((n, rest))
        return FiniteMeasure(terms)

    @classmethod
    def geometric(cls, base, shift: int = 0) -> "DeformationWeights":
        base = as_fraction(base)
        return cls(f"{base}^(n-{shift})" if shift else f"{base}^n", lambda n: base ** (n - shift))

    @classmethod
    def constant(cls, c) -> "DeformationWeights":
        c = as_fraction(c)
        return cls(str(c), lambda n: c)

    @classmethod
    def from_sequence(cls, values: Sequence[Any]) -> "DeformationWeights":
        vs = [as_fraction(v) for v in values]

        def value(n: int) -> Fraction:
            if n >= len(vs):
                raise ParamRange(f"weight v_{n} not given (sequence has {len(vs)} entries)")
            return vs[n]

        return cls("[" + ",".join(str(v) for v in vs) + "]", value)

    @classmethod
    def dunkl_ramirez(cls, a) -> "DeformationWeights":
        """v_n = (1-a)/a^n for n >= 1"""
        a = as_fraction(a)
        if not 0 < a <= _HALF:
            raise ParamRange(f"Invalid a={a}: must satisfy 0 < a <= 1/2")
        return cls(f"dunkl_ramirez({a})", lambda n: (1 - a) / a ** n)

    @classmethod
    def parse(cls, spec: Any) -> "DeformationWeights":
        """Accepts "c", "b^n", "b^(n-s)", a list of rationals, or {"dunkl_ramirez": a}"""
        if isinstance(spec, list):
            return cls.from_sequence(spec)
        if isinstance(spec, dict) and "dunkl_ramirez" in spec:
            return cls.dunkl_ramirez(spec["dunkl_ramirez"])
        if isinstance(spec, (int, Fraction)) and not isinstance(spec, bool):
            return cls.constant(spec)
        if isinstance(spec, str):
            match = _POWER.match(spec)
            if match:
                return cls.geometric(match.group("base"), int(match.group("shift") or 0))
            try:
                return cls.constant(spec)
            except ValueError:
                pass
        raise SpecError(f"Invalid weights {spec!r}: expected 'c', 'b^n', 'b^(n-s)' or a list")


def max_deformation(v: DeformationWeights, n_max: int) -> HypergroupDescriptor:
    """Hermitian deformation of (Z+, max) on {0..n_max} with diagonal q_n built from v"""
    v.validate(n_max)
    diagonal = {n: v.q(n) for n in range(n_max + 1)}

    def contains(x: Element) -> bool:
        return _is_nonneg_int(x) and x <= n_max

    def rule(m: int, n: int) -> FiniteMeasure:
        if m != n:
            return point_mass(max(m, n))
        return diagonal[n]

    logger.info(f"Built max deformation with v = {v.describe} up to n_max={n_max}")
    return HypergroupDescriptor(
        name=f"MaxDeformation(v={v.describe})", carrier=CarrierKind.NONNEG_INTEGERS, rule=rule, identity=0,
        contains=contains, involution=lambda x: x,
        claims=(Claim.HYPERGROUP, Claim.HERMITIAN, Claim.COMMUTATIVE),
        enumerate_elements=lambda size: list(range(min(size, n_max + 1))),
        spec={"builtin": "max_deformation", "v": v.describe, "n_max": n_max},
        involution_kind="identity",
    )


# ==================== General idempotent deformations ====================

class ConditionReport(VerificationReport):
    """Verdicts on the six idempotent-deformation conditions"""


def _condition_window(S: CarrierAlgebra, window: Optional[Window]) -> Window:
    if S.elements is not None:
        return Window(S.elements)
    if window is None:
        raise ValueError(f"{S.name} is infinite; pass a window")
    return window


def _check_preconditions(S: CarrierAlgebra, elements: Sequence[Element]) -> None:
    if not S.has_identity or any(S.op(S.identity, x) != x or S.op(x, S.identity) != x for x in elements):
        raise NoIdentity(f"{S.name}: {S.identity!r} is not an identity")
    for i, x in enumerate(elements):
        for y in elements[i + 1:]:
            if S.op(x, y) != S.op(y, x):
                raise NotCommutative(f"{S.name}: {x!r}·{y!r} != {y!r}·{x!r}")


def _fail(result: CheckResult, **witness: Any) -> None:
    result.passed = False
    if result.counterexample is None:
        result.counterexample = {k: _jsonable(v) for k, v in witness.items()}


def _jsonable(v: Any) -> Any:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (set, frozenset)):
        return [element_to_json(x) for x in sort_elements(v)]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return element_to_json(v)


def check_idempotent_deformation(S: CarrierAlgebra,
                                 q: Mapping[Element, FiniteMeasure],
                                 window: Optional[Window] = None) -> ConditionReport:
    """
    Evaluate conditions (i)-(vi) for deforming S on its idempotents

    The conditions characterize a semiconvo only when S is action-free:
    no unit other than e fixes every non-identity idempotent. That is
    checked first and reported as its own check.

    Args:
        S: Commutative semigroup with identity
        q: Measure q_n for every non-identity idempotent n in the window
        window: Required when S is infinite; verdicts are then window-relative

    Returns:
        ConditionReport with one check per condition
    """
    w = _condition_window(S, window)
    elements = list(w.elements)
    if S.identity not in elements:
        elements.insert(0, S.identity)
    _check_preconditions(S, elements)
    e = S.identity

    idempotents = [x for x in elements if S.is_idempotent(x)]
    e_set = set(idempotents)
    nontrivial = [n for n in idempotents if n != e]
    s_tilde = [x for x in elements if x not in e_set]

    def below(j: Element, n: Element) -> bool:
        return S.op(j, n) == n and j != n

    lower = {n: {j for j in idempotents if below(j, n)} for n in nontrivial}
    report = ConditionReport(f"deformation of {S.name}", Window(tuple(elements)), window_relative=not S.is_finite)

    # units fixing every non-identity idempotent must be trivial
    free = CheckResult("action-free", True)
    if nontrivial:
        units = [g for g in elements if any(S.op(g, h) == e and S.op(h, g) == e for h in elements)]
        for g in units:
            free.checked += 1
            if g != e and all(S.op(g, n) == n for n in nontrivial):
                _fail(free, g=g, fixes=nontrivial)
    else:
        free.note = "vacuous: e is the only idempotent"
    report.checks.append(free)

    # (i) E(S) finite or an order copy of (Z+, max): on a window, the order must be a chain with e at the bottom
    chain = CheckResult("(i) idempotent order", True)
    if not S.is_finite:
        for a_idx, m in enumerate(idempotents):
            for n in idempotents[a_idx + 1:]:
                chain.checked += 1
                if not (below(m, n) or below(n, m)):
                    _fail(chain, elements=[m, n], reason="incomparable idempotents")
        chain.note = "window-relative: E(S) is infinite, checked as a chain"
    else:
        chain.checked = len(idempotents)
        chain.note = "E(S) is finite"
    report.checks.append(chain)

    # (ii) S̃ = S minus E(S) is an ideal
    ideal = CheckResult("(ii) non-idempotents form an ideal", True)
    for x in s_tilde:
        for s in elements:
            ideal.checked += 1
            prod = S.op(x, s)
            if S.is_idempotent(prod):
                _fail(ideal, elements=[x, s], product=prod)
    if not s_tilde:
        ideal.note = "vacuous: every element is idempotent"
    report.checks.append(ideal)

    missing = [n for n in nontrivial if n not in q]
    if missing:
        raise ConditionsNotVerified(f"no measure q_n given for idempotents {missing!r}")

    # (iii) Q_n ⊆ E(S)
    supported = CheckResult("(iii) Q_n inside E(S)", True)
    for n in nontrivial:
        supported.checked += 1
        outside = [x for x in q[n] if x not in e_set]
        if outside:
            _fail(supported, n=n, outside=outside)
    report.checks.append(supported)

    # (iv) Q_n·m = {nm} for m in S̃
    absorb = CheckResult("(iv) Q_n·m = {nm} on non-idempotents", True)
    for n in nontrivial:
        for m in s_tilde:
            absorb.checked += 1
            images = {S.op(x, m) for x in q[n]}
            if images != {S.op(n, m)}:
                _fail(absorb, n=n, m=m, images=images)
    if not s_tilde:
        absorb.note = "vacuous: every element is idempotent"
    report.checks.append(absorb)

    # (v) L_n ⊆ Q_n ⊆ L_n ∪ {n}
    sandwich = CheckResult("(v) L_n ⊆ Q_n ⊆ L_n ∪ {n}", True)
    for n in nontrivial:
        sandwich.checked += 1
        q_support = set(q[n])
        if not lower[n] <= q_support or not q_support <= lower[n] | {n}:
            _fail(sandwich, n=n, lower=lower[n], support=q_support)
    report.checks.append(sandwich)

    # (vi) (α) q_n(e) = q_n(m)·q_m(e) and (β) q_n(e)(1 + Σ_{e≠k∈L_n} 1/q_k(e)) <= 1
    weights = CheckResult("(vi) weight identities", True)
    if len(idempotents) > 2:
        for n in nontrivial:
            for m in lower[n] - {e}:
                weights.checked += 1
                if q[n][e] != q[n][m] * q[m][e]:
                    _fail(weights, condition="alpha", n=n, m=m, lhs=q[n][e], rhs=q[n][m] * q[m][e])
            weights.checked += 1
            total = q[n][e] * (1 + sum((1 / q[k][e] for k in lower[n] - {e} if q[k][e]), Fraction(0)))
            if total > 1:
                _fail(weights, condition="beta", n=n, value=total)
    else:
        weights.note = "vacuous: #E(S) <= 2"
    report.checks.append(weights)

    status = "passed" if report.passed else "FAILED"
    logger.info(f"Deformation conditions for {S.name} on {len(elements)} elements: {status}")
    return report


def deform(S: CarrierAlgebra, q: Mapping[Element, FiniteMeasure], report: Optional[ConditionReport]) -> HypergroupDescriptor:
    """δ_m*δ_n = δ_mn off the idempotent diagonal and δ_n*δ_n = q_n for idempotents n != e"""
    if report is None or not report.passed:
        raise ConditionsNotVerified(f"deformation of {S.name} needs a passing condition report")
    q = dict(q)
    covered = set(report.window.elements)
    all_idempotent = all(S.is_idempotent(x) for x in covered)

    def rule(m: Element, n: Element) -> FiniteMeasure:
        if m == n and m != S.identity and S.is_idempotent(m):
            if m not in q:
                raise RuleDomainError(f"no q_n given for idempotent {m!r}", (m, n))
            return q[m]
        return point_mass(S.op(m, n))

    claims: Tuple[Claim, ...]
    if all_idempotent:
        claims = (Claim.HYPERGROUP, Claim.HERMITIAN, Claim.COMMUTATIVE)
    else:
        claims = (Claim.SEMICONVO_ONLY, Claim.COMMUTATIVE)
    logger.info(f"Deformed {S.name}: {'hypergroup' if all_idempotent else 'semiconvo only'}")
    return HypergroupDescriptor(
        name=f"deform({S.name})", carrier=S.carrier, rule=rule, identity=S.identity, contains=S.contains,
        involution=(lambda x: x) if all_idempotent else None, claims=claims,
        enumerate_elements=S.enumerate_elements,
        spec={"builtin": "deform", "semigroup": S.spec,
              "q": {str(element_to_json(n)): mu.to_json() for n, mu in sorted(q.items(), key=lambda kv: str(kv[0]))}},
        involution_kind="identity" if all_idempotent else None,
        elements=S.elements,
    )


def deformation_q(v: DeformationWeights, idempotents: Iterable[int]) -> Dict[int, FiniteMeasure]:
    """The max-semigroup diagonal as a q-map for check_idempotent_deformation"""
    return {n: v.q(n) for n in idempotents if n != 0}


def semigroup_descriptor(S: CarrierAlgebra) -> HypergroupDescriptor:
    """S as a point-mass semiconvo; groups get the inverse involution"""

    def rule(m: Element, n: Element) -> FiniteMeasure:
        return point_mass(S.op(m, n))

    if S.is_group:
        claims: Tuple[Claim, ...] = (Claim.HYPERGROUP,)
    elif S.has_identity:
        claims = (Claim.SEMICONVO_ONLY,)
    else:
        claims = ()
    if S.commutative:
        claims = claims + (Claim.COMMUTATIVE,)
    return HypergroupDescriptor(
        name=S.name, carrier=S.carrier, rule=rule, identity=S.identity, contains=S.contains,
        involution=S.inverse, claims=claims, enumerate_elements=S.enumerate_elements,
        spec={"builtin": "semigroup", "semigroup": S.spec}, involution_kind="group_inverse",
        elements=S.elements,
    )
