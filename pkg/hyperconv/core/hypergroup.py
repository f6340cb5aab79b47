"""
Hypergroup descriptors and windowed axiom verification

A descriptor bundles a carrier, a point-mass convolution rule, the
identity and an optional involution. Axioms are checked exhaustively on a
caller-supplied finite window; every report names the window it used.
"""
import hashlib
import json
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .elements import Element, element_to_json, sort_elements
from .errors import NoInvolution, RuleDomainError
from .measure import ConvolutionRule, FiniteMeasure, convolve_measures, point_mass, push_forward

logger = logging.getLogger(__name__)

CACHE_LIMIT = 1 << 16


class Claim(Enum):
    """Structural claims a builder attaches to its descriptor"""
    COMMUTATIVE = "commutative"
    HERMITIAN = "hermitian"
    HYPERGROUP = "hypergroup"
    SEMICONVO_ONLY = "semiconvo_only"


class CarrierKind(Enum):
    NONNEG_INTEGERS = "Z+"
    INTEGERS = "Z"
    INTEGER_PAIRS = "ZxZ"
    NATURAL_PAIRS = "NxN"
    ZXN_ADJOINED = "ZxN*"
    RESIDUES = "S_k"
    FINITE = "finite"
    ORBITS = "orbits"
    COSETS = "cosets"
    DOUBLE_COSETS = "double_cosets"
    QUOTIENT = "quotient"
    SUBSET = "subset"


@dataclass(frozen=True)
class Window:
    """A finite ordered truncation of a carrier"""
    elements: Tuple[Element, ...]

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("Invalid window: elements must be pairwise distinct")

    @classmethod
    def of(cls, elements: Iterable[Element]) -> "Window":
        return cls(tuple(elements))

    @classmethod
    def range(cls, start: int, stop: int) -> "Window":
        """Integers start..stop inclusive"""
        return cls(tuple(range(start, stop + 1)))

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: Element) -> bool:
        return x in self.elements

    def describe(self) -> List[Any]:
        return [element_to_json(e) for e in self.elements]


@dataclass
class CheckResult:
    """One axiom or condition verdict; failures always carry a counterexample"""
    name: str
    passed: bool
    checked: int = 0
    counterexample: Optional[Dict[str, Any]] = None
    note: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name, "passed": self.passed, "checked": self.checked}
        if self.counterexample is not None:
            data["counterexample"] = self.counterexample
        if self.note:
            data["note"] = self.note
        return data


@dataclass
class VerificationReport:
    subject: str
    window: Window
    checks: List[CheckResult] = field(default_factory=list)
    window_relative: bool = True

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "window": self.window.describe(),
            "window_relative": self.window_relative,
            "checks": [c.to_dict() for c in self.checks],
        }


class AxiomReport(VerificationReport):
    """Semiconvo and hypergroup axioms on a window"""


class HypergroupDescriptor:
    """A discrete semiconvo: carrier, convolution of point masses, identity, optional involution

    Args:
        name: Human-readable name used in reports
        carrier: Carrier kind tag
        rule: Point-mass rule (m, n) -> δ_m*δ_n
        identity: Identity element e
        contains: Carrier membership predicate
        involution: Optional involution m -> ň
        claims: Structural claims made by the builder
        enumerate_elements: Returns the first n carrier elements in canonical order
        spec: Construction spec used for serialization and hashing
        involution_kind: Serialization tag for the involution
        family: Family tag, e.g. "polynomial"
        cache_limit: Most point-mass products kept in the LRU memo
    """

    def __init__(self,
                 name: str,
                 carrier: CarrierKind,
                 rule: ConvolutionRule,
                 identity: Element,
                 contains: Callable[[Element], bool],
                 involution: Optional[Callable[[Element], Element]] = None,
                 claims: Iterable[Claim] = (),
                 enumerate_elements: Optional[Callable[[int], List[Element]]] = None,
                 spec: Optional[Dict[str, Any]] = None,
                 involution_kind: Optional[str] = None,
                 family: str = "generic",
                 elements: Optional[Sequence[Element]] = None,
                 cache_limit: int = CACHE_LIMIT):
        self.name = name
        self.carrier = carrier
        self.rule = rule
        self.identity = identity
        self.contains = contains
        self.involution = involution
        self.claims: FrozenSet[Claim] = frozenset(claims)
        self.spec = dict(spec or {"name": name})
        self.involution_kind = involution_kind if involution is not None else None
        self.family = family
        self.elements: Optional[Tuple[Element, ...]] = tuple(sort_elements(elements)) if elements is not None else None
        self._enumerate = enumerate_elements
        self._memo = lru_cache(maxsize=cache_limit)(self._evaluate)

    def __repr__(self) -> str:
        return f"HypergroupDescriptor({self.name!r}, carrier={self.carrier.value})"

    @property
    def is_finite(self) -> bool:
        return self.elements is not None

    @property
    def spec_hash(self) -> str:
        canonical = json.dumps(self.spec, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def _evaluate(self, m: Element, n: Element) -> FiniteMeasure:
        for x in (m, n):
            if not self.contains(x):
                raise RuleDomainError(f"{x!r} is not in the carrier of {self.name}", (m, n))
        return self.rule(m, n)

    def convolve(self, m: Element, n: Element, cache: bool = True) -> FiniteMeasure:
        return self._memo(m, n) if cache else self._evaluate(m, n)

    def convolve_measures(self, mu: FiniteMeasure, nu: FiniteMeasure) -> FiniteMeasure:
        return convolve_measures(mu, nu, self.convolve)

    def convolve_sequence(self, xs: Sequence[Element]) -> FiniteMeasure:
        if not xs:
            raise ValueError("Invalid sequence: convolve_sequence needs at least one factor")
        if not self.contains(xs[0]):
            raise RuleDomainError(f"{xs[0]!r} is not in the carrier of {self.name}")
        acc = point_mass(xs[0])
        for x in xs[1:]:
            acc = self.convolve_measures(acc, point_mass(x))
        return acc

    def window(self, size: int) -> Window:
        """The first `size` carrier elements in canonical order"""
        if self.elements is not None:
            return Window(self.elements[:size])
        if self._enumerate is None:
            raise ValueError(f"Descriptor {self.name} has no element enumeration; pass an explicit window")
        return Window(tuple(self._enumerate(size)))

    def cache_size(self) -> int:
        return self._memo.cache_info().currsize


def convolve(K: HypergroupDescriptor, m: Element, n: Element) -> FiniteMeasure:
    return K.convolve(m, n)


def convolve_sequence(K: HypergroupDescriptor, xs: Sequence[Element]) -> FiniteMeasure:
    return K.convolve_sequence(xs)


def _pair_json(*xs: Element) -> List[Any]:
    return [element_to_json(x) for x in xs]


def _escape_note(escaped: int, checked: int, what: str) -> Optional[str]:
    if not escaped:
        return None
    return f"{escaped} of {checked} {what} leave the computed range of the rule and were skipped"


def check_associativity(K: HypergroupDescriptor, w: Window) -> AxiomReport:
    """(δ_m*δ_n)*δ_k = δ_m*(δ_n*δ_k) for every triple of the window

    Triples whose products leave a truncated rule are skipped and counted
    in the note; they are not counterexamples.
    """
    result = CheckResult("associativity", True)
    escaped = 0
    for m in w:
        for n in w:
            for k in w:
                result.checked += 1
                try:
                    left = K.convolve_measures(K.convolve(m, n), point_mass(k))
                    right = K.convolve_measures(point_mass(m), K.convolve(n, k))
                except RuleDomainError as exc:
                    escaped += 1
                    logger.debug(f"{K.name}: skipping {(m, n, k)!r}: {exc}")
                    continue
                if left != right:
                    result.passed = False
                    result.counterexample = {
                        "elements": _pair_json(m, n, k),
                        "left": left.to_json(),
                        "right": right.to_json(),
                    }
                    logger.warning(f"{K.name}: associativity fails at {(m, n, k)!r}")
                    return AxiomReport(K.name, w, [result])
    result.note = _escape_note(escaped, result.checked, "triples")
    return AxiomReport(K.name, w, [result])


def check_identity(K: HypergroupDescriptor, w: Window) -> AxiomReport:
    """δ_e*δ_m = δ_m*δ_e = δ_m over the window"""
    result = CheckResult("identity", True)
    e = K.identity
    if not K.contains(e):
        result.passed = False
        result.counterexample = {"elements": _pair_json(e), "error": "IdentityMissing"}
        return AxiomReport(K.name, w, [result])
    for m in w:
        result.checked += 1
        try:
            left, right = K.convolve(e, m), K.convolve(m, e)
        except RuleDomainError as exc:
            result.passed = False
            result.counterexample = {"elements": _pair_json(e, m), "error": str(exc)}
            break
        expected = point_mass(m)
        if left != expected or right != expected:
            result.passed = False
            result.counterexample = {
                "elements": _pair_json(e, m),
                "left": left.to_json(),
                "right": right.to_json(),
            }
            break
    return AxiomReport(K.name, w, [result])


def check_involution(K: HypergroupDescriptor, w: Window) -> AxiomReport:
    """Involution is self-inverse, anti-homomorphic, and e ∈ spt(δ_m*δ_ň) iff m = n"""
    if K.involution is None:
        raise NoInvolution(f"{K.name} has no involution")
    inv = K.involution
    report = AxiomReport(K.name, w)

    self_inverse = CheckResult("involution_self_inverse", True)
    for m in w:
        self_inverse.checked += 1
        image = inv(m)
        if not K.contains(image) or inv(image) != m:
            self_inverse.passed = False
            self_inverse.counterexample = {"elements": _pair_json(m, image)}
            break
    report.checks.append(self_inverse)
    if not self_inverse.passed:
        return report

    anti = CheckResult("involution_anti_homomorphism", True)
    hermitian_law = CheckResult("involution_identity_in_support", True)
    for m in w:
        for n in w:
            anti.checked += 1
            hermitian_law.checked += 1
            if anti.passed:
                left = push_forward(K.convolve(m, n), inv)
                right = K.convolve(inv(n), inv(m))
                if left != right:
                    anti.passed = False
                    anti.counterexample = {
                        "elements": _pair_json(m, n),
                        "left": left.to_json(),
                        "right": right.to_json(),
                    }
            if hermitian_law.passed:
                has_e = K.identity in K.convolve(m, inv(n))
                if has_e != (m == n):
                    hermitian_law.passed = False
                    hermitian_law.counterexample = {"elements": _pair_json(m, n), "identity_in_support": has_e}
    report.checks.extend([anti, hermitian_law])
    return report


def check_commutativity(K: HypergroupDescriptor, w: Window) -> AxiomReport:
    result = CheckResult("commutativity", True)
    for i, m in enumerate(w.elements):
        for n in w.elements[i + 1:]:
            result.checked += 1
            if K.convolve(m, n) != K.convolve(n, m):
                result.passed = False
                result.counterexample = {
                    "elements": _pair_json(m, n),
                    "left": K.convolve(m, n).to_json(),
                    "right": K.convolve(n, m).to_json(),
                }
                return AxiomReport(K.name, w, [result])
    return AxiomReport(K.name, w, [result])


def _fold(K: HypergroupDescriptor, xs: Sequence[Element], split: Callable[[int, int], int]) -> FiniteMeasure:
    if len(xs) == 1:
        return point_mass(xs[0])
    cut = split(1, len(xs) - 1)
    return K.convolve_measures(_fold(K, xs[:cut], split), _fold(K, xs[cut:], split))


def check_bracketing(K: HypergroupDescriptor, w: Window, rng: random.Random,
                     trials: int = 50, max_length: int = 5) -> AxiomReport:
    """Left fold, right fold and a random bracketing agree on random sequences from the window"""
    result = CheckResult("bracketing", True)
    escaped = 0
    pool = list(w.elements)
    for _ in range(trials):
        length = rng.randint(1, max_length)
        xs = [rng.choice(pool) for _ in range(length)]
        result.checked += 1
        try:
            left = K.convolve_sequence(xs)
            right = _fold(K, xs, lambda lo, hi: lo)
            mixed = _fold(K, xs, rng.randint)
        except RuleDomainError:
            escaped += 1
            continue
        if not (left == right == mixed):
            result.passed = False
            result.counterexample = {"elements": _pair_json(*xs), "left": left.to_json(), "right": right.to_json()}
            break
    result.note = _escape_note(escaped, result.checked, "sequences")
    return AxiomReport(K.name, w, [result])


def verify_axioms(K: HypergroupDescriptor, w: Window) -> AxiomReport:
    """
    Complete windowed verification pipeline

    Args:
        K: Descriptor to verify
        w: Window; should contain the identity

    Returns:
        One report holding identity, associativity and, where they apply,
        involution and commutativity checks
    """
    report = AxiomReport(K.name, w)

    # Step 1: identity law
    report.extend(check_identity(K, w))

    # Step 2: associativity on w³
    report.extend(check_associativity(K, w))

    # Step 3: involution laws
    if K.involution is not None:
        report.extend(check_involution(K, w))

    # Step 4: commutativity where claimed
    if Claim.COMMUTATIVE in K.claims or Claim.HERMITIAN in K.claims:
        report.extend(check_commutativity(K, w))

    status = "passed" if report.passed else "FAILED"
    logger.info(f"Verified {K.name} on a window of {len(w)} elements: {status}")
    return report


def center(K: HypergroupDescriptor, w: Window) -> FrozenSet[Element]:
    """Window-relative center: x with δ_x*δ_y a point mass for every y in the window"""
    members = frozenset(
        x for x in w
        if all(K.convolve(x, y).is_point_mass() for y in w)
    )
    logger.debug(f"{K.name}: windowed center has {len(members)} elements")
    return members


def center_report(K: HypergroupDescriptor, w: Window) -> Dict[str, Any]:
    members = sort_elements(center(K, w))
    return {
        "elements": [element_to_json(x) for x in members],
        "window": w.describe(),
        "window_relative": True,
    }


def restrict(K: HypergroupDescriptor, predicate: Callable[[Element], bool], name: str) -> HypergroupDescriptor:
    """Sub-descriptor on {x : predicate(x)}; fails if a support leaves the subset"""

    def contains(x: Element) -> bool:
        return K.contains(x) and predicate(x)

    def rule(m: Element, n: Element) -> FiniteMeasure:
        mu = K.convolve(m, n)
        outside = [x for x in mu if not predicate(x)]
        if outside:
            raise RuleDomainError(f"δ_{m!r}*δ_{n!r} leaves {name} at {outside[0]!r}", (m, n))
        return mu

    def enumerate_elements(size: int) -> List[Element]:
        found: List[Element] = []
        limit = size
        while len(found) < size:
            limit *= 2
            found = [x for x in K.window(limit) if predicate(x)]
            if limit > 64 * max(size, 1):
                break
        return found[:size]

    sub_elements = [x for x in K.elements if predicate(x)] if K.elements is not None else None
    return HypergroupDescriptor(
        name=name,
        carrier=CarrierKind.SUBSET,
        rule=rule,
        identity=K.identity,
        contains=contains,
        involution=K.involution,
        claims=K.claims,
        enumerate_elements=None if sub_elements is not None else enumerate_elements,
        spec={"restrict": K.spec, "name": name},
        involution_kind=K.involution_kind,
        family=K.family,
        elements=sub_elements,
    )


def descriptor_to_dict(K: HypergroupDescriptor, window: Optional[Window] = None) -> Dict[str, Any]:
    """Serialize a descriptor; finite carriers carry their full (m, n) -> measure table"""
    data: Dict[str, Any] = {
        "name": K.name,
        "carrier": K.carrier.value,
        "identity": element_to_json(K.identity),
        "involution": K.involution_kind,
        "claims": sorted(c.value for c in K.claims),
        "spec_hash": K.spec_hash,
    }
    table_elements = K.elements if K.elements is not None else (window.elements if window is not None else None)
    if K.elements is None:
        data["builtin"] = K.spec
    if table_elements is not None:
        ordered = sort_elements(table_elements)
        data["table"] = {
            "elements": [element_to_json(x) for x in ordered],
            "window_relative": K.elements is None,
            "products": [
                {"m": element_to_json(m), "n": element_to_json(n), "measure": K.convolve(m, n).to_json()}
                for m in ordered for n in ordered
            ],
        }
    return data

