r"""
Polynomial hypergroups from three-term recurrences

A recurrence is given by its coefficient function ``rc(n) -> (a_n, b_n, c_n)``
for

.. math:: x P_n = a_n P_{n+1} + b_n P_n + c_n P_{n-1},  P_0 = 1

with P_1 either prescribed or read off the n = 0 row. Polynomials are
dense sympy coefficient lists over QQ, leading coefficient first. The
linearization P_n P_m = Σ_k g(n,m;k) P_k is obtained by peeling leading
terms against {P_k}, which is triangular.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from sympy.polys.densearith import dup_lshift, dup_mul, dup_mul_ground, dup_quo_ground, dup_sub
from sympy.polys.densebasic import dup_degree, dup_LC, dup_strip
from sympy.polys.densetools import dup_eval
from sympy.polys.domains import QQ

from .elements import Element
from .errors import NegativeLinearization, NormalizationError, ParamRange, RuleDomainError, SupportBoundViolated
from .hypergroup import CarrierKind, Claim, HypergroupDescriptor
from .measure import FiniteMeasure, as_fraction

logger = logging.getLogger(__name__)

Dup = List[Any]
Coefficients = Tuple[Fraction, Fraction, Fraction]

_0 = Fraction(0)
_1 = Fraction(1)
_HALF = Fraction(1, 2)


def to_qq(value) -> Any:
    q = as_fraction(value)
    return QQ(q.numerator, q.denominator)


def from_qq(value) -> Fraction:
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


@dataclass(frozen=True)
class Recurrence:
    """Three-term recurrence x·P_n = a_n P_{n+1} + b_n P_n + c_n P_{n-1}

    p1 holds the (constant, linear) coefficients of P_1 when it is
    prescribed; otherwise P_1 = (x - b_0)/a_0.
    """
    name: str
    rc: Callable[[int], Coefficients]
    p1: Optional[Tuple[Fraction, Fraction]] = None
    params: Tuple[Tuple[str, str], ...] = ()

    def _row(self, n: int) -> Tuple[Any, Any, Any]:
        a, b, c = (to_qq(v) for v in self.rc(n))
        if not a:
            raise ParamRange(f"{self.name}: a_{n} = 0")
        return a, b, c

    def polynomials(self, degree: int) -> List[Dup]:
        """P_0, ..., P_degree, each checked for P_n(1) = 1"""
        polys: List[Dup] = [[QQ.one]]
        if degree >= 1:
            if self.p1 is not None:
                polys.append(dup_strip([to_qq(self.p1[1]), to_qq(self.p1[0])]))
            else:
                a0, b0, _ = self._row(0)
                polys.append(dup_strip([QQ.one / a0, -b0 / a0]))
        for n in range(1, degree):
            a, b, c = self._row(n)
            prev, cur = polys[n - 1], polys[n]
            shifted = dup_sub(dup_lshift(cur, 1, QQ), dup_mul_ground(cur, b, QQ), QQ)
            polys.append(dup_quo_ground(dup_sub(shifted, dup_mul_ground(prev, c, QQ), QQ), a, QQ))

        for n, p in enumerate(polys):
            value = dup_eval(p, QQ.one, QQ)
            if value != QQ.one:
                raise NormalizationError(n, from_qq(value))
        return polys


def chebyshev_t() -> Recurrence:
    """Chebyshev polynomials of the first kind, T_1 = x"""

    def rc(n: int) -> Coefficients:
        return (_1, _0, _0) if n == 0 else (_HALF, _0, _HALF)

    return Recurrence("chebyshev_t", rc, p1=(_0, _1))


def chebyshev_u_normalized() -> Recurrence:
    """R_n = U_n/(n+1): x·R_n = (n+2)/(2(n+1)) R_{n+1} + n/(2(n+1)) R_{n-1}"""

    def rc(n: int) -> Coefficients:
        return (Fraction(n + 2, 2 * (n + 1)), _0, Fraction(n, 2 * (n + 1)))

    return Recurrence("chebyshev_u", rc, p1=(_0, _1))


def cartier(q) -> Recurrence:
    """Random walk on the homogeneous tree of degree q+1"""
    q = as_fraction(q)
    if q < 1:
        raise ParamRange(f"Invalid tree parameter q={q}: must be >= 1")

    def rc(n: int) -> Coefficients:
        return (_1, _0, _0) if n == 0 else (q / (q + 1), _0, _1 / (q + 1))

    return Recurrence("cartier", rc, params=(("q", str(q)),))


def constant_recurrence(a, b, c, a0=1, b0=0) -> Recurrence:
    """a_n, b_n, c_n constant for n >= 1, with (a_0, b_0) for the first row"""
    a, b, c, a0, b0 = (as_fraction(v) for v in (a, b, c, a0, b0))

    def rc(n: int) -> Coefficients:
        return (a0, b0, _0) if n == 0 else (a, b, c)

    params = tuple((k, str(v)) for k, v in (("a", a), ("b", b), ("c", c), ("a0", a0), ("b0", b0)))
    return Recurrence("constant", rc, params=params)


def expand_in_basis(poly: Dup, basis: List[Dup]) -> Dict[int, Fraction]:
    """Coefficients of poly in {P_k}; deg P_k = k makes the system triangular"""
    residual = dup_strip(list(poly))
    coeffs: Dict[int, Fraction] = {}
    while residual:
        k = dup_degree(residual)
        g = dup_LC(residual, QQ) / dup_LC(basis[k], QQ)
        coeffs[k] = from_qq(g)
        residual = dup_sub(residual, dup_mul_ground(basis[k], g, QQ), QQ)
    return dict(sorted(coeffs.items()))


def linearization_coefficients(rec: Recurrence, n_max: int) -> Dict[Tuple[int, int], Dict[int, Fraction]]:
    """
    g(n,m;k) for all 0 <= n, m <= n_max

    Raises:
        NormalizationError: some P_n(1) != 1 for n <= 2·n_max
        NegativeLinearization: some g(n,m;k) < 0
        SupportBoundViolated: some g(n,m;k) != 0 with k outside |n-m|..n+m
    """
    if n_max < 0:
        raise ParamRange(f"Invalid n_max: {n_max} must be >= 0")
    polys = rec.polynomials(2 * n_max)
    table: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for n in range(n_max + 1):
        for m in range(n, n_max + 1):
            g = expand_in_basis(dup_mul(polys[n], polys[m], QQ), polys)
            for k, value in g.items():
                if not abs(n - m) <= k <= n + m:
                    raise SupportBoundViolated(n, m, k)
                if value < 0:
                    raise NegativeLinearization(n, m, k, value)
            table[(n, m)] = g
            table[(m, n)] = g
    logger.info(f"Linearized {rec.name} up to n_max={n_max}: {len(table)} products, all coefficients >= 0")
    return table


def polynomial_hypergroup(rec: Recurrence, n_max: int) -> HypergroupDescriptor:
    """Hermitian hypergroup on {0..n_max} with δ_n*δ_m = Σ_k g(n,m;k) δ_k

    Windows stop at n_max // 2, so (δ_m*δ_n)*δ_k stays inside the table for
    every triple drawn from a window.
    """
    coefficients = linearization_coefficients(rec, n_max)
    table = {pair: FiniteMeasure(g) for pair, g in coefficients.items()}
    window_top = n_max // 2

    def contains(x: Element) -> bool:
        return isinstance(x, int) and not isinstance(x, bool) and 0 <= x <= n_max

    def rule(m: Element, n: Element) -> FiniteMeasure:
        try:
            return table[(m, n)]
        except KeyError:
            raise RuleDomainError(f"({m!r}, {n!r}) lies outside the linearized range 0..{n_max}", (m, n))

    spec = {"builtin": "polynomial", "recurrence": rec.name, "n_max": n_max}
    spec.update(dict(rec.params))
    return HypergroupDescriptor(
        name=f"polynomial[{rec.name}]",
        carrier=CarrierKind.NONNEG_INTEGERS,
        rule=rule,
        identity=0,
        contains=contains,
        involution=lambda x: x,
        claims=(Claim.HYPERGROUP, Claim.HERMITIAN, Claim.COMMUTATIVE),
        enumerate_elements=lambda size: list(range(min(size, window_top + 1))),
        spec=spec,
        involution_kind="identity",
        family="polynomial",
    )
