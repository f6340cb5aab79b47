"""
Finitely supported probability measures with exact rational weights

FiniteMeasure is immutable. Zero weights are stripped on construction,
every weight is a reduced Fraction, the weights sum to exactly 1 and
iteration follows the canonical carrier order.
"""
import logging
from fractions import Fraction
from numbers import Rational
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, Set, Tuple, Union

from .elements import Element, element_from_json, element_key, element_to_json
from .errors import MeasureError, SpecError

logger = logging.getLogger(__name__)

Weight = Union[int, Fraction]


def as_fraction(value: Any) -> Fraction:
    """Exact conversion; floats are refused so no rounding enters an algebraic path"""
    if isinstance(value, bool):
        raise MeasureError(f"Invalid weight: {value!r} is a boolean")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MeasureError(f"Invalid weight: {value!r} is not an exact rational") from exc
    raise MeasureError(f"Invalid weight: {value!r} must be an int, Fraction or 'p/q' string")


def fraction_str(q: Fraction) -> str:
    """'num/den' rendering used by every report"""
    return f"{q.numerator}/{q.denominator}"


class FiniteMeasure:
    """A probability measure with finite support and exact weights"""

    __slots__ = ("_items", "_index", "_hash")

    def __init__(self, weights: Union[Mapping[Element, Any], Iterable[Tuple[Element, Any]]]):
        pairs = weights.items() if isinstance(weights, Mapping) else weights
        combined: Dict[Element, Fraction] = {}
        for elem, raw in pairs:
            w = as_fraction(raw)
            if w < 0:
                raise MeasureError(f"Invalid weight for {elem!r}: {w} must be non-negative")
            combined[elem] = combined.get(elem, Fraction(0)) + w

        items = tuple(sorted(((e, w) for e, w in combined.items() if w != 0), key=lambda kv: element_key(kv[0])))
        total = sum((w for _, w in items), Fraction(0))
        if total != 1:
            raise MeasureError(f"Invalid measure: weights sum to {total}, must sum to 1")

        self._items: Tuple[Tuple[Element, Fraction], ...] = items
        self._index: Dict[Element, Fraction] = dict(items)
        self._hash = hash(items)

    # -- mapping protocol -------------------------------------------------

    def __getitem__(self, x: Element) -> Fraction:
        return self._index.get(x, Fraction(0))

    def __iter__(self) -> Iterator[Element]:
        return (e for e, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, x: Element) -> bool:
        return x in self._index

    def items(self) -> Tuple[Tuple[Element, Fraction], ...]:
        return self._items

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMeasure):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        terms = " + ".join(f"{fraction_str(w)}*δ({e!r})" for e, w in self._items)
        return f"FiniteMeasure({terms})"

    # -- queries ------------------------------------------------------------

    @property
    def support(self) -> Set[Element]:
        return set(self._index)

    def is_point_mass(self) -> bool:
        return len(self._items) == 1

    def mass(self, subset: Iterable[Element]) -> Fraction:
        if isinstance(subset, (set, frozenset)):
            return sum((w for e, w in self._items if e in subset), Fraction(0))
        return sum((self._index.get(e, Fraction(0)) for e in set(subset)), Fraction(0))

    def to_json(self) -> Dict[str, List[Dict[str, Any]]]:
        return {
            "weights": [
                {"elem": element_to_json(e), "num": w.numerator, "den": w.denominator}
                for e, w in self._items
            ]
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "FiniteMeasure":
        try:
            entries = data["weights"]
            return cls((element_from_json(e["elem"]), Fraction(int(e["num"]), int(e["den"]))) for e in entries)
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise SpecError(f"Invalid measure JSON: {exc}") from exc


ConvolutionRule = Callable[[Element, Element], FiniteMeasure]


def point_mass(x: Element) -> FiniteMeasure:
    return FiniteMeasure(((x, 1),))


def mass(mu: FiniteMeasure, subset: Iterable[Element]) -> Fraction:
    return mu.mass(subset)


def support(mu: FiniteMeasure) -> Set[Element]:
    return mu.support


def convolve_measures(mu: FiniteMeasure, nu: FiniteMeasure, rule: ConvolutionRule) -> FiniteMeasure:
    """Bilinear extension of a rule on point masses

    Args:
        mu: Left factor
        nu: Right factor
        rule: Point-mass rule (x, y) -> δ_x*δ_y; raises RuleDomainError off its carrier

    Returns:
        Σ_x Σ_y mu(x)·nu(y)·rule(x, y) with like terms combined
    """
    if mu.is_point_mass() and nu.is_point_mass():
        return rule(mu.items()[0][0], nu.items()[0][0])

    acc: Dict[Element, Fraction] = {}
    for x, wx in mu.items():
        for y, wy in nu.items():
            coeff = wx * wy
            for z, wz in rule(x, y).items():
                acc[z] = acc.get(z, Fraction(0)) + coeff * wz
    return FiniteMeasure(acc)


def mix(mu: FiniteMeasure, nu: FiniteMeasure, a: Weight) -> FiniteMeasure:
    """Convex combination a·mu + (1-a)·nu"""
    a = as_fraction(a)
    if not 0 <= a <= 1:
        raise MeasureError(f"Invalid mixing weight: {a} must lie in [0, 1]")
    terms = [(e, a * w) for e, w in mu.items()] + [(e, (1 - a) * w) for e, w in nu.items()]
    return FiniteMeasure(terms)


def push_forward(mu: FiniteMeasure, f: Callable[[Element], Element]) -> FiniteMeasure:
    """Image measure mu∘f⁻¹"""
    return FiniteMeasure((f(e), w) for e, w in mu.items())
