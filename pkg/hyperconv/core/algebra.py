"""
Carrier algebras and finite group actions

A CarrierAlgebra is the raw (semi)group a construction starts from:
builtin infinite carriers are evaluated lazily, finite tables are
validated exhaustively when they are built. AffineAction holds a finite
group H acting on such a carrier from the right, x -> x^s.
"""
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .elements import Element, OrbitLabel, TableElement
from .errors import ActionInvalid, NotAutomorphism, ParamRange, TableError
from .hypergroup import CarrierKind, Window

logger = logging.getLogger(__name__)


class AlgebraKind(Enum):
    GROUP = "group"
    SEMIGROUP = "semigroup"
    TABLE = "table"


@dataclass
class CarrierAlgebra:
    """A group or semigroup presentation

    has_identity is False when the designated identity is only neutral on
    part of the carrier (S_k); constructions needing a true identity refuse it.
    """
    name: str
    kind: AlgebraKind
    carrier: CarrierKind
    op: Callable[[Element, Element], Element]
    identity: Element
    contains: Callable[[Element], bool]
    inverse: Optional[Callable[[Element], Element]] = None
    commutative: bool = False
    has_identity: bool = True
    elements: Optional[Tuple[Element, ...]] = None
    enumerate_elements: Optional[Callable[[int], List[Element]]] = None
    spec: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_group(self) -> bool:
        return self.inverse is not None

    @property
    def is_finite(self) -> bool:
        return self.elements is not None

    def window(self, size: int) -> Window:
        if self.elements is not None:
            return Window(self.elements[:size])
        if self.enumerate_elements is None:
            raise ValueError(f"{self.name} has no element enumeration")
        return Window(tuple(self.enumerate_elements(size)))

    def product(self, xs: Sequence[Element]) -> Element:
        """x_1·x_2·...·x_m, factors in the given order"""
        acc = xs[0]
        for x in xs[1:]:
            acc = self.op(acc, x)
        return acc

    def is_idempotent(self, x: Element) -> bool:
        return self.op(x, x) == x

    def element(self, name: str) -> TableElement:
        """Look up a finite-table element by name"""
        if self.elements is None:
            raise TableError(f"{self.name} is not a finite table")
        for x in self.elements:
            if x.name == name:
                return x
        raise TableError(f"{self.name} has no element named {name!r}")


@dataclass(frozen=True)
class IdempotentPowerAt:
    j: int


@dataclass(frozen=True)
class InfiniteUpTo:
    bound: int


def element_order(S: CarrierAlgebra, x: Element, bound: int) -> Union[IdempotentPowerAt, InfiniteUpTo]:
    """Least j <= bound with x^j idempotent"""
    if bound < 1:
        raise ParamRange(f"Invalid bound: {bound} must be >= 1")
    power = x
    for j in range(1, bound + 1):
        if S.is_idempotent(power):
            return IdempotentPowerAt(j)
        power = S.op(power, x)
    return InfiniteUpTo(bound)


# ==================== Finite tables ====================

def finite_table(name: str,
                 names: Sequence[str],
                 rows: Sequence[Sequence[Union[str, int]]],
                 identity: Optional[str] = None) -> CarrierAlgebra:
    """
    Build and validate a finite multiplication table

    Args:
        name: Algebra name
        names: Element names, in row order
        rows: Row-major product matrix; entries are names or row indices
        identity: Name of the identity; detected from the table when omitted

    Returns:
        A table algebra; a group when every element has a two-sided inverse
    """
    size = len(names)
    if size == 0 or len(set(names)) != size:
        raise TableError(f"Invalid table {name}: element names must be non-empty and distinct")
    if len(rows) != size or any(len(row) != size for row in rows):
        raise TableError(f"Invalid table {name}: product matrix must be {size}x{size}")

    index = {n: i for i, n in enumerate(names)}
    product: List[List[int]] = []
    for r, row in enumerate(rows):
        out = []
        for c, entry in enumerate(row):
            if isinstance(entry, int) and not isinstance(entry, bool) and 0 <= entry < size:
                out.append(entry)
            elif isinstance(entry, str) and entry in index:
                out.append(index[entry])
            else:
                raise TableError(f"Invalid table {name}: entry ({names[r]}, {names[c]}) = {entry!r} is not an element")
        product.append(out)

    for a, b, c in itertools.product(range(size), repeat=3):
        if product[product[a][b]][c] != product[a][product[b][c]]:
            raise TableError(f"Invalid table {name}: not associative at ({names[a]}, {names[b]}, {names[c]})")

    units = [u for u in range(size) if all(product[u][x] == x and product[x][u] == x for x in range(size))]
    if identity is not None:
        if identity not in index or index[identity] not in units:
            raise TableError(f"Invalid table {name}: {identity!r} is not a two-sided identity")
        unit = index[identity]
    elif units:
        unit = units[0]
    else:
        raise TableError(f"Invalid table {name}: no identity element")

    elements = tuple(TableElement(i, n) for i, n in enumerate(names))
    inverses: Dict[int, int] = {}
    for a in range(size):
        for b in range(size):
            if product[a][b] == unit and product[b][a] == unit:
                inverses[a] = b
                break
    is_group = len(inverses) == size
    commutative = all(product[a][b] == product[b][a] for a in range(size) for b in range(size))

    def op(x: TableElement, y: TableElement) -> TableElement:
        return elements[product[x.index][y.index]]

    def contains(x: Element) -> bool:
        return isinstance(x, TableElement) and 0 <= x.index < size and elements[x.index] == x

    inverse = (lambda x: elements[inverses[x.index]]) if is_group else None
    logger.info(f"Validated table {name}: {size} elements, group={is_group}, commutative={commutative}")
    return CarrierAlgebra(
        name=name,
        kind=AlgebraKind.TABLE,
        carrier=CarrierKind.FINITE,
        op=op,
        identity=elements[unit],
        contains=contains,
        inverse=inverse,
        commutative=commutative,
        elements=elements,
        spec={"table": {"name": name, "elements": list(names),
                        "rows": [[names[v] for v in row] for row in product]}},
    )


def _cycle_name(perm: Tuple[int, ...]) -> str:
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        cycles.append("(" + "".join(str(i + 1) for i in cycle) + ")")
    return "".join(cycles) or "e"


def symmetric_group(n: int = 3) -> CarrierAlgebra:
    """S_n with x·y = "apply x, then y" """
    if n < 1 or n > 5:
        raise ParamRange(f"Invalid degree: {n} must lie in 1..5")
    perms = sorted(itertools.permutations(range(n)), key=lambda p: (p != tuple(range(n)), _cycle_name(p)))
    names = [_cycle_name(p) for p in perms]
    lookup = {p: i for i, p in enumerate(perms)}
    rows = [[lookup[tuple(q[p[i]] for i in range(n))] for q in perms] for p in perms]
    table = finite_table(f"S{n}", names, rows, identity="e")
    table.spec = {"builtin": "symmetric_group", "n": n}
    return table


def klein_four() -> CarrierAlgebra:
    names = ["id", "alpha", "beta", "gamma"]
    rows = [
        ["id", "alpha", "beta", "gamma"],
        ["alpha", "id", "gamma", "beta"],
        ["beta", "gamma", "id", "alpha"],
        ["gamma", "beta", "alpha", "id"],
    ]
    table = finite_table("V4", names, rows, identity="id")
    table.spec = {"builtin": "klein_four"}
    return table


def cyclic_two(names: Tuple[str, str] = ("id", "flip")) -> CarrierAlgebra:
    a, b = names
    table = finite_table("C2", [a, b], [[a, b], [b, a]], identity=a)
    table.spec = {"builtin": "cyclic_two", "names": list(names)}
    return table


def trivial_group() -> CarrierAlgebra:
    table = finite_table("1", ["id"], [["id"]], identity="id")
    table.spec = {"builtin": "trivial_group"}
    return table


# ==================== Builtin infinite carriers ====================

def _is_int(x: Element) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_int_pair(x: Element) -> bool:
    return isinstance(x, tuple) and len(x) == 2 and all(_is_int(c) for c in x)


def _integers_by_size() -> Iterator[int]:
    yield 0
    for r in itertools.count(1):
        yield -r
        yield r


def _pairs_by_shell(first_min: Optional[int] = None, second_min: Optional[int] = None) -> Iterator[Tuple[int, int]]:
    for r in itertools.count(0):
        shell = [(a, b) for a in range(-r, r + 1) for b in range(-r, r + 1) if max(abs(a), abs(b)) == r]
        for a, b in sorted(shell, key=lambda p: (abs(p[0]) + abs(p[1]), p)):
            if first_min is not None and a < first_min:
                continue
            if second_min is not None and b < second_min:
                continue
            yield (a, b)


def _take(gen: Iterator[Element], size: int) -> List[Element]:
    return list(itertools.islice(gen, size))


def integers() -> CarrierAlgebra:
    return CarrierAlgebra(
        name="(Z,+)", kind=AlgebraKind.GROUP, carrier=CarrierKind.INTEGERS,
        op=lambda x, y: x + y, identity=0, contains=_is_int, inverse=lambda x: -x,
        commutative=True, enumerate_elements=lambda n: _take(_integers_by_size(), n),
        spec={"builtin": "integers"},
    )


def integer_pairs() -> CarrierAlgebra:
    return CarrierAlgebra(
        name="(ZxZ,+)", kind=AlgebraKind.GROUP, carrier=CarrierKind.INTEGER_PAIRS,
        op=lambda x, y: (x[0] + y[0], x[1] + y[1]), identity=(0, 0), contains=_is_int_pair,
        inverse=lambda x: (-x[0], -x[1]), commutative=True,
        enumerate_elements=lambda n: _take(_pairs_by_shell(), n),
        spec={"builtin": "integer_pairs"},
    )


def nonneg_integers() -> CarrierAlgebra:
    return CarrierAlgebra(
        name="(Z+,+)", kind=AlgebraKind.SEMIGROUP, carrier=CarrierKind.NONNEG_INTEGERS,
        op=lambda x, y: x + y, identity=0, contains=lambda x: _is_int(x) and x >= 0,
        commutative=True, enumerate_elements=lambda n: list(range(n)),
        spec={"builtin": "nonneg_integers"},
    )


def max_semigroup() -> CarrierAlgebra:
    """(Z+, max); every element is idempotent"""
    return CarrierAlgebra(
        name="(Z+,max)", kind=AlgebraKind.SEMIGROUP, carrier=CarrierKind.NONNEG_INTEGERS,
        op=max, identity=0, contains=lambda x: _is_int(x) and x >= 0,
        commutative=True, enumerate_elements=lambda n: list(range(n)),
        spec={"builtin": "max_semigroup"},
    )


def natural_pairs() -> CarrierAlgebra:
    """(NxN,+) with N = {0,1,2,...} so that (0,0) is an identity"""

    def diagonals() -> Iterator[Tuple[int, int]]:
        for total in itertools.count(0):
            for a in range(total + 1):
                yield (a, total - a)

    return CarrierAlgebra(
        name="(NxN,+)", kind=AlgebraKind.SEMIGROUP, carrier=CarrierKind.NATURAL_PAIRS,
        op=lambda x, y: (x[0] + y[0], x[1] + y[1]), identity=(0, 0),
        contains=lambda x: _is_int_pair(x) and x[0] >= 0 and x[1] >= 0,
        commutative=True, enumerate_elements=lambda n: _take(diagonals(), n),
        spec={"builtin": "natural_pairs"},
    )


def zxn_adjoined(mixed: bool = True) -> CarrierAlgebra:
    """(ZxN) ∪ {(0,0)}, N = {1,2,...}, with + or (x,y)·(x',y') = (x+x', max{y,y'})"""

    def contains(x: Element) -> bool:
        return _is_int_pair(x) and (x == (0, 0) or x[1] >= 1)

    if mixed:
        def op(x, y):
            return (x[0] + y[0], max(x[1], y[1]))
    else:
        def op(x, y):
            return (x[0] + y[0], x[1] + y[1])

    def enumerate_elements(n: int) -> List[Element]:
        gen = (p for p in _pairs_by_shell(second_min=0) if contains(p))
        return _take(gen, n)

    return CarrierAlgebra(
        name="(ZxN)∪{(0,0)}" + (" mixed" if mixed else " +"), kind=AlgebraKind.SEMIGROUP,
        carrier=CarrierKind.ZXN_ADJOINED, op=op, identity=(0, 0), contains=contains,
        commutative=True, enumerate_elements=enumerate_elements,
        spec={"builtin": "zxn_adjoined", "mixed": mixed},
    )


def sk_semigroup(k: int) -> CarrierAlgebra:
    """
    S_k = {0,...,k-1} ∪ (kN+1) under addition modulo k

    Every product lands in {0,...,k-1}. 0 is neutral on that residue block
    and is the designated identity, but 0·s = 1 for s in kN+1, so the
    algebra is flagged has_identity=False.
    """
    if k < 2:
        raise ParamRange(f"Invalid k: {k} must be >= 2")

    def contains(x: Element) -> bool:
        return _is_int(x) and (0 <= x < k or (x > k and x % k == 1))

    def enumerate_elements(n: int) -> List[Element]:
        return _take((x for x in itertools.count(0) if contains(x)), n)

    return CarrierAlgebra(
        name=f"S_{k}", kind=AlgebraKind.SEMIGROUP, carrier=CarrierKind.RESIDUES,
        op=lambda x, y: (x + y) % k, identity=0, contains=contains, commutative=True,
        has_identity=False, enumerate_elements=enumerate_elements,
        spec={"builtin": "sk_semigroup", "k": k},
    )


# ==================== Actions ====================

@dataclass
class AffineAction:
    """A finite group H acting on a carrier from the right

    form is "automorphism" when every x -> x^s is a homomorphism, and
    "affine" for the general translate-of-automorphism form.
    """
    name: str
    group: CarrierAlgebra
    base: CarrierAlgebra
    maps: Dict[str, Callable[[Element], Element]]
    form: str = "automorphism"

    def __post_init__(self):
        if self.group.elements is None or not self.group.is_group:
            raise ActionInvalid(f"Invalid action {self.name}: H must be a finite group table")
        missing = [s.name for s in self.group.elements if s.name not in self.maps]
        if missing:
            raise ActionInvalid(f"Invalid action {self.name}: no map for {missing}")

    @property
    def order(self) -> int:
        return len(self.group.elements)

    def act(self, s: TableElement, x: Element) -> Element:
        return self.maps[s.name](x)

    def images(self, x: Element) -> List[Element]:
        return [self.act(s, x) for s in self.group.elements]

    def orbit(self, x: Element, label=OrbitLabel) -> OrbitLabel:
        return label.of(self.images(x))

    def verify(self, elements: Sequence[Element]) -> None:
        """Identity and compatibility laws x^e = x, x^(st) = (x^s)^t on the given elements"""
        e = self.group.identity
        for x in elements:
            if self.act(e, x) != x:
                raise ActionInvalid(f"Invalid action {self.name}: identity moves {x!r}")
            for s in self.group.elements:
                if not self.base.contains(self.act(s, x)):
                    raise ActionInvalid(f"Invalid action {self.name}: {s.name} maps {x!r} off the carrier")
                for t in self.group.elements:
                    if self.act(self.group.op(s, t), x) != self.act(t, self.act(s, x)):
                        raise ActionInvalid(f"Invalid action {self.name}: compatibility fails at ({s.name}, {t.name}, {x!r})")

    def verify_automorphism(self, elements: Sequence[Element]) -> None:
        for s in self.group.elements:
            for x in elements:
                for y in elements:
                    if self.act(s, self.base.op(x, y)) != self.base.op(self.act(s, x), self.act(s, y)):
                        raise NotAutomorphism(f"{self.name}: {s.name} is not a homomorphism at ({x!r}, {y!r})")


def sign_action() -> AffineAction:
    """H = {±1} acting on Z by sign"""
    return AffineAction("sign on Z", cyclic_two(("+1", "-1")), integers(), {"+1": lambda x: x, "-1": lambda x: -x})


def reflection_action(shift: int = 1) -> AffineAction:
    """x -> shift - x on Z: an affine action that is not an automorphism for shift != 0"""
    return AffineAction(f"reflection about {shift}/2 on Z", cyclic_two(), integers(),
                        {"id": lambda x: x, "flip": lambda x: shift - x}, form="affine")


def klein_action() -> AffineAction:
    """{id, α, β, γ} on ZxZ with α(x,y) = (-x,y), β(x,y) = (x,-y), γ(x,y) = (-x,-y)"""
    maps = {
        "id": lambda p: p,
        "alpha": lambda p: (-p[0], p[1]),
        "beta": lambda p: (p[0], -p[1]),
        "gamma": lambda p: (-p[0], -p[1]),
    }
    return AffineAction("Klein four on ZxZ", klein_four(), integer_pairs(), maps)


def swap_action() -> AffineAction:
    """α(x,y) = (y,x) on NxN"""
    return AffineAction("swap on NxN", cyclic_two(("id", "swap")), natural_pairs(),
                        {"id": lambda p: p, "swap": lambda p: (p[1], p[0])})


def zxn_reflection(mixed: bool = True) -> AffineAction:
    """α(x,y) = (-x,y) on (ZxN) ∪ {(0,0)}"""
    return AffineAction("x-reflection on ZxN", cyclic_two(), zxn_adjoined(mixed),
                        {"id": lambda p: p, "flip": lambda p: (-p[0], p[1])})


def trivial_action(base: CarrierAlgebra) -> AffineAction:
    return AffineAction(f"trivial on {base.name}", trivial_group(), base, {"id": lambda x: x})
