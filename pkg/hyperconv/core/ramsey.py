"""
Colorings, FS/FP and FC/SFC families, and bounded Ramsey searches

Every verdict here is issued for a finite (window, depth) bound: a
witness means the finite family checks out, an exhaustion means no
injective sequence of length `depth` drawn from the window survives.
Index sets F are 1-based tuples in increasing order and δ_F always
composes its factors in that order.
"""
import itertools
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import (Any, Callable, Deque, Dict, FrozenSet, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple,
                    Union)

from .algebra import CarrierAlgebra
from .elements import Element, OrbitLabel, element_to_json, sort_elements
from .errors import ParamRange, PreconditionViolated, RuleDomainError, SpecError
from .hypergroup import HypergroupDescriptor, Window
from .measure import FiniteMeasure, fraction_str, point_mass

logger = logging.getLogger(__name__)

IndexSet = Tuple[int, ...]


# ==================== Colorings ====================

class ColoringKind(Enum):
    MOD_K = "mod_k"
    MOD_4K = "mod_4k"
    TRIANGULAR_TWO = "triangular2"
    TABLE = "table"
    PULLBACK = "pullback"


def _integer_key(x: Element) -> int:
    """Integer used by residue colorings; labels are colored through their representative"""
    if isinstance(x, OrbitLabel):
        return _integer_key(x.representative)
    if isinstance(x, bool) or not isinstance(x, int):
        raise SpecError(f"residue colorings need integer elements, got {x!r}")
    return x


def triangular_block(n: int) -> int:
    """Index of the block holding n when Z+ is cut into blocks of lengths 1, 1, 2, 3, 4, ..."""
    if n < 0:
        raise ParamRange(f"Invalid element: {n} must be >= 0")
    if n == 0:
        return 0
    # block b >= 1 starts at 1 + b(b-1)/2
    b = (1 + math.isqrt(8 * (n - 1) + 1)) // 2
    return b


@dataclass
class Coloring:
    """A finite coloring with classes 1..r"""
    kind: ColoringKind
    r: int
    classify: Callable[[Element], int]
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.r < 1:
            raise ParamRange(f"Invalid coloring: r={self.r} must be >= 1")

    def classes(self, elements: Sequence[Element]) -> Dict[int, List[Element]]:
        """Partition of the given elements into classes 1..r"""
        parts: Dict[int, List[Element]] = {i: [] for i in range(1, self.r + 1)}
        for x in elements:
            parts[self.classify(x)].append(x)
        return parts

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "r": self.r, **self.params}

    @classmethod
    def mod_k(cls, k: int, key: Callable[[Element], int] = _integer_key) -> "Coloring":
        """C_i = {n : n ≡ i-1 (mod k)}"""
        if k < 1:
            raise ParamRange(f"Invalid modulus: {k} must be >= 1")
        return cls(ColoringKind.MOD_K, k, lambda x: key(x) % k + 1, {"k": k})

    @classmethod
    def mod_4k(cls, k: int) -> "Coloring":
        """C_i = {n : n ≡ i-1 (mod 4^k)}"""
        if k < 1:
            raise ParamRange(f"Invalid exponent: {k} must be >= 1")
        modulus = 4 ** k
        return cls(ColoringKind.MOD_4K, modulus, lambda x: _integer_key(x) % modulus + 1, {"k": k})

    @classmethod
    def triangular_two(cls) -> "Coloring":
        """Blocks of lengths 1, 1, 2, 3, ... colored alternately, starting with 1 at 0"""
        return cls(ColoringKind.TRIANGULAR_TWO, 2,
                   lambda x: 1 if triangular_block(_integer_key(x)) % 2 == 0 else 2)

    @classmethod
    def table(cls, assignment: Mapping[Element, int], default: Optional[int] = None) -> "Coloring":
        values = set(assignment.values()) | ({default} if default is not None else set())
        if not values or min(values) < 1:
            raise SpecError("Invalid coloring table: classes must be integers >= 1")

        def classify(x: Element) -> int:
            if x in assignment:
                return assignment[x]
            if default is None:
                raise SpecError(f"coloring table has no class for {x!r}")
            return default

        params: Dict[str, Any] = {
            "assignment": [[element_to_json(x), assignment[x]] for x in sort_elements(assignment)]
        }
        if default is not None:
            params["default"] = default
        return cls(ColoringKind.TABLE, max(values), classify, params)

    def pullback(self, project: Callable[[Element], Element]) -> "Coloring":
        """C̃_i = π⁻¹(C_i)"""
        return Coloring(ColoringKind.PULLBACK, self.r, lambda x: self.classify(project(x)),
                        {"of": self.describe()})


def class_masses(mu: FiniteMeasure, coloring: Coloring) -> Dict[int, Fraction]:
    """μ(C_i) for every class i = 1..r"""
    masses = {i: Fraction(0) for i in range(1, coloring.r + 1)}
    for x, w in mu.items():
        masses[coloring.classify(x)] += w
    return masses


# ==================== Criteria ====================

class CriterionKind(Enum):
    MONO = "mono"
    ALPHA = "alpha"
    ALMOST = "almost"


@dataclass(frozen=True)
class Criterion:
    """Mono: δ_F(C_i) = 1; AlphaMass: δ_F(C_i) > α; AlmostMono: Mono off F with max(F) <= budget"""
    kind: CriterionKind
    alpha: Fraction = Fraction(0)
    budget: int = 2

    @classmethod
    def mono(cls) -> "Criterion":
        return cls(CriterionKind.MONO)

    @classmethod
    def alpha_mass(cls, alpha: Union[Fraction, int, str]) -> "Criterion":
        alpha = Fraction(alpha)
        if not 0 <= alpha < 1:
            raise ParamRange(f"Invalid alpha: {alpha} must lie in [0, 1)")
        return cls(CriterionKind.ALPHA, alpha=alpha)

    @classmethod
    def almost(cls, budget: int = 2) -> "Criterion":
        if budget < 0:
            raise ParamRange(f"Invalid budget: {budget} must be >= 0")
        return cls(CriterionKind.ALMOST, budget=budget)

    def accepts(self, mass: Fraction) -> bool:
        if self.kind is CriterionKind.ALPHA:
            return mass > self.alpha
        return mass == 1

    def exempt(self, F: IndexSet) -> bool:
        return self.kind is CriterionKind.ALMOST and max(F) <= self.budget

    def describe(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value}
        if self.kind is CriterionKind.ALPHA:
            data["alpha"] = fraction_str(self.alpha)
        if self.kind is CriterionKind.ALMOST:
            data["budget"] = self.budget
        return data


class Verdict(Enum):
    WITNESS = "witness"
    REFUTED = "refuted"
    EXHAUSTED = "exhausted"


# ==================== Families ====================

@dataclass(frozen=True)
class SequenceCandidate:
    """An injective sequence avoiding the identity"""
    terms: Tuple[Element, ...]

    @classmethod
    def of(cls, terms: Sequence[Element], identity: Element) -> "SequenceCandidate":
        terms = tuple(terms)
        if len(set(terms)) != len(terms):
            raise PreconditionViolated(f"sequence {terms!r} is not injective")
        if identity in terms:
            raise PreconditionViolated(f"sequence contains the identity {identity!r}")
        return cls(terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, index: int) -> Element:
        return self.terms[index]


class FamilyEntry(NamedTuple):
    F: IndexSet
    measure: FiniteMeasure
    support: FrozenSet[Element]


def index_sets(length: int, depth: int) -> List[IndexSet]:
    """Non-empty F ⊆ {1..length} with |F| <= depth, by size then lexicographically"""
    top = min(depth, length)
    return [F for size in range(1, top + 1) for F in itertools.combinations(range(1, length + 1), size)]


def fs_fp_set(S: CarrierAlgebra, xs: Sequence[Element], depth: int) -> Set[Element]:
    """FP(<x_n>) truncated to index sets of size <= depth, factors in increasing index order"""
    if depth < 1:
        raise ParamRange(f"Invalid depth: {depth} must be >= 1")
    return {S.product([xs[i - 1] for i in F]) for F in index_sets(len(xs), depth)}


def sfc(K: HypergroupDescriptor, xs: Sequence[Element], depth: int) -> List[FamilyEntry]:
    """δ_F and spt(δ_F) for every non-empty F with |F| <= depth"""
    if depth < 1:
        raise ParamRange(f"Invalid depth: {depth} must be >= 1")
    cache: Dict[IndexSet, FiniteMeasure] = {}
    family: List[FamilyEntry] = []
    for F in index_sets(len(xs), depth):
        last = xs[F[-1] - 1]
        if len(F) == 1:
            if not K.contains(last):
                raise RuleDomainError(f"{last!r} is not in the carrier of {K.name}")
            mu = point_mass(last)
        else:
            mu = K.convolve_measures(cache[F[:-1]], point_mass(last))
        cache[F] = mu
        family.append(FamilyEntry(F, mu, frozenset(mu)))
    return family


# ==================== Reports ====================

@dataclass
class FamilyRow:
    F: IndexSet
    support: Tuple[Element, ...]
    masses: Dict[int, Fraction]
    exempt: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "F": list(self.F),
            "support": [element_to_json(x) for x in self.support],
            "masses": {str(i): fraction_str(m) for i, m in self.masses.items() if m},
            "exempt": self.exempt,
        }


def _render_F(F: IndexSet) -> str:
    return "{" + ",".join(str(i) for i in F) + "}"


def _render_support(support: Sequence[Element]) -> str:
    return "{" + ",".join(repr(x) for x in support) + "}"


@dataclass
class ExperimentReport:
    """Outcome of a criterion check or a bounded search; carries everything needed to re-verify it"""
    subject: str
    spec_hash: str
    criterion: Criterion
    coloring: Coloring
    verdict: Verdict
    depth: int
    color: Optional[int] = None
    sequence: Optional[Tuple[Element, ...]] = None
    rows: List[FamilyRow] = field(default_factory=list)
    refuting: Optional[IndexSet] = None
    window: Optional[Window] = None
    nodes: Dict[str, int] = field(default_factory=lambda: {"visited": 0, "pruned": 0})
    seed: Optional[int] = None

    @property
    def found(self) -> bool:
        return self.verdict is Verdict.WITNESS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subject": self.subject,
            "spec_hash": self.spec_hash,
            "criterion": self.criterion.describe(),
            "coloring": self.coloring.describe(),
            "verdict": self.verdict.value,
            "color": self.color,
            "sequence": None if self.sequence is None else [element_to_json(x) for x in self.sequence],
            "refuting_F": None if self.refuting is None else list(self.refuting),
            "window": None if self.window is None else self.window.describe(),
            "depth": self.depth,
            "window_relative": True,
            "nodes": dict(self.nodes),
            "seed": self.seed,
            "rows": [row.to_dict() for row in self.rows],
        }

    def markdown(self) -> str:
        lines = [
            f"## {self.subject}: {self.verdict.value}",
            "",
            f"- criterion: {self.criterion.describe()}",
            f"- coloring: {self.coloring.kind.value} (r={self.coloring.r})",
            f"- depth: {self.depth}, window: {len(self.window) if self.window is not None else '-'}",
            f"- color: {self.color if self.color is not None else '-'}",
            f"- nodes: visited={self.nodes['visited']}, pruned={self.nodes['pruned']}",
            "",
            "| F | support | class masses |",
            "|---|---------|--------------|",
        ]
        for row in self.rows:
            masses = ", ".join(f"C{i}: {fraction_str(m)}" for i, m in row.masses.items() if m)
            lines.append(f"| {_render_F(row.F)} | {_render_support(row.support)} | {masses} |")
        return "\n".join(lines) + "\n"

    def csv_rows(self) -> List[str]:
        out = ["F;support;class;mass_num;mass_den"]
        for row in self.rows:
            for i, m in row.masses.items():
                if m:
                    out.append(f"{_render_F(row.F)};{_render_support(row.support)};{i};{m.numerator};{m.denominator}")
        return out


def _row(entry: FamilyEntry, coloring: Coloring, criterion: Criterion) -> FamilyRow:
    return FamilyRow(entry.F, tuple(sort_elements(entry.support)), class_masses(entry.measure, coloring),
                     criterion.exempt(entry.F))


def check_criterion(K: HypergroupDescriptor,
                    xs: Sequence[Element],
                    coloring: Coloring,
                    depth: int,
                    criterion: Criterion) -> ExperimentReport:
    """
    Check one criterion against a fixed sequence

    Args:
        K: Semiconvo to evaluate δ_F in
        xs: Injective sequence avoiding the identity
        coloring: Finite coloring of K
        depth: Largest |F| considered
        criterion: Mono, AlphaMass or AlmostMono

    Returns:
        WITNESS with the least surviving class, or REFUTED naming the F
        at which the last class dropped out
    """
    candidate = SequenceCandidate.of(xs, K.identity)
    rows = [_row(entry, coloring, criterion) for entry in sfc(K, candidate.terms, depth)]
    survivors = set(range(1, coloring.r + 1))
    refuting: Optional[IndexSet] = None
    for row in rows:
        if row.exempt:
            continue
        survivors = {i for i in survivors if criterion.accepts(row.masses[i])}
        if not survivors and refuting is None:
            refuting = row.F
    verdict = Verdict.WITNESS if survivors else Verdict.REFUTED
    return ExperimentReport(
        subject=K.name, spec_hash=K.spec_hash, criterion=criterion, coloring=coloring, verdict=verdict,
        depth=depth, color=min(survivors) if survivors else None, sequence=candidate.terms, rows=rows,
        refuting=refuting,
    )


# ==================== Search ====================

@dataclass
class _SubtreeResult:
    sequence: Optional[Tuple[Element, ...]]
    survivors: Set[int]
    visited: int = 0
    pruned: int = 0


class _Search:
    """Depth-first search over injective sequences, pruning a prefix once no class survives"""

    def __init__(self, K: HypergroupDescriptor, coloring: Coloring, depth: int,
                 candidates: Sequence[Element], criterion: Criterion):
        self.K = K
        self.coloring = coloring
        self.depth = depth
        self.candidates = candidates
        self.criterion = criterion

    def _extend(self, family: Dict[IndexSet, FiniteMeasure], x: Element, j: int
                ) -> Dict[IndexSet, FiniteMeasure]:
        """δ_F for every new F ending at index j"""
        new: Dict[IndexSet, FiniteMeasure] = {(j,): point_mass(x)}
        for F, mu in family.items():
            if len(F) < self.depth:
                new[F + (j,)] = self.K.convolve_measures(mu, point_mass(x))
        return new

    def _filter(self, survivors: Set[int], new: Dict[IndexSet, FiniteMeasure]) -> Set[int]:
        for F, mu in new.items():
            if not survivors:
                break
            if self.criterion.exempt(F):
                continue
            masses = class_masses(mu, self.coloring)
            survivors = {i for i in survivors if self.criterion.accepts(masses[i])}
        return survivors

    def subtree(self, first: Element) -> _SubtreeResult:
        result = _SubtreeResult(None, set())
        family = self._extend({}, first, 1)
        survivors = self._filter(set(range(1, self.coloring.r + 1)), family)
        result.visited += 1
        if not survivors:
            result.pruned += 1
            return result
        found = self._descend((first,), family, survivors, result)
        if found is not None:
            result.sequence, result.survivors = found
        return result

    def _descend(self, prefix: Tuple[Element, ...], family: Dict[IndexSet, FiniteMeasure],
                 survivors: Set[int], result: _SubtreeResult) -> Optional[Tuple[Tuple[Element, ...], Set[int]]]:
        if len(prefix) == self.depth:
            return prefix, survivors
        j = len(prefix) + 1
        for x in self.candidates:
            if x in prefix:
                continue
            result.visited += 1
            new = self._extend(family, x, j)
            remaining = self._filter(survivors, new)
            if not remaining:
                result.pruned += 1
                continue
            found = self._descend(prefix + (x,), {**family, **new}, remaining, result)
            if found is not None:
                return found
        return None


def search_sequence(K: HypergroupDescriptor,
                    coloring: Coloring,
                    depth: int,
                    window: Window,
                    criterion: Criterion,
                    threads: int = 1) -> ExperimentReport:
    """
    Bounded search for a sequence of length `depth` satisfying the criterion

    Candidates are the window's elements other than the identity, in window
    order. First elements are fanned out over a thread pool; the witness
    reported is always the lexicographically first one, and node counts
    cover exactly the subtrees up to and including it.
    """
    if depth < 1:
        raise ParamRange(f"Invalid depth: {depth} must be >= 1")
    if threads < 1:
        raise ParamRange(f"Invalid thread count: {threads} must be >= 1")
    candidates = [x for x in window if x != K.identity]
    search = _Search(K, coloring, depth, candidates, criterion)

    results: List[_SubtreeResult] = []
    if threads == 1:
        for first in candidates:
            results.append(search.subtree(first))
            if results[-1].sequence is not None:
                break
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            futures = [executor.submit(search.subtree, first) for first in candidates]
            for future in futures:
                results.append(future.result())
                if results[-1].sequence is not None:
                    for rest in futures[len(results):]:
                        rest.cancel()
                    break

    nodes = {"visited": sum(r.visited for r in results), "pruned": sum(r.pruned for r in results)}
    winner = results[-1] if results and results[-1].sequence is not None else None

    if winner is None:
        logger.info(f"Search on {K.name} exhausted: window={len(window)}, depth={depth}, "
                    f"visited={nodes['visited']}, pruned={nodes['pruned']}")
        return ExperimentReport(
            subject=K.name, spec_hash=K.spec_hash, criterion=criterion, coloring=coloring,
            verdict=Verdict.EXHAUSTED, depth=depth, window=window, nodes=nodes,
        )

    report = check_criterion(K, winner.sequence, coloring, depth, criterion)
    report.window = window
    report.nodes = nodes
    logger.info(f"Search on {K.name} found {list(winner.sequence)!r} in class {report.color}: "
                f"visited={nodes['visited']}, pruned={nodes['pruned']}")
    return report


# ==================== Sub-structures ====================

@dataclass(frozen=True)
class Closed:
    elements: Tuple[Element, ...]
    additive_closed: Optional[bool] = None
    truncated: bool = False


@dataclass(frozen=True)
class EscapesWindow:
    element: Element
    partial: Tuple[Element, ...]


def subalgebra_closure(K: HypergroupDescriptor,
                       gens: Sequence[Element],
                       window: Window,
                       truncate: bool = False) -> Union[Closed, EscapesWindow]:
    """
    Close gens under supports of pairwise convolutions inside the window

    With truncate=True elements leaving the window are dropped and the
    result is flagged truncated instead of returning EscapesWindow.
    For polynomial hypergroups the closed set is also tested for closure
    under + within the window.
    """
    inside = set(window.elements)
    closed: List[Element] = []
    members: Set[Element] = set()
    queue: Deque[Element] = deque()
    truncated = False

    def admit(x: Element) -> Optional[Element]:
        nonlocal truncated
        if x in members:
            return None
        if x not in inside:
            if truncate:
                truncated = True
                return None
            return x
        members.add(x)
        closed.append(x)
        queue.append(x)
        return None

    for g in gens:
        escaped = admit(g)
        if escaped is not None:
            return EscapesWindow(escaped, tuple(sort_elements(closed)))

    while queue:
        x = queue.popleft()
        for y in list(closed):
            for a, b in ((x, y), (y, x)):
                for z in K.convolve(a, b):
                    escaped = admit(z)
                    if escaped is not None:
                        logger.debug(f"{K.name}: closure of {list(gens)!r} leaves the window at {escaped!r}")
                        return EscapesWindow(escaped, tuple(sort_elements(closed)))

    additive = None
    if K.family == "polynomial":
        additive = all(a + b in members for a in members for b in members if a + b in inside)
    return Closed(tuple(sort_elements(closed)), additive, truncated)


@dataclass
class SubstructureReport:
    generators: Tuple[Element, ...]
    closure: Union[Closed, EscapesWindow]
    distribution: Dict[int, int]
    window: Window

    @property
    def monochromatic(self) -> bool:
        return sum(1 for count in self.distribution.values() if count) <= 1

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "generators": [element_to_json(x) for x in self.generators],
            "window": self.window.describe(),
            "window_relative": True,
            "distribution": {str(i): n for i, n in self.distribution.items()},
            "monochromatic": self.monochromatic,
        }
        if isinstance(self.closure, Closed):
            data["closure"] = {
                "elements": [element_to_json(x) for x in self.closure.elements],
                "additive_closed": self.closure.additive_closed,
                "truncated": self.closure.truncated,
            }
        else:
            data["escapes"] = element_to_json(self.closure.element)
        return data


def inspect_substructure(K: HypergroupDescriptor, gens: Sequence[Element], window: Window,
                         coloring: Coloring) -> SubstructureReport:
    """Window-truncated closure of gens with its class distribution"""
    closure = subalgebra_closure(K, gens, window, truncate=True)
    elements = closure.elements if isinstance(closure, Closed) else closure.partial
    distribution = {i: len(part) for i, part in coloring.classes(elements).items()}
    report = SubstructureReport(tuple(gens), closure, distribution, window)
    if not report.monochromatic:
        logger.info(f"{K.name}: closure of {list(gens)!r} meets classes "
                    f"{[i for i, n in distribution.items() if n]} inside the window")
    return report
