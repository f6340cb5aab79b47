"""
Orbit, coset and quotient hypergroups

All carriers here are spaces of labels: an orbit, coset or double coset
is the sorted tuple of its members, and the rule is evaluated on
representatives. Infinite base carriers stay lazy; only windows of labels
are ever enumerated.
"""
import logging
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Type

from .algebra import AffineAction, CarrierAlgebra
from .elements import CosetLabel, DoubleCosetLabel, Element, OrbitLabel, QuotientLabel
from .errors import NotCentral, NotCommutative, NotSubgroup
from .hypergroup import CarrierKind, Claim, HypergroupDescriptor, Window, center
from .measure import FiniteMeasure, push_forward

logger = logging.getLogger(__name__)

Projection = Callable[[Element], OrbitLabel]

DEFAULT_SAMPLE = 12


class OrbitDescriptor(HypergroupDescriptor):
    """A descriptor on a label space, remembering the base carrier and projection

    form is one of "affine", "automorphism", "semigroup", "coset", "double_coset".
    """

    def __init__(self, *args, base: CarrierAlgebra, project: Projection, group_order: int, form: str,
                 action: Optional[AffineAction] = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.base = base
        self.project = project
        self.group_order = group_order
        self.form = form
        self.action = action


class QuotientDescriptor(HypergroupDescriptor):
    """K//H for a finite subgroup H of the center of a commutative hypergroup K"""

    def __init__(self, *args, parent: HypergroupDescriptor, subgroup: Tuple[Element, ...],
                 project: Projection, **kwargs):
        super().__init__(*args, **kwargs)
        self.parent = parent
        self.subgroup = subgroup
        self.project = project

    def preimage(self, labels: Iterable[OrbitLabel]) -> set:
        """π⁻¹(E) as a set of parent elements"""
        return {x for label in labels for x in label.members}


def _label_enumerator(base_window: Callable[[int], Window], project: Projection,
                      spread: int) -> Callable[[int], List[OrbitLabel]]:
    """First `size` distinct labels of the base enumeration; each label covers at most `spread` elements"""

    def enumerate_labels(size: int) -> List[OrbitLabel]:
        labels: List[OrbitLabel] = []
        seen = set()
        for x in base_window(size * spread):
            label = project(x)
            if label not in seen:
                seen.add(label)
                labels.append(label)
                if len(labels) == size:
                    break
        return labels

    return enumerate_labels


def _label_contains(base: CarrierAlgebra, project: Projection, label_type: Type[OrbitLabel]):
    def contains(X: Element) -> bool:
        return type(X) is label_type and base.contains(X.representative) and project(X.representative) == X
    return contains


def _average(labels: Sequence[OrbitLabel], weight: Fraction) -> FiniteMeasure:
    return FiniteMeasure((label, weight) for label in labels)


def _sample_elements(base: CarrierAlgebra, sample: int) -> Tuple[Element, ...]:
    return base.elements if base.elements is not None else base.window(sample).elements


def orbit_semiconvo(action: AffineAction, sample: int = DEFAULT_SAMPLE) -> OrbitDescriptor:
    """δ_{x^H}*δ_{y^H} = (1/c²) Σ_{s,t} δ_{(x^s y^t)^H}"""
    G = action.base
    action.verify(_sample_elements(G, sample))
    c = action.order
    H = action.group.elements
    weight = Fraction(1, c * c)

    def project(x: Element) -> OrbitLabel:
        return action.orbit(x)

    def rule(X: OrbitLabel, Y: OrbitLabel) -> FiniteMeasure:
        x, y = X.representative, Y.representative
        return _average([project(G.op(action.act(s, x), action.act(t, y))) for s in H for t in H], weight)

    claims = [Claim.SEMICONVO_ONLY] + ([Claim.COMMUTATIVE] if G.commutative else [])
    return OrbitDescriptor(
        name=f"orbits[{action.name}]", carrier=CarrierKind.ORBITS, rule=rule, identity=project(G.identity),
        contains=_label_contains(G, project, OrbitLabel), claims=claims,
        enumerate_elements=_label_enumerator(G.window, project, c),
        spec={"builtin": "orbit_semiconvo", "action": action.name},
        elements=None if G.elements is None else {project(x) for x in G.elements},
        base=G, project=project, group_order=c, form=action.form, action=action,
    )


def automorphism_orbit_hypergroup(action: AffineAction, sample: int = DEFAULT_SAMPLE) -> OrbitDescriptor:
    """δ_{x^H}*δ_{y^H} = (1/c) Σ_s δ_{(x^s y)^H}, with (x^H)ˇ = (x⁻¹)^H"""
    G = action.base
    if not G.is_group:
        raise NotSubgroup(f"{G.name} is not a group; use semigroup_orbit_semiconvo")
    elements = _sample_elements(G, sample)
    action.verify(elements)
    action.verify_automorphism(elements)
    c = action.order
    H = action.group.elements
    weight = Fraction(1, c)

    def project(x: Element) -> OrbitLabel:
        return action.orbit(x)

    def rule(X: OrbitLabel, Y: OrbitLabel) -> FiniteMeasure:
        x, y = X.representative, Y.representative
        return _average([project(G.op(action.act(s, x), y)) for s in H], weight)

    def involution(X: OrbitLabel) -> OrbitLabel:
        return project(G.inverse(X.representative))

    labels = {project(x) for x in elements}
    claims = [Claim.HYPERGROUP]
    if G.commutative:
        claims.append(Claim.COMMUTATIVE)
        if all(involution(X) == X for X in labels):
            claims.append(Claim.HERMITIAN)
    logger.info(f"Built automorphism orbit hypergroup for {action.name} (c={c})")
    return OrbitDescriptor(
        name=f"{G.name}/[{action.name}]", carrier=CarrierKind.ORBITS, rule=rule, identity=project(G.identity),
        contains=_label_contains(G, project, OrbitLabel), involution=involution, claims=claims,
        enumerate_elements=_label_enumerator(G.window, project, c),
        spec={"builtin": "automorphism_orbit", "action": action.name},
        involution_kind="orbit_inverse",
        elements=None if G.elements is None else labels,
        base=G, project=project, group_order=c, form="automorphism", action=action,
    )


def semigroup_orbit_semiconvo(action: AffineAction, sample: int = DEFAULT_SAMPLE) -> OrbitDescriptor:
    """δ_{s^H}*δ_{t^H} = (1/c) Σ_{α∈H} δ_{(α(s)·t)^H}"""
    S = action.base
    elements = _sample_elements(S, sample)
    action.verify(elements)
    action.verify_automorphism(elements)
    c = action.order
    H = action.group.elements
    weight = Fraction(1, c)

    def project(x: Element) -> OrbitLabel:
        return action.orbit(x)

    def rule(X: OrbitLabel, Y: OrbitLabel) -> FiniteMeasure:
        s, t = X.representative, Y.representative
        return _average([project(S.op(action.act(alpha, s), t)) for alpha in H], weight)

    claims = [Claim.SEMICONVO_ONLY] + ([Claim.COMMUTATIVE] if S.commutative else [])
    return OrbitDescriptor(
        name=f"{S.name}/[{action.name}]", carrier=CarrierKind.ORBITS, rule=rule, identity=project(S.identity),
        contains=_label_contains(S, project, OrbitLabel), claims=claims,
        enumerate_elements=_label_enumerator(S.window, project, c),
        spec={"builtin": "semigroup_orbit", "action": action.name},
        elements=None if S.elements is None else {project(x) for x in S.elements},
        base=S, project=project, group_order=c, form="semigroup", action=action,
    )


def _validate_subgroup(G: CarrierAlgebra, H: Sequence[Element]) -> Tuple[Element, ...]:
    members = tuple(dict.fromkeys(H))
    if not members:
        raise NotSubgroup("Invalid subgroup: must be non-empty")
    if not G.is_group:
        raise NotSubgroup(f"{G.name} is not a group")
    for h in members:
        if not G.contains(h):
            raise NotSubgroup(f"{h!r} is not an element of {G.name}")
    if G.identity not in members:
        raise NotSubgroup(f"subgroup misses the identity {G.identity!r}")
    for a in members:
        if G.inverse(a) not in members:
            raise NotSubgroup(f"subgroup is not closed under inverses at {a!r}")
        for b in members:
            if G.op(a, b) not in members:
                raise NotSubgroup(f"subgroup is not closed at {a!r}·{b!r}")
    return members


def coset_semiconvo(G: CarrierAlgebra, H: Sequence[Element], sample: int = DEFAULT_SAMPLE) -> OrbitDescriptor:
    """δ_{xH}*δ_{yH} = (1/c) Σ_{s∈H} δ_{xsyH}"""
    members = _validate_subgroup(G, H)
    c = len(members)
    weight = Fraction(1, c)

    def project(x: Element) -> CosetLabel:
        return CosetLabel.of(G.op(x, h) for h in members)

    def rule(X: CosetLabel, Y: CosetLabel) -> FiniteMeasure:
        x, y = X.representative, Y.representative
        return _average([project(G.op(G.op(x, s), y)) for s in members], weight)

    finite = G.elements is not None
    labels = {project(x) for x in G.elements} if finite else None
    commutative = G.commutative or (finite and all(rule(X, Y) == rule(Y, X) for X in labels for Y in labels))
    claims = [Claim.SEMICONVO_ONLY] + ([Claim.COMMUTATIVE] if commutative else [])
    return OrbitDescriptor(
        name=f"{G.name}/H", carrier=CarrierKind.COSETS, rule=rule, identity=project(G.identity),
        contains=_label_contains(G, project, CosetLabel), claims=claims,
        enumerate_elements=_label_enumerator(G.window, project, c),
        spec={"builtin": "coset", "group": G.spec, "subgroup": [repr(h) for h in members]},
        elements=labels, base=G, project=project, group_order=c, form="coset",
    )


def double_coset_hypergroup(G: CarrierAlgebra, H: Sequence[Element], sample: int = DEFAULT_SAMPLE) -> OrbitDescriptor:
    """δ_{HxH}*δ_{HyH} = (1/c) Σ_{t∈H} δ_{HxtyH}, with (HxH)ˇ = Hx⁻¹H"""
    members = _validate_subgroup(G, H)
    c = len(members)
    weight = Fraction(1, c)

    def project(x: Element) -> DoubleCosetLabel:
        return DoubleCosetLabel.of(G.op(G.op(a, x), b) for a in members for b in members)

    def rule(X: DoubleCosetLabel, Y: DoubleCosetLabel) -> FiniteMeasure:
        x, y = X.representative, Y.representative
        return _average([project(G.op(G.op(x, t), y)) for t in members], weight)

    def involution(X: DoubleCosetLabel) -> DoubleCosetLabel:
        return project(G.inverse(X.representative))

    finite = G.elements is not None
    labels = {project(x) for x in G.elements} if finite else {project(x) for x in G.window(sample)}
    claims = [Claim.HYPERGROUP]
    if G.commutative or (finite and all(rule(X, Y) == rule(Y, X) for X in labels for Y in labels)):
        claims.append(Claim.COMMUTATIVE)
        if all(involution(X) == X for X in labels):
            claims.append(Claim.HERMITIAN)
    logger.info(f"Built double coset hypergroup {G.name}//H with {len(labels)} labels (c={c})")
    return OrbitDescriptor(
        name=f"{G.name}//H", carrier=CarrierKind.DOUBLE_COSETS, rule=rule, identity=project(G.identity),
        contains=_label_contains(G, project, DoubleCosetLabel), involution=involution, claims=claims,
        enumerate_elements=_label_enumerator(G.window, project, c * c),
        spec={"builtin": "double_coset", "group": G.spec, "subgroup": [repr(h) for h in members]},
        involution_kind="double_coset_inverse",
        elements=labels if finite else None,
        base=G, project=project, group_order=c, form="double_coset",
    )


def orbit_to_nonneg(label: OrbitLabel) -> int:
    """The canonical bijection Z/{±1} -> Z+, {n, -n} -> n"""
    return abs(label.representative)


def ross_quotient(K: HypergroupDescriptor, H: Sequence[Element], window: Window) -> QuotientDescriptor:
    """
    Quotient of a commutative hypergroup by a finite central subgroup

    Args:
        K: Commutative hypergroup
        H: Subgroup elements; must lie in the windowed center
        window: Window of K used for the centrality and representative checks

    Returns:
        K//H whose rule pushes δ_x*δ_y forward along x -> xH
    """
    if Claim.COMMUTATIVE not in K.claims and Claim.HERMITIAN not in K.claims:
        raise NotCommutative(f"{K.name} is not claimed commutative")
    members = tuple(dict.fromkeys(H))
    if K.identity not in members:
        raise NotSubgroup(f"subgroup misses the identity {K.identity!r}")

    central = center(K, Window(tuple(dict.fromkeys(tuple(window.elements) + members))))
    for h in members:
        if h not in central:
            raise NotCentral(f"{h!r} is not in the windowed center of {K.name}")
    for a in members:
        if K.involution is not None and K.involution(a) not in members:
            raise NotSubgroup(f"subgroup is not closed under the involution at {a!r}")
        for b in members:
            (prod,) = tuple(K.convolve(a, b))
            if prod not in members:
                raise NotSubgroup(f"subgroup is not closed at {a!r}*{b!r}")

    def translate(x: Element, h: Element) -> Element:
        mu = K.convolve(x, h)
        if not mu.is_point_mass():
            raise NotCentral(f"δ_{x!r}*δ_{h!r} is not a point mass")
        return next(iter(mu))

    def project(x: Element) -> QuotientLabel:
        return QuotientLabel.of(translate(x, h) for h in members)

    def rule(X: QuotientLabel, Y: QuotientLabel) -> FiniteMeasure:
        return push_forward(K.convolve(X.representative, Y.representative), project)

    # representative independence on the window
    labels = {project(x) for x in window}
    for X in labels:
        for Y in labels:
            expected = rule(X, Y)
            for x in X.members:
                for y in Y.members:
                    if K.contains(x) and K.contains(y) and push_forward(K.convolve(x, y), project) != expected:
                        raise NotCentral(f"quotient rule depends on representatives at ({x!r}, {y!r})")

    def contains(X: Element) -> bool:
        return type(X) is QuotientLabel and K.contains(X.representative) and project(X.representative) == X

    involution = None
    if K.involution is not None:
        def involution(X: QuotientLabel) -> QuotientLabel:
            return project(K.involution(X.representative))

    claims = [c for c in K.claims if c in (Claim.HYPERGROUP, Claim.HERMITIAN, Claim.COMMUTATIVE, Claim.SEMICONVO_ONLY)]
    logger.info(f"Built quotient {K.name}//H with |H|={len(members)}, {len(labels)} labels in the window")

    def base_window(size: int) -> Window:
        return K.window(size)

    return QuotientDescriptor(
        name=f"{K.name}//H", carrier=CarrierKind.QUOTIENT, rule=rule, identity=project(K.identity),
        contains=contains, involution=involution, claims=claims,
        enumerate_elements=_label_enumerator(base_window, project, len(members)),
        spec={"builtin": "ross_quotient", "parent": K.spec, "subgroup": [repr(h) for h in members]},
        involution_kind=K.involution_kind, family="quotient",
        elements=None if K.elements is None else {project(x) for x in K.elements},
        parent=K, subgroup=members, project=project,
    )


def quotient_rule_table(Q: QuotientDescriptor, labels: Sequence[OrbitLabel]) -> Dict[Tuple[OrbitLabel, OrbitLabel], FiniteMeasure]:
    return {(X, Y): Q.convolve(X, Y) for X in labels for Y in labels}
