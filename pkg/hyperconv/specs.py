"""
JSON specs for constructions, colorings, criteria and experiments

Construction specs look like {"builtin": "max_deformation", "v": "2^n",
"n_max": 20}; keys other than "builtin" and "params" are folded into
params, so {"builtin": ..., "params": {...}} is accepted as well. Builders
are registered by name in BUILDERS.
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config import HyperconvSettings, get_settings
from .core.algebra import (AffineAction, CarrierAlgebra, cyclic_two, finite_table, integer_pairs, integers,
                           klein_action, klein_four, max_semigroup, natural_pairs, nonneg_integers,
                           reflection_action, sign_action, sk_semigroup, swap_action, symmetric_group,
                           trivial_action, trivial_group, zxn_adjoined, zxn_reflection)
from .core.constructions import (ConditionReport, DeformationWeights, check_idempotent_deformation, cp1, cp2,
                                 deform, deformation_q, dunkl_ramirez, max_deformation, semigroup_descriptor)
from .core.elements import Element, element_from_json
from .core.errors import ConditionsNotVerified, SpecError
from .core.hypergroup import CheckResult, HypergroupDescriptor, VerificationReport, Window
from .core.orbits import (automorphism_orbit_hypergroup, coset_semiconvo, double_coset_hypergroup, orbit_semiconvo,
                          ross_quotient, semigroup_orbit_semiconvo)
from .core.polynomials import Recurrence, cartier, chebyshev_t, chebyshev_u_normalized, constant_recurrence, polynomial_hypergroup
from .core.ramsey import Coloring, Criterion

logger = logging.getLogger(__name__)

_MISSING = object()


# ==================== Request models ====================

class ConstructionSpec(BaseModel):
    """A builtin name plus its parameters"""
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    name: str = Field(alias="builtin")
    params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _fold_extras(cls, data: Any) -> Any:
        if isinstance(data, str):
            return {"builtin": data}
        if not isinstance(data, dict):
            return data
        known = {"builtin", "name", "params"}
        params = dict(data.get("params") or {})
        params.update({k: v for k, v in data.items() if k not in known})
        folded = {k: v for k, v in data.items() if k in known and k != "params"}
        folded["params"] = params
        return folded


class ColoringSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    kind: Literal["mod_k", "mod_4k", "triangular2", "table"]
    k: Optional[int] = Field(default=None, ge=1)
    assignment: List[List[Any]] = Field(default_factory=list)
    default: Optional[int] = Field(default=None, ge=1)

    def to_coloring(self) -> Coloring:
        if self.kind == "mod_k":
            return Coloring.mod_k(self._need_k())
        if self.kind == "mod_4k":
            return Coloring.mod_4k(self._need_k())
        if self.kind == "triangular2":
            return Coloring.triangular_two()
        table: Dict[Element, int] = {}
        for entry in self.assignment:
            if len(entry) != 2 or not isinstance(entry[1], int):
                raise SpecError(f"Invalid coloring entry {entry!r}: expected [element, class]")
            table[element_from_json(entry[0])] = entry[1]
        return Coloring.table(table, self.default)

    def _need_k(self) -> int:
        if self.k is None:
            raise SpecError(f"coloring {self.kind} needs k")
        return self.k


class CriterionSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    kind: Literal["mono", "alpha", "almost"] = "mono"
    alpha: Optional[str] = None
    budget: int = Field(default=2, ge=0)

    def to_criterion(self) -> Criterion:
        if self.kind == "alpha":
            if self.alpha is None:
                raise SpecError("criterion alpha needs an exact 'p/q' value")
            return Criterion.alpha_mass(self.alpha)
        if self.kind == "almost":
            return Criterion.almost(self.budget)
        return Criterion.mono()


class ExperimentSpec(BaseModel):
    """A Ramsey experiment; with a fixed sequence the criterion is checked instead of searched"""
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    hypergroup: ConstructionSpec
    coloring: ColoringSpec
    criterion: CriterionSpec = Field(default_factory=CriterionSpec)
    depth: Optional[int] = Field(default=None, ge=1)
    window: Optional[int] = Field(default=None, ge=1)
    sequence: Optional[List[Any]] = None


class RunConfig(BaseModel):
    """One CLI invocation after flags and settings are merged"""
    model_config = ConfigDict(populate_by_name=True)

    command: Literal["construct", "verify", "convolve", "experiment", "reproduce"]
    spec: Optional[Dict[str, Any]] = None
    name: Optional[str] = None
    out: Optional[str] = None
    output_format: Literal["json", "csv", "md"] = Field(default="json", alias="format")
    seed: int = 0
    window: int = Field(default=12, ge=1)
    depth: int = Field(default=3, ge=1)
    threads: int = Field(default=1, ge=1)


# ==================== Builder registry ====================

@dataclass
class Built:
    """A descriptor plus the condition report its builder produced, if any"""
    descriptor: HypergroupDescriptor
    conditions: Optional[VerificationReport] = None


Builder = Callable[[Dict[str, Any], HyperconvSettings], Built]
BUILDERS: Dict[str, Builder] = {}


def register(name: str) -> Callable[[Builder], Builder]:
    def decorator(fn: Builder) -> Builder:
        BUILDERS[name] = fn
        return fn
    return decorator


def _param(params: Dict[str, Any], key: str, default: Any = _MISSING) -> Any:
    if key in params:
        return params[key]
    if default is _MISSING:
        raise SpecError(f"missing parameter {key!r}")
    return default


def _int_param(params: Dict[str, Any], key: str, default: Any = _MISSING) -> int:
    value = _param(params, key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"parameter {key!r} must be an integer, got {value!r}")
    return value


def build(spec: Union[ConstructionSpec, Dict[str, Any], str], settings: Optional[HyperconvSettings] = None,
          allow_failed: bool = False) -> Built:
    """Resolve a construction spec through the registry

    A builder whose conditions fail raises ConditionsNotVerified unless
    allow_failed is set, in which case the failing report is returned.
    """
    if not isinstance(spec, ConstructionSpec):
        spec = ConstructionSpec.model_validate(spec)
    builder = BUILDERS.get(spec.name)
    if builder is None:
        raise SpecError(f"Unknown builtin {spec.name!r}; expected one of {sorted(BUILDERS)}")
    built = builder(spec.params, settings or get_settings())
    if built.conditions is not None and not built.conditions.passed and not allow_failed:
        failing = ", ".join(c.name for c in built.conditions.failures())
        raise ConditionsNotVerified(f"{spec.name}: {failing}")
    logger.info(f"Built {built.descriptor.name} from builtin {spec.name!r} (spec hash {built.descriptor.spec_hash})")
    return built


def _passed(subject: str, name: str, checked: int, note: Optional[str] = None) -> VerificationReport:
    return VerificationReport(subject, Window(()), [CheckResult(name, True, checked, note=note)], window_relative=False)


@register("cp1")
def _build_cp1(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    return Built(cp1())


@register("cp2")
def _build_cp2(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    return Built(cp2())


@register("dunkl_ramirez")
def _build_dunkl_ramirez(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    return Built(dunkl_ramirez(_param(params, "a")))


@register("max_deformation")
def _build_max_deformation(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    v = DeformationWeights.parse(_param(params, "v"))
    n_max = _int_param(params, "n_max", 20)
    K = max_deformation(v, n_max)
    return Built(K, _passed(K.name, "weight_condition", n_max, note=f"sum_(k<n) v_k <= v_n for 1 <= n <= {n_max}"))


_RECURRENCES: Dict[str, Callable[[Dict[str, Any]], Recurrence]] = {
    "chebyshev_t": lambda p: chebyshev_t(),
    "chebyshev_u": lambda p: chebyshev_u_normalized(),
    "cartier": lambda p: cartier(_param(p, "q")),
    "constant": lambda p: constant_recurrence(_param(p, "a"), _param(p, "b"), _param(p, "c"),
                                              _param(p, "a0", 1), _param(p, "b0", 0)),
}


@register("polynomial")
def _build_polynomial(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    name = _param(params, "recurrence")
    if name not in _RECURRENCES:
        raise SpecError(f"Unknown recurrence {name!r}; expected one of {sorted(_RECURRENCES)}")
    n_max = _int_param(params, "n_max", 20)
    K = polynomial_hypergroup(_RECURRENCES[name](params), n_max)
    return Built(K, _passed(K.name, "linearization_nonnegative", n_max, note="coefficients checked up to n_max"))


# ==================== Algebras and actions ====================

_ALGEBRAS: Dict[str, Callable[[Dict[str, Any]], CarrierAlgebra]] = {
    "integers": lambda p: integers(),
    "integer_pairs": lambda p: integer_pairs(),
    "nonneg_integers": lambda p: nonneg_integers(),
    "max": lambda p: max_semigroup(),
    "max_semigroup": lambda p: max_semigroup(),
    "natural_pairs": lambda p: natural_pairs(),
    "zxn_adjoined": lambda p: zxn_adjoined(bool(_param(p, "mixed", True))),
    "sk": lambda p: sk_semigroup(_int_param(p, "k")),
    "sk_semigroup": lambda p: sk_semigroup(_int_param(p, "k")),
    "symmetric_group": lambda p: symmetric_group(_int_param(p, "n", 3)),
    "klein_four": lambda p: klein_four(),
    "cyclic_two": lambda p: cyclic_two(),
    "trivial_group": lambda p: trivial_group(),
}


def algebra_from_spec(spec: Any) -> CarrierAlgebra:
    """A builtin algebra name, {"builtin": name, ...} or {"table": {"name", "elements", "rows", "identity"}}"""
    if isinstance(spec, str):
        spec = {"builtin": spec}
    if not isinstance(spec, dict):
        raise SpecError(f"Invalid algebra spec {spec!r}")
    if "table" in spec:
        table = spec["table"]
        try:
            return finite_table(table.get("name", "T"), table["elements"], table["rows"], table.get("identity"))
        except (KeyError, AttributeError) as exc:
            raise SpecError(f"Invalid table spec: {exc}") from exc
    name = spec.get("builtin")
    if name not in _ALGEBRAS:
        raise SpecError(f"Unknown algebra {name!r}; expected one of {sorted(_ALGEBRAS)} or a table")
    return _ALGEBRAS[name](spec)


_ACTIONS: Dict[str, Callable[[Dict[str, Any]], AffineAction]] = {
    "sign": lambda p: sign_action(),
    "reflection": lambda p: reflection_action(_int_param(p, "shift", 1)),
    "klein": lambda p: klein_action(),
    "swap": lambda p: swap_action(),
    "zxn_reflection": lambda p: zxn_reflection(bool(_param(p, "mixed", True))),
    "trivial": lambda p: trivial_action(algebra_from_spec(_param(p, "base"))),
}


def action_from_spec(spec: Any) -> AffineAction:
    if isinstance(spec, str):
        spec = {"name": spec}
    if not isinstance(spec, dict) or spec.get("name") not in _ACTIONS:
        raise SpecError(f"Unknown action {spec!r}; expected one of {sorted(_ACTIONS)}")
    return _ACTIONS[spec["name"]](spec)


@register("semigroup")
def _build_semigroup(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    return Built(semigroup_descriptor(algebra_from_spec(_param(params, "semigroup"))))


@register("idempotent_deformation")
def _build_idempotent_deformation(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    S = algebra_from_spec(_param(params, "semigroup", "max"))
    v = DeformationWeights.parse(_param(params, "v"))
    window = S.window(_int_param(params, "window", settings.window))
    idempotents = [x for x in window if S.is_idempotent(x) and x != S.identity]
    if any(isinstance(x, bool) or not isinstance(x, int) for x in idempotents):
        raise SpecError(f"weights v index idempotents by integers; {S.name} has {idempotents!r}")
    q = deformation_q(v, idempotents)
    report: ConditionReport = check_idempotent_deformation(S, q, None if S.is_finite else window)
    if not report.passed:
        # the undeformed semigroup stands in so the failing report can still be rendered
        return Built(semigroup_descriptor(S), report)
    return Built(deform(S, q, report), report)


@register("automorphism_orbit")
def _build_automorphism_orbit(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    return Built(automorphism_orbit_hypergroup(action_from_spec(_param(params, "action")), settings.window))


@register("orbit")
def _build_orbit(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    return Built(orbit_semiconvo(action_from_spec(_param(params, "action")), settings.window))


@register("semigroup_orbit")
def _build_semigroup_orbit(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    return Built(semigroup_orbit_semiconvo(action_from_spec(_param(params, "action")), settings.window))


def _subgroup(G: CarrierAlgebra, raw: Any) -> List[Element]:
    if not isinstance(raw, list) or not raw:
        raise SpecError("subgroup must be a non-empty list of elements")
    if not G.is_finite:
        return [element_from_json(x) for x in raw]
    members: List[Element] = []
    for x in raw:
        if isinstance(x, str):
            members.append(G.element(x))
        elif isinstance(x, int) and not isinstance(x, bool) and 0 <= x < len(G.elements):
            members.append(G.elements[x])
        else:
            raise SpecError(f"subgroup index {x!r} is out of range for {G.name} of order {len(G.elements)}")
    return members


@register("coset")
def _build_coset(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    G = algebra_from_spec(_param(params, "group", "symmetric_group"))
    return Built(coset_semiconvo(G, _subgroup(G, _param(params, "subgroup"))))


@register("double_coset")
def _build_double_coset(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    G = algebra_from_spec(_param(params, "group", "symmetric_group"))
    return Built(double_coset_hypergroup(G, _subgroup(G, _param(params, "subgroup"))))


@register("ross_quotient")
def _build_ross_quotient(params: Dict[str, Any], settings: HyperconvSettings) -> Built:
    parent = build(_param(params, "base"), settings).descriptor
    subgroup = [element_from_json(x) for x in _param(params, "subgroup")]
    window = parent.window(_int_param(params, "window", settings.window))
    return Built(ross_quotient(parent, subgroup, window))
