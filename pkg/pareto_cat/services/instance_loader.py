"""
Reading, validating and writing instance files.

The file structure is checked by pydantic models; the domain invariants are
checked by the category, valuation and scale modules and reported together,
each violation with a JSON path.
"""
from __future__ import annotations
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pareto_cat.category.rescat import (
    ResourceCategory, TargetCategory, check_structure, close_hom as close_hom_table,
    make_resource_category, make_target_category, validate_category,
)
from pareto_cat.category.summing import SummingFunctor, enumerate_summing_functors, make_functor
from pareto_cat.category.valuation import (
    ComposedValuation, ObjectDistribution, Objective, TableValuation, ValuationSystem, validate_valuation_system,
)
from pareto_cat.core.enums import ValuationKind
from pareto_cat.core.exceptions import (
    CategoryStructureError, DistributionError, FunctorError, InstanceParseError, InstanceValidationError,
    ScaleError, Violation,
)
from pareto_cat.core.logger import logger
from pareto_cat.scale.interleaving import ScaleData, ScaleObject, validate_scale_data

BUNDLED_FIXTURES = ("chain3", "cycle2", "staircase")


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TargetModel(_StrictModel):
    objects: int = Field(ge=1)
    hom: list[list[bool]]
    iso_classes: list[list[int]] | None = None


class CategoryModel(TargetModel):
    unit: int = 0
    tensor: list[list[int]]


class MapModel(_StrictModel):
    kind: ValuationKind
    entries: list[int] | None = None
    h: list[int] | None = None

    @model_validator(mode="after")
    def _check_payload(self):
        if self.kind is ValuationKind.TABLE and self.entries is None:
            raise ValueError("a table map needs 'entries'")
        if self.kind is ValuationKind.COMPOSED and self.h is None:
            raise ValueError("a composed map needs 'h'")
        return self


class ValuationModel(_StrictModel):
    name: str = ""
    target: TargetModel
    goal: int
    map: MapModel


class ScaleModel(_StrictModel):
    grid_len: int = Field(ge=1)
    valuations_scaled: list[list[list[int]]]


class DistributionModel(_StrictModel):
    # numbers, or fractions written as text ("3/10")
    weights: list[float | str]


class InstanceModel(_StrictModel):
    name: str = ""
    description: str = ""
    category: CategoryModel
    system_size: int = Field(ge=0)
    valuations: list[ValuationModel] = Field(min_length=1)
    distribution: DistributionModel
    scale: ScaleModel | None = None


@dataclass(frozen=True)
class Instance:
    """A resource category, valuation system, object distribution and optional grid data."""
    category: ResourceCategory
    system: ValuationSystem
    distribution: ObjectDistribution
    scale: ScaleData | None = None
    name: str = ""
    description: str = ""

    @property
    def system_size(self) -> int:
        return self.system.system_size

    def functor(self, values) -> SummingFunctor:
        values = tuple(values)
        if len(values) != self.system_size:
            raise FunctorError(f"Functor has {len(values)} values, the system has size {self.system_size}")
        return make_functor(self.category, values)

    def scaled(self, objective: int, phi: SummingFunctor) -> ScaleObject:
        """The scale object s -> F_{a,s}(Phi)."""
        if self.scale is None:
            raise ScaleError(f"Instance '{self.name}' has no scale section", "scale.missing")
        if not 0 <= objective < len(self.system.objectives):
            raise ScaleError(f"Objective {objective} out of range", "scale.objective")
        target = self.system.objectives[objective].target
        return ScaleObject(target, self.scale.values(objective, phi))


def _parse_weight(value: float | str, exact: bool):
    if isinstance(value, str):
        try:
            weight = Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise InstanceParseError(f"Distribution weight {value!r} is not a number") from e
        return weight if exact else float(weight)
    return Fraction(str(value)) if exact else float(value)


def _build_target(model: TargetModel) -> TargetCategory:
    return make_target_category(model.objects, model.hom, model.iso_classes)


def _build_category(model: CategoryModel) -> ResourceCategory:
    return make_resource_category(model.objects, model.hom, model.tensor, model.unit, model.iso_classes)


def _closed(cat: TargetCategory) -> TargetCategory:
    """Hom closure when the tables are well-formed; malformed ones are left for validation."""
    try:
        check_structure(cat)
    except CategoryStructureError:
        return cat
    return close_hom_table(cat)


def _category_violations(cat: TargetCategory, path: str) -> list[Violation]:
    try:
        report = validate_category(cat)
    except CategoryStructureError as e:
        return [Violation(e.code, str(e), path=path)]
    return [Violation(v.code, v.message, v.witness, path) for v in report.violations]


def _read_model(path: Path) -> InstanceModel:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error("Cannot read instance %s: %s", path, e)
        raise InstanceParseError(f"Cannot read {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"{path} is not valid JSON: {e}") from e
    try:
        return InstanceModel.model_validate(data)
    except ValidationError as e:
        details = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        raise InstanceParseError(f"{path} does not match the instance schema: {details}") from e


def build_instance(model: InstanceModel, close_hom: bool = False, cap: int | None = None,
                   exact: bool = False) -> Instance:
    """Turns a parsed model into a validated Instance or raises InstanceValidationError."""
    violations: list[Violation] = []
    category = _build_category(model.category)
    targets = [_build_target(v.target) for v in model.valuations]
    if close_hom:
        category = _closed(category)
        targets = [_closed(t) for t in targets]

    violations.extend(_category_violations(category, "category"))
    if violations:
        raise InstanceValidationError(violations)

    objectives = []
    for spec, target in zip(model.valuations, targets):
        valuation = (TableValuation(tuple(spec.map.entries)) if spec.map.kind is ValuationKind.TABLE
                     else ComposedValuation(tuple(spec.map.h)))
        objectives.append(Objective(target=target, goal=spec.goal, valuation=valuation, name=spec.name))
    system = ValuationSystem(category=category, system_size=model.system_size, objectives=tuple(objectives))
    violations.extend(validate_valuation_system(system, cap))

    distribution = None
    weights = model.distribution.weights
    if len(weights) != category.objects:
        violations.append(Violation("distribution.length",
                                    f"{len(weights)} weights for {category.objects} objects",
                                    path="distribution.weights"))
    else:
        try:
            distribution = ObjectDistribution(tuple(_parse_weight(w, exact) for w in weights))
        except DistributionError as e:
            violations.append(Violation(e.code, str(e), path="distribution.weights"))

    scale = None
    if model.scale is not None and not violations:
        scale = ScaleData(model.scale.grid_len,
                          tuple(tuple(tuple(row) for row in rows) for rows in model.scale.valuations_scaled))
        functors = list(enumerate_summing_functors(category, model.system_size, cap))
        base_images = [[obj.valuation(phi) for phi in functors] for obj in objectives]
        violations.extend(validate_scale_data(scale, targets, base_images))

    if violations:
        logger.error("Instance '%s' failed validation with %d violation(s)", model.name, len(violations))
        raise InstanceValidationError(violations)
    return Instance(category=category, system=system, distribution=distribution, scale=scale,
                    name=model.name, description=model.description)


def load_instance(path: str | Path, close_hom: bool = False, cap: int | None = None,
                  exact: bool = False) -> Instance:
    path = Path(path)
    instance = build_instance(_read_model(path), close_hom=close_hom, cap=cap, exact=exact)
    logger.info("Loaded instance '%s': K=%d, n=%d, %d objective(s)%s", instance.name, instance.category.objects,
                instance.system_size, len(instance.system.objectives), ", with scale data" if instance.scale else "")
    return instance


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture (chain3, cycle2, staircase)."""
    if name not in BUNDLED_FIXTURES:
        raise InstanceParseError(f"Unknown bundled fixture '{name}'")
    return Path(str(resources.files("pareto_cat.fixtures").joinpath(f"{name}.json")))


def load_fixture(name: str, **kwargs) -> Instance:
    return load_instance(fixture_path(name), **kwargs)


def _weight_to_json(w):
    if isinstance(w, Fraction) and w.denominator != 1:
        return f"{w.numerator}/{w.denominator}"
    return float(w)


def _target_to_dict(cat: TargetCategory) -> dict:
    return {"objects": cat.objects, "hom": [list(row) for row in cat.hom],
            "iso_classes": [list(members) for members in cat.iso_classes]}


def instance_to_dict(instance: Instance) -> dict:
    cat = instance.category
    data = {
        "name": instance.name,
        "description": instance.description,
        "category": {**_target_to_dict(cat), "unit": cat.unit, "tensor": [list(row) for row in cat.tensor]},
        "system_size": instance.system_size,
        "valuations": [],
        "distribution": {"weights": [_weight_to_json(w) for w in instance.distribution.weights]},
    }
    for obj in instance.system.objectives:
        mapping = {"kind": obj.valuation.kind.value}
        if obj.valuation.kind is ValuationKind.TABLE:
            mapping["entries"] = list(obj.valuation.entries)
        else:
            mapping["h"] = list(obj.valuation.h)
        data["valuations"].append({"name": obj.name, "target": _target_to_dict(obj.target),
                                   "goal": obj.goal, "map": mapping})
    if instance.scale is not None:
        data["scale"] = {"grid_len": instance.scale.grid_len,
                         "valuations_scaled": [[list(row) for row in rows] for rows in instance.scale.scaled]}
    return data


def dump_instance(instance: Instance, path: str | Path, indent: int = 2):
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=indent) + "\n", encoding="utf-8")
    logger.info("Wrote instance '%s' to %s", instance.name, path)
