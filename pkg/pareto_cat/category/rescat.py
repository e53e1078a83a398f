"""
Finite resource categories.

A category is kept thin: each hom-set is represented only by whether it is
nonempty, plus a partition of the objects into isomorphism classes. Resource
categories add a tensor table and a unit; the monoidal laws are required up
to isomorphism.
"""
from __future__ import annotations
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence
import networkx as nx
from pareto_cat.core.config import settings
from pareto_cat.core.exceptions import CategoryStructureError, ObjectRangeError, Violation
from pareto_cat.core.logger import logger


@dataclass(frozen=True)
class TargetCategory:
    """Thin category without monoidal structure (objectives live here)."""
    objects: int
    hom: tuple[tuple[bool, ...], ...]
    iso_classes: tuple[tuple[int, ...], ...]

    @cached_property
    def class_of(self) -> tuple[int, ...]:
        """Index of the iso class of every object."""
        index = [-1] * self.objects
        for class_id, members in enumerate(self.iso_classes):
            for obj in members:
                index[obj] = class_id
        return tuple(index)

    def check_object(self, obj: int) -> int:
        if not 0 <= obj < self.objects:
            raise ObjectRangeError(f"Object id {obj} outside 0..{self.objects - 1}")
        return obj

    def convertible(self, a: int, b: int) -> bool:
        return self.hom[a][b]

    def isomorphic(self, a: int, b: int) -> bool:
        return self.class_of[a] == self.class_of[b]

    def iso_class(self, obj: int) -> int:
        return self.class_of[obj]


@dataclass(frozen=True)
class ResourceCategory(TargetCategory):
    """Finite symmetric monoidal category given by tables."""
    unit: int = 0
    tensor: tuple[tuple[int, ...], ...] = field(default=())

    def tensor_of(self, a: int, b: int) -> int:
        return self.tensor[a][b]


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, *witness: int):
        self.violations.append(Violation(code=code, message=message, witness=tuple(witness)))

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def make_target_category(objects: int, hom: Sequence[Sequence[bool]],
                         iso_classes: Iterable[Iterable[int]] | None = None) -> TargetCategory:
    """Builds a target category; iso classes default to singletons."""
    classes = _freeze_classes(objects, iso_classes)
    return TargetCategory(objects=objects, hom=tuple(tuple(bool(x) for x in row) for row in hom),
                          iso_classes=classes)


def make_resource_category(objects: int, hom: Sequence[Sequence[bool]], tensor: Sequence[Sequence[int]],
                           unit: int = 0, iso_classes: Iterable[Iterable[int]] | None = None) -> ResourceCategory:
    classes = _freeze_classes(objects, iso_classes)
    return ResourceCategory(objects=objects, hom=tuple(tuple(bool(x) for x in row) for row in hom),
                            iso_classes=classes, unit=unit,
                            tensor=tuple(tuple(int(x) for x in row) for row in tensor))


def _freeze_classes(objects: int, iso_classes) -> tuple[tuple[int, ...], ...]:
    if iso_classes is None:
        return tuple((i,) for i in range(objects))
    return tuple(tuple(int(x) for x in members) for members in iso_classes)


def check_structure(cat: TargetCategory):
    """Raises CategoryStructureError unless all tables match the object count."""
    k = cat.objects
    if k < 1:
        raise CategoryStructureError("A category needs at least one object")
    if len(cat.hom) != k or any(len(row) != k for row in cat.hom):
        raise CategoryStructureError(f"hom table must be {k}x{k}")
    seen: list[int] = []
    for members in cat.iso_classes:
        if not members:
            raise CategoryStructureError("iso classes must be nonempty")
        seen.extend(members)
    if sorted(seen) != list(range(k)):
        raise CategoryStructureError(f"iso classes must partition 0..{k - 1}")
    if isinstance(cat, ResourceCategory):
        if len(cat.tensor) != k or any(len(row) != k for row in cat.tensor):
            raise CategoryStructureError(f"tensor table must be {k}x{k}")
        if any(not 0 <= x < k for row in cat.tensor for x in row):
            raise CategoryStructureError("tensor table references unknown objects")
        if not 0 <= cat.unit < k:
            raise CategoryStructureError(f"unit {cat.unit} outside 0..{k - 1}")


def validate_category(cat: TargetCategory) -> ValidationReport:
    """
    Checks every category invariant over all pairs and triples.

    Dimension problems raise CategoryStructureError; invariant failures are
    collected in the report with witnessing object ids.
    """
    check_structure(cat)
    report = ValidationReport()
    objs = range(cat.objects)
    hom = cat.hom

    for a in objs:
        if not hom[a][a]:
            report.add("rescat.hom.reflexivity", f"missing identity on {a}", a)
    for a, b, c in product(objs, repeat=3):
        if hom[a][b] and hom[b][c] and not hom[a][c]:
            report.add("rescat.hom.transitivity", f"hom({a},{b}) and hom({b},{c}) but not hom({a},{c})", a, b, c)
    for a, b in product(objs, repeat=2):
        if cat.isomorphic(a, b) and not (hom[a][b] and hom[b][a]):
            report.add("rescat.iso.hom", f"{a} and {b} isomorphic without arrows both ways", a, b)
    for a, a2, b in product(objs, repeat=3):
        if a != a2 and cat.isomorphic(a, a2) and (hom[a][b] != hom[a2][b] or hom[b][a] != hom[b][a2]):
            report.add("rescat.hom.iso_respect", f"hom differs between isomorphic {a} and {a2} against {b}", a, a2, b)

    if isinstance(cat, ResourceCategory):
        _validate_monoidal(cat, report)

    if report.passed:
        logger.debug("Category with %d objects passed validation", cat.objects)
    return report


def _validate_monoidal(cat: ResourceCategory, report: ValidationReport):
    objs = range(cat.objects)
    cls = cat.class_of
    t = cat.tensor
    for a in objs:
        if cls[t[a][cat.unit]] != cls[a] or cls[t[cat.unit][a]] != cls[a]:
            report.add("rescat.tensor.unit", f"{a} tensor unit is not isomorphic to {a}", a)
    for a, b in product(objs, repeat=2):
        if cls[t[a][b]] != cls[t[b][a]]:
            report.add("rescat.tensor.symmetry", f"{a}*{b} and {b}*{a} not isomorphic", a, b)
    for a, b, c in product(objs, repeat=3):
        if cls[t[t[a][b]][c]] != cls[t[a][t[b][c]]]:
            report.add("rescat.tensor.associativity", f"({a}*{b})*{c} and {a}*({b}*{c}) not isomorphic", a, b, c)
        if b != a and cls[a] == cls[b] and (cls[t[a][c]] != cls[t[b][c]] or cls[t[c][a]] != cls[t[c][b]]):
            report.add("rescat.tensor.iso_respect", f"tensor with {c} separates isomorphic {a} and {b}", a, b, c)
    arrows = [(a, b) for a, b in product(objs, repeat=2) if cat.hom[a][b]]
    for (a, b), (a2, b2) in product(arrows, repeat=2):
        if not cat.hom[t[a][a2]][t[b][b2]]:
            report.add("rescat.tensor.functoriality",
                       f"hom({a},{b}) and hom({a2},{b2}) but not hom({a}*{a2},{b}*{b2})", a, b, a2, b2)


def close_hom(cat: TargetCategory) -> TargetCategory:
    """Returns a copy whose hom table is the reflexive-transitive closure (iso arrows included)."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(cat.objects))
    graph.add_edges_from((a, b) for a in range(cat.objects) for b in range(cat.objects) if cat.hom[a][b])
    for members in cat.iso_classes:
        graph.add_edges_from((a, b) for a in members for b in members)
    closure = nx.transitive_closure(graph, reflexive=True)
    hom = tuple(tuple(closure.has_edge(a, b) for b in range(cat.objects)) for a in range(cat.objects))
    added = sum(row.count(True) for row in hom) - sum(row.count(True) for row in cat.hom)
    logger.info("Closed hom table: %d arrow(s) added", added)
    return replace(cat, hom=hom)


def convertible(cat: TargetCategory, a: int, b: int) -> bool:
    """True iff Hom(a, b) is nonempty."""
    cat.check_object(a)
    cat.check_object(b)
    return cat.convertible(a, b)


def fold_tensor(cat: ResourceCategory, ids: Iterable[int]) -> int:
    """Left fold of the tensor over ids in the given order; the empty fold is the unit."""
    result = None
    for obj in ids:
        result = obj if result is None else cat.tensor[result][obj]
    return cat.unit if result is None else result


def tensor_power(cat: ResourceCategory, a: int, n: int) -> int:
    """n-fold tensor a*a*...*a for n >= 1."""
    cat.check_object(a)
    if n < 1:
        raise ValueError("tensor_power needs n >= 1")
    return fold_tensor(cat, [a] * n)


def conversion_rate(cat: ResourceCategory, a: int, b: int, n_max: int | None = None) -> Fraction | None:
    """
    Largest m/n with n.a convertible to m.b and 1 <= m, n <= n_max.

    Powers are built incrementally, so the scan costs n_max tensor steps per
    side plus n_max^2 table lookups. Returns None when no pair qualifies.
    """
    cat.check_object(a)
    cat.check_object(b)
    n_max = settings.conversion_n_max if n_max is None else n_max
    if n_max < 1:
        raise ValueError("conversion_rate needs n_max >= 1")

    powers_a, powers_b = [a], [b]
    for _ in range(n_max - 1):
        powers_a.append(cat.tensor[powers_a[-1]][a])
        powers_b.append(cat.tensor[powers_b[-1]][b])

    best: Fraction | None = None
    for n, source in enumerate(powers_a, start=1):
        for m in range(n_max, 0, -1):
            if cat.hom[source][powers_b[m - 1]]:
                rate = Fraction(m, n)
                if best is None or rate > best:
                    best = rate
                break
    return best
