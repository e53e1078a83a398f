"""
Probabilistic categories PC over a thin base category.

Objects are finite convex combinations of base objects; morphisms pair a
column-stochastic matrix with weighted families of base arrows. Base arrows
are tags witnessing a nonempty hom-set. Isomorphism in the base is supplied
as a class-key function, so the same code serves target objects (int ids)
and summing functors.
"""
from __future__ import annotations
import math
from collections import defaultdict
from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from numbers import Real
from pareto_cat.core.config import settings
from pareto_cat.core.exceptions import ProbabilisticError

ClassKey = Callable[[Hashable], Hashable]
ObjectMap = Callable[[Hashable], Hashable] | Mapping | Sequence


def _fsum(values: Iterable[Real]) -> Real:
    values = list(values)
    if values and all(isinstance(v, (Fraction, int)) for v in values):
        return sum(values, Fraction(0))
    return math.fsum(values)


@dataclass(frozen=True)
class ProbObject:
    """Formal convex combination sum_i w_i C_i with strictly positive weights."""
    components: tuple[tuple[Real, Hashable], ...]

    def __post_init__(self):
        if not self.components:
            raise ProbabilisticError("A probabilistic object needs at least one component", "probcat.object.empty")
        if any(w <= 0 for w, _ in self.components):
            raise ProbabilisticError("Component weights must be strictly positive", "probcat.object.weight")
        total = _fsum(w for w, _ in self.components)
        if abs(total - 1) > settings.stochastic_tolerance:
            raise ProbabilisticError(f"Component weights sum to {total}, not 1", "probcat.object.sum")

    @property
    def weights(self) -> tuple[Real, ...]:
        return tuple(w for w, _ in self.components)

    @property
    def objects(self) -> tuple[Hashable, ...]:
        return tuple(obj for _, obj in self.components)

    def to_list(self) -> list[dict]:
        return [{"w": float(w), "obj": obj} for w, obj in self.components]


def point_mass(obj: Hashable) -> ProbObject:
    return ProbObject(((1, obj),))


@dataclass(frozen=True)
class MorphismTag:
    """Witness of a nonempty hom-set."""
    source: Hashable
    target: Hashable


@dataclass(frozen=True)
class FamilyEntry:
    target_index: int
    source_index: int
    tag: MorphismTag
    probability: Real


@dataclass(frozen=True)
class ProbMorphism:
    """(S, f): source -> target; matrix has shape (target components x source components)."""
    source: ProbObject
    target: ProbObject
    matrix: tuple[tuple[Real, ...], ...]
    families: tuple[FamilyEntry, ...]


def validate_morphism(morphism: ProbMorphism, convertible: Callable[[Hashable, Hashable], bool]):
    """Raises ProbabilisticError unless every ProbMorphism invariant holds."""
    tol = settings.stochastic_tolerance
    src, tgt, matrix = morphism.source, morphism.target, morphism.matrix
    rows, cols = len(tgt.components), len(src.components)
    if len(matrix) != rows or any(len(row) != cols for row in matrix):
        raise ProbabilisticError(f"Matrix must be {rows}x{cols}", "probcat.morphism.shape")
    if any(x < 0 for row in matrix for x in row):
        raise ProbabilisticError("Matrix entries must be non-negative", "probcat.morphism.negative")
    for b in range(cols):
        if abs(_fsum(matrix[a][b] for a in range(rows)) - 1) > tol:
            raise ProbabilisticError(f"Column {b} does not sum to 1", "probcat.morphism.stochastic")
    for a in range(rows):
        pushed = _fsum(matrix[a][b] * src.weights[b] for b in range(cols))
        if abs(pushed - tgt.weights[a]) > tol:
            raise ProbabilisticError(f"S maps source weights to {pushed} at row {a}, target has {tgt.weights[a]}",
                                     "probcat.morphism.weights")

    by_cell: dict[tuple[int, int], list[FamilyEntry]] = defaultdict(list)
    for entry in morphism.families:
        a, b = entry.target_index, entry.source_index
        if entry.tag.source != src.objects[b] or entry.tag.target != tgt.objects[a]:
            raise ProbabilisticError(f"Tag {entry.tag} does not connect components ({b} -> {a})", "probcat.tag.ends")
        if not convertible(entry.tag.source, entry.tag.target):
            raise ProbabilisticError(f"Tag {entry.tag} witnesses an empty hom-set", "probcat.tag.hom")
        by_cell[(a, b)].append(entry)
    for a in range(rows):
        for b in range(cols):
            entries = by_cell.get((a, b), [])
            if matrix[a][b] > 0 and not entries:
                raise ProbabilisticError(f"No arrow family for positive entry ({a}, {b})", "probcat.family.missing")
            if entries and abs(_fsum(e.probability for e in entries) - matrix[a][b]) > tol:
                raise ProbabilisticError(f"Family probabilities at ({a}, {b}) do not add up to S", "probcat.family.sum")


def _sorted_keys(p: ProbObject, class_of: ClassKey) -> list[tuple[Hashable, Real]]:
    return sorted(((class_of(obj), w) for w, obj in p.components), key=lambda kv: (kv[0], kv[1]))


def prob_isomorphic(p: ProbObject, q: ProbObject, class_of: ClassKey) -> bool:
    """
    Isomorphism in PC: equal component counts and a bijection matching
    isomorphic components with equal weights (up to iso_weight_tolerance).
    """
    if len(p.components) != len(q.components):
        return False
    tol = settings.iso_weight_tolerance
    return all(kp == kq and abs(wp - wq) <= tol
               for (kp, wp), (kq, wq) in zip(_sorted_keys(p, class_of), _sorted_keys(q, class_of)))


def permutation_isomorphic(p: ProbObject, q: ProbObject, class_of: ClassKey) -> bool:
    """Brute-force search over all bijections; the reference for prob_isomorphic."""
    if len(p.components) != len(q.components):
        return False
    tol = settings.iso_weight_tolerance
    for sigma in permutations(range(len(q.components))):
        if all(class_of(p.components[i][1]) == class_of(q.components[j][1])
               and abs(p.components[i][0] - q.components[j][0]) <= tol
               for i, j in enumerate(sigma)):
            return True
    return False


def canonicalize(p: ProbObject, class_of: ClassKey) -> ProbObject:
    """
    Normal form under localization: isomorphic components merge into the
    first-listed representative with summed weight, sorted by (class, weight).
    """
    merged: dict[Hashable, list] = {}
    for w, obj in p.components:
        key = class_of(obj)
        if key in merged:
            merged[key][0] += w
        else:
            merged[key] = [w, obj]
    ordered = sorted(merged.items(), key=lambda item: (item[0], item[1][0]))
    return ProbObject(tuple((w, obj) for _, (w, obj) in ordered))


def localized_isomorphic(p: ProbObject, q: ProbObject, class_of: ClassKey) -> bool:
    """Isomorphism after localization: compare canonical forms."""
    return prob_isomorphic(canonicalize(p, class_of), canonicalize(q, class_of), class_of)


def _as_callable(h: ObjectMap) -> Callable[[Hashable], Hashable]:
    if callable(h):
        return h
    return h.__getitem__


def _apply(h: Callable[[Hashable], Hashable], obj: Hashable) -> Hashable:
    try:
        return h(obj)
    except (KeyError, IndexError, TypeError) as e:
        raise ProbabilisticError(f"Object map undefined on {obj!r}", "probcat.lift.undefined") from e


def lift_functor(h: ObjectMap, p: ProbObject | ProbMorphism,
                 tag_map: Callable[[MorphismTag], MorphismTag] | None = None) -> ProbObject | ProbMorphism:
    """
    Extends an object map to PC: sum w_i C_i -> sum w_i h(C_i) on objects and
    (S, f) -> (S, h(f)) on morphisms, keeping all probabilities.
    """
    fn = _as_callable(h)
    if isinstance(p, ProbObject):
        return ProbObject(tuple((w, _apply(fn, obj)) for w, obj in p.components))
    if tag_map is None:
        def tag_map(tag: MorphismTag) -> MorphismTag:
            return MorphismTag(_apply(fn, tag.source), _apply(fn, tag.target))
    return ProbMorphism(
        source=lift_functor(fn, p.source),
        target=lift_functor(fn, p.target),
        matrix=p.matrix,
        families=tuple(FamilyEntry(e.target_index, e.source_index, tag_map(e.tag), e.probability)
                       for e in p.families),
    )


@dataclass(frozen=True)
class ProbFunctor:
    """Convex combination of object maps sum_i w_i F_i."""
    components: tuple[tuple[Real, ObjectMap], ...]

    def __post_init__(self):
        if not self.components or any(w <= 0 for w, _ in self.components):
            raise ProbabilisticError("Functor weights must be strictly positive", "probcat.functor.weight")
        if abs(_fsum(w for w, _ in self.components) - 1) > settings.stochastic_tolerance:
            raise ProbabilisticError("Functor weights must sum to 1", "probcat.functor.sum")


def apply_prob_functor(functor: ProbFunctor, p: ProbObject) -> ProbObject:
    """Object part of sum_i w_i F_i applied to sum_a v_a X_a: components F_i(X_a) with weights w_i v_a."""
    return ProbObject(tuple(
        (wf * wx, _apply(_as_callable(fmap), obj))
        for wf, fmap in functor.components
        for wx, obj in p.components
    ))
