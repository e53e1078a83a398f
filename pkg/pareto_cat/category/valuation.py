"""
Valuation systems (F, X), minorization, exact Pareto frontiers and the
minorization probabilities lambda(Phi).

Direction convention: Phi is minorized by Psi when every objective has an
arrow F_a(Phi) -> F_a(Psi). Moving along arrows is an improvement, so the
upper frontier collects the admissible functors with nowhere strictly better
to go.
"""
from __future__ import annotations
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import ClassVar, Iterable, Sequence
import networkx as nx
from pareto_cat.category.rescat import ResourceCategory, TargetCategory, validate_category
from pareto_cat.category.summing import (
    SummingFunctor, check_capacity, enumerate_summing_functors, functor_rank, iso_key,
)
from pareto_cat.core.config import settings
from pareto_cat.core.enums import ValuationKind
from pareto_cat.core.exceptions import CategoryStructureError, DistributionError, ValuationError, Violation
from pareto_cat.core.logger import logger

Image = tuple[int, ...]


@dataclass(frozen=True)
class TableValuation:
    """F_alpha given by one target object per functor, in lexicographic functor order."""
    entries: tuple[int, ...]
    kind: ClassVar[ValuationKind] = ValuationKind.TABLE

    def __call__(self, phi: SummingFunctor) -> int:
        return self.entries[functor_rank(phi)]


@dataclass(frozen=True)
class ComposedValuation:
    """F_alpha = h(Phi(S)) for an object map h: Obj(C) -> Obj(V_alpha)."""
    h: tuple[int, ...]
    kind: ClassVar[ValuationKind] = ValuationKind.COMPOSED

    def __call__(self, phi: SummingFunctor) -> int:
        return self.h[phi.whole()]


@dataclass(frozen=True)
class Objective:
    target: TargetCategory
    goal: int
    valuation: TableValuation | ComposedValuation
    name: str = ""


@dataclass(frozen=True)
class ValuationSystem:
    category: ResourceCategory
    system_size: int
    objectives: tuple[Objective, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def image(self, phi: SummingFunctor) -> Image:
        """Tuple (F_1(Phi), ..., F_m(Phi))."""
        return tuple(obj.valuation(phi) for obj in self.objectives)

    def index(self, cap: int | None = None, threads: int | None = None) -> ImageIndex:
        """Image index for the given cap; threads only splits the first scan."""
        cap = settings.enumeration_cap if cap is None else cap
        cached = self._cache.get(cap)
        if cached is None:
            cached = ImageIndex(self, cap, threads)
            self._cache[cap] = cached
        return cached


@dataclass(frozen=True)
class ObjectDistribution:
    """Strictly positive probability weights on Obj(C); functors get the product measure."""
    weights: tuple

    def __post_init__(self):
        if not self.weights:
            raise DistributionError("Distribution needs at least one weight", "distribution.length")
        if any(w <= 0 for w in self.weights):
            raise DistributionError("All object weights must be strictly positive", "distribution.positive")
        if abs(_total(self.weights) - 1) > settings.stochastic_tolerance:
            raise DistributionError(f"Weights sum to {_total(self.weights)}, not 1", "distribution.sum")

    def functor_weight(self, phi: SummingFunctor):
        return math.prod((self.weights[v] for v in phi.values), start=1)


def _total(values: Iterable):
    values = list(values)
    if any(isinstance(v, Fraction) for v in values):
        return sum(values, Fraction(0))
    return math.fsum(values)


class ImageIndex:
    """
    All functors of a valuation system grouped by their image tuple.

    Minorization depends only on images, so frontier and lambda queries run
    over distinct admissible images. The scan is split into contiguous rank
    ranges across threads and merged in rank order.
    """

    def __init__(self, system: ValuationSystem, cap: int, threads: int | None = None):
        self.system = system
        total = check_capacity(system.category, system.system_size, cap)
        threads = max(1, settings.threads if threads is None else threads)
        block = max(1, -(-total // threads))
        ranges = [(start, min(start + block, total)) for start in range(0, total, block)] or [(0, 0)]

        def scan(bounds):
            start, stop = bounds
            return [(phi, system.image(phi))
                    for phi in enumerate_summing_functors(system.category, system.system_size, cap, start, stop)]

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(scan, ranges))

        self.members: dict[Image, list[SummingFunctor]] = defaultdict(list)
        for part in parts:
            for phi, image in part:
                self.members[image].append(phi)
        self.admissible: list[Image] = [img for img in self.members if image_admissible(system, img)]
        self._successors: dict[Image, list[Image]] = {}
        self._masses: dict[ObjectDistribution, dict[Image, object]] = {}
        logger.debug("Indexed %d functors into %d images (%d admissible)",
                     total, len(self.members), len(self.admissible))

    def strict_successors(self, image: Image) -> list[Image]:
        """Admissible images that are strict (F,X)-minorizations of an admissible image."""
        found = self._successors.get(image)
        if found is None:
            found = [other for other in self.admissible if image_minorizes(self.system, image, other, strict=True)]
            self._successors[image] = found
        return found

    def mass(self, image: Image, dist: ObjectDistribution):
        masses = self._masses.get(dist)
        if masses is None:
            masses = {img: _total(dist.functor_weight(phi) for phi in group) for img, group in self.members.items()}
            self._masses[dist] = masses
        return masses[image]


def image_admissible(system: ValuationSystem, image: Image) -> bool:
    return all(obj.target.convertible(v, obj.goal) for obj, v in zip(system.objectives, image))


def image_minorizes(system: ValuationSystem, source: Image, target: Image, strict: bool = False) -> bool:
    """Arrows source_a -> target_a for every objective; strict adds a non-isomorphic component."""
    pairs = list(zip(system.objectives, source, target))
    if not all(obj.target.convertible(a, b) for obj, a, b in pairs):
        return False
    if strict:
        return any(not obj.target.isomorphic(a, b) for obj, a, b in pairs)
    return True


def admissible(system: ValuationSystem, phi: SummingFunctor) -> bool:
    """Every objective has an arrow F_a(Phi) -> X_a."""
    return image_admissible(system, system.image(phi))


def minorizes(system: ValuationSystem, phi: SummingFunctor, psi: SummingFunctor, strict: bool = False) -> bool:
    """True iff Psi is an F-minorization of Phi (strict if some component is non-isomorphic)."""
    return image_minorizes(system, system.image(phi), system.image(psi), strict)


def fx_minorizes(system: ValuationSystem, phi: SummingFunctor, psi: SummingFunctor, strict: bool = True) -> bool:
    """(F,X)-minorization: the F-minorization arrows plus arrows from both images to the goals."""
    source, target = system.image(phi), system.image(psi)
    return (image_admissible(system, source) and image_admissible(system, target)
            and image_minorizes(system, source, target, strict))


def _require_admissible(system: ValuationSystem, phi: SummingFunctor) -> Image:
    image = system.image(phi)
    if not image_admissible(system, image):
        raise ValuationError(f"Functor {list(phi.values)} is not admissible", "valuation.not_admissible")
    return image


def strict_minorization_set(system: ValuationSystem, phi: SummingFunctor,
                            cap: int | None = None) -> frozenset[SummingFunctor]:
    """All admissible strict (F,X)-minorizations of an admissible Phi."""
    image = _require_admissible(system, phi)
    index = system.index(cap)
    return frozenset(psi for img in index.strict_successors(image) for psi in index.members[img])


def lambda_value(system: ValuationSystem, dist: ObjectDistribution, phi: SummingFunctor, cap: int | None = None):
    """Product-measure probability of the strict minorization set of Phi."""
    image = _require_admissible(system, phi)
    index = system.index(cap)
    return _total(index.mass(img, dist) for img in index.strict_successors(image))


def admissible_mass(system: ValuationSystem, dist: ObjectDistribution, cap: int | None = None):
    index = system.index(cap)
    return _total(index.mass(img, dist) for img in index.admissible)


@dataclass(frozen=True)
class FrontierClass:
    representative: SummingFunctor
    members: tuple[SummingFunctor, ...]


@dataclass(frozen=True)
class FrontierResult:
    """Frontier functors grouped by iso class in C^n, representatives lexicographically least."""
    classes: tuple[FrontierClass, ...]
    members: tuple[SummingFunctor, ...]

    def as_set(self) -> frozenset[SummingFunctor]:
        return frozenset(self.members)


def _group_frontier(functors: Iterable[SummingFunctor]) -> FrontierResult:
    members = sorted(set(functors), key=lambda phi: phi.values)
    groups: dict[tuple, list[SummingFunctor]] = defaultdict(list)
    for phi in members:
        groups[iso_key(phi)].append(phi)
    classes = sorted((FrontierClass(group[0], tuple(group)) for group in groups.values()),
                     key=lambda c: c.representative.values)
    return FrontierResult(classes=tuple(classes), members=tuple(members))


def pareto_frontier(system: ValuationSystem, cap: int | None = None) -> FrontierResult:
    """Admissible functors with an empty strict minorization set."""
    index = system.index(cap)
    frontier = [phi for img in index.admissible if not index.strict_successors(img) for phi in index.members[img]]
    logger.info("Pareto frontier: %d functor(s) in %d admissible image(s)", len(frontier), len(index.admissible))
    return _group_frontier(frontier)


def _minorization_graph(system: ValuationSystem, index: ImageIndex) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(index.admissible)
    graph.add_edges_from((a, b) for a, b in product(index.admissible, repeat=2)
                         if a != b and image_minorizes(system, a, b))
    return graph


def _terminal_images(system: ValuationSystem, graph: nx.DiGraph) -> set[Image]:
    """
    Images closing every finite chain of minorizations: sink components of
    the condensation whose members are all componentwise isomorphic.
    """
    condensed = nx.condensation(graph)
    terminals: set[Image] = set()
    for node in condensed.nodes:
        if condensed.out_degree(node):
            continue
        component = condensed.nodes[node]["members"]
        first = next(iter(component))
        if all(not image_minorizes(system, first, other, strict=True) for other in component):
            terminals.update(component)
    return terminals


def frontier_via_chains(system: ValuationSystem, cap: int | None = None) -> FrontierResult:
    """The frontier computed as terminal objects of minorization chains."""
    index = system.index(cap)
    terminals = _terminal_images(system, _minorization_graph(system, index))
    return _group_frontier(phi for img in terminals for phi in index.members[img])


def frontier_terminals(system: ValuationSystem, phi: SummingFunctor, cap: int | None = None) -> FrontierResult:
    """Frontier functors reachable from Phi along minorization arrows."""
    image = _require_admissible(system, phi)
    index = system.index(cap)
    graph = _minorization_graph(system, index)
    reachable = nx.descendants(graph, image) | {image}
    terminals = _terminal_images(system, graph) & reachable
    return _group_frontier(psi for img in terminals for psi in index.members[img])


def longest_strict_chains(system: ValuationSystem, draws: Sequence[SummingFunctor]) -> list[tuple[int, ...]]:
    """
    All maximum-length index chains l_0 < l_1 < ... in which every draw is a
    strict minorization of the previous one, sorted lexicographically.
    """
    images = [system.image(phi) for phi in draws]
    for i, image in enumerate(images):
        if not image_admissible(system, image):
            raise ValuationError(f"Draw {i} is not admissible", "valuation.not_admissible")
    if not images:
        return []
    size = len(images)
    preds = [[i for i in range(j) if image_minorizes(system, images[i], images[j], strict=True)]
             for j in range(size)]
    depth = [1] * size
    for j in range(size):
        for i in preds[j]:
            depth[j] = max(depth[j], depth[i] + 1)
    best = max(depth)

    chains: list[tuple[int, ...]] = []

    def extend(tail: tuple[int, ...]):
        head = tail[0]
        if depth[head] == 1:
            chains.append(tail)
            return
        for i in preds[head]:
            if depth[i] == depth[head] - 1:
                extend((i,) + tail)

    for j in range(size):
        if depth[j] == best:
            extend((j,))
    return sorted(chains)


def validate_valuation_system(system: ValuationSystem, cap: int | None = None) -> list[Violation]:
    """Checks targets, goals, map ranges and iso-respect of every objective."""
    violations: list[Violation] = []
    cat, n = system.category, system.system_size
    for a, obj in enumerate(system.objectives):
        path = f"valuations[{a}]"
        try:
            report = validate_category(obj.target)
        except CategoryStructureError as e:
            violations.append(Violation(e.code, str(e), path=f"{path}.target"))
            continue
        violations.extend(Violation(v.code, v.message, v.witness, f"{path}.target") for v in report.violations)
        if not 0 <= obj.goal < obj.target.objects:
            violations.append(Violation("valuation.goal", f"goal {obj.goal} outside target", path=f"{path}.goal"))
        violations.extend(_map_violations(obj, cat, n, f"{path}.map", cap))
    if violations:
        return violations

    groups: dict[tuple, list[SummingFunctor]] = defaultdict(list)
    for phi in enumerate_summing_functors(cat, n, cap):
        groups[iso_key(phi)].append(phi)
    for group in groups.values():
        if len(group) < 2:
            continue
        first = group[0]
        for a, obj in enumerate(system.objectives):
            base = obj.target.iso_class(obj.valuation(first))
            for other in group[1:]:
                if obj.target.iso_class(obj.valuation(other)) != base:
                    violations.append(Violation(
                        "valuation.iso_respect",
                        f"isomorphic functors {list(first.values)} and {list(other.values)} have non-isomorphic values",
                        first.values + other.values, f"valuations[{a}].map"))
                    break
    return violations


def _map_violations(obj: Objective, cat: ResourceCategory, n: int, path: str, cap: int | None) -> list[Violation]:
    valuation = obj.valuation
    if isinstance(valuation, TableValuation):
        expected = check_capacity(cat, n, cap)
        if len(valuation.entries) != expected:
            return [Violation("valuation.table.length",
                              f"table has {len(valuation.entries)} entries, expected {expected}", path=path)]
        values = valuation.entries
    else:
        if len(valuation.h) != cat.objects:
            return [Violation("valuation.composed.length",
                              f"h has {len(valuation.h)} entries, expected {cat.objects}", path=path)]
        values = valuation.h
    bad = [v for v in values if not 0 <= v < obj.target.objects]
    if bad:
        return [Violation("valuation.range", f"map value {bad[0]} outside target", (bad[0],), path)]
    return []
