"""
Scale-indexed target objects on a finite grid 0..T, the change-of-scale
shift T_eps, eps-interleaving and the interleaving distance.

Targets are thin, so every diagram condition reduces to hom-nonemptiness.
Beyond T an object keeps its last value, which makes shift total.
"""
from __future__ import annotations
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pareto_cat.category.rescat import TargetCategory
from pareto_cat.category.summing import SummingFunctor, functor_rank
from pareto_cat.core.exceptions import ScaleError, Violation


@dataclass(frozen=True)
class ScaleObject:
    base: TargetCategory
    values: tuple[int, ...]

    def __post_init__(self):
        if not self.values:
            raise ScaleError("A scale object needs at least one grid value", "scale.empty")
        for v in self.values:
            if not 0 <= v < self.base.objects:
                raise ScaleError(f"Grid value {v} outside the base category", "scale.range")
        for s, (here, nxt) in enumerate(zip(self.values, self.values[1:])):
            if not self.base.convertible(here, nxt):
                raise ScaleError(f"No transition arrow Y({s}) -> Y({s + 1})", "scale.transition")

    @property
    def grid_len(self) -> int:
        return len(self.values)

    def value_at(self, s: int) -> int:
        return self.values[min(s, len(self.values) - 1)]


def shift(obj: ScaleObject, eps: int) -> ScaleObject:
    """T_eps: s -> Y(s + eps) on the same grid."""
    if eps < 0:
        raise ScaleError(f"Shift must be non-negative, got {eps}", "scale.epsilon")
    return ScaleObject(obj.base, tuple(obj.value_at(s + eps) for s in range(obj.grid_len)))


def _check_pair(y: ScaleObject, z: ScaleObject):
    if y.base != z.base:
        raise ScaleError("Scale objects live over different base categories", "scale.base")
    if y.grid_len != z.grid_len:
        raise ScaleError(f"Grid lengths differ: {y.grid_len} vs {z.grid_len}", "scale.grid")


def epsilon_interleaved(y: ScaleObject, z: ScaleObject, eps: int) -> bool:
    """Arrows Y(s) -> Z(s+eps) and Z(s) -> Y(s+eps) at every grid point."""
    _check_pair(y, z)
    if eps < 0:
        raise ScaleError(f"Interleaving parameter must be non-negative, got {eps}", "scale.epsilon")
    hom = y.base.convertible
    return all(hom(y.value_at(s), z.value_at(s + eps)) and hom(z.value_at(s), y.value_at(s + eps))
               for s in range(y.grid_len))


def interleaving_distance(y: ScaleObject, z: ScaleObject) -> int | float:
    """
    Least eps with an eps-interleaving, or math.inf. Values are constant from
    T on, so eps > T adds nothing over eps = T.
    """
    _check_pair(y, z)
    for eps in range(y.grid_len):
        if epsilon_interleaved(y, z, eps):
            return eps
    return math.inf


def epsilon_reversible(y: ScaleObject, z: ScaleObject, s: int, eps: int) -> bool:
    """Whether the conversion Y(s) -> Z(s) has a return arrow Z(s) -> Y(s+eps)."""
    _check_pair(y, z)
    hom = y.base.convertible
    if not hom(y.value_at(s), z.value_at(s)):
        raise ScaleError(f"No conversion Y({s}) -> Z({s}) to reverse", "scale.no_conversion")
    return hom(z.value_at(s), y.value_at(s + eps))


def conversion_reversible(y: ScaleObject, z: ScaleObject, eps: int) -> bool:
    """A conversion Y -> Z present at every scale and eps-reversible at every scale."""
    _check_pair(y, z)
    hom = y.base.convertible
    return all(hom(y.value_at(s), z.value_at(s)) and hom(z.value_at(s), y.value_at(s + eps))
               for s in range(y.grid_len))


@dataclass(frozen=True)
class ConvergenceReport:
    epsilon: int
    start: int
    hypothesis: bool
    conclusion: bool
    distances: tuple[int | float, ...]
    missing_reversals: tuple[int, ...] = ()

    @property
    def converged(self) -> bool:
        return self.hypothesis and self.conclusion

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "n0": self.start,
            "hypothesis": self.hypothesis,
            "conclusion": self.conclusion,
            "converged": self.converged,
            "distances": [None if math.isinf(d) else d for d in self.distances],
            "missing_reversals": list(self.missing_reversals),
        }


def convergence_report(chain: Sequence[ScaleObject], eps: int, start: int = 0) -> ConvergenceReport:
    """
    Checks, for a minorization chain F(Phi_0) -> ... -> F(Phi_n) of scale
    objects, whether reversing arrows F_s(Phi_{k+1}) -> F_{s+eps}(Phi_k)
    exist for all k >= start and whether every such F(Phi_k) lies within
    eps of the chain's terminal object.
    """
    if not chain:
        raise ScaleError("Convergence needs a non-empty chain", "scale.empty_chain")
    for k, (here, nxt) in enumerate(zip(chain, chain[1:])):
        _check_pair(here, nxt)
        if not all(here.base.convertible(here.value_at(s), nxt.value_at(s)) for s in range(here.grid_len)):
            raise ScaleError(f"Chain step {k} -> {k + 1} has no arrow at some scale", "scale.chain")
    terminal = chain[-1]
    missing = tuple(
        k for k in range(start, len(chain) - 1)
        if not all(chain[k].base.convertible(chain[k + 1].value_at(s), chain[k].value_at(s + eps))
                   for s in range(chain[k].grid_len))
    )
    distances = tuple(interleaving_distance(obj, terminal) for obj in chain)
    conclusion = all(distances[k] <= eps for k in range(start, len(chain)))
    return ConvergenceReport(eps, start, not missing, conclusion, distances, missing)


def check_convergence(chain: Sequence[ScaleObject], eps: int, start: int = 0) -> bool:
    return convergence_report(chain, eps, start).converged


@dataclass(frozen=True)
class ScaleData:
    """
    Grid data of an instance: scaled[a][rank] is F_{a,s}(Phi) for s = 0..T,
    with the functor addressed by its lexicographic rank.
    """
    grid_len: int
    scaled: tuple[tuple[tuple[int, ...], ...], ...]

    def values(self, objective: int, phi: SummingFunctor) -> tuple[int, ...]:
        try:
            return self.scaled[objective][functor_rank(phi)]
        except IndexError as e:
            raise ScaleError(f"No scale data for objective {objective} and functor {list(phi.values)}",
                             "scale.missing") from e


def validate_scale_data(data: ScaleData, targets: Sequence[TargetCategory], base_images: Sequence[Sequence[int]],
                        path: str = "scale") -> list[Violation]:
    """
    Structural checks of grid data against the objectives' targets and the
    unscaled images base_images[a][rank].
    """
    violations: list[Violation] = []
    if data.grid_len < 1:
        return [Violation("scale.grid", "grid_len must be at least 1", path=f"{path}.grid_len")]
    if len(data.scaled) != len(targets):
        return [Violation("scale.objectives", f"{len(data.scaled)} scaled valuations for {len(targets)} objectives",
                          path=f"{path}.valuations_scaled")]
    for a, (target, rows) in enumerate(zip(targets, data.scaled)):
        where = f"{path}.valuations_scaled[{a}]"
        if len(rows) != len(base_images[a]):
            violations.append(Violation("scale.length", f"{len(rows)} functors, expected {len(base_images[a])}",
                                        path=where))
            continue
        for rank, row in enumerate(rows):
            cell = f"{where}[{rank}]"
            if len(row) != data.grid_len:
                violations.append(Violation("scale.grid", f"{len(row)} grid values, expected {data.grid_len}",
                                            path=cell))
                continue
            if row[0] != base_images[a][rank]:
                violations.append(Violation("scale.base_mismatch",
                                            f"value at s=0 is {row[0]}, valuation gives {base_images[a][rank]}",
                                            (row[0], base_images[a][rank]), cell))
            try:
                ScaleObject(target, tuple(row))
            except ScaleError as e:
                violations.append(Violation(e.code, str(e), tuple(row), cell))
    return violations
