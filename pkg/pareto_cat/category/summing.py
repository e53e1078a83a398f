"""Summing functors P(S) -> C, stored by their values on singletons."""
from __future__ import annotations
from dataclasses import dataclass, field
from itertools import islice, product
from typing import Iterable, Iterator
from pareto_cat.category.rescat import ResourceCategory, fold_tensor
from pareto_cat.core.config import settings
from pareto_cat.core.exceptions import CapacityError, FunctorError


@dataclass(frozen=True)
class SummingFunctor:
    """
    A summing functor on S = {0..n-1}. Equality and hashing use the value
    tuple only; subset values are memoized per functor.
    """
    values: tuple[int, ...]
    category: ResourceCategory = field(compare=False, repr=False)
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.values)

    def whole(self) -> int:
        """Value on the full set S."""
        return evaluate(self, range(self.size))


def make_functor(cat: ResourceCategory, values: Iterable[int]) -> SummingFunctor:
    values = tuple(int(v) for v in values)
    for v in values:
        if not 0 <= v < cat.objects:
            raise FunctorError(f"Functor value {v} outside 0..{cat.objects - 1}")
    return SummingFunctor(values=values, category=cat)


def evaluate(phi: SummingFunctor, subset: Iterable[int]) -> int:
    """Value of phi on a subset: tensor of singleton values in ascending index order."""
    key = frozenset(subset)
    cached = phi._memo.get(key)  # pylint: disable=protected-access
    if cached is not None:
        return cached
    for i in key:
        if not 0 <= i < phi.size:
            raise FunctorError(f"Subset element {i} outside 0..{phi.size - 1}")
    result = fold_tensor(phi.category, (phi.values[i] for i in sorted(key)))
    phi._memo[key] = result  # pylint: disable=protected-access
    return result


def count_summing_functors(cat: ResourceCategory, n: int) -> int:
    return cat.objects ** n


def check_capacity(cat: ResourceCategory, n: int, cap: int | None = None) -> int:
    """Returns K^n or raises CapacityError when it exceeds the cap."""
    cap = settings.enumeration_cap if cap is None else cap
    total = count_summing_functors(cat, n)
    if total > cap:
        raise CapacityError(f"{cat.objects}^{n} = {total} summing functors exceed the enumeration cap {cap}")
    return total


def enumerate_summing_functors(cat: ResourceCategory, n: int, cap: int | None = None,
                               start: int = 0, stop: int | None = None) -> Iterator[SummingFunctor]:
    """
    Lazily yields all K^n summing functors in lexicographic order.

    start/stop select a rank range so scans can be partitioned across workers.
    """
    if n < 0:
        raise FunctorError("System size must be non-negative")
    check_capacity(cat, n, cap)
    tuples = product(range(cat.objects), repeat=n)
    for values in islice(tuples, start, stop):
        yield SummingFunctor(values=values, category=cat)


def functor_rank(phi: SummingFunctor) -> int:
    """Position of phi in the lexicographic enumeration."""
    rank = 0
    for v in phi.values:
        rank = rank * phi.category.objects + v
    return rank


def functor_at_rank(cat: ResourceCategory, n: int, rank: int) -> SummingFunctor:
    if not 0 <= rank < cat.objects ** n:
        raise FunctorError(f"Rank {rank} outside the {cat.objects}^{n} enumeration")
    values = []
    for _ in range(n):
        rank, v = divmod(rank, cat.objects)
        values.append(v)
    return SummingFunctor(values=tuple(reversed(values)), category=cat)


def iso_key(phi: SummingFunctor) -> tuple[int, ...]:
    """Iso class of phi in C^n: the componentwise iso class ids."""
    cls = phi.category.class_of
    return tuple(cls[v] for v in phi.values)


def functors_isomorphic(phi: SummingFunctor, psi: SummingFunctor) -> bool:
    """Componentwise isomorphism (invertible natural transformation)."""
    if phi.size != psi.size:
        raise FunctorError(f"Cannot compare functors on sets of size {phi.size} and {psi.size}")
    return iso_key(phi) == iso_key(psi)
