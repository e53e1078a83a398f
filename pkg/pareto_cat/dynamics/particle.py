"""
Single-particle probabilistic dynamics.

The particle's "best position" follows a jump chain on draw indices: sitting
at index k, the draw at step t replaces it with probability lambda_k. After n
steps the distribution over indices is the coefficient vector c_n, which
evolves by the column-stochastic matrices S_n.
"""
from __future__ import annotations
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Sequence
import numpy as np
from pareto_cat.category.probcat import FamilyEntry, MorphismTag, ProbMorphism, ProbObject, canonicalize
from pareto_cat.category.rescat import TargetCategory
from pareto_cat.category.summing import SummingFunctor
from pareto_cat.category.valuation import (
    ObjectDistribution, ValuationSystem, admissible, lambda_value, longest_strict_chains,
)
from pareto_cat.core.config import settings
from pareto_cat.core.exceptions import ParticleError, SamplingError
from pareto_cat.core.logger import logger
from pareto_cat.dynamics.rng import Stream, make_stream

MAX_PATH_STEPS = 62  # jump patterns are packed into int64 bitmasks


def _as_fraction(x) -> Fraction:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return Fraction(str(x))


def _coerce(lambdas: Sequence[Real], exact: bool) -> list:
    values = [_as_fraction(x) for x in lambdas] if exact else [float(x) for x in lambdas]
    for k, lam in enumerate(values):
        if not 0 <= lam <= 1:
            raise ParticleError(f"lambda_{k} = {lam} outside [0, 1]", "particle.lambda_range")
    return values


def diagonal_coefficients(lambdas: Sequence[Real], exact: bool = False) -> list:
    """c_k^k for k = 0..n, the probability that draw k is the current best after step k."""
    lams = _coerce(lambdas, exact)
    one = Fraction(1) if exact else 1.0
    diag = [one]
    for m in range(1, len(lams) + 1):
        diag.append(sum((lams[k] * (one - lams[k]) ** (m - 1 - k) * diag[k] for k in range(m)), 0 * one))
    return diag


def evolve_coefficients(lambdas: Sequence[Real], exact: bool = False) -> tuple:
    """c_n from lambda_0..lambda_{n-1}: c_n^k = c_k^k (1 - lambda_k)^(n-k) for k < n, c_n^n from the diagonal."""
    lams = _coerce(lambdas, exact)
    diag = diagonal_coefficients(lams, exact)
    n = len(lams)
    one = Fraction(1) if exact else 1.0
    return tuple(diag[k] * (one - lams[k]) ** (n - k) for k in range(n)) + (diag[n],)


def transition_matrix(lambdas: Sequence[Real], exact: bool = False) -> np.ndarray:
    """
    The (m+1) x m matrix taking c_{m-1} to c_m for lambdas = lambda_0..lambda_{m-1}:
    column k keeps 1 - lambda_k on the diagonal and sends lambda_k to the last row.
    """
    lams = _coerce(lambdas, exact)
    m = len(lams)
    if exact:
        matrix = np.full((m + 1, m), Fraction(0), dtype=object)
    else:
        matrix = np.zeros((m + 1, m))
    for k, lam in enumerate(lams):
        matrix[k, k] = 1 - lam
        matrix[m, k] = lam
    return matrix


def evolve_by_matrix(lambdas: Sequence[Real], exact: bool = False) -> tuple:
    """c_n as the product S_{n-1} ... S_0 applied to c_0 = (1)."""
    lams = _coerce(lambdas, exact)
    coeffs = np.array([Fraction(1)], dtype=object) if exact else np.ones(1)
    for m in range(1, len(lams) + 1):
        coeffs = transition_matrix(lams[:m], exact).dot(coeffs)
    return tuple(coeffs.tolist())


def _simulate_block(lams: np.ndarray, size: int, seed: int, block: int, track_paths: bool):
    rng = make_stream(seed, Stream.ORACLE, block)
    state = np.zeros(size, dtype=np.int64)
    masks = np.zeros(size, dtype=np.int64) if track_paths else None
    for t in range(1, len(lams) + 1):
        jump = rng.random(size) < lams[state]
        state[jump] = t
        if track_paths:
            masks[jump] |= np.int64(1) << np.int64(t)
    return state, masks


def _blocks(trials: int) -> list[tuple[int, int]]:
    size = settings.oracle_block_size
    return [(block, min(size, trials - block * size)) for block in range(-(-trials // size))]


def markov_oracle(lambdas: Sequence[Real], trials: int | None = None, seed: int = 0,
                  threads: int | None = None) -> np.ndarray:
    """
    Empirical distribution of the jump chain's state after n steps.

    Trials run in fixed-size blocks, each on its own substream, so the result
    does not depend on the thread count.
    """
    trials = settings.oracle_trials if trials is None else trials
    if trials < 1:
        raise ParticleError("markov_oracle needs at least one trial", "particle.oracle.trials")
    lams = np.array(_coerce(lambdas, False), dtype=float)
    n = len(lams)

    def run(spec):
        block, size = spec
        state, _ = _simulate_block(lams, size, seed, block, False)
        logger.debug("Oracle block %d: %d trials", block, size)
        return np.bincount(state, minlength=n + 1)

    with ThreadPoolExecutor(max_workers=threads or settings.threads) as pool:
        counts = sum(pool.map(run, _blocks(trials)))
    return counts / trials


def markov_path_frequencies(lambdas: Sequence[Real], trials: int | None = None, seed: int = 0,
                            threads: int | None = None) -> dict[tuple[int, ...], float]:
    """Empirical frequency of every jump pattern (ell_1 < ... < ell_k) over n steps."""
    trials = settings.oracle_trials if trials is None else trials
    lams = np.array(_coerce(lambdas, False), dtype=float)
    n = len(lams)
    if n > MAX_PATH_STEPS:
        raise ParticleError(f"Path tracking supports at most {MAX_PATH_STEPS} steps", "particle.oracle.steps")

    def run(spec):
        block, size = spec
        _, masks = _simulate_block(lams, size, seed, block, True)
        values, counts = np.unique(masks, return_counts=True)
        return Counter(dict(zip(values.tolist(), counts.tolist())))

    with ThreadPoolExecutor(max_workers=threads or settings.threads) as pool:
        total: Counter = sum(pool.map(run, _blocks(trials)), Counter())
    return {tuple(t for t in range(1, n + 1) if mask >> t & 1): count / trials
            for mask, count in sorted(total.items())}


def total_variation(p: Sequence[Real], q: Sequence[Real]) -> float:
    return 0.5 * math.fsum(abs(float(a) - float(b)) for a, b in zip(p, q, strict=True))


def check_estimate(lambdas: Sequence[Real], diag: Sequence[Real] | None = None) -> bool:
    """
    For non-increasing lambdas verifies c_n^n <= c_k^k for all k < n and
    c_k^k (1 - lambda_0)^(n-k) <= c_n^n for 1 <= k < n, with stochastic_tolerance slack.

    The lower bound is not asserted at k = 0: c_1^1 = lambda_0 falls below
    1 - lambda_0 whenever lambda_0 < 1/2.
    """
    lams = [float(x) for x in _coerce(lambdas, False)]
    if any(a < b for a, b in zip(lams, lams[1:])):
        raise ParticleError("check_estimate needs non-increasing lambdas", "particle.estimate.non_monotone")
    diag = list(diag) if diag is not None else diagonal_coefficients(lams)
    n = len(lams)
    tol = settings.stochastic_tolerance
    top = diag[n]
    upper = all(top <= diag[k] + tol for k in range(n))
    lower = all(diag[k] * (1 - lams[0]) ** (n - k) <= top + tol for k in range(1, n))
    return upper and lower


def rough_estimate_holds(lambdas: Sequence[Real], coeffs: Sequence[Real]) -> bool:
    """Whether c_n^n >= (1 - lambda_0)^n; reported, not guaranteed."""
    n = len(coeffs) - 1
    if n == 0:
        return True
    return float(coeffs[n]) + settings.stochastic_tolerance >= (1 - float(lambdas[0])) ** n


def chain_probability(lambdas: Sequence[Real], chain: Sequence[int], n: int) -> float:
    """
    Probability that the jump chain's accepted jumps over n steps are exactly
    at ell_1 < ... < ell_k: waiting at index ell_j costs (1 - lambda_{ell_j})
    per step and the jump out of it costs lambda_{ell_j} (ell_0 = 0).
    """
    lams = _coerce(lambdas, False)
    points = [0, *chain]
    if any(b <= a for a, b in zip(points, points[1:])) or points[-1] > n:
        raise ParticleError(f"Chain {list(chain)} is not increasing within 1..{n}", "particle.chain.indices")
    prob = 1.0
    for here, nxt in zip(points, points[1:]):
        prob *= (1 - lams[here]) ** (nxt - here - 1) * lams[here]
    last = points[-1]
    if n > last:
        prob *= (1 - lams[last]) ** (n - last)
    return prob


class AdmissibleSampler:
    """Draws functors from the product measure conditioned on admissibility by rejection."""

    def __init__(self, system: ValuationSystem, dist: ObjectDistribution, rng: np.random.Generator,
                 budget: int | None = None):
        self.system = system
        self.rng = rng
        self.budget = settings.rejection_budget if budget is None else budget
        weights = np.array([float(w) for w in dist.weights])
        self.weights = weights / weights.sum()
        self.attempts = 0
        self.accepted = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0

    def draw(self) -> SummingFunctor:
        cat, n = self.system.category, self.system.system_size
        for _ in range(self.budget):
            self.attempts += 1
            values = tuple(int(v) for v in self.rng.choice(cat.objects, size=n, p=self.weights))
            phi = SummingFunctor(values=values, category=cat)
            if admissible(self.system, phi):
                self.accepted += 1
                return phi
        raise SamplingError(
            f"No admissible draw within {self.budget} attempts (acceptance rate {self.acceptance_rate:.3g})",
            self.acceptance_rate)


@dataclass(frozen=True)
class ParticleTrace:
    draws: tuple[SummingFunctor, ...]
    lambdas: tuple
    coeffs: tuple
    seed: int | None = None
    chains: tuple[tuple[int, ...], ...] = ()
    acceptance_rate: float = 1.0
    rough_estimate_holds: bool = True
    chain_lambdas_monotone: bool = True
    attempts: int = field(default=0, compare=False)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "draws": [list(phi.values) for phi in self.draws],
            "lambdas": [float(x) for x in self.lambdas],
            "coefficients": [float(x) for x in self.coeffs],
            "chains": [list(c) for c in self.chains],
            "acceptance_rate": self.acceptance_rate,
            "rough_estimate_holds": self.rough_estimate_holds,
            "chain_lambdas_monotone": self.chain_lambdas_monotone,
        }


def _chains_monotone(lambdas: Sequence[Real], chains: Sequence[Sequence[int]]) -> bool:
    tol = settings.stochastic_tolerance
    return all(lambdas[a] + tol >= lambdas[b] for chain in chains for a, b in zip(chain, chain[1:]))


def run_particle(system: ValuationSystem, dist: ObjectDistribution, n: int, seed: int,
                 budget: int | None = None, exact: bool = False, cap: int | None = None) -> ParticleTrace:
    """Draws Phi_0..Phi_n, computes every lambda_k exactly and the coefficients c_n."""
    if not system.index(cap).admissible:
        raise ParticleError("The instance has no admissible summing functor", "particle.no_admissible")
    sampler = AdmissibleSampler(system, dist, make_stream(seed, Stream.PARTICLE), budget)
    draws = tuple(sampler.draw() for _ in range(n + 1))
    cache: dict[tuple, Real] = {}
    lambdas = []
    for phi in draws:
        image = system.image(phi)
        if image not in cache:
            cache[image] = lambda_value(system, dist, phi, cap)
        lambdas.append(cache[image])
    coeffs = evolve_coefficients(lambdas[:n], exact)
    chains = tuple(longest_strict_chains(system, draws))
    monotone = _chains_monotone(lambdas, chains)
    if not monotone:
        logger.warning("Lambda increases along a realized minorization chain (minorization cycle in the instance?)")
    logger.info("Particle run: %d draws, acceptance rate %.3f", n + 1, sampler.acceptance_rate)
    return ParticleTrace(
        draws=draws, lambdas=tuple(lambdas), coeffs=coeffs, seed=seed, chains=chains,
        acceptance_rate=sampler.acceptance_rate,
        rough_estimate_holds=rough_estimate_holds(lambdas, coeffs),
        chain_lambdas_monotone=monotone, attempts=sampler.attempts,
    )


@dataclass(frozen=True)
class SystemStep:
    """Object sum_k c_m^k F(Phi_k) of the induced system and the morphism to the next one."""
    obj: ProbObject
    support: tuple[int, ...]
    morphism: ProbMorphism | None = None


@dataclass(frozen=True)
class InducedSystem:
    steps: tuple[SystemStep, ...]
    images: tuple[int, ...]
    lambdas: tuple
    objective: int


def _step_object(coeffs: Sequence[Real], images: Sequence[int]) -> tuple[ProbObject, tuple[int, ...]]:
    support = tuple(k for k, c in enumerate(coeffs) if c > 0)
    return ProbObject(tuple((coeffs[k], images[k]) for k in support)), support


def _step_matrix(lams: Sequence[Real], m: int, source: Sequence[int], target: Sequence[int]) -> list[list]:
    """S_m restricted to the supports of c_m (columns) and c_{m+1} (rows)."""
    zero = lams[0] * 0 if lams else 0
    rows = []
    for a in target:
        row = []
        for b in source:
            if a == b:
                row.append(1 - lams[b])
            elif a == m + 1:
                row.append(lams[b])
            else:
                row.append(zero)
        rows.append(row)
    return rows


def induced_system(trace: ParticleTrace, system: ValuationSystem, objective: int,
                   exact: bool = False) -> InducedSystem:
    """
    The system sum_k c_m^k F_a(Phi_k) -> sum_k c_{m+1}^k F_a(Phi_k) in P(V_a)
    induced by a trace whose draws form a strict minorization chain in objective a.
    """
    if not 0 <= objective < len(system.objectives):
        raise ParticleError(f"Objective {objective} out of range", "particle.system.objective")
    target = system.objectives[objective].target
    draws = trace.draws
    images = tuple(system.objectives[objective].valuation(phi) for phi in draws)
    for k, (here, nxt) in enumerate(zip(images, images[1:])):
        if not target.convertible(here, nxt) or target.isomorphic(here, nxt):
            raise ParticleError(f"Draws {k} and {k + 1} are not a strict minorization in objective {objective}",
                                "particle.system.not_chain")
    lams = _coerce(trace.lambdas[:max(len(draws) - 1, 0)], exact)

    built = [_step_object(evolve_coefficients(lams[:m], exact), images) for m in range(len(draws))]
    steps = []
    for m, (obj, support) in enumerate(built):
        morphism = None
        if m + 1 < len(built):
            target, target_support = built[m + 1]
            matrix = _step_matrix(lams, m, support, target_support)
            families = []
            for a, k_to in enumerate(target_support):
                for b, k_from in enumerate(support):
                    if matrix[a][b] > 0:
                        families.append(FamilyEntry(a, b, MorphismTag(images[k_from], images[k_to]), matrix[a][b]))
            morphism = ProbMorphism(obj, target, tuple(tuple(row) for row in matrix), tuple(families))
        steps.append(SystemStep(obj, support, morphism))
    return InducedSystem(tuple(steps), images, tuple(lams), objective)


@dataclass(frozen=True)
class Cocone:
    tip: ProbObject
    legs: tuple[ProbMorphism, ...]
    commutes: bool


def induced_cocone(system: InducedSystem, tips: Sequence[int], target: TargetCategory) -> Cocone:
    """
    Cocone with tip sum_r (1/M) Y_r and uniform-column legs. Commutativity
    S~_{m+1} S_m = S~_m is verified in rational arithmetic.
    """
    if not tips:
        raise ParticleError("A cocone needs at least one tip object", "particle.cocone.empty")
    size = len(tips)
    share = Fraction(1, size)
    for k, image in enumerate(system.images):
        for y in tips:
            if not target.convertible(image, y):
                raise ParticleError(f"No arrow from chain object {k} ({image}) to tip {y}",
                                    "particle.cocone.missing_arrow")
    tip = ProbObject(tuple((share, y) for y in tips))

    legs, uniform = [], []
    for step in system.steps:
        cols = len(step.support)
        matrix = tuple(tuple(share for _ in range(cols)) for _ in range(size))
        families = tuple(FamilyEntry(r, b, MorphismTag(system.images[k], y), share)
                         for r, y in enumerate(tips) for b, k in enumerate(step.support))
        legs.append(ProbMorphism(step.obj, tip, matrix, families))
        uniform.append(np.array(matrix, dtype=object))

    exact_lams = [_as_fraction(x) for x in system.lambdas]
    commutes = True
    for m in range(len(system.steps) - 1):
        source, target_support = system.steps[m].support, system.steps[m + 1].support
        s_m = np.array(_step_matrix(exact_lams, m, source, target_support), dtype=object).reshape(
            len(target_support), len(source))
        if not np.array_equal(uniform[m + 1].dot(s_m), uniform[m]):
            commutes = False
            logger.warning("Cocone legs do not commute at step %d", m)
    return Cocone(tip, tuple(legs), commutes)


def collapse_tip(cocone: Cocone, target: TargetCategory) -> ProbObject:
    """Canonical form of the tip under localization."""
    return canonicalize(cocone.tip, target.iso_class)
