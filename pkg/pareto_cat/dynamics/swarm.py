"""
N-particle swarm over summing functors.

Every particle draws admissible functors on its own RNG substream. A new
draw that strictly minorizes an earlier position of the particle (its own
draws, or foreign positions picked up through cross-links) is flagged when
that conversion is eps-reversible at every scale for every objective and the
two images do not lie on a common minorization cycle. After each round the
particles look for strict minorizations of their chain tips among the other
particles' current positions.
"""
from __future__ import annotations
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pydantic import BaseModel, Field
from pareto_cat.category.summing import SummingFunctor
from pareto_cat.category.valuation import (
    Image, admissible, image_minorizes, longest_strict_chains, pareto_frontier,
)
from pareto_cat.core.config import settings
from pareto_cat.core.exceptions import SwarmError, ValuationError
from pareto_cat.core.logger import logger
from pareto_cat.dynamics.particle import AdmissibleSampler
from pareto_cat.dynamics.rng import Stream, make_stream
from pareto_cat.scale.interleaving import conversion_reversible, interleaving_distance
from pareto_cat.services.instance_loader import Instance

Position = tuple[int, int]  # (particle, draw index)


class SwarmConfig(BaseModel):
    particles: int = Field(default_factory=lambda: settings.swarm_particles, ge=1)
    draws: int = Field(default_factory=lambda: settings.swarm_draws, ge=1)
    epsilon: int = Field(default_factory=lambda: settings.swarm_epsilon, ge=0)
    seed: int = 0
    budget: int | None = Field(default=None, ge=1)


@dataclass(frozen=True)
class Flag:
    particle: int
    index: int
    functor: tuple[int, ...]
    witness: tuple[Position, ...]
    epsilon: int

    def to_dict(self) -> dict:
        return {"particle": self.particle, "index": self.index, "functor": list(self.functor),
                "witness": [list(p) for p in self.witness], "epsilon": self.epsilon}


@dataclass(frozen=True)
class CrossLink:
    round: int
    source: Position
    target: Position

    def to_dict(self) -> dict:
        return {"round": self.round, "source": list(self.source), "target": list(self.target)}


@dataclass(frozen=True)
class SwarmReport:
    config: SwarmConfig
    flagged: tuple[Flag, ...]
    chains: tuple[tuple[tuple[int, ...], ...], ...]
    cross_links: tuple[CrossLink, ...]
    positions: tuple[tuple[tuple[int, ...], ...], ...]
    acceptance_rates: tuple[float, ...]
    chain_length_histogram: dict[int, int] = field(default_factory=dict)

    @property
    def any_flags(self) -> bool:
        return bool(self.flagged)

    def flagged_positions(self) -> set[Position]:
        return {(f.particle, f.index) for f in self.flagged}

    def to_dict(self) -> dict:
        return {
            "config": self.config.model_dump(),
            "any_flags": self.any_flags,
            "flagged": [f.to_dict() for f in self.flagged],
            "chains": [[list(c) for c in chains] for chains in self.chains],
            "cross_links": [link.to_dict() for link in self.cross_links],
            "positions": [[list(v) for v in draws] for draws in self.positions],
            "statistics": {
                "acceptance_rates": list(self.acceptance_rates),
                "chain_length_histogram": {str(k): v for k, v in sorted(self.chain_length_histogram.items())},
            },
        }


class _Particle:
    def __init__(self, ident: int, sampler: AdmissibleSampler):
        self.ident = ident
        self.sampler = sampler
        self.draws: list[SummingFunctor] = []
        self.images: list[Image] = []
        self.preds: list[list[int]] = []
        # foreign positions linked into this particle's chains, with the chain that reached them
        self.links: list[tuple[Position, Image, SummingFunctor, tuple[Position, ...]]] = []

    def chain_to(self, end: int) -> tuple[int, ...]:
        """Lexicographically earliest longest strict chain of own draws ending at end."""
        # down[j]: length of the longest chain from j to end, 0 when end is unreachable
        down = [0] * (end + 1)
        down[end] = 1
        for j in range(end - 1, -1, -1):
            best = max((down[m] for m in range(j + 1, end + 1) if down[m] and j in self.preds[m]), default=0)
            down[j] = best + 1 if best else 0
        chain: list[int] = []
        for remaining in range(max(down), 0, -1):
            chain.append(min(j for j in range(chain[-1] + 1 if chain else 0, end + 1)
                             if down[j] == remaining and (not chain or chain[-1] in self.preds[j])))
        return tuple(chain)

    def own_chain(self, end: int) -> tuple[Position, ...]:
        return tuple((self.ident, i) for i in self.chain_to(end))


class Swarm:
    """Runs the swarm rounds on one instance; reversibility checks are cached per functor pair."""

    def __init__(self, instance: Instance, config: SwarmConfig, threads: int | None = None,
                 cap: int | None = None):
        if instance.scale is None:
            raise SwarmError(f"Instance '{instance.name}' has no scale section", "swarm.no_scale")
        self.instance = instance
        self.system = instance.system
        self.config = config
        self.threads = threads or settings.threads
        self.cap = cap
        self._reversible: dict[tuple, bool] = {}

    def reversible(self, source: SummingFunctor, target: SummingFunctor) -> bool:
        key = (source.values, target.values)
        if key not in self._reversible:
            self._reversible[key] = all(
                conversion_reversible(self.instance.scaled(a, source), self.instance.scaled(a, target),
                                      self.config.epsilon)
                for a in range(len(self.system.objectives)))
        return self._reversible[key]

    def _in_cycle(self, image: Image, source: Image) -> bool:
        # the draw converts back into its source: both sit on one minorization cycle
        return image_minorizes(self.system, image, source)

    def _check_draw(self, particle: _Particle, t: int) -> Flag | None:
        """Records strict minorizations into draw t and returns a flag for the first reversible one."""
        image = particle.images[t]
        particle.preds.append([k for k in range(t)
                               if image_minorizes(self.system, particle.images[k], image, strict=True)])
        phi = particle.draws[t]
        for k in particle.preds[t]:
            if self._in_cycle(image, particle.images[k]):
                continue
            if self.reversible(particle.draws[k], phi):
                return Flag(particle.ident, t, phi.values, particle.own_chain(k) + ((particle.ident, t),),
                            self.config.epsilon)
        for _, link_image, link_functor, reached in particle.links:
            if not image_minorizes(self.system, link_image, image, strict=True) or self._in_cycle(image, link_image):
                continue
            if self.reversible(link_functor, phi):
                return Flag(particle.ident, t, phi.values, reached + ((particle.ident, t),), self.config.epsilon)
        return None

    def _cross_search(self, particles: list[_Particle], t: int) -> list[CrossLink]:
        """Links each chain tip to the first other particle whose position at t strictly minorizes it."""
        links = []
        snapshot = [(p.ident, p.images[t], p.draws[t]) for p in particles]
        for particle in particles:
            tip = longest_strict_chains(self.system, particle.draws)[0][-1]
            for ident, image, phi in snapshot:
                if ident == particle.ident:
                    continue
                if image_minorizes(self.system, particle.images[tip], image, strict=True):
                    reached = particle.own_chain(tip) + ((ident, t),)
                    particle.links.append(((ident, t), image, phi, reached))
                    links.append(CrossLink(t, (particle.ident, tip), (ident, t)))
                    break
        return links

    def run(self) -> SwarmReport:
        cfg = self.config
        if not self.system.index(self.cap, self.threads).admissible:
            raise SwarmError("The instance has no admissible summing functor", "swarm.no_admissible")
        particles = [_Particle(i, AdmissibleSampler(self.system, self.instance.distribution,
                                                    make_stream(cfg.seed, Stream.SWARM, i), cfg.budget))
                     for i in range(cfg.particles)]
        flags: list[Flag] = []
        cross_links: list[CrossLink] = []

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for t in range(cfg.draws + 1):
                for particle, phi in zip(particles, pool.map(lambda p: p.sampler.draw(), particles)):
                    particle.draws.append(phi)
                    particle.images.append(self.system.image(phi))
                round_flags = [flag for flag in (self._check_draw(p, t) for p in particles) if flag]
                flags.extend(round_flags)
                round_links = self._cross_search(particles, t)
                cross_links.extend(round_links)
                logger.debug("Swarm round %d: %d flag(s), %d cross-link(s)", t, len(round_flags), len(round_links))

        chains = tuple(tuple(longest_strict_chains(self.system, p.draws)) for p in particles)
        histogram = Counter(len(c[0]) for c in chains)
        logger.info("Swarm finished: %d particle(s), %d round(s), %d flagged position(s)",
                    cfg.particles, cfg.draws, len(flags))
        return SwarmReport(
            config=cfg,
            flagged=tuple(flags),
            chains=chains,
            cross_links=tuple(cross_links),
            positions=tuple(tuple(phi.values for phi in p.draws) for p in particles),
            acceptance_rates=tuple(p.sampler.acceptance_rate for p in particles),
            chain_length_histogram=dict(histogram),
        )


def run_swarm(instance: Instance, config: SwarmConfig, threads: int | None = None,
              cap: int | None = None) -> SwarmReport:
    return Swarm(instance, config, threads, cap).run()


def _within(instance: Instance, phi: SummingFunctor, psi: SummingFunctor, eps: int) -> bool:
    return all(interleaving_distance(instance.scaled(a, phi), instance.scaled(a, psi)) <= eps
               for a in range(len(instance.system.objectives)))


def certify_neighborhood(instance: Instance, phi: SummingFunctor, eps: int, cap: int | None = None) -> bool:
    """Whether some frontier functor is within eps of Phi in every objective."""
    if not admissible(instance.system, phi):
        raise ValuationError(f"Functor {list(phi.values)} is not admissible", "valuation.not_admissible")
    return any(_within(instance, phi, psi, eps) for psi in pareto_frontier(instance.system, cap).members)


@dataclass(frozen=True)
class SwarmScore:
    flagged: int
    certified: int
    frontier_classes: int
    represented_classes: int

    @property
    def precision(self) -> float:
        return self.certified / self.flagged if self.flagged else math.nan

    @property
    def recall(self) -> float:
        return self.represented_classes / self.frontier_classes if self.frontier_classes else math.nan

    def to_dict(self) -> dict:
        return {
            "flagged": self.flagged,
            "certified": self.certified,
            "precision": None if math.isnan(self.precision) else self.precision,
            "frontier_classes": self.frontier_classes,
            "represented_classes": self.represented_classes,
            "recall": None if math.isnan(self.recall) else self.recall,
        }


def score_report(instance: Instance, report: SwarmReport, cap: int | None = None) -> SwarmScore:
    """
    Precision: share of distinct flagged functors passing certify_neighborhood.
    Recall: share of frontier iso classes within eps of some flagged functor.
    """
    eps = report.config.epsilon
    flagged = sorted({f.functor for f in report.flagged})
    functors = [instance.functor(values) for values in flagged]
    certified = sum(certify_neighborhood(instance, phi, eps, cap) for phi in functors)
    frontier = pareto_frontier(instance.system, cap)
    represented = sum(
        any(_within(instance, phi, psi, eps) for phi in functors for psi in cls.members)
        for cls in frontier.classes)
    return SwarmScore(len(functors), certified, len(frontier.classes), represented)
