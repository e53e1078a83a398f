from __future__ import annotations
import math
from argparse import Namespace
from fractions import Fraction
from pathlib import Path
from pareto_cat.category.rescat import conversion_rate
from pareto_cat.category.valuation import (
    admissible_mass, frontier_via_chains, lambda_value, pareto_frontier, strict_minorization_set,
)
from pareto_cat.core.enums import Command, ExitCode
from pareto_cat.core.exceptions import InstanceValidationError, ParetoCatError
from pareto_cat.core.logger import logger
from pareto_cat.core.state import RunContext
from pareto_cat.dynamics.particle import (
    check_estimate, markov_oracle, run_particle, total_variation,
)
from pareto_cat.dynamics.swarm import SwarmConfig, run_swarm, score_report
from pareto_cat.scale.interleaving import conversion_reversible, epsilon_interleaved, interleaving_distance
from pareto_cat.services.instance_loader import BUNDLED_FIXTURES, Instance, fixture_path, load_instance
from pareto_cat.utils.writers import emit

Result = tuple[dict, list[dict] | None]


def parse_functor(text: str) -> tuple[int, ...]:
    """'0,2,1' -> (0, 2, 1); an empty string is the functor on the empty set."""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as e:
        raise ParetoCatError(f"Cannot read functor values from {text!r}", "cli.functor") from e


def _number(value):
    if isinstance(value, Fraction):
        return {"value": float(value), "exact": f"{value.numerator}/{value.denominator}"}
    return {"value": float(value)}


def _distance(d):
    return None if math.isinf(d) else d


class CommandHandler:
    """Runs one command on one instance and emits its results."""

    def __init__(self, context: RunContext, args: Namespace):
        self.context = context
        self.args = args
        self.commands = {
            Command.VALIDATE: self._validate,
            Command.FRONTIER: self._frontier,
            Command.LAMBDA: self._lambda,
            Command.PARTICLE: self._particle,
            Command.SWARM: self._swarm,
            Command.INTERLEAVE: self._interleave,
            Command.RATE: self._rate,
        }

    def _instance_path(self) -> Path:
        path = Path(self.args.instance)
        if not path.exists() and self.args.instance in BUNDLED_FIXTURES:
            return fixture_path(self.args.instance)
        return path

    def _load(self) -> Instance:
        instance = load_instance(self._instance_path(), close_hom=self.args.close_hom, cap=self.context.cap,
                                 exact=self.context.exact)
        # later index(cap) lookups reuse this scan
        instance.system.index(self.context.cap, self.context.threads)
        return instance

    def dispatch(self) -> ExitCode:
        handler = self.commands[self.context.command]
        try:
            payload, rows = handler()
        except InstanceValidationError as e:
            logger.error("%s", e)
            payload = {"instance": self.args.instance, "valid": False,
                       "violations": [v.to_dict() for v in e.violations]}
            emit(payload, [v.to_dict() for v in e.violations], self.context.output_format, self.args.out)
            return ExitCode.DOMAIN_ERROR
        except ParetoCatError as e:
            logger.error("[%s] %s", e.code, e)
            return ExitCode.DOMAIN_ERROR
        payload = {"command": self.context.command.value, **payload}
        if self.context.seed is not None:
            payload["seed"] = self.context.seed
        emit(payload, rows, self.context.output_format, self.args.out)
        logger.debug("Command %s finished in %.2fs", self.context.command.value, self.context.elapsed_seconds())
        return ExitCode.OK

    def _validate(self) -> Result:
        instance = self._load()
        mass = admissible_mass(instance.system, instance.distribution, self.context.cap)
        if mass == 0:
            logger.warning("P(admissible) = 0: no admissible summing functor")
        return {
            "instance": instance.name,
            "valid": True,
            "objects": instance.category.objects,
            "system_size": instance.system_size,
            "objectives": len(instance.system.objectives),
            "has_scale": instance.scale is not None,
            "admissible_mass": _number(mass),
        }, None

    def _frontier(self) -> Result:
        instance = self._load()
        frontier = pareto_frontier(instance.system, self.context.cap)
        agrees = frontier_via_chains(instance.system, self.context.cap).as_set() == frontier.as_set()
        if not agrees:
            logger.warning("Frontier by minorization sets and by chain terminals differ")
        classes = [{"representative": list(c.representative.values),
                    "members": [list(phi.values) for phi in c.members]} for c in frontier.classes]
        rows = [{"class": i, "functor": ",".join(map(str, phi.values)),
                 "representative": phi == c.representative}
                for i, c in enumerate(frontier.classes) for phi in c.members]
        return {"instance": instance.name, "classes": classes, "chains_agree": agrees}, rows

    def _lambda(self) -> Result:
        instance = self._load()
        phi = instance.functor(parse_functor(self.args.functor))
        value = lambda_value(instance.system, instance.distribution, phi, self.context.cap)
        strict = sorted(psi.values for psi in strict_minorization_set(instance.system, phi, self.context.cap))
        rows = [{"functor": ",".join(map(str, values))} for values in strict]
        return {"instance": instance.name, "functor": list(phi.values), "lambda": _number(value),
                "strict_minorizations": [list(v) for v in strict]}, rows

    def _particle(self) -> Result:
        instance = self._load()
        seed = self._seed()
        trace = run_particle(instance.system, instance.distribution, self.args.draws, seed,
                             exact=self.context.exact, cap=self.context.cap)
        payload = {"instance": instance.name, "trace": trace.to_dict()}
        lambdas = [float(x) for x in trace.lambdas[:self.args.draws]]
        if all(a >= b for a, b in zip(lambdas, lambdas[1:])):
            payload["estimate_holds"] = check_estimate(lambdas)
        if self.args.trials:
            freq = markov_oracle(lambdas, self.args.trials, seed, self.context.threads)
            payload["oracle_total_variation"] = total_variation(freq, trace.coeffs)
        rows = [{"index": k, "draw": ",".join(map(str, phi.values)), "lambda": float(trace.lambdas[k]),
                 "coefficient": float(trace.coeffs[k])} for k, phi in enumerate(trace.draws)]
        return payload, rows

    def _swarm(self) -> Result:
        instance = self._load()
        config = SwarmConfig(particles=self.args.particles, draws=self.args.draws, epsilon=self.args.epsilon,
                             seed=self._seed())
        report = run_swarm(instance, config, self.context.threads, self.context.cap)
        score = score_report(instance, report, self.context.cap)
        rows = [{"particle": f.particle, "index": f.index, "functor": ",".join(map(str, f.functor)),
                 "witness": " ".join(f"{p}:{i}" for p, i in f.witness), "epsilon": f.epsilon}
                for f in report.flagged]
        return {"instance": instance.name, "report": report.to_dict(), "score": score.to_dict()}, rows

    def _interleave(self) -> Result:
        instance = self._load()
        alpha = self.args.objective
        phi = instance.functor(parse_functor(self.args.a))
        psi = instance.functor(parse_functor(self.args.b))
        y, z = instance.scaled(alpha, phi), instance.scaled(alpha, psi)
        rows = [{"epsilon": eps, "interleaved": epsilon_interleaved(y, z, eps),
                 "a_to_b_reversible": conversion_reversible(y, z, eps),
                 "b_to_a_reversible": conversion_reversible(z, y, eps)} for eps in range(y.grid_len)]
        return {"instance": instance.name, "objective": alpha, "a": list(phi.values), "b": list(psi.values),
                "a_scaled": list(y.values), "b_scaled": list(z.values),
                "distance": _distance(interleaving_distance(y, z))}, rows

    def _rate(self) -> Result:
        instance = self._load()
        try:
            a, b = int(self.args.a), int(self.args.b)
        except (TypeError, ValueError) as e:
            raise ParetoCatError("rate needs integer object ids for --a and --b", "cli.object") from e
        rate = conversion_rate(instance.category, a, b, self.args.n_max)
        return {"instance": instance.name, "a": a, "b": b,
                "rate": None if rate is None else _number(rate)}, None

    def _seed(self) -> int:
        seed = self.context.resolve_seed()
        if self.context.seed_generated:
            logger.info("No --seed given; using generated seed %d", seed)
        return seed
