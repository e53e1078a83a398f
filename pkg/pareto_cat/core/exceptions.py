from __future__ import annotations
from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One failed invariant: namespaced code, location and witnessing ids."""
    code: str
    message: str
    witness: tuple = ()
    path: str = ""

    def to_dict(self) -> dict:
        return {"code": self.code, "path": self.path, "message": self.message, "witness": list(self.witness)}


class ParetoCatError(Exception):
    """Base exception for pareto-cat. Every error carries a machine-readable code."""
    code = "pareto_cat.error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class CategoryError(ParetoCatError):
    """Base exception for resource and target category errors."""
    code = "rescat.error"


class CategoryStructureError(CategoryError):
    """Raised when category tables are not dimensionally consistent with the object count."""
    code = "rescat.structure"


class ObjectRangeError(CategoryError):
    """Raised when an object id is outside 0..K-1."""
    code = "rescat.range"


class FunctorError(ParetoCatError):
    """Raised for malformed summing functors or subsets."""
    code = "summing.error"


class CapacityError(ParetoCatError):
    """Raised when an exhaustive scan would exceed the enumeration cap."""
    code = "summing.capacity"


class ValuationError(ParetoCatError):
    """Base exception for valuation system errors."""
    code = "valuation.error"


class DistributionError(ValuationError):
    """Raised when an object distribution is not strictly positive and normalized."""
    code = "distribution.error"


class ProbabilisticError(ParetoCatError):
    """Raised for invalid probabilistic objects, morphisms or lifts."""
    code = "probcat.error"


class ParticleError(ParetoCatError):
    """Raised when single-particle dynamics receive invalid input."""
    code = "particle.error"


class SamplingError(ParticleError):
    """Raised when rejection sampling exhausts its budget."""
    code = "particle.sampling"

    def __init__(self, message: str, acceptance_rate: float):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate


class ScaleError(ParetoCatError):
    """Raised for invalid scale-indexed objects or scale queries."""
    code = "scale.error"


class SwarmError(ParetoCatError):
    """Raised when the swarm cannot run on an instance."""
    code = "swarm.error"


class InstanceError(ParetoCatError):
    """Base exception for instance file errors."""
    code = "instance.error"


class InstanceParseError(InstanceError):
    """Raised when an instance file cannot be read or does not match the schema."""
    code = "instance.parse"


class InstanceValidationError(InstanceError):
    """Raised when a parsed instance violates domain invariants."""
    code = "instance.invalid"

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        lines = [f"{v.path}: {v.code}: {v.message}" for v in self.violations]
        super().__init__("Instance validation failed:\n" + "\n".join(lines),
                         self.violations[0].code if self.violations else None)
