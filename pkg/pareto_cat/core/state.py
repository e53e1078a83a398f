from dataclasses import dataclass, field
from datetime import datetime
import numpy as np
from pareto_cat.core.config import settings
from pareto_cat.core.enums import Command, OutputFormat


def generate_seed() -> int:
    """Fresh 32-bit seed drawn from OS entropy."""
    return int(np.random.SeedSequence().entropy % (2**32))


@dataclass
class RunContext:
    """Per-invocation options resolved from CLI flags and settings."""
    command: Command
    seed: int | None = None
    seed_generated: bool = False
    threads: int = field(default_factory=lambda: settings.threads)
    cap: int = field(default_factory=lambda: settings.enumeration_cap)
    exact: bool = False
    output_format: OutputFormat = OutputFormat.JSON
    session_start: datetime = field(default_factory=datetime.now)

    def resolve_seed(self) -> int:
        if self.seed is None:
            self.seed = generate_seed()
            self.seed_generated = True
        return self.seed

    def elapsed_seconds(self) -> float:
        return (datetime.now() - self.session_start).total_seconds()
