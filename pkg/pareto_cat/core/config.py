import os
from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    # Enumeration of summing functors
    enumeration_cap: int = 10**6  # max K^n tuples scanned exhaustively

    # Sampling
    rejection_budget: int = 10**5  # attempts per admissible draw
    oracle_trials: int = 10**6
    oracle_block_size: int = 65536  # trials per RNG substream block

    # Conversion rates
    conversion_n_max: int = 16

    # Tolerances
    iso_weight_tolerance: float = 1e-9  # weight equality for probabilistic isomorphism
    stochastic_tolerance: float = 1e-12  # column sums, normalization

    # Swarm defaults
    swarm_particles: int = 8
    swarm_draws: int = 20
    swarm_epsilon: int = 1

    # Execution
    threads: int = os.cpu_count() or 1
    log_level: str = "INFO"
    output_indent: int = 2

settings = Settings()
