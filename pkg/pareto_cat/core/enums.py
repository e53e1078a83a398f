from enum import Enum, IntEnum


class ValuationKind(Enum):
    """
    Encodings of a valuation map F_alpha in an instance file.
    """
    TABLE = "table"
    COMPOSED = "composed"


class Command(Enum):
    VALIDATE = "validate"
    FRONTIER = "frontier"
    LAMBDA = "lambda"
    PARTICLE = "particle"
    SWARM = "swarm"
    INTERLEAVE = "interleave"
    RATE = "rate"


class ExitCode(IntEnum):
    OK = 0
    DOMAIN_ERROR = 1
    USAGE_ERROR = 2


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
