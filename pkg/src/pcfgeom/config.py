"""Run-wide limits.  Every public routine takes an optional ``limits`` argument."""
import os
from dataclasses import dataclass, field, asdict

PRECISION_ENV = "PCFGEOM_PRECISION_CEILING"


def _env_ceiling(default=4096):
    raw = os.environ.get(PRECISION_ENV)
    if not raw:
        return default
    try:
        bits = int(raw)
    except ValueError:
        return default
    return max(bits, 64)


@dataclass(frozen=True)
class Limits:
    degree_budget: int = 128          # caps deg G_{m,n} = 2^(m+n-1), i.e. m+n <= 8
    precision_ceiling: int = field(default_factory=_env_ceiling)   # bits, root work
    incidence_ceiling: int = 16384    # bits, zero certification
    iteration_cap: int = 10000        # escape-rate loops
    pair_budget: int = 20_000_000     # candidate pairs in line searches

    def as_dict(self):
        return asdict(self)


def resolve(limits=None):
    # env var is read per call so the CLI can override it
    return Limits() if limits is None else limits
