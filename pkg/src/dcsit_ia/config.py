"""Run configuration shared by the CLI and the experiment scripts."""

from dataclasses import asdict, dataclass, field

from .analytics import RATIONAL_CAP
from .linalg import RANK_REL_TOL


@dataclass
class RunConfig:
    """Defaults reproduce the acceptance suite."""

    command: str = "table"
    channel: str = "ic"
    k: int = 3
    k_max: int = None
    m: int = None
    seeds: int = 1
    seed: int = 0
    fmt: str = "json"
    out: str = None
    rank_rel_tol: float = RANK_REL_TOL
    recovery_tol: float = 1e-6
    sim_cap: int = 5
    rational_cap: int = RATIONAL_CAP
    coeff_mode: str = "orthonormal"
    inject_fault: bool = False
    extra: dict = field(default_factory=dict)

    def seed_list(self):
        return list(range(self.seed, self.seed + self.seeds))

    def as_dict(self):
        return asdict(self)
