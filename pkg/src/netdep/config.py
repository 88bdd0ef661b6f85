from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ParameterError

METHODS = ("dmgc", "dcorr", "hhg")
EMBEDDINGS = ("diffusion", "ase")


@dataclass(frozen=True)
class RunConfig:
    """Options shared by the ``test``, ``power`` and ``embed`` commands.

    Defaults follow the published power protocol: 500 permutations,
    100 replicates, alpha 0.05 and diffusion times 0..10.
    """

    method: str = "dmgc"
    embedding: str = "diffusion"
    t_max: int = 10
    q_override: Optional[int] = None
    permutations: int = 500
    alpha: float = 0.05
    replicates: int = 100
    seed: int = 0
    threads: int = 1
    binarize: bool = False
    one_indexed: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.embedding not in EMBEDDINGS:
            raise ParameterError(f"embedding must be one of {EMBEDDINGS}, got {self.embedding!r}")
        if self.permutations < 1:
            raise ParameterError("permutations must be >= 1")
        if self.replicates < 1:
            raise ParameterError("replicates must be >= 1")
        if not 0 < self.alpha < 1:
            raise ParameterError("alpha must lie in (0, 1)")
        if self.t_max < 0:
            raise ParameterError("t_max must be >= 0")
        if self.q_override is not None and self.q_override < 1:
            raise ParameterError("q must be >= 1")
        if self.seed < 0:
            raise ParameterError("seed must be a nonnegative integer")
        if self.threads < 1:
            raise ParameterError("threads must be >= 1")
