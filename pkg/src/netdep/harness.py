"""Monte-Carlo power experiments over the simulation scenarios."""
from __future__ import annotations

import concurrent.futures
import csv
import io
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from . import simgen
from .config import RunConfig
from .dmgc import TestReport, network_test
from .errors import ParameterError
from .graph import adjacency

POWER_FIELDS = ("scenario", "param", "method", "embedding", "n", "power", "m", "r", "seed")


@dataclass(frozen=True)
class PowerRow:
    scenario: str
    param: float
    method: str
    embedding: str
    n: int
    power: float
    m: int
    r: int
    seed: int


def _param_key(param) -> int:
    # integer key so a grid point's seeds do not depend on its grid position
    return int(round(float(param) * 1_000_000))


def replicate_seeds(seed: int, scenario: str, param, rep: int) -> tuple[np.random.SeedSequence, int]:
    """Seed material for one replicate: a sampling seed sequence and the
    permutation seed. Depends only on ``(seed, scenario, param, rep)``."""
    tag = simgen.SCENARIOS.index(scenario)
    root = np.random.SeedSequence([seed, tag, _param_key(param), rep])
    sample_ss, perm_ss = root.spawn(2)
    return sample_ss, int(perm_ss.generate_state(1)[0])


def run_replicate(scenario: str, param, n: int, rep: int, configs: Sequence[RunConfig],
                  seed: int, early_stop: bool = True) -> list[TestReport]:
    """Draw one graph and test it with every configuration (paired design)."""
    sample_ss, perm_seed = replicate_seeds(seed, scenario, param, rep)
    sample = simgen.sample_scenario(scenario, n, param, np.random.default_rng(sample_ss))
    a = adjacency(sample.a, warn=False)
    out = []
    for cfg in configs:
        cfg = replace(cfg, seed=perm_seed, threads=1)
        out.append(network_test(a, sample.x, cfg, stop_alpha=cfg.alpha if early_stop else None))
    return out


def _replicate_job(args):
    return run_replicate(*args)


def replicate_reports(scenario: str, param, n: int, configs: Sequence[RunConfig], *,
                      replicates: int, seed: int, threads: int = 1,
                      early_stop: bool = True) -> list[list[TestReport]]:
    """Reports for ``replicates`` independent draws; ``result[rep][c]`` belongs
    to ``configs[c]``.

    With ``early_stop`` each permutation test stops once rejection at its
    ``alpha`` is impossible, which leaves every reject decision unchanged.
    """
    jobs = [(scenario, param, n, rep, tuple(configs), seed, early_stop) for rep in range(replicates)]
    if threads > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_replicate_job, jobs))
    return [_replicate_job(j) for j in jobs]


def power_rows(scenario: str, grid: Iterable, n: int, configs: Sequence[RunConfig], *,
               replicates: int, seed: int, threads: int = 1) -> list[PowerRow]:
    """Rejection rate at each grid point for each configuration."""
    if scenario not in simgen.SCENARIOS:
        raise ParameterError(f"unknown scenario {scenario!r}; expected one of {simgen.SCENARIOS}")
    rows = []
    for param in grid:
        reports = replicate_reports(scenario, param, n, configs, replicates=replicates,
                                    seed=seed, threads=threads)
        for c, cfg in enumerate(configs):
            rejected = sum(rep[c].p_value < cfg.alpha for rep in reports)
            rows.append(PowerRow(scenario=scenario, param=float(param), method=cfg.method,
                                 embedding=cfg.embedding, n=n, power=rejected / replicates,
                                 m=replicates, r=cfg.permutations, seed=seed))
    return rows


def rows_to_csv(rows: Iterable[PowerRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=POWER_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(asdict(row))
    return buf.getvalue()
