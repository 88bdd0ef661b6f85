import numpy as np
import pytest

import netdep.cli
import netdep.dmgc
import netdep.spectral

_original = netdep.spectral.diffusion_map
DIFFUSION_MAPS_CHECKED = {"count": 0}
ACCEPTANCE_LINES: list[str] = []


def _checked_diffusion_map(d, t, q):
    u = _original(d, t, q)
    # row-norm bound: ||U_i^t||^2 <= q for every node
    sq = np.sum(np.asarray(u.coords) ** 2, axis=1)
    assert np.all(sq <= q * (1 + 1e-12)), f"row norm bound violated at t={t}, q={q}"
    DIFFUSION_MAPS_CHECKED["count"] += 1
    return u


@pytest.fixture(autouse=True)
def _row_norm_bound(monkeypatch):
    monkeypatch.setattr(netdep.spectral, "diffusion_map", _checked_diffusion_map)
    monkeypatch.setattr(netdep.dmgc, "diffusion_map", _checked_diffusion_map)
    monkeypatch.setattr(netdep.cli, "diffusion_map", _checked_diffusion_map)
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
