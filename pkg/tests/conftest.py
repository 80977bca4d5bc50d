import numpy as np
import pytest


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture(scope="session")
def los_sweep():
    """Perfect-CSI LoS sweep at B=128, U=16 shared by the trend checks (a few minutes)."""
    from beamsparse.equalizers import ALGORITHMS
    from beamsparse.simulator import SimConfig, ber_curves

    config = SimConfig(
        B=128, U=16, snr_grid=range(-14, 3), trials=100, block_length=100,
        seed=1, csi="perfect",
    )
    return config, ber_curves(config, ALGORITHMS)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
