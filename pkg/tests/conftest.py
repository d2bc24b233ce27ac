import numpy as np
import pytest

from cvinterface import gaussian as gc

ACCEPTANCE_LINES: list[str] = []


def random_state(rng: np.random.Generator, n_modes: int, depth: int = 6) -> gc.GaussianState:
    """Random physical state: squeezed thermal modes scrambled by random gates."""
    modes = []
    for _ in range(n_modes):
        v_minus = rng.uniform(0.05, 2.0)
        v_plus = max(v_minus, 1.0 / v_minus) * rng.uniform(1.0, 3.0)
        modes.append(gc.make_squeezed_thermal(v_minus, v_plus, rng.uniform(0, 2 * np.pi)))
    state = gc.tensor(*modes)
    for _ in range(depth):
        kind = rng.integers(3) if n_modes > 1 else rng.integers(2)
        m = int(rng.integers(n_modes))
        if kind == 0:
            state = gc.apply_squeezer(state, m, rng.uniform(-0.8, 0.8), rng.uniform(0, np.pi))
        elif kind == 1:
            state = gc.apply_phase(state, m, rng.uniform(0, 2 * np.pi))
        else:
            a, b = rng.choice(n_modes, 2, replace=False)
            state = gc.apply_beamsplitter(state, int(a), int(b), rng.uniform(0, 1))
    return state


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
