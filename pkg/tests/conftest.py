import sys

import numpy as np
import pytest


def radical_k2(m):
    """Literal closed form: sqrt((T - sqrt(T^2 - 4D^2)) / (T + sqrt(T^2 - 4D^2)))."""
    (a, b), (c, d) = np.asarray(m, dtype=float)
    T = a * a + b * b + c * c + d * d
    D = a * d - b * c
    root = np.sqrt(max(T * T - 4 * D * D, 0.0))
    return np.sqrt((T - root) / (T + root))


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    q = q * np.sign(np.diag(r))
    if rng.random() < 0.5:
        q[:, 0] = -q[:, 0]
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[num])
