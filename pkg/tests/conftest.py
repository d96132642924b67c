import math
import sys

import numpy as np
import pytest

from nsfeed.network import NetworkSpec, BeamSplitter

R2 = math.sqrt(2.0)


def random_network(rng, num_modes=3, n_elements=5) -> NetworkSpec:
    els = []
    for _ in range(n_elements):
        a, b = rng.choice(num_modes, size=2, replace=False)
        els.append(BeamSplitter(int(a), int(b), float(rng.uniform(0, 2 * math.pi))))
    return NetworkSpec(num_modes, tuple(els))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
