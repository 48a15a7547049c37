import sys

import numpy as np
import pytest

from varpick.bipoly import ONE, W, Z, MatrixPolynomial
from varpick.kernels import AdmissiblePair, neil_standard_pairs
from varpick.variety import SamplePlan, neil_spec, sample_points


@pytest.fixture(scope="session")
def spec():
    return neil_spec()


@pytest.fixture(scope="session")
def pairs(spec):
    return neil_standard_pairs(spec)


@pytest.fixture(scope="session")
def samples(spec):
    return sample_points(spec, SamplePlan(50, seed=1))


@pytest.fixture(scope="session")
def truncated_pair(spec):
    """Neil pair 1 with the z^2 entry of P dropped (zero-padded to keep the shape)."""
    zero = ONE - ONE
    return AdmissiblePair(1, MatrixPolynomial.from_entries([[ONE, W]]),
                          MatrixPolynomial.from_entries([[ONE, Z, zero]]), spec, "truncated")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
