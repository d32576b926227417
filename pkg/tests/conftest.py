import numpy as np
import pytest

from hsmatch.histogram import PEHistogram
from oracles import SAMPLE_COUNTS, LAYER1_ERRORS, LAYER1_RESIDUALS, SAMPLE_LEVELS, tables_from_sites


@pytest.fixture
def sample_hist():
    return PEHistogram.from_counts(SAMPLE_COUNTS, levels=SAMPLE_LEVELS)


@pytest.fixture
def layer1_tables_fixture():
    return tables_from_sites(np.array(LAYER1_ERRORS), np.array(LAYER1_RESIDUALS), 2, SAMPLE_LEVELS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod and mod.REPORT:
        terminalreporter.section("acceptance")
        for line in sorted(mod.REPORT):
            terminalreporter.write_line(line)
