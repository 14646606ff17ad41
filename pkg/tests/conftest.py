import pytest

from hetnet_srt import BASELINE, SystemConfig


@pytest.fixture
def baseline() -> SystemConfig:
    return BASELINE


@pytest.fixture
def toy() -> SystemConfig:
    # gamma_m = 10, unit main/eavesdropper variances, 0.1 cross links
    return SystemConfig(gamma_m=10.0, beta=0.5, alpha=0.5)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
