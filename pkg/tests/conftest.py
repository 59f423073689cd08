import pytest

from fdlab.experiment import (
    link_tone_config,
    node_qpsk_config,
    node_tone_config,
    run_link_experiment,
    run_node_experiment,
)

import acceptance_log


@pytest.fixture(scope="session")
def tone_result():
    """Stock 200 kHz tone budget run at 5 MS/s."""
    return run_node_experiment(node_tone_config())


@pytest.fixture(scope="session")
def qpsk_result():
    """Stock 2.5 Msym/s QPSK budget run at 10 MS/s."""
    return run_node_experiment(node_qpsk_config())


@pytest.fixture(scope="session")
def link_result():
    """Stock link run: tone node plus a 400 kHz remote tone."""
    return run_link_experiment(link_tone_config())


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
