import pytest

from racsim import Access, SimConfig


@pytest.fixture
def tiny():
    """2 sets x 4 tag ways over 4 frames."""
    return SimConfig(num_sets=2, tag_ways=4, data_ways=2, seed=0)


def loads(*blocks, block_size=64):
    return [Access.load(b * block_size) for b in blocks]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
