import pytest

from fractal_spectra.triple import AffinePair, HadamardTriple

CANTOR4 = (4, [0, 2], [0, 1])
LEBESGUE = (2, [0, 1], [0, 1])
ZERO_SET = ([[4, 0], [1, 2]], [[0, 0], [0, 3], [1, 0], [1, 3]], [[0, 0], [2, 0], [0, 1], [2, 1]])
NOT_SIMPLE = ([[2, 1], [0, 2]], [[0, 0], [3, 0], [0, 1], [3, 1]], [[0, 0], [1, 0], [0, 1], [1, 1]])


@pytest.fixture(scope="session")
def cantor4():
    return HadamardTriple.from_data(*CANTOR4)


@pytest.fixture(scope="session")
def lebesgue():
    return HadamardTriple.from_data(*LEBESGUE)


@pytest.fixture(scope="session")
def zero_set():
    return HadamardTriple.from_data(*ZERO_SET)


@pytest.fixture(scope="session")
def not_simple():
    return HadamardTriple.from_data(*NOT_SIMPLE)


@pytest.fixture(scope="session")
def middle_third():
    return AffinePair(3, [0, 2])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS, report_lines
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in report_lines():
            terminalreporter.write_line(line)
