import pytest

from mapwalk.exact import build_triangulation_table, build_unicellular_table


@pytest.fixture(scope="session")
def uni200():
    return build_unicellular_table(200)


@pytest.fixture(scope="session")
def uni1000():
    # enough genera for the rays 1/3 and 1/4
    return build_unicellular_table(1000, g_max=334)


@pytest.fixture(scope="session")
def uni_full500():
    return build_unicellular_table(500)


@pytest.fixture(scope="session")
def tri120():
    return build_triangulation_table(120)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
