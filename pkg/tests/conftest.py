import pytest

from ribbonlink.geometry import from_parametric, frenet_framing, Ribbon

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def circle64():
    return from_parametric("circle", 64)


@pytest.fixture(scope="session")
def fig2_256():
    return from_parametric("paper_fig2", 256)


@pytest.fixture(scope="session")
def fig2_ribbon_256(fig2_256):
    return Ribbon(fig2_256, frenet_framing(fig2_256))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
