import pytest

_RESULTS: list[str] = []


class Criterion:
    """Prints and records one PASS/FAIL line, then fails the test on FAIL."""

    def __init__(self, name: str):
        self.name = name

    def check(self, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} [{self.name}] {detail}".rstrip()
        print(line)
        _RESULTS.append(line)
        assert ok, line


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    return Criterion(marker.args[0] if marker else request.node.name)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in _RESULTS:
            terminalreporter.write_line(line)
