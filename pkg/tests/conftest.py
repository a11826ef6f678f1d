import pytest

from pcfgeom.pcfcatalog import build_catalog

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def catalogs():
    cache = {}

    def get(bound):
        if bound not in cache:
            cache[bound] = build_catalog(bound)
        return cache[bound]

    return get


@pytest.fixture(scope="session")
def cat3(catalogs):
    return catalogs(3)


@pytest.fixture(scope="session")
def cat4(catalogs):
    return catalogs(4)


@pytest.fixture(scope="session")
def cat5(catalogs):
    return catalogs(5)


@pytest.fixture
def record_criterion():
    """Call with (number, label, passed, detail); the terminal summary lists every criterion."""

    def rec(num, label, passed, detail=""):
        _ACCEPTANCE[num] = (label, bool(passed), detail)
        return passed

    return rec


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        label, ok, detail = _ACCEPTANCE[num]
        line = f"criterion {num} {'PASS' if ok else 'FAIL'}: {label}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
