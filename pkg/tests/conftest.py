import pytest


def pytest_configure(config):
    config._criteria = {}


@pytest.fixture
def criterion(request):
    """Record ``(ok, detail)`` for one acceptance criterion; summarised at exit."""
    def record(num, ok, detail=""):
        request.config._criteria[num] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    res = getattr(config, "_criteria", {})
    if not res:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(res):
        ok, detail = res[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
