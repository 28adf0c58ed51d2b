import pytest

from worstcase.geometry import available_backends


@pytest.fixture(scope="module", params=available_backends())
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for n in sorted(REPORT):
            terminalreporter.write_line(REPORT[n])
