import pytest

from podcorpus import kernels

# filled by the acceptance module, printed once at the end of the run
CRITERIA_LINES: list[str] = []


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES):
            terminalreporter.write_line(line)
