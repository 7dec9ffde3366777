import pytest
from hypothesis import HealthCheck, settings

from suffixmatch.encoder import EncodingParams

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DIGITS = "0123456789"


@pytest.fixture
def digit_params():
    return EncodingParams(salt="test-salt", alphabet=DIGITS, m=1)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
