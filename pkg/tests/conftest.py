import os

import pytest

SLOW_TESTS = bool(os.getenv("JDE_FUSION_SLOW_TESTS", False))


def pytest_sessionstart(session: pytest.Session) -> None:
    # No display on test runners
    os.environ.setdefault("MPLBACKEND", "Agg")


def pytest_report_header(config: pytest.Config) -> str:
    state = "on" if SLOW_TESTS else "off, set JDE_FUSION_SLOW_TESTS to run them"
    return f"python_jde_fusion slow tests: {state}"
