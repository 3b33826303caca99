import functools
import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repro", derandomize=True, deadline=None, print_blob=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repro"))


@functools.lru_cache(maxsize=None)
def cached_trace(case, delta, k, j_max=17, truncation_order=None):
    from diffnev.confinement import iterate_confinement
    return iterate_confinement(True, delta, k, j_max, case, truncation_order)


@pytest.fixture(scope="session")
def trace_of():
    return cached_trace


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for an acceptance criterion straight to the terminal, then assert."""
    def report(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else ""))
        assert ok, f"criterion {number} failed: {detail}"
    return report
