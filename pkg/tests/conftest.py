import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=150, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def bits(min_size=0, max_size=16):
    return st.text(alphabet="01", min_size=min_size, max_size=max_size)


def bits_one(max_size=16):
    """Strings starting with a one."""
    return st.text(alphabet="01", max_size=max_size - 1).map(lambda s: "1" + s)


@st.composite
def pow2_ones(draw, max_n=4, max_run=4):
    """Start with one, 2^n ones, random zero runs after each one."""
    n = draw(st.integers(0, max_n))
    runs = draw(st.lists(st.integers(0, max_run), min_size=2**n, max_size=2**n))
    return "".join("1" + "0" * r for r in runs)


# -- acceptance summary: one line per criterion ------------------------------

_CRITERIA: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        prev = _CRITERIA.get(name)
        if prev != "FAIL":
            _CRITERIA[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        num = name.split("_")[2]
        label = " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {int(num):2d} {_CRITERIA[name]}  {label}")
