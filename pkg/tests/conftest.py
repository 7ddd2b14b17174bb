import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

from hyperpt.dsl import parse_trace  # noqa: E402

T1 = "I(l,1)\nI(h,1)\nO(l,1)\nO(l,1)\n"
T2 = "I(l,1)\nI(h,2)\nO(l,1)\nO(l,1)\n"
T3 = "I(l,1)\nDbg(1)\nI(h,2)\nO(l,1)\nO(l,1)\n"


@pytest.fixture
def intro_traces():
    return {"t1": parse_trace(T1), "t2": parse_trace(T2), "t3": parse_trace(T3)}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
