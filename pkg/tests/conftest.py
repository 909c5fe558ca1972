import pytest

from gpsyn.domains import InstanceSpec, build_task
from gpsyn.model import Label
from gpsyn.program import parse_program

# The three corridor programs: the straight-line plan, the loop that may
# terminate immediately, and the loop that runs its body at least once.
STRAIGHT = """
0. paint
1. inc
2. inc
3. end
"""

LOOP_FROM_START = """
0. goto(2,!at_end)
1. end
2. paint
3. inc
4. inc
5. goto(0,!at_end)
6. end
"""

LOOP_AFTER_BODY = """
0. paint
1. inc
2. inc
3. goto(0,!at_end)
4. end
"""


@pytest.fixture(scope="session")
def corridor_task():
    """2x1 positive, 6x1 positive, 1x1 negative over one shared frame."""
    return build_task(
        "robopainter",
        [
            InstanceSpec(2, Label.POSITIVE, name="corridor-2"),
            InstanceSpec(6, Label.POSITIVE, name="corridor-6"),
            InstanceSpec(1, Label.NEGATIVE, name="corridor-1-neg"),
        ],
    )


@pytest.fixture(scope="session")
def straight_program():
    return parse_program(STRAIGHT)


@pytest.fixture(scope="session")
def loop_from_start_program():
    return parse_program(LOOP_FROM_START)


@pytest.fixture(scope="session")
def loop_after_body_program():
    return parse_program(LOOP_AFTER_BODY)
