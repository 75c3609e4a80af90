import random

import pytest

from trirail.params import REFERENCE_PARAMS, JointInputs


@pytest.fixture
def params():
    return REFERENCE_PARAMS


def random_feasible_inputs(rng: random.Random, p=REFERENCE_PARAMS) -> JointInputs:
    """Inputs with a closable planar loop and rail 3 within reach of y."""
    y_a1 = rng.uniform(-200.0, 200.0)
    magnitude = rng.uniform(10.0, 0.9 * 2.0 * p.l2)
    b_value = magnitude if rng.random() < 0.5 else -magnitude
    y_a2 = y_a1 - p.l3 - b_value
    y_mid = y_a1 - b_value / 2.0 - p.l3 / 2.0
    y_a3 = y_mid + rng.uniform(-0.9 * p.l6, 0.9 * p.l6)
    return JointInputs(y_a1, y_a2, y_a3)
