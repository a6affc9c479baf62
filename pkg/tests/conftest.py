import os
import random
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from packing_core import Instance  # noqa: E402


@pytest.fixture
def rng():
    return random.Random(20240611)


def zero_size(*colors):
    return Instance.from_pairs((color, 0) for color in colors)


@pytest.fixture
def make_zero_size():
    return zero_size
