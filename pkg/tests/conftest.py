import json
from pathlib import Path

import numpy as np
import pytest

from hdopt import ChannelOrder, ClusterPlan, Segment, WeightMatrix, load_weight_bundle

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def w_a() -> WeightMatrix:
    return load_weight_bundle(FIXTURES / "w_a.json")


@pytest.fixture
def w_b() -> WeightMatrix:
    return load_weight_bundle(FIXTURES / "w_b.json")


@pytest.fixture
def w_c() -> WeightMatrix:
    return load_weight_bundle(FIXTURES / "w_c.json")


def random_matrix(rng: np.random.Generator, k: int, c: int, bits: int,
                  name: str = "rand") -> WeightMatrix:
    return WeightMatrix(name, bits, rng.integers(0, 1 << bits, size=(k, c)))


def random_plan(rng: np.random.Generator, k: int, c: int) -> ClusterPlan:
    """Arbitrary valid plan: shuffled columns cut into random chunks, random orders."""
    cols = list(rng.permutation(c))
    width = int(rng.integers(1, c + 1))
    segments = []
    i = 0
    while i < len(cols):
        n = int(rng.integers(1, width + 1))
        chunk = cols[i : i + n]
        i += n
        segments.append(Segment(tuple(chunk), ChannelOrder(tuple(rng.permutation(k)))))
    return ClusterPlan(tuple(segments), width)


def write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh)
        fh.write("\n")
