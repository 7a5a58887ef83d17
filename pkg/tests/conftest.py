import numpy as np
import pytest

from ehcap.models import DiscreteDist, Scenario
from ehcap.presets import get_preset


@pytest.fixture
def example1():
    return get_preset("example1")


@pytest.fixture
def example2a():
    return get_preset("example2a")


def random_dist(rng, n_min=2, n_max=4, lo=0.1, hi=2.0):
    n = int(rng.integers(n_min, n_max + 1))
    support = np.sort(rng.uniform(lo, hi, size=n))
    while np.any(np.diff(support) < 1e-3):
        support = np.sort(rng.uniform(lo, hi, size=n))
    raw = rng.uniform(0.2, 1.0, size=n)
    probs = raw / raw.sum()
    probs = list(probs[:-1]) + [1.0 - float(np.sum(probs[:-1]))]
    return DiscreteDist(tuple(support), tuple(probs))


def random_scenario(rng, **overrides):
    kw = dict(
        harvest=random_dist(rng),
        fade=random_dist(rng, lo=0.2, hi=1.5),
        noise_var=float(rng.uniform(0.5, 2.0)),
        beta1=float(rng.uniform(0.3, 1.0)),
        beta2=float(rng.uniform(0.0, 0.2)),
    )
    kw.update(overrides)
    return Scenario(**kw)
