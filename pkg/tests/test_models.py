import json

import numpy as np
import pytest

from ehcap.models import (DiscreteDist, DistributionError, Scenario,
                          ScenarioError, load_scenario, sample, save_scenario,
                          scenario_from_dict, scenario_to_dict, validate)


def test_example1_scenario_is_valid(example1):
    assert validate(example1) is example1
    assert example1.harvest.mean == pytest.approx(0.7, abs=1e-15)


def test_non_normalized_probs_rejected():
    with pytest.raises(DistributionError):
        DiscreteDist((0.5, 1.0), (0.5, 0.6))


def test_single_point_dists_valid():
    sc = Scenario(harvest=DiscreteDist((1.0,), (1.0,)),
                  fade=DiscreteDist((1.0,), (1.0,)))
    assert validate(sc) is sc


@pytest.mark.parametrize("support,probs", [
    ((1.0, 0.5), (0.5, 0.5)),       # not increasing
    ((0.5, 0.5), (0.5, 0.5)),       # not strictly increasing
    ((-0.5, 1.0), (0.5, 0.5)),      # negative support
    ((0.5, 1.0), (0.5, 0.0, 0.5)),  # length mismatch
    ((0.5, 1.0), (1.0, -0.0)),      # nonpositive prob
    ((), ()),                       # empty
])
def test_bad_distributions_rejected(support, probs):
    with pytest.raises(DistributionError):
        DiscreteDist(support, probs)


@pytest.mark.parametrize("kw", [
    dict(noise_var=0.0),
    dict(noise_var=-1.0),
    dict(beta1=1.5),
    dict(beta1=-0.1),
    dict(beta2=-1e-9),
    dict(alpha=-0.5),
    dict(arch="XYZ"),
    dict(csit="maybe"),
])
def test_bad_scenarios_rejected(example1, kw):
    with pytest.raises(ScenarioError):
        example1.with_(**kw)


def test_single_point_sample_is_constant():
    d = DiscreteDist((0.7,), (1.0,))
    rng = np.random.default_rng(0)
    assert sample(d, rng) == 0.7
    assert np.all(sample(d, rng, size=100) == 0.7)


def test_sample_mean_within_three_sigma(example1):
    rng = np.random.default_rng(123)
    draws = sample(example1.harvest, rng, size=10**6)
    se = np.std(draws) / np.sqrt(draws.size)
    assert abs(np.mean(draws) - 0.7) < 3 * se


def test_identical_seeds_identical_streams(example1):
    a = sample(example1.harvest, np.random.default_rng(99), size=1000)
    b = sample(example1.harvest, np.random.default_rng(99), size=1000)
    assert np.array_equal(a, b)


def test_expectation_exact():
    d = DiscreteDist((0.25, 0.5, 2.0), (0.5, 0.25, 0.25))
    assert d.mean == 0.5 * 0.25 + 0.25 * 0.5 + 0.25 * 2.0


def test_scenario_roundtrip_bit_exact(tmp_path, example1):
    path = tmp_path / "scn.json"
    save_scenario(example1, path)
    back = load_scenario(path)
    assert back == example1
    # raw float identity, not approximate
    assert back.harvest.support == example1.harvest.support
    assert back.fade.probs == example1.fade.probs


def test_roundtrip_dict(example1):
    assert scenario_from_dict(scenario_to_dict(example1)) == example1


def test_load_rejects_empty_file(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    with pytest.raises(ScenarioError):
        load_scenario(path)


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ScenarioError):
        load_scenario(path)


def test_load_rejects_non_normalized(tmp_path, example1):
    d = scenario_to_dict(example1)
    d["harvest"]["probs"] = [0.5, 0.6]
    path = tmp_path / "bad2.json"
    path.write_text(json.dumps(d))
    with pytest.raises(DistributionError):
        load_scenario(path)
