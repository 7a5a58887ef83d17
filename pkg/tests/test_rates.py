import numpy as np
import pytest

from ehcap.models import DiscreteDist, Scenario
from ehcap.rates import (PreconditionError, applicable_reports, rate_hsu_lossy,
                         rate_hu, rate_hus, rate_ideal_csit, rate_ideal_ncsit,
                         rate_processing, sleep_optimize)

from conftest import random_scenario


def ideal(sc, csit):
    return sc.with_(arch="HSU", csit=csit, beta1=1.0, beta2=0.0, alpha=0.0)


# ---------------------------------------------------------------------------
# ideal cells and lossy reductions
# ---------------------------------------------------------------------------

def test_ncsit_ideal_exact_value(example1):
    rep = rate_ideal_ncsit(ideal(example1, "none"))
    h = np.asarray(example1.fade.support)
    p = np.asarray(example1.fade.probs)
    expect = float(p @ (0.5 * np.log1p(h ** 2 * 0.7)))
    assert rep.rate.rate_nats == pytest.approx(expect, abs=1e-12)
    assert rep.formula_id == "NCSIT_IDEAL"


def test_lossy_reduces_to_ideal_cells(example1):
    for csit in ("perfect", "none"):
        sc = ideal(example1, csit)
        lossy = rate_hsu_lossy(sc)
        ref = (rate_ideal_csit if csit == "perfect" else rate_ideal_ncsit)(sc)
        assert lossy.rate.rate_nats == pytest.approx(ref.rate.rate_nats, abs=1e-9)


def test_hus_ideal_equals_waterfilling(example1):
    sc = ideal(example1, "perfect").with_(arch="HUS")
    rep = rate_hus(sc)
    ref = rate_ideal_csit(ideal(example1, "perfect"))
    assert rep.rate.diagnostics["threshold_c"] == pytest.approx(0.7, abs=1e-9)
    assert rep.rate.rate_nats == pytest.approx(ref.rate.rate_nats, abs=1e-8)


def test_csit_never_worse_than_ncsit_random():
    rng = np.random.default_rng(7)
    for _ in range(15):
        sc = random_scenario(rng)
        lossy_c = rate_hsu_lossy(sc.with_(arch="HSU", csit="perfect"))
        lossy_n = rate_hsu_lossy(sc.with_(arch="HSU", csit="none"))
        assert lossy_c.rate.rate_nats >= lossy_n.rate.rate_nats - 1e-10
        hus_c = rate_hus(sc.with_(arch="HUS", csit="perfect"))
        hus_n = rate_hus(sc.with_(arch="HUS", csit="none"))
        assert hus_c.rate.rate_nats >= hus_n.rate.rate_nats - 1e-10


def test_lossy_monotone_in_storage_params(example1):
    base = example1.with_(arch="HSU", csit="perfect")
    r_b1 = [rate_hsu_lossy(base.with_(beta1=b)).rate.rate_nats
            for b in (0.4, 0.6, 0.8, 1.0)]
    assert all(b >= a - 1e-12 for a, b in zip(r_b1, r_b1[1:]))
    r_b2 = [rate_hsu_lossy(base.with_(beta2=b)).rate.rate_nats
            for b in (0.0, 0.05, 0.1, 0.3)]
    assert all(b <= a + 1e-12 for a, b in zip(r_b2, r_b2[1:]))


def test_precondition_errors(example1):
    with pytest.raises(PreconditionError):
        rate_ideal_csit(example1.with_(csit="perfect"))  # beta1 != 1
    with pytest.raises(PreconditionError):
        rate_hu(ideal(example1, "perfect"))  # arch is HSU
    with pytest.raises(PreconditionError):
        rate_processing(ideal(example1, "perfect"))  # alpha == 0


# ---------------------------------------------------------------------------
# bufferless (HU)
# ---------------------------------------------------------------------------

def test_hu_independent_of_storage_params(example1):
    a = rate_hu(example1.with_(arch="HU", csit="perfect", beta1=0.7))
    b = rate_hu(example1.with_(arch="HU", csit="perfect", beta1=1.0, beta2=0.2))
    assert a.rate.rate_nats == b.rate.rate_nats


def test_hu_ncsit_is_flagged_lower_bound(example1):
    rep = rate_hu(example1.with_(arch="HU", csit="none"))
    assert rep.lower_bound_flag is True
    assert rep.rate.rate_nats > 0


def test_hu_csit_exact_in_validity_range(example1):
    # all y*h^2 <= 1 here, so sqrt of every effective peak is within range
    rep = rate_hu(example1.with_(arch="HU", csit="perfect"))
    assert rep.lower_bound_flag is False
    assert all(not fb for (_, _, _, fb) in rep.rate.diagnostics["cells"])


def test_hu_csit_at_least_ncsit(example1):
    c = rate_hu(example1.with_(arch="HU", csit="perfect")).rate.rate_nats
    n = rate_hu(example1.with_(arch="HU", csit="none")).rate.rate_nats
    assert c >= n - 1e-12


def test_hu_flags_out_of_range_cells():
    sc = Scenario(harvest=DiscreteDist((64.0,), (1.0,)),
                  fade=DiscreteDist((1.0,), (1.0,)),
                  arch="HU", csit="perfect")
    rep = rate_hu(sc)
    assert rep.lower_bound_flag is True
    # deep in the saturated regime the antipodal bound is one bit
    assert rep.rate.rate_nats == pytest.approx(np.log(2.0), abs=1e-6)


# ---------------------------------------------------------------------------
# processing cost
# ---------------------------------------------------------------------------

def test_processing_zero_when_alpha_dominates(example1):
    rep = rate_processing(example1.with_(alpha=0.8, csit="perfect"))
    assert rep.rate.rate_nats == 0.0
    assert rep.formula_id == "EQ11"


def test_processing_small_alpha_close_to_ideal(example1):
    rep = rate_processing(example1.with_(alpha=1e-9, csit="perfect",
                                         beta1=1.0, beta2=0.0))
    ref = rate_ideal_csit(ideal(example1, "perfect"))
    assert rep.rate.rate_nats == pytest.approx(ref.rate.rate_nats, abs=1e-8)


def test_processing_formula_ids(example1):
    assert rate_processing(example1.with_(alpha=0.2, csit="perfect")).formula_id == "EQ11"
    assert rate_processing(example1.with_(alpha=0.2, csit="none")).formula_id == "EQ12"


# ---------------------------------------------------------------------------
# randomized sleep
# ---------------------------------------------------------------------------

def test_sleep_alpha_zero_reduces_to_no_sleep(example1):
    sc = example1.with_(alpha=0.0, beta1=1.0, beta2=0.0,
                        csit="none", sleep_enabled=True)
    rep = sleep_optimize(sc)
    ref = rate_ideal_ncsit(ideal(example1, "none"))
    assert rep.rate.diagnostics["p_opt"] == 0.0
    assert rep.rate.rate_nats == pytest.approx(ref.rate.rate_nats, abs=1e-9)


def test_sleep_beats_no_sleep_in_starved_regime():
    # harvest well below the processing cost: without sleep the rate is zero,
    # with sleep it is strictly positive
    sc = Scenario(harvest=DiscreteDist((0.1,), (1.0,)),
                  fade=DiscreteDist((1.0,), (1.0,)),
                  alpha=1.0, csit="none", sleep_enabled=True)
    no_sleep = rate_processing(sc.with_(sleep_enabled=False))
    with_sleep = sleep_optimize(sc)
    assert no_sleep.rate.rate_nats == 0.0
    assert with_sleep.rate.rate_nats > 0.0
    assert with_sleep.rate.diagnostics["p_opt"] > 0.5


def test_sleep_fraction_decreases_with_harvest():
    fade = DiscreteDist((1.0,), (1.0,))
    ps = []
    for ey in (0.5, 2.0, 10.0):
        sc = Scenario(harvest=DiscreteDist((ey,), (1.0,)), fade=fade,
                      alpha=1.0, csit="none", sleep_enabled=True)
        ps.append(sleep_optimize(sc).rate.diagnostics["p_opt"])
    assert ps[0] > ps[1] > ps[2]


def test_sleep_budget_respected(example2a):
    sc = example2a.with_(alpha=0.2, csit="perfect", sleep_enabled=True)
    rep = sleep_optimize(sc)
    q = np.asarray(sc.fade.probs)
    spent = float(q @ np.asarray(rep.rate.diagnostics["power_alloc"]))
    assert spent <= sc.harvest.mean + 1e-6


def test_sleep_requires_flag(example1):
    with pytest.raises(PreconditionError):
        sleep_optimize(example1.with_(alpha=0.2, sleep_enabled=False))


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def test_applicable_reports_lossy_regime(example1):
    ids = [r.formula_id for r in applicable_reports(example1)]
    assert ids == ["THM1", "NCSIT_IDEAL", "EQ5", "EQ6", "EQ7_HU", "EQ9", "EQ10"]


def test_applicable_reports_processing_regime(example1):
    sc = example1.with_(alpha=0.2, beta1=1.0, beta2=0.0, sleep_enabled=True)
    ids = [r.formula_id for r in applicable_reports(sc)]
    assert ids == ["EQ11", "EQ12", "THM2_SLEEP", "THM2_SLEEP"]


def test_applicable_reports_no_sleep(example1):
    sc = example1.with_(alpha=0.2, beta1=1.0, beta2=0.0)
    ids = [r.formula_id for r in applicable_reports(sc)]
    assert ids == ["EQ11", "EQ12"]
