"""Achievable-rate engine: one entry point per architecture/CSIT/feature cell.

Every operation returns an ArchRateReport whose formula_id names the cell:

  THM1         ideal buffer, perfect CSIT (water-filling at budget E[Y])
  NCSIT_IDEAL  ideal buffer, no CSIT (fixed power E[Y])
  EQ5 / EQ6    lossy storage (beta1, beta2), no / perfect CSIT
  EQ7_HU       bufferless peak-power-limited transmission
  EQ9 / EQ10   harvest-use-store at the sustainable drain c, no / perfect CSIT
  EQ11 / EQ12  processing energy alpha, perfect / no CSIT, no sleep mode
  THM2_SLEEP   randomized sleep policy with processing energy

Rates are nats per channel use; bits are a display conversion.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import optimize

from .allocator import hus_threshold, waterfill, waterfill_lossy
from .infocalc import (PEAK_AMPLITUDE_LIMIT, QuadratureSpec, binary_mi,
                       mixture_mi_unit_grid, peak_capacity_closed)
from .models import PowerPolicy, RateResult, Scenario

__all__ = [
    "ArchRateReport",
    "rate_ideal_csit",
    "rate_ideal_ncsit",
    "rate_hsu_lossy",
    "rate_hu",
    "rate_hus",
    "rate_processing",
    "sleep_optimize",
    "applicable_reports",
]

_DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class ArchRateReport:
    scenario: Scenario
    rate: RateResult
    formula_id: str
    lower_bound_flag: bool = False


class PreconditionError(ValueError):
    """The scenario does not match the requested formula cell."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise PreconditionError(msg)


def _avg_gauss_rate(fade, powers, noise_var) -> float:
    h = np.asarray(fade.support)
    p = np.asarray(fade.probs)
    powers = np.asarray(powers, dtype=float)
    return float(np.dot(p, 0.5 * np.log1p(h * h * powers / noise_var)))


def _zero_result() -> RateResult:
    return RateResult(0.0, None, {"note": "degenerate: zero budget"})


def rate_ideal_csit(scenario: Scenario) -> ArchRateReport:
    """Water-filling capacity at average-energy budget E[Y]."""
    sc = scenario
    _require(sc.arch == "HSU" and sc.csit == "perfect", "needs arch=HSU, csit=perfect")
    _require(sc.beta1 == 1.0 and sc.beta2 == 0.0 and sc.alpha == 0.0,
             "ideal cell needs beta1=1, beta2=0, alpha=0")
    ey = sc.harvest.mean
    if ey <= 0:
        return ArchRateReport(sc, _zero_result(), "THM1")
    wf = waterfill(sc.fade, ey, sc.noise_var)
    diag = {"water_level": wf.water_level, "active": wf.active,
            "budget_residual": wf.achieved_budget - ey}
    return ArchRateReport(sc, RateResult(wf.rate_nats, wf.policy, diag), "THM1")


def rate_ideal_ncsit(scenario: Scenario) -> ArchRateReport:
    """Fixed-power rate at E[Y] when the transmitter is fade-blind."""
    sc = scenario
    _require(sc.arch == "HSU" and sc.csit == "none", "needs arch=HSU, csit=none")
    _require(sc.beta1 == 1.0 and sc.beta2 == 0.0 and sc.alpha == 0.0,
             "ideal cell needs beta1=1, beta2=0, alpha=0")
    ey = sc.harvest.mean
    rate = _avg_gauss_rate(sc.fade, np.full(sc.fade.n, ey), sc.noise_var)
    policy = PowerPolicy(tuple((h, ey) for h in sc.fade.support), 0.0, ey)
    return ArchRateReport(sc, RateResult(rate, policy, {}), "NCSIT_IDEAL")


def rate_hsu_lossy(scenario: Scenario) -> ArchRateReport:
    """Store-first rates with storage efficiency beta1 and leakage beta2."""
    sc = scenario
    _require(sc.arch == "HSU", "needs arch=HSU")
    ey = sc.harvest.mean
    if sc.csit == "none":
        power = max(0.0, sc.beta1 * ey - sc.beta2)
        rate = _avg_gauss_rate(sc.fade, np.full(sc.fade.n, power), sc.noise_var)
        policy = PowerPolicy(tuple((h, ey) for h in sc.fade.support), 0.0, ey)
        return ArchRateReport(sc, RateResult(rate, policy, {"inner_power": power}),
                              "EQ5")
    if ey <= 0:
        return ArchRateReport(sc, _zero_result(), "EQ6")
    wf = waterfill_lossy(sc.fade, ey, sc.noise_var, sc.beta1, sc.beta2)
    diag = {"multiplier": wf.policy.multiplier, "active": wf.active,
            "achieved_budget": wf.achieved_budget}
    return ArchRateReport(sc, RateResult(wf.rate_nats, wf.policy, diag), "EQ6")


def rate_hu(scenario: Scenario, quad: QuadratureSpec = _DEFAULT_QUAD) -> ArchRateReport:
    """Bufferless rate: each slot is peak-power limited to the fresh harvest.

    Perfect CSIT uses the closed-form peak capacity wherever the effective
    amplitude is inside its validity range and falls back to the antipodal
    lower bound outside it. No CSIT always reports the antipodal lower bound.
    """
    sc = scenario
    _require(sc.arch == "HU", "needs arch=HU")
    total = 0.0
    lower_bound = sc.csit == "none"
    cells = []
    for y, py in zip(sc.harvest.support, sc.harvest.probs):
        for h, ph in zip(sc.fade.support, sc.fade.probs):
            if y == 0 or h == 0:
                cells.append((y, h, 0.0, False))
                continue
            if sc.csit == "perfect":
                y_eff = y * h * h / sc.noise_var
                if np.sqrt(y_eff) <= PEAK_AMPLITUDE_LIMIT + 1e-12:
                    mi = peak_capacity_closed(y_eff, quad)
                    cells.append((y, h, mi, False))
                else:
                    mi = binary_mi(np.sqrt(y), sc.noise_var / (h * h), quad)
                    cells.append((y, h, mi, True))
                    lower_bound = True
            else:
                mi = binary_mi(np.sqrt(y), sc.noise_var / (h * h), quad)
                cells.append((y, h, mi, True))
            total += py * ph * mi
    diag = {"cells": tuple(cells)}
    return ArchRateReport(sc, RateResult(total, None, diag), "EQ7_HU",
                          lower_bound_flag=lower_bound)


def rate_hus(scenario: Scenario) -> ArchRateReport:
    """Use-first-store-surplus rates at the sustainable constant drain c."""
    sc = scenario
    _require(sc.arch == "HUS", "needs arch=HUS")
    c = hus_threshold(sc.harvest, sc.beta1, sc.beta2)
    if sc.csit == "none":
        rate = _avg_gauss_rate(sc.fade, np.full(sc.fade.n, c), sc.noise_var)
        policy = PowerPolicy(tuple((h, c) for h in sc.fade.support), 0.0, c)
        return ArchRateReport(sc, RateResult(rate, policy, {"threshold_c": c}), "EQ9")
    if c <= 0:
        return ArchRateReport(sc, RateResult(0.0, None, {"threshold_c": c}), "EQ10")
    wf = waterfill(sc.fade, c, sc.noise_var)
    diag = {"threshold_c": c, "water_level": wf.water_level, "active": wf.active}
    return ArchRateReport(sc, RateResult(wf.rate_nats, wf.policy, diag), "EQ10")


def rate_processing(scenario: Scenario) -> ArchRateReport:
    """No-sleep rates when every slot pays the processing cost alpha.

    The transmit budget is E[Y] - alpha; the slack epsilon of the buffer
    argument is taken to 0, so these are the suprema of the achievable rates.
    """
    sc = scenario
    _require(not sc.sleep_enabled, "sleep must be disabled for this cell")
    _require(sc.alpha > 0, "needs alpha > 0")
    budget = max(0.0, sc.harvest.mean - sc.alpha)
    fid = "EQ11" if sc.csit == "perfect" else "EQ12"
    if budget <= 0:
        return ArchRateReport(sc, RateResult(0.0, None, {"budget": 0.0}), fid)
    if sc.csit == "perfect":
        wf = waterfill(sc.fade, budget, sc.noise_var)
        diag = {"budget": budget, "water_level": wf.water_level, "active": wf.active}
        return ArchRateReport(sc, RateResult(wf.rate_nats, wf.policy, diag), fid)
    rate = _avg_gauss_rate(sc.fade, np.full(sc.fade.n, budget), sc.noise_var)
    policy = PowerPolicy(tuple((h, budget) for h in sc.fade.support), 0.0, budget)
    return ArchRateReport(sc, RateResult(rate, policy, {"budget": budget}), fid)


# ---------------------------------------------------------------------------
# Randomized sleep policy
# ---------------------------------------------------------------------------

def _sleep_rate_at_p(p, q, g, ey, alpha, csit, quad):
    """Best rate at a fixed global sleep probability.

    Returns (rate, P_per_state, v_per_state). A state is either off (zero
    power, zero cost) or on with awake variance v and per-slot cost
    (1-p)(v+alpha); the alpha entry fee makes the on/off choice combinatorial,
    so active subsets are enumerated and each reduced problem is concave.
    """
    n = len(q)
    zeros = np.zeros(n)
    if ey <= 0:
        return 0.0, zeros, zeros
    if csit == "none":
        v = ey / (1.0 - p) - alpha
        if v <= 0:
            return 0.0, zeros, zeros
        rate = float(np.dot(q, mixture_mi_unit_grid(p, g * v, quad)))
        cost = (1.0 - p) * (v + alpha)
        return rate, np.full(n, cost), np.full(n, v)

    idx_pos = [i for i in range(n) if g[i] > 0]
    if not idx_pos:
        return 0.0, zeros, zeros
    if alpha == 0.0:
        subsets = [tuple(idx_pos)]  # no entry fee: the full set dominates
    else:
        subsets = [s for k in range(1, len(idx_pos) + 1)
                   for s in combinations(idx_pos, k)]
    best = (0.0, zeros, zeros)
    for sub in subsets:
        qa = q[list(sub)]
        ga = g[list(sub)]
        fee = (1.0 - p) * alpha * float(np.sum(qa))
        b_v = ey - fee
        if b_v <= 0:
            continue
        share = b_v / ((1.0 - p) * float(np.sum(qa)))

        def neg_rate(v):
            return -float(np.dot(qa, mixture_mi_unit_grid(p, ga * v, quad)))

        cons = optimize.LinearConstraint(qa * (1.0 - p), -np.inf, b_v)
        res = optimize.minimize(
            neg_rate, np.full(len(sub), share), method="SLSQP",
            bounds=[(0.0, b_v / ((1.0 - p) * qi)) for qi in qa],
            constraints=[cons], options={"ftol": 1e-12, "maxiter": 200})
        rate = -res.fun
        if rate > best[0] + 1e-15:
            v_full = np.zeros(n)
            v_full[list(sub)] = np.maximum(0.0, res.x)
            p_full = np.where(v_full > 0, (1.0 - p) * (v_full + alpha), 0.0)
            best = (rate, p_full, v_full)
    return best


def sleep_optimize(scenario: Scenario, p_grid_step: float = 0.01,
                   quad: QuadratureSpec = _DEFAULT_QUAD) -> ArchRateReport:
    """Jointly pick the global sleep probability p and the per-fade-state
    awake variances; grid over p then golden-section refinement."""
    sc = scenario
    _require(sc.sleep_enabled, "needs sleep_enabled=true")
    q = np.asarray(sc.fade.probs)
    g = np.asarray(sc.fade.support, dtype=float) ** 2 / sc.noise_var
    ey = sc.harvest.mean
    alpha = sc.alpha

    def objective(p):
        return _sleep_rate_at_p(p, q, g, ey, alpha, sc.csit, quad)

    ps = np.arange(0.0, 0.99 + 0.5 * p_grid_step, p_grid_step)
    vals = [objective(p)[0] for p in ps]
    i = int(np.argmax(vals))
    lo = ps[max(0, i - 1)]
    hi = ps[min(len(ps) - 1, i + 1)]
    # golden-section refinement of p on the bracketing cells
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = objective(c)[0], objective(d)[0]
    while b - a > 1e-5:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = objective(c)[0]
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = objective(d)[0]
    p_star = 0.5 * (a + b)
    rate, p_alloc, v_alloc = objective(p_star)
    # degenerate ties resolve toward not sleeping
    rate0, p_alloc0, v_alloc0 = objective(0.0)
    if rate0 >= rate - 1e-10:
        p_star, rate, p_alloc, v_alloc = 0.0, rate0, p_alloc0, v_alloc0
    grid_best = (float(ps[i]), float(vals[i]))
    policy = PowerPolicy(tuple(zip(sc.fade.support, p_alloc)), 0.0, ey)
    diag = {
        "p_opt": float(p_star),
        "awake_var": tuple(float(v) for v in v_alloc),
        "power_alloc": tuple(float(x) for x in p_alloc),
        "grid_best": grid_best,
    }
    return ArchRateReport(sc, RateResult(max(0.0, rate), policy, diag), "THM2_SLEEP")


# ---------------------------------------------------------------------------
# Formula-cell dispatch used by the CLI
# ---------------------------------------------------------------------------

def applicable_reports(scenario: Scenario):
    """All formula cells that apply to the scenario's parameter regime."""
    sc = scenario
    out = []
    if sc.alpha == 0 and not sc.sleep_enabled:
        ideal = dict(arch="HSU", beta1=1.0, beta2=0.0, alpha=0.0)
        out.append(rate_ideal_csit(sc.with_(csit="perfect", **ideal)))
        out.append(rate_ideal_ncsit(sc.with_(csit="none", **ideal)))
        out.append(rate_hsu_lossy(sc.with_(arch="HSU", csit="none")))
        out.append(rate_hsu_lossy(sc.with_(arch="HSU", csit="perfect")))
        out.append(rate_hu(sc.with_(arch="HU")))
        out.append(rate_hus(sc.with_(arch="HUS", csit="none")))
        out.append(rate_hus(sc.with_(arch="HUS", csit="perfect")))
    else:
        out.append(rate_processing(sc.with_(csit="perfect", sleep_enabled=False)))
        out.append(rate_processing(sc.with_(csit="none", sleep_enabled=False)))
        if sc.sleep_enabled:
            out.append(sleep_optimize(sc.with_(csit="perfect")))
            out.append(sleep_optimize(sc.with_(csit="none")))
    return out
