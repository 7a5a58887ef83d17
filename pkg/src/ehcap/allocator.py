"""Convex power-allocation solvers.

waterfill        -- classical water-filling against an average-energy budget
waterfill_lossy  -- water-filling when only beta1*T - beta2 of the drawn
                    energy reaches the antenna
hus_threshold    -- largest sustainable constant drain of the harvest-use-store
                    buffer

All solvers are deterministic bisections; no randomness anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import DiscreteDist, PowerPolicy

__all__ = ["WaterfillSolution", "waterfill", "waterfill_lossy", "hus_threshold"]

_MULT_TOL = 1e-12
_BUDGET_TOL = 1e-10
_MAX_ITER = 200


@dataclass(frozen=True)
class WaterfillSolution:
    policy: PowerPolicy
    water_level: float
    achieved_budget: float
    rate_nats: float
    active: tuple  # fade values receiving positive energy


def _rate(probs, gains2, powers, noise_var):
    # powers are the effective transmit energies per state
    return float(np.dot(probs, 0.5 * np.log1p(gains2 * powers / noise_var)))


def waterfill(fade: DiscreteDist, budget: float, noise_var: float) -> WaterfillSolution:
    """Maximize sum_h p(h) * 0.5*ln(1 + h^2 T(h)/noise_var) s.t. E[T] = budget.

    The optimizer is T(h) = (nu - noise_var/h^2)^+ with the water level nu
    found by bisection and then sharpened exactly on the final active set.
    Zero-gain states always receive T = 0 and are excluded from the KKT set.
    """
    if budget <= 0:
        raise ValueError("budget must be > 0")
    if noise_var <= 0:
        raise ValueError("noise_var must be > 0")
    h = np.asarray(fade.support, dtype=float)
    p = np.asarray(fade.probs, dtype=float)
    pos = h > 0
    if not np.any(pos):
        raise ValueError("all fade gains are zero")
    hp, pp = h[pos], p[pos]
    floor = noise_var / hp ** 2  # water must exceed this for the state to be on

    def spend(nu):
        return float(np.dot(pp, np.maximum(0.0, nu - floor)))

    lo = float(np.min(floor))
    hi = float(np.max(floor)) + budget / float(np.sum(pp)) + 1.0
    while spend(hi) < budget:
        hi *= 2.0
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if spend(mid) < budget:
            lo = mid
        else:
            hi = mid
        if hi - lo < _MULT_TOL:
            break
    active = hi > floor
    # exact water level on the identified active set
    nu = (budget + float(np.dot(pp[active], floor[active]))) / float(np.sum(pp[active]))
    t_pos = np.maximum(0.0, np.where(active, nu - floor, 0.0))
    t = np.zeros_like(h)
    t[pos] = t_pos
    achieved = float(np.dot(p, t))
    assert abs(achieved - budget) < max(_BUDGET_TOL, 1e-12 * budget)
    policy = PowerPolicy(tuple(zip(fade.support, t)), multiplier=nu, budget=budget)
    rate = _rate(p, h ** 2, t, noise_var)
    return WaterfillSolution(
        policy=policy,
        water_level=nu,
        achieved_budget=achieved,
        rate_nats=rate,
        active=tuple(hv for hv, tv in zip(fade.support, t) if tv > 0),
    )


def _lossy_state_alloc(lam, floor_eff, beta1, beta2):
    """Per-state allocation at multiplier lam for the lossy objective.

    The per-state utility 0.5*ln(1 + (beta1*T - beta2)/floor_eff-scaled form)
    is flat on [0, beta2/beta1] then concave, so the candidate set at a given
    lam is {0, interior stationary point}; pick whichever has the larger
    Lagrangian value.
    """
    # interior: beta1*T - beta2 = beta1/(2 lam) - floor_eff  (>= 0 required)
    s = beta1 / (2.0 * lam) - floor_eff
    t_int = np.where(s > 0, (s + beta2) / beta1, 0.0)
    on = s > 0
    util = np.where(on, 0.5 * np.log1p(np.maximum(s, 0.0) / floor_eff), 0.0)
    lagr = util - lam * t_int
    take = on & (lagr > 0)
    return np.where(take, t_int, 0.0)


def waterfill_lossy(fade: DiscreteDist, budget: float, noise_var: float,
                    beta1: float, beta2: float) -> WaterfillSolution:
    """Maximize sum_h p(h)*0.5*ln(1 + h^2 (beta1 T(h) - beta2)^+ / noise_var)
    subject to E[T] <= budget.

    Each state's profile is flat then concave, so the budget curve in the
    multiplier may jump when a state switches off. The bisection brackets the
    budget; the candidate active sets of both bracketing multipliers are then
    re-solved exactly (reduced classical water-filling in the effective
    energy s = beta1*T - beta2) and the best feasible policy is returned.
    """
    if budget <= 0:
        raise ValueError("budget must be > 0")
    if noise_var <= 0:
        raise ValueError("noise_var must be > 0")
    if not 0.0 < beta1 <= 1.0:
        raise ValueError("beta1 must lie in (0, 1]")
    if beta2 < 0:
        raise ValueError("beta2 must be >= 0")
    h = np.asarray(fade.support, dtype=float)
    p = np.asarray(fade.probs, dtype=float)
    pos = h > 0
    if not np.any(pos):
        raise ValueError("all fade gains are zero")
    hp, pp = h[pos], p[pos]
    floor_eff = noise_var / hp ** 2

    def spend(lam):
        return float(np.dot(pp, _lossy_state_alloc(lam, floor_eff, beta1, beta2)))

    # bracket the multiplier: spend decreases in lam
    lam_hi = 0.5 * beta1 * float(np.max(1.0 / floor_eff))  # u'(beta2/beta1) max
    lam_lo = lam_hi
    while spend(lam_lo) < budget and lam_lo > 1e-300:
        lam_lo /= 2.0
    if spend(lam_lo) < budget:
        lam_lo = 0.0  # even free energy cannot fill the budget (cannot happen
        # for finite states: allocation diverges as lam -> 0)
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lam_lo + lam_hi)
        if spend(mid) > budget:
            lam_lo = mid
        else:
            lam_hi = mid
        if lam_hi - lam_lo < _MULT_TOL * max(1.0, lam_hi):
            break

    def active_set(lam):
        t = _lossy_state_alloc(lam, floor_eff, beta1, beta2)
        return tuple(np.nonzero(t > 0)[0])

    candidates = {active_set(lam_lo), active_set(lam_hi), ()}

    best = None  # (rate, t_full, nu, achieved)
    zeros = np.zeros_like(h)
    best = (0.0, zeros, float("inf"), 0.0)
    for idx in candidates:
        if not idx:
            continue
        idx = np.asarray(idx)
        psub = pp[idx]
        # effective-energy budget after paying the beta2 entry fee per state
        b_eff = beta1 * budget - beta2 * float(np.sum(psub))
        if b_eff <= 0:
            continue
        sub = DiscreteDist(tuple(hp[idx]), tuple(psub / float(np.sum(psub))))
        try:
            wf = waterfill(sub, b_eff / float(np.sum(psub)), noise_var)
        except ValueError:
            continue
        s_sub = wf.policy.energies()
        if np.any(s_sub <= 0):
            # a member of the candidate set is not actually profitable here;
            # drop to the sub-solution's own active set next bracket round
            keep = s_sub > 0
            if not np.any(keep):
                continue
        t_sub = (s_sub + beta2) / beta1
        t_full = np.zeros_like(hp)
        t_full[idx] = np.where(s_sub > 0, t_sub, 0.0)
        tt = np.zeros_like(h)
        tt[pos] = t_full
        achieved = float(np.dot(p, tt))
        if achieved > budget + 1e-9:
            continue
        s_full = np.maximum(0.0, beta1 * tt - beta2)
        rate = _rate(p, h ** 2, s_full, noise_var)
        if rate > best[0] + 1e-15:
            best = (rate, tt, wf.water_level, achieved)

    rate, t, nu, achieved = best
    lam = lam_hi if rate > 0 else lam_hi
    policy = PowerPolicy(tuple(zip(fade.support, t)), multiplier=lam, budget=budget)
    return WaterfillSolution(
        policy=policy,
        water_level=nu if rate > 0 else 0.0,
        achieved_budget=achieved,
        rate_nats=rate,
        active=tuple(hv for hv, tv in zip(fade.support, t) if tv > 0),
    )


def hus_threshold(harvest: DiscreteDist, beta1: float, beta2: float) -> float:
    """Largest constant c with beta1*E[(Y-c)^+] >= E[(c-Y)^+] + beta2.

    The left side is nonincreasing and the right side increasing in c, so the
    gap g(c) is strictly decreasing; return its unique root in [0, max Y]
    (0 if no positive c qualifies).
    """
    if not 0.0 < beta1 <= 1.0:
        raise ValueError("beta1 must lie in (0, 1]")
    if beta2 < 0:
        raise ValueError("beta2 must be >= 0")
    y = np.asarray(harvest.support, dtype=float)
    p = np.asarray(harvest.probs, dtype=float)

    def gap(c):
        return (beta1 * float(np.dot(p, np.maximum(y - c, 0.0)))
                - float(np.dot(p, np.maximum(c - y, 0.0))) - beta2)

    if gap(0.0) < 0:
        return 0.0
    hi = float(np.max(y))
    if gap(hi) >= 0:
        return hi
    lo = 0.0
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if gap(mid) >= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < _MULT_TOL:
            break
    return lo
