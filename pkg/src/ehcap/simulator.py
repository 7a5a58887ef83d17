"""Monte Carlo simulation of the energy-buffer recursions.

Each policy steps the recursion of its architecture exactly:

  store-first (ideal/processing):  E' = E - used + Y
  store-first lossy:               E' = ((E - T) - beta2)^+ + beta1*Y
  use-first-store-surplus:         E' = ((E + beta1(Y-T)^+ - (T-Y)^+)^+ - beta2)^+

The buffer starts empty; statistics are reported over the second half of the
path (burn-in discarded) with full-path values retained alongside. Everything
is deterministic given (scenario, policy, n_steps, seed).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rates as rates_mod
from .allocator import hus_threshold, waterfill, waterfill_lossy
from .infocalc import (PEAK_AMPLITUDE_LIMIT, binary_mi, mixture_mi,
                       peak_capacity_closed)
from .models import Scenario, TrajectoryStats

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is normally present
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

__all__ = [
    "Policy",
    "POLICY_KINDS",
    "simulate",
    "simulate_signaling",
    "replicate",
    "ReplicationSummary",
    "analytic_reference",
]

POLICY_KINDS = (
    "IDEAL_CSIT", "IDEAL_NCSIT",
    "HSU_LOSSY_CSIT", "HSU_LOSSY_NCSIT",
    "HUS", "HU", "PROCESSING", "SLEEP",
)

_ARCH_STORE = 0   # eq. E' = E - used + Y, with optional per-slot alpha
_ARCH_LOSSY = 1   # lossy store-first buffer
_ARCH_USEFIRST = 2  # use-first, store surplus

_TRUNC_EPS = 1e-12


@dataclass(frozen=True)
class Policy:
    """Simulation policy: which recursion to step and what drain to attempt.

    delta is the stabilizing slack subtracted from the sustainable budget;
    p_sleep / awake_var only apply to kind="SLEEP" (awake_var per fade state,
    taken from rates.sleep_optimize when not given explicitly).
    """

    kind: str
    delta: float = 1e-3
    p_sleep: float = 0.0
    awake_var: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind != "HU" and self.delta <= 0:
            raise ValueError("delta must be > 0")
        if not 0.0 <= self.p_sleep < 1.0:
            raise ValueError("p_sleep must lie in [0, 1)")


@njit(cache=True)
def _buffer_path(arch, e0, alpha, beta1, beta2, t_desired, y):
    n = t_desired.size
    t_used = np.empty(n)
    e_path = np.empty(n)
    e = e0
    for k in range(n):
        e_path[k] = e
        if arch == 0:
            if e >= alpha:
                t = min(e - alpha, t_desired[k])
                e = e - alpha - t + y[k]
            else:
                t = 0.0
                e = e + y[k]
        elif arch == 1:
            t = min(e, t_desired[k])
            e = max(e - t - beta2, 0.0) + beta1 * y[k]
        else:
            t = min(e, t_desired[k])
            inner = e + beta1 * max(y[k] - t, 0.0) - max(t - y[k], 0.0)
            e = max(max(inner, 0.0) - beta2, 0.0)
        t_used[k] = t
    return t_used, e_path, e


@njit(cache=True)
def _signaling_path(e0, t_desired, y, x_unit):
    """Clipped Gaussian signaling on the ideal buffer: the codeword symbol is
    sgn(x')*min(sqrt(T)|x'|, sqrt(E)) and the buffer is debited the actual
    symbol energy."""
    n = t_desired.size
    t_used = np.empty(n)
    e_path = np.empty(n)
    energy = np.empty(n)
    clipped = np.zeros(n, dtype=np.uint8)
    e = e0
    for k in range(n):
        e_path[k] = e
        t = min(e, t_desired[k])
        want = t * x_unit[k] * x_unit[k]
        if want > e:
            clipped[k] = 1
            used = e
        else:
            used = want
        e = e - used + y[k]
        t_used[k] = t
        energy[k] = used
    return t_used, e_path, energy, clipped, e


@njit(cache=True)
def _sleep_path(e0, alpha, p_sleep, v_per_step, y, coin, x_unit):
    """Randomized sleep policy: a sleep coin is drawn only when the buffer can
    cover the processing cost; otherwise the node is forced asleep."""
    n = y.size
    used = np.empty(n)
    e_path = np.empty(n)
    forced = np.zeros(n, dtype=np.uint8)
    clipped = np.zeros(n, dtype=np.uint8)
    e = e0
    for k in range(n):
        e_path[k] = e
        u = 0.0
        if e < alpha:
            forced[k] = 1
        elif coin[k] >= p_sleep:
            v = v_per_step[k]
            amp2 = v * x_unit[k] * x_unit[k]
            cap = e - alpha
            if amp2 > cap:
                amp2 = cap
                clipped[k] = 1
            u = alpha + amp2
        e = e - u + y[k]
        used[k] = u
    return used, e_path, forced, clipped, e


def _desired_per_state(scenario: Scenario, policy: Policy) -> np.ndarray:
    """Per-fade-state desired drain T'(h), slack already applied."""
    sc = scenario
    ey = sc.harvest.mean
    d = policy.delta
    n = sc.fade.n
    kind = policy.kind
    if kind == "IDEAL_CSIT":
        budget = ey - d
        if budget <= 0:
            return np.zeros(n)
        wf = waterfill(sc.fade, budget, sc.noise_var)
        return wf.policy.energies()
    if kind == "IDEAL_NCSIT":
        return np.full(n, max(0.0, ey - d))
    if kind == "HSU_LOSSY_NCSIT":
        # the buffer is fed beta1*Y and leaks beta2 every slot, so the
        # sustainable withdrawal (= transmit energy) is beta1*E[Y] - beta2
        return np.full(n, max(0.0, sc.beta1 * ey - sc.beta2 - d))
    if kind == "HSU_LOSSY_CSIT":
        budget = ey - d / max(sc.beta1, 1e-12)
        if budget <= 0:
            return np.zeros(n)
        wf = waterfill_lossy(sc.fade, budget, sc.noise_var, sc.beta1, sc.beta2)
        eff = np.maximum(0.0, sc.beta1 * wf.policy.energies() - sc.beta2)
        # withdrawal = effective transmit energy; shrink if the per-slot leak
        # plus drain would not leave negative drift
        drain = float(np.dot(sc.fade.probs, eff)) + sc.beta2
        supply = sc.beta1 * ey
        if drain >= supply and drain > 0:
            eff *= max(0.0, (supply - d - sc.beta2)) / (drain - sc.beta2)
        return eff
    if kind == "HUS":
        c = hus_threshold(sc.harvest, sc.beta1, sc.beta2)
        budget = c - d
        if budget <= 0:
            return np.zeros(n)
        if sc.csit == "perfect":
            return waterfill(sc.fade, budget, sc.noise_var).policy.energies()
        return np.full(n, budget)
    if kind == "PROCESSING":
        budget = ey - sc.alpha - d
        if budget <= 0:
            return np.zeros(n)
        if sc.csit == "perfect":
            return waterfill(sc.fade, budget, sc.noise_var).policy.energies()
        return np.full(n, budget)
    raise ValueError(f"no per-state drain for policy {kind}")


def _arch_code(policy: Policy) -> int:
    if policy.kind in ("IDEAL_CSIT", "IDEAL_NCSIT", "PROCESSING"):
        return _ARCH_STORE
    if policy.kind in ("HSU_LOSSY_CSIT", "HSU_LOSSY_NCSIT"):
        return _ARCH_LOSSY
    if policy.kind == "HUS":
        return _ARCH_USEFIRST
    raise ValueError(f"no buffer recursion for policy {policy.kind}")


def _hu_cell_rates(scenario: Scenario) -> np.ndarray:
    """Per-(harvest, fade) MI table for the bufferless policy."""
    sc = scenario
    out = np.zeros((sc.harvest.n, sc.fade.n))
    for i, y in enumerate(sc.harvest.support):
        for j, h in enumerate(sc.fade.support):
            if y == 0 or h == 0:
                continue
            if sc.csit == "perfect":
                y_eff = y * h * h / sc.noise_var
                if np.sqrt(y_eff) <= PEAK_AMPLITUDE_LIMIT + 1e-12:
                    out[i, j] = peak_capacity_closed(y_eff)
                    continue
            out[i, j] = binary_mi(np.sqrt(y), sc.noise_var / (h * h))
    return out


def _stats(n_steps, rate_terms, used, trunc, e_path, e_final,
           clipped=None) -> TrajectoryStats:
    half = n_steps // 2
    sl = slice(half, None)
    k = np.arange(half, n_steps, dtype=float)
    e2 = e_path[sl]
    slope = float(np.polyfit(k, e2, 1)[0]) if len(e2) > 1 else 0.0
    return TrajectoryStats(
        n_steps=n_steps,
        empirical_rate_nats=float(np.mean(rate_terms[sl])),
        mean_used_energy=float(np.mean(used[sl])),
        truncation_fraction=float(np.mean(trunc[sl])),
        final_buffer=float(e_final),
        buffer_slope=slope,
        full_empirical_rate_nats=float(np.mean(rate_terms)),
        full_truncation_fraction=float(np.mean(trunc)),
        clip_fraction=None if clipped is None else float(np.mean(clipped[sl])),
    )


def _write_trace(path, y, h, e_path, t_used, clipped):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "Y", "H", "E", "T", "clipped"])
        for k in range(len(y)):
            w.writerow([k, repr(float(y[k])), repr(float(h[k])),
                        repr(float(e_path[k])), repr(float(t_used[k])),
                        int(clipped[k]) if clipped is not None else 0])


def simulate(scenario: Scenario, policy: Policy, n_steps: int, seed: int,
             e0: float = 0.0, trace_path=None) -> TrajectoryStats:
    """Step the buffer recursion for n_steps slots from an empty buffer.

    The per-step rate accumulator matches the architecture's analytic rate
    formula, so the empirical rate converges to the module-rates value for
    the slack-adjusted budget.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    sc = scenario
    rng = np.random.default_rng(seed)
    h_idx = sc.fade.sample_indices(rng, n_steps)
    y_idx = sc.harvest.sample_indices(rng, n_steps)
    h = np.asarray(sc.fade.support)[h_idx]
    y = np.asarray(sc.harvest.support)[y_idx]
    g = h * h / sc.noise_var

    if policy.kind == "HU":
        t_used = y.copy()
        cell = _hu_cell_rates(sc)
        terms = cell[y_idx, h_idx]
        e_path = np.zeros(n_steps)
        stats = _stats(n_steps, terms, t_used, np.zeros(n_steps), e_path, 0.0)
        if trace_path:
            _write_trace(trace_path, y, h, e_path, t_used, None)
        return stats

    if policy.kind == "SLEEP":
        if policy.awake_var is not None:
            v_state = np.asarray(policy.awake_var, dtype=float)
            p_sleep = policy.p_sleep
        else:
            rep = rates_mod.sleep_optimize(sc)
            v_state = np.asarray(rep.rate.diagnostics["awake_var"])
            p_sleep = rep.rate.diagnostics["p_opt"]
        coin = rng.random(n_steps)
        x_unit = rng.standard_normal(n_steps)
        used, e_path, forced, clipped, e_final = _sleep_path(
            float(e0), sc.alpha, p_sleep, v_state[h_idx], y, coin, x_unit)
        mi_state = np.array([
            mixture_mi(p_sleep, v, hv, sc.noise_var) if v > 0 else 0.0
            for hv, v in zip(sc.fade.support, v_state)])
        terms = mi_state[h_idx]
        trunc = (forced | clipped).astype(float)
        stats = _stats(n_steps, terms, used, trunc, e_path, e_final, clipped)
        if trace_path:
            _write_trace(trace_path, y, h, e_path, used, clipped)
        return stats

    t_state = _desired_per_state(sc, policy)
    t_desired = t_state[h_idx]
    arch = _arch_code(policy)
    alpha = sc.alpha if policy.kind == "PROCESSING" else 0.0
    t_used, e_path, e_final = _buffer_path(
        arch, float(e0), alpha, sc.beta1, sc.beta2, t_desired, y)
    terms = 0.5 * np.log1p(g * t_used)
    trunc = (t_used < t_desired - _TRUNC_EPS).astype(float)
    stats = _stats(n_steps, terms, t_used, trunc, e_path, e_final)
    if trace_path:
        _write_trace(trace_path, y, h, e_path, t_used, None)
    return stats


def simulate_signaling(scenario: Scenario, policy: Policy, n_steps: int,
                       seed: int, e0: float = 0.0,
                       trace_path=None) -> TrajectoryStats:
    """Like simulate, but draws the actual clipped Gaussian codeword symbols
    and debits the buffer by the realized symbol energy. Supported for the
    ideal store-first policies, where the clipping construction is defined."""
    if policy.kind not in ("IDEAL_CSIT", "IDEAL_NCSIT"):
        raise ValueError("signaling simulation supports IDEAL_CSIT/IDEAL_NCSIT only")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    sc = scenario
    rng = np.random.default_rng(seed)
    h_idx = sc.fade.sample_indices(rng, n_steps)
    y_idx = sc.harvest.sample_indices(rng, n_steps)
    h = np.asarray(sc.fade.support)[h_idx]
    y = np.asarray(sc.harvest.support)[y_idx]
    x_unit = rng.standard_normal(n_steps)
    # delta = 0 is allowed here on purpose: the null-recurrent boundary case
    # is an object of study for the clipping statistics
    ey = sc.harvest.mean
    if policy.kind == "IDEAL_CSIT":
        budget = ey - policy.delta
        t_state = (waterfill(sc.fade, budget, sc.noise_var).policy.energies()
                   if budget > 0 else np.zeros(sc.fade.n))
        t_desired = t_state[h_idx]
    else:
        t_desired = np.full(n_steps, max(0.0, ey - policy.delta))
    t_used, e_path, energy, clipped, e_final = _signaling_path(
        float(e0), t_desired, y, x_unit)
    g = h * h / sc.noise_var
    terms = 0.5 * np.log1p(g * t_used)
    trunc = (t_used < t_desired - _TRUNC_EPS).astype(float)
    stats = _stats(n_steps, terms, energy, trunc, e_path, e_final, clipped)
    if trace_path:
        _write_trace(trace_path, y, h, e_path, t_used, clipped)
    return stats


@dataclass(frozen=True)
class ReplicationSummary:
    n_reps: int
    n_steps: int
    rates: tuple
    mean_rate: float
    ci_low: float
    ci_high: float
    mean_truncation: float
    mean_slope: float

    @property
    def ci_halfwidth(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


def replicate(scenario: Scenario, policy: Policy, n_steps: int, n_reps: int,
              base_seed: int, jobs: int = 1,
              signaling: bool = False) -> ReplicationSummary:
    """Independent seeded replications with a normal-approximation 95% CI.

    Seeds derive deterministically from base_seed via SeedSequence.spawn, so
    the aggregate is reproducible regardless of worker scheduling.
    """
    if n_reps < 2:
        raise ValueError("n_reps must be >= 2")
    seeds = [s.generate_state(1)[0] for s in
             np.random.SeedSequence(base_seed).spawn(n_reps)]
    run = simulate_signaling if signaling else simulate
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            stats = list(pool.map(_replicate_one,
                                  [(scenario, policy, n_steps, int(s), signaling)
                                   for s in seeds]))
    else:
        stats = [run(scenario, policy, n_steps, int(s)) for s in seeds]
    r = np.array([s.empirical_rate_nats for s in stats])
    mean = float(np.mean(r))
    sem = float(np.std(r, ddof=1) / np.sqrt(n_reps))
    return ReplicationSummary(
        n_reps=n_reps,
        n_steps=n_steps,
        rates=tuple(float(x) for x in r),
        mean_rate=mean,
        ci_low=mean - 1.96 * sem,
        ci_high=mean + 1.96 * sem,
        mean_truncation=float(np.mean([s.truncation_fraction for s in stats])),
        mean_slope=float(np.mean([s.buffer_slope for s in stats])),
    )


def _replicate_one(args):
    scenario, policy, n_steps, seed, signaling = args
    run = simulate_signaling if signaling else simulate
    return run(scenario, policy, n_steps, seed)


def analytic_reference(scenario: Scenario, policy: Policy) -> float:
    """Slack-adjusted analytic rate the simulated policy should converge to."""
    sc = scenario
    probs = np.asarray(sc.fade.probs)
    h2 = np.asarray(sc.fade.support) ** 2
    if policy.kind == "HU":
        cell = _hu_cell_rates(sc)
        py = np.asarray(sc.harvest.probs)
        ph = np.asarray(sc.fade.probs)
        return float(py @ cell @ ph)
    if policy.kind == "SLEEP":
        rep = rates_mod.sleep_optimize(sc)
        return rep.rate.rate_nats
    t_state = _desired_per_state(sc, policy)
    return float(np.dot(probs, 0.5 * np.log1p(h2 * t_state / sc.noise_var)))
