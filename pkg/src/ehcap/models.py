"""Value types shared by every other module: distributions, scenarios,
power policies and result containers.

All types are immutable after construction and therefore safe to share
across worker processes. Randomness always flows through an explicit
numpy Generator owned by the caller.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict, replace
from typing import Optional

import numpy as np

__all__ = [
    "DistributionError",
    "ScenarioError",
    "DiscreteDist",
    "Scenario",
    "PowerPolicy",
    "RateResult",
    "TrajectoryStats",
    "validate",
    "sample",
    "scenario_to_dict",
    "scenario_from_dict",
    "save_scenario",
    "load_scenario",
    "NATS_PER_BIT",
]

NATS_PER_BIT = float(np.log(2.0))

ARCHITECTURES = ("HU", "HSU", "HUS")
CSIT_MODES = ("perfect", "none")

_PROB_TOL = 1e-12


class DistributionError(ValueError):
    """Raised when a discrete distribution violates its invariants."""


class ScenarioError(ValueError):
    """Raised when a scenario violates its invariants."""


@dataclass(frozen=True)
class DiscreteDist:
    """Finite discrete probability distribution on nonnegative reals.

    Support values must be strictly increasing and probabilities must be
    positive and sum to one (within 1e-12). Distributions that do not
    normalize are rejected, never silently rescaled.
    """

    support: tuple
    probs: tuple

    def __post_init__(self):
        support = tuple(float(v) for v in self.support)
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)
        if len(support) != len(probs):
            raise DistributionError("support and probs must have equal length")
        if len(support) < 1:
            raise DistributionError("distribution needs at least one point")
        if any(p <= 0 for p in probs):
            raise DistributionError("all probabilities must be > 0")
        total = float(np.sum(probs))
        if abs(total - 1.0) > _PROB_TOL:
            raise DistributionError(
                f"probabilities sum to {total!r}, not 1 (tolerance {_PROB_TOL})"
            )
        if any(b <= a for a, b in zip(support, support[1:])):
            raise DistributionError("support values must be strictly increasing")
        if support[0] < 0:
            raise DistributionError("support values must be >= 0")

    @property
    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    @property
    def n(self) -> int:
        return len(self.support)

    def sample_indices(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(self.n, size=size, p=np.asarray(self.probs))

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        if size is None:
            return float(self.support[int(rng.choice(self.n, p=np.asarray(self.probs)))])
        idx = self.sample_indices(rng, size)
        return np.asarray(self.support)[idx]


def sample(dist: DiscreteDist, rng: np.random.Generator, size: Optional[int] = None):
    """Draw from `dist` using the caller's generator (same seed, same stream)."""
    return dist.sample(rng, size)


@dataclass(frozen=True)
class Scenario:
    """Full system description for one energy-harvesting link.

    harvest   : distribution of harvested energy per channel use
    fade      : distribution of the channel amplitude gain
    noise_var : receiver noise variance
    beta1     : storage efficiency in [0, 1]
    beta2     : per-slot buffer leakage >= 0
    alpha     : mean processing/sensing energy per awake slot >= 0
    arch      : buffer architecture, one of HU / HSU / HUS
    csit      : "perfect" or "none" channel knowledge at the transmitter
    """

    harvest: DiscreteDist
    fade: DiscreteDist
    noise_var: float = 1.0
    beta1: float = 1.0
    beta2: float = 0.0
    alpha: float = 0.0
    arch: str = "HSU"
    csit: str = "perfect"
    sleep_enabled: bool = False

    def __post_init__(self):
        if not isinstance(self.harvest, DiscreteDist):
            object.__setattr__(self, "harvest", DiscreteDist(*self.harvest))
        if not isinstance(self.fade, DiscreteDist):
            object.__setattr__(self, "fade", DiscreteDist(*self.fade))
        if self.noise_var <= 0:
            raise ScenarioError("noise_var must be > 0")
        if not 0.0 <= self.beta1 <= 1.0:
            raise ScenarioError("beta1 must lie in [0, 1]")
        if self.beta2 < 0:
            raise ScenarioError("beta2 must be >= 0")
        if self.alpha < 0:
            raise ScenarioError("alpha must be >= 0")
        if self.arch not in ARCHITECTURES:
            raise ScenarioError(f"arch must be one of {ARCHITECTURES}")
        if self.csit not in CSIT_MODES:
            raise ScenarioError(f"csit must be one of {CSIT_MODES}")

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)


def validate(scenario: Scenario) -> Scenario:
    """Return the scenario iff every invariant holds (construction validates)."""
    if not isinstance(scenario, Scenario):
        raise ScenarioError("not a Scenario")
    # Re-run the checks so externally mutated objects cannot sneak through.
    Scenario(
        harvest=scenario.harvest,
        fade=scenario.fade,
        noise_var=scenario.noise_var,
        beta1=scenario.beta1,
        beta2=scenario.beta2,
        alpha=scenario.alpha,
        arch=scenario.arch,
        csit=scenario.csit,
        sleep_enabled=scenario.sleep_enabled,
    )
    return scenario


@dataclass(frozen=True)
class PowerPolicy:
    """Map from fade state to transmit energy, plus the multiplier that
    generated it and the average-energy budget it was solved against."""

    per_state: tuple  # ((fade_value, energy), ...) in fade-support order
    multiplier: float
    budget: float

    def __post_init__(self):
        per_state = tuple((float(h), float(t)) for h, t in self.per_state)
        object.__setattr__(self, "per_state", per_state)
        if any(t < 0 for _, t in per_state):
            raise ValueError("allocated energies must be >= 0")

    def energy(self, h: float) -> float:
        for hv, t in self.per_state:
            if hv == h:
                return t
        raise KeyError(f"no allocation for fade state {h!r}")

    def energies(self) -> np.ndarray:
        return np.array([t for _, t in self.per_state])

    def expected_energy(self, fade: DiscreteDist) -> float:
        return float(np.dot(fade.probs, self.energies()))


@dataclass(frozen=True)
class RateResult:
    """Achievable rate in nats per channel use plus solver diagnostics."""

    rate_nats: float
    policy: Optional[PowerPolicy] = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rate_nats < 0:
            raise ValueError("rate_nats must be >= 0")

    @property
    def rate_bits(self) -> float:
        return self.rate_nats / NATS_PER_BIT


@dataclass(frozen=True)
class TrajectoryStats:
    """Empirical summary of one simulated buffer path.

    Primary statistics are taken over the second half of the path
    (burn-in discarded); the full-path equivalents are kept alongside.
    """

    n_steps: int
    empirical_rate_nats: float
    mean_used_energy: float
    truncation_fraction: float
    final_buffer: float
    buffer_slope: float
    full_empirical_rate_nats: float = 0.0
    full_truncation_fraction: float = 0.0
    clip_fraction: Optional[float] = None

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not 0.0 <= self.truncation_fraction <= 1.0:
            raise ValueError("truncation_fraction must lie in [0, 1]")


# ---------------------------------------------------------------------------
# Scenario file format: plain JSON mirroring the Scenario fields.
# ---------------------------------------------------------------------------

def scenario_to_dict(scenario: Scenario) -> dict:
    d = asdict(scenario)
    d["harvest"] = {"support": list(scenario.harvest.support),
                    "probs": list(scenario.harvest.probs)}
    d["fade"] = {"support": list(scenario.fade.support),
                 "probs": list(scenario.fade.probs)}
    return d


def scenario_from_dict(d: dict) -> Scenario:
    try:
        harvest = DiscreteDist(tuple(d["harvest"]["support"]),
                               tuple(d["harvest"]["probs"]))
        fade = DiscreteDist(tuple(d["fade"]["support"]),
                            tuple(d["fade"]["probs"]))
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"malformed scenario dict: {exc}") from exc
    return Scenario(
        harvest=harvest,
        fade=fade,
        noise_var=float(d.get("noise_var", 1.0)),
        beta1=float(d.get("beta1", 1.0)),
        beta2=float(d.get("beta2", 0.0)),
        alpha=float(d.get("alpha", 0.0)),
        arch=str(d.get("arch", "HSU")),
        csit=str(d.get("csit", "perfect")),
        sleep_enabled=bool(d.get("sleep_enabled", False)),
    )


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    if not text.strip():
        raise ScenarioError(f"{path}: empty scenario file")
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(d, dict):
        raise ScenarioError(f"{path}: top level must be a JSON object")
    return scenario_from_dict(d)
