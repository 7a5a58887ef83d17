"""Mutual-information numerics for the AWGN channel with non-Gaussian inputs.

gaussian_rate        -- 0.5*ln(1 + h^2 P / sigma^2)
peak_capacity_closed -- closed-form peak-power capacity (valid for sqrt(y) <= 1.05)
binary_mi            -- MI of equiprobable antipodal inputs, via output-entropy
                        adaptive quadrature (independent route from the closed form)
mixture_mi           -- MI of a sleep/transmit Gaussian mixture input
kkt_residual         -- diagnostic distance of the output density from the
                        optimality form of the sleep-policy analysis

Everything is in nats; Gauss-Hermite is the default quadrature for smooth
integrands, adaptive scipy.integrate.quad for the mixture entropies.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

__all__ = [
    "QuadratureSpec",
    "PeakValidityError",
    "gaussian_rate",
    "peak_capacity_closed",
    "binary_mi",
    "mixture_mi",
    "mixture_mi_unit_grid",
    "kkt_residual",
    "PEAK_AMPLITUDE_LIMIT",
]

PEAK_AMPLITUDE_LIMIT = 1.05  # closed form valid for sqrt(y) up to this
_LN_2PI_E = float(np.log(2.0 * np.pi * np.e))
_TAIL_SIGMAS = 12.0


class PeakValidityError(ValueError):
    """Peak power outside the closed-form validity range; use binary_mi as a
    documented lower bound instead."""


@dataclass(frozen=True)
class QuadratureSpec:
    node_count: int = 96
    abs_tol: float = 1e-9

    def __post_init__(self):
        if self.node_count < 16 or self.node_count % 2:
            raise ValueError("node_count must be even and >= 16")
        # the convergence check doubles the node count, and numpy's
        # Gauss-Hermite weights overflow somewhere past 370 nodes
        if self.node_count > 180:
            raise ValueError("node_count must be <= 180")


_DEFAULT_QUAD = QuadratureSpec()


@lru_cache(maxsize=32)
def _gh_nodes(n: int):
    t, w = np.polynomial.hermite.hermgauss(n)
    return t, w / np.sqrt(np.pi)


def _std_normal_expect(f, n_nodes: int) -> float:
    """E[f(N)] for N ~ N(0,1) by Gauss-Hermite after x = sqrt(2) t."""
    t, w = _gh_nodes(n_nodes)
    return float(np.dot(w, f(np.sqrt(2.0) * t)))


def _lncosh(u):
    a = np.abs(u)
    return a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0)


def gaussian_rate(h: float, power: float, noise_var: float) -> float:
    """Ergodic-rate integrand for Gaussian signaling at one fade state."""
    if noise_var <= 0:
        raise ValueError("noise_var must be > 0")
    if h < 0 or power < 0:
        raise ValueError("h and power must be >= 0")
    return 0.5 * float(np.log1p(h * h * power / noise_var))


def peak_capacity_closed(y: float, quad: QuadratureSpec = _DEFAULT_QUAD) -> float:
    """Capacity of the unit-noise AWGN channel under peak power y, in nats.

    C(y) = y - E[lncosh(y - sqrt(y) N)], N ~ N(0,1); the optimal input is
    antipodal in this regime, which is why binary_mi is an independent oracle.
    Only valid for sqrt(y) <= 1.05.
    """
    if y < 0:
        raise ValueError("peak power must be >= 0")
    if np.sqrt(y) > PEAK_AMPLITUDE_LIMIT + 1e-12:
        raise PeakValidityError(
            f"sqrt(y)={np.sqrt(y):.6g} exceeds {PEAK_AMPLITUDE_LIMIT}; "
            "the closed form is invalid here -- binary_mi(sqrt(y), 1.0) "
            "gives an achievable lower bound"
        )
    if y == 0:
        return 0.0
    ry = np.sqrt(y)
    val = y - _std_normal_expect(lambda x: _lncosh(y - ry * x), quad.node_count)
    check = y - _std_normal_expect(lambda x: _lncosh(y - ry * x), 2 * quad.node_count)
    if abs(val - check) > quad.abs_tol:
        raise ArithmeticError("quadrature did not converge to abs_tol")
    return max(0.0, float(check))


def binary_mi(amplitude: float, noise_var: float,
              quad: QuadratureSpec = _DEFAULT_QUAD) -> float:
    """I(X;W) for X uniform on {-a, +a}, W = X + N(0, noise_var), in nats.

    Computed as h(W) - 0.5*ln(2 pi e noise_var) with h(W) by adaptive
    quadrature over the two-Gaussian output mixture.
    """
    if noise_var <= 0:
        raise ValueError("noise_var must be > 0")
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    if amplitude == 0:
        return 0.0
    a = float(amplitude)
    s = float(np.sqrt(noise_var))
    norm = 1.0 / np.sqrt(2.0 * np.pi * noise_var)

    def neg_plogp(w):
        q = 0.5 * norm * (np.exp(-0.5 * (w - a) ** 2 / noise_var)
                          + np.exp(-0.5 * (w + a) ** 2 / noise_var))
        out = np.zeros_like(q)
        nz = q > 0
        out[nz] = -q[nz] * np.log(q[nz])
        return out

    lim = a + _TAIL_SIGMAS * s
    h_w, _ = integrate.quad(lambda w: float(neg_plogp(np.array([w]))[0]),
                            -lim, lim, points=[-a, 0.0, a], limit=200,
                            epsabs=quad.abs_tol, epsrel=1e-12)
    mi = h_w - 0.5 * np.log(2.0 * np.pi * np.e * noise_var)
    if mi < -1e-9:
        raise ArithmeticError(f"negative MI {mi} from quadrature")
    return max(0.0, float(mi))


def _mixture_entropy_unit(p_sleep, s2, n_nodes):
    """Differential entropy of p*N(0,1) + (1-p)*N(0,s2), vectorized over s2."""
    s2 = np.atleast_1d(np.asarray(s2, dtype=float))
    t, w = _gh_nodes(n_nodes)
    x = np.sqrt(2.0) * t  # N(0,1) nodes

    def logq(wv, s2v):
        # wv: (..., nodes); s2v broadcastable
        c0 = np.exp(-0.5 * wv ** 2) / np.sqrt(2.0 * np.pi)
        c1 = np.exp(-0.5 * wv ** 2 / s2v) / np.sqrt(2.0 * np.pi * s2v)
        return np.log(p_sleep * c0 + (1.0 - p_sleep) * c1)

    s2col = s2[:, None]
    # E under each mixture component, then mix
    e0 = logq(x[None, :], s2col) @ w                      # W ~ N(0,1)
    e1 = logq(np.sqrt(s2col) * x[None, :], s2col) @ w     # W ~ N(0,s2)
    return -(p_sleep * e0 + (1.0 - p_sleep) * e1)


def mixture_mi(p_sleep: float, awake_var: float, h: float, noise_var: float,
               quad: QuadratureSpec = _DEFAULT_QUAD) -> float:
    """I(X;W) for X = 0 w.p. p_sleep, else Gaussian(0, awake_var), over
    W = h X + N(0, noise_var). Output is a zero-mean two-Gaussian mixture."""
    if not 0.0 <= p_sleep < 1.0:
        raise ValueError("p_sleep must lie in [0, 1)")
    if awake_var < 0 or h < 0:
        raise ValueError("awake_var and h must be >= 0")
    if noise_var <= 0:
        raise ValueError("noise_var must be > 0")
    r = h * h * awake_var / noise_var
    return float(mixture_mi_unit_grid(p_sleep, np.array([r]), quad)[0])


def mixture_mi_unit_grid(p_sleep: float, ratios, quad: QuadratureSpec = _DEFAULT_QUAD):
    """Vectorized MI of the sleep mixture on the normalized channel.

    ratios = h^2 * awake_var / noise_var; MI depends on the inputs only
    through this SNR-like ratio (joint scaling of signal and noise).
    """
    ratios = np.asarray(ratios, dtype=float)
    out = np.zeros_like(ratios)
    nz = ratios > 0
    if np.any(nz):
        hw = _mixture_entropy_unit(p_sleep, 1.0 + ratios[nz], quad.node_count)
        out[nz] = np.maximum(0.0, hw - 0.5 * _LN_2PI_E)
    return out


def kkt_residual(p_sleep: float, awake_var: float, cost_budget: float,
                 alpha: float, h: float, noise_var: float,
                 grid_points: int = 2001) -> float:
    """Sup-norm distance of the induced output density from the optimality
    form k1*exp(-a^2 k2) - (p/(1-p)) * N(a; 0, sigma^2), with the positive
    part inactive. Diagnostic only; small at an optimizer, not a solver.

    k1, k2 are fitted by matching the zeroth and second moments of the
    awake output component plus the sleep back-off term.
    """
    if not 0.0 <= p_sleep < 1.0:
        raise ValueError("p_sleep must lie in [0, 1)")
    if noise_var <= 0:
        raise ValueError("noise_var must be > 0")
    implied = (1.0 - p_sleep) * (awake_var + alpha)
    if cost_budget is not None and abs(implied - cost_budget) > 1e-6 * max(1.0, abs(cost_budget)):
        raise ValueError(
            f"operating point inconsistent: (1-p)(v+alpha)={implied:.9g} "
            f"but cost_budget={cost_budget:.9g}")
    s2 = h * h * awake_var + noise_var
    w = p_sleep / (1.0 - p_sleep)
    # target(a) = N(a;0,s2) + w * N(a;0,noise_var) should be Gaussian-shaped
    m0 = 1.0 + w
    m2 = s2 + w * noise_var
    k2 = m0 / (2.0 * m2)
    k1 = m0 * np.sqrt(k2 / np.pi)
    lim = _TAIL_SIGMAS * np.sqrt(max(s2, noise_var))
    a = np.linspace(-lim, lim, grid_points)
    target = (np.exp(-0.5 * a ** 2 / s2) / np.sqrt(2.0 * np.pi * s2)
              + w * np.exp(-0.5 * a ** 2 / noise_var) / np.sqrt(2.0 * np.pi * noise_var))
    fit = k1 * np.exp(-k2 * a ** 2)
    return float(np.max(np.abs(target - fit)))
