"""Seed-reproducible generators for synthetic benchmark processes.

Variance profiles A1-A4 modulate an error process (a standardized
absolute-value autoregression B1, a long-memory-style linear filter B2,
or plain i.i.d. Gaussians) to produce X_i = mu_i + sigma_i * e_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_BURN_IN = 1000
_TRUNCATION_TOL = 1e-10
_TRUNCATION_CAP = 100_000


@dataclass(frozen=True)
class SigmaProfile:
    """A named standard-deviation sequence sigma_1..sigma_n.

    kind is one of "A1", "A2", "A3", "A4", "constant", "custom".
    """

    kind: str
    n: int
    value: float = 1.0
    custom: tuple = ()

    def materialize(self) -> np.ndarray:
        return sigma_values(self.kind, self.n, value=self.value, custom=self.custom)


def sigma_values(kind: str, n: int, value: float = 1.0, custom=()) -> np.ndarray:
    """Materialize a variance profile as a length-n positive vector.

    A1: 0.2 on the first half (i <= floor(n/2)), 0.6 after.
    A2: 0.2 * (1 + cos^2(i / n^{4/5})).
    A3: 0.2 + 0.1 * log(1 + |i - n/2|).
    A4: 0.3 + phi(i / 60), phi the standard normal density (the divisor 60
        is fixed, independent of n).
    """
    if n < 1:
        raise ValueError(f"profile length must be >= 1, got n={n}")
    i = np.arange(1, n + 1, dtype=float)
    kind_l = kind.lower()
    if kind_l == "a1":
        sig = np.where(i <= n // 2, 0.2, 0.6)
    elif kind_l == "a2":
        sig = 0.2 * (1.0 + np.cos(i / n ** 0.8) ** 2)
    elif kind_l == "a3":
        sig = 0.2 + 0.1 * np.log(1.0 + np.abs(i - n / 2.0))
    elif kind_l == "a4":
        sig = 0.3 + np.exp(-0.5 * (i / 60.0) ** 2) / math.sqrt(2.0 * math.pi)
    elif kind_l == "constant":
        sig = np.full(n, float(value))
    elif kind_l == "custom":
        sig = np.asarray(custom, dtype=float)
        if sig.size != n:
            raise ValueError(f"custom profile has length {sig.size}, expected {n}")
    else:
        raise ValueError(f"unknown sigma profile kind: {kind!r}")
    if np.any(sig <= 0):
        raise ValueError(f"sigma profile {kind!r} contains non-positive values")
    return sig


@dataclass(frozen=True)
class ErrorModel:
    """Stationary unit-variance error process specification.

    kind "b1": eta_i = theta*|eta_{i-1}| + sqrt(1-theta^2)*eps_i,
    standardized by its analytic mean theta*sqrt(2/pi) and variance
    1 - 2*theta^2/pi. kind "b2": causal linear filter with weights
    a_j proportional to (j+1)^{-beta}, renormalized to unit variance.
    kind "iid": standard Gaussians.
    """

    kind: str = "iid"
    theta: float = 0.0
    beta: float = 3.0
    burn_in: int = DEFAULT_BURN_IN
    truncation: int | None = None

    def label(self) -> str:
        k = self.kind.lower()
        if k == "b1":
            return f"b1:{self.theta:g}"
        if k == "b2":
            return f"b2:{self.beta:g}"
        return "iid"

    def generate(self, n: int, seed) -> np.ndarray:
        k = self.kind.lower()
        if k == "b1":
            return gen_b1(n, self.theta, seed, burn_in=self.burn_in)
        if k == "b2":
            return gen_b2(n, self.beta, seed, truncation=self.truncation)
        if k == "iid":
            return np.random.default_rng(seed).standard_normal(n)
        raise ValueError(f"unknown error model kind: {self.kind!r}")


def gen_b1(n: int, theta: float, seed, burn_in: int = DEFAULT_BURN_IN) -> np.ndarray:
    """Standardized absolute-value AR(1) errors, deterministic per seed.

    Starts the recursion at eta_0 = 0 and discards burn_in iterations; the
    recursion forgets its initial condition geometrically.
    """
    if abs(theta) >= 1:
        raise ValueError(f"b1 requires |theta| < 1, got theta={theta}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(burn_in + n)
    if theta == 0.0:
        return eps[burn_in:].copy()
    s = math.sqrt(1.0 - theta * theta)
    eta = np.empty(burn_in + n)
    prev = 0.0
    for t in range(burn_in + n):
        prev = theta * abs(prev) + s * eps[t]
        eta[t] = prev
    mean = theta * math.sqrt(2.0 / math.pi)
    var = 1.0 - 2.0 * theta * theta / math.pi
    return (eta[burn_in:] - mean) / math.sqrt(var)


def b2_weights(beta: float, truncation: int | None = None) -> np.ndarray:
    """Truncated filter weights a_0..a_J with sum of squares exactly 1.

    The default truncation keeps terms until the raw weight (J+1)^{-beta}
    drops below 1e-10 (capped at 1e5 terms), then renormalizes.
    """
    if beta <= 0.5:
        raise ValueError(f"b2 requires beta > 1/2, got beta={beta}")
    if truncation is None:
        trunc = min(int(math.ceil(_TRUNCATION_TOL ** (-1.0 / beta))) , _TRUNCATION_CAP)
    else:
        if truncation < 0:
            raise ValueError(f"truncation must be >= 0, got {truncation}")
        trunc = truncation
    a = (np.arange(trunc + 1, dtype=float) + 1.0) ** (-beta)
    return a / math.sqrt(np.sum(a * a))


def gen_b2(n: int, beta: float, seed, truncation: int | None = None) -> np.ndarray:
    """Causal linear-process errors e_i = sum_j a_j eps_{i-j}.

    Pre-sample innovations (indices 1-J..0) come from the same seeded
    stream, so the output is deterministic per seed.
    """
    a = b2_weights(beta, truncation)
    J = a.size - 1
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(n + J)
    return np.convolve(eps, a, mode="valid")


def b2_long_run_variance(beta: float, truncation: int | None = None) -> float:
    """True long-run variance (sum of weights)^2 of the truncated filter."""
    a = b2_weights(beta, truncation)
    return float(np.sum(a) ** 2)


@dataclass(frozen=True)
class SimModel:
    """Composed model X_i = mu_i + sigma_i * e_i with a fixed seed.

    The mean is either constant (mu) or a one-step shift of size lam
    after index change_at (mu_i = mu + lam * 1{i > change_at}).
    """

    n: int
    sigma: SigmaProfile
    error: ErrorModel = field(default_factory=ErrorModel)
    seed: int = 0
    mu: float = 0.0
    lam: float = 0.0
    change_at: int = 0

    def mean_values(self) -> np.ndarray:
        mu = np.full(self.n, self.mu)
        if self.lam != 0.0:
            mu[self.change_at :] += self.lam
        return mu

    def to_config(self) -> dict:
        return {
            "n": self.n,
            "sigma": self.sigma.kind,
            "sigma_value": self.sigma.value,
            "error": self.error.kind,
            "theta": self.error.theta,
            "beta": self.error.beta,
            "burn_in": self.error.burn_in,
            "seed": self.seed,
            "mu": self.mu,
            "lam": self.lam,
            "change_at": self.change_at,
        }


def generate(model: SimModel) -> np.ndarray:
    """Materialize one series from the model, bit-reproducible per seed."""
    sig = model.sigma.materialize()
    if sig.size != model.n:
        raise ValueError("sigma profile length does not match model n")
    e = model.error.generate(model.n, model.seed)
    return model.mean_values() + sig * e
