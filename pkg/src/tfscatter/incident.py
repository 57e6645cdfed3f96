"""
Gaussian incident packet, its closed-form Fourier transform, and band selection.

The packet is

    g(x, t) = exp(-((t - s)^2/(2 sigma^2) + i omega0 (t - s))) / (sqrt(2 pi) sigma),
    s(x) = x.z0/c + t0,

and with the convention U(omega) = int u(t) e^{i omega t} dt its transform is

    G(x, omega) = e^{i omega s(x)} e^{-sigma^2 (omega - omega0)^2 / 2},

entire in omega, so it continues directly to complex frequencies.
"""

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class WavePacket:
    """Gaussian packet parameters; ``amplitude`` scales the whole field."""

    sigma: float = 1.0
    omega0: float = 6.0
    t0: float = 10.0
    z0: tuple = (1.0, 0.0)
    c: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        if not self.c > 0:
            raise ValueError("wave speed must be positive")
        z = np.asarray(self.z0, dtype=float)
        if z.shape != (2,) or abs(np.linalg.norm(z) - 1) > 1e-14:
            raise ValueError(f"direction must be a unit vector, got {self.z0}")

    def delay(self, x):
        """s(x) = x.z0/c + t0 for complex points or (M, 2) arrays."""
        x = _points(x)
        return (x.real * self.z0[0] + x.imag * self.z0[1]) / self.c + self.t0


@dataclass(frozen=True)
class Band:
    """Frequency band [W1, W2) with 2m+1 equispaced samples."""

    W1: float
    W2: float
    m: int = 0

    def __post_init__(self):
        if not self.W2 > self.W1 > 0:
            raise ValueError(f"band needs W2 > W1 > 0, got [{self.W1}, {self.W2}]")
        if self.m < 0:
            raise ValueError("m must be non-negative")

    @property
    def P(self):
        return self.W2 - self.W1

    @property
    def num_samples(self):
        return 2 * self.m + 1

    def with_m(self, m):
        if m < 1:
            raise ValueError("m must be >= 1")
        return Band(self.W1, self.W2, int(m))

    def frequencies(self):
        """omega_l = W1 + P (l-1)/(2m+1), l = 1..2m+1."""
        n = self.num_samples
        return self.W1 + self.P * np.arange(n) / n


def _points(x):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return x
    x = np.asarray(x, dtype=float)
    if x.ndim == 1 and x.shape[0] == 2:
        return complex(x[0], x[1]) * np.ones(())
    return x[..., 0] + 1j * x[..., 1]


def packet_value(p: WavePacket, x, t):
    """Evaluate g(x, t); broadcasts over points and times."""
    tau = np.asarray(t, dtype=float) - p.delay(x)
    return p.amplitude * np.exp(-(tau ** 2 / (2 * p.sigma ** 2) + 1j * p.omega0 * tau)) / (
        math.sqrt(2 * math.pi) * p.sigma)


def packet_transform(p: WavePacket, x, omega):
    """Closed-form transform e^{i omega s(x)} e^{-sigma^2 (omega - omega0)^2/2}."""
    w = np.asarray(omega, dtype=complex)
    if np.any(w.imag < 0):
        raise ValueError("packet_transform requires Im(omega) >= 0")
    s = p.delay(x)
    return p.amplitude * np.exp(1j * w * s - 0.5 * p.sigma ** 2 * (w - p.omega0) ** 2)


def select_band(p: WavePacket, epsilon_band=math.exp(-18), omega_min=0.5) -> Band:
    """
    Band outside of which the envelope is below ``epsilon_band``.

    W1, W2 = omega0 -/+ sqrt(2 ln(1/eps))/sigma, with W1 clipped at ``omega_min``.
    """
    if not 0 < epsilon_band < 1:
        raise ValueError("epsilon_band must lie in (0, 1)")
    half = math.sqrt(2 * math.log(1 / epsilon_band)) / p.sigma
    W1 = max(p.omega0 - half, omega_min)
    W2 = p.omega0 + half
    if W2 <= W1:
        raise ValueError(f"band collapsed after clipping: [{W1}, {W2}]")
    return Band(W1, W2)


def min_delay(sigma, radius, c=1.0, tol=1e-12):
    """
    Smallest t0 for which |g(x, 0)| <= tol/(sqrt(2 pi) sigma) on the disk |x| <= radius.

    The packet then starts (numerically) at rest, as the initial conditions require.
    """
    return radius / c + sigma * math.sqrt(2 * math.log(1 / tol))
