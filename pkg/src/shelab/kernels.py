"""Heat-kernel engines and related special functions.

Provides the Gaussian kernel on R^d, the Dirichlet Green's function on
[0, pi] via its sine spectral series with an independent method-of-images
oracle, the sup-over-time kernel bound, and Mittag-Leffler functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from shelab._accel import green_image_batch

_MACHINE_TAU = 1e-16


class KernelDomainError(ValueError):
    """Raised when a kernel is queried outside its pointwise domain."""


class SpectralTruncationError(ValueError):
    """Raised when the sine series is asked for a time too small for
    the retained number of modes."""


class NonConvergenceError(ArithmeticError):
    """Raised when a series evaluation cannot reach the requested accuracy."""


@dataclass(frozen=True)
class SpectralTruncation:
    """Number of retained sine modes, with the associated reliable t range."""

    K: int = 100

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("need at least one mode")

    @property
    def t_min(self) -> float:
        """Smallest time at which the truncated series is trusted.

        The series tail after K modes is bounded by
        e^{-K^2 t} / (1 - e^{-(2K+1)t}), which drops below machine
        precision once t > ln(1/tau_machine) / K^2.
        """
        return math.log(1.0 / _MACHINE_TAU) / (self.K * self.K)

    def tail_bound(self, t: float) -> float:
        if t <= 0:
            return math.inf
        return math.exp(-self.K * self.K * t) / -math.expm1(-(2 * self.K + 1) * t)


def heat_kernel(t: float, x, d: int) -> float:
    """Gaussian heat kernel (4 pi t)^{-d/2} exp(-|x|^2 / 4t) 1_{t>=0}."""
    if d < 1:
        raise KernelDomainError("dimension must be >= 1")
    sq = float(np.dot(x, x)) if np.ndim(x) else float(x) * float(x)
    if t < 0.0:
        return 0.0
    if t == 0.0:
        if sq == 0.0:
            raise KernelDomainError("delta atom; not a pointwise value")
        return 0.0
    return (4.0 * math.pi * t) ** (-0.5 * d) * math.exp(-sq / (4.0 * t))


# per-(t, K) memo of the mode decay factors e^{-k^2 t}
_decay_cache: dict = {}


def _decay_factors(t: float, K: int) -> np.ndarray:
    key = (t, K)
    hit = _decay_cache.get(key)
    if hit is None:
        k = np.arange(1, K + 1)
        hit = np.exp(-k.astype(np.float64) ** 2 * t)
        if len(_decay_cache) > 4096:
            _decay_cache.clear()
        _decay_cache[key] = hit
    return hit


def green_interval(t: float, x: float, y: float, trunc: SpectralTruncation = SpectralTruncation()) -> float:
    """Dirichlet Green's function on [0, pi] by the sine spectral series
    (2/pi) sum_k sin(kx) sin(ky) e^{-k^2 t}."""
    if not (0.0 <= x <= math.pi and 0.0 <= y <= math.pi):
        raise KernelDomainError("spatial arguments must lie in [0, pi]")
    if t <= trunc.t_min:
        raise SpectralTruncationError(
            f"spectral truncation unreliable near t=0 (t={t} <= t_min={trunc.t_min:.3g}); "
            "use the image-method engine")
    k = np.arange(1, trunc.K + 1)
    decay = _decay_factors(t, trunc.K)
    return float((2.0 / math.pi) * np.sum(np.sin(k * x) * np.sin(k * y) * decay))


def green_interval_image(t: float, x: float, y: float, terms: int = 10) -> float:
    """Image-method evaluation: sum_k [g(t, x-y-2k pi) - g(t, x+y-2k pi)].

    Independent oracle for :func:`green_interval`; reliable down to t=0+.
    """
    if terms < 1:
        raise ValueError("need at least one image term")
    if t <= 0.0:
        return 0.0
    return float(green_image_batch(np.asarray(t, dtype=float),
                                   np.asarray(x, dtype=float),
                                   np.asarray(y, dtype=float), terms))


def green_auto(t: float, x: float, y: float,
               trunc: SpectralTruncation = SpectralTruncation(),
               terms: int = 10) -> float:
    """Green's function on [0, pi]; spectral series when reliable,
    image method for small t."""
    if t <= 0.0:
        return 0.0
    if t <= trunc.t_min:
        return green_interval_image(t, x, y, terms)
    return green_interval(t, x, y, trunc)


def sup_heat_kernel(T: float, x, d: int) -> float:
    """sup over t in [0, T] of the Gaussian kernel at displacement x.

    The map t -> g(t, x) has its interior maximum at t* = |x|^2 / (2d);
    for T < t* the sup is attained at T, otherwise it equals
    (d / (2 pi e))^{d/2} |x|^{-d}.
    """
    if d < 1:
        raise KernelDomainError("dimension must be >= 1")
    if T <= 0:
        raise KernelDomainError("time horizon must be positive")
    sq = float(np.dot(x, x)) if np.ndim(x) else float(x) * float(x)
    if sq == 0.0:
        raise KernelDomainError("unbounded: kernel blows up at the origin")
    t_star = sq / (2.0 * d)
    if T < t_star:
        return heat_kernel(T, math.sqrt(sq), d)
    return (d / (2.0 * math.pi * math.e)) ** (0.5 * d) * sq ** (-0.5 * d)


def mittag_leffler(alpha: float, beta: float, z: float) -> float:
    """Two-parameter Mittag-Leffler function sum_k z^k / Gamma(alpha k + beta).

    Direct series with term-ratio stopping; terms are formed as
    exp(k ln|z| - ln Gamma(alpha k + beta)) to avoid overflow.
    """
    if alpha <= 0 or beta <= 0:
        raise KernelDomainError("parameters must be positive")
    if abs(z) > 50.0:
        raise NonConvergenceError("argument beyond the overflow guard |z| <= 50")
    total = 1.0 / math.gamma(beta)
    if z == 0.0:
        return total
    log_az = math.log(abs(z))
    sign = 1.0
    for k in range(1, 10000):
        if z < 0:
            sign = -sign
        term = sign * math.exp(k * log_az - math.lgamma(alpha * k + beta))
        total += term
        if abs(term) < _MACHINE_TAU * max(abs(total), 1.0) and alpha * k + beta > 2.0:
            return total
    raise NonConvergenceError("Mittag-Leffler series did not converge")
