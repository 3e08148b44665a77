"""Parametric Levy measures and their moment integrals.

A :class:`LevyMeasureSpec` describes the jump measure of the driving
noise.  The operations here compute small/large-jump absolute moments,
the Blumenthal-Getoor index, and the admissibility check (drift
compensation, moment conditions, admissible weight exponents) required
for well-posedness on the whole space.

``math.inf`` is used as a distinguished sentinel for divergent
integrals; it never arises from floating overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

INF = math.inf

#: number of consecutive non-decreasing dyadic shells that flag divergence
_DIVERGENCE_SHELLS = 10


class ConfigurationError(ValueError):
    """Raised for invalid measure or experiment parameters."""


@dataclass(frozen=True)
class JumpLaw:
    """Probability law of a single compound-Poisson jump.

    Supported forms: ``point`` (atom at ``value``), ``two_point``
    (atoms at +-``value``, mass 1/2 each), ``uniform`` on
    [``low``, ``high``], ``symmetric_uniform`` on +-[``low``, ``high``]
    and ``normal`` (centered, std ``std``).
    """

    dist: str
    value: float = 0.0
    low: float = 0.0
    high: float = 1.0
    std: float = 1.0

    _DISTS = ("point", "two_point", "uniform", "symmetric_uniform", "normal")

    def __post_init__(self):
        if self.dist not in self._DISTS:
            raise ConfigurationError(f"unknown jump law {self.dist!r}")
        if self.dist in ("uniform", "symmetric_uniform") and not self.low < self.high:
            raise ConfigurationError("uniform jump law requires low < high")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.dist == "point":
            return np.full(size, self.value)
        if self.dist == "two_point":
            return self.value * rng.choice((-1.0, 1.0), size=size)
        if self.dist == "uniform":
            return rng.uniform(self.low, self.high, size=size)
        if self.dist == "symmetric_uniform":
            mags = rng.uniform(self.low, self.high, size=size)
            return mags * rng.choice((-1.0, 1.0), size=size)
        return rng.normal(0.0, self.std, size=size)

    def abs_moment(self, p: float, lo: float, hi: float) -> float:
        """E[|Z|^p 1_{lo < |Z| <= hi}]."""
        if self.dist == "point":
            return abs(self.value) ** p if lo < abs(self.value) <= hi else 0.0
        if self.dist == "two_point":
            return abs(self.value) ** p if lo < abs(self.value) <= hi else 0.0

        def integrand(z):
            return abs(z) ** p * self._density(z)

        hi_eff = hi if math.isfinite(hi) else max(10.0 * self.std + 10.0, self.high + 1.0, 50.0)
        val = 0.0
        for a, b in ((-hi_eff, -lo), (lo, hi_eff)):
            if a < b:
                val += integrate.quad(integrand, a, b, limit=200)[0]
        return val

    def signed_moment(self, lo: float, hi: float) -> float:
        """E[Z 1_{lo < |Z| <= hi}]."""
        if self.dist in ("two_point", "symmetric_uniform", "normal"):
            return 0.0
        if self.dist == "point":
            return self.value if lo < abs(self.value) <= hi else 0.0
        hi_eff = min(hi, self.high)
        lo_eff = max(lo, self.low)
        if lo_eff >= hi_eff:
            return 0.0
        dens = 1.0 / (self.high - self.low)
        return dens * 0.5 * (hi_eff ** 2 - lo_eff ** 2)

    def tail_prob(self, u: float) -> float:
        """P(|Z| > u)."""
        if self.dist in ("point", "two_point"):
            return 1.0 if abs(self.value) > u else 0.0
        if self.dist == "normal":
            return float(2.0 * special.ndtr(-u / self.std))
        lo, hi = self.low, self.high
        if self.dist == "uniform":
            a = max(lo, min(u, hi))
            below = 0.0
            if lo < 0:
                below = (min(-u, hi) - lo) / (hi - lo) if -u > lo else 0.0
            return (hi - a) / (hi - lo) + below
        # symmetric_uniform: magnitudes uniform on [lo, hi]
        if u >= hi:
            return 0.0
        if u <= lo:
            return 1.0
        return (hi - u) / (hi - lo)

    def _density(self, z: float) -> float:
        if self.dist == "normal":
            return math.exp(-z * z / (2 * self.std ** 2)) / (self.std * math.sqrt(2 * math.pi))
        if self.dist == "uniform":
            return 1.0 / (self.high - self.low) if self.low <= z <= self.high else 0.0
        if self.dist == "symmetric_uniform":
            return (0.5 / (self.high - self.low)) if self.low <= abs(z) <= self.high else 0.0
        raise ConfigurationError("no density for atomic jump law")


@dataclass(frozen=True)
class LevyMeasureSpec:
    """Parametric description of the Levy measure and drift of the noise."""

    kind: str
    b: float = 0.0
    alpha: float = 0.0
    c_plus: float = 1.0
    c_minus: float = 1.0
    lambda_temper: float = 0.0
    shape: float = 0.0
    rate: float = 0.0
    total_mass: float = 0.0
    jump_law: Optional[JumpLaw] = None
    density_fn: Optional[Callable[[float], float]] = field(default=None, compare=False)
    support: tuple = (-INF, INF)

    # -- constructors -------------------------------------------------------

    @classmethod
    def stable(cls, alpha, c_plus=1.0, c_minus=1.0, b=0.0):
        return cls(kind="stable", alpha=alpha, c_plus=c_plus, c_minus=c_minus, b=b)

    @classmethod
    def tempered_stable(cls, alpha, lambda_temper, c_plus=1.0, c_minus=1.0, b=0.0):
        return cls(kind="tempered_stable", alpha=alpha, lambda_temper=lambda_temper,
                   c_plus=c_plus, c_minus=c_minus, b=b)

    @classmethod
    def gamma(cls, shape, rate, b=0.0):
        return cls(kind="gamma", shape=shape, rate=rate, b=b)

    @classmethod
    def compound_poisson(cls, total_mass, jump_law, b=0.0):
        return cls(kind="compound_poisson", total_mass=total_mass, jump_law=jump_law, b=b)

    @classmethod
    def custom(cls, density_fn, support=(-INF, INF), b=0.0):
        return cls(kind="custom", density_fn=density_fn, support=support, b=b)

    @classmethod
    def zero(cls, b=0.0):
        """Null noise (no jumps), useful for homogeneous-solution checks."""
        return cls(kind="compound_poisson", total_mass=0.0,
                   jump_law=JumpLaw("point", value=1.0), b=b)

    def __post_init__(self):
        if self.kind in ("stable", "tempered_stable"):
            if not 0.0 < self.alpha < 2.0:
                raise ConfigurationError("stability index must lie in (0, 2)")
            if self.c_plus < 0 or self.c_minus < 0 or self.c_plus + self.c_minus == 0:
                raise ConfigurationError("need c_plus, c_minus >= 0, not both zero")
            if self.kind == "tempered_stable" and self.lambda_temper <= 0:
                raise ConfigurationError("tempering rate must be positive")
        elif self.kind == "gamma":
            if self.shape <= 0 or self.rate <= 0:
                raise ConfigurationError("gamma measure requires shape, rate > 0")
        elif self.kind == "compound_poisson":
            if self.total_mass < 0:
                raise ConfigurationError("total mass must be nonnegative")
            if self.jump_law is None:
                raise ConfigurationError("compound Poisson requires a jump law")
        elif self.kind == "custom":
            if self.density_fn is None:
                raise ConfigurationError("custom measure requires a density")
            # Levy integrability: integral of (z^2 ^ 1) must be finite.
            if not math.isfinite(_custom_moment(self, 2.0, small_only=True)):
                raise ConfigurationError("density violates the Levy condition near 0")
        else:
            raise ConfigurationError(f"unknown measure kind {self.kind!r}")

    @property
    def symmetric(self) -> bool:
        if self.kind in ("stable", "tempered_stable"):
            return self.c_plus == self.c_minus
        if self.kind == "compound_poisson":
            return self.jump_law.dist in ("two_point", "symmetric_uniform", "normal")
        return False

    @property
    def finite_activity(self) -> bool:
        return self.kind == "compound_poisson"

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind, "b": self.b}
        if self.kind in ("stable", "tempered_stable"):
            out.update(alpha=self.alpha, c_plus=self.c_plus, c_minus=self.c_minus)
            if self.kind == "tempered_stable":
                out["lambda_temper"] = self.lambda_temper
        elif self.kind == "gamma":
            out.update(shape=self.shape, rate=self.rate)
        elif self.kind == "compound_poisson":
            jl = {"dist": self.jump_law.dist}
            if self.jump_law.dist in ("point", "two_point"):
                jl["value"] = self.jump_law.value
            elif self.jump_law.dist in ("uniform", "symmetric_uniform"):
                jl.update(low=self.jump_law.low, high=self.jump_law.high)
            else:
                jl["std"] = self.jump_law.std
            out.update(total_mass=self.total_mass, jump_law=jl)
        else:
            raise ConfigurationError("custom densities are not JSON-serializable")
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "LevyMeasureSpec":
        kind = data.get("kind")
        b = data.get("b", 0.0)
        if kind == "zero":
            return cls.zero(b=b)
        if kind == "stable":
            return cls.stable(data["alpha"], data.get("c_plus", 1.0),
                              data.get("c_minus", 1.0), b)
        if kind == "tempered_stable":
            return cls.tempered_stable(data["alpha"], data["lambda_temper"],
                                       data.get("c_plus", 1.0), data.get("c_minus", 1.0), b)
        if kind == "gamma":
            return cls.gamma(data["shape"], data["rate"], b)
        if kind == "compound_poisson":
            return cls.compound_poisson(data["total_mass"], JumpLaw(**data["jump_law"]), b)
        raise ConfigurationError(f"unknown measure kind {kind!r}")


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the noise admissibility check for the whole-space equation."""

    p: float
    q: float
    small_jump_integral: float
    large_jump_integral: float
    b0: float
    satisfied: bool
    eta_range: Optional[tuple] = None
    reasons: tuple = ()


# ---------------------------------------------------------------------------
# densities and quadrature helpers
# ---------------------------------------------------------------------------

def measure_density(spec: LevyMeasureSpec, z: float) -> float:
    """Pointwise Levy density (kinds with a density only)."""
    az = abs(z)
    if az == 0.0:
        return 0.0
    if spec.kind == "stable":
        c = spec.c_plus if z > 0 else spec.c_minus
        return c * az ** (-spec.alpha - 1.0)
    if spec.kind == "tempered_stable":
        c = spec.c_plus if z > 0 else spec.c_minus
        return c * az ** (-spec.alpha - 1.0) * math.exp(-spec.lambda_temper * az)
    if spec.kind == "gamma":
        return spec.shape * math.exp(-spec.rate * z) / z if z > 0 else 0.0
    if spec.kind == "custom":
        lo, hi = spec.support
        return spec.density_fn(z) if lo <= z <= hi else 0.0
    raise ConfigurationError(f"{spec.kind} has no Lebesgue density")


def _dyadic_diverges(dens: Callable[[float], float], p: float) -> bool:
    """Ratio test on dyadic shells [2^-k-1, 2^-k] approaching the origin."""
    streak = 0
    prev = None
    for k in range(1, 60):
        hi, lo = 2.0 ** -k, 2.0 ** -(k + 1)
        shell = 0.0
        for a, b in ((lo, hi), (-hi, -lo)):
            shell += integrate.quad(lambda z: abs(z) ** p * dens(z), a, b, limit=100)[0]
        if prev is not None and prev > 0:
            streak = streak + 1 if shell >= prev else 0
            if streak >= _DIVERGENCE_SHELLS:
                return True
            if shell < 1e-300:
                return False
        prev = shell
    return False


def _custom_moment(spec, p, small_only=False, large_only=False):
    def dens(z):
        return measure_density(spec, z)

    if p == 2.0 and small_only:
        # Levy condition probe; divergence here means an invalid measure.
        pass
    if small_only:
        if _dyadic_diverges(dens, p):
            return INF
        val = 0.0
        for a, b in ((-1.0, 0.0), (0.0, 1.0)):
            val += integrate.quad(lambda z: abs(z) ** p * dens(z), a, b,
                                  points=[0.0] if a < 0 < b else None, limit=200)[0]
        return val
    lo, hi = spec.support
    val = 0.0
    if hi > 1.0:
        val += integrate.quad(lambda z: abs(z) ** p * dens(z), 1.0, hi, limit=200)[0]
    if lo < -1.0:
        val += integrate.quad(lambda z: abs(z) ** p * dens(z), lo, -1.0, limit=200)[0]
    if not math.isfinite(val):
        return INF
    return val


# ---------------------------------------------------------------------------
# moment operations
# ---------------------------------------------------------------------------

def small_jump_moment(spec: LevyMeasureSpec, p: float) -> float:
    """integral of |z|^p over {|z| <= 1}; math.inf when divergent."""
    if p <= 0:
        raise ConfigurationError("moment exponent must be positive")
    if spec.kind == "stable":
        if p <= spec.alpha:
            return INF
        return (spec.c_plus + spec.c_minus) / (p - spec.alpha)
    if spec.kind == "tempered_stable":
        if p <= spec.alpha:
            return INF
        c = spec.c_plus + spec.c_minus
        val = integrate.quad(
            lambda z: c * z ** (p - spec.alpha - 1.0) * math.exp(-spec.lambda_temper * z),
            0.0, 1.0, limit=200)[0]
        return val
    if spec.kind == "gamma":
        # shape * int_0^1 z^{p-1} e^{-rate z} dz
        return spec.shape * spec.rate ** -p * special.gammainc(p, spec.rate) * special.gamma(p)
    if spec.kind == "compound_poisson":
        return spec.total_mass * spec.jump_law.abs_moment(p, 0.0, 1.0)
    return _custom_moment(spec, p, small_only=True)


def large_jump_moment(spec: LevyMeasureSpec, q: float) -> float:
    """integral of |z|^q over {|z| > 1}; math.inf when divergent."""
    if q <= 0:
        raise ConfigurationError("moment exponent must be positive")
    if spec.kind == "stable":
        if q >= spec.alpha:
            return INF
        return (spec.c_plus + spec.c_minus) / (spec.alpha - q)
    if spec.kind == "tempered_stable":
        c = spec.c_plus + spec.c_minus
        return integrate.quad(
            lambda z: c * z ** (q - spec.alpha - 1.0) * math.exp(-spec.lambda_temper * z),
            1.0, INF, limit=200)[0]
    if spec.kind == "gamma":
        return spec.shape * spec.rate ** -q * special.gammaincc(q, spec.rate) * special.gamma(q)
    if spec.kind == "compound_poisson":
        return spec.total_mass * spec.jump_law.abs_moment(q, 1.0, INF)
    return _custom_moment(spec, q, large_only=True)


def tail_mass(spec: LevyMeasureSpec, u: float) -> float:
    """nu({|z| > u}) for u > 0; math.inf signals infinite activity at u = 0."""
    if u < 0:
        raise ConfigurationError("threshold must be nonnegative")
    if u == 0.0:
        return spec.total_mass if spec.finite_activity else INF
    if spec.kind == "stable":
        return (spec.c_plus + spec.c_minus) * u ** -spec.alpha / spec.alpha
    if spec.kind == "tempered_stable":
        c = spec.c_plus + spec.c_minus
        return integrate.quad(
            lambda z: c * z ** (-spec.alpha - 1.0) * math.exp(-spec.lambda_temper * z),
            u, INF, limit=200)[0]
    if spec.kind == "gamma":
        return spec.shape * float(special.exp1(spec.rate * u))
    if spec.kind == "compound_poisson":
        return spec.total_mass * spec.jump_law.tail_prob(u)
    lo, hi = spec.support
    val = 0.0
    if hi > u:
        val += integrate.quad(lambda z: measure_density(spec, z), u, hi, limit=200)[0]
    if lo < -u:
        val += integrate.quad(lambda z: measure_density(spec, z), lo, -u, limit=200)[0]
    return val


def signed_mass(spec: LevyMeasureSpec, lo: float, hi: float) -> float:
    """integral of z over {lo < |z| <= hi}; exact zero for symmetric measures."""
    if lo >= hi:
        return 0.0
    if spec.symmetric:
        return 0.0
    if spec.kind == "stable":
        a = spec.alpha
        if lo == 0.0 and a >= 1.0:
            raise ConfigurationError("signed small-jump mass diverges for alpha >= 1")
        diff = spec.c_plus - spec.c_minus
        if a == 1.0:
            return diff * math.log(hi / lo)
        return diff * (hi ** (1.0 - a) - lo ** (1.0 - a)) / (1.0 - a)
    if spec.kind == "tempered_stable":
        diff = spec.c_plus - spec.c_minus
        return diff * integrate.quad(
            lambda z: z ** -spec.alpha * math.exp(-spec.lambda_temper * z),
            lo, hi, limit=200)[0]
    if spec.kind == "gamma":
        hi_eff = hi if math.isfinite(hi) else INF
        return spec.shape * integrate.quad(
            lambda z: math.exp(-spec.rate * z), lo, hi_eff, limit=200)[0]
    if spec.kind == "compound_poisson":
        return spec.total_mass * spec.jump_law.signed_moment(lo, hi)
    val = 0.0
    s_lo, s_hi = spec.support
    hi_eff = min(hi, s_hi)
    if lo < hi_eff:
        val += integrate.quad(lambda z: z * measure_density(spec, z), lo, hi_eff, limit=200)[0]
    lo_eff = max(-hi, s_lo)
    if lo_eff < -lo:
        val += integrate.quad(lambda z: z * measure_density(spec, z), lo_eff, -lo, limit=200)[0]
    return val


def blumenthal_getoor_index(spec: LevyMeasureSpec) -> float:
    """inf{p > 0 : small_jump_moment(spec, p) < inf}."""
    if spec.kind in ("stable", "tempered_stable"):
        return spec.alpha
    if spec.kind in ("gamma", "compound_poisson"):
        return 0.0
    lo, hi = 0.0, 2.0
    if math.isfinite(small_jump_moment(spec, 1e-9)):
        return 0.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if math.isfinite(small_jump_moment(spec, mid)):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def check_hypothesis_H(spec: LevyMeasureSpec, d: int, p: float, q: float) -> HypothesisReport:
    """Evaluate the moment and drift conditions for the whole-space equation
    and the admissible weight-exponent interval."""
    if d < 1:
        raise ConfigurationError("dimension must be >= 1")
    reasons = []
    small = small_jump_moment(spec, p)
    large = large_jump_moment(spec, q)
    if not 0.0 < p < 1.0 + 2.0 / d:
        reasons.append(f"p={p} outside (0, 1 + 2/d)")
    q_lower = p / (1.0 + (1.0 + 2.0 / d - p))
    if not q_lower < q <= p:
        reasons.append(f"q={q} outside (p/(1 + (1 + 2/d - p)), p]")
    if not math.isfinite(small):
        reasons.append("small-jump integral infinite")
    if not math.isfinite(large):
        reasons.append("large-jump integral infinite")
    b0 = spec.b
    if math.isfinite(small_jump_moment(spec, 1.0)) or spec.symmetric:
        try:
            b0 = spec.b - signed_mass(spec, 0.0, 1.0)
        except ConfigurationError:
            b0 = INF
    if p < 1.0 and abs(b0) > 1e-12:
        reasons.append("p < 1 requires vanishing compensated drift b0")
    satisfied = not reasons
    eta_range = None
    if satisfied:
        upper = INF if p == q else (2.0 - d * (p - 1.0)) / (p - q)
        eta_range = (d / q, upper)
    return HypothesisReport(p=p, q=q, small_jump_integral=small,
                            large_jump_integral=large, b0=b0,
                            satisfied=satisfied, eta_range=eta_range,
                            reasons=tuple(reasons))
