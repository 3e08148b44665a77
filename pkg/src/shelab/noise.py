"""Simulation of the driving jump noise.

Samples the Poisson random measure of jump points on [0, T] x D x R,
represents the noise as uncompensated jumps plus exact compensating
drift, and provides the two families of stopping times (fixed and
position-weighted thresholds) together with jump truncation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import integrate

from shelab.levy import (ConfigurationError, LevyMeasureSpec, measure_density,
                         signed_mass, tail_mass)


# ---------------------------------------------------------------------------
# deterministic seed streams
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> int:
    """One step of the splitmix64 mixer (public-domain constants)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, module_tag: str, replica_index: int) -> int:
    """64-bit per-replica stream seed.

    Chains splitmix64 over the master seed, a stable hash of the module
    tag, and the replica index, so streams are reproducible and
    independent of thread scheduling.
    """
    s = _splitmix64(master_seed & _MASK64)
    for ch in module_tag.encode():
        s = _splitmix64(s ^ ch)
    return _splitmix64(s ^ (replica_index & _MASK64))


def make_rng(master_seed: int, module_tag: str, replica_index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, module_tag, replica_index)))


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimRegion:
    """Space-time simulation region: [0, T] x D.

    D is either the interval (0, pi) with absorbing boundary, or the
    box [-A, A]^d standing in for the whole space.
    """

    T: float
    domain: str  # "interval" | "box"
    d: int = 1
    half_width: float = 0.0

    def __post_init__(self):
        if self.T <= 0:
            raise ConfigurationError("time horizon must be positive")
        if self.domain == "interval":
            if self.d != 1:
                raise ConfigurationError("the interval domain is one-dimensional")
        elif self.domain == "box":
            if self.half_width <= 0:
                raise ConfigurationError("box half-width must be positive")
            if self.d < 1:
                raise ConfigurationError("dimension must be >= 1")
        else:
            raise ConfigurationError(f"unknown domain {self.domain!r}")

    @property
    def volume(self) -> float:
        if self.domain == "interval":
            return math.pi
        return (2.0 * self.half_width) ** self.d

    def to_json_dict(self) -> dict:
        out = {"T": self.T, "domain": self.domain, "d": self.d}
        if self.domain == "box":
            out["half_width"] = self.half_width
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "SimRegion":
        return cls(T=data["T"], domain=data["domain"], d=data.get("d", 1),
                   half_width=data.get("half_width", 0.0))


@dataclass(frozen=True)
class LargeCutoff:
    """Large-jump truncation descriptor: fixed |z| > N, or position
    weighted |z| > N (1 + |x|^eta)."""

    kind: str = "fixed"  # "fixed" | "weighted"
    N: float = 1.0
    eta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("fixed", "weighted"):
            raise ConfigurationError(f"unknown cutoff kind {self.kind!r}")
        if self.kind == "weighted" and self.eta <= 0:
            raise ConfigurationError("weighted cutoff requires eta > 0")

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind, "N": self.N}
        if self.kind == "weighted":
            out["eta"] = self.eta
        return out


@dataclass(frozen=True, eq=False)
class PointMeasure:
    """Finite realized jump set {(t_i, x_i, z_i)}, sorted by time.

    ``b_eps`` is the exact drift reproducing the compensation of the
    removed small jumps (magnitudes in (eps, 1] only).
    """

    t: np.ndarray          # (n,)
    x: np.ndarray          # (n, d)
    z: np.ndarray          # (n,)
    small_cutoff: float
    large_cutoff: LargeCutoff
    b_eps: float
    seed: int
    region: SimRegion

    def __post_init__(self):
        if not (self.t.shape[0] == self.x.shape[0] == self.z.shape[0]):
            raise ConfigurationError("jump arrays must share their length")
        if np.any(np.diff(self.t) <= 0.0) if self.t.size > 1 else False:
            raise ConfigurationError("jump times must be strictly increasing")

    def __len__(self) -> int:
        return int(self.t.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointMeasure):
            return NotImplemented
        return (np.array_equal(self.t, other.t) and np.array_equal(self.x, other.x)
                and np.array_equal(self.z, other.z)
                and self.small_cutoff == other.small_cutoff
                and self.large_cutoff == other.large_cutoff
                and self.b_eps == other.b_eps and self.seed == other.seed
                and self.region == other.region)

    # -- serialization ------------------------------------------------------

    def to_csv(self) -> str:
        d = self.x.shape[1] if self.x.ndim == 2 else 1
        header = "t," + ",".join(f"x{a + 1}" for a in range(d)) + ",z"
        lines = [header]
        xs = self.x.reshape(len(self), d)
        for i in range(len(self)):
            cols = [self.t[i]] + list(xs[i]) + [self.z[i]]
            lines.append(",".join("%.17g" % c for c in cols))
        return "\n".join(lines) + "\n"

    def sidecar(self) -> dict:
        return {"small_cutoff": self.small_cutoff,
                "large_cutoff": self.large_cutoff.to_json_dict(),
                "b_eps": self.b_eps, "seed": self.seed,
                "region": self.region.to_json_dict(), "n_jumps": len(self)}

    def save(self, csv_path, sidecar_path) -> None:
        with open(csv_path, "w") as fh:
            fh.write(self.to_csv())
        with open(sidecar_path, "w") as fh:
            json.dump(self.sidecar(), fh, indent=2, sort_keys=True)


@dataclass(frozen=True)
class StoppingTimeResult:
    tau: float  # math.inf when never triggered
    triggering_jump: Optional[int] = None


# ---------------------------------------------------------------------------
# mark samplers: law of |z| (and sign) conditioned on |z| > eps
# ---------------------------------------------------------------------------

def _sample_marks(spec: LevyMeasureSpec, eps: float, n: int,
                  rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.empty(0)
    if spec.kind == "stable":
        mags = eps * rng.uniform(size=n) ** (-1.0 / spec.alpha)
        signs = np.where(rng.uniform(size=n) < spec.c_plus / (spec.c_plus + spec.c_minus), 1.0, -1.0)
        return mags * signs
    if spec.kind == "tempered_stable":
        out = np.empty(n)
        filled = 0
        while filled < n:
            m = max(2 * (n - filled), 64)
            mags = eps * rng.uniform(size=m) ** (-1.0 / spec.alpha)
            keep = rng.uniform(size=m) < np.exp(-spec.lambda_temper * (mags - eps))
            take = mags[keep][: n - filled]
            out[filled:filled + take.size] = take
            filled += take.size
        signs = np.where(rng.uniform(size=n) < spec.c_plus / (spec.c_plus + spec.c_minus), 1.0, -1.0)
        return out * signs
    if spec.kind == "gamma":
        out = np.empty(n)
        filled = 0
        while filled < n:
            m = max(2 * (n - filled), 64)
            prop = eps + rng.exponential(1.0 / spec.rate, size=m)
            keep = rng.uniform(size=m) < eps / prop
            take = prop[keep][: n - filled]
            out[filled:filled + take.size] = take
            filled += take.size
        return out
    if spec.kind == "compound_poisson":
        out = np.empty(n)
        filled = 0
        while filled < n:
            m = max(2 * (n - filled), 64)
            prop = spec.jump_law.sample(rng, m)
            take = prop[np.abs(prop) > eps][: n - filled]
            out[filled:filled + take.size] = take
            filled += take.size
        return out
    # custom density: tabulated inverse-CDF on the truncated support
    return _sample_custom(spec, eps, n, rng)


def _sample_custom(spec, eps, n, rng, grid_points=4096):
    lo, hi = spec.support
    hi = min(hi, 1e6)
    lo = max(lo, -1e6)
    # log-spaced magnitudes: the density is typically singular at the
    # cutoff, and a linear grid up to a large support bound cannot
    # resolve the mass concentrated just above eps
    eps_eff = max(eps, 1e-12)
    pieces = []
    if hi > eps_eff:
        pieces.append(np.geomspace(eps_eff, hi, grid_points))
    if lo < -eps_eff:
        pieces.append(-np.geomspace(eps_eff, -lo, grid_points))
    if not pieces:
        raise ConfigurationError("custom density has no mass beyond the cutoff")
    # per-side CDFs, accumulated in ascending z order, so no mass is
    # attributed to the excluded gap (-eps, eps)
    pieces = sorted((np.sort(p) for p in pieces), key=lambda p: p[0])
    zs_all, cdf_all = [], []
    offset = 0.0
    for zs in pieces:
        dens = np.array([measure_density(spec, float(v)) for v in zs])
        cdf = integrate.cumulative_trapezoid(dens, zs, initial=0.0) + offset
        offset = cdf[-1]
        zs_all.append(zs)
        cdf_all.append(cdf)
    if offset <= 0:
        raise ConfigurationError("custom density has no mass beyond the cutoff")
    zs = np.concatenate(zs_all)
    cdf = np.concatenate(cdf_all) / offset
    u = rng.uniform(size=n)
    return np.interp(u, cdf, zs)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def sample_prm(spec: LevyMeasureSpec, region: SimRegion, eps: float,
               large_cutoff: LargeCutoff = LargeCutoff(),
               seed: int = 0, rng: Optional[np.random.Generator] = None) -> PointMeasure:
    """Sample the jump points of the noise restricted to {|z| > eps}.

    Counts are Poisson(nu({|z| > eps}) T |D|), positions uniform on
    [0, T] x D, marks i.i.d. from the normalized restricted measure.
    The compensating drift b_eps = -integral of z over {eps < |z| <= 1}
    is recorded; the large cutoff is metadata only (no jumps dropped
    here; see :func:`truncate_noise`).
    """
    if eps < 0:
        raise ConfigurationError("cutoff must be nonnegative")
    activity = tail_mass(spec, eps)
    if not math.isfinite(activity):
        raise ConfigurationError("infinite activity requires cutoff")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(seed))

    n = int(rng.poisson(activity * region.T * region.volume))
    t = np.sort(rng.uniform(0.0, region.T, size=n))
    # probability-zero ties are broken by one-ulp perturbation
    for i in range(1, n):
        if t[i] <= t[i - 1]:
            t[i] = np.nextafter(t[i - 1], np.inf)
    if region.domain == "interval":
        x = rng.uniform(0.0, math.pi, size=(n, 1))
    else:
        x = rng.uniform(-region.half_width, region.half_width, size=(n, region.d))
    z = _sample_marks(spec, eps, n, rng)

    if eps >= 1.0 or spec.symmetric:
        b_eps = 0.0
    else:
        b_eps = -signed_mass(spec, eps, 1.0)
    return PointMeasure(t=t, x=x, z=z, small_cutoff=eps, large_cutoff=large_cutoff,
                        b_eps=b_eps, seed=seed, region=region)


def tau_fixed(pm: PointMeasure, N: float) -> StoppingTimeResult:
    """First jump time with |z| > N, +inf if none."""
    idx = np.flatnonzero(np.abs(pm.z) > N)
    if idx.size == 0:
        return StoppingTimeResult(tau=math.inf)
    i = int(idx[0])
    return StoppingTimeResult(tau=float(pm.t[i]), triggering_jump=i)


def tau_weighted(pm: PointMeasure, N: float, eta: float) -> StoppingTimeResult:
    """First jump time with |z| > N (1 + |x|^eta), +inf if none."""
    if eta <= 0:
        raise ConfigurationError("weight exponent must be positive")
    radii = np.linalg.norm(pm.x, axis=1)
    idx = np.flatnonzero(np.abs(pm.z) > N * (1.0 + radii ** eta))
    if idx.size == 0:
        return StoppingTimeResult(tau=math.inf)
    i = int(idx[0])
    return StoppingTimeResult(tau=float(pm.t[i]), triggering_jump=i)


def truncate_noise(pm: PointMeasure, spec: LevyMeasureSpec, N: float):
    """Remove jumps with |z| > N; return the new measure and the
    adjusted drift b_N = b - integral of z over {1 < |z| <= N}."""
    if N < 1:
        raise ConfigurationError("truncation level must be >= 1")
    keep = np.abs(pm.z) <= N
    b_N = spec.b - signed_mass(spec, 1.0, N)
    if keep.all():
        return pm, b_N
    out = replace(pm, t=pm.t[keep], x=pm.x[keep], z=pm.z[keep],
                  large_cutoff=LargeCutoff(kind="fixed", N=N))
    return out, b_N


def truncate_noise_weighted(pm: PointMeasure, N: float, eta: float) -> PointMeasure:
    """Remove jumps with |z| > N (1 + |x|^eta)."""
    if eta <= 0:
        raise ConfigurationError("weight exponent must be positive")
    radii = np.linalg.norm(pm.x, axis=1)
    keep = np.abs(pm.z) <= N * (1.0 + radii ** eta)
    if keep.all():
        return replace(pm, large_cutoff=LargeCutoff(kind="weighted", N=N, eta=eta))
    return replace(pm, t=pm.t[keep], x=pm.x[keep], z=pm.z[keep],
                   large_cutoff=LargeCutoff(kind="weighted", N=N, eta=eta))
