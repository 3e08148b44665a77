"""Hot numeric kernels with numba acceleration and a pure-numpy fallback.

The fallback is selected by setting the environment variable
``SHELAB_NUMBA=0`` before import.  The two paths accumulate jump sums in
different orders, so they agree to rounding (~1e-12 relative) rather
than bitwise; within one backend all results are fully deterministic.
``benchmarks/bench_kernels.py`` compares their throughput.
"""

import math
import os

import numpy as np

NUMBA_ENABLED = os.environ.get("SHELAB_NUMBA", "1").lower() not in ("0", "false", "off")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_ENABLED = False

_FOUR_PI = 4.0 * math.pi
_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------

def _kernel_sum_box_numpy(times, pts, jt, jx, jw):
    """Sum_i w_i * g(t - T_i, x - X_i) on a (times x pts) lattice, d = pts.shape[1]."""
    nt, ns = times.shape[0], pts.shape[0]
    d = pts.shape[1]
    out = np.zeros((nt, ns))
    for i in range(jt.shape[0]):
        tau = times - jt[i]  # (nt,)
        mask = tau > 0.0
        if not mask.any():
            continue
        sq = np.sum((pts - jx[i]) ** 2, axis=1)  # (ns,)
        taum = tau[mask][:, None]
        out[mask] += jw[i] * (_FOUR_PI * taum) ** (-0.5 * d) * np.exp(-sq[None, :] / (4.0 * taum))
    return out


def _kernel_sum_interval_numpy(times, xs, jt, jx, jw, terms):
    """Same superposition with the Dirichlet Green's function on [0, pi],
    evaluated by the method of images."""
    nt, ns = times.shape[0], xs.shape[0]
    out = np.zeros((nt, ns))
    ks = np.arange(-terms, terms + 1)
    for i in range(jt.shape[0]):
        tau = times - jt[i]
        mask = tau > 0.0
        if not mask.any():
            continue
        taum = tau[mask][:, None, None]
        w1 = xs[None, :, None] - jx[i] - _TWO_PI * ks[None, None, :]
        w2 = xs[None, :, None] + jx[i] - _TWO_PI * ks[None, None, :]
        g = np.exp(-w1 ** 2 / (4.0 * taum)) - np.exp(-w2 ** 2 / (4.0 * taum))
        out[mask] += jw[i] * (_FOUR_PI * taum[:, :, 0]) ** -0.5 * g.sum(axis=2)
    return out


def _green_image_batch_numpy(tau, x, y, terms):
    """Vectorized image-method Green's function; tau, x, y broadcastable."""
    tau, x, y = np.broadcast_arrays(tau, x, y)
    out = np.zeros(tau.shape)
    pos = tau > 0.0
    if not pos.any():
        return out
    t_p, x_p, y_p = tau[pos], x[pos], y[pos]
    ks = np.arange(-terms, terms + 1)
    w1 = x_p[..., None] - y_p[..., None] - _TWO_PI * ks
    w2 = x_p[..., None] + y_p[..., None] - _TWO_PI * ks
    g = np.exp(-w1 ** 2 / (4.0 * t_p[..., None])) - np.exp(-w2 ** 2 / (4.0 * t_p[..., None]))
    out[pos] = (_FOUR_PI * t_p) ** -0.5 * g.sum(axis=-1)
    return out


def _sine_coeff_frames_numpy(times, jt, jx, jw, n_max, strict_before):
    """Closed-form sine coefficients of the jump superposition.

    frame[j, k-1] = sqrt(2/pi) * sum_i w_i sin(k X_i) exp(-k^2 (t_j - T_i))
    over jumps with T_i <= t_j (or < t_j when strict_before is true).
    """
    nt = times.shape[0]
    out = np.zeros((nt, n_max))
    k = np.arange(1, n_max + 1)
    k2 = (k * k).astype(np.float64)
    root = math.sqrt(2.0 / math.pi)
    for i in range(jt.shape[0]):
        tau = times - jt[i]
        mask = tau > 0.0 if strict_before else tau >= 0.0
        if not mask.any():
            continue
        sin_kx = np.sin(k * jx[i])
        out[mask] += (root * jw[i]) * sin_kx[None, :] * np.exp(-np.outer(tau[mask], k2))
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:

    @njit(cache=True, nogil=True)
    def _kernel_sum_box_numba(times, pts, jt, jx, jw):
        nt = times.shape[0]
        ns = pts.shape[0]
        d = pts.shape[1]
        out = np.zeros((nt, ns))
        for i in range(jt.shape[0]):
            ti = jt[i]
            wi = jw[i]
            for j in range(nt):
                tau = times[j] - ti
                if tau <= 0.0:
                    continue
                pref = wi * (_FOUR_PI * tau) ** (-0.5 * d)
                inv = 1.0 / (4.0 * tau)
                for s in range(ns):
                    sq = 0.0
                    for a in range(d):
                        diff = pts[s, a] - jx[i, a]
                        sq += diff * diff
                    out[j, s] += pref * math.exp(-sq * inv)
        return out

    @njit(cache=True, nogil=True)
    def _kernel_sum_interval_numba(times, xs, jt, jx, jw, terms):
        nt = times.shape[0]
        ns = xs.shape[0]
        out = np.zeros((nt, ns))
        for i in range(jt.shape[0]):
            ti = jt[i]
            xi = jx[i]
            wi = jw[i]
            for j in range(nt):
                tau = times[j] - ti
                if tau <= 0.0:
                    continue
                pref = wi / math.sqrt(_FOUR_PI * tau)
                inv = 1.0 / (4.0 * tau)
                for s in range(ns):
                    acc = 0.0
                    for k in range(-terms, terms + 1):
                        w1 = xs[s] - xi - _TWO_PI * k
                        w2 = xs[s] + xi - _TWO_PI * k
                        acc += math.exp(-w1 * w1 * inv) - math.exp(-w2 * w2 * inv)
                    out[j, s] += pref * acc
        return out

    @njit(cache=True, nogil=True)
    def _sine_coeff_frames_numba(times, jt, jx, jw, n_max, strict_before):
        nt = times.shape[0]
        out = np.zeros((nt, n_max))
        root = math.sqrt(2.0 / math.pi)
        sin_kx = np.empty(n_max)
        for i in range(jt.shape[0]):
            ti = jt[i]
            xi = jx[i]
            amp = root * jw[i]
            for k in range(1, n_max + 1):
                sin_kx[k - 1] = amp * math.sin(k * xi)
            for j in range(nt):
                tau = times[j] - ti
                if (tau < 0.0) or (strict_before and tau == 0.0):
                    continue
                # exp(-k^2 tau) by recurrence: E_{k+1} = E_k * D_k, D_{k+1} = D_k * q2
                e = math.exp(-tau)
                q2 = e * e
                dd = e * q2
                for k in range(n_max):
                    out[j, k] += sin_kx[k] * e
                    if e == 0.0:
                        break
                    e *= dd
                    dd *= q2
        return out

    kernel_sum_box = _kernel_sum_box_numba
    kernel_sum_interval = _kernel_sum_interval_numba
    sine_coeff_frames = _sine_coeff_frames_numba
else:
    kernel_sum_box = _kernel_sum_box_numpy
    kernel_sum_interval = _kernel_sum_interval_numpy
    sine_coeff_frames = _sine_coeff_frames_numpy

green_image_batch = _green_image_batch_numpy
