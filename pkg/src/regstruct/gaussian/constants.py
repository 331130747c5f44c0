"""Renormalisation constants by quadrature.

All computations exploit the exact dilation covariance of the free
kernels: mollification enters through a fixed reference grid in the
rescaled variable, so every epsilon is resolved equally well and the
logarithmic (or 1/eps) divergences appear analytically exactly.  The
kernels are truncated smoothly at unit scale; this shifts each constant
by an epsilon-independent amount, which is the only freedom the theory
leaves anyway.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.fft import dst
from scipy.special import erf

from ..errors import UnderResolved
from ..kernels import radial_cutoff
from .noise import Mollifier

__all__ = [
    "c_eps_pam",
    "cbar_matrix",
    "phi4_constants",
    "richardson_limit",
    "constants_table",
    "write_constants_csv",
]

PAM_AMPLITUDE = 1.0 / math.pi  # -A log|x|: the 2D convention with A = 1/pi


# -- 2D machinery (multiplicative-noise heat equation) -----------------------

def _rho2_autoconv(rho: Mollifier, n: int = 1024):
    """rho^{*2} for the 2D spatial mollifier on the grid [-2,2]^2 (cached)."""
    cache = rho.__dict__.setdefault("_const_cache", {})
    out = cache.get(("auto2", n))
    if out is None:
        h = 4.0 / n
        g = (np.arange(n) - n / 2 + 0.5) * h
        gx, gy = np.meshgrid(g, g, indexing="ij")
        r = np.sqrt(gx**2 + gy**2)
        vals = rho.space_profile(r)
        vals = vals / (vals.sum() * h * h)
        f = np.fft.rfft2(vals)
        conv = np.fft.fftshift(np.fft.irfft2(f * f, s=vals.shape)) * h * h
        out = cache[("auto2", n)] = (conv, r, h)
    return out


def c_eps_pam(
    rho: Mollifier, eps: float, amplitude: float = PAM_AMPLITUDE,
    spacing: float | None = None, n_grid: int = 1024,
) -> float:
    """C(eps) = <rho_eps^{*2}, K> for the truncated log kernel.

    Computed as int rho^{*2}(u) K(eps u) du on a fixed reference grid, an
    exact change of variables, so every dyadic eps is equally resolved.
    """
    if spacing is not None and eps < 4.0 * spacing:
        raise UnderResolved(f"eps {eps:g} below 4x grid spacing {spacing:g}")
    conv, r, h = _rho2_autoconv(rho, n_grid)
    re = eps * r
    kvals = -amplitude * np.log(re) * radial_cutoff(re)
    return float(np.sum(conv * kvals) * h * h)


def cbar_matrix(
    rho: Mollifier, eps: float, amplitude: float = PAM_AMPLITUDE,
    n_quad: int = 8192,
) -> np.ndarray:
    """Gradient pairings <d_i K_eps, d_j K_eps> of the truncated log kernel.

    For a rotationally invariant mollifier the gradient of the mollified
    kernel is radial with an exactly known profile: A m(r/eps) x / |x|^2,
    where m is the cumulative mass.  The off-diagonal entry vanishes by
    parity; the diagonal splits into an exact log part plus two fixed
    radial quadratures.
    """
    A = amplitude
    r = (np.arange(n_quad) + 0.5) / n_quad  # (0, 1) midpoints
    w = rho.space_profile(r) * 2.0 * math.pi * r
    m = np.cumsum(w) / n_quad
    m /= m[-1]
    # inside the mollifier: gradient profile A m(q)/q, q = |x|/eps
    near_core = 2.0 * math.pi * float(np.sum((A * m / r) ** 2 * r) / n_quad)
    near_log = 2.0 * math.pi * A**2 * math.log(1.0 / eps)
    # outside unit radius the cutoff shapes the kernel: K = -A h(s) log s
    s = 1.0 + (np.arange(n_quad) + 0.5) / n_quad * 1.2  # (1, 2.2)
    ds = 1.2 / n_quad
    dh = _radial_cutoff_deriv(s)
    dK = -A * (dh * np.log(s) + radial_cutoff(s) / s)
    far = 2.0 * math.pi * float(np.sum(dK**2 * s) * ds)
    diag = 0.5 * (near_core + near_log + far)
    return np.array([[diag, 0.0], [0.0, diag]])


def _radial_cutoff_deriv(s, step: float = 1e-5):
    return (radial_cutoff(s + step) - radial_cutoff(s - step)) / (2.0 * step)


# -- 3+1 dimensional machinery (cubic model) ---------------------------------

def _heat(t, r):
    """Free heat kernel in 3 space dimensions (zero for t <= 0)."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    out = np.zeros(np.broadcast(t, r).shape)
    m = np.broadcast_to(t > 0, out.shape)
    tt = np.broadcast_to(t, out.shape)[m]
    rr = np.broadcast_to(r, out.shape)[m]
    out[m] = (4.0 * math.pi * tt) ** -1.5 * np.exp(-(rr**2) / (4.0 * tt))
    return out


def _pair_kernel(t, r):
    """P = K *(time-reflected) K: P(t, r) = erf(r / (2 sqrt|t|)) / (8 pi r)."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = erf(r / (2.0 * np.sqrt(np.abs(t)))) / (8.0 * math.pi * r)
        core = 1.0 / (8.0 * math.pi**0.5 * np.pi * np.sqrt(np.abs(t)))
    return np.where(r > 1e-12, out, core)


def _radial_conv3(fa, fb, r_axis):
    """3D convolution of radial profiles via the sine transform.

    fb may be a (batch, n) array; the convolution acts on the last axis.
    """
    n = r_axis.size
    dr = r_axis[1] - r_axis[0]
    length = (n + 1) * dr
    k = np.pi * np.arange(1, n + 1) / length
    # f_hat(k) = (4 pi / k) int f(r) sin(kr) r dr  via DST-I
    fa_hat = 4.0 * math.pi / k * dst(fa * r_axis, type=1) * dr / 2.0
    fb_hat = 4.0 * math.pi / k * dst(fb * r_axis, type=1, axis=-1) * dr / 2.0
    prod = fa_hat * fb_hat
    # inverse: f(r) = (1/(2 pi^2 r)) int f_hat(k) sin(kr) k dk
    out = dst(prod * k, type=1, axis=-1) * (np.pi / length) / 2.0
    return out / (2.0 * math.pi**2 * r_axis)


def _phi4_profiles(rho: Mollifier, nr: int = 1024, nt: int = 128, r_max: float = 8.0):
    """Cached radial/time profiles of rho^{*2} and Q1 = P * rho^{*2}.

    The time smearing is a lattice convolution: P is tabulated on the lag
    lattice once, averaged against the time autocorrelation of rho, and
    the spatial smearing is one batched radial convolution.
    """
    cache = rho.__dict__.setdefault("_const_cache", {})
    out = cache.get("phi4")
    if out is not None:
        return out
    dr = r_max / nr
    r = dr * np.arange(1, nr + 1)
    dt = 2.0 / nt
    # normalised separable factors; pt sampled at midpoints of (-1, 1)
    ps = rho.space_profile(r)
    t_in = -1.0 + dt * (np.arange(nt) + 0.5)
    pt = rho.time_profile(t_in)
    # rho^{*2} = (pt * pt)(tau) x (ps *3 ps)(|w|); tau_m = -2 + dt (m + 1)
    auto_s = _radial_conv3(ps, ps, r)
    auto_t = np.convolve(pt, pt) * dt
    # Q1 sampled at t_i = -4 + dt (i + 1/2), i = 0 .. 4 nt - 1
    n_q = 4 * nt
    t_q = -4.0 + dt * (np.arange(n_q) + 0.5)
    # lag values t_i - tau_m = dt (i - m - 1/2) - 2 + 4 = lattice in (i - m)
    n_lag = n_q + auto_t.size - 1
    lag = t_q[0] - (-2.0 + dt * auto_t.size) + dt * np.arange(n_lag)
    p_lag = _pair_kernel(lag[:, None], r[None, :])
    # Pt_avg[i] = sum_m auto_t[m] dt p_lag[i - m + (auto_t.size - 1)]
    from scipy.signal import fftconvolve

    pt_avg = fftconvolve(p_lag, auto_t[:, None] * dt, mode="valid", axes=0)
    q1 = _radial_conv3(auto_s, pt_avg, r)
    out = cache["phi4"] = {
        "r": r, "dr": dr, "auto_t": auto_t, "auto_s": auto_s, "dt": dt,
        "t_q": t_q, "q1": q1,
    }
    return out


def _phi4_scalars(rho: Mollifier):
    """eps-independent quadratures entering C1 and C2 (cached)."""
    cache = rho.__dict__.setdefault("_const_cache", {})
    out = cache.get("phi4_scalars")
    if out is not None:
        return out
    prof = _phi4_profiles(rho)
    r, dr, dt = prof["r"], prof["dr"], prof["dt"]
    auto_t, auto_s = prof["auto_t"], prof["auto_s"]
    tau = -2.0 + dt * (np.arange(auto_t.size) + 1.0)
    # A1 = <rho^{*2}, P>: C1(eps) = A1 / eps exactly
    surf = 4.0 * math.pi * r**2 * dr
    a1 = float(
        np.sum(
            (auto_t * dt)[:, None] * auto_s[None, :]
            * _pair_kernel(tau[:, None], r[None, :]) * surf[None, :]
        )
    )
    # I0 = int over the scaled 2-ball of K Q1^2 on the profile grid
    t_q, q1 = prof["t_q"], prof["q1"]
    qnorm = np.maximum(np.sqrt(np.abs(t_q))[:, None], r[None, :])
    kv = _heat(t_q[:, None], r[None, :])
    i0 = float(
        np.sum(np.where(qnorm <= 2.0, kv * q1**2, 0.0) * surf[None, :]) * dt
    )
    # one octave of the self-similar tail K P^2 (identical in every octave)
    n2 = 512
    t2 = 16.0 * (np.arange(n2) + 0.5) / n2
    r2 = 4.0 * (np.arange(n2) + 0.5) / n2
    q2 = np.maximum(np.sqrt(t2)[:, None], r2[None, :])
    kp2 = _heat(t2[:, None], r2[None, :]) * _pair_kernel(t2[:, None], r2[None, :]) ** 2
    c_oct = float(
        np.sum(
            np.where((q2 > 2.0) & (q2 <= 4.0), kp2, 0.0)
            * (4.0 * math.pi * r2**2)[None, :]
        )
        * (16.0 / n2) * (4.0 / n2)
    )
    out = cache["phi4_scalars"] = (a1, i0, c_oct)
    return out


def phi4_constants(rho: Mollifier, eps: float) -> tuple[float, float]:
    """(C1, C2) for the cubic model: C1 ~ 1/eps, C2 ~ log(1/eps).

    C1 is the squared-kernel integral, evaluated through the exact
    rescaling C1 = <rho^{*2}, P> / eps.  C2 accumulates the second-order
    graph K Q^2 over the self-similar window between the mollification
    scale and the unit truncation; each octave contributes equally.
    """
    if not rho.has_time:
        raise ValueError("phi4_constants needs a space-time mollifier")
    if eps > 0.125:
        raise UnderResolved(
            f"eps {eps:g} leaves no self-similar window below unit scale"
        )
    a1, i0, c_oct = _phi4_scalars(rho)
    c1 = a1 / eps
    octaves = math.log2(1.0 / (4.0 * eps))
    c2 = 2.0 * (i0 + c_oct * octaves)
    return c1, c2


# -- reporting ---------------------------------------------------------------

def richardson_limit(values):
    """Extrapolated limit of a dyadic-parameter sequence with residual.

    Assumes first-order convergence in the dyadic parameter: the limit of
    v_k = L + c 2^{-k} is 2 v_{k+1} - v_k; the residual is the spread of
    the extrapolants.
    """
    values = list(map(float, values))
    if len(values) < 2:
        raise ValueError("need at least two values")
    extr = [2.0 * b - a for a, b in zip(values, values[1:])]
    return extr[-1], max(extr) - min(extr) if len(extr) > 1 else 0.0


def constants_table(rho2: Mollifier, rho4: Mollifier | None, eps_list):
    """Rows (eps, C, Cbar11, Cbar12, Cbar22, C1, C2) over the eps window."""
    rows = []
    for eps in eps_list:
        c = c_eps_pam(rho2, eps)
        cb = cbar_matrix(rho2, eps)
        if rho4 is not None:
            c1, c2 = phi4_constants(rho4, eps)
        else:
            c1 = c2 = float("nan")
        rows.append((eps, c, cb[0, 0], cb[0, 1], cb[1, 1], c1, c2))
    return rows


def write_constants_csv(path, rows) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps", "C", "Cbar11", "Cbar12", "Cbar22", "C1", "C2"])
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
