"""Retarded propagator, windowed kernel, and occupation-matrix integrals.

The decay generator M drives u(tau) = exp(-M tau).  All matrix functions of M
use the exact 2x2 decomposition M = a*I + D with D traceless and D^2 = mu^2*I,
so f(M) = c0*I + c1*D follows from scalar evaluations at a +- mu.  This keeps
every kernel evaluation vectorizable over frequency nodes and free of matrix
solves.

Frequency integrals run on adaptive bisected Gauss-Legendre panels.  The
zero-temperature steady state is evaluated in closed form (no quadrature);
with ``tail_correction`` enabled it covers the full band analytically, and
with it disabled it is truncated to the same finite window the time-dependent
quadrature uses, so the two routes agree to transient accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BathParams,
    ComplexMat2,
    DegenerateScale,
    DeviceParams,
    QuadratureNotConverged,
    fermi,
    require_valid,
)

#: time marker for steady-state occupation matrices
STEADY = math.inf

# fixed-order nodes for one panel; adaptivity comes from bisection
_GL_ORDER = 15
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)
_ERR_SAFETY = 8.0


@dataclass(frozen=True)
class DecayMatrix:
    """The 2x2 generator M of the amplitude decay, u(tau) = exp(-M tau)."""

    m: ComplexMat2


@dataclass(frozen=True)
class OccupationMatrix:
    """Hermitian 2x2 dot correlation matrix; entry [m, n] is <a_m^dag a_n>.

    ``time`` is the evolution time from the empty initial state, or the
    ``STEADY`` marker (+inf) for the long-time limit.
    """

    v: ComplexMat2
    time: float


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-7
    max_panels: int = 20000
    tail_correction: bool = False


# ---------------------------------------------------------------------------
# coupling geometry
# ---------------------------------------------------------------------------

def lead_matrices(phi: float) -> tuple[ComplexMat2, ComplexMat2]:
    """Rank-one lead weight matrices (left, right).

    The left matrix carries e^{+i phi/2} in its [0, 1] entry, the right one
    the conjugate pattern; both have unit diagonal.
    """
    wl = np.array([[1.0, np.exp(0.5j * phi)],
                   [np.exp(-0.5j * phi), 1.0]])
    return wl, wl.conj()


def _lead_vectors(phi: float) -> tuple[np.ndarray, np.ndarray]:
    # w w^dag reproduces lead_matrices entrywise
    wl = np.array([np.exp(0.25j * phi), np.exp(-0.25j * phi)])
    return wl, wl.conj()


def decay_matrix(device: DeviceParams) -> DecayMatrix:
    """Half-linewidth decay generator.

    M = -i diag(e1, e2) + (gamma_l W_L + gamma_r W_R) / 2.  Its Hermitian
    part has eigenvalues (Gamma +- gamma(phi))/2 >= 0, so exp(-M tau) is a
    contraction for tau >= 0.
    """
    wl, wr = lead_matrices(device.phi)
    m = -1j * np.diag([device.e1, device.e2]).astype(complex)
    m += 0.5 * (device.gamma_l * wl + device.gamma_r * wr)
    return DecayMatrix(m=m)


# ---------------------------------------------------------------------------
# scalar machinery for 2x2 matrix functions
# ---------------------------------------------------------------------------

class _Split:
    """M = a*I + d with tr d = 0; d @ d = mu^2 * I."""

    __slots__ = ("a", "d", "mu", "scale")

    def __init__(self, m: ComplexMat2):
        self.a = 0.5 * (m[0, 0] + m[1, 1])
        self.d = m - self.a * np.eye(2)
        self.mu = np.sqrt(self.d[0, 0] ** 2 + self.d[0, 1] * self.d[1, 0])
        self.scale = max(float(np.abs(m).max()), 1e-300)


def _sinhc(z):
    """sinh(z)/z, stable at the origin."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-4
    zs = z[small]
    out[small] = 1.0 + zs * zs / 6.0
    zb = z[~small]
    out[~small] = np.sinh(zb) / zb
    return out


def _psi1(z):
    """(1 - exp(-z))/z, entire; series branch near the origin."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 0.1
    zs = z[small]
    acc = np.ones_like(zs)
    term = np.ones_like(zs)
    for n in range(1, 12):
        term = term * (-zs) / (n + 1.0)
        acc = acc + term
    out[small] = acc
    zb = z[~small]
    out[~small] = (1.0 - np.exp(-zb)) / zb
    return out


def _psi1_prime(z):
    """Derivative of _psi1, with matching series branch."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 0.1
    zs = z[small]
    acc = np.full_like(zs, -0.5)
    term = np.full_like(zs, -0.5)
    for n in range(2, 13):
        # term_n = (-1)^n n z^(n-1) / (n+1)!
        term = term * (-zs) * n / ((n - 1.0) * (n + 1.0))
        acc = acc + term
    out[small] = acc
    zb = z[~small]
    out[~small] = (np.exp(-zb) * (1.0 + zb) - 1.0) / (zb * zb)
    return out


def _psi1_pair(zp, zm):
    """Mean and divided difference of _psi1 over the pair (zp, zm)."""
    fp = _psi1(zp)
    fm = _psi1(zm)
    mean = 0.5 * (fp + fm)
    diff = zp - zm
    mid = 0.5 * (zp + zm)
    guard = np.abs(diff) < 1e-5 * (1.0 + np.abs(mid))
    dd = (fp - fm) / np.where(guard, 1.0, diff)
    if np.any(guard):
        dd = np.where(guard, _psi1_prime(mid), dd)
    return mean, dd


def retarded_u(device: DeviceParams, tau: float) -> ComplexMat2:
    """exp(-M tau) by the exact cosh/sinh closed form; contraction for tau>=0."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    s = _Split(decay_matrix(device).m)
    mt = s.mu * tau
    c0 = np.exp(-s.a * tau) * np.cosh(mt)
    c1 = -np.exp(-s.a * tau) * tau * _sinhc(mt)
    return c0 * np.eye(2) + complex(c1) * s.d


def _kernel_coeffs(split: _Split, t: float, omega: np.ndarray):
    """Coefficients (k0, k1) with K(t, w) = k0*I + k1*d per frequency node.

    K is the phase-free windowed kernel (M + i w)^{-1} (1 - exp(-(M+i w) t)),
    evaluated as t * psi1(t (M + i w)) which stays finite for every w.
    """
    c = split.a + 1j * omega
    zp = t * (c + split.mu)
    zm = t * (c - split.mu)
    mean, dd = _psi1_pair(zp, zm)
    return t * mean, t * t * dd


def windowed_u(device: DeviceParams, t: float, omega: float) -> ComplexMat2:
    """Finite-window transform of the retarded propagator.

    Closed form e^{i w t} (i w I + M)^{-1} (I - e^{-(i w I + M) t}) of the
    integral over [0, t] of e^{i w (t - tau)} u(tau); exact up to roundoff,
    finite for every (t, w).
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    s = _Split(decay_matrix(device).m)
    k0, k1 = _kernel_coeffs(s, t, np.asarray([float(omega)]))
    k = k0[0] * np.eye(2) + k1[0] * s.d
    return np.exp(1j * omega * t) * k


# ---------------------------------------------------------------------------
# adaptive panel quadrature
# ---------------------------------------------------------------------------

def _panel_integrals(fvec, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Gauss-Legendre integrals of fvec over each [lo_i, hi_i]; one batch call."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    xs = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = fvec(xs.ravel())
    vals = vals.reshape(lo.size, _GL_ORDER, -1)
    return np.einsum("pgc,g->pc", vals, _GL_WEIGHTS) * half[:, None]


def _adaptive(fvec, edges: np.ndarray, abs_tol: float, rel_tol: float,
              max_panels: int) -> np.ndarray:
    """Integrate fvec (vector-valued) over [edges[0], edges[-1]].

    Bisects every unconverged panel per round and evaluates all children in a
    single batched call; a panel is accepted when the parent-vs-children
    discrepancy falls under its length-proportional share of the tolerance,
    deflated by a safety factor (the discrepancy estimates the parent's error,
    which can understate the children's on oscillatory integrands).
    Summation order is fixed (sorted by interval start) for determinism.
    """
    total_len = float(edges[-1] - edges[0])
    if total_len <= 0:
        return np.zeros(0)
    lo = np.asarray(edges[:-1], dtype=float)
    hi = np.asarray(edges[1:], dtype=float)
    parent = _panel_integrals(fvec, lo, hi)
    accepted: list[tuple[float, np.ndarray]] = []
    accepted_err = 0.0
    n_panels = lo.size
    while lo.size:
        mid = 0.5 * (lo + hi)
        child_lo = np.concatenate([lo, mid])
        child_hi = np.concatenate([mid, hi])
        child = _panel_integrals(fvec, child_lo, child_hi)
        n_panels += child_lo.size
        refined = child[:lo.size] + child[lo.size:]
        err = np.abs(refined - parent).max(axis=1)
        estimate = refined.sum(axis=0)
        if accepted:
            estimate = estimate + np.sum([a[1] for a in accepted], axis=0)
        global_budget = abs_tol + rel_tol * float(np.abs(estimate).max())
        if (accepted_err + float(err.sum())) * _ERR_SAFETY <= global_budget:
            # everything still on the table already fits the total budget
            # (length-proportional shares starve panels resolving narrow
            # spikes, so the global criterion has to close those out)
            for i in range(lo.size):
                accepted.append((float(lo[i]), refined[i]))
            break
        budget = abs_tol + rel_tol * np.abs(refined).max(axis=1)
        ok = err * _ERR_SAFETY <= budget * (hi - lo) / total_len
        for i in np.nonzero(ok)[0]:
            accepted.append((float(lo[i]), refined[i]))
        accepted_err += float(err[ok].sum())
        if n_panels > max_panels:
            worst = float(err[~ok].max()) if np.any(~ok) else 0.0
            raise QuadratureNotConverged(
                f"frequency integral did not converge within {max_panels} "
                f"panels (worst panel error {worst:.3e})",
                error_estimate=worst)
        keep = ~ok
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        parent = np.concatenate([child[:len(ok)][keep], child[len(ok):][keep]])
    accepted.sort(key=lambda item: item[0])
    return np.sum([item[1] for item in accepted], axis=0)


def _window_edges(lo: float, hi: float, seeds) -> np.ndarray:
    pts = sorted({float(lo), float(hi)} |
                 {float(s) for s in seeds if lo < float(s) < hi})
    return np.asarray(pts)


# ---------------------------------------------------------------------------
# occupation matrix: time-dependent
# ---------------------------------------------------------------------------

def _lead_terms(device: DeviceParams, bath: BathParams):
    wvl, wvr = _lead_vectors(device.phi)
    return ((device.gamma_l, wvl, bath.mu_l),
            (device.gamma_r, wvr, bath.mu_r))


def _time_tail(device: DeviceParams, t: float, cutoff: float) -> ComplexMat2:
    """Analytic estimate of the integrand weight beyond the window.

    The kernel falls off as 1/w^2 with matrix weight W + u(t) W u(t)^dag per
    lead; only the filled side (w < -cutoff) contributes.
    """
    wl, wr = lead_matrices(device.phi)
    u = retarded_u(device, t)
    tail = np.zeros((2, 2), dtype=complex)
    for gam, w in ((device.gamma_l, wl), (device.gamma_r, wr)):
        tail += gam * (w + u @ w @ u.conj().T)
    return tail / (2.0 * np.pi * cutoff)


def occupation_v(device: DeviceParams, bath: BathParams, t: float,
                 quad: QuadratureSpec = QuadratureSpec()) -> OccupationMatrix:
    """Dot correlation matrix v(t) from the empty initial state.

    Frequency integral of f_alpha(w) K(t,w) Gamma_alpha W_alpha K(t,w)^dag
    over the window, one adaptive pass per lead; the rank-one structure of
    W_alpha makes every node's contribution exactly Hermitian.
    """
    require_valid(device, bath)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return OccupationMatrix(v=np.zeros((2, 2), dtype=complex), time=0.0)
    split = _Split(decay_matrix(device).m)
    cut = bath.cutoff
    v = np.zeros((2, 2), dtype=complex)
    for gam, wvec, mu in _lead_terms(device, bath):
        if gam == 0.0:
            continue
        if bath.temperature == 0.0:
            hi = min(mu, cut)
            weight = None
        else:
            hi = cut
            weight = (mu, bath.temperature)
        if hi <= -cut:
            continue
        dvec = split.d @ wvec

        def fvec(ws, _w=wvec, _dv=dvec, _wt=weight, _g=gam):
            k0, k1 = _kernel_coeffs(split, t, ws)
            y = k0[:, None] * _w[None, :] + k1[:, None] * _dv[None, :]
            occ = _g if _wt is None else _g * fermi(ws, _wt[0], _wt[1])
            comps = y[:, :, None] * y[:, None, :].conj()
            return (occ if np.isscalar(occ) else occ[:, None]) * \
                comps.reshape(ws.size, 4)

        edges = _window_edges(-cut, hi, (bath.mu_r, 0.0, bath.mu_l))
        part = _adaptive(fvec, edges, quad.abs_tol * math.pi,
                         quad.rel_tol, quad.max_panels)
        v += part.reshape(2, 2) / (2.0 * np.pi)
    if quad.tail_correction:
        v += _time_tail(device, t, cut)
    return OccupationMatrix(v=v, time=float(t))


# ---------------------------------------------------------------------------
# steady state
# ---------------------------------------------------------------------------

def _steady_closed(device: DeviceParams, bath: BathParams,
                   window: float | None, _continue: bool = True) -> ComplexMat2:
    """Zero-temperature steady occupation matrix in closed form.

    Spectral assembly over the eigenprojectors of M; each (k, l) pair gets
    the analytic frequency integral between -window (or the full band when
    window is None) and the lead's chemical potential.  Decoupled decay-free
    terms are dropped; coupled ones are handled by flux continuation.
    """
    m = decay_matrix(device).m
    s = _Split(m)
    if abs(s.mu) < 1e-9 * s.scale:
        # non-diagonalizable generator: average two transverse level shifts
        h = 1e-5 * s.scale
        up = DeviceParams(device.e1 + h, device.e2, device.gamma_l,
                          device.gamma_r, device.phi)
        dn = DeviceParams(device.e1 - h, device.e2, device.gamma_l,
                          device.gamma_r, device.phi)
        return 0.5 * (_steady_closed(up, bath, window, _continue)
                      + _steady_closed(dn, bath, window, _continue))
    lam = (s.a + s.mu, s.a - s.mu)
    if _continue and min(l.real for l in lam) < 1e-9 * s.scale:
        # a decay-free mode: evaluate the flux continuation around the
        # degeneracy (Richardson in the loop phase, both directions averaged)
        def shifted(dphi):
            dev = DeviceParams(device.e1, device.e2, device.gamma_l,
                               device.gamma_r, device.phi + dphi)
            return _steady_closed(dev, bath, window, _continue=False)

        h = 2e-3
        v1 = 0.5 * (shifted(-h) + shifted(h))
        v2 = 0.5 * (shifted(-h / 2) + shifted(h / 2))
        return (4.0 * v2 - v1) / 3.0
    projs = (0.5 * (np.eye(2) + s.d / s.mu), 0.5 * (np.eye(2) - s.d / s.mu))
    wl, wr = lead_matrices(device.phi)
    v = np.zeros((2, 2), dtype=complex)
    for gmat, mu in ((device.gamma_l * wl, bath.mu_l),
                     (device.gamma_r * wr, bath.mu_r)):
        for k in range(2):
            for l in range(2):
                c_kl = projs[k] @ gmat @ projs[l].conj().T
                x, y = lam[k], np.conj(lam[l])
                if abs(x + y) < 1e-8 * s.scale:
                    if np.abs(c_kl).max() < 1e-7 * s.scale:
                        continue
                    raise DegenerateScale(
                        "decay-free mode carries weight; steady state "
                        "depends on the initial condition")
                upper = np.log(x + 1j * mu) - np.log(y - 1j * mu)
                if window is None:
                    j = (np.pi - 1j * upper) / (2.0 * np.pi * (x + y))
                else:
                    lower = np.log(x - 1j * window) - np.log(y + 1j * window)
                    j = (1j * (lower - upper)) / (2.0 * np.pi * (x + y))
                v += c_kl * j
    return v


def _resolvent_apply(split: _Split, omegas: np.ndarray,
                     vec: np.ndarray) -> np.ndarray:
    """(M + i w)^{-1} vec per frequency node, pole-safe.

    Uses the eigenprojector split when available and drops exactly-decoupled
    components so removable resonances stay removable in floating point.
    """
    c = split.a + 1j * omegas
    if abs(split.mu) < 1e-9 * split.scale:
        num = c[:, None] * vec[None, :] - (split.d @ vec)[None, :]
        return num / (c * c - split.mu ** 2)[:, None]
    alpha_p = 0.5 * (vec + (split.d @ vec) / split.mu)
    alpha_m = 0.5 * (vec - (split.d @ vec) / split.mu)
    norm = float(np.abs(vec).max())
    y = np.zeros((omegas.size, 2), dtype=complex)
    if np.abs(alpha_p).max() > 1e-13 * norm:
        y += alpha_p[None, :] / (c + split.mu)[:, None]
    if np.abs(alpha_m).max() > 1e-13 * norm:
        y += alpha_m[None, :] / (c - split.mu)[:, None]
    return y


def _steady_quadrature(device: DeviceParams, bath: BathParams,
                       quad: QuadratureSpec, _continue: bool = True) -> ComplexMat2:
    split = _Split(decay_matrix(device).m)
    slowest = min((split.a + split.mu).real, (split.a - split.mu).real)
    if _continue and slowest < 1e-9 * split.scale:
        # same flux continuation as the zero-temperature route: a decay-free
        # mode never relaxes, so the steady state is defined as the limit of
        # nearby flux values (Richardson in the loop phase)
        def shifted(dphi):
            dev = DeviceParams(device.e1, device.e2, device.gamma_l,
                               device.gamma_r, device.phi + dphi)
            return _steady_quadrature(dev, bath, quad, _continue=False)

        h = 2e-3
        v1 = 0.5 * (shifted(-h) + shifted(h))
        v2 = 0.5 * (shifted(-h / 2) + shifted(h / 2))
        return (4.0 * v2 - v1) / 3.0
    cut = bath.cutoff
    v = np.zeros((2, 2), dtype=complex)
    for gam, wvec, mu in _lead_terms(device, bath):
        if gam == 0.0:
            continue

        def fvec(ws, _w=wvec, _mu=mu, _g=gam):
            y = _resolvent_apply(split, ws, _w)
            occ = _g * fermi(ws, _mu, bath.temperature)
            comps = y[:, :, None] * y[:, None, :].conj()
            return occ[:, None] * comps.reshape(ws.size, 4)

        # the resolvent peaks at the dot levels with width down to the
        # slowest decay rate; pinning them to panel edges keeps narrow
        # resonances from slipping between quadrature nodes
        edges = _window_edges(-cut, cut, (bath.mu_r, 0.0, bath.mu_l,
                                          device.e1, device.e2))
        part = _adaptive(fvec, edges, quad.abs_tol * math.pi,
                         quad.rel_tol, quad.max_panels)
        v += part.reshape(2, 2) / (2.0 * np.pi)
    if quad.tail_correction:
        wl, wr = lead_matrices(device.phi)
        v += (device.gamma_l * wl + device.gamma_r * wr) / (2.0 * np.pi * cut)
    return v


def steady_v(device: DeviceParams, bath: BathParams,
             quad: QuadratureSpec = QuadratureSpec()) -> OccupationMatrix:
    """Long-time limit of the occupation matrix.

    Zero temperature: exact closed form.  With ``tail_correction`` set it
    covers the full band (the analytic continuation of the window to
    infinity); without it, the same finite window as ``occupation_v``, so the
    two agree once transients have decayed.  Finite temperature goes through
    the same adaptive quadrature as the time-dependent path with the
    resolvent in place of the windowed kernel.
    """
    require_valid(device, bath)
    if bath.temperature == 0.0:
        window = None if quad.tail_correction else bath.cutoff
        v = _steady_closed(device, bath, window)
    else:
        v = _steady_quadrature(device, bath, quad)
    v = 0.5 * (v + v.conj().T)
    return OccupationMatrix(v=v, time=STEADY)
