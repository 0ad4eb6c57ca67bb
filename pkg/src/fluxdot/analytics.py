"""Closed-form steady-state benchmarks: coherence, transmission, current.

These are independent of the quadrature pipeline on purpose — the test suite
holds the two routes against each other rather than deriving one from the
other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BathParams,
    DeviceParams,
    NotDegenerate,
    UnitarityViolation,
    fermi,
    require_valid,
)
from .propagator import (
    QuadratureSpec,
    _adaptive,
    _lead_vectors,
    _resolvent_apply,
    _Split,
    _window_edges,
    decay_matrix,
)


@dataclass(frozen=True)
class SpectralScales:
    """Hybridized linewidth scales of the two decay modes.

    gamma_phi may go complex for large level detuning; the pair
    (gamma_plus, gamma_minus) then appears in conjugate combinations and all
    physical outputs stay real.
    """

    gamma_phi: complex
    gamma_plus: complex
    gamma_minus: complex


def spectral_scales(device: DeviceParams) -> SpectralScales:
    g = device.gamma
    c = math.cos(device.phi / 2.0)
    s = math.sin(device.phi / 2.0)
    gamma2 = (g * c) ** 2 + (device.delta_gamma * s) ** 2 - device.delta_e ** 2
    gamma_phi = np.sqrt(complex(gamma2))
    return SpectralScales(gamma_phi=complex(gamma_phi),
                          gamma_plus=complex((g + gamma_phi) / 2.0),
                          gamma_minus=complex((g - gamma_phi) / 2.0))


def steady_rho21_closed(device: DeviceParams, bias: float) -> complex:
    """Steady coherence at zero temperature under symmetric bias.

    Arctangent closed form in the two mode linewidths, plus the detuning
    correction; complex spectral scales are handled by analytic continuation
    (principal square root), which the pipeline-equivalence tests certify.
    """
    g = device.gamma
    if g <= 0:
        raise ValueError("total linewidth must be positive")
    dg = device.delta_gamma
    de = device.delta_e
    c = math.cos(device.phi / 2.0)
    s = math.sin(device.phi / 2.0)
    scales = spectral_scales(device)
    gamma_phi = scales.gamma_phi
    gp, gm = scales.gamma_plus, scales.gamma_minus
    a_plus = np.arctan(bias / (2.0 * gp))
    if abs(gm) > 1e-14 * g:
        a_minus = np.arctan(bias / (2.0 * gm))
    else:
        # decay-free mode: the arctangent saturates
        a_minus = 0.5 * math.pi * np.sign(bias)
    total = a_plus + a_minus
    head = (total / (2.0 * math.pi)) * (dg / g * c - 1j * s)
    if de == 0.0:
        return complex(head)

    def slope(x):
        half = (g + x) / 2.0
        return np.arctan(bias / (2.0 * half)) / half

    if abs(gamma_phi) > 1e-5 * g:
        dd = (slope(gamma_phi) - slope(-gamma_phi)) / gamma_phi
    else:
        h = 1e-5 * g
        dd = (slope(h) - slope(-h)) / h
    brace = (1.0 / g) * ((g * g - dg * dg) * s + dg * de * c) - 1j * de * s
    return complex(head + (de / (4.0 * math.pi)) * dd * brace)


def large_bias_rho21(device: DeviceParams) -> complex:
    """Infinite-bias limit of the steady coherence at zero detuning.

    Piecewise: the isolated value at phi = 0 (mod 4pi) differs from the
    phi -> 0 limit of the generic branch; both are reported as written.
    """
    if device.delta_e != 0.0:
        raise NotDegenerate("requires e1 == e2")
    g = device.gamma
    if g <= 0:
        raise ValueError("total linewidth must be positive")
    if abs(math.remainder(device.phi, 4.0 * math.pi)) < 1e-12:
        return complex(0.25 * (1.0 + device.delta_gamma / g))
    half = device.phi / 2.0
    return 0.5 * (device.delta_gamma / g * math.cos(half) - 1j * math.sin(half))


# ---------------------------------------------------------------------------
# transmission and current
# ---------------------------------------------------------------------------

def _transmission_amplitudes(device: DeviceParams,
                             omegas: np.ndarray) -> np.ndarray:
    split = _Split(decay_matrix(device).m)
    wvl, wvr = _lead_vectors(device.phi)
    y = _resolvent_apply(split, omegas, wvr)
    return y @ wvl.conj()


def transmission(device: DeviceParams, omega: float) -> float:
    """Flux- and energy-resolved transmission probability.

    Scattering form Gamma_L Gamma_R |<left pattern| G(w) |right pattern>|^2
    with the exact 2x2 resolvent; decoupled decay-free modes are dropped
    analytically, so removable resonances evaluate cleanly.
    """
    amp = _transmission_amplitudes(device, np.asarray([float(omega)]))[0]
    value = device.gamma_l * device.gamma_r * float(np.abs(amp)) ** 2
    if not (-1e-12 <= value <= 1.0 + 1e-12):
        raise UnitarityViolation(
            f"transmission {value!r} outside [0, 1] at omega={omega!r}, "
            f"phi={device.phi!r}")
    return value


def steady_current(device: DeviceParams, bath: BathParams,
                   quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Steady transport current: bias-window integral of the transmission.

    Positive for positive bias (left-to-right flow); antisymmetric under
    bias reversal; 2pi-periodic in flux.
    """
    require_valid(device, bath)
    glgr = device.gamma_l * device.gamma_r
    if glgr == 0.0:
        return 0.0

    if bath.temperature == 0.0:
        lo, hi = sorted((bath.mu_r, bath.mu_l))
        if hi - lo == 0.0:
            return 0.0
        sign = 1.0 if bath.mu_l >= bath.mu_r else -1.0

        def fvec(ws):
            amp = _transmission_amplitudes(device, ws)
            return (glgr * np.abs(amp) ** 2)[:, None]

        edges = _window_edges(lo, hi, (0.0,))
    else:
        lo, hi = -bath.cutoff, bath.cutoff
        sign = 1.0

        def fvec(ws):
            amp = _transmission_amplitudes(device, ws)
            occ = (fermi(ws, bath.mu_l, bath.temperature)
                   - fermi(ws, bath.mu_r, bath.temperature))
            return (occ * glgr * np.abs(amp) ** 2)[:, None]

        edges = _window_edges(lo, hi, (bath.mu_r, 0.0, bath.mu_l))

    part = _adaptive(fvec, edges, quad.abs_tol * math.pi, quad.rel_tol,
                     quad.max_panels)
    return sign * float(part[0].real) / (2.0 * math.pi)
