"""Shared domain types, validation, and unit conventions.

Everything runs in natural units (hbar = e = k_B = 1).  The total linewidth
Gamma = gamma_l + gamma_r is the reference energy scale; times are measured in
1/Gamma.  Flux enters only through the dimensionless loop phase ``phi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Type alias for the ubiquitous 2x2 complex carriers (propagators, occupation
# matrices, coupling patterns).  Plain ndarray; no wrapper class.
ComplexMat2 = np.ndarray

#: quadrature window must exceed the bias window by this many Gamma
CUTOFF_MARGIN = 10.0


# ---------------------------------------------------------------------------
# error types
# ---------------------------------------------------------------------------

class QuadratureNotConverged(RuntimeError):
    """Adaptive integration exhausted its panel budget.

    Carries the achieved error estimate so callers can report how far off the
    result may be.
    """

    def __init__(self, message: str, error_estimate: float = math.nan):
        super().__init__(message)
        self.error_estimate = error_estimate


class InvalidOccupation(ValueError):
    """Occupation-matrix eigenvalues left [0, 1] beyond tolerance."""


class PhaseUndefined(ValueError):
    """Coherence too small for a meaningful complex phase."""


class DegenerateScale(ArithmeticError):
    """A spectral scale collapsed to zero where a finite one was required."""


class NotDegenerate(ValueError):
    """Operation requires equal dot levels (delta_e == 0)."""


class UnitarityViolation(ArithmeticError):
    """A probability-like quantity left [0, 1] beyond roundoff."""


# ---------------------------------------------------------------------------
# parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeviceParams:
    """Static definition of the two-dot interferometer.

    e1, e2 : dot level energies
    gamma_l, gamma_r : lead-induced linewidths (>= 0, not both zero)
    phi : loop phase in radians (any real; physics is 4pi-periodic)
    """

    e1: float = 0.0
    e2: float = 0.0
    gamma_l: float = 0.95
    gamma_r: float = 0.05
    phi: float = 0.0

    @property
    def gamma(self) -> float:
        return self.gamma_l + self.gamma_r

    @property
    def delta_gamma(self) -> float:
        return self.gamma_l - self.gamma_r

    @property
    def delta_e(self) -> float:
        return self.e1 - self.e2


@dataclass(frozen=True)
class BathParams:
    """Reservoir configuration: chemical potentials, temperature, window.

    cutoff is the half-width of the frequency window used by all numerical
    integrals; it must comfortably contain the bias window (see validate).
    """

    mu_l: float = 3.0
    mu_r: float = -3.0
    temperature: float = 0.05
    cutoff: float = 50.0

    @classmethod
    def symmetric_bias(cls, bias: float, temperature: float = 0.05,
                       cutoff: float = 50.0) -> "BathParams":
        """mu_l = bias/2 = -mu_r."""
        return cls(mu_l=bias / 2.0, mu_r=-bias / 2.0,
                   temperature=temperature, cutoff=cutoff)

    @property
    def bias(self) -> float:
        return self.mu_l - self.mu_r


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


def validate(device: DeviceParams, bath: BathParams) -> ValidationReport:
    """Check parameter invariants; report rather than raise."""
    bad: list[str] = []
    if device.gamma_l < 0 or device.gamma_r < 0:
        bad.append("linewidths must be non-negative")
    if device.gamma <= 0:
        bad.append("total linewidth must be positive (gamma_l + gamma_r > 0)")
    if bath.temperature < 0:
        bad.append("temperature must be non-negative")
    if bath.cutoff <= 0:
        bad.append("cutoff must be positive")
    elif device.gamma > 0 and bath.cutoff <= (max(abs(bath.mu_l), abs(bath.mu_r))
                                              + CUTOFF_MARGIN * device.gamma):
        bad.append("cutoff too small: window must exceed the bias window "
                   f"by {CUTOFF_MARGIN:g} linewidths")
    if not all(math.isfinite(x) for x in (device.e1, device.e2, device.gamma_l,
                                          device.gamma_r, device.phi,
                                          bath.mu_l, bath.mu_r,
                                          bath.temperature, bath.cutoff)):
        bad.append("parameters must be finite")
    return ValidationReport(ok=not bad, violations=tuple(bad))


def require_valid(device: DeviceParams, bath: BathParams) -> None:
    report = validate(device, bath)
    if not report.ok:
        raise ValueError("invalid parameters: " + "; ".join(report.violations))


def phase_from_flux(flux: float, flux_quantum: float = 1.0) -> float:
    """Loop phase from magnetic flux: phi = 2*pi*flux/flux_quantum."""
    return 2.0 * math.pi * flux / flux_quantum


def fermi(omega, mu: float, temperature: float):
    """Fermi-Dirac occupation; exact step at zero temperature.

    Vectorized over omega.  The T=0 step evaluates to 1 below mu, 0 above,
    and 1/2 exactly at mu (the symmetric convention).
    """
    w = np.asarray(omega, dtype=float)
    if temperature == 0.0:
        out = np.where(w < mu, 1.0, np.where(w > mu, 0.0, 0.5))
        return out if out.ndim else float(out)
    with np.errstate(over="ignore"):
        out = 1.0 / (1.0 + np.exp((w - mu) / temperature))
    return out if out.ndim else float(out)
