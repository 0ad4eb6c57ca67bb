"""Reduced density matrix assembly and derived state descriptors."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import InvalidOccupation, PhaseUndefined
from .propagator import OccupationMatrix

#: coherence magnitude below which the phase is reported as undefined
PHASE_FLOOR = 1e-9


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """Block-diagonal 4x4 state of the double dot.

    Basis ordering: empty, dot-1 occupied, dot-2 occupied, both occupied.
    The only off-diagonal element lives in the one-electron block; rho21 is
    <dot-2 state| rho |dot-1 state>, its conjugate fills the mirror entry.
    """

    rho00: float
    rho11: float
    rho22: float
    rho33: float
    rho21: complex

    @property
    def trace(self) -> float:
        return self.rho00 + self.rho11 + self.rho22 + self.rho33

    @property
    def purity(self) -> float:
        return (self.rho00 ** 2 + self.rho11 ** 2 + self.rho22 ** 2
                + self.rho33 ** 2 + 2.0 * abs(self.rho21) ** 2)


@dataclass(frozen=True)
class BlochState:
    r: np.ndarray
    leakage: float


def assemble_rho(v: OccupationMatrix, tol: float = 1e-8) -> ReducedDensityMatrix:
    """Map the 2x2 correlation matrix to the 4x4 reduced state.

    Determinant mapping for the paired sectors: the doubly-occupied weight is
    det v, the empty weight det(I - v); the one-electron populations are the
    diagonal of v minus det v, and the coherence transfers directly.  Raises
    InvalidOccupation when v's eigenvalues leave [0, 1] beyond ``tol``.
    """
    m = v.v
    mean = 0.5 * (m[0, 0].real + m[1, 1].real)
    half = 0.5 * (m[0, 0].real - m[1, 1].real)
    radius = math.sqrt(half * half + abs(0.5 * (m[0, 1] + np.conj(m[1, 0]))) ** 2)
    if mean - radius < -tol or mean + radius > 1.0 + tol:
        raise InvalidOccupation(
            f"occupation eigenvalues [{mean - radius:.3e}, "
            f"{mean + radius:.3e}] leave [0, 1]")
    detv = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real
    return ReducedDensityMatrix(
        rho00=1.0 - m[0, 0].real - m[1, 1].real + detv,
        rho11=m[0, 0].real - detv,
        rho22=m[1, 1].real - detv,
        rho33=detv,
        rho21=complex(m[1, 0]),
    )


def bloch_vector(rho: ReducedDensityMatrix) -> BlochState:
    """One-electron-sector Bloch vector and the weight outside that sector."""
    r = np.array([2.0 * rho.rho21.real,
                  2.0 * rho.rho21.imag,
                  rho.rho11 - rho.rho22])
    return BlochState(r=r, leakage=rho.rho00 + rho.rho33)


def coherence_phase(rho: ReducedDensityMatrix,
                    phase_floor: float = PHASE_FLOOR) -> float:
    """Principal argument of the coherence, in (-pi, pi]."""
    z = rho.rho21
    if abs(z) <= phase_floor:
        raise PhaseUndefined(f"|coherence| = {abs(z):.3e} <= {phase_floor:g}")
    return math.atan2(z.imag, z.real)


def fidelity_to_target(rho: ReducedDensityMatrix, phi: float) -> float:
    """Overlap with the flux-locked one-electron superposition.

    Target amplitude pattern (1, e^{-i phi/2})/sqrt(2) across the two dots;
    evaluated on the unnormalized one-electron block, so leakage outside
    that sector depresses the result.
    """
    return float(0.5 * (rho.rho11 + rho.rho22)
                 + (np.exp(0.5j * phi) * rho.rho21).real)
