"""Brute-force cross-check: explicit finite leads, exact one-body evolution.

Each reservoir becomes N sharp modes on a uniform grid with flat couplings
reproducing the target linewidths.  The closed dots+leads problem is
quadratic, so the full correlation matrix evolves exactly through one dense
Hermitian eigendecomposition, and the dot state follows from its 2x2 block by
the same determinant mapping as the main pipeline.  Nothing here touches the
frequency-quadrature code paths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BathParams, DeviceParams, fermi
from .propagator import OccupationMatrix
from .state import ReducedDensityMatrix, assemble_rho


@dataclass(frozen=True)
class DiscretizedLeadModel:
    n_modes: int
    half_bandwidth: float
    mode_energies: np.ndarray          # shared by both leads (uniform grid)
    couplings_left: np.ndarray         # per-dot amplitude to every left mode
    couplings_right: np.ndarray
    hamiltonian: np.ndarray = field(repr=False)
    initial_occupations: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def delta_eps(self) -> float:
        return 2.0 * self.half_bandwidth / self.n_modes

    @property
    def recurrence_time(self) -> float:
        return 2.0 * math.pi / self.delta_eps


@dataclass(frozen=True)
class CorrelationMatrix:
    c: np.ndarray
    time: float


def build_model(device: DeviceParams, bath: BathParams, n_modes: int = 400,
                lead_bandwidth: float = 20.0) -> DiscretizedLeadModel:
    """Assemble and diagonalize the finite dots+leads Hamiltonian.

    Mode energies sit at midpoints of a uniform grid over the lead band;
    each |coupling|^2 equals gamma * grid_spacing / 2pi, and the coupling
    phases split the loop phase as +-phi/4 per arm.  Dots start empty, lead
    modes thermally occupied.
    """
    if n_modes < 2:
        raise ValueError("need at least 2 modes per lead")
    deps = 2.0 * lead_bandwidth / n_modes
    eps = -lead_bandwidth + (np.arange(n_modes) + 0.5) * deps
    phase = np.exp(0.25j * device.phi)
    vl = math.sqrt(device.gamma_l * deps / (2.0 * math.pi)) * \
        np.array([np.conj(phase), phase])
    vr = math.sqrt(device.gamma_r * deps / (2.0 * math.pi)) * \
        np.array([phase, np.conj(phase)])

    n = 2 + 2 * n_modes
    h = np.zeros((n, n), dtype=complex)
    h[0, 0], h[1, 1] = device.e1, device.e2
    left = slice(2, 2 + n_modes)
    right = slice(2 + n_modes, n)
    h[left, left] = np.diag(eps)
    h[right, right] = np.diag(eps)
    for d in range(2):
        h[d, left] = vl[d]
        h[left, d] = np.conj(vl[d])
        h[d, right] = vr[d]
        h[right, d] = np.conj(vr[d])

    occ = np.concatenate([
        np.zeros(2),
        np.atleast_1d(fermi(eps, bath.mu_l, bath.temperature)),
        np.atleast_1d(fermi(eps, bath.mu_r, bath.temperature)),
    ])
    vals, vecs = np.linalg.eigh(h)
    return DiscretizedLeadModel(
        n_modes=n_modes, half_bandwidth=lead_bandwidth, mode_energies=eps,
        couplings_left=vl, couplings_right=vr, hamiltonian=h,
        initial_occupations=occ, eigenvalues=vals, eigenvectors=vecs)


def evolve(model: DiscretizedLeadModel, t: float) -> CorrelationMatrix:
    """Exact correlation matrix at time t (full system, O(n^3) per call)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    u = (model.eigenvectors * np.exp(-1j * model.eigenvalues * t)) \
        @ model.eigenvectors.conj().T
    c = (u * model.initial_occupations) @ u.conj().T
    return CorrelationMatrix(c=c, time=float(t))


def dot_occupation(model: DiscretizedLeadModel, t: float) -> OccupationMatrix:
    """Dot-block correlation matrix at time t, O(n^2) per call.

    Only the two dot rows of the evolution operator are formed.  The stored
    convention indexes correlations as <a_col^dag a_row>, so the block is
    transposed into the pipeline's <a_row^dag a_col> storage.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    u2 = (model.eigenvectors[:2, :] * np.exp(-1j * model.eigenvalues * t)) \
        @ model.eigenvectors.conj().T
    block = (u2 * model.initial_occupations) @ u2.conj().T
    return OccupationMatrix(v=block.T.copy(), time=float(t))


def reduced_rho(model: DiscretizedLeadModel,
                c: CorrelationMatrix) -> ReducedDensityMatrix:
    """Dot density matrix from a full correlation matrix via its 2x2 block."""
    block = c.c[:2, :2]
    return assemble_rho(OccupationMatrix(v=block.T.copy(), time=c.time))


def comparison_window(model: DiscretizedLeadModel) -> float:
    """Largest time at which finite-size recurrences are guaranteed absent."""
    return 0.5 * model.recurrence_time
