"""Eigenbasis time evolution of sector states and thermalization metrics.

With the modal matrix V and eigenvalues E of a sector Hamiltonian, a
state evolves as psi(t) = V (a * exp(-i E t)) where a = V^T psi_0, and
expectation values follow from the eigenbasis-transformed observable
(hbar = 1).  In a fixed-Sz sector the microcanonical value of a single
spin is sz/N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericsError, SectorError
from .hilbert import SectorBasis, SectorOperator, from_bitstring, reflect_bits
from .spectral import SpectralData, SmoothedCurve, silverman_bandwidth

DEFAULT_END_TIME = 100.0
DEFAULT_STEPS = 1000

_SUPPORT_GRID = 512


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid from 0 to ``end`` with ``steps`` points."""

    end: float = DEFAULT_END_TIME
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        if self.end <= 0 or self.steps < 2:
            raise NumericsError("time grid needs end > 0 and at least 2 steps")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.end, self.steps)


@dataclass(frozen=True)
class EvolutionResult:
    """Expectation time series with conservation diagnostics."""

    times: np.ndarray
    values: np.ndarray
    norms: np.ndarray
    initial_label: str
    initial_npc: float


def microcanonical_value(n: int, sz: int) -> float:
    """Thermal per-spin value in the (n, sz) sector: sz/n."""
    if abs(sz) > n or (n - sz) % 2:
        raise SectorError(f"no sector with N={n}, sz={sz}")
    return sz / n


def computational_state(basis: SectorBasis, bits) -> np.ndarray:
    """Unit vector of a computational bit string within a sector basis.

    In a parity basis only reflection-invariant strings are single basis
    vectors; any other bit string spans both parity blocks and requires
    the full sector.
    """
    state = from_bitstring(bits) if isinstance(bits, str) else int(bits)
    if basis.parity != "none" and reflect_bits(state, basis.n) != state:
        raise SectorError(
            "non-palindromic initial state is not parity-pure; "
            "evolve it in the full Sz block"
        )
    k = basis.index_of(state)
    psi = np.zeros(basis.dimension)
    psi[k] = 1.0
    return psi


def reflection_combo_state(basis: SectorBasis, bits) -> np.ndarray:
    """Unit vector of (|b> +- |b~>)/sqrt(2), valid in parity or plain bases."""
    state = from_bitstring(bits) if isinstance(bits, str) else int(bits)
    partner = reflect_bits(state, basis.n)
    if basis.parity != "none":
        k = basis.index_of(min(state, partner))
        psi = np.zeros(basis.dimension)
        psi[k] = 1.0
        return psi
    psi = np.zeros(basis.dimension)
    if state == partner:
        psi[basis.index_of(state)] = 1.0
    else:
        psi[basis.index_of(state)] = 1.0 / np.sqrt(2.0)
        psi[basis.index_of(partner)] = 1.0 / np.sqrt(2.0)
    return psi


def _check_normalized(psi0: np.ndarray) -> np.ndarray:
    psi0 = np.asarray(psi0, float)
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > 1e-8:
        raise NumericsError(f"initial state norm {norm} != 1")
    return psi0


def _real_matmul_complex(m: np.ndarray, z: np.ndarray) -> np.ndarray:
    """m @ z for real m and complex z via two real products."""
    return m @ z.real + 1j * (m @ z.imag)


def evolve_expectation(
    psi0: np.ndarray,
    a: SectorOperator,
    spec: SpectralData,
    grid: TimeGrid | None = None,
    label: str = "",
) -> EvolutionResult:
    """Expectation value <A(t)> along the eigenbasis propagation of psi0."""
    grid = grid or TimeGrid()
    psi0 = _check_normalized(psi0)
    v = spec.modal_matrix
    if len(psi0) != v.shape[0] or a.matrix.shape[0] != v.shape[0]:
        raise NumericsError("state/observable dimensions do not match the spectrum")
    amps = v.T @ psi0
    t = grid.times
    psi_eig = amps[:, None] * np.exp(-1j * np.outer(spec.eigenvalues, t))
    phi = _real_matmul_complex(v, psi_eig)  # state at each time, sector basis
    a_phi = a.matrix @ phi
    vals = np.sum(np.conj(phi) * a_phi, axis=0)
    scale = max(1.0, np.abs(vals).max())
    if np.abs(vals.imag).max() > 1e-10 * scale:
        raise NumericsError("expectation acquired an imaginary part; check inputs")
    norms = np.sqrt(np.sum(np.abs(phi) ** 2, axis=0))
    return EvolutionResult(
        times=t,
        values=vals.real,
        norms=norms,
        initial_label=label,
        initial_npc=float(1.0 / np.sum(amps**4)),
    )


def evolve_sigma_z_batch(
    psi0: np.ndarray,
    basis: SectorBasis,
    spec: SpectralData,
    grid: TimeGrid | None = None,
    label: str = "",
) -> tuple[np.ndarray, np.ndarray, EvolutionResult]:
    """<sigma_i^z(t)> for every spin at once.

    sigma_i^z is diagonal in the computational sector basis, so all N
    series come from one propagation.  Returns (times, values[n, t])
    plus an EvolutionResult for the total Sz (a conservation check).
    Requires a plain (parity "none") basis.
    """
    if basis.parity != "none":
        raise SectorError("batch spin dynamics expects the full Sz block")
    grid = grid or TimeGrid()
    psi0 = _check_normalized(psi0)
    v = spec.modal_matrix
    amps = v.T @ psi0
    t = grid.times
    psi_eig = amps[:, None] * np.exp(-1j * np.outer(spec.eigenvalues, t))
    phi = _real_matmul_complex(v, psi_eig)
    prob = np.abs(phi) ** 2  # (dim, steps)
    values = np.empty((basis.n, len(t)))
    for i in range(1, basis.n + 1):
        z = 1.0 - 2.0 * ((basis.states >> (basis.n - i)) & 1)
        values[i - 1] = z @ prob
    norms = np.sqrt(prob.sum(axis=0))
    total = EvolutionResult(
        times=t,
        values=values.sum(axis=0),
        norms=norms,
        initial_label=label,
        initial_npc=float(1.0 / np.sum(amps**4)),
    )
    return t, values, total


def support_density(
    psi0: np.ndarray,
    spec: SpectralData,
    bandwidth: float | None = None,
) -> tuple[SmoothedCurve, float]:
    """Smoothed eigenbasis support P(E) of a state, plus the projection NPC.

    The density integrates to 1; the returned NPC is exact (no smoothing).
    """
    psi0 = _check_normalized(psi0)
    e = spec.eigenvalues
    amps = spec.modal_matrix.T @ psi0
    weights = amps**2
    total = weights.sum()
    if abs(total - 1.0) > 1e-10:
        raise NumericsError(f"projection weights sum to {total}, not 1")
    h = silverman_bandwidth(e) if bandwidth is None else float(bandwidth)
    pad = 3.0 * h
    xs = np.linspace(e.min() - pad, e.max() + pad, _SUPPORT_GRID)
    norm = 1.0 / (h * np.sqrt(2.0 * np.pi))
    ys = norm * np.exp(-0.5 * ((xs[:, None] - e[None, :]) / h) ** 2) @ weights
    curve = SmoothedCurve(xs, ys, h, normalization=1.0)
    return curve, float(1.0 / np.sum(amps**4))


def support_mean(psi0: np.ndarray, spec: SpectralData) -> float:
    """Energy mean of the eigenbasis support, sum |a_alpha|^2 E_alpha."""
    amps = spec.modal_matrix.T @ _check_normalized(psi0)
    return float(np.sum(amps**2 * spec.eigenvalues))


def highest_npc_state(basis: SectorBasis, spec: SpectralData) -> tuple[int, float]:
    """Basis element whose eigenbasis projection has the largest NPC.

    Returns (basis index, NPC).  Ties resolve to the lower index; rows
    within 1e-6 relative of the maximum count as tied, since reflection
    partners have mathematically equal NPC and differ only by roundoff.
    """
    v4 = spec.modal_matrix**2
    v4 *= v4
    row_npc = 1.0 / v4.sum(axis=1)
    top = row_npc.max()
    j = int(np.flatnonzero(row_npc >= top * (1.0 - 1e-6))[0])
    return j, float(row_npc[j])


def long_time_average(result: EvolutionResult, t_min: float | None = None) -> tuple[float, float]:
    """Time average and rms fluctuation of <A(t)> over [t_min, T]."""
    t = result.times
    if t_min is None:
        t_min = t[-1] / 2.0
    if t_min >= t[-1]:
        raise NumericsError(f"t_min {t_min} leaves an empty averaging window")
    window = result.values[t >= t_min]
    return float(window.mean()), float(window.std())
