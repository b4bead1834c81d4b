"""Static eigenstate expectation values of local observables.

Expectation values of one-body (sigma_i^z) and two-body (pair energy
H_ij = c_ij h_ij) observables are detrended against energy, rescaled to
unit variance, and scanned across system sizes to probe concentration
of measure: for chaotic models the central-window variance shrinks like
the reciprocal level density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InsufficientDataError, NumericsError, SmoothingError
from .hilbert import SectorBasis, SectorOperator, desymmetrize, parity_projector, sector_basis
from .hamiltonian import assemble_sector_hamiltonian, chain_couplings, two_body_term
from .spectral import SpectralData, eigendecompose, density_at, silverman_bandwidth, _nadaraya_watson

DEFAULT_EDGE_FRACTION = 0.1

#: half-width of the E/N window used by the concentration scan
DEFAULT_SCAN_WINDOW = 0.1

MIN_WINDOW_STATES = 50


@dataclass
class ObservableSeries:
    """Per-eigenstate expectation values and their detrended statistics.

    ``trend``..``sampled`` stay None until :func:`detrend_and_rescale`
    completes the series.
    """

    energies: np.ndarray
    values: np.ndarray
    trend: np.ndarray | None = None
    variance: np.ndarray | None = None
    rescaled: np.ndarray | None = None
    sampled: np.ndarray | None = None


@dataclass(frozen=True)
class ConcentrationScan:
    """Size scan of central-window variance against inverse level density."""

    sizes: np.ndarray
    ln_variance: np.ndarray
    ln_inv_density: np.ndarray
    e_star: float
    window: float
    variance_slope: float
    variance_stderr: float
    density_slope: float
    density_stderr: float


def local_sigma_z(i: int, basis: SectorBasis) -> SectorOperator:
    """sigma_i^z on the sector: diagonal +-1 by bit i, conjugated for parity bases."""
    if not 1 <= i <= basis.n:
        raise NumericsError(f"site {i} outside 1..{basis.n}")
    if basis.parity != "none":
        parent = sector_basis(basis.n, basis.sz)
        w = parity_projector(basis)
        op = local_sigma_z(i, parent)
        return SectorOperator(basis, (w.T @ op.matrix @ w).tocsr())
    z = 1.0 - 2.0 * ((basis.states >> (basis.n - i)) & 1)
    return SectorOperator(basis, sp.diags(z).tocsr())


def pair_energy_op(i: int, j: int, c: np.ndarray, basis: SectorBasis) -> SectorOperator:
    """Energy contribution H_ij = c_ij h_ij of the spin pair (i, j)."""
    if not i < j:
        raise NumericsError(f"need i < j, got ({i}, {j})")
    term = two_body_term(i, j, basis)
    return SectorOperator(basis, c[i - 1, j - 1] * term.matrix)


def subsystem_hamiltonian(m: int, c: np.ndarray, basis: SectorBasis) -> SectorOperator:
    """H(m): couplings internal to the first m sites only."""
    if not 1 <= m <= basis.n:
        raise NumericsError(f"subsystem size {m} outside 1..{basis.n}")
    c_sub = np.asarray(c, float).copy()
    c_sub[m:, :] = 0.0
    c_sub[:, m:] = 0.0
    return assemble_sector_hamiltonian(c_sub, basis)


def eigen_expectations(a: SectorOperator, spec: SpectralData) -> ObservableSeries:
    """<E_alpha| A |E_alpha> for every eigenvector."""
    v = spec.modal_matrix
    if a.matrix.shape[0] != v.shape[0]:
        raise NumericsError(
            f"operator dimension {a.matrix.shape[0]} != sector dimension {v.shape[0]}"
        )
    vals = np.sum(v * (a.matrix @ v), axis=0)
    return ObservableSeries(energies=spec.eigenvalues.copy(), values=vals)


def detrend_and_rescale(
    series: ObservableSeries,
    bandwidth: float | None = None,
    edge_fraction: float = DEFAULT_EDGE_FRACTION,
) -> ObservableSeries:
    """Remove the smooth trend g(E) and rescale residuals to unit variance.

    w(E) is the kernel-smoothed squared residual; the outer
    ``edge_fraction`` of the energy range per side is flagged unsampled
    for downstream histograms.
    """
    e, vals = series.energies, series.values
    if len(vals) < 200:
        raise InsufficientDataError("detrend_and_rescale needs at least 200 values")
    h = silverman_bandwidth(e) if bandwidth is None else float(bandwidth)
    trend = _nadaraya_watson(e, e, vals, h)
    resid = vals - trend
    variance = _nadaraya_watson(e, e, resid**2, h)
    lo = e.min() + edge_fraction * np.ptp(e)
    hi = e.max() - edge_fraction * np.ptp(e)
    sampled = (e >= lo) & (e <= hi)
    if np.any(variance[sampled] <= 0.0):
        raise SmoothingError("smoothed variance vanished in the sampled region")
    with np.errstate(divide="ignore", invalid="ignore"):
        rescaled = np.where(variance > 0.0, resid / np.sqrt(variance), np.nan)
    return ObservableSeries(e, vals, trend, variance, rescaled, sampled)


def _scan_one_size(n, model, sites, parity, e_star, window):
    c = chain_couplings(n, "nearest_neighbor" if model == "chain_nn" else "long_range")
    basis = sector_basis(n, 1 if n % 2 else 2)
    h = assemble_sector_hamiltonian(c, basis)
    if parity != "none":
        sym, anti = desymmetrize(h)
        op_h = sym if parity == "symmetric" else anti
        basis = op_h.basis
        h = op_h
    spec = eigendecompose(h)
    series = eigen_expectations(pair_energy_op(sites[0], sites[1], c, basis), spec)
    center = n * e_star
    mask = np.abs(series.energies / n - e_star) <= window
    if np.count_nonzero(mask) < MIN_WINDOW_STATES:
        raise InsufficientDataError(
            f"window around E/N={e_star} holds {np.count_nonzero(mask)} "
            f"< {MIN_WINDOW_STATES} eigenstates at N={n}"
        )
    variance = float(np.var(series.values[mask]))
    omega = float(density_at(series.energies, center)[0])
    return np.log(variance), -np.log(omega)


def concentration_scan(
    sizes,
    sites=(4, 5),
    model: str = "chain",
    parity: str = "none",
    e_star: float = 0.0,
    window: float = DEFAULT_SCAN_WINDOW,
) -> ConcentrationScan:
    """Variance-vs-density scaling of a fixed-site pair observable.

    For each size the chain is built and diagonalized, the variance of
    <H_ij> over eigenstates with |E/N - e_star| <= window is recorded
    together with the reciprocal level density at the window center, and
    both log-series are fitted linearly against N.
    """
    sizes = np.asarray(sorted(sizes), int)
    if len(sizes) < 3:
        raise NumericsError("concentration scan needs at least 3 sizes")
    if len(set(sizes % 2)) != 1:
        raise NumericsError("all sizes must share parity so the sector rule matches")
    if model not in ("chain", "chain_nn"):
        raise NumericsError(f"concentration scan supports chain models, not {model!r}")
    ln_v = np.empty(len(sizes))
    ln_id = np.empty(len(sizes))
    for k, n in enumerate(sizes):
        ln_v[k], ln_id[k] = _scan_one_size(int(n), model, sites, parity, e_star, window)
    v_slope, v_err = _fit_slope(sizes, ln_v)
    d_slope, d_err = _fit_slope(sizes, ln_id)
    return ConcentrationScan(
        sizes, ln_v, ln_id, e_star, window, v_slope, v_err, d_slope, d_err
    )


def _fit_slope(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    return float(slope), float(np.sqrt(cov[0, 0]))
