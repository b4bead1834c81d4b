"""Eigendecomposition, smoothed level density, unfolding, and level statistics.

Spacings are unfolded with the endpoint-averaged smoothed density,
s~_i = (E_{i+1} - E_i) (Omega(E_i) + Omega(E_{i+1})) / 2, after which
chaoticity is quantified by the level statistics indicator eta: 0 for
Wigner-Dyson (GOE) spacings, 1 for Poisson.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InsufficientDataError, NumericsError, SmoothingError
from .hilbert import SectorOperator

#: first intersection of the Wigner-Dyson and Poisson spacing densities
S0 = 0.4729

#: cumulative references entering the LSI denominator
POISSON_CDF_S0 = 1.0 - np.exp(-S0)
WIGNER_CDF_S0 = 1.0 - np.exp(-np.pi * S0**2 / 4.0)

#: default number of spacings dropped at each spectrum edge before statistics
DEFAULT_TRUNCATE = 10

#: default sliding-window size (levels) for the energy-resolved LSI
DEFAULT_WINDOW_LEVELS = 400

_CHUNK = 512


@dataclass(frozen=True)
class SpectralData:
    """Ascending eigenvalues and the orthonormal modal matrix.

    Column alpha of ``modal_matrix`` is the eigenvector of eigenvalue
    ``eigenvalues[alpha]`` expressed in the sector basis.
    """

    eigenvalues: np.ndarray
    modal_matrix: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.eigenvalues, float)
        if np.any(np.diff(e) < 0):
            raise NumericsError("eigenvalues must be non-decreasing")
        if np.iscomplexobj(self.modal_matrix):
            raise NumericsError("modal matrix must be real")

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class SmoothedCurve:
    """Sample abscissae with kernel-smoothed ordinates."""

    x: np.ndarray
    y: np.ndarray
    bandwidth: float
    normalization: float | None = None
    unreliable: np.ndarray | None = None


@dataclass(frozen=True)
class SpacingSample:
    """Unfolded nearest-neighbor spacings after edge truncation."""

    spacings: np.ndarray
    truncated: int

    def __len__(self):
        return len(self.spacings)


@dataclass(frozen=True)
class SpacingHistogram:
    """Freedman-Diaconis binned spacing density (unit total area)."""

    edges: np.ndarray
    heights: np.ndarray
    fd_width: float
    used_fallback: bool = False

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def eigendecompose(h: SectorOperator | np.ndarray) -> SpectralData:
    """Dense symmetric eigendecomposition with ascending eigenvalues."""
    m = h.dense() if isinstance(h, SectorOperator) else np.asarray(h)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NumericsError("operator must be a square matrix")
    scale = max(np.abs(m).max(), 1e-300)
    if np.abs(m - m.T).max() > 1e-10 * scale:
        raise NumericsError("operator is not symmetric")
    vals, vecs = scipy.linalg.eigh(m)
    return SpectralData(vals, vecs)


def sample_goe(d: int, seed: int) -> SectorOperator:
    """Draw one GOE matrix: off-diagonal std 1, diagonal std sqrt(2), mean 0."""
    if d < 2:
        raise NumericsError("GOE dimension must be at least 2")
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d))
    return SectorOperator(None, (a + a.T) / np.sqrt(2.0))


def reference_pdf(kind: str, x):
    """Reference spacing/component densities, each normalized to 1.

    kinds: ``wigner_dyson`` and ``poisson`` on s >= 0, ``porter_thomas``
    (chi-square with one degree of freedom) on x > 0, ``std_normal`` on
    the real line.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if kind == "wigner_dyson":
        if np.any(arr < 0):
            raise NumericsError("wigner_dyson is defined on s >= 0")
        out = 0.5 * np.pi * arr * np.exp(-0.25 * np.pi * arr**2)
    elif kind == "poisson":
        if np.any(arr < 0):
            raise NumericsError("poisson is defined on s >= 0")
        out = np.exp(-arr)
    elif kind == "porter_thomas":
        if np.any(arr <= 0):
            raise NumericsError("porter_thomas is defined on x > 0")
        out = np.exp(-arr / 2.0) / np.sqrt(2.0 * np.pi * arr)
    elif kind == "std_normal":
        out = np.exp(-(arr**2) / 2.0) / np.sqrt(2.0 * np.pi)
    else:
        raise NumericsError(f"unknown reference pdf {kind!r}")
    return float(out[0]) if scalar else out


def silverman_bandwidth(xs: np.ndarray) -> float:
    """Normal-reference rule 1.06 * std * n^(-1/5)."""
    xs = np.asarray(xs, float)
    s = xs.std()
    if s == 0.0:
        raise SmoothingError("degenerate support: all abscissae identical")
    return 1.06 * s * len(xs) ** (-0.2)


def _nadaraya_watson(eval_x, src_x, ys, h):
    """Gaussian-kernel weighted mean of ys, chunked over eval points."""
    out = np.empty(len(eval_x))
    for lo in range(0, len(eval_x), _CHUNK):
        block = eval_x[lo : lo + _CHUNK, None]
        k = np.exp(-0.5 * ((block - src_x[None, :]) / h) ** 2)
        out[lo : lo + _CHUNK] = (k @ ys) / k.sum(axis=1)
    return out


def _gaussian_kde(eval_x, src_x, h):
    """Count-scaled kernel density: sum of normal kernels, integral = len(src_x)."""
    norm = 1.0 / (h * np.sqrt(2.0 * np.pi))
    out = np.empty(len(eval_x))
    for lo in range(0, len(eval_x), _CHUNK):
        block = eval_x[lo : lo + _CHUNK, None]
        k = np.exp(-0.5 * ((block - src_x[None, :]) / h) ** 2)
        out[lo : lo + _CHUNK] = norm * k.sum(axis=1)
    return out


def kernel_smooth(xs, ys, bandwidth: float | None = None, eval_points=None) -> SmoothedCurve:
    """Nadaraya-Watson estimate of the smooth trend of ys against xs."""
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    if len(xs) < 10:
        raise InsufficientDataError("kernel_smooth needs at least 10 points")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise NumericsError("kernel_smooth inputs must be finite")
    if np.ptp(xs) == 0.0:
        raise SmoothingError("degenerate support: all abscissae identical")
    h = silverman_bandwidth(xs) if bandwidth is None else float(bandwidth)
    ex = xs if eval_points is None else np.asarray(eval_points, float)
    return SmoothedCurve(ex, _nadaraya_watson(ex, xs, ys, h), h)


def level_density(eigs, bandwidth: float | None = None):
    """Kernel-smoothed level density Omega(E), scaled so its integral is the count.

    Returns (curve, e_tilde) where e_tilde is the spectrum normalized to
    unit standard deviation for cross-size comparison.
    """
    eigs = np.asarray(eigs, float)
    if len(eigs) < 50:
        raise InsufficientDataError("level_density needs at least 50 levels")
    h = silverman_bandwidth(eigs) if bandwidth is None else float(bandwidth)
    omega = _gaussian_kde(eigs, eigs, h)
    curve = SmoothedCurve(eigs, omega, h, normalization=float(len(eigs)))
    return curve, eigs / eigs.std()


def density_at(eigs, points, bandwidth: float | None = None) -> np.ndarray:
    """Evaluate the smoothed level density at arbitrary energies."""
    eigs = np.asarray(eigs, float)
    h = silverman_bandwidth(eigs) if bandwidth is None else float(bandwidth)
    return _gaussian_kde(np.atleast_1d(np.asarray(points, float)), eigs, h)


def unfold(eigs, density: SmoothedCurve, truncate: int = DEFAULT_TRUNCATE) -> SpacingSample:
    """Unfold spacings with the endpoint-averaged density, dropping edges."""
    eigs = np.asarray(eigs, float)
    if truncate < 0:
        raise NumericsError("truncate must be non-negative")
    if len(eigs) < 2 * truncate + 50:
        raise InsufficientDataError(
            f"{len(eigs)} levels < 2*truncate + 50 = {2 * truncate + 50}"
        )
    if len(density.y) != len(eigs):
        raise NumericsError("density must be evaluated at every eigenvalue")
    omega = np.asarray(density.y, float)
    s = np.diff(eigs) * 0.5 * (omega[:-1] + omega[1:])
    if truncate:
        s = s[truncate:-truncate]
    return SpacingSample(s, truncate)


def spacing_histogram(sample: SpacingSample) -> SpacingHistogram:
    """Freedman-Diaconis histogram of unfolded spacings, unit total area."""
    s = np.asarray(sample.spacings, float)
    if len(s) < 100:
        raise InsufficientDataError("spacing_histogram needs at least 100 spacings")
    q75, q25 = np.percentile(s, [75, 25])
    iqr = q75 - q25
    if iqr == 0.0:
        edges = np.linspace(0.0, s.max(), 31)
        width = edges[1] - edges[0]
        fallback = True
    else:
        width = 2.0 * iqr * len(s) ** (-1.0 / 3.0)
        nbins = max(1, int(np.ceil((s.max() - s.min()) / width)))
        edges = s.min() + width * np.arange(nbins + 1)
        fallback = False
    heights, edges = np.histogram(s, bins=edges, density=True)
    return SpacingHistogram(edges, heights, width, fallback)


def _eta(spacings: np.ndarray) -> float:
    frac = np.count_nonzero(spacings <= S0) / len(spacings)
    return (frac - WIGNER_CDF_S0) / (POISSON_CDF_S0 - WIGNER_CDF_S0)


def lsi(sample: SpacingSample) -> float:
    """Level statistics indicator: 0 at Wigner-Dyson, 1 at Poisson.

    The spacing density of a finite sample is a sum of Dirac spikes, so
    the integral up to s0 is the fraction of spacings below it; values
    slightly outside [0, 1] are possible and meaningful.
    """
    if len(sample) < 200:
        raise InsufficientDataError("lsi needs at least 200 spacings")
    return _eta(np.asarray(sample.spacings, float))


def lsi_profile(eigs, window_levels: int = DEFAULT_WINDOW_LEVELS,
                bandwidth: float | None = None) -> SmoothedCurve:
    """Energy-resolved LSI from locally unfolded sliding windows.

    A window of ``window_levels`` consecutive levels is centered at every
    eigenvalue (clamped at the spectrum ends, where the estimate is
    flagged unreliable) and unfolded with its own kernel density; eta is
    evaluated on the central half of the window's spacings, whose local
    density is not distorted by the artificial window edges.  The
    resulting eta(E) is Gaussian-smoothed.
    """
    eigs = np.asarray(eigs, float)
    n = len(eigs)
    w = int(window_levels)
    if w < 100:
        raise NumericsError("window_levels must be at least 100")
    if w > n:
        raise NumericsError(f"window of {w} levels exceeds spectrum size {n}")
    half = w // 2
    quarter = w // 4
    eta_by_lo = {}
    etas = np.empty(n)
    unreliable = np.zeros(n, dtype=bool)
    for k in range(n):
        lo = min(max(k - half, 0), n - w)
        unreliable[k] = lo != k - half
        if lo not in eta_by_lo:
            win = eigs[lo : lo + w]
            h = silverman_bandwidth(win)
            omega = _gaussian_kde(win, win, h)
            s = np.diff(win) * 0.5 * (omega[:-1] + omega[1:])
            eta_by_lo[lo] = _eta(s[quarter : len(s) - quarter])
        etas[k] = eta_by_lo[lo]
    smooth = kernel_smooth(eigs, etas, bandwidth=bandwidth)
    return SmoothedCurve(eigs, smooth.y, smooth.bandwidth, unreliable=unreliable)
