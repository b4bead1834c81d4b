"""Eigenvector delocalization statistics and component unfolding.

The number of principal components xi = 1/sum|v_n|^4 measures how many
basis states a unit vector spreads over; GOE eigenvectors average
(D + 2)/3.  Components are compared against the normal/Porter-Thomas
references only after removing the smooth energy dependence of their
variance, mirroring the spectral unfolding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericsError, SelectionEmptyError, SmoothingError
from .spectral import SpectralData, silverman_bandwidth

#: default number of eigenvectors sampled for component statistics
DEFAULT_VECTORS = 100

#: rows with NPC below this carry basis-specific structure and are skipped
DEFAULT_ROW_MIN = 100.0

#: fraction of the energy range excluded per side when sampling components
DEFAULT_EDGE_FRACTION = 0.1


def goe_mean_npc(d: int) -> float:
    """GOE ensemble average of the NPC, (D + 2)/3."""
    return (d + 2) / 3.0


@dataclass(frozen=True)
class NpcProfile:
    """Row- and column-wise NPC of a modal matrix, plus the GOE reference."""

    column_npc: np.ndarray
    row_npc: np.ndarray
    reference: float

    @property
    def dimension(self) -> int:
        return len(self.column_npc)


class ComponentSelection(NamedTuple):
    columns: np.ndarray
    rows: np.ndarray
    n_vectors: int
    row_min: float


@dataclass(frozen=True)
class ComponentSample:
    """Variance-rescaled eigenvector components with their provenance."""

    rescaled: np.ndarray  # (n_rows, n_cols)
    raw: np.ndarray  # matching unrescaled components
    rows: np.ndarray
    columns: np.ndarray
    energies: np.ndarray  # of the sampled columns
    n_vectors: int
    row_min: float
    edge_fraction: float

    @property
    def values(self) -> np.ndarray:
        return self.rescaled.ravel()

    @property
    def count(self) -> int:
        return self.rescaled.size


def npc(v) -> float:
    """NPC of a single unit vector; 1 for one-hot, D for flat."""
    v = np.asarray(v, float)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-8:
        raise NumericsError(f"vector norm {norm} != 1")
    return float(1.0 / np.sum(v**4))


def npc_profile(spec: SpectralData) -> NpcProfile:
    """Column NPC per eigenvector (energy order) and row NPC per basis state."""
    v4 = spec.modal_matrix**2
    v4 *= v4
    return NpcProfile(
        column_npc=1.0 / v4.sum(axis=0),
        row_npc=1.0 / v4.sum(axis=1),
        reference=goe_mean_npc(spec.dimension),
    )


def select_components(
    profile: NpcProfile,
    n_vectors: int = DEFAULT_VECTORS,
    row_min: float = DEFAULT_ROW_MIN,
) -> ComponentSelection:
    """Pick the eigenvectors closest in NPC to the GOE mean and the usable rows.

    Ties in the closest-to rule go to lower energy.  Rows must exceed
    ``row_min`` in NPC so their variance unfolding stays reliable.
    """
    d = profile.dimension
    if d <= n_vectors:
        raise NumericsError(f"need more than {n_vectors} eigenvectors, have {d}")
    order = np.argsort(np.abs(profile.column_npc - profile.reference), kind="stable")
    columns = np.sort(order[:n_vectors])
    rows = np.flatnonzero(profile.row_npc > row_min)
    if len(rows) == 0:
        raise SelectionEmptyError(f"no rows with NPC > {row_min}")
    return ComponentSelection(columns, rows, n_vectors, float(row_min))


def unfold_components(
    spec: SpectralData,
    selection: ComponentSelection,
    bandwidth: float | None = None,
    edge_fraction: float = DEFAULT_EDGE_FRACTION,
) -> ComponentSample:
    """Rescale selected components by the smoothed variance trend.

    For each selected row i the squared components |c_i^alpha|^2 are
    kernel-smoothed against energy to f_i(E); the sample collects
    c_i^alpha / sqrt(f_i(E_alpha)) over the selected columns, skipping
    the outer ``edge_fraction`` of the energy range per side where the
    smoother is least reliable.
    """
    if len(selection.columns) == 0 or len(selection.rows) == 0:
        raise SelectionEmptyError("empty component selection")
    e = spec.eigenvalues
    v = spec.modal_matrix
    lo = e.min() + edge_fraction * np.ptp(e)
    hi = e.max() - edge_fraction * np.ptp(e)
    cols = selection.columns[(e[selection.columns] >= lo) & (e[selection.columns] <= hi)]
    if len(cols) == 0:
        raise SelectionEmptyError("edge exclusion removed every selected column")
    h = silverman_bandwidth(e) if bandwidth is None else float(bandwidth)

    # shared kernel: every row smooths against the same abscissae
    k = np.exp(-0.5 * ((e[cols][:, None] - e[None, :]) / h) ** 2)
    denom = k.sum(axis=1)
    y = v[selection.rows, :] ** 2
    f = (y @ k.T) / denom
    if np.any(f <= 0.0):
        raise SmoothingError("smoothed component variance vanished; increase bandwidth")
    raw = v[np.ix_(selection.rows, cols)]
    return ComponentSample(
        rescaled=raw / np.sqrt(f),
        raw=raw,
        rows=selection.rows,
        columns=cols,
        energies=e[cols],
        n_vectors=selection.n_vectors,
        row_min=selection.row_min,
        edge_fraction=edge_fraction,
    )
