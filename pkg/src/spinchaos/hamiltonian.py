"""Geometry-derived couplings and secular dipolar Hamiltonian assembly.

The model is H = sum_{i<j} c_ij h_ij with the two-body operator
h_ij = XX + YY - 2 ZZ, i.e. off-diagonal 2 between states related by a
single 0<->1 swap at sites (i, j) and diagonal -2 z_i z_j (z = +1 for an
up bit).  Couplings come from c_ij = (3 cos^2 theta_ij - 1) / (2 r_ij^p)
with the angle measured against the external field axis; the overall
dipolar constant is set to 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import GeometryError, NumericsError, ResourceError
from .hilbert import SectorBasis, SectorOperator, parity_projector

Z_AXIS = np.array([0.0, 0.0, 1.0])

#: pairs closer than this (lattice units) trigger the anti-clustering warning
CLUSTER_RADIUS = 0.3

#: default anisotropy of h_ij = XX + YY + ising * ZZ; 0 gives the XX model
SECULAR_ISING = -2.0

# 14-site FCC unit cell transcribed from the reference lattice listing:
# 7 cube corners plus 6 face centers, with the 8th corner (0,0,0) displaced
# to break every spatial symmetry ("rogue" site, index 1).
FCC_POSITIONS = np.array(
    [
        [-0.15, -0.3, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.5, 0.5],
        [0.0, 1.0, 0.0],
        [0.0, 1.0, 1.0],
        [1.0, 0.0, 0.0],
        [1.0, 0.0, 1.0],
        [1.0, 0.5, 0.5],
        [1.0, 1.0, 0.0],
        [1.0, 1.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.5, 0.5, 1.0],
        [0.5, 1.0, 0.5],
        [0.5, 0.0, 0.5],
    ]
)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
#: y Pauli matrix in the sign convention of the source material; only
#: products sigma_y x sigma_y enter H, which both conventions share.
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class SpinGeometry:
    """Site positions plus field axis; everything needed to form c_ij."""

    positions: np.ndarray
    field_axis: np.ndarray = field(default_factory=lambda: Z_AXIS.copy())
    exponent: float = 3.0
    model: str = "custom"  # chain | chain_nn | fcc | custom
    legacy_3d_scale: bool = False

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.shape[1] != 3:
            raise GeometryError("positions must be 3-vectors")
        object.__setattr__(self, "positions", pos)
        axis = np.asarray(self.field_axis, dtype=float)
        norm = np.linalg.norm(axis)
        if norm == 0:
            raise GeometryError("field axis must be a nonzero vector")
        object.__setattr__(self, "field_axis", axis / norm)
        if self.exponent <= 0:
            raise GeometryError("coupling exponent must be positive")

    @property
    def n(self) -> int:
        return len(self.positions)


def chain_geometry(n: int, variant: str = "long_range", p: float = 3.0) -> SpinGeometry:
    """Open chain of n equally spaced sites, field perpendicular to it."""
    if n < 2:
        raise GeometryError("chain needs at least 2 sites")
    pos = np.zeros((n, 3))
    pos[:, 0] = np.arange(n)
    model = "chain" if variant == "long_range" else "chain_nn"
    return SpinGeometry(pos, model=model, exponent=p)


def fcc_geometry(positions=None, legacy_3d_scale: bool = False) -> SpinGeometry:
    """Default 14-site FCC cell with the rogue site; positions may override."""
    pos = FCC_POSITIONS if positions is None else np.asarray(positions, float)
    return SpinGeometry(pos, model="fcc", legacy_3d_scale=legacy_3d_scale)


def couplings(geometry: SpinGeometry) -> np.ndarray:
    """Secular dipolar coupling matrix c_ij for an arbitrary geometry.

    cos(theta_ij) is the projection of the pair separation on the field
    axis.  With ``legacy_3d_scale`` the historical 3D normalization
    without the 1/2 is used; this is a global factor and leaves every
    statistic after unfolding unchanged.
    """
    pos = geometry.positions
    n = geometry.n
    diff = pos[:, None, :] - pos[None, :, :]
    r = np.linalg.norm(diff, axis=2)
    off = ~np.eye(n, dtype=bool)
    if np.any(r[off] == 0):
        raise GeometryError("coincident sites in geometry")
    if np.any(r[off] < CLUSTER_RADIUS):
        warnings.warn(
            f"site pair closer than {CLUSTER_RADIUS} lattice units; clusters "
            "act as nearly isolated subsystems and obscure spectral statistics",
            stacklevel=2,
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        cos = (diff @ geometry.field_axis) / r
    c = np.zeros((n, n))
    scale = 1.0 if geometry.legacy_3d_scale else 2.0
    c[off] = (3.0 * cos[off] ** 2 - 1.0) / (scale * r[off] ** geometry.exponent)
    if geometry.model == "chain_nn":
        nn = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) == 1
        c[~nn] = 0.0
    return c


def chain_couplings(n: int, variant: str = "long_range", p: float = 3.0) -> np.ndarray:
    """c_ij for the open chain: -1/(2 r^p), optionally nearest-neighbor only."""
    if variant not in ("long_range", "nearest_neighbor"):
        raise NumericsError(f"unknown chain variant {variant!r}")
    return couplings(chain_geometry(n, variant, p))


def fcc_couplings(geometry: SpinGeometry | None = None) -> np.ndarray:
    """c_ij for the FCC lattice (default geometry with the rogue site)."""
    return couplings(fcc_geometry() if geometry is None else geometry)


def _pair_terms(states: np.ndarray, n: int, i: int, j: int):
    """Sector action of the (i, j) two-body operator.

    Returns (src, dst, zz): indices of flip-flop-connected state pairs and
    the diagonal z_i * z_j values.  Site numbering is 1-based with site 1
    on the leftmost (most significant) bit.
    """
    if not (1 <= i < j <= n):
        raise NumericsError(f"need 1 <= i < j <= N, got ({i}, {j}) with N={n}")
    bit_i = np.int64(1) << (n - i)
    bit_j = np.int64(1) << (n - j)
    zi = 1 - 2 * ((states >> (n - i)) & 1)
    zj = 1 - 2 * ((states >> (n - j)) & 1)
    src = np.flatnonzero(zi != zj)
    dst = np.searchsorted(states, states[src] ^ (bit_i | bit_j))
    return src, dst, (zi * zj).astype(float)


def two_body_term(i: int, j: int, basis: SectorBasis, ising: float = SECULAR_ISING) -> SectorOperator:
    """Matrix of h_ij = XX + YY + ising * ZZ restricted to the sector.

    Matrix elements vanish unless the Hamming distance between bra and
    ket is 0 (Ising part) or exactly 2 with the differing bits at sites
    i and j (flip-flop part, amplitude 2).
    """
    if basis.parity != "none":
        from .hilbert import sector_basis

        op = two_body_term(i, j, sector_basis(basis.n, basis.sz), ising)
        w = parity_projector(basis)
        return SectorOperator(basis, (w.T @ op.matrix @ w).tocsr())
    src, dst, zz = _pair_terms(basis.states, basis.n, i, j)
    d = basis.dimension
    flip = sp.coo_matrix(
        (np.full(len(src), 2.0), (src, dst)), shape=(d, d)
    ).tocsr()
    return SectorOperator(basis, flip + sp.diags(ising * zz))


def assemble_sector_hamiltonian(
    c: np.ndarray,
    basis: SectorBasis,
    ising: float = SECULAR_ISING,
    dim_cap: int | None = None,
) -> SectorOperator:
    """Assemble H = sum_{i<j} c_ij h_ij directly within the sector.

    The full 2^N matrix is never materialized.  For a desymmetrized basis
    the parity projection is applied after assembling on the parent
    sector.  ``dim_cap`` guards against sectors too large to handle.
    """
    if dim_cap is not None and basis.dimension > dim_cap:
        raise ResourceError(
            f"sector dimension {basis.dimension} exceeds cap {dim_cap}; "
            "raise the memory cap to proceed"
        )
    if basis.parity != "none":
        from .hilbert import sector_basis

        parent = sector_basis(basis.n, basis.sz)
        h = assemble_sector_hamiltonian(c, parent, ising)
        w = parity_projector(basis)
        return SectorOperator(basis, (w.T @ h.matrix @ w).tocsr())

    states = basis.states
    n = basis.n
    d = basis.dimension
    c = np.asarray(c, dtype=float)
    if c.shape != (n, n):
        raise NumericsError(f"coupling matrix shape {c.shape} != ({n}, {n})")
    diag = np.zeros(d)
    rows, cols, vals = [], [], []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            cij = c[i - 1, j - 1]
            if cij == 0.0:
                continue
            src, dst, zz = _pair_terms(states, n, i, j)
            diag += (ising * cij) * zz
            rows.append(src)
            cols.append(dst)
            vals.append(np.full(len(src), 2.0 * cij))
    if rows:
        flip = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(d, d),
        ).tocsr()
        h = flip + sp.diags(diag)
    else:
        h = sp.diags(diag)
    return SectorOperator(basis, sp.csr_matrix(h))


def two_spin_full_dipolar(theta: float, phi: float, r: float) -> np.ndarray:
    """Full (non-secular) two-spin dipolar matrix in the basis {uu, ud, du, dd}.

    Builds the six alphabet terms A..F with prefactor 1/r^3; zeroing the
    C-F terms leaves exactly c12 * h12 with c12 = (3 cos^2 theta - 1)/(2 r^3).
    """
    if r <= 0:
        raise NumericsError("separation r must be positive")
    ct, st = np.cos(theta), np.sin(theta)
    kron = np.kron
    a = (1.0 - 3.0 * ct**2) * kron(SIGMA_Z, SIGMA_Z)
    b = (3.0 * ct**2 - 1.0) * (kron(SIGMA_PLUS, SIGMA_MINUS) + kron(SIGMA_MINUS, SIGMA_PLUS))
    c = 3.0 * st * ct * np.exp(-1j * phi) * (kron(SIGMA_PLUS, SIGMA_Z) + kron(SIGMA_Z, SIGMA_PLUS))
    d = 3.0 * st * ct * np.exp(1j * phi) * (kron(SIGMA_MINUS, SIGMA_Z) + kron(SIGMA_Z, SIGMA_MINUS))
    e = -3.0 * st**2 * np.exp(-2j * phi) * kron(SIGMA_PLUS, SIGMA_PLUS)
    f = -3.0 * st**2 * np.exp(2j * phi) * kron(SIGMA_MINUS, SIGMA_MINUS)
    return (a + b + c + d + e + f) / r**3


def two_spin_secular(theta: float, r: float) -> np.ndarray:
    """Secular limit of :func:`two_spin_full_dipolar` (terms A + B only)."""
    if r <= 0:
        raise NumericsError("separation r must be positive")
    ct = np.cos(theta)
    c12 = (3.0 * ct**2 - 1.0) / (2.0 * r**3)
    h12 = (
        np.kron(SIGMA_X, SIGMA_X) + np.kron(SIGMA_Y, SIGMA_Y) - 2.0 * np.kron(SIGMA_Z, SIGMA_Z)
    )
    return c12 * h12


def write_operator_coo(op: SectorOperator, path) -> None:
    """Export an operator as coordinate-list text: row col value (17 digits)."""
    m = sp.coo_matrix(op.matrix)
    with open(path, "w") as fh:
        fh.write("row col value\n")
        for r_, c_, v in zip(m.row, m.col, m.data):
            fh.write(f"{r_} {c_} {v:.17g}\n")
