"""Bit-string bases for fixed total spin and reflection desymmetrization.

Convention used throughout the package: a basis state of N spins is an
N-bit string where bit value 0 means up-spin and 1 means down-spin.  Spin
k (1-based, leftmost character of the written string) sits at integer bit
position N - k, so the written string is just the binary representation
of the state index.  Total spin is counted in units of 1:
sz = n_up - n_down = N - 2 * (number of set bits).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.sparse as sp

from .errors import SectorError, SymmetryError

PARITIES = ("none", "symmetric", "antisymmetric")

MAX_SPINS = 24

#: tolerance for reflection commutation checks
REFLECTION_TOL = 1e-10


def to_bitstring(state: int, n: int) -> str:
    """Written form of a basis state, spin 1 leftmost."""
    return format(int(state), f"0{n}b")


def from_bitstring(bits: str) -> int:
    """Inverse of :func:`to_bitstring`; raises on non-binary characters."""
    if not bits or set(bits) - {"0", "1"}:
        raise SectorError(f"not a bit string: {bits!r}")
    return int(bits, 2)


def reflect_bits(state, n: int):
    """Reflect an N-bit string about its center (bit k -> bit N+1-k).

    Accepts a single integer or an integer array; the reflection is an
    involution either way.
    """
    b = np.asarray(state)
    out = np.zeros_like(b)
    for k in range(n):
        out = (out << 1) | ((b >> k) & 1)
    if np.isscalar(state) or isinstance(state, (int, np.integer)):
        return int(out)
    return out


@dataclass(frozen=True)
class SectorBasis:
    """Ordered basis of one total-Sz block, optionally desymmetrized.

    For ``parity == "none"`` the elements are the plain bit strings in
    ``states`` (ascending).  For a parity basis, element k is the
    normalized combination (|b> +/- |b~>)/sqrt(2) with b = states[k] and
    b~ = partners[k]; reflection-invariant strings appear with
    partners[k] == states[k] and carry no 1/sqrt(2) factor.
    """

    n: int
    sz: int
    states: np.ndarray
    parity: str = "none"
    partners: np.ndarray | None = None

    def __post_init__(self):
        if self.parity not in PARITIES:
            raise SectorError(f"unknown parity {self.parity!r}")

    @property
    def dimension(self) -> int:
        return len(self.states)

    @property
    def weight(self) -> int:
        """Number of down-spins (set bits) in every member."""
        return (self.n - self.sz) // 2

    @property
    def combo_map(self):
        """Per-element combination: (b,) for invariant states, else (b, b~)."""
        if self.partners is None:
            return tuple((int(b),) for b in self.states)
        return tuple(
            (int(b),) if b == p else (int(b), int(p))
            for b, p in zip(self.states, self.partners)
        )

    def bitstrings(self):
        return [to_bitstring(b, self.n) for b in self.states]

    def index_of(self, state: int) -> int:
        """Position of a bit string in this basis (representative for pairs)."""
        k = int(np.searchsorted(self.states, state))
        if k < self.dimension and self.states[k] == state:
            return k
        raise SectorError(
            f"state {to_bitstring(state, self.n)} not in sector "
            f"(N={self.n}, sz={self.sz}, parity={self.parity})"
        )


@dataclass(frozen=True)
class SectorOperator:
    """Real symmetric operator restricted to a SectorBasis.

    ``matrix`` may be a scipy sparse matrix (assembly) or a dense ndarray
    (diagonalization); ``basis`` is None for synthetic ensembles such as
    GOE samples.
    """

    basis: SectorBasis | None
    matrix: object

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix)


@dataclass(frozen=True)
class SymmetrySectorTransform:
    """Orthogonal change of basis splitting a sector into parity blocks.

    Columns of ``matrix`` are the symmetric combinations followed by the
    antisymmetric ones, expressed in the source basis.
    """

    source: SectorBasis
    symmetric: SectorBasis
    antisymmetric: SectorBasis
    matrix: sp.csr_matrix


def sector_basis(n: int, sz: int) -> SectorBasis:
    """Enumerate the total-spin block with n_up - n_down = sz.

    States are listed in ascending integer order; the dimension is
    C(N, (N - sz)/2).
    """
    if not 1 <= n <= MAX_SPINS:
        raise SectorError(f"spin count {n} outside 1..{MAX_SPINS}")
    if abs(sz) > n or (n - sz) % 2:
        raise SectorError(f"no sector with N={n}, sz={sz} (parity mismatch)")
    w = (n - sz) // 2
    every = np.arange(1 << n, dtype=np.int64)
    states = every[np.bitwise_count(every) == w]
    assert len(states) == comb(n, w)
    return SectorBasis(n=n, sz=sz, states=states)


def default_sz(n: int) -> int:
    """Sector picked by default: +1 for odd N, +2 for even N."""
    return 1 if n % 2 else 2


def reflection_transform(basis: SectorBasis) -> SymmetrySectorTransform:
    """Build the orthogonal transform onto reflection parity combinations.

    Pairs (b, b~) produce one symmetric and one antisymmetric column;
    reflection-invariant strings go to the symmetric block unchanged.
    """
    if basis.parity != "none":
        raise SectorError("basis is already desymmetrized")
    states = basis.states
    refl = reflect_bits(states, basis.n)
    partner_idx = np.searchsorted(states, refl)

    invariant = refl == states
    rep = refl >= states  # palindromes plus the smaller member of each pair
    sym_states = states[rep]
    sym_partners = refl[rep]
    anti_keep = refl > states
    anti_states = states[anti_keep]
    anti_partners = refl[anti_keep]

    sym = SectorBasis(basis.n, basis.sz, sym_states, "symmetric", sym_partners)
    anti = SectorBasis(basis.n, basis.sz, anti_states, "antisymmetric", anti_partners)

    d = basis.dimension
    root = 1.0 / np.sqrt(2.0)
    rows, cols, vals = [], [], []
    col = 0
    for k in np.flatnonzero(rep):
        if invariant[k]:
            rows.append(k)
            cols.append(col)
            vals.append(1.0)
        else:
            rows += [k, partner_idx[k]]
            cols += [col, col]
            vals += [root, root]
        col += 1
    for k in np.flatnonzero(anti_keep):
        rows += [k, partner_idx[k]]
        cols += [col, col]
        vals += [root, -root]
        col += 1
    u = sp.csr_matrix((vals, (rows, cols)), shape=(d, d))
    return SymmetrySectorTransform(basis, sym, anti, u)


def parity_projector(basis: SectorBasis) -> sp.csr_matrix:
    """Columns of the parent-sector vectors spanning a parity basis."""
    if basis.parity == "none":
        raise SectorError("plain basis needs no projector")
    parent = sector_basis(basis.n, basis.sz)
    idx_b = np.searchsorted(parent.states, basis.states)
    idx_p = np.searchsorted(parent.states, basis.partners)
    sign = 1.0 if basis.parity == "symmetric" else -1.0
    root = 1.0 / np.sqrt(2.0)
    rows, cols, vals = [], [], []
    for k in range(basis.dimension):
        if idx_b[k] == idx_p[k]:
            rows.append(idx_b[k])
            cols.append(k)
            vals.append(1.0)
        else:
            rows += [idx_b[k], idx_p[k]]
            cols += [k, k]
            vals += [root, sign * root]
    return sp.csr_matrix((vals, (rows, cols)), shape=(parent.dimension, basis.dimension))


def desymmetrize(op: SectorOperator) -> tuple[SectorOperator, SectorOperator]:
    """Split a sector operator into its reflection-symmetric and -antisymmetric blocks.

    The operator must commute with the reflection permutation (checked to
    1e-10); the union of the two blocks' spectra is the spectrum of the
    input.
    """
    basis = op.basis
    if basis is None or basis.parity != "none":
        raise SectorError("desymmetrize needs an operator on a plain sector basis")
    transform = reflection_transform(basis)

    h = sp.csr_matrix(op.matrix) if not sp.issparse(op.matrix) else op.matrix.tocsr()
    refl = reflect_bits(basis.states, basis.n)
    perm = np.searchsorted(basis.states, refl)
    mismatch = abs(h[perm][:, perm] - h).max()
    if mismatch > REFLECTION_TOL:
        raise SymmetryError(
            f"operator does not commute with reflection (residual {mismatch:.2e}); "
            "geometry has no mirror symmetry"
        )

    d_sym = transform.symmetric.dimension
    u = transform.matrix
    rotated = (u.T @ h @ u).tocsr()
    return (
        SectorOperator(transform.symmetric, rotated[:d_sym, :d_sym]),
        SectorOperator(transform.antisymmetric, rotated[d_sym:, d_sym:]),
    )


def write_basis_csv(basis: SectorBasis, path) -> None:
    """Dump a basis as CSV with columns (index, integer, bitstring, weight)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "integer", "bitstring", "weight"])
        for k, b in enumerate(basis.states):
            writer.writerow([k, int(b), to_bitstring(b, basis.n), int(b).bit_count()])
