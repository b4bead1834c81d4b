import os

# OpenBLAS defaults to its compiled-in maximum thread count, which
# oversubscribes small machines catastrophically on large matmuls
os.environ.setdefault("OPENBLAS_NUM_THREADS", str(os.cpu_count() or 2))
try:
    import threadpoolctl

    threadpoolctl.threadpool_limits(os.cpu_count() or 2)
except ImportError:  # pragma: no cover
    pass

import numpy as np
import pytest

from spinchaos import (
    assemble_sector_hamiltonian,
    chain_couplings,
    desymmetrize,
    eigendecompose,
    fcc_couplings,
    sample_goe,
    sector_basis,
)

GOE_SEED = 57
GOE_DIM = 3000


def chain_sym_spectrum(n, variant="long_range"):
    c = chain_couplings(n, variant)
    basis = sector_basis(n, 1 if n % 2 else 2)
    sym, _ = desymmetrize(assemble_sector_hamiltonian(c, basis))
    return sym.basis, c, eigendecompose(sym)


@pytest.fixture(scope="session")
def chain13_sym():
    """1D dipolar N=13, symmetric sector (dimension 868)."""
    return chain_sym_spectrum(13)


@pytest.fixture(scope="session")
def chain15_sym():
    """1D dipolar N=15, symmetric sector (dimension 3235)."""
    return chain_sym_spectrum(15)


@pytest.fixture(scope="session")
def chain15_nn_sym():
    """1D nearest-neighbor N=15, symmetric sector."""
    return chain_sym_spectrum(15, "nearest_neighbor")


@pytest.fixture(scope="session")
def chain15_full():
    """1D dipolar N=15, full Sz=+1 block (dimension 6435)."""
    basis = sector_basis(15, 1)
    c = chain_couplings(15)
    return basis, c, eigendecompose(assemble_sector_hamiltonian(c, basis))


@pytest.fixture(scope="session")
def chain15_xx_full():
    """1D XX model N=15 (Ising term zero), full Sz=+1 block."""
    basis = sector_basis(15, 1)
    c = chain_couplings(15)
    return basis, c, eigendecompose(assemble_sector_hamiltonian(c, basis, ising=0.0))


@pytest.fixture(scope="session")
def fcc14():
    """3D FCC N=14, Sz=+2 block (dimension 3003)."""
    basis = sector_basis(14, 2)
    c = fcc_couplings()
    return basis, c, eigendecompose(assemble_sector_hamiltonian(c, basis))


@pytest.fixture(scope="session")
def goe_reference():
    """Fixed-seed GOE sample at the acceptance dimension."""
    return eigendecompose(sample_goe(GOE_DIM, GOE_SEED))
