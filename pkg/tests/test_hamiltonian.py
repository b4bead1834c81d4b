import numpy as np
import pytest
from numpy.testing import assert_allclose

from spinchaos import (
    GeometryError,
    NumericsError,
    SpinGeometry,
    assemble_sector_hamiltonian,
    chain_couplings,
    couplings,
    desymmetrize,
    fcc_couplings,
    reflect_bits,
    sector_basis,
    two_body_term,
    two_spin_full_dipolar,
    two_spin_secular,
    write_operator_coo,
)
from spinchaos.hamiltonian import FCC_POSITIONS, SIGMA_X, SIGMA_Y, SIGMA_Z
from _oracles import extract_weight_block, full_hamiltonian, full_pair_term


class TestChainCouplings:
    def test_n3_long_range(self):
        c = chain_couplings(3)
        assert c[0, 1] == c[1, 2] == -0.5
        assert c[0, 2] == -1.0 / 16.0

    def test_n3_nearest_neighbor(self):
        c = chain_couplings(3, "nearest_neighbor")
        assert c[0, 2] == 0.0
        assert c[0, 1] == c[1, 2] == -0.5

    def test_all_negative_long_range(self):
        c = chain_couplings(9)
        off = ~np.eye(9, dtype=bool)
        assert np.all(c[off] < 0)

    def test_symmetric_zero_diagonal(self):
        c = chain_couplings(7)
        assert_allclose(c, c.T)
        assert np.all(np.diag(c) == 0)

    def test_exponent_override(self):
        c = chain_couplings(3, p=1.0)
        assert c[0, 2] == -0.25


class TestFccCouplings:
    def test_aligned_pair(self):
        g = SpinGeometry([[0, 0, 0], [0, 0, 1]])
        assert couplings(g)[0, 1] == pytest.approx(1.0)

    def test_magic_angle(self):
        z = 1.0 / np.sqrt(3.0)
        rho = np.sqrt(1.0 - z**2)
        g = SpinGeometry([[0, 0, 0], [rho, 0, z]])
        assert couplings(g)[0, 1] == pytest.approx(0.0, abs=1e-14)

    def test_perpendicular_pair(self):
        g = SpinGeometry([[0, 0, 0], [1, 0, 0]])
        assert couplings(g)[0, 1] == pytest.approx(-0.5)

    def test_default_lattice(self):
        c = fcc_couplings()
        assert c.shape == (14, 14)
        assert_allclose(c, c.T)
        assert FCC_POSITIONS[0] == pytest.approx([-0.15, -0.3, 0.0])

    def test_legacy_scale_is_global_factor_two(self):
        g = SpinGeometry(FCC_POSITIONS, legacy_3d_scale=True)
        assert_allclose(couplings(g), 2.0 * fcc_couplings(), rtol=1e-14)

    def test_coincident_sites_rejected(self):
        with pytest.raises(GeometryError):
            couplings(SpinGeometry([[0, 0, 0], [0, 0, 0]]))

    def test_cluster_warning(self):
        with pytest.warns(UserWarning):
            couplings(SpinGeometry([[0, 0, 0], [0.1, 0, 0]]))

    def test_field_axis_tilt(self):
        # with the field along x, a pair along x is "aligned": c = +1
        g = SpinGeometry([[0, 0, 0], [1, 0, 0]], field_axis=[1, 0, 0])
        assert couplings(g)[0, 1] == pytest.approx(1.0)


class TestTwoBodyTerm:
    def test_n2_sz0_block(self):
        basis = sector_basis(2, 0)
        h = two_body_term(1, 2, basis).dense()
        assert_allclose(h, [[2.0, 2.0], [2.0, 2.0]])
        assert_allclose(np.linalg.eigvalsh(h), [0.0, 4.0])

    def test_full_space_diagonal(self):
        # oracle: kron-built term on the full 4-dim space
        h = full_pair_term(2, 1, 2)
        assert_allclose(np.diag(h), [-2.0, 2.0, 2.0, -2.0])
        assert np.trace(h) == 0.0

    def test_hamming_distance_rule(self):
        basis = sector_basis(6, 0)
        h = two_body_term(2, 5, basis).dense()
        states = basis.states
        for a in range(basis.dimension):
            for b in range(basis.dimension):
                distance = int(states[a] ^ states[b]).bit_count()
                if distance not in (0, 2) and h[a, b] != 0.0:
                    raise AssertionError("nonzero element beyond Hamming distance 2")
                if distance == 2 and h[a, b] != 0.0:
                    differing = int(states[a] ^ states[b])
                    assert differing == (1 << 4) | (1 << 1)  # sites 2 and 5

    def test_matches_kron_oracle_in_sector(self):
        n = 5
        basis = sector_basis(n, 1)
        oracle_full = full_pair_term(n, 2, 4)
        block, _ = extract_weight_block(oracle_full, n, basis.weight)
        assert_allclose(two_body_term(2, 4, basis).dense(), block, atol=1e-14)

    def test_argument_order_enforced(self):
        basis = sector_basis(4, 0)
        with pytest.raises(NumericsError):
            two_body_term(3, 3, basis)
        with pytest.raises(NumericsError):
            two_body_term(4, 2, basis)


class TestAssemble:
    def test_n2_nn_chain(self):
        basis = sector_basis(2, 0)
        h = assemble_sector_hamiltonian(chain_couplings(2, "nearest_neighbor"), basis)
        assert_allclose(h.dense(), [[-1.0, -1.0], [-1.0, -1.0]])
        assert_allclose(np.linalg.eigvalsh(h.dense()), [-2.0, 0.0])

    def test_sector_dimensions(self):
        sym, _ = desymmetrize(
            assemble_sector_hamiltonian(chain_couplings(15), sector_basis(15, 1))
        )
        assert sym.dimension == 3235
        assert assemble_sector_hamiltonian(
            fcc_couplings(), sector_basis(14, 2)
        ).dimension == 3003

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_matches_full_space_oracle(self, n):
        c = chain_couplings(n)
        h_full = full_hamiltonian(n, c)
        for sz in range(-n, n + 1, 2):
            basis = sector_basis(n, sz)
            block, _ = extract_weight_block(h_full, n, basis.weight)
            assert_allclose(
                assemble_sector_hamiltonian(c, basis).dense(), block, atol=1e-12
            )

    def test_full_space_block_structure_exact(self):
        # [H, S_z] = 0: weight-ordering the kron-built H leaves exact zeros
        # between blocks
        n = 6
        h_full = full_hamiltonian(n, chain_couplings(n))
        weights = np.array([int(b).bit_count() for b in range(2**n)])
        cross = weights[:, None] != weights[None, :]
        assert np.all(h_full[cross] == 0.0)

    def test_symmetric_real(self):
        h = assemble_sector_hamiltonian(chain_couplings(9), sector_basis(9, 1))
        m = h.dense()
        assert np.abs(m - m.T).max() <= 1e-12
        assert m.dtype.kind == "f"

    def test_reflection_commutes_for_chain(self):
        basis = sector_basis(9, 1)
        h = assemble_sector_hamiltonian(chain_couplings(9), basis).dense()
        perm = np.searchsorted(basis.states, reflect_bits(basis.states, 9))
        # off-diagonal entries mirror exactly; diagonal sums differ only
        # by accumulation order
        assert np.abs(h[np.ix_(perm, perm)] - h).max() <= 1e-13

    def test_trace_identity(self):
        n = 7
        c = chain_couplings(n)
        basis = sector_basis(n, 1)
        total = sum(
            c[i - 1, j - 1] * two_body_term(i, j, basis).matrix.diagonal().sum()
            for i in range(1, n + 1)
            for j in range(i + 1, n + 1)
        )
        h = assemble_sector_hamiltonian(c, basis)
        assert total == pytest.approx(h.matrix.diagonal().sum(), rel=1e-13)

    def test_spectral_homogeneity(self):
        basis = sector_basis(8, 2)
        c = chain_couplings(8)
        e1 = np.linalg.eigvalsh(assemble_sector_hamiltonian(c, basis).dense())
        e3 = np.linalg.eigvalsh(assemble_sector_hamiltonian(3.0 * c, basis).dense())
        assert_allclose(e3, 3.0 * e1, atol=1e-11)

    def test_xx_model_has_zero_diagonal(self):
        basis = sector_basis(6, 0)
        h = assemble_sector_hamiltonian(chain_couplings(6), basis, ising=0.0)
        assert np.all(h.matrix.diagonal() == 0.0)

    def test_dimension_cap(self):
        from spinchaos import ResourceError

        with pytest.raises(ResourceError):
            assemble_sector_hamiltonian(
                chain_couplings(15), sector_basis(15, 1), dim_cap=1000
            )

    def test_parity_basis_assembly_matches_projection(self):
        basis = sector_basis(8, 2)
        c = chain_couplings(8)
        h = assemble_sector_hamiltonian(c, basis)
        sym, anti = desymmetrize(h)
        direct = assemble_sector_hamiltonian(c, sym.basis)
        assert np.abs((direct.matrix - sym.matrix)).max() <= 1e-12

    def test_operator_coo_export(self, tmp_path):
        basis = sector_basis(2, 0)
        h = assemble_sector_hamiltonian(chain_couplings(2, "nearest_neighbor"), basis)
        path = tmp_path / "op.txt"
        write_operator_coo(h, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "row col value"
        assert len(lines) == 5  # 2 diagonal + 2 off-diagonal entries


class TestTwoSpinFullDipolar:
    def test_perpendicular_kills_c_and_d(self):
        # sin(theta)cos(theta) = 0 at theta = pi/2, up to float pi/2
        m = two_spin_full_dipolar(np.pi / 2, 0.7, 1.0)
        for idx in ((0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (2, 3), (3, 1), (3, 2)):
            assert abs(m[idx]) <= 1e-15

    def test_magic_angle_kills_a_and_b(self):
        theta = np.arccos(1.0 / np.sqrt(3.0))
        m = two_spin_full_dipolar(theta, 0.3, 1.0)
        assert np.abs(np.diag(m)).max() <= 1e-14
        assert abs(m[1, 2]) <= 1e-14

    def test_hermitian_random_angles(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            theta, phi = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
            m = two_spin_full_dipolar(theta, phi, rng.uniform(0.5, 2.0))
            assert np.abs(m - m.conj().T).max() <= 1e-12

    def test_secular_truncation_reproduces_pair_coupling(self):
        # zeroing C..F leaves c12 * h12: here via the A+B-only constructor
        rng = np.random.default_rng(5)
        for _ in range(25):
            theta, r = rng.uniform(0, np.pi), rng.uniform(0.5, 2.0)
            sec = two_spin_secular(theta, r)
            c12 = (3.0 * np.cos(theta) ** 2 - 1.0) / (2.0 * r**3)
            h12 = full_pair_term(2, 1, 2)
            assert_allclose(sec, c12 * h12, atol=1e-13)

    def test_full_minus_secular_is_single_and_double_flip_only(self):
        theta, phi, r = 1.1, 0.4, 1.3
        diff = two_spin_full_dipolar(theta, phi, r) - two_spin_secular(theta, r)
        # remaining terms change total Sz, so the central block and diagonal vanish
        assert abs(diff[1, 2]) <= 1e-14
        assert np.abs(np.diag(diff)).max() <= 1e-14

    def test_invalid_radius(self):
        with pytest.raises(NumericsError):
            two_spin_full_dipolar(0.3, 0.1, 0.0)

    def test_sigma_y_sign_convention_is_product_invariant(self):
        sy_standard = np.array([[0.0, -1.0j], [1.0j, 0.0]])
        assert_allclose(np.kron(SIGMA_Y, SIGMA_Y), np.kron(sy_standard, sy_standard))
        h12 = (
            np.kron(SIGMA_X, SIGMA_X)
            + np.kron(SIGMA_Y, SIGMA_Y)
            - 2.0 * np.kron(SIGMA_Z, SIGMA_Z)
        )
        assert_allclose(h12.imag, 0.0)
        assert_allclose(h12.real, full_pair_term(2, 1, 2))
