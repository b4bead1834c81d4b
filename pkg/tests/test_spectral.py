import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from spinchaos import (
    InsufficientDataError,
    NumericsError,
    SmoothingError,
    S0,
    SpacingSample,
    assemble_sector_hamiltonian,
    chain_couplings,
    eigendecompose,
    kernel_smooth,
    level_density,
    lsi,
    lsi_profile,
    reference_pdf,
    sample_goe,
    sector_basis,
    silverman_bandwidth,
    spacing_histogram,
    unfold,
)
from spinchaos.spectral import SmoothedCurve


class TestEigendecompose:
    def test_two_by_two(self):
        spec = eigendecompose(np.array([[-1.0, -1.0], [-1.0, -1.0]]))
        assert_allclose(spec.eigenvalues, [-2.0, 0.0], atol=1e-14)

    def test_identity(self):
        spec = eigendecompose(np.eye(5))
        assert_allclose(spec.eigenvalues, np.ones(5))

    def test_reconstruction_on_chain_sector(self):
        h = assemble_sector_hamiltonian(chain_couplings(10), sector_basis(10, 2))
        m = h.dense()
        spec = eigendecompose(h)
        v, lam = spec.modal_matrix, spec.eigenvalues
        recon = (v * lam) @ v.T
        scale = np.abs(m).max()
        assert np.abs(recon - m).max() <= 1e-9 * scale

    def test_residual_and_orthonormality(self):
        h = assemble_sector_hamiltonian(chain_couplings(8), sector_basis(8, 2))
        m = h.dense()
        spec = eigendecompose(h)
        v, lam = spec.modal_matrix, spec.eigenvalues
        assert np.abs(m @ v - v * lam).max() <= 1e-8 * np.abs(m).max()
        assert np.abs(v.T @ v - np.eye(len(lam))).max() <= 1e-10

    def test_non_symmetric_rejected(self):
        with pytest.raises(NumericsError):
            eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSampleGoe:
    def test_symmetric_exactly(self):
        m = sample_goe(300, seed=0).matrix
        assert np.array_equal(m, m.T)

    def test_entry_statistics(self):
        m = sample_goe(2000, seed=1).matrix
        off = m[np.triu_indices(2000, k=1)]
        assert abs(off.var() - 1.0) <= 0.05
        assert abs(off.mean()) <= 0.05
        diag = np.diag(m)
        assert abs(diag.var() - 2.0) <= 0.2

    def test_deterministic_per_seed(self):
        a = sample_goe(100, seed=9).matrix
        b = sample_goe(100, seed=9).matrix
        assert np.array_equal(a, b)
        assert not np.array_equal(a, sample_goe(100, seed=10).matrix)


class TestReferencePdf:
    def test_values_at_zero(self):
        assert reference_pdf("wigner_dyson", 0.0) == 0.0
        assert reference_pdf("poisson", 0.0) == 1.0

    def test_intersection_at_s0(self):
        p_wd = reference_pdf("wigner_dyson", S0)
        p_p = reference_pdf("poisson", S0)
        assert abs(p_wd - p_p) <= 5e-4  # s0 quoted to four digits
        assert p_p == pytest.approx(0.623, abs=1e-3)

    @pytest.mark.parametrize("kind", ["wigner_dyson", "poisson", "porter_thomas", "std_normal"])
    def test_quadrature_normalization(self, kind):
        lo = 1e-12 if kind == "porter_thomas" else (-np.inf if kind == "std_normal" else 0.0)
        total, _ = quad(lambda x: reference_pdf(kind, x), lo, np.inf)
        assert abs(total - 1.0) <= 1e-8

    def test_domain_violations(self):
        with pytest.raises(NumericsError):
            reference_pdf("wigner_dyson", -0.1)
        with pytest.raises(NumericsError):
            reference_pdf("porter_thomas", 0.0)
        with pytest.raises(NumericsError):
            reference_pdf("gue", 1.0)


class TestKernelSmooth:
    def test_constant_input(self):
        x = np.linspace(0, 1, 50)
        cur = kernel_smooth(x, np.full(50, 3.0))
        assert_allclose(cur.y, 3.0, rtol=1e-12)

    def test_linear_trend_recovered(self):
        x = np.sort(np.random.default_rng(0).uniform(0, 1, 500))
        cur = kernel_smooth(x, x)
        mask = (x >= 0.1) & (x <= 0.9)
        assert np.abs(cur.y[mask] - x[mask]).max() <= 0.02  # of unit range

    def test_goe_flat_profile(self, goe_reference):
        # pooled squared components of a set of eigenvectors are flat 1/D
        v = goe_reference.modal_matrix
        d = goe_reference.dimension
        pooled = (v[:25, :] ** 2).mean(axis=0)
        cur = kernel_smooth(goe_reference.eigenvalues, pooled)
        e = goe_reference.eigenvalues
        lo, hi = np.percentile(e, [10, 90])
        mask = (e >= lo) & (e <= hi)
        assert np.abs(cur.y[mask] * d - 1.0).max() <= 0.1

    def test_silverman_rule(self):
        x = np.random.default_rng(1).normal(size=1000)
        assert silverman_bandwidth(x) == pytest.approx(1.06 * x.std() * 1000**-0.2)

    def test_degenerate_support(self):
        with pytest.raises(SmoothingError):
            kernel_smooth(np.ones(20), np.arange(20.0))

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            kernel_smooth(np.arange(5.0), np.arange(5.0))


class TestLevelDensity:
    def test_normal_sample_matches_pdf(self):
        rng = np.random.default_rng(1)
        x = np.sort(rng.normal(size=10000))
        dens, e_tilde = level_density(x)
        lo, hi = np.percentile(x, [5, 95])
        mask = (x >= lo) & (x <= hi)
        true = 10000 * np.exp(-(x**2) / 2) / np.sqrt(2 * np.pi)
        assert np.abs(dens.y[mask] / true[mask] - 1).max() <= 0.05
        assert e_tilde.std() == pytest.approx(1.0)

    def test_equally_spaced_levels(self):
        x = np.linspace(0, 1, 5000)
        dens, _ = level_density(x)
        mask = (x >= 0.1) & (x <= 0.9)
        assert np.abs(dens.y[mask] / 5000 - 1).max() <= 0.05

    def test_trapezoid_normalization(self):
        x = np.sort(np.random.default_rng(2).normal(size=2000))
        dens, _ = level_density(x)
        area = np.trapezoid(dens.y, x)
        assert abs(area / dens.normalization - 1.0) <= 0.01

    def test_chain_density_left_shifted(self, chain15_sym):
        _, _, spec = chain15_sym
        _, e_tilde = level_density(spec.eigenvalues)
        assert e_tilde.mean() < 0.0

    def test_too_few_levels(self):
        with pytest.raises(InsufficientDataError):
            level_density(np.arange(30.0))


class TestUnfold:
    def test_unit_density(self):
        # {0,1,2,3,...} with Omega == 1 unfolds to unit spacings; the level
        # count satisfies the 2*truncate + 50 guard
        eigs = np.arange(60.0)
        dens = SmoothedCurve(eigs, np.ones(60), 1.0)
        s = unfold(eigs, dens, truncate=0)
        assert_allclose(s.spacings, np.ones(59))

    def test_endpoint_average(self):
        # leading levels {0, 1, 3} with Omega {1, 1, 0.5} give spacings {1, 1.5}
        eigs = np.concatenate([[0.0, 1.0, 3.0], np.arange(4.0, 51.0)])
        omega = np.concatenate([[1.0, 1.0, 0.5], np.ones(47)])
        s = unfold(eigs, SmoothedCurve(eigs, omega, 1.0), truncate=0)
        assert_allclose(s.spacings[:2], [1.0, 1.5])

    def test_goe_unit_mean(self, goe_reference):
        dens, _ = level_density(goe_reference.eigenvalues)
        s = unfold(goe_reference.eigenvalues, dens)
        assert abs(s.spacings.mean() - 1.0) <= 0.02
        assert len(s) == goe_reference.dimension - 1 - 20

    def test_truncation_guard(self):
        eigs = np.linspace(0, 1, 60)
        dens = SmoothedCurve(eigs, np.ones(60), 1.0)
        with pytest.raises(InsufficientDataError):
            unfold(eigs, dens, truncate=10)

    def test_scale_invariance(self, chain13_sym):
        _, _, spec = chain13_sym
        etas = []
        for a in (0.1, 1.0, 10.0):
            eigs = a * spec.eigenvalues
            dens, _ = level_density(eigs)
            etas.append(lsi(unfold(eigs, dens)))
        assert abs(etas[0] - etas[1]) <= 0.02
        assert abs(etas[2] - etas[1]) <= 0.02


class TestSpacingHistogram:
    def test_fd_width(self):
        s = np.linspace(0.0, 1.0, 1000)  # IQR of this grid is 0.5
        sample = SpacingSample(s, 0)
        hist = spacing_histogram(sample)
        assert hist.fd_width == pytest.approx(2 * 0.5 * 1000 ** (-1 / 3), rel=1e-2)
        assert hist.edges[1] - hist.edges[0] == pytest.approx(hist.fd_width)

    def test_unit_area(self):
        rng = np.random.default_rng(5)
        sample = SpacingSample(rng.exponential(1.0, 2000), 0)
        hist = spacing_histogram(sample)
        area = np.sum(hist.heights * np.diff(hist.edges))
        assert abs(area - 1.0) <= 1e-10

    def test_goe_matches_wigner_dyson(self, goe_reference):
        dens, _ = level_density(goe_reference.eigenvalues)
        s = unfold(goe_reference.eigenvalues, dens)
        hist = spacing_histogram(s)
        wd = reference_pdf("wigner_dyson", hist.centers)
        assert np.abs(hist.heights - wd).max() <= 0.08

    def test_zero_iqr_fallback(self):
        sample = SpacingSample(np.ones(200), 0)
        hist = spacing_histogram(sample)
        assert hist.used_fallback
        assert len(hist.heights) == 30


class TestLsi:
    def test_exponential_spacings(self):
        rng = np.random.default_rng(4)
        sample = SpacingSample(rng.exponential(1.0, 5000), 0)
        assert lsi(sample) == pytest.approx(1.0, abs=0.05)

    def test_wigner_surmise_spacings(self):
        rng = np.random.default_rng(4)
        u = rng.uniform(size=5000)
        sample = SpacingSample(np.sqrt(-4.0 * np.log1p(-u) / np.pi), 0)
        assert lsi(sample) == pytest.approx(0.0, abs=0.05)

    def test_chain_regression(self, chain13_sym, chain15_sym):
        for fixture, target in ((chain13_sym, 0.52), (chain15_sym, 0.36)):
            _, _, spec = fixture
            dens, _ = level_density(spec.eigenvalues)
            assert lsi(unfold(spec.eigenvalues, dens)) == pytest.approx(target, abs=0.10)

    def test_minimum_sample_size(self):
        with pytest.raises(InsufficientDataError):
            lsi(SpacingSample(np.ones(100), 0))


class TestLsiProfile:
    def test_goe_flat_and_low(self, goe_reference):
        e = goe_reference.eigenvalues
        prof = lsi_profile(e, 400)
        lo, hi = np.percentile(e, [10, 90])
        mask = (e >= lo) & (e <= hi)
        assert prof.y[mask].max() <= 0.15

    def test_poisson_spectrum_high(self):
        rng = np.random.default_rng(3)
        levels = np.sort(rng.normal(0.0, 1.0, 3000))
        prof = lsi_profile(levels, 400)
        lo, hi = np.percentile(levels, [10, 90])
        mask = (levels >= lo) & (levels <= hi)
        assert prof.y[mask].min() >= 0.7

    def test_chain_minimum_below_center(self, chain15_sym):
        _, _, spec = chain15_sym
        prof = lsi_profile(spec.eigenvalues, 400)
        assert prof.x[np.argmin(prof.y)] < 0.0

    def test_window_validation(self):
        with pytest.raises(NumericsError):
            lsi_profile(np.linspace(0, 1, 300), 99)
        with pytest.raises(NumericsError):
            lsi_profile(np.linspace(0, 1, 300), 400)

    def test_edge_windows_flagged(self):
        rng = np.random.default_rng(0)
        levels = np.sort(rng.normal(size=500))
        prof = lsi_profile(levels, 200)
        assert prof.unreliable[0] and prof.unreliable[-1]
        assert not prof.unreliable[250]
