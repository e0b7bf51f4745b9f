"""Density spectra, degree of coherence, field statistics.

Independent cross-checks used here:
  * FFT pipeline vs direct ladder-coefficient sums vs closed Bessel-sum form,
    three separately coded routes to the same quantity;
  * Gaussian envelope vs the analytic Gaussian Fourier transform;
  * central moments vs direct numerical expectation integrals over the
    synthesized density.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clcoherence import (
    BeamParameters,
    DensitySpectrum,
    EnvelopeSpec,
    FlatCoupling,
    GridCoverageError,
    PhysicsGuardError,
    analytic_pinem_overlap,
    central_moment,
    density_spectrum,
    doc,
    doc_map,
    ladder_overlap,
    ladder_spectrum,
    mean_field,
    mean_photon_number,
    optimal_bunching_distance,
    pair_correlation,
    pinem_ladder,
    propagate,
    spectral_width,
    synthesize_density,
    time_domain_field,
)

BEAM = BeamParameters.from_wavelength(200e3, 800.0)
W0 = BEAM.omega0


def fft_spectrum(beta, distance_nm=0.0, mode="exact", envelope=EnvelopeSpec("infinite")):
    state = pinem_ladder(beta, BEAM)
    if distance_nm:
        state = propagate(state, distance_nm, mode=mode)
    return state, density_spectrum(synthesize_density(state, envelope))


class TestFFTPipeline:
    def test_matches_ladder_sums(self):
        # Sampled-density FFT and the direct coefficient sums agree to 1e-8.
        state, spec = fft_spectrum(4.0, 6.43e6)
        for n in range(-12, 13):
            direct = ladder_overlap(state, n)
            sampled = spec.value_at(n * W0)
            assert abs(direct - sampled) < 1e-8

    def test_infinite_envelope_off_harmonics_vanish(self):
        # Periodic density: every non-harmonic lattice bin is exactly zero
        # up to roundoff (discrete orthogonality).
        state, spec = fft_spectrum(4.0, 6.43e6)
        per = int(round(W0 / spec.domega))
        assert per > 1  # several lattice bins between harmonics
        off = np.ones(spec.omega_grid.size, dtype=bool)
        harmonic_idx = np.nonzero(
            np.abs(np.remainder(spec.omega_grid / W0 + 0.5, 1.0) - 0.5) < 1e-9
        )[0]
        off[harmonic_idx] = False
        assert np.max(np.abs(spec.values[off])) < 1e-10

    def test_gaussian_envelope_closed_form(self):
        # Unmodulated beam, 200 fs Gaussian density: |F| = exp(-w^2 D^2/(16 ln2)).
        fwhm = 200.0
        _, spec = fft_spectrum(0.0, envelope=EnvelopeSpec("gaussian", fwhm=fwhm))
        w = spec.omega_grid
        sel = np.abs(w) < 0.12  # out to |F| ~ 1e-23
        expected = np.exp(-(w[sel] ** 2) * fwhm**2 / (16.0 * math.log(2.0)))
        np.testing.assert_allclose(spec.values[sel].real, expected, atol=5e-9)
        np.testing.assert_allclose(spec.values[sel].imag, 0.0, atol=5e-9)

    def test_zero_distance_harmonics_vanish(self):
        # Pure phase modulation has a flat density: F(n != 0) = 0.
        state, spec = fft_spectrum(4.0, 0.0)
        for n in range(1, 21):
            assert abs(spec.value_at(n * W0)) < 1e-10
            assert abs(ladder_overlap(state, n)) < 1e-10


class TestAnalyticOverlap:
    @pytest.mark.parametrize("beta_abs", [1.0, 4.0])
    @pytest.mark.parametrize("x", [0.0, 0.01, 0.25])
    def test_matches_ladder_route(self, beta_abs, x):
        state = pinem_ladder(beta_abs, BEAM)
        state = propagate(state, x * BEAM.talbot_distance, mode="quadratic")
        for n in range(-8, 9):
            closed = analytic_pinem_overlap(beta_abs, n, x)
            direct = ladder_overlap(state, n)
            assert abs(closed - direct) < 1e-10

    def test_zero_beta(self):
        assert analytic_pinem_overlap(0.0, 0, 0.3) == 1.0
        assert analytic_pinem_overlap(0.0, 3, 0.3) == 0.0

    def test_normalization_any_distance(self):
        for x in (0.0, 0.123, 0.5):
            assert analytic_pinem_overlap(2.0, 0, x) == pytest.approx(1.0, abs=1e-12)


class TestDensitySpectrumValidation:
    def _grid(self, n=9):
        return np.linspace(-4, 4, n) * 1.0

    def test_f0_must_be_one(self):
        v = np.full(9, 0.5, dtype=complex)
        with pytest.raises(PhysicsGuardError):
            DensitySpectrum(self._grid(), v, "ladder", 1.0)

    def test_hermitian_symmetry_enforced(self):
        v = np.zeros(9, dtype=complex)
        v[4] = 1.0
        v[5] = 0.3 + 0.1j
        v[3] = 0.3 + 0.1j  # should be conj
        with pytest.raises(PhysicsGuardError):
            DensitySpectrum(self._grid(), v, "ladder", 1.0)

    def test_modulus_bound_enforced(self):
        v = np.zeros(9, dtype=complex)
        v[4] = 1.0
        v[5] = 1.5
        v[3] = 1.5
        with pytest.raises(PhysicsGuardError):
            DensitySpectrum(self._grid(), v, "ladder", 1.0)

    def test_grid_must_be_uniform(self):
        g = self._grid().copy()
        g[7] += 0.2
        v = np.zeros(9, dtype=complex)
        v[4] = 1.0
        with pytest.raises(ValueError):
            DensitySpectrum(g, v, "ladder", 1.0)

    def test_grid_must_contain_zero(self):
        g = self._grid() + 0.5
        v = np.zeros(9, dtype=complex)
        v[4] = 1.0
        with pytest.raises(ValueError):
            DensitySpectrum(g, v, "ladder", 1.0)

    def test_value_at_snaps_and_guards(self):
        state = pinem_ladder(1.0, BEAM)
        spec = ladder_spectrum(state, n_max=6)
        # Tiny numerical offsets snap onto the lattice.
        assert spec.value_at(2 * W0 * (1 + 1e-9)) == spec.value_at(2 * W0)
        with pytest.raises(GridCoverageError):
            spec.value_at(2.5 * W0)  # between lattice points
        with pytest.raises(GridCoverageError):
            spec.value_at(7 * W0)  # outside covered range


class TestDegreeOfCoherence:
    def test_unit_at_zero_frequency(self):
        for beta, d in [(1.0, 0.0), (4.0, 6.43e6), (2.0, 1.0e7)]:
            state, spec = fft_spectrum(beta, d)
            assert doc(spec, 0.0) == pytest.approx(1.0, abs=1e-8)

    def test_symmetric_in_harmonic(self):
        state, spec = fft_spectrum(4.0, 6.43e6)
        for n in range(1, 15):
            assert doc(spec, n * W0) == pytest.approx(doc(spec, -n * W0), abs=1e-12)

    def test_doc_map_matches_pointwise_propagation(self):
        state = pinem_ladder(4.0, BEAM)
        distances = np.array([0.0, 2.0e6, 6.43e6, 1.1e7])
        dm = doc_map(state, distances, n_max=10)
        assert dm.shape == (11, 4)
        for col, d in enumerate(distances):
            moved = propagate(state, d)
            for n in range(11):
                expected = abs(ladder_overlap(moved, n)) ** 2
                assert dm[n, col] == pytest.approx(expected, abs=1e-12)

    def test_doc_map_quadratic_mode(self):
        state = pinem_ladder(1.0, BEAM)
        d = np.array([0.0, 0.1 * BEAM.talbot_distance])
        dm = doc_map(state, d, n_max=4, mode="quadratic")
        for n in range(5):
            expected = abs(analytic_pinem_overlap(1.0, n, 0.1)) ** 2
            assert dm[n, 1] == pytest.approx(expected, abs=1e-12)

    def test_doc_zero_row_is_unity(self):
        state = pinem_ladder(2.0, BEAM)
        dm = doc_map(state, np.linspace(0, 1e7, 11), n_max=3)
        np.testing.assert_allclose(dm[0], 1.0, atol=1e-12)


class TestSpectralWidth:
    def test_one_dimensional(self):
        docs = np.array([1.0, 0.5, 0.2, 0.005, 0.02, 1e-6])
        assert spectral_width(docs) == 4
        assert spectral_width(docs, threshold=0.1) == 2

    def test_matrix_per_column(self):
        m = np.array([[1.0, 1.0], [0.5, 0.001], [0.02, 0.0]])
        np.testing.assert_array_equal(spectral_width(m), [2, 0])

    def test_all_below_threshold(self):
        assert spectral_width(np.array([0.001, 0.001])) == 0


class TestOptimalBunchingDistance:
    def test_narrow_scan_lands_on_plateau(self):
        # Scan a narrow bracket around the known optimum to keep this fast;
        # the full-range behaviour is exercised by the acceptance gate.
        opt = optimal_bunching_distance(
            4.0, BEAM, d_min=5.5e6, d_max=8.0e6, coarse_step=5.0e4
        )
        assert opt.width == 17
        assert 6.0e6 < opt.distance < 7.2e6
        # The optimum must sit inside the reported plateau of maximal width.
        top = opt.coarse_distances[opt.coarse_widths == opt.width]
        assert top.min() - 5e4 <= opt.distance <= top.max() + 5e4


class TestCoherentField:
    def setup_method(self):
        self.state, self.spec = fft_spectrum(4.0, 6.43e6)
        self.model = FlatCoupling(0.05, 0.5 * W0, 20.5 * W0)

    def test_values_are_g_times_f(self):
        field = mean_field(self.model, self.spec, band=(0.9 * W0, 5.1 * W0))
        recomputed = 0.05 * self.spec.value_at(field.omega_grid)
        np.testing.assert_allclose(field.a_mean, recomputed, atol=1e-15)

    def test_modulus_never_exceeds_coupling(self):
        field = mean_field(self.model, self.spec, band=(0.9 * W0, 20.1 * W0))
        assert np.all(np.abs(field.a_mean) <= 0.05 * (1 + 1e-9))

    def test_band_validation(self):
        with pytest.raises(ValueError):
            mean_field(self.model, self.spec, band=(3.0, 1.0))

    def test_mean_photon_number_is_state_independent(self):
        # <n> depends only on the coupling, not on the electron state.
        w = np.array([W0, 2 * W0, 3 * W0])
        n = mean_photon_number(self.model, w)
        np.testing.assert_allclose(n, 0.05**2, atol=1e-15)
        assert mean_photon_number(self.model, 30 * W0) == 0.0  # outside band


class TestCentralMoments:
    def _direct_integral(self, density, omega, f_omega, order):
        # <(b - F)^N> = integral rho(t) (e^{i w t} - F)^N dt, evaluated by
        # direct Riemann sum on the synthesized density: an independent route
        # that bypasses the binomial expansion entirely.
        t = density.times
        b = np.exp(1j * omega * t)
        return np.sum(density.samples * (b - f_omega) ** order) * density.dt

    @pytest.mark.parametrize("order", [2, 3, 4, 5])
    def test_matches_direct_expectation_integral(self, order):
        g0 = 0.3
        state = propagate(pinem_ladder(1.0, BEAM), 6.43e6, mode="quadratic")
        dens = synthesize_density(state, EnvelopeSpec("infinite"))
        spec = density_spectrum(dens)
        model = FlatCoupling(g0, 0.5 * W0, 50 * W0)
        omega = W0
        m = central_moment(model, spec, omega, order)
        direct = g0**order * self._direct_integral(dens, omega, spec.value_at(omega), order)
        assert abs(m - direct) < 1e-10

    def test_first_central_moment_vanishes(self):
        state = propagate(pinem_ladder(1.0, BEAM), 3.0e6)
        spec = ladder_spectrum(state)
        model = FlatCoupling(0.4, 0.5 * W0, 10 * W0)
        assert abs(central_moment(model, spec, W0, 1)) < 1e-14

    def test_order_bounds(self):
        state = pinem_ladder(1.0, BEAM)
        spec = ladder_spectrum(state)
        model = FlatCoupling(0.4, 0.5 * W0, 10 * W0)
        for bad in (0, 9, -1):
            with pytest.raises(ValueError):
                central_moment(model, spec, W0, bad)

    def test_lattice_coverage_guard(self):
        state = pinem_ladder(1.0, BEAM)
        spec = ladder_spectrum(state, n_max=4)
        model = FlatCoupling(0.4, 0.5 * W0, 10 * W0)
        # order 2 at omega = 3*w0 needs F(6*w0), outside the n_max=4 lattice.
        with pytest.raises(GridCoverageError):
            central_moment(model, spec, 3 * W0, 2)


class TestPairCorrelation:
    def test_matches_ladder_overlap(self):
        state = propagate(pinem_ladder(4.0, BEAM), 6.43e6, mode="quadratic")
        spec = ladder_spectrum(state)
        g = FlatCoupling(0.2, 0.5 * W0, 60 * W0)
        pc = pair_correlation(g, spec, W0, 2 * W0)
        b1 = ladder_overlap(state, 1)
        b3 = ladder_overlap(state, 3)
        assert abs(pc.normal - 0.2 * 0.2 * b1) < 1e-8
        assert abs(pc.anomalous - 0.2 * 0.2 * b3) < 1e-8

    def test_unmodulated_beam_decorrelated(self):
        state = pinem_ladder(0.0, BEAM)
        spec = ladder_spectrum(state, n_max=20)
        g = FlatCoupling(0.2, 0.5 * W0, 30 * W0)
        pc = pair_correlation(g, spec, W0, 2 * W0)
        assert abs(pc.normal) < 1e-14  # omega != omega': F(w0) = 0
        assert abs(pc.anomalous) < 1e-14

    def test_equal_frequency_normal_is_coupling_power(self):
        state = pinem_ladder(2.0, BEAM)
        spec = ladder_spectrum(state)
        g = FlatCoupling(0.3, 0.5 * W0, 90 * W0)
        pc = pair_correlation(g, spec, 2 * W0, 2 * W0)
        assert pc.normal == pytest.approx(0.09, abs=1e-12)

    def test_positive_frequency_required(self):
        state = pinem_ladder(1.0, BEAM)
        spec = ladder_spectrum(state)
        g = FlatCoupling(0.3, 0.5 * W0, 10 * W0)
        with pytest.raises(ValueError):
            pair_correlation(g, spec, -W0, W0)


class TestTimeDomainField:
    def test_gaussian_pulse_widths(self):
        # Flat coupling across the whole first-harmonic line turns the
        # spectral line shape back into the 200 fs temporal envelope.
        state = propagate(pinem_ladder(4.0, BEAM), 6.43e6, mode="quadratic")
        dens = synthesize_density(state, EnvelopeSpec("gaussian", fwhm=200.0))
        spec = density_spectrum(dens)
        model = FlatCoupling(1.0, 0.5 * W0, 1.5 * W0)
        field = mean_field(model, spec, band=(0.5 * W0, 1.5 * W0))
        t = np.linspace(-800.0, 800.0, 2001)
        tf = time_domain_field(field, t=t)
        assert tf.fwhm_envelope == pytest.approx(200.0, rel=0.01)
        assert tf.fwhm_intensity == pytest.approx(200.0 / math.sqrt(2.0), rel=0.01)

    def test_narrow_window_returns_nan(self):
        state = propagate(pinem_ladder(4.0, BEAM), 6.43e6, mode="quadratic")
        dens = synthesize_density(state, EnvelopeSpec("gaussian", fwhm=200.0))
        spec = density_spectrum(dens)
        model = FlatCoupling(1.0, 0.5 * W0, 1.5 * W0)
        field = mean_field(model, spec, band=(0.5 * W0, 1.5 * W0))
        t = np.linspace(-20.0, 20.0, 64)  # envelope never reaches half max
        tf = time_domain_field(field, t=t)
        assert math.isnan(tf.fwhm_envelope)


@settings(max_examples=25, deadline=None)
@given(
    mod=st.floats(min_value=0.1, max_value=5.0),
    x=st.floats(min_value=0.0, max_value=0.5),
)
def test_spectrum_invariants(mod, x):
    state = propagate(pinem_ladder(mod, BEAM), x * BEAM.talbot_distance, mode="quadratic")
    spec = ladder_spectrum(state, n_max=10)
    # DOC(0) = 1; DOC symmetric; 0 <= DOC <= 1.
    vals = doc(spec, spec.omega_grid)
    assert vals[10] == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(vals, vals[::-1], atol=1e-12)
    assert np.all(vals <= 1.0 + 1e-9)
