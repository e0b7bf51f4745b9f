"""Truncated-Hilbert-space oracle: exact unitary evolution cross-validation.

The oracle builds the interaction generator explicitly on (electron ladder) x
(photon Fock spaces) and exponentiates it, sharing no code path with the
analytic ladder/coupling formulas it certifies.
"""

import math

import numpy as np
import pytest
import scipy.sparse as sp

from clcoherence import (
    BeamParameters,
    OracleMismatchError,
    OracleMode,
    PhysicsGuardError,
    TruncatedSpace,
    pinem_ladder,
    propagate,
    run_test_matrix,
)
from clcoherence.oracle import (
    build_generator,
    electron_mean_level,
    electron_mean_level_initial,
    evolve,
    evolve_dense,
    initial_vector,
    observables,
    oracle_mean_a,
    oracle_mean_n,
    oracle_pair_correlation,
    photon_distribution,
    require_all_passed,
    truncation_leakage,
)
from clcoherence.spectra import ladder_overlap

BEAM = BeamParameters.from_wavelength(200e3, 800.0)


@pytest.fixture(scope="module")
def matrix_rows():
    """Run the 54-configuration validation matrix once per module."""
    return run_test_matrix(BEAM)


class TestGeneratorAlgebra:
    def test_anti_hermitian(self):
        space = TruncatedSpace(6, (OracleMode(1, 0.3 + 0.2j, photon_cutoff=4),))
        gen = build_generator(space)
        defect = sp.linalg.norm(gen + gen.conj().T)
        assert defect == 0.0

    def test_zero_coupling_gives_zero_matrix(self):
        space = TruncatedSpace(6, (OracleMode(1, 0.0, photon_cutoff=4),))
        gen = build_generator(space)
        assert abs(gen).max() == 0.0

    def test_two_mode_generator_is_sum(self):
        m1 = OracleMode(1, 0.3, photon_cutoff=3)
        m2 = OracleMode(2, 0.2, photon_cutoff=3)
        both = build_generator(TruncatedSpace(8, (m1, m2)))
        assert both.shape == (17 * 4 * 4, 17 * 4 * 4)
        assert sp.linalg.norm(both + both.conj().T) == 0.0


class TestEvolution:
    def test_weak_coupling_limit_is_identity(self):
        state = pinem_ladder(0.5, BEAM)
        space = TruncatedSpace.for_ladder(state.cutoff, (OracleMode(1, 1e-9),))
        v = evolve(space, state.coefficients)
        v0 = initial_vector(space, state.coefficients)
        assert np.linalg.norm(v - v0) < 1e-8

    def test_matches_dense_matrix_exponential(self):
        # Independent dense expm route on a space small enough to afford it.
        state = pinem_ladder(0.5, BEAM)
        space = TruncatedSpace.for_ladder(state.cutoff, (OracleMode(1, 0.4),))
        assert space.dimension <= 4000
        fast = evolve(space, state.coefficients)
        dense = evolve_dense(space, state.coefficients)
        assert np.linalg.norm(fast - dense) < 1e-10

    def test_norm_preserved(self):
        state = pinem_ladder(1.0, BEAM)
        space = TruncatedSpace.for_ladder(state.cutoff, (OracleMode(1, 0.8),))
        v = evolve(space, state.coefficients)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-10)

    def test_leakage_guard_trips_on_tight_photon_cutoff(self):
        state = pinem_ladder(0.5, BEAM)
        space = TruncatedSpace.for_ladder(
            state.cutoff, (OracleMode(1, 0.8, photon_cutoff=1),)
        )
        with pytest.raises(PhysicsGuardError):
            evolve(space, state.coefficients)

    def test_dimension_guard(self):
        with pytest.raises(PhysicsGuardError):
            TruncatedSpace(10000, (OracleMode(1, 0.1),))

    def test_initial_vector_embedding(self):
        state = pinem_ladder(0.5, BEAM)
        space = TruncatedSpace.for_ladder(state.cutoff, (OracleMode(1, 0.1, photon_cutoff=2),))
        v0 = initial_vector(space, state.coefficients)
        t = v0.reshape(space.electron_dim, 3)
        m, j = space.electron_halfwidth, state.cutoff
        np.testing.assert_array_equal(t[m - j : m + j + 1, 0], state.coefficients)
        assert np.all(t[:, 1:] == 0.0)

    def test_initial_vector_rejects_oversized_ladder(self):
        space = TruncatedSpace(5, (OracleMode(1, 0.1, photon_cutoff=2),))
        with pytest.raises(ValueError):
            initial_vector(space, np.zeros(13, dtype=complex))


class TestSingleModeObservables:
    def test_unmodulated_electron_dark_mode(self):
        # beta = 0: no density modulation, so <a> = 0 (no coherent amplitude)
        # while <n> = |g|^2 (spontaneous emission is state-independent).
        state = pinem_ladder(0.0, BEAM)
        space = TruncatedSpace.for_ladder(state.cutoff, (OracleMode(1, 0.3),))
        v = evolve(space, state.coefficients)
        assert abs(oracle_mean_a(space, v, 0)) < 1e-10
        assert oracle_mean_n(space, v, 0) == pytest.approx(0.09, abs=1e-8)

    def test_photon_distribution_is_poissonian(self):
        # Single dominant electron level, g = 0.5: the mode ends in a coherent
        # state whose number distribution is Poisson(|g|^2).
        state = pinem_ladder(0.0, BEAM)
        space = TruncatedSpace.for_ladder(state.cutoff, (OracleMode(1, 0.5),))
        v = evolve(space, state.coefficients)
        dist = photon_distribution(space, v, 0)
        mean = 0.25
        expected = np.array(
            [math.exp(-mean) * mean**k / math.factorial(k) for k in range(dist.size)]
        )
        np.testing.assert_allclose(dist, expected, atol=1e-10)

    def test_weak_coupling_first_order_amplitudes(self):
        # g = 0.05: the one-photon sector holds amplitudes g * c_{j+n} --
        # the electron dropped n levels to emit the photon.
        g = 0.05
        state = pinem_ladder(1.0, BEAM)
        space = TruncatedSpace.for_ladder(state.cutoff, (OracleMode(1, g),))
        v = evolve(space, state.coefficients)
        t = v.reshape(space.electron_dim, space.photon_dims[0])
        m, j = space.electron_halfwidth, state.cutoff
        one_photon = t[:, 1]
        c_padded = np.zeros(space.electron_dim, dtype=complex)
        c_padded[m - j : m + j + 1] = state.coefficients
        expected = g * np.roll(c_padded, -1)  # electron index shifted down by n=1
        np.testing.assert_allclose(one_photon, expected, atol=1e-4)

    def test_strong_coupling_mean_field(self):
        # g = 0.8 on a bunched beam: <a> = g * b_1 within 1e-6.
        g = 0.8
        state = propagate(pinem_ladder(1.0, BEAM), 0.1 * BEAM.talbot_distance, mode="quadratic")
        space = TruncatedSpace.for_ladder(state.cutoff, (OracleMode(1, g),))
        v = evolve(space, state.coefficients)
        expected = g * ladder_overlap(state, 1)
        assert abs(oracle_mean_a(space, v, 0) - expected) < 1e-6
        assert oracle_mean_n(space, v, 0) == pytest.approx(g * g, abs=1e-6)

    def test_emission_probability_first_order(self):
        # Total emission probability 1 - P(0) agrees with the integrated
        # weak-coupling rate |g|^2 to first order.
        g = 0.05
        state = pinem_ladder(0.5, BEAM)
        space = TruncatedSpace.for_ladder(state.cutoff, (OracleMode(1, g),))
        v = evolve(space, state.coefficients)
        emitted = 1.0 - photon_distribution(space, v, 0)[0]
        assert abs(emitted - g * g) < 1e-5  # error is O(g^4)


@pytest.fixture(scope="module")
def strong_two_mode():
    state = propagate(pinem_ladder(4.0, BEAM), 6.43e6, mode="quadratic")
    modes = (OracleMode(1, 0.2), OracleMode(2, 0.2))
    space = TruncatedSpace.for_ladder(state.cutoff, modes)
    return state, space, evolve(space, state.coefficients)


class TestTwoModeObservables:
    def test_cross_mode_pair_correlations(self, strong_two_mode):
        state, space, v = strong_two_mode
        normal, anomalous = oracle_pair_correlation(space, v, 0, 1)
        g = 0.2
        assert abs(normal - g * g * ladder_overlap(state, 1)) < 1e-6
        assert abs(anomalous - g * g * ladder_overlap(state, 3)) < 1e-6

    def test_energy_bookkeeping(self, strong_two_mode):
        state, space, v = strong_two_mode
        drop = electron_mean_level_initial(state) - electron_mean_level(space, v)
        budget = oracle_mean_n(space, v, 0) + 2.0 * oracle_mean_n(space, v, 1)
        assert drop == pytest.approx(budget, abs=1e-8)

    def test_leakage_well_controlled(self, strong_two_mode):
        _, space, v = strong_two_mode
        leak = truncation_leakage(space, v)
        assert set(leak) == {"electron_low", "electron_high", "mode0_top_fock", "mode1_top_fock"}
        assert max(leak.values()) < 1e-8


class TestValidationMatrix:
    def test_all_rows_pass(self, matrix_rows):
        assert len(matrix_rows) == 54
        failures = [r for r in matrix_rows if not r.passed]
        assert not failures, f"{len(failures)} oracle rows failed"
        assert max(r.max_error for r in matrix_rows) < 1e-6

    def test_mean_photon_number_is_state_independent(self, matrix_rows):
        # <n> must equal |g|^2 in every configuration while the DOC spans a
        # wide range: emission probability carries no coherence information.
        for row in matrix_rows:
            for check in row.checks:
                if check.name.startswith("mean_n"):
                    assert check.error < 1e-6
        docs = [r.doc_fundamental for r in matrix_rows]
        assert max(docs) - min(docs) > 0.3

    def test_observables_structure(self, matrix_rows):
        two_mode = next(r for r in matrix_rows if len(r.harmonics) == 2)
        names = {c.name for c in two_mode.checks}
        assert "pair_normal[1,2]" in names
        assert "pair_anomalous[1,2]" in names
        assert "energy_bookkeeping" in names

    def test_require_all_passed_accepts_good_rows(self, matrix_rows):
        require_all_passed(matrix_rows)  # must not raise

    def test_require_all_passed_raises_with_details(self, matrix_rows):
        import dataclasses

        row = matrix_rows[0]
        bad_check = dataclasses.replace(
            row.checks[0], error=1.0, passed=False, expected=0.0 + 0.0j
        )
        bad_row = dataclasses.replace(row, checks=(bad_check, *row.checks[1:]))
        with pytest.raises(OracleMismatchError) as excinfo:
            require_all_passed([bad_row, *matrix_rows[1:]])
        assert bad_check.name in str(excinfo.value)


class TestObservablesHelper:
    def test_keys_by_harmonic(self):
        state = pinem_ladder(0.5, BEAM)
        modes = (OracleMode(1, 0.1, photon_cutoff=4), OracleMode(2, 0.1, photon_cutoff=4))
        space = TruncatedSpace.for_ladder(state.cutoff, modes)
        obs = observables(space, evolve(space, state.coefficients))
        assert set(obs.mean_a) == {1, 2}
        assert set(obs.mean_n) == {1, 2}
        assert set(obs.central_moments[1]) == {2, 3}
        assert set(obs.pair_correlations) == {(1, 2)}
        assert obs.norm == pytest.approx(1.0, abs=1e-10)

    def test_mode_validation(self):
        with pytest.raises(ValueError):
            OracleMode(0, 0.1)
        with pytest.raises(ValueError):
            OracleMode(1, 0.1, photon_cutoff=0)
