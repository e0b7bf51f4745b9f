"""Truncated-Hilbert-space oracle for the analytic coherence formulas.

This module never uses the closed-form results it is meant to check.  It
builds the full electron-ladder (x) photon-Fock product space, applies the
interaction unitary U = exp(G) with the anti-Hermitian generator

    G = sum_modes g (B_n (x) a+) - conj(g) (B_n^T (x) a),

where B_n lowers the electron ladder index by the mode's harmonic n (photon
emission at n omega0 costs the electron n quanta), and measures observables
by direct operator application on the evolved state vector.  Agreement with
the ladder-overlap predictions (mean field g F, invariant mean photon number
|g|^2, central moments, pair correlations, energy bookkeeping) validates both
routes.

The exponential is evaluated as exp(G)v by scaling-and-squaring Taylor steps
(‖G/s‖ <= 0.5, term-norm cutoff 1e-14) because the two-mode spaces are far
too large for dense matrix exponentials; tests cross-check this routine
against a dense reference on small spaces.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import scipy.sparse as sp

from .errors import OracleMismatchError, PhysicsGuardError
from .estate import LadderState, pinem_ladder, propagate
from .kinematics import BeamParameters
from .spectra import ladder_overlap

_DIMENSION_LIMIT = 20000
_NORM_TOL = 1.0e-10
_LEAK_TOL = 1.0e-8
_TAYLOR_CUT = 1.0e-14
_TAYLOR_MAX_TERMS = 60

DEFAULT_PHOTON_CUTOFF = 12
_MATRIX_TOL = 1.0e-6


@dataclass(frozen=True)
class OracleMode:
    """One photon mode at harmonic n * omega0 with coupling amplitude g."""

    harmonic: int
    g: complex
    photon_cutoff: int = DEFAULT_PHOTON_CUTOFF

    def __post_init__(self) -> None:
        if self.harmonic < 1:
            raise ValueError("harmonic must be >= 1")
        if self.photon_cutoff < 1:
            raise ValueError("photon_cutoff must be >= 1")


@dataclass(frozen=True)
class TruncatedSpace:
    """Electron levels -M..+M tensored with one Fock space per mode."""

    electron_halfwidth: int
    modes: tuple[OracleMode, ...]

    def __post_init__(self) -> None:
        if self.electron_halfwidth < 1:
            raise ValueError("electron_halfwidth must be >= 1")
        if not self.modes:
            raise ValueError("need at least one mode")
        object.__setattr__(self, "modes", tuple(self.modes))
        if self.dimension > _DIMENSION_LIMIT:
            raise PhysicsGuardError(
                f"truncated space dimension {self.dimension} exceeds {_DIMENSION_LIMIT}"
            )

    @property
    def electron_dim(self) -> int:
        return 2 * self.electron_halfwidth + 1

    @property
    def photon_dims(self) -> tuple[int, ...]:
        return tuple(m.photon_cutoff + 1 for m in self.modes)

    @property
    def dimension(self) -> int:
        return self.electron_dim * int(np.prod(self.photon_dims))

    @classmethod
    def for_ladder(
        cls, ladder_cutoff: int, modes: tuple[OracleMode, ...], margin: int = 5
    ) -> "TruncatedSpace":
        """Electron half-width covering the ladder plus the worst-case photon
        recoil N_max * max harmonic, plus a safety margin."""
        n_max = max(m.photon_cutoff for m in modes)
        h_max = max(m.harmonic for m in modes)
        return cls(ladder_cutoff + n_max * h_max + margin, tuple(modes))


def _electron_lowering(electron_dim: int, n: int) -> sp.spmatrix:
    """B_n: |j> -> |j - n> on the truncated ladder (row j-n, column j)."""
    return sp.diags(np.ones(electron_dim - n), offsets=n, format="csr")


def _fock_annihilation(dim: int) -> sp.spmatrix:
    return sp.diags(np.sqrt(np.arange(1.0, dim)), offsets=1, format="csr")


def _mode_annihilation(space: TruncatedSpace, index: int) -> sp.spmatrix:
    ops = [sp.identity(space.electron_dim, format="csr")]
    for k, dim in enumerate(space.photon_dims):
        ops.append(
            _fock_annihilation(dim) if k == index else sp.identity(dim, format="csr")
        )
    out = ops[0]
    for op in ops[1:]:
        out = sp.kron(out, op, format="csr")
    return out


def build_generator(space: TruncatedSpace) -> sp.spmatrix:
    """Anti-Hermitian interaction generator G on the product space."""
    gen = None
    for i, mode in enumerate(space.modes):
        lower = _electron_lowering(space.electron_dim, mode.harmonic)
        ops_up = [lower]
        for k, dim in enumerate(space.photon_dims):
            ops_up.append(
                _fock_annihilation(dim).T if k == i else sp.identity(dim, format="csr")
            )
        up = ops_up[0]
        for op in ops_up[1:]:
            up = sp.kron(up, op, format="csr")
        term = mode.g * up - np.conj(mode.g) * up.conj().T
        gen = term if gen is None else gen + term
    return gen.tocsr()


def _expmv(gen: sp.spmatrix, vec: np.ndarray) -> np.ndarray:
    """exp(gen) @ vec by s-fold scaled Taylor summation."""
    one_norm = float(np.max(np.abs(gen).sum(axis=0)))
    s = max(1, int(math.ceil(one_norm / 0.5)))
    v = vec.astype(complex)
    for _ in range(s):
        term = v
        out = v.copy()
        for k in range(1, _TAYLOR_MAX_TERMS + 1):
            term = gen.dot(term) / (s * k)
            out += term
            if np.linalg.norm(term) < _TAYLOR_CUT * np.linalg.norm(out):
                break
        else:
            raise PhysicsGuardError("Taylor series for exp(G) v did not converge")
        v = out
    return v


def initial_vector(space: TruncatedSpace, electron_coefficients: np.ndarray) -> np.ndarray:
    """Electron ladder amplitudes centred in the space, photon modes in vacuum."""
    c = np.asarray(electron_coefficients, dtype=complex)
    if c.ndim != 1 or c.size % 2 != 1:
        raise ValueError("electron coefficients must be a 1-D array of odd length")
    j = (c.size - 1) // 2
    m = space.electron_halfwidth
    if j > m:
        raise ValueError("electron coefficients wider than the truncated ladder")
    elec = np.zeros(space.electron_dim, dtype=complex)
    elec[m - j : m + j + 1] = c
    vec = elec
    for dim in space.photon_dims:
        vac = np.zeros(dim, dtype=complex)
        vac[0] = 1.0
        vec = np.kron(vec, vac)
    return vec


def evolve(space: TruncatedSpace, electron_coefficients: np.ndarray) -> np.ndarray:
    """Apply the interaction unitary to (ladder state) x (vacuum modes).

    Raises PhysicsGuardError when unitarity drifts beyond 1e-10 or when any
    truncation boundary (top Fock level, ladder edge) holds more than 1e-8
    population -- enlarge the space rather than trust the result.
    """
    gen = build_generator(space)
    v0 = initial_vector(space, electron_coefficients)
    v = _expmv(gen, v0)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > _NORM_TOL:
        raise PhysicsGuardError(f"evolved norm {norm!r} deviates from 1 beyond {_NORM_TOL:g}")
    leak = truncation_leakage(space, v)
    worst = max(leak.values())
    if worst > _LEAK_TOL:
        raise PhysicsGuardError(
            f"truncation boundary population {worst:.3e} exceeds {_LEAK_TOL:g}; "
            "increase electron_halfwidth or photon_cutoff"
        )
    return v


def evolve_dense(space: TruncatedSpace, electron_coefficients: np.ndarray) -> np.ndarray:
    """Dense scipy.linalg.expm reference path (small spaces only)."""
    from scipy.linalg import expm

    if space.dimension > 4000:
        raise PhysicsGuardError("dense reference limited to dimension <= 4000")
    gen = build_generator(space).toarray()
    v0 = initial_vector(space, electron_coefficients)
    return expm(gen) @ v0


def _as_tensor(space: TruncatedSpace, vec: np.ndarray) -> np.ndarray:
    return vec.reshape((space.electron_dim, *space.photon_dims))


def truncation_leakage(space: TruncatedSpace, vec: np.ndarray) -> dict:
    """Population stranded on each truncation boundary."""
    t = np.abs(_as_tensor(space, vec)) ** 2
    out = {
        "electron_low": float(np.sum(t[0])),
        "electron_high": float(np.sum(t[-1])),
    }
    for i in range(len(space.modes)):
        sl = [slice(None)] * t.ndim
        sl[1 + i] = -1
        out[f"mode{i}_top_fock"] = float(np.sum(t[tuple(sl)]))
    return out


def photon_distribution(space: TruncatedSpace, vec: np.ndarray, index: int) -> np.ndarray:
    """Marginal Fock-number distribution of one mode."""
    t = np.abs(_as_tensor(space, vec)) ** 2
    axes = tuple(k for k in range(t.ndim) if k != 1 + index)
    return np.sum(t, axis=axes)


def electron_mean_level(space: TruncatedSpace, vec: np.ndarray) -> float:
    t = np.sum(np.abs(_as_tensor(space, vec)) ** 2, axis=tuple(range(1, 1 + len(space.modes))))
    j = np.arange(-space.electron_halfwidth, space.electron_halfwidth + 1)
    return float(np.sum(j * t))


def oracle_mean_a(space: TruncatedSpace, vec: np.ndarray, index: int) -> complex:
    a_op = _mode_annihilation(space, index)
    return complex(np.vdot(vec, a_op.dot(vec)))


def oracle_mean_n(space: TruncatedSpace, vec: np.ndarray, index: int) -> float:
    w = _mode_annihilation(space, index).dot(vec)
    return float(np.real(np.vdot(w, w)))


def oracle_central_moment(
    space: TruncatedSpace, vec: np.ndarray, index: int, order: int
) -> complex:
    """<(a - <a>)^order> by repeated operator application."""
    if order < 1:
        raise ValueError("order must be >= 1")
    a_op = _mode_annihilation(space, index)
    mean = complex(np.vdot(vec, a_op.dot(vec)))
    u = vec
    for _ in range(order):
        u = a_op.dot(u) - mean * u
    return complex(np.vdot(vec, u))


def oracle_pair_correlation(
    space: TruncatedSpace, vec: np.ndarray, index_a: int, index_b: int
) -> tuple[complex, complex]:
    """(<a+_i a_k>, <a_i a_k>) for two modes."""
    op_a = _mode_annihilation(space, index_a)
    op_b = _mode_annihilation(space, index_b)
    normal = complex(np.vdot(op_a.dot(vec), op_b.dot(vec)))
    anomalous = complex(np.vdot(vec, op_a.dot(op_b.dot(vec))))
    return normal, anomalous


@dataclass(frozen=True)
class OracleObservables:
    """Measured quantities of an evolved state, keyed by mode harmonic."""

    mean_a: dict
    mean_n: dict
    central_moments: dict
    pair_correlations: dict
    electron_mean_level: float
    leakage: dict
    norm: float


def observables(space: TruncatedSpace, vec: np.ndarray, moment_orders=(2, 3)) -> OracleObservables:
    mean_a = {}
    mean_n = {}
    moments = {}
    for i, mode in enumerate(space.modes):
        mean_a[mode.harmonic] = oracle_mean_a(space, vec, i)
        mean_n[mode.harmonic] = oracle_mean_n(space, vec, i)
        moments[mode.harmonic] = {
            order: oracle_central_moment(space, vec, i, order) for order in moment_orders
        }
    pairs = {}
    for i, mode_i in enumerate(space.modes):
        for k, mode_k in enumerate(space.modes):
            if i < k:
                pairs[(mode_i.harmonic, mode_k.harmonic)] = oracle_pair_correlation(
                    space, vec, i, k
                )
    return OracleObservables(
        mean_a=mean_a,
        mean_n=mean_n,
        central_moments=moments,
        pair_correlations=pairs,
        electron_mean_level=electron_mean_level(space, vec),
        leakage=truncation_leakage(space, vec),
        norm=float(np.linalg.norm(vec)),
    )


@dataclass(frozen=True)
class OracleCheck:
    name: str
    value: complex
    expected: complex
    error: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class OracleCheckRow:
    """One configuration of the validation matrix with all its checks."""

    beta_abs: float
    d_over_zt: float
    g: float
    harmonics: tuple[int, ...]
    dimension: int
    doc_fundamental: float
    checks: tuple[OracleCheck, ...] = field(repr=False)
    runtime_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_error(self) -> float:
        return max(c.error for c in self.checks)


def _check(name: str, value, expected, tol: float) -> OracleCheck:
    err = abs(complex(value) - complex(expected))
    return OracleCheck(name, complex(value), complex(expected), float(err), tol, bool(err <= tol))


def _run_single(
    beta_abs: float, d_over_zt: float, g: float, harmonics: tuple[int, ...], beam: BeamParameters
) -> OracleCheckRow:
    start = time.perf_counter()
    state = pinem_ladder(beta_abs, beam)
    if d_over_zt:
        state = propagate(state, d_over_zt * beam.talbot_distance, mode="quadratic")
    modes = tuple(OracleMode(harmonic=n, g=g) for n in harmonics)
    space = TruncatedSpace.for_ladder(state.cutoff, modes)
    vec = evolve(space, state.coefficients)
    obs = observables(space, vec)

    def overlap(n: int) -> complex:
        return ladder_overlap(state, n)

    checks: list[OracleCheck] = []
    for mode in modes:
        n = mode.harmonic
        b_n = overlap(n)
        checks.append(_check(f"mean_a[{n}]", obs.mean_a[n], mode.g * b_n, _MATRIX_TOL))
        checks.append(_check(f"mean_n[{n}]", obs.mean_n[n], abs(mode.g) ** 2, _MATRIX_TOL))
        for order, measured in obs.central_moments[n].items():
            pred = sum(
                math.comb(order, k) * overlap(k * n) * (-b_n) ** (order - k)
                for k in range(order + 1)
            ) * mode.g**order
            checks.append(_check(f"central_moment[{n},{order}]", measured, pred, _MATRIX_TOL))
    for (n1, n2), (normal, anomalous) in obs.pair_correlations.items():
        g1 = modes[[m.harmonic for m in modes].index(n1)].g
        g2 = modes[[m.harmonic for m in modes].index(n2)].g
        checks.append(
            _check(f"pair_normal[{n1},{n2}]", normal, np.conj(g1) * g2 * overlap(n2 - n1), _MATRIX_TOL)
        )
        checks.append(
            _check(f"pair_anomalous[{n1},{n2}]", anomalous, g1 * g2 * overlap(n1 + n2), _MATRIX_TOL)
        )
    checks.append(_check("norm", obs.norm, 1.0, _NORM_TOL))
    drop = electron_mean_level_initial(state) - obs.electron_mean_level
    budget = sum(n * obs.mean_n[n] for n in obs.mean_n)
    checks.append(_check("energy_bookkeeping", drop, budget, 1.0e-8))
    leak = max(obs.leakage.values())
    checks.append(_check("truncation_leakage", leak, 0.0, _LEAK_TOL))

    return OracleCheckRow(
        beta_abs=beta_abs,
        d_over_zt=d_over_zt,
        g=g,
        harmonics=harmonics,
        dimension=space.dimension,
        doc_fundamental=abs(overlap(1)) ** 2,
        checks=tuple(checks),
        runtime_s=time.perf_counter() - start,
    )


def electron_mean_level_initial(state: LadderState) -> float:
    j = state.level_indices
    return float(np.sum(j * np.abs(state.coefficients) ** 2))


BETA_GRID = (0.0, 0.5, 1.0)
DISTANCE_GRID = (0.0, 0.1, 0.25)
COUPLING_GRID = (0.05, 0.3, 0.8)
MODE_SETS = ((1,), (1, 2))


def run_test_matrix(
    beam: BeamParameters | None = None, max_workers: int = 1
) -> list[OracleCheckRow]:
    """The full validation matrix: |beta| x d/z_T x g x mode sets (54 rows)."""
    if beam is None:
        beam = BeamParameters.from_wavelength(200.0e3, 800.0)
    configs = list(product(BETA_GRID, DISTANCE_GRID, COUPLING_GRID, MODE_SETS))
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(
                pool.map(lambda cfg: _run_single(cfg[0], cfg[1], cfg[2], cfg[3], beam), configs)
            )
    else:
        rows = [_run_single(b, d, g, m, beam) for b, d, g, m in configs]
    return rows


def require_all_passed(rows: list[OracleCheckRow]) -> None:
    """Raise OracleMismatchError naming the worst offending check."""
    bad = [r for r in rows if not r.passed]
    if not bad:
        return
    worst = max(
        (c for r in bad for c in r.checks if not c.passed), key=lambda c: c.error / c.tolerance
    )
    raise OracleMismatchError(
        f"{len(bad)} of {len(rows)} oracle configurations failed; worst check "
        f"{worst.name}: |{worst.value:.9g} - {worst.expected:.9g}| = {worst.error:.3e} "
        f"> {worst.tolerance:g}"
    )
