"""Balanced-heterodyne detection of the coherent CL field.

A lossless splitter mixes the CL field a with a strong coherent reference
alpha; the two output ports are

    b1 = T a + R alpha,          b2 = conj(T) alpha - conj(R) a,

which is unitary for any |R|^2 + |T|^2 = 1.  Detector means here are the
mean-field (coherent) intensities; fluctuation statistics enter through
`noise_floor_terms`, which assembles the exact variance of the difference
signal from the two-frequency correlators of the CL field.  The difference
operator is D = p (n_a - n_ref) + kappa a+ r + conj(kappa) r+ a with
p = |T|^2 - |R|^2 and kappa = 2 conj(T) R; for a balanced splitter p = 0 and
the reference-intensity noise channels (the |alpha|^4 and |alpha|^3 groups)
cancel identically, leaving vacuum-beat shot noise |kappa|^2 * total counts.

UNITS: alpha(omega) in sqrt(counts per rad/fs); integrals are Riemann sums
on the shared uniform grid so that energy bookkeeping is exact in floats.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import CouplingModel, coupling_amplitude
from .errors import PhysicsGuardError
from .spectra import CoherentField, DensitySpectrum

_UNITARY_TOL = 1.0e-12
_MEAN_OVERFLOW = 1.0e12


@dataclass(frozen=True)
class BeamSplitter:
    """Lossless splitter with complex reflection R and transmission T."""

    R: complex
    T: complex

    def __post_init__(self) -> None:
        r = complex(self.R)
        t = complex(self.T)
        object.__setattr__(self, "R", r)
        object.__setattr__(self, "T", t)
        defect = abs(abs(r) ** 2 + abs(t) ** 2 - 1.0)
        if defect > _UNITARY_TOL:
            raise ValueError(
                f"|R|^2 + |T|^2 deviates from 1 by {defect:.3e} (> {_UNITARY_TOL:g})"
            )

    @classmethod
    def heterodyne(cls) -> "BeamSplitter":
        """Balanced quadrature splitter R = 1/sqrt(2), T = i/sqrt(2)."""
        s = 1.0 / np.sqrt(2.0)
        return cls(R=s, T=1j * s)

    @property
    def imbalance(self) -> float:
        """p = |T|^2 - |R|^2; exactly 0.0 for a balanced splitter."""
        return abs(self.T) ** 2 - abs(self.R) ** 2

    @property
    def kappa(self) -> complex:
        """Heterodyne gain of the difference signal, 2 conj(T) R."""
        return 2.0 * np.conj(self.T) * self.R

    @property
    def is_balanced(self) -> bool:
        return self.imbalance == 0.0


@dataclass(frozen=True, eq=False)
class ReferencePulse:
    """Coherent reference spectrum alpha(omega) on a uniform omega > 0 grid."""

    omega_grid: np.ndarray
    alpha: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.omega_grid, dtype=float)
        a = np.asarray(self.alpha, dtype=complex)
        object.__setattr__(self, "omega_grid", w)
        object.__setattr__(self, "alpha", a)
        if w.ndim != 1 or w.size < 2 or a.shape != w.shape:
            raise ValueError("omega_grid and alpha must be matching 1-D arrays")
        steps = np.diff(w)
        if np.any(w <= 0.0) or np.any(steps <= 0.0):
            raise ValueError("omega_grid must be positive and ascending")
        if np.max(np.abs(steps - steps[0])) > 1.0e-9 * steps[0]:
            raise ValueError("omega_grid must be uniform")

    @property
    def domega(self) -> float:
        return float((self.omega_grid[-1] - self.omega_grid[0]) / (self.omega_grid.size - 1))

    @property
    def total_counts(self) -> float:
        return float(np.sum(np.abs(self.alpha) ** 2) * self.domega)

    @classmethod
    def gaussian(
        cls,
        omega_grid: np.ndarray,
        center: float,
        sigma: float,
        total_counts: float,
        phase: float = 0.0,
    ) -> "ReferencePulse":
        """Gaussian |alpha|^2 profile carrying exactly `total_counts` photons
        on this grid (normalized discretely, so energy checks are exact)."""
        w = np.asarray(omega_grid, dtype=float)
        if sigma <= 0.0 or total_counts < 0.0:
            raise ValueError("sigma must be positive and total_counts non-negative")
        shape = np.exp(-((w - center) ** 2) / (2.0 * sigma**2))
        dw = w[1] - w[0]
        norm = np.sum(shape) * dw
        if norm == 0.0:
            raise ValueError("reference profile vanishes on this grid")
        amp = np.sqrt(total_counts * shape / norm) * np.exp(1j * phase)
        return cls(w, amp)

    def with_phase(self, phase: float) -> "ReferencePulse":
        return ReferencePulse(self.omega_grid, self.alpha * np.exp(1j * phase))


def _check_shared_grid(ref: ReferencePulse, cl: CoherentField | None) -> np.ndarray:
    if cl is None:
        return np.zeros_like(ref.alpha)
    if cl.omega_grid.size != ref.omega_grid.size or np.max(
        np.abs(cl.omega_grid - ref.omega_grid)
    ) > 1.0e-9 * ref.domega:
        raise ValueError("reference and CL field must share one frequency grid")
    return cl.a_mean


def detector_means(
    splitter: BeamSplitter,
    reference: ReferencePulse,
    cl_field: CoherentField | None,
    qe1: float = 1.0,
    qe2: float = 1.0,
) -> tuple[float, float]:
    """Mean photocounts (mu1, mu2) from the coherent amplitudes.

    With unit quantum efficiencies mu1 + mu2 equals the total input energy
    sum(|alpha|^2 + |<a>|^2) d omega exactly.
    """
    if not (0.0 <= qe1 <= 1.0 and 0.0 <= qe2 <= 1.0):
        raise ValueError("quantum efficiencies must lie in [0, 1]")
    a = _check_shared_grid(reference, cl_field)
    alpha = reference.alpha
    dw = reference.domega
    port1 = splitter.T * a + splitter.R * alpha
    port2 = np.conj(splitter.T) * alpha - np.conj(splitter.R) * a
    mu1 = qe1 * float(np.sum(np.abs(port1) ** 2) * dw)
    mu2 = qe2 * float(np.sum(np.abs(port2) ** 2) * dw)
    return mu1, mu2


def balanced_signal(
    splitter: BeamSplitter,
    reference: ReferencePulse,
    cl_field: CoherentField | None,
) -> float:
    """Difference of the two mean photocounts at unit quantum efficiency."""
    mu1, mu2 = detector_means(splitter, reference, cl_field)
    return mu1 - mu2


@dataclass(frozen=True, eq=False)
class ShotEnsemble:
    """Monte Carlo photocount records for both detectors."""

    counts1: np.ndarray
    counts2: np.ndarray
    seed: int
    config: dict

    @property
    def n_shots(self) -> int:
        return self.counts1.size

    @property
    def shots(self) -> np.ndarray:
        """(n_shots, 2) array of (I1, I2)."""
        return np.column_stack([self.counts1, self.counts2])


def sample_shots(
    splitter: BeamSplitter,
    reference: ReferencePulse,
    cl_field: CoherentField | None,
    *,
    n_shots: int,
    seed: int,
    qe1: float = 1.0,
    qe2: float = 1.0,
) -> ShotEnsemble:
    """Poisson photocounts per shot from counter-based streams.

    Each (shot, detector) pair draws from a Philox generator keyed by `seed`
    with counter (0, 0, shot_index, detector_id), so any shot is reproducible
    independently of the others and the two detector streams never overlap.
    Quantum efficiency thins the Poisson mean.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    mu1, mu2 = detector_means(splitter, reference, cl_field, qe1, qe2)
    if max(mu1, mu2) > _MEAN_OVERFLOW:
        raise PhysicsGuardError(
            f"detector mean {max(mu1, mu2):.3e} exceeds {_MEAN_OVERFLOW:g} counts"
        )
    counts1 = np.empty(n_shots, dtype=np.int64)
    counts2 = np.empty(n_shots, dtype=np.int64)
    for shot in range(n_shots):
        for det, mean, out in ((1, mu1, counts1), (2, mu2, counts2)):
            gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, shot, det]))
            out[shot] = gen.poisson(mean)
    config = {
        "n_shots": int(n_shots),
        "seed": int(seed),
        "qe": [float(qe1), float(qe2)],
        "mu1": mu1,
        "mu2": mu2,
        "splitter": {
            "R": [splitter.R.real, splitter.R.imag],
            "T": [splitter.T.real, splitter.T.imag],
        },
        "reference_counts": reference.total_counts,
    }
    return ShotEnsemble(counts1, counts2, int(seed), config)


@dataclass(frozen=True)
class SnrReport:
    signal: float
    noise_per_shot: float
    stderr: float
    snr: float
    snr_per_shot: float
    n_shots: int


def snr_estimate(ensemble: ShotEnsemble) -> SnrReport:
    """Empirical difference-signal statistics of an ensemble."""
    if ensemble.n_shots < 2:
        raise ValueError("need at least 2 shots for a noise estimate")
    diff = ensemble.counts1.astype(float) - ensemble.counts2.astype(float)
    signal = float(np.mean(diff))
    noise = float(np.std(diff, ddof=1))
    if noise == 0.0:
        raise ValueError("degenerate ensemble: zero variance")
    stderr = noise / np.sqrt(ensemble.n_shots)
    return SnrReport(
        signal=signal,
        noise_per_shot=noise,
        stderr=float(stderr),
        snr=float(abs(signal) / stderr),
        snr_per_shot=float(abs(signal) / noise),
        n_shots=ensemble.n_shots,
    )


@dataclass(frozen=True)
class NoiseFloorReport:
    """Exact variance of the balanced difference signal, term by term.

    variance_total = reference_shot + cl_shot + field_cross is the quantum
    variance of D for the balanced sector.  alpha4_coefficient = p^2 and
    alpha3_coefficient = 2|p||kappa| are the splitter prefactors of the
    common-mode reference-intensity noise channels (the |alpha|^4 and
    |alpha|^3 groups); both vanish identically when |R| = |T|, which is the
    cancellation that makes balanced detection shot-noise limited.
    """

    variance_total: float
    reference_shot: float
    cl_shot: float
    field_cross: float
    alpha4_coefficient: float
    alpha3_coefficient: float
    is_balanced: bool


def noise_floor_terms(
    splitter: BeamSplitter,
    reference: ReferencePulse,
    model: CouplingModel,
    spectrum: DensitySpectrum,
) -> NoiseFloorReport:
    """Assemble Var(D) from the CL pair correlators on the reference grid.

    Connected correlators: C+a[n,m] = conj(g_n) g_m F(w_m - w_n) - conj(<a>_n)
    <a>_m and Caa[n,m] = g_n g_m F(w_n + w_m) - <a>_n <a>_m; the spectrum must
    cover every difference and sum frequency of the grid (GridCoverageError
    otherwise).
    """
    w = reference.omega_grid
    dw = reference.domega
    alpha = reference.alpha
    g = np.asarray(coupling_amplitude(model, w), dtype=complex)
    f_on_grid = spectrum.value_at(w)
    mean_a = g * f_on_grid

    f_diff = spectrum.value_at(w[None, :] - w[:, None])
    f_sum = spectrum.value_at(w[None, :] + w[:, None])
    c_norm = np.conj(g)[:, None] * g[None, :] * f_diff - np.conj(mean_a)[:, None] * mean_a[None, :]
    c_anom = g[:, None] * g[None, :] * f_sum - mean_a[:, None] * mean_a[None, :]

    kappa = splitter.kappa
    p = splitter.imbalance
    abs_k2 = abs(kappa) ** 2

    reference_shot = abs_k2 * float(np.sum(np.abs(alpha) ** 2) * dw)
    cl_shot = abs_k2 * float(np.sum(np.abs(g) ** 2) * dw)
    cross = dw * dw * (
        2.0 * np.real(kappa**2 * np.sum(alpha[:, None] * alpha[None, :] * np.conj(c_anom)))
        + 2.0 * np.real(abs_k2 * np.sum(alpha[:, None] * np.conj(alpha)[None, :] * c_norm))
    )
    total = reference_shot + cl_shot + float(cross)
    return NoiseFloorReport(
        variance_total=total,
        reference_shot=reference_shot,
        cl_shot=cl_shot,
        field_cross=float(cross),
        alpha4_coefficient=p * p,
        alpha3_coefficient=2.0 * abs(p) * abs(kappa),
        is_balanced=p == 0.0,
    )
