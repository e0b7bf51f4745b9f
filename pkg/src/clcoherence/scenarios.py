"""Scenario runners behind the CLI: compute, write CSV/JSON artifacts, manifest.

Every run writes `summary.json` plus scenario-specific CSVs into the output
directory, and a `manifest.json` that embeds the resolved config, its sha256,
the effective seed, derived beam constants, and the list of outputs.  Feeding
a manifest back through --config reproduces the run byte-for-byte.
"""
from __future__ import annotations

import csv
import json
import logging
import platform
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ScenarioConfig
from .constants import TWO_PI
from .coupling import (
    DEFAULT_GROUP_VELOCITY_RATIO,
    DEFAULT_GVD_FS2_NM,
    FlatCoupling,
    GaussianBandCoupling,
    TabulatedCoupling,
    WaveguideCoupling,
)
from .detection import (
    BeamSplitter,
    ReferencePulse,
    balanced_signal,
    detector_means,
    noise_floor_terms,
    sample_shots,
    snr_estimate,
)
from .errors import ConfigError
from .estate import EnvelopeSpec, pinem_ladder, propagate, synthesize_density
from .kinematics import BeamParameters
from .oracle import require_all_passed, run_test_matrix
from .spectra import (
    density_spectrum,
    doc_map,
    ladder_overlap,
    ladder_spectrum,
    mean_field,
    optimal_bunching_distance,
    spectral_width,
    time_domain_field,
)

log = logging.getLogger("clcoherence")

NM_PER_MM = 1.0e6
NM_PER_UM = 1.0e3


@dataclass(frozen=True)
class RunOptions:
    seed_override: int | None = None
    threads: int = 1
    gnuplot: bool = False


@dataclass(frozen=True)
class RunResult:
    out_dir: Path
    outputs: tuple[str, ...]
    summary: dict


def _fmt_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(c) for c in row])


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _derived_constants(beam: BeamParameters) -> dict:
    return {
        "gamma": beam.gamma,
        "beta_v": beam.beta_v,
        "velocity_nm_fs": beam.velocity,
        "photon_energy_ev": beam.photon_energy,
        "omega0_rad_fs": beam.omega0,
        "talbot_distance_nm": beam.talbot_distance,
    }


# ----------------------------------------------------------------- builders


def build_beam(cfg: ScenarioConfig) -> BeamParameters:
    beam = cfg.section("beam")
    if "wavelength_nm" in beam:
        return BeamParameters.from_wavelength(beam["kinetic_energy_ev"], beam["wavelength_nm"])
    return BeamParameters(beam["kinetic_energy_ev"], beam["photon_energy_ev"])


def build_beta(cfg: ScenarioConfig) -> complex:
    mod = cfg.section("modulation")
    return mod["beta_abs"] * np.exp(1j * mod.get("beta_arg", 0.0))


def build_state(cfg: ScenarioConfig, beam: BeamParameters):
    mod = cfg.section("modulation")
    state = pinem_ladder(build_beta(cfg), beam, cutoff=mod.get("cutoff"))
    prop = cfg.section("propagation")
    distance_mm = prop.get("distance_mm", 0.0)
    if distance_mm:
        state = propagate(state, distance_mm * NM_PER_MM, prop.get("mode", "exact"))
    return state


def build_envelope(cfg: ScenarioConfig) -> tuple[EnvelopeSpec, float | None, float | None]:
    env = cfg.section("envelope")
    spec = EnvelopeSpec(kind=env["kind"], fwhm=env.get("fwhm_fs"))
    return spec, env.get("dt_fs"), env.get("window_fs")


def build_coupling(cfg: ScenarioConfig, beam: BeamParameters, length_um: float | None = None):
    sec = cfg.section("coupling")
    variant = sec["variant"]
    w0 = beam.omega0
    if variant == "flat":
        lo, hi = sec["band_over_omega0"]
        return FlatCoupling(
            g0=complex(sec["g0"]) if not isinstance(sec["g0"], list) else complex(*sec["g0"]),
            band_min=lo * w0,
            band_max=hi * w0,
        )
    if variant == "gaussian_band":
        g0 = sec["g0"]
        return GaussianBandCoupling(
            g0=complex(g0) if not isinstance(g0, list) else complex(*g0),
            center=sec.get("center_over_omega0", 1.0) * w0,
            sigma=sec["sigma_over_omega0"] * w0,
        )
    if variant == "tabulated":
        table_path = Path(sec["table_path"])
        if not table_path.is_absolute():
            table_path = cfg.base_dir / table_path
        try:
            rows = np.loadtxt(table_path, delimiter=",", skiprows=1, ndmin=2)
        except OSError:
            raise ConfigError(f"coupling.table_path: cannot read {table_path}") from None
        if rows.shape[1] != 3:
            raise ConfigError(
                "coupling table must have columns omega_rad_per_fs,g_real,g_imag"
            )
        return TabulatedCoupling(rows[:, 0], rows[:, 1] + 1j * rows[:, 2])
    # waveguide
    g0 = sec["g0"]
    g0 = complex(g0) if not isinstance(g0, list) else complex(*g0)
    if length_um is None:
        length_um = sec.get("length_um")
        if length_um is None:
            raise ConfigError("coupling.length_um is required here (lengths_um is a sweep)")
    v_e = beam.velocity
    return WaveguideCoupling(
        g0=g0,
        omega_match=sec.get("omega_match_over_omega0", 1.0) * w0,
        v_electron=v_e,
        v_group=sec.get("v_group_ratio", DEFAULT_GROUP_VELOCITY_RATIO) * v_e,
        gvd=sec.get("gvd_fs2_nm", DEFAULT_GVD_FS2_NM),
        length=length_um * NM_PER_UM,
    )


def build_splitter(det: dict) -> BeamSplitter:
    spl = det.get("splitter", {"type": "heterodyne"})
    if spl.get("type") == "heterodyne" or "type" in spl:
        return BeamSplitter.heterodyne()
    r = spl["R"]
    t = spl["T"]
    return BeamSplitter(
        R=complex(r) if not isinstance(r, list) else complex(*r),
        T=complex(t) if not isinstance(t, list) else complex(*t),
    )


# ----------------------------------------------------------------- scenarios


def _run_doc_map(cfg: ScenarioConfig, out_dir: Path, options: RunOptions):
    beam = build_beam(cfg)
    beta = build_beta(cfg)
    scan = cfg.section("scan")
    d_min = scan.get("d_min_mm", 0.0) * NM_PER_MM
    d_max = scan.get("d_max_mm", 20.0) * NM_PER_MM
    step = scan.get("coarse_step_mm", 0.01) * NM_PER_MM
    refine = scan.get("refine_tol_mm", 1.0e-3) * NM_PER_MM
    threshold = scan.get("threshold", 0.01)
    n_harm = scan.get("n_harmonics", 40)
    mode = cfg.section("propagation").get("mode", "exact")

    optimum = optimal_bunching_distance(
        beta,
        beam,
        d_min,
        d_max,
        coarse_step=step,
        refine_tol=refine,
        threshold=threshold,
        n_scan=n_harm,
        mode=mode,
    )
    state = pinem_ladder(beta, beam)
    distances = optimum.coarse_distances
    matrix = doc_map(state, distances, n_max=min(n_harm, 2 * state.cutoff), mode=mode)

    rows = []
    for ni in range(matrix.shape[0]):
        for di in range(distances.size):
            rows.append((ni, distances[di] / NM_PER_MM, matrix[ni, di]))
    _write_csv(out_dir / "doc_map.csv", ["omega_over_omega0", "d_mm", "doc"], rows)
    _write_csv(
        out_dir / "width.csv",
        ["d_mm", "width"],
        [(d / NM_PER_MM, int(w)) for d, w in zip(distances, optimum.coarse_widths)],
    )
    outputs = ["doc_map.csv", "width.csv"]
    summary = {
        "optimal_distance_mm": optimum.distance / NM_PER_MM,
        "optimal_distance_nm": optimum.distance,
        "width_max": optimum.width,
        "tiebreak_sum_sqrt_doc": optimum.tiebreak_value,
        "threshold": threshold,
        "propagation_mode": mode,
        "sqrt_doc_at_optimum": {
            str(n): float(
                np.sqrt(
                    doc_map(state, np.array([optimum.distance]), n_max=8, mode=mode)[n, 0]
                )
            )
            for n in range(1, 7)
        },
    }
    log.info(
        "doc-map: d_opt = %.4f mm, width = %d", summary["optimal_distance_mm"], optimum.width
    )
    if options.gnuplot:
        (out_dir / "plot_doc_map.gp").write_text(
            "set datafile separator ','\n"
            "set xlabel 'd (mm)'\nset ylabel 'harmonic n'\nset cblabel 'DOC'\n"
            "plot 'doc_map.csv' using 2:1:3 every ::1 with points palette pt 5 notitle\n"
        )
        outputs.append("plot_doc_map.gp")
    return outputs, summary, beam


def _run_doc_slice(cfg: ScenarioConfig, out_dir: Path, options: RunOptions):
    beam = build_beam(cfg)
    state = build_state(cfg, beam)
    env, dt, window = build_envelope(cfg)
    density = synthesize_density(state, env, dt=dt, window=window)
    spectrum = density_spectrum(density)
    w0 = beam.omega0

    n_keep = min(2 * state.cutoff, 24)
    harm_rows = []
    for n in range(-n_keep, n_keep + 1):
        f_fft = spectrum.value_at(n * w0)
        f_lad = ladder_overlap(state, n)
        harm_rows.append(
            (
                n,
                f_fft.real,
                f_fft.imag,
                f_lad.real,
                f_lad.imag,
                abs(f_fft) ** 2,
                abs(f_fft),
            )
        )
    _write_csv(
        out_dir / "harmonics.csv",
        [
            "omega_over_omega0",
            "f_fft_real",
            "f_fft_imag",
            "f_ladder_real",
            "f_ladder_imag",
            "doc",
            "sqrt_doc",
        ],
        harm_rows,
    )

    grid = spectrum.omega_grid
    mask = np.abs(grid) <= n_keep * w0 * (1.0 + 1.0e-12)
    idx = np.nonzero(mask)[0]
    stride = max(1, int(np.ceil(idx.size / 50000)))
    idx = idx[::stride]
    _write_csv(
        out_dir / "spectrum.csv",
        ["omega_over_omega0", "f_real", "f_imag", "doc"],
        [
            (
                grid[i] / w0,
                spectrum.values[i].real,
                spectrum.values[i].imag,
                abs(spectrum.values[i]) ** 2,
            )
            for i in idx
        ],
    )
    outputs = ["harmonics.csv", "spectrum.csv"]

    doc_by_n = np.array([abs(ladder_overlap(state, n)) ** 2 for n in range(0, 2 * state.cutoff + 1)])
    summary = {
        "distance_mm": cfg.section("propagation").get("distance_mm", 0.0),
        "envelope": {"kind": env.kind, "fwhm_fs": env.fwhm},
        "samples": int(density.samples.size),
        "dt_fs": density.dt,
        "periods_in_window": density.periods_in_window,
        "width_at_1pct": int(spectral_width(doc_by_n, 0.01)),
        "max_fft_ladder_mismatch": float(
            max(
                abs(complex(r[1], r[2]) - complex(r[3], r[4]))
                for r in harm_rows
            )
        ),
    }
    log.info(
        "doc-slice: width(1%%) = %d, FFT/ladder mismatch = %.3e",
        summary["width_at_1pct"],
        summary["max_fft_ladder_mismatch"],
    )
    if options.gnuplot:
        (out_dir / "plot_doc_slice.gp").write_text(
            "set datafile separator ','\n"
            "set xlabel 'omega/omega0'\nset ylabel 'DOC'\nset logscale y\n"
            "plot 'spectrum.csv' using 1:4 every ::1 with lines notitle\n"
        )
        outputs.append("plot_doc_slice.gp")
    return outputs, summary, beam


def _coherent_band(spectrum, model, w0: float, half_width: float):
    return mean_field(model, spectrum, band=(w0 - half_width, w0 + half_width))


def _run_waveguide(cfg: ScenarioConfig, out_dir: Path, options: RunOptions):
    beam = build_beam(cfg)
    state = build_state(cfg, beam)
    env, dt, window = build_envelope(cfg)
    density = synthesize_density(state, env, dt=dt, window=window)
    spectrum = density_spectrum(density)
    w0 = beam.omega0

    sec = cfg.section("coupling")
    lengths_um = sec.get("lengths_um") or [sec["length_um"]]
    half_width = 0.06  # rad/fs band around the fundamental; resolves all lines
    t_grid = np.linspace(-2560.0, 2560.0, 8193)

    outputs = []
    per_length = []
    for length_um in lengths_um:
        model = build_coupling(cfg, beam, length_um=length_um)
        field = _coherent_band(spectrum, model, w0, half_width)
        wsel = field.omega_grid
        intensity = np.abs(field.a_mean) ** 2
        envelope_vals = model.envelope(wsel)

        # spectral width of |<a>|^2 and sign changes inside the DOC line peak
        from .spectra import _fwhm  # shared width helper

        spec_fwhm = _fwhm(wsel, intensity)
        line = np.abs(spectrum.value_at(wsel)) ** 2
        peak_region = line >= 0.01 * np.max(line)
        env_in_peak = envelope_vals[peak_region]
        sign_changes = int(np.sum(env_in_peak[:-1] * env_in_peak[1:] < 0.0))

        tfield = time_domain_field(field, t=t_grid)

        tag = f"{length_um:g}um"
        spec_name = f"spectrum_{tag}.csv"
        _write_csv(
            out_dir / spec_name,
            ["omega_rad_per_fs", "g_real", "g_imag", "sinc_envelope", "a_abs2"],
            [
                (
                    wsel[i],
                    complex(model.amplitude(wsel[i])).real,
                    complex(model.amplitude(wsel[i])).imag,
                    envelope_vals[i],
                    intensity[i],
                )
                for i in range(0, wsel.size, max(1, wsel.size // 4000))
            ],
        )
        time_name = f"field_{tag}.csv"
        _write_csv(
            out_dir / time_name,
            ["t_fs", "e_real", "e_imag", "intensity"],
            [
                (
                    t_grid[i],
                    tfield.values[i].real,
                    tfield.values[i].imag,
                    abs(tfield.values[i]) ** 2,
                )
                for i in range(0, t_grid.size, 2)
            ],
        )
        outputs.extend([spec_name, time_name])
        per_length.append(
            {
                "length_um": float(length_um),
                "spectral_fwhm_rad_per_fs": spec_fwhm,
                "sign_changes_in_line_peak": sign_changes,
                "time_intensity_fwhm_fs": tfield.fwhm_intensity,
                "time_envelope_fwhm_fs": tfield.fwhm_envelope,
                "eels_probability": model.eels_probability(),
            }
        )

    fwhms = [p["spectral_fwhm_rad_per_fs"] for p in per_length]
    tims = [p["time_intensity_fwhm_fs"] for p in per_length]
    summary = {
        "lengths_um": [float(x) for x in lengths_um],
        "per_length": per_length,
        "spectral_fwhm_monotone_decreasing": bool(
            all(a > b for a, b in zip(fwhms, fwhms[1:]))
        ),
        "time_fwhm_monotone_increasing": bool(all(a < b for a, b in zip(tims, tims[1:]))),
        "defaults": {
            "v_group_ratio": sec.get("v_group_ratio", DEFAULT_GROUP_VELOCITY_RATIO),
            "gvd_fs2_nm": sec.get("gvd_fs2_nm", DEFAULT_GVD_FS2_NM),
        },
    }
    log.info(
        "waveguide: spectral FWHM %s rad/fs over lengths %s um",
        [f"{x:.4g}" for x in fwhms],
        lengths_um,
    )
    if options.gnuplot:
        (out_dir / "plot_waveguide.gp").write_text(
            "set datafile separator ','\n"
            "set xlabel 't (fs)'\nset ylabel 'intensity'\n"
            "plot "
            + ", ".join(
                f"'field_{length_um:g}um.csv' using 1:4 every ::1 with lines title '{length_um:g} um'"
                for length_um in lengths_um
            )
            + "\n"
        )
        outputs.append("plot_waveguide.gp")
    return outputs, summary, beam


def _run_pulse_shape(cfg: ScenarioConfig, out_dir: Path, options: RunOptions):
    beam = build_beam(cfg)
    state = build_state(cfg, beam)
    env, dt, window = build_envelope(cfg)
    density = synthesize_density(state, env, dt=dt, window=window)
    spectrum = density_spectrum(density)
    model = build_coupling(cfg, beam)
    w0 = beam.omega0

    field = _coherent_band(spectrum, model, w0, 0.5 * w0)
    fwhm = env.fwhm or 8.0 * beam.optical_period
    t_grid = np.linspace(-8.0 * fwhm, 8.0 * fwhm, 4097)
    tfield = time_domain_field(field, t=t_grid)

    _write_csv(
        out_dir / "field_time.csv",
        ["t_fs", "e_real", "e_imag", "envelope", "intensity"],
        [
            (
                t_grid[i],
                tfield.values[i].real,
                tfield.values[i].imag,
                abs(tfield.values[i]),
                abs(tfield.values[i]) ** 2,
            )
            for i in range(t_grid.size)
        ],
    )
    outputs = ["field_time.csv"]
    ratio = (
        tfield.fwhm_envelope / tfield.fwhm_intensity
        if tfield.fwhm_intensity and not np.isnan(tfield.fwhm_intensity)
        else float("nan")
    )
    summary = {
        "envelope_fwhm_fs": env.fwhm,
        "field_envelope_fwhm_fs": tfield.fwhm_envelope,
        "field_intensity_fwhm_fs": tfield.fwhm_intensity,
        "envelope_to_intensity_ratio": ratio,
    }
    log.info(
        "pulse-shape: |E| FWHM %.2f fs, |E|^2 FWHM %.2f fs",
        tfield.fwhm_envelope,
        tfield.fwhm_intensity,
    )
    if options.gnuplot:
        (out_dir / "plot_pulse_shape.gp").write_text(
            "set datafile separator ','\n"
            "set xlabel 't (fs)'\nset ylabel '|E|^2'\n"
            "plot 'field_time.csv' using 1:5 every ::1 with lines notitle\n"
        )
        outputs.append("plot_pulse_shape.gp")
    return outputs, summary, beam


def _run_detect(cfg: ScenarioConfig, out_dir: Path, options: RunOptions):
    beam = build_beam(cfg)
    state = build_state(cfg, beam)
    env, dt, window = build_envelope(cfg)
    density = synthesize_density(state, env, dt=dt, window=window)
    spectrum = density_spectrum(density)
    model = build_coupling(cfg, beam)
    det = cfg.section("detection")
    w0 = beam.omega0

    ref_cfg = det["reference"]
    center = ref_cfg.get("center_over_omega0", 1.0) * w0
    sigma = ref_cfg["sigma_over_omega0"] * w0
    half_width = 6.0 * sigma
    field = mean_field(model, spectrum, band=(center - half_width, center + half_width))
    reference = ReferencePulse.gaussian(
        field.omega_grid,
        center=center,
        sigma=sigma,
        total_counts=ref_cfg["total_counts"],
        phase=ref_cfg.get("phase_rad", 0.0),
    )
    splitter = build_splitter(det)
    qe1, qe2 = det.get("qe", [1.0, 1.0])
    seed = options.seed_override if options.seed_override is not None else det["seed"]

    mu1, mu2 = detector_means(splitter, reference, field, qe1, qe2)
    ensemble = sample_shots(
        splitter,
        reference,
        field,
        n_shots=det["shots"],
        seed=seed,
        qe1=qe1,
        qe2=qe2,
    )
    report = snr_estimate(ensemble)
    noise = noise_floor_terms(splitter, reference, model, spectrum)

    _write_csv(
        out_dir / "shots.csv",
        ["shot_index", "i1", "i2"],
        [(i, int(ensemble.counts1[i]), int(ensemble.counts2[i])) for i in range(ensemble.n_shots)],
    )
    outputs = ["shots.csv"]

    sweep_points = det.get("phase_sweep_points", 0)
    if sweep_points:
        phases = np.linspace(0.0, TWO_PI, sweep_points, endpoint=False)
        _write_csv(
            out_dir / "phase_sweep.csv",
            ["phase_rad", "signal"],
            [
                (p, balanced_signal(splitter, reference.with_phase(p), field))
                for p in phases
            ],
        )
        outputs.append("phase_sweep.csv")

    summary = {
        "mu1": mu1,
        "mu2": mu2,
        "signal": mu1 - mu2,
        "empirical_mean_difference": report.signal,
        "empirical_noise_per_shot": report.noise_per_shot,
        "empirical_stderr": report.stderr,
        "snr": report.snr,
        "snr_per_shot": report.snr_per_shot,
        "n_shots": ensemble.n_shots,
        "seed": int(seed),
        "config_sha256": cfg.sha256(),
        "noise_floor": {
            "variance_total": noise.variance_total,
            "reference_shot": noise.reference_shot,
            "cl_shot": noise.cl_shot,
            "field_cross": noise.field_cross,
            "alpha4_coefficient": noise.alpha4_coefficient,
            "alpha3_coefficient": noise.alpha3_coefficient,
            "is_balanced": noise.is_balanced,
        },
        "splitter_imbalance": splitter.imbalance,
        "reference_counts": reference.total_counts,
        "eels_probability": model.eels_probability(),
    }
    log.info(
        "detect: mu1 = %.4f, mu2 = %.4f, snr/shot = %.4f over %d shots",
        mu1,
        mu2,
        report.snr_per_shot,
        ensemble.n_shots,
    )
    if options.gnuplot:
        (out_dir / "plot_detect.gp").write_text(
            "set datafile separator ','\n"
            "set xlabel 'shot'\nset ylabel 'I1 - I2'\n"
            "plot 'shots.csv' using 1:($2-$3) every ::1 with points pt 7 ps 0.3 notitle\n"
        )
        outputs.append("plot_detect.gp")
    return outputs, summary, beam


def _run_oracle_check(cfg: ScenarioConfig, out_dir: Path, options: RunOptions):
    beam = build_beam(cfg) if cfg.section("beam") else BeamParameters.from_wavelength(200.0e3, 800.0)
    rows = run_test_matrix(beam, max_workers=max(1, options.threads))
    _write_csv(
        out_dir / "oracle_check.csv",
        [
            "beta_abs",
            "d_over_zt",
            "g",
            "harmonics",
            "dimension",
            "doc_fundamental",
            "max_abs_error",
            "passed",
            "runtime_s",
        ],
        [
            (
                r.beta_abs,
                r.d_over_zt,
                r.g,
                "+".join(str(h) for h in r.harmonics),
                r.dimension,
                r.doc_fundamental,
                r.max_error,
                r.passed,
                round(r.runtime_s, 4),
            )
            for r in rows
        ],
    )
    outputs = ["oracle_check.csv"]
    docs = [r.doc_fundamental for r in rows]
    summary = {
        "rows": len(rows),
        "passed": sum(1 for r in rows if r.passed),
        "max_abs_error": max(r.max_error for r in rows),
        "doc_fundamental_range": max(docs) - min(docs),
        "total_runtime_s": sum(r.runtime_s for r in rows),
    }
    for r in rows:
        log.info(
            "oracle: beta=%.1f d/zT=%.2f g=%.2f modes=%s dim=%d max_err=%.2e %s",
            r.beta_abs,
            r.d_over_zt,
            r.g,
            r.harmonics,
            r.dimension,
            r.max_error,
            "ok" if r.passed else "FAIL",
        )
    require_all_passed(rows)
    return outputs, summary, beam


def _run_sweep(cfg: ScenarioConfig, out_dir: Path, options: RunOptions):
    beam = build_beam(cfg)
    sweep = cfg.section("sweep")
    param = sweep["parameter"]
    values = sweep["values"]
    n_harm = sweep.get("n_harmonics", 24)
    prop = cfg.section("propagation")
    mode = prop.get("mode", "exact")

    rows = []
    records = []
    for value in values:
        if param == "beta_abs":
            beta = value * np.exp(1j * cfg.section("modulation").get("beta_arg", 0.0))
            distance_mm = prop.get("distance_mm", 0.0)
        else:
            beta = build_beta(cfg)
            distance_mm = value
        state = pinem_ladder(beta, beam)
        if distance_mm:
            state = propagate(state, distance_mm * NM_PER_MM, mode)
        n_top = min(n_harm, 2 * state.cutoff)
        doc_by_n = np.array(
            [abs(ladder_overlap(state, n)) ** 2 for n in range(0, n_top + 1)]
        )
        for n in range(n_top + 1):
            rows.append((param, value, n, doc_by_n[n]))
        records.append(
            {
                "value": float(value),
                "width_at_1pct": int(spectral_width(doc_by_n, 0.01)),
                "doc_fundamental": float(doc_by_n[1]) if n_top >= 1 else 0.0,
            }
        )
    _write_csv(
        out_dir / "sweep.csv", ["parameter", "value", "omega_over_omega0", "doc"], rows
    )
    outputs = ["sweep.csv"]
    summary = {"parameter": param, "records": records}
    log.info("sweep over %s: %d values", param, len(values))
    if options.gnuplot:
        (out_dir / "plot_sweep.gp").write_text(
            "set datafile separator ','\n"
            "set xlabel 'harmonic'\nset ylabel 'DOC'\n"
            "plot 'sweep.csv' using 3:4 every ::1 with points notitle\n"
        )
        outputs.append("plot_sweep.gp")
    return outputs, summary, beam


_RUNNERS = {
    "doc-map": _run_doc_map,
    "doc-slice": _run_doc_slice,
    "waveguide": _run_waveguide,
    "pulse-shape": _run_pulse_shape,
    "detect": _run_detect,
    "oracle-check": _run_oracle_check,
    "sweep": _run_sweep,
}


def run_scenario(
    cfg: ScenarioConfig, out_dir: str | Path, options: RunOptions | None = None
) -> RunResult:
    """Execute a scenario and write its artifacts plus summary and manifest."""
    options = options or RunOptions()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs, summary, beam = _RUNNERS[cfg.scenario](cfg, out_dir, options)
    _write_json(out_dir / "summary.json", summary)
    outputs = list(outputs) + ["summary.json"]

    seed = options.seed_override
    if seed is None:
        seed = cfg.section("detection").get("seed") if "detection" in cfg.data else None
    manifest = {
        "tool": "clcoherence",
        "version": __version__,
        "scenario": cfg.scenario,
        "config": cfg.data,
        "config_sha256": cfg.sha256(),
        "seed": seed,
        "derived_constants": _derived_constants(beam),
        "outputs": sorted(outputs),
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    _write_json(out_dir / "manifest.json", manifest)
    return RunResult(out_dir=out_dir, outputs=tuple(sorted(outputs)), summary=summary)
