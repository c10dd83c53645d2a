//! Executes a validated scenario, task by task, writing one artifact per task.

use std::fmt;
use std::path::{Path, PathBuf};

use gamow_core::coherent::{make_quasi_coherent, time_overlap};
use gamow_core::decoherence::{
    compare_times, off_diagonal, off_diagonal_with, OffDiagonalForm, Superposition,
};
use gamow_core::dynamics::echo;
use gamow_core::resolvent::{certify_pole, find_pole};
use gamow_core::{ladder_spectrum, linear_grid, FriedrichsModel, GamowSpectrum, GamowState, Hbar};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{InitialState, ModelSpec, ScenarioConfig, SpectrumSource, Task};
use crate::output::{complex, num, Artifacts, Csv};

#[derive(Debug)]
pub enum RunError {
    Numerical {
        task: Task,
        error: gamow_core::Error,
    },
    Io {
        path: PathBuf,
        error: std::io::Error,
    },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Numerical { task, error } => write!(f, "task {}: {error}", task.name()),
            RunError::Io { path, error } => write!(f, "writing {}: {error}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

/// Files written by a completed run, plus the failure that stopped it, if any.
#[derive(Debug)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub failure: Option<RunError>,
}

struct Resolved {
    hbar: Hbar,
    spectrum: Option<GamowSpectrum>,
    grid: Vec<f64>,
}

/// Runs every task of `cfg`, writing artifacts to `out`. A numerical failure
/// stops the run; the artifacts of earlier tasks and an `error.json` remain.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> RunReport {
    let mut artifacts = Artifacts::new(out);
    let failure = run_tasks(cfg, &mut artifacts).err();
    if let Some(err) = &failure {
        let (task, kind) = match err {
            RunError::Numerical { task, .. } => (Value::String(task.name().into()), "numerical"),
            RunError::Io { .. } => (Value::Null, "io"),
        };
        let report = json!({"task": task, "kind": kind, "error": err.to_string()});
        let path = out.join("error.json");
        // best effort: the original failure is what gets reported
        let _ = crate::output::write_json(&path, &report);
    }
    let finished = artifacts.finish();
    let mut written = artifacts.written().to_vec();
    if failure.is_some() {
        written.push(out.join("error.json"));
    }
    RunReport {
        written,
        failure: failure.or_else(|| {
            finished.err().map(|error| RunError::Io {
                path: out.join("schema.json"),
                error,
            })
        }),
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |error| RunError::Io {
        path: path.to_path_buf(),
        error,
    }
}

fn run_tasks(cfg: &ScenarioConfig, artifacts: &mut Artifacts) -> Result<(), RunError> {
    if cfg.tasks.is_empty() {
        return Ok(());
    }
    let hbar = Hbar::new(cfg.hbar).expect("validated");
    let mut resolved = Resolved {
        hbar,
        spectrum: None,
        grid: Vec::new(),
    };
    for &task in &cfg.tasks {
        let numerical = |error| RunError::Numerical { task, error };
        if task != Task::FindPole && resolved.spectrum.is_none() {
            resolved.spectrum = Some(build_spectrum(cfg).map_err(numerical)?);
            let g = cfg.time_grid.expect("validated");
            resolved.grid = linear_grid(g.t_start, g.t_end, g.samples).map_err(numerical)?;
        }
        let dir = artifacts.dir().to_path_buf();
        match task {
            Task::FindPole => {
                let value = poles(cfg.model.as_ref().expect("validated")).map_err(numerical)?;
                artifacts
                    .json("poles.json", &value, POLES_FIELDS)
                    .map_err(io(&dir))?;
            }
            Task::Echo => {
                let csv = echo_table(cfg, &resolved).map_err(numerical)?;
                artifacts
                    .csv("echo.csv", &csv, describe_echo)
                    .map_err(io(&dir))?;
            }
            Task::Overlaps => {
                let csv = overlap_table(cfg, &resolved).map_err(numerical)?;
                artifacts
                    .csv("overlaps.csv", &csv, describe_overlap)
                    .map_err(io(&dir))?;
            }
            Task::Decoherence => {
                let csv = decoherence_table(cfg, &resolved).map_err(numerical)?;
                artifacts
                    .csv("decoherence.csv", &csv, describe_decoherence)
                    .map_err(io(&dir))?;
            }
            Task::Compare => {
                let value = comparison(cfg, &resolved).map_err(numerical)?;
                artifacts
                    .json("compare.json", &value, COMPARE_FIELDS)
                    .map_err(io(&dir))?;
            }
        }
    }
    Ok(())
}

fn model_at(spec: &ModelSpec, lambda: f64) -> gamow_core::Result<FriedrichsModel> {
    FriedrichsModel::new(spec.omega_0, lambda, spec.form_factor.clone())
}

fn build_spectrum(cfg: &ScenarioConfig) -> gamow_core::Result<GamowSpectrum> {
    match cfg.spectrum.as_ref().expect("validated") {
        SpectrumSource::Explicit(poles) => GamowSpectrum::user_supplied(poles.clone()),
        SpectrumSource::Ladder { z0, n_max } => ladder_spectrum(*z0, *n_max),
        SpectrumSource::Solved { n_max } => {
            let spec = cfg.model.as_ref().expect("validated");
            let report = find_pole(
                &model_at(spec, spec.lambda)?,
                spec.tolerance,
                spec.max_iterations,
            )?;
            ladder_spectrum(report.pole, *n_max)
        }
    }
}

const POLES_FIELDS: &[(&str, &str)] = &[
    ("form_factor", "form factor family"),
    ("omega_0", "bare level energy"),
    ("poles", "one entry per coupling, in sweep order"),
    ("poles[].lambda", "coupling constant"),
    ("poles[].e_r", "resonance energy Re z0"),
    ("poles[].gamma", "width -2 Im z0"),
    ("poles[].re", "Re z0"),
    ("poles[].im", "Im z0"),
    (
        "poles[].gamma_over_lambda_sq",
        "gamma / lambda^2; null at lambda = 0",
    ),
    ("poles[].newton_iterations", "Newton steps taken"),
    ("poles[].residual", "|eta_II(z0)| at the returned pole"),
    (
        "poles[].argument_principle_count",
        "zeros of eta_II in a rectangle around z0; null when the pole sits on the real axis",
    ),
];

fn poles(spec: &ModelSpec) -> gamow_core::Result<Value> {
    let mut entries = Vec::with_capacity(spec.lambdas.len());
    for &lambda in &spec.lambdas {
        let model = model_at(spec, lambda)?;
        let report = certify_pole(
            &model,
            find_pole(&model, spec.tolerance, spec.max_iterations)?,
        )?;
        let z = report.pole.z();
        let ratio = if lambda == 0.0 {
            Value::Null
        } else {
            num(report.pole.gamma() / (lambda * lambda))
        };
        entries.push(json!({
            "lambda": num(lambda),
            "e_r": num(report.pole.e_r()),
            "gamma": num(report.pole.gamma()),
            "re": num(z.re),
            "im": num(z.im),
            "gamma_over_lambda_sq": ratio,
            "newton_iterations": report.newton_iterations,
            "residual": num(report.final_residual),
            "argument_principle_count": report.argument_principle_count,
        }));
    }
    let kind = format!("{:?}", spec.form_factor.kind());
    Ok(json!({"form_factor": kind, "omega_0": num(spec.omega_0), "poles": entries}))
}

fn superposition(state: &InitialState) -> gamow_core::Result<Superposition> {
    match *state {
        InitialState::Superposition {
            a,
            b,
            alpha1,
            alpha2,
            n_max,
        } => Superposition::normalized(
            a,
            b,
            make_quasi_coherent(alpha1, n_max)?,
            make_quasi_coherent(alpha2, n_max)?,
        ),
        _ => unreachable!("validated"),
    }
}

fn echo_state(state: &InitialState) -> gamow_core::Result<GamowState> {
    match *state {
        InitialState::Gamow(ref c) => GamowState::new(c.clone()),
        InitialState::QuasiCoherent { alpha, n_max } => {
            Ok(make_quasi_coherent(alpha, n_max)?.state().clone())
        }
        InitialState::Superposition { .. } => Ok(superposition(state)?.state()),
    }
}

fn describe_echo(col: &str) -> String {
    match col {
        "tau" => "echo time".into(),
        "amplitude" => "echo amplitude L(tau) = sum_n |a_n|^2 exp(-tau gamma_n / hbar)".into(),
        "probability" => "M(tau) = |L(tau)|^2".into(),
        mode => format!(
            "contribution of Gamow mode {} to the amplitude",
            mode.trim_start_matches("mode_")
        ),
    }
}

fn echo_table(cfg: &ScenarioConfig, r: &Resolved) -> gamow_core::Result<Csv> {
    let state = echo_state(cfg.initial_state.as_ref().expect("validated"))?;
    let spectrum = r.spectrum.as_ref().expect("resolved");
    let mut header = vec!["tau".to_string(), "amplitude".into(), "probability".into()];
    header.extend((0..state.mode_count()).map(|n| format!("mode_{n}")));
    let mut csv = Csv::new(header);
    let mut row = Vec::with_capacity(state.mode_count() + 3);
    for &tau in &r.grid {
        let e = echo(&state, spectrum, tau, r.hbar)?;
        row.clear();
        row.extend([tau, e.amplitude.re, e.probability]);
        row.extend(&e.per_mode_contributions);
        csv.row(&row);
    }
    Ok(csv)
}

fn describe_overlap(col: &str) -> String {
    if col == "t" {
        return "time".into();
    }
    let (part, ij) = col.split_once('_').expect("column names are part_ij");
    let (i, j) = (&ij[..1], &ij[1..]);
    let part = if part == "re" { "real" } else { "imaginary" };
    format!("{part} part of <alpha_{i}(0)|alpha_{j}(t)>")
}

fn overlap_table(cfg: &ScenarioConfig, r: &Resolved) -> gamow_core::Result<Csv> {
    let sup = superposition(cfg.initial_state.as_ref().expect("validated"))?;
    let spectrum = r.spectrum.as_ref().expect("resolved");
    let pairs = [
        ("11", sup.s1(), sup.s1()),
        ("12", sup.s1(), sup.s2()),
        ("21", sup.s2(), sup.s1()),
        ("22", sup.s2(), sup.s2()),
    ];
    let mut header = vec!["t".to_string()];
    for (ij, _, _) in &pairs {
        header.push(format!("re_{ij}"));
        header.push(format!("im_{ij}"));
    }
    let mut csv = Csv::new(header);
    for &t in &r.grid {
        let mut row = vec![t];
        for (_, bra, ket) in &pairs {
            let o = time_overlap(bra, ket, spectrum, t, r.hbar)?;
            row.extend([o.re, o.im]);
        }
        csv.row(&row);
    }
    Ok(csv)
}

fn describe_decoherence(col: &str) -> String {
    match col {
        "t" => "time",
        "abs_rho12" => "|rho_12(t)| from both terms of the exact off-diagonal element",
        "arg_rho12" => "arg rho_12(t) in radians",
        "abs_rho21" => "|rho_21(t)|",
        "abs_rho12_full_sum" => {
            "|rho_12(t)| from the alpha_1 = 0 Poisson sum over all ladder poles"
        }
        "abs_rho12_single_pole" => "|rho_12(t)| keeping only the fundamental pole",
        _ => unreachable!("unknown column"),
    }
    .into()
}

fn decoherence_table(cfg: &ScenarioConfig, r: &Resolved) -> gamow_core::Result<Csv> {
    let sup = superposition(cfg.initial_state.as_ref().expect("validated"))?;
    let spectrum = r.spectrum.as_ref().expect("resolved");
    let exact = off_diagonal(&sup, spectrum, &r.grid, r.hbar)?;
    // the reduced forms exist only for a vacuum first label
    let variants = if sup.s1().alpha() == Complex64::new(0.0, 0.0) {
        Some((
            off_diagonal_with(&sup, spectrum, &r.grid, r.hbar, OffDiagonalForm::FullSum)?,
            off_diagonal_with(&sup, spectrum, &r.grid, r.hbar, OffDiagonalForm::SinglePole)?,
        ))
    } else {
        None
    };
    let mut header: Vec<String> = ["t", "abs_rho12", "arg_rho12", "abs_rho21"]
        .map(String::from)
        .to_vec();
    if variants.is_some() {
        header.extend(["abs_rho12_full_sum".into(), "abs_rho12_single_pole".into()]);
    }
    let mut csv = Csv::new(header);
    for (i, &t) in r.grid.iter().enumerate() {
        let rho12 = exact.rho12.values()[i];
        let mut row = vec![t, rho12.norm(), rho12.arg(), exact.rho21.values()[i].norm()];
        if let Some((full, single)) = &variants {
            row.extend([
                full.rho12.values()[i].norm(),
                single.rho12.values()[i].norm(),
            ]);
        }
        csv.row(&row);
    }
    Ok(csv)
}

const COMPARE_FIELDS: &[(&str, &str)] = &[
    ("hbar", "reduced Planck constant used"),
    ("poles", "the shared Gamow spectrum: e_r and gamma per mode"),
    (
        "gamma_over_hbar",
        "per-mode echo decay rates gamma_n / hbar",
    ),
    ("echo_initial_rate", "-d/dtau ln L at tau = 0 for |alpha_2>"),
    (
        "decoherence_time",
        "1/e drop time of |rho_12 - asymptote|; null if it never drops",
    ),
    ("asymptote_12", "t -> infinity limit of the exact rho_12"),
    (
        "asymptote_12_full_sum",
        "limit of the alpha_1 = 0 Poisson-sum form; null otherwise",
    ),
    ("abs_ab", "|a b^*| after normalization"),
    (
        "superposition",
        "normalized weights, labels, truncation and norm",
    ),
    (
        "normalizer_sq",
        "squared finite-N normalizers of both constituents",
    ),
    (
        "shared_parameters",
        "echo and decoherence used identical widths and Poisson weights",
    ),
    (
        "quasi_orthogonal",
        "whether the labels passed the macroscopicity check",
    ),
];

fn comparison(cfg: &ScenarioConfig, r: &Resolved) -> gamow_core::Result<Value> {
    let sup = superposition(cfg.initial_state.as_ref().expect("validated"))?;
    let spectrum = r.spectrum.as_ref().expect("resolved");
    let report = compare_times(&sup, spectrum, &r.grid, r.hbar)?;
    let full_sum_limit = if sup.s1().alpha() == Complex64::new(0.0, 0.0) {
        complex(
            off_diagonal_with(
                &sup,
                spectrum,
                &r.grid[..1],
                r.hbar,
                OffDiagonalForm::FullSum,
            )?
            .asymptote_12,
        )
    } else {
        Value::Null
    };
    let poles: Vec<Value> = report
        .poles
        .iter()
        .map(|p| json!({"e_r": num(p.e_r()), "gamma": num(p.gamma())}))
        .collect();
    Ok(json!({
        "hbar": num(r.hbar.get()),
        "poles": poles,
        "gamma_over_hbar": report.echo_rates.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "echo_initial_rate": num(report.echo_initial_rate),
        "decoherence_time": num(report.decoherence_time),
        "asymptote_12": complex(report.decoherence.asymptote_12),
        "asymptote_12_full_sum": full_sum_limit,
        "abs_ab": num((sup.a() * sup.b().conj()).norm()),
        "superposition": {
            "a": complex(sup.a()),
            "b": complex(sup.b()),
            "alpha1": complex(sup.s1().alpha()),
            "alpha2": complex(sup.s2().alpha()),
            "n_max": sup.s1().n_max(),
            "norm_sq": num(sup.norm_sq()?),
        },
        "normalizer_sq": {
            "alpha1": num((2.0 * sup.s1().ln_normalizer()).exp()),
            "alpha2": num((2.0 * sup.s2().ln_normalizer()).exp()),
        },
        "shared_parameters": report.shared_parameters,
        "quasi_orthogonal": report.decoherence.macroscopic,
    }))
}
