//! Scenario configuration: a single JSON document, validated in one pass so
//! that every problem is reported together.

use std::fmt;

use gamow_core::coherent::default_truncation;
use gamow_core::{FormFactor, ResonancePole};
use num_complex::Complex64;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Dotted location inside the document, e.g. `spectrum.explicit[2].gamma`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Task {
    FindPole,
    Echo,
    Overlaps,
    Decoherence,
    Compare,
}

impl Task {
    pub const ALL: [Task; 5] = [
        Task::FindPole,
        Task::Echo,
        Task::Overlaps,
        Task::Decoherence,
        Task::Compare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::FindPole => "find_pole",
            Task::Echo => "echo",
            Task::Overlaps => "overlaps",
            Task::Decoherence => "decoherence",
            Task::Compare => "compare",
        }
    }

    fn parse(s: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.name() == s)
    }

    fn needs_superposition(self) -> bool {
        matches!(self, Task::Overlaps | Task::Decoherence | Task::Compare)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub omega_0: f64,
    pub lambda: f64,
    /// Couplings for `find_pole`; just `[lambda]` unless a sweep is given.
    pub lambdas: Vec<f64>,
    pub form_factor: FormFactor,
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    Explicit(Vec<ResonancePole>),
    Ladder {
        z0: ResonancePole,
        n_max: usize,
    },
    /// Ladder on the pole solved from the model at its `lambda`.
    Solved {
        n_max: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Gamow(Vec<Complex64>),
    QuasiCoherent {
        alpha: Complex64,
        n_max: usize,
    },
    Superposition {
        a: Complex64,
        b: Complex64,
        alpha1: Complex64,
        alpha2: Complex64,
        n_max: usize,
    },
}

impl InitialState {
    pub fn mode_count(&self) -> usize {
        match self {
            InitialState::Gamow(c) => c.len(),
            InitialState::QuasiCoherent { n_max, .. }
            | InitialState::Superposition { n_max, .. } => n_max + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub hbar: f64,
    pub model: Option<ModelSpec>,
    pub spectrum: Option<SpectrumSource>,
    pub initial_state: Option<InitialState>,
    pub time_grid: Option<GridSpec>,
    /// Deduplicated, in execution order.
    pub tasks: Vec<Task>,
}

const SPECTRUM_SOURCES: [&str; 3] = ["explicit", "ladder", "solved"];
const STATE_KINDS: [&str; 3] = ["gamow", "quasi_coherent", "superposition"];

struct Walker {
    errors: Vec<ConfigError>,
}

impl Walker {
    fn err(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ConfigError {
            path: path.into(),
            message: message.into(),
        });
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Map<String, Value>> {
        match v.as_object() {
            Some(m) => Some(m),
            None => {
                self.err(path, "expected an object");
                None
            }
        }
    }

    fn known_keys(&mut self, m: &Map<String, Value>, path: &str, allowed: &[&str]) {
        for k in m.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(
                    join(path, k),
                    format!("unknown key (expected one of: {})", allowed.join(", ")),
                );
            }
        }
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(path, "expected a finite number");
                None
            }
        }
    }

    fn required_number(&mut self, m: &Map<String, Value>, key: &str, path: &str) -> Option<f64> {
        match m.get(key) {
            Some(v) => self.number(v, &join(path, key)),
            None => {
                self.err(join(path, key), "required");
                None
            }
        }
    }

    fn optional_count(
        &mut self,
        m: &Map<String, Value>,
        key: &str,
        path: &str,
    ) -> Option<Option<usize>> {
        match m.get(key) {
            None => Some(None),
            Some(v) => match v.as_u64() {
                Some(n) => Some(Some(n as usize)),
                None => {
                    self.err(join(path, key), "expected a nonnegative integer");
                    None
                }
            },
        }
    }

    /// A number, or `[re, im]`.
    fn complex(&mut self, v: &Value, path: &str) -> Option<Complex64> {
        if let Some(x) = v.as_f64() {
            if x.is_finite() {
                return Some(Complex64::new(x, 0.0));
            }
        }
        if let Some([re, im]) = v.as_array().map(Vec::as_slice) {
            if let (Some(re), Some(im)) = (re.as_f64(), im.as_f64()) {
                if re.is_finite() && im.is_finite() {
                    return Some(Complex64::new(re, im));
                }
            }
        }
        self.err(path, "expected a finite number or a [re, im] pair");
        None
    }

    fn required_complex(
        &mut self,
        m: &Map<String, Value>,
        key: &str,
        path: &str,
    ) -> Option<Complex64> {
        match m.get(key) {
            Some(v) => self.complex(v, &join(path, key)),
            None => {
                self.err(join(path, key), "required");
                None
            }
        }
    }

    fn numbers(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let Some(items) = v.as_array() else {
            self.err(path, "expected an array of numbers");
            return None;
        };
        let parsed: Vec<Option<f64>> = items
            .iter()
            .enumerate()
            .map(|(i, x)| self.number(x, &format!("{path}[{i}]")))
            .collect();
        parsed.into_iter().collect()
    }

    /// The single key of `m` drawn from `kinds`; every violation is recorded.
    fn exactly_one<'m>(
        &mut self,
        m: &'m Map<String, Value>,
        kinds: &[&str],
        path: &str,
        what: &str,
    ) -> Option<(&'m str, &'m Value)> {
        let present: Vec<(&str, &Value)> = m
            .iter()
            .filter(|(k, _)| kinds.contains(&k.as_str()))
            .map(|(k, v)| (k.as_str(), v))
            .collect();
        match present.as_slice() {
            [one] => Some(*one),
            [] => {
                self.err(
                    path,
                    format!("exactly one {what} required (one of: {})", kinds.join(", ")),
                );
                None
            }
            many => {
                let names: Vec<&str> = many.iter().map(|(k, _)| *k).collect();
                self.err(
                    path,
                    format!("exactly one {what} required, found: {}", names.join(", ")),
                );
                None
            }
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Parses and validates `raw`. Every structural and semantic problem found
/// is returned, not just the first.
pub fn validate_config(raw: &Value) -> Result<ScenarioConfig, Vec<ConfigError>> {
    let mut w = Walker { errors: Vec::new() };
    let Some(root) = w.object(raw, "") else {
        return Err(w.errors);
    };
    w.known_keys(
        root,
        "",
        &[
            "hbar",
            "model",
            "spectrum",
            "initial_state",
            "time_grid",
            "tasks",
        ],
    );

    let hbar = match root.get("hbar") {
        None => 1.0,
        Some(v) => match w.number(v, "hbar") {
            Some(h) if h > 0.0 => h,
            Some(h) => {
                w.err("hbar", format!("must be positive, got {h}"));
                1.0
            }
            None => 1.0,
        },
    };

    let tasks = parse_tasks(&mut w, root.get("tasks"));
    let model = root.get("model").and_then(|v| parse_model(&mut w, v));
    let initial_state = root
        .get("initial_state")
        .and_then(|v| parse_state(&mut w, v));
    let time_grid = root.get("time_grid").and_then(|v| parse_grid(&mut w, v));
    let modes = initial_state.as_ref().map(InitialState::mode_count);
    let spectrum = root
        .get("spectrum")
        .and_then(|v| parse_spectrum(&mut w, v, modes));

    // Cross-field requirements.
    let needs_spectrum = tasks.iter().any(|&t| t != Task::FindPole);
    if tasks.contains(&Task::FindPole) && root.get("model").is_none() {
        w.err("model", "required by task find_pole");
    }
    if needs_spectrum {
        if root.get("spectrum").is_none() {
            w.err(
                "spectrum",
                format!(
                    "exactly one spectrum source required (one of: {})",
                    SPECTRUM_SOURCES.join(", ")
                ),
            );
        }
        if root.get("initial_state").is_none() {
            w.err("initial_state", "required by the requested tasks");
        }
        if root.get("time_grid").is_none() {
            w.err("time_grid", "required by the requested tasks");
        }
    }
    if let Some(SpectrumSource::Solved { .. }) = spectrum {
        match (&model, root.get("model")) {
            (_, None) => w.err("spectrum.solved", "needs a model to solve"),
            (Some(m), _) if !m.form_factor.supports_continuation() => w.err(
                "spectrum.solved",
                "a tabulated form factor has no continuation to solve on",
            ),
            _ => {}
        }
    }
    if let (Some(SpectrumSource::Explicit(poles)), Some(n)) = (&spectrum, modes) {
        if poles.len() != n {
            w.err(
                "spectrum.explicit",
                format!("{} poles but the initial state has {n} modes", poles.len()),
            );
        }
    }
    if let (
        Some(SpectrumSource::Ladder { n_max, .. } | SpectrumSource::Solved { n_max }),
        Some(n),
    ) = (&spectrum, modes)
    {
        if n_max + 1 != n {
            w.err(
                "spectrum",
                format!("n_max = {n_max} but the initial state has {n} modes"),
            );
        }
    }
    let two_labels = tasks.iter().any(|t| t.needs_superposition());
    match &initial_state {
        Some(InitialState::Superposition { alpha1, alpha2, .. }) if two_labels => {
            for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
                if a.im != 0.0 {
                    w.err(
                        format!("initial_state.superposition.{name}"),
                        "overlap and decoherence tasks need a real label",
                    );
                }
            }
        }
        Some(_) if two_labels => w.err(
            "initial_state",
            "overlap, decoherence and compare tasks need a superposition",
        ),
        _ => {}
    }

    if w.errors.is_empty() {
        Ok(ScenarioConfig {
            hbar,
            model,
            spectrum,
            initial_state,
            time_grid,
            tasks,
        })
    } else {
        Err(w.errors)
    }
}

fn parse_tasks(w: &mut Walker, v: Option<&Value>) -> Vec<Task> {
    let Some(v) = v else {
        w.err("tasks", "required (use [] to run nothing)");
        return Vec::new();
    };
    let Some(items) = v.as_array() else {
        w.err("tasks", "expected an array of task names");
        return Vec::new();
    };
    let mut tasks = Vec::new();
    for (i, item) in items.iter().enumerate() {
        match item.as_str().and_then(Task::parse) {
            Some(t) => tasks.push(t),
            None => {
                let names: Vec<&str> = Task::ALL.iter().map(|t| t.name()).collect();
                w.err(
                    format!("tasks[{i}]"),
                    format!("unknown task (expected one of: {})", names.join(", ")),
                );
            }
        }
    }
    tasks.sort();
    tasks.dedup();
    tasks
}

fn parse_model(w: &mut Walker, v: &Value) -> Option<ModelSpec> {
    let m = w.object(v, "model")?;
    w.known_keys(
        m,
        "model",
        &[
            "omega_0",
            "lambda",
            "lambda_sweep",
            "form_factor",
            "tolerance",
            "max_iterations",
        ],
    );
    let omega_0 = w.required_number(m, "omega_0", "model");
    if let Some(o) = omega_0 {
        if o <= 0.0 {
            w.err("model.omega_0", format!("must be positive, got {o}"));
        }
    }
    let lambda = w.required_number(m, "lambda", "model");
    let sweep = match m.get("lambda_sweep") {
        None => Some(None),
        Some(v) => match w.numbers(v, "model.lambda_sweep") {
            Some(xs) if xs.is_empty() => {
                w.err("model.lambda_sweep", "must not be empty");
                None
            }
            Some(xs) => Some(Some(xs)),
            None => None,
        },
    };
    let tolerance = match m.get("tolerance") {
        None => Some(1e-12),
        Some(v) => match w.number(v, "model.tolerance") {
            Some(t) if t > 0.0 => Some(t),
            Some(t) => {
                w.err("model.tolerance", format!("must be positive, got {t}"));
                None
            }
            None => None,
        },
    };
    let max_iterations = w
        .optional_count(m, "max_iterations", "model")
        .map(|n| n.unwrap_or(100));
    let form_factor = match m.get("form_factor") {
        Some(v) => parse_form_factor(w, v),
        None => {
            w.err("model.form_factor", "required");
            None
        }
    };
    let (omega_0, lambda, sweep, form_factor, tolerance, max_iterations) = (
        omega_0?,
        lambda?,
        sweep?,
        form_factor?,
        tolerance?,
        max_iterations?,
    );
    Some(ModelSpec {
        omega_0,
        lambda,
        lambdas: sweep.unwrap_or_else(|| vec![lambda]),
        form_factor,
        tolerance,
        max_iterations,
    })
}

fn parse_form_factor(w: &mut Walker, v: &Value) -> Option<FormFactor> {
    let path = "model.form_factor";
    let m = w.object(v, path)?;
    let kind = match m.get("kind").and_then(Value::as_str) {
        Some(k) => k,
        None => {
            w.err(
                join(path, "kind"),
                "required: one of rational, gaussian, tabulated",
            );
            return None;
        }
    };
    let built = match kind {
        "rational" | "gaussian" => {
            w.known_keys(m, path, &["kind", "scale"]);
            let scale = w.required_number(m, "scale", path)?;
            if kind == "rational" {
                FormFactor::rational(scale)
            } else {
                FormFactor::gaussian(scale)
            }
        }
        "tabulated" => {
            w.known_keys(m, path, &["kind", "nodes", "values"]);
            let nodes = m
                .get("nodes")
                .and_then(|v| w.numbers(v, &join(path, "nodes")));
            let values = m
                .get("values")
                .and_then(|v| w.numbers(v, &join(path, "values")));
            for key in ["nodes", "values"] {
                if !m.contains_key(key) {
                    w.err(join(path, key), "required");
                }
            }
            FormFactor::tabulated(nodes?, values?)
        }
        other => {
            w.err(join(path, "kind"), format!("unknown form factor {other:?}"));
            return None;
        }
    };
    built.map_err(|e| w.err(path, e.to_string())).ok()
}

fn parse_spectrum(w: &mut Walker, v: &Value, modes: Option<usize>) -> Option<SpectrumSource> {
    let m = w.object(v, "spectrum")?;
    w.known_keys(m, "spectrum", &SPECTRUM_SOURCES);
    let (kind, body) = w.exactly_one(m, &SPECTRUM_SOURCES, "spectrum", "spectrum source")?;
    let path = format!("spectrum.{kind}");
    let default_n = modes.map(|n| n.saturating_sub(1));
    let ladder_n = |w: &mut Walker, n: Option<usize>| -> Option<usize> {
        match n.or(default_n) {
            Some(0) => {
                w.err(format!("{path}.n_max"), "a ladder needs n_max >= 1");
                None
            }
            Some(n) => Some(n),
            None => {
                w.err(
                    format!("{path}.n_max"),
                    "required when there is no initial state to size it",
                );
                None
            }
        }
    };
    match kind {
        "explicit" => {
            let Some(items) = body.as_array() else {
                w.err(&path, "expected an array of {e_r, gamma} objects");
                return None;
            };
            if items.is_empty() {
                w.err(&path, "must list at least one pole");
                return None;
            }
            let mut poles = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let p = format!("{path}[{i}]");
                let Some(obj) = w.object(item, &p) else {
                    continue;
                };
                w.known_keys(obj, &p, &["e_r", "gamma"]);
                let e = w.required_number(obj, "e_r", &p);
                let g = w.required_number(obj, "gamma", &p);
                if let Some(g) = g {
                    if g < 0.0 {
                        w.err(
                            format!("{p}.gamma"),
                            format!("pole {i} has negative width {g}"),
                        );
                        continue;
                    }
                }
                if let (Some(e), Some(g)) = (e, g) {
                    poles.push(ResonancePole::new(e, g).expect("checked above"));
                }
            }
            (poles.len() == items.len()).then_some(SpectrumSource::Explicit(poles))
        }
        "ladder" => {
            let obj = w.object(body, &path)?;
            w.known_keys(obj, &path, &["e_r", "gamma", "n_max"]);
            let e = w.required_number(obj, "e_r", &path);
            let g = w.required_number(obj, "gamma", &path);
            let n = w.optional_count(obj, "n_max", &path);
            if let Some(g) = g {
                if g < 0.0 {
                    w.err(format!("{path}.gamma"), format!("negative width {g}"));
                    return None;
                }
            }
            let n = ladder_n(w, n?)?;
            Some(SpectrumSource::Ladder {
                z0: ResonancePole::new(e?, g?).ok()?,
                n_max: n,
            })
        }
        _ => {
            let obj = w.object(body, &path)?;
            w.known_keys(obj, &path, &["n_max"]);
            let n = w.optional_count(obj, "n_max", &path)?;
            Some(SpectrumSource::Solved {
                n_max: ladder_n(w, n)?,
            })
        }
    }
}

fn parse_state(w: &mut Walker, v: &Value) -> Option<InitialState> {
    let m = w.object(v, "initial_state")?;
    w.known_keys(m, "initial_state", &STATE_KINDS);
    let (kind, body) = w.exactly_one(m, &STATE_KINDS, "initial_state", "initial state kind")?;
    let path = format!("initial_state.{kind}");
    let obj = w.object(body, &path)?;
    match kind {
        "gamow" => {
            w.known_keys(obj, &path, &["coefficients"]);
            let Some(items) = obj.get("coefficients").and_then(Value::as_array) else {
                w.err(
                    format!("{path}.coefficients"),
                    "required: an array of numbers or [re, im] pairs",
                );
                return None;
            };
            if items.is_empty() {
                w.err(format!("{path}.coefficients"), "must not be empty");
                return None;
            }
            let parsed: Vec<Option<Complex64>> = items
                .iter()
                .enumerate()
                .map(|(i, x)| w.complex(x, &format!("{path}.coefficients[{i}]")))
                .collect();
            let coefficients: Vec<Complex64> = parsed.into_iter().collect::<Option<_>>()?;
            if coefficients.iter().all(|c| c.norm() == 0.0) {
                w.err(
                    format!("{path}.coefficients"),
                    "the zero vector is not a state",
                );
                return None;
            }
            Some(InitialState::Gamow(coefficients))
        }
        "quasi_coherent" => {
            w.known_keys(obj, &path, &["alpha", "n_max"]);
            let alpha = w.required_complex(obj, "alpha", &path);
            let n = w.optional_count(obj, "n_max", &path);
            let alpha = alpha?;
            Some(InitialState::QuasiCoherent {
                alpha,
                n_max: n?.unwrap_or_else(|| default_truncation(alpha)),
            })
        }
        _ => {
            w.known_keys(obj, &path, &["a", "b", "alpha1", "alpha2", "n_max"]);
            let a = w.required_complex(obj, "a", &path);
            let b = w.required_complex(obj, "b", &path);
            let alpha1 = w.required_complex(obj, "alpha1", &path);
            let alpha2 = w.required_complex(obj, "alpha2", &path);
            let n = w.optional_count(obj, "n_max", &path);
            let (a, b, alpha1, alpha2, n) = (a?, b?, alpha1?, alpha2?, n?);
            if a.norm() == 0.0 && b.norm() == 0.0 {
                w.err(&path, "a and b cannot both vanish");
                return None;
            }
            Some(InitialState::Superposition {
                a,
                b,
                alpha1,
                alpha2,
                n_max: n
                    .unwrap_or_else(|| default_truncation(alpha1).max(default_truncation(alpha2))),
            })
        }
    }
}

fn parse_grid(w: &mut Walker, v: &Value) -> Option<GridSpec> {
    let path = "time_grid";
    let m = w.object(v, path)?;
    w.known_keys(m, path, &["t_start", "t_end", "samples"]);
    let start = w.required_number(m, "t_start", path);
    let end = w.required_number(m, "t_end", path);
    let samples = match m.get("samples").map(Value::as_u64) {
        Some(Some(n)) if n >= 2 => Some(n as usize),
        Some(_) => {
            w.err("time_grid.samples", "must be an integer >= 2");
            None
        }
        None => {
            w.err("time_grid.samples", "required");
            None
        }
    };
    if let Some(s) = start {
        if s < 0.0 {
            w.err("time_grid.t_start", format!("must be nonnegative, got {s}"));
            return None;
        }
    }
    if let (Some(s), Some(e)) = (start, end) {
        if e <= s {
            w.err(
                "time_grid.t_end",
                format!("must exceed t_start ({e} <= {s})"),
            );
            return None;
        }
    }
    Some(GridSpec {
        t_start: start?,
        t_end: end?,
        samples: samples?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn errors(v: Value) -> Vec<ConfigError> {
        validate_config(&v).unwrap_err()
    }

    fn echo_config() -> Value {
        json!({
            "spectrum": {"ladder": {"e_r": 1.0, "gamma": 0.2}},
            "initial_state": {"quasi_coherent": {"alpha": 2.0, "n_max": 40}},
            "time_grid": {"t_start": 0.0, "t_end": 5.0, "samples": 11},
            "tasks": ["echo"]
        })
    }

    #[test]
    fn minimal_echo_config() {
        let cfg = validate_config(&echo_config()).unwrap();
        assert_eq!(cfg.hbar, 1.0);
        assert_eq!(cfg.tasks, vec![Task::Echo]);
        assert!(matches!(
            cfg.spectrum,
            Some(SpectrumSource::Ladder { n_max: 40, .. })
        ));
    }

    #[test]
    fn empty_task_list_is_valid() {
        let cfg = validate_config(&json!({"tasks": []})).unwrap();
        assert!(cfg.tasks.is_empty());
    }

    #[test]
    fn missing_spectrum_source() {
        let mut v = echo_config();
        v.as_object_mut().unwrap().remove("spectrum");
        let e = errors(v);
        assert!(e.iter().any(|e| e.path == "spectrum"
            && e.message
                .starts_with("exactly one spectrum source required")));
        let e = errors(json!({"spectrum": {}, "tasks": []}));
        assert!(e[0]
            .message
            .starts_with("exactly one spectrum source required"));
    }

    #[test]
    fn two_spectrum_sources_are_listed() {
        let mut v = echo_config();
        v["spectrum"]["solved"] = json!({});
        let e = errors(v);
        let msg = &e.iter().find(|e| e.path == "spectrum").unwrap().message;
        assert!(msg.contains("ladder") && msg.contains("solved"), "{msg}");
    }

    #[test]
    fn negative_width_names_the_index() {
        let mut v = echo_config();
        v["spectrum"] =
            json!({"explicit": [{"e_r": 0.0, "gamma": 0.0}, {"e_r": 1.0, "gamma": -0.1}]});
        v["initial_state"] = json!({"gamow": {"coefficients": [1.0, 0.0]}});
        let e = errors(v);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].path, "spectrum.explicit[1].gamma");
        assert!(e[0].message.contains("pole 1"));
    }

    #[test]
    fn all_errors_reported_together() {
        let e = errors(json!({
            "hbar": -1.0,
            "spectrum": {"ladder": {"e_r": 1.0, "gamma": 0.2, "n_max": 3}},
            "initial_state": {"quasi_coherent": {"alpha": 2.0, "n_max": 5}},
            "time_grid": {"t_start": -1.0, "t_end": 5.0, "samples": 1},
            "tasks": ["echo", "plot"],
            "colour": "blue"
        }));
        let paths: Vec<&str> = e.iter().map(|e| e.path.as_str()).collect();
        for want in [
            "hbar",
            "time_grid.samples",
            "time_grid.t_start",
            "tasks[1]",
            "colour",
            "spectrum",
        ] {
            assert!(paths.contains(&want), "{want} missing from {paths:?}");
        }
    }

    #[test]
    fn non_integrable_form_factor_rejected() {
        let e = errors(json!({
            "model": {"omega_0": 1.0, "lambda": 0.1, "form_factor": {"kind": "rational", "scale": -1.0}},
            "tasks": ["find_pole"]
        }));
        assert_eq!(e[0].path, "model.form_factor");
    }

    #[test]
    fn find_pole_needs_model() {
        let e = errors(json!({"tasks": ["find_pole"]}));
        assert_eq!(e[0].path, "model");
    }

    #[test]
    fn decoherence_needs_real_superposition() {
        let mut v = echo_config();
        v["tasks"] = json!(["decoherence"]);
        assert!(errors(v.clone())
            .iter()
            .any(|e| e.message.contains("superposition")));
        v["initial_state"] = json!({"superposition": {"a": 1.0, "b": [0.0, 1.0], "alpha1": 0.0, "alpha2": [3.0, 1.0], "n_max": 40}});
        let e = errors(v);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].path, "initial_state.superposition.alpha2");
    }

    #[test]
    fn tasks_are_deduplicated_and_ordered() {
        let mut v = echo_config();
        v["tasks"] = json!(["echo", "echo"]);
        assert_eq!(validate_config(&v).unwrap().tasks, vec![Task::Echo]);
    }
}
