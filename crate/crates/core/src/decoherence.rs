//! Off-diagonal density-matrix elements of `a|alpha_1> + b|alpha_2>` in the
//! frozen preferred basis `{|alpha_1(0)>, |alpha_2(0)>}`, their decay times,
//! and the comparison with the Loschmidt echo driven by the same poles.

use num_complex::Complex64;

use crate::coherent::{macroscopicity_check, overlap_exact, time_overlap, QuasiCoherentState};
use crate::dynamics::echo_curve;
use crate::error::{Error, Result};
use crate::types::{validate_grid, GamowSpectrum, GamowState, Hbar, ResonancePole, TimeSeries};

/// Below this overlap the preferred-basis projection is trusted.
pub const MACROSCOPICITY_THRESHOLD: f64 = 1e-3;

pub const SUPERPOSITION_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    a: Complex64,
    b: Complex64,
    s1: QuasiCoherentState,
    s2: QuasiCoherentState,
}

impl Superposition {
    pub fn new(
        a: Complex64,
        b: Complex64,
        s1: QuasiCoherentState,
        s2: QuasiCoherentState,
    ) -> Result<Self> {
        if s1.n_max() != s2.n_max() {
            return Err(Error::DimensionMismatch {
                expected: s1.n_max() + 1,
                found: s2.n_max() + 1,
            });
        }
        if ![a.re, a.im, b.re, b.im].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("weights", "a and b must be finite"));
        }
        Ok(Superposition { a, b, s1, s2 })
    }

    /// Rescales `a` and `b` by a common real factor so that the state has unit norm.
    pub fn normalized(
        a: Complex64,
        b: Complex64,
        s1: QuasiCoherentState,
        s2: QuasiCoherentState,
    ) -> Result<Self> {
        let raw = Self::new(a, b, s1, s2)?;
        let n = raw.norm_sq()?;
        if n <= 0.0 || n.is_nan() {
            return Err(Error::invalid("weights", "superposition has zero norm"));
        }
        let k = n.sqrt();
        Ok(Superposition {
            a: raw.a / k,
            b: raw.b / k,
            ..raw
        })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn s1(&self) -> &QuasiCoherentState {
        &self.s1
    }

    pub fn s2(&self) -> &QuasiCoherentState {
        &self.s2
    }

    /// `|a|^2 + |b|^2 + 2 Re(a^* b <alpha_1|alpha_2>)`
    pub fn norm_sq(&self) -> Result<f64> {
        let o = overlap_exact(&self.s1, &self.s2)?;
        Ok(self.a.norm_sqr() + self.b.norm_sqr() + 2.0 * (self.a.conj() * self.b * o).re)
    }

    pub fn is_normalized(&self) -> bool {
        self.norm_sq()
            .map(|n| (n - 1.0).abs() <= SUPERPOSITION_NORM_TOL)
            .unwrap_or(false)
    }

    /// The superposition as a single coefficient vector.
    pub fn state(&self) -> GamowState {
        let coefficients = self
            .s1
            .state()
            .coefficients()
            .iter()
            .zip(self.s2.state().coefficients())
            .map(|(x, y)| self.a * x + self.b * y)
            .collect();
        GamowState::from_raw(coefficients)
    }
}

/// Which expression generates the off-diagonal elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffDiagonalForm {
    /// Both terms of `rho_12 = a b^* <1|1(t)><2(t)|2> + a^* b <1|2(t)><1(t)|2>`.
    Exact,
    /// `a b^* n_2^2 sum_n |alpha_2|^{2n}/n! exp(-i z_n t / hbar)`, valid for `alpha_1 = 0`.
    FullSum,
    /// `a b^* n_2^2 exp(-i z_1 t / hbar)`: only the fundamental pole, `alpha_1 = 0`.
    SinglePole,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffDiagonalTrace {
    pub form: OffDiagonalForm,
    pub rho12: TimeSeries,
    pub rho21: TimeSeries,
    /// `t -> inf` limit of `rho_12`, from the stationary (`z_n = 0`) modes.
    pub asymptote_12: Complex64,
    /// At the default 1/e drop; `+inf` if the trace never decays.
    pub decoherence_time: f64,
    /// Whether any mode contributing to the trace has a nonzero width.
    pub decaying: bool,
    /// Whether the preferred basis passed the macroscopicity check.
    pub macroscopic: bool,
    /// `Gamma_n` of the spectrum that generated the trace.
    pub widths: Vec<f64>,
    /// Poisson weights `|c_n|^2` of `|alpha_2>`.
    pub weights: Vec<f64>,
}

/// Exact off-diagonal elements over `grid`.
pub fn off_diagonal(
    sup: &Superposition,
    spectrum: &GamowSpectrum,
    grid: &[f64],
    hbar: Hbar,
) -> Result<OffDiagonalTrace> {
    off_diagonal_with(sup, spectrum, grid, hbar, OffDiagonalForm::Exact)
}

pub fn off_diagonal_with(
    sup: &Superposition,
    spectrum: &GamowSpectrum,
    grid: &[f64],
    hbar: Hbar,
    form: OffDiagonalForm,
) -> Result<OffDiagonalTrace> {
    validate_grid(grid)?;
    if grid[0] < 0.0 {
        return Err(Error::InvalidGrid(format!(
            "times must be nonnegative, got {}",
            grid[0]
        )));
    }
    for s in [&sup.s1, &sup.s2] {
        if !s.is_real() {
            return Err(Error::NonRealLabel { alpha: s.alpha() });
        }
    }
    spectrum.check_modes(sup.s1.n_max() + 1)?;
    if form != OffDiagonalForm::Exact && sup.s1.alpha() != Complex64::new(0.0, 0.0) {
        return Err(Error::invalid(
            "alpha_1",
            "the full-sum and single-pole forms assume alpha_1 = 0",
        ));
    }
    if form == OffDiagonalForm::SinglePole && spectrum.mode_count() < 2 {
        return Err(Error::invalid(
            "spectrum",
            "single-pole form needs a mode z_1",
        ));
    }

    let macro_check =
        macroscopicity_check(sup.s1.alpha(), sup.s2.alpha(), MACROSCOPICITY_THRESHOLD)?;
    if !macro_check.quasi_orthogonal {
        log::warn!(
            "preferred basis is not quasi-orthogonal (|overlap| = {:.3e}); the projection onto it is approximate",
            macro_check.overlap_magnitude
        );
    }

    let (a, b) = (sup.a, sup.b);
    let ab = a * b.conj();
    let n2_sq = (2.0 * sup.s2.ln_normalizer()).exp();
    let mut rho12 = Vec::with_capacity(grid.len());
    for &t in grid {
        let value = match form {
            OffDiagonalForm::Exact => {
                let a11 = time_overlap(&sup.s1, &sup.s1, spectrum, t, hbar)?;
                let a22 = time_overlap(&sup.s2, &sup.s2, spectrum, t, hbar)?;
                let a12 = time_overlap(&sup.s1, &sup.s2, spectrum, t, hbar)?;
                let a21 = time_overlap(&sup.s2, &sup.s1, spectrum, t, hbar)?;
                ab * a11 * a22.conj() + a.conj() * b * a12 * a21.conj()
            }
            OffDiagonalForm::FullSum => ab * time_overlap(&sup.s2, &sup.s2, spectrum, t, hbar)?,
            OffDiagonalForm::SinglePole => {
                let z1 = spectrum.poles()[1];
                ab * n2_sq * phase(z1, t / hbar.get())
            }
        };
        rho12.push(value);
    }
    let rho21: Vec<Complex64> = rho12.iter().map(|v| v.conj()).collect();

    let c1 = sup.s1.state().coefficients();
    let c2 = sup.s2.state().coefficients();
    let poles = spectrum.poles();
    let stationary = |p: &ResonancePole| p.gamma() == 0.0 && p.e_r() == 0.0;
    let limit = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
        x.iter()
            .zip(y)
            .zip(poles)
            .filter(|(_, p)| stationary(p))
            .map(|((u, v), _)| u.conj() * v)
            .sum()
    };
    let asymptote_12 = match form {
        OffDiagonalForm::Exact => {
            ab * limit(c1, c1) * limit(c2, c2).conj()
                + a.conj() * b * limit(c1, c2) * limit(c2, c1).conj()
        }
        OffDiagonalForm::FullSum => ab * limit(c2, c2),
        OffDiagonalForm::SinglePole if stationary(&poles[1]) => ab * n2_sq,
        OffDiagonalForm::SinglePole => Complex64::new(0.0, 0.0),
    };
    let active = |n: usize| c1[n].norm() > 0.0 || c2[n].norm() > 0.0;
    let decaying = match form {
        OffDiagonalForm::SinglePole => poles[1].gamma() > 0.0,
        _ => poles
            .iter()
            .enumerate()
            .any(|(n, p)| p.gamma() > 0.0 && active(n)),
    };

    let mut trace = OffDiagonalTrace {
        form,
        rho12: TimeSeries::new(grid.to_vec(), rho12)?,
        rho21: TimeSeries::new(grid.to_vec(), rho21)?,
        asymptote_12,
        decoherence_time: f64::INFINITY,
        decaying,
        macroscopic: macro_check.quasi_orthogonal,
        widths: spectrum.widths(),
        weights: c2.iter().map(|c| c.norm_sqr()).collect(),
    };
    trace.decoherence_time = decoherence_time(&trace, DEFAULT_DROP).unwrap_or(f64::INFINITY);
    Ok(trace)
}

fn phase(pole: ResonancePole, s: f64) -> Complex64 {
    let decay = 0.5 * pole.gamma() * s;
    if decay > crate::dynamics::UNDERFLOW_EXPONENT {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar((-decay).exp(), -pole.e_r() * s)
}

pub const DEFAULT_DROP: f64 = 0.367_879_441_171_442_3;

/// First time at which `|rho_12(t) - asymptote|` falls to `drop` times its
/// initial value, linearly interpolated between samples. `+inf` if the
/// trace has no decaying component or never crosses.
pub fn decoherence_time(trace: &OffDiagonalTrace, drop: f64) -> Result<f64> {
    if !(drop > 0.0 && drop < 1.0) {
        return Err(Error::invalid("drop", format!("{drop} must lie in (0, 1)")));
    }
    if trace.rho12.is_empty() {
        return Err(Error::InvalidGrid("trace is empty".into()));
    }
    if !trace.decaying {
        return Ok(f64::INFINITY);
    }
    let asym = trace.asymptote_12;
    let dist: Vec<f64> = trace
        .rho12
        .values()
        .iter()
        .map(|v| (v - asym).norm())
        .collect();
    if dist.iter().all(|&d| d == dist[0]) {
        return Err(Error::DegenerateTrace);
    }
    if trace.rho12.values()[0].norm() <= asym.norm() {
        return Err(Error::invalid(
            "trace",
            "initial off-diagonal magnitude does not exceed its asymptote",
        ));
    }
    let target = drop * dist[0];
    let times = trace.rho12.times();
    for i in 1..dist.len() {
        if dist[i] <= target {
            let (d0, d1) = (dist[i - 1], dist[i]);
            let frac = if d0 == d1 {
                1.0
            } else {
                (d0 - target) / (d0 - d1)
            };
            return Ok(times[i - 1] + frac * (times[i] - times[i - 1]));
        }
    }
    Ok(f64::INFINITY)
}

/// Initial logarithmic decay rate of the echo,
/// `-d/dtau ln L(tau)|_0 = sum_n |a_n|^2 Gamma_n / (hbar sum_n |a_n|^2)`.
pub fn echo_rate(state: &GamowState, spectrum: &GamowSpectrum, hbar: Hbar) -> Result<f64> {
    spectrum.check_modes(state.mode_count())?;
    let norm = state.norm_sq();
    if norm == 0.0 {
        return Err(Error::invalid("state", "zero state has no echo"));
    }
    if !state.is_normalized() {
        log::warn!("echo rate of a state with coefficient norm {norm} (expected 1)");
    }
    let weighted: f64 = state
        .coefficients()
        .iter()
        .zip(spectrum.poles())
        .map(|(a, p)| a.norm_sqr() * p.gamma())
        .sum();
    Ok(weighted / (norm * hbar.get()))
}

/// Least-squares slope of `-ln|v(t) - asymptote|`. Samples that have
/// underflowed to the asymptote are skipped.
pub fn fit_exponential_rate(series: &TimeSeries, asymptote: Complex64) -> Result<f64> {
    let points: Vec<(f64, f64)> = series
        .iter()
        .filter_map(|(t, v)| {
            let d = (v - asymptote).norm();
            (d > 0.0 && d.is_finite()).then(|| (t, d.ln()))
        })
        .collect();
    if points.len() < 2 {
        return Err(Error::invalid(
            "series",
            "need two samples away from the asymptote",
        ));
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points
        .iter()
        .map(|(t, y)| (t - mean_t) * (y - mean_y))
        .sum();
    let sxx: f64 = points
        .iter()
        .map(|(t, _)| (t - mean_t) * (t - mean_t))
        .sum();
    Ok(-sxy / sxx)
}

/// Echo and decoherence generated from one pole list.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeComparison {
    pub poles: Vec<ResonancePole>,
    /// `Gamma_n / hbar`
    pub echo_rates: Vec<f64>,
    pub echo_initial_rate: f64,
    /// Echo amplitude of `|alpha_2>` over the grid.
    pub echo_curve: TimeSeries,
    /// `|c_n|^2` of `|alpha_2>` as used by the echo.
    pub echo_weights: Vec<f64>,
    pub echo_widths: Vec<f64>,
    pub decoherence: OffDiagonalTrace,
    pub decoherence_time: f64,
    /// The echo and the trace were generated from identical widths and weights.
    pub shared_parameters: bool,
}

pub fn compare_times(
    sup: &Superposition,
    spectrum: &GamowSpectrum,
    grid: &[f64],
    hbar: Hbar,
) -> Result<TimeComparison> {
    let decoherence = off_diagonal(sup, spectrum, grid, hbar)?;
    let probe = sup.s2.state();
    let echo = echo_curve(probe, spectrum, grid, hbar)?;
    let echo_weights: Vec<f64> = probe.coefficients().iter().map(|c| c.norm_sqr()).collect();
    let echo_widths = spectrum.widths();
    let shared_parameters =
        echo_widths == decoherence.widths && echo_weights == decoherence.weights;
    Ok(TimeComparison {
        poles: spectrum.poles().to_vec(),
        echo_rates: echo_widths.iter().map(|g| g / hbar.get()).collect(),
        echo_initial_rate: echo_rate(probe, spectrum, hbar)?,
        echo_curve: echo,
        echo_weights,
        echo_widths,
        decoherence_time: decoherence.decoherence_time,
        decoherence,
        shared_parameters,
    })
}
