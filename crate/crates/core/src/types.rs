//! Shared vocabulary: poles, spectra, states in the decaying Gamow basis, and
//! the pairing between growing bras and decaying kets.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::form_factor::FormFactor;

/// Tolerance for the `normalized` flag on coefficient vectors.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Reduced Planck constant in the caller's units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Hbar(f64);

impl Hbar {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::invalid(
                "hbar",
                format!("{value} must be finite and positive"),
            ));
        }
        Ok(Hbar(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Hbar {
    fn default() -> Self {
        Hbar(1.0)
    }
}

/// A decaying resonance `z = e_r - i gamma / 2`. The growing partner `z*` is
/// always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePole {
    e_r: f64,
    gamma: f64,
}

impl ResonancePole {
    pub fn new(e_r: f64, gamma: f64) -> Result<Self> {
        if !e_r.is_finite() {
            return Err(Error::invalid(
                "pole energy",
                format!("{e_r} is not finite"),
            ));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::invalid(
                "pole width",
                format!("{gamma} must be finite and >= 0"),
            ));
        }
        Ok(ResonancePole { e_r, gamma })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        if z.im > 0.0 {
            return Err(Error::invalid(
                "pole",
                format!("{z} lies in the upper half-plane; decaying poles have Im z <= 0"),
            ));
        }
        Self::new(z.re, -2.0 * z.im)
    }

    pub fn e_r(&self) -> f64 {
        self.e_r
    }

    /// Full width.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.e_r, -0.5 * self.gamma)
    }

    pub fn conj_z(&self) -> Complex64 {
        self.z().conj()
    }
}

/// Single-level Friedrichs model: `H = H0 + lambda V`, with the discrete
/// level at `omega_0` embedded in the continuum `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FriedrichsModel {
    omega_0: f64,
    lambda: f64,
    form_factor: FormFactor,
}

impl FriedrichsModel {
    pub fn new(omega_0: f64, lambda: f64, form_factor: FormFactor) -> Result<Self> {
        if !(omega_0.is_finite() && omega_0 > 0.0) {
            return Err(Error::invalid(
                "omega_0",
                format!("{omega_0} must be positive (embedded in the continuum)"),
            ));
        }
        if !lambda.is_finite() {
            return Err(Error::invalid("lambda", format!("{lambda} is not finite")));
        }
        Ok(FriedrichsModel {
            omega_0,
            lambda,
            form_factor,
        })
    }

    pub fn omega_0(&self) -> f64 {
        self.omega_0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn form_factor(&self) -> &FormFactor {
        &self.form_factor
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.omega_0, lambda, self.form_factor.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Solved,
    Ladder,
    UserSupplied,
}

/// Ordered pole list `z_0, ..., z_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GamowSpectrum {
    poles: Vec<ResonancePole>,
    provenance: Provenance,
}

impl GamowSpectrum {
    pub fn user_supplied(poles: Vec<ResonancePole>) -> Result<Self> {
        Self::checked(poles, Provenance::UserSupplied)
    }

    pub fn solved(poles: Vec<ResonancePole>) -> Result<Self> {
        Self::checked(poles, Provenance::Solved)
    }

    fn checked(poles: Vec<ResonancePole>, provenance: Provenance) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::invalid("spectrum", "needs at least one pole"));
        }
        Ok(GamowSpectrum { poles, provenance })
    }

    pub fn poles(&self) -> &[ResonancePole] {
        &self.poles
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn mode_count(&self) -> usize {
        self.poles.len()
    }

    /// `Gamma_n` for every mode.
    pub fn widths(&self) -> Vec<f64> {
        self.poles.iter().map(ResonancePole::gamma).collect()
    }

    pub(crate) fn check_modes(&self, found: usize) -> Result<()> {
        if found != self.poles.len() {
            return Err(Error::DimensionMismatch {
                expected: self.poles.len(),
                found,
            });
        }
        Ok(())
    }
}

/// `z_n = n z0` for `n = 0..=n_max`.
pub fn ladder_spectrum(z0: ResonancePole, n_max: usize) -> Result<GamowSpectrum> {
    if n_max == 0 {
        return Err(Error::invalid(
            "n_max",
            "a ladder needs at least one excited mode",
        ));
    }
    let poles = (0..=n_max)
        .map(|n| {
            let n = n as f64;
            ResonancePole {
                e_r: n * z0.e_r,
                gamma: n * z0.gamma,
            }
        })
        .collect();
    Ok(GamowSpectrum {
        poles,
        provenance: Provenance::Ladder,
    })
}

/// Coefficients `a_n` of `|psi> = sum_n a_n |f_n^D>`. The matching bra is
/// `<psi| = sum_n a_n^* <f_n^G|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GamowState {
    coefficients: Vec<Complex64>,
}

impl GamowState {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid("state", "needs at least one mode"));
        }
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::invalid("state", "coefficients must be finite"));
        }
        Ok(GamowState { coefficients })
    }

    /// Basis vector `e_k` over `modes` modes.
    pub fn unit(modes: usize, k: usize) -> Result<Self> {
        if k >= modes {
            return Err(Error::invalid(
                "mode index",
                format!("{k} out of range for {modes} modes"),
            ));
        }
        let mut c = vec![Complex64::new(0.0, 0.0); modes];
        c[k] = Complex64::new(1.0, 0.0);
        Ok(GamowState { coefficients: c })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn mode_count(&self) -> usize {
        self.coefficients.len()
    }

    /// `sum_n |a_n|^2`
    pub fn norm_sq(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if n == 0.0 {
            return Err(Error::invalid("state", "cannot normalize the zero vector"));
        }
        Ok(GamowState {
            coefficients: self.coefficients.iter().map(|c| c / n).collect(),
        })
    }

    pub(crate) fn from_raw(coefficients: Vec<Complex64>) -> Self {
        GamowState { coefficients }
    }
}

/// `sum_n conj(a_n) b_n`, from `<f_s^G | f_k^D> = delta_{s,k}`.
pub fn pseudometric_pair(bra: &GamowState, ket: &GamowState) -> Result<Complex64> {
    if bra.mode_count() != ket.mode_count() {
        return Err(Error::DimensionMismatch {
            expected: bra.mode_count(),
            found: ket.mode_count(),
        });
    }
    Ok(bra
        .coefficients
        .iter()
        .zip(&ket.coefficients)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Complex samples on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<Complex64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        validate_grid(&times)?;
        if times.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(TimeSeries { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// Nonempty, finite, strictly increasing.
pub fn validate_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("grid contains non-finite times".into()));
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "grid is not strictly increasing at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// `samples` evenly spaced points from `start` to `end` inclusive.
pub fn linear_grid(start: f64, end: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::InvalidGrid("need at least two samples".into()));
    }
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(Error::InvalidGrid(format!("bad range [{start}, {end}]")));
    }
    let step = (end - start) / (samples - 1) as f64;
    let mut grid: Vec<f64> = (0..samples).map(|i| start + step * i as f64).collect();
    grid[samples - 1] = end;
    Ok(grid)
}
