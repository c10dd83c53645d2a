//! Non-unitary evolution in the decaying Gamow basis and the Loschmidt echo.
//!
//! Forward evolution multiplies mode `n` by `exp(-i tau z_n / hbar)`. The
//! backward step is generated by the field-reversed Hamiltonian, whose poles
//! are `-z_n^*`, so it multiplies by `exp(+i tau z_n^* / hbar)`. Both factors
//! decay; their product is `exp(-tau Gamma_n / hbar)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{validate_grid, GamowSpectrum, GamowState, Hbar, ResonancePole, TimeSeries};

/// Decay exponents above this evaluate to an exact zero.
pub const UNDERFLOW_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Diagonal evolution over a fixed duration.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionOperator<'a> {
    direction: Direction,
    spectrum: &'a GamowSpectrum,
    duration: f64,
    hbar: Hbar,
}

impl<'a> EvolutionOperator<'a> {
    pub fn new(
        direction: Direction,
        spectrum: &'a GamowSpectrum,
        duration: f64,
        hbar: Hbar,
    ) -> Result<Self> {
        check_time(duration)?;
        Ok(EvolutionOperator {
            direction,
            spectrum,
            duration,
            hbar,
        })
    }

    pub fn forward(spectrum: &'a GamowSpectrum, duration: f64, hbar: Hbar) -> Result<Self> {
        Self::new(Direction::Forward, spectrum, duration, hbar)
    }

    pub fn backward(spectrum: &'a GamowSpectrum, duration: f64, hbar: Hbar) -> Result<Self> {
        Self::new(Direction::Backward, spectrum, duration, hbar)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn spectrum(&self) -> &GamowSpectrum {
        self.spectrum
    }

    /// Eigenvalue of the operator on mode `n`.
    pub fn factor(&self, pole: &ResonancePole) -> Complex64 {
        let t = self.duration / self.hbar.get();
        match self.direction {
            Direction::Forward => decaying_phase(pole.e_r(), pole.gamma(), t),
            Direction::Backward => decaying_phase(-pole.e_r(), pole.gamma(), t),
        }
    }

    pub fn apply(&self, state: &GamowState) -> Result<GamowState> {
        self.spectrum.check_modes(state.mode_count())?;
        let coefficients = state
            .coefficients()
            .iter()
            .zip(self.spectrum.poles())
            .map(|(a, p)| a * self.factor(p))
            .collect();
        Ok(GamowState::from_raw(coefficients))
    }
}

/// `exp(-i e t) * exp(-gamma t / 2)` with the underflow guard.
fn decaying_phase(e: f64, gamma: f64, t: f64) -> Complex64 {
    let decay = 0.5 * gamma * t;
    if decay > UNDERFLOW_EXPONENT {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar((-decay).exp(), -e * t)
}

fn decay_factor(rate_times_t: f64) -> f64 {
    if rate_times_t > UNDERFLOW_EXPONENT {
        0.0
    } else {
        (-rate_times_t).exp()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeDuration(t));
    }
    if !t.is_finite() {
        return Err(Error::invalid("duration", "must be finite"));
    }
    Ok(())
}

/// Applies `op` coefficient-wise. The result is never renormalized.
pub fn evolve(op: &EvolutionOperator<'_>, state: &GamowState) -> Result<GamowState> {
    op.apply(state)
}

/// `A(t) = sum_n conj(a_n) b_n exp(-i E_n t / hbar) exp(-Gamma_n t / (2 hbar))`.
pub fn survival_amplitude(
    bra: &GamowState,
    ket: &GamowState,
    spectrum: &GamowSpectrum,
    t: f64,
    hbar: Hbar,
) -> Result<Complex64> {
    check_time(t)?;
    spectrum.check_modes(bra.mode_count())?;
    spectrum.check_modes(ket.mode_count())?;
    let s = t / hbar.get();
    Ok(bra
        .coefficients()
        .iter()
        .zip(ket.coefficients())
        .zip(spectrum.poles())
        .map(|((a, b), p)| a.conj() * b * decaying_phase(p.e_r(), p.gamma(), s))
        .sum())
}

/// Echo amplitude `L`, its modulus squared `M`, and the per-mode terms
/// `exp(-tau Gamma_n / hbar) |a_n|^2` that sum to `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoResult {
    pub amplitude: Complex64,
    pub probability: f64,
    pub per_mode_contributions: Vec<f64>,
}

/// `<psi| U_2(tau) U_1(tau) |psi> = sum_n exp(-tau Gamma_n / hbar) |a_n|^2`.
pub fn echo(
    state: &GamowState,
    spectrum: &GamowSpectrum,
    tau: f64,
    hbar: Hbar,
) -> Result<EchoResult> {
    check_time(tau)?;
    spectrum.check_modes(state.mode_count())?;
    if !state.is_normalized() {
        log::warn!(
            "echo of a state with coefficient norm {} (expected 1)",
            state.norm_sq()
        );
    }
    Ok(echo_unchecked(state, spectrum, tau / hbar.get()))
}

fn echo_unchecked(state: &GamowState, spectrum: &GamowSpectrum, s: f64) -> EchoResult {
    let per_mode: Vec<f64> = state
        .coefficients()
        .iter()
        .zip(spectrum.poles())
        .map(|(a, p)| decay_factor(p.gamma() * s) * a.norm_sqr())
        .collect();
    let amplitude: f64 = per_mode.iter().sum();
    EchoResult {
        amplitude: Complex64::new(amplitude, 0.0),
        probability: amplitude * amplitude,
        per_mode_contributions: per_mode,
    }
}

/// Echo amplitudes over a nonnegative, strictly increasing grid.
pub fn echo_curve(
    state: &GamowState,
    spectrum: &GamowSpectrum,
    grid: &[f64],
    hbar: Hbar,
) -> Result<TimeSeries> {
    validate_grid(grid)?;
    if grid[0] < 0.0 {
        return Err(Error::InvalidGrid(format!(
            "echo times must be nonnegative, got {}",
            grid[0]
        )));
    }
    spectrum.check_modes(state.mode_count())?;
    if !state.is_normalized() {
        log::warn!(
            "echo curve of a state with coefficient norm {} (expected 1)",
            state.norm_sq()
        );
    }
    let values = grid
        .iter()
        .map(|&tau| echo_unchecked(state, spectrum, tau / hbar.get()).amplitude)
        .collect();
    TimeSeries::new(grid.to_vec(), values)
}

/// Field reversal keeps the width and flips the energy: `z -> -z^*`.
pub fn backward_hamiltonian_map(z: ResonancePole) -> ResonancePole {
    ResonancePole::new(-z.e_r(), z.gamma()).expect("negating a finite energy keeps the pole valid")
}
