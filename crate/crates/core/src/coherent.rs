//! Quasi-coherent states: finite Poisson-weighted superpositions of decaying
//! Gamow modes,
//!
//! ```text
//! |alpha> = (sum_{k<=N} |alpha|^{2k} / k!)^{-1/2} sum_{n<=N} alpha^n / sqrt(n!) |f_n^D>.
//! ```
//!
//! The finite-`N` normalizer is kept exactly; the Gaussian overlap is only
//! its `N -> inf` limit.

use num_complex::Complex64;

use crate::dynamics::survival_amplitude;
use crate::error::{Error, Result};
use crate::types::{pseudometric_pair, GamowSpectrum, GamowState, Hbar};

/// Relative imaginary part tolerated in a "real" label.
const REAL_LABEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiCoherentState {
    alpha: Complex64,
    n_max: usize,
    ln_normalizer: f64,
    state: GamowState,
}

impl QuasiCoherentState {
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `(sum_{k<=N} |alpha|^{2k} / k!)^{-1/2}`; underflows to zero for very
    /// large labels, see [`Self::ln_normalizer`].
    pub fn normalizer(&self) -> f64 {
        self.ln_normalizer.exp()
    }

    pub fn ln_normalizer(&self) -> f64 {
        self.ln_normalizer
    }

    pub fn state(&self) -> &GamowState {
        &self.state
    }

    pub fn is_real(&self) -> bool {
        is_real(self.alpha)
    }
}

fn is_real(alpha: Complex64) -> bool {
    alpha.im.abs() <= REAL_LABEL_TOL * alpha.norm().max(1.0)
}

/// `ceil(|alpha|^2 + 10 sqrt(max(|alpha|^2, 1)) + 20)`, leaving a Poisson
/// tail mass far below 1e-12.
pub fn default_truncation(alpha: Complex64) -> usize {
    let s = alpha.norm_sqr();
    (s + 10.0 * s.max(1.0).sqrt() + 20.0).ceil() as usize
}

pub fn make_quasi_coherent(alpha: Complex64, n_max: usize) -> Result<QuasiCoherentState> {
    if n_max < 1 {
        return Err(Error::invalid(
            "n_max",
            "quasi-coherent states need n_max >= 1",
        ));
    }
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::invalid("alpha", format!("{alpha} is not finite")));
    }
    let zero = Complex64::new(0.0, 0.0);
    if alpha == zero {
        let mut c = vec![zero; n_max + 1];
        c[0] = Complex64::new(1.0, 0.0);
        return Ok(QuasiCoherentState {
            alpha,
            n_max,
            ln_normalizer: 0.0,
            state: GamowState::new(c)?,
        });
    }

    // ln|alpha^n / sqrt(n!)|, scaled by the largest term to avoid overflow.
    let ln_abs = alpha.norm().ln();
    let mut logs = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    for n in 0..=n_max {
        if n > 0 {
            acc += ln_abs - 0.5 * (n as f64).ln();
        }
        logs.push(acc);
    }
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled_sum: f64 = logs.iter().map(|l| (2.0 * (l - peak)).exp()).sum();
    let ln_normalizer = -peak - 0.5 * scaled_sum.ln();
    let phase = alpha.arg();
    let coefficients = logs
        .iter()
        .enumerate()
        .map(|(n, l)| Complex64::from_polar((l + ln_normalizer).exp(), n as f64 * phase))
        .collect();
    Ok(QuasiCoherentState {
        alpha,
        n_max,
        ln_normalizer,
        state: GamowState::new(coefficients)?,
    })
}

fn check_same_truncation(s1: &QuasiCoherentState, s2: &QuasiCoherentState) -> Result<()> {
    if s1.n_max != s2.n_max {
        return Err(Error::DimensionMismatch {
            expected: s1.n_max + 1,
            found: s2.n_max + 1,
        });
    }
    Ok(())
}

/// `<alpha_1(0)|alpha_2(0)>` at finite `N`, with both exact normalizers.
pub fn overlap_exact(s1: &QuasiCoherentState, s2: &QuasiCoherentState) -> Result<Complex64> {
    check_same_truncation(s1, s2)?;
    pseudometric_pair(&s1.state, &s2.state)
}

/// The overlap with the two normalizers merged into one sum,
/// `(sum_{k<=N} (|a1|^2 + |a2|^2)^k / k!)^{-1/2} sum_{n<=N} (a1^* a2)^n / n!`.
/// Agrees with [`overlap_exact`] only as `N -> inf`.
pub fn overlap_merged_normalizer(alpha1: Complex64, alpha2: Complex64, n_max: usize) -> Complex64 {
    let x = alpha1.norm_sqr() + alpha2.norm_sqr();
    let w = alpha1.conj() * alpha2;
    let mut norm_sum = 0.0;
    let mut term = 1.0;
    let mut series = Complex64::new(0.0, 0.0);
    let mut cterm = Complex64::new(1.0, 0.0);
    for n in 0..=n_max {
        if n > 0 {
            term *= x / n as f64;
            cterm *= w / n as f64;
        }
        norm_sum += term;
        series += cterm;
    }
    series / norm_sum.sqrt()
}

/// `exp(-(alpha_1^* - alpha_2)^2 / 2)`: the `N -> inf` resummation of the
/// overlap. It equals the true limit only for real labels.
pub fn overlap_gaussian_approx(alpha1: Complex64, alpha2: Complex64) -> Complex64 {
    let d = alpha1.conj() - alpha2;
    (-0.5 * d * d).exp()
}

fn require_real(s: &QuasiCoherentState) -> Result<()> {
    if !s.is_real() {
        return Err(Error::NonRealLabel { alpha: s.alpha });
    }
    Ok(())
}

/// `<alpha_1(0)|alpha_2(t)> = n_1 n_2 sum_n (alpha_1 alpha_2)^n / n! exp(-i z_n t / hbar)`
/// for real labels, with the exact finite-`N` normalizers `n_1`, `n_2`.
pub fn time_overlap(
    s1: &QuasiCoherentState,
    s2: &QuasiCoherentState,
    spectrum: &GamowSpectrum,
    t: f64,
    hbar: Hbar,
) -> Result<Complex64> {
    require_real(s1)?;
    require_real(s2)?;
    check_same_truncation(s1, s2)?;
    survival_amplitude(&s1.state, &s2.state, spectrum, t, hbar)
}

/// Same sum as [`time_overlap`] but with the infinite-`N` prefactor
/// `exp(-(|alpha_1|^2 + |alpha_2|^2) / 2)` in place of the exact normalizers.
pub fn time_overlap_gaussian_normalized(
    s1: &QuasiCoherentState,
    s2: &QuasiCoherentState,
    spectrum: &GamowSpectrum,
    t: f64,
    hbar: Hbar,
) -> Result<Complex64> {
    let exact = time_overlap(s1, s2, spectrum, t, hbar)?;
    let ln_gauss = -0.5 * (s1.alpha.norm_sqr() + s2.alpha.norm_sqr());
    Ok(exact * (ln_gauss - s1.ln_normalizer - s2.ln_normalizer).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Macroscopicity {
    pub quasi_orthogonal: bool,
    /// `|alpha_1^* - alpha_2|`
    pub separation: f64,
    pub overlap_magnitude: f64,
}

/// Quasi-orthogonality of the preferred basis: `|overlap| < threshold`.
pub fn macroscopicity_check(
    alpha1: Complex64,
    alpha2: Complex64,
    threshold: f64,
) -> Result<Macroscopicity> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(
            "threshold",
            format!("{threshold} must lie in (0, 1)"),
        ));
    }
    let overlap_magnitude = overlap_gaussian_approx(alpha1, alpha2).norm();
    Ok(Macroscopicity {
        quasi_orthogonal: overlap_magnitude < threshold,
        separation: (alpha1.conj() - alpha2).norm(),
        overlap_magnitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ladder_spectrum, ResonancePole};
    use proptest::prelude::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Literal finite-N overlap with factorials accumulated term by term.
    fn overlap_oracle(a1: Complex64, a2: Complex64, n_max: usize) -> Complex64 {
        let norm = |a: Complex64| {
            let mut s = 0.0;
            let mut t = 1.0;
            for k in 0..=n_max {
                if k > 0 {
                    t *= a.norm_sqr() / k as f64;
                }
                s += t;
            }
            s.powf(-0.5)
        };
        let mut series = Complex64::new(0.0, 0.0);
        let mut t = Complex64::new(1.0, 0.0);
        for n in 0..=n_max {
            if n > 0 {
                t *= a1.conj() * a2 / n as f64;
            }
            series += t;
        }
        norm(a1) * norm(a2) * series
    }

    #[test]
    fn vacuum_label() {
        let s = make_quasi_coherent(r(0.0), 5).unwrap();
        assert_eq!(s.state().coefficients()[0], r(1.0));
        assert!(s.state().coefficients()[1..].iter().all(|c| *c == r(0.0)));
        assert_eq!(s.normalizer(), 1.0);
    }

    #[test]
    fn two_term_state() {
        let s = make_quasi_coherent(r(1.0), 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.normalizer() - h).abs() < 1e-16);
        for c in s.state().coefficients() {
            assert!((c - r(h)).norm() < 1e-16);
        }
    }

    #[test]
    fn normalized_at_moderate_truncation() {
        let s = make_quasi_coherent(r(2.0), 50).unwrap();
        assert!((s.state().norm_sq() - 1.0).abs() < 1e-12);
        let big = make_quasi_coherent(Complex64::new(20.0, 5.0), 700).unwrap();
        assert!((big.state().norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n_max_zero_rejected() {
        assert!(make_quasi_coherent(r(1.0), 0).is_err());
    }

    #[test]
    fn default_truncation_values() {
        assert_eq!(default_truncation(r(0.0)), 30);
        assert_eq!(default_truncation(r(4.0)), 16 + 40 + 20);
        assert_eq!(default_truncation(r(3.0)), 9 + 30 + 20);
    }

    #[test]
    fn self_overlap_is_one() {
        let s = make_quasi_coherent(Complex64::new(1.5, -0.5), 40).unwrap();
        assert!((overlap_exact(&s, &s).unwrap() - r(1.0)).norm() < 1e-14);
    }

    #[test]
    fn overlap_with_vacuum() {
        let a = 3.0;
        let vac = make_quasi_coherent(r(0.0), 200).unwrap();
        let s = make_quasi_coherent(r(a), 200).unwrap();
        let o = overlap_exact(&vac, &s).unwrap();
        assert!((o - r((-0.5 * a * a).exp())).norm() < 1e-14);
    }

    #[test]
    fn overlap_matches_literal_sum() {
        for (a1, a2, n) in [
            (r(1.0), r(4.0), 60),
            (Complex64::new(0.3, 0.8), r(-1.2), 25),
        ] {
            let s1 = make_quasi_coherent(a1, n).unwrap();
            let s2 = make_quasi_coherent(a2, n).unwrap();
            let got = overlap_exact(&s1, &s2).unwrap();
            assert!((got - overlap_oracle(a1, a2, n)).norm() < 1e-14);
        }
    }

    #[test]
    fn separated_labels_match_gaussian() {
        // Frozen from a direct summation at N = 400: exp(-4.5) = 0.011108996538242306.
        let frozen = overlap_oracle(r(1.0), r(4.0), 400).re;
        assert!((frozen - 0.011_108_996_538_242_306).abs() < 1e-15);
        let s1 = make_quasi_coherent(r(1.0), 60).unwrap();
        let s2 = make_quasi_coherent(r(4.0), 60).unwrap();
        let o = overlap_exact(&s1, &s2).unwrap();
        assert!((o.re - frozen).abs() < 1e-6 && o.im.abs() < 1e-15);
    }

    #[test]
    fn mismatched_truncation_rejected() {
        let s1 = make_quasi_coherent(r(1.0), 10).unwrap();
        let s2 = make_quasi_coherent(r(1.0), 11).unwrap();
        assert!(overlap_exact(&s1, &s2).is_err());
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(overlap_gaussian_approx(r(2.5), r(2.5)), r(1.0));
        assert!((overlap_gaussian_approx(r(0.0), r(3.0)) - r((-4.5f64).exp())).norm() < 1e-18);
    }

    #[test]
    fn gaussian_agrees_once_truncation_is_large_enough() {
        for a in [0.5, 1.0, 2.0, 3.0, 5.0] {
            let sep = r(a);
            let n = (a * a + 10.0 * (a * a).sqrt() + 20.0).ceil() as usize;
            let s1 = make_quasi_coherent(r(0.0), n).unwrap();
            let s2 = make_quasi_coherent(sep, n).unwrap();
            let exact = overlap_exact(&s1, &s2).unwrap();
            assert!(
                (exact - overlap_gaussian_approx(r(0.0), sep)).norm() < 1e-8,
                "alpha = {a}"
            );
        }
    }

    #[test]
    fn merged_normalizer_discrepancy_vanishes_with_n() {
        let (a1, a2) = (r(1.5), r(2.5));
        let mut last = f64::INFINITY;
        for n in [2, 5, 10, 20, 40, 80] {
            let s1 = make_quasi_coherent(a1, n).unwrap();
            let s2 = make_quasi_coherent(a2, n).unwrap();
            let gap =
                (overlap_exact(&s1, &s2).unwrap() - overlap_merged_normalizer(a1, a2, n)).norm();
            assert!(gap <= last);
            last = gap;
        }
        assert!(last < 1e-14);
        // At small N the two forms genuinely differ.
        let s1 = make_quasi_coherent(a1, 2).unwrap();
        let s2 = make_quasi_coherent(a2, 2).unwrap();
        assert!(
            (overlap_exact(&s1, &s2).unwrap() - overlap_merged_normalizer(a1, a2, 2)).norm() > 1e-3
        );
    }

    #[test]
    fn time_overlap_examples() {
        let z0 = ResonancePole::new(1.0, 0.2).unwrap();
        let n = 120;
        let spec = ladder_spectrum(z0, n).unwrap();
        let s1 = make_quasi_coherent(r(1.0), n).unwrap();
        let s2 = make_quasi_coherent(r(3.0), n).unwrap();
        let h = Hbar::default();
        assert_eq!(
            time_overlap(&s1, &s2, &spec, 0.0, h).unwrap(),
            overlap_exact(&s1, &s2).unwrap()
        );

        let vac = make_quasi_coherent(r(0.0), n).unwrap();
        for t in [0.0, 1.0, 10.0] {
            assert_eq!(time_overlap(&vac, &vac, &spec, t, h).unwrap(), r(1.0));
        }

        // Poisson resummation exp(|alpha|^2 (exp(-i z0 t) - 1)).
        for t in [0.3, 2.0, 7.5] {
            let got = time_overlap(&s2, &s2, &spec, t, h).unwrap();
            let want = (9.0 * ((-Complex64::i() * z0.z() * t).exp() - 1.0)).exp();
            assert!((got - want).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn time_overlap_rejects_complex_labels() {
        let spec = ladder_spectrum(ResonancePole::new(1.0, 0.2).unwrap(), 10).unwrap();
        let s1 = make_quasi_coherent(Complex64::new(1.0, 0.5), 10).unwrap();
        let s2 = make_quasi_coherent(r(1.0), 10).unwrap();
        assert!(matches!(
            time_overlap(&s1, &s2, &spec, 1.0, Hbar::default()),
            Err(Error::NonRealLabel { .. })
        ));
    }

    #[test]
    fn late_time_overlap_tends_to_normalizer_product() {
        let n = 60;
        let spec = ladder_spectrum(ResonancePole::new(0.8, 0.5).unwrap(), n).unwrap();
        let s1 = make_quasi_coherent(r(1.0), n).unwrap();
        let s2 = make_quasi_coherent(r(2.0), n).unwrap();
        let late = time_overlap(&s1, &s2, &spec, 200.0, Hbar::default()).unwrap();
        assert!((late - r(s1.normalizer() * s2.normalizer())).norm() < 1e-15);
    }

    #[test]
    fn gaussian_normalized_variant_differs_by_normalizer_ratio() {
        let n = 8;
        let spec = ladder_spectrum(ResonancePole::new(1.0, 0.1).unwrap(), n).unwrap();
        let s1 = make_quasi_coherent(r(1.0), n).unwrap();
        let s2 = make_quasi_coherent(r(2.0), n).unwrap();
        let h = Hbar::default();
        let exact = time_overlap(&s1, &s2, &spec, 1.0, h).unwrap();
        let gaussian = time_overlap_gaussian_normalized(&s1, &s2, &spec, 1.0, h).unwrap();
        let ratio = (-2.5f64).exp() / (s1.normalizer() * s2.normalizer());
        assert!((gaussian - exact * ratio).norm() < 1e-15);
        assert!(ratio < 1.0);
    }

    #[test]
    fn macroscopicity_examples() {
        let m = macroscopicity_check(r(0.0), r(10.0), 1e-6).unwrap();
        assert!(m.quasi_orthogonal);
        assert_eq!(m.separation, 10.0);
        assert!((m.overlap_magnitude - (-50.0f64).exp()).abs() < 1e-30);

        for th in [0.1, 0.5, 0.999] {
            assert!(
                !macroscopicity_check(r(2.0), r(2.0), th)
                    .unwrap()
                    .quasi_orthogonal
            );
        }

        let theta: f64 = 1e-3;
        let a2 = (2.0 * (1.0 / theta).ln()).sqrt();
        let m = macroscopicity_check(r(0.0), r(a2), theta).unwrap();
        assert!((m.overlap_magnitude - theta).abs() < 1e-15);

        assert!(macroscopicity_check(r(0.0), r(1.0), 0.0).is_err());
        assert!(macroscopicity_check(r(0.0), r(1.0), 1.0).is_err());
    }

    proptest! {
        #[test]
        fn overlap_is_hermitian_and_bounded(
            (r1, i1) in (-4.0f64..4.0, -4.0f64..4.0),
            (r2, i2) in (-4.0f64..4.0, -4.0f64..4.0),
            n in 1usize..60,
        ) {
            let s1 = make_quasi_coherent(Complex64::new(r1, i1), n).unwrap();
            let s2 = make_quasi_coherent(Complex64::new(r2, i2), n).unwrap();
            let a = overlap_exact(&s1, &s2).unwrap();
            let b = overlap_exact(&s2, &s1).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-14);
            prop_assert!(a.norm() <= 1.0 + 1e-14);
            prop_assert!((s1.state().norm_sq() - 1.0).abs() < 1e-12);
        }
    }
}
