//! Form factors coupling the discrete level to the continuum.
//!
//! Every shipped analytic family has the shape `f^2(w) = w * g(w)^2`, so the
//! squared form factor vanishes at the threshold `w = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_real, QuadratureConfig, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormFactorKind {
    RationalSquared,
    GaussianCutoff,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// `f^2(w) = c * w^p / (1 + (w/L)^2)^q`
    Rational {
        amplitude: f64,
        scale: f64,
        numerator_power: u32,
        denominator_power: u32,
    },
    /// `f^2(w) = c * w * exp(-(w/L)^2)`
    Gaussian { amplitude: f64, scale: f64 },
    /// Piecewise-linear `f`, zero outside the table.
    Tabulated { nodes: Vec<f64>, values: Vec<f64> },
}

/// Real form factor `f(w)` on `[0, inf)` with a square-integrability
/// certificate computed when it is built.
#[derive(Debug, Clone, PartialEq)]
pub struct FormFactor {
    shape: Shape,
    norm_sq: f64,
}

impl FormFactor {
    /// `f^2(w) = w / (1 + (w/scale)^2)^2`.
    pub fn rational(scale: f64) -> Result<Self> {
        Self::rational_with(1.0, scale, 1, 2)
    }

    pub fn rational_with(
        amplitude: f64,
        scale: f64,
        numerator_power: u32,
        denominator_power: u32,
    ) -> Result<Self> {
        check_amplitude(amplitude)?;
        check_scale(scale)?;
        Self::certify(Shape::Rational {
            amplitude,
            scale,
            numerator_power,
            denominator_power,
        })
    }

    /// `f^2(w) = w * exp(-(w/scale)^2)`.
    pub fn gaussian(scale: f64) -> Result<Self> {
        Self::gaussian_with(1.0, scale)
    }

    pub fn gaussian_with(amplitude: f64, scale: f64) -> Result<Self> {
        check_amplitude(amplitude)?;
        check_scale(scale)?;
        Self::certify(Shape::Gaussian { amplitude, scale })
    }

    /// Linear interpolation of `f` through `(nodes[i], values[i])`; zero
    /// outside `[nodes[0], nodes[last]]`.
    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::invalid(
                "form factor table",
                "needs at least two nodes",
            ));
        }
        if nodes.len() != values.len() {
            return Err(Error::invalid(
                "form factor table",
                format!("{} nodes but {} values", nodes.len(), values.len()),
            ));
        }
        if nodes.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "form factor table",
                "entries must be finite",
            ));
        }
        if nodes[0] < 0.0 {
            return Err(Error::invalid(
                "form factor table",
                "nodes must be nonnegative",
            ));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "form factor table",
                "nodes must be strictly increasing",
            ));
        }
        Self::certify(Shape::Tabulated { nodes, values })
    }

    fn certify(shape: Shape) -> Result<Self> {
        let mut ff = FormFactor {
            shape,
            norm_sq: 0.0,
        };
        let segments = ff.real_axis_segments(&[]);
        let cfg = QuadratureConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        };
        let (norm_sq, _) = integrate_real(|w| ff.sq(w), &segments, &cfg)
            .map_err(|e| Error::NotIntegrable(e.to_string()))?;
        if !norm_sq.is_finite() {
            return Err(Error::NotIntegrable(format!(
                "integral evaluated to {norm_sq}"
            )));
        }
        ff.norm_sq = norm_sq;
        Ok(ff)
    }

    pub fn kind(&self) -> FormFactorKind {
        match self.shape {
            Shape::Rational { .. } => FormFactorKind::RationalSquared,
            Shape::Gaussian { .. } => FormFactorKind::GaussianCutoff,
            Shape::Tabulated { .. } => FormFactorKind::Tabulated,
        }
    }

    /// `int_0^inf f^2(w) dw`
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// Characteristic energy scale, used as a quadrature breakpoint.
    pub fn scale(&self) -> f64 {
        match &self.shape {
            Shape::Rational { scale, .. } | Shape::Gaussian { scale, .. } => *scale,
            Shape::Tabulated { nodes, .. } => nodes[nodes.len() - 1],
        }
    }

    /// `f(w)` for `w >= 0`.
    pub fn value(&self, w: f64) -> f64 {
        match &self.shape {
            Shape::Tabulated { nodes, values } => interpolate(nodes, values, w),
            _ => self.sq(w).max(0.0).sqrt(),
        }
    }

    /// `f^2(w)` for real `w >= 0`; zero for `w < 0`.
    pub fn sq(&self, w: f64) -> f64 {
        if w < 0.0 {
            return 0.0;
        }
        match &self.shape {
            Shape::Rational {
                amplitude,
                scale,
                numerator_power,
                denominator_power,
            } => {
                let u = w / scale;
                amplitude * w.powi(*numerator_power as i32)
                    / (1.0 + u * u).powi(*denominator_power as i32)
            }
            Shape::Gaussian { amplitude, scale } => {
                let u = w / scale;
                amplitude * w * (-u * u).exp()
            }
            Shape::Tabulated { nodes, values } => {
                let f = interpolate(nodes, values, w);
                f * f
            }
        }
    }

    /// Analytic continuation of `f^2` to complex arguments.
    pub fn continued_sq(&self, z: Complex64) -> Result<Complex64> {
        match &self.shape {
            Shape::Rational {
                amplitude,
                scale,
                numerator_power,
                denominator_power,
            } => {
                let u = z / scale;
                Ok(*amplitude * z.powi(*numerator_power as i32)
                    / (1.0 + u * u).powi(*denominator_power as i32))
            }
            Shape::Gaussian { amplitude, scale } => {
                let u = z / scale;
                Ok(*amplitude * z * (-u * u).exp())
            }
            Shape::Tabulated { .. } => Err(Error::NoContinuation),
        }
    }

    pub fn supports_continuation(&self) -> bool {
        !matches!(self.shape, Shape::Tabulated { .. })
    }

    /// Points in `(0, inf)` where the integrand should be split: the scale
    /// parameter for analytic kinds, every node for tables.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Tabulated { nodes, .. } => nodes.iter().copied().filter(|&w| w > 0.0).collect(),
            _ => vec![self.scale()],
        }
    }

    /// Splits `[0, inf)` at the form-factor breakpoints and at `extra`
    /// points. Tables end with a finite segment (zero beyond), analytic kinds
    /// with a semi-infinite tail.
    pub(crate) fn real_axis_segments(&self, extra: &[f64]) -> Vec<Segment> {
        let mut cuts: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .chain(extra.iter().copied())
            .filter(|w| *w > 0.0 && w.is_finite())
            .collect();
        if let Shape::Tabulated { nodes, .. } = &self.shape {
            let end = nodes[nodes.len() - 1];
            cuts.retain(|&w| w <= end);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut segments = Vec::with_capacity(cuts.len() + 1);
        let mut lo = 0.0;
        for &c in &cuts {
            if c > lo {
                segments.push(Segment::Finite(lo, c));
                lo = c;
            }
        }
        match &self.shape {
            Shape::Tabulated { .. } => {}
            _ => segments.push(Segment::Tail(lo)),
        }
        segments
    }
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::invalid(
            "form factor amplitude",
            format!("{amplitude} must be finite and nonnegative so that f is real"),
        ));
    }
    Ok(())
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::invalid(
            "form factor scale",
            format!("{scale} must be finite and positive"),
        ));
    }
    Ok(())
}

fn interpolate(nodes: &[f64], values: &[f64], w: f64) -> f64 {
    let last = nodes.len() - 1;
    if w < nodes[0] || w > nodes[last] {
        return 0.0;
    }
    let i = nodes.partition_point(|&x| x <= w).clamp(1, last);
    let (x0, x1) = (nodes[i - 1], nodes[i]);
    let t = (w - x0) / (x1 - x0);
    values[i - 1] + t * (values[i] - values[i - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_norm_matches_closed_form() {
        // int_0^inf w / (1 + w^2)^2 dw = 1/2
        let ff = FormFactor::rational(1.0).unwrap();
        assert!((ff.norm_sq() - 0.5).abs() < 1e-12);
        assert_eq!(ff.kind(), FormFactorKind::RationalSquared);
    }

    #[test]
    fn gaussian_norm_matches_closed_form() {
        // int_0^inf w exp(-w^2/L^2) dw = L^2 / 2
        let ff = FormFactor::gaussian(2.0).unwrap();
        assert!((ff.norm_sq() - 2.0).abs() < 1e-11);
    }

    #[test]
    fn linear_form_factor_is_rejected() {
        // f(w) = w  =>  f^2 = w^2
        let err = FormFactor::rational_with(1.0, 1.0, 2, 0).unwrap_err();
        assert!(matches!(err, Error::NotIntegrable(_)));
        // deterministic
        assert_eq!(err, FormFactor::rational_with(1.0, 1.0, 2, 0).unwrap_err());
    }

    #[test]
    fn log_divergent_tail_is_rejected() {
        // f^2 ~ 1/w at large w
        assert!(FormFactor::rational_with(1.0, 1.0, 3, 2).is_err());
    }

    #[test]
    fn continuation_agrees_on_real_axis() {
        for ff in [
            FormFactor::rational(1.3).unwrap(),
            FormFactor::gaussian(0.7).unwrap(),
        ] {
            for &w in &[0.0, 0.1, 0.9, 2.5, 7.0] {
                let c = ff.continued_sq(Complex64::new(w, 0.0)).unwrap();
                assert!((c.re - ff.sq(w)).abs() < 1e-15 && c.im == 0.0);
            }
        }
    }

    #[test]
    fn tabulated_interpolates_and_has_no_continuation() {
        let ff = FormFactor::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(ff.value(0.5), 0.5);
        assert_eq!(ff.sq(1.5), 0.25);
        assert_eq!(ff.sq(3.0), 0.0);
        assert!((ff.norm_sq() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            ff.continued_sq(Complex64::new(1.0, -0.1)),
            Err(Error::NoContinuation)
        );
    }

    #[test]
    fn bad_tables_are_rejected() {
        assert!(FormFactor::tabulated(vec![0.0], vec![1.0]).is_err());
        assert!(FormFactor::tabulated(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(FormFactor::tabulated(vec![1.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(FormFactor::tabulated(vec![-1.0, 0.5], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn negative_amplitude_is_rejected() {
        assert!(FormFactor::gaussian_with(-1.0, 1.0).is_err());
        assert!(FormFactor::rational(0.0).is_err());
    }
}
