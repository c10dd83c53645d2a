//! Reduced resolvent of the single-level Friedrichs model,
//!
//! ```text
//! eta(z) = omega_0 - z - lambda^2 * int_0^inf f^2(w) / (w - z) dw,
//! ```
//!
//! its boundary values on the cut `[0, inf)`, its continuation through the
//! cut into the lower half-plane of the second sheet, and a Newton solver
//! for the resonance pole with an argument-principle certificate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig, Segment};
use crate::types::{FriedrichsModel, ResonancePole};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `w + i0`
    Above,
    /// `w - i0`
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaEvaluation {
    pub z: Complex64,
    pub value: Complex64,
    pub sheet: Sheet,
    pub quadrature_error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSearchReport {
    pub pole: ResonancePole,
    pub newton_iterations: usize,
    /// `|eta_II(z0)|`
    pub final_residual: f64,
    pub argument_principle_count: Option<i64>,
}

fn one_over_kernel(f2: f64, w: f64, z: Complex64) -> Complex64 {
    Complex64::new(f2, 0.0) / (Complex64::new(w, 0.0) - z)
}

/// `eta` on the physical sheet, for `z` off the cut.
pub fn eta_first_sheet(model: &FriedrichsModel, z: Complex64) -> Result<EtaEvaluation> {
    eta_first_sheet_with(model, z, &QuadratureConfig::default())
}

pub fn eta_first_sheet_with(
    model: &FriedrichsModel,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<EtaEvaluation> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("z", format!("{z} is not finite")));
    }
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::OnBranchCut { z });
    }
    let lambda_sq = model.lambda() * model.lambda();
    let free = Complex64::new(model.omega_0(), 0.0) - z;
    if lambda_sq == 0.0 {
        return Ok(EtaEvaluation {
            z,
            value: free,
            sheet: Sheet::First,
            quadrature_error_estimate: 0.0,
        });
    }
    let ff = model.form_factor();
    let extra: Vec<f64> = if z.re > 0.0 { vec![z.re] } else { Vec::new() };
    let segments = ff.real_axis_segments(&extra);
    let est = integrate(|w| one_over_kernel(ff.sq(w), w, z), &segments, cfg)?;
    Ok(EtaEvaluation {
        z,
        value: free - lambda_sq * est.value,
        sheet: Sheet::First,
        quadrature_error_estimate: lambda_sq * est.error,
    })
}

/// Principal value `PV int_0^inf f^2(w') / (w' - w) dw'` by subtraction on
/// the symmetric window `[0, 2w]`:
///
/// ```text
/// int_0^{2w} (f^2(w') - f^2(w)) / (w' - w) dw' + f^2(w) ln((2w - w) / (w - 0))
///   + int_{2w}^inf f^2(w') / (w' - w) dw'
/// ```
///
/// The log term is zero on a symmetric window but kept for clarity.
pub fn principal_value(model: &FriedrichsModel, w: f64) -> Result<(f64, f64)> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::invalid("omega", format!("{w} must be positive")));
    }
    let ff = model.form_factor();
    let cfg = QuadratureConfig::default();
    let (lo, hi) = (0.0, 2.0 * w);
    let f2w = ff.sq(w);

    let mut inner_cuts: Vec<f64> = ff
        .breakpoints()
        .into_iter()
        .filter(|&b| b > lo && b < hi)
        .chain(std::iter::once(w))
        .collect();
    inner_cuts.sort_by(f64::total_cmp);
    inner_cuts.dedup();
    let mut inner = Vec::with_capacity(inner_cuts.len() + 1);
    let mut a = lo;
    for &c in &inner_cuts {
        inner.push(Segment::Finite(a, c));
        a = c;
    }
    inner.push(Segment::Finite(a, hi));

    let subtracted = integrate(
        |x| Complex64::new((ff.sq(x) - f2w) / (x - w), 0.0),
        &inner,
        &cfg,
    )?;

    let outer: Vec<Segment> = ff
        .real_axis_segments(&[hi])
        .into_iter()
        .filter(|s| match *s {
            Segment::Finite(a, _) => a >= hi,
            Segment::Tail(a) => a >= hi,
        })
        .collect();
    let tail = if outer.is_empty() {
        Default::default()
    } else {
        integrate(|x| Complex64::new(ff.sq(x) / (x - w), 0.0), &outer, &cfg)?
    };

    let log_term = f2w * ((hi - w) / (w - lo)).ln();
    let value = subtracted.value.re + log_term + tail.value.re;
    Ok((value, subtracted.error + tail.error))
}

/// Boundary value `eta(w +/- i0)` for `w > 0`:
/// `omega_0 - w - lambda^2 [PV(w) +/- i pi f^2(w)]`.
pub fn eta_boundary(model: &FriedrichsModel, w: f64, side: Side) -> Result<Complex64> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::invalid("omega", format!("{w} must be positive")));
    }
    let lambda_sq = model.lambda() * model.lambda();
    let free = model.omega_0() - w;
    if lambda_sq == 0.0 {
        return Ok(Complex64::new(free, 0.0));
    }
    let (pv, _) = principal_value(model, w)?;
    let jump = PI * model.form_factor().sq(w);
    let im = match side {
        Side::Above => -lambda_sq * jump,
        Side::Below => lambda_sq * jump,
    };
    Ok(Complex64::new(free - lambda_sq * pv, im))
}

/// `eta_II(z) = eta(z) - 2 pi i lambda^2 f^2(z)` for `Im z < 0`.
pub fn eta_second_sheet(model: &FriedrichsModel, z: Complex64) -> Result<EtaEvaluation> {
    if z.im >= 0.0 || z.im.is_nan() {
        return Err(Error::NotLowerHalfPlane { z });
    }
    let f2 = model.form_factor().continued_sq(z)?;
    let first = eta_first_sheet(model, z)?;
    let lambda_sq = model.lambda() * model.lambda();
    Ok(EtaEvaluation {
        z,
        value: first.value - Complex64::new(0.0, 2.0 * PI * lambda_sq) * f2,
        sheet: Sheet::Second,
        quadrature_error_estimate: first.quadrature_error_estimate,
    })
}

/// Locates the resonance pole by Newton iteration on `eta_II`, seeded at the
/// second-order estimate `omega_0 + eta(omega_0 + i0)`.
pub fn find_pole(
    model: &FriedrichsModel,
    tolerance: f64,
    max_iter: usize,
) -> Result<PoleSearchReport> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::invalid(
            "tolerance",
            format!("{tolerance} must be positive"),
        ));
    }
    if model.lambda() == 0.0 {
        return Ok(PoleSearchReport {
            pole: ResonancePole::new(model.omega_0(), 0.0)?,
            newton_iterations: 0,
            final_residual: 0.0,
            argument_principle_count: None,
        });
    }
    if !model.form_factor().supports_continuation() {
        return Err(Error::NoContinuation);
    }

    let omega_0 = model.omega_0();
    let mut z = Complex64::new(omega_0, 0.0) + eta_boundary(model, omega_0, Side::Above)?;
    if z.im >= 0.0 {
        // f^2(omega_0) = 0: start just below the axis.
        z.im = -tolerance.max(1e-12);
    }
    let eval = |z: Complex64| eta_second_sheet(model, z).map(|e| e.value);

    let mut residual = eval(z)?;
    let mut iterations = 0;
    while residual.norm() > tolerance {
        if iterations == max_iter {
            return Err(Error::NoConvergence {
                iterations,
                last: z,
                residual: residual.norm(),
            });
        }
        let h = 1e-6 * z.norm().max(1e-3);
        let derivative = (eval(z + h)? - eval(z - h)?) / (2.0 * h);
        if derivative.norm() == 0.0 || !derivative.re.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                last: z,
                residual: residual.norm(),
            });
        }
        let mut step = residual / derivative;
        // Stay in the lower half-plane where the continuation is defined.
        let mut halvings = 0;
        while (z - step).im >= 0.0 && halvings < 60 {
            step *= 0.5;
            halvings += 1;
        }
        z -= step;
        residual = eval(z)?;
        iterations += 1;
    }

    if z.im > tolerance {
        return Err(Error::SpuriousPole { z });
    }
    Ok(PoleSearchReport {
        pole: ResonancePole::from_complex(Complex64::new(z.re, z.im.min(0.0)))?,
        newton_iterations: iterations,
        final_residual: residual.norm(),
        argument_principle_count: None,
    })
}

/// Axis-aligned rectangle in the open lower half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let finite = [re_min, re_max, im_min, im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || re_min >= re_max || im_min >= im_max {
            return Err(Error::invalid(
                "rectangle",
                format!("[{re_min}, {re_max}] x [{im_min}, {im_max}] is empty or not finite"),
            ));
        }
        if im_max >= 0.0 {
            return Err(Error::invalid(
                "rectangle",
                "must lie strictly inside Im z < 0",
            ));
        }
        Ok(Rectangle {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// A box around a decaying pole `z` that stays below the real axis:
    /// `Im` spans `[1.5 Im z, 0.5 Im z]`, `Re` spans `Re z +/- max(2|Im z|, 1e-4)`.
    pub fn around_pole(z: Complex64) -> Result<Self> {
        let depth = z.im.abs();
        let half_width = (2.0 * depth).max(1e-4);
        Self::new(z.re - half_width, z.re + half_width, 1.5 * z.im, 0.5 * z.im)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

const BOUNDARY_ZERO_THRESHOLD: f64 = 1e-10;
const MAX_ARG_STEP: f64 = 0.3;
const INITIAL_PIECES: usize = 16;
const MAX_DEPTH: u32 = 40;

/// Winding number of `eta_II` around `rect`, i.e. the number of its zeros
/// inside minus its poles inside. The continued rational form factor has
/// poles at `-i * scale`; keep rectangles away from them.
pub fn count_poles_in_rectangle(model: &FriedrichsModel, rect: &Rectangle) -> Result<i64> {
    let f = |z: Complex64| -> Result<Complex64> {
        let v = eta_second_sheet(model, z)?.value;
        if v.norm() < BOUNDARY_ZERO_THRESHOLD {
            return Err(Error::BoundaryZero {
                z,
                magnitude: v.norm(),
            });
        }
        Ok(v)
    };

    let corners = rect.corners();
    let mut total = 0.0;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let mut prev_z = a;
        let mut prev_f = f(a)?;
        for j in 1..=INITIAL_PIECES {
            let t = j as f64 / INITIAL_PIECES as f64;
            let z = a + (b - a) * t;
            let fz = f(z)?;
            total += accumulate_arg(&f, prev_z, prev_f, z, fz, 0)?;
            prev_z = z;
            prev_f = fz;
        }
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.05 {
        return Err(Error::invalid(
            "contour",
            format!("accumulated argument is {turns} turns, not an integer"),
        ));
    }
    Ok(rounded as i64)
}

fn accumulate_arg<F>(
    f: &F,
    za: Complex64,
    fa: Complex64,
    zb: Complex64,
    fb: Complex64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let delta = (fb / fa).arg();
    if delta.abs() <= MAX_ARG_STEP {
        return Ok(delta);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::BoundaryZero {
            z: 0.5 * (za + zb),
            magnitude: fa.norm().min(fb.norm()),
        });
    }
    let zm = 0.5 * (za + zb);
    let fm = f(zm)?;
    Ok(accumulate_arg(f, za, fa, zm, fm, depth + 1)?
        + accumulate_arg(f, zm, fm, zb, fb, depth + 1)?)
}

/// Attaches an argument-principle count over [`Rectangle::around_pole`].
/// Zero-width poles (the uncoupled limit) sit on the real axis and are left
/// uncertified.
pub fn certify_pole(model: &FriedrichsModel, report: PoleSearchReport) -> Result<PoleSearchReport> {
    if report.pole.gamma() == 0.0 {
        return Ok(report);
    }
    let rect = Rectangle::around_pole(report.pole.z())?;
    let count = count_poles_in_rectangle(model, &rect)?;
    Ok(PoleSearchReport {
        argument_principle_count: Some(count),
        ..report
    })
}
