//! Globally adaptive Gauss–Kronrod (10/21) quadrature for complex-valued
//! integrands on finite intervals and on semi-infinite tails.
//!
//! Tails `[a, inf)` are mapped onto `[0, 1)` with `x = a + t / (1 - t)`.
//! The Kronrod rule never samples interval endpoints, so integrable endpoint
//! behaviour (and the mapped point at infinity) is never evaluated directly.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_815_573,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

/// One piece of the integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Finite(f64, f64),
    /// `[start, inf)`
    Tail(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    Tail(f64),
}

impl Map {
    #[inline]
    fn apply(self, t: f64) -> (f64, f64) {
        match self {
            Map::Identity => (t, 1.0),
            Map::Tail(a) => {
                let s = 1.0 - t;
                (a + t / s, 1.0 / (s * s))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    map: Map,
    value: Complex64,
    error: f64,
}

fn kronrod<F>(f: &F, lo: f64, hi: f64, map: Map) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |t: f64| -> Result<Complex64> {
        let (x, jac) = map.apply(t);
        let v = f(x) * jac;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { at: x })
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = Complex64::new(0.0, 0.0);
    let mut res_abs = fc.norm() * WGK[10];
    let mut samples = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        samples[j] = (f1, f2);
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }

    // QUADPACK-style error scaling.
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).norm();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).norm() + (f2 - mean).norm());
    }
    res_asc *= half.abs();
    res_abs *= half.abs();
    let value = res_k * half;
    let mut error = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, error))
}

/// Integrates `f` over the union of `segments`, refining the piece with the
/// largest error estimate until the total error meets
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F>(f: F, segments: &[Segment], cfg: &QuadratureConfig) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    let mut pieces = Vec::with_capacity(segments.len() + 64);
    for seg in segments {
        let (lo, hi, map) = match *seg {
            Segment::Finite(a, b) => (a, b, Map::Identity),
            Segment::Tail(a) => (0.0, 1.0, Map::Tail(a)),
        };
        if lo == hi {
            continue;
        }
        let (value, error) = kronrod(&f, lo, hi, map)?;
        pieces.push(Piece {
            lo,
            hi,
            map,
            value,
            error,
        });
    }

    let mut subdivisions = 0;
    loop {
        let total: Complex64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.norm()) {
            return Ok(Estimate {
                value: total,
                error: err,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else {
            return Ok(Estimate {
                value: total,
                error: err,
            });
        };
        let p = pieces[worst];
        let mid = 0.5 * (p.lo + p.hi);
        let too_narrow = (p.hi - p.lo).abs() <= 100.0 * f64::EPSILON * mid.abs().max(1e-300);
        if subdivisions >= cfg.max_subdivisions || too_narrow {
            return Err(Error::QuadratureFailed {
                estimate: total,
                error: err,
                subdivisions,
            });
        }
        let (v1, e1) = kronrod(&f, p.lo, mid, p.map)?;
        let (v2, e2) = kronrod(&f, mid, p.hi, p.map)?;
        pieces[worst] = Piece {
            lo: p.lo,
            hi: mid,
            map: p.map,
            value: v1,
            error: e1,
        };
        pieces.push(Piece {
            lo: mid,
            hi: p.hi,
            map: p.map,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, segments: &[Segment], cfg: &QuadratureConfig) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let est = integrate(|x| Complex64::new(f(x), 0.0), segments, cfg)?;
    Ok((est.value.re, est.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let (v, _) = integrate_real(
            |x| x.powi(5) - 3.0 * x * x,
            &[Segment::Finite(-1.0, 2.0)],
            &cfg,
        )
        .unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn tail_of_exponential() {
        let cfg = QuadratureConfig::default();
        let (v, _) = integrate_real(|x| (-x).exp(), &[Segment::Tail(0.0)], &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_tail_with_breakpoint() {
        let cfg = QuadratureConfig::default();
        let (v, _) = integrate_real(
            |x| 1.0 / (1.0 + x * x),
            &[Segment::Finite(0.0, 1.0), Segment::Tail(1.0)],
            &cfg,
        )
        .unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn complex_oscillatory() {
        let cfg = QuadratureConfig::default();
        let est = integrate(
            |x| Complex64::new(0.0, 3.0 * x).exp(),
            &[Segment::Finite(0.0, 2.0)],
            &cfg,
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 6.0).exp() - 1.0) / Complex64::new(0.0, 3.0);
        assert!((est.value - exact).norm() < 1e-13);
    }

    #[test]
    fn divergent_tail_fails() {
        let cfg = QuadratureConfig::default();
        let r = integrate_real(|x| x * x, &[Segment::Tail(0.0)], &cfg);
        assert!(r.is_err());
    }

    #[test]
    fn sharp_peak_is_resolved() {
        // Lorentzian of width 1e-6 centred inside the interval.
        let eps = 1e-6;
        let cfg = QuadratureConfig::default();
        let (v, _) = integrate_real(
            |x| eps / ((x - 0.3) * (x - 0.3) + eps * eps),
            &[Segment::Finite(0.0, 0.3), Segment::Finite(0.3, 1.0)],
            &cfg,
        )
        .unwrap();
        let exact = (0.7f64 / eps).atan() + (0.3f64 / eps).atan();
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
    }
}
