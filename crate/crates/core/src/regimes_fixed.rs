//! Asymptotic densities for fixed ρ < 1, the case 3/4 matching formula and
//! the unconditional tail.

use std::f64::consts::PI;

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::error::{Error, Result};
use crate::exact::{DensityValue, ModelParams};
use crate::singularities::{amp_large_x, dominant_singularity, r_star_large_x};
use crate::specfun;

const SQRT_PI: f64 = 1.772_453_850_905_516;

fn check_support(t: f64, x: f64) -> Result<()> {
    if !(t.is_finite() && x.is_finite()) {
        return Err(Error::Domain(format!(
            "t and x must be finite (t={t}, x={x})"
        )));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    if !(t > x) {
        return Err(Error::Domain(format!("t must exceed x (t={t}, x={x})")));
    }
    Ok(())
}

/// Bessel form for t just above x with x large.
pub fn regime1_bessel(t: f64, x: f64, p: &ModelParams) -> Result<DensityValue> {
    Ok(DensityValue::closed_form(
        regime1_bessel_ln(t, x, p)?.exp(),
        "T1-case1",
    ))
}

/// Natural log of [`regime1_bessel`].
pub fn regime1_bessel_ln(t: f64, x: f64, p: &ModelParams) -> Result<f64> {
    check_support(t, x)?;
    let rho = p.rho();
    let w = t - x;
    let z = 2.0 * (rho * x * w).sqrt();
    // I₁(z) = e^z·scaled so large z never overflows
    let log = p.epsilon().ln() + 0.5 * (rho * x / w).ln() - rho * x + z;
    Ok(log + specfun::bessel_i1_scaled(z)?.ln())
}

/// Saddle-point quantities for t/x > 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub s0: f64,
    pub r_s0: f64,
    /// x·φ(s₀).
    pub phase: f64,
    /// φ″(s₀).
    pub curvature: f64,
}

pub fn saddle_data(t: f64, x: f64, p: &ModelParams) -> Result<SaddleData> {
    check_support(t, x)?;
    let rho = p.rho();
    let q = p.sqrt_rho();
    let tw = (t * (t - x)).sqrt();
    Ok(SaddleData {
        s0: -1.0 - rho + q * (2.0 * t - x) / tw,
        r_s0: ((t - x) / (rho * t)).sqrt(),
        phase: (x - t) * (1.0 + rho) + 2.0 * q * tw,
        curvature: 2.0 * (t * (t - x)).powf(1.5) / (q * x.powi(3)),
    })
}

/// Laplace-method density for x, t large with t/x fixed above 1.
pub fn regime2_saddle(t: f64, x: f64, p: &ModelParams) -> Result<DensityValue> {
    Ok(DensityValue::closed_form(
        regime2_saddle_ln(t, x, p)?.exp(),
        "T1-case2",
    ))
}

/// Natural log of [`regime2_saddle`].
pub fn regime2_saddle_ln(t: f64, x: f64, p: &ModelParams) -> Result<f64> {
    let sd = saddle_data(t, x, p)?;
    let rho = p.rho();
    let r = sd.r_s0;
    Ok(
        p.epsilon().ln() - rho * x + (1.0 - rho * r * r).ln() + sd.phase
            - 2.0 * (1.0 - rho * r).ln()
            - 0.5 * (2.0 * PI * x * sd.curvature).ln(),
    )
}

/// Gaussian simplification of the saddle form near t = x/(1−ρ).
pub fn gaussian_diagnostic(t: f64, x: f64, p: &ModelParams) -> Result<DensityValue> {
    check_support(t, x)?;
    let rho = p.rho();
    let e = p.epsilon();
    let d = t - x / e;
    let value =
        e.powf(1.5) / (2.0 * (rho * PI * x).sqrt()) * (-e.powi(3) / (4.0 * rho * x) * d * d).exp();
    Ok(DensityValue::closed_form(value, "T1-gaussian"))
}

/// Which of the two equivalent theta-type series to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesForm {
    Direct,
    Poisson,
    /// Direct below a = 1/√ρ, Poisson above.
    Auto,
}

const SERIES_CAP: usize = 200;

// Σ e^{−k²√ρ/(4a)}(k²√ρ − 2a) over odd k, in f64
fn direct_sum_f64(a: f64, q: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut mag = 0.0;
    for n in 0..SERIES_CAP {
        let k2 = ((2 * n + 1) as f64).powi(2);
        let term = (-k2 * q / (4.0 * a)).exp() * (k2 * q - 2.0 * a);
        sum += term;
        mag += term.abs();
        if n > 0 && term.abs() < 1e-17 * mag {
            break;
        }
    }
    (sum, mag)
}

fn big_to_f64(b: &BigFloat) -> f64 {
    format!("{b}").parse::<f64>().unwrap_or(f64::NAN)
}

// the same sum in `prec`-bit arithmetic; terms are dropped once they fall
// below 2^{-prec} of the largest one
fn direct_sum_big(a: f64, q: f64, prec: usize) -> f64 {
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("constant cache");
    let qb = BigFloat::from_f64(q, prec);
    let two_a = BigFloat::from_f64(2.0 * a, prec);
    let four_a = BigFloat::from_f64(4.0 * a, prec);
    let cutoff = (prec as f64) * std::f64::consts::LN_2 + 10.0;
    let mut sum = BigFloat::from_f64(0.0, prec);
    for n in 0..SERIES_CAP {
        let k2f = ((2 * n + 1) as f64).powi(2);
        if n > 0 && k2f * q / (4.0 * a) - (k2f * q).ln() > cutoff {
            break;
        }
        let k2 = BigFloat::from_f64(k2f, prec);
        let k2q = k2.mul(&qb, prec, rm);
        let arg = k2q.div(&four_a, prec, rm).neg();
        let term = arg
            .exp(prec, rm, &mut cc)
            .mul(&k2q.sub(&two_a, prec, rm), prec, rm);
        sum = sum.add(&term, prec, rm);
    }
    big_to_f64(&sum)
}

/// Direct-form sum, switching to extended precision when the terms cancel.
fn direct_sum(a: f64, q: f64) -> f64 {
    let (sum, mag) = direct_sum_f64(a, q);
    if sum.abs() >= 1e-4 * mag {
        return sum;
    }
    let mut prec = 192;
    let mut prev = direct_sum_big(a, q, prec);
    while prec < 8192 {
        prec *= 2;
        let cur = direct_sum_big(a, q, prec);
        if (cur - prev).abs() <= 1e-14 * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

fn poisson_sum(a: f64, q: f64) -> f64 {
    let mut sum = 0.0;
    for m in 1..=SERIES_CAP {
        let mf = m as f64;
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * mf * mf * (-PI * PI * mf * mf * a / q).exp();
        sum += term;
        if term.abs() < 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

/// Case-3 density with the common factor e^{−(1−√ρ)²t}e^{(1−√ρ)x}/x³
/// removed, as a function of a = t/x².
pub fn regime3_shape(a: f64, p: &ModelParams, form: SeriesForm) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("a = t/x² must be positive, got {a}")));
    }
    let q = p.sqrt_rho();
    let form = match form {
        SeriesForm::Auto if a < 1.0 / q => SeriesForm::Direct,
        SeriesForm::Auto => SeriesForm::Poisson,
        f => f,
    };
    Ok(match form {
        SeriesForm::Direct => {
            (1.0 + q) / (2.0 * SQRT_PI * q.sqrt() * (1.0 - q) * a.powf(2.5)) * direct_sum(a, q)
        }
        _ => 2.0 * PI * PI * (1.0 + q) / (p.rho() * (1.0 - q)) * poisson_sum(a, q),
    })
}

/// Theta-series density for x large with t/x² bounded.
pub fn regime3_series(t: f64, x: f64, p: &ModelParams, form: SeriesForm) -> Result<DensityValue> {
    Ok(DensityValue::closed_form(
        regime3_series_ln(t, x, p, form)?.exp(),
        "T1-case3",
    ))
}

/// Natural log of [`regime3_series`]; −∞ if the series sum is not positive.
pub fn regime3_series_ln(t: f64, x: f64, p: &ModelParams, form: SeriesForm) -> Result<f64> {
    check_support(t, x)?;
    let q = p.sqrt_rho();
    let shape = regime3_shape(t / (x * x), p, form)?;
    let log = -(1.0 - q).powi(2) * t + (1.0 - q) * x - 3.0 * x.ln();
    Ok(if shape > 0.0 {
        log + shape.ln()
    } else {
        f64::NEG_INFINITY
    })
}

/// Single-exponential tail F(x)e^{r*(x)t}.
pub fn regime4_spectral(t: f64, x: f64, p: &ModelParams) -> Result<DensityValue> {
    check_support(t, x)?;
    let sing = dominant_singularity(x, p)?;
    let value = sing.f_amp * (sing.r_star * t).exp();
    Ok(DensityValue::closed_form(value, "T1-case4"))
}

/// Matching form between cases 3 and 4.
pub fn matching_formula(t: f64, x: f64, p: &ModelParams) -> Result<DensityValue> {
    Ok(DensityValue::closed_form(
        matching_formula_ln(t, x, p)?.exp(),
        "T1-match",
    ))
}

/// Natural log of [`matching_formula`].
pub fn matching_formula_ln(t: f64, x: f64, p: &ModelParams) -> Result<f64> {
    check_support(t, x)?;
    let q = p.sqrt_rho();
    let k = 2.0 * PI * PI * (1.0 + q) / (p.rho() * (1.0 - q));
    Ok(k.ln() - 3.0 * x.ln() + (1.0 - q) * x + r_star_large_x(x, p) * t)
}

/// Case-4 form with F and r* replaced by their large-x expansions.
pub fn spectral_large_x(t: f64, x: f64, p: &ModelParams) -> f64 {
    spectral_large_x_ln(t, x, p).exp()
}

pub fn spectral_large_x_ln(t: f64, x: f64, p: &ModelParams) -> f64 {
    amp_large_x(x, p).ln() + r_star_large_x(x, p) * t
}

/// Constants of the unconditional tail e^{−At}e^{−Bt^{1/3}}C*t^{−5/6}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailConstants {
    pub a: f64,
    pub b: f64,
    pub c_star: f64,
    rho: f64,
}

impl TailConstants {
    pub fn new(p: &ModelParams) -> Self {
        let q = p.sqrt_rho();
        let rho = p.rho();
        let k = (1.0 + q) / (1.0 - q);
        Self {
            a: (1.0 - q).powi(2),
            b: 3.0 * (0.5 * PI).powf(2.0 / 3.0) * rho.powf(1.0 / 6.0),
            c_star: 2f64.powf(2.0 / 3.0) / 3f64.sqrt()
                * PI.powf(5.0 / 6.0)
                * rho.powf(-5.0 / 12.0)
                * k
                * k.exp(),
            rho,
        }
    }

    /// A·C*/ρ, the prefactor obtained by differentiating the ROS tail.
    pub fn ros_prefactor(&self) -> f64 {
        self.a * self.c_star / self.rho
    }

    /// e^{−At−Bt^{1/3}}t^{−5/6} without prefactor.
    pub fn shape(&self, t: f64) -> f64 {
        (-self.a * t - self.b * t.cbrt() - 5.0 / 6.0 * t.ln()).exp()
    }

    /// Leading log-slope −A − B/(3t^{2/3}).
    pub fn log_slope(&self, t: f64) -> f64 {
        -self.a - self.b / (3.0 * t.powf(2.0 / 3.0))
    }
}

/// Tail constants and the value C*·t^{−5/6}e^{−At−Bt^{1/3}}.
pub fn flatto_tail(t: f64, p: &ModelParams) -> Result<(TailConstants, f64)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let c = TailConstants::new(p);
    Ok((c, c.c_star * c.shape(t)))
}

/// Formula used by [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedRegime {
    Bessel,
    Saddle,
    Series,
    Spectral,
    Matching,
}

impl FixedRegime {
    pub fn tag(&self) -> &'static str {
        match self {
            FixedRegime::Bessel => "T1-case1",
            FixedRegime::Saddle => "T1-case2",
            FixedRegime::Series => "T1-case3",
            FixedRegime::Spectral => "T1-case4",
            FixedRegime::Matching => "T1-match",
        }
    }
}

pub fn evaluate(regime: FixedRegime, t: f64, x: f64, p: &ModelParams) -> Result<DensityValue> {
    match regime {
        FixedRegime::Bessel => regime1_bessel(t, x, p),
        FixedRegime::Saddle => regime2_saddle(t, x, p),
        FixedRegime::Series => regime3_series(t, x, p, SeriesForm::Auto),
        FixedRegime::Spectral => regime4_spectral(t, x, p),
        FixedRegime::Matching => matching_formula(t, x, p),
    }
}

/// Cut-offs of the regime classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// x at or above this is "large".
    pub large_x: f64,
    /// t ≥ t_factor·max(1, x) counts as "t large".
    pub t_factor: f64,
    /// Case 1 while ρ·x·(t − x) stays below this.
    pub bessel_product: f64,
    /// Case 3 once t/x² reaches this.
    pub series_a: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            large_x: 30.0,
            t_factor: 30.0,
            bessel_product: 25.0,
            series_a: 0.1,
        }
    }
}

/// Pick the asymptotic formula for (t, x), or `None` when no regime applies.
pub fn classify(t: f64, x: f64, p: &ModelParams, th: &Thresholds) -> Option<FixedRegime> {
    if !(t > x && x > 0.0) {
        return None;
    }
    if x >= th.large_x {
        if p.rho() * x * (t - x) <= th.bessel_product {
            Some(FixedRegime::Bessel)
        } else if t / (x * x) >= th.series_a {
            Some(FixedRegime::Series)
        } else {
            Some(FixedRegime::Saddle)
        }
    } else if t >= th.t_factor * x.max(1.0) {
        Some(FixedRegime::Spectral)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_edge_limit() {
        let p = ModelParams::new(0.4).unwrap();
        let x = 3.0;
        let v = regime1_bessel(x + 1e-10, x, &p).unwrap().continuous;
        let lim = 0.6 * 0.4 * x * (-0.4 * x as f64).exp();
        assert!((v / lim - 1.0).abs() < 1e-8);
    }

    #[test]
    fn direct_sum_cancellation_uses_extended_precision() {
        let p = ModelParams::new(0.3).unwrap();
        let d = regime3_shape(5.0, &p, SeriesForm::Direct).unwrap();
        let q = regime3_shape(5.0, &p, SeriesForm::Poisson).unwrap();
        assert!(((d - q) / q).abs() < 1e-10, "{d} {q}");
    }

    #[test]
    fn saddle_phase_from_definition() {
        use num_complex::Complex64;
        let p = ModelParams::new(0.6).unwrap();
        let (t, x) = (75.0, 30.0);
        let sd = saddle_data(t, x, &p).unwrap();
        let r = crate::exact::root_r(Complex64::new(sd.s0, 0.0), &p)
            .unwrap()
            .re;
        assert!((r - sd.r_s0).abs() < 1e-12);
        let phase = sd.s0 * (t - x) + 0.6 * x * r;
        assert!((phase - sd.phase).abs() < 1e-12 * phase.abs().max(1.0));
    }

    #[test]
    fn saddle_matches_closed_display() {
        let rho: f64 = 0.5;
        let p = ModelParams::new(rho).unwrap();
        let (t, x) = (120.0, 60.0);
        let tau = t / x;
        let num = (1.0 - rho)
            * rho.powf(0.25)
            * (2.0 * t * (rho * (1.0 - x / t)).sqrt() - (1.0 + rho) * t + x).exp();
        let den = 2.0
            * PI.sqrt()
            * x.sqrt()
            * (tau * (tau - 1.0)).powf(0.75)
            * (tau.sqrt() - (rho * (tau - 1.0)).sqrt()).powi(2);
        let v = regime2_saddle(t, x, &p).unwrap().continuous;
        assert!((v / (num / den) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classifier_regions() {
        let p = ModelParams::new(0.5).unwrap();
        let th = Thresholds::default();
        assert_eq!(classify(40.1, 40.0, &p, &th), Some(FixedRegime::Bessel));
        assert_eq!(classify(120.0, 60.0, &p, &th), Some(FixedRegime::Saddle));
        assert_eq!(classify(450.0, 30.0, &p, &th), Some(FixedRegime::Series));
        assert_eq!(classify(40.0, 1.0, &p, &th), Some(FixedRegime::Spectral));
        assert_eq!(classify(3.0, 1.0, &p, &th), None);
    }
}
