//! Special functions used by the density formulas.
//!
//! Everything here is real-argument and double precision. The parabolic
//! cylinder functions are only provided at nonpositive integer order.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Below this argument the Bessel power series is used.
pub const BESSEL_SERIES_MAX: f64 = 15.0;

/// Deepest supported parabolic cylinder order.
pub const PCF_MIN_ORDER: i32 = -64;

fn check_finite(z: f64, what: &str) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what}: non-finite argument {z}")))
    }
}

fn check_bessel_arg(z: f64, what: &str) -> Result<()> {
    check_finite(z, what)?;
    if z < 0.0 {
        return Err(Error::Domain(format!("{what}: negative argument {z}")));
    }
    Ok(())
}

// sum_k (z/2)^(2k+nu) / (k! (k+nu)!)
fn bessel_series(nu: u32, z: f64) -> f64 {
    let h = 0.5 * z;
    let h2 = h * h;
    let mut term = if nu == 0 { 1.0 } else { h };
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= h2 / (k * (k + nu as f64));
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    sum
}

// e^{-z} I_nu(z) from the Hankel expansion, z > BESSEL_SERIES_MAX
fn bessel_asymptotic_scaled(nu: u32, z: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (kf * 8.0 * z);
        if term.abs() >= prev {
            break;
        }
        prev = term.abs();
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * z).sqrt()
}

/// Modified Bessel function I₀(z), z ≥ 0.
pub fn bessel_i0(z: f64) -> Result<f64> {
    check_bessel_arg(z, "bessel_i0")?;
    Ok(if z <= BESSEL_SERIES_MAX {
        bessel_series(0, z)
    } else {
        bessel_asymptotic_scaled(0, z) * z.exp()
    })
}

/// Modified Bessel function I₁(z), z ≥ 0.
pub fn bessel_i1(z: f64) -> Result<f64> {
    check_bessel_arg(z, "bessel_i1")?;
    Ok(if z <= BESSEL_SERIES_MAX {
        bessel_series(1, z)
    } else {
        bessel_asymptotic_scaled(1, z) * z.exp()
    })
}

/// e^{-z} I₀(z).
pub fn bessel_i0_scaled(z: f64) -> Result<f64> {
    check_bessel_arg(z, "bessel_i0_scaled")?;
    Ok(if z <= BESSEL_SERIES_MAX {
        bessel_series(0, z) * (-z).exp()
    } else {
        bessel_asymptotic_scaled(0, z)
    })
}

/// e^{-z} I₁(z).
pub fn bessel_i1_scaled(z: f64) -> Result<f64> {
    check_bessel_arg(z, "bessel_i1_scaled")?;
    Ok(if z <= BESSEL_SERIES_MAX {
        bessel_series(1, z) * (-z).exp()
    } else {
        bessel_asymptotic_scaled(1, z)
    })
}

// erf by the positive-term series, accurate for |z| < 2
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * z2 / (2.0 * k + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-z2).exp() * sum
}

// e^{z^2} erfc(z) for z >= 2 by the modified Lentz continued fraction
fn erfcx_cf(z: f64) -> f64 {
    // erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (SQRT_PI * f)
}

/// Complementary error function.
pub fn erfc(z: f64) -> Result<f64> {
    check_finite(z, "erfc")?;
    Ok(erfc_unchecked(z))
}

pub(crate) fn erfc_unchecked(z: f64) -> f64 {
    if z < 0.0 {
        2.0 - erfc_unchecked(-z)
    } else if z < 2.0 {
        1.0 - erf_series(z)
    } else if z < 27.3 {
        erfcx_cf(z) * (-z * z).exp()
    } else {
        0.0
    }
}

/// Scaled complementary error function e^{z²} erfc(z).
pub fn erfcx(z: f64) -> Result<f64> {
    check_finite(z, "erfcx")?;
    Ok(erfcx_unchecked(z))
}

pub(crate) fn erfcx_unchecked(z: f64) -> f64 {
    if z < 0.0 {
        2.0 * (z * z).exp() - erfcx_unchecked(-z)
    } else if z < 2.0 {
        (z * z).exp() * (1.0 - erf_series(z))
    } else {
        erfcx_cf(z)
    }
}

fn check_order(order: i32) -> Result<()> {
    if order > 0 || order < PCF_MIN_ORDER {
        Err(Error::UnsupportedOrder(order))
    } else {
        Ok(())
    }
}

/// Parabolic cylinder function D_order(z) for order in [-64, 0].
pub fn pcf_d(order: i32, z: f64) -> Result<f64> {
    check_order(order)?;
    check_finite(z, "pcf_d")?;
    let k = (-order) as usize;
    let scaled = pcf_d_scaled_seq(k, z);
    Ok(scaled[k] * (-0.25 * z * z).exp())
}

/// Scaled values e^{z²/4} D_{-k}(z) for k = 0..=kmax.
///
/// For z ≤ 0 and for small positive z the recurrence is run towards more
/// negative order starting from D₀ and D₋₁. For larger positive z that
/// direction loses everything to cancellation (D_{-k} is the recessive
/// solution), so the recurrence is run the other way from a high starting
/// order and normalized to D₀.
pub fn pcf_d_scaled_seq(kmax: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    out[0] = 1.0;
    if kmax == 0 {
        return out;
    }
    let kk = (kmax as f64).max(1.0);
    if z <= 0.0 || z * kk.sqrt() <= 4.0 {
        out[1] = (0.5 * PI).sqrt() * erfcx_unchecked(z / std::f64::consts::SQRT_2);
        for k in 1..kmax {
            // D_{-k-1} = (D_{-k+1} - z D_{-k}) / k
            out[k + 1] = (out[k - 1] - z * out[k]) / k as f64;
        }
        return out;
    }
    let start = ((kk.sqrt() + 20.0 / z).powi(2)).ceil() as usize + 10;
    let start = start.max(kmax + 10);
    // upward: D_{-k+1} = z D_{-k} + k D_{-k-1}
    let mut hi = 0.0_f64; // D_{-(k+1)}
    let mut cur = 1e-300_f64; // D_{-k}
    let mut k = start;
    let mut tail = Vec::with_capacity(kmax + 1);
    while k > 0 {
        if k <= kmax {
            tail.push((k, cur));
        }
        let next = z * cur + k as f64 * hi;
        hi = cur;
        cur = next;
        k -= 1;
        if cur > 1e250 {
            hi *= 1e-250;
            cur *= 1e-250;
            for v in tail.iter_mut() {
                v.1 *= 1e-250;
            }
        }
    }
    let norm = 1.0 / cur;
    for (k, v) in tail {
        out[k] = v * norm;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn i0_reference() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!(rel(bessel_i0(1.0).unwrap(), 1.266_065_877_752_008_4) < 1e-14);
        assert!(rel(bessel_i0(10.0).unwrap(), 2_815.716_628_466_254) < 1e-13);
    }

    #[test]
    fn i1_reference() {
        assert_eq!(bessel_i1(0.0).unwrap(), 0.0);
        assert!(rel(bessel_i1(2.0).unwrap(), 1.590_636_854_637_329_1) < 1e-14);
        let z = 1e-5;
        assert!(rel(bessel_i1(z).unwrap(), z / 2.0) < 1e-10);
    }

    #[test]
    fn bessel_rejects_bad_input() {
        assert!(bessel_i0(f64::NAN).is_err());
        assert!(bessel_i1(f64::INFINITY).is_err());
        assert!(bessel_i1(-1.0).is_err());
    }

    #[test]
    fn erfc_reference() {
        assert_eq!(erfc(0.0).unwrap(), 1.0);
        assert!(rel(erfc(1.0).unwrap(), 0.157_299_207_050_285_13) < 1e-14);
        assert!(erfc(f64::NAN).is_err());
    }

    #[test]
    fn erfc_large_argument() {
        let z: f64 = 8.0;
        let lead = (-z * z).exp() / (SQRT_PI * z);
        let r = erfc(z).unwrap() / lead;
        assert!((r - 1.0).abs() < 1.0 / (2.0 * z * z));
        assert_eq!(erfc(30.0).unwrap(), 0.0);
    }

    #[test]
    fn pcf_anchors() {
        for &w in &[-3.0, -0.5, 0.0, 0.7, 4.0] {
            let d0 = pcf_d(0, w).unwrap();
            assert!(rel(d0, (-w * w / 4.0).exp()) < 1e-15);
        }
        assert!(rel(pcf_d(-1, 0.0).unwrap(), (0.5 * PI).sqrt()) < 1e-15);
    }

    #[test]
    fn pcf_order_limits() {
        assert!(matches!(pcf_d(1, 1.0), Err(Error::UnsupportedOrder(1))));
        assert!(matches!(pcf_d(-65, 1.0), Err(Error::UnsupportedOrder(-65))));
        assert!(pcf_d(-64, 1.0).is_ok());
    }
}
