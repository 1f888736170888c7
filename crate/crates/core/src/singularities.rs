//! Roots of the transcendental equations behind the exponential decay rates.
//!
//! With the conformal map s = −1 − ρ + 2√ρ·cosh η the poles of the waiting
//! time transform become zeros of
//! (1 − √ρe^{−η})² − (√ρ − e^{−η})²·e^{−2√ρ x sinh η}.
//! The dominant one sits either on the imaginary axis (η = iv) or on the
//! line Im η = π (η = u + iπ).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::ModelParams;
use crate::roots::{bisect, brent};

/// Right branch point of the transform square root, −(1−√ρ)².
pub fn s_minus(p: &ModelParams) -> f64 {
    -(1.0 - p.sqrt_rho()).powi(2)
}

/// Left branch point of the transform square root, −(1+√ρ)².
pub fn s_plus(p: &ModelParams) -> f64 {
    -(1.0 + p.sqrt_rho()).powi(2)
}

/// Service requirement at which the dominant singularity turns the corner
/// from the imaginary axis onto Im η = π.
pub fn x_star(p: &ModelParams) -> f64 {
    let q = p.sqrt_rho();
    (1.0 - q) / (q * (1.0 + q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityResult {
    pub u: f64,
    pub v: f64,
    /// Decay rate r*(x) (a negative number).
    pub r_star: f64,
    /// Amplitude F(x) of the single-exponential tail.
    pub f_amp: f64,
}

/// Which of the two branches produced a dominant singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Imaginary,
    Corner,
    Shifted,
}

impl SingularityResult {
    pub fn branch(&self) -> Branch {
        if self.u == 0.0 && self.v == PI {
            Branch::Corner
        } else if self.u == 0.0 {
            Branch::Imaginary
        } else {
            Branch::Shifted
        }
    }

    pub fn eta(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}

/// Denominator of the η-plane integrand; its zeros are the poles.
pub fn eta_denominator(eta: Complex64, x: f64, p: &ModelParams) -> Complex64 {
    let q = p.sqrt_rho();
    let em = (-eta).exp();
    let a = 1.0 - q * em;
    let b = q - em;
    a * a - b * b * (-2.0 * q * x * eta.sinh()).exp()
}

// phase mismatch on η = iv; zero at the wanted root, −π as v → 0⁺, 0 at v = π
fn theta_v(v: f64, x: f64, q: f64) -> f64 {
    let (s, c) = v.sin_cos();
    let alpha = (q * s).atan2(1.0 - q * c) - s.atan2(q - c);
    alpha + q * x * s
}

// magnitude mismatch on η = u + iπ; zero at the wanted root
fn h_u(u: f64, x: f64, q: f64) -> f64 {
    // (1+qe)/(q+e) = 1 + (1−q)(1−e)/(q+e), kept accurate for tiny u
    let e = (-u).exp();
    ((1.0 - q) * -(-u).exp_m1() / (q + e)).ln_1p() - q * x * u.sinh()
}

fn solve_v(x: f64, q: f64) -> Result<Option<f64>> {
    const GRID: usize = 512;
    let f = |v: f64| theta_v(v, x, q);
    let mut prev_v = PI * 1e-6;
    let mut prev = f(prev_v);
    for k in 1..GRID {
        let v = PI * k as f64 / GRID as f64;
        let cur = f(v);
        if prev < 0.0 && cur >= 0.0 {
            return brent("imaginary-axis root", f, prev_v, v, 1e-15).map(Some);
        }
        prev_v = v;
        prev = cur;
    }
    // crossing may hide between the last grid point and π
    if prev < 0.0 {
        let gap = PI - prev_v;
        for k in 1..60 {
            let v = PI - gap * 0.5f64.powi(k);
            if f(v) >= 0.0 {
                return brent("imaginary-axis root", f, prev_v, v, 1e-15).map(Some);
            }
        }
    }
    Ok(None)
}

fn solve_u(x: f64, q: f64) -> Result<f64> {
    let f = |u: f64| h_u(u, x, q);
    let mut lo = 1e-8;
    if f(lo) <= 0.0 {
        return Err(Error::Solver {
            what: "shifted-line root",
            lo,
            hi: lo,
        });
    }
    let mut step = 1e-3;
    loop {
        let hi = lo + step;
        if f(hi) < 0.0 {
            return brent("shifted-line root", f, lo, hi, 1e-15);
        }
        if hi > 800.0 {
            return Err(Error::Solver {
                what: "shifted-line root",
                lo: 1e-8,
                hi,
            });
        }
        lo = hi;
        step *= 1.2;
    }
}

fn amp_imaginary(v: f64, x: f64, p: &ModelParams) -> f64 {
    let rho = p.rho();
    let q = p.sqrt_rho();
    let (s, c) = v.sin_cos();
    let g = 1.0 + rho - 2.0 * q * c;
    let ph = q * x * s;
    let num = 2.0 * q * (1.0 - rho) * ((1.0 - q * c) * x).exp() * s * s;
    let den = g * g * q * x * c + (1.0 - rho) * g;
    num / den * ((1.0 - rho) * s * ph.sin() + (2.0 * q - (1.0 + rho) * c) * ph.cos())
}

fn amp_shifted(u: f64, x: f64, p: &ModelParams) -> f64 {
    let rho = p.rho();
    let q = p.sqrt_rho();
    let (sh, ch) = (u.sinh(), u.cosh());
    let g = 1.0 + rho + 2.0 * q * ch;
    let ph = q * x * sh;
    let num = -2.0 * q * (1.0 - rho) * ((1.0 + q * ch) * x).exp() * sh * sh;
    let den = -g * g * q * x * ch + (1.0 - rho) * g;
    num / den * (-(1.0 - rho) * sh * ph.sinh() + (2.0 * q + (1.0 + rho) * ch) * ph.cosh())
}

/// F(x*) in closed form.
pub fn amp_at_x_star(p: &ModelParams) -> f64 {
    let q = p.sqrt_rho();
    let rho = p.rho();
    6.0 * q * (1.0 + q).powi(2) / (1.0 + 4.0 * q + rho) * (1.0 / q - 1.0).exp()
}

/// Dominant singularity of the transform: decay rate r*(x) and amplitude F(x).
pub fn dominant_singularity(x: f64, p: &ModelParams) -> Result<SingularityResult> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "dominant_singularity needs x > 0, got {x}"
        )));
    }
    let q = p.sqrt_rho();
    let rho = p.rho();
    let xs = x_star(p);
    if (x - xs).abs() < 1e-9 * xs.max(1.0) {
        return Ok(SingularityResult {
            u: 0.0,
            v: PI,
            r_star: s_plus(p),
            f_amp: amp_at_x_star(p),
        });
    }
    if x > xs {
        if let Some(v) = solve_v(x, q)? {
            return Ok(SingularityResult {
                u: 0.0,
                v,
                r_star: -1.0 - rho + 2.0 * q * v.cos(),
                f_amp: amp_imaginary(v, x, p),
            });
        }
        return Err(Error::Solver {
            what: "imaginary-axis root",
            lo: 0.0,
            hi: PI,
        });
    }
    let u = solve_u(x, q)?;
    Ok(SingularityResult {
        u,
        v: PI,
        r_star: -1.0 - rho - 2.0 * q * u.cosh(),
        f_amp: amp_shifted(u, x, p),
    })
}

/// Three-term large-x expansion of r*(x).
pub fn r_star_large_x(x: f64, p: &ModelParams) -> f64 {
    let q = p.sqrt_rho();
    let pi2 = PI * PI;
    -(1.0 - q).powi(2) - pi2 / (q * x * x)
        + 2.0 * pi2 * (1.0 + q) / (p.rho() * (1.0 - q) * x.powi(3))
}

/// Three-term small-x expansion of r*(x).
pub fn r_star_small_x(x: f64, p: &ModelParams) -> f64 {
    let rho = p.rho();
    let l = rho.ln();
    l / x - (1.0 + rho + 2.0 * (1.0 - rho) / l)
        + (2.0 * rho * l * l + (rho * rho - 1.0) * l - 4.0 * (1.0 - rho).powi(2)) / l.powi(3) * x
}

/// Two-term large-x estimate of v(x).
pub fn v_large_x(x: f64, p: &ModelParams) -> f64 {
    let q = p.sqrt_rho();
    PI / (q * x) - PI * (1.0 + q) / (p.rho() * (1.0 - q) * x * x)
}

/// Large-x form of the amplitude F(x).
pub fn amp_large_x(x: f64, p: &ModelParams) -> f64 {
    let q = p.sqrt_rho();
    2.0 * PI * PI * (1.0 + q) / (p.rho() * (1.0 - q) * x.powi(3)) * ((1.0 - q) * x).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeavyRoots {
    pub roots: Vec<f64>,
    pub x: f64,
}

/// Residual |((2iv+1)/(2iv−1))² − e^{−2ivX}| of the heavy-traffic equation.
pub fn heavy_residual(v: f64, x: f64) -> f64 {
    let z = Complex64::new(1.0, 2.0 * v) / Complex64::new(-1.0, 2.0 * v);
    (z * z - Complex64::new(0.0, -2.0 * v * x).exp()).norm()
}

/// First `count` positive roots of ((2iv+1)/(2iv−1))² = e^{−2ivX}.
///
/// The equation factors into cot(Xv/2) = 2v and tan(Xv/2) = −2v; the n-th
/// root lies in ((n−1)π/X, nπ/X) and each bracket is tried with both factors.
pub fn heavy_roots(x: f64, count: usize) -> Result<HeavyRoots> {
    if !(x > 0.0 && x.is_finite()) || count == 0 {
        return Err(Error::Domain(format!(
            "heavy_roots needs X > 0 and count ≥ 1 (X={x}, count={count})"
        )));
    }
    // cos(Xv/2) − 2v sin(Xv/2) and 2v cos(Xv/2) + sin(Xv/2)
    let f1 = |v: f64| (0.5 * x * v).cos() - 2.0 * v * (0.5 * x * v).sin();
    let f2 = |v: f64| 2.0 * v * (0.5 * x * v).cos() + (0.5 * x * v).sin();
    let mut roots = Vec::with_capacity(count);
    for n in 1..=count {
        let lo = (n - 1) as f64 * PI / x;
        let hi = n as f64 * PI / x;
        let w = hi - lo;
        let (a, b) = (lo + 1e-13 * w.max(lo), hi - 1e-13 * w.max(hi));
        let mut found = None;
        for f in [&f1 as &dyn Fn(f64) -> f64, &f2] {
            if f(a).signum() != f(b).signum() {
                found = Some(brent("heavy-traffic root", f, a, b, 1e-16 * hi.max(1.0))?);
                break;
            }
        }
        match found {
            Some(v) => roots.push(v),
            None => {
                return Err(Error::Solver {
                    what: "heavy-traffic root",
                    lo,
                    hi,
                })
            }
        }
    }
    Ok(HeavyRoots { roots, x })
}

/// k(X) = (X(1+4V²)+4)/(2V²(1+4V²)) with V = v₁(X).
pub fn k_of_x(x: f64) -> Result<f64> {
    let v = heavy_roots(x, 1)?.roots[0];
    let w = 1.0 + 4.0 * v * v;
    Ok((x * w + 4.0) / (2.0 * v * v * w))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiPoint {
    pub psi: f64,
    pub sigma: f64,
    pub x_tilde: f64,
    pub v_tilde: f64,
}

/// σ(ψ) = 4 tan³(ψ/2)(ψ + sin ψ).
pub fn sigma_of_psi(psi: f64) -> f64 {
    4.0 * (0.5 * psi).tan().powi(3) * (psi + psi.sin())
}

/// Stationary point of the σ-scale Laplace integral.
pub fn psi_from_sigma(sigma: f64) -> Result<PsiPoint> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!(
            "psi_from_sigma needs σ > 0, got {sigma}"
        )));
    }
    // work in log σ so tiny and huge σ both bisect cleanly
    let target = sigma.ln();
    let psi = bisect(|p| sigma_of_psi(p).ln() - target, 1e-70, PI, 1e-16);
    let half = 0.5 * psi;
    Ok(PsiPoint {
        psi,
        sigma,
        x_tilde: 2.0 * psi * half.tan(),
        v_tilde: 0.5 / half.tan(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(rho: f64) -> ModelParams {
        ModelParams::new(rho).unwrap()
    }

    #[test]
    fn x_star_values() {
        assert!((x_star(&params(0.3)) - 0.5335).abs() < 5e-5);
        assert!((x_star(&params(0.25)) - 2.0 / 3.0).abs() < 1e-15);
        assert!(x_star(&params(1.0 - 1e-12)) < 1e-6);
    }

    #[test]
    fn corner_closed_form() {
        let p = params(0.4);
        let r = dominant_singularity(x_star(&p), &p).unwrap();
        assert_eq!(r.branch(), Branch::Corner);
        assert_eq!(r.r_star, s_plus(&p));
    }

    #[test]
    fn psi_round_trip() {
        let s = sigma_of_psi(1.0);
        let p = psi_from_sigma(s).unwrap();
        assert!((p.psi - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn heavy_roots_brackets() {
        let h = heavy_roots(3.0, 6).unwrap();
        for (i, v) in h.roots.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!(*v > (n - 1.0) * PI / 3.0 && *v < n * PI / 3.0);
            assert!(heavy_residual(*v, 3.0) < 1e-12);
        }
    }
}
