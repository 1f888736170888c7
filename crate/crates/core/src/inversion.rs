//! Numerical Laplace inversion kernels.
//!
//! Both act on g(s + shift) and multiply the result by e^{shift·t}, so a
//! transform whose rightmost singularity sits at `shift` is inverted as if
//! it were at the origin.

use std::f64::consts::PI;

use num_complex::Complex64;

// Weideman–Trefethen parameters for the cotangent contour
const C_ORIGIN: f64 = -0.6122;
const C_COT: f64 = 0.5017;
const C_ALPHA: f64 = 0.6407;
const C_IMAG: f64 = 0.2645;

/// Trapezoid rule on the cotangent (modified Talbot) contour.
///
/// `base` fixes the contour scale μ = base/t; `points` is the number of
/// quadrature nodes on θ ∈ (−π, π). Using `points = 2·base` on the same
/// contour gives a refinement whose difference to the `points = base` value
/// estimates the discretization error.
pub fn talbot<G>(g: G, t: f64, base: usize, points: usize, shift: f64) -> f64
where
    G: Fn(Complex64) -> Complex64,
{
    let mu = base as f64 / t;
    let h = 2.0 * PI / points as f64;
    let mut acc = 0.0;
    for j in 0..points / 2 {
        let th = (j as f64 + 0.5) * h;
        let at = C_ALPHA * th;
        let cot = at.cos() / at.sin();
        let sin2 = at.sin().powi(2);
        let s = Complex64::new(mu * (C_ORIGIN + C_COT * th * cot), mu * C_IMAG * th);
        let ds = Complex64::new(
            mu * (C_COT * cot - C_COT * C_ALPHA * th / sin2),
            mu * C_IMAG,
        );
        let gv = g(s + shift);
        if gv.re == 0.0 && gv.im == 0.0 {
            continue;
        }
        let term = ((s + shift) * t).exp() * gv * ds;
        acc += term.im;
    }
    acc * h / PI
}

/// Euler-summed trapezoid rule on a vertical line (Abate–Whitt).
///
/// `terms` is the number of plain terms before Euler averaging over
/// `euler + 1` further partial sums.
pub fn bromwich_euler<G>(g: G, t: f64, terms: usize, euler: usize, shift: f64) -> f64
where
    G: Fn(Complex64) -> Complex64,
{
    const A: f64 = 20.0;
    let u = (0.5 * A).exp() / t;
    let x = A / (2.0 * t);
    let h = PI / t;
    let mut partial = Vec::with_capacity(terms + euler + 1);
    let mut sum = 0.5 * g(Complex64::new(x + shift, 0.0)).re;
    let mut sign = 1.0;
    for k in 1..=terms + euler {
        sign = -sign;
        sum += sign * g(Complex64::new(x + shift, k as f64 * h)).re;
        if k >= terms {
            partial.push(sum);
        }
    }
    // binomial average of the last euler+1 partial sums
    let mut binom = 1.0;
    let mut avg = 0.0;
    for (j, p) in partial.iter().enumerate() {
        avg += binom * p;
        binom *= (euler - j) as f64 / (j + 1) as f64;
    }
    avg *= 0.5f64.powi(euler as i32);
    u * avg * (shift * t).exp()
}
