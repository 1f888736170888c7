//! Complex helpers that keep relative accuracy near zero.

use num_complex::Complex64;

/// ln(1 + z) without cancellation for small |z|.
pub fn ln_1p(z: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    Complex64::new(re, im)
}

/// e^z − 1 without cancellation for small |z|.
pub fn exp_m1(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let ea = a.exp();
    let half = (0.5 * b).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * half * half, ea * b.sin())
}
