//! Heavy-traffic densities for ρ = 1 − ε, ε small.
//!
//! Scaled variables: T = εt, X = εx, Z = X/√ε, Θ = εT, σ = εΘ and
//! T* = (T − X)/ε². Every density returned here is per unit of the original
//! time t.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{self, DensityValue, InversionConfig};
use crate::inversion::talbot;
use crate::singularities::{heavy_roots, psi_from_sigma};
use crate::specfun;

const SQRT_PI: f64 = 1.772_453_850_905_516;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "epsilon must lie in (0, 1), got {eps}"
        )))
    }
}

fn check_pos(v: f64, name: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// All scalings of one (t, x, ε) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeavyScales {
    pub t: f64,
    pub x: f64,
    pub eps: f64,
    pub big_t: f64,
    pub big_x: f64,
    pub z: f64,
    pub theta: f64,
    pub sigma: f64,
    pub t_star: f64,
}

impl HeavyScales {
    pub fn new(t: f64, x: f64, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        if !(t.is_finite() && x.is_finite() && t >= 0.0 && x >= 0.0) {
            return Err(Error::Domain(format!(
                "t and x must be finite and nonnegative (t={t}, x={x})"
            )));
        }
        let big_t = eps * t;
        let big_x = eps * x;
        let theta = eps * big_t;
        Ok(Self {
            t,
            x,
            eps,
            big_t,
            big_x,
            z: big_x / eps.sqrt(),
            theta,
            sigma: eps * theta,
            t_star: (t - x) / eps,
        })
    }
}

/// Point mass at t = x in the ε-leading transform.
pub fn ht_case1_atom(x: f64, eps: f64) -> f64 {
    eps * (-x).exp()
}

/// Numerical inversion of the ε-leading transform with the root taken at ρ = 1.
pub fn ht_case1(t: f64, x: f64, eps: f64, cfg: &InversionConfig) -> Result<DensityValue> {
    check_eps(eps)?;
    check_pos(x, "x")?;
    cfg.validate()?;
    if !(t > x) {
        return Err(Error::Domain(format!("t must exceed x (t={t}, x={x})")));
    }
    let w = t - x;
    if w < exact::MIN_WAIT {
        return Err(Error::Domain(format!(
            "t − x = {w:e} is below {:e}",
            exact::MIN_WAIT
        )));
    }
    let inv = exact::invert_heavy_leading(w, x, eps, cfg)?;
    if !(inv.err_est <= cfg.tolerance) {
        return Err(Error::Convergence {
            method: "heavy-traffic leading inversion",
            first: inv.coarse,
            second: inv.value,
        });
    }
    let mut out = DensityValue::closed_form(inv.value, "T2-case1");
    out.err_est = inv.err_est;
    Ok(out)
}

/// Two-term expansion on the time scale T = εt. The δ(T) term is reported
/// in `deficit` as its coefficient −(x+3)ε²/6.
pub fn ht_case2(big_t: f64, x: f64, eps: f64) -> Result<DensityValue> {
    check_eps(eps)?;
    check_pos(big_t, "T")?;
    check_pos(x, "x")?;
    let e = (-big_t / x).exp();
    let lead = eps / x * e;
    let corr = (x + 3.0) / 6.0 * (2.0 * x - big_t) / (x * x) * e * eps * eps;
    let mut out = DensityValue::closed_form(lead + corr, "T2-case2");
    out.deficit = -(x + 3.0) * eps * eps / 6.0;
    Ok(out)
}

/// Bessel form for T just above X.
pub fn ht_case3(big_x: f64, t_star: f64, eps: f64) -> Result<DensityValue> {
    check_eps(eps)?;
    check_pos(big_x, "X")?;
    check_pos(t_star, "T*")?;
    let z = 2.0 * (big_x * t_star).sqrt();
    let log = -big_x / eps + big_x + 0.5 * (big_x / t_star).ln() + z;
    Ok(DensityValue::closed_form(
        log.exp() * specfun::bessel_i1_scaled(z)?,
        "T2-case3",
    ))
}

/// Saddle form for 1 < T/X < ∞.
pub fn ht_case4(big_t: f64, big_x: f64, eps: f64) -> Result<DensityValue> {
    check_eps(eps)?;
    check_pos(big_x, "X")?;
    if !(big_t > big_x && big_t.is_finite()) {
        return Err(Error::Domain(format!(
            "T must exceed X (T={big_t}, X={big_x})"
        )));
    }
    let d = big_t - big_x;
    let root = (big_t * d).sqrt();
    let log = 1.5 * eps.ln() + 2.0 * (big_t.sqrt() + d.sqrt()).ln()
        - (2.0 * SQRT_PI).ln()
        - 0.75 * (big_t * d).ln()
        + big_t
        - root
        + (2.0 * root + big_x - 2.0 * big_t) / eps;
    Ok(DensityValue::closed_form(log.exp(), "T2-case4"))
}

/// Which case-5 series to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case5Form {
    Direct,
    Poisson,
    /// Direct when Z²/T ≥ 1, Poisson otherwise.
    Auto,
}

/// Theta-series form for X = √ε·Z.
pub fn ht_case5(big_t: f64, z: f64, eps: f64, form: Case5Form) -> Result<DensityValue> {
    check_eps(eps)?;
    check_pos(big_t, "T")?;
    check_pos(z, "Z")?;
    let ratio = z * z / big_t;
    let form = match form {
        Case5Form::Auto if ratio >= 1.0 => Case5Form::Direct,
        Case5Form::Auto => Case5Form::Poisson,
        f => f,
    };
    let value = match form {
        Case5Form::Direct => {
            let mut sum = 0.0;
            for n in 0..10_000u32 {
                let k = (2 * n + 1) as f64;
                let term = (-k * k * ratio / 4.0).exp();
                sum += term;
                if term <= 1e-17 * sum {
                    break;
                }
            }
            2.0 * eps.powf(1.5) / (PI * big_t).sqrt() * sum
        }
        _ => {
            let mut sum = 1.0;
            for n in 1..10_000u32 {
                let nf = n as f64;
                let sign = if n % 2 == 1 { -2.0 } else { 2.0 };
                let term = sign * (-nf * nf * PI * PI / ratio).exp();
                sum += term;
                if term.abs() <= 1e-17 * sum.abs() {
                    break;
                }
            }
            eps.powf(1.5) / z * sum
        }
    };
    Ok(DensityValue::closed_form(value, "T2-case5"))
}

/// Representation used for case 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case6Form {
    /// Contour integral inverted numerically.
    Integral,
    /// Parabolic-cylinder series.
    PcfSeries,
    /// Residue sum with the O(ε)-corrected exponent.
    Spectral,
    /// Residue sum with the leading exponent −(v²+¼) only.
    SpectralLeading,
}

impl Case6Form {
    pub fn tag(&self) -> &'static str {
        match self {
            Case6Form::Integral => "T2-case6-integral",
            Case6Form::PcfSeries => "T2-case6-pcf_series",
            Case6Form::Spectral => "T2-case6-spectral",
            Case6Form::SpectralLeading => "T2-case6-spectral_leading",
        }
    }
}

// √ξ e^{−√ξX}/((1+2√ξ)² − (1−2√ξ)²e^{−2√ξX}); even in √ξ, so any branch works
fn case6_kernel(xi: Complex64, big_x: f64) -> Complex64 {
    let w = xi.sqrt();
    let e = (-2.0 * w * big_x).exp();
    w * (-w * big_x).exp() / ((1.0 + 2.0 * w).powi(2) - (1.0 - 2.0 * w).powi(2) * e)
}

fn case6_integral(theta: f64, big_x: f64, eps: f64, cfg: &InversionConfig) -> Result<(f64, f64)> {
    let g = |xi: Complex64| case6_kernel(xi, big_x);
    let nodes = cfg.nodes.max(16);
    let f1 = talbot(g, theta, nodes, nodes, 0.0);
    let f2 = talbot(g, theta, nodes, 2 * nodes, 0.0);
    let pref = 8.0 * eps * eps * (0.5 * big_x - 0.25 * theta).exp();
    let err = pref * (f2 - f1).abs();
    if err > 1e-8 * (pref * f2).abs() + 1e-300 {
        return Err(Error::Convergence {
            method: "case-6 integral",
            first: pref * f1,
            second: pref * f2,
        });
    }
    Ok((pref * f2, err))
}

/// Maximum number of terms of the parabolic-cylinder series.
pub const PCF_TERMS: usize = 30;

/// Term n of the parabolic-cylinder series without the ε² factor.
pub fn case6_pcf_term(n: usize, theta: f64, big_x: f64) -> f64 {
    let s2t = (2.0 * theta).sqrt();
    let z = ((2 * n + 1) as f64 * big_x + theta) / s2t;
    let d = specfun::pcf_d_scaled_seq(2 * n + 2, z);
    let mut inner = 0.0;
    let mut binom = 1.0;
    let mut pw = 1.0;
    for l in 0..=2 * n {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        inner += sign * binom * pw * (4.0 / s2t * d[l] - 4.0 * d[l + 1] + s2t * d[l + 2]);
        binom *= (2 * n - l) as f64 / (l + 1) as f64;
        pw *= s2t;
    }
    // e^{(n+1)X}e^{−z²/4}D = e^{(n+1)X − z²/2}·(e^{z²/4}D)
    ((n + 1) as f64 * big_x - 0.5 * z * z).exp() * inner / (2.0 * PI).sqrt()
}

fn case6_pcf(theta: f64, big_x: f64, eps: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut last = f64::NAN;
    for n in 0..PCF_TERMS {
        let term = case6_pcf_term(n, theta, big_x);
        sum += term;
        last = term;
        if n > 0 && term.abs() < 1e-14 * sum.abs() {
            return Ok(eps * eps * sum);
        }
    }
    Err(Error::Convergence {
        method: "case-6 parabolic-cylinder series",
        first: eps * eps * (sum - last),
        second: eps * eps * sum,
    })
}

/// F̃(X; v).
pub fn f_tilde(big_x: f64, v: f64) -> f64 {
    let w = 4.0 * v * v + 1.0;
    8.0 * v * v * ((4.0 * v * v - 1.0) * (big_x * v).cos() + 4.0 * v * (big_x * v).sin())
        / (w * (w * big_x + 4.0))
        * (0.5 * big_x).exp()
}

/// r̃*(X; v) to first order in ε.
pub fn r_tilde(v: f64, eps: f64) -> f64 {
    -(v * v + 0.25) * (1.0 + 0.5 * eps)
}

/// Terms ε²F̃(X;v_n)e^{r̃*Θ} of the residue sum, until negligible.
pub fn case6_spectral_terms(theta: f64, big_x: f64, eps: f64, corrected: bool) -> Result<Vec<f64>> {
    let e = if corrected { eps } else { 0.0 };
    let need = (big_x / PI * (80.0 / theta).sqrt()).ceil() as usize + 4;
    let roots = heavy_roots(big_x, need.clamp(8, 20_000))?;
    let mut out = Vec::with_capacity(roots.roots.len());
    let mut total = 0.0f64;
    for &v in &roots.roots {
        let term = eps * eps * f_tilde(big_x, v) * (r_tilde(v, e) * theta).exp();
        out.push(term);
        total += term.abs();
        if out.len() > 2 && term.abs() < 1e-17 * total {
            break;
        }
    }
    Ok(out)
}

/// Heavy-traffic density on the scale t = Θ/ε², x = X/ε.
pub fn ht_case6(theta: f64, big_x: f64, eps: f64, form: Case6Form) -> Result<DensityValue> {
    check_eps(eps)?;
    check_pos(theta, "Θ")?;
    check_pos(big_x, "X")?;
    let mut out = DensityValue::closed_form(0.0, form.tag());
    match form {
        Case6Form::Integral => {
            let (v, err) = case6_integral(theta, big_x, eps, &InversionConfig::default())?;
            out.continuous = v;
            out.err_est = err;
        }
        Case6Form::PcfSeries => out.continuous = case6_pcf(theta, big_x, eps)?,
        Case6Form::Spectral | Case6Form::SpectralLeading => {
            let terms = case6_spectral_terms(theta, big_x, eps, form == Case6Form::Spectral)?;
            out.continuous = terms.iter().sum();
        }
    }
    Ok(out)
}

/// Closed form of the n = 0 term's inverse transform,
/// (1/2πi)∫e^{ξΘ}√ξ e^{−X√ξ}/(1+2√ξ)² dξ.
pub fn case6_first_term_closed(theta: f64, big_x: f64) -> f64 {
    let g = (-big_x * big_x / (4.0 * theta)).exp();
    let z = (big_x + theta) / (2.0 * theta.sqrt());
    g * (1.0 / (4.0 * (PI * theta).sqrt()) + theta.sqrt() / (8.0 * SQRT_PI)
        - (4.0 + big_x + theta) / 16.0 * specfun::erfcx(z).unwrap_or(f64::NAN))
}

/// Single-term limit of case 6 for X large.
pub fn ht_case6_large_x(theta: f64, big_x: f64, eps: f64) -> f64 {
    2.0 * eps * eps / (PI * theta).sqrt()
        * (0.5 * big_x - 0.25 * theta - big_x * big_x / (4.0 * theta)).exp()
}

/// Single-mode density on the scale t = σ/ε³.
pub fn ht_sigma_scale(sigma: f64, big_x: f64, eps: f64) -> Result<DensityValue> {
    check_eps(eps)?;
    check_pos(sigma, "σ")?;
    check_pos(big_x, "X")?;
    let v1 = heavy_roots(big_x, 1)?.roots[0];
    let value = eps * eps * f_tilde(big_x, v1) * (r_tilde(v1, eps) * sigma / eps).exp();
    Ok(DensityValue::closed_form(value, "T2-sigma"))
}

/// Pieces of the σ-scale Laplace evaluation at a given ψ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorrisonTerms {
    pub psi: f64,
    pub sigma: f64,
    pub f0: f64,
    pub f1: f64,
    pub f0_dd: f64,
}

impl MorrisonTerms {
    pub fn at_psi(psi: f64) -> Self {
        let h = 0.5 * psi;
        let (s, c) = h.sin_cos();
        let tan = s / c;
        let sigma = crate::singularities::sigma_of_psi(psi);
        let csc2 = 1.0 / (s * s);
        let c4 = c.powi(4);
        Self {
            psi,
            sigma,
            f0: 2.0 * psi * tan + 0.25 * sigma * csc2,
            f1: -psi * tan + 0.125 * sigma * csc2,
            f0_dd: (3.0 * (c / s) * (psi + psi.sin()) + 4.0 * c4) / (2.0 * c4),
        }
    }

    /// √(2π)ε^{3/2}cot(ψ/2)/√F₀″ · e^{−F₀/ε − F₁}.
    pub fn density(&self, eps: f64) -> f64 {
        let cot = 1.0 / (0.5 * self.psi).tan();
        (2.0 * PI).sqrt() * eps.powf(1.5) * cot / self.f0_dd.sqrt()
            * (-self.f0 / eps - self.f1).exp()
    }
}

/// Unconditional density at t = σ/ε³.
pub fn morrison_density(sigma: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let pt = psi_from_sigma(sigma)?;
    Ok(MorrisonTerms::at_psi(pt.psi).density(eps))
}

/// Constants of Pr[V > t] ~ α*exp(−β*t − γ*t^{1/3})t^{−5/6} (μ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorrisonTail {
    pub alpha_star: f64,
    /// As printed: −(ε²/4 + ε³/8).
    pub beta_star: f64,
    pub gamma_star: f64,
    pub ln_alpha_star: f64,
}

impl MorrisonTail {
    /// The positive exponential decay rate ε²/4 + ε³/8.
    pub fn decay_rate(&self) -> f64 {
        -self.beta_star
    }

    /// Tail probability with the decay rate taken as positive.
    pub fn tail(&self, t: f64) -> f64 {
        (self.ln_alpha_star
            - self.decay_rate() * t
            - self.gamma_star * t.cbrt()
            - 5.0 / 6.0 * t.ln())
        .exp()
    }
}

pub fn morrison_tail_constants(eps: f64) -> Result<MorrisonTail> {
    check_eps(eps)?;
    let ln_alpha = 14.0 / 3.0 * 2f64.ln() - 0.5 * 3f64.ln() + 5.0 / 6.0 * PI.ln() - 3.0 * eps.ln()
        + 4.0 / eps
        - 2.0;
    Ok(MorrisonTail {
        alpha_star: ln_alpha.exp(),
        beta_star: -(eps * eps / 4.0 + eps.powi(3) / 8.0),
        gamma_star: 3.0 * (0.5 * PI).powf(2.0 / 3.0) * (1.0 - eps / 6.0),
        ln_alpha_star: ln_alpha,
    })
}

/// Heavy-traffic formula selected by [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeavyCase {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
    Case6(Case6Form),
    Sigma,
}

/// Evaluate a heavy-traffic case at physical (t, x).
pub fn evaluate(
    case: HeavyCase,
    t: f64,
    x: f64,
    eps: f64,
    cfg: &InversionConfig,
) -> Result<DensityValue> {
    let sc = HeavyScales::new(t, x, eps)?;
    match case {
        HeavyCase::Case1 => ht_case1(t, x, eps, cfg),
        HeavyCase::Case2 => ht_case2(sc.big_t, x, eps),
        HeavyCase::Case3 => ht_case3(sc.big_x, sc.t_star, eps),
        HeavyCase::Case4 => ht_case4(sc.big_t, sc.big_x, eps),
        HeavyCase::Case5 => ht_case5(sc.big_t, sc.z, eps, Case5Form::Auto),
        HeavyCase::Case6(form) => ht_case6(sc.theta, sc.big_x, eps, form),
        HeavyCase::Sigma => ht_sigma_scale(sc.sigma, sc.big_x, eps),
    }
}
