//! Exact conditional and unconditional sojourn-time densities by numerical
//! inversion of the waiting-time transform.
//!
//! The sojourn time is V(x) = x + W(x). Besides the well known point mass
//! (1−ρ)e^{−ρx} at t = x, the distribution of V(x) has smaller point masses
//! at every t = (n+1)x: the tagged customer finds n customers whose
//! remaining work all exceeds x and nobody arrives for (n+1)x time units.
//! Their masses are m_n = (1−ρ)e^{−ρx}·ρⁿe^{−n(1+ρ)x}. The transform carries
//! them as terms m_n·e^{−nxs}, and the continuous density jumps there.
//! `continuous` in every result here excludes all of these masses.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cx::{exp_m1, ln_1p};
use crate::error::{Error, Result};
use crate::inversion::{bromwich_euler, talbot};
use crate::par;
use crate::quad;

/// Traffic intensity (service rate fixed at 1) and ε = 1 − ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    rho: f64,
    epsilon: f64,
}

impl ModelParams {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Domain(format!(
                "traffic intensity must lie in (0, 1), got {rho}"
            )));
        }
        Ok(Self {
            rho,
            epsilon: 1.0 - rho,
        })
    }

    /// Build from ε directly; ε is kept as given so that tiny ε loses no digits.
    pub fn from_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(Self {
            rho: 1.0 - epsilon,
            epsilon,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sqrt_rho(&self) -> f64 {
        self.rho.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contour {
    FixedTalbot,
    ShiftedBromwichEuler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    pub contour: Contour,
    pub nodes: usize,
    /// Real shift of the contour; `None` picks it from the transform.
    pub abscissa_shift: Option<f64>,
    /// Absolute error allowed on the inverted density.
    pub tolerance: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            contour: Contour::FixedTalbot,
            nodes: 48,
            abscissa_shift: None,
            tolerance: 1e-9,
        }
    }
}

impl InversionConfig {
    pub fn euler() -> Self {
        Self {
            contour: Contour::ShiftedBromwichEuler,
            nodes: 38,
            tolerance: 1e-7,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 {
            return Err(Error::Domain(format!(
                "need at least 16 nodes, got {}",
                self.nodes
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if let Some(a) = self.abscissa_shift {
            if !a.is_finite() {
                return Err(Error::Domain("abscissa shift must be finite".into()));
            }
        }
        Ok(())
    }
}

/// A density evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    /// Continuous part of the density.
    pub continuous: f64,
    /// Point mass at t = x; zero whenever another t is queried.
    pub atom: f64,
    /// Name of the formula that produced the value.
    pub regime: &'static str,
    /// Error estimate for `continuous` (zero for closed forms).
    pub err_est: f64,
    /// Set when small negative quadrature noise was clamped to zero.
    pub clamped: bool,
    /// Coefficient of a δ term that is reported instead of evaluated.
    pub deficit: f64,
}

impl DensityValue {
    pub fn closed_form(continuous: f64, regime: &'static str) -> Self {
        Self {
            continuous,
            atom: 0.0,
            regime,
            err_est: 0.0,
            clamped: false,
            deficit: 0.0,
        }
    }
}

fn check_finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be finite, got {v}")))
    }
}

// root of ρr² − (1+ρ+s)r + 1 = 0 that vanishes as s → ∞; the cut is [s₊, s₋]
fn small_root(s: Complex64, p: &ModelParams) -> Complex64 {
    let w = s + 1.0 + p.rho;
    let q2 = 2.0 * p.sqrt_rho();
    let sq = (w - q2).sqrt() * (w + q2).sqrt();
    2.0 / (w + sq)
}

/// Root r(s; ρ) of the transform quadratic with |r| ≤ 1/√ρ.
pub fn root_r(s: Complex64, p: &ModelParams) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("root_r needs finite s, got {s}")));
    }
    Ok(small_root(s, p))
}

/// Transform evaluated with an arbitrary root of the quadratic; the formula
/// is invariant under r → 1/(ρr) so either root gives the same value.
pub fn waiting_lt_with_root(r: Complex64, s: Complex64, x: f64, p: &ModelParams) -> Complex64 {
    let rho = p.rho;
    let _ = s;
    let e = (-x * (1.0 - rho * r * r) / r).exp();
    let num = (1.0 - rho) * (1.0 - rho * r * r) * (-rho * (1.0 - r) * x).exp();
    let den = (1.0 - rho * r).powi(2) - rho * (1.0 - r).powi(2) * e;
    num / den
}

// ln(L/c) with c = (1−ρ)e^{−ρx}, plus the denominator magnitude
fn log_ratio(s: Complex64, x: f64, p: &ModelParams) -> (Complex64, f64) {
    let rho = p.rho;
    let mut r = small_root(s, p);
    let mut q = 1.0 / r - rho * r;
    if q.re < 0.0 {
        r = 1.0 / (rho * r);
        q = -q;
    }
    let e = (-x * q).exp();
    let dm1 = rho * r * (rho * r - 2.0) - rho * (1.0 - r).powi(2) * e;
    let lr = ln_1p(-rho * r * r) + rho * r * x - ln_1p(dm1);
    (lr, (dm1 + 1.0).norm())
}

// c·(e^L − 1) from ln c, without underflow in c or overflow in e^L
fn scaled_exp_m1(ln_c: f64, l: Complex64) -> Complex64 {
    if l.re > 1.0 {
        (l + ln_c).exp() - ln_c.exp()
    } else {
        ln_c.exp() * exp_m1(l)
    }
}

fn ln_atom_mass(x: f64, p: &ModelParams) -> f64 {
    p.epsilon.ln() - p.rho * x
}

/// E[e^{−sW(x)}].
pub fn waiting_lt(s: Complex64, x: f64, p: &ModelParams) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("waiting_lt needs finite s, got {s}")));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "waiting_lt needs finite x ≥ 0, got {x}"
        )));
    }
    let (lr, dmag) = log_ratio(s, x, p);
    if dmag < 1e-300 {
        let nearest = if x > 0.0 {
            locate_pole(x, p).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        return Err(Error::PoleProximity { s, nearest });
    }
    Ok(atom_mass(x, p) * lr.exp())
}

/// Point mass (1−ρ)e^{−ρx} at t = x.
pub fn atom_mass(x: f64, p: &ModelParams) -> f64 {
    (1.0 - p.rho) * (-p.rho * x).exp()
}

/// Mass of the point at t = (n+1)x.
pub fn point_mass(n: usize, x: f64, p: &ModelParams) -> f64 {
    let nf = n as f64;
    atom_mass(x, p) * (nf * p.rho.ln() - nf * x * (1.0 + p.rho)).exp()
}

/// All point masses (location t, mass) with t ≤ t_max, t = x first.
pub fn point_masses(x: f64, p: &ModelParams, t_max: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if !(x > 0.0) {
        return out;
    }
    let mut n = 0usize;
    while (n as f64 + 1.0) * x <= t_max && n < 1_000_000 {
        let m = point_mass(n, x, p);
        if m == 0.0 {
            break;
        }
        out.push(((n as f64 + 1.0) * x, m));
        n += 1;
    }
    out
}

/// Total mass of all point masses, Σ m_n.
pub fn total_point_mass(x: f64, p: &ModelParams) -> f64 {
    atom_mass(x, p) / (1.0 - p.rho * (-x * (1.0 + p.rho)).exp())
}

/// Real pole of the transform with the largest real part, located by a sign
/// scan of Re(1/L) along the real axis.
pub fn locate_pole(x: f64, p: &ModelParams) -> Result<f64> {
    let rho = p.rho;
    let q = p.sqrt_rho();
    let g = |s: f64| (-log_ratio(Complex64::new(s, 0.0), x, p).0).exp().re;
    let sv = |v: f64| -1.0 - rho + 2.0 * q * v.cos();
    let nv = (64.0 * (1.0 + q * x)) as usize + 64;
    let mut prev = 1e-9;
    for k in 1..=nv {
        let v = if k == nv {
            PI * (1.0 - 1e-12)
        } else {
            PI * k as f64 / nv as f64
        };
        if g(sv(v)) <= 0.0 {
            let vm = crate::roots::bisect(|v| g(sv(v)), prev, v, 1e-16);
            return Ok(sv(vm));
        }
        prev = v;
    }
    let su = |u: f64| -1.0 - rho - 2.0 * q * u.cosh();
    let mut u = 1e-9;
    let mut du = 0.01;
    while u < 700.0 {
        let un = u + du;
        if g(su(un)) <= 0.0 {
            let um = crate::roots::bisect(|u| g(su(u)), u, un, 1e-16 * un.max(1.0));
            return Ok(su(um));
        }
        u = un;
        du *= 1.05;
    }
    Err(Error::Solver {
        what: "transform pole scan",
        lo: su(700.0),
        hi: -(1.0 - q).powi(2),
    })
}

/// Which transform was inverted to produce a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// L(s) − (1−ρ)e^{−ρx}, contour shifted to the rightmost pole.
    Direct,
    /// Sum over point-mass generations, each inverted separately.
    Decomposed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inverted {
    pub value: f64,
    pub coarse: f64,
    pub err_est: f64,
    pub route: Route,
}

// Generation n of the point-mass expansion: Φ_n(s) = e^{−nxs}·m_n·(1 + ψ̂_n(s)).
// The root uses `rho`; `ln_mass0` is the log of the n = 0 mass. Both come from the model
// except in the heavy-traffic limit, where the root is taken at ρ = 1.
#[derive(Debug, Clone, Copy)]
struct Generations {
    rho: f64,
    x: f64,
    ln_mass0: f64,
}

impl Generations {
    fn of(x: f64, p: &ModelParams) -> Self {
        Self {
            rho: p.rho,
            x,
            ln_mass0: ln_atom_mass(x, p),
        }
    }

    fn root(&self, s: Complex64) -> Complex64 {
        let w = s + 1.0 + self.rho;
        let q2 = 2.0 * self.rho.sqrt();
        2.0 / (w + (w - q2).sqrt() * (w + q2).sqrt())
    }

    fn ln_mass(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.ln_mass0 + nf * self.rho.ln() - nf * self.x * (1.0 + self.rho)
    }

    // ln(Φ_n/m_n)
    fn log_ratio(&self, s: Complex64, n: usize) -> Complex64 {
        let rho = self.rho;
        let r = self.root(s);
        let nf = n as f64;
        let mut lr = ln_1p(-rho * r * r) + rho * r * self.x * (2.0 * nf + 1.0)
            - (2.0 * nf + 2.0) * ln_1p(-rho * r);
        if n > 0 {
            lr += 2.0 * nf * ln_1p(-r);
        }
        lr
    }
}

const MAX_GENERATIONS: usize = 20_000;

fn decomposed<F>(w: f64, gen: &Generations, shift: f64, mut kernel: F) -> Result<(f64, f64, f64)>
where
    F: FnMut(&dyn Fn(Complex64) -> Complex64, f64, f64) -> (f64, f64),
{
    let x = gen.x;
    let count = (w / x).ceil() as usize;
    if count > MAX_GENERATIONS {
        return Err(Error::Convergence {
            method: "decomposed inversion (too many point masses)",
            first: f64::NAN,
            second: f64::NAN,
        });
    }
    let (mut fine, mut coarse, mut scale) = (0.0, 0.0, 0.0);
    for n in 0..count {
        let tau = w - n as f64 * x;
        if tau <= 0.0 {
            break;
        }
        let ln_mn = gen.ln_mass(n);
        let weight = (ln_mn + shift * tau).exp();
        if n >= 2 && weight < 1e-18 * scale {
            break;
        }
        let g = move |s: Complex64| scaled_exp_m1(ln_mn, gen.log_ratio(s, n));
        let (c, f) = kernel(&g, tau, shift);
        coarse += c;
        fine += f;
        scale += weight;
    }
    Ok((coarse, fine, scale))
}

// invert the generation sum with the contour from `cfg`
fn invert_generations(
    w: f64,
    gen: &Generations,
    shift: f64,
    cfg: &InversionConfig,
) -> Result<Inverted> {
    let nodes = cfg.nodes;
    match cfg.contour {
        Contour::FixedTalbot => {
            let (c1, c2, scale) = decomposed(w, gen, shift, |g, tau, sh| {
                (
                    talbot(g, tau, nodes, nodes, sh),
                    talbot(g, tau, nodes, 2 * nodes, sh),
                )
            })?;
            let err_est = (c2 - c1).abs() + 4e-13 * (scale + c2.abs());
            Ok(Inverted {
                value: c2,
                coarse: c1,
                err_est,
                route: Route::Decomposed,
            })
        }
        Contour::ShiftedBromwichEuler => {
            let (c1, c2, _) = decomposed(w, gen, shift, |g, tau, sh| {
                (
                    bromwich_euler(g, tau, nodes, 11, sh),
                    bromwich_euler(g, tau, 2 * nodes, 11, sh),
                )
            })?;
            Ok(Inverted {
                value: c2,
                coarse: c1,
                err_est: (c2 - c1).abs(),
                route: Route::Decomposed,
            })
        }
    }
}

/// Continuous part of the ε-leading heavy-traffic transform
/// ε(1−r₀²)e^{−(1−r₀)x}/((1−r₀)²(1−e^{−x(1−r₀²)/r₀})), r₀ the ρ = 1 root,
/// inverted at waiting time w. The point mass at w = 0 is εe^{−x}.
pub fn invert_heavy_leading(
    w: f64,
    x: f64,
    epsilon: f64,
    cfg: &InversionConfig,
) -> Result<Inverted> {
    let gen = Generations {
        rho: 1.0,
        x,
        ln_mass0: epsilon.ln() - x,
    };
    invert_generations(w, &gen, cfg.abscissa_shift.unwrap_or(0.0), cfg)
}

// error of the direct route from the point masses beyond w
fn leak_estimate(w: f64, x: f64, p: &ModelParams, a: f64) -> f64 {
    let n0 = (w / x).ceil().max(1.0);
    let ratio = p.rho * (-x * (1.0 + p.rho) - a * x).exp();
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let first = point_mass(n0 as usize, x, p) * (-a * (n0 * x - w)).exp();
    first / (1.0 - ratio)
}

/// Inverse transform of the continuous part at waiting time w > 0.
pub fn invert_waiting(w: f64, x: f64, p: &ModelParams, cfg: &InversionConfig) -> Result<Inverted> {
    let pole = match (cfg.contour, cfg.abscissa_shift) {
        (Contour::FixedTalbot, None) => locate_pole(x, p)?,
        _ => f64::NAN,
    };
    invert_waiting_at(w, x, p, cfg, pole)
}

/// Largest node count tried when the configured one does not converge.
pub const MAX_NODES: usize = 1024;

// as invert_waiting with the pole abscissa supplied by the caller
fn invert_waiting_at(
    w: f64,
    x: f64,
    p: &ModelParams,
    cfg: &InversionConfig,
    pole: f64,
) -> Result<Inverted> {
    match cfg.contour {
        Contour::FixedTalbot => {
            // large x needs more nodes; double until the estimate settles
            let mut base = cfg.nodes;
            loop {
                let res = talbot_waiting(w, x, p, cfg, pole, base);
                let done = matches!(&res, Ok(inv) if inv.err_est <= cfg.tolerance);
                if done || 2 * base > MAX_NODES.max(cfg.nodes) {
                    return res;
                }
                base *= 2;
            }
        }
        Contour::ShiftedBromwichEuler => {
            let shift = cfg
                .abscissa_shift
                .unwrap_or(crate::singularities::s_minus(p));
            invert_generations(w, &Generations::of(x, p), shift, cfg)
        }
    }
}

fn talbot_waiting(
    w: f64,
    x: f64,
    p: &ModelParams,
    cfg: &InversionConfig,
    pole: f64,
    base: usize,
) -> Result<Inverted> {
    let ln_c = ln_atom_mass(x, p);
    let a = cfg.abscissa_shift.unwrap_or(pole);
    let g = |s: Complex64| scaled_exp_m1(ln_c, log_ratio(s, x, p).0);
    let d1 = talbot(g, w, base, base, a);
    let d2 = talbot(g, w, base, 2 * base, a);
    let est_d = (d2 - d1).abs() + leak_estimate(w, x, p, a);
    if est_d <= 1e-12 * d2.abs() {
        return Ok(Inverted {
            value: d2,
            coarse: d1,
            err_est: est_d,
            route: Route::Direct,
        });
    }
    let shift = cfg
        .abscissa_shift
        .unwrap_or(crate::singularities::s_minus(p));
    let cfg_n = InversionConfig {
        nodes: base,
        ..*cfg
    };
    match invert_generations(w, &Generations::of(x, p), shift, &cfg_n) {
        Ok(dec) if dec.err_est < est_d || !est_d.is_finite() => Ok(dec),
        Ok(_) => Ok(Inverted {
            value: d2,
            coarse: d1,
            err_est: est_d,
            route: Route::Direct,
        }),
        Err(e) if !est_d.is_finite() => Err(e),
        Err(_) => Ok(Inverted {
            value: d2,
            coarse: d1,
            err_est: est_d,
            route: Route::Direct,
        }),
    }
}

/// Smallest t − x accepted by [`invert_density`].
pub const MIN_WAIT: f64 = 1e-8;

/// Continuous part of p(t|x) for t > x.
pub fn invert_density(
    t: f64,
    x: f64,
    p: &ModelParams,
    cfg: &InversionConfig,
) -> Result<DensityValue> {
    check_finite(t, "t")?;
    check_finite(x, "x")?;
    cfg.validate()?;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    if !(t > x) {
        return Err(Error::Domain(format!("t must exceed x (t={t}, x={x})")));
    }
    let w = t - x;
    if w < MIN_WAIT {
        return Err(Error::Domain(format!(
            "t − x = {w:e} is below {MIN_WAIT:e}; use the Bessel formula regime1_bessel there"
        )));
    }
    let inv = invert_waiting(w, x, p, cfg)?;
    if !(inv.err_est <= cfg.tolerance) {
        return Err(Error::Convergence {
            method: match cfg.contour {
                Contour::FixedTalbot => "fixed-talbot",
                Contour::ShiftedBromwichEuler => "shifted-bromwich-euler",
            },
            first: inv.coarse,
            second: inv.value,
        });
    }
    let mut out = DensityValue::closed_form(inv.value, "exact-inversion");
    out.err_est = inv.err_est;
    if out.continuous < 0.0 && out.continuous >= -cfg.tolerance {
        out.continuous = 0.0;
        out.clamped = true;
    }
    Ok(out)
}

/// Limit of the continuous density as t ↓ x.
pub fn density_at_support_edge(x: f64, p: &ModelParams) -> f64 {
    atom_mass(x, p) * p.rho * (x + 2.0)
}

// continuous density in w with the support edge filled by its limit
fn continuous_w(w: f64, x: f64, p: &ModelParams, cfg: &InversionConfig, pole: f64) -> Result<f64> {
    if w < MIN_WAIT {
        return Ok(density_at_support_edge(x, p));
    }
    Ok(invert_waiting_at(w, x, p, cfg, pole)?.value)
}

/// Moments of the continuous part over t ∈ (x, ∞), in the waiting time w = t − x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// ∫ continuous dt.
    pub mass: f64,
    /// ∫ (t − x)·continuous dt.
    pub mean_wait: f64,
    /// ∫ (t − x)²·continuous dt.
    pub second_wait: f64,
    pub err_est: f64,
}

/// Integrate the continuous density and its first two waiting-time moments.
///
/// The integration range is split at every point-mass location so that no
/// panel straddles a jump.
pub fn continuous_moments(x: f64, p: &ModelParams, cfg: &InversionConfig) -> Result<Moments> {
    check_finite(x, "x")?;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    cfg.validate()?;
    let pole = locate_pole(x, p)?;
    let decay = -pole;
    let w_max = 48.0 / decay + 4.0 * x;
    let step = x.min(4.0 / decay);
    let mut panels = Vec::new();
    let mut lo = 0.0;
    while lo < w_max {
        let next_atom = ((lo / x).floor() + 1.0) * x;
        let hi = (lo + step).min(next_atom);
        panels.push((lo, hi));
        lo = hi;
    }
    let parts = par::map(&panels, |&(a, b)| -> Result<[f64; 4]> {
        let mut err = None;
        let mut memo = std::collections::HashMap::new();
        let mut f = |w: f64| {
            *memo
                .entry(w.to_bits())
                .or_insert_with(|| match continuous_w(w, x, p, cfg, pole) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                })
        };
        let mut vals = [0.0; 4];
        // the integrand carries ~1e-13 inversion noise; ask for no more than that
        let tol = 1e-12 * (b - a);
        let m0 = quad::integrate(&mut f, a, b, tol, 1e-10, 50);
        let m1 = quad::integrate(|w| w * f(w), a, b, tol * b, 1e-10, 50);
        let m2 = quad::integrate(|w| w * w * f(w), a, b, tol * b * b, 1e-10, 50);
        drop(f);
        vals[0] = m0.value;
        vals[1] = m1.value;
        vals[2] = m2.value;
        vals[3] = m0.error;
        match err {
            Some(e) => Err(e),
            None => Ok(vals),
        }
    });
    let mut acc = [0.0; 4];
    for part in parts {
        let v = part?;
        for k in 0..4 {
            acc[k] += v[k];
        }
    }
    Ok(Moments {
        mass: acc[0],
        mean_wait: acc[1],
        second_wait: acc[2],
        err_est: acc[3],
    })
}

/// Mean of V(x) including every point mass.
pub fn mean_sojourn(x: f64, p: &ModelParams, cfg: &InversionConfig) -> Result<f64> {
    let m = continuous_moments(x, p, cfg)?;
    // Σ n·x·m_n with m_n = m_0 qⁿ
    let q = p.rho * (-x * (1.0 + p.rho)).exp();
    let atoms = atom_mass(x, p) * x * q / (1.0 - q).powi(2);
    Ok(x + m.mean_wait + atoms)
}

/// Combined contribution of all point masses to the unconditional density:
/// Σ_n (1−ρ)ρⁿe^{−(1+ρ)t}/(n+1) = (1−ρ)e^{−(1+ρ)t}·(−ln(1−ρ)/ρ).
pub fn unconditional_point_mass_term(t: f64, p: &ModelParams) -> f64 {
    let rho = p.rho;
    p.epsilon * (-(1.0 + rho) * t).exp() * (-(-rho).ln_1p() / rho)
}

/// Unconditional sojourn density p(t) = ∫₀^∞ e^{−x} p(t|x) dx.
pub fn unconditional_density(t: f64, p: &ModelParams, cfg: &InversionConfig) -> Result<f64> {
    check_finite(t, "t")?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    cfg.validate()?;
    let lines = unconditional_point_mass_term(t, p);
    let integrand = |x: f64| -> Result<f64> {
        let weight = (-x).exp();
        if x >= t || weight == 0.0 {
            return Ok(0.0);
        }
        let pole = match (cfg.contour, cfg.abscissa_shift) {
            (Contour::FixedTalbot, None) => locate_pole(x, p)?,
            _ => f64::NAN,
        };
        Ok(weight * continuous_w(t - x, x, p, cfg, pole)?)
    };
    // breakpoints at the jumps x = t/(k+1) and at the coarse peak
    let mut bps = vec![0.0, t];
    for k in 1..=64 {
        let b = t / (k as f64 + 1.0);
        if b < 1e-3 * t {
            break;
        }
        bps.push(b);
    }
    // the mass sits near x = (2π²t/ρ)^{1/3} for large t
    let span = t.min(3.0 * (2.0 * PI * PI * t / p.rho).cbrt() + 10.0);
    let coarse: Vec<f64> = (1..64).map(|i| span * i as f64 / 64.0).collect();
    let vals = par::map(&coarse, |&x| integrand(x).unwrap_or(0.0));
    if let Some((i, _)) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
        bps.push(coarse[i]);
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let panels: Vec<(f64, f64)> = bps.windows(2).map(|w| (w[0], w[1])).collect();
    // the integrand carries inversion noise, so a purely relative target can
    // stall on panels where it is tiny; bound each panel by a share of the total
    let rough = vals.iter().sum::<f64>() * span / 64.0 + lines;
    let abs_tol = 1e-11 * rough / panels.len() as f64;
    let parts = par::map(&panels, |&(a, b)| -> Result<f64> {
        let mut err = None;
        let est = quad::integrate(
            |x| match integrand(x) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            a,
            b,
            abs_tol.max(1e-300),
            1e-10,
            400,
        );
        match err {
            Some(e) => Err(e),
            None => Ok(est.value),
        }
    });
    let mut total = lines;
    for v in parts {
        total += v?;
    }
    Ok(total)
}
