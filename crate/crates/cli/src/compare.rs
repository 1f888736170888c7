//! Cross-oracle comparisons behind `mm1ps compare`.

use mm1ps::exact::invert_density;
use mm1ps::regimes_fixed::{
    matching_formula_ln, regime1_bessel, regime1_bessel_ln, regime2_saddle, regime2_saddle_ln,
    regime3_series, regime3_series_ln, regime4_spectral, SeriesForm,
};
use mm1ps::regimes_heavy::{
    ht_case1, ht_case2, ht_case3, ht_case4, ht_case5, ht_case6, ht_case6_large_x, Case5Form,
    Case6Form,
};
use mm1ps::{par, InversionConfig, ModelParams, Result};

use crate::args::Suite;
use crate::output::CheckRecord;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// relative error from two logarithms
fn rel_ln(la: f64, lb: f64) -> f64 {
    (la - lb).exp_m1().abs()
}

fn rho(r: f64) -> ModelParams {
    ModelParams::new(r).expect("valid load")
}

fn exact(t: f64, x: f64, r: f64) -> Result<f64> {
    Ok(invert_density(t, x, &rho(r), &InversionConfig::default())?.continuous)
}

pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub tolerance: f64,
    pub observed: fn() -> Result<f64>,
}

pub fn theorem1() -> Vec<Check> {
    vec![
        Check {
            suite: "theorem1",
            name: "T1-case1 vs exact (rho=0.5 x=40 t=40.1)",
            tolerance: 0.01,
            observed: || {
                Ok(rel(
                    regime1_bessel(40.1, 40.0, &rho(0.5))?.continuous,
                    exact(40.1, 40.0, 0.5)?,
                ))
            },
        },
        Check {
            suite: "theorem1",
            name: "T1-case2 vs exact (rho=0.5 x=60 t=120)",
            tolerance: 0.03,
            observed: || {
                Ok(rel(
                    regime2_saddle(120.0, 60.0, &rho(0.5))?.continuous,
                    exact(120.0, 60.0, 0.5)?,
                ))
            },
        },
        Check {
            suite: "theorem1",
            name: "T1-case3 vs exact (rho=0.5 x=30 t=450)",
            tolerance: 0.05,
            observed: || {
                let v = regime3_series(450.0, 30.0, &rho(0.5), SeriesForm::Auto)?.continuous;
                Ok(rel(v, exact(450.0, 30.0, 0.5)?))
            },
        },
        Check {
            suite: "theorem1",
            name: "T1-case4 vs exact (rho=0.3 x=1 t=40)",
            tolerance: 0.05,
            observed: || {
                Ok(rel(
                    regime4_spectral(40.0, 1.0, &rho(0.3))?.continuous,
                    exact(40.0, 1.0, 0.3)?,
                ))
            },
        },
    ]
}

pub fn theorem2() -> Vec<Check> {
    vec![
        Check {
            suite: "theorem2",
            name: "T2-case1 vs exact (eps=0.01 x=1 t=3)",
            tolerance: 0.02,
            observed: || {
                let v = ht_case1(3.0, 1.0, 0.01, &InversionConfig::default())?.continuous;
                Ok(rel(v, exact(3.0, 1.0, 0.99)?))
            },
        },
        Check {
            suite: "theorem2",
            name: "T2-case2 vs exact (eps=0.01 x=2 t=150)",
            tolerance: 0.005,
            observed: || {
                Ok(rel(
                    ht_case2(1.5, 2.0, 0.01)?.continuous,
                    exact(150.0, 2.0, 0.99)?,
                ))
            },
        },
        Check {
            suite: "theorem2",
            name: "T2-case3 vs T1-case1 (eps=0.01 X=1 T*=2)",
            tolerance: 0.02,
            observed: || {
                let eps = 0.01;
                let x = 1.0 / eps;
                let v = ht_case3(1.0, 2.0, eps)?.continuous;
                Ok(rel(
                    v,
                    regime1_bessel(x + 2.0 * eps, x, &rho(1.0 - eps))?.continuous,
                ))
            },
        },
        Check {
            suite: "theorem2",
            name: "T2-case4 vs exact (eps=0.05 X=1 T=2)",
            tolerance: 0.05,
            observed: || {
                Ok(rel(
                    ht_case4(2.0, 1.0, 0.05)?.continuous,
                    exact(40.0, 20.0, 0.95)?,
                ))
            },
        },
        Check {
            suite: "theorem2",
            name: "T2-case5 direct vs dual series (Z^2/T in 0.1 1 10)",
            tolerance: 1e-10,
            observed: || {
                let mut worst = 0.0f64;
                for &r in &[0.1f64, 1.0, 10.0] {
                    let z = (2.0 * r).sqrt();
                    let d = ht_case5(2.0, z, 0.01, Case5Form::Direct)?.continuous;
                    let p = ht_case5(2.0, z, 0.01, Case5Form::Poisson)?.continuous;
                    worst = worst.max(rel(d, p));
                }
                Ok(worst)
            },
        },
        Check {
            suite: "theorem2",
            name: "T2-case6 integral vs pcf_series (X=2 Theta=3)",
            tolerance: 1e-3,
            observed: || {
                let a = ht_case6(3.0, 2.0, 0.05, Case6Form::Integral)?.continuous;
                Ok(rel(
                    a,
                    ht_case6(3.0, 2.0, 0.05, Case6Form::PcfSeries)?.continuous,
                ))
            },
        },
        Check {
            suite: "theorem2",
            name: "T2-case6 spectral (leading exponent) vs integral (X=2 Theta=3)",
            tolerance: 1e-3,
            observed: || {
                let a = ht_case6(3.0, 2.0, 0.05, Case6Form::SpectralLeading)?.continuous;
                Ok(rel(
                    a,
                    ht_case6(3.0, 2.0, 0.05, Case6Form::Integral)?.continuous,
                ))
            },
        },
    ]
}

pub fn matching() -> Vec<Check> {
    vec![
        Check {
            suite: "matching",
            name: "T1 case1 vs case2 (rho=0.5 x=1000 x(t-x)=25/rho)",
            tolerance: 0.05,
            observed: || {
                let (x, p) = (1000.0, rho(0.5));
                let t = x + 50.0 / x;
                Ok(rel_ln(
                    regime1_bessel_ln(t, x, &p)?,
                    regime2_saddle_ln(t, x, &p)?,
                ))
            },
        },
        Check {
            suite: "matching",
            name: "T1 case2 vs case3 (rho=0.5 x=100 t=5x^2/4)",
            tolerance: 0.10,
            observed: || {
                let (x, p) = (100.0, rho(0.5));
                let t = 1.25 * x * x;
                Ok(rel_ln(
                    regime2_saddle_ln(t, x, &p)?,
                    regime3_series_ln(t, x, &p, SeriesForm::Auto)?,
                ))
            },
        },
        Check {
            suite: "matching",
            name: "T1 match vs case3 (rho=0.5 t=1e4 x=2t^(1/3))",
            tolerance: 0.10,
            observed: || {
                let (t, p) = (1e4f64, rho(0.5));
                let x = 2.0 * t.cbrt();
                Ok(rel_ln(
                    matching_formula_ln(t, x, &p)?,
                    regime3_series_ln(t, x, &p, SeriesForm::Auto)?,
                ))
            },
        },
        Check {
            suite: "matching",
            name: "T2 case2 vs case5 (eps=1e-6 Z=1 T=5)",
            tolerance: 0.01,
            observed: || {
                let eps: f64 = 1e-6;
                let a = ht_case2(5.0, 1.0 / eps.sqrt(), eps)?.continuous;
                Ok(rel(a, ht_case5(5.0, 1.0, eps, Case5Form::Auto)?.continuous))
            },
        },
        Check {
            suite: "matching",
            name: "T2 case5 vs case4 (eps=1e-8 T=1 Z^2/T=40)",
            tolerance: 0.01,
            observed: || {
                let eps: f64 = 1e-8;
                let z = 40f64.sqrt();
                let a = ht_case4(1.0, eps.sqrt() * z, eps)?.continuous;
                Ok(rel(a, ht_case5(1.0, z, eps, Case5Form::Auto)?.continuous))
            },
        },
        Check {
            suite: "matching",
            name: "T2 case5 within case6 (X=0.1 Theta=0.04)",
            tolerance: 0.02,
            observed: || {
                let (eps, bx, th): (f64, f64, f64) = (0.01, 0.1, 0.04);
                let a = ht_case6(th, bx, eps, Case6Form::Integral)?.continuous;
                Ok(rel(
                    a,
                    ht_case5(th / eps, bx / eps.sqrt(), eps, Case5Form::Auto)?.continuous,
                ))
            },
        },
        Check {
            suite: "matching",
            name: "T2 case6 vs large-X single term (X=12 Theta=3)",
            tolerance: 0.01,
            observed: || {
                let eps = 0.01;
                let a = ht_case6(3.0, 12.0, eps, Case6Form::PcfSeries)?.continuous;
                Ok(rel(ht_case6_large_x(3.0, 12.0, eps), a))
            },
        },
    ]
}

pub fn suite(s: Suite) -> Vec<Check> {
    match s {
        Suite::Theorem1 => theorem1(),
        Suite::Theorem2 => theorem2(),
        Suite::Matching => matching(),
        Suite::All => theorem1()
            .into_iter()
            .chain(theorem2())
            .chain(matching())
            .collect(),
    }
}

/// Run the checks; a failed evaluation counts as a failed check with a NaN observation.
pub fn run(checks: &[Check]) -> Vec<CheckRecord> {
    par::map(checks, |c| {
        let observed = (c.observed)().unwrap_or(f64::NAN);
        CheckRecord {
            suite: c.suite.to_string(),
            check: c.name.to_string(),
            observed,
            tolerance: c.tolerance,
            pass: observed <= c.tolerance,
        }
    })
}
