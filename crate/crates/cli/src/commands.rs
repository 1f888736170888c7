use std::io::Write;

use mm1ps::exact::{atom_mass, invert_density, point_mass};
use mm1ps::regimes_fixed::{self, classify, flatto_tail, FixedRegime, Thresholds};
use mm1ps::regimes_heavy::{self, morrison_tail_constants, Case6Form, HeavyCase};
use mm1ps::simulator::{empirical_density, empirical_density_with, sample_sojourn, SimConfig};
use mm1ps::singularities::dominant_singularity;
use mm1ps::{par, DensityValue, InversionConfig, ModelParams};
use serde::Serialize;

use crate::args::{Case6Arg, DensityArgs, Format, Method, SimulateArgs, Table1Args, TailArgs};
use crate::output::{parse_grid, write_records, DensityRecord, NamedValue, Table1Record};
use crate::{table1, CliError};

/// Tolerance on u and v against the embedded table.
pub const TABLE_TOL: f64 = 1.5e-4;

fn params(rho: f64) -> Result<ModelParams, CliError> {
    ModelParams::new(rho).map_err(|e| CliError::Usage(e.to_string()))
}

fn case6_form(f: Case6Arg) -> Case6Form {
    match f {
        Case6Arg::Integral => Case6Form::Integral,
        Case6Arg::PcfSeries => Case6Form::PcfSeries,
        Case6Arg::Spectral => Case6Form::Spectral,
    }
}

/// Evaluate one density point with the requested method.
pub fn evaluate(
    method: Method,
    t: f64,
    x: f64,
    p: &ModelParams,
    form: Case6Arg,
) -> mm1ps::Result<DensityValue> {
    let cfg = InversionConfig::default();
    let fixed = |r: FixedRegime| regimes_fixed::evaluate(r, t, x, p);
    let heavy = |c: HeavyCase| regimes_heavy::evaluate(c, t, x, p.epsilon(), &cfg);
    match method {
        Method::Exact => invert_density(t, x, p, &cfg),
        Method::Auto => match classify(t, x, p, &Thresholds::default()) {
            Some(r) => fixed(r),
            None => invert_density(t, x, p, &cfg),
        },
        Method::T1Case1 => fixed(FixedRegime::Bessel),
        Method::T1Case2 => fixed(FixedRegime::Saddle),
        Method::T1Case3 => fixed(FixedRegime::Series),
        Method::T1Case4 => fixed(FixedRegime::Spectral),
        Method::Match => fixed(FixedRegime::Matching),
        Method::T2Case1 => heavy(HeavyCase::Case1),
        Method::T2Case2 => heavy(HeavyCase::Case2),
        Method::T2Case3 => heavy(HeavyCase::Case3),
        Method::T2Case4 => heavy(HeavyCase::Case4),
        Method::T2Case5 => heavy(HeavyCase::Case5),
        Method::T2Case6 => heavy(HeavyCase::Case6(case6_form(form))),
        Method::T2Sigma => heavy(HeavyCase::Sigma),
    }
}

pub fn density(a: &DensityArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = params(a.rho)?;
    if !(a.x > 0.0 && a.x.is_finite()) {
        return Err(CliError::Usage(format!(
            "--x must be positive, got {}",
            a.x
        )));
    }
    let times = match (&a.t, &a.t_grid) {
        (Some(t), None) => vec![*t],
        (None, Some(g)) => parse_grid(g)?,
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --t and --t-grid".into(),
            ))
        }
    };
    if let Some(&t) = times.iter().find(|&&t| !(t >= a.x)) {
        return Err(CliError::Usage(format!(
            "t = {t} lies below the service requirement x = {}",
            a.x
        )));
    }
    let results = par::map(&times, |&t| {
        if t == a.x {
            let mut v = DensityValue::closed_form(0.0, "atom");
            v.atom = atom_mass(a.x, &p);
            return Ok(v);
        }
        let mut v = evaluate(a.method, t, a.x, &p, a.case6_form)?;
        // t = (n+1)x also carries a point mass
        let k = (t / a.x).round();
        if k >= 2.0 && (t - k * a.x).abs() <= 1e-12 * t {
            v.atom = point_mass(k as usize - 1, a.x, &p);
        }
        Ok(v)
    });
    let mut rows = Vec::with_capacity(times.len());
    for (&t, r) in times.iter().zip(results) {
        let v = r.map_err(|e| CliError::numeric(a.method.name(), e))?;
        rows.push(DensityRecord {
            t,
            x: a.x,
            rho: a.rho,
            method: a.method.name().to_string(),
            value: v.continuous,
            atom: v.atom,
            err_est: v.err_est,
            regime: v.regime.to_string(),
        });
    }
    write_records(out, &rows, a.format)
}

pub fn table(a: &Table1Args, out: &mut dyn Write) -> Result<(), CliError> {
    let cells = table1::cells();
    let mut grid: Vec<(f64, f64)> = Vec::new();
    match (&a.rho_list, &a.x_list) {
        (None, None) => grid.extend(cells.iter().map(|c| (c.rho, c.x))),
        (rl, xl) => {
            let mut rhos: Vec<f64> = cells.iter().map(|c| c.rho).collect();
            rhos.dedup();
            let mut xs: Vec<f64> = cells.iter().map(|c| c.x).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            for &r in rl.as_ref().unwrap_or(&rhos) {
                for &x in xl.as_ref().unwrap_or(&xs) {
                    grid.push((r, x));
                }
            }
        }
    }
    for &(r, x) in &grid {
        params(r)?;
        if !(x > 0.0) {
            return Err(CliError::Usage(format!("x must be positive, got {x}")));
        }
    }
    let results = par::map(&grid, |&(r, x)| {
        dominant_singularity(x, &ModelParams::new(r)?)
    });
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (&(rho, x), res) in grid.iter().zip(results) {
        let s = res.map_err(|e| CliError::numeric("table1", e))?;
        let cell = table1::lookup(rho, x);
        let abs_err = cell.map(|c| (s.u - c.u).abs().max((s.v - c.v).abs()));
        if abs_err.is_some_and(|e| e > TABLE_TOL) {
            failed.push(format!("rho={rho} x={x}"));
        }
        rows.push(Table1Record {
            rho,
            x,
            u: s.u,
            v: s.v,
            r_star: s.r_star,
            u_table: cell.map(|c| c.u),
            v_table: cell.map(|c| c.v),
            abs_err,
        });
    }
    write_records(out, &rows, a.format)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!(
            "table cells off by more than {TABLE_TOL}: {}",
            failed.join(", ")
        )))
    }
}

pub fn tail(a: &TailArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let nv = |name: &str, value: f64| NamedValue {
        name: name.to_string(),
        value,
    };
    let mut rows = Vec::new();
    if let Some(rho) = a.rho {
        let p = params(rho)?;
        let (c, _) = flatto_tail(1.0, &p).map_err(|e| CliError::numeric("tail", e))?;
        rows.extend([
            nv("A", c.a),
            nv("B", c.b),
            nv("C_star", c.c_star),
            nv("ros_prefactor", c.ros_prefactor()),
        ]);
        if let Some(t) = a.t {
            if !(t > 0.0) {
                return Err(CliError::Usage(format!("--t must be positive, got {t}")));
            }
            rows.push(nv("density", c.c_star * c.shape(t)));
        }
    } else if let Some(eps) = a.eps {
        let m = morrison_tail_constants(eps).map_err(|e| CliError::Usage(e.to_string()))?;
        rows.extend([
            nv("alpha_star", m.alpha_star),
            nv("beta_star", m.beta_star),
            nv("gamma_star", m.gamma_star),
            nv("decay_rate", m.decay_rate()),
        ]);
        if let Some(t) = a.t {
            if !(t > 0.0) {
                return Err(CliError::Usage(format!("--t must be positive, got {t}")));
            }
            rows.push(nv("tail_probability", m.tail(t)));
        }
    }
    write_records(out, &rows, a.format)
}

#[derive(Debug, Serialize)]
struct SimOutput<'a> {
    summary: &'a [NamedValue],
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<&'a [DensityRecord]>,
}

pub fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = SimConfig {
        rho: a.rho,
        x: a.x,
        replications: a.reps,
        seed: a.seed,
        max_events: a.max_events,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let grid = a.grid.as_deref().map(parse_grid).transpose()?;
    let s = sample_sojourn(&cfg).map_err(|e| CliError::numeric("simulate", e))?;
    let (atom, atom_se) = s.atom_estimate();
    let nv = |name: &str, value: f64| NamedValue {
        name: name.to_string(),
        value,
    };
    let summary = vec![
        nv("replications", a.reps as f64),
        nv("mean", s.mean),
        nv("variance", s.variance),
        nv("ci_halfwidth", s.ci_halfwidth),
        nv("atom", atom),
        nv("atom_stderr", atom_se),
    ];
    let density = match &grid {
        Some(g) => {
            let est = match a.bandwidth {
                Some(h) => empirical_density_with(&s, g, h),
                None => empirical_density(&s, g),
            }
            .map_err(|e| CliError::numeric("simulate", e))?;
            Some(
                est.iter()
                    .map(|d| DensityRecord {
                        t: d.t,
                        x: a.x,
                        rho: a.rho,
                        method: "simulate".into(),
                        value: d.value,
                        atom,
                        err_est: d.stderr,
                        regime: "empirical".into(),
                    })
                    .collect::<Vec<_>>(),
            )
        }
        None => None,
    };
    match a.format {
        Format::Csv => {
            write_records(out, &summary, Format::Csv)?;
            if let Some(d) = &density {
                writeln!(out)?;
                write_records(out, d, Format::Csv)?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(
                &mut *out,
                &SimOutput {
                    summary: &summary,
                    density: density.as_deref(),
                },
            )?;
            writeln!(out)?;
        }
    }
    Ok(())
}
