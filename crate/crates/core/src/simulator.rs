//! Event-driven simulation of a tagged customer in a stationary M/M/1-PS queue.
//!
//! The tagged customer sees N ~ Geometric(1−ρ) customers on arrival, each
//! with Exp(1) remaining work. Between events every one of the k customers
//! present is served at rate 1/k.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Exp1, Geometric};

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub rho: f64,
    pub x: f64,
    pub replications: usize,
    pub seed: u64,
    /// Events allowed per replication.
    pub max_events: u64,
}

impl SimConfig {
    pub fn new(rho: f64, x: f64, replications: usize, seed: u64) -> Self {
        Self {
            rho,
            x,
            replications,
            seed,
            max_events: 10_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Domain(format!(
                "traffic intensity must lie in (0, 1), got {}",
                self.rho
            )));
        }
        if !(self.x >= 0.0 && self.x.is_finite()) {
            return Err(Error::Domain(format!(
                "x must be finite and nonnegative, got {}",
                self.x
            )));
        }
        if self.replications == 0 {
            return Err(Error::Domain("need at least one replication".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SojournSample {
    pub x: f64,
    /// Sojourn times in replication order.
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    /// Half-width of the normal 95% interval for the mean.
    pub ci_halfwidth: f64,
}

/// Random stream of one replication.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One sojourn time.
pub fn sample_one<R: Rng>(rng: &mut R, rho: f64, x: f64, max_events: u64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let arrivals = Exp::new(rho).map_err(|e| Error::Domain(e.to_string()))?;
    let n = Geometric::new(1.0 - rho)
        .map_err(|e| Error::Domain(e.to_string()))?
        .sample(rng);
    let mut others: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let mut tagged = x;
    let mut now = 0.0;
    let mut events = 0u64;
    loop {
        events += 1;
        if events > max_events {
            return Err(Error::Runaway { events: max_events });
        }
        let k = (others.len() + 1) as f64;
        let (imin, omin) =
            others
                .iter()
                .copied()
                .enumerate()
                .fold((usize::MAX, f64::INFINITY), |acc, (i, v)| {
                    if v < acc.1 {
                        (i, v)
                    } else {
                        acc
                    }
                });
        let least = tagged.min(omin);
        let to_completion = k * least;
        let to_arrival: f64 = arrivals.sample(rng);
        #[cfg(debug_assertions)]
        let work_before = tagged + others.iter().sum::<f64>();
        if to_arrival < to_completion {
            let served = to_arrival / k;
            tagged -= served;
            for w in others.iter_mut() {
                *w -= served;
            }
            now += to_arrival;
            #[cfg(debug_assertions)]
            {
                let after = tagged + others.iter().sum::<f64>();
                debug_assert!(
                    (work_before - after - to_arrival).abs() <= 1e-9 * work_before.max(1.0)
                );
            }
            others.push(Exp1.sample(rng));
        } else {
            now += to_completion;
            if tagged <= omin {
                return Ok(now);
            }
            tagged -= least;
            for w in others.iter_mut() {
                *w -= least;
            }
            others.swap_remove(imin);
        }
    }
}

const CHUNK: usize = 4096;

/// Run all replications; output order follows the replication index.
pub fn sample_sojourn(cfg: &SimConfig) -> Result<SojournSample> {
    cfg.validate()?;
    let chunks: Vec<(usize, usize)> = (0..cfg.replications)
        .step_by(CHUNK)
        .map(|lo| (lo, (lo + CHUNK).min(cfg.replications)))
        .collect();
    let parts = par::map(&chunks, |&(lo, hi)| -> Result<Vec<f64>> {
        (lo..hi)
            .map(|i| {
                let mut rng = replication_rng(cfg.seed, i as u64);
                sample_one(&mut rng, cfg.rho, cfg.x, cfg.max_events)
            })
            .collect()
    });
    let mut values = Vec::with_capacity(cfg.replications);
    for part in parts {
        values.extend(part?);
    }
    Ok(summarize(cfg.x, values))
}

fn summarize(x: f64, values: Vec<f64>) -> SojournSample {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    SojournSample {
        x,
        mean,
        variance,
        ci_halfwidth: 1.96 * (variance / n).sqrt(),
        values,
    }
}

impl SojournSample {
    /// Fraction of sojourns equal to x and its standard error.
    pub fn atom_estimate(&self) -> (f64, f64) {
        let n = self.values.len() as f64;
        let hits = self.values.iter().filter(|&&v| v == self.x).count() as f64;
        let p = hits / n;
        (p, (p * (1.0 - p) / n).sqrt())
    }

    /// Empirical distribution function at t.
    pub fn cdf(&self, t: f64) -> f64 {
        self.values.iter().filter(|&&v| v <= t).count() as f64 / self.values.len() as f64
    }

    /// Empirical distribution function on a sorted grid, in one pass.
    pub fn cdf_grid(&self, grid: &[f64]) -> Vec<f64> {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        grid.iter()
            .map(|&t| sorted.partition_point(|&v| v <= t) as f64 / n)
            .collect()
    }

    /// Second raw moment of the sojourn time.
    pub fn second_moment(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }
}

/// One point of a density estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
}

// sojourns sitting on a point mass t = (n+1)x, up to rounding
fn on_lattice(v: f64, x: f64) -> bool {
    let k = (v / x).round();
    k >= 1.0 && (v - k * x).abs() <= 1e-9 * v
}

/// Histogram estimate of the continuous density with bins of width `bandwidth`
/// centred on the grid points. Sojourns at the point masses t = (n+1)x are
/// left out.
pub fn empirical_density_with(
    samples: &SojournSample,
    grid: &[f64],
    bandwidth: f64,
) -> Result<Vec<DensityEstimate>> {
    if !(bandwidth > 0.0) {
        return Err(Error::Estimation(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    let n = samples.values.len() as f64;
    let x = samples.x;
    let mut cont: Vec<f64> = samples
        .values
        .iter()
        .copied()
        .filter(|&v| x > 0.0 && !on_lattice(v, x))
        .collect();
    if cont.is_empty() {
        return Err(Error::Estimation(
            "no sojourn times off the point masses".into(),
        ));
    }
    cont.sort_by(f64::total_cmp);
    Ok(grid
        .iter()
        .map(|&t| {
            let lo = cont.partition_point(|&v| v < t - 0.5 * bandwidth);
            let hi = cont.partition_point(|&v| v < t + 0.5 * bandwidth);
            let p = (hi - lo) as f64 / n;
            DensityEstimate {
                t,
                value: p / bandwidth,
                stderr: (p * (1.0 - p) / n).sqrt() / bandwidth,
            }
        })
        .collect())
}

/// [`empirical_density_with`] using a bandwidth of 1.06·sd·n^{−1/5}.
pub fn empirical_density(samples: &SojournSample, grid: &[f64]) -> Result<Vec<DensityEstimate>> {
    let n = samples.values.len() as f64;
    let h = 1.06 * samples.variance.sqrt() * n.powf(-0.2);
    empirical_density_with(samples, grid, if h > 0.0 { h } else { 1e-3 })
}

/// Half-width ε of the DKW band: P(sup|F_n − F| > ε) ≤ α.
pub fn dkw_bound(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}
