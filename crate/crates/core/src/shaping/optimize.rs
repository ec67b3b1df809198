//! Rate-targeted optimisation of the shaping parameters.
//!
//! The objective is the AWGN mutual information of the induced 16-point (or
//! `2^m`-point) distribution at the SNR where the current best candidate
//! reaches the target rate. Because SNR is measured against each
//! candidate's own average energy, maximising MI at that SNR is the same as
//! maximising MI under an average-power constraint. The search alternates
//! between locating that SNR by bisection and improving the parameters with
//! a coarse grid followed by a shrinking pattern search, until the SNR
//! settles.

use super::{induce_distribution, ShapingParams};
use crate::analysis::{mutual_information_at_snr, required_snr};
use crate::constellation::SubConstellation;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Grid spacing of the initial exhaustive search (used for up to two
    /// free parameters).
    pub coarse_step: f64,
    /// Pattern-search step at which the refinement stops.
    pub resolution: f64,
    /// Maximum number of SNR re-anchoring rounds.
    pub max_rounds: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            coarse_step: 0.05,
            resolution: 0.001,
            max_rounds: 6,
        }
    }
}

/// Shaping parameters maximising mutual information at `target_rate` bpcu.
pub fn optimize_params(
    sub: &SubConstellation,
    target_rate: f64,
    options: &OptimizerOptions,
) -> Result<ShapingParams> {
    let m = sub.base().bits();
    if m < 3 {
        return Err(Error::Optimization("shaping needs at least 8-ASK".into()));
    }
    if !(target_rate > 0.0 && target_rate < f64::from(m)) {
        return Err(Error::Optimization(format!(
            "target rate {target_rate} bpcu is infeasible for {m} bits per symbol"
        )));
    }
    let dims = (1usize << (m - 2)) / 2;
    let snr_for = |p: &[f64]| -> Result<f64> {
        let d = full_distribution(sub, p)?;
        required_snr(&d, target_rate).map_err(|e| Error::Optimization(e.to_string()))
    };

    let mut best = vec![0.5; dims];
    let mut snr = snr_for(&best)?;
    for _ in 0..options.max_rounds {
        let objective = |p: &[f64]| -> f64 {
            full_distribution(sub, p)
                .map(|d| mutual_information_at_snr(&d, snr))
                .unwrap_or(f64::NEG_INFINITY)
        };
        let mut value = objective(&best);
        if dims <= 2 {
            let steps = (1.0 / options.coarse_step).round() as usize;
            for point in grid(dims, steps) {
                let v = objective(&point);
                if v > value {
                    value = v;
                    best = point;
                }
            }
        }
        let mut step = options.coarse_step / 2.0;
        while step >= options.resolution {
            let mut improved = false;
            for i in 0..dims {
                for delta in [step, -step] {
                    let mut candidate = best.clone();
                    candidate[i] = (candidate[i] + delta).clamp(0.0, 1.0);
                    let v = objective(&candidate);
                    if v > value + 1e-13 {
                        value = v;
                        best = candidate;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        let next = snr_for(&best)?;
        let settled = (next - snr).abs() < 1e-4;
        snr = next;
        if settled {
            break;
        }
    }
    ShapingParams::new(best)
}

fn full_distribution(
    sub: &SubConstellation,
    p: &[f64],
) -> Result<crate::analysis::InputDistribution> {
    let params = ShapingParams::new(p.to_vec())?;
    Ok(induce_distribution(&params, sub)?.full_constellation())
}

fn grid(dims: usize, steps: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let mut points = vec![Vec::new()];
    for _ in 0..dims {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    points
}
