//! Real AWGN channel and bit-metric demapping with symbol priors.

use crate::analysis::{sigma2_for_snr, InputDistribution};
use crate::constellation::Labelling;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// `10 log10(Es / σ²)`, with `Es` the average energy of the transmit distribution.
    pub snr_db: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn sigma2(&self, energy: f64) -> f64 {
        sigma2_for_snr(energy, self.snr_db)
    }
}

/// Adds i.i.d. `N(0, σ²)` noise.
pub fn transmit<R: Rng + ?Sized>(symbols: &[i32], sigma2: f64, rng: &mut R) -> Vec<f64> {
    let sigma = sigma2.sqrt();
    symbols
        .iter()
        .map(|&x| {
            let n: f64 = rng.sample(StandardNormal);
            f64::from(x) + sigma * n
        })
        .collect()
}

/// [`transmit`] with a generator seeded from `cfg.seed`.
pub fn transmit_seeded(symbols: &[i32], cfg: &ChannelConfig, energy: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    transmit(symbols, cfg.sigma2(energy), &mut rng)
}

/// Binary antipodal transmission: bit 0 → +1, bit 1 → −1.
pub fn bpsk(bits: &[crate::Bit]) -> Vec<i32> {
    bits.iter().map(|&b| 1 - 2 * i32::from(b)).collect()
}

/// LLRs of binary antipodal observations, `2y/σ²`.
pub fn demap_bpsk(y: &[f64], sigma2: f64) -> Vec<f64> {
    y.iter().map(|&v| 2.0 * v / sigma2).collect()
}

/// A priori symbol probabilities seen by the demapper.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorModel {
    Uniform,
    /// One probability per symbol of the alphabet, in increasing symbol order.
    Symbol(Vec<f64>),
}

impl PriorModel {
    /// Prior matching a transmit distribution over (a subset of) the alphabet.
    pub fn from_distribution(lab: &Labelling, d: &InputDistribution) -> Self {
        let c = lab.constellation();
        PriorModel::Symbol(c.symbols().iter().map(|&x| d.prob_of(x)).collect())
    }

    fn log_priors(&self, order: usize) -> Result<Vec<f64>> {
        match self {
            PriorModel::Uniform => Ok(vec![-(order as f64).ln(); order]),
            PriorModel::Symbol(p) => {
                if p.len() != order {
                    return Err(Error::Config(format!(
                        "prior has {} entries for a {order}-point alphabet",
                        p.len()
                    )));
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::Config(format!("prior sums to {total}")));
                }
                Ok(p.iter().map(|v| v.ln()).collect())
            }
        }
    }
}

/// Per-symbol bit LLRs, `m` values per symbol ordered `b_1 .. b_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    pub bits_per_symbol: usize,
    pub values: Vec<f64>,
}

impl LlrFrame {
    pub fn symbols(&self) -> usize {
        self.values.len() / self.bits_per_symbol
    }

    /// LLR of level `level` (1-based) for symbol `s`.
    pub fn get(&self, s: usize, level: usize) -> f64 {
        self.values[s * self.bits_per_symbol + level - 1]
    }
}

/// Precomputed demapper for a labelling and prior.
#[derive(Debug, Clone)]
pub struct Demapper {
    m: usize,
    points: Vec<(f64, f64, u32)>,
}

impl Demapper {
    pub fn new(lab: &Labelling, prior: &PriorModel) -> Result<Self> {
        let c = lab.constellation();
        let log_prior = prior.log_priors(c.order())?;
        let points = c
            .symbols()
            .iter()
            .enumerate()
            .filter(|(i, _)| log_prior[*i].is_finite())
            .map(|(i, &x)| (f64::from(x), log_prior[i], lab.label_of_index(i)))
            .collect();
        Ok(Self {
            m: lab.bits() as usize,
            points,
        })
    }

    pub fn demap(&self, y: &[f64], sigma2: f64) -> LlrFrame {
        let mut values = Vec::with_capacity(y.len() * self.m);
        let mut metric = vec![0.0; self.points.len()];
        let mut weight = vec![0.0; self.points.len()];
        let scale = 1.0 / (2.0 * sigma2);
        for &obs in y {
            let mut top = f64::NEG_INFINITY;
            for (mu, &(x, lp, _)) in metric.iter_mut().zip(&self.points) {
                *mu = lp - (obs - x) * (obs - x) * scale;
                top = top.max(*mu);
            }
            for (w, &mu) in weight.iter_mut().zip(&metric) {
                *w = (mu - top).exp();
            }
            for level in 0..self.m {
                let mut sum = [0.0f64; 2];
                for (&w, &(_, _, label)) in weight.iter().zip(&self.points) {
                    sum[((label >> level) & 1) as usize] += w;
                }
                let llr = if sum[0] > 1e-250 && sum[1] > 1e-250 {
                    sum[0].ln() - sum[1].ln()
                } else {
                    self.level_llr(&metric, level)
                };
                values.push(llr);
            }
        }
        LlrFrame {
            bits_per_symbol: self.m,
            values,
        }
    }

    /// Per-level log-sum-exp, used when one hypothesis underflows against
    /// the global maximum.
    fn level_llr(&self, metric: &[f64], level: usize) -> f64 {
        let mut max = [f64::NEG_INFINITY; 2];
        for (&mu, &(_, _, label)) in metric.iter().zip(&self.points) {
            let b = ((label >> level) & 1) as usize;
            max[b] = max[b].max(mu);
        }
        let mut sum = [0.0f64; 2];
        for (&mu, &(_, _, label)) in metric.iter().zip(&self.points) {
            let b = ((label >> level) & 1) as usize;
            sum[b] += (mu - max[b]).exp();
        }
        match (max[0].is_finite(), max[1].is_finite()) {
            (true, true) => (max[0] + sum[0].ln()) - (max[1] + sum[1].ln()),
            (true, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            (false, false) => 0.0,
        }
    }
}

/// Bit LLRs for every received sample.
pub fn demap(y: &[f64], lab: &Labelling, prior: &PriorModel, sigma2: f64) -> Result<LlrFrame> {
    Ok(Demapper::new(lab, prior)?.demap(y, sigma2))
}
