//! Information-theoretic utilities for ASK inputs on the real AWGN channel.
//!
//! SNR is always `Es / σ²` where `Es` is the average energy of the input
//! distribution under study, so two distributions compared at the same SNR
//! in dB are compared at the same normalised noise level.

use crate::constellation::AskConstellation;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::fmt::Write as _;
use std::path::Path;

/// Quadrature order used by [`mutual_information`].
pub const QUADRATURE_NODES: usize = 96;
/// Allowed disagreement between quadrature and Monte Carlo MI, in bits.
pub const MI_CROSS_CHECK_TOLERANCE: f64 = 0.005;
pub const MI_CROSS_CHECK_SAMPLES: usize = 1_000_000;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;
const SNR_BRACKET_DB: (f64, f64) = (-30.0, 90.0);

/// A probability distribution over ASK symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    support: Vec<i32>,
    prob: Vec<f64>,
}

impl InputDistribution {
    pub fn new(support: Vec<i32>, prob: Vec<f64>) -> Result<Self> {
        if support.len() != prob.len() || support.is_empty() {
            return Err(Error::Domain(format!(
                "support has {} points but {} probabilities were given",
                support.len(),
                prob.len()
            )));
        }
        if prob.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Domain("probabilities must lie in [0, 1]".into()));
        }
        let total: f64 = prob.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Domain(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { support, prob })
    }

    pub fn uniform(c: &AskConstellation) -> Self {
        let p = 1.0 / c.order() as f64;
        Self {
            support: c.symbols().to_vec(),
            prob: vec![p; c.order()],
        }
    }

    pub fn support(&self) -> &[i32] {
        &self.support
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    /// Probability of `x`, zero when `x` is outside the support.
    pub fn prob_of(&self, x: i32) -> f64 {
        self.support
            .iter()
            .position(|&s| s == x)
            .map_or(0.0, |i| self.prob[i])
    }

    fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support
            .iter()
            .zip(&self.prob)
            .filter(|(_, &p)| p > 0.0)
            .map(|(&x, &p)| (f64::from(x), p))
    }
}

/// Entropy in bits.
pub fn entropy(d: &InputDistribution) -> f64 {
    -d.atoms().map(|(_, p)| p * p.log2()).sum::<f64>()
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

pub fn average_energy(d: &InputDistribution) -> f64 {
    d.atoms().map(|(x, p)| p * x * x).sum()
}

pub fn sigma2_for_snr(energy: f64, snr_db: f64) -> f64 {
    energy / 10f64.powf(snr_db / 10.0)
}

pub fn snr_db_for_sigma2(energy: f64, sigma2: f64) -> f64 {
    10.0 * (energy / sigma2).log10()
}

/// Nodes and weights of the `n`-point Gauss-Hermite rule for
/// `∫ exp(-t²) f(t) dt`, computed by Newton iteration on the orthonormal
/// Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut derivative = 1.0;
        for _ in 0..200 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            derivative = (2.0 * nf).sqrt() * p2;
            let step = p1 / derivative;
            z -= step;
            if step.abs() <= 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (derivative * derivative);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `log2 p(y|x) / p(y)` for one channel output.
fn information_density(atoms: &[(f64, f64)], x: f64, y: f64, sigma2: f64) -> f64 {
    let own = -(y - x) * (y - x) / (2.0 * sigma2);
    let mixture = log_sum_exp(
        atoms
            .iter()
            .map(|&(s, p)| p.ln() - (y - s) * (y - s) / (2.0 * sigma2)),
    );
    (own - mixture) / std::f64::consts::LN_2
}

/// `I(X; X + N)` in bits for `N ~ N(0, σ²)`, by Gauss-Hermite quadrature.
pub fn mutual_information(d: &InputDistribution, sigma2: f64) -> f64 {
    thread_local! {
        static RULE: (Vec<f64>, Vec<f64>) = gauss_hermite(QUADRATURE_NODES);
    }
    assert!(sigma2 > 0.0, "noise variance must be positive");
    let atoms: Vec<(f64, f64)> = d.atoms().collect();
    let scale = (2.0 * sigma2).sqrt();
    RULE.with(|(nodes, weights)| {
        let mut total = 0.0;
        for &(x, p) in &atoms {
            let inner: f64 = nodes
                .iter()
                .zip(weights)
                .map(|(&t, &w)| w * information_density(&atoms, x, x + scale * t, sigma2))
                .sum();
            total += p * inner;
        }
        (total / std::f64::consts::PI.sqrt()).max(0.0)
    })
}

/// Monte Carlo estimate of the mutual information.
pub fn mutual_information_mc(d: &InputDistribution, sigma2: f64, samples: usize, seed: u64) -> f64 {
    let atoms: Vec<(f64, f64)> = d.atoms().collect();
    let mut cdf = Vec::with_capacity(atoms.len());
    let mut acc = 0.0;
    for &(_, p) in &atoms {
        acc += p;
        cdf.push(acc);
    }
    let sigma = sigma2.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    for _ in 0..samples {
        let u: f64 = rng.random::<f64>() * acc;
        let i = cdf.partition_point(|&c| c < u).min(atoms.len() - 1);
        let x = atoms[i].0;
        let n: f64 = rng.sample(StandardNormal);
        sum += information_density(&atoms, x, x + sigma * n, sigma2);
    }
    sum / samples as f64
}

/// Quadrature MI validated against an independent Monte Carlo estimate.
pub fn mutual_information_checked(d: &InputDistribution, sigma2: f64, seed: u64) -> Result<f64> {
    let quad = mutual_information(d, sigma2);
    let mc = mutual_information_mc(d, sigma2, MI_CROSS_CHECK_SAMPLES, seed);
    if (quad - mc).abs() > MI_CROSS_CHECK_TOLERANCE {
        return Err(Error::Numeric(format!(
            "quadrature MI {quad:.5} and Monte Carlo MI {mc:.5} disagree at sigma2={sigma2}"
        )));
    }
    Ok(quad)
}

/// MI at an SNR given in dB.
pub fn mutual_information_at_snr(d: &InputDistribution, snr_db: f64) -> f64 {
    mutual_information(d, sigma2_for_snr(average_energy(d), snr_db))
}

/// SNR in dB at which the MI of `d` equals `target_rate`, by bisection.
pub fn required_snr(d: &InputDistribution, target_rate: f64) -> Result<f64> {
    let h = entropy(d);
    if !(target_rate > 0.0 && target_rate < h) {
        return Err(Error::Domain(format!(
            "target rate {target_rate} is not in (0, H(X) = {h:.4})"
        )));
    }
    let (mut lo, mut hi) = SNR_BRACKET_DB;
    if mutual_information_at_snr(d, hi) < target_rate {
        return Err(Error::Domain(format!(
            "target rate {target_rate} not reached below {hi} dB"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let mi = mutual_information_at_snr(d, mid);
        if (mi - target_rate).abs() < 1e-9 {
            return Ok(mid);
        }
        if mi < target_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Required-SNR difference `uniform - shaped` in dB at `rate`.
pub fn shaping_gain_db(
    reference: &InputDistribution,
    shaped: &InputDistribution,
    rate: f64,
) -> Result<f64> {
    Ok(required_snr(reference, rate)? - required_snr(shaped, rate)?)
}

/// Maxwell-Boltzmann distribution `p(x) ∝ exp(-ν x²)` over the alphabet.
pub fn maxwell_boltzmann(c: &AskConstellation, nu: f64) -> InputDistribution {
    let weights: Vec<f64> = c
        .symbols()
        .iter()
        .map(|&x| (-nu * (f64::from(x * x) - 1.0)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let mut prob: Vec<f64> = weights.iter().map(|w| w / total).collect();
    renormalize(&mut prob);
    InputDistribution {
        support: c.symbols().to_vec(),
        prob,
    }
}

/// Maxwell-Boltzmann distribution with the given average energy.
pub fn maxwell_boltzmann_for_energy(
    c: &AskConstellation,
    energy: f64,
) -> Result<InputDistribution> {
    let max = average_energy(&InputDistribution::uniform(c));
    if !(energy > 1.0 && energy <= max) {
        return Err(Error::Domain(format!("energy must lie in (1, {max}]")));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while average_energy(&maxwell_boltzmann(c, hi)) > energy {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if average_energy(&maxwell_boltzmann(c, mid)) > energy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(maxwell_boltzmann(c, 0.5 * (lo + hi)))
}

fn golden_section(
    mut lo: f64,
    mut hi: f64,
    iterations: usize,
    mut f: impl FnMut(f64) -> f64,
) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..iterations {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    if fa < fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Lowest required SNR over the Maxwell-Boltzmann family at `rate`,
/// returned as `(ν, snr_db)`.
pub fn best_maxwell_boltzmann(c: &AskConstellation, rate: f64) -> Result<(f64, f64)> {
    if !(rate > 0.0 && rate < f64::from(c.bits())) {
        return Err(Error::Domain(format!(
            "rate {rate} outside (0, {})",
            c.bits()
        )));
    }
    // Entropy decreases in ν; restrict to the family members that can carry `rate`.
    let (mut lo, mut hi) = (0.0, 1.0);
    while entropy(&maxwell_boltzmann(c, hi)) > rate + 1e-3 {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if entropy(&maxwell_boltzmann(c, mid)) > rate + 1e-3 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nu_max = lo;
    let (nu, snr) = golden_section(0.0, nu_max, 50, |nu| {
        required_snr(&maxwell_boltzmann(c, nu), rate).unwrap_or(f64::INFINITY)
    });
    Ok((nu, snr))
}

/// Largest MI over the Maxwell-Boltzmann family at a fixed SNR.
pub fn best_maxwell_boltzmann_mi(c: &AskConstellation, snr_db: f64) -> f64 {
    let (_, neg) = golden_section(0.0, 1.0, 50, |nu| {
        -mutual_information_at_snr(&maxwell_boltzmann(c, nu), snr_db)
    });
    -neg
}

fn renormalize(prob: &mut [f64]) {
    let total: f64 = prob.iter().sum();
    prob.iter_mut().for_each(|p| *p /= total);
}

/// One row of the MI comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiRow {
    pub snr_db: f64,
    pub mi_uniform: f64,
    pub mi_shaped: f64,
    pub mi_mb: f64,
}

pub fn mi_table(c: &AskConstellation, shaped: &InputDistribution, snr_grid: &[f64]) -> Vec<MiRow> {
    let uniform = InputDistribution::uniform(c);
    snr_grid
        .iter()
        .map(|&snr_db| MiRow {
            snr_db,
            mi_uniform: mutual_information_at_snr(&uniform, snr_db),
            mi_shaped: mutual_information_at_snr(shaped, snr_db),
            mi_mb: best_maxwell_boltzmann_mi(c, snr_db),
        })
        .collect()
}

/// Writes `snr_db,mi_uniform,mi_shaped,mi_mb` rows.
pub fn write_mi_csv(rows: &[MiRow], path: &Path) -> Result<()> {
    let mut out = String::from("snr_db,mi_uniform,mi_shaped,mi_mb\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.3},{:.6},{:.6},{:.6}",
            r.snr_db, r.mi_uniform, r.mi_shaped, r.mi_mb
        );
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
