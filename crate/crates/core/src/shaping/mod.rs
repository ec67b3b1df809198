//! Target distributions over `X_r` and the sign-bit-like distribution matcher.
//!
//! The symbol probabilities of `X_r = {x_1 < .. < x_M'}` are
//!
//! ```text
//! p(x_i)          = p_i       · (1/2)^(m'-1)    for 1 <= i <= M'/2
//! p(x_(i + M'/2)) = (1 - p_i) · (1/2)^(m'-1)
//! ```
//!
//! with `m' = m - 1`. For symmetric targets only the first `M'/4`
//! parameters are free; the rest follow from `p_(M'/2 + 1 - i) = 1 - p_i`.

mod ccdm;
mod matcher;
mod optimize;

pub use ccdm::ConstantComposition;
pub use matcher::{composition, DmBlock, SignBitMatcher};
pub use optimize::{optimize_params, OptimizerOptions};

use crate::analysis::InputDistribution;
use crate::constellation::SubConstellation;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Free parameters `p_i` of the target distribution.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShapingParams {
    p: Vec<f64>,
}

impl ShapingParams {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some(bad) = p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!(
                "shaping parameter {bad} outside [0, 1]"
            )));
        }
        Ok(Self { p })
    }

    /// The parameters used for the 2.63 bpcu, 16-ASK operating point.
    pub fn reference_16ask() -> Self {
        Self {
            p: vec![0.08, 0.28],
        }
    }

    /// All parameters equal to 1/2 (uniform over `X_r`).
    pub fn unbiased(m: u32) -> Self {
        Self {
            p: vec![0.5; symmetric_len(m)],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    /// Expands to the `M'/2` parameters of the general form.
    pub fn full(&self, m: u32) -> Result<Vec<f64>> {
        let half = 1usize << (m - 2);
        if self.p.len() == half {
            return Ok(self.p.clone());
        }
        if half >= 2 && self.p.len() == half / 2 {
            let mut full = self.p.clone();
            full.extend(self.p.iter().rev().map(|p| 1.0 - p));
            return Ok(full);
        }
        Err(Error::Config(format!(
            "expected {} (symmetric) or {half} shaping parameters for m = {m}, got {}",
            half / 2,
            self.p.len()
        )))
    }

    /// Writes the parameters as a flat `key = value` file.
    pub fn export(&self, m: u32, path: &Path) -> Result<()> {
        let mut out = String::new();
        let _ = writeln!(out, "m = {m}");
        let _ = writeln!(out, "p = {:?}", self.p);
        let _ = writeln!(out, "composition_policy = \"round_half_up\"");
        let _ = writeln!(out, "matcher = \"constant_composition_enumerative\"");
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Reads a file written by [`ShapingParams::export`], returning `(m, params)`.
    pub fn import(path: &Path) -> Result<(u32, Self)> {
        #[derive(serde::Deserialize)]
        struct File {
            m: u32,
            p: Vec<f64>,
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: File = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        Ok((file.m, Self::new(file.p)?))
    }
}

fn symmetric_len(m: u32) -> usize {
    (1usize << (m - 2)) / 2
}

/// Symbol distribution over `X_r`, indexed in increasing symbol order.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDistribution {
    members: Vec<i32>,
    prob: Vec<f64>,
}

impl TargetDistribution {
    pub fn members(&self) -> &[i32] {
        &self.members
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.prob.len();
        (0..n).all(|i| (self.prob[i] - self.prob[n - 1 - i]).abs() < 1e-12)
    }

    /// Distribution over `X_r` alone.
    pub fn sub_distribution(&self) -> InputDistribution {
        InputDistribution::new(self.members.clone(), self.prob.clone())
            .expect("target distribution is normalized")
    }

    /// Distribution of the transmitted symbol over the whole alphabet: each
    /// `x ∈ X_r` shares its mass evenly with `x + 2`.
    pub fn full_constellation(&self) -> InputDistribution {
        let mut support = Vec::with_capacity(2 * self.members.len());
        let mut prob = Vec::with_capacity(2 * self.members.len());
        for (&x, &p) in self.members.iter().zip(&self.prob) {
            support.extend([x, x + 2]);
            prob.extend([p / 2.0, p / 2.0]);
        }
        InputDistribution::new(support, prob).expect("target distribution is normalized")
    }
}

/// Symbol distribution induced on `X_r` by the parameters.
pub fn induce_distribution(
    params: &ShapingParams,
    sub: &SubConstellation,
) -> Result<TargetDistribution> {
    let m = sub.base().bits();
    if m < 3 {
        return Err(Error::Config("shaping needs at least 8-ASK".into()));
    }
    let full = params.full(m)?;
    let half = sub.order() / 2;
    let scale = 0.5f64.powi(m as i32 - 2);
    let mut prob = vec![0.0; sub.order()];
    for (i, &p) in full.iter().enumerate() {
        prob[i] = p * scale;
        prob[i + half] = (1.0 - p) * scale;
    }
    Ok(TargetDistribution {
        members: sub.members().to_vec(),
        prob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn reference_parameters_induce_the_quantized_target() {
        let sub = SubConstellation::gray(4).unwrap();
        let t = induce_distribution(&ShapingParams::reference_16ask(), &sub).unwrap();
        assert_eq!(t.members(), &[-15, -11, -7, -3, 1, 5, 9, 13]);
        assert!(close(
            t.prob(),
            &[0.02, 0.07, 0.18, 0.23, 0.23, 0.18, 0.07, 0.02],
            1e-12
        ));
        assert!(t.is_symmetric());
        assert!((t.prob().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbiased_parameters_give_uniform() {
        let sub = SubConstellation::gray(4).unwrap();
        let t = induce_distribution(&ShapingParams::new(vec![0.5, 0.5]).unwrap(), &sub).unwrap();
        assert!(close(t.prob(), &[0.125; 8], 1e-15));
    }

    #[test]
    fn zero_parameters_empty_the_outer_pairs() {
        let sub = SubConstellation::gray(4).unwrap();
        let t = induce_distribution(&ShapingParams::new(vec![0.0, 0.0]).unwrap(), &sub).unwrap();
        // p1 = p2 = 0 leaves p3 = p4 = 1, i.e. mass only on -7, -3, 1, 5.
        assert!(close(
            t.prob(),
            &[0.0, 0.0, 0.25, 0.25, 0.25, 0.25, 0.0, 0.0],
            1e-15
        ));
    }

    #[test]
    fn general_form_is_accepted() {
        let sub = SubConstellation::gray(4).unwrap();
        let params = ShapingParams::new(vec![0.08, 0.28, 0.72, 0.92]).unwrap();
        let t = induce_distribution(&params, &sub).unwrap();
        let s = induce_distribution(&ShapingParams::reference_16ask(), &sub).unwrap();
        assert_eq!(t, s);
    }

    #[test]
    fn wrong_parameter_count_is_a_config_error() {
        let sub = SubConstellation::gray(4).unwrap();
        let params = ShapingParams::new(vec![0.1, 0.2, 0.3]).unwrap();
        assert!(matches!(
            induce_distribution(&params, &sub),
            Err(Error::Config(_))
        ));
        assert!(ShapingParams::new(vec![1.5]).is_err());
    }

    #[test]
    fn full_constellation_splits_pairs() {
        let sub = SubConstellation::gray(4).unwrap();
        let t = induce_distribution(&ShapingParams::reference_16ask(), &sub).unwrap();
        let d = t.full_constellation();
        assert!((d.prob_of(-15) - 0.01).abs() < 1e-15);
        assert!((d.prob_of(-13) - 0.01).abs() < 1e-15);
        assert!((d.prob_of(1) - 0.115).abs() < 1e-15);
        assert!((d.prob_of(3) - 0.115).abs() < 1e-15);
        assert!((crate::analysis::average_energy(&d) - 37.64).abs() < 1e-12);
    }

    #[test]
    fn params_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("pas-params-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("params.toml");
        ShapingParams::reference_16ask().export(4, &path).unwrap();
        let (m, p) = ShapingParams::import(&path).unwrap();
        assert_eq!(m, 4);
        assert_eq!(p, ShapingParams::reference_16ask());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
