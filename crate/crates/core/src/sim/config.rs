use crate::framing::FrameConfig;
use crate::ldpc::{BaseGraphKind, DEFAULT_MAX_ITERATIONS, DEFAULT_NORMALIZATION};
use crate::shaping::ShapingParams;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Modified PAS with the sign-bit-like matcher.
    Shaped,
    /// Uniform BICM at the shaped information rate.
    Uniform,
    /// Binary antipodal input through the plain code.
    LdpcRef,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shaped" => Ok(Mode::Shaped),
            "uniform" | "uniform-baseline" => Ok(Mode::Uniform),
            "ldpc-ref" | "ldpc-reference" => Ok(Mode::LdpcRef),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphChoice {
    Bg1,
    Bg2,
}

impl From<GraphChoice> for BaseGraphKind {
    fn from(g: GraphChoice) -> Self {
        match g {
            GraphChoice::Bg1 => BaseGraphKind::Bg1,
            GraphChoice::Bg2 => BaseGraphKind::Bg2,
        }
    }
}

/// Flat key-value run description. Every key has a default reproducing the
/// flagship 16-ASK setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub m: u32,
    pub k: usize,
    pub q: usize,
    pub z: usize,
    /// Sign bits used as systematic input; `k` when absent.
    pub c_prime: Option<usize>,
    pub base_graph: GraphChoice,
    /// Matcher parameters, `M'/2` or `M'/4` values.
    pub p: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub min_block_errors: u64,
    pub max_frames: u64,
    /// Frames simulated between stop-rule checks.
    pub batch: u64,
    pub seed: u64,
    pub max_iter: usize,
    pub normalization: f32,
    /// Info bits per frame of the uniform baseline; matched to the shaped
    /// rate when absent.
    pub uniform_info_bits: Option<usize>,
    /// Info bits per frame in `ldpc-ref` mode; `(m - 1)k + c` when absent.
    pub reference_info_bits: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let flagship = FrameConfig::flagship();
        Self {
            mode: Mode::Shaped,
            m: flagship.m,
            k: flagship.k,
            q: flagship.q,
            z: 384,
            c_prime: None,
            base_graph: GraphChoice::Bg1,
            p: ShapingParams::reference_16ask().values().to_vec(),
            snr_db: Vec::new(),
            min_block_errors: 100,
            max_frames: 100_000,
            batch: 256,
            seed: 1,
            max_iter: DEFAULT_MAX_ITERATIONS,
            normalization: DEFAULT_NORMALIZATION,
            uniform_info_bits: None,
            reference_info_bits: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Resolved configuration as key-value text.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn frame(&self) -> FrameConfig {
        FrameConfig {
            m: self.m,
            k: self.k,
            q: self.q,
            c: 2 * self.z,
            c_prime: self.c_prime.unwrap_or(self.k),
        }
    }

    pub fn params(&self) -> Result<ShapingParams> {
        ShapingParams::new(self.p.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("SNR values must be finite".into()));
        }
        if self.snr_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "SNR sweep must be strictly increasing".into(),
            ));
        }
        if self.batch == 0 || self.max_frames == 0 {
            return Err(Error::Config(
                "batch and max_frames must be positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        if !(self.normalization > 0.0 && self.normalization <= 1.0) {
            return Err(Error::Config("normalization must lie in (0, 1]".into()));
        }
        self.frame().validate()?;
        self.params()?.full(self.m)?;
        Ok(())
    }
}

/// Parses a comma-separated SNR list; `a:step:b` ranges are accepted too.
pub fn parse_snr_list(text: &str) -> Result<Vec<f64>> {
    let bad = |s: &str| Error::Config(format!("bad SNR value {s:?}"));
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(v.parse().map_err(|_| bad(v))?),
            [a, step, b] => {
                let a: f64 = a.parse().map_err(|_| bad(item))?;
                let step: f64 = step.parse().map_err(|_| bad(item))?;
                let b: f64 = b.parse().map_err(|_| bad(item))?;
                if step <= 0.0 {
                    return Err(bad(item));
                }
                let n = ((b - a) / step + 1e-9).floor() as i64;
                for i in 0..=n.max(-1) {
                    let v = a + i as f64 * step;
                    out.push((v * 1e9).round() / 1e9);
                }
            }
            _ => return Err(bad(item)),
        }
    }
    Ok(out)
}
