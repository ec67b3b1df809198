//! Monte Carlo link simulation over the three transmission chains.

mod config;
mod report;

pub use config::{parse_snr_list, GraphChoice, Mode, RunConfig};
pub use report::{
    csv_string, emit_csv, emit_meta, format_sig, meta_path, meta_string, snr_at_bler, PointStats,
    SimReport, CSV_HEADER,
};

use crate::analysis::{average_energy, sigma2_for_snr};
use crate::channel::{bpsk, demap_bpsk, transmit, Demapper, LlrFrame, PriorModel};
use crate::constellation::{AskConstellation, Labelling, LabellingKind};
use crate::framing::{info_rate, CodeMap, ShapedFramer};
use crate::ldpc::{data_checksums, BaseGraph, LiftedCode, MinSumDecoder};
use crate::{Bit, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

/// Generator of frame `index`: one ChaCha stream per frame under the master seed.
pub fn frame_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_bits<R: Rng>(rng: &mut R, n: usize) -> Vec<Bit> {
    (0..n).map(|_| rng.random::<bool>() as Bit).collect()
}

#[derive(Debug)]
enum Chain {
    Shaped {
        framer: ShapedFramer,
        demapper: Demapper,
    },
    Uniform {
        map: CodeMap,
        labelling: Labelling,
        demapper: Demapper,
    },
    Reference {
        map: CodeMap,
    },
}

/// Result of one simulated frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameOutcome {
    pub bit_errors: u64,
    pub block_error: bool,
    pub iterations: usize,
    pub info_bits: usize,
    /// Transmitted symbols, kept for replay checks.
    pub symbols: Vec<i32>,
    pub decoded: Vec<Bit>,
}

/// A transmitter, channel and receiver for one run configuration.
#[derive(Debug)]
pub struct Link {
    mode: Mode,
    code: LiftedCode,
    chain: Chain,
    energy: f64,
    channel_uses: usize,
    compared_bits: usize,
}

impl Link {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let bg = BaseGraph::standard(cfg.base_graph.into())?;
        let frame = cfg.frame();
        let z = cfg.z;
        match cfg.mode {
            Mode::Shaped => {
                let code = LiftedCode::for_parity_bits(&bg, z, frame.parity_retained())?;
                let framer = ShapedFramer::new(frame, &cfg.params()?, &code)?;
                let full = framer.target().full_constellation();
                let prior =
                    PriorModel::from_distribution(framer.sub_constellation().labelling(), &full);
                let demapper = Demapper::new(framer.sub_constellation().labelling(), &prior)?;
                Ok(Self {
                    mode: cfg.mode,
                    energy: average_energy(&full),
                    channel_uses: frame.k,
                    compared_bits: framer.map().payload(),
                    code,
                    chain: Chain::Shaped { framer, demapper },
                })
            }
            Mode::Uniform => {
                let info_bits = match cfg.uniform_info_bits {
                    Some(n) => n,
                    None => matched_uniform_info_bits(cfg)?,
                };
                let transmitted = frame.transmitted_bits();
                if info_bits < frame.c || info_bits - frame.c > transmitted {
                    return Err(Error::Config(format!(
                        "{info_bits} uniform info bits do not fit the frame"
                    )));
                }
                let parity = transmitted - (info_bits - frame.c);
                let code = LiftedCode::for_parity_bits(&bg, z, parity)?;
                let map =
                    CodeMap::interleaved(frame.m as usize, frame.k, info_bits, frame.c, &code)?;
                let constellation = AskConstellation::new(frame.m)?;
                let labelling = Labelling::new(&constellation, LabellingKind::Gray);
                let demapper = Demapper::new(&labelling, &PriorModel::Uniform)?;
                Ok(Self {
                    mode: cfg.mode,
                    energy: constellation.uniform_energy().to_integer() as f64,
                    channel_uses: frame.k,
                    compared_bits: info_bits,
                    code,
                    chain: Chain::Uniform {
                        map,
                        labelling,
                        demapper,
                    },
                })
            }
            Mode::LdpcRef => {
                let info_bits = cfg
                    .reference_info_bits
                    .unwrap_or(frame.systematic_payload());
                let transmitted = frame.transmitted_bits();
                if info_bits < frame.c || info_bits - frame.c > transmitted {
                    return Err(Error::Config(format!(
                        "{info_bits} reference info bits do not fit the frame"
                    )));
                }
                let parity = transmitted - (info_bits - frame.c);
                let code = LiftedCode::for_parity_bits(&bg, z, parity)?;
                let map = CodeMap::interleaved(1, transmitted, info_bits, frame.c, &code)?;
                Ok(Self {
                    mode: cfg.mode,
                    energy: 1.0,
                    channel_uses: transmitted,
                    compared_bits: info_bits,
                    code,
                    chain: Chain::Reference { map },
                })
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn code(&self) -> &LiftedCode {
        &self.code
    }

    /// Average transmit energy defining the SNR axis.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn channel_uses(&self) -> usize {
        self.channel_uses
    }

    pub fn compared_bits(&self) -> usize {
        self.compared_bits
    }

    pub fn map(&self) -> &CodeMap {
        match &self.chain {
            Chain::Shaped { framer, .. } => framer.map(),
            Chain::Uniform { map, .. } | Chain::Reference { map } => map,
        }
    }

    pub fn framer(&self) -> Option<&ShapedFramer> {
        match &self.chain {
            Chain::Shaped { framer, .. } => Some(framer),
            _ => None,
        }
    }

    /// Simulates frame `index` of the run with master seed `seed`.
    pub fn run_frame(
        &self,
        decoder: &mut MinSumDecoder<'_>,
        snr_db: f64,
        seed: u64,
        index: u64,
        max_iter: usize,
    ) -> Result<FrameOutcome> {
        let mut rng = frame_rng(seed, index);
        let sigma2 = sigma2_for_snr(self.energy, snr_db);
        match &self.chain {
            Chain::Shaped { framer, demapper } => {
                let info = random_bits(&mut rng, framer.max_info_bits());
                let frame = framer.assemble(&self.code, &info)?;
                let y = transmit(&frame.symbols, sigma2, &mut rng);
                let input = framer.map().route_llrs(&demapper.demap(&y, sigma2))?;
                let out = decoder.decode(&input, max_iter);
                let sent = framer.payload(&frame.codeword);
                let bit_errors = count_errors(sent, framer.payload(&out.bits));
                let rx = framer.disassemble(&out.bits);
                let block_error = bit_errors > 0 || !rx.ok || rx.info != info[..frame.consumed];
                Ok(FrameOutcome {
                    bit_errors,
                    block_error,
                    iterations: out.iterations,
                    info_bits: frame.consumed,
                    symbols: frame.symbols,
                    decoded: out.bits,
                })
            }
            Chain::Uniform {
                map,
                labelling,
                demapper,
            } => {
                let info = random_bits(&mut rng, map.payload());
                let codeword = self.code.encode(&map.systematic_input(&info))?;
                let labels = map.gather(&codeword);
                let symbols: Vec<i32> = labels
                    .chunks(map.bits_per_symbol())
                    .map(|l| labelling.map_bits(l))
                    .collect();
                let y = transmit(&symbols, sigma2, &mut rng);
                let input = map.route_llrs(&demapper.demap(&y, sigma2))?;
                Ok(self.finish(decoder, &input, &info, symbols, max_iter))
            }
            Chain::Reference { map } => {
                let info = random_bits(&mut rng, map.payload());
                let codeword = self.code.encode(&map.systematic_input(&info))?;
                let symbols = bpsk(&map.gather(&codeword));
                let y = transmit(&symbols, sigma2, &mut rng);
                let llr = LlrFrame {
                    bits_per_symbol: 1,
                    values: demap_bpsk(&y, sigma2),
                };
                let input = map.route_llrs(&llr)?;
                Ok(self.finish(decoder, &input, &info, symbols, max_iter))
            }
        }
    }

    fn finish(
        &self,
        decoder: &mut MinSumDecoder<'_>,
        input: &[f64],
        info: &[Bit],
        symbols: Vec<i32>,
        max_iter: usize,
    ) -> FrameOutcome {
        let out = decoder.decode(input, max_iter);
        let bit_errors = count_errors(info, &out.bits[..info.len()]);
        FrameOutcome {
            bit_errors,
            block_error: bit_errors > 0,
            iterations: out.iterations,
            info_bits: info.len(),
            symbols,
            decoded: out.bits,
        }
    }
}

fn count_errors(a: &[Bit], b: &[Bit]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Uniform-baseline info bits per frame matching the expected shaped info rate.
pub fn matched_uniform_info_bits(cfg: &RunConfig) -> Result<usize> {
    let frame = cfg.frame();
    let bg = BaseGraph::standard(cfg.base_graph.into())?;
    let code = LiftedCode::for_parity_bits(&bg, cfg.z, frame.parity_retained())?;
    let framer = ShapedFramer::new(frame, &cfg.params()?, &code)?;
    let payload = framer.matcher().expected_payload_bits(frame.k);
    Ok((info_rate(&frame, payload) * frame.k as f64).round() as usize)
}

/// Runs one SNR point until the stop rule holds or the frame budget is spent.
pub fn run_point(link: &Link, cfg: &RunConfig, snr_db: f64) -> Result<PointStats> {
    let mut stats = PointStats::new(
        snr_db,
        link.compared_bits() as u64,
        link.channel_uses() as u64,
    );
    while stats.block_errors < cfg.min_block_errors && stats.frames < cfg.max_frames {
        let start = stats.frames;
        let end = (start + cfg.batch).min(cfg.max_frames);
        let batch = (start..end)
            .into_par_iter()
            .map_init(
                || MinSumDecoder::with_normalization(link.code(), cfg.normalization),
                |decoder, index| {
                    let o = link.run_frame(decoder, snr_db, cfg.seed, index, cfg.max_iter)?;
                    let mut s = PointStats::new(snr_db, 0, 0);
                    s.frames = 1;
                    s.bit_errors = o.bit_errors;
                    s.block_errors = u64::from(o.block_error);
                    s.iterations = o.iterations as u64;
                    s.info_bits = o.info_bits as u64;
                    Ok(s)
                },
            )
            .try_reduce(
                || PointStats::new(snr_db, 0, 0),
                |mut a, b| {
                    a.merge(&b);
                    Ok(a)
                },
            )?;
        stats.merge(&batch);
    }
    stats.censored = stats.block_errors < cfg.min_block_errors;
    Ok(stats)
}

/// Runs the whole sweep, calling `progress` after every point.
pub fn run_sweep(cfg: &RunConfig, mut progress: impl FnMut(&PointStats)) -> Result<SimReport> {
    let started = Instant::now();
    let link = Link::new(cfg)?;
    let mut points = Vec::with_capacity(cfg.snr_db.len());
    for &snr in &cfg.snr_db {
        let p = run_point(&link, cfg, snr)?;
        progress(&p);
        points.push(p);
    }
    Ok(SimReport {
        mode: cfg.mode,
        config: cfg.to_text(),
        points,
        wall_seconds: started.elapsed().as_secs_f64(),
        checksums: data_checksums()
            .into_iter()
            .map(|(n, d)| (n.to_string(), d))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: Mode) -> RunConfig {
        RunConfig {
            mode,
            k: 100,
            z: 16,
            snr_db: vec![60.0],
            min_block_errors: 1,
            max_frames: 8,
            batch: 4,
            ..RunConfig::default()
        }
    }

    #[test]
    fn noiseless_runs_are_error_free() {
        for mode in [Mode::Shaped, Mode::Uniform, Mode::LdpcRef] {
            let report = run_sweep(&small(mode), |_| {}).unwrap();
            let p = &report.points[0];
            assert_eq!(p.frames, 8, "{mode:?}");
            assert_eq!(p.block_errors, 0, "{mode:?}");
            assert!(p.censored);
            // Punctured columns only receive check messages, so a few iterations are needed.
            assert!(p.avg_iters() <= 4.0, "{mode:?} {}", p.avg_iters());
        }
    }

    #[test]
    fn frames_replay_bit_identically() {
        let cfg = RunConfig {
            snr_db: vec![3.0],
            ..small(Mode::Shaped)
        };
        let link = Link::new(&cfg).unwrap();
        let mut d1 = MinSumDecoder::new(link.code());
        let mut d2 = MinSumDecoder::new(link.code());
        let _ = link.run_frame(&mut d1, 3.0, 5, 2, 20).unwrap();
        let a = link.run_frame(&mut d1, 3.0, 5, 7, 20).unwrap();
        let b = link.run_frame(&mut d2, 3.0, 5, 7, 20).unwrap();
        assert_eq!(a, b);
        let c = link.run_frame(&mut d2, 3.0, 5, 8, 20).unwrap();
        assert_ne!(a.symbols, c.symbols);
    }

    #[test]
    fn stop_rule_stops_early_at_low_snr() {
        let cfg = RunConfig {
            snr_db: vec![-5.0],
            min_block_errors: 3,
            max_frames: 100,
            ..small(Mode::Uniform)
        };
        let p = &run_sweep(&cfg, |_| {}).unwrap().points[0];
        assert!(p.block_errors >= 3);
        assert!(p.frames < 100);
        assert!(!p.censored);
    }

    #[test]
    fn matched_rate_for_the_flagship() {
        let k = matched_uniform_info_bits(&RunConfig::default()).unwrap();
        let rate = k as f64 / 1969.0;
        assert!((rate - 2.6).abs() < 0.05, "{rate}");
    }
}
