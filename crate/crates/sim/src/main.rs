use anyhow::{bail, Context, Result};
use clap::Parser;
use pas_core::analysis::{mi_table, write_mi_csv};
use pas_core::constellation::AskConstellation;
use pas_core::sim::{
    emit_csv, emit_meta, format_sig, parse_snr_list, run_sweep, Link, Mode, RunConfig,
};
use std::path::PathBuf;

/// Monte Carlo BLER/BER simulation of shaped and uniform ASK over AWGN.
#[derive(Debug, Parser)]
#[command(name = "sim", version)]
struct Args {
    /// shaped | uniform | ldpc-ref
    #[arg(long)]
    mode: Option<Mode>,
    /// Key-value run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// SNR points in dB: `3.5,4,4.5` or `3.5:0.25:4.5`.
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; a `.meta.toml` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    min_block_errors: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Write the shaping parameters as key-value text and continue.
    #[arg(long)]
    export_params: Option<PathBuf>,
    /// Write the frame layout descriptor and continue.
    #[arg(long)]
    export_layout: Option<PathBuf>,
    /// Write the mutual-information table over the SNR list and continue.
    #[arg(long)]
    mi_csv: Option<PathBuf>,
}

fn resolve(args: &Args) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(mode) = args.mode {
        cfg.mode = mode;
    }
    if let Some(snr) = &args.snr {
        cfg.snr_db = parse_snr_list(snr)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    if let Some(n) = args.min_block_errors {
        cfg.min_block_errors = n;
    }
    if let Some(n) = args.max_frames {
        cfg.max_frames = n;
    }
    if let Some(n) = args.max_iter {
        cfg.max_iter = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: Args) -> Result<()> {
    let cfg = resolve(&args)?;
    if let Some(path) = &args.export_params {
        cfg.params()?.export(cfg.m, path)?;
        eprintln!("wrote shaping parameters to {}", path.display());
    }
    if let Some(path) = &args.export_layout {
        let link = Link::new(&cfg)?;
        link.map().export(path)?;
        eprintln!("wrote frame layout to {}", path.display());
    }
    if let Some(path) = &args.mi_csv {
        let link = Link::new(&RunConfig {
            mode: Mode::Shaped,
            ..cfg.clone()
        })?;
        let framer = link.framer().context("shaped link without framer")?;
        let rows = mi_table(
            &AskConstellation::new(cfg.m)?,
            &framer.target().full_constellation(),
            &cfg.snr_db,
        );
        write_mi_csv(&rows, path)?;
        eprintln!("wrote mutual-information table to {}", path.display());
    }
    let exporting =
        args.export_params.is_some() || args.export_layout.is_some() || args.mi_csv.is_some();
    let Some(out) = cfg.output.clone() else {
        if exporting {
            return Ok(());
        }
        bail!("no output path: pass --out or set `output` in the configuration");
    };
    if cfg.snr_db.is_empty() && !exporting {
        eprintln!("empty SNR sweep, writing a header-only file");
    }
    let report = run_sweep(&cfg, |p| {
        eprintln!(
            "snr {} dB: {} frames, {} block errors, bler {}, ber {}, {} bpcu{}",
            format_sig(p.snr_db),
            p.frames,
            p.block_errors,
            format_sig(p.bler()),
            format_sig(p.ber()),
            format_sig(p.info_bpcu()),
            if p.censored { " (censored)" } else { "" }
        );
    })?;
    emit_csv(&report, &out)?;
    emit_meta(&report, &out)?;
    eprintln!("wrote {} in {:.1} s", out.display(), report.wall_seconds);
    Ok(())
}

fn main() {
    if let Err(e) = run(Args::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
