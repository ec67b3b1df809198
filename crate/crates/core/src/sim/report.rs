use super::Mode;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Counters of one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub block_errors: u64,
    /// Code bits compared per frame for the bit error count.
    pub bits_per_frame: u64,
    pub iterations: u64,
    pub info_bits: u64,
    /// Channel uses per frame.
    pub channel_uses: u64,
    /// Stop rule not met within the frame budget.
    pub censored: bool,
}

impl PointStats {
    pub fn new(snr_db: f64, bits_per_frame: u64, channel_uses: u64) -> Self {
        Self {
            snr_db,
            frames: 0,
            bit_errors: 0,
            block_errors: 0,
            bits_per_frame,
            iterations: 0,
            info_bits: 0,
            channel_uses,
            censored: false,
        }
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.frames * self.bits_per_frame)
    }

    pub fn bler(&self) -> f64 {
        ratio(self.block_errors, self.frames)
    }

    pub fn avg_iters(&self) -> f64 {
        ratio(self.iterations, self.frames)
    }

    pub fn info_bpcu(&self) -> f64 {
        ratio(self.info_bits, self.frames * self.channel_uses)
    }

    pub fn merge(&mut self, other: &PointStats) {
        self.frames += other.frames;
        self.bit_errors += other.bit_errors;
        self.block_errors += other.block_errors;
        self.iterations += other.iterations;
        self.info_bits += other.info_bits;
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub mode: Mode,
    /// Resolved run configuration.
    pub config: String,
    pub points: Vec<PointStats>,
    pub wall_seconds: f64,
    /// `(file, sha256)` of the code data files.
    pub checksums: Vec<(String, String)>,
}

pub const CSV_HEADER: &str = "snr_db,frames,bit_errors,block_errors,ber,bler,avg_iters,info_bpcu";

/// Six significant digits, fixed notation when readable.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding may carry into a new digit, e.g. 9.999996.
        let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
        if digits.trim_start_matches('0').len() > 6 && decimals > 0 {
            let d = decimals - 1;
            return format!("{x:.d$}");
        }
        s
    } else {
        format!("{x:.5e}")
    }
}

pub fn csv_string(report: &SimReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &report.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_sig(p.snr_db),
            p.frames,
            p.bit_errors,
            p.block_errors,
            format_sig(p.ber()),
            format_sig(p.bler()),
            format_sig(p.avg_iters()),
            format_sig(p.info_bpcu())
        );
    }
    out
}

pub fn emit_csv(report: &SimReport, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(report)).map_err(|e| Error::io(path, e))
}

/// Sidecar path holding the configuration echo and per-point flags.
pub fn meta_path(csv: &Path) -> PathBuf {
    let mut name = csv
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".meta.toml");
    csv.with_file_name(name)
}

pub fn meta_string(report: &SimReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "wall_seconds = {:.3}", report.wall_seconds);
    let censored: Vec<String> = report
        .points
        .iter()
        .filter(|p| p.censored)
        .map(|p| format_sig(p.snr_db))
        .collect();
    let _ = writeln!(out, "censored_snr_db = [{}]", censored.join(", "));
    out.push_str("\n[checksums]\n");
    for (name, digest) in &report.checksums {
        let _ = writeln!(out, "\"{name}\" = \"{digest}\"");
    }
    out.push_str("\n[config]\n");
    out.push_str(&report.config);
    out
}

pub fn emit_meta(report: &SimReport, csv: &Path) -> Result<()> {
    let path = meta_path(csv);
    std::fs::write(&path, meta_string(report)).map_err(|e| Error::io(&path, e))
}

/// SNR where the BLER curve crosses `target`, interpolating `log10(BLER)`
/// linearly between the two bracketing points. Censored points and points
/// without errors are not used as the lower bracket.
pub fn snr_at_bler(points: &[PointStats], target: f64) -> Option<f64> {
    for pair in points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (la, lb) = (a.bler(), b.bler());
        if la >= target && lb < target {
            if lb == 0.0 || b.censored {
                return None;
            }
            let t = (la.log10() - target.log10()) / (la.log10() - lb.log10());
            return Some(a.snr_db + t * (b.snr_db - a.snr_db));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(snr: f64, frames: u64, errors: u64) -> PointStats {
        PointStats {
            frames,
            block_errors: errors,
            bit_errors: errors * 3,
            iterations: frames * 4,
            info_bits: frames * 10,
            ..PointStats::new(snr, 100, 5)
        }
    }

    fn report(points: Vec<PointStats>) -> SimReport {
        SimReport {
            mode: Mode::Shaped,
            config: "seed = 1\n".into(),
            points,
            wall_seconds: 1.0,
            checksums: vec![("bg1.csv".into(), "00".into())],
        }
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig(4.0), "4.00000");
        assert_eq!(format_sig(0.0123456789), "0.0123457");
        assert_eq!(format_sig(123456.7), "123457");
        assert_eq!(format_sig(1234567.0), "1.23457e6");
        assert_eq!(format_sig(1.5e-7), "1.50000e-7");
        assert_eq!(format_sig(-3.25), "-3.25000");
        assert_eq!(format_sig(9.999999), "10.0000");
        assert_eq!(format_sig(0.0), "0");
    }

    #[test]
    fn empty_sweep_is_header_only() {
        assert_eq!(csv_string(&report(vec![])), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn two_points_three_lines() {
        let text = csv_string(&report(vec![point(1.0, 100, 50), point(2.0, 1000, 5)]));
        assert_eq!(text.lines().count(), 3);
        assert!(!text.contains('\r'));
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "1.00000,100,150,50,0.0150000,0.500000,4.00000,2.00000"
        );
    }

    #[test]
    fn emission_is_byte_identical() {
        let dir = std::env::temp_dir().join(format!("pas-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let r = report(vec![point(1.0, 100, 50)]);
        let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
        emit_csv(&r, &a).unwrap();
        emit_csv(&r, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        emit_meta(&r, &a).unwrap();
        let meta: toml::Value =
            toml::from_str(&std::fs::read_to_string(meta_path(&a)).unwrap()).unwrap();
        assert_eq!(meta["config"]["seed"].as_integer(), Some(1));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn unwritable_path_names_the_file() {
        let err = emit_csv(&report(vec![]), Path::new("/nonexistent/dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/out.csv"));
    }

    #[test]
    fn bler_crossing() {
        let pts = vec![point(1.0, 100, 50), point(2.0, 1000, 5)];
        let snr = snr_at_bler(&pts, 0.05).unwrap();
        // log10 BLER goes from -0.301 to -2.301; -1.301 is halfway.
        assert!((snr - 1.5).abs() < 1e-12);
        assert_eq!(snr_at_bler(&pts, 0.9), None);
        let mut censored = pts.clone();
        censored[1].censored = true;
        assert_eq!(snr_at_bler(&censored, 0.05), None);
    }

    #[test]
    fn counters_stay_consistent() {
        let p = point(1.0, 100, 50);
        assert!(p.ber() <= 1.0);
        assert!(p.bler() >= p.ber() / p.bits_per_frame as f64);
    }
}
