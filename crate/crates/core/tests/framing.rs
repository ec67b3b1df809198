//! Frame assembly, disassembly, rate accounting and LLR routing.

use num_rational::Ratio;
use pas_core::analysis::binary_entropy;
use pas_core::channel::LlrFrame;
use pas_core::framing::{
    code_rate, info_rate, CodeMap, FrameConfig, Provenance, ShapedFramer, Slot,
};
use pas_core::ldpc::{BaseGraph, BaseGraphKind, LiftedCode, MinSumDecoder};
use pas_core::shaping::{induce_distribution, ShapingParams};
use pas_core::Bit;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<Bit> {
    (0..n).map(|_| rng.random::<bool>() as Bit).collect()
}

fn flagship() -> (FrameConfig, LiftedCode, ShapedFramer) {
    let cfg = FrameConfig::flagship();
    let bg = BaseGraph::standard(BaseGraphKind::Bg1).unwrap();
    let code = LiftedCode::for_parity_bits(&bg, 384, cfg.parity_retained()).unwrap();
    let framer = ShapedFramer::new(cfg, &ShapingParams::reference_16ask(), &code).unwrap();
    (cfg, code, framer)
}

fn small(c: usize, c_prime: usize) -> (FrameConfig, LiftedCode, ShapedFramer) {
    let cfg = FrameConfig {
        m: 4,
        k: 60,
        q: 1,
        c,
        c_prime,
    };
    let bg = BaseGraph::standard(BaseGraphKind::Bg1).unwrap();
    let code = LiftedCode::for_parity_bits(&bg, 16, cfg.parity_retained()).unwrap();
    let framer = ShapedFramer::new(cfg, &ShapingParams::reference_16ask(), &code).unwrap();
    (cfg, code, framer)
}

#[test]
fn thousand_frames_loop_back() {
    let (_, code, framer) = flagship();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let info = random_bits(&mut rng, framer.max_info_bits());
        let frame = framer.assemble(&code, &info).unwrap();
        assert!(code.is_codeword(&frame.codeword));
        let rx = framer.disassemble(&frame.codeword);
        assert!(rx.ok);
        assert_eq!(rx.info, info[..frame.consumed]);
    }
}

#[test]
fn provenance_of_every_plane() {
    let (cfg, code, framer) = flagship();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let frame = framer
        .assemble(&code, &random_bits(&mut rng, framer.max_info_bits()))
        .unwrap();
    let prov = &frame.planes.provenance;
    assert_eq!(frame.symbols.len(), cfg.k);
    assert!(prov[0].iter().all(|&p| p == Provenance::Parity));
    assert!(prov[1].iter().all(|&p| p == Provenance::InfoUniform));
    assert!(prov[2].iter().all(|&p| p == Provenance::DmOutput));
    let b4_parity = prov[3].iter().filter(|&&p| p == Provenance::Parity).count();
    assert_eq!(b4_parity, cfg.k - cfg.c_prime + cfg.c);
    assert!(prov[3]
        .iter()
        .all(|&p| p == Provenance::Parity || p == Provenance::InfoUniform));
    // Label bits agree with the transmitted symbols.
    let sub = framer.sub_constellation();
    for s in 0..cfg.k {
        let bits: Vec<Bit> = (0..4).map(|l| frame.planes.levels[l][s]).collect();
        assert_eq!(sub.map_full(bits[0], &bits[1..]), frame.symbols[s]);
    }
}

#[test]
fn bit_count_audit_of_an_assembled_frame() {
    let (cfg, code, framer) = flagship();
    let map = framer.map();
    let sent_sys = map
        .slots()
        .iter()
        .filter(|s| matches!(s, Slot::Systematic(_)))
        .count();
    let sent_par = map
        .slots()
        .iter()
        .filter(|s| matches!(s, Slot::Parity(_)))
        .count();
    assert_eq!(sent_sys + sent_par, cfg.transmitted_bits());
    assert_eq!(sent_sys, cfg.systematic_payload() - cfg.c);
    assert_eq!(sent_par, cfg.parity_retained());
    // Rate from counted bits equals the closed form.
    assert_eq!(
        Ratio::new(sent_sys + cfg.c, cfg.transmitted_bits() + cfg.c),
        code_rate(&cfg)
    );
    assert_eq!(code_rate(&cfg), Ratio::new(5907, 8644));
    assert!(code.k_sys() >= cfg.systematic_payload());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn layouts_are_permutations(k in 40usize..120, c_frac in 0.0f64..1.0, cp_frac in 0.0f64..1.0) {
        let c = ((k as f64 * c_frac / 2.0) as usize).min(32);
        let c_prime = c + ((k - c) as f64 * cp_frac) as usize;
        let cfg = FrameConfig { m: 4, k, q: 1, c, c_prime };
        let bg = BaseGraph::standard(BaseGraphKind::Bg1).unwrap();
        let code = LiftedCode::for_parity_bits(&bg, 32, cfg.parity_retained()).unwrap();
        let map = CodeMap::shaped(&cfg, &code).unwrap();
        map.audit().unwrap();
        prop_assert_eq!(map.slots().len(), cfg.transmitted_bits());
        prop_assert_eq!(cfg.systematic_payload() - c + cfg.parity_retained(), 4 * k);
    }

    #[test]
    fn small_frames_loop_back(seed in any::<u64>(), c in 0usize..=32, extra in 0usize..=28) {
        let (_, code, framer) = small(c, c + extra);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info = random_bits(&mut rng, framer.max_info_bits());
        let frame = framer.assemble(&code, &info).unwrap();
        let rx = framer.disassemble(&frame.codeword);
        prop_assert!(rx.ok);
        prop_assert_eq!(&rx.info[..], &info[..frame.consumed]);
    }
}

#[test]
fn unpunctured_all_sign_bits_systematic() {
    // Every sign bit is systematic and nothing is punctured: b1 alone carries parity.
    let (cfg, code, framer) = small(0, 60);
    assert_eq!(code_rate(&cfg), Ratio::new(3, 4));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let info = random_bits(&mut rng, framer.max_info_bits());
    let frame = framer.assemble(&code, &info).unwrap();
    assert!(frame.planes.provenance[3]
        .iter()
        .all(|&p| p == Provenance::InfoUniform));
    assert_eq!(
        framer.disassemble(&frame.codeword).info,
        info[..frame.consumed]
    );
}

#[test]
fn no_systematic_sign_bits() {
    let (cfg, code, framer) = small(0, 0);
    assert_eq!(code_rate(&cfg), Ratio::new(1, 2));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let info = random_bits(&mut rng, framer.max_info_bits());
    let frame = framer.assemble(&code, &info).unwrap();
    assert!(frame.planes.provenance[3]
        .iter()
        .all(|&p| p == Provenance::Parity));
    assert_eq!(
        framer.disassemble(&frame.codeword).info,
        info[..frame.consumed]
    );
}

#[test]
fn garbage_fails_the_composition_check() {
    let (_, code, framer) = flagship();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let garbage = random_bits(&mut rng, code.len());
        assert!(!framer.disassemble(&garbage).ok);
    }
}

#[test]
fn single_flip_in_the_matcher_block_fails() {
    let (cfg, code, framer) = flagship();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let frame = framer
        .assemble(&code, &random_bits(&mut rng, framer.max_info_bits()))
        .unwrap();
    let b3 = cfg.c + cfg.k..cfg.c + 2 * cfg.k;
    for _ in 0..20 {
        let mut word = frame.codeword.clone();
        word[rng.random_range(b3.clone())] ^= 1;
        assert!(!framer.disassemble(&word).ok);
    }
}

#[test]
fn matcher_output_ignores_the_sign_bits() {
    let (cfg, code, framer) = flagship();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let info = random_bits(&mut rng, framer.max_info_bits());
    let mut other = info.clone();
    for b in &mut other[cfg.k..cfg.k + cfg.c_prime] {
        *b ^= 1;
    }
    let a = framer.assemble(&code, &info).unwrap();
    let b = framer.assemble(&code, &other).unwrap();
    assert_eq!(a.planes.levels[2], b.planes.levels[2]);
    assert_ne!(a.planes.levels[3], b.planes.levels[3]);
}

#[test]
fn short_input_is_an_underflow() {
    let (_, code, framer) = flagship();
    assert!(matches!(
        framer.assemble(&code, &[0; 100]),
        Err(pas_core::Error::Underflow { .. })
    ));
}

#[test]
fn histogram_and_quantification_bit() {
    let (cfg, code, framer) = flagship();
    let sub = framer.sub_constellation();
    let target = induce_distribution(&ShapingParams::reference_16ask(), sub)
        .unwrap()
        .full_constellation();
    let symbols = sub.base().symbols().to_vec();
    let mut counts = vec![0usize; symbols.len()];
    let mut b1_ones = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let frames = 100_000usize.div_ceil(cfg.k);
    for _ in 0..frames {
        let frame = framer
            .assemble(&code, &random_bits(&mut rng, framer.max_info_bits()))
            .unwrap();
        for &x in &frame.symbols {
            counts[sub.base().index_of(x).unwrap()] += 1;
        }
        b1_ones += frame.planes.levels[0].iter().filter(|&&b| b == 1).count();
    }
    let n = (frames * cfg.k) as f64;
    let tv: f64 = symbols
        .iter()
        .zip(&counts)
        .map(|(&x, &c)| (c as f64 / n - target.prob_of(x)).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.015, "{tv}");
    let bias = b1_ones as f64 / n;
    assert!((0.49..=0.51).contains(&bias), "{bias}");
}

#[test]
fn info_rate_accounting() {
    let (cfg, _, framer) = flagship();
    let h = 0.5 * binary_entropy(0.08) + 0.5 * binary_entropy(0.28);
    assert!((info_rate(&cfg, h * cfg.k as f64) - 2.629).abs() < 1e-3);
    let expected = framer.matcher().expected_payload_bits(cfg.k);
    let rate = info_rate(&cfg, expected);
    assert!(rate < 2.0 + h && rate > 2.6, "{rate}");
    let (small_cfg, _, small_framer) = small(0, 60);
    let tiny = FrameConfig {
        k: 10,
        c_prime: 10,
        ..small_cfg
    };
    let tiny_rate = info_rate(&tiny, small_framer.matcher().expected_payload_bits(10));
    assert!(tiny_rate < 2.0 + h - 0.1, "{tiny_rate}");
}

#[test]
fn llr_routing() {
    let (cfg, code, framer) = flagship();
    let map = framer.map();
    let values: Vec<f64> = (0..cfg.transmitted_bits())
        .map(|i| 1.0 + (i % 20) as f64)
        .collect();
    let routed = map
        .route_llrs(&LlrFrame {
            bits_per_symbol: 4,
            values: values.clone(),
        })
        .unwrap();
    assert_eq!(routed.len(), code.len());
    assert!(routed[..cfg.c].iter().all(|&v| v == 0.0));
    assert_eq!(routed.iter().take_while(|&&v| v == 0.0).count(), 768);
    assert!(routed[map.payload()..code.k_sys()]
        .iter()
        .all(|&v| v == f64::INFINITY));
    let unsent = &routed[code.k_sys() + map.parity_retained()..];
    assert!(unsent.iter().all(|&v| v == 0.0));
    for (i, &slot) in map.slots().iter().enumerate() {
        assert_eq!(routed[map.column(slot)], values[i]);
    }
    // Saturation and layout mismatch.
    let big = map
        .route_llrs(&LlrFrame {
            bits_per_symbol: 4,
            values: vec![-1e9; cfg.transmitted_bits()],
        })
        .unwrap();
    assert_eq!(big[map.column(map.slots()[0])], -30.0);
    assert!(map
        .route_llrs(&LlrFrame {
            bits_per_symbol: 4,
            values: vec![0.0; 8],
        })
        .is_err());
}

#[test]
fn clean_frame_decodes() {
    let (cfg, code, framer) = flagship();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let frame = framer
        .assemble(&code, &random_bits(&mut rng, framer.max_info_bits()))
        .unwrap();
    let labels = framer.map().gather(&frame.codeword);
    let llr = LlrFrame {
        bits_per_symbol: 4,
        values: labels
            .iter()
            .map(|&b| if b == 0 { 25.0 } else { -25.0 })
            .collect(),
    };
    let mut decoder = MinSumDecoder::new(&code);
    let out = decoder.decode(&framer.map().route_llrs(&llr).unwrap(), 50);
    assert!(out.converged && out.iterations <= 4, "{}", out.iterations);
    assert_eq!(out.bits, frame.codeword);
    assert_eq!(labels.len(), cfg.transmitted_bits());
}

#[test]
fn layout_export() {
    let (cfg, _, framer) = flagship();
    let text = framer.map().describe();
    assert!(text.contains("punctured=768"));
    assert!(text.contains("segment=b3,2737,4706"));
    let rows = text
        .lines()
        .skip_while(|l| !l.starts_with("symbol,"))
        .count()
        - 1;
    assert_eq!(rows, cfg.transmitted_bits());
    let dir = std::env::temp_dir().join(format!("pas-layout-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    framer.map().export(&dir.join("layout.txt")).unwrap();
    assert_eq!(
        std::fs::read_to_string(dir.join("layout.txt")).unwrap(),
        text
    );
    std::fs::remove_dir_all(&dir).unwrap();
}
