mod common;

use common::{db, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use ris_im::channel::{
    align_phases, complex_gaussian, received_signals, sample_channel, ChannelRealization, NoiseSpec,
};
use ris_im::detectors::{greedy_sm, greedy_ssk, ml_sm, ml_sm_cached, ml_ssk, HypothesisSignals};
use ris_im::modulation::{Constellation, ConstellationKind};
use ris_im::theory::sep_conditioned;
use ris_im::Error;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn constellation(kind: ConstellationKind, m: usize) -> Constellation {
    Constellation::build(kind, m, 1.0).unwrap()
}

/// Hypothesis signals straight from the gains: target `m`, antenna `l`.
fn brute_hypotheses(ch: &ChannelRealization) -> Vec<Vec<Complex64>> {
    let (nr, n) = (ch.n_rx(), ch.n_ref());
    (0..nr)
        .map(|m| {
            (0..nr)
                .map(|l| {
                    (0..n)
                        .map(|i| ch.gain(l, i) * ch.gain(m, i).conj() / ch.gain(m, i).norm())
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Exhaustive minimum over `(antenna, label)` in lexicographic order.
fn brute_ml(r: &[Complex64], h: &[Vec<Complex64>], symbols: &[Complex64]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_d = f64::INFINITY;
    for (m, hm) in h.iter().enumerate() {
        for (k, &x) in symbols.iter().enumerate() {
            let d: f64 = r.iter().zip(hm).map(|(a, b)| (a - b * x).norm_sqr()).sum();
            if d < best_d {
                best_d = d;
                best = (m, k);
            }
        }
    }
    best
}

fn transmit(ch: &ChannelRealization, m: usize, x: Complex64, n0: f64, r: &mut impl Rng) -> Vec<Complex64> {
    let p = align_phases(ch, m).unwrap();
    let noise = if n0 == 0.0 {
        NoiseSpec::noiseless(1.0)
    } else {
        NoiseSpec::new(1.0, n0)
    }
    .unwrap();
    received_signals(ch, &p, x, &noise, r).unwrap()
}

#[test]
fn greedy_ssk_examples() {
    assert_eq!(greedy_ssk(&[cx(3.0, 0.0), cx(1.0, 0.0)]).unwrap().antenna, 0);
    assert_eq!(greedy_ssk(&[cx(1.0, 1.0), cx(1.0, -1.0)]).unwrap().antenna, 0);
    let d = greedy_ssk(&[cx(0.0, 0.0), cx(0.0, 0.5), cx(2.0, 0.0), cx(-2.0, 0.0)]).unwrap();
    assert_eq!((d.antenna, d.metric, d.evaluated), (2, 4.0, 4));
    assert!(matches!(greedy_ssk(&[]), Err(Error::Dimension(_))));
}

#[test]
fn greedy_ssk_noiseless_always_correct_at_n32() {
    let mut r = rng(100);
    let mut ch = sample_channel(4, 32, &mut r).unwrap();
    let one = cx(1.0, 0.0);
    for t in 0..10_000 {
        ch.resample(&mut r);
        let m = t % 4;
        let y = transmit(&ch, m, one, 0.0, &mut r);
        assert_eq!(greedy_ssk(&y).unwrap().antenna, m);
    }
}

#[test]
fn ml_ssk_noiseless_and_two_hypothesis_metric() {
    let mut r = rng(101);
    let es: f64 = 1.7;
    let ch = sample_channel(2, 16, &mut r).unwrap();
    let y = transmit(&ch, 1, cx(es.sqrt(), 0.0), 0.0, &mut r);
    let d = ml_ssk(&y, &ch, es).unwrap();
    assert_eq!(d.antenna, 1);
    assert!(d.metric < 1e-20);
    let h = brute_hypotheses(&ch);
    let x = cx(es.sqrt(), 0.0);
    for _ in 0..2000 {
        let y: Vec<Complex64> = (0..2).map(|_| complex_gaussian(&mut r, 20.0)).collect();
        let d0: f64 = (0..2).map(|l| (y[l] - h[0][l] * x).norm_sqr()).sum();
        let d1: f64 = (0..2).map(|l| (y[l] - h[1][l] * x).norm_sqr()).sum();
        let expect = if d1 < d0 { 1 } else { 0 };
        assert_eq!(ml_ssk(&y, &ch, es).unwrap().antenna, expect);
    }
}

#[test]
fn ml_rejects_dimension_mismatch() {
    let mut r = rng(102);
    let ch = sample_channel(4, 8, &mut r).unwrap();
    let y = vec![cx(0.0, 0.0); 2];
    assert!(matches!(ml_ssk(&y, &ch, 1.0), Err(Error::Dimension(_))));
    let q = constellation(ConstellationKind::Qam, 4);
    assert!(matches!(ml_sm(&y, &ch, &q), Err(Error::Dimension(_))));
}

#[test]
fn ml_ssk_no_worse_than_greedy_paired() {
    let mut r = rng(103);
    let mut ch = sample_channel(2, 64, &mut r).unwrap();
    let n0 = 1.0 / db(-28.0);
    let one = cx(1.0, 0.0);
    let (mut eg, mut em) = (0u32, 0u32);
    for t in 0..100_000 {
        ch.resample(&mut r);
        let m = t % 2;
        let y = transmit(&ch, m, one, n0, &mut r);
        eg += (greedy_ssk(&y).unwrap().antenna != m) as u32;
        em += (ml_ssk(&y, &ch, 1.0).unwrap().antenna != m) as u32;
    }
    assert!(eg > 100, "operating point too clean: {eg}");
    assert!(em <= eg, "ML {em} > greedy {eg}");
}

#[test]
fn greedy_sm_noiseless_recovery() {
    let mut r = rng(104);
    for (kind, order) in [
        (ConstellationKind::Psk, 2),
        (ConstellationKind::Psk, 4),
        (ConstellationKind::Psk, 8),
        (ConstellationKind::Qam, 4),
        (ConstellationKind::Qam, 16),
    ] {
        let c = constellation(kind, order);
        let mut ch = sample_channel(4, 64, &mut r).unwrap();
        for t in 0..2000 {
            ch.resample(&mut r);
            let (m, k) = (t % 4, (t / 4) % order);
            let y = transmit(&ch, m, c.point(k as u32), 0.0, &mut r);
            let amps: Vec<f64> = (0..4).map(|l| ch.amplitude_sum(l)).collect();
            let d = greedy_sm(&y, Some(&amps), &c).unwrap();
            assert_eq!((d.antenna, d.label), (m, Some(k as u32)), "{kind:?}-{order}");
            assert_eq!(d.evaluated, 4 + order);
        }
    }
}

#[test]
fn greedy_psk_ignores_amplitudes() {
    let mut r = rng(105);
    let c = constellation(ConstellationKind::Psk, 8);
    for _ in 0..5000 {
        let y: Vec<Complex64> = (0..4).map(|_| complex_gaussian(&mut r, 3.0)).collect();
        let junk: Vec<f64> = (0..4).map(|_| r.random_range(-1e3..1e3)).collect();
        let a = greedy_sm(&y, None, &c).unwrap();
        let b = greedy_sm(&y, Some(&junk), &c).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn greedy_qam_requires_amplitudes() {
    let q = constellation(ConstellationKind::Qam, 16);
    let y = [cx(1.0, 0.0), cx(0.0, 0.0)];
    assert!(matches!(greedy_sm(&y, None, &q), Err(Error::Configuration(_))));
    assert!(matches!(greedy_sm(&y, Some(&[1.0]), &q), Err(Error::Dimension(_))));
}

#[test]
fn ml_sm_noiseless_exhaustive() {
    let mut r = rng(106);
    for kind in [ConstellationKind::Qam, ConstellationKind::Psk] {
        let c = constellation(kind, 4);
        for _ in 0..50 {
            let ch = sample_channel(4, 16, &mut r).unwrap();
            for m in 0..4 {
                for k in 0..4u32 {
                    let y = transmit(&ch, m, c.point(k), 0.0, &mut r);
                    let d = ml_sm(&y, &ch, &c).unwrap();
                    assert_eq!((d.antenna, d.label), (m, Some(k)));
                    assert_eq!(d.evaluated, 16);
                }
            }
        }
    }
}

#[test]
fn ml_matches_brute_force_enumeration() {
    let mut r = rng(107);
    let configs = [
        (2, None),
        (4, None),
        (2, Some((ConstellationKind::Psk, 2))),
        (2, Some((ConstellationKind::Qam, 4))),
        (4, Some((ConstellationKind::Psk, 4))),
        (4, Some((ConstellationKind::Qam, 4))),
    ];
    for (nr, modu) in configs {
        let c = modu.map(|(k, m)| constellation(k, m));
        let symbols = c.as_ref().map_or(vec![cx(1.0, 0.0)], |c| c.points().to_vec());
        let mut agree = 0;
        for t in 0..10_000 {
            let ch = sample_channel(nr, 8, &mut r).unwrap();
            let m = t % nr;
            let x = symbols[(t / nr) % symbols.len()];
            // SNR spans -10 dB to 10 dB relative to the aligned gain so errors occur
            let n0 = 8.0 * db(r.random_range(-10.0..10.0));
            let y = transmit(&ch, m, x, n0, &mut r);
            let (bm, bk) = brute_ml(&y, &brute_hypotheses(&ch), &symbols);
            let d = match &c {
                None => ml_ssk(&y, &ch, 1.0).unwrap(),
                Some(c) => ml_sm(&y, &ch, c).unwrap(),
            };
            if d.antenna == bm && d.label.map_or(0, |l| l as usize) == bk {
                agree += 1;
            }
        }
        assert_eq!(agree, 10_000, "n_R={nr} {modu:?}");
    }
}

#[test]
fn cached_hypotheses_match_direct_evaluation() {
    let mut r = rng(108);
    let c = constellation(ConstellationKind::Qam, 16);
    let mut ch = sample_channel(8, 24, &mut r).unwrap();
    let mut hyp = HypothesisSignals::new(&ch);
    let mut scratch = Vec::new();
    for _ in 0..200 {
        ch.resample(&mut r);
        hyp.refresh(&ch, &mut scratch);
        let brute = brute_hypotheses(&ch);
        for (m, row) in brute.iter().enumerate() {
            for (a, b) in hyp.target(m).iter().zip(row) {
                assert!((a - b).norm() < 1e-10);
            }
        }
        let y: Vec<Complex64> = (0..8).map(|_| complex_gaussian(&mut r, 30.0)).collect();
        assert_eq!(ml_sm_cached(&y, &hyp, &c).unwrap(), ml_sm(&y, &ch, &c).unwrap());
    }
}

#[test]
fn ml_sm_no_worse_than_greedy_paired() {
    let mut r = rng(109);
    let c = constellation(ConstellationKind::Psk, 4);
    let mut ch = sample_channel(2, 64, &mut r).unwrap();
    for snr_db in [-28.0, -24.0] {
        let n0 = 1.0 / db(snr_db);
        let (mut eg, mut em) = (0u32, 0u32);
        for t in 0..40_000 {
            ch.resample(&mut r);
            let (m, k) = (t % 2, ((t / 2) % 4) as u32);
            let y = transmit(&ch, m, c.point(k), n0, &mut r);
            let bits = |am: usize, lbl: u32| (am ^ m).count_ones() + (lbl ^ k).count_ones();
            let g = greedy_sm(&y, None, &c).unwrap();
            let o = ml_sm(&y, &ch, &c).unwrap();
            eg += bits(g.antenna, g.label.unwrap());
            em += bits(o.antenna, o.label.unwrap());
        }
        assert!(eg > 50, "{snr_db} dB: too clean");
        assert!(em <= eg, "{snr_db} dB: ML {em} > greedy {eg}");
    }
}

#[test]
fn qam16_conditional_ser_matches_theory() {
    let mut r = rng(110);
    let c = constellation(ConstellationKind::Qam, 16);
    let snr_db = -20.0;
    let n0 = 1.0 / db(snr_db);
    let mut ch = sample_channel(2, 64, &mut r).unwrap();
    let (mut correct_index, mut sym_err) = (0u64, 0u64);
    for t in 0..200_000u32 {
        ch.resample(&mut r);
        let (m, k) = ((t % 2) as usize, (t / 2) % 16);
        let y = transmit(&ch, m, c.point(k), n0, &mut r);
        let amps = [ch.amplitude_sum(0), ch.amplitude_sum(1)];
        let d = greedy_sm(&y, Some(&amps), &c).unwrap();
        if d.antenna == m {
            correct_index += 1;
            sym_err += (d.label != Some(k)) as u64;
        }
    }
    let ser = sym_err as f64 / correct_index as f64;
    let theory = sep_conditioned(&c, 64, db(snr_db)).unwrap();
    let se = (theory * (1.0 - theory) / correct_index as f64).sqrt();
    assert!(sym_err > 500, "too few symbol errors: {sym_err}");
    // Monte Carlo spread plus the Gaussian approximation of the gain sum
    assert!(
        (ser - theory).abs() < 4.0 * se + 0.05 * theory,
        "sim {ser} vs theory {theory}"
    );
}

fn scaled(ch: &ChannelRealization, a: f64) -> ChannelRealization {
    let g = ch.gains().iter().map(|g| g * a).collect();
    ChannelRealization::from_gains(ch.n_rx(), ch.n_ref(), g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decisions_are_scale_invariant(seed in any::<u64>(), a in 0.01f64..100.0) {
        let mut r = rng(seed);
        let ch = sample_channel(4, 12, &mut r).unwrap();
        let q = constellation(ConstellationKind::Qam, 16);
        let y: Vec<Complex64> = (0..4).map(|_| complex_gaussian(&mut r, 20.0)).collect();
        let ya: Vec<Complex64> = y.iter().map(|v| v * a).collect();
        let amps: Vec<f64> = (0..4).map(|l| ch.amplitude_sum(l)).collect();
        let amps_a: Vec<f64> = amps.iter().map(|v| v * a).collect();
        let cha = scaled(&ch, a);

        prop_assert_eq!(greedy_ssk(&y).unwrap().antenna, greedy_ssk(&ya).unwrap().antenna);
        let (g, ga) = (greedy_sm(&y, Some(&amps), &q).unwrap(), greedy_sm(&ya, Some(&amps_a), &q).unwrap());
        prop_assert_eq!((g.antenna, g.label), (ga.antenna, ga.label));
        prop_assert_eq!(ml_ssk(&y, &ch, 1.0).unwrap().antenna, ml_ssk(&ya, &cha, 1.0).unwrap().antenna);
        let (o, oa) = (ml_sm(&y, &ch, &q).unwrap(), ml_sm(&ya, &cha, &q).unwrap());
        prop_assert_eq!((o.antenna, o.label), (oa.antenna, oa.label));
    }
}

#[test]
fn hypothesis_counts_scale_with_search_space() {
    let mut r = rng(111);
    for nr in [2usize, 4, 8] {
        let ch = sample_channel(nr, 8, &mut r).unwrap();
        let y: Vec<Complex64> = (0..nr).map(|_| complex_gaussian(&mut r, 1.0)).collect();
        assert_eq!(greedy_ssk(&y).unwrap().evaluated, nr);
        assert_eq!(ml_ssk(&y, &ch, 1.0).unwrap().evaluated, nr);
        for m in [2usize, 4, 16] {
            let kind = if m == 2 {
                ConstellationKind::Psk
            } else {
                ConstellationKind::Qam
            };
            let c = constellation(kind, m);
            assert_eq!(ml_sm(&y, &ch, &c).unwrap().evaluated, nr * m);
        }
    }
}
