// Scratch calibration for the n=8, k=4, P=0.9 coherent/incoherent ratio.
// Temporary tool; not part of the library surface.

use qstopwatch_core::compressor::{decode, encode, frequency_project, ProjectionWindow, WindowPolicy};
use qstopwatch_core::clock::{ensemble_state, rotate_block_state, ClockParams};
use qstopwatch_core::estimation::{circular_distance, delta_from_errors, Mle, TimeEstimator};
use qstopwatch_core::protocols::signed_circular_error;
use qstopwatch_core::rng::derive_rng;
use qstopwatch_core::sampling::{CovariantSampler, LocalPovmSampler};
use qstopwatch_core::spin::{block_state, BlockState, Spin};
use rayon::prelude::*;

const TAU: f64 = std::f64::consts::TAU;

fn coherent_state_postselected(n: u32, t_total: f64, kept: &[i32]) -> BlockState {
    let st = rotate_block_state(&ensemble_state(&ClockParams::pure(n, 0.0)).unwrap(), t_total);
    let e = &st.entries[0];
    let window = ProjectionWindow::from_kept(e.spin, kept.to_vec()).unwrap();
    let (rec, out) = frequency_project(&e.block, &window);
    // remove the replacement term and renormalize
    let mut mat = out.mat.clone();
    let w = kept.len() as f64;
    for &m in kept {
        let i = e.spin.index_of(m).unwrap();
        mat[(i, i)] -= num_complex::Complex64::new(rec.leakage / w, 0.0);
    }
    mat /= num_complex::Complex64::new(1.0 - rec.leakage, 0.0);
    BlockState {
        n,
        entries: vec![qstopwatch_core::spin::BlockEntry {
            spin: e.spin,
            weight: 1.0,
            block: qstopwatch_core::spin::SpinBlock { spin: e.spin, mat },
            ln_mult: e.ln_mult,
        }],
    }
}

fn coherent_state(n: u32, t_total: f64, kept: &[i32]) -> BlockState {
    // gamma = 0, pure: single top block; project once, evolve (order
    // irrelevant), decode.
    let st = rotate_block_state(&ensemble_state(&ClockParams::pure(n, 0.0)).unwrap(), t_total);
    let e = &st.entries[0];
    let window = ProjectionWindow::from_kept(e.spin, kept.to_vec()).unwrap();
    let (_, out) = frequency_project(&e.block, &window);
    BlockState {
        n,
        entries: vec![qstopwatch_core::spin::BlockEntry {
            spin: e.spin,
            weight: 1.0,
            block: out,
            ln_mult: e.ln_mult,
        }],
    }
}

fn delta_cov(state: &BlockState, t: f64, trials: usize, big_p: f64) -> f64 {
    let sampler = CovariantSampler::new(state);
    let errs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(1234, 7, i as u64);
            circular_distance(sampler.sample(&mut rng), t.rem_euclid(TAU))
        })
        .collect();
    delta_from_errors(&errs, big_p)
}

fn delta_local_est(state: &BlockState, t: f64, trials: usize, big_p: f64, est: &dyn TimeEstimator) -> f64 {
    let sampler = LocalPovmSampler::new(state, t).unwrap();
    let errs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(4321, 8, i as u64);
            let outcomes = sampler.sample(&mut rng);
            circular_distance(est.estimate(&outcomes).t_hat, t.rem_euclid(TAU))
        })
        .collect();
    delta_from_errors(&errs, big_p)
}

fn delta_local(state: &BlockState, t: f64, trials: usize, big_p: f64) -> f64 {
    delta_local_est(state, t, trials, big_p, &Mle::default())
}

fn delta_inc_local_est(round_state: &BlockState, t_round: f64, k: u32, trials: usize, big_p: f64, est: &dyn TimeEstimator) -> f64 {
    let sampler = LocalPovmSampler::new(round_state, t_round).unwrap();
    let errs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(10, 5, i as u64);
            (0..k)
                .map(|_| {
                    let outcomes = sampler.sample(&mut rng);
                    signed_circular_error(est.estimate(&outcomes).t_hat, t_round.rem_euclid(TAU))
                })
                .sum::<f64>()
                .abs()
        })
        .collect();
    delta_from_errors(&errs, big_p)
}

fn main() {
    let n = 8u32;
    let big_p = 0.9;
    let trials = 200_000usize;
    let t_total = 1.0f64;
    let k = 4u32;

    // plain states for reference & incoherent rounds
    let plain = block_state(n, t_total, 1.0, 0.5).unwrap();
    let plain_round = block_state(n, t_total / k as f64, 1.0, 0.5).unwrap();

    println!("== single-shot references (n=8, P=0.9) ==");
    let d_cov_plain = delta_cov(&plain, t_total, trials, big_p);
    let d_loc_plain = delta_local(&plain, t_total, trials, big_p);
    println!("delta covariant plain : {d_cov_plain:.4}");
    println!("delta local-mle plain : {d_loc_plain:.4}");
    println!("analytic leading order: {:.4}", qstopwatch_core::estimation::inaccuracy_analytic(8, big_p, 1.0));

    // incoherent: k rounds, sum of signed errors
    let cov_round = CovariantSampler::new(&plain_round);
    let t_round = (t_total / k as f64).rem_euclid(TAU);
    let errs_inc_cov: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(9, 2, i as u64);
            (0..k)
                .map(|_| signed_circular_error(cov_round.sample(&mut rng), t_round))
                .sum::<f64>()
                .abs()
        })
        .collect();
    let d_inc_cov = delta_from_errors(&errs_inc_cov, big_p);
    println!("delta incoherent covariant (k=4): {d_inc_cov:.4}");

    let loc_round = LocalPovmSampler::new(&plain_round, t_total / k as f64).unwrap();
    let est = Mle::default();
    let errs_inc_loc: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(10, 2, i as u64);
            (0..k)
                .map(|_| {
                    let outcomes = loc_round.sample(&mut rng);
                    signed_circular_error(est.estimate(&outcomes).t_hat, t_round)
                })
                .sum::<f64>()
                .abs()
        })
        .collect();
    let d_inc_loc = delta_from_errors(&errs_inc_loc, big_p);
    println!("delta incoherent local-mle (k=4): {d_inc_loc:.4}");

    println!("== coherent windows ==");
    let spin = Spin::from_doubled(8);
    let windows: Vec<(&str, Vec<i32>)> = vec![
        ("3 levels |m|<=1", spin.two_m_values().filter(|m| m.abs() <= 2).collect()),
        ("5 levels |m|<=2 (asymptotic)", spin.two_m_values().filter(|m| m.abs() <= 4).collect()),
        ("7 levels |m|<=3/2*2 (3 qubits)", spin.two_m_values().filter(|m| m.abs() <= 6).collect()),
        ("8 levels drop m=-4 (3 qubits)", spin.two_m_values().filter(|m| *m > -8).collect()),
    ];
    for (name, kept) in windows {
        let st = coherent_state(n, t_total, &kept);
        let d_cov = delta_cov(&st, t_total, trials, big_p);
        let d_loc = delta_local(&st, t_total, trials, big_p);
        println!(
            "{name}: d_cov={d_cov:.4} ratio_cov={:.4} | d_loc={d_loc:.4} ratio_loc={:.4} | ratio_loc/cov_inc={:.4}",
            d_cov / d_inc_cov,
            d_loc / d_inc_loc,
            d_loc / d_inc_cov,
        );
    }

    println!("== postselected (renormalized projection, no replacement) ==");
    for (name, kept) in [
        ("5 levels", spin.two_m_values().filter(|m| m.abs() <= 4).collect::<Vec<_>>()),
        ("7 levels", spin.two_m_values().filter(|m| m.abs() <= 6).collect::<Vec<_>>()),
    ] {
        let st = coherent_state_postselected(n, t_total, &kept);
        let d_cov = delta_cov(&st, t_total, trials, big_p);
        let d_loc = delta_local(&st, t_total, trials, big_p);
        println!(
            "{name}: d_cov={d_cov:.4} ratio_cov={:.4} (vs analytic inc {:.4}) | d_loc={d_loc:.4} ratio_loc={:.4}",
            d_cov / d_inc_cov,
            d_cov / (2.0 * 1.1630871536766743),
            d_loc / d_inc_loc,
        );
    }

    println!("== circular-mean estimator variants ==");
    use qstopwatch_core::estimation::CircularMean;
    let d_plain_cm = delta_local_est(&plain, t_total, trials, big_p, &CircularMean);
    println!("plain local circmean: {d_plain_cm:.4}");
    let d_inc_cm = delta_inc_local_est(&plain_round, t_total / k as f64, k, trials, big_p, &CircularMean);
    let d_inc_mle = delta_inc_local_est(&plain_round, t_total / k as f64, k, trials, big_p, &Mle::default());
    println!("incoherent local circmean (k=4): {d_inc_cm:.4}  (mle recheck {d_inc_mle:.4})");
    for (name, kept) in [
        ("5ch", spin.two_m_values().filter(|m| m.abs() <= 4).collect::<Vec<_>>()),
    ] {
        let st = coherent_state(n, t_total, &kept);
        let stp = coherent_state_postselected(n, t_total, &kept);
        let d_cm_ch = delta_local_est(&st, t_total, trials, big_p, &CircularMean);
        let d_cm_ps = delta_local_est(&stp, t_total, trials, big_p, &CircularMean);
        println!("{name}: circmean channel={d_cm_ch:.4} ratio={:.4} | postsel={d_cm_ps:.4} ratio={:.4}",
            d_cm_ch / d_inc_cm, d_cm_ps / d_inc_cm);
    }

    println!("== pinned p=1 MLE (known gamma=0) ==");
    use qstopwatch_core::estimation::{KnownDecay};
    let pinned = Mle { known_decay: Some(KnownDecay { gamma: 0.0, tau0: 0.0 }) };
    let d_plain_pin = delta_local_est(&plain, t_total, trials, big_p, &pinned);
    let d_inc_pin = delta_inc_local_est(&plain_round, t_total / k as f64, k, trials, big_p, &pinned);
    println!("plain pinned: {d_plain_pin:.4}  incoherent pinned: {d_inc_pin:.4}");
    for (name, kept) in [
        ("5", spin.two_m_values().filter(|m| m.abs() <= 4).collect::<Vec<_>>()),
    ] {
        let st = coherent_state(n, t_total, &kept);
        let stp = coherent_state_postselected(n, t_total, &kept);
        let d_pin_ch = delta_local_est(&st, t_total, trials, big_p, &pinned);
        let d_pin_ps = delta_local_est(&stp, t_total, trials, big_p, &pinned);
        println!("{name}: pinned channel={d_pin_ch:.4} r_incpin={:.4} r_inccov={:.4} | postsel={d_pin_ps:.4} r_incpin={:.4} r_inccov={:.4}",
            d_pin_ch / d_inc_pin, d_pin_ch / d_inc_cov, d_pin_ps / d_inc_pin, d_pin_ps / d_inc_cov);
    }

    // full ratio matrix summary
    println!("== mle empirical vs analytic across n ==");
    for nn in [8usize, 16, 32, 64, 100] {
        let stn = block_state(nn as u32, 1.0, 1.0, 0.5).unwrap();
        let d = delta_local_est(&stn, 1.0, 20_000, big_p, &Mle::default());
        let want = qstopwatch_core::estimation::inaccuracy_analytic(nn, big_p, 1.0);
        println!("n={nn}: mle={d:.4} analytic={want:.4} rel={:+.3}", d / want - 1.0);
    }
    println!("== ratio matrix (coh/inc) ==");
    println!("inc options: cov={d_inc_cov:.4} locmle={d_inc_loc:.4} cm={d_inc_cm:.4} analytic=2.3262");

    // sanity: the stopwatch pipeline with QubitBudget(3) should equal the
    // 5-level window (asymptotic at J=4 keeps 5 levels too)
    let st5 = coherent_state(n, t_total, &spin.two_m_values().filter(|m| m.abs() <= 4).collect::<Vec<_>>());
    let enc = encode(&rotate_block_state(&ensemble_state(&ClockParams::pure(n, 0.0)).unwrap(), t_total), 0.5, WindowPolicy::Asymptotic).unwrap();
    let dec = decode(&enc, n).unwrap();
    let diff = (&st5.entries[0].block.mat - &dec.entries[0].block.mat).map(|z| z.norm()).max();
    println!("pipeline-vs-manual window diff: {diff:.2e}");
}
