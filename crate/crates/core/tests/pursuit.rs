#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use nalgebra::DMatrix;
use ris_align::ia_core::{objective_f0, FactorPair, PhaseVector};
use ris_align::pursuit::{
    recover_transceivers, riemannian_pursuit, riemannian_pursuit_with_phase, solve_fixed_rank, verify_alignment,
    PursuitOptions,
};
use ris_align::{ChannelSet32, Error, NetworkConfig};

fn siso(l: usize) -> NetworkConfig {
    NetworkConfig::symmetric(2, 1, 1, 1, l).unwrap()
}

#[test]
fn constructed_two_user_solution_is_exact() {
    let cfg = siso(0);
    let ch = rayleigh(&cfg, 1);
    let (us, vs) = two_user_time_extension(&ch, &mut rng(2));
    let rep = verify_alignment(&ch, &PhaseVector::empty(), &us, &vs, 1e-10).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.max_interference_leakage <= 1e-10 && rep.max_identity_deviation <= 1e-10);

    // Ũ = [U1 U2], Lf = Ũᴴ
    let lf = DMatrix::from_fn(2, 2, |m, k| us[m][(k, 0)].conj());
    let rf = DMatrix::from_fn(2, 2, |n, k| vs[n][(k, 0)].conj());
    let y = FactorPair::new(lf, rf).unwrap();
    assert!(objective_f0(&ch, &y, &PhaseVector::empty()).unwrap() <= 1e-20);

    let out = solve_fixed_rank(&ch, (y.clone(), PhaseVector::empty()), &PursuitOptions::default()).unwrap();
    assert_eq!(out.history.alternations, 0);
    assert_eq!(out.factors, y);
}

#[test]
fn three_user_fixed_rank_one_reaches_tolerance() {
    let cfg = NetworkConfig::symmetric(3, 2, 2, 1, 0).unwrap();
    let opts = PursuitOptions::default();
    for seed in 0..3 {
        let ch = rayleigh(&cfg, 40 + seed);
        let best = (0..3)
            .map(|restart| {
                let mut r = rng(100 * seed + restart);
                let y = random_factors(&mut r, &cfg, 1, 1.0 / 12f64.sqrt());
                solve_fixed_rank(&ch, (y, PhaseVector::empty()), &opts)
                    .unwrap()
                    .residual
            })
            .fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-4, "seed {seed}: best residual {best:e}");
    }
}

#[test]
fn two_user_siso_rank_one_stalls() {
    let cfg = siso(0);
    let ch = rayleigh(&cfg, 3);
    for restart in 0..3 {
        let y = random_factors(&mut rng(restart), &cfg, 1, 0.5);
        let out = solve_fixed_rank(&ch, (y, PhaseVector::empty()), &PursuitOptions::default()).unwrap();
        assert!(out.residual > 1e-2, "restart {restart}: {:e}", out.residual);
    }
}

#[test]
fn objective_never_increases_across_block_updates() {
    let cfg = NetworkConfig::symmetric(2, 2, 2, 1, 6).unwrap();
    for seed in 0..4 {
        let ch = rayleigh(&cfg, seed);
        let mut r = rng(seed + 50);
        let y = random_factors(&mut r, &cfg, 1, 0.3);
        let v = random_phase(&mut r, 6);
        let out = solve_fixed_rank(&ch, (y, v), &PursuitOptions::default()).unwrap();
        let obj = &out.history.objective;
        assert!(obj.len() >= 2);
        assert!(obj.windows(2).all(|w| w[1] <= w[0] + 1e-10), "{obj:?}");
        assert_eq!(*obj.last().unwrap(), out.residual);
    }
}

#[test]
fn siso_pursuit_detects_time_extension_without_ris() {
    for seed in 0..5 {
        let sol = riemannian_pursuit(
            &rayleigh(&siso(0), seed),
            &PursuitOptions {
                seed,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(sol.feasible);
        assert_eq!(sol.rank, 2);
        assert_eq!(sol.dof, Some(1.0));
        assert!(sol.phase.is_none());
    }
}

#[test]
fn siso_pursuit_with_small_ris_reaches_full_dof() {
    let hits = (0..6u64)
        .filter(|&seed| {
            let sol = riemannian_pursuit(
                &rayleigh(&siso(2), seed),
                &PursuitOptions {
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            sol.feasible && sol.rank == 1 && sol.dof == Some(2.0)
        })
        .count();
    assert!(hits >= 4, "{hits}/6");
}

#[test]
fn rank_budget_below_minimum_reports_infeasible() {
    let opts = PursuitOptions {
        r_max: 1,
        ..Default::default()
    };
    let sol = riemannian_pursuit(&rayleigh(&siso(0), 9), &opts).unwrap();
    assert!(!sol.feasible);
    assert!(sol.residual > opts.outer_tol);
    assert_eq!(sol.dof, None);
    assert_eq!(sol.trace.len(), 3);
}

#[test]
fn solution_invariants_and_dense_consistency() {
    let cfg = NetworkConfig::new(vec![2, 2, 2], vec![2, 3, 2], vec![1, 1, 1], 4).unwrap();
    for seed in 0..3 {
        let ch = rayleigh(&cfg, seed);
        let opts = PursuitOptions {
            seed,
            ..Default::default()
        };
        let sol = riemannian_pursuit(&ch, &opts).unwrap();
        assert!(sol.feasible);
        assert!(sol.residual <= opts.outer_tol);
        assert_eq!(sol.dof, Some(3.0 / sol.rank as f64));
        assert!((opts.r_start..=opts.r_max).contains(&sol.rank));
        assert!(!sol.trace.is_empty() && sol.trace.iter().all(|a| a.rank <= sol.rank));

        let v = sol.phase.clone().unwrap();
        let f0 = objective_f0(&ch, &sol.factors, &v).unwrap();
        let dense = dense_f0(&ch, &v, &sol.decoders, &sol.precoders, sol.rank);
        // entrywise round-off of the residual is about 1e-15, so f₀ is only
        // resolved to √(2f₀)·1e-15 in absolute terms
        let slack = 1e-9 * f0 + 1e-14 * (2.0 * f0).sqrt();
        assert!((f0 - dense).abs() <= slack, "{f0:e} vs {dense:e}");
        assert!((f0 - sol.residual).abs() <= slack, "{f0:e} vs {:e}", sol.residual);

        let rep = verify_alignment(&ch, &v, &sol.decoders, &sol.precoders, opts.verification_tol()).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
}

#[test]
fn pursuit_is_deterministic_per_seed() {
    let cfg = siso(3);
    let ch = rayleigh(&cfg, 4);
    let opts = PursuitOptions {
        seed: 17,
        ..Default::default()
    };
    assert_eq!(
        riemannian_pursuit(&ch, &opts).unwrap(),
        riemannian_pursuit(&ch, &opts).unwrap()
    );
}

#[test]
fn warm_start_option_still_detects_rank() {
    let opts = PursuitOptions {
        warm_start_rank_increase: true,
        ..Default::default()
    };
    let sol = riemannian_pursuit(&rayleigh(&siso(0), 2), &opts).unwrap();
    assert!(sol.feasible && sol.rank == 2);
}

#[test]
fn frozen_phase_is_returned_unchanged() {
    let cfg = siso(4);
    let ch = rayleigh(&cfg, 6);
    let v = random_phase(&mut rng(1), 4);
    let sol = riemannian_pursuit_with_phase(&ch, &PursuitOptions::default(), v.clone()).unwrap();
    assert_eq!(sol.phase, Some(v));
    let err = riemannian_pursuit_with_phase(&ch, &PursuitOptions::default(), PhaseVector::empty()).unwrap_err();
    assert!(matches!(err, Error::Shape(_)));
}

#[test]
fn detected_rank_drops_with_ris_on_average() {
    let mean_rank = |l: usize| {
        (0..20u64)
            .map(|seed| {
                let sol = riemannian_pursuit(
                    &rayleigh(&siso(l), seed),
                    &PursuitOptions {
                        seed,
                        ..Default::default()
                    },
                )
                .unwrap();
                if sol.feasible {
                    sol.rank as f64
                } else {
                    5.0
                }
            })
            .sum::<f64>()
            / 20.0
    };
    let (with, without) = (mean_rank(4), mean_rank(0));
    assert!(with <= without, "{with} vs {without}");
}

#[test]
fn scalar_recovery_and_round_trip() {
    let cfg = NetworkConfig::symmetric(1, 1, 1, 1, 0).unwrap();
    let l = C::new(0.3, -1.2);
    let r = C::new(-0.7, 0.4);
    let y = FactorPair::new(DMatrix::from_element(1, 1, l), DMatrix::from_element(1, 1, r)).unwrap();
    let (us, vs) = recover_transceivers(&y, &cfg).unwrap();
    assert_eq!(us[0][(0, 0)], l.conj());
    assert_eq!(vs[0][(0, 0)], r.conj());

    let cfg = NetworkConfig::new(vec![2, 3], vec![3, 1], vec![2, 1], 0).unwrap();
    let y = random_factors(&mut rng(8), &cfg, 2, 1.0);
    let x = y.product();
    let (us, vs) = recover_transceivers(&y, &cfg).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            for m in 0..cfg.rx_antennas[i] {
                for n in 0..cfg.tx_antennas[j] {
                    let (di, dj) = (cfg.streams[i], cfg.streams[j]);
                    let um = us[i].view((m * 2, 0), (2, di));
                    let vn = vs[j].view((n * 2, 0), (2, dj));
                    let block = um.adjoint() * vn;
                    let sub = x.view((cfg.row_offset(i) + m * di, cfg.col_offset(j) + n * dj), (di, dj));
                    assert!((block - sub).camax() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn recovery_rejects_rank_deficient_factor() {
    let cfg = siso(0);
    let col = cvec(&mut rng(3), 4);
    let y = DMatrix::from_columns(&[col.clone(), col]);
    let err = recover_transceivers(&FactorPair::from_stacked(&y, 2), &cfg).unwrap_err();
    assert!(matches!(err, Error::RankDeficient { .. }));
}

#[test]
fn verify_reports_zero_decoders_and_random_transceivers() {
    let cfg = NetworkConfig::new(vec![2, 2], vec![2, 2], vec![1, 2], 3).unwrap();
    let ch = rayleigh(&cfg, 5);
    let mut r = rng(6);
    let v = random_phase(&mut r, 3);
    let vs: Vec<_> = (0..2).map(|j| cmat(&mut r, 2 * 2, cfg.streams[j])).collect();
    let zeros: Vec<_> = (0..2).map(|i| DMatrix::zeros(2 * 2, cfg.streams[i])).collect();
    let rep = verify_alignment(&ch, &v, &zeros, &vs, 1e-3).unwrap();
    assert_eq!(rep.max_interference_leakage, 0.0);
    assert!((rep.max_identity_deviation - 2f64.sqrt()).abs() < 1e-15);
    assert!(!rep.pass);

    let us: Vec<_> = (0..2).map(|i| cmat(&mut r, 2 * 2, cfg.streams[i])).collect();
    assert!(!verify_alignment(&ch, &v, &us, &vs, 1e-3).unwrap().pass);
}

#[test]
fn single_precision_pursuit() {
    let cfg = siso(0);
    let ch64 = rayleigh(&cfg, 1);
    let to32 = |m: &DMatrix<C>| m.map(|z| nalgebra::Complex::new(z.re as f32, z.im as f32));
    let ch = ChannelSet32::new(
        ris_align::ia_core::ChannelGrid::new(cfg.clone(), ch64.direct.blocks().iter().map(to32).collect()).unwrap(),
        ch64.ris_rx.iter().map(to32).collect(),
        ch64.tx_ris.iter().map(to32).collect(),
        1.0,
        1.0,
    )
    .unwrap();
    let opts = PursuitOptions {
        inner: ris_align::manifolds::RcgOptions {
            grad_tol: 1e-6,
            ..Default::default()
        },
        ..Default::default()
    };
    let sol = riemannian_pursuit(&ch, &opts).unwrap();
    assert!(sol.feasible, "{}", sol.residual);
    assert_eq!(sol.rank, 2);
}
