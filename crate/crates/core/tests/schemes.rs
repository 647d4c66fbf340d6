use cran_core::regions::{capacity_valuation, gcomp_theorem2_region};
use cran_core::schemes::*;
use cran_core::{lp_maximize, CranNetwork, JointCovariance};
use nalgebra::{DMatrix, Matrix2, RowVector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sub(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// `I(A;B)` from three determinants.
fn det_mi(m: &DMatrix<f64>, a: &[usize], b: &[usize]) -> f64 {
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    0.5 * (sub(m, a).determinant() * sub(m, b).determinant() / sub(m, &ab).determinant()).log2()
}

/// Dirty-paper sum rate with beams `w1`, `w2`, best encoding order.
fn dpc_beams(g: &[[f64; 2]; 2], w: [[f64; 2]; 2]) -> f64 {
    let q = |k: usize, u: usize| (g[k][0] * w[u][0] + g[k][1] * w[u][1]).powi(2);
    let order = |first: usize| {
        let last = 1 - first;
        0.5 * ((1.0 + q(first, first) + q(first, last)) / (1.0 + q(first, last))).log2() + 0.5 * (1.0 + q(last, last)).log2()
    };
    order(0).max(order(1))
}

/// Rank-one, full-power beams `w_u = √P (cos a_u, sin a_u)` per antenna
/// pair, searched on an angle grid of step 0.01 and then refined.
fn beam_grid(g: &[[f64; 2]; 2], p: f64) -> f64 {
    let s = p.sqrt();
    // Antenna k sends √P cos(a_k) for user 1 and √P sin(a_k) for user 2.
    let rate = |a0: f64, a1: f64| dpc_beams(g, [[s * a0.cos(), s * a1.cos()], [s * a0.sin(), s * a1.sin()]]);
    let n = (2.0 * std::f64::consts::PI / 0.01) as usize;
    let (mut best, mut b0, mut b1) = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (a0, a1) = (i as f64 * 0.01, j as f64 * 0.01);
            let r = rate(a0, a1);
            if r > best {
                (best, b0, b1) = (r, a0, a1);
            }
        }
    }
    let mut step = 1e-3;
    while step > 1e-8 {
        let (c0, c1) = (b0, b1);
        for i in -20..=20 {
            for j in -20..=20 {
                let (a0, a1) = (c0 + i as f64 * step, c1 + j as f64 * step);
                let r = rate(a0, a1);
                if r > best {
                    (best, b0, b1) = (r, a0, a1);
                }
            }
        }
        step /= 10.0;
    }
    best
}

#[test]
fn rsum_star_single_user_matches_a_beam_grid() {
    let p = 4.0;
    let g = DMatrix::from_row_slice(2, 2, &[0.8, -0.3, 0.0, 0.0]);
    let net = CranNetwork::new(g, p, vec![1.0, 1.0], DMatrix::zeros(2, 2)).unwrap();
    let r = rsum_star(&net, Budget { restarts: 16, ..Default::default() }).unwrap();
    // 2-D grid over the beam (w1, w2) in [-√P, √P]², step 0.01·√P.
    let s = p.sqrt();
    let mut grid = 0.0f64;
    for i in -100..=100 {
        for j in -100..=100 {
            let (w1, w2) = (s * i as f64 / 100.0, s * j as f64 / 100.0);
            grid = grid.max(0.5 * (1.0 + (0.8 * w1 - 0.3 * w2).powi(2)).log2());
        }
    }
    assert!((r - grid).abs() < 1e-6, "optimizer {r} vs grid {grid}");
}

#[test]
fn rsum_star_symmetric_instances_match_rank_one_full_power_beams() {
    for (p, g12, g21) in [(100.0, 0.5, -0.5), (10.0, 0.5, 0.5), (1.0, 0.9, 0.2)] {
        let net = CranNetwork::symmetric(p, g12, g21, 1.0, 0.0).unwrap();
        let r = rsum_star(&net, Budget::default()).unwrap();
        let grid = beam_grid(&[[1.0, g12], [g21, 1.0]], p);
        assert!((r - grid).abs() < 1e-3, "P={p} g=({g12},{g21}): optimizer {r} vs beams {grid}");
    }
}

#[test]
fn orthogonal_channel_reaches_zero_forcing() {
    // Rows of G are orthogonal with squared norm 1.25, so each user gets
    // ½·log2(1 + 1.25·P) without interference.
    let net = CranNetwork::symmetric(100.0, 0.5, -0.5, 1.0, 0.0).unwrap();
    let r = rsum_star(&net, Budget::default()).unwrap();
    assert!((r - 126f64.log2()).abs() < 1e-7, "{r}");
}

/// Covariance of (U0, V0, X, Y) for description I, assembled from the
/// source covariance by hand.
fn description_i_by_hand(k1: Matrix2<f64>, k2: Matrix2<f64>, a: Matrix2<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    // Sources: S1 (0..2), S2 (2..4), Z (4..6).
    let mut sigma = DMatrix::zeros(6, 6);
    sigma.view_mut((0, 0), (2, 2)).copy_from(&k1);
    sigma.view_mut((2, 2), (2, 2)).copy_from(&k2);
    sigma.view_mut((4, 4), (2, 2)).fill_with_identity();
    let mut m = DMatrix::zeros(8, 6);
    m.view_mut((0, 0), (2, 2)).fill_with_identity();
    m.view_mut((2, 0), (2, 2)).copy_from(&a);
    m.view_mut((2, 2), (2, 2)).fill_with_identity();
    m.view_mut((4, 0), (2, 2)).fill_with_identity();
    m.view_mut((4, 2), (2, 2)).fill_with_identity();
    m.view_mut((6, 0), (2, 2)).copy_from(g);
    m.view_mut((6, 2), (2, 2)).copy_from(g);
    m.view_mut((6, 4), (2, 2)).fill_with_identity();
    &m * sigma * m.transpose()
}

#[test]
fn description_i_matches_a_hand_assembled_covariance() {
    let p = 10.0;
    let net = CranNetwork::symmetric(p, 0.5, 0.5, 2.0, 0.0).unwrap();
    let half = Matrix2::identity() * (p / 2.0);
    let params = SchemeParams::I(DescriptionIParams { k1: [[p / 2.0, 0.0], [0.0, p / 2.0]], k2: [[p / 2.0, 0.0], [0.0, p / 2.0]] });
    let cov = build_joint_cov(&params, &net).unwrap();

    let g2 = RowVector2::new(0.5, 1.0);
    let a = half * g2.transpose() * g2 / (1.0 + (g2 * half * g2.transpose())[(0, 0)]);
    let hand = description_i_by_hand(half, half, a, &net.g);
    let (u0, v0, y1, y2) = ([0, 1], [2, 3], [6], [7]);
    for (name, ours, oracle) in [
        ("I(U0;Y1)", cov.gauss_mi(&["U0"], &["Y1"], &[]).unwrap(), det_mi(&hand, &u0, &y1)),
        ("I(V0;Y2)", cov.gauss_mi(&["V0"], &["Y2"], &[]).unwrap(), det_mi(&hand, &v0, &y2)),
        ("I(U0;V0)", cov.gauss_mi(&["U0"], &["V0"], &[]).unwrap(), det_mi(&hand, &u0, &v0)),
    ] {
        assert!((ours - oracle).abs() < 1e-9, "{name}: {ours} vs {oracle}");
    }
}

#[test]
fn dirty_paper_precoder_never_hurts_user_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p: f64 = rng.gen_range(0.5..50.0);
        let net = CranNetwork::symmetric(p, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 1.0, 0.0).unwrap();
        let mut random_k = |scale: f64| {
            let l = Matrix2::new(rng.gen_range(-1.0..1.0), 0.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            l * l.transpose() * scale + Matrix2::identity() * 1e-3
        };
        let (k1, k2) = (random_k(p / 4.0), random_k(p / 4.0));
        let g2 = RowVector2::new(net.g[(1, 0)], net.g[(1, 1)]);
        let term = |a: Matrix2<f64>| {
            let hand = description_i_by_hand(k1, k2, a, &net.g);
            det_mi(&hand, &[2, 3], &[7]) - det_mi(&hand, &[0, 1], &[2, 3])
        };
        let with = term(dirty_paper_precoder(&k2, &Matrix2::zeros(), &g2));
        let without = term(Matrix2::zeros());
        assert!(with >= without - 1e-9, "{with} < {without}");
    }
}

fn random_theta(rng: &mut ChaCha8Rng, scheme: Scheme, p: f64) -> Vec<f64> {
    let sc = scales(scheme, p);
    let mut t: Vec<f64> = sc.iter().map(|s| rng.gen_range(-*s..=*s)).collect();
    project(scheme, &mut t, p);
    t
}

#[test]
fn sum_rate_matches_an_lp_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut compared = [0usize; 4];
    for _ in 0..40 {
        let net = CranNetwork::symmetric(rng.gen_range(0.5..30.0), 0.5, -0.5, rng.gen_range(0.2..4.0), rng.gen_range(0.0..2.0))
            .unwrap();
        for (si, scheme) in Scheme::ALL.into_iter().enumerate() {
            let params = decode(scheme, &random_theta(&mut rng, scheme, net.p)).unwrap();
            let eval = SchemeEvaluator::new(scheme, &net).unwrap();
            let ours = eval.sumrate(&params).unwrap();
            let (val, sys) = eval.resolve(&params).unwrap();
            if scheme == Scheme::GdsIII && !cran_core::regions::scheme3_side_conditions(&val).unwrap() {
                assert_eq!(ours, 0.0);
                continue;
            }
            let lp = lp_maximize(&sys, &[1.0, 1.0]).unwrap().unwrap_or(0.0);
            assert!((ours - lp).abs() < 1e-7, "{scheme}: {ours} vs LP {lp}");
            compared[si] += 1;
        }
    }
    assert!(compared.iter().all(|c| *c >= 10), "{compared:?}");
}

#[test]
fn constructions_respect_the_cut_set_at_their_own_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let c = rng.gen_range(0.2..5.0);
        let net = CranNetwork::symmetric(rng.gen_range(0.5..50.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), c, 0.0)
            .unwrap();
        for scheme in Scheme::ALL {
            let params = decode(scheme, &random_theta(&mut rng, scheme, net.p)).unwrap();
            let rate = scheme_sumrate(&params, &net).unwrap();
            let cov = build_joint_cov(&params, &net).unwrap();
            let k = cov.schur_conditional(&["X1", "X2"], &[]).unwrap().matrix().clone();
            let full = cran_core::capacity_logdet(&net.g, &k).unwrap();
            assert!(rate <= (2.0 * c).min(full) + 1e-9, "{scheme}: {rate} > min(2C, {full})");
        }
    }
}

#[test]
fn zero_power_and_zero_fronthaul_give_zero() {
    let budget = Budget { restarts: 2, max_evals: 500, seed: 1 };
    let dead = CranNetwork::symmetric(0.0, 0.5, 0.5, 2.0, 1.0).unwrap();
    let cut = CranNetwork::symmetric(10.0, 0.5, 0.5, 0.0, 0.0).unwrap();
    for scheme in Scheme::ALL {
        assert_eq!(optimize_scheme(scheme, &dead, budget).unwrap().sum_rate, 0.0, "{scheme} at P = 0");
        assert!(optimize_scheme(scheme, &cut, budget).unwrap().sum_rate.abs() < 1e-12, "{scheme} at C = 0");
    }
}

#[test]
fn unit_fronthaul_without_cooperation_gives_one_bit() {
    for p in [1.0, 10.0, 100.0] {
        let net = CranNetwork::symmetric(p, 0.5, 0.5, 1.0, 0.0).unwrap();
        let rstar = rsum_star(&net, Budget::default()).unwrap();
        let e = optimize_scheme(Scheme::GdsI, &net, Budget { restarts: 8, ..Default::default() }).unwrap();
        let closed = 1.0f64.min(rstar);
        assert!((e.sum_rate - closed).abs() < 1e-3, "P={p}: {} vs {closed}", e.sum_rate);
    }
}

#[test]
fn more_restarts_never_lower_the_optimum() {
    let net = CranNetwork::symmetric(10.0, 0.5, -0.5, 1.5, 0.5).unwrap();
    for scheme in Scheme::ALL {
        let mut last = f64::NEG_INFINITY;
        for restarts in [1, 2, 4] {
            let v = optimize_scheme(scheme, &net, Budget { restarts, max_evals: 1500, seed: 3 }).unwrap().sum_rate;
            assert!(v >= last, "{scheme}: {v} < {last} at {restarts} restarts");
            last = v;
        }
    }
}

#[test]
fn optimization_is_deterministic() {
    let net = CranNetwork::symmetric(5.0, 0.5, 0.5, 1.0, 0.3).unwrap();
    let b = Budget { restarts: 3, max_evals: 800, seed: 42 };
    for scheme in Scheme::ALL {
        assert_eq!(optimize_scheme(scheme, &net, b).unwrap(), optimize_scheme(scheme, &net, b).unwrap());
    }
}

#[test]
fn degenerate_compression_is_consistent_with_the_symbolic_region() {
    // Kw = 0 and X0 independent of everything (c = 0).
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let net = CranNetwork::symmetric(5.0, 0.5, -0.5, 1.2, 0.4).unwrap();
    let region = gcomp_theorem2_region();
    let atoms = region.atoms();
    for _ in 0..10 {
        let mut theta = random_theta(&mut rng, Scheme::Gcomp, net.p);
        theta[6..15].iter_mut().for_each(|x| *x = 0.0);
        let params = decode(Scheme::Gcomp, &theta).unwrap();
        let cov: JointCovariance = build_joint_cov(&params, &net).unwrap();
        let val = cov.atom_valuation(atoms.iter().map(String::as_str), &capacity_valuation(&net)).unwrap();
        let symbolic = region.resolve(&val).unwrap();
        let (_, compiled) = SchemeEvaluator::new(Scheme::Gcomp, &net).unwrap().resolve(&params).unwrap();
        for _ in 0..200 {
            let x = [rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)];
            assert_eq!(symbolic.contains(&x, 1e-9), compiled.contains(&x, 1e-9), "{x:?}");
        }
    }
}
