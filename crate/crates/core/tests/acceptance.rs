//! Acceptance suite. Every criterion prints one PASS/FAIL line to stderr,
//! bypassing the test harness capture, and then asserts.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::compare_projection;
use cran_core::regions::{
    corollary4_region, corollary5_system, ddf_p1_region, gcomp_theorem2_region, scheme1_region, scheme2_region,
    scheme3_region, Substitution,
};
use cran_core::schemes::{optimize_scheme, rsum_star, Budget, Scheme};
use cran_core::verify::random::{random_capacities, random_channel, random_simplex};
use cran_core::verify::{example1_run, example2_compression, example2_sampled, Example1Budget, Verdict};
use cran_core::{
    audit_random, blahut_arimoto, regions_equal_sampled, run_sweep, Channel, CranNetwork, JointPmf, SweepConfig,
    SweepRow,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: usize, title: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n} [{title}]: {verdict} ({detail})");
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[test]
fn criterion_1_closed_form_gds_i() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = 10f64.powf(rng.gen_range(-0.5..2.0));
        let g12: f64 = rng.gen_range(-1.0..1.0);
        let g21 = if rng.gen_bool(0.5) { g12 } else { -g12 };
        let c = rng.gen_range(0.2..6.0);
        let t = rng.gen_range(0.0..2.0);
        let net = CranNetwork::symmetric(p, g12, g21, c, t).unwrap();
        let rs = rsum_star(&net, Budget { restarts: 64, ..Budget::default() }).unwrap();
        let e = optimize_scheme(Scheme::GdsI, &net, Budget { restarts: 8, ..Budget::default() }).unwrap();
        let closed = (c + t).min(2.0 * c).min(rs);
        worst = worst.max((e.sum_rate - closed).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-3 && elapsed < Duration::from_secs(60);
    report(1, "closed-form GDS-I", pass, format!("worst error {worst:.2e}, {:.1} s", secs(elapsed)));
    assert!(pass);
}

#[test]
fn criterion_2_projection_equivalence() {
    let cases = [
        (Substitution::SchemeI, scheme1_region()),
        (Substitution::SchemeII, scheme2_region()),
        (Substitution::SchemeIII, scheme3_region()),
        (Substitution::Cor4, corollary4_region()),
        (Substitution::Cor5, corollary5_system()),
    ];
    let mut lines = Vec::new();
    let mut pass = true;
    for (k, (sub, explicit)) in cases.iter().enumerate() {
        let r = compare_projection(*sub, explicit, 20, 1000, 100 + k as u64);
        pass &= r.agree && r.points_checked >= 20_000;
        lines.push(format!("{sub:?} {}/{}", r.points_checked - r.disagreements, r.points_checked));
    }
    report(2, "elimination vs explicit regions", pass, lines.join(", "));
    assert!(pass);
}

#[test]
fn criterion_3_constant_center_is_decode_forward() {
    let gcomp = gcomp_theorem2_region();
    let ddf = ddf_p1_region(2, 2).unwrap();
    let mut atoms = gcomp.atoms();
    atoms.extend(ddf.atoms());
    let x0 = JointPmf::new(vec![("X0", 1)], vec![1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let vals: Vec<_> = (0..20)
        .map(|k| {
            let sparsity = if k % 2 == 0 { 0.0 } else { 0.4 };
            let inputs = JointPmf::new(
                vec![("U1", 2), ("U2", 2), ("X1", 2), ("X2", 2)],
                random_simplex(&mut rng, 16, sparsity),
            )
            .unwrap();
            let ch = random_channel(&mut rng, vec![("X1", 2), ("X2", 2)], vec![("Y1", 2), ("Y2", 2)], 0.0).unwrap();
            let p = inputs.compose(&ch).unwrap().product(&x0).unwrap();
            let caps = random_capacities(&mut rng, 2.0);
            p.atom_valuation(atoms.iter().map(String::as_str), &caps).unwrap()
        })
        .collect();
    let r = regions_equal_sampled(&gcomp, &ddf, &vals, 1000, 33).unwrap();
    let pass = r.agree && r.points_checked == 20_000;
    report(3, "compression with constant center", pass, format!("{} disagreements in {} points", r.disagreements, r.points_checked));
    assert!(pass);
}

#[test]
fn criterion_4_z_channel() {
    let a = example2_compression().unwrap();
    let b = example2_sampled(10_000, 4).unwrap();
    let pass = a.verdict == Verdict::Confirmed && b.verdict == Verdict::SampledConsistent && b.values["violations"] == 0.0;
    report(
        4,
        "Z-channel",
        pass,
        format!("(1,1) exact: {:?}; max data-sharing slack {:.3e} over 10^4 samples", a.verdict, b.values["max_slack"]),
    );
    assert!(pass);
}

#[test]
fn criterion_5_single_hop() {
    let noisy = example1_run(&Channel::bsc("X1", "Y1", 0.1).unwrap(), 0.3, Example1Budget::default()).unwrap();
    let clean = example1_run(&Channel::bsc("X1", "Y1", 0.0).unwrap(), 0.5, Example1Budget::default()).unwrap();
    let cap = format!("{:.6}", noisy.values["capacity"]);
    let margin = noisy.values["margin"];
    let gap = clean.values["margin"].abs();
    let pass = cap == "0.300000" && margin > 0.0 && gap <= 1e-6;
    report(5, "single hop", pass, format!("capacity {cap}, margin {margin:.6}, noiseless gap {gap:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_6_gap_audit() {
    let start = Instant::now();
    let s = audit_random(200, 6, 4, 4).unwrap();
    let elapsed = start.elapsed();
    let pass = s.pass && s.passed == 200 && s.max_formula_error <= 1e-9 && elapsed < Duration::from_secs(60);
    report(
        6,
        "constant gap",
        pass,
        format!("{}/200 pass, formula error {:.2e}, {:.2} s", s.passed, s.max_formula_error, secs(elapsed)),
    );
    assert!(pass);
}

fn sweep(p: f64, g21: f64, t: f64, schemes: &[&str]) -> Vec<SweepRow> {
    let cfg = SweepConfig::from_json(
        &serde_json::json!({
            "P": p,
            "G": [[1.0, 0.5], [g21, 1.0]],
            "C_grid": [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0],
            "T": t,
            "schemes": schemes,
            "budget": {"restarts": 4, "max_evals": 4000},
            "seed": 7
        })
        .to_string(),
    )
    .unwrap();
    run_sweep(&cfg).unwrap()
}

fn curve<'a>(rows: &'a [SweepRow], scheme: &str) -> Vec<&'a SweepRow> {
    rows.iter().filter(|r| r.scheme == scheme).collect()
}

/// Violations of the curve properties, each as a message.
fn curve_violations(rows: &[SweepRow], schemes: &[&str], tol: f64) -> Vec<String> {
    let mut bad = Vec::new();
    for s in schemes {
        let c = curve(rows, s);
        for w in c.windows(2) {
            if w[1].sum_rate < w[0].sum_rate - tol {
                bad.push(format!("{s} decreases at C={}", w[1].c));
            }
        }
        for r in &c {
            if r.sum_rate > r.cutset + tol {
                bad.push(format!("{s} above cut-set at C={}", r.c));
            }
        }
    }
    for ts in curve(rows, "GDS-TS") {
        for r in rows.iter().filter(|r| r.c == ts.c && r.scheme.starts_with("GDS-") && r.scheme != "GDS-TS") {
            if ts.sum_rate < r.sum_rate - tol {
                bad.push(format!("GDS-TS below {} at C={}", r.scheme, r.c));
            }
        }
    }
    bad
}

#[test]
fn criterion_7_figure_properties() {
    let tol = 1e-3;
    let fig6 = sweep(100.0, -0.5, 2.0, &["GDS-TS", "GDS-I", "GDS-II", "GDS-III", "GCOMP"]);
    let fig4 = sweep(1.0, 0.5, 0.0, &["GDS-TS", "GDS-I", "GDS-II", "GDS-III"]);
    let mut bad = curve_violations(&fig6, &["GDS-TS", "GDS-I", "GDS-II", "GDS-III", "GCOMP"], tol);
    bad.extend(curve_violations(&fig4, &["GDS-TS", "GDS-I", "GDS-II", "GDS-III"], tol));
    let mut worst = f64::INFINITY;
    for ts in curve(&fig6, "GDS-TS") {
        let gc = curve(&fig6, "GCOMP").into_iter().find(|r| r.c == ts.c).unwrap();
        worst = worst.min(ts.sum_rate - gc.sum_rate);
        if ts.sum_rate < gc.sum_rate - tol {
            bad.push(format!("GDS-TS below GCOMP at C={}", ts.c));
        }
    }
    let pass = bad.is_empty();
    let detail = if pass {
        format!("smallest time-share lead over compression {worst:.4}")
    } else {
        bad.join("; ")
    };
    report(7, "figure properties", pass, detail);
    assert!(pass);
}

#[test]
fn criterion_8_information_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut negative = 0usize;
    for k in 0..200 {
        let sparsity = if k % 2 == 0 { 0.0 } else { 0.5 };
        let p = JointPmf::new(vec![("A", 2), ("B", 3), ("C", 2)], random_simplex(&mut rng, 12, sparsity)).unwrap();
        let h = |v: &[&str]| p.entropy(v.iter().copied()).unwrap();
        let chain = p.mutual_info(&["A"], &["B", "C"], &[]).unwrap()
            - p.mutual_info(&["A"], &["B"], &[]).unwrap()
            - p.mutual_info(&["A"], &["C"], &["B"]).unwrap();
        let gamma = p.total_correlation(&["A", "B", "C"]).unwrap() - (h(&["A"]) + h(&["B"]) + h(&["C"]) - h(&["A", "B", "C"]));
        let pair = p.total_correlation(&["A", "C"]).unwrap() - p.mutual_info(&["A"], &["C"], &[]).unwrap();
        worst = worst.max(chain.abs()).max(gamma.abs()).max(pair.abs());
        let measures = [
            h(&["A", "B"]),
            p.mutual_info(&["A"], &["B"], &["C"]).unwrap(),
            p.total_correlation(&["A", "B", "C"]).unwrap(),
        ];
        negative += measures.iter().filter(|m| **m < -1e-12).count();
    }
    let ba = blahut_arimoto(&Channel::bsc("X", "Y", 0.1).unwrap(), 1e-12, 100_000).unwrap();
    let pass = worst <= 1e-10 && negative == 0 && (ba.capacity - 0.531004).abs() <= 1e-5;
    report(
        8,
        "information measures",
        pass,
        format!("identity error {worst:.2e}, negatives {negative}, BSC(0.1) capacity {:.6}", ba.capacity),
    );
    assert!(pass);
}
