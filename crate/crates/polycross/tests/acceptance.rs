//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its headline numbers. Tolerances are pinned in the assertions.

mod common;

use common::*;
use polycross::collection_metric::{
    brute_force_collection_distance, collection_distance, CurveCollection,
};
use polycross::coupling::{build_coding, convergence_diagnostic, families, sample_coupled};
use polycross::crossings::{
    find_crossings, separating_times, stability_radius, verify_separation,
};
use polycross::curve_metric::curve_distance;
use polycross::diagnostics::{
    estimate_tail, fit_power, locate_hotspot, point_on_cover, rate_check, synthetic_tail,
    TailEstimate,
};
use polycross::ensembles::{
    pathological_curve, perturb_curve, ConcentratedCrossings, EnsembleSpec, UniformRadial,
};
use polycross::geometry::{diameter, AlignedFace, Annulus, Point, Polyline};
use polycross::nets::{bounding_box, coarsen_collection, grid_net, skeletonize};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::time::Instant;

fn chacha(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[test]
fn criterion_01_crossing_oracle_equivalence() {
    let start = Instant::now();
    let mut r = rng(101);
    for instance in 0..500 {
        let dim = if instance % 2 == 0 { 2 } else { 3 };
        let n = r.gen_range(4..=64);
        let curve = random_polyline(&mut r, n, dim, 1.0);
        let ann = random_annulus(&mut r, dim);
        let fast = find_crossings(&curve, &ann).unwrap().count();
        let oracle = dense_crossing_count(&curve, &ann, 1000);
        assert_eq!(fast, oracle, "instance {instance}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!("ACCEPTANCE 01 crossing-oracle-equivalence: PASS (500 instances, {elapsed:?})");
}

#[test]
fn criterion_02_crossing_properties_suite() {
    let mut r = rng(102);
    // (i) diam < R - r implies no crossings.
    for _ in 0..1000 {
        let n = r.gen_range(3..10);
        let curve = random_polyline(&mut r, n, 2, 0.5);
        let d = diameter(&curve);
        let inner = r.gen_range(0.3..1.0);
        let outer = inner + d + r.gen_range(0.05..0.5);
        let center: Vec<f64> = (0..2).map(|_| r.gen_range(-1.0..1.0)).collect();
        let ann = Annulus::new(Point::new(center).unwrap(), inner, outer).unwrap();
        let report = find_crossings(&curve, &ann).unwrap();
        assert_eq!(report.count(), 0);
        // (ii) disjointness holds trivially here; checked below on crossing-
        // rich instances as well.
    }
    // (ii) pairwise disjoint intervals.
    for _ in 0..1000 {
        let curve = random_polyline(&mut r, 16, 2, 1.2);
        let ann = random_annulus(&mut r, 2);
        let report = find_crossings(&curve, &ann).unwrap();
        for w in report.intervals.windows(2) {
            assert!(w[0].b <= w[1].a);
        }
    }
    // (iii) inner-to-outer curves always cross on the spanned subinterval.
    for _ in 0..1000 {
        let ann = random_annulus(&mut r, 2);
        let dir = r.gen_range(0.0..std::f64::consts::TAU);
        let start = Point::new(vec![
            ann.center.coords()[0] + 0.5 * ann.inner * dir.cos(),
            ann.center.coords()[1] + 0.5 * ann.inner * dir.sin(),
        ])
        .unwrap();
        let dir2 = r.gen_range(0.0..std::f64::consts::TAU);
        let end = Point::new(vec![
            ann.center.coords()[0] + 1.3 * ann.outer * dir2.cos(),
            ann.center.coords()[1] + 1.3 * ann.outer * dir2.sin(),
        ])
        .unwrap();
        let mid = random_polyline(&mut r, 4, 2, 0.5);
        let mut verts = vec![start];
        verts.extend(mid.vertices().iter().cloned());
        verts.push(end);
        let curve = Polyline::new(verts).unwrap();
        let report = find_crossings(&curve, &ann).unwrap();
        assert!(report.count() >= 1);
    }
    println!("ACCEPTANCE 02 crossing-properties-suite: PASS (3 x 1000 instances)");
}

#[test]
fn criterion_03_separating_sequence_equivalence() {
    let mut r = rng(103);
    let mut small_count_instances: Vec<(Polyline, Annulus, usize)> = Vec::new();
    for _ in 0..200 {
        let curve = random_polyline(&mut r, 12, 2, 1.2);
        let ann = random_annulus(&mut r, 2);
        let count = find_crossings(&curve, &ann).unwrap().count();
        let times = separating_times(&curve, &ann).unwrap();
        assert_eq!(times.len(), count + 2);
        assert!(times.windows(2).all(|w| w[0] < w[1]));
        assert!(verify_separation(&curve, &ann, &times).unwrap());
        if (1..=3).contains(&count) && small_count_instances.len() < 25 {
            small_count_instances.push((curve, ann, count));
        }
    }
    assert!(small_count_instances.len() >= 10, "need crossing-rich instances");
    // Converse: any sequence with fewer than count+2 entries admits a
    // crossing piece; exhaustive over a time grid.
    let grid: Vec<f64> = (1..24).map(|i| i as f64 / 24.0).collect();
    for (curve, ann, count) in &small_count_instances {
        for interior in 0..*count {
            let mut any_sequence_separates = false;
            let mut stack: Vec<Vec<usize>> = vec![vec![]];
            while let Some(prefix) = stack.pop() {
                if prefix.len() == interior {
                    let mut times = vec![0.0];
                    times.extend(prefix.iter().map(|&i| grid[i]));
                    times.push(1.0);
                    if verify_separation(curve, ann, &times).unwrap() {
                        any_sequence_separates = true;
                        break;
                    }
                    continue;
                }
                let lo = prefix.last().map_or(0, |&i| i + 1);
                for i in lo..grid.len() {
                    let mut next = prefix.clone();
                    next.push(i);
                    stack.push(next);
                }
            }
            assert!(
                !any_sequence_separates,
                "a sequence with {interior} interior points separated a count-{count} curve"
            );
        }
    }
    println!(
        "ACCEPTANCE 03 separating-sequence-equivalence: PASS (200 witnesses, {} exhaustive converses)",
        small_count_instances.len()
    );
}

#[test]
fn criterion_04_stability_radius() {
    let mut r = rng(104);
    let mut trials = 0;
    while trials < 500 {
        let curve = random_polyline(&mut r, 10, 2, 1.2);
        let ann = random_annulus(&mut r, 2);
        let count = find_crossings(&curve, &ann).unwrap().count();
        let delta = stability_radius(&curve, &ann).unwrap();
        assert!(delta > 0.0);
        for k in 0..10 {
            let perturbed = perturb_curve(&curve, delta, chacha(104_000 + trials as u64, k));
            let new_count = find_crossings(&perturbed, &ann).unwrap().count();
            assert!(
                new_count <= count,
                "count rose from {count} to {new_count} under a {delta}-perturbation"
            );
            trials += 1;
            if trials == 500 {
                break;
            }
        }
    }
    println!("ACCEPTANCE 04 stability-radius: PASS (500 perturbations)");
}

#[test]
fn criterion_05_curve_metric_oracle_and_axioms() {
    let tol = 1e-6;
    let mut r = rng(105);
    // 100 instances on which the dense matched-parametrization oracle is
    // exact: translated copies, reversals, and height-1 tent pairs.
    for i in 0..100 {
        let (a, b, oracle) = match i % 10 {
            8 => {
                let a = Polyline::from_coords(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
                let b = Polyline::from_coords(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
                let oracle = dense_frechet_oracle(&a, &b, 256);
                (a, b, oracle)
            }
            9 => {
                let a = Polyline::from_coords(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 0.0]]).unwrap();
                let b = Polyline::from_coords(&[&[0.0, 0.0], &[2.0, 0.0]]).unwrap();
                let oracle = dense_frechet_oracle(&a, &b, 256);
                (a, b, oracle)
            }
            _ => {
                let n = r.gen_range(3..8);
                let a = random_polyline(&mut r, n, 2, 1.0);
                let shift = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
                let b = translate(&a, &shift);
                let oracle = dense_frechet_oracle(&a, &b, 256);
                (a, b, oracle)
            }
        };
        let value = curve_distance(&a, &b, tol).unwrap().value;
        assert!(
            (value - oracle).abs() <= 2.0 * tol,
            "instance {i}: value {value} vs oracle {oracle}"
        );
    }
    // Metric axioms on 200 random pairs/triples.
    for _ in 0..200 {
        let a = random_polyline(&mut r, 5, 2, 1.0);
        let b = random_polyline(&mut r, 5, 2, 1.0);
        let c = random_polyline(&mut r, 5, 2, 1.0);
        let dab = curve_distance(&a, &b, tol).unwrap().value;
        let dba = curve_distance(&b, &a, tol).unwrap().value;
        let dbc = curve_distance(&b, &c, tol).unwrap().value;
        let dac = curve_distance(&a, &c, tol).unwrap().value;
        assert!((dab - dba).abs() <= 2.0 * tol);
        assert!(curve_distance(&a, &a, tol).unwrap().value <= tol);
        assert!(dac <= dab + dbc + 4.0 * tol);
    }
    println!("ACCEPTANCE 05 curve-metric-oracle-and-axioms: PASS (100 oracle + 200 axiom checks)");
}

#[test]
fn criterion_06_collection_metric_oracle() {
    let start = Instant::now();
    let tol = 1e-6;
    let mut r = rng(106);
    for instance in 0..300 {
        let na = r.gen_range(0..=5usize);
        let nb = r.gen_range(0..=5usize);
        let a = CurveCollection::from_curves(
            (0..na)
                .map(|_| {
                    let n = r.gen_range(3..6);
                    (random_polyline(&mut r, n, 2, 1.0), 1)
                })
                .collect(),
        )
        .unwrap();
        let b = CurveCollection::from_curves(
            (0..nb)
                .map(|_| {
                    let n = r.gen_range(3..6);
                    (random_polyline(&mut r, n, 2, 1.0), 1)
                })
                .collect(),
        )
        .unwrap();
        let fast = collection_distance(&a, &b, tol).unwrap().value;
        let slow = brute_force_collection_distance(&a, &b, tol).unwrap();
        assert!(
            (fast - slow).abs() <= 2.0 * tol,
            "instance {instance}: {fast} vs {slow}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!("ACCEPTANCE 06 collection-metric-oracle: PASS (300 pairs, {elapsed:?})");
}

#[test]
fn criterion_07_skeleton_bounds() {
    let tol = 1e-9;
    let tau = 1e-12;
    let mut r = rng(107);
    for k in [2u32, 4, 8, 16, 32] {
        let inv_k = 1.0 / k as f64;
        for _ in 0..100 {
            let n = r.gen_range(3..9);
            let curve = random_polyline(&mut r, n, 2, 0.8);
            let coll = CurveCollection::from_curves(vec![(curve.clone(), 1)]).unwrap();
            let (lo, hi) = bounding_box(&coll, 0.0).unwrap();
            let net = grid_net(&lo, &hi, inv_k).unwrap();
            let (skel, coarse) = skeletonize(&curve, &net, k).unwrap();
            let d = curve_distance(&curve, &coarse, tol).unwrap().value;
            assert!(d <= 11.0 * inv_k + tol, "k={k}: d={d}");
            for w in skel.anchors.windows(2) {
                let gap = net.points()[w[0]].dist(&net.points()[w[1]]);
                assert!(gap <= 3.0 * inv_k + tau, "k={k}: gap={gap}");
            }
        }
        // Collection bound on a 10-curve collection.
        let coll = CurveCollection::from_curves(
            (0..10)
                .map(|_| (random_polyline(&mut r, 6, 2, 0.8), 1))
                .collect(),
        )
        .unwrap();
        let (lo, hi) = bounding_box(&coll, 0.0).unwrap();
        let net = grid_net(&lo, &hi, inv_k).unwrap();
        let coarse = coarsen_collection(&coll, &net, k).unwrap();
        let d = collection_distance(&coll, &coarse, 1e-6).unwrap().value;
        assert!(d <= 11.0 * inv_k + 1e-6, "k={k}: collection d={d}");
    }
    println!("ACCEPTANCE 07 skeleton-bounds: PASS (100 curves x k in {{2,4,8,16,32}} + collections)");
}

#[test]
fn criterion_08_coupling_exactness_and_stabilization() {
    use polycross::coupling::DiscreteMeasure;
    use polycross::nets::Net;
    let mut r = rng(108);
    for _ in 0..50 {
        let n_atoms = r.gen_range(2..7usize);
        let atoms: Vec<Point> = (0..n_atoms)
            .map(|_| Point::new(vec![r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)]).unwrap())
            .collect();
        let n_measures = r.gen_range(2..5usize);
        let measures: Vec<DiscreteMeasure> = (0..n_measures)
            .map(|_| {
                let raw: Vec<f64> = (0..n_atoms).map(|_| r.gen_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                DiscreteMeasure::new(
                    atoms
                        .iter()
                        .cloned()
                        .zip(raw.iter().map(|w| w / total))
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        let nets = vec![
            Net::new(
                (0..2)
                    .map(|_| {
                        Point::new(vec![r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)]).unwrap()
                    })
                    .collect(),
                1.0,
            )
            .unwrap(),
            Net::new(
                (0..3)
                    .map(|_| {
                        Point::new(vec![r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)]).unwrap()
                    })
                    .collect(),
                0.5,
            )
            .unwrap(),
        ];
        let coding = build_coding(&measures, &nets).unwrap();
        // Analytic marginals within 1e-12.
        for j in 0..measures.len() {
            let marginal = coding.analytic_marginal(j);
            for a in 0..coding.atom_count() {
                assert!((marginal[a] - coding.atom_prob(j, a)).abs() <= 1e-12);
            }
        }
        // Cell determinism, exactly, for every k <= level(j).
        for j in 0..measures.len() {
            let lvl = coding.level_of_measure(j);
            for k in 1..=lvl {
                for probe in 0..=400 {
                    let xi = probe as f64 / 401.0;
                    let atom = sample_coupled(&coding, xi, j, 7 + probe as u64);
                    for idx in 0..coding.partition(k).cells.len() {
                        let (lo, hi) = coding.interval(j, k, idx);
                        if hi <= lo {
                            continue;
                        }
                        let in_interval = xi >= lo && xi < hi;
                        let in_cell = coding.partition(k).cells[idx].members.contains(&atom);
                        assert_eq!(in_interval, in_cell);
                    }
                }
            }
        }
    }
    // Stabilization: converging input crosses 0.99 at horizon 256, the
    // oscillating counterinput stays at or below 0.9.
    let nets = vec![families::two_atom_net()];
    let conv = families::converging(256).unwrap();
    let coding = build_coding(&conv, &nets).unwrap();
    let rep = convergence_diagnostic(&coding, &nets, 4000, 256, 81).unwrap();
    assert!(rep.fractions[0] >= 0.99, "converging fraction {}", rep.fractions[0]);
    let osc = families::oscillating(256).unwrap();
    let coding = build_coding(&osc, &nets).unwrap();
    let rep = convergence_diagnostic(&coding, &nets, 4000, 256, 82).unwrap();
    assert!(rep.fractions[0] <= 0.9, "oscillating fraction {}", rep.fractions[0]);
    println!("ACCEPTANCE 08 coupling-exactness-and-stabilization: PASS (50 instances + 2 families)");
}

#[test]
fn criterion_09_counterexample_reproduction() {
    let n = 1000.0f64;
    let bound = 1.0 / n;
    let base = pathological_curve(400);
    let perturbed = perturb_curve(&base, bound, chacha(109, 0));
    // Uniform closeness below 1/n.
    let d = curve_distance(&base, &perturbed, bound / 10.0).unwrap().value;
    assert!(d < bound, "distance {d}");
    // A tested annulus with at least 20 crossings.
    let origin = Point::new(vec![0.0, 0.0]).unwrap();
    let ann = Annulus::new(origin.clone(), 0.004, 0.008).unwrap();
    let count = find_crossings(&perturbed, &ann).unwrap().count();
    assert!(count >= 20, "count {count}");
    // Rate check fails at x = 0 in d = 2.
    let sampler = EnsembleSpec::Pathological { grid_size: 400, bound, seed: 5 };
    let big_r = 0.016;
    let ladder = [0.008, 0.004, 0.002, 0.001];
    let mut terminal: Vec<TailEstimate> = Vec::new();
    let mut fits_lambda: Vec<f64> = Vec::new();
    for threshold in [5u32, 10, 20] {
        let tails: Vec<TailEstimate> = ladder
            .iter()
            .enumerate()
            .map(|(i, &r_in)| {
                let a = Annulus::new(origin.clone(), r_in, big_r).unwrap();
                estimate_tail(&sampler, &a, threshold, 30, 900 + i as u64).unwrap()
            })
            .collect();
        let fit = fit_power(&tails).unwrap();
        fits_lambda.push(fit.lambda);
        if threshold == 20 {
            terminal = tails;
        }
    }
    let verdict = rate_check(&terminal, 2, None).unwrap();
    assert!(!verdict.pass, "rate check must fail: ratios {:?}", verdict.ratios);
    // Exponents never stabilize above d - 1 = 1.
    for lambda in &fits_lambda {
        assert!(*lambda <= 1.0, "lambda {lambda}");
    }
    println!(
        "ACCEPTANCE 09 counterexample-reproduction: PASS (d={d:.2e} < {bound}, count={count}, lambdas={fits_lambda:?})"
    );
}

#[test]
fn criterion_10_hotspot_locator() {
    // Child count is exactly 2^(d-1).
    let face2 = AlignedFace::new(0, 1.0, vec![(0.0, 1.0)]).unwrap();
    assert_eq!(face2.split().len(), 2);
    let face3 = AlignedFace::new(1, 0.0, vec![(0.0, 1.0), (2.0, 3.0)]).unwrap();
    assert_eq!(face3.split().len(), 4);

    let ann = Annulus::new(Point::new(vec![0.0, 0.0]).unwrap(), 1.0, 2.0).unwrap();
    // Constructed concentration at a known mid-sphere point on the cover.
    let (y_star, axis) = point_on_cover(&ann).unwrap();
    let sampler = ConcentratedCrossings {
        center: ann.center.clone(),
        y_star: y_star.clone(),
        plane_axis: axis,
        inner: ann.inner,
        outer: ann.outer,
        seed: 33,
    };
    let rep = locate_hotspot(&sampler, &ann, 6, 2000, 11).unwrap();
    let eps6 = rep.levels.last().unwrap().eps;
    let dist = rep.y.dist(&y_star);
    assert!(dist <= eps6, "|y - y*| = {dist} vs eps_6 = {eps6}");
    for w in rep.levels.windows(2) {
        assert!((w[1].eps - 0.5 * w[0].eps).abs() < 1e-12);
    }
    // Uniform radial ensemble: per-level rate at least 2^((1-d)k) p0 / 2.
    let radial = UniformRadial {
        center: ann.center.clone(),
        r0: 0.5,
        r1: 2.5,
        seed: 14,
    };
    let rep = locate_hotspot(&radial, &ann, 6, 10_000, 15).unwrap();
    for level in &rep.levels {
        let floor = rep.p0 * 0.5f64.powi(level.level as i32) / 2.0;
        assert!(
            level.p_hat >= floor,
            "level {}: {} < {floor}",
            level.level,
            level.p_hat
        );
    }
    println!(
        "ACCEPTANCE 10 hotspot-locator: PASS (|y - y*| = {dist:.4e} <= {eps6:.4e}, radial rates ok)"
    );
}

#[test]
fn criterion_11_rate_and_fit_calibration() {
    let origin = Point::new(vec![0.0, 0.0]).unwrap();
    let ladder = [0.4, 0.2, 0.1, 0.05, 0.025];
    let synth = |f: &dyn Fn(f64) -> f64| -> Vec<TailEstimate> {
        ladder
            .iter()
            .map(|&r| synthetic_tail(origin.clone(), r, 1.0, 4, f(r)))
            .collect()
    };
    for d in [2usize, 3] {
        assert!(rate_check(&synth(&|r| r.powi(d as i32)), d, None).unwrap().pass);
        assert!(!rate_check(&synth(&|r| r.powi(d as i32 - 1)), d, None).unwrap().pass);
    }
    // Exact recovery on noiseless synthetic tails.
    for (lambda, k) in [(2.0, 1.0), (3.0, 0.5), (1.25, 0.8)] {
        let fit = fit_power(&synth(&|r| k * r.powf(lambda))).unwrap();
        assert!((fit.lambda - lambda).abs() < 1e-12);
        assert!((fit.k - k).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }
    // 5% relative noise: recovered exponent within 0.2 across 100 runs.
    let mut r = rng(111);
    for rep in 0..100 {
        let tails: Vec<TailEstimate> = ladder
            .iter()
            .map(|&radius| {
                let noise: f64 = 1.0 + 0.05 * r.gen_range(-1.0..1.0);
                synthetic_tail(origin.clone(), radius, 1.0, 4, 0.9 * radius.powi(2) * noise)
            })
            .collect();
        let fit = fit_power(&tails).unwrap();
        assert!((fit.lambda - 2.0).abs() <= 0.2, "rep {rep}: lambda {}", fit.lambda);
    }
    println!("ACCEPTANCE 11 rate-and-fit-calibration: PASS (d in {{2,3}}, 100 noisy replications)");
}

#[test]
fn criterion_12_cli_reproducibility() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_polycross");
    let dir = std::env::temp_dir().join(format!("polycross-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();

    // Input files used by the file-based subcommands.
    let run_ok = |args: &[&str]| {
        let status = Command::new(bin).args(args).status().unwrap();
        assert!(status.success(), "command failed: {args:?}");
    };
    let walk_a = path("walk_a.json");
    let walk_b = path("walk_b.json");
    let loops = path("loops.json");
    run_ok(&["generate", "--kind", "random-walk", "--steps", "24", "--dim", "2", "--seed", "3", "--count", "1", "--out", &walk_a]);
    run_ok(&["generate", "--kind", "random-walk", "--steps", "24", "--dim", "2", "--seed", "4", "--count", "1", "--out", &walk_b]);
    run_ok(&["generate", "--kind", "loop-collection", "--steps", "12", "--dim", "2", "--seed", "5", "--count", "4", "--out", &loops]);

    let walk_spec = r#"{"kind":"random-walk","steps":32,"dim":2,"seed":7}"#;
    let bridge_spec = r#"{"kind":"brownian-bridge","steps":32,"dim":2,"seed":8}"#;
    let coarse = path("coarse.json");
    let commands: Vec<Vec<&str>> = vec![
        vec!["generate", "--kind", "random-walk", "--steps", "32", "--dim", "3", "--seed", "9", "--count", "2"],
        vec!["crossings", walk_a.as_str(), "--center", "0,0", "--inner", "0.2", "--outer", "0.6"],
        vec!["crossings", walk_a.as_str(), "--center", "0,0", "--inner", "0.2", "--outer", "0.6", "--intervals"],
        vec!["dist", walk_a.as_str(), walk_b.as_str(), "--tol", "1e-9"],
        vec!["cdist", loops.as_str(), walk_b.as_str(), "--tol", "1e-6"],
        vec!["coarsen", loops.as_str(), "--k", "8", "--coarse-out", coarse.as_str()],
        vec!["tails", "--sampler", walk_spec, "--center", "0,0", "--inner", "0.2", "--outer", "0.5", "--threshold-n", "1,2", "--samples", "300", "--seed", "2"],
        vec!["regularity", "--sampler", walk_spec, "--sampler", bridge_spec, "--grid", "0,0:0.2:0.5;0.1,0:0.1:0.5", "--threshold-n", "1,2", "--samples", "150", "--seed", "2"],
        vec!["fit", "--sampler", walk_spec, "--center", "0,0", "--outer", "0.45", "--inner-ladder", "0.2,0.1,0.05,0.025", "--threshold-n", "1", "--samples", "300", "--seed", "2"],
        vec!["rate", "--sampler", walk_spec, "--center", "0,0", "--outer", "0.45", "--inner-ladder", "0.2,0.1,0.05,0.025", "--threshold-n", "1", "--samples", "300", "--seed", "2", "--gauge", "sqrt"],
        vec!["hotspot", "--sampler", walk_spec, "--center", "0,0", "--inner", "0.2", "--outer", "0.6", "--depth", "3", "--samples", "300", "--seed", "2"],
        vec!["couple", "--family", "converging", "--horizon", "64", "--draws", "800", "--seed", "2"],
    ];
    let commands: Vec<Vec<String>> = commands
        .into_iter()
        .map(|v| v.into_iter().map(String::from).collect())
        .collect();

    for (i, cmd) in commands.iter().enumerate() {
        let outputs: Vec<Vec<u8>> = [("a", "1"), ("b", "4"), ("c", "1")]
            .iter()
            .map(|(tag, threads)| {
                let out = path(&format!("cmd{i}_{tag}.csv"));
                let mut args: Vec<String> = cmd.clone();
                args.push("--threads".into());
                args.push((*threads).into());
                args.push("--out".into());
                args.push(out.clone());
                let status = Command::new(bin).args(&args).status().unwrap();
                assert!(status.success(), "command {i} failed: {args:?}");
                std::fs::read(&out).unwrap()
            })
            .collect();
        assert_eq!(outputs[0], outputs[1], "command {i} differs across thread counts");
        assert_eq!(outputs[0], outputs[2], "command {i} differs across reruns");
        assert!(!outputs[0].is_empty());
    }
    let _ = std::fs::remove_dir_all(&dir);
    println!("ACCEPTANCE 12 cli-reproducibility: PASS ({} commands x threads {{1,4}})", commands.len());
}
