//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Runs as a plain binary (`harness = false`).

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use rand::Rng;
use randfnn::datasets::{k_nearest_neighbors, Dataset, StudyData, TargetFunction};
use randfnn::generators::{generate_ddm_traced, generate_rarsm_traced, generate_rsm_traced, rsm_interval, GeneratorConfig};
use randfnn::harness::report::write_benchmark_csv;
use randfnn::harness::{benchmark, noise_sensitivity_sweep, run_trials, BenchmarkEntry, SyntheticSetup};
use randfnn::network::sigmoid;
use randfnn::numeric::{fit_hyperplane, solve_least_squares};
use randfnn::Seed;

const STUDY_SEED: Seed = Seed(1);
const TRIAL_SEED: Seed = Seed(2);
const SWEEP_SEED: Seed = Seed(1);

struct Outcome {
    label: &'static str,
    pass: bool,
    detail: String,
}

fn check(label: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { label, pass, detail }
}

fn study(tf: TargetFunction) -> StudyData<f64> {
    SyntheticSetup::standard(tf).study(0.2, STUDY_SEED).expect("study")
}

fn mean_test_rmse(data: &StudyData<f64>, config: GeneratorConfig, m: usize) -> f64 {
    let batch = run_trials(&data.train, &data.test, &config, m, 10, TRIAL_SEED).expect("trials");
    assert!(batch.failures.is_empty(), "{config}: {:?}", batch.failures);
    batch.summary().expect("summary").mean
}

fn tf1_criteria() -> Vec<Outcome> {
    let data = study(TargetFunction::Tf1);
    let fim = mean_test_rmse(&data, GeneratorConfig::Fim, 35);
    let ddm = mean_test_rmse(&data, GeneratorConfig::Ddm { k: 100 }, 25);
    vec![
        check("1 FIM tf1 m=35 mean test RMSE in [0.10, 0.19]", (0.10..=0.19).contains(&fim), format!("{fim:.4}")),
        check("2 D-DM tf1 m=25 k=100 mean test RMSE <= 0.01", ddm <= 0.01, format!("{ddm:.4}")),
    ]
}

fn table_criteria() -> Vec<Outcome> {
    let data = study(TargetFunction::Tf2);
    let entries = [
        ("D-DM", GeneratorConfig::Ddm { k: 34 }, 300, Some((0.037, 0.010))),
        ("RARSM", GeneratorConfig::Rarsm { alpha_min_deg: 55.0, alpha_max_deg: 70.0 }, 350, Some((0.048, 0.010))),
        ("rsM", GeneratorConfig::Rsm { r: 0.4, s: 30.0 }, 450, Some((0.050, 0.012))),
        ("OIM", GeneratorConfig::Oim { u: 3.0 }, 1000, None),
        ("FIM", GeneratorConfig::Fim, 800, Some((0.128, 0.010))),
    ];
    let means: Vec<f64> = entries.iter().map(|(_, cfg, m, _)| mean_test_rmse(&data, cfg.clone(), *m)).collect();

    let mut detail = Vec::new();
    let mut pass = true;
    for ((name, _, m, target), mean) in entries.iter().zip(&means) {
        if let Some((center, tol)) = target {
            let ok = (mean - center).abs() <= *tol;
            pass &= ok;
            detail.push(format!("{name}(m={m})={mean:.4} [{center}±{tol}]{}", if ok { "" } else { " out" }));
        }
    }
    let ordered = means[0] < means[1] && means[1] < means[2] && means[2] < means[3] && means[3] <= means[4];
    let order = entries.iter().zip(&means).map(|(e, v)| format!("{}={v:.4}", e.0)).collect::<Vec<_>>().join(" ");
    vec![
        check("3 tuned tf2 settings within tolerance", pass, detail.join(", ")),
        check("4 ordering D-DM < RARSM < rsM < OIM <= FIM", ordered, order),
    ]
}

fn noise_criterion() -> Outcome {
    let setup = SyntheticSetup::standard(TargetFunction::Tf2);
    let sweep = noise_sensitivity_sweep::<f64>(&setup, &[0.1, 0.5, 1.0], &[5, 10, 20, 30, 50], 300, 5, SWEEP_SEED)
        .expect("sweep");
    let best = sweep.argmin_by("c", "k_prime");
    let at = |c: f64| best.iter().find(|(row, _)| *row == c).map(|p| p.1).expect("row");
    let (low, high) = (at(0.1), at(1.0));
    check(
        "5 noise sweep: argmin k' at c=1.0 >= argmin k' at c=0.1",
        high >= low,
        best.iter().map(|(c, k)| format!("c={c}: k'={k}")).collect::<Vec<_>>().join(", "),
    )
}

fn ddm_identities() -> Outcome {
    let mut r = rng(61);
    let mut worst = (0.0f64, 0.0f64);
    for g in 0..50 {
        let dim = r.random_range(1..=4);
        let rows = r.random_range(60..=300);
        let d = random_dataset(&mut r, rows, dim);
        let k = r.random_range(dim + 1..=30);
        let (p, nodes) = generate_ddm_traced(&d, r.random_range(1..=40), k, Seed(g)).expect("ddm");
        for (i, node) in nodes.iter().enumerate() {
            let x = d.row(node.anchor_index);
            let h = sigmoid(p.activation(i, x));
            worst.0 = worst.0.max((h - 0.5).abs());
            for j in 0..dim {
                worst.1 = worst.1.max((p.weights(i)[j] * h * (1.0 - h) - node.fit.slopes[j]).abs());
            }
        }
    }
    check(
        "6a D-DM h(x*)=0.5 (1e-10) and gradient = slopes (1e-9), 50 generations",
        worst.0 <= 1e-10 && worst.1 <= 1e-9,
        format!("max |h-0.5|={:.1e}, max gradient gap={:.1e}", worst.0, worst.1),
    )
}

fn rsm_identities() -> Outcome {
    let mut r = rng(62);
    let (mut sum_gap, mut outside, mut off_anchor) = (0.0f64, 0usize, 0.0f64);
    for g in 0..50 {
        let dim = r.random_range(1..=4);
        let d = random_dataset(&mut r, 100, dim);
        let (rr, s) = (r.random_range(0.0001..0.49), r.random_range(1.0..40.0));
        let (lo, hi) = rsm_interval(rr, s);
        let (p, nodes) = generate_rsm_traced(&d, 30, rr, s, Seed(g)).expect("rsm");
        for (i, node) in nodes.iter().enumerate() {
            sum_gap = sum_gap.max((p.weights(i).iter().sum::<f64>() - node.weight_sum).abs());
            outside += usize::from(!(lo..=hi).contains(&node.weight_sum.abs()));
            off_anchor = off_anchor.max(p.activation(i, d.row(node.anchor_index)).abs());
        }
    }
    check(
        "6b rsM weight sum identity (1e-10) and |sum| inside its interval",
        sum_gap <= 1e-10 && outside == 0 && off_anchor <= 1e-10,
        format!("max gap={sum_gap:.1e}, outside={outside}, max |activation at anchor|={off_anchor:.1e}"),
    )
}

fn rarsm_identities() -> Outcome {
    let mut r = rng(63);
    let (mut angle_gap, mut off_anchor) = (0.0f64, 0.0f64);
    for g in 0..50 {
        let dim = r.random_range(1..=4);
        let d = random_dataset(&mut r, 100, dim);
        let lo = r.random_range(0.0..80.0);
        let hi = r.random_range(lo + 1.0..89.0);
        let (p, nodes) = generate_rarsm_traced(&d, 30, lo, hi, Seed(g)).expect("rarsm");
        for (i, node) in nodes.iter().enumerate() {
            angle_gap = angle_gap.max((node.reconstructed_alpha_deg() - node.alpha_deg).abs());
            off_anchor = off_anchor.max(p.activation(i, d.row(node.anchor_index)).abs());
        }
    }
    check(
        "6c RARSM angle round trip (1e-9 deg) and inflection on anchors",
        angle_gap <= 1e-9 && off_anchor <= 1e-10,
        format!("max angle gap={angle_gap:.1e}, max |activation at anchor|={off_anchor:.1e}"),
    )
}

fn least_squares_orthogonality() -> Outcome {
    let mut r = rng(64);
    let (mut worst, mut deficient) = (0.0f64, 0);
    for case in 0..100 {
        let rows = r.random_range(1..=60);
        let cols = r.random_range(1..=20);
        let mut a = random_matrix(&mut r, rows, cols);
        if case % 3 == 0 && cols > 2 {
            // last column becomes a combination of two earlier ones
            deficient += 1;
            let (p, q) = (r.random_range(0..cols - 1), r.random_range(0..cols - 1));
            let target = cols - 1;
            for i in 0..rows {
                a[(i, target)] = 0.5 * a[(i, p)] - 2.0 * a[(i, q)];
            }
        }
        let y: Vec<f64> = (0..rows).map(|_| r.random::<f64>() * 4.0 - 2.0).collect();
        let b = solve_least_squares(a.as_ref(), &y).expect("solve");
        worst = worst.max(normal_residual(&a, &b, &y) / (1.0 + norm(&y)));
    }
    check(
        "6d least-squares residual orthogonality <= 1e-8(1+|y|), 100 systems",
        worst <= 1e-8,
        format!("max scaled residual={worst:.1e}, rank-deficient cases={deficient}"),
    )
}

fn neighborhood_oracles() -> Outcome {
    let mut r = rng(65);
    let (mut knn_mismatch, mut fit_gap) = (0usize, 0.0f64);
    for _ in 0..100 {
        let dim = r.random_range(1..=3);
        let rows = r.random_range(10..=60);
        let d: Dataset<f64> = random_dataset(&mut r, rows, dim);
        let k = r.random_range(dim + 2..rows);
        let anchor = r.random_range(0..rows);
        let nb = k_nearest_neighbors(&d, anchor, k).expect("knn");
        knn_mismatch += usize::from(nb.member_indices != full_sort_knn(&d, anchor, k));

        let fit = fit_hyperplane(&nb).expect("fit");
        let (design, y): (Vec<Vec<f64>>, Vec<f64>) = nb
            .points()
            .map(|(x, t)| (x.iter().copied().chain([1.0]).collect(), t))
            .unzip();
        let oracle = normal_equations(&design, &y);
        for j in 0..dim {
            fit_gap = fit_gap.max((fit.slopes[j] - oracle[j]).abs());
        }
        fit_gap = fit_gap.max((fit.intercept - oracle[dim]).abs());
    }
    check(
        "6e k-NN vs full sort and hyperplane vs normal equations, 100 instances",
        knn_mismatch == 0 && fit_gap <= 1e-9,
        format!("knn mismatches={knn_mismatch}, max coefficient gap={fit_gap:.1e}"),
    )
}

fn benchmark_determinism() -> Outcome {
    let setup = SyntheticSetup { n_train: 1000, ..SyntheticSetup::standard(TargetFunction::Tf2) };
    let data: StudyData<f64> = setup.study(0.2, STUDY_SEED).expect("study");
    let entries = [
        BenchmarkEntry::new(GeneratorConfig::Ddm { k: 34 }, 100),
        BenchmarkEntry::new(GeneratorConfig::Rarsm { alpha_min_deg: 55.0, alpha_max_deg: 70.0 }, 100),
        BenchmarkEntry::new(GeneratorConfig::Rsm { r: 0.4, s: 30.0 }, 100),
        BenchmarkEntry::new(GeneratorConfig::Oim { u: 3.0 }, 100),
        BenchmarkEntry::new(GeneratorConfig::Fim, 100),
    ];
    let csv = || {
        let result = benchmark(&data.train, &data.test, &entries, 3, TRIAL_SEED).expect("benchmark");
        let mut out = Vec::new();
        write_benchmark_csv(&mut out, &result).expect("csv");
        out
    };
    let (a, b) = (csv(), csv());
    check("6f two benchmark runs give byte-identical CSV", a == b, format!("{} bytes", a.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    let mut report = |batch: Vec<Outcome>| {
        for o in batch {
            println!("{} {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.label, o.detail);
            outcomes.push(o.pass);
        }
    };
    report(vec![
        ddm_identities(),
        rsm_identities(),
        rarsm_identities(),
        least_squares_orthogonality(),
        neighborhood_oracles(),
        benchmark_determinism(),
    ]);
    report(tf1_criteria());
    report(table_criteria());
    report(vec![noise_criterion()]);

    let failed = outcomes.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed in {:.0}s", outcomes.len() - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
