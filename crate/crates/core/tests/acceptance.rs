//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p ssfmlfs-core --test acceptance`. The Emotions
//! criterion needs the Mulan `emotions.arff`; point `SSFMLFS_EMOTIONS_ARFF` at
//! it or place it at `data/emotions.arff` in the workspace root. Without the
//! file that criterion reports FAIL with the reason, and the exit status is
//! only affected when `SSFMLFS_REQUIRE_DATA=1`.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssfmlfs_core::dataset::{load_dataset, DataFormat, LabelMatrix, LabelSpec, MultiLabelDataset, PartitionPlan};
use ssfmlfs_core::evaluation::{
    average_precision, coverage, mlknn_predict, mlknn_train, ranking_loss, PredictionMatrix,
};
use ssfmlfs_core::experiment::{run_experiment, RunConfig};
use ssfmlfs_core::federation::{run_protocol, ProtocolConfig, Round};
use ssfmlfs_core::fuzzy::{
    complementary_conditional_entropy, complementary_entropy, complementary_joint_entropy,
    complementary_mutual_information, correlation_distance, FuzzySimilarityMatrix,
};
use ssfmlfs_core::graph::{build_graph, weighted_pagerank};
use ssfmlfs_core::presets::PRESETS;
use ssfmlfs_core::relevance::relevance_vector;
use ssfmlfs_core::synthetic::{planted_dataset, SyntheticSpec};
use ssfmlfs_core::{Execution, Matrix};

const IDENTITY_TOL: f64 = 1e-12;
const HAND_TOL: f64 = 1e-9;
const FEDERATED_TOL: f64 = 1e-12;
const PAGERANK_SOLVE_TOL: f64 = 1e-9;
const EDGE_SCALE_TOL: f64 = 1e-12;
const METRIC_TOL: f64 = 1e-12;
const EMOTIONS_BUDGET: Duration = Duration::from_secs(120);

enum Outcome {
    Pass(String),
    Fail(String),
    /// Could not be evaluated (missing input); reported as FAIL.
    Unavailable(String),
}

fn check(ok: bool, pass: String, fail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass(pass)
    } else {
        Outcome::Fail(fail())
    }
}

fn random_relation(rng: &mut ChaCha8Rng, n: usize) -> FuzzySimilarityMatrix {
    if rng.random_bool(0.5) {
        let col: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        FuzzySimilarityMatrix::build(&col, rng.random_range(0.0..0.6), 0)
    } else {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
            for j in 0..i {
                let v = if rng.random_bool(0.3) { 0.0 } else { rng.random() };
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        FuzzySimilarityMatrix::from_matrix(&m, 0.0, 0).unwrap()
    }
}

fn dense(r: &FuzzySimilarityMatrix) -> Dense {
    (0..r.size()).map(|i| r.row(i).to_vec()).collect()
}

fn ac1_entropy_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=50);
        let a = random_relation(&mut rng, n);
        let b = random_relation(&mut rng, n);
        let (ce_a, ce_b) = (complementary_entropy(&a).unwrap(), complementary_entropy(&b).unwrap());
        let cje_ab = complementary_joint_entropy(&a, &b).unwrap();
        let cmi_ab = complementary_mutual_information(&a, &b).unwrap();
        let cce_ab = complementary_conditional_entropy(&a, &b).unwrap();
        let corr_ab = correlation_distance(&a, &b).unwrap();
        let (da, db) = (dense(&a), dense(&b));
        let deviations = [
            complementary_joint_entropy(&a, &a).unwrap() - ce_a,
            cmi_ab - (ce_a + ce_b - cje_ab),
            cce_ab - (cje_ab - ce_b),
            ce_a - ce(&da),
            cje_ab - cje(&da, &db),
            cmi_ab - cmi(&da, &db),
            cce_ab - cce(&da, &db),
            corr_ab - corr(&da, &db),
            (-corr_ab).max(0.0),
        ];
        worst = deviations.iter().fold(worst, |w, d| w.max(d.abs()));
    }
    check(
        worst <= IDENTITY_TOL,
        format!("1000 random pairs (n <= 50), max deviation {worst:.2e}"),
        || format!("max deviation {worst:.2e} exceeds {IDENTITY_TOL:e}"),
    )
}

fn ac2_hand_traces() -> Outcome {
    let f = FuzzySimilarityMatrix::build(&[0.0, 0.1, 0.9], 0.2, 0);
    let g = FuzzySimilarityMatrix::build(&[0.0, 0.5, 0.6], 0.2, 1);
    let got = [
        ("CE", complementary_entropy(&f).unwrap(), 1.4 / 3.0),
        ("CJE", complementary_joint_entropy(&f, &g).unwrap(), 2.0 / 3.0),
        ("CMI", complementary_mutual_information(&f, &g).unwrap(), 0.8 / 3.0),
        ("corr_dist", correlation_distance(&f, &g).unwrap(), 0.4),
    ];
    let labels = LabelMatrix::from_rows(&[vec![1, 0], vec![1, 0], vec![0, 1]]).unwrap();
    let h = FuzzySimilarityMatrix::build(&[0.0, 0.1, 0.15], 0.2, 0);
    let d = relevance_vector(&labels, &[h], 1, 1.2, Execution::Sequential).unwrap().values[0];
    let mut bad: Vec<String> = got
        .iter()
        .filter(|(_, v, want)| !close(*v, *want, HAND_TOL))
        .map(|(name, v, want)| format!("{name} = {v} (want {want})"))
        .collect();
    if !close(d, 0.35 / 3.0, HAND_TOL) {
        bad.push(format!("D = {d} (want {})", 0.35 / 3.0));
    }
    check(
        bad.is_empty(),
        format!("CE 1.4/3, CJE 2/3, CMI 0.26667, corr_dist 0.4, D {d:.5}"),
        || bad.join("; "),
    )
}

fn random_plan(rng: &mut ChaCha8Rng, server: &[usize], pool: &[usize], m: usize, contiguous: bool) -> PartitionPlan {
    let mut pool = pool.to_vec();
    if !contiguous {
        pool.shuffle(rng);
    }
    let mut cuts: Vec<usize> = if contiguous {
        (1..m).map(|c| c * pool.len() / m).collect()
    } else {
        let mut c: Vec<usize> = (1..pool.len()).collect();
        c.shuffle(rng);
        c.truncate(m - 1);
        c
    };
    cuts.sort_unstable();
    let mut shards = Vec::new();
    let mut start = 0;
    for &c in cuts.iter().chain(std::iter::once(&pool.len())) {
        let mut s = pool[start..c].to_vec();
        s.sort_unstable();
        shards.push(s);
        start = c;
    }
    PartitionPlan {
        client_shards: shards,
        server_labeled: server.to_vec(),
        test_set: vec![],
        seed: 0,
        skew_alpha: 1.0,
        labeled_fraction: 0.2,
        test_fraction: 0.0,
    }
}

/// Centralized oracle: normalize with the range of all training rows, take the
/// sample std of the concatenated client rows, stack the client relations
/// block-diagonally and evaluate the measures by brute force.
fn federated_oracle_mismatch(ds: &MultiLabelDataset, plan: &PartitionPlan, lambda: f64) -> Option<String> {
    let cfg = ProtocolConfig {
        knn_k: 2,
        lambda,
        select: Some(3),
        exec: Execution::Sequential,
        ..ProtocolConfig::default()
    };
    let out = run_protocol(plan, ds, &cfg).unwrap();
    let d = ds.n_features();
    let training = plan.training_indices();
    let mut worst: f64 = 0.0;
    let mut groups_per_feature: Vec<Vec<Vec<f64>>> = Vec::new();
    for p in 0..d {
        let col = ds.features.column(p);
        let lo = training.iter().map(|&i| col[i]).fold(f64::INFINITY, f64::min);
        let hi = training.iter().map(|&i| col[i]).fold(f64::NEG_INFINITY, f64::max);
        let scale = |v: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
        let groups: Vec<Vec<f64>> = plan
            .client_shards
            .iter()
            .map(|s| s.iter().map(|&i| scale(col[i])).collect())
            .collect();
        let all: Vec<f64> = groups.iter().flatten().copied().collect();
        worst = worst.max((out.global_std[p] - sample_std(&all)).abs());
        groups_per_feature.push(groups);
    }
    let rels: Vec<Dense> = (0..d)
        .map(|p| grouped_relation(&groups_per_feature[p], out.radii[p]))
        .collect();
    for p in 0..d {
        if out.radii[p] != out.global_std[p] / lambda {
            return Some(format!("feature {p}: radius differs from std/lambda"));
        }
        worst = worst.max((out.entropy.ce[p] - ce(&rels[p])).abs());
        for q in 0..d {
            worst = worst.max((out.entropy.cje.get(p, q) - cje(&rels[p], &rels[q])).abs());
            worst = worst.max((out.entropy.cmi.get(p, q) - cmi(&rels[p], &rels[q])).abs());
            if p != q {
                worst = worst.max((out.entropy.corr_dist.get(p, q) - corr(&rels[p], &rels[q])).abs());
            }
        }
    }
    if worst > FEDERATED_TOL {
        return Some(format!("deviation {worst:.2e} from the centralized oracle"));
    }

    let m = plan.clients();
    if out.ledger.entries.len() != 6 * m {
        return Some(format!("{} ledger entries, expected {}", out.ledger.entries.len(), 6 * m));
    }
    for e in &out.ledger.entries {
        let n_c = match (e.sender, e.receiver) {
            (ssfmlfs_core::federation::PartyId::Client(c), _) | (_, ssfmlfs_core::federation::PartyId::Client(c)) => {
                plan.client_shards[c as usize].len()
            }
            _ => return Some("message without a client endpoint".into()),
        };
        let expected = match e.round {
            Round::MinMaxReport | Round::MinMaxBroadcast => 4 + 16 * d,
            Round::StatsReport => 4 + 24 * d,
            Round::GlobalStdBroadcast => 4 + 8 * d,
            Round::SimilarityReport => 4 + d * (16 + 8 * n_c * n_c),
            Round::Done => 4 + 4 * 3,
        };
        if e.payload_bytes != expected {
            return Some(format!(
                "{:?} message of {} has {} bytes, frame size is {expected}",
                e.round, e.sender, e.payload_bytes
            ));
        }
    }
    None
}

fn ac3_federated_equals_centralized() -> Outcome {
    let ds = planted_dataset(&SyntheticSpec {
        instances: 30,
        labels: 3,
        informative: 3,
        noise: 3,
        seed: 11,
        ..SyntheticSpec::default()
    })
    .unwrap()
    .dataset;
    let server: Vec<usize> = (0..6).collect();
    let pool: Vec<usize> = (6..30).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut runs = 0;
    for m in [2, 3, 5] {
        for t in 0..41 {
            let plan = random_plan(&mut rng, &server, &pool, m, t == 0);
            let lambda = [0.4, 1.2, 2.0][t % 3];
            if let Some(why) = federated_oracle_mismatch(&ds, &plan, lambda) {
                return Outcome::Fail(format!("M = {m}, partition {t}: {why}"));
            }
            runs += 1;
        }
    }
    Outcome::Pass(format!(
        "{runs} partitions of 30 instances, M in {{2,3,5}}: tables and stds within 1e-12, ledger bytes exact"
    ))
}

fn ac4_pagerank() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut solve_err, mut scale_err): (f64, f64) = (0.0, 0.0);
    let mut order_breaks = 0;
    for _ in 0..300 {
        let d = rng.random_range(1..=10);
        let rel: Vec<f64> = (0..d).map(|_| rng.random()).collect();
        let mut corr = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..i {
                let w = if rng.random_bool(0.3) { 0.0 } else { rng.random() };
                corr.set(i, j, w);
                corr.set(j, i, w);
            }
        }
        let zeta = 0.85;
        let g = build_graph(&rel, &corr, zeta).unwrap();
        let r = weighted_pagerank(&g, 1e-10, 200, Execution::Sequential).unwrap();

        let out_w: Vec<f64> = (0..d).map(|j| (0..d).map(|z| corr.get(j, z)).sum()).collect();
        let a = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                1.0
            } else if corr.get(i, j) > 0.0 {
                -zeta * corr.get(i, j) / out_w[j]
            } else {
                0.0
            }
        });
        let total: f64 = rel.iter().sum();
        let w = DVector::from_iterator(d, rel.iter().map(|v| (1.0 - zeta) * v / total));
        let exact = a.lu().solve(&w).unwrap();
        for i in 0..d {
            solve_err = solve_err.max((r.scores[i] - exact[i]).abs());
        }

        for c in [1e-3, 3.7, 1e3] {
            let mut scaled = corr.clone();
            for i in 0..d {
                for j in 0..d {
                    scaled.set(i, j, corr.get(i, j) * c);
                }
            }
            let rs = weighted_pagerank(&build_graph(&rel, &scaled, zeta).unwrap(), 1e-10, 200, Execution::Sequential)
                .unwrap();
            for i in 0..d {
                scale_err = scale_err.max((rs.scores[i] - r.scores[i]).abs());
            }
            let rel_scaled: Vec<f64> = rel.iter().map(|v| v * c).collect();
            let rv = weighted_pagerank(&build_graph(&rel_scaled, &corr, zeta).unwrap(), 1e-10, 200, Execution::Sequential)
                .unwrap();
            if rv.order != r.order {
                order_breaks += 1;
            }
        }
    }
    check(
        solve_err <= PAGERANK_SOLVE_TOL && scale_err <= EDGE_SCALE_TOL && order_breaks == 0,
        format!(
            "300 graphs (d <= 10): linear-solve deviation {solve_err:.2e}, edge-scaling deviation {scale_err:.2e}, vertex scaling keeps order"
        ),
        || {
            format!(
                "solve deviation {solve_err:.2e} (tol {PAGERANK_SOLVE_TOL:e}), edge-scaling deviation {scale_err:.2e} (tol {EDGE_SCALE_TOL:e}), {order_breaks} order changes under vertex scaling"
            )
        },
    )
}

fn emotions_path() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("SSFMLFS_EMOTIONS_ARFF") {
        return Some(PathBuf::from(p));
    }
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/emotions.arff");
    p.is_file().then_some(p)
}

fn ac5_emotions() -> Outcome {
    let Some(path) = emotions_path() else {
        return Outcome::Unavailable(
            "emotions.arff not found (set SSFMLFS_EMOTIONS_ARFF or add data/emotions.arff); criterion not evaluated".into(),
        );
    };
    let sidecar = path.with_extension("xml");
    let spec = if sidecar.is_file() { LabelSpec::Xml(sidecar) } else { LabelSpec::Trailing(6) };
    let start = Instant::now();
    let ds = match load_dataset(&path, DataFormat::Arff, &spec) {
        Ok(ds) => ds,
        Err(e) => return Outcome::Fail(format!("cannot load {}: {e}", path.display())),
    };
    if (ds.n_instances(), ds.n_features(), ds.n_labels()) != (593, 72, 6) {
        return Outcome::Fail(format!(
            "expected 593 × 72 × 6, got {} × {} × {}",
            ds.n_instances(),
            ds.n_features(),
            ds.n_labels()
        ));
    }
    let seeds = 5;
    let (mut ap, mut cv, mut rl) = (0.0, 0.0, 0.0);
    let (mut rap, mut rcv, mut rrl) = (0.0, 0.0, 0.0);
    for seed in 0..seeds {
        let cfg = RunConfig {
            clients: 10,
            labeled_fraction: 0.2,
            select: Some(28),
            mlknn_k: 10,
            smooth: 1.0,
            repeats: 20,
            seed,
            ..RunConfig::default()
        };
        let report = match run_experiment(&ds, &cfg) {
            Ok(a) => a.report,
            Err(e) => return Outcome::Fail(format!("seed {seed}: {e}")),
        };
        let rc = report.random_control.expect("control requested");
        ap += report.metrics.average_precision.value;
        cv += report.metrics.coverage.value;
        rl += report.metrics.ranking_loss.value;
        rap += rc.average_precision.mean;
        rcv += rc.coverage.mean;
        rrl += rc.ranking_loss.mean;
    }
    let k = seeds as f64;
    let (ap, cv, rl, rap, rcv, rrl) = (ap / k, cv / k, rl / k, rap / k, rcv / k, rrl / k);
    let elapsed = start.elapsed();
    let reference = PRESETS.iter().find(|p| p.name == "emotions").unwrap().reference.average_precision;
    let summary = format!(
        "AP {ap:.4} vs {rap:.4}, CV {cv:.4} vs {rcv:.4}, RL {rl:.4} vs {rrl:.4} (random), {:.1} s; reference AP {reference:.4}, |ΔAP| {:.4} (informational, 0.08)",
        elapsed.as_secs_f64(),
        (ap - reference).abs()
    );
    check(ap > rap && cv < rcv && rl < rrl && elapsed < EMOTIONS_BUDGET, summary.clone(), || summary)
}

fn ac6_metrics_and_mlknn() -> Outcome {
    let y = |rows: &[&[u8]]| LabelMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
    let p = |rows: &[&[f64]]| PredictionMatrix {
        scores: Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap(),
    };
    let fixtures = [
        ("AP perfect", average_precision(&p(&[&[0.9, 0.5, 0.1]]), &y(&[&[1, 0, 0]])).unwrap().value, 1.0),
        ("AP third", average_precision(&p(&[&[0.1, 0.5, 0.9]]), &y(&[&[1, 0, 0]])).unwrap().value, 1.0 / 3.0),
        ("AP two", average_precision(&p(&[&[0.9, 0.8, 0.1]]), &y(&[&[1, 1, 0]])).unwrap().value, 1.0),
        ("CV ranks 1,2", coverage(&p(&[&[0.9, 0.8, 0.1]]), &y(&[&[1, 1, 0]])).unwrap().value, 1.0),
        ("CV rank 1", coverage(&p(&[&[0.9, 0.8, 0.1]]), &y(&[&[1, 0, 0]])).unwrap().value, 0.0),
        ("CV rank L", coverage(&p(&[&[0.9, 0.8, 0.1]]), &y(&[&[0, 0, 1]])).unwrap().value, 2.0),
        ("RL perfect", ranking_loss(&p(&[&[0.9, 0.2, 0.1]]), &y(&[&[1, 0, 0]])).unwrap().value, 0.0),
        ("RL inverted", ranking_loss(&p(&[&[0.1, 0.5, 0.9]]), &y(&[&[1, 0, 0]])).unwrap().value, 1.0),
        ("RL half", ranking_loss(&p(&[&[0.5, 0.9, 0.1]]), &y(&[&[1, 0, 0]])).unwrap().value, 0.5),
    ];
    let bad: Vec<String> = fixtures
        .iter()
        .filter(|(_, got, want)| got != want)
        .map(|(name, got, want)| format!("{name}: {got} != {want}"))
        .collect();
    if !bad.is_empty() {
        return Outcome::Fail(bad.join("; "));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(4..=20);
        let d = rng.random_range(1..=4);
        let l = rng.random_range(1..=4);
        let k = rng.random_range(1..n);
        // Coarse grid values so that distance ties actually occur.
        let x: Dense = (0..n).map(|_| (0..d).map(|_| rng.random_range(0..4) as f64 / 4.0).collect()).collect();
        let labels: Vec<Vec<u8>> = (0..n).map(|_| (0..l).map(|_| rng.random_range(0..2)).collect()).collect();
        let ds = MultiLabelDataset::new(
            Matrix::from_rows(&x).unwrap(),
            Some(LabelMatrix::from_rows(&labels).unwrap()),
            (0..d).map(|p| format!("f{p}")).collect(),
            (0..l).map(|t| format!("y{t}")).collect(),
            "oracle",
        )
        .unwrap();
        let model = mlknn_train(&ds, k, 1.0, Execution::Sequential).unwrap();
        let oracle = OracleMlknn::train(x.clone(), labels, k, 1.0);
        for t in 0..l {
            worst = worst.max((model.prior[t] - oracle.prior[t]).abs());
            for c in 0..=k {
                worst = worst.max((model.likelihood_pos[t][c] - oracle.pos[t][c]).abs());
                worst = worst.max((model.likelihood_neg[t][c] - oracle.neg[t][c]).abs());
            }
        }
        let queries: Dense = (0..5).map(|_| (0..d).map(|_| rng.random_range(0..4) as f64 / 4.0).collect()).collect();
        let pred = mlknn_predict(&model, &Matrix::from_rows(&queries).unwrap(), Execution::Sequential).unwrap();
        for (i, q) in queries.iter().enumerate() {
            for (t, want) in oracle.predict(q).into_iter().enumerate() {
                worst = worst.max((pred.scores.get(i, t) - want).abs());
            }
        }
    }
    check(
        worst <= METRIC_TOL,
        format!("9 metric fixtures exact; MLKNN vs brute force on 200 sets (n <= 20), max deviation {worst:.2e}"),
        || format!("MLKNN deviates from the brute-force oracle by {worst:.2e}"),
    )
}

fn ac7_cost_table() -> Outcome {
    let expected = [
        ("cal500", 502, 68, 27),
        ("corel5k", 5000, 499, 150),
        ("emotions", 593, 72, 28),
        ("enron", 1702, 1001, 100),
        ("yeast", 2417, 103, 31),
    ];
    let distances = [1.0; 10];
    let mut bad = Vec::new();
    for (name, n, before, after) in expected {
        let Some(p) = PRESETS.iter().find(|p| p.name == name) else {
            bad.push(format!("{name}: missing preset"));
            continue;
        };
        let c = p.cost_comparison(&distances, 32).unwrap();
        let g = gcd(before, after);
        if c.ratio() != (after / g, before / g)
            || c.after * before as f64 != c.before * after as f64
            || c.before_formula != format!("Σ D_i × {n} × {before} × b")
            || c.after_formula != format!("Σ D_i × {n} × {after} × b")
        {
            bad.push(format!("{name}: {} → {} ({:?})", c.before_formula, c.after_formula, c.ratio()));
        }
    }
    let yeast = PRESETS[4].cost_comparison(&distances, 32).unwrap();
    if yeast.after != 10.0 * 2417.0 * 31.0 * 32.0 {
        bad.push(format!("yeast after-FS cost {}", yeast.after));
    }
    if PRESETS[2].cost_comparison(&[0.0; 10], 32).unwrap().before != 0.0 {
        bad.push("zero distances give nonzero cost".into());
    }
    check(
        bad.is_empty(),
        "after-FS counts 27/150/28/100/31 give exact ratios 27/68, 150/499, 7/18, 100/1001, 31/103".into(),
        || bad.join("; "),
    )
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("AC1", "entropy identities", ac1_entropy_identities),
        ("AC2", "hand traces", ac2_hand_traces),
        ("AC3", "federated equals centralized", ac3_federated_equals_centralized),
        ("AC4", "pagerank oracle", ac4_pagerank),
        ("AC5", "emotions end to end", ac5_emotions),
        ("AC6", "metrics and mlknn oracle", ac6_metrics_and_mlknn),
        ("AC7", "communication cost table", ac7_cost_table),
    ];
    let require_data = std::env::var("SSFMLFS_REQUIRE_DATA").is_ok_and(|v| v == "1");
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Outcome::Pass(detail) => println!("PASS {id} {name}: {detail} [{secs:.2}s]"),
            Outcome::Fail(detail) => {
                failed += 1;
                println!("FAIL {id} {name}: {detail} [{secs:.2}s]");
            }
            Outcome::Unavailable(detail) => {
                if require_data {
                    failed += 1;
                }
                println!("FAIL {id} {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
