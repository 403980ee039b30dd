//! Sequential versus parallel timings of the hot paths.
//!
//! `cargo bench -p ssfmlfs-core`. Without the `parallel` feature both variants
//! run the same sequential code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ssfmlfs_core::dataset::{partition_noniid, MultiLabelDataset, PartitionParams};
use ssfmlfs_core::evaluation::{mlknn_predict, mlknn_train};
use ssfmlfs_core::federation::{run_protocol, ProtocolConfig};
use ssfmlfs_core::fuzzy::{EntropyTable, FuzzySimilarityMatrix};
use ssfmlfs_core::synthetic::{planted_dataset, SyntheticSpec};
use ssfmlfs_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn data(instances: usize, features: usize) -> MultiLabelDataset {
    planted_dataset(&SyntheticSpec {
        instances,
        labels: 6,
        informative: features / 3,
        noise: features - features / 3,
        seed: 9,
        ..SyntheticSpec::default()
    })
    .unwrap()
    .dataset
}

fn entropy_table(c: &mut Criterion) {
    let ds = data(200, 48);
    let rels: Vec<_> = (0..ds.n_features())
        .map(|p| FuzzySimilarityMatrix::build(&ds.features.column(p), 0.2, p as u32))
        .collect();
    let mut group = c.benchmark_group("entropy_table");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "200x48"), |b| {
            b.iter(|| EntropyTable::compute(black_box(&rels), exec).unwrap())
        });
    }
    group.finish();
}

fn mlknn(c: &mut Criterion) {
    let train = data(800, 32);
    let test = data(300, 32);
    let mut group = c.benchmark_group("mlknn");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "train"), |b| {
            b.iter(|| mlknn_train(black_box(&train), 10, 1.0, exec).unwrap())
        });
        let model = mlknn_train(&train, 10, 1.0, exec).unwrap();
        group.bench_function(BenchmarkId::new(name, "predict"), |b| {
            b.iter(|| mlknn_predict(&model, black_box(&test.features), exec).unwrap())
        });
    }
    group.finish();
}

fn protocol(c: &mut Criterion) {
    let ds = data(600, 36);
    let plan = partition_noniid(
        &ds,
        &PartitionParams {
            clients: 5,
            ..PartitionParams::default()
        },
    )
    .unwrap();
    let mut group = c.benchmark_group("protocol");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = ProtocolConfig {
            select: Some(12),
            exec,
            ..ProtocolConfig::default()
        };
        group.bench_function(BenchmarkId::new(name, "600x36_m5"), |b| {
            b.iter(|| run_protocol(&plan, black_box(&ds), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, entropy_table, mlknn, protocol);
criterion_main!(benches);
