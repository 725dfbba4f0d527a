use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use transversal::finisher::{finish, FinisherParams};
use transversal::generators::{edge_prob_for_degree, gen_random_cover};
use transversal::nibble::{monte_carlo_check, EstimateOptions, NibbleParams};
use transversal::{stats, Execution};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn monte_carlo(c: &mut Criterion) {
    let q = edge_prob_for_degree(80, 30, 0.5, 18.0);
    let inst = gen_random_cover(80, 30, q, 0.5, 3, 1).unwrap().instance;
    let d = stats(&inst).avg_degree_f64();
    let params = NibbleParams::new(d, 30.0, 0.5, 7);
    let mut group = c.benchmark_group("monte_carlo_2000_trials");
    group.sample_size(10);
    for (name, execution) in MODES {
        let options = EstimateOptions {
            execution,
            ..EstimateOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &options, |b, options| {
            b.iter(|| monte_carlo_check(&inst, &params, 2000, options).unwrap())
        });
    }
    group.finish();
}

fn finisher_sweep(c: &mut Criterion) {
    let q = edge_prob_for_degree(200, 24, 0.3, 4.0);
    let inst = gen_random_cover(200, 24, q, 0.3, 2, 3).unwrap().instance;
    let mut group = c.benchmark_group("finisher_64_seeds");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                execution.map(64, |seed| {
                    finish(&inst, &FinisherParams::new(seed as u64))
                        .unwrap()
                        .resamples()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, finisher_sweep);
criterion_main!(benches);
