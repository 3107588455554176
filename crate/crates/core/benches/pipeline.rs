use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kh_core::complex::{BuildOptions, Complex, Flavor};
use kh_core::spectral::analyze;
use kh_core::ExecMode;

const KNOTS: [&str; 3] = ["7_4", "8_19", "9_42"];

fn pipeline(c: &mut Criterion) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/knots_le9.csv");
    let corpus = kh_core::diagram::load_corpus(path).expect("corpus loads");
    for flavor in [Flavor::Reduced, Flavor::Unreduced] {
        let mut group = c.benchmark_group(format!("build+pages/{}", flavor.name()));
        group.sample_size(10);
        for name in KNOTS {
            let d = &corpus.iter().find(|(n, _)| n == name).expect("knot in corpus").1;
            for mode in [ExecMode::Sequential, ExecMode::Parallel] {
                let opts = BuildOptions { mode, ..Default::default() };
                group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), name), d, |b, d| {
                    b.iter(|| {
                        let cx = Complex::build_with(black_box(d), flavor, opts).unwrap();
                        analyze(&cx, mode)
                    })
                });
            }
        }
        group.finish();
    }
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
