use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use modkit::characters::HeckeCharacter;
use modkit::kloosterman::sweep;
use modkit::nf::{Elem, Field, Ideal};
use modkit::shifted_conv::{amplified_moment, BumpWeight};
use modkit::spectral::{bessel_transforms, kuznetsov_geometric_side, EigenvalueSystem, KZ};
use modkit::whittaker::gram_matrix;
use modkit::Exec;
use num_complex::Complex64;
use std::hint::black_box;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn kloosterman_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("kloosterman_sweep");
    g.sample_size(10);
    for (name, k) in [("Q", Field::rationals()), ("Q(sqrt5)", Field::new(5).unwrap())] {
        let pairs = [(Elem::ONE, Elem::ONE), (Elem::int(2), Elem::int(3))];
        for (policy, exec) in POLICIES {
            g.bench_with_input(BenchmarkId::new(policy, name), &k, |b, k| b.iter(|| sweep(k, 400, &pairs, exec).unwrap()));
        }
    }
    g.finish();
}

fn bessel(c: &mut Criterion) {
    let mut g = c.benchmark_group("bessel_transforms");
    g.sample_size(10);
    let ts: Vec<f64> = (0..20).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).flat_map(|t| [t, -t]).collect();
    for (policy, exec) in POLICIES {
        g.bench_function(BenchmarkId::new(policy, "Z=2"), |b| b.iter(|| bessel_transforms(&KZ { z: 2.0 }, black_box(&ts), 1e-10, exec).unwrap()));
    }
    g.finish();
}

fn whittaker(c: &mut Criterion) {
    let mut g = c.benchmark_group("whittaker_gram");
    g.sample_size(10);
    let qs = [-4, -2, 0, 2, 4];
    for (policy, exec) in POLICIES {
        g.bench_function(BenchmarkId::new(policy, "nu=0.5i"), |b| b.iter(|| gram_matrix(&qs, Complex64::new(0.0, 0.5), exec).unwrap()));
    }
    g.finish();
}

fn kuznetsov(c: &mut Criterion) {
    let mut g = c.benchmark_group("kuznetsov_geometric");
    g.sample_size(10);
    let k = Field::rationals();
    for (policy, exec) in POLICIES {
        g.bench_function(BenchmarkId::new(policy, "H=200"), |b| {
            b.iter(|| kuznetsov_geometric_side(&k, Elem::ONE, Elem::int(2), &Ideal::unit(1), &[KZ { z: 1.0 }], (1.0, 1.0), 200.0, exec).unwrap())
        });
    }
    g.finish();
}

fn amplifier(c: &mut Criterion) {
    let mut g = c.benchmark_group("amplified_moment");
    g.sample_size(10);
    let k = Field::rationals();
    let q = Ideal::rational(&k, 11);
    let sys = EigenvalueSystem::synthetic(&k, 1, false);
    let chi = HeckeCharacter::trivial(&k).unwrap();
    let w = BumpWeight::cube(1, 0.5, 2.0).unwrap();
    for (policy, exec) in POLICIES {
        g.bench_function(BenchmarkId::new(policy, "q=11"), |b| b.iter(|| amplified_moment(&q, 10.0, &sys, &chi, &w, 200.0, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, kloosterman_sweep, bessel, whittaker, kuznetsov, amplifier);
criterion_main!(benches);
