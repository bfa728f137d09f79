use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use supbin::codingsim::{BcCmSimulator, Rates};
use supbin::prob::{entropy, kl, mutual_information};
use supbin::schemes::{binning_symbols, build_bc, build_ifc, build_mac_cm, SchemeSpec};
use supbin::typicality::{is_typical, Sequence, TypicalityParams};
use supbin::{RateRegion, VarSet};
use supbin_bench::{noiseless_sim, random_law, rng};

fn eliminate_binning(r: &RateRegion) -> RateRegion {
    let b = binning_symbols(r);
    let victims: Vec<&str> = b.iter().map(String::as_str).collect();
    r.fme_eliminate_all(&victims).expect("eliminable")
}

fn symbolic_elimination(c: &mut Criterion) {
    let mut g = c.benchmark_group("fme");
    for (name, region) in [
        ("mac-cm", build_mac_cm(&SchemeSpec::mac_cm()).unwrap()),
        ("bc", build_bc(&SchemeSpec::bc()).unwrap()),
        ("ifc", build_ifc(&SchemeSpec::ifc()).unwrap()),
    ] {
        g.bench_function(name, |b| b.iter(|| eliminate_binning(black_box(&region))));
    }
    g.finish();
}

fn information_measures(c: &mut Criterion) {
    let mut g = c.benchmark_group("entropy");
    for vars in [3usize, 4, 6] {
        let p = random_law(vars, 3, 7);
        let q = random_law(vars, 3, 8);
        let all: VarSet = (0..vars).collect();
        g.bench_with_input(BenchmarkId::new("joint", vars), &p, |b, p| b.iter(|| entropy(p, all).unwrap()));
        g.bench_with_input(BenchmarkId::new("kl", vars), &p, |b, p| b.iter(|| kl(p, &q).unwrap()));
        g.bench_with_input(BenchmarkId::new("cond-mi", vars), &p, |b, p| {
            b.iter(|| mutual_information(p, VarSet::singleton(0), VarSet::singleton(1), VarSet::singleton(vars - 1)).unwrap())
        });
    }
    g.finish();
}

fn typicality(c: &mut Criterion) {
    let mut g = c.benchmark_group("typicality");
    let params = TypicalityParams::new(0.1, true).unwrap();
    for n in [100usize, 1000, 10_000] {
        let p = random_law(2, 4, 3);
        let seq = Sequence::sample(&p, n, &mut rng(4)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &seq, |b, seq| b.iter(|| is_typical(seq, &p, params).unwrap()));
    }
    g.finish();
}

fn codebook_generation(c: &mut Criterion) {
    let mut g = c.benchmark_group("codebook");
    g.sample_size(20);
    for n in [50usize, 100, 200] {
        let rates = Rates { r1: 0.03, r2: 0.03, rho1: 0.01, rho2: 0.0 };
        let sim = BcCmSimulator::new(noiseless_sim(n, rates)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &sim, |b, sim| {
            b.iter(|| sim.generate_codebook(&mut rng(5)))
        });
    }
    g.finish();
}

criterion_group!(benches, symbolic_elimination, information_measures, typicality, codebook_generation);
criterion_main!(benches);
