use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use titsweyl::oracle::family_for_model;
use titsweyl::{
    builtin_family, from_selector, induced_weyl_law, model_rank_space, realizable_patterns_charts, spectrum, tits_points,
    OracleConfig, DEFAULT_CAP,
};
use titsweyl_bench::MODELS;

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    for sel in MODELS {
        let g = from_selector(sel).expect("catalog model");
        group.bench_function(*sel, |b| b.iter(|| spectrum(black_box(&g.presentation), DEFAULT_CAP).expect("spectrum")));
    }
    group.finish();
}

fn rank_and_weyl(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank_weyl_tits");
    group.sample_size(10);
    for sel in ["sl:3", "sl:4", "gl:3"] {
        let g = from_selector(sel).expect("catalog model");
        group.bench_function(sel, |b| {
            b.iter(|| {
                let rs = model_rank_space(&g, DEFAULT_CAP).expect("rank space");
                let w = induced_weyl_law(&g, &rs).expect("weyl");
                tits_points(&g, &rs, &w, 2).expect("tits points").count()
            })
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let cfg = OracleConfig { samples: 200, ..OracleConfig::default() };
    for sel in ["sl:2", "psl2-adj"] {
        let charts = builtin_family(family_for_model(sel).expect("family")).expect("family");
        group.bench_function(sel, |b| b.iter(|| realizable_patterns_charts(black_box(&charts), &cfg).patterns.len()));
    }
    group.finish();
}

criterion_group!(benches, spectra, rank_and_weyl, oracle);
criterion_main!(benches);
