use criterion::{black_box, criterion_group, criterion_main, Criterion};
use gpaley_core::perm::{agl_one, wreath_product_action};
use gpaley_core::{
    automorphism_group, build_field, CheckMode, CyclotomicScheme, GPaleyParams, PermutationGroup, SearchOptions,
};

fn field_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_field");
    for (p, r) in [(2u64, 10u32), (3, 6), (2, 16)] {
        group.bench_function(format!("GF({p}^{r})"), |b| b.iter(|| build_field(black_box(p), black_box(r)).unwrap()));
    }
    group.finish();
}

fn automorphism_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("automorphism_group");
    group.sample_size(20);
    for (p, r, k) in [(3u64, 4u32, 4u64), (2, 8, 5), (3, 5, 11), (2, 10, 3)] {
        let params = GPaleyParams::new(p, r, k).unwrap();
        let g = params.build().unwrap();
        group.bench_function(format!("GPaley({},{})", params.q(), params.valency()), |b| {
            b.iter(|| automorphism_group(&g, &SearchOptions::automorphism()).unwrap().order())
        });
    }
    group.finish();
}

/// Same generators, no cached chain.
fn fresh(g: &PermutationGroup) -> PermutationGroup {
    PermutationGroup::new(g.degree(), g.generators().to_vec()).unwrap()
}

fn schreier_sims(c: &mut Criterion) {
    let mut group = c.benchmark_group("schreier_sims");
    let f = build_field(2, 10).unwrap();
    let agl = agl_one(&f);
    group.bench_function("AΓL(1,1024)", |b| b.iter(|| fresh(&agl).order()));
    let wreath = wreath_product_action(5, 4, 1 << 20).unwrap();
    group.bench_function("S5 wr S4", |b| b.iter(|| fresh(&wreath).order()));
    group.finish();
}

fn scheme_verification(c: &mut Criterion) {
    let mut group = c.benchmark_group("intersection_numbers");
    group.sample_size(10);
    let scheme = CyclotomicScheme::from_params(GPaleyParams::new(3, 5, 11).unwrap()).unwrap();
    group.bench_function("Cyc(243,11) representative", |b| {
        b.iter(|| scheme.intersection_numbers(CheckMode::Representative).unwrap())
    });
    group.bench_function("Cyc(243,11) full", |b| b.iter(|| scheme.intersection_numbers(CheckMode::Full).unwrap()));
    group.finish();
}

criterion_group!(benches, field_construction, automorphism_search, schreier_sims, scheme_verification);
criterion_main!(benches);
