use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use htv_core::affine::{self, LieElement};
use htv_core::distributions::BiDistribution;
use htv_core::{ConformalAlgebra, ConformalElement, HopfElement, KElement, Mode, State, VacuumModule, Window};

fn ktau(c: &mut Criterion) {
    let a = KElement::falling_factorial(9);
    let b = KElement::falling_factorial(-10);
    c.bench_function("trace t(9) t(-10)", |bch| bch.iter(|| black_box(&a * &b).trace()));
    let h = HopfElement::log_series(9);
    let f = KElement::monomial(8);
    c.bench_function("log series on t^8", |bch| bch.iter(|| h.act(black_box(&f))));
    c.bench_function("alpha round trip", |bch| {
        bch.iter(|| HopfElement::alpha_inv(&HopfElement::monomial(black_box(-3), 4).alpha()).unwrap())
    });
}

fn distributions(c: &mut Criterion) {
    let w = Window::symmetric(8);
    c.bench_function("delta mode matrix 17x17", |bch| {
        bch.iter(|| BiDistribution::delta().mode_matrix(black_box(w)).unwrap())
    });
}

fn conformal(c: &mut Criterion) {
    let alg = ConformalAlgebra::toda();
    let p = &KElement::pole(1, 2) + &KElement::falling_factorial(3);
    let g = KElement::pole(-2, 1);
    c.bench_function("bracket B C", |bch| {
        bch.iter(|| {
            affine::bracket(
                &alg,
                &LieElement::basic("B", p.clone()),
                &LieElement::basic("C", g.clone()),
            )
            .unwrap()
        })
    });
    let (b, cg) = (ConformalElement::generator("B"), ConformalElement::generator("C"));
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("current commutator window 4", |bch| {
        bch.iter(|| affine::current_commutator(&alg, &b, &cg, Window::symmetric(4)).unwrap())
    });
    let v = VacuumModule::toda();
    let mk = |name: &str| v.act(&Mode::new(name, 0, 1).element(), &State::vacuum()).unwrap();
    let (sb, sc) = (mk("B"), mk("C"));
    group.bench_function("vertex mode B C", |bch| {
        bch.iter(|| {
            v.vertex_eval(&sb, &KElement::falling_factorial(black_box(3)), &sc)
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, ktau, distributions, conformal);
criterion_main!(benches);
