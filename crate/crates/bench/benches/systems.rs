use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use distorder::copulas::{Diagonal, DuranteGenerator};
use distorder::fixtures::*;
use distorder::systems::{classify_system, system_distortion};
use distorder::{CopulaHandle, Expr, Grid, MinimalSignature};

fn copulas(c: &mut Criterion) {
    let grid = Grid::unit();
    let f = DuranteGenerator::from_expr(Expr::parse(DURANTE_GENERATOR).unwrap(), 4, &grid).unwrap();
    let d = Diagonal::from_expr(Expr::parse(EX_3OF4_DIAGONAL).unwrap(), 4, &grid).unwrap();
    let (durante, jaworski) = (CopulaHandle::Durante(f), CopulaHandle::Jaworski(d));
    let point = [0.3, 0.7, 0.5, 0.9];
    c.bench_function("durante eval, n = 4", |b| b.iter(|| durante.eval(black_box(&point)).unwrap()));
    c.bench_function("jaworski eval, n = 4", |b| b.iter(|| jaworski.eval(black_box(&point)).unwrap()));
}

fn classification(c: &mut Criterion) {
    let grid = Grid::unit();
    let f = DuranteGenerator::from_expr(Expr::parse(DURANTE_GENERATOR).unwrap(), 4, &grid).unwrap();
    let sys = system_distortion(&MinimalSignature::parse(EX_DURANTE_1_SIGNATURE).unwrap(), &CopulaHandle::Durante(f)).unwrap();
    c.bench_function("classify durante system, 512 points", |b| b.iter(|| classify_system(black_box(&sys), &grid).unwrap()));
}

criterion_group!(benches, copulas, classification);
criterion_main!(benches);
