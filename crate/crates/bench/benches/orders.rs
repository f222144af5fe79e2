use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use distorder::distributions::build;
use distorder::fixtures::{CE02_X_QUANTILE, CE02_Y_QUANTILE};
use distorder::orders::{check_order, QuantileTable};
use distorder::{Distortion, DistributionSpec, Expr, Grid, OrderKind};

fn quantile(text: &str) -> distorder::Distribution {
    build(&DistributionSpec::Quantile(Expr::parse(text).unwrap())).unwrap()
}

fn tables(c: &mut Criterion) {
    let grid = Grid::unit();
    let x = quantile(CE02_X_QUANTILE);
    let xh = x.distort(&Distortion::power(5.0).unwrap());
    c.bench_function("quantile table, 512 points", |b| b.iter(|| QuantileTable::build(black_box(&x), grid.points()).unwrap()));
    c.bench_function("quantile table, distorted, 512 points", |b| {
        b.iter(|| QuantileTable::build(black_box(&xh), grid.points()).unwrap())
    });
}

fn orders(c: &mut Criterion) {
    let grid = Grid::unit();
    let h = Distortion::power(5.0).unwrap();
    let (x, y) = (quantile(CE02_X_QUANTILE), quantile(CE02_Y_QUANTILE));
    let (xh, yh) = (x.distort(&h), y.distort(&h));
    let mut group = c.benchmark_group("check_order ce02");
    for kind in [OrderKind::Ttt, OrderKind::Ew, OrderKind::Dmrl, OrderKind::Qmit] {
        group.bench_function(kind.name(), |b| b.iter(|| check_order(black_box(&xh), black_box(&yh), kind, &grid).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, tables, orders);
criterion_main!(benches);
