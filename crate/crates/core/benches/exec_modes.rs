//! Sequential against data-parallel execution for the heavy kernels.

use std::hint::black_box;
use std::sync::Arc;

use biorth_core::asymptotics::{default_probes, empirical_tables, make_predictor, TableKind};
use biorth_core::equilibrium::{nikishin_matrix, solve_equilibrium, solve_equilibrium_with, Initialization};
use biorth_core::hp_solver::HpSolver;
use biorth_core::measures::{Interval, IntervalMeasure};
use biorth_core::nikishin::NikishinSystem;
use biorth_core::Exec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const PREC: u32 = 256;
const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn measures(nodes: usize) -> Vec<Arc<IntervalMeasure>> {
    vec![
        Arc::new(IntervalMeasure::lebesgue(0.0, 1.0, nodes, PREC).unwrap()),
        Arc::new(IntervalMeasure::lebesgue(2.0, 3.0, nodes, PREC).unwrap()),
        Arc::new(IntervalMeasure::lebesgue(-1.0, 1.5, nodes, PREC).unwrap()),
    ]
}

// Fresh systems each iteration: transform caches would otherwise hide the work.
fn system(ms: &[Arc<IntervalMeasure>], exec: Exec) -> Arc<NikishinSystem> {
    Arc::new(NikishinSystem::new(ms.to_vec()).unwrap().with_exec(exec))
}

fn bimoments(c: &mut Criterion) {
    let ms = measures(80);
    let mut g = c.benchmark_group("bimoment_matrix");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(HpSolver::new(system(&ms, exec), 24)))
        });
    }
    g.finish();
}

fn degree_sweep(c: &mut Criterion) {
    let ms = measures(60);
    let ns: Vec<usize> = (0..=16).collect();
    let mut g = c.benchmark_group("solve_degrees_0_to_16");
    g.sample_size(10);
    for (name, exec) in MODES {
        let solver = HpSolver::new(system(&ms, exec), 16);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| black_box(solver.solve_many(&ns).unwrap())));
    }
    g.finish();
}

fn equilibrium(c: &mut Criterion) {
    let ivs: Vec<Interval> = [(0.0, 1.0), (2.0, 3.0), (-1.0, 1.5)]
        .iter()
        .map(|&(a, b)| Interval::from_f64(a, b, 64).unwrap())
        .collect();
    let cm = nikishin_matrix(3).unwrap();
    let mut g = c.benchmark_group("equilibrium_128_cells");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(solve_equilibrium_with(&ivs, &cm, 128, 1e-10, 2000, Initialization::Arcsine, exec)))
        });
    }
    g.finish();
}

fn tables(c: &mut Criterion) {
    let ms = measures(60);
    let sys = system(&ms[..2], Exec::Parallel);
    let ns: Vec<usize> = (0..=16).collect();
    let sols = HpSolver::new(sys.clone(), 16).solve_many(&ns).unwrap();
    let ivs = sys.intervals();
    let pred = make_predictor(solve_equilibrium(&ivs, &nikishin_matrix(2).unwrap(), 96, 1e-10, 2000).unwrap()).unwrap();
    let probes = default_probes(&ivs, PREC);
    let mut g = c.benchmark_group("nthroot_table");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(empirical_tables(&sols, &pred, &probes, TableKind::NthRoot, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bimoments, degree_sweep, equilibrium, tables);
criterion_main!(benches);
