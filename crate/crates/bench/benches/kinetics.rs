use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ckm_core::sim::{integrate_rk4, run_experiment, Experiment, IntegrateOptions, NoiseSpec};
use ckm_core::{compile_mass_action, parse_directive, parse_network, rank_models, BasisSpec, Dataset, KineticModel, TimeGrid};

const LV: &str = "A -> 2 A @ k1 = 0.1\nA + B -> 2 B @ k2 = 0.05\nB -> 0 @ k3 = 0.05\n";
const FIG2: &str = "\
A -> 2 A @ k1 = 1
B -> 2 B @ k2 = 0.8
A + C -> 2 C @ k3 = 0.5
B + C -> 2 C @ k4 = 0.4
C -> 0 @ k5 = 1.2
";

fn model(net: &str, initial: Vec<f64>) -> KineticModel {
    compile_mass_action(&parse_network(net).unwrap()).unwrap().with_initial(initial).unwrap()
}

fn fig2_experiment() -> Experiment {
    let m = model(FIG2, vec![1.0, 1.0, 1.0]);
    let d = |s: &str| parse_directive(s, &m).unwrap();
    Experiment::new(m.clone(), TimeGrid::uniform(0.0, 10.0, 50, 20).unwrap(), 20240601)
        .environment("observational", vec![], 20)
        .environment("k1_doubled", vec![d("set-rate k1 2")], 20)
        .environment("k2_halved_B0_2", vec![d("set-rate k2 0.4"), d("set-initial B 2")], 20)
        .noise(NoiseSpec::uniform(0.01, 3))
}

fn rk4(c: &mut Criterion) {
    let lv = model(LV, vec![1.0, 1.5]);
    let grid = TimeGrid::uniform(0.0, 100.0, 201, 50).unwrap();
    c.bench_function("rk4 lotka-volterra 10k steps", |b| {
        b.iter(|| integrate_rk4(black_box(&lv), &grid, &IntegrateOptions::default()).unwrap())
    });
}

fn experiment(c: &mut Criterion) {
    let exp = fig2_experiment();
    c.bench_function("run_experiment 3 envs x 20 reps", |b| b.iter(|| run_experiment(black_box(&exp)).unwrap()));
}

fn ranking(c: &mut Criterion) {
    let ds: Dataset = run_experiment(&fig2_experiment()).unwrap();
    let spec = BasisSpec::default();
    c.bench_function("rank_models target C p_max 3", |b| {
        b.iter(|| rank_models(black_box(&ds), 2, 3, &spec).unwrap())
    });
}

criterion_group!(benches, rk4, experiment, ranking);
criterion_main!(benches);
