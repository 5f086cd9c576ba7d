use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use oncilla_core::actuation::{cot_sweep, MotorSpec, SldmParams};
use oncilla_core::cpg::{integrate_step, make_trot_network, FeedbackTerm, OscillatorState};
use oncilla_core::pso::{optimize, SearchSpace, Sense, SwarmConfig};
use oncilla_core::sbcp::{self, decode_packet, encode, BusConfig, Frame};
use oncilla_core::sim::{simulate, GaitProgram};
use oncilla_core::TrajectoryParams;

fn cpg(c: &mut Criterion) {
    let params = make_trot_network(3.5, 3).unwrap();
    let state = OscillatorState::on_limit_cycle((0..12).map(|k| k as f64 * 0.5).collect(), &params);
    let fb = FeedbackTerm::zeros(12);
    c.bench_function("cpg_step_12_nodes", |b| {
        b.iter(|| integrate_step(black_box(&state), &params, &fb, 1e-3).unwrap())
    });
}

fn sim(c: &mut Criterion) {
    let gait = GaitProgram::trot(3.5, TrajectoryParams::default());
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    g.bench_function("trot_2s_1ms", |b| {
        b.iter(|| simulate(black_box(&gait), 2.0, 1e-3).unwrap())
    });
    g.finish();
}

fn sbcp_codec(c: &mut Criterion) {
    let frame = Frame::new(0x10, 3, 0x03, (0..64).collect());
    let bytes = encode(&frame).unwrap();
    c.bench_function("sbcp_encode_64", |b| {
        b.iter(|| encode(black_box(&frame)).unwrap())
    });
    c.bench_function("sbcp_decode_64", |b| {
        b.iter(|| decode_packet(black_box(&bytes)).unwrap())
    });
    c.bench_function("sbcp_demo_8_slaves", |b| {
        b.iter(|| sbcp::demo(8, BusConfig::default()).unwrap())
    });
}

fn pso(c: &mut Criterion) {
    let space = SearchSpace::uniform(5, -5.0, 5.0).unwrap();
    let cfg = SwarmConfig {
        particles: 30,
        iterations: 50,
        seed: 1,
        ..SwarmConfig::default()
    };
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    c.bench_function("pso_sphere_30x50", |b| {
        b.iter(|| optimize(sphere, &space, black_box(&cfg), Sense::Minimize).unwrap())
    });
}

fn sldm(c: &mut Criterion) {
    let p = SldmParams::default();
    let speeds = [0.05, 0.2, 0.41, 0.55, 0.71];
    let (la, ll) = (MotorSpec::leg_angle(), MotorSpec::leg_length());
    c.bench_function("sldm_sweep_5", |b| {
        b.iter(|| cot_sweep(black_box(&p), &speeds, &la, &ll).unwrap())
    });
}

criterion_group!(benches, cpg, sim, sbcp_codec, pso, sldm);
criterion_main!(benches);
