use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use oncilla_core::actuation::{cot_sweep, write_cot_csv};
use oncilla_core::pso::{gait_objective, optimize, write_trace_csv, Sense};
use oncilla_core::sbcp::{self, decode_packet, encode, parse_hex, Frame, Outcome};
use oncilla_core::sim::{
    metrics, simulate_with, turning_metrics, GaitMetrics, SimError, TrajectoryLog,
};
use oncilla_core::steering::apply_turn;
use oncilla_core::LegId;

use crate::config::{self, ExperimentConfig, StrategyKind};
use crate::output::RunOutput;
use crate::{
    Cli, Command, CotCommand, Failure, GaitCommand, RunOverrides, SbcpCommand, StrategyArg,
};

macro_rules! say {
    ($cli:expr, $($arg:tt)*) => {
        if !$cli.quiet {
            emit(format_args!($($arg)*));
        }
    };
}

/// Stdout line that tolerates a closed pipe.
fn emit(args: std::fmt::Arguments) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{args}");
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(p) => config::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Gait(GaitCommand::Run(o)) => gait_run(cli, cfg, o),
        Command::Gait(GaitCommand::Metrics { log, frequency }) => {
            gait_metrics(cli, cfg, log, *frequency)
        }
        Command::Turn(t) => {
            let s = &mut cfg.steering;
            match t.strategy {
                StrategyArg::Asl => {
                    s.strategy = StrategyKind::Asl;
                    s.varpi = t
                        .varpi
                        .ok_or_else(|| Failure::invalid("--strategy asl needs --varpi"))?;
                }
                StrategyArg::Aa => {
                    s.strategy = StrategyKind::AaAmp;
                    s.yaw_rate_rad_s = t
                        .yaw_rate
                        .ok_or_else(|| Failure::invalid("--strategy aa needs --yaw-rate"))?;
                }
            }
            turn(cli, cfg, &t.run)
        }
        Command::Cot(CotCommand::Sweep { speeds }) => {
            if let Some(v) = speeds {
                cfg.motor.sweep_speeds_mps = v.clone();
            }
            cot(cli, cfg)
        }
        Command::Optimize(o) => {
            if let Some(n) = o.particles {
                cfg.pso.particles = n;
            }
            if let Some(n) = o.iterations {
                cfg.pso.iterations = n;
            }
            pso(cli, cfg)
        }
        Command::Sbcp(c) => sbcp_command(cli, cfg, c),
    }
}

fn sim_failure(e: SimError) -> Failure {
    match e {
        SimError::InvalidProgram(_) | SimError::StepTooLarge { .. } => {
            Failure::invalid(e.to_string())
        }
        SimError::LogTooShort { .. } => {
            Failure::runtime(format!("{e}; increase --duration or sim.duration_s"))
        }
        _ => Failure::runtime(e.to_string()),
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, o: &RunOverrides) {
    if let Some(v) = o.duration {
        cfg.sim.duration_s = v;
    }
    if let Some(v) = o.dt {
        cfg.sim.dt_s = v;
    }
    if let Some(v) = o.frequency {
        cfg.gait.frequency_hz = v;
    }
    if let Some(v) = o.step_length {
        cfg.gait.step_length_m = v;
    }
}

/// Gait program with the configured steering, and its log.
fn simulate_config(cfg: &ExperimentConfig) -> Result<TrajectoryLog, Failure> {
    let mut program = cfg.gait_program()?;
    if let Some(cmd) = cfg.turn_command() {
        program =
            apply_turn(&program, &cmd).map_err(|e| Failure::invalid(format!("steering: {e}")))?;
    }
    let (duration, dt) = cfg.sim_step()?;
    simulate_with(&program, duration, dt, &cfg.sim_options()?).map_err(sim_failure)
}

fn metrics_csv(m: &GaitMetrics, out: &mut Vec<u8>) -> Result<(), std::io::Error> {
    use std::io::Write;
    let duty: Vec<String> = LegId::ALL
        .iter()
        .map(|l| format!("duty_factor_{l}"))
        .collect();
    writeln!(
        out,
        "speed_avg_mps,speed_peak_mps,stride_effective_m,{},com_vertical_oscillation_m,pitch_proxy_rad",
        duty.join(",")
    )?;
    let duty: Vec<String> = m.duty_factor.iter().map(|d| format!("{d:.6}")).collect();
    writeln!(
        out,
        "{:.6},{:.6},{:.6},{},{:.6},{:.6}",
        m.speed_avg,
        m.speed_peak,
        m.stride_effective,
        duty.join(","),
        m.com_vertical_oscillation,
        m.pitch_proxy
    )
}

fn print_metrics(cli: &Cli, m: &GaitMetrics) {
    say!(
        cli,
        "speed            {:.4} m/s (peak {:.4} m/s)",
        m.speed_avg,
        m.speed_peak
    );
    say!(cli, "stride           {:.4} m", m.stride_effective);
    let duty: Vec<String> = LegId::ALL
        .iter()
        .zip(m.duty_factor)
        .map(|(l, d)| format!("{l} {d:.3}"))
        .collect();
    say!(cli, "duty factor      {}", duty.join(", "));
    say!(cli, "vertical osc.    {:.2e} m", m.com_vertical_oscillation);
    say!(cli, "pitch proxy      {:.2e} rad", m.pitch_proxy);
}

fn report_written(cli: &Cli, files: &[std::path::PathBuf]) {
    for f in files {
        say!(cli, "wrote {}", f.display());
    }
}

fn gait_run(cli: &Cli, mut cfg: ExperimentConfig, o: &RunOverrides) -> Result<(), Failure> {
    apply_overrides(&mut cfg, o);
    let log = simulate_config(&cfg)?;
    let m = metrics(&log).map_err(sim_failure)?;
    print_metrics(cli, &m);
    let mut out = RunOutput::new(&cli.out);
    out.csv("trajectory.csv", |b| log.write_csv(b))?;
    out.csv("metrics.csv", |b| metrics_csv(&m, b))?;
    report_written(cli, &out.finish("gait run", &cfg)?);
    Ok(())
}

fn gait_metrics(
    cli: &Cli,
    cfg: ExperimentConfig,
    path: &Path,
    frequency: Option<f64>,
) -> Result<(), Failure> {
    let f = frequency.unwrap_or(cfg.gait.frequency_hz);
    if !(f > 0.0 && f.is_finite()) {
        return Err(Failure::invalid(format!("frequency {f} Hz must be > 0")));
    }
    let file =
        File::open(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let log = TrajectoryLog::read_csv(BufReader::new(file), f)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let m = metrics(&log).map_err(sim_failure)?;
    print_metrics(cli, &m);
    if let Ok(t) = turning_metrics(&log) {
        say!(
            cli,
            "turn radius      {:.4} m, full turn {:.2} s",
            t.radius,
            t.time_full_turn
        );
    }
    let mut out = RunOutput::new(&cli.out);
    out.csv("metrics.csv", |b| metrics_csv(&m, b))?;
    report_written(cli, &out.finish("gait metrics", &cfg)?);
    Ok(())
}

fn turn(cli: &Cli, mut cfg: ExperimentConfig, o: &RunOverrides) -> Result<(), Failure> {
    apply_overrides(&mut cfg, o);
    let log = simulate_config(&cfg)?;
    let t = turning_metrics(&log).map_err(sim_failure)?;
    say!(cli, "turn radius      {:.4} m", t.radius);
    say!(cli, "full turn        {:.3} s", t.time_full_turn);
    say!(cli, "path speed       {:.4} m/s", t.speed_avg);
    say!(cli, "net yaw          {:.4} rad", t.yaw_change);
    let mut out = RunOutput::new(&cli.out);
    out.csv("trajectory.csv", |b| log.write_csv(b))?;
    out.csv("turn_metrics.csv", |b: &mut Vec<u8>| {
        use std::io::Write;
        writeln!(b, "radius_m,time_full_turn_s,speed_avg_mps,yaw_change_rad")?;
        writeln!(
            b,
            "{:.6},{:.6},{:.6},{:.6}",
            t.radius, t.time_full_turn, t.speed_avg, t.yaw_change
        )
    })?;
    report_written(cli, &out.finish("turn", &cfg)?);
    Ok(())
}

fn cot(cli: &Cli, cfg: ExperimentConfig) -> Result<(), Failure> {
    let p = cfg.sldm()?;
    let (la, ll) = cfg.motors()?;
    let rows = cot_sweep(&p, &cfg.motor.sweep_speeds_mps, &la, &ll)
        .map_err(|e| Failure::invalid(format!("cot sweep: {e}")))?;
    say!(cli, "speed (m/s)  power (W)  COT");
    for r in &rows {
        say!(cli, "{:>11.3}  {:>9.2}  {:.3}", r.speed, r.power, r.cot);
    }
    let mut out = RunOutput::new(&cli.out);
    out.csv("cot.csv", |b| write_cot_csv(b, &rows))?;
    report_written(cli, &out.finish("cot sweep", &cfg)?);
    Ok(())
}

fn pso(cli: &Cli, cfg: ExperimentConfig) -> Result<(), Failure> {
    let swarm = cfg.swarm()?;
    let search = cfg.gait_search()?;
    let space = search
        .space()
        .map_err(|e| Failure::invalid(format!("pso: {e}")))?;
    let r = optimize(
        |x: &[f64]| gait_objective(x, &search),
        &space,
        &swarm,
        Sense::Maximize,
    )
    .map_err(|e| Failure::invalid(format!("pso: {e}")))?;
    if !r.best_score.is_finite() {
        return Err(Failure::runtime(
            "no particle produced a valid gait; check the parameter bounds",
        ));
    }
    say!(
        cli,
        "best distance    {:.4} m over {} s",
        r.best_score,
        search.window
    );
    for ((p, _, _), v) in search.params.iter().zip(&r.best_position) {
        say!(cli, "  {:<16} {v:.6}", p.name());
    }
    let mut out = RunOutput::new(&cli.out);
    out.csv("pso_trace.csv", |b| write_trace_csv(b, &r.trace))?;
    out.csv("pso_best.csv", |b: &mut Vec<u8>| {
        use std::io::Write;
        writeln!(b, "parameter,value")?;
        for ((p, _, _), v) in search.params.iter().zip(&r.best_position) {
            writeln!(b, "{},{v:.9}", p.name())?;
        }
        writeln!(b, "distance_m,{:.9}", r.best_score)
    })?;
    report_written(cli, &out.finish("optimize", &cfg)?);
    Ok(())
}

fn sbcp_command(cli: &Cli, cfg: ExperimentConfig, c: &SbcpCommand) -> Result<(), Failure> {
    match c {
        SbcpCommand::Encode {
            class,
            id,
            instruction,
            params,
        } => {
            let params = parse_hex(params).map_err(|e| Failure::invalid(e.to_string()))?;
            let bytes = encode(&Frame::new(*class, *id, *instruction, params))
                .map_err(|e| Failure::invalid(e.to_string()))?;
            emit(format_args!("{}", hex::encode_upper(bytes)));
            Ok(())
        }
        SbcpCommand::Decode { hex } => {
            let bytes = parse_hex(hex).map_err(|e| Failure::invalid(e.to_string()))?;
            let frame =
                decode_packet(&bytes).map_err(|e| Failure::invalid(format!("decode: {e}")))?;
            emit(format_args!("{frame}"));
            Ok(())
        }
        SbcpCommand::Demo { slaves } => {
            let mut cfg = cfg;
            cfg.sbcp.slaves = *slaves;
            let bus_cfg = cfg.bus()?;
            let (report, bus) = sbcp::demo(cfg.sbcp.slaves, bus_cfg)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            for o in &report.outcomes {
                let what = match &o.outcome {
                    Outcome::Response(f) => format!("reply {f}"),
                    Outcome::Timeout => "timeout".to_string(),
                    Outcome::Corrupt(_) => "corrupt reply".to_string(),
                    Outcome::NoResponseExpected => "no reply expected".to_string(),
                };
                say!(
                    cli,
                    "{:>8.2} us .. {:>8.2} us  {what}",
                    o.sent_at * 1e6,
                    o.completed_at * 1e6
                );
            }
            say!(cli, "group finished in {:.2} us", report.elapsed() * 1e6);
            let mut out = RunOutput::new(&cli.out);
            out.csv("sbcp_trace.csv", |b| sbcp::write_trace_csv(b, bus.trace()))?;
            report_written(cli, &out.finish("sbcp demo", &cfg)?);
            Ok(())
        }
    }
}
