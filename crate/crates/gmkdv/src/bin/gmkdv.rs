//! Command-line laboratory for the gmKdV scheme.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gmkdv::config::{OutputConfig, Preset, RunConfig, WaveConfig};
use gmkdv::experiment;

#[derive(Parser)]
#[command(name = "gmkdv", about = "Conservative finite-difference laboratory for the gmKdV equation", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file (flat key = value text).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coefficient preset: mkdv-ex1, mgdp-ex2, mgdp-ex3.
    #[arg(long)]
    preset: Option<String>,
    /// Space step (tau defaults to h^2).
    #[arg(long)]
    h: Option<f64>,
    /// Time step override.
    #[arg(long)]
    tau: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn build(&self) -> Result<RunConfig, String> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::from_file(path).map_err(|e| e.to_string())?,
            (None, Some(name)) => {
                RunConfig::preset(Preset::parse(name).map_err(|e| e.to_string())?)
            }
            (None, None) => return Err("either --config or --preset is required".into()),
        };
        if let (Some(name), Some(_)) = (&self.preset, &self.config) {
            // --preset on top of --config replaces the model coefficients
            let p = Preset::parse(name).map_err(|e| e.to_string())?;
            if let Some(model) = p.model() {
                cfg.preset = p;
                cfg.model = model;
            }
        }
        if let Some(h) = self.h {
            cfg.h = h;
        }
        if let Some(tau) = self.tau {
            cfg.tau = Some(tau);
        }
        if self.out.is_some() {
            cfg.output.dir = self.out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Export a soliton profile, its t = 0 sample and the F(g) curve.
    Profile {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Wave amplitude (negative for antisolitons).
        #[arg(long, short = 'A', allow_hyphen_values = true)]
        amplitude: f64,
    },
    /// Run the scheme and report conservation diagnostics.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Wave as A or A:x0 (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        wave: Vec<String>,
        /// Built-in collision setup: two-soliton | soliton-antisoliton.
        #[arg(long, conflicts_with = "wave")]
        collision: Option<String>,
        /// Snapshot times, comma separated.
        #[arg(long)]
        snapshots: Option<String>,
        /// Diagnostics CSV cadence in steps.
        #[arg(long)]
        cadence: Option<usize>,
        /// Final time override.
        #[arg(long)]
        t_final: Option<f64>,
        /// Linearization iterations per step (debug; the scheme uses 2).
        #[arg(long, default_value_t = 2)]
        max_iters: usize,
    },
    /// Convergence sweep over a list of space steps (tau = h^2 each row).
    Convergence {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Wave as A or A:x0 (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        wave: Vec<String>,
        /// Space steps, comma separated.
        #[arg(long, required = true)]
        h_list: String,
    },
    /// Run the algebraic identity suite and print pass/fail lines.
    Check,
}

fn parse_wave(s: &str) -> Result<WaveConfig, String> {
    let mut it = s.split(':');
    let amplitude = it
        .next()
        .unwrap()
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("bad wave amplitude in '{s}'"))?;
    let x0 = match it.next() {
        Some(v) => Some(v.trim().parse::<f64>().map_err(|_| format!("bad x0 in '{s}'"))?),
        None => None,
    };
    if it.next().is_some() {
        return Err(format!("wave '{s}' should be A or A:x0"));
    }
    Ok(WaveConfig { amplitude, x0 })
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Profile { cfg, amplitude } => {
            let cfg = cfg.build()?;
            let dir = cfg
                .output
                .dir
                .clone()
                .ok_or("profile needs --out (or output.dir in the config)")?;
            let paths =
                experiment::emit_profile(amplitude, &cfg, &dir).map_err(|e| e.to_string())?;
            for p in paths {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Run {
            cfg,
            wave,
            collision,
            snapshots,
            cadence,
            t_final,
            max_iters,
        } => {
            let mut cfg = match collision.as_deref() {
                Some("two-soliton") => {
                    let mut c = experiment::two_soliton_config();
                    apply_overrides(&mut c, &cfg)?;
                    c
                }
                Some("soliton-antisoliton") => {
                    let mut c = experiment::soliton_antisoliton_config();
                    apply_overrides(&mut c, &cfg)?;
                    c
                }
                Some(other) => return Err(format!("unknown collision setup '{other}'")),
                None => cfg.build()?,
            };
            for w in &wave {
                cfg.waves.push(parse_wave(w)?);
            }
            if let Some(list) = snapshots {
                cfg.output.snapshots = list
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad snapshot '{s}'")))
                    .collect::<Result<_, _>>()?;
            }
            if let Some(c) = cadence {
                cfg.output.cadence = c;
            }
            if let Some(t) = t_final {
                cfg.t_final = t;
            }
            cfg.max_iters = max_iters;
            let summary = experiment::run(&cfg).map_err(|e| e.to_string())?;
            let f = &summary.final_sample;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "steps = {}  Delta1 = {:.6e}  Delta2 = {:.6e}",
                summary.steps, f.delta1, f.delta2
            );
            if f.er.is_finite() {
                println!("Er = {:.6e}", f.er);
            }
            println!("peak = {:.6} at x = {:.4}", f.peak_value, f.peak_x);
            if let Some(v) = summary.peak_speed {
                println!("peak speed = {v:.6}");
            }
            for (k, w) in summary.waves.iter().enumerate() {
                println!(
                    "wave {}: A = {} x0 = {:.4} V = {:.12}",
                    k + 1,
                    w.amplitude,
                    w.x0,
                    w.velocity
                );
            }
            println!("wall time = {:.2} s", summary.wall_secs);
            Ok(())
        }
        Command::Convergence { cfg, wave, h_list } => {
            let mut cfg = cfg.build()?;
            for w in &wave {
                cfg.waves.push(parse_wave(w)?);
            }
            let hs: Vec<f64> = h_list
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad h '{s}'")))
                .collect::<Result<_, _>>()?;
            let rows = experiment::convergence(&cfg, &hs).map_err(|e| e.to_string())?;
            println!("{:>10}  {:>12}  {:>12}  {:>12}", "h", "Er", "Delta1", "Delta2");
            for row in rows {
                match row.error {
                    None => println!(
                        "{:>10.6}  {:>12.4e}  {:>12.4e}  {:>12.4e}",
                        row.h, row.er, row.delta1, row.delta2
                    ),
                    Some(e) => println!("{:>10.6}  failed: {e}", row.h),
                }
            }
            Ok(())
        }
        Command::Check => {
            let checks = experiment::check_identities(100, 256);
            let mut ok = true;
            for c in &checks {
                println!(
                    "{}  {} (worst {:.3e}, tol {:.0e})",
                    if c.pass { "pass" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.tol
                );
                ok &= c.pass;
            }
            if ok {
                Ok(())
            } else {
                Err("identity suite failed".into())
            }
        }
    }
}

fn apply_overrides(cfg: &mut RunConfig, args: &ConfigArgs) -> Result<(), String> {
    if args.config.is_some() {
        return Err("--collision and --config are mutually exclusive".into());
    }
    if let Some(name) = &args.preset {
        return Err(format!("--collision fixes the preset (got --preset {name})"));
    }
    if let Some(h) = args.h {
        cfg.h = h;
    }
    if let Some(tau) = args.tau {
        cfg.tau = Some(tau);
    }
    if args.out.is_some() {
        cfg.output = OutputConfig {
            dir: args.out.clone(),
            ..cfg.output.clone()
        };
    }
    Ok(())
}
