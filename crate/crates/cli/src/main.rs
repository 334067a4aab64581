use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use gausscap::{ba_capacity, pure_loss_transition, BaOptions, ChannelKind, ChannelParams};
use gausscap_cli::{
    capacity_report, critical_table, efficiency, format_number, region, sweep, Axis, AxisName,
    CliError, CliResult, Quantity, Scale, SweepSpec, Table,
};

#[derive(Parser, Debug)]
#[command(
    name = "gausscap",
    version,
    about = "Classical capacities of Gaussian channels"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity of one protocol at a single point
    Capacity {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "gaussian-opt")]
        protocol: String,
    },
    /// Capacities along one parameter axis
    Sweep {
        #[command(flatten)]
        common: Common,
        /// eta, g, strength, nbar or nth
        #[arg(long, default_value = "strength")]
        axis: String,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long)]
        log: bool,
        /// Comma-separated protocol names; all of them when omitted
        #[arg(long, value_delimiter = ',')]
        protocols: Vec<String>,
    },
    /// Coherent minus squeezed capacity over a strength x nbar grid
    Region {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strength_from: Option<f64>,
        #[arg(long)]
        strength_to: Option<f64>,
        #[arg(long, default_value_t = 101)]
        strength_steps: usize,
        #[arg(long, default_value_t = 0.0)]
        nbar_from: f64,
        #[arg(long, default_value_t = 20.0)]
        nbar_to: f64,
        #[arg(long, default_value_t = 101)]
        nbar_steps: usize,
    },
    /// Bits per photon along a log-spaced nbar axis
    Efficiency {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.01)]
        nbar_from: f64,
        #[arg(long, default_value_t = 100.0)]
        nbar_to: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        #[arg(long)]
        linear: bool,
        #[arg(long, value_delimiter = ',')]
        protocols: Vec<String>,
    },
    /// Critical photon number for each --nth given
    CriticalN {
        #[arg(long, default_value = "0", value_delimiter = ',')]
        nth: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        reproducible: bool,
    },
    /// Number-state capacity through a pure-loss channel
    NumberState {
        #[command(flatten)]
        common: Common,
        /// Photon-number cutoff; grows automatically when omitted
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, default_value_t = BaOptions::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = BaOptions::default().max_iter)]
        max_iter: usize,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// loss or amp
    #[arg(long, default_value = "loss")]
    channel: String,
    /// Transmissivity (loss) or gain (amp)
    #[arg(long, default_value_t = 1.0)]
    strength: f64,
    #[arg(long, default_value_t = 0.0)]
    nth: f64,
    #[arg(long, default_value_t = 3.0)]
    nbar: f64,
    /// Write to FILE instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the timestamp out of the metadata
    #[arg(long)]
    reproducible: bool,
}

impl Common {
    fn kind(&self) -> CliResult<ChannelKind> {
        self.channel
            .parse()
            .map_err(|e: gausscap::Error| CliError::Usage(e.to_string()))
    }

    fn channel(&self) -> CliResult<ChannelParams> {
        Ok(ChannelParams::new(self.kind()?, self.strength, self.nth)?)
    }
}

fn protocols(names: &[String]) -> CliResult<Vec<Quantity>> {
    if names.is_empty() {
        return Ok(Quantity::ALL.to_vec());
    }
    names.iter().map(|n| n.trim().parse()).collect()
}

/// The invocation with `--out` and its value removed.
fn command_line() -> String {
    let mut words = vec!["gausscap".to_string()];
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--out" {
            args.next();
        } else if !a.starts_with("--out=") {
            words.push(a);
        }
    }
    words.join(" ")
}

fn preamble(reproducible: bool) -> Vec<String> {
    let mut lines = vec![
        format!("gausscap {}", env!("CARGO_PKG_VERSION")),
        format!("command: {}", command_line()),
    ];
    if !reproducible {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        lines.push(format!("generated: {secs} (unix time)"));
    }
    lines
}

fn open(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(table: &Table, out: &Option<PathBuf>, reproducible: bool) -> CliResult<()> {
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    let mut sink = open(out)?;
    table.write_csv(&mut sink, &preamble(reproducible))?;
    sink.flush()?;
    Ok(())
}

fn emit_report(lines: &[(String, String)], out: &Option<PathBuf>) -> CliResult<()> {
    let mut sink = open(out)?;
    for (k, v) in lines {
        writeln!(sink, "{k}: {v}")?;
    }
    sink.flush()?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let ba = BaOptions::default();
    match cli.cmd {
        Command::Capacity { common, protocol } => {
            let q: Quantity = protocol.parse()?;
            let ch = common.channel()?;
            if let Some(why) = q.unsupported(&ch) {
                return Err(CliError::Usage(why));
            }
            emit_report(&capacity_report(q, &ch, common.nbar, &ba)?, &common.out)
        }
        Command::Sweep {
            common,
            axis,
            from,
            to,
            steps,
            log,
            protocols: names,
        } => {
            let kind = common.kind()?;
            let axis_name: AxisName = axis.parse()?;
            let (lo, hi) = match (axis_name, kind) {
                (AxisName::Strength, ChannelKind::Loss) => (0.0, 1.0),
                (AxisName::Strength, ChannelKind::Amplification) => (1.0, 10.0),
                (AxisName::Nbar, _) => (0.0, 20.0),
                (AxisName::Nth, _) => (0.0, 2.0),
            };
            let scale = if log { Scale::Log } else { Scale::Linear };
            let spec = SweepSpec {
                kind,
                strength: common.strength,
                n_th: common.nth,
                nbar: common.nbar,
                axis_name,
                axis: Axis::new(from.unwrap_or(lo), to.unwrap_or(hi), steps, scale)?,
                protocols: protocols(&names)?,
            };
            emit(&sweep(&spec, &ba)?, &common.out, common.reproducible)
        }
        Command::Region {
            common,
            strength_from,
            strength_to,
            strength_steps,
            nbar_from,
            nbar_to,
            nbar_steps,
        } => {
            let kind = common.kind()?;
            let (lo, hi) = match kind {
                ChannelKind::Loss => (0.0, 1.0),
                ChannelKind::Amplification => (1.0, 10.0),
            };
            let strength = Axis::new(
                strength_from.unwrap_or(lo),
                strength_to.unwrap_or(hi),
                strength_steps,
                Scale::Linear,
            )?;
            let nbar = Axis::new(nbar_from, nbar_to, nbar_steps, Scale::Linear)?;
            emit(
                &region(kind, common.nth, &strength, &nbar)?,
                &common.out,
                common.reproducible,
            )
        }
        Command::Efficiency {
            common,
            nbar_from,
            nbar_to,
            steps,
            linear,
            protocols: names,
        } => {
            if nbar_from.is_nan() || nbar_from <= 0.0 {
                return Err(CliError::Usage(format!(
                    "efficiency divides by nbar, so --nbar-from must be > 0, got {nbar_from}"
                )));
            }
            let scale = if linear { Scale::Linear } else { Scale::Log };
            let axis = Axis::new(nbar_from, nbar_to, steps, scale)?;
            let table = efficiency(&common.channel()?, &axis, &protocols(&names)?, &ba)?;
            emit(&table, &common.out, common.reproducible)
        }
        Command::CriticalN {
            nth,
            out,
            reproducible,
        } => emit(&critical_table(&nth)?, &out, reproducible),
        Command::NumberState {
            common,
            cutoff,
            tol,
            max_iter,
        } => {
            let ch = common.channel()?;
            if let Some(why) = Quantity::NumberState.unsupported(&ch) {
                return Err(CliError::Usage(why));
            }
            let opts = BaOptions {
                tol,
                max_iter,
                ..BaOptions::default()
            };
            let lines = match cutoff {
                Some(cut) if common.nbar > 0.0 && ch.strength() > 0.0 => {
                    let res = ba_capacity(
                        &pure_loss_transition(ch.strength(), cut)?,
                        common.nbar,
                        &opts,
                    )?;
                    let mut lines = vec![
                        ("protocol".to_string(), "number-state".to_string()),
                        ("channel".to_string(), ch.to_string()),
                        ("nbar".to_string(), format_number(common.nbar)),
                        ("bits".to_string(), format_number(res.bits())),
                    ];
                    for (k, v) in &res.result.params {
                        lines.push((k.to_string(), format_number(*v)));
                    }
                    lines
                }
                _ => capacity_report(Quantity::NumberState, &ch, common.nbar, &opts)?,
            };
            emit_report(&lines, &common.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
