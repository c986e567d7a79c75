//! Command line front end.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::bench::{self, Calibration};
use crate::circuit::Circuit;
use crate::entropy;
use crate::error::{Error, Result};
use crate::formats::OutputFormat;
use crate::frame_sim;
use crate::tableau_sim::TableauSimulator;

#[derive(Debug, Parser)]
#[command(name = "stabsim", version, about = "Fast stabilizer circuit sampler")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    /// Sample N shots of the circuit's measurement results.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub sample: Option<u64>,

    /// Sample N shots of detection events.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub detect: Option<u64>,

    /// Execute instructions interactively, printing measurement results as
    /// they happen.
    #[arg(long)]
    pub repl: bool,

    /// Output format: 01, b8, hits or r8.
    #[arg(long = "out_format", value_name = "FORMAT", default_value = "01")]
    pub out_format: OutputFormat,

    /// Seed for reproducible output. Drawn from the OS when omitted.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Circuit file (stdin when omitted).
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Output file (stdout when omitted).
    #[arg(long = "out", value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the micro-benchmarks whose names contain FILTER.
    Bench {
        filter: Option<String>,
        /// Reference times (`name nanos` per line) to compare against.
        #[arg(long, value_name = "PATH")]
        reference: Option<PathBuf>,
        /// Write the measured times to PATH as a new reference file.
        #[arg(long, value_name = "PATH")]
        calibrate: Option<PathBuf>,
        /// Time budget per benchmark in milliseconds.
        #[arg(long, default_value_t = 500)]
        millis: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sample(usize),
    Detect(usize),
    Repl,
}

impl Cli {
    pub fn mode(&self) -> Result<Mode> {
        let chosen = [self.sample.is_some(), self.detect.is_some(), self.repl]
            .iter()
            .filter(|&&b| b)
            .count();
        if chosen != 1 {
            return Err(Error::Format {
                format: "command line",
                message: "choose exactly one of --sample=N, --detect=N, --repl".into(),
            });
        }
        Ok(if let Some(n) = self.sample {
            Mode::Sample(n as usize)
        } else if let Some(n) = self.detect {
            Mode::Detect(n as usize)
        } else {
            Mode::Repl
        })
    }
}

/// Runs the parsed command with the given input and output streams. The
/// `--in`/`--out` paths override them.
pub fn run(cli: &Cli, input: &mut dyn BufRead, output: &mut dyn Write) -> Result<()> {
    if let Some(Command::Bench {
        filter,
        reference,
        calibrate,
        millis,
    }) = &cli.command
    {
        return run_bench(filter.as_deref().unwrap_or(""), reference.as_deref(), calibrate.as_deref(), *millis, output);
    }
    let mode = cli.mode()?;
    let mut file_in;
    let input: &mut dyn BufRead = match &cli.input {
        Some(path) => {
            file_in = std::io::BufReader::new(std::fs::File::open(path)?);
            &mut file_in
        }
        None => input,
    };
    let mut file_out;
    let output: &mut dyn Write = match &cli.output {
        Some(path) => {
            file_out = std::io::BufWriter::new(std::fs::File::create(path)?);
            &mut file_out
        }
        None => output,
    };
    let seed = cli.seed.unwrap_or_else(entropy::entropy_seed);
    match mode {
        Mode::Repl => repl(input, output, seed),
        Mode::Sample(shots) | Mode::Detect(shots) => {
            let mut text = String::new();
            input.read_to_string(&mut text)?;
            let circuit: Circuit = text.parse()?;
            let table = if let Mode::Sample(_) = mode {
                frame_sim::sample(&circuit, shots, seed)?
            } else {
                frame_sim::detect(&circuit, shots, seed)?
            };
            table.write(cli.out_format, output)?;
            output.flush()?;
            Ok(())
        }
    }
}

fn run_bench(
    filter: &str,
    reference: Option<&std::path::Path>,
    calibrate: Option<&std::path::Path>,
    millis: u64,
    output: &mut dyn Write,
) -> Result<()> {
    let calibration = match reference {
        Some(path) => Calibration::load(path)?,
        None => Calibration::default(),
    };
    let budget = Duration::from_millis(millis);
    let mut results = Vec::new();
    for b in bench::registry().iter().filter(|b| b.name.contains(filter)) {
        let r = b.run(budget, &calibration);
        writeln!(output, "{}", r.render())?;
        output.flush()?;
        results.push(r);
    }
    if let Some(path) = calibrate {
        std::fs::write(path, Calibration::from_results(&results).to_text())?;
    }
    Ok(())
}

/// Interactive mode: each line (or each complete REPEAT block) is executed
/// as soon as it arrives and its measurement results are printed.
pub fn repl(input: &mut dyn BufRead, output: &mut dyn Write, seed: u64) -> Result<()> {
    let mut sim = TableauSimulator::new(0, seed);
    let mut pending = String::new();
    let mut depth = 0i64;
    let mut line = String::new();
    let mut line_no = 0;
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        let code = line.split('#').next().unwrap().trim();
        if code.ends_with('{') {
            depth += 1;
        } else if code == "}" {
            depth -= 1;
        }
        pending.push_str(&line);
        if !pending.ends_with('\n') {
            pending.push('\n');
        }
        if depth > 0 {
            continue;
        }
        let chunk = std::mem::take(&mut pending);
        depth = 0;
        let circuit = match Circuit::parse_continuing(&chunk, sim.record().len()) {
            Ok(c) => c,
            Err(Error::CircuitParse { message, .. }) => {
                writeln!(output, "error: line {line_no}: {message}")?;
                output.flush()?;
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut printed = String::new();
        for inst in circuit.iter_flat() {
            if inst.gate == crate::gates::Gate::Detector {
                let parity = sim.detector_parity(&inst.targets)?;
                printed.push_str(if parity { "D1\n" } else { "D0\n" });
                continue;
            }
            let results = sim.execute(inst, true)?;
            if !results.is_empty() {
                printed.extend(results.iter().map(|&b| if b { '1' } else { '0' }));
                printed.push('\n');
            }
        }
        output.write_all(printed.as_bytes())?;
        output.flush()?;
    }
    if depth > 0 {
        writeln!(output, "error: unterminated REPEAT block")?;
    }
    Ok(())
}
