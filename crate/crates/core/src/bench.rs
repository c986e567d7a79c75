//! Benchmark harness and circuit generators.
//!
//! Each benchmark body is looped for a fixed wall-clock budget and the time
//! per iteration is compared against a machine-local reference, reported in
//! decibels (`10·log10(measured / reference)`) next to an ASCII bar.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::hint::black_box;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{BitBuffer, BitTable};
use crate::circuit::Circuit;
use crate::entropy;
use crate::error::{Error, Result};
use crate::frame_sim::FrameSimulator;
use crate::gates::Gate;
use crate::pauli::PauliString;
use crate::tableau_sim::TableauSimulator;

pub const DEFAULT_BUDGET: Duration = Duration::from_millis(500);

/// Runs `body` repeatedly for roughly `budget` and returns seconds per call.
pub fn time_per_iteration(budget: Duration, mut body: impl FnMut()) -> f64 {
    let mut iterations: u64 = 1;
    let mut total_iters = 0u64;
    let start = Instant::now();
    loop {
        for _ in 0..iterations {
            body();
        }
        total_iters += iterations;
        let elapsed = start.elapsed();
        if elapsed >= budget {
            return elapsed.as_secs_f64() / total_iters as f64;
        }
        // Aim the next chunk at the remaining time, growing at most 10x.
        let per = elapsed.as_secs_f64() / total_iters as f64;
        let remaining = (budget - elapsed).as_secs_f64();
        let wanted = if per > 0.0 { (remaining / per) as u64 } else { iterations * 10 };
        iterations = wanted.clamp(1, iterations * 10);
    }
}

pub fn deviation_db(measured: f64, reference: f64) -> f64 {
    10.0 * (measured / reference).log10()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub name: String,
    pub nanos_per_op: f64,
    pub reference_nanos: Option<f64>,
    /// Items processed per iteration and their unit, for rate display.
    pub rate: Option<(f64, &'static str)>,
}

impl BenchResult {
    pub fn deviation_db(&self) -> Option<f64> {
        self.reference_nanos.map(|r| deviation_db(self.nanos_per_op, r))
    }

    /// One line: ASCII bar, deviation, time and optional rate.
    pub fn render(&self) -> String {
        const HALF: i64 = 10;
        let mut line = String::new();
        match self.deviation_db() {
            Some(db) => {
                let pos = (db.round() as i64).clamp(-HALF, HALF);
                line.push('[');
                for k in -HALF..=HALF {
                    line.push(if k == pos {
                        '*'
                    } else if k == 0 {
                        '|'
                    } else {
                        '.'
                    });
                }
                let _ = write!(line, "] {db:+5.1} dB ");
            }
            None => line.push_str("[          ?          ]  (no ref) "),
        }
        let _ = write!(line, "{:>12} ", format_nanos(self.nanos_per_op));
        if let Some((items, unit)) = self.rate {
            let per_sec = items / (self.nanos_per_op * 1e-9);
            let _ = write!(line, "{:>10} {unit}/s ", format_si(per_sec));
        }
        line.push_str(&self.name);
        line
    }
}

fn format_nanos(ns: f64) -> String {
    if ns < 1e3 {
        format!("{ns:.1} ns")
    } else if ns < 1e6 {
        format!("{:.1} us", ns / 1e3)
    } else if ns < 1e9 {
        format!("{:.1} ms", ns / 1e6)
    } else {
        format!("{:.2} s", ns / 1e9)
    }
}

fn format_si(x: f64) -> String {
    for (scale, suffix) in [(1e12, "T"), (1e9, "G"), (1e6, "M"), (1e3, "K")] {
        if x >= scale {
            return format!("{:.2}{suffix}", x / scale);
        }
    }
    format!("{x:.2}")
}

/// Reference times in nanoseconds, keyed by benchmark name. Stored as
/// `name nanos` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Calibration {
    pub nanos: BTreeMap<String, f64>,
}

impl Calibration {
    pub fn parse(text: &str) -> Result<Self> {
        let mut nanos = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Format {
                    format: "calibration",
                    message: format!("line {}: expected 'name nanos'", k + 1),
                });
            };
            let value: f64 = value.parse().map_err(|_| Error::Format {
                format: "calibration",
                message: format!("line {}: bad number '{value}'", k + 1),
            })?;
            nanos.insert(name.to_string(), value);
        }
        Ok(Calibration { nanos })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Calibration::parse(&std::fs::read_to_string(path)?)
    }

    pub fn from_results(results: &[BenchResult]) -> Self {
        Calibration {
            nanos: results.iter().map(|r| (r.name.clone(), r.nanos_per_op)).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        self.nanos.iter().map(|(k, v)| format!("{k} {v:.3}\n")).collect()
    }
}

type Body = Box<dyn FnMut()>;

pub struct Benchmark {
    pub name: &'static str,
    pub rate: Option<(f64, &'static str)>,
    setup: fn() -> Body,
}

impl Benchmark {
    pub fn run(&self, budget: Duration, calibration: &Calibration) -> BenchResult {
        let mut body = (self.setup)();
        let secs = time_per_iteration(budget, &mut body);
        BenchResult {
            name: self.name.to_string(),
            nanos_per_op: secs * 1e9,
            reference_nanos: calibration.nanos.get(self.name).copied(),
            rate: self.rate,
        }
    }
}

/// Times consecutive deterministic Z measurements on an `n` qubit state
/// whose inverse tableau has been densified by random CNOTs. Returns seconds
/// per measurement.
pub fn deterministic_measure_time(n: usize, budget: Duration, seed: u64) -> f64 {
    let mut sim = densified_zero_state(n, seed);
    let mut q = 0;
    time_per_iteration(budget, || {
        let m = sim.measure(q).unwrap();
        debug_assert!(!m);
        q = (q + 1) % n;
        if q == 0 {
            sim.take_record();
        }
    })
}

/// A |0…0⟩ state reached through `4n` random CNOTs, so every Z measurement
/// is deterministic but the inverse tableau is dense.
pub fn densified_zero_state(n: usize, seed: u64) -> TableauSimulator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sim = TableauSimulator::new(n, seed);
    for _ in 0..4 * n {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        sim.apply_gate(Gate::Cnot, &[a, b]).unwrap();
    }
    sim
}

pub fn registry() -> Vec<Benchmark> {
    vec![
        Benchmark {
            name: "empty_loop",
            rate: None,
            setup: || Box::new(|| {}),
        },
        Benchmark {
            name: "pauli_mul_10K",
            rate: Some((10_000.0, "Paulis")),
            setup: || {
                let mut rng = entropy::rng_from_seed(1);
                let mut a = PauliString::random(10_000, &mut rng);
                let b = PauliString::random(10_000, &mut rng);
                Box::new(move || {
                    black_box(a.mul_inplace_with_phase(&b).unwrap());
                })
            },
        },
        Benchmark {
            name: "transpose_1024x1024",
            rate: Some(((1 << 20) as f64, "bits")),
            setup: || {
                let t = BitTable::random(1024, 1024, &mut entropy::rng_from_seed(2));
                Box::new(move || {
                    black_box(t.transposed());
                })
            },
        },
        Benchmark {
            name: "bernoulli_geometric_p0.001_1M",
            rate: Some((1e6, "trials")),
            setup: || {
                let mut rng = entropy::rng_from_seed(3);
                let mut buf = BitBuffer::zeros(1 << 20);
                Box::new(move || entropy::fill_bernoulli(&mut buf, 0.001, &mut rng))
            },
        },
        Benchmark {
            name: "bernoulli_hybrid_p0.3_1M",
            rate: Some((1e6, "trials")),
            setup: || {
                let mut rng = entropy::rng_from_seed(4);
                let mut buf = BitBuffer::zeros(1 << 20);
                Box::new(move || entropy::fill_bernoulli_hybrid(&mut buf, 0.3, &mut rng))
            },
        },
        Benchmark {
            name: "tableau_measure_deterministic_n1024",
            rate: None,
            setup: || measure_body(1024),
        },
        Benchmark {
            name: "tableau_measure_deterministic_n4096",
            rate: None,
            setup: || measure_body(4096),
        },
        Benchmark {
            name: "tableau_sim_rep_code_d5_r20",
            rate: Some((1.0, "shots")),
            setup: || {
                let c = rep_code(5, 20, 0.01);
                let mut seed = 0;
                Box::new(move || {
                    seed += 1;
                    black_box(TableauSimulator::sample_once(&c, seed).unwrap());
                })
            },
        },
        Benchmark {
            name: "frame_sim_rep_code_d5_r20_B1024",
            rate: Some((1024.0, "shots")),
            setup: || {
                let c = rep_code(5, 20, 0.01);
                let mut sim = FrameSimulator::new(c.num_qubits(), 1024, c.num_measurements(), entropy::rng_from_seed(5));
                Box::new(move || sim.run(&c).unwrap())
            },
        },
        Benchmark {
            name: "frame_sim_surface_d5_r5_B1024",
            rate: Some((1024.0, "shots")),
            setup: || {
                let c = surface_like(5, 5, 0.001);
                let mut sim = FrameSimulator::new(c.num_qubits(), 1024, c.num_measurements(), entropy::rng_from_seed(6));
                Box::new(move || sim.run(&c).unwrap())
            },
        },
        Benchmark {
            name: "frame_sim_random_n100_B1024",
            rate: Some((1024.0, "shots")),
            setup: || {
                let c = random_circuit(100, 100, 7);
                let mut sim = FrameSimulator::new(c.num_qubits(), 1024, c.num_measurements(), entropy::rng_from_seed(7));
                Box::new(move || sim.run(&c).unwrap())
            },
        },
    ]
}

fn measure_body(n: usize) -> Body {
    let mut sim = densified_zero_state(n, 8);
    let mut q = 0;
    Box::new(move || {
        black_box(sim.measure(q).unwrap());
        q = (q + 1) % n;
        if q == 0 {
            sim.take_record();
        }
    })
}

/// Runs every registered benchmark whose name contains `filter`.
pub fn run_benchmarks(filter: &str, budget: Duration, calibration: &Calibration) -> Vec<BenchResult> {
    registry()
        .iter()
        .filter(|b| b.name.contains(filter))
        .map(|b| b.run(budget, calibration))
        .collect()
}

/// The repetition code memory experiment on `2d + 1` qubits: data on even
/// indices, `d` ancillas on odd indices, and `rounds` rounds of bit-flip
/// noise followed by parity extraction.
pub fn rep_code(d: usize, rounds: usize, p: f64) -> Circuit {
    rep_code_text(d, rounds, p, false).parse().expect("generated circuit parses")
}

/// [`rep_code`] with detectors comparing each ancilla to its previous round
/// (the first round compares against the known zero initial value).
pub fn rep_code_with_detectors(d: usize, rounds: usize, p: f64) -> Circuit {
    rep_code_text(d, rounds, p, true).parse().expect("generated circuit parses")
}

/// Text of one repetition code round over `2d + 1` qubits.
pub fn rep_code_round(d: usize, p: f64) -> String {
    let n = 2 * d + 1;
    let all: Vec<String> = (0..n).map(|q| q.to_string()).collect();
    let forward: Vec<String> = (0..n - 1).map(|q| q.to_string()).collect();
    let backward: Vec<String> = (1..n).rev().map(|q| q.to_string()).collect();
    let ancillas: Vec<String> = (0..d).map(|j| (2 * j + 1).to_string()).collect();
    format!(
        "X_ERROR({p}) {}\nCNOT {}\nCNOT {}\nMR {}\n",
        all.join(" "),
        forward.join(" "),
        backward.join(" "),
        ancillas.join(" ")
    )
}

fn rep_code_text(d: usize, rounds: usize, p: f64, detectors: bool) -> String {
    let round = rep_code_round(d, p);
    if !detectors {
        return format!("REPEAT {rounds} {{\n{round}}}\n");
    }
    let first: String = (0..d).map(|j| format!("DETECTOR rec[-{}]\n", d - j)).collect();
    let later: String = (0..d)
        .map(|j| format!("DETECTOR rec[-{}] rec[-{}]\n", d - j, 2 * d - j))
        .collect();
    let mut text = format!("{round}{first}");
    if rounds > 1 {
        text += &format!("REPEAT {} {{\n{round}{later}}}\n", rounds - 1);
    }
    text
}

/// Layers of random single qubit gates (H, S or I on every qubit), CNOTs
/// over a random pairing, and random-basis measurement of 5% of the qubits;
/// every qubit is measured in a random basis at the end.
pub fn random_circuit(n: usize, layers: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    let mut order: Vec<usize> = (0..n).collect();
    let measure_count = ((n as f64) * 0.05).round().max(1.0) as usize;
    for _ in 0..layers {
        for q in 0..n {
            match rng.random_range(0..3) {
                0 => writeln!(text, "H {q}").unwrap(),
                1 => writeln!(text, "S {q}").unwrap(),
                _ => {}
            }
        }
        order.shuffle(&mut rng);
        if n >= 2 {
            let pairs: Vec<String> = order[..n / 2 * 2].iter().map(|q| q.to_string()).collect();
            writeln!(text, "CNOT {}", pairs.join(" ")).unwrap();
        }
        order.shuffle(&mut rng);
        for &q in &order[..measure_count.min(n)] {
            measure_random_basis(&mut text, q, &mut rng);
        }
    }
    for q in 0..n {
        measure_random_basis(&mut text, q, &mut rng);
    }
    text.parse().expect("generated circuit parses")
}

fn measure_random_basis(text: &mut String, q: usize, rng: &mut ChaCha8Rng) {
    match rng.random_range(0..3) {
        0 => writeln!(text, "H {q}\nM {q}\nH {q}").unwrap(),
        1 => writeln!(text, "S_DAG {q}\nH {q}\nM {q}\nH {q}\nS {q}").unwrap(),
        _ => writeln!(text, "M {q}").unwrap(),
    }
}

/// An unrotated surface-code-style memory circuit on a `(2d-1) x (2d-1)`
/// grid. Data qubits sit where row + column is even; the others are
/// measurement qubits, Z type on odd rows and X type on even rows. Each round
/// measures all Z stabilizers, then all X stabilizers.
pub fn surface_like(d: usize, rounds: usize, p: f64) -> Circuit {
    let w = 2 * d - 1;
    let id = |r: usize, c: usize| r * w + c;
    let mut data = Vec::new();
    let mut z_checks: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut x_checks: Vec<(usize, Vec<usize>)> = Vec::new();
    for r in 0..w {
        for c in 0..w {
            if (r + c) % 2 == 0 {
                data.push(id(r, c));
                continue;
            }
            let mut neighbors = Vec::new();
            if r > 0 {
                neighbors.push(id(r - 1, c));
            }
            if c > 0 {
                neighbors.push(id(r, c - 1));
            }
            if c + 1 < w {
                neighbors.push(id(r, c + 1));
            }
            if r + 1 < w {
                neighbors.push(id(r + 1, c));
            }
            if r % 2 == 1 {
                z_checks.push((id(r, c), neighbors));
            } else {
                x_checks.push((id(r, c), neighbors));
            }
        }
    }
    let join = |qs: &mut dyn Iterator<Item = usize>| qs.map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
    let max_deg = 4;
    let mut round = String::new();
    writeln!(round, "DEPOLARIZE1({p}) {}", join(&mut data.iter().copied())).unwrap();
    for k in 0..max_deg {
        let pairs: Vec<String> = z_checks
            .iter()
            .filter_map(|(a, ns)| ns.get(k).map(|&dq| format!("{dq} {a}")))
            .collect();
        writeln!(round, "CNOT {}", pairs.join(" ")).unwrap();
    }
    let zs = join(&mut z_checks.iter().map(|(a, _)| *a));
    writeln!(round, "X_ERROR({p}) {zs}\nMR {zs}").unwrap();
    let xs = join(&mut x_checks.iter().map(|(a, _)| *a));
    writeln!(round, "H {xs}").unwrap();
    for k in 0..max_deg {
        let pairs: Vec<String> = x_checks
            .iter()
            .filter_map(|(a, ns)| ns.get(k).map(|&dq| format!("{a} {dq}")))
            .collect();
        writeln!(round, "CNOT {}", pairs.join(" ")).unwrap();
    }
    writeln!(round, "H {xs}\nX_ERROR({p}) {xs}\nMR {xs}").unwrap();
    let all_data = join(&mut data.iter().copied());
    format!("REPEAT {rounds} {{\n{round}}}\nM {all_data}\n")
        .parse()
        .expect("generated circuit parses")
}
