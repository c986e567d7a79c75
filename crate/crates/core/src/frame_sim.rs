//! Batched Pauli frame simulator.
//!
//! A batch of frames is two bit tables indexed `[qubit][frame]`, one for x
//! bits and one for z bits, so every gate becomes a few word-wide xors or
//! swaps over whole rows. Measurements record the frame's x bit (an X or Y
//! flips a Z measurement). Shots are the reference sample xored with those
//! flips.

use rand::{Rng, RngCore};

use crate::bits::{self, BitTable};
use crate::circuit::{Circuit, Instruction};
use crate::entropy::{self, SimRng};
use crate::error::{Error, Result};
use crate::formats::{detector_rows, SampleTable};
use crate::gates::{FrameRule, Gate};
use crate::tableau_sim::TableauSimulator;

pub const DEFAULT_BATCH_SIZE: usize = 1024;

/// Whether independent batches run on a thread pool.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

pub struct FrameSimulator {
    num_qubits: usize,
    batch_size: usize,
    x: BitTable,
    z: BitTable,
    flips: BitTable,
    num_recorded: usize,
    rng: SimRng,
    mask: Vec<u64>,
}

impl FrameSimulator {
    /// A batch of `batch_size` frames (rounded up to a multiple of 64) with
    /// room for `num_measurements` recorded flips.
    pub fn new(num_qubits: usize, batch_size: usize, num_measurements: usize, rng: SimRng) -> Self {
        let batch_size = bits::words_for(batch_size.max(1)) * 64;
        let mut sim = FrameSimulator {
            num_qubits,
            batch_size,
            x: BitTable::zeros(num_qubits, batch_size),
            z: BitTable::zeros(num_qubits, batch_size),
            flips: BitTable::zeros(num_measurements, batch_size),
            num_recorded: 0,
            rng,
            mask: vec![0; batch_size / 64],
        };
        sim.init_batch();
        sim
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Resets every frame to a random product of I and Z terms.
    pub fn init_batch(&mut self) {
        self.x.clear();
        for q in 0..self.num_qubits {
            entropy::xor_random(self.z.row_mut(q), &mut self.rng);
        }
        self.num_recorded = 0;
    }

    pub fn x_table(&self) -> &BitTable {
        &self.x
    }

    pub fn z_table(&self) -> &BitTable {
        &self.z
    }

    /// Recorded measurement flips so far, one row per measurement.
    pub fn flips(&self) -> &BitTable {
        &self.flips
    }

    pub fn num_recorded(&self) -> usize {
        self.num_recorded
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Applies a unitary gate to one group of targets in every frame.
    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        for &q in targets {
            self.check(q)?;
        }
        match gate.data().frame_rule {
            FrameRule::Nothing => {}
            FrameRule::SwapXZ => {
                let q = targets[0];
                for (a, b) in self.x.row_mut(q).iter_mut().zip(self.z.row_mut(q)) {
                    std::mem::swap(a, b);
                }
            }
            FrameRule::ZXorX => {
                let q = targets[0];
                bits::xor_words(self.z.row_mut(q), self.x.row(q));
            }
            FrameRule::Cnot => {
                let (c, t) = (targets[0], targets[1]);
                let (zc, zt) = self.z.two_rows_mut(c, t);
                bits::xor_words(zc, zt);
                let (xc, xt) = self.x.two_rows_mut(c, t);
                bits::xor_words(xt, xc);
            }
            FrameRule::Cz => {
                let (a, b) = (targets[0], targets[1]);
                let (za, zb) = self.z.two_rows_mut(a, b);
                let (xa, xb) = (self.x.row(a), self.x.row(b));
                for k in 0..za.len() {
                    za[k] ^= xb[k];
                    zb[k] ^= xa[k];
                }
            }
            FrameRule::Cy => {
                let (c, t) = (targets[0], targets[1]);
                let (xc, xt) = self.x.two_rows_mut(c, t);
                let (zc, zt) = self.z.two_rows_mut(c, t);
                for k in 0..xc.len() {
                    zc[k] ^= xt[k] ^ zt[k];
                    xt[k] ^= xc[k];
                    zt[k] ^= xc[k];
                }
            }
            FrameRule::Swap => {
                let (a, b) = (targets[0], targets[1]);
                let (xa, xb) = self.x.two_rows_mut(a, b);
                xa.swap_with_slice(xb);
                let (za, zb) = self.z.two_rows_mut(a, b);
                za.swap_with_slice(zb);
            }
            _ => return Err(Error::NotUnitary(gate.name())),
        }
        Ok(())
    }

    /// Records the flip bit of a Z measurement of `q`, then randomizes the
    /// frame's Z component on `q` (the collapse makes it unobservable).
    pub fn measure(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        if self.num_recorded == self.flips.num_major() {
            self.grow_flips();
        }
        self.flips.row_mut(self.num_recorded).copy_from_slice(self.x.row(q));
        self.num_recorded += 1;
        entropy::xor_random(self.z.row_mut(q), &mut self.rng);
        Ok(())
    }

    fn grow_flips(&mut self) {
        let mut bigger = BitTable::zeros((self.flips.num_major() * 2).max(16), self.batch_size);
        for m in 0..self.num_recorded {
            bigger.row_mut(m).copy_from_slice(self.flips.row(m));
        }
        self.flips = bigger;
    }

    pub fn reset(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        self.x.row_mut(q).fill(0);
        let z = self.z.row_mut(q);
        z.fill(0);
        entropy::xor_random(z, &mut self.rng);
        Ok(())
    }

    /// Samples a noise channel independently in every frame for every group
    /// of targets.
    pub fn apply_noise(&mut self, gate: Gate, p: f64, targets: &[usize]) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadProbability(p));
        }
        for &q in targets {
            self.check(q)?;
        }
        let data = gate.data();
        let paulis = data.noise_paulis;
        if p == 0.0 || paulis.is_empty() {
            return Ok(());
        }
        let arity = data.arity;
        let groups = targets.len() / arity;
        if p < entropy::GEOMETRIC_THRESHOLD {
            // Gap sampling over the whole (group, frame) index space.
            let b = self.batch_size;
            let mut hits = Vec::new();
            entropy::for_each_hit(groups * b, p, &mut self.rng, |k| hits.push(k));
            for k in hits {
                let (g, f) = (k / b, k % b);
                let choice = self.pick(paulis.len());
                self.xor_pauli(paulis[choice], &targets[g * arity..(g + 1) * arity], f);
            }
            return Ok(());
        }
        let mut mask = std::mem::take(&mut self.mask);
        for group in targets.chunks(arity) {
            entropy::fill_bernoulli_words(&mut mask, self.batch_size, p, &mut self.rng);
            if paulis.len() == 1 {
                for (c, &q) in paulis[0].chars().zip(group) {
                    if matches!(c, 'X' | 'Y') {
                        bits::xor_words(self.x.row_mut(q), &mask);
                    }
                    if matches!(c, 'Z' | 'Y') {
                        bits::xor_words(self.z.row_mut(q), &mask);
                    }
                }
            } else {
                for f in bits::iter_ones(&mask) {
                    let choice = self.pick(paulis.len());
                    self.xor_pauli(paulis[choice], group, f);
                }
            }
        }
        self.mask = mask;
        Ok(())
    }

    fn pick(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    fn xor_pauli(&mut self, pauli: &str, group: &[usize], frame: usize) {
        for (c, &q) in pauli.chars().zip(group) {
            if matches!(c, 'X' | 'Y') {
                self.x.toggle(q, frame);
            }
            if matches!(c, 'Z' | 'Y') {
                self.z.toggle(q, frame);
            }
        }
    }

    pub fn execute(&mut self, inst: &Instruction) -> Result<()> {
        let rule = inst.gate.data().frame_rule;
        match rule {
            FrameRule::Annotation => Ok(()),
            FrameRule::Noise => {
                let qs: Vec<usize> = inst.qubits().collect();
                self.apply_noise(inst.gate, inst.probability(), &qs)
            }
            FrameRule::Measure => inst.qubits().try_for_each(|q| self.measure(q)),
            FrameRule::Reset => inst.qubits().try_for_each(|q| self.reset(q)),
            FrameRule::MeasureReset => inst.qubits().try_for_each(|q| {
                self.measure(q)?;
                self.reset(q)
            }),
            _ => {
                let mut buf = [0usize; 2];
                for app in inst.applications() {
                    for (slot, t) in buf.iter_mut().zip(app) {
                        *slot = t.qubit();
                    }
                    self.apply_gate(inst.gate, &buf[..app.len()])?;
                }
                Ok(())
            }
        }
    }

    /// Propagates a fresh batch through `circuit`; afterwards
    /// [`FrameSimulator::flips`] holds one row per measurement.
    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() > self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: circuit.num_qubits() - 1,
                num_qubits: self.num_qubits,
            });
        }
        self.init_batch();
        for inst in circuit.iter_flat() {
            self.execute(inst)?;
        }
        Ok(())
    }

    /// Flip rows for the recorded measurements only.
    fn recorded_flips(&self) -> BitTable {
        if self.num_recorded == self.flips.num_major() {
            return self.flips.clone();
        }
        let mut out = BitTable::zeros(self.num_recorded, self.batch_size);
        for m in 0..self.num_recorded {
            out.row_mut(m).copy_from_slice(self.flips.row(m));
        }
        out
    }
}

/// How to split a sampling job into batches.
#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub batch_size: usize,
    pub execution: Execution,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            batch_size: DEFAULT_BATCH_SIZE,
            execution: Execution::Parallel,
        }
    }
}

/// Computes a noiseless reference sample with the tableau simulator.
pub fn reference_sample(circuit: &Circuit, seed: u64) -> Result<Vec<bool>> {
    let mut rng = entropy::rng_for_stream(seed, u64::MAX);
    TableauSimulator::reference_sample(circuit, &mut rng)
}

fn run_batches<F>(shots: usize, options: SampleOptions, num_results: usize, job: F) -> Result<SampleTable>
where
    F: Fn(usize, usize) -> Result<BitTable> + Sync,
{
    let b = bits::words_for(options.batch_size.max(1)) * 64;
    let num_batches = shots.div_ceil(b);
    let sizes: Vec<(usize, usize)> = (0..num_batches).map(|k| (k, b.min(shots - k * b))).collect();
    let tables: Vec<Result<BitTable>> = match options.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            sizes.par_iter().map(|&(k, n)| job(k, n)).collect()
        }
        _ => sizes.iter().map(|&(k, n)| job(k, n)).collect(),
    };
    let mut out = BitTable::zeros(shots, num_results);
    let mut row = 0;
    for t in tables {
        let t = t?;
        for s in 0..t.num_major() {
            out.row_mut(row).copy_from_slice(t.row(s));
            row += 1;
        }
    }
    Ok(SampleTable::from_table(out))
}

/// Measurement-major flips of one batch, truncated to `shots` columns after
/// transposing to shot-major.
fn shot_major(rows: &BitTable, shots: usize) -> BitTable {
    let t = rows.transposed();
    if t.num_major() == shots {
        return t;
    }
    let mut out = BitTable::zeros(shots, rows.num_major());
    for s in 0..shots {
        out.row_mut(s).copy_from_slice(t.row(s));
    }
    out
}

/// Samples `shots` measurement records given a noiseless reference.
pub fn sample_with_reference(
    circuit: &Circuit,
    reference: &[bool],
    shots: usize,
    seed: u64,
    options: SampleOptions,
) -> Result<SampleTable> {
    let m = circuit.num_measurements();
    if reference.len() != m {
        return Err(Error::ReferenceLength {
            got: reference.len(),
            expected: m,
        });
    }
    let mut ref_words = vec![0u64; bits::words_for(m)];
    for (k, &b) in reference.iter().enumerate() {
        bits::set_bit(&mut ref_words, k, b);
    }
    run_batches(shots, options, m, |k, n| {
        let mut sim = FrameSimulator::new(circuit.num_qubits(), n, m, entropy::rng_for_stream(seed, k as u64));
        sim.run(circuit)?;
        let mut t = shot_major(&sim.recorded_flips(), n);
        for s in 0..n {
            bits::xor_words(t.row_mut(s), &ref_words);
        }
        Ok(t)
    })
}

pub fn sample_with_options(circuit: &Circuit, shots: usize, seed: u64, options: SampleOptions) -> Result<SampleTable> {
    let reference = reference_sample(circuit, seed)?;
    sample_with_reference(circuit, &reference, shots, seed, options)
}

/// Samples `shots` measurement records from a noisy circuit.
pub fn sample(circuit: &Circuit, shots: usize, seed: u64) -> Result<SampleTable> {
    sample_with_options(circuit, shots, seed, SampleOptions::default())
}

/// Samples detection events: for each detector, the parity of its
/// measurements' flips relative to the noiseless circuit.
pub fn detect_with_options(circuit: &Circuit, shots: usize, seed: u64, options: SampleOptions) -> Result<SampleTable> {
    let detectors = circuit.detector_sets();
    run_batches(shots, options, detectors.len(), |k, n| {
        let mut sim = FrameSimulator::new(
            circuit.num_qubits(),
            n,
            circuit.num_measurements(),
            entropy::rng_for_stream(seed, k as u64),
        );
        sim.run(circuit)?;
        let events = detector_rows(&sim.recorded_flips(), &detectors)?;
        Ok(shot_major(&events, n))
    })
}

pub fn detect(circuit: &Circuit, shots: usize, seed: u64) -> Result<SampleTable> {
    detect_with_options(circuit, shots, seed, SampleOptions::default())
}

/// Runs one batch from a caller-supplied rng and returns its raw flip rows.
pub fn sample_flips_batch<R: RngCore + ?Sized>(circuit: &Circuit, batch_size: usize, rng: &mut R) -> Result<BitTable> {
    let mut sim = FrameSimulator::new(
        circuit.num_qubits(),
        batch_size,
        circuit.num_measurements(),
        entropy::rng_from_seed(rng.next_u64()),
    );
    sim.run(circuit)?;
    Ok(sim.recorded_flips())
}
