//! Inverse-tableau stabilizer simulator.
//!
//! The simulator stores the inverse of the Clifford applied so far. Gates are
//! folded in by prepending their inverse, and a Z measurement of qubit q looks
//! at the Z_q column: if it has no X or Y terms the result is its sign,
//! otherwise the column is reduced to a single Z by appending gates at the
//! start of time and a coin flip picks the sign.

use rand::{Rng, RngCore};

use crate::circuit::{Circuit, Instruction, Target};
use crate::entropy::{self, SimRng};
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::pauli::Pauli;
use crate::tableau::{Layout, Tableau};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureOutcome {
    pub value: bool,
    pub deterministic: bool,
}

#[derive(Clone, Debug)]
pub struct TableauSimulator {
    inv: Tableau,
    rng: SimRng,
    record: Vec<bool>,
}

impl TableauSimulator {
    pub fn new(num_qubits: usize, seed: u64) -> Self {
        Self::with_rng(num_qubits, entropy::rng_from_seed(seed))
    }

    pub fn with_rng(num_qubits: usize, rng: SimRng) -> Self {
        TableauSimulator {
            inv: Tableau::identity(num_qubits),
            rng,
            record: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.inv.num_qubits()
    }

    /// Grows the register so qubit indices below `n` are valid.
    pub fn ensure_qubits(&mut self, n: usize) {
        if n > self.inv.num_qubits() {
            // Grow with some slack so a REPL session touching qubits one at a
            // time doesn't rebuild the tableau every step.
            let target = if self.inv.num_qubits() == 0 {
                n
            } else {
                n.max(self.inv.num_qubits() * 2).min(n + 64)
            };
            self.inv.expand(target);
        }
    }

    /// The tracked inverse tableau.
    pub fn inverse_tableau(&self) -> &Tableau {
        &self.inv
    }

    /// The Clifford applied so far.
    pub fn current_tableau(&self) -> Result<Tableau> {
        self.inv.inverse()
    }

    pub fn record(&self) -> &[bool] {
        &self.record
    }

    pub fn take_record(&mut self) -> Vec<bool> {
        std::mem::take(&mut self.record)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits(),
            });
        }
        Ok(())
    }

    /// Applies a unitary gate to one group of targets.
    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        if !gate.is_unitary() {
            return Err(Error::NotUnitary(gate.name()));
        }
        for &q in targets {
            self.check_qubit(q)?;
        }
        match gate {
            Gate::I => Ok(()),
            Gate::X => self.prepend_pauli(targets[0], Pauli::X),
            Gate::Y => self.prepend_pauli(targets[0], Pauli::Y),
            Gate::Z => self.prepend_pauli(targets[0], Pauli::Z),
            _ => {
                self.inv.set_layout(Layout::ColumnMajor);
                let inverse = gate.inverse_tableau().expect("unitary gate has a tableau");
                self.inv.inplace_scatter_prepend(inverse, targets)
            }
        }
    }

    fn prepend_pauli(&mut self, q: usize, p: Pauli) -> Result<()> {
        self.check_qubit(q)?;
        self.inv.prepend_pauli(q, p);
        Ok(())
    }

    /// The Z_q result if it is already determined.
    pub fn peek_z(&self, q: usize) -> Option<bool> {
        if self.is_deterministic(q) {
            Some(self.inv.zs.signs.get(q))
        } else {
            None
        }
    }

    fn is_deterministic(&self, q: usize) -> bool {
        match self.inv.layout() {
            Layout::ColumnMajor => self.inv.zs.xt.row(q).iter().all(|&w| w == 0),
            Layout::RowMajor => (0..self.num_qubits()).all(|a| !self.inv.zs.xt.get(a, q)),
        }
    }

    /// Makes the Z_q result deterministic by appending start-of-time gates
    /// and a random X flip. Returns whether it was already deterministic.
    fn collapse(&mut self, q: usize) -> bool {
        if self.is_deterministic(q) {
            return true;
        }
        self.inv.set_layout(Layout::RowMajor);
        let n = self.num_qubits();
        let mut pivot = None;
        for a in 0..n {
            if self.inv.zs.xt.get(a, q) {
                match pivot {
                    None => pivot = Some(a),
                    Some(p) => self.inv.append_cx(p, a),
                }
            }
        }
        let pivot = pivot.expect("nondeterministic column has an X or Y term");
        if self.inv.zs.zt.get(pivot, q) {
            self.inv.append_h_yz(pivot);
        } else {
            self.inv.append_h(pivot);
        }
        if self.rng.random::<bool>() {
            self.inv.append_x(pivot);
        }
        false
    }

    /// Measures qubit `q` in the Z basis and records the result.
    pub fn measure_with_kind(&mut self, q: usize) -> Result<MeasureOutcome> {
        self.check_qubit(q)?;
        let deterministic = self.collapse(q);
        let value = self.inv.zs.signs.get(q);
        self.record.push(value);
        Ok(MeasureOutcome {
            value,
            deterministic,
        })
    }

    pub fn measure(&mut self, q: usize) -> Result<bool> {
        Ok(self.measure_with_kind(q)?.value)
    }

    /// Measures several qubits in order.
    pub fn measure_many(&mut self, qubits: &[usize]) -> Result<Vec<bool>> {
        qubits.iter().map(|&q| self.measure(q)).collect()
    }

    /// Replaces the tracked inverse tableau.
    pub fn set_inverse_tableau(&mut self, inv: Tableau) {
        self.inv = inv;
    }

    /// Stabilizer generators of the current state (the images of each Z_q
    /// under the Clifford applied so far).
    pub fn stabilizers(&self) -> Result<Vec<crate::pauli::PauliString>> {
        let t = self.current_tableau()?;
        Ok((0..t.num_qubits()).map(|q| t.z_output(q)).collect())
    }

    /// Resets qubit `q` to |0⟩ without recording anything.
    pub fn reset(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        self.collapse(q);
        self.inv.zs.signs.set(q, false);
        Ok(())
    }

    pub fn measure_reset(&mut self, q: usize) -> Result<bool> {
        let m = self.measure(q)?;
        self.reset(q)?;
        Ok(m)
    }

    /// Samples a noise channel on one group of targets and folds the chosen
    /// Pauli into the state.
    pub fn apply_noise(&mut self, gate: Gate, p: f64, targets: &[usize]) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadProbability(p));
        }
        let paulis = gate.data().noise_paulis;
        if p == 0.0 || paulis.is_empty() {
            return Ok(());
        }
        if self.rng.random::<f64>() >= p {
            return Ok(());
        }
        let chosen = paulis[self.rng.random_range(0..paulis.len())];
        for (c, &q) in chosen.chars().zip(targets) {
            let pauli = match c {
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => continue,
            };
            self.prepend_pauli(q, pauli)?;
        }
        Ok(())
    }

    /// Executes one instruction, returning the measurement results it
    /// produced. Noise is skipped when `noisy` is false.
    pub fn execute(&mut self, inst: &Instruction, noisy: bool) -> Result<Vec<bool>> {
        let mut results = Vec::new();
        if let Some(max) = inst.qubits().max() {
            self.ensure_qubits(max + 1);
        }
        let flags = inst.gate.flags();
        for app in inst.applications() {
            if flags.annotation {
                continue;
            }
            let qs: Vec<usize> = app.iter().map(|t| t.qubit()).collect();
            if flags.unitary {
                self.apply_gate(inst.gate, &qs)?;
            } else if flags.noise {
                if noisy {
                    self.apply_noise(inst.gate, inst.probability(), &qs)?;
                }
            } else {
                match inst.gate {
                    Gate::M => results.push(self.measure(qs[0])?),
                    Gate::R => self.reset(qs[0])?,
                    Gate::Mr => results.push(self.measure_reset(qs[0])?),
                    other => unreachable!("unhandled collapsing gate {other}"),
                }
            }
        }
        Ok(results)
    }

    /// Runs a whole circuit, appending its measurements to the record.
    pub fn run(&mut self, circuit: &Circuit, noisy: bool) -> Result<()> {
        self.ensure_qubits(circuit.num_qubits());
        for inst in circuit.iter_flat() {
            self.execute(inst, noisy)?;
        }
        Ok(())
    }

    /// One noiseless sample of the circuit's measurements.
    pub fn reference_sample<R: RngCore + ?Sized>(circuit: &Circuit, rng: &mut R) -> Result<Vec<bool>> {
        let mut sim = TableauSimulator::new(circuit.num_qubits(), rng.next_u64());
        sim.run(circuit, false)?;
        Ok(sim.take_record())
    }

    /// One noisy sample of the circuit's measurements.
    pub fn sample_once(circuit: &Circuit, seed: u64) -> Result<Vec<bool>> {
        let mut sim = TableauSimulator::new(circuit.num_qubits(), seed);
        sim.run(circuit, true)?;
        Ok(sim.take_record())
    }

    /// Parity of the recorded measurements named by detector targets,
    /// relative to the current end of the record.
    pub fn detector_parity(&self, targets: &[Target]) -> Result<bool> {
        let mut parity = false;
        for t in targets {
            if let Target::Rec(k) = *t {
                let k = k as usize;
                if k == 0 || k > self.record.len() {
                    return Err(Error::BadLookback { lookback: k });
                }
                parity ^= self.record[self.record.len() - k];
            }
        }
        Ok(parity)
    }
}
