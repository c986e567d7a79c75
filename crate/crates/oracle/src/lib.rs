//! Dense reference simulation for cross-checking the stabilizer engines.
//!
//! Everything here is exponential in the qubit count and meant for tests
//! on a handful of qubits.

use std::collections::BTreeMap;

use num_complex::Complex64;
use stabsim::circuit::Circuit;
use stabsim::gates::Gate;
use stabsim::pauli::{Pauli, PauliString};
use stabsim::tableau::{Generator, Tableau};

pub const MAX_STATE_QUBITS: usize = 10;
pub const MAX_DENSITY_QUBITS: usize = 6;
pub const MAX_RECORDS: usize = 1 << 16;
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("gate {0} has no unitary matrix")]
    MissingMatrix(&'static str),
    #[error("gate {0} has no tableau")]
    MissingTableau(&'static str),
    #[error("{qubits} qubits exceeds the oracle limit of {limit}")]
    TooManyQubits { qubits: usize, limit: usize },
    #[error("more than {0} distinct measurement records")]
    TooManyRecords(usize),
    #[error(transparent)]
    Sim(#[from] stabsim::Error),
}

pub type Result<T> = std::result::Result<T, OracleError>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `i^k`.
pub fn i_pow(k: u8) -> Complex64 {
    [ONE, I, -ONE, -I][(k & 3) as usize]
}

pub fn pauli_matrix(p: Pauli) -> [Complex64; 4] {
    match p {
        Pauli::I => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    }
}

/// Applies a `2^k x 2^k` row-major matrix to the given qubits of a state
/// vector. `targets[0]` is the least significant bit of the matrix index.
pub fn apply_matrix(amps: &mut [Complex64], matrix: &[Complex64], targets: &[usize]) {
    let k = targets.len();
    let dim = 1usize << k;
    assert_eq!(matrix.len(), dim * dim, "matrix size does not match target count");
    let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|j| {
            (0..k)
                .filter(|&b| j >> b & 1 == 1)
                .map(|b| 1usize << targets[b])
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for j in 0..dim {
            buf[j] = amps[base | offsets[j]];
        }
        for r in 0..dim {
            let row = &matrix[r * dim..(r + 1) * dim];
            amps[base | offsets[r]] = row.iter().zip(&buf).map(|(m, a)| m * a).sum();
        }
    }
}

/// Dense matrix of a signed Pauli string, qubit 0 least significant.
pub fn pauli_string_matrix(p: &PauliString) -> Vec<Complex64> {
    let n = p.num_qubits();
    let dim = 1usize << n;
    let mut m = vec![ZERO; dim * dim];
    let sign = if p.sign { -ONE } else { ONE };
    for col in 0..dim {
        let mut row = col;
        let mut v = sign;
        for q in 0..n {
            let bit = col >> q & 1;
            let pm = pauli_matrix(p.get(q));
            // Each Pauli has one nonzero per column.
            let out = if pm[bit] != ZERO { 0 } else { 1 };
            v *= pm[out * 2 + bit];
            row = (row & !(1 << q)) | (out << q);
        }
        m[row * dim + col] = v;
    }
    m
}

pub fn mat_mul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let x = a[r * dim + k];
            if x == ZERO {
                continue;
            }
            for c in 0..dim {
                out[r * dim + c] += x * b[k * dim + c];
            }
        }
    }
    out
}

pub fn dagger(a: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            out[c * dim + r] = a[r * dim + c].conj();
        }
    }
    out
}

/// Writes a dense matrix known to be `i^k` times an unsigned Pauli string
/// in that form. Returns `None` for anything else.
pub fn decompose_pauli_matrix(m: &[Complex64], n: usize) -> Option<(PauliString, u8)> {
    let dim = 1usize << n;
    if m.len() != dim * dim {
        return None;
    }
    // Column 0 picks out the X part; the phase at each single-bit column
    // relative to column 0 picks out the Z part.
    let x = (0..dim).find(|&r| m[r * dim].norm() > TOLERANCE)?;
    let mut p = PauliString::identity(n);
    for q in 0..n {
        let c = 1usize << q;
        let ratio = m[(x ^ c) * dim + c] / m[x * dim];
        let z = ratio.re < 0.0;
        p.set(q, Pauli::from_xz(x >> q & 1 == 1, z));
    }
    let unsigned = pauli_string_matrix(&p);
    let k = (0..4u8).find(|&k| {
        let s = i_pow(k);
        m.iter().zip(&unsigned).all(|(a, b)| (a - s * b).norm() < TOLERANCE)
    })?;
    Some((p, k))
}

/// Oracle for signed Pauli multiplication: the unsigned product string and
/// the total phase exponent `k` with `a * b = i^k * product`.
pub fn pauli_product(a: &PauliString, b: &PauliString) -> Option<(PauliString, u8)> {
    let n = a.num_qubits();
    let dim = 1usize << n;
    let m = mat_mul(&pauli_string_matrix(a), &pauli_string_matrix(b), dim);
    decompose_pauli_matrix(&m, n)
}

/// True when `a = c * b` for some unit complex `c`.
pub fn equal_up_to_phase(a: &[Complex64], b: &[Complex64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(i) = (0..a.len()).find(|&i| a[i].norm() > TOLERANCE) else {
        return b.iter().all(|v| v.norm() <= TOLERANCE);
    };
    if b[i].norm() <= TOLERANCE {
        return false;
    }
    let c = a[i] / b[i];
    (c.norm() - 1.0).abs() < TOLERANCE && a.iter().zip(b).all(|(x, y)| (x - c * y).norm() < TOLERANCE)
}

pub fn approx_equal(a: &[Complex64], b: &[Complex64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < TOLERANCE)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// `|0...0>`.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits > MAX_STATE_QUBITS {
            return Err(OracleError::TooManyQubits {
                qubits: num_qubits,
                limit: MAX_STATE_QUBITS,
            });
        }
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[0] = ONE;
        Ok(DenseState { num_qubits, amps })
    }

    /// `k` Bell pairs, pair `j` on qubits `j` and `k + j`.
    pub fn epr_pairs(k: usize) -> Result<Self> {
        let mut s = Self::new(2 * k)?;
        let h = hadamard();
        for j in 0..k {
            s.apply(&h, &[j]);
            s.apply(&cnot(), &[j, k + j]);
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, matrix: &[Complex64], targets: &[usize]) {
        apply_matrix(&mut self.amps, matrix, targets);
    }

    /// Applies a signed Pauli string to the qubits starting at `offset`.
    pub fn apply_pauli(&mut self, p: &PauliString, offset: usize) {
        for q in 0..p.num_qubits() {
            if p.get(q) != Pauli::I {
                self.apply(&pauli_matrix(p.get(q)), &[offset + q]);
            }
        }
        if p.sign {
            for a in &mut self.amps {
                *a = -*a;
            }
        }
    }

    pub fn probability_of_one(&self, q: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> q & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

pub fn hadamard() -> Vec<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![h, h, h, -h]
}

/// Controlled-X with the control on the first target.
pub fn cnot() -> Vec<Complex64> {
    let mut m = vec![ZERO; 16];
    for (r, c) in [(0, 0), (3, 1), (2, 2), (1, 3)] {
        m[r * 4 + c] = ONE;
    }
    m
}

pub fn sqrt_z() -> Vec<Complex64> {
    vec![ONE, ZERO, ZERO, I]
}

/// The Hadamard-like gate exchanging Y and Z: `(Y + Z) / sqrt 2`.
pub fn h_yz() -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        Complex64::new(h, 0.0),
        Complex64::new(0.0, -h),
        Complex64::new(0.0, h),
        Complex64::new(-h, 0.0),
    ]
}

/// Checks a tableau against a unitary through channel-state duality.
///
/// For every generator P of the `k` inputs, starting from `k` Bell pairs,
/// applies P then U then the tableau's image of P to the first half. Since
/// `U P U^dag` should equal the image, the result must match applying U
/// alone exactly, global phase included.
pub fn duality_check_tableau(tableau: &Tableau, unitary: &[Complex64]) -> Result<bool> {
    let k = tableau.num_qubits();
    let subsystem: Vec<usize> = (0..k).collect();
    let mut expected = DenseState::epr_pairs(k)?;
    expected.apply(unitary, &subsystem);
    for g in [Generator::X, Generator::Z] {
        for q in 0..k {
            let input = PauliString::single(k, q, if g == Generator::X { Pauli::X } else { Pauli::Z });
            let mut s = DenseState::epr_pairs(k)?;
            s.apply_pauli(&input, 0);
            s.apply(unitary, &subsystem);
            s.apply_pauli(&tableau.image(g, q), 0);
            if !approx_equal(s.amplitudes(), expected.amplitudes()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Duality check of a registry gate's tableau against its matrix.
pub fn duality_check(gate: Gate) -> Result<bool> {
    let tableau = gate.tableau().ok_or(OracleError::MissingTableau(gate.name()))?;
    let unitary = gate.unitary_matrix().ok_or(OracleError::MissingMatrix(gate.name()))?;
    duality_check_tableau(tableau, &unitary)
}

/// The identity that separates the two square roots of Y, applied to a
/// candidate pair of matrices.
pub fn identity_check_sqrt_y_with(sqrt_y: &[Complex64], sqrt_y_dag: &[Complex64]) -> bool {
    let hsh = mat_mul(&mat_mul(&h_yz(), &sqrt_z(), 2), &h_yz(), 2);
    let y = pauli_matrix(Pauli::Y);
    equal_up_to_phase(sqrt_y, &hsh)
        && !equal_up_to_phase(sqrt_y_dag, &hsh)
        && equal_up_to_phase(&mat_mul(sqrt_y, sqrt_y, 2), &y)
        && equal_up_to_phase(&mat_mul(sqrt_y_dag, sqrt_y_dag, 2), &y)
        && approx_equal(&mat_mul(sqrt_y, sqrt_y_dag, 2), &[ONE, ZERO, ZERO, ONE])
}

pub fn identity_check_sqrt_y() -> bool {
    match (Gate::SqrtY.unitary_matrix(), Gate::SqrtYDag.unitary_matrix()) {
        (Some(a), Some(b)) => identity_check_sqrt_y_with(&a, &b),
        _ => false,
    }
}

/// Unnormalized density matrix over `n` qubits; its trace is the
/// probability of the classical record it is filed under.
#[derive(Clone)]
struct Density {
    n: usize,
    rho: Vec<Complex64>,
}

impl Density {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.rho[i * self.dim() + i].re).sum()
    }

    /// `rho -> U rho U^dag`.
    fn conjugate(&mut self, u: &[Complex64], targets: &[usize]) {
        let d = self.dim();
        let mut col = vec![ZERO; d];
        for c in 0..d {
            for (r, v) in col.iter_mut().enumerate() {
                *v = self.rho[r * d + c];
            }
            apply_matrix(&mut col, u, targets);
            for (r, v) in col.iter().enumerate() {
                self.rho[r * d + c] = *v;
            }
        }
        let conj: Vec<Complex64> = u.iter().map(|v| v.conj()).collect();
        for r in 0..d {
            apply_matrix(&mut self.rho[r * d..(r + 1) * d], &conj, targets);
        }
    }

    fn add(&mut self, other: &Density, weight: f64) {
        for (a, b) in self.rho.iter_mut().zip(&other.rho) {
            *a += b * weight;
        }
    }

    /// Keeps the block where qubit `q` equals `bit`.
    fn project(&self, q: usize, bit: bool) -> Density {
        let d = self.dim();
        let mut out = self.clone();
        for r in 0..d {
            for c in 0..d {
                if (r >> q & 1 == 1) != bit || (c >> q & 1 == 1) != bit {
                    out.rho[r * d + c] = ZERO;
                }
            }
        }
        out
    }
}

fn pauli_from_char(c: char) -> Pauli {
    match c {
        'X' => Pauli::X,
        'Y' => Pauli::Y,
        'Z' => Pauli::Z,
        _ => Pauli::I,
    }
}

/// Exact distribution of a circuit's measurement record, noise included.
///
/// Tracks one density matrix per distinct record prefix. Measurements split
/// a branch in two, reset folds the |1> block back onto |0>, and a Pauli
/// channel mixes the state with its Pauli-conjugated copies.
pub fn enumerate_distribution(circuit: &Circuit) -> Result<BTreeMap<Vec<bool>, f64>> {
    let n = circuit.num_qubits().max(1);
    if n > MAX_DENSITY_QUBITS {
        return Err(OracleError::TooManyQubits {
            qubits: n,
            limit: MAX_DENSITY_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut start = Density {
        n,
        rho: vec![ZERO; dim * dim],
    };
    start.rho[0] = ONE;
    let mut branches: BTreeMap<Vec<bool>, Density> = BTreeMap::new();
    branches.insert(Vec::new(), start);
    let x = pauli_matrix(Pauli::X);

    for inst in circuit.iter_flat() {
        let gate = inst.gate;
        let flags = gate.flags();
        if flags.annotation {
            continue;
        }
        for app in inst.applications() {
            let qs: Vec<usize> = app.iter().map(|t| t.qubit()).collect();
            if flags.unitary {
                let u = gate.unitary_matrix().ok_or(OracleError::MissingMatrix(gate.name()))?;
                for rho in branches.values_mut() {
                    rho.conjugate(&u, &qs);
                }
            } else if flags.noise {
                let p = inst.probability();
                let paulis = gate.data().noise_paulis;
                if p == 0.0 || paulis.is_empty() {
                    continue;
                }
                let each = p / paulis.len() as f64;
                for rho in branches.values_mut() {
                    let mut mixed = rho.clone();
                    for v in &mut mixed.rho {
                        *v *= 1.0 - p;
                    }
                    for pauli in paulis {
                        let mut term = rho.clone();
                        for (c, &q) in pauli.chars().zip(&qs) {
                            if c != 'I' {
                                term.conjugate(&pauli_matrix(pauli_from_char(c)), &[q]);
                            }
                        }
                        mixed.add(&term, each);
                    }
                    *rho = mixed;
                }
            } else {
                let q = qs[0];
                let measures = gate.produces_measurement();
                let resets = matches!(gate, Gate::R | Gate::Mr);
                let mut next = BTreeMap::new();
                for (record, rho) in branches {
                    let parts = [(false, rho.project(q, false)), (true, rho.project(q, true))];
                    if measures {
                        for (bit, mut part) in parts {
                            if part.trace() <= TOLERANCE * TOLERANCE {
                                continue;
                            }
                            if resets && bit {
                                part.conjugate(&x, &[q]);
                            }
                            let mut r = record.clone();
                            r.push(bit);
                            next.insert(r, part);
                        }
                    } else {
                        let [(_, mut zero), (_, mut one)] = parts;
                        one.conjugate(&x, &[q]);
                        zero.add(&one, 1.0);
                        next.insert(record, zero);
                    }
                }
                if next.len() > MAX_RECORDS {
                    return Err(OracleError::TooManyRecords(MAX_RECORDS));
                }
                branches = next;
            }
        }
    }
    Ok(branches
        .into_iter()
        .map(|(record, rho)| (record, rho.trace()))
        .filter(|&(_, p)| p > TOLERANCE * TOLERANCE)
        .collect())
}
