//! Signed Pauli strings in the xz encoding.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::bits::{self, BitBuffer};
use crate::error::{Error, Result};

/// A single qubit Pauli, xz-encoded as `(x, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    #[inline]
    pub fn from_xz(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn xz(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => '_',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Multiplies `(x1, z1) := (x1, z1) * (x2, z2)` word by word.
///
/// Returns `k` such that `before * rhs = i^k * after`, with the strings read
/// as unsigned tensor products of I/X/Y/Z. Each lane keeps a two bit counter
/// (`c1` ones bit, `c2` twos bit) of the anticommutation phase contributions.
pub fn mul_words(x1: &mut [u64], z1: &mut [u64], x2: &[u64], z2: &[u64]) -> u8 {
    debug_assert!(x1.len() == z1.len() && x2.len() == z2.len() && x1.len() == x2.len());
    let mut c1 = 0u64;
    let mut c2 = 0u64;
    for k in 0..x1.len() {
        let old_x1 = x1[k];
        let old_z1 = z1[k];
        let new_x1 = old_x1 ^ x2[k];
        let new_z1 = old_z1 ^ z2[k];
        x1[k] = new_x1;
        z1[k] = new_z1;
        let x1z2 = old_x1 & z2[k];
        let anti_commutes = (x2[k] & old_z1) ^ x1z2;
        c2 ^= (c1 ^ new_x1 ^ new_z1 ^ x1z2) & anti_commutes;
        c1 ^= anti_commutes;
    }
    ((c1.count_ones() + 2 * c2.count_ones()) & 3) as u8
}

/// Parity of the number of anticommuting sites.
pub fn anticommute_words(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> bool {
    let mut acc = 0u64;
    for k in 0..x1.len() {
        acc ^= (x1[k] & z2[k]) ^ (z1[k] & x2[k]);
    }
    acc.count_ones() & 1 == 1
}

/// A Pauli product with a ±1 sign.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    /// `true` means the sign is −1.
    pub sign: bool,
    pub xs: BitBuffer,
    pub zs: BitBuffer,
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        PauliString {
            sign: false,
            xs: BitBuffer::zeros(num_qubits),
            zs: BitBuffer::zeros(num_qubits),
        }
    }

    /// `+P_q` on an otherwise identity string.
    pub fn single(num_qubits: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut p = Self::identity(num_qubits);
        p.set(qubit, pauli);
        p
    }

    pub fn random<R: RngCore + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        let mut sign = BitBuffer::zeros(1);
        sign.randomize(rng);
        PauliString {
            sign: sign.get(0),
            xs: BitBuffer::random(num_qubits, rng),
            zs: BitBuffer::random(num_qubits, rng),
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.xs.len()
    }

    #[inline]
    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_xz(self.xs.get(qubit), self.zs.get(qubit))
    }

    pub fn set(&mut self, qubit: usize, pauli: Pauli) {
        let (x, z) = pauli.xz();
        self.xs.set(qubit, x);
        self.zs.set(qubit, z);
    }

    /// Number of non-identity terms.
    pub fn weight(&self) -> usize {
        self.xs
            .words()
            .iter()
            .zip(self.zs.words())
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.xs.is_zero() && self.zs.is_zero()
    }

    /// Multiplies `rhs` into `self` on the right, ignoring both signs.
    ///
    /// Returns the base-i logarithm `k` of the scalar left over:
    /// `self_before * rhs = i^k * self_after` (unsigned strings). Sign bits
    /// are not touched; folding them in is the caller's job.
    pub fn mul_inplace_with_phase(&mut self, rhs: &PauliString) -> Result<u8> {
        self.check_len(rhs)?;
        Ok(mul_words(
            self.xs.words_mut(),
            self.zs.words_mut(),
            rhs.xs.words(),
            rhs.zs.words(),
        ))
    }

    /// Signed product `self * rhs`. Fails if the product carries an imaginary phase.
    pub fn signed_mul(&mut self, rhs: &PauliString) -> Result<()> {
        let k = self.mul_inplace_with_phase(rhs)?;
        let total = (k + 2 * (self.sign as u8) + 2 * (rhs.sign as u8)) & 3;
        if total & 1 == 1 {
            return Err(Error::OddPhase(total));
        }
        self.sign = total == 2;
        Ok(())
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(!anticommute_words(
            self.xs.words(),
            self.zs.words(),
            other.xs.words(),
            other.zs.words(),
        ))
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::LengthMismatch {
                left: self.num_qubits(),
                right: other.num_qubits(),
            });
        }
        Ok(())
    }

    /// Indices of qubits carrying a non-identity term.
    pub fn support(&self) -> Vec<usize> {
        let mut w = BitBuffer::zeros(self.num_qubits());
        for (d, (x, z)) in w
            .words_mut()
            .iter_mut()
            .zip(self.xs.words().iter().zip(self.zs.words()))
        {
            *d = x | z;
        }
        bits::iter_ones(w.words()).collect()
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut chars = text.char_indices().peekable();
        let mut sign = false;
        let mut body_start = 0;
        if let Some(&(_, c)) = chars.peek() {
            if c == '+' || c == '-' {
                sign = c == '-';
                chars.next();
                body_start = 1;
            }
        }
        let body: Vec<(usize, char)> = chars.collect();
        if body.is_empty() {
            return Err(Error::PauliParse {
                column: body_start,
                message: "empty Pauli string".into(),
            });
        }
        let mut p = PauliString::identity(body.len());
        p.sign = sign;
        for (q, &(col, c)) in body.iter().enumerate() {
            let pauli = match c {
                '_' | 'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::PauliParse {
                        column: col,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            };
            p.set(q, pauli);
        }
        Ok(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.sign { "-" } else { "+" })?;
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.get(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}
