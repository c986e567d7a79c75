//! Stabilizer tableaus.
//!
//! A tableau stores, for every generator `X_q` and `Z_q`, the signed Pauli
//! string the Clifford operation `U` conjugates it into (`U g U†`). The data
//! lives in four bit tables (x and z bits of the X images, x and z bits of the
//! Z images) plus two sign buffers.
//!
//! In [`Layout::ColumnMajor`] each generator's image is one contiguous table
//! row, which makes conjugating Pauli strings and prepending gates cheap. In
//! [`Layout::RowMajor`] the tables are transposed so every row holds one
//! qubit's terms across all generators; appending gates becomes a handful of
//! word operations per affected qubit.

use std::fmt;

use rand::{Rng, RngCore};

use crate::bits::{self, BitBuffer, BitTable};
use crate::error::{Error, Result};
use crate::pauli::{anticommute_words, mul_words, Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    ColumnMajor,
    RowMajor,
}

/// The images of one family of generators (all `X_q` or all `Z_q`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauHalf {
    pub xt: BitTable,
    pub zt: BitTable,
    pub signs: BitBuffer,
}

impl TableauHalf {
    fn zeros(n: usize) -> Self {
        TableauHalf {
            xt: BitTable::zeros(n, n),
            zt: BitTable::zeros(n, n),
            signs: BitBuffer::zeros(n),
        }
    }
}

#[derive(Clone)]
pub struct Tableau {
    num_qubits: usize,
    pub xs: TableauHalf,
    pub zs: TableauHalf,
    layout: Layout,
}

/// Which generator of a qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    X,
    Z,
}

/// Solves the 2x2 block of an inverse tableau from commutation constraints.
///
/// Input bits (LSB first): `x` and `z` of `T(X_a)` on qubit `b`, then `x` and
/// `z` of `T(Z_a)` on qubit `b`. Output uses the same packing for
/// `T⁻¹(X_b)` and `T⁻¹(Z_b)` on qubit `a`. The inverse images must satisfy
/// `comm(T⁻¹(g), h) = comm(g, T(h))` for g in {X_b, Z_b} and h in {X_a, Z_a},
/// and a single qubit Pauli is pinned down by whether it anticommutes with X
/// and with Z.
const fn solve_inverse_block(block: u8) -> u8 {
    let px_x = block & 1;
    let px_z = (block >> 1) & 1;
    let pz_x = (block >> 2) & 1;
    let pz_z = (block >> 3) & 1;
    let mut candidate = 0u8;
    while candidate < 16 {
        let qx_x = candidate & 1;
        let qx_z = (candidate >> 1) & 1;
        let qz_x = (candidate >> 2) & 1;
        let qz_z = (candidate >> 3) & 1;
        // A one-qubit Pauli anticommutes with X iff its z bit is set, and
        // with Z iff its x bit is set.
        let ok = qx_z == px_z // comm(T⁻¹X_b, X_a) = comm(X_b, T X_a)
            && qx_x == pz_z // comm(T⁻¹X_b, Z_a) = comm(X_b, T Z_a)
            && qz_z == px_x // comm(T⁻¹Z_b, X_a) = comm(Z_b, T X_a)
            && qz_x == pz_x; // comm(T⁻¹Z_b, Z_a) = comm(Z_b, T Z_a)
        if ok {
            return candidate;
        }
        candidate += 1;
    }
    panic!("unsolvable inverse block");
}

const fn build_inverse_table() -> [u8; 16] {
    let mut table = [0u8; 16];
    let mut k = 0;
    while k < 16 {
        table[k] = solve_inverse_block(k as u8);
        k += 1;
    }
    table
}

/// Lookup table from a tableau's 2x2 block to its inverse's transposed block.
pub const INVERSE_BLOCK_TABLE: [u8; 16] = build_inverse_table();

impl Tableau {
    pub fn identity(n: usize) -> Self {
        Tableau {
            num_qubits: n,
            xs: TableauHalf {
                xt: BitTable::identity(n),
                zt: BitTable::zeros(n, n),
                signs: BitBuffer::zeros(n),
            },
            zs: TableauHalf {
                xt: BitTable::zeros(n, n),
                zt: BitTable::identity(n),
                signs: BitBuffer::zeros(n),
            },
            layout: Layout::ColumnMajor,
        }
    }

    /// Builds a tableau from the text form of each generator image.
    pub fn from_columns(x_images: &[&str], z_images: &[&str]) -> Result<Self> {
        let n = x_images.len();
        if z_images.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: z_images.len(),
            });
        }
        let mut t = Tableau::identity(n);
        for q in 0..n {
            let px: PauliString = x_images[q].parse()?;
            let pz: PauliString = z_images[q].parse()?;
            for p in [&px, &pz] {
                if p.num_qubits() != n {
                    return Err(Error::LengthMismatch {
                        left: n,
                        right: p.num_qubits(),
                    });
                }
            }
            t.set_image(Generator::X, q, &px);
            t.set_image(Generator::Z, q, &pz);
        }
        Ok(t)
    }

    /// Uniformly random Clifford tableau.
    ///
    /// Draws a random symplectic basis pair by pair: each new X image is a
    /// uniform nonzero vector in the symplectic complement of the pairs chosen
    /// so far, and the matching Z image is a uniform vector in that complement
    /// anticommuting with it. Signs are independent coin flips.
    pub fn random<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut xs_img: Vec<PauliString> = Vec::with_capacity(n);
        let mut zs_img: Vec<PauliString> = Vec::with_capacity(n);
        let project = |v: &mut PauliString, xs_img: &[PauliString], zs_img: &[PauliString]| {
            for (x, z) in xs_img.iter().zip(zs_img) {
                let hit_z = !v.commutes(z).unwrap();
                let hit_x = !v.commutes(x).unwrap();
                if hit_z {
                    v.xs.xor_into(&x.xs).unwrap();
                    v.zs.xor_into(&x.zs).unwrap();
                }
                if hit_x {
                    v.xs.xor_into(&z.xs).unwrap();
                    v.zs.xor_into(&z.zs).unwrap();
                }
            }
        };
        for _ in 0..n {
            let x = loop {
                let mut v = PauliString::random(n, rng);
                project(&mut v, &xs_img, &zs_img);
                if !v.is_identity() {
                    break v;
                }
            };
            let z = loop {
                let mut w = PauliString::random(n, rng);
                project(&mut w, &xs_img, &zs_img);
                if !w.commutes(&x).unwrap() {
                    break w;
                }
            };
            xs_img.push(x);
            zs_img.push(z);
        }
        let mut t = Tableau::identity(n);
        for q in 0..n {
            let mut x = xs_img[q].clone();
            let mut z = zs_img[q].clone();
            x.sign = rng.random();
            z.sign = rng.random();
            t.set_image(Generator::X, q, &x);
            t.set_image(Generator::Z, q, &z);
        }
        t
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn layout(&self) -> Layout {
        self.layout
    }

    fn half(&self, g: Generator) -> &TableauHalf {
        match g {
            Generator::X => &self.xs,
            Generator::Z => &self.zs,
        }
    }

    fn half_mut(&mut self, g: Generator) -> &mut TableauHalf {
        match g {
            Generator::X => &mut self.xs,
            Generator::Z => &mut self.zs,
        }
    }

    /// `(x, z)` bits of the image of generator `g` on `qubit`, in either layout.
    #[inline]
    pub fn term(&self, g: Generator, gen_qubit: usize, qubit: usize) -> (bool, bool) {
        let h = self.half(g);
        match self.layout {
            Layout::ColumnMajor => (h.xt.get(gen_qubit, qubit), h.zt.get(gen_qubit, qubit)),
            Layout::RowMajor => (h.xt.get(qubit, gen_qubit), h.zt.get(qubit, gen_qubit)),
        }
    }

    #[inline]
    fn set_term(&mut self, g: Generator, gen_qubit: usize, qubit: usize, (x, z): (bool, bool)) {
        let layout = self.layout;
        let h = self.half_mut(g);
        match layout {
            Layout::ColumnMajor => {
                h.xt.set(gen_qubit, qubit, x);
                h.zt.set(gen_qubit, qubit, z);
            }
            Layout::RowMajor => {
                h.xt.set(qubit, gen_qubit, x);
                h.zt.set(qubit, gen_qubit, z);
            }
        }
    }

    #[inline]
    pub fn sign(&self, g: Generator, gen_qubit: usize) -> bool {
        self.half(g).signs.get(gen_qubit)
    }

    #[inline]
    pub fn set_sign(&mut self, g: Generator, gen_qubit: usize, sign: bool) {
        self.half_mut(g).signs.set(gen_qubit, sign)
    }

    /// The signed image of generator `g` on qubit `q`.
    pub fn image(&self, g: Generator, q: usize) -> PauliString {
        let mut p = PauliString::identity(self.num_qubits);
        match self.layout {
            Layout::ColumnMajor => {
                let h = self.half(g);
                p.xs.words_mut().copy_from_slice(h.xt.row(q));
                p.zs.words_mut().copy_from_slice(h.zt.row(q));
            }
            Layout::RowMajor => {
                for k in 0..self.num_qubits {
                    p.set(k, Pauli::from_xz(self.term(g, q, k).0, self.term(g, q, k).1));
                }
            }
        }
        p.sign = self.sign(g, q);
        p
    }

    pub fn x_output(&self, q: usize) -> PauliString {
        self.image(Generator::X, q)
    }

    pub fn z_output(&self, q: usize) -> PauliString {
        self.image(Generator::Z, q)
    }

    pub fn set_image(&mut self, g: Generator, q: usize, p: &PauliString) {
        assert_eq!(p.num_qubits(), self.num_qubits);
        match self.layout {
            Layout::ColumnMajor => {
                let h = self.half_mut(g);
                h.xt.row_mut(q).copy_from_slice(p.xs.words());
                h.zt.row_mut(q).copy_from_slice(p.zs.words());
            }
            Layout::RowMajor => {
                for k in 0..self.num_qubits {
                    self.set_term(g, q, k, p.get(k).xz());
                }
            }
        }
        self.set_sign(g, q, p.sign);
    }

    /// Switches the storage orientation, transposing the four tables.
    pub fn set_layout(&mut self, layout: Layout) {
        if layout == self.layout {
            return;
        }
        self.transpose_tables();
        self.layout = layout;
    }

    #[cfg(feature = "parallel")]
    fn transpose_tables(&mut self) {
        // The four tables are independent; only worth threads when large.
        if self.num_qubits >= 512 {
            let (a, b) = (&mut self.xs, &mut self.zs);
            rayon::join(
                || rayon::join(|| a.xt = a.xt.transposed(), || a.zt = a.zt.transposed()),
                || rayon::join(|| b.xt = b.xt.transposed(), || b.zt = b.zt.transposed()),
            );
            return;
        }
        self.transpose_tables_sequential();
    }

    #[cfg(not(feature = "parallel"))]
    fn transpose_tables(&mut self) {
        self.transpose_tables_sequential();
    }

    fn transpose_tables_sequential(&mut self) {
        for h in [&mut self.xs, &mut self.zs] {
            h.xt = h.xt.transposed();
            h.zt = h.zt.transposed();
        }
    }

    fn require_column_major(&self) {
        assert_eq!(
            self.layout,
            Layout::ColumnMajor,
            "operation requires a column-major tableau"
        );
    }

    /// Whether the tableau preserves all commutation relations.
    pub fn validate(&self) -> bool {
        let mut t = self.clone();
        t.set_layout(Layout::ColumnMajor);
        let n = t.num_qubits;
        let anti = |ga: &TableauHalf, a: usize, gb: &TableauHalf, b: usize| {
            anticommute_words(ga.xt.row(a), ga.zt.row(a), gb.xt.row(b), gb.zt.row(b))
        };
        for a in 0..n {
            for b in 0..n {
                if anti(&t.xs, a, &t.zs, b) != (a == b) {
                    return false;
                }
                if b > a && (anti(&t.xs, a, &t.xs, b) || anti(&t.zs, a, &t.zs, b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Conjugates an `n`-qubit string given as raw words.
    fn conjugate_words(&self, xw: &[u64], zw: &[u64], sign: bool) -> Result<PauliString> {
        self.require_column_major();
        let mut acc = PauliString::identity(self.num_qubits);
        // Y = i X Z, so each Y term contributes one factor of i.
        let num_y: usize = xw
            .iter()
            .zip(zw)
            .map(|(x, z)| (x & z).count_ones() as usize)
            .sum();
        let mut log_i = (2 * sign as usize + num_y) as u8;
        for (wi, (&x, &z)) in xw.iter().zip(zw).enumerate() {
            let mut any = x | z;
            while any != 0 {
                let bit = any.trailing_zeros() as usize;
                any &= any - 1;
                let q = wi * 64 + bit;
                if (x >> bit) & 1 == 1 {
                    log_i += mul_words(
                        acc.xs.words_mut(),
                        acc.zs.words_mut(),
                        self.xs.xt.row(q),
                        self.xs.zt.row(q),
                    );
                    log_i += 2 * self.xs.signs.get(q) as u8;
                }
                if (z >> bit) & 1 == 1 {
                    log_i += mul_words(
                        acc.xs.words_mut(),
                        acc.zs.words_mut(),
                        self.zs.xt.row(q),
                        self.zs.zt.row(q),
                    );
                    log_i += 2 * self.zs.signs.get(q) as u8;
                }
                log_i &= 3;
            }
        }
        if log_i & 1 == 1 {
            return Err(Error::OddPhase(log_i));
        }
        acc.sign = log_i == 2;
        Ok(acc)
    }

    /// Conjugates `p` by this tableau (`U p U†`). Qubits of `p` past the
    /// tableau's size are left untouched.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        let n = self.num_qubits;
        if p.num_qubits() < n {
            return Err(Error::LengthMismatch {
                left: n,
                right: p.num_qubits(),
            });
        }
        if p.num_qubits() == n {
            let mut t;
            let this = if self.layout == Layout::ColumnMajor {
                self
            } else {
                t = self.clone();
                t.set_layout(Layout::ColumnMajor);
                &t
            };
            return this.conjugate_words(p.xs.words(), p.zs.words(), p.sign);
        }
        let targets: Vec<usize> = (0..n).collect();
        let mut out = p.clone();
        self.conjugate_scattered(&mut out, &targets)?;
        Ok(out)
    }

    /// Conjugates the sub-string of `p` living on `targets` (tableau qubit `j`
    /// acts on `targets[j]`). Cost depends on the tableau size only.
    pub fn conjugate_scattered(&self, p: &mut PauliString, targets: &[usize]) -> Result<()> {
        let m = self.num_qubits;
        assert_eq!(targets.len(), m);
        let mut sub = PauliString::identity(m);
        for (j, &t) in targets.iter().enumerate() {
            sub.set(j, p.get(t));
        }
        sub.sign = p.sign;
        let out = self.conjugate_words(sub.xs.words(), sub.zs.words(), sub.sign)?;
        for (j, &t) in targets.iter().enumerate() {
            p.set(t, out.get(j));
        }
        p.sign = out.sign;
        Ok(())
    }

    fn check_targets(&self, op: &Tableau, targets: &[usize]) -> Result<()> {
        if targets.len() != op.num_qubits {
            return Err(Error::LengthMismatch {
                left: op.num_qubits,
                right: targets.len(),
            });
        }
        for (k, &t) in targets.iter().enumerate() {
            if t >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: t,
                    num_qubits: self.num_qubits,
                });
            }
            if targets[..k].contains(&t) {
                return Err(Error::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    /// `self := op ∘ self`: `op` acts after `self`, on the given qubits.
    ///
    /// Conjugates every column by `op`; O(n·m²). Works in either layout.
    pub fn inplace_scatter_append(&mut self, op: &Tableau, targets: &[usize]) -> Result<()> {
        self.check_targets(op, targets)?;
        let mut op_col;
        let op = if op.layout == Layout::ColumnMajor {
            op
        } else {
            op_col = op.clone();
            op_col.set_layout(Layout::ColumnMajor);
            &op_col
        };
        let m = op.num_qubits;
        let mut sub = PauliString::identity(m);
        for g in [Generator::X, Generator::Z] {
            for col in 0..self.num_qubits {
                for (j, &t) in targets.iter().enumerate() {
                    let (x, z) = self.term(g, col, t);
                    sub.set(j, Pauli::from_xz(x, z));
                }
                let out = op.conjugate_words(sub.xs.words(), sub.zs.words(), false)?;
                for (j, &t) in targets.iter().enumerate() {
                    self.set_term(g, col, t, out.get(j).xz());
                }
                if out.sign {
                    self.half_mut(g).signs.toggle(col);
                }
            }
        }
        Ok(())
    }

    /// `self := self ∘ op`: `op` acts before `self`, on the given qubits.
    ///
    /// Each of `op`'s generator images is conjugated through `self`, and the
    /// results overwrite `self`'s columns for those generators. O(n·m²).
    pub fn inplace_scatter_prepend(&mut self, op: &Tableau, targets: &[usize]) -> Result<()> {
        self.require_column_major();
        self.check_targets(op, targets)?;
        let n = self.num_qubits;
        let mut results = Vec::with_capacity(2 * targets.len());
        for g in [Generator::X, Generator::Z] {
            for j in 0..targets.len() {
                let img = op.image(g, j);
                let mut scattered = PauliString::identity(n);
                for (k, &t) in targets.iter().enumerate() {
                    scattered.set(t, img.get(k));
                }
                results.push(self.conjugate_words(
                    scattered.xs.words(),
                    scattered.zs.words(),
                    img.sign,
                )?);
            }
        }
        let m = targets.len();
        for (j, &t) in targets.iter().enumerate() {
            self.set_image(Generator::X, t, &results[j]);
            self.set_image(Generator::Z, t, &results[m + j]);
        }
        Ok(())
    }

    /// The tableau of applying `self` and then `second`.
    pub fn then(&self, second: &Tableau) -> Result<Tableau> {
        let mut out = self.clone();
        let targets: Vec<usize> = (0..second.num_qubits).collect();
        out.inplace_scatter_append(second, &targets)?;
        Ok(out)
    }

    /// `self` applied `exponent` times; negative exponents use the inverse.
    pub fn pow(&self, exponent: i64) -> Result<Tableau> {
        let mut base = if exponent < 0 { self.inverse()? } else { self.clone() };
        let mut e = exponent.unsigned_abs();
        let mut acc = Tableau::identity(self.num_qubits);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.then(&base)?;
            }
        }
        Ok(acc)
    }

    /// The inverse tableau.
    ///
    /// Pauli terms come from transposing qubit/generator indices and solving
    /// each 2x2 block with [`INVERSE_BLOCK_TABLE`], O(n²). Signs are then
    /// fixed by round-tripping every generator through the unsigned inverse
    /// and `self`, O(n³).
    pub fn inverse(&self) -> Result<Tableau> {
        let mut src = self.clone();
        src.set_layout(Layout::ColumnMajor);
        let n = self.num_qubits;
        let mut inv = Tableau {
            num_qubits: n,
            xs: TableauHalf::zeros(n),
            zs: TableauHalf::zeros(n),
            layout: Layout::ColumnMajor,
        };
        for a in 0..n {
            for b in 0..n {
                let block = src.xs.xt.get(a, b) as u8
                    | (src.xs.zt.get(a, b) as u8) << 1
                    | (src.zs.xt.get(a, b) as u8) << 2
                    | (src.zs.zt.get(a, b) as u8) << 3;
                let solved = INVERSE_BLOCK_TABLE[block as usize];
                inv.xs.xt.set(b, a, solved & 1 == 1);
                inv.xs.zt.set(b, a, solved & 2 == 2);
                inv.zs.xt.set(b, a, solved & 4 == 4);
                inv.zs.zt.set(b, a, solved & 8 == 8);
            }
        }
        for g in [Generator::X, Generator::Z] {
            for q in 0..n {
                let h = inv.half(g);
                let round_trip = src.conjugate_words(h.xt.row(q), h.zt.row(q), false)?;
                if round_trip != PauliString::single(n, q, gen_pauli(g)) {
                    let mut expected = PauliString::single(n, q, gen_pauli(g));
                    expected.sign = true;
                    if round_trip != expected {
                        return Err(Error::InvalidTableau);
                    }
                    inv.half_mut(g).signs.set(q, true);
                }
            }
        }
        Ok(inv)
    }

    /// Grows the tableau to `n` qubits, acting as identity on the new ones.
    pub fn expand(&mut self, n: usize) {
        if n <= self.num_qubits {
            return;
        }
        let layout = self.layout;
        self.set_layout(Layout::ColumnMajor);
        let mut big = Tableau::identity(n);
        for g in [Generator::X, Generator::Z] {
            for q in 0..self.num_qubits {
                let mut p = self.image(g, q);
                let mut wide = PauliString::identity(n);
                for k in p.xs.iter_ones().collect::<Vec<_>>() {
                    wide.xs.set(k, true);
                }
                for k in p.zs.iter_ones().collect::<Vec<_>>() {
                    wide.zs.set(k, true);
                }
                wide.sign = p.sign;
                p = wide;
                big.set_image(g, q, &p);
            }
        }
        *self = big;
        self.set_layout(layout);
    }

    fn row_major_rows(&mut self, g: Generator) -> &mut TableauHalf {
        debug_assert_eq!(self.layout, Layout::RowMajor);
        self.half_mut(g)
    }

    /// Appends a CNOT (control `c`, target `t`). Row-major only.
    pub fn append_cx(&mut self, c: usize, t: usize) {
        assert_eq!(self.layout, Layout::RowMajor);
        assert_ne!(c, t);
        for g in [Generator::X, Generator::Z] {
            let h = self.row_major_rows(g);
            let (xc, xt) = h.xt.two_rows_mut(c, t);
            let (zc, zt) = h.zt.two_rows_mut(c, t);
            let signs = h.signs.words_mut();
            for k in 0..signs.len() {
                signs[k] ^= xc[k] & zt[k] & !(xt[k] ^ zc[k]);
                zc[k] ^= zt[k];
                xt[k] ^= xc[k];
            }
        }
    }

    /// Appends a Hadamard. Row-major only.
    pub fn append_h(&mut self, q: usize) {
        assert_eq!(self.layout, Layout::RowMajor);
        for g in [Generator::X, Generator::Z] {
            let h = self.row_major_rows(g);
            let signs = h.signs.words_mut();
            let (xr, zr) = (h.xt.row_mut(q), h.zt.row_mut(q));
            for k in 0..signs.len() {
                signs[k] ^= xr[k] & zr[k];
                std::mem::swap(&mut xr[k], &mut zr[k]);
            }
        }
    }

    /// Appends the Y/Z swapping Hadamard `(Y + Z)/√2` (X → −X, Y ↔ Z).
    /// Row-major only.
    pub fn append_h_yz(&mut self, q: usize) {
        assert_eq!(self.layout, Layout::RowMajor);
        for g in [Generator::X, Generator::Z] {
            let h = self.row_major_rows(g);
            let signs = h.signs.words_mut();
            let (xr, zr) = (h.xt.row_mut(q), h.zt.row_mut(q));
            for k in 0..signs.len() {
                signs[k] ^= xr[k] & !zr[k];
                xr[k] ^= zr[k];
            }
        }
    }

    /// Appends a Pauli X. Row-major only.
    pub fn append_x(&mut self, q: usize) {
        assert_eq!(self.layout, Layout::RowMajor);
        for g in [Generator::X, Generator::Z] {
            let h = self.row_major_rows(g);
            let signs = h.signs.words_mut();
            let zr = h.zt.row(q);
            bits::xor_words(signs, zr);
        }
    }

    /// Prepends a Pauli operation: flips the signs of the generator images
    /// anticommuting with it. Works in either layout.
    pub fn prepend_pauli(&mut self, q: usize, pauli: Pauli) {
        let (x, z) = pauli.xz();
        if z {
            self.xs.signs.toggle(q);
        }
        if x {
            self.zs.signs.toggle(q);
        }
    }
}

fn gen_pauli(g: Generator) -> Pauli {
    match g {
        Generator::X => Pauli::X,
        Generator::Z => Pauli::Z,
    }
}

impl PartialEq for Tableau {
    fn eq(&self, other: &Tableau) -> bool {
        if self.num_qubits != other.num_qubits {
            return false;
        }
        if self.layout == other.layout {
            return self.xs == other.xs && self.zs == other.zs;
        }
        let mut o = other.clone();
        o.set_layout(self.layout);
        self.xs == o.xs && self.zs == o.zs
    }
}

impl Eq for Tableau {}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, label) in [(Generator::X, 'X'), (Generator::Z, 'Z')] {
            for q in 0..self.num_qubits {
                writeln!(f, "{label}{q} -> {}", self.image(g, q))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tableau({} qubits, {:?})\n{self}", self.num_qubits, self.layout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn cy() -> Tableau {
        Tableau::from_columns(&["+XY", "+ZX"], &["+Z_", "+ZZ"]).unwrap()
    }

    fn cx() -> Tableau {
        Tableau::from_columns(&["+XX", "+_X"], &["+Z_", "+ZZ"]).unwrap()
    }

    fn h() -> Tableau {
        Tableau::from_columns(&["+Z"], &["+X"]).unwrap()
    }

    fn s() -> Tableau {
        Tableau::from_columns(&["+Y"], &["+Z"]).unwrap()
    }

    #[test]
    fn inverse_block_table_matches_symplectic_transpose() {
        // T⁻¹ = Ω Tᵀ Ω on each block.
        for block in 0..16u8 {
            let (px_x, px_z, pz_x, pz_z) = (block & 1, (block >> 1) & 1, (block >> 2) & 1, block >> 3);
            let expected = pz_z | px_z << 1 | pz_x << 2 | px_x << 3;
            assert_eq!(INVERSE_BLOCK_TABLE[block as usize], expected, "block {block}");
        }
    }

    #[test]
    fn identity_tableaus() {
        let t = Tableau::identity(1);
        assert_eq!(t.x_output(0), p("+X"));
        assert_eq!(t.z_output(0), p("+Z"));
        assert!(Tableau::identity(0).validate());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = PauliString::random(7, &mut rng);
        assert_eq!(Tableau::identity(7).conjugate(&q).unwrap(), q);
    }

    #[test]
    fn controlled_y_examples() {
        let t = cy();
        assert!(t.validate());
        assert_eq!(t.conjugate(&p("XY")).unwrap(), p("+X_"));
        assert_eq!(t.conjugate(&p("X_")).unwrap(), p("+XY"));
    }

    #[test]
    fn validate_rejects_commuting_pair() {
        let t = Tableau::from_columns(&["+X"], &["+X"]).unwrap();
        assert!(!t.validate());
        let t = Tableau::from_columns(&["+X_", "+_X"], &["+ZX", "+_Z"]).unwrap();
        assert!(!t.validate());
    }

    #[test]
    fn append_cnot_onto_identity() {
        let mut a = Tableau::identity(2);
        a.inplace_scatter_append(&cx(), &[0, 1]).unwrap();
        assert_eq!(a, cx());
        let mut a = Tableau::identity(3);
        a.inplace_scatter_append(&cx(), &[2, 0]).unwrap();
        assert_eq!(a.x_output(2), p("+X_X"));
        assert_eq!(a.z_output(0), p("+Z_Z"));
    }

    #[test]
    fn append_and_prepend_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Tableau::random(6, &mut rng);
        let b = Tableau::random(3, &mut rng);
        let b_inv = b.inverse().unwrap();
        let mut c = a.clone();
        c.inplace_scatter_append(&b, &[4, 1, 2]).unwrap();
        assert_ne!(c, a);
        c.inplace_scatter_append(&b_inv, &[4, 1, 2]).unwrap();
        assert_eq!(c, a);

        let mut c = a.clone();
        c.inplace_scatter_prepend(&h(), &[3]).unwrap();
        c.inplace_scatter_prepend(&h(), &[3]).unwrap();
        assert_eq!(c, a);

        let mut c = a.clone();
        for _ in 0..4 {
            c.inplace_scatter_prepend(&s(), &[0]).unwrap();
        }
        assert_eq!(c, a);
        let mut c = a.clone();
        c.inplace_scatter_prepend(&Tableau::identity(2), &[0, 5]).unwrap();
        c.inplace_scatter_append(&Tableau::identity(2), &[0, 5]).unwrap();
        assert_eq!(c, a);
    }

    #[test]
    fn scatter_target_errors() {
        let mut a = Tableau::identity(3);
        assert_eq!(
            a.inplace_scatter_append(&cx(), &[1, 1]),
            Err(Error::DuplicateTarget(1))
        );
        assert!(matches!(
            a.inplace_scatter_prepend(&cx(), &[0, 3]),
            Err(Error::QubitOutOfRange { qubit: 3, .. })
        ));
        assert!(a.inplace_scatter_append(&cx(), &[0]).is_err());
    }

    #[test]
    fn prepend_matches_composition_order() {
        // prepend(op) then conjugating P == conjugate by op, then by the old tableau.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let a = Tableau::random(5, &mut rng);
            let op = Tableau::random(2, &mut rng);
            let pp = PauliString::random(5, &mut rng);
            let mut c = a.clone();
            c.inplace_scatter_prepend(&op, &[3, 1]).unwrap();
            let mut step = pp.clone();
            op.conjugate_scattered(&mut step, &[3, 1]).unwrap();
            assert_eq!(c.conjugate(&pp).unwrap(), a.conjugate(&step).unwrap());

            let mut d = a.clone();
            d.inplace_scatter_append(&op, &[3, 1]).unwrap();
            let mut expect = a.conjugate(&pp).unwrap();
            op.conjugate_scattered(&mut expect, &[3, 1]).unwrap();
            assert_eq!(d.conjugate(&pp).unwrap(), expect);
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Tableau::identity(4).inverse().unwrap(), Tableau::identity(4));
        let s_inv = s().inverse().unwrap();
        assert_eq!(s_inv.x_output(0), p("-Y"));
        assert_eq!(s_inv.z_output(0), p("+Z"));
        assert_eq!(s().then(&s_inv).unwrap(), Tableau::identity(1));
        assert_eq!(cy().inverse().unwrap(), cy());
    }

    #[test]
    fn inverse_local_block_example() {
        // T(X_3) has X on qubit 4 and T(Z_3) nothing on qubit 4, so T⁻¹(X_4) is
        // identity on qubit 3 and T⁻¹(Z_4) is Z on qubit 3.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut found = 0;
        while found < 10 {
            let t = Tableau::random(5, &mut rng);
            if t.x_output(3).get(4) != Pauli::X || t.z_output(3).get(4) != Pauli::I {
                continue;
            }
            found += 1;
            let inv = t.inverse().unwrap();
            assert_eq!(inv.x_output(4).get(3), Pauli::I);
            assert_eq!(inv.z_output(4).get(3), Pauli::Z);
        }
    }

    #[test]
    fn random_tableaus_are_valid_and_invertible() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1, 2, 3, 10, 33, 70] {
            for _ in 0..5 {
                let t = Tableau::random(n, &mut rng);
                assert!(t.validate());
                let inv = t.inverse().unwrap();
                assert_eq!(t.then(&inv).unwrap(), Tableau::identity(n));
                assert_eq!(inv.then(&t).unwrap(), Tableau::identity(n));
                assert_eq!(inv.inverse().unwrap(), t);
            }
        }
    }

    #[test]
    fn single_qubit_random_tableaus_cover_24_cliffords() {
        // Brute force: all sign/term assignments of a 1-qubit tableau, keep the valid ones.
        let paulis = ["X", "Y", "Z"];
        let mut all_valid = std::collections::HashSet::new();
        for px in paulis {
            for pz in paulis {
                for sx in ["+", "-"] {
                    for sz in ["+", "-"] {
                        let t = Tableau::from_columns(&[&format!("{sx}{px}")], &[&format!("{sz}{pz}")])
                            .unwrap();
                        if t.validate() {
                            all_valid.insert(t.to_string());
                        }
                    }
                }
            }
        }
        assert_eq!(all_valid.len(), 24);
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..2000 {
            let t = Tableau::random(1, &mut rng);
            assert!(all_valid.contains(&t.to_string()));
            seen.insert(t.to_string());
        }
        assert_eq!(seen, all_valid);
    }

    #[test]
    fn powers_and_algebra_example() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let t = Tableau::random(10, &mut rng);
        let t_inv = t.pow(-1).unwrap();
        assert_eq!(t.then(&t_inv).unwrap(), Tableau::identity(10));
        let big = t.pow(1_000_000).unwrap();
        let half = t_inv.pow(500_000).unwrap();
        assert_eq!(big.then(&half.pow(2).unwrap()).unwrap(), Tableau::identity(10));
        let mut x5 = t.x_output(5);
        x5.signed_mul(&t.z_output(6)).unwrap();
        assert_eq!(t_inv.conjugate(&x5).unwrap(), p("+_____XZ___"));
        assert_eq!(t.pow(0).unwrap(), Tableau::identity(10));
    }

    #[test]
    fn associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = Tableau::random(4, &mut rng);
            let b = Tableau::random(4, &mut rng);
            let c = Tableau::random(4, &mut rng);
            assert_eq!(
                a.then(&b).unwrap().then(&c).unwrap(),
                a.then(&b.then(&c).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn layout_round_trip_and_row_major_appends() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let base = Tableau::random(70, &mut rng);
        let mut t = base.clone();
        t.set_layout(Layout::RowMajor);
        assert_eq!(t, base);
        assert_eq!(t.x_output(5), base.x_output(5));
        t.set_layout(Layout::ColumnMajor);
        assert_eq!(t.xs, base.xs);
        assert_eq!(t.zs, base.zs);

        let h_yz = Tableau::from_columns(&["-X"], &["+Y"]).unwrap();
        let x = Tableau::from_columns(&["+X"], &["-Z"]).unwrap();
        let mut fast = base.clone();
        fast.set_layout(Layout::RowMajor);
        fast.append_cx(3, 64);
        fast.append_h(7);
        fast.append_h_yz(65);
        fast.append_x(0);
        let mut slow = base.clone();
        slow.inplace_scatter_append(&cx(), &[3, 64]).unwrap();
        slow.inplace_scatter_append(&h(), &[7]).unwrap();
        slow.inplace_scatter_append(&h_yz, &[65]).unwrap();
        slow.inplace_scatter_append(&x, &[0]).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn prepend_pauli_flips_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let base = Tableau::random(5, &mut rng);
        for (pauli, text) in [(Pauli::X, "+X"), (Pauli::Y, "+Y"), (Pauli::Z, "+Z")] {
            let op = Tableau::from_columns(
                &[if pauli == Pauli::X { "+X" } else { "-X" }],
                &[if pauli == Pauli::Z { "+Z" } else { "-Z" }],
            )
            .unwrap();
            let mut fast = base.clone();
            fast.prepend_pauli(2, pauli);
            let mut slow = base.clone();
            slow.inplace_scatter_prepend(&op, &[2]).unwrap();
            assert_eq!(fast, slow, "{text}");
        }
    }

    #[test]
    fn expand_keeps_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = Tableau::random(3, &mut rng);
        let mut big = t.clone();
        big.expand(70);
        assert!(big.validate());
        assert_eq!(big.x_output(69), PauliString::single(70, 69, Pauli::X));
        let xo = big.x_output(1);
        for q in 0..3 {
            assert_eq!(xo.get(q), t.x_output(1).get(q));
        }
        assert_eq!(xo.sign, t.x_output(1).sign);
    }

    #[test]
    fn display_lists_generators() {
        assert_eq!(cx().to_string(), "X0 -> +XX\nX1 -> +_X\nZ0 -> +Z_\nZ1 -> +ZZ\n");
    }
}
