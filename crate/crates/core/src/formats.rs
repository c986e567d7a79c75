//! Sample tables and their output formats.
//!
//! - `01`: one ASCII `0`/`1` per result, newline after each shot.
//! - `b8`: results packed LSB-first into bytes, last byte zero-padded, no
//!   separators.
//! - `hits`: ascending indices of set bits, comma separated, newline after
//!   each shot (an empty line when nothing is set).
//! - `r8`: one byte per run of zeros. A byte `k < 255` means `k` zeros then a
//!   one; `255` means 255 zeros and no one. Each shot ends with a virtual one
//!   at index `num_results` which is encoded but not part of the data.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::bits::{self, BitTable};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Zero1,
    B8,
    Hits,
    R8,
}

impl OutputFormat {
    pub const ALL: [OutputFormat; 4] = [
        OutputFormat::Zero1,
        OutputFormat::B8,
        OutputFormat::Hits,
        OutputFormat::R8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Zero1 => "01",
            OutputFormat::B8 => "b8",
            OutputFormat::Hits => "hits",
            OutputFormat::R8 => "r8",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OutputFormat::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Format {
                format: "output format",
                message: format!("unknown format '{s}', expected 01, b8, hits or r8"),
            })
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Shot-major table of result bits.
#[derive(Clone, PartialEq, Eq)]
pub struct SampleTable {
    bits: BitTable,
}

impl SampleTable {
    pub fn zeros(num_shots: usize, num_results: usize) -> Self {
        SampleTable {
            bits: BitTable::zeros(num_shots, num_results),
        }
    }

    pub fn from_table(bits: BitTable) -> Self {
        SampleTable { bits }
    }

    pub fn from_shots(shots: &[Vec<bool>], num_results: usize) -> Self {
        let mut t = SampleTable::zeros(shots.len(), num_results);
        for (s, shot) in shots.iter().enumerate() {
            assert_eq!(shot.len(), num_results);
            for (r, &b) in shot.iter().enumerate() {
                t.set(s, r, b);
            }
        }
        t
    }

    pub fn num_shots(&self) -> usize {
        self.bits.num_major()
    }

    pub fn num_results(&self) -> usize {
        self.bits.num_minor()
    }

    pub fn get(&self, shot: usize, result: usize) -> bool {
        self.bits.get(shot, result)
    }

    pub fn set(&mut self, shot: usize, result: usize, value: bool) {
        self.bits.set(shot, result, value)
    }

    pub fn shot_words(&self, shot: usize) -> &[u64] {
        self.bits.row(shot)
    }

    pub fn shot(&self, shot: usize) -> Vec<bool> {
        (0..self.num_results()).map(|r| self.get(shot, r)).collect()
    }

    pub fn table(&self) -> &BitTable {
        &self.bits
    }

    pub fn into_table(self) -> BitTable {
        self.bits
    }

    /// Appends the shots of `other`, which must have the same width.
    pub fn extend(&mut self, other: &SampleTable) {
        assert_eq!(self.num_results(), other.num_results());
        let mut merged = BitTable::zeros(self.num_shots() + other.num_shots(), self.num_results());
        let n = self.num_shots();
        for s in 0..n {
            merged.row_mut(s).copy_from_slice(self.bits.row(s));
        }
        for s in 0..other.num_shots() {
            merged.row_mut(n + s).copy_from_slice(other.bits.row(s));
        }
        self.bits = merged;
    }

    pub fn write<W: Write + ?Sized>(&self, format: OutputFormat, out: &mut W) -> std::io::Result<()> {
        let mut buf = Vec::new();
        for s in 0..self.num_shots() {
            buf.clear();
            self.encode_shot(s, format, &mut buf);
            out.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self, format: OutputFormat) -> Vec<u8> {
        let mut out = Vec::new();
        self.write(format, &mut out).expect("writing to a Vec cannot fail");
        out
    }

    fn encode_shot(&self, s: usize, format: OutputFormat, out: &mut Vec<u8>) {
        let n = self.num_results();
        let row = self.bits.row(s);
        match format {
            OutputFormat::Zero1 => {
                out.extend((0..n).map(|r| if bits::get_bit(row, r) { b'1' } else { b'0' }));
                out.push(b'\n');
            }
            OutputFormat::B8 => {
                let bytes = n.div_ceil(8);
                for k in 0..bytes {
                    out.push((row[k / 8] >> (8 * (k % 8))) as u8);
                }
            }
            OutputFormat::Hits => {
                let mut first = true;
                for r in bits::iter_ones(row) {
                    if !first {
                        out.push(b',');
                    }
                    first = false;
                    out.extend_from_slice(r.to_string().as_bytes());
                }
                out.push(b'\n');
            }
            OutputFormat::R8 => {
                let mut prev = 0usize;
                for one in bits::iter_ones(row).chain(std::iter::once(n)) {
                    let mut gap = one - prev;
                    while gap >= 255 {
                        out.push(255);
                        gap -= 255;
                    }
                    out.push(gap as u8);
                    prev = one + 1;
                }
            }
        }
    }

    /// Parses data written by [`SampleTable::write`].
    pub fn read(data: &[u8], format: OutputFormat, num_results: usize) -> Result<SampleTable> {
        let err = |message: String| Error::Format {
            format: format.name(),
            message,
        };
        let mut shots: Vec<Vec<usize>> = Vec::new();
        match format {
            OutputFormat::Zero1 | OutputFormat::Hits => {
                if !data.is_empty() && *data.last().unwrap() != b'\n' {
                    return Err(err("missing trailing newline".into()));
                }
                for line in data.split(|&b| b == b'\n').take(data.iter().filter(|&&b| b == b'\n').count()) {
                    let ones = if format == OutputFormat::Zero1 {
                        if line.len() != num_results {
                            return Err(err(format!("shot has {} results, expected {num_results}", line.len())));
                        }
                        let mut ones = Vec::new();
                        for (r, &c) in line.iter().enumerate() {
                            match c {
                                b'0' => {}
                                b'1' => ones.push(r),
                                _ => return Err(err(format!("unexpected byte {c:#04x}"))),
                            }
                        }
                        ones
                    } else if line.is_empty() {
                        Vec::new()
                    } else {
                        let text = std::str::from_utf8(line).map_err(|e| err(e.to_string()))?;
                        text.split(',')
                            .map(|t| {
                                t.parse::<usize>()
                                    .ok()
                                    .filter(|&r| r < num_results)
                                    .ok_or_else(|| err(format!("bad index '{t}'")))
                            })
                            .collect::<Result<Vec<_>>>()?
                    };
                    shots.push(ones);
                }
            }
            OutputFormat::B8 => {
                let per_shot = num_results.div_ceil(8);
                if per_shot == 0 {
                    return Err(err("cannot delimit shots with zero results".into()));
                }
                if !data.len().is_multiple_of(per_shot) {
                    return Err(err(format!("{} bytes is not a multiple of {per_shot}", data.len())));
                }
                for chunk in data.chunks(per_shot) {
                    let mut ones = Vec::new();
                    for (k, &byte) in chunk.iter().enumerate() {
                        for b in 0..8 {
                            if byte >> b & 1 == 1 {
                                let r = 8 * k + b;
                                if r >= num_results {
                                    return Err(err("nonzero padding bit".into()));
                                }
                                ones.push(r);
                            }
                        }
                    }
                    shots.push(ones);
                }
            }
            OutputFormat::R8 => {
                let mut pos = 0usize;
                let mut ones = Vec::new();
                for &byte in data {
                    pos += byte as usize;
                    if byte == 255 {
                        continue;
                    }
                    if pos == num_results {
                        shots.push(std::mem::take(&mut ones));
                        pos = 0;
                    } else if pos < num_results {
                        ones.push(pos);
                        pos += 1;
                    } else {
                        return Err(err("gap runs past the end of the shot".into()));
                    }
                }
                if pos != 0 || !ones.is_empty() {
                    return Err(err("truncated shot".into()));
                }
            }
        }
        let mut t = SampleTable::zeros(shots.len(), num_results);
        for (s, ones) in shots.iter().enumerate() {
            for &r in ones {
                t.set(s, r, true);
            }
        }
        Ok(t)
    }
}

impl fmt::Debug for SampleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SampleTable({} shots x {} results)", self.num_shots(), self.num_results())?;
        f.write_str(&String::from_utf8_lossy(&self.to_bytes(OutputFormat::Zero1)))
    }
}

/// XORs measurement rows into detector rows. `flips` is measurement-major
/// (one row per measurement, one column per shot); the result is
/// detector-major with the same columns.
pub fn detector_rows(flips: &BitTable, detectors: &[Vec<usize>]) -> Result<BitTable> {
    let mut out = BitTable::zeros(detectors.len(), flips.num_minor());
    for (d, members) in detectors.iter().enumerate() {
        let row = out.row_mut(d);
        for &m in members {
            if m >= flips.num_major() {
                return Err(Error::BadLookback { lookback: m });
            }
            bits::xor_words(row, flips.row(m));
        }
    }
    Ok(out)
}

/// Detection events for shot-major measurement flips. Each detector lists
/// absolute measurement indices.
pub fn detector_events(flips: &SampleTable, detectors: &[Vec<usize>]) -> Result<SampleTable> {
    let by_measurement = flips.table().transposed();
    let rows = detector_rows(&by_measurement, detectors)?;
    let shots = rows.transposed();
    Ok(SampleTable::from_table(shots))
}
