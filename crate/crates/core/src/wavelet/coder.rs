use super::approx::rearrangement;
use crate::error::{Error, Result};

/// Append-only MSB-first bit buffer.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn push_bits(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    /// Elias gamma code of `x >= 1`: `floor(log2 x)` zeros, then `x` in binary.
    pub fn push_gamma(&mut self, x: u64) {
        assert!(x >= 1, "gamma code needs a positive integer");
        let width = 64 - x.leading_zeros();
        for _ in 1..width {
            self.push_bit(false);
        }
        self.push_bits(x, width);
    }

    pub fn bit_len(&self) -> usize {
        self.len
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    len: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8], bit_len: usize) -> Self {
        BitReader { bytes, pos: 0, len: bit_len.min(bytes.len() * 8) }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.len {
            return Err(Error::format("bit stream exhausted"));
        }
        let b = self.bytes[self.pos / 8] & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_gamma(&mut self) -> Result<u64> {
        let mut zeros = 0;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(Error::format("malformed gamma code"));
            }
        }
        Ok((1u64 << zeros) | self.read_bits(zeros)?)
    }
}

fn zigzag(a: i64) -> u64 {
    ((a << 1) ^ (a >> 63)) as u64
}

fn unzigzag(z: u64) -> i64 {
    ((z >> 1) as i64) ^ -((z & 1) as i64)
}

/// Quantized, entropy-coded coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoded {
    pub bytes: Vec<u8>,
    pub bit_len: usize,
    pub q: f64,
    pub len: usize,
    pub nonzero: usize,
}

/// Uniform quantization `a = trunc(alpha / q)`; nonzero levels are stored as a
/// fixed-width position plus an Elias gamma code of the zigzagged level.
pub fn encode(values: &[f64], q: f64) -> Result<Encoded> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::param(format!("quantization step {q} must be positive")));
    }
    let levels: Vec<(usize, i64)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            let a = (v / q).trunc();
            (a != 0.0).then_some((i, a as i64))
        })
        .collect();
    let max_index = levels.last().map(|l| l.0).unwrap_or(0) as u64;
    let width = (64 - max_index.leading_zeros()).max(1);
    let mut w = BitWriter::new();
    w.push_gamma(values.len() as u64 + 1);
    w.push_gamma(levels.len() as u64 + 1);
    w.push_gamma(width as u64);
    w.push_bits(q.to_bits(), 64);
    for &(i, a) in &levels {
        w.push_bits(i as u64, width);
        w.push_gamma(zigzag(a) + 1);
    }
    let bit_len = w.bit_len();
    Ok(Encoded { bytes: w.into_bytes(), bit_len, q, len: values.len(), nonzero: levels.len() })
}

pub fn decode(e: &Encoded) -> Result<Vec<f64>> {
    let mut r = BitReader::new(&e.bytes, e.bit_len);
    let len = (r.read_gamma()? - 1) as usize;
    let count = (r.read_gamma()? - 1) as usize;
    let width = r.read_gamma()? as u32;
    let q = f64::from_bits(r.read_bits(64)?);
    if count > len {
        return Err(Error::format("more levels than coefficients"));
    }
    let mut out = vec![0.0; len];
    for _ in 0..count {
        let i = r.read_bits(width)? as usize;
        let a = unzigzag(r.read_gamma()? - 1);
        *out.get_mut(i).ok_or_else(|| Error::format("position out of range"))? = q * a as f64;
    }
    Ok(out)
}

/// Coding of a coefficient vector to a prescribed `l^2` tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Compressed {
    /// Number of terms whose tail energy is at most `(eps/2)^2`.
    pub m: usize,
    pub q: f64,
    pub encoded: Encoded,
    /// Achieved `l^2` reconstruction error.
    pub error: f64,
}

impl Compressed {
    pub fn bits(&self) -> usize {
        self.encoded.bit_len
    }
}

/// Chooses `M(eps)` so the discarded tail is at most `eps/2`, quantizes with
/// `q = eps / (2 sqrt M)` and codes the result; the error is at most `eps`.
pub fn compress_to_tolerance(values: &[f64], eps: f64) -> Result<Compressed> {
    if !(eps > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }
    let r = rearrangement(values);
    let target = (eps / 2.0).powi(2);
    let mut tail: f64 = r.iter().map(|v| v * v).sum();
    let mut m = 0;
    while m < r.len() && tail > target {
        tail -= r[m] * r[m];
        m += 1;
    }
    let q = eps / (2.0 * (m.max(1) as f64).sqrt());
    let encoded = encode(values, q)?;
    let rec = decode(&encoded)?;
    let error = values.iter().zip(&rec).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    Ok(Compressed { m, q, encoded, error })
}
