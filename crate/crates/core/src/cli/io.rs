//! On-disk formats: 8-bit PGM, raw `GMA1` images, coefficient files with a
//! JSON sidecar, quantized codes, point and report CSVs.

use crate::betascan::PointCloud;
use crate::error::{Error, Result};
use crate::frame::{Block, CoeffSet, TransformKind};
use crate::grid::{check_side, Image};
use crate::wavelet::Encoded;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub const RAW_MAGIC: &[u8; 4] = b"GMA1";
pub const CODE_MAGIC: &[u8; 4] = b"GMQ1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::Missing(path.display().to_string()),
        _ => Error::Io(e),
    })
}

/// Writes through a temporary sibling so a failed run leaves no partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn pgm_tokens(bytes: &[u8], count: usize) -> Result<(Vec<usize>, usize)> {
    let mut out = Vec::with_capacity(count);
    let mut i = 2;
    while out.len() < count {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'#') {
            if bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(Error::format("truncated PGM header"));
        }
        let s = std::str::from_utf8(&bytes[start..i]).map_err(|_| Error::format("bad PGM header"))?;
        out.push(s.parse().map_err(|_| Error::format("bad PGM header"))?);
    }
    // exactly one whitespace byte separates the header from the raster
    if i >= bytes.len() || !bytes[i].is_ascii_whitespace() {
        return Err(Error::format("truncated PGM header"));
    }
    Ok((out, i + 1))
}

/// Binary 8-bit PGM (`P5`) mapped to `[0, 1]`.
pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::format("not a binary PGM (P5)"));
    }
    let (h, at) = pgm_tokens(bytes, 3)?;
    let (w, rows, maxval) = (h[0], h[1], h[2]);
    if maxval == 0 || maxval > 255 {
        return Err(Error::format(format!("maxval {maxval} is not 8-bit")));
    }
    if bytes.len() - at != w * rows {
        return Err(Error::format(format!("expected {} raster bytes, found {}", w * rows, bytes.len() - at)));
    }
    if w != rows {
        return Err(Error::size(format!("image is {w}x{rows}, not square")));
    }
    check_side(w)?;
    let scale = maxval as f64;
    Image::from_vec(w, bytes[at..].iter().map(|&b| (b as f64 / scale).min(1.0)).collect())
}

/// Values are clamped to `[0, 1]` and rounded to 8 bits.
pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let n = img.n();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend(img.data().iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

/// `GMA1`, side as `u32` LE, then `n^2` row-major `f64` LE.
pub fn decode_raw(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 8 || &bytes[..4] != RAW_MAGIC {
        return Err(Error::format("missing GMA1 magic"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != n * n * 8 {
        return Err(Error::format(format!("expected {} payload bytes for side {n}, found {}", n * n * 8, body.len())));
    }
    check_side(n)?;
    Image::from_vec(n, body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

pub fn encode_raw(img: &Image) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + img.data().len() * 8);
    out.extend_from_slice(RAW_MAGIC);
    out.extend_from_slice(&(img.n() as u32).to_le_bytes());
    for v in img.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Sniffs the magic bytes.
pub fn decode_image(bytes: &[u8]) -> Result<Image> {
    if bytes.starts_with(b"P5") {
        decode_pgm(bytes)
    } else if bytes.starts_with(RAW_MAGIC) {
        decode_raw(bytes)
    } else {
        Err(Error::format("unrecognised image format (expected P5 PGM or GMA1 raw)"))
    }
}

/// `.pgm` paths get PGM, everything else raw.
pub fn encode_image_for(path: &Path, img: &Image) -> Vec<u8> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("pgm") => encode_pgm(img),
        _ => encode_raw(img),
    }
}

/// Sidecar of a coefficient file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffMeta {
    pub format: String,
    pub transform: TransformKind,
    pub n: usize,
    pub len: usize,
    pub blocks: Vec<Block>,
    /// Frame bounds `(A, B)`; every transform here is tight with `A = B = 1`.
    pub frame_bounds: (f64, f64),
    pub parseval_ratio: f64,
    pub source_sha256: String,
    pub payload_sha256: String,
    pub config: serde_json::Value,
}

pub const COEFF_FORMAT: &str = "gma-coeffs-f64le-v1";

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Payload of little-endian `f64` plus `<path>.json`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffFile {
    pub coeffs: CoeffSet,
    pub meta: CoeffMeta,
}

impl CoeffFile {
    pub fn new(transform: TransformKind, coeffs: CoeffSet, parseval_ratio: f64, source_sha256: String, config: serde_json::Value) -> Self {
        let payload = Self::payload(&coeffs);
        let meta = CoeffMeta {
            format: COEFF_FORMAT.into(),
            transform,
            n: coeffs.n,
            len: coeffs.len(),
            blocks: coeffs.blocks.clone(),
            frame_bounds: (1.0, 1.0),
            parseval_ratio,
            source_sha256,
            payload_sha256: sha256_hex(&payload),
            config,
        };
        CoeffFile { coeffs, meta }
    }

    fn payload(c: &CoeffSet) -> Vec<u8> {
        c.values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let side = serde_json::to_vec_pretty(&self.meta).map_err(|e| Error::format(e))?;
        write_atomic(path, &Self::payload(&self.coeffs))?;
        write_atomic(&sidecar_path(path), &side)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let payload = read_input(path)?;
        let side = read_input(&sidecar_path(path))?;
        let meta: CoeffMeta = serde_json::from_slice(&side).map_err(|e| Error::format(format!("sidecar: {e}")))?;
        if meta.format != COEFF_FORMAT {
            return Err(Error::format(format!("unknown coefficient format '{}'", meta.format)));
        }
        if payload.len() != meta.len * 8 {
            return Err(Error::format(format!("payload has {} bytes, sidecar promises {}", payload.len(), meta.len * 8)));
        }
        if sha256_hex(&payload) != meta.payload_sha256 {
            return Err(Error::format("payload checksum mismatch"));
        }
        let values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(CoeffFile { coeffs: CoeffSet { n: meta.n, values, blocks: meta.blocks.clone() }, meta })
    }
}

/// `GMQ1`, side `u32`, coefficient count `u64`, nonzeros `u64`, bit length
/// `u64`, quantum `f64`, then the packed bits. All integers LE.
pub fn encode_code(n: usize, e: &Encoded) -> Vec<u8> {
    let mut out = Vec::with_capacity(40 + e.bytes.len());
    out.extend_from_slice(CODE_MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(e.len as u64).to_le_bytes());
    out.extend_from_slice(&(e.nonzero as u64).to_le_bytes());
    out.extend_from_slice(&(e.bit_len as u64).to_le_bytes());
    out.extend_from_slice(&e.q.to_le_bytes());
    out.extend_from_slice(&e.bytes);
    out
}

pub fn decode_code(bytes: &[u8]) -> Result<(usize, Encoded)> {
    if bytes.len() < 40 || &bytes[..4] != CODE_MAGIC {
        return Err(Error::format("missing GMQ1 magic"));
    }
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let (len, nonzero, bit_len) = (u64_at(8) as usize, u64_at(16) as usize, u64_at(24) as usize);
    let q = f64::from_le_bytes(bytes[32..40].try_into().unwrap());
    let body = bytes[40..].to_vec();
    if body.len() != bit_len.div_ceil(8) {
        return Err(Error::format("code length does not match its header"));
    }
    Ok((n, Encoded { bytes: body, bit_len, q, len, nonzero }))
}

/// Two numeric columns, optional header row, `#` comments. Points outside
/// the unit square are rejected.
pub fn parse_points(bytes: &[u8]) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).flexible(true).from_reader(bytes);
    let mut pts = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("row {} has {} columns, expected 2", i + 1, rec.len())));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)) {
                    return Err(Error::Parse(format!("row {}: ({x}, {y}) lies outside [0,1]^2", i + 1)));
                }
                pts.push((x, y));
            }
            _ if i == 0 && pts.is_empty() => continue,
            _ => return Err(Error::Parse(format!("row {}: non-numeric value", i + 1))),
        }
    }
    PointCloud::new(pts)
}

/// Header, rows, then a trailing `#` block with the run metadata.
pub fn csv_report(header: &[&str], rows: &[Vec<String>], trailer: &[(String, String)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::format(e))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::format(e))?;
    }
    let mut out = w.into_inner().map_err(|e| Error::format(e))?;
    for (k, v) in trailer {
        out.extend_from_slice(format!("# {k}={v}\n").as_bytes());
    }
    Ok(out)
}
