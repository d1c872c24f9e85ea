//! Binary PGM (`P5`) with 8-bit or big-endian 16-bit samples.
//!
//! Samples map to intensities as `sample / maxval`; writing uses
//! `round(clamp(v, 0, 1) * maxval)` with halves rounded away from zero.

use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::{Signal, Topology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

impl PgmImage {
    pub fn from_signal(signal: &Signal, maxval: u16) -> Result<Self> {
        check_maxval(maxval).map_err(|m| Error::param("maxval", m))?;
        let grid = signal
            .topology()
            .as_grid()
            .ok_or_else(|| Error::Unsupported("PGM output needs a grid signal".into()))?;
        let scale = f64::from(maxval);
        let samples = signal
            .values()
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * scale).round() as u16)
            .collect();
        Ok(Self {
            width: grid.cols(),
            height: grid.rows(),
            maxval,
            samples,
        })
    }

    pub fn to_signal(&self) -> Result<Signal> {
        let scale = f64::from(self.maxval);
        let values = self.samples.iter().map(|&s| f64::from(s) / scale).collect();
        Signal::new(Topology::grid(self.height, self.width)?, values)
    }
}

fn check_maxval(maxval: u16) -> std::result::Result<(), String> {
    match maxval {
        255 | 65535 => Ok(()),
        other => Err(format!("unsupported maxval {other}, expected 255 or 65535")),
    }
}

/// Parses a complete `P5` file. `path` only labels error messages.
pub fn decode_pgm(bytes: &[u8], path: &Path) -> Result<PgmImage> {
    let fail = |line: usize, message: String| Error::Format {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut pos = 0;
    let mut line = 1;
    // Reads one whitespace-delimited header token, skipping `#` comments.
    let mut token = |what: &str| -> Result<(String, usize)> {
        loop {
            match bytes.get(pos) {
                None => {
                    return Err(fail(
                        line,
                        format!("unexpected end of header, missing {what}"),
                    ))
                }
                Some(b'#') => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => {
                    if *b == b'\n' {
                        line += 1;
                    }
                    pos += 1;
                }
                Some(_) => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        let text = String::from_utf8_lossy(&bytes[start..pos]).into_owned();
        Ok((text, line))
    };

    let (magic, l) = token("magic number")?;
    if magic != "P5" {
        return Err(fail(l, format!("expected magic `P5`, found `{magic}`")));
    }
    let mut number = |what: &str| -> Result<usize> {
        let (text, l) = token(what)?;
        text.parse::<usize>()
            .map_err(|_| fail(l, format!("invalid {what} `{text}`")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval_raw = number("maxval")?;
    let header_line = line;
    if width == 0 || height == 0 {
        return Err(fail(header_line, format!("empty image {width}x{height}")));
    }
    let maxval = u16::try_from(maxval_raw)
        .map_err(|_| fail(header_line, format!("unsupported maxval {maxval_raw}")))?;
    check_maxval(maxval).map_err(|m| fail(header_line, m))?;

    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(fail(header_line, "missing whitespace after maxval".into())),
    }

    let bytes_per_sample = if maxval > 255 { 2 } else { 1 };
    let count = width
        .checked_mul(height)
        .ok_or_else(|| fail(header_line, "image dimensions overflow".into()))?;
    let expected = count * bytes_per_sample;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(fail(
            header_line,
            format!(
                "truncated payload: expected {expected} bytes, found {}",
                payload.len()
            ),
        ));
    }
    if payload.len() > expected {
        return Err(fail(
            header_line,
            format!(
                "{} trailing bytes after {expected}-byte payload",
                payload.len() - expected
            ),
        ));
    }

    let samples: Vec<u16> = if bytes_per_sample == 1 {
        payload.iter().map(|&b| u16::from(b)).collect()
    } else {
        payload
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    if let Some(k) = samples.iter().position(|&s| s > maxval) {
        return Err(fail(
            header_line,
            format!("sample {k} = {} exceeds maxval {maxval}", samples[k]),
        ));
    }
    Ok(PgmImage {
        width,
        height,
        maxval,
        samples,
    })
}

pub fn encode_pgm(image: &PgmImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n{}\n", image.width, image.height, image.maxval).into_bytes();
    if image.maxval > 255 {
        out.reserve(2 * image.samples.len());
        for s in &image.samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        out.extend(image.samples.iter().map(|&s| s as u8));
    }
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes, path)?.to_signal()
}

pub fn write_pgm(path: impl AsRef<Path>, signal: &Signal, maxval: u16) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_pgm(&PgmImage::from_signal(signal, maxval)?);
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
