//! 8-bit PGM (Netpbm graymap) reading and writing.
//!
//! Reads binary (`P5`) and plain (`P2`) files with `maxval <= 255`; samples
//! are rescaled to `[0, 255]` when `maxval` is smaller. Writes `P5` with
//! `maxval = 255`, clamping each value to `[0, 255]` and rounding half-up.
//! The raster is row-major on disk and column-major in memory.

use std::fs;
use std::path::Path;

use thiserror::Error;
use tvadal_core::Image;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("not a PGM file: bad magic number at byte {offset}")]
    BadMagic { offset: usize },

    #[error("malformed header at byte {offset}: {reason}")]
    Header { offset: usize, reason: &'static str },

    #[error("unsupported maxval {maxval} at byte {offset}")]
    UnsupportedMaxval { maxval: u32, offset: usize },

    #[error("truncated raster at byte {offset}: expected {expected} samples, found {found}")]
    Truncated {
        offset: usize,
        expected: usize,
        found: usize,
    },

    #[error("sample {value} exceeds maxval {maxval} at byte {offset}")]
    SampleOutOfRange { value: u32, maxval: u32, offset: usize },

    #[error(transparent)]
    Image(#[from] tvadal_core::Error),
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads an unsigned decimal token; `None` if no digit is present.
    fn number(&mut self) -> Option<Result<u32, usize>> {
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&c) = self.bytes.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            value = match value.checked_mul(10).and_then(|v| v.checked_add((c - b'0') as u32)) {
                Some(v) => v,
                None => return Some(Err(start)),
            };
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(Ok(value))
        }
    }

    fn header_field(&mut self, what: &'static str) -> Result<u32, PgmError> {
        self.skip_whitespace_and_comments();
        let offset = self.pos;
        match self.number() {
            Some(Ok(v)) => Ok(v),
            Some(Err(offset)) => Err(PgmError::Header {
                offset,
                reason: "numeric field overflows",
            }),
            None => Err(PgmError::Header { offset, reason: what }),
        }
    }
}

/// Parses a PGM file held in memory.
pub fn parse_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let plain = match bytes.get(..2) {
        Some(b"P5") => false,
        Some(b"P2") => true,
        _ => return Err(PgmError::BadMagic { offset: 0 }),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    match cur.bytes.get(cur.pos) {
        Some(c) if c.is_ascii_whitespace() || *c == b'#' => {}
        _ => {
            return Err(PgmError::Header {
                offset: cur.pos,
                reason: "expected whitespace after magic number",
            })
        }
    }
    let width = cur.header_field("expected width")?;
    let height = cur.header_field("expected height")?;
    let maxval_offset = {
        cur.skip_whitespace_and_comments();
        cur.pos
    };
    let maxval = cur.header_field("expected maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::UnsupportedMaxval {
            maxval,
            offset: maxval_offset,
        });
    }
    if width == 0 || height == 0 {
        return Err(PgmError::Header {
            offset: maxval_offset,
            reason: "width and height must be positive",
        });
    }
    let (cols, rows) = (width as usize, height as usize);
    let expected = rows * cols;

    let mut raster = Vec::with_capacity(expected);
    if plain {
        for found in 0..expected {
            cur.skip_whitespace_and_comments();
            let offset = cur.pos;
            let value = match cur.number() {
                Some(Ok(v)) => v,
                Some(Err(offset)) => return Err(PgmError::SampleOutOfRange { value: u32::MAX, maxval, offset }),
                None if offset >= bytes.len() => {
                    return Err(PgmError::Truncated { offset, expected, found })
                }
                None => {
                    return Err(PgmError::Header {
                        offset,
                        reason: "expected a decimal sample",
                    })
                }
            };
            if value > maxval {
                return Err(PgmError::SampleOutOfRange { value, maxval, offset });
            }
            raster.push(value);
        }
    } else {
        // exactly one whitespace byte separates maxval from the raster
        match bytes.get(cur.pos) {
            Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
            _ => {
                return Err(PgmError::Header {
                    offset: cur.pos,
                    reason: "expected whitespace after maxval",
                })
            }
        }
        let data = &bytes[cur.pos..];
        if data.len() < expected {
            return Err(PgmError::Truncated {
                offset: bytes.len(),
                expected,
                found: data.len(),
            });
        }
        for (k, &b) in data[..expected].iter().enumerate() {
            if b as u32 > maxval {
                return Err(PgmError::SampleOutOfRange {
                    value: b as u32,
                    maxval,
                    offset: cur.pos + k,
                });
            }
            raster.push(b as u32);
        }
    }

    let scale = 255.0 / maxval as f64;
    let values: Vec<f64> = raster
        .into_iter()
        .map(|v| if maxval == 255 { v as f64 } else { v as f64 * scale })
        .collect();
    Ok(Image::from_row_major(rows, cols, &values)?)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image, PgmError> {
    parse_pgm(&fs::read(path)?)
}

/// Clamp to `[0, 255]`, then round half-up. NaN maps to 0.
pub fn quantize(value: f64) -> u8 {
    if value.is_nan() {
        return 0;
    }
    (value.clamp(0.0, 255.0) + 0.5).floor().min(255.0) as u8
}

/// Encodes `img` as a binary `P5` file with `maxval = 255`.
pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.cols(), img.rows());
    let mut out = Vec::with_capacity(header.len() + img.data().len());
    out.extend_from_slice(header.as_bytes());
    out.extend(img.to_row_major().into_iter().map(quantize));
    out
}

pub fn write_pgm(img: &Image, path: impl AsRef<Path>) -> Result<(), PgmError> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}
