//! Minimal binary PGM (P5, 8-bit) reader and writer.
//!
//! The one-time-pad demo encrypts the pixel payload and passes the header
//! through untouched, so parsing is deliberately strict: parse errors report
//! the byte offset at which the file stopped making sense.

use crate::error::{Error, Result};

/// An 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major pixel bytes, `width * height` of them.
    pub payload: Vec<u8>,
}

impl Pgm {
    /// Same header, different pixel payload.
    pub fn with_payload(&self, payload: Vec<u8>) -> Result<Pgm> {
        if payload.len() != self.payload.len() {
            return Err(Error::Pgm {
                offset: 0,
                message: format!(
                    "replacement payload has {} bytes, expected {}",
                    payload.len(),
                    self.payload.len()
                ),
            });
        }
        Ok(Pgm {
            width: self.width,
            height: self.height,
            maxval: self.maxval,
            payload,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        out.extend_from_slice(&self.payload);
        out
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Pgm {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skip whitespace and `#` comment lines between header tokens.
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("digits are ascii")
            .parse()
            .map_err(|_| Error::Pgm {
                offset: start,
                message: format!("{what} out of range"),
            })
    }
}

/// Parse a binary PGM file.
pub fn parse(bytes: &[u8]) -> Result<Pgm> {
    let mut cur = Cursor { bytes, pos: 0 };
    if !bytes.starts_with(b"P5") {
        return Err(cur.error("expected P5 magic"));
    }
    cur.pos = 2;
    let width = cur.read_number("width")?;
    let height = cur.read_number("height")?;
    let maxval = cur.read_number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(cur.error(format!("maxval {maxval} unsupported, need 1..=255")));
    }
    // exactly one whitespace byte separates the header from the pixels
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(cur.error("expected single whitespace before pixel data"));
    }
    cur.pos += 1;
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| cur.error("image dimensions overflow"))?;
    let available = bytes.len() - cur.pos;
    if available < expected {
        return Err(Error::Pgm {
            offset: bytes.len(),
            message: format!("payload truncated: {available} of {expected} pixel bytes"),
        });
    }
    if available > expected {
        return Err(Error::Pgm {
            offset: cur.pos + expected,
            message: format!("{} trailing bytes after pixel data", available - expected),
        });
    }
    Ok(Pgm {
        width,
        height,
        maxval: maxval as u16,
        payload: bytes[cur.pos..].to_vec(),
    })
}
