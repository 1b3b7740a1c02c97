//! Netpbm graymap/pixmap codec (P2, P3, P5, P6).
//!
//! Decoding accepts maxval 255 or 65535 and normalizes by maxval. Encoding
//! always writes maxval 255.

use super::{quantize_u8, Raster};
use crate::error::{Error, Result};

/// The four supported Netpbm variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnmKind {
    /// P2: ASCII graymap.
    PlainGray,
    /// P3: ASCII pixmap.
    PlainRgb,
    /// P5: binary graymap.
    RawGray,
    /// P6: binary pixmap.
    RawRgb,
}

impl PnmKind {
    fn from_magic(magic: &[u8]) -> Option<Self> {
        match magic {
            b"P2" => Some(Self::PlainGray),
            b"P3" => Some(Self::PlainRgb),
            b"P5" => Some(Self::RawGray),
            b"P6" => Some(Self::RawRgb),
            _ => None,
        }
    }

    /// Chooses the variant for a raster of `channels` samples per pixel.
    pub fn for_channels(channels: usize, binary: bool) -> Self {
        match (channels, binary) {
            (1, false) => Self::PlainGray,
            (1, true) => Self::RawGray,
            (_, false) => Self::PlainRgb,
            (_, true) => Self::RawRgb,
        }
    }

    pub fn magic(self) -> &'static str {
        match self {
            Self::PlainGray => "P2",
            Self::PlainRgb => "P3",
            Self::RawGray => "P5",
            Self::RawRgb => "P6",
        }
    }

    pub fn channels(self) -> usize {
        match self {
            Self::PlainGray | Self::RawGray => 1,
            Self::PlainRgb | Self::RawRgb => 3,
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, Self::RawGray | Self::RawRgb)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments that run to end of line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn unsigned(&mut self, what: &str) -> Result<u64> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or_else(|| self.err(format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.bytes.get(self.pos) {
                None => self.err(format!("unexpected end of data, expected {what}")),
                Some(_) => self.err(format!("expected {what}")),
            });
        }
        Ok(value)
    }
}

/// Decodes a P2/P3/P5/P6 image into a normalized raster.
pub fn load_pnm(bytes: &[u8]) -> Result<Raster> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = bytes
        .get(0..2)
        .ok_or_else(|| cur.err("missing magic number"))?;
    let kind = PnmKind::from_magic(magic).ok_or_else(|| {
        if magic.first() == Some(&b'P') {
            Error::UnsupportedFormat(format!(
                "netpbm variant {} is not supported",
                String::from_utf8_lossy(magic)
            ))
        } else {
            cur.err("not a PNM file (bad magic)")
        }
    })?;
    cur.pos = 2;
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        _ => return Err(cur.err("expected whitespace after magic number")),
    }

    let width = cur.unsigned("width")? as usize;
    let height = cur.unsigned("height")? as usize;
    if width == 0 || height == 0 {
        return Err(cur.err(format!("zero dimension {width}x{height}")));
    }
    let maxval_at = cur.pos;
    let maxval = cur.unsigned("maxval")?;
    if maxval != 255 && maxval != 65535 {
        return Err(Error::UnsupportedFormat(format!(
            "maxval {maxval} at byte {maxval_at}; only 255 and 65535 are accepted"
        )));
    }
    let channels = kind.channels();
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| cur.err("image dimensions overflow"))?;
    let scale = maxval as f64;

    let mut data = Vec::with_capacity(count.min(1 << 24));
    if kind.is_binary() {
        // exactly one whitespace byte separates the header from the payload
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            Some(_) => return Err(cur.err("expected single whitespace before raster data")),
            None => return Err(cur.err("truncated: no raster data")),
        }
        let sample_bytes = if maxval > 255 { 2 } else { 1 };
        let needed = count * sample_bytes;
        let payload = &bytes[cur.pos..];
        if payload.len() < needed {
            return Err(Error::Parse {
                offset: bytes.len(),
                message: format!(
                    "truncated payload: need {needed} bytes, found {}",
                    payload.len()
                ),
            });
        }
        if sample_bytes == 1 {
            data.extend(payload[..needed].iter().map(|&b| f64::from(b) / scale));
        } else {
            for (i, pair) in payload[..needed].chunks_exact(2).enumerate() {
                let v = u16::from_be_bytes([pair[0], pair[1]]);
                if u64::from(v) > maxval {
                    return Err(Error::Parse {
                        offset: cur.pos + 2 * i,
                        message: format!("sample {v} exceeds maxval {maxval}"),
                    });
                }
                data.push(f64::from(v) / scale);
            }
        }
    } else {
        for _ in 0..count {
            cur.skip_separators();
            let at = cur.pos;
            let v = cur.unsigned("sample")?;
            if v > maxval {
                return Err(Error::Parse {
                    offset: at,
                    message: format!("sample {v} exceeds maxval {maxval}"),
                });
            }
            data.push(v as f64 / scale);
        }
    }
    Raster::new(width, height, channels, data)
}

/// Encodes with maxval 255; `binary` selects P5/P6 over P2/P3.
pub fn save_pnm(img: &Raster, binary: bool) -> Vec<u8> {
    let kind = PnmKind::for_channels(img.channels(), binary);
    let mut out = format!("{}\n{} {}\n255\n", kind.magic(), img.width(), img.height()).into_bytes();
    if binary {
        out.extend(img.data().iter().map(|&v| quantize_u8(v)));
        return out;
    }
    // plain format: one raster row per line group, lines kept within 70 columns
    for y in 0..img.height() {
        let mut line_len = 0;
        for &v in img.row(y) {
            let token = quantize_u8(v).to_string();
            if line_len > 0 {
                if line_len + 1 + token.len() > 70 {
                    out.push(b'\n');
                    line_len = 0;
                } else {
                    out.push(b' ');
                    line_len += 1;
                }
            }
            out.extend_from_slice(token.as_bytes());
            line_len += token.len();
        }
        out.push(b'\n');
    }
    out
}
