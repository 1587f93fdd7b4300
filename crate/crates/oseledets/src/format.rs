//! Binary cocycle files.
//!
//! ```text
//! OSLC1\n
//! d=<d> n0=<n0> count=<L>\n
//! <L·d·d little-endian f64, matrices in time order, each row-major>
//! ```

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use oseledets_core::{CocycleWindow, DMatrix};

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8] = b"OSLC1\n";

pub fn write_cocycle<W: Write>(out: &mut W, window: &CocycleWindow) -> io::Result<()> {
    let d = window.dim();
    out.write_all(MAGIC)?;
    writeln!(out, "d={} n0={} count={}", d, window.start(), window.len())?;
    let mut buf = Vec::with_capacity(8 * d * d * window.len());
    for m in window.matrices() {
        for r in 0..d {
            for c in 0..d {
                buf.extend_from_slice(&m[(r, c)].to_le_bytes());
            }
        }
    }
    out.write_all(&buf)
}

fn header_field<'a>(field: Option<&'a str>, key: &str) -> Result<&'a str, String> {
    field
        .and_then(|f| f.strip_prefix(key))
        .and_then(|f| f.strip_prefix('='))
        .ok_or_else(|| format!("header is missing `{key}=`"))
}

/// Parses a whole file image.
pub fn parse_cocycle(bytes: &[u8]) -> Result<CocycleWindow, String> {
    let rest = bytes
        .strip_prefix(MAGIC)
        .ok_or("not a cocycle file (bad magic)")?;
    let eol = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or("header line is not terminated")?;
    let header = std::str::from_utf8(&rest[..eol]).map_err(|_| "header is not ASCII")?;
    let mut fields = header.split(' ');
    let d: usize = header_field(fields.next(), "d")?
        .parse()
        .map_err(|_| "bad dimension")?;
    let n0: i64 = header_field(fields.next(), "n0")?
        .parse()
        .map_err(|_| "bad start time")?;
    let count: usize = header_field(fields.next(), "count")?
        .parse()
        .map_err(|_| "bad matrix count")?;
    if fields.next().is_some() {
        return Err("unexpected header fields".into());
    }
    if d == 0 || count == 0 {
        return Err("empty cocycle".into());
    }
    let payload = &rest[eol + 1..];
    let expected = d
        .checked_mul(d)
        .and_then(|x| x.checked_mul(count))
        .and_then(|x| x.checked_mul(8))
        .ok_or("header sizes overflow")?;
    if payload.len() != expected {
        return Err(format!(
            "payload has {} bytes, header implies {expected}",
            payload.len()
        ));
    }
    let mut values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let matrices = (0..count)
        .map(|_| DMatrix::from_row_iterator(d, d, values.by_ref().take(d * d)))
        .collect();
    CocycleWindow::new(n0, matrices).map_err(|e| e.to_string())
}

pub fn read_cocycle<R: Read>(input: &mut R) -> Result<CocycleWindow, String> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(|e| e.to_string())?;
    parse_cocycle(&bytes)
}

pub fn read_cocycle_file(path: &Path) -> CliResult<CocycleWindow> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    parse_cocycle(&bytes).map_err(|m| CliError::format(path.display().to_string(), m))
}

pub fn write_cocycle_file(path: &Path, window: &CocycleWindow) -> CliResult<()> {
    let mut buf = Vec::new();
    write_cocycle(&mut buf, window).expect("writing to memory");
    fs::write(path, buf).map_err(|e| CliError::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CocycleWindow {
        let ms = (0..3)
            .map(|k| DMatrix::from_fn(2, 2, |r, c| (k * 4 + r * 2 + c) as f64 + 0.1))
            .collect();
        CocycleWindow::new(-1, ms).unwrap()
    }

    #[test]
    fn layout() {
        let mut buf = Vec::new();
        write_cocycle(&mut buf, &sample()).unwrap();
        let header = b"OSLC1\nd=2 n0=-1 count=3\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(buf.len(), header.len() + 3 * 4 * 8);
        // second entry of the first matrix is row 0, column 1
        let second =
            f64::from_le_bytes(buf[header.len() + 8..header.len() + 16].try_into().unwrap());
        assert_eq!(second, 1.1);
    }

    #[test]
    fn round_trip() {
        let mut buf = Vec::new();
        write_cocycle(&mut buf, &sample()).unwrap();
        assert_eq!(parse_cocycle(&buf).unwrap(), sample());
    }

    #[test]
    fn rejects_damage() {
        let mut buf = Vec::new();
        write_cocycle(&mut buf, &sample()).unwrap();
        assert!(parse_cocycle(&buf[..buf.len() - 1]).is_err());
        assert!(parse_cocycle(&buf[1..]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(parse_cocycle(&extra).is_err());
        let text = b"OSLC1\nd=2 n0=0\n";
        assert!(parse_cocycle(text).is_err());
    }
}
