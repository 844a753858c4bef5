//! Matrix files.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size        field
//! 0       4           magic "LRMX"
//! 4       1           format version (1)
//! 5       8           rows (u64)
//! 13      8           cols (u64)
//! 21      8·rows·cols entries, row-major f64
//! ```
//!
//! CSV: a `rows,cols` header line followed by one comma-separated line per
//! row, each value printed with enough digits to round-trip.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{Error, Matrix, Result};

pub const MAGIC: &[u8; 4] = b"LRMX";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Binary,
    Csv,
}

impl MatrixFormat {
    /// `.csv` selects CSV; anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension() {
            Some(e) if e.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Binary,
        }
    }
}

fn format_err(offset: usize, reason: impl Into<String>) -> Error {
    Error::Format { offset: offset as u64, reason: reason.into() }
}

pub fn write_binary(m: &Matrix) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * m.len());
    buf.extend_from_slice(MAGIC);
    buf.push(VERSION);
    buf.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    buf.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for row in m.row_iter() {
        for v in row.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

pub fn read_binary(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(format_err(0, "missing LRMX magic"));
    }
    match bytes.get(4) {
        Some(&VERSION) => {}
        Some(v) => return Err(format_err(4, format!("unsupported version {v}"))),
        None => return Err(format_err(4, "truncated header")),
    }
    if bytes.len() < HEADER_LEN {
        return Err(format_err(bytes.len(), "truncated header"));
    }
    let read_u64 = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let (rows, cols) = (read_u64(5), read_u64(13));
    let payload = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| format_err(5, format!("dimensions {rows}x{cols} overflow")))?;
    let (rows, cols) = (rows as usize, cols as usize);
    let expected = HEADER_LEN + payload;
    if bytes.len() < expected {
        return Err(format_err(
            bytes.len(),
            format!("truncated payload: {rows}x{cols} needs {expected} bytes"),
        ));
    }
    if bytes.len() > expected {
        return Err(format_err(expected, "trailing bytes after payload"));
    }
    let mut values = bytes[HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    Ok(Matrix::from_row_iterator(rows, cols, &mut values))
}

pub fn write_csv(m: &Matrix) -> String {
    let mut out = format!("{},{}\n", m.nrows(), m.ncols());
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn read_csv(text: &str) -> Result<Matrix> {
    let mut offset = 0;
    let mut lines = text.split_inclusive('\n');
    let header = lines.next().ok_or_else(|| format_err(0, "empty file"))?;
    let dims: Vec<&str> = header.trim().split(',').collect();
    let parse_dim = |s: &str| s.trim().parse::<usize>();
    let (rows, cols) = match dims.as_slice() {
        [r, c] => match (parse_dim(r), parse_dim(c)) {
            (Ok(r), Ok(c)) => (r, c),
            _ => return Err(format_err(0, "header must be 'rows,cols'")),
        },
        _ => return Err(format_err(0, "header must be 'rows,cols'")),
    };
    rows.checked_mul(cols).ok_or_else(|| format_err(0, format!("dimensions {rows}x{cols} overflow")))?;
    offset += header.len();

    let mut values = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = lines.next().ok_or_else(|| format_err(offset, format!("missing row {r}")))?;
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != cols {
            return Err(format_err(offset, format!("row {r} has {} values, expected {cols}", fields.len())));
        }
        for f in fields {
            let v: f64 =
                f.trim().parse().map_err(|_| format_err(offset, format!("bad number '{f}' in row {r}")))?;
            values.push(v);
        }
        offset += line.len();
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(format_err(offset, "extra rows after declared size"));
    }
    Ok(Matrix::from_row_iterator(rows, cols, values))
}

pub fn save_matrix_as(m: &Matrix, path: &Path, format: MatrixFormat) -> Result<()> {
    let bytes = match format {
        MatrixFormat::Binary => write_binary(m),
        MatrixFormat::Csv => write_csv(m).into_bytes(),
    };
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

/// Saves in the format implied by the extension (see [`MatrixFormat::from_path`]).
pub fn save_matrix(m: &Matrix, path: &Path) -> Result<()> {
    save_matrix_as(m, path, MatrixFormat::from_path(path))
}

/// Loads either format, detected by the magic bytes.
pub fn load_matrix(path: &Path) -> Result<Matrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        read_binary(&bytes)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| format_err(e.valid_up_to(), "file is neither LRMX nor UTF-8 CSV"))?;
        read_csv(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn documented_byte_layout() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let bytes = write_binary(&m);
        let mut want = b"LRMX\x01".to_vec();
        want.extend(2u64.to_le_bytes());
        want.extend(2u64.to_le_bytes());
        for v in [1.0f64, 2.0, 3.0, 4.0] {
            want.extend(v.to_le_bytes());
        }
        assert_eq!(bytes, want);
    }

    #[test]
    fn format_errors_carry_offsets() {
        let m = Matrix::from_element(2, 3, 1.5);
        let bytes = write_binary(&m);
        match read_binary(&bytes[..30]) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 30),
            other => panic!("{other:?}"),
        }
        match read_binary(b"LRMZ") {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("{other:?}"),
        }
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(read_binary(&bad), Err(Error::Format { offset: 4, .. })));
        let mut huge = b"LRMX\x01".to_vec();
        huge.extend(u64::MAX.to_le_bytes());
        huge.extend(3u64.to_le_bytes());
        assert!(matches!(read_binary(&huge), Err(Error::Format { offset: 5, .. })));
        let mut long = bytes;
        long.push(0);
        assert!(matches!(read_binary(&long), Err(Error::Format { offset: 69, .. })));
    }

    #[test]
    fn csv_layout_and_errors() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 0.1, -3.5e-7, 4.0]);
        assert_eq!(write_csv(&m), "2,2\n1.0,0.1\n-3.5e-7,4.0\n");
        assert!(matches!(read_csv("2,2\n1,2\n3\n"), Err(Error::Format { offset: 8, .. })));
        assert!(matches!(read_csv("x\n"), Err(Error::Format { offset: 0, .. })));
        assert!(read_csv("1,1\n1\n2\n").is_err());
    }

    fn any_matrix() -> impl Strategy<Value = Matrix> {
        (0usize..5, 0usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::num::f64::ANY, r * c)
                .prop_map(move |v| Matrix::from_vec(r, c, v))
        })
    }

    proptest! {
        #[test]
        fn binary_round_trip_is_bitwise(m in any_matrix()) {
            let back = read_binary(&write_binary(&m)).unwrap();
            prop_assert_eq!(back.shape(), m.shape());
            for (a, b) in m.iter().zip(back.iter()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }

        #[test]
        fn csv_round_trip(v in proptest::collection::vec(-1e6f64..1e6, 6)) {
            let m = Matrix::from_vec(2, 3, v);
            let back = read_csv(&write_csv(&m)).unwrap();
            prop_assert!((back - m).abs().max() <= 1e-12);
        }
    }
}
