//! CSV matrices, float formatting and content digests.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use kmsel_core::DataMatrix;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Prints to stdout; a closed pipe (as in `kmsel ... | head`) is not an error.
pub fn print_stdout(text: &str) -> CliResult<()> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Scientific notation with 17 significant digits, enough to round-trip
/// every `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A matrix read from disk together with the digest of its bytes.
pub struct LoadedMatrix {
    pub matrix: DataMatrix,
    pub digest: String,
}

pub fn read_matrix_csv(path: &Path) -> CliResult<LoadedMatrix> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let matrix =
        parse_matrix_csv(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(LoadedMatrix {
        matrix,
        digest: sha256_hex(&bytes),
    })
}

/// Comma-separated rows of numbers. A first line with any non-numeric field
/// is taken as a header and skipped.
pub fn parse_matrix_csv(bytes: &[u8]) -> Result<DataMatrix, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(bytes);
    let mut values = Vec::new();
    let mut q = None;
    let mut n = 0;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if line == 0 => continue,
            Err(e) => {
                let at = record.position().map_or(line + 1, |p| p.line() as usize);
                return Err(format!("line {at}: {e}"));
            }
        };
        match q {
            None => q = Some(row.len()),
            Some(q) if q != row.len() => {
                return Err(format!(
                    "row {} has {} fields, expected {q}",
                    n + 1,
                    row.len()
                ))
            }
            _ => {}
        }
        values.extend(row);
        n += 1;
    }
    let q = q.ok_or("no numeric rows")?;
    DataMatrix::new(n, q, values).map_err(|e| e.to_string())
}

#[cfg(test)]
pub fn write_matrix_csv(path: &Path, x: &DataMatrix) -> CliResult<()> {
    let mut out = fs::File::create(path)?;
    for row in x.rows() {
        let line: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_detected() {
        let x = parse_matrix_csv(b"a,b\n1,2\n3,4\n").unwrap();
        assert_eq!((x.n(), x.q()), (2, 2));
        let x = parse_matrix_csv(b"1,2\n3,4\n").unwrap();
        assert_eq!(x.n(), 2);
    }

    #[test]
    fn bad_input() {
        assert!(parse_matrix_csv(b"1,2\n3\n").is_err());
        assert!(parse_matrix_csv(b"1,2\nx,4\n")
            .unwrap_err()
            .contains("line 2"));
        assert!(parse_matrix_csv(b"1,NaN\n").is_err());
        assert!(parse_matrix_csv(b"").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let v = vec![0.1, -1.0 / 3.0, 1e-310, 6.02e23, std::f64::consts::PI, -0.0];
        let x = DataMatrix::new(3, 2, v).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_matrix_csv(&path, &x).unwrap();
        let back = read_matrix_csv(&path).unwrap().matrix;
        for (a, b) in x.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
