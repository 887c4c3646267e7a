//! Plain-text matrix format.
//!
//! A dispersion set is written as a header line `M T Q` followed by `2Q`
//! blocks of `T` lines, each line holding `M` whitespace-separated entries
//! `re+imj` / `re-imj`. Reals use the shortest round-trip decimal form.
//! Blank lines and lines starting with `#` are ignored when reading.

use std::fmt::Write as _;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stbc::{CMatrix, DispersionSet};

pub fn format_entry<T: Real>(z: &Complex<T>) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", z.re, sign, z.im.abs())
}

pub fn parse_entry<T: Real>(s: &str) -> std::result::Result<Complex<T>, String> {
    let body = s
        .strip_suffix('j')
        .or_else(|| s.strip_suffix('i'))
        .ok_or_else(|| format!("entry `{s}` must end in `j`"))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| format!("entry `{s}` is not of the form re+imj"))?;
    let re = body[..split]
        .parse::<T>()
        .map_err(|_| format!("bad real part in `{s}`"))?;
    let im = body[split..]
        .parse::<T>()
        .map_err(|_| format!("bad imaginary part in `{s}`"))?;
    Ok(Complex::new(re, im))
}

fn write_rows<T: Real>(out: &mut String, a: &CMatrix<T>) {
    for i in 0..a.nrows() {
        let line: Vec<String> = a.row(i).iter().map(format_entry).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
}

/// Writes a bare complex matrix: header `rows cols`, then one line per row.
pub fn write_matrix<T: Real>(a: &CMatrix<T>) -> String {
    let mut out = format!("{} {}\n", a.nrows(), a.ncols());
    write_rows(&mut out, a);
    out
}

pub fn write_set<T: Real>(set: &DispersionSet<T>) -> String {
    let mut out = format!(
        "{} {} {}\n",
        set.num_tx(),
        set.block_length(),
        set.num_symbols()
    );
    for a in set.matrices() {
        write_rows(&mut out, a);
    }
    out
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_row<T: Real>(line_no: usize, line: &str, cols: usize) -> Result<Vec<Complex<T>>> {
    let row = line
        .split_whitespace()
        .map(parse_entry::<T>)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|message| Error::Parse {
            line: line_no,
            message,
        })?;
    if row.len() != cols {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected {cols} entries, found {}", row.len()),
        });
    }
    Ok(row)
}

fn parse_header<const K: usize>(line: Option<(usize, &str)>) -> Result<[usize; K]> {
    let (line_no, line) = line.ok_or(Error::Parse {
        line: 0,
        message: "missing header".into(),
    })?;
    let fields: Vec<usize> = line
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad header: {e}"),
        })?;
    fields.try_into().map_err(|f: Vec<usize>| Error::Parse {
        line: line_no,
        message: format!("header needs {K} integers, found {}", f.len()),
    })
}

pub fn read_matrix<T: Real>(text: &str) -> Result<CMatrix<T>> {
    let mut lines = content_lines(text);
    let [rows, cols] = parse_header(lines.next())?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (n, l) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: format!("expected {rows} rows"),
        })?;
        data.extend(parse_row::<T>(n, l, cols)?);
    }
    if let Some((n, _)) = lines.next() {
        return Err(Error::Parse {
            line: n,
            message: "trailing content".into(),
        });
    }
    Ok(CMatrix::from_row_slice(rows, cols, &data))
}

pub fn read_set<T: Real>(text: &str, name: &str) -> Result<DispersionSet<T>> {
    let mut lines = content_lines(text);
    let [m, t, q] = parse_header(lines.next())?;
    let mut matrices = Vec::with_capacity(2 * q);
    for k in 0..2 * q {
        let mut data = Vec::with_capacity(t * m);
        for _ in 0..t {
            let (n, l) = lines.next().ok_or(Error::Parse {
                line: 0,
                message: format!("unexpected end of input in block {}", k + 1),
            })?;
            data.extend(parse_row::<T>(n, l, m)?);
        }
        matrices.push(CMatrix::from_row_slice(t, m, &data));
    }
    if let Some((n, _)) = lines.next() {
        return Err(Error::Parse {
            line: n,
            message: "trailing content after last block".into(),
        });
    }
    DispersionSet::new(name, m, t, q, matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use proptest::prelude::*;

    #[test]
    fn alamouti_text() {
        let text = write_set(&builtin::alamouti::<f64>());
        let expected = "2 2 2\n\
            1+0j 0+0j\n0+0j 1+0j\n\
            0+1j 0+0j\n0+0j 0-1j\n\
            0+0j 1+0j\n-1+0j 0+0j\n\
            0+0j 0+1j\n0+1j 0+0j\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn builtins_round_trip() {
        for set in builtin::all::<f64>() {
            let back = read_set::<f64>(&write_set(&set), set.name()).unwrap();
            assert_eq!(back, set);
        }
    }

    #[test]
    fn parse_exponents_and_comments() {
        let z: Complex<f64> = parse_entry("1e-3-2.5E+2j").unwrap();
        assert_eq!(z, Complex::new(1e-3, -250.0));
        let m: CMatrix<f64> = read_matrix("# H\n1 2\n\n1+1j -0-3j\n").unwrap();
        assert_eq!(m[(0, 1)], Complex::new(-0.0, -3.0));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_entry::<f64>("1+2").is_err());
        assert!(parse_entry::<f64>("j").is_err());
        assert!(matches!(
            read_set::<f64>("2 2\n", "x"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_set::<f64>("1 1 1\n1+0j\n", "x"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            read_set::<f64>("1 1 1\n1+0j 0+0j\n0+1j\n", "x"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn matrix_round_trip(vals in prop::collection::vec((any::<f64>(), any::<f64>()), 6)) {
            prop_assume!(vals.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
            let a = CMatrix::from_iterator(2, 3, vals.iter().map(|&(r, i)| Complex::new(r, i)));
            let back: CMatrix<f64> = read_matrix(&write_matrix(&a)).unwrap();
            prop_assert!(a.iter().zip(back.iter()).all(|(x, y)|
                x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
        }
    }
}
