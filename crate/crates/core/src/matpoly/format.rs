//! Line-oriented text files for polynomials and matrices.
//!
//! ```text
//! # comment
//! vars x y z
//! size 3 3
//! x^2 + 2*z^2 ; -x*y ; -x*z
//! -x*y ; 2*x^2 + y^2 ; -y*z
//! -x*z ; -y*z ; 2*y^2 + z^2
//! ```
//!
//! A polynomial file has a `vars` line followed by `poly <expr>`.

use super::matrix::MatrixPolynomial;
use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// A matrix together with the names of its variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMatrix {
    pub vars: Vec<String>,
    pub matrix: MatrixPolynomial,
}

/// A polynomial together with the names of its variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedPolynomial {
    pub vars: Vec<String>,
    pub poly: Polynomial,
}

fn content_lines(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn line_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos: line,
        msg: msg.into(),
    }
}

pub(crate) fn parse_vars(rest: &str, line: usize) -> Result<Vec<String>> {
    let vars: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
    for v in &vars {
        if !v
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(line_err(line, format!("bad variable name `{v}`")));
        }
    }
    if vars.is_empty() {
        return Err(line_err(line, "no variables declared"));
    }
    Ok(vars)
}

/// Entries of one matrix row, `;`-separated.
pub(crate) fn parse_row(l: &str, vars: &[String], line: usize) -> Result<Vec<Polynomial>> {
    l.split(';')
        .map(|e| Polynomial::parse(e.trim(), vars).map_err(|err| line_err(line, err.to_string())))
        .collect()
}

pub(crate) fn format_row(row: &[Polynomial], vars: &[String]) -> String {
    row.iter()
        .map(|p| p.to_string_with(vars))
        .collect::<Vec<_>>()
        .join(" ; ")
}

impl NamedMatrix {
    pub fn parse(s: &str) -> Result<Self> {
        let mut lines = content_lines(s);
        let (ln, l) = lines
            .next()
            .ok_or_else(|| line_err(0, "empty matrix file"))?;
        let rest = l
            .strip_prefix("vars")
            .ok_or_else(|| line_err(ln, "expected `vars`"))?;
        let vars = parse_vars(rest, ln)?;
        let (ln, l) = lines.next().ok_or_else(|| line_err(ln, "missing `size`"))?;
        let dims: Vec<usize> = l
            .strip_prefix("size")
            .ok_or_else(|| line_err(ln, "expected `size`"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| line_err(ln, "bad size")))
            .collect::<Result<_>>()?;
        let (r, c) = match dims[..] {
            [r, c] => (r, c),
            [m] => (m, m),
            _ => return Err(line_err(ln, "size takes one or two integers")),
        };
        let mut rows = Vec::with_capacity(r);
        for _ in 0..r {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| line_err(ln, "missing matrix row"))?;
            let row = parse_row(l, &vars, ln)?;
            if row.len() != c {
                return Err(line_err(
                    ln,
                    format!("expected {c} entries, found {}", row.len()),
                ));
            }
            rows.push(row);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(line_err(ln, "trailing content after matrix"));
        }
        Ok(NamedMatrix {
            matrix: MatrixPolynomial::from_rows(rows)?,
            vars,
        })
    }

    pub fn to_text(&self) -> String {
        let m = &self.matrix;
        let mut out = format!(
            "vars {}\nsize {} {}\n",
            self.vars.join(" "),
            m.rows(),
            m.cols()
        );
        for row in m.to_rows() {
            out.push_str(&format_row(&row, &self.vars));
            out.push('\n');
        }
        out
    }
}

impl NamedPolynomial {
    pub fn parse(s: &str) -> Result<Self> {
        let mut lines = content_lines(s);
        let (ln, l) = lines
            .next()
            .ok_or_else(|| line_err(0, "empty polynomial file"))?;
        let rest = l
            .strip_prefix("vars")
            .ok_or_else(|| line_err(ln, "expected `vars`"))?;
        let vars = parse_vars(rest, ln)?;
        let (ln, l) = lines.next().ok_or_else(|| line_err(ln, "missing `poly`"))?;
        let expr = l
            .strip_prefix("poly")
            .ok_or_else(|| line_err(ln, "expected `poly`"))?;
        let poly = Polynomial::parse(expr, &vars).map_err(|e| line_err(ln, e.to_string()))?;
        if let Some((ln, _)) = lines.next() {
            return Err(line_err(ln, "trailing content after polynomial"));
        }
        Ok(NamedPolynomial { vars, poly })
    }

    pub fn to_text(&self) -> String {
        format!(
            "vars {}\npoly {}\n",
            self.vars.join(" "),
            self.poly.to_string_with(&self.vars)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let src = "# Choi\nvars x y z\nsize 3\nx^2+2*z^2; -x*y; -x*z\n-x*y; y^2+2*x^2; -y*z\n-x*z; -y*z; z^2+2*y^2\n";
        let m = NamedMatrix::parse(src).unwrap();
        assert!(m.matrix.is_symmetric());
        let again = NamedMatrix::parse(&m.to_text()).unwrap();
        assert_eq!(again, m);
        assert_eq!(again.to_text(), m.to_text());
    }

    #[test]
    fn matrix_errors() {
        assert!(NamedMatrix::parse("vars x\nsize 2\n1 ; 0\n").is_err());
        assert!(NamedMatrix::parse("vars x\nsize 1\n1 ; 0\n").is_err());
        assert!(NamedMatrix::parse("size 1\n1\n").is_err());
        assert!(NamedMatrix::parse("vars x\nsize 1\nq\n").is_err());
    }

    #[test]
    fn polynomial_round_trip() {
        let p = NamedPolynomial::parse("vars x\npoly x^4 + 1\n").unwrap();
        assert_eq!(NamedPolynomial::parse(&p.to_text()).unwrap(), p);
    }
}
