//! Text form of polynomials: `c*x^2*y - 3/4*z + 1`.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::monomial::MultiIndex;
use super::polynomial::Polynomial;
use super::rational::{fmt_rational, Rational};
use crate::error::{Error, Result};

impl Polynomial {
    /// Parses a polynomial over the named variables.
    ///
    /// Accepts `+ - * ^`, parentheses, integer and `p/q` literals, and
    /// division by constants.
    pub fn parse<S: AsRef<str>>(s: &str, vars: &[S]) -> Result<Polynomial> {
        let vars: Vec<&str> = vars.iter().map(|v| v.as_ref()).collect();
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            vars: &vars,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }

    /// Canonical text, terms in descending lexicographic order.
    pub fn to_string_with<S: AsRef<str>>(&self, vars: &[S]) -> String {
        assert_eq!(vars.len(), self.nvars(), "wrong number of variable names");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let mono = format_monomial(m, vars);
            if mono.is_empty() {
                out.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&fmt_rational(&a));
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

fn format_monomial<S: AsRef<str>>(m: &MultiIndex, vars: &[S]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars[i].as_ref().to_string()),
            _ => parts.push(format!("{}^{}", vars[i].as_ref(), e)),
        }
    }
    parts.join("*")
}

/// Default variable names `x1, …, xn`.
pub fn default_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_string_with(&default_vars(self.nvars())))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let n = self.vars.len();
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        debug_assert_eq!(acc.nvars(), n);
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(self.err("division only by nonzero constants"));
                    }
                    acc = acc.scale(&(Rational::one() / d.constant_term()));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let n = self.vars.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(Polynomial::constant(n, Rational::from_integer(v)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Polynomial::var(n, i)),
                    None => {
                        self.pos = start;
                        Err(self.err(&format!("unknown variable `{name}`")))
                    }
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::rat;

    #[test]
    fn round_trip() {
        let v = ["x", "y", "z"];
        for s in [
            "x^4*y^2 + x^2*z^4 - 3*x^2*y^2*z^2 + y^4*z^2",
            "-1/2*x + 7",
            "0",
            "-x*y*z",
            "5/12",
        ] {
            let p = Polynomial::parse(s, &v).unwrap();
            let printed = p.to_string_with(&v);
            assert_eq!(Polynomial::parse(&printed, &v).unwrap(), p);
        }
    }

    #[test]
    fn canonical_printing() {
        let v = ["x", "y"];
        let p = Polynomial::parse("(x - y)^2", &v).unwrap();
        assert_eq!(p.to_string_with(&v), "x^2 - 2*x*y + y^2");
        let q = Polynomial::parse("(18*X^2+9*X+5)/6", &["X"]).unwrap();
        assert_eq!(q.to_string_with(&["X"]), "3*X^2 + 3/2*X + 5/6");
    }

    #[test]
    fn parse_errors() {
        assert!(Polynomial::parse("x +", &["x"]).is_err());
        assert!(Polynomial::parse("w", &["x"]).is_err());
        assert!(Polynomial::parse("x/y", &["x", "y"]).is_err());
        assert!(Polynomial::parse("(x", &["x"]).is_err());
    }

    #[test]
    fn unary_minus_and_rationals() {
        let p = Polynomial::parse("-3/4*x^2 - -x", &["x"]).unwrap();
        assert_eq!(p.coeff(&MultiIndex(vec![2])), rat(-3, 4));
        assert_eq!(p.coeff(&MultiIndex(vec![1])), rat(1, 1));
    }
}
