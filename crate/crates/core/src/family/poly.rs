//! Univariate polynomials with rational coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{int, is_integral, Rational};

/// `Σ coeffs[j] x^j`, with no trailing zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Rational {
        self.coeffs.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    /// Degree, with `0` for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(is_integral)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: &BigInt) -> Rational {
        self.eval(&int(x.clone()))
    }

    /// Value at an integer, required to be an integer.
    pub fn eval_integer(&self, x: &BigInt) -> Result<BigInt> {
        let v = self.eval_int(x);
        if !is_integral(&v) {
            return Err(Error::InvalidInput(format!(
                "polynomial {self} takes the non-integer value {v} at {x}"
            )));
        }
        Ok(v.to_integer())
    }
}

fn parse_err(s: &str, why: &str) -> Error {
    Error::InvalidInput(format!("cannot parse polynomial {s:?}: {why}"))
}

fn take_digits(b: &[u8], pos: &mut usize) -> Option<BigInt> {
    let start = *pos;
    while *pos < b.len() && b[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        None
    } else {
        std::str::from_utf8(&b[start..*pos]).ok()?.parse().ok()
    }
}

/// One term: `[num[/den]][*]x[^e][/den]` or a bare constant, sign excluded.
fn parse_term(src: &str, t: &str) -> Result<(usize, Rational)> {
    let b = t.as_bytes();
    let mut pos = 0;
    let mut coeff = Rational::one();
    let mut had_number = false;
    if let Some(n) = take_digits(b, &mut pos) {
        had_number = true;
        coeff = int(n);
        if pos < b.len() && b[pos] == b'/' {
            pos += 1;
            let d = take_digits(b, &mut pos).ok_or_else(|| parse_err(src, "missing denominator"))?;
            if d.is_zero() {
                return Err(parse_err(src, "zero denominator"));
            }
            coeff /= int(d);
        }
    }
    if pos < b.len() && b[pos] == b'*' {
        if !had_number {
            return Err(parse_err(src, "'*' without a coefficient"));
        }
        pos += 1;
    }
    let mut power = 0usize;
    if pos < b.len() && b[pos] == b'x' {
        pos += 1;
        power = 1;
        if pos < b.len() && b[pos] == b'^' {
            pos += 1;
            let e = take_digits(b, &mut pos).ok_or_else(|| parse_err(src, "missing exponent"))?;
            power = usize::try_from(e).map_err(|_| parse_err(src, "exponent too large"))?;
        }
    } else if !had_number {
        return Err(parse_err(src, "empty term"));
    }
    if pos < b.len() && b[pos] == b'/' {
        pos += 1;
        let d = take_digits(b, &mut pos).ok_or_else(|| parse_err(src, "missing denominator"))?;
        if d.is_zero() {
            return Err(parse_err(src, "zero denominator"));
        }
        coeff /= int(d);
    }
    if pos != b.len() {
        return Err(parse_err(src, &format!("unexpected text {:?}", &t[pos..])));
    }
    Ok((power, coeff))
}

impl FromStr for Poly {
    type Err = Error;

    /// Accepts sums such as `16x^4+32x^3-x+3`, `x/4`, `3/4x^2` or `2*x`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(parse_err(s, "empty input"));
        }
        let mut coeffs: Vec<Rational> = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (negative, body) = match rest.as_bytes()[0] {
                b'-' => (true, &rest[1..]),
                b'+' => (false, &rest[1..]),
                _ => (false, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let (power, mut c) = parse_term(s, &body[..end])?;
            if negative {
                c = -c;
            }
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Rational::zero());
            }
            coeffs[power] += c;
            rest = &body[end..];
        }
        Ok(Poly::new(coeffs))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            let mag = if j > 0 && a.is_one() {
                String::new()
            } else if is_integral(&a) {
                a.numer().to_string()
            } else {
                format!("{}/{}", a.numer(), a.denom())
            };
            let var = match j {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{j}"),
            };
            write!(f, "{sign}{mag}{var}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn parsing() {
        assert_eq!(p("16x^4+32x^3+24x^2+12x+3"), Poly::from_i64(&[3, 12, 24, 32, 16]));
        assert_eq!(p("x^2 + 2"), Poly::from_i64(&[2, 0, 1]));
        assert_eq!(p("-x+1"), Poly::from_i64(&[1, -1]));
        assert_eq!(p("2*x"), Poly::from_i64(&[0, 2]));
        assert_eq!(p("x/4").coeffs(), &[int(0), rat(1, 4)]);
        assert_eq!(p("3/4x^2").coeff(2), rat(3, 4));
        assert_eq!(p("x^4/4+x^3/2+3x^2/4+x/2").eval(&int(3)), int(42));
        assert_eq!(p("x-x"), Poly::new(vec![]));
        for bad in ["", "x^", "2**x", "1/0", "y", "3x2"] {
            assert!(bad.parse::<Poly>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display() {
        assert_eq!(p("16x^4+32x^3+24x^2+12x+3").to_string(), "16x^4+32x^3+24x^2+12x+3");
        assert_eq!(p("-x+1").to_string(), "-x+1");
        assert_eq!(p("x/4-3").to_string(), "1/4x-3");
        assert_eq!(Poly::new(vec![]).to_string(), "0");
    }

    #[test]
    fn integer_values() {
        let f = p("x^2/2+x/2");
        assert!(!f.has_integer_coeffs());
        assert_eq!(f.eval_integer(&BigInt::from(4)).unwrap(), BigInt::from(10));
        assert!(p("x/2").eval_integer(&BigInt::from(1)).is_err());
        assert_eq!(p("2x+1").degree(), 1);
        assert_eq!(p("5").degree(), 0);
    }

    proptest! {
        #[test]
        fn display_roundtrip(cs in prop::collection::vec((-30i64..30, 1i64..5), 0..6)) {
            let poly = Poly::new(cs.iter().map(|&(n, d)| rat(n, d)).collect());
            prop_assert_eq!(poly.to_string().parse::<Poly>().unwrap(), poly);
        }
    }
}
