//! Truncated polynomials in an infinitesimal, with exact rational
//! coefficients.
//!
//! A value `q0 + q1*eps + ... + qK*eps^K` is ordered lexicographically from
//! the constant coefficient upward, which makes `eps` a positive
//! infinitesimal: `0 < eps^k < q` for every positive rational `q` and `k >= 1`.
//! Addition is exact; products are exact as long as no nonzero coefficient
//! falls beyond the truncation degree, and report an error otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hyperreal {
    coeffs: Vec<BigRational>,
}

impl Hyperreal {
    /// Builds a value from its coefficients; `coeffs[k]` multiplies `eps^k`.
    pub fn new(coeffs: Vec<BigRational>) -> Hyperreal {
        assert!(!coeffs.is_empty(), "a hyperreal needs at least the constant coefficient");
        Hyperreal { coeffs }
    }

    pub fn zero(degree: usize) -> Hyperreal {
        Hyperreal { coeffs: vec![BigRational::zero(); degree + 1] }
    }

    pub fn one(degree: usize) -> Hyperreal {
        Hyperreal::from_rational(BigRational::one(), degree)
    }

    pub fn from_rational(q: BigRational, degree: usize) -> Hyperreal {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[0] = q;
        Hyperreal { coeffs }
    }

    pub fn epsilon_power(k: usize, degree: usize) -> Hyperreal {
        assert!(k <= degree);
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[k] = BigRational::one();
        Hyperreal { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Constant coefficient; the standard part of a finite value.
    pub fn standard_part(&self) -> &BigRational {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient; `None` for zero.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Zero counts as infinitesimal: the standard part vanishes.
    pub fn is_infinitesimal(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    pub fn is_positive(&self) -> bool {
        match self.order() {
            Some(k) => self.coeffs[k].is_positive(),
            None => false,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self.order() {
            Some(k) => self.coeffs[k].is_negative(),
            None => false,
        }
    }

    fn check_degree(&self, other: &Hyperreal) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(())
    }

    /// Lexicographic comparison from the constant coefficient upward; a total
    /// order on values of equal truncation degree.
    pub fn compare(&self, other: &Hyperreal) -> Result<Ordering> {
        self.check_degree(other)?;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return Ok(ord),
            }
        }
        Ok(Ordering::Equal)
    }

    pub fn add(&self, other: &Hyperreal) -> Result<Hyperreal> {
        self.check_degree(other)?;
        Ok(Hyperreal {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Hyperreal) -> Result<Hyperreal> {
        self.check_degree(other)?;
        Ok(Hyperreal {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn neg(&self) -> Hyperreal {
        Hyperreal { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, q: &BigRational) -> Hyperreal {
        Hyperreal { coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Truncated product. Discarding a nonzero coefficient beyond the degree
    /// is an error, never silent.
    pub fn mul(&self, other: &Hyperreal) -> Result<Hyperreal> {
        self.check_degree(other)?;
        let degree = self.degree();
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = i + j;
                if k > degree {
                    return Err(Error::TruncationOverflow { degree, power: k });
                }
                coeffs[k] += a * b;
            }
        }
        Ok(Hyperreal { coeffs })
    }
}

impl fmt::Display for Hyperreal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                1 if mag.is_one() => write!(f, "eps")?,
                1 => write!(f, "{mag}*eps")?,
                _ if mag.is_one() => write!(f, "eps^{k}")?,
                _ => write!(f, "{mag}*eps^{k}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Parses an exact rational from `"p/q"` or `"p"` text.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let make_err = || Error::UnknownConsequence(format!("invalid rational `{text}`"));
    match text.split_once('/') {
        Some((num, den)) => {
            let n = BigInt::from_str(num.trim()).map_err(|_| make_err())?;
            let d = BigInt::from_str(den.trim()).map_err(|_| make_err())?;
            if d.is_zero() {
                return Err(make_err());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n = BigInt::from_str(text.trim()).map_err(|_| make_err())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

/// Shorthand used throughout the tests.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
