//! Ordinals below ω^ω in Cantor normal form.
//!
//! An ordinal is stored as a list of `(exponent, coefficient)` terms with
//! strictly decreasing exponents and nonzero coefficients, so
//! `ω^2·3 + ω + 5` is `[(2, 3), (1, 1), (0, 5)]`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("empty ordinal term")]
    EmptyTerm,
    #[error("malformed ordinal term `{0}`")]
    BadTerm(String),
    #[error("ordinal arithmetic overflow")]
    Overflow,
    #[error("terms are not in Cantor normal form")]
    NotNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn from_nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![(0, n)],
            }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(1)
    }

    /// ω^e
    pub fn omega_pow(e: u32) -> Self {
        Ordinal {
            terms: vec![(e, 1)],
        }
    }

    pub fn from_terms(terms: Vec<(u32, u64)>) -> Result<Self, OrdinalError> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(OrdinalError::NotNormal);
            }
        }
        if terms.iter().any(|t| t.1 == 0) {
            return Err(OrdinalError::NotNormal);
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn finite_part(&self) -> u64 {
        match self.terms.last() {
            Some(&(0, c)) => c,
            _ => 0,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && self.finite_part() == 0
    }

    /// Parity of the finite part; zero and limits are even.
    pub fn parity(&self) -> Parity {
        if self.finite_part().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn same_parity(&self, other: &Ordinal) -> bool {
        self.parity() == other.parity()
    }

    pub fn checked_add(&self, other: &Ordinal) -> Result<Ordinal, OrdinalError> {
        let Some(&(lead, lead_c)) = other.terms.first() else {
            return Ok(self.clone());
        };
        let mut terms: Vec<(u32, u64)> =
            self.terms.iter().copied().filter(|t| t.0 > lead).collect();
        let carry = self
            .terms
            .iter()
            .find(|t| t.0 == lead)
            .map(|t| t.1)
            .unwrap_or(0);
        let c = lead_c.checked_add(carry).ok_or(OrdinalError::Overflow)?;
        terms.push((lead, c));
        terms.extend_from_slice(&other.terms[1..]);
        Ok(Ordinal { terms })
    }

    /// Ordinal sum. Panics on coefficient overflow; see [`Ordinal::checked_add`].
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        self.checked_add(other).expect("ordinal overflow")
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::from_nat(1))
    }

    /// Right multiplication by a natural: (ω^e·c + r)·k = ω^e·(c·k) + r for k ≥ 1.
    pub fn checked_mul_nat(&self, k: u64) -> Result<Ordinal, OrdinalError> {
        if k == 0 || self.is_zero() {
            return Ok(Ordinal::zero());
        }
        let mut terms = self.terms.clone();
        terms[0].1 = terms[0].1.checked_mul(k).ok_or(OrdinalError::Overflow)?;
        Ok(Ordinal { terms })
    }

    pub fn mul_nat(&self, k: u64) -> Ordinal {
        self.checked_mul_nat(k).expect("ordinal overflow")
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            let o = a.0.cmp(&b.0).then(a.1.cmp(&b.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::from_nat(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

fn parse_term(t: &str) -> Result<Ordinal, OrdinalError> {
    let t = t.trim();
    if t.is_empty() {
        return Err(OrdinalError::EmptyTerm);
    }
    let bad = || OrdinalError::BadTerm(t.to_string());
    let num = |s: &str| -> Result<u64, OrdinalError> {
        let s = s.trim();
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<u64>().map_err(|_| OrdinalError::Overflow)
    };
    let rest = if let Some(r) = t.strip_prefix('w') {
        r
    } else if let Some(r) = t.strip_prefix('ω') {
        r
    } else {
        return Ok(Ordinal::from_nat(num(t)?));
    };
    let (exp_part, coeff) = match rest.split_once('*') {
        Some((e, c)) => (e, num(c)?),
        None => (rest, 1),
    };
    let exp_part = exp_part.trim();
    let e = if exp_part.is_empty() {
        1
    } else if let Some(e) = exp_part.strip_prefix('^') {
        let e = num(e)?;
        u32::try_from(e).map_err(|_| OrdinalError::Overflow)?
    } else {
        return Err(bad());
    };
    if coeff == 0 {
        return Ok(Ordinal::zero());
    }
    Ok(Ordinal {
        terms: vec![(e, coeff)],
    })
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    /// Accepts sums of `n`, `w`, `w*c`, `w^e`, `w^e*c` (ω may replace w);
    /// terms out of order are combined by ordinal addition.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut acc = Ordinal::zero();
        for part in s.split('+') {
            acc = acc.checked_add(&parse_term(part)?)?;
        }
        Ok(acc)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Nat(u64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Nat(n) => Ok(Ordinal::from_nat(n)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn absorption_on_the_left() {
        assert_eq!(
            Ordinal::from_nat(1).add(&Ordinal::omega()),
            Ordinal::omega()
        );
        assert_eq!(Ordinal::omega().add(&Ordinal::from_nat(1)), o("w + 1"));
        assert_eq!(o("w*2 + 3").add(&o("w")), o("w*3"));
        assert_eq!(o("w^2 + w").add(&o("w^2")), o("w^2*2"));
    }

    #[test]
    fn multiplication_by_naturals() {
        assert_eq!(o("w + 2").mul_nat(3), o("w*3 + 2"));
        assert_eq!(o("w + 2").mul_nat(0), Ordinal::zero());
        assert_eq!(o("5").mul_nat(4), o("20"));
    }

    #[test]
    fn parity_of_limits_is_even() {
        assert_eq!(o("w*3").parity(), Parity::Even);
        assert_eq!(o("w*3 + 1").parity(), Parity::Odd);
        assert_eq!(Ordinal::zero().parity(), Parity::Even);
        assert!(o("w^2").is_limit());
    }

    #[test]
    fn ordering() {
        assert!(o("w") > o("1000000"));
        assert!(o("w^2") > o("w*99 + 5"));
        assert!(o("w + 1") > o("w"));
        assert!(o("w*2") < o("w*2 + 1"));
    }

    #[test]
    fn canonical_text_roundtrip() {
        for s in ["0", "7", "w", "w*3", "w^2", "w^3*4 + w + 1", "w^2 + w*2"] {
            assert_eq!(o(s).to_string(), s);
        }
        assert_eq!(o("1 + w").to_string(), "w");
        assert_eq!(o("ω^2*2+ω").to_string(), "w^2*2 + w");
    }

    #[test]
    fn parse_errors() {
        assert!("".parse::<Ordinal>().is_err());
        assert!("w^".parse::<Ordinal>().is_err());
        assert!("x".parse::<Ordinal>().is_err());
        assert!("1 + + 2".parse::<Ordinal>().is_err());
        assert!("99999999999999999999".parse::<Ordinal>().is_err());
    }

    #[test]
    fn serde_accepts_numbers_and_text() {
        let v: Vec<Ordinal> = serde_json::from_str(r#"[3, "w + 1"]"#).unwrap();
        assert_eq!(v, vec![o("3"), o("w + 1")]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["3","w + 1"]"#);
    }
}
