//! Exact arithmetic on four-valued truth quadruples.
//!
//! A truth value is a quadruple `(t, f, u, e)` of non-negative rationals
//! summing to one: the masses of *true*, *false*, *unknown* and *error*.
//! The set of all such quadruples carries two associative operations,
//! [`disj`] (unit [`TruthValue::zero`]) and [`conj`] (unit
//! [`TruthValue::one`]). Neither operation is commutative or idempotent and
//! they do not distribute over each other, so every fold in this crate is an
//! ordered, left-to-right fold.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

/// An element `(t, f, u, e)` of the truth-quadruple bimonoid.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthValue {
    t: Rational,
    f: Rational,
    u: Rational,
    e: Rational,
}

impl TruthValue {
    /// Builds a truth value, checking that every component lies in `[0, 1]`
    /// and that the components sum to exactly one.
    pub fn new(t: Rational, f: Rational, u: Rational, e: Rational) -> Result<Self> {
        for (name, c) in [("t", &t), ("f", &f), ("u", &u), ("e", &e)] {
            if c.is_negative() || *c > Rational::one() {
                return Err(Error::InvalidTruth(format!(
                    "component {name} = {} is outside [0,1]",
                    render_rational(c)
                )));
            }
        }
        let sum = &t + &f + &u + &e;
        if !sum.is_one() {
            return Err(Error::InvalidTruth(format!(
                "components sum to {}, not 1",
                render_rational(&sum)
            )));
        }
        Ok(Self { t, f, u, e })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(parts: [(i64, i64); 4]) -> Result<Self> {
        let mut c = parts.iter().map(|&(n, d)| {
            if d == 0 {
                Err(Error::InvalidTruth("zero denominator".into()))
            } else {
                Ok(Rational::new(BigInt::from(n), BigInt::from(d)))
            }
        });
        let t = c.next().unwrap()?;
        let f = c.next().unwrap()?;
        let u = c.next().unwrap()?;
        let e = c.next().unwrap()?;
        Self::new(t, f, u, e)
    }

    /// The disjunction unit `(0, 1, 0, 0)`.
    pub fn zero() -> Self {
        Self {
            t: Rational::zero(),
            f: Rational::one(),
            u: Rational::zero(),
            e: Rational::zero(),
        }
    }

    /// The conjunction unit `(1, 0, 0, 0)`.
    pub fn one() -> Self {
        Self {
            t: Rational::one(),
            f: Rational::zero(),
            u: Rational::zero(),
            e: Rational::zero(),
        }
    }

    /// `one()` for `true`, `zero()` for `false`.
    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn f(&self) -> &Rational {
        &self.f
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }

    pub fn e(&self) -> &Rational {
        &self.e
    }

    pub fn components(&self) -> [&Rational; 4] {
        [&self.t, &self.f, &self.u, &self.e]
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_one()
    }

    pub fn is_one(&self) -> bool {
        self.t.is_one()
    }

    /// Renders the quadruple with each component as a decimal approximation.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let parts: Vec<String> = self
            .components()
            .iter()
            .map(|c| format!("{:.*}", digits, c.to_f64().unwrap_or(f64::NAN)))
            .collect();
        format!("<{}>", parts.join(","))
    }
}

/// MK-disjunction:
/// `(t1 + (f1+u1)t2, f1 f2, f1 u2 + u1 (f2+u2), e1 + (f1+u1) e2)`.
pub fn disj(a: &TruthValue, b: &TruthValue) -> TruthValue {
    let fu = &a.f + &a.u;
    TruthValue {
        t: &a.t + &fu * &b.t,
        f: &a.f * &b.f,
        u: &a.f * &b.u + &a.u * (&b.f + &b.u),
        e: &a.e + &fu * &b.e,
    }
}

/// MK-conjunction:
/// `(t1 t2, f1 + (t1+u1) f2, t1 u2 + u1 (t2+u2), e1 + (t1+u1) e2)`.
pub fn conj(a: &TruthValue, b: &TruthValue) -> TruthValue {
    let tu = &a.t + &a.u;
    TruthValue {
        t: &a.t * &b.t,
        f: &a.f + &tu * &b.f,
        u: &a.t * &b.u + &a.u * (&b.t + &b.u),
        e: &a.e + &tu * &b.e,
    }
}

/// Left-to-right disjunction of a sequence; the empty fold is `zero()`.
pub fn disj_fold<'a, I>(values: I) -> TruthValue
where
    I: IntoIterator<Item = &'a TruthValue>,
{
    values
        .into_iter()
        .fold(TruthValue::zero(), |acc, v| disj(&acc, v))
}

/// Left-to-right conjunction of a sequence; the empty fold is `one()`.
pub fn conj_fold<'a, I>(values: I) -> TruthValue
where
    I: IntoIterator<Item = &'a TruthValue>,
{
    values
        .into_iter()
        .fold(TruthValue::one(), |acc, v| conj(&acc, v))
}

/// Parses `<t,f,u,e>` where each component is an integer, `p/q`, or a
/// finite decimal. Decimals are converted exactly.
pub fn parse_truth(text: &str) -> Result<TruthValue> {
    let bad = |reason: &str| Error::TruthLiteral {
        literal: text.to_string(),
        reason: reason.to_string(),
    };
    let inner = text
        .trim()
        .strip_prefix('<')
        .and_then(|s| s.strip_suffix('>'))
        .ok_or_else(|| bad("expected `<t,f,u,e>`"))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(bad("expected exactly four components"));
    }
    let mut comps = Vec::with_capacity(4);
    for p in parts {
        comps.push(parse_rational(p).map_err(|r| bad(&r))?);
    }
    let e = comps.pop().unwrap();
    let u = comps.pop().unwrap();
    let f = comps.pop().unwrap();
    let t = comps.pop().unwrap();
    TruthValue::new(t, f, u, e).map_err(|err| match err {
        Error::InvalidTruth(reason) => bad(&reason),
        other => other,
    })
}

/// Parses an integer, a fraction `p/q` with `q > 0`, or a finite decimal.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    if s.is_empty() {
        return Err("empty component".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_int(n)?;
        let d = parse_int(d)?;
        if !d.is_positive() {
            return Err(format!("denominator of `{s}` must be positive"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.starts_with('-');
        let digits_int = int_part.trim_start_matches(['-', '+']);
        if (digits_int.is_empty() && frac_part.is_empty())
            || !digits_int.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(format!("`{s}` is not a finite decimal"));
        }
        let all_digits = format!("{digits_int}{frac_part}");
        let mut num: BigInt = if all_digits.is_empty() {
            BigInt::zero()
        } else {
            all_digits.parse().map_err(|_| format!("`{s}` is not a number"))?
        };
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
        return Ok(Rational::new(num, den));
    }
    Ok(Rational::from_integer(parse_int(s)?))
}

fn parse_int(s: &str) -> std::result::Result<BigInt, String> {
    let digits = s.trim_start_matches(['-', '+']);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("`{s}` is not an integer"));
    }
    s.parse().map_err(|_| format!("`{s}` is not an integer"))
}

/// Canonical rendering: `p/q` in lowest terms, or a bare integer.
pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<{},{},{},{}>",
            render_rational(&self.t),
            render_rational(&self.f),
            render_rational(&self.u),
            render_rational(&self.e)
        )
    }
}

impl fmt::Debug for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TruthValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_truth(s)
    }
}

impl Serialize for TruthValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k1() -> TruthValue {
        "<3/10,1/5,2/5,1/10>".parse().unwrap()
    }

    fn k2() -> TruthValue {
        "<9/10,1/20,3/100,1/50>".parse().unwrap()
    }

    #[test]
    fn disj_with_zero_is_identity() {
        assert_eq!(disj(&TruthValue::zero(), &k1()), k1());
        assert_eq!(disj(&k1(), &TruthValue::zero()), k1());
    }

    #[test]
    fn disj_witnesses_order() {
        let expected: TruthValue = "<21/25,1/100,19/500,14/125>".parse().unwrap();
        assert_eq!(disj(&k1(), &k2()), expected);
        let swapped: TruthValue = "<231/250,1/100,19/500,7/250>".parse().unwrap();
        assert_eq!(disj(&k2(), &k1()), swapped);
    }

    #[test]
    fn conj_units_and_zero_laws() {
        let k = k1();
        assert_eq!(conj(&TruthValue::one(), &k), k);
        assert_eq!(conj(&TruthValue::zero(), &k), TruthValue::zero());
        let right = conj(&k, &TruthValue::zero());
        let expected = TruthValue::new(
            Rational::zero(),
            k.t() + k.f() + k.u(),
            Rational::zero(),
            k.e().clone(),
        )
        .unwrap();
        assert_eq!(right, expected);
        assert_eq!(right.to_string(), "<0,9/10,0,1/10>");
    }

    #[test]
    fn folds() {
        assert_eq!(disj_fold([]), TruthValue::zero());
        assert_eq!(conj_fold([]), TruthValue::one());
        assert_eq!(disj_fold([&k1()]), k1());
        assert_eq!(conj_fold([&k1()]), k1());
        assert_eq!(disj_fold([&k1(), &k2()]), disj(&k1(), &k2()));
        assert_eq!(conj_fold([&TruthValue::zero(), &k1()]), TruthValue::zero());
    }

    #[test]
    fn parse_decimal_exactly() {
        assert_eq!("<0.3,0.2,0.4,0.1>".parse::<TruthValue>().unwrap(), k1());
        assert_eq!("<1,0,0,0>".parse::<TruthValue>().unwrap(), TruthValue::one());
        assert_eq!(
            "< 0.25 , 1/4 , .25, 0.250 >".parse::<TruthValue>().unwrap(),
            TruthValue::from_ratios([(1, 4), (1, 4), (1, 4), (1, 4)]).unwrap()
        );
    }

    #[test]
    fn parse_rejects_bad_literals() {
        let err = "<1/2,1/2,1/2,0>".parse::<TruthValue>().unwrap_err();
        assert!(err.to_string().contains("sum"), "{err}");
        assert!("<1,0,0>".parse::<TruthValue>().is_err());
        assert!("1,0,0,0".parse::<TruthValue>().is_err());
        assert!("<2,-1,0,0>".parse::<TruthValue>().is_err());
        assert!("<1/0,0,0,0>".parse::<TruthValue>().is_err());
        assert!("<a,0,0,0>".parse::<TruthValue>().is_err());
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(TruthValue::zero().to_string(), "<0,1,0,0>");
        assert_eq!(k2().to_string(), "<9/10,1/20,3/100,1/50>");
        assert_eq!(k1().to_decimal_string(2), "<0.30,0.20,0.40,0.10>");
    }
}
