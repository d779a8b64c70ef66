use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Exponents attached to a signature `(p, q)` of an indefinite form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureExponents {
    pub signature: (usize, usize),
    #[serde(with = "rational_str")]
    pub kappa0: Rational,
    #[serde(with = "opt_rational_str")]
    pub kappa1: Option<Rational>,
    /// True when `kappa0` comes from the special-case list rather than
    /// `κ₀ = 2κ₁q(p−1)`.
    pub special: bool,
}

fn kappa1_generic(n: usize) -> Rational {
    let n = n as i64;
    let denom = match n % 4 {
        0 => n,
        1 => n - 1,
        2 => n - 2,
        _ => n + 1,
    };
    Rational::new(1, denom)
}

fn special_kappa0(p: usize, q: usize) -> Option<Rational> {
    match (p, q) {
        (2, 1) => Some(Rational::from_integer(1)),
        (p, 1) if p + 1 >= 4 => Some(Rational::from_integer(2)),
        (2, 2) => Some(Rational::from_integer(2)),
        (4, 2) | (3, 3) => Some(Rational::new(3, 2)),
        (6, 3) => Some(Rational::new(5, 2)),
        _ => None,
    }
}

/// Signature-indexed exponent table for `p ≥ q ≥ 1`, `p + q ≥ 3`.
///
/// Special signatures carry their listed `κ₀`; their `κ₁` is the value tied
/// to it by `κ₁ = κ₀ / (2q(p−1))`. All other signatures use the `n mod 4`
/// table for `κ₁` and `κ₀ = 2κ₁q(p−1)`.
pub fn kappa_table(p: usize, q: usize) -> Result<SignatureExponents> {
    if q < 1 || p < q || p + q < 3 {
        return Err(Error::invalid(
            "signature",
            format!("signature ({p},{q}) must satisfy p ≥ q ≥ 1 and p+q ≥ 3"),
        ));
    }
    let link = Rational::from_integer(2 * q as i64 * (p as i64 - 1));
    Ok(match special_kappa0(p, q) {
        Some(k0) => SignatureExponents {
            signature: (p, q),
            kappa0: k0,
            kappa1: Some(k0 / link),
            special: true,
        },
        None => {
            let k1 = kappa1_generic(p + q);
            SignatureExponents {
                signature: (p, q),
                kappa0: k1 * link,
                kappa1: Some(k1),
                special: false,
            }
        }
    })
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|e| format!("bad numerator {n:?}: {e}"))?;
    let d: i64 = d.parse().map_err(|e| format!("bad denominator {d:?}: {e}"))?;
    if d == 0 {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(n, d))
}

mod rational_str {
    use super::*;
    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

mod opt_rational_str {
    use super::*;
    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}
