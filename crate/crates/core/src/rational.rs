//! Exact rationals and their text forms.
//!
//! Text form is `p/q` or a plain integer (what `Ratio`'s `Display` emits),
//! with decimals like `1.25` accepted on input.

use std::str::FromStr;

use num_integer::Integer;
use num_traits::Zero;

pub type Rational = num_rational::Ratio<i64>;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

pub fn parse(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = i64::from_str(p.trim()).map_err(|e| format!("bad numerator {p:?}: {e}"))?;
        let q = i64::from_str(q.trim()).map_err(|e| format!("bad denominator {q:?}: {e}"))?;
        if q == 0 {
            return Err("zero denominator".into());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(format!("bad decimal {s:?}"));
        }
        let w = if digits.is_empty() {
            0
        } else {
            i64::from_str(digits).map_err(|e| format!("bad decimal {s:?}: {e}"))?
        };
        let den = 10i64.pow(frac.len() as u32);
        let f = i64::from_str(frac).map_err(|e| format!("bad decimal {s:?}: {e}"))?;
        let num = w
            .checked_mul(den)
            .and_then(|x| x.checked_add(f))
            .ok_or_else(|| format!("decimal {s:?} out of range"))?;
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    i64::from_str(s)
        .map(Rational::from_integer)
        .map_err(|e| format!("bad number {s:?}: {e}"))
}

pub fn format(r: &Rational) -> String {
    r.to_string()
}

/// Smallest integer `>= r`.
pub fn ceil_int(r: &Rational) -> i64 {
    r.ceil().to_integer()
}

/// Largest integer `<= r`.
pub fn floor_int(r: &Rational) -> i64 {
    r.floor().to_integer()
}

pub(crate) fn lcm_checked(a: i64, b: i64) -> Option<i64> {
    if a.is_zero() || b.is_zero() {
        return Some(0);
    }
    let g = a.gcd(&b);
    (a / g).checked_mul(b)
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_str_vec {
    use super::Rational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_str_opt {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&super::format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let v = Option::<String>::deserialize(d)?;
        v.map(|s| super::parse(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("3/6").unwrap(), Rational::new(1, 2));
        assert_eq!(parse("1.25").unwrap(), Rational::new(5, 4));
        assert_eq!(parse("-0.5").unwrap(), Rational::new(-1, 2));
        assert_eq!(parse(".5").unwrap(), Rational::new(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn formats_integers_plainly() {
        assert_eq!(format(&int(0)), "0");
        assert_eq!(format(&Rational::new(6, 4)), "3/2");
    }
}
