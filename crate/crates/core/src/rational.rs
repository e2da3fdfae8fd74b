//! Exact rationals and their text forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"` or `"n/d"` (optional sign, surrounding whitespace allowed).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Strict `"p/q"` form, used in JSON and CSV (`"1/1"` for one).
pub fn to_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod pq {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_pq(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).ok_or_else(|| D::Error::custom(format!("bad rational {text:?}")))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&to_pq(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rational(t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}"))))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_rational("6/4"), Some(rat(3, 2)));
        assert_eq!(parse_rational(" -2 "), Some(int(-2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(to_pq(&int(1)), "1/1");
        assert_eq!(to_pq(&rat(-2, 6)), "-1/3");
    }

    #[test]
    fn lcm_of_denominators() {
        let v = [rat(1, 2), rat(1, 3), int(4)];
        assert_eq!(denominator_lcm(&v), BigInt::from(6));
    }
}
