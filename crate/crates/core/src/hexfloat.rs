//! C99 `%a`-style hexadecimal float text, exact in both directions.

use serde::{Deserialize, Deserializer, Serializer};

pub fn format(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if biased == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if biased == 0 { (0, -1022) } else { (1, biased - 1023) };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let es = if exp >= 0 { format!("+{exp}") } else { exp.to_string() };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{es}")
    } else {
        format!("{sign}0x{lead}.{digits}p{es}")
    }
}

pub fn parse(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "nan" => return Some(f64::NAN),
        "inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (mant, exp) = rest.split_once(['p', 'P'])?;
    let exp: i64 = exp.parse().ok()?;
    let (lead, digits) = match mant.split_once('.') {
        Some((l, d)) => (l, d),
        None => (mant, ""),
    };
    let lead = u64::from_str_radix(lead, 16).ok()?;
    if lead > 1 || digits.len() > 13 {
        return None;
    }
    let frac = if digits.is_empty() {
        0
    } else {
        u64::from_str_radix(digits, 16).ok()? << (4 * (13 - digits.len()))
    };
    let bits = match (lead, frac) {
        (0, 0) => 0,
        (0, f) if exp == -1022 => f,
        (1, f) if (-1022..=1023).contains(&exp) => (((exp + 1023) as u64) << 52) | f,
        _ => return None,
    };
    let v = f64::from_bits(bits);
    Some(if neg { -v } else { v })
}

/// Serde adapter: `#[serde(with = "crate::hexfloat")]`.
pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format(*x))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let text = String::deserialize(d)?;
    parse(&text).ok_or_else(|| serde::de::Error::custom(format!("bad hex float {text:?}")))
}
