//! Unit-suffixed quantities used in scenario files.
//!
//! Every numeric field of a scenario file may be written either as a bare
//! number (already in base SI) or as a string carrying a unit suffix, e.g.
//! `"0.1 Gbps"`, `"11 TOPS"`, `"30 nJ/bit"`, `"5 ms"`. Values are normalized
//! to bits/s, ops/s, operations, watts, joules/bit, seconds and plain
//! fractions at load time. `"inf"` is accepted wherever infinity is legal.

use serde::{Deserialize, Serializer};
use std::fmt;

/// Physical dimension of a scenario field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// bits per second
    Bandwidth,
    /// operations per second
    ComputeRate,
    /// operations
    Operations,
    /// watts
    Power,
    /// joules per bit
    EnergyPerBit,
    /// seconds
    Time,
    /// dimensionless; `%` suffix divides by 100
    Fraction,
    /// plain count (features, bits per feature, inferences per second)
    Count,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Bandwidth => "bandwidth",
            Dimension::ComputeRate => "compute rate",
            Dimension::Operations => "operations",
            Dimension::Power => "power",
            Dimension::EnergyPerBit => "energy per bit",
            Dimension::Time => "time",
            Dimension::Fraction => "fraction",
            Dimension::Count => "count",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot read {text:?} as {dimension}: {reason}")]
pub struct UnitError {
    pub text: String,
    pub dimension: Dimension,
    pub reason: String,
}

/// A raw quantity as it appears in a file: a number or a suffixed string.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RawQuantity {
    Number(f64),
    Text(String),
}

impl RawQuantity {
    pub fn resolve(&self, dimension: Dimension) -> Result<f64, UnitError> {
        match self {
            RawQuantity::Number(v) => Ok(*v),
            RawQuantity::Text(t) => parse_quantity(t, dimension),
        }
    }
}

fn scale_for(dimension: Dimension, unit: &str) -> Option<f64> {
    let lower = unit.to_ascii_lowercase();
    let u = lower.as_str();
    let scale = match dimension {
        Dimension::Bandwidth => match u {
            "bps" | "bit/s" | "b/s" => 1.0,
            "kbps" => 1e3,
            "mbps" => 1e6,
            "gbps" => 1e9,
            "tbps" => 1e12,
            _ => return None,
        },
        Dimension::ComputeRate => match u {
            "ops" | "op/s" | "ops/s" => 1.0,
            "kops" => 1e3,
            "mops" => 1e6,
            "gops" => 1e9,
            "tops" => 1e12,
            _ => return None,
        },
        Dimension::Operations => match u {
            "op" | "ops" => 1.0,
            "kops" => 1e3,
            "mops" => 1e6,
            "gops" => 1e9,
            "tops" => 1e12,
            _ => return None,
        },
        Dimension::Power => match u {
            "w" => 1.0,
            "mw" => 1e-3,
            "kw" => 1e3,
            _ => return None,
        },
        Dimension::EnergyPerBit => match u {
            "j/bit" => 1.0,
            "mj/bit" => 1e-3,
            "uj/bit" => 1e-6,
            "nj/bit" => 1e-9,
            "pj/bit" => 1e-12,
            _ => return None,
        },
        Dimension::Time => match u {
            "s" => 1.0,
            "ms" => 1e-3,
            "us" => 1e-6,
            "ns" => 1e-9,
            _ => return None,
        },
        Dimension::Fraction => match u {
            "%" => 1e-2,
            _ => return None,
        },
        Dimension::Count => return None,
    };
    Some(scale)
}

/// Parses `"<number> <unit>"` (space optional) into base SI for `dimension`.
pub fn parse_quantity(text: &str, dimension: Dimension) -> Result<f64, UnitError> {
    let err = |reason: &str| UnitError {
        text: text.to_string(),
        dimension,
        reason: reason.to_string(),
    };
    let trimmed = text.trim();
    if trimmed.eq_ignore_ascii_case("inf") || trimmed.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    let split = trimmed
        .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
        .unwrap_or(trimmed.len());
    // an exponent marker directly followed by a unit letter belongs to the unit
    let (mut number, mut unit) = trimmed.split_at(split);
    while number.ends_with(['e', 'E']) {
        let cut = number.len() - 1;
        unit = &trimmed[cut..];
        number = &trimmed[..cut];
    }
    let value: f64 = number.trim().parse().map_err(|_| err("not a number"))?;
    let unit = unit.trim();
    if unit.is_empty() {
        return Ok(value);
    }
    let scale = scale_for(dimension, unit).ok_or_else(|| err("unknown unit suffix"))?;
    Ok(value * scale)
}

/// Serializes a finite value as a JSON number and infinity as `"inf"`.
pub fn serialize_f64<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if value.is_infinite() && value.is_sign_positive() {
        serializer.serialize_str("inf")
    } else {
        serializer.serialize_f64(*value)
    }
}
