//! JSON schemas for series data with exact float round-tripping.
//!
//! Every limb is serialized as a hexadecimal floating literal (the
//! authoritative value) paired with a decimal rendering for human readers.
//! Parsing reads the hex form, so no precision is lost to decimal rounding.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::Complex;
use crate::md::MultiDouble;
use crate::series::{Series, SeriesVec};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum JsonError {
    #[error("cannot parse hex float literal {0:?}")]
    BadHexFloat(String),
    #[error("expected {expected} limbs, found {found}")]
    LimbCountMismatch { expected: usize, found: usize },
    #[error("series schema error: {0}")]
    Schema(String),
}

/// Render a double as a hexadecimal floating literal: sign, hex mantissa,
/// binary exponent. The rendering is canonical per bit pattern.
pub fn hex_format(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf".to_string() } else { "inf".to_string() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_field == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    if exp_field == 0 {
        // Subnormal: 0x0.<frac>p-1022.
        return format!("{sign}0x0.{frac:013x}p-1022");
    }
    let exp = exp_field - 1023;
    format!("{sign}0x1.{frac:013x}p{exp:+}")
}

/// Parse the output of [`hex_format`].
pub fn hex_parse(s: &str) -> Result<f64, JsonError> {
    let bad = || JsonError::BadHexFloat(s.to_string());
    match s {
        "nan" => return Ok(f64::NAN),
        "inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let (sign, rest) = match s.strip_prefix('-') {
        Some(rest) => (1u64 << 63, rest),
        None => (0, s),
    };
    let rest = rest.strip_prefix("0x").ok_or_else(bad)?;
    let (mantissa, exp_str) = rest.split_once('p').ok_or_else(bad)?;
    let exp: i64 = exp_str.parse().map_err(|_| bad())?;

    let (lead, frac_str) = match mantissa.split_once('.') {
        Some((l, f)) => (l, f),
        None => (mantissa, ""),
    };
    let frac = if frac_str.is_empty() {
        0u64
    } else {
        if frac_str.len() != 13 {
            return Err(bad());
        }
        u64::from_str_radix(frac_str, 16).map_err(|_| bad())?
    };
    let bits = match lead {
        "0" if frac == 0 && exp == 0 => sign,
        "0" if exp == -1022 => sign | frac,
        "1" => {
            let exp_field = exp + 1023;
            if !(1..=2046).contains(&exp_field) {
                return Err(bad());
            }
            sign | ((exp_field as u64) << 52) | frac
        }
        _ => return Err(bad()),
    };
    Ok(f64::from_bits(bits))
}

/// One limb: exact hex literal plus decimal rendering.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LimbRepr {
    pub hex: String,
    pub dec: f64,
}

impl LimbRepr {
    pub fn of(x: f64) -> Self {
        LimbRepr { hex: hex_format(x), dec: x }
    }

    pub fn value(&self) -> Result<f64, JsonError> {
        hex_parse(&self.hex)
    }
}

pub fn md_to_repr<T: MultiDouble>(v: &T) -> Vec<LimbRepr> {
    v.limbs().iter().map(|&l| LimbRepr::of(l)).collect()
}

pub fn md_from_repr<T: MultiDouble>(repr: &[LimbRepr]) -> Result<T, JsonError> {
    if repr.len() != T::LIMBS {
        return Err(JsonError::LimbCountMismatch { expected: T::LIMBS, found: repr.len() });
    }
    let limbs: Result<Vec<f64>, JsonError> = repr.iter().map(|l| l.value()).collect();
    Ok(T::from_limbs(&limbs?))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexRepr {
    pub re: Vec<LimbRepr>,
    pub im: Vec<LimbRepr>,
}

impl ComplexRepr {
    pub fn of<T: MultiDouble>(z: &Complex<T>) -> Self {
        ComplexRepr { re: md_to_repr(&z.re), im: md_to_repr(&z.im) }
    }

    pub fn value<T: MultiDouble>(&self) -> Result<Complex<T>, JsonError> {
        Ok(Complex::new(md_from_repr(&self.re)?, md_from_repr(&self.im)?))
    }
}

/// A scalar series: coefficient k of t^k is `coeffs[k]`, each an array of
/// limb arrays (real limbs then imaginary limbs).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesRepr {
    pub order: usize,
    pub limbs: usize,
    pub coeffs: Vec<ComplexRepr>,
}

impl SeriesRepr {
    pub fn of<T: MultiDouble>(s: &Series<T>) -> Self {
        SeriesRepr {
            order: s.order(),
            limbs: T::LIMBS,
            coeffs: s.coeffs.iter().map(ComplexRepr::of).collect(),
        }
    }

    pub fn value<T: MultiDouble>(&self) -> Result<Series<T>, JsonError> {
        if self.limbs != T::LIMBS {
            return Err(JsonError::LimbCountMismatch { expected: T::LIMBS, found: self.limbs });
        }
        if self.coeffs.len() != self.order {
            return Err(JsonError::Schema(format!(
                "order {} but {} coefficients",
                self.order,
                self.coeffs.len()
            )));
        }
        let coeffs: Result<Vec<Complex<T>>, JsonError> =
            self.coeffs.iter().map(|c| c.value()).collect();
        Ok(Series { coeffs: coeffs? })
    }
}

/// A vector series: `coeffs[k][i]` is entry i of coefficient vector k.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesVecRepr {
    pub dim: usize,
    pub order: usize,
    pub limbs: usize,
    pub coeffs: Vec<Vec<ComplexRepr>>,
}

impl SeriesVecRepr {
    pub fn of<T: MultiDouble>(v: &SeriesVec<T>) -> Self {
        SeriesVecRepr {
            dim: v.dim(),
            order: v.order(),
            limbs: T::LIMBS,
            coeffs: (0..v.order())
                .map(|k| (0..v.dim()).map(|i| ComplexRepr::of(&v.coeff(k).get(i))).collect())
                .collect(),
        }
    }

    pub fn value<T: MultiDouble>(&self) -> Result<SeriesVec<T>, JsonError> {
        if self.limbs != T::LIMBS {
            return Err(JsonError::LimbCountMismatch { expected: T::LIMBS, found: self.limbs });
        }
        let mut v = SeriesVec::zeros(self.dim, self.order);
        for (k, row) in self.coeffs.iter().enumerate() {
            if row.len() != self.dim {
                return Err(JsonError::Schema(format!(
                    "coefficient {k} has {} entries for dimension {}",
                    row.len(),
                    self.dim
                )));
            }
            for (i, c) in row.iter().enumerate() {
                v.coeff_mut(k).set(i, c.value()?);
            }
        }
        Ok(v)
    }
}
