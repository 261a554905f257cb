//! Command-line front end: mesh export, verification reports, rigid motions
//! and Liouville fields. All numbers are written with 17 significant digits.

pub mod cli;
pub mod mesh;
pub mod report;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::grid::GridSpec;
use crate::weierstrass::WeierstrassChart;

/// `x` in scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

/// A float serialized as a JSON number with 17 significant digits, or
/// `null` when not finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// The valid node nearest to `target`, ties broken by node index.
pub fn base_node(chart: &WeierstrassChart, spec: GridSpec, target: (f64, f64)) -> Option<(usize, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for idx in 0..spec.len() {
        let (i, j) = spec.coords(idx);
        let (x, y) = spec.point(i, j);
        if !chart.is_valid(chart.point(x, y)) {
            continue;
        }
        let d = (x - target.0).powi(2) + (y - target.1).powi(2);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, idx));
        }
    }
    best.map(|(_, idx)| spec.coords(idx))
}
