use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Floor applied to the Bhattacharyya coefficient before taking the log.
pub const BC_FLOOR: f64 = 1e-12;
/// `-ln(BC_FLOOR)`, the largest Bhattacharyya distance returned.
pub const MAX_BHATTACHARYYA: f64 = 27.631_021_115_928_547;

fn check_shapes(f: &[f64], g: &[f64]) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::Argument(format!(
            "distance between tensors of {} and {} entries",
            f.len(),
            g.len()
        )));
    }
    Ok(())
}

/// `-ln(sum sqrt(f_i * g_i))`, with the coefficient floored at [`BC_FLOOR`].
pub fn bhattacharyya(f: &[f64], g: &[f64]) -> Result<f64> {
    check_shapes(f, g)?;
    let bc: f64 = f.iter().zip(g).map(|(a, b)| (a * b).sqrt()).sum();
    Ok(-bc.max(BC_FLOOR).ln())
}

/// Sum of absolute differences.
pub fn manhattan(f: &[f64], g: &[f64]) -> Result<f64> {
    check_shapes(f, g)?;
    Ok(f.iter().zip(g).map(|(a, b)| (a - b).abs()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    #[default]
    Bhattacharyya,
    Manhattan,
}

impl Metric {
    pub fn distance(self, f: &[f64], g: &[f64]) -> Result<f64> {
        match self {
            Metric::Bhattacharyya => bhattacharyya(f, g),
            Metric::Manhattan => manhattan(f, g),
        }
    }

    /// Per-item transform applied once when a vector is stored or queried.
    /// Bhattacharyya keeps square roots so each distance is one inner product.
    pub(crate) fn prepare(self, v: &[f64]) -> Vec<f64> {
        match self {
            Metric::Bhattacharyya => v.iter().map(|x| x.sqrt()).collect(),
            Metric::Manhattan => v.to_vec(),
        }
    }

    /// Distance between two prepared vectors of equal length. Symmetric bit-for-bit.
    pub(crate) fn prepared_distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::Bhattacharyya => {
                let bc = lanes(a, b, |x, y| x * y);
                -bc.max(BC_FLOOR).ln()
            }
            Metric::Manhattan => lanes(a, b, |x, y| (x - y).abs()),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Metric::Bhattacharyya => "DB",
            Metric::Manhattan => "L1",
        }
    }
}

// Four independent accumulators, combined in a fixed order.
fn lanes(a: &[f64], b: &[f64], op: impl Fn(f64, f64) -> f64) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in ca.by_ref().zip(cb.by_ref()) {
        for l in 0..4 {
            acc[l] += op(x[l], y[l]);
        }
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| op(*x, *y)).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Bhattacharyya => write!(f, "bhattacharyya"),
            Metric::Manhattan => write!(f, "manhattan"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "db" | "bhattacharyya" => Ok(Metric::Bhattacharyya),
            "l1" | "manhattan" => Ok(Metric::Manhattan),
            other => Err(Error::Argument(format!("unknown metric `{other}` (expected db or l1)"))),
        }
    }
}
