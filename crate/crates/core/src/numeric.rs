//! Small numeric helpers shared across modules.

use crate::C64;

/// A complex value is treated as the integer `m` when `|value − m| ≤ INTEGER_TOL`.
pub const INTEGER_TOL: f64 = 1e-9;

/// Returns `Some(m)` when `z` equals the non-positive integer `−m` within
/// [`INTEGER_TOL`].
pub fn as_nonpositive_integer(z: C64) -> Option<u32> {
    let m = z.re.round();
    if m <= 0.0 && (z - C64::new(m, 0.0)).norm() <= INTEGER_TOL && m > -(u32::MAX as f64) {
        Some((-m) as u32)
    } else {
        None
    }
}

/// Returns `Some(m)` when `z` equals the integer `m` within [`INTEGER_TOL`].
pub fn as_integer(z: C64) -> Option<i64> {
    let m = z.re.round();
    if (z - C64::new(m, 0.0)).norm() <= INTEGER_TOL && m.abs() < i64::MAX as f64 {
        Some(m as i64)
    } else {
        None
    }
}

pub fn is_zero(z: C64) -> bool {
    z.norm() <= INTEGER_TOL
}

pub fn near(a: C64, b: C64) -> bool {
    (a - b).norm() <= INTEGER_TOL
}

/// `|a − b| / max(1, |a|, |b|)`.
pub fn relative_gap(a: C64, b: C64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// Rising factorial `(a)ₙ = a(a+1)…(a+n−1)`.
pub fn pochhammer(a: C64, n: usize) -> C64 {
    (0..n).fold(C64::new(1.0, 0.0), |acc, k| acc * (a + k as f64))
}
