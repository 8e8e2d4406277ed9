//! Shared conventions for Boolean-cube domains.
//!
//! Points of `{-1,1}^n` are indexed `0..2^n`. Coordinate `j` (1-based,
//! `x_1..x_n`) lives at bit position `n - j`, so `x_1` is the most
//! significant bit and the point id is the index written as an `n`-character
//! binary string. A bit value of 0 means coordinate value `+1`, a bit value
//! of 1 means `-1`; with that convention the parity over a subset mask `S` is
//! `(-1)^popcount(i & S)`.

/// Canonical point ids for the `n`-cube: binary strings, `x_1` first.
pub fn point_ids(n: u32) -> Vec<String> {
    (0..1u64 << n)
        .map(|i| {
            (0..n)
                .map(|b| {
                    if i >> (n - 1 - b) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect()
        })
        .collect()
}

/// Coordinate value `x_j` of point `i` as a sign.
pub fn coord_value(i: u64, j: u32, n: u32) -> f64 {
    if i >> (n - j) & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Bitmask of a coordinate subset (1-based coordinates).
pub fn subset_mask(coords: &[u32], n: u32) -> u64 {
    coords.iter().fold(0u64, |m, &j| m | 1 << (n - j))
}

/// Coordinates (1-based, ascending) of a subset mask.
pub fn mask_to_coords(mask: u64, n: u32) -> Vec<u32> {
    (1..=n).filter(|&j| mask >> (n - j) & 1 == 1).collect()
}

/// `chi_S(i) = prod_{j in S} x_j`.
pub fn parity_value(i: u64, mask: u64) -> f64 {
    if (i & mask).count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Human-readable parity name; the empty subset is the constant one.
pub fn parity_name(mask: u64, n: u32) -> String {
    if mask == 0 {
        "one".to_string()
    } else {
        let coords: Vec<String> = mask_to_coords(mask, n)
            .into_iter()
            .map(|j| j.to_string())
            .collect();
        format!("chi_{}", coords.join("_"))
    }
}

/// Returns `n` when the instance's points are exactly the canonical ids of
/// the `n`-cube in order.
pub fn hypercube_dimension(points: &[String]) -> Option<u32> {
    let len = points.len();
    if len < 2 || !len.is_power_of_two() {
        return None;
    }
    let n = len.trailing_zeros();
    let canonical = point_ids(n);
    if points == canonical.as_slice() {
        Some(n)
    } else {
        None
    }
}
