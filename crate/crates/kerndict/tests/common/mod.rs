//! Strategies shared by the property-test targets.

#![allow(dead_code)]

use proptest::prelude::*;

use kerndict::{Dictionary, KernelSpec};

/// Drops every point closer than `min_sep` (euclidean) to one already kept,
/// so shrinking toward duplicate points cannot manufacture singular Gram
/// matrices that no continuous draw would hit.
pub fn greedy_separate(points: Vec<Vec<f64>>, min_sep: f64) -> Vec<Vec<f64>> {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let far_enough = kept.iter().all(|q| {
            let d_sq: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            d_sq >= min_sep * min_sep
        });
        if far_enough {
            kept.push(p);
        }
    }
    kept
}

/// Two to eight points in one to four dimensions, pairwise at least
/// `min_sep` apart, coordinates in `[-3, 3]`.
pub fn separated_points(min_sep: f64) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=8, 1usize..=4)
        .prop_flat_map(|(n, dim)| {
            proptest::collection::vec(proptest::collection::vec(-3.0..3.0f64, dim), n)
        })
        .prop_map(move |points| greedy_separate(points, min_sep))
        .prop_filter("need at least two separated points", |points| points.len() >= 2)
}

/// Gaussian bandwidths away from both degenerate extremes.
pub fn bandwidths() -> impl Strategy<Value = f64> {
    0.4..2.5f64
}

pub fn gaussian_dictionaries() -> impl Strategy<Value = Dictionary> {
    (separated_points(0.05), bandwidths()).prop_map(|(points, sigma)| {
        Dictionary::new(points, KernelSpec::gaussian(sigma).unwrap()).unwrap()
    })
}

/// Strictly positive unnormalized plug-in vectors.
pub fn plug_in_vectors() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(1e-6..1.0f64, 1..=12)
}

pub fn normalized(p: &[f64]) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    p.iter().map(|v| v / total).collect()
}
