#![allow(dead_code)]

use std::collections::HashMap;

use mvop_core::measures::{discrete_functional, table_functional, DiscreteMeasure, Functional};
use mvop_core::polynomial::{monomials_up_to, MultiIndex};
use mvop_core::{Rational, Scalar};
use proptest::prelude::*;

pub type Q = Rational;

pub fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

pub fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

pub fn four_points() -> DiscreteMeasure<Q> {
    let p = |a, b| vec![q(a, 1), q(b, 1)];
    DiscreteMeasure::new(vec![p(1, 1), p(-1, 1), p(-1, -1), p(1, -1)], vec![q(1, 4); 4]).unwrap()
}

pub fn skew_points() -> DiscreteMeasure<Q> {
    let p = |a, b| vec![q(a, 1), q(b, 1)];
    DiscreteMeasure::new(vec![p(2, 0), p(1, 1), p(0, 0), p(1, -1)], vec![q(1, 4); 4]).unwrap()
}

pub fn to_float(m: &DiscreteMeasure<Q>) -> DiscreteMeasure<f64> {
    DiscreteMeasure::new(
        m.atoms().iter().map(|a| a.iter().map(|v| v.to_f64()).collect()).collect(),
        m.weights().iter().map(|w| w.to_f64()).collect(),
    )
    .unwrap()
}

/// Random measure on at most six distinct points of `(¼ℤ ∩ [−2, 2])²`
/// with positive rational weights.
pub fn rational_measure() -> impl Strategy<Value = DiscreteMeasure<Q>> {
    prop::collection::btree_set((-8i64..=8, -8i64..=8), 1..=6)
        .prop_flat_map(|pts| {
            let k = pts.len();
            (Just(pts), prop::collection::vec(1i64..=5, k))
        })
        .prop_map(|(pts, w)| {
            let total: i64 = w.iter().sum();
            DiscreteMeasure::new(
                pts.iter().map(|&(a, b)| vec![q(a, 4), q(b, 4)]).collect(),
                w.iter().map(|&v| q(v, total)).collect(),
            )
            .unwrap()
        })
}

pub fn rational_functional() -> impl Strategy<Value = (DiscreteMeasure<Q>, Functional<Q>)> {
    rational_measure().prop_map(|m| (m.clone(), discrete_functional(m)))
}

/// `E[X^a e^{ikX}] = i^a He_a(k) e^{−k²/2}` for standard normal `X`,
/// returned as `(re, im)`.
fn gaussian_fourier(a: u32, k: f64) -> (f64, f64) {
    let (mut h0, mut h1) = (1.0, k);
    let he = if a == 0 {
        1.0
    } else {
        for m in 1..a {
            let h2 = k * h1 - m as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        h1
    };
    let v = he * (-k * k / 2.0).exp();
    match a % 4 {
        0 => (v, 0.0),
        1 => (0.0, v),
        2 => (-v, 0.0),
        _ => (0.0, -v),
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `E[X^a sin(X)^b]` for standard normal `X`, by expanding `sin^b` into exponentials.
pub fn sine_curve_moment(a: u32, b: u32) -> f64 {
    // sin^b x = (2i)^{−b} Σ_j C(b, j) (−1)^{b−j} e^{i(2j−b)x}
    let (mut re, mut im) = (0.0, 0.0);
    for j in 0..=b {
        let c = binom(b, j) * if (b - j) % 2 == 0 { 1.0 } else { -1.0 };
        let (r, i) = gaussian_fourier(a, 2.0 * j as f64 - b as f64);
        re += c * r;
        im += c * i;
    }
    // divide by (2i)^b
    let scale = 2f64.powi(b as i32);
    let (re, im) = match b % 4 {
        0 => (re, im),
        1 => (im, -re),
        2 => (-re, -im),
        _ => (-im, re),
    };
    assert!(im.abs() < 1e-9 * scale.max(1.0));
    re / scale
}

/// Gaussian pushed forward onto `y = sin x`, as a moment table.
pub fn sine_curve_table(depth: usize) -> Functional<f64> {
    let entries: HashMap<MultiIndex, f64> = monomials_up_to(2, depth)
        .into_iter()
        .map(|k| {
            let v = sine_curve_moment(k.entries()[0], k.entries()[1]);
            (k, v)
        })
        .collect();
    table_functional(2, entries, depth).unwrap()
}

/// Gauss–Hermite rule for the standard normal weight, by Newton iteration on
/// the orthonormal Hermite recursion.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    // physicists' weight e^{−t²}; substitute x = √2 t
    let s = std::f64::consts::PI.sqrt();
    nodes
        .into_iter()
        .zip(weights)
        .map(|(t, w)| (t * std::f64::consts::SQRT_2, w / s))
        .collect()
}

/// Rank of a rational matrix by fraction-exact elimination.
pub fn exact_rank(mut rows: Vec<Vec<Q>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != q(0, 1)) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != q(0, 1) {
                let f = rows[r][c].clone() / rows[rank][c].clone();
                for k in c..cols {
                    let v = rows[rank][k].clone() * f.clone();
                    rows[r][k] = rows[r][k].clone() - v;
                }
            }
        }
        rank += 1;
    }
    rank
}
