#![allow(dead_code)]

use hdlrt::linalg::{BlockPartition, DataMatrix, SymmetricMatrix};
use hdlrt::sampling::sample_entry_matrix;
use hdlrt::DistributionSpec;

pub fn gaussian(n: usize, p: usize, seed: u64) -> DataMatrix {
    sample_entry_matrix(n, p, DistributionSpec::StandardNormal, seed, 0).unwrap()
}

/// `G^T G / d + I / 2` for a Gaussian `G`.
pub fn random_spd(d: usize, seed: u64) -> SymmetricMatrix {
    let g = gaussian(d, d, seed);
    SymmetricMatrix::from_fn(d, |i, j| {
        let s: f64 = (0..d).map(|k| g.get(k, i) * g.get(k, j)).sum::<f64>() / d as f64;
        s + if i == j { 0.5 } else { 0.0 }
    })
}

/// Block-diagonal SPD matrix conforming to `part`.
pub fn block_diagonal_spd(part: &BlockPartition, seed: u64) -> SymmetricMatrix {
    let blocks: Vec<SymmetricMatrix> = (0..part.q())
        .map(|i| {
            random_spd(
                part.sizes()[i],
                seed.wrapping_mul(1000).wrapping_add(i as u64),
            )
        })
        .collect();
    SymmetricMatrix::from_fn(part.p(), |i, j| {
        let (bi, bj) = (part.block_of(i).unwrap(), part.block_of(j).unwrap());
        if bi != bj {
            return 0.0;
        }
        let s = part.cumulative()[bi];
        blocks[bi].get(i - s, j - s)
    })
}

/// Maps every observation `x` to `M x` for a row-major `p x p` matrix `M`.
pub fn transform_rows(data: &DataMatrix, m: &[f64]) -> DataMatrix {
    let p = data.p();
    let mut out = Vec::with_capacity(data.n() * p);
    for x in data.rows() {
        for i in 0..p {
            out.push((0..p).map(|j| m[i * p + j] * x[j]).sum());
        }
    }
    DataMatrix::from_row_major(data.n(), p, out).unwrap()
}

/// Gaussian matrix shifted by `2 I`; invertible with overwhelming probability
/// and far from symmetric.
pub fn random_invertible(p: usize, seed: u64) -> Vec<f64> {
    let g = gaussian(p, p, seed);
    let mut m = g.as_slice().to_vec();
    for i in 0..p {
        m[i * p + i] += 2.0 * (p as f64).sqrt();
    }
    m
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}
