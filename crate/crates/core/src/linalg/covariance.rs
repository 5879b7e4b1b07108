use crate::error::Result;
use crate::linalg::{BlockPartition, DataMatrix, SymmetricMatrix};

/// Scatter matrix `sum_k y_k y_k^T` (no centering).
pub fn scatter_matrix(data: &DataMatrix) -> SymmetricMatrix {
    let p = data.p();
    let mut upper = vec![0.0; p * p];
    for row in data.rows() {
        for i in 0..p {
            let yi = row[i];
            let acc = &mut upper[i * p..(i + 1) * p];
            for j in i..p {
                acc[j] += yi * row[j];
            }
        }
    }
    SymmetricMatrix::from_fn(p, |i, j| upper[i * p + j])
}

/// Sample covariance `(1/n) sum_k y_k y_k^T` for known zero mean.
///
/// The mean is deliberately not subtracted: the null distributions of the
/// statistics in this crate assume centered observations.
pub fn sample_covariance(data: &DataMatrix) -> SymmetricMatrix {
    scatter_matrix(data).scaled(1.0 / data.n() as f64)
}

/// Diagonal block `i` (zero-based) of `a` under `part`.
pub fn extract_block(
    a: &SymmetricMatrix,
    part: &BlockPartition,
    i: usize,
) -> Result<SymmetricMatrix> {
    if part.p() != a.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: a.dim(),
            actual: part.p(),
        });
    }
    let range = part.block_range(i)?;
    let off = range.start;
    Ok(SymmetricMatrix::from_fn(range.len(), |r, c| {
        a.get(off + r, off + c)
    }))
}

/// Entrywise sum of symmetric matrices in the given order, Kahan-compensated.
pub(crate) fn compensated_sum(terms: &[SymmetricMatrix]) -> SymmetricMatrix {
    let d = terms[0].dim();
    let mut sum = vec![0.0; d * d];
    let mut comp = vec![0.0; d * d];
    for t in terms {
        for ((s, c), &x) in sum.iter_mut().zip(comp.iter_mut()).zip(t.as_slice()) {
            let y = x - *c;
            let next = *s + y;
            *c = (next - *s) - y;
            *s = next;
        }
    }
    SymmetricMatrix::from_fn(d, |i, j| sum[i * d + j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn single_observation_is_outer_product() {
        let data = DataMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let s = sample_covariance(&data);
        assert_eq!(s.as_slice(), &[1.0, 2.0, 2.0, 4.0]);
    }

    #[test]
    fn zero_rows_give_zero_matrix() {
        let data = DataMatrix::from_row_major(5, 3, vec![0.0; 15]).unwrap();
        assert!(sample_covariance(&data)
            .as_slice()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn matches_brute_force_outer_products() {
        let rows = vec![
            vec![1.0, -2.0],
            vec![3.0, 0.0],
            vec![-1.0, 4.0],
            vec![2.0, 5.0],
        ];
        let data = DataMatrix::from_rows(&rows).unwrap();
        // Hand-summed: sum y1^2 = 15, sum y1 y2 = 4, sum y2^2 = 45.
        let expected = [15.0 / 4.0, 4.0 / 4.0, 4.0 / 4.0, 45.0 / 4.0];
        let mut brute = [0.0; 4];
        for r in &rows {
            for i in 0..2 {
                for j in 0..2 {
                    brute[i * 2 + j] += r[i] * r[j] / 4.0;
                }
            }
        }
        let s = sample_covariance(&data);
        for k in 0..4 {
            assert!((s.as_slice()[k] - expected[k]).abs() < 1e-15);
            assert!((brute[k] - expected[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn block_extraction() {
        let a = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let part = BlockPartition::new(vec![1, 1]).unwrap();
        assert_eq!(extract_block(&a, &part, 1).unwrap().as_slice(), &[3.0]);
        let whole = BlockPartition::new(vec![2]).unwrap();
        assert_eq!(extract_block(&a, &whole, 0).unwrap(), a);
        assert!(matches!(
            extract_block(&a, &part, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn block_extraction_2x2_tiles() {
        // a_ij = 10 * (i + 1) + (j + 1) on the upper triangle.
        let a = SymmetricMatrix::from_fn(4, |i, j| (10 * (i + 1) + (j + 1)) as f64);
        let part = BlockPartition::new(vec![2, 2]).unwrap();
        let b0 = extract_block(&a, &part, 0).unwrap();
        let b1 = extract_block(&a, &part, 1).unwrap();
        assert_eq!(b0.as_slice(), &[11.0, 12.0, 12.0, 22.0]);
        assert_eq!(b1.as_slice(), &[33.0, 34.0, 34.0, 44.0]);
    }

    #[test]
    fn compensated_sum_matches_plain_sum() {
        let a = SymmetricMatrix::identity(3);
        let b = SymmetricMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let s = compensated_sum(&[a, b]);
        assert_eq!(s.diag(), vec![2.0, 3.0, 4.0]);
    }
}
