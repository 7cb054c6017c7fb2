//! Principal component analysis via eigendecomposition of the sample
//! covariance matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

/// Target dimensionality used by the pipeline unless configured otherwise.
pub const DEFAULT_COMPONENTS: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum PcaError {
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("n_components must be in 1..={max}, got {requested}")]
    Components { requested: usize, max: usize },
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("expected {expected} columns, got {found}")]
    Width { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `n_components × d`, one principal axis per row.
    pub components: Matrix,
    pub explained_variance: Vec<f64>,
    pub n_components: usize,
}

impl PcaModel {
    pub fn fit(x: &Matrix, k: usize) -> Result<Self, PcaError> {
        let (n, d) = (x.rows(), x.cols());
        if n < 2 {
            return Err(PcaError::TooFewRows(n));
        }
        let max = (n - 1).min(d);
        if k == 0 || k > max {
            return Err(PcaError::Components { requested: k, max });
        }
        if !x.all_finite() {
            return Err(PcaError::NonFinite);
        }

        let mean = x.column_means();
        let centered = DMatrix::from_fn(n, d, |i, j| x.get(i, j) - mean[j]);
        let mut cov = centered.transpose() * &centered;
        cov /= (n - 1) as f64;
        // exact symmetry for the solver
        for i in 0..d {
            for j in 0..i {
                let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        let eigen = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| {
            eigen.eigenvalues[b]
                .total_cmp(&eigen.eigenvalues[a])
                .then(a.cmp(&b))
        });

        let mut components = Matrix::zeros(k, d);
        let mut explained_variance = Vec::with_capacity(k);
        for (row, &idx) in order.iter().take(k).enumerate() {
            let v = eigen.eigenvectors.column(idx);
            let pivot = (0..d).fold(0, |best, j| {
                if v[j].abs() > v[best].abs() {
                    j
                } else {
                    best
                }
            });
            let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..d {
                components.set(row, j, sign * v[j]);
            }
            explained_variance.push(eigen.eigenvalues[idx].max(0.0));
        }

        Ok(Self {
            mean,
            components,
            explained_variance,
            n_components: k,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        (0..self.n_components)
            .map(|c| {
                self.components
                    .row(c)
                    .iter()
                    .zip(row.iter().zip(&self.mean))
                    .map(|(w, (x, m))| w * (x - m))
                    .sum()
            })
            .collect()
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix, PcaError> {
        if x.cols() != self.dim() {
            return Err(PcaError::Width {
                expected: self.dim(),
                found: x.cols(),
            });
        }
        let rows: Vec<Vec<f64>> = x.iter_rows().map(|r| self.transform_row(r)).collect();
        Ok(Matrix::from_rows(&rows).unwrap_or_else(|| Matrix::zeros(0, self.n_components)))
    }

    pub fn inverse_row(&self, y: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, &coef) in y.iter().enumerate().take(self.n_components) {
            for (o, w) in out.iter_mut().zip(self.components.row(c)) {
                *o += coef * w;
            }
        }
        out
    }

    pub fn inverse_transform(&self, y: &Matrix) -> Result<Matrix, PcaError> {
        if y.cols() != self.n_components {
            return Err(PcaError::Width {
                expected: self.n_components,
                found: y.cols(),
            });
        }
        let rows: Vec<Vec<f64>> = y.iter_rows().map(|r| self.inverse_row(r)).collect();
        Ok(Matrix::from_rows(&rows).unwrap_or_else(|| Matrix::zeros(0, self.dim())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Matrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|j| rng.gen_range(-1.0..1.0) * (d - j) as f64).collect())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    fn column_variances(m: &Matrix) -> Vec<f64> {
        let mean = m.column_means();
        (0..m.cols())
            .map(|j| {
                (0..m.rows()).map(|i| (m.get(i, j) - mean[j]).powi(2)).sum::<f64>()
                    / (m.rows() - 1) as f64
            })
            .collect()
    }

    #[test]
    fn parameter_errors() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(
            PcaModel::fit(&x, 2),
            Err(PcaError::Components {
                requested: 2,
                max: 1
            })
        );
        assert!(matches!(PcaModel::fit(&x, 0), Err(PcaError::Components { .. })));
        let one = Matrix::from_rows(&[[0.0]]).unwrap();
        assert_eq!(PcaModel::fit(&one, 1), Err(PcaError::TooFewRows(1)));
        let nan = Matrix::from_rows(&[[0.0], [f64::NAN], [1.0]]).unwrap();
        assert_eq!(PcaModel::fit(&nan, 1), Err(PcaError::NonFinite));
    }

    #[test]
    fn identical_rows_collapse_to_origin() {
        let x = Matrix::from_rows(&[[2.0, 3.0, 4.0]; 5]).unwrap();
        let model = PcaModel::fit(&x, 2).unwrap();
        assert!(model.explained_variance.iter().all(|&v| v == 0.0));
        let y = model.transform(&x).unwrap();
        assert!(y.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn line_fixture_direction() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).unwrap();
        let model = PcaModel::fit(&x, 1).unwrap();
        // covariance [[1,1],[1,1]]: eigenvalue 2 along (1,1)/sqrt(2)
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = model.components.row(0);
        assert!((c[0] - h).abs() < 1e-12 && (c[1] - h).abs() < 1e-12);
        assert!((model.explained_variance[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn full_rank_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let x = random_matrix(&mut rng, 30, 6);
            let model = PcaModel::fit(&x, 6).unwrap();
            let c = &model.components;
            for a in 0..6 {
                for b in 0..6 {
                    let dot: f64 = c.row(a).iter().zip(c.row(b)).map(|(p, q)| p * q).sum();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - expected).abs() < 1e-8);
                }
            }
            assert!(model.explained_variance.windows(2).all(|w| w[0] >= w[1]));
            let total: f64 = column_variances(&x).iter().sum();
            let explained: f64 = model.explained_variance.iter().sum();
            assert!((total - explained).abs() < 1e-8 * total.max(1.0));

            let y = model.transform(&x).unwrap();
            let back = model.inverse_transform(&y).unwrap();
            for (a, b) in back.as_slice().iter().zip(x.as_slice()) {
                assert!((a - b).abs() < 1e-6);
            }
            for (v, ev) in column_variances(&y).iter().zip(&model.explained_variance) {
                assert!((v - ev).abs() <= 1e-6 * ev.max(1e-12));
            }
        }
    }

    #[test]
    fn truncated_reconstruction_error_matches_trailing_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_matrix(&mut rng, 25, 5);
        let full = PcaModel::fit(&x, 5).unwrap();
        for k in 1..5 {
            let model = PcaModel::fit(&x, k).unwrap();
            let back = model
                .inverse_transform(&model.transform(&x).unwrap())
                .unwrap();
            let err: f64 = back
                .as_slice()
                .iter()
                .zip(x.as_slice())
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            let trailing: f64 = full.explained_variance[k..].iter().sum::<f64>() * 24.0;
            assert!((err - trailing).abs() <= 1e-6 * trailing);
        }
    }

    #[test]
    fn mean_row_and_inverse_of_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_matrix(&mut rng, 10, 3);
        let model = PcaModel::fit(&x, 2).unwrap();
        assert!(model.transform_row(&model.mean).iter().all(|v| v.abs() < 1e-12));
        assert_eq!(model.inverse_row(&[0.0, 0.0]), model.mean);

        let (y1, y2, a) = ([1.5, -2.0], [0.25, 3.0], 0.3);
        let mix: Vec<f64> = y1.iter().zip(&y2).map(|(p, q)| a * p + (1.0 - a) * q).collect();
        let lhs = model.inverse_row(&mix);
        let (i1, i2) = (model.inverse_row(&y1), model.inverse_row(&y2));
        for j in 0..3 {
            assert!((lhs[j] - (a * i1[j] + (1.0 - a) * i2[j])).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_matrix(&mut rng, 20, 4);
        assert_eq!(PcaModel::fit(&x, 3).unwrap(), PcaModel::fit(&x, 3).unwrap());
    }
}
