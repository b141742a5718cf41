//! Haar-distributed orthogonal matrices as products of Householder
//! reflections.
//!
//! A sample on `O(N)` is stored as `N - 1` unit reflector vectors, the
//! reflector for step `j` acting on the trailing `N - j + 1` coordinates,
//! plus a random sign on the final coordinate. Applying the product to a
//! vector costs `O(N^2)` multiplications, avoiding the `O(N^3)` dense
//! QR-of-Gaussian route.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::opcount::OpCounter;
use crate::rng::RngState;

/// A Haar sample on `O(N)` in implicit Householder-product form.
#[derive(Debug, Clone)]
pub struct HaarOrthogonal {
    dim: usize,
    /// `reflectors[j]` is a unit vector of length `dim - j` acting on the
    /// trailing coordinates.
    reflectors: Vec<Vec<f64>>,
    last_sign: f64,
}

impl HaarOrthogonal {
    /// Samples a Haar orthogonal matrix from `N - 1` Gaussian reflectors and
    /// a trailing sign.
    pub fn sample(dim: usize, rng: &mut RngState) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "Haar sampling needs dimension >= 1".into(),
            ));
        }
        let mut reflectors = Vec::with_capacity(dim - 1);
        for j in 0..dim - 1 {
            reflectors.push(sample_reflector(dim - j, rng));
        }
        let last_sign = rng.rademacher();
        Ok(Self {
            dim,
            reflectors,
            last_sign,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn last_sign(&self) -> f64 {
        self.last_sign
    }

    pub fn reflectors(&self) -> &[Vec<f64>] {
        &self.reflectors
    }

    /// Applies `Q v`: the largest reflector first, the trailing sign last.
    /// Costs at most `4 N^2` multiplications (each reflector of length `L`
    /// takes `2L + 1`).
    pub fn apply(&self, v: &[f64], counter: &mut OpCounter) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let mut w = v.to_vec();
        for (j, refl) in self.reflectors.iter().enumerate() {
            reflect(refl, &mut w[j..], counter);
        }
        w[self.dim - 1] *= self.last_sign;
        counter.add(1);
        Ok(w)
    }

    /// Applies `Q^T v`: the trailing sign first, then the reflectors in
    /// reverse order (each reflection is an involution).
    pub fn apply_transpose(&self, v: &[f64], counter: &mut OpCounter) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let mut w = v.to_vec();
        w[self.dim - 1] *= self.last_sign;
        counter.add(1);
        for (j, refl) in self.reflectors.iter().enumerate().rev() {
            reflect(refl, &mut w[j..], counter);
        }
        Ok(w)
    }

    /// Applies `Q` to every column of `a` in place.
    pub fn apply_columns(&self, a: &mut DMatrix<f64>, counter: &mut OpCounter) -> Result<()> {
        if a.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: a.nrows(),
            });
        }
        for mut col in a.column_iter_mut() {
            let mut w: Vec<f64> = col.iter().copied().collect();
            for (j, refl) in self.reflectors.iter().enumerate() {
                reflect(refl, &mut w[j..], counter);
            }
            w[self.dim - 1] *= self.last_sign;
            counter.add(1);
            col.copy_from_slice(&w);
        }
        Ok(())
    }

    pub fn materialize(&self) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        let mut e = vec![0.0; self.dim];
        let mut counter = OpCounter::new();
        for i in 0..self.dim {
            e[i] = 1.0;
            let col = self.apply(&e, &mut counter)?;
            e[i] = 0.0;
            m.column_mut(i).copy_from_slice(&col);
        }
        Ok(m)
    }
}

/// Draws a Gaussian vector `u` and returns the unit reflector
/// `(u - |u| e_1) / |u - |u| e_1|`. The measure-zero case where `u` is
/// already a positive multiple of `e_1` is resampled.
fn sample_reflector(len: usize, rng: &mut RngState) -> Vec<f64> {
    loop {
        let mut u: Vec<f64> = (0..len).map(|_| rng.standard_normal()).collect();
        let norm_u = norm(&u);
        u[0] -= norm_u;
        let norm_v = norm(&u);
        if norm_v < 1e-14 * norm_u {
            continue;
        }
        for x in u.iter_mut() {
            *x /= norm_v;
        }
        return u;
    }
}

/// `w -= 2 (v . w) v` for unit `v`; `L` dot multiplications, one for the
/// doubling, `L` for the update.
#[inline]
fn reflect(v: &[f64], w: &mut [f64], counter: &mut OpCounter) {
    let dot: f64 = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
    let t = 2.0 * dot;
    for (wi, vi) in w.iter_mut().zip(v.iter()) {
        *wi -= t * vi;
    }
    counter.add(2 * v.len() as u64 + 1);
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
