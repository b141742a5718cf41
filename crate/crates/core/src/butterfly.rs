//! Simple (Haar-) and non-simple random butterfly matrices as fast implicit
//! operators.
//!
//! A butterfly matrix of size `N = 2^n` is defined recursively from 2x2
//! rotation-structured blocks acting on half-size butterfly matrices. The
//! simple class draws one uniform angle per recursion level and is Haar
//! distributed on the subgroup `B(2^n)` of `SO(2^n)`; the non-simple class
//! draws an independent angle at every node of the recursion tree
//! (`2^n - 1` angles in total).
//!
//! All applies are `O(N log N)` and thread an [`OpCounter`] so the
//! multiplication-count recursions can be certified exactly:
//! a full apply costs `n * 2^(n+1)` real multiplications, a subsampled
//! apply at depth `k` costs at most `2^(n+1) * (n - k + 1)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opcount::OpCounter;
use crate::rng::{Angle, RngState};

/// Default cap on dense materialization (`N = 2^12` means 16.8M entries).
pub const DENSE_CAP: usize = 12;

#[derive(Serialize, Deserialize)]
struct AnglesRepr {
    n: usize,
    angles: Vec<f64>,
}

/// A Haar-butterfly matrix in `B(2^n)`: one angle per recursion level.
///
/// `angles[j]` is the level-`j` angle; the root angle that defines the
/// outermost 2x2 block structure sits at index `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleButterfly {
    angles: Vec<Angle>,
}

impl SimpleButterfly {
    pub fn from_angles(angles: Vec<Angle>) -> Self {
        Self { angles }
    }

    /// Draws `n` iid uniform angles; the result is Haar distributed on `B(2^n)`.
    pub fn sample(n: usize, rng: &mut RngState) -> Self {
        Self {
            angles: (0..n).map(|_| rng.uniform_angle()).collect(),
        }
    }

    pub fn levels(&self) -> usize {
        self.angles.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.angles.len()
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    /// The group product: angle lists add modulo `2*pi`.
    pub fn compose(&self, other: &SimpleButterfly) -> Result<SimpleButterfly> {
        if self.levels() != other.levels() {
            return Err(Error::DimensionMismatch {
                expected: self.levels(),
                got: other.levels(),
            });
        }
        Ok(SimpleButterfly {
            angles: self
                .angles
                .iter()
                .zip(&other.angles)
                .map(|(a, b)| a.wrapping_add(*b))
                .collect(),
        })
    }

    /// The group inverse: every angle negated.
    pub fn inverse(&self) -> SimpleButterfly {
        SimpleButterfly {
            angles: self.angles.iter().map(|a| a.negated()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&AnglesRepr {
            n: self.levels(),
            angles: self.angles.iter().map(|a| a.radians()).collect(),
        })
        .expect("angle list serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: AnglesRepr = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("bad butterfly JSON: {e}")))?;
        if repr.angles.len() != repr.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} angles, got {}",
                repr.n,
                repr.angles.len()
            )));
        }
        Ok(Self {
            angles: repr.angles.into_iter().map(Angle::from_radians).collect(),
        })
    }

    /// Dense `N x N` materialization: column `i` is the image of `e_i`.
    pub fn materialize(&self) -> Result<DMatrix<f64>> {
        self.materialize_with_cap(DENSE_CAP)
    }

    pub fn materialize_with_cap(&self, cap: usize) -> Result<DMatrix<f64>> {
        check_dense_cap(self.levels(), cap)?;
        let n = self.dim();
        let mut counter = OpCounter::new();
        materialize_by(n, |col| {
            apply_simple(self, col, &mut counter).expect("length matches by construction")
        })
    }
}

/// A non-simple random butterfly matrix `B^(N)(Sigma_R)`: a full binary tree
/// of `2^n - 1` angles in heap layout. Node 1 is the root (outermost block
/// structure); node `i` has children `2i` and `2i + 1`; the leaves are the
/// 2x2 rotation blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct NonSimpleButterfly {
    n: usize,
    angle_tree: Vec<Angle>,
}

impl NonSimpleButterfly {
    pub fn from_angle_tree(n: usize, angle_tree: Vec<Angle>) -> Result<Self> {
        let want = (1usize << n) - 1;
        if angle_tree.len() != want {
            return Err(Error::InvalidArgument(format!(
                "angle tree for n = {n} needs {want} angles, got {}",
                angle_tree.len()
            )));
        }
        Ok(Self { n, angle_tree })
    }

    /// Draws `2^n - 1` independent uniform angles in heap order.
    pub fn sample(n: usize, rng: &mut RngState) -> Self {
        let count = (1usize << n) - 1;
        Self {
            n,
            angle_tree: (0..count).map(|_| rng.uniform_angle()).collect(),
        }
    }

    pub fn levels(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn angle_tree(&self) -> &[Angle] {
        &self.angle_tree
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&AnglesRepr {
            n: self.n,
            angles: self.angle_tree.iter().map(|a| a.radians()).collect(),
        })
        .expect("angle tree serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: AnglesRepr = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("bad butterfly JSON: {e}")))?;
        Self::from_angle_tree(
            repr.n,
            repr.angles.into_iter().map(Angle::from_radians).collect(),
        )
    }

    pub fn materialize(&self) -> Result<DMatrix<f64>> {
        self.materialize_with_cap(DENSE_CAP)
    }

    pub fn materialize_with_cap(&self, cap: usize) -> Result<DMatrix<f64>> {
        check_dense_cap(self.n, cap)?;
        let n = self.dim();
        let mut counter = OpCounter::new();
        materialize_by(n, |col| {
            apply_nonsimple(self, col, &mut counter).expect("length matches by construction")
        })
    }
}

fn check_dense_cap(levels: usize, cap: usize) -> Result<()> {
    if levels > cap {
        Err(Error::CapacityExceeded {
            what: "dense materialization level count",
            requested: levels,
            cap,
        })
    } else {
        Ok(())
    }
}

fn materialize_by<F: FnMut(&[f64]) -> Vec<f64>>(dim: usize, mut apply: F) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    for i in 0..dim {
        e[i] = 1.0;
        let col = apply(&e);
        e[i] = 0.0;
        m.column_mut(i).copy_from_slice(&col);
    }
    Ok(m)
}

/// Applies `B v` by the recursive split: both halves are transformed with
/// the level-`(n-1)` angles, then combined with cos/sin of the top angle.
///
/// Records exactly `n * 2^(n+1)` multiplications (4 per output pair per
/// level); additions are not counted.
pub fn apply_simple(b: &SimpleButterfly, v: &[f64], counter: &mut OpCounter) -> Result<Vec<f64>> {
    check_len(v, b.dim())?;
    let mut buf = v.to_vec();
    simple_rec(&b.angles, &mut buf, counter);
    Ok(buf)
}

fn simple_rec(angles: &[Angle], buf: &mut [f64], counter: &mut OpCounter) {
    let Some((&theta, rest)) = angles.split_last() else {
        return;
    };
    let m = buf.len() / 2;
    let (lo, hi) = buf.split_at_mut(m);
    simple_rec(rest, lo, counter);
    simple_rec(rest, hi, counter);
    combine(theta, lo, hi, counter);
}

#[inline]
fn combine(theta: Angle, lo: &mut [f64], hi: &mut [f64], counter: &mut OpCounter) {
    let c = theta.cos();
    let s = theta.sin();
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x + s * y;
        *b = -s * x + c * y;
    }
    counter.add(4 * lo.len() as u64);
}

/// Applies the inverse by negating every angle; a round trip reproduces the
/// input to machine precision.
pub fn apply_simple_inverse(b: &SimpleButterfly, w: &[f64]) -> Result<Vec<f64>> {
    let mut counter = OpCounter::new();
    apply_simple(&b.inverse(), w, &mut counter)
}

/// Computes one aligned block of `w = B v` without forming all of `w`.
///
/// With `w` split into `2^k` consecutive blocks of length `M = 2^(n-k)`,
/// returns the block containing entry `j` (1-based). The recursion performs
/// exactly the scalar operations of the corresponding slice of the full
/// product, so the result is bitwise identical to that slice. The recorded
/// multiplication count is `2^n (2(n-k) + 2 - 2^(1-k))`, bounded by
/// `2^(n+1) (n - k + 1)`.
pub fn apply_simple_subsampled(
    b: &SimpleButterfly,
    v: &[f64],
    j: usize,
    k: usize,
    counter: &mut OpCounter,
) -> Result<Vec<f64>> {
    let n = b.levels();
    check_len(v, b.dim())?;
    if k > n {
        return Err(Error::IndexOutOfRange {
            what: "subsampling depth k",
            got: k,
            lo: 0,
            hi: n,
        });
    }
    if j == 0 || j > b.dim() {
        return Err(Error::IndexOutOfRange {
            what: "output index j",
            got: j,
            lo: 1,
            hi: b.dim(),
        });
    }
    Ok(subsampled_rec(&b.angles, v, j, k, counter))
}

fn subsampled_rec(
    angles: &[Angle],
    v: &[f64],
    j: usize,
    k: usize,
    counter: &mut OpCounter,
) -> Vec<f64> {
    if k == 0 {
        let mut buf = v.to_vec();
        simple_rec(angles, &mut buf, counter);
        return buf;
    }
    let Some((&theta, rest)) = angles.split_last() else {
        return v.to_vec();
    };
    let m = v.len() / 2;
    let c = theta.cos();
    let s = theta.sin();
    let out: Vec<f64> = if j > m {
        let v1 = subsampled_rec(rest, &v[..m], j - m, k - 1, counter);
        let v2 = subsampled_rec(rest, &v[m..], j - m, k - 1, counter);
        v1.iter().zip(&v2).map(|(a, b)| -s * a + c * b).collect()
    } else {
        let v1 = subsampled_rec(rest, &v[..m], j, k - 1, counter);
        let v2 = subsampled_rec(rest, &v[m..], j, k - 1, counter);
        v1.iter().zip(&v2).map(|(a, b)| c * a + s * b).collect()
    };
    counter.add(2 * out.len() as u64);
    out
}

/// Applies a non-simple butterfly matrix: same recursion shape as the simple
/// case but with an independent angle at every node. Records `n * 2^(n+1)`
/// multiplications.
pub fn apply_nonsimple(
    b: &NonSimpleButterfly,
    v: &[f64],
    counter: &mut OpCounter,
) -> Result<Vec<f64>> {
    check_len(v, b.dim())?;
    let mut buf = v.to_vec();
    nonsimple_rec(&b.angle_tree, 1, &mut buf, counter);
    Ok(buf)
}

fn nonsimple_rec(tree: &[Angle], node: usize, buf: &mut [f64], counter: &mut OpCounter) {
    if buf.len() < 2 {
        return;
    }
    let m = buf.len() / 2;
    let (lo, hi) = buf.split_at_mut(m);
    nonsimple_rec(tree, 2 * node, lo, counter);
    nonsimple_rec(tree, 2 * node + 1, hi, counter);
    combine(tree[node - 1], lo, hi, counter);
}

fn check_len(v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        })
    } else {
        Ok(())
    }
}

/// Closed-form multiplication count of a full fast apply at level `n`.
pub fn simple_apply_cost(n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        (n as u64) << (n + 1)
    }
}

/// Upper bound on the multiplication count of a subsampled apply.
pub fn subsampled_cost_bound(n: usize, k: usize) -> u64 {
    (1u64 << (n + 1)) * (n - k + 1) as u64
}
