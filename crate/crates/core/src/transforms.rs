//! The four randomization schemes under one interface.
//!
//! Each randomizer is an orthogonal `N x N` operator, `N = 2^n`:
//!
//! * `HBDCT` — DCT composed with a Haar-butterfly matrix,
//! * `RBDCT` — DCT composed with a non-simple random butterfly matrix,
//! * `RDCT`  — DCT composed with a random `+-1` diagonal,
//! * `HAAR`  — a Haar matrix on `O(N)` (no DCT).
//!
//! Composition is `Omega = Q_dct * (random part)`: the random part touches
//! the vector first, the DCT second. The first three apply in `O(N log N)`
//! multiplications per column (at most `4 N log2(N) + 9 N` including the
//! DCT); `HAAR` costs `O(N^2)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::butterfly::{
    apply_nonsimple, apply_simple, NonSimpleButterfly, SimpleButterfly, DENSE_CAP,
};
use crate::dct::Dct;
use crate::error::{Error, Result};
use crate::haar::HaarOrthogonal;
use crate::opcount::OpCounter;
use crate::rng::RngState;

/// The four randomization schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Hbdct,
    Rbdct,
    Rdct,
    Haar,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Hbdct, Variant::Rbdct, Variant::Rdct, Variant::Haar];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Hbdct => "hbdct",
            Variant::Rbdct => "rbdct",
            Variant::Rdct => "rdct",
            Variant::Haar => "haar",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hbdct" => Ok(Variant::Hbdct),
            "rbdct" => Ok(Variant::Rbdct),
            "rdct" => Ok(Variant::Rdct),
            "haar" => Ok(Variant::Haar),
            other => Err(Error::InvalidArgument(format!(
                "unknown randomizer '{other}' (expected hbdct, rbdct, rdct or haar)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
enum Payload {
    Simple(SimpleButterfly),
    NonSimple(NonSimpleButterfly),
    Signs(Vec<f64>),
    Haar(HaarOrthogonal),
}

/// A sampled random orthogonal operator with a uniform column-apply contract.
#[derive(Debug, Clone)]
pub struct Randomizer {
    variant: Variant,
    dim: usize,
    payload: Payload,
    dct: Option<Dct>,
}

impl Randomizer {
    /// Samples the random part of the chosen scheme at dimension `N = 2^n`.
    pub fn sample(variant: Variant, n: usize, rng: &mut RngState) -> Result<Self> {
        let dim = 1usize << n;
        let payload = match variant {
            Variant::Hbdct => Payload::Simple(SimpleButterfly::sample(n, rng)),
            Variant::Rbdct => Payload::NonSimple(NonSimpleButterfly::sample(n, rng)),
            Variant::Rdct => Payload::Signs((0..dim).map(|_| rng.rademacher()).collect()),
            Variant::Haar => Payload::Haar(HaarOrthogonal::sample(dim, rng)?),
        };
        let dct = match variant {
            Variant::Haar => None,
            _ => Some(Dct::new(dim)),
        };
        Ok(Self {
            variant,
            dim,
            payload,
            dct,
        })
    }

    /// An RDCT with explicit signs; used to force the plain-DCT case.
    pub fn rdct_from_signs(signs: Vec<f64>) -> Self {
        let dim = signs.len();
        Self {
            variant: Variant::Rdct,
            dim,
            payload: Payload::Signs(signs),
            dct: Some(Dct::new(dim)),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Applies `Omega v`.
    pub fn apply(&self, v: &[f64], counter: &mut OpCounter) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let mixed = match &self.payload {
            Payload::Simple(b) => apply_simple(b, v, counter)?,
            Payload::NonSimple(b) => apply_nonsimple(b, v, counter)?,
            Payload::Signs(signs) => {
                counter.add(self.dim as u64);
                signs.iter().zip(v).map(|(s, x)| s * x).collect()
            }
            Payload::Haar(q) => return q.apply(v, counter),
        };
        Ok(self
            .dct
            .as_ref()
            .expect("non-Haar randomizers carry a DCT plan")
            .apply(&mixed, counter))
    }

    /// Returns `Omega * A`, applying the randomizer to each column.
    pub fn randomize_columns(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if a.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: a.nrows(),
            });
        }
        let mut counter = OpCounter::new();
        if let Payload::Haar(q) = &self.payload {
            let mut out = a.clone();
            q.apply_columns(&mut out, &mut counter)?;
            return Ok(out);
        }
        let mut out = DMatrix::zeros(a.nrows(), a.ncols());
        let mut col_buf = vec![0.0; self.dim];
        for (i, col) in a.column_iter().enumerate() {
            for (dst, src) in col_buf.iter_mut().zip(col.iter()) {
                *dst = *src;
            }
            let w = self.apply(&col_buf, &mut counter)?;
            out.column_mut(i).copy_from_slice(&w);
        }
        Ok(out)
    }

    /// Dense materialization, for oracle comparisons at small `n`.
    pub fn materialize(&self) -> Result<DMatrix<f64>> {
        let levels = self.dim.trailing_zeros() as usize;
        if levels > DENSE_CAP {
            return Err(Error::CapacityExceeded {
                what: "dense randomizer materialization level count",
                requested: levels,
                cap: DENSE_CAP,
            });
        }
        let id = DMatrix::identity(self.dim, self.dim);
        self.randomize_columns(&id)
    }
}
