//! Thin QR, coherence, test-matrix generators and the randomized
//! coherence-reduction experiment.
//!
//! The coherence of a tall full-rank matrix `A = QR` is the largest squared
//! row norm of the orthonormal factor `Q`; its range is `[M/N, 1]`. The
//! experiment draws a fresh randomizer `Omega` per trial and measures
//! `coh(Omega A)`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::transforms::{Randomizer, Variant};

/// The Haar randomizer is dense; experiments with it are capped at
/// `n <= 12`.
pub const HAAR_EXPERIMENT_CAP: usize = 12;

/// The two test-matrix families of the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMatrix {
    Hilbert,
    Randn,
}

impl TestMatrix {
    pub fn name(self) -> &'static str {
        match self {
            TestMatrix::Hilbert => "hilbert",
            TestMatrix::Randn => "randn",
        }
    }
}

impl std::fmt::Display for TestMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hilbert" => Ok(TestMatrix::Hilbert),
            "randn" => Ok(TestMatrix::Randn),
            other => Err(Error::InvalidArgument(format!(
                "unknown test matrix '{other}' (expected hilbert or randn)"
            ))),
        }
    }
}

/// One coherence measurement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CoherenceResult {
    pub value: f64,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub randomizer: &'static str,
    pub seed: u64,
}

/// Summary statistics over the trials of one experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub randomizer: String,
    pub matrix: String,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub trials: usize,
    pub sample_mean: f64,
    pub sample_std: f64,
}

/// Householder thin QR with the positive-diagonal convention for `R`.
///
/// Returns `(Q, R)` with `Q` of size `N x M` having orthonormal columns and
/// `R` upper triangular with positive diagonal. Rank deficiency (smallest
/// `|r_ii|` at or below `1e-12 * ||A||_F`) is an error.
pub fn thin_qr(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (n, m) = a.shape();
    if n < m {
        return Err(Error::InvalidArgument(format!(
            "thin QR needs a tall matrix, got {n} x {m}"
        )));
    }
    let qr = a.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    let min_diag = (0..m).map(|i| r[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if min_diag <= 1e-12 * a.norm() {
        return Err(Error::RankDeficient { min_diag });
    }
    for i in 0..m {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    Ok((q, r))
}

/// `coh(A) = max_j || e_j^T Q ||_2^2` over the rows of the thin-QR factor.
///
/// Householder QR keeps `Q` orthonormal even when `R`'s diagonal underflows,
/// so no rank guard is applied here: the severely ill-conditioned `hilbert`
/// family is measured through the coherence of its floating-point factor.
pub fn coherence(a: &DMatrix<f64>) -> Result<f64> {
    let (n, m) = a.shape();
    if n < m {
        return Err(Error::InvalidArgument(format!(
            "coherence needs a tall matrix, got {n} x {m}"
        )));
    }
    let q = a.clone().qr().q();
    Ok(q
        .row_iter()
        .map(|row| row.iter().map(|x| x * x).sum::<f64>())
        .fold(0.0, f64::max))
}

/// The `2^n x M` Hilbert matrix, `a_ij = 1 / (i + j - 1)` with 1-based
/// indices.
pub fn make_hilbert(n: usize, m: usize) -> Result<DMatrix<f64>> {
    let rows = 1usize << n;
    if m > rows {
        return Err(Error::InvalidArgument(format!(
            "hilbert matrix needs M <= 2^n, got M = {m}, 2^n = {rows}"
        )));
    }
    Ok(DMatrix::from_fn(rows, m, |i, j| {
        1.0 / (i + j + 1) as f64
    }))
}

/// The `randn` test matrix: column 1 is `a_11 e_1` with `a_11` standard
/// normal, columns 2..M are iid standard normal. Its coherence is 1 almost
/// surely.
pub fn make_randn_test(n: usize, m: usize, rng: &mut RngState) -> Result<DMatrix<f64>> {
    if m == 0 {
        return Err(Error::InvalidArgument("randn matrix needs M >= 1".into()));
    }
    let rows = 1usize << n;
    let mut a = DMatrix::zeros(rows, m);
    a[(0, 0)] = rng.standard_normal();
    for j in 1..m {
        for i in 0..rows {
            a[(i, j)] = rng.standard_normal();
        }
    }
    Ok(a)
}

/// Runs the randomized coherence-reduction experiment.
///
/// A fresh `Omega` is sampled per trial from the stream `base_seed + 1 + t`;
/// stream `base_seed` is reserved for fixed-base sampling. For `hilbert`
/// the base matrix is deterministic; for `randn` it is resampled per trial
/// unless `fix_base` is set.
pub fn coherence_experiment(
    matrix: TestMatrix,
    variant: Variant,
    n: usize,
    m: usize,
    trials: usize,
    rng: &RngState,
    fix_base: bool,
) -> Result<(ExperimentSummary, Vec<CoherenceResult>)> {
    if trials < 2 {
        return Err(Error::InvalidArgument(
            "coherence experiment needs at least 2 trials".into(),
        ));
    }
    if variant == Variant::Haar && n > HAAR_EXPERIMENT_CAP {
        return Err(Error::CapacityExceeded {
            what: "Haar randomizer level count",
            requested: n,
            cap: HAAR_EXPERIMENT_CAP,
        });
    }
    let fixed_base: Option<DMatrix<f64>> = match matrix {
        TestMatrix::Hilbert => Some(make_hilbert(n, m)?),
        TestMatrix::Randn if fix_base => {
            let mut base_rng = rng.trial_stream(0);
            Some(make_randn_test(n, m, &mut base_rng)?)
        }
        TestMatrix::Randn => None,
    };
    let results: Vec<Result<CoherenceResult>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut trial_rng = rng.trial_stream(1 + t as u64);
            let seed = trial_rng.seed();
            let a_owned;
            let a = match &fixed_base {
                Some(a) => a,
                None => {
                    a_owned = make_randn_test(n, m, &mut trial_rng)?;
                    &a_owned
                }
            };
            let omega = Randomizer::sample(variant, n, &mut trial_rng)?;
            let value = coherence(&omega.randomize_columns(a)?)?;
            Ok(CoherenceResult {
                value,
                n,
                m,
                randomizer: variant.name(),
                seed,
            })
        })
        .collect();
    let results: Vec<CoherenceResult> = results.into_iter().collect::<Result<_>>()?;
    let values: Vec<f64> = results.iter().map(|r| r.value).collect();
    let sample_mean = values.iter().sum::<f64>() / trials as f64;
    let sample_std = (values
        .iter()
        .map(|v| (v - sample_mean) * (v - sample_mean))
        .sum::<f64>()
        / (trials - 1) as f64)
        .sqrt();
    Ok((
        ExperimentSummary {
            randomizer: variant.name().to_string(),
            matrix: matrix.name().to_string(),
            n,
            m,
            trials,
            sample_mean,
            sample_std,
        },
        results,
    ))
}

/// Fixed-width histogram over `[0, 1]`; values at 1 land in the last bin.
pub fn histogram(values: &[f64], bin_width: f64) -> Vec<(f64, f64, usize)> {
    assert!(bin_width > 0.0 && bin_width <= 1.0);
    let bins = (1.0 / bin_width).ceil() as usize;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = ((v / bin_width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i as f64 * bin_width, (i + 1) as f64 * bin_width, c))
        .collect()
}
