//! Closed-form and Monte Carlo spectral statistics for random orthogonal
//! ensembles.
//!
//! For Haar-butterfly matrices the eigenvalue arguments are the sign
//! combinations `+-theta_0 +- ... +- theta_{n-1}` and the trace of the
//! `k`-th power collapses to `N * prod_j cos(k theta_j)`, so these
//! statistics never need a dense solve. Non-simple and Haar ensembles go
//! through dense materialization within a cap.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::str::FromStr;

use crate::butterfly::{NonSimpleButterfly, SimpleButterfly};
use crate::error::{Error, Result};
use crate::haar::HaarOrthogonal;
use crate::rng::RngState;

/// Cap on dense eigensolves and dense trace work (`N = 2^10 = 1024`).
pub const SPECTRAL_DENSE_CAP: usize = 10;

/// The ensembles whose spectra can be sampled for comparison plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Simple,
    NonSimple,
    Iid,
    Haar,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Simple => "simple",
            Ensemble::NonSimple => "nonsimple",
            Ensemble::Iid => "iid",
            Ensemble::Haar => "haar",
        }
    }
}

impl std::fmt::Display for Ensemble {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simple" => Ok(Ensemble::Simple),
            "nonsimple" => Ok(Ensemble::NonSimple),
            "iid" => Ok(Ensemble::Iid),
            "haar" => Ok(Ensemble::Haar),
            other => Err(Error::InvalidArgument(format!(
                "unknown ensemble '{other}' (expected simple, nonsimple, iid or haar)"
            ))),
        }
    }
}

/// The multiset of eigenvalue arguments of one orthogonal matrix, each in
/// `[0, 2*pi)`. Real orthogonality makes the multiset closed under
/// `phi -> 2*pi - phi`.
#[derive(Debug, Clone)]
pub struct SpectrumSample {
    phases: Vec<f64>,
}

impl SpectrumSample {
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Checks closure under conjugation up to `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let mut sorted: Vec<f64> = self.phases.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut mirrored: Vec<f64> = self
            .phases
            .iter()
            .map(|p| {
                let m = (TAU - p).rem_euclid(TAU);
                if m >= TAU { 0.0 } else { m }
            })
            .collect();
        mirrored.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted
            .iter()
            .zip(&mirrored)
            .all(|(a, b)| (a - b).abs() < tol || (TAU - (a - b).abs()) < tol)
    }
}

/// Monte Carlo moment estimates for one trace power.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentReport {
    pub k: u32,
    /// Estimate of `E[(1/N) tr Q^k]`.
    pub mean_normalized_trace: f64,
    /// Estimate of `E[(tr Q^k)^2]`.
    pub second_moment: f64,
    pub trials: usize,
    /// Sample standard deviation of `(tr Q^k)^2` divided by `sqrt(trials)`.
    pub std_error: f64,
}

fn wrap(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if p >= TAU { 0.0 } else { p }
}

/// The `2^n` eigenvalue arguments of a Haar-butterfly matrix, via the
/// recursive sign-combination doubling; no dense solve.
pub fn eigenvalues_simple(b: &SimpleButterfly) -> SpectrumSample {
    let mut phases = vec![0.0f64];
    for theta in b.angles() {
        let t = theta.radians();
        phases = phases
            .iter()
            .flat_map(|p| [p + t, p - t])
            .collect();
    }
    SpectrumSample {
        phases: phases.into_iter().map(wrap).collect(),
    }
}

/// `tr B^k = N * prod_j cos(k theta_j)` for a Haar-butterfly matrix.
pub fn trace_power_simple(b: &SimpleButterfly, k: u32) -> f64 {
    let n = b.dim() as f64;
    n * b
        .angles()
        .iter()
        .map(|theta| (k as f64 * theta.radians()).cos())
        .product::<f64>()
}

/// `tr M^k` by repeated multiplication; the dense oracle for the closed
/// forms above.
pub fn trace_power_dense(m: &DMatrix<f64>, k: u32) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if m.nrows() > (1 << SPECTRAL_DENSE_CAP) {
        return Err(Error::CapacityExceeded {
            what: "dense trace dimension",
            requested: m.nrows(),
            cap: 1 << SPECTRAL_DENSE_CAP,
        });
    }
    if k == 0 {
        return Ok(m.nrows() as f64);
    }
    let mut acc = m.clone();
    for _ in 1..k {
        acc = &acc * m;
    }
    Ok(acc.trace())
}

/// Eigenvalue arguments of a dense matrix in `[0, 2*pi)`.
pub fn dense_eigen_phases(m: &DMatrix<f64>) -> Vec<f64> {
    m.complex_eigenvalues()
        .iter()
        .map(|z| wrap(z.im.atan2(z.re)))
        .collect()
}

/// Monte Carlo moments of `tr Q^k` for the simple or non-simple ensemble.
///
/// The simple ensemble uses the product formula, so `n` can be large; the
/// non-simple ensemble materializes densely and is capped.
pub fn moment_experiment(
    ensemble: Ensemble,
    n: usize,
    k: u32,
    trials: usize,
    rng: &RngState,
) -> Result<MomentReport> {
    if trials < 2 {
        return Err(Error::InvalidArgument(
            "moment experiment needs at least 2 trials".into(),
        ));
    }
    let traces: Vec<f64> = match ensemble {
        Ensemble::Simple => (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng.trial_stream(t as u64);
                trace_power_simple(&SimpleButterfly::sample(n, &mut rng), k)
            })
            .collect(),
        Ensemble::NonSimple => {
            if n > SPECTRAL_DENSE_CAP {
                return Err(Error::CapacityExceeded {
                    what: "non-simple moment level count",
                    requested: n,
                    cap: SPECTRAL_DENSE_CAP,
                });
            }
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = rng.trial_stream(t as u64);
                    let b = NonSimpleButterfly::sample(n, &mut rng);
                    let m = b.materialize().expect("within dense cap");
                    trace_power_dense(&m, k).expect("within dense cap")
                })
                .collect()
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "moment experiment supports simple and nonsimple, not {other}"
            )))
        }
    };
    let dim = (1usize << n) as f64;
    let mean_normalized_trace = traces.iter().sum::<f64>() / trials as f64 / dim;
    let squares: Vec<f64> = traces.iter().map(|t| t * t).collect();
    let second_moment = squares.iter().sum::<f64>() / trials as f64;
    let var = squares
        .iter()
        .map(|s| (s - second_moment) * (s - second_moment))
        .sum::<f64>()
        / (trials - 1) as f64;
    Ok(MomentReport {
        k,
        mean_normalized_trace,
        second_moment,
        trials,
        std_error: (var / trials as f64).sqrt(),
    })
}

/// Per-trial values of `(1/n) log((tr Q^k)^2 / N)` for the simple ensemble,
/// computed from the product formula as
/// `(1/n) (sum_j log cos^2(k theta_j) + n log 2)`.
///
/// A draw with `|cos(k theta)| < 1e-300` (probability zero up to floating
/// point) is resampled so the log stays finite.
pub fn clt_failure_statistic(n: usize, k: u32, trials: usize, rng: &RngState) -> Vec<f64> {
    assert!(n >= 1, "the statistic needs n >= 1");
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng.trial_stream(t as u64);
            let mut sum = 0.0;
            for _ in 0..n {
                let mut c = (k as f64 * rng.uniform_angle().radians()).cos();
                while c.abs() < 1e-300 {
                    c = (k as f64 * rng.uniform_angle().radians()).cos();
                }
                sum += (c * c).ln();
            }
            (sum + n as f64 * std::f64::consts::LN_2) / n as f64
        })
        .collect()
}

/// Samples of the pair variables `x_j = cos(theta_hat_j)` where
/// `theta_hat_0 = sum_j theta_j` and `theta_hat_j = theta_hat_0 - 2 theta_j`.
/// Each marginal follows the arcsine density on `(-1, 1)` and the
/// coordinates are independent. One row per trial.
pub fn pair_variable_distribution(n: usize, trials: usize, rng: &RngState) -> Vec<Vec<f64>> {
    assert!(n >= 1, "pair variables need n >= 1");
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng.trial_stream(t as u64);
            let thetas: Vec<f64> = (0..n).map(|_| rng.uniform_angle().radians()).collect();
            let hat0: f64 = thetas.iter().sum();
            let mut xs = Vec::with_capacity(n);
            xs.push(hat0.cos());
            for theta in &thetas[1..] {
                xs.push((hat0 - 2.0 * theta).cos());
            }
            xs
        })
        .collect()
}

/// Per-trial eigen-phase samples for plotting the spectrum of an ensemble.
///
/// The iid ensemble draws `N/2` uniform phases and closes them under
/// conjugation (phases only, no matrix). Non-simple and Haar ensembles use
/// a dense eigensolve and are capped at `n <= 10`.
pub fn spectrum_cloud(
    ensemble: Ensemble,
    n: usize,
    trials: usize,
    rng: &RngState,
) -> Result<Vec<SpectrumSample>> {
    if matches!(ensemble, Ensemble::NonSimple | Ensemble::Haar) && n > SPECTRAL_DENSE_CAP {
        return Err(Error::CapacityExceeded {
            what: "dense eigensolve level count",
            requested: n,
            cap: SPECTRAL_DENSE_CAP,
        });
    }
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng.trial_stream(t as u64);
            let phases = match ensemble {
                Ensemble::Simple => {
                    return eigenvalues_simple(&SimpleButterfly::sample(n, &mut rng));
                }
                Ensemble::NonSimple => {
                    let b = NonSimpleButterfly::sample(n, &mut rng);
                    dense_eigen_phases(&b.materialize().expect("within dense cap"))
                }
                Ensemble::Haar => {
                    let q = HaarOrthogonal::sample(1 << n, &mut rng).expect("dim >= 1");
                    dense_eigen_phases(&q.materialize().expect("dense product"))
                }
                Ensemble::Iid => {
                    if n == 0 {
                        vec![0.0]
                    } else {
                        let mut phases = Vec::with_capacity(1 << n);
                        for _ in 0..1usize << (n - 1) {
                            let p = rng.uniform_angle().radians();
                            phases.push(p);
                            phases.push(wrap(TAU - p));
                        }
                        phases
                    }
                }
            };
            SpectrumSample { phases }
        })
        .collect();
    Ok(samples)
}
