//! The orthonormal DCT-II operator.
//!
//! `out[k] = s_k * sum_m v[m] * cos(pi (m + 1/2) k / N)` with
//! `s_0 = sqrt(1/N)` and `s_k = sqrt(2/N)` for `k >= 1`, so the transform is
//! orthogonal. Power-of-two lengths run through a radix-2 FFT with the
//! even/odd reordering trick in `O(N log N)` multiplications; other lengths
//! fall back to direct summation. The fast path records at most
//! `2 N log2(N) + 8 N` multiplications.

use crate::opcount::OpCounter;

/// A DCT-II plan for a fixed length, caching twiddle tables.
#[derive(Debug, Clone)]
pub struct Dct {
    len: usize,
    /// FFT twiddles `e^{-2 pi i k / N}` for `k < N/2`, as (re, im).
    fft_tw: Vec<(f64, f64)>,
    /// Post twiddles `(cos, sin)` of `pi k / (2N)` folded with the
    /// orthonormal scale factors.
    post: Vec<(f64, f64)>,
}

impl Dct {
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "DCT length must be positive");
        let n = len as f64;
        let mut fft_tw = Vec::new();
        if len.is_power_of_two() {
            fft_tw = (0..len / 2)
                .map(|k| {
                    let ang = -2.0 * std::f64::consts::PI * k as f64 / n;
                    (ang.cos(), ang.sin())
                })
                .collect();
        }
        let post = (0..len)
            .map(|k| {
                let s = if k == 0 {
                    (1.0 / n).sqrt()
                } else {
                    (2.0 / n).sqrt()
                };
                let ang = std::f64::consts::PI * k as f64 / (2.0 * n);
                (s * ang.cos(), s * ang.sin())
            })
            .collect();
        Self { len, fft_tw, post }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn apply(&self, v: &[f64], counter: &mut OpCounter) -> Vec<f64> {
        assert_eq!(v.len(), self.len, "DCT input length mismatch");
        if self.len == 1 {
            counter.add(1);
            return vec![v[0] * self.post[0].0];
        }
        if self.len.is_power_of_two() {
            self.apply_fft(v, counter)
        } else {
            self.apply_direct(v, counter)
        }
    }

    fn apply_fft(&self, v: &[f64], counter: &mut OpCounter) -> Vec<f64> {
        let n = self.len;
        // Even/odd reordering: y[m] = v[2m], y[N-1-m] = v[2m+1].
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        for m in 0..n / 2 {
            re[m] = v[2 * m];
            re[n - 1 - m] = v[2 * m + 1];
        }
        fft_in_place(&mut re, &mut im, &self.fft_tw, counter);
        // C[k] = Re(e^{-i pi k / 2N} Y[k]), then the orthonormal scale; the
        // scale is folded into the post table, 2 multiplications per output.
        let out = (0..n)
            .map(|k| {
                let (pc, ps) = self.post[k];
                pc * re[k] + ps * im[k]
            })
            .collect();
        counter.add(2 * n as u64);
        out
    }

    fn apply_direct(&self, v: &[f64], counter: &mut OpCounter) -> Vec<f64> {
        let n = self.len;
        let nf = n as f64;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = 0.0;
            for (m, x) in v.iter().enumerate() {
                acc += x * (std::f64::consts::PI * (m as f64 + 0.5) * k as f64 / nf).cos();
            }
            let s = if k == 0 {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            };
            out.push(s * acc);
        }
        counter.add((n * n + n) as u64);
        out
    }
}

/// Radix-2 decimation-in-time FFT with the `e^{-2 pi i k / N}` convention.
/// `N/2 log2(N)` complex twiddle multiplies are performed, counted as 4 real
/// multiplications each.
fn fft_in_place(re: &mut [f64], im: &mut [f64], tw: &[(f64, f64)], counter: &mut OpCounter) {
    let n = re.len();
    let levels = n.trailing_zeros();
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 0..n - 1 {
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
        let mut mask = n >> 1;
        while j & mask != 0 {
            j &= !mask;
            mask >>= 1;
        }
        j |= mask;
    }
    let mut size = 2;
    for _ in 0..levels {
        let half = size / 2;
        let step = n / size;
        for base in (0..n).step_by(size) {
            for t in 0..half {
                let (wr, wi) = tw[t * step];
                let (br, bi) = (re[base + t + half], im[base + t + half]);
                let ur = wr * br - wi * bi;
                let ui = wr * bi + wi * br;
                let (ar, ai) = (re[base + t], im[base + t]);
                re[base + t] = ar + ur;
                im[base + t] = ai + ui;
                re[base + t + half] = ar - ur;
                im[base + t + half] = ai - ui;
            }
        }
        size *= 2;
    }
    // 4 real multiplications per butterfly, N/2 butterflies per level
    counter.add(4 * (n as u64 / 2) * levels as u64);
}

/// One-shot orthonormal DCT-II without a cached plan.
pub fn dct_apply(v: &[f64]) -> Vec<f64> {
    let mut counter = OpCounter::new();
    Dct::new(v.len()).apply(v, &mut counter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;

    fn direct_oracle(v: &[f64]) -> Vec<f64> {
        let n = v.len() as f64;
        (0..v.len())
            .map(|k| {
                let s = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
                s * v
                    .iter()
                    .enumerate()
                    .map(|(m, x)| {
                        x * (std::f64::consts::PI * (m as f64 + 0.5) * k as f64 / n).cos()
                    })
                    .sum::<f64>()
            })
            .collect()
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn constant_vector_maps_to_first_coordinate() {
        let out = dct_apply(&[1.0, 1.0, 1.0, 1.0]);
        assert!((out[0] - 2.0).abs() < 1e-14);
        for x in &out[1..] {
            assert!(x.abs() < 1e-14);
        }
    }

    #[test]
    fn norm_preserved() {
        let mut rng = RngState::from_seed(1);
        for &n in &[1usize, 2, 8, 64, 256] {
            let v: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
            let out = dct_apply(&v);
            assert!((norm(&out) - norm(&v)).abs() < 1e-12 * norm(&v), "n = {n}");
        }
    }

    #[test]
    fn fast_path_matches_direct_summation() {
        let mut rng = RngState::from_seed(2);
        for &n in &[2usize, 8, 32, 128, 512] {
            let v: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
            let fast = dct_apply(&v);
            let slow = direct_oracle(&v);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn non_power_of_two_falls_back() {
        let mut rng = RngState::from_seed(3);
        let v: Vec<f64> = (0..12).map(|_| rng.standard_normal()).collect();
        let fast = dct_apply(&v);
        let slow = direct_oracle(&v);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_path_multiplication_budget() {
        for &n in &[8usize, 64, 1024] {
            let v = vec![1.0; n];
            let mut c = OpCounter::new();
            Dct::new(n).apply(&v, &mut c);
            let log2n = n.trailing_zeros() as u64;
            assert!(
                c.multiplications() <= 2 * n as u64 * log2n + 8 * n as u64,
                "n = {n}, count = {}",
                c.multiplications()
            );
        }
    }
}
