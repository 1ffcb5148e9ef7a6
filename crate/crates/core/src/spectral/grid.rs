use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Periodic grid on the torus `[0, L)^d` together with its frequency lattice
/// and FFT plans.
///
/// Storage is row-major with axis 0 slowest. The integer wavenumber of slot
/// `i` along an axis is `i` for `i <= N/2` and `i - N` otherwise, so the
/// Nyquist plane carries `+N/2`.
pub struct Grid {
    dim: usize,
    n: usize,
    side: f64,
    len: usize,
    kvec: Vec<[i32; 3]>,
    k2: Vec<u32>,
    neg: Vec<usize>,
    keep: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("side", &self.side)
            .finish()
    }
}

impl Grid {
    pub fn new(dim: usize, n: usize, side: f64) -> Result<Arc<Grid>> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("N must be even and >= 8, got {n}")));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::InvalidGrid(format!("side length must be positive, got {side}")));
        }
        let len = n.pow(dim as u32);
        let half = (n / 2) as i32;
        let wav = |i: usize| -> i32 {
            let i = i as i32;
            if i <= half {
                i
            } else {
                i - n as i32
            }
        };
        let slot = |k: i32| -> usize { k.rem_euclid(n as i32) as usize };

        let mut kvec = Vec::with_capacity(len);
        let mut k2 = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        for idx in 0..len {
            let mut k = [0i32; 3];
            let mut rem = idx;
            for ax in (0..dim).rev() {
                k[ax] = wav(rem % n);
                rem /= n;
            }
            let mut nidx = 0usize;
            for &kk in k.iter().take(dim) {
                nidx = nidx * n + slot(-kk);
            }
            kvec.push(k);
            k2.push(k.iter().map(|&x| (x * x) as u32).sum());
            neg.push(nidx);
            keep.push(k.iter().take(dim).all(|&x| 3 * x.unsigned_abs() as usize <= n));
        }

        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Arc::new(Grid { dim, n, side, len, kvec, k2, neg, keep, fwd, inv }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// Number of lattice points (= number of modes).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Fundamental frequency `2π/L`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.side
    }

    pub fn dx(&self) -> f64 {
        self.side / self.n as f64
    }

    /// Volume of the torus.
    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len as f64
    }

    pub fn k(&self, idx: usize) -> [i32; 3] {
        self.kvec[idx]
    }

    /// Integer squared lattice norm `|k|²`.
    pub fn k2(&self, idx: usize) -> u32 {
        self.k2[idx]
    }

    pub fn xi(&self, idx: usize, axis: usize) -> f64 {
        self.dxi() * self.kvec[idx][axis] as f64
    }

    pub fn xi_norm(&self, idx: usize) -> f64 {
        self.dxi() * (self.k2[idx] as f64).sqrt()
    }

    /// Frequency used by first-order derivatives; zero on the Nyquist plane
    /// of the axis so that odd multipliers keep real fields real.
    pub fn xi_deriv(&self, idx: usize, axis: usize) -> f64 {
        let k = self.kvec[idx][axis];
        if 2 * k.unsigned_abs() as usize == self.n {
            0.0
        } else {
            self.dxi() * k as f64
        }
    }

    /// Storage slot of `-k`.
    pub fn neg(&self, idx: usize) -> usize {
        self.neg[idx]
    }

    /// True when the mode survives the 2/3 rule.
    pub fn keep(&self, idx: usize) -> bool {
        self.keep[idx]
    }

    pub fn max_xi(&self) -> f64 {
        self.dxi() * (self.dim as f64).sqrt() * (self.n / 2) as f64
    }

    /// Largest |ξ| among modes surviving the 2/3 rule.
    pub fn max_kept_xi(&self) -> f64 {
        let m = (self.n / 3) as f64;
        self.dxi() * (self.dim as f64).sqrt() * m
    }

    /// Physical coordinate of grid point `idx`.
    pub fn x(&self, idx: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        let mut rem = idx;
        for ax in (0..self.dim).rev() {
            x[ax] = (rem % self.n) as f64 * self.dx();
            rem /= self.n;
        }
        x
    }

    /// Slot of the integer wavenumber `k` (components taken mod N).
    pub fn index_of(&self, k: [i32; 3]) -> usize {
        let n = self.n as i32;
        let mut idx = 0usize;
        for &kk in k.iter().take(self.dim) {
            idx = idx * self.n + kk.rem_euclid(n) as usize;
        }
        idx
    }

    /// In-place multidimensional FFT. Forward transforms are normalized by
    /// `1/N^d` so that the output are Fourier-series coefficients; inverse
    /// transforms are unnormalized synthesis.
    pub fn fft(&self, data: &mut [C64], inverse: bool) {
        assert_eq!(data.len(), self.len);
        let plan = if inverse { &self.inv } else { &self.fwd };
        let n = self.n;
        let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut buf: Vec<C64> = Vec::new();
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = n * stride;
            buf.resize(block, C64::new(0.0, 0.0));
            for chunk in data.chunks_exact_mut(block) {
                for m in 0..n {
                    let row = &chunk[m * stride..(m + 1) * stride];
                    for (o, &z) in row.iter().enumerate() {
                        buf[o * n + m] = z;
                    }
                }
                plan.process_with_scratch(&mut buf, &mut scratch);
                for m in 0..n {
                    let row = &mut chunk[m * stride..(m + 1) * stride];
                    for (o, z) in row.iter_mut().enumerate() {
                        *z = buf[o * n + m];
                    }
                }
            }
        }
        if !inverse {
            let s = 1.0 / self.len as f64;
            for z in data.iter_mut() {
                *z *= s;
            }
        }
    }

    /// Synthesizes real physical fields from Hermitian coefficient arrays,
    /// two fields per complex transform.
    pub fn to_physical(&self, coeffs: &[&[C64]]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(coeffs.len());
        let mut z = vec![C64::new(0.0, 0.0); self.len];
        for pair in coeffs.chunks(2) {
            if pair.len() == 2 {
                for ((zz, &a), &b) in z.iter_mut().zip(pair[0]).zip(pair[1]) {
                    *zz = C64::new(a.re - b.im, a.im + b.re);
                }
                self.fft(&mut z, true);
                out.push(z.iter().map(|c| c.re).collect());
                out.push(z.iter().map(|c| c.im).collect());
            } else {
                z.copy_from_slice(pair[0]);
                self.fft(&mut z, true);
                out.push(z.iter().map(|c| c.re).collect());
            }
        }
        out
    }

    /// Analyzes real physical fields into Hermitian coefficient arrays, two
    /// fields per complex transform.
    pub fn to_spectral(&self, fields: &[&[f64]]) -> Vec<Vec<C64>> {
        let mut out = Vec::with_capacity(fields.len());
        let mut z = vec![C64::new(0.0, 0.0); self.len];
        for pair in fields.chunks(2) {
            if pair.len() == 2 {
                for ((zz, &a), &b) in z.iter_mut().zip(pair[0]).zip(pair[1]) {
                    *zz = C64::new(a, b);
                }
                self.fft(&mut z, false);
                let mut ca = vec![C64::new(0.0, 0.0); self.len];
                let mut cb = vec![C64::new(0.0, 0.0); self.len];
                for idx in 0..self.len {
                    let zk = z[idx];
                    let zm = z[self.neg[idx]].conj();
                    ca[idx] = (zk + zm) * 0.5;
                    let d = zk - zm;
                    cb[idx] = C64::new(d.im * 0.5, -d.re * 0.5);
                }
                out.push(ca);
                out.push(cb);
            } else {
                for (zz, &a) in z.iter_mut().zip(pair[0]) {
                    *zz = C64::new(a, 0.0);
                }
                self.fft(&mut z, false);
                let mut ca = vec![C64::new(0.0, 0.0); self.len];
                for idx in 0..self.len {
                    ca[idx] = (z[idx] + z[self.neg[idx]].conj()) * 0.5;
                }
                out.push(ca);
            }
        }
        out
    }

    /// Replaces `c` by its Hermitian part `(c(k) + conj c(-k))/2`.
    pub fn symmetrize(&self, c: &mut [C64]) {
        for idx in 0..self.len {
            let j = self.neg[idx];
            if j > idx {
                let s = (c[idx] + c[j].conj()) * 0.5;
                c[idx] = s;
                c[j] = s.conj();
            } else if j == idx {
                c[idx].im = 0.0;
            }
        }
    }

    pub fn dealias(&self, c: &mut [C64]) {
        for (z, &k) in c.iter_mut().zip(&self.keep) {
            if !k {
                *z = C64::new(0.0, 0.0);
            }
        }
    }
}
