//! Shared numerical kernels: DFT, SPD solves with a jitter ladder, truncated-SVD
//! pseudo-inverse, seeded Gaussian sampling and log-log regression.
//!
//! Everything here is pure and reentrant; values are immutable once built and
//! safe to move across threads.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, numeric, Result};

/// Rejects NaN/Inf at module boundaries.
pub fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(invalid!("{what}[{i}] is not finite ({v})"));
        }
    }
    Ok(())
}

/// Dense row-major matrix of 64-bit reals.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(invalid!("row {i} has {} entries, expected {n_cols}", row.len()));
            }
            ensure_finite(row, "matrix row")?;
            data.extend_from_slice(row);
        }
        Ok(DenseMatrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `self * other`, sized for test oracles rather than throughput.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(invalid!(
                "matmul shape mismatch: {}x{} * {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            ));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector `v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(invalid!("matvec length {} does not match cols {}", v.len(), self.cols));
        }
        Ok((0..self.rows).map(|r| dot(self.row(r), v)).collect())
    }

    pub fn is_symmetric_within(&self, rel_tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                if (self.get(r, c) - self.get(c, r)).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }
}

/// Plain dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Neumaier-compensated dot product; used where rounding drift over long
/// recursions matters.
pub fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (x, y) in a.iter().zip(b) {
        let term = x * y;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Discrete Fourier transform of arbitrary length.
///
/// Forward: `X[k] = sum_n x[n] exp(-2*pi*i*n*k/N)`. The inverse divides by `N`
/// so that `dft(dft(x, false), true)` is the identity.
pub fn dft(x: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
    if x.is_empty() {
        return Err(invalid!("dft input must not be empty"));
    }
    for (i, v) in x.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(invalid!("dft input[{i}] is not finite"));
        }
    }
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(x.len())
    } else {
        planner.plan_fft_forward(x.len())
    };
    let mut buf = x.to_vec();
    fft.process(&mut buf);
    if inverse {
        let scale = 1.0 / x.len() as f64;
        for v in &mut buf {
            *v *= scale;
        }
    }
    Ok(buf)
}

/// Escalation schedule for the diagonal regularisation used by [`solve_spd`].
///
/// On a Cholesky failure the system is retried with `A + lambda*I`,
/// `lambda = initial_rel * trace(A)/dim`, multiplying by `factor` up to
/// `max_rel * trace(A)/dim`.
#[derive(Debug, Clone, Copy)]
pub struct JitterPolicy {
    pub initial_rel: f64,
    pub factor: f64,
    pub max_rel: f64,
}

impl Default for JitterPolicy {
    fn default() -> Self {
        JitterPolicy {
            initial_rel: 1e-10,
            factor: 10.0,
            max_rel: 1e-4,
        }
    }
}

/// Solution of a symmetric positive-definite system together with solver
/// diagnostics.
#[derive(Debug, Clone)]
pub struct SpdSolution {
    pub x: Vec<f64>,
    /// Diagonal shift that was finally applied (0 when none was needed).
    pub jitter: f64,
    /// Ratio of extreme diagonal entries of the Cholesky factor.
    pub diag_ratio: f64,
}

/// Solves `A x = b` for symmetric positive-definite `A` by Cholesky
/// factorisation, escalating a diagonal jitter on failure.
pub fn solve_spd(a: &DenseMatrix, b: &[f64]) -> Result<SpdSolution> {
    solve_spd_with(a, b, &JitterPolicy::default())
}

pub fn solve_spd_with(a: &DenseMatrix, b: &[f64], policy: &JitterPolicy) -> Result<SpdSolution> {
    let n = a.rows();
    if a.cols() != n {
        return Err(invalid!("solve_spd needs a square matrix, got {}x{}", n, a.cols()));
    }
    if b.len() != n {
        return Err(invalid!("rhs length {} does not match dimension {}", b.len(), n));
    }
    ensure_finite(a.data(), "matrix")?;
    ensure_finite(b, "rhs")?;
    if !a.is_symmetric_within(1e-10) {
        return Err(invalid!("matrix is not symmetric within 1e-10 relative"));
    }

    let base = a.trace() / n as f64;
    let mut jitter = 0.0;
    loop {
        if let Some(factor) = cholesky(a, jitter) {
            let x = cholesky_solve(&factor, b);
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for i in 0..n {
                let d = factor.get(i, i);
                lo = lo.min(d);
                hi = hi.max(d);
            }
            return Ok(SpdSolution {
                x,
                jitter,
                diag_ratio: if lo > 0.0 { hi / lo } else { f64::INFINITY },
            });
        }
        let next = if jitter == 0.0 {
            policy.initial_rel * base
        } else {
            jitter * policy.factor
        };
        if next <= jitter || next > policy.max_rel * base {
            return Err(numeric!(
                "Cholesky failed after jitter escalation up to {:.3e}",
                jitter
            ));
        }
        jitter = next;
    }
}

/// Lower-triangular Cholesky factor of `A + jitter*I`, or `None` when a pivot
/// is non-positive or non-finite.
fn cholesky(a: &DenseMatrix, jitter: f64) -> Option<DenseMatrix> {
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j) + if i == j { jitter } else { 0.0 };
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l.set(i, j, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    // forward substitution L y = b
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    // back substitution L^T x = y
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l.get(k, i) * x[k];
        }
        x[i] = s / l.get(i, i);
    }
    x
}

/// Thin singular value decomposition `X = U S V^T`.
///
/// `u` is rows x r, `vt` is r x cols with `r = min(rows, cols)`; singular
/// values are sorted in decreasing order.
pub struct ThinSvd {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub vt: DenseMatrix,
}

pub fn thin_svd(x: &DenseMatrix) -> Result<ThinSvd> {
    ensure_finite(x.data(), "matrix")?;
    let a = nalgebra::DMatrix::from_row_slice(x.rows(), x.cols(), x.data());
    let svd = a.svd(true, true);
    let u = svd.u.ok_or_else(|| numeric!("SVD did not produce U"))?;
    let vt = svd.v_t.ok_or_else(|| numeric!("SVD did not produce V^T"))?;
    let r = svd.singular_values.len();
    let u = DenseMatrix::from_fn(u.nrows(), r, |i, j| u[(i, j)]);
    let vt = DenseMatrix::from_fn(r, vt.ncols(), |i, j| vt[(i, j)]);
    Ok(ThinSvd {
        u,
        singular_values: svd.singular_values.iter().copied().collect(),
        vt,
    })
}

pub const PINV_DEFAULT_RTOL: f64 = 1e-10;

/// Minimal-norm least-squares product `X^+ v` via thin SVD, zeroing singular
/// values below `rtol * sigma_max`.
pub fn pinv_apply(x: &DenseMatrix, v: &[f64], rtol: f64) -> Result<Vec<f64>> {
    if v.len() != x.rows() {
        return Err(invalid!(
            "pinv_apply length {} does not match rows {}",
            v.len(),
            x.rows()
        ));
    }
    ensure_finite(v, "vector")?;
    let svd = thin_svd(x)?;
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = rtol * smax;
    // X^+ v = V S^+ U^T v
    let r = svd.singular_values.len();
    let mut scaled = vec![0.0; r];
    for (i, sv) in svd.singular_values.iter().enumerate() {
        if *sv > cutoff && *sv > 0.0 {
            let ui: Vec<f64> = (0..x.rows()).map(|row| svd.u.get(row, i)).collect();
            scaled[i] = dot(&ui, v) / sv;
        }
    }
    let mut out = vec![0.0; x.cols()];
    for i in 0..r {
        if scaled[i] != 0.0 {
            for c in 0..x.cols() {
                out[c] += svd.vt.get(i, c) * scaled[i];
            }
        }
    }
    Ok(out)
}

/// SplitMix64 stream; the frozen PRNG behind all random draws in this crate.
///
/// state' = state + 0x9E3779B97F4A7C15; output = mix(state') with the standard
/// SplitMix64 finaliser. Identical seeds give bit-identical streams on every
/// platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        mix64(self.state)
    }

    /// Uniform draw in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn mix64(z: u64) -> u64 {
    let mut z = z;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives an independent seed from a base seed and two indices, so that
/// parallel realizations never share a stream regardless of execution order.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    mix64(
        base.wrapping_add(mix64(stream.wrapping_mul(0x9E3779B97F4A7C15)))
            .wrapping_add(mix64(index.wrapping_mul(0xD1B54A32D192ED03))),
    )
}

/// i.i.d. N(0, sigma^2) samples by the Box-Muller transform over a SplitMix64
/// stream. Deterministic per seed.
pub fn gaussian_noise(n: usize, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(invalid!("sigma must be nonnegative and finite, got {sigma}"));
    }
    let mut out = Vec::with_capacity(n);
    if sigma == 0.0 {
        out.resize(n, 0.0);
        return Ok(out);
    }
    let mut rng = SplitMix64::new(seed);
    while out.len() < n {
        // u1 in (0, 1] so the logarithm is finite; u2 in [0, 1).
        let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        out.push(sigma * radius * angle.cos());
        if out.len() < n {
            out.push(sigma * radius * angle.sin());
        }
    }
    Ok(out)
}

/// Result of an ordinary least-squares line fit.
#[derive(Debug, Clone, Copy)]
pub struct LinFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// OLS fit of `log10(ys)` on `log10(xs)`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<LinFit> {
    if xs.len() != ys.len() {
        return Err(invalid!("length mismatch: {} vs {}", xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(invalid!("need at least 2 points, got {}", xs.len()));
    }
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(invalid!("entries must be positive and finite (index {i}: {x}, {y})"));
        }
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.log10()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(numeric!("degenerate fit: abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let ss_tot: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(LinFit { slope, intercept, r2 })
}
