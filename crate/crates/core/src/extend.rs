//! Signal extension by forecasting.
//!
//! The dynamical model is a linear one-step map between overlapping lag
//! vectors of the signal. Writing the last K+M samples of `x` into the lag
//! matrices X and Y (Y being X advanced by one sample), the least-squares
//! estimate of the map is `A = Y X^T (X X^T)^{-1}`. All rows of `A` except the
//! last one are exactly the unit shift, so only the last row `alpha` is ever
//! computed: one SPD solve of size M. Forecasting is then the order-M
//! autoregressive recursion driven by `alpha`.

use crate::error::{invalid, numeric, Result};
use crate::numerics::{
    compensated_dot, dot, ensure_finite, pinv_apply, solve_spd, thin_svd, DenseMatrix,
    PINV_DEFAULT_RTOL,
};
use crate::signal::Signal;

/// Factor applied to the input's max amplitude before the forecast recursion
/// is declared divergent and held flat.
const DIVERGENCE_GUARD_FACTOR: f64 = 1e3;

/// Lag matrices over the trailing K+M samples of a signal.
///
/// Column k of `x` holds samples `x[N-K-M+k .. N-K+k-1]`; `y` holds the same
/// windows advanced by one sample, so rows 0..M-2 of `y` equal rows 1..M-1 of
/// `x` exactly.
#[derive(Debug, Clone)]
pub struct LagMatrices {
    pub x: DenseMatrix,
    pub y: DenseMatrix,
    m: usize,
    k: usize,
}

impl LagMatrices {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Extracts the lag matrices from the trailing `k + m` samples of `x`.
pub fn build_lag_matrices(x: &Signal, m: usize, k: usize) -> Result<LagMatrices> {
    let n = x.len();
    if m == 0 || k == 0 {
        return Err(invalid!("lag sizes must be positive (m={m}, k={k})"));
    }
    if m > k {
        return Err(invalid!("need m <= k, got m={m}, k={k}"));
    }
    if k + m > n {
        return Err(invalid!("need k+m <= signal length, got k+m={} > {n}", k + m));
    }
    let start = n - k - m;
    let s = x.samples();
    let xm = DenseMatrix::from_fn(m, k, |row, col| s[start + col + row]);
    let ym = DenseMatrix::from_fn(m, k, |row, col| s[start + col + row + 1]);
    Ok(LagMatrices { x: xm, y: ym, m, k })
}

/// Which least-squares route estimates the recursion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    /// Normal equations with Cholesky and a jitter ladder. The measurement
    /// noise itself regularises `X X^T`, so this is the default.
    #[default]
    NormalEquations,
    /// Truncated-SVD pseudo-inverse; for the degenerate noiseless regime where
    /// `X X^T` is rank-deficient.
    Svd,
}

/// Estimated recursion coefficients: the last row of the companion-form model
/// matrix, plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct ForecastModel {
    /// Coefficients ordered oldest-first: the one-step prediction is
    /// `sum_m alpha[m] * window[m]` with `window` the last M samples.
    pub alpha: Vec<f64>,
    pub m: usize,
    pub k: usize,
    pub solver: Solver,
    /// Ratio of extreme diagonal entries of the Cholesky factor, or
    /// `sigma_max / sigma_min` for the SVD route.
    pub condition: f64,
}

/// Fits the recursion coefficients from lag matrices.
pub fn fit_sigext(lm: &LagMatrices, solver: Solver) -> Result<ForecastModel> {
    let m = lm.m;
    let y_last = lm.y.row(m - 1);
    let (alpha, condition) = match solver {
        Solver::NormalEquations => {
            // G = X X^T exploiting symmetry; rows of X are contiguous slices.
            let mut g = DenseMatrix::zeros(m, m);
            for r in 0..m {
                for c in r..m {
                    let v = dot(lm.x.row(r), lm.x.row(c));
                    g.set(r, c, v);
                    g.set(c, r, v);
                }
            }
            let rhs: Vec<f64> = (0..m).map(|r| dot(lm.x.row(r), y_last)).collect();
            let sol = solve_spd(&g, &rhs)?;
            (sol.x, sol.diag_ratio)
        }
        Solver::Svd => {
            // alpha^T = (X^T)^+ y_last, the minimal-norm solution of
            // alpha X = y_last.
            let xt = lm.x.transpose();
            let alpha = pinv_apply(&xt, y_last, PINV_DEFAULT_RTOL)?;
            let svd = thin_svd(&lm.x)?;
            let smax = svd.singular_values.first().copied().unwrap_or(0.0);
            let smin = svd
                .singular_values
                .iter()
                .copied()
                .filter(|s| *s > 0.0)
                .last()
                .unwrap_or(0.0);
            (alpha, if smin > 0.0 { smax / smin } else { f64::INFINITY })
        }
    };
    ensure_finite(&alpha, "alpha").map_err(|_| numeric!("fit produced non-finite coefficients"))?;
    Ok(ForecastModel {
        alpha,
        m,
        k: lm.k,
        solver,
        condition,
    })
}

/// A forecast together with the divergence-guard flag.
#[derive(Debug, Clone)]
pub struct GuardedForecast {
    pub samples: Vec<f64>,
    /// True when the recursion exceeded the amplitude guard and the remainder
    /// of the extension was held at the last in-range value.
    pub clamped: bool,
}

/// Runs the autoregressive recursion for `len` steps from the last M observed
/// samples (`tail`, oldest first), holding the output flat once it exceeds
/// `limit` in magnitude.
pub fn forecast_guarded(
    model: &ForecastModel,
    tail: &[f64],
    len: usize,
    limit: f64,
) -> Result<GuardedForecast> {
    if tail.len() != model.m {
        return Err(invalid!(
            "tail length {} does not match model order {}",
            tail.len(),
            model.m
        ));
    }
    ensure_finite(tail, "tail")?;
    ensure_finite(&model.alpha, "alpha")?;
    let mut window = tail.to_vec();
    let mut out = Vec::with_capacity(len);
    let mut clamped = false;
    let mut held = *tail.last().unwrap_or(&0.0);
    for _ in 0..len {
        if clamped {
            out.push(held);
            continue;
        }
        let next = compensated_dot(&model.alpha, &window);
        if !next.is_finite() || next.abs() > limit {
            clamped = true;
            out.push(held);
            continue;
        }
        held = next;
        out.push(next);
        window.rotate_left(1);
        *window.last_mut().unwrap() = next;
    }
    Ok(GuardedForecast { samples: out, clamped })
}

/// Autoregressive forecast of `len` samples from the last M observed samples.
///
/// Mathematically this equals reading the last entry of the companion-form
/// model matrix raised to successive powers, at O(len * M) cost. The
/// divergence guard is set relative to the tail's own amplitude.
pub fn forecast(model: &ForecastModel, tail: &[f64], len: usize) -> Result<Vec<f64>> {
    let scale = tail.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let limit = DIVERGENCE_GUARD_FACTOR * scale.max(f64::MIN_POSITIVE);
    Ok(forecast_guarded(model, tail, len, limit)?.samples)
}

/// Diagnostics from one extension run.
#[derive(Debug, Clone, Copy)]
pub struct ExtendDiag {
    pub clamped: bool,
    pub condition: f64,
}

/// Forecast-based extension: fits on the trailing `k + m` samples and appends
/// an `l`-sample forward forecast.
pub fn sig_ext(x: &Signal, m: usize, k: usize, l: usize, solver: Solver) -> Result<Signal> {
    Ok(sig_ext_detailed(x, m, k, l, solver)?.0)
}

pub fn sig_ext_detailed(
    x: &Signal,
    m: usize,
    k: usize,
    l: usize,
    solver: Solver,
) -> Result<(Signal, ExtendDiag)> {
    let lm = build_lag_matrices(x, m, k)?;
    let model = fit_sigext(&lm, solver)?;
    let tail = &x.samples()[x.len() - m..];
    let limit = DIVERGENCE_GUARD_FACTOR * x.max_abs().max(f64::MIN_POSITIVE);
    let fc = forecast_guarded(&model, tail, l, limit)?;
    let mut samples = Vec::with_capacity(x.len() + l);
    samples.extend_from_slice(x.samples());
    samples.extend_from_slice(&fc.samples);
    Ok((
        Signal::new(samples, x.fs())?,
        ExtendDiag {
            clamped: fc.clamped,
            condition: model.condition,
        },
    ))
}

/// Reflection about the last sample (which is not duplicated):
/// `ext[N-1+j] = x[N-1-j]` for j = 1..l.
pub fn symmetric_ext(x: &Signal, l: usize) -> Result<Signal> {
    let n = x.len();
    if l >= n {
        return Err(invalid!("reflection length {l} must be smaller than signal length {n}"));
    }
    let mut samples = Vec::with_capacity(n + l);
    samples.extend_from_slice(x.samples());
    for j in 1..=l {
        samples.push(x.samples()[n - 1 - j]);
    }
    Signal::new(samples, x.fs())
}

/// Linear-observable dynamic-mode extension: truncated thin SVD of X, reduced
/// one-step operator `U^T Y V S^{-1}`, propagation of the tail in reduced
/// coordinates, lifting by U.
pub fn dmd_ext(x: &Signal, m: usize, k: usize, l: usize, rank: usize) -> Result<Signal> {
    if rank == 0 || rank > m {
        return Err(invalid!("rank must satisfy 1 <= rank <= m, got {rank}"));
    }
    let lm = build_lag_matrices(x, m, k)?;
    let svd = thin_svd(&lm.x)?;
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    let usable = svd
        .singular_values
        .iter()
        .take_while(|s| **s > 1e-12 * smax)
        .count();
    if rank > usable {
        return Err(numeric!(
            "requested rank {rank} exceeds numerical rank; usable rank is {usable}"
        ));
    }

    // Reduced operator A_r[i][j] = sum_{p,q} U[p][i] Y[p][q] V[q][j] / s[j].
    let mut yv = DenseMatrix::zeros(m, rank); // Y V S^{-1}
    for p in 0..m {
        for j in 0..rank {
            let mut acc = 0.0;
            for q in 0..k {
                acc += lm.y.get(p, q) * svd.vt.get(j, q);
            }
            yv.set(p, j, acc / svd.singular_values[j]);
        }
    }
    let mut a_red = DenseMatrix::zeros(rank, rank);
    for i in 0..rank {
        for j in 0..rank {
            let mut acc = 0.0;
            for p in 0..m {
                acc += svd.u.get(p, i) * yv.get(p, j);
            }
            a_red.set(i, j, acc);
        }
    }

    // Reduced coordinates of the tail window.
    let tail = &x.samples()[x.len() - m..];
    let mut b: Vec<f64> = (0..rank)
        .map(|i| (0..m).map(|p| svd.u.get(p, i) * tail[p]).sum())
        .collect();

    let limit = DIVERGENCE_GUARD_FACTOR * x.max_abs().max(f64::MIN_POSITIVE);
    let mut samples = Vec::with_capacity(x.len() + l);
    samples.extend_from_slice(x.samples());
    let mut clamped = false;
    let mut held = *tail.last().unwrap_or(&0.0);
    for _ in 0..l {
        if clamped {
            samples.push(held);
            continue;
        }
        let next_b: Vec<f64> = (0..rank).map(|i| dot(a_red.row(i), &b)).collect();
        let lifted: f64 = (0..rank).map(|i| svd.u.get(m - 1, i) * next_b[i]).sum();
        if !lifted.is_finite() || lifted.abs() > limit {
            clamped = true;
            samples.push(held);
            continue;
        }
        held = lifted;
        samples.push(lifted);
        b = next_b;
    }
    Signal::new(samples, x.fs())
}

/// Default subsignal length for a given extension length: `floor(1.5 * l)`.
pub fn default_m(l: usize) -> usize {
    (1.5 * l as f64).floor() as usize
}

/// Default training size for a given subsignal length: `floor(2.5 * m)`.
pub fn default_k(m: usize) -> usize {
    (2.5 * m as f64).floor() as usize
}

/// Tagged choice of extension method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtenderKind {
    /// No extension: the transform runs on the raw signal.
    None,
    SigExt { m: usize, k: usize, solver: Solver },
    Symmetric,
    Dmd { m: usize, k: usize, rank: usize },
}

impl ExtenderKind {
    /// Minimum number of trailing samples the extender must see.
    pub fn required_history(&self, l: usize) -> usize {
        match self {
            ExtenderKind::None => 0,
            ExtenderKind::SigExt { m, k, .. } => m + k,
            ExtenderKind::Symmetric => l + 1,
            ExtenderKind::Dmd { m, k, .. } => m + k,
        }
    }
}

/// Runs the chosen extender, returning the extended signal and whether the
/// divergence guard fired.
pub fn extend_with(kind: &ExtenderKind, x: &Signal, l: usize) -> Result<(Signal, bool)> {
    match kind {
        ExtenderKind::None => Ok((x.clone(), false)),
        ExtenderKind::SigExt { m, k, solver } => {
            let (s, diag) = sig_ext_detailed(x, *m, *k, l, *solver)?;
            Ok((s, diag.clamped))
        }
        ExtenderKind::Symmetric => Ok((symmetric_ext(x, l)?, false)),
        ExtenderKind::Dmd { m, k, rank } => Ok((dmd_ext(x, *m, *k, l, *rank)?, false)),
    }
}
