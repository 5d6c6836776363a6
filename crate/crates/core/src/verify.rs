//! Monte Carlo verification of the forecast-error asymptotics, closed-form
//! model oracles, and the synthetic benchmark table.
//!
//! For the two-tone test signal the forecast variance grows linearly with the
//! noise power and decays like one over the training size; both scaling laws
//! are measured here by seeded Monte Carlo sweeps and log-log fits. The
//! expected model matrix and the inverse of the expected Gram matrix have
//! closed forms when every component frequency is an integer number of cycles
//! per subsignal, which gives independent oracles for the fitted
//! coefficients.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::extend::{default_k, extend_with, sig_ext, ExtenderKind, Solver};
use crate::metrics::{mse_xp, perf_index_d};
use crate::numerics::{
    compensated_sum, derive_seed, gaussian_noise, loglog_slope, DenseMatrix, LinFit,
};
use crate::pipeline::restrict;
use crate::signal::{
    eval_ahm_at, eval_harmonics_at, AhmParams, HarmonicComponent, Signal,
};
use crate::tfr::stft;
use crate::window::WindowSpec;

/// Deterministic part of the Monte Carlo observation model.
#[derive(Debug, Clone)]
pub enum McSignal {
    Harmonics {
        components: Vec<HarmonicComponent>,
        fs: f64,
    },
    Ahm(AhmParams),
}

impl McSignal {
    fn eval_at(&self, n: usize) -> f64 {
        match self {
            McSignal::Harmonics { components, fs } => eval_harmonics_at(components, *fs, n),
            McSignal::Ahm(params) => eval_ahm_at(params, n),
        }
    }

    fn fs(&self) -> f64 {
        match self {
            McSignal::Harmonics { fs, .. } => *fs,
            McSignal::Ahm(params) => params.fs,
        }
    }
}

/// Which parameter a Monte Carlo run sweeps.
#[derive(Debug, Clone)]
pub enum Sweep {
    /// Noise levels (standard deviations).
    Sigma(Vec<f64>),
    /// Training sizes K.
    TrainSize(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub signal: McSignal,
    pub m: usize,
    /// Training size when sweeping sigma.
    pub k: usize,
    /// Nominal signal length N; forecasts start at index N-1.
    pub n: usize,
    /// Noise level when sweeping K.
    pub sigma: f64,
    pub sweep: Sweep,
    /// Forecast indices measured, in samples past the last observation.
    pub horizons: Vec<usize>,
    pub realizations: usize,
    pub base_seed: u64,
    pub solver: Solver,
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (la, lb) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// The two-tone configuration behind the scaling-law figures: cycle counts 10
/// and 33 per 150-sample subsignal, second amplitude 1.4, N = 10^4.
pub fn two_tone_components() -> Vec<HarmonicComponent> {
    vec![
        HarmonicComponent::new(1.0, 10.0 / 150.0, 0.0),
        HarmonicComponent::new(1.4, 33.0 / 150.0, 0.0),
    ]
}

impl McConfig {
    /// Noise sweep reproducing the variance-vs-noise figure at desk scale:
    /// 15 noise powers log-spaced over [1e-7, 1e-2], K = 450.
    pub fn sigma_sweep_benchmark(realizations: usize, base_seed: u64) -> Self {
        let sigmas: Vec<f64> = log_space(1e-7, 1e-2, 15).iter().map(|v| v.sqrt()).collect();
        McConfig {
            signal: McSignal::Harmonics {
                components: two_tone_components(),
                fs: 1.0,
            },
            m: 150,
            k: 450,
            n: 10_000,
            sigma: 1e-2,
            sweep: Sweep::Sigma(sigmas),
            horizons: vec![1, 10, 100],
            realizations,
            base_seed,
            solver: Solver::NormalEquations,
        }
    }

    /// Training-size sweep reproducing the variance-vs-K figure at desk
    /// scale: 12 sizes log-spaced over [800, 2000], sigma = 1e-2.
    pub fn k_sweep_benchmark(realizations: usize, base_seed: u64) -> Self {
        let ks: Vec<usize> = log_space(800.0, 2000.0, 12)
            .iter()
            .map(|v| v.round() as usize)
            .collect();
        McConfig {
            signal: McSignal::Harmonics {
                components: two_tone_components(),
                fs: 1.0,
            },
            m: 150,
            k: 450,
            n: 10_000,
            sigma: 1e-2,
            sweep: Sweep::TrainSize(ks),
            horizons: vec![1, 10, 100],
            realizations,
            base_seed,
            solver: Solver::NormalEquations,
        }
    }
}

/// Empirical moments at one (sweep point, horizon) pair.
#[derive(Debug, Clone, Copy)]
pub struct McRow {
    /// Sigma or K, depending on the sweep.
    pub sweep_value: f64,
    pub horizon: usize,
    pub bias: f64,
    pub variance: f64,
    /// Realizations that entered the statistics.
    pub count: usize,
    /// Realizations excluded because the extender failed.
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct McReport {
    pub rows: Vec<McRow>,
}

impl McReport {
    /// One row per sweep point and horizon.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sweep_value,horizon,bias,variance,count,failures\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.9e},{:.9e},{},{}\n",
                r.sweep_value, r.horizon, r.bias, r.variance, r.count, r.failures
            ));
        }
        out
    }

    /// Log-log slope of variance against the squared noise level, excluding
    /// the conditioning-floor region: only points with variance above
    /// `floor_factor` times the smallest observed variance enter the fit.
    pub fn sigma_variance_slope(&self, horizon: usize, floor_factor: f64) -> Result<LinFit> {
        let rows: Vec<&McRow> = self.rows.iter().filter(|r| r.horizon == horizon).collect();
        if rows.is_empty() {
            return Err(invalid!("no rows for horizon {horizon}"));
        }
        let min_var = rows.iter().map(|r| r.variance).fold(f64::INFINITY, f64::min);
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.variance > floor_factor * min_var)
            .map(|r| (r.sweep_value * r.sweep_value, r.variance))
            .unzip();
        loglog_slope(&xs, &ys)
    }

    /// Log-log slope of variance against the training size.
    pub fn k_variance_slope(&self, horizon: usize) -> Result<LinFit> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter(|r| r.horizon == horizon)
            .map(|r| (r.sweep_value, r.variance))
            .unzip();
        loglog_slope(&xs, &ys)
    }
}

/// Runs the Monte Carlo sweep: per sweep point, `realizations` independent
/// noisy signals are extended and the forecast errors against the
/// deterministic part are collected per horizon.
///
/// Realization seeds are derived from (base seed, sweep index, realization
/// index), so results are bit-for-bit reproducible regardless of the parallel
/// execution order. Noise is drawn only over the fit window (the extender
/// never reads earlier samples).
pub fn mc_moments(cfg: &McConfig) -> Result<McReport> {
    if cfg.realizations < 2 {
        return Err(invalid!("need at least 2 realizations"));
    }
    if cfg.horizons.is_empty() {
        return Err(invalid!("need at least one horizon"));
    }
    let sweep_points: Vec<(f64, usize, f64)> = match &cfg.sweep {
        Sweep::Sigma(sigmas) => {
            if sigmas.is_empty() {
                return Err(invalid!("empty sigma sweep"));
            }
            sigmas.iter().map(|s| (*s, cfg.k, *s)).collect()
        }
        Sweep::TrainSize(ks) => {
            if ks.is_empty() {
                return Err(invalid!("empty K sweep"));
            }
            ks.iter().map(|k| (*k as f64, *k, cfg.sigma)).collect()
        }
    };
    let lmax = *cfg.horizons.iter().max().expect("non-empty");
    let fs = cfg.signal.fs();

    let mut rows = Vec::new();
    for (sp, (sweep_value, k, sigma)) in sweep_points.iter().enumerate() {
        let m = cfg.m;
        let window_len = k + m;
        if window_len > cfg.n {
            return Err(invalid!("k+m = {window_len} exceeds n = {}", cfg.n));
        }
        let start = cfg.n - window_len;
        let z_window: Vec<f64> = (start..cfg.n).map(|i| cfg.signal.eval_at(i)).collect();
        let truth: Vec<f64> = cfg
            .horizons
            .iter()
            .map(|l| cfg.signal.eval_at(cfg.n - 1 + l))
            .collect();

        // One error vector per realization, indexed collection keeps the
        // aggregation order-independent.
        let results: Vec<Option<Vec<f64>>> = (0..cfg.realizations)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(cfg.base_seed, sp as u64, r as u64);
                let noise = gaussian_noise(window_len, *sigma, seed).expect("sigma validated");
                let samples: Vec<f64> =
                    z_window.iter().zip(&noise).map(|(a, b)| a + b).collect();
                let x = Signal::new(samples, fs).expect("finite by construction");
                match sig_ext(&x, m, *k, lmax, cfg.solver) {
                    Ok(ext) => Some(
                        cfg.horizons
                            .iter()
                            .zip(&truth)
                            .map(|(l, t)| ext.samples()[window_len - 1 + l] - t)
                            .collect(),
                    ),
                    Err(_) => None,
                }
            })
            .collect();

        let failures = results.iter().filter(|r| r.is_none()).count();
        let kept: Vec<&Vec<f64>> = results.iter().flatten().collect();
        for (hi, l) in cfg.horizons.iter().enumerate() {
            let count = kept.len();
            let (bias, variance) = if count >= 2 {
                let mean =
                    compensated_sum(kept.iter().map(|e| e[hi])) / count as f64;
                let var = compensated_sum(kept.iter().map(|e| {
                    let d = e[hi] - mean;
                    d * d
                })) / (count - 1) as f64;
                (mean, var)
            } else {
                (f64::NAN, f64::NAN)
            };
            rows.push(McRow {
                sweep_value: *sweep_value,
                horizon: *l,
                bias,
                variance,
                count,
                failures,
            });
        }
    }
    Ok(McReport { rows })
}

/// Integer cycle counts of commensurate components: each frequency must equal
/// an integer p (with 1 <= p < M/2, all distinct) times fs/M.
fn commensurate_cycles(
    components: &[HarmonicComponent],
    fs: f64,
    m: usize,
) -> Result<Vec<(f64, usize)>> {
    let mut out = Vec::with_capacity(components.len());
    for (j, c) in components.iter().enumerate() {
        let p_real = c.freq_hz * m as f64 / fs;
        let p = p_real.round();
        if (p_real - p).abs() > 1e-9 * p.max(1.0) {
            return Err(invalid!(
                "component {j}: frequency {} is not an integer number of cycles per {m} samples",
                c.freq_hz
            ));
        }
        let p = p as usize;
        if p == 0 || 2 * p >= m {
            return Err(invalid!(
                "component {j}: cycle count {p} must satisfy 1 <= p < M/2"
            ));
        }
        if out.iter().any(|(_, q)| *q == p) {
            return Err(invalid!("component {j}: duplicate cycle count {p}"));
        }
        out.push((c.amplitude, p));
    }
    Ok(out)
}

/// Closed form of the inverse expected Gram matrix for commensurate
/// harmonics in white noise of level `sigma`.
pub fn closed_form_s0_inv(
    components: &[HarmonicComponent],
    fs: f64,
    sigma: f64,
    m: usize,
) -> Result<DenseMatrix> {
    if !(sigma > 0.0) {
        return Err(invalid!("sigma must be positive, got {sigma}"));
    }
    let cycles = commensurate_cycles(components, fs, m)?;
    let mf = m as f64;
    let s2 = sigma * sigma;
    Ok(DenseMatrix::from_fn(m, m, |r, c| {
        let delta = if r == c { 1.0 } else { 0.0 };
        let mut acc = 0.0;
        for (omega, p) in &cycles {
            let damp = 1.0 / (1.0 + 4.0 * s2 / (mf * omega * omega));
            acc += damp
                * (2.0 * std::f64::consts::PI * *p as f64 * (r as f64 - c as f64) / mf).cos();
        }
        delta / s2 - 2.0 / (mf * s2) * acc
    }))
}

/// Closed form of the expected model matrix: the unit shift plus a cosine
/// last row damped by the noise level.
pub fn closed_form_a0(
    components: &[HarmonicComponent],
    fs: f64,
    sigma: f64,
    m: usize,
) -> Result<DenseMatrix> {
    if !(sigma > 0.0) {
        return Err(invalid!("sigma must be positive, got {sigma}"));
    }
    let cycles = commensurate_cycles(components, fs, m)?;
    let mf = m as f64;
    let s2 = sigma * sigma;
    Ok(DenseMatrix::from_fn(m, m, |r, c| {
        let shift = if r + 1 == c { 1.0 } else { 0.0 };
        if r + 1 == m {
            let mut acc = 0.0;
            for (omega, p) in &cycles {
                let damp = 1.0 / (1.0 + 4.0 * s2 / (mf * omega * omega));
                acc += damp * (2.0 * std::f64::consts::PI * *p as f64 * c as f64 / mf).cos();
            }
            shift + 2.0 / mf * acc
        } else {
            shift
        }
    }))
}

/// Expected lag-product matrix `S^(a)` built directly from its definition:
/// `sigma^2 delta_{r+a,c} + sum_j (omega_j^2/2) cos(2 pi f_j (r+a-c) / fs)`.
/// Serves as the independent oracle the closed forms are checked against.
pub fn explicit_s_matrix(
    components: &[HarmonicComponent],
    fs: f64,
    sigma: f64,
    m: usize,
    shift: usize,
) -> Result<DenseMatrix> {
    if shift > 1 {
        return Err(invalid!("shift must be 0 or 1"));
    }
    let s2 = sigma * sigma;
    let comps: Vec<(f64, f64)> = components
        .iter()
        .map(|c| (c.amplitude, c.freq_hz / fs))
        .collect();
    Ok(DenseMatrix::from_fn(m, m, |r, c| {
        let delta = if r + shift == c { 1.0 } else { 0.0 };
        let mut acc = 0.0;
        for (omega, f_rel) in &comps {
            let arg = 2.0 * std::f64::consts::PI * f_rel * (r as f64 + shift as f64 - c as f64);
            acc += omega * omega / 2.0 * arg.cos();
        }
        s2 * delta + acc
    }))
}

#[derive(Debug, Clone)]
pub struct ConvergenceConfig {
    pub components: Vec<HarmonicComponent>,
    pub fs: f64,
    pub m: usize,
    pub n: usize,
    pub sigma: f64,
    pub k_values: Vec<usize>,
    pub realizations: usize,
    pub base_seed: u64,
}

impl ConvergenceConfig {
    pub fn benchmark(realizations: usize, base_seed: u64) -> Self {
        ConvergenceConfig {
            components: two_tone_components(),
            fs: 1.0,
            m: 150,
            n: 10_000,
            sigma: 1e-2,
            k_values: vec![500, 1000, 2000, 4000],
            realizations,
            base_seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub k_values: Vec<usize>,
    /// Mean over realizations of `max |fitted alpha - expected alpha|`.
    pub deviations: Vec<f64>,
}

/// Measures how the fitted coefficients approach the closed-form expected
/// last row as the training size grows.
pub fn oracle_convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    let a0 = closed_form_a0(&cfg.components, cfg.fs, cfg.sigma, cfg.m)?;
    let alpha0 = a0.row(cfg.m - 1).to_vec();
    let mut deviations = Vec::with_capacity(cfg.k_values.len());
    for (ki, k) in cfg.k_values.iter().enumerate() {
        let window_len = k + cfg.m;
        if window_len > cfg.n {
            return Err(invalid!("k+m = {window_len} exceeds n = {}", cfg.n));
        }
        let start = cfg.n - window_len;
        let z_window: Vec<f64> = (start..cfg.n)
            .map(|i| eval_harmonics_at(&cfg.components, cfg.fs, i))
            .collect();
        let devs: Vec<f64> = (0..cfg.realizations)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(cfg.base_seed, ki as u64, r as u64);
                let noise = gaussian_noise(window_len, cfg.sigma, seed).expect("sigma validated");
                let samples: Vec<f64> =
                    z_window.iter().zip(&noise).map(|(a, b)| a + b).collect();
                let x = Signal::new(samples, cfg.fs).expect("finite");
                let lm = crate::extend::build_lag_matrices(&x, cfg.m, *k).expect("sized");
                let model =
                    crate::extend::fit_sigext(&lm, Solver::NormalEquations).expect("regularized");
                model
                    .alpha
                    .iter()
                    .zip(&alpha0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .collect();
        deviations.push(compensated_sum(devs.iter().copied()) / cfg.realizations as f64);
    }
    Ok(ConvergenceReport {
        k_values: cfg.k_values.clone(),
        deviations,
    })
}

/// One extension method entry of the benchmark table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchMethod {
    SigExt { m: usize },
    Symmetric,
    Dmd { m: usize, rank: usize },
}

impl BenchMethod {
    pub fn label(&self) -> String {
        match self {
            BenchMethod::SigExt { m } => format!("sigext(M={m})"),
            BenchMethod::Symmetric => "symmetric".to_string(),
            BenchMethod::Dmd { m, rank } => format!("dmd(M={m},rank={rank})"),
        }
    }

    fn extender(&self) -> ExtenderKind {
        match self {
            BenchMethod::SigExt { m } => ExtenderKind::SigExt {
                m: *m,
                k: default_k(*m),
                solver: Solver::NormalEquations,
            },
            BenchMethod::Symmetric => ExtenderKind::Symmetric,
            BenchMethod::Dmd { m, rank } => ExtenderKind::Dmd {
                m: *m,
                k: default_k(*m),
                rank: *rank,
            },
        }
    }
}

/// Configuration of the modulated-signal benchmark: forecast quality (MSE
/// over the held-out continuation) and boundary-effect index of the treated
/// STFT, per extension method.
#[derive(Debug, Clone)]
pub struct AhmBenchConfig {
    pub params: AhmParams,
    pub sigma: f64,
    /// Extension length; also the window half-length of the benchmark STFT.
    pub l: usize,
    pub realizations: usize,
    pub base_seed: u64,
    pub methods: Vec<BenchMethod>,
    pub n_fft: usize,
    pub hop: usize,
    /// Compute the transport index (dominates the run time when set).
    pub with_index: bool,
}

impl AhmBenchConfig {
    pub fn benchmark(realizations: usize, base_seed: u64) -> Self {
        AhmBenchConfig {
            params: AhmParams::benchmark(),
            sigma: 1e-2,
            l: 700,
            realizations,
            base_seed,
            methods: vec![
                BenchMethod::SigExt { m: 100 },
                BenchMethod::SigExt { m: 750 },
                BenchMethod::SigExt { m: 1500 },
                BenchMethod::Symmetric,
                BenchMethod::Dmd { m: 750, rank: 20 },
            ],
            n_fft: 2048,
            hop: 35,
            with_index: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub method: String,
    pub mean_mse: f64,
    pub sd_mse: f64,
    pub mean_d: f64,
    pub sd_d: f64,
    /// Mean wall-clock seconds per extension call.
    pub mean_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,mean_mse,sd_mse,mean_d_stft,sd_d_stft,seconds_per_extension\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}\n",
                r.method, r.mean_mse, r.sd_mse, r.mean_d, r.sd_d, r.mean_seconds
            ));
        }
        out
    }

    pub fn row(&self, label: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.method == label)
    }
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Runs the extension benchmark on the modulated two-component signal.
///
/// Every method sees the same noisy realizations. The index compares the
/// treated STFT against the restriction of the STFT of the ground-truth
/// extended signal, with the plain STFT as the reference denominator.
pub fn ahm_benchmark(cfg: &AhmBenchConfig) -> Result<BenchReport> {
    if cfg.realizations == 0 {
        return Err(invalid!("need at least one realization"));
    }
    let n = cfg.params.n_formula;
    let l = cfg.l;
    let z: Vec<f64> = (0..n + l).map(|i| eval_ahm_at(&cfg.params, i)).collect();
    let window = WindowSpec::gaussian(l, l as f64 / 3.0)?;
    let extenders: Vec<(String, ExtenderKind)> = cfg
        .methods
        .iter()
        .map(|m| (m.label(), m.extender()))
        .collect();

    struct PerRealization {
        mses: Vec<f64>,
        ds: Vec<f64>,
        secs: Vec<f64>,
    }

    let per_real: Vec<Result<PerRealization>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(cfg.base_seed, 0xA4B, r as u64);
            let noise = gaussian_noise(n + l, cfg.sigma, seed)?;
            let full: Vec<f64> = z.iter().zip(&noise).map(|(a, b)| a + b).collect();
            let x = Signal::new(full[..n].to_vec(), cfg.params.fs)?;
            let truth_ext = &full[n..];

            // Oracle and untreated reference transforms, shared by methods.
            let (f_plain, f_opt) = if cfg.with_index {
                let plain = stft(&x, &window, cfg.n_fft, cfg.hop)?;
                let x_true = Signal::new(full.clone(), cfg.params.fs)?;
                let opt = restrict(&stft(&x_true, &window, cfg.n_fft, cfg.hop)?, n)?;
                (Some(plain), Some(opt))
            } else {
                (None, None)
            };

            let mut out = PerRealization {
                mses: Vec::with_capacity(extenders.len()),
                ds: Vec::with_capacity(extenders.len()),
                secs: Vec::with_capacity(extenders.len()),
            };
            for (_, kind) in &extenders {
                let t0 = std::time::Instant::now();
                let (ext, _) = extend_with(kind, &x, l)?;
                out.secs.push(t0.elapsed().as_secs_f64());
                out.mses.push(mse_xp(&ext.samples()[n..], truth_ext)?);
                if let (Some(fp), Some(fo)) = (&f_plain, &f_opt) {
                    let treated = restrict(&stft(&ext, &window, cfg.n_fft, cfg.hop)?, n)?;
                    out.ds.push(perf_index_d(&treated, fp, fo)?);
                } else {
                    out.ds.push(f64::NAN);
                }
            }
            Ok(out)
        })
        .collect();

    let mut rows = Vec::with_capacity(extenders.len());
    for (mi, (label, _)) in extenders.iter().enumerate() {
        let mut mses = Vec::with_capacity(cfg.realizations);
        let mut ds = Vec::with_capacity(cfg.realizations);
        let mut secs = Vec::with_capacity(cfg.realizations);
        for pr in &per_real {
            let pr = pr.as_ref().map_err(|e| invalid!("realization failed: {e}"))?;
            mses.push(pr.mses[mi]);
            ds.push(pr.ds[mi]);
            secs.push(pr.secs[mi]);
        }
        let (mean_mse, sd_mse) = mean_sd(&mses);
        let (mean_d, sd_d) = if cfg.with_index {
            mean_sd(&ds)
        } else {
            (f64::NAN, f64::NAN)
        };
        let (mean_seconds, _) = mean_sd(&secs);
        rows.push(BenchRow {
            method: label.clone(),
            mean_mse,
            sd_mse,
            mean_d,
            sd_d,
            mean_seconds,
        });
    }
    Ok(BenchReport { rows })
}
