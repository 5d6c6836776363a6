//! Windowed time-frequency transforms: STFT, synchrosqueezing (SST),
//! reassignment (RS) and the multitaper ConceFT.
//!
//! All transforms share one column layout: column c is centred at sample c*H,
//! covers samples [c*H - half_len, c*H + half_len] (zero-padded outside the
//! signal), and keeps the nonnegative-frequency bins of an n_fft-point DFT.
//! Columns are computed over an absolute-indexed sample view so the streaming
//! pipeline can recompute a trailing column range bit-identically to a batch
//! run.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::numerics::{derive_seed, gaussian_noise};
use crate::signal::Signal;
use crate::window::WindowSpec;

/// Storage of a time-frequency grid; complex for STFT/SST, nonnegative real
/// for RS energies and ConceFT magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum TfrValues {
    Complex(Vec<Complex64>),
    Real(Vec<f64>),
}

/// An F x T time-frequency grid, stored column-major (one spectrum per time
/// column), with its axes.
#[derive(Debug, Clone, PartialEq)]
pub struct TfrMatrix {
    values: TfrValues,
    /// Bin centres in Hz, length F = n_fft/2 + 1.
    freq_axis: Vec<f64>,
    /// Column times in samples, length T.
    time_axis: Vec<f64>,
    hop: usize,
}

impl TfrMatrix {
    /// Builds a matrix from column-major values and its axes.
    pub fn new(
        values: TfrValues,
        freq_axis: Vec<f64>,
        time_axis: Vec<f64>,
        hop: usize,
    ) -> Result<Self> {
        let cells = freq_axis.len() * time_axis.len();
        let len = match &values {
            TfrValues::Complex(v) => v.len(),
            TfrValues::Real(v) => v.len(),
        };
        if len != cells {
            return Err(invalid!(
                "{len} values do not fill a {} x {} grid",
                freq_axis.len(),
                time_axis.len()
            ));
        }
        for axis in [&freq_axis, &time_axis] {
            if axis.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(invalid!("axes must be strictly increasing"));
            }
        }
        Ok(TfrMatrix::from_parts(values, freq_axis, time_axis, hop))
    }

    pub(crate) fn from_parts(
        values: TfrValues,
        freq_axis: Vec<f64>,
        time_axis: Vec<f64>,
        hop: usize,
    ) -> Self {
        TfrMatrix {
            values,
            freq_axis,
            time_axis,
            hop,
        }
    }

    pub fn values(&self) -> &TfrValues {
        &self.values
    }

    pub fn freq_axis(&self) -> &[f64] {
        &self.freq_axis
    }

    pub fn time_axis(&self) -> &[f64] {
        &self.time_axis
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn n_freqs(&self) -> usize {
        self.freq_axis.len()
    }

    pub fn n_cols(&self) -> usize {
        self.time_axis.len()
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.values, TfrValues::Complex(_))
    }

    /// Magnitude at (freq bin, time column).
    pub fn magnitude_at(&self, f: usize, t: usize) -> f64 {
        let idx = t * self.n_freqs() + f;
        match &self.values {
            TfrValues::Complex(v) => v[idx].norm(),
            TfrValues::Real(v) => v[idx].abs(),
        }
    }

    /// Magnitudes of one time column.
    pub fn col_magnitudes(&self, t: usize) -> Vec<f64> {
        (0..self.n_freqs()).map(|f| self.magnitude_at(f, t)).collect()
    }

    pub fn complex_col(&self, t: usize) -> Option<&[Complex64]> {
        let f = self.n_freqs();
        match &self.values {
            TfrValues::Complex(v) => Some(&v[t * f..(t + 1) * f]),
            TfrValues::Real(_) => None,
        }
    }

    pub fn real_col(&self, t: usize) -> Option<&[f64]> {
        let f = self.n_freqs();
        match &self.values {
            TfrValues::Real(v) => Some(&v[t * f..(t + 1) * f]),
            TfrValues::Complex(_) => None,
        }
    }
}

/// Tagged choice of transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TfrKind {
    Stft,
    Sst {
        gamma_rel: f64,
    },
    Rs {
        gamma_rel: f64,
        causal: bool,
    },
    Conceft {
        tapers: usize,
        projections: usize,
        gamma_rel: f64,
        seed: u64,
    },
}

/// Default relative threshold below which STFT mass is not reassigned.
pub const GAMMA_REL_DEFAULT: f64 = 1e-4;
/// Default number of Hermite tapers for ConceFT.
pub const CONCEFT_TAPERS_DEFAULT: usize = 2;
/// Default number of random projections for ConceFT.
pub const CONCEFT_PROJECTIONS_DEFAULT: usize = 30;

/// A window of samples with an absolute start index; reads outside the window
/// are zero. Batch transforms use the whole signal at offset zero, streaming
/// recomputation uses a trailing buffer at its absolute position.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SampleView<'a> {
    data: &'a [f64],
    start: usize,
}

impl<'a> SampleView<'a> {
    pub(crate) fn new(data: &'a [f64], start: usize) -> Self {
        SampleView { data, start }
    }

    #[inline]
    fn at(&self, idx: i64) -> f64 {
        if idx < self.start as i64 {
            return 0.0;
        }
        let rel = (idx - self.start as i64) as usize;
        if rel < self.data.len() {
            self.data[rel]
        } else {
            0.0
        }
    }
}

fn validate_grid(w: &WindowSpec, n_fft: usize, hop: usize) -> Result<()> {
    if hop == 0 {
        return Err(invalid!("hop must be at least 1"));
    }
    if n_fft < w.len() {
        return Err(invalid!(
            "window of {} samples does not fit in an n_fft of {}",
            w.len(),
            n_fft
        ));
    }
    Ok(())
}

fn validate_gamma(gamma_rel: f64) -> Result<()> {
    if !(gamma_rel > 0.0 && gamma_rel < 1.0) {
        return Err(invalid!("gamma_rel must lie in (0,1), got {gamma_rel}"));
    }
    Ok(())
}

pub(crate) fn n_cols_for(len: usize, hop: usize) -> usize {
    len.div_ceil(hop)
}

fn freq_axis_for(n_fft: usize, fs: f64) -> Vec<f64> {
    (0..=n_fft / 2).map(|f| f as f64 * fs / n_fft as f64).collect()
}

fn time_axis_for(cols: usize, hop: usize) -> Vec<f64> {
    (0..cols).map(|c| (c * hop) as f64).collect()
}

/// Shared per-transform state: the FFT plan and the window grid geometry.
struct ColumnEngine {
    fft: Arc<dyn Fft<f64>>,
    n_fft: usize,
    half: usize,
    hop: usize,
}

impl ColumnEngine {
    fn new(half: usize, n_fft: usize, hop: usize) -> Self {
        let mut planner = FftPlanner::new();
        ColumnEngine {
            fft: planner.plan_fft_forward(n_fft),
            n_fft,
            half,
            hop,
        }
    }

    /// One windowed spectrum: `sum_m x[cH+m] win[m] exp(-2 pi i nu m / n_fft)`
    /// for nu in 0..=n_fft/2, with the window index m in [-half, half] folded
    /// into the FFT buffer modulo n_fft.
    fn spectrum(&self, view: &SampleView<'_>, col: usize, win: &[Complex64]) -> Vec<Complex64> {
        let centre = (col * self.hop) as i64;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n_fft];
        let half = self.half as i64;
        for (w_idx, wv) in win.iter().enumerate() {
            let m = w_idx as i64 - half;
            let x = view.at(centre + m);
            if x != 0.0 {
                let slot = m.rem_euclid(self.n_fft as i64) as usize;
                buf[slot] += wv * x;
            }
        }
        self.fft.process(&mut buf);
        buf.truncate(self.n_fft / 2 + 1);
        buf
    }
}

fn to_complex(win: &[f64]) -> Vec<Complex64> {
    win.iter().map(|v| Complex64::new(*v, 0.0)).collect()
}

/// STFT columns over an absolute column range.
pub(crate) fn stft_cols(
    view: &SampleView<'_>,
    cols: std::ops::Range<usize>,
    w: &WindowSpec,
    n_fft: usize,
    hop: usize,
) -> Vec<Vec<Complex64>> {
    let engine = ColumnEngine::new(w.half_len(), n_fft, hop);
    let g = to_complex(w.g());
    cols.map(|c| engine.spectrum(view, c, &g)).collect()
}

/// Short-time Fourier transform.
pub fn stft(x: &Signal, w: &WindowSpec, n_fft: usize, hop: usize) -> Result<TfrMatrix> {
    validate_grid(w, n_fft, hop)?;
    let cols = n_cols_for(x.len(), hop);
    let view = SampleView::new(x.samples(), 0);
    let spectra = stft_cols(&view, 0..cols, w, n_fft, hop);
    let mut values = Vec::with_capacity(spectra.len() * (n_fft / 2 + 1));
    for col in spectra {
        values.extend(col);
    }
    Ok(TfrMatrix::from_parts(
        TfrValues::Complex(values),
        freq_axis_for(n_fft, x.fs()),
        time_axis_for(cols, hop),
        hop,
    ))
}

/// Bookkeeping counters from one synchrosqueezing run.
#[derive(Debug, Clone)]
pub struct SstStats {
    /// Per column: complex sum of the STFT values that were reassigned.
    pub kept_col_sums: Vec<Complex64>,
    /// Number of over-threshold bins whose frequency estimate fell off the grid.
    pub dropped_bins: u64,
}

/// SST columns with explicit (possibly complex) window/derivative tables.
#[allow(clippy::too_many_arguments)]
pub(crate) fn sst_cols(
    view: &SampleView<'_>,
    cols: std::ops::Range<usize>,
    g: &[Complex64],
    dg: &[Complex64],
    half: usize,
    n_fft: usize,
    hop: usize,
    fs: f64,
    gamma_rel: f64,
) -> (Vec<Vec<Complex64>>, SstStats) {
    let engine = ColumnEngine::new(half, n_fft, hop);
    let n_freqs = n_fft / 2 + 1;
    let df = fs / n_fft as f64;
    let mut out = Vec::with_capacity(cols.len());
    let mut kept = Vec::with_capacity(cols.len());
    let mut dropped = 0u64;
    for c in cols {
        let vg = engine.spectrum(view, c, g);
        let vdg = engine.spectrum(view, c, dg);
        let peak = vg.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let threshold = gamma_rel * peak;
        let mut col = vec![Complex64::new(0.0, 0.0); n_freqs];
        let mut col_sum = Complex64::new(0.0, 0.0);
        for nu in 0..n_freqs {
            let v = vg[nu];
            if v.norm() <= threshold {
                continue;
            }
            let omega = nu as f64 * df - fs / (2.0 * std::f64::consts::PI) * (vdg[nu] / v).im;
            let target = (omega / df).round();
            if target >= 0.0 && target < n_freqs as f64 {
                col[target as usize] += v;
                col_sum += v;
            } else {
                dropped += 1;
            }
        }
        kept.push(col_sum);
        out.push(col);
    }
    (
        out,
        SstStats {
            kept_col_sums: kept,
            dropped_bins: dropped,
        },
    )
}

/// Synchrosqueezing transform: STFT mass moved along the estimated
/// instantaneous frequency, per column.
///
/// Requires a gaussian window so the analytic derivative is available.
pub fn sst(x: &Signal, w: &WindowSpec, n_fft: usize, hop: usize, gamma_rel: f64) -> Result<TfrMatrix> {
    Ok(sst_detailed(x, w, n_fft, hop, gamma_rel)?.0)
}

pub fn sst_detailed(
    x: &Signal,
    w: &WindowSpec,
    n_fft: usize,
    hop: usize,
    gamma_rel: f64,
) -> Result<(TfrMatrix, SstStats)> {
    validate_grid(w, n_fft, hop)?;
    validate_gamma(gamma_rel)?;
    if !w.is_gaussian() {
        return Err(invalid!("synchrosqueezing needs a gaussian window"));
    }
    let cols = n_cols_for(x.len(), hop);
    let view = SampleView::new(x.samples(), 0);
    let (spectra, stats) = sst_cols(
        &view,
        0..cols,
        &to_complex(w.g()),
        &to_complex(w.dg()),
        w.half_len(),
        n_fft,
        hop,
        x.fs(),
        gamma_rel,
    );
    let mut values = Vec::with_capacity(spectra.len() * (n_fft / 2 + 1));
    for col in spectra {
        values.extend(col);
    }
    Ok((
        TfrMatrix::from_parts(
            TfrValues::Complex(values),
            freq_axis_for(n_fft, x.fs()),
            time_axis_for(cols, hop),
            hop,
        ),
        stats,
    ))
}

/// Bookkeeping counters from one reassignment run.
#[derive(Debug, Clone, Copy, Default)]
pub struct RsStats {
    /// Over-threshold energy placed on the grid.
    pub accumulated: f64,
    /// Over-threshold energy whose target fell off the grid or outside the
    /// window support.
    pub dropped: f64,
    /// Energy whose time estimate pointed into the future and was clamped to
    /// the current column (causal mode only).
    pub clamped: f64,
}

/// Reassignment over an input column range, emitting output columns
/// `emit_from..total_cols`.
///
/// Time reassignment moves energy at most `half_len` samples from its source
/// column (estimates beyond the window support are artifacts of near-zero
/// denominators and are dropped and counted), so an output column only
/// depends on input columns within `ceil(half_len/hop)` of it. The streaming
/// update relies on that locality.
#[allow(clippy::too_many_arguments)]
pub(crate) fn rs_cols(
    view: &SampleView<'_>,
    input_cols: std::ops::Range<usize>,
    emit_from: usize,
    total_cols: usize,
    w: &WindowSpec,
    n_fft: usize,
    hop: usize,
    fs: f64,
    gamma_rel: f64,
    causal: bool,
) -> (Vec<Vec<f64>>, RsStats) {
    let engine = ColumnEngine::new(w.half_len(), n_fft, hop);
    let g = to_complex(w.g());
    let dg = to_complex(w.dg());
    let tg = to_complex(w.tg());
    let n_freqs = n_fft / 2 + 1;
    let df = fs / n_fft as f64;
    let half = w.half_len() as f64;
    let mut out = vec![vec![0.0; n_freqs]; total_cols.saturating_sub(emit_from)];
    let mut stats = RsStats::default();
    for c in input_cols {
        let vg = engine.spectrum(view, c, &g);
        let vdg = engine.spectrum(view, c, &dg);
        let vtg = engine.spectrum(view, c, &tg);
        let peak = vg.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let threshold = gamma_rel * peak;
        let centre = (c * hop) as f64;
        for nu in 0..n_freqs {
            let v = vg[nu];
            if v.norm() <= threshold {
                continue;
            }
            let energy = v.norm_sqr();
            let omega = nu as f64 * df - fs / (2.0 * std::f64::consts::PI) * (vdg[nu] / v).im;
            let f_target = (omega / df).round();
            let mut t_hat = centre + (vtg[nu] / v).re;
            if causal && t_hat > centre {
                stats.clamped += energy;
                t_hat = centre;
            }
            let t_target = (t_hat / hop as f64).round();
            let in_freq = f_target >= 0.0 && f_target < n_freqs as f64;
            let in_time = (t_hat - centre).abs() <= half
                && t_target >= 0.0
                && t_target < total_cols as f64;
            if in_freq && in_time {
                let tc = t_target as usize;
                if tc >= emit_from {
                    out[tc - emit_from][f_target as usize] += energy;
                }
                // Targets below `emit_from` belong to columns the caller
                // already holds; they are unchanged by construction.
                stats.accumulated += energy;
            } else {
                stats.dropped += energy;
            }
        }
    }
    (out, stats)
}

/// Reassignment: spectrogram energy moved along both the time and frequency
/// estimates. With `causal` set, no energy is sent forward in time.
pub fn reassignment(
    x: &Signal,
    w: &WindowSpec,
    n_fft: usize,
    hop: usize,
    gamma_rel: f64,
    causal: bool,
) -> Result<TfrMatrix> {
    Ok(reassignment_detailed(x, w, n_fft, hop, gamma_rel, causal)?.0)
}

pub fn reassignment_detailed(
    x: &Signal,
    w: &WindowSpec,
    n_fft: usize,
    hop: usize,
    gamma_rel: f64,
    causal: bool,
) -> Result<(TfrMatrix, RsStats)> {
    validate_grid(w, n_fft, hop)?;
    validate_gamma(gamma_rel)?;
    if !w.is_gaussian() {
        return Err(invalid!("reassignment needs a gaussian window"));
    }
    let cols = n_cols_for(x.len(), hop);
    let view = SampleView::new(x.samples(), 0);
    let (spectra, stats) = rs_cols(&view, 0..cols, 0, cols, w, n_fft, hop, x.fs(), gamma_rel, causal);
    let mut values = Vec::with_capacity(spectra.len() * (n_fft / 2 + 1));
    for col in spectra {
        values.extend(col);
    }
    Ok((
        TfrMatrix::from_parts(
            TfrValues::Real(values),
            freq_axis_for(n_fft, x.fs()),
            time_axis_for(cols, hop),
            hop,
        ),
        stats,
    ))
}

/// The `projections` random unit vectors in C^tapers used by one ConceFT run;
/// deterministic in the seed.
fn conceft_projections(tapers: usize, projections: usize, seed: u64) -> Vec<Vec<Complex64>> {
    (0..projections)
        .map(|r| {
            let draws = gaussian_noise(2 * tapers, 1.0, derive_seed(seed, 0xC0CE, r as u64))
                .expect("unit sigma is valid");
            let mut u: Vec<Complex64> = (0..tapers)
                .map(|j| Complex64::new(draws[2 * j], draws[2 * j + 1]))
                .collect();
            let norm = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in &mut u {
                    *v /= norm;
                }
            } else {
                u[0] = Complex64::new(1.0, 0.0);
            }
            u
        })
        .collect()
}

/// ConceFT columns over an absolute column range.
#[allow(clippy::too_many_arguments)]
pub(crate) fn conceft_cols(
    view: &SampleView<'_>,
    cols: std::ops::Range<usize>,
    half: usize,
    tapers: usize,
    projections: usize,
    n_fft: usize,
    hop: usize,
    fs: f64,
    gamma_rel: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let family = crate::window::hermite_family(half, tapers)?;
    let n_freqs = n_fft / 2 + 1;
    let len = 2 * half + 1;
    let mut acc = vec![vec![0.0; n_freqs]; cols.len()];
    for u in conceft_projections(tapers, projections, seed) {
        let mut g = vec![Complex64::new(0.0, 0.0); len];
        let mut dg = vec![Complex64::new(0.0, 0.0); len];
        for (j, uj) in u.iter().enumerate() {
            let (hj, dhj) = &family[j];
            for i in 0..len {
                g[i] += uj * hj[i];
                dg[i] += uj * dhj[i];
            }
        }
        let (spectra, _) = sst_cols(view, cols.clone(), &g, &dg, half, n_fft, hop, fs, gamma_rel);
        for (a, col) in acc.iter_mut().zip(&spectra) {
            for (av, cv) in a.iter_mut().zip(col) {
                *av += cv.norm();
            }
        }
    }
    let scale = 1.0 / projections as f64;
    for col in &mut acc {
        for v in col {
            *v *= scale;
        }
    }
    Ok(acc)
}

/// ConceFT: the average of SST magnitudes over random complex combinations of
/// orthonormal Hermite windows.
#[allow(clippy::too_many_arguments)]
pub fn conceft(
    x: &Signal,
    half_len: usize,
    tapers: usize,
    projections: usize,
    n_fft: usize,
    hop: usize,
    gamma_rel: f64,
    seed: u64,
) -> Result<TfrMatrix> {
    if tapers == 0 {
        return Err(invalid!("ConceFT needs at least one taper"));
    }
    if projections == 0 {
        return Err(invalid!("ConceFT needs at least one projection"));
    }
    if hop == 0 {
        return Err(invalid!("hop must be at least 1"));
    }
    if n_fft < 2 * half_len + 1 {
        return Err(invalid!(
            "window of {} samples does not fit in an n_fft of {}",
            2 * half_len + 1,
            n_fft
        ));
    }
    validate_gamma(gamma_rel)?;
    let cols = n_cols_for(x.len(), hop);
    let view = SampleView::new(x.samples(), 0);
    let spectra = conceft_cols(
        &view,
        0..cols,
        half_len,
        tapers,
        projections,
        n_fft,
        hop,
        x.fs(),
        gamma_rel,
        seed,
    )?;
    let mut values = Vec::with_capacity(spectra.len() * (n_fft / 2 + 1));
    for col in spectra {
        values.extend(col);
    }
    Ok(TfrMatrix::from_parts(
        TfrValues::Real(values),
        freq_axis_for(n_fft, x.fs()),
        time_axis_for(cols, hop),
        hop,
    ))
}
