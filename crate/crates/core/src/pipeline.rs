//! The extend -> transform -> restrict pipeline, in batch and streaming form.
//!
//! Extending the signal by `L >= half_len` forecast samples pushes the
//! window-truncation artifacts past the measured interval; restricting the
//! transform of the extended signal back to the first N samples then yields a
//! boundary-free representation. The streaming form keeps a rolling sample
//! buffer and recomputes only the trailing columns whose windows overlap data
//! newer than the previous push, which reproduces the batch result exactly.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::extend::{extend_with, ExtenderKind};
use crate::numerics::ensure_finite;
use crate::signal::Signal;
use crate::tfr::{
    conceft, conceft_cols, n_cols_for, reassignment, rs_cols, sst, sst_cols, stft, stft_cols,
    SampleView, TfrKind, TfrMatrix, TfrValues,
};
use crate::window::WindowSpec;

/// Full configuration of one boundary-free transform.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub extender: ExtenderKind,
    pub tfr: TfrKind,
    pub window: WindowSpec,
    pub n_fft: usize,
    pub hop: usize,
    /// Extension length in samples; must cover the window half-support.
    pub ext_len: usize,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hop == 0 {
            return Err(invalid!("hop must be at least 1"));
        }
        if self.n_fft < self.window.len() {
            return Err(invalid!(
                "window of {} samples does not fit in an n_fft of {}",
                self.window.len(),
                self.n_fft
            ));
        }
        let l = self.effective_ext_len();
        if l > 0 && l < self.window.half_len() {
            return Err(invalid!(
                "extension of {l} samples does not cover the window half-support {}",
                self.window.half_len()
            ));
        }
        Ok(())
    }

    /// Extension length actually applied (zero when no extender is set).
    pub fn effective_ext_len(&self) -> usize {
        match self.extender {
            ExtenderKind::None => 0,
            _ => self.ext_len,
        }
    }
}

/// Applies the configured transform to a whole signal.
pub fn apply_tfr(
    kind: &TfrKind,
    x: &Signal,
    w: &WindowSpec,
    n_fft: usize,
    hop: usize,
) -> Result<TfrMatrix> {
    match kind {
        TfrKind::Stft => stft(x, w, n_fft, hop),
        TfrKind::Sst { gamma_rel } => sst(x, w, n_fft, hop, *gamma_rel),
        TfrKind::Rs { gamma_rel, causal } => reassignment(x, w, n_fft, hop, *gamma_rel, *causal),
        TfrKind::Conceft {
            tapers,
            projections,
            gamma_rel,
            seed,
        } => conceft(x, w.half_len(), *tapers, *projections, n_fft, hop, *gamma_rel, *seed),
    }
}

/// Keeps exactly the columns whose time index is below `n`; the frequency
/// axis is untouched.
pub fn restrict(tfr: &TfrMatrix, n: usize) -> Result<TfrMatrix> {
    let keep = tfr
        .time_axis()
        .iter()
        .take_while(|t| **t < n as f64)
        .count();
    let expected = n_cols_for(n, tfr.hop());
    if keep < expected {
        return Err(invalid!(
            "cannot restrict to {n} samples: transform spans only {} columns of hop {}",
            tfr.n_cols(),
            tfr.hop()
        ));
    }
    let f = tfr.n_freqs();
    let values = match tfr.values() {
        TfrValues::Complex(v) => TfrValues::Complex(v[..keep * f].to_vec()),
        TfrValues::Real(v) => TfrValues::Real(v[..keep * f].to_vec()),
    };
    Ok(TfrMatrix::from_parts(
        values,
        tfr.freq_axis().to_vec(),
        tfr.time_axis()[..keep].to_vec(),
        tfr.hop(),
    ))
}

/// Boundary-free transform of `x`: extend, transform, restrict. With no
/// extender (or a zero extension) this degrades to the plain transform.
pub fn bound_eff_red(x: &Signal, cfg: &PipelineConfig) -> Result<TfrMatrix> {
    cfg.validate()?;
    if matches!(cfg.extender, ExtenderKind::None) {
        return apply_tfr(&cfg.tfr, x, &cfg.window, cfg.n_fft, cfg.hop);
    }
    let (ext, _clamped) = extend_with(&cfg.extender, x, cfg.ext_len)?;
    let full = apply_tfr(&cfg.tfr, &ext, &cfg.window, cfg.n_fft, cfg.hop)?;
    restrict(&full, x.len())
}

/// One re-emitted column from a streaming update.
#[derive(Debug, Clone)]
pub struct ColumnDelta {
    pub index: usize,
    pub values: ColumnValues,
}

#[derive(Debug, Clone)]
pub enum ColumnValues {
    Complex(Vec<Complex64>),
    Real(Vec<f64>),
}

/// Wall-clock breakdown of one streaming update.
#[derive(Debug, Clone, Copy, Default)]
pub struct PushTimings {
    pub forecast_seconds: f64,
    pub transform_seconds: f64,
    /// Columns recomputed by the update.
    pub columns: usize,
}

/// Incremental pipeline state: a rolling sample buffer plus the current
/// boundary-free matrix. Size is independent of the stream length.
#[derive(Debug)]
pub struct StreamState {
    cfg: PipelineConfig,
    fs: f64,
    /// Trailing samples; `buf[0]` has absolute index `buf_start`.
    buf: Vec<f64>,
    buf_start: usize,
    /// Total samples seen.
    total: usize,
    tfr: TfrMatrix,
    last_timings: PushTimings,
}

/// Builds the state from an initial batch; the matrix equals
/// [`bound_eff_red`] of `x0`.
pub fn stream_init(x0: &Signal, cfg: PipelineConfig) -> Result<StreamState> {
    let tfr = bound_eff_red(x0, &cfg)?;
    let mut state = StreamState {
        cfg,
        fs: x0.fs(),
        buf: x0.samples().to_vec(),
        buf_start: 0,
        total: x0.len(),
        tfr,
        last_timings: PushTimings::default(),
    };
    state.trim();
    Ok(state)
}

impl StreamState {
    pub fn tfr(&self) -> &TfrMatrix {
        &self.tfr
    }

    pub fn samples_seen(&self) -> usize {
        self.total
    }

    pub fn buffer_len(&self) -> usize {
        self.buf.len()
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    /// Timing breakdown of the most recent [`push`](Self::push).
    pub fn last_timings(&self) -> PushTimings {
        self.last_timings
    }

    /// Minimum history the buffer must retain: enough for the extender to
    /// refit and for every recomputed column's window (reassignment needs the
    /// widest margin because energy crosses columns).
    pub fn required_history(&self) -> usize {
        let l = self.cfg.effective_ext_len();
        let ext = self.cfg.extender.required_history(l);
        let half = self.cfg.window.half_len();
        let tfr = match self.cfg.tfr {
            TfrKind::Rs { .. } => 4 * half + 2 * self.cfg.hop,
            _ => 2 * half,
        };
        ext.max(tfr).max(1)
    }

    fn trim(&mut self) {
        let hist = self.required_history();
        if self.buf.len() > hist {
            let drop = self.buf.len() - hist;
            self.buf.drain(..drop);
            self.buf_start += drop;
        }
    }

    /// Appends new samples and recomputes the trailing columns whose windows
    /// overlap them. Returns the re-emitted columns; all earlier columns are
    /// untouched and the resulting matrix equals a batch recomputation.
    pub fn push(&mut self, new_samples: &[f64]) -> Result<Vec<ColumnDelta>> {
        if new_samples.is_empty() {
            return Ok(Vec::new());
        }
        ensure_finite(new_samples, "sample")?;
        let n_old = self.total;
        self.buf.extend_from_slice(new_samples);
        self.total += new_samples.len();
        let n_new = self.total;

        let hop = self.cfg.hop;
        let half = self.cfg.window.half_len();
        let n_fft = self.cfg.n_fft;
        let total_cols = n_cols_for(n_new, hop);
        // First column whose window reaches at or past the old boundary.
        let first_stale = if n_old > half {
            (n_old - half).div_ceil(hop)
        } else {
            0
        };

        // Extend the buffered tail; the extenders only read their trailing
        // history, so this matches extending the full signal.
        let l = self.cfg.effective_ext_len();
        let buf_signal = Signal::new(self.buf.clone(), self.fs)?;
        let t_forecast = std::time::Instant::now();
        let (ext, _clamped) = extend_with(&self.cfg.extender, &buf_signal, l)?;
        let forecast_seconds = t_forecast.elapsed().as_secs_f64();
        let view = SampleView::new(ext.samples(), self.buf_start);

        let t_transform = std::time::Instant::now();
        let deltas = match self.cfg.tfr {
            TfrKind::Stft => {
                let cols = stft_cols(&view, first_stale..total_cols, &self.cfg.window, n_fft, hop);
                self.splice_complex(first_stale, total_cols, cols)
            }
            TfrKind::Sst { gamma_rel } => {
                let g: Vec<Complex64> = self.cfg.window.g().iter().map(|v| (*v).into()).collect();
                let dg: Vec<Complex64> = self.cfg.window.dg().iter().map(|v| (*v).into()).collect();
                let (cols, _) = sst_cols(
                    &view,
                    first_stale..total_cols,
                    &g,
                    &dg,
                    half,
                    n_fft,
                    hop,
                    self.fs,
                    gamma_rel,
                );
                self.splice_complex(first_stale, total_cols, cols)
            }
            TfrKind::Conceft {
                tapers,
                projections,
                gamma_rel,
                seed,
            } => {
                let cols = conceft_cols(
                    &view,
                    first_stale..total_cols,
                    half,
                    tapers,
                    projections,
                    n_fft,
                    hop,
                    self.fs,
                    gamma_rel,
                    seed,
                )?;
                self.splice_real(first_stale, total_cols, cols)
            }
            TfrKind::Rs { gamma_rel, causal } => {
                // Energy travels at most half_len samples between columns, so
                // columns this far before the stale range can still change,
                // and their sources reach another column-span back.
                let span = half.div_ceil(hop);
                let emit_from = first_stale.saturating_sub(span);
                let input_from = emit_from.saturating_sub(span);
                let input_to = n_cols_for(n_new + l, hop);
                let (cols, _) = rs_cols(
                    &view,
                    input_from..input_to,
                    emit_from,
                    total_cols,
                    &self.cfg.window,
                    n_fft,
                    hop,
                    self.fs,
                    gamma_rel,
                    causal,
                );
                self.splice_real(emit_from, total_cols, cols)
            }
        };
        self.last_timings = PushTimings {
            forecast_seconds,
            transform_seconds: t_transform.elapsed().as_secs_f64(),
            columns: deltas.len(),
        };
        self.trim();
        Ok(deltas)
    }

    fn splice_complex(
        &mut self,
        from: usize,
        total_cols: usize,
        cols: Vec<Vec<Complex64>>,
    ) -> Vec<ColumnDelta> {
        let f = self.tfr.n_freqs();
        let TfrValues::Complex(old) = self.tfr.values() else {
            unreachable!("complex transform produced a real matrix");
        };
        let mut values = old[..from * f].to_vec();
        let mut deltas = Vec::with_capacity(cols.len());
        for (offset, col) in cols.into_iter().enumerate() {
            values.extend_from_slice(&col);
            deltas.push(ColumnDelta {
                index: from + offset,
                values: ColumnValues::Complex(col),
            });
        }
        self.tfr = TfrMatrix::from_parts(
            TfrValues::Complex(values),
            self.tfr.freq_axis().to_vec(),
            (0..total_cols).map(|c| (c * self.cfg.hop) as f64).collect(),
            self.cfg.hop,
        );
        deltas
    }

    fn splice_real(&mut self, from: usize, total_cols: usize, cols: Vec<Vec<f64>>) -> Vec<ColumnDelta> {
        let f = self.tfr.n_freqs();
        let TfrValues::Real(old) = self.tfr.values() else {
            unreachable!("real transform produced a complex matrix");
        };
        let mut values = old[..from * f].to_vec();
        let mut deltas = Vec::with_capacity(cols.len());
        for (offset, col) in cols.into_iter().enumerate() {
            values.extend_from_slice(&col);
            deltas.push(ColumnDelta {
                index: from + offset,
                values: ColumnValues::Real(col),
            });
        }
        self.tfr = TfrMatrix::from_parts(
            TfrValues::Real(values),
            self.tfr.freq_axis().to_vec(),
            (0..total_cols).map(|c| (c * self.cfg.hop) as f64).collect(),
            self.cfg.hop,
        );
        deltas
    }
}

/// Real-time feasibility of a hop size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingBudget {
    /// Whether the queried hop satisfies the update-time inequality.
    pub feasible: bool,
    /// Smallest hop that satisfies it.
    pub min_h: usize,
}

/// Checks `t_forecast + ceil(l/h) * t_col < h / fs` for the given hop and
/// scans for the smallest hop satisfying it.
pub fn timing_budget(t_forecast: f64, t_col: f64, l: usize, h: usize, fs: f64) -> TimingBudget {
    let holds = |hh: usize| -> bool {
        let cols = (l as f64 / hh as f64).ceil();
        t_forecast + cols * t_col < hh as f64 / fs
    };
    // Past this bound the left side (bounded by t_forecast + l*t_col) always
    // loses to h/fs, so the scan terminates.
    let bound = (fs * (t_forecast + t_col * l as f64)).ceil() as usize + 1;
    let mut min_h = bound;
    for hh in 1..=bound {
        if holds(hh) {
            min_h = hh;
            break;
        }
    }
    TimingBudget {
        feasible: h >= 1 && holds(h),
        min_h,
    }
}
