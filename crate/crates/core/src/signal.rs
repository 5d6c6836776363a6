//! Uniformly sampled signals and the synthetic generators used by the
//! benchmark harness.

use crate::error::{invalid, Result};
use crate::numerics::{ensure_finite, gaussian_noise};

/// A uniformly sampled real signal with its sampling rate in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs > 0.0) || !fs.is_finite() {
            return Err(invalid!("sampling rate must be positive and finite, got {fs}"));
        }
        ensure_finite(&samples, "sample")?;
        Ok(Signal { samples, fs })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Consumes the signal, returning its sample buffer.
    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// One fixed sinusoidal component: `amplitude * cos(2*pi*freq_hz*n/fs + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicComponent {
    pub amplitude: f64,
    pub freq_hz: f64,
    pub phase: f64,
}

impl HarmonicComponent {
    pub fn new(amplitude: f64, freq_hz: f64, phase: f64) -> Self {
        HarmonicComponent {
            amplitude,
            freq_hz,
            phase,
        }
    }
}

fn validate_components(components: &[HarmonicComponent], fs: f64) -> Result<()> {
    for (j, c) in components.iter().enumerate() {
        if !(c.amplitude > 0.0) || !c.amplitude.is_finite() {
            return Err(invalid!("component {j}: amplitude must be positive, got {}", c.amplitude));
        }
        if !c.freq_hz.is_finite() || c.freq_hz < 0.0 || c.freq_hz >= fs / 2.0 {
            return Err(invalid!(
                "component {j}: frequency {} Hz is aliased for fs = {} Hz",
                c.freq_hz,
                fs
            ));
        }
        if !c.phase.is_finite() {
            return Err(invalid!("component {j}: phase must be finite"));
        }
    }
    Ok(())
}

/// Evaluates the harmonic sum at an arbitrary sample index (which may lie past
/// the generated range; the model is defined for all n).
pub fn eval_harmonics_at(components: &[HarmonicComponent], fs: f64, n: usize) -> f64 {
    let t = n as f64 / fs;
    components
        .iter()
        .map(|c| c.amplitude * (2.0 * std::f64::consts::PI * c.freq_hz * t + c.phase).cos())
        .sum()
}

/// Sum of fixed sinusoids: `z[n] = sum_j amp_j cos(2*pi*f_j*n/fs + phase_j)`.
pub fn sum_of_sines(components: &[HarmonicComponent], n: usize, fs: f64) -> Result<Signal> {
    if !(fs > 0.0) || !fs.is_finite() {
        return Err(invalid!("sampling rate must be positive, got {fs}"));
    }
    validate_components(components, fs)?;
    let samples = (0..n).map(|i| eval_harmonics_at(components, fs, i)).collect();
    Signal::new(samples, fs)
}

/// Parameters of the two-component amplitude/frequency-modulated test signal.
///
/// The sample at index n (with `n_formula` the nominal length N) is
///   x[n] = cos(2*pi*phi1[n]) + R[n] * cos(2*pi*phi2[n])
///   R[n]    = amp_base + amp_mod * cos(4*pi*n/N)
///   phi1[n] = (p1/p_total) * (n + (phase_mod/2*pi) * cos(2*pi*n/N))
///   phi2[n] = p2*n/p_total + (chirp/(2*N*fs)) * n^2
#[derive(Debug, Clone, Copy)]
pub struct AhmParams {
    /// Nominal length N entering the modulation envelopes.
    pub n_formula: usize,
    /// Samples per base cycle P.
    pub p_total: usize,
    pub p1: usize,
    pub p2: usize,
    pub fs: f64,
    pub amp_base: f64,
    pub amp_mod: f64,
    pub phase_mod: f64,
    pub chirp: f64,
}

impl AhmParams {
    pub fn new(n: usize, p_total: usize, p1: usize, p2: usize, fs: f64) -> Self {
        AhmParams {
            n_formula: n,
            p_total,
            p1,
            p2,
            fs,
            amp_base: 1.4,
            amp_mod: 0.2,
            phase_mod: 0.01,
            chirp: 20.0,
        }
    }

    /// The benchmark configuration: N = 10^4, P = 750, p1 = 10, p2 = 23.
    ///
    /// The sampling rate follows from the benchmark's 0.1 s extension being
    /// 700 samples, i.e. fs = 7000 Hz.
    pub fn benchmark() -> Self {
        AhmParams::new(10_000, 750, 10, 23, 7000.0)
    }

    fn validate(&self) -> Result<()> {
        if self.n_formula == 0 || self.p_total == 0 || self.p1 == 0 || self.p2 == 0 {
            return Err(invalid!("AHM parameters must be positive"));
        }
        if !(self.fs > 0.0) || !self.fs.is_finite() {
            return Err(invalid!("sampling rate must be positive, got {}", self.fs));
        }
        Ok(())
    }
}

/// Evaluates the modulated two-component model at one sample index.
pub fn eval_ahm_at(params: &AhmParams, n: usize) -> f64 {
    let nf = params.n_formula as f64;
    let p = params.p_total as f64;
    let t = n as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let envelope = params.amp_base + params.amp_mod * (2.0 * two_pi * t / nf).cos();
    let phi1 = params.p1 as f64 / p * (t + params.phase_mod / two_pi * (two_pi * t / nf).cos());
    let phi2 = params.p2 as f64 * t / p + params.chirp / (2.0 * nf * params.fs) * t * t;
    (two_pi * phi1).cos() + envelope * (two_pi * phi2).cos()
}

/// Generates `total_len` samples of the modulated model; `total_len` may
/// exceed the nominal length to produce ground-truth continuations.
pub fn ahm_extended(params: &AhmParams, total_len: usize) -> Result<Signal> {
    params.validate()?;
    let samples = (0..total_len).map(|i| eval_ahm_at(params, i)).collect();
    Signal::new(samples, params.fs)
}

/// The modulated two-component test signal over its nominal length.
pub fn ahm_signal(n: usize, p_total: usize, p1: usize, p2: usize, fs: f64) -> Result<Signal> {
    let params = AhmParams::new(n, p_total, p1, p2, fs);
    ahm_extended(&params, n)
}

/// `z + sigma * w` with `w` a unit-variance white Gaussian noise drawn from
/// the seeded generator. The sampling rate is preserved.
pub fn add_noise(z: &Signal, sigma: f64, seed: u64) -> Result<Signal> {
    let noise = gaussian_noise(z.len(), 1.0, seed)?;
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(invalid!("sigma must be nonnegative, got {sigma}"));
    }
    let samples = z
        .samples()
        .iter()
        .zip(&noise)
        .map(|(a, w)| a + sigma * w)
        .collect();
    Signal::new(samples, z.fs())
}
