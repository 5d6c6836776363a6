//! Signal and matrix serialization.
//!
//! Signals travel as one-sample-per-line CSV (with an optional `# fs=<Hz>`
//! comment) or 16-bit PCM mono WAV. Time-frequency grids are written as a
//! magnitude CSV (header row of times, first column of frequencies) or as a
//! 16-bit binary PGM heatmap with logarithmic compression. All writers are
//! deterministic: identical inputs produce byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::signal::Signal;
use crate::tfr::TfrMatrix;

/// Reads a signal from CSV or WAV (chosen by file extension). CSV files
/// without an `# fs=` header need `fs_override`; an override also wins over
/// any header or WAV metadata.
pub fn read_signal(path: &Path, fs_override: Option<f64>) -> Result<Signal> {
    let is_wav = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("wav"))
        .unwrap_or(false);
    if is_wav {
        read_signal_wav(path, fs_override)
    } else {
        read_signal_csv(path, fs_override)
    }
}

fn read_signal_csv(path: &Path, fs_override: Option<f64>) -> Result<Signal> {
    let text = fs::read_to_string(path)?;
    let mut fs_header = None;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix("fs=") {
                let fs: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad fs value {value:?}", lineno + 1)))?;
                fs_header = Some(fs);
            }
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: not a number: {line:?}", lineno + 1)))?;
        samples.push(v);
    }
    if samples.is_empty() {
        return Err(Error::Parse(format!("{}: no samples", path.display())));
    }
    let fs = fs_override
        .or(fs_header)
        .ok_or_else(|| invalid!("{}: no fs header and no override given", path.display()))?;
    Signal::new(samples, fs)
}

/// Writes a signal as CSV with an `# fs=` header; samples round-trip exactly.
pub fn write_signal_csv(signal: &Signal, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(signal.len() * 20 + 16);
    out.push_str(&format!("# fs={}\n", signal.fs()));
    for v in signal.samples() {
        out.push_str(&format!("{v}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

fn read_u32_le(b: &[u8], at: usize) -> Option<u32> {
    b.get(at..at + 4).map(|s| u32::from_le_bytes(s.try_into().unwrap()))
}

fn read_u16_le(b: &[u8], at: usize) -> Option<u16> {
    b.get(at..at + 2).map(|s| u16::from_le_bytes(s.try_into().unwrap()))
}

fn read_signal_wav(path: &Path, fs_override: Option<f64>) -> Result<Signal> {
    let bytes = fs::read(path)?;
    let bad = |msg: &str| Error::Parse(format!("{}: {msg}", path.display()));
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(bad("not a RIFF/WAVE file"));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u16, u32, u16)> = None; // format, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = read_u32_le(&bytes, pos + 4).ok_or_else(|| bad("truncated chunk"))? as usize;
        let body_start = pos + 8;
        let body_end = body_start + size;
        if body_end > bytes.len() {
            return Err(bad("chunk overruns file"));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(bad("fmt chunk too short"));
                }
                fmt = Some((
                    read_u16_le(&bytes, body_start).unwrap(),
                    read_u16_le(&bytes, body_start + 2).unwrap(),
                    read_u32_le(&bytes, body_start + 4).unwrap(),
                    read_u16_le(&bytes, body_start + 14).unwrap(),
                ));
            }
            b"data" => data = Some(&bytes[body_start..body_end]),
            _ => {}
        }
        pos = body_end + (size & 1); // chunks are word-aligned
    }
    let (format, channels, rate, bits) = fmt.ok_or_else(|| bad("missing fmt chunk"))?;
    if format != 1 || bits != 16 {
        return Err(bad("only 16-bit PCM is supported"));
    }
    if channels != 1 {
        return Err(bad("only mono is supported"));
    }
    let data = data.ok_or_else(|| bad("missing data chunk"))?;
    let samples: Vec<f64> = data
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32767.0)
        .collect();
    if samples.is_empty() {
        return Err(bad("no samples"));
    }
    Signal::new(samples, fs_override.unwrap_or(rate as f64))
}

/// Writes a signal as 16-bit PCM mono WAV; samples are clamped to [-1, 1]
/// full scale.
pub fn write_signal_wav(signal: &Signal, path: &Path) -> Result<()> {
    let n = signal.len();
    let data_len = 2 * n as u32;
    let rate = signal.fs().round().max(1.0) as u32;
    let mut out = Vec::with_capacity(44 + 2 * n);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for v in signal.samples() {
        let q = (v.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes the magnitude grid as CSV: a header row with the time axis, then
/// one row per frequency with the frequency value in the first column.
/// Cells carry nine significant digits.
pub fn write_tfr_csv(tfr: &TfrMatrix, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("freq_hz\\time_samples");
    for t in tfr.time_axis() {
        out.push_str(&format!(",{t}"));
    }
    out.push('\n');
    for f in 0..tfr.n_freqs() {
        out.push_str(&format!("{:.8e}", tfr.freq_axis()[f]));
        for t in 0..tfr.n_cols() {
            out.push_str(&format!(",{:.8e}", tfr.magnitude_at(f, t)));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads back a magnitude CSV written by [`write_tfr_csv`]:
/// (frequency axis, time axis, magnitudes\[freq\]\[time\]).
pub fn read_tfr_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{}: empty file", path.display())))?;
    let times: Vec<f64> = header
        .split(',')
        .skip(1)
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad time value {s:?}")))
        })
        .collect::<Result<_>>()?;
    let mut freqs = Vec::new();
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let f: f64 = cells
            .next()
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse("bad frequency value".into()))?;
        freqs.push(f);
        let row: Vec<f64> = cells
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::Parse(format!("bad magnitude {s:?}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != times.len() {
            return Err(Error::Parse(format!(
                "{}: ragged row ({} cells, expected {})",
                path.display(),
                row.len(),
                times.len()
            )));
        }
        rows.push(row);
    }
    Ok((freqs, times, rows))
}

/// Writes the magnitude grid as a binary 16-bit PGM heatmap. Magnitudes are
/// compressed to decibels relative to the matrix maximum with a floor at
/// `log_floor_db` (usually negative); frequency increases upward.
pub fn write_tfr_pgm(tfr: &TfrMatrix, path: &Path, log_floor_db: f64) -> Result<()> {
    if !(log_floor_db < 0.0) {
        return Err(invalid!("log floor must be negative dB, got {log_floor_db}"));
    }
    let nf = tfr.n_freqs();
    let nt = tfr.n_cols();
    let mut peak = 0.0f64;
    for t in 0..nt {
        for f in 0..nf {
            peak = peak.max(tfr.magnitude_at(f, t));
        }
    }
    let mut out = Vec::with_capacity(64 + 2 * nf * nt);
    out.extend_from_slice(format!("P5\n{nt} {nf}\n65535\n").as_bytes());
    // PGM rows run top to bottom; emit the highest frequency first.
    for f in (0..nf).rev() {
        for t in 0..nt {
            let mag = tfr.magnitude_at(f, t);
            let db = if peak > 0.0 && mag > 0.0 {
                (20.0 * (mag / peak).log10()).max(log_floor_db)
            } else {
                log_floor_db
            };
            let unit = (db - log_floor_db) / -log_floor_db;
            let pixel = (unit * 65535.0).round() as u16;
            out.extend_from_slice(&pixel.to_be_bytes());
        }
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}
