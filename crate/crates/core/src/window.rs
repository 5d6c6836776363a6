//! Analysis windows for the windowed transforms.
//!
//! A window is sampled on the integer grid m in [-half_len, half_len] together
//! with its analytic derivative (in units of 1/sample) and the ramped window
//! m*g[m]. The derivative pair is what frequency reassignment needs; the ramp
//! is what time reassignment needs.

use crate::error::{invalid, Result};

/// Grid half-width, in units of the Hermite functions' natural time, at which
/// the family is truncated. Orders up to ~10 have decayed to noise there.
const HERMITE_T_MAX: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowKind {
    /// `exp(-m^2 / (2 s^2))` with `s` in samples.
    Gaussian { shape: f64 },
    /// Hermite function of the given order on a fixed grid.
    Hermite { order: usize },
}

/// A sampled analysis window with the precomputed companions used by the
/// reassignment rules.
#[derive(Debug, Clone)]
pub struct WindowSpec {
    half_len: usize,
    kind: WindowKind,
    /// Window samples, unit L2 norm, length 2*half_len+1.
    g: Vec<f64>,
    /// Analytic derivative dg/dm sampled on the same grid.
    dg: Vec<f64>,
    /// m * g[m] on the same grid.
    tg: Vec<f64>,
}

impl WindowSpec {
    pub fn gaussian(half_len: usize, shape: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(invalid!("gaussian shape must be positive, got {shape}"));
        }
        let len = 2 * half_len + 1;
        let mut g = Vec::with_capacity(len);
        let mut dg = Vec::with_capacity(len);
        for i in 0..len {
            let m = i as f64 - half_len as f64;
            let v = (-m * m / (2.0 * shape * shape)).exp();
            g.push(v);
            dg.push(-m / (shape * shape) * v);
        }
        let norm = l2_norm(&g);
        for v in &mut g {
            *v /= norm;
        }
        for v in &mut dg {
            *v /= norm;
        }
        let tg = ramp(&g, half_len);
        Ok(WindowSpec {
            half_len,
            kind: WindowKind::Gaussian { shape },
            g,
            dg,
            tg,
        })
    }

    pub fn hermite(half_len: usize, order: usize) -> Result<Self> {
        let fam = hermite_family(half_len, order + 1)?;
        let (g, dg) = fam.into_iter().last().expect("family is non-empty");
        let tg = ramp(&g, half_len);
        Ok(WindowSpec {
            half_len,
            kind: WindowKind::Hermite { order },
            g,
            dg,
            tg,
        })
    }

    pub fn half_len(&self) -> usize {
        self.half_len
    }

    pub fn len(&self) -> usize {
        2 * self.half_len + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.kind, WindowKind::Gaussian { .. })
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn dg(&self) -> &[f64] {
        &self.dg
    }

    pub fn tg(&self) -> &[f64] {
        &self.tg
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn ramp(g: &[f64], half_len: usize) -> Vec<f64> {
    g.iter()
        .enumerate()
        .map(|(i, v)| (i as f64 - half_len as f64) * v)
        .collect()
}

/// The first `count` Hermite functions sampled on the window grid, grid
/// orthonormalized, each returned with its derivative in 1/sample units.
///
/// The raw functions come from the stable recurrence
/// `h_{k+1}(t) = sqrt(2/(k+1)) t h_k(t) - sqrt(k/(k+1)) h_{k-1}(t)` with
/// derivatives `h_k'(t) = sqrt(k/2) h_{k-1} - sqrt((k+1)/2) h_{k+1}`; a
/// Gram-Schmidt pass then removes the small grid-truncation leakage, with the
/// same coefficients applied to the derivatives so the pairs stay consistent.
pub fn hermite_family(half_len: usize, count: usize) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    if count == 0 {
        return Err(invalid!("need at least one Hermite window"));
    }
    if half_len == 0 {
        return Err(invalid!("window half-length must be positive"));
    }
    let len = 2 * half_len + 1;
    let dt = HERMITE_T_MAX / half_len as f64;
    let ts: Vec<f64> = (0..len).map(|i| (i as f64 - half_len as f64) * dt).collect();

    // Raw Hermite functions up to order `count` (one extra for derivatives).
    let n_raw = count + 1;
    let mut h = vec![vec![0.0; len]; n_raw];
    for (i, &t) in ts.iter().enumerate() {
        h[0][i] = std::f64::consts::PI.powf(-0.25) * (-t * t / 2.0).exp();
    }
    if n_raw > 1 {
        for (i, &t) in ts.iter().enumerate() {
            h[1][i] = 2.0f64.sqrt() * t * h[0][i];
        }
    }
    for k in 1..n_raw - 1 {
        let a = (2.0 / (k as f64 + 1.0)).sqrt();
        let b = (k as f64 / (k as f64 + 1.0)).sqrt();
        for (i, &t) in ts.iter().enumerate() {
            h[k + 1][i] = a * t * h[k][i] - b * h[k - 1][i];
        }
    }
    // Derivatives with respect to t, then rescaled to 1/sample.
    let mut dh = vec![vec![0.0; len]; count];
    for k in 0..count {
        for i in 0..len {
            let lower = if k == 0 { 0.0 } else { (k as f64 / 2.0).sqrt() * h[k - 1][i] };
            let upper = ((k as f64 + 1.0) / 2.0).sqrt() * h[k + 1][i];
            dh[k][i] = (lower - upper) * dt;
        }
    }

    // Modified Gram-Schmidt on the grid, mirrored onto the derivatives.
    let mut out: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(count);
    for k in 0..count {
        let mut g = h[k].clone();
        let mut dg = dh[k].clone();
        for (gq, dgq) in &out {
            let proj: f64 = g.iter().zip(gq).map(|(a, b)| a * b).sum();
            for i in 0..len {
                g[i] -= proj * gq[i];
                dg[i] -= proj * dgq[i];
            }
        }
        let norm = l2_norm(&g);
        if !(norm > 1e-12) {
            return Err(invalid!(
                "Hermite order {k} vanishes on a grid of half-length {half_len}"
            ));
        }
        for v in &mut g {
            *v /= norm;
        }
        for v in &mut dg {
            *v /= norm;
        }
        out.push((g, dg));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_normalized_and_symmetric() {
        let w = WindowSpec::gaussian(50, 12.0).unwrap();
        assert!((l2_norm(w.g()) - 1.0).abs() < 1e-12);
        for i in 0..w.len() {
            assert!((w.g()[i] - w.g()[w.len() - 1 - i]).abs() < 1e-15);
        }
        assert_eq!(w.g()[50], w.g().iter().fold(0.0f64, |a, &b| a.max(b)));
    }

    #[test]
    fn gaussian_derivative_matches_finite_differences() {
        let w = WindowSpec::gaussian(60, 15.0).unwrap();
        for i in 1..w.len() - 1 {
            let fd = (w.g()[i + 1] - w.g()[i - 1]) / 2.0;
            assert!(
                (w.dg()[i] - fd).abs() < 1e-4 * w.g()[60].abs(),
                "i={i}: {} vs {fd}",
                w.dg()[i]
            );
        }
    }

    #[test]
    fn ramped_window() {
        let w = WindowSpec::gaussian(4, 2.0).unwrap();
        for i in 0..w.len() {
            let m = i as f64 - 4.0;
            assert_eq!(w.tg()[i], m * w.g()[i]);
        }
    }

    #[test]
    fn hermite_family_is_orthonormal() {
        let fam = hermite_family(128, 4).unwrap();
        for (a, (ga, _)) in fam.iter().enumerate() {
            for (b, (gb, _)) in fam.iter().enumerate() {
                let ip: f64 = ga.iter().zip(gb).map(|(x, y)| x * y).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-10, "({a},{b}): {ip}");
            }
        }
    }

    #[test]
    fn hermite_zero_is_a_gaussian() {
        let fam = hermite_family(64, 1).unwrap();
        let (g, _) = &fam[0];
        // Proportional to exp(-t^2/2) on the grid; check against the envelope.
        let mid = g[64];
        let quarter = g[32];
        let t = 32.0 * HERMITE_T_MAX / 64.0;
        let expect = (-t * t / 2.0).exp();
        assert!((quarter / mid - expect).abs() < 1e-9);
    }

    #[test]
    fn hermite_derivatives_match_finite_differences() {
        let fam = hermite_family(200, 3).unwrap();
        for (k, (g, dg)) in fam.iter().enumerate() {
            let peak = g.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            for i in 1..g.len() - 1 {
                let fd = (g[i + 1] - g[i - 1]) / 2.0;
                assert!((dg[i] - fd).abs() < 1e-3 * peak, "order {k}, i={i}");
            }
        }
    }
}
