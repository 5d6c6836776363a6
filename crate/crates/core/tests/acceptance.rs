//! Acceptance suite: every criterion prints one PASS/FAIL line; run with
//! `cargo test -p boundeffred --test acceptance -- --nocapture` to see the
//! lines for passing criteria too.

use boundeffred::extend::{
    build_lag_matrices, fit_sigext, sig_ext, ExtenderKind, Solver,
};
use boundeffred::metrics::{column_pdf, ot_distance, perf_index_d, SpectralPdf};
use boundeffred::numerics::{dot, solve_spd, DenseMatrix, SplitMix64};
use boundeffred::pipeline::{
    bound_eff_red, stream_init, timing_budget, PipelineConfig,
};
use boundeffred::signal::Signal;
use boundeffred::tfr::{
    reassignment_detailed, sst_detailed, stft, TfrKind, TfrMatrix, TfrValues,
};
use boundeffred::verify::{
    ahm_benchmark, closed_form_a0, closed_form_s0_inv, explicit_s_matrix, mc_moments,
    oracle_convergence, AhmBenchConfig, BenchMethod, ConvergenceConfig, McConfig,
};
use boundeffred::window::WindowSpec;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Criterion 1: forecast variance grows linearly with the noise power
/// (log-log slope 1.0 +/- 0.15 per horizon, floor region excluded).
#[test]
fn criterion_1_variance_scales_with_noise_power() {
    let start = std::time::Instant::now();
    let cfg = McConfig::sigma_sweep_benchmark(100, 0xBEF1);
    let mc = mc_moments(&cfg).unwrap();
    let mut all_ok = true;
    let mut details = Vec::new();
    for ell in [1usize, 10, 100] {
        let fit = mc.sigma_variance_slope(ell, 10.0).unwrap();
        let ok = (fit.slope - 1.0).abs() <= 0.15;
        all_ok &= ok;
        details.push(format!("ell={ell} slope={:.4}", fit.slope));
    }
    let elapsed = start.elapsed().as_secs_f64();
    details.push(format!("elapsed={elapsed:.1}s (target 300s)"));
    let runtime_ok = elapsed < 300.0;
    report(
        "1 (noise-power scaling)",
        all_ok && runtime_ok,
        &details.join(" "),
    );
    assert!(all_ok, "{}", details.join(" "));
    assert!(runtime_ok, "runtime {elapsed:.1}s exceeds the 5-minute target");
}

/// Criterion 2: forecast variance decays like 1/K
/// (log-log slope -1.0 +/- 0.25 per horizon over K in [800, 2000]).
#[test]
fn criterion_2_variance_scales_with_training_size() {
    let cfg = McConfig::k_sweep_benchmark(400, 0xBEF2);
    let mc = mc_moments(&cfg).unwrap();
    let mut all_ok = true;
    let mut details = Vec::new();
    for ell in [1usize, 10, 100] {
        let fit = mc.k_variance_slope(ell).unwrap();
        let ok = (fit.slope + 1.0).abs() <= 0.25;
        all_ok &= ok;
        details.push(format!("ell={ell} slope={:.4} ok={ok}"));
    }
    report("2 (training-size scaling)", all_ok, &details.join(" "));
    assert!(all_ok, "{}", details.join(" "));
}

fn table1() -> &'static boundeffred::verify::BenchReport {
    use std::sync::OnceLock;
    static REPORT: OnceLock<boundeffred::verify::BenchReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let mut cfg = AhmBenchConfig::benchmark(50, 0xBEF3);
        // Criteria 3 and 4 only gate these three methods.
        cfg.methods = vec![
            BenchMethod::SigExt { m: 100 },
            BenchMethod::SigExt { m: 750 },
            BenchMethod::Symmetric,
        ];
        ahm_benchmark(&cfg).unwrap()
    })
}

/// Criterion 3: forecast MSE on the modulated signal lands in the reference
/// windows with the right ordering.
#[test]
fn criterion_3_benchmark_mse_windows() {
    let report_data = table1();
    let m750 = report_data.row("sigext(M=750)").unwrap().mean_mse;
    let m100 = report_data.row("sigext(M=100)").unwrap().mean_mse;
    let sym = report_data.row("symmetric").unwrap().mean_mse;
    let in_750 = (0.28..=0.68).contains(&m750);
    let in_100 = (0.95..=1.35).contains(&m100);
    let in_sym = (4.95..=5.95).contains(&sym);
    let ordered = m750 < m100 && m100 < sym;
    let pass = in_750 && in_100 && in_sym && ordered;
    report(
        "3 (benchmark MSE)",
        pass,
        &format!("sigext750={m750:.3} sigext100={m100:.3} symmetric={sym:.3} ordered={ordered}"),
    );
    assert!(in_750, "sigext(M=750) MSE {m750} outside [0.28, 0.68]");
    assert!(in_100, "sigext(M=100) MSE {m100} outside [0.95, 1.35]");
    assert!(in_sym, "symmetric MSE {sym} outside [4.95, 5.95]");
    assert!(ordered, "expected sigext750 < sigext100 < symmetric");
}

/// Criterion 4: the treated STFT's transport index beats the untreated one
/// with the forecast extension and loses with the reflection.
#[test]
fn criterion_4_benchmark_transport_index() {
    let report_data = table1();
    let d_sig = report_data.row("sigext(M=750)").unwrap().mean_d;
    let d_sym = report_data.row("symmetric").unwrap().mean_d;
    let pass = d_sig < 0.05 && d_sym > 1.0;
    report(
        "4 (transport index)",
        pass,
        &format!("d_sigext750={d_sig:.4} d_symmetric={d_sym:.4}"),
    );
    assert!(d_sig < 0.05, "sigext(M=750) index {d_sig} not below 0.05");
    assert!(d_sym > 1.0, "symmetric index {d_sym} not above 1.0");
}

/// Criterion 5: closed-form oracles match explicitly constructed matrices on
/// random commensurate configurations, their norm bounds hold, and the fitted
/// coefficients converge toward the expected last row as K grows.
#[test]
fn criterion_5_closed_form_oracles() {
    use boundeffred::signal::HarmonicComponent;
    let mut rng = SplitMix64::new(0xBEF5);
    let mut worst_inv = 0.0f64;
    let mut worst_a0 = 0.0f64;
    for trial in 0..20 {
        let m = 10 + (rng.next_u64() % 140) as usize;
        let j = 1 + (rng.next_u64() % 3) as usize;
        let mut comps = Vec::new();
        let mut used = std::collections::HashSet::new();
        while comps.len() < j {
            let p = 1 + (rng.next_u64() as usize) % ((m / 2).max(2) - 1);
            if 2 * p < m && used.insert(p) {
                let amp = 0.5 + 2.0 * rng.next_f64();
                comps.push(HarmonicComponent::new(amp, p as f64 / m as f64, 0.0));
            }
        }
        let sigma = 10f64.powf(-2.5 + 2.5 * rng.next_f64());
        let s0 = explicit_s_matrix(&comps, 1.0, sigma, m, 0).unwrap();
        let s1 = explicit_s_matrix(&comps, 1.0, sigma, m, 1).unwrap();
        let s0_inv = closed_form_s0_inv(&comps, 1.0, sigma, m).unwrap();
        let a0 = closed_form_a0(&comps, 1.0, sigma, m).unwrap();

        let prod = s0_inv.matmul(&s0).unwrap();
        let eye_err = (0..m)
            .flat_map(|r| (0..m).map(move |c| (r, c)))
            .map(|(r, c)| (prod.get(r, c) - if r == c { 1.0 } else { 0.0 }).abs())
            .fold(0.0f64, f64::max);
        worst_inv = worst_inv.max(eye_err);
        assert!(eye_err <= 1e-8, "trial {trial}: S0_inv * S0 deviates by {eye_err}");

        let direct = s1.matmul(&s0_inv).unwrap();
        let a0_err = (0..m)
            .flat_map(|r| (0..m).map(move |c| (r, c)))
            .map(|(r, c)| (a0.get(r, c) - direct.get(r, c)).abs())
            .fold(0.0f64, f64::max);
        worst_a0 = worst_a0.max(a0_err);
        assert!(a0_err <= 1e-8, "trial {trial}: A0 deviates by {a0_err}");

        let jf = comps.len() as f64;
        assert!(s0_inv.max_abs() <= (1.0 + 2.0 * jf / m as f64) / (sigma * sigma) * (1.0 + 1e-12));
        assert!(a0.max_abs() <= 1f64.max(2.0 * jf / m as f64) * (1.0 + 1e-12));
    }

    let conv = oracle_convergence(&ConvergenceConfig::benchmark(16, 0xBEF5)).unwrap();
    let first = conv.deviations[0];
    let last = *conv.deviations.last().unwrap();
    let converges = last < first;
    report(
        "5 (closed-form oracles)",
        converges,
        &format!(
            "max|S0inv*S0 - I|={worst_inv:.2e} max|A0 - S1*S0inv|={worst_a0:.2e} dev(K=500)={first:.3e} dev(K=4000)={last:.3e}"
        ),
    );
    assert!(converges, "deviation did not shrink: {:?}", conv.deviations);
}

/// Criterion 6: noiseless signals from stable linear recurrences of order
/// q <= M are forecast essentially exactly by the SVD route, and the
/// reconstructed model rows above the last one equal the unit shift.
#[test]
fn criterion_6_exact_recurrence_and_companion_rows() {
    let mut rng = SplitMix64::new(0xBEF6);
    let mut worst_forecast = 0.0f64;
    // Random stable recurrences: q/2 damped-oscillator pairs.
    for trial in 0..8 {
        let pairs = 1 + (trial % 3);
        let q = 2 * pairs;
        let mut coeffs = vec![1.0]; // polynomial in z^-1, built from root pairs
        for _ in 0..pairs {
            let radius = 0.55 + 0.43 * rng.next_f64();
            let angle = 0.2 + 2.5 * rng.next_f64();
            // (1 - 2 r cos(a) z^-1 + r^2 z^-2)
            let (b1, b2) = (-2.0 * radius * angle.cos(), radius * radius);
            let mut next = vec![0.0; coeffs.len() + 2];
            for (i, c) in coeffs.iter().enumerate() {
                next[i] += c;
                next[i + 1] += b1 * c;
                next[i + 2] += b2 * c;
            }
            coeffs = next;
        }
        // x[n] = -sum_{i=1..q} coeffs[i] x[n-i]
        let n = 160;
        let horizon = 5 * q;
        let mut x = Vec::with_capacity(n + horizon);
        for _ in 0..q {
            x.push(rng.next_f64() * 2.0 - 1.0);
        }
        for t in q..n + horizon {
            let mut v = 0.0;
            for i in 1..=q {
                v -= coeffs[i] * x[t - i];
            }
            x.push(v);
        }
        let scale = x.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let m = 6 + (rng.next_u64() % 15) as usize; // M in [6, 20] >= q
        let sig = Signal::new(x[..n].to_vec(), 1.0).unwrap();
        let ext = sig_ext(&sig, m, 60, horizon, Solver::Svd).unwrap();
        for i in 0..horizon {
            let err = (ext.samples()[n + i] - x[n + i]).abs();
            worst_forecast = worst_forecast.max(err / scale);
            assert!(
                err <= 1e-6 * scale,
                "trial {trial} (q={q}, m={m}) step {i}: err {err:.3e} vs scale {scale:.3e}"
            );
        }
    }

    // Companion rows reconstructed from noisy data at small M.
    let mut worst_row = 0.0f64;
    for trial in 0..4 {
        let m = 5 + 5 * trial; // 5, 10, 15, 20
        let noise = boundeffred::numerics::gaussian_noise(600, 1.0, 0xC0 + trial as u64).unwrap();
        let sig = Signal::new(noise, 1.0).unwrap();
        let lm = build_lag_matrices(&sig, m, 150).unwrap();
        let mut g = DenseMatrix::zeros(m, m);
        for r in 0..m {
            for c in 0..m {
                g.set(r, c, dot(lm.x.row(r), lm.x.row(c)));
            }
        }
        for row in 0..m - 1 {
            let rhs: Vec<f64> = (0..m).map(|r| dot(lm.x.row(r), lm.y.row(row))).collect();
            let sol = solve_spd(&g, &rhs).unwrap();
            for (c, v) in sol.x.iter().enumerate() {
                let expect = if c == row + 1 { 1.0 } else { 0.0 };
                worst_row = worst_row.max((v - expect).abs());
                assert!(
                    (v - expect).abs() <= 1e-9,
                    "m={m} row {row} col {c}: {v}"
                );
            }
        }
    }
    report(
        "6 (exact recurrence)",
        true,
        &format!("worst forecast err={worst_forecast:.2e} (tol 1e-6), worst companion row err={worst_row:.2e} (tol 1e-9)"),
    );
}

fn max_abs_diff(a: &TfrMatrix, b: &TfrMatrix) -> f64 {
    match (a.values(), b.values()) {
        (TfrValues::Complex(x), TfrValues::Complex(y)) => {
            x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
        }
        (TfrValues::Real(x), TfrValues::Real(y)) => {
            x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
        }
        _ => f64::INFINITY,
    }
}

/// Criterion 7: streaming equals batch over a randomized configuration
/// matrix; interior columns equal the plain transform bit-exactly; SST
/// conserves reassigned mass per column; RS energy bookkeeping balances.
#[test]
fn criterion_7_pipeline_invariants() {
    let mut rng = SplitMix64::new(0xBEF7);
    let n = 420;
    let base: Vec<f64> = {
        let clean: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64;
                (0.5 * t).sin() + 1.3 * (0.13 * t).cos()
            })
            .collect();
        let noise = boundeffred::numerics::gaussian_noise(n, 0.05, 0xBEF7).unwrap();
        clean.iter().zip(&noise).map(|(a, b)| a + b).collect()
    };
    let full = Signal::new(base, 1.0).unwrap();
    let half = 16;

    let extenders = [
        ExtenderKind::None,
        ExtenderKind::SigExt { m: 24, k: 80, solver: Solver::NormalEquations },
        ExtenderKind::Symmetric,
        ExtenderKind::Dmd { m: 24, k: 80, rank: 8 },
    ];
    let transforms = [
        TfrKind::Stft,
        TfrKind::Sst { gamma_rel: 1e-4 },
        TfrKind::Rs { gamma_rel: 1e-4, causal: false },
        TfrKind::Rs { gamma_rel: 1e-4, causal: true },
        TfrKind::Conceft { tapers: 2, projections: 3, gamma_rel: 1e-4, seed: 5 },
    ];
    let mut cases = 0usize;
    let mut worst_stream = 0.0f64;
    for extender in extenders {
        for tfr_kind in transforms {
            for hop in [3usize, 7] {
                for ext_len in [half, half + 9] {
                    let cfg = PipelineConfig {
                        extender,
                        tfr: tfr_kind,
                        window: WindowSpec::gaussian(half, 5.0).unwrap(),
                        n_fft: 64,
                        hop,
                        ext_len,
                    };
                    let batch = bound_eff_red(&full, &cfg).unwrap();

                    // Stream from a random split in random chunk sizes.
                    let split = 300 + (rng.next_u64() % 60) as usize;
                    let init = Signal::new(full.samples()[..split].to_vec(), 1.0).unwrap();
                    let mut st = stream_init(&init, cfg.clone()).unwrap();
                    let mut fed = split;
                    while fed < n {
                        let step = 1 + (rng.next_u64() % 40) as usize;
                        let hi = (fed + step).min(n);
                        st.push(&full.samples()[fed..hi]).unwrap();
                        fed = hi;
                    }
                    let diff = max_abs_diff(st.tfr(), &batch);
                    worst_stream = worst_stream.max(diff);
                    assert!(
                        diff <= 1e-12,
                        "stream/batch diff {diff:.3e} for {extender:?} {tfr_kind:?} hop={hop} l={ext_len}"
                    );
                    cases += 1;
                }
            }
        }
    }

    // Interior-column bit-equality with the plain transform.
    let cfg = PipelineConfig {
        extender: ExtenderKind::SigExt { m: 24, k: 80, solver: Solver::NormalEquations },
        tfr: TfrKind::Stft,
        window: WindowSpec::gaussian(half, 5.0).unwrap(),
        n_fft: 64,
        hop: 5,
        ext_len: half,
    };
    let treated = bound_eff_red(&full, &cfg).unwrap();
    let plain = stft(&full, &cfg.window, 64, 5).unwrap();
    for c in 0..treated.n_cols() {
        let centre = c * 5;
        if centre >= half && centre + half <= n - 1 {
            assert_eq!(
                treated.complex_col(c).unwrap(),
                plain.complex_col(c).unwrap(),
                "interior column {c} not bit-equal"
            );
        }
    }

    // SST per-column complex-mass conservation within 1e-10.
    let w = WindowSpec::gaussian(half, 5.0).unwrap();
    let (sst_m, sst_stats) = sst_detailed(&full, &w, 64, 5, 1e-4).unwrap();
    for t in 0..sst_m.n_cols() {
        let sum: num_complex::Complex64 = sst_m.complex_col(t).unwrap().iter().sum();
        let kept = sst_stats.kept_col_sums[t];
        assert!(
            (sum - kept).norm() <= 1e-10 * kept.norm().max(1.0),
            "column {t} mass mismatch"
        );
    }

    // RS energy bookkeeping within 1e-10 relative.
    let (rs_m, rs_stats) = reassignment_detailed(&full, &w, 64, 5, 1e-4, false).unwrap();
    let st = stft(&full, &w, 64, 5).unwrap();
    let mut over = 0.0;
    for t in 0..st.n_cols() {
        let mags = st.col_magnitudes(t);
        let peak = mags.iter().fold(0.0f64, |a, &b| a.max(b));
        for v in &mags {
            if *v > 1e-4 * peak {
                over += v * v;
            }
        }
    }
    let placed: f64 = (0..rs_m.n_cols())
        .map(|t| rs_m.real_col(t).unwrap().iter().sum::<f64>())
        .sum();
    assert!(
        (rs_stats.accumulated + rs_stats.dropped - over).abs() <= 1e-10 * over,
        "energy bookkeeping off: {} + {} vs {over}",
        rs_stats.accumulated,
        rs_stats.dropped
    );
    assert!((placed - rs_stats.accumulated).abs() <= 1e-10 * over);

    report(
        "7 (pipeline invariants)",
        true,
        &format!("{cases} stream/batch cases, worst deviation {worst_stream:.2e}"),
    );
}

/// Criterion 8: transport-distance metric axioms on random densities and the
/// exact reference points of the performance index.
#[test]
fn criterion_8_metric_properties() {
    let mut rng = SplitMix64::new(0xBEF8);
    let bins = 24;
    let mk = |rng: &mut SplitMix64| -> SpectralPdf {
        let mags: Vec<f64> = (0..bins).map(|_| rng.next_f64() + 1e-6).collect();
        let m = TfrMatrix::new(
            TfrValues::Real(mags),
            (0..bins).map(|i| i as f64 * 0.5).collect(),
            vec![0.0],
            1,
        ).unwrap();
        column_pdf(&m, 0).unwrap()
    };
    for trial in 0..1000 {
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        let c = mk(&mut rng);
        let dab = ot_distance(&a, &b).unwrap();
        let dba = ot_distance(&b, &a).unwrap();
        let daa = ot_distance(&a, &a).unwrap();
        let dac = ot_distance(&a, &c).unwrap();
        let dcb = ot_distance(&c, &b).unwrap();
        assert!(dab >= 0.0, "trial {trial}");
        assert!(daa <= 1e-13, "trial {trial}: d(a,a) = {daa}");
        assert!((dab - dba).abs() <= 1e-13, "trial {trial}");
        assert!(dab <= dac + dcb + 1e-12, "trial {trial}: triangle violated");
    }

    // Point masses five bins apart transport exactly 5 * bin_width.
    let point = |at: usize| -> SpectralPdf {
        let mut mags = vec![0.0; bins];
        mags[at] = 2.0;
        let m = TfrMatrix::new(
            TfrValues::Real(mags),
            (0..bins).map(|i| i as f64 * 0.5).collect(),
            vec![0.0],
            1,
        ).unwrap();
        column_pdf(&m, 0).unwrap()
    };
    let d = ot_distance(&point(3), &point(8)).unwrap();
    assert!((d - 0.5 * 5.0).abs() < 1e-14, "point-mass transport {d}");

    // Exact index reference points.
    let rand_tfr = |rng: &mut SplitMix64| {
        TfrMatrix::new(
            TfrValues::Real((0..bins * 5).map(|_| rng.next_f64() + 0.01).collect()),
            (0..bins).map(|i| i as f64 * 0.5).collect(),
            (0..5).map(|i| i as f64).collect(),
            1,
        ).unwrap()
    };
    let f = rand_tfr(&mut rng);
    let f_opt = rand_tfr(&mut rng);
    let d_self = perf_index_d(&f, &f, &f_opt).unwrap();
    let d_opt = perf_index_d(&f_opt, &f, &f_opt).unwrap();
    assert!((d_self - 1.0).abs() <= 1e-12, "D(F,F) = {d_self}");
    assert_eq!(d_opt, 0.0, "D(F_opt, F) = {d_opt}");

    report(
        "8 (metric properties)",
        true,
        "1000 random axiom checks, exact reference points",
    );
}

/// Criterion 9: timing report at the real-time reference configuration
/// (extension 250 samples, M = 375, 512 frequency bins). Hardware-dependent;
/// reported, not gated. Reference values measured in the source material:
/// 46 ms forecast, 2.08 ms per column, minimum hop 8.
#[test]
fn criterion_9_timing_report() {
    let fs = 65.5;
    let n = 4000;
    let clean: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            (2.0 * std::f64::consts::PI * 1.2 * t).cos()
                + 0.6 * (2.0 * std::f64::consts::PI * 3.1 * t).cos()
        })
        .collect();
    let noise = boundeffred::numerics::gaussian_noise(n, 1e-2, 0xBEF9).unwrap();
    let samples: Vec<f64> = clean.iter().zip(&noise).map(|(a, b)| a + b).collect();
    let x = Signal::new(samples, fs).unwrap();

    let hop = 8;
    let cfg = PipelineConfig {
        extender: ExtenderKind::SigExt { m: 375, k: 937, solver: Solver::NormalEquations },
        tfr: TfrKind::Sst { gamma_rel: 1e-4 },
        window: WindowSpec::gaussian(250, 250.0 / 3.0).unwrap(),
        n_fft: 1022, // 512 nonnegative-frequency bins
        hop,
        ext_len: 250,
    };
    let init = Signal::new(x.samples()[..3000].to_vec(), fs).unwrap();
    let mut st = stream_init(&init, cfg).unwrap();
    let mut forecast_times = Vec::new();
    let mut col_times = Vec::new();
    for chunk in x.samples()[3000..].chunks(hop) {
        st.push(chunk).unwrap();
        let t = st.last_timings();
        forecast_times.push(t.forecast_seconds);
        if t.columns > 0 {
            col_times.push(t.transform_seconds / t.columns as f64);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let t_forecast = mean(&forecast_times);
    let t_col = mean(&col_times);
    let budget = timing_budget(t_forecast, t_col, 250, hop, fs);
    report(
        "9 (timing report)",
        true,
        &format!(
            "t_forecast={:.1}ms (ref 46ms) t_column={:.2}ms (ref 2.08ms) min_H={} (ref 8) feasible_at_H8={}",
            t_forecast * 1e3,
            t_col * 1e3,
            budget.min_h,
            budget.feasible
        ),
    );
}
