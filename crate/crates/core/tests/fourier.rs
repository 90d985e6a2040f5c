use std::f64::consts::PI;

use bosonic_synth::fourier::{
    coefficients, coefficients_polynomial, reconstruction_error, FourierSeries, Monomial, PotentialSpec,
};

fn single(terms: &[(f64, u32)], l: f64) -> PotentialSpec {
    PotentialSpec::polynomial(terms.iter().map(|&(c, p)| Monomial::new(c, vec![p])).collect(), vec![l]).unwrap()
}

fn fig1a() -> PotentialSpec {
    single(&[(0.05, 4), (-0.7, 2), (0.2, 1)], 12.0)
}

/// Composite Simpson rule for `(2/L) ∫ V(x) {cos, sin}(m k x) dx` on `[-L/2, L/2]`.
fn simpson_coefficients(v: impl Fn(f64) -> f64, l: f64, nf: usize) -> (f64, Vec<(f64, f64)>) {
    let n = 20_000;
    let h = l / n as f64;
    let k = 2.0 * PI / l;
    let integrate = |g: &dyn Fn(f64) -> f64| {
        let mut s = g(-l / 2.0) + g(l / 2.0);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(-l / 2.0 + i as f64 * h);
        }
        s * h / 3.0
    };
    let a0 = integrate(&|x| v(x)) / l;
    let harmonics = (1..=nf)
        .map(|m| {
            let w = m as f64 * k;
            (2.0 / l * integrate(&|x| v(x) * (w * x).cos()), 2.0 / l * integrate(&|x| v(x) * (w * x).sin()))
        })
        .collect();
    (a0, harmonics)
}

fn evaluate_oracle(a0: f64, harmonics: &[(f64, f64)], l: f64, x: f64) -> f64 {
    let k = 2.0 * PI / l;
    a0 + harmonics
        .iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let w = (i + 1) as f64 * k;
            a * (w * x).cos() + b * (w * x).sin()
        })
        .sum::<f64>()
}

#[test]
fn quartic_first_cosine_matches_closed_form() {
    let s = coefficients_polynomial(&single(&[(1.0, 4)], 2.0 * PI), 3).unwrap();
    let a1 = s.terms().iter().find(|t| t.m == [1]).unwrap().a;
    assert!((a1 - (48.0 - 8.0 * PI * PI)).abs() < 1e-10, "{a1}");
    assert!((a1 + 30.95684).abs() < 1e-5);
}

#[test]
fn odd_two_mode_coupling_has_no_cosines() {
    let spec = PotentialSpec::polynomial(vec![Monomial::new(1.0, vec![1, 2])], vec![2.0 * PI, 2.0 * PI]).unwrap();
    let s = coefficients(&spec, 6).unwrap();
    assert!(s.sine_count() > 0);
    assert!(s.terms().iter().all(|t| t.a == 0.0));
    assert_eq!(s.constant(), 0.0);
}

#[test]
fn constant_potential_has_only_a0() {
    let s = coefficients(&single(&[(2.5, 0)], 3.0), 5).unwrap();
    assert!((s.constant() - 2.5).abs() < 1e-14);
    assert!(s.is_empty());
}

#[test]
fn harmonic_series_at_origin_matches_partial_sum() {
    let s = coefficients(&single(&[(1.0, 2)], 2.0 * PI), 8).unwrap();
    // π²/3 + Σ_{m≤8} 4(-1)^m/m², which tends to 0 as the order grows
    let partial = PI * PI / 3.0 + (1..=8).map(|m| 4.0 * (-1f64).powi(m) / (m * m) as f64).sum::<f64>();
    assert!((s.evaluate(&[0.0]) - partial).abs() < 1e-12);
    assert!(partial.abs() < 0.03);
}

#[test]
fn empty_series_evaluates_to_zero() {
    let s = coefficients(&PotentialSpec::zero(vec![4.0]).unwrap(), 4).unwrap();
    for x in [-1.9, 0.0, 0.7] {
        assert_eq!(s.evaluate(&[x]), 0.0);
    }
    let e = reconstruction_error(&s, &PotentialSpec::zero(vec![4.0]).unwrap(), 32).unwrap();
    assert_eq!((e.max_abs, e.rms), (0.0, 0.0));
}

#[test]
fn asymmetric_well_matches_sampling_oracle() {
    let spec = fig1a();
    let v = |x: f64| 0.05 * x.powi(4) - 0.7 * x * x + 0.2 * x;
    let series = coefficients(&spec, 8).unwrap();
    let (a0, harmonics) = simpson_coefficients(v, 12.0, 8);
    assert!((series.constant() - a0).abs() < 1e-9);
    for (i, (a, b)) in harmonics.iter().enumerate() {
        let t = series.terms().iter().find(|t| t.m == [i as i64 + 1]).unwrap();
        assert!((t.a - a).abs() < 1e-9 && (t.b - b).abs() < 1e-9, "m = {}", i + 1);
    }
    // the library's error report against an independent dense scan
    let samples = 64;
    let mut worst = 0.0f64;
    for j in 0..samples {
        let x = -6.0 + 12.0 * (j as f64 + 0.5) / samples as f64;
        worst = worst.max((v(x) - evaluate_oracle(a0, &harmonics, 12.0, x)).abs());
    }
    let report = reconstruction_error(&series, &spec, samples).unwrap();
    assert!((report.max_abs - worst).abs() < 1e-8, "{} vs {worst}", report.max_abs);
}

#[test]
fn rms_error_does_not_grow_with_order() {
    let spec = fig1a();
    let rms: Vec<f64> = [2, 4, 8, 16]
        .iter()
        .map(|&nf| reconstruction_error(&coefficients(&spec, nf).unwrap(), &spec, 256).unwrap().rms)
        .collect();
    assert!(rms.windows(2).all(|w| w[1] <= w[0]), "{rms:?}");
}

#[test]
fn band_limited_input_is_reproduced() {
    let l = 5.0;
    let k = 3.0 * 2.0 * PI / l;
    let spec = PotentialSpec::callable(move |q: &[f64]| 0.4 * (k * q[0]).cos(), vec![l]).unwrap();
    let series = coefficients(&spec, 4).unwrap();
    assert_eq!(series.terms().len(), 1);
    assert!(reconstruction_error(&series, &spec, 128).unwrap().max_abs <= 1e-10);
}

#[test]
fn higher_order_improves_quartic_minus_quadratic() {
    let spec = single(&[(1.0, 4), (-1.0, 2)], 4.0);
    let err = |nf| reconstruction_error(&coefficients(&spec, nf).unwrap(), &spec, 128).unwrap().max_abs;
    assert!(err(8) < err(2));
}

#[test]
fn table_round_trip_preserves_evaluation() {
    let s = coefficients(&fig1a(), 8).unwrap();
    let back = FourierSeries::from_table(&s.to_table()).unwrap();
    for x in [-5.5, -1.0, 0.3, 4.2] {
        assert_eq!(back.evaluate(&[x]), s.evaluate(&[x]));
    }
}
