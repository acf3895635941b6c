use std::f64::consts::{E, PI};

use angenent_core::entropy::{
    bound_sandwich, entropy_bound, entropy_from_length, f_functional, sequence_report, sphere_area,
    sphere_entropy, write_sequence_csv, SEQUENCE_CSV_HEADER,
};
use angenent_core::precise::extended_constants;
use angenent_core::{angenent_length, AnalyticProfile, Dimension, Error};

fn dim(n: u64) -> Dimension {
    Dimension::new(n).unwrap()
}

#[test]
fn sphere_areas_closed_forms() {
    assert!((sphere_area(0) - 2.0).abs() < 1e-15);
    assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
    assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
    assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    assert!((sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
}

#[test]
fn sphere_entropy_sequence() {
    assert!((sphere_entropy(1).unwrap() - (2.0 * PI / E).sqrt()).abs() < 1e-15);
    assert!((sphere_entropy(2).unwrap() - 4.0 / E).abs() < 1e-15);
    assert!(sphere_entropy(0).is_err());
    let mut prev = sphere_entropy(1).unwrap();
    for m in 2..=10_000 {
        let v = sphere_entropy(m).unwrap();
        assert!(v < prev, "m = {m}");
        prev = v;
    }
    assert!((sphere_entropy(1_000_000).unwrap() - 2f64.sqrt()).abs() <= 1e-3);
}

#[test]
fn length_to_entropy() {
    assert!(
        (entropy_from_length(dim(2), 8.0 / E).unwrap() - sphere_entropy(2).unwrap()).abs() < 1e-14
    );
    assert!((entropy_from_length(dim(2), 2.0).unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(entropy_from_length(dim(7), 0.0).unwrap(), 0.0);
    assert!(entropy_from_length(dim(2), -1.0).is_err());
}

#[test]
fn analytic_lengths() {
    let d = dim(2);
    assert!((angenent_length(d, &AnalyticProfile::sphere(d)) - 8.0 / E).abs() <= 1e-12);
    assert!((angenent_length(d, &AnalyticProfile::plane()) - 2.0).abs() <= 1e-12);
    // every sphere and plane reproduces its own entropy through the length
    for n in 2..=12 {
        let d = dim(n);
        let s = entropy_from_length(d, angenent_length(d, &AnalyticProfile::sphere(d))).unwrap();
        assert!(
            (s - sphere_entropy(n).unwrap()).abs() <= 1e-12 * s,
            "n = {n}"
        );
        let p = entropy_from_length(d, angenent_length(d, &AnalyticProfile::plane())).unwrap();
        assert!((p - 1.0).abs() <= 1e-12, "n = {n}");
    }
}

#[test]
fn f_functional_exact_values() {
    let d = dim(2);
    let plane = f_functional(d, &AnalyticProfile::plane(), 0.0, 1.0, None).unwrap();
    assert!((plane.value - 1.0).abs() <= 1e-8);
    assert!(plane.tail_bound <= 1e-100);
    let cyl = f_functional(d, &AnalyticProfile::cylinder(d), 0.0, 1.0, Some(40.0)).unwrap();
    assert!((cyl.value - (2.0 * PI / E).sqrt()).abs() <= 1e-8);
    let sph = f_functional(d, &AnalyticProfile::sphere(d), 0.0, 1.0, None).unwrap();
    assert!((sph.value - 4.0 / E).abs() <= 1e-8);
    assert!(matches!(
        f_functional(d, &AnalyticProfile::plane(), 0.0, 0.0, None),
        Err(Error::Domain { .. })
    ));
    // F is scale invariant on cones; on the plane every centre on it gives 1
    let shifted = f_functional(d, &AnalyticProfile::plane(), 0.0, 3.0, None).unwrap();
    assert!((shifted.value - 1.0).abs() <= 1e-8);
}

#[test]
fn entropy_bounds() {
    assert!((entropy_bound(dim(2)) - 2.24759).abs() <= 5e-6);
    let limit = (4.0 * PI / 3.0).sqrt();
    assert!((entropy_bound(dim(1_000_000)) - limit).abs() <= 1e-4);
    let e2 = entropy_bound(dim(2));
    for n in 2..=10_000 {
        let e = entropy_bound(dim(n));
        assert!(e > 2.0 && e <= e2, "n = {n}");
    }
    let sw = bound_sandwich(dim(4));
    assert!((sw.upper - 2.21823).abs() <= 5e-5);
    assert!((sw.lower - 2.02780).abs() <= 5e-5);
    let mut prev = bound_sandwich(dim(4));
    for n in 5..=10_000 {
        let s = bound_sandwich(dim(n));
        assert!(s.upper < prev.upper && s.lower > prev.lower, "n = {n}");
        prev = s;
    }
}

#[test]
fn sequence_rows_hold_invariants() {
    let rows = sequence_report(10_000, 4).unwrap();
    assert_eq!(rows.len(), 9_999);
    let e2 = rows[0].e_n;
    for r in &rows {
        let n = r.n.get();
        assert!(r.a_n > 0.5 && r.a_n < 2.0 / 3.0, "n = {n}: a_n = {}", r.a_n);
        assert!(r.x_n > 0.0 && r.x_n < 1.0);
        assert!(r.lower < r.e_n && r.e_n < r.upper, "n = {n}");
        assert!(r.e_n > 2.0 && r.e_n <= e2);
        assert!(
            r.rel_disagreement <= 1e-10,
            "n = {n}: {}",
            r.rel_disagreement
        );
        assert!((r.a_n - (r.y_n - 2.0 * (n as f64 - 1.0))).abs() <= 1e-9);
    }
    let first = &rows[0];
    assert!((first.a_n - 0.56155).abs() <= 1e-5);
    assert!((first.x_n - 0.28078).abs() <= 1e-5);
    assert!((rows.last().unwrap().a_n - 2.0 / 3.0).abs() <= 1e-3);
    assert_eq!(rows, sequence_report(10_000, 1).unwrap());
}

#[test]
fn sequence_csv() {
    let rows = sequence_report(3, 1).unwrap();
    let mut buf = Vec::new();
    write_sequence_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SEQUENCE_CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,"));
    assert_eq!(lines[1].split(',').count(), 9);
    assert!(sequence_report(1, 1).is_err());
}

#[test]
fn extended_precision_constants() {
    // 34-digit references from mpmath
    let cases = [
        (2, "2.247586577215660182867830987917586"),
        (3, "2.15526888308101418959480321822097"),
        (4, "2.120611255283940510509732688298842"),
        (1000, "2.046881043099159531005496323870118"),
    ];
    for (n, want) in cases {
        let got = extended_constants(dim(n)).e_n;
        let w: f64 = want.parse().unwrap();
        let lead = got.to_f64();
        assert!((lead - w).abs() <= 2.0 * f64::EPSILON * w, "n = {n}");
        let digits = got.to_sci_string(28);
        let mant = |s: &str| {
            s.replace(['.', '-'], "")
                .chars()
                .take(24)
                .collect::<String>()
        };
        assert_eq!(mant(&digits), mant(want), "n = {n}: {digits}");
    }
    let y2 = extended_constants(dim(2)).y_n.to_sci_string(30);
    assert_eq!(&y2.replace('.', "")[..25], "2561552812808830274910704");
}
