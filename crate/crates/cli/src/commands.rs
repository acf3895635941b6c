use std::io::Write;
use std::process::ExitCode;

use angenent_core::entropy::{sequence_report, write_sequence_csv, SequenceRow};
use angenent_core::io::fmt_f64;
use angenent_core::orbit::{
    default_bracket, find_symmetric_closed_geodesic, miss_angle_scan, poincare_f,
    scan_fixed_points, ScanPoint,
};
use angenent_core::precise::extended_constants;
use angenent_core::verify::{self, Suite};
use angenent_core::{
    angenent_length, integrate, par, residual_profile, CrossingRecord, Dimension, Error,
    GeodesicState,
};
use anyhow::Result;
use serde::Serialize;

use crate::artifacts::{tag, to_json, Artifacts};
use crate::cli::{Precision, SuiteArg};
use crate::settings::RunConfig;
use crate::UsageError;

fn dimension(n: u64) -> Result<Dimension> {
    Dimension::new(n).map_err(|e| UsageError(e.to_string()).into())
}

/// A number, or `sphere` / `cylinder` for the exact radii of dimension `n`.
pub fn parse_radius(raw: &str, n: Dimension) -> Result<f64> {
    let r = match raw.trim().to_ascii_lowercase().as_str() {
        "sphere" => n.sphere_radius(),
        "cylinder" => n.cylinder_radius(),
        other => other.parse::<f64>().map_err(|_| {
            UsageError(format!(
                "--r0: expected a number, `sphere` or `cylinder`, got `{raw}`"
            ))
        })?,
    };
    if r.is_nan() || r <= 0.0 || !r.is_finite() {
        return Err(UsageError(format!("--r0 must be positive, got {r}")).into());
    }
    Ok(r)
}

#[derive(Serialize)]
struct ExtendedRow {
    n: u64,
    y_n: String,
    ln_kappa_n: String,
    #[serde(rename = "E_n")]
    e_n: String,
}

pub fn constants(rc: &RunConfig, n_max: u64) -> Result<ExitCode> {
    let out = Artifacts::new(&rc.output_dir, rc.force);
    let stem = format!("constants_n{n_max}");
    let extended = rc.precision == Precision::Extended;
    let mut names = Vec::new();
    if rc.format.csv() {
        names.push(format!("{stem}.csv"));
    }
    if rc.format.json() {
        names.push(format!("{stem}.json"));
    }
    if extended {
        names.push(format!("{stem}_extended.json"));
    }
    out.claim(&names)?;

    let rows = sequence_report(n_max, rc.jobs)?;
    if rc.format.csv() {
        out.write_with(&format!("{stem}.csv"), |w| write_sequence_csv(&rows, w))?;
    }
    if rc.format.json() {
        out.write_json(&format!("{stem}.json"), &rows)?;
    }
    let ext: Vec<ExtendedRow> = if extended {
        let ns: Vec<u64> = (2..=n_max).collect();
        par::map(&ns, rc.jobs, |&n| {
            let c = extended_constants(Dimension::new(n).expect("n >= 2"));
            ExtendedRow {
                n,
                y_n: c.y_n.to_sci_string(32),
                ln_kappa_n: c.ln_kappa_n.to_sci_string(32),
                e_n: c.e_n.to_sci_string(32),
            }
        })
    } else {
        Vec::new()
    };
    if extended {
        out.write_json(&format!("{stem}_extended.json"), &ext)?;
    }

    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    if rc.format == crate::cli::Format::Json {
        w.write_all(to_json(&rows)?.as_bytes())?;
    } else {
        print_table(&mut w, &rows)?;
        for e in &ext {
            writeln!(w, "n = {:>6}  E_n = {}", e.n, e.e_n)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_table(w: &mut dyn Write, rows: &[SequenceRow]) -> std::io::Result<()> {
    writeln!(
        w,
        "{:>8} {:>14} {:>14} {:>14} {:>10} {:>10} {:>14} {:>12} {:>12}",
        "n", "y_n", "kappa_n", "E_n", "a_n", "x_n", "lambda(S^n-1)", "lower", "upper"
    )?;
    for r in rows {
        writeln!(
            w,
            "{:>8} {:>14.8} {:>14.6e} {:>14.10} {:>10.6} {:>10.6} {:>14.8} {:>12.8} {:>12.8}",
            r.n.get(),
            r.y_n,
            r.kappa_n,
            r.e_n,
            r.a_n,
            r.x_n,
            r.lambda_sphere_prev,
            r.lower,
            r.upper
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ShootSummary {
    n: u64,
    x0: f64,
    r0: f64,
    theta0: f64,
    fate: Option<String>,
    error: Option<String>,
    samples: usize,
    arc_length: Option<f64>,
    #[serde(rename = "length_A")]
    length_a: Option<f64>,
    residual_max: Option<f64>,
    r_range: Option<[f64; 2]>,
    crossings: Vec<CrossingRecord>,
}

pub fn shoot(rc: &RunConfig, n: u64, r0_raw: &str, theta0: f64, x0: f64) -> Result<ExitCode> {
    let d = dimension(n)?;
    let r0 = parse_radius(r0_raw, d)?;
    if !theta0.is_finite() || !x0.is_finite() {
        return Err(UsageError("--theta0 and --x0 must be finite".into()).into());
    }
    let mut stem = format!(
        "shoot_n{n}_r0_{}_theta0_{}",
        tag(r0_raw),
        tag(&theta0.to_string())
    );
    if x0 != 0.0 {
        stem.push_str(&format!("_x0_{}", tag(&x0.to_string())));
    }
    let out = Artifacts::new(&rc.output_dir, rc.force);
    let mut names = Vec::new();
    if rc.format.csv() {
        names.push(format!("{stem}.csv"));
    }
    if rc.format.json() {
        names.push(format!("{stem}.json"));
    }
    out.claim(&names)?;

    let mut summary = ShootSummary {
        n,
        x0,
        r0,
        theta0,
        fate: None,
        error: None,
        samples: 0,
        arc_length: None,
        length_a: None,
        residual_max: None,
        r_range: None,
        crossings: Vec::new(),
    };
    let ok = match integrate(d, GeodesicState::new(x0, r0, theta0), &rc.integrator) {
        Ok(path) => {
            let rs = path.samples().iter().map(|s| s.state.r);
            let lo = rs.clone().fold(f64::INFINITY, f64::min);
            let hi = rs.fold(f64::NEG_INFINITY, f64::max);
            summary.fate = Some(path.fate().to_string());
            summary.samples = path.samples().len();
            summary.arc_length = Some(path.arc_length());
            summary.length_a = Some(angenent_length(d, &path));
            summary.residual_max = residual_profile(d, &path).ok();
            summary.r_range = Some([lo, hi]);
            summary.crossings = path.crossings().to_vec();
            if rc.format.csv() {
                out.write_with(&format!("{stem}.csv"), |w| path.write_csv(w))?;
            }
            true
        }
        Err(e) => {
            summary.error = Some(e.to_string());
            false
        }
    };
    if rc.format.json() {
        out.write_json(&format!("{stem}.json"), &summary)?;
    }
    print!("{}", to_json(&summary)?);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn bracket_of(d: Dimension, given: Option<&[f64]>) -> Result<(f64, f64)> {
    match given {
        None => Ok(default_bracket(d)),
        Some([lo, hi]) if *lo > 0.0 && hi > lo && hi.is_finite() => Ok((*lo, *hi)),
        Some(v) => Err(UsageError(format!("bracket must satisfy 0 < LO < HI, got {v:?}")).into()),
    }
}

fn write_scan(w: &mut dyn Write, header: &str, scan: &[ScanPoint]) -> std::io::Result<()> {
    writeln!(w, "{header}")?;
    for p in scan {
        writeln!(
            w,
            "{},{}",
            fmt_f64(p.r),
            p.value.map(fmt_f64).unwrap_or_default()
        )?;
    }
    Ok(())
}

pub fn doughnut(rc: &RunConfig, n: u64, bracket: Option<&[f64]>, grid: usize) -> Result<ExitCode> {
    let d = dimension(n)?;
    let (lo, hi) = bracket_of(d, bracket)?;
    if grid < 2 {
        return Err(UsageError("--grid must be at least 2".into()).into());
    }
    let stem = format!("doughnut_n{n}");
    let out = Artifacts::new(&rc.output_dir, rc.force);
    let mut names = vec![format!("{stem}.json")];
    if rc.format.csv() {
        names.push(format!("{stem}.csv"));
    }
    out.claim(&names)?;

    match find_symmetric_closed_geodesic(d, lo, hi, grid, &rc.integrator, rc.jobs) {
        Ok(res) => {
            let report = res.report();
            out.write_json(&format!("{stem}.json"), &report)?;
            if rc.format.csv() {
                out.write_with(&format!("{stem}.csv"), |w| res.path.write_csv(w))?;
            }
            let (ok, bounds) = verify::loop_invariants(&res);
            println!("n = {n}");
            println!("R_top = {:.12}  R_bot = {:.12}", res.r_top, res.r_bot);
            println!("length_A = {:.12}", res.length_a);
            println!("lambda = {:.10}", res.lambda);
            println!(
                "F_0,1 direct = {:.10}  (discrepancy {:.2e})",
                res.entropy.f_direct, res.entropy.discrepancy
            );
            println!(
                "close_up_error = {:.2e}  residual_max = {:.2e}",
                res.close_up_error, res.residual_max
            );
            println!("bounds {}: {bounds}", if ok { "hold" } else { "VIOLATED" });
            if rc.precision == Precision::Extended {
                println!(
                    "E_n (extended) = {}",
                    extended_constants(d).e_n.to_sci_string(32)
                );
            }
            println!("fixed point of: {}", report.fixed_point_of.join(", "));
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            let scan = miss_angle_scan(d, lo, hi, grid, &rc.integrator, rc.jobs);
            out.claim(&[format!("{stem}_scan.csv")])?;
            out.write_with(&format!("{stem}_scan.csv"), |w| {
                write_scan(w, "R,miss", &scan)
            })?;
            let mut err = std::io::stderr().lock();
            writeln!(err, "no closed geodesic found on [{lo}, {hi}]: {e}")?;
            if matches!(e, Error::NoBracket(_)) {
                writeln!(err, "miss-angle scan (R, wrap(theta_return - pi)):")?;
                for p in &scan {
                    match p.value {
                        Some(v) => writeln!(err, "  {:>14.8}  {:>12.8}", p.r, v)?,
                        None => writeln!(err, "  {:>14.8}  no return", p.r)?,
                    }
                }
            }
            Ok(ExitCode::FAILURE)
        }
    }
}

#[derive(Serialize)]
struct PoincareReport {
    n: u64,
    range: [f64; 2],
    grid: usize,
    fixed_points: Vec<f64>,
}

pub fn poincare(rc: &RunConfig, n: u64, range: &[f64], grid: usize) -> Result<ExitCode> {
    let d = dimension(n)?;
    let (lo, hi) = match range {
        [lo, hi] if *lo > 0.0 && hi > lo && hi.is_finite() => (*lo, *hi),
        _ => {
            return Err(UsageError(format!("range must satisfy 0 < LO < HI, got {range:?}")).into())
        }
    };
    if grid < 2 {
        return Err(UsageError("--grid must be at least 2".into()).into());
    }
    let stem = format!(
        "poincare_n{n}_{}_{}_g{grid}",
        tag(&lo.to_string()),
        tag(&hi.to_string())
    );
    let out = Artifacts::new(&rc.output_dir, rc.force);
    let mut names = Vec::new();
    if rc.format.csv() {
        names.push(format!("{stem}.csv"));
    }
    if rc.format.json() {
        names.push(format!("{stem}.json"));
    }
    out.claim(&names)?;

    let roots = scan_fixed_points(d, lo, hi, grid, &rc.integrator, rc.jobs)?;
    if rc.format.csv() {
        let rs = angenent_core::roots::linspace(lo, hi, grid);
        let scan: Vec<ScanPoint> = par::map(&rs, rc.jobs, |&r| ScanPoint {
            r,
            value: poincare_f(d, r, &rc.integrator).ok(),
        });
        out.write_with(&format!("{stem}.csv"), |w| write_scan(w, "R,P_f", &scan))?;
    }
    let report = PoincareReport {
        n,
        range: [lo, hi],
        grid,
        fixed_points: roots,
    };
    if rc.format.json() {
        out.write_json(&format!("{stem}.json"), &report)?;
    }
    if report.fixed_points.is_empty() {
        println!("no fixed points of P_f on [{lo}, {hi}]");
    }
    for r in &report.fixed_points {
        let tag = if (r - d.sphere_radius()).abs() <= 1e-8 {
            "  (sphere apex)"
        } else {
            ""
        };
        println!("{r:.12}{tag}");
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyReport {
    suite: Suite,
    passed: bool,
    checks: Vec<verify::Check>,
}

pub fn verify(rc: &RunConfig, suite: SuiteArg, json: bool) -> Result<ExitCode> {
    let suite = match suite {
        SuiteArg::Fast => Suite::Fast,
        SuiteArg::Full => Suite::Full,
    };
    let checks = verify::run(suite, rc.jobs);
    let passed = checks.iter().all(|c| c.passed);
    if json {
        print!(
            "{}",
            to_json(&VerifyReport {
                suite,
                passed,
                checks
            })?
        );
    } else {
        for c in &checks {
            println!("{}", c.line());
        }
        let good = checks.iter().filter(|c| c.passed).count();
        println!("{good}/{} passed", checks.len());
    }
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
