//! Acceptance gate: one test per numbered criterion, each asserting its
//! pinned tolerances and printing a `criterion N ...: PASS` line (visible
//! with `--nocapture`). Criterion 6, the property suites, runs as the
//! `acceptance_6_*` tests in `tests/properties.rs` within the same
//! `cargo test` invocation; the meta-test here checks the suites exist.
//!
//! The degree-2 and degree-3 fitting oracle is coded here from scratch,
//! over exact rationals, so it shares no code path with the library.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use erode::optimizer::{
    inverse_solve, minimize_analytic, minimize_controlled_random, minimize_grid,
    minimize_pure_random, RandomSearchParams, DEFAULT_RANGE,
};
use erode::polyfit::{fit, select_best, FitReport};
use erode::reference::{
    reference_by_label, reference_cubic, reference_linear, reference_quadratic, seed_records,
    seed_store, REFERENCE_DEVIATIONS,
};
use erode::report::{discrepancy_report, write_report, ReportOptions};
use erode::store::{Dataset, QueryFilter};

// criterion 1: ingestion golden values (exact sums over the bundled data)
const C1_RECORDS: usize = 12;
const C1_SUM_POWER_W: f64 = 29_902.5;
const C1_SUM_TIME_S: f64 = 1_023.0;
const C1_POWER_TOLERANCE_W: f64 = 0.5;

// criterion 2: fits match independent oracles to 6 significant figures
const C2_REL_TOL: f64 = 1e-6;
const C2_SXY: f64 = -1277440.625;
const C2_SXX: f64 = 66980814.0625;
// quoted presentation of the same oracle, at its own printed precision
const C2_QUOTED_SLOPE: f64 = -0.019072;
const C2_QUOTED_SLOPE_TOL: f64 = 5e-7;
const C2_QUOTED_INTERCEPT: f64 = 132.78;
const C2_QUOTED_INTERCEPT_TOL: f64 = 0.01;

// criterion 3: bundled degree-1 model round trip
const C3_EVAL_AT_W: f64 = 3_000.0;
const C3_EXPECTED_T_S: f64 = 71.75;
const C3_EVAL_TOL_S: f64 = 0.01;
const C3_INVERSE_TOL_W: f64 = 1.0;

// criterion 4: analytic optima of the bundled quadratic and cubic models
const C4_QUAD_ARGMIN_W: f64 = 5_195.5;
const C4_QUAD_ARGMIN_TOL_W: f64 = 0.5;
const C4_QUAD_MIN_S: f64 = 0.69;
const C4_QUAD_MIN_TOL_S: f64 = 0.01;
const C4_CUBIC_STATIONARY_W: [f64; 2] = [3_587.0, 5_687.0];
const C4_CUBIC_STATIONARY_TOL_W: f64 = 2.0;
const C4_CUBIC_ARGMIN_W: f64 = 7_000.0;
const C4_CUBIC_MIN_S: f64 = 14.59;
const C4_CUBIC_MIN_TOL_S: f64 = 0.01;

// criterion 5: all methods agree with the analytic minimum
const C5_SEED: u64 = 2;
const C5_GRID_POINTS: usize = 66_501;
const C5_RANDOM_SAMPLES: usize = 100_000;
const C5_VALUE_TOL_S: f64 = 1e-2;

// criterion 7: deviations for model selection
const C7_DEVIATIONS: [f64; 3] = [97.228, 37.339, 11.295];

// criterion 8: counter-values the report must show next to the claims
const C8_QUAD_AT_CLAIMED_S: f64 = 37.362_768;
const C8_CUBIC_AT_CLAIMED_S: f64 = 26.897_143_75;
const C8_COUNTER_TOL_S: f64 = 1e-9;

fn rel_close(actual: f64, expected: f64, tol: f64) -> bool {
    (actual - expected).abs() <= tol * expected.abs().max(1e-300)
}

fn seed_dataset() -> Dataset {
    seed_store()
        .dataset(&QueryFilter::default())
        .expect("bundled data forms a dataset")
}

/// Least-squares polynomial coefficients over exact rationals: build the
/// normal equations sum(x^(r+c)) c = sum(x^r y) and solve by Gauss-Jordan
/// elimination with no rounding anywhere, then convert the solution.
#[allow(clippy::needless_range_loop)] // elimination touches two rows per step
fn exact_fit(points: &[(f64, f64)], degree: usize) -> Vec<f64> {
    let n = degree + 1;
    let rat = |v: f64| BigRational::from_float(v).expect("finite input");
    let mut matrix = vec![vec![BigRational::zero(); n]; n];
    let mut rhs = vec![BigRational::zero(); n];
    for &(x, y) in points {
        let x = rat(x);
        let y = rat(y);
        let mut powers = vec![BigRational::from_integer(BigInt::from(1))];
        for k in 1..=2 * degree {
            let next = &powers[k - 1] * &x;
            powers.push(next);
        }
        for (r, row) in matrix.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell += &powers[r + c];
            }
            rhs[r] += &powers[r] * &y;
        }
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !matrix[r][col].is_zero())
            .expect("oracle system is nonsingular");
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in 0..n {
            if row == col || matrix[row][col].is_zero() {
                continue;
            }
            let factor = &matrix[row][col] / &matrix[col][col];
            for c in col..n {
                let t = &factor * &matrix[col][c];
                matrix[row][c] -= t;
            }
            let t = &factor * &rhs[col];
            rhs[row] -= t;
        }
    }
    (0..n)
        .map(|i| (&rhs[i] / &matrix[i][i]).to_f64().expect("fits in f64"))
        .collect()
}

#[test]
fn criterion_1_ingestion_golden() {
    let start = Instant::now();
    let records = seed_records();
    assert_eq!(records.len(), C1_RECORDS, "bundled CSV must hold 12 records");
    for record in &records {
        let product = record.voltage_v * record.current_a;
        assert!(
            (record.power_w - product).abs() <= C1_POWER_TOLERANCE_W,
            "power {} W disagrees with U*I = {} W beyond {} W",
            record.power_w,
            product,
            C1_POWER_TOLERANCE_W,
        );
    }
    let sum_p: f64 = records.iter().map(|r| r.power_w).sum();
    let sum_t: f64 = records.iter().map(|r| r.time_s).sum();
    assert_eq!(sum_p, C1_SUM_POWER_W, "power sum must be exact");
    assert_eq!(sum_t, C1_SUM_TIME_S, "time sum must be exact");

    let store = seed_store();
    assert_eq!(store.len(), C1_RECORDS);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "ingestion took {elapsed:?}");
    println!(
        "criterion 1 (ingestion golden test): PASS; {} records, sum P = {} W, sum t = {} s, every |P - U*I| <= {} W, {:?}",
        records.len(),
        sum_p,
        sum_t,
        C1_POWER_TOLERANCE_W,
        elapsed,
    );
}

#[test]
fn criterion_2_fit_matches_independent_oracles() {
    let start = Instant::now();
    let data = seed_dataset();
    let n = data.points.len() as f64;

    // Degree 1: closed-form simple regression, slope = Sxy / Sxx.
    let sum_x: f64 = data.points.iter().map(|p| p.0).sum();
    let sum_y: f64 = data.points.iter().map(|p| p.1).sum();
    let sum_xy: f64 = data.points.iter().map(|p| p.0 * p.1).sum();
    let sum_xx: f64 = data.points.iter().map(|p| p.0 * p.0).sum();
    let sxy = sum_xy - sum_x * sum_y / n;
    let sxx = sum_xx - sum_x * sum_x / n;
    assert_eq!(sxy, C2_SXY, "Sxy over the fixture is exact in f64");
    assert_eq!(sxx, C2_SXX, "Sxx over the fixture is exact in f64");
    let slope = sxy / sxx;
    let intercept = sum_y / n - slope * sum_x / n;
    assert!(
        (slope - C2_QUOTED_SLOPE).abs() <= C2_QUOTED_SLOPE_TOL,
        "closed-form slope {slope} is not the quoted {C2_QUOTED_SLOPE}",
    );
    assert!(
        (intercept - C2_QUOTED_INTERCEPT).abs() <= C2_QUOTED_INTERCEPT_TOL,
        "closed-form intercept {intercept} is not near the quoted {C2_QUOTED_INTERCEPT}",
    );

    let linear = fit(&data, 1).expect("degree-1 fit");
    let c = linear.model.coefficients();
    assert!(
        rel_close(c[0], intercept, C2_REL_TOL),
        "intercept {} vs oracle {intercept}",
        c[0],
    );
    assert!(
        rel_close(c[1], slope, C2_REL_TOL),
        "slope {} vs oracle {slope}",
        c[1],
    );

    // Degrees 2 and 3: exact-rational normal equations, coded above with
    // no shared arithmetic.
    for degree in 2..=3usize {
        let oracle = exact_fit(&data.points, degree);
        let report = fit(&data, degree).expect("fit");
        let coeffs = report.model.coefficients();
        assert_eq!(coeffs.len(), oracle.len());
        for (k, (&actual, &expected)) in coeffs.iter().zip(&oracle).enumerate() {
            assert!(
                rel_close(actual, expected, C2_REL_TOL),
                "degree {degree} coefficient {k}: fit {actual} vs exact oracle {expected}",
            );
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "fitting took {elapsed:?}");
    println!(
        "criterion 2 (fit vs independent oracles): PASS; degree 1 closed form (slope {slope:.9}), degrees 2..3 exact rationals, all coefficients within 1e-6 relative, {elapsed:?}",
    );
}

#[test]
fn criterion_3_bundled_linear_round_trip() {
    let model = reference_linear();
    let value = model.evaluate(C3_EVAL_AT_W);
    assert!(
        (value - C3_EXPECTED_T_S).abs() <= C3_EVAL_TOL_S,
        "t({C3_EVAL_AT_W}) = {value}, expected {C3_EXPECTED_T_S} within {C3_EVAL_TOL_S}",
    );

    let roots = inverse_solve(&model, C3_EXPECTED_T_S, &DEFAULT_RANGE);
    assert_eq!(roots.len(), 1, "a strictly monotone model has one pre-image");
    assert!(
        (roots[0] - C3_EVAL_AT_W).abs() <= C3_INVERSE_TOL_W,
        "inverse_solve({C3_EXPECTED_T_S}) = {} W, expected {C3_EVAL_AT_W} within {C3_INVERSE_TOL_W} W",
        roots[0],
    );
    println!(
        "criterion 3 (bundled linear round trip): PASS; t({C3_EVAL_AT_W} W) = {value:.4} s, inverse({C3_EXPECTED_T_S} s) = {:.4} W",
        roots[0],
    );
}

#[test]
fn criterion_4_analytic_optima() {
    let quadratic = reference_quadratic();
    let q = minimize_analytic(&quadratic, &DEFAULT_RANGE).expect("quadratic minimum");
    assert!(
        (q.argmin_p - C4_QUAD_ARGMIN_W).abs() <= C4_QUAD_ARGMIN_TOL_W,
        "quadratic argmin {} W, expected {C4_QUAD_ARGMIN_W} within {C4_QUAD_ARGMIN_TOL_W}",
        q.argmin_p,
    );
    assert!(
        (q.min_value - C4_QUAD_MIN_S).abs() <= C4_QUAD_MIN_TOL_S,
        "quadratic minimum {} s, expected {C4_QUAD_MIN_S} within {C4_QUAD_MIN_TOL_S}",
        q.min_value,
    );
    assert!(q.converged && q.physically_valid);

    let cubic = reference_cubic();
    let stationary = inverse_solve(&cubic.derivative(), 0.0, &DEFAULT_RANGE);
    assert_eq!(
        stationary.len(),
        2,
        "cubic must have two interior stationary points, got {stationary:?}",
    );
    for (root, expected) in stationary.iter().zip(C4_CUBIC_STATIONARY_W) {
        assert!(
            (root - expected).abs() <= C4_CUBIC_STATIONARY_TOL_W,
            "stationary point {root} W, expected {expected} within {C4_CUBIC_STATIONARY_TOL_W}",
        );
    }
    // First stationary point is the local minimum, second the local maximum.
    assert!(cubic.evaluate(stationary[0]) < cubic.evaluate(stationary[1]));

    let c = minimize_analytic(&cubic, &DEFAULT_RANGE).expect("cubic minimum");
    assert_eq!(
        c.argmin_p, C4_CUBIC_ARGMIN_W,
        "cubic minimum must sit on the upper range boundary",
    );
    assert!(
        (c.min_value - C4_CUBIC_MIN_S).abs() <= C4_CUBIC_MIN_TOL_S,
        "cubic minimum {} s, expected {C4_CUBIC_MIN_S} within {C4_CUBIC_MIN_TOL_S}",
        c.min_value,
    );
    println!(
        "criterion 4 (analytic optima): PASS; quadratic ({:.4} W, {:.4} s), cubic stationary ({:.4}, {:.4}) W, cubic boundary minimum ({:.0} W, {:.4} s)",
        q.argmin_p, q.min_value, stationary[0], stationary[1], c.argmin_p, c.min_value,
    );
}

#[test]
fn criterion_5_method_agreement() {
    let start = Instant::now();
    let models = [
        ("linear", reference_linear()),
        ("quadratic", reference_quadratic()),
        ("cubic", reference_cubic()),
    ];
    let params = RandomSearchParams {
        seed: C5_SEED,
        ..RandomSearchParams::default()
    };
    for (label, model) in &models {
        let exact = minimize_analytic(model, &DEFAULT_RANGE).expect("analytic");
        let grid = minimize_grid(model, &DEFAULT_RANGE, C5_GRID_POINTS).expect("grid");
        let pure = minimize_pure_random(model, &DEFAULT_RANGE, C5_RANDOM_SAMPLES, C5_SEED)
            .expect("pure random");
        let controlled =
            minimize_controlled_random(model, &DEFAULT_RANGE, &params).expect("controlled");
        for (method, result) in [("grid", &grid), ("pure random", &pure), ("controlled", &controlled)] {
            assert!(
                (result.min_value - exact.min_value).abs() <= C5_VALUE_TOL_S,
                "{label}/{method}: minimum {} s vs analytic {} s, tolerance {C5_VALUE_TOL_S}",
                result.min_value,
                exact.min_value,
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "methods took {elapsed:?}");
    println!(
        "criterion 5 (method agreement): PASS; grid n = {C5_GRID_POINTS}, pure random n = {C5_RANDOM_SAMPLES}, controlled defaults, seed {C5_SEED}, all within {C5_VALUE_TOL_S} s of analytic on 3 models, {elapsed:?}",
    );
}

#[test]
fn criterion_6_property_suites_present() {
    // The suites themselves run as tests/properties.rs in this same
    // invocation; here we pin that all nine exist at >= 1000 cases.
    let source = include_str!("properties.rs");
    let required = [
        "acceptance_6_interpolation_exactness",
        "acceptance_6_monotone_rss_in_degree",
        "acceptance_6_residual_sum_near_zero",
        "acceptance_6_derivative_matches_central_difference",
        "acceptance_6_seeded_determinism",
        "acceptance_6_controlled_random_shrinkage",
        "acceptance_6_inverse_solve_round_trip",
        "acceptance_6_query_subset_and_conjunction",
        "acceptance_6_store_save_load_round_trip",
    ];
    for name in required {
        assert!(
            source.contains(&format!("fn {name}")),
            "property suite {name} is missing",
        );
    }
    assert!(
        source.contains("const CASES: u32 = 1024"),
        "property suites must run at least 1000 cases each",
    );
    println!(
        "criterion 6 (property suites): PASS; {} suites at 1024 cases each run as tests/properties.rs in this invocation",
        required.len(),
    );
}

#[test]
fn criterion_7_selects_cubic_by_deviation() {
    let reports: Vec<FitReport> = REFERENCE_DEVIATIONS
        .iter()
        .map(|&(label, deviation)| FitReport {
            model: reference_by_label(label).expect("bundled"),
            residuals: Vec::new(),
            rss: deviation * deviation,
            deviation,
            condition_estimate: 1.0,
        })
        .collect();
    let claimed: Vec<f64> = reports.iter().map(|r| r.deviation).collect();
    assert_eq!(claimed, C7_DEVIATIONS);

    let best = select_best(&reports, None).expect("non-empty reports");
    assert_eq!(
        best.model.degree(),
        3,
        "the smallest deviation {} belongs to the cubic",
        C7_DEVIATIONS[2],
    );
    println!(
        "criterion 7 (model selection): PASS; deviations {:?} select degree {}",
        C7_DEVIATIONS,
        best.model.degree(),
    );
}

#[test]
fn criterion_8_discrepancy_report() {
    let store = seed_store();
    let data = seed_dataset();
    let fits: Vec<FitReport> = (1..=3)
        .map(|d| fit(&data, d).expect("fit over bundled data"))
        .collect();
    let disc = discrepancy_report(&fits, &data, &DEFAULT_RANGE).expect("discrepancy");

    // (a) refit coefficients next to the reference ones; the refits must
    // be the criterion-2 oracle values, the references the bundled ones.
    assert_eq!(disc.coefficients.len(), 3);
    for comp in &disc.coefficients {
        let oracle = exact_fit(&data.points, comp.degree);
        for (k, (&actual, &expected)) in comp.refit.iter().zip(&oracle).enumerate() {
            assert!(
                rel_close(actual, expected, C2_REL_TOL),
                "{} refit coefficient {k}: {actual} vs oracle {expected}",
                comp.label,
            );
        }
        let reference = reference_by_label(comp.label).expect("bundled");
        assert_eq!(comp.reference, reference.coefficients());
        assert!(
            comp.refit_rmse <= comp.reference_rmse,
            "{}: refit RMSE {} must not exceed reference RMSE {}",
            comp.label,
            comp.refit_rmse,
            comp.reference_rmse,
        );
    }

    // (b) claimed optima next to computed counter-values, matching the
    // criterion-4 oracles.
    let quad = disc
        .optima
        .iter()
        .find(|o| o.label == "quadratic")
        .expect("quadratic row");
    assert_eq!((quad.claimed_power_w, quad.claimed_time_s), (2_800.0, 65.55));
    assert!(
        (quad.model_time_at_claimed_power - C8_QUAD_AT_CLAIMED_S).abs() <= C8_COUNTER_TOL_S,
        "quadratic at claimed power: {} s, expected {C8_QUAD_AT_CLAIMED_S}",
        quad.model_time_at_claimed_power,
    );
    assert!((quad.computed.argmin_p - C4_QUAD_ARGMIN_W).abs() <= C4_QUAD_ARGMIN_TOL_W);
    assert!((quad.computed.min_value - C4_QUAD_MIN_S).abs() <= C4_QUAD_MIN_TOL_S);
    assert!(
        (quad.model_time_at_claimed_power - quad.claimed_time_s).abs() > 20.0,
        "the quadratic claim should not lie on its own model",
    );

    let cubic = disc
        .optima
        .iter()
        .find(|o| o.label == "cubic")
        .expect("cubic row");
    assert_eq!((cubic.claimed_power_w, cubic.claimed_time_s), (2_750.0, 62.04));
    assert!(
        (cubic.model_time_at_claimed_power - C8_CUBIC_AT_CLAIMED_S).abs() <= C8_COUNTER_TOL_S,
        "cubic at claimed power: {} s, expected {C8_CUBIC_AT_CLAIMED_S}",
        cubic.model_time_at_claimed_power,
    );
    assert_eq!(cubic.computed.argmin_p, C4_CUBIC_ARGMIN_W);
    assert!((cubic.computed.min_value - C4_CUBIC_MIN_S).abs() <= C4_CUBIC_MIN_TOL_S);
    assert!(
        (cubic.model_time_at_claimed_power - cubic.claimed_time_s).abs() > 20.0,
        "the cubic claim should not lie on its own model",
    );

    // The report document carries both sides of the comparison.
    let dir = tempfile::tempdir().expect("tempdir");
    let summary = write_report(&store, &QueryFilter::default(), dir.path(), &ReportOptions::default())
        .expect("report");
    assert_eq!(summary.files.len(), 7);
    for file in &summary.files {
        assert!(file.exists(), "report file {} missing", file.display());
    }
    let text = std::fs::read_to_string(dir.path().join("discrepancy.txt")).expect("read report");
    for needle in [
        "P = 2800.0000 W, t = 65.5500 s",
        "37.3628 s",
        "P = 5195.4555 W, t = 0.6945 s",
        "P = 2750.0000 W, t = 62.0400 s",
        "26.8971 s",
        "P = 7000.0000 W, t = 14.5935 s",
    ] {
        assert!(
            text.contains(needle),
            "discrepancy report must contain {needle:?}; got:\n{text}",
        );
    }
    println!(
        "criterion 8 (discrepancy report): PASS; refits match the exact oracle, claimed optima (2800 W, 65.55 s) and (2750 W, 62.04 s) shown against computed ({:.4} W, {:.4} s) and ({:.0} W, {:.4} s)",
        quad.computed.argmin_p, quad.computed.min_value, cubic.computed.argmin_p, cubic.computed.min_value,
    );
}
