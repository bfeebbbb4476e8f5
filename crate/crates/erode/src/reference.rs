//! Bundled reference data: the PC52/OL37 debiting measurement series this
//! tool ships with, and the previously circulated models and optima for
//! that series that the discrepancy report compares against.
//!
//! The reference coefficients and optima are kept verbatim, as claimed; they
//! do not necessarily agree with what refitting the bundled measurements
//! produces. `report::discrepancy_report` quantifies the differences.

use crate::polyfit::PolynomialModel;
use crate::store::{parse_csv, ExperimentRecord, Store};

/// The bundled measurement series in CSV exchange form: debiting of PC52
/// samples with an OL37 disc electrode on the MEC-50 installation, twelve
/// measurements across four regimes.
pub const SEED_CSV: &str = include_str!("../data/ol37_debiting.csv");

/// Power range of the MEC-50 installation, in watts.
pub const REFERENCE_DOMAIN: (f64, f64) = (350.0, 7000.0);

/// Reference deviations claimed for the three reference models, as
/// root-sum-of-squares over a validation series that was never published.
/// The cubic value is the smallest, which is why the cubic model was
/// declared the optimum.
pub const REFERENCE_DEVIATIONS: [(&str, f64); 3] = [
    ("linear", 97.228),
    ("quadratic", 37.339),
    ("cubic", 11.295),
];

/// A claimed optimal working point for one of the reference models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptimum {
    pub label: &'static str,
    pub power_w: f64,
    pub time_s: f64,
}

/// Optimal regimes claimed for the reference models.
pub const REFERENCE_OPTIMA: [ReferenceOptimum; 3] = [
    ReferenceOptimum {
        label: "linear",
        power_w: 3000.0,
        time_s: 71.75,
    },
    ReferenceOptimum {
        label: "quadratic",
        power_w: 2800.0,
        time_s: 65.55,
    },
    ReferenceOptimum {
        label: "cubic",
        power_w: 2750.0,
        time_s: 62.04,
    },
];

/// The bundled measurements as records (ids 0; see [`seed_store`]).
pub fn seed_records() -> Vec<ExperimentRecord> {
    parse_csv(SEED_CSV).expect("bundled CSV is valid")
}

/// A store pre-loaded with the bundled measurements, ids 1 through 12.
pub fn seed_store() -> Store {
    let mut store = Store::new();
    for record in seed_records() {
        store.add(record).expect("bundled records are valid");
    }
    store
}

fn reference_model(coeffs: Vec<f64>) -> PolynomialModel {
    PolynomialModel::new(coeffs, REFERENCE_DOMAIN).expect("reference coefficients are valid")
}

/// Reference degree-1 model: t = 139.8528 - 0.0227 P.
pub fn reference_linear() -> PolynomialModel {
    reference_model(vec![139.8528, -0.0227])
}

/// Reference degree-2 model: t = 173.1836 - 0.0664 P + 6.3902e-6 P^2.
pub fn reference_quadratic() -> PolynomialModel {
    reference_model(vec![173.1836, -0.0664, 6.3902e-6])
}

/// Reference degree-3 model:
/// t = 203.1861 - 0.1286 P + 2.9231e-5 P^2 - 2.1012e-9 P^3.
pub fn reference_cubic() -> PolynomialModel {
    reference_model(vec![203.1861, -0.1286, 2.9231e-5, -2.1012e-9])
}

/// Reference model by label; `None` for anything but
/// `linear`/`quadratic`/`cubic`.
pub fn reference_by_label(label: &str) -> Option<PolynomialModel> {
    match label {
        "linear" => Some(reference_linear()),
        "quadratic" => Some(reference_quadratic()),
        "cubic" => Some(reference_cubic()),
        _ => None,
    }
}
