//! Machine-readable report schema (versioned, JSON). Same command and seed
//! produce byte-identical reports apart from the wall-time field; complex
//! matrices serialize as row-major arrays of `[re, im]` pairs so refutations
//! are independently replayable.

use serde::{Deserialize, Serialize};

use matconvex::criteria::{GridReport, PsdVerdict, RadiusRow, ScanReport};
use matconvex::hermitian::{DefinitionalReport, Witness};
use matconvex::polylab::GapCertificate;
use matconvex::selftest::CheckOutcome;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construct: Option<ConstructSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_search: Option<GapSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selftest: Option<Vec<CheckRow>>,
    pub wall_ms: f64,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            classify: None,
            power: None,
            scan: None,
            construct: None,
            gap_search: None,
            selftest: None,
            wall_ms: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the wall-time field zeroed, for determinism comparisons.
    pub fn to_json_without_wall(&self) -> String {
        let mut clone = self.clone();
        clone.wall_ms = 0.0;
        clone.to_json()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PointRow {
    pub t: f64,
    pub classification: String,
    pub min_eigenvalue: f64,
    pub minors: Vec<f64>,
    pub tolerance: f64,
}

impl PointRow {
    pub fn new(t: f64, v: &PsdVerdict) -> Self {
        Self {
            t,
            classification: v.classification.as_str().to_string(),
            min_eigenvalue: v.min_eigenvalue,
            minors: v.minors.clone(),
            tolerance: v.tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridRow {
    pub pass: bool,
    pub grid_size: usize,
    pub indefinite_points: usize,
    pub worst: PointRow,
}

impl GridRow {
    pub fn new(r: &GridReport) -> Self {
        Self {
            pass: r.pass,
            grid_size: r.grid_size,
            indefinite_points: r.indefinite_points,
            worst: PointRow::new(r.worst_t, &r.worst),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WitnessRow {
    pub kind: String,
    pub dim: usize,
    pub lambda: f64,
    pub gap_min_eigenvalue: f64,
    pub seed: u64,
    pub trial: u64,
    /// Row-major [re, im] entries.
    pub a: Vec<Vec<[f64; 2]>>,
    pub b: Vec<Vec<[f64; 2]>>,
}

impl WitnessRow {
    pub fn new(w: &Witness) -> Self {
        Self {
            kind: w.kind.as_str().to_string(),
            dim: w.a.dim(),
            lambda: w.lambda,
            gap_min_eigenvalue: w.gap_min_eigenvalue,
            seed: w.seed,
            trial: w.trial,
            a: w.a.to_re_im_rows(),
            b: w.b.to_re_im_rows(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DefinitionalRow {
    pub trials: u64,
    pub refuted: bool,
    pub worst_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRow>,
}

impl DefinitionalRow {
    pub fn new(r: &DefinitionalReport) -> Self {
        Self {
            trials: r.trials,
            refuted: r.refuted,
            worst_gap: r.worst_gap,
            witness: r.witness.as_ref().map(WitnessRow::new),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DividedRow {
    pub node_sets: usize,
    pub indefinite_sets: usize,
    pub worst: PointRow,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClassifySection {
    pub function: String,
    pub interval: String,
    pub n: usize,
    pub kind: String,
    pub tolerance: f64,
    pub derivative: GridRow,
    pub definitional: DefinitionalRow,
    pub divided_difference: DividedRow,
    pub verdict: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PowerSection {
    pub p: f64,
    pub is_2monotone: bool,
    pub is_2convex: bool,
    pub t_grid: Vec<f64>,
    pub monotone_determinants: Vec<f64>,
    pub convex_determinants: Vec<f64>,
    /// Largest relative deviation between closed forms and jet-built
    /// determinants over the grid.
    pub max_jet_deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanWitnessRow {
    pub t: f64,
    pub radius: f64,
    pub minors: Vec<f64>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RadiusCsvRow {
    pub radius: f64,
    pub worst_min_eigenvalue: f64,
    pub worst_determinant: f64,
}

impl RadiusCsvRow {
    fn new(r: &RadiusRow) -> Self {
        Self {
            radius: r.radius,
            worst_min_eigenvalue: r.worst_min_eigenvalue,
            worst_determinant: r.worst_determinant,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanSection {
    pub function: String,
    pub kind: String,
    pub radius_steps: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ScanWitnessRow>,
    pub rows: Vec<RadiusCsvRow>,
}

impl ScanSection {
    pub fn new(function: &str, kind: &str, radius_steps: u32, r: &ScanReport) -> Self {
        Self {
            function: function.to_string(),
            kind: kind.to_string(),
            radius_steps,
            witness: r.witness.as_ref().map(|w| ScanWitnessRow {
                t: w.t,
                radius: w.radius,
                minors: w.verdict.minors.clone(),
                min_eigenvalue: w.verdict.min_eigenvalue,
            }),
            rows: r.rows.iter().map(RadiusCsvRow::new).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConstructSection {
    pub n: usize,
    pub m: usize,
    pub interval: String,
    pub target: String,
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub grid_size: usize,
    /// Smallest minor-to-tolerance ratio across the verification grid.
    pub min_minor_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GapSection {
    pub n: usize,
    pub degree: usize,
    pub interval: String,
    pub coefficients: Vec<f64>,
    pub pass_grid: GridRow,
    pub pass_definitional: DefinitionalRow,
    pub fail_indefinite: PointRow,
    pub fail_witness: WitnessRow,
}

impl GapSection {
    pub fn new(cert: &GapCertificate) -> Self {
        Self {
            n: cert.n,
            degree: cert.polynomial.degree(),
            interval: cert.polynomial.interval().to_string(),
            coefficients: cert.polynomial.coeffs().to_vec(),
            pass_grid: GridRow::new(&cert.pass_grid),
            pass_definitional: DefinitionalRow::new(&cert.pass_definitional),
            fail_indefinite: PointRow::new(cert.fail_indefinite_t, &cert.fail_indefinite),
            fail_witness: WitnessRow::new(&cert.fail_witness),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRow {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckRow {
    pub fn new(c: &CheckOutcome) -> Self {
        Self {
            id: c.id,
            name: c.name.to_string(),
            passed: c.passed,
            detail: c.detail.clone(),
        }
    }
}
