//! The bundled acceptance run: the ten library-level checks plus the report
//! determinism check, which lives here because the JSON layer does.

use matconvex::criteria::MatrixKind;
use matconvex::interval::Interval;
use matconvex::selftest::{run_all, CheckOutcome, SelftestConfig};

use crate::report::CheckRow;
use crate::{run_classify, run_gap_search};

/// Criterion 11: rerunning the criterion-3 classify report and the
/// criterion-10 gap-search report with the same seed yields byte-identical
/// JSON, wall time excluded.
pub fn criterion_11_determinism(seed: u64) -> CheckOutcome {
    let run = || -> matconvex::Result<(bool, String)> {
        let classify = |s| {
            run_classify(
                "poly[0,0,0,1] on (0.1,4)",
                2,
                MatrixKind::Convex,
                129,
                1000,
                20,
                1e-8,
                s,
            )
        };
        let a = classify(seed)?.report.to_json_without_wall();
        let b = classify(seed)?.report.to_json_without_wall();
        if a != b {
            return Ok((false, "classify reports differ between reruns".into()));
        }
        let interval = Interval::open(0.1, 2.0)?;
        let g1 = run_gap_search(1, 3, interval, seed)?.to_json_without_wall();
        let g2 = run_gap_search(1, 3, interval, seed)?.to_json_without_wall();
        if g1 != g2 {
            return Ok((false, "gap-search reports differ between reruns".into()));
        }
        Ok((
            true,
            format!(
                "classify ({} bytes) and gap-search ({} bytes) reports byte-identical",
                a.len(),
                g1.len()
            ),
        ))
    };
    match run() {
        Ok((passed, detail)) => CheckOutcome {
            id: 11,
            name: "report determinism (byte-identical JSON)",
            passed,
            detail,
        },
        Err(err) => CheckOutcome {
            id: 11,
            name: "report determinism (byte-identical JSON)",
            passed: false,
            detail: format!("error: {err}"),
        },
    }
}

/// All acceptance checks. Returns the rows and whether everything passed.
pub fn run(seed: u64) -> (Vec<CheckRow>, bool) {
    let cfg = SelftestConfig::with_seed(seed);
    let mut outcomes = run_all(&cfg);
    outcomes.push(criterion_11_determinism(seed));
    let all_passed = outcomes.iter().all(|o| o.passed);
    (outcomes.iter().map(CheckRow::new).collect(), all_passed)
}
