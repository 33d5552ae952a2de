//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use biphoton::acceptance::{evaluate, measure, Bound, Criterion, Setup};

use Bound::{Absolute, Below, Relative};

/// (criterion, check label, bound). Kept here so that a change to the library
/// tolerances shows up as a test failure.
const PINNED: &[(usize, &str, Bound)] = &[
    (
        1,
        "fwhm_ns",
        Relative {
            target: 180.0,
            tol: 0.15,
        },
    ),
    (
        1,
        "linewidth_khz",
        Relative {
            target: 960.0,
            tol: 0.15,
        },
    ),
    (1, "runtime_s", Below { limit: 10.0 }),
    (
        2,
        "fwhm_ns",
        Relative {
            target: 100.0,
            tol: 0.20,
        },
    ),
    (
        2,
        "linewidth_khz",
        Relative {
            target: 1600.0,
            tol: 0.20,
        },
    ),
    (
        3,
        "brightness",
        Relative {
            target: 3.8e5,
            tol: 0.05,
        },
    ),
    (
        3,
        "fraction",
        Absolute {
            target: 0.24,
            tol: 0.02,
        },
    ),
    (
        4,
        "pair_rate",
        Relative {
            target: 4.0e3,
            tol: 0.05,
        },
    ),
    (4, "runtime_s", Below { limit: 60.0 }),
    (
        5,
        "sbr_low_od",
        Absolute {
            target: 12.0,
            tol: 3.0,
        },
    ),
    (
        5,
        "sbr_high_od",
        Absolute {
            target: 3.1,
            tol: 1.0,
        },
    ),
    (
        5,
        "success_high_od_pct",
        Absolute {
            target: 3.4,
            tol: 0.7,
        },
    ),
    (
        5,
        "success_low_od_pct",
        Absolute {
            target: 2.0,
            tol: 0.5,
        },
    ),
    (6, "rate_residual", Below { limit: 1e-6 }),
    (
        6,
        "background_exponent",
        Absolute {
            target: 2.0,
            tol: 0.05,
        },
    ),
    (6, "sbr_residual", Below { limit: 0.05 }),
    (6, "linewidth_residual", Below { limit: 0.05 }),
    (6, "brightness_residual", Below { limit: 0.05 }),
    (6, "s_residual", Below { limit: 0.05 }),
    (
        6,
        "sweep_records",
        Absolute {
            target: 40.0,
            tol: 0.0,
        },
    ),
    (
        7,
        "ratio",
        Absolute {
            target: 3.56,
            tol: 0.05,
        },
    ),
    (8, "max_rel_dev", Below { limit: 0.10 }),
    (9, "parseval", Below { limit: 1e-6 }),
    (9, "hermite_vs_adaptive", Below { limit: 1e-8 }),
    (9, "fit_round_trip", Below { limit: 1e-6 }),
    (
        10,
        "g2_thermal",
        Absolute {
            target: 2.0,
            tol: 0.1,
        },
    ),
    (10, "z_poisson_as", Below { limit: 4.0 }),
    (10, "z_poisson_s", Below { limit: 4.0 }),
    (11, "collinear_rad", Below { limit: 1e-6 }),
    (
        11,
        "copropagating_rad",
        Relative {
            target: 0.91,
            tol: 0.25,
        },
    ),
    (
        11,
        "counter_rad",
        Relative {
            target: 3.7,
            tol: 0.25,
        },
    ),
];

fn pinned_matches(criteria: &[Criterion]) -> Vec<String> {
    let mut problems = Vec::new();
    let actual: Vec<(usize, &str, Bound)> = criteria
        .iter()
        .flat_map(|c| {
            c.checks
                .iter()
                .map(move |k| (c.id, k.label.as_str(), k.bound))
        })
        .collect();
    if actual.len() != PINNED.len() {
        problems.push(format!("{} checks, {} pinned", actual.len(), PINNED.len()));
    }
    for (id, label, bound) in PINNED {
        match actual.iter().find(|a| a.0 == *id && a.1 == *label) {
            Some(a) if a.2 == *bound => {}
            Some(a) => problems.push(format!("{id} {label}: bound {} != pinned {bound}", a.2)),
            None => problems.push(format!("{id} {label}: missing")),
        }
    }
    problems
}

#[test]
fn acceptance() {
    let m = measure(&Setup::default()).expect("measurements");
    let criteria = evaluate(&m);
    let drift = pinned_matches(&criteria);
    assert!(drift.is_empty(), "tolerances changed: {drift:#?}");

    println!();
    for c in &criteria {
        println!("{}", c.line());
    }
    let failed: Vec<usize> = criteria
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.id)
        .collect();
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
