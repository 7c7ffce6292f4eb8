use handsoff::{AssumptionTag, Error, Penalty, PenaltyKind};
use proptest::prelude::*;

const EPS: f64 = 1e-8;

fn catalog() -> Vec<Penalty> {
    vec![
        Penalty::lp(0.5, 0.8).unwrap(),
        Penalty::lp(0.3, 0.5).unwrap(),
        Penalty::mcp(1.0, 0.5).unwrap(),
        Penalty::mcp(2.0, 0.25).unwrap(),
        Penalty::scad(0.25, 3.0).unwrap(),
        Penalty::scad(0.5, 1.5).unwrap(),
        Penalty::lsp_normalized(0.1, 1e-6).unwrap(),
        Penalty::lsp(0.5, 0.3).unwrap(),
        Penalty::capped_l1(0.8, 0.5).unwrap(),
        Penalty::l1l2(0.1).unwrap(),
        Penalty::l1l2(0.6).unwrap(),
    ]
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| i as f64 / n as f64)
}

#[test]
fn psi_is_nonnegative_and_phi_is_convex() {
    for pen in catalog() {
        let pts: Vec<f64> = grid(10_000).collect();
        for &u in &pts {
            assert!(pen.psi(u) >= -1e-15, "{pen}: psi({u}) < 0");
            assert!((pen.psi(-u) - pen.psi(u)).abs() <= 1e-15);
        }
        for w in pts.windows(3).step_by(7) {
            let (a, b) = (w[0], w[2]);
            let mid = pen.phi(0.5 * (a + b));
            assert!(mid <= 0.5 * (pen.phi(a) + pen.phi(b)) + 1e-12, "{pen}: phi not convex near {a}");
        }
    }
}

#[test]
fn subgradient_matches_central_differences() {
    let h = 1e-6;
    for pen in catalog() {
        let kinks = pen.kinks();
        let mut checked = 0;
        for u in grid(1000).map(|u| 0.005 + 0.99 * u) {
            if kinks.iter().any(|k| (u - k).abs() < 1e-3) {
                continue;
            }
            let fd = (pen.phi(u + h) - pen.phi(u - h)) / (2.0 * h);
            let s = pen.phi_subgradient(u, EPS).unwrap();
            assert!((fd - s).abs() <= 1e-5 * s.abs().max(1.0), "{pen}: u = {u}, fd {fd}, s {s}");
            checked += 1;
        }
        assert!(checked >= 900, "{pen}: only {checked} smooth points");
    }
}

#[test]
fn subgradient_inequality_on_grid_pairs() {
    for pen in catalog() {
        let pts: Vec<f64> = grid(1000).collect();
        let slopes: Vec<f64> = pts.iter().map(|&u| pen.phi_subgradient(u, EPS).unwrap()).collect();
        let vals: Vec<f64> = pts.iter().map(|&u| pen.phi(u)).collect();
        for (i, &u) in pts.iter().enumerate() {
            for (j, &v) in pts.iter().enumerate() {
                let lower = vals[i] + slopes[i] * (v - u);
                // The Lp slope is clamped at 0, which only under-tilts it.
                assert!(vals[j] >= lower - 1e-9, "{pen}: u = {u}, u' = {v}");
            }
        }
    }
}

#[test]
fn catalog_satisfies_assumption() {
    for pen in catalog() {
        let rep = pen.validate_assumption(1000);
        assert!(rep.passed, "{pen}: {:?}", rep.violated);
        let c = pen.equivalence_constant().unwrap();
        assert!((c - (1.0 - pen.phi(1.0))).abs() <= 1e-15 && c > 0.0);
    }
}

#[test]
fn crafted_violations() {
    for pen in [Penalty::l1l2(1.0).unwrap(), Penalty::capped_l1(0.8, 1.0).unwrap()] {
        let rep = pen.validate_assumption(1000);
        assert!(!rep.passed);
        assert_eq!(rep.violated, vec![AssumptionTag::A3], "{pen}");
    }
    assert!(matches!(Penalty::scad(1.5, 3.0), Err(Error::Parameter { penalty: "scad", .. })));
    assert!(matches!(Penalty::l1l2(1.0).unwrap().equivalence_constant(), Err(Error::AssumptionViolated { .. })));
}

#[test]
fn display_round_trips() {
    for pen in catalog() {
        let back: Penalty = pen.to_string().parse().unwrap();
        assert_eq!(back, pen);
    }
    for kind in PenaltyKind::ALL {
        assert_eq!(kind.name().parse::<PenaltyKind>().unwrap(), kind);
    }
}

proptest! {
    #[test]
    fn mcp_psi_is_bounded_by_its_cap(lambda in 0.01f64..3.0, alpha in 0.01f64..3.0, u in -2.0f64..2.0) {
        let pen = Penalty::mcp(lambda, alpha).unwrap();
        prop_assert!(pen.psi(u) <= alpha * lambda * lambda / 2.0 + 1e-12);
        prop_assert!(pen.psi(u) <= lambda * u.abs() + 1e-12);
    }

    #[test]
    fn phi_plus_psi_is_abs(idx in 0usize..11, u in -1.0f64..1.0) {
        let pen = catalog()[idx];
        prop_assert!((pen.phi(u) + pen.psi(u) - u.abs()).abs() <= 1e-14);
    }
}
