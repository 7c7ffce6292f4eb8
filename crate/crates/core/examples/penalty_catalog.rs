//! The six penalty families, their equivalence constants and assumption checks.

use handsoff::{Penalty, PenaltyKind};

fn main() {
    let specs = [
        "lp p=0.5 lambda=0.8",
        "mcp lambda=1 alpha=0.5",
        "mcp lambda=2 alpha=0.25",
        "scad lambda=0.25 alpha=3",
        "lsp unit=0.1 alpha=0.000001",
        "capped_l1 lambda=0.8 alpha=0.5",
        "l1l2 lambda=0.1",
        // Violations.
        "l1l2 lambda=1.0",
        "capped_l1 lambda=0.8 alpha=1.0",
        "scad lambda=1.5 alpha=3",
    ];
    for spec in specs {
        match spec.parse::<Penalty>() {
            Ok(pen) => {
                let rep = pen.validate_assumption(1000);
                let c = pen.equivalence_constant().map(|c| format!("{c:.4}")).unwrap_or("-".into());
                println!(
                    "{:<34} c = {:<8} psi(0.5) = {:.4}  {}",
                    spec,
                    c,
                    pen.psi(0.5),
                    if rep.passed { "ok".to_string() } else { format!("violates {:?}", rep.violated) }
                );
            }
            Err(e) => println!("{spec:<34} rejected: {e}"),
        }
    }
    println!();
    for kind in PenaltyKind::ALL {
        println!("{:<10} {}", kind.name(), kind.admissible_range());
    }
}
