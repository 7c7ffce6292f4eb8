//! Exhaustive search over ternary grid signals versus DCA on planted instances.
//!
//! DCA is a local method, so it may land on a longer support than the
//! oracle; it may also beat the oracle with a fractional sample, which the
//! ternary search cannot represent.

use handsoff::{
    bang_off_bang_deviation,    brute_force_l0, build_discrete, run_dca, ControlSignal, DcaConfig, LinearSystem,
    make_exact_instance, Matrix, Penalty,
};

fn main() -> handsoff::Result<()> {
    let lag = LinearSystem::new(
        Matrix::from_rows(&[[-0.5, 1.0], [0.0, -1.0]])?,
        Matrix::from_rows(&[[0.0], [1.0]])?,
    )?;
    let systems = [("double integrator", LinearSystem::double_integrator()), ("cascaded lag", lag)];
    let planted = [
        vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0],
    ];
    let pen = Penalty::l1l2(0.1)?;
    for (name, sys) in &systems {
        for p in &planted {
            let sig = ControlSignal::scalar(0.5, p)?;
            let problem = make_exact_instance(sys, 4.0, 8, &sig)?;
            let dp = build_discrete(&problem, 8)?;
            let bf = brute_force_l0(&dp, 1e-8)?;
            let res = run_dca(&dp, &pen, &DcaConfig::default())?;
            println!(
                "{name:<18} planted {:?}: oracle {:?} ({} minimizers of {} candidates), DCA {:.2}{}",
                p.iter().map(|v| *v as i8).collect::<Vec<_>>(),
                bf.min_l0,
                bf.minimizers.len(),
                bf.candidates,
                res.l0,
                if bang_off_bang_deviation(&res.u_star) > 1e-6 { " (fractional)" } else { "" }
            );
        }
    }
    Ok(())
}
