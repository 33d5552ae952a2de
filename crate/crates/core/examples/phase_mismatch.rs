//! Phase mismatch of co- and counter-propagating geometries under beam jitter.

use biphoton::model::{average_mismatch, phase_mismatch, BeamGeometry, BeamTilts, JitterModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, g) in [
        ("copropagating", BeamGeometry::copropagating()),
        ("counter-propagating", BeamGeometry::counter_propagating()),
    ] {
        let aligned = phase_mismatch(&g, &BeamTilts::default())?;
        println!("{name}: aligned {aligned:.3e} rad");
        for model in [JitterModel::IndependentTilts, JitterModel::PhotonModeCone] {
            let m = average_mismatch(&g, model, 100_000, 1)?;
            println!(
                "  {model:?}: <|dphi|> = {:.4} ± {:.4} rad",
                m.mean_abs, m.std_err
            );
        }
    }
    Ok(())
}
