// Hard-sphere and tabulated cross-sections, and the Grad cutoff check.

use std::f64::consts::FRAC_PI_2;

use boltzslab::cross_section::{AngularFactor, CrossSectionModel};

pub fn run_example() -> boltzslab::Result<()> {
    let hs = CrossSectionModel::hard_sphere();
    println!(
        "{}: gamma {}, B(2, pi/4) = {:.6}",
        hs.name(),
        hs.gamma(),
        hs.evaluate_b(2.0, FRAC_PI_2 / 2.0)?
    );

    let theta: Vec<f64> = (0..=32).map(|i| FRAC_PI_2 * i as f64 / 32.0).collect();
    // A softer angular law, 0.8 cos θ sin² θ.
    let beta = theta
        .iter()
        .map(|t| 0.8 * t.cos() * t.sin() * t.sin())
        .collect();
    let table = AngularFactor::tabulated(theta, beta)?;
    let soft = CrossSectionModel::new("table", 0.5, table, 1.0)?;
    let cutoff = soft.check_grad_cutoff(2048);
    println!(
        "{}: gamma {}, cutoff satisfied {} (max beta/(cos sin) = {:.4})",
        soft.name(),
        soft.gamma(),
        cutoff.satisfied,
        cutoff.max_ratio
    );

    let too_wide = AngularFactor::Custom(std::sync::Arc::new(|t: f64| t.sin()));
    match CrossSectionModel::new("no cutoff", 1.0, too_wide, 5.0) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
