// The exponential integral E1: both evaluation branches, the two-sided
// bound and the validation table against quadrature.

use boltzslab::special::{e1_bounds, e1_quadrature, e1_validation, exp_integral_e1};

pub fn run_example() -> boltzslab::Result<()> {
    println!(
        "{:>10} {:>22} {:>18} {:>22}",
        "x", "E1(x)", "branch", "lower/upper"
    );
    for x in [1e-6, 1e-2, 0.5, 1.0, 3.0, 20.0] {
        let r = exp_integral_e1(x)?;
        let (lo, hi) = e1_bounds(x)?;
        let q = e1_quadrature(x)?;
        assert!((r.value - q.value).abs() <= 1e-10 * q.value);
        println!(
            "{x:>10.1e} {:>22.15e} {:>18} {lo:>10.3e}/{hi:.3e}",
            r.value,
            format!("{:?}", r.branch)
        );
    }
    let rows = e1_validation(1000, 1e-6, 50.0)?;
    let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    println!("1000 samples on [1e-6, 50]: worst relative error {worst:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
