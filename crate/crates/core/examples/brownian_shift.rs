// The Brownian shift of covariance σ is the shift on `H(b)` with
// `b = γz/(1 - βz)`. Its norm identities and 2-isometry order.

use hbspace::{isometry, model, HbSpace, Result, Settings, Truncation};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    for sigma in [0.5, 1.0, 2.0] {
        let b = model::brownian_shift_b(sigma)?;
        let space = HbSpace::new(b, Settings::default())?;
        let norms = space.norm_identities_check(Truncation::auto())?;
        let order = isometry::isometry_order(&space, 6, 10)?;
        out += &format!(
            "σ = {sigma}: ‖b‖² = {:.6} (diff {:.1e}), ‖Lb‖² = {:.6} (diff {:.1e}), order {:?}\n",
            norms.norm_b_sq_closed,
            norms.norm_b_sq_diff,
            norms.norm_lb_sq_closed,
            norms.norm_lb_sq_diff,
            order.map(|o| o.0)
        );
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
