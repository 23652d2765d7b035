// Three rank-one extensions from `b = 0`, checked as a strict 6-isometry.

use hbspace::model::{self, ExtensionParams};
use hbspace::{C64, Result, Settings};

pub fn run_example() -> Result<String> {
    let steps = [
        ExtensionParams::new(C64::new(1.0, 0.0), std::f64::consts::PI),
        ExtensionParams::new(C64::new(0.5, 0.5), 2.0),
        ExtensionParams::new(C64::new(-0.7, 0.3), 4.0),
    ];
    let m = model::build_model(&steps, true, &Settings::default())?;
    let mut out = String::new();
    for (i, e) in m.extensions.iter().enumerate() {
        out += &format!(
            "step {}: s = {:.6}, deg b = {}, certificate deviation {:.1e}, kernel check {:.1e}\n",
            i + 1,
            e.s,
            e.b_t.degree(),
            e.certificate.deviation(),
            model::kernel_factorization_check(e, 200, 1)
        );
    }
    let r = m.report.as_ref().expect("verified");
    out += &format!("strict order {:?}\n", r.strict_order);
    for z in m.space.boundary_zeros() {
        out += &format!("mate zero {:.6} of multiplicity {}\n", z.lambda, z.mult);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
