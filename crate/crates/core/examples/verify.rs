// Defect forms of the shift: `(1+z)/2` gives a strict 2-isometry, `b = 0`
// the isometric shift of H².

use hbspace::{isometry, HbSpace, Poly, RationalFn, Result, Settings};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    for (name, b) in [
        ("0", RationalFn::zero()),
        ("(1+z)/2", RationalFn::from_poly(Poly::from_real(&[0.5, 0.5]))),
        ("((1+z)/2)^2", RationalFn::from_poly(Poly::from_real(&[0.25, 0.5, 0.25]))),
    ] {
        let space = HbSpace::new(b, Settings::default())?;
        let r = isometry::verify(&space, 6, 10)?;
        out += &format!("b = {name}: strict order {:?}\n", r.strict_order);
        for (m, res) in r.orders_tested.iter().zip(&r.max_form_residual) {
            out += &format!("  β_{m}: {res:.2e}\n");
        }
        out += &format!("  annihilation {:?}\n", r.annihilation_residuals.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>());
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
