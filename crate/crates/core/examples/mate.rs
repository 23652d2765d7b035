// Pythagorean mates of a few rational `b`.

use hbspace::{spectral, C64, Poly, RationalFn, Result, Settings};

pub fn run_example() -> Result<String> {
    let s = Settings::default();
    let cases = [
        ("(1+z)/2", RationalFn::from_poly(Poly::from_real(&[0.5, 0.5]))),
        ("z/2", RationalFn::from_poly(Poly::from_real(&[0.0, 0.5]))),
        ("((1+z)/2)^2", RationalFn::from_poly(Poly::from_real(&[0.25, 0.5, 0.25]))),
        ("z/(2-z)", RationalFn::new(Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[2.0, -1.0]))?),
    ];
    let mut out = String::new();
    for (name, b) in cases {
        let m = spectral::pythagorean_mate(&b, &s)?;
        out += &format!("b = {name}\n  a(0) = {:.6}, residual {:.1e}\n", m.a.eval(C64::new(0.0, 0.0)).re, m.residual);
        for z in &m.boundary_zeros {
            out += &format!("  a vanishes at {:.6} with multiplicity {}\n", z.lambda, z.mult);
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
