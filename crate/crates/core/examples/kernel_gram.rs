// Kernels, plus-functions and Gram matrices in `H(b)` for `b = (1+z)/2`.

use hbspace::{C64, HbSpace, Poly, RationalFn, Result, Settings};

pub fn run_example() -> Result<String> {
    let b = RationalFn::from_poly(Poly::from_real(&[0.5, 0.5]));
    let space = HbSpace::new(b, Settings::default())?;
    let mut out = String::new();

    let (l, z) = (C64::new(-0.5, 0.0), C64::new(0.0, 0.0));
    out += &format!("K_λ(z) at λ = -1/2, z = 0: {:.6}\n", space.kernel(l, z)?);

    let one = space.vector(Poly::one())?;
    out += &format!("1⁺ = {:?}, ‖1‖² = {:.6}\n", one.f_plus().coeffs(), one.norm_sq());

    let g = space.gram_matrix(4)?;
    out += "Gram matrix of 1, z, z², z³ (real parts):\n";
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:8.3}", g[(i, j)].re)).collect();
        out += &format!("  {}\n", row.join(""));
    }

    let f = Poly::from_real(&[1.0, -2.0, 0.5]);
    let k = space.kernel_poly(C64::new(0.3, 0.2), 64)?;
    let lam = C64::new(0.3, 0.2);
    out += &format!(
        "⟨f, K_λ⟩ = {:.10}, f(λ) = {:.10}\n",
        space.inner_product(&f, &k)?,
        f.eval(lam)
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
