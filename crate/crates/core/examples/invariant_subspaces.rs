// Invariant subspaces and cyclic vectors for `b = (1+z)/2`.

use hbspace::{lattice, C64, HbSpace, Poly, RationalFn, Result, Settings};

pub fn run_example() -> Result<String> {
    let b = RationalFn::from_poly(Poly::from_real(&[0.5, 0.5]));
    let space = HbSpace::new(b, Settings::default())?;
    let one = RationalFn::from_poly(Poly::one());
    let mut out = String::new();
    let cases = [
        ("1", Poly::one()),
        ("z - 1", Poly::from_real(&[-1.0, 1.0])),
        ("(z - 1)^2", Poly::from_real(&[1.0, -2.0, 1.0])),
        ("z - 1/2", Poly::from_real(&[-0.5, 1.0])),
        ("z + 3", Poly::from_real(&[3.0, 1.0])),
    ];
    for (name, p) in cases {
        let f = RationalFn::from_poly(p);
        let d = lattice::classify(&space, &f)?;
        let w = lattice::is_cyclic(&space, &f)?;
        let to_one = lattice::subspace_distance(&space, &f, &one, 12)?;
        let orders: Vec<usize> = d.boundary_orders.iter().map(|o| o.j).collect();
        let zeros: Vec<String> = d.theta_zeros.iter().map(|z: &C64| format!("{z:.3}")).collect();
        out += &format!(
            "f = {name}: {:?}, θ zeros {zeros:?}, boundary orders {orders:?}, cyclic {}, distance to [1] {:.3}\n",
            d.form, w.cyclic, to_one.distance
        );
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
