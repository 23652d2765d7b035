//! Pythagorean mates of rational `b`, inner/outer splitting and boundary
//! vanishing orders.
//!
//! The mate is computed by Fejér–Riesz root pairing: with `b = p/q`, the
//! Laurent polynomial `|q|^2 - |p|^2` on the circle is lifted to an
//! ordinary polynomial of degree `2d`, its roots are paired `ζ ↔ 1/conj(ζ)`
//! and the member outside the closed disk is kept. Roots on the circle come
//! in clusters of even multiplicity and contribute half of it.

use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::poly::{Poly, C64, ONE, ZERO};
use crate::rational::RationalFn;
use crate::roots::{self, RootCluster};
use crate::{HbError, Result};

/// A zero of the mate on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryZero {
    /// The point `conj(λ)` on the circle where `a` vanishes.
    pub lambda: C64,
    pub mult: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MateResult {
    pub a: RationalFn,
    pub boundary_zeros: Vec<BoundaryZero>,
    /// `max | |a|^2 + |b|^2 - 1 |` over the circle grid.
    pub residual: f64,
}

/// `e^{2πik/n}` for `k = 0..n`.
pub fn circle_grid(n: usize) -> impl Iterator<Item = C64> {
    (0..n).map(move |k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
}

pub fn sup_on_circle(f: &RationalFn, grid: usize) -> f64 {
    circle_grid(grid).map(|z| f.eval(z).norm()).fold(0.0, f64::max)
}

/// Laurent coefficients `c_k`, `k = -d..=d`, of `|q|^2 - |p|^2` on the circle,
/// stored at index `k + d`.
fn defect_laurent(p: &Poly, q: &Poly) -> (Vec<C64>, usize) {
    let d = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0));
    let mut c = vec![ZERO; 2 * d + 1];
    for k in -(d as isize)..=(d as isize) {
        let mut acc = ZERO;
        for j in 0..=d as isize {
            let i = j + k;
            if i < 0 || i > d as isize {
                continue;
            }
            let (i, j) = (i as usize, j as usize);
            acc += q.coeff(i) * q.coeff(j).conj() - p.coeff(i) * p.coeff(j).conj();
        }
        c[(k + d as isize) as usize] = acc;
    }
    (c, d)
}

fn check_unit_ball(b: &RationalFn, s: &Settings) -> Result<()> {
    let sup = sup_on_circle(b, s.grid);
    if sup > 1.0 + 10.0 * s.tol.mate {
        return Err(HbError::NotInUnitBall { sup });
    }
    Ok(())
}

/// True unless `1 - |b|^2` vanishes identically on the circle.
pub fn is_nonextreme(b: &RationalFn, s: &Settings) -> Result<bool> {
    check_unit_ball(b, s)?;
    let (c, _) = defect_laurent(b.num(), b.den());
    let scale = b.den().norm_sq().max(b.num().norm_sq()).max(f64::MIN_POSITIVE);
    Ok(c.iter().any(|x| x.norm() > s.tol.mate * scale))
}

pub fn mate_residual(a: &RationalFn, b: &RationalFn, grid: usize) -> f64 {
    circle_grid(grid)
        .map(|z| (a.eval(z).norm_sqr() + b.eval(z).norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// The outer function `a` with `a(0) > 0` and `|a|^2 + |b|^2 = 1` on the circle.
pub fn pythagorean_mate(b: &RationalFn, s: &Settings) -> Result<MateResult> {
    let b = b.reduce(s.tol.gcd, &s.roots)?;
    if let Some(pole) = b
        .poles(&s.roots)?
        .into_iter()
        .find(|p| p.norm() <= 1.0 + s.tol.boundary)
    {
        return Err(HbError::PoleInDisk(pole));
    }
    if !is_nonextreme(&b, s)? {
        return Err(HbError::Extreme);
    }
    let (p, q) = (b.num(), b.den());
    let (c, d) = defect_laurent(p, q);
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    for k in 0..=d {
        if (c[d + k] - c[d - k].conj()).norm() > s.tol.mate * scale {
            return Err(HbError::Factorization(
                "Laurent coefficients are not conjugate-symmetric".into(),
            ));
        }
    }
    let density = |z: C64| q.eval(z).norm_sqr() - p.eval(z).norm_sqr();
    let min = roots_grid_min(&density, s.grid);
    if min < -s.tol.mate {
        return Err(HbError::NegativeDensity { min });
    }

    // z^d (|q|^2 - |p|^2); zeros at the origin pair with zeros at infinity
    let mut lifted = c.clone();
    let zeros_at_origin = lifted
        .iter()
        .take_while(|x| x.norm() <= 1e-15 * scale)
        .count();
    for k in 0..zeros_at_origin {
        lifted[k] = ZERO;
        lifted[2 * d - k] = ZERO;
    }
    let lifted = Poly::new(lifted[zeros_at_origin..].to_vec());
    let half = d - zeros_at_origin;

    let mut kept = Vec::with_capacity(half);
    let mut boundary_zeros = Vec::new();
    if half > 0 {
        let clusters = roots::root_clusters(&lifted, &s.roots)?;
        let mut inside = 0;
        for RootCluster {
            center,
            multiplicity,
        } in clusters
        {
            let modulus = center.norm();
            if (modulus - 1.0).abs() <= 10.0 * s.tol.boundary {
                if multiplicity % 2 != 0 {
                    return Err(HbError::Factorization(format!(
                        "odd multiplicity {multiplicity} on the circle at {center}"
                    )));
                }
                let lambda = center / modulus;
                kept.extend(std::iter::repeat_n(lambda, multiplicity / 2));
                boundary_zeros.push(BoundaryZero {
                    lambda,
                    mult: multiplicity / 2,
                });
            } else if modulus > 1.0 {
                kept.extend(std::iter::repeat_n(center, multiplicity));
            } else {
                inside += multiplicity;
            }
        }
        let outside = kept.len() - boundary_zeros.iter().map(|z| z.mult).sum::<usize>();
        if outside != inside || kept.len() != half {
            return Err(HbError::Factorization(format!(
                "root pairing failed: {outside} outside vs {inside} inside, {} kept of {half}",
                kept.len()
            )));
        }
    }
    let monic = Poly::from_roots(&kept, ONE);

    // |C|^2 by least squares on the grid
    let (mut num, mut den) = (0.0, 0.0);
    for z in circle_grid(s.grid) {
        let r = monic.eval(z).norm_sqr();
        num += density(z) * r;
        den += r * r;
    }
    let lead = (num / den).sqrt();
    let r = monic.scale_real(lead);

    let a = RationalFn::new(r, q.clone())?.reduce(s.tol.gcd, &s.roots)?;
    let a0 = a.eval(ZERO);
    if a0.norm() <= s.tol.pole {
        return Err(HbError::Factorization("a(0) = 0".into()));
    }
    let a = a.scale(a0.conj() / a0.norm());
    let residual = mate_residual(&a, &b, s.grid);
    Ok(MateResult {
        a,
        boundary_zeros,
        residual,
    })
}

fn roots_grid_min(f: &dyn Fn(C64) -> f64, grid: usize) -> f64 {
    circle_grid(grid).map(f).fold(f64::INFINITY, f64::min)
}

/// `(z - α) / (1 - conj(α) z)`.
pub fn blaschke_factor(alpha: C64) -> RationalFn {
    RationalFn::new(Poly::linear(alpha), Poly::new(vec![ONE, -alpha.conj()]))
        .expect("nonzero denominator")
}

/// Finite Blaschke product over `zeros` (with repetition).
pub fn blaschke_product(zeros: &[C64]) -> RationalFn {
    let num = Poly::from_roots(zeros, ONE);
    let den = zeros
        .iter()
        .fold(Poly::one(), |acc, a| &acc * &Poly::new(vec![ONE, -a.conj()]));
    RationalFn::new(num, den).expect("nonzero denominator")
}

/// Factor `f = inner * outer` with `inner` the Blaschke product over the
/// zeros of `f` in the open disk.
pub fn inner_outer(f: &RationalFn, s: &Settings) -> Result<(RationalFn, RationalFn)> {
    if f.is_zero() {
        return Err(HbError::ZeroFunction);
    }
    if let Some(pole) = f.poles(&s.roots)?.into_iter().find(|p| p.norm() <= 1.0) {
        return Err(HbError::PoleInDisk(pole));
    }
    let zeros = interior_zeros(f.num(), s)?;
    let inner = blaschke_product(&zeros);
    let mut num = f.num().clone();
    for &alpha in &zeros {
        num = num.deflate(alpha).0;
        num = &num * &Poly::new(vec![ONE, -alpha.conj()]);
    }
    let outer = RationalFn::new(num, f.den().clone())?;
    Ok((inner, outer))
}

/// Zeros of `p` in the open disk, with multiplicity.
pub fn interior_zeros(p: &Poly, s: &Settings) -> Result<Vec<C64>> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let clusters = roots::root_clusters(p, &s.roots)?;
    Ok(clusters
        .into_iter()
        .filter(|c| c.center.norm() < 1.0 - 10.0 * s.tol.boundary)
        .flat_map(|c| std::iter::repeat_n(c.center, c.multiplicity))
        .collect())
}

/// Number of leading derivatives of `f` vanishing at the boundary point.
pub fn boundary_order(f: &RationalFn, lambda: C64, s: &Settings) -> Result<usize> {
    if (lambda.norm() - 1.0).abs() > s.tol.mate.max(1e-12) * 10.0 {
        return Err(HbError::InvalidArgument(format!(
            "boundary point {lambda} is not on the unit circle"
        )));
    }
    f.eval_checked(lambda, s.tol.pole)?;
    if f.is_zero() {
        return Err(HbError::ZeroFunction);
    }
    let (t, scale) = roots::taylor_with_scale(f.num(), lambda);
    Ok(t.iter()
        .zip(&scale)
        .take_while(|(c, sc)| c.norm() <= s.tol.boundary * sc.max(f64::MIN_POSITIVE))
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(num: &[f64], den: &[f64]) -> RationalFn {
        RationalFn::new(Poly::from_real(num), Poly::from_real(den)).unwrap()
    }

    #[test]
    fn extreme_points() {
        let s = Settings::default();
        assert!(!is_nonextreme(&rf(&[0.0, 1.0], &[1.0]), &s).unwrap());
        assert!(is_nonextreme(&rf(&[0.5, 0.5], &[1.0]), &s).unwrap());
        // (z - 1/2)/(1 - z/2): unimodular on 64 grid points, and extreme
        let blaschke = rf(&[-0.5, 1.0], &[1.0, -0.5]);
        for z in circle_grid(64) {
            assert!((blaschke.eval(z).norm() - 1.0).abs() < 1e-14);
        }
        assert!(!is_nonextreme(&blaschke, &s).unwrap());
        assert!(matches!(
            is_nonextreme(&rf(&[0.0, 2.0], &[1.0]), &s),
            Err(HbError::NotInUnitBall { .. })
        ));
    }

    #[test]
    fn mate_of_half_one_plus_z() {
        let s = Settings::default();
        let m = pythagorean_mate(&rf(&[0.5, 0.5], &[1.0]), &s).unwrap();
        assert!(m.a.rel_distance(&rf(&[0.5, -0.5], &[1.0])) < 1e-12, "{:?}", m.a);
        assert_eq!(m.boundary_zeros.len(), 1);
        assert_eq!(m.boundary_zeros[0].mult, 1);
        assert!((m.boundary_zeros[0].lambda - ONE).norm() < 1e-12);
        assert!(m.residual < 1e-12);
    }

    #[test]
    fn mate_of_zero_and_of_half_z() {
        let s = Settings::default();
        let m = pythagorean_mate(&RationalFn::zero(), &s).unwrap();
        assert!((m.a.eval(C64::new(0.3, 0.2)) - ONE).norm() < 1e-15);
        let m = pythagorean_mate(&rf(&[0.0, 0.5], &[1.0]), &s).unwrap();
        assert!(m.boundary_zeros.is_empty());
        assert!(m.a.is_polynomial() && m.a.num().degree() == Some(0));
        assert!((m.a.eval(ZERO).re - 3f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn extreme_input_is_rejected() {
        let s = Settings::default();
        assert!(matches!(
            pythagorean_mate(&rf(&[0.0, 1.0], &[1.0]), &s),
            Err(HbError::Extreme)
        ));
    }

    #[test]
    fn inner_outer_examples() {
        let s = Settings::default();
        let (i, o) = inner_outer(&rf(&[1.0], &[1.0]), &s).unwrap();
        assert!(i.rel_distance(&rf(&[1.0], &[1.0])) < 1e-15);
        assert!(o.rel_distance(&rf(&[1.0], &[1.0])) < 1e-15);

        let (i, o) = inner_outer(&rf(&[0.0, 0.5, 0.5], &[1.0]), &s).unwrap();
        assert!(i.rel_distance(&rf(&[0.0, 1.0], &[1.0])) < 1e-14);
        assert!(o.rel_distance(&rf(&[0.5, 0.5], &[1.0])) < 1e-14);

        // (z - 1/2)(z + 2)
        let f = RationalFn::from_poly(&Poly::from_real(&[-0.5, 1.0]) * &Poly::from_real(&[2.0, 1.0]));
        let (i, o) = inner_outer(&f, &s).unwrap();
        assert!(i.rel_distance(&rf(&[-0.5, 1.0], &[1.0, -0.5])) < 1e-13);
        let expect = &Poly::from_real(&[1.0, -0.5]) * &Poly::from_real(&[2.0, 1.0]);
        assert!(o.rel_distance(&RationalFn::from_poly(expect)) < 1e-13);
        for z in circle_grid(256) {
            assert!((i.eval(z).norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_orders() {
        let s = Settings::default();
        let sq = RationalFn::from_poly(Poly::linear(ONE).powi(2));
        assert_eq!(boundary_order(&sq, ONE, &s).unwrap(), 2);
        assert_eq!(boundary_order(&rf(&[0.5, 0.5], &[1.0]), ONE, &s).unwrap(), 0);
        assert_eq!(boundary_order(&rf(&[0.0, -1.0, 1.0], &[1.0]), ONE, &s).unwrap(), 1);
    }
}
