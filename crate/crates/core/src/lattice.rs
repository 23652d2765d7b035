//! Shift-invariant subspaces and cyclic vectors of `H(b)`.
//!
//! For rational nonextreme `b` whose mate vanishes at the circle points
//! `conj(λ_i)` with multiplicities `m_i`, the subspace generated by `f` is
//! generated by `prod (z - conj(λ_i))^{j_i} θ` where `θ` is the inner factor
//! of `f` and `j_i` is the vanishing order of `f` at `conj(λ_i)`, capped
//! at `m_i`. The principal-angle oracle checks such claims on truncated
//! shift orbits.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::poly::{binomial, Poly, C64};
use crate::rational::RationalFn;
use crate::space::HbSpace;
use crate::spectral;
use crate::{HbError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Zero,
    Full,
    Classified,
}

/// Vanishing order `j` of a generator at a mate zero of multiplicity `mult`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOrder {
    pub lambda: C64,
    pub j: usize,
    pub mult: usize,
    /// Order before capping at `mult`.
    pub raw_order: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceDescriptor {
    pub theta: RationalFn,
    pub theta_zeros: Vec<C64>,
    pub boundary_orders: Vec<BoundaryOrder>,
    pub form: Form,
}

impl SubspaceDescriptor {
    /// The generator `prod (z - conj(λ_i))^{j_i} θ`.
    pub fn canonical(&self) -> RationalFn {
        let p = self
            .boundary_orders
            .iter()
            .fold(Poly::one(), |acc, o| &acc * &Poly::linear(o.lambda).powi(o.j));
        self.theta.mul_poly(&p)
    }
}

/// Evidence for or against cyclicity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CyclicWitness {
    pub cyclic: bool,
    pub inner_zeros: Vec<C64>,
    /// `(conj(λ_i), f(conj(λ_i)))` at each mate boundary zero.
    pub boundary_values: Vec<(C64, C64)>,
}

/// `f = prod (z - conj(λ_i))^{m_i} g + p` with `deg p < sum m_i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub g: Option<RationalFn>,
    pub p: Option<Poly>,
    /// Relative size of the remainders discarded when dividing out the
    /// boundary factor.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceReport {
    /// `max(gap(f -> h), gap(h -> f))` in radians.
    pub distance: f64,
    /// Largest principal angle from `V_f^K` into `V_h^{2K}`.
    pub gap_f_into_h: f64,
    pub gap_h_into_f: f64,
    pub k: usize,
    pub trunc_degree: usize,
    pub tail_bound: f64,
}

pub fn classify(space: &HbSpace, f: &RationalFn) -> Result<SubspaceDescriptor> {
    let s = space.settings();
    let (theta, _) = spectral::inner_outer(f, s)?;
    let theta_zeros = spectral::interior_zeros(f.num(), s)?;
    let boundary_orders = space
        .boundary_zeros()
        .iter()
        .map(|bz| {
            let raw_order = spectral::boundary_order(f, bz.lambda, s)?;
            Ok(BoundaryOrder {
                lambda: bz.lambda,
                j: raw_order.min(bz.mult),
                mult: bz.mult,
                raw_order,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let form = if theta_zeros.is_empty() && boundary_orders.iter().all(|o| o.j == 0) {
        Form::Full
    } else {
        Form::Classified
    };
    Ok(SubspaceDescriptor {
        theta,
        theta_zeros,
        boundary_orders,
        form,
    })
}

/// Cyclic iff `f` is outer and nonzero at every mate boundary zero.
pub fn is_cyclic(space: &HbSpace, f: &RationalFn) -> Result<CyclicWitness> {
    let s = space.settings();
    if f.is_zero() {
        return Err(HbError::ZeroFunction);
    }
    let inner_zeros = spectral::interior_zeros(f.num(), s)?;
    let mut cyclic = inner_zeros.is_empty();
    let mut boundary_values = Vec::new();
    for bz in space.boundary_zeros() {
        let v = f.eval_checked(bz.lambda, s.tol.pole)?;
        if spectral::boundary_order(f, bz.lambda, s)? > 0 {
            cyclic = false;
        }
        boundary_values.push((bz.lambda, v));
    }
    Ok(CyclicWitness {
        cyclic,
        inner_zeros,
        boundary_values,
    })
}

/// Decide `f ∈ H(b)` for `f` analytic in the open disk.
pub fn membership(space: &HbSpace, f: &RationalFn) -> Result<Membership> {
    let s = space.settings();
    let circle = 10.0 * s.tol.boundary;
    let poles = f.poles(&s.roots)?;
    if let Some(&p) = poles.iter().find(|p| p.norm() < 1.0 - circle) {
        return Err(HbError::PoleInDisk(p));
    }
    if poles.iter().any(|p| p.norm() <= 1.0 + circle) {
        return Ok(Membership {
            member: false,
            g: None,
            p: None,
            residual: 0.0,
        });
    }
    let (p, g, residual) = boundary_split(f, space.boundary_zeros())?;
    Ok(Membership {
        member: true,
        g: Some(g),
        p: Some(p),
        residual,
    })
}

/// Hermite interpolation of `f` at the boundary zeros, then exact division
/// of `f - p` by the boundary factor.
fn boundary_split(f: &RationalFn, zeros: &[spectral::BoundaryZero]) -> Result<(Poly, RationalFn, f64)> {
    let m: usize = zeros.iter().map(|z| z.mult).sum();
    if m == 0 {
        return Ok((Poly::zero(), f.clone(), 0.0));
    }
    // rows: d^k/dz^k / k! of z^c at each point, matched to f's Taylor data
    let mut a = DMatrix::<C64>::zeros(m, m);
    let mut rhs = nalgebra::DVector::<C64>::zeros(m);
    let mut row = 0;
    for bz in zeros {
        let tn = f.num().taylor_at(bz.lambda);
        let td = f.den().taylor_at(bz.lambda);
        let tf = Poly::new(tn).series_div(&Poly::new(td), bz.mult);
        for (k, &t) in tf.iter().enumerate().take(bz.mult) {
            for c in k..m {
                a[(row, c)] = bz.lambda.powu((c - k) as u32) * binomial(c, k);
            }
            rhs[row] = t;
            row += 1;
        }
    }
    let coeffs = a.lu().solve(&rhs).ok_or(HbError::SingularSystem)?;
    let p = Poly::new(coeffs.iter().copied().collect());
    let mut num = f.num() - &(&p * f.den());
    let scale = num.max_abs().max(f64::MIN_POSITIVE);
    let mut residual: f64 = 0.0;
    for bz in zeros {
        for _ in 0..bz.mult {
            let (q, r) = num.deflate(bz.lambda);
            residual = residual.max(r.norm() / scale);
            num = q;
        }
    }
    Ok((p, RationalFn::new(num, f.den().clone())?, residual))
}

/// Cosines of the principal angles between `span A` and `span B`, given
/// `ga[(i,j)] = ⟨a_j, a_i⟩`, `gb` likewise and `cross[(i,j)] = ⟨b_j, a_i⟩`.
pub fn principal_cosines(ga: &DMatrix<C64>, gb: &DMatrix<C64>, cross: &DMatrix<C64>) -> Result<Vec<f64>> {
    let wa = whitener(ga)?;
    let wb = whitener(gb)?;
    let m = wa.adjoint() * cross * &wb;
    Ok(m.singular_values().iter().map(|s| s.min(1.0)).collect())
}

/// Principal angles in radians, largest first.
pub fn principal_angles(ga: &DMatrix<C64>, gb: &DMatrix<C64>, cross: &DMatrix<C64>) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = principal_cosines(ga, gb, cross)?
        .into_iter()
        .map(f64::acos)
        .collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// `W` with `W* G W = I`, via the Hermitian eigendecomposition.
fn whitener(g: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let herm = (g + g.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if max.is_nan() || max <= 0.0 || min < 1e-10 * max {
        return Err(HbError::RankDeficient {
            ratio: if max > 0.0 { min / max } else { 0.0 },
        });
    }
    let scale = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.sqrt().recip(), 0.0)));
    Ok(&eig.eigenvectors * scale)
}

fn vectors<'s>(space: &'s HbSpace, ps: Vec<Poly>) -> Result<Vec<crate::HbVector<'s>>> {
    ps.into_iter().map(|p| space.vector(p)).collect()
}

fn orbit(f: &Poly, k: usize) -> Vec<Poly> {
    (0..=k).map(|i| f.shift_by(i)).collect()
}

/// Largest principal angle between `V_f^k = span{z^i f : i <= k}` and its
/// best approximation in `V_h^l`.
pub fn orbit_gap(space: &HbSpace, f: &Poly, h: &Poly, k: usize, l: usize) -> Result<f64> {
    let vf = vectors(space, orbit(f, k))?;
    let vh = vectors(space, orbit(h, l))?;
    let ga = DMatrix::from_fn(vf.len(), vf.len(), |i, j| vf[j].inner(&vf[i]));
    let gb = DMatrix::from_fn(vh.len(), vh.len(), |i, j| vh[j].inner(&vh[i]));
    let cross = DMatrix::from_fn(vf.len(), vh.len(), |i, j| vh[j].inner(&vf[i]));
    let c = principal_cosines(&ga, &gb, &cross)?;
    Ok(c.into_iter().fold(1.0, f64::min).acos())
}

/// Distance between `[f]` and `[h]` seen through shift orbits: each
/// `K`-orbit is compared with the other generator's `2K`-orbit, and the
/// larger of the two largest principal angles is reported.
pub fn subspace_distance(space: &HbSpace, f: &RationalFn, h: &RationalFn, k: usize) -> Result<DistanceReport> {
    let trunc = space.settings().truncation;
    let ft = space.truncate(f, trunc)?;
    let ht = space.truncate(h, trunc)?;
    let a = orbit_gap(space, &ft.poly, &ht.poly, k, 2 * k)?;
    let b = orbit_gap(space, &ht.poly, &ft.poly, k, 2 * k)?;
    Ok(DistanceReport {
        distance: a.max(b),
        gap_f_into_h: a,
        gap_h_into_f: b,
        k,
        trunc_degree: ft.degree.max(ht.degree),
        tail_bound: ft.tail_bound.max(ht.tail_bound),
    })
}

/// `max(angle(h, V_f^K), angle(f, V_h^K))`: only the generators are
/// compared with the other orbit. Converges where [`subspace_distance`]
/// needs much longer orbits, e.g. when a boundary order above the mate's
/// multiplicity collapses.
pub fn generator_distance(space: &HbSpace, f: &Poly, h: &Poly, k: usize) -> Result<f64> {
    Ok(orbit_gap(space, h, f, 0, k)?.max(orbit_gap(space, f, h, 0, k)?))
}

/// Bases of `L_j = span{(z - conj(λ))^j, ..., (z - conj(λ))^(n-1)}` for
/// `j = 0..n`, when the mate has a single boundary zero of order `n`.
pub fn ladder_spaces(space: &HbSpace) -> Result<Vec<Vec<Poly>>> {
    match space.boundary_zeros() {
        [] => Ok(Vec::new()),
        [bz] => {
            let base = Poly::linear(bz.lambda);
            Ok((0..bz.mult)
                .map(|j| (j..bz.mult).map(|e| base.powi(e)).collect())
                .collect())
        }
        many => Err(HbError::MultipleBoundaryZeros(many.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ONE;
    use crate::Settings;

    fn half_one_plus_z() -> HbSpace {
        HbSpace::new(RationalFn::from_poly(Poly::from_real(&[0.5, 0.5])), Settings::default()).unwrap()
    }

    fn rp(c: &[f64]) -> RationalFn {
        RationalFn::from_poly(Poly::from_real(c))
    }

    #[test]
    fn classify_examples() {
        let s = half_one_plus_z();
        let d = classify(&s, &rp(&[1.0])).unwrap();
        assert_eq!(d.form, Form::Full);
        let d = classify(&s, &rp(&[-1.0, 1.0])).unwrap();
        assert_eq!(d.boundary_orders[0].j, 1);
        assert!(d.theta_zeros.is_empty());
        let d = classify(&s, &rp(&[0.0, 0.5, 0.5])).unwrap();
        assert_eq!(d.theta_zeros.len(), 1);
        assert!(d.theta_zeros[0].norm() < 1e-12);
        assert_eq!(d.boundary_orders[0].j, 0);
        let d = classify(&s, &rp(&[1.0, -2.0, 1.0])).unwrap();
        assert_eq!(d.boundary_orders[0].raw_order, 2);
        assert_eq!(d.boundary_orders[0].j, 1);
        assert!(matches!(classify(&s, &RationalFn::zero()), Err(HbError::ZeroFunction)));
    }

    #[test]
    fn cyclicity_examples() {
        let s = half_one_plus_z();
        assert!(is_cyclic(&s, &rp(&[0.5, 0.5])).unwrap().cyclic);
        assert!(!is_cyclic(&s, &rp(&[0.0, 1.0])).unwrap().cyclic);
        assert!(!is_cyclic(&s, &rp(&[-1.0, 1.0])).unwrap().cyclic);
    }

    #[test]
    fn membership_examples() {
        let s = half_one_plus_z();
        assert!(membership(&s, &rp(&[3.0, 1.0, -2.0])).unwrap().member);
        let pole = RationalFn::new(Poly::one(), Poly::from_real(&[1.0, -1.0])).unwrap();
        assert!(!membership(&s, &pole).unwrap().member);
        let inside = RationalFn::new(Poly::one(), Poly::from_real(&[1.0, -2.0])).unwrap();
        assert!(matches!(membership(&s, &inside), Err(HbError::PoleInDisk(_))));
        let theta = spectral::blaschke_factor(C64::new(0.3, 0.4));
        let m = membership(&s, &theta).unwrap();
        assert!(m.member && m.residual < 1e-12);
        let (g, p) = (m.g.unwrap(), m.p.unwrap());
        let z = C64::new(0.1, -0.6);
        let back = g.eval(z) * (z - ONE) + p.eval(z);
        assert!((back - theta.eval(z)).norm() < 1e-12);
    }

    #[test]
    fn distances() {
        let s = half_one_plus_z();
        let f = rp(&[-1.0, 1.0]);
        assert!(subspace_distance(&s, &f, &f, 12).unwrap().distance < 1e-6);
        let d = subspace_distance(&s, &f, &rp(&[1.0]), 12).unwrap();
        assert!(d.distance >= 0.3, "{d:?}");
        // [z - 1] has codimension one, so some orbit element is orthogonal to it
        assert!((d.gap_h_into_f - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
        assert!(d.gap_f_into_h < 1e-6);
    }

    #[test]
    fn collapse_of_boundary_order() {
        // [(z-1)^2] = [z-1] when the mate has a simple zero at 1; the
        // angle from z-1 to the orbit of (z-1)^2 is arcsin(1/sqrt(K+2))
        let s = half_one_plus_z();
        let (f, h) = (Poly::from_real(&[1.0, -2.0, 1.0]), Poly::from_real(&[-1.0, 1.0]));
        let mut last = f64::INFINITY;
        for k in [4, 8, 12, 16] {
            let d = generator_distance(&s, &f, &h, k).unwrap();
            let expect = (1.0 / ((k + 2) as f64).sqrt()).asin();
            assert!((d - expect).abs() < 1e-8, "{k}: {d}");
            assert!(d < last);
            last = d;
        }
        // with orbits of length K against 2K the gap stays at pi/4
        let d = subspace_distance(&s, &RationalFn::from_poly(f), &RationalFn::from_poly(h), 12).unwrap();
        assert!((d.gap_h_into_f - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
        assert!(d.gap_f_into_h < 1e-6);
    }

    #[test]
    fn ladder_examples() {
        let s = half_one_plus_z();
        let l = ladder_spaces(&s).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l[0], vec![Poly::one()]);
        let h2 = HbSpace::new(RationalFn::zero(), Settings::default()).unwrap();
        assert!(ladder_spaces(&h2).unwrap().is_empty());
    }

    #[test]
    fn principal_angles_of_coordinate_planes() {
        // e1 vs span{e1 cos t + e2 sin t} in C^2 with the identity metric
        let t: f64 = 0.4;
        let ga = DMatrix::from_element(1, 1, ONE);
        let gb = DMatrix::from_element(1, 1, ONE);
        let cross = DMatrix::from_element(1, 1, C64::new(t.cos(), 0.0));
        assert!((principal_angles(&ga, &gb, &cross).unwrap()[0] - t).abs() < 1e-12);
        let singular = DMatrix::from_element(2, 2, ONE);
        assert!(matches!(
            principal_angles(&singular, &gb, &DMatrix::zeros(2, 1)),
            Err(HbError::RankDeficient { .. })
        ));
    }
}
