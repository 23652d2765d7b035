//! The space `H(b)` for nonextreme rational `b`.
//!
//! Members are handled as polynomials. For such `f` the `H(b)` norm is
//! realized as `‖f‖²_b = ‖f‖²_{H²} + ‖f⁺‖²_{H²}` where `f⁺` is the unique
//! polynomial with `T_{conj a} f⁺ = T_{conj b} f`. Both Toeplitz operators
//! are upper triangular on coefficient vectors, so `f⁺` comes out of an
//! exact back-substitution that starts at the top coefficient.

use std::borrow::Cow;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::{Settings, Truncation};
use crate::poly::{binomial, Poly, C64, ONE, ZERO};
use crate::rational::RationalFn;
use crate::spectral::{self, BoundaryZero, MateResult};
use crate::{HbError, Result};

const TAYLOR_CACHE: usize = 256;

#[derive(Debug, Clone)]
pub struct HbSpace {
    b: RationalFn,
    mate: MateResult,
    degree: usize,
    norm_b_sq: f64,
    norm_lb_sq: f64,
    settings: Settings,
    /// Conjugated Taylor coefficients of `b` and `a`.
    b_conj: Vec<C64>,
    a_conj: Vec<C64>,
}

/// A polynomial member of `H(b)` with its plus-function.
#[derive(Debug, Clone)]
pub struct HbVector<'s> {
    space: &'s HbSpace,
    f: Poly,
    f_plus: Poly,
}

impl<'s> HbVector<'s> {
    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn f_plus(&self) -> &Poly {
        &self.f_plus
    }

    pub fn space(&self) -> &'s HbSpace {
        self.space
    }

    pub fn inner(&self, other: &HbVector<'_>) -> C64 {
        pair(&self.f, &other.f) + pair(&self.f_plus, &other.f_plus)
    }

    pub fn norm_sq(&self) -> f64 {
        self.f.norm_sq() + self.f_plus.norm_sq()
    }
}

/// A rational function cut down to its Taylor polynomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Truncated {
    pub poly: Poly,
    pub degree: usize,
    /// Geometric estimate of `sum_{k > degree} |c_k|`.
    pub tail_bound: f64,
}

/// Closed-form norms against their inner-product computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormReport {
    pub norm_b_sq_closed: f64,
    pub norm_b_sq_gram: f64,
    pub norm_b_sq_diff: f64,
    pub norm_lb_sq_closed: f64,
    pub norm_lb_sq_gram: f64,
    pub norm_lb_sq_diff: f64,
    pub trunc_degree: usize,
    pub tail_bound: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// H² pairing `sum f_k conj(g_k)`.
fn pair(f: &Poly, g: &Poly) -> C64 {
    f.coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| a * b.conj())
        .sum()
}

impl HbSpace {
    pub fn new(b: RationalFn, settings: Settings) -> Result<Self> {
        settings.tol.validate()?;
        let b = b.reduce(settings.tol.gcd, &settings.roots)?;
        let mate = spectral::pythagorean_mate(&b, &settings)?;
        if mate.residual > settings.tol.mate {
            return Err(HbError::Factorization(format!(
                "mate residual {:e} exceeds {:e}",
                mate.residual, settings.tol.mate
            )));
        }
        Ok(Self::from_parts(b, mate, settings))
    }

    /// Build from a precomputed mate.
    pub fn from_parts(b: RationalFn, mate: MateResult, settings: Settings) -> Self {
        let a0 = mate.a.eval(ZERO).re;
        let b0 = b.eval(ZERO);
        let conj = |v: Vec<C64>| v.into_iter().map(|c| c.conj()).collect();
        HbSpace {
            degree: b.degree(),
            norm_b_sq: a0.powi(-2) - 1.0,
            norm_lb_sq: 1.0 - b0.norm_sqr() - a0 * a0,
            b_conj: conj(b.taylor(TAYLOR_CACHE)),
            a_conj: conj(mate.a.taylor(TAYLOR_CACHE)),
            b,
            mate,
            settings,
        }
    }

    pub fn b(&self) -> &RationalFn {
        &self.b
    }

    pub fn a(&self) -> &RationalFn {
        &self.mate.a
    }

    pub fn mate(&self) -> &MateResult {
        &self.mate
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn boundary_zeros(&self) -> &[BoundaryZero] {
        &self.mate.boundary_zeros
    }

    /// Total multiplicity of the mate's zeros on the circle.
    pub fn boundary_multiplicity(&self) -> usize {
        self.mate.boundary_zeros.iter().map(|z| z.mult).sum()
    }

    /// `‖b‖²_b = a(0)^-2 - 1`.
    pub fn norm_b_sq(&self) -> f64 {
        self.norm_b_sq
    }

    /// `‖Lb‖²_b = 1 - |b(0)|² - a(0)²`.
    pub fn norm_lb_sq(&self) -> f64 {
        self.norm_lb_sq
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    fn coeffs_upto<'a>(&self, cache: &'a [C64], f: &RationalFn, n: usize) -> Cow<'a, [C64]> {
        if n <= cache.len() {
            Cow::Borrowed(&cache[..n])
        } else {
            Cow::Owned(f.taylor(n).into_iter().map(|c| c.conj()).collect())
        }
    }

    /// `T_{conj b} f` for polynomial `f`.
    pub fn toeplitz_conj_b(&self, f: &Poly) -> Poly {
        let Some(d) = f.degree() else {
            return Poly::zero();
        };
        let bc = self.coeffs_upto(&self.b_conj, &self.b, d + 1);
        let fc = f.coeffs();
        Poly::new(
            (0..=d)
                .map(|j| (0..=d - j).map(|k| bc[k] * fc[j + k]).sum())
                .collect(),
        )
    }

    /// The polynomial `f⁺` with `T_{conj a} f⁺ = T_{conj b} f`.
    pub fn plus_function(&self, f: &Poly) -> Result<Poly> {
        let Some(d) = f.degree() else {
            return Ok(Poly::zero());
        };
        let rhs = self.toeplitz_conj_b(f);
        let ac = self.coeffs_upto(&self.a_conj, &self.mate.a, d + 1);
        if ac[0].norm() <= self.settings.tol.pole {
            return Err(HbError::SingularSystem);
        }
        let mut out = vec![ZERO; d + 1];
        for j in (0..=d).rev() {
            let mut acc = rhs.coeff(j);
            for k in 1..=d - j {
                acc -= ac[k] * out[j + k];
            }
            out[j] = acc / ac[0];
        }
        Ok(Poly::new(out))
    }

    /// Largest coefficient of `T_{conj a} f⁺ - T_{conj b} f`, relative to scale.
    pub fn plus_residual(&self, f: &Poly, f_plus: &Poly) -> f64 {
        let Some(d) = f.degree() else {
            return 0.0;
        };
        let rhs = self.toeplitz_conj_b(f);
        let ac = self.coeffs_upto(&self.a_conj, &self.mate.a, d + 1);
        let scale = rhs.max_abs().max(f_plus.max_abs()).max(f64::MIN_POSITIVE);
        (0..=d)
            .map(|j| {
                let lhs: C64 = (0..=d - j).map(|k| ac[k] * f_plus.coeff(j + k)).sum();
                (lhs - rhs.coeff(j)).norm()
            })
            .fold(0.0, f64::max)
            / scale
    }

    pub fn vector(&self, f: Poly) -> Result<HbVector<'_>> {
        let f_plus = self.plus_function(&f)?;
        Ok(HbVector {
            space: self,
            f,
            f_plus,
        })
    }

    /// `⟨f, g⟩_b`, linear in `f`.
    pub fn inner_product(&self, f: &Poly, g: &Poly) -> Result<C64> {
        let fp = self.plus_function(f)?;
        let gp = self.plus_function(g)?;
        Ok(pair(f, g) + pair(&fp, &gp))
    }

    pub fn norm_sq(&self, f: &Poly) -> Result<f64> {
        Ok(f.norm_sq() + self.plus_function(f)?.norm_sq())
    }

    /// Plus-functions of `1, z, ..., z^(n-1)`.
    pub fn monomial_plus(&self, n: usize) -> Result<Vec<Poly>> {
        (0..n).map(|k| self.plus_function(&Poly::monomial(k))).collect()
    }

    /// `G[j][k] = ⟨z^k, z^j⟩_b` for `j, k < n`.
    pub fn gram_matrix(&self, n: usize) -> Result<DMatrix<C64>> {
        let plus = self.monomial_plus(n)?;
        Ok(DMatrix::from_fn(n, n, |j, k| {
            let h2 = if j == k { ONE } else { ZERO };
            h2 + pair(&plus[k], &plus[j])
        }))
    }

    /// Gram matrix of an arbitrary polynomial family, `G[j][k] = ⟨v_k, v_j⟩_b`.
    pub fn gram_of(&self, family: &[Poly]) -> Result<DMatrix<C64>> {
        let vs: Vec<HbVector<'_>> = family
            .iter()
            .map(|p| self.vector(p.clone()))
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(vs.len(), vs.len(), |j, k| vs[k].inner(&vs[j])))
    }

    /// `K_λ(z) = (1 - conj(b(λ)) b(z)) / (1 - conj(λ) z)`.
    pub fn kernel(&self, lambda: C64, z: C64) -> Result<C64> {
        for p in [lambda, z] {
            if p.norm() >= 1.0 {
                return Err(HbError::InvalidArgument(format!("{p} is not in the open disk")));
            }
        }
        Ok((ONE - self.b.eval(lambda).conj() * self.b.eval(z)) / (ONE - lambda.conj() * z))
    }

    /// `K_λ` as a rational function of `z`.
    pub fn kernel_fn(&self, lambda: C64) -> Result<RationalFn> {
        if lambda.norm() >= 1.0 {
            return Err(HbError::InvalidArgument(format!(
                "{lambda} is not in the open disk"
            )));
        }
        let bl = self.b.eval(lambda).conj();
        let num = self.b.den() - &self.b.num().scale(bl);
        let den = self.b.den() * &Poly::new(vec![ONE, -lambda.conj()]);
        RationalFn::new(num, den)
    }

    /// Taylor polynomial of degree `d` of `K_λ` in `z`.
    pub fn kernel_poly(&self, lambda: C64, d: usize) -> Result<Poly> {
        if lambda.norm() >= 1.0 {
            return Err(HbError::InvalidArgument(format!(
                "{lambda} is not in the open disk"
            )));
        }
        let bl = self.b.eval(lambda).conj();
        let bt = self.b.taylor(d + 1);
        let lc = lambda.conj();
        let mut out = Vec::with_capacity(d + 1);
        let mut acc = ZERO;
        // K = k_λ - conj(b(λ)) b k_λ, coefficients by running convolution
        let mut pow = ONE;
        let mut conv = ZERO;
        for (k, &bk) in bt.iter().enumerate() {
            conv = conv * lc + bk;
            if k > 0 {
                pow *= lc;
            }
            acc = pow - bl * conv;
            out.push(acc);
        }
        let _ = acc;
        Ok(Poly::new(out))
    }

    /// `∂^i / ∂conj(w)^i K_w(z)` as a rational function of `z`.
    ///
    /// For `w` on the circle the expression is the nontangential limit; it
    /// is only defined for `i` below the mate's multiplicity at `w`.
    pub fn kernel_derivative(&self, w: C64, i: usize) -> Result<RationalFn> {
        let on_circle = (w.norm() - 1.0).abs() <= 10.0 * self.settings.tol.boundary;
        if !on_circle && w.norm() >= 1.0 {
            return Err(HbError::InvalidArgument(format!("{w} is outside the closed disk")));
        }
        if on_circle {
            let limit = self
                .boundary_zeros()
                .iter()
                .filter(|bz| (bz.lambda - w).norm() <= 1e-6)
                .map(|bz| bz.mult)
                .sum::<usize>();
            if i >= limit {
                return Err(HbError::OrderTooHigh { order: i, limit });
            }
        }
        let nu = w.conj();
        let one_minus = Poly::new(vec![ONE, -nu]);
        let (bn, bd) = (self.b.num(), self.b.den());
        let mut num = Poly::zero();
        for l in 0..=i {
            let coef = binomial(i, l) * factorial(i - l);
            let bl = self.b.derivative_at(w, l).conj();
            let bracket = if l == 0 {
                &(bd.clone()) - &bn.scale(bl)
            } else {
                bn.scale(-bl)
            };
            let term = &(&Poly::monomial(i - l) * &one_minus.powi(l)) * &bracket;
            num = &num + &term.scale_real(coef);
        }
        let den = &one_minus.powi(i + 1) * bd;
        let mut out = RationalFn::new(num, den)?;
        if on_circle {
            out = out.cancel_root(w, 1e-9);
        }
        Ok(out.normalized())
    }

    /// Cut `f` down to a polynomial according to `trunc`.
    pub fn truncate(&self, f: &RationalFn, trunc: Truncation) -> Result<Truncated> {
        if f.is_polynomial() {
            let p = f.num().scale(ONE / f.den().coeff(0));
            let degree = p.degree().unwrap_or(0);
            return Ok(Truncated {
                poly: p,
                degree,
                tail_bound: 0.0,
            });
        }
        let rho = f.pole_radius(&self.settings.roots)?;
        if rho <= 1.0 {
            return Err(HbError::PoleInDisk(C64::new(rho, 0.0)));
        }
        let degree = match trunc {
            Truncation::Fixed(d) => d,
            Truncation::Auto { tol, max_degree } => {
                let growth = 2 * self.boundary_multiplicity() + 1;
                let floor = f.num().degree().unwrap_or(0).max(16);
                (floor..=max_degree)
                    .find(|&d| {
                        (d as f64).ln() * growth as f64 - (d as f64) * rho.ln() <= tol.ln()
                    })
                    .unwrap_or(max_degree)
            }
        };
        let c = f.taylor(degree + 9);
        let r = 1.0 / rho;
        let recent = c[degree.saturating_sub(7)..=degree]
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        Ok(Truncated {
            poly: Poly::new(c[..=degree].to_vec()),
            degree,
            tail_bound: recent * r / (1.0 - r),
        })
    }

    /// `⟨f, g⟩_b` with `g` rational, cut down by the space's truncation rule.
    pub fn inner_with_rational(&self, f: &Poly, g: &RationalFn, trunc: Truncation) -> Result<C64> {
        let g = self.truncate(g, trunc)?;
        self.inner_product(f, &g.poly)
    }

    /// Compare `a(0)^-2 - 1` and `1 - |b(0)|² - a(0)²` with `⟨b,b⟩_b` and
    /// `⟨Lb,Lb⟩_b`.
    pub fn norm_identities_check(&self, trunc: Truncation) -> Result<NormReport> {
        let bt = self.truncate(&self.b, trunc)?;
        let lb = bt.poly.backward_shift();
        let gb = self.norm_sq(&bt.poly)?;
        let glb = self.norm_sq(&lb)?;
        let tol = self.settings.tol.gram;
        let db = (gb - self.norm_b_sq).abs();
        let dlb = (glb - self.norm_lb_sq).abs();
        Ok(NormReport {
            norm_b_sq_closed: self.norm_b_sq,
            norm_b_sq_gram: gb,
            norm_b_sq_diff: db,
            norm_lb_sq_closed: self.norm_lb_sq,
            norm_lb_sq_gram: glb,
            norm_lb_sq_diff: dlb,
            trunc_degree: bt.degree,
            tail_bound: bt.tail_bound,
            tolerance: tol,
            passed: db <= tol && dlb <= tol,
        })
    }
}

/// `M_z f = z f`.
pub fn shift(f: &Poly) -> Poly {
    f.shift()
}

/// `L f = (f - f(0)) / z`.
pub fn backward_shift(f: &Poly) -> Poly {
    f.backward_shift()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(num: &[f64], den: &[f64]) -> HbSpace {
        HbSpace::new(
            RationalFn::new(Poly::from_real(num), Poly::from_real(den)).unwrap(),
            Settings::default(),
        )
        .unwrap()
    }

    fn close(a: C64, b: f64, tol: f64) -> bool {
        (a - C64::new(b, 0.0)).norm() <= tol
    }

    #[test]
    fn kernel_examples() {
        let h2 = space(&[0.0], &[1.0]);
        assert!(close(h2.kernel(ZERO, C64::new(0.3, 0.4)).unwrap(), 1.0, 1e-15));
        let s = space(&[0.5, 0.5], &[1.0]);
        let z = C64::new(0.2, -0.1);
        assert!((s.kernel(ZERO, z).unwrap() - (C64::new(3.0, 0.0) - z) / 4.0).norm() < 1e-15);
        assert!(close(s.kernel(ZERO, ZERO).unwrap(), 0.75, 1e-15));
        assert!(s.kernel(ONE, ZERO).is_err());
    }

    #[test]
    fn plus_function_examples() {
        let s = space(&[0.0, 0.5], &[1.0]);
        let p = s.plus_function(&Poly::monomial(1)).unwrap();
        assert!(p.rel_distance(&Poly::from_real(&[1.0 / 3f64.sqrt()])) < 1e-14, "{p:?}");
        assert!(s.plus_function(&Poly::one()).unwrap().max_abs() < 1e-15);

        let s = space(&[0.5, 0.5], &[1.0]);
        let p = s.plus_function(&Poly::monomial(1)).unwrap();
        assert!(p.rel_distance(&Poly::from_real(&[2.0, 1.0])) < 1e-12, "{p:?}");
        assert!(s.plus_residual(&Poly::monomial(1), &p) < 1e-14);
    }

    #[test]
    fn inner_products_and_gram() {
        let s = space(&[0.5, 0.5], &[1.0]);
        assert!(close(s.inner_product(&Poly::one(), &Poly::one()).unwrap(), 2.0, 1e-12));
        assert!(close(
            s.inner_product(&Poly::monomial(1), &Poly::monomial(1)).unwrap(),
            6.0,
            1e-12
        ));
        let g = s.gram_matrix(2).unwrap();
        assert!(close(g[(0, 0)], 2.0, 1e-12));
        assert!(close(g[(0, 1)], 2.0, 1e-12));
        assert!(close(g[(1, 0)], 2.0, 1e-12));
        assert!(close(g[(1, 1)], 6.0, 1e-12));

        let h2 = space(&[0.0], &[1.0]);
        let g = h2.gram_matrix(5).unwrap();
        assert!((g - DMatrix::<C64>::identity(5, 5)).norm() < 1e-15);
    }

    #[test]
    fn gram_is_positive_definite() {
        let s = space(&[0.5, 0.5], &[1.0]);
        let g = s.gram_matrix(8).unwrap();
        for k in 1..=8 {
            let minor = g.view((0, 0), (k, k)).into_owned();
            assert!(minor.determinant().re > 0.0);
        }
    }

    #[test]
    fn norm_identities_half_one_plus_z() {
        let s = space(&[0.5, 0.5], &[1.0]);
        assert!((s.norm_b_sq() - 3.0).abs() < 1e-12);
        assert!((s.norm_lb_sq() - 0.5).abs() < 1e-12);
        let r = s.norm_identities_check(Truncation::default()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.norm_b_sq_gram - 3.0).abs() < 1e-12);
        assert!((r.norm_lb_sq_gram - 0.5).abs() < 1e-12);

        let h2 = space(&[0.0], &[1.0]);
        assert_eq!(h2.norm_b_sq(), 0.0);
    }

    #[test]
    fn kernel_derivative_interior() {
        let h2 = space(&[0.0], &[1.0]);
        let w = C64::new(0.3, 0.2);
        let u0 = h2.kernel_derivative(w, 0).unwrap();
        let z = C64::new(-0.1, 0.4);
        assert!((u0.eval(z) - h2.kernel(w, z).unwrap()).norm() < 1e-14);
        // z / (1 - conj(w) z)^2
        let u1 = h2.kernel_derivative(w, 1).unwrap();
        let expect = z / ((ONE - w.conj() * z) * (ONE - w.conj() * z));
        assert!((u1.eval(z) - expect).norm() < 1e-14);
    }

    #[test]
    fn kernel_derivative_boundary() {
        let s = space(&[0.5, 0.5], &[1.0]);
        let u = s.kernel_derivative(ONE, 0).unwrap();
        assert!(u.is_polynomial());
        assert!(close(u.eval(C64::new(0.3, 0.1)), 0.5, 1e-12));
        assert!(matches!(
            s.kernel_derivative(ONE, 1),
            Err(HbError::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn shifts() {
        assert_eq!(backward_shift(&Poly::from_real(&[1.0, 2.0])), Poly::from_real(&[2.0]));
        assert_eq!(shift(&Poly::one()), Poly::monomial(1));
    }
}
