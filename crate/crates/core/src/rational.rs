//! Quotients of complex polynomials.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::poly::{Poly, C64, ONE, ZERO};
use crate::roots::{self, RootOptions};
use crate::{HbError, Result};

/// `num / den` with `den` not the zero polynomial.
#[derive(Clone, PartialEq, Serialize)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(HbError::ZeroDenominator);
        }
        Ok(RationalFn { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFn {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn constant(c: C64) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// `max(deg num, deg den)`; meaningful once the quotient is reduced.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Evaluate, refusing points where `|den(z)| < pole_tol * scale`.
    pub fn eval_checked(&self, z: C64, pole_tol: f64) -> Result<C64> {
        let d = self.den.eval(z);
        let scale = self.den.eval_scale(z).max(f64::MIN_POSITIVE);
        if d.norm() < pole_tol * scale {
            return Err(HbError::PoleAt {
                z,
                modulus: d.norm(),
            });
        }
        Ok(self.num.eval(z) / d)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn derivative(&self) -> RationalFn {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RationalFn {
            num: n,
            den: &self.den * &self.den,
        }
    }

    /// Value of the `k`-th derivative at `z` (from the local Taylor series).
    pub fn derivative_at(&self, z: C64, k: usize) -> C64 {
        let tn = self.num.taylor_at(z);
        let td = self.den.taylor_at(z);
        let t = Poly::new(tn).series_div(&Poly::new(td), k + 1);
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        t[k] * fact
    }

    /// First `n` Taylor coefficients about the origin.
    pub fn taylor(&self, n: usize) -> Vec<C64> {
        self.num.series_div(&self.den, n)
    }

    /// Taylor polynomial of degree `d`.
    pub fn taylor_poly(&self, d: usize) -> Poly {
        Poly::new(self.taylor(d + 1))
    }

    pub fn scale(&self, s: C64) -> RationalFn {
        RationalFn {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        if self.den == o.den {
            return RationalFn {
                num: &self.num + &o.num,
                den: self.den.clone(),
            };
        }
        RationalFn {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.scale(-ONE))
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        RationalFn {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> RationalFn {
        RationalFn {
            num: &self.num * p,
            den: self.den.clone(),
        }
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn> {
        RationalFn::new(&self.num * &o.den, &self.den * &o.num)
    }

    /// `f(c z)`.
    pub fn dilate(&self, c: C64) -> RationalFn {
        RationalFn {
            num: self.num.dilate(c),
            den: self.den.dilate(c),
        }
    }

    /// Scale so that `den(0) = 1` (or the leading denominator coefficient
    /// when `den(0) = 0`).
    pub fn normalized(&self) -> RationalFn {
        let d0 = self.den.coeff(0);
        let s = if d0 != ZERO { d0 } else { self.den.leading() };
        RationalFn {
            num: self.num.scale(ONE / s),
            den: self.den.scale(ONE / s),
        }
    }

    /// Drop coefficients below `rel` times the larger of the two scales.
    pub fn trimmed(&self, rel: f64) -> RationalFn {
        let scale = self.num.max_abs().max(self.den.max_abs());
        let trim = |p: &Poly| {
            let cut = rel * scale;
            let mut c = p.coeffs().to_vec();
            while c.last().is_some_and(|x| x.norm() <= cut) {
                c.pop();
            }
            Poly::new(c)
        };
        let den = trim(&self.den);
        RationalFn {
            num: trim(&self.num),
            den: if den.is_zero() { self.den.clone() } else { den },
        }
    }

    /// Number of leading Taylor coefficients of `p` at `z` that vanish
    /// relative to `tol` times the coefficient scale.
    fn vanishing_order(p: &Poly, z: C64, tol: f64) -> usize {
        let t = p.taylor_at(z);
        let scale = p.eval_scale(z).max(p.max_abs());
        t.iter().take_while(|c| c.norm() <= tol * scale).count()
    }

    /// Cancel every common factor `(z - root)` of numerator and denominator.
    pub fn cancel_root(&self, root: C64, tol: f64) -> RationalFn {
        let k = Self::vanishing_order(&self.num, root, tol).min(Self::vanishing_order(&self.den, root, tol));
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for _ in 0..k {
            num = num.deflate(root).0;
            den = den.deflate(root).0;
        }
        RationalFn { num, den }
    }

    /// Remove common roots of numerator and denominator found by root
    /// clustering, then normalize.
    pub fn reduce(&self, tol: f64, opts: &RootOptions) -> Result<RationalFn> {
        if self.num.is_zero() {
            return Ok(RationalFn::zero());
        }
        let mut out = RationalFn {
            num: self.num.clone(),
            den: self.den.clone(),
        };
        if self.num.degree() >= Some(1) && self.den.degree() >= Some(1) {
            for cl in roots::root_clusters(&self.num, opts)? {
                let dorder = Self::vanishing_order(&out.den, cl.center, tol);
                for _ in 0..cl.multiplicity.min(dorder) {
                    out.num = out.num.deflate(cl.center).0;
                    out.den = out.den.deflate(cl.center).0;
                }
            }
        }
        Ok(out.normalized())
    }

    /// Roots of the denominator.
    pub fn poles(&self, opts: &RootOptions) -> Result<Vec<C64>> {
        if self.den.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        roots::roots(&self.den, opts)
    }

    /// Smallest pole modulus, infinite for a polynomial.
    pub fn pole_radius(&self, opts: &RootOptions) -> Result<f64> {
        Ok(self
            .poles(opts)?
            .iter()
            .map(|p| p.norm())
            .fold(f64::INFINITY, f64::min))
    }

    /// Coefficientwise distance after normalization, relative to scale.
    pub fn rel_distance(&self, o: &RationalFn) -> f64 {
        let a = self.normalized();
        let b = o.normalized();
        a.num.rel_distance(&b.num).max(a.den.rel_distance(&b.den))
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl From<Poly> for RationalFn {
    fn from(p: Poly) -> Self {
        RationalFn::from_poly(p)
    }
}

/// Accepts either `{"num": .., "den": ..}` or a bare polynomial `{"coeffs": ..}`.
impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Quot { num: Poly, den: Poly },
            Bare(Poly),
        }
        match Repr::deserialize(d)? {
            Repr::Quot { num, den } => {
                RationalFn::new(num, den).map_err(serde::de::Error::custom)
            }
            Repr::Bare(p) => Ok(RationalFn::from_poly(p)),
        }
    }
}
