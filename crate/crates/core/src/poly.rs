//! Dense complex polynomials, lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::roots::{self, RootOptions};
use crate::Result;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A polynomial `c[0] + c[1] z + ... + c[d] z^d`.
///
/// The coefficient vector never ends in an exact zero, so the zero
/// polynomial is the empty vector and `degree()` returns `None` for it.
#[derive(Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(ONE)
    }

    pub fn constant(c: C64) -> Self {
        Poly::new(vec![c])
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![ZERO; k + 1];
        c[k] = ONE;
        Poly { coeffs: c }
    }

    /// `z - root`.
    pub fn linear(root: C64) -> Self {
        Poly::new(vec![-root, ONE])
    }

    /// `lead * prod (z - r)`.
    pub fn from_roots(roots: &[C64], lead: C64) -> Self {
        let mut c = vec![lead];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    /// Largest coefficient modulus; the reference scale for relative tests.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Squared H^2 norm (sum of squared coefficient moduli).
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Drop trailing coefficients below `rel * max_abs()`.
    pub fn trimmed(&self, rel: f64) -> Poly {
        let cut = rel * self.max_abs();
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|x| x.norm() <= cut) {
            c.pop();
        }
        Poly { coeffs: c }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `sum |c_k| |z|^k`, the natural scale of a Horner evaluation at `z`.
    pub fn eval_scale(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Taylor coefficients about `z0`: entry `j` is `p^(j)(z0) / j!`.
    pub fn taylor_at(&self, z0: C64) -> Vec<C64> {
        // repeated synthetic division
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(work.len());
        while !work.is_empty() {
            let n = work.len();
            for k in (0..n - 1).rev() {
                let hi = work[k + 1];
                work[k] += hi * z0;
            }
            out.push(work[0]);
            work.remove(0);
        }
        out
    }

    /// Complex conjugate of every coefficient.
    pub fn conj(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// `z^d * conj(p(1/conj z))`: coefficient `k` is `conj(c[d - k])`.
    ///
    /// Maps each root `r` to `1 / conj(r)`.
    pub fn reflect(&self, d: usize) -> Poly {
        assert!(
            self.degree().is_none_or(|deg| deg <= d),
            "reflect: d must be at least the degree"
        );
        Poly::new((0..=d).map(|k| self.coeff(d - k).conj()).collect())
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Poly {
        self.scale(C64::new(s, 0.0))
    }

    /// Multiplication by `z`.
    pub fn shift(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(ZERO);
        c.extend_from_slice(&self.coeffs);
        Poly { coeffs: c }
    }

    /// Multiplication by `z^k`.
    pub fn shift_by(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![ZERO; k];
        c.extend_from_slice(&self.coeffs);
        Poly { coeffs: c }
    }

    /// `(p(z) - p(0)) / z`.
    pub fn backward_shift(&self) -> Poly {
        Poly::new(self.coeffs.iter().skip(1).copied().collect())
    }

    /// `p(c z)`; with `|c| = 1` this rotates the roots by `1/c`.
    pub fn dilate(&self, c: C64) -> Poly {
        let mut pow = ONE;
        Poly::new(
            self.coeffs
                .iter()
                .map(|&x| {
                    let v = x * pow;
                    pow *= c;
                    v
                })
                .collect(),
        )
    }

    pub fn powi(&self, n: usize) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Polynomial long division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if nd < dd {
            return (Poly::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ZERO; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
            rem[k + dd] = ZERO;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Divide by `(z - r)`; returns the quotient and the remainder `p(r)`.
    pub fn deflate(&self, r: C64) -> (Poly, C64) {
        let n = self.coeffs.len();
        if n == 0 {
            return (Poly::zero(), ZERO);
        }
        let mut q = vec![ZERO; n - 1];
        let mut acc = ZERO;
        for k in (0..n).rev() {
            acc = acc * r + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (Poly::new(q), acc)
    }

    /// All roots with multiplicity, using the default root options.
    pub fn roots(&self) -> Result<Vec<C64>> {
        roots::roots(self, &RootOptions::default())
    }

    /// First `n` Taylor coefficients of `self / den` about 0.
    pub fn series_div(&self, den: &Poly, n: usize) -> Vec<C64> {
        let d0 = den.coeff(0);
        assert!(d0 != ZERO, "series division needs den(0) != 0");
        let mut out = vec![ZERO; n];
        let dc = den.coeffs();
        for k in 0..n {
            let mut acc = self.coeff(k);
            for j in 1..dc.len().min(k + 1) {
                acc -= dc[j] * out[k - j];
            }
            out[k] = acc / d0;
        }
        out
    }

    /// Relative coefficientwise distance, scaled by the larger max coefficient.
    pub fn rel_distance(&self, other: &Poly) -> f64 {
        let scale = self.max_abs().max(other.max_abs()).max(f64::MIN_POSITIVE);
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
            / scale
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "Poly(0)");
        }
        write!(f, "Poly(")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)z^{}", c.re, c.im, k)?;
        }
        write!(f, ")")
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-ONE)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        Ok(Poly::new(
            repr.coeffs.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
        ))
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
