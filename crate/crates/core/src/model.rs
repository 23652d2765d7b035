//! Rank-one extensions of the shift and the resulting function models.
//!
//! One extension step combines Herglotz functions,
//! `(1 + b_t)/(1 - b_t) = s (1+z)/(1-z) + (1-s) (1 + u b0)/(1 - u b0)`
//! with `u = e^{-it}`, and solves for `b_t` over a common denominator.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::isometry::{self, DefectReport};
use crate::poly::{Poly, C64, ONE, ZERO};
use crate::rational::RationalFn;
use crate::space::HbSpace;
use crate::spectral;
use crate::{HbError, Result, Settings};

/// Data of one extension step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    pub omega: C64,
    pub t: f64,
}

impl ExtensionParams {
    pub fn new(omega: C64, t: f64) -> Self {
        ExtensionParams { omega, t }
    }

    /// `s = |ω|² / (1 + ‖w'‖² + |ω|²)`.
    pub fn s(&self, norm_w_sq: f64) -> f64 {
        let o = self.omega.norm_sqr();
        o / (1.0 + norm_w_sq + o)
    }
}

/// `b_t(0)`, `b_t(1)` and `b_t'(1)` of an extension output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub b0: C64,
    pub b1: C64,
    pub db1: C64,
    pub s: f64,
}

impl Certificate {
    /// Largest deviation of `(b_t(0), b_t(1), s b_t'(1))` from `(0, 1, 1)`.
    pub fn deviation(&self) -> f64 {
        self.b0
            .norm()
            .max((self.b1 - ONE).norm())
            .max((self.db1 * self.s - ONE).norm())
    }
}

/// One accepted extension.
#[derive(Debug, Clone, Serialize)]
pub struct Extension {
    pub b0: RationalFn,
    pub b_t: RationalFn,
    pub params: ExtensionParams,
    pub s: f64,
    pub certificate: Certificate,
}

/// A model built from a sequence of extensions.
#[derive(Debug, Clone, Serialize)]
pub struct ModelSpec {
    pub steps: Vec<ExtensionParams>,
    pub b: RationalFn,
    pub extensions: Vec<Extension>,
    pub certificates: Vec<Certificate>,
    pub report: Option<DefectReport>,
    #[serde(skip)]
    pub space: HbSpace,
}

/// `b_α = (b - α) / (1 - conj(α) b)`.
pub fn mobius_normalize(b: &RationalFn, alpha: C64, s: &Settings) -> Result<RationalFn> {
    if alpha.norm() >= 1.0 {
        return Err(HbError::InvalidArgument(format!("|alpha| = {} >= 1", alpha.norm())));
    }
    let (p, q) = (b.num(), b.den());
    let num = p - &q.scale(alpha);
    let den = q - &p.scale(alpha.conj());
    RationalFn::new(num, den)?.reduce(s.tol.gcd, &s.roots)
}

/// `t0 = arg b0(1)` when `|b0(1)| = 1`.
pub fn forbidden_phase(b0: &RationalFn, s: &Settings) -> Option<f64> {
    let v = b0.eval(ONE);
    if (v.norm() - 1.0).abs() <= s.tol.phase {
        Some(v.arg().rem_euclid(TAU))
    } else {
        None
    }
}

/// `γ z / (1 - β z)` with `β = 1/(1+σ²)` and `γ = σ²/(1+σ²) > 0`.
pub fn brownian_shift_b(sigma: f64) -> Result<RationalFn> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(HbError::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let s2 = sigma * sigma;
    let beta = 1.0 / (1.0 + s2);
    let gamma = s2 / (1.0 + s2);
    RationalFn::new(Poly::from_real(&[0.0, gamma]), Poly::from_real(&[1.0, -beta]))
}

/// `b(conj(λ) z)`. A mate zero at `1` moves to `λ`.
pub fn rotate(b: &RationalFn, lambda: C64) -> RationalFn {
    b.dilate(lambda.conj())
}

/// One extension step `b0 -> b_t`.
pub fn extend(b0: &RationalFn, params: ExtensionParams, settings: &Settings) -> Result<Extension> {
    if params.omega == ZERO || !params.omega.is_finite() {
        return Err(HbError::DegenerateOmega);
    }
    let at0 = b0.eval(ZERO);
    if at0.norm() > settings.tol.mate {
        return Err(HbError::NotNormalized(at0));
    }
    let u = C64::from_polar(1.0, -params.t);
    let distance = (u * b0.eval(ONE) - ONE).norm();
    if distance < settings.tol.phase {
        return Err(HbError::ForbiddenPhase { distance });
    }
    let mate = spectral::pythagorean_mate(b0, settings)?;
    let norm_w_sq = mate.a.eval(ZERO).re.powi(-2) - 1.0;
    let s = params.s(norm_w_sq);

    let (p, q) = (b0.num(), b0.den());
    let minus = q - &p.scale(u);
    let plus = q + &p.scale(u);
    let one_plus = Poly::from_real(&[1.0, 1.0]);
    let one_minus = Poly::from_real(&[1.0, -1.0]);
    let nh = &(&one_plus * &minus).scale_real(s) + &(&one_minus * &plus).scale_real(1.0 - s);
    let dh = &one_minus * &minus;
    let b_t = RationalFn::new(&nh - &dh, &nh + &dh)?.reduce(settings.tol.gcd, &settings.roots)?;
    let b_t = b_t.trimmed(1e-15);

    let certificate = Certificate {
        b0: b_t.eval(ZERO),
        b1: b_t.eval(ONE),
        db1: b_t.derivative().eval(ONE),
        s,
    };
    Ok(Extension {
        b0: b0.clone(),
        b_t,
        params,
        s,
        certificate,
    })
}

/// Iterate [`extend`] from `b = 0`; with `verify`, require a strict
/// `2n`-isometry.
pub fn build_model(steps: &[ExtensionParams], verify: bool, settings: &Settings) -> Result<ModelSpec> {
    let mut b = RationalFn::zero();
    let mut extensions = Vec::with_capacity(steps.len());
    for &p in steps {
        let ext = extend(&b, p, settings)?;
        b = ext.b_t.clone();
        extensions.push(ext);
    }
    let space = HbSpace::new(b.clone(), *settings)?;
    let report = if verify {
        let n = steps.len();
        let expected = if n == 0 { 1 } else { 2 * n };
        let r = isometry::verify(&space, expected, 10)?;
        let strict = match r.strict_order {
            Some(m) if m == expected => {
                m == 1 || r.max_form_residual[m - 2] >= settings.tol.strict
            }
            _ => false,
        };
        if !strict {
            return Err(HbError::VerificationFailure {
                expected,
                found: r.strict_order,
            });
        }
        Some(r)
    } else {
        None
    };
    Ok(ModelSpec {
        steps: steps.to_vec(),
        certificates: extensions.iter().map(|e| e.certificate).collect(),
        extensions,
        b,
        report,
        space,
    })
}

/// Largest relative deviation between `K^{b_t}_w(z)` and
/// `e(z) conj(e(w)) + f(z) conj(f(w)) K^{b0}_w(z)` over random pairs with
/// `|z|, |w| <= 0.95`.
pub fn kernel_factorization_check(ext: &Extension, samples: usize, seed: u64) -> f64 {
    let (b0, bt, s) = (&ext.b0, &ext.b_t, ext.s);
    let u = C64::from_polar(1.0, -ext.params.t);
    let e = |z: C64| (ONE - bt.eval(z)) / (ONE - z) * s.sqrt();
    let f = |z: C64| (ONE - bt.eval(z)) / (ONE - u * b0.eval(z)) * (1.0 - s).sqrt();
    let kernel = |b: &RationalFn, w: C64, z: C64| (ONE - b.eval(w).conj() * b.eval(z)) / (ONE - w.conj() * z);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || C64::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (z, w) = (point(), point());
        let lhs = kernel(bt, w, z);
        let rhs = e(z) * e(w).conj() + f(z) * f(w).conj() * kernel(b0, w, z);
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1e-300));
    }
    worst
}
