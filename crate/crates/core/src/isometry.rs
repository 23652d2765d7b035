//! m-isometry defect forms of the shift on `H(b)`.
//!
//! Every operator identity is tested weakly, as a sesquilinear form on
//! polynomials, so no operator is ever truncated.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Truncation;
use crate::poly::{binomial, Poly, C64, ONE};
use crate::space::HbSpace;
use crate::Result;

/// Outcome of the defect-form and annihilation tests on one space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefectReport {
    pub orders_tested: Vec<usize>,
    /// Largest `|⟨β_m z^i, z^j⟩_b|` over monomials, indexed like `orders_tested`.
    pub max_form_residual: Vec<f64>,
    pub strict_order: Option<usize>,
    /// Point `λ` used for `(T* - λ)^k w`, when the mate has one boundary zero.
    pub lambda: Option<C64>,
    /// Residual for `k = 0..=n`.
    pub annihilation_residuals: Vec<f64>,
    pub deg: usize,
    pub tau_iso: f64,
    pub tau_strict: f64,
}

/// A polynomial of degree `deg` with coefficients uniform in the unit square.
pub fn random_poly(rng: &mut impl Rng, deg: usize) -> Poly {
    Poly::new(
        (0..=deg)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
}

/// `sum_k (-1)^(m-k) C(m,k) ⟨z^k f, z^k g⟩_b`.
pub fn defect_form(space: &HbSpace, f: &Poly, g: &Poly, m: usize) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    let (mut zf, mut zg) = (f.clone(), g.clone());
    for k in 0..=m {
        let sign = if (m - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += space.inner_product(&zf, &zg)? * (sign * binomial(m, k));
        zf = zf.shift();
        zg = zg.shift();
    }
    Ok(acc)
}

/// Difference between `⟨β_(m+1) f, g⟩` and `⟨β_m zf, zg⟩ - ⟨β_m f, g⟩`.
pub fn recursion_residual(space: &HbSpace, f: &Poly, g: &Poly, m: usize) -> Result<f64> {
    let lhs = defect_form(space, f, g, m + 1)?;
    let rhs = defect_form(space, &f.shift(), &g.shift(), m)? - defect_form(space, f, g, m)?;
    Ok((lhs - rhs).norm())
}

/// `w = sqrt(1 + ‖b‖²) Lb`, truncated to a polynomial.
pub fn defect_vector(space: &HbSpace, trunc: Truncation) -> Result<Poly> {
    let b = space.truncate(space.b(), trunc)?;
    Ok(b.poly.backward_shift().scale_real((1.0 + space.norm_b_sq()).sqrt()))
}

/// Largest `|⟨zf, zg⟩ - ⟨f, g⟩ - (1 + ‖b‖²)⟨f, Lb⟩⟨Lb, g⟩|` over random
/// pairs of degree at most 8.
pub fn rank_one_identity_check(space: &HbSpace, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lb = space.truncate(space.b(), Truncation::auto())?.poly.backward_shift();
    let lb = space.vector(lb)?;
    let c = 1.0 + space.norm_b_sq();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let (df, dg) = (rng.gen_range(0..=8), rng.gen_range(0..=8));
        let f = space.vector(random_poly(&mut rng, df))?;
        let g = space.vector(random_poly(&mut rng, dg))?;
        let zf = space.vector(f.f().shift())?;
        let zg = space.vector(g.f().shift())?;
        let lhs = zf.inner(&zg) - f.inner(&g);
        let rhs = f.inner(&lb) * lb.inner(&g) * c;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// `max_j |⟨w, (z - conj(λ))^k z^j⟩_b|` for `k = 0..=n`, `j <= deg`.
///
/// By the adjoint pairing this is the size of `(T* - λ)^k w` tested on
/// monomials.
pub fn annihilation_check(space: &HbSpace, lambda: C64, n: usize, deg: usize) -> Result<Vec<f64>> {
    let w = space.vector(defect_vector(space, Truncation::auto())?)?;
    let factor = Poly::linear(lambda.conj());
    (0..=n)
        .map(|k| {
            let base = factor.powi(k);
            let mut worst: f64 = 0.0;
            for j in 0..=deg {
                let h = space.vector(&base * &Poly::monomial(j))?;
                worst = worst.max(w.inner(&h).norm());
            }
            Ok(worst)
        })
        .collect()
}

/// `max_{i,j <= deg} |⟨β_m z^i, z^j⟩_b|` from a Gram matrix of size at
/// least `deg + m + 1`.
pub fn form_residual(gram: &DMatrix<C64>, m: usize, deg: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..=deg {
        for j in 0..=deg {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..=m {
                let sign = if (m - k).is_multiple_of(2) { 1.0 } else { -1.0 };
                acc += gram[(k + j, k + i)] * (sign * binomial(m, k));
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// Residuals of `β_1 .. β_mmax` on monomials of degree at most `deg`.
pub fn form_residuals(space: &HbSpace, m_max: usize, deg: usize) -> Result<Vec<f64>> {
    let gram = space.gram_matrix(deg + m_max + 1)?;
    Ok((1..=m_max).map(|m| form_residual(&gram, m, deg)).collect())
}

/// Smallest `m <= m_max` with defect residual below `τ_iso`, with the
/// residual at `m - 1` (zero when `m = 1`).
pub fn isometry_order(space: &HbSpace, m_max: usize, deg: usize) -> Result<Option<(usize, f64)>> {
    let tol = space.settings().tol.iso;
    let res = form_residuals(space, m_max, deg)?;
    Ok(res.iter().position(|&r| r <= tol).map(|i| {
        let below = if i == 0 { 0.0 } else { res[i - 1] };
        (i + 1, below)
    }))
}

/// Run the defect forms up to `m_max` and, for a mate with exactly one
/// boundary zero `conj(λ)` of multiplicity `n`, the annihilation test.
pub fn verify(space: &HbSpace, m_max: usize, deg: usize) -> Result<DefectReport> {
    let tol = space.settings().tol;
    let res = form_residuals(space, m_max, deg)?;
    let strict_order = res.iter().position(|&r| r <= tol.iso).map(|i| i + 1);
    let (lambda, annihilation_residuals) = match space.boundary_zeros() {
        [bz] => (
            Some(bz.lambda.conj()),
            annihilation_check(space, bz.lambda.conj(), bz.mult, deg)?,
        ),
        [] => (None, annihilation_check(space, ONE, 0, deg)?),
        _ => (None, Vec::new()),
    };
    Ok(DefectReport {
        orders_tested: (1..=m_max).collect(),
        max_form_residual: res,
        strict_order,
        lambda,
        annihilation_residuals,
        deg,
        tau_iso: tol.iso,
        tau_strict: tol.strict,
    })
}
