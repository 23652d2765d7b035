//! JSON report envelopes and the acceptance suite.
//!
//! Each acceptance criterion is a function returning a [`Check`]; the suite
//! runs them all over a fixed corpus of spaces.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunConfig, Settings, Truncation};
use crate::isometry::{self, random_poly};
use crate::lattice;
use crate::model::{self, ExtensionParams};
use crate::poly::{Poly, C64, ONE, ZERO};
use crate::rational::RationalFn;
use crate::space::HbSpace;
use crate::spectral::{self, blaschke_product};
use crate::Result;

/// The extension steps used for the model spaces of degree 1, 2 and 3.
pub fn model_steps() -> Vec<ExtensionParams> {
    vec![
        ExtensionParams::new(ONE, PI),
        ExtensionParams::new(C64::new(0.5, 0.5), 2.0),
        ExtensionParams::new(C64::new(-0.7, 0.3), 4.0),
    ]
}

impl RunConfig {
    pub fn settings(&self) -> Settings {
        Settings {
            tol: self.tolerances,
            roots: crate::roots::RootOptions::with_seed(self.seed),
            grid: self.grid,
            truncation: Truncation::Fixed(self.trunc_degree),
        }
    }
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    /// The decisive measured value and the bound it was held to.
    pub value: f64,
    pub tolerance: f64,
    pub detail: Vec<String>,
    pub elapsed_ms: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {}  (value {:.3e}, tolerance {:.1e}, {:.0} ms)",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.value,
            self.tolerance,
            self.elapsed_ms
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

/// `{command, input, config, results, residuals, timing}`.
pub fn envelope(command: &str, input: Value, cfg: &RunConfig, results: Value, residuals: Value, elapsed_ms: f64) -> Value {
    json!({
        "command": command,
        "input": input,
        "config": cfg,
        "results": results,
        "residuals": residuals,
        "timing": { "elapsed_ms": elapsed_ms },
    })
}

/// A residual with the bound it is judged against.
pub fn residual(value: f64, tolerance: f64) -> Value {
    json!({ "value": value, "tolerance": tolerance, "within": value <= tolerance })
}

/// Named spaces of the acceptance corpus.
pub fn corpus(settings: &Settings) -> Result<Vec<(String, RationalFn)>> {
    let mut out = vec![
        ("0".to_string(), RationalFn::zero()),
        ("z/2".to_string(), RationalFn::from_poly(Poly::from_real(&[0.0, 0.5]))),
        ("(z+1)/2".to_string(), RationalFn::from_poly(Poly::from_real(&[0.5, 0.5]))),
    ];
    for sigma in [0.5, 1.0, 2.0] {
        out.push((format!("brownian({sigma})"), model::brownian_shift_b(sigma)?));
    }
    let steps = model_steps();
    for n in 2..=3 {
        out.push((format!("model(n={n})"), model::build_model(&steps[..n], false, settings)?.b));
    }
    Ok(out)
}

fn timed(id: usize, name: &str, f: impl FnOnce() -> Result<(bool, f64, f64, Vec<String>)>) -> Check {
    let start = Instant::now();
    let (passed, value, tolerance, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, f64::NAN, f64::NAN, vec![format!("error: {e}")]),
    };
    Check {
        id,
        name: name.to_string(),
        passed,
        value,
        tolerance,
        detail,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn spaces(cfg: &RunConfig) -> Result<Vec<(String, HbSpace)>> {
    let s = cfg.settings();
    corpus(&s)?
        .into_iter()
        .map(|(name, b)| Ok((name, HbSpace::new(b, s)?)))
        .collect()
}

/// Mate identity over the corpus, each case under one second.
pub fn criterion_mate(cfg: &RunConfig) -> Check {
    timed(1, "mate identity", || {
        let s = cfg.settings();
        let mut worst: f64 = 0.0;
        let mut ok = true;
        let mut detail = Vec::new();
        for (name, b) in corpus(&s)? {
            let start = Instant::now();
            let m = spectral::pythagorean_mate(&b, &s)?;
            let r = spectral::mate_residual(&m.a, &b, 1024);
            let secs = start.elapsed().as_secs_f64();
            ok &= r <= 1e-10 && secs < 1.0;
            worst = worst.max(r);
            detail.push(format!("{name}: residual {r:.2e}, {secs:.3} s"));
        }
        Ok((ok, worst, 1e-10, detail))
    })
}

/// Rank-one defect identity, with the exact anchor for `(z+1)/2`.
pub fn criterion_rank_one(cfg: &RunConfig) -> Check {
    timed(2, "rank-one defect", || {
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for (i, (name, sp)) in spaces(cfg)?.iter().enumerate() {
            let r = isometry::rank_one_identity_check(sp, 50, cfg.seed.wrapping_add(i as u64))?;
            worst = worst.max(r);
            detail.push(format!("{name}: {r:.2e}"));
        }
        let sp = HbSpace::new(RationalFn::from_poly(Poly::from_real(&[0.5, 0.5])), cfg.settings())?;
        let one = Poly::one();
        let lhs = isometry::defect_form(&sp, &one, &one, 1)?;
        let lb = Poly::constant(C64::new(0.5, 0.0));
        let rhs = (1.0 + sp.norm_b_sq()) * sp.inner_product(&one, &lb)?.norm_sqr();
        let anchor = (lhs - 4.0).norm().max((rhs - 4.0).abs());
        detail.push(format!("anchor (z+1)/2, f = g = 1: lhs {lhs}, rhs {rhs}"));
        Ok((worst <= 1e-10 && anchor <= 1e-10, worst.max(anchor), 1e-10, detail))
    })
}

/// Strict `2n`-isometry and annihilation at order `n` for the models.
pub fn criterion_strict_order(cfg: &RunConfig) -> Check {
    timed(3, "strict order", || {
        let s = cfg.settings();
        let steps = model_steps();
        let mut ok = true;
        let mut value: f64 = 0.0;
        let mut detail = Vec::new();
        for n in 1..=3 {
            let start = Instant::now();
            let m = model::build_model(&steps[..n], false, &s)?;
            let forms = isometry::form_residuals(&m.space, 2 * n, 10)?;
            let (at, below) = (forms[2 * n - 1], forms[2 * n - 2]);
            let ann = isometry::annihilation_check(&m.space, ONE, n, 10)?;
            let secs = start.elapsed().as_secs_f64();
            ok &= at <= 1e-8 && below >= 1e-3 && ann[n] <= 1e-8 && ann[n - 1] >= 1e-3 && secs < 10.0;
            value = value.max(at).max(ann[n]);
            detail.push(format!(
                "n={n}: beta_{} {at:.2e}, beta_{} {below:.2e}, annihilation k={n} {:.2e}, k={} {:.2e}, {secs:.3} s",
                2 * n,
                2 * n - 1,
                ann[n],
                n - 1,
                ann[n - 1]
            ));
        }
        Ok((ok, value, 1e-8, detail))
    })
}

/// `β_{m+1} = T* β_m T - β_m` in weak form for `m <= 6`.
pub fn criterion_recursion(cfg: &RunConfig) -> Check {
    timed(4, "recursion identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 4);
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for (name, sp) in spaces(cfg)? {
            let mut w: f64 = 0.0;
            for m in 1..=6 {
                for _ in 0..3 {
                    let (df, dg) = (rng.gen_range(0..=8), rng.gen_range(0..=8));
                    let f = random_poly(&mut rng, df);
                    let g = random_poly(&mut rng, dg);
                    w = w.max(isometry::recursion_residual(&sp, &f, &g, m)?);
                }
            }
            worst = worst.max(w);
            detail.push(format!("{name}: {w:.2e}"));
        }
        Ok((worst <= 1e-10, worst, 1e-10, detail))
    })
}

/// Certificates of every extension and the base case against the
/// Brownian-shift parameters.
pub fn criterion_certificates(cfg: &RunConfig) -> Check {
    timed(5, "extension certificates", || {
        let s = cfg.settings();
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        let m = model::build_model(&model_steps(), false, &s)?;
        for (i, e) in m.extensions.iter().enumerate() {
            let d = e.certificate.deviation();
            worst = worst.max(d);
            detail.push(format!("step {}: certificate deviation {d:.2e}", i + 1));
        }
        let mut base: f64 = 0.0;
        for sigma in [0.5, 1.0, 2.0] {
            let e = model::extend(&RationalFn::zero(), ExtensionParams::new(C64::new(sigma, 0.0), 1.0), &s)?;
            let sv = e.s;
            let formula = RationalFn::new(Poly::from_real(&[0.0, sv]), Poly::from_real(&[1.0, sv - 1.0]))?;
            let brownian = model::brownian_shift_b(sigma)?;
            let d = coeff_distance(&e.b_t, &formula).max(coeff_distance(&e.b_t, &brownian));
            base = base.max(d);
            worst = worst.max(e.certificate.deviation());
            detail.push(format!("base case sigma={sigma}: s {sv:.6}, coefficient distance {d:.2e}"));
        }
        Ok((worst <= 1e-10 && base <= 1e-12, worst.max(base), 1e-10, detail))
    })
}

/// Largest coefficient difference after normalizing `den(0) = 1`.
fn coeff_distance(a: &RationalFn, b: &RationalFn) -> f64 {
    let (a, b) = (a.normalized(), b.normalized());
    let d = |p: &Poly, q: &Poly| {
        let n = p.coeffs().len().max(q.coeffs().len());
        (0..n).map(|k| (p.coeff(k) - q.coeff(k)).norm()).fold(0.0, f64::max)
    };
    d(a.num(), b.num()).max(d(a.den(), b.den()))
}

/// Kernel factorization across every extension of the `n <= 3` pipelines.
pub fn criterion_kernel_factorization(cfg: &RunConfig) -> Check {
    timed(6, "kernel factorization", || {
        let s = cfg.settings();
        let steps = model_steps();
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for n in 1..=3 {
            let m = model::build_model(&steps[..n], false, &s)?;
            let e = m.extensions.last().expect("nonempty");
            let r = model::kernel_factorization_check(e, 100, cfg.seed ^ n as u64);
            worst = worst.max(r);
            detail.push(format!("step {n}: {r:.2e}"));
        }
        Ok((worst <= 1e-10, worst, 1e-10, detail))
    })
}

/// Closed-form norms of `b` and `Lb` against inner products.
pub fn criterion_norms(cfg: &RunConfig) -> Check {
    timed(7, "norm identities", || {
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for (name, sp) in spaces(cfg)? {
            let r = sp.norm_identities_check(Truncation::auto())?;
            let d = r.norm_b_sq_diff.max(r.norm_lb_sq_diff);
            worst = worst.max(d);
            detail.push(format!(
                "{name}: |b|^2 {:.12} vs {:.12}, |Lb|^2 {:.12} vs {:.12} (degree {}, tail {:.1e})",
                r.norm_b_sq_closed, r.norm_b_sq_gram, r.norm_lb_sq_closed, r.norm_lb_sq_gram, r.trunc_degree, r.tail_bound
            ));
        }
        let sp = HbSpace::new(RationalFn::from_poly(Poly::from_real(&[0.5, 0.5])), cfg.settings())?;
        let anchor = (sp.norm_b_sq() - 3.0).abs().max((sp.norm_lb_sq() - 0.5).abs());
        detail.push(format!("anchor (z+1)/2: |b|^2 = {}, |Lb|^2 = {}", sp.norm_b_sq(), sp.norm_lb_sq()));
        Ok((worst <= 1e-8 && anchor <= 1e-8, worst.max(anchor), 1e-8, detail))
    })
}

/// `⟨f, K_λ⟩_b = f(λ)` with the kernel cut to its Taylor polynomial of
/// degree 64. The detail lines also give the error when the degree is
/// chosen from the kernel's pole radius instead; that value is not judged.
pub fn criterion_reproducing(cfg: &RunConfig) -> Check {
    timed(8, "reproducing property", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 8);
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for (name, sp) in spaces(cfg)? {
            let (mut w, mut w_auto, mut at, mut deg_auto) = (0.0f64, 0.0f64, ZERO, 0);
            for _ in 0..20 {
                let lambda = C64::from_polar(0.8 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
                let deg = rng.gen_range(0..=8);
                let f = random_poly(&mut rng, deg);
                let k = sp.kernel_poly(lambda, 64)?;
                let e = (sp.inner_product(&f, &k)? - f.eval(lambda)).norm();
                if e > w {
                    w = e;
                    at = lambda;
                }
                let ka = sp.truncate(&sp.kernel_fn(lambda)?, Truncation::auto())?;
                deg_auto = deg_auto.max(ka.degree);
                w_auto = w_auto.max((sp.inner_product(&f, &ka.poly)? - f.eval(lambda)).norm());
            }
            worst = worst.max(w);
            detail.push(format!(
                "{name}: {w:.2e} (worst at |λ| = {:.3}); with degree up to {deg_auto}: {w_auto:.2e}",
                at.norm()
            ));
        }
        Ok((worst <= 1e-8, worst, 1e-8, detail))
    })
}

/// One corpus member for the lattice check: `f = (z - conj(λ))^j θ u` with
/// `θ` a Blaschke product and `u` outer.
struct LatticeCase {
    f: RationalFn,
    j: usize,
    theta_zeros: Vec<C64>,
}

fn lattice_cases(lambda: C64, mult: usize, rng: &mut ChaCha8Rng) -> Vec<LatticeCase> {
    (0..20)
        .map(|i| {
            let j = i % (mult + 1);
            let nz = (i / (mult + 1)) % 3;
            let theta_zeros: Vec<C64> = (0..nz.min(2))
                .map(|_| C64::from_polar(rng.gen_range(0.3..0.6), rng.gen_range(0.0..TAU)))
                .collect();
            let outer_root = C64::from_polar(rng.gen_range(2.0..3.0), rng.gen_range(0.0..TAU));
            let mut f = blaschke_product(&theta_zeros).mul_poly(&(&Poly::linear(lambda).powi(j) * &Poly::linear(outer_root)));
            if i % 4 == 3 {
                // a rational outer factor
                let pole = C64::from_polar(rng.gen_range(2.0..3.0), rng.gen_range(0.0..TAU));
                f = RationalFn::new(f.num().clone(), f.den() * &Poly::linear(pole)).expect("nonzero");
            }
            LatticeCase { f, j, theta_zeros }
        })
        .collect()
}

/// Classification against the principal-angle oracle at `K = 12`.
pub fn criterion_lattice(cfg: &RunConfig) -> Check {
    timed(9, "lattice classification", || {
        let s = cfg.settings();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 9);
        let steps = model_steps();
        let bs = vec![
            ("z/2".to_string(), RationalFn::from_poly(Poly::from_real(&[0.0, 0.5]))),
            ("(z+1)/2".to_string(), RationalFn::from_poly(Poly::from_real(&[0.5, 0.5]))),
            ("brownian(1)".to_string(), model::brownian_shift_b(1.0)?),
            ("model(n=2)".to_string(), model::build_model(&steps[..2], false, &s)?.b),
            ("model(n=3)".to_string(), model::build_model(&steps[..3], false, &s)?.b),
        ];
        let one = RationalFn::from_poly(Poly::one());
        let k = 12;
        let mut ok = true;
        let mut worst_same: f64 = 0.0;
        let mut closest_other = f64::INFINITY;
        let mut detail = Vec::new();
        for (name, b) in bs {
            let start = Instant::now();
            let sp = HbSpace::new(b, s)?;
            let (lambda, mult) = sp
                .boundary_zeros()
                .first()
                .map(|z| (z.lambda, z.mult))
                .unwrap_or((ONE, 0));
            let mut disagreements = 0;
            for case in lattice_cases(lambda, mult, &mut rng) {
                let d = lattice::classify(&sp, &case.f)?;
                let canonical = d.canonical();
                let same = lattice::subspace_distance(&sp, &case.f, &canonical, k)?.distance;
                worst_same = worst_same.max(same);
                let theta = blaschke_product(&d.theta_zeros);
                let mut rivals: Vec<RationalFn> = (0..=mult)
                    .filter(|&jj| jj != case.j)
                    .map(|jj| theta.mul_poly(&Poly::linear(lambda).powi(jj)))
                    .collect();
                if !case.theta_zeros.is_empty() {
                    let fewer = blaschke_product(&d.theta_zeros[1..]);
                    rivals.push(fewer.mul_poly(&Poly::linear(lambda).powi(case.j)));
                }
                for r in &rivals {
                    let dist = lattice::subspace_distance(&sp, &case.f, r, k)?.distance;
                    closest_other = closest_other.min(dist);
                    ok &= dist >= 0.3;
                }
                let to_one = lattice::subspace_distance(&sp, &case.f, &one, k)?.distance;
                let cyclic = lattice::is_cyclic(&sp, &case.f)?.cyclic;
                if cyclic != (to_one <= 0.15) {
                    disagreements += 1;
                }
                ok &= same <= 0.15 && d.boundary_orders.iter().all(|o| o.j == case.j);
                ok &= d.theta_zeros.len() == case.theta_zeros.len();
            }
            let secs = start.elapsed().as_secs_f64();
            ok &= disagreements == 0 && secs < 30.0;
            detail.push(format!("{name}: 20 functions, cyclicity disagreements {disagreements}, {secs:.2} s"));
        }
        detail.push(format!("largest same-class distance {worst_same:.2e}, smallest rival distance {closest_other:.3}"));
        Ok((ok, worst_same, 0.15, detail))
    })
}

/// `isometry_order` is unchanged by `b -> (b - α)/(1 - conj(α) b)`.
pub fn criterion_mobius(cfg: &RunConfig) -> Check {
    timed(10, "mobius invariance", || {
        let s = cfg.settings();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 10);
        let mut ok = true;
        let mut mismatches = 0.0;
        let mut detail = Vec::new();
        for (name, sp) in spaces(cfg)? {
            let base = isometry::isometry_order(&sp, 8, 10)?.map(|o| o.0);
            let mut orders = Vec::new();
            for _ in 0..5 {
                let alpha = C64::from_polar(0.7 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
                let ba = model::mobius_normalize(sp.b(), alpha, &s)?;
                let o = isometry::isometry_order(&HbSpace::new(ba, s)?, 8, 10)?.map(|o| o.0);
                if o != base {
                    ok = false;
                    mismatches += 1.0;
                }
                orders.push(o);
            }
            detail.push(format!("{name}: order {base:?}, after 5 maps {orders:?}"));
        }
        Ok((ok, mismatches, 0.0, detail))
    })
}

pub fn run_suite(cfg: &RunConfig) -> SuiteReport {
    let checks = vec![
        criterion_mate(cfg),
        criterion_rank_one(cfg),
        criterion_strict_order(cfg),
        criterion_recursion(cfg),
        criterion_certificates(cfg),
        criterion_kernel_factorization(cfg),
        criterion_norms(cfg),
        criterion_reproducing(cfg),
        criterion_lattice(cfg),
        criterion_mobius(cfg),
    ];
    let passed = checks.iter().filter(|c| c.passed).count();
    SuiteReport {
        failed: checks.len() - passed,
        passed,
        checks,
    }
}
