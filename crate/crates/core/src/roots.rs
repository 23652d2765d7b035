//! Polynomial root finding: Aberth–Ehrlich iteration from a randomly
//! perturbed starting circle, with a companion-matrix fallback, followed by
//! multiplicity-aware clustering.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::poly::{Poly, C64, ONE, ZERO};
use crate::{HbError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootOptions {
    /// Accepted residual `|p(r)| <= tol * sum |c_k| |r|^k`.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed for the starting-circle perturbation.
    pub seed: u64,
    /// Greedy union radius for the last clustering pass.
    pub cluster_tol: f64,
    /// First single-linkage radius when looking for multiple roots.
    pub link_radius: f64,
    /// Relative size of the lower Taylor coefficients at a cluster centre
    /// under which the cluster is accepted as one multiple root.
    pub multiplicity_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: 1e-11,
            max_iter: 2000,
            seed: 0x0ab3_27f1,
            cluster_tol: 1e-7,
            link_radius: 0.05,
            multiplicity_tol: 1e-10,
        }
    }
}

impl RootOptions {
    pub fn with_seed(seed: u64) -> Self {
        RootOptions {
            seed,
            ..Self::default()
        }
    }
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootCluster {
    pub center: C64,
    pub multiplicity: usize,
}

/// All roots of `p` with multiplicity.
pub fn roots(p: &Poly, opts: &RootOptions) -> Result<Vec<C64>> {
    let deg = p.degree().ok_or(HbError::ConstantPolynomial)?;
    if deg == 0 {
        return Err(HbError::ConstantPolynomial);
    }
    // exact zeros at the origin
    let zeros = p.coeffs().iter().take_while(|c| **c == ZERO).count();
    let core = Poly::new(p.coeffs()[zeros..].to_vec());
    let mut out = vec![ZERO; zeros];
    match core.degree().unwrap_or(0) {
        0 => {}
        1 => out.push(-core.coeff(0) / core.coeff(1)),
        _ => out.extend(nonzero_roots(&core, opts)?),
    }
    Ok(out)
}

fn nonzero_roots(p: &Poly, opts: &RootOptions) -> Result<Vec<C64>> {
    let (mut found, converged) = aberth(p, opts);
    polish(p, &mut found);
    let worst = worst_residual(p, &found);
    if converged && worst <= opts.tol {
        return Ok(found);
    }
    let mut comp = companion_roots(p);
    polish(p, &mut comp);
    let worst_comp = worst_residual(p, &comp);
    if worst_comp <= opts.tol {
        return Ok(comp);
    }
    // Multiple roots stall Aberth's quadratic phase without spoiling the
    // residual; accept the better of the two if it is within tolerance.
    let (best, r) = if worst <= worst_comp {
        (found, worst)
    } else {
        (comp, worst_comp)
    };
    if r <= opts.tol {
        return Ok(best);
    }
    Err(HbError::NoConvergence {
        iterations: opts.max_iter,
        residual: r,
        partial: best,
    })
}

fn residual(p: &Poly, z: C64) -> f64 {
    let s = p.eval_scale(z);
    if s == 0.0 {
        return 0.0;
    }
    p.eval(z).norm() / s
}

fn worst_residual(p: &Poly, rs: &[C64]) -> f64 {
    rs.iter().map(|&r| residual(p, r)).fold(0.0, f64::max)
}

fn aberth(p: &Poly, opts: &RootOptions) -> (Vec<C64>, bool) {
    let n = p.degree().unwrap();
    let dp = p.derivative();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let radius = (p.coeff(0).norm() / p.leading().norm()).powf(1.0 / n as f64);
    let offset: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let jitter: f64 = rng.gen_range(0.9..1.1);
            let ang = offset + std::f64::consts::TAU * k as f64 / n as f64 + rng.gen_range(-0.1..0.1);
            C64::from_polar(radius * jitter, ang)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..opts.max_iter {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let pv = p.eval(z[i]);
            if pv == ZERO {
                done[i] = true;
                continue;
            }
            let ratio = pv / dp.eval(z[i]);
            let sum: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| ONE / (z[i] - z[j]))
                .sum();
            let w = ratio / (ONE - ratio * sum);
            if !w.is_finite() {
                all = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1e-300) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            return (z, true);
        }
    }
    let ok = z.iter().all(|&r| residual(p, r) <= opts.tol);
    (z, ok)
}

/// A few guarded Newton steps; a step is kept only if it lowers the residual.
fn polish(p: &Poly, rs: &mut [C64]) {
    let dp = p.derivative();
    for r in rs.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(*r);
            if d == ZERO {
                break;
            }
            let cand = *r - p.eval(*r) / d;
            if cand.is_finite() && p.eval(cand).norm() < p.eval(*r).norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
}

fn companion_roots(p: &Poly) -> Vec<C64> {
    let n = p.degree().unwrap();
    let lead = p.leading();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeff(i) / lead;
    }
    match m.clone().try_schur(1e-15, 10_000) {
        Some(s) => s
            .eigenvalues()
            .map(|v| v.iter().copied().collect())
            .unwrap_or_default(),
        None => Vec::new(),
    }
}

/// Roots of `p` grouped into clusters with multiplicities.
pub fn root_clusters(p: &Poly, opts: &RootOptions) -> Result<Vec<RootCluster>> {
    let raw = roots(p, opts)?;
    Ok(cluster_roots(p, &raw, opts))
}

/// Group raw roots into multiple roots.
///
/// Roots are first linked at `link_radius`; a group of size `m` is
/// accepted as an `m`-fold root when the Taylor coefficients of `p` of
/// order `< m` at the group mean vanish to `multiplicity_tol` (relative
/// to their evaluation scale). Rejected groups are re-linked at a tenth of
/// the radius until the radius reaches `cluster_tol`.
pub fn cluster_roots(p: &Poly, raw: &[C64], opts: &RootOptions) -> Vec<RootCluster> {
    let mut out = Vec::new();
    resolve(p, raw.to_vec(), opts.link_radius, opts, &mut out);
    out
}

fn resolve(p: &Poly, group: Vec<C64>, link: f64, opts: &RootOptions, out: &mut Vec<RootCluster>) {
    for g in link_groups(&group, link) {
        let m = g.len();
        if m == 1 {
            out.push(RootCluster {
                center: g[0],
                multiplicity: 1,
            });
        } else if let Some(center) = accept_multiple(p, &g, link, opts) {
            out.push(RootCluster {
                center,
                multiplicity: m,
            });
        } else if link <= opts.cluster_tol {
            out.push(RootCluster {
                center: g.iter().sum::<C64>() / m as f64,
                multiplicity: m,
            });
        } else {
            let next = (link / 10.0).max(opts.cluster_tol);
            resolve(p, g, next, opts, out);
        }
    }
}

fn link_groups(pts: &[C64], radius: f64) -> Vec<Vec<C64>> {
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let nx = parent[j];
            parent[j] = r;
            j = nx;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (pts[i] - pts[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for (i, &p) in pts.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, v)) => v.push(p),
            None => groups.push((r, vec![p])),
        }
    }
    groups.into_iter().map(|(_, v)| v).collect()
}

/// Taylor coefficients of `p` at `c` together with their evaluation scales.
pub(crate) fn taylor_with_scale(p: &Poly, c: C64) -> (Vec<C64>, Vec<f64>) {
    let t = p.taylor_at(c);
    let abs = Poly::new(p.coeffs().iter().map(|x| C64::new(x.norm(), 0.0)).collect());
    let s = abs
        .taylor_at(C64::new(c.norm(), 0.0))
        .into_iter()
        .map(|x| x.re)
        .collect();
    (t, s)
}

fn accept_multiple(p: &Poly, group: &[C64], link: f64, opts: &RootOptions) -> Option<C64> {
    let m = group.len();
    let mean = group.iter().sum::<C64>() / m as f64;
    let vanishes = |c: C64| {
        let (t, s) = taylor_with_scale(p, c);
        (0..m).all(|j| t[j].norm() <= opts.multiplicity_tol * s[j])
    };
    // Newton on p^(m-1), which has a simple root at an m-fold root of p.
    let d = p.nth_derivative(m - 1);
    let dd = d.derivative();
    let mut c = mean;
    for _ in 0..20 {
        let den = dd.eval(c);
        if den == ZERO {
            break;
        }
        let cand = c - d.eval(c) / den;
        if !cand.is_finite() || (cand - mean).norm() > link {
            break;
        }
        let done = cand == c;
        c = cand;
        if done {
            break;
        }
    }
    if vanishes(c) {
        Some(c)
    } else if vanishes(mean) {
        Some(mean)
    } else {
        None
    }
}

/// Expand clusters back into a flat root list.
pub fn flatten(clusters: &[RootCluster]) -> Vec<C64> {
    clusters
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.center, c.multiplicity))
        .collect()
}
