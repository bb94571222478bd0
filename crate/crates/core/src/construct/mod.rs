//! Certificates for positive definite homogeneous matrix polynomials:
//! local eliminations around sphere points, glued over a covering of the
//! sphere by caps.

mod local;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use local::{eliminate_at, power_sum};

use crate::certkit::{
    covering_points, ldl_or_witness, pd_constant, sphere_grid, ConeItem, Coverage, Piece,
    PiecewiseCertificate, Proof, Term,
};
use crate::error::{Error, Result};
use crate::matpoly::{MatrixPolynomial, QMatrix};
use crate::poly::rational::{approximate, fmt_rational, from_f64_dyadic, to_f64};
use crate::poly::{Form, Polynomial, Rational};
use local::fmt_point;

/// A local certificate: the identity holds everywhere, the weights are
/// positive on the cap `⟨x, x0⟩² ≥ τ·|x|²·|x0|²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPatch {
    pub center: Vec<Rational>,
    pub tau: Rational,
    pub piece: Piece,
    pub terms: Vec<Term>,
}

impl LocalPatch {
    pub fn to_certificate(
        &self,
        target: &MatrixPolynomial,
        vars: &[String],
    ) -> PiecewiseCertificate {
        let mut c = PiecewiseCertificate::new(vars.to_vec(), target.clone(), Coverage::Local);
        c.push_piece(self.piece.clone(), self.terms.clone());
        c
    }
}

#[derive(Clone, Debug)]
pub struct CoverOptions {
    /// Angles per great circle of the sphere grid.
    pub grid: usize,
    /// After fitting, `1 − τ` is multiplied by this factor in `(0, 1]`.
    pub cap_shrink: Rational,
    /// Sample count attached to each weight's sampled proof.
    pub samples: usize,
    pub seed: u64,
    pub max_patches: usize,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            grid: 32,
            cap_shrink: Rational::new(3.into(), 4.into()),
            samples: 64,
            seed: 0,
            max_patches: 4000,
        }
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `⟨x, x0⟩² − τ·|x|²·|x0|²`.
pub fn cap_polynomial(x0: &[Rational], tau: &Rational) -> Polynomial {
    let n = x0.len();
    let lin = (0..n).fold(Polynomial::zero(n), |acc, i| {
        acc + Polynomial::var(n, i).scale(&x0[i])
    });
    let norm = (0..n).fold(Polynomial::zero(n), |acc, i| {
        let x = Polynomial::var(n, i);
        acc + &x * &x
    });
    &(&lin * &lin) - &norm.scale(&(tau * dot(x0, x0)))
}

fn in_cap(x: &[Rational], x0: &[Rational], tau: &Rational) -> bool {
    let d = dot(x, x0);
    d.clone() * d >= tau * dot(x, x) * dot(x0, x0)
}

fn cap_box(x0: &[Rational], tau: &Rational) -> Vec<(Rational, Rational)> {
    let norm = dot(x0, x0);
    let s = from_f64_dyadic(
        (to_f64(&(Rational::one() - tau)) * to_f64(&norm)).sqrt() * 1.5,
        20,
    ) + Rational::new(1.into(), (1i64 << 20).into());
    x0.iter().map(|c| (c - &s, c + &s)).collect()
}

/// Weights compiled to floating point for screening cap candidates; the
/// exact check is left to the verifier.
struct F64Poly(Vec<(f64, Vec<i32>)>);

impl F64Poly {
    fn new(p: &Polynomial) -> Self {
        F64Poly(
            p.terms()
                .map(|(m, c)| (to_f64(c), m.0.iter().map(|&e| e as i32).collect()))
                .collect(),
        )
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(c, e)| e.iter().zip(x).fold(*c, |acc, (&k, &v)| acc * v.powi(k)))
            .sum()
    }
}

fn to_f64_point(p: &[Rational]) -> Vec<f64> {
    p.iter().map(to_f64).collect()
}

fn in_cap_f64(x: &[f64], x0: &[f64], tau: f64) -> bool {
    let d: f64 = x.iter().zip(x0).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum();
    let n0: f64 = x0.iter().map(|a| a * a).sum();
    d * d >= tau * nx * n0
}

/// Sign vectors with a leading `+1`: all of them up to size 4, otherwise
/// all-ones and the alternating one.
fn sign_patterns(m: usize) -> Vec<Vec<Rational>> {
    let one = Rational::one();
    if m <= 1 || m > 4 {
        let alt = (0..m)
            .map(|k| {
                if k % 2 == 0 {
                    one.clone()
                } else {
                    -one.clone()
                }
            })
            .collect();
        return if m <= 1 {
            vec![vec![one; m]]
        } else {
            vec![vec![one; m], alt]
        };
    }
    (0..1usize << (m - 1))
        .map(|bits| {
            (0..m)
                .map(|k| {
                    if k > 0 && bits >> (k - 1) & 1 == 1 {
                        -one.clone()
                    } else {
                        one.clone()
                    }
                })
                .collect()
        })
        .collect()
}

/// The widest `τ` (from `1/2`, halving `1 − τ`, never past `limit`) for
/// which all weights screen positive in floating point.
fn fit_cap(
    terms: &[Term],
    x0: &[Rational],
    grid: &[Vec<f64>],
    d: u32,
    seed: u64,
    limit: Option<&Rational>,
) -> Option<Rational> {
    let weights: Vec<F64Poly> = terms.iter().map(|t| F64Poly::new(&t.weight)).collect();
    let c = to_f64_point(x0);
    let scale = weights.iter().map(|w| w.eval(&c).abs()).fold(0.0, f64::max);
    let half = Rational::new(1.into(), 2.into());
    let mut tau = half.clone();
    for _ in 0..48 {
        if limit.is_some_and(|l| tau >= *l) {
            return None;
        }
        let t = to_f64(&tau);
        let mut sampler = F64Sampler::new(x0, &tau, seed);
        let random: Vec<Vec<f64>> = (0..400)
            .map(|_| sampler.next_point())
            .filter(|p| in_cap_f64(p, &c, t))
            .take(64)
            .collect();
        let positive = grid
            .iter()
            .filter(|p| in_cap_f64(p, &c, t))
            .chain(random.iter())
            .all(|p| {
                let r2: f64 = p.iter().map(|v| v * v).sum::<f64>().powi(d as i32 / 2);
                weights.iter().all(|w| w.eval(p) > 1e-9 * scale * r2)
            });
        if positive {
            return Some(tau);
        }
        tau = &tau + (Rational::one() - &tau) * &half;
    }
    None
}

/// Uniform floating-point points of the cap's sampling box.
struct F64Sampler {
    rng: ChaCha8Rng,
    bounds: Vec<(f64, f64)>,
}

impl F64Sampler {
    fn new(x0: &[Rational], tau: &Rational, seed: u64) -> Self {
        F64Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bounds: cap_box(x0, tau)
                .iter()
                .map(|(lo, hi)| (to_f64(lo), to_f64(hi)))
                .collect(),
        }
    }

    fn next_point(&mut self) -> Vec<f64> {
        self.bounds
            .iter()
            .map(|&(lo, hi)| self.rng.gen_range(lo..=hi))
            .collect()
    }
}

/// All weights positive (relative to their size at the centre) at `count`
/// seeded points of the cap.
fn screen_cap(
    weights: &[F64Poly],
    x0: &[Rational],
    tau: &Rational,
    d: u32,
    seed: u64,
    count: usize,
) -> bool {
    let c = to_f64_point(x0);
    let t = to_f64(tau);
    let scale = weights.iter().map(|w| w.eval(&c).abs()).fold(0.0, f64::max);
    let mut sampler = F64Sampler::new(x0, tau, seed);
    let mut seen = 0;
    for _ in 0..count * 20 {
        let p = sampler.next_point();
        if !in_cap_f64(&p, &c, t) {
            continue;
        }
        let r2: f64 = p.iter().map(|v| v * v).sum::<f64>().powi(d as i32 / 2);
        if !weights.iter().all(|w| w.eval(&p) > 1e-9 * scale * r2) {
            return false;
        }
        seen += 1;
        if seen == count {
            break;
        }
    }
    true
}

/// Symmetric Gram matrix of a quadratic form.
fn quadratic_gram(w: &Polynomial) -> Option<QMatrix> {
    let n = w.nvars();
    let mut q = QMatrix::zeros(n, n);
    let two = Rational::from_integer(2.into());
    for (m, c) in w.terms() {
        let idx: Vec<usize> = (0..n)
            .flat_map(|i| std::iter::repeat_n(i, m.0[i] as usize))
            .collect();
        match idx.as_slice() {
            [i, j] if i == j => q.set(*i, *i, c.clone()),
            [i, j] => {
                q.set(*i, *j, c / &two);
                q.set(*j, *i, c / &two);
            }
            _ => return None,
        }
    }
    Some(q)
}

fn min_eigenvalue(q: &[f64], n: usize) -> f64 {
    let m = nalgebra::DMatrix::from_row_slice(n, n, q);
    m.symmetric_eigenvalues().min()
}

/// An exact proof that the quadratic form `w` is nonnegative on the cap
/// `g = ⟨x, x0⟩² − τ|x|²|x0|² ≥ 0`: `w = λ·g + Σ d_k ℓ_k(x)²` with `λ ≥ 0`,
/// `λ` chosen to maximize the smallest eigenvalue of `W − λG`.
pub fn cap_quadratic_proof(
    w: &Polynomial,
    x0: &[Rational],
    tau: &Rational,
) -> Result<Option<Proof>> {
    let n = w.nvars();
    let Some(wq) = quadratic_gram(w) else {
        return Ok(None);
    };
    let Some(gq) = quadratic_gram(&cap_polynomial(x0, tau)) else {
        return Ok(None);
    };
    let wf: Vec<f64> = (0..n * n).map(|k| to_f64(wq.get(k / n, k % n))).collect();
    let gf: Vec<f64> = (0..n * n).map(|k| to_f64(gq.get(k / n, k % n))).collect();
    let f = |l: f64| -> f64 {
        let q: Vec<f64> = wf.iter().zip(&gf).map(|(a, b)| a - l * b).collect();
        min_eigenvalue(&q, n)
    };
    let c = to_f64_point(x0);
    let along: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| c[i] * wf[i * n + j] * c[j])
        .sum();
    let n0: f64 = c.iter().map(|v| v * v).sum();
    let hi = along / ((1.0 - to_f64(tau)) * n0 * n0);
    if !(hi.is_finite() && hi >= 0.0) {
        return Ok(None);
    }
    // golden section on the concave function f over [0, hi]
    let (mut lo, mut up) = (0.0, hi);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (a, b) = (up - r * (up - lo), lo + r * (up - lo));
        if f(a) < f(b) {
            lo = a;
        } else {
            up = b;
        }
    }
    let lambda = approximate(0.5 * (lo + up), 1 << 30);
    if lambda.is_negative() {
        return Ok(None);
    }
    let rest = wq.sub(&gq.scale(&lambda));
    let Ok(ldl) = ldl_or_witness(&rest)? else {
        return Ok(None);
    };
    let mut items = Vec::new();
    if !lambda.is_zero() {
        items.push(ConeItem::new(lambda, Polynomial::one(n), vec![0]));
    }
    for (dk, l) in ldl {
        let lin = (0..n).fold(Polynomial::zero(n), |acc, i| {
            acc + Polynomial::var(n, i).scale(&l[i])
        });
        items.push(ConeItem::new(dk, lin, vec![]));
    }
    Ok(Some(Proof::ConeCombination(items)))
}

/// Exact proofs for every weight of a degree-2 patch, or `None`.
fn exact_cap_proofs(terms: &[Term], x0: &[Rational], tau: &Rational) -> Result<Option<Vec<Proof>>> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if !matches!(t.proof, Proof::Sampled { .. }) {
            out.push(t.proof.clone());
            continue;
        }
        match cap_quadratic_proof(&t.weight, x0, tau)? {
            Some(p) => out.push(p),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// A local patch at `x0` for a homogeneous symmetric `A` of even degree:
/// elimination at `x0`, then the widest cap (from `τ = 1/2`, halving `1 − τ`)
/// on which all weights are nonnegative at the grid points and at seeded
/// random points; finally `1 − τ` is shrunk once more by `cap_shrink`.
pub fn local_certificate(
    a: &MatrixPolynomial,
    x0: &[Rational],
    grid: &[Vec<Rational>],
    opts: &CoverOptions,
    seed: u64,
) -> Result<LocalPatch> {
    let d = a
        .homogeneous_degree()
        .ok_or_else(|| Error::NotHomogeneous(a.max_degree().max(0) as u32))?;
    if d % 2 == 1 {
        return Err(Error::InvalidArgument(format!("odd degree {d}")));
    }
    let n = a.nvars();
    if x0.len() != n || x0.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidArgument(
            "centre must be a nonzero point".into(),
        ));
    }
    let proof = Proof::Sampled {
        samples: opts.samples,
        seed,
    };
    // several perturbations `ε·p·ssᵀ`; the widest cap wins
    let mass = power_sum(n, d);
    let grid: Vec<Vec<f64>> = grid.iter().map(|p| to_f64_point(p)).collect();
    let mut best: Option<(Rational, Vec<Term>)> = None;
    for signs in sign_patterns(a.rows()) {
        let eps = local::admissible_eps(a, x0, &mass.0, &signs)?;
        for shrink in [1, 4] {
            let e = &eps / Rational::from_integer(shrink.into());
            let terms = local::eliminate_with(a, x0, &mass, &proof, &signs, &e)?;
            let limit = best.as_ref().map(|(t, _)| t.clone());
            if let Some(tau) = fit_cap(&terms, x0, &grid, d, seed, limit.as_ref()) {
                if best.as_ref().is_none_or(|(t, _)| tau < *t) {
                    best = Some((tau, terms));
                }
            }
        }
    }
    let (mut tau, terms) =
        best.ok_or_else(|| Error::Construction(format!("no cap found around {}", fmt_point(x0))))?;
    tau = Rational::one() - (Rational::one() - &tau) * &opts.cap_shrink;
    // denser screening of the final cap; shrink further if it fails
    let weights: Vec<F64Poly> = terms.iter().map(|t| F64Poly::new(&t.weight)).collect();
    let mut validated = false;
    for _ in 0..16 {
        if screen_cap(&weights, x0, &tau, d, seed ^ 0x5eed, 1024) {
            validated = true;
            break;
        }
        tau = &tau + (Rational::one() - &tau) / Rational::from_integer(2.into());
    }
    if !validated {
        return Err(Error::Construction(format!(
            "no cap found around {}",
            fmt_point(x0)
        )));
    }
    let mut terms = terms;
    if d == 2 {
        // quadratic weights on a cap: exact proofs, shrinking if needed
        let mut t = tau.clone();
        for _ in 0..8 {
            if let Some(proofs) = exact_cap_proofs(&terms, x0, &t)? {
                for (term, p) in terms.iter_mut().zip(proofs) {
                    term.proof = p;
                }
                tau = t;
                break;
            }
            t = &t + (Rational::one() - &t) / Rational::from_integer(2.into());
        }
    }
    let piece = Piece::new(
        format!("cap at {} (tau {})", fmt_point(x0), fmt_rational(&tau)),
        vec![cap_polynomial(x0, &tau)],
    )
    .with_sample_box(cap_box(x0, &tau));
    Ok(LocalPatch {
        center: x0.to_vec(),
        tau,
        piece,
        terms,
    })
}

/// The first point of `pts` where `A` is not positive definite, if any.
pub fn first_non_pd(a: &MatrixPolynomial, pts: &[Vec<Rational>]) -> Result<Option<Vec<Rational>>> {
    let bad: Vec<Option<Vec<Rational>>> = pts
        .par_iter()
        .map(|p| -> Result<Option<Vec<Rational>>> {
            let q = a.evaluate(p)?;
            Ok((!pd_constant(&q)?).then(|| p.clone()))
        })
        .collect::<Result<_>>()?;
    Ok(bad.into_iter().flatten().next())
}

/// Exact cap membership, decided in floating point when far from the
/// boundary.
fn covers(pa: &LocalPatch, p: &[Rational], tau: &Rational) -> bool {
    let (x, c, t) = (to_f64_point(p), to_f64_point(&pa.center), to_f64(tau));
    if in_cap_f64(&x, &c, t + 1e-6) {
        return true;
    }
    if !in_cap_f64(&x, &c, t - 1e-6) {
        return false;
    }
    in_cap(p, &pa.center, tau)
}

/// A global certificate for a homogeneous, positive definite `A` of even
/// degree: greedy patches at sphere grid points until the grid (with a
/// margin), a grid four times finer and the verifier's sampled points are all
/// covered.
pub fn cover_sphere(
    a: &MatrixPolynomial,
    vars: &[String],
    opts: &CoverOptions,
) -> Result<PiecewiseCertificate> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = a.nvars();
    if vars.len() != n {
        return Err(Error::NvarsMismatch {
            expected: n,
            found: vars.len(),
        });
    }
    let grid = sphere_grid(n, opts.grid);
    if let Some(p) = first_non_pd(a, &grid)? {
        return Err(Error::NotPositiveDefinite {
            point: fmt_point(&p),
        });
    }
    let mut cert = PiecewiseCertificate::new(vars.to_vec(), a.clone(), Coverage::Global);
    let mut patches: Vec<LocalPatch> = Vec::new();
    let half = Rational::new(1.into(), 2.into());
    let add_patch = |patches: &mut Vec<LocalPatch>, x0: &[Rational]| -> Result<()> {
        if patches.len() >= opts.max_patches {
            return Err(Error::Construction(format!(
                "patch budget of {} exceeded near {}",
                opts.max_patches,
                fmt_point(x0)
            )));
        }
        let seed = opts.seed.wrapping_add(patches.len() as u64);
        patches.push(local_certificate(a, x0, &grid, opts, seed)?);
        Ok(())
    };
    // greedy pass: a grid point counts as covered only well inside a cap
    for p in &grid {
        let covered = patches.iter().any(|pa| {
            let margin = &pa.tau + (Rational::one() - &pa.tau) * &half;
            covers(pa, p, &margin)
        });
        if !covered {
            add_patch(&mut patches, p)?;
        }
    }
    // refinement: finer grid plus the points the verifier samples
    let mut checks = sphere_grid(n, 4 * opts.grid);
    checks.extend(
        covering_points(n, 2000, 0)
            .into_iter()
            .filter(|p| p.iter().any(|c| !c.is_zero())),
    );
    for p in &checks {
        if patches.iter().any(|pa| covers(pa, p, &pa.tau)) {
            continue;
        }
        let x0 = p.clone();
        if let Some(bad) = first_non_pd(a, std::slice::from_ref(&x0))? {
            return Err(Error::NotPositiveDefinite {
                point: fmt_point(&bad),
            });
        }
        add_patch(&mut patches, &x0)?;
        if !in_cap(
            p,
            &patches.last().expect("just added").center,
            &patches.last().expect("just added").tau,
        ) {
            return Err(Error::Construction(format!(
                "cannot cover {}",
                fmt_point(p)
            )));
        }
    }
    for pa in patches {
        cert.push_piece(pa.piece, pa.terms);
    }
    Ok(cert)
}

/// Result of [`epsilon_margin`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonWitness {
    pub epsilon: Rational,
    /// Sphere grid resolution used for the validation.
    pub grid: usize,
    /// Smallest value of `a / c̃` seen on the grid.
    pub min_value: Rational,
}

/// For a positive definite form `a` and a psd form `c` of the same even
/// degree: `ε = m/2` (rounded down to a dyadic rational), where `m` is the
/// grid minimum of `a / c̃` with `c̃ = c + Σ x_i^d`. Validated: `a − εc > 0`
/// on the grid and on a grid twice as fine.
pub fn epsilon_margin(a: &Form, c: &Form, grid: usize) -> Result<EpsilonWitness> {
    if a.degree() != c.degree() || a.nvars() != c.nvars() {
        return Err(Error::InvalidArgument(
            "forms of different degree or ring".into(),
        ));
    }
    let d = a.degree();
    if d % 2 == 1 {
        return Err(Error::InvalidArgument(format!("odd degree {d}")));
    }
    let n = a.nvars();
    let ct = c.poly() + &power_sum(n, d).0;
    let pts = sphere_grid(n, grid);
    let mut min: Option<Rational> = None;
    for p in &pts {
        let av = a.poly().evaluate(p)?;
        if !av.is_positive() {
            return Err(Error::NotPositiveDefinite {
                point: fmt_point(p),
            });
        }
        let q = av / ct.evaluate(p)?;
        if min.as_ref().is_none_or(|m| &q < m) {
            min = Some(q);
        }
    }
    let m = min.expect("nonempty grid");
    let mut eps = crate::poly::rational::dyadic_floor(&(&m / Rational::from_integer(2.into())));
    if !eps.is_positive() {
        eps = &m / Rational::from_integer(2.into());
    }
    let diff = a.poly() - &c.poly().scale(&eps);
    for p in pts.iter().chain(sphere_grid(n, 2 * grid).iter()) {
        if !diff.evaluate(p)?.is_positive() {
            return Err(Error::Construction(format!(
                "a − εc not positive at {} for ε = {}",
                fmt_point(p),
                fmt_rational(&eps)
            )));
        }
    }
    Ok(EpsilonWitness {
        epsilon: eps,
        grid,
        min_value: m,
    })
}

/// `A + ε·(Σ x_i²)^{d/2}·Id` for entries homogeneous of even degree `d`
/// (`d = 2` for the zero matrix).
pub fn epsilon_regularize(a: &MatrixPolynomial, eps: &Rational) -> Result<MatrixPolynomial> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "ε = {} is not positive",
            fmt_rational(eps)
        )));
    }
    let d = if a.is_zero() {
        2
    } else {
        a.homogeneous_degree()
            .ok_or_else(|| Error::NotHomogeneous(a.max_degree().max(0) as u32))?
    };
    if d % 2 == 1 {
        return Err(Error::InvalidArgument(format!("odd degree {d}")));
    }
    let n = a.nvars();
    let sq = power_sum(n, 2).0.pow(d / 2).scale(eps);
    let m = a.rows();
    Ok(a.add(&MatrixPolynomial::scaled_constant(
        &sq,
        &crate::matpoly::QMatrix::identity(m),
    )))
}
