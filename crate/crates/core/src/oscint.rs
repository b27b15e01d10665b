//! Oscillatory integrals ∫ e^{iλΦ(ξ)} a(ξ) dξ in one and two variables:
//! adaptive evaluation, critical point search and classification, and
//! log-log decay fits.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::quad::{adaptive, QuadOptions};
use crate::specfun::CanonicalCausticKind;
use crate::window::Bump;
use crate::{c, Complex, Error, Real, Result, Scalar};

type RealFn = Arc<dyn Fn(Scalar) -> Scalar + Send + Sync>;
type DerivFn = Arc<dyn Fn(Scalar, usize) -> Scalar + Send + Sync>;
type SymbolFn = Arc<dyn Fn(Scalar) -> Complex + Send + Sync>;

/// A one-dimensional phase, its amplitude and the amplitude's support.
#[derive(Clone)]
pub struct PhaseSpec {
    phase: RealFn,
    derivs: Option<DerivFn>,
    symbol: SymbolFn,
    pub support: (Scalar, Scalar),
}

impl std::fmt::Debug for PhaseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseSpec")
            .field("support", &self.support)
            .field("analytic_derivatives", &self.derivs.is_some())
            .finish()
    }
}

impl PhaseSpec {
    /// Phase without analytic derivatives; stencils are used instead.
    pub fn new(
        phase: impl Fn(Scalar) -> Scalar + Send + Sync + 'static,
        symbol: impl Fn(Scalar) -> Complex + Send + Sync + 'static,
        support: (Scalar, Scalar),
    ) -> Self {
        Self { phase: Arc::new(phase), derivs: None, symbol: Arc::new(symbol), support }
    }

    /// Supply `d(x, j)` = Φ^{(j)}(x) for j = 1..=4.
    pub fn with_derivatives(mut self, d: impl Fn(Scalar, usize) -> Scalar + Send + Sync + 'static) -> Self {
        self.derivs = Some(Arc::new(d));
        self
    }

    /// Polynomial phase Σ coeffs[j] ξ^j with exact derivatives.
    pub fn polynomial(coeffs: Vec<Scalar>, symbol: impl Fn(Scalar) -> Complex + Send + Sync + 'static, support: (Scalar, Scalar)) -> Self {
        let p = Arc::new(coeffs);
        let q = p.clone();
        Self::new(move |x| poly_deriv(&p, x, 0), symbol, support).with_derivatives(move |x, j| poly_deriv(&q, x, j))
    }

    /// Polynomial phase with the plateau bump on the given support as amplitude.
    pub fn polynomial_with_bump(coeffs: Vec<Scalar>, support: (Scalar, Scalar)) -> Self {
        let (lo, hi) = support;
        let w = hi - lo;
        let bump = Bump::new(lo, lo + 0.25 * w, hi - 0.25 * w, hi);
        Self::polynomial(coeffs, move |x| c(bump.eval(x), 0.0), support)
    }

    pub fn phase(&self, x: Scalar) -> Scalar {
        (self.phase)(x)
    }

    pub fn symbol(&self, x: Scalar) -> Complex {
        (self.symbol)(x)
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.derivs.is_some()
    }

    /// Φ^{(j)}(x), analytic when supplied, otherwise a central stencil.
    pub fn derivative(&self, x: Scalar, j: usize) -> Scalar {
        if j == 0 {
            return self.phase(x);
        }
        if let Some(d) = &self.derivs {
            return d(x, j);
        }
        self.stencil_derivative(x, j)
    }

    /// Central finite differences (second-order) of order 1..=4.
    pub fn stencil_derivative(&self, x: Scalar, j: usize) -> Scalar {
        let scale = (self.support.1 - self.support.0).abs().max(1e-3);
        let e = scale * [0.0, 1e-5, 1e-4, 1e-3, 4e-3][j.min(4)];
        let f = |t: Scalar| self.phase(x + t * e);
        match j {
            1 => (f(1.0) - f(-1.0)) / (2.0 * e),
            2 => (f(1.0) - 2.0 * f(0.0) + f(-1.0)) / (e * e),
            3 => (f(2.0) - 2.0 * f(1.0) + 2.0 * f(-1.0) - f(-2.0)) / (2.0 * e.powi(3)),
            4 => (f(2.0) - 4.0 * f(1.0) + 6.0 * f(0.0) - 4.0 * f(-1.0) + f(-2.0)) / e.powi(4),
            _ => Scalar::NAN,
        }
    }
}

fn poly_deriv(coeffs: &[Scalar], x: Scalar, j: usize) -> Scalar {
    let mut acc = 0.0;
    for (k, a) in coeffs.iter().enumerate().skip(j).rev() {
        let mut f = 1.0;
        for m in 0..j {
            f *= (k - m) as Scalar;
        }
        acc = acc * x + a * f;
    }
    acc
}

/// Tolerances for [`evaluate`].
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub abs_tol: Scalar,
    pub rel_tol: Scalar,
    pub max_evals: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-15, rel_tol: 1e-10, max_evals: 4_000_000 }
    }
}

/// Relative size of the roundoff floor with respect to ∫|a|.
pub const ROUNDOFF_FLOOR: Scalar = 1e-13;

/// Value of an oscillatory integral and its error estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OscValue {
    pub value: Complex,
    pub error: Scalar,
    pub evals: usize,
}

/// ∫ e^{iλΦ} a over the support with default tolerances.
pub fn evaluate(spec: &PhaseSpec, lambda: Scalar) -> Result<OscValue> {
    evaluate_with(spec, lambda, EvalOptions::default())
}

/// ∫ e^{iλΦ} a with explicit tolerances. Initial panels follow the number
/// of oscillations so no panel starts out under-resolved.
pub fn evaluate_with(spec: &PhaseSpec, lambda: Scalar, opts: EvalOptions) -> Result<OscValue> {
    if !(lambda >= 1.0) {
        return Err(Error::PreconditionViolated(format!("λ must be ≥ 1, got {lambda}")));
    }
    let (lo, hi) = spec.support;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::PreconditionViolated("support must be a bounded interval".into()));
    }
    let mut max_d: Scalar = 0.0;
    let mut l1 = 0.0;
    for i in 0..=256 {
        let x = lo + (hi - lo) * i as Scalar / 256.0;
        max_d = max_d.max(spec.derivative(x, 1).abs());
        l1 += spec.symbol(x).norm() * (hi - lo) / 257.0;
    }
    let osc = (lambda * max_d * (hi - lo) / (2.0 * PI)).ceil() as usize;
    let q = QuadOptions {
        // Cancellation leaves a roundoff floor proportional to ∫|a|.
        abs_tol: opts.abs_tol.max(ROUNDOFF_FLOOR * l1),
        rel_tol: opts.rel_tol,
        initial_panels: (osc / 2 + 4).min(opts.max_evals / 60),
        max_evals: opts.max_evals,
    };
    let r = adaptive(|x| spec.symbol(x) * c(0.0, lambda * spec.phase(x)).exp(), lo, hi, q);
    if !r.converged {
        return Err(Error::BudgetExceeded { value: r.value, error: r.error });
    }
    Ok(OscValue { value: r.value, error: r.error, evals: r.evals })
}

/// Kind of a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalClass {
    NonDegenerate,
    Degenerate(CanonicalCausticKind),
    /// Order beyond the swallowtail or a vanishing Hessian in 2-D.
    HigherOrder,
}

/// A zero of ∇Φ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: Vec<Scalar>,
    /// Smallest j ≥ 2 with Φ^{(j)} ≠ 0, minus one.
    pub order: usize,
    /// Rank of the Hessian (2-D only; equals 1 or 0 in 1-D).
    pub hessian_rank: usize,
    pub classification: CriticalClass,
}

/// Outcome of a critical point search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalSet {
    pub points: Vec<CriticalPoint>,
    /// Set when two roots lie within one scan cell of each other.
    pub possibly_incomplete: bool,
}

/// Grid resolution of the critical point scan.
pub const SCAN_POINTS: usize = 1000;
/// Relative threshold under which a derivative counts as zero.
pub const CLASS_TOL: Scalar = 1e-6;
const GRAD_TOL: Scalar = 1e-10;

fn classify_order(order: usize) -> CriticalClass {
    match order {
        1 => CriticalClass::NonDegenerate,
        2 => CriticalClass::Degenerate(CanonicalCausticKind::Fold),
        3 => CriticalClass::Degenerate(CanonicalCausticKind::Cusp),
        4 => CriticalClass::Degenerate(CanonicalCausticKind::Swallowtail),
        _ => CriticalClass::HigherOrder,
    }
}

/// All zeros of Φ′ inside the support.
pub fn find_critical_points(spec: &PhaseSpec) -> Result<CriticalSet> {
    let (lo, hi) = spec.support;
    let n = SCAN_POINTS;
    let dx = (hi - lo) / (n - 1) as Scalar;
    let xs: Vec<Scalar> = (0..n).map(|i| lo + i as Scalar * dx).collect();
    let d1: Vec<Scalar> = xs.iter().map(|&x| spec.derivative(x, 1)).collect();
    let scale = d1.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);

    let mut seeds = Vec::new();
    for i in 0..n {
        if d1[i] == 0.0 {
            seeds.push(xs[i]);
            continue;
        }
        if i + 1 < n && d1[i] * d1[i + 1] < 0.0 {
            seeds.push(0.5 * (xs[i] + xs[i + 1]));
        }
        // Touching zeros do not change sign; catch them as minima of |Φ′|.
        if i > 0 && i + 1 < n {
            let (a, b, m) = (d1[i - 1].abs(), d1[i + 1].abs(), d1[i].abs());
            if m <= a && m <= b && m < 1e-2 * scale && d1[i - 1] * d1[i + 1] > 0.0 {
                seeds.push(xs[i]);
            }
        }
    }

    let mut roots: Vec<Scalar> = Vec::new();
    for s in seeds {
        if let Some(x) = refine_root(spec, s, lo, hi) {
            roots.push(x);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let merge = 1e-7 * (hi - lo);
    roots.dedup_by(|a, b| (*a - *b).abs() < merge);

    let mut possibly_incomplete = false;
    for w in roots.windows(2) {
        if w[1] - w[0] < dx {
            possibly_incomplete = true;
        }
    }

    let points = roots
        .into_iter()
        .map(|x| {
            let mut order = 5;
            for j in 2..=4 {
                let ref_scale = scale.max(spec.derivative(x, j).abs());
                if spec.derivative(x, j).abs() > CLASS_TOL * ref_scale.max(1.0) {
                    order = j - 1;
                    break;
                }
            }
            let hessian_rank = usize::from(spec.derivative(x, 2).abs() > CLASS_TOL * scale);
            CriticalPoint { location: vec![x], order, hessian_rank, classification: classify_order(order) }
        })
        .collect();
    Ok(CriticalSet { points, possibly_incomplete })
}

// Newton on u = Φ′/Φ″, which keeps quadratic convergence at multiple roots.
fn refine_root(spec: &PhaseSpec, seed: Scalar, lo: Scalar, hi: Scalar) -> Option<Scalar> {
    let mut x = seed;
    for _ in 0..100 {
        let f1 = spec.derivative(x, 1);
        if f1 == 0.0 {
            break;
        }
        let f2 = spec.derivative(x, 2);
        let f3 = spec.derivative(x, 3);
        let step = if f2 != 0.0 {
            let u = f1 / f2;
            let du = 1.0 - f1 * f3 / (f2 * f2);
            if du.abs() > 1e-12 {
                u / du
            } else {
                u
            }
        } else {
            break;
        };
        let next = x - step;
        if !next.is_finite() {
            return None;
        }
        x = next;
        if step.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    let tol = GRAD_TOL.max(1e-8 * spec.derivative(x, 2).abs().max(1.0));
    if x < lo || x > hi || spec.derivative(x, 1).abs() > tol.max(1e-9) {
        return None;
    }
    Some(x)
}

/// Least-squares fit |I| ≈ C λ^{exponent}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: Scalar,
    pub constant: Scalar,
    /// Largest |log data − log fit|.
    pub residual: Scalar,
    pub lambda_grid: Vec<Scalar>,
}

/// Log-log least-squares line through (λ, |I|) pairs.
pub fn decay_fit<T: Real>(values: &[(T, T)]) -> Result<DecayFit> {
    if values.len() < 4 {
        return Err(Error::DegenerateInput(format!("need at least 4 points, got {}", values.len())));
    }
    if values.iter().any(|(l, m)| !(*m > T::zero()) || !(*l > T::zero())) {
        return Err(Error::DegenerateInput("moduli and λ must be positive".into()));
    }
    if values.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::DegenerateInput("λ grid must be strictly increasing".into()));
    }
    let n = T::from_usize(values.len()).unwrap();
    let pts: Vec<(T, T)> = values.iter().map(|(l, m)| (l.ln(), m.ln())).collect();
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let sxy = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = pts.iter().fold(T::zero(), |a, p| a.max((p.1 - (icpt + slope * p.0)).abs()));
    let f = |v: T| v.to_f64().unwrap();
    Ok(DecayFit {
        exponent: f(slope),
        constant: f(icpt.exp()),
        residual: f(residual),
        lambda_grid: values.iter().map(|p| f(p.0)).collect(),
    })
}

/// Geometric grid of `n` points from `lo` to `hi`.
pub fn geometric_grid(lo: Scalar, hi: Scalar, n: usize) -> Vec<Scalar> {
    let r = (hi / lo).ln() / (n - 1).max(1) as Scalar;
    (0..n).map(|i| lo * (r * i as Scalar).exp()).collect()
}

/// Result of the van der Corput check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorputReport {
    pub fit: DecayFit,
    pub k: usize,
    /// min over the support of Σ_{2≤j≤k} |Φ^{(j)}|.
    pub lower_bound: Scalar,
    pub passed: bool,
}

/// Fit |∫e^{iλΦ}a| over `lambda_grid` and compare with λ^{−1/k}.
pub fn van_der_corput_check(spec: &PhaseSpec, k: usize, c0: Scalar, lambda_grid: &[Scalar]) -> Result<CorputReport> {
    if k < 2 {
        return Err(Error::PreconditionViolated("k must be at least 2".into()));
    }
    let (lo, hi) = spec.support;
    let mut lower = Scalar::INFINITY;
    for i in 0..=SCAN_POINTS {
        let x = lo + (hi - lo) * i as Scalar / SCAN_POINTS as Scalar;
        let s: Scalar = (2..=k).map(|j| spec.derivative(x, j).abs()).sum();
        lower = lower.min(s);
    }
    if lower < c0 {
        return Err(Error::PreconditionViolated(format!(
            "Σ|Φ^(j)| drops to {lower:e} < c0 = {c0} on the support"
        )));
    }
    let data = lambda_grid
        .iter()
        .map(|&l| evaluate(spec, l).map(|v| (l, v.value.norm())))
        .collect::<Result<Vec<_>>>()?;
    let fit = decay_fit(&data)?;
    let passed = fit.exponent <= -1.0 / k as Scalar + 0.05;
    Ok(CorputReport { fit, k, lower_bound: lower, passed })
}

/// Bivariate polynomial Σ c ξ₁^p ξ₂^q with exact partial derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly2 {
    pub terms: Vec<(u32, u32, Scalar)>,
}

fn falling(n: u32, k: u32) -> Scalar {
    (0..k).fold(1.0, |acc, m| acc * (n - m) as Scalar)
}

impl Poly2 {
    pub fn new(terms: Vec<(u32, u32, Scalar)>) -> Self {
        Self { terms }
    }

    pub fn eval(&self, x: [Scalar; 2]) -> Scalar {
        self.partial(0, 0, x)
    }

    /// ∂₁^i ∂₂^j H at x.
    pub fn partial(&self, i: u32, j: u32, x: [Scalar; 2]) -> Scalar {
        self.terms
            .iter()
            .filter(|(p, q, _)| *p >= i && *q >= j)
            .map(|&(p, q, cf)| cf * falling(p, i) * falling(q, j) * x[0].powi((p - i) as i32) * x[1].powi((q - j) as i32))
            .sum()
    }

    pub fn gradient(&self, x: [Scalar; 2]) -> [Scalar; 2] {
        [self.partial(1, 0, x), self.partial(0, 1, x)]
    }

    pub fn hessian(&self, x: [Scalar; 2]) -> [[Scalar; 2]; 2] {
        let h12 = self.partial(1, 1, x);
        [[self.partial(2, 0, x), h12], [h12, self.partial(0, 2, x)]]
    }

    /// Mixed directional derivative ∂_u^m ∂_v^n H at x.
    pub fn directional(&self, u: [Scalar; 2], m: u32, v: [Scalar; 2], n: u32, x: [Scalar; 2]) -> Scalar {
        // Expand each directional operator into coordinate partials.
        let mut acc = 0.0;
        for a in 0..=m {
            for b in 0..=n {
                let coef = binom(m, a) * binom(n, b)
                    * u[0].powi(a as i32) * u[1].powi((m - a) as i32)
                    * v[0].powi(b as i32) * v[1].powi((n - b) as i32);
                if coef != 0.0 {
                    acc += coef * self.partial(a + b, (m - a) + (n - b), x);
                }
            }
        }
        acc
    }

    /// Largest power of ξ₁ appearing.
    pub fn degree_in_first(&self) -> u32 {
        self.terms.iter().filter(|t| t.2 != 0.0).map(|t| t.0).max().unwrap_or(0)
    }

    /// Split as α(ξ₂)ξ₁² + β(ξ₂)ξ₁ + γ(ξ₂) when the degree in ξ₁ is ≤ 2.
    fn quadratic_parts(&self, x2: Scalar) -> Option<(Scalar, Scalar, Scalar)> {
        if self.degree_in_first() > 2 {
            return None;
        }
        let mut parts = [0.0; 3];
        for &(p, q, cf) in &self.terms {
            parts[p as usize] += cf * x2.powi(q as i32);
        }
        Some((parts[2], parts[1], parts[0]))
    }
}

fn binom(n: u32, k: u32) -> Scalar {
    falling(n, k) / falling(k, k)
}

/// Classification of the degenerate point of a rank-one Hessian.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldCuspReport {
    pub kind: CanonicalCausticKind,
    /// Cubic coefficient along the kernel direction.
    pub d: Scalar,
    /// Mixed coefficient ∂_u∂_v²H/2.
    pub c: Scalar,
    /// Quartic coefficient along the kernel direction.
    pub e: Scalar,
    /// Range-direction curvature of H″(0).
    pub h11: Scalar,
    /// One fit per probe point x, in input order.
    pub fits: Vec<(Vec<Scalar>, DecayFit)>,
    /// Largest fitted exponent over the probe points.
    pub worst_exponent: Scalar,
}

/// Options for [`fold_cusp_2d`].
#[derive(Debug, Clone, Copy)]
pub struct FoldCuspOptions {
    /// Support radius r of the amplitude.
    pub radius: Scalar,
    /// Multiplies the amplitude (classification must not depend on it).
    pub amplitude: Scalar,
    pub rel_tol: Scalar,
}

impl Default for FoldCuspOptions {
    fn default() -> Self {
        Self { radius: 0.1, amplitude: 1.0, rel_tol: 1e-9 }
    }
}

/// Check the rank-one hypotheses at 0 and return (h11, range u, kernel v, c, d, e).
fn rank_one_frame(h: &Poly2) -> Result<(Scalar, [Scalar; 2], [Scalar; 2], Scalar, Scalar, Scalar)> {
    let o = [0.0, 0.0];
    let scale = h.terms.iter().fold(0.0_f64, |m, t| m.max(t.2.abs())).max(1e-300);
    if h.eval(o).abs() > CLASS_TOL * scale {
        return Err(Error::HypothesisViolated("H(0) ≠ 0".into()));
    }
    let g = h.gradient(o);
    if g[0].hypot(g[1]) > CLASS_TOL * scale {
        return Err(Error::HypothesisViolated("∇H(0) ≠ 0".into()));
    }
    let m = h.hessian(o);
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[0][1];
    if tr.abs() <= CLASS_TOL * scale {
        return Err(Error::HypothesisViolated("H″(0) vanishes (rank 0)".into()));
    }
    if det.abs() > CLASS_TOL * tr * tr {
        return Err(Error::HypothesisViolated("rank H″(0) = 2, the critical point is nondegenerate".into()));
    }
    // Range direction is the eigenvector of the nonzero eigenvalue tr.
    let u = if m[0][0].abs() >= m[1][1].abs() {
        let n = m[0][0].hypot(m[0][1]);
        [m[0][0] / n, m[0][1] / n]
    } else {
        let n = m[0][1].hypot(m[1][1]);
        [m[0][1] / n, m[1][1] / n]
    };
    let v = [-u[1], u[0]];
    // ∇det H″(0) from third derivatives.
    let (h11, h12, h22) = (m[0][0], m[0][1], m[1][1]);
    let gd0 = h.partial(3, 0, o) * h22 + h11 * h.partial(1, 2, o) - 2.0 * h12 * h.partial(2, 1, o);
    let gd1 = h.partial(2, 1, o) * h22 + h11 * h.partial(0, 3, o) - 2.0 * h12 * h.partial(1, 2, o);
    if gd0.hypot(gd1) <= CLASS_TOL * scale * tr.abs() {
        return Err(Error::HypothesisViolated("∇det H″(0) = 0".into()));
    }
    let d = h.directional(u, 0, v, 3, o) / 6.0;
    let cc = h.directional(u, 1, v, 2, o) / 2.0;
    let e = h.directional(u, 0, v, 4, o) / 24.0;
    Ok((tr, u, v, cc, d, e))
}

/// Fold/cusp classification of H at 0 plus decay fits of
/// I(x, λ) = ∫ e^{iλ(x·ξ − H(ξ))} a(ξ) dξ at each probe x.
pub fn fold_cusp_2d(h: &Poly2, probes: &[[Scalar; 2]], lambda_grid: &[Scalar], opts: FoldCuspOptions) -> Result<FoldCuspReport> {
    let (h11, _u, _v, cc, d, e) = rank_one_frame(h)?;
    let scale = h.terms.iter().fold(0.0_f64, |m, t| m.max(t.2.abs()));
    let kind = if d.abs() > CLASS_TOL * scale {
        CanonicalCausticKind::Fold
    } else {
        let q = e - cc * cc / (2.0 * h11);
        if q.abs() > CLASS_TOL * scale {
            CanonicalCausticKind::Cusp
        } else {
            return Err(Error::HypothesisViolated("X′(0) = 0 and X″(0) = 0: beyond the cusp".into()));
        }
    };
    let mut fits = Vec::with_capacity(probes.len());
    let mut worst = Scalar::NEG_INFINITY;
    for x in probes {
        let data = lambda_grid
            .iter()
            .map(|&l| integral_2d(h, *x, l, opts).map(|v| (l, v.norm())))
            .collect::<Result<Vec<_>>>()?;
        let fit = decay_fit(&data)?;
        worst = worst.max(fit.exponent);
        fits.push((x.to_vec(), fit));
    }
    Ok(FoldCuspReport { kind, d, c: cc, e, h11, fits, worst_exponent: worst })
}

/// I(x, λ) with amplitude A·e^{−(ξ₁/r)²}·bump(ξ₂/r).
pub fn integral_2d(h: &Poly2, x: [Scalar; 2], lambda: Scalar, opts: FoldCuspOptions) -> Result<Complex> {
    let r = opts.radius;
    let bump = Bump::centered(0.5, 1.0);
    let inv_r2 = 1.0 / (r * r);
    // Roundoff floor: a fixed fraction of the L¹ size of the integrand.
    let l1 = 2.0 * r * (PI / (inv_r2 * inv_r2 + 0.25 * lambda * lambda).sqrt()).sqrt();
    let abs_tol = 1e-11 * l1;
    let q = |panels: usize| QuadOptions { abs_tol, rel_tol: opts.rel_tol, initial_panels: panels, max_evals: 20_000_000 };

    // Oscillations along ξ₂ bound the starting panel count.
    let mut max_d: Scalar = 0.0;
    for i in 0..=200 {
        let s = -r + 2.0 * r * i as Scalar / 200.0;
        let xi1 = x[0] - h.partial(1, 0, [0.0, s]);
        max_d = max_d.max((x[1] - h.partial(0, 1, [xi1.clamp(-3.0 * r, 3.0 * r), s])).abs());
    }
    let panels = ((lambda * max_d * 2.0 * r / (2.0 * PI)).ceil() as usize + 8).min(2_000_000);

    let value = if h.quadratic_parts(0.0).is_some() {
        // Inner Gaussian integral in ξ₁ in closed form.
        let outer = |s: Scalar| {
            let (al, be, ga) = h.quadratic_parts(s).unwrap();
            let a = c(inv_r2, lambda * al);
            let b = lambda * (x[0] - be);
            let phase = c(0.0, lambda * (x[1] * s - ga));
            (Complex::from(PI) / a).sqrt() * (-(b * b) / (4.0 * a) + phase).exp() * bump.eval(s / r)
        };
        let res = adaptive(outer, -r, r, q(panels));
        if !res.converged {
            return Err(Error::BudgetExceeded { value: res.value, error: res.error });
        }
        res.value
    } else {
        let outer = |s: Scalar| {
            let inner = |t: Scalar| {
                let ph = lambda * (x[0] * t + x[1] * s - h.eval([t, s]));
                c(-t * t * inv_r2, ph).exp()
            };
            let n_in = ((lambda * 6.0 * r * (x[0].abs() + h.partial(1, 0, [3.0 * r, s]).abs()) / PI).ceil() as usize + 8).min(200_000);
            adaptive(inner, -6.0 * r, 6.0 * r, q(n_in)).value * bump.eval(s / r)
        };
        let res = adaptive(outer, -r, r, q(panels));
        if !res.converged {
            return Err(Error::BudgetExceeded { value: res.value, error: res.error });
        }
        res.value
    };
    Ok(value * opts.amplitude)
}

/// Zeros of ∇H in the square [−R, R]² by grid scan and Newton refinement.
pub fn find_critical_points_2d(h: &Poly2, radius: Scalar, grid: usize) -> Result<CriticalSet> {
    let n = grid.max(8);
    let step = 2.0 * radius / (n - 1) as Scalar;
    let at = |i: usize| -radius + i as Scalar * step;
    let g2 = |p: [Scalar; 2]| {
        let g = h.gradient(p);
        g[0] * g[0] + g[1] * g[1]
    };
    let vals: Vec<Scalar> = (0..n * n).map(|k| g2([at(k / n), at(k % n)])).collect();
    let mut seeds = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = vals[i * n + j];
            let mut is_min = true;
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1), (-1, -1), (1, 1), (-1, 1), (1, -1)] {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n && vals[a as usize * n + b as usize] < v {
                    is_min = false;
                    break;
                }
            }
            if is_min {
                seeds.push([at(i), at(j)]);
            }
        }
    }
    let mut roots: Vec<[Scalar; 2]> = Vec::new();
    for s in seeds {
        let mut p = s;
        for _ in 0..200 {
            let g = h.gradient(p);
            let m = h.hessian(p);
            let det = m[0][0] * m[1][1] - m[0][1] * m[0][1];
            // Gauss–Newton keeps going through singular Hessians.
            let (dx, dy) = if det.abs() > 1e-14 {
                ((m[1][1] * g[0] - m[0][1] * g[1]) / det, (m[0][0] * g[1] - m[0][1] * g[0]) / det)
            } else {
                let jt = [m[0][0] * g[0] + m[0][1] * g[1], m[0][1] * g[0] + m[1][1] * g[1]];
                let nn = m[0][0] * m[0][0] + 2.0 * m[0][1] * m[0][1] + m[1][1] * m[1][1] + 1e-30;
                (jt[0] / nn, jt[1] / nn)
            };
            p = [p[0] - dx, p[1] - dy];
            if dx.hypot(dy) < 1e-15 {
                break;
            }
        }
        if g2(p).sqrt() < 1e-9 && p[0].abs() <= radius && p[1].abs() <= radius {
            roots.push(p);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut uniq: Vec<[Scalar; 2]> = Vec::new();
    for r in roots {
        if !uniq.iter().any(|u| (u[0] - r[0]).hypot(u[1] - r[1]) < 1e-6 * radius.max(1.0)) {
            uniq.push(r);
        }
    }
    let mut possibly_incomplete = false;
    for (i, a) in uniq.iter().enumerate() {
        for b in &uniq[i + 1..] {
            if (a[0] - b[0]).hypot(a[1] - b[1]) < step {
                possibly_incomplete = true;
            }
        }
    }
    let scale = h.terms.iter().fold(0.0_f64, |m, t| m.max(t.2.abs()));
    let points = uniq
        .into_iter()
        .map(|p| {
            let m = h.hessian(p);
            let tr = (m[0][0] + m[1][1]).abs();
            let det = m[0][0] * m[1][1] - m[0][1] * m[0][1];
            let rank = if tr <= CLASS_TOL * scale {
                0
            } else if det.abs() <= CLASS_TOL * tr * tr {
                1
            } else {
                2
            };
            let shifted = shift_poly(h, p);
            let (order, class) = match rank {
                2 => (1, CriticalClass::NonDegenerate),
                1 => match rank_one_frame(&shifted) {
                    Ok((h11, _, _, cc, d, e)) if d.abs() > CLASS_TOL * scale => {
                        let _ = (h11, cc, e);
                        (2, CriticalClass::Degenerate(CanonicalCausticKind::Fold))
                    }
                    Ok((h11, _, _, cc, _, e)) if (e - cc * cc / (2.0 * h11)).abs() > CLASS_TOL * scale => {
                        (3, CriticalClass::Degenerate(CanonicalCausticKind::Cusp))
                    }
                    _ => (4, CriticalClass::HigherOrder),
                },
                _ => (4, CriticalClass::HigherOrder),
            };
            CriticalPoint { location: p.to_vec(), order, hessian_rank: rank, classification: class }
        })
        .collect();
    Ok(CriticalSet { points, possibly_incomplete })
}

// H(p + ξ) − H(p) − ∇H(p)·ξ as a polynomial in ξ, by Taylor expansion.
fn shift_poly(h: &Poly2, p: [Scalar; 2]) -> Poly2 {
    let deg = h.terms.iter().map(|t| t.0 + t.1).max().unwrap_or(0);
    let mut terms = Vec::new();
    for i in 0..=deg {
        for j in 0..=(deg - i) {
            if i + j < 2 {
                continue;
            }
            let v = h.partial(i, j, p) / (falling(i, i) * falling(j, j));
            if v != 0.0 {
                terms.push((i, j, v));
            }
        }
    }
    Poly2::new(terms)
}
