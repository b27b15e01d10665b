//! Which reflections pass through a given point: complex roots of the
//! μ-equation obtained by eliminating (σ, N) from the Lagrangian
//! projection, and the resulting set of reflection indices.

use serde::{Deserialize, Serialize};

use super::geometry::{reflection_slowdown, RegimeConstants};
use crate::{c, Complex, Error, Result, Scalar};

/// Roots of Σ coeffs[j]·z^j by Aberth–Ehrlich iteration.
pub fn polynomial_roots(coeffs: &[Complex]) -> Result<Vec<Complex>> {
    let mut cs = coeffs.to_vec();
    while cs.last().is_some_and(|v| v.norm() == 0.0) {
        cs.pop();
    }
    let n = cs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = cs[n];
    let cs: Vec<Complex> = cs.iter().map(|v| v / lead).collect();
    let radius = 1.0 + cs[..n].iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let start = radius.min(1e3).max(0.5);
    let mut z: Vec<Complex> =
        (0..n).map(|k| Complex::from_polar(start, 2.0 * std::f64::consts::PI * k as Scalar / n as Scalar + 0.4)).collect();
    let eval = |x: Complex| {
        let mut p = cs[n];
        let mut dp = c(0.0, 0.0);
        for j in (0..n).rev() {
            dp = dp * x + p;
            p = p * x + cs[j];
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut worst = 0.0_f64;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = c(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (c(1.0, 0.0) - ratio * s);
            z[k] -= step;
            worst = worst.max(step.norm() / (1.0 + z[k].norm()));
        }
        if worst < 1e-15 {
            return Ok(z);
        }
    }
    // Clustered roots converge linearly; accept if the residuals are tiny.
    let scale = cs.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    if z.iter().all(|&x| eval(x).0.norm() <= 1e-10 * scale * (1.0 + x.norm()).powi(n as i32)) {
        Ok(z)
    } else {
        Err(Error::ConvergenceFailure { what: "Aberth iteration", iterations: 500 })
    }
}

/// Regime of the root configuration, by R = 2(1 − 3Y/T).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootRegime {
    /// |R| ≥ R₀: roots near ±√R.
    LargeR,
    MediumR,
    /// |R|·T ≤ M₀: all roots of size O(T^{−1/2}).
    SmallRT,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Complex>,
    pub r: Scalar,
    pub regime: RootRegime,
}

impl RootSet {
    /// Roots with |Im μ| ≤ tol·max(1, |μ|), as real numbers.
    pub fn real_roots(&self, tol: Scalar) -> Vec<Scalar> {
        self.roots.iter().filter(|m| m.im.abs() <= tol * m.norm().max(1.0)).map(|m| m.re).collect()
    }
}

/// Coefficients (B₀, B₁) of Y = B₀ + B₁σ + (2/3)σ³ after eliminating N.
fn elimination_coefficients(a: Scalar, big_t: Scalar, mu: Complex) -> (Complex, Complex) {
    let rho = 1.0 + a;
    let m2 = mu * mu;
    let q = (rho + a * m2).sqrt();
    let h1 = q / (rho.sqrt() + q);
    // H₂/√(1+μ²) depends on μ only through √(ρ+aμ²).
    let k = (2.0 / 3.0 + 5.0 * a / 9.0 + m2 * (-1.0 / 3.0 + a / 9.0) - 4.0 * a * m2 * m2 / 9.0) / (rho.sqrt() * q + 1.0 + 2.0 / 3.0 * a * (1.0 + m2));
    let m3 = m2 * mu;
    let b0 = 2.0 * m3 * h1 - 2.0 * m3 / 3.0 + 2.0 * k * (big_t / (2.0 * q) + mu);
    let b1 = -2.0 * m2 * h1 - 2.0 * k;
    (b0, b1)
}

/// f(μ) = (Y − B₀)² − (1+μ²−X)(B₁ + (2/3)(1+μ²−X))².
pub fn mu_equation(a: Scalar, big_x: Scalar, big_y: Scalar, big_t: Scalar, mu: Complex) -> Complex {
    let (b0, b1) = elimination_coefficients(a, big_t, mu);
    let s = 1.0 + mu * mu - big_x;
    let d = b1 + 2.0 / 3.0 * s;
    (big_y - b0).powi(2) - s * d * d
}

/// Ascending coefficients of the a = 0 quartic
/// ((T/6)μ² − (2/3)μ + Y − T/3)² − (4X²/9)(μ² + 1 − X).
pub fn principal_quartic(big_x: Scalar, big_y: Scalar, big_t: Scalar) -> [Scalar; 5] {
    let (p0, p1, p2) = (big_y - big_t / 3.0, -2.0 / 3.0, big_t / 6.0);
    let k = 4.0 * big_x * big_x / 9.0;
    [p0 * p0 - k * (1.0 - big_x), 2.0 * p0 * p1, p1 * p1 + 2.0 * p0 * p2 - k, 2.0 * p1 * p2, p2 * p2]
}

fn classify(r: Scalar, big_t: Scalar, consts: &RegimeConstants) -> RootRegime {
    if r.abs() >= consts.r0 {
        RootRegime::LargeR
    } else if r.abs() * big_t <= consts.m0 {
        RootRegime::SmallRT
    } else {
        RootRegime::MediumR
    }
}

/// Simultaneous (Aberth) refinement of all roots of an analytic f, with
/// the derivative taken by complex central differences. The mutual
/// repulsion term keeps clustered roots apart. Only roots accepted by
/// `tracked` have to converge.
fn aberth_refine(f: &impl Fn(Complex) -> Complex, tracked: &impl Fn(Complex) -> bool, roots: &mut [Complex]) -> bool {
    let n = roots.len();
    // Real iterates of a real function stay real; a small imaginary kick
    // lets colliding real roots leave the axis as a conjugate pair.
    for (k, r) in roots.iter_mut().enumerate() {
        *r += c(0.0, 1e-6 * (k as Scalar + 1.0) * (1.0 + r.norm()));
    }
    for _ in 0..300 {
        let mut worst = 0.0_f64;
        for k in 0..n {
            let z = roots[k];
            let v = f(z);
            if v.norm() == 0.0 {
                continue;
            }
            let d = 1e-5 * (1.0 + z.norm());
            let dv = (f(z + d) - f(z - d) - (f(z + c(0.0, d)) - f(z - c(0.0, d))) * c(0.0, 1.0)) / (4.0 * d);
            let ratio = v / dv;
            let mut s = c(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += (z - roots[j]).inv();
                }
            }
            let step = ratio / (c(1.0, 0.0) - ratio * s);
            if !step.is_finite() {
                return false;
            }
            roots[k] -= step;
            if tracked(roots[k]) {
                worst = worst.max(step.norm() / (1.0 + roots[k].norm()));
            }
        }
        if worst < 1e-14 {
            return true;
        }
    }
    // Clusters converge linearly; accept a vanishing residual.
    roots.iter().filter(|&&z| tracked(z)).all(|&z| f(z).norm() <= 1e-12 * (1.0 + f(z + 0.1).norm()))
}

/// The four complex μ-roots at (X, Y, T): quartic roots at a = 0, then
/// continuation in a.
pub fn mu_roots(big_x: Scalar, big_y: Scalar, big_t: Scalar, a: Scalar, consts: &RegimeConstants) -> Result<RootSet> {
    if !(big_t > 0.0) {
        return Err(Error::PreconditionViolated(format!("μ-roots need T > 0, got {big_t}")));
    }
    let q = principal_quartic(big_x, big_y, big_t);
    let mut roots = polynomial_roots(&q.map(|v| c(v, 0.0)))?;
    if a > 0.0 {
        let steps = ((a / 0.01).ceil() as usize).max(4);
        for s in 1..=steps {
            let a_s = a * s as Scalar / steps as Scalar;
            let f = |mu: Complex| mu_equation(a_s, big_x, big_y, big_t, mu);
            // Roots with a|μ|² > 1 lie outside the model (the square roots
            // approach their branch points) and are carried along untracked.
            let tracked = |mu: Complex| a_s * mu.norm_sqr() <= 1.0;
            if !aberth_refine(&f, &tracked, &mut roots) {
                return Err(Error::RootTrackingFailure(format!("continuation in a stalled at a = {a_s}, roots {roots:?}")));
            }
        }
    }
    roots.sort_by(|u, v| u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)));
    let r = 2.0 * (1.0 - 3.0 * big_y / big_t);
    Ok(RootSet { roots, r, regime: classify(r, big_t, consts) })
}

/// One real root of the μ-equation and the reflection indices it yields.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OverlapBranch {
    pub mu: Scalar,
    pub sigma: Scalar,
    /// Continuous N over the frequency band, before rounding.
    pub n_min: Scalar,
    pub n_max: Scalar,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapSet {
    /// Sorted, without duplicates.
    pub members: Vec<usize>,
    pub branches: Vec<OverlapBranch>,
    /// Upper end of the containment window [1, T/2 + N₀].
    pub window_hi: Scalar,
}

impl OverlapSet {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn within_window(&self) -> bool {
        self.members.iter().all(|&n| n as Scalar <= self.window_hi)
    }
}

const REAL_TOL: Scalar = 1e-6;

/// Reflection indices N ≥ 1 whose Lagrangian manifold (for some frequency
/// η ∈ [1/2, 5/2]) passes through (X, Y, T) with a·μ² ≤ ε₀.
pub fn overlap_count(big_x: Scalar, big_y: Scalar, big_t: Scalar, a: Scalar, h: Scalar, consts: &RegimeConstants) -> Result<OverlapSet> {
    let window_hi = big_t / 2.0 + consts.n0;
    let mut out = OverlapSet { members: Vec::new(), branches: Vec::new(), window_hi };
    if big_t <= 0.0 {
        return Ok(out);
    }
    let rho = 1.0 + a;
    let lambda_tilde = a.powf(1.5) / h;
    let set = mu_roots(big_x, big_y, big_t, a, consts)?;
    for mu in set.real_roots(REAL_TOL) {
        if a * mu * mu > consts.eps0 {
            continue;
        }
        let (b0, b1) = elimination_coefficients(a, big_t, c(mu, 0.0));
        let s = 1.0 + mu * mu - big_x;
        let d = b1.re + 2.0 / 3.0 * s;
        if s < 0.0 || d.abs() < 1e-14 {
            continue;
        }
        let sigma = (big_y - b0.re) / d;
        let rhs = (big_t / (2.0 * (rho + a * mu * mu).sqrt()) - sigma + mu) / (2.0 * (1.0 + mu * mu).sqrt());
        let (mut lo, mut hi) = (Scalar::INFINITY, Scalar::NEG_INFINITY);
        for j in 0..=8 {
            let eta = 0.5 * 5.0_f64.powf(j as Scalar / 8.0);
            let n = rhs / reflection_slowdown(eta * lambda_tilde, mu)?;
            lo = lo.min(n);
            hi = hi.max(n);
        }
        out.branches.push(OverlapBranch { mu, sigma, n_min: lo, n_max: hi });
        let (first, last) = (lo.round().max(1.0), hi.round());
        let mut n = first;
        while n <= last {
            out.members.push(n as usize);
            n += 1.0;
        }
    }
    out.members.sort_unstable();
    out.members.dedup();
    Ok(out)
}
