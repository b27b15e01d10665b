//! Eigenmodes of −∂²_x + (1 + x)η² on the half-line with a Dirichlet wall:
//! e_k(x, η) = f_k η^{1/3} k^{−1/6} Ai(η^{2/3}x − ω_k), λ_k(η) = η² + ω_k η^{4/3}.

use serde::{Deserialize, Serialize};

use crate::quad::{adaptive_real, QuadOptions};
use crate::specfun::{ai_fast as ai, ai_prime, omega};
use crate::window::{Bump, PSI1, PSI2};
use crate::{Error, Result, Scalar};

/// One mode: index, Airy zero and normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalleryMode {
    pub k: usize,
    pub omega_k: Scalar,
    pub f_k: Scalar,
}

impl GalleryMode {
    /// Mode k with f_k from the closed-form identity.
    pub fn new(k: usize) -> Result<Self> {
        let omega_k = omega(k)?;
        let f_k = (k as Scalar).powf(1.0 / 6.0) / ai_prime(-omega_k).abs();
        Ok(Self { k, omega_k, f_k })
    }

    /// e_k(x, η); exactly zero on the wall.
    pub fn eval(&self, x: Scalar, eta: Scalar) -> Scalar {
        if x == 0.0 {
            return 0.0;
        }
        let e23 = eta.powf(2.0 / 3.0);
        self.f_k * eta.powf(1.0 / 3.0) * (self.k as Scalar).powf(-1.0 / 6.0) * ai(e23 * x - self.omega_k)
    }

    /// End of the x-range carrying all but a super-exponentially small tail.
    pub fn x_max(&self, eta: Scalar) -> Scalar {
        (self.omega_k + 30.0) * eta.powf(-2.0 / 3.0)
    }
}

/// Smooth windows ψ₁ (tangential frequency) and ψ₂ (time frequency).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    pub psi1: Bump,
    pub psi2: Bump,
}

impl Default for SpectralWindow {
    fn default() -> Self {
        Self { psi1: PSI1, psi2: PSI2 }
    }
}

/// Range of modes kept in a sum, with k_max ≤ ε/h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTruncation {
    pub k_min: usize,
    pub k_max: usize,
    pub epsilon: Scalar,
}

impl ModeTruncation {
    /// Modes 1..=⌊ε/h⌋ (at least one).
    pub fn for_h(h: Scalar, epsilon: Scalar) -> Self {
        Self { k_min: 1, k_max: ((epsilon / h).floor() as usize).max(1), epsilon }
    }

    pub fn validate(&self, h: Scalar) -> Result<()> {
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(Error::PreconditionViolated(format!("empty mode range {}..={}", self.k_min, self.k_max)));
        }
        if self.k_max as Scalar > self.epsilon / h + 1e-9 {
            return Err(Error::PreconditionViolated(format!(
                "k_max = {} exceeds ε/h = {}",
                self.k_max,
                self.epsilon / h
            )));
        }
        Ok(())
    }
}

/// λ_k(η) = η² + ω_k |η|^{4/3}.
pub fn eigenvalue(k: usize, eta: Scalar) -> Result<Scalar> {
    let w = omega(k)?;
    Ok(eta * eta + w * eta.abs().powf(4.0 / 3.0))
}

/// e_k(x, η).
pub fn eigenfunction(mode: &GalleryMode, x: Scalar, eta: Scalar) -> Result<Scalar> {
    if !(x >= 0.0) {
        return Err(Error::DomainViolation(format!("x must be ≥ 0, got {x}")));
    }
    Ok(mode.eval(x, eta))
}

/// Both routes to ∫₀^∞ Ai²(t − ω_k) dt.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormalizationCheck {
    pub k: usize,
    pub f_k: Scalar,
    /// Ai′(−ω_k)².
    pub identity: Scalar,
    /// Direct quadrature up to t = ω_k + 30.
    pub quadrature: Scalar,
}

/// ∫₀^{ω_k+30} Ai²(t − ω_k) dt by adaptive quadrature.
pub fn airy_square_integral(k: usize) -> Result<Scalar> {
    let w = omega(k)?;
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, initial_panels: 4 * k + 8, max_evals: 2_000_000 };
    let r = adaptive_real(|t| ai(t - w).powi(2), 0.0, w + 30.0, opts);
    if !r.converged {
        return Err(Error::QuadratureFailure(format!("normalization quadrature for k = {k}")));
    }
    Ok(r.value.re)
}

/// f_k from the identity, cross-checked by quadrature.
pub fn normalization(k: usize) -> Result<NormalizationCheck> {
    let mode = GalleryMode::new(k)?;
    let identity = ai_prime(-mode.omega_k).powi(2);
    let quadrature = airy_square_integral(k)?;
    if (identity - quadrature).abs() > 1e-6 * identity {
        return Err(Error::NormalizationMismatch { k, identity, quadrature });
    }
    Ok(NormalizationCheck { k, f_k: mode.f_k, identity, quadrature })
}

/// Modes k_min..=k_max.
pub fn modes(trunc: &ModeTruncation) -> Result<Vec<GalleryMode>> {
    (trunc.k_min..=trunc.k_max).map(GalleryMode::new).collect()
}

/// Coefficients e_k(a, η) of δ_{x=a} in the basis {e_k(·, η)}.
pub fn dirac_coefficients(a: Scalar, eta: Scalar, trunc: &ModeTruncation) -> Result<Vec<Scalar>> {
    if !(a > 0.0) {
        return Err(Error::PreconditionViolated(format!("source distance must be positive, got {a}")));
    }
    Ok(modes(trunc)?.iter().map(|m| m.eval(a, eta)).collect())
}

/// Σ_{k≤K} e_k(x, η)e_k(a, η), the truncated Dirac at a.
pub fn dirac_partial_sum(x: Scalar, a: Scalar, eta: Scalar, k_max: usize) -> Result<Scalar> {
    let mut s = 0.0;
    for k in 1..=k_max {
        let m = GalleryMode::new(k)?;
        s += m.eval(x, eta) * m.eval(a, eta);
    }
    Ok(s)
}

/// J_L(b) = Σ_{k≤L} k^{−1/3} Ai²(b − ω_k).
pub fn sobolev_sum(b: Scalar, l: usize) -> Result<Scalar> {
    if l == 0 {
        return Err(Error::PreconditionViolated("L must be at least 1".into()));
    }
    let mut s = 0.0;
    for k in 1..=l {
        s += (k as Scalar).powf(-1.0 / 3.0) * ai(b - omega(k)?).powi(2);
    }
    Ok(s)
}

/// sup_b J_L(b) over b ∈ [−5, ω_L + 5]: grid scan, then golden-section
/// refinement of the best few cells. Returns (b*, J_L(b*)).
pub fn sobolev_sup(l: usize) -> Result<(Scalar, Scalar)> {
    let ws: Vec<Scalar> = (1..=l).map(omega).collect::<Result<_>>()?;
    let weights: Vec<Scalar> = (1..=l).map(|k| (k as Scalar).powf(-1.0 / 3.0)).collect();
    let j = |b: Scalar| ws.iter().zip(&weights).map(|(w, c)| c * ai(b - w).powi(2)).sum::<Scalar>();
    let (lo, hi) = (-5.0, ws[l - 1] + 5.0);
    let step = 0.02;
    let n = ((hi - lo) / step).ceil() as usize + 1;
    let vals: Vec<(Scalar, Scalar)> = (0..n).map(|i| lo + i as Scalar * step).map(|b| (b, j(b))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].1.partial_cmp(&vals[a].1).unwrap());
    let mut best = vals[order[0]];
    for &i in order.iter().take(5) {
        let (b, v) = golden_max(&j, vals[i].0 - step, vals[i].0 + step);
        if v > best.1 {
            best = (b, v);
        }
    }
    Ok(best)
}

pub(crate) fn golden_max(f: &impl Fn(Scalar) -> Scalar, mut a: Scalar, mut b: Scalar) -> (Scalar, Scalar) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// ∫₀^∞ e_k e_j dx at the given η.
pub fn mode_overlap(k: usize, j: usize, eta: Scalar) -> Result<Scalar> {
    let (mk, mj) = (GalleryMode::new(k)?, GalleryMode::new(j)?);
    let xm = mk.x_max(eta).max(mj.x_max(eta));
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-11, initial_panels: 4 * k.max(j) + 8, max_evals: 2_000_000 };
    let r = adaptive_real(|x| mk.eval(x, eta) * mj.eval(x, eta), 0.0, xm, opts);
    if !r.converged {
        return Err(Error::QuadratureFailure(format!("overlap ({k}, {j})")));
    }
    Ok(r.value.re)
}

/// Pointwise |(−∂²_x + (1+x)η²)e_k − λ_k e_k| / λ_k with a five-point stencil.
pub fn eigen_residual(k: usize, eta: Scalar, x: Scalar) -> Result<Scalar> {
    let m = GalleryMode::new(k)?;
    let lam = eigenvalue(k, eta)?;
    let d = 1e-3 * eta.powf(-2.0 / 3.0);
    let f = |t: Scalar| m.eval(t, eta);
    // Reflect through the wall: e_k extends as an analytic function of x.
    let e2 = (-f(x + 2.0 * d) + 16.0 * f(x + d) - 30.0 * f(x) + 16.0 * f(x - d) - f(x - 2.0 * d)) / (12.0 * d * d);
    let scale = m.f_k * eta.powf(1.0 / 3.0) * (k as Scalar).powf(-1.0 / 6.0);
    Ok((-e2 + (1.0 + x) * eta * eta * f(x) - lam * f(x)).abs() / (lam * scale))
}
