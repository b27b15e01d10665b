//! Phase functions, scale functions and the Lagrangian parametrization of
//! the N-times reflected waves in rescaled variables
//! t = √a·T, x = a·X, y = −t√(1+a) + a^{3/2}·Y.

use serde::{Deserialize, Serialize};

use crate::oscint::Poly2;
use crate::specfun::phase_correction_pair;
use crate::window::{Bump, Ramp, PSI2};
use crate::{Error, Result, Scalar};

/// Cutoff profiles and the constants that shape them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CutoffSuite {
    /// Half-width of the source localization in t′ (and of χ₁ in θ).
    pub theta0: Scalar,
    pub zeta0: Scalar,
    pub zeta1: Scalar,
    pub beta: Scalar,
    pub z0: Scalar,
    /// Largest admissible a.
    pub a0: Scalar,
}

impl Default for CutoffSuite {
    fn default() -> Self {
        Self { theta0: 0.2, zeta0: 1.1, zeta1: 1.2, beta: 0.5, z0: 1.2, a0: 0.2 }
    }
}

impl CutoffSuite {
    pub fn validate(&self) -> Result<()> {
        let ok = self.theta0 > 0.0
            && self.theta0 < 1.0
            && self.zeta0 > 1.0
            && self.zeta1 > self.zeta0
            && self.beta > 0.0
            && self.beta < 1.0
            && self.z0 > 1.0
            && self.a0 > 0.0
            && self.a0 <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("cutoff constants out of order: {self:?}")))
        }
    }

    /// χ₀(η): support (1/2, 5/2), plateau [1, 2].
    pub fn chi0(&self) -> Bump {
        PSI2
    }

    /// χ₁(θ) on (−θ₀, θ₀), also used as the source symbol σ₀ in t′.
    pub fn chi1(&self) -> Bump {
        Bump::centered(self.theta0 / 2.0, self.theta0)
    }

    /// χ₂(z): 0 below β/2, 1 above β.
    pub fn chi2(&self) -> Ramp {
        Ramp { lo: self.beta / 2.0, hi: self.beta }
    }

    /// χ₃(ζ): 1 on [3/4, ζ₀], 0 outside (1/2, ζ₁).
    pub fn chi3(&self) -> Bump {
        Bump::new(0.5, 0.75, self.zeta0, self.zeta1)
    }

    /// χ₄(s): 1 on [−ζ₁, ζ₁].
    pub fn chi4(&self) -> Bump {
        Bump::centered(self.zeta1, 2.0 * self.zeta1)
    }

    /// χ₅(z): support (0, z₀), 1 on [β/2, (1+z₀)/2]. Splits the z-integral
    /// into the part near the glancing value and the rest.
    pub fn chi5(&self) -> Bump {
        Bump::new(self.beta / 4.0, self.beta / 2.0, (1.0 + self.z0) / 2.0, self.z0)
    }

    /// Largest z reached inside the support of χ₃(√(1+az)).
    pub fn z_max(&self, a: Scalar) -> Scalar {
        (self.zeta1 * self.zeta1 - 1.0) / a
    }
}

/// Thresholds of the root and overlap analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegimeConstants {
    /// Reflection budget: N runs over 0..=C₀/√a.
    pub c0: Scalar,
    pub r0: Scalar,
    pub m0: Scalar,
    /// Bound on a·μ² for admissible Lagrangian parameters.
    pub eps0: Scalar,
    /// Slack in the window [1, T/2 + N₀].
    pub n0: Scalar,
    pub c2: Scalar,
}

impl Default for RegimeConstants {
    fn default() -> Self {
        Self { c0: 4.0, r0: 8.0, m0: 40.0, eps0: 0.1, n0: 2.0, c2: 5.0 }
    }
}

impl RegimeConstants {
    pub fn validate(&self) -> Result<()> {
        if self.c0 > 0.0 && self.r0 > 0.0 && self.m0 > 0.0 && self.eps0 > 0.0 && self.n0 >= 0.0 && self.c2 > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!("regime constants must be positive: {self:?}")))
        }
    }

    /// Largest reflection index kept in the sum.
    pub fn n_max(&self, a: Scalar) -> usize {
        (self.c0 / a.sqrt()).floor() as usize
    }
}

/// Scales attached to one frequency η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFrame {
    pub a: Scalar,
    pub h: Scalar,
    pub eta: Scalar,
    /// ħ = h/η.
    pub hbar: Scalar,
    /// λ = a^{3/2}/ħ.
    pub lambda: Scalar,
    /// λ̃ = a^{3/2}/h.
    pub lambda_tilde: Scalar,
    /// ρ = 1 + a.
    pub rho: Scalar,
}

impl ScaleFrame {
    pub fn new(a: Scalar, h: Scalar, eta: Scalar) -> Result<Self> {
        if !(a > 0.0 && h > 0.0 && eta > 0.0) {
            return Err(Error::PreconditionViolated(format!("scale frame needs a, h, η > 0 (got {a}, {h}, {eta})")));
        }
        let lambda_tilde = a.powf(1.5) / h;
        Ok(Self { a, h, eta, hbar: h / eta, lambda: eta * lambda_tilde, lambda_tilde, rho: 1.0 + a })
    }

    /// (T, X, Y) → (t, x, y).
    pub fn to_physical(&self, big_t: Scalar, big_x: Scalar, big_y: Scalar) -> (Scalar, Scalar, Scalar) {
        let t = self.a.sqrt() * big_t;
        (t, self.a * big_x, -t * self.rho.sqrt() + self.a.powf(1.5) * big_y)
    }

    /// (t, x, y) → (T, X, Y).
    pub fn to_rescaled(&self, t: Scalar, x: Scalar, y: Scalar) -> (Scalar, Scalar, Scalar) {
        (t / self.a.sqrt(), x / self.a, (y + t * self.rho.sqrt()) / self.a.powf(1.5))
    }
}

/// θ(t′) on the source manifold, i.e. the root of t′ = −2θ√(ρ+θ²).
fn theta_of(rho: Scalar, tp: Scalar) -> Scalar {
    -tp / (2.0 * (rho + (rho * rho + tp * tp).sqrt())).sqrt()
}

/// ψ_a(t′) with ψ_a(0) = 0 and ψ_a′ = √(1+a+θ²).
pub fn psi_a(a: Scalar, tp: Scalar) -> Scalar {
    let rho = 1.0 + a;
    let th = theta_of(rho, tp);
    -2.0 * th * (rho + th * th) + 2.0 / 3.0 * th.powi(3)
}

pub fn psi_a_prime(a: Scalar, tp: Scalar) -> Scalar {
    let rho = 1.0 + a;
    let th = theta_of(rho, tp);
    (rho + th * th).sqrt()
}

/// H₁(a, μ) = √(ρ+aμ²)/(√ρ + √(ρ+aμ²)).
pub fn h1(a: Scalar, mu: Scalar) -> Scalar {
    let rho = 1.0 + a;
    let r = (rho + a * mu * mu).sqrt();
    r / (rho.sqrt() + r)
}

/// H₂(a, μ).
pub fn h2(a: Scalar, mu: Scalar) -> Scalar {
    let rho = 1.0 + a;
    let m2 = mu * mu;
    let num = (1.0 + m2).sqrt() * (2.0 / 3.0 + 5.0 * a / 9.0 + m2 * (-1.0 / 3.0 + a / 9.0) - 4.0 * a * m2 * m2 / 9.0);
    let den = rho.sqrt() * (rho + a * m2).sqrt() + 1.0 + 2.0 / 3.0 * a * (1.0 + m2);
    num / den
}

/// μ(T′) = θ/√a, computed without cancellation.
pub fn mu_of(a: Scalar, big_tp: Scalar) -> Scalar {
    let rho = 1.0 + a;
    -big_tp / (2.0 * (rho + (rho * rho + a * big_tp * big_tp).sqrt())).sqrt()
}

/// ψ̃_a(T′) = (ψ_a(√a T′) − √ρ√a T′)/a^{3/2}, stable as a → 0.
pub fn psi_a_tilde(a: Scalar, big_tp: Scalar) -> Scalar {
    let mu = mu_of(a, big_tp);
    mu.powi(3) * (2.0 / 3.0 - 2.0 * h1(a, mu))
}

pub fn psi_a_tilde_prime(a: Scalar, big_tp: Scalar) -> Scalar {
    let rho = 1.0 + a;
    let mu = mu_of(a, big_tp);
    mu * mu / (rho.sqrt() + (rho + a * mu * mu).sqrt())
}

/// γ_a(z) = (√(1+az) − √(1+a))/a.
pub fn gamma_a(a: Scalar, z: Scalar) -> Scalar {
    (z - 1.0) / ((1.0 + a).sqrt() + (1.0 + a * z).sqrt())
}

pub fn gamma_a_prime(a: Scalar, z: Scalar) -> Scalar {
    0.5 / (1.0 + a * z).sqrt()
}

/// Reflection term (4/3)z^{3/2} − B(λz^{3/2})/λ and its z-derivative
/// 2√z(1 − ¾B′(λz^{3/2})).
pub fn reflection_phase(lambda: Scalar, z: Scalar) -> Result<(Scalar, Scalar)> {
    let (b, bp) = phase_correction_pair(lambda * z.powf(1.5))?;
    Ok((4.0 / 3.0 * z.powf(1.5) - b / lambda, 2.0 * z.sqrt() * (1.0 - 0.75 * bp)))
}

/// Phase of w_N before the σ and T′ integrations:
/// γ_a(z)(T−T′) + ψ̃_a(T′) + σ(X−z) + σ³/3 − N((4/3)z^{3/2} − B(λz^{3/2})/λ).
#[derive(Debug, Clone, Copy)]
pub struct ReflectedPhase {
    pub a: Scalar,
    pub n: usize,
    pub lambda: Scalar,
}

impl ReflectedPhase {
    pub fn value(&self, big_t: Scalar, big_x: Scalar, tp: Scalar, sigma: Scalar, z: Scalar) -> Result<Scalar> {
        let (refl, _) = reflection_phase(self.lambda, z)?;
        Ok(gamma_a(self.a, z) * (big_t - tp) + psi_a_tilde(self.a, tp) + sigma * (big_x - z) + sigma.powi(3) / 3.0
            - self.n as Scalar * refl)
    }

    /// (∂_{T′}, ∂_σ, ∂_z).
    pub fn gradient(&self, big_t: Scalar, big_x: Scalar, tp: Scalar, sigma: Scalar, z: Scalar) -> Result<[Scalar; 3]> {
        let (_, drefl) = reflection_phase(self.lambda, z)?;
        let rho = 1.0 + self.a;
        Ok([
            psi_a_tilde_prime(self.a, tp) + (1.0 - z) / (rho.sqrt() + (1.0 + self.a * z).sqrt()),
            big_x - z + sigma * sigma,
            gamma_a_prime(self.a, z) * (big_t - tp) - sigma - self.n as Scalar * drefl,
        ])
    }

    /// The same phase in unscaled variables (t, x, t′, s, ζ) with ħ = a^{3/2}/λ:
    /// (t−t′)ζ + s(x+1−ζ²) + s³/3 − (4/3)N(ζ²−1)^{3/2} + ħNB((ζ²−1)^{3/2}/ħ) + ψ_a(t′).
    pub fn unscaled(&self, t: Scalar, x: Scalar, tp: Scalar, s: Scalar, zeta: Scalar) -> Result<Scalar> {
        let hbar = self.a.powf(1.5) / self.lambda;
        let w = (zeta * zeta - 1.0).powf(1.5);
        let (b, _) = phase_correction_pair(w / hbar)?;
        let n = self.n as Scalar;
        Ok((t - tp) * zeta + s * (x + 1.0 - zeta * zeta) + s.powi(3) / 3.0 - 4.0 / 3.0 * n * w + hbar * n * b + psi_a(self.a, tp))
    }
}

/// Phase after the T′ and σ integrations, one branch per (ε₁, ε₂) ∈ {±1}²:
/// γ_a(z)T + (2/3)ε₁(z−1)^{3/2} + (2/3)ε₂(z−X)^{3/2} − N((4/3)z^{3/2} − B(λz^{3/2})/λ).
pub fn reduced_phase(
    a: Scalar,
    n: usize,
    lambda: Scalar,
    eps: (i8, i8),
    big_t: Scalar,
    big_x: Scalar,
    z: Scalar,
) -> Result<Scalar> {
    if z < 1.0 || z < big_x {
        return Err(Error::DomainViolation(format!("reduced phase needs z ≥ max(1, X), got z = {z}, X = {big_x}")));
    }
    let (refl, _) = reflection_phase(lambda, z)?;
    Ok(gamma_a(a, z) * big_t
        + 2.0 / 3.0 * eps.0 as Scalar * (z - 1.0).powf(1.5)
        + 2.0 / 3.0 * eps.1 as Scalar * (z - big_x).powf(1.5)
        - n as Scalar * refl)
}

/// A point of the Lagrangian manifold of the N-th reflected wave together
/// with its projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangianPoint {
    pub sigma: Scalar,
    pub mu: Scalar,
    pub eta: Scalar,
    pub n: usize,
    pub big_x: Scalar,
    pub big_y: Scalar,
    pub big_t: Scalar,
    /// Physical dual variables: ξ = η√a·σ, τ = η√(ρ+aμ²).
    pub xi: Scalar,
    pub tau: Scalar,
}

/// 1 − ¾B′(λ(1+μ²)^{3/2}).
pub fn reflection_slowdown(lambda: Scalar, mu: Scalar) -> Result<Scalar> {
    let z = 1.0 + mu * mu;
    Ok(1.0 - 0.75 * phase_correction_pair(lambda * z.powf(1.5))?.1)
}

/// Projection of the parameters (σ, μ) of the N-th Lagrangian manifold at
/// frequency η.
pub fn lagrangian_point(a: Scalar, n: usize, h: Scalar, eta: Scalar, sigma: Scalar, mu: Scalar, eps0: Scalar) -> Result<LagrangianPoint> {
    if a * mu * mu > eps0 {
        return Err(Error::DomainViolation(format!("a·μ² = {} exceeds ε₀ = {eps0}", a * mu * mu)));
    }
    let frame = ScaleFrame::new(a, h, eta)?;
    let rho = frame.rho;
    let m2 = mu * mu;
    let alpha = reflection_slowdown(frame.lambda, mu)?;
    let n_f = n as Scalar;
    let r = (rho + a * m2).sqrt();
    let big_x = 1.0 + m2 - sigma * sigma;
    let big_y = 2.0 * m2 * (mu - sigma) * h1(a, mu) + 2.0 / 3.0 * (sigma.powi(3) - mu.powi(3)) + 4.0 * n_f * alpha * h2(a, mu);
    let big_t = 2.0 * r * (sigma - mu + 2.0 * n_f * (1.0 + m2).sqrt() * alpha);
    Ok(LagrangianPoint { sigma, mu, eta, n, big_x, big_y, big_t, xi: eta * a.sqrt() * sigma, tau: eta * r })
}

/// F₀, G₀, H₀ at T̃ = T/(4N).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFunctions {
    pub f0: Scalar,
    pub g0: Scalar,
    pub h0: Scalar,
}

pub fn scale_functions(a: Scalar, t_tilde: Scalar) -> ScaleFunctions {
    let f0 = 2.0 * t_tilde * t_tilde / (1.0 + (1.0 + 4.0 * a * t_tilde * t_tilde).sqrt());
    let g0_inv = f0.sqrt() * (1.0 + a * f0).sqrt() * (1.0 / f0 + a / (1.0 + a * f0));
    let h0 = (1.0 - f0) / ((1.0 + a).sqrt() + (1.0 + a * f0).sqrt());
    ScaleFunctions { f0, g0: 1.0 / g0_inv, h0 }
}

/// F₁ = −(G₀/N)(T′/2 + σ√(1+aF₀)).
pub fn f1(a: Scalar, n: usize, t_tilde: Scalar, tp: Scalar, sigma: Scalar) -> Scalar {
    let s = scale_functions(a, t_tilde);
    -(s.g0 / n as Scalar) * (tp / 2.0 + sigma * (1.0 + a * s.f0).sqrt())
}

/// Local phase of the N-th wave near its stationary set (the O(a) cubic
/// remainder is dropped):
/// (X−F₀)σ + σ³/3 + H₀T′ + ψ̃_a(T′) + G₀(σr + T′/2)²/(2Nr) − (T′/2+σ)³/(12N²), r = √(1+aF₀).
pub fn local_phase(a: Scalar, n: usize, t_tilde: Scalar, big_x: Scalar, tp: Scalar, sigma: Scalar) -> Scalar {
    let s = scale_functions(a, t_tilde);
    let r = (1.0 + a * s.f0).sqrt();
    let nf = n as Scalar;
    (big_x - s.f0) * sigma + sigma.powi(3) / 3.0 + s.h0 * tp + psi_a_tilde(a, tp) + s.g0 / (2.0 * nf * r) * (sigma * r + tp / 2.0).powi(2)
        - (tp / 2.0 + sigma).powi(3) / (12.0 * nf * nf)
}

/// Unfolding parameters p = −N²(X − F₀), q = −2N²H₀ at T̃ = T/(4N).
pub fn unfolding_parameters(a: Scalar, n: usize, big_t: Scalar, big_x: Scalar) -> (Scalar, Scalar) {
    let nf = n as Scalar;
    let s = scale_functions(a, big_t / (4.0 * nf));
    (-nf * nf * (big_x - s.f0), -2.0 * nf * nf * s.h0)
}

/// The blown-up phase in (x, y) = (−NT′/2, −Nσ):
/// py − y³/3 + qx + N³ψ̃_a(−2x/N) + G₀(yr + x)²/(2r) + (x+y)³/(12N²).
#[derive(Debug, Clone, Copy)]
pub struct BlownUpPhase {
    pub a: Scalar,
    pub n: usize,
    pub t_tilde: Scalar,
    pub p: Scalar,
    pub q: Scalar,
}

impl BlownUpPhase {
    pub fn value(&self, x: Scalar, y: Scalar) -> Scalar {
        let s = scale_functions(self.a, self.t_tilde);
        let r = (1.0 + self.a * s.f0).sqrt();
        let nf = self.n as Scalar;
        self.p * y - y.powi(3) / 3.0 + self.q * x + nf.powi(3) * psi_a_tilde(self.a, -2.0 * x / nf) + s.g0 / (2.0 * r) * (y * r + x).powi(2)
            + (x + y).powi(3) / (12.0 * nf * nf)
    }

    /// Closed-form Hessian determinant −2G₀(x+y) + 4xy − (x+y)²/N², exact at a = 0.
    pub fn hessian_formula(&self, x: Scalar, y: Scalar) -> Scalar {
        let g0 = scale_functions(self.a, self.t_tilde).g0;
        let nf = self.n as Scalar;
        -2.0 * g0 * (x + y) + 4.0 * x * y - (x + y).powi(2) / (nf * nf)
    }

    /// Hessian determinant by central differences.
    pub fn hessian_stencil(&self, x: Scalar, y: Scalar, step: Scalar) -> Scalar {
        let f = |u: Scalar, v: Scalar| self.value(u, v);
        let d = step;
        let fxx = (f(x + d, y) - 2.0 * f(x, y) + f(x - d, y)) / (d * d);
        let fyy = (f(x, y + d) - 2.0 * f(x, y) + f(x, y - d)) / (d * d);
        let fxy = (f(x + d, y + d) - f(x + d, y - d) - f(x - d, y + d) + f(x - d, y - d)) / (4.0 * d * d);
        fxx * fyy - fxy * fxy
    }

    /// Cubic Taylor model around the origin, with ψ̃_a(T′) ≈ T′³/(24ρ^{3/2}).
    /// Exact at a = 0.
    pub fn cubic_model(&self) -> Poly2 {
        let s = scale_functions(self.a, self.t_tilde);
        let r = (1.0 + self.a * s.f0).sqrt();
        let nf = self.n as Scalar;
        let k = 1.0 / (12.0 * nf * nf);
        let psi3 = -1.0 / (3.0 * (1.0 + self.a).powf(1.5));
        let g = s.g0 / (2.0 * r);
        Poly2::new(vec![
            (1, 0, self.q),
            (0, 1, self.p),
            (2, 0, g),
            (1, 1, 2.0 * g * r),
            (0, 2, g * r * r),
            (3, 0, psi3 + k),
            (2, 1, 3.0 * k),
            (1, 2, 3.0 * k),
            (0, 3, -1.0 / 3.0 + k),
        ])
    }
}

/// Where (p, q) = (0, 0): X = F₀ = 1 and T = 4N√(1+a).
pub fn swallowtail_condition(a: Scalar, n: usize) -> Result<(Scalar, Scalar)> {
    if n == 0 {
        return Err(Error::PreconditionViolated("the swallowtail needs N ≥ 1".into()));
    }
    Ok((1.0, 4.0 * n as Scalar * (1.0 + a).sqrt()))
}

/// Physical swallowtail location (x, t) = (a, 4N√(a(1+a))).
pub fn swallowtail_point(a: Scalar, n: usize) -> Result<(Scalar, Scalar)> {
    let (big_x, big_t) = swallowtail_condition(a, n)?;
    Ok((a * big_x, a.sqrt() * big_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn source_manifold_identity() {
        for &a in &[0.0, 0.01, 0.1, 0.2] {
            let rho: Scalar = 1.0 + a;
            let mut th: Scalar = -0.5;
            while th <= 0.5 {
                let tp = -2.0 * th * (rho + th * th).sqrt();
                let lhs = psi_a(a, tp);
                let rhs = -2.0 * th * (rho + th * th) + 2.0 / 3.0 * th.powi(3);
                assert!((lhs - rhs).abs() < 1e-10);
                th += 0.01;
            }
            assert_eq!(psi_a(a, 0.0), 0.0);
        }
    }

    #[test]
    fn psi_tilde_is_cubic_at_the_origin() {
        for &a in &[0.0, 0.05, 0.2] {
            let rho: Scalar = 1.0 + a;
            for &tp in &[1e-3_f64, -2e-3, 5e-3] {
                let lead = tp.powi(3) / (24.0 * rho.powf(1.5));
                assert!((psi_a_tilde(a, tp) / lead - 1.0).abs() < 1e-4);
            }
        }
        assert!(gamma_a(0.1, 1.0).abs() < 1e-16);
    }

    #[test]
    fn psi_tilde_matches_unscaled() {
        for &a in &[0.01_f64, 0.1] {
            for &tp in &[-1.5, -0.3, 0.7, 1.9] {
                let sa = a.sqrt();
                let direct = (psi_a(a, sa * tp) - (1.0 + a).sqrt() * sa * tp) / a.powf(1.5);
                assert!((psi_a_tilde(a, tp) - direct).abs() < 1e-8 * (1.0 + direct.abs()));
                let d = 1e-5;
                let fd = (psi_a_tilde(a, tp + d) - psi_a_tilde(a, tp - d)) / (2.0 * d);
                assert!((psi_a_tilde_prime(a, tp) - fd).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn phase_degenerates_at_a_zero() {
        let ph = ReflectedPhase { a: 0.0, n: 2, lambda: 30.0 };
        let (tt, xx, tp, s, z): (Scalar, Scalar, Scalar, Scalar, Scalar) = (1.3, 0.4, 0.25, -0.6, 1.7);
        let (b, _) = phase_correction_pair(30.0 * z.powf(1.5)).unwrap();
        let expect = (z - 1.0) * (tt - tp) / 2.0 + tp.powi(3) / 24.0 + s * (xx - z) + s.powi(3) / 3.0
            + 2.0 * (-4.0 * z.powf(1.5) / 3.0 + b / 30.0);
        assert!((ph.value(tt, xx, tp, s, z).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn quintic_reduction_constants() {
        assert!((h1(0.0, 0.0) - 0.5).abs() < 1e-15);
        assert!((h2(0.0, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        // H₂/√(1+μ²) ≈ 1/3 − μ²/6 at a = 0.
        let mu: Scalar = 0.01;
        assert!((h2(0.0, mu) / (1.0 + mu * mu).sqrt() - (1.0 / 3.0 - mu * mu / 6.0)).abs() < 1e-10);
    }

    #[test]
    fn lagrangian_examples() {
        let p = lagrangian_point(0.05, 0, 0.01, 1.0, 0.3, 0.3, 0.1).unwrap();
        assert!(p.big_t.abs() < 1e-15 && (p.big_x - 1.0).abs() < 1e-15 && p.big_y.abs() < 1e-15);
        let p = lagrangian_point(0.05, 0, 0.01, 1.0, 0.4, 0.0, 0.1).unwrap();
        assert!((p.big_t - 2.0 * 1.05_f64.sqrt() * 0.4).abs() < 1e-14);
        assert!((p.big_x - 0.84).abs() < 1e-14);
        assert!(matches!(lagrangian_point(0.05, 1, 0.01, 1.0, 0.0, 2.0, 0.1), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn swallowtail_times() {
        let (_, t) = swallowtail_point(0.01, 1).unwrap();
        assert!((t - 0.40200).abs() < 5e-6);
        let (x, t) = swallowtail_point(0.04, 3).unwrap();
        assert!((t - 2.44753).abs() < 5e-5 && x == 0.04);
        let (_, t) = swallowtail_point(1e-6, 5).unwrap();
        assert!((t / (20.0 * 1e-3) - 1.0).abs() < 1e-5);
        // (p, q) vanishes there.
        let (big_x, big_t) = swallowtail_condition(0.07, 2).unwrap();
        let (p, q) = unfolding_parameters(0.07, 2, big_t, big_x);
        assert!(p.abs() < 1e-12 && q.abs() < 1e-12);
    }

    #[test]
    fn hessian_formula_at_a_zero() {
        for &(n, tt) in &[(1usize, 0.8), (2, 1.0), (4, 1.6)] {
            let g = BlownUpPhase { a: 0.0, n, t_tilde: tt, p: 0.3, q: -0.2 };
            for &(x, y) in &[(0.1_f64, 0.2_f64), (-0.4, 0.3), (0.7, -0.9)] {
                let err = (g.hessian_formula(x, y) - g.hessian_stencil(x, y, 1e-3)).abs();
                assert!(err < 1e-4, "n = {n}: {err}");
            }
        }
        assert!(scale_functions(0.0, 1.3).g0 - 1.3 < 1e-15);
    }

    #[test]
    fn cubic_model_is_exact_at_a_zero() {
        let g = BlownUpPhase { a: 0.0, n: 3, t_tilde: 1.1, p: 0.4, q: -0.7 };
        let m = g.cubic_model();
        for &(x, y) in &[(0.3, -0.2), (-1.0, 0.5)] {
            assert!((m.eval([x, y]) - g.value(x, y)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn unscaled_phase_consistency(
            a in 0.01..0.2f64, n in 0usize..4, lam in 5.0..200.0f64,
            tt in 0.0..8.0f64, xx in -0.5..1.5f64, tp in -0.8..0.8f64, s in -1.5..1.5f64, z in 0.6..2.5f64,
        ) {
            let ph = ReflectedPhase { a, n, lambda: lam };
            let sa = a.sqrt();
            let t = sa * tt;
            let lhs = ph.unscaled(t, a * xx, sa * tp, sa * s, (1.0 + a * z).sqrt()).unwrap();
            let rhs = t * (1.0 + a).sqrt() + a.powf(1.5) * ph.value(tt, xx, tp, s, z).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
        }

        #[test]
        fn gradient_matches_stencil(
            a in 0.0..0.2f64, n in 0usize..4, lam in 5.0..200.0f64,
            tt in 0.0..8.0f64, xx in -0.5..1.5f64, tp in -0.8..0.8f64, s in -1.5..1.5f64, z in 0.8..2.5f64,
        ) {
            let ph = ReflectedPhase { a, n, lambda: lam };
            let g = ph.gradient(tt, xx, tp, s, z).unwrap();
            let d = 1e-4;
            let f = |tp: Scalar, s: Scalar, z: Scalar| ph.value(tt, xx, tp, s, z).unwrap();
            let num = [
                (f(tp + d, s, z) - f(tp - d, s, z)) / (2.0 * d),
                (f(tp, s + d, z) - f(tp, s - d, z)) / (2.0 * d),
                (f(tp, s, z + d) - f(tp, s, z - d)) / (2.0 * d),
            ];
            for i in 0..3 {
                prop_assert!((g[i] - num[i]).abs() < 1e-6 * (1.0 + g[i].abs()), "component {i}: {} vs {}", g[i], num[i]);
            }
        }

        #[test]
        fn lagrangian_point_is_critical(
            a in 0.0..0.2f64, n in 0usize..4, sigma in -1.0..1.0f64, mu in -1.0..1.0f64, eta in 0.5..2.5f64,
        ) {
            let h = 0.02;
            let p = lagrangian_point(a, n, h, eta, sigma, mu, 0.2).unwrap();
            let lambda = ScaleFrame::new(a, h, eta).unwrap().lambda;
            let ph = ReflectedPhase { a, n, lambda };
            let tp = -2.0 * mu * (1.0 + a + a * mu * mu).sqrt();
            let z = 1.0 + mu * mu;
            let g = ph.gradient(p.big_t, p.big_x, tp, sigma, z).unwrap();
            for gi in g {
                prop_assert!(gi.abs() < 1e-10);
            }
            // Stationarity in the frequency: Y = −(φ without B) − N z^{3/2}B′.
            let (b, bp) = phase_correction_pair(lambda * z.powf(1.5)).unwrap();
            let phi0 = ph.value(p.big_t, p.big_x, tp, sigma, z).unwrap() - n as Scalar * b / lambda;
            let y = -(phi0 + n as Scalar * z.powf(1.5) * bp);
            prop_assert!((p.big_y - y).abs() < 1e-9 * (1.0 + y.abs()), "{} vs {y}", p.big_y);
        }
    }
}
