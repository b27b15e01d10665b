//! Canonical caustic integrals
//! u_h(z) = (2πh)^{−1/2} ∫ e^{iΦ(z,ζ)/h} g(ζ) dζ
//! for the fold (degree 3), cusp (4) and swallowtail (5) normal forms, with a
//! Gaussian cutoff g(ζ) = exp(−(ζ/R)²). Because g is entire the real line can
//! be deformed: the tails leave the real axis at ±L₀ along rays where e^{iζ^m}
//! decays fastest, and every piece is absolutely convergent.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quad::{adaptive, QuadOptions};
use crate::{c, Complex, Error, Result, Scalar};

/// Normal-form family of a degenerate phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CanonicalCausticKind {
    Fold,
    Cusp,
    Swallowtail,
}

impl CanonicalCausticKind {
    /// Degree m of the leading term ζ^m/m.
    pub fn degree(self) -> usize {
        match self {
            Self::Fold => 3,
            Self::Cusp => 4,
            Self::Swallowtail => 5,
        }
    }

    /// Loss exponent κ = 1/2 − 1/m at the most degenerate point.
    pub fn order(self) -> Scalar {
        0.5 - 1.0 / self.degree() as Scalar
    }

    /// Number of unfolding parameters (the constant term excluded).
    pub fn unfolding_dim(self) -> usize {
        self.degree() - 2
    }
}

/// Cutoff radius and tolerances.
#[derive(Debug, Clone, Copy)]
pub struct CanonicalOptions {
    pub cutoff_radius: Scalar,
    pub rel_tol: Scalar,
    pub max_evals: usize,
}

impl Default for CanonicalOptions {
    fn default() -> Self {
        Self { cutoff_radius: 4.0, rel_tol: 1e-11, max_evals: 2_000_000 }
    }
}

/// Polynomial phase Φ(ζ) = Σ a_k ζ^k with a_m = 1/m.
#[derive(Debug, Clone)]
pub struct CanonicalPhase {
    pub coeffs: Vec<Scalar>,
}

impl CanonicalPhase {
    /// Φ = ζ^m/m + z₁ζ^{m−2}/(m−2) + … + z_{m−2}ζ [+ z_{m−1}].
    pub fn new(kind: CanonicalCausticKind, z: &[Scalar]) -> Result<Self> {
        let m = kind.degree();
        let n = kind.unfolding_dim();
        if z.len() != n && z.len() != n + 1 {
            return Err(Error::PreconditionViolated(format!(
                "{kind:?} takes {n} or {} parameters, got {}",
                n + 1,
                z.len()
            )));
        }
        let mut coeffs = vec![0.0; m + 1];
        coeffs[m] = 1.0 / m as Scalar;
        for (j, zj) in z.iter().take(n).enumerate() {
            let p = m - 2 - j;
            coeffs[p] = zj / p as Scalar;
        }
        if z.len() == n + 1 {
            coeffs[0] = z[n];
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: Complex) -> Complex {
        self.coeffs.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * x + *a)
    }

    pub fn eval_real(&self, x: Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * x + a)
    }

    pub fn derivative_real(&self, x: Scalar) -> Scalar {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, a)| acc * x + k as Scalar * a)
    }

    /// Radius beyond which Φ′ is dominated by its leading term.
    fn critical_radius(&self) -> Scalar {
        let m = self.degree();
        let mut r: Scalar = 0.0;
        for k in 1..m {
            let b = (k as Scalar * self.coeffs[k]).abs();
            if b > 0.0 {
                r = r.max(b.powf(1.0 / (m - k) as Scalar));
            }
        }
        2.0 * r
    }
}

/// u_h(z) for the chosen normal form.
pub fn canonical_integral(kind: CanonicalCausticKind, z: &[Scalar], h: Scalar) -> Result<Complex> {
    canonical_integral_with(kind, z, h, CanonicalOptions::default())
}

/// u_h(z) with explicit options.
pub fn canonical_integral_with(
    kind: CanonicalCausticKind,
    z: &[Scalar],
    h: Scalar,
    opts: CanonicalOptions,
) -> Result<Complex> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::PreconditionViolated(format!("h must lie in (0, 1], got {h}")));
    }
    if z.iter().any(|v| !v.is_finite() || v.abs() > 10.0) {
        return Err(Error::PreconditionViolated("unfolding parameters must satisfy |z_j| ≤ 10".into()));
    }
    let phase = CanonicalPhase::new(kind, z)?;
    let value = contour_integral(&phase, h, opts)?;
    Ok(value / (2.0 * PI * h).sqrt())
}

fn integrand(phase: &CanonicalPhase, h: Scalar, r2: Scalar, zeta: Complex) -> Complex {
    let e = c(0.0, 1.0) * phase.eval(zeta) / h - zeta * zeta / r2;
    e.exp()
}

fn contour_integral(phase: &CanonicalPhase, h: Scalar, opts: CanonicalOptions) -> Result<Complex> {
    let m = phase.degree();
    let r2 = opts.cutoff_radius * opts.cutoff_radius;
    let l0 = phase.critical_radius();
    let qopts = |panels: usize| QuadOptions {
        abs_tol: 1e-15,
        rel_tol: opts.rel_tol,
        initial_panels: panels,
        max_evals: opts.max_evals,
    };
    let mut total = c(0.0, 0.0);
    let mut err = 0.0;
    let mut converged = true;

    if l0 > 0.0 {
        // Oscillation count on the real segment fixes the starting panels.
        let samples = 64;
        let mut max_d: Scalar = 0.0;
        for i in 0..=samples {
            let x = -l0 + 2.0 * l0 * i as Scalar / samples as Scalar;
            max_d = max_d.max(phase.derivative_real(x).abs());
        }
        let osc = (max_d * 2.0 * l0 / (2.0 * PI * h)).ceil() as usize;
        let r = adaptive(|x| integrand(phase, h, r2, c(x, 0.0)), -l0, l0, qopts(osc.clamp(4, 20_000)));
        total += r.value;
        err += r.error;
        converged &= r.converged;
    }

    let theta = PI / (2.0 * m as Scalar);
    let left_angle = if m % 2 == 1 { PI - theta } else { PI + theta };
    for (start, angle, orient) in [(l0, theta, 1.0), (-l0, left_angle, -1.0)] {
        let dir = Complex::from_polar(1.0, angle);
        let end = ray_extent(phase, h, r2, start, dir);
        let f = |s: Scalar| integrand(phase, h, r2, start + dir * s) * dir;
        let panels = 8 + (end / h.powf(1.0 / m as Scalar)).ceil() as usize;
        let r = adaptive(f, 0.0, end, qopts(panels.min(4000)));
        total += r.value * orient;
        err += r.error;
        converged &= r.converged;
    }
    if !converged {
        return Err(Error::QuadratureFailure(format!(
            "contour integral did not reach tolerance (value {total}, error {err:e})"
        )));
    }
    Ok(total)
}

// Distance along the ray after which the integrand is below e^{−60}.
fn ray_extent(phase: &CanonicalPhase, h: Scalar, r2: Scalar, start: Scalar, dir: Complex) -> Scalar {
    let log_mod = |s: Scalar| {
        let z = start + dir * s;
        (c(0.0, 1.0) * phase.eval(z) / h - z * z / r2).re
    };
    let mut s = h.powf(1.0 / phase.degree() as Scalar).min(0.5);
    for _ in 0..200 {
        if log_mod(s) < -60.0 && log_mod(1.5 * s) < -60.0 {
            return s;
        }
        s *= 1.25;
    }
    s
}

/// Brute-force trapezoid on the real line (oracle for moderate h).
pub fn canonical_integral_trapezoid(
    kind: CanonicalCausticKind,
    z: &[Scalar],
    h: Scalar,
    cutoff_radius: Scalar,
    points_per_radian: Scalar,
) -> Result<Complex> {
    let phase = CanonicalPhase::new(kind, z)?;
    let half = cutoff_radius * 6.5;
    let max_d = phase.derivative_real(half).abs().max(phase.derivative_real(-half).abs());
    let n = ((2.0 * half * max_d / h * points_per_radian).ceil() as usize).max(2000);
    let dx = 2.0 * half / n as Scalar;
    let r2 = cutoff_radius * cutoff_radius;
    let mut acc = c(0.0, 0.0);
    for i in 0..=n {
        let x = -half + i as Scalar * dx;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += c(-x * x / r2, phase.eval_real(x) / h).exp() * w;
    }
    Ok(acc * dx / (2.0 * PI * h).sqrt())
}

/// sup over the scan line z = base + s·direction·h^{2/3}, s ∈ [s_lo, s_hi],
/// of |u_h|; returns (sup, maximizing s).
pub fn sup_along_line(
    kind: CanonicalCausticKind,
    base: &[Scalar],
    direction: &[Scalar],
    h: Scalar,
    s_range: (Scalar, Scalar),
    opts: CanonicalOptions,
) -> Result<(Scalar, Scalar)> {
    let scale = h.powf(2.0 / 3.0);
    let eval = |s: Scalar| -> Result<Scalar> {
        let z: Vec<Scalar> = base.iter().zip(direction).map(|(b, d)| b + s * d * scale).collect();
        Ok(canonical_integral_with(kind, &z, h, opts)?.norm())
    };
    let n = 61;
    let (lo, hi) = s_range;
    let step = (hi - lo) / (n - 1) as Scalar;
    let mut best = (Scalar::NEG_INFINITY, lo);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let s = lo + i as Scalar * step;
        let v = eval(s)?;
        values.push(v);
        if v > best.0 {
            best = (v, s);
        }
    }
    // Golden-section refinement around the best grid point.
    let (mut a, mut b) = ((best.1 - step).max(lo), (best.1 + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..40 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = eval(x2)?;
        }
    }
    let (fm, xm) = if f1 > f2 { (f1, x1) } else { (f2, x2) };
    if fm > best.0 {
        best = (fm, xm);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ai;

    #[test]
    fn fold_matches_airy_profile() {
        // With a wide cutoff the fold integral is √(2π) h^{−1/6} Ai(z₁ h^{−2/3}).
        let h: Scalar = 0.01;
        let opts = CanonicalOptions { cutoff_radius: 2000.0, ..Default::default() };
        for z1 in [-0.1, 0.0, 0.05] {
            let u = canonical_integral_with(CanonicalCausticKind::Fold, &[z1], h, opts).unwrap();
            let exact = (2.0 * PI).sqrt() * h.powf(-1.0 / 6.0) * ai(z1 * h.powf(-2.0 / 3.0));
            assert!((u.norm() - exact.abs()).abs() < 1e-6 * exact.abs().max(1.0), "{z1}: {u} vs {exact}");
        }
    }

    #[test]
    fn constant_term_only_rotates() {
        let a = canonical_integral(CanonicalCausticKind::Cusp, &[0.3, -0.2], 0.1).unwrap();
        let b = canonical_integral(CanonicalCausticKind::Cusp, &[0.3, -0.2, 0.05], 0.1).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(canonical_integral(CanonicalCausticKind::Fold, &[1.0, 2.0, 3.0], 0.1).is_err());
        assert!(canonical_integral(CanonicalCausticKind::Fold, &[1.0], 0.0).is_err());
    }
}
