//! The reflected waves themselves.
//!
//! At one frequency (λ = a^{3/2}η/h) the N-th wave is
//!
//! w_N(T,X) = (λ^{2/3}/2) ∫ e^{iλTγ_a(z)} Ai(λ^{2/3}(X−z)) r(λ^{2/3}z)^N G(z) dz,
//!
//! with r = −A₋/A₊ the reflection factor and
//! G(z) = χ₂(z)χ₃(√(1+az)) ĝ(z)/√(1+az), ĝ(z) = ∫ e^{iλ(ψ̃_a(T′) − γ_a(z)T′)} σ₀(√aT′) dT′.
//! The σ-integral of the original three-fold representation is the Airy
//! factor, done exactly. The physical field is an η-integral of these
//! profiles against η·χ₀(η)e^{iλ̃ηY}.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{
    gamma_a, gamma_a_prime, lagrangian_point, psi_a_tilde, CutoffSuite, RegimeConstants, ScaleFrame,
};
use crate::quad::gauss_legendre;
use crate::specfun::{ai_fast, ai_prime, airy_branch, omega, reflection_factor, Sign};
use crate::{c, Complex, Error, Result, Scalar};

const ORDER: usize = 16;
/// Oscillations per Gauss–Legendre panel.
const OSC_PER_PANEL: Scalar = 2.0;
const MAX_PANEL: Scalar = 0.1;
/// Nodes whose weight falls below this fraction of the largest are dropped.
const TRIM: Scalar = 1e-13;

/// Which part of the z-integral to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ZPart {
    #[default]
    Full,
    /// Weighted by χ₅: the region around the glancing value z = 1.
    NearGlancing,
    /// Weighted by 1 − χ₅.
    Transverse,
}

/// Resolution and range parameters of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveOptions {
    pub cutoffs: CutoffSuite,
    pub consts: RegimeConstants,
    /// Largest rescaled time T the grids must resolve.
    pub t_max: Scalar,
    /// Smallest X at which profiles will be evaluated.
    pub x_min: Scalar,
    pub z_part: ZPart,
}

impl WaveOptions {
    pub fn new(t_max: Scalar) -> Self {
        Self { cutoffs: CutoffSuite::default(), consts: RegimeConstants::default(), t_max, x_min: 0.0, z_part: ZPart::Full }
    }
}

fn panel_rule(lo: Scalar, hi: Scalar, mut freq: impl FnMut(Scalar) -> Scalar) -> (Vec<Scalar>, Vec<Scalar>) {
    let (x, w) = gauss_legendre::<Scalar>(ORDER);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut a = lo;
    while a < hi {
        let guess = (OSC_PER_PANEL * 2.0 * PI / freq(a)).min(MAX_PANEL);
        let width = (OSC_PER_PANEL * 2.0 * PI / freq((a + guess).min(hi))).min(MAX_PANEL).min(hi - a);
        let b = if hi - (a + width) < 0.25 * width { hi } else { a + width };
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
        a = b;
    }
    (nodes, weights)
}

/// z-quadrature data of the reflected waves at one λ.
#[derive(Debug, Clone)]
pub struct ReflectedWave {
    pub a: Scalar,
    pub lambda: Scalar,
    lam23: Scalar,
    z: Vec<Scalar>,
    /// (λ^{2/3}/2)·weight·G(z).
    amp: Vec<Complex>,
    refl: Vec<Complex>,
    gamma: Vec<Scalar>,
}

/// Expansion of a datum in Dirichlet Airy modes, evolved exactly.
#[derive(Debug, Clone)]
pub struct ModeExpansion {
    lambda: Scalar,
    lam23: Scalar,
    gamma: Vec<Scalar>,
    omega: Vec<Scalar>,
    /// c_k/(λ^{−1/3}|Ai′(−ω_k)|), so that W = Σ coeff_k e^{iλTγ_k} Ai(λ^{2/3}X − ω_k).
    coeff: Vec<Complex>,
}

impl ModeExpansion {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn eval(&self, big_t: Scalar, big_x: Scalar) -> Complex {
        let mut acc = c(0.0, 0.0);
        for ((g, w), k) in self.gamma.iter().zip(&self.omega).zip(&self.coeff) {
            acc += k * Complex::from_polar(ai_fast(self.lam23 * big_x - w), self.lambda * big_t * g);
        }
        acc
    }
}

impl ReflectedWave {
    /// Quadrature data resolving reflections up to `n_hi` for T ≤ opts.t_max.
    pub fn new(a: Scalar, lambda: Scalar, n_hi: usize, opts: &WaveOptions) -> Result<Self> {
        if !(a > 0.0 && lambda > 0.0) {
            return Err(Error::PreconditionViolated(format!("reflected wave needs a, λ > 0 (got {a}, {lambda})")));
        }
        let cut = &opts.cutoffs;
        let lam23 = lambda.powf(2.0 / 3.0);
        let chi5 = cut.chi5();
        let (z_lo, z_hi) = match opts.z_part {
            ZPart::Full => (cut.beta / 2.0, cut.z_max(a)),
            ZPart::NearGlancing => (cut.beta / 2.0, cut.z0.min(cut.z_max(a))),
            ZPart::Transverse => ((1.0 + cut.z0) / 2.0, cut.z_max(a)),
        };
        let tp_max = cut.theta0 / a.sqrt();
        let nh = n_hi as Scalar;
        let t_max = opts.t_max.max(0.0);
        let x_min = opts.x_min.min(0.0);
        let freq = |z: Scalar| {
            let gp = gamma_a_prime(a, z);
            lambda * ((z - x_min).max(0.0).sqrt() + t_max * gp + 2.1 * nh * z.sqrt() + tp_max * gp) + 2.0 * lam23 + 20.0
        };
        let (z, wz) = panel_rule(z_lo, z_hi, freq);

        // T′-rule for ĝ, resolving the largest γ_a on the window.
        let g_max = gamma_a(a, z_hi).abs().max(gamma_a(a, z_lo).abs());
        let slope = lambda * (tp_max * tp_max / 8.0 + g_max) + 20.0;
        let (tp, wt) = panel_rule(-tp_max, tp_max, |_| slope);
        let sigma0 = cut.chi1();
        let src: Vec<(Scalar, Complex)> = tp
            .iter()
            .zip(&wt)
            .map(|(&t, &w)| (t, Complex::from_polar(w * sigma0.eval(a.sqrt() * t), lambda * psi_a_tilde(a, t))))
            .filter(|(_, v)| v.norm() > 0.0)
            .collect();

        let (chi2, chi3) = (cut.chi2(), cut.chi3());
        let mut amp = Vec::with_capacity(z.len());
        for (&zi, &wi) in z.iter().zip(&wz) {
            let zeta = (1.0 + a * zi).sqrt();
            let part = match opts.z_part {
                ZPart::Full => 1.0,
                ZPart::NearGlancing => chi5.eval(zi),
                ZPart::Transverse => 1.0 - chi5.eval(zi),
            };
            let cutoff = chi2.eval(zi) * chi3.eval(zeta) * part;
            if cutoff == 0.0 {
                amp.push(c(0.0, 0.0));
                continue;
            }
            let k = -lambda * gamma_a(a, zi);
            let g_hat: Complex = src.iter().map(|(t, v)| v * Complex::from_polar(1.0, k * t)).sum();
            amp.push(g_hat * (0.5 * lam23 * wi * cutoff / zeta));
        }
        let peak = amp.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        let mut out = Self { a, lambda, lam23, z: Vec::new(), amp: Vec::new(), refl: Vec::new(), gamma: Vec::new() };
        for (zi, ai) in z.into_iter().zip(amp) {
            if ai.norm() > TRIM * peak {
                out.refl.push(reflection_factor(lam23 * zi)?);
                out.gamma.push(gamma_a(a, zi));
                out.z.push(zi);
                out.amp.push(ai);
            }
        }
        Ok(out)
    }

    pub fn nodes(&self) -> usize {
        self.z.len()
    }

    /// Largest z kept after trimming.
    pub fn z_extent(&self) -> (Scalar, Scalar) {
        (self.z.first().copied().unwrap_or(0.0), self.z.last().copied().unwrap_or(0.0))
    }

    /// amp·Σ_{N=lo}^{hi} r^N per node.
    fn weights(&self, n_lo: usize, n_hi: usize) -> Vec<Complex> {
        self.amp
            .iter()
            .zip(&self.refl)
            .map(|(&m, &r)| {
                let mut term = r.powu(n_lo as u32);
                let mut acc = c(0.0, 0.0);
                for _ in n_lo..=n_hi {
                    acc += term;
                    term *= r;
                }
                m * acc
            })
            .collect()
    }

    fn eval_with(&self, weights: &[Complex], big_t: Scalar, big_x: Scalar) -> Complex {
        let lt = self.lambda * big_t;
        let mut acc = c(0.0, 0.0);
        for ((w, z), g) in weights.iter().zip(&self.z).zip(&self.gamma) {
            acc += w * Complex::from_polar(ai_fast(self.lam23 * (big_x - z)), lt * g);
        }
        acc
    }

    /// Σ_{N=lo}^{hi} w_N(T, X).
    pub fn profile(&self, n_lo: usize, n_hi: usize, big_t: Scalar, big_x: Scalar) -> Complex {
        self.eval_with(&self.weights(n_lo, n_hi), big_t, big_x)
    }

    pub fn profiles(&self, n_lo: usize, n_hi: usize, points: &[(Scalar, Scalar)]) -> Vec<Complex> {
        let w = self.weights(n_lo, n_hi);
        points.iter().map(|&(t, x)| self.eval_with(&w, t, x)).collect()
    }

    /// Dirichlet-mode expansion of Σ_{N=lo}^{hi} w_N(0, ·) on X > 0, using
    /// ⟨Ai(λ^{2/3}(·−z)), Ai(λ^{2/3}·−ω)⟩ = λ^{−2/3}Ai(−λ^{2/3}z)Ai′(−ω)/(ω − λ^{2/3}z).
    pub fn mode_expansion(&self, n_lo: usize, n_hi: usize) -> Result<ModeExpansion> {
        let weights = self.weights(n_lo, n_hi);
        let w_top = self.lam23 * self.z.last().copied().unwrap_or(0.0) + 30.0;
        let airy: Vec<Scalar> = self.z.iter().map(|z| ai_fast(-self.lam23 * z)).collect();
        let mut out = ModeExpansion { lambda: self.lambda, lam23: self.lam23, gamma: Vec::new(), omega: Vec::new(), coeff: Vec::new() };
        let mut k = 1;
        loop {
            let om = omega(k)?;
            if om > w_top {
                break;
            }
            let dk = ai_prime(-om);
            let mut acc = c(0.0, 0.0);
            for ((wt, z), ai) in weights.iter().zip(&self.z).zip(&airy) {
                let gap = om - self.lam23 * z;
                let ratio = if gap.abs() < 1e-6 { dk } else { ai / gap };
                acc += wt * ratio;
            }
            // c_k = λ^{−1/3}sgn(Ai′)·Σ; divided by the norm λ^{−1/3}|Ai′|.
            out.coeff.push(acc * (1.0 / dk));
            out.omega.push(om);
            out.gamma.push(gamma_a(self.a, om / self.lam23));
            k += 1;
        }
        Ok(out)
    }
}

/// Physical reflected wave u_N(t, x; ħ) = √a·e^{(i/ħ)t√ρ}·w_N(T, X) at t = √aT, x = aX.
pub fn wave_un(a: Scalar, n: usize, hbar: Scalar, big_t: Scalar, big_x: Scalar) -> Result<Complex> {
    let lambda = a.powf(1.5) / hbar;
    let mut opts = WaveOptions::new(big_t);
    opts.x_min = big_x;
    let wave = ReflectedWave::new(a, lambda, n, &opts)?;
    let t = a.sqrt() * big_t;
    Ok(wave.profile(n, n, big_t, big_x) * Complex::from_polar(a.sqrt(), t * (1.0 + a).sqrt() / hbar))
}

/// Rescaled profiles at a set of (T, X), one value per η-node.
#[derive(Debug, Clone)]
pub struct ProfileBatch {
    pub points: Vec<(Scalar, Scalar)>,
    /// values[point][η-node].
    pub values: Vec<Vec<Complex>>,
    /// The exact Dirichlet evolution of the same datum, when requested.
    pub spectral: Option<Vec<Vec<Complex>>>,
}

/// Sum of the reflected waves over the frequency band, in physical units.
#[derive(Debug, Clone)]
pub struct ParametrixEvaluator {
    pub a: Scalar,
    pub h: Scalar,
    pub frame: ScaleFrame,
    pub opts: WaveOptions,
    pub n_max: usize,
    eta: Vec<Scalar>,
    /// √a/(2πh)²·w_i·η_i·χ₀(η_i).
    eta_weight: Vec<Scalar>,
    /// Bound on |Y| over the wave's Lagrangian projection for T ≤ t_max.
    pub y_extent: Scalar,
}

/// Bound on |Y| over the projected Lagrangian manifolds with N ≤ n_hi and
/// 0 ≤ T ≤ t_max, X ∈ [−1, 1.5].
pub fn lagrangian_y_extent(a: Scalar, h: Scalar, n_hi: usize, t_max: Scalar, eps0: Scalar) -> Result<Scalar> {
    let mu_max = (0.999 * eps0 / a).sqrt().min(3.0);
    let mut ext: Scalar = 1.0;
    for i in 0..=60 {
        let mu = -mu_max + 2.0 * mu_max * i as Scalar / 60.0;
        for j in 0..=60 {
            let sigma = -2.5 + 5.0 * j as Scalar / 60.0;
            for n in 0..=n_hi {
                let p = lagrangian_point(a, n, h, 1.0, sigma, mu, eps0)?;
                if p.big_t >= 0.0 && p.big_t <= t_max + 1.0 && p.big_x >= -1.0 && p.big_x <= 1.5 {
                    ext = ext.max(p.big_y.abs());
                }
            }
        }
    }
    Ok(ext)
}

impl ParametrixEvaluator {
    /// Needs h^{4/7} ≤ a ≤ a₀.
    pub fn new(a: Scalar, h: Scalar, opts: WaveOptions) -> Result<Self> {
        opts.cutoffs.validate()?;
        opts.consts.validate()?;
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::PreconditionViolated(format!("h must lie in (0, 1), got {h}")));
        }
        if a > opts.cutoffs.a0 || a < h.powf(4.0 / 7.0) {
            return Err(Error::RegimeViolation(format!(
                "the parametrix needs h^(4/7) = {:.4} ≤ a ≤ a₀ = {}, got a = {a}",
                h.powf(4.0 / 7.0),
                opts.cutoffs.a0
            )));
        }
        let frame = ScaleFrame::new(a, h, 1.0)?;
        let n_max = opts.consts.n_max(a);
        let y_extent = lagrangian_y_extent(a, h, n_max, opts.t_max, opts.consts.eps0)?;
        // The η-integrand oscillates at most like e^{iλ̃η(Y ± y_extent)}.
        let chi0 = opts.cutoffs.chi0();
        let (lo, hi) = chi0.support();
        let freq = 2.0 * frame.lambda_tilde * (y_extent + 2.0) + 10.0;
        let (eta, w) = panel_rule(lo, hi, |_| freq);
        let pref = a.sqrt() / (2.0 * PI * h).powi(2);
        let eta_weight = eta.iter().zip(&w).map(|(e, w)| pref * w * e * chi0.eval(*e)).collect();
        Ok(Self { a, h, frame, opts, n_max, eta, eta_weight, y_extent })
    }

    pub fn eta_nodes(&self) -> usize {
        self.eta.len()
    }

    /// Profiles Σ_{N=lo}^{hi} w_N at every (T, X), optionally with the mode
    /// evolution of the same datum.
    pub fn profiles(&self, points: &[(Scalar, Scalar)], n_lo: usize, n_hi: usize, spectral: bool) -> Result<ProfileBatch> {
        let mut opts = self.opts;
        let t_top = points.iter().fold(0.0_f64, |m, p| m.max(p.0));
        opts.t_max = opts.t_max.max(t_top);
        opts.x_min = points.iter().fold(0.0_f64, |m, p| m.min(p.1));
        let per_eta = self
            .eta
            .par_iter()
            .map(|&eta| -> Result<(Vec<Complex>, Option<Vec<Complex>>)> {
                let wave = ReflectedWave::new(self.a, eta * self.frame.lambda_tilde, n_hi, &opts)?;
                let vals = wave.profiles(n_lo, n_hi, points);
                let spec = if spectral {
                    let modes = wave.mode_expansion(n_lo, n_hi)?;
                    Some(points.iter().map(|&(t, x)| modes.eval(t, x)).collect())
                } else {
                    None
                };
                Ok((vals, spec))
            })
            .collect::<Result<Vec<_>>>()?;
        let np = points.len();
        let mut values = vec![Vec::with_capacity(self.eta.len()); np];
        let mut spec_values = spectral.then(|| vec![Vec::with_capacity(self.eta.len()); np]);
        for (vals, spec) in per_eta {
            for (i, v) in vals.into_iter().enumerate() {
                values[i].push(v);
            }
            if let (Some(dst), Some(src)) = (spec_values.as_mut(), spec) {
                for (i, v) in src.into_iter().enumerate() {
                    dst[i].push(v);
                }
            }
        }
        Ok(ProfileBatch { points: points.to_vec(), values, spectral: spec_values })
    }

    /// γ(T, X, Y) from one column of η-values.
    pub fn sample(&self, column: &[Complex], big_y: Scalar) -> Complex {
        let k = self.frame.lambda_tilde * big_y;
        column.iter().zip(&self.eta).zip(&self.eta_weight).map(|((v, e), w)| v * Complex::from_polar(*w, k * e)).sum()
    }

    /// Physical y of rescaled Y at time T.
    pub fn physical_y(&self, big_t: Scalar, big_y: Scalar) -> Scalar {
        self.frame.to_physical(big_t, 0.0, big_y).2
    }

    /// max over Y ∈ [−y_extent, y_extent] of |sample|, on a grid fine enough
    /// for the η-band, with the maximizing Y.
    pub fn sup_over_y(&self, column: &[Complex]) -> (Scalar, Scalar) {
        let dy = 2.0 * PI / (2.5 * self.frame.lambda_tilde) / 12.0;
        let n = (2.0 * self.y_extent / dy).ceil() as usize;
        let mut best = (Scalar::NEG_INFINITY, 0.0);
        for i in 0..=n {
            let y = -self.y_extent + i as Scalar * dy;
            let v = self.sample(column, y).norm();
            if v > best.0 {
                best = (v, y);
            }
        }
        // Golden refinement around the grid maximum.
        let f = |y: Scalar| self.sample(column, y).norm();
        let (y, v) = crate::gallery::golden_max(&f, best.1 - dy, best.1 + dy);
        if v > best.0 {
            (v, y)
        } else {
            best
        }
    }

    /// v(t, x, y) with every reflection N ≤ n_max.
    pub fn field(&self, t: Scalar, x: Scalar, y: Scalar) -> Result<Complex> {
        let (tt, xx, yy) = self.frame.to_rescaled(t, x, y);
        let batch = self.profiles(&[(tt, xx)], 0, self.n_max, false)?;
        Ok(self.sample(&batch.values[0], yy))
    }
}

/// Rescaled γ(T, X, Y) = Σ_{N ≤ C₀/√a} γ_N at default cutoffs.
pub fn parametrix_sum(a: Scalar, h: Scalar, big_t: Scalar, big_x: Scalar, big_y: Scalar) -> Result<Complex> {
    let ev = ParametrixEvaluator::new(a, h, WaveOptions::new(big_t))?;
    let batch = ev.profiles(&[(big_t, big_x)], 0, ev.n_max, false)?;
    Ok(ev.sample(&batch.values[0], big_y))
}

/// Pointwise checks of the reflection factor on the ζ-window.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TelescopingReport {
    /// max |r^N − (−A₋/A₊)^N| over the window and N ≤ n_max.
    pub reflection_error: Scalar,
    /// max relative error of (A₊ + A₋)Σ_{N≤M} r^N = A₊ + A₋r^M.
    pub telescoping_error: Scalar,
}

/// Compares the tabulated reflection factor against direct A± quotients
/// for w = λ^{2/3}z on the z-window of the cutoffs.
pub fn telescoping_check(a: Scalar, lambda: Scalar, n_max: usize, cut: &CutoffSuite) -> Result<TelescopingReport> {
    let lam23 = lambda.powf(2.0 / 3.0);
    let (lo, hi) = (cut.beta / 2.0, cut.z_max(a));
    let mut rep = TelescopingReport { reflection_error: 0.0, telescoping_error: 0.0 };
    for i in 0..=400 {
        let z = lo + (hi - lo) * i as Scalar / 400.0;
        let w = lam23 * z;
        let ap = airy_branch(Sign::Plus, c(w, 0.0))?;
        let am = airy_branch(Sign::Minus, c(w, 0.0))?;
        let direct = -am / ap;
        let r = reflection_factor(w)?;
        let (mut rn, mut dn, mut sum) = (c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        for _ in 0..=n_max {
            rep.reflection_error = rep.reflection_error.max((rn - dn).norm());
            sum += rn;
            rn *= r;
            dn *= direct;
        }
        let rm = rn / r;
        let lhs = (ap + am) * sum;
        let rhs = ap + am * rm;
        rep.telescoping_error = rep.telescoping_error.max((lhs - rhs).norm() / (ap.norm() + am.norm()));
    }
    Ok(rep)
}

/// sup over X ∈ [0, 1] of |w_N(0, X)| relative to sup |w₀(0, X)| at one λ.
pub fn initial_suppression(a: Scalar, lambda: Scalar, n: usize) -> Result<Scalar> {
    let opts = WaveOptions::new(0.0);
    let wave = ReflectedWave::new(a, lambda, n, &opts)?;
    let dx = 0.25 / lambda.powf(2.0 / 3.0);
    let xs: Vec<(Scalar, Scalar)> = (0..=((1.0 / dx).ceil() as usize)).map(|i| (0.0, (i as Scalar * dx).min(1.0))).collect();
    let sup = |lo, hi| wave.profiles(lo, hi, &xs).iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    Ok(sup(n, n) / sup(0, 0))
}

/// Boundary-trace diagnostics of the summed parametrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub a: Scalar,
    pub h: Scalar,
    pub t_grid: Vec<Scalar>,
    /// max_{t,y}|v(t,0,y)| / max_{t,x,y}|v|, all reflections.
    pub ratio: Scalar,
    /// The same with the direct wave v₀ alone.
    pub single_ratio: Scalar,
    pub passed: bool,
}

/// Trace of the full sum at x = 0 relative to its interior size.
pub fn parametrix_boundary_check(a: Scalar, h: Scalar, t_grid: &[Scalar]) -> Result<BoundaryReport> {
    let t_top = t_grid.iter().fold(0.0_f64, |m, &t| m.max(t)) / a.sqrt();
    let ev = ParametrixEvaluator::new(a, h, WaveOptions::new(t_top))?;
    let xs: Vec<Scalar> = (0..=12).map(|i| i as Scalar / 12.0 * 1.2).collect();
    let points: Vec<(Scalar, Scalar)> = t_grid.iter().flat_map(|&t| xs.iter().map(move |&x| (t / a.sqrt(), x))).collect();
    let ratio_for = |n_hi: usize| -> Result<Scalar> {
        let batch = ev.profiles(&points, 0, n_hi, false)?;
        let (mut trace, mut interior) = (0.0_f64, 0.0_f64);
        for (p, col) in points.iter().zip(&batch.values) {
            let (s, _) = ev.sup_over_y(col);
            if p.1 == 0.0 {
                trace = trace.max(s);
            }
            interior = interior.max(s);
        }
        Ok(trace / interior)
    };
    let ratio = ratio_for(ev.n_max)?;
    let single_ratio = ratio_for(0)?;
    Ok(BoundaryReport { a, h, t_grid: t_grid.to_vec(), ratio, single_ratio, passed: ratio <= h * h })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_factor_telescopes() {
        let rep = telescoping_check(0.1, 20.0, 12, &CutoffSuite::default()).unwrap();
        assert!(rep.reflection_error < 1e-8, "{rep:?}");
        assert!(rep.telescoping_error < 1e-8, "{rep:?}");
    }

    #[test]
    fn direct_wave_peaks_at_the_source() {
        let opts = WaveOptions::new(0.0);
        let lambda = 40.0;
        let wave = ReflectedWave::new(0.05, lambda, 0, &opts).unwrap();
        let dx = 0.002;
        let pts: Vec<(Scalar, Scalar)> = (0..=1000).map(|i| (0.0, i as Scalar * dx)).collect();
        let vals = wave.profiles(0, 0, &pts);
        let (imax, _) = vals.iter().enumerate().fold((0, 0.0), |b, (i, v)| if v.norm() > b.1 { (i, v.norm()) } else { b });
        assert!((pts[imax].1 - 1.0).abs() <= dx, "peak at X = {}", pts[imax].1);
    }

    #[test]
    fn modes_reproduce_the_datum() {
        let opts = WaveOptions::new(2.0);
        let wave = ReflectedWave::new(0.08, 40.0, 3, &opts).unwrap();
        let modes = wave.mode_expansion(0, 0).unwrap();
        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        // The datum has a small trace at X = 0, so the Dirichlet expansion
        // converges slowly there; compare away from the wall.
        for i in 8..=40 {
            let x = i as Scalar * 0.03;
            let direct = wave.profile(0, 0, 0.0, x);
            worst = worst.max((direct - modes.eval(0.0, x)).norm());
            scale = scale.max(direct.norm());
        }
        assert!(worst < 1e-3 * scale, "{worst} vs {scale}");
    }

    #[test]
    fn later_reflections_vanish_initially() {
        let r = initial_suppression(0.1, 1000.0, 1).unwrap();
        assert!(r <= 1e-3, "{r}");
    }
}
