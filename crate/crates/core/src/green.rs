//! Spectral evaluation of the windowed half-wave propagator applied to a
//! point source at distance a from the wall:
//!
//! u(t,x,y) = Σ_k (2πh)⁻¹ ∫ e^{(i/h)(yη ∓ tτ_k(η))} ψ₂(τ_k)ψ₁(η) e_k(a,η/h) e_k(x,η/h) dη,
//! τ_k(η) = η√(1 + ω_k(h/η)^{2/3}).
//!
//! The η-integral uses a fixed composite Gauss–Legendre rule resolved for
//! the requested (t, y) window, so a whole y-line costs one mode sum.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gallery::{GalleryMode, ModeTruncation, SpectralWindow};
use crate::quad::{adaptive, gauss_legendre, QuadOptions};
use crate::specfun::{airy_branch, Sign};
use crate::{c, Complex, Error, Result, Scalar};

/// Physical and semiclassical configuration of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub h: Scalar,
    pub a: Scalar,
    pub d: usize,
    pub window: SpectralWindow,
    pub trunc: ModeTruncation,
    /// `Plus` is e^{−it√−Δ}, `Minus` is e^{+it√−Δ}.
    pub propagator_sign: Sign,
    /// Overall factor on the windowed data.
    pub amplitude: Scalar,
}

impl ModelParams {
    /// Default windows, ε = 0.2, d = 2.
    pub fn new(h: Scalar, a: Scalar) -> Self {
        Self {
            h,
            a,
            d: 2,
            window: SpectralWindow::default(),
            trunc: ModeTruncation::for_h(h, 0.2),
            propagator_sign: Sign::Plus,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h <= 1.0) {
            return Err(Error::PreconditionViolated(format!("h must lie in (0, 1], got {}", self.h)));
        }
        if !(self.a > 0.0 && self.a <= 1.0) {
            return Err(Error::PreconditionViolated(format!("a must lie in (0, 1], got {}", self.a)));
        }
        if self.d < 2 {
            return Err(Error::PreconditionViolated("dimension must be at least 2".into()));
        }
        if !self.window.psi1.validate() || !self.window.psi2.validate() {
            return Err(Error::PreconditionViolated("window profiles are malformed".into()));
        }
        self.trunc.validate(self.h)
    }

    /// y-position of the front grazing at height a: ±t√(1+a).
    pub fn front_y(&self, t: Scalar) -> Scalar {
        self.propagator_sign.value() * t * (1.0 + self.a).sqrt()
    }
}

/// A field value with its location and bookkeeping.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WavefieldSample {
    pub t: Scalar,
    pub x: Scalar,
    pub y: Scalar,
    pub value: Complex,
    pub quadrature_error: Scalar,
    pub k_terms: usize,
}

/// τ_k(η).
pub fn tau(omega_k: Scalar, h: Scalar, eta: Scalar) -> Scalar {
    eta * (1.0 + omega_k * (h / eta).powf(2.0 / 3.0)).sqrt()
}

const ORDER: usize = 16;
const NODES_PER_OSCILLATION: Scalar = 16.0;

/// Precomputed η-rule and mode data for one (params, t, y) window.
#[derive(Debug, Clone)]
pub struct GreenEvaluator {
    pub params: ModelParams,
    eta: Vec<Scalar>,
    weights: Vec<Scalar>,
    modes: Vec<GalleryMode>,
    /// τ_k at each node, per mode.
    tau: Vec<Vec<Scalar>>,
    /// amplitude·ψ₂(τ_k)ψ₁(η)e_k(a, η/h) at each node, per mode.
    coef: Vec<Vec<Scalar>>,
    pub t_max: Scalar,
    pub y_max: Scalar,
    /// Change of one probe value when the rule is refined by 1.5×.
    pub resolution_error: Scalar,
}

impl GreenEvaluator {
    /// Rule resolving |t| ≤ t_max and |y| ≤ y_max.
    pub fn new(params: ModelParams, t_max: Scalar, y_max: Scalar) -> Result<Self> {
        Self::with_refinement(params, t_max, y_max, 1.0, true)
    }

    fn with_refinement(params: ModelParams, t_max: Scalar, y_max: Scalar, refine: Scalar, check: bool) -> Result<Self> {
        params.validate()?;
        let h = params.h;
        let (lo, hi) = params.window.psi1.support();
        let modes: Vec<GalleryMode> = (params.trunc.k_min..=params.trunc.k_max).map(GalleryMode::new).collect::<Result<_>>()?;
        // Fastest η-frequency: y and t phases plus the Airy phases of e_k(x), e_k(a).
        let z_max = modes.last().map(|m| m.omega_k).unwrap_or(0.0) * (h / lo).powf(2.0 / 3.0);
        let freq = (y_max.abs() + 1.2 * t_max.abs() + 2.0 * z_max.powf(1.5) + 1.0) / h;
        let osc = freq * (hi - lo) / (2.0 * PI);
        let panels = ((osc * NODES_PER_OSCILLATION * refine / ORDER as Scalar).ceil() as usize).max(8);
        let (gx, gw) = gauss_legendre::<Scalar>(ORDER);
        let width = (hi - lo) / panels as Scalar;
        let mut eta = Vec::with_capacity(panels * ORDER);
        let mut weights = Vec::with_capacity(panels * ORDER);
        for p in 0..panels {
            let mid = lo + (p as Scalar + 0.5) * width;
            for (x, w) in gx.iter().zip(&gw) {
                eta.push(mid + 0.5 * width * x);
                weights.push(0.5 * width * w);
            }
        }
        let (tau_tab, coef): (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>) = modes
            .par_iter()
            .map(|m| {
                let mut tv = Vec::with_capacity(eta.len());
                let mut cv = Vec::with_capacity(eta.len());
                for &e in &eta {
                    let tk = tau(m.omega_k, h, e);
                    tv.push(tk);
                    let win = params.window.psi2.eval(tk) * params.window.psi1.eval(e);
                    cv.push(if win == 0.0 { 0.0 } else { params.amplitude * win * m.eval(params.a, e / h) });
                }
                (tv, cv)
            })
            .unzip();
        let mut ev = Self { params, eta, weights, modes, tau: tau_tab, coef, t_max, y_max, resolution_error: 0.0 };
        if check {
            let fine = Self::with_refinement(params, t_max, y_max, 1.5, false)?;
            let (t, x) = (t_max, params.a);
            let y = params.front_y(t).clamp(-y_max, y_max);
            let k = ev.modes.len();
            let a = ev.sample(&ev.profile(t, x, 0, k), y);
            let b = fine.sample(&fine.profile(t, x, 0, k), y);
            ev.resolution_error = (a - b).norm();
        }
        Ok(ev)
    }

    pub fn nodes(&self) -> usize {
        self.eta.len()
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// F(η_i) = Σ_{k in [lo, hi)} e^{∓itτ_k/h} coef_k e_k(x, η_i/h), mode
    /// positions counted from zero.
    pub fn profile(&self, t: Scalar, x: Scalar, lo: usize, hi: usize) -> Vec<Complex> {
        let h = self.params.h;
        let s = -self.params.propagator_sign.value();
        let mut out = vec![c(0.0, 0.0); self.eta.len()];
        if x == 0.0 {
            return out;
        }
        for j in lo..hi.min(self.modes.len()) {
            let m = &self.modes[j];
            let (tv, cv) = (&self.tau[j], &self.coef[j]);
            for i in 0..self.eta.len() {
                if cv[i] == 0.0 {
                    continue;
                }
                let amp = cv[i] * m.eval(x, self.eta[i] / h);
                out[i] += Complex::from_polar(amp, s * t * tv[i] / h);
            }
        }
        out
    }

    /// (2πh)⁻¹ Σ w_i F_i e^{iyη_i/h}.
    pub fn sample(&self, profile: &[Complex], y: Scalar) -> Complex {
        let h = self.params.h;
        let mut acc = c(0.0, 0.0);
        for i in 0..self.eta.len() {
            if profile[i] != c(0.0, 0.0) {
                acc += profile[i] * Complex::from_polar(self.weights[i], y * self.eta[i] / h);
            }
        }
        acc / (2.0 * PI * h)
    }

    /// Samples at y0 + j·dy, j < n, by phase rotation.
    pub fn sample_line(&self, profile: &[Complex], y0: Scalar, dy: Scalar, n: usize) -> Vec<Complex> {
        let h = self.params.h;
        let mut out = vec![c(0.0, 0.0); n];
        for i in 0..self.eta.len() {
            if profile[i] == c(0.0, 0.0) {
                continue;
            }
            let mut z = profile[i] * Complex::from_polar(self.weights[i], y0 * self.eta[i] / h);
            let rot = Complex::from_polar(1.0, dy * self.eta[i] / h);
            for o in out.iter_mut() {
                *o += z;
                z *= rot;
            }
        }
        let s = 1.0 / (2.0 * PI * h);
        out.iter_mut().for_each(|v| *v *= s);
        out
    }

    fn check_window(&self, t: Scalar, y: Scalar) -> Result<()> {
        if t.abs() > self.t_max * (1.0 + 1e-12) || y.abs() > self.y_max * (1.0 + 1e-12) {
            return Err(Error::PreconditionViolated(format!(
                "(t, y) = ({t}, {y}) outside the resolved window |t| ≤ {}, |y| ≤ {}",
                self.t_max, self.y_max
            )));
        }
        Ok(())
    }

    pub fn propagate(&self, t: Scalar, x: Scalar, y: Scalar) -> Result<WavefieldSample> {
        self.propagate_range(t, x, y, 0, self.modes.len())
    }

    fn propagate_range(&self, t: Scalar, x: Scalar, y: Scalar, lo: usize, hi: usize) -> Result<WavefieldSample> {
        if !(x >= 0.0) {
            return Err(Error::DomainViolation(format!("x must be ≥ 0, got {x}")));
        }
        self.check_window(t, y)?;
        let value = self.sample(&self.profile(t, x, lo, hi), y);
        Ok(WavefieldSample { t, x, y, value, quadrature_error: self.resolution_error, k_terms: hi.min(self.modes.len()) - lo })
    }

    /// (k ≤ L part, k > L part).
    pub fn propagate_split(&self, t: Scalar, x: Scalar, y: Scalar, l: usize) -> Result<(WavefieldSample, WavefieldSample)> {
        if l == 0 || l > self.params.trunc.k_max {
            return Err(Error::PreconditionViolated(format!("split index {l} outside 1..={}", self.params.trunc.k_max)));
        }
        let cut = l + 1 - self.params.trunc.k_min.min(l + 1);
        let low = self.propagate_range(t, x, y, 0, cut)?;
        let high = self.propagate_range(t, x, y, cut, self.modes.len())?;
        Ok((low, high))
    }

    /// Single-mode term of the sum.
    pub fn mode_term(&self, k: usize, t: Scalar, x: Scalar, y: Scalar) -> Result<Complex> {
        let j = k.checked_sub(self.params.trunc.k_min).filter(|j| *j < self.modes.len()).ok_or(Error::IndexOutOfTable {
            k,
            size: self.params.trunc.k_max,
        })?;
        self.check_window(t, y)?;
        Ok(self.sample(&self.profile(t, x, j, j + 1), y))
    }

    /// ‖u(t)‖²_{L²(x,y)} by Parseval in y and Gauss–Legendre in x.
    pub fn l2_norm_sq(&self, t: Scalar) -> Scalar {
        let h = self.params.h;
        let s = -self.params.propagator_sign.value();
        let (gx, gw) = gauss_legendre::<Scalar>(ORDER);
        let stride = 4;
        // The windows are smooth and non-oscillating, so a sub-rule in η suffices.
        let idx: Vec<usize> = (0..self.eta.len()).step_by(stride).collect();
        let total: Scalar = idx
            .par_iter()
            .map(|&i| {
                let e = self.eta[i];
                let active: Vec<usize> = (0..self.modes.len()).filter(|&j| self.coef[j][i] != 0.0).collect();
                if active.is_empty() {
                    return 0.0;
                }
                let kmax = active.iter().map(|&j| self.modes[j].omega_k).fold(0.0, Scalar::max);
                let scale = (e / h).powf(-2.0 / 3.0);
                let x_end = (kmax + 30.0) * scale;
                // Resolve the fastest mode: local wavelength ~ 2π/√ω_k in Airy units.
                let panels = ((x_end / scale) * kmax.sqrt() / (2.0 * PI) * 24.0 / ORDER as Scalar).ceil() as usize + 4;
                let width = x_end / panels as Scalar;
                let mut acc = 0.0;
                for p in 0..panels {
                    let mid = (p as Scalar + 0.5) * width;
                    for (xg, wg) in gx.iter().zip(&gw) {
                        let x = mid + 0.5 * width * xg;
                        let mut f = c(0.0, 0.0);
                        for &j in &active {
                            let amp = self.coef[j][i] * self.modes[j].eval(x, e / h);
                            f += Complex::from_polar(amp, s * t * self.tau[j][i] / h);
                        }
                        acc += 0.5 * width * wg * f.norm_sqr();
                    }
                }
                // Sub-rule weight: the stride-th node carries the skipped weights.
                let w: Scalar = self.weights[i..(i + stride).min(self.eta.len())].iter().sum();
                acc * w
            })
            // Summed in order so the result does not depend on the thread count.
            .collect::<Vec<_>>()
            .iter()
            .sum();
        total / (2.0 * PI * h)
    }
}

/// u(t, x, y) for a single point.
pub fn propagate(params: &ModelParams, t: Scalar, x: Scalar, y: Scalar) -> Result<WavefieldSample> {
    GreenEvaluator::new(*params, t.abs(), y.abs())?.propagate(t, x, y)
}

/// (k ≤ L part, k > L part) for a single point.
pub fn propagate_split(params: &ModelParams, t: Scalar, x: Scalar, y: Scalar, l: usize) -> Result<(WavefieldSample, WavefieldSample)> {
    GreenEvaluator::new(*params, t.abs(), y.abs())?.propagate_split(t, x, y, l)
}

/// Windowed Green function G((x,y,t),(a,b,s)); reduces to `propagate` at
/// (t − s, x, y − b) with source distance a.
pub fn full_green(params: &ModelParams, source: (Scalar, Scalar, Scalar), target: (Scalar, Scalar, Scalar)) -> Result<Complex> {
    let (a, b, s) = source;
    let (x, y, t) = target;
    let p = ModelParams { a, ..*params };
    Ok(propagate(&p, t - s, x, y - b)?.value)
}

/// t = 0 data computed independently by adaptive quadrature in η.
pub fn windowed_dirac(params: &ModelParams, x: Scalar, y: Scalar) -> Result<Complex> {
    params.validate()?;
    let h = params.h;
    let modes: Vec<GalleryMode> = (params.trunc.k_min..=params.trunc.k_max).map(GalleryMode::new).collect::<Result<_>>()?;
    let (lo, hi) = params.window.psi1.support();
    let f = |e: Scalar| {
        let mut s = 0.0;
        for m in &modes {
            let tk = tau(m.omega_k, h, e);
            s += params.window.psi2.eval(tk) * m.eval(params.a, e / h) * m.eval(x, e / h);
        }
        Complex::from_polar(params.amplitude * s * params.window.psi1.eval(e), y * e / h)
    };
    let panels = ((y.abs() / h) * (hi - lo) / (2.0 * PI)).ceil() as usize + 16;
    let r = adaptive(f, lo, hi, QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, initial_panels: panels, max_evals: 4_000_000 });
    if !r.converged {
        return Err(Error::QuadratureFailure("windowed Dirac reference".into()));
    }
    Ok(r.value / (2.0 * PI * h))
}

/// Scale parameters of one mode in the non-tangential regime.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TangencyParams {
    /// λ = tω_k h^{−1/3}.
    pub lambda_g: Scalar,
    /// μ = a h^{−1/3}/(tω_k^{1/2}).
    pub mu_g: Scalar,
    /// δ = x/a.
    pub delta: Scalar,
    /// α = a/(h^{2/3}ω_k).
    pub alpha: Scalar,
}

pub fn tangency_params(params: &ModelParams, t: Scalar, x: Scalar, k: usize) -> Result<TangencyParams> {
    let w = crate::specfun::omega(k)?;
    let h = params.h;
    Ok(TangencyParams {
        lambda_g: t * w * h.powf(-1.0 / 3.0),
        mu_g: params.a * h.powf(-1.0 / 3.0) / (t * w.sqrt()),
        delta: x / params.a,
        alpha: params.a / (h.powf(2.0 / 3.0) * w),
    })
}

/// Slowly varying factor of the oscillating Airy branch:
/// Ψ₊(X) = e^{−iπ/4}e^{iξ}X^{1/4}A₋(X), Ψ₋(X) = e^{iπ/4}e^{−iξ}X^{1/4}A₊(X),
/// ξ = (2/3)X^{3/2}, so that Ai(−X) = Σ_± e^{±iπ/4}e^{∓iξ}X^{−1/4}Ψ_±(X).
pub fn airy_symbol(sign: Sign, big_x: Scalar) -> Result<Complex> {
    let xi = 2.0 / 3.0 * big_x.powf(1.5);
    let q = big_x.powf(0.25);
    let z = c(big_x, 0.0);
    Ok(match sign {
        Sign::Plus => Complex::from_polar(q, xi - PI / 4.0) * airy_branch(Sign::Minus, z)?,
        Sign::Minus => Complex::from_polar(q, PI / 4.0 - xi) * airy_branch(Sign::Plus, z)?,
    })
}

/// The four branch integrals of one mode term and their sum.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BranchDecomposition {
    pub k: usize,
    /// Indexed (s_x, s_a) ∈ {(+,+), (+,−), (−,+), (−,−)}.
    pub branches: [Complex; 4],
    pub total: Complex,
    pub tangency: TangencyParams,
}

const BRANCH_SIGNS: [(Sign, Sign); 4] = [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus), (Sign::Minus, Sign::Minus)];

/// Precondition of the branch split: k ≥ D max(h^{−1/4}, 1/t) and
/// ω_k − x(η/h)^{2/3} ≥ ω_k/2 across the η-window.
pub fn check_nontangential(params: &ModelParams, t: Scalar, x: Scalar, k: usize, big_d: Scalar) -> Result<()> {
    let h = params.h;
    let need = big_d * h.powf(-0.25).max(1.0 / t);
    if (k as Scalar) < need {
        return Err(Error::RegimeViolation(format!("k = {k} below D·max(h^(-1/4), 1/t) = {need:.2}")));
    }
    let w = crate::specfun::omega(k)?;
    let (_, hi) = params.window.psi1.support();
    let worst = w - x.max(params.a) * (hi / h).powf(2.0 / 3.0);
    if worst < w / 2.0 {
        return Err(Error::RegimeViolation(format!("ω_k − x(η/h)^(2/3) = {worst:.3} < ω_k/2 on the window")));
    }
    Ok(())
}

/// The k-th term split into its four oscillating branches, each integrated
/// adaptively in η.
pub fn nontangential_asymptotic(params: &ModelParams, t: Scalar, x: Scalar, y: Scalar, k: usize, big_d: Scalar) -> Result<BranchDecomposition> {
    params.validate()?;
    check_nontangential(params, t, x, k, big_d)?;
    let h = params.h;
    let m = GalleryMode::new(k)?;
    let (lo, hi) = params.window.psi1.support();
    let s = -params.propagator_sign.value();
    let mut branches = [c(0.0, 0.0); 4];
    for (n, (sx, sa)) in BRANCH_SIGNS.iter().enumerate() {
        let f = |e: Scalar| -> Complex {
            let tk = tau(m.omega_k, h, e);
            let win = params.window.psi2.eval(tk) * params.window.psi1.eval(e);
            if win == 0.0 {
                return c(0.0, 0.0);
            }
            let scale = (e / h).powf(2.0 / 3.0);
            let (bx, ba) = (m.omega_k - scale * x, m.omega_k - scale * params.a);
            let px = branch_factor(*sx, bx);
            let pa = branch_factor(*sa, ba);
            let norm = m.f_k * m.f_k * (k as Scalar).powf(-1.0 / 3.0) * (e / h).powf(2.0 / 3.0);
            px * pa * Complex::from_polar(params.amplitude * win * norm, (y * e + s * t * tk) / h)
        };
        let freq = (y.abs() + t + 2.0) / h;
        let panels = (freq * (hi - lo) / (2.0 * PI)).ceil() as usize + 8;
        let r = adaptive(f, lo, hi, QuadOptions { abs_tol: 1e-14, rel_tol: 1e-10, initial_panels: panels, max_evals: 4_000_000 });
        if !r.converged {
            return Err(Error::BudgetExceeded { value: r.value, error: r.error });
        }
        branches[n] = r.value / (2.0 * PI * h);
    }
    let total = branches.iter().sum();
    Ok(BranchDecomposition { k, branches, total, tangency: tangency_params(params, t, x, k)? })
}

// e^{±iπ/4}e^{∓iξ}X^{−1/4}Ψ_±(X): the branch of Ai(−X) oscillating like e^{∓iξ}.
fn branch_factor(sign: Sign, big_x: Scalar) -> Complex {
    let z = c(big_x, 0.0);
    match sign {
        Sign::Plus => airy_branch(Sign::Minus, z).unwrap_or(c(Scalar::NAN, 0.0)),
        Sign::Minus => airy_branch(Sign::Plus, z).unwrap_or(c(Scalar::NAN, 0.0)),
    }
}

/// The branch symbol σ_k^{±,±}(x, η) with exact Ψ_±.
pub fn branch_symbol(params: &ModelParams, k: usize, x: Scalar, eta: Scalar, sx: Sign, sa: Sign) -> Result<Complex> {
    let h = params.h;
    let m = GalleryMode::new(k)?;
    let z = h.powf(2.0 / 3.0) * m.omega_k * eta.powf(-2.0 / 3.0);
    let win = params.window.psi1.eval(eta) * params.window.psi2.eval(eta * (1.0 + z).sqrt());
    let scale = (eta / h).powf(2.0 / 3.0);
    let om = |s: Sign| Complex::from_polar(1.0, s.value() * PI / 4.0);
    let px = airy_symbol(sx, scale * (z - x))?;
    let pa = airy_symbol(sa, scale * (z - params.a))?;
    Ok(om(sx) * om(sa) * px * pa
        * (h.powf(-1.0 / 3.0) * eta * win * m.f_k * m.f_k * (k as Scalar).powf(-1.0 / 3.0)
            * (z - x).powf(-0.25)
            * (z - params.a).powf(-0.25)))
}

/// min over a grid in s = η^{−2/3} and the four sign branches of
/// |∂_s∂_ηφ| + |∂²_s∂_ηφ|.
pub fn phase_derivative_margin(params: &ModelParams, t: Scalar, x: Scalar, k: usize) -> Result<Scalar> {
    let tp = tangency_params(params, t, x, k)?;
    let w = crate::specfun::omega(k)?;
    let h = params.h;
    let (lo, hi) = params.window.psi1.support();
    let (s0, s1) = (hi.powf(-2.0 / 3.0), lo.powf(-2.0 / 3.0));
    let (mu, dl, al) = (tp.mu_g, tp.delta, tp.alpha);
    let mut margin = Scalar::INFINITY;
    for i in 0..=200 {
        let s = s0 + (s1 - s0) * i as Scalar / 200.0;
        let z = h.powf(2.0 / 3.0) * w * s;
        let g1 = (1.0 + 2.0 * z) / (6.0 * (1.0 + z).powf(1.5));
        let g2 = (0.5 - z) / (6.0 * (1.0 + z).powf(2.5));
        for (p, q) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let d1 = -g1 + mu / 3.0 * (p * dl * (s - dl * al).powf(-0.5) + q * (s - al).powf(-0.5));
            let d2 = -h.powf(2.0 / 3.0) * w * g2 - mu / 6.0 * (p * dl * (s - dl * al).powf(-1.5) + q * (s - al).powf(-1.5));
            margin = margin.min(d1.abs() + d2.abs());
        }
    }
    Ok(margin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ModelParams {
        ModelParams::new(1.0 / 32.0, 0.1)
    }

    #[test]
    fn dirichlet_trace_is_exactly_zero() {
        let ev = GreenEvaluator::new(small(), 0.5, 1.0).unwrap();
        for t in [0.0, 0.2, 0.5] {
            for y in [-0.7, 0.0, 0.3] {
                assert_eq!(ev.propagate(t, 0.0, y).unwrap().value, c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn initial_data_matches_direct_integral() {
        let p = small();
        let ev = GreenEvaluator::new(p, 0.0, 0.3).unwrap();
        for (x, y) in [(0.1, 0.0), (0.05, 0.02), (0.2, -0.1)] {
            let a = ev.propagate(0.0, x, y).unwrap().value;
            let b = windowed_dirac(&p, x, y).unwrap();
            assert!((a - b).norm() <= 1e-6 * b.norm().max(1e-3 * p.h.powi(-2)), "{a} {b}");
        }
    }

    #[test]
    fn time_reversal_symmetry() {
        let p = small();
        let m = ModelParams { propagator_sign: Sign::Minus, ..p };
        let (ep, em) = (GreenEvaluator::new(p, 0.4, 0.6).unwrap(), GreenEvaluator::new(m, 0.4, 0.6).unwrap());
        for (t, x, y) in [(0.3, 0.1, 0.3), (0.4, 0.05, -0.2)] {
            let a = em.propagate(t, x, y).unwrap().value;
            let b = ep.propagate(t, x, -y).unwrap().value;
            assert!((a - b.conj()).norm() < 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn reciprocity_and_translation() {
        let p = small();
        let g1 = full_green(&p, (0.1, 0.0, 0.0), (0.07, 0.2, 0.3)).unwrap();
        let g2 = full_green(&p, (0.07, 0.0, 0.0), (0.1, 0.2, 0.3)).unwrap();
        assert!((g1 - g2).norm() < 1e-10 * g1.norm());
        let g3 = full_green(&p, (0.1, 0.3, 0.1), (0.07, 0.5, 0.4)).unwrap();
        assert!((g1 - g3).norm() < 1e-10 * g1.norm());
    }

    #[test]
    fn split_adds_up_and_scales_linearly() {
        let p = small();
        let ev = GreenEvaluator::new(p, 0.3, 0.5).unwrap();
        let full = ev.propagate(0.3, 0.08, 0.31).unwrap().value;
        let (lo, hi) = ev.propagate_split(0.3, 0.08, 0.31, 3).unwrap();
        assert!((lo.value + hi.value - full).norm() < 1e-12 * full.norm().max(1.0));
        let (_, none) = ev.propagate_split(0.3, 0.08, 0.31, p.trunc.k_max).unwrap();
        assert_eq!(none.value, c(0.0, 0.0));
        let ev2 = GreenEvaluator::new(ModelParams { amplitude: 2.0, ..p }, 0.3, 0.5).unwrap();
        let dbl = ev2.propagate(0.3, 0.08, 0.31).unwrap().value;
        assert!((dbl - 2.0 * full).norm() <= 1e-14 * full.norm());
    }

    #[test]
    fn branches_reassemble_the_mode_term() {
        let h: Scalar = 1.0 / 128.0;
        let p = ModelParams::new(h, h.powf(0.6));
        let k = (2.0 * h.powf(-0.25)).ceil() as usize;
        let ev = GreenEvaluator::new(p, 0.3, 0.6).unwrap();
        let (t, x) = (0.3, 0.5 * p.a);
        let y = p.front_y(t);
        let exact = ev.mode_term(k, t, x, y).unwrap();
        let br = nontangential_asymptotic(&p, t, x, y, k, 2.0).unwrap();
        assert!((br.total - exact).norm() <= 0.03 * exact.norm(), "{} {}", br.total, exact);
        assert!(nontangential_asymptotic(&p, t, x, y, 1, 2.0).is_err());
    }

    #[test]
    fn airy_symbols_are_slowly_varying() {
        for x in [3.0, 10.0, 50.0] {
            for s in [Sign::Plus, Sign::Minus] {
                let v = airy_symbol(s, x).unwrap();
                assert!((v - c(0.5 / PI.sqrt(), 0.0)).norm() < 0.02, "{x} {v}");
            }
        }
    }
}
