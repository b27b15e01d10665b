//! Sup-norm sweeps, envelope fits and peak scans of the computed fields.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gallery::golden_max;
use crate::green::{GreenEvaluator, ModelParams};
use crate::oscint::{decay_fit, DecayFit};
use crate::parametrix::{lagrangian_y_extent, ParametrixEvaluator, RegimeConstants, WaveOptions};
use crate::{Error, Result, Scalar};

/// Exponent α of the parametrix regime a ≥ h^α.
pub const PARAMETRIX_ALPHA: Scalar = 0.55;
/// |y| ≥ c₀t is required before the transverse stationary phase applies.
pub const LOCALIZATION_C0: Scalar = 0.5;
/// x-nodes on [0, a] in a sweep.
const X_NODES: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// a ≤ h^{1/2}.
    Gallery,
    /// a ≥ h^α.
    Parametrix,
}

/// Which field is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldEvaluator {
    Spectral,
    Parametrix,
}

/// Fitted constant of a pointwise envelope bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope {
    pub bound: String,
    /// Smallest C with sup ≤ C·bound on the whole grid.
    pub constant: Scalar,
    /// The same on three consecutive thirds of the grid.
    pub per_window: Vec<Scalar>,
}

/// One local maximum of t ↦ |u| near t_n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeakRecord {
    pub n: usize,
    pub t_peak: Scalar,
    #[serde(rename = "t_pred")]
    pub predicted: Scalar,
    #[serde(rename = "value")]
    pub peak_value: Scalar,
    /// a^{1/4}h^{−d}(h/t_n)^{(d−2)/2+1/4}, without the calibration constant.
    #[serde(rename = "bound")]
    pub lower_bound_value: Scalar,
    pub relative_offset: Scalar,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayReport {
    pub regime: Regime,
    pub evaluator: FieldEvaluator,
    pub h: Scalar,
    pub a: Scalar,
    pub d: usize,
    #[serde(rename = "t")]
    pub t_grid: Vec<Scalar>,
    #[serde(rename = "sup")]
    pub sup_values: Vec<Scalar>,
    /// Where each sup was attained.
    pub argmax: Vec<(Scalar, Scalar)>,
    #[serde(rename = "fit")]
    pub fits: Vec<DecayFit>,
    pub envelopes: Vec<Envelope>,
    pub peaks: Vec<PeakRecord>,
}

impl DecayReport {
    /// Exponent of the d-dimensional decay law (h/t)^{(d−2)/2 + 1/4}.
    pub fn predicted_exponent(&self) -> Scalar {
        -((self.d as Scalar - 2.0) / 2.0 + 0.25)
    }
}

/// h⁻²(h^{1/4} + (h/t)^{1/3}).
pub fn gallery_bound(h: Scalar, t: Scalar) -> Scalar {
    (h.powf(0.25) + (h / t).powf(1.0 / 3.0)) / (h * h)
}

/// (2πh)⁻²((h/t)^{1/2} + a^{1/8}h^{1/4}), with t = √a·T.
pub fn parametrix_bound(h: Scalar, a: Scalar, t: Scalar) -> Scalar {
    ((h / t).sqrt() + a.powf(0.125) * h.powf(0.25)) / (2.0 * PI * h).powi(2)
}

fn envelope(name: &str, t: &[Scalar], sup: &[Scalar], bound: impl Fn(Scalar) -> Scalar) -> Envelope {
    let ratio: Vec<Scalar> = t.iter().zip(sup).map(|(&t, &s)| s / bound(t)).collect();
    let max = |r: &[Scalar]| r.iter().copied().fold(0.0, Scalar::max);
    let k = ratio.len().div_ceil(3).max(1);
    Envelope { bound: name.into(), constant: max(&ratio), per_window: ratio.chunks(k).map(max).collect() }
}

fn regime_of(params: &ModelParams, evaluator: FieldEvaluator) -> Result<Regime> {
    let (h, a) = (params.h, params.a);
    match evaluator {
        FieldEvaluator::Parametrix => {
            if a < h.powf(PARAMETRIX_ALPHA) {
                return Err(Error::RegimeViolation(format!(
                    "parametrix sweep needs a ≥ h^{PARAMETRIX_ALPHA} = {:.4}, got a = {a}",
                    h.powf(PARAMETRIX_ALPHA)
                )));
            }
            Ok(Regime::Parametrix)
        }
        FieldEvaluator::Spectral => Ok(if a <= h.sqrt() { Regime::Gallery } else { Regime::Parametrix }),
    }
}

/// Half-width of the y-window around the front y = −t√(1+a) that contains
/// the reflected fronts up to time t.
pub fn front_halfwidth(params: &ModelParams, t: Scalar) -> Result<Scalar> {
    let (h, a) = (params.h, params.a);
    let big_t = t / a.sqrt();
    let n_hi = (big_t / (4.0 * (1.0 + a).sqrt())).floor() as usize + 1;
    let consts = RegimeConstants::default();
    let ext = lagrangian_y_extent(a, h, n_hi, big_t, consts.eps0)?;
    Ok(a.powf(1.5) * ext + 10.0 * h)
}

/// max over y ∈ [y₀ − w, y₀ + w] of |u| from one spectral profile.
fn spectral_sup_y(ev: &GreenEvaluator, profile: &[crate::Complex], y0: Scalar, w: Scalar) -> (Scalar, Scalar) {
    let h = ev.params.h;
    let dy = h / 8.0;
    let n = (2.0 * w / dy).ceil() as usize + 1;
    let line = ev.sample_line(profile, y0 - w, dy, n);
    let (i, v) = line.iter().enumerate().fold((0, 0.0), |b, (i, v)| if v.norm() > b.1 { (i, v.norm()) } else { b });
    let yi = y0 - w + i as Scalar * dy;
    let (y, vr) = golden_max(&|y: Scalar| ev.sample(profile, y).norm(), yi - dy, yi + dy);
    if vr > v {
        (vr, y)
    } else {
        (v, yi)
    }
}

/// sup of |u(t, ·)| over x ∈ [0, a] and y near the front, for each t.
pub fn sup_sweep(params: &ModelParams, t_grid: &[Scalar], evaluator: FieldEvaluator) -> Result<DecayReport> {
    params.validate()?;
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::PreconditionViolated("t grid must be positive and increasing".into()));
    }
    let regime = regime_of(params, evaluator)?;
    let (h, a) = (params.h, params.a);
    let t_max = *t_grid.last().unwrap();
    let xs: Vec<Scalar> = (0..X_NODES).map(|i| a * i as Scalar / (X_NODES - 1) as Scalar).collect();
    let (sup_values, argmax): (Vec<Scalar>, Vec<(Scalar, Scalar)>) = match evaluator {
        FieldEvaluator::Spectral => {
            let w_max = front_halfwidth(params, t_max)?;
            let ev = GreenEvaluator::new(*params, t_max, t_max * (1.0 + a).sqrt() + w_max)?;
            let rows = t_grid
                .par_iter()
                .map(|&t| -> Result<(Scalar, (Scalar, Scalar))> {
                    let w = front_halfwidth(params, t)?;
                    let y0 = params.front_y(t);
                    let mut best = (0.0, (0.0, 0.0));
                    for &x in &xs[1..] {
                        let prof = ev.profile(t, x, 0, ev.mode_count());
                        let (v, y) = spectral_sup_y(&ev, &prof, y0, w);
                        if v > best.0 {
                            best = (v, (x, y));
                        }
                    }
                    Ok(best)
                })
                .collect::<Result<Vec<_>>>()?;
            rows.into_iter().unzip()
        }
        FieldEvaluator::Parametrix => {
            let ev = ParametrixEvaluator::new(a, h, WaveOptions::new(t_max / a.sqrt()))?;
            let points: Vec<(Scalar, Scalar)> =
                t_grid.iter().flat_map(|&t| xs.iter().map(move |&x| (t / a.sqrt(), x / a))).collect();
            let batch = ev.profiles(&points, 0, ev.n_max, false)?;
            let mut sups = Vec::with_capacity(t_grid.len());
            let mut arg = Vec::with_capacity(t_grid.len());
            for (i, &t) in t_grid.iter().enumerate() {
                let mut best = (0.0, (0.0, 0.0));
                for (j, &x) in xs.iter().enumerate() {
                    let (v, big_y) = ev.sup_over_y(&batch.values[i * xs.len() + j]);
                    if v > best.0 {
                        best = (v, (x, ev.physical_y(t / a.sqrt(), big_y)));
                    }
                }
                sups.push(best.0);
                arg.push(best.1);
            }
            (sups, arg)
        }
    };
    let pairs: Vec<(Scalar, Scalar)> = t_grid.iter().copied().zip(sup_values.iter().copied()).collect();
    let fits = if pairs.len() >= 4 && pairs.iter().all(|p| p.1 > 0.0) { vec![decay_fit(&pairs)?] } else { Vec::new() };
    let envelopes = match regime {
        Regime::Gallery => vec![envelope("h^-2 (h^1/4 + (h/t)^1/3)", t_grid, &sup_values, |t| gallery_bound(h, t))],
        Regime::Parametrix => {
            vec![envelope("(2 pi h)^-2 ((h/t)^1/2 + a^1/8 h^1/4)", t_grid, &sup_values, |t| parametrix_bound(h, a, t))]
        }
    };
    Ok(DecayReport {
        regime,
        evaluator,
        h,
        a,
        d: params.d,
        t_grid: t_grid.to_vec(),
        sup_values,
        argmax,
        fits,
        envelopes,
        peaks: Vec::new(),
    })
}

/// ∫ψ₁(η)dη/(2π)²: the size of h²·|u| at t ≈ 0 set by the frequency window.
pub fn window_mass(params: &ModelParams) -> Scalar {
    let (lo, hi) = params.window.psi1.support();
    let n = 2000;
    let dx = (hi - lo) / n as Scalar;
    let m: Scalar = (0..n).map(|i| params.window.psi1.eval(lo + (i as Scalar + 0.5) * dx) * dx).sum();
    params.amplitude * m / (2.0 * PI).powi(2)
}

/// t_n = 4n√(a(1+a)).
pub fn peak_time(a: Scalar, n: usize) -> Scalar {
    4.0 * n as Scalar * (a * (1.0 + a)).sqrt()
}

/// Local maxima of t ↦ sup_{y near the front}|u(t, a, y)| nearest to each
/// t_n, from the spectral field.
pub fn peak_scan(params: &ModelParams, n_range: std::ops::RangeInclusive<usize>) -> Result<Vec<PeakRecord>> {
    params.validate()?;
    if *n_range.start() == 0 {
        return Err(Error::PreconditionViolated("peaks are indexed from n = 1".into()));
    }
    let (h, a) = (params.h, params.a);
    let t_top = 1.15 * peak_time(a, *n_range.end());
    let w_top = front_halfwidth(params, t_top)?;
    let ev = GreenEvaluator::new(*params, t_top, t_top * (1.0 + a).sqrt() + w_top)?;
    let value = |t: Scalar| -> Result<Scalar> {
        let w = front_halfwidth(params, t)?;
        let prof = ev.profile(t, a, 0, ev.mode_count());
        Ok(spectral_sup_y(&ev, &prof, params.front_y(t), w).0)
    };
    let d = params.d as Scalar;
    let mut out = Vec::new();
    for n in n_range {
        let tn = peak_time(a, n);
        let m = 60;
        let ts: Vec<Scalar> = (0..=m).map(|i| tn * (0.85 + 0.3 * i as Scalar / m as Scalar)).collect();
        let vals = ts.par_iter().map(|&t| value(t)).collect::<Result<Vec<_>>>()?;
        let best = (1..m)
            .filter(|&i| vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1])
            .min_by(|&i, &j| (ts[i] - tn).abs().total_cmp(&(ts[j] - tn).abs()))
            .ok_or(Error::PeakNotFound { n, t_pred: tn })?;
        let step = ts[1] - ts[0];
        let (t_peak, v) = golden_max(&|t: Scalar| value(t).unwrap_or(0.0), ts[best] - step, ts[best] + step);
        let (t_peak, peak_value) = if v >= vals[best] { (t_peak, v) } else { (ts[best], vals[best]) };
        let lower = a.powf(0.25) * h.powf(-d) * (h / tn).powf((d - 2.0) / 2.0 + 0.25);
        out.push(PeakRecord { n, t_peak, predicted: tn, peak_value, lower_bound_value: lower, relative_offset: (t_peak - tn) / tn });
    }
    Ok(out)
}

/// Lifts a 2-D sweep to dimension d by the transverse stationary phase
/// factor (h/|y|)^{(d−2)/2}, with |y| = y_norm·t.
pub fn dimension_report(report2d: &DecayReport, d: usize, y_norm: Scalar) -> Result<DecayReport> {
    if report2d.d != 2 {
        return Err(Error::PreconditionViolated(format!("expected a 2-D report, got d = {}", report2d.d)));
    }
    if d < 2 {
        return Err(Error::PreconditionViolated(format!("dimension must be at least 2, got {d}")));
    }
    if !(y_norm >= LOCALIZATION_C0) {
        return Err(Error::LocalizationViolated(format!("|y|/t = {y_norm} below c₀ = {LOCALIZATION_C0}")));
    }
    let mut out = report2d.clone();
    out.d = d;
    if d == 2 {
        return Ok(out);
    }
    let h = report2d.h;
    let k = (d as Scalar - 2.0) / 2.0;
    out.sup_values = report2d.t_grid.iter().zip(&report2d.sup_values).map(|(&t, &s)| s * (h / (y_norm * t)).powf(k)).collect();
    let pairs: Vec<(Scalar, Scalar)> = out.t_grid.iter().copied().zip(out.sup_values.iter().copied()).collect();
    out.fits = if pairs.len() >= 4 { vec![decay_fit(&pairs)?] } else { Vec::new() };
    let e = -out.predicted_exponent();
    let hd = h.powi(d as i32);
    out.envelopes = vec![envelope(&format!("h^-{d} min(1, (h/t)^{e})"), &out.t_grid, &out.sup_values, |t| (h / t).powf(e).min(1.0) / hd)];
    Ok(out)
}

/// ‖u(t)‖_{L^r} over x ∈ [0, x_end] and the y-range reached by time t.
fn lr_norm(ev: &GreenEvaluator, t: Scalar, r: Scalar) -> Scalar {
    let p = &ev.params;
    let h = p.h;
    let (lo, _) = p.window.psi1.support();
    let x_end = (p.trunc.k_min..=p.trunc.k_max)
        .last()
        .and_then(|k| crate::gallery::GalleryMode::new(k).ok())
        .map(|m| m.x_max(lo / h))
        .unwrap_or(1.0);
    let dx = h / 2.0;
    let dy = h / 3.0;
    let y_lo = -t * (1.0 + x_end).sqrt() - 40.0 * h;
    let ny = ((40.0 * h - y_lo) / dy).ceil() as usize;
    let nx = (x_end / dx).ceil() as usize;
    let total: Scalar = (0..nx)
        .into_par_iter()
        .map(|i| {
            let x = (i as Scalar + 0.5) * dx;
            let prof = ev.profile(t, x, 0, ev.mode_count());
            ev.sample_line(&prof, y_lo, dy, ny).iter().map(|v| v.norm().powf(r)).sum::<Scalar>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    (total * dx * dy).powf(1.0 / r)
}

/// Discrete ‖u‖_{L^q(t_window) L^r(x, y)} of the spectral field.
pub fn strichartz_sample(params: &ModelParams, q: Scalar, r: Scalar, t_window: (Scalar, Scalar)) -> Result<Scalar> {
    params.validate()?;
    let d = params.d as Scalar;
    if !(q >= 1.0 && r >= 2.0) || 1.0 / q > ((d - 2.0) / 2.0 + 0.25) * (0.5 - 1.0 / r) {
        return Err(Error::AdmissibilityViolated(format!("(q, r) = ({q}, {r}) in dimension {}", params.d)));
    }
    let (t0, t1) = t_window;
    if !(t1 > t0 && t0 >= 0.0) {
        return Err(Error::PreconditionViolated(format!("bad time window {t_window:?}")));
    }
    let nt = 8;
    let dt = (t1 - t0) / nt as Scalar;
    let ev = GreenEvaluator::new(*params, t1, 2.0 * t1 + 1.0)?;
    let sum: Scalar = (0..nt).map(|i| lr_norm(&ev, t0 + (i as Scalar + 0.5) * dt, r).powf(q) * dt).sum();
    Ok(sum.powf(1.0 / q))
}

/// Per-time L^r norms on a uniform grid, for conservation checks.
pub fn lr_profile(params: &ModelParams, r: Scalar, t_grid: &[Scalar]) -> Result<Vec<Scalar>> {
    let t_max = t_grid.iter().copied().fold(0.0, Scalar::max);
    let ev = GreenEvaluator::new(*params, t_max, 2.0 * t_max + 1.0)?;
    Ok(t_grid.iter().map(|&t| lr_norm(&ev, t, r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::Sign;

    fn params(h: Scalar, a: Scalar) -> ModelParams {
        let mut p = ModelParams::new(h, a);
        p.propagator_sign = Sign::Minus;
        p
    }

    #[test]
    fn regime_mismatch_is_reported() {
        let p = params(1.0 / 64.0, 0.01);
        assert!(matches!(sup_sweep(&p, &[0.1, 0.2], FieldEvaluator::Parametrix), Err(Error::RegimeViolation(_))));
    }

    #[test]
    fn spectral_sweep_is_dominated_by_the_gallery_envelope() {
        let h: Scalar = 1.0 / 64.0;
        let p = params(h, h.powf(0.6));
        let t: Vec<Scalar> = crate::oscint::geometric_grid(4.0 * h, 0.5, 6);
        let rep = sup_sweep(&p, &t, FieldEvaluator::Spectral).unwrap();
        assert_eq!(rep.regime, Regime::Gallery);
        let c = rep.envelopes[0].constant;
        for (&t, &s) in rep.t_grid.iter().zip(&rep.sup_values) {
            assert!(s <= c * gallery_bound(h, t) * (1.0 + 1e-12));
        }
        assert!(rep.argmax.iter().all(|&(x, _)| x <= p.a));
    }

    #[test]
    fn early_sup_is_of_order_h_minus_two() {
        let h: Scalar = 1.0 / 64.0;
        let p = params(h, 0.05);
        let rep = sup_sweep(&p, &[0.5 * h, h], FieldEvaluator::Spectral).unwrap();
        for s in rep.sup_values {
            let r = s * h * h / window_mass(&p);
            assert!((0.1..=10.0).contains(&r), "{r}");
        }
    }

    #[test]
    fn dimension_lift() {
        let rep = DecayReport {
            regime: Regime::Gallery,
            evaluator: FieldEvaluator::Spectral,
            h: 0.01,
            a: 0.05,
            d: 2,
            t_grid: vec![0.1, 0.2, 0.4, 0.8],
            sup_values: vec![8.0, 4.0, 2.0, 1.0],
            argmax: vec![(0.0, 0.0); 4],
            fits: Vec::new(),
            envelopes: Vec::new(),
            peaks: Vec::new(),
        };
        let same = dimension_report(&rep, 2, 1.0).unwrap();
        assert_eq!(same.sup_values, rep.sup_values);
        let r3 = dimension_report(&rep, 3, 1.0).unwrap();
        assert!((r3.fits[0].exponent - (-1.5)).abs() < 1e-12);
        assert!((r3.predicted_exponent() + 0.75).abs() < 1e-15);
        assert!((dimension_report(&rep, 4, 1.0).unwrap().predicted_exponent() + 1.25).abs() < 1e-15);
        assert!(matches!(dimension_report(&rep, 3, 0.1), Err(Error::LocalizationViolated(_))));
    }

    #[test]
    fn strichartz_admissibility() {
        let p = params(1.0 / 32.0, 0.1);
        assert!(matches!(strichartz_sample(&p, 2.0, 100.0, (0.0, 0.2)), Err(Error::AdmissibilityViolated(_))));
        let mut p3 = p;
        p3.d = 3;
        let v = strichartz_sample(&p3, 4.0, 12.0, (0.05, 0.25)).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn l2_profile_is_conserved() {
        let p = params(1.0 / 32.0, 0.1);
        let n = lr_profile(&p, 2.0, &[0.05, 0.2, 0.4]).unwrap();
        for v in &n {
            assert!((v / n[0] - 1.0).abs() < 0.01, "{n:?}");
        }
    }
}
