//! Wavefront slices of the reflected Lagrangian manifolds and their
//! singularities.
//!
//! At fixed rescaled time T the N-th manifold projects to a curve
//! μ ↦ (X, Y); σ is explicit because T is affine in σ. Along a slice
//! dY = −σ dX, so the curve has a cusp exactly where dX/dμ changes sign.
//! A swallowtail is the birth of a pair of such cusps.

use serde::{Deserialize, Serialize};

use crate::gallery::golden_max;
use crate::parametrix::{lagrangian_point, reflection_slowdown, unfolding_parameters, RegimeConstants, ScaleFrame};
use crate::specfun::CanonicalCausticKind;
use crate::{Error, Result, Scalar};

/// μ-nodes of a slice.
pub const SLICE_NODES: usize = 2000;
/// Dead band of the classification tests, relative to the curve scale.
pub const CLASS_TOL: Scalar = 1e-6;

/// One T-slice of the projection of the N-th manifold, in physical (x, y).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WavefrontCurve {
    pub n: usize,
    pub t: Scalar,
    pub points: Vec<(Scalar, Scalar)>,
    /// (σ, μ) of each point.
    pub params: Vec<(Scalar, Scalar)>,
    /// dX/dμ at each point.
    pub jacobian: Vec<Scalar>,
    /// Interpolated μ of the sign changes of dX/dμ.
    pub cusps: Vec<Scalar>,
}

impl WavefrontCurve {
    /// Largest x-spacing between consecutive samples.
    pub fn x_step(&self) -> Scalar {
        self.points.windows(2).map(|w| (w[1].0 - w[0].0).abs()).fold(0.0, Scalar::max)
    }
}

/// A detected singular point of the wavefront.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CausticEvent {
    pub kind: CanonicalCausticKind,
    pub t: Scalar,
    pub x: Scalar,
    pub y: Scalar,
    pub n: usize,
    pub mu: Scalar,
    /// Rank of the slice map μ ↦ (x, y) at the event.
    pub rank: usize,
    /// dX/dμ, d²X/dμ², d³X/dμ³ at the event.
    pub derivatives: [Scalar; 3],
    /// Unfolding parameters (p, q) at the event.
    pub unfolding: (Scalar, Scalar),
}

/// Geometry of the N-th reflected front at scale (a, h), frequency η = 1.
#[derive(Debug, Clone, Copy)]
pub struct FrontGeometry {
    pub a: Scalar,
    pub h: Scalar,
    pub n: usize,
    pub eps0: Scalar,
    frame: ScaleFrame,
}

impl FrontGeometry {
    pub fn new(a: Scalar, h: Scalar, n: usize) -> Result<Self> {
        let frame = ScaleFrame::new(a, h, 1.0)?;
        Ok(Self { a, h, n, eps0: RegimeConstants::default().eps0, frame })
    }

    /// Largest |μ| with aμ² inside the model.
    pub fn mu_max(&self) -> Scalar {
        (0.999 * self.eps0 / self.a).sqrt()
    }

    /// σ solving T(σ, μ) = T, when it lies on the N-th sheet.
    pub fn sigma(&self, big_t: Scalar, mu: Scalar) -> Result<Option<Scalar>> {
        let r = (self.frame.rho + self.a * mu * mu).sqrt();
        let w = (1.0 + mu * mu).sqrt();
        let alpha = reflection_slowdown(self.frame.lambda, mu)?;
        let s = big_t / (2.0 * r) + mu - 2.0 * self.n as Scalar * w * alpha;
        let lo = if self.n == 0 { mu } else { -w };
        Ok((s >= lo && s <= w).then_some(s))
    }

    /// (X, Y) on the slice, if μ is on the sheet.
    pub fn point(&self, big_t: Scalar, mu: Scalar) -> Result<Option<(Scalar, Scalar, Scalar)>> {
        match self.sigma(big_t, mu)? {
            None => Ok(None),
            Some(s) => {
                let p = lagrangian_point(self.a, self.n, self.h, 1.0, s, mu, self.eps0)?;
                Ok(Some((s, p.big_x, p.big_y)))
            }
        }
    }

    fn big_x(&self, big_t: Scalar, mu: Scalar) -> Result<Scalar> {
        // Off the sheet the affine formula still defines a smooth X.
        let r = (self.frame.rho + self.a * mu * mu).sqrt();
        let w = (1.0 + mu * mu).sqrt();
        let alpha = reflection_slowdown(self.frame.lambda, mu)?;
        let s = big_t / (2.0 * r) + mu - 2.0 * self.n as Scalar * w * alpha;
        Ok(1.0 + mu * mu - s * s)
    }

    /// Derivatives of X along the slice by central differences.
    pub fn x_derivatives(&self, big_t: Scalar, mu: Scalar) -> Result<[Scalar; 3]> {
        let d = 2e-3;
        let f = |k: Scalar| self.big_x(big_t, mu + k * d);
        let (m2, m1, z, p1, p2) = (f(-2.0)?, f(-1.0)?, f(0.0)?, f(1.0)?, f(2.0)?);
        Ok([(p1 - m1) / (2.0 * d), (p1 - 2.0 * z + m1) / (d * d), (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * d * d * d)])
    }

    /// Sign changes of dX/dμ on a uniform grid of [lo, hi].
    fn cusps_on(&self, big_t: Scalar, lo: Scalar, hi: Scalar, nodes: usize) -> Result<Vec<Scalar>> {
        let step = (hi - lo) / nodes as Scalar;
        let mut out = Vec::new();
        let mut prev: Option<(Scalar, Scalar, Scalar)> = None;
        for i in 0..=nodes {
            let mu = lo + i as Scalar * step;
            let Some((_, x, _)) = self.point(big_t, mu)? else {
                prev = None;
                continue;
            };
            if let Some((pm, px, pj)) = prev {
                let j = (x - px) / (mu - pm);
                if let Some(pj) = pj.is_finite().then_some(pj) {
                    if pj * j < 0.0 {
                        out.push(pm - 0.5 * step + step * pj / (pj - j));
                    }
                }
                prev = Some((mu, x, j));
            } else {
                prev = Some((mu, x, Scalar::NAN));
            }
        }
        Ok(out)
    }
}

/// The slice T = t/√a of the N-th front on 2000 μ-nodes.
pub fn wavefront_slice(a: Scalar, h: Scalar, n: usize, t: Scalar) -> Result<WavefrontCurve> {
    if !(t > 0.0) {
        return Err(Error::PreconditionViolated(format!("slice time must be positive, got {t}")));
    }
    let g = FrontGeometry::new(a, h, n)?;
    let big_t = t / a.sqrt();
    let mm = g.mu_max();
    let mut curve = WavefrontCurve { n, t, points: Vec::new(), params: Vec::new(), jacobian: Vec::new(), cusps: Vec::new() };
    for i in 0..=SLICE_NODES {
        let mu = -mm + 2.0 * mm * i as Scalar / SLICE_NODES as Scalar;
        if let Some((s, big_x, big_y)) = g.point(big_t, mu)? {
            let (x, y) = g.frame.to_physical_xy(big_t, big_x, big_y);
            curve.points.push((x, y));
            curve.params.push((s, mu));
            curve.jacobian.push(g.x_derivatives(big_t, mu)?[0]);
        }
    }
    if curve.points.is_empty() {
        return Err(Error::EmptySlice);
    }
    curve.cusps = g.cusps_on(big_t, -mm, mm, SLICE_NODES)?;
    Ok(curve)
}

trait PhysicalXY {
    fn to_physical_xy(&self, big_t: Scalar, big_x: Scalar, big_y: Scalar) -> (Scalar, Scalar);
}

impl PhysicalXY for ScaleFrame {
    fn to_physical_xy(&self, big_t: Scalar, big_x: Scalar, big_y: Scalar) -> (Scalar, Scalar) {
        let (_, x, y) = self.to_physical(big_t, big_x, big_y);
        (x, y)
    }
}

/// Swallowtail events of the N-th front for t in `t_range`: times where a
/// pair of cusps is born on the slice.
pub fn detect_caustics(a: Scalar, h: Scalar, n: usize, t_range: (Scalar, Scalar)) -> Result<Vec<CausticEvent>> {
    let (t_lo, t_hi) = t_range;
    if !(t_lo >= 0.0 && t_hi > t_lo) {
        return Err(Error::PreconditionViolated(format!("bad time range {t_range:?}")));
    }
    let g = FrontGeometry::new(a, h, n)?;
    let sa = a.sqrt();
    let mm = g.mu_max();
    let grid_step = 2.0 * mm / SLICE_NODES as Scalar;
    let cusps = |t: Scalar| g.cusps_on(t / sa, -mm, mm, SLICE_NODES);
    // A pair born between two scan times has both members close together
    // and no predecessor nearby.
    let scan = 400;
    let mut events = Vec::new();
    let mut prev = cusps(t_lo.max(1e-9))?;
    for i in 1..=scan {
        let t1 = t_lo + (t_hi - t_lo) * i as Scalar / scan as Scalar;
        let t0 = t_lo + (t_hi - t_lo) * (i - 1) as Scalar / scan as Scalar;
        let now = cusps(t1)?;
        for w in now.windows(2) {
            let (m0, m1) = (w[0], w[1]);
            let reach = (m1 - m0) + 5.0 * grid_step;
            let lonely = !prev.iter().any(|&p| p > m0 - reach && p < m1 + reach);
            if lonely && m1 - m0 < 0.5 {
                events.push(locate_birth(&g, (t0, t1), 0.5 * (m0 + m1), reach)?);
            }
        }
        prev = now;
    }
    Ok(events)
}

fn locate_birth(g: &FrontGeometry, (mut t0, mut t1): (Scalar, Scalar), centre: Scalar, reach: Scalar) -> Result<CausticEvent> {
    let sa = g.a.sqrt();
    let jac = |t: Scalar, mu: Scalar| g.x_derivatives(t / sa, mu).map(|d| d[0]).unwrap_or(Scalar::NAN);
    // Between the new pair dX/dμ has an extremum of sign s; the pair is
    // born when that extremum crosses zero.
    let s = jac(t1, centre).signum();
    let extremum = |t: Scalar| {
        golden_max(&|m: Scalar| s * jac(t, m), centre - reach, centre + reach)
    };
    for _ in 0..80 {
        let tm = 0.5 * (t0 + t1);
        if extremum(tm).1 > 0.0 {
            t1 = tm;
        } else {
            t0 = tm;
        }
        if t1 - t0 < 1e-14 * t1 {
            break;
        }
    }
    let t = 0.5 * (t0 + t1);
    let big_t = t / sa;
    let (mu, _) = extremum(t);
    let d = g.x_derivatives(big_t, mu)?;
    let (_, big_x, big_y) = g.point(big_t, mu)?.ok_or(Error::EmptySlice)?;
    let (x, y) = g.frame.to_physical_xy(big_t, big_x, big_y);
    // Curve scale: the X-extent of the sheet is O(1).
    let scale = d[2].abs().max(1.0);
    let kind = if d[0].abs() > CLASS_TOL * scale * 1e3 {
        return Err(Error::ClassificationAmbiguous(format!("no rank drop at the pair birth, dX/dμ = {:e}", d[0])));
    } else if d[1].abs() > 1e-3 * scale {
        CanonicalCausticKind::Cusp
    } else if d[2].abs() > CLASS_TOL {
        CanonicalCausticKind::Swallowtail
    } else {
        return Err(Error::ClassificationAmbiguous(format!("higher derivatives {d:?} inside the dead band")));
    };
    let rank = usize::from(d[0].abs() > CLASS_TOL * scale);
    Ok(CausticEvent { kind, t, x, y, n: g.n, mu, rank, derivatives: d, unfolding: unfolding_parameters(g.a, g.n.max(1), big_t, big_x) })
}

/// Reflection window of the N-th wave: t within half a bounce period of
/// its swallowtail time 4N√(a(1+a)).
pub fn reflection_window(a: Scalar, n: usize) -> (Scalar, Scalar) {
    let period = 4.0 * (a * (1.0 + a)).sqrt();
    let c = n as Scalar * period;
    ((c - 0.5 * period).max(0.0), c + 0.5 * period)
}
