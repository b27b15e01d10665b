//! Ai and Ai′ on the complex plane.
//!
//! Three regimes:
//! * Maclaurin series for |z| ≤ 5 with Re z ≤ 2 (no catastrophic cancellation there);
//! * the exact Laplace-integral representation, discretized by generalized
//!   Gauss–Laguerre, for moderate |z| in the sector |arg z| ≤ 2π/3;
//! * the Poincaré expansion for |z| ≥ 12 in the same sector.
//!
//! The remaining sector is reached through Ai(z) = −ωAi(ωz) − ω²Ai(ω²z).

use std::f64::consts::{FRAC_PI_3, PI};
use std::sync::OnceLock;

use crate::quad::gauss_laguerre;
use crate::{c, Complex, Error, Result, Scalar};

/// Ai(0).
pub const AI0: Scalar = 0.355_028_053_887_817_239;
/// −Ai′(0).
pub const AIP0: Scalar = 0.258_819_403_792_806_798;

/// Default overflow guard on |z|.
pub const Z_MAX: Scalar = 1.0e4;

const SERIES_RADIUS: Scalar = 5.0;
const ASYMPTOTIC_RADIUS: Scalar = 12.0;
const LAGUERRE_NODES: usize = 96;
const TWO_PI_3: Scalar = 2.0 * PI / 3.0;

struct LaguerreRule {
    x: Vec<Scalar>,
    w: Vec<Scalar>,
}

fn rule(alpha_sign: i8) -> &'static LaguerreRule {
    static MINUS: OnceLock<LaguerreRule> = OnceLock::new();
    static PLUS: OnceLock<LaguerreRule> = OnceLock::new();
    let cell = if alpha_sign < 0 { &MINUS } else { &PLUS };
    cell.get_or_init(|| {
        let (x, w) = gauss_laguerre(LAGUERRE_NODES, alpha_sign as Scalar / 6.0);
        LaguerreRule { x, w }
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Value,
    Derivative,
}

/// Ai(z).
pub fn airy_ai(z: Complex) -> Result<Complex> {
    airy_ai_guarded(z, Z_MAX)
}

/// Ai′(z).
pub fn airy_ai_prime(z: Complex) -> Result<Complex> {
    airy_ai_prime_guarded(z, Z_MAX)
}

/// Ai(z) with an explicit overflow guard.
pub fn airy_ai_guarded(z: Complex, z_max: Scalar) -> Result<Complex> {
    evaluate(z, z_max, Kind::Value)
}

/// Ai′(z) with an explicit overflow guard.
pub fn airy_ai_prime_guarded(z: Complex, z_max: Scalar) -> Result<Complex> {
    evaluate(z, z_max, Kind::Derivative)
}

/// Real-argument Ai; panics only on non-finite input.
pub fn ai(x: Scalar) -> Scalar {
    real_eval(x, Kind::Value)
}

/// Real-argument Ai′.
pub fn ai_prime(x: Scalar) -> Scalar {
    real_eval(x, Kind::Derivative)
}

fn real_eval(x: Scalar, kind: Kind) -> Scalar {
    if x > 150.0 {
        // Underflows well before this; avoid the guard path.
        return 0.0;
    }
    match evaluate(c(x, 0.0), Scalar::INFINITY, kind) {
        Ok(v) => v.re,
        Err(_) => Scalar::NAN,
    }
}

fn evaluate(z: Complex, z_max: Scalar, kind: Kind) -> Result<Complex> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::DomainViolation(format!("non-finite Airy argument {z}")));
    }
    let r = z.norm();
    if r > z_max && z.arg().abs() > FRAC_PI_3 {
        return Err(Error::OverflowGuard { modulus: r });
    }
    let mut v = dispatch(z, kind);
    if z.im == 0.0 {
        v.im = 0.0;
    }
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::OverflowGuard { modulus: r })
    }
}

fn dispatch(z: Complex, kind: Kind) -> Complex {
    let r = z.norm();
    if r <= SERIES_RADIUS && z.re <= 2.0 {
        return series(z, kind);
    }
    if z.arg().abs() <= TWO_PI_3 {
        return if r >= ASYMPTOTIC_RADIUS { asymptotic(z, kind) } else { laplace(z, kind) };
    }
    // Connection formula; both rotated arguments land in |arg| ≤ 2π/3.
    let w = Complex::from_polar(1.0, TWO_PI_3);
    let w2 = w * w;
    match kind {
        Kind::Value => -(w * dispatch(w * z, kind)) - w2 * dispatch(w2 * z, kind),
        Kind::Derivative => -(w2 * dispatch(w * z, kind)) - w * dispatch(w2 * z, kind),
    }
}

fn series(z: Complex, kind: Kind) -> Complex {
    let z3 = z * z * z;
    let mut f = c(0.0, 0.0);
    let mut g = c(0.0, 0.0);
    match kind {
        Kind::Value => {
            let mut t = c(1.0, 0.0);
            let mut s = z;
            for k in 1..200 {
                f += t;
                g += s;
                let kf = k as Scalar;
                t = t * z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
                s = s * z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
                if t.norm() + s.norm() < 1e-18 * (f.norm() + g.norm()) {
                    f += t;
                    g += s;
                    break;
                }
            }
        }
        Kind::Derivative => {
            let mut p = z * z / 2.0;
            let mut q = c(1.0, 0.0);
            for k in 1..200 {
                f += p;
                g += q;
                let kf = k as Scalar;
                p = p * z3 / ((3.0 * kf) * (3.0 * kf + 2.0));
                q = q * z3 / ((3.0 * kf - 2.0) * (3.0 * kf));
                if p.norm() + q.norm() < 1e-18 * (f.norm() + g.norm()) {
                    f += p;
                    g += q;
                    break;
                }
            }
        }
    }
    f * AI0 - g * AIP0
}

fn zeta_of(z: Complex) -> Complex {
    z.powf(1.5) * (2.0 / 3.0)
}

fn prefactor(z: Complex, zeta: Complex, kind: Kind) -> Complex {
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    match kind {
        Kind::Value => e / z.powf(0.25),
        Kind::Derivative => -e * z.powf(0.25),
    }
}

fn laplace(z: Complex, kind: Kind) -> Complex {
    let zeta = zeta_of(z);
    let (sign, expo) = match kind {
        Kind::Value => (-1i8, -1.0 / 6.0),
        Kind::Derivative => (1i8, 1.0 / 6.0),
    };
    let alpha = sign as Scalar / 6.0;
    let rule = rule(sign);
    let two_zeta = zeta * 2.0;
    // Keep the integration ray away from the branch point t = −2ζ.
    let arg = zeta.arg();
    let theta = if arg > TWO_PI_3 {
        PI / 6.0
    } else if arg < -TWO_PI_3 {
        -PI / 6.0
    } else {
        0.0
    };
    let avg = if theta == 0.0 {
        let mut acc = c(0.0, 0.0);
        for (x, w) in rule.x.iter().zip(&rule.w) {
            acc += (c(1.0, 0.0) + *x / two_zeta).powf(expo) * *w;
        }
        acc
    } else {
        let dir = Complex::from_polar(1.0 / theta.cos(), theta);
        let tan = theta.tan();
        let mut acc = c(0.0, 0.0);
        for (x, w) in rule.x.iter().zip(&rule.w) {
            let t = dir * *x;
            acc += (c(1.0, 0.0) + t / two_zeta).powf(expo) * c(0.0, -x * tan).exp() * *w;
        }
        acc * Complex::from_polar(theta.cos().powf(-(alpha + 1.0)), theta * (alpha + 1.0))
    };
    prefactor(z, zeta, kind) * avg
}

fn asymptotic(z: Complex, kind: Kind) -> Complex {
    let zeta = zeta_of(z);
    let inv = 1.0 / zeta;
    let mut u = 1.0;
    let mut term = c(1.0, 0.0);
    let mut sum = c(1.0, 0.0);
    let mut last = Scalar::INFINITY;
    for k in 1..80 {
        let kf = k as Scalar;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let coef = match kind {
            Kind::Value => u,
            Kind::Derivative => -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u,
        };
        term = -term * inv;
        let add = term * coef;
        let m = add.norm();
        if m > last {
            break;
        }
        sum += add;
        last = m;
        if m < 1e-17 * sum.norm() {
            break;
        }
    }
    prefactor(z, zeta, kind) * sum
}

const CHEB_DEGREE: usize = 20;

/// Piecewise Chebyshev interpolant on equal panels of [lo, lo + width·n).
pub(crate) struct PiecewiseCheb {
    lo: Scalar,
    width: Scalar,
    coeffs: Vec<[Scalar; CHEB_DEGREE + 1]>,
}

impl PiecewiseCheb {
    /// Fits `f` on panels; `f` receives all nodes of a panel at once, in
    /// ascending order, so callers can unwrap phases.
    pub(crate) fn build(lo: Scalar, hi: Scalar, width: Scalar, mut f: impl FnMut(&[Scalar]) -> Vec<Scalar>) -> Self {
        let n = CHEB_DEGREE + 1;
        let panels = ((hi - lo) / width).round() as usize;
        // ascending Chebyshev points of the first kind
        let nodes: Vec<Scalar> = (0..n).map(|j| -(PI * (j as Scalar + 0.5) / n as Scalar).cos()).collect();
        let mut coeffs = Vec::with_capacity(panels);
        for p in 0..panels {
            let a = lo + p as Scalar * width;
            let xs: Vec<Scalar> = nodes.iter().map(|x| a + 0.5 * width * (x + 1.0)).collect();
            let vals = f(&xs);
            let mut cf = [0.0; CHEB_DEGREE + 1];
            for (m, slot) in cf.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, v) in vals.iter().enumerate() {
                    // node j is cos(π(n−1−j+½)/n) after the reversal
                    acc += v * (PI * m as Scalar * ((n - 1 - j) as Scalar + 0.5) / n as Scalar).cos();
                }
                *slot = acc * 2.0 / n as Scalar;
            }
            cf[0] *= 0.5;
            coeffs.push(cf);
        }
        Self { lo, width, coeffs }
    }

    pub(crate) fn contains(&self, x: Scalar) -> bool {
        x >= self.lo && x < self.lo + self.width * self.coeffs.len() as Scalar
    }

    pub(crate) fn eval(&self, x: Scalar) -> Scalar {
        let pos = (x - self.lo) / self.width;
        let p = (pos.max(0.0).floor() as usize).min(self.coeffs.len() - 1);
        let u = 2.0 * (pos - p as Scalar) - 1.0;
        let cf = &self.coeffs[p];
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in cf.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + cf[0]
    }
}

const TABLE_LO: Scalar = -200.0;
const TABLE_HI: Scalar = 12.0;
const TABLE_WIDTH: Scalar = 0.25;

// Real Ai and Ai′ on [−200, 12], built once from the direct evaluator.
fn cheb_tables() -> &'static (PiecewiseCheb, PiecewiseCheb) {
    static TABLE: OnceLock<(PiecewiseCheb, PiecewiseCheb)> = OnceLock::new();
    TABLE.get_or_init(|| {
        let v = PiecewiseCheb::build(TABLE_LO, TABLE_HI, TABLE_WIDTH, |xs| xs.iter().map(|&x| real_eval(x, Kind::Value)).collect());
        let d = PiecewiseCheb::build(TABLE_LO, TABLE_HI, TABLE_WIDTH, |xs| {
            xs.iter().map(|&x| real_eval(x, Kind::Derivative)).collect()
        });
        (v, d)
    })
}

fn table_eval(x: Scalar, kind: Kind) -> Scalar {
    if !(TABLE_LO..TABLE_HI).contains(&x) {
        return real_eval(x, kind);
    }
    let t = cheb_tables();
    match kind {
        Kind::Value => t.0.eval(x),
        Kind::Derivative => t.1.eval(x),
    }
}

/// Real Ai from the interpolation table (absolute error ≲ 1e−15).
pub fn ai_fast(x: Scalar) -> Scalar {
    table_eval(x, Kind::Value)
}

/// Real Ai′ from the interpolation table.
pub fn ai_prime_fast(x: Scalar) -> Scalar {
    table_eval(x, Kind::Derivative)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex, b: Complex, tol: Scalar) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn origin_values() {
        assert!((ai(0.0) - AI0).abs() < 1e-16);
        assert!((ai_prime(0.0) + AIP0).abs() < 1e-16);
    }

    #[test]
    fn regimes_agree_on_overlap() {
        // Laplace and series both cover |z| = 4.5 in the left half plane.
        for k in 0..24 {
            let th = -PI + (k as Scalar + 0.5) * 2.0 * PI / 24.0;
            let z = Complex::from_polar(4.5, th);
            if z.re > 2.0 || th.abs() > TWO_PI_3 {
                continue;
            }
            for kind in [Kind::Value, Kind::Derivative] {
                let s = series(z, kind);
                let l = laplace(z, kind);
                assert!(close(l, s, 1e-11), "{z} {s} {l}");
            }
        }
        // Laplace and asymptotic at |z| = 12.
        for k in 0..16 {
            let th = -TWO_PI_3 + k as Scalar * 2.0 * TWO_PI_3 / 15.0;
            let z = Complex::from_polar(12.0, th);
            for kind in [Kind::Value, Kind::Derivative] {
                assert!(close(laplace(z, kind), asymptotic(z, kind), 1e-12));
            }
        }
    }

    #[test]
    fn reference_values() {
        let cases: [(Scalar, Scalar, Scalar); 7] = [
            (1.0, 0.135292416312881415524, -0.159147441296793212788),
            (-1.0, 0.535560883292352118800, -0.010160567116645209395),
            (3.0, 0.006591139357460719144, -0.011912976705951318474),
            (-10.0, 0.040241238486443190689, 0.996265044132790055905),
            (-5.5, 0.017781541276574975603, 0.864197217771398390772),
            (7.0, 7.4921288639971670808e-7, -2.0081508947387919912e-6),
            (-20.0, -0.176406127077984689590, 0.892862856736471238398),
        ];
        for (x, a, ap) in cases {
            assert!((ai(x) - a).abs() <= 2e-15 * (1.0 + x.abs().powf(1.5)) * a.abs().max(0.1), "Ai({x}) {} {a}", ai(x));
            assert!((ai_prime(x) - ap).abs() <= 2e-15 * (1.0 + x.abs().powf(1.5)) * ap.abs().max(0.1), "Ai'({x}) {} {ap}", ai_prime(x));
        }
        let z = airy_ai(c(2.0, 3.0)).unwrap();
        assert!(close(z, c(0.008104457809530534989, 0.131178382604566026883), 1e-13));
        let z = airy_ai(c(-6.0, -8.0)).unwrap();
        assert!(close(z, c(-161676656.876793404824, 12221743.788136866658), 1e-13));
        let z = airy_ai_prime(c(-30.0, 4.0)).unwrap();
        assert!(close(z, c(2037157057.384257299437, -831674870.520609786918), 1e-13));
    }

    #[test]
    fn real_input_has_zero_imaginary_part() {
        for x in [-20.0, -6.0, -1.0, 0.5, 3.0, 7.0, 30.0] {
            assert_eq!(airy_ai(c(x, 0.0)).unwrap().im, 0.0);
        }
    }

    #[test]
    fn guard_on_growing_side() {
        assert!(matches!(airy_ai(c(-2.0e4, 0.0)), Err(Error::OverflowGuard { .. })));
        assert!(airy_ai(c(2.0e4, 0.0)).is_ok());
    }

    #[test]
    fn table_matches_direct() {
        let mut worst: Scalar = 0.0;
        let mut x: Scalar = -199.97;
        while x < 14.0 {
            // phase conditioning grows like |x|^{3/2}
            let scale = 1.0 + x.abs().powf(1.5);
            let e1 = (ai_fast(x) - ai(x)).abs();
            let e2 = (ai_prime_fast(x) - ai_prime(x)).abs() / (1.0 + x.abs()).sqrt();
            worst = worst.max(e1.max(e2) / scale);
            x += 0.0137;
        }
        assert!(worst < 5e-15, "{worst:e}");
    }
}
