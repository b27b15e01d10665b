//! Airy functions, their zeros, the rotated branches A_± and the phase
//! correction B, plus the canonical fold/cusp/swallowtail integrals.

pub mod airy;
pub mod canonical;

use std::f64::consts::{FRAC_PI_3, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use airy::{ai, ai_fast, ai_prime, ai_prime_fast, airy_ai, airy_ai_guarded, airy_ai_prime, airy_ai_prime_guarded, Z_MAX};
pub use canonical::{canonical_integral, CanonicalCausticKind, CanonicalOptions};

use crate::{c, Complex, Error, Result, Scalar};

/// Sign selector for the rotated branches and for propagators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> Scalar {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The first `k_max` zeros −ω_k of Ai, ω_k increasing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AiryZeroTable {
    pub zeros: Vec<Scalar>,
    /// |Ai(−ω_k)| after refinement.
    pub residuals: Vec<Scalar>,
    pub k_max: usize,
}

impl AiryZeroTable {
    /// ω_k for 1-based k.
    pub fn omega(&self, k: usize) -> Result<Scalar> {
        if k == 0 || k > self.k_max {
            return Err(Error::IndexOutOfTable { k, size: self.k_max });
        }
        Ok(self.zeros[k - 1])
    }
}

/// Asymptotic seed (3π(4k − 1)/8)^{2/3}.
pub fn zero_seed(k: usize) -> Scalar {
    (3.0 * PI * (4.0 * k as Scalar - 1.0) / 8.0).powf(2.0 / 3.0)
}

/// Newton refinement of one zero from its asymptotic seed.
pub fn airy_zero(k: usize) -> Result<(Scalar, Scalar)> {
    if k == 0 {
        return Err(Error::IndexOutOfTable { k, size: 0 });
    }
    let mut x = zero_seed(k);
    for _ in 0..50 {
        let f = ai(-x);
        if f.abs() < 1e-12 {
            // One more step squeezes out the last bits.
            let x1 = x + f / ai_prime(-x);
            let f1 = ai(-x1);
            return Ok(if f1.abs() <= f.abs() { (x1, f1.abs()) } else { (x, f.abs()) });
        }
        x += f / ai_prime(-x);
    }
    Err(Error::ConvergenceFailure { what: "Airy zero Newton iteration", iterations: 50 })
}

/// Table of the first `k_max` zeros.
pub fn airy_zeros(k_max: usize) -> Result<AiryZeroTable> {
    if k_max == 0 {
        return Err(Error::PreconditionViolated("k_max must be at least 1".into()));
    }
    let mut zeros = Vec::with_capacity(k_max);
    let mut residuals = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let (x, r) = airy_zero(k)?;
        zeros.push(x);
        residuals.push(r);
    }
    Ok(AiryZeroTable { zeros, residuals, k_max })
}

const CACHED_ZEROS: usize = 4096;

/// ω_k from a process-wide cache of the first 4096 zeros.
pub fn omega(k: usize) -> Result<Scalar> {
    static TABLE: OnceLock<AiryZeroTable> = OnceLock::new();
    if k > CACHED_ZEROS {
        return airy_zero(k).map(|p| p.0);
    }
    TABLE
        .get_or_init(|| airy_zeros(CACHED_ZEROS).expect("zero table"))
        .omega(k)
}

/// A_+(z) = e^{−iπ/3}Ai(e^{−iπ/3}z) and A_−(z) = e^{iπ/3}Ai(e^{iπ/3}z),
/// so that A_+(z) + A_−(z) = Ai(−z) and A_−(z) = conj A_+(conj z).
pub fn airy_branch(sign: Sign, z: Complex) -> Result<Complex> {
    let rot = match sign {
        Sign::Plus => Complex::from_polar(1.0, -FRAC_PI_3),
        Sign::Minus => Complex::from_polar(1.0, FRAC_PI_3),
    };
    Ok(rot * airy_ai(rot * z)?)
}

const PHASE_TABLE_HI: Scalar = 200.0;

// ln|A_+(w)| and the continuous argument of A_+(w) on [0, 200].
fn plus_tables() -> &'static (airy::PiecewiseCheb, airy::PiecewiseCheb) {
    static TABLE: OnceLock<(airy::PiecewiseCheb, airy::PiecewiseCheb)> = OnceLock::new();
    TABLE.get_or_init(|| {
        let eval = |w: Scalar| airy_branch(Sign::Plus, c(w, 0.0)).expect("A_+ on the positive axis");
        let modulus = airy::PiecewiseCheb::build(0.0, PHASE_TABLE_HI, 0.25, |ws| ws.iter().map(|&w| eval(w).norm().ln()).collect());
        let mut prev = -FRAC_PI_3;
        let phase = airy::PiecewiseCheb::build(0.0, PHASE_TABLE_HI, 0.25, |ws| {
            ws.iter()
                .map(|&w| {
                    let raw = eval(w).arg();
                    let v = raw + 2.0 * PI * ((prev - raw) / (2.0 * PI)).round();
                    prev = v;
                    v
                })
                .collect()
        });
        (modulus, phase)
    })
}

/// (ln|A_+(w)|, arg A_+(w)) for real w ≥ 0, the argument continuous from
/// −π/3 at w = 0. Since A_−(w) = conj A_+(w) there, this fixes both branches.
pub fn airy_plus_polar(w: Scalar) -> Result<(Scalar, Scalar)> {
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::DomainViolation(format!("polar form of A_+ needs w ≥ 0, got {w}")));
    }
    let t = plus_tables();
    if t.0.contains(w) {
        return Ok((t.0.eval(w), t.1.eval(w)));
    }
    // (2/3)w^{3/2} − π/4 plus the slowly varying correction −B/2 from the
    // quotient identity; B is O(w^{−3/2}) here.
    let u = w.powf(1.5);
    let v = airy_branch(Sign::Plus, c(w, 0.0))?;
    let approx = 2.0 / 3.0 * u - PI / 4.0;
    let raw = v.arg();
    Ok((v.norm().ln(), raw + 2.0 * PI * ((approx - raw) / (2.0 * PI)).round()))
}

/// Reflection factor −A_−(w)/A_+(w) = −e^{−2i arg A_+(w)} for real w ≥ 0.
pub fn reflection_factor(w: Scalar) -> Result<Complex> {
    let (_, th) = airy_plus_polar(w)?;
    Ok(-Complex::from_polar(1.0, -2.0 * th))
}

/// (B(u), B′(u)) for u ≥ 0 from the polar form of A_+ at w = u^{2/3}:
/// B = (4/3)u − 2 arg A_+ − π/2 and, by the Wronskian of Ai and Bi,
/// B′ = 4/3 − u^{−1/3}/(3π|A_+|²). Cheap enough for inner loops.
pub fn phase_correction_pair(u: Scalar) -> Result<(Scalar, Scalar)> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::DomainViolation(format!("B(u) needs u ≥ 0, got {u}")));
    }
    let w = u.powf(2.0 / 3.0);
    let (ln_mod, th) = airy_plus_polar(w)?;
    let b = 4.0 / 3.0 * u - 2.0 * th - PI / 2.0;
    let bp = if u == 0.0 {
        Scalar::NEG_INFINITY
    } else {
        4.0 / 3.0 - (-2.0 * ln_mod).exp() / (3.0 * PI * u.cbrt())
    };
    Ok((b, bp))
}

/// Default lower end of the B domain.
pub const B_U_MIN: Scalar = 1.0;
const B_TABLE_MAX: Scalar = 1.0e6;
const B_TABLE_MIN: Scalar = 0.5;
const B_TABLE_RATIO: Scalar = 1.1;

// Principal value of −i log[(A_−/A_+)(−i)e^{(4/3)iu}] at z = u^{2/3}.
fn b_principal(u: Scalar) -> Result<Complex> {
    let z = c(u.powf(2.0 / 3.0), 0.0);
    let ap = airy_branch(Sign::Plus, z)?;
    let am = airy_branch(Sign::Minus, z)?;
    let w = am / ap * c(0.0, -1.0) * c(0.0, 4.0 / 3.0 * u).exp();
    Ok(c(w.arg(), -w.norm().ln()))
}

struct BTable {
    log_u: Vec<Scalar>,
    b: Vec<Scalar>,
}

fn b_table() -> &'static BTable {
    static TABLE: OnceLock<BTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut log_u = Vec::new();
        let mut b = Vec::new();
        let mut u = B_TABLE_MAX;
        let mut prev = 0.0;
        while u >= B_TABLE_MIN / B_TABLE_RATIO {
            let raw = b_principal(u).map(|v| v.re).unwrap_or(prev);
            let shift = ((prev - raw) / (2.0 * PI)).round();
            let v = raw + 2.0 * PI * shift;
            log_u.push(u.ln());
            b.push(v);
            prev = v;
            u /= B_TABLE_RATIO;
        }
        log_u.reverse();
        b.reverse();
        BTable { log_u, b }
    })
}

fn b_reference(u: Scalar) -> Scalar {
    let t = b_table();
    let lu = u.ln();
    if lu >= *t.log_u.last().unwrap() {
        return 0.0;
    }
    let i = t.log_u.partition_point(|&x| x <= lu).clamp(1, t.log_u.len() - 1);
    let (x0, x1) = (t.log_u[i - 1], t.log_u[i]);
    let s = (lu - x0) / (x1 - x0);
    t.b[i - 1] * (1.0 - s) + t.b[i] * s
}

/// B(u) with its (numerically tiny) imaginary part; branch tracked from B(∞) = 0.
pub fn phase_correction_b_full(u: Scalar) -> Result<Complex> {
    if !(u >= B_TABLE_MIN) || !u.is_finite() {
        return Err(Error::DomainViolation(format!("B(u) needs u ≥ {B_TABLE_MIN}, got {u}")));
    }
    let raw = b_principal(u)?;
    let reference = b_reference(u);
    let shift = ((reference - raw.re) / (2.0 * PI)).round();
    let v = raw.re + 2.0 * PI * shift;
    if (v - reference).abs() > PI / 2.0 {
        return Err(Error::BranchAmbiguity { u });
    }
    Ok(c(v, raw.im))
}

/// The real phase correction B(u) for u ≥ 1.
pub fn phase_correction_b(u: Scalar) -> Result<Scalar> {
    if !(u >= B_U_MIN) {
        return Err(Error::DomainViolation(format!("B(u) needs u ≥ {B_U_MIN}, got {u}")));
    }
    phase_correction_b_full(u).map(|v| v.re)
}

/// B′(u) by a fourth-order central stencil with step 0.05u.
pub fn phase_correction_b_prime(u: Scalar) -> Result<Scalar> {
    if !(u >= B_U_MIN) {
        return Err(Error::DomainViolation(format!("B′(u) needs u ≥ {B_U_MIN}, got {u}")));
    }
    if u >= B_TABLE_MAX {
        return Ok(-(5.0 / 24.0) / (u * u));
    }
    let d = 0.05 * u;
    let f = |x: Scalar| phase_correction_b_full(x).map(|v| v.re);
    Ok((-f(u + 2.0 * d)? + 8.0 * f(u + d)? - 8.0 * f(u - d)? + f(u - 2.0 * d)?) / (12.0 * d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_b_matches_tracked_branch() {
        for &u in &[1.0, 1.7, 4.0, 13.0, 90.0, 800.0, 5000.0] {
            let (b, bp) = phase_correction_pair(u).unwrap();
            let b_ref = phase_correction_b(u).unwrap();
            let bp_ref = phase_correction_b_prime(u).unwrap();
            assert!((b - b_ref).abs() < 1e-10, "B({u}): {b} vs {b_ref}");
            assert!((bp - bp_ref).abs() < 1e-5 * (1.0 + bp_ref.abs()), "B′({u}): {bp} vs {bp_ref}");
            let d = 1e-3 * u;
            let f = |x: Scalar| phase_correction_pair(x).unwrap().0;
            let fine = (f(u - 2.0 * d) - 8.0 * f(u - d) + 8.0 * f(u + d) - f(u + 2.0 * d)) / (12.0 * d);
            assert!((bp - fine).abs() < 1e-8 + 1e-6 * bp.abs(), "B′({u}): {bp} vs fine stencil {fine}");
        }
        let (b0, _) = phase_correction_pair(0.0).unwrap();
        assert!((b0 - PI / 6.0).abs() < 1e-13);
    }

    #[test]
    fn first_zeros() {
        let t = airy_zeros(3).unwrap();
        assert!((t.zeros[0] - 2.338_107_410_459_767).abs() < 1e-13);
        assert!((t.zeros[1] - 4.087_949_444_130_971).abs() < 1e-13);
        assert!(t.residuals.iter().all(|r| *r < 1e-12));
        assert!((omega(200).unwrap() - 96.047_337_603_081_25).abs() < 1e-10);
        assert!(matches!(t.omega(4), Err(Error::IndexOutOfTable { .. })));
    }

    #[test]
    fn branch_identities() {
        for x in [0.3, 3.0, 11.0, 25.0] {
            let z = c(x, 0.0);
            let p = airy_branch(Sign::Plus, z).unwrap();
            let m = airy_branch(Sign::Minus, z).unwrap();
            assert!(((p + m) - c(ai(-x), 0.0)).norm() < 1e-13);
            assert!((m - p.conj()).norm() < 1e-14);
        }
        let z = c(2.0, 0.7);
        let p = airy_branch(Sign::Plus, z.conj()).unwrap();
        let m = airy_branch(Sign::Minus, z).unwrap();
        assert!((m - p.conj()).norm() < 1e-14);
    }

    #[test]
    fn b_reconstructs_quotient() {
        let u: Scalar = 8.0;
        let b = phase_correction_b(u).unwrap();
        let z = c(u.powf(2.0 / 3.0), 0.0);
        let q = airy_branch(Sign::Minus, z).unwrap() / airy_branch(Sign::Plus, z).unwrap();
        let rebuilt = c(0.0, 1.0) * c(0.0, -4.0 / 3.0 * u).exp() * c(0.0, b).exp();
        assert!((q - rebuilt).norm() < 1e-9);
    }

    #[test]
    fn b_leading_coefficient() {
        // B(u) u → 5/24 from the first Poincaré coefficient.
        for u in [50.0, 200.0, 500.0] {
            let b = phase_correction_b(u).unwrap();
            assert!((b * u - 5.0 / 24.0).abs() < 2e-3, "{u} {}", b * u);
        }
        let bp = phase_correction_b_prime(100.0).unwrap();
        assert!((bp * 1e4 + 5.0 / 24.0).abs() < 1e-3);
    }

    #[test]
    fn polar_table_matches_direct() {
        let mut w = 0.0;
        while w < 230.0 {
            let (lm, th) = airy_plus_polar(w).unwrap();
            let direct = airy_branch(Sign::Plus, c(w, 0.0)).unwrap();
            let tab = Complex::from_polar(lm.exp(), th);
            let scale = 1.0 + w.powf(1.5);
            assert!((tab - direct).norm() < 1e-14 * scale * direct.norm().max(1e-3), "w = {w}");
            w += 0.173;
        }
        // the unwrapped argument grows like (2/3)w^{3/2}
        let (_, th) = airy_plus_polar(100.0).unwrap();
        assert!((th - (2.0 / 3.0 * 1000.0 - PI / 4.0)).abs() < 1e-3);
    }

    #[test]
    fn reflection_factor_matches_b() {
        // −A_−/A_+ = −i e^{−(4/3)iu} e^{iB(u)}, u = w^{3/2}
        for &u in &[1.0, 3.0, 10.0, 57.0, 400.0] {
            let w: Scalar = Scalar::powf(u, 2.0 / 3.0);
            let r = reflection_factor(w).unwrap();
            let b = phase_correction_b(u).unwrap();
            let via_b = c(0.0, -1.0) * c(0.0, -4.0 / 3.0 * u + b).exp();
            assert!((r - via_b).norm() < 1e-11, "u = {u}: {r} vs {via_b}");
        }
    }
}
