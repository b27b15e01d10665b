//! Quadrature rules: adaptive Gauss–Kronrod (7/15), Gauss–Legendre and
//! generalized Gauss–Laguerre nodes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;

use crate::Real;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances and budget for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Number of equal panels the interval is split into before refinement.
    pub initial_panels: usize,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-13),
            rel_tol: T::lit(1e-10),
            initial_panels: 1,
            max_evals: 4_000_000,
        }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn tol(abs_tol: T, rel_tol: T) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn panels(mut self, n: usize) -> Self {
        self.initial_panels = n.max(1);
        self
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: Complex<T>,
    pub error: T,
    pub evals: usize,
    /// False when the budget ran out before the tolerance was met.
    pub converged: bool,
}

struct Panel<T> {
    a: T,
    b: T,
    value: Complex<T>,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod pass; returns (kronrod value, |kronrod − gauss|).
pub fn gk15<T, F>(f: &mut F, a: T, b: T) -> (Complex<T>, T)
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    let two = T::lit(2.0);
    let c = (a + b) / two;
    let h = (b - a) / two;
    let fc = f(c);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let s = f(c - dx) + f(c + dx);
        k = k + s * T::lit(WGK[j]);
        if j % 2 == 1 {
            g = g + s * T::lit(WG[j / 2]);
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

/// Globally adaptive Gauss–Kronrod integration of a complex integrand.
pub fn adaptive<T, F>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> QuadResult<T>
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    let n0 = opts.initial_panels.max(1);
    let width = (b - a) / T::from_usize(n0).unwrap();
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut evals = 0;
    for i in 0..n0 {
        let lo = a + width * T::from_usize(i).unwrap();
        let hi = if i + 1 == n0 { b } else { lo + width };
        let (value, error) = gk15(&mut f, lo, hi);
        evals += 15;
        heap.push(Panel { a: lo, b: hi, value, error });
    }
    let total = |heap: &BinaryHeap<Panel<T>>| {
        let mut v = Complex::new(T::zero(), T::zero());
        let mut e = T::zero();
        for p in heap.iter() {
            v = v + p.value;
            e = e + p.error;
        }
        (v, e)
    };
    let (mut value, mut error) = total(&heap);
    let mut since_resum = 0;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target {
            let (v, e) = total(&heap);
            return QuadResult { value: v, error: e, evals, converged: true };
        }
        if evals + 30 > opts.max_evals {
            let (v, e) = total(&heap);
            return QuadResult { value: v, error: e, evals, converged: false };
        }
        let worst = heap.pop().unwrap();
        let mid = (worst.a + worst.b) / T::lit(2.0);
        if !(mid > worst.a && mid < worst.b) {
            // Panel can no longer be split in this precision.
            let (v, e) = total(&heap);
            let v = v + worst.value;
            let e = e + worst.error;
            return QuadResult { value: v, error: e, evals, converged: false };
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evals += 30;
        value = value - worst.value + v1 + v2;
        error = error - worst.error + e1 + e2;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        since_resum += 1;
        if since_resum == 256 {
            // Running sums drift; refresh them from the panels.
            let (v, e) = total(&heap);
            value = v;
            error = e;
            since_resum = 0;
        }
    }
}

/// Real-valued convenience wrapper around [`adaptive`].
pub fn adaptive_real<T, F>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> QuadResult<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    adaptive(|x| Complex::new(f(x), T::zero()), a, b, opts)
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton on P_n.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = T::lit(-z);
        x[n - 1 - i] = T::lit(z);
        w[i] = T::lit(wi);
        w[n - 1 - i] = T::lit(wi);
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (z * pn - p0) / (z * z - 1.0);
    (pn, d)
}

/// A fixed composite Gauss–Legendre rule on [a, b].
#[derive(Debug, Clone)]
pub struct CompositeRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> CompositeRule<T> {
    pub fn new(a: T, b: T, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre::<T>(order);
        let panels = panels.max(1);
        let width = (b - a) / T::from_usize(panels).unwrap();
        let half = width / T::lit(2.0);
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let c = a + width * T::from_usize(p).unwrap() + half;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(c + half * *xi);
                weights.push(half * *wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + *w * f(*x);
        }
        acc
    }
}

/// Generalized Gauss–Laguerre rule for the weight `t^alpha e^{-t}` on
/// (0, ∞), from the Golub–Welsch eigenproblem followed by Newton polishing.
/// Weights are normalized to sum to one.
pub fn gauss_laguerre(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    use nalgebra::DMatrix;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = 2.0 * i as f64 + alpha + 1.0;
        if i + 1 < n {
            let b = ((i as f64 + 1.0) * (i as f64 + 1.0 + alpha)).sqrt();
            jac[(i, i + 1)] = b;
            jac[(i + 1, i)] = b;
        }
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut w: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    // Polish nodes on L_n^alpha; recompute weights from L_{n-1}^alpha.
    for i in 0..n {
        let mut z = x[i];
        for _ in 0..8 {
            let (ln, dln, _) = laguerre(n, alpha, z);
            let dz = ln / dln;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1e-300) {
                break;
            }
        }
        x[i] = z;
    }
    let mut ok = true;
    let mut wp = Vec::with_capacity(n);
    for &z in &x {
        let (_, dln, _) = laguerre(n, alpha, z);
        // w_i ∝ 1 / (x_i [L_n'(x_i)]²)
        let v = 1.0 / (z * dln * dln);
        if !v.is_finite() {
            ok = false;
        }
        wp.push(v);
    }
    if ok {
        w = wp;
    }
    let s: f64 = w.iter().sum();
    for wi in &mut w {
        *wi /= s;
    }
    (x, w)
}

// Returns (L_n^alpha(z), d/dz L_n^alpha(z), L_{n-1}^alpha(z)), scaled to avoid overflow.
fn laguerre(n: usize, alpha: f64, z: f64) -> (f64, f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = 1.0 + alpha - z;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    let mut scale = 1.0f64;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 + alpha - z) * p1 - (kf + alpha) * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
        if p1.abs() > 1e150 {
            p0 *= 1e-150;
            p1 *= 1e-150;
            scale *= 1e-150;
        }
    }
    let _ = scale;
    let nf = n as f64;
    let d = (nf * p1 - (nf + alpha) * p0) / z;
    (p1, d, p0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_exact() {
        let r = adaptive_real(|x: f64| x.powi(5) - 3.0 * x * x, 0.0, 2.0, QuadOptions::default());
        assert!((r.value.re - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn gk_oscillatory() {
        let lam = 200.0;
        let r = adaptive(
            |x: f64| Complex::new(0.0, lam * x).exp(),
            0.0,
            1.0,
            QuadOptions::default().panels(40),
        );
        let exact = (Complex::new(0.0, lam).exp() - 1.0) / Complex::new(0.0, lam);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn gk_in_single_precision() {
        let r = adaptive_real(|x: f32| x.sin(), 0.0, std::f32::consts::PI, QuadOptions::tol(1e-5, 1e-5));
        assert!((r.value.re - 2.0).abs() < 1e-5);
    }

    #[test]
    fn legendre_weights_sum() {
        let (x, w) = gauss_legendre::<f64>(20);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.4).abs() < 1e-14);
    }

    #[test]
    fn laguerre_moments() {
        // E[t] = alpha + 1 and E[t^2] = (alpha + 1)(alpha + 2) under t^alpha e^{-t}.
        for &alpha in &[-1.0 / 6.0, 1.0 / 6.0, 0.0] {
            let (x, w) = gauss_laguerre(60, alpha);
            let m1: f64 = x.iter().zip(&w).map(|(x, w)| w * x).sum();
            let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
            assert!((m1 - (alpha + 1.0)).abs() < 1e-12, "{m1}");
            assert!((m2 - (alpha + 1.0) * (alpha + 2.0)).abs() < 1e-11, "{m2}");
        }
    }
}
