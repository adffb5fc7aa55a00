//! Composite Simpson quadrature and its oscillatory (Filon) counterpart.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Uniform grid `t0 = t_0 < … < t_n = t1` with an even interval count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureGrid<T> {
    t0: T,
    t1: T,
    n_intervals: usize,
}

impl<T: Real> QuadratureGrid<T> {
    pub fn new(t0: T, t1: T, n_intervals: usize) -> Result<Self> {
        if n_intervals == 0 || !n_intervals.is_multiple_of(2) {
            return Err(Error::OddIntervals(n_intervals));
        }
        if !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
            return Err(Error::InvalidGrid(format!(
                "need finite t0 < t1, got [{t0}, {t1}]"
            )));
        }
        Ok(Self { t0, t1, n_intervals })
    }

    /// Grid on `[0, t1]` whose step is at most `max_dt`.
    pub fn with_max_step(t1: T, max_dt: T) -> Result<Self> {
        let raw = (t1 / max_dt).ceil().to_usize().unwrap_or(0).max(1);
        Self::new(T::zero(), t1, raw + raw % 2)
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn t1(&self) -> T {
        self.t1
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn n_nodes(&self) -> usize {
        self.n_intervals + 1
    }

    pub fn dt(&self) -> T {
        (self.t1 - self.t0) / T::from_usize_lossy(self.n_intervals)
    }

    pub fn node(&self, i: usize) -> T {
        if i == self.n_intervals {
            self.t1
        } else {
            self.t0 + self.dt() * T::from_usize_lossy(i)
        }
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    /// Index of the node closest to `t`.
    pub fn nearest_index(&self, t: T) -> usize {
        let r = ((t - self.t0) / self.dt()).round();
        r.to_usize().unwrap_or(0).min(self.n_intervals)
    }

    /// Composite Simpson weights (including the step).
    pub fn simpson_weights(&self) -> Vec<T> {
        let h3 = self.dt() / lit(3.0);
        (0..self.n_nodes())
            .map(|i| {
                if i == 0 || i == self.n_intervals {
                    h3
                } else if i % 2 == 1 {
                    h3 * lit(4.0)
                } else {
                    h3 * lit(2.0)
                }
            })
            .collect()
    }
}

fn check_count<T: Real>(grid: &QuadratureGrid<T>, n: usize) -> Result<()> {
    if n != grid.n_nodes() {
        return Err(Error::SampleCount {
            expected: grid.n_nodes(),
            actual: n,
        });
    }
    Ok(())
}

/// Composite Simpson integral of scalar samples.
pub fn simpson<T: Real>(grid: &QuadratureGrid<T>, samples: &[T]) -> Result<T> {
    check_count(grid, samples.len())?;
    let n = grid.n_intervals();
    let mut acc = samples[0] + samples[n];
    for (i, &y) in samples.iter().enumerate().take(n).skip(1) {
        acc = acc + if i % 2 == 1 { lit::<T>(4.0) * y } else { lit::<T>(2.0) * y };
    }
    Ok((grid.t1() - grid.t0()) * acc / (lit::<T>(3.0) * T::from_usize_lossy(n)))
}

/// Composite Simpson integral of vector-valued samples (one vector per node).
pub fn simpson_integrate<T: Real>(grid: &QuadratureGrid<T>, samples: &[Vec<T>]) -> Result<Vec<T>> {
    check_count(grid, samples.len())?;
    let dim = samples[0].len();
    let mut acc = vec![T::zero(); dim];
    for (w, y) in grid.simpson_weights().iter().zip(samples) {
        if y.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: y.len(),
            });
        }
        for (a, &v) in acc.iter_mut().zip(y) {
            *a = *a + *w * v;
        }
    }
    Ok(acc)
}

/// Composite Simpson on an arbitrary interval count: Simpson panels plus a
/// closing 3/8 panel when the count is odd. Used for the triangular cone
/// integrals whose row lengths vary.
pub fn simpson_any<T: Real>(h: T, samples: &[T]) -> T {
    let n = samples.len().saturating_sub(1);
    match n {
        0 => T::zero(),
        1 => h * (samples[0] + samples[1]) / lit(2.0),
        _ => {
            let (even, tail) = if n.is_multiple_of(2) { (n, 0) } else { (n - 3, 3) };
            let mut s = T::zero();
            for k in (0..even).step_by(2) {
                s = s + (samples[k] + lit::<T>(4.0) * samples[k + 1] + samples[k + 2]);
            }
            s = s * h / lit(3.0);
            if tail == 3 {
                let b = even;
                s = s + h * lit(3.0 / 8.0)
                    * (samples[b] + lit::<T>(3.0) * samples[b + 1] + lit::<T>(3.0) * samples[b + 2] + samples[b + 3]);
            }
            s
        }
    }
}

/// `∫_a^b x^k e^{-iθx} dx` for `k ∈ {0, 1, 2}` and `|a|, |b| ≤ 1`.
fn moment<T: Real>(k: usize, a: T, b: T, theta: T) -> Complex<T> {
    let c = Complex::new(T::zero(), -theta);
    if theta.abs() <= T::one() {
        // Power series; converges fast because |θx| ≤ 1.
        let mut sum = Complex::new(T::zero(), T::zero());
        let mut term = Complex::new(T::one(), T::zero());
        let (mut pa, mut pb) = (a.powi(k as i32 + 1), b.powi(k as i32 + 1));
        for j in 0..40 {
            let denom = T::from_usize_lossy(k + j + 1);
            sum = sum + term * ((pb - pa) / denom);
            term = term * c / T::from_usize_lossy(j + 1);
            pa = pa * a;
            pb = pb * b;
            if term.norm() < T::epsilon() * lit(1e-3) {
                break;
            }
        }
        sum
    } else {
        let anti = |x: T| -> Complex<T> {
            let e = (c * x).exp();
            let one = Complex::new(T::one(), T::zero());
            let poly = match k {
                0 => one / c,
                1 => one * x / c - one / (c * c),
                _ => one * (x * x) / c - one * (lit::<T>(2.0) * x) / (c * c) + one * lit::<T>(2.0) / (c * c * c),
            };
            e * poly
        };
        anti(b) - anti(a)
    }
}

/// Filon–Simpson weights for a fixed frequency and step: the integral of
/// `e^{-iωs}` against the quadratic interpolant of three equally spaced
/// samples, over the full panel and over its first half.
#[derive(Clone, Copy, Debug)]
pub struct FilonWeights<T> {
    omega: T,
    full: [Complex<T>; 3],
    half: [Complex<T>; 3],
}

impl<T: Real> FilonWeights<T> {
    pub fn new(omega: T, h: T) -> Self {
        let theta = omega * h;
        let lagrange = |a: T, b: T| -> [Complex<T>; 3] {
            let m0 = moment(0, a, b, theta);
            let m1 = moment(1, a, b, theta);
            let m2 = moment(2, a, b, theta);
            let two = lit::<T>(2.0);
            [
                (m2 - m1) / two * h,
                (m0 - m2) * h,
                (m2 + m1) / two * h,
            ]
        };
        Self {
            omega,
            full: lagrange(-T::one(), T::one()),
            half: lagrange(-T::one(), T::zero()),
        }
    }
}

/// `e^{-iωt_j}` for every node, by rotation with an exact resync every
/// 64 steps.
fn node_phases<T: Real>(grid: &QuadratureGrid<T>, omega: T) -> Vec<Complex<T>> {
    let n = grid.n_nodes();
    let step = {
        let a = omega * grid.dt();
        Complex::new(a.cos(), -a.sin())
    };
    let mut out = Vec::with_capacity(n);
    let mut cur = Complex::new(T::one(), T::zero());
    for j in 0..n {
        if j % 64 == 0 {
            let a = omega * grid.node(j);
            cur = Complex::new(a.cos(), -a.sin());
        }
        out.push(cur);
        cur = cur * step;
    }
    out
}

fn prefix_with_phases<T: Real>(
    grid: &QuadratureGrid<T>,
    weights: &FilonWeights<T>,
    phases: &[Complex<T>],
    samples: &[T],
) -> Result<Vec<Complex<T>>> {
    check_count(grid, samples.len())?;
    let n = grid.n_intervals();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n + 1];
    for p in 0..n / 2 {
        let i = 2 * p;
        let ph = phases[i + 1];
        let g = [samples[i], samples[i + 1], samples[i + 2]];
        let full = weights.full[0] * g[0] + weights.full[1] * g[1] + weights.full[2] * g[2];
        let half = weights.half[0] * g[0] + weights.half[1] * g[1] + weights.half[2] * g[2];
        out[i + 1] = out[i] + ph * half;
        out[i + 2] = out[i] + ph * full;
    }
    Ok(out)
}

/// Prefix integrals `A_j = ∫_{t_0}^{t_j} e^{-iωs} g(s) ds` at every node.
pub fn oscillatory_prefix<T: Real>(
    grid: &QuadratureGrid<T>,
    weights: &FilonWeights<T>,
    samples: &[T],
) -> Result<Vec<Complex<T>>> {
    prefix_with_phases(grid, weights, &node_phases(grid, weights.omega), samples)
}

/// Calls `emit(j, C_j)` with `C_j = ∫_{t_0}^{t_j} e^{iω(t_j − s)} g(s) ds`
/// for every node in order: the real part is the cosine convolution, the
/// imaginary part the sine convolution. Single pass, no scratch storage.
fn for_each_exp_convolution<T: Real>(
    grid: &QuadratureGrid<T>,
    weights: &FilonWeights<T>,
    samples: &[T],
    mut emit: impl FnMut(usize, Complex<T>),
) -> Result<()> {
    check_count(grid, samples.len())?;
    let omega = weights.omega;
    let exact = |j: usize| {
        let a = omega * grid.node(j);
        Complex::new(a.cos(), -a.sin())
    };
    let step = {
        let a = omega * grid.dt();
        Complex::new(a.cos(), -a.sin())
    };
    let zero = Complex::new(T::zero(), T::zero());
    let (wf, wh) = (weights.full, weights.half);
    let mut acc = zero;
    let mut ph0 = exact(0);
    emit(0, zero);
    for p in 0..grid.n_intervals() / 2 {
        let i = 2 * p;
        if i % 64 == 0 {
            ph0 = exact(i);
        }
        let ph1 = ph0 * step;
        let ph2 = ph1 * step;
        let g = [samples[i], samples[i + 1], samples[i + 2]];
        let full = wf[0] * g[0] + wf[1] * g[1] + wf[2] * g[2];
        let half = wh[0] * g[0] + wh[1] * g[1] + wh[2] * g[2];
        let mid = acc + ph1 * half;
        acc = acc + ph1 * full;
        emit(i + 1, ph1.conj() * mid);
        emit(i + 2, ph2.conj() * acc);
        ph0 = ph2;
    }
    Ok(())
}

/// `∫_{t_0}^{t_j} e^{iω(t_j − s)} g(s) ds` at every node: the real part is
/// the cosine convolution, the imaginary part the sine convolution.
pub fn exp_convolution<T: Real>(
    grid: &QuadratureGrid<T>,
    weights: &FilonWeights<T>,
    samples: &[T],
) -> Result<Vec<Complex<T>>> {
    let mut out = Vec::with_capacity(grid.n_nodes());
    for_each_exp_convolution(grid, weights, samples, |_, c| out.push(c))?;
    Ok(out)
}

/// `Σ_j out[j] += c · ∫_{t_0}^{t_j} sin(ω(t_j − s)) g(s) ds`
pub fn add_sine_convolution<T: Real>(
    grid: &QuadratureGrid<T>,
    weights: &FilonWeights<T>,
    samples: &[T],
    c: T,
    out: &mut [T],
) -> Result<()> {
    for_each_exp_convolution(grid, weights, samples, |j, v| out[j] = out[j] + c * v.im)
}

/// `Σ_j out[j] += c · ∫_{t_0}^{t_j} cos(ω(t_j − s)) g(s) ds`
pub fn add_cosine_convolution<T: Real>(
    grid: &QuadratureGrid<T>,
    weights: &FilonWeights<T>,
    samples: &[T],
    c: T,
    out: &mut [T],
) -> Result<()> {
    for_each_exp_convolution(grid, weights, samples, |j, v| out[j] = out[j] + c * v.re)
}

/// `∫_{t_0}^{t_j} sin(ω(t_j − s)) g(s) ds` at every node.
pub fn sine_convolution<T: Real>(
    grid: &QuadratureGrid<T>,
    weights: &FilonWeights<T>,
    samples: &[T],
) -> Result<Vec<T>> {
    Ok(exp_convolution(grid, weights, samples)?.into_iter().map(|c| c.im).collect())
}

/// `∫_{t_0}^{t_j} cos(ω(t_j − s)) g(s) ds` at every node.
pub fn cosine_convolution<T: Real>(
    grid: &QuadratureGrid<T>,
    weights: &FilonWeights<T>,
    samples: &[T],
) -> Result<Vec<T>> {
    Ok(exp_convolution(grid, weights, samples)?.into_iter().map(|c| c.re).collect())
}

/// Simpson prefix integrals `∫_{t_0}^{t_j} g` consistent with the Filon
/// weights at `ω = 0`.
pub fn simpson_prefix<T: Real>(grid: &QuadratureGrid<T>, samples: &[T]) -> Result<Vec<T>> {
    let w = FilonWeights::new(T::zero(), grid.dt());
    Ok(oscillatory_prefix(grid, &w, samples)?.into_iter().map(|c| c.re).collect())
}

pub(crate) const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
pub(crate) const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Composite four-point Gauss–Legendre rule on `panels` equal panels.
/// Exact for polynomials up to degree 7.
pub fn gauss_legendre<T: Real>(a: T, b: T, panels: usize, f: impl Fn(T) -> T) -> T {
    let h = (b - a) / T::from_usize_lossy(panels.max(1));
    let half = h / lit(2.0);
    let mut total = T::zero();
    for p in 0..panels.max(1) {
        let mid = a + (T::from_usize_lossy(p) + lit(0.5)) * h;
        for (x, w) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
            total = total + lit::<T>(w) * f(mid + lit::<T>(*x) * half);
        }
    }
    total * half
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(t1: f64, n: usize) -> QuadratureGrid<f64> {
        QuadratureGrid::new(0.0, t1, n).unwrap()
    }

    #[test]
    fn constant_is_exact() {
        let g = grid(1.0, 10);
        assert_eq!(simpson(&g, &[1.0; 11]).unwrap(), 1.0);
    }

    #[test]
    fn cubic_is_exact() {
        let g = grid(1.0, 10);
        let s: Vec<f64> = g.nodes().iter().map(|t| t.powi(3)).collect();
        assert!((simpson(&g, &s).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn sine_half_wave() {
        // ∫₀¹ sin(πt) dt = 2/π; the composite error is 5.28e-6 at 16
        // intervals and 3.29e-7 at 32.
        let err = |n| {
            let g = grid(1.0, n);
            let s: Vec<f64> = g.nodes().iter().map(|t| (PI * t).sin()).collect();
            simpson(&g, &s).unwrap() - 2.0 / PI
        };
        assert!((err(16) - 5.281094580e-6).abs() < 1e-13);
        assert!(err(32).abs() < 1e-6);
    }

    #[test]
    fn odd_interval_count_rejected() {
        assert_eq!(QuadratureGrid::new(0.0, 1.0, 5), Err(Error::OddIntervals(5)));
    }

    #[test]
    fn sample_count_checked() {
        let g = grid(1.0, 4);
        assert!(simpson(&g, &[1.0; 4]).is_err());
    }

    #[test]
    fn vector_valued() {
        let g = grid(1.0, 8);
        let s: Vec<Vec<f64>> = g.nodes().iter().map(|&t| vec![1.0, t, t * t]).collect();
        let v = simpson_integrate(&g, &s).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15);
        assert!((v[1] - 0.5).abs() < 1e-15);
        assert!((v[2] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn quartic_convergence_order() {
        let f = |t: f64| (3.0 * t).exp() * t.cos();
        // ∫₀¹ e^{3t} cos t dt
        let exact = ((3.0f64).exp() * (3.0 * 1.0f64.cos() + 1.0f64.sin()) - 3.0) / 10.0;
        let err = |n: usize| {
            let g = grid(1.0, n);
            let s: Vec<f64> = g.nodes().iter().map(|&t| f(t)).collect();
            (simpson(&g, &s).unwrap() - exact).abs()
        };
        let ratio = err(16) / err(32);
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn simpson_any_handles_odd_counts() {
        let h = 0.1;
        let s: Vec<f64> = (0..8).map(|i| (i as f64 * h).powi(3)).collect();
        // ∫₀^0.7 t³ = 0.7⁴/4, exact for both rules
        assert!((simpson_any(h, &s) - 0.7f64.powi(4) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn filon_matches_closed_form_at_high_frequency() {
        // ∫₀ᵗ sin(ω(t−s)) s² ds = t²/ω − 2/ω³ + 2cos(ωt)/ω³
        let g = grid(0.4, 400);
        for &omega in &[0.0, 3.0, 300.0, 3217.0] {
            let w = FilonWeights::new(omega, g.dt());
            let samples: Vec<f64> = g.nodes().iter().map(|s| s * s).collect();
            let conv = sine_convolution(&g, &w, &samples).unwrap();
            for (j, &t) in g.nodes().iter().enumerate() {
                let exact = if omega == 0.0 {
                    0.0
                } else {
                    t * t / omega - 2.0 / omega.powi(3) + 2.0 * (omega * t).cos() / omega.powi(3)
                };
                assert!((conv[j] - exact).abs() < 1e-13, "ω={omega} j={j}");
            }
        }
    }

    #[test]
    fn filon_cosine_closed_form() {
        // ∫₀ᵗ cos(ω(t−s)) ds = sin(ωt)/ω
        let g = grid(1.0, 100);
        let w = FilonWeights::new(50.0, g.dt());
        let conv = cosine_convolution(&g, &w, &vec![1.0; 101]).unwrap();
        for (j, &t) in g.nodes().iter().enumerate() {
            assert!((conv[j] - (50.0 * t).sin() / 50.0).abs() < 1e-14);
        }
    }

    #[test]
    fn simpson_prefix_agrees_with_simpson() {
        let g = grid(2.0, 20);
        let s: Vec<f64> = g.nodes().iter().map(|t| t.sin()).collect();
        let p = simpson_prefix(&g, &s).unwrap();
        assert!((p[20] - simpson(&g, &s).unwrap()).abs() < 1e-15);
    }
}
