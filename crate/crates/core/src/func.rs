//! Closed-form smooth scalar functions of one real variable with exact
//! derivatives of any order. They serve both as time profiles (controls,
//! sources) and as spatial profiles on the interval.

use crate::scalar::{lit, Real};

#[derive(Clone, Debug, PartialEq)]
pub enum SmoothFn<T> {
    Zero,
    Const(T),
    /// `Σ c_k x^k`
    Poly(Vec<T>),
    /// `exp(-width / (x - start))` for `x > start`, zero otherwise. With
    /// `rising = false` the mirror image `exp(-width / (start - x))` for
    /// `x < start`.
    Ramp { start: T, width: T, rising: bool },
    /// `sin(ω x + φ)`
    Sin { omega: T, phase: T },
    /// `exp(-(x - c)² / (2 w²))`
    Gaussian { center: T, width: T },
    /// `f(x - τ)` for `x > τ`, zero otherwise.
    Delay(Box<SmoothFn<T>>, T),
    Scaled(T, Box<SmoothFn<T>>),
    Sum(Vec<SmoothFn<T>>),
    Product(Vec<SmoothFn<T>>),
    Derivative(Box<SmoothFn<T>>, usize),
    /// `((x − a)(b − x))^power` on `[a, b]`, zero outside. Only
    /// `C^{power−1}`, which makes it useful where finite smoothness should
    /// show up under refinement.
    PolyWindow { a: T, b: T, power: usize },
}

impl<T: Real> SmoothFn<T> {
    /// C^∞ bump supported on `[a, b]` with unit value at the midpoint.
    pub fn bump(a: T, b: T) -> Self {
        let width = (b - a) / lit(2.0);
        let raw = Self::Product(vec![
            Self::Ramp { start: a, width, rising: true },
            Self::Ramp { start: b, width, rising: false },
        ]);
        let peak = raw.value((a + b) / lit(2.0));
        Self::Scaled(T::one() / peak, Box::new(raw))
    }

    /// C^∞ cutoff: zero for `x <= start`, rising to one at `start + len` and
    /// equal to one beyond. Built from the standard ratio of ramps, not a
    /// product, so it is exactly one past the transition.
    pub fn smooth_step(start: T, len: T) -> SmoothStep<T> {
        SmoothStep { start, len }
    }

    /// `exp(-δ/(t - t0))` times a trigonometric polynomial: the standard
    /// class-M control profile.
    pub fn ramp_trig(onset: T, width: T, terms: &[(T, T, T)]) -> Self {
        let trig = Self::Sum(
            terms
                .iter()
                .map(|&(amp, omega, phase)| Self::Scaled(amp, Box::new(Self::Sin { omega, phase })))
                .collect(),
        );
        Self::Product(vec![
            Self::Ramp { start: onset, width, rising: true },
            trig,
        ])
    }

    pub fn scaled(self, c: T) -> Self {
        Self::Scaled(c, Box::new(self))
    }

    pub fn delayed(self, tau: T) -> Self {
        Self::Delay(Box::new(self), tau)
    }

    pub fn derivative(self, order: usize) -> Self {
        if order == 0 {
            self
        } else {
            Self::Derivative(Box::new(self), order)
        }
    }

    pub fn value(&self, x: T) -> T {
        self.eval(x, 0)
    }

    pub fn eval(&self, x: T, order: usize) -> T {
        self.derivs(x, order)[order]
    }

    /// Values of `f, f', …, f^{(order)}` at `x`.
    pub fn derivs(&self, x: T, order: usize) -> Vec<T> {
        let mut out = vec![T::zero(); order + 1];
        self.add_derivs(x, T::one(), &mut out);
        out
    }

    /// `out[k] += c · f^{(k)}(x)` for `k < out.len()`.
    fn add_derivs(&self, x: T, c: T, out: &mut [T]) {
        let order = out.len() - 1;
        match self {
            Self::Zero => {}
            Self::Const(v) => out[0] = out[0] + c * *v,
            Self::Poly(p) => add_scaled(out, c, &poly_derivs(p, x, order)),
            Self::Ramp { start, width, rising } => {
                let s = if *rising { x - *start } else { *start - x };
                if s <= T::zero() {
                    return;
                }
                let d = ramp_derivs(s, *width, order);
                for (k, (o, v)) in out.iter_mut().zip(d).enumerate() {
                    let v = if !*rising && k % 2 == 1 { -v } else { v };
                    *o = *o + c * v;
                }
            }
            Self::Sin { omega, phase } => {
                let (s, co) = (*omega * x + *phase).sin_cos();
                let mut w = c;
                for (k, o) in out.iter_mut().enumerate() {
                    let v = match k % 4 {
                        0 => s,
                        1 => co,
                        2 => -s,
                        _ => -co,
                    };
                    *o = *o + w * v;
                    w = w * *omega;
                }
            }
            Self::Gaussian { center, width } => {
                let u = (x - *center) / *width;
                let g = (-u * u / lit(2.0)).exp();
                // d^k/dx^k = (-1)^k He_k(u) g / w^k
                let mut he = [T::one(), u];
                let mut wk = T::one();
                for (k, o) in out.iter_mut().enumerate() {
                    let sign = if k % 2 == 0 { T::one() } else { -T::one() };
                    *o = *o + c * sign * he[0] * g / wk;
                    wk = wk * *width;
                    let next = u * he[1] - T::from_usize_lossy(k + 1) * he[0];
                    he = [he[1], next];
                }
            }
            Self::Delay(f, tau) => {
                if x > *tau {
                    f.add_derivs(x - *tau, c, out);
                }
            }
            Self::Scaled(k, f) => f.add_derivs(x, c * *k, out),
            Self::Sum(fs) => fs.iter().for_each(|f| f.add_derivs(x, c, out)),
            Self::Product(fs) => {
                let mut acc = vec![T::zero(); order + 1];
                acc[0] = T::one();
                for f in fs {
                    let d = f.derivs(x, order);
                    if d.iter().all(|v| *v == T::zero()) {
                        return;
                    }
                    acc = leibniz(&acc, &d);
                }
                add_scaled(out, c, &acc);
            }
            Self::Derivative(f, m) => add_scaled(out, c, &f.derivs(x, order + m)[*m..]),
            Self::PolyWindow { a, b, power } => {
                if x <= *a || x >= *b {
                    return;
                }
                add_scaled(out, c, &poly_derivs(&window_coeffs(*a, *b, *power), x, order));
            }
        }
    }

    /// Largest `δ` such that the function vanishes identically on `(-∞, δ]`,
    /// when such a point exists.
    pub fn onset(&self) -> Option<T> {
        match self {
            Self::Zero => Some(T::infinity()),
            Self::Const(c) => (*c == T::zero()).then(T::infinity),
            Self::Poly(c) => c.iter().all(|v| *v == T::zero()).then(T::infinity),
            Self::Ramp { start, rising, .. } => rising.then_some(*start),
            Self::Sin { .. } | Self::Gaussian { .. } => None,
            Self::PolyWindow { a, .. } => Some(*a),
            Self::Delay(f, tau) => Some(match f.onset() {
                Some(d) if d > T::zero() => *tau + d,
                _ => *tau,
            }),
            Self::Scaled(c, f) => {
                if *c == T::zero() {
                    Some(T::infinity())
                } else {
                    f.onset()
                }
            }
            Self::Derivative(f, _) => f.onset(),
            Self::Sum(fs) => fs
                .iter()
                .map(SmoothFn::onset)
                .try_fold(T::infinity(), |m, o| o.map(|o| m.min(o))),
            Self::Product(fs) => fs.iter().filter_map(SmoothFn::onset).reduce(T::max),
        }
    }

    /// Class M: vanishes identically on some `[0, δ]` with `δ > 0`.
    pub fn is_class_m(&self) -> bool {
        self.onset().is_some_and(|d| d > T::zero())
    }
}

fn poly_derivs<T: Real>(c: &[T], x: T, order: usize) -> Vec<T> {
    let mut coeffs = c.to_vec();
    let mut out = Vec::with_capacity(order + 1);
    for _ in 0..=order {
        out.push(coeffs.iter().rev().fold(T::zero(), |acc, &a| acc * x + a));
        coeffs = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &a)| a * T::from_usize_lossy(k))
            .collect();
    }
    out
}

/// Derivatives of `exp(-w/s)` for `s > 0` (zero for `s <= 0`). With `u = 1/s`,
/// `d^m/ds^m = exp(-w u) p_m(u)` where `p_{m+1}(u) = u² (w p_m(u) − p_m'(u))`.
fn ramp_derivs<T: Real>(s: T, w: T, order: usize) -> Vec<T> {
    let mut out = vec![T::zero(); order + 1];
    if s <= T::zero() || w / s > lit(700.0) {
        return out;
    }
    let u = T::one() / s;
    let e = (-w * u).exp();
    let cap = 2 * order + 3;
    let mut p = vec![T::zero(); cap];
    let mut next = vec![T::zero(); cap];
    p[0] = T::one();
    let mut len = 1;
    for slot in out.iter_mut() {
        let pv = p[..len].iter().rev().fold(T::zero(), |acc, &a| acc * u + a);
        *slot = e * pv;
        next[..len + 2].iter_mut().for_each(|v| *v = T::zero());
        for (k, &a) in p[..len].iter().enumerate() {
            next[k + 2] = next[k + 2] + w * a;
            if k >= 1 {
                next[k + 1] = next[k + 1] - a * T::from_usize_lossy(k);
            }
        }
        std::mem::swap(&mut p, &mut next);
        len += 2;
    }
    out
}

/// Coefficients of `((x − a)(b − x))^p`.
fn window_coeffs<T: Real>(a: T, b: T, p: usize) -> Vec<T> {
    // (x − a)(b − x) = −ab + (a + b)x − x²
    let base = [-a * b, a + b, -T::one()];
    let mut c = vec![T::one()];
    for _ in 0..p {
        let mut next = vec![T::zero(); c.len() + 2];
        for (i, &ci) in c.iter().enumerate() {
            for (j, &bj) in base.iter().enumerate() {
                next[i + j] = next[i + j] + ci * bj;
            }
        }
        c = next;
    }
    c
}

fn add_scaled<T: Real>(out: &mut [T], c: T, v: &[T]) {
    for (o, &x) in out.iter_mut().zip(v) {
        *o = *o + c * x;
    }
}

fn leibniz<T: Real>(f: &[T], g: &[T]) -> Vec<T> {
    let n = f.len();
    let mut out = vec![T::zero(); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut binom = T::one();
        for j in 0..=k {
            *slot = *slot + binom * f[j] * g[k - j];
            binom = binom * T::from_usize_lossy(k - j) / T::from_usize_lossy(j + 1);
        }
    }
    out
}

/// C^∞ step `ρ(s)/(ρ(s)+ρ(1−s))`, `s = (x − start)/len`, `ρ(s) = exp(−1/s)`.
/// Only value and first two derivatives are provided; that is all the
/// spatial operators need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothStep<T> {
    pub start: T,
    pub len: T,
}

impl<T: Real> SmoothStep<T> {
    pub fn derivs2(&self, x: T) -> [T; 3] {
        let s = (x - self.start) / self.len;
        if s <= T::zero() {
            return [T::zero(); 3];
        }
        if s >= T::one() {
            return [T::one(), T::zero(), T::zero()];
        }
        let a = ramp_derivs(s, T::one(), 2);
        let b0 = ramp_derivs(T::one() - s, T::one(), 2);
        let b = [b0[0], -b0[1], b0[2]];
        let d = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
        let q0 = a[0] / d[0];
        let q1 = (a[1] - q0 * d[1]) / d[0];
        let q2 = (a[2] - lit::<T>(2.0) * q1 * d[1] - q0 * d[2]) / d[0];
        let l = self.len;
        [q0, q1 / l, q2 / (l * l)]
    }
}
