//! Gauss-Legendre rules and a globally adaptive composite integrator.
//!
//! The adaptive driver keeps a heap of panels ordered by their error
//! estimate and bisects the worst one until the summed error drops below
//! `rel_tol * |integral|`. Each panel's error is the difference between the
//! whole-panel rule and the sum of the rule applied to its two halves.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values an integrand may return.
pub trait Integrand: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// An n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n from Chebyshev initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over [a, b]. Also returns the integral of |f|.
    pub fn integrate<T, F>(&self, a: f64, b: f64, f: &F) -> (T, f64)
    where
        T: Integrand,
        F: Fn(f64) -> T + ?Sized,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::default();
        let mut abs = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            acc = acc + v * w;
            abs += v.magnitude() * w;
        }
        (acc * half, abs * half.abs())
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Controls for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub initial_panels: usize,
    pub max_panels: usize,
    pub rel_tol: f64,
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    /// Integral of |f|, used as the roundoff scale.
    pub l1: f64,
    /// Leaf panels at termination.
    pub panels: usize,
}

// Errors below this fraction of the integral of |f| cannot be resolved in f64.
const ROUNDOFF_FLOOR: f64 = 64.0 * f64::EPSILON;

struct Panel<T> {
    a: f64,
    b: f64,
    left: T,
    right: T,
    l1: f64,
    error: f64,
}

impl<T> Panel<T> {
    fn value(&self) -> T
    where
        T: Integrand,
    {
        self.left + self.right
    }
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl<T> Eq for Panel<T> {}

impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn make_panel<T, F>(rule: &GaussLegendre, a: f64, b: f64, whole: T, f: &F) -> Panel<T>
where
    T: Integrand,
    F: Fn(f64) -> T + ?Sized,
{
    let m = 0.5 * (a + b);
    let (left, l1_left) = rule.integrate(a, m, f);
    let (right, l1_right) = rule.integrate(m, b, f);
    let error = (whole - (left + right)).magnitude();
    Panel {
        a,
        b,
        left,
        right,
        l1: l1_left + l1_right,
        error,
    }
}

/// Integrates `f` over [a, b] with a composite rule, bisecting the panel
/// with the largest error estimate until the total error is below
/// `rel_tol * |value|` (floored at roundoff relative to the integral of |f|).
pub fn integrate_adaptive<T, F>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
    what: &'static str,
    f: &F,
) -> Result<Integral<T>>
where
    T: Integrand,
    F: Fn(f64) -> T + ?Sized,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!("integration limits must be finite: [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral {
            value: T::default(),
            error: 0.0,
            l1: 0.0,
            panels: 0,
        });
    }
    let n0 = opts.initial_panels.max(1);
    if n0 > opts.max_panels {
        return Err(Error::NonConvergence {
            what,
            panels: n0,
            error: f64::INFINITY,
        });
    }
    let mut heap = BinaryHeap::with_capacity(opts.max_panels.max(n0) + 1);
    let h = (b - a) / n0 as f64;
    for i in 0..n0 {
        let lo = a + h * i as f64;
        let hi = if i + 1 == n0 { b } else { a + h * (i + 1) as f64 };
        let (whole, _) = rule.integrate(lo, hi, f);
        heap.push(make_panel(rule, lo, hi, whole, f));
    }

    let totals = |heap: &BinaryHeap<Panel<T>>| {
        let mut value = T::default();
        let mut error = 0.0;
        let mut l1 = 0.0;
        for p in heap.iter() {
            value = value + p.value();
            error += p.error;
            l1 += p.l1;
        }
        (value, error, l1)
    };
    let (mut value, mut error, mut l1) = totals(&heap);
    let mut since_resum = 0usize;
    loop {
        let tol = (opts.rel_tol * value.magnitude()).max(ROUNDOFF_FLOOR * l1);
        if error <= tol {
            // running sums drift; confirm with an exact pass
            (value, error, l1) = totals(&heap);
            since_resum = 0;
            let tol = (opts.rel_tol * value.magnitude()).max(ROUNDOFF_FLOOR * l1);
            if error <= tol {
                return Ok(Integral {
                    value,
                    error,
                    l1,
                    panels: heap.len(),
                });
            }
        }
        if heap.len() + 1 > opts.max_panels {
            return Err(Error::NonConvergence {
                what,
                panels: heap.len(),
                error,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        value = value - worst.value();
        error -= worst.error;
        l1 -= worst.l1;
        let m = 0.5 * (worst.a + worst.b);
        let children = if m <= worst.a || m >= worst.b {
            // panel can no longer be split in f64; freeze it
            [Some(Panel { error: 0.0, ..worst }), None]
        } else {
            [
                Some(make_panel(rule, worst.a, m, worst.left, f)),
                Some(make_panel(rule, m, worst.b, worst.right, f)),
            ]
        };
        for c in children.into_iter().flatten() {
            value = value + c.value();
            error += c.error;
            l1 += c.l1;
            heap.push(c);
        }
        since_resum += 1;
        if since_resum >= 256 {
            (value, error, l1) = totals(&heap);
            since_resum = 0;
        }
    }
}
