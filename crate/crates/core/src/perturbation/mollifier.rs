//! Tabulated CDF and ramp of the standard mollifier on (−1, 1).
//!
//! η(t) = exp(−1/(1−t²))/Z, Φ(u) = ∫_{−1}^u η and R(u) = ∫_{−1}^u Φ.
//! Convolving the piecewise-linear profile with the rescaled mollifier only
//! needs these two functions.

use crate::scalar::Real;

/// Default number of quadrature intervals.
pub const DEFAULT_NODES: usize = 4096;

pub(crate) fn eta_unnormalized<S: Real>(t: S) -> S {
    let one_minus = (S::one() - t) * (S::one() + t);
    if one_minus <= S::zero() {
        S::zero()
    } else {
        (-one_minus.recip()).exp()
    }
}

/// Gauss–Legendre rule on [−1, 1], nodes found by Newton's method in `S`.
#[derive(Clone, Debug)]
pub struct GaussRule<S> {
    nodes: Vec<S>,
    weights: Vec<S>,
}

impl<S: Real> GaussRule<S> {
    pub fn new(n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nn = S::from_usize(n).unwrap();
        for i in 0..n {
            let guess = (S::PI() * (S::from_usize(i).unwrap() + S::lit(0.75)) / (nn + S::lit(0.5))).cos();
            let mut x = guess;
            let mut dp = S::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x = x - step;
                if step.abs() <= S::epsilon() * S::lit(4.0) {
                    dp = legendre(n, x).1;
                    break;
                }
            }
            nodes.push(x);
            weights.push(S::lit(2.0) / ((S::one() - x * x) * dp * dp));
        }
        GaussRule { nodes, weights }
    }

    /// Fixed-order estimate of ∫_a^b f.
    pub fn apply(&self, f: &impl Fn(S) -> S, a: S, b: S) -> S {
        let half = (b - a) / S::lit(2.0);
        let mid = (a + b) / S::lit(2.0);
        let sum = self
            .nodes
            .iter()
            .zip(&self.weights)
            .fold(S::zero(), |acc, (x, w)| acc + *w * f(mid + half * *x));
        sum * half
    }

    /// Adaptive bisection until halves agree with the whole to `tol`.
    pub fn integrate(&self, f: impl Fn(S) -> S, a: S, b: S, tol: S) -> S {
        if b <= a {
            return S::zero();
        }
        let whole = self.apply(&f, a, b);
        self.refine(&f, a, b, whole, tol, 24)
    }

    fn refine(&self, f: &impl Fn(S) -> S, a: S, b: S, whole: S, tol: S, depth: u32) -> S {
        let m = (a + b) / S::lit(2.0);
        let (l, r) = (self.apply(f, a, m), self.apply(f, m, b));
        let diff = (l + r - whole).abs();
        if depth == 0 || diff <= tol || diff <= S::epsilon() * S::lit(8.0) * (l.abs() + r.abs()) {
            return l + r;
        }
        let half = tol / S::lit(2.0);
        self.refine(f, a, m, l, half, depth - 1) + self.refine(f, m, b, r, half, depth - 1)
    }
}

fn legendre<S: Real>(n: usize, x: S) -> (S, S) {
    let (mut p0, mut p1) = (S::one(), x);
    for j in 2..=n {
        let jj = S::from_usize(j).unwrap();
        let p2 = ((jj + jj - S::one()) * x * p1 - (jj - S::one()) * p0) / jj;
        p0 = p1;
        p1 = p2;
    }
    let nn = S::from_usize(n).unwrap();
    let d = nn * (x * p1 - p0) / (x * x - S::one());
    (p1, d)
}

/// Order of the Gauss rule used for the tables.
pub const GAUSS_ORDER: usize = 10;

#[derive(Clone, Debug)]
pub struct MollifierTable<S> {
    n: usize,
    h: S,
    z: S,
    cdf: Vec<S>,
    cdf_slope: Vec<S>,
    ramp: Vec<S>,
    rule: GaussRule<S>,
}

impl<S: Real> MollifierTable<S> {
    /// Tabulates Φ and R on `n + 1` equally spaced nodes of [−1, 1].
    pub fn new(n: usize) -> Self {
        assert!(n >= 8 && n.is_multiple_of(2), "node count must be even and at least 8");
        let nn = S::from_usize(n).unwrap();
        let h = S::lit(2.0) / nn;
        let node = |i: usize| -S::one() + S::from_usize(2 * i).unwrap() / nn;
        let rule = GaussRule::new(GAUSS_ORDER);
        let tol = S::epsilon() * h * S::lit(1e-3);
        let mut cdf_raw = vec![S::zero(); n + 1];
        let mut ramp_raw = vec![S::zero(); n + 1];
        for i in 1..=n {
            let (t0, t1) = (node(i - 1), node(i));
            let m0 = rule.integrate(eta_unnormalized, t0, t1, tol);
            let m1 = rule.integrate(|t| (t1 - t) * eta_unnormalized(t), t0, t1, tol * h);
            cdf_raw[i] = cdf_raw[i - 1] + m0;
            ramp_raw[i] = ramp_raw[i - 1] + h * cdf_raw[i - 1] + m1;
        }
        let z = cdf_raw[n];
        // Mirror the accurate lower half so tiny tail values survive and the
        // symmetries Φ(−u) = 1 − Φ(u), R(u) − R(−u) = u hold at the nodes.
        let mut cdf = vec![S::zero(); n + 1];
        let mut ramp = vec![S::zero(); n + 1];
        for i in 0..=n / 2 {
            cdf[i] = cdf_raw[i] / z;
            ramp[i] = ramp_raw[i] / z;
        }
        cdf[n / 2] = S::lit(0.5);
        for i in n / 2 + 1..=n {
            cdf[i] = S::one() - cdf[n - i];
            ramp[i] = node(i) + ramp[n - i];
        }
        let mut cdf_slope: Vec<S> = (0..=n).map(|i| eta_unnormalized(node(i)) / z).collect();
        // Fritsch–Carlson limiter keeps the interpolant monotone.
        for i in 0..n {
            let secant = (cdf[i + 1] - cdf[i]) / h;
            if secant <= S::zero() {
                cdf_slope[i] = S::zero();
                cdf_slope[i + 1] = S::zero();
                continue;
            }
            let (al, be) = (cdf_slope[i] / secant, cdf_slope[i + 1] / secant);
            let r2 = al * al + be * be;
            if r2 > S::lit(9.0) {
                let tau = S::lit(3.0) / r2.sqrt();
                cdf_slope[i] = tau * al * secant;
                cdf_slope[i + 1] = tau * be * secant;
            }
        }
        MollifierTable {
            n,
            h,
            z,
            cdf,
            cdf_slope,
            ramp,
            rule,
        }
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    /// Normalising constant Z = ∫ exp(−1/(1−t²)) dt.
    pub fn normalizer(&self) -> S {
        self.z
    }

    pub fn cdf_values(&self) -> &[S] {
        &self.cdf
    }

    pub fn ramp_values(&self) -> &[S] {
        &self.ramp
    }

    fn locate(&self, u: S) -> (usize, S) {
        let pos = (u + S::one()) / self.h;
        let i = pos.floor().to_usize().unwrap_or(0).min(self.n - 1);
        let t = pos - S::from_usize(i).unwrap();
        (i, t)
    }

    fn in_tail(&self, u: S) -> bool {
        u.abs() > S::one() - self.h
    }

    fn tail_tol(&self) -> S {
        S::epsilon() * S::lit(1e-6)
    }

    /// Φ(u).
    pub fn cdf(&self, u: S) -> S {
        if u <= -S::one() {
            return S::zero();
        }
        if u >= S::one() {
            return S::one();
        }
        if self.in_tail(u) {
            if u > S::zero() {
                return S::one() - self.cdf(-u);
            }
            return self.rule.integrate(eta_unnormalized, -S::one(), u, self.tail_tol()) / self.z;
        }
        let (i, t) = self.locate(u);
        hermite(
            t,
            self.h,
            self.cdf[i],
            self.cdf[i + 1],
            self.cdf_slope[i],
            self.cdf_slope[i + 1],
        )
    }

    /// R(u) = ∫_{−1}^u Φ; equals u for u ≥ 1.
    pub fn ramp(&self, u: S) -> S {
        if u <= -S::one() {
            return S::zero();
        }
        if u >= S::one() {
            return u;
        }
        if self.in_tail(u) {
            if u > S::zero() {
                return u + self.ramp(-u);
            }
            let f = |t: S| (u - t) * eta_unnormalized(t);
            return self.rule.integrate(f, -S::one(), u, self.tail_tol()) / self.z;
        }
        let (i, t) = self.locate(u);
        hermite(
            t,
            self.h,
            self.ramp[i],
            self.ramp[i + 1],
            self.cdf[i],
            self.cdf[i + 1],
        )
    }
}

fn hermite<S: Real>(t: S, h: S, y0: S, y1: S, m0: S, m1: S) -> S {
    let (two, three) = (S::lit(2.0), S::lit(3.0));
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = two * t3 - three * t2 + S::one();
    let h10 = t3 - two * t2 + t;
    let h01 = three * t2 - two * t3;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
}
