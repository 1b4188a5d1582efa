//! Deformation coefficients, local gap thresholds and Knabe weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{plaquette_set, ring_index, Plaquette};

const SQRT6: f64 = 2.449_489_742_783_178;

/// Coefficients `c_0, ..., c_{n-2}` of the deformed 1D subchain operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deformation1D {
    pub n: usize,
    pub x: f64,
    pub c: Vec<f64>,
}

impl Deformation1D {
    /// Arbitrary positive coefficients; `c.len()` must be `n - 1`.
    pub fn from_coefficients(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() || c.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument("coefficients must be positive".into()));
        }
        Ok(Deformation1D { n: c.len() + 1, x: f64::NAN, c })
    }

    pub fn sum(&self) -> f64 {
        self.c.iter().sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    /// `Σ_j c_j c_{j+1}`.
    pub fn sum_adjacent(&self) -> f64 {
        self.c.windows(2).map(|w| w[0] * w[1]).sum()
    }

    pub fn satisfies_assumption(&self) -> bool {
        assumption_c(&self.c)
    }

    /// `α = 1 / Σ c_j c_{j+1}`.
    pub fn alpha(&self) -> f64 {
        1.0 / self.sum_adjacent()
    }

    /// `β = α (Σ c_j² - Σ c_j c_{j+1})`.
    pub fn beta(&self) -> f64 {
        self.alpha() * (self.sum_sq() - self.sum_adjacent())
    }
}

/// Monotone up to the midpoint and symmetric about it.
pub fn assumption_c(c: &[f64]) -> bool {
    let len = c.len();
    if len == 0 {
        return false;
    }
    let scale = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-12 * scale;
    let n = len + 1;
    let monotone = (1..=(n - 2) / 2).all(|j| c[j] >= c[j - 1] - tol);
    let symmetric = (0..len).all(|j| (c[j] - c[len - 1 - j]).abs() <= tol);
    monotone && symmetric
}

pub fn coeffs_1d(n: usize, x: f64) -> Result<Deformation1D> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("deformation needs n >= 3, got {n}")));
    }
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("deformation parameter must be positive, got {x}")));
    }
    if n == 3 {
        return Ok(Deformation1D { n, x, c: vec![1.0, 1.0] });
    }
    let nf = n as f64;
    let c = (0..=n - 2)
        .map(|j| {
            let j = j as f64;
            nf.powf(1.5) + x * ((nf - 2.0) * j - j * j)
        })
        .collect();
    Ok(Deformation1D { n, x, c })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalX {
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub phi: f64,
}

pub fn optimal_x(n: usize) -> Result<OptimalX> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("optimal x_n needs n >= 4, got {n}")));
    }
    let nf = n as f64;
    let b = 6.0 * nf.powi(3) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0));
    let k = (nf - 1.0) / nf.powf(1.5);
    // -k + sqrt(k² + 1/b), written to avoid cancellation at large n.
    let a = (1.0 / b) / (k + (k * k + 1.0 / b).sqrt());
    let phi = (nf - 1.0) * (nf - 2.0) * (nf - 3.0) / 3.0;
    Ok(OptimalX { x: b * a, a, b, phi })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    Exact,
    Asymptotic,
}

impl std::str::FromStr for ThresholdMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ThresholdMode::Exact),
            "asymptotic" => Ok(ThresholdMode::Asymptotic),
            _ => Err(Error::InvalidArgument(format!("unknown threshold mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ThresholdMode::Exact => "exact",
            ThresholdMode::Asymptotic => "asymptotic",
        })
    }
}

/// The deformation parameter used by a threshold mode.
pub fn mode_x(n: usize, mode: ThresholdMode) -> Result<f64> {
    match mode {
        ThresholdMode::Asymptotic => Ok(SQRT6),
        ThresholdMode::Exact => Ok(optimal_x(n)?.x),
    }
}

/// Local gap threshold `t_n` of the 1D criterion.
pub fn threshold_1d(n: usize, mode: ThresholdMode) -> Result<f64> {
    match (n, mode) {
        (0..=2, _) => Err(Error::InvalidArgument(format!("threshold needs n >= 3, got {n}"))),
        (3, _) => Ok(0.5),
        (_, ThresholdMode::Asymptotic) => Ok(2.0 * SQRT6 * (n as f64).powf(-1.5)),
        (_, ThresholdMode::Exact) => {
            let o = optimal_x(n)?;
            let nf = n as f64;
            Ok((1.0 + o.a * o.a * o.b) / (nf - 1.0 + nf.powf(1.5) * o.a))
        }
    }
}

/// `(2c_0² + Σ(c_j - c_{j+1})²) / (2 c_0 Σ c_j)` for any admissible family.
pub fn threshold_general(c: &Deformation1D) -> f64 {
    let c0 = c.c[0];
    let diff: f64 = c.c.windows(2).map(|w| (w[0] - w[1]).powi(2)).sum();
    (2.0 * c0 * c0 + diff) / (2.0 * c0 * c.sum())
}

/// Closed form of the threshold for the quadratic family with parameter `x`.
pub fn threshold_quadratic(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let phi = (nf - 1.0) * (nf - 2.0) * (nf - 3.0) / 3.0;
    (2.0 * nf.powi(3) + x * x * phi) / (2.0 * nf.powi(3) * (nf - 1.0) + nf.powf(1.5) * x * phi)
}

/// Ceiling at the fourth decimal.
pub fn round_up_4(v: f64) -> f64 {
    (v * 1e4 - 1e-9).ceil() / 1e4
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prefactor {
    /// `F(n) = α c_0 Σ c_j`.
    pub exact: f64,
    /// `(n - 3) x / (24 n^{3/2} (1 + x)²)`.
    pub lower_bound: f64,
}

pub fn prefactor_general(c: &Deformation1D) -> f64 {
    c.alpha() * c.c[0] * c.sum()
}

pub fn prefactor_1d(n: usize, x: f64) -> Result<Prefactor> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("prefactor needs n >= 4, got {n}")));
    }
    let c = coeffs_1d(n, x)?;
    let nf = n as f64;
    Ok(Prefactor {
        exact: prefactor_general(&c),
        lower_bound: (nf - 3.0) / (24.0 * nf.powf(1.5)) * x / (1.0 + x).powi(2),
    })
}

/// Prefactor of the 1D theorem, `1 / (2^8 sqrt(6 n))`.
pub fn theorem_prefactor_1d(n: usize) -> f64 {
    1.0 / (256.0 * (6.0 * n as f64).sqrt())
}

/// `q(x) = Σ_j c_j c_{j+x}` for `x = 0..=n-2`.
pub fn autocorr_1d(c: &Deformation1D) -> Vec<f64> {
    let len = c.c.len();
    (0..len)
        .map(|x| (0..len - x).map(|j| c.c[j] * c.c[j + x]).sum())
        .collect()
}

/// Coefficients `c(1), ..., c(n/2)` of the deformed 2D patch operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deformation2D {
    pub n: usize,
    pub c: Vec<f64>,
}

impl Deformation2D {
    pub fn from_coefficients(n: usize, c: Vec<f64>) -> Result<Self> {
        if n == 0 || n % 2 != 0 || c.len() != n / 2 {
            return Err(Error::InvalidArgument(format!(
                "need n/2 coefficients for even n, got n = {n} and {} values",
                c.len()
            )));
        }
        if c.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument("coefficients must be positive".into()));
        }
        Ok(Deformation2D { n, c })
    }

    /// `c(r)`, `1 <= r <= n/2`.
    pub fn at(&self, r: usize) -> f64 {
        self.c[r - 1]
    }

    pub fn is_non_increasing(&self) -> bool {
        self.c.windows(2).all(|w| w[1] <= w[0])
    }
}

fn check_even(n: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("n must be a positive even integer, got {n}")));
    }
    Ok(())
}

pub fn coeffs_2d(n: usize) -> Result<Deformation2D> {
    check_even(n)?;
    let nf = n as f64;
    let h = (n / 2) as f64;
    let c = (1..=n / 2).map(|r| nf.powf(1.5) + h * h - (r * r) as f64).collect();
    Ok(Deformation2D { n, c })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    pub n: usize,
    pub w_self: f64,
    pub w_edge: f64,
    pub w_corner: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
}

pub fn weight_table(c: &Deformation2D) -> WeightTable {
    let n = c.n;
    let c1 = c.at(1);
    let mut w_self = 5.0 * c1 * c1;
    let mut w_edge = 2.0 * c1 * c1;
    let mut sigma = 5.0 * c1;
    for r in 2..=n / 2 {
        let (cr, cp, rf) = (c.at(r), c.at(r - 1), r as f64);
        w_self += cr * cr * (16.0 * rf - 12.0);
        w_edge += cr * cr * (8.0 * rf - 6.0) + cr * cp * (8.0 * rf - 10.0);
        sigma += cr * (16.0 * rf - 12.0);
    }
    let alpha = 1.0 / w_edge;
    WeightTable { n, w_self, w_edge, w_corner: w_edge, alpha, beta: alpha * w_self - 1.0, sigma }
}

/// Center plaquette of the reference rhomboid `D_{n,n}`.
pub fn reference_center(n: usize) -> Plaquette {
    Plaquette { u: n as i64 - 1, v: n as i64 }
}

fn ring_of(n: usize, p: Plaquette) -> usize {
    let c = reference_center(n);
    ring_index(p.u - c.u, p.v - c.v)
}

/// `W_n(p1, p2)` by enumerating translated pairs inside `D_{n,n}`.
pub fn weight_bruteforce(c: &Deformation2D, p1: Plaquette, p2: Plaquette) -> Result<f64> {
    let d = plaquette_set(c.n, c.n)?;
    for p in [p1, p2] {
        if !d.contains(p) {
            return Err(Error::PlaquetteOutsidePatch((p.u, p.v)));
        }
    }
    let (du, dv) = (p2.u - p1.u, p2.v - p1.v);
    Ok(d.plaquettes
        .iter()
        .filter_map(|&p3| {
            let p4 = Plaquette { u: p3.u + du, v: p3.v + dv };
            d.contains(p4).then(|| c.at(ring_of(c.n, p3)) * c.at(ring_of(c.n, p4)))
        })
        .sum())
}

/// `σ_n = Σ_{p ∈ D_{n,n}} c(d(p))` by enumeration.
pub fn sigma_bruteforce(c: &Deformation2D) -> Result<f64> {
    let d = plaquette_set(c.n, c.n)?;
    Ok(d.plaquettes.iter().map(|&p| c.at(ring_of(c.n, p))).sum())
}

/// 2D local gap threshold `4(W_self - W_edge) / (c(n/2) σ_n)`.
pub fn threshold_2d(n: usize) -> Result<f64> {
    let c = coeffs_2d(n)?;
    let w = weight_table(&c);
    Ok(4.0 * (w.w_self - w.w_edge) / (c.at(n / 2) * w.sigma))
}

/// The same threshold through the telescoped form of the numerator.
pub fn threshold_2d_telescoped(n: usize) -> Result<f64> {
    let c = coeffs_2d(n)?;
    let w = weight_table(&c);
    let last = c.at(n / 2);
    let mut num = (2.0 * n as f64 - 1.0) * last * last;
    for r in 2..=n / 2 {
        num += (4.0 * r as f64 - 5.0) * (c.at(r) - c.at(r - 1)).powi(2);
    }
    Ok(4.0 * num / (last * w.sigma))
}

/// `threshold_2d(n) · n^{3/2}`.
pub fn threshold_2d_normalized(n: usize) -> Result<f64> {
    Ok(threshold_2d(n)? * (n as f64).powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn coeffs_examples() {
        let c = coeffs_1d(4, SQRT6).unwrap();
        assert_abs_diff_eq!(c.c[0], 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.c[1], 8.0 + SQRT6, epsilon = 1e-12);
        assert_abs_diff_eq!(c.c[2], 8.0, epsilon = 1e-12);
        assert_eq!(coeffs_1d(3, 1.0).unwrap().c, vec![1.0, 1.0]);
        for n in 4..30 {
            let c = coeffs_1d(n, 0.7).unwrap();
            let e = (n as f64).powf(1.5);
            assert_relative_eq!(c.c[0], e);
            assert_relative_eq!(c.c[n - 2], e);
        }
        assert!(coeffs_1d(5, 0.0).is_err());
        assert!(coeffs_1d(2, 1.0).is_err());
    }

    #[test]
    fn optimal_x_examples() {
        let o = optimal_x(4).unwrap();
        assert_relative_eq!(o.b, 64.0, max_relative = 1e-15);
        assert_relative_eq!(o.phi, 2.0, max_relative = 1e-15);
        let a4 = -3.0 / 8.0 + (9.0f64 / 64.0 + 1.0 / 64.0).sqrt();
        assert_relative_eq!(o.a, a4, max_relative = 1e-13);
        assert_relative_eq!(o.x, 64.0 * a4, max_relative = 1e-13);
        assert!(optimal_x(3).is_err());
    }

    // The correction to the limit is about 6 / sqrt(n): 6e-3 at n = 1e6, so
    // the 1e-3 closeness first holds near n = 1e8.
    #[test]
    fn optimal_x_approaches_sqrt6() {
        let d6 = SQRT6 - optimal_x(1_000_000).unwrap().x;
        assert!(d6 > 5e-3 && d6 < 7e-3, "{d6}");
        let d8 = SQRT6 - optimal_x(100_000_000).unwrap().x;
        assert!(d8 > 0.0 && d8 < 1e-3, "{d8}");
        let mut last = f64::INFINITY;
        for k in 1..=9 {
            let n = 10usize.pow(k).max(4);
            let x = optimal_x(n).unwrap().x;
            assert!(x <= SQRT6);
            assert!(SQRT6 - x < last);
            last = SQRT6 - x;
        }
    }

    #[test]
    fn threshold_table() {
        let table = [0.3246, 0.2361, 0.1833, 0.1484, 0.1238, 0.1056];
        for (n, want) in (4..=9).zip(table) {
            let g = threshold_1d(n, ThresholdMode::Exact).unwrap();
            assert_eq!(round_up_4(g), want, "n = {n}: {g}");
        }
        assert_eq!(threshold_1d(3, ThresholdMode::Exact).unwrap(), 0.5);
        assert_eq!(threshold_1d(3, ThresholdMode::Asymptotic).unwrap(), 0.5);
        assert_relative_eq!(threshold_1d(4, ThresholdMode::Asymptotic).unwrap(), 2.0 * SQRT6 / 8.0);
        assert!(threshold_1d(2, ThresholdMode::Exact).is_err());
    }

    #[test]
    fn round_up_is_a_ceiling() {
        assert_eq!(round_up_4(0.32451), 0.3246);
        assert_eq!(round_up_4(0.3246), 0.3246);
    }

    #[test]
    fn threshold_three_routes_agree() {
        for n in 4..=200 {
            let x = optimal_x(n).unwrap().x;
            let g = threshold_1d(n, ThresholdMode::Exact).unwrap();
            let gen = threshold_general(&coeffs_1d(n, x).unwrap());
            let quad = threshold_quadratic(n, x);
            assert_relative_eq!(g, gen, max_relative = 1e-12);
            assert_relative_eq!(g, quad, max_relative = 1e-12);
        }
    }

    #[test]
    fn threshold_beats_simple_bounds() {
        for n in 4..=200 {
            let nf = n as f64;
            let g = threshold_1d(n, ThresholdMode::Exact).unwrap();
            assert!(g < (1.0 / (nf - 1.0)).min(2.0 * SQRT6 * nf.powf(-1.5)));
        }
    }

    #[test]
    fn threshold_ratio_converges_slowly() {
        let ratio = |n: usize| threshold_1d(n, ThresholdMode::Exact).unwrap() / threshold_1d(n, ThresholdMode::Asymptotic).unwrap();
        assert!((ratio(10_000) - 0.976).abs() < 1e-3);
        assert!((ratio(1_000_000) - 1.0).abs() < 0.01);
        assert!((ratio(100_000_000) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn optimal_family_is_locally_optimal() {
        for n in [5usize, 8, 13] {
            let x = optimal_x(n).unwrap().x;
            let base = coeffs_1d(n, x).unwrap();
            let g0 = threshold_general(&base);
            for j in 1..n - 2 {
                for eps in [1e-3, -1e-3] {
                    let mut c = base.c.clone();
                    c[j] *= 1.0 + eps;
                    c[n - 2 - j] = c[j];
                    let g = threshold_general(&Deformation1D::from_coefficients(c).unwrap());
                    assert!(g >= g0 - 1e-15, "n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn prefactor_examples() {
        let p = prefactor_1d(4, SQRT6).unwrap();
        let c = [8.0, 8.0 + SQRT6, 8.0];
        let direct = 8.0 * (c[0] + c[1] + c[2]) / (c[0] * c[1] + c[1] * c[2]);
        assert_relative_eq!(p.exact, direct, max_relative = 1e-14);
        assert!(p.exact >= theorem_prefactor_1d(4));
        assert!(p.exact >= p.lower_bound);
        let three = coeffs_1d(3, 1.0).unwrap();
        assert_eq!(prefactor_general(&three), 2.0);
        let mut scaled = coeffs_1d(7, SQRT6).unwrap();
        let f = prefactor_general(&scaled);
        scaled.c.iter_mut().for_each(|v| *v *= 17.5);
        assert_relative_eq!(prefactor_general(&scaled), f, max_relative = 1e-14);
        assert!(prefactor_1d(3, 1.0).is_err());
    }

    #[test]
    fn autocorr_examples() {
        assert_eq!(autocorr_1d(&coeffs_1d(3, 1.0).unwrap()), vec![2.0, 1.0]);
        let q = autocorr_1d(&coeffs_1d(4, SQRT6).unwrap());
        let m = 8.0 + SQRT6;
        assert_relative_eq!(q[0], 128.0 + m * m, max_relative = 1e-14);
        assert_relative_eq!(q[1], 16.0 * m, max_relative = 1e-14);
        assert_relative_eq!(q[2], 64.0, max_relative = 1e-14);
        for n in 4..40 {
            let q = autocorr_1d(&coeffs_1d(n, 1.3).unwrap());
            assert_relative_eq!(q[n - 2], (n as f64).powi(3), max_relative = 1e-12);
        }
    }

    #[test]
    fn coeffs_2d_examples() {
        assert_relative_eq!(coeffs_2d(2).unwrap().c[0], 2.0 * 2f64.sqrt());
        assert_eq!(coeffs_2d(4).unwrap().c, vec![11.0, 8.0]);
        assert!(coeffs_2d(3).is_err());
        for n in (2..=40).step_by(2) {
            let c = coeffs_2d(n).unwrap();
            assert!(c.is_non_increasing());
            assert_relative_eq!(c.at(n / 2), (n as f64).powf(1.5), max_relative = 1e-13);
            for r in 2..=n / 2 {
                assert_relative_eq!(c.at(r - 1) - c.at(r), 2.0 * r as f64 - 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn weight_table_examples() {
        let w = weight_table(&coeffs_2d(2).unwrap());
        assert_relative_eq!(w.w_self, 40.0, max_relative = 1e-14);
        assert_relative_eq!(w.w_edge, 16.0, max_relative = 1e-14);
        assert_relative_eq!(w.sigma, 10.0 * 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(w.alpha, 1.0 / 16.0);
        assert_relative_eq!(w.beta, 1.5, max_relative = 1e-14);
        let w4 = weight_table(&coeffs_2d(4).unwrap());
        assert_eq!(w4.sigma, 215.0);
        for n in (2..=12).step_by(2) {
            let ones = Deformation2D::from_coefficients(n, vec![1.0; n / 2]).unwrap();
            let card = (n * n + (n - 1) * (n - 1)) as f64;
            assert_eq!(weight_table(&ones).sigma, card);
        }
    }

    #[test]
    fn weights_match_enumeration() {
        for n in [2usize, 4, 6, 8] {
            let c = coeffs_2d(n).unwrap();
            let w = weight_table(&c);
            let o = reference_center(n);
            // Edge neighbours share two corners, corner neighbours one.
            let low = Plaquette { u: 0, v: 1 };
            let edge = Plaquette { u: 1, v: 2 };
            let corner = Plaquette { u: 2, v: 1 };
            assert_relative_eq!(weight_bruteforce(&c, o, o).unwrap(), w.w_self, max_relative = 1e-13);
            assert_relative_eq!(weight_bruteforce(&c, low, edge).unwrap(), w.w_edge, max_relative = 1e-13);
            assert_relative_eq!(weight_bruteforce(&c, low, corner).unwrap(), w.w_corner, max_relative = 1e-13);
        }
        let c = coeffs_2d(2).unwrap();
        assert!(weight_bruteforce(&c, Plaquette { u: 9, v: 0 }, reference_center(2)).is_err());
    }

    #[test]
    fn sigma_matches_enumeration() {
        for n in (2..=12).step_by(2) {
            let c = coeffs_2d(n).unwrap();
            assert_relative_eq!(sigma_bruteforce(&c).unwrap(), weight_table(&c).sigma, max_relative = 1e-13);
        }
    }

    #[test]
    fn threshold_2d_examples() {
        assert_relative_eq!(threshold_2d(4).unwrap(), 1900.0 / 1720.0, max_relative = 1e-13);
        assert_relative_eq!(threshold_2d(2).unwrap(), 96.0 / 40.0, max_relative = 1e-13);
        assert!(threshold_2d(5).is_err());
        let mut last = 0.0;
        for k in 2..=8 {
            let n = 1usize << k;
            let a = threshold_2d(n).unwrap();
            let b = threshold_2d_telescoped(n).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
            let s = threshold_2d_normalized(n).unwrap();
            // Leading-order sums give G(n) n^{3/2} -> 36 from below.
            assert!(s > last && s < 36.0);
            last = s;
        }
    }

    proptest! {
        #[test]
        fn quadratic_family_is_admissible(n in 4usize..=200, x in 1e-6f64..=10.0) {
            let c = coeffs_1d(n, x).unwrap();
            prop_assert!(c.satisfies_assumption());
            let q = autocorr_1d(&c);
            for i in 0..q.len() - 1 {
                prop_assert!(q[i] >= q[i + 1]);
            }
        }

        #[test]
        fn prefactor_scale_invariant(n in 4usize..60, s in 0.01f64..100.0) {
            let c = coeffs_1d(n, SQRT6).unwrap();
            let scaled = Deformation1D::from_coefficients(c.c.iter().map(|v| v * s).collect()).unwrap();
            prop_assert!((prefactor_general(&c) - prefactor_general(&scaled)).abs() <= 1e-12 * prefactor_general(&c));
            prop_assert!((threshold_general(&c) - threshold_general(&scaled)).abs() <= 1e-12 * threshold_general(&c));
        }
    }
}
