//! Central-difference derivatives of tensor fields given in coordinates.
//!
//! A field is any `Fn(&[f64]) -> Result<Vec<f64>>`; its output is a flat
//! array of components. Christoffel symbols and curvature are derived from the
//! metric field alone, and derivatives of derivatives are taken by nesting
//! the same stencil.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::{invert, CovariantTensor4};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    fn accuracy(self) -> i32 {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilConfig {
    pub step: f64,
    pub order: StencilOrder,
    /// Combine steps `h` and `h/2` to cancel the leading truncation term.
    pub richardson: bool,
}

impl Default for StencilConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            order: StencilOrder::Fourth,
            richardson: true,
        }
    }
}

impl StencilConfig {
    pub fn new(step: f64, order: StencilOrder, richardson: bool) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidParameter("stencil step must be positive"));
        }
        Ok(Self { step, order, richardson })
    }
}

fn shifted(x: &[f64], i: usize, by: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += by;
    y
}

fn stencil<F>(f: &F, x: &[f64], i: usize, h: f64, order: StencilOrder) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let plus = f(&shifted(x, i, h))?;
    let minus = f(&shifted(x, i, -h))?;
    match order {
        StencilOrder::Second => Ok(plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect()),
        StencilOrder::Fourth => {
            let plus2 = f(&shifted(x, i, 2.0 * h))?;
            let minus2 = f(&shifted(x, i, -2.0 * h))?;
            Ok((0..plus.len())
                .map(|k| (-plus2[k] + 8.0 * plus[k] - 8.0 * minus[k] + minus2[k]) / (12.0 * h))
                .collect())
        }
    }
}

/// `∂f/∂x_i` at `x`.
pub fn partial<F>(f: &F, x: &[f64], i: usize, cfg: &StencilConfig) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if i >= x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: i,
        });
    }
    let coarse = stencil(f, x, i, cfg.step, cfg.order)?;
    if !cfg.richardson {
        return Ok(coarse);
    }
    let fine = stencil(f, x, i, cfg.step / 2.0, cfg.order)?;
    let w = (1u32 << cfg.order.accuracy()) as f64;
    Ok(fine.iter().zip(&coarse).map(|(a, b)| (w * a - b) / (w - 1.0)).collect())
}

/// All first partials, `out[i * m + c] = ∂_i f_c` where `m` is the output
/// length.
pub fn gradient<F>(f: &F, x: &[f64], cfg: &StencilConfig) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut out = Vec::new();
    for i in 0..x.len() {
        out.extend(partial(f, x, i, cfg)?);
    }
    Ok(out)
}

/// Metric, its first derivatives and both kinds of Christoffel symbols at a
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffels {
    n: usize,
    metric: Vec<f64>,
    inverse: Vec<f64>,
    /// `∂_i g_{jk}`
    metric_derivs: Vec<f64>,
    /// `Γ_{ij,k} = g(∇_{∂_i}∂_j, ∂_k)`
    first: Vec<f64>,
    /// `Γ^k_{ij}`, stored at `(k, i, j)`
    second: Vec<f64>,
}

impl Christoffels {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn metric(&self, i: usize, j: usize) -> f64 {
        self.metric[i * self.n + j]
    }

    pub fn inverse_metric(&self, i: usize, j: usize) -> f64 {
        self.inverse[i * self.n + j]
    }

    pub fn metric_deriv(&self, i: usize, j: usize, k: usize) -> f64 {
        self.metric_derivs[(i * self.n + j) * self.n + k]
    }

    pub fn first(&self, i: usize, j: usize, k: usize) -> f64 {
        self.first[(i * self.n + j) * self.n + k]
    }

    pub fn second(&self, k: usize, i: usize, j: usize) -> f64 {
        self.second[(k * self.n + i) * self.n + j]
    }

    pub fn second_kind(&self) -> &[f64] {
        &self.second
    }

    /// `max |Γ^k_{ij} − Γ^k_{ji}|`
    pub fn torsion_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.second(k, i, j) - self.second(k, j, i)).abs());
                }
            }
        }
        worst
    }

    /// `max |∂_k g_{ij} − Γ^l_{ki} g_{lj} − Γ^l_{kj} g_{il}|`
    pub fn compatibility_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = self.metric_deriv(k, i, j);
                    for l in 0..n {
                        v -= self.second(l, k, i) * self.metric(l, j) + self.second(l, k, j) * self.metric(i, l);
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }
}

fn metric_at<F>(field: &F, x: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let g = field(x)?;
    if g.len() != x.len() * x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len() * x.len(),
            found: g.len(),
        });
    }
    Ok(g)
}

/// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})` from stencil
/// derivatives of the metric field.
pub fn christoffels_fd<F>(metric_field: &F, x: &[f64], cfg: &StencilConfig) -> Result<Christoffels>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let metric = metric_at(metric_field, x)?;
    let inverse = invert(n, &metric)?;
    let metric_derivs = gradient(&|y: &[f64]| metric_at(metric_field, y), x, cfg)?;
    let dg = |i: usize, j: usize, k: usize| metric_derivs[(i * n + j) * n + k];
    let mut first = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                first[(i * n + j) * n + k] = 0.5 * (dg(i, j, k) + dg(j, i, k) - dg(k, i, j));
            }
        }
    }
    let mut second = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                second[(k * n + i) * n + j] = (0..n).map(|l| inverse[k * n + l] * first[(i * n + j) * n + l]).sum();
            }
        }
    }
    Ok(Christoffels {
        n,
        metric,
        inverse,
        metric_derivs,
        first,
        second,
    })
}

/// Everything the oracle derives from a metric field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub coords: Vec<f64>,
    pub christoffels: Christoffels,
    pub curvature: CovariantTensor4,
}

/// `R(∂_i, ∂_j, ∂_k, ∂_l)` with
/// `R^m_{ijk} = ∂_i Γ^m_{jk} − ∂_j Γ^m_{ik} + Γ^l_{jk} Γ^m_{il} − Γ^l_{ik} Γ^m_{jl}`
/// lowered in its last slot.
pub fn riemann_fd<F>(metric_field: &F, x: &[f64], cfg: &StencilConfig) -> Result<CovariantTensor4>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    Ok(sample_metric_field(metric_field, x, cfg)?.curvature)
}

/// Christoffels and curvature of a metric field at `x`.
pub fn sample_metric_field<F>(metric_field: &F, x: &[f64], cfg: &StencilConfig) -> Result<FieldSample>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let gamma = christoffels_fd(metric_field, x, cfg)?;
    let second_at = |y: &[f64]| christoffels_fd(metric_field, y, cfg).map(|c| c.second);
    // dgamma[(i, m, j, k)] = ∂_i Γ^m_{jk}
    let dgamma = gradient(&second_at, x, cfg)?;
    let dg = |i: usize, m: usize, j: usize, k: usize| dgamma[((i * n + m) * n + j) * n + k];
    let mut upper = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut v = dg(i, m, j, k) - dg(j, m, i, k);
                    for l in 0..n {
                        v += gamma.second(l, j, k) * gamma.second(m, i, l) - gamma.second(l, i, k) * gamma.second(m, j, l);
                    }
                    upper[((i * n + j) * n + k) * n + m] = v;
                }
            }
        }
    }
    let curvature = CovariantTensor4::from_fn(n, |i, j, k, w| {
        (0..n).map(|m| upper[((i * n + j) * n + k) * n + m] * gamma.metric(m, w)).sum()
    });
    Ok(FieldSample {
        coords: x.to_vec(),
        christoffels: gamma,
        curvature,
    })
}

/// Components `N^k_{ij}` of the Nijenhuis tensor
/// `N(X, Y) = [JX, JY] − [X, Y] − J[JX, Y] − J[X, JY]` on coordinate fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Nijenhuis {
    n: usize,
    entries: Vec<f64>,
}

impl Nijenhuis {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.entries[(k * self.n + i) * self.n + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// `N^k_{ij} = J^l_i ∂_l J^k_j − J^l_j ∂_l J^k_i − J^k_l(∂_i J^l_j − ∂_j J^l_i)`
/// for a field of endomorphisms stored with entry `(k, j)` the `k`-th
/// component of `J ∂_j`.
pub fn nijenhuis_fd<F>(j_field: &F, x: &[f64], cfg: &StencilConfig) -> Result<Nijenhuis>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let j = metric_at(j_field, x)?;
    let dj = gradient(&|y: &[f64]| metric_at(j_field, y), x, cfg)?;
    let jj = |r: usize, c: usize| j[r * n + c];
    // ∂_l J^k_j
    let d = |l: usize, k: usize, c: usize| dj[(l * n + k) * n + c];
    let mut entries = vec![0.0; n * n * n];
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut v = 0.0;
                for l in 0..n {
                    v += jj(l, a) * d(l, k, b) - jj(l, b) * d(l, k, a);
                    v -= jj(k, l) * (d(a, l, b) - d(b, l, a));
                }
                entries[(k * n + a) * n + b] = v;
            }
        }
    }
    Ok(Nijenhuis { n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives_are_exact() {
        let f = |x: &[f64]| Ok(vec![x[0] * x[0] * x[0], x[0] * x[1]]);
        let d = partial(&f, &[0.7, -1.3], 0, &StencilConfig::default()).unwrap();
        assert!((d[0] - 3.0 * 0.49).abs() < 1e-10);
        assert!((d[1] + 1.3).abs() < 1e-10);
    }

    #[test]
    fn orders_and_richardson_improve_accuracy() {
        let f = |x: &[f64]| Ok(vec![x[0].sin()]);
        let exact = 0.4f64.cos();
        let err = |cfg: StencilConfig| (partial(&f, &[0.4], 0, &cfg).unwrap()[0] - exact).abs();
        let second = err(StencilConfig::new(1e-2, StencilOrder::Second, false).unwrap());
        let fourth = err(StencilConfig::new(1e-2, StencilOrder::Fourth, false).unwrap());
        let rich = err(StencilConfig::new(1e-2, StencilOrder::Fourth, true).unwrap());
        assert!(fourth < second / 100.0);
        assert!(rich < fourth);
    }

    #[test]
    fn invalid_step() {
        assert!(StencilConfig::new(0.0, StencilOrder::Second, false).is_err());
        assert!(StencilConfig::new(f64::NAN, StencilOrder::Second, false).is_err());
    }

    #[test]
    fn flat_metric_has_no_christoffels_or_curvature() {
        let flat = |_: &[f64]| Ok(vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let s = sample_metric_field(&flat, &[0.1, 0.2, 0.3], &StencilConfig::default()).unwrap();
        assert_eq!(s.christoffels.second_kind().iter().fold(0.0f64, |a, b| a.max(b.abs())), 0.0);
        assert_eq!(s.curvature.max_abs(), 0.0);
    }

    #[test]
    fn flat_metric_in_polar_coordinates() {
        // dr² + r²dθ², a curvilinear chart of the plane.
        let polar = |x: &[f64]| Ok(vec![1.0, 0.0, 0.0, x[0] * x[0]]);
        let s = sample_metric_field(&polar, &[1.3, 0.4], &StencilConfig::default()).unwrap();
        assert!((s.christoffels.second(0, 1, 1) + 1.3).abs() < 1e-9);
        assert!((s.christoffels.second(1, 0, 1) - 1.0 / 1.3).abs() < 1e-9);
        assert!(s.curvature.max_abs() < 1e-8);
    }

    #[test]
    fn constant_complex_structure_is_integrable() {
        let j = |_: &[f64]| Ok(vec![0.0, -1.0, 1.0, 0.0]);
        assert_eq!(nijenhuis_fd(&j, &[0.2, 0.1], &StencilConfig::default()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn domain_errors_propagate() {
        let f = |x: &[f64]| if x[0] > 1.0 { Err(Error::OutsideChart) } else { Ok(vec![x[0]]) };
        assert_eq!(partial(&f, &[0.9999], 0, &StencilConfig::default()), Err(Error::OutsideChart));
    }
}
