//! Stereographic charts of `S^{2p+1} ⊂ C^{p+1}` carrying the canonical
//! Sasakian structure, optionally D-homothetically deformed, and the product
//! structure `(ḡ_{a,b}, J̄_{a,b})` written in the product chart.
//!
//! With pole `N`, sign `s` and an orthonormal basis `B` of `N^⊥`, the
//! embedding is `x(u) = (2Bu + s(|u|²−1)N) / (1+|u|²)`, which sends `u = 0`
//! to `−sN` and is singular only at `|u| → ∞`. The ambient complex structure
//! pairs coordinates `(x_1, x_2), (x_3, x_4), …` with `J₀e_1 = e_2`, and the
//! Reeb field is `ξ = −J₀x`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods win whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianParams, ProductHermitianModel};
use crate::sasakian::SasakianPointModel;
use crate::tensor::{BilinearForm, CoVector, Endomorphism, TangentVector};

/// Points with `|u|` beyond this are rejected as too close to the pole.
pub const MAX_CHART_RADIUS: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereChart {
    p: usize,
    pole: Vec<f64>,
    direction: f64,
    alpha: f64,
    /// Orthonormal basis of `pole^⊥`, one ambient vector per chart coordinate.
    tangent_basis: Vec<Vec<f64>>,
}

/// `(g, φ, ξ, η)` in chart coordinates; `φ` has entry `(k, j)` equal to the
/// `k`-th component of `φ∂_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SasakianFields {
    pub g: BilinearForm,
    pub phi: Endomorphism,
    pub xi: TangentVector,
    pub eta: CoVector,
}

fn j0(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for i in (0..v.len()).step_by(2) {
        out[i] = -v[i + 1];
        out[i + 1] = v[i];
    }
    out
}

impl SphereChart {
    /// Chart of `S^{2p+1}` with unit `pole` in `R^{2p+2}`, projection sign
    /// `direction = ±1` and D-homothetic parameter `alpha` (`1` is the round
    /// sphere).
    pub fn new(p: usize, pole: Vec<f64>, direction: i8, alpha: f64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let m = 2 * p + 2;
        if pole.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: pole.len(),
            });
        }
        let norm = pole.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidParameter("pole must be a unit vector"));
        }
        if direction != 1 && direction != -1 {
            return Err(Error::InvalidParameter("direction must be +1 or -1"));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter("deformation parameter must be positive"));
        }
        // Gram-Schmidt on the standard basis against the pole, dropping the
        // vector that is most nearly parallel to it.
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
        let skip = (0..m).max_by(|&i, &j| pole[i].abs().total_cmp(&pole[j].abs())).expect("m > 0");
        for k in (0..m).filter(|&k| k != skip) {
            let mut v = vec![0.0; m];
            v[k] = 1.0;
            for _ in 0..2 {
                for b in core::iter::once(&pole).chain(basis.iter()) {
                    let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
        Ok(Self {
            p,
            pole,
            direction: direction as f64,
            alpha,
            tangent_basis: basis,
        })
    }

    /// Projection from the last ambient axis, round metric.
    pub fn standard(p: usize) -> Result<Self> {
        let mut pole = vec![0.0; 2 * p + 2];
        *pole.last_mut().ok_or(Error::InvalidDimension(p))? = 1.0;
        Self::new(p, pole, 1, 1.0)
    }

    /// [`Self::standard`] with a D-homothetically deformed structure.
    pub fn deformed(p: usize, alpha: f64) -> Result<Self> {
        let c = Self::standard(p)?;
        Self::new(p, c.pole, 1, alpha)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Chart dimension `2p + 1`.
    pub fn dim(&self) -> usize {
        2 * self.p + 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn pole(&self) -> &[f64] {
        &self.pole
    }

    pub fn direction(&self) -> i8 {
        self.direction as i8
    }

    /// φ-sectional curvature `4/α − 3` of the structure this chart carries.
    pub fn phi_sectional_curvature(&self) -> f64 {
        4.0 / self.alpha - 3.0
    }

    fn check(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.len(),
            });
        }
        let r2: f64 = u.iter().map(|v| v * v).sum();
        if !r2.is_finite() || r2 > MAX_CHART_RADIUS * MAX_CHART_RADIUS {
            return Err(Error::OutsideChart);
        }
        Ok(r2)
    }

    /// Ambient point `x(u)`.
    pub fn embed(&self, u: &[f64]) -> Result<Vec<f64>> {
        let r2 = self.check(u)?;
        let den = 1.0 + r2;
        let m = self.pole.len();
        Ok((0..m)
            .map(|a| {
                let bu: f64 = self.tangent_basis.iter().zip(u).map(|(b, uj)| b[a] * uj).sum();
                (2.0 * bu + self.direction * (r2 - 1.0) * self.pole[a]) / den
            })
            .collect())
    }

    /// `∂x/∂u_j`, one ambient vector per coordinate.
    pub fn embedding_jacobian(&self, u: &[f64]) -> Result<Vec<Vec<f64>>> {
        let r2 = self.check(u)?;
        let den = 1.0 + r2;
        let x = self.embed(u)?;
        Ok((0..self.dim())
            .map(|j| {
                (0..x.len())
                    .map(|a| (2.0 * self.tangent_basis[j][a] + 2.0 * self.direction * u[j] * self.pole[a]) / den - 2.0 * u[j] * x[a] / den)
                    .collect()
            })
            .collect())
    }

    /// Round metric `(2/(1+|u|²))² δ`.
    pub fn round_metric(&self, u: &[f64]) -> Result<BilinearForm> {
        let r2 = self.check(u)?;
        let lambda = (2.0 / (1.0 + r2)).powi(2);
        Ok(BilinearForm::identity(self.dim()).scaled(lambda))
    }

    /// Canonical structure of the round sphere, then deformed by `alpha`.
    pub fn fields(&self, u: &[f64]) -> Result<SasakianFields> {
        let d = self.dim();
        let g = self.round_metric(u)?;
        let lambda = g.get(0, 0);
        let x = self.embed(u)?;
        let e = self.embedding_jacobian(u)?;
        let xi_amb: Vec<f64> = j0(&x).into_iter().map(|v| -v).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let eta: Vec<f64> = e.iter().map(|ej| dot(ej, &xi_amb)).collect();
        let xi: Vec<f64> = eta.iter().map(|v| v / lambda).collect();
        let je: Vec<Vec<f64>> = e.iter().map(|ej| j0(ej)).collect();
        let phi = Endomorphism::from_fn(d, |k, j| dot(&e[k], &je[j]) / lambda);
        let alpha = self.alpha;
        if alpha == 1.0 {
            return Ok(SasakianFields {
                g,
                phi,
                xi: TangentVector::new(xi),
                eta: CoVector::new(eta),
            });
        }
        let g_def = BilinearForm::symmetric_from_fn(d, |i, j| alpha * g.get(i, j) + alpha * (alpha - 1.0) * eta[i] * eta[j]);
        Ok(SasakianFields {
            g: g_def,
            phi,
            xi: TangentVector::new(xi.iter().map(|v| v / alpha).collect()),
            eta: CoVector::new(eta.iter().map(|v| v * alpha).collect()),
        })
    }

    /// Metric field of the (possibly deformed) structure as flat entries.
    pub fn metric(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.fields(u)?.g.entries().to_vec())
    }

    /// The closed-form model of the structure this chart carries.
    pub fn closed_form_model(&self) -> Result<SasakianPointModel> {
        let round = SasakianPointModel::round_sphere(self.p)?;
        if self.alpha == 1.0 {
            Ok(round)
        } else {
            round.d_homothetic_deform(self.alpha)
        }
    }
}

/// Round metric pulled back to the chart.
pub fn pullback_round_metric(chart: &SphereChart, u: &[f64]) -> Result<BilinearForm> {
    chart.round_metric(u)
}

/// `(ξ, η, φ)` of the structure carried by `chart`, in chart coordinates.
pub fn canonical_sasakian_fields(chart: &SphereChart, u: &[f64]) -> Result<(TangentVector, CoVector, Endomorphism)> {
    let f = chart.fields(u)?;
    Ok((f.xi, f.eta, f.phi))
}

/// Product of two sphere charts with the structure `(ḡ_{a,b}, J̄_{a,b})`.
/// Coordinates are `(u, u')`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductChart {
    m: SphereChart,
    mp: SphereChart,
    params: HermitianParams,
    /// `−1` replaces `φ` by `−φ` on the first factor.
    phi_sign: f64,
    /// Strength `ε` of the shear `A = I + ε U_0 E_{01}` conjugating `J̄`.
    twist: f64,
}

impl ProductChart {
    pub fn new(m: SphereChart, mp: SphereChart, params: HermitianParams) -> Self {
        Self {
            m,
            mp,
            params,
            phi_sign: 1.0,
            twist: 0.0,
        }
    }

    /// The same chart with `φ` replaced by `−φ` on the first factor. This
    /// keeps `J̄² = −I` and, because `(−φ, ξ, η)` is still a normal almost
    /// contact structure, keeps `J̄` integrable as well.
    pub fn with_flipped_phi(mut self) -> Self {
        self.phi_sign = -self.phi_sign;
        self
    }

    /// The same chart with `J̄` replaced by `A J̄ A⁻¹`, `A = I + ε U_0 E_{01}`.
    /// `A` is not the Jacobian of any change of coordinates, so the result
    /// is an almost complex structure that fails to be integrable; it serves
    /// as a negative control for the Nijenhuis tensor.
    pub fn with_twist(mut self, epsilon: f64) -> Self {
        self.twist = epsilon;
        self
    }

    pub fn factor(&self) -> &SphereChart {
        &self.m
    }

    pub fn factor_prime(&self) -> &SphereChart {
        &self.mp
    }

    pub fn params(&self) -> HermitianParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.m.dim() + self.mp.dim()
    }

    pub fn split<'a>(&self, coords: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        Ok(coords.split_at(self.m.dim()))
    }

    /// `(ḡ_{a,b}, J̄_{a,b})` in product coordinates, assembled from the factor
    /// fields.
    pub fn structure(&self, coords: &[f64]) -> Result<(BilinearForm, Endomorphism)> {
        let (u, up) = self.split(coords)?;
        let (f, fp) = (self.m.fields(u)?, self.mp.fields(up)?);
        let (d1, n) = (self.m.dim(), self.dim());
        let (a, b, s) = (self.params.a(), self.params.b(), self.params.s());
        let (eta, etap) = (f.eta.components(), fp.eta.components());
        let (xi, xip) = (f.xi.components(), fp.xi.components());
        let g = BilinearForm::symmetric_from_fn(n, |i, j| match (i < d1, j < d1) {
            (true, true) => f.g.get(i, j),
            (true, false) => a * eta[i] * etap[j - d1],
            (false, true) => a * etap[i - d1] * eta[j],
            (false, false) => fp.g.get(i - d1, j - d1) + (s - 1.0) * etap[i - d1] * etap[j - d1],
        });
        let sign = self.phi_sign;
        let j = Endomorphism::from_fn(n, |r, c| match (r < d1, c < d1) {
            (true, true) => sign * f.phi.get(r, c) - (a / b) * eta[c] * xi[r],
            (false, true) => (1.0 / b) * eta[c] * xip[r - d1],
            (true, false) => -(s / b) * etap[c - d1] * xi[r],
            (false, false) => fp.phi.get(r - d1, c - d1) + (a / b) * etap[c - d1] * xip[r - d1],
        });
        if self.twist == 0.0 {
            return Ok((g, j));
        }
        let k = self.twist * coords[0];
        let shear = |s: f64| {
            Endomorphism::from_fn(n, |r, c| {
                if r == c {
                    1.0
                } else if (r, c) == (0, 1) {
                    s
                } else {
                    0.0
                }
            })
        };
        Ok((g, shear(k).compose(&j).compose(&shear(-k))))
    }

    pub fn metric(&self, coords: &[f64]) -> Result<Vec<f64>> {
        Ok(self.structure(coords)?.0.entries().to_vec())
    }

    pub fn complex_structure(&self, coords: &[f64]) -> Result<Vec<f64>> {
        Ok(self.structure(coords)?.1.entries().to_vec())
    }

    /// The closed-form model matching this chart's factors and parameters.
    pub fn closed_form_model(&self) -> Result<ProductHermitianModel> {
        ProductHermitianModel::build(&self.m.closed_form_model()?, &self.mp.closed_form_model()?, self.params)
    }
}

/// `(ḡ_{a,b}, J̄_{a,b})` on the product of two charts at `coords = (u, u')`.
pub fn product_structure_fields(
    chart: &SphereChart,
    chart_prime: &SphereChart,
    params: HermitianParams,
    coords: &[f64],
) -> Result<(BilinearForm, Endomorphism)> {
    ProductChart::new(chart.clone(), chart_prime.clone(), params).structure(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fd::{gradient, StencilConfig};

    #[test]
    fn metric_at_origin_and_unit_radius() {
        let c = SphereChart::standard(1).unwrap();
        assert_eq!(c.round_metric(&[0.0, 0.0, 0.0]).unwrap(), BilinearForm::identity(3).scaled(4.0));
        let g = c.round_metric(&[0.6, 0.0, 0.8]).unwrap();
        assert!(g.max_abs_diff(&BilinearForm::identity(3)) < 1e-15);
    }

    #[test]
    fn metric_matches_embedding_jacobian() {
        let pole = vec![0.5, -0.5, 0.5, 0.5];
        let c = SphereChart::new(1, pole, -1, 1.0).unwrap();
        let u = [0.3, -0.2, 0.5];
        let x = c.embed(&u).unwrap();
        assert!((x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-15);
        let jac = gradient(&|v: &[f64]| c.embed(v), &u, &StencilConfig::default()).unwrap();
        let e = c.embedding_jacobian(&u).unwrap();
        let g = c.round_metric(&u).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let fd: f64 = (0..4).map(|a| jac[i * 4 + a] * jac[j * 4 + a]).sum();
                let an: f64 = (0..4).map(|a| e[i][a] * e[j][a]).sum();
                assert!((fd - g.get(i, j)).abs() < 1e-10);
                assert!((an - g.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reeb_field_is_unit_and_structure_is_contact_metric() {
        for alpha in [1.0, 0.5, 2.0] {
            let c = SphereChart::deformed(2, alpha).unwrap();
            let u = [0.1, -0.4, 0.2, 0.3, -0.1];
            let f = c.fields(&u).unwrap();
            assert!((f.g.eval(&f.xi, &f.xi) - 1.0).abs() < 1e-12);
            assert!((f.eta.apply(&f.xi) - 1.0).abs() < 1e-12);
            let phi2 = f.phi.compose(&f.phi);
            let target = Endomorphism::outer(&f.xi, &f.eta).plus(&Endomorphism::identity(5).scaled(-1.0));
            assert!(phi2.max_abs_diff(&target) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_charts_and_points() {
        assert!(SphereChart::new(1, vec![1.0, 0.0, 0.0], 1, 1.0).is_err());
        assert!(SphereChart::new(1, vec![2.0, 0.0, 0.0, 0.0], 1, 1.0).is_err());
        assert!(SphereChart::new(1, vec![1.0, 0.0, 0.0, 0.0], 0, 1.0).is_err());
        assert!(SphereChart::deformed(1, 0.0).is_err());
        let c = SphereChart::standard(1).unwrap();
        assert_eq!(c.embed(&[1e3, 0.0, 0.0]), Err(Error::OutsideChart));
        assert_eq!(c.fields(&[f64::INFINITY, 0.0, 0.0]), Err(Error::OutsideChart));
    }

    #[test]
    fn product_chart_is_almost_hermitian() {
        let params = HermitianParams::new(0.5, 1.5).unwrap();
        let pc = ProductChart::new(SphereChart::standard(1).unwrap(), SphereChart::deformed(1, 0.5).unwrap(), params);
        let (g, j) = pc.structure(&[0.1, 0.2, -0.3, 0.4, -0.5, 0.6]).unwrap();
        let j2 = j.compose(&j).plus(&Endomorphism::identity(6));
        assert!(j2.max_abs() < 1e-12);
        let cols: Vec<TangentVector> = (0..6).map(|i| j.column(i)).collect();
        for x in 0..6 {
            for y in 0..6 {
                assert!((g.eval(&cols[x], &cols[y]) - g.get(x, y)).abs() < 1e-12);
            }
        }
        assert!(g.is_positive_definite());
    }

    #[test]
    fn riemannian_product_is_block_diagonal() {
        let params = HermitianParams::new(0.0, 1.0).unwrap();
        let pc = ProductChart::new(SphereChart::standard(1).unwrap(), SphereChart::standard(1).unwrap(), params);
        let (g, _) = pc.structure(&[0.1, 0.2, -0.3, 0.4, -0.5, 0.6]).unwrap();
        for i in 0..3 {
            for j in 3..6 {
                assert_eq!(g.get(i, j), 0.0);
            }
        }
    }
}
