//! Closed-form Sasakian factors.
//!
//! A [`SasakianPointModel`] holds the structure tensors `(g, φ, ξ, η)` and the
//! curvature at one point, written in some frame of the tangent space. The
//! constructors produce models in the canonical adapted frame
//! `{e_1, φe_1, …, e_n, φe_n, ξ}` where `g` is the identity; a D-homothetic
//! deformation keeps the frame of its input, so a deformed model has a
//! non-trivial Gram matrix until [`SasakianPointModel::to_adapted_frame`] is
//! applied.
//!
//! Curvature convention: `R(X, Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z` and
//! `R(X, Y, Z, W) = g(R(X, Y)Z, W)`, so the unit sphere has
//! `R(X, Y, Z, W) = g(Y, Z)g(X, W) − g(X, Z)g(Y, W)`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods win whenever std is linked
use num_traits::{Float, Num};

use crate::error::{Error, Result};
use crate::tensor::{contract_trace, BilinearForm, CoVector, CovariantTensor4, Endomorphism, Slot, TangentVector};

/// Structure tensors and curvature of a `(2n+1)`-dimensional Sasakian
/// manifold at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SasakianPointModel {
    n: usize,
    g: BilinearForm,
    phi: Endomorphism,
    xi: TangentVector,
    eta: CoVector,
    curvature: CovariantTensor4,
    ricci: BilinearForm,
}

/// Coefficients of `ρ = A g + B η ⊗ η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaEinsteinCoefficients {
    pub a: f64,
    pub b: f64,
    /// Max-norm of `ρ − A g − B η⊗η` over basis pairs.
    pub residual: f64,
}

impl EtaEinsteinCoefficients {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// Residuals of the almost contact metric structure and of the Sasakian
/// identities that involve `ξ` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureResiduals {
    /// `η(ξ) − 1`
    pub eta_of_xi: f64,
    /// `η − g(ξ, ·)`
    pub eta_metric_dual: f64,
    /// `φ² + I − ξ ⊗ η`
    pub phi_squared: f64,
    /// `φ ξ`
    pub phi_xi: f64,
    /// `η ∘ φ`
    pub eta_phi: f64,
    /// `g(φX, φY) − g(X, Y) + η(X)η(Y)`
    pub metric_compatibility: f64,
    /// `R(X, Y)ξ − η(Y)X + η(X)Y`
    pub reeb_curvature: f64,
    /// `ρ(ξ, X) − 2n η(X)`
    pub reeb_ricci: f64,
    /// stored Ricci tensor minus the trace of the stored curvature
    pub ricci_trace: f64,
}

impl StructureResiduals {
    pub fn max(&self) -> f64 {
        [
            self.eta_of_xi,
            self.eta_metric_dual,
            self.phi_squared,
            self.phi_xi,
            self.eta_phi,
            self.metric_compatibility,
            self.reeb_curvature,
            self.reeb_ricci,
            self.ricci_trace,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Residuals of the pointwise curvature identities every Sasakian manifold
/// satisfies; sums run over an orthonormal basis `{e_i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SasakianIdentityResiduals {
    /// `R(X,Y,φZ,W) − R(φZ,X,Y,W) + g(X,Y)g(φZ,W) + 2g(Z,φY)g(X,W) − g(Z,φX)g(Y,W)`
    pub phi_curvature: f64,
    /// `Σ R(X,Y,φe_i,e_i) − Σ R(φe_i,X,Y,e_i) − 3g(φX,Y)`
    pub phi_trace_difference: f64,
    /// `Σ R(X,Y,e_i,φe_i) + 2g(φX,Y)`
    pub phi_trace: f64,
    /// `Σ R(X,φY,e_i,φe_i) + 2(g(X,Y) − η(X)η(Y))`
    pub phi_double_trace: f64,
}

impl SasakianIdentityResiduals {
    pub fn max(&self) -> f64 {
        self.phi_curvature
            .max(self.phi_trace_difference)
            .max(self.phi_trace)
            .max(self.phi_double_trace)
    }
}

/// `(g, φ, ξ, η)` in the canonical adapted frame of a `(2n+1)`-dimensional
/// factor: `g = I`, `φe_{2i−1} = e_{2i}`, `φe_{2i} = −e_{2i−1}`, `ξ` last.
pub fn canonical_structure(n: usize) -> (BilinearForm, Endomorphism, TangentVector, CoVector) {
    let d = 2 * n + 1;
    let g = BilinearForm::identity(d);
    let phi = Endomorphism::from_fn(d, |i, j| {
        if j < 2 * n && j % 2 == 0 && i == j + 1 {
            1.0
        } else if j < 2 * n && j % 2 == 1 && i + 1 == j {
            -1.0
        } else {
            0.0
        }
    });
    let xi = TangentVector::basis(d, d - 1);
    let eta = CoVector::new(xi.components().to_vec());
    (g, phi, xi, eta)
}

/// Curvature of a Sasakian space form of constant φ-sectional curvature `c`,
/// written in an arbitrary frame.
///
/// `g` and `phi` are `d x d` row-major (`phi[i * d + j]` is component `i` of
/// `φ e_j`), the result is indexed `((x d + y) d + z) d + w`. The function is
/// generic so the same assembly can run in exact rational arithmetic.
pub fn space_form_curvature<T>(d: usize, g: &[T], phi: &[T], xi: &[T], eta: &[T], c: T) -> Vec<T>
where
    T: Num + Copy,
{
    let one = T::one();
    let two = one + one;
    let three = two + one;
    let four = two + two;
    let a = (c + three) / four;
    let b = (c - one) / four;

    // g(φ e_x, e_w) and g(ξ, e_w).
    let mut gphi = vec![T::zero(); d * d];
    for x in 0..d {
        for w in 0..d {
            let mut s = T::zero();
            for k in 0..d {
                s = s + phi[k * d + x] * g[k * d + w];
            }
            gphi[x * d + w] = s;
        }
    }
    let xi_flat: Vec<T> = (0..d).map(|w| (0..d).fold(T::zero(), |s, v| s + g[v * d + w] * xi[v])).collect();

    let mut out = Vec::with_capacity(d * d * d * d);
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                for w in 0..d {
                    let gyz = g[y * d + z];
                    let gxz = g[x * d + z];
                    let round = gyz * g[x * d + w] - gxz * g[y * d + w];
                    let contact = eta[x] * eta[z] * g[y * d + w] - eta[y] * eta[z] * g[x * d + w] + gxz * eta[y] * xi_flat[w]
                        - gyz * eta[x] * xi_flat[w]
                        + gphi[y * d + z] * gphi[x * d + w]
                        - gphi[x * d + z] * gphi[y * d + w]
                        - two * gphi[x * d + y] * gphi[z * d + w];
                    out.push(a * round + b * contact);
                }
            }
        }
    }
    out
}

/// Ricci tensor `ρ(X, W) = Σ_i R(X, e_i, e_i, W)` for a curvature tensor given
/// in an orthonormal frame.
pub fn ricci_in_orthonormal_frame<T>(d: usize, r: &[T]) -> Vec<T>
where
    T: Num + Copy,
{
    let mut out = Vec::with_capacity(d * d);
    for x in 0..d {
        for w in 0..d {
            let mut s = T::zero();
            for i in 0..d {
                s = s + r[((x * d + i) * d + i) * d + w];
            }
            out.push(s);
        }
    }
    out
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidDimension(n))
    } else {
        Ok(())
    }
}

/// Gram-Schmidt seeded with `{v, φv, …, ξ}`: returns an orthonormal frame
/// `{e_1, φe_1, …, e_n, φe_n, ξ/|ξ|}` for any almost contact metric data
/// written in an arbitrary basis. Each `e_k` is the standard basis vector that
/// survives projection onto the complement of the frame so far best.
pub fn adapted_frame(g: &BilinearForm, phi: &Endomorphism, xi: &TangentVector) -> Result<Vec<TangentVector>> {
    let d = g.dim();
    if d.is_multiple_of(2) || phi.dim() != d || xi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if phi.dim() != d { phi.dim() } else { xi.dim() },
        });
    }
    let xi_norm = g.eval(xi, xi);
    if !(xi_norm > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let xi_unit = xi * (1.0 / xi_norm.sqrt());
    let mut frame: Vec<TangentVector> = Vec::with_capacity(d);
    let project = |v: &TangentVector, frame: &[TangentVector]| {
        let mut v = v.clone();
        for _ in 0..2 {
            for f in frame.iter().chain(core::iter::once(&xi_unit)) {
                let c = g.eval(&v, f);
                v = &v - &(f * c);
            }
        }
        v
    };
    while frame.len() < d - 1 {
        let seed = (0..d)
            .map(|i| project(&TangentVector::basis(d, i), &frame))
            .max_by(|u, v| g.eval(u, u).total_cmp(&g.eval(v, v)))
            .expect("d >= 3");
        let norm2 = g.eval(&seed, &seed);
        if !(norm2 > 1e-20) {
            return Err(Error::SingularMetric);
        }
        let e = &seed * (1.0 / norm2.sqrt());
        let fe = phi.apply(&e);
        frame.push(e);
        frame.push(fe);
    }
    frame.push(xi_unit);
    Ok(frame)
}

impl SasakianPointModel {
    /// Assembles a model from its parts; the Ricci tensor is the trace of the
    /// curvature over its middle slots. No Sasakian identity is enforced here,
    /// use [`Self::structure_residuals`] and [`Self::identity_residuals`].
    pub fn from_parts(
        n: usize,
        g: BilinearForm,
        phi: Endomorphism,
        xi: TangentVector,
        eta: CoVector,
        curvature: CovariantTensor4,
    ) -> Result<Self> {
        check_n(n)?;
        let d = 2 * n + 1;
        for found in [g.dim(), phi.dim(), xi.dim(), eta.dim(), curvature.dim()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        let ricci = contract_trace(&curvature, &g, (Slot::Second, Slot::Third))?;
        Ok(Self {
            n,
            g,
            phi,
            xi,
            eta,
            curvature,
            ricci,
        })
    }

    /// Unit sphere `S^{2p+1}` with its canonical Sasakian structure.
    pub fn round_sphere(p: usize) -> Result<Self> {
        Self::space_form(p, 1.0)
    }

    /// Sasakian space form of dimension `2q+1` and constant φ-sectional
    /// curvature `c`.
    pub fn space_form(q: usize, c: f64) -> Result<Self> {
        check_n(q)?;
        if !c.is_finite() {
            return Err(Error::InvalidParameter("space form curvature must be finite"));
        }
        let d = 2 * q + 1;
        let (g, phi, xi, eta) = canonical_structure(q);
        let r = space_form_curvature(d, g.entries(), phi.entries(), xi.components(), eta.components(), c);
        Self::from_parts(q, g, phi, xi, eta, CovariantTensor4::new(d, r)?)
    }

    /// D-homothetic deformation `η' = αη, ξ' = ξ/α, φ' = φ,
    /// g' = αg + α(α−1)η⊗η`, in the same frame as `self`.
    ///
    /// The curvature follows from the connection change
    /// `∇'_X Y = ∇_X Y + S(X, Y)` with `S(X, Y) = (1−α)(η(X)φY + η(Y)φX)`;
    /// the derivative of `S` only involves `∇η` and `∇φ`, which are algebraic
    /// on a Sasakian manifold.
    pub fn d_homothetic_deform(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter("deformation parameter must be positive"));
        }
        let d = self.dim();
        let k = 1.0 - alpha;
        let g = &self.g;
        let eta = self.eta.components();
        let xi = self.xi.components();
        let ginv = g.inverse()?;

        let g_new = BilinearForm::symmetric_from_fn(d, |i, j| alpha * g.get(i, j) + alpha * (alpha - 1.0) * eta[i] * eta[j]);
        let xi_new = &self.xi * (1.0 / alpha);
        let eta_new = self.eta.scaled(alpha);

        // g(e_x, φ e_y)
        let g_x_phi_y = |x: usize, y: usize| (0..d).map(|m| g.get(x, m) * self.phi.get(m, y)).sum::<f64>();
        let phi_col = |j: usize| self.phi.column(j);
        let basis = |i: usize| TangentVector::basis(d, i);
        let s = |x: &TangentVector, y: &TangentVector| -> TangentVector {
            let ex = self.eta.apply(x);
            let ey = self.eta.apply(y);
            &(&self.phi.apply(y) * (k * ex)) + &(&self.phi.apply(x) * (k * ey))
        };
        // (∇_{e_x} S)(e_y, e_z)
        let ds = |x: usize, y: usize, z: usize| -> TangentVector {
            let mut v = vec![0.0; d];
            let (gxy, gxz) = (g.get(x, y), g.get(x, z));
            let (pzc, pyc) = (phi_col(z), phi_col(y));
            let (c1, c2) = (g_x_phi_y(x, y), g_x_phi_y(x, z));
            for m in 0..d {
                v[m] += c1 * pzc.components()[m] + c2 * pyc.components()[m];
                v[m] += eta[y] * gxz * xi[m] + eta[z] * gxy * xi[m];
            }
            v[x] -= 2.0 * eta[y] * eta[z];
            &TangentVector::new(v) * k
        };
        let mut r = Vec::with_capacity(d * d * d * d);
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    // R(e_x, e_y) e_z as a vector.
                    let mut v: Vec<f64> = (0..d)
                        .map(|m| (0..d).map(|w| self.curvature.get(x, y, z, w) * ginv[w * d + m]).sum())
                        .collect();
                    let syz = s(&basis(y), &basis(z));
                    let sxz = s(&basis(x), &basis(z));
                    let extra = &(&(&ds(x, y, z) - &ds(y, x, z)) + &s(&basis(x), &syz)) - &s(&basis(y), &sxz);
                    for (vm, e) in v.iter_mut().zip(extra.components()) {
                        *vm += e;
                    }
                    let v = TangentVector::new(v);
                    for w in 0..d {
                        r.push(g_new.eval(&v, &basis(w)));
                    }
                }
            }
        }
        Self::from_parts(self.n, g_new, self.phi.clone(), xi_new, eta_new, CovariantTensor4::new(d, r)?)
    }

    /// An orthonormal frame `{e_1, φe_1, …, e_n, φe_n, ξ}` of the model,
    /// expressed in the model's current basis.
    pub fn adapted_frame(&self) -> Result<Vec<TangentVector>> {
        adapted_frame(&self.g, &self.phi, &self.xi)
    }

    /// The same model written in its adapted orthonormal frame, where `g` is
    /// the identity, `ξ` is the last basis vector and `φ` has the canonical
    /// block form.
    pub fn to_adapted_frame(&self) -> Result<Self> {
        let frame = self.adapted_frame()?;
        let d = self.dim();
        let g = BilinearForm::symmetric_from_fn(d, |i, j| self.g.eval(&frame[i], &frame[j]));
        let phi = self.phi.in_frame(&frame)?;
        let change = Endomorphism::from_columns(&frame);
        let inv = Endomorphism::new(d, crate::tensor::invert(d, change.entries())?)?;
        let xi = inv.apply(&self.xi);
        let eta = CoVector::new(frame.iter().map(|f| self.eta.apply(f)).collect());
        let curvature = self.curvature.in_frame(&frame);
        Self::from_parts(self.n, g, phi, xi, eta, curvature)
    }

    /// `n` where the factor has dimension `2n + 1`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn metric(&self) -> &BilinearForm {
        &self.g
    }

    pub fn phi(&self) -> &Endomorphism {
        &self.phi
    }

    pub fn xi(&self) -> &TangentVector {
        &self.xi
    }

    pub fn eta(&self) -> &CoVector {
        &self.eta
    }

    pub fn curvature(&self) -> &CovariantTensor4 {
        &self.curvature
    }

    pub fn ricci(&self) -> &BilinearForm {
        &self.ricci
    }

    /// Returns a copy with the Ricci tensor replaced; meant for building
    /// deliberately inconsistent models in negative tests.
    pub fn with_ricci(&self, ricci: BilinearForm) -> Result<Self> {
        if ricci.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: ricci.dim(),
            });
        }
        Ok(Self { ricci, ..self.clone() })
    }

    /// Scalar curvature, the metric trace of the Ricci tensor.
    pub fn scalar_curvature(&self) -> Result<f64> {
        self.ricci.trace_with(&self.g)
    }

    pub fn structure_residuals(&self) -> Result<StructureResiduals> {
        let d = self.dim();
        let g = &self.g;
        let basis: Vec<TangentVector> = (0..d).map(|i| TangentVector::basis(d, i)).collect();
        let eta_xi = self.eta.apply(&self.xi);
        let xi_flat = g.lower(&self.xi);

        let mut r = StructureResiduals {
            eta_of_xi: (eta_xi - 1.0).abs(),
            eta_metric_dual: 0.0,
            phi_squared: 0.0,
            phi_xi: self.phi.apply(&self.xi).max_abs(),
            eta_phi: 0.0,
            metric_compatibility: 0.0,
            reeb_curvature: 0.0,
            reeb_ricci: 0.0,
            ricci_trace: 0.0,
        };
        let phi2 = self.phi.compose(&self.phi);
        let eta = self.eta.components();
        for i in 0..d {
            r.eta_metric_dual = r.eta_metric_dual.max((eta[i] - xi_flat.components()[i]).abs());
            r.eta_phi = r.eta_phi.max(self.eta.apply(&self.phi.column(i)).abs());
            for j in 0..d {
                let target = if i == j { -1.0 } else { 0.0 } + self.xi.components()[i] * eta[j];
                r.phi_squared = r.phi_squared.max((phi2.get(i, j) - target).abs());
                let lhs = g.eval(&self.phi.column(i), &self.phi.column(j));
                r.metric_compatibility = r.metric_compatibility.max((lhs - g.get(i, j) + eta[i] * eta[j]).abs());
            }
        }
        let two_n = 2.0 * self.n as f64;
        for x in 0..d {
            r.reeb_ricci = r.reeb_ricci.max((self.ricci.eval(&self.xi, &basis[x]) - two_n * eta[x]).abs());
            for y in 0..d {
                for w in 0..d {
                    let lhs = self.curvature.eval(&basis[x], &basis[y], &self.xi, &basis[w]);
                    let rhs = eta[y] * g.get(x, w) - eta[x] * g.get(y, w);
                    r.reeb_curvature = r.reeb_curvature.max((lhs - rhs).abs());
                }
            }
        }
        let traced = contract_trace(&self.curvature, g, (Slot::Second, Slot::Third))?;
        r.ricci_trace = traced.max_abs_diff(&self.ricci);
        Ok(r)
    }

    /// Residuals of the φ-curvature identities, evaluated in the adapted
    /// orthonormal frame.
    pub fn identity_residuals(&self) -> Result<SasakianIdentityResiduals> {
        let m = self.to_adapted_frame()?;
        let d = m.dim();
        let r = &m.curvature;
        let phi = &m.phi;
        let eta = m.eta.components();
        // With g = I: g(φe_a, e_b) = φ[b][a].
        let gphi = |a: usize, b: usize| phi.get(b, a);
        // R with φ applied to one slot.
        let r_phi3 = |x: usize, y: usize, z: usize, w: usize| (0..d).map(|k| phi.get(k, z) * r.get(x, y, k, w)).sum::<f64>();
        let r_phi1 = |z: usize, x: usize, y: usize, w: usize| (0..d).map(|k| phi.get(k, z) * r.get(k, x, y, w)).sum::<f64>();
        let r_phi4 = |x: usize, y: usize, z: usize, w: usize| (0..d).map(|k| phi.get(k, w) * r.get(x, y, z, k)).sum::<f64>();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };

        let mut out = SasakianIdentityResiduals {
            phi_curvature: 0.0,
            phi_trace_difference: 0.0,
            phi_trace: 0.0,
            phi_double_trace: 0.0,
        };
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    for w in 0..d {
                        let lhs = r_phi3(x, y, z, w) - r_phi1(z, x, y, w);
                        let rhs = -delta(x, y) * gphi(z, w) - 2.0 * gphi(y, z) * delta(x, w) + gphi(x, z) * delta(y, w);
                        out.phi_curvature = out.phi_curvature.max((lhs - rhs).abs());
                    }
                }
                let diff: f64 = (0..d).map(|i| r_phi3(x, y, i, i) - r_phi1(i, x, y, i)).sum();
                out.phi_trace_difference = out.phi_trace_difference.max((diff - 3.0 * gphi(x, y)).abs());
                let tr: f64 = (0..d).map(|i| r_phi4(x, y, i, i)).sum();
                out.phi_trace = out.phi_trace.max((tr + 2.0 * gphi(x, y)).abs());
                // Σ_i R(X, φY, e_i, φe_i)
                let dtr: f64 = (0..d)
                    .map(|k| phi.get(k, y) * (0..d).map(|i| r_phi4(x, k, i, i)).sum::<f64>())
                    .sum();
                out.phi_double_trace = out.phi_double_trace.max((dtr + 2.0 * (delta(x, y) - eta[x] * eta[y])).abs());
            }
        }
        Ok(out)
    }

    /// Reads off `A` and `B` in `ρ = A g + B η⊗η`: `A = ρ(e, e)` for the first
    /// unit `e ⊥ ξ` of the adapted frame, `B = ρ(ξ, ξ) − A`. The residual
    /// measures how far the whole tensor is from that form, so a Ricci tensor
    /// that is not η-Einstein shows up as a large residual.
    pub fn classify_eta_einstein(&self) -> Result<EtaEinsteinCoefficients> {
        let frame = self.adapted_frame()?;
        let xi_unit = frame.last().expect("non-empty frame");
        let a = self.ricci.eval(&frame[0], &frame[0]);
        let b = self.ricci.eval(xi_unit, xi_unit) - a;
        let model = BilinearForm::outer(&self.eta, &self.eta).scaled(b).plus(&self.g.scaled(a));
        Ok(EtaEinsteinCoefficients {
            a,
            b,
            residual: self.ricci.max_abs_diff(&model),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TOL_ALGEBRAIC;

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(SasakianPointModel::round_sphere(0), Err(Error::InvalidDimension(0)));
        assert_eq!(SasakianPointModel::space_form(0, 3.0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn round_sphere_ricci() {
        let m = SasakianPointModel::round_sphere(1).unwrap();
        assert_eq!(m.dim(), 3);
        assert!(m.ricci().max_abs_diff(&m.metric().scaled(2.0)) < 1e-15);
        let m = SasakianPointModel::round_sphere(2).unwrap();
        assert!(m.ricci().max_abs_diff(&m.metric().scaled(4.0)) < 1e-15);
    }

    #[test]
    fn constructed_models_satisfy_structure() {
        for q in 1..4 {
            for c in [-1.0, 1.0, 3.0, 5.0, 7.0, 0.3] {
                let m = SasakianPointModel::space_form(q, c).unwrap();
                assert!(m.structure_residuals().unwrap().max() < TOL_ALGEBRAIC, "q={q} c={c}");
                assert!(m.curvature().symmetry_residuals().max() < TOL_ALGEBRAIC);
            }
        }
    }

    #[test]
    fn phi_curvature_identities_on_round_spheres() {
        for p in 1..4 {
            let m = SasakianPointModel::round_sphere(p).unwrap();
            assert!(m.identity_residuals().unwrap().max() < TOL_ALGEBRAIC, "p={p}");
        }
    }

    #[test]
    fn phi_curvature_identities_scale_with_c_minus_one() {
        // On a space form Σ R(X, Y, e_i, φe_i) = −(2 + (q+1)(c−1)) g(φX, Y),
        // so the φ-trace identities only hold at c = 1.
        for q in 1..4 {
            for c in [-1.0, 0.3, 3.0, 5.0, 7.0] {
                let r = SasakianPointModel::space_form(q, c).unwrap().identity_residuals().unwrap();
                let k = (c - 1.0f64).abs();
                let n1 = (q + 1) as f64;
                assert!((r.phi_curvature - 2.0 * k).abs() < 1e-12, "q={q} c={c} {r:?}");
                assert!((r.phi_trace - n1 * k).abs() < 1e-12);
                assert!((r.phi_double_trace - n1 * k).abs() < 1e-12);
                assert!((r.phi_trace_difference - 1.5 * n1 * k).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn space_form_at_one_is_the_round_sphere() {
        for q in 1..4 {
            assert_eq!(
                SasakianPointModel::space_form(q, 1.0).unwrap(),
                SasakianPointModel::round_sphere(q).unwrap()
            );
        }
    }

    #[test]
    fn space_form_ricci_coefficients() {
        let m = SasakianPointModel::space_form(1, 5.0).unwrap();
        let k = m.classify_eta_einstein().unwrap();
        assert!((k.a - 6.0).abs() < 1e-14 && (k.b + 4.0).abs() < 1e-14 && k.residual < 1e-14);
        // q = 2, c = 3: ½(2·6 + 2) = 7 and −(3/2)·2 = −3.
        let m = SasakianPointModel::space_form(2, 3.0).unwrap();
        let k = m.classify_eta_einstein().unwrap();
        assert!((k.a - 7.0).abs() < 1e-14 && (k.b + 3.0).abs() < 1e-14 && k.residual < 1e-14);
    }

    #[test]
    fn sphere_is_einstein_with_constant_2p() {
        for p in 1..5 {
            let k = SasakianPointModel::round_sphere(p).unwrap().classify_eta_einstein().unwrap();
            assert_eq!((k.a, k.b, k.residual), (2.0 * p as f64, 0.0, 0.0));
        }
    }

    #[test]
    fn perturbed_ricci_is_not_eta_einstein() {
        let m = SasakianPointModel::round_sphere(1).unwrap();
        let mut e = m.ricci().entries().to_vec();
        e[1] += 0.1;
        let k = m
            .with_ricci(BilinearForm::new(3, e).unwrap())
            .unwrap()
            .classify_eta_einstein()
            .unwrap();
        assert!(k.residual >= 0.1 - 1e-15);
        assert!(!k.holds(1e-3));
    }

    #[test]
    fn deformation_identity_and_inverse() {
        let m = SasakianPointModel::space_form(2, 3.0).unwrap();
        let same = m.d_homothetic_deform(1.0).unwrap();
        assert!(same.curvature().max_abs_diff(m.curvature()) < 1e-14);
        assert!(same.metric().max_abs_diff(m.metric()) == 0.0);
        let back = m.d_homothetic_deform(0.7).unwrap().d_homothetic_deform(1.0 / 0.7).unwrap();
        assert!(back.metric().max_abs_diff(m.metric()) < 1e-12);
        assert!(back.curvature().max_abs_diff(m.curvature()) < 1e-12);
        assert!((&back.xi().clone() - m.xi()).max_abs() < 1e-12);
    }

    #[test]
    fn deformation_rejects_non_positive() {
        let m = SasakianPointModel::round_sphere(1).unwrap();
        assert!(m.d_homothetic_deform(0.0).is_err());
        assert!(m.d_homothetic_deform(-2.0).is_err());
        assert!(m.d_homothetic_deform(f64::NAN).is_err());
    }

    #[test]
    fn deformed_sphere_is_space_form() {
        // alpha = 1/2 on the unit sphere gives c' = 4/(1/2) - 3 = 5.
        let m = SasakianPointModel::round_sphere(1).unwrap().d_homothetic_deform(0.5).unwrap();
        assert!(m.structure_residuals().unwrap().max() < 1e-12);
        let canon = m.to_adapted_frame().unwrap();
        let target = SasakianPointModel::space_form(1, 5.0).unwrap();
        assert!(canon.curvature().max_abs_diff(target.curvature()) < 1e-12);
        assert!(canon.metric().max_abs_diff(target.metric()) < 1e-12);
    }

    #[test]
    fn flat_curvature_violates_phi_trace() {
        let (g, phi, xi, eta) = canonical_structure(1);
        let m = SasakianPointModel::from_parts(1, g, phi, xi, eta, CovariantTensor4::zeros(3)).unwrap();
        let r = m.identity_residuals().unwrap();
        assert!((r.phi_trace - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_rational_ricci_matches_closed_form() {
        use num_rational::Ratio;
        let q = 2usize;
        let d = 2 * q + 1;
        let (g, phi, xi, eta) = canonical_structure(q);
        let r = |x: f64| Ratio::<i64>::from_integer(x as i64);
        let conv = |v: &[f64]| v.iter().map(|&x| r(x)).collect::<Vec<_>>();
        let c = Ratio::new(7, 3);
        let rt = space_form_curvature(
            d,
            &conv(g.entries()),
            &conv(phi.entries()),
            &conv(xi.components()),
            &conv(eta.components()),
            c,
        );
        let ric = ricci_in_orthonormal_frame(d, &rt);
        let qq = Ratio::from_integer(q as i64);
        let one = Ratio::from_integer(1);
        let a = (qq * (c + 3) + c - one) / 2;
        let b = -(qq + one) / 2 * (c - one);
        for x in 0..d {
            for y in 0..d {
                let eta_xy = if x == d - 1 && y == d - 1 { one } else { Ratio::from_integer(0) };
                let g_xy = if x == y { one } else { Ratio::from_integer(0) };
                assert_eq!(ric[x * d + y], a * g_xy + b * eta_xy);
            }
        }
    }
}
