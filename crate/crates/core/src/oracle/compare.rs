//! Residuals of the oracle against first principles and against the
//! closed-form engine.

use alloc::vec;
use alloc::vec::Vec;

use super::chart::{ProductChart, SasakianFields, SphereChart};
use super::fd::{christoffels_fd, gradient, nijenhuis_fd, sample_metric_field, Christoffels, StencilConfig};
use crate::error::{Error, Result};
use crate::hermitian::{integrability_residual, NablaJ, ProductHermitianModel};
use crate::sasakian::adapted_frame;
use crate::tensor::{contract_trace, BilinearForm, Slot, TangentVector};

/// First-derivative identities of a Sasakian structure, in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldIdentityResiduals {
    /// `∇_X ξ + φX`
    pub nabla_xi: f64,
    /// `(∇_X η)(Y) + g(φX, Y)`
    pub nabla_eta: f64,
    /// `(∇_X φ)Y − g(X, Y)ξ + η(Y)X`
    pub nabla_phi: f64,
    /// `dη(X, Y) − g(X, φY)` with `dη(X, Y) = ½(Xη(Y) − Yη(X) − η([X, Y]))`
    pub contact: f64,
    /// `∂g − Γ·g − g·Γ`
    pub metric_compatibility: f64,
    /// `Γ^k_{ij} − Γ^k_{ji}`
    pub torsion: f64,
}

impl FieldIdentityResiduals {
    pub fn max(&self) -> f64 {
        self.nabla_xi
            .max(self.nabla_eta)
            .max(self.nabla_phi)
            .max(self.contact)
            .max(self.metric_compatibility)
            .max(self.torsion)
    }
}

/// Curvature identities of a Sasakian structure, in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureIdentityResiduals {
    /// `R(X, Y)ξ − η(Y)X + η(X)Y`, lowered
    pub reeb_curvature: f64,
    /// `ρ(ξ, X) − 2n η(X)`
    pub reeb_ricci: f64,
    /// Worst deviation of the curvature symmetries and first Bianchi identity.
    pub symmetries: f64,
}

impl CurvatureIdentityResiduals {
    pub fn max(&self) -> f64 {
        self.reeb_curvature.max(self.reeb_ricci).max(self.symmetries)
    }
}

fn metric_field(chart: &SphereChart) -> impl Fn(&[f64]) -> Result<Vec<f64>> + '_ {
    move |u: &[f64]| chart.metric(u)
}

/// Checks `∇ξ = −φ`, `∇η = −g(φ·, ·)`, `(∇_X φ)Y = g(X, Y)ξ − η(Y)X`, the
/// contact condition and the Christoffel symbols themselves at `u`.
pub fn field_identity_residuals(chart: &SphereChart, u: &[f64], cfg: &StencilConfig) -> Result<FieldIdentityResiduals> {
    let d = chart.dim();
    let gamma = christoffels_fd(&metric_field(chart), u, cfg)?;
    let f = chart.fields(u)?;
    let dxi = gradient(&|v: &[f64]| chart.fields(v).map(|f| f.xi.into_components()), u, cfg)?;
    let deta = gradient(&|v: &[f64]| chart.fields(v).map(|f| f.eta.components().to_vec()), u, cfg)?;
    let dphi = gradient(&|v: &[f64]| chart.fields(v).map(|f| f.phi.entries().to_vec()), u, cfg)?;
    let (xi, eta) = (f.xi.components(), f.eta.components());
    let (g, phi) = (&f.g, &f.phi);
    // g(φ∂_i, ∂_j)
    let gphi = |i: usize, j: usize| (0..d).map(|k| phi.get(k, i) * g.get(k, j)).sum::<f64>();
    let mut r = FieldIdentityResiduals {
        nabla_xi: 0.0,
        nabla_eta: 0.0,
        nabla_phi: 0.0,
        contact: 0.0,
        metric_compatibility: gamma.compatibility_residual(),
        torsion: gamma.torsion_residual(),
    };
    for i in 0..d {
        for k in 0..d {
            let cov = dxi[i * d + k] + (0..d).map(|l| gamma.second(k, i, l) * xi[l]).sum::<f64>();
            r.nabla_xi = r.nabla_xi.max((cov + phi.get(k, i)).abs());
        }
        for j in 0..d {
            let cov = deta[i * d + j] - (0..d).map(|l| gamma.second(l, i, j) * eta[l]).sum::<f64>();
            r.nabla_eta = r.nabla_eta.max((cov + gphi(i, j)).abs());
            let d_eta = 0.5 * (deta[i * d + j] - deta[j * d + i]);
            let g_x_phiy = (0..d).map(|k| g.get(i, k) * phi.get(k, j)).sum::<f64>();
            r.contact = r.contact.max((d_eta - g_x_phiy).abs());
            for k in 0..d {
                let mut cov = dphi[(i * d + k) * d + j];
                for l in 0..d {
                    cov += gamma.second(k, i, l) * phi.get(l, j) - gamma.second(l, i, j) * phi.get(k, l);
                }
                let delta = if k == i { 1.0 } else { 0.0 };
                let target = g.get(i, j) * xi[k] - eta[j] * delta;
                r.nabla_phi = r.nabla_phi.max((cov - target).abs());
            }
        }
    }
    Ok(r)
}

/// Checks `R(X, Y)ξ = η(Y)X − η(X)Y`, `ρ(ξ, X) = 2n η(X)` and the curvature
/// symmetries on the finite-difference curvature at `u`.
pub fn curvature_identity_residuals(chart: &SphereChart, u: &[f64], cfg: &StencilConfig) -> Result<CurvatureIdentityResiduals> {
    let d = chart.dim();
    let sample = sample_metric_field(&metric_field(chart), u, cfg)?;
    let f = chart.fields(u)?;
    let r = &sample.curvature;
    let (xi, eta, g) = (&f.xi, f.eta.components(), &f.g);
    let basis: Vec<TangentVector> = (0..d).map(|i| TangentVector::basis(d, i)).collect();
    let mut reeb_curvature: f64 = 0.0;
    for x in 0..d {
        for y in 0..d {
            for w in 0..d {
                let lhs = r.eval(&basis[x], &basis[y], xi, &basis[w]);
                let rhs = eta[y] * g.get(x, w) - eta[x] * g.get(y, w);
                reeb_curvature = reeb_curvature.max((lhs - rhs).abs());
            }
        }
    }
    let ricci = contract_trace(r, g, (Slot::Second, Slot::Third))?;
    let two_n = 2.0 * chart.p() as f64;
    let reeb_ricci = (0..d)
        .map(|x| (ricci.eval(xi, &basis[x]) - two_n * eta[x]).abs())
        .fold(0.0, f64::max);
    Ok(CurvatureIdentityResiduals {
        reeb_curvature,
        reeb_ricci,
        symmetries: r.symmetry_residuals().max(),
    })
}

/// Deviations of the eight connection blocks `ḡ(∇̄_X̄ Ȳ, Z̄)`, indexed by
/// which factor `X̄, Ȳ, Z̄` lie in (`m` for the first, `p` for the second).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionBlockResiduals {
    pub mmm: f64,
    pub pmm: f64,
    pub mpm: f64,
    pub mmp: f64,
    pub ppm: f64,
    pub pmp: f64,
    pub mpp: f64,
    pub ppp: f64,
}

impl ConnectionBlockResiduals {
    pub fn max(&self) -> f64 {
        [self.mmm, self.pmm, self.mpm, self.mmp, self.ppm, self.pmp, self.mpp, self.ppp]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Max-norm deviations of the finite-difference oracle from the closed-form
/// model, after transport to the adapted orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub metric: f64,
    pub complex_structure: f64,
    pub curvature: f64,
    pub ricci: f64,
    /// Against the closed-form Ricci-* tensor.
    pub ricci_star: f64,
    /// Against the Ricci-* tensor computed from the closed-form curvature.
    pub ricci_star_definitional: f64,
    pub connection_blocks: ConnectionBlockResiduals,
    pub nabla_j: f64,
    /// `T(X, Y, Z) − T(JX, JY, Z)` for the finite-difference `T = ḡ((∇̄J̄)·, ·)`.
    pub integrability: f64,
    /// Largest Nijenhuis component in chart coordinates.
    pub nijenhuis: f64,
}

impl OracleComparison {
    /// Quantities built from second derivatives of the metric.
    pub fn curvature_max(&self) -> f64 {
        self.curvature.max(self.ricci).max(self.ricci_star)
    }

    /// Quantities built from first derivatives.
    pub fn first_derivative_max(&self) -> f64 {
        self.connection_blocks
            .max()
            .max(self.nabla_j)
            .max(self.integrability)
            .max(self.nijenhuis)
    }
}

/// `{e_1, φe_1, …, ξ}` of each factor at `(u, u')`, placed side by side as
/// product coordinate vectors.
pub fn product_adapted_frame(chart: &ProductChart, coords: &[f64]) -> Result<Vec<TangentVector>> {
    let (u, up) = chart.split(coords)?;
    let n = chart.dim();
    let d1 = chart.factor().dim();
    let mut out = Vec::with_capacity(n);
    for (fields, offset) in [(chart.factor().fields(u)?, 0), (chart.factor_prime().fields(up)?, d1)] {
        let SasakianFields { g, phi, xi, .. } = fields;
        for v in adapted_frame(&g, &phi, &xi)? {
            let mut w = vec![0.0; n];
            w[offset..offset + v.dim()].copy_from_slice(v.components());
            out.push(TangentVector::new(w));
        }
    }
    Ok(out)
}

/// `ḡ((∇̄_{∂_i} J̄)∂_j, ∂_k)` in product coordinates.
fn nabla_j_coords(gamma: &Christoffels, j: &[f64], dj: &[f64]) -> NablaJ {
    let n = gamma.dim();
    NablaJ::from_fn(n, |x, y, z| {
        let mut acc = 0.0;
        for l in 0..n {
            let mut v = dj[(x * n + l) * n + y];
            for m in 0..n {
                v += gamma.second(l, x, m) * j[m * n + y] - j[l * n + m] * gamma.second(m, x, y);
            }
            acc += gamma.metric(z, l) * v;
        }
        acc
    })
}

fn connection_blocks(
    chart: &ProductChart,
    coords: &[f64],
    product: &Christoffels,
    cfg: &StencilConfig,
) -> Result<ConnectionBlockResiduals> {
    let (u, up) = chart.split(coords)?;
    let (cm, cp) = (chart.factor(), chart.factor_prime());
    let gm = christoffels_fd(&metric_field(cm), u, cfg)?;
    let gp = christoffels_fd(&metric_field(cp), up, cfg)?;
    let (f, fp) = (cm.fields(u)?, cp.fields(up)?);
    let (d1, d2) = (cm.dim(), cp.dim());
    let params = chart.params();
    let (a, t) = (params.a(), params.s() - 1.0);
    let (eta, etap) = (f.eta.components(), fp.eta.components());
    // g(φ∂_i, ∂_j) on each factor.
    let gphi = |fl: &SasakianFields, i: usize, j: usize| (0..fl.g.dim()).map(|k| fl.phi.get(k, i) * fl.g.get(k, j)).sum::<f64>();
    // η(∇_{∂_i}∂_j) on each factor.
    let eta_nabla = |c: &Christoffels, e: &[f64], i: usize, j: usize| (0..e.len()).map(|l| c.second(l, i, j) * e[l]).sum::<f64>();
    let mut r = ConnectionBlockResiduals {
        mmm: 0.0,
        pmm: 0.0,
        mpm: 0.0,
        mmp: 0.0,
        ppm: 0.0,
        pmp: 0.0,
        mpp: 0.0,
        ppp: 0.0,
    };
    let n = d1 + d2;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let fd = product.first(i, j, k);
                let (xm, ym, zm) = (i < d1, j < d1, k < d1);
                let (x, y, z) = (
                    if xm { i } else { i - d1 },
                    if ym { j } else { j - d1 },
                    if zm { k } else { k - d1 },
                );
                let (slot, closed) = match (xm, ym, zm) {
                    (true, true, true) => (&mut r.mmm, gm.first(x, y, z)),
                    (false, true, true) => (&mut r.pmm, -a * etap[x] * gphi(&f, y, z)),
                    (true, false, true) => (&mut r.mpm, -a * etap[y] * gphi(&f, x, z)),
                    (true, true, false) => (&mut r.mmp, a * eta_nabla(&gm, eta, x, y) * etap[z]),
                    (false, false, true) => (&mut r.ppm, a * eta_nabla(&gp, etap, x, y) * eta[z]),
                    (false, true, false) => (&mut r.pmp, -a * eta[y] * gphi(&fp, x, z)),
                    (true, false, false) => (&mut r.mpp, -a * eta[x] * gphi(&fp, y, z)),
                    (false, false, false) => (
                        &mut r.ppp,
                        gp.first(x, y, z)
                            + t * (eta_nabla(&gp, etap, x, y) * etap[z] - etap[x] * gphi(&fp, y, z) - etap[y] * gphi(&fp, x, z)),
                    ),
                };
                *slot = slot.max((fd - closed).abs());
            }
        }
    }
    Ok(r)
}

/// Compares the finite-difference geometry of `chart` at `coords` with the
/// closed-form `model`. FD tensors are transported to the frame of
/// [`product_adapted_frame`], which is where the closed forms live.
pub fn compare_with_algebraic(
    chart: &ProductChart,
    model: &ProductHermitianModel,
    coords: &[f64],
    cfg: &StencilConfig,
) -> Result<OracleComparison> {
    if chart.factor().p() != model.p() || chart.factor_prime().p() != model.q() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: chart.dim(),
        });
    }
    if chart.params() != model.params() {
        return Err(Error::InvalidParameter("chart and model use different (a, b)"));
    }
    let frame = product_adapted_frame(chart, coords)?;
    let g_field = |x: &[f64]| chart.metric(x);
    let j_field = |x: &[f64]| chart.complex_structure(x);
    let sample = sample_metric_field(&g_field, coords, cfg)?;
    let (g, j) = chart.structure(coords)?;
    let r = &sample.curvature;

    let j_frame = j.in_frame(&frame)?;
    let ricci = contract_trace(r, &g, (Slot::Second, Slot::Third))?;
    let ricci_star = crate::hermitian::ricci_star_from_curvature(&g, &j, r)?.in_frame(&frame);
    let closed_ricci_star_def = model.ricci_star_from_curvature()?;

    let dj = gradient(&j_field, coords, cfg)?;
    let t = nabla_j_coords(&sample.christoffels, j.entries(), &dj).in_frame(&frame);

    Ok(OracleComparison {
        metric: g.in_frame(&frame).max_abs_diff(model.metric()),
        complex_structure: j_frame.max_abs_diff(model.complex_structure()),
        curvature: r.in_frame(&frame).max_abs_diff(model.curvature()),
        ricci: ricci.in_frame(&frame).max_abs_diff(model.ricci()),
        ricci_star: ricci_star.max_abs_diff(model.ricci_star()),
        ricci_star_definitional: ricci_star.max_abs_diff(&closed_ricci_star_def),
        connection_blocks: connection_blocks(chart, coords, &sample.christoffels, cfg)?,
        nabla_j: t.max_abs_diff(model.nabla_j()),
        integrability: integrability_residual(&t, &j_frame),
        nijenhuis: nijenhuis_fd(&j_field, coords, cfg)?.max_abs(),
    })
}

/// `max |ρ − λ g|` for the finite-difference Ricci tensor of the product
/// chart, with `λ` given.
pub fn einstein_residual_fd(chart: &ProductChart, coords: &[f64], lambda: f64, cfg: &StencilConfig) -> Result<f64> {
    let frame = product_adapted_frame(chart, coords)?;
    let sample = sample_metric_field(&|x: &[f64]| chart.metric(x), coords, cfg)?;
    let (g, _) = chart.structure(coords)?;
    let ricci = contract_trace(&sample.curvature, &g, (Slot::Second, Slot::Third))?.in_frame(&frame);
    let target = g.in_frame(&frame).scaled(lambda);
    Ok(ricci.max_abs_diff(&target))
}

/// Sectional curvature `K(X, Y)` of the finite-difference curvature of a
/// single chart.
pub fn sectional_curvature_fd(chart: &SphereChart, u: &[f64], x: &TangentVector, y: &TangentVector, cfg: &StencilConfig) -> Result<f64> {
    let sample = sample_metric_field(&metric_field(chart), u, cfg)?;
    let g = BilinearForm::new(chart.dim(), chart.metric(u)?)?;
    let area = g.eval(x, x) * g.eval(y, y) - g.eval(x, y) * g.eval(x, y);
    if !(area > 0.0) {
        return Err(Error::InvalidParameter("sectional curvature needs independent vectors"));
    }
    // K = R(X, Y, Y, X) / area with this sign convention.
    Ok(sample.curvature.eval(x, y, y, x) / area)
}
