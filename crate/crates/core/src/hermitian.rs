//! The Hermitian structure `(ḡ_{a,b}, J̄_{a,b})` on `M x M'` and its
//! closed-form curvature.
//!
//! Product tensors are written in the basis obtained by concatenating the two
//! factor bases: `{e_1, …, e_{2p}, ξ, e'_1, …, e'_{2q}, ξ'}` when the factors
//! are in their adapted frames. Each basis vector lies in one factor, so every
//! block formula below applies to it directly, and multilinearity fills in the
//! rest. The mixed metric entry `ḡ(ξ, ξ') = a` sits at `(2p, N−1)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sasakian::SasakianPointModel;
use crate::tensor::{contract_trace, orthonormal_frame, BilinearForm, CovariantTensor4, Endomorphism, Slot, TangentVector};

/// The pair `(a, b)` selecting a member of the family; `b ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianParams {
    a: f64,
    b: f64,
}

impl HermitianParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter("a and b must be finite"));
        }
        if b == 0.0 {
            return Err(Error::InvalidParameter("b must be non-zero"));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `a² + b²`
    pub fn s(&self) -> f64 {
        self.a * self.a + self.b * self.b
    }
}

/// A tangent vector `X + X'` of the product.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    pub m_part: TangentVector,
    pub mprime_part: TangentVector,
}

impl ProductVector {
    pub fn new(m_part: TangentVector, mprime_part: TangentVector) -> Self {
        Self { m_part, mprime_part }
    }

    pub fn from_m(m_part: TangentVector, mprime_dim: usize) -> Self {
        Self::new(m_part, TangentVector::zeros(mprime_dim))
    }

    pub fn from_mprime(m_dim: usize, mprime_part: TangentVector) -> Self {
        Self::new(TangentVector::zeros(m_dim), mprime_part)
    }

    pub fn to_flat(&self) -> TangentVector {
        let mut v = self.m_part.components().to_vec();
        v.extend_from_slice(self.mprime_part.components());
        TangentVector::new(v)
    }

    pub fn from_flat(v: &TangentVector, m_dim: usize) -> Self {
        let (m, mp) = v.components().split_at(m_dim);
        Self::new(TangentVector::new(m.to_vec()), TangentVector::new(mp.to_vec()))
    }
}

/// Per-factor quantities the block formulas read.
struct FactorData {
    d: usize,
    n: f64,
    g: Vec<f64>,
    /// `g(φ e_x, e_y)`
    gphi: Vec<f64>,
    eta: Vec<f64>,
    /// `η(R(e_x, e_y) e_z) = R(e_x, e_y, e_z, ξ)`
    eta_r: Vec<f64>,
}

impl FactorData {
    fn new(m: &SasakianPointModel) -> Self {
        let d = m.dim();
        let g = m.metric().entries().to_vec();
        let mut gphi = vec![0.0; d * d];
        for x in 0..d {
            for y in 0..d {
                gphi[x * d + y] = (0..d).map(|k| m.phi().get(k, x) * g[k * d + y]).sum();
            }
        }
        let xi = m.xi().components();
        let mut eta_r = vec![0.0; d * d * d];
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    eta_r[(x * d + y) * d + z] = (0..d).map(|w| m.curvature().get(x, y, z, w) * xi[w]).sum();
                }
            }
        }
        Self {
            d,
            n: m.n() as f64,
            g,
            gphi,
            eta: m.eta().components().to_vec(),
            eta_r,
        }
    }

    #[inline]
    fn g(&self, x: usize, y: usize) -> f64 {
        self.g[x * self.d + y]
    }

    #[inline]
    fn gphi(&self, x: usize, y: usize) -> f64 {
        self.gphi[x * self.d + y]
    }

    /// `g(X, Y) − η(X)η(Y)`
    #[inline]
    fn h(&self, x: usize, y: usize) -> f64 {
        self.g(x, y) - self.eta[x] * self.eta[y]
    }
}

/// Which factor a product basis index belongs to, and its local index.
#[derive(Clone, Copy)]
enum Side {
    M(usize),
    P(usize),
}

fn side(i: usize, d1: usize) -> Side {
    if i < d1 {
        Side::M(i)
    } else {
        Side::P(i - d1)
    }
}

fn check_factor(m: &SasakianPointModel) -> Result<()> {
    if m.n() == 0 {
        Err(Error::InvalidDimension(0))
    } else {
        Ok(())
    }
}

/// `ḡ_{a,b} = g + a(η⊗η' + η'⊗η) + (a²+b²−1)η'⊗η' + g'`.
pub fn build_product_metric(
    factor: &SasakianPointModel,
    factor_prime: &SasakianPointModel,
    params: &HermitianParams,
) -> Result<BilinearForm> {
    check_factor(factor)?;
    check_factor(factor_prime)?;
    let (m, p) = (FactorData::new(factor), FactorData::new(factor_prime));
    let (a, t) = (params.a, params.s() - 1.0);
    let n = m.d + p.d;
    Ok(BilinearForm::symmetric_from_fn(n, |i, j| match (side(i, m.d), side(j, m.d)) {
        (Side::M(x), Side::M(y)) => m.g(x, y),
        (Side::M(x), Side::P(y)) => a * m.eta[x] * p.eta[y],
        (Side::P(x), Side::M(y)) => a * p.eta[x] * m.eta[y],
        (Side::P(x), Side::P(y)) => p.g(x, y) + t * p.eta[x] * p.eta[y],
    }))
}

/// `J̄X = φX − (a/b)η(X)ξ + (1/b)η(X)ξ'`,
/// `J̄X' = φ'X' − ((a²+b²)/b)η'(X')ξ + (a/b)η'(X')ξ'`.
pub fn build_product_complex_structure(
    factor: &SasakianPointModel,
    factor_prime: &SasakianPointModel,
    params: &HermitianParams,
) -> Result<Endomorphism> {
    check_factor(factor)?;
    check_factor(factor_prime)?;
    let (d1, d2) = (factor.dim(), factor_prime.dim());
    let (a, b, s) = (params.a, params.b, params.s());
    let (xi, xip) = (factor.xi().components(), factor_prime.xi().components());
    let (eta, etap) = (factor.eta().components(), factor_prime.eta().components());
    Ok(Endomorphism::from_fn(d1 + d2, |i, j| match (side(i, d1), side(j, d1)) {
        (Side::M(r), Side::M(c)) => factor.phi().get(r, c) - (a / b) * eta[c] * xi[r],
        (Side::P(r), Side::M(c)) => (1.0 / b) * eta[c] * xip[r],
        (Side::M(r), Side::P(c)) => -(s / b) * etap[c] * xi[r],
        (Side::P(r), Side::P(c)) => factor_prime.phi().get(r, c) + (a / b) * etap[c] * xip[r],
    }))
}

/// The seven curvature blocks, for index patterns written with the unprimed
/// factor as `0` and the primed one as `1`. Returns `None` for patterns that
/// are obtained from these by the curvature symmetries.
fn curvature_block(
    m: &FactorData,
    p: &FactorData,
    rm: &CovariantTensor4,
    rp: &CovariantTensor4,
    a: f64,
    s: f64,
    idx: [Side; 4],
) -> Option<f64> {
    use Side::{M, P};
    let t = s - 1.0;
    Some(match idx {
        [M(x), M(y), M(z), M(w)] => rm.get(x, y, z, w),
        [M(x), P(y), M(z), M(w)] => -a * p.eta[y] * (m.g(x, z) * m.eta[w] - m.g(x, w) * m.eta[z]),
        [P(x), P(y), M(z), M(w)] => 2.0 * a * p.gphi(x, y) * m.gphi(z, w),
        [M(x), P(y), M(z), P(w)] => {
            a * m.gphi(x, z) * p.gphi(y, w) - a * a * p.eta[y] * p.eta[w] * m.h(x, z) - a * a * m.eta[x] * m.eta[z] * p.h(y, w)
        }
        [P(x), P(y), P(z), M(w)] => a * s * m.eta[w] * (p.eta[x] * p.g(y, z) - p.eta[y] * p.g(x, z)),
        [M(x), M(y), M(z), P(w)] => a * m.eta_r[(x * m.d + y) * m.d + z] * p.eta[w],
        [P(x), P(y), P(z), P(w)] => {
            let (e, g) = (&p.eta, |u, v| p.g(u, v));
            rp.get(x, y, z, w) + 2.0 * t * (e[x] * e[w] * g(y, z) - e[y] * e[w] * g(x, z) - e[x] * e[z] * g(y, w) + e[y] * e[z] * g(x, w))
                - t * t * (e[x] * e[z] * g(y, w) - e[y] * e[z] * g(x, w) + e[y] * e[w] * g(x, z) - e[x] * e[w] * g(y, z))
                + t * (2.0 * p.gphi(x, y) * p.gphi(z, w) + p.gphi(x, z) * p.gphi(y, w) - p.gphi(y, z) * p.gphi(x, w))
        }
        _ => return None,
    })
}

/// Curvature `R̄(X̄, Ȳ, Z̄, W̄) = ḡ(R̄(X̄, Ȳ)Z̄, W̄)` of `ḡ_{a,b}`, assembled from
/// the closed-form blocks and extended by the curvature symmetries.
pub fn build_product_curvature(
    factor: &SasakianPointModel,
    factor_prime: &SasakianPointModel,
    params: &HermitianParams,
) -> Result<CovariantTensor4> {
    check_factor(factor)?;
    check_factor(factor_prime)?;
    let (m, p) = (FactorData::new(factor), FactorData::new(factor_prime));
    let (a, s) = (params.a, params.s());
    let d1 = m.d;
    let n = m.d + p.d;
    let (rm, rp) = (factor.curvature(), factor_prime.curvature());
    let block = |i: usize, j: usize, k: usize, l: usize| {
        curvature_block(&m, &p, rm, rp, a, s, [side(i, d1), side(j, d1), side(k, d1), side(l, d1)])
    };
    Ok(CovariantTensor4::from_fn(n, |i, j, k, l| {
        // (sign, permutation) pairs generated by the curvature symmetries.
        let candidates = [
            (1.0, [i, j, k, l]),
            (-1.0, [j, i, k, l]),
            (-1.0, [i, j, l, k]),
            (1.0, [j, i, l, k]),
            (1.0, [k, l, i, j]),
            (-1.0, [l, k, i, j]),
            (-1.0, [k, l, j, i]),
            (1.0, [l, k, j, i]),
        ];
        candidates
            .iter()
            .find_map(|(sign, [x, y, z, w])| block(*x, *y, *z, *w).map(|v| sign * v))
            .expect("every index pattern reduces to a closed-form block")
    }))
}

/// Ricci tensor of `ḡ_{a,b}` in closed form.
pub fn build_product_ricci(
    factor: &SasakianPointModel,
    factor_prime: &SasakianPointModel,
    params: &HermitianParams,
) -> Result<BilinearForm> {
    check_factor(factor)?;
    check_factor(factor_prime)?;
    let (m, p) = (FactorData::new(factor), FactorData::new(factor_prime));
    let (a, s) = (params.a, params.s());
    let t = s - 1.0;
    let (pp, qq) = (m.n, p.n);
    let (rho, rhop) = (factor.ricci(), factor_prime.ricci());
    let mixed = 2.0 * a * (pp + qq * s);
    let reeb_prime = 2.0 * (pp * a * a + t + qq * t * (s + 1.0));
    Ok(BilinearForm::from_fn(m.d + p.d, |i, j| match (side(i, m.d), side(j, m.d)) {
        (Side::M(x), Side::M(y)) => rho.get(x, y) + 2.0 * a * a * qq * m.eta[x] * m.eta[y],
        (Side::M(x), Side::P(y)) => mixed * m.eta[x] * p.eta[y],
        (Side::P(x), Side::M(y)) => mixed * p.eta[x] * m.eta[y],
        (Side::P(x), Side::P(y)) => rhop.get(x, y) - 2.0 * t * p.g(x, y) + reeb_prime * p.eta[x] * p.eta[y],
    }))
}

/// Closed-form Ricci-* tensor:
/// `ρ̄*(X, Y) = (1 − 2aq)(g − η⊗η)(X, Y)`, `ρ̄*(X, Y') = 0`,
/// `ρ̄*(X', Y') = (1 − 2ap − (2q+1)(a²+b²−1))(g' − η'⊗η')(X', Y')`.
///
/// These coefficients take the factors' own Ricci-* operators to be the
/// identity on the contact distribution, which is the case for round spheres.
/// For Sasakian space forms with `c ≠ 1` the definitional trace differs; see
/// [`ricci_star_from_curvature`].
pub fn build_product_ricci_star(
    factor: &SasakianPointModel,
    factor_prime: &SasakianPointModel,
    params: &HermitianParams,
) -> Result<BilinearForm> {
    check_factor(factor)?;
    check_factor(factor_prime)?;
    let (m, p) = (FactorData::new(factor), FactorData::new(factor_prime));
    let (a, t) = (params.a, params.s() - 1.0);
    let (pp, qq) = (m.n, p.n);
    let cm = 1.0 - 2.0 * a * qq;
    let cp = 1.0 - 2.0 * a * pp - (2.0 * qq + 1.0) * t;
    Ok(BilinearForm::symmetric_from_fn(m.d + p.d, |i, j| {
        match (side(i, m.d), side(j, m.d)) {
            (Side::M(x), Side::M(y)) => cm * m.h(x, y),
            (Side::P(x), Side::P(y)) => cp * p.h(x, y),
            _ => 0.0,
        }
    }))
}

/// Ricci-* tensor from its definition, `ρ*(X, Y) = tr(Z ↦ R(X, JZ)JY)`, for
/// any metric, complex structure and curvature written in the same basis.
pub fn ricci_star_from_curvature(g: &BilinearForm, j: &Endomorphism, r: &CovariantTensor4) -> Result<BilinearForm> {
    let n = g.dim();
    let frame = orthonormal_frame(g)?;
    // Σ_a (J f_a)^m (f_a)^l
    let mut h = vec![0.0; n * n];
    for f in &frame {
        let jf = j.apply(f);
        for m in 0..n {
            for l in 0..n {
                h[m * n + l] += jf.components()[m] * f.components()[l];
            }
        }
    }
    Ok(BilinearForm::from_fn(n, |x, y| {
        let mut acc = 0.0;
        for m in 0..n {
            for l in 0..n {
                let hm = h[m * n + l];
                if hm == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let jk = j.get(k, y);
                    if jk != 0.0 {
                        acc += r.get(x, m, k, l) * hm * jk;
                    }
                }
            }
        }
        acc
    }))
}

/// The trilinear form `(X̄, Ȳ, Z̄) ↦ ḡ((∇̄_X̄ J̄)Ȳ, Z̄)` on basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NablaJ {
    n: usize,
    entries: Vec<f64>,
}

impl NablaJ {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    entries.push(f(x, y, z));
                }
            }
        }
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.entries[(x * self.n + y) * self.n + z]
    }

    pub fn eval(&self, x: &TangentVector, y: &TangentVector, z: &TangentVector) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let xy = x.components()[a] * y.components()[b];
                if xy == 0.0 {
                    continue;
                }
                for c in 0..n {
                    acc += xy * z.components()[c] * self.get(a, b, c);
                }
            }
        }
        acc
    }

    /// Components in another frame.
    pub fn in_frame(&self, frame: &[TangentVector]) -> Self {
        Self::from_fn(frame.len(), |a, b, c| self.eval(&frame[a], &frame[b], &frame[c]))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn nabla_j_block(m: &FactorData, p: &FactorData, a: f64, b: f64, s: f64, idx: [Side; 3]) -> f64 {
    use Side::{M, P};
    match idx {
        [M(x), M(y), M(z)] => m.eta[z] * m.g(x, y) - m.eta[y] * m.g(x, z),
        [P(_), M(_), M(_)] => 0.0,
        [M(x), P(y), M(z)] => b * p.eta[y] * m.gphi(x, z) - a * p.eta[y] * m.h(x, z),
        [P(x), P(y), M(z)] => -a * m.eta[z] * (p.eta[x] * p.eta[y] - p.g(x, y)) + b * m.eta[z] * p.gphi(x, y),
        [M(_), P(_), P(_)] => 0.0,
        [P(x), P(y), P(z)] => s * (p.g(x, y) * p.eta[z] - p.g(x, z) * p.eta[y]),
        // (∇_X J) is skew for ḡ, so these follow from the blocks above.
        [M(x), M(y), P(z)] => -nabla_j_block(m, p, a, b, s, [M(x), P(z), M(y)]),
        [P(x), M(y), P(z)] => -nabla_j_block(m, p, a, b, s, [P(x), P(z), M(y)]),
    }
}

/// `ḡ((∇̄_X̄ J̄)Ȳ, Z̄)` on all basis triples of the product.
pub fn build_nabla_j(factor: &SasakianPointModel, factor_prime: &SasakianPointModel, params: &HermitianParams) -> Result<NablaJ> {
    check_factor(factor)?;
    check_factor(factor_prime)?;
    let (m, p) = (FactorData::new(factor), FactorData::new(factor_prime));
    let d1 = m.d;
    let (a, b, s) = (params.a, params.b, params.s());
    Ok(NablaJ::from_fn(m.d + p.d, |x, y, z| {
        nabla_j_block(&m, &p, a, b, s, [side(x, d1), side(y, d1), side(z, d1)])
    }))
}

/// `max |T(X, Y, Z) − T(JX, JY, Z)|` over basis triples; this vanishes exactly
/// when `J` is integrable.
pub fn integrability_residual(nabla_j: &NablaJ, j: &Endomorphism) -> f64 {
    let n = nabla_j.dim();
    let cols: Vec<TangentVector> = (0..n).map(|i| j.column(i)).collect();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let jj = nabla_j.eval(&cols[x], &cols[y], &TangentVector::basis(n, z));
                worst = worst.max((nabla_j.get(x, y, z) - jj).abs());
            }
        }
    }
    worst
}

/// Residuals of the almost Hermitian structure and of the curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianResiduals {
    /// `J̄² + I`
    pub j_squared: f64,
    /// `ḡ(J̄X, J̄Y) − ḡ(X, Y)`
    pub compatibility: f64,
    /// worst curvature symmetry / Bianchi residual of `R̄`
    pub curvature_symmetries: f64,
    /// closed-form `ρ̄` minus the trace of `R̄`
    pub ricci_trace: f64,
}

impl HermitianResiduals {
    pub fn max(&self) -> f64 {
        self.j_squared
            .max(self.compatibility)
            .max(self.curvature_symmetries)
            .max(self.ricci_trace)
    }
}

/// All closed-form data of a member of the family at a product point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductHermitianModel {
    factor: SasakianPointModel,
    factor_prime: SasakianPointModel,
    params: HermitianParams,
    g_bar: BilinearForm,
    j_bar: Endomorphism,
    r_bar: CovariantTensor4,
    ricci_bar: BilinearForm,
    ricci_star_bar: BilinearForm,
    nabla_j: NablaJ,
    tau_bar: f64,
    tau_star_bar: f64,
}

impl ProductHermitianModel {
    /// Builds the model; both factors are first rewritten in their adapted
    /// orthonormal frames so the product basis is
    /// `{e_1, …, e_{2p}, ξ, e'_1, …, e'_{2q}, ξ'}`.
    pub fn build(factor: &SasakianPointModel, factor_prime: &SasakianPointModel, params: HermitianParams) -> Result<Self> {
        let factor = factor.to_adapted_frame()?;
        let factor_prime = factor_prime.to_adapted_frame()?;
        let g_bar = build_product_metric(&factor, &factor_prime, &params)?;
        let j_bar = build_product_complex_structure(&factor, &factor_prime, &params)?;
        let r_bar = build_product_curvature(&factor, &factor_prime, &params)?;
        let ricci_bar = build_product_ricci(&factor, &factor_prime, &params)?;
        let ricci_star_bar = build_product_ricci_star(&factor, &factor_prime, &params)?;
        let nabla_j = build_nabla_j(&factor, &factor_prime, &params)?;
        let mut model = Self {
            factor,
            factor_prime,
            params,
            g_bar,
            j_bar,
            r_bar,
            ricci_bar,
            ricci_star_bar,
            nabla_j,
            tau_bar: 0.0,
            tau_star_bar: 0.0,
        };
        let basis = model.adapted_orthonormal_basis();
        model.tau_bar = basis.iter().map(|f| model.ricci_bar.eval(f, f)).sum();
        model.tau_star_bar = basis.iter().map(|f| model.ricci_star_bar.eval(f, f)).sum();
        Ok(model)
    }

    pub fn p(&self) -> usize {
        self.factor.n()
    }

    pub fn q(&self) -> usize {
        self.factor_prime.n()
    }

    /// Real dimension `2p + 2q + 2`.
    pub fn dim(&self) -> usize {
        self.factor.dim() + self.factor_prime.dim()
    }

    pub fn factor(&self) -> &SasakianPointModel {
        &self.factor
    }

    pub fn factor_prime(&self) -> &SasakianPointModel {
        &self.factor_prime
    }

    pub fn params(&self) -> HermitianParams {
        self.params
    }

    pub fn metric(&self) -> &BilinearForm {
        &self.g_bar
    }

    pub fn complex_structure(&self) -> &Endomorphism {
        &self.j_bar
    }

    pub fn curvature(&self) -> &CovariantTensor4 {
        &self.r_bar
    }

    pub fn ricci(&self) -> &BilinearForm {
        &self.ricci_bar
    }

    pub fn ricci_star(&self) -> &BilinearForm {
        &self.ricci_star_bar
    }

    pub fn nabla_j(&self) -> &NablaJ {
        &self.nabla_j
    }

    /// Index of `ξ` in the product basis.
    pub fn xi_index(&self) -> usize {
        self.factor.dim() - 1
    }

    /// Index of `ξ'` in the product basis.
    pub fn xi_prime_index(&self) -> usize {
        self.dim() - 1
    }

    /// `{e_1, …, e_{2p}, e'_1, …, e'_{2q}, ξ, (ξ' − aξ)/b}`, orthonormal for
    /// `ḡ_{a,b}`, in product-basis components.
    pub fn adapted_orthonormal_basis(&self) -> Vec<TangentVector> {
        let n = self.dim();
        let d1 = self.factor.dim();
        let mut out: Vec<TangentVector> = (0..d1 - 1).map(|i| TangentVector::basis(n, i)).collect();
        out.extend((d1..n - 1).map(|i| TangentVector::basis(n, i)));
        out.push(TangentVector::basis(n, d1 - 1));
        let mut last = vec![0.0; n];
        last[n - 1] = 1.0 / self.params.b;
        last[d1 - 1] = -self.params.a / self.params.b;
        out.push(TangentVector::new(last));
        out
    }

    /// `ḡ((∇̄_X̄ J̄)Ȳ, Z̄)` for arbitrary product vectors.
    pub fn nabla_j_value(&self, x: &ProductVector, y: &ProductVector, z: &ProductVector) -> f64 {
        self.nabla_j.eval(&x.to_flat(), &y.to_flat(), &z.to_flat())
    }

    /// Integrability residual; zero for every member of the family.
    pub fn check_integrability(&self) -> f64 {
        integrability_residual(&self.nabla_j, &self.j_bar)
    }

    /// Largest `|ḡ((∇̄_X J̄)Y, Z)|` over the product basis. The structure is
    /// Kähler only if this vanishes.
    pub fn check_not_kahler(&self) -> f64 {
        self.nabla_j.max_abs()
    }

    /// `(τ̄, τ̄*)`, traces of `ρ̄` and of the closed-form `ρ̄*`.
    pub fn scalar_curvatures(&self) -> (f64, f64) {
        (self.tau_bar, self.tau_star_bar)
    }

    /// Ricci-* tensor computed from the curvature by its definition.
    pub fn ricci_star_from_curvature(&self) -> Result<BilinearForm> {
        ricci_star_from_curvature(&self.g_bar, &self.j_bar, &self.r_bar)
    }

    /// `*`-scalar curvature of [`Self::ricci_star_from_curvature`].
    pub fn tau_star_from_curvature(&self) -> Result<f64> {
        let rs = self.ricci_star_from_curvature()?;
        Ok(self.adapted_orthonormal_basis().iter().map(|f| rs.eval(f, f)).sum())
    }

    /// Tests `ρ̄* = (τ̄*/N) ḡ`. The residual is the max deviation over pairs of
    /// the adapted orthonormal basis.
    pub fn check_weakly_star_einstein(&self, tol: f64) -> (bool, f64) {
        let basis = self.adapted_orthonormal_basis();
        let mean = self.tau_star_bar / self.dim() as f64;
        let mut residual: f64 = 0.0;
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let target = if i == j { mean } else { 0.0 };
                residual = residual.max((self.ricci_star_bar.eval(u, v) - target).abs());
            }
        }
        (residual <= tol, residual)
    }

    pub fn residuals(&self) -> Result<HermitianResiduals> {
        let n = self.dim();
        let j2 = self.j_bar.compose(&self.j_bar).plus(&Endomorphism::identity(n));
        let cols: Vec<TangentVector> = (0..n).map(|i| self.j_bar.column(i)).collect();
        let mut compatibility: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                compatibility = compatibility.max((self.g_bar.eval(&cols[x], &cols[y]) - self.g_bar.get(x, y)).abs());
            }
        }
        let traced = contract_trace(&self.r_bar, &self.g_bar, (Slot::Second, Slot::Third))?;
        Ok(HermitianResiduals {
            j_squared: j2.max_abs(),
            compatibility,
            curvature_symmetries: self.r_bar.symmetry_residuals().max(),
            ricci_trace: traced.max_abs_diff(&self.ricci_bar),
        })
    }
}
