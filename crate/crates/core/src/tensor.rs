//! Dense multilinear algebra over a single tangent space.
//!
//! All tensors are stored row-major in flat `Vec<f64>`s. Dimensions in this
//! crate never exceed a dozen or so, so nothing here tries to be clever about
//! sparsity or blocking.
//!
//! Index conventions:
//!
//! * [`Endomorphism`] entry `(i, j)` is component `i` of the image of basis
//!   vector `e_j` (column `j` is `A e_j`).
//! * [`CovariantTensor4`] entry `(x, y, z, w)` is `R(e_x, e_y, e_z, e_w)`; for
//!   a curvature tensor this means `g(R(e_x, e_y) e_z, e_w)`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)] // inherent methods win whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Relative pivot threshold below which a metric is treated as singular.
const SINGULAR_PIVOT: f64 = 1e-14;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Frame coefficients of a tangent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(Vec<f64>);

impl TangentVector {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// The `i`-th standard basis vector of an `n`-dimensional space.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn into_components(self) -> Vec<f64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}

impl Add for &TangentVector {
    type Output = TangentVector;

    fn add(self, rhs: &TangentVector) -> TangentVector {
        TangentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &TangentVector {
    type Output = TangentVector;

    fn sub(self, rhs: &TangentVector) -> TangentVector {
        TangentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &TangentVector {
    type Output = TangentVector;

    fn mul(self, rhs: f64) -> TangentVector {
        TangentVector(self.0.iter().map(|a| a * rhs).collect())
    }
}

impl Neg for &TangentVector {
    type Output = TangentVector;

    fn neg(self) -> TangentVector {
        TangentVector(self.0.iter().map(|a| -a).collect())
    }
}

/// A linear form on the tangent space.
#[derive(Debug, Clone, PartialEq)]
pub struct CoVector(Vec<f64>);

impl CoVector {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn apply(&self, v: &TangentVector) -> f64 {
        self.0.iter().zip(&v.0).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> CoVector {
        CoVector(self.0.iter().map(|a| a * s).collect())
    }
}

/// A bilinear form, stored as its Gram matrix in the working frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm {
    n: usize,
    entries: Vec<f64>,
    symmetric: bool,
}

impl BilinearForm {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        check_dim(n * n, entries.len())?;
        let symmetric = (0..n).all(|i| (0..i).all(|j| entries[i * n + j] == entries[j * n + i]));
        Ok(Self { n, entries, symmetric })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self::new(n, entries).expect("length matches by construction")
    }

    /// Builds a form from a rule that is symmetric by construction; only the
    /// upper triangle is evaluated and mirrored so the result is exactly
    /// symmetric.
    pub fn symmetric_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Self {
            n,
            entries,
            symmetric: true,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::symmetric_from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(n: usize) -> Self {
        Self::symmetric_from_fn(n, |_, _| 0.0)
    }

    /// `a ⊗ b`, i.e. `(X, Y) ↦ a(X) b(Y)`.
    pub fn outer(a: &CoVector, b: &CoVector) -> Self {
        let n = a.dim();
        Self::from_fn(n, |i, j| a.0[i] * b.0[j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn eval(&self, x: &TangentVector, y: &TangentVector) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            if x.0[i] == 0.0 {
                continue;
            }
            let row = &self.entries[i * n..(i + 1) * n];
            acc += x.0[i] * row.iter().zip(&y.0).map(|(a, b)| a * b).sum::<f64>();
        }
        acc
    }

    /// `X ↦ B(X, ·)`.
    pub fn lower(&self, x: &TangentVector) -> CoVector {
        let n = self.n;
        CoVector((0..n).map(|j| (0..n).map(|i| x.0[i] * self.get(i, j)).sum()).collect())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a * s).collect(),
            symmetric: self.symmetric,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    /// Gram matrix of the form on the given vectors, `B(f_a, f_b)`.
    pub fn in_frame(&self, frame: &[TangentVector]) -> Self {
        Self::from_fn(frame.len(), |a, b| self.eval(&frame[a], &frame[b]))
    }

    /// Lower-triangular Cholesky factor, or an error if the form is not
    /// symmetric positive definite.
    pub fn cholesky(&self) -> Result<Vec<f64>> {
        if !self.symmetric {
            return Err(Error::NotPositiveDefinite);
        }
        let n = self.n;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > SINGULAR_PIVOT * scale) {
                return Err(Error::NotPositiveDefinite);
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(l)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_ok()
    }

    /// Inverse Gram matrix `g^{ij}` by Gauss-Jordan elimination with partial
    /// pivoting.
    pub fn inverse(&self) -> Result<Vec<f64>> {
        invert(self.n, &self.entries)
    }

    /// Metric trace `Σ_k B(f_k, f_k)` over an orthonormal frame of `metric`.
    pub fn trace_with(&self, metric: &BilinearForm) -> Result<f64> {
        check_dim(metric.n, self.n)?;
        let frame = orthonormal_frame(metric)?;
        Ok(frame.iter().map(|f| self.eval(f, f)).sum())
    }
}

/// Inverse of a dense `n x n` matrix.
pub(crate) fn invert(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::SingularMetric);
    }
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| m[r * n + col].abs().total_cmp(&m[s * n + col].abs()))
            .expect("non-empty range");
        if m[pivot * n + col].abs() <= SINGULAR_PIVOT * scale {
            return Err(Error::SingularMetric);
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                m[r * n + k] -= f * m[col * n + k];
                inv[r * n + k] -= f * inv[col * n + k];
            }
        }
    }
    Ok(inv)
}

/// A linear map of the tangent space into itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Endomorphism {
    n: usize,
    entries: Vec<f64>,
}

impl Endomorphism {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        check_dim(n * n, entries.len())?;
        Ok(Self { n, entries })
    }

    /// `f(i, j)` is component `i` of the image of `e_j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    /// Builds the map from the images of the basis vectors.
    pub fn from_columns(columns: &[TangentVector]) -> Self {
        let n = columns.len();
        Self::from_fn(n, |i, j| columns[j].0[i])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| 0.0)
    }

    /// `v ⊗ w`, i.e. `X ↦ w(X) v`.
    pub fn outer(v: &TangentVector, w: &CoVector) -> Self {
        Self::from_fn(v.dim(), |i, j| v.0[i] * w.0[j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> TangentVector {
        TangentVector((0..self.n).map(|i| self.get(i, j)).collect())
    }

    pub fn apply(&self, v: &TangentVector) -> TangentVector {
        let n = self.n;
        TangentVector(
            (0..n)
                .map(|i| self.entries[i * n..(i + 1) * n].iter().zip(&v.0).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    /// Matrix of the map in the basis given by `frame` (whose vectors are
    /// expressed in the current basis).
    pub fn in_frame(&self, frame: &[TangentVector]) -> Result<Self> {
        let n = frame.len();
        check_dim(self.n, n)?;
        let change = Endomorphism::from_columns(frame);
        let inv = Endomorphism {
            n,
            entries: invert(n, &change.entries)?,
        };
        Ok(inv.compose(&self.compose(&change)))
    }
}

/// Which argument of a [`CovariantTensor4`] a contraction acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
    Third,
    Fourth,
}

impl Slot {
    fn index(self) -> usize {
        match self {
            Slot::First => 0,
            Slot::Second => 1,
            Slot::Third => 2,
            Slot::Fourth => 3,
        }
    }
}

/// Residuals of the algebraic curvature symmetries, each a max-norm over all
/// basis quadruples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSymmetries {
    /// `R(X,Y,Z,W) + R(Y,X,Z,W)`
    pub antisymmetry_first_pair: f64,
    /// `R(X,Y,Z,W) + R(X,Y,W,Z)`
    pub antisymmetry_second_pair: f64,
    /// `R(X,Y,Z,W) - R(Z,W,X,Y)`
    pub pair_symmetry: f64,
    /// `R(X,Y,Z,W) + R(Y,Z,X,W) + R(Z,X,Y,W)`
    pub first_bianchi: f64,
}

impl CurvatureSymmetries {
    pub fn max(&self) -> f64 {
        self.antisymmetry_first_pair
            .max(self.antisymmetry_second_pair)
            .max(self.pair_symmetry)
            .max(self.first_bianchi)
    }
}

/// A rank-4 covariant tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantTensor4 {
    n: usize,
    entries: Vec<f64>,
}

impl CovariantTensor4 {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        check_dim(n * n * n * n, entries.len())?;
        Ok(Self { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(n * n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        entries.push(f(x, y, z, w));
                    }
                }
            }
        }
        Self { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize, w: usize) -> f64 {
        let n = self.n;
        self.entries[((x * n + y) * n + z) * n + w]
    }

    /// Multilinear evaluation on arbitrary vectors.
    pub fn eval(&self, x: &TangentVector, y: &TangentVector, z: &TangentVector, w: &TangentVector) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            if x.0[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                let xy = x.0[a] * y.0[b];
                if xy == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let xyz = xy * z.0[c];
                    if xyz == 0.0 {
                        continue;
                    }
                    let base = ((a * n + b) * n + c) * n;
                    acc += xyz * self.entries[base..base + n].iter().zip(&w.0).map(|(t, s)| t * s).sum::<f64>();
                }
            }
        }
        acc
    }

    /// Components `T(f_a, f_b, f_c, f_d)` in another frame.
    pub fn in_frame(&self, frame: &[TangentVector]) -> Self {
        let n = self.n;
        let m = frame.len();
        // Transform one slot at a time: O(m n^4) instead of O(m^4 n^4).
        let mut cur = self.entries.clone();
        let mut dims = [n, n, n, n];
        for slot in 0..4 {
            let mut next_dims = dims;
            next_dims[slot] = m;
            let total: usize = next_dims.iter().product();
            let mut next = vec![0.0; total];
            let stride = |d: &[usize; 4], s: usize| d[s + 1..].iter().product::<usize>();
            let old_stride = stride(&dims, slot);
            let new_stride = stride(&next_dims, slot);
            let outer: usize = dims[..slot].iter().product();
            for o in 0..outer {
                for (a, f) in frame.iter().enumerate() {
                    for k in 0..n {
                        let coef = f.0[k];
                        if coef == 0.0 {
                            continue;
                        }
                        let src = o * dims[slot] * old_stride + k * old_stride;
                        let dst = o * m * new_stride + a * new_stride;
                        for t in 0..old_stride {
                            next[dst + t] += coef * cur[src + t];
                        }
                    }
                }
            }
            cur = next;
            dims = next_dims;
        }
        Self { n: m, entries: cur }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    pub fn symmetry_residuals(&self) -> CurvatureSymmetries {
        let n = self.n;
        let mut res = CurvatureSymmetries {
            antisymmetry_first_pair: 0.0,
            antisymmetry_second_pair: 0.0,
            pair_symmetry: 0.0,
            first_bianchi: 0.0,
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let r = self.get(x, y, z, w);
                        res.antisymmetry_first_pair = res.antisymmetry_first_pair.max((r + self.get(y, x, z, w)).abs());
                        res.antisymmetry_second_pair = res.antisymmetry_second_pair.max((r + self.get(x, y, w, z)).abs());
                        res.pair_symmetry = res.pair_symmetry.max((r - self.get(z, w, x, y)).abs());
                        res.first_bianchi = res.first_bianchi.max((r + self.get(y, z, x, w) + self.get(z, x, y, w)).abs());
                    }
                }
            }
        }
        res
    }
}

/// Metric trace of `t` over two of its slots; the result is the bilinear form
/// in the two remaining slots, in their original order.
///
/// The trace is taken as `Σ_k t(.., f_k, .., f_k, ..)` over an orthonormal
/// frame `{f_k}` of `metric`.
pub fn contract_trace(t: &CovariantTensor4, metric: &BilinearForm, slots: (Slot, Slot)) -> Result<BilinearForm> {
    let (s1, s2) = (slots.0.index(), slots.1.index());
    if s1 == s2 {
        return Err(Error::RepeatedSlot);
    }
    let n = t.dim();
    check_dim(n, metric.dim())?;
    let frame = orthonormal_frame(metric)?;
    let free: Vec<usize> = (0..4).filter(|s| *s != s1 && *s != s2).collect();

    // Contract the frame into both slots: C(x, y) = Σ_k Σ_{ab} f_k^a f_k^b T[..a..b..].
    // Σ_k f_k^a f_k^b is the inverse metric, built once from the frame.
    let mut ginv = vec![0.0; n * n];
    for f in &frame {
        for a in 0..n {
            for b in 0..n {
                ginv[a * n + b] += f.0[a] * f.0[b];
            }
        }
    }
    let mut idx = [0usize; 4];
    Ok(BilinearForm::from_fn(n, |x, y| {
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let h = ginv[a * n + b];
                if h == 0.0 {
                    continue;
                }
                idx[s1] = a;
                idx[s2] = b;
                idx[free[0]] = x;
                idx[free[1]] = y;
                acc += h * t.get(idx[0], idx[1], idx[2], idx[3]);
            }
        }
        acc
    }))
}

/// Gram-Schmidt on `seeds` with respect to `metric`. Fails if the metric is
/// not positive on the seeds or if a seed is (numerically) dependent on the
/// previous ones.
pub fn gram_schmidt(metric: &BilinearForm, seeds: &[TangentVector]) -> Result<Vec<TangentVector>> {
    if !metric.is_symmetric() {
        return Err(Error::NotPositiveDefinite);
    }
    let mut out: Vec<TangentVector> = Vec::with_capacity(seeds.len());
    for seed in seeds {
        check_dim(metric.dim(), seed.dim())?;
        let seed_norm = metric.eval(seed, seed).abs().sqrt().max(seed.max_abs());
        let mut v = seed.clone();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for f in &out {
                let c = metric.eval(&v, f);
                v = &v - &(f * c);
            }
        }
        let norm2 = metric.eval(&v, &v);
        if !(norm2 > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let norm = norm2.sqrt();
        if norm <= 1e-10 * seed_norm {
            return Err(Error::SingularMetric);
        }
        out.push(&v * (1.0 / norm));
    }
    Ok(out)
}

/// An orthonormal frame of `metric`, obtained by Gram-Schmidt on the standard
/// basis in order.
pub fn orthonormal_frame(metric: &BilinearForm) -> Result<Vec<TangentVector>> {
    let n = metric.dim();
    let seeds: Vec<TangentVector> = (0..n).map(|i| TangentVector::basis(n, i)).collect();
    gram_schmidt(metric, &seeds)
}

/// The endomorphism `Q` with `metric(Q X, Y) = form(X, Y)`.
pub fn raise_index(form: &BilinearForm, metric: &BilinearForm) -> Result<Endomorphism> {
    let n = metric.dim();
    check_dim(n, form.dim())?;
    if !metric.is_positive_definite() {
        return Err(if invert(n, metric.entries()).is_err() {
            Error::SingularMetric
        } else {
            Error::NotPositiveDefinite
        });
    }
    let ginv = metric.inverse()?;
    // Σ_k Q^k_i g_kj = F_ij  =>  Q^k_i = Σ_j g^{kj} F_ij.
    Ok(Endomorphism::from_fn(n, |k, i| {
        (0..n).map(|j| ginv[k * n + j] * form.get(i, j)).sum()
    }))
}
