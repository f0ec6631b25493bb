//! Divided powers `Γⁿ(F^d)` in the basis of divided monomials.
//!
//! The divided monomial `e^(a) = γ_{a1}(e1) ⋯ γ_{ad}(ed)` is indexed by an
//! exponent vector `a` of total degree `n`. Bases are listed in lexicographic
//! order with the largest first coordinate first, so `(n, 0, ..., 0)` has
//! index 0. Tensor products `Γᵃ ⊗ Γᵇ` use index `i1 * dim Γᵇ + i2`.
//!
//! Structure maps:
//! - product: `e^(a) e^(b) = Π_j C(a_j + b_j, a_j) e^(a+b)`
//! - coproduct: `Δ e^(c) = Σ_{u+v=c} e^(u) ⊗ e^(v)`
//! - Verschiebung: `e^(a) ↦ e^(a/k)` when `k` divides every entry, else 0,
//!   with `k = p` for `𝒱_p` and `k = q` for `𝒱`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Gf, Lucas};
use crate::linalg::MatrixFq;

/// Exponent vector of a divided monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }
}

/// Ordered basis of `Γⁿ(F^d)` with constant-time ranking.
#[derive(Debug)]
pub struct GammaBasis {
    n: u32,
    d: usize,
    flat: Vec<u32>,
    // binom[c][k] = C(k, c) for the ranking formula
    binom: Vec<Vec<u64>>,
}

impl GammaBasis {
    fn build(n: u32, d: usize) -> Self {
        let mut flat = Vec::new();
        if d == 0 {
            // Γ⁰(0) is the constant F, Γⁿ(0) = 0 otherwise
            let _ = n;
        } else {
            let mut cur = vec![0u32; d];
            fill(&mut flat, &mut cur, 0, n);
        }
        let top = n as usize + d + 1;
        let mut binom = vec![vec![0u64; top + 1]; d.max(1)];
        for (c, row) in binom.iter_mut().enumerate() {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = binom_u64(k as u64, c as u64);
            }
        }
        GammaBasis { n, d, flat, binom }
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn dim_space(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.flat.len().checked_div(self.d).unwrap_or((self.n == 0) as usize)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn exps(&self, i: usize) -> &[u32] {
        &self.flat[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.len()).map(move |i| self.exps(i))
    }

    /// Position of `a` in the basis. `a` must have degree `n` and length `d`.
    #[inline]
    pub fn index_of(&self, a: &[u32]) -> usize {
        debug_assert_eq!(a.len(), self.d);
        debug_assert_eq!(a.iter().sum::<u32>(), self.n);
        let mut idx = 0u64;
        let mut rem = self.n;
        for (i, &ai) in a.iter().enumerate().take(self.d.saturating_sub(1)) {
            let c = self.d - 1 - i;
            let gap = rem - ai;
            if gap > 0 {
                idx += self.binom[c][(gap - 1) as usize + c];
            }
            rem -= ai;
        }
        idx as usize
    }

    pub fn try_index_of(&self, a: &[u32]) -> Option<usize> {
        (a.len() == self.d && a.iter().sum::<u32>() == self.n).then(|| self.index_of(a))
    }
}

fn fill(out: &mut Vec<u32>, cur: &mut [u32], pos: usize, rem: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.extend_from_slice(cur);
        return;
    }
    for x in (0..=rem).rev() {
        cur[pos] = x;
        fill(out, cur, pos + 1, rem - x);
    }
}

fn binom_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r.min(u64::MAX as u128) as u64
}

/// `dim Γⁿ(F^d) = C(n + d - 1, d - 1)`, saturating.
pub fn gamma_dim(n: u64, d: usize) -> u64 {
    if d == 0 {
        return (n == 0) as u64;
    }
    binom_u64(n + d as u64 - 1, d as u64 - 1)
}

type BasisCache = RwLock<HashMap<(u32, usize), Arc<GammaBasis>>>;

/// Memoised basis of `Γⁿ(F^d)`.
pub fn gamma_basis(n: u32, d: usize) -> Arc<GammaBasis> {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.read().expect("basis cache poisoned").get(&(n, d)) {
        return b.clone();
    }
    let b = Arc::new(GammaBasis::build(n, d));
    cache.write().expect("basis cache poisoned").entry((n, d)).or_insert(b).clone()
}

/// All exponent vectors of degree `n` in `d` variables, in basis order.
pub fn basis_vectors(n: u32, d: usize) -> Vec<ExponentVector> {
    gamma_basis(n, d).iter().map(|a| ExponentVector(a.to_vec())).collect()
}

/// A sparse element of `Γⁿ(F^d)`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaElement {
    degree: u32,
    dim: usize,
    terms: BTreeMap<ExponentVector, Gf>,
}

impl GammaElement {
    pub fn zero(degree: u32, dim: usize) -> Self {
        GammaElement { degree, dim, terms: BTreeMap::new() }
    }

    pub fn monomial(exps: Vec<u32>) -> Self {
        let mut e = Self::zero(exps.iter().sum(), exps.len());
        e.terms.insert(ExponentVector(exps), Gf::ONE);
        e
    }

    pub fn from_dense(basis: &GammaBasis, coeffs: &[Gf]) -> Self {
        let mut e = Self::zero(basis.degree(), basis.dim_space());
        for (i, &c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                e.terms.insert(ExponentVector(basis.exps(i).to_vec()), c);
            }
        }
        e
    }

    pub fn to_dense(&self) -> Vec<Gf> {
        let basis = gamma_basis(self.degree, self.dim);
        let mut out = vec![Gf::ZERO; basis.len()];
        for (a, &c) in &self.terms {
            out[basis.index_of(&a.0)] = c;
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: &[u32]) -> Gf {
        self.terms.get(&ExponentVector(a.to_vec())).copied().unwrap_or(Gf::ZERO)
    }

    /// Terms in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, Gf)> {
        // descending lex on equal-length vectors is reverse BTreeMap order
        self.terms.iter().rev().map(|(a, &c)| (a, c))
    }

    pub fn add_term(&mut self, field: &FieldSpec, a: ExponentVector, c: Gf) -> Result<()> {
        if a.len() != self.dim || a.degree() != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "term {:?} in Γ^{}(F^{})",
                a.0, self.degree, self.dim
            )));
        }
        if c.is_zero() {
            return Ok(());
        }
        let slot = self.terms.entry(a).or_insert(Gf::ZERO);
        *slot = field.add(*slot, c);
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
        Ok(())
    }

    pub fn add(&self, field: &FieldSpec, other: &Self) -> Result<Self> {
        if (self.degree, self.dim) != (other.degree, other.dim) {
            return Err(Error::DimensionMismatch("adding elements of different spaces".into()));
        }
        let mut out = self.clone();
        for (a, &c) in &other.terms {
            out.add_term(field, a.clone(), c)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, field: &FieldSpec, c: Gf) -> Self {
        let mut out = Self::zero(self.degree, self.dim);
        if !c.is_zero() {
            for (a, &x) in &self.terms {
                out.terms.insert(a.clone(), field.mul(x, c));
            }
        }
        out
    }

    /// `{degree, dim, terms: [{exps, coeff}]}` with terms in basis order.
    pub fn to_json(&self, field: &FieldSpec) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(a, c)| json!({ "exps": a.0, "coeff": field.coeffs(c) }))
            .collect();
        json!({ "degree": self.degree, "dim": self.dim, "terms": terms })
    }

    pub fn from_json(field: &FieldSpec, value: &Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Term {
            exps: Vec<u32>,
            coeff: Vec<u32>,
        }
        #[derive(Deserialize)]
        struct Repr {
            degree: u32,
            dim: usize,
            terms: Vec<Term>,
        }
        let repr: Repr = serde_json::from_value(value.clone())?;
        let mut e = Self::zero(repr.degree, repr.dim);
        for t in repr.terms {
            e.add_term(field, ExponentVector(t.exps), field.from_coeffs(&t.coeff)?)?;
        }
        Ok(e)
    }
}

/// A sparse element of `Γᵃ(F^d) ⊗ Γᵇ(F^d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    degrees: (u32, u32),
    dim: usize,
    terms: BTreeMap<(ExponentVector, ExponentVector), Gf>,
}

impl TensorElement {
    pub fn zero(degrees: (u32, u32), dim: usize) -> Self {
        TensorElement { degrees, dim, terms: BTreeMap::new() }
    }

    pub fn degrees(&self) -> (u32, u32) {
        self.degrees
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: &[u32], b: &[u32]) -> Gf {
        self.terms
            .get(&(ExponentVector(a.to_vec()), ExponentVector(b.to_vec())))
            .copied()
            .unwrap_or(Gf::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &ExponentVector, Gf)> {
        self.terms.iter().map(|((a, b), &c)| (a, b, c))
    }

    fn add_term(&mut self, field: &FieldSpec, a: Vec<u32>, b: Vec<u32>, c: Gf) {
        if c.is_zero() {
            return;
        }
        let key = (ExponentVector(a), ExponentVector(b));
        let slot = self.terms.entry(key.clone()).or_insert(Gf::ZERO);
        *slot = field.add(*slot, c);
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, field: &FieldSpec, other: &Self) -> Result<Self> {
        if (self.degrees, self.dim) != (other.degrees, other.dim) {
            return Err(Error::DimensionMismatch("adding tensors of different bidegrees".into()));
        }
        let mut out = self.clone();
        for ((a, b), &c) in &other.terms {
            out.add_term(field, a.0.clone(), b.0.clone(), c);
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Vec<Gf> {
        let ba = gamma_basis(self.degrees.0, self.dim);
        let bb = gamma_basis(self.degrees.1, self.dim);
        let mut out = vec![Gf::ZERO; ba.len() * bb.len()];
        for ((a, b), &c) in &self.terms {
            out[ba.index_of(&a.0) * bb.len() + bb.index_of(&b.0)] = c;
        }
        out
    }

    pub fn tensor(field: &FieldSpec, x: &GammaElement, y: &GammaElement) -> Result<Self> {
        if x.dim != y.dim {
            return Err(Error::DimensionMismatch("tensor factors over different spaces".into()));
        }
        let mut t = Self::zero((x.degree, y.degree), x.dim);
        for (a, &c) in &x.terms {
            for (b, &e) in &y.terms {
                t.add_term(field, a.0.clone(), b.0.clone(), field.mul(c, e));
            }
        }
        Ok(t)
    }
}

/// Product of two elements of the divided power algebra.
pub fn product(field: &FieldSpec, x: &GammaElement, y: &GammaElement) -> Result<GammaElement> {
    if x.dim != y.dim {
        return Err(Error::DimensionMismatch(format!(
            "product of elements over F^{} and F^{}",
            x.dim, y.dim
        )));
    }
    let lucas = Lucas::new(field.p());
    let mut out = GammaElement::zero(x.degree + y.degree, x.dim);
    let mut sum = vec![0u32; x.dim];
    for (a, &ca) in &x.terms {
        for (b, &cb) in &y.terms {
            if let Some(k) = monomial_product(&lucas, &a.0, &b.0, &mut sum) {
                let c = field.mul(field.from_int(k as u64), field.mul(ca, cb));
                out.add_term(field, ExponentVector(sum.clone()), c)?;
            }
        }
    }
    Ok(out)
}

/// Writes `a + b` into `sum` and returns the product coefficient mod p, or
/// `None` when it vanishes.
#[inline]
fn monomial_product(lucas: &Lucas, a: &[u32], b: &[u32], sum: &mut [u32]) -> Option<u32> {
    let p = lucas.p();
    let mut k = 1u32;
    for j in 0..a.len() {
        let c = lucas.pair(a[j], b[j]);
        if c == 0 {
            return None;
        }
        if c != 1 {
            k = k * c % p;
        }
        sum[j] = a[j] + b[j];
    }
    Some(k)
}

/// Product of dense elements over the bases of `Γᵃ` and `Γᵇ`, accumulated
/// into `out` over the basis of `Γ^{a+b}`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn dense_product_into(
    field: &FieldSpec,
    lucas: &Lucas,
    xb: &GammaBasis,
    x: &[Gf],
    y: &[(usize, Gf)],
    yb: &GammaBasis,
    ob: &GammaBasis,
    out: &mut [Gf],
) {
    let mut sum = vec![0u32; xb.dim_space()];
    for (i, &cx) in x.iter().enumerate() {
        if cx.is_zero() {
            continue;
        }
        let a = xb.exps(i);
        for &(j, cy) in y {
            if let Some(k) = monomial_product(lucas, a, yb.exps(j), &mut sum) {
                let mut c = field.mul(cx, cy);
                if k != 1 {
                    c = field.mul(c, field.from_int(k as u64));
                }
                let idx = ob.index_of(&sum);
                out[idx] = field.add(out[idx], c);
            }
        }
    }
}

/// Nonzero entries of a dense vector.
pub(crate) fn sparse(v: &[Gf]) -> Vec<(usize, Gf)> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, &c)| (i, c)).collect()
}

/// Coproduct component `Γ^{a+b} → Γᵃ ⊗ Γᵇ` applied to `z`.
pub fn coproduct(z: &GammaElement, a: u32, b: u32) -> Result<TensorElement> {
    if z.degree != a + b {
        return Err(Error::DimensionMismatch(format!(
            "cannot split degree {} as ({a}, {b})",
            z.degree
        )));
    }
    let mut t = TensorElement::zero((a, b), z.dim);
    for (c, &coef) in &z.terms {
        for_each_split(&c.0, a, 1, |u| {
            let v: Vec<u32> = c.0.iter().zip(u).map(|(x, y)| x - y).collect();
            t.terms.insert((ExponentVector(u.to_vec()), ExponentVector(v)), coef);
        });
    }
    Ok(t)
}

/// Calls `f(u)` for every `u ≤ c` (entrywise) with `|u| = k` and
/// `u ≡ c (mod modulus)` entrywise.
pub(crate) fn for_each_split(c: &[u32], k: u32, modulus: u32, mut f: impl FnMut(&[u32])) {
    let base: Vec<u32> = c.iter().map(|&x| x % modulus).collect();
    let used: u32 = base.iter().sum();
    if used > k || !(k - used).is_multiple_of(modulus) {
        return;
    }
    let steps = (k - used) / modulus;
    let caps: Vec<u32> = c.iter().zip(&base).map(|(&x, &r)| (x - r) / modulus).collect();
    let mut u = base.clone();
    split_rec(&base, &caps, modulus, 0, steps, &mut u, &mut f);
}

fn split_rec(
    base: &[u32],
    caps: &[u32],
    modulus: u32,
    pos: usize,
    left: u32,
    u: &mut [u32],
    f: &mut impl FnMut(&[u32]),
) {
    if pos == u.len() {
        if left == 0 {
            f(u);
        }
        return;
    }
    let rest_cap: u32 = caps[pos + 1..].iter().sum();
    let lo = left.saturating_sub(rest_cap);
    let hi = left.min(caps[pos]);
    if lo > hi {
        return;
    }
    for t in (lo..=hi).rev() {
        u[pos] = base[pos] + modulus * t;
        split_rec(base, caps, modulus, pos + 1, left - t, u, f);
    }
}

/// `v^{⊗k} = Σ_{|a|=k} v^a e^(a)`.
pub fn divided_power_of_vector(field: &FieldSpec, v: &[Gf], k: u32) -> GammaElement {
    let basis = gamma_basis(k, v.len());
    GammaElement::from_dense(&basis, &divided_power_dense(field, v, k))
}

/// Dense coordinates of `v^{⊗k}` over the basis of `Γᵏ(F^d)`.
pub(crate) fn divided_power_dense(field: &FieldSpec, v: &[Gf], k: u32) -> Vec<Gf> {
    let basis = gamma_basis(k, v.len());
    let mut out = vec![Gf::ZERO; basis.len()];
    let support: Vec<usize> = (0..v.len()).filter(|&j| !v[j].is_zero()).collect();
    if support.is_empty() {
        if k == 0 {
            out[0] = Gf::ONE;
        }
        return out;
    }
    // only monomials supported on supp(v) survive
    let sub = gamma_basis(k, support.len());
    let mut a = vec![0u32; v.len()];
    for e in sub.iter() {
        let mut c = Gf::ONE;
        for (slot, (&j, &x)) in support.iter().zip(e).enumerate() {
            let _ = slot;
            a[j] = x;
            c = field.mul(c, field.pow(v[j], x as u64));
        }
        out[basis.index_of(&a)] = c;
    }
    out
}

/// Matrix of `Γⁿ(f)` for a `d' × d` matrix `f`.
pub fn gamma_map(f: &MatrixFq, n: u32) -> MatrixFq {
    let field = f.field();
    let (dt, ds) = (f.nrows(), f.ncols());
    let src = gamma_basis(n, ds);
    let dst = gamma_basis(n, dt);
    let lucas = Lucas::new(field.p());
    let images: Vec<Vec<Gf>> = (0..ds).map(|j| f.column(j)).collect();
    let mut columns = Vec::with_capacity(src.len());
    for a in src.iter() {
        // Π_i (f e_i)^{⊗a_i}
        let mut acc_basis = gamma_basis(0, dt);
        let mut acc = vec![Gf::ONE; acc_basis.len()];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let yb = gamma_basis(ai, dt);
            let y = sparse(&divided_power_dense(field, &images[i], ai));
            let ob = gamma_basis(acc_basis.degree() + ai, dt);
            let mut out = vec![Gf::ZERO; ob.len()];
            dense_product_into(field, &lucas, &acc_basis, &acc, &y, &yb, &ob, &mut out);
            acc = out;
            acc_basis = ob;
        }
        if acc_basis.degree() != n {
            acc = vec![Gf::ZERO; dst.len()];
        }
        columns.push(acc);
    }
    MatrixFq::from_columns(field, dst.len(), &columns).expect("column lengths agree")
}

/// Matrix of the product `Γᵃ ⊗ Γᵇ → Γ^{a+b}`.
pub fn product_matrix(field: &FieldSpec, a: u32, b: u32, d: usize) -> MatrixFq {
    let (ba, bb, out) = (gamma_basis(a, d), gamma_basis(b, d), gamma_basis(a + b, d));
    let lucas = Lucas::new(field.p());
    let mut m = MatrixFq::zeros(field, out.len(), ba.len() * bb.len());
    let mut sum = vec![0u32; d];
    for i in 0..ba.len() {
        for j in 0..bb.len() {
            if let Some(k) = monomial_product(&lucas, ba.exps(i), bb.exps(j), &mut sum) {
                m.set(out.index_of(&sum), i * bb.len() + j, field.from_int(k as u64));
            }
        }
    }
    m
}

/// Matrix of the coproduct component `Γ^{a+b} → Γᵃ ⊗ Γᵇ`. A negative degree
/// gives a map to the zero space.
pub fn coproduct_matrix(field: &FieldSpec, a: i64, b: i64, d: usize) -> MatrixFq {
    if a < 0 || b < 0 {
        let n = (a + b).max(0) as u32;
        return MatrixFq::zeros(field, 0, if a + b < 0 { 0 } else { gamma_basis(n, d).len() });
    }
    let (a, b) = (a as u32, b as u32);
    let (src, ba, bb) = (gamma_basis(a + b, d), gamma_basis(a, d), gamma_basis(b, d));
    let mut m = MatrixFq::zeros(field, ba.len() * bb.len(), src.len());
    let mut v = vec![0u32; d];
    for (col, c) in src.iter().enumerate() {
        for_each_split(c, a, 1, |u| {
            for j in 0..d {
                v[j] = c[j] - u[j];
            }
            m.set(ba.index_of(u) * bb.len() + bb.index_of(&v), col, Gf::ONE);
        });
    }
    m
}

/// `e^(a) ↦ e^(a/k)` from `Γ^{kn}` to `Γⁿ`, zero unless `k | a`.
fn divide_exponents(field: &FieldSpec, n: u32, d: usize, k: u64) -> Result<MatrixFq> {
    let big = u32::try_from(k * n as u64).map_err(|_| Error::Overflow)?;
    let (src, dst) = (gamma_basis(big, d), gamma_basis(n, d));
    let mut m = MatrixFq::zeros(field, dst.len(), src.len());
    for (col, a) in src.iter().enumerate() {
        if a.iter().all(|&x| (x as u64).is_multiple_of(k)) {
            let b: Vec<u32> = a.iter().map(|&x| (x as u64 / k) as u32).collect();
            m.set(dst.index_of(&b), col, Gf::ONE);
        }
    }
    Ok(m)
}

/// `𝒱_p : Γ^{pn}(F^d) → Γⁿ(F^d)^{(1)}`.
pub fn verschiebung_p(field: &FieldSpec, n: u32, d: usize) -> Result<MatrixFq> {
    divide_exponents(field, n, d, field.p() as u64)
}

/// `𝒱 : Γ^{qn}(F^d) → Γⁿ(F^d)`.
pub fn verschiebung_q(field: &FieldSpec, n: u32, d: usize) -> Result<MatrixFq> {
    divide_exponents(field, n, d, field.q() as u64)
}

/// `𝒱^t : Γ^{q^t n} → Γⁿ`.
pub fn verschiebung_power(field: &FieldSpec, n: u32, d: usize, t: u32) -> Result<MatrixFq> {
    let k = (field.q() as u64).checked_pow(t).ok_or(Error::Overflow)?;
    divide_exponents(field, n, d, k)
}

/// Matrix of `(1 ⊗ 𝒱_k) ∘ Δ : Γⁿ → Γ^{n-k} ⊗ Γ¹` with `k = p` or `q`.
fn truncation_test_matrix(field: &FieldSpec, n: u32, d: usize, k: u32) -> Result<MatrixFq> {
    let delta = coproduct_matrix(field, n as i64 - k as i64, k as i64, d);
    if delta.nrows() == 0 {
        return Ok(delta);
    }
    let versch = divide_exponents(field, 1, d, k as u64)?;
    let id = MatrixFq::identity(field, gamma_basis(n - k, d).len());
    id.tensor(&versch)?.compose(&delta)
}

fn kernel_elements(field: &FieldSpec, m: &MatrixFq, n: u32, d: usize) -> Vec<GammaElement> {
    let basis = gamma_basis(n, d);
    let _ = field;
    m.kernel_basis().iter().map(|v| GammaElement::from_dense(&basis, v)).collect()
}

/// Basis of `Γ̃ⁿ(F^d)`, the kernel of `(1 ⊗ 𝒱) ∘ Δ_{n-q,q}`.
pub fn tilde_gamma_kernel(field: &FieldSpec, n: u32, d: usize) -> Result<Vec<GammaElement>> {
    let m = truncation_test_matrix(field, n, d, field.q())?;
    Ok(kernel_elements(field, &m, n, d))
}

/// Basis of `Γ̄ⁿ(F^d)`, the kernel of `(1 ⊗ 𝒱_p) ∘ Δ_{n-p,p}`.
pub fn bar_gamma_kernel(field: &FieldSpec, n: u32, d: usize) -> Result<Vec<GammaElement>> {
    let m = truncation_test_matrix(field, n, d, field.p())?;
    Ok(kernel_elements(field, &m, n, d))
}
