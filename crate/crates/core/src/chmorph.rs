//! Crabb–Hubbuck morphisms and the maps built from them.
//!
//! `φ_s̲ : F[Flag_r](F^d) → Γ^{[s̲]_q}(F^d)` sends a flag with generators
//! `(v₁, …, v_r)` to `Π v_i^{⊗[s_i]_q}`. Columns are computed from canonical
//! generators; tests check that any other generators give the same column.
//!
//! Ranks use the diagonal torus `T = (F^×)^d`. The image of an equivariant
//! map is `T`-stable, `T` acts on `e^(a)` by the character `a mod (q - 1)`,
//! and `|T|` is prime to `p`. So the rank is the sum over characters of the
//! ranks of the row blocks, and one flag per torus orbit spans every block.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{bracket, FieldSpec, Gf, Lucas};
use crate::flags::{enumerate_flags, flag_count, torus_orbit_representatives, FlagBasis, FlagCanonical};
use crate::gamma::{
    coproduct_matrix, dense_product_into, divided_power_dense, gamma_basis, gamma_dim, product, sparse,
    verschiebung_power, verschiebung_q, GammaBasis, GammaElement,
};
use crate::linalg::{BitMatrix, MatrixFq};

/// A sequence `s₁ ≥ ⋯ ≥ s_r > 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct SeqS {
    s: Vec<u32>,
}

impl TryFrom<Vec<u32>> for SeqS {
    type Error = Error;

    fn try_from(s: Vec<u32>) -> Result<Self> {
        SeqS::new(s)
    }
}

impl From<SeqS> for Vec<u32> {
    fn from(s: SeqS) -> Self {
        s.s
    }
}

impl std::fmt::Display for SeqS {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.s.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl SeqS {
    pub fn new(s: Vec<u32>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Usage("sequence must be nonempty".into()));
        }
        if s.contains(&0) {
            return Err(Error::Usage(format!("sequence entries must be positive: {s:?}")));
        }
        if s.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Usage(format!("sequence must be weakly decreasing: {s:?}")));
        }
        Ok(SeqS { s })
    }

    /// Parses `"4,2"` or `"(4,2)"`.
    pub fn parse(text: &str) -> Result<Self> {
        let body = text.trim().trim_start_matches('(').trim_end_matches(')');
        let s = body
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Usage(format!("bad sequence {text:?}"))))
            .collect::<Result<Vec<_>>>()?;
        SeqS::new(s)
    }

    pub fn constant(r: usize, t: u32) -> Result<Self> {
        SeqS::new(vec![t; r])
    }

    pub fn entries(&self) -> &[u32] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn is_strict(&self) -> bool {
        self.s.windows(2).all(|w| w[0] > w[1])
    }

    pub fn last(&self) -> u32 {
        *self.s.last().expect("nonempty")
    }

    /// `[s̲]_q`.
    pub fn degree(&self, q: u32) -> Result<u64> {
        crate::field::bracket_sum(&self.s, q)
    }

    /// `s_i + 1` for every entry.
    pub fn plus(&self) -> SeqS {
        SeqS { s: self.s.iter().map(|x| x + 1).collect() }
    }

    /// `s_i - s_r` for `i < r`; entries may vanish when `s̲` is not strict.
    pub fn prime(&self) -> Vec<u32> {
        let t = self.last();
        self.s[..self.s.len() - 1].iter().map(|x| x - t).collect()
    }

    /// `[s_i - s_{i+1}]_q` against `(q - 1)(d - i + 1)` for `i = 1..r`.
    pub fn per_step(&self, q: u32, d: usize) -> Result<Vec<StepCheck>> {
        let r = self.s.len();
        (0..r)
            .map(|i| {
                let next = if i + 1 < r { self.s[i + 1] } else { 0 };
                let lhs = bracket(self.s[i] - next, q)?;
                let rhs = (q as u64 - 1) * (d as i64 - i as i64).max(0) as u64;
                Ok(StepCheck { i: i + 1, lhs, rhs })
            })
            .collect()
    }

    /// Whether every step meets its threshold.
    pub fn criterion_holds(&self, q: u32, d: usize) -> Result<bool> {
        Ok(self.per_step(q, d)?.iter().all(|c| c.lhs >= c.rhs))
    }
}

/// One inequality of the embedding criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCheck {
    pub i: usize,
    pub lhs: u64,
    pub rhs: u64,
}

fn deg32(n: u64) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Overflow)
}

fn exponents_of(seq: &[u32], q: u32) -> Result<Vec<u32>> {
    seq.iter().map(|&s| deg32(bracket(s, q)?)).collect()
}

/// Builds columns `Π v_i^{⊗e_i}` for flags, reusing partial products of
/// shared prefixes.
type PowerCache = HashMap<(Vec<Gf>, u32), Arc<Vec<(usize, Gf)>>>;

pub(crate) struct ColumnBuilder {
    field: FieldSpec,
    lucas: Lucas,
    d: usize,
    exps: Vec<u32>,
    bases: Vec<Arc<GammaBasis>>,
    powers: PowerCache,
    stack: Vec<Vec<Gf>>,
    prefix: Vec<Vec<Gf>>,
}

impl ColumnBuilder {
    pub(crate) fn new(field: &FieldSpec, d: usize, exps: &[u32]) -> Self {
        let mut bases = vec![gamma_basis(0, d)];
        let mut total = 0;
        for &e in exps {
            total += e;
            bases.push(gamma_basis(total, d));
        }
        ColumnBuilder {
            field: field.clone(),
            lucas: Lucas::new(field.p()),
            d,
            exps: exps.to_vec(),
            bases,
            powers: HashMap::new(),
            stack: vec![vec![Gf::ONE]],
            prefix: Vec::new(),
        }
    }

    pub(crate) fn target(&self) -> &Arc<GammaBasis> {
        self.bases.last().expect("nonempty")
    }

    fn power(&mut self, v: &[Gf], k: u32) -> Arc<Vec<(usize, Gf)>> {
        let key = (v.to_vec(), k);
        if let Some(p) = self.powers.get(&key) {
            return p.clone();
        }
        let p = Arc::new(sparse(&divided_power_dense(&self.field, v, k)));
        self.powers.insert(key, p.clone());
        p
    }

    /// Column at a flag of length `exps.len()`.
    pub(crate) fn column(&mut self, flag: &FlagCanonical) -> &[Gf] {
        let r = self.exps.len();
        debug_assert_eq!(flag.len(), r);
        let mut keep = 0;
        while keep < self.prefix.len() && keep < r && self.prefix[keep] == flag.row(keep) {
            keep += 1;
        }
        self.prefix.truncate(keep);
        self.stack.truncate(keep + 1);
        for k in keep..r {
            let v = flag.row(k).to_vec();
            let e = self.exps[k];
            let next = if e == 0 {
                self.stack[k].clone()
            } else {
                let y = self.power(&v, e);
                let (xb, yb, ob) = (&self.bases[k], gamma_basis(e, self.d), &self.bases[k + 1]);
                let mut out = vec![Gf::ZERO; ob.len()];
                dense_product_into(&self.field, &self.lucas, xb, &self.stack[k], &y, &yb, ob, &mut out);
                out
            };
            self.stack.push(next);
            self.prefix.push(v);
        }
        &self.stack[r]
    }
}

/// Column at one flag computed by sparse products, without caching.
pub fn phi_column(field: &FieldSpec, d: usize, generators: &[Vec<Gf>], exps: &[u32]) -> Result<GammaElement> {
    let mut acc = GammaElement::monomial(vec![0; d]);
    for (v, &e) in generators.iter().zip(exps) {
        let pw = crate::gamma::divided_power_of_vector(field, v, e);
        acc = product(field, &acc, &pw)?;
    }
    Ok(acc)
}

/// Matrix with columns `Π v_i^{⊗e_i}` over all flags of length `exps.len()`.
/// Zero exponents are allowed.
pub fn phi_exponents(field: &FieldSpec, exps: &[u32], d: usize) -> MatrixFq {
    let flags = enumerate_flags(field, d, exps.len());
    let mut builder = ColumnBuilder::new(field, d, exps);
    let rows = builder.target().len();
    let mut m = MatrixFq::zeros(field, rows, flags.len());
    for (j, flag) in flags.iter().enumerate() {
        let col = builder.column(flag);
        for (i, &x) in col.iter().enumerate() {
            if !x.is_zero() {
                m.set(i, j, x);
            }
        }
    }
    m
}

/// `φ_n : F[Flag₁](F^d) → Γⁿ(F^d)`, defined when `(q - 1) | n`.
pub fn phi_line(field: &FieldSpec, n: u32, d: usize) -> Result<MatrixFq> {
    if !n.is_multiple_of(field.q() - 1) {
        return Err(Error::Usage(format!("line map needs (q-1) | n, got q={} n={n}", field.q())));
    }
    Ok(phi_exponents(field, &[n], d))
}

/// `φ_s̲ : F[Flag_r](F^d) → Γ^{[s̲]_q}(F^d)`.
pub fn phi_seq(field: &FieldSpec, s: &SeqS, d: usize) -> Result<MatrixFq> {
    Ok(phi_exponents(field, &exponents_of(s.entries(), field.q())?, d))
}

/// `φ_{(t, …, t)}` on flags of length `r`.
pub fn phi_constant(field: &FieldSpec, r: usize, t: u32, d: usize) -> Result<MatrixFq> {
    phi_seq(field, &SeqS::constant(r, t)?, d)
}

/// Degrees `(r[s_r]_q, Σ_{i<r} [s_i - s_r]_q)` of the target of `δ_s̲`.
pub fn delta_bidegree(s: &SeqS, q: u32) -> Result<(u32, u32)> {
    let r = s.len() as u64;
    let a = deg32(r * bracket(s.last(), q)?)?;
    let b = deg32(crate::field::bracket_sum(&s.prime(), q)?)?;
    Ok((a, b))
}

/// `δ_s̲ = (1 ⊗ 𝒱^{s_r}) ∘ Δ : Γ^{[s̲]_q} → Γ^{r[s_r]_q} ⊗ Γ^{Σ[s_i - s_r]_q}`.
pub fn delta_s(field: &FieldSpec, s: &SeqS, d: usize) -> Result<MatrixFq> {
    let (a, b) = delta_bidegree(s, field.q())?;
    let n = deg32(s.degree(field.q())?)?;
    let split = coproduct_matrix(field, a as i64, (n - a) as i64, d);
    let versch = verschiebung_power(field, b, d, s.last())?;
    MatrixFq::identity(field, gamma_basis(a, d).len()).tensor(&versch)?.compose(&split)
}

/// `ψ_s̲ = δ_s̲ ∘ φ_s̲`.
pub fn psi_s(field: &FieldSpec, s: &SeqS, d: usize) -> Result<MatrixFq> {
    delta_s(field, s, d)?.compose(&phi_seq(field, s, d)?)
}

/// `η = (𝒱 ⊗ 1) ∘ Δ : Γ^{[s̲⁺]_q} → Γ^{[s̲]_q} ⊗ Γ^{(q-1)r}`.
pub fn eta_stab(field: &FieldSpec, s: &SeqS, d: usize) -> Result<MatrixFq> {
    let q = field.q();
    let low = deg32(s.degree(q)?)?;
    let tail = (q - 1) * s.len() as u32;
    let high = deg32(s.plus().degree(q)?)?;
    if high as u64 != q as u64 * low as u64 + tail as u64 {
        return Err(Error::DimensionMismatch("stabilization degree identity failed".into()));
    }
    let split = coproduct_matrix(field, (high - tail) as i64, tail as i64, d);
    let versch = verschiebung_q(field, low, d)?;
    versch.tensor(&MatrixFq::identity(field, gamma_basis(tail, d).len()))?.compose(&split)
}

/// Index map for `z ↦ (u, w) ↦ z[u + k·w]`, the action of `(1 ⊗ 𝒱^t) ∘ Δ`
/// with `k = q^t` on dense vectors (and of `(𝒱 ⊗ 1) ∘ Δ` with the roles of
/// the factors swapped).
struct SplitIndex {
    n1: usize,
    n2: usize,
    index: Vec<u32>,
}

impl SplitIndex {
    fn new(a: &GammaBasis, b: &GammaBasis, ka: u32, kb: u32, target: &GammaBasis) -> Self {
        let d = a.dim_space();
        let mut index = Vec::with_capacity(a.len() * b.len());
        let mut c = vec![0u32; d];
        for u in a.iter() {
            for w in b.iter() {
                for j in 0..d {
                    c[j] = ka * u[j] + kb * w[j];
                }
                index.push(target.index_of(&c) as u32);
            }
        }
        SplitIndex { n1: a.len(), n2: b.len(), index }
    }

    fn apply(&self, z: &[Gf]) -> Vec<Gf> {
        self.index.iter().map(|&i| z[i as usize]).collect()
    }

    /// Whether `apply(z) == x ⊗ y`.
    fn matches(&self, field: &FieldSpec, z: &[Gf], x: &[Gf], y: &[Gf]) -> bool {
        for (row, &xi) in self.index.chunks(self.n2.max(1)).zip(x.iter().take(self.n1)) {
            for (j, &k) in row.iter().enumerate() {
                if z[k as usize] != field.mul(xi, y[j]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Applies `δ_s̲` to a dense vector over `Γ^{[s̲]_q}(F^d)`.
pub fn delta_apply(field: &FieldSpec, s: &SeqS, d: usize, z: &[Gf]) -> Result<Vec<Gf>> {
    let (a, b) = delta_bidegree(s, field.q())?;
    let n = deg32(s.degree(field.q())?)?;
    let k = deg32((field.q() as u64).checked_pow(s.last()).ok_or(Error::Overflow)?)?;
    let idx = SplitIndex::new(&gamma_basis(a, d), &gamma_basis(b, d), 1, k, &gamma_basis(n, d));
    Ok(idx.apply(z))
}

/// Torus characters on a basis: monomials grouped by `a mod (q - 1)`.
pub(crate) struct WeightClasses {
    members: Vec<Vec<u32>>,
}

impl WeightClasses {
    fn from_codes(codes: impl Iterator<Item = u64>) -> Self {
        let mut ids: HashMap<u64, usize> = HashMap::new();
        let mut members: Vec<Vec<u32>> = Vec::new();
        for (i, code) in codes.enumerate() {
            let next = ids.len();
            let id = *ids.entry(code).or_insert(next);
            if id == members.len() {
                members.push(Vec::new());
            }
            members[id].push(i as u32);
        }
        WeightClasses { members }
    }

    fn code(a: &[u32], m: u32) -> u64 {
        a.iter().rev().fold(0u64, |acc, &x| acc * m as u64 + (x % m) as u64)
    }

    pub(crate) fn gamma(q: u32, basis: &GammaBasis) -> Self {
        Self::from_codes(basis.iter().map(|a| Self::code(a, q - 1)))
    }

    pub(crate) fn tensor(q: u32, a: &GammaBasis, b: &GammaBasis) -> Self {
        let d = a.dim_space();
        let mut sum = vec![0u32; d];
        let codes = a.iter().flat_map(|u| b.iter().map(move |w| (u, w))).map(|(u, w)| {
            for j in 0..d {
                sum[j] = u[j] + w[j];
            }
            Self::code(&sum, q - 1)
        });
        Self::from_codes(codes.collect::<Vec<_>>().into_iter())
    }
}

/// Rank of the span of `columns`, assumed torus-stable up to the orbits the
/// columns represent.
pub(crate) fn equivariant_rank(field: &FieldSpec, weights: &WeightClasses, columns: &[Vec<Gf>]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    if field.q() == 2 {
        let ncols = columns[0].len();
        let mut bits = BitMatrix::zeros(columns.len(), ncols);
        for (i, col) in columns.iter().enumerate() {
            for (j, x) in col.iter().enumerate() {
                if !x.is_zero() {
                    bits.set(i, j, true);
                }
            }
        }
        return bits.rank();
    }
    weights
        .members
        .iter()
        .map(|members| {
            let mut data = Vec::with_capacity(columns.len() * members.len());
            for col in columns {
                data.extend(members.iter().map(|&k| col[k as usize]));
            }
            MatrixFq::from_vec(field, columns.len(), members.len(), data).expect("shape").rank()
        })
        .sum()
}

/// Rank of the joint span of several families `Π v_i^{⊗e_i}` inside one
/// `Γⁿ(F^d)`.
pub fn span_rank(field: &FieldSpec, families: &[Vec<u32>], d: usize) -> Result<usize> {
    let Some(first) = families.first() else {
        return Ok(0);
    };
    let n: u32 = first.iter().sum();
    if families.iter().any(|e| e.iter().sum::<u32>() != n) {
        return Err(Error::DimensionMismatch("families land in different degrees".into()));
    }
    let mut columns = Vec::new();
    for exps in families {
        let basis = FlagBasis::new(field, d, exps.len());
        let reps = torus_orbit_representatives(field, &basis);
        let mut builder = ColumnBuilder::new(field, d, exps);
        for &i in &reps {
            columns.push(builder.column(&basis.flags[i]).to_vec());
        }
    }
    let weights = WeightClasses::gamma(field.q(), &gamma_basis(n, d));
    Ok(equivariant_rank(field, &weights, &columns))
}

/// Rank of `φ_s̲(F^d)`.
pub fn phi_rank(field: &FieldSpec, s: &SeqS, d: usize) -> Result<usize> {
    span_rank(field, &[exponents_of(s.entries(), field.q())?], d)
}

/// Rank of `ψ_s̲(F^d)`.
pub fn psi_rank(field: &FieldSpec, s: &SeqS, d: usize) -> Result<usize> {
    let q = field.q();
    let exps = exponents_of(s.entries(), q)?;
    let n: u32 = exps.iter().sum();
    let (a, b) = delta_bidegree(s, q)?;
    let k = deg32((q as u64).checked_pow(s.last()).ok_or(Error::Overflow)?)?;
    let (ba, bb) = (gamma_basis(a, d), gamma_basis(b, d));
    let idx = SplitIndex::new(&ba, &bb, 1, k, &gamma_basis(n, d));
    let basis = FlagBasis::new(field, d, s.len());
    let reps = torus_orbit_representatives(field, &basis);
    let mut builder = ColumnBuilder::new(field, d, &exps);
    let columns: Vec<Vec<Gf>> = reps.iter().map(|&i| idx.apply(builder.column(&basis.flags[i]))).collect();
    Ok(equivariant_rank(field, &WeightClasses::tensor(q, &ba, &bb), &columns))
}

/// Which flags a diagram check visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckScope {
    /// Every basis flag.
    All,
    /// One flag per torus orbit; both sides are torus-equivariant.
    TorusOrbits,
}

/// Outcome of a column-by-column diagram check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramCheck {
    pub holds: bool,
    pub scope: CheckScope,
    pub flags_checked: usize,
    pub flags_total: usize,
}

fn scoped_flags(field: &FieldSpec, basis: &FlagBasis, scope: CheckScope) -> Vec<usize> {
    match scope {
        CheckScope::All => (0..basis.len()).collect(),
        CheckScope::TorusOrbits => torus_orbit_representatives(field, basis),
    }
}

/// Checks `ψ_s̲ = (φ_{(s_r,…,s_r)} ⊗ φ_{s̲'}) ∘ (1 ⊗ π_{r,r-1}) ∘ diag`.
pub fn key_step_check(field: &FieldSpec, s: &SeqS, d: usize, scope: CheckScope) -> Result<DiagramCheck> {
    let q = field.q();
    let r = s.len();
    if r < 2 {
        return Err(Error::Usage("the key step needs r >= 2".into()));
    }
    let exps = exponents_of(s.entries(), q)?;
    let t_exp = deg32(bracket(s.last(), q)?)?;
    let tail = exponents_of(&s.prime(), q)?;
    let n: u32 = exps.iter().sum();
    let (a, b) = delta_bidegree(s, q)?;
    let k = deg32((q as u64).checked_pow(s.last()).ok_or(Error::Overflow)?)?;
    let idx = SplitIndex::new(&gamma_basis(a, d), &gamma_basis(b, d), 1, k, &gamma_basis(n, d));

    let basis = FlagBasis::new(field, d, r);
    let visit = scoped_flags(field, &basis, scope);
    let mut phi = ColumnBuilder::new(field, d, &exps);
    let mut constant = ColumnBuilder::new(field, d, &vec![t_exp; r]);
    let mut shorter = ColumnBuilder::new(field, d, &tail);
    let mut holds = true;
    for &i in &visit {
        let flag = &basis.flags[i];
        let z = phi.column(flag).to_vec();
        let x = constant.column(flag).to_vec();
        let y = shorter.column(&flag.truncate(r - 1)?);
        if !idx.matches(field, &z, &x, y) {
            holds = false;
            break;
        }
    }
    let scope = if visit.len() == basis.len() { CheckScope::All } else { scope };
    Ok(DiagramCheck { holds, scope, flags_checked: visit.len(), flags_total: basis.len() })
}

/// Checks `η ∘ φ_{s̲⁺} = (φ_s̲ ⊗ φ_{(1,…,1)}) ∘ diag`.
pub fn eta_diagram_check(field: &FieldSpec, s: &SeqS, d: usize, scope: CheckScope) -> Result<DiagramCheck> {
    let q = field.q();
    let r = s.len();
    let low = exponents_of(s.entries(), q)?;
    let high = exponents_of(s.plus().entries(), q)?;
    let ones = vec![q - 1; r];
    let (nl, nh) = (low.iter().sum::<u32>(), high.iter().sum::<u32>());
    let tail = (q - 1) * r as u32;
    if nh as u64 != q as u64 * nl as u64 + tail as u64 {
        return Err(Error::DimensionMismatch("stabilization degree identity failed".into()));
    }
    let idx = SplitIndex::new(&gamma_basis(nl, d), &gamma_basis(tail, d), q, 1, &gamma_basis(nh, d));
    let basis = FlagBasis::new(field, d, r);
    let visit = scoped_flags(field, &basis, scope);
    let mut up = ColumnBuilder::new(field, d, &high);
    let mut down = ColumnBuilder::new(field, d, &low);
    let mut unit = ColumnBuilder::new(field, d, &ones);
    let mut holds = true;
    for &i in &visit {
        let flag = &basis.flags[i];
        let z = up.column(flag).to_vec();
        let x = down.column(flag).to_vec();
        let y = unit.column(flag);
        if !idx.matches(field, &z, &x, y) {
            holds = false;
            break;
        }
    }
    let scope = if visit.len() == basis.len() { CheckScope::All } else { scope };
    Ok(DiagramCheck { holds, scope, flags_checked: visit.len(), flags_total: basis.len() })
}

/// The three routes of the restriction test at a flag `Φ` of length `r - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionReport {
    /// The restriction of `φ_{(t,…,t)}` to flags containing `Φ` is injective.
    pub direct: bool,
    /// `φ_{[t]_q}` on `F^d / ⟨Φ⟩` is injective.
    pub quotient: bool,
    /// The restriction equals `(γ_Φ ∩_σ) ∘ ρ_Φ`.
    pub composite: bool,
    /// `γ_Φ ∩_σ` is injective.
    pub section_injective: bool,
}

impl RestrictionReport {
    pub fn consistent(&self) -> bool {
        self.direct == self.quotient && self.composite && self.section_injective
    }
}

/// Runs the restriction test for `Φ` and `t`, with `σ` the coordinate
/// section on the non-pivot columns of `Φ`.
pub fn restriction_test(field: &FieldSpec, phi: &FlagCanonical, t: u32) -> Result<RestrictionReport> {
    let d = phi.ambient();
    let r = phi.len() + 1;
    if r > d {
        return Err(Error::Usage(format!("a flag of length {} does not extend in dimension {d}", phi.len())));
    }
    let e = deg32(bracket(t, field.q())?)?;
    let pivots = phi.pivots();
    let free: Vec<usize> = (0..d).filter(|j| !pivots.contains(j)).collect();
    let dq = free.len();

    let containing: Vec<FlagCanonical> =
        enumerate_flags(field, d, r).into_iter().filter(|f| phi.is_prefix_of(f)).collect();
    let mut builder = ColumnBuilder::new(field, d, &vec![e; r]);
    let target = builder.target().clone();
    let columns: Vec<Vec<Gf>> = containing.iter().map(|f| builder.column(f).to_vec()).collect();
    let restricted = MatrixFq::from_columns(field, target.len(), &columns)?;
    let direct = restricted.rank() == containing.len();

    let quotient_map = phi_line(field, e, dq)?;
    let quotient = quotient_map.rank() == quotient_map.ncols();

    // ρ_Φ: the last canonical row already vanishes on the pivots of Φ
    let small = gamma_basis(e, dq);
    let rho_cols: Vec<Vec<Gf>> = containing
        .iter()
        .map(|f| {
            let w: Vec<Gf> = free.iter().map(|&j| f.row(r - 1)[j]).collect();
            divided_power_dense(field, &w, e)
        })
        .collect();
    let rho = MatrixFq::from_columns(field, small.len(), &rho_cols)?;

    let gens: Vec<Vec<Gf>> = phi.rows().map(|v| v.to_vec()).collect();
    let gamma_phi = phi_column(field, d, &gens, &vec![e; r - 1])?;
    let lucas = Lucas::new(field.p());
    let gb = gamma_basis(e * (r as u32 - 1), d);
    let gdense = gamma_phi.to_dense();
    let mut cap_cols = Vec::with_capacity(small.len());
    let mut lifted = vec![0u32; d];
    let eb = gamma_basis(e, d);
    for a in small.iter() {
        lifted.iter_mut().for_each(|x| *x = 0);
        for (&j, &x) in free.iter().zip(a) {
            lifted[j] = x;
        }
        let mut out = vec![Gf::ZERO; target.len()];
        dense_product_into(field, &lucas, &gb, &gdense, &[(eb.index_of(&lifted), Gf::ONE)], &eb, &target, &mut out);
        cap_cols.push(out);
    }
    let cap = MatrixFq::from_columns(field, target.len(), &cap_cols)?;
    let composite = cap.compose(&rho)? == restricted;
    let section_injective = cap.rank() == cap.ncols();
    Ok(RestrictionReport { direct, quotient, composite, section_injective })
}

/// `dim 𝔮_k`: the rank of `φ_{k(q-1)}` on lines.
pub fn qk_dim(field: &FieldSpec, k: u32, d: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::Usage("k must be at least 1".into()));
    }
    span_rank(field, &[vec![k * (field.q() - 1)]], d)
}

/// Weakly decreasing positive sequences of length at most `rmax` with
/// `[s̲]_q = n`, in decreasing lexicographic order.
pub fn sequences_of_degree(q: u32, n: u64, rmax: usize) -> Vec<Vec<u32>> {
    fn rec(q: u32, left: u64, cap: u32, rmax: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        if cur.len() == rmax {
            return;
        }
        for s in (1..=cap).rev() {
            let Ok(b) = bracket(s, q) else { continue };
            if b <= left {
                cur.push(s);
                rec(q, left - b, s, rmax, cur, out);
                cur.pop();
            }
        }
    }
    let mut top = 0;
    while bracket(top + 1, q).is_ok_and(|b| b <= n) {
        top += 1;
    }
    let mut out = Vec::new();
    rec(q, n, top, rmax, &mut Vec::new(), &mut out);
    out
}

/// Dimension of the degree-`n` part of the ring of lines in `Γ*(F^d)`.
pub fn ring_of_lines_dim(field: &FieldSpec, n: u32, d: usize) -> Result<usize> {
    let q = field.q();
    let families: Vec<Vec<u32>> = sequences_of_degree(q, n as u64, d)
        .iter()
        .map(|s| exponents_of(s, q))
        .collect::<Result<_>>()?;
    span_rank(field, &families, d)
}

/// Outcome of one cell of the embedding criterion sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub q: u32,
    pub d: usize,
    pub seq: Vec<u32>,
    pub strict: bool,
    pub degree: u64,
    pub flag_dim: u64,
    pub gamma_dim: u64,
    pub rank: Option<usize>,
    pub injective: Option<bool>,
    pub criterion_holds: bool,
    pub per_step: Vec<StepCheck>,
    pub psi_rank: Option<usize>,
    pub key_step: Option<DiagramCheck>,
    pub status: CellStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    /// Criterion holds and the map is injective.
    Verified,
    /// Criterion holds and the map is not injective.
    Falsified,
    /// Criterion fails; the rank is recorded.
    Observed,
    /// Over the dimension cap.
    Skipped,
}

/// Options for [`criterion_report`].
#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    pub cap: u64,
    pub key_step: bool,
    /// Flags times tensor dimension above which the key step visits torus
    /// orbit representatives instead of every flag.
    pub full_check_budget: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { cap: 100_000, key_step: true, full_check_budget: 50_000_000 }
    }
}

/// Computes the report for `φ_s̲(F^d)`.
pub fn criterion_report(field: &FieldSpec, s: &SeqS, d: usize, opts: &ReportOptions) -> Result<CriterionReport> {
    let q = field.q();
    let degree = s.degree(q)?;
    let flag_dim = flag_count(q, d, s.len());
    let gdim = gamma_dim(degree, d);
    let per_step = s.per_step(q, d)?;
    let criterion_holds = per_step.iter().all(|c| c.lhs >= c.rhs);
    let mut report = CriterionReport {
        q,
        d,
        seq: s.entries().to_vec(),
        strict: s.is_strict(),
        degree,
        flag_dim,
        gamma_dim: gdim,
        rank: None,
        injective: None,
        criterion_holds,
        per_step,
        psi_rank: None,
        key_step: None,
        status: CellStatus::Skipped,
    };
    if gdim > opts.cap {
        return Ok(report);
    }
    let rank = phi_rank(field, s, d)?;
    let injective = rank as u64 == flag_dim;
    report.rank = Some(rank);
    report.injective = Some(injective);
    report.status = match (criterion_holds, injective) {
        (true, true) => CellStatus::Verified,
        (true, false) => CellStatus::Falsified,
        (false, _) => CellStatus::Observed,
    };
    if opts.key_step && s.len() >= 2 && flag_dim > 0 {
        let (a, b) = delta_bidegree(s, q)?;
        let tensor = gamma_dim(a as u64, d).saturating_mul(gamma_dim(b as u64, d));
        if tensor <= opts.cap.saturating_mul(10) {
            report.psi_rank = Some(psi_rank(field, s, d)?);
            let scope = if flag_dim.saturating_mul(tensor.max(gdim)) <= opts.full_check_budget {
                CheckScope::All
            } else {
                CheckScope::TorusOrbits
            };
            report.key_step = Some(key_step_check(field, s, d, scope)?);
        }
    }
    Ok(report)
}
