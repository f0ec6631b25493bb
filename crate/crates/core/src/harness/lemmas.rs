//! Exact checks of the structural identities behind the embedding
//! criterion, over a bounded box of fields, dimensions and degrees.
//!
//! Randomized checks use a fixed seed, so the battery is deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{fields_json, thread_pool, Report, SweepConfig, EXIT_FALSIFIED, EXIT_OK};
use crate::chmorph::{
    key_step_check, phi_column, phi_exponents, phi_seq, psi_s, qk_dim, restriction_test, CheckScope, SeqS,
};
use crate::error::Result;
use crate::field::{bracket, FieldSpec, Gf, Lucas};
use crate::flags::{
    canonicalize, diag_matrix, enumerate_flags, flag_count, flag_map_matrix, truncation_matrix,
};
use crate::gamma::{
    bar_gamma_kernel, coproduct, coproduct_matrix, dense_product_into, divided_power_dense,
    divided_power_of_vector, for_each_split, gamma_basis, gamma_map, product, product_matrix, sparse,
    tilde_gamma_kernel, verschiebung_p, verschiebung_q, GammaElement, TensorElement,
};
use crate::linalg::MatrixFq;

const SEED: u64 = 0x5eed_f1a9;
const MAX_EXAMPLES: usize = 5;
/// Largest number of monomial tuples visited per Verschiebung cell.
const TUPLE_BUDGET: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaResult {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    pub examples: Vec<String>,
    pub passed: bool,
}

#[derive(Default)]
struct Tally {
    cases: u64,
    failures: u64,
    examples: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(describe());
            }
        }
    }

    fn finish(self, name: &str) -> LemmaResult {
        LemmaResult {
            name: name.to_string(),
            cases: self.cases,
            passed: self.failures == 0 && self.cases > 0,
            failures: self.failures,
            examples: self.examples,
        }
    }
}

/// One row of the line filtration table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QkRow {
    pub q: u32,
    pub d: usize,
    pub k: u32,
    pub qk: usize,
    pub tilde_dim: usize,
    pub lines: u64,
    /// `qk(k) - qk(k - 1) = dim Γ̃^{k(q-1)}`, for `k ≥ 2`.
    pub recursion: Option<bool>,
    /// `qk(k)` equals the number of lines, when `d ≤ k`.
    pub saturated: Option<bool>,
}

/// One Verschiebung-of-products cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerschCell {
    pub q: u32,
    pub d: usize,
    pub modulus: u32,
    pub betas: Vec<u32>,
    pub divisible: bool,
    pub tuples: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaReport {
    pub fields: Vec<String>,
    pub d_max: usize,
    pub deg_max: u32,
    pub lemmas: Vec<LemmaResult>,
    pub qk: Vec<QkRow>,
    pub versch: Vec<VerschCell>,
}

impl LemmaReport {
    pub fn get(&self, name: &str) -> Option<&LemmaResult> {
        self.lemmas.iter().find(|l| l.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.lemmas.iter().all(|l| l.passed)
    }
}

impl Report for LemmaReport {
    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["lemma", "cases", "failures", "passed"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.lemmas
            .iter()
            .map(|l| vec![l.name.clone(), l.cases.to_string(), l.failures.to_string(), l.passed.to_string()])
            .collect()
    }

    fn summary(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("\nline filtration (q, d, k, dim, dim Γ̃, lines, recursion, saturated)\n");
        for r in &self.qk {
            let show = |b: Option<bool>| b.map_or("-".to_string(), |x| x.to_string());
            let _ = writeln!(
                s,
                "  {} {} {}  {:>4}  {:>4}  {:>4}  {}  {}",
                r.q,
                r.d,
                r.k,
                r.qk,
                r.tilde_dim,
                r.lines,
                show(r.recursion),
                show(r.saturated)
            );
        }
        let trivial = self.versch.iter().filter(|c| !c.divisible).count();
        let _ = writeln!(
            s,
            "verschiebung cells {} ({} vanishing, {} commuting)",
            self.versch.len(),
            trivial,
            self.versch.len() - trivial
        );
        for l in self.lemmas.iter().filter(|l| !l.passed) {
            let _ = writeln!(s, "FAILED {}: {:?}", l.name, l.examples);
        }
        s
    }

    fn exit_code(&self) -> i32 {
        if self.all_passed() {
            EXIT_OK
        } else {
            EXIT_FALSIFIED
        }
    }
}

/// All vectors of `F^d`.
fn all_vectors(field: &FieldSpec, d: usize) -> Vec<Vec<Gf>> {
    let q = field.q() as u64;
    (0..q.pow(d as u32))
        .map(|mut idx| {
            (0..d)
                .map(|_| {
                    let x = Gf((idx % q) as u16);
                    idx /= q;
                    x
                })
                .collect()
        })
        .collect()
}

fn random_matrix(field: &FieldSpec, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> MatrixFq {
    let data = (0..rows * cols).map(|_| Gf(rng.gen_range(0..field.q()) as u16)).collect();
    MatrixFq::from_vec(field, rows, cols, data).expect("shape")
}

fn random_invertible(field: &FieldSpec, rng: &mut ChaCha8Rng, d: usize) -> MatrixFq {
    loop {
        let m = random_matrix(field, rng, d, d);
        if m.rank() == d {
            return m;
        }
    }
}

fn random_unit(field: &FieldSpec, rng: &mut ChaCha8Rng) -> Gf {
    Gf(rng.gen_range(1..field.q()) as u16)
}

/// Replaces `v_i` by `c_i v_i + Σ_{j<i} c_j v_j` with `c_i ≠ 0`.
fn triangular_change(field: &FieldSpec, rng: &mut ChaCha8Rng, gens: &[Vec<Gf>]) -> Vec<Vec<Gf>> {
    let mut out = Vec::with_capacity(gens.len());
    for (i, v) in gens.iter().enumerate() {
        let mut w = v.clone();
        field.scale(&mut w, random_unit(field, rng));
        for u in &gens[..i] {
            field.axpy(&mut w, Gf(rng.gen_range(0..field.q()) as u16), u);
        }
        out.push(w);
    }
    out
}

fn strict_cells(cfg: &SweepConfig, field: &FieldSpec, r_min: usize) -> Vec<(usize, SeqS)> {
    let mut out = Vec::new();
    for d in 1..=cfg.d_max {
        for r in r_min..=cfg.r_max.min(d) {
            for s in super::sequences(r, cfg.s_max, true) {
                if s.degree(field.q()).is_ok_and(|n| n <= cfg.deg_max as u64) {
                    out.push((d, s));
                }
            }
        }
    }
    out
}

/// `x^{⊗[s]_q}` equals `Π_{j<sm} x^{⊗(p-1)p^j}`.
pub fn power_product_expansion(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    for field in &cfg.fields {
        let (p, m, q) = (field.p(), field.m(), field.q());
        for d in 1..=cfg.d_max {
            let mut s = 1;
            while bracket(s, q)? <= cfg.deg_max as u64 {
                let n = bracket(s, q)? as u32;
                for x in all_vectors(field, d) {
                    let lhs = divided_power_of_vector(field, &x, n);
                    let mut rhs = GammaElement::monomial(vec![0; d]);
                    for j in 0..s * m {
                        rhs = product(field, &rhs, &divided_power_of_vector(field, &x, (p - 1) * p.pow(j)))?;
                    }
                    t.check(lhs == rhs, || format!("q={q} d={d} s={s} x={x:?}"));
                }
                s += 1;
            }
        }
    }
    Ok(t.finish("power-product-expansion"))
}

/// `x^{⊗[s]_q} x^{⊗i} = 0` for `0 < i ≤ [s]_q`, every `x`, `q ≤ 4`,
/// `d ≤ 3`, `s ≤ 3`.
pub fn power_product_vanishing(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    for field in cfg.fields.iter().filter(|f| f.q() <= 4) {
        let q = field.q();
        let lucas = Lucas::new(field.p());
        for d in 1..=cfg.d_max.min(3) {
            for s in 1..=3u32 {
                let n = bracket(s, q)? as u32;
                let xb = gamma_basis(n, d);
                for v in all_vectors(field, d) {
                    let x = divided_power_dense(field, &v, n);
                    for i in 1..=n {
                        let yb = gamma_basis(i, d);
                        let y = sparse(&divided_power_dense(field, &v, i));
                        let ob = gamma_basis(n + i, d);
                        let mut out = vec![Gf::ZERO; ob.len()];
                        dense_product_into(field, &lucas, &xb, &x, &y, &yb, &ob, &mut out);
                        t.check(out.iter().all(|c| c.is_zero()), || format!("q={q} d={d} s={s} i={i} v={v:?}"));
                    }
                }
            }
        }
    }
    Ok(t.finish("power-product-vanishing"))
}

/// Coefficient of `e^(c)` in `μ ∘ Δ` through the factors `degrees`.
fn split_product_coefficient(lucas: &Lucas, c: &[u32], degrees: &[u32]) -> u32 {
    let p = lucas.p();
    if degrees.len() == 1 {
        return (c.iter().sum::<u32>() == degrees[0]) as u32;
    }
    let mut total = 0u32;
    for_each_split(c, degrees[0], 1, |u| {
        let rest: Vec<u32> = c.iter().zip(u).map(|(a, b)| a - b).collect();
        let mut k = 1u32;
        for (&a, &b) in u.iter().zip(&rest) {
            k = k * lucas.pair(a, b) % p;
        }
        if k != 0 {
            total = (total + k * split_product_coefficient(lucas, &rest, &degrees[1..])) % p;
        }
    });
    total
}

/// `μ ∘ Δ` through `Γ^{a_0} ⊗ Γ^{a_1 p^{r_1}} ⊗ ⋯` is the identity when
/// `a_i p^{r_i} < p^{r_{i+1}}`.
pub fn coproduct_product_splitting(cfg: &SweepConfig) -> Result<LemmaResult> {
    fn chains(p: u32, deg_max: u32) -> Vec<Vec<u32>> {
        // degrees a_i p^{r_i} for 0 = r_0 < r_1 (< r_2)
        let mut out = Vec::new();
        let pow = |r: u32| p.pow(r);
        let mut r1 = 1;
        while pow(r1) <= deg_max {
            for a0 in 0..pow(r1) {
                let mut a1 = 0;
                while a0 + a1 * pow(r1) <= deg_max {
                    out.push(vec![a0, a1 * pow(r1)]);
                    if a1 * pow(r1) < pow(r1 + 1) {
                        let mut r2 = r1 + 1;
                        while a1 * pow(r1) < pow(r2) && a0 + a1 * pow(r1) + pow(r2) <= deg_max {
                            let mut a2 = 1;
                            while a0 + a1 * pow(r1) + a2 * pow(r2) <= deg_max {
                                out.push(vec![a0, a1 * pow(r1), a2 * pow(r2)]);
                                a2 += 1;
                            }
                            r2 += 1;
                        }
                    }
                    a1 += 1;
                }
            }
            r1 += 1;
        }
        out
    }
    let mut t = Tally::default();
    for field in &cfg.fields {
        let lucas = Lucas::new(field.p());
        for degrees in chains(field.p(), cfg.deg_max) {
            let n: u32 = degrees.iter().sum();
            for d in 1..=cfg.d_max {
                let basis = gamma_basis(n, d);
                let ok = basis.iter().all(|c| split_product_coefficient(&lucas, c, &degrees) == 1);
                t.check(ok, || format!("p={} d={d} degrees={degrees:?}", field.p()));
                if degrees.len() == 2 && d <= 2 {
                    let (a, b) = (degrees[0], degrees[1]);
                    let m = product_matrix(field, a, b, d).compose(&coproduct_matrix(field, a as i64, b as i64, d))?;
                    t.check(m == MatrixFq::identity(field, basis.len()), || {
                        format!("matrix route p={} d={d} degrees={degrees:?}", field.p())
                    });
                }
            }
        }
    }
    Ok(t.finish("coproduct-product-splitting"))
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    // nondecreasing positive parts
    fn rec(left: u32, parts: usize, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in min..=left {
            cur.push(x);
            rec(left - x, parts - 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, 1, &mut Vec::new(), &mut out);
    out
}

/// Checks `𝒱_k ∘ μ` on `⊗ Γ^{β_i}`: zero unless `k | β_i` for all `i`, and
/// then equal to `μ ∘ (⊗ 𝒱_k)`. Returns `None` when over budget.
fn versch_cell(field: &FieldSpec, d: usize, k: u32, betas: &[u32]) -> Option<VerschCell> {
    let bases: Vec<_> = betas.iter().map(|&b| gamma_basis(b, d)).collect();
    let tuples: u64 = bases.iter().map(|b| b.len() as u64).product();
    if tuples > TUPLE_BUDGET {
        return None;
    }
    let lucas = Lucas::new(field.p());
    let p = field.p();
    let divisible = betas.iter().all(|b| b % k == 0);
    let mut holds = true;
    let mut idx = vec![0usize; betas.len()];
    'outer: loop {
        let factors: Vec<&[u32]> = idx.iter().zip(&bases).map(|(&i, b)| b.exps(i)).collect();
        // left side: the product, then divide by k
        let mut sum = vec![0u32; d];
        let mut lhs = 1u32;
        for f in &factors {
            for j in 0..d {
                lhs = lhs * lucas.pair(sum[j], f[j]) % p;
                sum[j] += f[j];
            }
        }
        if sum.iter().any(|x| x % k != 0) {
            lhs = 0;
        }
        // right side: divide each factor by k, then the product
        let mut rhs = 0u32;
        if divisible && factors.iter().all(|f| f.iter().all(|x| x % k == 0)) {
            let mut part = vec![0u32; d];
            rhs = 1;
            for f in &factors {
                for j in 0..d {
                    rhs = rhs * lucas.pair(part[j], f[j] / k) % p;
                    part[j] += f[j] / k;
                }
            }
        }
        if lhs != rhs {
            holds = false;
            break;
        }
        for pos in (0..idx.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < bases[pos].len() {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    Some(VerschCell { q: field.q(), d, modulus: k, betas: betas.to_vec(), divisible, tuples, holds })
}

pub fn verschiebung_of_products(cfg: &SweepConfig) -> Result<(LemmaResult, Vec<VerschCell>)> {
    let mut t = Tally::default();
    let mut cells = Vec::new();
    for field in &cfg.fields {
        let mut moduli = vec![field.p()];
        if field.q() != field.p() {
            moduli.push(field.q());
        }
        for &k in &moduli {
            for d in 1..=cfg.d_max {
                let mut total = k;
                while total <= cfg.deg_max {
                    for parts in 2..=3 {
                        for betas in compositions(total, parts) {
                            if let Some(cell) = versch_cell(field, d, k, &betas) {
                                t.check(cell.holds, || format!("q={} d={d} k={k} betas={betas:?}", field.q()));
                                cells.push(cell);
                            }
                        }
                    }
                    total += k;
                }
            }
        }
    }
    Ok((t.finish("verschiebung-of-products"), cells))
}

/// `#{a ∈ [0, m]^d : Σ a = n}` by direct enumeration.
pub fn truncated_count(n: u32, d: usize, m: u32) -> usize {
    if d == 0 {
        return (n == 0) as usize;
    }
    (0..=m.min(n)).map(|x| truncated_count(n - x, d - 1, m)).sum()
}

/// Dimensions of `Γ̃ⁿ` and `Γ̄ⁿ`, and the vanishing of `Γ̃ⁿ(F^d)` when
/// `d ≤ (n - 1)/(q - 1)`.
pub fn truncated_kernels(cfg: &SweepConfig) -> Result<(LemmaResult, LemmaResult)> {
    let mut dims = Tally::default();
    let mut vanish = Tally::default();
    for field in &cfg.fields {
        let (p, q) = (field.p(), field.q());
        for d in 1..=cfg.d_max {
            for n in 0..=cfg.deg_max {
                let tilde = tilde_gamma_kernel(field, n, d)?;
                let bar = bar_gamma_kernel(field, n, d)?;
                dims.check(tilde.len() == truncated_count(n, d, q - 1), || {
                    format!("tilde q={q} d={d} n={n}: {}", tilde.len())
                });
                dims.check(bar.len() == truncated_count(n, d, p - 1), || {
                    format!("bar q={q} d={d} n={n}: {}", bar.len())
                });
                if p == q {
                    dims.check(tilde == bar, || format!("tilde != bar at q={q} d={d} n={n}"));
                }
                if n >= 1 && (d as u32) * (q - 1) < n {
                    vanish.check(tilde.is_empty(), || format!("q={q} d={d} n={n}"));
                }
            }
        }
    }
    Ok((dims.finish("truncated-kernel-dimension"), vanish.finish("truncated-kernel-vanishing")))
}

/// `ψ_s̲ = (φ_{(s_r,…,s_r)} ⊗ φ_{s̲'}) ∘ (1 ⊗ π_{r,r-1}) ∘ diag` as matrices.
pub fn key_step_matrices(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    for field in &cfg.fields {
        for (d, s) in strict_cells(cfg, field, 2) {
            let r = s.len();
            let lhs = psi_s(field, &s, d)?;
            let constant = phi_exponents(field, &vec![bracket(s.last(), field.q())? as u32; r], d);
            let tail: Vec<u32> =
                s.prime().iter().map(|&x| bracket(x, field.q()).map(|b| b as u32)).collect::<Result<_>>()?;
            let shorter = phi_exponents(field, &tail, d);
            let pi = truncation_matrix(field, d, r, r - 1)?;
            let n = flag_count(field.q(), d, r) as usize;
            let rhs = constant
                .tensor(&shorter)?
                .compose(&MatrixFq::identity(field, n).tensor(&pi)?.compose(&diag_matrix(field, d, r))?)?;
            t.check(lhs == rhs, || format!("q={} d={d} s={s}", field.q()));
            let fast = key_step_check(field, &s, d, CheckScope::All)?;
            t.check(fast.holds, || format!("column route q={} d={d} s={s}", field.q()));
        }
    }
    Ok(t.finish("key-step-diagram"))
}

/// The line filtration: `qk(k) - qk(k-1) = dim Γ̃^{k(q-1)}` and saturation
/// at `d ≤ k`.
pub fn line_filtration(cfg: &SweepConfig) -> Result<(LemmaResult, Vec<QkRow>)> {
    let mut t = Tally::default();
    let mut rows = Vec::new();
    for field in &cfg.fields {
        let q = field.q();
        for d in 1..=cfg.d_max {
            let lines = flag_count(q, d, 1);
            let mut prev = None;
            for k in 1..=5u32 {
                if k * (q - 1) > cfg.deg_max {
                    break;
                }
                let qk = qk_dim(field, k, d)?;
                let tilde_dim = tilde_gamma_kernel(field, k * (q - 1), d)?.len();
                let recursion = prev.map(|p: usize| qk >= p && qk - p == tilde_dim);
                let saturated = (d as u32 <= k).then_some(qk as u64 == lines);
                if let Some(ok) = recursion {
                    t.check(ok, || format!("recursion q={q} d={d} k={k}"));
                }
                if let Some(ok) = saturated {
                    t.check(ok, || format!("saturation q={q} d={d} k={k}"));
                }
                rows.push(QkRow { q, d, k, qk, tilde_dim, lines, recursion, saturated });
                prev = Some(qk);
            }
        }
    }
    Ok((t.finish("line-filtration"), rows))
}

/// `Δ ∘ μ = (μ ⊗ μ) ∘ (1 ⊗ τ ⊗ 1) ∘ (Δ ⊗ Δ)` on monomials of total degree
/// at most 6.
pub fn bialgebra(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    for field in &cfg.fields {
        for d in 1..=cfg.d_max {
            for n in 0..=cfg.deg_max.min(6) {
                for c in 0..=n {
                    let e = n - c;
                    for x in gamma_basis(c, d).iter() {
                        let x = GammaElement::monomial(x.to_vec());
                        for y in gamma_basis(e, d).iter() {
                            let y = GammaElement::monomial(y.to_vec());
                            let xy = product(field, &x, &y)?;
                            for a in 0..=n {
                                let lhs = coproduct(&xy, a, n - a)?;
                                let mut rhs = TensorElement::zero((a, n - a), d);
                                for a1 in a.saturating_sub(e)..=a.min(c) {
                                    let dx = coproduct(&x, a1, c - a1)?;
                                    let dy = coproduct(&y, a - a1, e - (a - a1))?;
                                    for (x1, x2, cx) in dx.terms() {
                                        for (y1, y2, cy) in dy.terms() {
                                            let left = product(
                                                field,
                                                &GammaElement::monomial(x1.0.clone()),
                                                &GammaElement::monomial(y1.0.clone()),
                                            )?;
                                            let right = product(
                                                field,
                                                &GammaElement::monomial(x2.0.clone()),
                                                &GammaElement::monomial(y2.0.clone()),
                                            )?
                                            .scaled(field, field.mul(cx, cy));
                                            rhs = rhs.add(field, &TensorElement::tensor(field, &left, &right)?)?;
                                        }
                                    }
                                }
                                t.check(lhs == rhs, || format!("q={} d={d} c={c} e={e} a={a}", field.q()));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(t.finish("bialgebra"))
}

/// `𝒱 ∘ Γ^{qn}(f) = Γⁿ(f) ∘ 𝒱`, and `𝒱_p ∘ Γ^{pn}(f) = Γⁿ(f^{(1)}) ∘ 𝒱_p`.
pub fn verschiebung_naturality(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for field in &cfg.fields {
        let (p, q) = (field.p(), field.q());
        for d in 1..=cfg.d_max {
            for d2 in 1..=cfg.d_max {
                for n in 1..=3u32 {
                    if q * n > cfg.deg_max {
                        break;
                    }
                    for _ in 0..2 {
                        let f = random_matrix(field, &mut rng, d2, d);
                        let lhs = verschiebung_q(field, n, d2)?.compose(&gamma_map(&f, q * n))?;
                        let rhs = gamma_map(&f, n).compose(&verschiebung_q(field, n, d)?)?;
                        t.check(lhs == rhs, || format!("V q={q} {d2}x{d} n={n}"));
                        let lhs = verschiebung_p(field, n, d2)?.compose(&gamma_map(&f, p * n))?;
                        let rhs = gamma_map(&f.frobenius(1), n).compose(&verschiebung_p(field, n, d)?)?;
                        t.check(lhs == rhs, || format!("V_p q={q} {d2}x{d} n={n}"));
                    }
                }
            }
        }
    }
    Ok(t.finish("verschiebung-naturality"))
}

/// `Γⁿ(g f) = Γⁿ(g) Γⁿ(f)` and `Γⁿ(1) = 1`.
pub fn gamma_functoriality(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for field in &cfg.fields {
        for n in 0..=5u32 {
            for d1 in 1..=cfg.d_max {
                let id = gamma_map(&MatrixFq::identity(field, d1), n);
                t.check(id == MatrixFq::identity(field, gamma_basis(n, d1).len()), || {
                    format!("identity q={} d={d1} n={n}", field.q())
                });
                for _ in 0..3 {
                    let d2 = rng.gen_range(1..=cfg.d_max);
                    let d3 = rng.gen_range(1..=cfg.d_max);
                    let f = random_matrix(field, &mut rng, d2, d1);
                    let g = random_matrix(field, &mut rng, d3, d2);
                    let lhs = gamma_map(&g.compose(&f)?, n);
                    let rhs = gamma_map(&g, n).compose(&gamma_map(&f, n))?;
                    t.check(lhs == rhs, || format!("q={} n={n} {d3}x{d2}x{d1}", field.q()));
                }
            }
        }
    }
    Ok(t.finish("gamma-functoriality"))
}

/// Flag counts, canonical forms and functoriality of `F[Flag_r]`.
pub fn flag_properties(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    for field in &cfg.fields {
        let q = field.q();
        for d in 0..=cfg.d_max + 1 {
            for r in 0..=d + 1 {
                let flags = enumerate_flags(field, d, r);
                t.check(flags.len() as u64 == flag_count(q, d, r), || format!("count q={q} d={d} r={r}"));
                if d == 0 && r >= 1 {
                    t.check(flags.is_empty(), || format!("constant term q={q} r={r}"));
                }
            }
        }
        for d in 1..=cfg.d_max {
            for r in 1..=d {
                let flags = enumerate_flags(field, d, r);
                for _ in 0..10 {
                    let flag = &flags[rng.gen_range(0..flags.len())];
                    let gens: Vec<Vec<Gf>> = flag.rows().map(|v| v.to_vec()).collect();
                    let changed = triangular_change(field, &mut rng, &gens);
                    t.check(canonicalize(field, d, &changed).as_ref() == Some(flag), || {
                        format!("canonical q={q} d={d} r={r}")
                    });
                }
                if r >= 2 {
                    let mut dep: Vec<Vec<Gf>> = flags[0].rows().map(|v| v.to_vec()).collect();
                    dep[r - 1] = dep[0].clone();
                    t.check(canonicalize(field, d, &dep).is_none(), || format!("dependent q={q} d={d}"));
                }
                for _ in 0..2 {
                    let d2 = rng.gen_range(1..=cfg.d_max);
                    let d3 = rng.gen_range(1..=cfg.d_max);
                    let f = random_matrix(field, &mut rng, d2, d);
                    let g = random_matrix(field, &mut rng, d3, d2);
                    let lhs = flag_map_matrix(&g.compose(&f)?, r);
                    let rhs = flag_map_matrix(&g, r).compose(&flag_map_matrix(&f, r))?;
                    t.check(lhs == rhs, || format!("functoriality q={q} r={r} {d3}x{d2}x{d}"));
                }
                let scalar = MatrixFq::identity(field, d).scaled(field.primitive());
                t.check(flag_map_matrix(&scalar, r) == MatrixFq::identity(field, flags.len()), || {
                    format!("weight zero q={q} d={d} r={r}")
                });
            }
        }
    }
    Ok(t.finish("flag-properties"))
}

/// Columns of `φ_s̲` do not depend on the generators, and `φ_s̲` commutes
/// with the action of `GL_d`.
pub fn phi_equivariance(cfg: &SweepConfig) -> Result<(LemmaResult, LemmaResult)> {
    let mut defined = Tally::default();
    let mut natural = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    for field in &cfg.fields {
        for s in (1..=cfg.r_max).flat_map(|r| super::sequences(r, cfg.s_max, false)) {
            let n = s.degree(field.q())?;
            if n > cfg.deg_max as u64 {
                continue;
            }
            let exps: Vec<u32> =
                s.entries().iter().map(|&x| bracket(x, field.q()).map(|b| b as u32)).collect::<Result<_>>()?;
            for d in s.len()..=cfg.d_max {
                let phi = phi_seq(field, &s, d)?;
                let flags = enumerate_flags(field, d, s.len());
                for _ in 0..4 {
                    let j = rng.gen_range(0..flags.len());
                    let gens: Vec<Vec<Gf>> = flags[j].rows().map(|v| v.to_vec()).collect();
                    let changed = triangular_change(field, &mut rng, &gens);
                    let col = phi_column(field, d, &changed, &exps)?.to_dense();
                    defined.check(col == phi.column(j), || format!("q={} d={d} s={s}", field.q()));
                }
                let g = random_invertible(field, &mut rng, d);
                let lhs = gamma_map(&g, n as u32).compose(&phi)?;
                let rhs = phi.compose(&flag_map_matrix(&g, s.len()))?;
                natural.check(lhs == rhs, || format!("q={} d={d} s={s}", field.q()));
            }
        }
    }
    Ok((defined.finish("phi-well-defined"), natural.finish("phi-naturality")))
}

/// Direct, quotient and composite routes of the restriction test agree,
/// for `q ≤ 3` and `d ≤ 3`.
pub fn restriction_routes(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    for field in cfg.fields.iter().filter(|f| f.q() <= 3) {
        for d in 1..=cfg.d_max.min(3) {
            for r in 1..=d {
                for tt in 1..=3u32 {
                    if r as u64 * bracket(tt, field.q())? > cfg.deg_max as u64 {
                        break;
                    }
                    for phi in enumerate_flags(field, d, r - 1) {
                        let rep = restriction_test(field, &phi, tt)?;
                        t.check(rep.consistent(), || format!("q={} d={d} r={r} t={tt}: {rep:?}", field.q()));
                        if field.q() == 2 {
                            // the sufficient threshold is sharp at q = 2
                            let sharp = bracket(tt, 2)? >= (d - r + 1) as u64;
                            t.check(rep.quotient == sharp, || format!("q=2 sharpness d={d} r={r} t={tt}"));
                        }
                    }
                }
            }
        }
    }
    Ok(t.finish("restriction-routes"))
}

/// `rank ψ_s̲ ≤ rank φ_s̲`, and injectivity of `ψ_s̲` forces that of `φ_s̲`.
pub fn phi_psi(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    for field in &cfg.fields {
        for (d, s) in strict_cells(cfg, field, 1) {
            let phi = phi_seq(field, &s, d)?.rank();
            let psi = psi_s(field, &s, d)?.rank();
            let full = flag_count(field.q(), d, s.len()) as usize;
            t.check(psi <= phi && (psi < full || phi == full), || {
                format!("q={} d={d} s={s} psi={psi} phi={phi}", field.q())
            });
        }
    }
    Ok(t.finish("phi-psi"))
}

/// `[s_i]_q - [s_r]_q = q^{s_r}[s_i - s_r]_q` and `[s + 1]_q = q[s]_q + q - 1`.
pub fn bracket_identities(cfg: &SweepConfig) -> Result<LemmaResult> {
    let mut t = Tally::default();
    for field in &cfg.fields {
        let q = field.q() as u64;
        for si in 0..=10u32 {
            for sr in 0..=si {
                let lhs = bracket(si, field.q())? - bracket(sr, field.q())?;
                let rhs = q.pow(sr) * bracket(si - sr, field.q())?;
                t.check(lhs == rhs, || format!("q={q} si={si} sr={sr}"));
            }
            let plus = bracket(si + 1, field.q())?;
            t.check(plus == q * bracket(si, field.q())? + q - 1, || format!("shift q={q} s={si}"));
        }
    }
    Ok(t.finish("bracket-identities"))
}

enum Outcome {
    One(LemmaResult),
    Two(LemmaResult, LemmaResult),
    Qk(LemmaResult, Vec<QkRow>),
    Versch(LemmaResult, Vec<VerschCell>),
}

/// Runs every check over the configured box.
pub fn run_lemma_battery(cfg: &SweepConfig) -> Result<LemmaReport> {
    cfg.validate()?;
    type Job = fn(&SweepConfig) -> Result<Outcome>;
    let jobs: Vec<Job> = vec![
        |c| power_product_expansion(c).map(Outcome::One),
        |c| power_product_vanishing(c).map(Outcome::One),
        |c| coproduct_product_splitting(c).map(Outcome::One),
        |c| verschiebung_of_products(c).map(|(l, v)| Outcome::Versch(l, v)),
        |c| truncated_kernels(c).map(|(a, b)| Outcome::Two(a, b)),
        |c| key_step_matrices(c).map(Outcome::One),
        |c| line_filtration(c).map(|(l, rows)| Outcome::Qk(l, rows)),
        |c| bialgebra(c).map(Outcome::One),
        |c| verschiebung_naturality(c).map(Outcome::One),
        |c| gamma_functoriality(c).map(Outcome::One),
        |c| flag_properties(c).map(Outcome::One),
        |c| phi_equivariance(c).map(|(a, b)| Outcome::Two(a, b)),
        |c| restriction_routes(c).map(Outcome::One),
        |c| phi_psi(c).map(Outcome::One),
        |c| bracket_identities(c).map(Outcome::One),
    ];
    let pool = thread_pool()?;
    let outcomes: Vec<Outcome> = pool.install(|| jobs.par_iter().map(|job| job(cfg)).collect::<Result<_>>())?;
    let mut report = LemmaReport {
        fields: fields_json(cfg),
        d_max: cfg.d_max,
        deg_max: cfg.deg_max,
        lemmas: Vec::new(),
        qk: Vec::new(),
        versch: Vec::new(),
    };
    for o in outcomes {
        match o {
            Outcome::One(l) => report.lemmas.push(l),
            Outcome::Two(a, b) => report.lemmas.extend([a, b]),
            Outcome::Qk(l, rows) => {
                report.lemmas.push(l);
                report.qk = rows;
            }
            Outcome::Versch(l, cells) => {
                report.lemmas.push(l);
                report.versch = cells;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_counts() {
        assert_eq!(truncated_count(3, 3, 1), 1);
        assert_eq!(truncated_count(3, 2, 1), 0);
        assert_eq!(truncated_count(2, 2, 2), 3);
        assert_eq!(truncated_count(0, 4, 1), 1);
    }

    #[test]
    fn compositions_are_sorted() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2]]);
    }

    #[test]
    fn failures_exit_one() {
        let mut t = Tally::default();
        t.check(true, String::new);
        t.check(false, || "counterexample".into());
        let report = LemmaReport {
            fields: vec![],
            d_max: 1,
            deg_max: 1,
            lemmas: vec![t.finish("demo")],
            qk: vec![],
            versch: vec![],
        };
        assert_eq!(report.lemmas[0].examples, vec!["counterexample".to_string()]);
        assert_eq!(report.exit_code(), EXIT_FALSIFIED);
        assert!(!Tally::default().finish("empty").passed);
    }

    #[test]
    fn small_battery_passes() {
        let mut cfg = SweepConfig::new(super::super::Mode::Lemmas);
        cfg.fields = vec![FieldSpec::with_order(2).unwrap(), FieldSpec::with_order(3).unwrap()];
        cfg.d_max = 2;
        cfg.deg_max = 8;
        cfg.s_max = 3;
        let report = run_lemma_battery(&cfg).unwrap();
        for l in &report.lemmas {
            assert!(l.passed, "{} failed: {:?}", l.name, l.examples);
        }
    }
}
