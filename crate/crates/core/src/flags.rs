//! Complete flags `V₁ < ⋯ < V_r` in `F^d` and the flag modules `F[Flag_r]`.
//!
//! A flag is stored by its canonical generators: row `i` lies in `V_i`, has
//! zero entries at the pivot columns of rows `1..i`, and its leftmost
//! nonzero entry (its pivot) is 1. This form is unique, so flag equality is
//! row equality, and the canonical form of a truncated flag is the prefix of
//! the canonical form.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Gf};
use crate::linalg::MatrixFq;

/// Canonical form of a complete flag of length `r` in `F^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlagCanonical {
    r: usize,
    d: usize,
    rows: Vec<Gf>,
}

impl FlagCanonical {
    pub fn len(&self) -> usize {
        self.r
    }

    pub fn is_empty(&self) -> bool {
        self.r == 0
    }

    pub fn ambient(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[Gf] {
        &self.rows[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Gf]> {
        self.rows.chunks(self.d.max(1)).take(self.r)
    }

    /// Pivot column of each row.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows()
            .map(|row| row.iter().position(|x| !x.is_zero()).expect("canonical rows are nonzero"))
            .collect()
    }

    pub fn as_matrix(&self, field: &FieldSpec) -> MatrixFq {
        MatrixFq::from_vec(field, self.r, self.d, self.rows.clone()).expect("shape")
    }

    /// The initial chain of length `s`.
    pub fn truncate(&self, s: usize) -> Result<FlagCanonical> {
        if s == 0 || s > self.r {
            return Err(Error::Usage(format!("cannot truncate a flag of length {} to {s}", self.r)));
        }
        Ok(FlagCanonical { r: s, d: self.d, rows: self.rows[..s * self.d].to_vec() })
    }

    /// Whether `self` is an initial chain of `other`.
    pub fn is_prefix_of(&self, other: &FlagCanonical) -> bool {
        self.d == other.d && self.r <= other.r && other.rows[..self.rows.len()] == self.rows[..]
    }

    /// `{r, d, rows}` with rows as arrays of coefficient arrays.
    pub fn to_json(&self, field: &FieldSpec) -> Value {
        let rows: Vec<Vec<Vec<u32>>> =
            self.rows().map(|row| row.iter().map(|&x| field.coeffs(x)).collect()).collect();
        json!({ "r": self.r, "d": self.d, "rows": rows })
    }

    /// Parses the JSON form and re-canonicalizes; dependent rows give `None`.
    pub fn from_json(field: &FieldSpec, value: &Value) -> Result<Option<FlagCanonical>> {
        #[derive(Deserialize)]
        struct Repr {
            r: usize,
            d: usize,
            rows: Vec<Vec<Vec<u32>>>,
        }
        let repr: Repr = serde_json::from_value(value.clone())?;
        if repr.rows.len() != repr.r || repr.rows.iter().any(|row| row.len() != repr.d) {
            return Err(Error::DimensionMismatch("flag rows do not match {r, d}".into()));
        }
        let mut vectors = Vec::with_capacity(repr.r);
        for row in &repr.rows {
            vectors.push(row.iter().map(|c| field.from_coeffs(c)).collect::<Result<Vec<_>>>()?);
        }
        Ok(canonicalize(field, repr.d, &vectors))
    }
}

/// Serializable image of a basis flag under a linear map; `None` is the zero
/// marker.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FlagImage {
    pub source: Value,
    pub image: Option<Value>,
}

/// Reduces `w` against canonical rows and normalizes. Returns the pivot, or
/// `None` if `w` reduces to zero.
fn reduce_and_normalize(field: &FieldSpec, rows: &[Gf], pivots: &[usize], d: usize, w: &mut [Gf]) -> Option<usize> {
    for (j, &pc) in pivots.iter().enumerate() {
        let c = w[pc];
        if !c.is_zero() {
            field.axpy(w, field.neg(c), &rows[j * d..(j + 1) * d]);
        }
    }
    let pivot = w.iter().position(|x| !x.is_zero())?;
    let inv = field.inv(w[pivot]).expect("nonzero");
    field.scale(w, inv);
    Some(pivot)
}

/// Canonical form of `⟨v₁⟩ < ⟨v₁, v₂⟩ < ⋯`, or `None` (the zero marker) when
/// the vectors are linearly dependent.
pub fn canonicalize(field: &FieldSpec, d: usize, vectors: &[Vec<Gf>]) -> Option<FlagCanonical> {
    let mut rows = Vec::with_capacity(vectors.len() * d);
    let mut pivots = Vec::with_capacity(vectors.len());
    for v in vectors {
        assert_eq!(v.len(), d, "vector length must equal the ambient dimension");
        let mut w = v.clone();
        let pivot = reduce_and_normalize(field, &rows, &pivots, d, &mut w)?;
        rows.extend_from_slice(&w);
        pivots.push(pivot);
    }
    Some(FlagCanonical { r: vectors.len(), d, rows })
}

/// Number of complete flags of length `r` in `F_q^d`.
pub fn flag_count(q: u32, d: usize, r: usize) -> u64 {
    if r > d {
        return 0;
    }
    let q = q as u64;
    (0..r).map(|i| (q.pow((d - i) as u32) - 1) / (q - 1)).product()
}

/// Normalized vectors with zeros at `pivots`, in lexicographic order.
fn next_rows(field: &FieldSpec, d: usize, pivots: &[usize]) -> Vec<Vec<Gf>> {
    let q = field.q() as u16;
    let free: Vec<usize> = (0..d).filter(|j| !pivots.contains(j)).collect();
    let mut out = Vec::new();
    for (k, &lead) in free.iter().enumerate() {
        let tail = &free[k + 1..];
        let total = (q as u64).pow(tail.len() as u32);
        for idx in 0..total {
            let mut v = vec![Gf::ZERO; d];
            v[lead] = Gf::ONE;
            let mut rest = idx;
            for &j in tail.iter().rev() {
                v[j] = Gf((rest % q as u64) as u16);
                rest /= q as u64;
            }
            out.push(v);
        }
    }
    out.sort();
    out
}

/// All complete flags of length `r` in `F^d`, sorted lexicographically by
/// canonical rows. Empty when `r > d`.
pub fn enumerate_flags(field: &FieldSpec, d: usize, r: usize) -> Vec<FlagCanonical> {
    let mut out = Vec::new();
    if r > d {
        return out;
    }
    let mut rows = Vec::with_capacity(r * d);
    let mut pivots = Vec::with_capacity(r);
    extend_flags(field, d, r, &mut rows, &mut pivots, &mut out);
    out.sort();
    out
}

fn extend_flags(
    field: &FieldSpec,
    d: usize,
    r: usize,
    rows: &mut Vec<Gf>,
    pivots: &mut Vec<usize>,
    out: &mut Vec<FlagCanonical>,
) {
    if pivots.len() == r {
        out.push(FlagCanonical { r, d, rows: rows.clone() });
        return;
    }
    for v in next_rows(field, d, pivots) {
        let pivot = v.iter().position(|x| !x.is_zero()).expect("nonzero");
        rows.extend_from_slice(&v);
        pivots.push(pivot);
        extend_flags(field, d, r, rows, pivots, out);
        pivots.pop();
        rows.truncate(rows.len() - d);
    }
}

/// Flags with their positions, for building matrices.
#[derive(Clone, Debug)]
pub struct FlagBasis {
    pub d: usize,
    pub r: usize,
    pub flags: Vec<FlagCanonical>,
    index: HashMap<FlagCanonical, usize>,
}

impl FlagBasis {
    pub fn new(field: &FieldSpec, d: usize, r: usize) -> Self {
        let flags = enumerate_flags(field, d, r);
        let index = flags.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        FlagBasis { d, r, flags, index }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn index_of(&self, flag: &FlagCanonical) -> Option<usize> {
        self.index.get(flag).copied()
    }
}

/// Image of a flag under a `d' × d` matrix, or `None` when the image chain
/// is not a complete flag.
pub fn flag_map(f: &MatrixFq, flag: &FlagCanonical) -> Option<FlagCanonical> {
    assert_eq!(f.ncols(), flag.d, "matrix source dimension must match the flag");
    let images: Vec<Vec<Gf>> = flag.rows().map(|v| f.apply(v).expect("shape checked")).collect();
    canonicalize(f.field(), f.nrows(), &images)
}

/// Matrix of `F[Flag_r](f) : F[Flag_r](F^d) → F[Flag_r](F^{d'})`.
pub fn flag_map_matrix(f: &MatrixFq, r: usize) -> MatrixFq {
    let field = f.field();
    let src = FlagBasis::new(field, f.ncols(), r);
    let dst = FlagBasis::new(field, f.nrows(), r);
    let mut m = MatrixFq::zeros(field, dst.len(), src.len());
    for (j, flag) in src.flags.iter().enumerate() {
        if let Some(img) = flag_map(f, flag) {
            m.set(dst.index_of(&img).expect("image is enumerated"), j, Gf::ONE);
        }
    }
    m
}

/// Images of every basis flag under `f`, as JSON with null zero markers.
pub fn flag_map_images(f: &MatrixFq, r: usize) -> Vec<FlagImage> {
    let field = f.field();
    FlagBasis::new(field, f.ncols(), r)
        .flags
        .iter()
        .map(|flag| FlagImage {
            source: flag.to_json(field),
            image: flag_map(f, flag).map(|img| img.to_json(field)),
        })
        .collect()
}

/// Matrix of the truncation `π_{r,s} : F[Flag_r] → F[Flag_s]`.
pub fn truncation_matrix(field: &FieldSpec, d: usize, r: usize, s: usize) -> Result<MatrixFq> {
    if s == 0 || s > r {
        return Err(Error::Usage(format!("truncation from length {r} to {s}")));
    }
    let src = FlagBasis::new(field, d, r);
    let dst = FlagBasis::new(field, d, s);
    let mut m = MatrixFq::zeros(field, dst.len(), src.len());
    for (j, flag) in src.flags.iter().enumerate() {
        let t = flag.truncate(s)?;
        m.set(dst.index_of(&t).expect("prefix is a flag"), j, Gf::ONE);
    }
    Ok(m)
}

/// The diagonal `[Φ] ↦ [Φ] ⊗ [Φ]` on basis elements.
pub fn flag_diag(flag: &FlagCanonical) -> (FlagCanonical, FlagCanonical) {
    (flag.clone(), flag.clone())
}

/// Matrix of the diagonal `F[Flag_r] → F[Flag_r] ⊗ F[Flag_r]`.
pub fn diag_matrix(field: &FieldSpec, d: usize, r: usize) -> MatrixFq {
    let n = flag_count(field.q(), d, r) as usize;
    let mut m = MatrixFq::zeros(field, n * n, n);
    for i in 0..n {
        m.set(i * n + i, i, Gf::ONE);
    }
    m
}

/// Image of a flag under the diagonal torus element `t`.
pub(crate) fn torus_act(field: &FieldSpec, t: &[Gf], flag: &FlagCanonical) -> FlagCanonical {
    let scaled: Vec<Vec<Gf>> =
        flag.rows().map(|v| v.iter().zip(t).map(|(&x, &c)| field.mul(x, c)).collect()).collect();
    canonicalize(field, flag.d, &scaled).expect("torus elements are invertible")
}

/// Orbit representatives of the diagonal torus `(F^×)^d` acting on flags,
/// as indices into `basis`, in increasing order.
pub fn torus_orbit_representatives(field: &FieldSpec, basis: &FlagBasis) -> Vec<usize> {
    let d = basis.d;
    let units: Vec<Gf> = field.elements().filter(|x| !x.is_zero()).collect();
    let n_units = units.len();
    let size = n_units.pow(d as u32);
    let mut seen = vec![false; basis.len()];
    let mut reps = Vec::new();
    let mut t = vec![Gf::ONE; d];
    for i in 0..basis.len() {
        if seen[i] {
            continue;
        }
        reps.push(i);
        for idx in 0..size {
            let mut rest = idx;
            for slot in t.iter_mut() {
                *slot = units[rest % n_units];
                rest /= n_units;
            }
            let img = torus_act(field, &t, &basis.flags[i]);
            seen[basis.index_of(&img).expect("torus preserves flags")] = true;
        }
    }
    reps
}
