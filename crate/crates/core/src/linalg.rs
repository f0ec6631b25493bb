//! Exact matrices over GF(q).
//!
//! [`MatrixFq`] is dense and row-major. Rank and kernel come from Gaussian
//! elimination on a private copy. Over GF(2) [`MatrixFq::rank`] switches to
//! [`BitMatrix`], which packs 64 entries per word and eliminates with XOR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, FieldSpec, Gf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFq {
    field: FieldSpec,
    nrows: usize,
    ncols: usize,
    data: Vec<Gf>,
}

/// JSON form of a matrix: dimensions plus row-major entries as coefficient arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: FieldDescriptor,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packed_hex: Option<Vec<String>>,
}

impl MatrixFq {
    pub fn zeros(field: &FieldSpec, nrows: usize, ncols: usize) -> Self {
        MatrixFq { field: field.clone(), nrows, ncols, data: vec![Gf::ZERO; nrows * ncols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = Gf::ONE;
        }
        m
    }

    pub fn from_vec(field: &FieldSpec, nrows: usize, ncols: usize, data: Vec<Gf>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {nrows}x{ncols} matrix",
                data.len()
            )));
        }
        Ok(MatrixFq { field: field.clone(), nrows, ncols, data })
    }

    pub fn from_rows(field: &FieldSpec, ncols: usize, rows: &[Vec<Gf>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} in a matrix with {ncols} columns",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(field, rows.len(), ncols, data)
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(field: &FieldSpec, nrows: usize, columns: &[Vec<Gf>]) -> Result<Self> {
        let t = Self::from_rows(field, nrows, columns)?;
        Ok(t.transpose())
    }

    pub fn from_fn(field: &FieldSpec, nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> Gf) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        MatrixFq { field: field.clone(), nrows, ncols, data }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn data(&self) -> &[Gf] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Gf {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Gf) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Gf] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Gf] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn column(&self, j: usize) -> Vec<Gf> {
        (0..self.nrows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Gf::ZERO; self.data.len()];
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                data[j * self.nrows + i] = self.data[i * self.ncols + j];
            }
        }
        MatrixFq { field: self.field.clone(), nrows: self.ncols, ncols: self.nrows, data }
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Matrix product `self * other`, i.e. the composite "other, then self".
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.nrows, other.ncols);
        for i in 0..self.nrows {
            let (lo, hi) = (i * other.ncols, (i + 1) * other.ncols);
            for k in 0..self.ncols {
                let a = self.data[i * self.ncols + k];
                if !a.is_zero() {
                    f.axpy(&mut out.data[lo..hi], a, other.row(k));
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; row `(i1, i2)` sits at `i1 * other.nrows + i2`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let f = &self.field;
        let (r2, c2) = (other.nrows, other.ncols);
        let mut out = Self::zeros(f, self.nrows * r2, self.ncols * c2);
        for i1 in 0..self.nrows {
            for j1 in 0..self.ncols {
                let a = self.get(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..r2 {
                    let row = i1 * r2 + i2;
                    let base = row * out.ncols + j1 * c2;
                    f.axpy(&mut out.data[base..base + c2], a, other.row(i2));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return Err(Error::DimensionMismatch("cannot add matrices of different shapes".into()));
        }
        let mut out = self.clone();
        self.field.axpy(&mut out.data, Gf::ONE, &other.data);
        Ok(out)
    }

    pub fn scaled(&self, c: Gf) -> Self {
        let mut out = self.clone();
        self.field.scale(&mut out.data, c);
        out
    }

    /// Entrywise `x -> x^(p^k)`, the matrix of the `k`-fold Frobenius twist.
    pub fn frobenius(&self, k: u32) -> Self {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = self.field.frobenius(*x, k);
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(&self.field, self.nrows, cols.len(), |i, j| self.get(i, cols[j]))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.ncols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        MatrixFq { field: self.field.clone(), nrows: rows.len(), ncols: self.ncols, data }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.ncols != other.ncols {
            return Err(Error::DimensionMismatch("vstack needs equal column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatrixFq { field: self.field.clone(), nrows: self.nrows + other.nrows, ncols: self.ncols, data })
    }

    /// Rank, using the packed path over GF(2).
    pub fn rank(&self) -> usize {
        if self.field.q() == 2 {
            BitMatrix::from_matrix(self).expect("q = 2").rank()
        } else {
            self.rank_generic()
        }
    }

    /// Rank by dense elimination over GF(q), never using the packed path.
    pub fn rank_generic(&self) -> usize {
        if self.nrows <= self.ncols {
            eliminate(&self.field, self.nrows, self.ncols, &mut self.data.clone(), false).len()
        } else {
            let t = self.transpose();
            eliminate(&self.field, t.nrows, t.ncols, &mut t.data.clone(), false).len()
        }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (MatrixFq, Vec<usize>) {
        let mut out = self.clone();
        let pivots = eliminate(&self.field, self.nrows, self.ncols, &mut out.data, true);
        (out, pivots)
    }

    /// Basis of the right null space `{x : A x = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<Gf>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![None; self.ncols];
        for (row, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(row);
        }
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![Gf::ZERO; self.ncols];
            v[free] = Gf::ONE;
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(r.get(row, free));
            }
            basis.push(v);
        }
        basis
    }

    pub fn apply(&self, x: &[Gf]) -> Result<Vec<Gf>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.ncols
            )));
        }
        let f = &self.field;
        Ok((0..self.nrows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Gf::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    pub fn to_json(&self, with_packed: bool) -> MatrixJson {
        let packed_hex = (with_packed && self.field.q() == 2)
            .then(|| BitMatrix::from_matrix(self).expect("q = 2").hex_rows());
        MatrixJson {
            field: self.field.descriptor(),
            rows: self.nrows,
            cols: self.ncols,
            entries: self.data.iter().map(|&x| self.field.coeffs(x)).collect(),
            packed_hex,
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        let field = FieldSpec::from_descriptor(&json.field)?;
        let data = json
            .entries
            .iter()
            .map(|c| field.from_coeffs(c))
            .collect::<Result<Vec<_>>>()?;
        Self::from_vec(&field, json.rows, json.cols, data)
    }
}

/// Row reduction in place. Returns the pivot columns. With `full`, rows are
/// normalised and cleared above the pivots as well (RREF); otherwise only
/// below, which is enough for rank.
fn eliminate(field: &FieldSpec, nrows: usize, ncols: usize, data: &mut [Gf], full: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pr) = (rank..nrows).find(|&r| !data[r * ncols + col].is_zero()) else {
            continue;
        };
        if pr != rank {
            for j in col..ncols {
                data.swap(pr * ncols + j, rank * ncols + j);
            }
        }
        let inv = field.inv(data[rank * ncols + col]).expect("pivot is nonzero");
        if full {
            field.scale(&mut data[rank * ncols + col..(rank + 1) * ncols], inv);
        }
        let (head, tail) = data.split_at_mut(rank * ncols);
        let (prow, rest) = tail.split_at_mut(ncols);
        let clear = |row: &mut [Gf]| {
            let v = row[col];
            if !v.is_zero() {
                let factor = if full { field.neg(v) } else { field.neg(field.mul(v, inv)) };
                field.axpy(&mut row[col..], factor, &prow[col..]);
            }
        };
        for row in rest.chunks_mut(ncols) {
            clear(row);
        }
        if full {
            for row in head.chunks_mut(ncols) {
                clear(row);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// Bit-packed matrix over GF(2): 64 columns per word, little-endian bit order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    nrows: usize,
    ncols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        let words = ncols.div_ceil(64);
        BitMatrix { nrows, ncols, words, data: vec![0; nrows * words] }
    }

    pub fn from_matrix(m: &MatrixFq) -> Result<Self> {
        if m.field().q() != 2 {
            return Err(Error::Usage("packed matrices require GF(2)".into()));
        }
        let mut b = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for (j, x) in m.row(i).iter().enumerate() {
                if !x.is_zero() {
                    b.set(i, j, true);
                }
            }
        }
        Ok(b)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.data[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        if self.nrows > self.ncols {
            return self.transpose().rank();
        }
        let mut data = self.data.clone();
        let w = self.words;
        let mut rank = 0;
        for col in 0..self.ncols {
            if rank == self.nrows {
                break;
            }
            let (word, bit) = (col / 64, 1u64 << (col % 64));
            let Some(pr) = (rank..self.nrows).find(|&r| data[r * w + word] & bit != 0) else {
                continue;
            };
            if pr != rank {
                for k in word..w {
                    data.swap(pr * w + k, rank * w + k);
                }
            }
            let (head, rest) = data.split_at_mut((rank + 1) * w);
            let prow = &head[rank * w..];
            for row in rest.chunks_mut(w) {
                if row[word] & bit != 0 {
                    for k in word..w {
                        row[k] ^= prow[k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    /// Each row as lowercase hex of its little-endian bytes, `ceil(ncols/8)` bytes long.
    pub fn hex_rows(&self) -> Vec<String> {
        let nbytes = self.ncols.div_ceil(8);
        (0..self.nrows)
            .map(|i| {
                self.row_words(i)
                    .iter()
                    .flat_map(|w| w.to_le_bytes())
                    .take(nbytes)
                    .map(|b| format!("{b:02x}"))
                    .collect()
            })
            .collect()
    }

    /// Raw dump: every row's words, row-major, little-endian.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.data.iter().flat_map(|w| w.to_le_bytes()).collect()
    }

    pub fn from_le_bytes(nrows: usize, ncols: usize, bytes: &[u8]) -> Result<Self> {
        let words = ncols.div_ceil(64);
        if bytes.len() != nrows * words * 8 {
            return Err(Error::DimensionMismatch(format!(
                "{} bytes for a packed {nrows}x{ncols} matrix",
                bytes.len()
            )));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok(BitMatrix { nrows, ncols, words, data })
    }

    pub fn to_matrix(&self, field: &FieldSpec) -> Result<MatrixFq> {
        if field.q() != 2 {
            return Err(Error::Usage("packed matrices require GF(2)".into()));
        }
        Ok(MatrixFq::from_fn(field, self.nrows, self.ncols, |i, j| Gf(self.get(i, j) as u16)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(field: &FieldSpec, rng: &mut ChaCha8Rng, r: usize, c: usize, density: f64) -> MatrixFq {
        let data = (0..r * c)
            .map(|_| {
                if rng.gen_bool(density) {
                    Gf(rng.gen_range(1..field.q()) as u16)
                } else {
                    Gf::ZERO
                }
            })
            .collect();
        MatrixFq::from_vec(field, r, c, data).unwrap()
    }

    #[test]
    fn identity_and_zero() {
        let f = FieldSpec::with_order(4).unwrap();
        assert_eq!(MatrixFq::identity(&f, 5).rank(), 5);
        assert_eq!(MatrixFq::zeros(&f, 4, 6).rank(), 0);
        assert!(MatrixFq::identity(&f, 3).kernel_basis().is_empty());
        assert_eq!(MatrixFq::zeros(&f, 3, 3).kernel_basis().len(), 3);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2, 3, 4, 5, 9] {
            let f = FieldSpec::with_order(q).unwrap();
            for _ in 0..20 {
                let (r, c) = (rng.gen_range(1..8), rng.gen_range(1..10));
                let a = random(&f, &mut rng, r, c, 0.5);
                let ker = a.kernel_basis();
                assert_eq!(ker.len(), c - a.rank());
                for k in &ker {
                    assert!(a.apply(k).unwrap().iter().all(|x| x.is_zero()));
                }
            }
        }
    }

    #[test]
    fn compose_and_tensor_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2, 3, 4] {
            let f = FieldSpec::with_order(q).unwrap();
            let a = random(&f, &mut rng, 3, 4, 0.6);
            let b = random(&f, &mut rng, 4, 2, 0.6);
            let c = random(&f, &mut rng, 2, 5, 0.6);
            let d = random(&f, &mut rng, 5, 3, 0.6);
            assert_eq!(a.compose(&MatrixFq::identity(&f, 4)).unwrap(), a);
            assert_eq!(
                a.compose(&b).unwrap().compose(&c).unwrap(),
                a.compose(&b.compose(&c).unwrap()).unwrap()
            );
            assert_eq!(
                MatrixFq::identity(&f, 2).tensor(&MatrixFq::identity(&f, 3)).unwrap(),
                MatrixFq::identity(&f, 6)
            );
            let lhs = a.tensor(&c).unwrap().compose(&b.tensor(&d).unwrap()).unwrap();
            let rhs = a.compose(&b).unwrap().tensor(&c.compose(&d).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(a.tensor(&c).unwrap().rank(), a.rank() * c.rank());
            assert!(a.compose(&c).is_err());
        }
    }

    #[test]
    fn rank_is_transpose_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [2, 3, 5, 8] {
            let f = FieldSpec::with_order(q).unwrap();
            for _ in 0..20 {
                let (r, c) = (rng.gen_range(1..12), rng.gen_range(1..12));
                let a = random(&f, &mut rng, r, c, 0.3);
                assert_eq!(a.rank_generic(), a.transpose().rank_generic());
                assert!(a.rank() <= a.nrows().min(a.ncols()));
            }
        }
    }

    #[test]
    fn packed_roundtrip() {
        let f = FieldSpec::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random(&f, &mut rng, 7, 130, 0.5);
        let b = BitMatrix::from_matrix(&a).unwrap();
        let back = BitMatrix::from_le_bytes(7, 130, &b.to_le_bytes()).unwrap();
        assert_eq!(back.to_matrix(&f).unwrap(), a);
        assert_eq!(b.hex_rows()[0].len(), 2 * 17);
        let json = a.to_json(true);
        assert_eq!(MatrixFq::from_json(&json).unwrap(), a);
        assert!(BitMatrix::from_matrix(&MatrixFq::zeros(&FieldSpec::prime(3).unwrap(), 1, 1)).is_err());
    }
}
