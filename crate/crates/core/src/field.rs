//! Arithmetic in GF(p^m) over a polynomial basis.
//!
//! Elements are stored as a packed index `c0 + c1*p + ... + c_{m-1}*p^{m-1}`
//! of their coordinates in the basis `1, t, ..., t^{m-1}`, where `t` is a
//! root of the defining polynomial. Multiplication goes through exp/log
//! tables built from a primitive element; addition uses a full table when
//! `q <= 256`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

const TABLE_LIMIT: u32 = 256;

/// Raw element of a field, meaningful only together with its [`FieldSpec`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gf(pub u16);

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    // q*q entries, only when q <= TABLE_LIMIT
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    // exp has 2(q-1) entries so that log a + log b never needs reducing
    exp: Vec<u16>,
    log: Vec<u32>,
}

struct Inner {
    p: u32,
    m: u32,
    q: u32,
    poly: Vec<u32>,
    tables: Tables,
}

/// A finite field GF(p^m) given by a monic irreducible polynomial of degree m.
///
/// Cloning is cheap; all clones share the same arithmetic tables.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.poly == other.inner.poly)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) poly={:?}", self.q(), self.inner.poly)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p(), self.m())?;
        for c in &self.inner.poly {
            write!(f, ",{c}")?;
        }
        Ok(())
    }
}

/// Serializable description `{p, m, poly}` of a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub m: u32,
    pub poly: Vec<u32>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

// Polynomials over GF(p) as coefficient vectors, low degree first.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime and small, Fermat is fine
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Remainder of `a` modulo the nonzero polynomial `b`.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let factor = r[r.len() - 1] * lead_inv % p;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - factor * bc % p) % p;
        }
        r = trim(r);
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=m/2`.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let m = poly.len() - 1;
    if m <= 1 {
        return m == 1;
    }
    for deg in 1..=m / 2 {
        let count = (p as u64).pow(deg as u32);
        for idx in 0..count {
            let mut divisor = Vec::with_capacity(deg + 1);
            let mut rest = idx;
            for _ in 0..deg {
                divisor.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            divisor.push(1);
            if poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// Builds GF(p^m) from the coefficients `poly` (low to high, length m+1)
    /// of a monic irreducible polynomial.
    pub fn new(p: u32, m: u32, poly: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= MAX_ORDER as u64).ok_or_else(|| {
            Error::InvalidField(format!("field order {p}^{m} exceeds {MAX_ORDER}"))
        })? as u32;
        if poly.len() != m as usize + 1 {
            return Err(Error::InvalidField(format!(
                "expected {} polynomial coefficients, got {}",
                m + 1,
                poly.len()
            )));
        }
        if let Some(&c) = poly.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidField(format!("coefficient {c} not reduced mod {p}")));
        }
        if poly[m as usize] != 1 {
            return Err(Error::InvalidField("polynomial is not monic".into()));
        }
        if !is_irreducible(poly, p) {
            return Err(Error::InvalidField(format!("{poly:?} is reducible over GF({p})")));
        }
        let tables = build_tables(p, m, q, poly);
        Ok(FieldSpec {
            inner: Arc::new(Inner { p, m, q, poly: poly.to_vec(), tables }),
        })
    }

    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, &[0, 1])
    }

    /// Field of order `q` with a shipped default polynomial (Conway polynomials
    /// for the non-prime orders).
    pub fn with_order(q: u32) -> Result<Self> {
        match q {
            4 => Self::new(2, 2, &[1, 1, 1]),
            8 => Self::new(2, 3, &[1, 1, 0, 1]),
            9 => Self::new(3, 2, &[2, 2, 1]),
            16 => Self::new(2, 4, &[1, 1, 0, 0, 1]),
            25 => Self::new(5, 2, &[2, 4, 1]),
            27 => Self::new(3, 3, &[1, 2, 0, 1]),
            q if is_prime(q) => Self::prime(q),
            _ => Err(Error::InvalidField(format!("no default polynomial for order {q}"))),
        }
    }

    /// Parses `p,m[,c0,...,cm]`; the polynomial may be omitted when a default exists.
    pub fn parse(text: &str) -> Result<Self> {
        let nums = text
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidField(format!("cannot parse {text:?}: {e}")))?;
        match nums.as_slice() {
            [p, m] => {
                let q = p
                    .checked_pow(*m)
                    .ok_or_else(|| Error::InvalidField(format!("{p}^{m} overflows")))?;
                let field = Self::with_order(q)?;
                if field.p() != *p {
                    return Err(Error::InvalidField(format!("{p} is not prime")));
                }
                Ok(field)
            }
            [p, m, poly @ ..] => Self::new(*p, *m, poly),
            _ => Err(Error::InvalidField(format!("expected p,m[,poly...], got {text:?}"))),
        }
    }

    pub fn from_descriptor(desc: &FieldDescriptor) -> Result<Self> {
        Self::new(desc.p, desc.m, &desc.poly)
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { p: self.p(), m: self.m(), poly: self.inner.poly.clone() }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.inner.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn poly(&self) -> &[u32] {
        &self.inner.poly
    }

    /// All elements in index order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = Gf> {
        (0..self.q()).map(|i| Gf(i as u16))
    }

    /// The canonical generator of the multiplicative group used for the tables.
    pub fn primitive(&self) -> Gf {
        Gf(self.inner.tables.exp[1])
    }

    pub fn coeffs(&self, a: Gf) -> Vec<u32> {
        let p = self.p();
        let mut rest = a.0 as u32;
        (0..self.m())
            .map(|_| {
                let c = rest % p;
                rest /= p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Gf> {
        if coeffs.len() != self.m() as usize {
            return Err(Error::Usage(format!(
                "expected {} coordinates, got {}",
                self.m(),
                coeffs.len()
            )));
        }
        let p = self.p();
        let mut idx = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= p {
                return Err(Error::Usage(format!("coordinate {c} not reduced mod {p}")));
            }
            idx = idx * p + c;
        }
        Ok(Gf(idx as u16))
    }

    /// Image of an integer in the prime subfield.
    #[inline]
    pub fn from_int(&self, n: u64) -> Gf {
        Gf((n % self.p() as u64) as u16)
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        let t = &self.inner.tables;
        if !t.add.is_empty() {
            return Gf(t.add[a.0 as usize * self.q() as usize + b.0 as usize]);
        }
        let p = self.p();
        let (mut x, mut y) = (a.0 as u32, b.0 as u32);
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Gf(out as u16)
    }

    #[inline]
    pub fn neg(&self, a: Gf) -> Gf {
        Gf(self.inner.tables.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Gf, b: Gf) -> Gf {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        let t = &self.inner.tables;
        if !t.mul.is_empty() {
            return Gf(t.mul[a.0 as usize * self.q() as usize + b.0 as usize]);
        }
        if a.is_zero() || b.is_zero() {
            return Gf::ZERO;
        }
        Gf(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Gf) -> Result<Gf> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let t = &self.inner.tables;
        let order = self.q() - 1;
        Ok(Gf(t.exp[((order - t.log[a.0 as usize]) % order) as usize]))
    }

    pub fn pow(&self, a: Gf, e: u64) -> Gf {
        if e == 0 {
            return Gf::ONE;
        }
        if a.is_zero() {
            return Gf::ZERO;
        }
        let t = &self.inner.tables;
        let order = (self.q() - 1) as u64;
        let l = (t.log[a.0 as usize] as u64 * (e % order)) % order;
        Gf(t.exp[l as usize])
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Gf, k: u32) -> Gf {
        if a.is_zero() {
            return a;
        }
        let order = (self.q() - 1) as u64;
        let mut e = 1u64;
        for _ in 0..k % self.m() {
            e = e * self.p() as u64 % order.max(1);
        }
        if order == 1 {
            return a;
        }
        self.pow(a, e.max(1))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: Gf) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.q() - 1;
        let l = self.inner.tables.log[a.0 as usize];
        Ok(n / gcd(n, l))
    }

    /// Row of the multiplication table for `f`, when tables are present.
    #[inline]
    pub(crate) fn mul_row(&self, f: Gf) -> Option<&[u16]> {
        let t = &self.inner.tables;
        if t.mul.is_empty() {
            return None;
        }
        let q = self.q() as usize;
        Some(&t.mul[f.0 as usize * q..(f.0 as usize + 1) * q])
    }

    #[inline]
    pub(crate) fn add_table(&self) -> Option<&[u16]> {
        let t = &self.inner.tables;
        (!t.add.is_empty()).then_some(t.add.as_slice())
    }

    /// `dst += f * src`, elementwise.
    pub fn axpy(&self, dst: &mut [Gf], f: Gf, src: &[Gf]) {
        if f.is_zero() {
            return;
        }
        if self.q() == 2 {
            for (d, s) in dst.iter_mut().zip(src) {
                d.0 ^= s.0;
            }
            return;
        }
        match (self.mul_row(f), self.add_table()) {
            (Some(mrow), Some(add)) => {
                let q = self.q() as usize;
                for (d, s) in dst.iter_mut().zip(src) {
                    d.0 = add[d.0 as usize * q + mrow[s.0 as usize] as usize];
                }
            }
            _ => {
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = self.add(*d, self.mul(f, *s));
                }
            }
        }
    }

    pub fn scale(&self, dst: &mut [Gf], f: Gf) {
        for d in dst.iter_mut() {
            *d = self.mul(*d, f);
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Multiplies two packed elements by schoolbook polynomial multiplication and
/// reduction. Only used to bootstrap the tables.
fn slow_mul(p: u32, m: u32, poly: &[u32], a: u32, b: u32) -> u32 {
    let digits = |mut x: u32| -> Vec<u32> {
        (0..m)
            .map(|_| {
                let c = x % p;
                x /= p;
                c
            })
            .collect()
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u32; 2 * m as usize];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let rem = poly_rem(&prod, poly, p);
    rem.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn build_tables(p: u32, m: u32, q: u32, poly: &[u32]) -> Tables {
    let neg = (0..q)
        .map(|a| {
            let mut x = a;
            let mut out = 0;
            let mut place = 1;
            for _ in 0..m {
                out += ((p - x % p) % p) * place;
                x /= p;
                place *= p;
            }
            out as u16
        })
        .collect();

    let order = q - 1;
    let mut exp = Vec::new();
    if order == 1 {
        exp = vec![1, 1];
    } else {
        for g in 2..q {
            let mut powers = Vec::with_capacity(order as usize);
            let mut x = 1u32;
            let mut ok = true;
            for k in 0..order {
                powers.push(x as u16);
                x = slow_mul(p, m, poly, x, g);
                if x == 1 && k + 1 < order {
                    ok = false;
                    break;
                }
            }
            if ok {
                exp = powers.clone();
                exp.extend(powers);
                break;
            }
        }
    }
    let mut log = vec![0u32; q as usize];
    for k in 0..order {
        log[exp[k as usize] as usize] = k;
    }

    let (mut add, mut mul) = (Vec::new(), Vec::new());
    if q <= TABLE_LIMIT {
        add = Vec::with_capacity((q * q) as usize);
        mul = Vec::with_capacity((q * q) as usize);
        for a in 0..q {
            for b in 0..q {
                let (mut x, mut y, mut out, mut place) = (a, b, 0, 1);
                for _ in 0..m {
                    out += ((x % p + y % p) % p) * place;
                    x /= p;
                    y /= p;
                    place *= p;
                }
                add.push(out as u16);
                mul.push(if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                });
            }
        }
    }
    Tables { add, mul, neg, exp, log }
}

/// An element bundled with its field, for checked arithmetic at API boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: FieldSpec,
    value: Gf,
}

impl FieldElement {
    pub fn new(field: &FieldSpec, value: Gf) -> Self {
        debug_assert!((value.0 as u32) < field.q());
        FieldElement { field: field.clone(), value }
    }

    pub fn from_coeffs(field: &FieldSpec, coeffs: &[u32]) -> Result<Self> {
        Ok(Self::new(field, field.from_coeffs(coeffs)?))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn value(&self) -> Gf {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(&self.field, self.field.add(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(&self.field, self.field.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(Self::new(&self.field, self.field.inv(self.value)?))
    }

    pub fn frobenius(&self, k: u32) -> Self {
        Self::new(&self.field, self.field.frobenius(self.value, k))
    }
}

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binom_mod_p(mut n: u64, mut k: u64, p: u32) -> u32 {
    if k > n {
        return 0;
    }
    let p64 = p as u64;
    let mut result = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p64, k % p64);
        if kd > nd {
            return 0;
        }
        result = result * small_binom_mod(nd, kd, p64) % p64;
        n /= p64;
        k /= p64;
    }
    result as u32
}

fn small_binom_mod(n: u64, k: u64, p: u64) -> u64 {
    // n < p, so every factor of n!/(k!(n-k)!) is invertible
    let k = k.min(n - k);
    let (mut num, mut den) = (1u64, 1u64);
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * inv_mod(den as u32, p as u32) as u64 % p
}

/// Binomial coefficient `C(a + b, a) mod p` for the product of divided
/// powers; zero exactly when adding `a` and `b` in base `p` carries.
#[inline]
pub fn carry_free_binom(a: u32, b: u32, p: u32) -> u32 {
    if p == 2 {
        return (a & b == 0) as u32;
    }
    binom_mod_p((a + b) as u64, a as u64, p)
}

/// Precomputed binomials mod a small prime, for repeated Lucas evaluations.
#[derive(Clone, Debug)]
pub struct Lucas {
    p: u32,
    table: Vec<u32>,
}

impl Lucas {
    pub fn new(p: u32) -> Self {
        let table = if p <= 64 {
            (0..p)
                .flat_map(|n| (0..p).map(move |k| (n, k)))
                .map(|(n, k)| if k > n { 0 } else { small_binom_mod(n as u64, k as u64, p as u64) as u32 })
                .collect()
        } else {
            Vec::new()
        };
        Lucas { p, table }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `C(a + b, a) mod p`.
    #[inline]
    pub fn pair(&self, mut a: u32, mut b: u32) -> u32 {
        let p = self.p;
        if p == 2 {
            return (a & b == 0) as u32;
        }
        if self.table.is_empty() {
            return binom_mod_p((a + b) as u64, a as u64, p);
        }
        let mut r = 1u32;
        while a > 0 || b > 0 {
            let (da, db) = (a % p, b % p);
            let n = da + db;
            if n >= p {
                return 0;
            }
            r = r * self.table[(n * p + da) as usize] % p;
            a /= p;
            b /= p;
        }
        r
    }
}

/// `[s]_q = q^s - 1`.
pub fn bracket(s: u32, q: u32) -> Result<u64> {
    (q as u64)
        .checked_pow(s)
        .map(|v| v - 1)
        .ok_or(Error::Overflow)
}

/// `[s]_q` summed over a sequence.
pub fn bracket_sum(seq: &[u32], q: u32) -> Result<u64> {
    seq.iter().try_fold(0u64, |acc, &s| {
        acc.checked_add(bracket(s, q)?).ok_or(Error::Overflow)
    })
}
