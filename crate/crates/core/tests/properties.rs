//! Randomized invariants.

use proptest::prelude::*;

use gfl_core::chmorph::phi_seq;
use gfl_core::field::{FieldSpec, Gf};
use gfl_core::flags::{canonicalize, enumerate_flags, flag_map_matrix, FlagCanonical};
use gfl_core::gamma::{coproduct, gamma_basis, gamma_map, product, verschiebung_q, GammaElement};
use gfl_core::linalg::{BitMatrix, MatrixFq};
use gfl_core::SeqS;

const ORDERS: [u32; 6] = [2, 3, 4, 5, 8, 9];

fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(ORDERS.to_vec()).prop_map(|q| FieldSpec::with_order(q).unwrap())
}

fn matrix(f: &FieldSpec, rows: usize, cols: usize, seed: &[u16]) -> MatrixFq {
    let q = f.q() as u16;
    let data = (0..rows * cols).map(|i| Gf(seed[i % seed.len()].wrapping_mul(i as u16 + 1) % q)).collect();
    MatrixFq::from_vec(f, rows, cols, data).unwrap()
}

fn element(f: &FieldSpec, n: u32, d: usize, seed: &[u16]) -> GammaElement {
    let basis = gamma_basis(n, d);
    let q = f.q() as u16;
    let dense: Vec<Gf> = (0..basis.len()).map(|i| Gf(seed[i % seed.len()].wrapping_add(i as u16) % q)).collect();
    GammaElement::from_dense(&basis, &dense)
}

fn seed() -> impl Strategy<Value = Vec<u16>> {
    prop::collection::vec(any::<u16>(), 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(f in field_strategy(), a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
        let q = f.q() as u16;
        let (a, b, c) = (Gf(a % q), Gf(b % q), Gf(c % q));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Gf::ZERO);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Gf::ONE);
        } else {
            prop_assert!(f.inv(a).is_err());
        }
        prop_assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
        prop_assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
    }

    #[test]
    fn rank_laws(f in field_strategy(), r in 1usize..9, k in 1usize..9, c in 1usize..9, s1 in seed(), s2 in seed()) {
        let a = matrix(&f, r, k, &s1);
        let b = matrix(&f, k, c, &s2);
        let ra = a.rank();
        prop_assert_eq!(ra, a.transpose().rank());
        prop_assert_eq!(ra, a.rank_generic());
        prop_assert!(a.compose(&b).unwrap().rank() <= ra.min(b.rank()));
        prop_assert_eq!(a.kernel_basis().len(), k - ra);
        let (red, pivots) = a.rref();
        prop_assert_eq!(pivots.len(), ra);
        prop_assert_eq!(red.rank(), ra);
    }

    #[test]
    fn packed_rank_and_bytes(r in 1usize..100, c in 1usize..100, s in seed()) {
        let f = FieldSpec::with_order(2).unwrap();
        let m = matrix(&f, r, c, &s);
        let bits = BitMatrix::from_matrix(&m).unwrap();
        prop_assert_eq!(bits.rank(), m.rank_generic());
        let back = BitMatrix::from_le_bytes(r, c, &bits.to_le_bytes()).unwrap();
        prop_assert_eq!(back.to_matrix(&f).unwrap(), m.clone());
        let json = m.to_json(true);
        prop_assert_eq!(MatrixFq::from_json(&json).unwrap(), m);
    }

    #[test]
    fn gamma_product_is_commutative_and_associative(
        f in field_strategy(), d in 1usize..4, i in 0u32..4, j in 0u32..4, k in 0u32..3,
        s1 in seed(), s2 in seed(), s3 in seed(),
    ) {
        let (x, y, z) = (element(&f, i, d, &s1), element(&f, j, d, &s2), element(&f, k, d, &s3));
        let xy = product(&f, &x, &y).unwrap();
        prop_assert_eq!(&xy, &product(&f, &y, &x).unwrap());
        let left = product(&f, &xy, &z).unwrap();
        let right = product(&f, &x, &product(&f, &y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn coproduct_is_natural(f in field_strategy(), d in 1usize..4, n in 0u32..5, a in 0u32..5, s1 in seed(), s2 in seed()) {
        let a = a.min(n);
        let g = matrix(&f, d, d, &s1);
        let z = element(&f, n, d, &s2);
        let gz = GammaElement::from_dense(&gamma_basis(n, d), &gamma_map(&g, n).apply(&z.to_dense()).unwrap());
        let lhs = coproduct(&gz, a, n - a).unwrap().to_dense();
        let mapped = gamma_map(&g, a).tensor(&gamma_map(&g, n - a)).unwrap();
        let rhs = mapped.apply(&coproduct(&z, a, n - a).unwrap().to_dense()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn verschiebung_is_natural(f in field_strategy(), d in 1usize..4, e in 1usize..4, n in 0u32..3, s in seed()) {
        let q = f.q();
        prop_assume!(q * n <= 12);
        let g = matrix(&f, e, d, &s);
        let lhs = verschiebung_q(&f, n, e).unwrap().compose(&gamma_map(&g, q * n)).unwrap();
        let rhs = gamma_map(&g, n).compose(&verschiebung_q(&f, n, d).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_form_ignores_triangular_changes(
        f in field_strategy(), d in 1usize..5, pick in any::<prop::sample::Index>(), s in seed(),
    ) {
        let r = 1 + pick.index(d);
        let flags = enumerate_flags(&f, d, r);
        let flag = &flags[pick.index(flags.len())];
        let q = f.q() as u16;
        let mut gens: Vec<Vec<Gf>> = Vec::new();
        for (i, row) in flag.rows().enumerate() {
            let mut w = row.to_vec();
            let unit = Gf(1 + s[i % s.len()] % (q - 1));
            f.scale(&mut w, unit);
            for (j, prev) in flag.rows().take(i).enumerate() {
                f.axpy(&mut w, Gf(s[(i + j + 1) % s.len()] % q), prev);
            }
            gens.push(w);
        }
        let canon = canonicalize(&f, d, &gens);
        prop_assert_eq!(canon.as_ref(), Some(flag));
        let json = flag.to_json(&f);
        let parsed = FlagCanonical::from_json(&f, &json).unwrap();
        prop_assert_eq!(parsed.as_ref(), Some(flag));
        for t in 1..=r {
            prop_assert!(flag.truncate(t).unwrap().is_prefix_of(flag));
        }
    }

    #[test]
    fn flag_maps_compose(f in prop::sample::select(vec![2u32, 3, 4]), d in 1usize..4, r in 1usize..4, s1 in seed(), s2 in seed()) {
        let f = FieldSpec::with_order(f).unwrap();
        prop_assume!(r <= d);
        let a = matrix(&f, d, d, &s1);
        let b = matrix(&f, d, d, &s2);
        let lhs = flag_map_matrix(&b.compose(&a).unwrap(), r);
        let rhs = flag_map_matrix(&b, r).compose(&flag_map_matrix(&a, r)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn phi_is_natural(q in prop::sample::select(vec![2u32, 3]), d in 1usize..4, s1 in 1u32..4, s2 in 0u32..3, seedv in seed()) {
        let f = FieldSpec::with_order(q).unwrap();
        let entries: Vec<u32> = if s2 > 0 && s2 < s1 { vec![s1, s2] } else { vec![s1] };
        prop_assume!(entries.len() <= d);
        let s = SeqS::new(entries).unwrap();
        let n = s.degree(q).unwrap() as u32;
        let g = matrix(&f, d, d, &seedv);
        let phi = phi_seq(&f, &s, d).unwrap();
        let lhs = gamma_map(&g, n).compose(&phi).unwrap();
        let rhs = phi.compose(&flag_map_matrix(&g, s.len())).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_json_roundtrip(f in field_strategy(), d in 1usize..4, n in 0u32..6, s in seed()) {
        let x = element(&f, n, d, &s);
        prop_assert_eq!(GammaElement::from_json(&f, &x.to_json(&f)).unwrap(), x);
    }
}
