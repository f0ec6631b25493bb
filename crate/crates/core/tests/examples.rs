//! Worked examples for every module, with values computed by hand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gfl_core::chmorph::{
    criterion_report, delta_apply, delta_s, eta_diagram_check, eta_stab, phi_constant, phi_line, phi_seq, psi_rank,
    psi_s, qk_dim, restriction_test, ring_of_lines_dim, CellStatus, CheckScope, ReportOptions,
};
use gfl_core::field::{binom_mod_p, bracket, bracket_sum, FieldSpec, Gf};
use gfl_core::flags::{
    canonicalize, diag_matrix, enumerate_flags, flag_count, flag_diag, flag_map, flag_map_matrix, truncation_matrix,
};
use gfl_core::gamma::{
    bar_gamma_kernel, basis_vectors, coproduct, divided_power_of_vector, gamma_basis, gamma_map, product,
    tilde_gamma_kernel, verschiebung_p, verschiebung_power, verschiebung_q, GammaElement, TensorElement,
};
use gfl_core::harness::{run_lemma_battery, stabilization_from, Mode, Report, SweepConfig};
use gfl_core::linalg::MatrixFq;
use gfl_core::SeqS;

fn field(q: u32) -> FieldSpec {
    FieldSpec::with_order(q).unwrap()
}

fn vec_of(f: &FieldSpec, xs: &[u64]) -> Vec<Gf> {
    xs.iter().map(|&x| f.from_int(x)).collect()
}

fn mono(a: &[u32]) -> GammaElement {
    GammaElement::monomial(a.to_vec())
}

fn seq(s: &[u32]) -> SeqS {
    SeqS::new(s.to_vec()).unwrap()
}

fn random_matrix(f: &FieldSpec, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> MatrixFq {
    let data = (0..rows * cols).map(|_| Gf(rng.gen_range(0..f.q()) as u16)).collect();
    MatrixFq::from_vec(f, rows, cols, data).unwrap()
}

#[test]
fn field_arithmetic() {
    let f2 = field(2);
    assert_eq!(f2.mul(Gf::ONE, Gf::ONE), Gf::ONE);
    assert_eq!(f2.inv(Gf::ONE).unwrap(), Gf::ONE);
    assert_eq!(f2.frobenius(Gf::ONE, 1), Gf::ONE);

    let f4 = field(4);
    assert_eq!(f4.poly(), &[1, 1, 1]);
    let t = f4.from_coeffs(&[0, 1]).unwrap();
    let t1 = f4.from_coeffs(&[1, 1]).unwrap();
    assert_eq!(f4.mul(t, t), t1);
    assert_eq!(f4.inv(t).unwrap(), t1);
    assert_eq!(f4.frobenius(t, 1), t1);

    let f9 = FieldSpec::new(3, 2, &[1, 0, 1]).unwrap();
    let t = f9.from_coeffs(&[0, 1]).unwrap();
    assert_eq!(f9.mul(t, t), f9.from_int(2));
    assert_eq!(FieldSpec::parse("3,2,1,0,1").unwrap(), f9);

    let f5 = field(5);
    assert_eq!(f5.inv(f5.from_int(2)).unwrap(), f5.from_int(3));

    for q in [2, 3, 4, 5, 7, 8, 9, 16] {
        let f = field(q);
        for a in f.elements() {
            assert_eq!(f.frobenius(a, f.m()), a);
        }
    }
}

#[test]
fn binomials_and_brackets() {
    assert_eq!(binom_mod_p(7, 3, 2), 1);
    assert_eq!(binom_mod_p(4, 2, 2), 0);
    assert_eq!(binom_mod_p(5, 1, 2), 1);
    assert_eq!(bracket(3, 2).unwrap(), 7);
    for q in [2, 3, 4, 9] {
        assert_eq!(bracket(0, q).unwrap(), 0);
    }
    assert_eq!(bracket_sum(&[4, 2], 2).unwrap(), 18);
    assert_eq!(seq(&[4, 2]).degree(2).unwrap(), 18);
}

#[test]
fn gamma_bases() {
    assert_eq!(basis_vectors(3, 3).len(), 10);
    for d in 1..=4 {
        let b = gamma_basis(0, d);
        assert_eq!(b.len(), 1);
        assert_eq!(b.exps(0), vec![0; d].as_slice());
    }
    for n in 0..6 {
        let b = gamma_basis(n, 1);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![&[n][..]]);
    }
}

#[test]
fn products() {
    let f2 = field(2);
    assert!(product(&f2, &mono(&[1]), &mono(&[1])).unwrap().is_zero());
    for q in [2, 3] {
        let f = field(q);
        for a in gamma_basis(3, 2).iter() {
            assert_eq!(product(&f, &mono(a), &mono(&[0, 0])).unwrap(), mono(a));
        }
    }
    assert_eq!(product(&f2, &mono(&[1, 0]), &mono(&[0, 1])).unwrap(), mono(&[1, 1]));
}

#[test]
fn coproducts() {
    let f = field(2);
    assert_eq!(coproduct(&mono(&[2]), 1, 1).unwrap(), TensorElement::tensor(&f, &mono(&[1]), &mono(&[1])).unwrap());
    for a in gamma_basis(3, 2).iter() {
        let z = mono(a);
        assert_eq!(coproduct(&z, 3, 0).unwrap(), TensorElement::tensor(&f, &z, &mono(&[0, 0])).unwrap());
    }
    let expected = TensorElement::tensor(&f, &mono(&[1, 0]), &mono(&[0, 1]))
        .unwrap()
        .add(&f, &TensorElement::tensor(&f, &mono(&[0, 1]), &mono(&[1, 0])).unwrap())
        .unwrap();
    assert_eq!(coproduct(&mono(&[1, 1]), 1, 1).unwrap(), expected);
}

#[test]
fn divided_powers_of_vectors() {
    let f = field(3);
    assert_eq!(divided_power_of_vector(&f, &vec_of(&f, &[1, 0]), 3), mono(&[3, 0]));
    let f2 = field(2);
    let v = vec_of(&f2, &[1, 1]);
    let mut expected = GammaElement::zero(2, 2);
    for a in [[2, 0], [1, 1], [0, 2]] {
        expected.add_term(&f2, a.to_vec().into(), Gf::ONE).unwrap();
    }
    assert_eq!(divided_power_of_vector(&f2, &v, 2), expected);
    let x1 = divided_power_of_vector(&f2, &v, 1);
    let x2 = divided_power_of_vector(&f2, &v, 2);
    assert_eq!(divided_power_of_vector(&f2, &v, 3), product(&f2, &x1, &x2).unwrap());
}

#[test]
fn gamma_maps() {
    let f = field(4);
    let lambda = f.primitive();
    for d in 1..=3 {
        for n in 0..=4 {
            let dim = gamma_basis(n, d).len();
            assert_eq!(gamma_map(&MatrixFq::identity(&f, d), n), MatrixFq::identity(&f, dim));
            let scaled = gamma_map(&MatrixFq::identity(&f, d).scaled(lambda), n);
            assert_eq!(scaled, MatrixFq::identity(&f, dim).scaled(f.pow(lambda, n as u64)));
            if n >= 1 {
                assert!(gamma_map(&MatrixFq::zeros(&f, d, d), n).is_zero());
            }
        }
    }
}

#[test]
fn verschiebung() {
    let f2 = field(2);
    let v = verschiebung_p(&f2, 2, 1).unwrap();
    assert_eq!((v.nrows(), v.ncols()), (1, 1));
    assert_eq!(v.get(0, 0), Gf::ONE);
    let v = verschiebung_p(&f2, 2, 2).unwrap();
    let col = gamma_basis(4, 2).index_of(&[3, 1]);
    assert!(v.column(col).iter().all(|x| x.is_zero()));

    let f4 = field(4);
    let v = verschiebung_q(&f4, 2, 1).unwrap();
    assert_eq!(v.get(0, 0), Gf::ONE);
    for d in 1..=3 {
        for n in 0..=4 {
            assert_eq!(verschiebung_q(&f2, n, d).unwrap(), verschiebung_p(&f2, n, d).unwrap());
            for q in [2, 3, 4] {
                assert_eq!(verschiebung_q(&field(q), n, d).unwrap().rank(), gamma_basis(n, d).len());
            }
        }
    }
}

#[test]
fn truncated_kernels() {
    let f2 = field(2);
    assert_eq!(tilde_gamma_kernel(&f2, 3, 3).unwrap().len(), 1);
    assert_eq!(tilde_gamma_kernel(&f2, 3, 2).unwrap().len(), 0);
    for q in [2, 3, 4] {
        for d in 1..=3 {
            assert_eq!(tilde_gamma_kernel(&field(q), 0, d).unwrap().len(), 1);
        }
    }
    for n in 0..8 {
        assert_eq!(tilde_gamma_kernel(&f2, n, 3).unwrap(), bar_gamma_kernel(&f2, n, 3).unwrap());
    }
    let f3 = field(3);
    assert_eq!(bar_gamma_kernel(&f3, 2, 2).unwrap().len(), 3);
    for (q, p) in [(3, 3), (9, 3), (4, 2)] {
        for d in 1..=3u32 {
            assert!(bar_gamma_kernel(&field(q), d * (p - 1) + 1, d as usize).unwrap().is_empty());
        }
    }
}

#[test]
fn canonical_flags() {
    let f = field(2);
    let e = |i: usize, d: usize| -> Vec<Gf> { (0..d).map(|j| if i == j { Gf::ONE } else { Gf::ZERO }).collect() };
    let flag = canonicalize(&f, 3, &[e(0, 3), e(1, 3)]).unwrap();
    assert_eq!(flag.row(0), e(0, 3).as_slice());
    assert_eq!(flag.row(1), e(1, 3).as_slice());
    assert!(canonicalize(&f, 3, &[e(0, 3), e(0, 3)]).is_none());
    let sum: Vec<Gf> = vec![Gf::ONE, Gf::ONE];
    assert_eq!(canonicalize(&f, 2, &[e(0, 2), e(1, 2)]), canonicalize(&f, 2, &[e(0, 2), sum.clone()]));
    assert_ne!(canonicalize(&f, 2, &[e(0, 2), e(1, 2)]), canonicalize(&f, 2, &[sum, e(1, 2)]));
}

#[test]
fn flag_counts() {
    assert_eq!(enumerate_flags(&field(2), 3, 1).len(), 7);
    assert_eq!(enumerate_flags(&field(2), 3, 2).len(), 21);
    assert_eq!(enumerate_flags(&field(3), 2, 1).len(), 4);
    assert_eq!(flag_count(3, 2, 1), 4);
}

#[test]
fn maps_of_flags() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for q in [2, 3, 4] {
        let f = field(q);
        for d in 1..=3 {
            for r in 1..=d {
                let n = flag_count(q, d, r) as usize;
                let g = loop {
                    let g = random_matrix(&f, &mut rng, d, d);
                    if g.rank() == d {
                        break g;
                    }
                };
                let m = flag_map_matrix(&g, r);
                let ones = m.data().iter().filter(|x| **x == Gf::ONE).count();
                assert_eq!(ones, n);
                assert_eq!(m.rank(), n);
                for flag in enumerate_flags(&f, d, r) {
                    assert!(flag_map(&MatrixFq::zeros(&f, d, d), &flag).is_none());
                }
                let scalar = MatrixFq::identity(&f, d).scaled(f.primitive());
                assert_eq!(flag_map_matrix(&scalar, r), MatrixFq::identity(&f, n));
                let lhs = diag_matrix(&f, d, r).compose(&m).unwrap();
                let rhs = m.tensor(&m).unwrap().compose(&diag_matrix(&f, d, r)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn truncation_and_diagonal() {
    let f = field(2);
    for flag in enumerate_flags(&f, 3, 2) {
        assert_eq!(flag.truncate(2).unwrap(), flag);
        assert_eq!(flag_diag(&flag), (flag.clone(), flag.clone()));
    }
    let pi = truncation_matrix(&f, 3, 2, 1).unwrap();
    assert_eq!((pi.nrows(), pi.ncols()), (7, 21));
    for i in 0..7 {
        assert_eq!(pi.row(i).iter().filter(|x| !x.is_zero()).count(), 3);
    }
    assert_eq!(pi.rank(), 7);
    let diag = diag_matrix(&f, 3, 2);
    for j in 0..diag.ncols() {
        assert_eq!(diag.column(j).iter().filter(|x| !x.is_zero()).count(), 1);
    }
}

#[test]
fn linear_algebra() {
    let f = field(3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..6 {
        assert_eq!(MatrixFq::identity(&f, n).rank(), n);
        assert_eq!(MatrixFq::zeros(&f, n, n).rank(), 0);
        assert!(MatrixFq::identity(&f, n).kernel_basis().is_empty());
        assert_eq!(MatrixFq::zeros(&f, n, n).kernel_basis().len(), n);
        assert_eq!(
            MatrixFq::identity(&f, n).tensor(&MatrixFq::identity(&f, 3)).unwrap(),
            MatrixFq::identity(&f, 3 * n)
        );
    }
    for _ in 0..30 {
        let (r1, c1, r2, c2) = (rng.gen_range(1..5), rng.gen_range(1..5), rng.gen_range(1..5), rng.gen_range(1..5));
        let a = random_matrix(&f, &mut rng, r1, c1);
        let b = random_matrix(&f, &mut rng, r2, c2);
        assert_eq!(a.compose(&MatrixFq::identity(&f, c1)).unwrap(), a);
        assert_eq!(a.tensor(&b).unwrap().rank(), a.rank() * b.rank());
        for k in a.kernel_basis() {
            assert!(a.apply(&k).unwrap().iter().all(|x| x.is_zero()));
        }
    }
}

#[test]
fn line_maps() {
    let f2 = field(2);
    let m = phi_line(&f2, 1, 2).unwrap();
    let columns: Vec<Vec<Gf>> = (0..3).map(|j| m.column(j)).collect();
    let mut sorted = columns.clone();
    sorted.sort();
    let mut expected = vec![vec_of(&f2, &[1, 0]), vec_of(&f2, &[0, 1]), vec_of(&f2, &[1, 1])];
    expected.sort();
    assert_eq!(sorted, expected);
    assert_eq!(m.rank(), 2);
    assert_eq!(phi_line(&f2, 3, 3).unwrap().rank(), 7);

    // v^{(2)} on the four lines of F_3^2, coordinates (a², ab, b²)
    let f3 = field(3);
    let by_hand = MatrixFq::from_columns(
        &f3,
        3,
        &[vec_of(&f3, &[1, 0, 0]), vec_of(&f3, &[0, 0, 1]), vec_of(&f3, &[1, 1, 1]), vec_of(&f3, &[1, 2, 1])],
    )
    .unwrap();
    assert_eq!(by_hand.rank(), 3);
    assert_eq!(phi_line(&f3, 2, 2).unwrap().rank(), 3);
    assert!(phi_line(&f3, 3, 2).is_err());
}

#[test]
fn crabb_hubbuck_morphisms() {
    for q in [2, 3] {
        let f = field(q);
        for s in 1..=3 {
            for d in 1..=3 {
                let line = phi_line(&f, bracket(s, q).unwrap() as u32, d).unwrap();
                assert_eq!(phi_seq(&f, &seq(&[s]), d).unwrap(), line);
                assert_eq!(phi_constant(&f, 1, s, d).unwrap(), line);
            }
        }
    }
    let f2 = field(2);
    let phi = phi_seq(&f2, &seq(&[4, 2]), 3).unwrap();
    assert_eq!((phi.nrows(), phi.ncols(), phi.rank()), (190, 21, 21));
}

#[test]
fn delta_by_hand() {
    // s = (2, 1), q = 2, d = 2: Γ⁴ → Γ² ⊗ Γ¹, e^(c) ↦ Σ e^(u) ⊗ e^((c-u)/2)
    let f = field(2);
    let s = seq(&[2, 1]);
    let m = delta_s(&f, &s, 2).unwrap();
    let (src, left, right) = (gamma_basis(4, 2), gamma_basis(2, 2), gamma_basis(1, 2));
    let mut by_hand = MatrixFq::zeros(&f, left.len() * right.len(), src.len());
    for (col, c) in src.iter().enumerate() {
        for u in left.iter() {
            if u.iter().zip(c).any(|(a, b)| a > b) {
                continue;
            }
            let w: Vec<u32> = c.iter().zip(u).map(|(a, b)| a - b).collect();
            if w.iter().all(|x| x % 2 == 0) {
                let half: Vec<u32> = w.iter().map(|x| x / 2).collect();
                by_hand.set(left.index_of(u) * right.len() + right.index_of(&half), col, Gf::ONE);
            }
        }
    }
    assert_eq!(m, by_hand);
    for col in 0..src.len() {
        assert_eq!(delta_apply(&f, &s, 2, &m_col(src.len(), col)).unwrap(), m.column(col));
    }
    for q in [2, 3] {
        for d in 1..=3 {
            assert_eq!(verschiebung_power(&field(q), 1, d, 1).unwrap().rank(), d);
        }
    }
}

fn m_col(n: usize, j: usize) -> Vec<Gf> {
    (0..n).map(|i| if i == j { Gf::ONE } else { Gf::ZERO }).collect()
}

#[test]
fn psi_ranks() {
    let f = field(2);
    assert_eq!(psi_s(&f, &seq(&[4, 2]), 3).unwrap().rank(), 21);
    assert_eq!(psi_rank(&f, &seq(&[4, 2]), 3).unwrap(), 21);
    for q in [2, 3] {
        let f = field(q);
        for s in [vec![2, 1], vec![3, 1], vec![3, 2], vec![3, 2, 1]] {
            for d in s.len()..=3 {
                let s = seq(&s);
                let psi = psi_s(&f, &s, d).unwrap().rank();
                assert!(psi <= phi_seq(&f, &s, d).unwrap().rank());
                assert_eq!(psi, psi_rank(&f, &s, d).unwrap());
            }
        }
    }
}

#[test]
fn restriction() {
    let f = field(2);
    for phi in enumerate_flags(&f, 3, 1) {
        let rep = restriction_test(&f, &phi, 2).unwrap();
        assert!(rep.quotient && rep.direct && rep.consistent());
    }
    for phi in enumerate_flags(&f, 4, 1) {
        let rep = restriction_test(&f, &phi, 1).unwrap();
        assert!(!rep.quotient && !rep.direct && rep.consistent());
    }
}

#[test]
fn stabilization_diagram() {
    let f = field(2);
    assert_eq!(bracket(3, 2).unwrap(), 2 * bracket(2, 2).unwrap() + 1);
    let s = seq(&[2]);
    let lhs = eta_stab(&f, &s, 3).unwrap().compose(&phi_seq(&f, &s.plus(), 3).unwrap()).unwrap();
    let rhs = phi_seq(&f, &s, 3)
        .unwrap()
        .tensor(&phi_constant(&f, 1, 1, 3).unwrap())
        .unwrap()
        .compose(&diag_matrix(&f, 3, 1))
        .unwrap();
    assert_eq!(lhs, rhs);
    assert!(eta_diagram_check(&f, &s, 3, CheckScope::All).unwrap().holds);
    assert!(eta_diagram_check(&f, &seq(&[2, 1]), 3, CheckScope::All).unwrap().holds);
    assert_eq!(phi_seq(&f, &seq(&[2]), 3).unwrap().rank(), 7);
    assert_eq!(phi_seq(&f, &seq(&[3]), 3).unwrap().rank(), 7);
}

#[test]
fn line_filtration() {
    for q in [2, 3] {
        let f = field(q);
        for d in 1..=3 {
            for k in 2..=5 {
                let step = qk_dim(&f, k, d).unwrap() - qk_dim(&f, k - 1, d).unwrap();
                assert_eq!(step, tilde_gamma_kernel(&f, k * (q - 1), d).unwrap().len());
            }
        }
    }
    assert_eq!(qk_dim(&field(2), 1, 3).unwrap(), 3);
}

#[test]
fn ring_of_lines() {
    let f = field(2);
    for d in 1..=3 {
        assert_eq!(ring_of_lines_dim(&f, 0, d).unwrap(), 0);
    }
    let stacked = phi_seq(&f, &seq(&[2]), 3)
        .unwrap()
        .transpose()
        .vstack(&phi_seq(&f, &seq(&[1, 1, 1]), 3).unwrap().transpose())
        .unwrap();
    assert_eq!(ring_of_lines_dim(&f, 3, 3).unwrap(), stacked.rank());
    for n in 1..=8 {
        for d in 1..=3 {
            assert!(ring_of_lines_dim(&f, n, d).unwrap() <= ring_of_lines_dim(&f, n, d + 1).unwrap());
        }
    }
}

#[test]
fn theorem_cells() {
    let opts = ReportOptions::default();
    let r = criterion_report(&field(2), &seq(&[4, 2]), 3, &opts).unwrap();
    assert!(r.criterion_holds);
    assert_eq!((r.rank, r.status), (Some(21), CellStatus::Verified));

    let r = criterion_report(&field(2), &seq(&[2, 1]), 4, &opts).unwrap();
    assert!(!r.criterion_holds);
    assert!(r.per_step[0].lhs < r.per_step[0].rhs);
    assert_eq!((r.per_step[0].lhs, r.per_step[0].rhs), (1, 4));
    assert_eq!(r.status, CellStatus::Observed);
    assert!(r.injective.is_some());

    let r = criterion_report(&field(3), &seq(&[2, 1]), 2, &opts).unwrap();
    assert!(!r.criterion_holds);
    assert_eq!((r.per_step[0].lhs, r.per_step[0].rhs), (2, 4));
    assert_eq!(r.status, CellStatus::Observed);
}

#[test]
fn stabilization_reports() {
    let cfg = SweepConfig::new(Mode::Stabilize);
    let opts = ReportOptions::default();
    let cell = criterion_report(&field(2), &seq(&[2]), 3, &opts).unwrap();
    let report = stabilization_from(&cfg, &[cell]).unwrap();
    assert_eq!(report.cells.len(), 1);
    assert_eq!(report.cells[0].plus, vec![3]);
    assert_eq!(report.cells[0].injective_plus, Some(true));

    let vacuous: Vec<_> = (2..=4).map(|d| criterion_report(&field(2), &seq(&[1]), d, &opts).unwrap()).collect();
    assert!(vacuous.iter().all(|c| c.injective == Some(false)));
    let report = stabilization_from(&cfg, &vacuous).unwrap();
    assert!(report.cells.is_empty());
    assert_eq!(report.exit_code(), 0);
}

#[test]
fn lemma_report_tables() {
    let mut cfg = SweepConfig::new(Mode::Lemmas);
    cfg.fields = vec![field(2)];
    let report = run_lemma_battery(&cfg).unwrap();
    assert!(report.all_passed());
    let rows: Vec<_> = report.qk.iter().filter(|r| r.q == 2 && r.d == 3).collect();
    assert_eq!(rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
    assert!(rows.iter().all(|r| r.recursion != Some(false) && r.saturated != Some(false)));
    assert!(report.versch.iter().any(|c| !c.divisible && c.betas.len() >= 2));
    assert!(report.versch.iter().all(|c| c.holds));
}
