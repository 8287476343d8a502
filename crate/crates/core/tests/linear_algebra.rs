//! Exact linear algebra against a dense elimination oracle written here.

use ainfty_core::exactla::{kernel_basis, rref, solve, Matrix, SparseVec, Subquotient};
use ainfty_core::{Field, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Rank by dense Gaussian elimination over `F_p` (`p > 0`) or ℚ (`p = 0`).
fn oracle_rank(rows: &[Vec<i64>], p: i64) -> usize {
    if p > 0 {
        let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
        let inv = |a: i64| (1..p).find(|b| a * b % p == 1).unwrap();
        let mut rank = 0;
        let cols = m.first().map_or(0, |r| r.len());
        for c in 0..cols {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, piv);
            let s = inv(m[rank][c]);
            for x in m[rank].iter_mut() {
                *x = *x * s % p;
            }
            for r in 0..m.len() {
                if r != rank && m[r][c] != 0 {
                    let f = m[r][c];
                    for k in 0..cols {
                        m[r][k] = (m[r][k] - f * m[rank][k]).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank
    } else {
        let mut m: Vec<Vec<BigRational>> =
            rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
        let mut rank = 0;
        let cols = m.first().map_or(0, |r| r.len());
        for c in 0..cols {
            let Some(piv) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
            m.swap(rank, piv);
            let s = BigRational::one() / m[rank][c].clone();
            for x in m[rank].iter_mut() {
                *x = x.clone() * s.clone();
            }
            for r in 0..m.len() {
                if r != rank && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for k in 0..cols {
                        let t = m[rank][k].clone() * f.clone();
                        m[r][k] = m[r][k].clone() - t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

fn field_of(p: i64) -> Field {
    if p == 0 {
        Field::Q
    } else {
        Field::Fp(p as u64)
    }
}

fn small_matrix() -> impl Strategy<Value = (Vec<Vec<i64>>, i64)> {
    (1usize..6, 1usize..6, prop::sample::select(vec![0i64, 2, 3, 7])).prop_flat_map(|(r, c, p)| {
        (prop::collection::vec(prop::collection::vec(-3i64..=3, c), r), Just(p))
    })
}

fn to_vec(field: Field, xs: &[i64]) -> SparseVec {
    xs.iter().enumerate().filter(|(_, &x)| field.from_i64(x) != field.zero()).map(|(i, &x)| (i, field.from_i64(x))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_matches_dense_oracle((rows, p) in small_matrix()) {
        let f = field_of(p);
        let m = Matrix::from_i64(f, &rows);
        prop_assert_eq!(m.rank(), oracle_rank(&rows, p));
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn rref_is_reduced_and_row_equivalent((rows, p) in small_matrix()) {
        let f = field_of(p);
        let m = Matrix::from_i64(f, &rows);
        let (r, pivots) = rref(&m).unwrap();
        prop_assert_eq!(pivots.len(), m.rank());
        for (k, &c) in pivots.iter().enumerate() {
            prop_assert!(r.get(k, c).is_one());
            for i in 0..r.rows() {
                if i != k {
                    prop_assert!(r.get(i, c).is_zero());
                }
            }
        }
        // over F_p, stacking the rref under m does not raise the rank
        if p > 0 {
            let mut both = rows.clone();
            for row in r.to_dense().iter().take(pivots.len()) {
                both.push(row.iter().map(|x| x.to_coeff_string().parse().unwrap()).collect());
            }
            prop_assert_eq!(oracle_rank(&both, p), m.rank());
        }
    }

    #[test]
    fn solve_recovers_consistent_systems((rows, p) in small_matrix(), x in prop::collection::vec(-3i64..=3, 6)) {
        let f = field_of(p);
        let m = Matrix::from_i64(f, &rows);
        let xv = to_vec(f, &x[..m.cols()]);
        let b = m.mul_vec(&xv);
        let y = solve(&m, &b).unwrap();
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn kernel_has_complementary_dimension((rows, p) in small_matrix()) {
        let f = field_of(p);
        let m = Matrix::from_i64(f, &rows);
        let k = kernel_basis(&m).unwrap();
        prop_assert_eq!(k.len() + m.rank(), m.cols());
        for v in &k {
            prop_assert!(m.mul_vec(v).is_empty());
        }
        prop_assert_eq!(Matrix::from_columns(f, m.cols(), &k).rank(), k.len());
    }

    #[test]
    fn subquotient_dimension_and_coordinates((rows, p) in small_matrix()) {
        let f = field_of(p);
        let m = Matrix::from_i64(f, &rows);
        // ambient = row space, sub = span of the first row
        let ambient: Vec<SparseVec> = (0..m.rows()).map(|i| m.row(i).clone()).collect();
        let sub = vec![ambient[0].clone()];
        let q = Subquotient::new(f, m.cols(), &sub, &ambient).unwrap();
        let sub_rank = usize::from(!ambient[0].is_empty());
        prop_assert_eq!(q.dim(), m.rank() - sub_rank);
        prop_assert!(q.is_zero_class(&ambient[0]).unwrap());
        for (i, r) in q.reps().iter().enumerate() {
            let c = q.class_coords(r).unwrap();
            prop_assert_eq!(c.len(), 1);
            prop_assert!(c[&i].is_one());
        }
    }

    #[test]
    fn fp_field_axioms(a in -50i64..50, b in -50i64..50, c in -50i64..50) {
        let f = Field::Fp(7);
        let (x, y, z) = (f.from_i64(a), f.from_i64(b), f.from_i64(c));
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&x - &x, f.zero());
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
        prop_assert_eq!(f.parse(&x.to_coeff_string()).unwrap(), x);
    }

    #[test]
    fn rational_coefficient_strings_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let q = Field::Q.from_ratio(n, d);
        let s = q.to_coeff_string();
        prop_assert!(s.contains('/'));
        prop_assert_eq!(Field::Q.parse(&s).unwrap(), q.clone());
        let expect = BigRational::new(BigInt::from(n), BigInt::from(d));
        prop_assert_eq!(s, format!("{}/{}", expect.numer(), expect.denom()));
    }
}

#[test]
fn mixed_fields_are_rejected() {
    let a = Field::Fp(5).one();
    let b: Scalar = Field::Q.one();
    assert_ne!(a.field(), b.field());
    let mut m = Matrix::zero(Field::Fp(5), 1, 2);
    m.set(0, 0, a);
    m.set(0, 1, b);
    assert!(rref(&m).is_err());
}
