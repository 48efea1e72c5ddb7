use dkoszul_core::scalar::{Field, FieldDescriptor, Matrix, PrimeField, Rationals};
use proptest::prelude::*;

fn matrix(f: &PrimeField, rows: &[Vec<i64>]) -> Matrix<PrimeField> {
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    Matrix::from_i64(f, &refs)
}

fn rows(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}

proptest! {
    #[test]
    fn prime_inverses(p in prop::sample::select(vec![2u64, 3, 5, 7, 101, 32003, 4294967291]), a in any::<i64>()) {
        let f = PrimeField::new(p).unwrap();
        let x = f.from_i64(a);
        match f.inv(&x) {
            None => prop_assert!(f.is_zero(&x)),
            Some(y) => prop_assert!(f.is_one(&f.mul(&x, &y))),
        }
    }

    #[test]
    fn rank_nullity(m in rows(6)) {
        let f = PrimeField::default();
        let a = matrix(&f, &m);
        let k = a.kernel_basis();
        prop_assert_eq!(a.rank() + k.cols(), a.cols());
        prop_assert!(a.mul(&k).unwrap().is_zero());
        prop_assert_eq!(a.rank(), a.transpose().rank());
    }

    #[test]
    fn solve_finds_preimages(m in rows(5), x in prop::collection::vec(-4i64..=4, 5)) {
        let f = PrimeField::default();
        let a = matrix(&f, &m);
        let x: Vec<_> = x.iter().take(a.cols()).map(|&v| f.from_i64(v)).collect();
        let b = a.mul_vec(&x);
        let y = dkoszul_core::scalar::solve_vec(&a, &b).unwrap().expect("b is in the image");
        prop_assert_eq!(a.mul_vec(&y), b);
    }

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let q = Rationals;
        let x = q.mul(&q.from_i64(n), &q.inv(&q.from_i64(d)).unwrap());
        prop_assert_eq!(q.parse_elem(&q.format_elem(&x)), Some(x));
    }

    #[test]
    fn prime_parse_matches_arithmetic(n in -1000i64..1000, d in 1i64..1000) {
        let f = PrimeField::default();
        let want = f.mul(&f.from_i64(n), &f.inv(&f.from_i64(d)).unwrap());
        prop_assert_eq!(f.parse_elem(&format!("{n}/{d}")), Some(want));
    }
}

#[test]
fn field_descriptors_parse() {
    assert_eq!("prime:7".parse::<FieldDescriptor>().unwrap(), FieldDescriptor::Prime(7));
    assert_eq!("rational".parse::<FieldDescriptor>().unwrap(), FieldDescriptor::Rational);
    assert!("prime:8".parse::<FieldDescriptor>().is_err());
    assert!("prime:4294967311".parse::<FieldDescriptor>().is_err());
}
