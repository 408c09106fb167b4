use proptest::prelude::*;

use ffsphere_core::designs::design_strength;
use ffsphere_core::energy::pair_energy_serial;
use ffsphere_core::field::quadratic_character;
use ffsphere_core::format::table_value;
use ffsphere_core::io::{read_csv, write_points, PointFormat};
use ffsphere_core::solve::DEFAULT_BUDGET;
use ffsphere_core::{
    pair_energies, ExtensionField, FieldElement, FiniteField, PointSet, PrimeField,
};

const PRIMES: [u64; 10] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

fn x(d: usize, p: u64) -> PointSet {
    PointSet::build(d, &PrimeField::new(p).unwrap(), DEFAULT_BUDGET).unwrap()
}

/// Applies `v -> sign * v[perm]` to every numerator vector.
fn transform(set: &PointSet, perm: &[usize], signs: &[i64], order: &[usize]) -> PointSet {
    let vectors = order
        .iter()
        .map(|&i| {
            let w = set.numerators(i);
            perm.iter().zip(signs).map(|(&k, &s)| s * w[k]).collect()
        })
        .collect();
    PointSet::from_numerators(set.d(), set.field(), vectors).unwrap()
}

fn small_set() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=3).prop_flat_map(|d| {
        let max: usize = if d == 3 { 3 } else { 6 };
        (Just(d), (0..max).prop_map(|i: usize| PRIMES[i]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn character_is_multiplicative(i in 0usize..10, a in -1000i64..1000, b in -1000i64..1000) {
        let p = PRIMES[i];
        prop_assert_eq!(
            quadratic_character(a * b, p),
            quadratic_character(a, p) * quadratic_character(b, p)
        );
    }

    #[test]
    fn extension_field_axioms(pe in prop::sample::select(vec![(3u64, 2u32), (3, 3), (5, 2), (7, 2)]),
                              a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = ExtensionField::build(pe.0, pe.1).unwrap();
        let q = f.order();
        let (a, b, c) = (FieldElement::from_index(a % q), FieldElement::from_index(b % q), FieldElement::from_index(c % q));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        if a != FieldElement::ZERO {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
        }
        let centered = f.to_centered_int(a).unsigned_abs();
        prop_assert!(centered <= (q as u64 - 1) / 2);
    }

    #[test]
    fn strength_and_energy_survive_signed_permutations(
        (d, p) in small_set(),
        seed in any::<u64>(),
    ) {
        let set = x(d, p);
        let dim = d + 1;
        let mut rng = seed;
        let mut next = move |m: usize| {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng % m as u64) as usize
        };
        let mut perm: Vec<usize> = (0..dim).collect();
        for i in (1..dim).rev() {
            perm.swap(i, next(i + 1));
        }
        let signs: Vec<i64> = (0..dim).map(|_| if next(2) == 0 { 1 } else { -1 }).collect();
        let mut order: Vec<usize> = (0..set.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, next(i + 1));
        }
        let moved = transform(&set, &perm, &signs, &order);
        prop_assert_eq!(moved.directions(), set.directions());
        prop_assert_eq!(design_strength(&moved, 6).strength, design_strength(&set, 6).strength);
        let s = [1.0, 2.0, 2.5];
        let a = pair_energies(&set, &s, None).unwrap();
        let b = pair_energies(&moved, &s, None).unwrap();
        for k in 0..3 {
            prop_assert!(((a[k] - b[k]) / a[k]).abs() < 1e-12);
            let serial = pair_energy_serial(&moved, s[k]).unwrap();
            prop_assert!(((serial - b[k]) / b[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip((d, p) in small_set()) {
        let set = x(d, p);
        let mut buf = Vec::new();
        write_points(&set, PointFormat::Csv, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), set.len());
        for (i, pt) in back.iter().enumerate() {
            prop_assert_eq!(&pt.coords[..], set.coords(i));
        }
    }

    #[test]
    fn table_values_reparse_to_fourteen_digits(x in 1e-6f64..1e6) {
        let printed = table_value(x);
        let back: f64 = printed.parse().unwrap();
        prop_assert!(((back - x) / x).abs() < 1e-13);
        let digits = printed.trim_start_matches(['0', '.']).chars().filter(char::is_ascii_digit).count();
        prop_assert_eq!(digits, 14);
    }
}
