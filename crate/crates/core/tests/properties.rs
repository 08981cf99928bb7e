use proptest::prelude::*;

use stable_stats::conjugacy::invariant_factors;
use stable_stats::families::{Permutation, SymFamily};
use stable_stats::linalg::{random_gl_seeded, rref, restrict, Grassmannian};
use stable_stats::stats::{evaluate_x, Statistic};
use stable_stats::{parse_class_spec, AmbientFamily, ConjClassLabel, Field, GlFamily, Matrix, Subspace};

const ORDERS: [u32; 7] = [2, 3, 4, 5, 7, 8, 9];

fn field() -> impl Strategy<Value = Field> {
    prop::sample::select(ORDERS.to_vec()).prop_map(|q| Field::of_order(q).unwrap())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = (Field, Matrix)> {
    field().prop_flat_map(move |f| {
        let q = f.order() as usize;
        prop::collection::vec(0..q, rows * cols).prop_map(move |entries| {
            let data = entries.into_iter().map(|i| f.element(i)).collect();
            (f.clone(), Matrix::from_elements(rows, cols, data).unwrap())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_elements_round_trip_through_text(f in field(), i in 0usize..256) {
        let a = f.element(i % f.order() as usize);
        prop_assert_eq!(f.parse_element(&f.format(a)).unwrap(), a);
    }

    #[test]
    fn field_distributes(f in field(), a in 0usize..256, b in 0usize..256, c in 0usize..256) {
        let q = f.order() as usize;
        let (a, b, c) = (f.element(a % q), f.element(b % q), f.element(c % q));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.element(1));
        }
    }

    #[test]
    fn rref_is_idempotent_and_keeps_the_row_space((f, m) in matrix(3, 4)) {
        let (r, rank) = rref(&m, &f);
        prop_assert_eq!(r.rows(), rank);
        prop_assert_eq!(rref(&r, &f).0, r.clone());
        prop_assert_eq!(Subspace::span(&m, &f), Subspace::span(&r, &f));
        for i in 0..m.rows() {
            prop_assert!(Subspace::span(&r, &f).contains(m.row(i), &f));
        }
    }

    #[test]
    fn labels_round_trip_and_are_conjugation_invariant(
        q in prop::sample::select(vec![2u32, 3, 4, 5]),
        n in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let f = Field::of_order(q).unwrap();
        let t = random_gl_seeded(n, &f, seed);
        let h = random_gl_seeded(n, &f, seed.wrapping_add(1));
        let conj = h.mul(&t, &f).unwrap().mul(&h.inverse(&f).unwrap(), &f).unwrap();
        let label = ConjClassLabel::of_gl_matrix(&t, &f).unwrap();
        prop_assert_eq!(&ConjClassLabel::of_gl_matrix(&conj, &f).unwrap(), &label);
        prop_assert_eq!(&parse_class_spec(&label.format(Some(&f)), Some(&f)).unwrap(), &label);
        let degree: usize = invariant_factors(&t, &f)
            .unwrap()
            .iter()
            .map(|p| p.degree().unwrap())
            .sum();
        prop_assert_eq!(degree, n);
    }

    #[test]
    fn restrictions_intertwine(q in prop::sample::select(vec![2u32, 3]), seed in any::<u64>()) {
        let f = Field::of_order(q).unwrap();
        let t = random_gl_seeded(3, &f, seed);
        for d in 1..=2 {
            for w in Grassmannian::new(3, d, &f) {
                let fixed = w.image(&t, &f) == w;
                match restrict(&t, &w, &f).unwrap() {
                    Some(s) => {
                        prop_assert!(fixed);
                        let b = w.basis().transpose();
                        prop_assert_eq!(t.mul(&b, &f).unwrap(), b.mul(&s, &f).unwrap());
                    }
                    None => prop_assert!(!fixed),
                }
            }
        }
    }

    #[test]
    fn permutation_group_laws(n in 1usize..=7, a in any::<u64>(), b in any::<u64>()) {
        let order: u64 = (1..=n as u64).product();
        let (x, y) = (Permutation::unrank(n, a % order), Permutation::unrank(n, b % order));
        prop_assert_eq!(x.compose(&x.inverse()), Permutation::identity(n));
        let conj = y.compose(&x).compose(&y.inverse());
        prop_assert_eq!(conj.cycle_type(), x.cycle_type());
        prop_assert_eq!(x.cycle_type().iter().sum::<usize>(), n);
    }

    #[test]
    fn sym_statistics_are_class_functions(n in 2usize..=6, a in any::<u64>(), b in any::<u64>()) {
        let s = SymFamily::new();
        let order: u64 = (1..=n as u64).product();
        let (x, y) = (Permutation::unrank(n, a % order), Permutation::unrank(n, b % order));
        let conj = y.compose(&x).compose(&y.inverse());
        for class in s.classes(2).unwrap().iter() {
            let st = Statistic::new(&s, class.label.clone()).unwrap();
            prop_assert_eq!(evaluate_x(&s, &st, &x, n).unwrap(), evaluate_x(&s, &st, &conj, n).unwrap());
        }
    }
}

#[test]
fn line_counts_add_up_over_f4() {
    // every eigenvector line is counted under exactly one eigenvalue
    let f = Field::of_order(4).unwrap();
    let g = GlFamily::new(f.clone());
    for seed in 0..40 {
        let t = random_gl_seeded(4, &f, seed);
        let total: u64 = g
            .classes(1)
            .unwrap()
            .iter()
            .map(|c| evaluate_x(&g, &Statistic::new(&g, c.label.clone()).unwrap(), &t, 4).unwrap())
            .sum();
        let lines = Grassmannian::new(4, 1, &f).filter(|w| w.image(&t, &f) == *w).count();
        assert_eq!(total, lines as u64);
    }
}
