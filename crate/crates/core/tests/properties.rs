mod common;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use zeonwalk::linalg::{abel_limit, abel_numeric, SparseChain};
use zeonwalk::problem::Validation;
use zeonwalk::rational::{ratio, to_f64};
use zeonwalk::tensor::{kron_power, mat_of, vec_of};
use zeonwalk::walk::{self, haar_check, Walk};
use zeonwalk::zeon::{self, hat, unhat, ZeonVec2};
use zeonwalk::{KernelStructure, Rational, RationalMatrix, Semigroup, Transformation};

fn function(n: usize) -> impl Strategy<Value = Transformation> {
    proptest::collection::vec(0..n, n).prop_map(|v| Transformation::new(v).unwrap())
}

fn function_pair() -> impl Strategy<Value = (Transformation, Transformation)> {
    (2usize..=7).prop_flat_map(|n| (function(n), function(n)))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

fn matrix(n: usize) -> impl Strategy<Value = RationalMatrix> {
    proptest::collection::vec(small_rational(), n * n)
        .prop_map(move |v| RationalMatrix::new(n, n, v).unwrap())
}

/// Random stochastic matrix with some zero entries.
fn stochastic(n: usize) -> impl Strategy<Value = RationalMatrix> {
    proptest::collection::vec(proptest::collection::vec(0i64..=3, n), n).prop_map(move |rows| {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, mut w)| {
                if w.iter().all(|&x| x == 0) {
                    w[i] = 1;
                }
                let total: i64 = w.iter().sum();
                w.into_iter().map(|x| ratio(x, total)).collect()
            })
            .collect();
        RationalMatrix::from_rows(rows).unwrap()
    })
}

fn zeon_vec(n: usize) -> impl Strategy<Value = ZeonVec2> {
    proptest::collection::vec(small_rational(), n * (n - 1) / 2)
        .prop_map(move |v| ZeonVec2::new(n, v).unwrap())
}

fn naive_permanent(m: &RationalMatrix) -> Rational {
    fn go(m: &RationalMatrix, row: usize, used: &mut Vec<bool>) -> Rational {
        if row == m.rows() {
            return Rational::one();
        }
        let mut acc = Rational::zero();
        for c in 0..m.cols() {
            if !used[c] && !m[(row, c)].is_zero() {
                used[c] = true;
                acc += &m[(row, c)] * go(m, row + 1, used);
                used[c] = false;
            }
        }
        acc
    }
    go(m, 0, &mut vec![false; m.cols()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_matrix_product((f, g) in function_pair()) {
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(fg.matrix(), &f.matrix() * &g.matrix());
    }

    #[test]
    fn rank_never_grows_and_partitions_coarsen((f, g) in function_pair()) {
        let fg = f.compose(&g).unwrap();
        prop_assert!(fg.rank() <= f.rank().min(g.rank()));
        prop_assert!(f.kernel_partition().refines(&fg.kernel_partition()));
    }

    #[test]
    fn abel_limit_matches_resolvent(a in (2usize..=5).prop_flat_map(stochastic)) {
        let omega = abel_limit(&a).unwrap();
        let s = Rational::one() - ratio(1, 100_000_000);
        let approx = abel_numeric(&a, &s).unwrap();
        prop_assert!(to_f64(&approx.max_abs_diff(&omega)) <= 1e-6);
        prop_assert_eq!(&(&omega * &omega), &omega);
        prop_assert_eq!(&(&a * &omega), &omega);
        prop_assert_eq!(&(&omega * &a), &omega);
    }

    #[test]
    fn sparse_chain_matches_dense_limit(a in (1usize..=6).prop_flat_map(stochastic)) {
        let rows = (0..a.rows())
            .map(|i| {
                a.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(j, p)| (j, p.clone()))
                    .collect()
            })
            .collect();
        let chain = SparseChain::new(rows).unwrap();
        prop_assert_eq!(chain.limit_matrix().unwrap(), abel_limit(&a).unwrap());
    }

    #[test]
    fn kron_power_is_multiplicative(a in matrix(3), b in matrix(3)) {
        let ab = kron_power(&(&a * &b), 2).unwrap().matrix;
        let prod = &kron_power(&a, 2).unwrap().matrix * &kron_power(&b, 2).unwrap().matrix;
        prop_assert_eq!(ab, prod);
    }

    #[test]
    fn mat_vec_round_trip(y in (1usize..=5).prop_flat_map(matrix)) {
        prop_assert_eq!(mat_of(&vec_of(&y).unwrap()), y);
    }

    #[test]
    fn stochastic_tensor_square_kills_row_sums(a in (2usize..=4).prop_flat_map(stochastic), seed in 0u64..1000) {
        let n = a.rows();
        let a2 = kron_power(&a, 2).unwrap().matrix;
        let x: Vec<Rational> = (0..n * n).map(|i| ratio(((i as u64 * 7 + seed) % 9) as i64 - 4, 3)).collect();
        let diff = &RationalMatrix::identity(n * n) - &a2;
        let ones = vec![Rational::one(); n * n];
        let v = diff.right_apply(&ones);
        let total: Rational = x.iter().zip(&v).map(|(a, b)| a * b).sum();
        prop_assert!(total.is_zero());
    }

    #[test]
    fn zeon_power_is_multiplicative_on_functions(
        (f, g, level) in (2usize..=6).prop_flat_map(|n| (function(n), function(n), 1..=n.min(3)))
    ) {
        let fg = f.compose(&g).unwrap();
        let lhs = zeon::zeon_power_generic(&fg.matrix(), level).unwrap().matrix;
        let rhs = &zeon::zeon_power_generic(&f.matrix(), level).unwrap().matrix
            * &zeon::zeon_power_generic(&g.matrix(), level).unwrap().matrix;
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(&zeon::zeon_power(&fg.matrix(), level).unwrap().matrix, &lhs);
    }

    #[test]
    fn ryser_matches_naive_permanent(m in (1usize..=6).prop_flat_map(matrix)) {
        prop_assert_eq!(zeon::permanent(&m).unwrap(), naive_permanent(&m));
    }

    #[test]
    fn integration_by_parts_holds(
        (a, x) in (2usize..=6).prop_flat_map(|n| (stochastic(n), zeon_vec(n)))
    ) {
        prop_assert!(zeon::integration_by_parts(&a, &x).unwrap().holds());
    }

    #[test]
    fn function_matrices_have_no_right_correction(
        (f, x) in (2usize..=6).prop_flat_map(|n| (function(n), zeon_vec(n)))
    ) {
        let rel = zeon::zeon_basic_relations(&f.matrix(), &x).unwrap();
        prop_assert!(rel.holds());
        prop_assert!(rel.d_minus.iter().all(Zero::is_zero));
    }

    #[test]
    fn corrections_are_nonnegative_for_nonnegative_data(
        (a, x) in (2usize..=5).prop_flat_map(|n| (stochastic(n), zeon_vec(n)))
    ) {
        let x = ZeonVec2::new(x.n, x.entries.iter().map(|v| v.abs()).collect()).unwrap();
        let rel = zeon::zeon_basic_relations(&a, &x).unwrap();
        prop_assert!(rel.holds());
        prop_assert!(rel.d_plus.iter().chain(&rel.d_minus).all(|d| *d >= Rational::zero()));
    }

    #[test]
    fn hat_round_trip(x in (2usize..=6).prop_flat_map(zeon_vec)) {
        let y = hat(&x);
        prop_assert!(y.is_symmetric());
        prop_assert!(y.diagonal().iter().all(Zero::is_zero));
        prop_assert_eq!(unhat(&y).unwrap(), x);
    }

    #[test]
    fn g_map_sends_diagonals_to_diagonals(
        ((f, g), v) in (2usize..=6).prop_flat_map(|n| ((function(n), function(n)), proptest::collection::vec(small_rational(), n)))
    ) {
        let walk = Walk::uniform(vec![f, g]).unwrap();
        let image = zeon::g_map(&walk, &RationalMatrix::diag(&v)).unwrap();
        let va = walk.average_matrix().left_apply(&v);
        prop_assert_eq!(image, RationalMatrix::diag(&va));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_and_limit_measure_invariants((f, g) in (3usize..=5).prop_flat_map(|n| (function(n), function(n)))) {
        let colors = vec![f, g];
        prop_assume!(common::spec_of(&colors).validate(Validation::Strict).is_ok());
        let walk = Walk::uniform(colors.clone()).unwrap();
        let s = Semigroup::generate(&colors).unwrap();
        let ks = KernelStructure::from_semigroup(&s).unwrap();
        prop_assert!(s.is_two_sided_ideal(ks.elements()));
        prop_assert!(ks.elements().iter().all(|k| k.rank() == s.minimal_rank()));
        let lm = walk::walk_limit(&s, &walk, &ks).unwrap();
        prop_assert!(lm.lambda.iter().all(|p| *p >= Rational::zero()));
        prop_assert!(lm.lambda.iter().sum::<Rational>().is_one());
        prop_assert_eq!(&lm.step(&ks, &walk), &lm.lambda);
        prop_assert_eq!(&lm.convolution_square(&ks), &lm.lambda);
        prop_assert!(haar_check(&lm, &ks).uniform);
        prop_assert_eq!(walk::omega_from_measure(&lm, &ks), abel_limit(&walk.average_matrix()).unwrap());
    }
}
