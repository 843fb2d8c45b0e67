//! Kronecker powers, the degree-two Mat/vec correspondence and the
//! tensor-level limits `Omega_{(x)l}`.
//!
//! Ordered tuples `(i_1, .., i_l)` are indexed row-major:
//! `((i_1 * n + i_2) * n + ..) + i_l`, 0-based.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{RationalMatrix, SparseChain};
use crate::rational::{self, Rational};
use crate::transform::Transformation;
use crate::walk::Walk;

/// How the rows and columns of a [`LevelMatrix`] are labelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexScheme {
    /// Ordered tuples, row-major.
    Tuples,
    /// Sorted subsets, lexicographic.
    Subsets,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelMatrix {
    pub level: usize,
    pub base: usize,
    pub scheme: IndexScheme,
    pub matrix: RationalMatrix,
}

impl LevelMatrix {
    /// One-based labels for the index set, e.g. `(1,3)` or `{1,3}`.
    pub fn legend(&self) -> Vec<String> {
        match self.scheme {
            IndexScheme::Tuples => (0..self.matrix.rows())
                .map(|i| {
                    let t = tuple_of(i, self.base, self.level);
                    format!("({})", join_one_based(&t))
                })
                .collect(),
            IndexScheme::Subsets => crate::zeon::SubsetIndex::new(self.base, self.level)
                .subsets()
                .iter()
                .map(|s| format!("{{{}}}", join_one_based(s)))
                .collect(),
        }
    }
}

fn join_one_based(t: &[usize]) -> String {
    t.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Digits of a row-major tuple index.
pub fn tuple_of(mut idx: usize, n: usize, level: usize) -> Vec<usize> {
    let mut digits = vec![0; level];
    for d in digits.iter_mut().rev() {
        *d = idx % n;
        idx /= n;
    }
    digits
}

pub fn kron_power(w: &RationalMatrix, level: usize) -> Result<LevelMatrix> {
    if !w.is_square() {
        return Err(Error::NotSquare {
            rows: w.rows(),
            cols: w.cols(),
        });
    }
    if level == 0 {
        return Err(Error::IndexOutOfRange("tensor level 0".into()));
    }
    let mut m = w.clone();
    for _ in 1..level {
        m = m.kron(w);
    }
    Ok(LevelMatrix {
        level,
        base: w.rows(),
        scheme: IndexScheme::Tuples,
        matrix: m,
    })
}

/// A vector in `V (x) V`, entries indexed by ordered pairs row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorVec2 {
    pub n: usize,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub entries: Vec<Rational>,
}

impl TensorVec2 {
    pub fn new(n: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                op: "tensor vector",
                left: format!("n = {n}"),
                right: format!("{} entries", entries.len()),
            });
        }
        Ok(Self { n, entries })
    }

    /// `<X, X'> = sum_ij x_ij x'_ij`.
    pub fn inner(&self, other: &Self) -> Result<Rational> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                op: "inner product",
                left: self.n.to_string(),
                right: other.n.to_string(),
            });
        }
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum())
    }

    /// `X u^*`.
    pub fn total(&self) -> Rational {
        self.entries.iter().sum()
    }

    /// `X W` for a level-two matrix `W`.
    pub fn times(&self, w: &RationalMatrix) -> Result<Self> {
        check_level_two(self.n, w)?;
        Self::new(self.n, w.left_apply(&self.entries))
    }

    /// `W X^*`, returned again as a vector.
    pub fn applied_by(&self, w: &RationalMatrix) -> Result<Self> {
        check_level_two(self.n, w)?;
        Self::new(self.n, w.right_apply(&self.entries))
    }
}

fn check_level_two(n: usize, w: &RationalMatrix) -> Result<()> {
    if w.shape() != (n * n, n * n) {
        return Err(Error::DimensionMismatch {
            op: "level-two product",
            left: format!("vector over n = {n}"),
            right: format!("{:?} matrix", w.shape()),
        });
    }
    Ok(())
}

/// `X~`, the `n x n` matrix with `X~_ij = x_(i,j)`.
pub fn mat_of(x: &TensorVec2) -> RationalMatrix {
    RationalMatrix::new(x.n, x.n, x.entries.clone()).expect("n^2 entries")
}

pub fn vec_of(y: &RationalMatrix) -> Result<TensorVec2> {
    if !y.is_square() {
        return Err(Error::NotSquare {
            rows: y.rows(),
            cols: y.cols(),
        });
    }
    TensorVec2::new(y.rows(), y.entries().to_vec())
}

/// Both sides of `Mat(X A^(x)2) = A* X~ A` and `Mat(A^(x)2 X*) = A X~ A*`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicRelations {
    pub left: RationalMatrix,
    pub left_expected: RationalMatrix,
    pub right: RationalMatrix,
    pub right_expected: RationalMatrix,
}

impl BasicRelations {
    pub fn holds(&self) -> bool {
        self.left == self.left_expected && self.right == self.right_expected
    }
}

pub fn basic_relations_check(a: &RationalMatrix, x: &TensorVec2) -> Result<BasicRelations> {
    if a.shape() != (x.n, x.n) {
        return Err(Error::DimensionMismatch {
            op: "basic relations",
            left: format!("{:?}", a.shape()),
            right: format!("vector over n = {}", x.n),
        });
    }
    let a2 = kron_power(a, 2)?.matrix;
    let xt = mat_of(x);
    let at = a.transpose();
    Ok(BasicRelations {
        left: mat_of(&x.times(&a2)?),
        left_expected: &(&at * &xt) * a,
        right: mat_of(&x.applied_by(&a2)?),
        right_expected: &(a * &xt) * &at,
    })
}

/// `A_(x)l = sum_i w_i C_i^(x)l`, as a chain on tuples.
fn tensor_chain(walk: &Walk, level: usize) -> Result<SparseChain> {
    let lifted: Vec<Transformation> = walk.colors().iter().map(|c| c.tensor_power(level)).collect();
    let size = lifted[0].n();
    let rows = (0..size)
        .map(|i| {
            lifted
                .iter()
                .zip(walk.weights())
                .map(|(c, p)| (c.apply(i), p.clone()))
                .collect()
        })
        .collect();
    SparseChain::new(rows)
}

/// `A_(x)l = sum_i w_i C_i^(x)l`.
pub fn a_tensor(walk: &Walk, level: usize) -> Result<LevelMatrix> {
    if level == 0 {
        return Err(Error::IndexOutOfRange("tensor level 0".into()));
    }
    Ok(LevelMatrix {
        level,
        base: walk.n(),
        scheme: IndexScheme::Tuples,
        matrix: tensor_chain(walk, level)?.to_dense(),
    })
}

/// `Omega_(x)l`, the Abel limit of `A_(x)l`.
pub fn omega_tensor(walk: &Walk, level: usize) -> Result<LevelMatrix> {
    if level == 0 {
        return Err(Error::IndexOutOfRange("tensor level 0".into()));
    }
    Ok(LevelMatrix {
        level,
        base: walk.n(),
        scheme: IndexScheme::Tuples,
        matrix: tensor_chain(walk, level)?.limit_matrix()?,
    })
}

/// `Omega_(x)l (J (x) I^(l-1)) = J (x) Omega_(x)(l-1)`.
pub fn descent_holds(omega_l: &LevelMatrix, omega_below: &LevelMatrix) -> Result<bool> {
    let n = omega_l.base;
    if omega_l.level != omega_below.level + 1 || omega_below.base != n {
        return Err(Error::DimensionMismatch {
            op: "tensor descent",
            left: format!("level {} over {n}", omega_l.level),
            right: format!("level {} over {}", omega_below.level, omega_below.base),
        });
    }
    let j = RationalMatrix::ones(n, n);
    let id = RationalMatrix::identity(n.pow(omega_below.level as u32));
    let lhs = omega_l.matrix.try_mul(&j.kron(&id))?;
    Ok(lhs == j.kron(&omega_below.matrix))
}

/// Degree-two fields `pi_(x)2 = u Omega_(x)2` and `u_(x)2* = Omega_(x)2 I_vec*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fields2 {
    pub pi2: TensorVec2,
    pub u2: TensorVec2,
    pub fixed: bool,
}

pub fn fields_level2(walk: &Walk) -> Result<Fields2> {
    let n = walk.n();
    let omega2 = omega_tensor(walk, 2)?.matrix;
    let a2 = a_tensor(walk, 2)?.matrix;
    fields_from(n, &omega2, &a2)
}

pub(crate) fn fields_from(n: usize, omega2: &RationalMatrix, a2: &RationalMatrix) -> Result<Fields2> {
    let ones = TensorVec2::new(n, vec![rational::one(); n * n])?;
    let pi2 = ones.times(omega2)?;
    let u2 = vec_of(&RationalMatrix::identity(n))?.applied_by(omega2)?;
    let fixed = pi2.times(a2)? == pi2 && u2.applied_by(a2)? == u2;
    Ok(Fields2 { pi2, u2, fixed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::abel_limit;
    use crate::rational::{int, ratio};
    use crate::semigroup::{KernelStructure, Semigroup};
    use crate::walk::{omega_from_measure, walk_limit};

    fn t(s: &str) -> Transformation {
        s.parse().unwrap()
    }

    fn small() -> RationalMatrix {
        RationalMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)],
            vec![int(0), ratio(1, 4), ratio(3, 4)],
            vec![int(1), int(0), int(0)],
        ])
        .unwrap()
    }

    #[test]
    fn kron_power_identity_and_level_one() {
        let i = RationalMatrix::identity(3);
        assert_eq!(kron_power(&i, 3).unwrap().matrix, RationalMatrix::identity(27));
        assert_eq!(kron_power(&small(), 1).unwrap().matrix, small());
        assert!(kron_power(&small(), 0).is_err());
    }

    #[test]
    fn kron_power_entries_are_products() {
        let w = small();
        let k = kron_power(&w, 2).unwrap().matrix;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        assert_eq!(k[(a * 3 + b, c * 3 + d)], &w[(a, c)] * &w[(b, d)]);
                    }
                }
            }
        }
    }

    #[test]
    fn function_power_is_induced_map() {
        let f = t("[312]");
        let induced = RationalMatrix::from_fn(9, 9, |i, j| {
            let (a, b) = (i / 3, i % 3);
            let target = f.apply(a) * 3 + f.apply(b);
            if j == target {
                int(1)
            } else {
                int(0)
            }
        });
        assert_eq!(kron_power(&f.matrix(), 2).unwrap().matrix, induced);
        assert_eq!(f.tensor_power(2).matrix(), induced);
    }

    #[test]
    fn mat_vec_round_trip() {
        let x = TensorVec2::new(2, vec![int(1), int(-2), ratio(1, 3), int(4)]).unwrap();
        assert_eq!(vec_of(&mat_of(&x)).unwrap(), x);
        assert_eq!(mat_of(&x)[(0, 1)], int(-2));
        let j = RationalMatrix::ones(2, 2);
        assert_eq!(x.total(), (&mat_of(&x) * &j).trace());
        assert!(TensorVec2::new(2, vec![int(1)]).is_err());
        assert!(vec_of(&RationalMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn basic_relations_on_identity_and_general() {
        let x = TensorVec2::new(3, (1..=9).map(|v| ratio(v, 7)).collect()).unwrap();
        let id = basic_relations_check(&RationalMatrix::identity(3), &x).unwrap();
        assert!(id.holds());
        assert_eq!(id.left, mat_of(&x));
        assert!(basic_relations_check(&small(), &x).unwrap().holds());
    }

    #[test]
    fn omega_tensor_level_one_and_two() {
        let walk = Walk::uniform(vec![t("[451314]"), t("[245631]")]).unwrap();
        let s = Semigroup::generate(walk.colors()).unwrap();
        let ks = KernelStructure::from_semigroup(&s).unwrap();
        let lm = walk_limit(&s, &walk, &ks).unwrap();
        let o1 = omega_tensor(&walk, 1).unwrap();
        assert_eq!(o1.matrix, omega_from_measure(&lm, &ks));
        let o2 = omega_tensor(&walk, 2).unwrap();
        let mut avg = RationalMatrix::zeros(36, 36);
        for (k, p) in ks.elements().iter().zip(&lm.lambda) {
            for (i, j) in k.tensor_power(2).image().iter().enumerate() {
                avg[(i, *j)] += p;
            }
        }
        assert_eq!(o2.matrix, avg);
        assert!(descent_holds(&o2, &o1).unwrap());
    }

    #[test]
    fn omega_tensor_matches_dense_abel() {
        let walk = Walk::uniform(vec![t("[4312]"), t("[3443]")]).unwrap();
        let a2 = a_tensor(&walk, 2).unwrap().matrix;
        let r2 = kron_power(&t("[4312]").matrix(), 2).unwrap().matrix;
        let b2 = kron_power(&t("[3443]").matrix(), 2).unwrap().matrix;
        assert_eq!(a2, (&r2 + &b2).scale(&ratio(1, 2)));
        assert_eq!(omega_tensor(&walk, 2).unwrap().matrix, abel_limit(&a2).unwrap());
    }

    #[test]
    fn level_two_fields_are_fixed() {
        let walk = Walk::uniform(vec![t("[451314]"), t("[245631]")]).unwrap();
        let f = fields_level2(&walk).unwrap();
        assert!(f.fixed);
        let n_mat = mat_of(&f.u2);
        assert!(n_mat.diagonal().iter().all(|d| *d == int(1)));
        // Level one: u Omega = n pi sums to n, Omega u* = u*.
        let omega = omega_tensor(&walk, 1).unwrap().matrix;
        let u = vec![int(1); 6];
        assert_eq!(omega.right_apply(&u), u);
        assert_eq!(omega.left_apply(&u).iter().sum::<Rational>(), int(6));
    }

    #[test]
    fn legends() {
        let l = kron_power(&RationalMatrix::identity(2), 2).unwrap();
        assert_eq!(l.legend(), vec!["(1,1)", "(1,2)", "(2,1)", "(2,2)"]);
    }
}
