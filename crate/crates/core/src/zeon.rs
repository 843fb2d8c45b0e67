//! Zeon powers: subset-indexed matrices whose entries are permanents of
//! submatrices, their limits `Omega_l`, the hat map at level two, and the
//! fixed-point theory of the two-color maps `F` and `G`.

use std::collections::HashMap;

use itertools::Itertools;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{abel_limit, kernel_basis, RationalMatrix};
use crate::rational::{self, Rational};
use crate::semigroup::KernelStructure;
use crate::tensor::{IndexScheme, LevelMatrix};
use crate::transform::Transformation;
use crate::walk::Walk;

pub const DEFAULT_PERMANENT_CAP: usize = 12;

/// All `level`-subsets of `0..n`, lexicographic on sorted tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetIndex {
    n: usize,
    level: usize,
    subsets: Vec<Vec<usize>>,
    position: HashMap<Vec<usize>, usize>,
}

impl SubsetIndex {
    pub fn new(n: usize, level: usize) -> Self {
        let subsets: Vec<Vec<usize>> = (0..n).combinations(level).collect();
        let position = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self {
            n,
            level,
            subsets,
            position,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn subset(&self, i: usize) -> &[usize] {
        &self.subsets[i]
    }

    /// Position of a subset given in any order; `None` if it has repeats or
    /// the wrong size.
    pub fn position(&self, subset: &[usize]) -> Option<usize> {
        let mut s = subset.to_vec();
        s.sort_unstable();
        self.position.get(&s).copied()
    }
}

pub fn permanent(m: &RationalMatrix) -> Result<Rational> {
    permanent_with_cap(m, DEFAULT_PERMANENT_CAP)
}

/// Ryser's formula:
/// `per(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij`.
pub fn permanent_with_cap(m: &RationalMatrix, cap: usize) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n > cap {
        return Err(Error::SizeCap { size: n, cap });
    }
    let mut total = Rational::zero();
    let mut row_sums = vec![Rational::zero(); n];
    // Gray code walk over column subsets.
    let mut mask = 0u32;
    for step in 1u32..(1 << n) {
        let bit = step.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let adding = mask & (1 << bit) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += &m[(i, bit)];
            } else {
                *s -= &m[(i, bit)];
            }
        }
        let mut prod = Rational::one();
        for s in &row_sums {
            if s.is_zero() {
                prod = Rational::zero();
                break;
            }
            prod *= s;
        }
        if prod.is_zero() {
            continue;
        }
        if (n - mask.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

fn check_level(n: usize, level: usize) -> Result<()> {
    if level == 0 || level > n {
        return Err(Error::IndexOutOfRange(format!(
            "zeon level {level} on {n} points"
        )));
    }
    Ok(())
}

/// `W^v(l)`: entry `(I, J)` is the permanent of `W[I, J]`. Function
/// matrices take the induced-map path.
pub fn zeon_power(w: &RationalMatrix, level: usize) -> Result<LevelMatrix> {
    match Transformation::from_matrix(w) {
        Some(f) => zeon_of_function(&f, level),
        None => zeon_power_generic(w, level),
    }
}

/// Permanents entry by entry, for any square matrix.
pub fn zeon_power_generic(w: &RationalMatrix, level: usize) -> Result<LevelMatrix> {
    if !w.is_square() {
        return Err(Error::NotSquare {
            rows: w.rows(),
            cols: w.cols(),
        });
    }
    let n = w.rows();
    check_level(n, level)?;
    if level > DEFAULT_PERMANENT_CAP {
        return Err(Error::SizeCap {
            size: level,
            cap: DEFAULT_PERMANENT_CAP,
        });
    }
    let idx = SubsetIndex::new(n, level);
    let rows: Vec<Vec<Rational>> = idx
        .subsets()
        .par_iter()
        .map(|i| {
            idx.subsets()
                .iter()
                .map(|j| permanent(&w.submatrix(i, j)).expect("within cap"))
                .collect()
        })
        .collect();
    Ok(LevelMatrix {
        level,
        base: n,
        scheme: IndexScheme::Subsets,
        matrix: RationalMatrix::from_rows(rows)?,
    })
}

/// The 0-1 matrix of `I -> f(I)`, with a zero row wherever `f` collapses `I`.
pub fn zeon_of_function(f: &Transformation, level: usize) -> Result<LevelMatrix> {
    let n = f.n();
    check_level(n, level)?;
    let idx = SubsetIndex::new(n, level);
    let mut m = RationalMatrix::zeros(idx.len(), idx.len());
    for (row, target) in induced_subset_map(f, &idx).into_iter().enumerate() {
        if let Some(col) = target {
            m[(row, col)] = Rational::one();
        }
    }
    Ok(LevelMatrix {
        level,
        base: n,
        scheme: IndexScheme::Subsets,
        matrix: m,
    })
}

fn induced_subset_map(f: &Transformation, idx: &SubsetIndex) -> Vec<Option<usize>> {
    idx.subsets()
        .iter()
        .map(|s| {
            let image: Vec<usize> = s.iter().map(|&i| f.apply(i)).collect();
            idx.position(&image)
        })
        .collect()
}

/// `A_l = sum_i w_i C_i^v(l)`.
pub fn a_level(walk: &Walk, level: usize) -> Result<LevelMatrix> {
    check_level(walk.n(), level)?;
    let idx = SubsetIndex::new(walk.n(), level);
    let mut m = RationalMatrix::zeros(idx.len(), idx.len());
    for (c, p) in walk.colors().iter().zip(walk.weights()) {
        for (row, target) in induced_subset_map(c, &idx).into_iter().enumerate() {
            if let Some(col) = target {
                m[(row, col)] += p;
            }
        }
    }
    Ok(LevelMatrix {
        level,
        base: walk.n(),
        scheme: IndexScheme::Subsets,
        matrix: m,
    })
}

/// `Omega_l`, the Abel limit of `A_l`.
pub fn omega_level(walk: &Walk, level: usize) -> Result<LevelMatrix> {
    let a = a_level(walk, level)?;
    Ok(LevelMatrix {
        matrix: abel_limit(&a.matrix)?,
        ..a
    })
}

/// `Omega_l` for every level `1..=n`.
pub fn omega_levels(walk: &Walk) -> Result<Vec<LevelMatrix>> {
    (1..=walk.n()).map(|l| omega_level(walk, l)).collect()
}

/// The largest level with `Omega_l != 0`.
pub fn kernel_rank_zeon(walk: &Walk) -> Result<usize> {
    Ok(rank_from_levels(&omega_levels(walk)?))
}

pub fn rank_from_levels(levels: &[LevelMatrix]) -> usize {
    levels
        .iter()
        .filter(|o| !o.matrix.is_zero())
        .map(|o| o.level)
        .max()
        .unwrap_or(0)
}

/// A level-two zeon vector, entries indexed by pairs `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeonVec2 {
    pub n: usize,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub entries: Vec<Rational>,
}

impl ZeonVec2 {
    pub fn new(n: usize, entries: Vec<Rational>) -> Result<Self> {
        let size = n * n.saturating_sub(1) / 2;
        if entries.len() != size {
            return Err(Error::DimensionMismatch {
                op: "zeon vector",
                left: format!("n = {n}"),
                right: format!("{} entries", entries.len()),
            });
        }
        Ok(Self { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, vec![Rational::zero(); n * n.saturating_sub(1) / 2]).expect("sized")
    }

    pub fn unit(n: usize, pos: usize) -> Self {
        let mut v = Self::zero(n);
        v.entries[pos] = Rational::one();
        v
    }

    pub fn inner(&self, other: &Self) -> Rational {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum()
    }

    /// `X u^*`.
    pub fn total(&self) -> Rational {
        self.entries.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|x| *x >= Rational::zero())
    }

    /// `X W` for a level-two zeon matrix `W`.
    pub fn times(&self, w: &RationalMatrix) -> Self {
        Self::new(self.n, w.left_apply(&self.entries)).expect("level-two matrix")
    }

    /// `W X^*`.
    pub fn applied_by(&self, w: &RationalMatrix) -> Self {
        Self::new(self.n, w.right_apply(&self.entries)).expect("level-two matrix")
    }
}

/// `X^`: symmetric, zero diagonal, `X^_ij = x_ij` for `i < j`.
pub fn hat(x: &ZeonVec2) -> RationalMatrix {
    let n = x.n;
    let mut m = RationalMatrix::zeros(n, n);
    for ((i, j), v) in (0..n).tuple_combinations().zip(&x.entries) {
        m[(i, j)] = v.clone();
        m[(j, i)] = v.clone();
    }
    m
}

pub fn unhat(y: &RationalMatrix) -> Result<ZeonVec2> {
    if !y.is_square() || !y.is_symmetric() || y.diagonal().iter().any(|d| !d.is_zero()) {
        return Err(Error::NotSymmetricZeroDiag);
    }
    let n = y.rows();
    ZeonVec2::new(
        n,
        (0..n)
            .tuple_combinations()
            .map(|(i, j)| y[(i, j)].clone())
            .collect(),
    )
}

fn check_pair(a: &RationalMatrix, x: &ZeonVec2) -> Result<()> {
    if a.shape() != (x.n, x.n) {
        return Err(Error::DimensionMismatch {
            op: "zeon relations",
            left: format!("{:?}", a.shape()),
            right: format!("vector over n = {}", x.n),
        });
    }
    Ok(())
}

/// The level-two relations `Mat(X A^v2) = A* X^ A - D+` and
/// `Mat(A^v2 X*) = A X^ A* - D-`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeonBasicRelations {
    pub d_plus: Vec<Rational>,
    pub d_minus: Vec<Rational>,
    pub left: RationalMatrix,
    pub left_expected: RationalMatrix,
    pub right: RationalMatrix,
    pub right_expected: RationalMatrix,
    pub traces_match: bool,
}

impl ZeonBasicRelations {
    pub fn holds(&self) -> bool {
        self.left == self.left_expected && self.right == self.right_expected && self.traces_match
    }
}

pub fn zeon_basic_relations(a: &RationalMatrix, x: &ZeonVec2) -> Result<ZeonBasicRelations> {
    check_pair(a, x)?;
    let n = x.n;
    let a2 = zeon_power(a, 2)?.matrix;
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let mut d_plus = vec![Rational::zero(); n];
    let mut d_minus = vec![Rational::zero(); n];
    for (&(l, m), v) in pairs.iter().zip(&x.entries) {
        if v.is_zero() {
            continue;
        }
        for i in 0..n {
            d_plus[i] += v * &a[(l, i)] * &a[(m, i)] * rational::int(2);
            d_minus[i] += v * &a[(i, l)] * &a[(i, m)] * rational::int(2);
        }
    }
    let xh = hat(x);
    let at = a.transpose();
    let outer_left = &(&at * &xh) * a;
    let outer_right = &(a * &xh) * &at;
    let traces_match = outer_left.trace() == d_plus.iter().sum::<Rational>()
        && outer_right.trace() == d_minus.iter().sum::<Rational>();
    Ok(ZeonBasicRelations {
        left: hat(&x.times(&a2)),
        left_expected: &outer_left - &RationalMatrix::diag(&d_plus),
        right: hat(&x.applied_by(&a2)),
        right_expected: &outer_right - &RationalMatrix::diag(&d_minus),
        d_plus,
        d_minus,
        traces_match,
    })
}

/// `X (I - A^v2) u*` against `1/2 tr(A* X^ A)`, and `X A^v2 u*` against
/// `1/2 tr(X^ (J - A A*))`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationByParts {
    pub value: Rational,
    pub expected: Rational,
    pub trace_value: Rational,
    pub trace_expected: Rational,
}

impl IntegrationByParts {
    pub fn holds(&self) -> bool {
        self.value == self.expected && self.trace_value == self.trace_expected
    }
}

pub fn integration_by_parts(a: &RationalMatrix, x: &ZeonVec2) -> Result<IntegrationByParts> {
    check_pair(a, x)?;
    if !a.is_stochastic() {
        return Err(Error::NotStochastic("integration by parts".into()));
    }
    let n = x.n;
    let a2 = zeon_power(a, 2)?.matrix;
    let xa = x.times(&a2).total();
    let xh = hat(x);
    let half = rational::ratio(1, 2);
    let at = a.transpose();
    let j = RationalMatrix::ones(n, n);
    Ok(IntegrationByParts {
        value: x.total() - &xa,
        expected: (&(&at * &xh) * a).trace() * &half,
        trace_value: xa,
        trace_expected: (&xh * &(&j - &(a * &at))).trace() * &half,
    })
}

/// Red/blue split of a two-color walk with weights one half each.
fn two_colors(walk: &Walk) -> Result<(RationalMatrix, RationalMatrix)> {
    if walk.colors().len() != 2 {
        return Err(Error::TwoColorOnly(walk.colors().len()));
    }
    if !walk.is_uniform() {
        return Err(Error::InvalidWeights(
            "F and G are defined for equal weights on the two colors".into(),
        ));
    }
    let half = rational::ratio(1, 2);
    let r = walk.colors()[0].matrix();
    let b = walk.colors()[1].matrix();
    Ok(((&r + &b).scale(&half), (&r - &b).scale(&half)))
}

/// `Delta = (R - B) / 2`.
pub fn delta(walk: &Walk) -> Result<RationalMatrix> {
    Ok(two_colors(walk)?.1)
}

/// `F(Y) = A Y A* + Delta Y Delta*`.
pub fn f_map(walk: &Walk, y: &RationalMatrix) -> Result<RationalMatrix> {
    let (a, d) = two_colors(walk)?;
    Ok(&(&(&a * y) * &a.transpose()) + &(&(&d * y) * &d.transpose()))
}

/// `G(Y) = A* Y A + Delta* Y Delta`.
pub fn g_map(walk: &Walk, y: &RationalMatrix) -> Result<RationalMatrix> {
    let (a, d) = two_colors(walk)?;
    Ok(&(&(&a.transpose() * y) * &a) + &(&(&d.transpose() * y) * &d))
}

/// Correspondence between fixed vectors of `A_2` and fixed points of `F`
/// and `G` under the hat map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    /// `Mat(A_2 X*) = F(X^)` on every unit vector, so right fixed points of
    /// `A_2` and zero-diagonal fixed points of `F` coincide.
    pub right_identity: bool,
    pub right_fixed_dimension: usize,
    pub right_fixed_pass: bool,
    /// Nonnegative vectors tried for `G(X^) = X^ <=> X A_2 = X`.
    pub left_candidates: usize,
    pub left_fixed_found: usize,
    pub left_equivalence: bool,
}

impl FixedPointReport {
    pub fn holds(&self) -> bool {
        self.right_identity && self.right_fixed_pass && self.left_equivalence
    }
}

pub fn fixed_point_correspondence(walk: &Walk) -> Result<FixedPointReport> {
    let n = walk.n();
    let a2 = a_level(walk, 2)?.matrix;
    let size = a2.rows();
    let right_identity = (0..size).all(|p| {
        let x = ZeonVec2::unit(n, p);
        f_map(walk, &hat(&x))
            .map(|f| f == hat(&x.applied_by(&a2)))
            .unwrap_or(false)
    });
    let defect = &RationalMatrix::identity(size) - &a2;
    let right = kernel_basis(&defect);
    let mut right_fixed_pass = true;
    for v in &right {
        let x = ZeonVec2::new(n, v.clone())?;
        right_fixed_pass &= f_map(walk, &hat(&x))? == hat(&x);
    }
    let omega2 = abel_limit(&a2)?;
    let mut candidates = vec![ZeonVec2::zero(n)];
    candidates.extend((0..size).map(|p| ZeonVec2::unit(n, p)));
    candidates.extend((0..size).map(|i| ZeonVec2::new(n, omega2.row(i).to_vec()).expect("sized")));
    candidates.push(ZeonVec2::new(n, vec![Rational::one(); size])?.times(&omega2));
    let mut left_fixed_found = 0;
    let mut left_equivalence = true;
    for x in &candidates {
        debug_assert!(x.is_nonnegative());
        let fixed = x.times(&a2) == *x;
        let g_fixed = g_map(walk, &hat(x))? == hat(x);
        left_equivalence &= fixed == g_fixed;
        if fixed && !x.total().is_zero() {
            left_fixed_found += 1;
        }
    }
    Ok(FixedPointReport {
        right_identity,
        right_fixed_dimension: right.len(),
        right_fixed_pass,
        left_candidates: candidates.len(),
        left_fixed_found,
        left_equivalence,
    })
}

/// `Omega_l = u_l* pi_l / (u Omega_l u*)` with `pi_l = u Omega_l`,
/// `u_l* = Omega_l u*`. Meaningful when `Omega_l` has rank one.
pub fn outer_product_form_holds(omega: &RationalMatrix) -> bool {
    let u = vec![Rational::one(); omega.rows()];
    let pi = omega.left_apply(&u);
    let ur = omega.right_apply(&u);
    let mass: Rational = pi.iter().sum();
    if mass.is_zero() {
        return false;
    }
    RationalMatrix::from_fn(omega.rows(), omega.cols(), |i, j| &ur[i] * &pi[j] / &mass) == *omega
}

/// The pairs `(pi_l, u_l)` for `l = top, .., 1`, obtained as consecutive
/// marginals from the top level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalDescent {
    pub top: usize,
    /// `pis[l - 1]` is `pi_l`.
    #[serde(serialize_with = "serialize_levels")]
    pub pis: Vec<Vec<Rational>>,
    #[serde(serialize_with = "serialize_levels")]
    pub us: Vec<Vec<Rational>>,
    /// `pi_1 = c pi` and `u_1 = c' u`, when they are.
    #[serde(serialize_with = "serialize_opt")]
    pub pi_factor: Option<Rational>,
    #[serde(serialize_with = "serialize_opt")]
    pub u_factor: Option<Rational>,
}

fn serialize_levels<S: serde::Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(
        v.iter()
            .map(|l| l.iter().map(rational::to_text).collect::<Vec<_>>()),
    )
}

fn serialize_opt<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&rational::to_text(r)),
        None => s.serialize_none(),
    }
}

impl MarginalDescent {
    pub fn recovers_level_one(&self) -> bool {
        self.pi_factor.is_some() && self.u_factor.is_some()
    }
}

/// `c` with `v = c target`, if any (`target` nonzero).
pub fn proportional(v: &[Rational], target: &[Rational]) -> Option<Rational> {
    let k = target.iter().position(|t| !t.is_zero())?;
    let c = &v[k] / &target[k];
    v.iter().zip(target).all(|(a, t)| *a == &c * t).then_some(c)
}

pub fn marginal_descent(
    pi_top: &[Rational],
    u_top: &[Rational],
    n: usize,
    top: usize,
    pi: &[Rational],
) -> Result<MarginalDescent> {
    check_level(n, top)?;
    let size = SubsetIndex::new(n, top).len();
    if pi_top.len() != size || u_top.len() != size || pi.len() != n {
        return Err(Error::DimensionMismatch {
            op: "marginal descent",
            left: format!("level {top} over {n}"),
            right: format!(
                "vectors of length {}, {}, {}",
                pi_top.len(),
                u_top.len(),
                pi.len()
            ),
        });
    }
    if pi_top.iter().all(Zero::is_zero) || u_top.iter().all(Zero::is_zero) {
        return Err(Error::ZeroTopLevel);
    }
    let mut pis = vec![pi_top.to_vec()];
    let mut us = vec![u_top.to_vec()];
    for level in (1..top).rev() {
        let below = SubsetIndex::new(n, level);
        let above = SubsetIndex::new(n, level + 1);
        let (pa, ua) = (pis.last().expect("nonempty"), us.last().expect("nonempty"));
        let mut p = vec![Rational::zero(); below.len()];
        let mut u = vec![Rational::zero(); below.len()];
        for (k, set) in below.subsets().iter().enumerate() {
            for i in (0..n).filter(|i| !set.contains(i)) {
                let mut bigger = set.clone();
                bigger.push(i);
                let j = above.position(&bigger).expect("size level + 1");
                p[k] += &pa[j];
                u[k] += &pi[i] * &ua[j];
            }
        }
        pis.push(p);
        us.push(u);
    }
    pis.reverse();
    us.reverse();
    let ones = vec![Rational::one(); n];
    Ok(MarginalDescent {
        top,
        pi_factor: proportional(&pis[0], pi),
        u_factor: proportional(&us[0], &ones),
        pis,
        us,
    })
}

/// For each `r`-subset, the number of kernel partitions it is a cross
/// section of.
pub fn cross_section_counts(ks: &KernelStructure) -> Vec<usize> {
    SubsetIndex::new(ks.n(), ks.rank())
        .subsets()
        .iter()
        .map(|s| ks.partitions().iter().filter(|p| p.is_cross_section(s)).count())
        .collect()
}
