//! The random walk driven by a weighted coloring and its limiting measure
//! on the kernel.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{RationalMatrix, SparseChain};
use crate::rational::{self, Rational};
use crate::semigroup::{KernelStructure, Semigroup};
use crate::transform::Transformation;

/// Colors (generators) with a probability weight each.
#[derive(Debug, Clone, PartialEq)]
pub struct Walk {
    colors: Vec<Transformation>,
    weights: Vec<Rational>,
}

impl Walk {
    pub fn new(colors: Vec<Transformation>, weights: Vec<Rational>) -> Result<Self> {
        let first = colors.first().ok_or(Error::EmptyGenerators)?;
        let n = first.n();
        if colors.iter().any(|c| c.n() != n) {
            return Err(Error::DimensionMismatch {
                op: "walk",
                left: format!("n = {n}"),
                right: "colors of differing size".into(),
            });
        }
        if weights.len() != colors.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} colors",
                weights.len(),
                colors.len()
            )));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidWeights("negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(Self { colors, weights })
    }

    /// Equal weight `1/d` on each of the `d` colors.
    pub fn uniform(colors: Vec<Transformation>) -> Result<Self> {
        let d = colors.len().max(1) as i64;
        let w = vec![rational::ratio(1, d); colors.len()];
        Self::new(colors, w)
    }

    pub fn n(&self) -> usize {
        self.colors[0].n()
    }

    pub fn colors(&self) -> &[Transformation] {
        &self.colors
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.iter().all(|w| *w == self.weights[0])
    }

    /// `A = sum_i w_i C_i`.
    pub fn average_matrix(&self) -> RationalMatrix {
        self.weighted_sum(|c| c.matrix())
    }

    /// `sum_i w_i f(C_i)` for any matrix-valued image of the colors.
    pub fn weighted_sum(&self, f: impl Fn(&Transformation) -> RationalMatrix) -> RationalMatrix {
        let mut acc: Option<RationalMatrix> = None;
        for (c, w) in self.colors.iter().zip(&self.weights) {
            let term = f(c).scale(w);
            acc = Some(match acc {
                None => term,
                Some(a) => &a + &term,
            });
        }
        acc.expect("walk has at least one color")
    }

    pub fn semigroup(&self) -> Result<Semigroup> {
        Semigroup::generate(&self.colors)
    }
}

/// Limit measure `lambda` on the kernel with its partition and range
/// marginals. `lambda` is aligned with [`KernelStructure::elements`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitMeasure {
    #[serde(serialize_with = "rational::serialize_vec")]
    pub lambda: Vec<Rational>,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub alpha: Vec<Rational>,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub beta: Vec<Rational>,
    pub group_order: usize,
}

/// The right-multiplication chain on the semigroup: `w -> w C_i` with
/// probability `w_i`.
pub fn walk_chain(s: &Semigroup, walk: &Walk) -> Result<SparseChain> {
    let rows = s
        .elements()
        .iter()
        .map(|w| {
            walk.colors()
                .iter()
                .zip(walk.weights())
                .map(|(c, p)| {
                    let next = s.index_of(&w.then(c)).expect("semigroup is closed");
                    (next, p.clone())
                })
                .collect()
        })
        .collect();
    SparseChain::new(rows)
}

/// Initial distribution `mu^(1)`: the color weights placed on the
/// one-letter words.
pub fn initial_distribution(s: &Semigroup, walk: &Walk) -> Vec<Rational> {
    let mut mu = vec![Rational::zero(); s.len()];
    for (c, p) in walk.colors().iter().zip(walk.weights()) {
        mu[s.index_of(c).expect("generators belong to the semigroup")] += p;
    }
    mu
}

/// Cesaro limit of the convolution powers of `mu^(1)`, computed exactly as
/// `mu^(1) Omega_T` on the full right-multiplication chain `T`.
pub fn walk_limit(s: &Semigroup, walk: &Walk, ks: &KernelStructure) -> Result<LimitMeasure> {
    if s.generators() != walk.colors() {
        return Err(Error::StructureViolation(
            "semigroup was not generated by the walk's colors".into(),
        ));
    }
    let chain = walk_chain(s, walk)?;
    let limit = chain.limit_distribution(&initial_distribution(s, walk))?;
    measure_from_distribution(s, &limit, ks)
}

/// Restricts a distribution over the semigroup to the kernel and forms the
/// marginals. Fails with `SupportLeak` if any mass sits outside the kernel.
pub fn measure_from_distribution(
    s: &Semigroup,
    dist: &[Rational],
    ks: &KernelStructure,
) -> Result<LimitMeasure> {
    let mut lambda = vec![Rational::zero(); ks.len()];
    let mut leak = Rational::zero();
    for (w, p) in s.elements().iter().zip(dist) {
        if p.is_zero() {
            continue;
        }
        match ks.index_of(w) {
            Some(i) => lambda[i] = p.clone(),
            None => leak += p,
        }
    }
    if !leak.is_zero() {
        return Err(Error::SupportLeak(leak));
    }
    let mut alpha = vec![Rational::zero(); ks.row_count()];
    let mut beta = vec![Rational::zero(); ks.col_count()];
    for (i, p) in lambda.iter().enumerate() {
        alpha[ks.row_of(i)] += p;
        beta[ks.col_of(i)] += p;
    }
    Ok(LimitMeasure {
        lambda,
        alpha,
        beta,
        group_order: ks.group_order(),
    })
}

impl LimitMeasure {
    pub fn mass_of(&self, ks: &KernelStructure, k: &Transformation) -> Option<&Rational> {
        ks.index_of(k).map(|i| &self.lambda[i])
    }

    /// `alpha(row) beta(col) / |G|` for element `i`.
    pub fn product_mass(&self, ks: &KernelStructure, i: usize) -> Rational {
        &self.alpha[ks.row_of(i)] * &self.beta[ks.col_of(i)] / rational::int(self.group_order as i64)
    }

    /// `(lambda * lambda)(v) = sum_{w w' = v} lambda(w) lambda(w')` on the kernel.
    pub fn convolution_square(&self, ks: &KernelStructure) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); ks.len()];
        let support: Vec<usize> = (0..ks.len()).filter(|&i| !self.lambda[i].is_zero()).collect();
        for &a in &support {
            for &b in &support {
                let v = ks.elements()[a].then(&ks.elements()[b]);
                let idx = ks.index_of(&v).expect("kernel is closed");
                out[idx] += &self.lambda[a] * &self.lambda[b];
            }
        }
        out
    }

    /// `lambda T`, one step of the right-multiplication chain restricted to
    /// the kernel.
    pub fn step(&self, ks: &KernelStructure, walk: &Walk) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); ks.len()];
        for (i, p) in self.lambda.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (c, w) in walk.colors().iter().zip(walk.weights()) {
                let j = ks
                    .index_of(&ks.elements()[i].then(c))
                    .expect("kernel is an ideal");
                out[j] += p * w;
            }
        }
        out
    }
}

/// Uniformity of `lambda` on every local group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HaarReport {
    /// Largest `|lambda(k) - alpha beta / |G||` per cell, rows by partition.
    #[serde(serialize_with = "serialize_grid")]
    pub cell_deviation: Vec<Vec<Rational>>,
    #[serde(serialize_with = "rational::serialize")]
    pub max_deviation: Rational,
    pub uniform: bool,
}

fn serialize_grid<S: serde::Serializer>(g: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(
        g.iter()
            .map(|r| r.iter().map(rational::to_text).collect::<Vec<_>>()),
    )
}

pub fn haar_check(lm: &LimitMeasure, ks: &KernelStructure) -> HaarReport {
    let mut cell_deviation = vec![vec![Rational::zero(); ks.col_count()]; ks.row_count()];
    for (r, row) in cell_deviation.iter_mut().enumerate() {
        for (c, dev) in row.iter_mut().enumerate() {
            for &i in ks.cell(r, c) {
                let d = (&lm.lambda[i] - lm.product_mass(ks, i)).abs();
                if d > *dev {
                    *dev = d;
                }
            }
        }
    }
    let max_deviation = cell_deviation
        .iter()
        .flatten()
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero);
    HaarReport {
        uniform: max_deviation.is_zero(),
        cell_deviation,
        max_deviation,
    }
}

/// `Omega = <K> = sum_k lambda(k) M(k)`.
pub fn omega_from_measure(lm: &LimitMeasure, ks: &KernelStructure) -> RationalMatrix {
    let n = ks.n();
    let mut omega = RationalMatrix::zeros(n, n);
    for (k, p) in ks.elements().iter().zip(&lm.lambda) {
        if p.is_zero() {
            continue;
        }
        for (i, &j) in k.image().iter().enumerate() {
            omega[(i, j)] += p;
        }
    }
    omega
}

/// `<f(K)>`: the lambda-average of a matrix-valued function on the kernel.
pub fn kernel_average(
    lm: &LimitMeasure,
    ks: &KernelStructure,
    f: impl Fn(&Transformation) -> RationalMatrix,
) -> RationalMatrix {
    let mut acc: Option<RationalMatrix> = None;
    for (k, p) in ks.elements().iter().zip(&lm.lambda) {
        if p.is_zero() {
            continue;
        }
        let term = f(k).scale(p);
        acc = Some(match acc {
            None => term,
            Some(a) => &a + &term,
        });
    }
    acc.expect("limit measure has nonempty support")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::abel_limit;
    use crate::rational::ratio;

    fn t(s: &str) -> Transformation {
        s.parse().unwrap()
    }

    fn pipeline(colors: &[&str]) -> (Semigroup, Walk, KernelStructure, LimitMeasure) {
        let walk = Walk::uniform(colors.iter().map(|c| t(c)).collect()).unwrap();
        let s = walk.semigroup().unwrap();
        let ks = KernelStructure::from_semigroup(&s).unwrap();
        let lm = walk_limit(&s, &walk, &ks).unwrap();
        (s, walk, ks, lm)
    }

    #[test]
    fn weights_are_validated() {
        let c = vec![t("[12]"), t("[21]")];
        assert!(Walk::new(c.clone(), vec![ratio(1, 2)]).is_err());
        assert!(Walk::new(c.clone(), vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Walk::new(c.clone(), vec![ratio(3, 2), ratio(-1, 2)]).is_err());
        assert!(Walk::new(c, vec![ratio(1, 3), ratio(2, 3)]).is_ok());
        assert_eq!(Walk::uniform(vec![]).unwrap_err(), Error::EmptyGenerators);
    }

    #[test]
    fn six_point_marginals() {
        let (_, _, _, lm) = pipeline(&["[451314]", "[245631]"]);
        assert_eq!(lm.alpha, vec![ratio(1, 3), ratio(2, 3)]);
        assert_eq!(lm.beta, vec![ratio(4, 9), ratio(2, 9), ratio(1, 9), ratio(2, 9)]);
        assert_eq!(lm.group_order, 6);
    }

    #[test]
    fn cyclic_permutation_gives_uniform_orbit() {
        let (_, _, ks, lm) = pipeline(&["[23451]"]);
        assert_eq!(ks.len(), 5);
        assert!(lm.lambda.iter().all(|p| *p == ratio(1, 5)));
        assert!(haar_check(&lm, &ks).uniform);
    }

    #[test]
    fn point_mass_on_trivial_kernel() {
        let (_, _, ks, lm) = pipeline(&["[1111]", "[2341]"]);
        assert_eq!(ks.rank(), 1);
        // Constant maps: one partition, four ranges.
        assert_eq!(lm.alpha, vec![ratio(1, 1)]);
        let single = pipeline(&["[1133]"]);
        assert_eq!(single.3.lambda, vec![ratio(1, 1)]);
        assert_eq!(omega_from_measure(&single.3, &single.2), t("[1133]").matrix());
    }

    #[test]
    fn leak_is_reported() {
        let (s, _, ks, _) = pipeline(&["[451314]", "[245631]"]);
        let mut dist = vec![Rational::zero(); s.len()];
        dist[0] = ratio(1, 1);
        assert!(matches!(
            measure_from_distribution(&s, &dist, &ks),
            Err(Error::SupportLeak(_))
        ));
    }

    #[test]
    fn omega_agrees_with_abel_limit_of_average() {
        let (_, walk, ks, lm) = pipeline(&["[451314]", "[245631]"]);
        let omega = omega_from_measure(&lm, &ks);
        assert_eq!(omega, abel_limit(&walk.average_matrix()).unwrap());
    }

    #[test]
    fn limit_is_invariant_and_idempotent() {
        let (_, walk, ks, lm) = pipeline(&["[4312]", "[3443]"]);
        assert_eq!(lm.step(&ks, &walk), lm.lambda);
        assert_eq!(lm.convolution_square(&ks), lm.lambda);
    }

    #[test]
    fn non_uniform_weights() {
        let walk = Walk::new(vec![t("[4312]"), t("[3443]")], vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        let s = walk.semigroup().unwrap();
        let ks = KernelStructure::from_semigroup(&s).unwrap();
        let lm = walk_limit(&s, &walk, &ks).unwrap();
        assert!(haar_check(&lm, &ks).uniform);
        assert_eq!(
            omega_from_measure(&lm, &ks),
            abel_limit(&walk.average_matrix()).unwrap()
        );
    }
}
