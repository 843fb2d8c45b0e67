//! Transformations of `{1..n}` and the data attached to them: matrices,
//! kernel partitions and ranges.
//!
//! Points are stored 0-based; text forms are 1-based as in `[4 5 1 3 1 4]`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::rational::Rational;

/// A function on `{0..n}` stored as its image word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transformation {
    image: Vec<usize>,
}

impl Transformation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(Error::Parse("empty transformation".into()));
        }
        if let Some(&bad) = image.iter().find(|&&x| x >= n) {
            return Err(Error::Parse(format!("image point {} outside 1..{n}", bad + 1)));
        }
        Ok(Self { image })
    }

    /// From a 1-based image word, e.g. `&[4, 5, 1, 3, 1, 4]`.
    pub fn from_one_based(word: &[usize]) -> Result<Self> {
        if word.contains(&0) {
            return Err(Error::Parse("points are numbered from 1".into()));
        }
        Self::new(word.iter().map(|x| x - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    /// Interprets a binary stochastic matrix as the function it represents.
    pub fn from_matrix(m: &RationalMatrix) -> Option<Self> {
        if !m.is_square() {
            return None;
        }
        let mut image = Vec::with_capacity(m.rows());
        for i in 0..m.rows() {
            let row = m.row(i);
            let mut target = None;
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if !x.is_one() || target.is_some() {
                    return None;
                }
                target = Some(j);
            }
            image.push(target?);
        }
        Some(Self { image })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    /// `self` then `other`: `i -> other(self(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                op: "compose",
                left: format!("n = {}", self.n()),
                right: format!("n = {}", other.n()),
            });
        }
        Ok(self.then(other))
    }

    /// Unchecked composition for callers that already know `n` agrees.
    pub(crate) fn then(&self, other: &Self) -> Self {
        Self {
            image: self.image.iter().map(|&x| other.image[x]).collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.image.iter().all(|&x| self.image[x] == x)
    }

    pub fn is_permutation(&self) -> bool {
        self.rank() == self.n()
    }

    pub fn matrix(&self) -> RationalMatrix {
        let n = self.n();
        let mut m = RationalMatrix::zeros(n, n);
        for (i, &j) in self.image.iter().enumerate() {
            m[(i, j)] = Rational::one();
        }
        m
    }

    pub fn rank(&self) -> usize {
        let mut seen = vec![false; self.n()];
        self.image
            .iter()
            .filter(|&&x| !std::mem::replace(&mut seen[x], true))
            .count()
    }

    pub fn kernel_partition(&self) -> Partition {
        let n = self.n();
        let mut by_value: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &x) in self.image.iter().enumerate() {
            by_value[x].push(i);
        }
        Partition::from_blocks(by_value.into_iter().filter(|b| !b.is_empty()).collect())
    }

    pub fn range(&self) -> RangeSet {
        let mut elements = self.image.clone();
        elements.sort_unstable();
        elements.dedup();
        RangeSet { elements }
    }

    /// 0-1 indicator of the range.
    pub fn range_state_vector(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.n()];
        for &x in &self.image {
            v[x] = Rational::one();
        }
        v
    }

    pub fn range_diag(&self) -> RationalMatrix {
        RationalMatrix::diag(&self.range_state_vector())
    }

    /// Pushes a row vector forward: `(v f)_j = sum_{f(i) = j} v_i`.
    pub fn push_forward(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.n()];
        for (i, x) in v.iter().enumerate() {
            out[self.image[i]] += x;
        }
        out
    }

    /// The induced map on ordered `level`-tuples, tuples indexed row-major.
    pub fn tensor_power(&self, level: usize) -> Self {
        let n = self.n();
        let size = n.pow(level as u32);
        let image = (0..size)
            .map(|mut idx| {
                let mut digits = vec![0; level];
                for d in digits.iter_mut().rev() {
                    *d = idx % n;
                    idx /= n;
                }
                digits.iter().fold(0, |acc, &d| acc * n + self.image[d])
            })
            .collect();
        Self { image }
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", x + 1)?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Transformation {
    type Err = Error;

    /// Accepts `[451314]` (single digits) or `[4 5 1 3 1 4]`; brackets optional.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .unwrap_or(t)
            .trim();
        let parts: Vec<&str> = inner
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|p| !p.is_empty())
            .collect();
        let word: Vec<usize> = if parts.len() == 1 && parts[0].len() > 1 {
            parts[0]
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Parse(format!("invalid word {t:?}")))?
        } else {
            parts
                .iter()
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("invalid word {t:?}")))?
        };
        Self::from_one_based(&word).map_err(|e| Error::Parse(format!("{t:?}: {e}")))
    }
}

impl Serialize for Transformation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Set partition of `{0..n}` in canonical form: sorted blocks ordered by
/// their minimum element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn from_blocks(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by_key(|b| b[0]);
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, i: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&i).is_ok())
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Self) -> bool {
        self.blocks.iter().all(|b| {
            other
                .block_of(b[0])
                .is_some_and(|k| b.iter().all(|x| other.blocks[k].binary_search(x).is_ok()))
        })
    }

    /// 0-1 co-membership matrix: `(i, j) = 1` iff `i`, `j` share a block.
    pub fn co_membership(&self, n: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(n, n);
        for b in &self.blocks {
            for &i in b {
                for &j in b {
                    m[(i, j)] = Rational::one();
                }
            }
        }
        m
    }

    pub fn sum_of_squared_block_sizes(&self) -> usize {
        self.blocks.iter().map(|b| b.len() * b.len()).sum()
    }

    /// A set meets every block exactly once.
    pub fn is_cross_section(&self, set: &[usize]) -> bool {
        set.len() == self.blocks.len() && {
            let mut hit = vec![false; self.blocks.len()];
            set.iter().all(|&x| match self.block_of(x) {
                Some(k) => !std::mem::replace(&mut hit[k], true),
                None => false,
            })
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", set_text(b))?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(
            self.blocks
                .iter()
                .map(|b| b.iter().map(|x| x + 1).collect::<Vec<_>>()),
        )
    }
}

/// Sorted image set of a transformation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RangeSet {
    elements: Vec<usize>,
}

impl RangeSet {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.elements.binary_search(&i).is_ok()
    }

    pub fn state_vector(&self, n: usize) -> Vec<Rational> {
        (0..n)
            .map(|i| {
                if self.contains(i) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    }

    pub fn diag(&self, n: usize) -> RationalMatrix {
        RationalMatrix::diag(&self.state_vector(n))
    }
}

impl fmt::Display for RangeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", set_text(&self.elements))
    }
}

impl fmt::Debug for RangeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RangeSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.elements.iter().map(|x| x + 1))
    }
}

fn set_text(items: &[usize]) -> String {
    let inner: Vec<String> = items.iter().map(|x| (x + 1).to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn t(s: &str) -> Transformation {
        s.parse().unwrap()
    }

    #[test]
    fn compose_follows_right_action() {
        // i -> B(R(i)) with R = [4312], B = [3443]
        assert_eq!(t("[4312]").compose(&t("[3443]")).unwrap(), t("[3434]"));
        let f = t("[451314]");
        assert_eq!(f.compose(&Transformation::identity(6)).unwrap(), f);
        assert!(f.compose(&t("[1]")).is_err());
    }

    #[test]
    fn compose_matches_matrix_product() {
        let (r, b) = (t("[451314]"), t("[245631]"));
        let w = r.compose(&b).unwrap();
        assert_eq!(w.matrix(), &r.matrix() * &b.matrix());
    }

    #[test]
    fn matrix_of_displayed_function() {
        let m = t("[3 3 2 6 2 6]").matrix();
        let expected = RationalMatrix::from_i64(&[
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, 1, 0, 0, 0],
            &[0, 1, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0, 1],
            &[0, 1, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0, 1],
        ]);
        assert_eq!(m, expected);
        assert!(m.row_sums().iter().all(|s| *s == int(1)));
        assert_eq!(Transformation::identity(4).matrix(), RationalMatrix::identity(4));
        assert_eq!(Transformation::from_matrix(&m), Some(t("[332626]")));
    }

    #[test]
    fn ranks() {
        assert_eq!(t("[451314]").rank(), 4);
        assert_eq!(Transformation::identity(5).rank(), 5);
        assert_eq!(t("[223636]").rank(), 3);
    }

    #[test]
    fn kernel_partitions() {
        let p = t("[1 1 3 4 3 4]").kernel_partition();
        assert_eq!(p.to_string(), "{{1, 2}, {3, 5}, {4, 6}}");
        let q = t("[6 2 5 2 5 6]").kernel_partition();
        assert_eq!(q.to_string(), "{{1, 6}, {2, 4}, {3, 5}}");
        assert_eq!(Transformation::identity(3).kernel_partition().len(), 3);
    }

    #[test]
    fn range_data() {
        let f = t("[2 2 3 6 3 6]");
        assert_eq!(f.range().to_string(), "{2, 3, 6}");
        let v: Vec<i64> = vec![0, 1, 1, 0, 0, 1];
        assert_eq!(f.range_state_vector(), v.into_iter().map(int).collect::<Vec<_>>());
        assert_eq!(
            Transformation::identity(3).range_diag(),
            RationalMatrix::identity(3)
        );
    }

    #[test]
    fn parse_forms() {
        assert_eq!(t("[4 5 1 3 1 4]"), t("[451314]"));
        assert_eq!(t("4,5,1,3,1,4"), t("[451314]"));
        assert!("[45131]".parse::<Transformation>().unwrap().n() == 5);
        assert!("[457]".parse::<Transformation>().is_err());
        assert!("[0 1]".parse::<Transformation>().is_err());
        assert!("[a b]".parse::<Transformation>().is_err());
        assert_eq!(t("[10 1 2 3 4 5 6 7 8 9]").to_string(), "[10 1 2 3 4 5 6 7 8 9]");
    }

    #[test]
    fn tensor_power_is_kronecker_power() {
        let f = t("[2 1 2]");
        let m = f.matrix();
        assert_eq!(f.tensor_power(2).matrix(), m.kron(&m));
        assert_eq!(f.tensor_power(1), f);
    }

    #[test]
    fn cross_sections() {
        let p = t("[1 1 3 4 3 4]").kernel_partition();
        assert!(p.is_cross_section(&[0, 2, 3]));
        assert!(!p.is_cross_section(&[0, 1, 3]));
        assert!(!p.is_cross_section(&[0, 2]));
    }
}
