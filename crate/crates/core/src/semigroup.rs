//! Generated transformation semigroups, their kernels and Rees structure.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::transform::{Partition, RangeSet, Transformation};

/// The semigroup generated by a list of transformations, with a shortest
/// generator word for every element.
#[derive(Debug, Clone)]
pub struct Semigroup {
    n: usize,
    generators: Vec<Transformation>,
    elements: Vec<Transformation>,
    index: HashMap<Transformation, usize>,
    witness: Vec<Vec<usize>>,
}

impl Semigroup {
    /// Breadth-first closure under right multiplication by the generators.
    pub fn generate(generators: &[Transformation]) -> Result<Self> {
        Self::generate_bounded(generators, usize::MAX)
    }

    /// As [`Semigroup::generate`], failing with `SizeCap` past `cap` elements.
    pub fn generate_bounded(generators: &[Transformation], cap: usize) -> Result<Self> {
        let first = generators.first().ok_or(Error::EmptyGenerators)?;
        let n = first.n();
        if let Some(g) = generators.iter().find(|g| g.n() != n) {
            return Err(Error::DimensionMismatch {
                op: "generate",
                left: format!("n = {n}"),
                right: format!("n = {}", g.n()),
            });
        }
        let mut s = Self {
            n,
            generators: generators.to_vec(),
            elements: Vec::new(),
            index: HashMap::new(),
            witness: Vec::new(),
        };
        let mut queue = VecDeque::new();
        for (i, g) in generators.iter().enumerate() {
            if s.insert(g.clone(), vec![i], cap)? {
                queue.push_back(s.elements.len() - 1);
            }
        }
        while let Some(at) = queue.pop_front() {
            for (i, g) in generators.iter().enumerate() {
                let next = s.elements[at].then(g);
                if s.index.contains_key(&next) {
                    continue;
                }
                let mut word = s.witness[at].clone();
                word.push(i);
                s.insert(next, word, cap)?;
                queue.push_back(s.elements.len() - 1);
            }
        }
        Ok(s)
    }

    fn insert(&mut self, t: Transformation, word: Vec<usize>, cap: usize) -> Result<bool> {
        if self.index.contains_key(&t) {
            return Ok(false);
        }
        if self.elements.len() >= cap {
            return Err(Error::SizeCap {
                size: self.elements.len() + 1,
                cap,
            });
        }
        self.index.insert(t.clone(), self.elements.len());
        self.elements.push(t);
        self.witness.push(word);
        Ok(true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Transformation] {
        &self.generators
    }

    /// Elements in discovery order (shortest words first).
    pub fn elements(&self) -> &[Transformation] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, t: &Transformation) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn contains(&self, t: &Transformation) -> bool {
        self.index.contains_key(t)
    }

    /// Shortest generator word (0-based generator indices) producing `t`.
    pub fn witness(&self, t: &Transformation) -> Option<&[usize]> {
        self.index_of(t).map(|i| self.witness[i].as_slice())
    }

    pub fn evaluate(&self, word: &[usize]) -> Option<Transformation> {
        let (first, rest) = word.split_first()?;
        let mut t = self.generators.get(*first)?.clone();
        for &g in rest {
            t = t.then(self.generators.get(g)?);
        }
        Some(t)
    }

    pub fn minimal_rank(&self) -> usize {
        self.elements.iter().map(Transformation::rank).min().unwrap_or(0)
    }

    /// Elements of minimal rank, sorted by image word.
    pub fn kernel(&self) -> Vec<Transformation> {
        let r = self.minimal_rank();
        let mut k: Vec<Transformation> = self.elements.iter().filter(|t| t.rank() == r).cloned().collect();
        k.sort();
        k
    }

    /// `S K S ⊆ K`, checked through the generators.
    pub fn is_two_sided_ideal(&self, subset: &[Transformation]) -> bool {
        let set: std::collections::HashSet<&Transformation> = subset.iter().collect();
        subset.iter().all(|k| {
            self.generators
                .iter()
                .all(|g| set.contains(&g.then(k)) && set.contains(&k.then(g)))
        })
    }
}

/// Multiplication table of one local group, indices into `elements`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    pub elements: Vec<Transformation>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

/// Rees data of a completely simple kernel: rows are kernel partitions,
/// columns are ranges, each cell a local group with one idempotent.
#[derive(Debug, Clone)]
pub struct KernelStructure {
    n: usize,
    rank: usize,
    elements: Vec<Transformation>,
    index: HashMap<Transformation, usize>,
    partitions: Vec<Partition>,
    ranges: Vec<RangeSet>,
    row_of: Vec<usize>,
    col_of: Vec<usize>,
    cells: Vec<Vec<Vec<usize>>>,
    idempotents: Vec<Vec<usize>>,
    group_order: usize,
}

impl KernelStructure {
    /// Builds the grid from a kernel given as a set of minimal-rank elements.
    pub fn new(kernel: &[Transformation]) -> Result<Self> {
        let first = kernel
            .first()
            .ok_or_else(|| Error::StructureViolation("empty kernel".into()))?;
        let n = first.n();
        let rank = first.rank();
        let mut elements = kernel.to_vec();
        elements.sort();
        elements.dedup();
        if let Some(k) = elements.iter().find(|k| k.n() != n || k.rank() != rank) {
            return Err(Error::StructureViolation(format!(
                "{k} does not share rank {rank} on {n} points"
            )));
        }
        let mut partitions: Vec<Partition> = elements.iter().map(Transformation::kernel_partition).collect();
        partitions.sort();
        partitions.dedup();
        let mut ranges: Vec<RangeSet> = elements.iter().map(Transformation::range).collect();
        ranges.sort();
        ranges.dedup();
        let row_of: Vec<usize> = elements
            .iter()
            .map(|k| partitions.binary_search(&k.kernel_partition()).expect("listed"))
            .collect();
        let col_of: Vec<usize> = elements
            .iter()
            .map(|k| ranges.binary_search(&k.range()).expect("listed"))
            .collect();
        let mut cells = vec![vec![Vec::new(); ranges.len()]; partitions.len()];
        for (i, (&r, &c)) in row_of.iter().zip(&col_of).enumerate() {
            cells[r][c].push(i);
        }
        let group_order = cells[0][0].len();
        let mut idempotents = vec![vec![0; ranges.len()]; partitions.len()];
        for (r, row) in cells.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if cell.len() != group_order {
                    return Err(Error::StructureViolation(format!(
                        "cell ({}, {}) has {} elements, expected {group_order}",
                        r + 1,
                        c + 1,
                        cell.len()
                    )));
                }
                let idem: Vec<usize> = cell
                    .iter()
                    .copied()
                    .filter(|&i| elements[i].is_idempotent())
                    .collect();
                if idem.len() != 1 {
                    return Err(Error::StructureViolation(format!(
                        "cell ({}, {}) has {} idempotents",
                        r + 1,
                        c + 1,
                        idem.len()
                    )));
                }
                idempotents[r][c] = idem[0];
            }
        }
        let index = elements.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        Ok(Self {
            n,
            rank,
            elements,
            index,
            partitions,
            ranges,
            row_of,
            col_of,
            cells,
            idempotents,
            group_order,
        })
    }

    pub fn from_semigroup(s: &Semigroup) -> Result<Self> {
        Self::new(&s.kernel())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn elements(&self) -> &[Transformation] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, k: &Transformation) -> Option<usize> {
        self.index.get(k).copied()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn ranges(&self) -> &[RangeSet] {
        &self.ranges
    }

    pub fn row_count(&self) -> usize {
        self.partitions.len()
    }

    pub fn col_count(&self) -> usize {
        self.ranges.len()
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn row_of(&self, element: usize) -> usize {
        self.row_of[element]
    }

    pub fn col_of(&self, element: usize) -> usize {
        self.col_of[element]
    }

    /// Element indices of the local group at `(row, col)`.
    pub fn cell(&self, row: usize, col: usize) -> &[usize] {
        &self.cells[row][col]
    }

    pub fn idempotent(&self, row: usize, col: usize) -> &Transformation {
        &self.elements[self.idempotents[row][col]]
    }

    /// Grid of idempotents, rows by partition and columns by range.
    pub fn idempotent_grid(&self) -> Vec<Vec<Transformation>> {
        self.idempotents
            .iter()
            .map(|row| row.iter().map(|&i| self.elements[i].clone()).collect())
            .collect()
    }

    fn check_cell(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.row_count() || col >= self.col_count() {
            return Err(Error::IndexOutOfRange(format!(
                "cell ({row}, {col}) in a {}x{} grid",
                self.row_count(),
                self.col_count()
            )));
        }
        Ok(())
    }

    /// Base idempotent of the Rees presentation: cell (first row, first col).
    pub fn base_idempotent(&self) -> &Transformation {
        self.idempotent(0, 0)
    }

    /// Coordinates `(row, e k e, col)` of a kernel element, `e` the base
    /// idempotent.
    pub fn rees_coordinates(&self, k: &Transformation) -> Result<(usize, Transformation, usize)> {
        let i = self
            .index_of(k)
            .ok_or_else(|| Error::IndexOutOfRange(format!("{k} is not in the kernel")))?;
        let e = self.base_idempotent();
        Ok((self.row_of[i], e.then(k).then(e), self.col_of[i]))
    }

    /// Inverse of [`KernelStructure::rees_coordinates`]: `x g y` with
    /// `x = e_{row,0}`, `y = e_{0,col}`.
    pub fn from_rees(&self, row: usize, g: &Transformation, col: usize) -> Result<Transformation> {
        self.check_cell(row, col)?;
        Ok(self.idempotent(row, 0).then(g).then(self.idempotent(0, col)))
    }

    /// Sandwich function `phi(y, x) = e_{0,y} e_{x,0}`, an element of the
    /// base local group.
    pub fn sandwich(&self, y: usize, x: usize) -> Result<Transformation> {
        self.check_cell(x, y)?;
        Ok(self.idempotent(0, y).then(self.idempotent(x, 0)))
    }

    /// `(x1, g1, y1)(x2, g2, y2) = (x1, g1 phi(y1, x2) g2, y2)`.
    pub fn rees_product(
        &self,
        a: &(usize, Transformation, usize),
        b: &(usize, Transformation, usize),
    ) -> Result<(usize, Transformation, usize)> {
        let phi = self.sandwich(a.2, b.0)?;
        Ok((a.0, a.1.then(&phi).then(&b.1), b.2))
    }

    /// Cayley table of the local group at `(row, col)`, with the group
    /// axioms verified.
    pub fn local_group_multiplication_table(&self, row: usize, col: usize) -> Result<CayleyTable> {
        self.check_cell(row, col)?;
        let members: Vec<Transformation> = self.cells[row][col]
            .iter()
            .map(|&i| self.elements[i].clone())
            .collect();
        let pos: HashMap<&Transformation, usize> = members.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let violation = |what: String| Error::StructureViolation(format!("cell ({row}, {col}): {what}"));
        let mut table = vec![vec![0; members.len()]; members.len()];
        for (a, x) in members.iter().enumerate() {
            for (b, y) in members.iter().enumerate() {
                let p = x.then(y);
                table[a][b] = *pos
                    .get(&p)
                    .ok_or_else(|| violation(format!("{x} * {y} leaves the cell")))?;
            }
        }
        let idem = self.idempotent(row, col);
        let identity = pos[idem];
        for a in 0..members.len() {
            if table[a][identity] != a || table[identity][a] != a {
                return Err(violation(format!("{idem} is not neutral for {}", members[a])));
            }
            if !table[a].contains(&identity) {
                return Err(violation(format!("{} has no inverse", members[a])));
            }
        }
        Ok(CayleyTable {
            elements: members,
            table,
            identity,
        })
    }

    /// Element orders in a local group, `order -> count`.
    pub fn order_profile(&self, row: usize, col: usize) -> Result<BTreeMap<usize, usize>> {
        let t = self.local_group_multiplication_table(row, col)?;
        let mut profile = BTreeMap::new();
        for a in 0..t.elements.len() {
            let (mut p, mut ord) = (a, 1);
            while p != t.identity {
                p = t.table[p][a];
                ord += 1;
            }
            *profile.entry(ord).or_insert(0) += 1;
        }
        Ok(profile)
    }
}
