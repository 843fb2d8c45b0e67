//! Abel limit of a single initial distribution under a sparse stochastic
//! chain, `mu * Omega`, without forming the dense `Omega`.
//!
//! Closed communicating classes each carry their stationary distribution;
//! the mass reaching a class is obtained by pushing `mu` through the
//! transient classes in topological order. Transient classes that can only
//! drain into one closed class forward their inflow without a solve.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::elim::solve;
use super::RationalMatrix;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Row-sparse stochastic matrix.
#[derive(Debug, Clone)]
pub struct SparseChain {
    transitions: Vec<Vec<(usize, Rational)>>,
}

impl SparseChain {
    /// Duplicate targets within a row are merged; every row must sum to one.
    pub fn new(transitions: Vec<Vec<(usize, Rational)>>) -> Result<Self> {
        let n = transitions.len();
        let mut merged = Vec::with_capacity(n);
        for (i, row) in transitions.into_iter().enumerate() {
            let mut acc: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
            for (j, p) in row {
                if j >= n {
                    return Err(Error::IndexOutOfRange(format!("state {j} of {n}")));
                }
                if p < Rational::zero() {
                    return Err(Error::NotStochastic(format!("negative entry in row {i}")));
                }
                if p.is_zero() {
                    continue;
                }
                match acc.iter_mut().find(|(k, _)| *k == j) {
                    Some((_, q)) => *q += p,
                    None => acc.push((j, p)),
                }
            }
            let total: Rational = acc.iter().map(|(_, p)| p).sum();
            if !total.is_one() {
                return Err(Error::NotStochastic(format!("row {i} sums to {total}")));
            }
            acc.sort_by_key(|(j, _)| *j);
            merged.push(acc);
        }
        Ok(Self { transitions: merged })
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.transitions[i]
    }

    pub fn to_dense(&self) -> RationalMatrix {
        let n = self.len();
        let mut m = RationalMatrix::zeros(n, n);
        for (i, row) in self.transitions.iter().enumerate() {
            for (j, p) in row {
                m[(i, *j)] = p.clone();
            }
        }
        m
    }

    /// `v P` for a row vector `v`.
    pub fn step(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.len()];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, p) in &self.transitions[i] {
                out[*j] += x * p;
            }
        }
        out
    }

    /// Communicating classes in topological order (sources first), with a
    /// flag marking the closed ones.
    pub fn classes(&self) -> Vec<(Vec<usize>, bool)> {
        let n = self.len();
        let mut g = DiGraph::<(), ()>::with_capacity(n, n * 2);
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for (i, row) in self.transitions.iter().enumerate() {
            for (j, _) in row {
                g.add_edge(nodes[i], nodes[*j], ());
            }
        }
        let mut sccs = tarjan_scc(&g);
        sccs.reverse();
        let mut class_of = vec![0usize; n];
        for (c, scc) in sccs.iter().enumerate() {
            for v in scc {
                class_of[v.index()] = c;
            }
        }
        sccs.into_iter()
            .enumerate()
            .map(|(c, scc)| {
                let mut members: Vec<usize> = scc.into_iter().map(|v| v.index()).collect();
                members.sort_unstable();
                let closed = members
                    .iter()
                    .all(|&i| self.transitions[i].iter().all(|(j, _)| class_of[*j] == c));
                (members, closed)
            })
            .collect()
    }

    /// `mu * Omega` where `Omega` is the Abel (equivalently Cesaro) limit of
    /// the powers of this chain.
    pub fn limit_distribution(&self, initial: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.len();
        if initial.len() != n {
            return Err(Error::DimensionMismatch {
                op: "limit_distribution",
                left: format!("{n} states"),
                right: format!("distribution of length {}", initial.len()),
            });
        }
        let classes = self.classes();
        let mut class_of = vec![0usize; n];
        for (c, (members, _)) in classes.iter().enumerate() {
            for &i in members {
                class_of[i] = c;
            }
        }
        // Closed classes reachable from each class; successors come later
        // in topological order, so sweep backwards.
        let mut reach: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); classes.len()];
        for c in (0..classes.len()).rev() {
            let (members, closed) = &classes[c];
            if *closed {
                reach[c].insert(c);
                continue;
            }
            let mut acc = BTreeSet::new();
            for &i in members {
                for (j, _) in &self.transitions[i] {
                    let d = class_of[*j];
                    if d != c {
                        acc.extend(reach[d].iter().copied());
                    }
                }
            }
            reach[c] = acc;
        }

        let mut inflow = initial.to_vec();
        let mut result = vec![Rational::zero(); n];
        for (c, (members, closed)) in classes.iter().enumerate() {
            let mass: Rational = members.iter().map(|&i| &inflow[i]).sum();
            if mass.is_zero() {
                continue;
            }
            if *closed {
                let stationary = self.stationary(members)?;
                for (&i, p) in members.iter().zip(stationary) {
                    result[i] = &mass * p;
                }
                continue;
            }
            if reach[c].len() == 1 {
                let target = *reach[c].iter().next().expect("one reachable class");
                let entry = classes[target].0[0];
                inflow[entry] += mass;
                continue;
            }
            let visits = self.expected_visits(members, &inflow)?;
            for (&i, v) in members.iter().zip(&visits) {
                for (j, p) in &self.transitions[i] {
                    if class_of[*j] != c {
                        inflow[*j] += v * p;
                    }
                }
            }
        }
        Ok(result)
    }

    /// The full limit matrix `Omega`: row `i` is the limit distribution
    /// started from state `i`. Absorption probabilities into each closed
    /// class are solved once per transient class, sinks first.
    pub fn limit_matrix(&self) -> Result<RationalMatrix> {
        let n = self.len();
        let classes = self.classes();
        let mut class_of = vec![0usize; n];
        for (c, (members, _)) in classes.iter().enumerate() {
            for &i in members {
                class_of[i] = c;
            }
        }
        let closed: Vec<usize> = (0..classes.len()).filter(|&c| classes[c].1).collect();
        let slot = |c: usize| closed.binary_search(&c).expect("closed class");
        // absorb[i][s]: probability that state i ends in closed class closed[s].
        let mut absorb = vec![vec![Rational::zero(); closed.len()]; n];
        let mut stationary = vec![Vec::new(); closed.len()];
        for c in (0..classes.len()).rev() {
            let (members, is_closed) = &classes[c];
            if *is_closed {
                stationary[slot(c)] = self.stationary(members)?;
                for &i in members {
                    absorb[i][slot(c)] = Rational::one();
                }
                continue;
            }
            // h (restricted to the class) = (I - Q)^{-1} b, b_i = sum_{j outside} P_ij h_j.
            let s = members.len();
            let local = local_index(members);
            let mut q = RationalMatrix::identity(s);
            let mut b = RationalMatrix::zeros(s, closed.len());
            for (a, &i) in members.iter().enumerate() {
                for (j, p) in &self.transitions[i] {
                    if class_of[*j] == c {
                        q[(a, local(*j))] -= p;
                    } else {
                        for (t, h) in absorb[*j].iter().enumerate() {
                            if !h.is_zero() {
                                b[(a, t)] += p * h;
                            }
                        }
                    }
                }
            }
            let h = if s == 1 {
                b.scale(&(Rational::one() / &q[(0, 0)]))
            } else {
                q.inverse()?.try_mul(&b)?
            };
            for (a, &i) in members.iter().enumerate() {
                absorb[i] = h.row(a).to_vec();
            }
        }
        let mut omega = RationalMatrix::zeros(n, n);
        for (i, row) in absorb.iter().enumerate() {
            for (t, h) in row.iter().enumerate() {
                if h.is_zero() {
                    continue;
                }
                for (&j, p) in classes[closed[t]].0.iter().zip(&stationary[t]) {
                    omega[(i, j)] = h * p;
                }
            }
        }
        Ok(omega)
    }

    /// Stationary distribution of an irreducible closed class.
    fn stationary(&self, members: &[usize]) -> Result<Vec<Rational>> {
        let s = members.len();
        if s == 1 {
            return Ok(vec![Rational::one()]);
        }
        let local = local_index(members);
        // Doubly stochastic classes (group-like kernels) are uniform; no
        // elimination needed.
        let mut col = vec![Rational::zero(); s];
        for &i in members {
            for (j, p) in &self.transitions[i] {
                col[local(*j)] += p;
            }
        }
        if col.iter().all(|c| c.is_one()) {
            return Ok(vec![Rational::new(1.into(), (s as i64).into()); s]);
        }
        // Rows 0..s: (I - P_C)^T pi^T = 0; row s: sum pi = 1.
        let mut m = RationalMatrix::zeros(s + 1, s);
        for (a, &i) in members.iter().enumerate() {
            m[(a, a)] += Rational::one();
            for (j, p) in &self.transitions[i] {
                let b = local(*j);
                m[(b, a)] -= p;
            }
            m[(s, a)] = Rational::one();
        }
        let mut rhs = vec![Rational::zero(); s + 1];
        rhs[s] = Rational::one();
        solve(&m, &rhs)
    }

    /// Solves `v (I - Q_C) = a` for the expected visits within a transient
    /// class given its inflow `a`.
    fn expected_visits(&self, members: &[usize], inflow: &[Rational]) -> Result<Vec<Rational>> {
        let s = members.len();
        let local = local_index(members);
        let mut m = RationalMatrix::identity(s);
        for (a, &i) in members.iter().enumerate() {
            for (j, p) in &self.transitions[i] {
                if let Ok(b) = members.binary_search(j) {
                    debug_assert_eq!(b, local(*j));
                    m[(b, a)] -= p;
                }
            }
        }
        let rhs: Vec<Rational> = members.iter().map(|&i| inflow[i].clone()).collect();
        solve(&m, &rhs)
    }
}

fn local_index(members: &[usize]) -> impl Fn(usize) -> usize + '_ {
    move |j| members.binary_search(&j).expect("state belongs to class")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::abel_limit;
    use crate::rational::{int, ratio};

    fn chain(rows: Vec<Vec<(usize, Rational)>>) -> SparseChain {
        SparseChain::new(rows).unwrap()
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        assert!(SparseChain::new(vec![vec![(0, ratio(1, 2))]]).is_err());
        assert!(SparseChain::new(vec![vec![(3, int(1))]]).is_err());
    }

    #[test]
    fn splits_mass_between_two_absorbing_classes() {
        // 0 -> 1 or 2 equally; 1 and 2 absorbing; 3 <-> 4 transient loop into 1.
        let c = chain(vec![
            vec![(1, ratio(1, 2)), (2, ratio(1, 2))],
            vec![(1, int(1))],
            vec![(2, int(1))],
        ]);
        let lim = c.limit_distribution(&[int(1), int(0), int(0)]).unwrap();
        assert_eq!(lim, vec![int(0), ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn doubly_stochastic_class_is_uniform() {
        // a 3-cycle mixed with a swap; uniform must also be what elimination gives
        let c = chain(vec![
            vec![(1, ratio(1, 2)), (0, ratio(1, 2))],
            vec![(2, ratio(1, 2)), (1, ratio(1, 2))],
            vec![(0, int(1))],
        ]);
        // column 0 sums to 3/2, so this one goes through elimination
        let lim = c.limit_distribution(&[int(1), int(0), int(0)]).unwrap();
        assert_eq!(lim, vec![ratio(2, 5), ratio(2, 5), ratio(1, 5)]);
        let d = chain(vec![
            vec![(1, ratio(1, 2)), (2, ratio(1, 2))],
            vec![(2, ratio(1, 2)), (0, ratio(1, 2))],
            vec![(0, ratio(1, 2)), (1, ratio(1, 2))],
        ]);
        let lim = d.limit_distribution(&[int(1), int(0), int(0)]).unwrap();
        assert_eq!(lim, vec![ratio(1, 3); 3]);
        assert_eq!(d.limit_matrix().unwrap(), abel_limit(&d.to_dense()).unwrap());
    }

    #[test]
    fn matches_dense_abel_limit() {
        // transient cycle {0,1} leaking to periodic closed class {2,3} and to 4.
        let c = chain(vec![
            vec![(1, ratio(1, 2)), (2, ratio(1, 4)), (4, ratio(1, 4))],
            vec![(0, ratio(2, 3)), (3, ratio(1, 3))],
            vec![(3, int(1))],
            vec![(2, int(1))],
            vec![(4, int(1))],
        ]);
        let omega = abel_limit(&c.to_dense()).unwrap();
        let mu = vec![ratio(1, 3), ratio(2, 3), int(0), int(0), int(0)];
        assert_eq!(c.limit_distribution(&mu).unwrap(), omega.left_apply(&mu));
        let lim = c.limit_distribution(&mu).unwrap();
        assert_eq!(c.step(&lim), lim);
        assert_eq!(c.limit_matrix().unwrap(), omega);
    }
}
