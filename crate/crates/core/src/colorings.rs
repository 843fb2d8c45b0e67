//! Enumeration of the colorings of a regular digraph with the kernel rank
//! of each.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::Graph;
use crate::transform::Transformation;
use crate::walk::Walk;
use crate::zeon::kernel_rank_zeon;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringResult {
    /// Position in the enumeration order.
    pub index: u128,
    pub colors: Vec<String>,
    pub rank: usize,
    pub synchronizing: bool,
}

/// The budget ran out before the enumeration finished.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("budget of {budget} colorings exceeded ({total} in total); {} results kept", partial.len())]
pub struct BudgetExceeded {
    pub budget: u128,
    pub total: u128,
    pub partial: Vec<ColoringResult>,
}

#[derive(Debug, thiserror::Error)]
pub enum EnumerationError {
    #[error(transparent)]
    Input(#[from] Error),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Per vertex, the distinct orderings of its out-neighbour multiset. The
/// `c`-th entry of an ordering is the target under color `c`.
fn vertex_choices(graph: &Graph) -> Result<Vec<Vec<Vec<usize>>>> {
    let d = graph.out_degree()?;
    Ok((0..graph.n())
        .map(|i| {
            let targets = graph.targets(i);
            let mut perms: Vec<Vec<usize>> = targets.into_iter().permutations(d).collect();
            perms.sort();
            perms.dedup();
            perms
        })
        .collect())
}

/// Number of distinct colorings.
pub fn coloring_count(graph: &Graph) -> Result<u128> {
    Ok(vertex_choices(graph)?.iter().map(|c| c.len() as u128).product())
}

fn coloring_at(choices: &[Vec<Vec<usize>>], mut index: u128, d: usize) -> Vec<Transformation> {
    let n = choices.len();
    let mut images = vec![vec![0; n]; d];
    // Last vertex varies fastest.
    for v in (0..n).rev() {
        let k = choices[v].len() as u128;
        let pick = &choices[v][(index % k) as usize];
        index /= k;
        for (c, &t) in pick.iter().enumerate() {
            images[c][v] = t;
        }
    }
    images
        .into_iter()
        .map(|img| Transformation::new(img).expect("targets are vertices"))
        .collect()
}

/// Evaluates colorings in enumeration order, at most `budget` of them,
/// ranks via the zeon hierarchy. With `find_sync` the stream stops after
/// the first synchronizing coloring.
pub fn enumerate_colorings(
    graph: &Graph,
    budget: u128,
    find_sync: bool,
) -> std::result::Result<Vec<ColoringResult>, EnumerationError> {
    let choices = vertex_choices(graph)?;
    let d = graph.out_degree()?;
    let total: u128 = choices.iter().map(|c| c.len() as u128).product();
    let limit = total.min(budget);
    let mut out = Vec::new();
    const CHUNK: u128 = 64;
    let mut start = 0u128;
    while start < limit {
        let end = (start + CHUNK).min(limit);
        let batch: Vec<ColoringResult> = (start..end)
            .into_par_iter()
            .map(|index| {
                let colors = coloring_at(&choices, index, d);
                let walk = Walk::uniform(colors.clone())?;
                let rank = kernel_rank_zeon(&walk)?;
                Ok(ColoringResult {
                    index,
                    colors: colors.iter().map(ToString::to_string).collect(),
                    rank,
                    synchronizing: rank == 1,
                })
            })
            .collect::<Result<_>>()?;
        for r in batch {
            let stop = find_sync && r.synchronizing;
            out.push(r);
            if stop {
                return Ok(out);
            }
        }
        start = end;
    }
    if total > budget {
        return Err(BudgetExceeded {
            budget,
            total,
            partial: out,
        }
        .into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_graph;
    use crate::semigroup::Semigroup;

    fn four() -> Graph {
        parse_graph("0 0 1 1\n0 0 1 1\n1 0 0 1\n0 1 1 0").unwrap()
    }

    #[test]
    fn counts_and_order() {
        assert_eq!(coloring_count(&four()).unwrap(), 16);
        let all = enumerate_colorings(&four(), 100, false).unwrap();
        assert_eq!(all.len(), 16);
        assert!(all.windows(2).all(|w| w[0].index + 1 == w[1].index));
        let known = all
            .iter()
            .find(|r| r.colors == ["[4 3 1 2]", "[3 4 4 3]"])
            .expect("listed");
        let s = Semigroup::generate(&["[4312]".parse().unwrap(), "[3443]".parse().unwrap()]).unwrap();
        assert_eq!(known.rank, s.minimal_rank());
    }

    #[test]
    fn ranks_match_closure() {
        for r in enumerate_colorings(&four(), 100, false).unwrap() {
            let colors: Vec<Transformation> = r.colors.iter().map(|c| c.parse().unwrap()).collect();
            assert_eq!(r.rank, Semigroup::generate(&colors).unwrap().minimal_rank());
        }
    }

    #[test]
    fn budget_zero_is_empty() {
        match enumerate_colorings(&four(), 0, false) {
            Err(EnumerationError::Budget(b)) => {
                assert!(b.partial.is_empty());
                assert_eq!(b.total, 16);
            }
            other => panic!("{other:?}"),
        }
        let part = match enumerate_colorings(&four(), 5, false) {
            Err(EnumerationError::Budget(b)) => b.partial,
            other => panic!("{other:?}"),
        };
        assert_eq!(part.len(), 5);
    }

    #[test]
    fn finds_synchronizing_coloring() {
        // Vertex 1 has a loop and every vertex has an edge into 1.
        let g = parse_graph("1 1 0\n1 0 1\n1 0 1").unwrap();
        let found = enumerate_colorings(&g, 1000, true).unwrap();
        let last = found.last().unwrap();
        assert!(last.synchronizing);
        let colors: Vec<Transformation> = last.colors.iter().map(|c| c.parse().unwrap()).collect();
        assert_eq!(Semigroup::generate(&colors).unwrap().minimal_rank(), 1);
    }

    #[test]
    fn irregular_graph_is_rejected() {
        let g = parse_graph("1 1\n0 1").unwrap();
        assert!(matches!(
            enumerate_colorings(&g, 10, false),
            Err(EnumerationError::Input(Error::NotRegular(_)))
        ));
    }
}
