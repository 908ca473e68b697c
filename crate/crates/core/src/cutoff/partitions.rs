//! Multiset partitions and the multivariate Faà di Bruno formula.
//!
//! For `u: ℝ^d → ℝ` and `g: ℝ → ℝ`,
//!
//! ```text
//! ∂^β (g∘u)(x) = Σ_{π ∈ Π(𝒜)} g^{(|π|)}(u(x)) · Π_{B ∈ π} ∂^B u(x)
//! ```
//!
//! where `𝒜` is the multiset of coordinate indices carried by `β` (each
//! index `i` repeated `β_i` times) and `Π(𝒜)` runs over the partitions of its
//! labelled copies. Repeated indices therefore produce repeated block
//! multisets, which is exactly the multiplicity the formula needs.

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// One partition of `𝒜(β)`: each block is a sorted multiset of coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MultisetPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl MultisetPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Each block as a multi-index of dimension `dim`.
    pub fn block_indices(&self, dim: usize) -> Vec<MultiIndex> {
        self.blocks
            .iter()
            .map(|b| {
                let mut c = vec![0; dim];
                b.iter().for_each(|&i| c[i] += 1);
                MultiIndex::new(c)
            })
            .collect()
    }
}

const CACHED: usize = 8;

/// Set partitions of `{0, …, n−1}` as lists of blocks of element indices,
/// generated by restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

fn cached_set_partitions(n: usize) -> &'static [Vec<Vec<usize>>] {
    static TABLE: OnceLock<Vec<Vec<Vec<Vec<usize>>>>> = OnceLock::new();
    assert!(n < CACHED, "partition order {n} exceeds the supported maximum");
    &TABLE.get_or_init(|| (0..CACHED).map(set_partitions).collect())[n]
}

/// All partitions of the multiset `𝒜(β)` of non-null indices of `β`.
pub fn multiindex_partitions(beta: &MultiIndex) -> Result<Vec<MultisetPartition>> {
    if beta.order() == 0 {
        return Err(Error::invalid("multiset partitions need |β| >= 1"));
    }
    if beta.order() >= CACHED {
        return Err(Error::invalid(format!("|β| = {} is above the supported order", beta.order())));
    }
    let pos = beta.positions();
    Ok(cached_set_partitions(pos.len())
        .iter()
        .map(|p| MultisetPartition {
            blocks: p
                .iter()
                .map(|b| {
                    let mut blk: Vec<usize> = b.iter().map(|&e| pos[e]).collect();
                    blk.sort_unstable();
                    blk
                })
                .collect(),
        })
        .collect())
}

/// `∂^α (g∘u)` given `outer[k] = g^{(k)}(u(x))` for `k ≤ |α|` and a callback
/// returning `∂^B u(x)` for a multiset `B` of coordinate indices.
pub fn compose_partial(outer: &[f64], alpha: &MultiIndex, inner: impl Fn(&[usize]) -> f64) -> f64 {
    if alpha.is_zero() {
        return outer[0];
    }
    let pos = alpha.positions();
    let mut block = Vec::with_capacity(pos.len());
    let mut total = 0.0;
    for partition in cached_set_partitions(pos.len()) {
        let k = partition.len();
        if outer[k] == 0.0 {
            continue;
        }
        let mut prod = outer[k];
        for b in partition {
            block.clear();
            block.extend(b.iter().map(|&e| pos[e]));
            block.sort_unstable();
            prod *= inner(&block);
            if prod == 0.0 {
                break;
            }
        }
        total += prod;
    }
    total
}

/// One collected term of the Faà di Bruno expansion:
/// `count · g^{(outer_order)} · Π ∂^{block} u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainTerm {
    pub outer_order: usize,
    pub blocks: Vec<MultiIndex>,
    pub count: usize,
}

/// The expansion of `∂^α (g∘u)` with identical terms merged.
pub fn chain_rule_terms(alpha: &MultiIndex) -> Result<Vec<ChainTerm>> {
    let mut merged: BTreeMap<(usize, Vec<MultiIndex>), usize> = BTreeMap::new();
    for p in multiindex_partitions(alpha)? {
        let mut blocks = p.block_indices(alpha.dim());
        blocks.sort();
        *merged.entry((p.len(), blocks)).or_default() += 1;
    }
    Ok(merged.into_iter().map(|((outer_order, blocks), count)| ChainTerm { outer_order, blocks, count }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(beta: Vec<usize>) -> usize {
        multiindex_partitions(&MultiIndex::new(beta)).unwrap().len()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(count(vec![1, 1]), 2);
        assert_eq!(count(vec![2, 0]), 2);
        assert_eq!(count(vec![1, 1, 1]), 5);
        // Bell numbers on the labelled copies
        assert_eq!(count(vec![4]), 15);
        assert_eq!(count(vec![2, 3, 0, 1]), 203);
    }

    #[test]
    fn two_two_partition_blocks() {
        let parts = multiindex_partitions(&MultiIndex::new(vec![1, 1])).unwrap();
        let mut blocks: Vec<_> = parts.into_iter().map(|p| p.blocks).collect();
        blocks.sort();
        assert_eq!(blocks, vec![vec![vec![0], vec![1]], vec![vec![0, 1]]]);
    }

    #[test]
    fn blocks_reassemble_the_multiset() {
        let beta = MultiIndex::new(vec![2, 1, 1]);
        for p in multiindex_partitions(&beta).unwrap() {
            let mut all: Vec<usize> = p.blocks.concat();
            all.sort_unstable();
            assert_eq!(all, beta.positions());
        }
    }

    #[test]
    fn zero_order_is_rejected() {
        assert!(multiindex_partitions(&MultiIndex::zero(2)).is_err());
    }

    #[test]
    fn second_order_chain_rule_structure() {
        // (g∘u)'' = g''·(u')² + g'·u''
        let terms = chain_rule_terms(&MultiIndex::new(vec![2])).unwrap();
        assert_eq!(
            terms,
            vec![
                ChainTerm { outer_order: 1, blocks: vec![MultiIndex::new(vec![2])], count: 1 },
                ChainTerm { outer_order: 2, blocks: vec![MultiIndex::new(vec![1]); 2], count: 1 },
            ]
        );
        // third order: g'u''' + 3g''u'u'' + g'''u'^3
        let terms = chain_rule_terms(&MultiIndex::new(vec![3])).unwrap();
        let counts: Vec<(usize, usize)> = terms.iter().map(|t| (t.outer_order, t.count)).collect();
        assert_eq!(counts, vec![(1, 1), (2, 3), (3, 1)]);
    }

    #[test]
    fn compose_matches_closed_form_for_exp_of_product() {
        // g = exp, u = x·y at (0.3, 0.7): ∂x∂y e^{xy} = (1 + xy) e^{xy}
        let (x, y) = (0.3f64, 0.7f64);
        let e = (x * y).exp();
        let outer = [e; 4];
        let inner = |b: &[usize]| match b {
            [0] => y,
            [1] => x,
            [0, 1] => 1.0,
            _ => 0.0,
        };
        let got = compose_partial(&outer, &MultiIndex::new(vec![1, 1]), inner);
        assert!((got - (1.0 + x * y) * e).abs() < 1e-14);
    }
}
