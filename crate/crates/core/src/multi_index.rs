use std::fmt;

/// A multi-index `α ∈ ℕ^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Self {
        assert!(!components.is_empty(), "multi-index needs dimension >= 1");
        MultiIndex(components)
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    /// The unit multi-index `e_i`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut c = vec![0; dim];
        c[axis] = 1;
        Self::new(c)
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`, the sum of the components.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self − other`; requires `other ≤ self`.
    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert!(other.le(self));
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Multinomial binomial `(α β) = Π_i C(α_i, β_i)`.
    pub fn binomial(&self, beta: &MultiIndex) -> f64 {
        self.0.iter().zip(&beta.0).map(|(&a, &b)| binomial(a, b)).product()
    }

    /// All `β ≤ α` in lexicographic order.
    pub fn lower_set(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &a in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=a).map(move |b| {
                        let mut p = prefix.clone();
                        p.push(b);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(MultiIndex).collect()
    }

    /// The multiset of coordinate indices carried by α, e.g. `(2,0,1) → [0,0,2]`.
    pub fn positions(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c)).collect()
    }

    /// Every multi-index of dimension `dim` with order at most `m` (the set `π_m`),
    /// sorted by order and then lexicographically.
    pub fn all_up_to(dim: usize, m: usize) -> Vec<MultiIndex> {
        let mut all = MultiIndex::new(vec![m; dim]).lower_set().into_iter().filter(|a| a.order() <= m).collect::<Vec<_>>();
        all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| b.0.cmp(&a.0)));
        all
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex::new(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_set_and_binomials() {
        let a = MultiIndex::new(vec![2, 1]);
        let lower = a.lower_set();
        assert_eq!(lower.len(), 6);
        let total: f64 = lower.iter().map(|b| a.binomial(b)).sum();
        assert_eq!(total, 8.0); // 2^|α|
    }

    #[test]
    fn pi_m_cardinality() {
        // |π_m| = C(m + d, d)
        assert_eq!(MultiIndex::all_up_to(2, 3).len(), 10);
        assert_eq!(MultiIndex::all_up_to(3, 2).len(), 10);
        assert_eq!(MultiIndex::all_up_to(1, 4).len(), 5);
        assert!(MultiIndex::all_up_to(2, 3)[0].is_zero());
    }

    #[test]
    fn positions_repeat_indices() {
        assert_eq!(MultiIndex::new(vec![2, 0, 1]).positions(), vec![0, 0, 2]);
        assert_eq!(MultiIndex::new(vec![2, 3, 0, 1]).positions().len(), 6);
    }
}
