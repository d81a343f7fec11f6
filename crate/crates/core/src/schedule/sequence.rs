use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A load-distribution order: position `i` holds the worker that receives
/// load `i`-th. Workers are stored zero-based; the textual form is one-based
/// and dash-joined (`"2-3-1"`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequence(Vec<usize>);

impl Sequence {
    /// Builds a sequence from zero-based worker indices.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::InvalidSequence("empty sequence".into()));
        }
        let mut seen = vec![false; n];
        for &w in &order {
            if w >= n || seen[w] {
                return Err(Error::InvalidSequence(format!(
                    "{:?} is not a permutation of 0..{n}",
                    order
                )));
            }
            seen[w] = true;
        }
        Ok(Sequence(order))
    }

    /// Builds a sequence from one-based worker labels.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        let order = labels
            .iter()
            .map(|&l| {
                l.checked_sub(1)
                    .ok_or_else(|| Error::InvalidSequence("worker labels start at 1".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Sequence::new(order)
    }

    pub fn identity(n: usize) -> Self {
        Sequence((0..n).collect())
    }

    /// Workers sorted by ascending key, ties by index.
    pub fn ascending_by(keys: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
        Sequence(order)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn into_order(self) -> Vec<usize> {
        self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|w| w + 1).collect()
    }

    /// Position of each worker in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (p, &w) in self.0.iter().enumerate() {
            pos[w] = p;
        }
        pos
    }

    /// Lexicographic rank among all permutations of the same length.
    pub fn rank(&self) -> usize {
        let n = self.0.len();
        let mut used = vec![false; n];
        let mut rank = 0;
        for (i, &w) in self.0.iter().enumerate() {
            let smaller = (0..w).filter(|&v| !used[v]).count();
            rank += smaller * factorial(n - 1 - i);
            used[w] = true;
        }
        rank
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{}", w + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .trim()
            .split('-')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidSequence(format!("cannot parse {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Sequence::from_one_based(&labels)
    }
}

impl Serialize for Sequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Sequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `n!` if it fits in `usize`.
pub fn checked_factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

/// Rearranges `order` into the next lexicographic permutation. Returns
/// `false` (leaving `order` sorted ascending) once the last one is passed.
pub fn next_permutation(order: &mut [usize]) -> bool {
    let n = order.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && order[i - 1] >= order[i] {
        i -= 1;
    }
    if i == 0 {
        order.reverse();
        return false;
    }
    let mut j = n - 1;
    while order[j] <= order[i - 1] {
        j -= 1;
    }
    order.swap(i - 1, j);
    order[i..].reverse();
    true
}

/// Every permutation of `n` workers in lexicographic order.
pub fn all_sequences(n: usize) -> Vec<Sequence> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(factorial(n));
    loop {
        out.push(Sequence(order.clone()));
        if !next_permutation(&mut order) {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_are_one_based() {
        let s = Sequence::new(vec![1, 2, 0]).unwrap();
        assert_eq!(s.to_string(), "2-3-1");
        assert_eq!("2-3-1".parse::<Sequence>().unwrap(), s);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Sequence::new(vec![0, 0]).is_err());
        assert!(Sequence::new(vec![0, 2]).is_err());
        assert!(Sequence::new(vec![]).is_err());
        assert!("0-1".parse::<Sequence>().is_err());
        assert!("1-x".parse::<Sequence>().is_err());
    }

    #[test]
    fn enumeration_is_lexicographic_and_ranked() {
        let all = all_sequences(4);
        assert_eq!(all.len(), 24);
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.rank(), i);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ascending_by_breaks_ties_on_index() {
        let s = Sequence::ascending_by(&[3.0, 1.0, 3.0, 0.5]);
        assert_eq!(s.order(), &[3, 1, 0, 2]);
    }
}
