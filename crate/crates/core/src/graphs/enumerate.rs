use super::{check_even, Configuration};
use crate::error::Result;
use crate::limits::{guard, LIMITS};

const UNSET: u32 = u32::MAX;

/// Every configuration on `n` vertices of degree `d`, each exactly once.
///
/// Refuses `dn` above [`LIMITS`]`.enumerate_max_clones`.
pub fn enumerate_configurations(n: usize, d: usize) -> Result<ConfigurationIter> {
    check_even(n, d)?;
    guard("clone count dn", n * d, LIMITS.enumerate_max_clones)?;
    Ok(ConfigurationIter {
        n,
        d,
        matching: vec![UNSET; n * d],
        stack: Vec::with_capacity(n * d / 2),
        started: false,
        done: false,
    })
}

/// Lexicographic enumeration: the smallest unmatched clone is paired with
/// each larger unmatched clone in turn.
#[derive(Debug, Clone)]
pub struct ConfigurationIter {
    n: usize,
    d: usize,
    matching: Vec<u32>,
    stack: Vec<(u32, u32)>,
    started: bool,
    done: bool,
}

impl ConfigurationIter {
    fn first_unset(&self, from: usize) -> Option<usize> {
        (from..self.matching.len()).find(|&c| self.matching[c] == UNSET)
    }

    fn link(&mut self, a: usize, b: usize) {
        self.matching[a] = b as u32;
        self.matching[b] = a as u32;
        self.stack.push((a as u32, b as u32));
    }

    fn fill(&mut self) {
        while let Some(a) = self.first_unset(0) {
            let b = self.first_unset(a + 1).expect("even clone count");
            self.link(a, b);
        }
    }

    fn advance(&mut self) -> bool {
        while let Some((a, b)) = self.stack.pop() {
            let (a, b) = (a as usize, b as usize);
            self.matching[a] = UNSET;
            self.matching[b] = UNSET;
            if let Some(next) = self.first_unset(b + 1) {
                self.link(a, next);
                self.fill();
                return true;
            }
        }
        false
    }
}

impl Iterator for ConfigurationIter {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill();
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(Configuration::from_raw(self.n, self.d, self.matching.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::count_configurations;
    use crate::Error;
    use std::collections::HashSet;

    #[test]
    fn enumeration_matches_count() {
        for (n, d) in [(2, 1), (2, 3), (4, 2), (4, 1), (3, 2), (6, 2), (4, 3), (2, 6), (12, 1)] {
            let all: Vec<Configuration> = enumerate_configurations(n, d).unwrap().collect();
            let distinct: HashSet<&Configuration> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            assert!(all.iter().all(|c| c.is_valid()));
            let expected = count_configurations(n, d).unwrap();
            assert_eq!(num_bigint::BigUint::from(all.len()), expected, "n={n} d={d}");
        }
    }

    #[test]
    fn enumeration_is_guarded() {
        assert!(matches!(
            enumerate_configurations(6, 3),
            Err(Error::GuardExceeded { limit: 16, got: 18, .. })
        ));
        assert_eq!(enumerate_configurations(8, 2).unwrap().count(), 2_027_025);
    }
}
