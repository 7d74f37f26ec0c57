//! Integer sequences with per-term provenance.

use serde::Serialize;

use crate::error::{Error, Result};

/// Where a term of a sequence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    /// Greedy separating set of a construction stage.
    Stage { stage: usize },
    /// Bohr member added to a stage above a prescribed floor.
    Padding { stage: usize },
    /// Witness character of index n.
    Witness { n: usize },
    /// Level set of partition interval j.
    Level { interval: usize },
    /// Term of the base sequence kept by a transform.
    Base { index: usize },
    /// Even/odd output of a pairing transform built from base index `pair`.
    Paired { pair: usize, odd: bool },
    /// Realized character of index n.
    Realized { n: usize },
    /// Supplied from outside the library.
    External,
}

/// A strictly increasing sequence of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CharSequence {
    terms: Vec<i64>,
    provenance: Vec<Provenance>,
}

impl CharSequence {
    pub fn new(terms: Vec<i64>, provenance: Vec<Provenance>) -> Result<Self> {
        if terms.len() != provenance.len() {
            return Err(Error::LengthMismatch(terms.len(), provenance.len()));
        }
        if let Some(w) = terms.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(format!("sequence not strictly increasing at {} ≥ {}", w[0], w[1])));
        }
        if terms.first().is_some_and(|&k| k < 0) {
            return Err(Error::Invalid("sequence terms must be nonnegative".into()));
        }
        Ok(CharSequence { terms, provenance })
    }

    /// Sorts and deduplicates; the first provenance seen for a term wins.
    pub fn from_tagged(mut tagged: Vec<(i64, Provenance)>) -> Result<Self> {
        tagged.sort_by_key(|(k, _)| *k);
        tagged.dedup_by_key(|(k, _)| *k);
        let (terms, provenance) = tagged.into_iter().unzip();
        Self::new(terms, provenance)
    }

    pub fn external(terms: Vec<i64>) -> Result<Self> {
        let n = terms.len();
        Self::new(terms, vec![Provenance::External; n])
    }

    pub fn terms(&self) -> &[i64] {
        &self.terms
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Provenance)> + '_ {
        self.terms.iter().copied().zip(self.provenance.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_increasing() {
        assert!(CharSequence::external(vec![1, 3, 3]).is_err());
        assert!(CharSequence::external(vec![-1, 3]).is_err());
        assert!(CharSequence::external(vec![0, 3]).is_ok());
    }

    #[test]
    fn tagged_union_keeps_first_tag() {
        let s = CharSequence::from_tagged(vec![
            (5, Provenance::Stage { stage: 1 }),
            (3, Provenance::Stage { stage: 2 }),
            (5, Provenance::Level { interval: 0 }),
        ])
        .unwrap();
        assert_eq!(s.terms(), &[3, 5]);
        assert_eq!(s.provenance()[1], Provenance::Stage { stage: 1 });
    }
}
