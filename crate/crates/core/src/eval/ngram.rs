use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Sparse row: `(feature index, value)` sorted by index.
pub type SparseVector = Vec<(usize, f64)>;

/// Counts of all n-grams with `1 <= n <= n_max`.
pub fn ngram_counts(tokens: &[String], n_max: usize) -> BTreeMap<Vec<String>, usize> {
    let mut counts = BTreeMap::new();
    for n in 1..=n_max {
        for gram in tokens.windows(n) {
            *counts.entry(gram.to_vec()).or_insert(0) += 1;
        }
    }
    counts
}

/// N-gram vocabulary fitted on training documents only.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramVocabulary {
    n_max: usize,
    terms: Vec<Vec<String>>,
    index: HashMap<Vec<String>, usize>,
}

impl NgramVocabulary {
    pub fn fit<'a>(train: impl IntoIterator<Item = &'a [String]>, n_max: usize) -> Result<Self> {
        if !(1..=3).contains(&n_max) {
            return Err(Error::InvalidArgument(format!(
                "n-gram order must be 1..=3, got {n_max}"
            )));
        }
        let mut terms = BTreeSet::new();
        for doc in train {
            terms.extend(ngram_counts(doc, n_max).into_keys());
        }
        if terms.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let terms: Vec<Vec<String>> = terms.into_iter().collect();
        let index = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Ok(Self { n_max, terms, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Display form, tokens joined by `_`.
    pub fn term(&self, i: usize) -> String {
        self.terms[i].join("_")
    }

    /// Counts of in-vocabulary n-grams; unseen n-grams are dropped.
    pub fn transform(&self, tokens: &[String]) -> SparseVector {
        let mut row: SparseVector = ngram_counts(tokens, self.n_max)
            .into_iter()
            .filter_map(|(g, c)| self.index.get(&g).map(|&i| (i, c as f64)))
            .collect();
        row.sort_unstable_by_key(|&(i, _)| i);
        row
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn named(vocab: &NgramVocabulary, row: &SparseVector) -> BTreeMap<String, f64> {
        row.iter().map(|&(i, v)| (vocab.term(i), v)).collect()
    }

    #[test]
    fn unigrams_and_bigrams() {
        let doc = toks("a b a");
        let v1 = NgramVocabulary::fit([doc.as_slice()], 1).unwrap();
        assert_eq!(
            named(&v1, &v1.transform(&doc)),
            BTreeMap::from([("a".into(), 2.0), ("b".into(), 1.0)])
        );
        let v2 = NgramVocabulary::fit([doc.as_slice()], 2).unwrap();
        assert_eq!(
            named(&v2, &v2.transform(&doc)),
            BTreeMap::from([
                ("a".into(), 2.0),
                ("b".into(), 1.0),
                ("a_b".into(), 1.0),
                ("b_a".into(), 1.0)
            ])
        );
    }

    #[test]
    fn unseen_ngrams_are_ignored() {
        let v = NgramVocabulary::fit([toks("a b").as_slice()], 2).unwrap();
        assert!(v.transform(&toks("z y")).is_empty());
        assert_eq!(v.transform(&toks("a z")), vec![(v.index[&toks("a")], 1.0)]);
    }

    #[test]
    fn errors() {
        let empty: Vec<String> = Vec::new();
        assert!(matches!(
            NgramVocabulary::fit([empty.as_slice()], 1),
            Err(Error::EmptyVocabulary)
        ));
        assert!(NgramVocabulary::fit([toks("a").as_slice()], 4).is_err());
    }
}
