//! Explicit codebooks, systematic codes and their distance analyses.
//!
//! Coordinates are 0-based throughout the library API. The JSON forms use
//! 1-based coordinates where coordinates appear at all.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u16;

/// Largest supported alphabet; symbols must fit in [`Symbol`].
pub const MAX_ALPHABET: usize = 1 << 16;

/// Size caps enforced on codebooks and on the subset searches run over them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of codewords K.
    pub max_words: usize,
    /// Maximum total number of stored symbols K·n.
    pub max_symbols: usize,
    /// Maximum number of candidate subsets a single repair-set search may visit.
    pub max_subsets: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_words: 1 << 16,
            max_symbols: 1 << 22,
            max_subsets: 1 << 20,
        }
    }
}

/// A finite set of distinct length-`n` words over `{0, …, q − 1}`.
///
/// Words are stored flat and kept in lexicographic order, so iteration order
/// and serialized output are canonical.
#[derive(Clone)]
pub struct Codebook {
    q: usize,
    n: usize,
    symbols: Vec<Symbol>,
    limits: Limits,
}

impl PartialEq for Codebook {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.n == other.n && self.symbols == other.symbols
    }
}

impl Eq for Codebook {}

impl fmt::Debug for Codebook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Codebook")
            .field("q", &self.q)
            .field("n", &self.n)
            .field("len", &self.len())
            .finish()
    }
}

impl Codebook {
    pub fn new(q: usize, n: usize, words: Vec<Vec<Symbol>>) -> Result<Self> {
        Self::with_limits(q, n, words, Limits::default())
    }

    pub fn with_limits(q: usize, n: usize, words: Vec<Vec<Symbol>>, limits: Limits) -> Result<Self> {
        if let Some(w) = words.iter().find(|w| w.len() != n) {
            return Err(Error::Shape(format!("word of length {} in a code of length {n}", w.len())));
        }
        let symbols = words.into_iter().flatten().collect();
        Self::from_flat(q, n, symbols, limits)
    }

    /// Builds a codebook from concatenated words.
    pub fn from_flat(q: usize, n: usize, symbols: Vec<Symbol>, limits: Limits) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&q) {
            return Err(Error::Shape(format!("alphabet size {q} outside 2..={MAX_ALPHABET}")));
        }
        if n == 0 {
            return Err(Error::Shape("block length must be at least 1".into()));
        }
        if !symbols.len().is_multiple_of(n) {
            return Err(Error::Shape("symbol count is not a multiple of n".into()));
        }
        if symbols.is_empty() {
            return Err(Error::EmptyCode);
        }
        let count = symbols.len() / n;
        if count > limits.max_words || symbols.len() > limits.max_symbols {
            return Err(Error::TooLarge(format!(
                "{count} words of length {n} exceed caps of {} words / {} symbols",
                limits.max_words, limits.max_symbols
            )));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s as usize >= q) {
            return Err(Error::SymbolOutOfRange { symbol: s as i64, q });
        }

        let mut order: Vec<usize> = (0..count).collect();
        order.sort_unstable_by(|&a, &b| symbols[a * n..(a + 1) * n].cmp(&symbols[b * n..(b + 1) * n]));
        let mut sorted = Vec::with_capacity(symbols.len());
        for idx in order {
            let w = &symbols[idx * n..(idx + 1) * n];
            if sorted.len() >= n && &sorted[sorted.len() - n..] == w {
                return Err(Error::DuplicateWord(w.to_vec()));
            }
            sorted.extend_from_slice(w);
        }
        Ok(Self { q, n, symbols: sorted, limits })
    }

    /// The whole space Σ^n.
    pub fn full_space(q: usize, n: usize) -> Result<Self> {
        let limits = Limits::default();
        let count = checked_pow(q, n)
            .filter(|&c| c <= limits.max_words)
            .ok_or_else(|| Error::TooLarge(format!("{q}^{n} words")))?;
        let symbols = (0..count).flat_map(|idx| radix_digits(idx, q, n)).collect();
        Self::from_flat(q, n, symbols, limits)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of codewords K.
    pub fn len(&self) -> usize {
        self.symbols.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    /// Returns a copy carrying different limits. Existing words are rechecked.
    pub fn relimit(&self, limits: Limits) -> Result<Self> {
        Self::from_flat(self.q, self.n, self.symbols.clone(), limits)
    }

    pub fn word(&self, idx: usize) -> &[Symbol] {
        &self.symbols[idx * self.n..(idx + 1) * self.n]
    }

    pub fn words(&self) -> impl ExactSizeIterator<Item = &[Symbol]> + Clone + '_ {
        self.symbols.chunks_exact(self.n)
    }

    pub fn index_of(&self, word: &[Symbol]) -> Option<usize> {
        if word.len() != self.n {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.word(mid).cmp(word) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, word: &[Symbol]) -> bool {
        self.index_of(word).is_some()
    }

    /// `log_q K` when it is an integer.
    pub fn dimension(&self) -> Option<usize> {
        exact_log(self.len(), self.q)
    }

    /// The sub-code of words satisfying `keep`.
    pub fn subcode<F: Fn(&[Symbol]) -> bool>(&self, keep: F) -> Result<Self> {
        let symbols: Vec<Symbol> = self.words().filter(|w| keep(w)).flatten().copied().collect();
        Self::from_flat(self.q, self.n, symbols, self.limits)
    }

    /// Restricts every word to `coords` (in the given order). Fails when two
    /// codewords collapse onto the same restricted word.
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        check_coords(coords, self.n)?;
        let symbols = self.words().flat_map(|w| coords.iter().map(move |&c| w[c])).collect();
        Self::from_flat(self.q, coords.len(), symbols, self.limits)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CodebookJson::from_code(self, None)).expect("codebook serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(parse_code_json(text)?.0)
    }
}

/// A codebook of size `q^k` whose first `k` coordinates range over all of
/// Σ^k exactly once.
///
/// Because words are sorted lexicographically, the codeword with information
/// part `x` sits at the index whose base-`q` digits are `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicCode {
    base: Codebook,
    k: usize,
}

impl SystematicCode {
    pub fn code(&self) -> &Codebook {
        &self.base
    }

    pub fn into_code(self) -> Codebook {
        self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn q(&self) -> usize {
        self.base.q
    }

    /// Index of the codeword carrying `info` in its first `k` coordinates.
    pub fn index_of_info(&self, info: &[Symbol]) -> Result<usize> {
        if info.len() != self.k {
            return Err(Error::Shape(format!("expected {} information symbols, got {}", self.k, info.len())));
        }
        info.iter().try_fold(0usize, |acc, &s| {
            if (s as usize) < self.base.q {
                Ok(acc * self.base.q + s as usize)
            } else {
                Err(Error::SymbolOutOfRange { symbol: s as i64, q: self.base.q })
            }
        })
    }

    /// The encoder Σ^k → C.
    pub fn encode(&self, info: &[Symbol]) -> Result<&[Symbol]> {
        Ok(self.base.word(self.index_of_info(info)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CodebookJson::from_code(&self.base, Some(self.k))).expect("codebook serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let (code, k) = parse_code_json(text)?;
        match k.or_else(|| code.dimension()) {
            Some(k) => systematic_from_codebook(code, k),
            None => Err(Error::NonIntegralDimension { size: code.len(), q: code.q }),
        }
    }
}

/// Wire form of a codebook: `{"q":…,"n":…,"codewords":[[…],…]}` plus `"k"` for
/// systematic codes.
#[derive(Debug, Serialize, Deserialize)]
struct CodebookJson {
    q: usize,
    n: usize,
    codewords: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
}

impl CodebookJson {
    fn from_code(code: &Codebook, k: Option<usize>) -> Self {
        Self {
            q: code.q,
            n: code.n,
            codewords: code.words().map(|w| w.iter().map(|&s| s as i64).collect()).collect(),
            k,
        }
    }
}

/// Parses codebook JSON, returning the optional `"k"` field alongside.
pub fn parse_code_json(text: &str) -> Result<(Codebook, Option<usize>)> {
    let raw: CodebookJson =
        serde_json::from_str(text).map_err(|e| Error::Shape(format!("malformed codebook JSON: {e}")))?;
    if !(2..=MAX_ALPHABET).contains(&raw.q) {
        return Err(Error::Shape(format!("alphabet size {} outside 2..={MAX_ALPHABET}", raw.q)));
    }
    let mut symbols = Vec::with_capacity(raw.codewords.len() * raw.n);
    for w in &raw.codewords {
        if w.len() != raw.n {
            return Err(Error::Shape(format!("word of length {} in a code of length {}", w.len(), raw.n)));
        }
        for &s in w {
            if s < 0 || s as usize >= raw.q {
                return Err(Error::SymbolOutOfRange { symbol: s, q: raw.q });
            }
            symbols.push(s as Symbol);
        }
    }
    Ok((Codebook::from_flat(raw.q, raw.n, symbols, Limits::default())?, raw.k))
}

pub fn hamming_distance(x: &[Symbol], y: &[Symbol]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("lengths {} and {} differ", x.len(), y.len())));
    }
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

/// Exact minimum distance over all unordered pairs of codewords.
pub fn min_distance(code: &Codebook) -> Result<usize> {
    let count = code.len();
    if count < 2 {
        return Err(Error::DegenerateCode);
    }
    let best = (0..count - 1)
        .into_par_iter()
        .map(|a| {
            let x = code.word(a);
            let mut best = code.n;
            for b in a + 1..count {
                let y = code.word(b);
                let mut dist = 0;
                for (s, t) in x.iter().zip(y) {
                    if s != t {
                        dist += 1;
                        if dist >= best {
                            break;
                        }
                    }
                }
                if dist < best {
                    best = dist;
                    if best == 1 {
                        break;
                    }
                }
            }
            best
        })
        .min()
        .expect("at least one pair");
    Ok(best)
}

/// Both sides of `n ≥ log_q K + d − 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingletonReport {
    pub lhs: usize,
    pub rhs: f64,
    pub holds: bool,
    pub slack: f64,
    pub d: usize,
    /// `log_q K` when integral; `rhs` is then exact.
    pub dimension: Option<usize>,
}

pub fn check_singleton(code: &Codebook) -> Result<SingletonReport> {
    let d = min_distance(code)?;
    let n = code.n;
    let dimension = code.dimension();
    let log_k = match dimension {
        Some(k) => k as f64,
        None => (code.len() as f64).ln() / (code.q as f64).ln(),
    };
    let rhs = log_k + d as f64 - 1.0;
    // exact form: q^(n - d + 1) >= K
    let holds = d <= n && checked_pow(code.q, n + 1 - d).is_none_or(|cap| cap >= code.len());
    Ok(SingletonReport { lhs: n, rhs, holds, slack: n as f64 - rhs, d, dimension })
}

/// Two codewords that agree on a projection that should be injective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionCollision {
    pub value: Vec<Symbol>,
    pub first: Vec<Symbol>,
    pub second: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub bijective: bool,
    pub counterexample: Option<ProjectionCollision>,
}

/// Checks whether restricting the code to `coords` hits every value of Σ^k
/// exactly once, where `k = |coords| = log_q K`.
pub fn mds_projection_check(code: &Codebook, coords: &[usize]) -> Result<ProjectionReport> {
    let k = code
        .dimension()
        .ok_or(Error::NonIntegralDimension { size: code.len(), q: code.q })?;
    if coords.len() != k {
        return Err(Error::Shape(format!("projection set has {} coordinates, dimension is {k}", coords.len())));
    }
    check_coords(coords, code.n)?;
    let mut seen: Vec<Option<usize>> = vec![None; code.len()];
    for (idx, w) in code.words().enumerate() {
        let key = coords.iter().fold(0usize, |acc, &c| acc * code.q + w[c] as usize);
        if let Some(prev) = seen[key] {
            return Ok(ProjectionReport {
                bijective: false,
                counterexample: Some(ProjectionCollision {
                    value: coords.iter().map(|&c| w[c]).collect(),
                    first: code.word(prev).to_vec(),
                    second: w.to_vec(),
                }),
            });
        }
        seen[key] = Some(idx);
    }
    // K = q^k distinct values out of q^k possible: onto.
    Ok(ProjectionReport { bijective: true, counterexample: None })
}

/// `n = k + d − 1` for a code of size `q^k`.
pub fn is_mds(code: &Codebook) -> Result<bool> {
    let k = code
        .dimension()
        .ok_or(Error::NonIntegralDimension { size: code.len(), q: code.q })?;
    let d = min_distance(code)?;
    Ok(code.n + 1 == k + d)
}

pub fn systematic_from_codebook(code: Codebook, k: usize) -> Result<SystematicCode> {
    if code.dimension() != Some(k) {
        return Err(Error::NonIntegralDimension { size: code.len(), q: code.q });
    }
    if k > code.n {
        return Err(Error::Shape(format!("dimension {k} exceeds block length {}", code.n)));
    }
    // Sorted words with distinct prefixes covering Σ^k must carry prefix = rank.
    for (idx, w) in code.words().enumerate() {
        let prefix = w[..k].iter().fold(0usize, |acc, &s| acc * code.q + s as usize);
        if prefix != idx {
            return Err(Error::NotSystematic { k });
        }
    }
    Ok(SystematicCode { base: code, k })
}

/// Whether the code is closed under coordinate-wise addition modulo `q`.
/// Only meaningful for prime `q`.
pub fn is_additively_closed(code: &Codebook) -> bool {
    let q = code.q;
    (0..code.len()).into_par_iter().all(|a| {
        let x = code.word(a);
        let mut sum = vec![0 as Symbol; code.n];
        code.words().all(|y| {
            for (s, (u, v)) in sum.iter_mut().zip(x.iter().zip(y)) {
                *s = ((*u as usize + *v as usize) % q) as Symbol;
            }
            code.contains(&sum)
        })
    })
}

pub(crate) fn check_coords(coords: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &c in coords {
        if c >= n {
            return Err(Error::Shape(format!("coordinate {c} out of range for length {n}")));
        }
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::Shape(format!("coordinate {c} repeated")));
        }
    }
    Ok(())
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

pub(crate) fn exact_log(value: usize, base: usize) -> Option<usize> {
    let mut acc = 1usize;
    let mut k = 0;
    while acc < value {
        acc = acc.checked_mul(base)?;
        k += 1;
    }
    (acc == value).then_some(k)
}

/// Base-`q` digits of `idx`, most significant first, padded to `len`.
pub(crate) fn radix_digits(mut idx: usize, q: usize, len: usize) -> Vec<Symbol> {
    let mut digits = vec![0; len];
    for slot in digits.iter_mut().rev() {
        *slot = (idx % q) as Symbol;
        idx /= q;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity_code() -> Codebook {
        Codebook::new(2, 3, vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&[0, 0, 0], &[0, 0, 0]), Ok(0));
        assert_eq!(hamming_distance(&[0, 1, 2], &[0, 2, 1]), Ok(2));
        assert_eq!(hamming_distance(&[0; 7], &[1; 7]), Ok(7));
        assert!(matches!(hamming_distance(&[0, 1], &[0]), Err(Error::Shape(_))));
    }

    #[test]
    fn min_distance_examples() {
        let rep = Codebook::new(2, 3, vec![vec![0, 0, 0], vec![1, 1, 1]]).unwrap();
        assert_eq!(min_distance(&rep), Ok(3));
        assert_eq!(min_distance(&Codebook::full_space(3, 3).unwrap()), Ok(1));
        let single = Codebook::new(2, 3, vec![vec![0, 1, 0]]).unwrap();
        assert_eq!(min_distance(&single), Err(Error::DegenerateCode));
    }

    #[test]
    fn construction_validates_words() {
        assert_eq!(
            Codebook::new(2, 2, vec![vec![0, 1], vec![0, 1]]),
            Err(Error::DuplicateWord(vec![0, 1]))
        );
        assert_eq!(
            Codebook::new(2, 2, vec![vec![0, 2]]),
            Err(Error::SymbolOutOfRange { symbol: 2, q: 2 })
        );
        assert_eq!(Codebook::new(2, 2, vec![]), Err(Error::EmptyCode));
        assert!(matches!(Codebook::new(2, 2, vec![vec![0]]), Err(Error::Shape(_))));
        let tight = Limits { max_words: 3, ..Limits::default() };
        assert!(matches!(
            Codebook::with_limits(2, 3, parity_code().words().map(<[_]>::to_vec).collect(), tight),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn words_are_sorted_and_searchable() {
        let c = Codebook::new(2, 3, vec![vec![1, 1, 0], vec![0, 0, 0], vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(c, parity_code());
        assert_eq!(c.word(0), &[0, 0, 0]);
        assert_eq!(c.index_of(&[1, 0, 1]), Some(2));
        assert!(!c.contains(&[1, 1, 1]));
    }

    #[test]
    fn singleton_examples() {
        let rep = Codebook::new(2, 3, vec![vec![0, 0, 0], vec![1, 1, 1]]).unwrap();
        let report = check_singleton(&rep).unwrap();
        assert_eq!((report.lhs, report.rhs, report.holds, report.slack), (3, 3.0, true, 0.0));

        // three words: log_2 3 is irrational, bound still exact via q^(n-d+1) >= K
        let three = Codebook::new(2, 2, vec![vec![0, 0], vec![0, 1], vec![1, 0]]).unwrap();
        let report = check_singleton(&three).unwrap();
        assert!(report.holds);
        assert_eq!(report.dimension, None);
        assert!((report.slack - (2.0 - 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn projection_examples() {
        let c = parity_code();
        assert!(mds_projection_check(&c, &[0, 2]).unwrap().bijective);
        let and = Codebook::new(2, 3, vec![vec![0, 0, 0], vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 1]]).unwrap();
        let report = mds_projection_check(&and, &[1, 2]).unwrap();
        assert!(!report.bijective);
        let ce = report.counterexample.unwrap();
        assert_eq!(ce.value, vec![0, 0]);
        assert_eq!((ce.first, ce.second), (vec![0, 0, 0], vec![1, 0, 0]));
        assert!(matches!(mds_projection_check(&c, &[0]), Err(Error::Shape(_))));
    }

    #[test]
    fn mds_examples() {
        assert_eq!(is_mds(&parity_code()), Ok(true));
        assert_eq!(is_mds(&Codebook::full_space(3, 2).unwrap()), Ok(true));
        let three = Codebook::new(2, 2, vec![vec![0, 0], vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(is_mds(&three), Err(Error::NonIntegralDimension { size: 3, q: 2 }));
    }

    #[test]
    fn systematic_examples() {
        let s = systematic_from_codebook(parity_code(), 2).unwrap();
        assert_eq!(s.encode(&[1, 0]).unwrap(), &[1, 0, 1]);
        let constant = Codebook::new(2, 3, vec![vec![0, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(systematic_from_codebook(constant, 1), Err(Error::NotSystematic { k: 1 }));
        assert_eq!(
            systematic_from_codebook(parity_code(), 1),
            Err(Error::NonIntegralDimension { size: 4, q: 2 })
        );
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let s = systematic_from_codebook(parity_code(), 2).unwrap();
        assert_eq!(
            s.to_json(),
            r#"{"q":2,"n":3,"codewords":[[0,0,0],[0,1,1],[1,0,1],[1,1,0]],"k":2}"#
        );
        assert_eq!(SystematicCode::from_json(&s.to_json()).unwrap(), s);
        assert_eq!(Codebook::from_json(&s.to_json()).unwrap(), parity_code());

        let neg = r#"{"q":2,"n":1,"codewords":[[-1]]}"#;
        assert_eq!(Codebook::from_json(neg), Err(Error::SymbolOutOfRange { symbol: -1, q: 2 }));
        let dup = r#"{"q":2,"n":1,"codewords":[[1],[1]]}"#;
        assert_eq!(Codebook::from_json(dup), Err(Error::DuplicateWord(vec![1])));
        assert!(matches!(Codebook::from_json("[1,2"), Err(Error::Shape(_))));
    }

    #[test]
    fn additive_closure() {
        assert!(is_additively_closed(&parity_code()));
        let twisted = Codebook::new(2, 3, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 1]]).unwrap();
        assert!(!is_additively_closed(&twisted));
    }

    #[test]
    fn projection_rejects_collisions() {
        let c = parity_code();
        assert!(c.project(&[0, 1]).is_ok());
        assert!(matches!(c.project(&[0]), Err(Error::DuplicateWord(_))));
    }
}
