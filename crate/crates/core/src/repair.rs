//! Erasure recovery by codebook scan and local repair through witness sets.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::code::{Codebook, Symbol};
use crate::error::{Error, Result};
use crate::locality::{one_based, LocalityProfile};

/// A received word with erased positions. JSON form: an array with `null`
/// at each erased position, e.g. `[3, null, 0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErasurePattern {
    pub word: Vec<Option<Symbol>>,
}

impl ErasurePattern {
    /// Erases `erased` from a full word.
    pub fn from_word(word: &[Symbol], erased: &[usize]) -> Self {
        let mut word: Vec<Option<Symbol>> = word.iter().copied().map(Some).collect();
        for &c in erased {
            word[c] = None;
        }
        Self { word }
    }

    pub fn erased(&self) -> Vec<usize> {
        self.word.iter().enumerate().filter(|(_, s)| s.is_none()).map(|(c, _)| c).collect()
    }

    fn check(&self, code: &Codebook) -> Result<()> {
        if self.word.len() != code.n() {
            return Err(Error::Shape(format!("pattern length {} for a code of length {}", self.word.len(), code.n())));
        }
        if let Some(s) = self.word.iter().flatten().find(|&&s| s as usize >= code.q()) {
            return Err(Error::SymbolOutOfRange { symbol: *s as i64, q: code.q() });
        }
        Ok(())
    }

    fn matches(&self, w: &[Symbol]) -> bool {
        self.word.iter().zip(w).all(|(p, s)| p.is_none_or(|p| p == *s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Recovery {
    Unique { codeword: Vec<Symbol> },
    Ambiguous { count: usize },
    Inconsistent,
}

/// Scans the codebook for words agreeing with every non-erased symbol.
pub fn recover_erasures(code: &Codebook, pattern: &ErasurePattern) -> Result<Recovery> {
    pattern.check(code)?;
    let mut hits = code.words().filter(|w| pattern.matches(w));
    let first = hits.next();
    let rest = hits.count();
    Ok(match (first, rest) {
        (None, _) => Recovery::Inconsistent,
        (Some(w), 0) => Recovery::Unique { codeword: w.to_vec() },
        (Some(_), more) => Recovery::Ambiguous { count: more + 1 },
    })
}

/// One locally repaired coordinate and the coordinates read to repair it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repaired {
    pub value: Symbol,
    pub accessed: Vec<usize>,
}

impl Serialize for Repaired {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Repaired", 2)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("accessed", &one_based(&self.accessed))?;
        st.end()
    }
}

/// Repairs each erased coordinate from its witness set in `profile`.
///
/// Fails with [`Error::NeedsGlobalRepair`] when a witness set is missing or
/// itself contains an erasure.
pub fn local_repair(
    code: &Codebook,
    pattern: &ErasurePattern,
    profile: &LocalityProfile,
) -> Result<BTreeMap<usize, Repaired>> {
    pattern.check(code)?;
    let mut out = BTreeMap::new();
    for coord in pattern.erased() {
        let witness = profile
            .get(coord)
            .and_then(|e| e.witness.clone())
            .ok_or(Error::NeedsGlobalRepair { coord })?;
        let known: Vec<Symbol> = witness
            .iter()
            .map(|&c| pattern.word[c])
            .collect::<Option<_>>()
            .ok_or(Error::NeedsGlobalRepair { coord })?;
        let source = code
            .words()
            .find(|w| witness.iter().zip(&known).all(|(&c, &s)| w[c] == s))
            .ok_or(Error::Inconsistent)?;
        out.insert(coord, Repaired { value: source[coord], accessed: witness });
    }
    Ok(out)
}
