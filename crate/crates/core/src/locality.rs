//! The "determined by" relation between coordinates and exact locality search.
//!
//! A set `S` determines coordinate `i` when any two codewords agreeing on `S`
//! also agree on `i`. Repair-set searches enumerate candidate sets by
//! increasing size and lexicographically within a size, so the first hit is a
//! canonical witness.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::code::{check_coords, Codebook, Symbol, SystematicCode};
use crate::error::{Error, Result};

/// Whether `x|_S` determines `x|_i` for every codeword `x`.
pub fn determines(code: &Codebook, set: &[usize], i: usize) -> Result<bool> {
    check_coords(set, code.n())?;
    if i >= code.n() {
        return Err(Error::Shape(format!("coordinate {i} out of range for length {}", code.n())));
    }
    if set.contains(&i) {
        return Err(Error::Shape(format!("target coordinate {i} is inside its own candidate set")));
    }
    Ok(determines_unchecked(code, set, i))
}

pub(crate) fn determines_unchecked(code: &Codebook, set: &[usize], i: usize) -> bool {
    let q = code.q() as u128;
    let fits = set.iter().try_fold(1u128, |acc, _| acc.checked_mul(q)).is_some();
    if fits {
        let mut seen: HashMap<u128, Symbol> = HashMap::with_capacity(code.len());
        code.words().all(|w| {
            let key = set.iter().fold(0u128, |acc, &c| acc * q + w[c] as u128);
            *seen.entry(key).or_insert(w[i]) == w[i]
        })
    } else {
        let mut seen: HashMap<Vec<Symbol>, Symbol> = HashMap::with_capacity(code.len());
        code.words().all(|w| {
            let key = set.iter().map(|&c| w[c]).collect();
            *seen.entry(key).or_insert(w[i]) == w[i]
        })
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, j| acc.saturating_mul(n - j) / (j + 1))
}

fn check_search(code: &Codebook, i: usize, size_cap: usize) -> Result<()> {
    let n = code.n();
    if i >= n {
        return Err(Error::Shape(format!("coordinate {i} out of range for length {n}")));
    }
    if size_cap > n - 1 {
        return Err(Error::Shape(format!("size cap {size_cap} exceeds n - 1 = {}", n - 1)));
    }
    let budget = code.limits().max_subsets;
    let total = (0..=size_cap as u64).fold(0u64, |acc, s| acc.saturating_add(binomial(n as u64 - 1, s)));
    if total > budget {
        return Err(Error::TooLarge(format!(
            "repair-set search over {total} subsets exceeds the budget of {budget}"
        )));
    }
    Ok(())
}

/// The largest size cap, at most `n - 1`, whose repair-set search fits the
/// subset budget of `code`.
pub fn largest_search_cap(code: &Codebook) -> usize {
    let n = code.n() as u64;
    let budget = code.limits().max_subsets;
    let mut total = 0u64;
    let mut cap = 0;
    for s in 0..n {
        total = total.saturating_add(binomial(n - 1, s));
        if total > budget {
            break;
        }
        cap = s as usize;
    }
    cap
}

/// Every candidate set for coordinate `i` in canonical order.
fn candidates(n: usize, i: usize, size_cap: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=size_cap).flat_map(move |size| (0..n).filter(move |&c| c != i).combinations(size))
}

/// The canonical smallest set of at most `size_cap` coordinates determining `i`.
///
/// A constant coordinate is determined by the empty set.
pub fn min_repair_set(code: &Codebook, i: usize, size_cap: usize) -> Result<Option<Vec<usize>>> {
    check_search(code, i, size_cap)?;
    Ok(candidates(code.n(), i, size_cap).find(|s| determines_unchecked(code, s, i)))
}

/// Every set (not only minimal ones) of at most `size_cap` coordinates that
/// determines `i`, in canonical order.
pub fn repair_sets(code: &Codebook, i: usize, size_cap: usize) -> Result<Vec<Vec<usize>>> {
    check_search(code, i, size_cap)?;
    Ok(candidates(code.n(), i, size_cap)
        .filter(|s| determines_unchecked(code, s, i))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalityEntry {
    pub coord: usize,
    pub locality: Option<usize>,
    pub witness: Option<Vec<usize>>,
}

impl Serialize for LocalityEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("LocalityEntry", 3)?;
        st.serialize_field("i", &(self.coord + 1))?;
        st.serialize_field("locality", &self.locality)?;
        st.serialize_field("witness", &self.witness.as_ref().map(|w| one_based(w)))?;
        st.end()
    }
}

/// Per-coordinate locality, serialized as a bare JSON array of entries with
/// 1-based coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LocalityProfile {
    pub entries: Vec<LocalityEntry>,
}

impl LocalityProfile {
    pub fn get(&self, coord: usize) -> Option<&LocalityEntry> {
        self.entries.iter().find(|e| e.coord == coord)
    }
}

pub fn locality_profile(code: &Codebook, size_cap: usize) -> Result<LocalityProfile> {
    let entries = (0..code.n())
        .map(|i| {
            let witness = min_repair_set(code, i, size_cap)?;
            Ok(LocalityEntry { coord: i, locality: witness.as_ref().map(Vec::len), witness })
        })
        .collect::<Result<_>>()?;
    Ok(LocalityProfile { entries })
}

/// The largest locality among the information coordinates, or `None` when one
/// of them has no repair set within `size_cap`.
pub fn information_locality(code: &SystematicCode, size_cap: usize) -> Result<Option<usize>> {
    let mut worst = 0;
    for i in 0..code.k() {
        match min_repair_set(code.code(), i, size_cap)? {
            Some(s) => worst = worst.max(s.len()),
            None => return Ok(None),
        }
    }
    Ok(Some(worst))
}

/// For each member of `group`, whether the rest of the group determines it.
pub fn reversibility_check(code: &Codebook, group: &[usize]) -> Result<BTreeMap<usize, bool>> {
    if group.len() < 2 {
        return Err(Error::Shape("a repair group needs at least two coordinates".into()));
    }
    check_coords(group, code.n())?;
    Ok(group
        .iter()
        .map(|&target| {
            let rest: Vec<usize> = group.iter().copied().filter(|&c| c != target).collect();
            (target, determines_unchecked(code, &rest, target))
        })
        .collect())
}

pub(crate) fn one_based(coords: &[usize]) -> Vec<usize> {
    coords.iter().map(|c| c + 1).collect()
}
