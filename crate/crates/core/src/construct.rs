//! Code constructions: Reed–Solomon MDS codes, Pyramid codes meeting the
//! locality bound with equality, coordinate-wise alphabet twists, and a small
//! code with a non-reversible local constraint.

use serde::{Deserialize, Serialize};

use crate::code::{
    checked_pow, radix_digits, systematic_from_codebook, Codebook, Limits, Symbol, SystematicCode,
};
use crate::error::{Error, Result};
use crate::field::{systematic_mds_generator, PrimeField};

/// Parameters of a Pyramid code: dimension `k` split into groups of `r`
/// information symbols, target distance `d`, prime alphabet `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PyramidSpec {
    pub q: usize,
    pub k: usize,
    pub r: usize,
    pub d: usize,
}

impl PyramidSpec {
    pub fn new(q: usize, k: usize, r: usize, d: usize) -> Self {
        Self { q, k, r, d }
    }

    /// `k + k/r + d − 2`.
    pub fn length(&self) -> usize {
        self.k + self.k / self.r + self.d - 2
    }

    pub fn validate(&self) -> Result<()> {
        let Self { q, k, r, d } = *self;
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        if k == 0 || r == 0 {
            return fail(format!("k = {k} and r = {r} must both be positive"));
        }
        if r > k || k % r != 0 {
            return fail(format!("group size r = {r} must divide k = {k}"));
        }
        if d < 2 {
            return fail(format!("distance d = {d} must be at least 2"));
        }
        if PrimeField::new(q as u64).is_err() {
            return fail(format!("alphabet size q = {q} must be prime"));
        }
        if q < k + d - 1 {
            return fail(format!("q = {q} is below k + d - 1 = {}", k + d - 1));
        }
        Ok(())
    }
}

/// A construction request as read from JSON, e.g.
/// `{"construction":"pyramid","q":7,"k":4,"r":2,"d":3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum ConstructionSpec {
    Pyramid { q: usize, k: usize, r: usize, d: usize },
    RsMds { q: usize, k: usize, d: usize },
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<SystematicCode> {
        match *self {
            Self::Pyramid { q, k, r, d } => build_pyramid(&PyramidSpec { q, k, r, d }),
            Self::RsMds { q, k, d } => build_rs_mds(q, k, d),
        }
    }
}

/// Encodes every information vector with the given parity maps, in
/// lexicographic order of the information part.
fn encode_all<F>(q: usize, k: usize, parities: usize, parity: F) -> Result<SystematicCode>
where
    F: Fn(&[Symbol], &mut Vec<Symbol>),
{
    let limits = Limits::default();
    let count = checked_pow(q, k)
        .filter(|&c| c <= limits.max_words)
        .ok_or_else(|| Error::TooLarge(format!("{q}^{k} codewords exceed the cap of {}", limits.max_words)))?;
    let n = k + parities;
    let mut symbols = Vec::with_capacity(count * n);
    for idx in 0..count {
        let info = radix_digits(idx, q, k);
        symbols.extend_from_slice(&info);
        parity(&info, &mut symbols);
    }
    systematic_from_codebook(Codebook::from_flat(q, n, symbols, limits)?, k)
}

fn linear_form(field: &PrimeField, coeffs: &[u64], info: &[Symbol]) -> Symbol {
    coeffs
        .iter()
        .zip(info)
        .fold(0, |acc, (&c, &x)| field.add(acc, field.mul(c, x as u64))) as Symbol
}

/// Systematic Reed–Solomon code with parameters `(k + d − 1, q^k, d)`.
pub fn build_rs_mds(q: usize, k: usize, d: usize) -> Result<SystematicCode> {
    if k == 0 || d < 2 {
        return Err(Error::InvalidSpec(format!("need k >= 1 and d >= 2, got k = {k}, d = {d}")));
    }
    let field = PrimeField::new(q as u64)?;
    let coeffs = systematic_mds_generator(q as u64, k, d - 1)?;
    encode_all(q, k, d - 1, |info, out| {
        out.extend(coeffs.iter().map(|row| linear_form(&field, row, info)));
    })
}

/// Pyramid code of length `k + k/r + d − 2`.
///
/// Starts from the systematic Reed–Solomon code with `d − 1` parities and
/// splits the first parity into `k/r` light parities, one per consecutive
/// block of `r` information symbols. The remaining `d − 2` parities are kept
/// as heavy parities. Coordinates are ordered information, light, heavy.
/// With `r = k` this is the Reed–Solomon code itself.
pub fn build_pyramid(spec: &PyramidSpec) -> Result<SystematicCode> {
    spec.validate()?;
    let PyramidSpec { q, k, r, d } = *spec;
    if r == k {
        return build_rs_mds(q, k, d);
    }
    let field = PrimeField::new(q as u64)?;
    let coeffs = systematic_mds_generator(q as u64, k, d - 1)?;
    let (split, heavy) = coeffs.split_first().expect("d >= 2 gives at least one parity");
    encode_all(q, k, k / r + d - 2, |info, out| {
        for (group, chunk) in info.chunks(r).enumerate() {
            out.push(linear_form(&field, &split[group * r..(group + 1) * r], chunk));
        }
        out.extend(heavy.iter().map(|row| linear_form(&field, row, info)));
    })
}

/// Coordinate-wise alphabet permutations, either explicit or derived from a
/// seed. JSON: `{"seed": 1}` or `{"perms": [[…], …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TwistSpec {
    Seed { seed: u64 },
    Perms { perms: Vec<Vec<Symbol>> },
}

impl TwistSpec {
    /// One permutation of `0..q` per coordinate.
    pub fn permutations(&self, q: usize, n: usize) -> Result<Vec<Vec<Symbol>>> {
        match self {
            Self::Seed { seed } => Ok((0..n).map(|c| seeded_permutation(q, *seed, c)).collect()),
            Self::Perms { perms } => {
                if perms.len() != n {
                    return Err(Error::Shape(format!("{} permutations for {n} coordinates", perms.len())));
                }
                for p in perms {
                    let mut seen = vec![false; q];
                    let ok = p.len() == q
                        && p.iter().all(|&s| (s as usize) < q && !std::mem::replace(&mut seen[s as usize], true));
                    if !ok {
                        return Err(Error::Shape(format!("{p:?} is not a permutation of 0..{q}")));
                    }
                }
                Ok(perms.clone())
            }
        }
    }
}

/// Fisher–Yates shuffle of `0..q` driven by a 64-bit linear congruential
/// generator (Knuth's MMIX constants). Each coordinate starts from the seed
/// offset by a per-coordinate odd constant, so coordinates get independent
/// permutations.
pub fn seeded_permutation(q: usize, seed: u64, coord: usize) -> Vec<Symbol> {
    let mut state = seed ^ (coord as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut perm: Vec<Symbol> = (0..q).map(|s| s as Symbol).collect();
    for j in (1..q).rev() {
        state = state
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        let pick = ((state >> 33) % (j as u64 + 1)) as usize;
        perm.swap(j, pick);
    }
    perm
}

/// Applies a permutation of the alphabet to every coordinate.
pub fn twist(code: &Codebook, spec: &TwistSpec) -> Result<Codebook> {
    let perms = spec.permutations(code.q(), code.n())?;
    let symbols = code
        .words()
        .flat_map(|w| w.iter().zip(&perms).map(|(&s, p)| p[s as usize]))
        .collect();
    Codebook::from_flat(code.q(), code.n(), symbols, code.limits())
}

/// Twists a systematic code; the information prefix stays a bijection.
pub fn twist_systematic(code: &SystematicCode, spec: &TwistSpec) -> Result<SystematicCode> {
    systematic_from_codebook(twist(code.code(), spec)?, code.k())
}

/// `{000, 010, 100, 111}`: the third coordinate is the AND of the first two.
/// Coordinates 1 and 2 determine 3, but 2 and 3 do not determine 1.
pub fn build_nonreversible_example() -> Codebook {
    Codebook::new(2, 3, vec![vec![0, 0, 0], vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 1]])
        .expect("fixed example is a valid codebook")
}
