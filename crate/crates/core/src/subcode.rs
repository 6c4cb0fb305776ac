//! The sub-code extraction procedure driven by local repair sets, the
//! locality/redundancy bound it proves, and the equality conditions that hold
//! on codes meeting that bound.
//!
//! A run repeatedly picks a coordinate `i_j` outside the already fixed region
//! `R_{j-1}` together with a repair set `S_j` of at most `r` coordinates,
//! fixes `S_j` to its most frequent value `σ_j` in the current sub-code, and
//! stops once a single codeword is left.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::code::{checked_pow, check_coords, mds_projection_check, Codebook, Symbol, SystematicCode};
use crate::error::{Error, Result};
use crate::locality::{determines_unchecked, min_repair_set, one_based};

/// A `(i_j, S_j)` choice to use verbatim. 0-based; the JSON form
/// `{"i":1,"S":[2,5]}` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcedStep {
    pub i: usize,
    pub set: Vec<usize>,
}

impl<'de> Deserialize<'de> for ForcedStep {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            i: usize,
            #[serde(rename = "S")]
            set: Vec<usize>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let zero = |c: usize| {
            c.checked_sub(1)
                .ok_or_else(|| serde::de::Error::custom("coordinates are 1-based"))
        };
        Ok(Self {
            i: zero(raw.i)?,
            set: raw.set.into_iter().map(zero).collect::<std::result::Result<_, _>>()?,
        })
    }
}

/// How the run chooses `(i_j, S_j)`: the forced steps first, in order, then
/// the automatic rule (smallest information coordinate that is outside the
/// fixed region and still varies, with its canonical minimal repair set).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Strategy {
    pub forced: Vec<ForcedStep>,
}

impl Strategy {
    pub fn auto() -> Self {
        Self::default()
    }

    pub fn forced(steps: Vec<ForcedStep>) -> Self {
        Self { forced: steps }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcodeStep {
    pub i: usize,
    /// `S_j`, sorted.
    pub set: Vec<usize>,
    /// `T_j = S_j ∖ R_{j−1}`.
    pub new: Vec<usize>,
    /// The value `S_j` was fixed to, listed in the order of `set`.
    pub sigma: Vec<Symbol>,
    pub size_after: usize,
}

impl SubcodeStep {
    pub fn t(&self) -> usize {
        self.new.len()
    }

    /// `S_j ∪ {i_j}`, sorted.
    pub fn group(&self) -> Vec<usize> {
        let mut g = self.set.clone();
        g.push(self.i);
        g.sort_unstable();
        g
    }
}

impl Serialize for SubcodeStep {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SubcodeStep", 5)?;
        st.serialize_field("i", &(self.i + 1))?;
        st.serialize_field("S", &one_based(&self.set))?;
        st.serialize_field("T", &one_based(&self.new))?;
        st.serialize_field("sigma", &self.sigma)?;
        st.serialize_field("size_after", &self.size_after)?;
        st.end()
    }
}

/// Full record of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcodeTrace {
    pub q: usize,
    pub n: usize,
    pub initial_size: usize,
    pub steps: Vec<SubcodeStep>,
    /// Largest `j` with `|C_j| > 1`.
    pub ell: usize,
    /// `R_ℓ`, sorted.
    pub fixed: Vec<usize>,
    /// `C_1, C_2, …` when the run was asked to retain them.
    pub subcodes: Option<Vec<Codebook>>,
}

impl SubcodeTrace {
    /// `(i_j, S_j)` pairs, suitable for replaying the run.
    pub fn forced_steps(&self) -> Vec<ForcedStep> {
        self.steps.iter().map(|s| ForcedStep { i: s.i, set: s.set.clone() }).collect()
    }

    pub fn groups(&self) -> Vec<Vec<usize>> {
        self.steps.iter().map(SubcodeStep::group).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

impl Serialize for SubcodeTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SubcodeTrace", 3)?;
        st.serialize_field("steps", &self.steps)?;
        st.serialize_field("ell", &self.ell)?;
        st.serialize_field("R", &one_based(&self.fixed))?;
        st.end()
    }
}

pub fn run_subcode(code: &SystematicCode, r: usize, strategy: &Strategy) -> Result<SubcodeTrace> {
    run(code, r, strategy, false)
}

/// Like [`run_subcode`], additionally keeping every intermediate sub-code.
pub fn run_subcode_retaining(code: &SystematicCode, r: usize, strategy: &Strategy) -> Result<SubcodeTrace> {
    run(code, r, strategy, true)
}

fn run(code: &SystematicCode, r: usize, strategy: &Strategy, retain: bool) -> Result<SubcodeTrace> {
    let base = code.code();
    let (n, q) = (base.n(), base.q());
    if r == 0 {
        return Err(Error::Shape("locality r must be positive".into()));
    }
    let cap = r.min(n - 1);

    let mut current: Vec<usize> = (0..base.len()).collect();
    let mut fixed = vec![false; n];
    let mut steps = Vec::new();
    let mut subcodes = retain.then(Vec::new);
    let mut canonical: BTreeMap<usize, Vec<usize>> = BTreeMap::new();

    while current.len() > 1 {
        let (i, set) = match strategy.forced.get(steps.len()) {
            Some(step) => {
                validate_forced(base, step, &fixed, r)?;
                let mut set = step.set.clone();
                set.sort_unstable();
                (step.i, set)
            }
            None => {
                let i = (0..code.k())
                    .find(|&c| !fixed[c] && current.iter().any(|&w| base.word(w)[c] != base.word(current[0])[c]))
                    .ok_or_else(|| {
                        Error::InternalInvariantViolation(format!(
                            "{} codewords left but no free information coordinate varies",
                            current.len()
                        ))
                    })?;
                let set = match canonical.get(&i) {
                    Some(s) => s.clone(),
                    None => {
                        let s = min_repair_set(base, i, cap)?.ok_or(Error::NoRepairSet { coord: i, cap })?;
                        canonical.insert(i, s.clone());
                        s
                    }
                };
                (i, set)
            }
        };

        let new: Vec<usize> = set.iter().copied().filter(|&c| !fixed[c]).collect();
        let mut counts: BTreeMap<Vec<Symbol>, usize> = BTreeMap::new();
        for &w in &current {
            let word = base.word(w);
            *counts.entry(set.iter().map(|&c| word[c]).collect()).or_default() += 1;
        }
        // strictly greater keeps the lexicographically smallest among ties
        let mut sigma: &[Symbol] = &[];
        let mut best = 0;
        for (value, &count) in &counts {
            if count > best {
                best = count;
                sigma = value;
            }
        }
        let sigma = sigma.to_vec();

        let prev = current.len();
        current.retain(|&w| {
            let word = base.word(w);
            set.iter().zip(&sigma).all(|(&c, &s)| word[c] == s)
        });
        let spread = checked_pow(q, new.len()).unwrap_or(usize::MAX);
        if current.len().saturating_mul(spread) < prev {
            return Err(Error::InternalInvariantViolation(format!(
                "sub-code shrank from {prev} to {} by fixing {} new coordinates",
                current.len(),
                new.len()
            )));
        }

        fixed[i] = true;
        for &c in &set {
            fixed[c] = true;
        }
        if let Some(keep) = subcodes.as_mut() {
            let symbols = current.iter().flat_map(|&w| base.word(w).iter().copied()).collect();
            keep.push(Codebook::from_flat(q, n, symbols, base.limits())?);
        }
        steps.push(SubcodeStep { i, set, new, sigma, size_after: current.len() });
    }

    if strategy.forced.len() > steps.len() {
        return Err(Error::InvalidStrategy(format!(
            "{} forced steps given but the run ended after {}",
            strategy.forced.len(),
            steps.len()
        )));
    }

    let ell = steps.len().saturating_sub(1);
    let mut region: Vec<usize> = steps[..ell].iter().flat_map(SubcodeStep::group).collect();
    region.sort_unstable();
    region.dedup();
    Ok(SubcodeTrace { q, n, initial_size: base.len(), steps, ell, fixed: region, subcodes })
}

fn validate_forced(code: &Codebook, step: &ForcedStep, fixed: &[bool], r: usize) -> Result<()> {
    let invalid = |msg: String| Err(Error::InvalidStrategy(msg));
    let n = code.n();
    if step.i >= n || check_coords(&step.set, n).is_err() {
        return invalid(format!("step ({}, {:?}) names coordinates outside 0..{n}", step.i, step.set));
    }
    if fixed[step.i] {
        return invalid(format!("coordinate {} is already in the fixed region", step.i));
    }
    if step.set.contains(&step.i) {
        return invalid(format!("coordinate {} is inside its own repair set", step.i));
    }
    if step.set.len() > r {
        return invalid(format!("repair set {:?} is larger than r = {r}", step.set));
    }
    if !determines_unchecked(code, &step.set, step.i) {
        return invalid(format!("{:?} does not determine coordinate {}", step.set, step.i));
    }
    Ok(())
}

/// `n ≥ k + ⌈k/r⌉ + d − 2`, with `optimal` meaning equality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    pub rhs: usize,
    pub holds: bool,
    pub optimal: bool,
}

pub fn check_locality_bound(n: usize, k: usize, d: usize, r: usize) -> Result<BoundReport> {
    if n == 0 || k == 0 || d == 0 || r == 0 || r > k || k > n {
        return Err(Error::Shape(format!(
            "need positive parameters with r <= k <= n, got n={n} k={k} d={d} r={r}"
        )));
    }
    let rhs = k + k.div_ceil(r) + d - 2;
    Ok(BoundReport { n, k, d, r, rhs, holds: n >= rhs, optimal: n == rhs })
}

/// Parameters of a code claimed to meet the locality bound with equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalityClaim {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    /// 1-based index of the offending step, if any.
    pub step: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessReport {
    pub pass: bool,
    pub checks: Vec<TightnessCheck>,
}

impl TightnessReport {
    pub fn check(&self, name: &str) -> Option<&TightnessCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the equalities a run must satisfy on a code meeting the bound with
/// `r | k`, `r < k`: every `t_j = |S_j| = r`, `ℓ = k/r − 1`,
/// `|C_j| = q^(k − rj)`, and the groups `S_j ∪ {i_j}` are pairwise disjoint
/// with `r + 1` members each. Any failure refutes the optimality claim.
pub fn verify_trace_tightness(trace: &SubcodeTrace, claim: &OptimalityClaim) -> TightnessReport {
    let OptimalityClaim { n, k, d, r, q } = *claim;
    let mut checks = Vec::new();
    let mut push = |name, pass, detail: String, step: Option<usize>| {
        checks.push(TightnessCheck { name, pass, detail, step });
    };

    let hypotheses = r > 0 && r < k && k % r == 0 && d >= 2;
    push(
        "hypotheses",
        hypotheses,
        format!("need r | k, r < k and d >= 2; got k={k} r={r} d={d}"),
        None,
    );
    if !hypotheses {
        return TightnessReport { pass: false, checks };
    }
    let groups = k / r;

    let bound = k + groups + d - 2;
    push(
        "length",
        n == bound && trace.n == n && trace.q == q,
        format!("claimed n={n}, bound k + k/r + d - 2 = {bound}, trace code length {} over q={}", trace.n, trace.q),
        None,
    );

    push("ell", trace.ell + 1 == groups, format!("ell = {}, expected k/r - 1 = {}", trace.ell, groups - 1), None);

    let bad_t = trace.steps.iter().position(|s| s.t() != r || s.set.len() != r);
    push(
        "t_j",
        bad_t.is_none(),
        match bad_t {
            Some(j) => format!("t = {}, |S| = {}, expected {r}", trace.steps[j].t(), trace.steps[j].set.len()),
            None => format!("all {} steps fix exactly {r} new coordinates", trace.steps.len()),
        },
        bad_t.map(|j| j + 1),
    );

    let bad_size = trace.steps.iter().enumerate().position(|(j, s)| {
        let exponent = (k as isize) - (r * (j + 1)) as isize;
        exponent < 0 || checked_pow(q, exponent as usize) != Some(s.size_after)
    });
    push(
        "sizes",
        bad_size.is_none() && trace.steps.len() == groups,
        match bad_size {
            Some(j) => format!("|C_{}| = {}, expected q^(k - r*{}) ", j + 1, trace.steps[j].size_after, j + 1),
            None => format!("{} steps with sizes q^(k - rj)", trace.steps.len()),
        },
        bad_size.map(|j| j + 1),
    );

    let mut seen = vec![false; trace.n];
    let mut bad_group = None;
    for (j, group) in trace.groups().iter().enumerate() {
        let distinct = group.windows(2).all(|w| w[0] != w[1]);
        if group.len() != r + 1 || !distinct || group.iter().any(|&c| seen[c]) {
            bad_group = Some(j);
            break;
        }
        for &c in group {
            seen[c] = true;
        }
    }
    push(
        "disjoint_groups",
        bad_group.is_none(),
        match bad_group {
            Some(j) => format!("group {:?} overlaps an earlier group or lacks r + 1 members", one_based(&trace.steps[j].group())),
            None => "groups are pairwise disjoint with r + 1 members".into(),
        },
        bad_group.map(|j| j + 1),
    );

    TightnessReport { pass: checks.iter().all(|c| c.pass), checks }
}

/// Whether the coordinates in `sets` (disjoint, `k` in total) take all `q^k`
/// values across the code, and hence determine the codeword.
pub fn independence_check(code: &SystematicCode, sets: &[Vec<usize>]) -> Result<bool> {
    let union: Vec<usize> = sets.iter().flatten().copied().collect();
    check_coords(&union, code.n())?;
    if union.len() != code.k() {
        return Err(Error::Shape(format!("sets cover {} coordinates, dimension is {}", union.len(), code.k())));
    }
    Ok(mds_projection_check(code.code(), &union)?.bijective)
}
