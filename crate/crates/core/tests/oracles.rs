//! Independent oracles for the exhaustive analyses.
//!
//! Each oracle takes a different route from the library: linear-code weight
//! enumeration for distances, pairwise comparison for the "determined by"
//! relation, and full subset enumeration for localities.

use itertools::Itertools;

use lrc_core::code::{min_distance, systematic_from_codebook, Codebook, Symbol, SystematicCode};
use lrc_core::construct::{build_pyramid, build_rs_mds, PyramidSpec};
use lrc_core::field::systematic_mds_generator;
use lrc_core::locality::{determines, information_locality, locality_profile, min_repair_set};

/// Minimum nonzero weight; equals the minimum distance for linear codes.
fn linear_min_weight(code: &Codebook) -> usize {
    code.words()
        .map(|w| w.iter().filter(|&&s| s != 0).count())
        .filter(|&w| w > 0)
        .min()
        .unwrap()
}

/// Pairwise form of the "determined by" relation.
fn determines_pairwise(code: &Codebook, set: &[usize], i: usize) -> bool {
    code.words().tuple_combinations().all(|(x, y)| {
        !set.iter().all(|&c| x[c] == y[c]) || x[i] == y[i]
    })
}

/// Smallest size of any determining set, searching every subset.
fn locality_oracle(code: &Codebook, i: usize) -> Option<usize> {
    let others: Vec<usize> = (0..code.n()).filter(|&c| c != i).collect();
    others
        .iter()
        .copied()
        .powerset()
        .filter(|s| determines_pairwise(code, s, i))
        .map(|s| s.len())
        .min()
}

fn encode_with(p: u64, coeffs: &[Vec<u64>], k: usize) -> Codebook {
    let words = (0..k)
        .map(|_| 0..p)
        .multi_cartesian_product()
        .map(|info| {
            let mut w: Vec<Symbol> = info.iter().map(|&s| s as Symbol).collect();
            for row in coeffs {
                let v = row.iter().zip(&info).map(|(c, x)| c * x).sum::<u64>() % p;
                w.push(v as Symbol);
            }
            w
        })
        .collect();
    Codebook::new(p as usize, k + coeffs.len(), words).unwrap()
}

fn pyramid(q: usize, k: usize, r: usize, d: usize) -> SystematicCode {
    build_pyramid(&PyramidSpec::new(q, k, r, d)).unwrap()
}

#[test]
fn generator_yields_mds_codes() {
    // (7,3,3) gives the [6,3,4] code over GF(7)
    for (p, k, m) in [(7u64, 3usize, 3usize), (7, 1, 1), (5, 2, 3), (11, 2, 4), (7, 4, 2)] {
        let coeffs = systematic_mds_generator(p, k, m).unwrap();
        let code = encode_with(p, &coeffs, k);
        assert_eq!(code.len(), (p as usize).pow(k as u32));
        assert_eq!(linear_min_weight(&code), m + 1, "p={p} k={k} m={m}");
        assert_eq!(min_distance(&code), Ok(m + 1));
    }
}

#[test]
fn distances_match_weight_oracle() {
    let rs = build_rs_mds(7, 3, 4).unwrap();
    assert_eq!(linear_min_weight(rs.code()), 4);
    assert_eq!(min_distance(rs.code()), Ok(4));
    for (q, k, r, d, expected) in [(7, 4, 2, 3, 3), (5, 2, 1, 3, 3), (7, 4, 1, 2, 2), (11, 2, 1, 4, 4)] {
        let code = pyramid(q, k, r, d);
        assert_eq!(linear_min_weight(code.code()), expected);
        assert_eq!(min_distance(code.code()), Ok(expected));
    }
}

#[test]
fn pyramid_locality_matches_subset_oracle() {
    let code = pyramid(7, 4, 2, 3);
    let oracle: Vec<Option<usize>> = (0..7).map(|i| locality_oracle(code.code(), i)).collect();
    assert_eq!(oracle, vec![Some(2), Some(2), Some(2), Some(2), Some(2), Some(2), Some(4)]);
    let profile = locality_profile(code.code(), 6).unwrap();
    let found: Vec<Option<usize>> = profile.entries.iter().map(|e| e.locality).collect();
    assert_eq!(found, oracle);
    for e in &profile.entries {
        let w = e.witness.as_ref().unwrap();
        assert!(!w.contains(&e.coord));
        assert!(determines_pairwise(code.code(), w, e.coord));
    }
    assert_eq!(information_locality(&code, 2), Ok(Some(2)));
    // coordinate 1 is repaired by its group partner and its light parity
    assert_eq!(min_repair_set(code.code(), 0, 2), Ok(Some(vec![1, 4])));
}

#[test]
fn small_pyramid_locality_matches_subset_oracle() {
    let code = pyramid(5, 2, 1, 3);
    let oracle: Vec<Option<usize>> = (0..5).map(|i| locality_oracle(code.code(), i)).collect();
    assert_eq!(oracle, vec![Some(1), Some(1), Some(1), Some(1), Some(2)]);
    let found: Vec<Option<usize>> =
        locality_profile(code.code(), 4).unwrap().entries.iter().map(|e| e.locality).collect();
    assert_eq!(found, oracle);
}

#[test]
fn rs_information_locality_is_k() {
    let rs = build_rs_mds(7, 3, 4).unwrap();
    assert_eq!(locality_oracle(rs.code(), 0), Some(3));
    assert_eq!(information_locality(&rs, 5), Ok(Some(3)));
    assert_eq!(information_locality(&rs, 2), Ok(None));
}

#[test]
fn determines_matches_pairwise_on_pyramid() {
    let code = pyramid(5, 2, 1, 3);
    for i in 0..5 {
        let others: Vec<usize> = (0..5).filter(|&c| c != i).collect();
        for set in others.into_iter().powerset() {
            assert_eq!(
                determines(code.code(), &set, i).unwrap(),
                determines_pairwise(code.code(), &set, i),
                "i={i} S={set:?}"
            );
        }
    }
}

#[test]
fn pyramid_prefixes_cover_all_information_vectors() {
    let code = pyramid(7, 4, 2, 3);
    let mut prefixes: Vec<&[Symbol]> = code.code().words().map(|w| &w[..4]).collect();
    prefixes.sort_unstable();
    prefixes.dedup();
    assert_eq!(prefixes.len(), 2401);
    assert!(systematic_from_codebook(code.code().clone(), 4).is_ok());
}
