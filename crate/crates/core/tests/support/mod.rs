//! Independent brute-force oracles. These recompute each definition
//! literally (explicit frequency spectrum, from-scratch segment walking,
//! explicit uniform vectors) and deliberately share no code with the
//! library implementations they check.

use std::collections::{BTreeMap, HashMap, HashSet};

pub fn oracle_ttr(tokens: &[String]) -> f64 {
    let mut seen: Vec<&String> = Vec::new();
    for t in tokens {
        if !seen.contains(&t) {
            seen.push(t);
        }
    }
    seen.len() as f64 / tokens.len() as f64
}

/// Yule's I by explicitly building the frequency spectrum t(i,N) and
/// summing i²·t(i,N).
pub fn oracle_yules_i(tokens: &[String]) -> Option<f64> {
    let mut counts: HashMap<&String, u64> = HashMap::new();
    for t in tokens {
        *counts.entry(t).or_insert(0) += 1;
    }
    let mut spectrum: BTreeMap<u64, u64> = BTreeMap::new();
    for &c in counts.values() {
        *spectrum.entry(c).or_insert(0) += 1;
    }
    let v: u64 = spectrum.values().sum();
    let weighted: f64 = spectrum.iter().map(|(&i, &t)| (i * i * t) as f64).sum();
    let denom = weighted - v as f64;
    if denom == 0.0 {
        None
    } else {
        Some((v * v) as f64 / denom)
    }
}

fn segment_ttr(segment: &[String]) -> f64 {
    let distinct: HashSet<&String> = segment.iter().collect();
    distinct.len() as f64 / segment.len() as f64
}

fn walk_factors(tokens: &[String], threshold: f64) -> f64 {
    let mut factors = 0.0;
    let mut start = 0;
    for i in 0..tokens.len() {
        if segment_ttr(&tokens[start..=i]) <= threshold {
            factors += 1.0;
            start = i + 1;
        }
    }
    if start < tokens.len() {
        factors += (1.0 - segment_ttr(&tokens[start..])) / (1.0 - threshold);
    }
    factors
}

/// Bidirectional MTLD by literal segment walking, recomputing each running
/// TTR from the segment slice.
pub fn oracle_mtld(tokens: &[String], threshold: f64) -> Option<f64> {
    let n = tokens.len() as f64;
    let forward = walk_factors(tokens, threshold);
    let reversed: Vec<String> = tokens.iter().rev().cloned().collect();
    let backward = walk_factors(&reversed, threshold);
    if forward == 0.0 || backward == 0.0 {
        None
    } else {
        Some((n / forward + n / backward) / 2.0)
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// PTF, CDU and SynTTR recomputed from their definitions over raw
/// occurrence vectors; rows with zero totals are excluded.
pub fn oracle_sfa(rows: &[Vec<u64>]) -> Option<(f64, f64, f64)> {
    let contributing: Vec<&Vec<u64>> = rows
        .iter()
        .filter(|r| r.iter().sum::<u64>() > 0)
        .collect();
    if contributing.is_empty() {
        return None;
    }

    let ptf: f64 = contributing
        .iter()
        .map(|row| {
            let total: u64 = row.iter().sum();
            *row.iter().max().unwrap() as f64 / total as f64
        })
        .sum::<f64>()
        / contributing.len() as f64;

    let cdu: f64 = contributing
        .iter()
        .map(|row| {
            let total: u64 = row.iter().sum();
            let v: Vec<f64> = row.iter().map(|&c| c as f64).collect();
            let uniform = vec![total as f64 / row.len() as f64; row.len()];
            1.0 - cosine(&v, &uniform)
        })
        .sum::<f64>()
        / contributing.len() as f64;

    let types: u64 = contributing
        .iter()
        .map(|row| row.iter().filter(|&&c| c >= 1).count() as u64)
        .sum();
    let tokens: u64 = contributing.iter().map(|row| row.iter().sum::<u64>()).sum();
    let syn_ttr = types as f64 / tokens as f64;

    Some((ptf, cdu, syn_ttr))
}
