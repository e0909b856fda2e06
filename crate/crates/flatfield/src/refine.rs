//! Popularity refinement: iteratively keep only subflats of high degree and
//! flats that retain many surviving subflats.
//!
//! Each call reports which side of the size/survival dichotomy the instance
//! realizes, with both sides computed exactly. The per-level ledger records
//! the incidence counts |I| and |I'| and whether the pivot inequality
//! `|I'| < |I| / 2` held; these are recorded, never asserted, because
//! desk-scale fields may genuinely sit on the other side.

use crate::counting::real_power;
use crate::error::{Error, Result};
use crate::family::FlatFamily;
use crate::flat::AffineFlat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DichotomyBranch {
    /// The ambient subflat family is already as large as the argument needs.
    SizeBound,
    /// The refined families survived with most of their mass.
    Survival,
}

#[derive(Debug, Clone)]
pub struct RefinementLevel {
    pub level: usize,
    /// Surviving flats after this level.
    pub flats: FlatFamily,
    /// Surviving subflats after this level.
    pub subs: FlatFamily,
    /// Degree cut applied to produce `subs` (meaningless at level 0).
    pub degree_threshold: f64,
    /// Richness cut applied to produce `flats` (meaningless at level 0).
    pub richness_threshold: f64,
    /// |I|: chosen incidences at this level, when the chooser is defined.
    pub pair_count: Option<u64>,
    /// |I'|: chosen incidences whose subflat failed the next degree cut.
    pub dropped_pairs: Option<u64>,
    /// `|I'| < |I| / 2`.
    pub pivot_holds: Option<bool>,
    /// `|flats at this level| >= 2^{-3 level} |flats at level 0|`.
    pub survival_holds: bool,
}

#[derive(Debug, Clone)]
pub struct RefinementTrace {
    pub c: f64,
    pub lambda: f64,
    pub d: usize,
    pub k: usize,
    /// Only the line refinement carries an exponent offset beta.
    pub beta: Option<f64>,
    /// levels[q] holds the families after q refinement rounds.
    pub levels: Vec<RefinementLevel>,
    pub branch: DichotomyBranch,
    /// |P| against the size-bound threshold.
    pub size_bound_lhs: u64,
    pub size_bound_rhs: f64,
}

impl RefinementTrace {
    pub fn final_flats(&self) -> &FlatFamily {
        &self.levels.last().expect("at least one level").flats
    }

    pub fn final_subs(&self) -> &FlatFamily {
        &self.levels.last().expect("at least one level").subs
    }
}

fn count_contained(flat: &AffineFlat, subs: &FlatFamily) -> Result<u64> {
    let mut count = 0;
    for sub in subs.iter() {
        if flat.contains_flat(sub)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Keep subflats of degree at least `degree_cut` in `flats`, then flats
/// retaining at least `richness_cut` surviving subflats.
pub(crate) fn sharpen(
    flats: &FlatFamily,
    subs: &FlatFamily,
    degree_cut: f64,
    richness_cut: f64,
) -> Result<(FlatFamily, FlatFamily)> {
    let mut kept_subs = Vec::new();
    for sub in subs.iter() {
        if flats.degree(sub)? as f64 >= degree_cut {
            kept_subs.push(sub.clone());
        }
    }
    let sharp_subs = FlatFamily::new(subs.field(), subs.ambient_dim(), subs.flat_dim(), kept_subs)?;
    let mut kept_flats = Vec::new();
    for flat in flats.iter() {
        if count_contained(flat, &sharp_subs)? as f64 >= richness_cut {
            kept_flats.push(flat.clone());
        }
    }
    let sharp_flats =
        FlatFamily::new(flats.field(), flats.ambient_dim(), flats.flat_dim(), kept_flats)?;
    Ok((sharp_flats, sharp_subs))
}

/// The chooser interval `[lo, 2 lo)` rendered as integer bounds, if any
/// integer fits.
fn chooser_bounds(lo: f64) -> Option<(u64, u64)> {
    let t_min = lo.ceil() as u64;
    let hi = 2.0 * lo;
    let t_max = if hi.fract() == 0.0 { hi as u64 - 1 } else { hi.floor() as u64 };
    if t_max < t_min || t_min == 0 {
        // a zero-size chooser would make |I| vacuous
        if t_max >= 1 {
            return Some((1, t_max));
        }
        return None;
    }
    Some((t_min, t_max))
}

/// |I| and |I'| for one refinement step: for each flat pick its first
/// `t` contained subflats in canonical order with `t` inside the chooser
/// interval, then count how many chosen incidences lose their subflat at the
/// next degree cut.
fn incidence_counts(
    flats: &FlatFamily,
    subs: &FlatFamily,
    next_subs: &FlatFamily,
    lo: f64,
) -> Result<(Option<u64>, Option<u64>)> {
    let Some((t_min, t_max)) = chooser_bounds(lo) else {
        return Ok((None, None));
    };
    let mut total = 0u64;
    let mut dropped = 0u64;
    for flat in flats.iter() {
        let mut chosen = Vec::new();
        for sub in subs.iter() {
            if flat.contains_flat(sub)? {
                chosen.push(sub);
                if chosen.len() as u64 == t_max {
                    break;
                }
            }
        }
        if (chosen.len() as u64) < t_min {
            // hypothesis fails for this flat; chooser undefined
            return Ok((None, None));
        }
        total += chosen.len() as u64;
        for sub in chosen {
            if !next_subs.contains(sub) {
                dropped += 1;
            }
        }
    }
    Ok((Some(total), Some(dropped)))
}

/// Single-level popularity refinement for a family of lines against a
/// family of points. Degree cut `c q^{d-1-(1-beta)/2}`, richness cut
/// `lambda q / 4`. Every line must carry at least `lambda q` points.
pub fn popularity_refine(
    lines: &FlatFamily,
    points: &FlatFamily,
    c: f64,
    lambda: f64,
    d: usize,
    beta: f64,
) -> Result<RefinementTrace> {
    if lines.flat_dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: lines.flat_dim() });
    }
    if points.flat_dim() != 0 {
        return Err(Error::DimensionMismatch { expected: 0, got: points.flat_dim() });
    }
    let q = lines.field().modulus() as u64;
    let required = lambda * q as f64;
    for line in lines.iter() {
        let have = count_contained(line, points)?;
        if (have as f64) < required {
            return Err(Error::HypothesisViolation(format!(
                "line with base {:?} carries {} points, needs {}",
                line.base(),
                have,
                required
            )));
        }
    }
    let degree_cut = c * real_power(q, d as f64 - 1.0 - (1.0 - beta) / 2.0);
    let richness_cut = lambda * q as f64 / 4.0;
    let (sharp_lines, sharp_points) = sharpen(lines, points, degree_cut, richness_cut)?;
    let (pairs, dropped) = incidence_counts(lines, points, &sharp_points, required)?;

    let size_bound_lhs = points.len() as u64;
    let size_bound_rhs = 0.5 * lambda * q as f64 * lines.len() as f64 / degree_cut;
    let branch = if size_bound_lhs as f64 >= size_bound_rhs {
        DichotomyBranch::SizeBound
    } else {
        DichotomyBranch::Survival
    };
    let survival = 8 * sharp_lines.len() >= lines.len();
    Ok(RefinementTrace {
        c,
        lambda,
        d,
        k: 1,
        beta: Some(beta),
        levels: vec![
            RefinementLevel {
                level: 0,
                flats: lines.clone(),
                subs: points.clone(),
                degree_threshold: 0.0,
                richness_threshold: 0.0,
                pair_count: pairs,
                dropped_pairs: dropped,
                pivot_holds: pairs.zip(dropped).map(|(i, ip)| 2 * ip < i),
                survival_holds: true,
            },
            RefinementLevel {
                level: 1,
                flats: sharp_lines,
                subs: sharp_points,
                degree_threshold: degree_cut,
                richness_threshold: richness_cut,
                pair_count: None,
                dropped_pairs: None,
                pivot_holds: None,
                survival_holds: survival,
            },
        ],
        branch,
        size_bound_lhs,
        size_bound_rhs,
    })
}

/// Iterated popularity refinement for k-flats against (k-1)-flats: k rounds
/// with degree cut `c q^{d-k}` and richness cut `2^{-2q} lambda q^k` at round
/// q. Every flat must carry at least `lambda q^k` subflats.
pub fn iterated_popularity(
    flats: &FlatFamily,
    subs: &FlatFamily,
    c: f64,
    lambda: f64,
    d: usize,
) -> Result<RefinementTrace> {
    let k = flats.flat_dim();
    if k == 0 {
        return Err(Error::InvalidDimension { what: "flat dimension", value: 0, limit: 1 });
    }
    if subs.flat_dim() + 1 != k {
        return Err(Error::DimensionMismatch { expected: k - 1, got: subs.flat_dim() });
    }
    let q = flats.field().modulus() as u64;
    let qk = real_power(q, k as f64);
    let required = lambda * qk;
    for flat in flats.iter() {
        let have = count_contained(flat, subs)?;
        if (have as f64) < required {
            return Err(Error::HypothesisViolation(format!(
                "flat with base {:?} carries {} subflats, needs {}",
                flat.base(),
                have,
                required
            )));
        }
    }
    let degree_cut = c * real_power(q, (d - k) as f64);

    let mut levels = vec![RefinementLevel {
        level: 0,
        flats: flats.clone(),
        subs: subs.clone(),
        degree_threshold: 0.0,
        richness_threshold: 0.0,
        pair_count: None,
        dropped_pairs: None,
        pivot_holds: None,
        survival_holds: true,
    }];
    let mut all_survived = true;
    for round in 1..=k {
        let prev = &levels[round - 1];
        let richness_cut = lambda * qk / real_power(2, 2.0 * round as f64);
        let (sharp_flats, sharp_subs) = sharpen(&prev.flats, &prev.subs, degree_cut, richness_cut)?;
        // chooser at the previous level: subsets of P^{#,q-1} with sizes in
        // [2^{-2(q-1)} lambda q^k, twice that)
        let chooser_lo = lambda * qk / real_power(2, 2.0 * (round as f64 - 1.0));
        let (pairs, dropped) =
            incidence_counts(&prev.flats, &prev.subs, &sharp_subs, chooser_lo)?;
        let survival =
            sharp_flats.len() as f64 * real_power(2, 3.0 * round as f64) >= flats.len() as f64;
        all_survived &= survival;
        let pivot = pairs.zip(dropped).map(|(i, ip)| 2 * ip < i);
        let prev_mut = levels.last_mut().expect("level exists");
        prev_mut.pair_count = pairs;
        prev_mut.dropped_pairs = dropped;
        prev_mut.pivot_holds = pivot;
        levels.push(RefinementLevel {
            level: round,
            flats: sharp_flats,
            subs: sharp_subs,
            degree_threshold: degree_cut,
            richness_threshold: richness_cut,
            pair_count: None,
            dropped_pairs: None,
            pivot_holds: None,
            survival_holds: survival,
        });
    }

    let size_bound_lhs = subs.len() as u64;
    let size_bound_rhs =
        lambda * qk * flats.len() as f64 / (real_power(2, 5.0 * k as f64) * degree_cut);
    let branch = if size_bound_lhs as f64 >= size_bound_rhs {
        DichotomyBranch::SizeBound
    } else {
        DichotomyBranch::Survival
    };
    let _ = all_survived;
    Ok(RefinementTrace {
        c,
        lambda,
        d,
        k,
        beta: None,
        levels,
        branch,
        size_bound_lhs,
        size_bound_rhs,
    })
}
