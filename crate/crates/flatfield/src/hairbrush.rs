//! The full hairbrush pipeline for a family of lines: select planes, refine
//! by popularity, pick the plane whose part survived best, gather the lines
//! crossing it in a single point, foliate, and bucket per leaf.
//!
//! Every intermediate quantity lands in an exact ledger row. Rows that
//! restate provable postconditions (per-leaf caps, partitions) must pass;
//! rows that restate scaling claims carry the measured value against the
//! claimed power of q and are recorded without being asserted, since small
//! fields may genuinely miss them.

use std::collections::HashSet;

use crate::counting::real_power;
use crate::decompose::{select_planes, Decomposition};
use crate::error::{Error, Result};
use crate::family::{points_as_family, FlatFamily};
use crate::flat::AffineFlat;
use crate::foliation::foliate;
use crate::refine::sharpen;

/// One exact inequality observation: `lhs` against `rhs`, with their ratio.
#[derive(Debug, Clone)]
pub struct LedgerRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl LedgerRow {
    fn at_least(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let name = name.into();
        let ratio = if rhs == 0.0 { f64::INFINITY } else { lhs / rhs };
        LedgerRow { name, lhs, rhs, ratio, pass: lhs >= rhs }
    }

    fn strictly_below(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let name = name.into();
        let ratio = if rhs == 0.0 { f64::INFINITY } else { lhs / rhs };
        LedgerRow { name, lhs, rhs, ratio, pass: lhs < rhs }
    }

    fn equals(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let name = name.into();
        let ratio = if rhs == 0.0 { f64::INFINITY } else { lhs / rhs };
        LedgerRow { name, lhs, rhs, ratio, pass: lhs == rhs }
    }

    fn vacuous(name: impl Into<String>, rhs: f64) -> Self {
        LedgerRow { name: format!("{}(vacuous)", name.into()), lhs: 0.0, rhs, ratio: 0.0, pass: true }
    }
}

/// Lines and outside points of one foliation leaf.
#[derive(Debug, Clone)]
pub struct LeafBucket {
    pub leaf: AffineFlat,
    pub lines: FlatFamily,
    /// Points of the union outside the chosen plane that land in this leaf.
    pub points: u64,
}

#[derive(Debug, Clone)]
pub struct HairbrushTrace {
    pub d: usize,
    pub m: usize,
    /// Exponent offset inferred from the family size: log_q |L| - 2(d-1),
    /// clamped to the meaningful range.
    pub beta: f64,
    pub c: f64,
    pub lambda: f64,
    pub chosen_index: usize,
    pub chosen_plane: AffineFlat,
    pub part_size: u64,
    pub sharp_part_size: u64,
    pub selected_ratio: f64,
    pub sharp_points_in_plane: u64,
    /// Lines of the selected level meeting the chosen plane in one point.
    pub crossing: FlatFamily,
    pub outside_points: u64,
    pub union_points: u64,
    pub buckets: Vec<LeafBucket>,
    pub ledger: Vec<LedgerRow>,
}

#[derive(Debug, Clone)]
pub enum HairbrushOutcome {
    /// Plane selection already stopped at level d; the per-plane recursion
    /// applies and there is no hairbrush to build.
    CaseOne { decomposition: Decomposition },
    CaseTwo { decomposition: Decomposition, trace: Box<HairbrushTrace> },
}

/// Run the pipeline on a family of lines with parameters (d, C, lambda).
pub fn hairbrush_decompose(
    lines: &FlatFamily,
    d: usize,
    c: f64,
    lambda: f64,
) -> Result<HairbrushOutcome> {
    if lines.flat_dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: lines.flat_dim() });
    }
    let decomposition = select_planes(lines, d)?;
    if decomposition.m == d {
        return Ok(HairbrushOutcome::CaseOne { decomposition });
    }
    let m = decomposition.m;
    let q = lines.field().modulus() as u64;
    let beta = ((lines.len() as f64).log(q as f64) - 2.0 * (d as f64 - 1.0))
        .clamp((1.0 - d as f64).max(-1.0), 1.0);

    // points of the union, refined by the popularity cuts over the full family
    let union_codes = lines.union_point_codes()?;
    let points = points_as_family(lines.field(), lines.ambient_dim(), &union_codes);
    let degree_cut = c * real_power(q, d as f64 - 1.0 - (1.0 - beta) / 2.0);
    let richness_cut = lambda * q as f64 / 4.0;
    let (sharp_lines, sharp_points) = sharpen(lines, &points, degree_cut, richness_cut)?;

    // pick the part with the best sharp survival ratio
    let mut chosen_index = 0;
    let mut best_ratio = -1.0;
    let mut best_sharp = 0u64;
    for (j, part) in decomposition.parts.iter().enumerate() {
        let sharp = part.iter().filter(|l| sharp_lines.contains(l)).count() as u64;
        let ratio = sharp as f64 / part.len() as f64;
        if ratio > best_ratio {
            best_ratio = ratio;
            best_sharp = sharp;
            chosen_index = j;
        }
    }
    let chosen_plane = decomposition.planes[chosen_index].clone();
    let part = &decomposition.parts[chosen_index];

    // points of the refined set inside the plane, union points outside it
    let plane_codes: HashSet<u64> = chosen_plane.point_codes()?.into_iter().collect();
    let sharp_points_in_plane = sharp_points
        .iter()
        .filter(|pt| plane_codes.contains(&crate::flat::point_code(pt.base(), pt.modulus())))
        .count() as u64;
    let outside_points =
        union_codes.iter().filter(|code| !plane_codes.contains(code)).count() as u64;

    // lines of the selected level crossing the plane in exactly one point
    let mut crossing_members = Vec::new();
    for line in decomposition.selected.iter() {
        if line.intersection_dim(&chosen_plane)? == Some(0) {
            crossing_members.push(line.clone());
        }
    }
    let crossing =
        FlatFamily::new(lines.field(), lines.ambient_dim(), 1, crossing_members)?;

    // foliate and bucket
    let fol = foliate(&chosen_plane, 0, 1)?;
    let mut buckets = Vec::with_capacity(fol.leaf_count());
    for leaf in &fol.leaves {
        let mut leaf_lines = Vec::new();
        for line in crossing.iter() {
            if leaf.contains_flat(line)? {
                leaf_lines.push(line.clone());
            }
        }
        let leaf_codes: HashSet<u64> = leaf.point_codes()?.into_iter().collect();
        let pts = union_codes
            .iter()
            .filter(|code| leaf_codes.contains(code) && !plane_codes.contains(code))
            .count() as u64;
        buckets.push(LeafBucket {
            leaf: leaf.clone(),
            lines: FlatFamily::new(lines.field(), lines.ambient_dim(), 1, leaf_lines)?,
            points: pts,
        });
    }

    // ledger
    let mut ledger = Vec::new();
    ledger.push(LedgerRow::at_least(
        "selected-part-size",
        part.len() as f64,
        real_power(q, 2.0 * m as f64 - 3.0),
    ));
    ledger.push(LedgerRow::at_least(
        "sharp-survival",
        sharp_lines.len() as f64,
        decomposition.selected.len() as f64 / 8.0,
    ));
    ledger.push(LedgerRow::at_least(
        "size-bound",
        points.len() as f64,
        0.5 * lambda * q as f64 * decomposition.selected.len() as f64 / degree_cut,
    ));
    ledger.push(LedgerRow::at_least(
        "sharp-points-in-plane",
        sharp_points_in_plane as f64,
        real_power(q, m as f64),
    ));
    if sharp_points_in_plane == 0 {
        ledger.push(LedgerRow::vacuous("crossing-degree-min", 0.5 * degree_cut));
    } else {
        let mut min_deg = u64::MAX;
        for pt in sharp_points.iter() {
            if !plane_codes.contains(&crate::flat::point_code(pt.base(), pt.modulus())) {
                continue;
            }
            min_deg = min_deg.min(crossing.degree(pt)?);
        }
        ledger.push(LedgerRow::at_least(
            "crossing-degree-min",
            min_deg as f64,
            0.5 * degree_cut,
        ));
    }
    ledger.push(LedgerRow::at_least(
        "crossing-size",
        crossing.len() as f64,
        real_power(q, m as f64 + d as f64 - 1.0 - (1.0 - beta) / 2.0),
    ));
    let cap = real_power(q, 2.0 * (m as f64 - 1.0) + 1.0);
    let mut line_total = 0u64;
    let mut point_total = 0u64;
    for (i, bucket) in buckets.iter().enumerate() {
        line_total += bucket.lines.len() as u64;
        point_total += bucket.points;
        if bucket.lines.is_empty() {
            ledger.push(LedgerRow::vacuous(format!("leaf-cap[{i}]"), cap));
            continue;
        }
        ledger.push(LedgerRow::strictly_below(
            format!("leaf-cap[{i}]"),
            bucket.lines.len() as f64,
            cap,
        ));
        ledger.push(LedgerRow::at_least(
            format!("leaf-points[{i}]"),
            bucket.points as f64,
            bucket.lines.len() as f64 / real_power(q, m as f64 - 2.0),
        ));
    }
    ledger.push(LedgerRow::equals("buckets-partition", line_total as f64, crossing.len() as f64));
    ledger.push(LedgerRow::equals(
        "points-partition",
        point_total as f64,
        outside_points as f64,
    ));
    ledger.push(LedgerRow::at_least(
        "leaf-point-total",
        point_total as f64,
        crossing.len() as f64 / real_power(q, m as f64 - 2.0),
    ));
    ledger.push(LedgerRow::at_least(
        "union-floor",
        union_codes.len() as f64,
        real_power(q, d as f64 + (beta + 1.0) / 2.0),
    ));

    Ok(HairbrushOutcome::CaseTwo {
        trace: Box::new(HairbrushTrace {
            d,
            m,
            beta,
            c,
            lambda,
            chosen_index,
            chosen_plane,
            part_size: part.len() as u64,
            sharp_part_size: best_sharp,
            selected_ratio: best_ratio,
            sharp_points_in_plane,
            crossing,
            outside_points,
            union_points: union_codes.len() as u64,
            buckets,
            ledger,
        }),
        decomposition,
    })
}
