//! Generators for extremal families and a hill-climbing probe for small
//! unions.
//!
//! The parallel-planes generator realizes the sharpness witnesses: all lines
//! (or k-flats) inside N disjoint translates of a coordinate d-plane. With
//! N = q^beta translates the family has at least `q^{2(d-1)+beta}` lines
//! while its union stays at exactly `N q^d` points.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::FlatFamily;
use crate::field::PrimeField;
use crate::flat::{enumerate_direction_spaces, enumerate_flats, AffineFlat};
use crate::foliation::foliate;
use crate::linalg::Matrix;

/// How the host d-planes are arranged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneMode {
    /// Disjoint translates of one coordinate d-subspace; at most q of them.
    Parallel,
    /// d-planes through a common (d-1)-subspace; at most (q^{n-d+1}-1)/(q-1).
    Pencil,
}

/// All k-flats contained in `n_planes` host d-planes of F_q^n.
pub fn flats_in_planes(
    d: usize,
    k: usize,
    n_planes: usize,
    n: usize,
    field: &PrimeField,
    mode: PlaneMode,
) -> Result<FlatFamily> {
    if d >= n {
        return Err(Error::InvalidDimension { what: "host plane dimension", value: d, limit: n - 1 });
    }
    if k > d {
        return Err(Error::InvalidDimension { what: "member dimension", value: k, limit: d });
    }
    let q = field.modulus() as usize;
    let hosts = host_planes(d, n, field, mode)?;
    if n_planes > hosts.len() {
        return Err(Error::OversizeRequest { requested: n_planes as u64, available: hosts.len() as u64 });
    }
    let _ = q;
    let mut members = Vec::new();
    for host in hosts.into_iter().take(n_planes) {
        members.extend(host.subflats(k)?);
    }
    FlatFamily::new(*field, n, k, members)
}

/// The spec-facing line version.
pub fn planes_family_lines(
    d: usize,
    n_planes: usize,
    n: usize,
    field: &PrimeField,
    mode: PlaneMode,
) -> Result<FlatFamily> {
    flats_in_planes(d, 1, n_planes, n, field, mode)
}

fn host_planes(d: usize, n: usize, field: &PrimeField, mode: PlaneMode) -> Result<Vec<AffineFlat>> {
    let mut rows = vec![vec![0u32; n]; d];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 1;
    }
    match mode {
        PlaneMode::Parallel => {
            let spanning = Matrix::from_rows(&rows, n)?;
            let mut out = Vec::new();
            for t in field.elements() {
                let mut base = vec![0u32; n];
                base[d] = t;
                out.push(AffineFlat::canonicalize(&base, &spanning, field)?);
            }
            Ok(out)
        }
        PlaneMode::Pencil => {
            // hosts = W + V over 1-dim subspaces V of the complement of the
            // common (d-1)-subspace W = span(e_0 .. e_{d-2})
            let shared: Vec<Vec<u32>> = rows[..d - 1].to_vec();
            let complement_cols: Vec<usize> = (d - 1..n).collect();
            let mut out = Vec::new();
            for v in enumerate_direction_spaces(field, n - d + 1, 1)? {
                let mut ambient = vec![0u32; n];
                for (local, &col) in complement_cols.iter().enumerate() {
                    ambient[col] = v.at(0, local);
                }
                let mut span_rows = shared.clone();
                span_rows.push(ambient);
                let spanning = Matrix::from_rows(&span_rows, n)?;
                out.push(AffineFlat::canonicalize(&vec![0; n], &spanning, field)?);
            }
            out.sort();
            Ok(out)
        }
    }
}

/// Lines meeting the given line in exactly one point, sampled per leaf plane
/// at the given density. Deterministic under the seed.
pub fn hairbrush_family(center: &AffineFlat, density: f64, seed: u64) -> Result<FlatFamily> {
    if center.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: center.dim() });
    }
    if center.ambient_dim() < 2 {
        return Err(Error::InvalidDimension { what: "ambient dimension", value: center.ambient_dim(), limit: 2 });
    }
    let density = density.clamp(0.0, 1.0);
    let field = center.field();
    let fol = foliate(center, 0, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = Vec::new();
    for leaf in &fol.leaves {
        let mut candidates: Vec<AffineFlat> = leaf
            .subflats(1)?
            .into_iter()
            .filter(|l| matches!(l.intersection_dim(center), Ok(Some(0))))
            .collect();
        let take = ((density * candidates.len() as f64).round() as usize).min(candidates.len());
        candidates.shuffle(&mut rng);
        candidates.truncate(take);
        members.extend(candidates);
    }
    FlatFamily::new(field, center.ambient_dim(), 1, members)
}

/// Uniform without-replacement sample of k-flats, deterministic per seed.
pub fn random_family(
    n: usize,
    k: usize,
    size: usize,
    field: &PrimeField,
    seed: u64,
) -> Result<FlatFamily> {
    let all = enumerate_flats(field, n, k)?;
    if size > all.len() {
        return Err(Error::OversizeRequest { requested: size as u64, available: all.len() as u64 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = all;
    // partial Fisher-Yates: the first `size` slots become the sample
    for i in 0..size {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(size);
    FlatFamily::new(*field, n, k, pool)
}

/// Outcome of the union-minimizing search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub family: FlatFamily,
    pub union_points: u64,
    pub improving_moves: u64,
    pub sideways_moves: u64,
    pub proposals: u64,
}

/// Hill-climbing swap search: repeatedly propose swapping one member for one
/// non-member and keep the move when the union does not grow. Sideways moves
/// are accepted and counted. The union never increases.
pub fn minimize_union(start: &FlatFamily, seed: u64, steps: u64) -> Result<SearchResult> {
    let field = start.field();
    let n = start.ambient_dim();
    let k = start.flat_dim();
    let mut members: Vec<AffineFlat> = start.members().to_vec();
    let mut pool: Vec<AffineFlat> = enumerate_flats(&field, n, k)?
        .into_iter()
        .filter(|f| !start.contains(f))
        .collect();
    let union_of = |members: &[AffineFlat]| -> Result<u64> {
        let fam = FlatFamily::new(field, n, k, members.to_vec())?;
        fam.union_point_count()
    };
    let mut current = union_of(&members)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut improving = 0u64;
    let mut sideways = 0u64;
    for _ in 0..steps {
        if members.is_empty() || pool.is_empty() {
            break;
        }
        let mi = rng.gen_range(0..members.len());
        let pi = rng.gen_range(0..pool.len());
        std::mem::swap(&mut members[mi], &mut pool[pi]);
        let candidate = union_of(&members)?;
        if candidate < current {
            current = candidate;
            improving += 1;
        } else if candidate == current {
            sideways += 1;
        } else {
            std::mem::swap(&mut members[mi], &mut pool[pi]); // revert
        }
    }
    Ok(SearchResult {
        family: FlatFamily::new(field, n, k, members)?,
        union_points: current,
        improving_moves: improving,
        sideways_moves: sideways,
        proposals: steps,
    })
}

/// Random start plus hill climbing, sharing one seed.
pub fn minimize_union_random(
    n: usize,
    k: usize,
    size: usize,
    field: &PrimeField,
    seed: u64,
    steps: u64,
) -> Result<SearchResult> {
    let start = random_family(n, k, size, field, seed)?;
    minimize_union(&start, seed, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_flats;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn single_plane_witness() {
        // d=2, N=1, q=3: 12 lines with union exactly q^2 = 9
        let field = f(3);
        let fam = planes_family_lines(2, 1, 3, &field, PlaneMode::Parallel).unwrap();
        assert_eq!(fam.len(), 12);
        assert_eq!(fam.union_point_count().unwrap(), 9);
    }

    #[test]
    fn parallel_translates_witness() {
        // d=2, N=3, q=3: 36 lines, union exactly 27 = q^{d+1}
        let field = f(3);
        let fam = planes_family_lines(2, 3, 3, &field, PlaneMode::Parallel).unwrap();
        assert_eq!(fam.len(), 36);
        assert_eq!(fam.union_point_count().unwrap(), 27);
        assert!(planes_family_lines(2, 4, 3, &field, PlaneMode::Parallel).is_err());
    }

    #[test]
    fn parallel_counts_are_exact() {
        for (d, q, n) in [(1usize, 2u32, 3usize), (2, 2, 3), (2, 3, 3), (2, 3, 4)] {
            let field = f(q);
            for big_n in 1..=q as usize {
                let fam =
                    planes_family_lines(d, big_n, n, &field, PlaneMode::Parallel).unwrap();
                let per_plane = count_flats(d, 1, q as u64).unwrap();
                assert_eq!(fam.len() as u128, big_n as u128 * per_plane);
                assert_eq!(
                    fam.union_point_count().unwrap() as u128,
                    big_n as u128 * crate::counting::power(q as u64, d as u32).unwrap()
                );
            }
        }
    }

    #[test]
    fn pencil_overlaps_only_in_the_shared_flat() {
        // pencil planes share the (d-1)-subspace, so their line counts
        // overlap exactly in the lines of that shared flat
        let field = f(3);
        let fam = planes_family_lines(2, 2, 3, &field, PlaneMode::Pencil).unwrap();
        // two planes of 12 lines sharing one line
        assert_eq!(fam.len(), 23);
    }

    #[test]
    fn pencil_of_all_planes_covers_lines_of_bigger_flat() {
        // all pencil planes through a common line inside F_2^3: every line
        // of the 3-space that meets the shared line lives in some host
        let field = f(2);
        let hosts = super::host_planes(2, 3, &field, PlaneMode::Pencil).unwrap();
        assert_eq!(hosts.len(), 3);
    }

    #[test]
    fn hairbrush_density_extremes() {
        let field = f(3);
        let center = AffineFlat::canonicalize(
            &[0, 0, 0],
            &Matrix::from_rows(&[vec![1, 0, 0]], 3).unwrap(),
            &field,
        )
        .unwrap();
        let all = hairbrush_family(&center, 1.0, 0).unwrap();
        assert_eq!(all.len(), 36);
        for line in all.iter() {
            assert_eq!(line.intersection_dim(&center).unwrap(), Some(0));
        }
        let none = hairbrush_family(&center, 0.0, 0).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn hairbrush_in_the_plane() {
        // n=2: all lines meeting the center in one point = q^2 of them
        let field = f(3);
        let center = AffineFlat::canonicalize(
            &[0, 0],
            &Matrix::from_rows(&[vec![1, 0]], 2).unwrap(),
            &field,
        )
        .unwrap();
        let fam = hairbrush_family(&center, 1.0, 5).unwrap();
        assert_eq!(fam.len(), 9);
    }

    #[test]
    fn random_family_is_deterministic_and_saturates() {
        let field = f(2);
        let a = random_family(3, 1, 10, &field, 99).unwrap();
        let b = random_family(3, 1, 10, &field, 99).unwrap();
        assert_eq!(a, b);
        let c = random_family(3, 1, 10, &field, 100).unwrap();
        assert_ne!(a, c);
        assert!(random_family(3, 1, 0, &field, 1).unwrap().is_empty());
        let all = random_family(3, 1, 28, &field, 7).unwrap();
        assert_eq!(all.len(), 28);
        assert!(random_family(3, 1, 29, &field, 7).is_err());
    }

    #[test]
    fn search_is_monotone_from_optimal_start() {
        let field = f(3);
        let start = planes_family_lines(2, 1, 3, &field, PlaneMode::Parallel).unwrap();
        let res = minimize_union(&start, 3, 200).unwrap();
        assert!(res.union_points <= 9);
    }

    #[test]
    fn zero_steps_returns_the_start() {
        let field = f(3);
        let start = random_family(3, 1, 12, &field, 11).unwrap();
        let res = minimize_union(&start, 11, 0).unwrap();
        assert_eq!(res.family, start);
        assert_eq!(res.union_points, start.union_point_count().unwrap());
    }

    #[test]
    fn search_never_increases_union() {
        let field = f(3);
        let start = random_family(3, 1, 12, &field, 42).unwrap();
        let initial = start.union_point_count().unwrap();
        let res = minimize_union(&start, 42, 500).unwrap();
        assert!(res.union_points <= initial);
        assert_eq!(res.union_points, res.family.union_point_count().unwrap());
    }
}
