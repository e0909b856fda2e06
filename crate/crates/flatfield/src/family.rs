//! Families of same-dimension flats: the deduplicated collections whose
//! unions, degrees, and axiom verdicts the whole harness measures.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::flat::AffineFlat;
use crate::linalg::Matrix;

/// A deduplicated, canonically ordered set of k-flats sharing one ambient
/// space. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatFamily {
    field: PrimeField,
    n: usize,
    k: usize,
    members: Vec<AffineFlat>,
}

impl FlatFamily {
    /// Build a family from arbitrary flats; canonical duplicates collapse.
    /// All members must share the ambient space and dimension.
    pub fn new(
        field: PrimeField,
        n: usize,
        k: usize,
        flats: impl IntoIterator<Item = AffineFlat>,
    ) -> Result<Self> {
        let mut members: Vec<AffineFlat> = Vec::new();
        for flat in flats {
            if flat.modulus() != field.modulus() || flat.ambient_dim() != n {
                return Err(Error::AmbientMismatch);
            }
            if flat.dim() != k {
                return Err(Error::DimensionMismatch { expected: k, got: flat.dim() });
            }
            members.push(flat);
        }
        members.sort();
        members.dedup();
        Ok(FlatFamily { field, n, k, members })
    }

    pub fn empty(field: PrimeField, n: usize, k: usize) -> Self {
        FlatFamily { field, n, k, members: Vec::new() }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn flat_dim(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[AffineFlat] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AffineFlat> {
        self.members.iter()
    }

    pub fn contains(&self, flat: &AffineFlat) -> bool {
        self.members.binary_search(flat).is_ok()
    }

    /// Family with the given members removed.
    pub fn without(&self, drop: &[AffineFlat]) -> FlatFamily {
        let drop: HashSet<&AffineFlat> = drop.iter().collect();
        FlatFamily {
            field: self.field,
            n: self.n,
            k: self.k,
            members: self.members.iter().filter(|m| !drop.contains(m)).cloned().collect(),
        }
    }

    /// Exact number of distinct points covered by the union of all members.
    pub fn union_point_count(&self) -> Result<u64> {
        Ok(self.union_point_codes()?.len() as u64)
    }

    /// Distinct point codes of the union (guarded per flat and in total).
    pub fn union_point_codes(&self) -> Result<HashSet<u64>> {
        let per_flat = crate::counting::power(self.field.modulus() as u64, self.k as u32)?;
        let total = per_flat * self.members.len() as u128;
        let guard = crate::flat::enumeration_guard();
        if total > guard as u128 {
            return Err(Error::GuardExceeded { requested: total, guard });
        }
        let mut set = HashSet::new();
        for flat in &self.members {
            for code in flat.point_codes()? {
                set.insert(code);
            }
        }
        Ok(set)
    }

    /// Exact number of distinct k'-flats contained in at least one member.
    /// `k' = 0` counts points and agrees with `union_point_count`.
    pub fn union_subflat_count(&self, k_prime: usize) -> Result<u64> {
        if k_prime >= self.k {
            return Err(Error::InvalidDimension {
                what: "subflat dimension",
                value: k_prime,
                limit: self.k.saturating_sub(1),
            });
        }
        let mut seen: HashSet<AffineFlat> = HashSet::new();
        for flat in &self.members {
            for sub in flat.subflats(k_prime)? {
                seen.insert(sub);
            }
        }
        Ok(seen.len() as u64)
    }

    /// All distinct k'-flats covered by members, as a family.
    pub fn covered_subflats(&self, k_prime: usize) -> Result<FlatFamily> {
        if k_prime >= self.k {
            return Err(Error::InvalidDimension {
                what: "subflat dimension",
                value: k_prime,
                limit: self.k.saturating_sub(1),
            });
        }
        let mut all = Vec::new();
        for flat in &self.members {
            all.extend(flat.subflats(k_prime)?);
        }
        FlatFamily::new(self.field, self.n, k_prime, all)
    }

    /// Number of members containing the given flat. The probe must have
    /// strictly smaller dimension than the members.
    pub fn degree(&self, probe: &AffineFlat) -> Result<u64> {
        if probe.dim() >= self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: probe.dim() });
        }
        let mut count = 0u64;
        for member in &self.members {
            if member.contains_flat(probe)? {
                count += 1;
            }
        }
        Ok(count)
    }

    /// For a family of lines: do all members point in pairwise distinct
    /// directions? (Direction-separated collections automatically satisfy
    /// the two-plane axiom up to a constant.)
    pub fn distinct_directions(&self) -> Result<bool> {
        if self.k != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.k });
        }
        let mut seen = HashSet::new();
        for member in &self.members {
            if !seen.insert(member.dirs().clone()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    // ---- file format ----------------------------------------------------

    pub fn to_json(&self) -> String {
        let file = FamilyFile {
            p: self.field.modulus(),
            n: self.n,
            k: self.k,
            flats: self
                .members
                .iter()
                .map(|m| FlatRepr { base: m.base().to_vec(), dirs: m.dirs().row_vecs() })
                .collect(),
        };
        serde_json::to_string(&file).expect("family serialization cannot fail")
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(self.to_json().as_bytes())?;
        w.write_all(b"\n")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    /// Parse a family file. Flats are stored non-canonically; they are
    /// canonicalized and deduplicated here.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text)
            .map_err(|e| Error::HypothesisViolation(format!("bad family file: {e}")))?;
        let field = PrimeField::new(file.p)?;
        let mut flats = Vec::with_capacity(file.flats.len());
        for repr in &file.flats {
            if repr.base.len() != file.n {
                return Err(Error::DimensionMismatch { expected: file.n, got: repr.base.len() });
            }
            let spanning = Matrix::from_rows(&repr.dirs, file.n)?;
            let flat = AffineFlat::canonicalize(&repr.base, &spanning, &field)?;
            if flat.dim() != file.k {
                return Err(Error::DimensionMismatch { expected: file.k, got: flat.dim() });
            }
            flats.push(flat);
        }
        FlatFamily::new(field, file.n, file.k, flats)
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)
            .map_err(|e| Error::HypothesisViolation(format!("family file unreadable: {e}")))?;
        Self::from_json(&text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::HypothesisViolation(format!("family file unreadable: {e}")))?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

/// On-disk family format. Key order is fixed by field order here.
#[derive(Serialize, Deserialize)]
struct FamilyFile {
    p: u32,
    n: usize,
    k: usize,
    flats: Vec<FlatRepr>,
}

#[derive(Serialize, Deserialize)]
struct FlatRepr {
    base: Vec<u32>,
    dirs: Vec<Vec<u32>>,
}

/// Helper used across the crate: a family of 0-flats from raw points.
pub fn points_as_family(field: PrimeField, n: usize, codes: &HashSet<u64>) -> FlatFamily {
    let p = field.modulus();
    let mut flats = Vec::with_capacity(codes.len());
    for &code in codes {
        let mut c = code;
        let mut coords = vec![0u32; n];
        for x in coords.iter_mut() {
            *x = (c % p as u64) as u32;
            c /= p as u64;
        }
        flats.push(AffineFlat::point(&coords, &field));
    }
    FlatFamily::new(field, n, 0, flats).expect("points share the ambient space")
}

/// Decode a packed point code back into coordinates.
pub fn decode_point(code: u64, p: u32, n: usize) -> Vec<u32> {
    let mut c = code;
    let mut coords = vec![0u32; n];
    for x in coords.iter_mut() {
        *x = (c % p as u64) as u32;
        c /= p as u64;
    }
    coords
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat::enumerate_flats;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn line(base: &[u32], dir: &[u32], field: &PrimeField) -> AffineFlat {
        let m = Matrix::from_rows(&[dir.to_vec()], base.len()).unwrap();
        AffineFlat::canonicalize(base, &m, field).unwrap()
    }

    #[test]
    fn dedup_on_construction() {
        let field = f(3);
        let l1 = line(&[0, 0], &[1, 1], &field);
        let l2 = line(&[1, 1], &[2, 2], &field); // same line, different generators
        let fam = FlatFamily::new(field, 2, 1, vec![l1.clone(), l2]).unwrap();
        assert_eq!(fam.len(), 1);
        assert!(fam.contains(&l1));
    }

    #[test]
    fn union_single_line_over_f5() {
        let field = f(5);
        let fam = FlatFamily::new(field, 2, 1, vec![line(&[0, 0], &[1, 2], &field)]).unwrap();
        assert_eq!(fam.union_point_count().unwrap(), 5);
    }

    #[test]
    fn union_of_planar_lines_is_the_plane() {
        // all 12 lines of the z=0 plane inside F_3^3 cover exactly its 9 points
        let field = f(3);
        let plane = AffineFlat::canonicalize(
            &[0, 0, 0],
            &Matrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0]], 3).unwrap(),
            &field,
        )
        .unwrap();
        let lines = plane.subflats(1).unwrap();
        assert_eq!(lines.len(), 12);
        let fam = FlatFamily::new(field, 3, 1, lines).unwrap();
        assert_eq!(fam.union_point_count().unwrap(), 9);
    }

    #[test]
    fn union_of_disjoint_planes_adds_up() {
        let field = f(2);
        let mk = |z: u32| {
            AffineFlat::canonicalize(
                &[0, 0, z],
                &Matrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0]], 3).unwrap(),
                &field,
            )
            .unwrap()
        };
        let fam = FlatFamily::new(field, 3, 2, vec![mk(0), mk(1)]).unwrap();
        assert_eq!(fam.union_point_count().unwrap(), 8);
    }

    #[test]
    fn union_subflats_examples() {
        let field = f(2);
        let plane = AffineFlat::canonicalize(
            &[0, 0, 0],
            &Matrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0]], 3).unwrap(),
            &field,
        )
        .unwrap();
        let fam = FlatFamily::new(field, 3, 2, vec![plane]).unwrap();
        assert_eq!(fam.union_subflat_count(1).unwrap(), 6);

        let all_planes = FlatFamily::new(field, 3, 2, enumerate_flats(&field, 3, 2).unwrap()).unwrap();
        assert_eq!(all_planes.len(), 14);
        assert_eq!(all_planes.union_subflat_count(1).unwrap(), 28);
        assert_eq!(
            all_planes.union_subflat_count(0).unwrap(),
            all_planes.union_point_count().unwrap()
        );
        assert!(all_planes.union_subflat_count(2).is_err());
    }

    #[test]
    fn degree_examples() {
        let field = f(3);
        let through_origin: Vec<AffineFlat> = enumerate_flats(&field, 2, 1)
            .unwrap()
            .into_iter()
            .filter(|l| l.contains_point(&[0, 0]).unwrap())
            .collect();
        assert_eq!(through_origin.len(), 4);
        let fam = FlatFamily::new(field, 2, 1, through_origin).unwrap();
        let origin = AffineFlat::point(&[0, 0], &field);
        assert_eq!(fam.degree(&origin).unwrap(), 4);
        let off = AffineFlat::point(&[1, 0], &field);
        assert_eq!(fam.degree(&off).unwrap(), 1);
        let nowhere = FlatFamily::empty(field, 2, 1);
        assert_eq!(nowhere.degree(&origin).unwrap(), 0);
    }

    #[test]
    fn family_file_round_trip_canonicalizes() {
        let text = r#"{"p":3,"n":2,"k":1,"flats":[
            {"base":[1,1],"dirs":[[2,2]]},
            {"base":[0,0],"dirs":[[1,1]]}
        ]}"#;
        let fam = FlatFamily::from_json(text).unwrap();
        assert_eq!(fam.len(), 1); // both records name the same line
        let fam2 = FlatFamily::from_json(&fam.to_json()).unwrap();
        assert_eq!(fam, fam2);
    }

    #[test]
    fn distinct_directions_predicate() {
        let field = f(3);
        let fam = FlatFamily::new(
            field,
            2,
            1,
            vec![line(&[0, 0], &[1, 0], &field), line(&[0, 1], &[1, 0], &field)],
        )
        .unwrap();
        assert!(!fam.distinct_directions().unwrap());
        let fam2 = FlatFamily::new(
            field,
            2,
            1,
            vec![line(&[0, 0], &[1, 0], &field), line(&[0, 0], &[0, 1], &field)],
        )
        .unwrap();
        assert!(fam2.distinct_directions().unwrap());
    }
}
