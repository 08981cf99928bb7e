//! Similarity classes: invariant factors for GL, cycle types for symmetric
//! groups, orbit indices for symplectic groups.

mod poly;
mod smith;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

pub use poly::PolyFq;
pub use smith::{invariant_factors, smith_diagonal};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{gl_order, par_enumerate_gl, Matrix};
use crate::text::Cursor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyKind {
    Gl,
    Sym,
    Sp,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Gl => "gl",
            FamilyKind::Sym => "sym",
            FamilyKind::Sp => "sp",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gl" => Ok(FamilyKind::Gl),
            "sym" => Ok(FamilyKind::Sym),
            "sp" => Ok(FamilyKind::Sp),
            other => Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
        }
    }
}

/// A conjugacy class of `G_d` for one of the three families. The degree `d`
/// is the size of the subobject the class lives on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConjClassLabel {
    /// Monic invariant factors `f_1 | ... | f_m` with total degree `d`.
    Gl { factors: Vec<PolyFq> },
    /// Partition of `d`, parts in decreasing order.
    Sym { cycle_type: Vec<usize> },
    /// Position of the class in the orbit list of Sp_{2c}(F_q), `c = half_dim`.
    Sp { half_dim: usize, index: usize },
}

impl ConjClassLabel {
    pub fn family(&self) -> FamilyKind {
        match self {
            ConjClassLabel::Gl { .. } => FamilyKind::Gl,
            ConjClassLabel::Sym { .. } => FamilyKind::Sym,
            ConjClassLabel::Sp { .. } => FamilyKind::Sp,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            ConjClassLabel::Gl { factors } => factors.iter().map(|f| f.degree().unwrap_or(0)).sum(),
            ConjClassLabel::Sym { cycle_type } => cycle_type.iter().sum(),
            ConjClassLabel::Sp { half_dim, .. } => *half_dim,
        }
    }

    /// The degree-0 class of the given family: the constant function 1.
    pub fn unit(family: FamilyKind) -> ConjClassLabel {
        match family {
            FamilyKind::Gl => ConjClassLabel::Gl { factors: Vec::new() },
            FamilyKind::Sym => ConjClassLabel::Sym { cycle_type: Vec::new() },
            FamilyKind::Sp => ConjClassLabel::Sp { half_dim: 0, index: 0 },
        }
    }

    pub fn of_gl_matrix(a: &Matrix, field: &Field) -> Result<ConjClassLabel> {
        if !a.is_invertible(field) {
            return Err(Error::Singular);
        }
        Ok(ConjClassLabel::Gl {
            factors: invariant_factors(a, field)?,
        })
    }

    pub fn cycle_type(mut parts: Vec<usize>) -> ConjClassLabel {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        ConjClassLabel::Sym { cycle_type: parts }
    }

    /// Class-spec syntax; see [`parse_class_spec`]. `field` is needed only
    /// for GL labels.
    pub fn format(&self, field: Option<&Field>) -> String {
        match self {
            ConjClassLabel::Gl { factors } => {
                let polys: Vec<String> = factors
                    .iter()
                    .map(|f| match field {
                        Some(field) => f.format(field),
                        None => format!("{:?}", f.coefficients()),
                    })
                    .collect();
                format!("invfac:[{}]", polys.join(", "))
            }
            ConjClassLabel::Sym { cycle_type } => {
                let parts: Vec<String> = cycle_type.iter().map(|p| p.to_string()).collect();
                format!("cycletype:[{}]", parts.join(","))
            }
            ConjClassLabel::Sp { half_dim: 1, index } => format!("sp:{index}"),
            ConjClassLabel::Sp { half_dim, index } => format!("sp:{half_dim}/{index}"),
        }
    }
}

/// Family first, then degree, then the payload (factor lists compare
/// polynomial by polynomial, see [`PolyFq`]).
impl Ord for ConjClassLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |l: &ConjClassLabel| (l.family(), l.degree());
        key(self).cmp(&key(other)).then_with(|| match (self, other) {
            (ConjClassLabel::Gl { factors: a }, ConjClassLabel::Gl { factors: b }) => a.cmp(b),
            (ConjClassLabel::Sym { cycle_type: a }, ConjClassLabel::Sym { cycle_type: b }) => a.cmp(b),
            (ConjClassLabel::Sp { index: a, .. }, ConjClassLabel::Sp { index: b, .. }) => a.cmp(b),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for ConjClassLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Parses a class spec:
///
/// ```text
/// eig:<elt> | invfac:[<poly>(, <poly>)*] | cycletype:[a1,a2,...] | sp:<index> | sp:<c>/<index>
/// ```
///
/// `eig:λ` is the GL_1 class `[x - λ]`; `sp:<index>` refers to Sp_2, i.e. a
/// symplectic plane. GL specs need `field`; a missing field is a usage error.
pub fn parse_class_spec(text: &str, field: Option<&Field>) -> Result<ConjClassLabel> {
    let text_trim = text.trim_start();
    let lead = text.len() - text_trim.len();
    let Some(colon) = text_trim.find(':') else {
        return Err(Error::parse(1 + lead, "expected '<kind>:' prefix"));
    };
    let (kind, rest) = (&text_trim[..colon], &text_trim[colon + 1..]);
    let body_column = 1 + lead + colon + 1;
    let mut cur = Cursor::new(rest, body_column);
    let need_field = || {
        field.ok_or_else(|| Error::InvalidArgument(format!("class spec '{text}' needs a field (--q)")))
    };
    let label = match kind {
        "eig" => {
            let field = need_field()?;
            let lambda = field.parse_element_at(&mut cur)?;
            if lambda.is_zero() {
                return Err(Error::SingularClass("x".into()));
            }
            ConjClassLabel::Gl {
                factors: vec![PolyFq::linear(lambda, field)],
            }
        }
        "invfac" => {
            let field = need_field()?;
            cur.expect(b'[')?;
            let mut factors = Vec::new();
            if !cur.eat(b']') {
                loop {
                    let column = cur.column();
                    let f = PolyFq::parse_at(&mut cur, field)?;
                    if !f.is_monic() || f.degree().unwrap_or(0) == 0 {
                        return Err(Error::parse(column, "invariant factors must be monic and non-constant"));
                    }
                    factors.push(f);
                    if cur.eat(b']') {
                        break;
                    }
                    cur.expect(b',')?;
                }
            }
            validate_factors(&factors, field)?;
            ConjClassLabel::Gl { factors }
        }
        "cycletype" => {
            cur.expect(b'[')?;
            let mut parts = Vec::new();
            if !cur.eat(b']') {
                loop {
                    let column = cur.column();
                    let part = cur.integer()? as usize;
                    if part == 0 {
                        return Err(Error::parse(column, "cycle lengths must be positive"));
                    }
                    parts.push(part);
                    if cur.eat(b']') {
                        break;
                    }
                    cur.expect(b',')?;
                }
            }
            ConjClassLabel::cycle_type(parts)
        }
        "sp" => {
            let first = cur.integer()? as usize;
            if cur.eat(b'/') {
                let index = cur.integer()? as usize;
                ConjClassLabel::Sp { half_dim: first, index }
            } else {
                ConjClassLabel::Sp { half_dim: 1, index: first }
            }
        }
        other => {
            return Err(Error::parse(1 + lead, format!("unknown class kind '{other}'")));
        }
    };
    cur.expect_end()?;
    Ok(label)
}

fn validate_factors(factors: &[PolyFq], field: &Field) -> Result<()> {
    let shown = || {
        let v: Vec<String> = factors.iter().map(|f| f.format(field)).collect();
        format!("[{}]", v.join(", "))
    };
    if !factors.windows(2).all(|w| w[0].divides(&w[1], field)) {
        return Err(Error::DivisibilityChain(shown()));
    }
    if let Some(last) = factors.last() {
        if last.constant_term().is_zero() {
            return Err(Error::SingularClass(last.format(field)));
        }
    }
    Ok(())
}

/// One conjugacy class of a finite group: its label, the first element of
/// the group enumeration carrying it, and its size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo<E> {
    pub label: ConjClassLabel,
    pub representative: E,
    pub size: BigUint,
}

/// Conjugacy classes of GL_d(F_q) by bucketing every element on its
/// invariant factors. Sorted by label; sizes sum to |GL_d(F_q)|.
pub fn enumerate_classes(d: usize, field: &Field, cap: u64) -> Result<Vec<ClassInfo<Matrix>>> {
    let buckets = par_enumerate_gl(d, field, cap)?
        .map(|a| {
            let label = ConjClassLabel::Gl {
                factors: invariant_factors(&a, field).expect("element is invertible"),
            };
            let mut m = HashMap::new();
            m.insert(label, (1u64, a));
            m
        })
        .reduce(HashMap::new, |mut acc, other| {
            for (label, (count, rep)) in other {
                acc.entry(label)
                    .and_modify(|(c, r): &mut (u64, Matrix)| {
                        *c += count;
                        if rep < *r {
                            *r = rep.clone();
                        }
                    })
                    .or_insert((count, rep));
            }
            acc
        });
    let mut classes: Vec<ClassInfo<Matrix>> = buckets
        .into_iter()
        .map(|(label, (count, representative))| ClassInfo {
            label,
            representative,
            size: BigUint::from(count),
        })
        .collect();
    classes.sort_by(|a, b| a.label.cmp(&b.label));
    debug_assert_eq!(
        classes.iter().map(|c| &c.size).sum::<BigUint>(),
        gl_order(d, field.order())
    );
    Ok(classes)
}

/// Number of elements of GL_d(F_q) in the class, `d` being the label degree.
pub fn class_size(label: &ConjClassLabel, field: &Field, cap: u64) -> Result<BigUint> {
    if label.family() != FamilyKind::Gl {
        return Err(Error::FamilyMismatch {
            expected: "gl".into(),
            found: label.family().to_string(),
        });
    }
    enumerate_classes(label.degree(), field, cap)?
        .into_iter()
        .find(|c| &c.label == label)
        .map(|c| c.size)
        .ok_or_else(|| Error::UnknownClass(label.format(Some(field))))
}

/// Largest matrix-code space for which [`GlClassTable`] keeps a dense lookup.
const DENSE_TABLE_LIMIT: u64 = 1 << 22;

/// Maps invertible d x d matrices to their class index in
/// [`enumerate_classes`] order.
#[derive(Debug, Clone)]
pub struct GlClassTable {
    field: Field,
    d: usize,
    classes: Vec<ClassInfo<Matrix>>,
    by_label: HashMap<ConjClassLabel, usize>,
    /// `by_code[code]` = class index, `u32::MAX` for singular matrices.
    by_code: Option<Vec<u32>>,
}

impl GlClassTable {
    pub fn build(d: usize, field: &Field, cap: u64) -> Result<GlClassTable> {
        let classes = enumerate_classes(d, field, cap)?;
        let by_label: HashMap<_, _> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.label.clone(), i))
            .collect();
        let q = field.order() as u64;
        let space = q.checked_pow((d * d) as u32);
        let by_code = match space {
            Some(space) if space <= DENSE_TABLE_LIMIT => Some(
                (0..space)
                    .into_par_iter()
                    .map(|code| {
                        let a = Matrix::from_code(d, d, code, field);
                        if !a.is_invertible(field) {
                            return u32::MAX;
                        }
                        let label = ConjClassLabel::Gl {
                            factors: invariant_factors(&a, field).expect("invertible"),
                        };
                        by_label[&label] as u32
                    })
                    .collect(),
            ),
            _ => None,
        };
        Ok(GlClassTable {
            field: field.clone(),
            d,
            classes,
            by_label,
            by_code,
        })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn classes(&self) -> &[ClassInfo<Matrix>] {
        &self.classes
    }

    pub fn index_of_label(&self, label: &ConjClassLabel) -> Option<usize> {
        self.by_label.get(label).copied()
    }

    /// Class index of an invertible `d x d` matrix.
    pub fn class_of(&self, a: &Matrix) -> Option<usize> {
        debug_assert_eq!(a.rows(), self.d);
        match &self.by_code {
            Some(table) => {
                let id = table[a.code(self.field.order()) as usize];
                (id != u32::MAX).then_some(id as usize)
            }
            None => {
                let label = ConjClassLabel::of_gl_matrix(a, &self.field).ok()?;
                self.index_of_label(&label)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::enumerate_gl;

    fn sizes(d: usize, q: u32) -> Vec<u64> {
        let field = Field::of_order(q).unwrap();
        enumerate_classes(d, &field, 1 << 24)
            .unwrap()
            .iter()
            .map(|c| u64::try_from(&c.size).unwrap())
            .collect()
    }

    /// Conjugacy orbits by brute force: orbit of each element under every
    /// g, independent of invariant factors.
    fn brute_force_partition(d: usize, field: &Field) -> Vec<Vec<Matrix>> {
        let group: Vec<Matrix> = enumerate_gl(d, field, 1 << 24).unwrap().collect();
        let inverses: Vec<Matrix> = group.iter().map(|g| g.inverse(field).unwrap()).collect();
        let mut seen = std::collections::HashSet::new();
        let mut orbits = Vec::new();
        for a in &group {
            if seen.contains(a) {
                continue;
            }
            let mut orbit: Vec<Matrix> = group
                .iter()
                .zip(&inverses)
                .map(|(g, gi)| g.mul(a, field).unwrap().mul(gi, field).unwrap())
                .collect();
            orbit.sort();
            orbit.dedup();
            seen.extend(orbit.iter().cloned());
            orbits.push(orbit);
        }
        orbits
    }

    #[test]
    fn class_enumeration_examples() {
        assert_eq!(sizes(1, 3), [1, 1]);
        let mut s = sizes(2, 2);
        s.sort();
        assert_eq!(s, [1, 2, 3]);
        let s = sizes(2, 3);
        assert_eq!(s.len(), 8);
        assert_eq!(s.iter().sum::<u64>(), 48);
        assert_eq!(sizes(0, 2), [1]);
    }

    #[test]
    fn class_sizes_sum_to_and_divide_group_order() {
        for (d, q) in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (1, 4), (2, 4), (2, 5)] {
            let order = u64::try_from(gl_order(d, q)).unwrap();
            let s = sizes(d, q);
            assert_eq!(s.iter().sum::<u64>(), order);
            assert!(s.iter().all(|c| order % c == 0));
        }
    }

    #[test]
    fn labels_match_brute_force_conjugacy() {
        for (d, q) in [(2, 3), (3, 2)] {
            let field = Field::of_order(q).unwrap();
            let orbits = brute_force_partition(d, &field);
            let classes = enumerate_classes(d, &field, 1 << 20).unwrap();
            assert_eq!(orbits.len(), classes.len());
            let mut labels = std::collections::HashSet::new();
            for orbit in &orbits {
                let label = ConjClassLabel::of_gl_matrix(&orbit[0], &field).unwrap();
                // conjugation invariance across the whole orbit
                for a in orbit {
                    assert_eq!(ConjClassLabel::of_gl_matrix(a, &field).unwrap(), label);
                }
                // completeness: distinct orbits get distinct labels
                assert!(labels.insert(label.clone()));
                let info = classes.iter().find(|c| c.label == label).unwrap();
                assert_eq!(info.size, BigUint::from(orbit.len()));
                assert!(orbit.contains(&info.representative));
            }
        }
    }

    #[test]
    fn class_size_examples() {
        let f2 = Field::new(2, 1).unwrap();
        let f3 = Field::new(3, 1).unwrap();
        let id3 = ConjClassLabel::of_gl_matrix(&Matrix::identity(3), &f2).unwrap();
        assert_eq!(class_size(&id3, &f2, 1000).unwrap(), BigUint::from(1u32));
        let unipotent = Matrix::from_ints(&f2, &[[1, 1], [0, 1]]).unwrap();
        let l = ConjClassLabel::of_gl_matrix(&unipotent, &f2).unwrap();
        assert_eq!(class_size(&l, &f2, 1000).unwrap(), BigUint::from(3u32));
        let diag = Matrix::from_ints(&f3, &[[1, 0], [0, 2]]).unwrap();
        let l = ConjClassLabel::of_gl_matrix(&diag, &f3).unwrap();
        assert_eq!(class_size(&l, &f3, 1000).unwrap(), BigUint::from(12u32));
        // x(x+1) vanishes at 0
        let bad = parse_class_spec("invfac:[x^2+x]", Some(&f2));
        assert!(matches!(bad, Err(Error::SingularClass(_))));
    }

    #[test]
    fn parse_examples() {
        let f2 = Field::new(2, 1).unwrap();
        let f3 = Field::new(3, 1).unwrap();
        let eig = parse_class_spec("eig:1", Some(&f2)).unwrap();
        assert_eq!(eig.format(Some(&f2)), "invfac:[x+1]");
        assert_eq!(eig.degree(), 1);
        let scalar = parse_class_spec("invfac:[x+1, x+1]", Some(&f2)).unwrap();
        assert_eq!(scalar, ConjClassLabel::of_gl_matrix(&Matrix::identity(2), &f2).unwrap());
        let order3 = parse_class_spec("invfac:[x^2+x+1]", Some(&f2)).unwrap();
        let companion = Matrix::from_ints(&f2, &[[0, 1], [1, 1]]).unwrap();
        assert_eq!(order3, ConjClassLabel::of_gl_matrix(&companion, &f2).unwrap());
        let cube = companion.mul(&companion, &f2).unwrap().mul(&companion, &f2).unwrap();
        assert_eq!(cube, Matrix::identity(2));
        assert_ne!(companion, Matrix::identity(2));
        assert_eq!(
            parse_class_spec("eig:2", Some(&f3)).unwrap().format(Some(&f3)),
            "invfac:[x+1]"
        );
        assert_eq!(
            parse_class_spec("cycletype:[1,2]", None).unwrap(),
            ConjClassLabel::Sym { cycle_type: vec![2, 1] }
        );
        assert_eq!(
            parse_class_spec("sp:2", None).unwrap(),
            ConjClassLabel::Sp { half_dim: 1, index: 2 }
        );
        assert_eq!(
            parse_class_spec("sp:2/5", None).unwrap(),
            ConjClassLabel::Sp { half_dim: 2, index: 5 }
        );
        assert_eq!(parse_class_spec("invfac:[]", Some(&f2)).unwrap(), ConjClassLabel::unit(FamilyKind::Gl));
    }

    #[test]
    fn parse_errors() {
        let f2 = Field::new(2, 1).unwrap();
        let f3 = Field::new(3, 1).unwrap();
        assert!(matches!(
            parse_class_spec("invfac:[x+1, x^2+x+1]", Some(&f2)),
            Err(Error::DivisibilityChain(_))
        ));
        assert!(matches!(parse_class_spec("eig:0", Some(&f3)), Err(Error::SingularClass(_))));
        assert!(matches!(
            parse_class_spec("invfac:[2*x+1]", Some(&f3)),
            Err(Error::Parse { column: 9, .. })
        ));
        assert!(matches!(
            parse_class_spec("bogus:1", None),
            Err(Error::Parse { column: 1, .. })
        ));
        assert!(matches!(
            parse_class_spec("cycletype:[2,0]", None),
            Err(Error::Parse { column: 14, .. })
        ));
        assert!(matches!(
            parse_class_spec("eig:1 trailing", Some(&f2)),
            Err(Error::Parse { column: 7, .. })
        ));
        assert!(matches!(parse_class_spec("eig:1", None), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn labels_round_trip_through_syntax() {
        for q in [2, 3, 4] {
            let field = Field::of_order(q).unwrap();
            for d in 0..=2 {
                for c in enumerate_classes(d, &field, 1 << 20).unwrap() {
                    let text = c.label.format(Some(&field));
                    assert_eq!(parse_class_spec(&text, Some(&field)).unwrap(), c.label, "{text}");
                }
            }
        }
    }

    #[test]
    fn class_table_agrees_with_labels() {
        let f3 = Field::new(3, 1).unwrap();
        let table = GlClassTable::build(2, &f3, 1000).unwrap();
        for a in enumerate_gl(2, &f3, 1000).unwrap() {
            let id = table.class_of(&a).unwrap();
            assert_eq!(table.classes()[id].label, ConjClassLabel::of_gl_matrix(&a, &f3).unwrap());
        }
        assert_eq!(table.class_of(&Matrix::zeros(2, 2)), None);
    }
}
