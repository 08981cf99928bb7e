use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{cap_error, AmbientFamily, Memo};
use crate::conjugacy::{ClassInfo, ConjClassLabel, FamilyKind};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{check_cap, gl_candidate, gl_candidate_count, gl_order, Grassmannian, Matrix, Subspace};

/// Gram matrix of the standard alternating form on F^{2n}:
/// `J(e_i, e_{n+i}) = 1 = -J(e_{n+i}, e_i)`.
pub fn symplectic_form(n: usize, field: &Field) -> Matrix {
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = FieldElement::ONE;
        j[(n + i, i)] = field.neg(FieldElement::ONE);
    }
    j
}

/// `J(x, y)` for the standard form on vectors of length `2n`.
fn pairing(x: &[FieldElement], y: &[FieldElement], field: &Field) -> FieldElement {
    let n = x.len() / 2;
    (0..n).fold(FieldElement::ZERO, |acc, i| {
        let a = field.mul(x[i], y[n + i]);
        let b = field.mul(x[n + i], y[i]);
        field.add(acc, field.sub(a, b))
    })
}

/// A nondegenerate subspace together with a symplectic basis
/// `e_1, ..., e_c, f_1, ..., f_c` (`J(e_i, f_i) = 1`, all other pairings 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticSubspace {
    space: Subspace,
    basis: Vec<Vec<FieldElement>>,
}

impl SymplecticSubspace {
    /// `None` when the form restricted to `space` is degenerate.
    pub fn new(space: Subspace, field: &Field) -> Option<SymplecticSubspace> {
        let basis = symplectic_basis(&space, field)?;
        Some(SymplecticSubspace { space, basis })
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn half_dim(&self) -> usize {
        self.basis.len() / 2
    }

    pub fn symplectic_basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }
}

/// Greedy symplectic Gram-Schmidt starting from the RREF rows: take the first
/// remaining vector as `e`, the first one pairing nontrivially with it
/// (rescaled to pair to 1) as `f`, and project the rest off `span(e, f)`.
fn symplectic_basis(space: &Subspace, field: &Field) -> Option<Vec<Vec<FieldElement>>> {
    let mut rest: Vec<Vec<FieldElement>> =
        (0..space.dim()).map(|i| space.basis().row(i).to_vec()).collect();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while !rest.is_empty() {
        let e = rest.remove(0);
        let k = rest.iter().position(|v| !pairing(&e, v, field).is_zero())?;
        let raw = rest.remove(k);
        let scale = field.inv(pairing(&e, &raw, field)).ok()?;
        let f: Vec<FieldElement> = raw.iter().map(|&x| field.mul(x, scale)).collect();
        for v in rest.iter_mut() {
            // v - J(v,f) e + J(v,e) f
            let a = pairing(v, &f, field);
            let b = pairing(v, &e, field);
            for i in 0..v.len() {
                let t = field.sub(v[i], field.mul(a, e[i]));
                v[i] = field.add(t, field.mul(b, f[i]));
            }
        }
        es.push(e);
        fs.push(f);
    }
    es.extend(fs);
    Some(es)
}

/// Sp_{2c}(F_q) with its conjugacy classes computed by brute force.
#[derive(Debug)]
struct SpGroup {
    elements: Arc<Vec<Matrix>>,
    classes: Arc<Vec<ClassInfo<Matrix>>>,
    class_of: HashMap<Matrix, usize>,
}

/// Symplectic groups Sp_2n(F_q) acting on nondegenerate subspaces of F^{2n}.
///
/// Sizes are half-dimensions: size `n` is the space F^{2n}, and a degree-`c`
/// class lives in Sp_{2c}.
#[derive(Debug)]
pub struct SpFamily {
    field: Field,
    cap: u64,
    groups: Memo<usize, SpGroup>,
    subspaces: Memo<(usize, usize), Vec<SymplecticSubspace>>,
}

impl SpFamily {
    pub fn new(field: Field) -> SpFamily {
        Self::with_cap(field, crate::DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(field: Field, cap: u64) -> SpFamily {
        SpFamily {
            field,
            cap,
            groups: Memo::new(),
            subspaces: Memo::new(),
        }
    }

    pub fn form(&self, n: usize) -> Matrix {
        symplectic_form(n, &self.field)
    }

    pub fn is_symplectic(&self, t: &Matrix, n: usize) -> bool {
        let j = self.form(n);
        t.rows() == 2 * n
            && t.is_square()
            && t.transpose()
                .mul(&j, &self.field)
                .and_then(|tj| tj.mul(t, &self.field))
                .is_ok_and(|m| m == j)
    }

    /// Elements of Sp_{2n}, built by filtering GL_{2n}.
    pub fn group_elements(&self, n: usize) -> Result<Arc<Vec<Matrix>>> {
        Ok(self.group(n)?.elements.clone())
    }

    fn group(&self, n: usize) -> Result<Arc<SpGroup>> {
        self.groups.get_or_try_init(n, || {
            let q = self.field.order();
            let dim = 2 * n;
            check_cap(|| format!("GL_{dim}(F_{q})"), &gl_order(dim, q), self.cap)?;
            let j = self.form(n);
            let mut elements: Vec<Matrix> = (0..gl_candidate_count(dim, q))
                .into_par_iter()
                .filter_map(|i| gl_candidate(dim, i, &self.field))
                .filter(|t| {
                    t.transpose()
                        .mul(&j, &self.field)
                        .and_then(|tj| tj.mul(t, &self.field))
                        .is_ok_and(|m| m == j)
                })
                .collect();
            elements.sort();
            let (classes, class_of) = self.conjugacy_orbits(&elements, n);
            Ok(SpGroup {
                elements: Arc::new(elements),
                classes: Arc::new(classes),
                class_of,
            })
        })
    }

    /// Orbits under conjugation, each represented by its smallest matrix
    /// (row-major lexicographic order); orbits are indexed in increasing order
    /// of representative.
    fn conjugacy_orbits(&self, group: &[Matrix], n: usize) -> (Vec<ClassInfo<Matrix>>, HashMap<Matrix, usize>) {
        let inverses: Vec<Matrix> = group
            .par_iter()
            .map(|g| g.inverse(&self.field).expect("invertible"))
            .collect();
        let mut orbit_of: HashMap<Matrix, usize> = HashMap::new();
        let mut orbits: Vec<Vec<Matrix>> = Vec::new();
        for a in group {
            if orbit_of.contains_key(a) {
                continue;
            }
            let mut orbit: Vec<Matrix> = group
                .par_iter()
                .zip(&inverses)
                .map(|(g, gi)| {
                    g.mul(a, &self.field)
                        .and_then(|ga| ga.mul(gi, &self.field))
                        .expect("square")
                })
                .collect();
            orbit.sort();
            orbit.dedup();
            for m in &orbit {
                orbit_of.insert(m.clone(), orbits.len());
            }
            orbits.push(orbit);
        }
        // `group` is sorted, so orbits were discovered in order of their minima
        let classes = orbits
            .iter()
            .enumerate()
            .map(|(index, orbit)| ClassInfo {
                label: ConjClassLabel::Sp { half_dim: n, index },
                representative: orbit[0].clone(),
                size: BigUint::from(orbit.len()),
            })
            .collect();
        (classes, orbit_of)
    }

    /// Matrix of `T|_W` in the symplectic basis of `W`, or `None` if `W` is
    /// not `T`-invariant.
    pub fn restriction_matrix(&self, t: &Matrix, s: &SymplecticSubspace) -> Option<Matrix> {
        let c2 = s.basis.len();
        let c = c2 / 2;
        let mut m = Matrix::zeros(c2, c2);
        for (col, b) in s.basis.iter().enumerate() {
            let v = t.apply(b, &self.field);
            if !s.space.contains(&v, &self.field) {
                return None;
            }
            for i in 0..c {
                // v = sum a_i e_i + b_i f_i with a_i = J(v, f_i), b_i = J(e_i, v)
                m[(i, col)] = pairing(&v, &s.basis[c + i], &self.field);
                m[(c + i, col)] = pairing(&s.basis[i], &v, &self.field);
            }
        }
        Some(m)
    }
}

impl AmbientFamily for SpFamily {
    type Element = Matrix;
    type Subobject = SymplecticSubspace;
    type Mono = Matrix;

    fn kind(&self) -> FamilyKind {
        FamilyKind::Sp
    }

    fn field(&self) -> Option<&Field> {
        Some(&self.field)
    }

    fn cap(&self) -> u64 {
        self.cap
    }

    /// q^{n^2} prod_{i=1..n} (q^{2i} - 1).
    fn group_order(&self, n: usize) -> BigUint {
        let q = BigUint::from(self.field.order());
        (1..=n as u32).fold(q.pow((n * n) as u32), |acc, i| acc * (q.pow(2 * i) - BigUint::one()))
    }

    fn element_candidates(&self, n: usize) -> Result<u64> {
        Ok(self.group(n)?.elements.len() as u64)
    }

    fn element_at(&self, n: usize, index: u64) -> Option<Matrix> {
        self.group(n).ok()?.elements.get(index as usize).cloned()
    }

    fn validate(&self, g: &Matrix, n: usize) -> Result<()> {
        if self.is_symplectic(g, n) {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!(
                "{} is not in Sp_{}(F_{})",
                g.format(&self.field),
                2 * n,
                self.field.order()
            )))
        }
    }

    fn identity(&self, n: usize) -> Matrix {
        Matrix::identity(2 * n)
    }

    fn compose(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.mul(b, &self.field).expect("matching dimensions")
    }

    fn inverse(&self, a: &Matrix) -> Matrix {
        a.inverse(&self.field).expect("group elements are invertible")
    }

    fn sample_element(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Matrix> {
        let group = self.group(n)?;
        Ok(group.elements[rng.random_range(0..group.elements.len())].clone())
    }

    fn subobjects(&self, c: usize, n: usize) -> Result<Arc<Vec<SymplecticSubspace>>> {
        self.subspaces.get_or_try_init((c, n), || {
            if c > n {
                return Ok(Vec::new());
            }
            let q = self.field.order();
            let total = crate::linalg::gaussian_binomial(2 * n, 2 * c, q);
            if total > BigUint::from(self.cap) {
                return Err(cap_error(
                    format!("the Grassmannian of {}-subspaces of F_{q}^{}", 2 * c, 2 * n),
                    &total,
                    self.cap,
                ));
            }
            Ok(Grassmannian::new(2 * n, 2 * c, &self.field)
                .filter_map(|w| SymplecticSubspace::new(w, &self.field))
                .collect())
        })
    }

    fn act(&self, g: &Matrix, s: &SymplecticSubspace) -> SymplecticSubspace {
        SymplecticSubspace::new(s.space.image(g, &self.field), &self.field)
            .expect("isometries preserve nondegeneracy")
    }

    fn restrict(&self, g: &Matrix, s: &SymplecticSubspace) -> Result<Option<usize>> {
        let Some(m) = self.restriction_matrix(g, s) else {
            return Ok(None);
        };
        let group = self.group(s.half_dim())?;
        group
            .class_of
            .get(&m)
            .copied()
            .map(Some)
            .ok_or_else(|| Error::InvalidElement("restriction is not symplectic".into()))
    }

    fn classes(&self, c: usize) -> Result<Arc<Vec<ClassInfo<Matrix>>>> {
        Ok(self.group(c)?.classes.clone())
    }

    /// Isometric embeddings F^{2c} -> F^{2n}: `2n x 2c` matrices `M` with
    /// `M^T J_n M = J_c`.
    fn monomorphisms(&self, c: usize, n: usize) -> Result<Vec<Matrix>> {
        let q = self.field.order();
        let space = BigUint::from(q).pow((4 * n * c) as u32);
        check_cap(|| format!("{}x{} matrices over F_{q}", 2 * n, 2 * c), &space, self.cap)?;
        let space = u64::try_from(&space).expect("below the cap");
        let jn = self.form(n);
        let jc = self.form(c);
        Ok((0..space)
            .into_par_iter()
            .map(|code| Matrix::from_code(2 * n, 2 * c, code, &self.field))
            .filter(|m| {
                m.transpose()
                    .mul(&jn, &self.field)
                    .and_then(|mj| mj.mul(m, &self.field))
                    .is_ok_and(|g| g == jc)
            })
            .collect())
    }

    fn act_on_mono(&self, g: &Matrix, m: &Matrix) -> Matrix {
        g.mul(m, &self.field).expect("matching dimensions")
    }

    fn format_element(&self, g: &Matrix) -> String {
        g.format(&self.field)
    }
}
