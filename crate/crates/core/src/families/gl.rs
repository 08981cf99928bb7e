use std::sync::Arc;

use num_bigint::BigUint;
use rand_chacha::ChaCha8Rng;

use super::{cap_error, AmbientFamily, Memo};
use crate::conjugacy::{ClassInfo, ConjClassLabel, FamilyKind, GlClassTable};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{
    self, check_cap, gaussian_binomial, gl_candidate, gl_candidate_count, gl_order, Grassmannian,
    Matrix, Subspace,
};

/// GL_n(F_q) acting on the Grassmannians of F_q^n.
#[derive(Debug)]
pub struct GlFamily {
    field: Field,
    cap: u64,
    tables: Memo<usize, GlClassTable>,
    classes: Memo<usize, Vec<ClassInfo<Matrix>>>,
    grassmannians: Memo<(usize, usize), Vec<Subspace>>,
}

impl GlFamily {
    pub fn new(field: Field) -> GlFamily {
        Self::with_cap(field, crate::DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(field: Field, cap: u64) -> GlFamily {
        GlFamily {
            field,
            cap,
            tables: Memo::new(),
            classes: Memo::new(),
            grassmannians: Memo::new(),
        }
    }

    pub fn class_table(&self, c: usize) -> Result<Arc<GlClassTable>> {
        self.tables
            .get_or_try_init(c, || GlClassTable::build(c, &self.field, self.cap))
    }

    /// For lines the counts follow from kernel dimensions: the eigenvalue-λ
    /// lines of `T` are the lines of `ker(T - λ)`.
    fn line_counts(&self, t: &Matrix, n: usize) -> Result<Vec<u64>> {
        let classes = self.classes(1)?;
        let q = self.field.order() as u64;
        Ok(classes
            .iter()
            .map(|class| {
                let lambda = class.representative[(0, 0)];
                let kernel = n - t.sub_scalar(lambda, &self.field).rank(&self.field);
                (q.pow(kernel as u32) - 1) / (q - 1)
            })
            .collect())
    }
}

impl AmbientFamily for GlFamily {
    type Element = Matrix;
    type Subobject = Subspace;
    type Mono = Matrix;

    fn kind(&self) -> FamilyKind {
        FamilyKind::Gl
    }

    fn field(&self) -> Option<&Field> {
        Some(&self.field)
    }

    fn cap(&self) -> u64 {
        self.cap
    }

    fn group_order(&self, n: usize) -> BigUint {
        gl_order(n, self.field.order())
    }

    fn element_candidates(&self, n: usize) -> Result<u64> {
        let q = self.field.order();
        check_cap(|| format!("GL_{n}(F_{q})"), &gl_order(n, q), self.cap)?;
        Ok(gl_candidate_count(n, q))
    }

    fn element_at(&self, n: usize, index: u64) -> Option<Matrix> {
        gl_candidate(n, index, &self.field)
    }

    fn validate(&self, g: &Matrix, n: usize) -> Result<()> {
        if g.rows() != n || !g.is_square() {
            return Err(Error::InvalidElement(format!(
                "expected a {n}x{n} matrix, got {}x{}",
                g.rows(),
                g.cols()
            )));
        }
        if !g.is_invertible(&self.field) {
            return Err(Error::InvalidElement("matrix is singular".into()));
        }
        Ok(())
    }

    fn identity(&self, n: usize) -> Matrix {
        Matrix::identity(n)
    }

    fn compose(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.mul(b, &self.field).expect("matching dimensions")
    }

    fn inverse(&self, a: &Matrix) -> Matrix {
        a.inverse(&self.field).expect("group elements are invertible")
    }

    fn sample_element(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Matrix> {
        Ok(linalg::random_gl(n, &self.field, rng))
    }

    fn subobjects(&self, c: usize, n: usize) -> Result<Arc<Vec<Subspace>>> {
        self.grassmannians.get_or_try_init((c, n), || {
            let count = gaussian_binomial(n, c, self.field.order());
            if count > BigUint::from(self.cap) {
                return Err(cap_error(
                    format!("the Grassmannian of {c}-subspaces of F_{}^{n}", self.field.order()),
                    &count,
                    self.cap,
                ));
            }
            Ok(Grassmannian::new(n, c, &self.field).collect())
        })
    }

    fn act(&self, g: &Matrix, s: &Subspace) -> Subspace {
        s.image(g, &self.field)
    }

    fn restrict(&self, g: &Matrix, s: &Subspace) -> Result<Option<usize>> {
        let Some(r) = linalg::restrict(g, s, &self.field)? else {
            return Ok(None);
        };
        let table = self.class_table(s.dim())?;
        table
            .class_of(&r)
            .map(Some)
            .ok_or_else(|| Error::InvalidElement("restriction is singular".into()))
    }

    fn classes(&self, c: usize) -> Result<Arc<Vec<ClassInfo<Matrix>>>> {
        self.classes
            .get_or_try_init(c, || Ok(self.class_table(c)?.classes().to_vec()))
    }

    fn monomorphisms(&self, c: usize, n: usize) -> Result<Vec<Matrix>> {
        let q = self.field.order();
        let space = BigUint::from(q).pow((n * c) as u32);
        check_cap(|| format!("{n}x{c} matrices over F_{q}"), &space, self.cap)?;
        let space = u64::try_from(&space).expect("below the cap");
        Ok((0..space)
            .map(|code| Matrix::from_code(n, c, code, &self.field))
            .filter(|m| m.rank(&self.field) == c)
            .collect())
    }

    fn act_on_mono(&self, g: &Matrix, m: &Matrix) -> Matrix {
        g.mul(m, &self.field).expect("matching dimensions")
    }

    fn format_element(&self, g: &Matrix) -> String {
        g.format(&self.field)
    }

    fn restriction_counts(&self, g: &Matrix, c: usize, n: usize) -> Result<Vec<u64>> {
        match c {
            _ if c > n => Ok(vec![0; self.classes(c)?.len()]),
            0 => Ok(vec![1]),
            1 => self.line_counts(g, n),
            _ => {
                let table = self.class_table(c)?;
                let mut counts = vec![0u64; table.classes().len()];
                for s in self.subobjects(c, n)?.iter() {
                    if let Some(r) = linalg::restrict(g, s, &self.field)? {
                        let i = table
                            .class_of(&r)
                            .ok_or_else(|| Error::InvalidElement("restriction is singular".into()))?;
                        counts[i] += 1;
                    }
                }
                Ok(counts)
            }
        }
    }

    fn class_index(&self, label: &ConjClassLabel) -> Result<usize> {
        if label.family() != FamilyKind::Gl {
            return Err(Error::FamilyMismatch {
                expected: "gl".into(),
                found: label.family().to_string(),
            });
        }
        self.class_table(label.degree())?
            .index_of_label(label)
            .ok_or_else(|| Error::UnknownClass(label.format(Some(&self.field))))
    }
}
