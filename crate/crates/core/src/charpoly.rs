//! Character polynomials: rational combinations of the `X_C`, evaluated on
//! every `G_n` at once, and the expansion of products back into that basis.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::conjugacy::{ConjClassLabel, FamilyKind};
use crate::error::{Error, Result};
use crate::families::{par_elements, AmbientFamily};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPoly {
    family: FamilyKind,
    terms: BTreeMap<ConjClassLabel, Rational>,
}

impl CharPoly {
    pub fn zero(family: FamilyKind) -> CharPoly {
        CharPoly {
            family,
            terms: BTreeMap::new(),
        }
    }

    /// The constant function 1, i.e. `X` of the degree-0 class.
    pub fn unit(family: FamilyKind) -> CharPoly {
        Self::basis(ConjClassLabel::unit(family))
    }

    pub fn basis(label: ConjClassLabel) -> CharPoly {
        let mut p = Self::zero(label.family());
        p.terms.insert(label, Rational::from_integer(1.into()));
        p
    }

    pub fn family(&self) -> FamilyKind {
        self.family
    }

    /// Nonzero terms in label order.
    pub fn terms(&self) -> &BTreeMap<ConjClassLabel, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, label: &ConjClassLabel) -> Rational {
        self.terms.get(label).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest label degree present; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(ConjClassLabel::degree).max()
    }

    pub fn add_term(&mut self, label: ConjClassLabel, coefficient: Rational) -> Result<()> {
        if label.family() != self.family {
            return Err(Error::FamilyMismatch {
                expected: self.family.to_string(),
                found: label.family().to_string(),
            });
        }
        let sum = self.coefficient(&label) + coefficient;
        if sum.is_zero() {
            self.terms.remove(&label);
        } else {
            self.terms.insert(label, sum);
        }
        Ok(())
    }

    pub fn format(&self, field: Option<&crate::Field>) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(l, c)| format!("{c}*X[{}]", l.format(field)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Terms resolved to `(degree, class index, coefficient)`.
fn resolve<F: AmbientFamily>(family: &F, p: &CharPoly) -> Result<Vec<(usize, usize, Rational)>> {
    if p.family != family.kind() {
        return Err(Error::FamilyMismatch {
            expected: family.kind().to_string(),
            found: p.family.to_string(),
        });
    }
    p.terms
        .iter()
        .map(|(l, c)| Ok((l.degree(), family.class_index(l)?, c.clone())))
        .collect()
}

/// Restriction counts of `g` for each requested degree, zero-filled above `n`.
struct Counts(BTreeMap<usize, Vec<u64>>);

impl Counts {
    fn new<F: AmbientFamily>(
        family: &F,
        g: &F::Element,
        n: usize,
        degrees: impl IntoIterator<Item = usize>,
    ) -> Result<Counts> {
        let mut m = BTreeMap::new();
        for d in degrees {
            if !m.contains_key(&d) {
                m.insert(d, family.restriction_counts(g, d, n)?);
            }
        }
        Ok(Counts(m))
    }

    fn get(&self, degree: usize, class: usize) -> u64 {
        self.0[&degree][class]
    }

    fn eval(&self, terms: &[(usize, usize, Rational)]) -> Rational {
        terms.iter().fold(Rational::zero(), |acc, (d, i, c)| {
            acc + c * Rational::from_integer(BigInt::from(self.get(*d, *i)))
        })
    }
}

/// `Σ coefficient(C) X_C(g)` for `g` in `G_n`.
pub fn cp_eval<F: AmbientFamily>(family: &F, p: &CharPoly, g: &F::Element, n: usize) -> Result<Rational> {
    family.validate(g, n)?;
    let terms = resolve(family, p)?;
    let counts = Counts::new(family, g, n, terms.iter().map(|t| t.0))?;
    Ok(counts.eval(&terms))
}

/// Expands `X_a X_b` in the basis of all `X_D` with `deg D ≤ deg a + deg b`.
///
/// Classes are processed in increasing degree. On the representative `T` of
/// a class `D` of degree `e`, every `X_{D'}` with `deg D' = e` is the
/// indicator of `D'`, and higher degrees vanish, so the coefficient of `D` is
/// what the lower-degree terms leave unexplained at `T`. The result is then
/// checked on all of `G_N` and `G_{N+1}` for `N = deg a + deg b`, the latter
/// only when it is under the enumeration cap.
pub fn product_expand<F: AmbientFamily>(
    family: &F,
    a: &ConjClassLabel,
    b: &ConjClassLabel,
) -> Result<CharPoly> {
    if family.kind() == FamilyKind::Sp {
        return Err(Error::InvalidArgument(
            "product expansions are only defined for the gl and sym families".into(),
        ));
    }
    let ia = family.class_index(a)?;
    let ib = family.class_index(b)?;
    let (da, db) = (a.degree(), b.degree());
    let top = da + db;
    let mut result = CharPoly::zero(family.kind());
    let mut lower: Vec<(usize, usize, Rational)> = Vec::new();
    for e in 0..=top {
        let classes = family.classes(e)?;
        let found: Vec<(usize, Rational)> = classes
            .par_iter()
            .enumerate()
            .map(|(i, class)| {
                let t = &class.representative;
                let counts = Counts::new(family, t, e, [da, db].into_iter().chain(lower.iter().map(|l| l.0)))?;
                let product = counts.get(da, ia) as u128 * counts.get(db, ib) as u128;
                let coefficient = Rational::from_integer(BigInt::from(product)) - counts.eval(&lower);
                Ok((i, coefficient))
            })
            .collect::<Result<_>>()?;
        for (i, coefficient) in found {
            if !coefficient.is_zero() {
                lower.push((e, i, coefficient.clone()));
                result.add_term(classes[i].label.clone(), coefficient)?;
            }
        }
    }
    if !verify_expansion(family, (a, b), &result, top)? {
        return Err(Error::ExpansionMismatch { n: top });
    }
    if family.element_candidates(top + 1).is_ok() && !verify_expansion(family, (a, b), &result, top + 1)? {
        return Err(Error::ExpansionMismatch { n: top + 1 });
    }
    Ok(result)
}

/// Whether `rhs` agrees with `X_a X_b` on every element of `G_n`.
pub fn verify_expansion<F: AmbientFamily>(
    family: &F,
    lhs: (&ConjClassLabel, &ConjClassLabel),
    rhs: &CharPoly,
    n: usize,
) -> Result<bool> {
    let (a, b) = lhs;
    let ia = family.class_index(a)?;
    let ib = family.class_index(b)?;
    let terms = resolve(family, rhs)?;
    let degrees: Vec<usize> = [a.degree(), b.degree()]
        .into_iter()
        .chain(terms.iter().map(|t| t.0))
        .collect();
    for &d in &degrees {
        family.subobjects(d, n)?;
    }
    let mismatch = par_elements(family, n)?
        .map(|g| {
            let counts = Counts::new(family, &g, n, degrees.iter().copied())?;
            let product = counts.get(a.degree(), ia) as u128 * counts.get(b.degree(), ib) as u128;
            Ok(Rational::from_integer(BigInt::from(product)) != counts.eval(&terms))
        })
        .try_reduce(|| false, |x, y| Ok(x || y))?;
    Ok(!mismatch)
}
