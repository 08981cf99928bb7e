//! Sequences of groups `G_n` acting on `c`-shaped subobjects.
//!
//! A family supplies, for each size `n`, the group `G_n`, the set of
//! subobjects of size `c` inside the size-`n` object (the orbits of
//! monomorphisms `c -> n` under `G_c`), and the restriction of a group
//! element to a subobject it fixes, reported as a conjugacy class of `G_c`.

mod gl;
mod sp;
mod sym;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use gl::GlFamily;
pub use sp::{symplectic_form, SpFamily, SymplecticSubspace};
pub use sym::{Permutation, Subset, SymFamily};

use crate::conjugacy::{ClassInfo, ConjClassLabel, FamilyKind};
use crate::error::{Error, Result};
use crate::field::Field;

pub trait AmbientFamily: Send + Sync {
    type Element: Clone + PartialEq + fmt::Debug + Send + Sync;
    type Subobject: Clone + PartialEq + fmt::Debug + Send + Sync;
    /// A structure-preserving embedding of the size-`c` object into the
    /// size-`n` object.
    type Mono: Clone + Eq + Hash + Send + Sync;

    fn kind(&self) -> FamilyKind;

    /// Underlying field, for the linear families.
    fn field(&self) -> Option<&Field>;

    /// Enumeration cap applied to every exhaustive operation.
    fn cap(&self) -> u64;

    fn group_order(&self, n: usize) -> BigUint;

    /// Size of the candidate index space for `G_n`; refuses when `|G_n|` is
    /// above the cap. Every element is [`AmbientFamily::element_at`] of
    /// exactly one index below this bound.
    fn element_candidates(&self, n: usize) -> Result<u64>;

    fn element_at(&self, n: usize, index: u64) -> Option<Self::Element>;

    /// Checks that `g` belongs to `G_n`.
    fn validate(&self, g: &Self::Element, n: usize) -> Result<()>;

    fn identity(&self, n: usize) -> Self::Element;

    /// `a ∘ b`.
    fn compose(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;

    fn inverse(&self, a: &Self::Element) -> Self::Element;

    /// Uniform random element of `G_n`.
    fn sample_element(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Self::Element>;

    /// All size-`c` subobjects of the size-`n` object, in a fixed order.
    fn subobjects(&self, c: usize, n: usize) -> Result<Arc<Vec<Self::Subobject>>>;

    /// Image of a subobject under `g`.
    fn act(&self, g: &Self::Element, s: &Self::Subobject) -> Self::Subobject;

    /// Index into [`AmbientFamily::classes`] of the restriction of `g` to
    /// `s`, or `None` when `g` does not fix `s`.
    fn restrict(&self, g: &Self::Element, s: &Self::Subobject) -> Result<Option<usize>>;

    /// Conjugacy classes of `G_c`, sorted by label.
    fn classes(&self, c: usize) -> Result<Arc<Vec<ClassInfo<Self::Element>>>>;

    fn monomorphisms(&self, c: usize, n: usize) -> Result<Vec<Self::Mono>>;

    fn act_on_mono(&self, g: &Self::Element, m: &Self::Mono) -> Self::Mono;

    fn format_element(&self, g: &Self::Element) -> String;

    fn format_label(&self, label: &ConjClassLabel) -> String {
        label.format(self.field())
    }

    /// `counts[i]` = number of size-`c` subobjects fixed by `g` whose
    /// restriction lies in class `i`.
    fn restriction_counts(&self, g: &Self::Element, c: usize, n: usize) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.classes(c)?.len()];
        if c > n {
            return Ok(counts);
        }
        for s in self.subobjects(c, n)?.iter() {
            if let Some(i) = self.restrict(g, s)? {
                counts[i] += 1;
            }
        }
        Ok(counts)
    }

    /// Class index of a label, validating its family and existence.
    fn class_index(&self, label: &ConjClassLabel) -> Result<usize> {
        if label.family() != self.kind() {
            return Err(Error::FamilyMismatch {
                expected: self.kind().to_string(),
                found: label.family().to_string(),
            });
        }
        self.classes(label.degree())?
            .iter()
            .position(|c| &c.label == label)
            .ok_or_else(|| Error::UnknownClass(self.format_label(label)))
    }
}

/// Every element of `G_n` exactly once, in candidate-index order.
pub fn elements<F: AmbientFamily>(
    family: &F,
    n: usize,
) -> Result<impl Iterator<Item = F::Element> + '_> {
    let count = family.element_candidates(n)?;
    Ok((0..count).filter_map(move |i| family.element_at(n, i)))
}

/// Parallel [`elements`]: the candidate range splits into disjoint blocks.
pub fn par_elements<F: AmbientFamily>(
    family: &F,
    n: usize,
) -> Result<impl ParallelIterator<Item = F::Element> + '_> {
    let count = family.element_candidates(n)?;
    Ok((0..count)
        .into_par_iter()
        .filter_map(move |i| family.element_at(n, i)))
}

/// Number of `G_n`-orbits on monomorphisms `c -> n`. The size-independence
/// argument applies exactly when this is 1.
pub fn transitivity_check<F: AmbientFamily>(family: &F, c: usize, n: usize) -> Result<usize> {
    let monos = family.monomorphisms(c, n)?;
    let index: HashMap<&F::Mono, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let group: Vec<F::Element> = elements(family, n)?.collect();
    let mut seen = vec![false; monos.len()];
    let mut orbits = 0;
    for start in 0..monos.len() {
        if seen[start] {
            continue;
        }
        orbits += 1;
        for g in &group {
            let image = family.act_on_mono(g, &monos[start]);
            let j = *index.get(&image).ok_or_else(|| {
                Error::InvalidElement("group action leaves the set of monomorphisms".into())
            })?;
            seen[j] = true;
        }
    }
    Ok(orbits)
}

/// Lazily built, shared per-key values.
pub(crate) struct Memo<K, V>(Mutex<HashMap<K, Arc<V>>>);

impl<K: Eq + Hash + Copy, V> Memo<K, V> {
    pub(crate) fn new() -> Self {
        Memo(Mutex::new(HashMap::new()))
    }

    pub(crate) fn get_or_try_init(&self, key: K, init: impl FnOnce() -> Result<V>) -> Result<Arc<V>> {
        if let Some(v) = self.0.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(init()?);
        Ok(self.0.lock().unwrap().entry(key).or_insert(v).clone())
    }
}

impl<K, V> fmt::Debug for Memo<K, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Memo")
    }
}

pub(crate) fn cap_error(what: String, required: &BigUint, cap: u64) -> Error {
    Error::CapExceeded {
        what,
        required: required.to_string(),
        cap,
    }
}
