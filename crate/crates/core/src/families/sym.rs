use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::{cap_error, AmbientFamily, Memo};
use crate::conjugacy::{ClassInfo, ConjClassLabel, FamilyKind};
use crate::error::{Error, Result};
use crate::field::Field;

/// A permutation of `{0, ..., n-1}` in one-line notation: `image[i] = σ(i)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation((0..n as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Result<Permutation> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen
                .get_mut(i as usize)
                .ok_or_else(|| Error::InvalidElement(format!("{images:?} is not a permutation")))?;
            if std::mem::replace(slot, true) {
                return Err(Error::InvalidElement(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation(images))
    }

    /// The `index`-th permutation of `n` points in lexicographic order.
    pub fn unrank(n: usize, mut index: u64) -> Permutation {
        let mut pool: Vec<u8> = (0..n as u8).collect();
        let mut fact: u64 = (1..n as u64).product();
        let mut out = Vec::with_capacity(n);
        for k in (0..n).rev() {
            let pos = (index / fact.max(1)) as usize;
            index %= fact.max(1);
            out.push(pool.remove(pos));
            if k > 0 {
                fact /= k as u64;
            }
        }
        Permutation(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Permutation(inv)
    }

    /// Cycle lengths in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        self.cycle_type_on(Subset::full(self.len()))
    }

    /// Cycle type of the restriction to an invariant subset.
    pub fn cycle_type_on(&self, set: Subset) -> Vec<usize> {
        let mut seen = 0u64;
        let mut parts = Vec::new();
        for start in set.iter() {
            if seen & (1 << start) != 0 {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while seen & (1 << i) == 0 {
                seen |= 1 << i;
                len += 1;
                i = self.apply(i);
            }
            parts.push(len);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }

    /// Permutation with the given cycle lengths on consecutive points.
    pub fn with_cycle_type(parts: &[usize]) -> Permutation {
        let mut images = Vec::new();
        let mut start = 0;
        for &len in parts {
            for k in 0..len {
                images.push((start + (k + 1) % len) as u8);
            }
            start += len;
        }
        Permutation(images)
    }
}

/// A subset of `{0, ..., 63}` as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(pub u64);

impl Subset {
    pub fn full(n: usize) -> Subset {
        Subset(if n == 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| self.0 & (1 << i) != 0)
    }

    pub fn image(self, p: &Permutation) -> Subset {
        Subset(self.iter().fold(0, |acc, i| acc | 1 << p.apply(i)))
    }
}

/// Symmetric groups S_n acting on subsets of `{0, ..., n-1}`.
#[derive(Debug)]
pub struct SymFamily {
    cap: u64,
    classes: Memo<usize, Vec<ClassInfo<Permutation>>>,
    class_index: Memo<usize, HashMap<Vec<usize>, usize>>,
    subsets: Memo<(usize, usize), Vec<Subset>>,
}

impl Default for SymFamily {
    fn default() -> Self {
        Self::new()
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Partitions of `d`, parts decreasing, in lexicographic order.
fn partitions(d: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in 1..=rest.min(max) {
            prefix.push(part);
            go(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `d! / z_λ` with `z_λ = prod_k k^{m_k} m_k!`.
fn class_size(parts: &[usize]) -> BigUint {
    let d: usize = parts.iter().sum();
    let mut z = BigUint::one();
    let mut mult: HashMap<usize, usize> = HashMap::new();
    for &p in parts {
        *mult.entry(p).or_default() += 1;
    }
    for (k, m) in mult {
        z *= BigUint::from(k).pow(m as u32) * factorial(m);
    }
    factorial(d) / z
}

impl SymFamily {
    pub fn new() -> SymFamily {
        Self::with_cap(crate::DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(cap: u64) -> SymFamily {
        SymFamily {
            cap,
            classes: Memo::new(),
            class_index: Memo::new(),
            subsets: Memo::new(),
        }
    }

    fn index_map(&self, c: usize) -> Result<Arc<HashMap<Vec<usize>, usize>>> {
        self.class_index.get_or_try_init(c, || {
            Ok(partitions(c).into_iter().enumerate().map(|(i, p)| (p, i)).collect())
        })
    }
}

impl AmbientFamily for SymFamily {
    type Element = Permutation;
    type Subobject = Subset;
    type Mono = Vec<u8>;

    fn kind(&self) -> FamilyKind {
        FamilyKind::Sym
    }

    fn field(&self) -> Option<&Field> {
        None
    }

    fn cap(&self) -> u64 {
        self.cap
    }

    fn group_order(&self, n: usize) -> BigUint {
        factorial(n)
    }

    fn element_candidates(&self, n: usize) -> Result<u64> {
        let order = factorial(n);
        if order > BigUint::from(self.cap) {
            return Err(cap_error(format!("S_{n}"), &order, self.cap));
        }
        Ok(u64::try_from(&order).expect("below the cap"))
    }

    fn element_at(&self, n: usize, index: u64) -> Option<Permutation> {
        Some(Permutation::unrank(n, index))
    }

    fn validate(&self, g: &Permutation, n: usize) -> Result<()> {
        if g.len() != n {
            return Err(Error::InvalidElement(format!(
                "expected a permutation of {n} points, got {}",
                g.len()
            )));
        }
        Permutation::from_images(g.0.clone()).map(|_| ())
    }

    fn identity(&self, n: usize) -> Permutation {
        Permutation::identity(n)
    }

    fn compose(&self, a: &Permutation, b: &Permutation) -> Permutation {
        a.compose(b)
    }

    fn inverse(&self, a: &Permutation) -> Permutation {
        a.inverse()
    }

    fn sample_element(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Permutation> {
        if n > 64 {
            return Err(Error::InvalidArgument("at most 64 points are supported".into()));
        }
        let mut images: Vec<u8> = (0..n as u8).collect();
        images.shuffle(rng);
        Ok(Permutation(images))
    }

    fn subobjects(&self, c: usize, n: usize) -> Result<Arc<Vec<Subset>>> {
        self.subsets.get_or_try_init((c, n), || {
            if n > 64 {
                return Err(Error::InvalidArgument("at most 64 points are supported".into()));
            }
            if c > n {
                return Ok(Vec::new());
            }
            let count = num_integer::binomial(BigUint::from(n), BigUint::from(c));
            if count > BigUint::from(self.cap) {
                return Err(cap_error(format!("{c}-subsets of {n} points"), &count, self.cap));
            }
            let mut out = Vec::new();
            let mut idx: Vec<usize> = (0..c).collect();
            loop {
                out.push(Subset(idx.iter().fold(0, |acc, &i| acc | 1 << i)));
                let Some(i) = (0..c).rev().find(|&i| idx[i] < n - c + i) else {
                    break;
                };
                idx[i] += 1;
                for j in i + 1..c {
                    idx[j] = idx[j - 1] + 1;
                }
            }
            Ok(out)
        })
    }

    fn act(&self, g: &Permutation, s: &Subset) -> Subset {
        s.image(g)
    }

    fn restrict(&self, g: &Permutation, s: &Subset) -> Result<Option<usize>> {
        if s.image(g) != *s {
            return Ok(None);
        }
        let parts = g.cycle_type_on(*s);
        Ok(self.index_map(s.len())?.get(&parts).copied())
    }

    fn classes(&self, c: usize) -> Result<Arc<Vec<ClassInfo<Permutation>>>> {
        self.classes.get_or_try_init(c, || {
            Ok(partitions(c)
                .into_iter()
                .map(|parts| ClassInfo {
                    representative: Permutation::with_cycle_type(&parts),
                    size: class_size(&parts),
                    label: ConjClassLabel::Sym { cycle_type: parts },
                })
                .collect())
        })
    }

    fn monomorphisms(&self, c: usize, n: usize) -> Result<Vec<Vec<u8>>> {
        let count: BigUint = (0..c).map(|i| BigUint::from(n.saturating_sub(i))).product();
        if count > BigUint::from(self.cap) {
            return Err(cap_error(format!("injections of {c} into {n} points"), &count, self.cap));
        }
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(c);
        fn go(n: usize, c: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if current.len() == c {
                out.push(current.clone());
                return;
            }
            for i in 0..n as u8 {
                if !current.contains(&i) {
                    current.push(i);
                    go(n, c, current, out);
                    current.pop();
                }
            }
        }
        go(n, c, &mut current, &mut out);
        Ok(out)
    }

    fn act_on_mono(&self, g: &Permutation, m: &Vec<u8>) -> Vec<u8> {
        m.iter().map(|&i| g.0[i as usize]).collect()
    }

    fn format_element(&self, g: &Permutation) -> String {
        let images: Vec<String> = g.0.iter().map(|i| i.to_string()).collect();
        format!("[{}]", images.join(","))
    }

    fn class_index(&self, label: &ConjClassLabel) -> Result<usize> {
        match label {
            ConjClassLabel::Sym { cycle_type } => self
                .index_map(label.degree())?
                .get(cycle_type)
                .copied()
                .ok_or_else(|| Error::UnknownClass(label.format(None))),
            other => Err(Error::FamilyMismatch {
                expected: "sym".into(),
                found: other.family().to_string(),
            }),
        }
    }
}
