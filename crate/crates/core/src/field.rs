//! Finite fields F_q with q = p^k <= 256.
//!
//! Elements are stored as their index in the fixed enumeration order: the
//! element with coefficient tuple `(c_0, ..., c_{k-1})` in the generator `g`
//! (so `c_0 + c_1 g + ...`) has index `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`.
//! Zero has index 0, one has index 1, and the prime subfield occupies indices
//! `0..p`. All arithmetic goes through precomputed tables.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::text::Cursor;

/// An element of some [`Field`]. Only meaningful together with its field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, ascending coefficients, length k + 1.
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// A finite field F_q. Cloning is cheap; clones share their tables.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)?;
        if self.0.k > 1 {
            write!(f, " mod {}", format_int_poly(&self.0.modulus, 'g'))?;
        }
        Ok(())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.modulus == other.0.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Built-in moduli: g^2+g+1 for F_4, g^3+g+1 for F_8, g^2+1 for F_9.
fn default_modulus(p: u32, k: u32) -> Option<Vec<u32>> {
    match (p, k) {
        (_, 1) => Some(vec![0, 1]),
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (3, 2) => Some(vec![1, 0, 1]),
        _ => None,
    }
}

impl Field {
    /// Prime field or one of the built-in extensions.
    pub fn new(p: u32, k: u32) -> Result<Field> {
        check_parameters(p, k)?;
        let modulus = default_modulus(p, k).ok_or(Error::MissingModulus { p, k })?;
        Self::build(p, k, modulus)
    }

    /// `modulus` lists ascending coefficients of a monic degree-k polynomial.
    pub fn with_modulus(p: u32, k: u32, modulus: &[u32]) -> Result<Field> {
        check_parameters(p, k)?;
        if k == 1 {
            return Self::build(p, 1, vec![0, 1]);
        }
        let modulus: Vec<u32> = modulus.iter().map(|c| c % p).collect();
        if modulus.len() != k as usize + 1 {
            return Err(Error::InvalidModulus(format!(
                "expected degree {k}, got {} coefficients",
                modulus.len()
            )));
        }
        if modulus[k as usize] != 1 {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus(p));
        }
        Self::build(p, k, modulus)
    }

    /// The field with `q` elements, using the built-in modulus.
    pub fn of_order(q: u32) -> Result<Field> {
        let (p, k) = prime_power(q).ok_or_else(|| {
            Error::InvalidArgument(format!("{q} is not a prime power"))
        })?;
        Self::new(p, k)
    }

    /// Parses a modulus such as `g^2+g+1` over F_p.
    pub fn with_modulus_text(p: u32, text: &str) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut cur = Cursor::new(text, 1);
        let coeffs = parse_int_poly(&mut cur, b'g')?;
        cur.expect_end()?;
        let coeffs: Vec<u32> = coeffs
            .into_iter()
            .map(|c| c.rem_euclid(p as i64) as u32)
            .collect();
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidModulus("modulus must have degree >= 1".into()));
        }
        let k = coeffs.len() as u32 - 1;
        Self::with_modulus(p, k, &coeffs)
    }

    fn build(p: u32, k: u32, modulus: Vec<u32>) -> Result<Field> {
        let q = p.pow(k);
        let qs = q as usize;
        let coeffs: Vec<Vec<u32>> = (0..q).map(|i| to_coeffs(i, p, k)).collect();
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                let sum: Vec<u32> = coeffs[a]
                    .iter()
                    .zip(&coeffs[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * qs + b] = from_coeffs(&sum, p) as u8;
                mul[a * qs + b] = from_coeffs(&mul_mod(&coeffs[a], &coeffs[b], &modulus, p), p) as u8;
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..qs)
                    .find(|&b| mul[a * qs + b] == 1)
                    .ok_or(Error::ReducibleModulus(p))? as u8;
            }
        }
        Ok(Field(Arc::new(Tables {
            p,
            k,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        })))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    /// Element with the given index; panics when `index >= q`.
    #[inline]
    pub fn element(&self, index: usize) -> FieldElement {
        assert!(index < self.0.q as usize, "element index {index} out of range");
        FieldElement(index as u8)
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.0.p as i64) as u8)
    }

    /// Zero first, then increasing index.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.0.q).map(|i| FieldElement(i as u8))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.0.q).map(|i| FieldElement(i as u8))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.0.add[a.index() * self.0.q as usize + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.0.neg[a.index()])
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.0.mul[a.index() * self.0.q as usize + b.index()])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            Err(Error::ZeroInverse)
        } else {
            Ok(FieldElement(self.0.inv[a.index()]))
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Smallest `m >= 1` with `a^m = 1`.
    pub fn multiplicative_order(&self, a: FieldElement) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let mut x = a;
        let mut m = 1;
        while x != FieldElement::ONE {
            x = self.mul(x, a);
            m += 1;
        }
        Ok(m)
    }

    /// Coefficients `(c_0, ..., c_{k-1})` of `a` in the generator.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        to_coeffs(a.0 as u32, self.0.p, self.0.k)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.0.k as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(Error::InvalidArgument(format!(
                "coefficients {coeffs:?} do not describe an element of F_{}",
                self.0.q
            )));
        }
        Ok(FieldElement(from_coeffs(coeffs, self.0.p) as u8))
    }

    /// Decimal integer for prime fields, polynomial in `g` otherwise.
    pub fn format(&self, a: FieldElement) -> String {
        if self.is_prime_field() {
            a.0.to_string()
        } else {
            format_int_poly(&self.coefficients(a), 'g')
        }
    }

    /// Accepts the syntax produced by [`Field::format`]; integers are read
    /// modulo p in any field.
    pub fn parse_element(&self, text: &str) -> Result<FieldElement> {
        let mut cur = Cursor::new(text, 1);
        let a = self.parse_element_at(&mut cur)?;
        cur.expect_end()?;
        Ok(a)
    }

    pub(crate) fn parse_element_at(&self, cur: &mut Cursor<'_>) -> Result<FieldElement> {
        let column = cur.column();
        let coeffs = parse_int_poly(cur, b'g')?;
        if self.is_prime_field() && coeffs.len() > 1 {
            return Err(Error::parse(column, "prime-field elements are plain integers"));
        }
        let mut acc = FieldElement::ZERO;
        let g = if self.0.k > 1 { FieldElement(self.0.p as u8) } else { FieldElement::ZERO };
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, g), self.from_int(c));
        }
        Ok(acc)
    }
}

fn check_parameters(p: u32, k: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !(1..=4).contains(&k) {
        return Err(Error::DegreeOutOfRange(k));
    }
    let q = (p as u64).pow(k);
    if q > 256 {
        return Err(Error::FieldTooLarge(q));
    }
    Ok(())
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

fn to_coeffs(mut i: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let c = i % p;
            i /= p;
            c
        })
        .collect()
}

fn from_coeffs(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of two residues modulo the monic `modulus`, all over F_p.
fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&mut prod, modulus, p);
    prod.resize(k, 0);
    prod
}

/// Reduces `a` modulo the monic `m` in place.
fn poly_rem(a: &mut Vec<u32>, m: &[u32], p: u32) {
    let dm = m.len() - 1;
    for top in (dm..a.len()).rev() {
        let c = a[top];
        if c == 0 {
            continue;
        }
        for (i, &mi) in m.iter().enumerate() {
            let idx = top - dm + i;
            a[idx] = (a[idx] + (p - c) * mi) % p;
        }
    }
    a.truncate(dm);
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let k = modulus.len() - 1;
    for d in 1..=k / 2 {
        for low in 0..p.pow(d as u32) {
            let mut divisor = to_coeffs(low, p, d as u32);
            divisor.push(1);
            let mut r = modulus.to_vec();
            poly_rem(&mut r, &divisor, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

pub(crate) fn format_int_poly(coeffs: &[u32], var: char) -> String {
    let mut terms = Vec::new();
    for (e, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let term = match (e, c) {
            (0, c) => c.to_string(),
            (1, 1) => var.to_string(),
            (1, c) => format!("{c}*{var}"),
            (e, 1) => format!("{var}^{e}"),
            (e, c) => format!("{c}*{var}^{e}"),
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

/// Parses `[-]term ((+|-) term)*` with `term := int | [int[*]] var [^ int]`,
/// returning signed ascending coefficients.
pub(crate) fn parse_int_poly(cur: &mut Cursor<'_>, var: u8) -> Result<Vec<i64>> {
    let mut coeffs: Vec<i64> = Vec::new();
    let mut sign = if cur.eat(b'-') { -1 } else { 1 };
    loop {
        let (c, e) = parse_int_term(cur, var)?;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, 0);
        }
        coeffs[e] += sign * c;
        if cur.eat(b'+') {
            sign = 1;
        } else if cur.eat(b'-') {
            sign = -1;
        } else {
            break;
        }
    }
    Ok(coeffs)
}

fn parse_int_term(cur: &mut Cursor<'_>, var: u8) -> Result<(i64, usize)> {
    let coeff = match cur.peek() {
        Some(c) if c.is_ascii_digit() => {
            let v = cur.integer()? as i64;
            if cur.peek() != Some(b'*') && cur.peek() != Some(var) {
                return Ok((v, 0));
            }
            cur.eat(b'*');
            v
        }
        Some(c) if c == var => 1,
        _ => return Err(cur.error(format!("expected an integer or '{}'", var as char))),
    };
    cur.expect(var)?;
    let exp = if cur.eat(b'^') { cur.integer()? as usize } else { 1 };
    Ok((coeff, exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<Field> {
        vec![
            Field::new(2, 1).unwrap(),
            Field::new(3, 1).unwrap(),
            Field::new(2, 2).unwrap(),
            Field::new(5, 1).unwrap(),
            Field::new(7, 1).unwrap(),
            Field::new(2, 3).unwrap(),
            Field::new(3, 2).unwrap(),
        ]
    }

    #[test]
    fn make_prime_and_extension_fields() {
        assert_eq!(Field::new(2, 1).unwrap().order(), 2);
        assert_eq!(Field::new(3, 1).unwrap().order(), 3);
        let f4 = Field::with_modulus(2, 2, &[1, 1, 1]).unwrap();
        assert_eq!(f4.order(), 4);
        assert_eq!(f4, Field::new(2, 2).unwrap());
        // g^2+g+1 has no root in F_2, hence irreducible
        assert!((0..2).all(|x| (x * x + x + 1) % 2 != 0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(4, 1), Err(Error::NotPrime(4)));
        assert_eq!(Field::new(2, 5), Err(Error::DegreeOutOfRange(5)));
        assert_eq!(Field::new(2, 0), Err(Error::DegreeOutOfRange(0)));
        assert_eq!(
            Field::with_modulus(2, 2, &[1, 0, 1]),
            Err(Error::ReducibleModulus(2))
        );
        assert_eq!(Field::new(5, 2), Err(Error::MissingModulus { p: 5, k: 2 }));
        assert_eq!(Field::new(17, 2), Err(Error::FieldTooLarge(289)));
        assert!(Field::with_modulus(5, 2, &[2, 0, 1]).is_ok());
        assert!(Field::with_modulus(5, 2, &[1, 0, 1]).is_err());
    }

    #[test]
    fn inverses() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.inv(f3.element(2)).unwrap(), f3.element(2));
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(f2.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
        let f4 = Field::new(2, 2).unwrap();
        let g = f4.parse_element("g").unwrap();
        assert_eq!(f4.format(f4.inv(g).unwrap()), "g+1");
        assert_eq!(f3.inv(FieldElement::ZERO), Err(Error::ZeroInverse));
    }

    #[test]
    fn enumeration_order() {
        let f2 = Field::new(2, 1).unwrap();
        let f3 = Field::new(3, 1).unwrap();
        let show = |f: &Field| f.elements().map(|a| f.format(a)).collect::<Vec<_>>();
        assert_eq!(show(&f2), ["0", "1"]);
        assert_eq!(show(&f3), ["0", "1", "2"]);
        let f4 = Field::new(2, 2).unwrap();
        let mut all = show(&f4);
        assert_eq!(all, ["0", "1", "g", "g+1"]);
        all.dedup();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in all_fields() {
            let els: Vec<_> = f.elements().collect();
            assert_eq!(els.len(), f.order() as usize);
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for f in all_fields() {
            let q = f.order();
            assert!(
                f.nonzero_elements()
                    .any(|a| f.multiplicative_order(a).unwrap() == q - 1),
                "{f:?} has no generator"
            );
        }
    }

    #[test]
    fn element_syntax_round_trips() {
        for f in all_fields() {
            for a in f.elements() {
                assert_eq!(f.parse_element(&f.format(a)).unwrap(), a);
            }
        }
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.format(f9.parse_element("2*g+1").unwrap()), "2*g+1");
        // g^2 = -1 in F_9
        assert_eq!(f9.format(f9.parse_element("g^2").unwrap()), "2");
        assert!(Field::new(3, 1).unwrap().parse_element("g").is_err());
        assert!(matches!(
            Field::new(3, 1).unwrap().parse_element("1 ?"),
            Err(Error::Parse { column: 3, .. })
        ));
    }

    #[test]
    fn modulus_text() {
        let f8 = Field::with_modulus_text(2, "g^3+g^2+1").unwrap();
        assert_eq!(f8.order(), 8);
        assert!(Field::with_modulus_text(2, "g^2+1").is_err());
        assert_eq!(Field::of_order(9).unwrap().modulus(), &[1, 0, 1]);
        assert!(Field::of_order(6).is_err());
    }
}
