use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::text::Cursor;

/// Polynomial over F_q in `x`, ascending coefficients, no trailing zeros.
///
/// Ordered by degree, then by coefficients from the constant term upwards.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PolyFq {
    coeffs: Vec<FieldElement>,
}

impl Ord for PolyFq {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.coeffs.len(), &self.coeffs).cmp(&(other.coeffs.len(), &other.coeffs))
    }
}

impl PartialOrd for PolyFq {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl PolyFq {
    pub fn new(mut coeffs: Vec<FieldElement>) -> PolyFq {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyFq { coeffs }
    }

    pub fn zero() -> PolyFq {
        PolyFq { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> PolyFq {
        PolyFq::new(vec![c])
    }

    pub fn one() -> PolyFq {
        PolyFq::constant(FieldElement::ONE)
    }

    /// `x - a`.
    pub fn linear(a: FieldElement, field: &Field) -> PolyFq {
        PolyFq::new(vec![field.neg(a), FieldElement::ONE])
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElement::ONE
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coeffs.first().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn add(&self, other: &PolyFq, field: &Field) -> PolyFq {
        let len = self.coeffs.len().max(other.coeffs.len());
        PolyFq::new(
            (0..len)
                .map(|i| field.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &PolyFq, field: &Field) -> PolyFq {
        let len = self.coeffs.len().max(other.coeffs.len());
        PolyFq::new(
            (0..len)
                .map(|i| field.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &PolyFq, field: &Field) -> PolyFq {
        if self.is_zero() || other.is_zero() {
            return PolyFq::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        PolyFq::new(out)
    }

    pub fn scale(&self, c: FieldElement, field: &Field) -> PolyFq {
        PolyFq::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn monic(&self, field: &Field) -> PolyFq {
        match field.inv(self.leading()) {
            Ok(inv) => self.scale(inv, field),
            Err(_) => PolyFq::zero(),
        }
    }

    pub fn div_rem(&self, divisor: &PolyFq, field: &Field) -> Result<(PolyFq, PolyFq)> {
        let dd = divisor.degree().ok_or(Error::ZeroInverse)?;
        let inv_lead = field.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![FieldElement::ZERO; self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = field.mul(rem[top], inv_lead);
            let shift = top - dd;
            quot[shift] = c;
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = field.sub(rem[shift + i], field.mul(c, b));
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        Ok((PolyFq::new(quot), PolyFq::new(rem)))
    }

    pub fn divides(&self, other: &PolyFq, field: &Field) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other
            .div_rem(self, field)
            .is_ok_and(|(_, r)| r.is_zero())
    }

    fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    /// Descending powers of `x`; coefficients outside the prime subfield are
    /// parenthesised, e.g. `x^2+(g+1)*x+1`.
    pub fn format(&self, field: &Field) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (e, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push('+');
            }
            let coef = if c.index() < field.characteristic() as usize {
                field.format(c)
            } else {
                format!("({})", field.format(c))
            };
            match (e, c == FieldElement::ONE) {
                (0, _) => s.push_str(&coef),
                (_, true) => {}
                (_, false) => {
                    let _ = write!(s, "{coef}*");
                }
            }
            match e {
                0 => {}
                1 => s.push('x'),
                _ => {
                    let _ = write!(s, "x^{e}");
                }
            }
        }
        s
    }

    pub fn parse(text: &str, field: &Field) -> Result<PolyFq> {
        let mut cur = Cursor::new(text, 1);
        let p = Self::parse_at(&mut cur, field)?;
        cur.expect_end()?;
        Ok(p)
    }

    /// `[-]term ((+|-) term)*`, `term := coef | [coef[*]] x [^ int]`,
    /// `coef := int | (element)`.
    pub(crate) fn parse_at(cur: &mut Cursor<'_>, field: &Field) -> Result<PolyFq> {
        let mut acc = PolyFq::zero();
        let mut negate = cur.eat(b'-');
        loop {
            let term = parse_term(cur, field)?;
            acc = if negate { acc.sub(&term, field) } else { acc.add(&term, field) };
            if cur.eat(b'+') {
                negate = false;
            } else if cur.eat(b'-') {
                negate = true;
            } else {
                return Ok(acc);
            }
        }
    }
}

fn parse_term(cur: &mut Cursor<'_>, field: &Field) -> Result<PolyFq> {
    let coef = match cur.peek() {
        Some(c) if c.is_ascii_digit() => Some(field.from_int(cur.integer()? as i64)),
        Some(b'(') => {
            let (inner, column) = cur.parenthesized()?;
            let mut sub = Cursor::new(inner, column);
            let e = field.parse_element_at(&mut sub)?;
            sub.expect_end()?;
            Some(e)
        }
        Some(b'x') => None,
        _ => return Err(cur.error("expected a coefficient or 'x'")),
    };
    if coef.is_some() && !cur.eat(b'*') && cur.peek() != Some(b'x') {
        return Ok(PolyFq::constant(coef.unwrap()));
    }
    cur.expect(b'x')?;
    let exp = if cur.eat(b'^') { cur.integer()? as usize } else { 1 };
    let mut coeffs = vec![FieldElement::ZERO; exp + 1];
    coeffs[exp] = coef.unwrap_or(FieldElement::ONE);
    Ok(PolyFq::new(coeffs))
}
