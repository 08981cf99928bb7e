//! Smith normal form of the characteristic matrix `xI - A` over F_q[x].

use super::poly::PolyFq;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;

/// Monic diagonal entries `d_1 | d_2 | ... | d_n` of the Smith normal form of
/// a square polynomial matrix with nonzero determinant.
pub fn smith_diagonal(mut m: Vec<Vec<PolyFq>>, field: &Field) -> Result<Vec<PolyFq>> {
    let n = m.len();
    for k in 0..n {
        loop {
            // smallest-degree nonzero entry of the trailing block becomes the pivot
            let Some((pi, pj)) = (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !m[i][j].is_zero())
                .min_by_key(|&(i, j)| m[i][j].degree())
            else {
                return Err(Error::Singular);
            };
            m.swap(k, pi);
            for row in m.iter_mut() {
                row.swap(k, pj);
            }

            let pivot = m[k][k].clone();
            let mut dirty = false;
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let (quot, _) = m[i][k].div_rem(&pivot, field)?;
                for j in k..n {
                    let t = quot.mul(&m[k][j], field);
                    m[i][j] = m[i][j].sub(&t, field);
                }
                dirty |= !m[i][k].is_zero();
            }
            for j in k + 1..n {
                if m[k][j].is_zero() {
                    continue;
                }
                let (quot, _) = m[k][j].div_rem(&pivot, field)?;
                for i in k..n {
                    let t = quot.mul(&m[i][k], field);
                    m[i][j] = m[i][j].sub(&t, field);
                }
                dirty |= !m[k][j].is_zero();
            }
            if dirty {
                continue;
            }

            // the pivot must divide the whole trailing block
            let offender = (k + 1..n)
                .flat_map(|i| (k + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !pivot.divides(&m[i][j], field));
            match offender {
                Some((i, _)) => {
                    for j in k..n {
                        let sum = m[k][j].add(&m[i][j], field);
                        m[k][j] = sum;
                    }
                }
                None => break,
            }
        }
    }
    Ok((0..n).map(|i| m[i][i].monic(field)).collect())
}

/// Nontrivial invariant factors of `a`, i.e. the Smith diagonal of `xI - a`
/// with the unit entries dropped. Ordered so each divides the next.
pub fn invariant_factors(a: &Matrix, field: &Field) -> Result<Vec<PolyFq>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("invariant factors of a non-square matrix".into()));
    }
    let n = a.rows();
    let m: Vec<Vec<PolyFq>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = field.neg(a[(i, j)]);
                    if i == j {
                        PolyFq::new(vec![c, crate::field::FieldElement::ONE])
                    } else {
                        PolyFq::constant(c)
                    }
                })
                .collect()
        })
        .collect();
    Ok(smith_diagonal(m, field)?
        .into_iter()
        .filter(|f| f.degree() != Some(0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::enumerate_gl;

    fn show(fs: &[PolyFq], field: &Field) -> Vec<String> {
        fs.iter().map(|f| f.format(field)).collect()
    }

    #[test]
    fn examples() {
        let f2 = Field::new(2, 1).unwrap();
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(show(&invariant_factors(&Matrix::identity(2), &f2).unwrap(), &f2), ["x+1", "x+1"]);
        // companion matrix of x^2+x+1
        let c = Matrix::from_ints(&f2, &[[0, 1], [1, 1]]).unwrap();
        assert_eq!(show(&invariant_factors(&c, &f2).unwrap(), &f2), ["x^2+x+1"]);
        let swap = Matrix::from_ints(&f3, &[[0, 1], [1, 0]]).unwrap();
        assert_eq!(show(&invariant_factors(&swap, &f3).unwrap(), &f3), ["x^2+2"]);
        assert!(invariant_factors(&Matrix::identity(0), &f3).unwrap().is_empty());
    }

    #[test]
    fn product_is_characteristic_polynomial() {
        for (n, q) in [(2, 3), (3, 2), (2, 4)] {
            let field = Field::of_order(q).unwrap();
            for a in enumerate_gl(n, &field, 1 << 20).unwrap() {
                let fs = invariant_factors(&a, &field).unwrap();
                let prod = fs.iter().fold(PolyFq::one(), |acc, f| acc.mul(f, &field));
                assert_eq!(prod.degree(), Some(n));
                assert_eq!(prod, det_char_matrix(&a, &field));
                assert!(fs.windows(2).all(|w| w[0].divides(&w[1], &field)));
                assert!(fs.iter().all(|f| f.is_monic()));
            }
        }
    }

    /// det(xI - A) by Laplace expansion over F_q[x], independent of the
    /// elimination above.
    fn det_char_matrix(a: &Matrix, field: &Field) -> PolyFq {
        let n = a.rows();
        let m: Vec<Vec<PolyFq>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = field.neg(a[(i, j)]);
                        if i == j {
                            PolyFq::new(vec![c, crate::field::FieldElement::ONE])
                        } else {
                            PolyFq::constant(c)
                        }
                    })
                    .collect()
            })
            .collect();
        laplace(&m, field)
    }

    fn laplace(m: &[Vec<PolyFq>], field: &Field) -> PolyFq {
        if m.is_empty() {
            return PolyFq::one();
        }
        let mut acc = PolyFq::zero();
        for j in 0..m.len() {
            let minor: Vec<Vec<PolyFq>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, p)| p.clone()).collect())
                .collect();
            let term = m[0][j].mul(&laplace(&minor, field), field);
            acc = if j % 2 == 0 { acc.add(&term, field) } else { acc.sub(&term, field) };
        }
        acc
    }
}
