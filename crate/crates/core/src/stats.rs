//! The restriction counts `X_C`, their exact moments and Monte Carlo
//! estimates.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::conjugacy::{ConjClassLabel, FamilyKind};
use crate::error::{Error, Result};
use crate::families::{par_elements, AmbientFamily};
use crate::linalg::{gaussian_binomial, gl_order};
use crate::Rational;

/// The random variable `X_C` on the groups of one family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statistic {
    label: ConjClassLabel,
    class: usize,
}

impl Statistic {
    /// Resolves `label` against the classes of `family`.
    pub fn new<F: AmbientFamily>(family: &F, label: ConjClassLabel) -> Result<Statistic> {
        let class = family.class_index(&label)?;
        Ok(Statistic { label, class })
    }

    pub fn label(&self) -> &ConjClassLabel {
        &self.label
    }

    pub fn degree(&self) -> usize {
        self.label.degree()
    }

    /// Position of the class in `family.classes(degree)`.
    pub fn class_index(&self) -> usize {
        self.class
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Exact(Rational),
    MonteCarlo { mean: f64, stderr: f64, samples: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentResult {
    pub n: usize,
    pub value: MomentValue,
    /// Distinct factor labels with their multiplicities.
    pub factors: Vec<(ConjClassLabel, usize)>,
}

impl MomentResult {
    pub fn mode(&self) -> Mode {
        match self.value {
            MomentValue::Exact(_) => Mode::Exact,
            MomentValue::MonteCarlo { .. } => Mode::MonteCarlo,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match &self.value {
            MomentValue::Exact(r) => Some(r),
            MomentValue::MonteCarlo { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    NotApplicable,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::NotApplicable => "n/a",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub results: Vec<MomentResult>,
    pub verdict: Verdict,
}

fn factor_table(stats: &[Statistic]) -> Vec<(ConjClassLabel, usize)> {
    let mut m: BTreeMap<&ConjClassLabel, usize> = BTreeMap::new();
    for s in stats {
        *m.entry(&s.label).or_default() += 1;
    }
    m.into_iter().map(|(l, k)| (l.clone(), k)).collect()
}

/// `X_C(g)` for `g` in `G_n`.
pub fn evaluate_x<F: AmbientFamily>(
    family: &F,
    stat: &Statistic,
    g: &F::Element,
    n: usize,
) -> Result<u64> {
    family.validate(g, n)?;
    if n < stat.degree() {
        return Ok(0);
    }
    Ok(family.restriction_counts(g, stat.degree(), n)?[stat.class])
}

/// `∏ X_{C_i}(g)`, computing one set of restriction counts per degree.
/// `g` is assumed to lie in `G_n`.
fn product_at<F: AmbientFamily>(
    family: &F,
    stats: &[Statistic],
    g: &F::Element,
    n: usize,
) -> Result<u128> {
    let mut by_degree: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    let mut product: u128 = 1;
    for s in stats {
        if s.degree() > n {
            return Ok(0);
        }
        let counts = match by_degree.get(&s.degree()) {
            Some(c) => c,
            None => {
                let c = family.restriction_counts(g, s.degree(), n)?;
                by_degree.entry(s.degree()).or_insert(c)
            }
        };
        product = product
            .checked_mul(counts[s.class] as u128)
            .ok_or(Error::Overflow("moment summand"))?;
        if product == 0 {
            break;
        }
    }
    Ok(product)
}

fn check_family<F: AmbientFamily>(family: &F, stats: &[Statistic]) -> Result<()> {
    for s in stats {
        if s.label.family() != family.kind() {
            return Err(Error::FamilyMismatch {
                expected: family.kind().to_string(),
                found: s.label.family().to_string(),
            });
        }
    }
    Ok(())
}

/// `E[X_C]` over `G_n` by full enumeration.
pub fn exact_expectation<F: AmbientFamily>(
    family: &F,
    stat: &Statistic,
    n: usize,
) -> Result<MomentResult> {
    exact_joint_moment(family, std::slice::from_ref(stat), n)
}

/// `E[∏ X_{C_i}]` over `G_n` by full enumeration. The empty product is 1.
pub fn exact_joint_moment<F: AmbientFamily>(
    family: &F,
    stats: &[Statistic],
    n: usize,
) -> Result<MomentResult> {
    check_family(family, stats)?;
    let factors = factor_table(stats);
    if stats.iter().any(|s| s.degree() > n) {
        family.element_candidates(n)?;
        return Ok(MomentResult {
            n,
            value: MomentValue::Exact(Rational::zero()),
            factors,
        });
    }
    // warm the shared caches before fanning out
    for s in stats {
        family.subobjects(s.degree(), n)?;
        family.classes(s.degree())?;
    }
    let total = par_elements(family, n)?
        .map(|g| product_at(family, stats, &g, n))
        .try_reduce(
            || 0u128,
            |a, b| a.checked_add(b).ok_or(Error::Overflow("moment sum")),
        )?;
    let value = Rational::new(
        BigInt::from(total),
        BigInt::from(family.group_order(n)),
    );
    Ok(MomentResult {
        n,
        value: MomentValue::Exact(value),
        factors,
    })
}

/// Monte Carlo estimate of `E[∏ X_{C_i}]` over `G_n`. Sample `i` is drawn
/// from stream `i` of a ChaCha8 generator keyed by `seed`, and the sums are
/// kept as exact integers, so the result does not depend on thread count.
pub fn mc_estimate<F: AmbientFamily>(
    family: &F,
    stats: &[Statistic],
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<MomentResult> {
    check_family(family, stats)?;
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least 2 samples".into(),
        ));
    }
    for s in stats.iter().filter(|s| s.degree() <= n) {
        family.subobjects(s.degree(), n)?;
        family.classes(s.degree())?;
    }
    let (sum, sum_sq) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let g = family.sample_element(n, &mut rng)?;
            let x = product_at(family, stats, &g, n)?;
            let x2 = x.checked_mul(x).ok_or(Error::Overflow("squared sample"))?;
            Ok((BigUint::from(x), BigUint::from(x2)))
        })
        .try_reduce(
            || (BigUint::zero(), BigUint::zero()),
            |a, b| Ok((a.0 + b.0, a.1 + b.1)),
        )?;
    let count = BigInt::from(samples);
    let sum = BigInt::from(sum);
    let sum_sq = BigInt::from(sum_sq);
    // sample variance = (N Σx² - (Σx)²) / (N (N - 1))
    let spread = &count * &sum_sq - &sum * &sum;
    let n_f = samples as f64;
    let mean = Rational::new(sum, count).to_f64().unwrap_or(f64::NAN);
    let variance = spread.to_f64().unwrap_or(f64::NAN) / (n_f * (n_f - 1.0));
    Ok(MomentResult {
        n,
        value: MomentValue::MonteCarlo {
            mean,
            stderr: (variance / n_f).sqrt(),
            samples,
        },
        factors: factor_table(stats),
    })
}

/// Exact moments for each `n`, with a verdict on whether the values agree
/// for all `n ≥ Σ d_i`. Symplectic products get no verdict, and neither does
/// a range with fewer than two `n` in the stable region.
pub fn stability_scan<F: AmbientFamily>(
    family: &F,
    stats: &[Statistic],
    ns: impl IntoIterator<Item = usize>,
) -> Result<Scan> {
    let results = ns
        .into_iter()
        .map(|n| exact_joint_moment(family, stats, n))
        .collect::<Result<Vec<_>>>()?;
    let verdict = verdict(family.kind(), stats, &results);
    Ok(Scan { results, verdict })
}

/// Verdict over already computed results; Monte Carlo values get none.
pub fn verdict(kind: FamilyKind, stats: &[Statistic], results: &[MomentResult]) -> Verdict {
    if kind == FamilyKind::Sp && stats.len() > 1 {
        return Verdict::NotApplicable;
    }
    let total: usize = stats.iter().map(Statistic::degree).sum();
    let mut stable = results.iter().filter(|r| r.n >= total).map(MomentResult::exact);
    let Some(Some(first)) = stable.next() else {
        return Verdict::NotApplicable;
    };
    let mut all_equal = true;
    let mut compared = 0;
    for value in stable {
        match value {
            Some(v) => all_equal &= v == first,
            None => return Verdict::NotApplicable,
        }
        compared += 1;
    }
    if compared == 0 {
        Verdict::NotApplicable
    } else if all_equal {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

/// `E[X_C]` over GL_n(F_q) by orbit counting: GL_n is transitive on
/// `d`-subspaces and the stabilizer elements restricting into `C` number
/// `|C| q^{d(n-d)} |GL_{n-d}|`.
pub fn closed_form_expectation(class_size: &BigUint, d: usize, n: usize, q: u32) -> Rational {
    if n < d {
        return Rational::zero();
    }
    let numerator = gaussian_binomial(n, d, q)
        * class_size
        * BigUint::from(q).pow((d * (n - d)) as u32)
        * gl_order(n - d, q);
    Rational::new(BigInt::from(numerator), BigInt::from(gl_order(n, q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{elements, GlFamily, SpFamily, SymFamily};
    use crate::{parse_class_spec, Field, Matrix};

    fn gl(q: u32) -> GlFamily {
        GlFamily::new(Field::of_order(q).unwrap())
    }

    fn stat<F: AmbientFamily>(family: &F, spec: &str) -> Statistic {
        let label = parse_class_spec(spec, family.field()).unwrap();
        Statistic::new(family, label).unwrap()
    }

    fn ratio(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn exact<F: AmbientFamily>(family: &F, specs: &[&str], n: usize) -> Rational {
        let stats: Vec<Statistic> = specs.iter().map(|s| stat(family, s)).collect();
        exact_joint_moment(family, &stats, n).unwrap().exact().unwrap().clone()
    }

    #[test]
    fn evaluate_examples() {
        let g = gl(2);
        let f = g.field().unwrap().clone();
        let x = stat(&g, "eig:1");
        let at = |rows: [[i64; 2]; 2]| {
            evaluate_x(&g, &x, &Matrix::from_ints(&f, &rows).unwrap(), 2).unwrap()
        };
        assert_eq!(at([[1, 0], [0, 1]]), 3);
        assert_eq!(at([[0, 1], [1, 0]]), 1);
        assert_eq!(at([[1, 1], [0, 1]]), 1);
        let plane = stat(&g, "invfac:[x+1, x+1]");
        assert_eq!(evaluate_x(&g, &plane, &Matrix::identity(1), 1).unwrap(), 0);
        assert!(evaluate_x(&g, &x, &Matrix::zeros(2, 2), 2).is_err());
    }

    #[test]
    fn expectation_examples() {
        let g = gl(2);
        for n in 1..=3 {
            assert_eq!(exact(&g, &["eig:1"], n), ratio(1, 1));
        }
        assert_eq!(exact(&g, &["invfac:[x^2+1]"], 2), ratio(1, 2));
        assert_eq!(exact(&g, &["invfac:[x+1, x+1]"], 1), ratio(0, 1));
        assert_eq!(exact(&SymFamily::new(), &["cycletype:[2,1]"], 2), ratio(0, 1));
        assert_eq!(exact(&g, &[], 3), ratio(1, 1));
    }

    /// Brute force `E[∏ X]` straight from the definition: list the fixed
    /// subspaces and compare restriction labels.
    fn oracle_moment(q: u32, specs: &[&str], n: usize) -> Rational {
        use crate::linalg::{enumerate_gl, enumerate_grassmannian, restrict};
        let field = Field::of_order(q).unwrap();
        let labels: Vec<ConjClassLabel> =
            specs.iter().map(|s| parse_class_spec(s, Some(&field)).unwrap()).collect();
        let mut total = 0i64;
        let mut order = 0i64;
        for t in enumerate_gl(n, &field, u64::MAX).unwrap() {
            order += 1;
            let mut product = 1i64;
            for label in &labels {
                let count = enumerate_grassmannian(n, label.degree(), &field)
                    .filter_map(|w| restrict(&t, &w, &field).unwrap())
                    .filter(|r| &ConjClassLabel::of_gl_matrix(r, &field).unwrap() == label)
                    .count();
                product *= count as i64;
            }
            total += product;
        }
        ratio(total, order)
    }

    #[test]
    fn joint_moment_examples() {
        assert_eq!(exact(&gl(2), &["eig:1", "eig:1"], 2), ratio(2, 1));
        assert_eq!(oracle_moment(2, &["eig:1", "eig:1"], 2), ratio(2, 1));
        assert_eq!(exact(&gl(3), &["eig:1", "eig:2"], 2), ratio(1, 4));
        assert_eq!(oracle_moment(3, &["eig:1", "eig:2"], 2), ratio(1, 4));
        assert_eq!(
            exact(&gl(2), &["eig:1", "invfac:[x^2+x+1]"], 3),
            oracle_moment(2, &["eig:1", "invfac:[x^2+x+1]"], 3)
        );
        let g = gl(3);
        let single = exact_expectation(&g, &stat(&g, "eig:2"), 2).unwrap();
        assert_eq!(single.exact().unwrap(), &exact(&g, &["eig:2"], 2));
    }

    #[test]
    fn factors_record_multiplicity() {
        let g = gl(2);
        let x = stat(&g, "eig:1");
        let r = exact_joint_moment(&g, &[x.clone(), x.clone()], 2).unwrap();
        assert_eq!(r.factors, vec![(x.label().clone(), 2)]);
        assert_eq!(r.mode(), Mode::Exact);
    }

    #[test]
    fn monte_carlo_examples() {
        let g = gl(2);
        let x = stat(&g, "eig:1");
        let r = mc_estimate(&g, std::slice::from_ref(&x), 1, 100, 5).unwrap();
        assert_eq!(
            r.value,
            MomentValue::MonteCarlo { mean: 1.0, stderr: 0.0, samples: 100 }
        );
        let a = mc_estimate(&g, std::slice::from_ref(&x), 5, 2000, 42).unwrap();
        let b = mc_estimate(&g, std::slice::from_ref(&x), 5, 2000, 42).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| mc_estimate(&g, std::slice::from_ref(&x), 5, 2000, 42).unwrap());
        assert_eq!(a, c);
        assert!(mc_estimate(&g, &[x], 3, 1, 0).is_err());
    }

    #[test]
    fn monte_carlo_at_n8() {
        let g = gl(2);
        let x = stat(&g, "eig:1");
        let r = mc_estimate(&g, &[x], 8, 20_000, 7).unwrap();
        let MomentValue::MonteCarlo { mean, stderr, .. } = r.value else {
            panic!("expected an estimate");
        };
        assert!(stderr > 0.0);
        assert!((mean - 1.0).abs() <= 3.0 * stderr, "mean {mean} stderr {stderr}");
    }

    #[test]
    fn class_function_property() {
        let g = gl(3);
        let group: Vec<Matrix> = elements(&g, 2).unwrap().collect();
        let stats: Vec<Statistic> = g
            .classes(1)
            .unwrap()
            .iter()
            .chain(g.classes(2).unwrap().iter())
            .map(|c| Statistic::new(&g, c.label.clone()).unwrap())
            .collect();
        for t in &group {
            let values: Vec<u64> = stats.iter().map(|s| evaluate_x(&g, s, t, 2).unwrap()).collect();
            for h in group.iter().step_by(3) {
                let conj = g.compose(&g.compose(h, t), &g.inverse(h));
                for (s, v) in stats.iter().zip(&values) {
                    assert_eq!(evaluate_x(&g, s, &conj, 2).unwrap(), *v);
                }
            }
        }

        let s = SymFamily::new();
        let group: Vec<_> = elements(&s, 4).unwrap().collect();
        let stats: Vec<Statistic> = (1..=3)
            .flat_map(|d| s.classes(d).unwrap().iter().map(|c| c.label.clone()).collect::<Vec<_>>())
            .map(|l| Statistic::new(&s, l).unwrap())
            .collect();
        for t in &group {
            for h in &group {
                let conj = s.compose(&s.compose(h, t), &s.inverse(h));
                for st in &stats {
                    assert_eq!(evaluate_x(&s, st, &conj, 4).unwrap(), evaluate_x(&s, st, t, 4).unwrap());
                }
            }
        }
    }

    #[test]
    fn labels_partition_invariant_subspaces() {
        use crate::linalg::{enumerate_grassmannian, restrict};
        let g = gl(2);
        let field = g.field().unwrap().clone();
        for t in elements(&g, 3).unwrap() {
            for d in 0..=3 {
                let total: u64 = g
                    .classes(d)
                    .unwrap()
                    .iter()
                    .map(|c| evaluate_x(&g, &Statistic::new(&g, c.label.clone()).unwrap(), &t, 3).unwrap())
                    .sum();
                let invariant = enumerate_grassmannian(3, d, &field)
                    .filter(|w| restrict(&t, w, &field).unwrap().is_some())
                    .count();
                assert_eq!(total, invariant as u64);
            }
        }
    }

    #[test]
    fn closed_form_matches_enumeration() {
        let g = gl(2);
        for d in 0..=2 {
            for class in g.classes(d).unwrap().iter() {
                let s = Statistic::new(&g, class.label.clone()).unwrap();
                for n in 0..=4 {
                    let e = exact_expectation(&g, &s, n).unwrap();
                    assert_eq!(e.exact().unwrap(), &closed_form_expectation(&class.size, d, n, 2));
                }
            }
        }
    }

    #[test]
    fn stable_value_is_class_proportion() {
        let s = SymFamily::new();
        for d in 1..=3 {
            for class in s.classes(d).unwrap().iter() {
                let st = Statistic::new(&s, class.label.clone()).unwrap();
                let expected = Rational::new(class.size.clone().into(), s.group_order(d).into());
                for n in d..=6 {
                    assert_eq!(exact_expectation(&s, &st, n).unwrap().exact().unwrap(), &expected);
                }
            }
        }
        let sp = SpFamily::new(Field::of_order(2).unwrap());
        for class in sp.classes(1).unwrap().iter() {
            let st = Statistic::new(&sp, class.label.clone()).unwrap();
            let expected = Rational::new(class.size.clone().into(), 6.into());
            for n in 1..=2 {
                assert_eq!(exact_expectation(&sp, &st, n).unwrap().exact().unwrap(), &expected);
            }
        }
    }

    #[test]
    fn scan_examples() {
        let g = gl(2);
        let x = stat(&g, "eig:1");
        let scan = stability_scan(&g, std::slice::from_ref(&x), 1..=4).unwrap();
        assert_eq!(scan.verdict, Verdict::Stable);
        assert!(scan.results.iter().all(|r| r.exact() == Some(&ratio(1, 1))));

        let scan = stability_scan(&g, &[x.clone(), x.clone()], 2..=4).unwrap();
        assert_eq!(scan.verdict, Verdict::Stable);
        assert!(scan.results.iter().all(|r| r.exact() == Some(&ratio(2, 1))));

        let s = SymFamily::new();
        let swap = stat(&s, "cycletype:[2]");
        let scan = stability_scan(&s, &[swap], 2..=6).unwrap();
        assert_eq!(scan.verdict, Verdict::Stable);
        assert!(scan.results.iter().all(|r| r.exact() == Some(&ratio(1, 2))));

        // n = 1 is below the stable range of a product of two lines
        let scan = stability_scan(&g, &[x.clone(), x.clone()], 1..=1).unwrap();
        assert_eq!(scan.verdict, Verdict::NotApplicable);
        assert_eq!(scan.results[0].exact(), Some(&ratio(1, 1)));

        let sp = SpFamily::new(Field::of_order(2).unwrap());
        let a = stat(&sp, "sp:0");
        let scan = stability_scan(&sp, &[a.clone(), a], 1..=2).unwrap();
        assert_eq!(scan.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn unstable_values_are_flagged() {
        let results: Vec<MomentResult> = [1, 2]
            .iter()
            .enumerate()
            .map(|(i, v)| MomentResult {
                n: i + 1,
                value: MomentValue::Exact(ratio(*v, 1)),
                factors: vec![],
            })
            .collect();
        assert_eq!(verdict(FamilyKind::Gl, &[], &results), Verdict::Unstable);
    }

    #[test]
    fn enumeration_reproduces_mean() {
        // averaging X over every element is the exact expectation
        let g = gl(3);
        let x = stat(&g, "eig:2");
        let group: Vec<Matrix> = elements(&g, 2).unwrap().collect();
        let sum: u64 = group.iter().map(|t| evaluate_x(&g, &x, t, 2).unwrap()).sum();
        assert_eq!(
            Rational::new((sum as i64).into(), (group.len() as i64).into()),
            exact(&g, &["eig:2"], 2)
        );
    }
}
