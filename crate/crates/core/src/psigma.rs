//! PΣ(n,k): automorphisms of Fₙ = F(x₁..xₙ) sending x₁..x_k to conjugates of
//! themselves, and its free abelian subgroup generated by
//!
//! * γᵢ: xᵢ ↦ x₁⁻¹ xᵢ x₁ for 1 < i ≤ k,
//! * λᵢ: xᵢ ↦ x₁ xᵢ and ρᵢ: xᵢ ↦ xᵢ x₁ for k < i ≤ n.
//!
//! In this module "conjugation by x₁^m" is x ↦ x₁^{−m} x x₁^m, so that γᵢ is
//! conjugation by x₁ on xᵢ.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autos::{compose, RaagAutomorphism};
use crate::words::{Raag, RaagWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsigmaError {
    #[error("n must be at least 2 (got {0})")]
    RankTooSmall(usize),
    #[error("k must be at most n (got n={n}, k={k})")]
    TooManyFixed { n: usize, k: usize },
    #[error("the generator family needs k >= 1")]
    NoFixedGenerator,
    #[error("exponent index {index} is out of range for `{family}`")]
    IndexOutOfRange { family: char, index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PsigmaSpec {
    n: usize,
    k: usize,
}

impl PsigmaSpec {
    pub fn new(n: usize, k: usize) -> Result<Self, PsigmaError> {
        if n < 2 {
            return Err(PsigmaError::RankTooSmall(n));
        }
        if k > n {
            return Err(PsigmaError::TooManyFixed { n, k });
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The free group on x1..xn; node i − 1 is xᵢ.
    pub fn free_group(&self) -> Raag {
        let names: Vec<String> = (1..=self.n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Raag::free(&refs)
    }

    /// Number of γ, λ, ρ generators: 2n − k − 1.
    pub fn generator_count(&self) -> usize {
        (self.k.max(1) - 1) + 2 * (self.n - self.k)
    }

    fn gamma_range(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.k
    }

    fn lr_range(&self) -> std::ops::RangeInclusive<usize> {
        self.k + 1..=self.n
    }
}

/// VCD of PΣ(n,k): 2n − k − 2 for k ≥ 1 and 2n − 3 for k = 0.
pub fn psigma_vcd(n: usize, k: usize) -> Result<usize, PsigmaError> {
    let spec = PsigmaSpec::new(n, k)?;
    Ok(if spec.k >= 1 { 2 * n - k - 2 } else { 2 * n - 3 })
}

/// Exponents of γᵢ (`a`), λᵢ (`b`) and ρᵢ (`c`), keyed by the index i.
/// Missing entries are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentVector {
    #[serde(default)]
    pub a: BTreeMap<usize, i64>,
    #[serde(default)]
    pub b: BTreeMap<usize, i64>,
    #[serde(default)]
    pub c: BTreeMap<usize, i64>,
}

impl ExponentVector {
    pub fn validate(&self, spec: &PsigmaSpec) -> Result<(), PsigmaError> {
        let check = |family: char, map: &BTreeMap<usize, i64>, range: std::ops::RangeInclusive<usize>| {
            match map.keys().find(|i| !range.contains(i)) {
                Some(&index) => Err(PsigmaError::IndexOutOfRange { family, index }),
                None => Ok(()),
            }
        };
        check('a', &self.a, spec.gamma_range())?;
        check('b', &self.b, spec.lr_range())?;
        check('c', &self.c, spec.lr_range())
    }

    /// Coordinates in the order a₂..a_k, b_{k+1}, c_{k+1}, .., bₙ, cₙ.
    pub fn coordinates(&self, spec: &PsigmaSpec) -> Vec<i64> {
        let get = |m: &BTreeMap<usize, i64>, i| m.get(&i).copied().unwrap_or(0);
        let mut out: Vec<i64> = spec.gamma_range().map(|i| get(&self.a, i)).collect();
        for i in spec.lr_range() {
            out.push(get(&self.b, i));
            out.push(get(&self.c, i));
        }
        out
    }

    pub fn from_coordinates(spec: &PsigmaSpec, coords: &[i64]) -> Self {
        assert_eq!(coords.len(), spec.generator_count());
        let mut it = coords.iter().copied();
        let mut v = Self::default();
        for i in spec.gamma_range() {
            v.a.insert(i, it.next().unwrap());
        }
        for i in spec.lr_range() {
            v.b.insert(i, it.next().unwrap());
            v.c.insert(i, it.next().unwrap());
        }
        v
    }

    pub fn add(&self, other: &Self, spec: &PsigmaSpec) -> Self {
        let sum: Vec<i64> = self
            .coordinates(spec)
            .iter()
            .zip(other.coordinates(spec))
            .map(|(x, y)| x + y)
            .collect();
        Self::from_coordinates(spec, &sum)
    }
}

/// Named generator of the abelian subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsigmaGenerator {
    pub name: String,
    pub auto: RaagAutomorphism,
}

/// γ₂..γ_k, then λᵢ, ρᵢ for each i > k.
pub fn psigma_generators(n: usize, k: usize) -> Result<Vec<PsigmaGenerator>, PsigmaError> {
    let spec = PsigmaSpec::new(n, k)?;
    if k == 0 {
        return Err(PsigmaError::NoFixedGenerator);
    }
    let mut out = Vec::with_capacity(spec.generator_count());
    let unit = |family: char, i: usize| {
        let mut v = ExponentVector::default();
        match family {
            'a' => v.a.insert(i, 1),
            'b' => v.b.insert(i, 1),
            _ => v.c.insert(i, 1),
        };
        apply_exponents(&spec, &v).expect("index in range")
    };
    for i in spec.gamma_range() {
        out.push(PsigmaGenerator {
            name: format!("gamma{i}"),
            auto: unit('a', i),
        });
    }
    for i in spec.lr_range() {
        out.push(PsigmaGenerator {
            name: format!("lambda{i}"),
            auto: unit('b', i),
        });
        out.push(PsigmaGenerator {
            name: format!("rho{i}"),
            auto: unit('c', i),
        });
    }
    Ok(out)
}

/// x₁ ↦ x₁; xᵢ ↦ x₁^{−aᵢ} xᵢ x₁^{aᵢ} (1 < i ≤ k); xᵢ ↦ x₁^{bᵢ} xᵢ x₁^{cᵢ} (i > k).
pub fn apply_exponents(
    spec: &PsigmaSpec,
    v: &ExponentVector,
) -> Result<RaagAutomorphism, PsigmaError> {
    v.validate(spec)?;
    let f = spec.free_group();
    let get = |m: &BTreeMap<usize, i64>, i| m.get(&i).copied().unwrap_or(0);
    let mut images = vec![RaagWord::generator(0)];
    for i in 2..=spec.n {
        let x = RaagWord::generator(i - 1);
        let (left, right) = if i <= spec.k {
            let a = get(&v.a, i);
            (-a, a)
        } else {
            (get(&v.b, i), get(&v.c, i))
        };
        images.push(
            RaagWord::power(0, left)
                .concat(&x)
                .concat(&RaagWord::power(0, right)),
        );
    }
    Ok(RaagAutomorphism::from_images(&f, images).expect("images over x1..xn"))
}

/// Composite of generator powers, for cross-checking [`apply_exponents`].
pub fn compose_generators(
    spec: &PsigmaSpec,
    v: &ExponentVector,
) -> Result<RaagAutomorphism, PsigmaError> {
    v.validate(spec)?;
    let gens = psigma_generators(spec.n, spec.k)?;
    let mut acc = RaagAutomorphism::identity(&spec.free_group());
    for (gen, e) in gens.iter().zip(v.coordinates(spec)) {
        let inv = inverse_generator(spec, &gen.name);
        let step = if e < 0 { &inv } else { &gen.auto };
        for _ in 0..e.unsigned_abs() {
            acc = compose(step, &acc).expect("same group");
        }
    }
    Ok(acc)
}

fn inverse_generator(spec: &PsigmaSpec, name: &str) -> RaagAutomorphism {
    let (family, index) = name.split_at(name.find(|c: char| c.is_ascii_digit()).unwrap());
    let i: usize = index.parse().unwrap();
    let mut v = ExponentVector::default();
    match family {
        "gamma" => v.a.insert(i, -1),
        "lambda" => v.b.insert(i, -1),
        _ => v.c.insert(i, -1),
    };
    apply_exponents(spec, &v).expect("index in range")
}

/// `Some(m)` exactly when the exponent vector gives conjugation by x₁^m:
/// every aᵢ = m, bᵢ = −m and cᵢ = m.
pub fn inner_decision(spec: &PsigmaSpec, v: &ExponentVector) -> Option<i64> {
    let get = |m: &BTreeMap<usize, i64>, i| m.get(&i).copied().unwrap_or(0);
    let mut candidates = spec
        .gamma_range()
        .map(|i| get(&v.a, i))
        .chain(spec.lr_range().flat_map(|i| [-get(&v.b, i), get(&v.c, i)]));
    let m = candidates.next().unwrap_or(0);
    candidates.all(|x| x == m).then_some(m)
}

/// Rank of the exponent lattice modulo the inner line: 2n − k − 2.
pub fn outer_rank(spec: &PsigmaSpec) -> Result<usize, PsigmaError> {
    if spec.k == 0 {
        return Err(PsigmaError::NoFixedGenerator);
    }
    let dim = spec.generator_count();
    // the inner line is spanned by the pattern vector for m = 1
    let mut line = ExponentVector::default();
    for i in spec.gamma_range() {
        line.a.insert(i, 1);
    }
    for i in spec.lr_range() {
        line.b.insert(i, -1);
        line.c.insert(i, 1);
    }
    let inner_rank = usize::from(
        inner_decision(spec, &line) == Some(1) && line.coordinates(spec).iter().any(|&x| x != 0),
    );
    let rank = dim - inner_rank;
    debug_assert_eq!(Ok(rank), psigma_vcd(spec.n, spec.k));
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autos::{commutator, Invertible};
    use proptest::prelude::*;

    fn spec(n: usize, k: usize) -> PsigmaSpec {
        PsigmaSpec::new(n, k).unwrap()
    }

    #[test]
    fn vcd_formula() {
        assert_eq!(psigma_vcd(3, 1), Ok(3));
        assert_eq!(psigma_vcd(4, 0), Ok(5));
        for n in 2..=6 {
            assert_eq!(psigma_vcd(n, n), Ok(n - 2));
        }
        assert_eq!(psigma_vcd(1, 0), Err(PsigmaError::RankTooSmall(1)));
        assert_eq!(psigma_vcd(3, 4), Err(PsigmaError::TooManyFixed { n: 3, k: 4 }));
    }

    #[test]
    fn generator_lists() {
        let names = |n, k| -> Vec<String> {
            psigma_generators(n, k).unwrap().into_iter().map(|g| g.name).collect()
        };
        assert_eq!(names(3, 1), ["lambda2", "rho2", "lambda3", "rho3"]);
        assert_eq!(names(2, 2), ["gamma2"]);
        assert_eq!(psigma_generators(4, 2).unwrap().len(), 5);
        assert_eq!(psigma_generators(3, 0), Err(PsigmaError::NoFixedGenerator));

        let s = spec(2, 2);
        let f = s.free_group();
        let conj = RaagAutomorphism::inner(&f, &RaagWord::generator(0).inverse());
        assert!(psigma_generators(2, 2).unwrap()[0].auto.equals(&conj));
    }

    #[test]
    fn exponent_examples() {
        let s = spec(2, 2);
        assert!(apply_exponents(&s, &ExponentVector::default()).unwrap().is_identity());
        let mut v = ExponentVector::default();
        v.a.insert(2, 1);
        let phi = apply_exponents(&s, &v).unwrap();
        assert_eq!(phi.format_images()["x2"], "x1^-1 x2 x1");
        assert_eq!(inner_decision(&s, &v), Some(1));

        let s = spec(3, 1);
        let v = ExponentVector {
            b: BTreeMap::from([(2, 1), (3, 0)]),
            c: BTreeMap::from([(2, 0), (3, 2)]),
            ..Default::default()
        };
        let images = apply_exponents(&s, &v).unwrap().format_images();
        assert_eq!(images["x2"], "x1 x2");
        assert_eq!(images["x3"], "x3 x1 x1");
        assert_eq!(images["x1"], "x1");

        let only_b = ExponentVector {
            b: BTreeMap::from([(2, 1)]),
            ..Default::default()
        };
        assert_eq!(inner_decision(&s, &only_b), None);
        assert_eq!(inner_decision(&s, &ExponentVector::default()), Some(0));

        let bad = ExponentVector {
            a: BTreeMap::from([(2, 1)]),
            ..Default::default()
        };
        assert_eq!(
            apply_exponents(&s, &bad),
            Err(PsigmaError::IndexOutOfRange { family: 'a', index: 2 })
        );
    }

    #[test]
    fn outer_ranks() {
        assert_eq!(outer_rank(&spec(3, 1)), Ok(3));
        assert_eq!(outer_rank(&spec(2, 2)), Ok(0));
        assert_eq!(outer_rank(&spec(5, 3)), Ok(5));
        assert_eq!(outer_rank(&spec(4, 0)), Err(PsigmaError::NoFixedGenerator));
        for n in 2..=6 {
            for k in 1..=n {
                let s = spec(n, k);
                assert_eq!(outer_rank(&s).unwrap(), psigma_vcd(n, k).unwrap());
            }
        }
    }

    #[test]
    fn generators_commute_exactly() {
        for n in 2..=6 {
            for k in 1..=n {
                let s = spec(n, k);
                let gens = psigma_generators(n, k).unwrap();
                assert_eq!(gens.len(), s.generator_count());
                let inv: Vec<Invertible> = gens
                    .iter()
                    .map(|g| {
                        Invertible::new(g.auto.clone(), inverse_generator(&s, &g.name)).unwrap()
                    })
                    .collect();
                for i in 0..inv.len() {
                    for j in i + 1..inv.len() {
                        assert!(commutator(&inv[i], &inv[j]).is_identity());
                    }
                }
            }
        }
    }

    fn spec_and_vectors() -> impl Strategy<Value = (PsigmaSpec, Vec<i64>, Vec<i64>)> {
        (2usize..=5)
            .prop_flat_map(|n| (Just(n), 1usize..=n))
            .prop_flat_map(|(n, k)| {
                let s = spec(n, k);
                let d = s.generator_count();
                (
                    Just(s),
                    prop::collection::vec(-2i64..=2, d),
                    prop::collection::vec(-2i64..=2, d),
                )
            })
    }

    proptest! {
        #[test]
        fn apply_matches_composition((s, x, _y) in spec_and_vectors()) {
            let v = ExponentVector::from_coordinates(&s, &x);
            let direct = apply_exponents(&s, &v).unwrap();
            prop_assert!(direct.equals(&compose_generators(&s, &v).unwrap()));
        }

        #[test]
        fn addition_is_composition((s, x, y) in spec_and_vectors()) {
            let vx = ExponentVector::from_coordinates(&s, &x);
            let vy = ExponentVector::from_coordinates(&s, &y);
            let sum = apply_exponents(&s, &vx.add(&vy, &s)).unwrap();
            let prod = compose(
                &apply_exponents(&s, &vx).unwrap(),
                &apply_exponents(&s, &vy).unwrap(),
            ).unwrap();
            prop_assert!(sum.equals(&prod));
        }

        #[test]
        fn inner_decision_is_exact((s, x, _y) in spec_and_vectors(), m in -2i64..=2) {
            let f = s.free_group();
            let v = ExponentVector::from_coordinates(&s, &x);
            let phi = apply_exponents(&s, &v).unwrap();
            let conj = RaagAutomorphism::inner(&f, &RaagWord::power(0, -m));
            prop_assert_eq!(phi.equals(&conj), inner_decision(&s, &v) == Some(m));
            // the pattern vector for m is always recognised
            let mut line = ExponentVector::default();
            for i in 2..=s.k() { line.a.insert(i, m); }
            for i in s.k() + 1..=s.n() { line.b.insert(i, -m); line.c.insert(i, m); }
            prop_assert_eq!(inner_decision(&s, &line), Some(m));
            prop_assert!(apply_exponents(&s, &line).unwrap().equals(&conj));
        }
    }
}
