//! Finite subprobability distributions with exact rational masses.
//!
//! A [`Dist`] assigns a strictly positive [`Rational`] mass to finitely many
//! values; masses sum to at most one. A total mass below one models a
//! computation that aborts (see [`Dist::guard`]). The representation is
//! canonical — zero-mass entries are never stored and the support is kept
//! ordered — so two distributions with the same mass function compare equal
//! with `==` no matter how they were built.
//!
//! Probabilistic programs are written with [`Dist::pure`], [`Dist::bind`]
//! and [`Dist::map`]; the monad is commutative, which is what makes the
//! program rewriting in the security proofs sound.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::Rational;

/// Errors from distribution constructors with data-driven preconditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistError {
    /// `scale` called with a factor outside `[0, 1/weight]`.
    ScaleOutOfRange,
    /// `uniform` over an empty range.
    EmptyUniform,
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::ScaleOutOfRange => write!(f, "scale factor out of range"),
            DistError::EmptyUniform => write!(f, "uniform distribution over zero outcomes"),
        }
    }
}

impl core::error::Error for DistError {}

/// An exact finite subprobability distribution over values of type `V`.
#[derive(Clone, PartialEq, Eq)]
pub struct Dist<V: Ord + Clone> {
    support: BTreeMap<V, Rational>,
}

impl<V: Ord + Clone> Dist<V> {
    /// The empty distribution (total mass zero).
    pub fn empty() -> Self {
        Dist {
            support: BTreeMap::new(),
        }
    }

    /// Point mass: all probability on `v`.
    pub fn pure(v: V) -> Self {
        let mut support = BTreeMap::new();
        support.insert(v, Rational::one());
        Dist { support }
    }

    /// Builds a distribution from `(value, mass)` pairs, accumulating
    /// duplicates and dropping zero masses. Panics if any mass is negative
    /// or the total exceeds one.
    pub fn from_entries(entries: impl IntoIterator<Item = (V, Rational)>) -> Self {
        let mut support: BTreeMap<V, Rational> = BTreeMap::new();
        for (v, m) in entries {
            assert!(m >= Rational::zero(), "negative mass");
            if m.is_zero() {
                continue;
            }
            match support.get_mut(&v) {
                Some(acc) => *acc += &m,
                None => {
                    support.insert(v, m);
                }
            }
        }
        let d = Dist { support };
        assert!(d.weight() <= Rational::one(), "total mass exceeds one");
        d
    }

    /// Monadic sequencing: run `self`, feed each outcome to `k`, and
    /// accumulate the resulting masses.
    pub fn bind<W: Ord + Clone>(&self, k: impl Fn(&V) -> Dist<W>) -> Dist<W> {
        let mut support: BTreeMap<W, Rational> = BTreeMap::new();
        for (v, m) in &self.support {
            for (w, n) in k(v).support {
                let mass = m * &n;
                if mass.is_zero() {
                    continue;
                }
                match support.get_mut(&w) {
                    Some(acc) => *acc += &mass,
                    None => {
                        support.insert(w, mass);
                    }
                }
            }
        }
        Dist { support }
    }

    /// Joint distribution of two independent draws.
    pub fn product<W: Ord + Clone>(&self, other: &Dist<W>) -> Dist<(V, W)> {
        self.bind(|v| {
            let v = v.clone();
            other.map(move |w| (v.clone(), w.clone()))
        })
    }

    /// Pushes the distribution through `f`; masses of colliding images
    /// accumulate. Equivalent to `bind(|v| pure(f(v)))`.
    pub fn map<W: Ord + Clone>(&self, f: impl Fn(&V) -> W) -> Dist<W> {
        let mut support: BTreeMap<W, Rational> = BTreeMap::new();
        for (v, m) in &self.support {
            let w = f(v);
            match support.get_mut(&w) {
                Some(acc) => *acc += m,
                None => {
                    support.insert(w, m.clone());
                }
            }
        }
        Dist { support }
    }

    /// Multiplies every mass by `r`. Fails unless `0 <= r` and
    /// `r * weight <= 1`.
    pub fn scale(&self, r: &Rational) -> Result<Dist<V>, DistError> {
        if *r < Rational::zero() || r.clone() * self.weight() > Rational::one() {
            return Err(DistError::ScaleOutOfRange);
        }
        if r.is_zero() {
            return Ok(Dist::empty());
        }
        let support = self
            .support
            .iter()
            .map(|(v, m)| (v.clone(), m * r))
            .collect();
        Ok(Dist { support })
    }

    /// Total probability mass.
    pub fn weight(&self) -> Rational {
        self.support.values().cloned().sum()
    }

    /// Mass assigned to `v`; zero if outside the support.
    pub fn mass(&self, v: &V) -> Rational {
        self.support.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_lossless(&self) -> bool {
        self.weight() == Rational::one()
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    /// Iterates over `(value, mass)` pairs in value order.
    pub fn iter(&self) -> impl Iterator<Item = (&V, &Rational)> {
        self.support.iter()
    }

    /// Values in the support, in order.
    pub fn values(&self) -> impl Iterator<Item = &V> {
        self.support.keys()
    }

    /// Total variation distance: half the L1 distance between the mass
    /// functions, summed over the union of the supports.
    pub fn tv_distance(&self, other: &Dist<V>) -> Rational {
        let mut total = Rational::zero();
        for (v, m) in &self.support {
            total += &(m - &other.mass(v)).abs();
        }
        for (v, n) in &other.support {
            if !self.support.contains_key(v) {
                total += n;
            }
        }
        total * Rational::ratio(1, 2)
    }
}

impl Dist<u64> {
    /// Uniform distribution on `0..n`. Panics if `n` is zero; use
    /// [`Dist::try_uniform`] for fallible construction.
    pub fn uniform(n: u64) -> Dist<u64> {
        Self::try_uniform(n).expect("uniform over zero outcomes")
    }

    pub fn try_uniform(n: u64) -> Result<Dist<u64>, DistError> {
        if n == 0 {
            return Err(DistError::EmptyUniform);
        }
        let mass = Rational::ratio(1, n);
        let support = (0..n).map(|v| (v, mass.clone())).collect();
        Ok(Dist { support })
    }

    /// Uniform distribution on `0..n` with one value removed, i.e. the
    /// conditional law of `uniform(n)` given the draw differs from
    /// `excluded`. Panics unless `excluded < n` and `n >= 2`.
    pub fn uniform_except(n: u64, excluded: u64) -> Dist<u64> {
        assert!(excluded < n && n >= 2, "empty conditional range");
        let mass = Rational::ratio(1, n - 1);
        let support = (0..n)
            .filter(|&v| v != excluded)
            .map(|v| (v, mass.clone()))
            .collect();
        Dist { support }
    }
}

impl Dist<bool> {
    /// A fair coin flip.
    pub fn coin() -> Dist<bool> {
        let mass = Rational::ratio(1, 2);
        Dist {
            support: [(false, mass.clone()), (true, mass)].into_iter().collect(),
        }
    }
}

impl Dist<()> {
    /// Continues with probability one if `b` holds, otherwise aborts: the
    /// result is the empty distribution and any continuation bound after it
    /// keeps total mass zero.
    pub fn guard(b: bool) -> Dist<()> {
        if b {
            Dist::pure(())
        } else {
            Dist::empty()
        }
    }
}

/// Decides equality of the canonical mass functions. Same as `==`; provided
/// for call sites that read better with a named operation.
pub fn dist_equal<V: Ord + Clone>(a: &Dist<V>, b: &Dist<V>) -> bool {
    a == b
}

impl<V: Ord + Clone + fmt::Debug> fmt::Debug for Dist<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, m)) in self.support.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}: {}", v, m)?;
        }
        write!(f, "}}")
    }
}

impl<V: Ord + Clone + fmt::Debug> fmt::Display for Dist<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Collects the support values of a distribution into a vector, in order.
pub fn support_vec<V: Ord + Clone>(d: &Dist<V>) -> Vec<V> {
    d.values().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_is_point_mass() {
        let d = Dist::pure(3u64);
        assert_eq!(d.mass(&3), Rational::one());
        assert_eq!(d.mass(&4), Rational::zero());
        assert!(d.is_lossless());
    }

    #[test]
    fn uniform_masses() {
        let d = Dist::uniform(2);
        assert_eq!(d.mass(&0), Rational::ratio(1, 2));
        assert_eq!(d.mass(&1), Rational::ratio(1, 2));
        assert_eq!(Dist::uniform(1), Dist::pure(0));
        assert!(Dist::uniform(97).is_lossless());
        assert_eq!(Dist::try_uniform(0), Err(DistError::EmptyUniform));
    }

    #[test]
    fn uniform_mass_outside_support() {
        assert_eq!(Dist::uniform(4).mass(&9), Rational::zero());
        assert_eq!(Dist::uniform(4).mass(&2), Rational::ratio(1, 4));
    }

    #[test]
    fn coin_masses() {
        let c = Dist::coin();
        assert_eq!(c.mass(&true), Rational::ratio(1, 2));
        assert_eq!(c.map(|b| !b), c);
    }

    #[test]
    fn guard_semantics() {
        assert_eq!(Dist::guard(true), Dist::pure(()));
        assert_eq!(Dist::guard(false).weight(), Rational::zero());
        let aborted = Dist::guard(false).bind(|_| Dist::uniform(5));
        assert_eq!(aborted.weight(), Rational::zero());
    }

    #[test]
    fn bind_through_zero_weight_source() {
        let d = Dist::guard(false).bind(|_| Dist::pure(0u64));
        assert_eq!(d, Dist::empty());
    }

    #[test]
    fn scale_contract() {
        let half = Dist::pure(7u64).scale(&Rational::ratio(1, 2)).unwrap();
        assert_eq!(half.mass(&7), Rational::ratio(1, 2));
        let d = Dist::uniform(3);
        assert_eq!(d.scale(&Rational::one()).unwrap(), d);
        assert!(d.scale(&Rational::ratio(3, 2)).is_err());
        assert_eq!(
            Dist::uniform(2)
                .scale(&Rational::ratio(1, 4))
                .unwrap()
                .weight(),
            Rational::ratio(1, 4)
        );
        // Scaling by zero yields the canonical empty distribution.
        assert_eq!(d.scale(&Rational::zero()).unwrap(), Dist::empty());
    }

    #[test]
    fn constant_map_collapses_support() {
        assert_eq!(Dist::uniform(4).map(|_| 0u64), Dist::pure(0));
    }

    #[test]
    fn lossless_constant_bind_cancels() {
        // bind p (λ_. q) = q when p is lossless
        let q = Dist::uniform(2);
        assert_eq!(Dist::uniform(3).bind(|_| q.clone()), q);
    }

    #[test]
    fn bind_const_is_scale_by_weight() {
        // bind d (λ_. q) = scale (weight d) q
        let d = Dist::pure(0u64).scale(&Rational::ratio(1, 3)).unwrap();
        let q = Dist::uniform(2);
        let lhs = d.bind(|_| q.clone());
        assert_eq!(lhs.mass(&0), Rational::ratio(1, 6));
        assert_eq!(lhs.mass(&1), Rational::ratio(1, 6));
        assert_eq!(lhs, q.scale(&d.weight()).unwrap());
    }

    #[test]
    fn tv_distance_examples() {
        let d = Dist::uniform(5);
        assert_eq!(d.tv_distance(&d), Rational::zero());
        assert_eq!(
            Dist::uniform(2).tv_distance(&Dist::pure(0)),
            Rational::ratio(1, 2)
        );
        // Disjoint supports are at distance one.
        let shifted = Dist::uniform(3).map(|v| v + 10);
        assert_eq!(Dist::uniform(3).tv_distance(&shifted), Rational::one());
    }

    #[test]
    fn equality_ignores_construction_history() {
        let via_coin = Dist::coin().map(|b| *b as u64);
        assert_eq!(via_coin, Dist::uniform(2));
        assert!(dist_equal(&Dist::uniform(3), &Dist::uniform(3)));
    }

    #[test]
    fn debug_rendering_sorted() {
        let d = Dist::uniform(2);
        assert_eq!(alloc::format!("{:?}", d), "{0: 1/2, 1: 1/2}");
    }
}
