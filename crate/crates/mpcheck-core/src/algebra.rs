//! Prime-field arithmetic and prime-order cyclic groups.
//!
//! Two group backends share one interface: `Exponent` represents `g^x` by
//! the exponent `x` itself (every discrete log is known, which is exactly
//! what the analytic checks want), and `Schnorr` works in the order-`q`
//! subgroup of `Z_p^*` with `p = 2q + 1`, which is what protocol sessions
//! use on the wire. Group sizes are deliberately small: the point of this
//! crate is exhaustive enumeration of protocol distributions, not
//! cryptographic hardness.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::dist::Dist;

/// Built-in Schnorr parameters `(q, p, g)` with `p = 2q + 1` prime and `g`
/// of exact order `q` modulo `p`.
pub const SCHNORR_TABLE: [(u64, u64, u64); 6] = [
    (3, 7, 2),
    (5, 11, 3),
    (11, 23, 2),
    (23, 47, 2),
    (83, 167, 2),
    (131, 263, 2),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    NotPrime(u64),
    /// No built-in Schnorr parameters for this subgroup order.
    NoSchnorrParams(u64),
    /// Supplied Schnorr parameters fail validation.
    BadSchnorrParams,
    ZeroInverse,
    /// Encoded group element is not a member of the group.
    NotInGroup(u64),
    /// `ddh_sr_triple` / `ddh_sr_non_triple` called on the wrong case.
    WrongSrCase,
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::NotPrime(n) => write!(f, "{} is not prime", n),
            AlgebraError::NoSchnorrParams(q) => {
                write!(f, "no built-in Schnorr parameters of order {}", q)
            }
            AlgebraError::BadSchnorrParams => write!(f, "invalid Schnorr parameters"),
            AlgebraError::ZeroInverse => write!(f, "inverse of zero"),
            AlgebraError::NotInGroup(v) => write!(f, "{} is not a group element", v),
            AlgebraError::WrongSrCase => {
                write!(f, "self-reduction case does not match its input")
            }
        }
    }
}

impl core::error::Error for AlgebraError {}

/// Trial-division primality test; adequate for the sizes this crate works
/// with (exhaustive suites stay below ~10^3, sessions below 2^31).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The field `Z_q` for a prime `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    q: u64,
}

impl Field {
    pub fn new(q: u64) -> Result<Field, AlgebraError> {
        if !is_prime(q) {
            return Err(AlgebraError::NotPrime(q));
        }
        Ok(Field { q })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// The element `v mod q`.
    pub fn elem(&self, v: u64) -> FieldElem {
        FieldElem {
            value: v % self.q,
            modulus: self.q,
        }
    }
}

/// A residue modulo a prime `q`. Elements carry their modulus; arithmetic
/// between different moduli is a programming error and panics.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem {
    value: u64,
    modulus: u64,
}

impl FieldElem {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// The field this element belongs to.
    pub fn field(&self) -> Field {
        Field { q: self.modulus }
    }

    /// Multiplicative inverse; fails on zero.
    pub fn inv(&self) -> Result<FieldElem, AlgebraError> {
        if self.value == 0 {
            return Err(AlgebraError::ZeroInverse);
        }
        // q is prime, so a^(q-2) = a^(-1).
        Ok(FieldElem {
            value: pow_mod(self.value, self.modulus - 2, self.modulus),
            modulus: self.modulus,
        })
    }

    fn same_modulus(&self, other: &FieldElem) {
        assert_eq!(
            self.modulus, other.modulus,
            "field elements with different moduli"
        );
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        self.same_modulus(&rhs);
        FieldElem {
            value: (self.value + rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        self.same_modulus(&rhs);
        FieldElem {
            value: (self.value + self.modulus - rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        self.same_modulus(&rhs);
        FieldElem {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Group representation backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Backend {
    /// `g^x` is stored as the exponent `x` in `[0, q)`.
    Exponent,
    /// Residues in the order-`q` subgroup of `Z_p^*`, `p = 2q + 1`.
    Schnorr { p: u64, g: u64 },
}

/// A cyclic group of prime order `q` with a distinguished generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupDesc {
    order: u64,
    backend: Backend,
}

impl GroupDesc {
    /// Exponent-space group of prime order `q`.
    pub fn exponent(q: u64) -> Result<GroupDesc, AlgebraError> {
        if !is_prime(q) {
            return Err(AlgebraError::NotPrime(q));
        }
        Ok(GroupDesc {
            order: q,
            backend: Backend::Exponent,
        })
    }

    /// Built-in Schnorr subgroup of order `q` (see [`SCHNORR_TABLE`]).
    pub fn schnorr(q: u64) -> Result<GroupDesc, AlgebraError> {
        let (_, p, g) = SCHNORR_TABLE
            .iter()
            .find(|(tq, _, _)| *tq == q)
            .ok_or(AlgebraError::NoSchnorrParams(q))?;
        Self::schnorr_params(*p, q, *g)
    }

    /// Explicit Schnorr parameters, validated: `q` and `p = 2q + 1` prime,
    /// `g` of exact order `q` modulo `p`.
    pub fn schnorr_params(p: u64, q: u64, g: u64) -> Result<GroupDesc, AlgebraError> {
        if !is_prime(q) {
            return Err(AlgebraError::NotPrime(q));
        }
        if !is_prime(p) || p != 2 * q + 1 {
            return Err(AlgebraError::BadSchnorrParams);
        }
        if g <= 1 || g >= p || pow_mod(g, q, p) != 1 {
            return Err(AlgebraError::BadSchnorrParams);
        }
        Ok(GroupDesc {
            order: q,
            backend: Backend::Schnorr { p, g },
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// The field of exponents `Z_q`.
    pub fn exponents(&self) -> Field {
        Field { q: self.order }
    }

    pub fn identity(&self) -> GroupElem {
        match self.backend {
            Backend::Exponent => GroupElem {
                desc: *self,
                value: 0,
            },
            Backend::Schnorr { .. } => GroupElem {
                desc: *self,
                value: 1,
            },
        }
    }

    pub fn generator(&self) -> GroupElem {
        self.gpow_raw(1)
    }

    /// `g^x` for an exponent of the group's order field.
    pub fn gpow(&self, x: FieldElem) -> GroupElem {
        assert_eq!(x.modulus(), self.order, "exponent from a different field");
        self.gpow_raw(x.value())
    }

    /// `g^x` for a raw exponent, reduced mod `q`.
    pub fn gpow_raw(&self, x: u64) -> GroupElem {
        let x = x % self.order;
        let value = match self.backend {
            Backend::Exponent => x,
            Backend::Schnorr { p, g } => pow_mod(g, x, p),
        };
        GroupElem { desc: *self, value }
    }

    /// Decodes a wire-encoded element, verifying group membership.
    pub fn from_encoded(&self, value: u64) -> Result<GroupElem, AlgebraError> {
        let ok = match self.backend {
            Backend::Exponent => value < self.order,
            Backend::Schnorr { p, .. } => {
                value >= 1 && value < p && pow_mod(value, self.order, p) == 1
            }
        };
        if !ok {
            return Err(AlgebraError::NotInGroup(value));
        }
        Ok(GroupElem { desc: *self, value })
    }

    /// Every group element, in encoding order.
    pub fn elements(&self) -> Vec<GroupElem> {
        let mut out: Vec<GroupElem> = (0..self.order).map(|x| self.gpow_raw(x)).collect();
        out.sort();
        out
    }
}

/// An element of a [`GroupDesc`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElem {
    desc: GroupDesc,
    value: u64,
}

impl GroupElem {
    pub fn group(&self) -> GroupDesc {
        self.desc
    }

    /// Backend-specific encoding: the exponent, or the residue mod `p`.
    pub fn encoded(&self) -> u64 {
        self.value
    }

    /// `self^e` for an exponent of the order field.
    pub fn pow(&self, e: FieldElem) -> GroupElem {
        assert_eq!(
            e.modulus(),
            self.desc.order,
            "exponent from a different field"
        );
        let value = match self.desc.backend {
            Backend::Exponent => mul_mod(self.value, e.value(), self.desc.order),
            Backend::Schnorr { p, .. } => pow_mod(self.value, e.value(), p),
        };
        GroupElem {
            desc: self.desc,
            value,
        }
    }

    /// Group inverse (always defined).
    pub fn invert(&self) -> GroupElem {
        let value = match self.desc.backend {
            Backend::Exponent => (self.desc.order - self.value) % self.desc.order,
            // x^(q-1) = x^(-1) in a subgroup of order q
            Backend::Schnorr { p, .. } => pow_mod(self.value, self.desc.order - 1, p),
        };
        GroupElem {
            desc: self.desc,
            value,
        }
    }
}

impl Mul for GroupElem {
    type Output = GroupElem;
    fn mul(self, rhs: GroupElem) -> GroupElem {
        assert_eq!(self.desc, rhs.desc, "elements of different groups");
        let value = match self.desc.backend {
            Backend::Exponent => (self.value + rhs.value) % self.desc.order,
            Backend::Schnorr { p, .. } => mul_mod(self.value, rhs.value, p),
        };
        GroupElem {
            desc: self.desc,
            value,
        }
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.desc.backend {
            Backend::Exponent => write!(f, "g^{}", self.value),
            Backend::Schnorr { .. } => write!(f, "{}", self.value),
        }
    }
}

pub type Tuple3 = (GroupElem, GroupElem, GroupElem);
pub type Tuple4 = (GroupElem, GroupElem, GroupElem, GroupElem);

/// Distribution of DDH triples `(g^a, g^b, g^(a*b))` over independent
/// uniform `a, b`.
pub fn ddh_real(desc: &GroupDesc) -> Dist<Tuple3> {
    let q = desc.order();
    let d = *desc;
    Dist::uniform(q).bind(|&a| {
        Dist::uniform(q).map(move |&b| (d.gpow_raw(a), d.gpow_raw(b), d.gpow_raw(mul_mod(a, b, q))))
    })
}

/// Distribution of random tuples `(g^a, g^b, g^c)` over independent
/// uniform `a, b, c`.
pub fn ddh_rand(desc: &GroupDesc) -> Dist<Tuple3> {
    let q = desc.order();
    let d = *desc;
    Dist::uniform(q).bind(|&a| {
        Dist::uniform(q).bind(move |&b| {
            Dist::uniform(q).map(move |&c| (d.gpow_raw(a), d.gpow_raw(b), d.gpow_raw(c)))
        })
    })
}

/// Sampling convention for the random self-reduction's scale factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrSampling {
    /// Scale factor drawn from the units `Z_q \ {0}`. Under this convention
    /// the reduction maps every triple to the uniform triple distribution.
    Units,
    /// Scale factor drawn from all of `Z_q`. Kept for side-by-side
    /// measurement: with zero allowed, the identity tuple picks up excess
    /// mass and the triple case is no longer uniform.
    Full,
}

/// One application of the self-reduction formula at fixed randomness
/// `(a, b)`: maps `(g, X, Y, Z)` to `(g, (X*g^b)^a, Y, (Z*Y^b)^a)`.
///
/// This works on group elements directly, so a party holding only the
/// encoded tuple (and not its exponents) can apply it.
pub fn sr_apply(x: GroupElem, y: GroupElem, z: GroupElem, a: u64, b: u64) -> Tuple4 {
    let desc = x.group();
    let f = desc.exponents();
    let (a, b) = (f.elem(a), f.elem(b));
    let gb = desc.gpow(b);
    (desc.generator(), (x * gb).pow(a), y, (z * y.pow(b)).pow(a))
}

/// The DDH random self-reduction applied to `(g, g^x, g^y, g^z)`:
/// rerandomizes with `a` (a unit) and `b`, producing
/// `(g, g^((x+b)a), g^y, g^((z+b*y)a))`.
pub fn ddh_sr(desc: &GroupDesc, x: FieldElem, y: FieldElem, z: FieldElem) -> Dist<Tuple4> {
    ddh_sr_in(desc, x, y, z, SrSampling::Units)
}

/// Self-reduction under an explicit sampling convention.
pub fn ddh_sr_in(
    desc: &GroupDesc,
    x: FieldElem,
    y: FieldElem,
    z: FieldElem,
    sampling: SrSampling,
) -> Dist<Tuple4> {
    let q = desc.order();
    let d = *desc;
    let (gx, gy, gz) = (d.gpow(x), d.gpow(y), d.gpow(z));
    let scale = match sampling {
        SrSampling::Units => Dist::uniform_except(q, 0),
        SrSampling::Full => Dist::uniform(q),
    };
    scale.bind(|&a| Dist::uniform(q).map(move |&b| sr_apply(gx, gy, gz, a, b)))
}

/// Simplified program for the triple case: `(g, g^w, g^y, g^(y*w))` with
/// `w` uniform. Requires `z = x*y`.
pub fn ddh_sr_triple(
    desc: &GroupDesc,
    x: FieldElem,
    y: FieldElem,
    z: FieldElem,
) -> Result<Dist<Tuple4>, AlgebraError> {
    if z != x * y {
        return Err(AlgebraError::WrongSrCase);
    }
    let d = *desc;
    Ok(Dist::uniform(d.order()).map(move |&w| {
        (
            d.generator(),
            d.gpow_raw(w),
            d.gpow(y),
            d.gpow(y * d.exponents().elem(w)),
        )
    }))
}

/// Simplified program for the non-triple case: `(g, g^w, g^y, g^t)` with
/// `w, t` independent uniform. Requires `z != x*y`.
pub fn ddh_sr_non_triple(
    desc: &GroupDesc,
    x: FieldElem,
    y: FieldElem,
    z: FieldElem,
) -> Result<Dist<Tuple4>, AlgebraError> {
    if z == x * y {
        return Err(AlgebraError::WrongSrCase);
    }
    let d = *desc;
    Ok(Dist::uniform(d.order()).bind(move |&w| {
        Dist::uniform(d.order())
            .map(move |&t| (d.generator(), d.gpow_raw(w), d.gpow(y), d.gpow_raw(t)))
    }))
}
