//! Secure two-party multiplication with a trusted initializer.
//!
//! A trusted initializer deals correlated randomness `(c1, d1)` to party
//! one and `(c2, d2)` to party two with `d1 + d2 = c1 * c2`. The parties
//! then exchange their inputs masked by the correlated values and end up
//! holding additive shares of the product: party one outputs `s1`, party
//! two outputs `s2`, with `s1 + s2 = x * y` in every run.
//!
//! The functionality itself is probabilistic (one share is drawn
//! uniformly), so the security checks compare joint (view, outputs)
//! distributions: the view tuples below carry both parties' outputs.

use crate::algebra::{Field, FieldElem};
use crate::dist::Dist;

/// Correlated randomness dealt by the trusted initializer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TripleShares {
    pub c1: FieldElem,
    pub d1: FieldElem,
    pub c2: FieldElem,
    pub d2: FieldElem,
}

/// Party one's view: input, initializer shares, received message, and the
/// two protocol outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SecMultView1 {
    pub x: FieldElem,
    pub c1: FieldElem,
    pub d1: FieldElem,
    pub e1: FieldElem,
    pub s1: FieldElem,
    pub s2: FieldElem,
}

/// Party two's view, mirroring [`SecMultView1`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SecMultView2 {
    pub y: FieldElem,
    pub c2: FieldElem,
    pub d2: FieldElem,
    pub e2: FieldElem,
    pub s1: FieldElem,
    pub s2: FieldElem,
}

fn common_field(x: FieldElem, y: FieldElem) -> Field {
    assert_eq!(x.modulus(), y.modulus(), "inputs from different fields");
    x.field()
}

/// The target functionality: additive shares of the product, with the
/// first share drawn uniformly.
pub fn functionality(x: FieldElem, y: FieldElem) -> Dist<(FieldElem, FieldElem)> {
    let f = common_field(x, y);
    Dist::uniform(f.modulus()).map(move |&s| {
        let s1 = f.elem(s);
        (s1, x * y - s1)
    })
}

/// The initializer's dealing: `a, b, r` uniform, shares
/// `(c1, d1) = (a, r)` and `(c2, d2) = (b, a*b - r)`.
pub fn trusted_init(field: &Field) -> Dist<TripleShares> {
    let f = *field;
    let q = f.modulus();
    Dist::uniform(q)
        .product(&Dist::uniform(q).product(&Dist::uniform(q)))
        .map(move |&(a, (b, r))| {
            let (a, b, r) = (f.elem(a), f.elem(b), f.elem(r));
            TripleShares {
                c1: a,
                d1: r,
                c2: b,
                d2: a * b - r,
            }
        })
}

fn run(
    x: FieldElem,
    y: FieldElem,
    sh: &TripleShares,
) -> (FieldElem, FieldElem, FieldElem, FieldElem) {
    let e2 = x + sh.c1;
    let e1 = y - sh.c2;
    let s1 = x * e1 - sh.d1;
    let s2 = e2 * sh.c2 - sh.d2;
    (e1, e2, s1, s2)
}

/// Joint distribution of the two parties' outputs after a protocol run.
pub fn protocol(x: FieldElem, y: FieldElem) -> Dist<(FieldElem, FieldElem)> {
    trusted_init(&common_field(x, y)).map(move |sh| {
        let (_, _, s1, s2) = run(x, y, sh);
        (s1, s2)
    })
}

/// Party one's real view distribution.
pub fn real_view1(x: FieldElem, y: FieldElem) -> Dist<SecMultView1> {
    trusted_init(&common_field(x, y)).map(move |sh| {
        let (e1, _, s1, s2) = run(x, y, sh);
        SecMultView1 {
            x,
            c1: sh.c1,
            d1: sh.d1,
            e1,
            s1,
            s2,
        }
    })
}

/// Party two's real view distribution.
pub fn real_view2(x: FieldElem, y: FieldElem) -> Dist<SecMultView2> {
    trusted_init(&common_field(x, y)).map(move |sh| {
        let (_, e2, s1, s2) = run(x, y, sh);
        SecMultView2 {
            y,
            c2: sh.c2,
            d2: sh.d2,
            e2,
            s1,
            s2,
        }
    })
}

/// Party one's simulator. Draws `c1'`, `e1'` and the party's functionality
/// output `s1'` fresh, then fills in the only relations the real view
/// satisfies: `d1' = x*e1' - s1'` and `s2' = x*y - s1'`.
pub fn sim_view1(x: FieldElem, y: FieldElem) -> Dist<SecMultView1> {
    let f = common_field(x, y);
    let q = f.modulus();
    Dist::uniform(q)
        .product(&Dist::uniform(q).product(&Dist::uniform(q)))
        .map(move |&(c1, (e1, s1))| {
            let (c1, e1, s1) = (f.elem(c1), f.elem(e1), f.elem(s1));
            SecMultView1 {
                x,
                c1,
                d1: x * e1 - s1,
                e1,
                s1,
                s2: x * y - s1,
            }
        })
}

/// Party two's simulator, mirroring [`sim_view1`] with the relations
/// `d2' = e2'*c2' - s2'` and `s1' = x*y - s2'`.
pub fn sim_view2(x: FieldElem, y: FieldElem) -> Dist<SecMultView2> {
    let f = common_field(x, y);
    let q = f.modulus();
    Dist::uniform(q)
        .product(&Dist::uniform(q).product(&Dist::uniform(q)))
        .map(move |&(c2, (e2, s2))| {
            let (c2, e2, s2) = (f.elem(c2), f.elem(e2), f.elem(s2));
            SecMultView2 {
                y,
                c2,
                d2: e2 * c2 - s2,
                e2,
                s1: x * y - s2,
                s2,
            }
        })
}
