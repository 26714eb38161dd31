//! Seeded random group and group-ring elements.

use divring_core::scalars::{q, QuadImaginary};
use divring_core::{AlgebraElement, Group, GroupElement, Ring, Scalar};
use rand::Rng;

/// `y^h x^n` with `|n| <= bound` and `h` having small integer coordinates.
/// Imaginary parts are only drawn when `c` itself is not rational.
pub fn element<R: Rng>(group: &Group, rng: &mut R, bound: i64) -> GroupElement {
    let a = rng.gen_range(-bound..=bound);
    let b = if group.c().im_coeff() == &q(0) {
        0
    } else {
        rng.gen_range(-bound..=bound)
    };
    let h = QuadImaginary::from_basis(q(a), q(b), group.d()).expect("d matches the group");
    let n = rng.gen_range(-bound..=bound);
    group.element(h, n).expect("d matches the group")
}

/// A nonzero coefficient: a small integer, or a small fraction over ℚ.
pub fn coefficient<R: Rng>(ring: Ring, rng: &mut R) -> Scalar {
    loop {
        let c = match ring {
            Ring::Rationals => {
                let n = rng.gen_range(-4i64..=4);
                let d = rng.gen_range(1i64..=3);
                ring.from_rational(&divring_core::scalars::qq(n, d)).expect("ℚ")
            }
            _ => ring.from_i64(rng.gen_range(-4..=4)),
        };
        if !c.is_zero() {
            return c;
        }
    }
}

/// A nonzero element with between 1 and `max_terms` terms.
pub fn algebra<R: Rng>(group: &Group, ring: Ring, rng: &mut R, max_terms: usize, bound: i64) -> AlgebraElement {
    loop {
        let k = rng.gen_range(1..=max_terms);
        let mut e = AlgebraElement::zero(ring);
        for _ in 0..k {
            e.add_term(element(group, rng, bound), coefficient(ring, rng));
        }
        if !e.is_zero() {
            return e;
        }
    }
}
