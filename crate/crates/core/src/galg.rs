//! The group algebra kG over a field carrier.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::string::String;
use alloc::vec::Vec;

use crate::ogroup::{Group, GroupElement};
use crate::scalars::{Ring, Scalar};

/// A finite formal combination `Σ α_g g` with every stored `α_g ≠ 0`.
///
/// Terms are kept sorted by the right order of the group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    ring: Ring,
    terms: BTreeMap<GroupElement, Scalar>,
}

impl AlgebraElement {
    pub fn zero(ring: Ring) -> Self {
        AlgebraElement {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(g: GroupElement, coeff: Scalar) -> Self {
        let ring = coeff.ring();
        let mut out = AlgebraElement::zero(ring);
        out.add_term(g, coeff);
        out
    }

    /// `1·g`.
    pub fn group_element(ring: Ring, g: GroupElement) -> Self {
        AlgebraElement::monomial(g, ring.one())
    }

    /// Sums the given terms; repeated elements are combined.
    pub fn from_terms(ring: Ring, terms: impl IntoIterator<Item = (GroupElement, Scalar)>) -> Self {
        let mut out = AlgebraElement::zero(ring);
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·g` in place.
    pub fn add_term(&mut self, g: GroupElement, c: Scalar) {
        assert_eq!(c.ring(), self.ring, "coefficient outside the algebra's field");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// The coefficient of `g` (zero when absent).
    pub fn coeff(&self, g: &GroupElement) -> Scalar {
        self.terms.get(g).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// `supp(u)`, strictly increasing.
    pub fn support(&self) -> Vec<GroupElement> {
        self.terms.keys().cloned().collect()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&GroupElement, &Scalar)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn least(&self) -> Option<(&GroupElement, &Scalar)> {
        self.terms.iter().next()
    }

    pub fn greatest(&self) -> Option<(&GroupElement, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        AlgebraElement {
            ring: self.ring,
            terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        AlgebraElement::from_terms(self.ring, self.terms.iter().map(|(g, c)| (g.clone(), c * s)))
    }

    pub fn mul(&self, group: &Group, other: &Self) -> Self {
        let mut out = AlgebraElement::zero(self.ring);
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(group.mul(g, h), a * b);
            }
        }
        out
    }

    /// `u·g`.
    pub fn mul_group_right(&self, group: &Group, g: &GroupElement) -> Self {
        AlgebraElement::from_terms(
            self.ring,
            self.terms.iter().map(|(h, c)| (group.mul(h, g), c.clone())),
        )
    }

    /// `g·u`.
    pub fn mul_group_left(&self, group: &Group, g: &GroupElement) -> Self {
        AlgebraElement::from_terms(
            self.ring,
            self.terms.iter().map(|(h, c)| (group.mul(g, h), c.clone())),
        )
    }

    /// `coeff*element` terms joined by ` + `, in increasing order; `0` when empty.
    pub fn format(&self, group: &Group) -> String {
        if self.terms.is_empty() {
            return String::from("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(g, c)| alloc::format!("{c}*{}", group.format(g)))
            .collect();
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;

    fn kb_elem(terms: &[(i64, i64, i64)]) -> (Group, AlgebraElement) {
        let g = Group::klein_bottle();
        let r = Ring::Rationals;
        let e = AlgebraElement::from_terms(r, terms.iter().map(|&(c, i, j)| (g.ts(i, j), r.from_i64(c))));
        (g, e)
    }

    #[test]
    fn small_products() {
        let (g, one_minus_t) = kb_elem(&[(1, 0, 0), (-1, 1, 0)]);
        let (_, one) = kb_elem(&[(1, 0, 0)]);
        assert_eq!(one.mul(&g, &one_minus_t), one_minus_t);
        let (_, t) = kb_elem(&[(1, 1, 0)]);
        let (_, s) = kb_elem(&[(1, 0, 1)]);
        let (_, ts) = kb_elem(&[(1, 1, 1)]);
        assert_eq!(t.mul(&g, &s), ts);
        let (_, one_plus_t) = kb_elem(&[(1, 0, 0), (1, 1, 0)]);
        let (_, expect) = kb_elem(&[(1, 0, 0), (-1, 2, 0)]);
        assert_eq!(one_minus_t.mul(&g, &one_plus_t), expect);
    }

    #[test]
    fn supports_are_sorted() {
        let g = Group::klein_bottle();
        assert!(AlgebraElement::zero(Ring::Rationals).support().is_empty());
        let (_, e) = kb_elem(&[(-1, 1, 0), (1, 0, 0)]);
        assert_eq!(e.support(), vec![g.identity(), g.ts(1, 0)]);
        let (_, e) = kb_elem(&[(1, 1, 1), (1, 0, 1)]);
        assert_eq!(e.support(), vec![g.ts(0, 1), g.ts(1, 1)]);
    }

    #[test]
    fn cancellation_drops_terms() {
        let (_, a) = kb_elem(&[(1, 0, 0), (2, 1, 0)]);
        let (_, b) = kb_elem(&[(-1, 0, 0)]);
        let sum = a.add(&b);
        assert_eq!(sum.len(), 1);
        assert_eq!(sum.coeff(&Group::klein_bottle().ts(1, 0)), Ring::Rationals.from_i64(2));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.scale(&Scalar::Rational(q(0))), AlgebraElement::zero(Ring::Rationals));
    }

    #[test]
    fn formatting() {
        let (g, e) = kb_elem(&[(1, 0, 0), (-1, 1, 0)]);
        assert_eq!(e.format(&g), "1*1 + -1*t");
    }
}
