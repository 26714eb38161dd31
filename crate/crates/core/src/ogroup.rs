//! The c-scaled extension groups.
//!
//! An element is a normal form `y^h x^n` with `h ∈ ℚ(√−d)` and `n ∈ ℤ`,
//! subject to `y^h x = x y^{ch}`. Hence
//!
//! ```text
//! (y^h x^n)(y^h' x^n') = y^(h + c^-n h') x^(n+n')
//! (y^h x^n)^-1        = y^(-c^n h) x^-n
//! ```
//!
//! `c = −1` gives the Klein-bottle group with `t = y`, `s = x`; `c = 1` gives
//! a free abelian group.
//!
//! The right-invariant order compares `n`, then `Re(h)`, then `Im(h)`. It does
//! not depend on `c`, so [`GroupElement`] implements [`Ord`] by it directly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalars::{QuadImaginary, ScalarError};

/// Powers `c^k` for `|k| <= CACHE` are precomputed.
const CACHE: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    h: QuadImaginary,
    n: i64,
}

impl GroupElement {
    pub fn h(&self) -> &QuadImaginary {
        &self.h
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.n == 0 && self.h.is_zero()
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.h.cmp_re_im(&other.h))
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupElement {
    /// Generic normal form `y^(a+b*w)x^n`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^({})x^{}", self.h, self.n)
    }
}

/// Which total order to compare group elements by.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OrderTag {
    RightOrder,
    /// `a ≤* b ⟺ a⁻¹ ≥ b⁻¹`; left-invariant.
    DualLeftOrder,
    /// `a ≤_g b ⟺ ga ≤ gb`.
    ConjugatedBy(GroupElement),
}

/// A member of the c-scaled family, fixed by a nonzero `c ∈ ℚ(√−d)`.
#[derive(Debug, Clone)]
pub struct Group {
    c: QuadImaginary,
    powers: Vec<QuadImaginary>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
    }
}

impl Eq for Group {}

impl Group {
    pub fn new(c: QuadImaginary) -> Result<Self, ScalarError> {
        if c.is_zero() {
            return Err(ScalarError::ZeroInverse);
        }
        let powers = (-CACHE..=CACHE)
            .map(|k| c.pow(k).expect("c is nonzero"))
            .collect();
        Ok(Group { c, powers })
    }

    /// `c = −1`: the Klein-bottle group, `t s = s t⁻¹`.
    pub fn klein_bottle() -> Self {
        Group::new(QuadImaginary::from_i64(-1, 1)).expect("nonzero")
    }

    /// `c = 1`: free abelian of rank 2 in `y`, `x` (with `h` rational).
    pub fn abelian() -> Self {
        Group::new(QuadImaginary::one(1)).expect("nonzero")
    }

    /// `c = ω`, a primitive cube root of unity.
    pub fn zeta3() -> Self {
        Group::new(QuadImaginary::zeta3()).expect("nonzero")
    }

    /// `c = re + im·i`.
    pub fn gauss(re: BigRational, im: BigRational) -> Result<Self, ScalarError> {
        Group::new(QuadImaginary::gauss(re, im))
    }

    pub fn c(&self) -> &QuadImaginary {
        &self.c
    }

    pub fn d(&self) -> u8 {
        self.c.d()
    }

    /// Whether this is the Klein-bottle group, where `t^i s^j` notation applies.
    pub fn is_klein_bottle(&self) -> bool {
        self.c == QuadImaginary::from_i64(-1, self.c.d())
    }

    /// `c^k`.
    pub fn c_pow(&self, k: i64) -> QuadImaginary {
        if (-CACHE..=CACHE).contains(&k) {
            self.powers[(k + CACHE) as usize].clone()
        } else {
            self.c.pow(k).expect("c is nonzero")
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            h: QuadImaginary::zero(self.d()),
            n: 0,
        }
    }

    /// `y^h x^n`. Fails if `h` lives in the wrong quadratic field.
    pub fn element(&self, h: QuadImaginary, n: i64) -> Result<GroupElement, ScalarError> {
        if h.d() != self.d() {
            return Err(ScalarError::Invalid(format!(
                "exponent in Q(sqrt(-{})) for a group over Q(sqrt(-{}))",
                h.d(),
                self.d()
            )));
        }
        Ok(GroupElement { h, n })
    }

    /// `y^h` for rational `h`.
    pub fn y_pow(&self, h: i64) -> GroupElement {
        GroupElement {
            h: QuadImaginary::from_i64(h, self.d()),
            n: 0,
        }
    }

    /// `x^n`.
    pub fn x_pow(&self, n: i64) -> GroupElement {
        GroupElement {
            h: QuadImaginary::zero(self.d()),
            n,
        }
    }

    /// `t^i s^j = y^i x^j` (normal form of the Klein-bottle notation).
    pub fn ts(&self, i: i64, j: i64) -> GroupElement {
        GroupElement {
            h: QuadImaginary::from_i64(i, self.d()),
            n: j,
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let shifted = if a.n == 0 {
            b.h.clone()
        } else {
            &self.c_pow(-a.n) * &b.h
        };
        GroupElement {
            h: &a.h + &shifted,
            n: a.n + b.n,
        }
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        let h = if a.n == 0 {
            -&a.h
        } else {
            -&(&self.c_pow(a.n) * &a.h)
        };
        GroupElement { h, n: -a.n }
    }

    /// `a^k`, `k ∈ ℤ`.
    pub fn pow(&self, a: &GroupElement, k: i64) -> GroupElement {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut acc = self.identity();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    /// `g a g⁻¹`.
    pub fn conjugate(&self, g: &GroupElement, a: &GroupElement) -> GroupElement {
        self.mul(&self.mul(g, a), &self.inv(g))
    }

    /// Product of a left-to-right word.
    pub fn product<'a>(&self, word: impl IntoIterator<Item = &'a GroupElement>) -> GroupElement {
        word.into_iter()
            .fold(self.identity(), |acc, g| self.mul(&acc, g))
    }

    pub fn compare(&self, a: &GroupElement, b: &GroupElement, tag: &OrderTag) -> Ordering {
        match tag {
            OrderTag::RightOrder => a.cmp(b),
            OrderTag::DualLeftOrder => self.inv(b).cmp(&self.inv(a)),
            OrderTag::ConjugatedBy(g) => self.mul(g, a).cmp(&self.mul(g, b)),
        }
    }

    /// `S` sorted by `≤_g`, i.e. by the order of `gS`.
    pub fn local_order_class(&self, g: &GroupElement, s: &[GroupElement]) -> Vec<GroupElement> {
        let idx = self.local_order_indices(g, s);
        idx.into_iter().map(|i| s[i].clone()).collect()
    }

    /// Positions in `S` listed in `≤_g` order.
    pub fn local_order_indices(&self, g: &GroupElement, s: &[GroupElement]) -> Vec<usize> {
        let shifted: Vec<GroupElement> = s.iter().map(|e| self.mul(g, e)).collect();
        let mut idx: Vec<usize> = (0..s.len()).collect();
        idx.sort_by(|&a, &b| shifted[a].cmp(&shifted[b]));
        idx
    }

    /// Local-order classes of `xⁿ` on `S` for `n ∈ [−N, N]`, and the least
    /// translation period consistent with the whole window.
    pub fn positivity_periodicity_probe(&self, s: &[GroupElement], window: i64) -> PeriodicityReport {
        let classes: Vec<(i64, Vec<usize>)> = (-window..=window)
            .map(|n| (n, self.local_order_indices(&self.x_pow(n), s)))
            .collect();
        let max_period = window.max(1) as usize;
        let period = (1..=max_period).find(|&p| {
            classes
                .iter()
                .zip(classes.iter().skip(p))
                .all(|(a, b)| a.1 == b.1)
        });
        PeriodicityReport {
            window,
            max_period,
            classes,
            period,
        }
    }

    /// Human-readable form: `t^i*s^j` in the Klein-bottle group when `h` is
    /// an integer, otherwise `y^(a+b*w)*x^n` with trivial factors dropped.
    pub fn format(&self, g: &GroupElement) -> String {
        if self.is_klein_bottle() && g.h.im_coeff().is_zero() && g.h.re().is_integer() {
            let i = g.h.re().to_integer();
            return format_ts(&i, g.n);
        }
        format_yx(&g.h, g.n)
    }
}

fn format_yx(h: &QuadImaginary, n: i64) -> String {
    let (a, b) = h.basis_coords();
    let y = if h.is_zero() {
        String::new()
    } else if b.is_zero() && a.is_one() {
        String::from("y")
    } else if b.is_zero() && a.is_integer() {
        format!("y^{a}")
    } else {
        let w = |b: &BigRational| if b.is_one() { String::from("w") } else { format!("{b}*w") };
        let e = if a.is_zero() {
            if b.is_negative() { format!("-{}", w(&-b.clone())) } else { w(&b) }
        } else if b.is_zero() {
            format!("{a}")
        } else if b.is_negative() {
            format!("{a}-{}", w(&-b.clone()))
        } else {
            format!("{a}+{}", w(&b))
        };
        format!("y^({e})")
    };
    let x = match n {
        0 => String::new(),
        1 => String::from("x"),
        _ => format!("x^{n}"),
    };
    match (y.is_empty(), x.is_empty()) {
        (true, true) => String::from("1"),
        (false, true) => y,
        (true, false) => x,
        (false, false) => format!("{y}*{x}"),
    }
}

fn format_ts(i: &BigInt, j: i64) -> String {
    let t = if i.is_zero() {
        String::new()
    } else if i.is_one() {
        String::from("t")
    } else {
        format!("t^{i}")
    };
    let s = match j {
        0 => String::new(),
        1 => String::from("s"),
        _ => format!("s^{j}"),
    };
    match (t.is_empty(), s.is_empty()) {
        (true, true) => String::from("1"),
        (false, true) => t,
        (true, false) => s,
        (false, false) => format!("{t}*{s}"),
    }
}

/// Output of [`Group::positivity_periodicity_probe`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicityReport {
    pub window: i64,
    /// Largest period tried.
    pub max_period: usize,
    /// `(n, ≤_{xⁿ} order of S as indices)`.
    pub classes: Vec<(i64, Vec<usize>)>,
    /// Least period consistent with the window, if any up to `max_period`.
    pub period: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, qq};

    fn kb() -> Group {
        Group::klein_bottle()
    }

    #[test]
    fn klein_bottle_products() {
        let g = kb();
        let (t, s) = (g.ts(1, 0), g.ts(0, 1));
        assert_eq!(g.mul(&t, &s), g.ts(1, 1));
        assert_eq!(g.mul(&s, &t), g.ts(-1, 1));
        let ts = g.ts(1, 1);
        assert_eq!(g.mul(&ts, &ts), g.ts(0, 2));
        // defining relation t s = s t⁻¹
        assert_eq!(g.mul(&t, &s), g.mul(&s, &g.inv(&t)));
    }

    #[test]
    fn inverses() {
        let g = kb();
        assert_eq!(g.inv(&g.identity()), g.identity());
        assert_eq!(g.inv(&g.y_pow(1)), g.y_pow(-1));
        let ts = g.ts(1, 1);
        assert_eq!(g.inv(&ts), g.ts(1, -1));
        assert!(g.mul(&ts, &g.inv(&ts)).is_identity());
    }

    #[test]
    fn right_order_examples() {
        let g = kb();
        let (one, t, s) = (g.identity(), g.ts(1, 0), g.ts(0, 1));
        assert_eq!(g.compare(&one, &t, &OrderTag::RightOrder), Ordering::Less);
        assert_eq!(g.compare(&g.ts(-1, 1), &s, &OrderTag::RightOrder), Ordering::Less);
        assert_eq!(g.compare(&t, &one, &OrderTag::DualLeftOrder), Ordering::Greater);
        assert_eq!(
            g.compare(&t, &one, &OrderTag::DualLeftOrder),
            g.inv(&one).cmp(&g.inv(&t))
        );
    }

    fn z3_fixture() -> (Group, Vec<GroupElement>) {
        let g = Group::zeta3();
        let w2 = QuadImaginary::zeta3().pow(2).unwrap();
        let s = g.element(w2, 0).unwrap();
        (g.clone(), vec![g.identity(), s])
    }

    #[test]
    fn cube_root_local_orders() {
        let (g, set) = z3_fixture();
        let (one, s) = (set[0].clone(), set[1].clone());
        assert!(s < one);
        assert_eq!(g.local_order_class(&g.identity(), &set), vec![s.clone(), one.clone()]);
        assert_eq!(g.local_order_class(&g.x_pow(1), &set), vec![s.clone(), one.clone()]);
        assert_eq!(g.local_order_class(&g.x_pow(2), &set), vec![one.clone(), s.clone()]);
        // conjugation by x scales h by c⁻¹
        let xsx = g.conjugate(&g.x_pow(1), &s);
        assert_eq!(xsx.h(), &QuadImaginary::zeta3());
        let x2sx2 = g.conjugate(&g.x_pow(2), &s);
        assert_eq!(x2sx2, g.y_pow(1));
    }

    #[test]
    fn periodicity() {
        let g = kb();
        let set = [g.identity(), g.ts(1, 0)];
        assert_eq!(g.positivity_periodicity_probe(&set, 4).period, Some(2));

        let (g, set) = z3_fixture();
        assert_eq!(g.positivity_periodicity_probe(&set, 6).period, Some(3));

        let g = Group::gauss(qq(3, 5), qq(4, 5)).unwrap();
        let set = [g.identity(), g.y_pow(1)];
        let report = g.positivity_periodicity_probe(&set, 50);
        assert!(report.period.is_none_or(|p| p > 25));
    }

    #[test]
    fn conjugated_order_matches_conjugation() {
        let g = Group::zeta3();
        let samples: Vec<GroupElement> = (-2..=2)
            .flat_map(|n| {
                let g = &g;
                [(1, 0), (-1, 2), (0, 1)].into_iter().map(move |(a, b)| {
                    g.element(QuadImaginary::from_basis(q(a), q(b), 3).unwrap(), n).unwrap()
                })
            })
            .collect();
        for c in &samples {
            for a in &samples {
                for b in &samples {
                    assert_eq!(
                        g.compare(a, b, &OrderTag::ConjugatedBy(c.clone())),
                        g.conjugate(c, a).cmp(&g.conjugate(c, b))
                    );
                }
            }
        }
    }

    #[test]
    fn formatting() {
        let g = kb();
        assert_eq!(g.format(&g.identity()), "1");
        assert_eq!(g.format(&g.ts(1, 0)), "t");
        assert_eq!(g.format(&g.ts(2, 1)), "t^2*s");
        assert_eq!(g.format(&g.ts(-1, 1)), "t^-1*s");
        assert_eq!(g.format(&g.ts(0, -2)), "s^-2");
        let z = Group::zeta3();
        assert_eq!(z.format(&z.element(QuadImaginary::zeta3(), 1).unwrap()), "y^(w)*x");
    }

    #[test]
    fn cached_and_direct_powers_agree() {
        let g = Group::gauss(qq(3, 5), qq(4, 5)).unwrap();
        for k in [-70, -64, -1, 0, 1, 63, 64, 65] {
            assert_eq!(g.c_pow(k), g.c().pow(k).unwrap());
        }
    }
}
