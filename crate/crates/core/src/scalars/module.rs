use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{Ring, ScalarError};

/// A finite right module ℤ/d₁ × … × ℤ/d_k over ℤ or ℤ/m, with the ring
/// acting coordinatewise. Over ℤ/m each dᵢ must divide m.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteModule {
    ring: Ring,
    factors: Vec<u64>,
}

impl FiniteModule {
    pub fn new(ring: Ring, factors: Vec<u64>) -> Result<Self, ScalarError> {
        let m = match ring {
            Ring::Integers => 0,
            _ => ring
                .order()
                .ok_or_else(|| ScalarError::Invalid(format!("{ring} is not Z or a finite ring")))?,
        };
        if factors.is_empty() {
            return Err(ScalarError::Invalid("a module needs at least one factor".into()));
        }
        for &d in &factors {
            if d < 2 || (m != 0 && m % d != 0) {
                return Err(ScalarError::Invalid(format!(
                    "Z/{d} is not a nonzero module over Z/{m}"
                )));
            }
        }
        Ok(FiniteModule { ring, factors })
    }

    /// `R` as a module over itself.
    pub fn regular(ring: Ring) -> Result<Self, ScalarError> {
        let m = ring
            .order()
            .ok_or_else(|| ScalarError::Invalid(format!("{ring} is not a finite ring")))?;
        FiniteModule::new(ring, vec![m])
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of cyclic factors, i.e. the coordinate length of one element.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// |M|.
    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// Modulus of coordinate `i` of an element of Mⁿ (flattened).
    pub fn coordinate_modulus(&self, i: usize) -> u64 {
        self.factors[i % self.factors.len()]
    }

    /// Sum of two elements of Mⁿ.
    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(i, (x, y))| (x + y) % self.coordinate_modulus(i))
            .collect()
    }

    /// Right action `v·r` on an element of Mⁿ.
    pub fn act(&self, v: &[u64], r: u64) -> Vec<u64> {
        v.iter()
            .enumerate()
            .map(|(i, x)| {
                let d = self.coordinate_modulus(i);
                ((u128::from(*x) * u128::from(r)) % u128::from(d)) as u64
            })
            .collect()
    }

    /// Whether `m·r = 0` for a single element `m ∈ M`.
    pub fn kills(&self, m: &[u64], r: u64) -> bool {
        self.act(m, r).iter().all(|&x| x == 0)
    }

    /// Mixed-radix index of an element of Mⁿ (last coordinate fastest).
    pub fn index_of(&self, v: &[u64]) -> usize {
        let mut idx = 0usize;
        for (i, &x) in v.iter().enumerate() {
            idx = idx * self.coordinate_modulus(i) as usize + x as usize;
        }
        idx
    }

    /// Inverse of [`FiniteModule::index_of`].
    pub fn element_at(&self, mut idx: usize, n: usize) -> Vec<u64> {
        let len = n * self.rank();
        let mut v = vec![0u64; len];
        for i in (0..len).rev() {
            let d = self.coordinate_modulus(i) as usize;
            v[i] = (idx % d) as u64;
            idx /= d;
        }
        v
    }

    /// |Mⁿ|, when it fits in a `usize`.
    pub fn power_size(&self, n: usize) -> Option<usize> {
        let base = usize::try_from(self.order()).ok()?;
        let mut acc = 1usize;
        for _ in 0..n {
            acc = acc.checked_mul(base)?;
        }
        Some(acc)
    }

    /// All elements of Mⁿ in mixed-radix order.
    pub fn elements(&self, n: usize) -> ModuleElements {
        ModuleElements {
            moduli: (0..n * self.rank()).map(|i| self.coordinate_modulus(i)).collect(),
            next: Some(vec![0; n * self.rank()]),
        }
    }
}

impl fmt::Display for FiniteModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{} over {}", parts.join(" x "), self.ring)
    }
}

/// A module backend: finite and enumerable, or ℚ as a ℚ-module.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModulePresentation {
    Finite(FiniteModule),
    Rationals,
}

impl ModulePresentation {
    pub fn ring(&self) -> Ring {
        match self {
            ModulePresentation::Finite(m) => m.ring(),
            ModulePresentation::Rationals => Ring::Rationals,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteModule> {
        match self {
            ModulePresentation::Finite(m) => Some(m),
            ModulePresentation::Rationals => None,
        }
    }
}

impl fmt::Display for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulePresentation::Finite(m) => write!(f, "{m}"),
            ModulePresentation::Rationals => write!(f, "Q"),
        }
    }
}

/// Iterator over Mⁿ, counting in mixed radix with the last coordinate fastest.
#[derive(Debug, Clone)]
pub struct ModuleElements {
    moduli: Vec<u64>,
    next: Option<Vec<u64>>,
}

impl Iterator for ModuleElements {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.moduli[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

/// Every element of Mⁿ exactly once, in a deterministic order.
pub fn enumerate_module(m: &ModulePresentation, n: usize) -> Result<ModuleElements, ScalarError> {
    match m {
        ModulePresentation::Finite(fm) => Ok(fm.elements(n)),
        ModulePresentation::Rationals => Err(ScalarError::InfiniteCarrier),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn zmod_module(m: u64, factors: &[u64]) -> ModulePresentation {
        ModulePresentation::Finite(FiniteModule::new(Ring::Zmod(m), factors.to_vec()).unwrap())
    }

    #[test]
    fn small_enumerations() {
        let z2: Vec<_> = enumerate_module(&zmod_module(2, &[2]), 1).unwrap().collect();
        assert_eq!(z2, vec![vec![0], vec![1]]);
        let z4: Vec<_> = enumerate_module(&zmod_module(4, &[4]), 1).unwrap().collect();
        assert_eq!(z4, vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn klein_four_squared_has_sixteen_distinct_elements() {
        let all: Vec<_> = enumerate_module(&zmod_module(2, &[2, 2]), 2).unwrap().collect();
        let distinct: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(all.len(), 2usize.pow(2 * 2));
        assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn counts_match_product_of_factors() {
        for (m, factors, n) in [(4u64, vec![4u64, 2], 2usize), (6, vec![6], 3), (3, vec![3], 0)] {
            let fm = FiniteModule::new(Ring::Zmod(m), factors.clone()).unwrap();
            let expect = factors.iter().product::<u64>().pow(n as u32) as usize;
            let all: Vec<_> = fm.elements(n).collect();
            assert_eq!(all.len(), expect);
            for (i, v) in all.iter().enumerate() {
                assert_eq!(fm.index_of(v), i);
                assert_eq!(&fm.element_at(i, n), v);
            }
        }
    }

    #[test]
    fn rationals_are_not_enumerable() {
        assert!(matches!(
            enumerate_module(&ModulePresentation::Rationals, 1),
            Err(ScalarError::InfiniteCarrier)
        ));
    }

    #[test]
    fn action_is_bilinear_and_associative() {
        let fm = FiniteModule::new(Ring::Zmod(4), vec![4, 2]).unwrap();
        for a in fm.elements(1) {
            for b in fm.elements(1) {
                for r in 0..4u64 {
                    for s in 0..4u64 {
                        assert_eq!(fm.act(&fm.add(&a, &b), r), fm.add(&fm.act(&a, r), &fm.act(&b, r)));
                        assert_eq!(fm.act(&a, (r + s) % 4), fm.add(&fm.act(&a, r), &fm.act(&a, s)));
                        assert_eq!(fm.act(&fm.act(&a, r), s), fm.act(&a, (r * s) % 4));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_factors() {
        assert!(FiniteModule::new(Ring::Zmod(4), vec![3]).is_err());
        assert!(FiniteModule::new(Ring::Rationals, vec![2]).is_err());
        assert!(FiniteModule::new(Ring::Zmod(4), vec![]).is_err());
    }
}
