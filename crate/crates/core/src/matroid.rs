//! Closure operators on Rⁿ induced by modules, and audits of their axioms.
//!
//! A right module M gives `cl(S) = {x : ann_{Mⁿ}(x) ⊇ ann_{Mⁿ}(S)}`; a left
//! module L gives `cl(S) = {x : xL ⊆ Σ_{s∈S} sL}`. Two backends exist: finite
//! modules ℤ/d₁ × … × ℤ/d_k, decided by enumeration, and ℚ as a module over
//! ℤ, decided by exact rational elimination. Vectors are columns with `i64`
//! entries; over ℤ/m they are reduced into `[0, m)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::{all_matrices, count_matrices, entry_values, Matrix};
use crate::report::{AuditReport, Check};
use crate::scalars::{q, rank, rational_kernel_basis, rref, FiniteModule, ModulePresentation, Ring};

/// A column vector in Rⁿ.
pub type Vector = Vec<i64>;

/// Largest |Mⁿ| the finite backend will enumerate.
pub const MAX_POWER_SIZE: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatroidError {
    #[error("the module is infinite and has no exact backend")]
    InfiniteCarrier,
    #[error("search space of {size} instances exceeds the ceiling of {ceiling}")]
    SearchSpaceTooLarge { size: u128, ceiling: u128 },
    #[error("{0}")]
    Invalid(String),
}

/// Which construction induces the closure operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModuleSide {
    FromRightModule,
    FromLeftModule,
}

impl fmt::Display for ModuleSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModuleSide::FromRightModule => "right",
            ModuleSide::FromLeftModule => "left",
        })
    }
}

/// The ring R and the module inducing the closure operators on every Rⁿ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureContext {
    ring: Ring,
    module: ModulePresentation,
    side: ModuleSide,
}

/// `ann_{Mⁿ}(S)` in the form the backend computes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annihilator {
    /// Every element, as flattened coordinates.
    Elements(Vec<Vec<u64>>),
    /// A basis of the rational left kernel.
    KernelBasis(Vec<Vec<BigRational>>),
}

impl Annihilator {
    pub fn is_zero(&self) -> bool {
        match self {
            Annihilator::Elements(e) => e.iter().all(|v| v.iter().all(|&x| x == 0)),
            Annihilator::KernelBasis(b) => b.is_empty(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum FlatRepr {
    /// Membership bits of `ann(S)` over Mⁿ in mixed-radix order.
    Annihilator(Vec<bool>),
    /// Membership bits of `Σ sL` over Lⁿ.
    Image(Vec<bool>),
    /// Kernel basis of `ann(S)` over ℚⁿ.
    Kernel(Vec<Vec<BigRational>>),
}

/// The data determining `cl(S)`, comparable with [`ClosureContext::flat_le`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flat {
    n: usize,
    repr: FlatRepr,
}

impl ClosureContext {
    /// R must be ℤ or ℤ/m. A finite module needs each factor to be an
    /// R-module; the rational backend needs R = ℤ.
    pub fn new(ring: Ring, module: ModulePresentation, side: ModuleSide) -> Result<Self, MatroidError> {
        match (&module, ring) {
            (_, Ring::Rationals) => {
                return Err(MatroidError::Invalid("use R = Z entries with the Q backend".into()))
            }
            (ModulePresentation::Rationals, Ring::Zmod(_)) => {
                return Err(MatroidError::Invalid("Q is not a module over a finite ring".into()))
            }
            (ModulePresentation::Finite(m), Ring::Zmod(r)) => {
                if let Some(d) = m.factors().iter().find(|&&d| r % d != 0) {
                    return Err(MatroidError::Invalid(format!("Z/{d} is not a module over Z/{r}")));
                }
            }
            _ => {}
        }
        Ok(ClosureContext { ring, module, side })
    }

    pub fn right(ring: Ring, module: ModulePresentation) -> Result<Self, MatroidError> {
        ClosureContext::new(ring, module, ModuleSide::FromRightModule)
    }

    pub fn left(ring: Ring, module: ModulePresentation) -> Result<Self, MatroidError> {
        ClosureContext::new(ring, module, ModuleSide::FromLeftModule)
    }

    /// `R = M = ℤ/m` acting on itself from the right.
    pub fn regular(ring: Ring) -> Result<Self, MatroidError> {
        let m = FiniteModule::regular(ring).map_err(|e| MatroidError::Invalid(format!("{e}")))?;
        ClosureContext::right(ring, ModulePresentation::Finite(m))
    }

    /// R = ℤ with the module ℚ.
    pub fn rational() -> Self {
        ClosureContext {
            ring: Ring::Integers,
            module: ModulePresentation::Rationals,
            side: ModuleSide::FromRightModule,
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn module(&self) -> &ModulePresentation {
        &self.module
    }

    pub fn side(&self) -> ModuleSide {
        self.side
    }

    /// `right module Z/4 over Zmod(4)` and the like.
    pub fn label(&self) -> String {
        let m = match &self.module {
            ModulePresentation::Finite(m) => format!("{m}"),
            ModulePresentation::Rationals => format!("Q over {}", self.ring),
        };
        format!("{} module {m}", self.side)
    }

    /// Whether every Rⁿ is finite and can be enumerated.
    pub fn ring_is_finite(&self) -> bool {
        self.ring.is_finite()
    }

    /// Entry values for enumeration: all residues, or `[-bound, bound]` over ℤ.
    pub fn entry_values(&self, bound: i64) -> Vec<i64> {
        entry_values(self.ring, bound)
    }

    /// All vectors of Rⁿ with entries from [`ClosureContext::entry_values`],
    /// last coordinate fastest.
    pub fn window(&self, n: usize, bound: i64) -> Vec<Vector> {
        let vals = self.entry_values(bound);
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vector| {
                    vals.iter().map(move |&x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    pub fn canonical(&self, x: &[i64]) -> Vector {
        match self.ring {
            Ring::Zmod(m) => x.iter().map(|v| v.rem_euclid(m as i64)).collect(),
            _ => x.to_vec(),
        }
    }

    /// Describes the window used for `n` and `bound`.
    pub fn window_label(&self, n: usize, bound: i64) -> String {
        match self.ring {
            Ring::Zmod(_) => format!("{}^{n}, all entries", self.ring),
            _ => format!("{}^{n}, entries in [{}, {}]", self.ring, -bound, bound),
        }
    }

    fn finite(&self) -> Result<&FiniteModule, MatroidError> {
        self.module.as_finite().ok_or(MatroidError::InfiniteCarrier)
    }

    fn power_size(&self, m: &FiniteModule, n: usize) -> Result<usize, MatroidError> {
        match m.power_size(n) {
            Some(s) if s <= MAX_POWER_SIZE => Ok(s),
            _ => Err(MatroidError::SearchSpaceTooLarge {
                size: u128::from(m.order()).saturating_pow(n as u32),
                ceiling: MAX_POWER_SIZE as u128,
            }),
        }
    }

    /// The flat of the columns `cols`, each of height `n`.
    pub fn flat(&self, n: usize, cols: &[Vector]) -> Result<Flat, MatroidError> {
        if let Some(c) = cols.iter().find(|c| c.len() != n) {
            return Err(MatroidError::Invalid(format!("column of height {} in R^{n}", c.len())));
        }
        let repr = match (&self.module, self.side) {
            (ModulePresentation::Finite(m), ModuleSide::FromRightModule) => {
                self.power_size(m, n)?;
                FlatRepr::Annihilator(
                    m.elements(n)
                        .map(|a| cols.iter().all(|s| row_times_column(m, &a, s).iter().all(|&x| x == 0)))
                        .collect(),
                )
            }
            (ModulePresentation::Finite(m), ModuleSide::FromLeftModule) => {
                let size = self.power_size(m, n)?;
                FlatRepr::Image(column_images(m, n, size, cols))
            }
            (ModulePresentation::Rationals, _) => {
                let rows: Vec<Vec<BigRational>> =
                    (0..n).map(|i| cols.iter().map(|c| q(c[i])).collect()).collect();
                FlatRepr::Kernel(rational_kernel_basis(&rows))
            }
        };
        Ok(Flat { n, repr })
    }

    /// `cl(a) ⊆ cl(b)`.
    pub fn flat_le(&self, a: &Flat, b: &Flat) -> bool {
        assert_eq!(a.n, b.n, "flats of different heights");
        match (&a.repr, &b.repr) {
            (FlatRepr::Annihilator(x), FlatRepr::Annihilator(y)) => y.iter().zip(x).all(|(&yb, &xb)| !yb || xb),
            (FlatRepr::Image(x), FlatRepr::Image(y)) => x.iter().zip(y).all(|(&xb, &yb)| !xb || yb),
            (FlatRepr::Kernel(x), FlatRepr::Kernel(y)) => {
                let mut stacked = x.clone();
                stacked.extend(y.iter().cloned());
                rank(&stacked) == x.len()
            }
            _ => panic!("flats from different backends"),
        }
    }

    pub fn flat_eq(&self, a: &Flat, b: &Flat) -> bool {
        self.flat_le(a, b) && self.flat_le(b, a)
    }

    /// `cl(a) ⊊ cl(b)`.
    pub fn flat_lt(&self, a: &Flat, b: &Flat) -> bool {
        self.flat_le(a, b) && !self.flat_le(b, a)
    }

    /// `ann_{Mⁿ}(S)`.
    pub fn annihilator(&self, n: usize, cols: &[Vector]) -> Result<Annihilator, MatroidError> {
        if self.side != ModuleSide::FromRightModule {
            return Err(MatroidError::Invalid("annihilators need a right module".into()));
        }
        let flat = self.flat(n, cols)?;
        Ok(match flat.repr {
            FlatRepr::Annihilator(bits) => {
                let m = self.finite()?;
                Annihilator::Elements(
                    m.elements(n)
                        .zip(bits)
                        .filter(|(_, b)| *b)
                        .map(|(a, _)| a)
                        .collect(),
                )
            }
            FlatRepr::Kernel(k) => Annihilator::KernelBasis(k),
            FlatRepr::Image(_) => unreachable!("right side"),
        })
    }

    /// `x ∈ cl(S)`.
    pub fn in_closure(&self, x: &[i64], cols: &[Vector]) -> Result<bool, MatroidError> {
        let n = x.len();
        let fx = self.flat(n, &[x.to_vec()])?;
        let fs = self.flat(n, cols)?;
        Ok(self.flat_le(&fx, &fs))
    }

    /// The members of `window` lying in `cl(S)`.
    pub fn closure_within(&self, n: usize, cols: &[Vector], window: &[Vector]) -> Result<Vec<Vector>, MatroidError> {
        let fs = self.flat(n, cols)?;
        let mut out = Vec::new();
        for x in window {
            if self.flat_le(&self.flat(n, core::slice::from_ref(x))?, &fs) {
                out.push(x.clone());
            }
        }
        Ok(out)
    }

    /// The columns of `h` have closure Rⁿ.
    pub fn is_right_strong(&self, h: &Matrix) -> Result<bool, MatroidError> {
        let n = h.rows();
        let fs = self.flat(n, &h.columns())?;
        for i in 0..n {
            if !self.flat_le(&self.flat(n, &[unit(n, i)])?, &fs) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// No column of `h` lies in the closure of the others.
    pub fn is_left_strong(&self, h: &Matrix) -> Result<bool, MatroidError> {
        let n = h.rows();
        let cols = h.columns();
        for j in 0..cols.len() {
            let others: Vec<Vector> = cols.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, c)| c.clone()).collect();
            if self.flat_le(&self.flat(n, &[cols[j].clone()])?, &self.flat(n, &others)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_strong(&self, h: &Matrix) -> Result<bool, MatroidError> {
        Ok(self.is_right_strong(h)? && self.is_left_strong(h)?)
    }

    /// Whether the square matrix `a` acts bijectively on Mⁿ (by `v ↦ vA`).
    pub fn is_module_invertible(&self, a: &Matrix) -> Result<bool, MatroidError> {
        assert!(a.is_square(), "M-invertibility of a non-square matrix");
        match &self.module {
            ModulePresentation::Finite(m) => {
                let n = a.rows();
                self.power_size(m, n)?;
                let cols = a.columns();
                Ok(m
                    .elements(n)
                    .skip(1)
                    .all(|v| cols.iter().any(|c| row_times_column(m, &v, c).iter().any(|&x| x != 0))))
            }
            ModulePresentation::Rationals => Ok(a.rational_rank() == a.rows()),
        }
    }

    /// Human-readable form of the annihilator behind a right-module flat.
    pub fn describe_flat(&self, flat: &Flat) -> String {
        match (&flat.repr, &self.module) {
            (FlatRepr::Annihilator(bits), ModulePresentation::Finite(m)) => {
                if bits.iter().all(|&b| b) {
                    return if flat.n == 1 { "M".into() } else { format!("M^{}", flat.n) };
                }
                let items: Vec<String> = m
                    .elements(flat.n)
                    .zip(bits)
                    .filter(|(_, b)| **b)
                    .map(|(a, _)| format_coords(&a))
                    .collect();
                format!("{{{}}}", items.join(","))
            }
            (FlatRepr::Image(bits), _) => format!("image of size {}", bits.iter().filter(|&&b| b).count()),
            (FlatRepr::Kernel(k), _) => format!("annihilator of dimension {}", k.len()),
            _ => String::from("?"),
        }
    }
}

fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn reduce(x: i64, d: u64) -> u64 {
    x.rem_euclid(d as i64) as u64
}

/// `a·x ∈ M` for a row `a ∈ Mⁿ` (flattened) and a column `x ∈ Rⁿ`.
pub(crate) fn row_times_column(m: &FiniteModule, a: &[u64], x: &[i64]) -> Vec<u64> {
    let k = m.rank();
    (0..k)
        .map(|j| {
            let d = m.factors()[j];
            let mut acc: u128 = 0;
            for (i, &xi) in x.iter().enumerate() {
                acc += u128::from(a[i * k + j]) * u128::from(reduce(xi, d));
            }
            (acc % u128::from(d)) as u64
        })
        .collect()
}

/// Membership bits of the subgroup `Σ_s sL` of Lⁿ.
fn column_images(m: &FiniteModule, n: usize, size: usize, cols: &[Vector]) -> Vec<bool> {
    let k = m.rank();
    let mut gens: Vec<Vec<u64>> = Vec::new();
    for s in cols {
        for j in 0..k {
            let d = m.factors()[j];
            let mut g = vec![0u64; n * k];
            for (i, &si) in s.iter().enumerate() {
                g[i * k + j] = reduce(si, d);
            }
            gens.push(g);
        }
    }
    let mut seen = vec![false; size];
    seen[0] = true;
    let mut queue = vec![vec![0u64; n * k]];
    while let Some(v) = queue.pop() {
        for g in &gens {
            let w = m.add(&v, g);
            let idx = m.index_of(&w);
            if !seen[idx] {
                seen[idx] = true;
                queue.push(w);
            }
        }
    }
    seen
}

fn format_coords(a: &[u64]) -> String {
    if a.len() == 1 {
        return format!("{}", a[0]);
    }
    let parts: Vec<String> = a.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(","))
}

fn format_vector(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(","))
}

fn format_set(s: &[Vector]) -> String {
    let parts: Vec<String> = s.iter().map(|v| format_vector(v)).collect();
    format!("{{{}}}", parts.join(","))
}

fn check_size(size: Option<usize>, ceiling: usize) -> Result<usize, MatroidError> {
    match size {
        Some(s) if s <= ceiling => Ok(s),
        other => Err(MatroidError::SearchSpaceTooLarge {
            size: other.map_or(u128::MAX, |s| s as u128),
            ceiling: ceiling as u128,
        }),
    }
}

/// A chain `ann(A) ⊋ ann(B) ⊋ ann(C)` for n×n matrices agreeing off their last column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeViolation {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    /// The three annihilators (or images), described.
    pub chain: [String; 3],
}

impl fmt::Display for ExchangeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A={} B={} C={}: {} ⊋ {} ⊋ {}",
            self.a, self.b, self.c, self.chain[0], self.chain[1], self.chain[2]
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeReport {
    pub n: usize,
    pub window: String,
    /// Matrices with one free column examined.
    pub instances: usize,
    /// Strict chains found, counted per shared block and closure class.
    pub total_violations: usize,
    /// The first violations in enumeration order.
    pub violations: Vec<ExchangeViolation>,
}

impl ExchangeReport {
    pub fn holds(&self) -> bool {
        self.total_violations == 0
    }
}

/// Default ceiling on the number of closure computations an audit may run.
pub const DEFAULT_CEILING: usize = 2_000_000;

/// Searches for n×n matrices A, B, C agreeing off one column with
/// `cl(A) ⊊ cl(B) ⊊ cl(C)`, i.e. `ann(A) ⊋ ann(B) ⊋ ann(C)`.
///
/// The common n×(n−1) block runs over the window; since an annihilator only
/// depends on the set of columns, the differing column is taken last.
pub fn exchange_audit(ctx: &ClosureContext, n: usize, bound: i64, ceiling: usize) -> Result<ExchangeReport, MatroidError> {
    let vals = ctx.entry_values(bound);
    let vectors = ctx.window(n, bound);
    let blocks = check_size(count_matrices(n, n.saturating_sub(1), vals.len()), ceiling)?;
    check_size(blocks.checked_mul(vectors.len()), ceiling)?;
    let mut report = ExchangeReport {
        n,
        window: ctx.window_label(n, bound),
        instances: 0,
        total_violations: 0,
        violations: Vec::new(),
    };
    if n == 0 {
        return Ok(report);
    }
    for base in all_matrices(ctx.ring, n, n - 1, &vals) {
        let base_cols = base.columns();
        // one representative column per distinct closure
        let mut classes: Vec<(Vector, Flat)> = Vec::new();
        for v in &vectors {
            let mut cols = base_cols.clone();
            cols.push(v.clone());
            let f = ctx.flat(n, &cols)?;
            report.instances += 1;
            if !classes.iter().any(|(_, g)| ctx.flat_eq(g, &f)) {
                classes.push((v.clone(), f));
            }
        }
        let k = classes.len();
        for i in 0..k {
            for j in 0..k {
                if !ctx.flat_lt(&classes[i].1, &classes[j].1) {
                    continue;
                }
                for l in 0..k {
                    if !ctx.flat_lt(&classes[j].1, &classes[l].1) {
                        continue;
                    }
                    report.total_violations += 1;
                    if report.violations.len() < crate::report::WITNESS_CAP {
                        report.violations.push(ExchangeViolation {
                            a: base.with_column(&classes[i].0),
                            b: base.with_column(&classes[j].0),
                            c: base.with_column(&classes[l].0),
                            chain: [
                                ctx.describe_flat(&classes[i].1),
                                ctx.describe_flat(&classes[j].1),
                                ctx.describe_flat(&classes[l].1),
                            ],
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// How an audit samples when exhaustion is out of reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub trials: usize,
    /// Entry bound for ℤ windows.
    pub bound: i64,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            trials: 200,
            bound: 3,
            seed: 1,
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, vals: &[i64], n: usize) -> Vector {
    (0..n).map(|_| vals[rng.gen_range(0..vals.len())]).collect()
}

fn random_matrix(ctx: &ClosureContext, rng: &mut ChaCha8Rng, vals: &[i64], rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| vals[rng.gen_range(0..vals.len())]).collect();
    Matrix::new(ctx.ring, rows, cols, data).expect("valid shape")
}

fn add_vectors(ctx: &ClosureContext, a: &[i64], b: &[i64]) -> Vector {
    ctx.canonical(&a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>())
}

fn scale_vector(ctx: &ClosureContext, a: &[i64], r: i64) -> Vector {
    ctx.canonical(&a.iter().map(|x| x * r).collect::<Vec<_>>())
}

fn apply(h: &Matrix, x: &[i64]) -> Vector {
    let col = Matrix::from_columns(h.ring(), x.len(), &[x.to_vec()]);
    h.mul(&col).column(0)
}

/// Checks the closure-operator axioms, submodule closedness, properness of
/// `cl(∅)`, and compatibility with homomorphisms in both forms (closures of
/// images, and inverse images of closed sets).
///
/// Subsets of Rⁿ are exhausted when Rⁿ is finite with at most 16 elements;
/// otherwise `sample.trials` random instances are drawn from the window.
pub fn closure_axioms_audit(ctx: &ClosureContext, n: usize, sample: SampleSpec) -> Result<AuditReport, MatroidError> {
    let window = ctx.window(n, sample.bound);
    let vals = ctx.entry_values(sample.bound);
    let exhaustive = ctx.ring_is_finite() && window.len() <= 16;
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let label = if exhaustive {
        format!("{}, every subset", ctx.window_label(n, sample.bound))
    } else {
        format!("{}, {} sampled instances, seed {}", ctx.window_label(n, sample.bound), sample.trials, sample.seed)
    };
    let mut report = AuditReport::new(format!("closure axioms for {}", ctx.label()), label);

    let (extensive, monotone, idempotent, submodule) = if exhaustive {
        exhaustive_closure_checks(ctx, n, &window)?
    } else {
        sampled_closure_checks(ctx, n, &vals, sample.trials, &mut rng)?
    };

    let mut proper = Check::new("cl(empty) is proper");
    if n > 0 {
        let empty = ctx.flat(n, &[])?;
        let mut ok = false;
        for i in 0..n {
            ok |= !ctx.flat_le(&ctx.flat(n, &[unit(n, i)])?, &empty);
        }
        proper.record(ok, || format!("cl(empty) = {}^{n}", ctx.ring));
    }

    let mut image = Check::new("h(cl(S)) inside cl(h(S))");
    let mut preimage = Check::new("inverse images of closed sets are closed");
    let hom_trials = if exhaustive { 64 } else { sample.trials.min(100) };
    for _ in 0..hom_trials {
        let m = rng.gen_range(1..=n + 1);
        let h = random_matrix(ctx, &mut rng, &vals, n, m);
        let wm = ctx.window(m, sample.bound.min(2));
        let k = rng.gen_range(0..=m);
        let s: Vec<Vector> = (0..k).map(|_| random_vector(&mut rng, &vals, m)).collect();
        let hs: Vec<Vector> = s.iter().map(|x| apply(&h, x)).collect();
        let fs = ctx.flat(m, &s)?;
        let fhs = ctx.flat(n, &hs)?;
        for x in wm.iter().take(256) {
            if ctx.flat_le(&ctx.flat(m, core::slice::from_ref(x))?, &fs) {
                let hx = apply(&h, x);
                let ok = ctx.flat_le(&ctx.flat(n, &[hx])?, &fhs);
                image.record(ok, || format!("h={h}, S={}, x={}", format_set(&s), format_vector(x)));
            }
        }
        // A = cl(T) in Rⁿ; P = h⁻¹(A) within the window must be closed there
        let t: Vec<Vector> = (0..rng.gen_range(0..=n)).map(|_| random_vector(&mut rng, &vals, n)).collect();
        let fa = ctx.flat(n, &t)?;
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for x in wm.iter().take(256) {
            if ctx.flat_le(&ctx.flat(n, &[apply(&h, x)])?, &fa) {
                inside.push(x.clone());
            } else {
                outside.push(x.clone());
            }
        }
        let fp = ctx.flat(m, &inside)?;
        for x in &outside {
            let ok = !ctx.flat_le(&ctx.flat(m, core::slice::from_ref(x))?, &fp);
            preimage.record(ok, || format!("h={h}, T={}, x={}", format_set(&t), format_vector(x)));
        }
    }
    for c in [extensive, monotone, idempotent, submodule, proper, image, preimage] {
        report.push(c);
    }
    Ok(report)
}

/// Closure masks of every subset of the (finite) window, as bitmasks over it.
fn subset_closures(ctx: &ClosureContext, n: usize, window: &[Vector]) -> Result<Vec<u32>, MatroidError> {
    let size = window.len();
    let singles: Vec<Flat> = window.iter().map(|x| ctx.flat(n, core::slice::from_ref(x))).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(1 << size);
    for mask in 0u32..1 << size {
        let members: Vec<Vector> = (0..size).filter(|i| mask >> i & 1 == 1).map(|i| window[i].clone()).collect();
        let f = ctx.flat(n, &members)?;
        out.push((0..size).filter(|&i| ctx.flat_le(&singles[i], &f)).fold(0, |acc, i| acc | 1 << i));
    }
    Ok(out)
}

fn mask_members(window: &[Vector], mask: u32) -> Vec<Vector> {
    (0..window.len()).filter(|i| mask >> i & 1 == 1).map(|i| window[i].clone()).collect()
}

fn exhaustive_closure_checks(
    ctx: &ClosureContext,
    n: usize,
    window: &[Vector],
) -> Result<(Check, Check, Check, Check), MatroidError> {
    let size = window.len();
    let closures = subset_closures(ctx, n, window)?;
    let index = |v: &Vector| window.iter().position(|w| w == v).expect("window is all of R^n");
    let sums: Vec<Vec<usize>> = (0..size)
        .map(|i| (0..size).map(|j| index(&add_vectors(ctx, &window[i], &window[j]))).collect())
        .collect();
    let vals = ctx.entry_values(0);
    let scaled: Vec<Vec<usize>> = (0..size)
        .map(|i| vals.iter().map(|&r| index(&scale_vector(ctx, &window[i], r))).collect())
        .collect();
    let mut extensive = Check::new("extensive");
    let mut monotone = Check::new("monotone");
    let mut idempotent = Check::new("idempotent");
    let mut submodule = Check::new("closed sets are submodules");
    for mask in 0u32..1 << size {
        let cl = closures[mask as usize];
        extensive.record(mask & !cl == 0, || format!("cl({}) misses part of the set", format_set(&mask_members(window, mask))));
        for v in 0..size {
            let bigger = closures[(mask | 1 << v) as usize];
            monotone.record(cl & !bigger == 0, || {
                format!("adding {} to {} shrinks the closure", format_vector(&window[v]), format_set(&mask_members(window, mask)))
            });
        }
        idempotent.record(closures[cl as usize] == cl, || format!("cl(cl({})) differs", format_set(&mask_members(window, mask))));
    }
    // closed sets are the closures themselves
    let mut distinct: Vec<u32> = closures.clone();
    distinct.sort_unstable();
    distinct.dedup();
    for cl in distinct {
        let members: Vec<usize> = (0..size).filter(|i| cl >> i & 1 == 1).collect();
        for &i in &members {
            for &j in &members {
                submodule.record(cl >> sums[i][j] & 1 == 1, || {
                    format!("{} + {} leaves {}", format_vector(&window[i]), format_vector(&window[j]), format_set(&mask_members(window, cl)))
                });
            }
            for (k, &r) in vals.iter().enumerate() {
                submodule.record(cl >> scaled[i][k] & 1 == 1, || {
                    format!("{}·{r} leaves {}", format_vector(&window[i]), format_set(&mask_members(window, cl)))
                });
            }
        }
    }
    Ok((extensive, monotone, idempotent, submodule))
}

fn sampled_closure_checks(
    ctx: &ClosureContext,
    n: usize,
    vals: &[i64],
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Check, Check, Check, Check), MatroidError> {
    let mut extensive = Check::new("extensive");
    let mut monotone = Check::new("monotone");
    let mut idempotent = Check::new("idempotent");
    let mut submodule = Check::new("closed sets are submodules");
    for _ in 0..trials {
        let k = rng.gen_range(0..=n + 1);
        let s: Vec<Vector> = (0..k).map(|_| random_vector(rng, vals, n)).collect();
        let fs = ctx.flat(n, &s)?;
        for x in &s {
            extensive.record(ctx.flat_le(&ctx.flat(n, core::slice::from_ref(x))?, &fs), || format!("{} not in cl({})", format_vector(x), format_set(&s)));
        }
        let mut t = s.clone();
        t.push(random_vector(rng, vals, n));
        let ft = ctx.flat(n, &t)?;
        monotone.record(ctx.flat_le(&fs, &ft), || format!("cl({}) not inside cl({})", format_set(&s), format_set(&t)));
        // members of cl(S): S itself and random combinations of it
        let mut closed: Vec<Vector> = s.clone();
        for _ in 0..4 {
            let v = closed.iter().fold(vec![0; n], |acc, x| {
                add_vectors(ctx, &acc, &scale_vector(ctx, x, vals[rng.gen_range(0..vals.len())]))
            });
            if ctx.flat_le(&ctx.flat(n, core::slice::from_ref(&v))?, &fs) {
                closed.push(v);
            }
        }
        let fcl = ctx.flat(n, &closed)?;
        idempotent.record(ctx.flat_eq(&fcl, &fs), || format!("cl(cl({})) differs", format_set(&s)));
        if closed.is_empty() {
            continue;
        }
        for _ in 0..8 {
            let a = &closed[rng.gen_range(0..closed.len())];
            let b = &closed[rng.gen_range(0..closed.len())];
            let r = vals[rng.gen_range(0..vals.len())];
            let v = add_vectors(ctx, a, &scale_vector(ctx, b, r));
            let ok = ctx.flat_le(&ctx.flat(n, &[v])?, &fs);
            submodule.record(ok, || format!("{} + {}·{r} leaves cl({})", format_vector(a), format_vector(b), format_set(&s)));
        }
    }
    Ok((extensive, monotone, idempotent, submodule))
}

fn subsets_up_to(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for i in start..len {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Audits the restricted exchange condition (|S| < n) against full exchange,
/// and the consequences of the former: small generating subsets, with fewer
/// than n elements when the closure is proper, and finitariness.
pub fn restricted_exchange_audit(ctx: &ClosureContext, n: usize) -> Result<AuditReport, MatroidError> {
    if !ctx.ring_is_finite() {
        return Err(MatroidError::InfiniteCarrier);
    }
    let window = ctx.window(n, 0);
    if window.len() > 16 {
        return Err(MatroidError::SearchSpaceTooLarge {
            size: 1u128 << window.len().min(127),
            ceiling: 1 << 16,
        });
    }
    let mut report = AuditReport::new(
        format!("restricted exchange for {}", ctx.label()),
        format!("{}, every subset", ctx.window_label(n, 0)),
    );
    let size = window.len();
    let all_masks: Vec<u32> = (0u32..1 << size).collect();
    let members = |mask: u32| mask_members(&window, mask);
    let closures = subset_closures(ctx, n, &window)?;
    let full = (1u32 << size) - 1;

    let exchange_for = |mask: u32, check: &mut Check| {
        let cl = closures[mask as usize];
        for u in 0..size {
            if cl >> u & 1 == 1 {
                continue;
            }
            for t in 0..size {
                if closures[(mask | 1 << t) as usize] >> u & 1 == 0 {
                    continue;
                }
                let ok = closures[(mask | 1 << u) as usize] >> t & 1 == 1;
                check.record(ok, || {
                    format!("S={}, u={}, t={}", format_set(&members(mask)), format_vector(&window[u]), format_vector(&window[t]))
                });
            }
        }
    };
    let mut restricted = Check::new("exchange for |S| < n");
    let mut general = Check::new("exchange for all S");
    for &mask in &all_masks {
        if (mask.count_ones() as usize) < n {
            exchange_for(mask, &mut restricted);
        }
        exchange_for(mask, &mut general);
    }
    let mut equivalence = Check::new("restricted exchange iff exchange");
    equivalence.record(restricted.passed() == general.passed(), || {
        format!("restricted {} but full {}", restricted.verdict(), general.verdict())
    });
    let holds = restricted.passed();

    let mut small = Check::new("closure generated by at most n elements");
    let mut smaller = Check::new("proper closure generated by fewer than n elements");
    let mut finitary = Check::new("closure is the union over small subsets");
    if holds {
        for &mask in &all_masks {
            let idx: Vec<usize> = (0..size).filter(|i| mask >> i & 1 == 1).collect();
            let subs = subsets_up_to(idx.len(), n);
            let sub_masks: Vec<u32> = subs.iter().map(|s| s.iter().fold(0u32, |acc, &k| acc | 1 << idx[k])).collect();
            let target = closures[mask as usize];
            small.record(sub_masks.iter().any(|&s| closures[s as usize] == target), || format_set(&members(mask)));
            if target != full {
                let ok = sub_masks
                    .iter()
                    .any(|&s| (s.count_ones() as usize) < n && closures[s as usize] == target);
                smaller.record(ok, || format_set(&members(mask)));
            }
            let union = sub_masks.iter().fold(0u32, |acc, &s| acc | closures[s as usize]);
            finitary.record(union == target, || format_set(&members(mask)));
        }
    } else {
        let note = "restricted exchange fails; consequences not implied";
        small = small.with_note(note);
        smaller = smaller.with_note(note);
        finitary = finitary.with_note(note);
    }
    for c in [restricted, general, equivalence, small, smaller, finitary] {
        report.push(c);
    }
    Ok(report)
}

/// Audits the either/or condition for every n ≤ `max_n` over the window:
/// for each n×(n−1) matrix X whose top block is M-invertible and each column
/// y, y either kills the kernel K of X on Mⁿ or maps K bijectively onto M.
///
/// Also checks that a bijective y makes `(X y)` M-invertible, and, when the
/// condition holds for all n ≤ `max_n`, that a maximal M-invertible square
/// submatrix of any H carries the annihilator of H.
pub fn either_or_audit(ctx: &ClosureContext, max_n: usize, bound: i64, ceiling: usize) -> Result<AuditReport, MatroidError> {
    let m = ctx.finite()?.clone();
    if ctx.side != ModuleSide::FromRightModule {
        return Err(MatroidError::Invalid("either/or needs a right module".into()));
    }
    let vals = ctx.entry_values(bound);
    let mut report = AuditReport::new(
        format!("either/or for {}", ctx.label()),
        format!("n <= {max_n}, {}", ctx.window_label(max_n, bound)),
    );
    let mut either_or = Check::new("either/or");
    let mut extension = Check::new("bijective column extends to an M-invertible matrix");
    for n in 1..=max_n {
        let xs = check_size(count_matrices(n, n - 1, vals.len()), ceiling)?;
        let vectors = ctx.window(n, bound);
        check_size(xs.checked_mul(vectors.len()), ceiling)?;
        let elems: Vec<Vec<u64>> = m.elements(n).collect();
        for x in all_matrices(ctx.ring, n, n - 1, &vals) {
            let top = x.submatrix(&(0..n - 1).collect::<Vec<_>>(), &(0..n - 1).collect::<Vec<_>>());
            if !ctx.is_module_invertible(&top)? {
                continue;
            }
            let xcols = x.columns();
            let kernel: Vec<&Vec<u64>> = elems
                .iter()
                .filter(|a| xcols.iter().all(|c| row_times_column(&m, a, c).iter().all(|&v| v == 0)))
                .collect();
            for y in &vectors {
                let images: Vec<Vec<u64>> = kernel.iter().map(|a| row_times_column(&m, a, y)).collect();
                let zero = images.iter().all(|v| v.iter().all(|&e| e == 0));
                let distinct: BTreeSet<&Vec<u64>> = images.iter().collect();
                let bijective = distinct.len() == images.len() && distinct.len() as u64 == m.order();
                either_or.record(zero || bijective, || {
                    format!("X={x}, y={}: image of K has {} of {} elements", format_vector(y), distinct.len(), m.order())
                });
                if bijective {
                    let ext = x.with_column(y);
                    let ok = ctx.is_module_invertible(&ext)?;
                    extension.record(ok, || format!("X={x}, y={}", format_vector(y)));
                }
            }
        }
    }
    let mut max_inv = Check::new("maximal invertible block carries the annihilator");
    if either_or.passed() {
        for n in 1..=max_n {
            for cols in 0..=n + 1 {
                check_size(count_matrices(n, cols, vals.len()), ceiling)?;
                for h in all_matrices(ctx.ring, n, cols, &vals) {
                    let (_, col_set) = maximal_invertible_block(ctx, &h)?;
                    let sub: Vec<Vector> = col_set.iter().map(|&j| h.column(j)).collect();
                    let ok = ctx.flat_eq(&ctx.flat(n, &h.columns())?, &ctx.flat(n, &sub)?);
                    max_inv.record(ok, || format!("H={h}, block columns {col_set:?}"));
                }
            }
        }
    } else {
        max_inv = max_inv.with_note("either/or fails in the window; hypothesis not met");
    }
    report.push(either_or);
    report.push(extension);
    report.push(max_inv);
    Ok(report)
}

/// Row and column index sets of a largest M-invertible square submatrix
/// (the first found in enumeration order).
pub fn maximal_invertible_block(ctx: &ClosureContext, h: &Matrix) -> Result<(Vec<usize>, Vec<usize>), MatroidError> {
    let max = h.rows().min(h.cols());
    for k in (1..=max).rev() {
        for rows in combinations(h.rows(), k) {
            for cols in combinations(h.cols(), k) {
                if ctx.is_module_invertible(&h.submatrix(&rows, &cols))? {
                    return Ok((rows, cols));
                }
            }
        }
    }
    Ok((Vec::new(), Vec::new()))
}

/// All k-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    subsets_up_to(n, k).into_iter().filter(|s| s.len() == k).collect()
}

/// Audits the strong-matrix lemmas on random instances over the context's
/// finite ring: identity, products, adjoining and deleting lines, the unit
/// column exchange, and the seven clauses comparing right, left and
/// two-sided strength. Each clause draws `trials` instances meeting its
/// hypothesis, with matrices of at most `max_n` rows.
pub fn strong_lemmas_audit(ctx: &ClosureContext, max_n: usize, trials: usize, seed: u64) -> Result<AuditReport, MatroidError> {
    if !ctx.ring_is_finite() {
        return Err(MatroidError::InfiniteCarrier);
    }
    let vals = ctx.entry_values(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AuditReport::new(
        format!("strong matrix lemmas for {}", ctx.label()),
        format!("rows <= {max_n}, {trials} instances per clause, seed {seed}"),
    );
    let n_range = |rng: &mut ChaCha8Rng| rng.gen_range(1..=max_n);
    const TRIES: usize = 200;

    // draws a matrix with the given shape generator satisfying `want`
    fn draw(
        ctx: &ClosureContext,
        rng: &mut ChaCha8Rng,
        vals: &[i64],
        shape: &mut dyn FnMut(&mut ChaCha8Rng) -> (usize, usize),
        want: &dyn Fn(&Matrix) -> Result<bool, MatroidError>,
    ) -> Result<Option<Matrix>, MatroidError> {
        for _ in 0..TRIES {
            let (r, c) = shape(rng);
            let h = random_matrix(ctx, rng, vals, r, c);
            if want(&h)? {
                return Ok(Some(h));
            }
        }
        Ok(None)
    }
    let rs = |h: &Matrix| ctx.is_right_strong(h);
    let ls = |h: &Matrix| ctx.is_left_strong(h);
    let any = |_: &Matrix| Ok(true);

    let mut identity = Check::new("identity is strong");
    for i in 0..trials {
        let n = i % max_n + 1;
        let id = Matrix::identity(ctx.ring, n);
        identity.record(ctx.is_strong(&id)?, || format!("I_{n}"));
    }
    report.push(identity);

    let mut prod_r = Check::new("products of right strong are right strong");
    let mut prod_l = Check::new("products of left strong are left strong");
    for _ in 0..trials {
        let n = n_range(&mut rng);
        let n1 = rng.gen_range(n..=max_n);
        let n2 = rng.gen_range(n1..=max_n + 1);
        let a = draw(ctx, &mut rng, &vals, &mut |_| (n, n1), &rs)?;
        let b = draw(ctx, &mut rng, &vals, &mut |_| (n1, n2), &rs)?;
        if let (Some(a), Some(b)) = (a, b) {
            let ab = a.mul(&b);
            prod_r.record(ctx.is_right_strong(&ab)?, || format!("A={a}, B={b}"));
        }
        let n = n_range(&mut rng);
        let n1 = rng.gen_range(0..=n);
        let n2 = rng.gen_range(0..=n1);
        let a = draw(ctx, &mut rng, &vals, &mut |_| (n, n1), &ls)?;
        let b = draw(ctx, &mut rng, &vals, &mut |_| (n1, n2), &ls)?;
        if let (Some(a), Some(b)) = (a, b) {
            let ab = a.mul(&b);
            prod_l.record(ctx.is_left_strong(&ab)?, || format!("A={a}, B={b}"));
        }
    }
    report.push(prod_r);
    report.push(prod_l);

    let mut adj_r = Check::new("right strong survives adjoining columns and deleting rows");
    let mut adj_l = Check::new("left strong survives deleting columns and adjoining rows");
    for _ in 0..trials {
        let n = n_range(&mut rng);
        let c = rng.gen_range(n..=max_n + 1);
        if let Some(h) = draw(ctx, &mut rng, &vals, &mut |_| (n, c), &rs)? {
            let col = random_vector(&mut rng, &vals, n);
            let wider = h.with_column(&col);
            let row = rng.gen_range(0..n);
            let shorter = h.without_row(row);
            let ok = ctx.is_right_strong(&wider)? && ctx.is_right_strong(&shorter)?;
            adj_r.record(ok, || format!("H={h}, column {}, row {row}", format_vector(&col)));
        }
        let n = n_range(&mut rng);
        let c = rng.gen_range(1..=n);
        if let Some(h) = draw(ctx, &mut rng, &vals, &mut |_| (n, c), &ls)? {
            let col = rng.gen_range(0..c);
            let narrower = h.without_column(col);
            let mut ok = ctx.is_left_strong(&narrower)?;
            let mut row = Vec::new();
            if n < max_n {
                row = random_vector(&mut rng, &vals, c);
                ok &= ctx.is_left_strong(&h.with_row(&row))?;
            }
            adj_l.record(ok, || format!("H={h}, column {col}, row {}", format_vector(&row)));
        }
    }
    report.push(adj_r);
    report.push(adj_l);

    let mut unit_cols = Check::new("deleting rows matches adjoining unit columns");
    for _ in 0..trials {
        let n = n_range(&mut rng);
        let c = rng.gen_range(0..=max_n + 1);
        let h = random_matrix(ctx, &mut rng, &vals, n, c);
        let d = rng.gen_range(1..=n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..d {
            let j = rng.gen_range(i..n);
            idx.swap(i, j);
        }
        let mut chosen: Vec<usize> = idx[..d].to_vec();
        chosen.sort_unstable();
        let keep: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
        let h1 = h.submatrix(&keep, &(0..c).collect::<Vec<_>>());
        let mut h2 = h.clone();
        for &i in &chosen {
            h2 = h2.with_column(&unit(n, i));
        }
        let ok = ctx.is_right_strong(&h1)? == ctx.is_right_strong(&h2)? && ctx.is_left_strong(&h1)? == ctx.is_left_strong(&h2)?;
        unit_cols.record(ok, || format!("H={h}, rows {chosen:?}"));
    }
    report.push(unit_cols);

    let mut shape_r = Check::new("right strong has at least as many columns as rows");
    let mut shape_l = Check::new("left strong has at least as many rows as columns");
    for _ in 0..trials {
        if let Some(h) = draw(
            ctx,
            &mut rng,
            &vals,
            &mut |r| (r.gen_range(1..=max_n), r.gen_range(0..=max_n + 1)),
            &rs,
        )? {
            shape_r.record(h.rows() <= h.cols(), || format!("H={h}"));
        }
        if let Some(h) = draw(
            ctx,
            &mut rng,
            &vals,
            &mut |r| (r.gen_range(1..=max_n), r.gen_range(0..=max_n + 1)),
            &ls,
        )? {
            shape_l.record(h.rows() >= h.cols(), || format!("H={h}"));
        }
    }
    report.push(shape_r);
    report.push(shape_l);

    let mut columns_clause = Check::new("column subsets: minimal right strong iff maximal left strong");
    let mut rows_clause = Check::new("row subsets: minimal left strong iff maximal right strong");
    for _ in 0..trials {
        let n = n_range(&mut rng);
        let c = rng.gen_range(n..=max_n + 1);
        if let Some(h) = draw(ctx, &mut rng, &vals, &mut |_| (n, c), &rs)? {
            let ok = column_subset_clause(ctx, &h)?;
            columns_clause.record(ok, || format!("H={h}"));
        }
        let n = n_range(&mut rng);
        let c = rng.gen_range(0..=n);
        if let Some(h) = draw(ctx, &mut rng, &vals, &mut |_| (n, c), &ls)? {
            let ok = row_subset_clause(ctx, &h)?;
            rows_clause.record(ok, || format!("H={h}"));
        }
    }
    report.push(columns_clause);
    report.push(rows_clause);

    let mut square = Check::new("one-sided strong is strong iff square");
    let mut maximal = Check::new("maximal strong submatrices are rank-sized");
    let mut last_col = Check::new("square with strong corner: strong iff last column independent");
    for _ in 0..trials {
        if let Some(h) = draw(
            ctx,
            &mut rng,
            &vals,
            &mut |r| (r.gen_range(1..=max_n), r.gen_range(0..=max_n + 1)),
            &|h: &Matrix| Ok(ctx.is_right_strong(h)? || ctx.is_left_strong(h)?),
        )? {
            let ok = ctx.is_strong(&h)? == h.is_square();
            square.record(ok, || format!("H={h}"));
        }
        let h = draw(
            ctx,
            &mut rng,
            &vals,
            &mut |r| (r.gen_range(1..=max_n), r.gen_range(1..=max_n)),
            &any,
        )?
        .expect("unconditional draw");
        let ok = maximal_strong_clause(ctx, &h)?;
        maximal.record(ok, || format!("H={h}"));
        let n = n_range(&mut rng);
        let corner = |h: &Matrix| {
            let idx: Vec<usize> = (0..h.rows() - 1).collect();
            ctx.is_strong(&h.submatrix(&idx, &idx))
        };
        if let Some(h) = draw(ctx, &mut rng, &vals, &mut |_| (n, n), &corner)? {
            let cols = h.columns();
            let inside = ctx.in_closure(&cols[n - 1], &cols[..n - 1])?;
            let ok = ctx.is_strong(&h)? == !inside;
            last_col.record(ok, || format!("H={h}"));
        }
    }
    report.push(square);
    report.push(maximal);
    report.push(last_col);
    for c in &mut report.checks {
        if c.instances == 0 && c.note.is_none() {
            c.note = Some("no instance met the hypothesis".into());
        }
    }
    Ok(report)
}

fn column_subset_clause(ctx: &ClosureContext, h: &Matrix) -> Result<bool, MatroidError> {
    let rows: Vec<usize> = (0..h.rows()).collect();
    let c = h.cols();
    let mut right = Vec::with_capacity(1 << c);
    let mut left = Vec::with_capacity(1 << c);
    for mask in 0u32..1 << c {
        let cols: Vec<usize> = (0..c).filter(|j| mask >> j & 1 == 1).collect();
        let sub = h.submatrix(&rows, &cols);
        right.push(ctx.is_right_strong(&sub)?);
        left.push(ctx.is_left_strong(&sub)?);
    }
    subset_duality(c, &right, &left, ctx, h, true)
}

fn row_subset_clause(ctx: &ClosureContext, h: &Matrix) -> Result<bool, MatroidError> {
    let cols: Vec<usize> = (0..h.cols()).collect();
    let r = h.rows();
    let mut right = Vec::with_capacity(1 << r);
    let mut left = Vec::with_capacity(1 << r);
    for mask in 0u32..1 << r {
        let rows: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).collect();
        let sub = h.submatrix(&rows, &cols);
        right.push(ctx.is_right_strong(&sub)?);
        left.push(ctx.is_left_strong(&sub)?);
    }
    subset_duality(r, &left, &right, ctx, h, false)
}

/// Over subsets of `len` lines: minimal for `minimal_of` ⟺ maximal for
/// `maximal_of`, and such subsets give strong submatrices.
fn subset_duality(
    len: usize,
    minimal_of: &[bool],
    maximal_of: &[bool],
    ctx: &ClosureContext,
    h: &Matrix,
    columns: bool,
) -> Result<bool, MatroidError> {
    for mask in 0u32..1 << len {
        let m = mask as usize;
        let is_min = minimal_of[m] && (0..len).filter(|i| mask >> i & 1 == 1).all(|i| !minimal_of[m & !(1 << i)]);
        let is_max = maximal_of[m] && (0..len).filter(|i| mask >> i & 1 == 0).all(|i| !maximal_of[m | 1 << i]);
        if is_min != is_max {
            return Ok(false);
        }
        if is_min {
            let idx: Vec<usize> = (0..len).filter(|i| mask >> i & 1 == 1).collect();
            let sub = if columns {
                h.submatrix(&(0..h.rows()).collect::<Vec<_>>(), &idx)
            } else {
                h.submatrix(&idx, &(0..h.cols()).collect::<Vec<_>>())
            };
            if !ctx.is_strong(&sub)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Size of a minimal family of columns with the closure of all of them.
pub fn column_rank(ctx: &ClosureContext, h: &Matrix) -> Result<usize, MatroidError> {
    let n = h.rows();
    let cols = h.columns();
    let target = ctx.flat(n, &cols)?;
    let mut kept: Vec<Vector> = cols.clone();
    let mut i = 0;
    while i < kept.len() {
        let mut without = kept.clone();
        without.remove(i);
        if ctx.flat_eq(&ctx.flat(n, &without)?, &target) {
            kept = without;
        } else {
            i += 1;
        }
    }
    Ok(kept.len())
}

fn maximal_strong_clause(ctx: &ClosureContext, h: &Matrix) -> Result<bool, MatroidError> {
    let m = column_rank(ctx, h)?;
    let mut strong: Vec<(u32, u32)> = Vec::new();
    for rmask in 0u32..1 << h.rows() {
        for cmask in 0u32..1 << h.cols() {
            if rmask.count_ones() != cmask.count_ones() {
                continue;
            }
            let rows: Vec<usize> = (0..h.rows()).filter(|i| rmask >> i & 1 == 1).collect();
            let cols: Vec<usize> = (0..h.cols()).filter(|j| cmask >> j & 1 == 1).collect();
            if ctx.is_strong(&h.submatrix(&rows, &cols))? {
                strong.push((rmask, cmask));
            }
        }
    }
    let contained = |a: (u32, u32), b: (u32, u32)| a != b && a.0 & !b.0 == 0 && a.1 & !b.1 == 0;
    Ok(strong
        .iter()
        .filter(|&&s| !strong.iter().any(|&t| contained(s, t)))
        .all(|s| s.0.count_ones() as usize == m))
}

/// Linear span membership over 𝔽_p, by elimination; used to cross-check the
/// field case.
pub fn span_contains_mod_p(p: u64, cols: &[Vector], x: &[i64]) -> bool {
    let rows = |vs: &[Vector]| -> usize {
        let mut m: Vec<Vec<i64>> = vs.iter().map(|v| v.iter().map(|e| e.rem_euclid(p as i64)).collect()).collect();
        let width = m.first().map_or(0, Vec::len);
        let mut r = 0;
        let p = p as i64;
        for c in 0..width {
            let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(r, piv);
            let inv = (1..p).find(|k| (m[r][c] * k).rem_euclid(p) == 1).expect("p is prime");
            for e in m[r].iter_mut() {
                *e = (*e * inv).rem_euclid(p);
            }
            for i in 0..m.len() {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c];
                    let pivot = m[r].clone();
                    for (e, v) in m[i].iter_mut().zip(&pivot) {
                        *e = (*e - f * v).rem_euclid(p);
                    }
                }
            }
            r += 1;
        }
        r
    };
    let mut with = cols.to_vec();
    with.push(x.to_vec());
    rows(&with) == rows(cols)
}

/// Row-reduced rational span of a family, for comparing closures over ℚ.
pub fn rational_span(cols: &[Vector]) -> Vec<Vec<BigRational>> {
    rref(&cols.iter().map(|c| c.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>()).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::span_contains;

    fn zmod(m: u64) -> ClosureContext {
        ClosureContext::regular(Ring::Zmod(m)).unwrap()
    }

    #[test]
    fn annihilator_examples() {
        let c = zmod(4);
        let all = c.annihilator(1, &[]).unwrap();
        assert_eq!(all, Annihilator::Elements(vec![vec![0], vec![1], vec![2], vec![3]]));
        assert_eq!(c.annihilator(1, &[vec![2]]).unwrap(), Annihilator::Elements(vec![vec![0], vec![2]]));
        let r = ClosureContext::rational();
        assert!(r.annihilator(2, &[vec![1, 0], vec![0, 1]]).unwrap().is_zero());
    }

    #[test]
    fn closure_examples() {
        let c = zmod(4);
        assert!(c.in_closure(&[2], &[vec![2]]).unwrap());
        assert!(!c.in_closure(&[1], &[vec![2]]).unwrap());
        let r = ClosureContext::rational();
        assert!(r.in_closure(&[3], &[vec![2]]).unwrap());
        assert!(!r.in_closure(&[1, 0], &[vec![2, 4]]).unwrap());
        assert!(r.in_closure(&[-1, -2], &[vec![2, 4]]).unwrap());
    }

    #[test]
    fn field_closure_is_span() {
        for p in [2u64, 3] {
            let c = zmod(p);
            let window = c.window(2, 0);
            for a in &window {
                for b in &window {
                    for x in &window {
                        let s = vec![a.clone(), b.clone()];
                        assert_eq!(c.in_closure(x, &s).unwrap(), span_contains_mod_p(p, &s, x));
                    }
                }
            }
        }
        let r = ClosureContext::rational();
        let w = r.window(2, 2);
        for a in w.iter().step_by(3) {
            for x in &w {
                let span: Vec<Vec<BigRational>> = vec![a.iter().map(|&v| q(v)).collect()];
                let xs: Vec<BigRational> = x.iter().map(|&v| q(v)).collect();
                assert_eq!(r.in_closure(x, core::slice::from_ref(a)).unwrap(), span_contains(&span, &xs));
            }
        }
    }

    #[test]
    fn left_module_closure() {
        let m = FiniteModule::regular(Ring::Zmod(4)).unwrap();
        let c = ClosureContext::left(Ring::Zmod(4), ModulePresentation::Finite(m)).unwrap();
        // 2·L = {0,2} contains 2·L but not 1·L
        assert!(c.in_closure(&[2], &[vec![2]]).unwrap());
        assert!(!c.in_closure(&[1], &[vec![2]]).unwrap());
        assert!(c.in_closure(&[2], &[vec![1]]).unwrap());
    }

    #[test]
    fn strong_examples() {
        let c = zmod(2);
        let id = Matrix::identity(Ring::Zmod(2), 3);
        assert!(c.is_strong(&id).unwrap());
        let col = Matrix::from_rows(Ring::Zmod(2), &[vec![1], vec![0]]).unwrap();
        assert!(c.is_left_strong(&col).unwrap());
        assert!(!c.is_right_strong(&col).unwrap());
        let zero = Matrix::zero(Ring::Zmod(2), 2, 1);
        assert!(!c.is_left_strong(&zero).unwrap());
    }

    #[test]
    fn exchange_on_small_rings() {
        let f2 = exchange_audit(&zmod(2), 2, 0, DEFAULT_CEILING).unwrap();
        assert!(f2.holds());
        let z4 = exchange_audit(&zmod(4), 1, 0, DEFAULT_CEILING).unwrap();
        assert!(!z4.holds());
        let v = &z4.violations[0];
        assert_eq!(v.chain, [String::from("M"), "{0,2}".into(), "{0}".into()]);
        assert_eq!((v.a.get(0, 0), v.b.get(0, 0), v.c.get(0, 0)), (0, 2, 1));
    }

    #[test]
    fn exchange_over_rationals() {
        let r = exchange_audit(&ClosureContext::rational(), 2, 1, DEFAULT_CEILING).unwrap();
        assert!(r.holds());
        assert_eq!(r.instances, 9 * 9);
    }

    #[test]
    fn ceiling_is_enforced() {
        assert!(matches!(
            exchange_audit(&zmod(4), 3, 0, 1000),
            Err(MatroidError::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn either_or_examples() {
        let z4 = either_or_audit(&zmod(4), 1, 0, DEFAULT_CEILING).unwrap();
        let c = z4.check("either/or").unwrap();
        assert!(!c.passed());
        assert!(c.witnesses[0].contains("y=(2)"));
        let f5 = either_or_audit(&zmod(5), 1, 0, DEFAULT_CEILING).unwrap();
        assert!(f5.passed());
        let f2 = either_or_audit(&zmod(2), 2, 0, DEFAULT_CEILING).unwrap();
        assert!(f2.passed(), "{f2}");
        assert!(f2.check("bijective column extends to an M-invertible matrix").unwrap().instances > 0);
    }

    #[test]
    fn closure_axioms_on_small_fields() {
        for n in 1..=3 {
            let r = closure_axioms_audit(&zmod(2), n, SampleSpec::default()).unwrap();
            assert!(r.passed(), "{r}");
        }
        let r = closure_axioms_audit(&zmod(4), 2, SampleSpec::default()).unwrap();
        assert!(r.passed(), "{r}");
        let r = closure_axioms_audit(&ClosureContext::rational(), 2, SampleSpec { trials: 60, ..SampleSpec::default() }).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn restricted_exchange_examples() {
        let r = restricted_exchange_audit(&zmod(2), 2).unwrap();
        assert!(r.passed(), "{r}");
        let r = restricted_exchange_audit(&zmod(3), 1).unwrap();
        assert!(r.passed(), "{r}");
        let r = restricted_exchange_audit(&zmod(4), 1).unwrap();
        assert!(!r.check("exchange for |S| < n").unwrap().passed());
        assert!(r.check("restricted exchange iff exchange").unwrap().passed());
    }

    #[test]
    fn strong_lemmas_small_run() {
        let r = strong_lemmas_audit(&zmod(2), 3, 20, 7).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.checks.iter().all(|c| c.instances > 0), "{r}");
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }
}
