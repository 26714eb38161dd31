//! Matrix ideals: sets of square matrices closed under the operations a
//! singular kernel is closed under, and audits of those closure axioms on
//! bounded windows of integer or residue matrices.
//!
//! Row vectors of Mⁿ are acted on from the right: `v ↦ vA`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use num_integer::Integer;

use crate::matrix::{all_matrices, count_matrices, entry_values, Axis, Matrix};
use crate::matroid::row_times_column;
use crate::report::{AuditReport, Check};
use crate::scalars::{FiniteModule, Ring};

/// Largest power of a module the audits enumerate.
pub const MAX_POWER_SIZE: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatIdealError {
    #[error("a {rows}x{cols} matrix is not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrices over {0} and {1} cannot be combined")]
    RingMismatch(Ring, Ring),
    #[error("the matrices differ off {axis} {index}")]
    NotSummable { axis: Axis, index: usize },
    #[error("membership needs a finite module")]
    InfiniteCarrier,
    #[error("search space of {size} exceeds the ceiling of {ceiling}")]
    SearchSpaceTooLarge { size: u128, ceiling: u128 },
    #[error("{0}")]
    Invalid(String),
}

/// A square matrix over ℤ or ℤ/m, including the 0×0 matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareMatrix(Matrix);

impl SquareMatrix {
    pub fn new(m: Matrix) -> Result<Self, MatIdealError> {
        if m.is_square() {
            Ok(SquareMatrix(m))
        } else {
            Err(MatIdealError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            })
        }
    }

    pub fn from_rows(ring: Ring, rows: &[Vec<i64>]) -> Result<Self, MatIdealError> {
        let m = Matrix::from_rows(ring, rows).map_err(|e| MatIdealError::Invalid(format!("{e}")))?;
        SquareMatrix::new(m)
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        SquareMatrix(Matrix::identity(ring, n))
    }

    /// The 1×1 matrix `[x]`.
    pub fn scalar(ring: Ring, x: i64) -> Self {
        SquareMatrix(Matrix::new(ring, 1, 1, vec![x]).expect("1x1 shape"))
    }

    pub fn size(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

impl Deref for SquareMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `A ⊕ B`.
pub fn diag_sum(a: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
    SquareMatrix(a.0.diag_sum(&b.0))
}

/// `A ∇ B` along line `r` (0-based) of `axis`.
pub fn det_sum(a: &SquareMatrix, b: &SquareMatrix, r: usize, axis: Axis) -> Result<SquareMatrix, MatIdealError> {
    if a.ring() != b.ring() {
        return Err(MatIdealError::RingMismatch(a.ring(), b.ring()));
    }
    let n = a.size();
    if b.size() != n || r >= n {
        return Err(MatIdealError::NotSummable { axis, index: r });
    }
    if (0..n).any(|k| k != r && a.line(axis, k) != b.line(axis, k)) {
        return Err(MatIdealError::NotSummable { axis, index: r });
    }
    let sum: Vec<i64> = a.line(axis, r).iter().zip(b.line(axis, r)).map(|(x, y)| x + y).collect();
    Ok(SquareMatrix(a.0.with_line(axis, r, &sum)))
}

/// A decidable set of square matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixIdealSpec {
    /// Matrices acting non-injectively on Mⁿ.
    InducedNonInjective(FiniteModule),
    /// Matrices acting non-surjectively on Mⁿ.
    InducedNonSurjective(FiniteModule),
    /// Integer matrices whose determinant is divisible by p.
    DetDivisibleBy(u64),
    ExplicitList(Vec<SquareMatrix>),
}

impl fmt::Display for MatrixIdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixIdealSpec::InducedNonInjective(m) => write!(f, "non-injective on powers of {m}"),
            MatrixIdealSpec::InducedNonSurjective(m) => write!(f, "non-surjective on powers of {m}"),
            MatrixIdealSpec::DetDivisibleBy(p) => write!(f, "determinant divisible by {p}"),
            MatrixIdealSpec::ExplicitList(l) => {
                let items: Vec<String> = l.iter().map(|a| format!("{a}")).collect();
                write!(f, "explicit list {{{}}}", items.join(", "))
            }
        }
    }
}

impl MatrixIdealSpec {
    /// Whether `a` belongs to the set.
    pub fn contains(&self, a: &SquareMatrix) -> Result<bool, MatIdealError> {
        match self {
            MatrixIdealSpec::InducedNonInjective(m) => {
                check_module(m, a.ring())?;
                for &d in m.factors() {
                    if kernel_is_nonzero(d, a)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            MatrixIdealSpec::InducedNonSurjective(m) => {
                check_module(m, a.ring())?;
                for &d in m.factors() {
                    if !image_is_everything(d, a)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            MatrixIdealSpec::DetDivisibleBy(p) => {
                let p = *p;
                if p == 0 {
                    return Err(MatIdealError::Invalid("divisibility by 0".into()));
                }
                if let Ring::Zmod(m) = a.ring() {
                    if m % p != 0 {
                        return Err(MatIdealError::Invalid(format!("divisibility by {p} is not defined over Z/{m}")));
                    }
                }
                Ok(a.det().rem_euclid(i128::from(p)) == 0)
            }
            MatrixIdealSpec::ExplicitList(l) => Ok(l.contains(a)),
        }
    }
}

/// Membership of `a` in the set described by `spec`.
pub fn ideal_member(spec: &MatrixIdealSpec, a: &SquareMatrix) -> Result<bool, MatIdealError> {
    spec.contains(a)
}

fn check_module(m: &FiniteModule, ring: Ring) -> Result<(), MatIdealError> {
    match ring {
        Ring::Zmod(r) => match m.factors().iter().find(|&&d| r % d != 0) {
            Some(d) => Err(MatIdealError::Invalid(format!("Z/{d} is not a module over Z/{r}"))),
            None => Ok(()),
        },
        Ring::Integers => Ok(()),
        _ => Err(MatIdealError::Invalid("matrices need Z or Z/m entries".into())),
    }
}

fn power_size(d: u64, len: usize) -> Result<usize, MatIdealError> {
    match usize::try_from(d).ok().and_then(|d| d.checked_pow(len as u32)) {
        Some(s) if s <= MAX_POWER_SIZE => Ok(s),
        _ => Err(MatIdealError::SearchSpaceTooLarge {
            size: u128::from(d).saturating_pow(len as u32),
            ceiling: MAX_POWER_SIZE as u128,
        }),
    }
}

/// Calls `f` on every vector of `(ℤ/d)^len`, zero first, last coordinate fastest.
fn for_each_vector(d: u64, len: usize, mut f: impl FnMut(&[u64]) -> bool) {
    let mut v = vec![0u64; len];
    loop {
        if !f(&v) {
            return;
        }
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            v[k] += 1;
            if v[k] < d {
                break;
            }
            v[k] = 0;
        }
    }
}

/// `vA` over ℤ/d.
fn act_row(d: u64, v: &[u64], a: &Matrix) -> Vec<u64> {
    let d128 = u128::from(d);
    (0..a.cols())
        .map(|j| {
            let mut acc: u128 = 0;
            for (i, &vi) in v.iter().enumerate() {
                acc += u128::from(vi) * u128::from(a.get(i, j).rem_euclid(d as i64) as u64);
            }
            (acc % d128) as u64
        })
        .collect()
}

fn radix_index(d: u64, v: &[u64]) -> usize {
    v.iter().fold(0usize, |acc, &x| acc * d as usize + x as usize)
}

/// Some nonzero `v ∈ (ℤ/d)^rows` has `vA = 0`.
fn kernel_is_nonzero(d: u64, a: &Matrix) -> Result<bool, MatIdealError> {
    power_size(d, a.rows())?;
    let mut found = false;
    let mut first = true;
    for_each_vector(d, a.rows(), |v| {
        if first {
            first = false;
            return true;
        }
        if act_row(d, v, a).iter().all(|&x| x == 0) {
            found = true;
            return false;
        }
        true
    });
    Ok(found)
}

/// `v ↦ vA` maps `(ℤ/d)^rows` onto `(ℤ/d)^cols`.
fn image_is_everything(d: u64, a: &Matrix) -> Result<bool, MatIdealError> {
    power_size(d, a.rows())?;
    let size = power_size(d, a.cols())?;
    let mut seen = vec![false; size];
    let mut count = 0;
    for_each_vector(d, a.rows(), |v| {
        let idx = radix_index(d, &act_row(d, v, a));
        if !seen[idx] {
            seen[idx] = true;
            count += 1;
        }
        count < size
    });
    Ok(count == size)
}

fn rank_mod_p(p: u64, a: &Matrix) -> usize {
    let p = p as i64;
    let mut m: Vec<Vec<i64>> = (0..a.rows()).map(|i| a.row(i).iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let mut r = 0;
    for c in 0..a.cols() {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = (1..p).find(|k| (m[r][c] * k) % p == 1).expect("prime modulus");
        for e in m[r].iter_mut() {
            *e = *e * inv % p;
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
}

/// Default ceiling on factor candidates in [`is_non_full`].
pub const DEFAULT_FACTOR_CEILING: usize = 1 << 16;

/// Whether `a` (n×n) factors as an n×(n−1) matrix times an (n−1)×n matrix.
///
/// Decided by rank over ℤ and over prime fields; over other ℤ/m the left
/// factor is searched for, up to `ceiling` candidates.
pub fn is_non_full(a: &SquareMatrix, ceiling: usize) -> Result<bool, MatIdealError> {
    let n = a.size();
    match n {
        0 => return Ok(false),
        // the product of a 1×0 and a 0×1 matrix is [0]
        1 => return Ok(a.get(0, 0) == 0),
        _ => {}
    }
    match a.ring() {
        Ring::Integers => Ok(a.rational_rank() < n),
        Ring::Zmod(p) if a.ring().is_field() => Ok(rank_mod_p(p, a) < n),
        Ring::Zmod(m) => {
            let vals = entry_values(a.ring(), 0);
            let count = count_matrices(n, n - 1, vals.len()).unwrap_or(usize::MAX);
            if count > ceiling {
                return Err(MatIdealError::SearchSpaceTooLarge {
                    size: count as u128,
                    ceiling: ceiling as u128,
                });
            }
            let size = power_size(m, n)?;
            let targets: Vec<usize> = a
                .columns()
                .iter()
                .map(|c| radix_index(m, &c.iter().map(|&x| x as u64).collect::<Vec<_>>()))
                .collect();
            for b in all_matrices(a.ring(), n, n - 1, &vals) {
                let span = column_span(m, &b, size);
                if targets.iter().all(|&t| span[t]) {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Ring::Rationals => Err(MatIdealError::Invalid("matrices need Z or Z/m entries".into())),
    }
}

/// Membership bits of the subgroup of `(ℤ/m)^rows` generated by the columns.
fn column_span(m: u64, b: &Matrix, size: usize) -> Vec<bool> {
    let n = b.rows();
    let gens: Vec<Vec<u64>> = b.columns().iter().map(|c| c.iter().map(|&x| x as u64).collect()).collect();
    let mut seen = vec![false; size];
    seen[0] = true;
    let mut queue = vec![vec![0u64; n]];
    while let Some(v) = queue.pop() {
        for g in &gens {
            let w: Vec<u64> = v.iter().zip(g).map(|(x, y)| (x + y) % m).collect();
            let idx = radix_index(m, &w);
            if !seen[idx] {
                seen[idx] = true;
                queue.push(w);
            }
        }
    }
    seen
}

/// Square matrices of each size up to `max_n` with entries from a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixWindow {
    pub ring: Ring,
    pub max_n: usize,
    /// Entries lie in `[-bound, bound]` over ℤ; every residue is used over ℤ/m.
    pub bound: i64,
    /// Largest number of matrices of one size the audits will enumerate.
    pub ceiling: usize,
}

impl MatrixWindow {
    pub fn new(ring: Ring, max_n: usize, bound: i64) -> Self {
        MatrixWindow {
            ring,
            max_n,
            bound,
            ceiling: 1 << 20,
        }
    }

    pub fn values(&self) -> Vec<i64> {
        entry_values(self.ring, self.bound)
    }

    pub fn label(&self) -> String {
        match self.ring {
            Ring::Zmod(_) => format!("{} matrices of size <= {}, all entries", self.ring, self.max_n),
            _ => format!("{} matrices of size <= {}, entries in [{}, {}]", self.ring, self.max_n, -self.bound, self.bound),
        }
    }

    fn count(&self, rows: usize, cols: usize) -> Result<usize, MatIdealError> {
        match count_matrices(rows, cols, self.values().len()) {
            Some(c) if c <= self.ceiling => Ok(c),
            other => Err(MatIdealError::SearchSpaceTooLarge {
                size: other.map_or(u128::MAX, |c| c as u128),
                ceiling: self.ceiling as u128,
            }),
        }
    }

    /// Every `rows × cols` matrix in the window.
    pub fn rectangular(&self, rows: usize, cols: usize) -> Result<Vec<Matrix>, MatIdealError> {
        self.count(rows, cols)?;
        Ok(all_matrices(self.ring, rows, cols, &self.values()).collect())
    }

    /// Every n×n matrix in the window.
    pub fn square(&self, n: usize) -> Result<Vec<SquareMatrix>, MatIdealError> {
        Ok(self.rectangular(n, n)?.into_iter().map(SquareMatrix).collect())
    }

    /// Every vector of length `len` in the window.
    pub fn vectors(&self, len: usize) -> Result<Vec<Vec<i64>>, MatIdealError> {
        Ok(self.rectangular(1, len)?.into_iter().map(|m| m.row(0)).collect())
    }
}

/// Memoized membership.
struct Members<'a> {
    spec: &'a MatrixIdealSpec,
    cache: BTreeMap<SquareMatrix, bool>,
}

impl<'a> Members<'a> {
    fn new(spec: &'a MatrixIdealSpec) -> Self {
        Members {
            spec,
            cache: BTreeMap::new(),
        }
    }

    fn get(&mut self, a: &SquareMatrix) -> Result<bool, MatIdealError> {
        if let Some(&b) = self.cache.get(a) {
            return Ok(b);
        }
        let b = self.spec.contains(a)?;
        self.cache.insert(a.clone(), b);
        Ok(b)
    }
}

/// Size pairs `(n₁, n₂)` used for diagonal sums: both at least 1, at most
/// `max_n`, and `n₁ + n₂ ≤ max_n + 1`.
fn sum_sizes(max_n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n1 in 1..=max_n {
        for n2 in 1..=max_n {
            if n1 + n2 <= max_n + 1 {
                out.push((n1, n2));
            }
        }
    }
    out
}

fn nabla_check(members: &mut Members<'_>, win: &MatrixWindow, axis: Axis, name: &str) -> Result<Check, MatIdealError> {
    let mut check = Check::new(name);
    for n in 1..=win.max_n {
        let all = win.square(n)?;
        for r in 0..n {
            // members grouped by their lines off r
            let mut groups: BTreeMap<Matrix, Vec<SquareMatrix>> = BTreeMap::new();
            for a in &all {
                if members.get(a)? {
                    let key = a.with_line(axis, r, &vec![0; n]);
                    groups.entry(key).or_default().push(a.clone());
                }
            }
            for group in groups.values() {
                for (i, a) in group.iter().enumerate() {
                    for b in &group[i..] {
                        let s = det_sum(a, b, r, axis)?;
                        let ok = members.get(&s)?;
                        check.record(ok, || format!("A={a}, B={b}, {axis} {}: sum {s} is not a member", r + 1));
                    }
                }
            }
        }
    }
    Ok(check)
}

fn elementary_check(members: &mut Members<'_>, win: &MatrixWindow, left: bool, name: &str) -> Result<Check, MatIdealError> {
    let mut check = Check::new(name);
    for n in 2..=win.max_n {
        for a in win.square(n)? {
            if !members.get(&a)? {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    for s in [1, -1] {
                        let e = Matrix::elementary(win.ring, n, i, j, s);
                        let prod = SquareMatrix(if left { e.mul(&a) } else { a.mul(&e) });
                        let ok = members.get(&prod)?;
                        let sign = if s > 0 { '+' } else { '-' };
                        check.record(ok, || {
                            let side = if left { format!("(I{sign}e)A") } else { format!("A(I{sign}e)") };
                            format!("A={a}, e=e_{}{}: {side} = {prod} is not a member", i + 1, j + 1)
                        });
                    }
                }
            }
        }
    }
    Ok(check)
}

/// Checks each matrix-ideal axiom on every instance within the window:
/// non-full matrices, diagonal sums, column and row determinantal sums,
/// cancelling a unit summand, exclusion of `[1]`, primeness, and closure
/// under left and right multiplication by `I ± e_ij`.
pub fn axioms_audit(spec: &MatrixIdealSpec, win: &MatrixWindow) -> Result<AuditReport, MatIdealError> {
    let mut members = Members::new(spec);
    let mut report = AuditReport::new(format!("matrix ideal axioms for {spec}"), win.label());

    let mut nonfull = Check::new("non-full");
    for n in 1..=win.max_n {
        for a in win.square(n)? {
            if is_non_full(&a, DEFAULT_FACTOR_CEILING)? {
                let ok = members.get(&a)?;
                nonfull.record(ok, || format!("{a} is non-full but not a member"));
            }
        }
    }
    report.push(nonfull);

    let mut diag = Check::new("diagonal-sum");
    let mut prime = Check::new("prime");
    for (n1, n2) in sum_sizes(win.max_n) {
        let left = win.square(n1)?;
        let right = win.square(n2)?;
        for a in &left {
            let a_in = members.get(a)?;
            for b in &right {
                let s = diag_sum(a, b);
                let s_in = members.get(&s)?;
                if a_in {
                    diag.record(s_in, || format!("A={a} is a member but A+B with B={b} is not"));
                }
                if s_in {
                    let b_in = members.get(b)?;
                    prime.record(a_in || b_in, || format!("A={a}, B={b}: only the diagonal sum is a member"));
                }
            }
        }
    }
    report.push(diag);
    report.push(nabla_check(&mut members, win, Axis::Column, "column-sum")?);
    report.push(nabla_check(&mut members, win, Axis::Row, "row-sum")?);

    let mut cancel = Check::new("unit-cancellation");
    let one = SquareMatrix::scalar(win.ring, 1);
    for n in 1..=win.max_n {
        for a in win.square(n)? {
            if members.get(&diag_sum(&a, &one))? {
                let ok = members.get(&a)?;
                cancel.record(ok, || format!("A+[1] is a member but A={a} is not"));
            }
        }
    }
    report.push(cancel);

    let mut unit = Check::new("unit-excluded");
    let one_in = members.get(&one)?;
    unit.record(!one_in, || String::from("[1] is a member"));
    report.push(unit);
    report.push(prime);
    report.push(elementary_check(&mut members, win, true, "left-elementary")?);
    report.push(elementary_check(&mut members, win, false, "right-elementary")?);
    Ok(report)
}

/// Which of the two module-induced sets is studied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModuleMode {
    Injective,
    Surjective,
}

impl fmt::Display for ModuleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModuleMode::Injective => "injective",
            ModuleMode::Surjective => "surjective",
        })
    }
}

fn format_vector(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(","))
}

/// Orders candidate vectors simplest first: fewer nonzero entries, smaller
/// entries, nonnegative before negative.
fn simplicity(v: &[i64]) -> (usize, i64, usize, Vec<i64>) {
    (
        v.iter().filter(|&&x| x != 0).count(),
        v.iter().map(|x| x.abs()).sum(),
        v.iter().filter(|&&x| x < 0).count(),
        v.iter().map(|x| -x).collect(),
    )
}

fn sorted_by_simplicity(mut vs: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    vs.sort_by_key(|v| simplicity(v));
    vs
}

/// `{v ∈ Mⁿ : vX = 0}` for an n×k matrix X.
pub fn module_kernel(m: &FiniteModule, x: &Matrix) -> Result<Vec<Vec<u64>>, MatIdealError> {
    let n = x.rows();
    match m.power_size(n) {
        Some(s) if s <= MAX_POWER_SIZE => {}
        _ => {
            return Err(MatIdealError::SearchSpaceTooLarge {
                size: u128::from(m.order()).saturating_pow(n as u32),
                ceiling: MAX_POWER_SIZE as u128,
            })
        }
    }
    let cols = x.columns();
    Ok(m.elements(n)
        .filter(|v| cols.iter().all(|c| row_times_column(m, v, c).iter().all(|&e| e == 0)))
        .collect())
}

/// How the column `y` acts on the kernel K of some matrix: zero, one-to-one,
/// or nonzero but not one-to-one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelAction {
    Zero,
    OneToOne,
    NotOneToOne,
}

pub fn kernel_action(m: &FiniteModule, kernel: &[Vec<u64>], y: &[i64]) -> KernelAction {
    let images: Vec<Vec<u64>> = kernel.iter().map(|v| row_times_column(m, v, y)).collect();
    if images.iter().all(|v| v.iter().all(|&e| e == 0)) {
        return KernelAction::Zero;
    }
    let mut sorted = images.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() == images.len() {
        KernelAction::OneToOne
    } else {
        KernelAction::NotOneToOne
    }
}

/// Two columns `(y, y')`, as entries.
pub type WitnessPair = (Vec<i64>, Vec<i64>);

/// For the kernel K of `x` on Mⁿ, the simplest pair of columns from `ys`
/// that are both nonzero on K, the first one-to-one there and the second
/// not. `None` when the kernel condition holds for `x`.
pub fn kernel_condition_witness(
    m: &FiniteModule,
    x: &Matrix,
    ys: &[Vec<i64>],
) -> Result<Option<WitnessPair>, MatIdealError> {
    let kernel = module_kernel(m, x)?;
    let ys = sorted_by_simplicity(ys.to_vec());
    let injective = ys.iter().find(|y| kernel_action(m, &kernel, y) == KernelAction::OneToOne);
    let other = ys.iter().find(|y| kernel_action(m, &kernel, y) == KernelAction::NotOneToOne);
    Ok(match (injective, other) {
        (Some(a), Some(b)) => Some((a.clone(), b.clone())),
        _ => None,
    })
}

/// `{vX : v ∈ M^{rows}}` as membership bits over `M^{cols}`.
fn module_image(m: &FiniteModule, x: &Matrix) -> Result<Vec<bool>, MatIdealError> {
    let size = m.power_size(x.cols()).filter(|&s| s <= MAX_POWER_SIZE).ok_or(MatIdealError::SearchSpaceTooLarge {
        size: u128::from(m.order()).saturating_pow(x.cols() as u32),
        ceiling: MAX_POWER_SIZE as u128,
    })?;
    m.power_size(x.rows()).filter(|&s| s <= MAX_POWER_SIZE).ok_or(MatIdealError::SearchSpaceTooLarge {
        size: u128::from(m.order()).saturating_pow(x.rows() as u32),
        ceiling: MAX_POWER_SIZE as u128,
    })?;
    let cols = x.columns();
    let mut seen = vec![false; size];
    for v in m.elements(x.rows()) {
        let image: Vec<u64> = cols.iter().flat_map(|c| row_times_column(m, &v, c)).collect();
        seen[m.index_of(&image)] = true;
    }
    Ok(seen)
}

/// `{μz : μ ∈ M}` for a row `z` over R, as elements of Mⁿ.
fn row_map_image(m: &FiniteModule, z: &[i64]) -> Vec<Vec<u64>> {
    let k = m.rank();
    m.elements(1)
        .map(|mu| {
            let mut out = vec![0u64; z.len() * k];
            for (i, &zi) in z.iter().enumerate() {
                for j in 0..k {
                    let d = m.factors()[j];
                    out[i * k + j] = ((u128::from(mu[j]) * u128::from(zi.rem_euclid(d as i64) as u64)) % u128::from(d)) as u64;
                }
            }
            out
        })
        .collect()
}

/// How the row `z` relates to a subgroup I of Mⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageAction {
    Inside,
    Spanning,
    NotSpanning,
}

fn image_action(m: &FiniteModule, n: usize, image: &[bool], z: &[i64]) -> ImageAction {
    let zs = row_map_image(m, z);
    if zs.iter().all(|w| image[m.index_of(w)]) {
        return ImageAction::Inside;
    }
    let mut span = image.to_vec();
    for (idx, inside) in image.iter().enumerate() {
        if !inside {
            continue;
        }
        let base = m.element_at(idx, n);
        for w in &zs {
            span[m.index_of(&m.add(&base, w))] = true;
        }
    }
    if span.iter().all(|&b| b) {
        ImageAction::Spanning
    } else {
        ImageAction::NotSpanning
    }
}

/// Checks, over the window, the two conditions on M under which the
/// module-induced set is a prime matrix ideal.
///
/// Injective mode: no n×(n−1) matrix acts injectively `Mⁿ → M^{n−1}`; and on
/// each kernel K of such a matrix, columns nonzero on K are either all
/// one-to-one or none are. Surjective mode: no (n−1)×n matrix acts
/// surjectively `M^{n−1} → Mⁿ`; and for each image I of such a matrix, rows
/// whose image leaves I either all span Mⁿ together with I or none do.
pub fn module_conditions_audit(m: &FiniteModule, mode: ModuleMode, win: &MatrixWindow) -> Result<AuditReport, MatIdealError> {
    check_module(m, win.ring)?;
    let mut report = AuditReport::new(format!("{mode} conditions for {m}"), win.label());
    let (first, second) = match mode {
        ModuleMode::Injective => ("no-injection", "kernel-dichotomy"),
        ModuleMode::Surjective => ("no-surjection", "image-dichotomy"),
    };
    let mut c1 = Check::new(first);
    let mut c2 = Check::new(second);
    for n in 1..=win.max_n {
        let vectors = win.vectors(n)?;
        let (rows, cols) = match mode {
            ModuleMode::Injective => (n, n - 1),
            ModuleMode::Surjective => (n - 1, n),
        };
        for x in win.rectangular(rows, cols)? {
            match mode {
                ModuleMode::Injective => {
                    let kernel = module_kernel(m, &x)?;
                    c1.record(kernel.len() > 1, || format!("X={x} acts injectively"));
                    let mut injective = Vec::new();
                    let mut other = Vec::new();
                    for y in &vectors {
                        match kernel_action(m, &kernel, y) {
                            KernelAction::OneToOne => injective.push(y.clone()),
                            KernelAction::NotOneToOne => other.push(y.clone()),
                            KernelAction::Zero => {}
                        }
                    }
                    let ok = injective.is_empty() || other.is_empty();
                    c2.record(ok, || {
                        let a = &sorted_by_simplicity(injective.clone())[0];
                        let b = &sorted_by_simplicity(other.clone())[0];
                        format!(
                            "X={x}, |K|={}: y={} is one-to-one on K, y={} is nonzero on K but not one-to-one",
                            kernel.len(),
                            format_vector(a),
                            format_vector(b)
                        )
                    });
                }
                ModuleMode::Surjective => {
                    let image = module_image(m, &x)?;
                    let size = image.iter().filter(|&&b| b).count();
                    c1.record(size < image.len(), || format!("X={x} acts surjectively"));
                    let mut spanning = Vec::new();
                    let mut other = Vec::new();
                    for z in &vectors {
                        match image_action(m, n, &image, z) {
                            ImageAction::Spanning => spanning.push(z.clone()),
                            ImageAction::NotSpanning => other.push(z.clone()),
                            ImageAction::Inside => {}
                        }
                    }
                    let ok = spanning.is_empty() || other.is_empty();
                    c2.record(ok, || {
                        let a = &sorted_by_simplicity(spanning.clone())[0];
                        let b = &sorted_by_simplicity(other.clone())[0];
                        format!(
                            "X={x}, |I|={size}: z={} spans with I, z={} leaves I without spanning",
                            format_vector(a),
                            format_vector(b)
                        )
                    });
                }
            }
        }
    }
    let verdict = if c1.passed() && c2.passed() {
        "both conditions hold in the window, consistent with the induced set being a prime matrix ideal"
    } else if c1.passed() {
        "the second condition fails; it is only sufficient, so no conclusion about the induced set follows"
    } else {
        "the first condition fails, so the induced set misses some non-full matrix"
    };
    report.push(c1);
    report.push(c2);
    report.note(verdict);
    Ok(report)
}

/// Compares membership in the set induced by `m` (non-injective action) with
/// the determinant test `gcd(det A, |M|) ≠ 1` on every n×n window matrix.
pub fn det_agreement_audit(m: &FiniteModule, n: usize, win: &MatrixWindow) -> Result<AuditReport, MatIdealError> {
    let spec = MatrixIdealSpec::InducedNonInjective(m.clone());
    let order = i128::from(m.order());
    let mut report = AuditReport::new(format!("membership against determinants for {m}"), win.label());
    let mut check = Check::new("det-agreement");
    for a in win.square(n)? {
        let member = spec.contains(&a)?;
        let det = a.det();
        let oracle = det.gcd(&order) != 1;
        check.record(member == oracle, || format!("A={a}, det={det}: member={member}"));
    }
    report.push(check);
    Ok(report)
}

/// `E₂₁(1)·E₁₂(−1)·E₂₁(1)` in size n on rows i, j: swaps them and negates one.
pub fn signed_swap(ring: Ring, n: usize, i: usize, j: usize) -> Matrix {
    let e = Matrix::elementary(ring, n, j, i, 1);
    let f = Matrix::elementary(ring, n, i, j, -1);
    e.mul(&f).mul(&e)
}

fn block(top: &Matrix, bottom_left: &Matrix, bottom: &Matrix) -> Matrix {
    let ring = top.ring();
    let (n1, n2) = (top.rows(), bottom.rows());
    let mut out = Matrix::zero(ring, n1 + n2, n1 + n2);
    for i in 0..n1 {
        for j in 0..n1 {
            out.set(i, j, top.get(i, j));
        }
    }
    for i in 0..n2 {
        for j in 0..n1 {
            out.set(n1 + i, j, bottom_left.get(i, j));
        }
        for j in 0..n2 {
            out.set(n1 + i, n1 + j, bottom.get(i, j));
        }
    }
    out
}

/// Stacks rows under `x` and appends a last column.
fn bordered(x: &Matrix, rows: &[Vec<i64>], last: &[i64]) -> SquareMatrix {
    let mut m = x.clone();
    for r in rows {
        m = m.with_row(r);
    }
    let mut col = vec![0; x.rows()];
    col.extend_from_slice(last);
    SquareMatrix(m.with_column(&col))
}

/// Compares closure under row determinantal sums with closure under left
/// multiplication by `I ± e_ij` on the window, and replays the constructions
/// that derive the first from the second: the signed row swap, the
/// lower-left block equivalence, and each intermediate matrix of the
/// derivation for the last row.
pub fn malcolmson_audit(spec: &MatrixIdealSpec, win: &MatrixWindow) -> Result<AuditReport, MatIdealError> {
    let mut members = Members::new(spec);
    let mut report = AuditReport::new(format!("row sums against elementary rows for {spec}"), win.label());
    let rows = nabla_check(&mut members, win, Axis::Row, "row-sum")?;
    let left = elementary_check(&mut members, win, true, "left-elementary")?;
    let mut agree = Check::new("equivalence");
    agree.record(rows.passed() == left.passed(), || {
        format!("row sums {} but left elementary {}", rows.verdict(), left.verdict())
    });

    let mut swap = Check::new("signed-swap");
    let expect = Matrix::from_rows(Ring::Integers, &[vec![0, -1], vec![1, 0]]).expect("2x2");
    let two = signed_swap(Ring::Integers, 2, 0, 1);
    swap.record(two == expect, || format!("2x2 product is {two}"));
    for n in 2..=win.max_n.max(3) {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let s = signed_swap(Ring::Integers, n, i, j);
                let mut want = Matrix::identity(Ring::Integers, n);
                want.set(i, i, 0);
                want.set(j, j, 0);
                want.set(i, j, -1);
                want.set(j, i, 1);
                swap.record(s == want, || format!("n={n}, rows {},{}: {s}", i + 1, j + 1));
            }
        }
    }

    let mut low_left = Check::new("lower-left-block");
    for (n1, n2) in sum_sizes(win.max_n) {
        if n1 + n2 > win.max_n {
            continue;
        }
        for a in win.square(n1)? {
            for b in win.square(n2)? {
                let plain = members.get(&diag_sum(&a, &b))?;
                for c in win.rectangular(n2, n1)? {
                    let with_c = SquareMatrix(block(&a, &c, &b));
                    let ok = members.get(&with_c)? == plain;
                    low_left.record(ok, || format!("A={a}, B={b}, C={c}"));
                }
            }
        }
    }

    let mut replay = Check::new("derivation-replay");
    for n in 2..=win.max_n {
        let xs = win.rectangular(n - 1, n)?;
        let lines = win.vectors(n)?;
        if xs.len().saturating_mul(lines.len() * lines.len()) > win.ceiling {
            replay = replay.with_note(format!("skipped n={n}: window too large"));
            continue;
        }
        let ring = win.ring;
        let swap2 = Matrix::identity(ring, n - 1).diag_sum(&signed_swap(ring, 2, 0, 1));
        let add_last = Matrix::elementary(ring, n + 1, n - 1, n, 1);
        for x in &xs {
            let members_with_x: Vec<&Vec<i64>> = {
                let mut v = Vec::new();
                for a in &lines {
                    if members.get(&SquareMatrix(x.with_row(a)))? {
                        v.push(a);
                    }
                }
                v
            };
            for a in &members_with_x {
                for b in &members_with_x {
                    let neg_ab: Vec<i64> = a.iter().zip(b.iter()).map(|(p, q)| -p - q).collect();
                    let ab: Vec<i64> = a.iter().zip(b.iter()).map(|(p, q)| p + q).collect();
                    let zero = vec![0; n];
                    let s1 = bordered(x, &[a.to_vec(), zero.clone()], &[0, 1]);
                    let s2 = bordered(x, &[b.to_vec(), zero.clone()], &[0, 1]);
                    let s3 = bordered(x, &[a.to_vec(), b.to_vec()], &[0, 1]);
                    let s4 = bordered(x, &[b.to_vec(), neg_ab.clone()], &[0, 1]);
                    let s5 = SquareMatrix(add_last.mul(&s3));
                    let s6 = SquareMatrix(swap2.mul(&s4));
                    let s7 = det_sum(&s5, &s6, n, Axis::Column)?;
                    let s8 = bordered(x, &[ab.clone(), zero], &[0, 1]);
                    let s9 = SquareMatrix(x.with_row(&ab));
                    let steps = [&s1, &s2, &s3, &s4, &s5, &s6, &s7, &s8, &s9];
                    let mut failed = None;
                    for (k, s) in steps.iter().enumerate() {
                        if !members.get(s)? {
                            failed = Some((k + 1, (*s).clone()));
                            break;
                        }
                    }
                    replay.record(failed.is_none(), || {
                        let (k, s) = failed.clone().expect("failure");
                        format!("X={x}, a={}, b={}: step {k} gives {s}, not a member", format_vector(a), format_vector(b))
                    });
                }
            }
        }
    }
    for c in [rows, left, agree, swap, low_left, replay] {
        report.push(c);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: &[Vec<i64>]) -> SquareMatrix {
        SquareMatrix::from_rows(Ring::Integers, rows).unwrap()
    }

    fn cyclic(m: u64) -> FiniteModule {
        FiniteModule::new(Ring::Integers, vec![m]).unwrap()
    }

    #[test]
    fn diagonal_sums() {
        let one = z(&[vec![1]]);
        assert_eq!(diag_sum(&one, &one), SquareMatrix::identity(Ring::Integers, 2));
        assert_eq!(diag_sum(&z(&[vec![0]]), &one), z(&[vec![0, 0], vec![0, 1]]));
        let s = diag_sum(&z(&[vec![1, 2], vec![3, 4]]), &z(&[vec![5]]));
        assert_eq!(s, z(&[vec![1, 2, 0], vec![3, 4, 0], vec![0, 0, 5]]));
    }

    #[test]
    fn determinantal_sums() {
        let one = z(&[vec![1]]);
        assert_eq!(det_sum(&one, &one, 0, Axis::Row).unwrap(), z(&[vec![2]]));
        let a = z(&[vec![1, 0], vec![0, 1]]);
        let b = z(&[vec![1, 0], vec![0, -1]]);
        assert_eq!(det_sum(&a, &b, 1, Axis::Column).unwrap(), z(&[vec![1, 0], vec![0, 0]]));
        assert!(matches!(det_sum(&a, &b, 0, Axis::Column), Err(MatIdealError::NotSummable { .. })));
    }

    #[test]
    fn non_full_examples() {
        let f2 = Ring::Zmod(2);
        assert!(is_non_full(&SquareMatrix::scalar(Ring::Integers, 0), 10).unwrap());
        assert!(!is_non_full(&SquareMatrix::identity(f2, 2), 10).unwrap());
        assert!(is_non_full(&SquareMatrix::from_rows(f2, &[vec![1, 1], vec![1, 1]]).unwrap(), 10).unwrap());
        let z4 = Ring::Zmod(4);
        // 2·I over ℤ/4 is full: its columns need two generators
        assert!(!is_non_full(&SquareMatrix::from_rows(z4, &[vec![2, 0], vec![0, 2]]).unwrap(), 1000).unwrap());
        assert!(is_non_full(&SquareMatrix::from_rows(z4, &[vec![2, 2], vec![0, 0]]).unwrap(), 1000).unwrap());
        assert!(is_non_full(&z(&[vec![2, 4], vec![1, 2]]), 0).unwrap());
    }

    #[test]
    fn induced_membership() {
        let spec = MatrixIdealSpec::InducedNonInjective(cyclic(4));
        assert!(spec.contains(&z(&[vec![1, 1], vec![1, 1]])).unwrap());
        assert!(!spec.contains(&z(&[vec![1, 1], vec![0, 1]])).unwrap());
        assert!(!spec.contains(&SquareMatrix::identity(Ring::Integers, 0)).unwrap());
        let sur = MatrixIdealSpec::InducedNonSurjective(cyclic(4));
        assert!(sur.contains(&z(&[vec![2]])).unwrap());
        assert!(!sur.contains(&z(&[vec![3]])).unwrap());
    }

    #[test]
    fn induced_matches_det_mod_p() {
        let win = MatrixWindow::new(Ring::Integers, 2, 2);
        let r = det_agreement_audit(&cyclic(4), 2, &win).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.checks[0].instances, 625);
    }

    #[test]
    fn axioms_for_induced_and_det_specs() {
        let win = MatrixWindow::new(Ring::Integers, 2, 2);
        let r = axioms_audit(&MatrixIdealSpec::InducedNonInjective(cyclic(4)), &win).unwrap();
        assert!(r.passed(), "{r}");
        let r = axioms_audit(&MatrixIdealSpec::DetDivisibleBy(2), &win).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn explicit_zero_is_not_an_ideal() {
        let f2 = Ring::Zmod(2);
        let spec = MatrixIdealSpec::ExplicitList(vec![SquareMatrix::scalar(f2, 0)]);
        let r = axioms_audit(&spec, &MatrixWindow::new(f2, 1, 0)).unwrap();
        assert!(!r.passed());
        assert!(!r.check("diagonal-sum").unwrap().passed());
        assert!(r.check("non-full").unwrap().passed());
        assert!(r.check("row-sum").unwrap().passed());
    }

    #[test]
    fn kernel_dichotomy_fails_for_p_squared() {
        let win = MatrixWindow::new(Ring::Integers, 2, 2);
        let r = module_conditions_audit(&cyclic(4), ModuleMode::Injective, &win).unwrap();
        assert!(r.check("no-injection").unwrap().passed());
        let c = r.check("kernel-dichotomy").unwrap();
        assert!(!c.passed());
        assert!(c.witnesses[0].contains("y=(1) is one-to-one"), "{}", c.witnesses[0]);
        assert!(c.witnesses[0].contains("y=(2) is nonzero"), "{}", c.witnesses[0]);
        let x = Matrix::from_rows(Ring::Integers, &[vec![1], vec![0]]).unwrap();
        let w = kernel_condition_witness(&cyclic(4), &x, &win.vectors(2).unwrap()).unwrap();
        assert_eq!(w, Some((vec![0, 1], vec![0, 2])));
    }

    #[test]
    fn field_module_conditions_hold() {
        let win = MatrixWindow::new(Ring::Integers, 2, 2);
        let r = module_conditions_audit(&cyclic(2), ModuleMode::Injective, &win).unwrap();
        assert!(r.passed(), "{r}");
        let r = module_conditions_audit(&cyclic(4), ModuleMode::Surjective, &MatrixWindow::new(Ring::Integers, 1, 2)).unwrap();
        assert!(r.check("no-surjection").unwrap().passed());
    }

    #[test]
    fn induced_sets_coincide_for_finite_modules() {
        let win = MatrixWindow::new(Ring::Integers, 2, 2);
        for m in [cyclic(4), cyclic(6), FiniteModule::new(Ring::Integers, vec![2, 4]).unwrap()] {
            let inj = MatrixIdealSpec::InducedNonInjective(m.clone());
            let sur = MatrixIdealSpec::InducedNonSurjective(m);
            for n in 1..=2 {
                for a in win.square(n).unwrap() {
                    assert_eq!(ideal_member(&inj, &a).unwrap(), ideal_member(&sur, &a).unwrap(), "{a}");
                }
            }
        }
    }

    #[test]
    fn malcolmson_window() {
        let win = MatrixWindow::new(Ring::Integers, 2, 2);
        let r = malcolmson_audit(&MatrixIdealSpec::DetDivisibleBy(2), &win).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.check("derivation-replay").unwrap().instances > 0);
        let r = malcolmson_audit(&MatrixIdealSpec::InducedNonInjective(cyclic(9)), &win).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn signed_swap_two_by_two() {
        let s = signed_swap(Ring::Integers, 2, 0, 1);
        assert_eq!(s, Matrix::from_rows(Ring::Integers, &[vec![0, -1], vec![1, 0]]).unwrap());
    }
}
