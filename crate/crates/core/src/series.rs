//! Lazy series with well-ordered support.
//!
//! A [`SeriesStream`] lists the terms of an element of k((G)) (right side,
//! increasing in the right order) or of k((G*)) (left side, increasing in the
//! dual left order). Streams are memoized and cheap to clone; every clone
//! reads the same buffer. A stream ends, or stalls when a budget runs out.
//! A stalled stream still certifies that all of its missing terms lie above a
//! known bound, which lets downstream computations emit exact prefixes.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::{Ordering, Reverse};
use core::fmt;
use core::ops::Bound;

use crate::galg::AlgebraElement;
use crate::ogroup::{Group, GroupElement, OrderTag};
use crate::scalars::{Ring, Scalar};
use crate::wqo::{ClosureBudget, OpFamily, OrderedCloseError, OrderedClosure, Seed};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("stream emitted {next} after {previous}")]
    NotIncreasing {
        previous: Box<GroupElement>,
        next: Box<GroupElement>,
    },
    #[error("stream emitted a zero coefficient at {0}")]
    ZeroCoefficient(Box<GroupElement>),
    #[error("coefficient in {found}, expected {expected}")]
    RingMismatch { expected: Ring, found: Ring },
    #[error("cannot invert the action of zero")]
    ZeroDivisor,
    #[error("{0} is not a field")]
    NotAField(Ring),
    #[error("budget exceeded while {0}")]
    BudgetExceeded(&'static str),
    #[error("remainder has support at {0} outside rho(Y)")]
    Containment(Box<GroupElement>),
    #[error("index closure failed: {0}")]
    Closure(String),
    #[error("{0} needs a {1} stream")]
    WrongSide(&'static str, Side),
}

/// Which module a stream lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// k((G)) under the right order, with kG acting on the right.
    Right,
    /// k((G*)) under the dual left order, with kG acting on the left.
    Left,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum KeyRepr {
    Plain(GroupElement),
    Reversed(Reverse<GroupElement>),
}

/// A group element paired with its sort key for one side.
///
/// For the dual order the key is the reversed inverse, since
/// `a ≤* b ⟺ a⁻¹ ≥ b⁻¹`.
#[derive(Debug, Clone)]
pub struct Keyed {
    key: KeyRepr,
    elem: GroupElement,
}

impl Keyed {
    pub fn elem(&self) -> &GroupElement {
        &self.elem
    }

    pub fn into_elem(self) -> GroupElement {
        self.elem
    }
}

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Keyed {}

impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Keyed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl Side {
    pub fn tag(self) -> OrderTag {
        match self {
            Side::Right => OrderTag::RightOrder,
            Side::Left => OrderTag::DualLeftOrder,
        }
    }

    pub fn key(self, group: &Group, g: GroupElement) -> Keyed {
        let key = match self {
            Side::Right => KeyRepr::Plain(g.clone()),
            Side::Left => KeyRepr::Reversed(Reverse(group.inv(&g))),
        };
        Keyed { key, elem: g }
    }

    pub fn cmp(self, group: &Group, a: &GroupElement, b: &GroupElement) -> Ordering {
        match self {
            Side::Right => a.cmp(b),
            Side::Left => group.inv(b).cmp(&group.inv(a)),
        }
    }

    /// The action of a group element: `g·h` on the right side, `h·g` on the left.
    pub fn shift(self, group: &Group, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match self {
            Side::Right => group.mul(g, h),
            Side::Left => group.mul(h, g),
        }
    }

    /// Inverse of [`Side::shift`] in `g`.
    pub fn unshift(self, group: &Group, e: &GroupElement, h: &GroupElement) -> GroupElement {
        match self {
            Side::Right => group.mul(e, &group.inv(h)),
            Side::Left => group.mul(&group.inv(h), e),
        }
    }
}

/// The bijection `ρ_S(g) = min(g·S)` (on the left side, `min*(S·g)`).
#[derive(Debug, Clone)]
pub struct RhoMap {
    group: Group,
    side: Side,
    support: Vec<GroupElement>,
}

impl RhoMap {
    /// `support` must be nonempty; duplicates are dropped.
    pub fn new(group: &Group, side: Side, support: &[GroupElement]) -> Option<Self> {
        let mut s: Vec<GroupElement> = support.to_vec();
        s.sort();
        s.dedup();
        if s.is_empty() {
            return None;
        }
        Some(RhoMap {
            group: group.clone(),
            side,
            support: s,
        })
    }

    pub fn support(&self) -> &[GroupElement] {
        &self.support
    }

    /// `ρ(g)` and the position in the support of the minimizing element.
    pub fn rho_with_index(&self, g: &GroupElement) -> (GroupElement, usize) {
        let mut best: Option<(Keyed, usize)> = None;
        for (i, h) in self.support.iter().enumerate() {
            let k = self.side.key(&self.group, self.side.shift(&self.group, g, h));
            if best.as_ref().is_none_or(|(b, _)| k < *b) {
                best = Some((k, i));
            }
        }
        let (k, i) = best.expect("nonempty support");
        (k.elem, i)
    }

    pub fn rho(&self, g: &GroupElement) -> GroupElement {
        self.rho_with_index(g).0
    }

    /// `g·h₀⁻¹` where `h₀ ∈ S` maximizes it (mirrored on the left side).
    pub fn rho_inverse(&self, g: &GroupElement) -> GroupElement {
        self.support
            .iter()
            .map(|h| self.side.key(&self.group, self.side.unshift(&self.group, g, h)))
            .max()
            .expect("nonempty support")
            .elem
    }
}

/// `min(g·S)` under the right order.
pub fn rho(group: &Group, support: &[GroupElement], g: &GroupElement) -> Option<GroupElement> {
    Some(RhoMap::new(group, Side::Right, support)?.rho(g))
}

/// The unique `g'` with `rho(S, g') = g`.
pub fn rho_inverse(group: &Group, support: &[GroupElement], g: &GroupElement) -> Option<GroupElement> {
    Some(RhoMap::new(group, Side::Right, support)?.rho_inverse(g))
}

/// What a stream has at a position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Term(GroupElement, Scalar),
    /// There are no further terms.
    Ended,
    /// Further terms, if any, are strictly above the bound (when given).
    Stalled(Option<GroupElement>),
}

trait TermSource {
    fn pull(&mut self) -> Result<Step, SeriesError>;
}

struct State {
    buf: Vec<(Keyed, Scalar)>,
    end: Option<Result<Step, SeriesError>>,
    source: Box<dyn TermSource>,
}

/// A memoized stream of `(group element, nonzero coefficient)` pairs in
/// strictly increasing order for its side.
#[derive(Clone)]
pub struct SeriesStream {
    group: Rc<Group>,
    ring: Ring,
    side: Side,
    state: Rc<RefCell<State>>,
}

impl fmt::Debug for SeriesStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = self.state.borrow();
        f.debug_struct("SeriesStream")
            .field("side", &self.side)
            .field("ring", &self.ring)
            .field("buffered", &st.buf.len())
            .field("end", &st.end)
            .finish()
    }
}

/// A finite prefix of a stream and what follows it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prefix {
    pub terms: Vec<(GroupElement, Scalar)>,
    /// `None` when the prefix stopped at the requested length with more
    /// terms possibly available.
    pub tail: Option<Step>,
}

struct ListSource {
    terms: alloc::vec::IntoIter<(GroupElement, Scalar)>,
}

impl TermSource for ListSource {
    fn pull(&mut self) -> Result<Step, SeriesError> {
        Ok(self.terms.next().map_or(Step::Ended, |(g, c)| Step::Term(g, c)))
    }
}

struct FnSource<F> {
    f: F,
    index: usize,
    limit: usize,
    last: Option<GroupElement>,
}

impl<F: FnMut(usize) -> Option<(GroupElement, Scalar)>> TermSource for FnSource<F> {
    fn pull(&mut self) -> Result<Step, SeriesError> {
        if self.index == self.limit {
            return Ok(Step::Stalled(self.last.clone()));
        }
        match (self.f)(self.index) {
            Some((g, c)) => {
                self.index += 1;
                self.last = Some(g.clone());
                Ok(Step::Term(g, c))
            }
            None => Ok(Step::Ended),
        }
    }
}

struct LimitSource {
    inner: SeriesStream,
    pos: usize,
    limit: usize,
}

impl TermSource for LimitSource {
    fn pull(&mut self) -> Result<Step, SeriesError> {
        if self.pos == self.limit {
            let last = if self.pos == 0 {
                None
            } else {
                match self.inner.step(self.pos - 1)? {
                    Step::Term(g, _) => Some(g),
                    _ => None,
                }
            };
            return Ok(Step::Stalled(last));
        }
        let s = self.inner.step(self.pos)?;
        if matches!(s, Step::Term(..)) {
            self.pos += 1;
        }
        Ok(s)
    }
}

impl SeriesStream {
    fn with_source(group: Rc<Group>, ring: Ring, side: Side, source: Box<dyn TermSource>) -> Self {
        SeriesStream {
            group,
            ring,
            side,
            state: Rc::new(RefCell::new(State {
                buf: Vec::new(),
                end: None,
                source,
            })),
        }
    }

    pub fn zero(group: &Group, ring: Ring, side: Side) -> Self {
        SeriesStream::from_element(group, side, &AlgebraElement::zero(ring))
    }

    /// The finite series with the terms of `u`.
    pub fn from_element(group: &Group, side: Side, u: &AlgebraElement) -> Self {
        let mut terms: Vec<(GroupElement, Scalar)> =
            u.terms().map(|(g, c)| (g.clone(), c.clone())).collect();
        if side == Side::Left {
            terms.sort_by(|a, b| side.cmp(group, &a.0, &b.0));
        }
        SeriesStream::with_source(
            Rc::new(group.clone()),
            u.ring(),
            side,
            Box::new(ListSource {
                terms: terms.into_iter(),
            }),
        )
    }

    /// Terms `f(0), f(1), …` until `f` returns `None` (the series ends) or
    /// `limit` terms have been produced (the series stalls).
    pub fn from_fn(
        group: &Group,
        ring: Ring,
        side: Side,
        limit: usize,
        f: impl FnMut(usize) -> Option<(GroupElement, Scalar)> + 'static,
    ) -> Self {
        SeriesStream::with_source(
            Rc::new(group.clone()),
            ring,
            side,
            Box::new(FnSource {
                f,
                index: 0,
                limit,
                last: None,
            }),
        )
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// The `i`-th term, or how the stream finished before it.
    pub fn step(&self, i: usize) -> Result<Step, SeriesError> {
        let mut st = self.state.borrow_mut();
        while st.buf.len() <= i {
            if let Some(end) = &st.end {
                return end.clone();
            }
            let pulled = st.source.pull();
            match pulled {
                Ok(Step::Term(g, c)) => {
                    if let Err(e) = self.admit(&st.buf, &g, &c) {
                        st.end = Some(Err(e.clone()));
                        return Err(e);
                    }
                    let k = self.side.key(&self.group, g);
                    st.buf.push((k, c));
                }
                other => st.end = Some(other),
            }
        }
        let (k, c) = &st.buf[i];
        Ok(Step::Term(k.elem.clone(), c.clone()))
    }

    fn admit(&self, buf: &[(Keyed, Scalar)], g: &GroupElement, c: &Scalar) -> Result<(), SeriesError> {
        if c.ring() != self.ring {
            return Err(SeriesError::RingMismatch {
                expected: self.ring,
                found: c.ring(),
            });
        }
        if c.is_zero() {
            return Err(SeriesError::ZeroCoefficient(Box::new(g.clone())));
        }
        if let Some((last, _)) = buf.last() {
            if self.side.cmp(&self.group, g, &last.elem) != Ordering::Greater {
                return Err(SeriesError::NotIncreasing {
                    previous: Box::new(last.elem.clone()),
                    next: Box::new(g.clone()),
                });
            }
        }
        Ok(())
    }

    /// Up to `n` terms.
    pub fn prefix(&self, n: usize) -> Result<Prefix, SeriesError> {
        let mut terms = Vec::new();
        for i in 0..n {
            match self.step(i)? {
                Step::Term(g, c) => terms.push((g, c)),
                other => return Ok(Prefix { terms, tail: Some(other) }),
            }
        }
        Ok(Prefix { terms, tail: None })
    }

    /// Pulls until the stream ends or stalls, or `max_terms` terms exist.
    pub fn drain(&self, max_terms: usize) -> Result<Prefix, SeriesError> {
        let p = self.prefix(max_terms)?;
        if p.tail.is_some() {
            return Ok(p);
        }
        Err(SeriesError::BudgetExceeded("draining a stream"))
    }

    /// A strict lower bound for all terms not yet buffered, once the stream
    /// has stalled. `None` means nothing is known.
    pub fn stall_bound(&self) -> Option<GroupElement> {
        let st = self.state.borrow();
        let last = st.buf.last().map(|(k, _)| k.clone());
        match &st.end {
            Some(Ok(Step::Stalled(b))) => {
                let b = b.clone().map(|g| self.side.key(&self.group, g));
                match (b, last) {
                    (Some(b), Some(l)) => Some(core::cmp::max(b, l).elem),
                    (b, l) => b.or(l).map(Keyed::into_elem),
                }
            }
            _ => None,
        }
    }

    /// The coefficient of `g`, pulling at most `max_terms` terms.
    pub fn coefficient_at(&self, g: &GroupElement, max_terms: usize) -> Result<Scalar, SeriesError> {
        let key = self.side.key(&self.group, g.clone());
        let mut i = 0;
        loop {
            if i >= max_terms {
                return Err(SeriesError::BudgetExceeded("looking up a coefficient"));
            }
            match self.step(i)? {
                Step::Term(h, c) => {
                    let hk = self.side.key(&self.group, h);
                    match hk.cmp(&key) {
                        Ordering::Less => i += 1,
                        Ordering::Equal => return Ok(c),
                        Ordering::Greater => return Ok(self.ring.zero()),
                    }
                }
                Step::Ended => return Ok(self.ring.zero()),
                Step::Stalled(_) => {
                    return match self.stall_bound() {
                        Some(b) if self.side.key(&self.group, b.clone()) >= key => Ok(self.ring.zero()),
                        _ => Err(SeriesError::BudgetExceeded("looking up a coefficient")),
                    };
                }
            }
        }
    }

    /// Already-buffered terms strictly between `lo` and `hi` (keys of this side).
    fn buffered_between(&self, lo: Bound<&Keyed>, hi: Bound<&Keyed>) -> Vec<Keyed> {
        let st = self.state.borrow();
        let start = match lo {
            Bound::Unbounded => 0,
            Bound::Excluded(k) => st.buf.partition_point(|(b, _)| b <= k),
            Bound::Included(k) => st.buf.partition_point(|(b, _)| b < k),
        };
        let end = match hi {
            Bound::Unbounded => st.buf.len(),
            Bound::Excluded(k) => st.buf.partition_point(|(b, _)| b < k),
            Bound::Included(k) => st.buf.partition_point(|(b, _)| b <= k),
        };
        st.buf[start..end.max(start)].iter().map(|(k, _)| k.clone()).collect()
    }

    /// Coefficient of an element already covered by the buffer or the end state.
    fn known_coefficient(&self, key: &Keyed) -> Scalar {
        let st = self.state.borrow();
        match st.buf.binary_search_by(|(b, _)| b.cmp(key)) {
            Ok(i) => st.buf[i].1.clone(),
            Err(_) => self.ring.zero(),
        }
    }

    /// The stream cut off after `k` terms; it then stalls above its last term.
    pub fn limit(&self, k: usize) -> SeriesStream {
        SeriesStream::with_source(
            self.group.clone(),
            self.ring,
            self.side,
            Box::new(LimitSource {
                inner: self.clone(),
                pos: 0,
                limit: k,
            }),
        )
    }

    /// `a·x` for a right-side stream.
    pub fn act_right(&self, x: &AlgebraElement) -> Result<SeriesStream, SeriesError> {
        if self.side != Side::Right {
            return Err(SeriesError::WrongSide("act_right", Side::Right));
        }
        Ok(self.act(x))
    }

    /// `x·b` for a left-side stream.
    pub fn act_left(&self, x: &AlgebraElement) -> Result<SeriesStream, SeriesError> {
        if self.side != Side::Left {
            return Err(SeriesError::WrongSide("act_left", Side::Left));
        }
        Ok(self.act(x))
    }

    fn act(&self, x: &AlgebraElement) -> SeriesStream {
        let copies = x
            .terms()
            .map(|(g, c)| (self.clone(), g.clone(), c.clone()))
            .collect();
        self.merged(copies)
    }

    fn merged(&self, copies: Vec<(SeriesStream, GroupElement, Scalar)>) -> SeriesStream {
        let n = copies.len();
        SeriesStream::with_source(
            self.group.clone(),
            self.ring,
            self.side,
            Box::new(MergeSource {
                copies,
                pos: alloc::vec![0; n],
            }),
        )
    }

    /// `λ·self + μ·other`.
    pub fn combine(&self, lambda: &Scalar, other: &SeriesStream, mu: &Scalar) -> Result<SeriesStream, SeriesError> {
        if other.side != self.side {
            return Err(SeriesError::WrongSide("combine", self.side));
        }
        for r in [other.ring, lambda.ring(), mu.ring()] {
            if r != self.ring {
                return Err(SeriesError::RingMismatch {
                    expected: self.ring,
                    found: r,
                });
            }
        }
        let one = self.group.identity();
        let copies = [(self, lambda), (other, mu)]
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| (s.clone(), one.clone(), c.clone()))
            .collect();
        Ok(self.merged(copies))
    }

    pub fn sub(&self, other: &SeriesStream) -> Result<SeriesStream, SeriesError> {
        let one = self.ring.one();
        self.combine(&one, other, &-&one)
    }
}

/// Merges shifted, scaled copies of streams: `Σ c·(s·h)` on the right side,
/// `Σ c·(h·s)` on the left.
struct MergeSource {
    copies: Vec<(SeriesStream, GroupElement, Scalar)>,
    pos: Vec<usize>,
}

enum Head {
    Term(Keyed, Scalar),
    Ended,
    Stalled(Option<Keyed>),
}

impl MergeSource {
    fn head(&self, i: usize) -> Result<Head, SeriesError> {
        let (inner, h, xh) = &self.copies[i];
        let group = &inner.group;
        let side = inner.side;
        Ok(match inner.step(self.pos[i])? {
            Step::Term(g, c) => Head::Term(side.key(group, side.shift(group, &g, h)), &c * xh),
            Step::Ended => Head::Ended,
            Step::Stalled(_) => Head::Stalled(
                inner
                    .stall_bound()
                    .map(|b| side.key(group, side.shift(group, &b, h))),
            ),
        })
    }
}

impl TermSource for MergeSource {
    fn pull(&mut self) -> Result<Step, SeriesError> {
        loop {
            let heads: Vec<Head> = (0..self.copies.len()).map(|i| self.head(i)).collect::<Result<_, _>>()?;
            let mut least: Option<&Keyed> = None;
            let mut stall: Option<Option<&Keyed>> = None;
            for head in &heads {
                match head {
                    Head::Term(k, _) => {
                        if least.is_none_or(|l| k < l) {
                            least = Some(k);
                        }
                    }
                    Head::Ended => {}
                    Head::Stalled(b) => {
                        stall = Some(match (stall, b.as_ref()) {
                            (None, b) => b,
                            (Some(None), _) | (_, None) => None,
                            (Some(Some(prev)), Some(b)) => Some(core::cmp::min(prev, b)),
                        });
                    }
                }
            }
            let Some(e) = least.cloned() else {
                return Ok(match stall {
                    None => Step::Ended,
                    Some(b) => Step::Stalled(b.map(|k| k.elem.clone())),
                });
            };
            if let Some(b) = stall {
                if b.is_none_or(|b| e > *b) {
                    return Ok(Step::Stalled(b.map(|k| k.elem.clone())));
                }
            }
            let mut sum: Option<Scalar> = None;
            for (i, head) in heads.iter().enumerate() {
                if let Head::Term(k, c) = head {
                    if *k == e {
                        sum = Some(match sum {
                            None => c.clone(),
                            Some(s) => &s + c,
                        });
                        self.pos[i] += 1;
                    }
                }
            }
            let sum = sum.expect("least head contributes");
            if !sum.is_zero() {
                return Ok(Step::Term(e.elem, sum));
            }
        }
    }
}

/// Knobs for [`dubrovin_invert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InversionOptions {
    /// Bounds the index set Y.
    pub budget: ClosureBudget,
    /// Verify at every step that the remainder has no support between
    /// consecutive elements of ρ(Y).
    pub check_containment: bool,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            budget: ClosureBudget::new(5_000, 200_000),
            check_containment: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InversionStats {
    /// Elements of Y processed.
    pub index_elements: usize,
    /// Nonzero coefficients produced.
    pub terms: usize,
    /// Gaps between consecutive elements of ρ(Y) verified to carry no remainder.
    pub containment_checks: usize,
}

/// The stream `b` with `b·x = a`, plus live statistics.
#[derive(Debug, Clone)]
pub struct Inversion {
    pub series: SeriesStream,
    stats: Rc<RefCell<InversionStats>>,
}

impl Inversion {
    pub fn stats(&self) -> InversionStats {
        *self.stats.borrow()
    }
}

/// The ordered index set Y for inverting the action of an element with
/// support `rho.support()` on a series whose support starts with `seeds`.
///
/// Y is the least set containing `ρ⁻¹(supp a)` and closed under
/// `y ↦ ρ⁻¹(y·h)` for `h ∈ supp x` with `y·h ≠ ρ(y)`. Every such step is
/// strictly increasing, and Y·supp(x) ⊆ ρ(Y).
pub fn index_closure(
    rho: &RhoMap,
    seeds: impl FnMut() -> Seed<Keyed> + 'static,
    budget: ClosureBudget,
) -> OrderedClosure<'static, Keyed> {
    pruned_index_closure(rho, seeds, budget, |_| true)
}

/// [`index_closure`] that only expands elements accepted by `expand`.
fn pruned_index_closure(
    rho: &RhoMap,
    seeds: impl FnMut() -> Seed<Keyed> + 'static,
    budget: ClosureBudget,
    expand: impl Fn(&Keyed) -> bool + 'static,
) -> OrderedClosure<'static, Keyed> {
    let rho = rho.clone();
    let len = rho.support.len();
    let step = OpFamily::new(1, len, move |args: &[Keyed], i| {
        if !expand(&args[0]) {
            return None;
        }
        let y = args[0].elem();
        if rho.rho_with_index(y).1 == i {
            return None;
        }
        let yh = rho.side.shift(&rho.group, y, &rho.support[i]);
        Some(rho.side.key(&rho.group, rho.rho_inverse(&yh)))
    });
    OrderedClosure::new(alloc::vec![step], seeds, budget)
}

/// The unique `b` with `b·x = a` (right side) or `x·b = a` (left side).
pub fn dubrovin_invert(a: &SeriesStream, x: &AlgebraElement, options: InversionOptions) -> Result<Inversion, SeriesError> {
    if x.is_zero() {
        return Err(SeriesError::ZeroDivisor);
    }
    if x.ring() != a.ring {
        return Err(SeriesError::RingMismatch {
            expected: a.ring,
            found: x.ring(),
        });
    }
    if !a.ring.is_field() {
        return Err(SeriesError::NotAField(a.ring));
    }
    let group = a.group.clone();
    let side = a.side;
    let rho = RhoMap::new(&group, side, &x.support()).expect("x is nonzero");
    let x_coeffs: Vec<Scalar> = rho.support.iter().map(|h| x.coeff(h)).collect();

    let seed_error: Rc<RefCell<Option<SeriesError>>> = Rc::new(RefCell::new(None));
    let seeds = {
        let a = a.clone();
        let rho = rho.clone();
        let err = seed_error.clone();
        let mut pos = 0usize;
        move || match a.step(pos) {
            Ok(Step::Term(g, _)) => {
                pos += 1;
                Seed::Next(side.key(&rho.group, rho.rho_inverse(&g)))
            }
            Ok(Step::Ended) => Seed::Ended,
            Ok(Step::Stalled(_)) => Seed::Stalled(
                a.stall_bound()
                    .map(|b| side.key(&rho.group, rho.rho_inverse(&b))),
            ),
            Err(e) => {
                *err.borrow_mut() = Some(e);
                Seed::Stalled(None)
            }
        }
    };
    let beta: Rc<RefCell<BTreeMap<Keyed, Scalar>>> = Rc::new(RefCell::new(BTreeMap::new()));
    let nonzero = beta.clone();
    let y = pruned_index_closure(&rho, seeds, options.budget, move |k| nonzero.borrow().contains_key(k));
    let stats = Rc::new(RefCell::new(InversionStats::default()));
    let source = DubrovinSource {
        group: group.clone(),
        side,
        rho,
        x_coeffs,
        a: a.clone(),
        y,
        seed_error,
        beta,
        touched: BTreeSet::new(),
        prev_target: None,
        check: options.check_containment,
        stats: stats.clone(),
    };
    Ok(Inversion {
        series: SeriesStream::with_source(group, a.ring, side, Box::new(source)),
        stats,
    })
}

struct DubrovinSource {
    group: Rc<Group>,
    side: Side,
    rho: RhoMap,
    x_coeffs: Vec<Scalar>,
    a: SeriesStream,
    y: OrderedClosure<'static, Keyed>,
    seed_error: Rc<RefCell<Option<SeriesError>>>,
    /// Nonzero coefficients found so far; only these elements spawn successors.
    beta: Rc<RefCell<BTreeMap<Keyed, Scalar>>>,
    /// Every `g·h` with `β_g ≠ 0` and `h ∈ supp x`.
    touched: BTreeSet<Keyed>,
    prev_target: Option<Keyed>,
    check: bool,
    stats: Rc<RefCell<InversionStats>>,
}

impl DubrovinSource {
    fn key(&self, g: GroupElement) -> Keyed {
        self.side.key(&self.group, g)
    }

    /// Coefficient of `e` in `a − (Σ_{processed} β_g g)·x`.
    fn remainder(&self, e: &Keyed) -> Scalar {
        let mut r = self.a.known_coefficient(e);
        let beta = self.beta.borrow();
        for (h, xh) in self.rho.support.iter().zip(&self.x_coeffs) {
            let g = self.key(self.side.unshift(&self.group, &e.elem, h));
            if let Some(b) = beta.get(&g) {
                r = &r - &(b * xh);
            }
        }
        r
    }

    fn check_between(&self, lo: Bound<&Keyed>, hi: Bound<&Keyed>) -> Result<(), SeriesError> {
        let mut candidates: BTreeSet<Keyed> = self.touched.range((lo, hi)).cloned().collect();
        candidates.extend(self.a.buffered_between(lo, hi));
        self.stats.borrow_mut().containment_checks += 1;
        for e in candidates {
            if !self.remainder(&e).is_zero() {
                return Err(SeriesError::Containment(Box::new(e.elem)));
            }
        }
        Ok(())
    }

    fn take_seed_error(&self) -> Result<(), SeriesError> {
        match self.seed_error.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

impl TermSource for DubrovinSource {
    fn pull(&mut self) -> Result<Step, SeriesError> {
        loop {
            let next = self.y.next_element();
            self.take_seed_error()?;
            match next {
                Ok(Some(gk)) => {
                    self.stats.borrow_mut().index_elements += 1;
                    let g = gk.elem.clone();
                    let (target, at) = self.rho.rho_with_index(&g);
                    let target = self.key(target);
                    if self.check {
                        let lo = self.prev_target.as_ref().map_or(Bound::Unbounded, Bound::Excluded);
                        self.check_between(lo, Bound::Excluded(&target))?;
                    }
                    let gamma = self.remainder(&target);
                    let delta = &self.x_coeffs[at];
                    let beta = gamma.div(delta).expect("field coefficients, nonzero delta");
                    self.prev_target = Some(target);
                    if beta.is_zero() {
                        continue;
                    }
                    for h in &self.rho.support {
                        let k = self.key(self.side.shift(&self.group, &g, h));
                        self.touched.insert(k);
                    }
                    self.beta.borrow_mut().insert(gk, beta.clone());
                    self.stats.borrow_mut().terms += 1;
                    return Ok(Step::Term(g, beta));
                }
                Ok(None) => {
                    if self.check {
                        let lo = self.prev_target.as_ref().map_or(Bound::Unbounded, Bound::Excluded);
                        self.check_between(lo, Bound::Unbounded)?;
                    }
                    return Ok(Step::Ended);
                }
                Err(OrderedCloseError::Truncated { lower_bound, .. }) => {
                    return Ok(Step::Stalled(lower_bound.map(Keyed::into_elem)));
                }
                Err(e) => return Err(SeriesError::Closure(format!("{e}"))),
            }
        }
    }
}

/// Result of multiplying a truncated inverse back by `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrip {
    /// Elements compared: every support point of `a` or of the product up to the bound.
    pub compared: usize,
    /// Elements where the product and `a` differ.
    pub mismatches: Vec<GroupElement>,
    /// Beyond this element the truncated product says nothing; `None` when
    /// the inverse was finite and the product was compared in full.
    pub bound: Option<GroupElement>,
    pub stats: InversionStats,
}

impl RoundTrip {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Inverts the action of `x` on `a`, keeps the first `terms` terms of the
/// result, multiplies back, and compares with `a` wherever the truncation
/// determines the product.
pub fn round_trip(
    group: &Group,
    side: Side,
    a: &AlgebraElement,
    x: &AlgebraElement,
    terms: usize,
    options: InversionOptions,
) -> Result<RoundTrip, SeriesError> {
    let sa = SeriesStream::from_element(group, side, a);
    let inv = dubrovin_invert(&sa, x, options)?;
    let truncated = inv.series.limit(terms);
    let back = match side {
        Side::Right => truncated.act_right(x)?,
        Side::Left => truncated.act_left(x)?,
    };
    let prefix = back.drain(terms.saturating_mul(x.len()) + 1)?;
    let bound = match prefix.tail {
        Some(Step::Ended) => None,
        Some(Step::Stalled(b)) => match b {
            Some(b) => Some(b),
            // nothing determined yet
            None => {
                return Ok(RoundTrip {
                    compared: 0,
                    mismatches: Vec::new(),
                    bound: Some(group.identity()),
                    stats: inv.stats(),
                })
            }
        },
        _ => return Err(SeriesError::BudgetExceeded("round trip")),
    };
    let within = |g: &GroupElement| bound.as_ref().is_none_or(|b| side.cmp(group, g, b) != Ordering::Greater);
    let mut expected: BTreeMap<Keyed, Scalar> = BTreeMap::new();
    for (g, c) in a.terms().filter(|(g, _)| within(g)) {
        expected.insert(side.key(group, g.clone()), c.clone());
    }
    let mut got: BTreeMap<Keyed, Scalar> = BTreeMap::new();
    for (g, c) in prefix.terms {
        got.insert(side.key(group, g), c);
    }
    let mut keys: Vec<&Keyed> = expected.keys().chain(got.keys()).collect();
    keys.sort();
    keys.dedup();
    let mismatches = keys
        .iter()
        .filter(|k| expected.get(**k) != got.get(**k))
        .map(|k| k.elem().clone())
        .collect();
    Ok(RoundTrip {
        compared: keys.len(),
        mismatches,
        bound,
        stats: inv.stats(),
    })
}

/// `⟨a, b⟩ = Σ_g α_g β_{g⁻¹}` for `a` in k((G)) and `b` in k((G*)).
///
/// Terms are pulled from both sides until the finitely many contributing
/// elements are provably all seen: `a` has passed the largest inverse of a
/// term of `b`, and the inverses of `b`'s terms have dropped below the least
/// term of `a` (or the respective stream has finished).
pub fn pair(a: &SeriesStream, b: &SeriesStream, max_pulls: usize) -> Result<Scalar, SeriesError> {
    if a.side != Side::Right {
        return Err(SeriesError::WrongSide("pair (first argument)", Side::Right));
    }
    if b.side != Side::Left {
        return Err(SeriesError::WrongSide("pair (second argument)", Side::Left));
    }
    let group = a.group.clone();
    let mut seen_a: Vec<(GroupElement, Scalar)> = Vec::new();
    // inverses of b's support, descending
    let mut seen_k: Vec<(GroupElement, Scalar)> = Vec::new();
    let mut end_a: Option<Step> = None;
    let mut end_b: Option<Step> = None;
    let mut pulls = 0usize;

    loop {
        // every contributing element has been seen on the a side
        let c1 = match &end_a {
            Some(Step::Ended) => true,
            Some(_) => match (a.stall_bound(), seen_k.first(), &end_b) {
                (_, None, Some(Step::Ended)) => true,
                (Some(l), Some((k1, _)), _) => l >= *k1,
                _ => false,
            },
            None => match (seen_a.last(), seen_k.first(), &end_b) {
                (_, None, Some(Step::Ended)) => true,
                (Some((al, _)), Some((k1, _)), _) => al >= k1,
                _ => false,
            },
        };
        // … and on the b side
        let c2 = match &end_b {
            Some(Step::Ended) => true,
            Some(_) => match (b.stall_bound(), seen_a.first(), &end_a) {
                (_, None, Some(Step::Ended)) => true,
                (Some(l), Some((a1, _)), _) => group.inv(&l) <= *a1,
                _ => false,
            },
            None => match (seen_k.last(), seen_a.first(), &end_a) {
                (_, None, Some(Step::Ended)) => true,
                (Some((kl, _)), Some((a1, _)), _) => kl <= a1,
                _ => false,
            },
        };
        if c1 && c2 {
            break;
        }
        let can_a = end_a.is_none();
        let can_b = end_b.is_none();
        let want_a = (!c1 || (!c2 && seen_a.is_empty())) && can_a;
        let want_b = (!c2 || (!c1 && seen_k.is_empty())) && can_b;
        if !want_a && !want_b {
            return Err(SeriesError::BudgetExceeded("certifying a finite pairing"));
        }
        if want_a {
            pulls += 1;
            match a.step(seen_a.len())? {
                Step::Term(g, c) => seen_a.push((g, c)),
                other => end_a = Some(other),
            }
        }
        if want_b {
            pulls += 1;
            match b.step(seen_k.len())? {
                Step::Term(g, c) => seen_k.push((group.inv(&g), c)),
                other => end_b = Some(other),
            }
        }
        if pulls > max_pulls {
            return Err(SeriesError::BudgetExceeded("certifying a finite pairing"));
        }
    }
    let ks: BTreeMap<&GroupElement, &Scalar> = seen_k.iter().map(|(k, c)| (k, c)).collect();
    let mut total = a.ring.zero();
    for (g, alpha) in &seen_a {
        if let Some(beta) = ks.get(g) {
            total = &total + &(alpha * *beta);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Ring;

    fn kb() -> Group {
        Group::klein_bottle()
    }

    fn q() -> Ring {
        Ring::Rationals
    }

    fn elem(g: &Group, terms: &[(i64, i64, i64)]) -> AlgebraElement {
        AlgebraElement::from_terms(q(), terms.iter().map(|&(c, i, j)| (g.ts(i, j), q().from_i64(c))))
    }

    fn geometric(g: &Group, limit: usize) -> SeriesStream {
        let g2 = g.clone();
        SeriesStream::from_fn(g, q(), Side::Right, limit, move |i| Some((g2.ts(i as i64, 0), q().from_i64(1))))
    }

    #[test]
    fn rho_examples() {
        let g = kb();
        let s = [g.identity(), g.ts(1, 0)];
        assert_eq!(rho(&g, &s, &g.identity()).unwrap(), g.identity());
        assert_eq!(rho(&g, &s, &g.ts(0, 1)).unwrap(), g.ts(-1, 1));
        assert_eq!(rho(&g, &s, &g.ts(1, 1)).unwrap(), g.ts(0, 1));
        assert_eq!(rho_inverse(&g, &s, &g.identity()).unwrap(), g.identity());
        let back = rho_inverse(&g, &s, &g.ts(0, 1)).unwrap();
        assert_eq!(back, g.ts(1, 1));
        assert_eq!(rho(&g, &s, &back).unwrap(), g.ts(0, 1));
        assert!(rho(&g, &[], &g.identity()).is_none());
    }

    #[test]
    fn coefficient_lookup() {
        let g = kb();
        let a = SeriesStream::from_element(&g, Side::Right, &elem(&g, &[(1, 0, 0), (-1, 1, 0)]));
        assert_eq!(a.coefficient_at(&g.ts(1, 0), 10).unwrap(), q().from_i64(-1));
        assert_eq!(a.coefficient_at(&g.ts(0, 1), 10).unwrap(), q().zero());
        let geo = geometric(&g, 100);
        assert_eq!(geo.coefficient_at(&g.ts(3, 0), 10).unwrap(), q().one());
        assert!(matches!(
            geo.coefficient_at(&g.ts(0, 1), 10),
            Err(SeriesError::BudgetExceeded(_))
        ));
        // the stall bound t^99 certifies that t^50.5 is absent
        assert_eq!(
            geo.coefficient_at(&g.element(crate::scalars::QuadImaginary::rational(crate::scalars::qq(101, 2), 1), 0).unwrap(), 1000).unwrap(),
            q().zero()
        );
    }

    #[test]
    fn action_examples() {
        let g = kb();
        let x = elem(&g, &[(1, 0, 0), (-1, 1, 0)]);
        let one = SeriesStream::from_element(&g, Side::Right, &elem(&g, &[(1, 0, 0)]));
        assert_eq!(one.act_right(&x).unwrap().drain(10).unwrap().terms, x.terms().map(|(a, b)| (a.clone(), b.clone())).collect::<Vec<_>>());

        let geo = geometric(&g, 40);
        let p = geo.act_right(&x).unwrap().drain(100).unwrap();
        assert_eq!(p.terms, vec![(g.identity(), q().one())]);
        assert_eq!(p.tail, Some(Step::Stalled(Some(g.ts(39, 0)))));

        let g2 = g.clone();
        let minus = SeriesStream::from_fn(&g, q(), Side::Right, 40, move |i| Some((g2.ts(i as i64 + 1, 1), q().from_i64(-1))));
        let p = minus.act_right(&x).unwrap().drain(100).unwrap();
        assert_eq!(p.terms, vec![(g.ts(0, 1), q().one())]);
    }

    #[test]
    fn inversion_closed_forms() {
        let g = kb();
        let x = elem(&g, &[(1, 0, 0), (-1, 1, 0)]);
        let opts = InversionOptions {
            check_containment: true,
            ..InversionOptions::default()
        };
        let a = SeriesStream::from_element(&g, Side::Right, &elem(&g, &[(1, 0, 0)]));
        let b = dubrovin_invert(&a, &x, opts).unwrap();
        let p = b.series.prefix(20).unwrap();
        for (i, (e, c)) in p.terms.iter().enumerate() {
            assert_eq!(e, &g.ts(i as i64, 0));
            assert!(c.is_one());
        }
        assert_eq!(p.terms.len(), 20);

        let a = SeriesStream::from_element(&g, Side::Right, &elem(&g, &[(1, 0, 1)]));
        let b = dubrovin_invert(&a, &x, opts).unwrap();
        let p = b.series.prefix(20).unwrap();
        for (i, (e, c)) in p.terms.iter().enumerate() {
            assert_eq!(e, &g.ts(i as i64 + 1, 1));
            assert_eq!(c, &q().from_i64(-1));
        }
        assert!(b.stats().containment_checks > 0);

        let zero = SeriesStream::zero(&g, q(), Side::Right);
        let b = dubrovin_invert(&zero, &x, opts).unwrap();
        assert_eq!(b.series.prefix(5).unwrap().tail, Some(Step::Ended));
        assert!(matches!(
            dubrovin_invert(&zero, &AlgebraElement::zero(q()), opts),
            Err(SeriesError::ZeroDivisor)
        ));
    }

    #[test]
    fn index_set_for_s() {
        let g = kb();
        let r = RhoMap::new(&g, Side::Right, &[g.identity(), g.ts(1, 0)]).unwrap();
        let mut seeds = vec![Side::Right.key(&g, r.rho_inverse(&g.ts(0, 1)))].into_iter();
        let mut y = index_closure(&r, move || seeds.next().map_or(Seed::Ended, Seed::Next), ClosureBudget::elements(6));
        let (out, _) = y.collect_all();
        let elems: Vec<_> = out.into_iter().map(Keyed::into_elem).collect();
        assert_eq!(elems, (1..=6).map(|i| g.ts(i, 1)).collect::<Vec<_>>());
    }

    #[test]
    fn finite_inverse_round_trip() {
        // x = 1 + y in the abelian group has the finite inverse image of 1 + 2y + y²
        let g = Group::abelian();
        let r = q();
        let x = AlgebraElement::from_terms(r, [(g.identity(), r.one()), (g.y_pow(1), r.one())]);
        let a = AlgebraElement::from_terms(r, [(g.identity(), r.one()), (g.y_pow(1), r.from_i64(2)), (g.y_pow(2), r.one())]);
        let inv = dubrovin_invert(&SeriesStream::from_element(&g, Side::Right, &a), &x, InversionOptions { check_containment: true, ..Default::default() }).unwrap();
        let p = inv.series.prefix(10).unwrap();
        assert_eq!(p.terms, vec![(g.identity(), r.one()), (g.y_pow(1), r.one())]);
        assert_eq!(p.tail, Some(Step::Ended));
    }

    #[test]
    fn left_side_inversion() {
        let g = kb();
        let x = elem(&g, &[(1, 0, 0), (-1, 1, 0)]);
        let a = SeriesStream::from_element(&g, Side::Left, &elem(&g, &[(1, 0, 1), (2, 0, 0)]));
        let b = dubrovin_invert(&a, &x, InversionOptions { check_containment: true, ..Default::default() }).unwrap();
        let back = b.series.limit(30).act_left(&x).unwrap().drain(1000).unwrap();
        let bound = back.tail.clone();
        let expect = a.drain(10).unwrap().terms;
        let Some(Step::Stalled(Some(l))) = bound else { panic!("expected a stall") };
        let within: Vec<_> = expect.into_iter().filter(|(e, _)| Side::Left.cmp(&g, e, &l) != Ordering::Greater).collect();
        assert_eq!(back.terms, within);
        assert!(!within.is_empty());
    }

    #[test]
    fn pairing_basics() {
        let g = kb();
        let g0 = g.ts(2, -1);
        let a = SeriesStream::from_element(&g, Side::Right, &AlgebraElement::group_element(q(), g0.clone()));
        let b = SeriesStream::from_element(&g, Side::Left, &AlgebraElement::group_element(q(), g.inv(&g0)));
        assert!(pair(&a, &b, 100).unwrap().is_one());
        let a = SeriesStream::from_element(&g, Side::Right, &elem(&g, &[(1, 0, 0), (1, 1, 0)]));
        let b = SeriesStream::from_element(&g, Side::Left, &elem(&g, &[(2, 0, 0)]));
        assert_eq!(pair(&a, &b, 100).unwrap(), q().from_i64(2));
        // infinite a against finite b
        let geo = geometric(&g, 1000);
        let b = SeriesStream::from_element(&g, Side::Left, &elem(&g, &[(3, -5, 0), (7, 0, 1)]));
        assert_eq!(pair(&geo, &b, 100).unwrap(), q().from_i64(3));
    }

    #[test]
    fn pairing_identity_with_action() {
        let g = kb();
        let a = elem(&g, &[(1, 0, 0), (2, 1, 1), (-1, -2, 1)]);
        let b = elem(&g, &[(1, 0, 0), (5, 1, -1), (3, 0, -1), (-2, -1, 0)]);
        let r = elem(&g, &[(1, 1, 0), (-1, 2, -1), (4, 0, 0)]);
        let sa = SeriesStream::from_element(&g, Side::Right, &a);
        let sb = SeriesStream::from_element(&g, Side::Left, &b);
        let lhs = pair(&sa.act_right(&r).unwrap(), &sb, 1000).unwrap();
        let rhs = pair(&sa, &sb.act_left(&r).unwrap(), 1000).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn stream_sums() {
        let g = kb();
        let geo = geometric(&g, 30);
        let shifted = geo.act_right(&elem(&g, &[(1, 1, 0)])).unwrap();
        let p = geo.sub(&shifted).unwrap().drain(100).unwrap();
        assert_eq!(p.terms, vec![(g.identity(), q().one())]);
        let twice = geo.combine(&q().one(), &geo, &q().one()).unwrap().prefix(3).unwrap();
        assert!(twice.terms.iter().all(|(_, c)| *c == q().from_i64(2)));
    }

    #[test]
    fn stream_rejects_bad_order() {
        let g = kb();
        let g2 = g.clone();
        let bad = SeriesStream::from_fn(&g, q(), Side::Right, 10, move |i| Some((g2.ts(-(i as i64), 0), q().one())));
        assert!(matches!(bad.prefix(3), Err(SeriesError::NotIncreasing { .. })));
    }
}
