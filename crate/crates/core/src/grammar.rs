//! Plain-text descriptors for rings, modules, groups and their elements.
//!
//! ```text
//! ring     Q | Z | Zmod(m) | Fp(p)
//! module   Q | Zmod(d) | Zmod(d)^k | Zmod(d1) x Zmod(d2) ...
//! group    -1 | 1 | p/q | zeta3 | zeta6 | gauss(a,b) | eisenstein(a,b)
//! element  y^(a+b*w)x^n | t^i*s^j | 1        (factors multiply left to right)
//! algebra  3/2*y^(1)x^0 + -1*y^(0)x^1 | 1 - t | s
//! ```
//!
//! Every descriptor may carry a `key=` prefix (`ring=Zmod(4)`, `c=zeta3`).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::galg::AlgebraElement;
use crate::ogroup::{Group, GroupElement};
use crate::scalars::{FiniteModule, ModulePresentation, QuadImaginary, Ring, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {kind} `{input}`: {reason}")]
pub struct GrammarError {
    pub kind: &'static str,
    pub input: String,
    pub reason: String,
}

fn err(kind: &'static str, input: &str, reason: impl Into<String>) -> GrammarError {
    GrammarError {
        kind,
        input: input.into(),
        reason: reason.into(),
    }
}

fn strip_key<'a>(s: &'a str, keys: &[&str]) -> &'a str {
    let s = s.trim();
    for k in keys {
        if let Some(rest) = s.strip_prefix(k).and_then(|r| r.trim_start().strip_prefix('=')) {
            return rest.trim();
        }
    }
    s
}

fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    let rest = s.strip_prefix(name)?.trim_start();
    rest.strip_prefix('(')?.strip_suffix(')').map(str::trim)
}

fn despace(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

pub fn parse_rational(s: &str) -> Result<BigRational, GrammarError> {
    let t = despace(s);
    let t = t.strip_prefix('+').unwrap_or(&t);
    let r = match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n).map_err(|_| err("rational", s, "bad numerator"))?;
            let d = BigInt::from_str(d).map_err(|_| err("rational", s, "bad denominator"))?;
            if d.is_zero() {
                return Err(err("rational", s, "zero denominator"));
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(BigInt::from_str(t).map_err(|_| err("rational", s, "not a number"))?),
    };
    Ok(r)
}

fn parse_u64(kind: &'static str, s: &str) -> Result<u64, GrammarError> {
    s.trim().parse().map_err(|_| err(kind, s, "expected a positive integer"))
}

/// `Q`, `Z`, `Zmod(m)` or `Fp(p)`.
pub fn parse_ring(s: &str) -> Result<Ring, GrammarError> {
    let t = strip_key(s, &["ring", "field"]);
    match t {
        "Q" => return Ok(Ring::Rationals),
        "Z" => return Ok(Ring::Integers),
        _ => {}
    }
    if let Some(m) = call(t, "Zmod") {
        return Ring::zmod(parse_u64("ring", m)?).map_err(|e| err("ring", s, e.to_string()));
    }
    if let Some(p) = call(t, "Fp") {
        return Ring::prime_field(parse_u64("ring", p)?).map_err(|e| err("ring", s, e.to_string()));
    }
    Err(err("ring", s, "expected Q, Z, Zmod(m) or Fp(p)"))
}

/// A module over `ring`: `Q`, or a product of cyclic factors.
pub fn parse_module(ring: Ring, s: &str) -> Result<ModulePresentation, GrammarError> {
    let t = strip_key(s, &["module"]);
    if t == "Q" {
        return Ok(ModulePresentation::Rationals);
    }
    let mut factors = Vec::new();
    for part in t.split(['x', '*']) {
        let part = part.trim();
        let (base, power) = match part.rsplit_once('^') {
            Some((b, k)) => (b.trim(), parse_u64("module", k)? as usize),
            None => (part, 1),
        };
        let d = call(base, "Zmod")
            .or_else(|| call(base, "Fp"))
            .ok_or_else(|| err("module", s, "expected Q or factors like Zmod(d)^k"))?;
        let d = parse_u64("module", d)?;
        factors.extend(core::iter::repeat_n(d, power));
    }
    FiniteModule::new(ring, factors)
        .map(ModulePresentation::Finite)
        .map_err(|e| err("module", s, e.to_string()))
}

/// `a+b*w` over ℚ(√−d); `w` (or `i` when d = 1) is the basis symbol.
pub fn parse_quad(s: &str, d: u8) -> Result<QuadImaginary, GrammarError> {
    let t = despace(s);
    let t = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(&t)
        .to_string();
    if t.is_empty() {
        return Err(err("exponent", s, "empty"));
    }
    let (mut a, mut b) = (BigRational::zero(), BigRational::zero());
    for (sign, body) in signed_terms(&t) {
        let sym = body.strip_suffix('w').or_else(|| if d == 1 { body.strip_suffix('i') } else { None });
        match sym {
            Some(coef) => {
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let c = if coef.is_empty() { BigRational::one() } else { parse_rational(coef)? };
                b += c * sign;
            }
            None => a += parse_rational(body)? * sign,
        }
    }
    QuadImaginary::from_basis(a, b, d).map_err(|e| err("exponent", s, e.to_string()))
}

/// Splits at top-level `+`/`-` that are not part of an exponent. Runs of
/// signs multiply; each body is returned with its sign.
fn signed_terms(s: &str) -> Vec<(BigRational, &str)> {
    let mut out = Vec::new();
    let mut sign = BigRational::one();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut prev: Option<char> = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && !matches!(prev, Some('^') | Some('*') | Some('/')) => {
                let body = s[start..i].trim();
                if !body.is_empty() {
                    out.push((sign.clone(), body));
                    sign = BigRational::one();
                }
                if ch == '-' {
                    sign = -sign;
                }
                start = i + 1;
            }
            _ => {}
        }
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    let body = s[start..].trim();
    if !body.is_empty() {
        out.push((sign, body));
    }
    out
}

/// A group descriptor `c=...`.
pub fn parse_group(s: &str) -> Result<Group, GrammarError> {
    let t = despace(strip_key(s, &["c", "group"]));
    let group = if t == "zeta3" {
        Group::zeta3()
    } else if t == "zeta6" {
        Group::new(QuadImaginary::zeta6()).map_err(|e| err("group", s, e.to_string()))?
    } else if let Some(args) = call(&t, "gauss").or_else(|| call(&t, "eisenstein")) {
        let d = if t.starts_with("gauss") { 1 } else { 3 };
        let (re, im) = args.split_once(',').ok_or_else(|| err("group", s, "expected two arguments"))?;
        let c = QuadImaginary::from_basis(parse_rational(re)?, parse_rational(im)?, d)
            .map_err(|e| err("group", s, e.to_string()))?;
        Group::new(c).map_err(|e| err("group", s, e.to_string()))?
    } else if t.contains('i') {
        Group::new(parse_quad(&t, 1)?).map_err(|e| err("group", s, e.to_string()))?
    } else {
        let c = QuadImaginary::rational(parse_rational(&t)?, 1);
        Group::new(c).map_err(|e| err("group", s, e.to_string()))?
    };
    Ok(group)
}

/// The canonical descriptor of a group, accepted by [`parse_group`].
pub fn group_descriptor(group: &Group) -> String {
    let c = group.c();
    if group.d() == 3 {
        if *c == QuadImaginary::zeta3() {
            return String::from("c=zeta3");
        }
        let (a, b) = c.basis_coords();
        return format!("c=eisenstein({a},{b})");
    }
    if c.im_coeff().is_zero() {
        format!("c={}", c.re())
    } else {
        format!("c=gauss({},{})", c.re(), c.im_coeff())
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// A parenthesized group or a signed integer.
    fn exponent(&mut self) -> &'a str {
        let start = self.pos;
        if self.eat('(') {
            let mut depth = 1;
            while let Some(c) = self.bump() {
                match c {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
            }
            return &self.s[start..self.pos];
        }
        if self.peek() == Some('-') || self.peek() == Some('+') {
            self.bump();
        }
        self.digits();
        if self.peek() == Some('/') {
            self.bump();
            self.digits();
        }
        if matches!(self.peek(), Some('w' | 'i')) {
            self.bump();
        }
        &self.s[start..self.pos]
    }

    fn digits(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
    }
}

/// A group element: a product of `y`, `x`, `t`, `s` powers, or `1`.
pub fn parse_element(group: &Group, s: &str) -> Result<GroupElement, GrammarError> {
    let t = despace(s);
    if t == "1" {
        return Ok(group.identity());
    }
    let mut cur = Cursor { s: &t, pos: 0 };
    let mut acc = group.identity();
    let mut any = false;
    while let Some(c) = cur.bump() {
        if c == '*' && any {
            continue;
        }
        let exp = if cur.eat('^') { Some(cur.exponent()) } else { None };
        let factor = match c {
            'y' | 't' => {
                if c == 't' && !group.is_klein_bottle() {
                    return Err(err("element", s, "t and s are only available when c = -1"));
                }
                let h = match exp {
                    Some(e) => parse_quad(e, group.d())?,
                    None => QuadImaginary::one(group.d()),
                };
                group.element(h, 0).map_err(|e| err("element", s, e.to_string()))?
            }
            'x' | 's' => {
                if c == 's' && !group.is_klein_bottle() {
                    return Err(err("element", s, "t and s are only available when c = -1"));
                }
                let n = match exp {
                    Some(e) => {
                        let e = e.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(e);
                        e.parse::<i64>().map_err(|_| err("element", s, "x takes an integer exponent"))?
                    }
                    None => 1,
                };
                group.x_pow(n)
            }
            _ => return Err(err("element", s, format!("unexpected `{c}`"))),
        };
        acc = group.mul(&acc, &factor);
        any = true;
    }
    if !any {
        return Err(err("element", s, "empty"));
    }
    Ok(acc)
}

/// A finite element of the group algebra over `ring`.
pub fn parse_algebra(group: &Group, ring: Ring, s: &str) -> Result<AlgebraElement, GrammarError> {
    let t = despace(s);
    if t.is_empty() {
        return Err(err("algebra element", s, "empty"));
    }
    let mut out = AlgebraElement::zero(ring);
    for (sign, body) in signed_terms(&t) {
        let (coef, mono) = split_coefficient(body)?;
        let g = match mono {
            Some(m) => parse_element(group, m)?,
            None => group.identity(),
        };
        let c = ring
            .from_rational(&(coef * sign))
            .map_err(|e| err("algebra element", s, e.to_string()))?;
        out.add_term(g, c);
    }
    Ok(out)
}

fn split_coefficient(body: &str) -> Result<(BigRational, Option<&str>), GrammarError> {
    if let Ok(r) = parse_rational(body) {
        return Ok((r, None));
    }
    if let Some((head, rest)) = body.split_once('*') {
        if let Ok(r) = parse_rational(head) {
            return Ok((r, Some(rest)));
        }
    }
    Ok((BigRational::one(), Some(body)))
}

/// Comma-separated group elements.
pub fn parse_element_list(group: &Group, s: &str) -> Result<Vec<GroupElement>, GrammarError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_element(group, p))
        .collect()
}

/// Formats a coefficient for a `coeff * element` line.
pub fn format_term(group: &Group, g: &GroupElement, c: &Scalar) -> String {
    format!("{c} * {}", group.format(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, qq};

    #[test]
    fn rings_and_modules() {
        assert_eq!(parse_ring("Q").unwrap(), Ring::Rationals);
        assert_eq!(parse_ring("ring=Zmod(4)").unwrap(), Ring::Zmod(4));
        assert_eq!(parse_ring("field=Fp(5)").unwrap(), Ring::Zmod(5));
        assert!(parse_ring("Fp(4)").is_err());
        assert!(parse_ring("Zmod(1)").is_err());
        let m = parse_module(Ring::Zmod(4), "module=Zmod(4)^1").unwrap();
        assert_eq!(m.as_finite().unwrap().factors(), &[4]);
        let m = parse_module(Ring::Zmod(4), "Zmod(2) x Zmod(4)").unwrap();
        assert_eq!(m.as_finite().unwrap().factors(), &[2, 4]);
        let m = parse_module(Ring::Integers, "Zmod(9)^2").unwrap();
        assert_eq!(m.as_finite().unwrap().factors(), &[9, 9]);
        assert!(parse_module(Ring::Zmod(4), "Zmod(3)").is_err());
        assert_eq!(parse_module(Ring::Integers, "Q").unwrap(), ModulePresentation::Rationals);
    }

    #[test]
    fn quadratic_literals() {
        assert_eq!(parse_quad("1/2-3*w", 3).unwrap(), QuadImaginary::from_basis(qq(1, 2), q(-3), 3).unwrap());
        assert_eq!(parse_quad("(w)", 3).unwrap(), QuadImaginary::zeta3());
        assert_eq!(parse_quad("-i", 1).unwrap(), QuadImaginary::gauss(q(0), q(-1)));
        assert_eq!(parse_quad("2", 1).unwrap(), QuadImaginary::from_i64(2, 1));
        assert!(parse_quad("2+i", 3).is_err());
    }

    #[test]
    fn groups() {
        assert!(parse_group("c=-1").unwrap().is_klein_bottle());
        assert_eq!(parse_group("c=zeta3").unwrap(), Group::zeta3());
        let g = parse_group("c=gauss(3/5,4/5)").unwrap();
        assert_eq!(g, Group::gauss(qq(3, 5), qq(4, 5)).unwrap());
        assert_eq!(parse_group("3/5+4/5*i").unwrap(), g);
        for g in [Group::klein_bottle(), Group::abelian(), Group::zeta3(), g] {
            assert_eq!(parse_group(&group_descriptor(&g)).unwrap(), g);
        }
        assert!(parse_group("c=0").is_err());
    }

    #[test]
    fn elements() {
        let kb = Group::klein_bottle();
        assert_eq!(parse_element(&kb, "t^2*s^-1").unwrap(), kb.ts(2, -1));
        assert_eq!(parse_element(&kb, "s*t").unwrap(), kb.mul(&kb.x_pow(1), &kb.y_pow(1)));
        assert_eq!(parse_element(&kb, "y^(3)x^1").unwrap(), kb.ts(3, 1));
        assert_eq!(parse_element(&kb, "1").unwrap(), kb.identity());
        let z = Group::zeta3();
        let g = parse_element(&z, "y^(-1-w)").unwrap();
        assert_eq!(g, z.element(QuadImaginary::zeta3().pow(2).unwrap(), 0).unwrap());
        assert_eq!(parse_element(&z, "y^-1*y^-w").unwrap(), g);
        let w = z.element(QuadImaginary::zeta3(), 1).unwrap();
        assert_eq!(parse_element(&z, "y^w*x").unwrap(), w);
        assert_eq!(parse_element(&z, "y^(1/2)").unwrap(), parse_element(&z, "y^1/2").unwrap());
        assert!(parse_element(&z, "t").is_err());
        assert!(parse_element(&kb, "q").is_err());
    }

    #[test]
    fn formatted_elements_parse_back() {
        let groups = [Group::klein_bottle(), Group::abelian(), Group::zeta3(), Group::gauss(qq(3, 5), qq(4, 5)).unwrap()];
        for g in &groups {
            for (a, b, n) in [(0, 0, 0), (1, 0, 0), (0, 1, 1), (-2, 3, -2), (1, -1, 5), (0, -1, 0)] {
                let b = if g.c().im_coeff().is_zero() { 0 } else { b };
                let h = QuadImaginary::from_basis(qq(a, 2), q(b), g.d()).unwrap();
                let e = g.element(h, n).unwrap();
                assert_eq!(parse_element(g, &g.format(&e)).unwrap(), e, "{}", g.format(&e));
            }
        }
    }

    #[test]
    fn algebra_elements() {
        let kb = Group::klein_bottle();
        let r = Ring::Rationals;
        let e = parse_algebra(&kb, r, "1 - t").unwrap();
        assert_eq!(e, AlgebraElement::from_terms(r, [(kb.identity(), r.one()), (kb.ts(1, 0), r.from_i64(-1))]));
        let e = parse_algebra(&kb, r, "3/2*y^(1)x^0 + -1*y^(0)x^1").unwrap();
        assert_eq!(e.coeff(&kb.ts(1, 0)), Scalar::Rational(qq(3, 2)));
        assert_eq!(e.coeff(&kb.ts(0, 1)), r.from_i64(-1));
        let e = parse_algebra(&kb, Ring::Zmod(5), "2*t^-1 - 3").unwrap();
        assert_eq!(e.coeff(&kb.identity()), Ring::Zmod(5).from_i64(2));
        assert_eq!(e.coeff(&kb.ts(-1, 0)), Ring::Zmod(5).from_i64(2));
        assert!(parse_algebra(&kb, r, "t - t").unwrap().is_zero());
        assert!(parse_algebra(&kb, Ring::Zmod(5), "1/5*t").is_err());
    }
}
