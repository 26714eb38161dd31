//! Reference results that every build must reproduce exactly.

use divring_core::grammar::{parse_algebra, parse_element_list};
use divring_core::matideal::{
    axioms_audit, det_agreement_audit, module_conditions_audit, signed_swap, MatrixIdealSpec, MatrixWindow, ModuleMode,
};
use divring_core::matroid::{closure_axioms_audit, ClosureContext, SampleSpec};
use divring_core::matrix::Matrix;
use divring_core::report::AuditReport;
use divring_core::scalars::FiniteModule;
use divring_core::series::{index_closure, pair, RhoMap, SeriesStream, Side, Step};
use divring_core::wqo::{close, ClosureBudget, OpFamily, Seed};
use divring_core::{AlgebraElement, Group, GroupElement, OrderTag, Ring};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sample;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Golden {
    pub name: &'static str,
    pub expected: String,
    pub actual: String,
}

impl Golden {
    pub fn new(name: &'static str, expected: impl Into<String>, actual: impl Into<String>) -> Self {
        Golden {
            name,
            expected: expected.into(),
            actual: actual.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }

    /// `-expected` / `+actual` for every differing line.
    pub fn diff(&self) -> Vec<String> {
        let e: Vec<&str> = self.expected.lines().collect();
        let a: Vec<&str> = self.actual.lines().collect();
        let mut out = Vec::new();
        for i in 0..e.len().max(a.len()) {
            let (x, y) = (e.get(i), a.get(i));
            if x != y {
                if let Some(x) = x {
                    out.push(format!("{}: -{x}", i + 1));
                }
                if let Some(y) = y {
                    out.push(format!("{}: +{y}", i + 1));
                }
            }
        }
        out
    }
}

fn series_lines(group: &Group, terms: &[(GroupElement, divring_core::Scalar)]) -> String {
    terms
        .iter()
        .map(|(g, c)| format!("{c} * {}\n", group.format(g)))
        .collect()
}

fn tail(group: &Group, t: &Option<Step>) -> String {
    match t {
        Some(Step::Stalled(Some(b))) => format!("stalled above {}", group.format(b)),
        Some(Step::Ended) => "ended".into(),
        other => format!("{other:?}"),
    }
}

fn verdicts(r: &AuditReport, names: &[&str]) -> String {
    names
        .iter()
        .map(|n| match r.check(n) {
            Some(c) => format!("{n}: {}\n", c.verdict()),
            None => format!("{n}: missing\n"),
        })
        .collect()
}

fn kb_element(s: &str) -> AlgebraElement {
    parse_algebra(&Group::klein_bottle(), Ring::Rationals, s).expect("fixture parses")
}

fn cli_stdout(args: &[&str]) -> (String, i32) {
    let out = crate::run(std::iter::once("divring").chain(args.iter().copied()));
    (out.stdout, out.code)
}

/// Only the term lines of a text `invert` report.
fn invert_terms(stdout: &str) -> String {
    stdout
        .lines()
        .filter(|l| l.contains(" * ") && !l.starts_with(' '))
        .map(|l| format!("{l}\n"))
        .collect()
}

/// Runs every reference example. `seed` only affects sampled checks, none of
/// whose expected results depend on it.
pub fn suite(seed: u64) -> Vec<Golden> {
    let kb = Group::klein_bottle();
    let q = Ring::Rationals;
    let mut out = Vec::new();

    out.push(Golden::new(
        "the right order puts 1 below t",
        "Less",
        format!("{:?}", kb.compare(&kb.identity(), &kb.ts(1, 0), &OrderTag::RightOrder)),
    ));

    let z3 = Group::zeta3();
    let s = parse_element_list(&z3, "1,y^(-1-w)").expect("fixture parses");
    let names = ["1", "s"];
    let orders: String = (0..3)
        .map(|n| {
            let idx = z3.local_order_indices(&z3.x_pow(n), &s);
            format!("x^{n}: {} < {}\n", names[idx[0]], names[idx[1]])
        })
        .collect();
    out.push(Golden::new(
        "cube-root fixture: 1 and x agree on {1, s}, x^2 differs",
        "x^0: s < 1\nx^1: s < 1\nx^2: 1 < s\n",
        orders,
    ));

    let none: [OpFamily<'_, i64>; 0] = [];
    out.push(Golden::new(
        "no seeds give an empty closure",
        "0 elements",
        match close(&none, ClosureBudget::elements(10)) {
            Ok(v) => format!("{} elements", v.len()),
            Err(e) => format!("{e:?}"),
        },
    ));

    let kbc = kb.clone();
    let geometric = SeriesStream::from_fn(&kb, q, Side::Right, 30, move |i| Some((kbc.ts(i as i64, 0), q.one())));
    let p = geometric.act_right(&kb_element("1-t")).and_then(|s| s.prefix(5));
    out.push(Golden::new(
        "geometric series times 1-t",
        "1 * 1\nstalled above t^29\n",
        match p {
            Ok(p) => format!("{}{}\n", series_lines(&kb, &p.terms), tail(&kb, &p.tail)),
            Err(e) => e.to_string(),
        },
    ));

    let kbc = kb.clone();
    let negative = SeriesStream::from_fn(&kb, q, Side::Right, 30, move |i| Some((kbc.ts(i as i64 + 1, 1), q.from_i64(-1))));
    let p = negative.act_right(&kb_element("1-t")).and_then(|s| s.prefix(5));
    out.push(Golden::new(
        "-(t+t^2+...)s times 1-t",
        "1 * s\nstalled above t^29*s\n",
        match p {
            Ok(p) => format!("{}{}\n", series_lines(&kb, &p.terms), tail(&kb, &p.tail)),
            Err(e) => e.to_string(),
        },
    ));

    let expect: String = (0..20).map(|i| format!("1 * {}\n", kb.format(&kb.ts(i, 0)))).collect();
    let (stdout, _) = cli_stdout(&["invert", "--group", "c=-1", "--x", "1-t", "--a", "1", "--terms", "20"]);
    out.push(Golden::new("(1-t)^-1 applied to 1", expect, invert_terms(&stdout)));

    let expect: String = (1..=20).map(|i| format!("-1 * {}\n", kb.format(&kb.ts(i, 1)))).collect();
    let (stdout, _) = cli_stdout(&["invert", "--group", "c=-1", "--x", "1-t", "--a", "s", "--terms", "20"]);
    out.push(Golden::new("(1-t)^-1 applied to s", expect, invert_terms(&stdout)));

    let x = kb_element("1-t");
    let rho = RhoMap::new(&kb, Side::Right, &x.support()).expect("nonzero");
    let mut seed_list = vec![Side::Right.key(&kb, rho.rho_inverse(&kb.ts(0, 1)))].into_iter();
    let mut y = index_closure(&rho, move || seed_list.next().map_or(Seed::Ended, Seed::Next), ClosureBudget::elements(10));
    out.push(Golden::new(
        "inverting on s starts the index set at ts",
        "t*s",
        match y.next_element() {
            Ok(Some(k)) => kb.format(k.elem()),
            other => format!("{other:?}"),
        },
    ));

    out.push(Golden::new("signed swap from elementary matrices", "[[0,-1],[1,0]]", signed_swap(Ring::Integers, 2, 0, 1).to_string()));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = 50;
    let mut adjoint = 0;
    for _ in 0..trials {
        let a = sample::algebra(&kb, q, &mut rng, 3, 3);
        let b = sample::algebra(&kb, q, &mut rng, 3, 3);
        let r = sample::algebra(&kb, q, &mut rng, 3, 3);
        let sa = SeriesStream::from_element(&kb, Side::Right, &a);
        let sb = SeriesStream::from_element(&kb, Side::Left, &b);
        let lhs = pair(&SeriesStream::from_element(&kb, Side::Right, &a.mul(&kb, &r)), &sb, 1000);
        let rhs = pair(&sa, &SeriesStream::from_element(&kb, Side::Left, &r.mul(&kb, &b)), 1000);
        if lhs.is_ok() && lhs == rhs {
            adjoint += 1;
        }
    }
    out.push(Golden::new(
        "pairing is balanced over the group ring",
        format!("{trials} of {trials}"),
        format!("{adjoint} of {trials}"),
    ));

    let ctx = ClosureContext::rational();
    out.push(Golden::new(
        "over Z with Q, 3 lies in the closure of 2",
        "true",
        match ctx.in_closure(&[3], &[vec![2]]) {
            Ok(b) => b.to_string(),
            Err(e) => e.to_string(),
        },
    ));

    let z4 = Ring::Zmod(4);
    let ctx = ClosureContext::regular(z4).expect("Z/4 acts on itself");
    let axioms = ["extensive", "monotone", "idempotent"];
    let mut got = String::new();
    for n in 1..=2 {
        match closure_axioms_audit(&ctx, n, SampleSpec::default()) {
            Ok(r) => got.push_str(&verdicts(&r, &axioms)),
            Err(e) => got.push_str(&format!("{e}\n")),
        }
    }
    out.push(Golden::new(
        "Z/4 closures are closure operators for n <= 2",
        verdicts_all_pass(&axioms).repeat(2),
        got,
    ));

    let f2 = ClosureContext::regular(Ring::Zmod(2)).expect("F2 acts on itself");
    let ids: Vec<String> = (0..=4)
        .map(|n| match f2.is_strong(&Matrix::identity(Ring::Zmod(2), n)) {
            Ok(b) => b.to_string(),
            Err(e) => e.to_string(),
        })
        .collect();
    out.push(Golden::new("identity matrices are strong", "true true true true true", ids.join(" ")));

    let m4 = FiniteModule::new(Ring::Integers, vec![4]).expect("Z/4 over Z");
    let win = MatrixWindow::new(Ring::Integers, 2, 2);
    out.push(Golden::new(
        "non-injective on Z/4 means even determinant",
        "det-agreement: pass (625 instances)\n",
        match det_agreement_audit(&m4, 2, &win) {
            Ok(r) => r
                .checks
                .iter()
                .map(|c| format!("{}: {} ({} instances)\n", c.name, c.verdict(), c.instances))
                .collect(),
            Err(e) => e.to_string(),
        },
    ));

    let axioms = ["diagonal-sum", "unit-cancellation", "unit-excluded", "prime", "left-elementary"];
    out.push(Golden::new(
        "the non-injective set of Z/4 satisfies the prime axioms",
        verdicts_all_pass(&axioms),
        match axioms_audit(&MatrixIdealSpec::InducedNonInjective(m4.clone()), &win) {
            Ok(r) => verdicts(&r, &axioms),
            Err(e) => e.to_string(),
        },
    ));

    let prime = ["non-full", "diagonal-sum", "column-sum", "row-sum", "unit-cancellation", "unit-excluded", "prime"];
    out.push(Golden::new(
        "even determinants form a prime matrix ideal",
        verdicts_all_pass(&prime),
        match axioms_audit(&MatrixIdealSpec::DetDivisibleBy(2), &win) {
            Ok(r) => verdicts(&r, &prime),
            Err(e) => e.to_string(),
        },
    ));

    out.push(Golden::new(
        "kernel dichotomy fails for Z/4",
        "no-injection: pass\nkernel-dichotomy: fail\nwitness columns end in 1 and 2\n",
        match module_conditions_audit(&m4, ModuleMode::Injective, &win) {
            Ok(r) => {
                let shape = r.check("kernel-dichotomy").is_some_and(|c| {
                    c.witnesses
                        .first()
                        .is_some_and(|w| w.contains("y=(1) is one-to-one") && w.contains("y=(2) is nonzero"))
                });
                format!(
                    "{}witness columns {}\n",
                    verdicts(&r, &["no-injection", "kernel-dichotomy"]),
                    if shape { "end in 1 and 2" } else { "have another shape" }
                )
            }
            Err(e) => e.to_string(),
        },
    ));

    let (_, code) = cli_stdout(&[
        "matideal-audit", "--ring", "Z", "--window", "2", "--module", "Zmod(4)", "--n", "2", "--check", "det-agreement",
    ]);
    out.push(Golden::new("matideal-audit det-agreement exits cleanly", "exit 0", format!("exit {code}")));

    out
}

fn verdicts_all_pass(names: &[&str]) -> String {
    names.iter().map(|n| format!("{n}: pass\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diff_marks_changed_lines() {
        let g = Golden::new("x", "1 * 1\n1 * t\n", "1 * 1\n2 * t\n");
        assert!(!g.passed());
        assert_eq!(g.diff(), ["2: -1 * t", "2: +2 * t"]);
    }
}
