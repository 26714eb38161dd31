//! One function per subcommand; each builds a [`Report`].

use std::collections::BTreeMap;
use std::fmt::Display;

use divring_core::grammar::{parse_algebra, parse_element_list, parse_group, parse_module, parse_ring, GrammarError};
use divring_core::matideal::{
    axioms_audit, det_agreement_audit, malcolmson_audit, module_conditions_audit, MatIdealError, MatrixIdealSpec,
    MatrixWindow, ModuleMode, SquareMatrix,
};
use divring_core::matroid::{
    closure_axioms_audit, either_or_audit, exchange_audit, restricted_exchange_audit, strong_lemmas_audit,
    ClosureContext, MatroidError, ModuleSide, SampleSpec,
};
use divring_core::scalars::{FiniteModule, ModulePresentation};
use divring_core::series::{
    dubrovin_invert, index_closure, pair, round_trip, InversionOptions, RhoMap, SeriesError, SeriesStream, Side, Step,
};
use divring_core::wqo::{wpo_probe, ClosureBudget, OrderedCloseError, Seed};
use divring_core::{AlgebraElement, Group, Ring};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::*;
use crate::report::{Record, Report, Term};
use crate::sample;
use crate::CliError;

impl From<GrammarError> for CliError {
    fn from(e: GrammarError) -> Self {
        CliError::Usage(e.to_string())
    }
}

enum Kind {
    Budget,
    Usage,
    Internal,
}

trait Classify: Display {
    fn kind(&self) -> Kind;
}

impl Classify for SeriesError {
    fn kind(&self) -> Kind {
        match self {
            SeriesError::BudgetExceeded(_) | SeriesError::Closure(_) => Kind::Budget,
            SeriesError::NotIncreasing { .. } | SeriesError::ZeroCoefficient(_) | SeriesError::Containment(_) => {
                Kind::Internal
            }
            _ => Kind::Usage,
        }
    }
}

impl Classify for MatroidError {
    fn kind(&self) -> Kind {
        match self {
            MatroidError::SearchSpaceTooLarge { .. } => Kind::Budget,
            _ => Kind::Usage,
        }
    }
}

impl Classify for MatIdealError {
    fn kind(&self) -> Kind {
        match self {
            MatIdealError::SearchSpaceTooLarge { .. } => Kind::Budget,
            _ => Kind::Usage,
        }
    }
}

/// `Some(value)` on success; budget errors mark the report and give `None`.
fn absorb<T, E: Classify>(report: &mut Report, r: Result<T, E>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) => match e.kind() {
            Kind::Budget => {
                report.exhausted(e.to_string());
                Ok(None)
            }
            Kind::Usage => Err(CliError::Usage(e.to_string())),
            Kind::Internal => Err(CliError::Internal(e.to_string())),
        },
    }
}

pub fn dispatch(command: &Command, config: BTreeMap<String, String>) -> Result<Report, CliError> {
    let mut report = Report::new(command.name(), config);
    match command {
        Command::Invert(a) => invert(a, &mut report)?,
        Command::Rho(a) => rho(a, &mut report)?,
        Command::Pair(a) => pairing(a, &mut report)?,
        Command::WqoDemo(a) => wqo_demo(a, &mut report)?,
        Command::ClosureAudit(a) => closure(a, &mut report)?,
        Command::ExchangeAudit(a) => exchange(a, &mut report)?,
        Command::StrongAudit(a) => strong(a, &mut report)?,
        Command::EitherorAudit(a) => either_or(a, &mut report)?,
        Command::MatidealAudit(a) => matideal(a, &mut report)?,
        Command::MalcolmsonAudit(a) => malcolmson(a, &mut report)?,
        Command::Partition(a) => partition(a, &mut report)?,
        Command::ProbeQ2(a) => probe_q2(a, &mut report)?,
    }
    Ok(report)
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Right => Side::Right,
            SideArg::Left => Side::Left,
        }
    }
}

impl From<ModeArg> for ModuleMode {
    fn from(m: ModeArg) -> ModuleMode {
        match m {
            ModeArg::Injective => ModuleMode::Injective,
            ModeArg::Surjective => ModuleMode::Surjective,
        }
    }
}

fn field(s: &str) -> Result<Ring, CliError> {
    let ring = parse_ring(s)?;
    if !ring.is_field() {
        return Err(CliError::Usage(format!("{ring} is not a field; series need Q or Fp(p)")));
    }
    Ok(ring)
}

fn nonzero(e: AlgebraElement, what: &str) -> Result<AlgebraElement, CliError> {
    if e.is_zero() {
        return Err(CliError::Usage(format!("{what} must be nonzero")));
    }
    Ok(e)
}

fn describe_tail(group: &Group, tail: &Option<Step>) -> String {
    match tail {
        Some(Step::Stalled(Some(b))) => format!("stalled above {}", group.format(b)),
        Some(Step::Stalled(None)) => "stalled".into(),
        Some(Step::Ended) => "ended".into(),
        _ => "more terms available".into(),
    }
}

fn invert(a: &InvertArgs, report: &mut Report) -> Result<(), CliError> {
    let group = parse_group(&a.group)?;
    let ring = field(&a.ring)?;
    let x = nonzero(parse_algebra(&group, ring, &a.x)?, "x")?;
    let av = parse_algebra(&group, ring, &a.a)?;
    let side = Side::from(a.side);
    let options = InversionOptions {
        budget: ClosureBudget::new(a.max_index, a.max_steps),
        check_containment: a.check_containment,
    };
    let source = SeriesStream::from_element(&group, side, &av);
    let Some(inv) = absorb(report, dubrovin_invert(&source, &x, options))? else {
        return Ok(());
    };
    match inv.series.prefix(a.terms) {
        Ok(p) => {
            for (g, c) in &p.terms {
                report.terms.push(Term {
                    coeff: c.to_string(),
                    element: group.format(g),
                });
            }
            match &p.tail {
                None => {}
                Some(Step::Ended) => report.note(format!("the quotient has exactly {} terms", p.terms.len())),
                Some(Step::Stalled(_)) => report.exhausted(format!(
                    "index budget reached after {} terms; {}",
                    p.terms.len(),
                    describe_tail(&group, &p.tail)
                )),
                Some(Step::Term(..)) => unreachable!("prefix tails are never terms"),
            }
        }
        Err(SeriesError::Containment(g)) => {
            report.push(
                Record::new("inversion", "support containment", "remainder checked at every step", false)
                    .with_witnesses(vec![format!("remainder term at {} outside rho(Y)", group.format(&g))]),
            );
            return Ok(());
        }
        Err(e) => {
            absorb::<(), _>(report, Err(e))?;
            return Ok(());
        }
    }
    let stats = inv.stats();
    if a.check_containment {
        report.push(Record::new(
            "inversion",
            "support containment",
            format!("{} gaps of rho(Y) checked", stats.containment_checks),
            true,
        ));
    }
    if a.verify {
        if let Some(rt) = absorb(report, round_trip(&group, side, &av, &x, a.terms, options))? {
            let bound = match &rt.bound {
                Some(b) => format!("through {}", group.format(b)),
                None => "in full".into(),
            };
            let witnesses = rt.mismatches.iter().map(|g| group.format(g)).collect();
            report.push(
                Record::new("inversion", "round trip", format!("{} support points compared {bound}", rt.compared), rt.matches())
                    .with_witnesses(witnesses),
            );
        }
    }
    Ok(())
}

fn rho(a: &RhoArgs, report: &mut Report) -> Result<(), CliError> {
    let group = parse_group(&a.group)?;
    let support = parse_element_list(&group, &a.support)?;
    let side = Side::from(a.side);
    let map = RhoMap::new(&group, side, &support).ok_or_else(|| CliError::Usage("support must be nonempty".into()))?;
    if let Some(gs) = &a.g {
        for g in parse_element_list(&group, gs)? {
            report.line(format!(
                "rho({0}) = {1}, rho^-1({0}) = {2}",
                group.format(&g),
                group.format(&map.rho(&g)),
                group.format(&map.rho_inverse(&g))
            ));
        }
    }
    if a.samples == 0 {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut sample: Vec<_> = (0..a.samples).map(|_| sample::element(&group, &mut rng, a.bound)).collect();
    let section = format!("rho on {} sampled elements, seed {}", a.samples, a.seed);
    let fmt = |g: &divring_core::GroupElement| group.format(g);

    let mut inverse = (0usize, Vec::new());
    let mut least = (0usize, Vec::new());
    for g in &sample {
        if map.rho(&map.rho_inverse(g)) != *g || map.rho_inverse(&map.rho(g)) != *g {
            inverse.0 += 1;
            inverse.1.push(fmt(g));
        }
        let oracle = support
            .iter()
            .map(|h| side.shift(&group, g, h))
            .min_by(|p, q| side.cmp(&group, p, q))
            .expect("support is nonempty");
        if map.rho(g) != oracle {
            least.0 += 1;
            least.1.push(fmt(g));
        }
    }
    sample.sort_by(|p, q| side.cmp(&group, p, q));
    sample.dedup();
    let mut monotone = (0usize, Vec::new());
    for w in sample.windows(2) {
        if side.cmp(&group, &map.rho(&w[0]), &map.rho(&w[1])) != std::cmp::Ordering::Less {
            monotone.0 += 1;
            monotone.1.push(format!("{} < {}", fmt(&w[0]), fmt(&w[1])));
        }
    }
    let n = a.samples;
    for (name, count, (fails, mut wit)) in [
        ("rho and rho^-1 are mutually inverse", n, inverse),
        ("rho(g) is the least element of g*supp", n, least),
        ("rho is strictly increasing", sample.len().saturating_sub(1), monotone),
    ] {
        wit.truncate(5);
        report.push(
            Record::new(&section, name, format!("{count} instances, {fails} failures"), fails == 0).with_witnesses(wit),
        );
    }
    Ok(())
}

fn pairing(a: &PairArgs, report: &mut Report) -> Result<(), CliError> {
    let group = parse_group(&a.group)?;
    let ring = field(&a.ring)?;
    let options = InversionOptions {
        budget: ClosureBudget::elements(a.max_index),
        ..InversionOptions::default()
    };
    let mut streams = Vec::new();
    for (text, divisor, side) in [(&a.a, &a.a_divisor, Side::Right), (&a.b, &a.b_divisor, Side::Left)] {
        let base = SeriesStream::from_element(&group, side, &parse_algebra(&group, ring, text)?);
        let s = match divisor {
            Some(d) => {
                let d = nonzero(parse_algebra(&group, ring, d)?, "divisor")?;
                match absorb(report, dubrovin_invert(&base, &d, options))? {
                    Some(inv) => inv.series,
                    None => return Ok(()),
                }
            }
            None => base,
        };
        streams.push(s);
    }
    let (sa, sb) = (&streams[0], &streams[1]);
    let Some(v) = absorb(report, pair(sa, sb, a.max_pulls))? else {
        return Ok(());
    };
    report.line(format!("pairing = {v}"));
    if let Some(r) = &a.r {
        let r = parse_algebra(&group, ring, r)?;
        let ar = absorb(report, sa.act_right(&r))?;
        let rb = absorb(report, sb.act_left(&r))?;
        let (Some(ar), Some(rb)) = (ar, rb) else { return Ok(()) };
        let lhs = absorb(report, pair(&ar, sb, a.max_pulls))?;
        let rhs = absorb(report, pair(sa, &rb, a.max_pulls))?;
        if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
            report.push(Record::new(
                "pairing",
                "adjoint",
                format!("<a*r, b> = {lhs}, <a, r*b> = {rhs}"),
                lhs == rhs,
            ));
        }
    }
    Ok(())
}

fn wqo_demo(a: &WqoArgs, report: &mut Report) -> Result<(), CliError> {
    let group = parse_group(&a.group)?;
    let ring = field(&a.ring)?;
    let x = nonzero(parse_algebra(&group, ring, &a.x)?, "x")?;
    let av = parse_algebra(&group, ring, &a.a)?;
    let side = Side::from(a.side);
    let map = RhoMap::new(&group, side, &x.support()).expect("x is nonzero");
    let mut seeds: Vec<_> = av.support().iter().map(|g| side.key(&group, map.rho_inverse(g))).collect();
    seeds.sort();
    seeds.dedup();
    let mut it = seeds.into_iter();
    let mut closure = index_closure(&map, move || it.next().map_or(Seed::Ended, Seed::Next), ClosureBudget::elements(a.max_index));
    let mut ys = Vec::new();
    while ys.len() < a.count {
        match closure.next_element() {
            Ok(Some(k)) => ys.push(k.into_elem()),
            Ok(None) => {
                report.note(format!("Y is finite with {} elements", ys.len()));
                break;
            }
            Err(OrderedCloseError::Truncated { reason, .. }) => {
                report.exhausted(format!("closure stopped after {} elements ({reason})", ys.len()));
                break;
            }
            Err(e) => return Err(CliError::Internal(e.to_string())),
        }
    }
    for (i, y) in ys.iter().enumerate() {
        report.line(format!("Y[{i}] = {}, rho = {}", group.format(y), group.format(&map.rho(y))));
    }
    let section = format!("first {} elements of Y", ys.len());
    let increasing = ys.windows(2).filter(|w| side.cmp(&group, &w[0], &w[1]) != std::cmp::Ordering::Less).count();
    report.push(Record::new(
        &section,
        "emitted in increasing order",
        format!("{} consecutive pairs", ys.len().saturating_sub(1)),
        increasing == 0,
    ));
    let mut steps = 0;
    let mut bad = Vec::new();
    for y in &ys {
        let least = map.rho(y);
        for h in map.support() {
            let yh = side.shift(&group, y, h);
            if yh == least {
                continue;
            }
            steps += 1;
            let next = map.rho_inverse(&yh);
            if side.cmp(&group, &next, y) != std::cmp::Ordering::Greater {
                bad.push(format!("{} -> {}", group.format(y), group.format(&next)));
            }
        }
    }
    bad.truncate(5);
    report.push(
        Record::new(&section, "closure steps increase", format!("{steps} steps"), bad.is_empty()).with_witnesses(bad),
    );
    let probe = wpo_probe(&ys, |p, q| side.cmp(&group, p, q) != std::cmp::Ordering::Greater);
    report.push(Record::new(
        &section,
        "no descending pair",
        format!("longest descending run {}, largest antichain {}", probe.longest_descending.len(), probe.max_antichain.len()),
        !probe.has_descending_pair(),
    ));
    Ok(())
}

fn context(ring: &str, module: &Option<String>, side: SideArg) -> Result<ClosureContext, CliError> {
    let ring = parse_ring(ring)?;
    let module = match module {
        Some(m) => parse_module(ring, m)?,
        None if ring == Ring::Integers => ModulePresentation::Rationals,
        None => ModulePresentation::Finite(FiniteModule::regular(ring).map_err(|e| CliError::Usage(e.to_string()))?),
    };
    let side = match side {
        SideArg::Right => ModuleSide::FromRightModule,
        SideArg::Left => ModuleSide::FromLeftModule,
    };
    ClosureContext::new(ring, module, side).map_err(|e| CliError::Usage(e.to_string()))
}

fn closure(a: &ClosureArgs, report: &mut Report) -> Result<(), CliError> {
    let ctx = context(&a.ring, &a.module, a.side)?;
    let sample = SampleSpec {
        trials: a.trials,
        bound: a.bound,
        seed: a.seed,
    };
    if let Some(r) = absorb(report, closure_axioms_audit(&ctx, a.n, sample))? {
        report.add_audit(&r);
    }
    if a.restricted {
        if let Some(r) = absorb(report, restricted_exchange_audit(&ctx, a.n))? {
            report.add_audit(&r);
        }
    }
    Ok(())
}

fn exchange_record(ctx: &ClosureContext, n: usize, bound: i64, ceiling: usize, report: &mut Report) -> Result<Option<bool>, CliError> {
    let Some(r) = absorb(report, exchange_audit(ctx, n, bound, ceiling))? else {
        return Ok(None);
    };
    let holds = r.holds();
    report.push(
        Record::new(
            format!("exchange for {}", ctx.label()),
            format!("exchange at n={n}"),
            format!("{} instances, {} violations, {}", r.instances, r.total_violations, r.window),
            holds,
        )
        .with_witnesses(r.violations.iter().map(|v| v.to_string()).collect()),
    );
    Ok(Some(holds))
}

fn exchange(a: &ExchangeArgs, report: &mut Report) -> Result<(), CliError> {
    let ctx = context(&a.ring, &a.module, a.side)?;
    exchange_record(&ctx, a.n, a.bound, a.ceiling, report)?;
    Ok(())
}

fn strong(a: &StrongArgs, report: &mut Report) -> Result<(), CliError> {
    let ctx = context(&a.ring, &a.module, a.side)?;
    if let Some(r) = absorb(report, strong_lemmas_audit(&ctx, a.n, a.trials, a.seed))? {
        report.add_audit(&r);
    }
    Ok(())
}

fn either_or(a: &EitherOrArgs, report: &mut Report) -> Result<(), CliError> {
    let ctx = context(&a.ring, &a.module, SideArg::Right)?;
    let Some(r) = absorb(report, either_or_audit(&ctx, a.n, a.bound, a.ceiling))? else {
        return Ok(());
    };
    report.add_audit(&r);
    let eo = r.check("either/or").is_some_and(|c| c.passed());
    let mut exch = true;
    for n in 1..=a.n {
        match exchange_record(&ctx, n, a.bound, a.ceiling, report)? {
            Some(h) => exch &= h,
            None => return Ok(()),
        }
    }
    report.push(Record::new(
        "consistency",
        "either/or implies exchange",
        format!("either/or {}, exchange {} for n <= {}", verdict(eo), verdict(exch), a.n),
        !eo || exch,
    ));
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "fails"
    }
}

fn ideal_spec(spec: &str, ring: Ring, module: &FiniteModule, mode: ModeArg) -> Result<MatrixIdealSpec, CliError> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "induced" {
        return Ok(match mode {
            ModeArg::Injective => MatrixIdealSpec::InducedNonInjective(module.clone()),
            ModeArg::Surjective => MatrixIdealSpec::InducedNonSurjective(module.clone()),
        });
    }
    if let Some(p) = s.strip_prefix("det(").and_then(|r| r.strip_suffix(')')) {
        let p: u64 = p.parse().map_err(|_| CliError::Usage(format!("bad prime in {spec}")))?;
        return Ok(MatrixIdealSpec::DetDivisibleBy(p));
    }
    if let Some(list) = s.strip_prefix("list(").and_then(|r| r.strip_suffix(')')) {
        let mut out = Vec::new();
        for m in list.split(';').filter(|m| !m.is_empty()) {
            let rows: Vec<Vec<i64>> =
                serde_json::from_str(m).map_err(|e| CliError::Usage(format!("bad matrix {m}: {e}")))?;
            out.push(SquareMatrix::from_rows(ring, &rows).map_err(|e| CliError::Usage(e.to_string()))?);
        }
        return Ok(MatrixIdealSpec::ExplicitList(out));
    }
    Err(CliError::Usage(format!("unknown spec {spec}; expected induced, det(p) or list(..)")))
}

fn ideal_setup(ring: &str, module: &str, bound: i64, n: usize, ceiling: usize) -> Result<(Ring, FiniteModule, MatrixWindow), CliError> {
    let ring = parse_ring(ring)?;
    let module = match parse_module(ring, module)? {
        ModulePresentation::Finite(m) => m,
        ModulePresentation::Rationals => return Err(CliError::Usage("matrix ideals need a finite module".into())),
    };
    let mut win = MatrixWindow::new(ring, n, bound);
    win.ceiling = ceiling;
    Ok((ring, module, win))
}

fn matideal(a: &MatIdealArgs, report: &mut Report) -> Result<(), CliError> {
    let (ring, module, win) = ideal_setup(&a.ring, &a.module, a.window, a.n, a.ceiling)?;
    let spec = ideal_spec(&a.spec, ring, &module, a.mode)?;
    let all = a.check == MatIdealCheck::All;
    if all || a.check == MatIdealCheck::Axioms {
        if let Some(r) = absorb(report, axioms_audit(&spec, &win))? {
            report.add_audit(&r);
        }
    }
    if all || a.check == MatIdealCheck::ModuleConditions {
        if let Some(r) = absorb(report, module_conditions_audit(&module, a.mode.into(), &win))? {
            report.add_audit(&r);
        }
    }
    if all || a.check == MatIdealCheck::DetAgreement {
        if let Some(r) = absorb(report, det_agreement_audit(&module, a.n, &win))? {
            report.add_audit(&r);
        }
    }
    Ok(())
}

fn malcolmson(a: &MalcolmsonArgs, report: &mut Report) -> Result<(), CliError> {
    let (ring, module, win) = ideal_setup(&a.ring, &a.module, a.window, a.n, a.ceiling)?;
    let spec = ideal_spec(&a.spec, ring, &module, a.mode)?;
    if let Some(r) = absorb(report, malcolmson_audit(&spec, &win))? {
        report.add_audit(&r);
    }
    Ok(())
}

fn partition(a: &PartitionArgs, report: &mut Report) -> Result<(), CliError> {
    let group = parse_group(&a.group)?;
    let set = parse_element_list(&group, &a.set)?;
    let names: Vec<&str> = a.set.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if set.is_empty() {
        return Err(CliError::Usage("the set must be nonempty".into()));
    }
    if a.window < 1 {
        return Err(CliError::Usage("window must be at least 1".into()));
    }
    let probe = group.positivity_periodicity_probe(&set, a.window);
    let order = |idx: &[usize]| idx.iter().map(|&i| names[i]).collect::<Vec<_>>().join(" < ");
    for (n, idx) in probe.classes.iter().filter(|(n, _)| n.abs() <= a.show) {
        report.line(format!("x^{n}: {}", order(idx)));
    }
    let mut counts: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
    for (_, idx) in &probe.classes {
        *counts.entry(idx).or_default() += 1;
    }
    for (idx, k) in &counts {
        report.line(format!("class {}: {k} of {} exponents", order(idx), probe.classes.len()));
    }
    let period = match probe.period {
        Some(p) => format!("{p}"),
        None => "none".into(),
    };
    report.line(match probe.period {
        Some(p) => format!("least period: {p}"),
        None => format!("no period <= {} within |n| <= {}", probe.max_period, a.window),
    });
    if let Some(expect) = &a.expect_period {
        report.push(Record::new(
            "periodicity",
            "least period",
            format!("expected {expect}, found {period}"),
            expect.trim() == period,
        ));
    }
    Ok(())
}

fn probe_q2(a: &ProbeArgs, report: &mut Report) -> Result<(), CliError> {
    let group = parse_group(&a.group)?;
    let ring = field(&a.ring)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let options = InversionOptions {
        budget: ClosureBudget::elements(a.max_index),
        ..InversionOptions::default()
    };
    let section = format!("maps a -> a*y1*y2^-1 - a*x1*x2^-1, first {} terms of each image", a.terms);
    let mut mixed = 0usize;
    for i in 0..a.samples {
        let [x1, x2, y1, y2] = std::array::from_fn(|_| sample::algebra(&group, ring, &mut rng, 2, 2));
        let (mut nonzero, mut exact_zero, mut zero_so_far, mut undetermined) = (0, 0, 0, 0);
        for _ in 0..a.probes {
            let av = sample::algebra(&group, ring, &mut rng, 3, 2);
            match image(&group, &av, [&x1, &x2, &y1, &y2], a.terms, options) {
                Ok(Image::Nonzero) => nonzero += 1,
                Ok(Image::Zero) => exact_zero += 1,
                Ok(Image::ZeroSoFar) => zero_so_far += 1,
                Err(e) => match e.kind() {
                    Kind::Budget => undetermined += 1,
                    Kind::Usage => return Err(CliError::Usage(e.to_string())),
                    Kind::Internal => return Err(CliError::Internal(e.to_string())),
                },
            }
        }
        let zero = exact_zero + zero_so_far;
        if nonzero > 0 && zero > 0 {
            mixed += 1;
        }
        report.push(Record::evidence(
            &section,
            format!("map {i}"),
            format!(
                "x1={}, x2={}, y1={}, y2={}: nonzero on {nonzero} of {} inputs, zero on {exact_zero}, zero within the inspected terms on {zero_so_far}, undetermined {undetermined}",
                x1.format(&group),
                x2.format(&group),
                y1.format(&group),
                y2.format(&group),
                a.probes
            ),
        ));
    }
    report.push(Record::evidence(
        &section,
        "maps with both zero and nonzero images",
        format!("{mixed} of {} maps", a.samples),
    ));
    report.note("truncated images can show a map is nonzero but never that it is invertible");
    Ok(())
}

enum Image {
    Nonzero,
    /// Both quotients are finite and agree.
    Zero,
    /// No term among those inspected.
    ZeroSoFar,
}

fn image(group: &Group, a: &AlgebraElement, [x1, x2, y1, y2]: [&AlgebraElement; 4], terms: usize, options: InversionOptions) -> Result<Image, SeriesError> {
    let quotient = |num: &AlgebraElement, den: &AlgebraElement| -> Result<SeriesStream, SeriesError> {
        let s = SeriesStream::from_element(group, Side::Right, &a.mul(group, num));
        Ok(dubrovin_invert(&s, den, options)?.series)
    };
    let diff = quotient(y1, y2)?.sub(&quotient(x1, x2)?)?;
    let p = diff.prefix(terms)?;
    Ok(if !p.terms.is_empty() {
        Image::Nonzero
    } else if p.tail == Some(Step::Ended) {
        Image::Zero
    } else {
        Image::ZeroSoFar
    })
}
