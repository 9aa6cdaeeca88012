//! Problem-file parsing, report types and the three subcommands of `mtorus`.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use mtorus::affine::{check_gluing, AffineParams, PeriodicOutcome, WitnessMap};
use mtorus::deformability::{deformability_report, divisors, DeformabilityReport};
use mtorus::oracles::window_scan;
use mtorus::verify::{self, VerifyConfig, VerifyReport};
use mtorus::{
    build_case_one_g, build_main_theorem_g, classify, nielsen_fiber, validate_hom, BundleSpec, CaseTag, Classification,
    ConditionContext, Error as CoreError, ExactScalar, FiberedMapSpec, HomValidity, IntMatrix2, IntVec2,
};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub const ANALYZE_SCHEMA: &str = "mtorus.analyze/1";
pub const SOLVE_SCHEMA: &str = "mtorus.solve/1";
pub const VERIFY_SCHEMA: &str = "mtorus.verify/1";
pub const DEFAULT_SEARCH_BOUND: u64 = 64;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFICATION_FAILED: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
}

/// A matrix given either as its displayed rows `[[a1, a3], [a2, a4]]` or as
/// the flat list `[a1, a2, a3, a4]`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Rows(IntMatrix2),
    Flat(#[serde(with = "mtorus::serde_int::vec")] Vec<BigInt>),
}

impl MatrixInput {
    pub fn to_matrix(&self, name: &str) -> Result<IntMatrix2> {
        match self {
            Self::Rows(m) => Ok(m.clone()),
            Self::Flat(v) => match v.as_slice() {
                [a1, a2, a3, a4] => Ok(IntMatrix2 { a1: a1.clone(), a2: a2.clone(), a3: a3.clone(), a4: a4.clone() }),
                _ => bail!("field `{name}`: expected four integers a1, a2, a3, a4, got {}", v.len()),
            },
        }
    }
}

/// The contents of a problem file.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(alias = "A")]
    pub a: MatrixInput,
    #[serde(alias = "B")]
    pub b: MatrixInput,
    #[serde(with = "mtorus::serde_int")]
    pub c1: BigInt,
    #[serde(with = "mtorus::serde_int")]
    pub c2: BigInt,
    #[serde(default = "one")]
    pub n: u64,
    #[serde(default)]
    pub eps: Option<String>,
    #[serde(default)]
    pub delta: Option<String>,
    #[serde(default)]
    pub search_bound: Option<u64>,
}

fn one() -> u64 {
    1
}

/// A validated problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub a: IntMatrix2,
    pub b: IntMatrix2,
    pub c: IntVec2,
    pub n: u64,
    pub eps: Option<ExactScalar>,
    pub delta: Option<ExactScalar>,
    pub search_bound: u64,
}

impl Problem {
    pub fn bundle(&self) -> BundleSpec {
        BundleSpec::new(self.a.clone())
    }

    pub fn map(&self) -> FiberedMapSpec {
        FiberedMapSpec::new(self.b.clone(), self.c.clone())
    }
}

fn parse_scalar(field: &str, text: &str) -> Result<ExactScalar> {
    text.parse().with_context(|| format!("field `{field}`: cannot parse {text:?} as an exact scalar"))
}

impl ProblemSpec {
    pub fn into_problem(self) -> Result<Problem> {
        if self.n == 0 {
            bail!("field `n`: must be a positive integer");
        }
        let a = self.a.to_matrix("A")?;
        if !a.is_unimodular() {
            bail!("field `A`: determinant {} is not ±1", a.det());
        }
        Ok(Problem {
            a,
            b: self.b.to_matrix("B")?,
            c: IntVec2 { x: self.c1, y: self.c2 },
            n: self.n,
            eps: self.eps.as_deref().map(|s| parse_scalar("eps", s)).transpose()?,
            delta: self.delta.as_deref().map(|s| parse_scalar("delta", s)).transpose()?,
            search_bound: self.search_bound.unwrap_or(DEFAULT_SEARCH_BOUND),
        })
    }
}

/// Parses JSON or TOML, choosing by extension and otherwise trying both.
pub fn parse_problem(text: &str, path: Option<&Path>) -> Result<Problem> {
    let ext = path.and_then(|p| p.extension()).and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let spec: ProblemSpec = match ext.as_deref() {
        Some("json") => serde_json::from_str(text).context("invalid JSON problem")?,
        Some("toml") => toml::from_str(text).context("invalid TOML problem")?,
        _ => match serde_json::from_str(text) {
            Ok(spec) => spec,
            Err(json_err) => toml::from_str(text).map_err(|toml_err| {
                anyhow!("input is neither valid JSON ({json_err}) nor valid TOML ({toml_err})")
            })?,
        },
    };
    spec.into_problem()
}

pub fn load_problem(path: &Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_problem(&text, Some(path)).with_context(|| format!("in {}", path.display()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NielsenRow {
    pub k: u64,
    #[serde(with = "mtorus::serde_int")]
    pub nielsen: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub schema: String,
    pub problem: Problem,
    pub homomorphism: HomValidity,
    pub classification: Option<Classification>,
    pub nielsen: Vec<NielsenRow>,
    pub deformability: Option<DeformabilityReport>,
}

/// What a command produced: the report, its text rendering and the exit code.
pub struct CommandOutput {
    pub json: String,
    pub text: String,
    pub exit_code: i32,
}

fn classify_problem(p: &Problem) -> Result<Classification> {
    classify(&p.bundle(), &p.map()).map_err(|e| match e {
        CoreError::NotHomomorphism(msg) => anyhow!("not a homomorphism: {msg}"),
        other => anyhow!(other),
    })
}

pub fn analyze(p: &Problem) -> Result<(AnalyzeReport, i32)> {
    let homomorphism = validate_hom(&p.map(), &p.bundle())?;
    let mut report = AnalyzeReport {
        schema: ANALYZE_SCHEMA.into(),
        problem: p.clone(),
        homomorphism: homomorphism.clone(),
        classification: None,
        nielsen: divisors(p.n).into_iter().map(|k| NielsenRow { k, nielsen: nielsen_fiber(&p.b, k) }).collect(),
        deformability: None,
    };
    if let HomValidity::Violation(_) = homomorphism {
        return Ok((report, exit::INVALID_INPUT));
    }
    let c = classify_problem(p)?;
    let ctx = ConditionContext::from_classification(&c, p.n)?;
    report.deformability = Some(deformability_report(&ctx));
    report.classification = Some(c);
    Ok((report, exit::OK))
}

pub fn render_analyze(r: &AnalyzeReport) -> String {
    let mut s = String::new();
    let p = &r.problem;
    let _ = writeln!(s, "A = {}  B = {}  c = {}  n = {}", p.a, p.b, p.c, p.n);
    match &r.homomorphism {
        HomValidity::Valid => {
            let _ = writeln!(s, "homomorphism: valid");
        }
        HomValidity::Violation(msg) => {
            let _ = writeln!(s, "homomorphism: VIOLATION ({msg})");
            return s;
        }
    }
    if let Some(c) = &r.classification {
        let _ = writeln!(s, "case {}: P = {}  A' = {}  B' = {}  c' = {}", c.case_tag, c.p, c.a1, c.b1, c.translation);
    }
    let _ = writeln!(s, "Nielsen number of the fiber iterate:");
    for row in &r.nielsen {
        let _ = writeln!(s, "  k = {:<4} N = {}", row.k, row.nielsen);
    }
    if let Some(d) = &r.deformability {
        let _ = writeln!(s, "deformable to fixed point free, per divisor:");
        for row in &d.divisors {
            let _ = writeln!(s, "  k = {:<4} {:<5} [{}]", row.k, row.deformable, row.clause);
        }
        let _ = writeln!(s, "realizable for n = {}: {:?} [{}]", d.n, d.realizable.verdict, d.realizable.clause);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowCheck {
    pub search_bound: u64,
    /// Lift found by brute force over the window, if any.
    pub hit: Option<(String, String)>,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: String,
    pub case: CaseTag,
    pub n: u64,
    /// How `ε, δ` were chosen.
    pub source: String,
    pub map: WitnessMap,
    pub gluing_ok: bool,
    pub outcome: PeriodicOutcome,
    pub window_check: Option<WindowCheck>,
}

/// Overrides from the command line take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct SolveOverrides {
    pub n: Option<u64>,
    pub eps: Option<ExactScalar>,
    pub delta: Option<ExactScalar>,
    pub search_bound: Option<u64>,
}

pub fn solve(p: &Problem) -> Result<(SolveReport, i32)> {
    let c = classify_problem(p)?;
    let bundle = c.bundle();
    let (map, source) = match (&p.eps, &p.delta) {
        (None, None) => match build_main_theorem_g(&c) {
            Ok(g) => (g, "fixed-point-free witness".to_string()),
            Err(CoreError::ConditionsNotMet(why)) => {
                let params = AffineParams::from_map(&c.map(), ExactScalar::zero(), ExactScalar::zero())?;
                (WitnessMap::Affine(params), format!("eps = delta = 0 ({why})"))
            }
            Err(e) => return Err(e.into()),
        },
        (eps, delta) => {
            let eps = eps.clone().unwrap_or_else(ExactScalar::zero);
            let delta = delta.clone().unwrap_or_else(ExactScalar::zero);
            if c.case_tag == CaseTag::I {
                (build_case_one_g(&c, eps, delta)?, "user eps, delta (two-piece translation)".to_string())
            } else {
                let params = AffineParams::from_map(&c.map(), eps, delta)?;
                if !check_gluing(c.case_tag, &bundle, &params, 1) {
                    return Err(CoreError::GluingViolation(format!(
                        "eps = {}, delta = {} in case {}",
                        params.eps, params.delta, c.case_tag
                    ))
                    .into());
                }
                (WitnessMap::Affine(params), "user eps, delta".to_string())
            }
        }
    };
    let gluing_ok = match &map {
        WitnessMap::Affine(params) => check_gluing(c.case_tag, &bundle, params, p.n),
        WitnessMap::TwoPiece(_) => map.descends(&c.a1),
    };
    let outcome = map.find_periodic(p.n)?;
    if let PeriodicOutcome::Solution(sol) = &outcome {
        if !map.verify_solution(sol)? {
            bail!("internal error: solution failed substitution check");
        }
    }
    let window_check = match &map {
        WitnessMap::Affine(params) => {
            let hit = window_scan(params, p.n, p.search_bound);
            let consistent = !(outcome.is_proven_empty() && hit.is_some());
            Some(WindowCheck {
                search_bound: p.search_bound,
                hit: hit.map(|h| (h.a.to_string(), h.b.to_string())),
                consistent,
            })
        }
        WitnessMap::TwoPiece(_) => None,
    };
    let code = if window_check.as_ref().map_or(true, |w| w.consistent) { exit::OK } else { exit::VERIFICATION_FAILED };
    Ok((SolveReport { schema: SOLVE_SCHEMA.into(), case: c.case_tag, n: p.n, source, map, gluing_ok, outcome, window_check }, code))
}

pub fn render_solve(r: &SolveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "case {}, n = {}, map from {}", r.case, r.n, r.source);
    match &r.map {
        WitnessMap::Affine(p) => {
            let _ = writeln!(s, "affine: b3 = {}, b4 = {}, c1 = {}, c2 = {}, eps = {}, delta = {}", p.b3, p.b4, p.c1, p.c2, p.eps, p.delta);
        }
        WitnessMap::TwoPiece(g) => {
            let _ = writeln!(s, "two-piece: b3 = {}, e(0) = ({}, {}), e(1) = ({}, {})", g.b3, g.e0[0], g.e0[1], g.e1[0], g.e1[1]);
        }
    }
    let _ = writeln!(s, "gluing check at n = {}: {}", r.n, if r.gluing_ok { "ok" } else { "fails" });
    match &r.outcome {
        PeriodicOutcome::Solution(sol) => {
            let pt = &sol.point;
            let _ = writeln!(s, "solution: x = {}, y = {}, t = {}, lifts a = {}, b = {}", pt.x, pt.y, pt.t, sol.a, sol.b);
            if sol.degenerate {
                let _ = writeln!(s, "  (degenerate: every point of the piece is periodic)");
            }
        }
        PeriodicOutcome::ProvenEmpty(proof) => {
            let _ = writeln!(s, "proven_empty ({:?}): {}", proof.kind, proof.detail);
        }
        PeriodicOutcome::NoneFound { search_bound } => {
            let _ = writeln!(s, "none_found within |a|, |b| <= {search_bound}");
        }
    }
    if let Some(w) = &r.window_check {
        let hit = w.hit.as_ref().map_or("none".to_string(), |(a, b)| format!("({a}, {b})"));
        let _ = writeln!(s, "window cross-check (bound {}): first lift {hit}, {}", w.search_bound, if w.consistent { "consistent" } else { "INCONSISTENT" });
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyEnvelope {
    pub schema: String,
    #[serde(flatten)]
    pub report: VerifyReport,
}

pub fn run_verify(seed: u64, trials: u64) -> (VerifyEnvelope, i32) {
    let report = verify::run(&VerifyConfig { seed, trials, fault: None });
    let code = if report.passed { exit::OK } else { exit::VERIFICATION_FAILED };
    (VerifyEnvelope { schema: VERIFY_SCHEMA.into(), report }, code)
}

pub fn render_verify(e: &VerifyEnvelope) -> String {
    let r = &e.report;
    let mut s = String::new();
    for suite in &r.suites {
        let _ = writeln!(s, "{:<20} {:>6} checks {:>4} failures", suite.suite, suite.checks, suite.failures);
    }
    for cx in &r.counterexamples {
        let input: Vec<String> = cx.input.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "counterexample in {}: {} -> {}", cx.suite, input.join(" "), cx.detail);
    }
    let _ = writeln!(s, "{}: {} checks, seed {}", if r.passed { "PASS" } else { "FAIL" }, r.checks, r.seed);
    s
}

fn output<T: Serialize>(report: &T, text: String, exit_code: i32) -> Result<CommandOutput> {
    Ok(CommandOutput { json: serde_json::to_string_pretty(report)?, text, exit_code })
}

pub fn cmd_analyze(p: &Problem) -> Result<CommandOutput> {
    let (report, code) = analyze(p)?;
    output(&report, render_analyze(&report), code)
}

pub fn cmd_solve(p: &Problem) -> Result<CommandOutput> {
    let (report, code) = solve(p)?;
    output(&report, render_solve(&report), code)
}

pub fn cmd_verify(seed: u64, trials: u64) -> Result<CommandOutput> {
    let (report, code) = run_verify(seed, trials);
    output(&report, render_verify(&report), code)
}

pub fn apply_overrides(mut p: Problem, o: &SolveOverrides) -> Result<Problem> {
    if let Some(n) = o.n {
        if n == 0 {
            bail!("--n must be a positive integer");
        }
        p.n = n;
    }
    if o.eps.is_some() {
        p.eps = o.eps.clone();
    }
    if o.delta.is_some() {
        p.delta = o.delta.clone();
    }
    if let Some(b) = o.search_bound {
        p.search_bound = b;
    }
    Ok(p)
}
