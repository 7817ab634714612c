//! Self-describing report documents and their renderings.
//!
//! Every document echoes the tool version, the run configuration and the
//! ring, and states whether all emitted filtrations validated. Field order is
//! fixed and all maps are ordered, so identical inputs render identically.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::closure::{Facet, NewtonPolyhedron};
use crate::decomposition::MonomialPrime;
use crate::epsilon::{BoundVerdict, EpsilonEstimate};
use crate::filtration::{CmCertificate, MultiplicityLedger, PrimeFiltration};
use crate::powers::{AssStability, GrowthFit, PowersReport, Stability};
use crate::ring::{MonomialIdeal, RingContext};
use crate::superficial::{SuperficialCertificate, TermKind};

pub const TOOL: &str = "powerfilt";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// The command-specific part of a document.
pub trait Section: Serialize {
    fn valid(&self) -> bool {
        true
    }
    fn human(&self, out: &mut String);
    fn table(&self) -> (Vec<&'static str>, Vec<Vec<String>>);
}

#[derive(Serialize)]
pub struct Document<'a, C: Serialize, S: Section> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub variables: &'a [String],
    pub ideal: String,
    pub valid: bool,
    pub result: S,
}

impl<'a, C: Serialize, S: Section> Document<'a, C, S> {
    pub fn new(command: &'a str, config: &'a C, ctx: &'a RingContext, ideal: &MonomialIdeal, result: S) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            config,
            variables: ctx.names(),
            ideal: ctx.format_ideal(ideal),
            valid: result.valid(),
            result,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
                s.push('\n');
                s
            }
            Format::Human => {
                let mut out = String::new();
                let _ = writeln!(out, "{TOOL} {VERSION} — {}", self.command);
                let _ = writeln!(out, "ring   k[{}]", self.variables.join(","));
                let _ = writeln!(out, "ideal  {}", self.ideal);
                let _ = writeln!(out, "valid  {}", if self.valid { "yes" } else { "NO" });
                out.push('\n');
                self.result.human(&mut out);
                out
            }
            Format::Csv => {
                let (header, rows) = self.result.table();
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&header).expect("in-memory write");
                for r in rows {
                    w.write_record(&r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 records")
            }
        }
    }
}

/// A prime as its sorted variable names; displayed as `(x,y)`, the zero
/// prime as `(0)`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq, PartialOrd, Ord)]
#[serde(transparent)]
pub struct PrimeDoc(pub Vec<String>);

impl fmt::Display for PrimeDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("(0)")
        } else {
            write!(f, "({})", self.0.join(","))
        }
    }
}

pub fn prime_name(ctx: &RingContext, p: &MonomialPrime) -> PrimeDoc {
    PrimeDoc(p.names(ctx))
}

fn prime_list(ctx: &RingContext, set: &BTreeSet<MonomialPrime>) -> Vec<PrimeDoc> {
    set.iter().map(|p| prime_name(ctx, p)).collect()
}

fn braces<T: fmt::Display>(items: &[T]) -> String {
    format!("{{{}}}", items.iter().map(T::to_string).collect::<Vec<_>>().join(", "))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LedgerEntry {
    pub prime: PrimeDoc,
    pub multiplicity: u64,
}

fn ledger_doc(ctx: &RingContext, l: &MultiplicityLedger) -> Vec<LedgerEntry> {
    l.iter().map(|(p, &c)| LedgerEntry { prime: prime_name(ctx, p), multiplicity: c }).collect()
}

fn ledger_text(entries: &[LedgerEntry]) -> String {
    let parts: Vec<String> = entries.iter().map(|e| format!("{}:{}", e.prime, e.multiplicity)).collect();
    braces(&parts)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StepDoc {
    pub step: usize,
    pub witness: String,
    pub prime: PrimeDoc,
}

pub fn steps_doc(ctx: &RingContext, f: &PrimeFiltration) -> Vec<StepDoc> {
    f.steps()
        .iter()
        .enumerate()
        .map(|(k, s)| StepDoc { step: k, witness: ctx.format_monomial(&s.witness), prime: prime_name(ctx, &s.prime) })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CertificateDoc {
    pub x: String,
    pub m: u32,
    pub c: u32,
    #[serde(rename = "N")]
    pub colon_threshold: u32,
    pub verified_to: u32,
}

impl CertificateDoc {
    pub fn new(ctx: &RingContext, cert: &SuperficialCertificate) -> Self {
        Self {
            x: ctx.format_monomial(&cert.element),
            m: cert.order,
            c: cert.c,
            colon_threshold: cert.colon_threshold,
            verified_to: cert.verified_to,
        }
    }

    fn text(&self) -> String {
        format!(
            "x = {}, order {}, c = {}, N = {}, verified to n = {}",
            self.x, self.m, self.c, self.colon_threshold, self.verified_to
        )
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PerNDoc {
    pub n: u32,
    pub digest: String,
    pub steps: usize,
    pub primes: Vec<PrimeDoc>,
    pub ledger: Vec<LedgerEntry>,
    pub ass: Vec<PrimeDoc>,
    pub fallback: bool,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filtration: Option<Vec<StepDoc>>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StabilityDoc {
    Stable { primes: Vec<PrimeDoc>, onset: u32, window: usize },
    Periodic { period: u32, onset: u32, window: usize },
    NotDetected,
}

impl StabilityDoc {
    fn new(ctx: &RingContext, s: &Stability) -> Self {
        match s {
            Stability::Stable { primes, onset, window } => {
                StabilityDoc::Stable { primes: prime_list(ctx, primes), onset: *onset, window: *window }
            }
            Stability::Periodic { period, onset, window } => {
                StabilityDoc::Periodic { period: *period, onset: *onset, window: *window }
            }
            Stability::NotDetected => StabilityDoc::NotDetected,
        }
    }

    fn text(&self) -> String {
        match self {
            StabilityDoc::Stable { primes, onset, window } => {
                format!("stable from n = {onset} (window {window}): {}", braces(primes))
            }
            StabilityDoc::Periodic { period, onset, window } => {
                format!("periodic with period {period} from n = {onset} (window {window})")
            }
            StabilityDoc::NotDetected => "not detected".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GrowthDoc {
    pub prime: PrimeDoc,
    pub exponent: Option<f64>,
    /// Set when there were too few points for a fit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insufficient_points: Option<usize>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RecurrenceDoc {
    pub nodes_checked: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PowersDoc {
    pub terms: TermKind,
    pub mode: &'static str,
    pub n_max: u32,
    pub lambda: Vec<PrimeDoc>,
    pub lambda_stable: StabilityDoc,
    pub growth: Vec<GrowthDoc>,
    pub superficial: Option<CertificateDoc>,
    pub fallbacks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<RecurrenceDoc>,
    pub per_n: Vec<PerNDoc>,
}

impl PowersDoc {
    pub fn new(ctx: &RingContext, r: &PowersReport, with_steps: bool) -> Self {
        Self {
            terms: r.kind,
            mode: r.mode.as_str(),
            n_max: r.n_max,
            lambda: prime_list(ctx, &r.lambda),
            lambda_stable: StabilityDoc::new(ctx, &r.stability),
            growth: r
                .growth
                .iter()
                .map(|(p, g)| GrowthDoc {
                    prime: prime_name(ctx, p),
                    exponent: g.exponent(),
                    insufficient_points: match g {
                        GrowthFit::InsufficientData { points } => Some(*points),
                        GrowthFit::Exponent(_) => None,
                    },
                })
                .collect(),
            superficial: r.superficial.as_ref().map(|c| CertificateDoc::new(ctx, c)),
            fallbacks: r.fallbacks(),
            recurrence: r
                .recurrence
                .as_ref()
                .map(|c| RecurrenceDoc { nodes_checked: c.checked, violations: c.violations.len() }),
            per_n: r
                .per_n
                .iter()
                .map(|row| PerNDoc {
                    n: row.n,
                    digest: row.digest.clone(),
                    steps: row.filtration.len(),
                    primes: prime_list(ctx, &row.primes),
                    ledger: ledger_doc(ctx, &row.ledger),
                    ass: prime_list(ctx, &row.ass),
                    fallback: row.fallback,
                    valid: row.valid,
                    filtration: with_steps.then(|| steps_doc(ctx, &row.filtration)),
                })
                .collect(),
        }
    }

    fn write_human(&self, out: &mut String) {
        let _ = writeln!(out, "mode {} ({:?} terms), n = 1..{}", self.mode, self.terms, self.n_max);
        if let Some(c) = &self.superficial {
            let _ = writeln!(out, "superficial element: {}", c.text());
        } else {
            let _ = writeln!(out, "superficial element: none within bounds");
        }
        let _ = writeln!(out, "Λ = {}", braces(&self.lambda));
        let _ = writeln!(out, "prime sets: {}", self.lambda_stable.text());
        let _ = writeln!(out, "fallbacks: {}", self.fallbacks);
        if let Some(r) = &self.recurrence {
            let _ = writeln!(out, "recurrence: {} glued nodes, {} violations", r.nodes_checked, r.violations);
        }
        for g in &self.growth {
            match g.exponent {
                Some(e) => {
                    let _ = writeln!(out, "growth {}: n^{e:.3}", g.prime);
                }
                None => {
                    let _ = writeln!(out, "growth {}: insufficient data", g.prime);
                }
            }
        }
        let _ = writeln!(out, "\n{:>4}  {:>6}  {:<16}  {:<5}  {:<40}  ass", "n", "steps", "digest", "valid", "ledger");
        for row in &self.per_n {
            let flag = if row.fallback { " (fallback)" } else { "" };
            let _ = writeln!(
                out,
                "{:>4}  {:>6}  {:<16}  {:<5}  {:<40}  {}{flag}",
                row.n,
                row.steps,
                row.digest,
                row.valid,
                ledger_text(&row.ledger),
                braces(&row.ass)
            );
            if let Some(steps) = &row.filtration {
                for s in steps {
                    let _ = writeln!(out, "        {:>3}. {} -> {}", s.step, s.witness, s.prime);
                }
            }
        }
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.per_n
            .iter()
            .flat_map(|row| {
                row.ledger.iter().map(move |e| vec![row.n.to_string(), e.prime.to_string(), e.multiplicity.to_string()])
            })
            .collect()
    }
}

impl Section for PowersDoc {
    fn valid(&self) -> bool {
        self.per_n.iter().all(|r| r.valid) && self.recurrence.as_ref().is_none_or(|r| r.violations == 0)
    }

    fn human(&self, out: &mut String) {
        self.write_human(out)
    }

    fn table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        (vec!["n", "prime", "multiplicity"], self.rows())
    }
}

/// One or both construction modes.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PowersRuns {
    pub runs: Vec<PowersDoc>,
}

impl Section for PowersRuns {
    fn valid(&self) -> bool {
        self.runs.iter().all(Section::valid)
    }

    fn human(&self, out: &mut String) {
        for (k, r) in self.runs.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            r.write_human(out);
        }
    }

    fn table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let single = self.runs.len() == 1;
        let mut rows = Vec::new();
        for r in &self.runs {
            for mut row in r.rows() {
                if !single {
                    row.insert(0, r.mode.to_string());
                }
                rows.push(row);
            }
        }
        let header =
            if single { vec!["n", "prime", "multiplicity"] } else { vec!["mode", "n", "prime", "multiplicity"] };
        (header, rows)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AssRow {
    pub n: u32,
    pub ass: Vec<PrimeDoc>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AssDoc {
    pub n_max: u32,
    pub window: usize,
    pub union: Vec<PrimeDoc>,
    pub onset: Option<u32>,
    pub per_n: Vec<AssRow>,
}

impl AssDoc {
    pub fn new(ctx: &RingContext, s: &AssStability, n_max: u32, window: usize) -> Self {
        Self {
            n_max,
            window,
            union: prime_list(ctx, &s.union),
            onset: s.onset,
            per_n: s.per_n.iter().map(|(n, set)| AssRow { n: *n, ass: prime_list(ctx, set) }).collect(),
        }
    }
}

impl Section for AssDoc {
    fn human(&self, out: &mut String) {
        let _ = writeln!(out, "union of Ass(R/I^n), n = 1..{}: {}", self.n_max, braces(&self.union));
        match self.onset {
            Some(n) => {
                let _ = writeln!(out, "stable from n = {n} (window {})", self.window);
            }
            None => {
                let _ = writeln!(out, "stability not detected (window {})", self.window);
            }
        }
        for r in &self.per_n {
            let _ = writeln!(out, "{:>4}  {}", r.n, braces(&r.ass));
        }
    }

    fn table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows =
            self.per_n.iter().flat_map(|r| r.ass.iter().map(move |p| vec![r.n.to_string(), p.to_string()])).collect();
        (vec!["n", "prime"], rows)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ColonRow {
    pub n: u32,
    pub colon_identity: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SuperficialDoc {
    pub order_max: u32,
    pub c_max: u32,
    pub n_max: u32,
    pub certificate: Option<CertificateDoc>,
    /// Recomputation of both identities from scratch.
    pub reverified: bool,
    pub colon: Vec<ColonRow>,
    /// Largest `k` with `I^n ⊆ I^k`, per `n`; `null` when unbounded.
    pub cofinality: Vec<Option<u32>>,
}

impl Section for SuperficialDoc {
    fn valid(&self) -> bool {
        self.certificate.is_none() || self.reverified
    }

    fn human(&self, out: &mut String) {
        let _ = writeln!(out, "search: order ≤ {}, c ≤ {}, n ≤ {}", self.order_max, self.c_max, self.n_max);
        match &self.certificate {
            Some(c) => {
                let _ = writeln!(out, "certificate: {}", c.text());
                let _ = writeln!(out, "re-verified: {}", self.reverified);
            }
            None => {
                let _ = writeln!(out, "no monomial superficial element within bounds");
            }
        }
        if !self.colon.is_empty() {
            let failing: Vec<String> =
                self.colon.iter().filter(|r| !r.colon_identity).map(|r| r.n.to_string()).collect();
            let _ = writeln!(out, "colon identity fails at n ∈ {}", braces(&failing));
        }
    }

    fn table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self.colon.iter().map(|r| vec![r.n.to_string(), r.colon_identity.to_string()]).collect();
        (vec!["n", "colon_identity"], rows)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PolyhedronDoc {
    pub vertices: Vec<Vec<u32>>,
    pub inequalities: Vec<Facet>,
}

impl PolyhedronDoc {
    pub fn new(np: &NewtonPolyhedron) -> Self {
        Self { vertices: np.vertices().to_vec(), inequalities: np.facets().to_vec() }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExponentDoc {
    Found { l: u32 },
    NotFound { l_max: u32, best_l: u32, verified_through: u32 },
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ClosureRow {
    pub n: u32,
    pub closure: String,
    pub equals_power: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ClosureDoc {
    pub polyhedron: PolyhedronDoc,
    pub denominator_bound: u64,
    pub noetherian_exponent: ExponentDoc,
    pub rees_constant: u32,
    pub closures: Vec<ClosureRow>,
    pub report: PowersDoc,
}

impl Section for ClosureDoc {
    fn valid(&self) -> bool {
        self.report.valid()
    }

    fn human(&self, out: &mut String) {
        let verts: Vec<String> = self.polyhedron.vertices.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "Newton polyhedron vertices: {}", verts.join(" "));
        for f in &self.polyhedron.inequalities {
            let _ = writeln!(out, "  {:?} · e >= {}", f.normal, f.rhs);
        }
        let _ = writeln!(out, "denominator bound: {}", self.denominator_bound);
        match &self.noetherian_exponent {
            ExponentDoc::Found { l } => {
                let _ = writeln!(out, "noetherian exponent: {l}");
            }
            ExponentDoc::NotFound { l_max, best_l, verified_through } => {
                let _ = writeln!(
                    out,
                    "noetherian exponent: none ≤ {l_max} (best l = {best_l}, through n = {verified_through})"
                );
            }
        }
        let _ = writeln!(out, "cofinality constant: {}", self.rees_constant);
        for r in &self.closures {
            let same = if r.equals_power { "" } else { "  (strictly larger than I^n)" };
            let _ = writeln!(out, "{:>4}  {}{same}", r.n, r.closure);
        }
        out.push('\n');
        self.report.write_human(out);
    }

    fn table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        (vec!["n", "prime", "multiplicity"], self.report.rows())
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LengthRow {
    pub n: u32,
    pub length: u64,
    pub normalized: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BoundRow {
    pub n: u32,
    pub length: u64,
    pub mu_max: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct EpsilonDoc {
    pub d: usize,
    pub n_max: u32,
    pub window: usize,
    pub estimate: f64,
    pub lengths: Vec<LengthRow>,
    pub bound_check: Vec<BoundRow>,
}

impl EpsilonDoc {
    pub fn new(e: &EpsilonEstimate, bound: &[BoundVerdict]) -> Self {
        Self {
            d: e.dim,
            n_max: e.n_max,
            window: e.window,
            estimate: e.estimate,
            lengths: e
                .lengths
                .iter()
                .zip(&e.normalized)
                .map(|(&(n, length), &normalized)| LengthRow { n, length, normalized })
                .collect(),
            bound_check: bound
                .iter()
                .map(|v| BoundRow { n: v.n, length: v.length, mu_max: v.bound, pass: v.pass })
                .collect(),
        }
    }
}

impl Section for EpsilonDoc {
    fn valid(&self) -> bool {
        self.bound_check.iter().all(|b| b.pass)
    }

    fn human(&self, out: &mut String) {
        let _ =
            writeln!(out, "ε estimate (max of d!·ℓ_n/n^d over the last {} indices): {:.6}", self.window, self.estimate);
        let _ = writeln!(out, "\n{:>4}  {:>10}  {:>10}", "n", "length", "normalized");
        for r in &self.lengths {
            let _ = writeln!(out, "{:>4}  {:>10}  {:>10.6}", r.n, r.length, r.normalized);
        }
        if !self.bound_check.is_empty() {
            let ok = self.bound_check.iter().filter(|b| b.pass).count();
            let _ = writeln!(out, "\nbound ℓ_n <= μ_m(n): {ok}/{} indices pass", self.bound_check.len());
        }
    }

    fn table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .lengths
            .iter()
            .map(|r| vec![r.n.to_string(), r.length.to_string(), format!("{}", r.normalized)])
            .collect();
        (vec!["n", "length", "normalized"], rows)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CmRow {
    pub n: u32,
    pub localized: Vec<LedgerEntry>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CmDoc {
    pub f: String,
    pub dim: usize,
    pub minh: Vec<PrimeDoc>,
    pub contain: Vec<PrimeDoc>,
    pub verdicts: Vec<CmRow>,
}

impl CmDoc {
    pub fn new(ctx: &RingContext, c: &CmCertificate) -> Self {
        Self {
            f: ctx.format_monomial(&c.f),
            dim: c.dim,
            minh: prime_list(ctx, &c.minh),
            contain: prime_list(ctx, &c.contain),
            verdicts: c
                .verdicts
                .iter()
                .map(|v| CmRow { n: v.n, localized: ledger_doc(ctx, &v.localized), pass: v.pass })
                .collect(),
        }
    }
}

impl Section for CmDoc {
    fn valid(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    fn human(&self, out: &mut String) {
        let _ = writeln!(out, "f = {}", self.f);
        let _ = writeln!(
            out,
            "dim R/I = {}, Minh = {}, f ∈ every prime of {}",
            self.dim,
            braces(&self.minh),
            braces(&self.contain)
        );
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "{:>4}  {:<40}  {}",
                v.n,
                ledger_text(&v.localized),
                if v.pass { "pass" } else { "FAIL" }
            );
        }
    }

    fn table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .verdicts
            .iter()
            .flat_map(|v| {
                v.localized.iter().map(move |e| vec![v.n.to_string(), e.prime.to_string(), e.multiplicity.to_string()])
            })
            .collect();
        (vec!["n", "prime", "multiplicity"], rows)
    }
}
