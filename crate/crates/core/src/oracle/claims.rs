//! Quantified claims about perfect recall, each checked frame by frame over
//! an enumerated hypothesis class.

use std::fmt;

use super::enumerate::{EnumBounds, FramePos, Plan, RelationFilter};
use super::morphism;
use super::OracleError;
use crate::bits;
use crate::document::frame_json_line;
use crate::fixtures;
use crate::frame::{Frame, HistoryId};
use crate::logic::{self, Formula};
use crate::recall;
use crate::relations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClaimId {
    S5ExperienceIffConsistency,
    SynchronousS5AllEquivalent,
    S5TreeWsprBetween,
    LocalImpliesConsistency,
    S5ConsistencyIffLocal,
    LocalIffStarValid,
    S5PrIffStarValid,
    S5SprIffAxiomValid,
    IntrospectiveImagesDisjointOrEqual,
    ExperienceImpliesIntrospective,
    ClosureLocalIffExperience,
    LocalImpliesPersistentInsanity,
    IntrospectiveTreePrIffLocal,
    AccessAlongHistory,
    Flashlight,
    TreeClosureKeepsLocal,
    PrNotDefinable,
    ForestClosureKeepsLocal,
    ForestPrIffLocal,
    ClosureIsSymmetricReflexive,
    SprImpliesSynchronous,
}

/// Which frames a claim quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Any,
    Trees,
    Forests,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    All,
    Introspective,
    S5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hypothesis {
    pub base: Base,
    pub shape: Shape,
}

struct ClaimInfo {
    id: ClaimId,
    key: &'static str,
    slug: &'static str,
    statement: &'static str,
    hypothesis: Hypothesis,
}

const fn info(
    id: ClaimId,
    key: &'static str,
    slug: &'static str,
    statement: &'static str,
    base: Base,
    shape: Shape,
) -> ClaimInfo {
    ClaimInfo {
        id,
        key,
        slug,
        statement,
        hypothesis: Hypothesis { base, shape },
    }
}

use Base::{All, Introspective, S5};
use ClaimId::*;
use Shape::{Any, Forests, Trees};

const CLAIMS: &[ClaimInfo] = &[
    info(
        S5ExperienceIffConsistency,
        "prop1",
        "s5-ee-iff-hc",
        "S5: pr_ee <-> pr_hc",
        S5,
        Any,
    ),
    info(
        SynchronousS5AllEquivalent,
        "prop2",
        "sync-s5-equivalent",
        "synchronous S5: pr_ee = pr_hc = spr = wspr",
        S5,
        Any,
    ),
    info(
        S5TreeWsprBetween,
        "prop3",
        "s5-tree-wspr-between",
        "S5 trees: spr -> wspr -> pr_hc",
        S5,
        Trees,
    ),
    info(
        LocalImpliesConsistency,
        "lem4",
        "hcl-implies-hc",
        "pr_hcl -> pr_hc",
        All,
        Any,
    ),
    info(
        S5ConsistencyIffLocal,
        "prop5",
        "s5-hc-iff-hcl",
        "S5: pr_hc <-> pr_hcl and pr <-> pr_hcl",
        S5,
        Any,
    ),
    info(
        LocalIffStarValid,
        "thm6",
        "hcl-iff-star",
        "pr_hcl <-> star valid for every event",
        All,
        Any,
    ),
    info(
        S5PrIffStarValid,
        "cor6",
        "s5-pr-iff-star",
        "S5: pr <-> star valid for every event, and pr = pr_hc",
        S5,
        Any,
    ),
    info(
        S5SprIffAxiomValid,
        "prop7",
        "s5-spr-iff-axiom",
        "S5: spr <-> dia L p -> L dia p valid",
        S5,
        Any,
    ),
    info(
        IntrospectiveImagesDisjointOrEqual,
        "fact8",
        "introspective-images",
        "introspective: intersecting images are equal",
        Introspective,
        Any,
    ),
    info(
        ExperienceImpliesIntrospective,
        "prop9",
        "ee-implies-introspective",
        "pr_ee -> introspective",
        All,
        Any,
    ),
    info(
        ClosureLocalIffExperience,
        "prop10",
        "closure-hcl-iff-ee",
        "introspective, persistent insanity: pr_ee <-> closure has pr_hcl",
        Introspective,
        Any,
    ),
    info(
        LocalImpliesPersistentInsanity,
        "rem11",
        "hcl-implies-persistent-insanity",
        "pr_hcl -> persistent insanity",
        All,
        Any,
    ),
    info(
        IntrospectiveTreePrIffLocal,
        "thm12",
        "introspective-tree-pr-iff-hcl",
        "introspective trees: pr <-> pr_hcl",
        Introspective,
        Trees,
    ),
    info(
        AccessAlongHistory,
        "obs13",
        "access-along-history",
        "introspective, pr_hcl: h1 <= h2, h1 ~ h2, h1' <= h1 give h2' <= h2 with h1' ~ h2'",
        Introspective,
        Any,
    ),
    info(
        Flashlight,
        "lem14",
        "flashlight",
        "introspective, pr_hcl: h1 ~ h2, h1 ~ h2', h2' <= h <= h2 give h1 ~s5 h",
        Introspective,
        Any,
    ),
    info(
        TreeClosureKeepsLocal,
        "lem15",
        "tree-closure-keeps-hcl",
        "introspective trees with pr_hcl: closure has pr_hcl",
        Introspective,
        Trees,
    ),
    info(
        PrNotDefinable,
        "prop16",
        "pr-not-definable",
        "fixture pair: source has pr, target lacks pr, bounded morphism between them",
        All,
        Forests,
    ),
    info(
        ForestClosureKeepsLocal,
        "lem17",
        "forest-closure-keeps-hcl",
        "introspective initially synchronous forests with pr_hcl: closure has pr_hcl",
        Introspective,
        Forests,
    ),
    info(
        ForestPrIffLocal,
        "thm18",
        "forest-pr-iff-hcl",
        "introspective initially synchronous forests: pr <-> pr_hcl",
        Introspective,
        Forests,
    ),
    info(
        ClosureIsSymmetricReflexive,
        "fn7",
        "closure-is-local",
        "introspective: S5 closure = symmetric-reflexive closure",
        Introspective,
        Any,
    ),
    info(
        SprImpliesSynchronous,
        "spr-sync",
        "spr-implies-synchronous",
        "spr -> synchronous",
        All,
        Any,
    ),
];

impl ClaimId {
    fn info(self) -> &'static ClaimInfo {
        CLAIMS.iter().find(|c| c.id == self).expect("every claim is listed")
    }

    pub fn all() -> impl Iterator<Item = ClaimId> {
        CLAIMS.iter().map(|c| c.id)
    }

    /// Short identifier accepted on the command line.
    pub fn key(self) -> &'static str {
        self.info().key
    }

    pub fn slug(self) -> &'static str {
        self.info().slug
    }

    pub fn statement(self) -> &'static str {
        self.info().statement
    }

    pub fn hypothesis(self) -> Hypothesis {
        self.info().hypothesis
    }

    /// Accepts either the short key or the descriptive slug.
    pub fn parse(s: &str) -> Result<ClaimId, OracleError> {
        CLAIMS
            .iter()
            .find(|c| c.key == s || c.slug == s)
            .map(|c| c.id)
            .ok_or_else(|| OracleError::UnknownClaim(s.to_string()))
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Result of checking one claim on one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// The frame is outside the claim's preconditions.
    Skipped,
    Held,
    Violated(String),
}

/// Per-frame facts shared by all claims evaluated in one pass.
pub struct Facts<'a> {
    frame: &'a Frame,
    axioms: &'a Axioms,
    ee: Option<bool>,
    hc: Option<bool>,
    hcl: Option<bool>,
    spr: Option<bool>,
    wspr: Option<bool>,
    closure: Option<Frame>,
    closure_hcl: Option<bool>,
    introspective: Option<bool>,
    synchronous: Option<bool>,
    insanity: Option<bool>,
    initially_synchronous: Option<bool>,
}

/// Axiom instances for the enumeration alphabet, built once per sweep.
pub struct Axioms {
    star: Vec<Formula>,
    spr: Formula,
    limit: u64,
}

impl Axioms {
    pub fn for_frame(frame: &Frame, limit: u64) -> Axioms {
        let a = frame.alphabet();
        Axioms {
            star: a
                .ids()
                .map(|e| logic::star_axiom(e, a).expect("event in alphabet"))
                .collect(),
            spr: logic::spr_axiom(a),
            limit,
        }
    }
}

macro_rules! cached {
    ($name:ident, $field:ident, $eval:expr) => {
        fn $name(&mut self) -> bool {
            if let Some(v) = self.$field {
                return v;
            }
            let f: fn(&Frame) -> bool = $eval;
            let v = f(self.frame);
            self.$field = Some(v);
            v
        }
    };
}

impl<'a> Facts<'a> {
    pub fn new(frame: &'a Frame, axioms: &'a Axioms) -> Self {
        Facts {
            frame,
            axioms,
            ee: None,
            hc: None,
            hcl: None,
            spr: None,
            wspr: None,
            closure: None,
            closure_hcl: None,
            introspective: None,
            synchronous: None,
            insanity: None,
            initially_synchronous: None,
        }
    }

    cached!(ee, ee, recall::pr_ee);
    cached!(hc, hc, recall::pr_hc);
    cached!(hcl, hcl, recall::pr_hcl);
    cached!(spr, spr, recall::spr);
    cached!(wspr, wspr, recall::wspr);
    cached!(introspective, introspective, relations::is_introspective);
    cached!(synchronous, synchronous, relations::is_synchronous);
    cached!(insanity, insanity, relations::persistent_insanity);
    cached!(
        initially_synchronous,
        initially_synchronous,
        relations::initially_synchronous
    );

    fn combined(&mut self) -> bool {
        self.hcl() && self.ee()
    }

    fn closure(&mut self) -> &Frame {
        if self.closure.is_none() {
            self.closure = Some(relations::s5_closure(self.frame));
        }
        self.closure.as_ref().expect("just computed")
    }

    fn closure_hcl(&mut self) -> bool {
        if let Some(v) = self.closure_hcl {
            return v;
        }
        let v = recall::pr_hcl(self.closure());
        self.closure_hcl = Some(v);
        v
    }

    /// First event whose (★) instance has a countermodel.
    fn star_failure(&self) -> Result<Option<usize>, OracleError> {
        for (i, f) in self.axioms.star.iter().enumerate() {
            if !logic::valid_on_frame_with_limit(self.frame, f, self.axioms.limit)?.valid {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn spr_axiom_valid(&self) -> Result<bool, OracleError> {
        Ok(logic::valid_on_frame_with_limit(self.frame, &self.axioms.spr, self.axioms.limit)?.valid)
    }
}

fn flags(pairs: &[(&str, bool)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn implication(premise: bool, conclusion: impl FnOnce() -> bool, detail: impl FnOnce() -> String) -> Outcome {
    if premise && !conclusion() {
        Outcome::Violated(detail())
    } else {
        Outcome::Held
    }
}

fn equal(pairs: &[(&str, bool)]) -> Outcome {
    if pairs.windows(2).all(|w| w[0].1 == w[1].1) {
        Outcome::Held
    } else {
        Outcome::Violated(flags(pairs))
    }
}

fn show(frame: &Frame, hs: &[HistoryId]) -> String {
    let parts: Vec<String> = hs.iter().map(|&h| frame.display(h).to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Evaluates `claim` on one frame of its hypothesis class.
pub fn evaluate(claim: ClaimId, facts: &mut Facts<'_>) -> Result<Outcome, OracleError> {
    let frame = facts.frame;
    let out = match claim {
        S5ExperienceIffConsistency => {
            let (ee, hc) = (facts.ee(), facts.hc());
            equal(&[("pr_ee", ee), ("pr_hc", hc)])
        }
        SynchronousS5AllEquivalent => {
            if !facts.synchronous() {
                return Ok(Outcome::Skipped);
            }
            equal(&[
                ("pr_ee", facts.ee()),
                ("pr_hc", facts.hc()),
                ("spr", facts.spr()),
                ("wspr", facts.wspr()),
            ])
        }
        S5TreeWsprBetween => {
            let (spr, wspr) = (facts.spr(), facts.wspr());
            if spr && !wspr {
                Outcome::Violated("spr=true wspr=false".into())
            } else {
                implication(wspr, || facts.hc(), || "wspr=true pr_hc=false".into())
            }
        }
        LocalImpliesConsistency => {
            let hcl = facts.hcl();
            implication(hcl, || facts.hc(), || "pr_hcl=true pr_hc=false".into())
        }
        S5ConsistencyIffLocal => {
            let (hc, hcl, pr) = (facts.hc(), facts.hcl(), facts.combined());
            equal(&[("pr_hc", hc), ("pr_hcl", hcl), ("pr", pr)])
        }
        LocalIffStarValid => {
            let hcl = facts.hcl();
            let failing = facts.star_failure()?;
            match (hcl, failing) {
                (true, Some(e)) => Outcome::Violated(format!(
                    "pr_hcl=true star[{}] invalid",
                    frame.event_name(crate::EventId::from_index(e))
                )),
                (false, None) => Outcome::Violated("pr_hcl=false star valid for every event".into()),
                _ => Outcome::Held,
            }
        }
        S5PrIffStarValid => {
            let (pr, hc) = (facts.combined(), facts.hc());
            let star = facts.star_failure()?.is_none();
            equal(&[("pr", pr), ("star_valid", star), ("pr_hc", hc)])
        }
        S5SprIffAxiomValid => {
            let spr = facts.spr();
            let valid = facts.spr_axiom_valid()?;
            equal(&[("spr", spr), ("spr_axiom_valid", valid)])
        }
        IntrospectiveImagesDisjointOrEqual => {
            let mut found = None;
            'outer: for a in frame.histories() {
                for b in frame.histories().skip(a.index() + 1) {
                    let (ra, rb) = (frame.row(a), frame.row(b));
                    if bits::intersects(ra, rb) && ra != rb {
                        found = Some((a, b));
                        break 'outer;
                    }
                }
            }
            match found {
                Some((a, b)) => Outcome::Violated(format!("images of {} intersect but differ", show(frame, &[a, b]))),
                None => Outcome::Held,
            }
        }
        ExperienceImpliesIntrospective => {
            let ee = facts.ee();
            implication(ee, || facts.introspective(), || "pr_ee=true introspective=false".into())
        }
        ClosureLocalIffExperience => {
            if !facts.insanity() {
                return Ok(Outcome::Skipped);
            }
            let (ee, closed) = (facts.ee(), facts.closure_hcl());
            equal(&[("pr_ee", ee), ("closure_pr_hcl", closed)])
        }
        LocalImpliesPersistentInsanity => {
            let hcl = facts.hcl();
            implication(
                hcl,
                || facts.insanity(),
                || "pr_hcl=true persistent_insanity=false".into(),
            )
        }
        IntrospectiveTreePrIffLocal | ForestPrIffLocal => {
            if claim == ForestPrIffLocal && !facts.initially_synchronous() {
                return Ok(Outcome::Skipped);
            }
            let (pr, hcl) = (facts.combined(), facts.hcl());
            equal(&[("pr", pr), ("pr_hcl", hcl)])
        }
        AccessAlongHistory => {
            if !facts.hcl() {
                return Ok(Outcome::Skipped);
            }
            access_along_history(frame)
        }
        Flashlight => {
            if !facts.hcl() {
                return Ok(Outcome::Skipped);
            }
            let closure = facts.closure().clone();
            flashlight(frame, &closure)
        }
        TreeClosureKeepsLocal | ForestClosureKeepsLocal => {
            if claim == ForestClosureKeepsLocal && !facts.initially_synchronous() {
                return Ok(Outcome::Skipped);
            }
            if !facts.hcl() {
                return Ok(Outcome::Skipped);
            }
            implication(
                true,
                || facts.closure_hcl(),
                || "pr_hcl=true closure_pr_hcl=false".into(),
            )
        }
        PrNotDefinable => return Ok(Outcome::Skipped),
        ClosureIsSymmetricReflexive => match relations::closure_is_symmetric_reflexive_only(frame) {
            Ok(true) => Outcome::Held,
            Ok(false) => Outcome::Violated("closure needs transitive steps".into()),
            Err(e) => Outcome::Violated(e.to_string()),
        },
        SprImpliesSynchronous => {
            let spr = facts.spr();
            implication(spr, || facts.synchronous(), || "spr=true synchronous=false".into())
        }
    };
    Ok(out)
}

fn access_along_history(frame: &Frame) -> Outcome {
    let p = frame.protocol();
    for h2 in frame.histories() {
        for &h1 in frame.prefixes(h2) {
            if !frame.accessible(h1, h2) {
                continue;
            }
            for &h1p in frame.prefixes(h1) {
                if !bits::intersects(frame.row(h1p), p.prefix_row(h2)) {
                    return Outcome::Violated(format!(
                        "h1={} h2={}: no prefix of h2 is accessible from {}",
                        frame.display(h1),
                        frame.display(h2),
                        frame.display(h1p)
                    ));
                }
            }
        }
    }
    Outcome::Held
}

fn flashlight(frame: &Frame, closure: &Frame) -> Outcome {
    let p = frame.protocol();
    for h1 in frame.histories() {
        for h2 in bits::ones(frame.row(h1)).map(HistoryId::from_index) {
            for h2p in frame.prefixes(h2).iter().copied().filter(|&x| frame.accessible(h1, x)) {
                for h in frame
                    .prefixes(h2)
                    .iter()
                    .copied()
                    .filter(|&x| bits::contains(p.desc_row(h2p), x.index()))
                {
                    if !closure.accessible(h1, h) {
                        return Outcome::Violated(format!("{} not in closure", show(frame, &[h1, h2, h2p, h])));
                    }
                }
            }
        }
    }
    Outcome::Held
}

/// A fixture that separates a claim from its converse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConverseCheck {
    pub fixture: &'static str,
    pub statement: &'static str,
    pub confirmed: bool,
}

pub fn converse_checks(claim: ClaimId) -> Vec<ConverseCheck> {
    let mut out = Vec::new();
    let mut add = |fixture: &'static str, statement: &'static str, confirmed: bool| {
        out.push(ConverseCheck {
            fixture,
            statement,
            confirmed,
        })
    };
    match claim {
        S5TreeWsprBetween => {
            let f = fixtures::fig1a();
            add(
                "fig1a",
                "pr_hc without wspr",
                recall::has_pr_hc(&f).holds && !recall::has_wspr(&f).holds,
            );
            let g = fixtures::fig1b();
            add(
                "fig1b",
                "forest wspr without pr",
                recall::has_wspr(&g).holds && !recall::has_pr_combined(&g).holds && !recall::has_pr_hc(&g).holds,
            );
        }
        LocalImpliesConsistency => {
            let f = fixtures::fig3d();
            add(
                "fig3d",
                "pr_hc without pr_hcl",
                recall::has_pr_hc(&f).holds && !recall::has_pr_hcl(&f).holds,
            );
        }
        ExperienceImpliesIntrospective => {
            let f = fixtures::fig4a();
            add(
                "fig4a",
                "introspective without pr_ee",
                relations::is_introspective(&f) && !recall::has_pr_ee(&f).holds,
            );
        }
        ClosureLocalIffExperience => {
            let f = fixtures::fig3a_pruned();
            add(
                "fig3a_pruned",
                "without persistent insanity: pr_ee but closure lacks pr_hcl",
                !relations::persistent_insanity(&f)
                    && recall::has_pr_ee(&f).holds
                    && !recall::has_pr_hcl(&relations::s5_closure(&f)).holds,
            );
        }
        ForestPrIffLocal => {
            let f = fixtures::fig4a();
            add(
                "fig4a",
                "not initially synchronous: pr_hcl without pr",
                !relations::initially_synchronous(&f)
                    && recall::has_pr_hcl(&f).holds
                    && !recall::has_pr_combined(&f).holds,
            );
        }
        _ => {}
    }
    out
}

/// Bounds actually swept for a claim: the hypothesis class narrows the
/// filter and the tree count.
pub fn effective_bounds(claim: ClaimId, bounds: &EnumBounds) -> Result<EnumBounds, OracleError> {
    let h = claim.hypothesis();
    let mut b = bounds.clone();
    b.filter = match (h.base, bounds.filter) {
        (Base::All, f) => f,
        (Base::Introspective, RelationFilter::S5) => RelationFilter::S5,
        (Base::Introspective, RelationFilter::All | RelationFilter::Introspective) => RelationFilter::Introspective,
        (Base::S5, RelationFilter::All | RelationFilter::S5 | RelationFilter::Introspective) => RelationFilter::S5,
        (_, other) => {
            return Err(OracleError::InvalidBounds(format!(
                "claim {claim} cannot be swept with filter {}",
                other.name()
            )))
        }
    };
    match h.shape {
        Shape::Any => {}
        Shape::Trees => {
            b.min_trees = 1;
            b.max_trees = 1;
        }
        Shape::Forests => {
            if b.max_trees < 2 {
                return Err(OracleError::InvalidBounds(format!(
                    "claim {claim} needs at least 2 trees"
                )));
            }
            b.min_trees = b.min_trees.max(2);
        }
    }
    Ok(b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub position: FramePos,
    pub detail: String,
    /// Single-line frame document that reproduces the violation.
    pub frame: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimReport {
    pub claim: ClaimId,
    pub bounds: EnumBounds,
    pub enumerated: u64,
    pub checked: u64,
    pub skipped: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub converse: Vec<ConverseCheck>,
}

impl ClaimReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0 && self.converse.iter().all(|c| c.confirmed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub workers: usize,
    /// Violations listed per claim; all are counted.
    pub max_listed: usize,
    /// Valuation guard for the axiom checks.
    pub valuation_limit: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            workers: 0,
            max_listed: 5,
            valuation_limit: logic::DEFAULT_VALUATION_LIMIT,
        }
    }
}

impl SweepOptions {
    fn workers(&self) -> usize {
        if self.workers == 0 {
            rayon::current_num_threads()
        } else {
            self.workers
        }
    }
}

#[derive(Default)]
struct Tally {
    enumerated: u64,
    per_claim: Vec<(u64, u64, u64, Vec<Violation>)>,
    error: Option<OracleError>,
}

pub fn verify_claim(claim: ClaimId, bounds: &EnumBounds) -> Result<ClaimReport, OracleError> {
    verify_claim_with(claim, bounds, &SweepOptions::default())
}

pub fn verify_claim_with(
    claim: ClaimId,
    bounds: &EnumBounds,
    options: &SweepOptions,
) -> Result<ClaimReport, OracleError> {
    Ok(verify_claims(&[claim], bounds, options)?.remove(0))
}

fn fixture_claim_report(claim: ClaimId, bounds: &EnumBounds) -> ClaimReport {
    let r = morphism::nondefinability_witness();
    let facts = [
        ("source_has_pr", r.source_has_pr),
        ("target_lacks_pr", !r.target_has_pr),
        ("morphism_valid", r.morphism_valid),
    ];
    let violations: Vec<Violation> = facts
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| Violation {
            position: FramePos {
                protocol: 0,
                relation: 0,
            },
            detail: format!("{name}=false"),
            frame: String::new(),
        })
        .collect();
    ClaimReport {
        claim,
        bounds: bounds.clone(),
        enumerated: 0,
        checked: facts.len() as u64,
        skipped: 0,
        violation_count: violations.len() as u64,
        violations,
        converse: Vec::new(),
    }
}

/// Checks several claims, with one sweep per distinct effective class.
/// Reports come back in the order the claims were given.
pub fn verify_claims(
    claims: &[ClaimId],
    bounds: &EnumBounds,
    options: &SweepOptions,
) -> Result<Vec<ClaimReport>, OracleError> {
    let mut groups: Vec<(EnumBounds, Vec<usize>)> = Vec::new();
    let mut reports: Vec<Option<ClaimReport>> = vec![None; claims.len()];
    for (i, &c) in claims.iter().enumerate() {
        if c == PrNotDefinable {
            reports[i] = Some(fixture_claim_report(c, bounds));
            continue;
        }
        let b = effective_bounds(c, bounds)?;
        match groups.iter_mut().find(|(gb, _)| *gb == b) {
            Some((_, members)) => members.push(i),
            None => groups.push((b, vec![i])),
        }
    }
    for (b, members) in groups {
        let plan = Plan::new(&b)?;
        let group: Vec<ClaimId> = members.iter().map(|&i| claims[i]).collect();
        let axioms = plan
            .protocols()
            .first()
            .map(|p| Axioms::for_frame(&Frame::empty_relation(p.clone()), options.valuation_limit));
        let Some(axioms) = axioms else {
            for (&i, &c) in members.iter().zip(&group) {
                reports[i] = Some(empty_report(c, &b));
            }
            continue;
        };
        let listed = options.max_listed;
        let tallies: Vec<Tally> = plan.sweep(options.workers(), |frame, pos, t: &mut Tally| {
            if t.error.is_some() {
                return;
            }
            if t.per_claim.is_empty() {
                t.per_claim = vec![(0, 0, 0, Vec::new()); group.len()];
            }
            t.enumerated += 1;
            let mut facts = Facts::new(frame, &axioms);
            for (k, &c) in group.iter().enumerate() {
                match evaluate(c, &mut facts) {
                    Ok(Outcome::Held) => t.per_claim[k].0 += 1,
                    Ok(Outcome::Skipped) => t.per_claim[k].1 += 1,
                    Ok(Outcome::Violated(detail)) => {
                        let entry = &mut t.per_claim[k];
                        entry.0 += 1;
                        entry.2 += 1;
                        if entry.3.len() < listed {
                            entry.3.push(Violation {
                                position: pos,
                                detail,
                                frame: frame_json_line(frame),
                            });
                        }
                    }
                    Err(e) => {
                        t.error = Some(e);
                        return;
                    }
                }
            }
        });
        let mut enumerated = 0;
        let mut merged = vec![(0u64, 0u64, 0u64, Vec::new()); group.len()];
        for t in tallies {
            if let Some(e) = t.error {
                return Err(e);
            }
            enumerated += t.enumerated;
            for (m, (checked, skipped, count, vs)) in merged.iter_mut().zip(t.per_claim) {
                m.0 += checked;
                m.1 += skipped;
                m.2 += count;
                for v in vs {
                    if m.3.len() < listed {
                        m.3.push(v);
                    }
                }
            }
        }
        for ((&i, &c), (checked, skipped, count, vs)) in members.iter().zip(&group).zip(merged) {
            reports[i] = Some(ClaimReport {
                claim: c,
                bounds: b.clone(),
                enumerated,
                checked,
                skipped,
                violation_count: count,
                violations: vs,
                converse: converse_checks(c),
            });
        }
    }
    Ok(reports.into_iter().map(|r| r.expect("every claim reported")).collect())
}

fn empty_report(claim: ClaimId, bounds: &EnumBounds) -> ClaimReport {
    ClaimReport {
        claim,
        bounds: bounds.clone(),
        enumerated: 0,
        checked: 0,
        skipped: 0,
        violation_count: 0,
        violations: Vec::new(),
        converse: converse_checks(claim),
    }
}
