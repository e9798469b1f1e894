//! The condition battery: identifiers, verdicts, witnesses, and the
//! evaluator that runs each checker over one category and one span class.
//!
//! Every checker is a finite quantification over the category's span and
//! graph scope. A False verdict carries a witness diagram that replays
//! against the tables it embeds, a True verdict carries a certificate,
//! and any scan cut short by a bound or work cap marks the report as
//! capped instead of silently narrowing the claim. The fifteen functor
//! conditions are equivalent over any class that passes the closure
//! prechecks, so `master_verdict` treats a split among them as an engine
//! bug rather than a property of the input.

pub mod construct;
pub mod letters;
pub mod ops;
pub mod props;
pub mod scope;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::algebra::El;
use crate::category::{CatError, Hom, ObjId, WorkingCategory};
use crate::classes::{ClassKind, SpanClass};
use letters::{Letter, RelLaw};
use scope::Battery;

/// Condition family. Declaration order is report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tag {
    T1,
    T5,
    T6,
    C15,
    C16,
    C17,
    P51,
    P52,
    P53,
    Sig,
}

/// One condition of the battery: a family tag plus the item inside the
/// family's enumeration. Letter items are numbered 1..=15 for A..=O;
/// singleton families use item 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConditionId {
    pub tag: Tag,
    pub item: u8,
}

impl ConditionId {
    pub fn new(tag: Tag, item: u8) -> ConditionId {
        ConditionId { tag, item }
    }

    /// The class the condition actually quantifies over: the corollary
    /// families pin their own class, everything else uses the ambient one.
    pub fn effective_class(&self, ambient: &SpanClass) -> SpanClass {
        match self.tag {
            Tag::C15 => SpanClass::strong_relations(),
            Tag::C16 => SpanClass::relations(),
            Tag::C17 | Tag::T6 => SpanClass::all(),
            _ => ambient.clone(),
        }
    }
}

impl core::fmt::Display for ConditionId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self.tag {
            Tag::T1 => write!(f, "T1.{}", self.item),
            Tag::T5 => write!(f, "T5.{}", Letter::from_index(self.item).name()),
            Tag::T6 => write!(f, "T6.{}", self.item),
            Tag::C15 => write!(f, "C15.{}", self.item),
            Tag::C16 => write!(f, "C16.{}", self.item),
            Tag::C17 => write!(f, "C17.{}", self.item),
            Tag::P51 => write!(f, "P51"),
            Tag::P52 => write!(f, "P52"),
            Tag::P53 => write!(f, "P53"),
            Tag::Sig => write!(f, "SIG"),
        }
    }
}

impl core::str::FromStr for ConditionId {
    type Err = String;

    fn from_str(s: &str) -> Result<ConditionId, String> {
        let up: String = s.trim().chars().map(|c| c.to_ascii_uppercase()).collect();
        let bad = || format!("unknown condition `{s}`");
        match up.as_str() {
            "P51" => return Ok(ConditionId::new(Tag::P51, 0)),
            "P52" => return Ok(ConditionId::new(Tag::P52, 0)),
            "P53" => return Ok(ConditionId::new(Tag::P53, 0)),
            "SIG" => return Ok(ConditionId::new(Tag::Sig, 0)),
            _ => {}
        }
        let (tag, rest) = if let Some(r) = up.strip_prefix("T1.") {
            (Tag::T1, r)
        } else if let Some(r) = up.strip_prefix("T5.") {
            (Tag::T5, r)
        } else if let Some(r) = up.strip_prefix("T6.") {
            (Tag::T6, r)
        } else if let Some(r) = up.strip_prefix("C15.") {
            (Tag::C15, r)
        } else if let Some(r) = up.strip_prefix("C16.") {
            (Tag::C16, r)
        } else if let Some(r) = up.strip_prefix("C17.") {
            (Tag::C17, r)
        } else {
            return Err(bad());
        };
        if tag == Tag::T5 {
            let mut chars = rest.chars();
            let (c, none) = (chars.next(), chars.next());
            if let (Some(c @ 'A'..='O'), None) = (c, none) {
                return Ok(ConditionId::new(Tag::T5, c as u8 - b'A' + 1));
            }
            return Err(bad());
        }
        let item: u8 = rest.parse().map_err(|_| bad())?;
        let max = match tag {
            Tag::T1 => 6,
            Tag::T6 => 16,
            _ => 6,
        };
        if item == 0 || item > max {
            return Err(bad());
        }
        Ok(ConditionId::new(tag, item))
    }
}

/// Every condition the battery evaluates, in report order.
pub fn catalog() -> Vec<ConditionId> {
    let mut out = Vec::new();
    for k in 1..=6 {
        out.push(ConditionId::new(Tag::T1, k));
    }
    for k in 1..=15 {
        out.push(ConditionId::new(Tag::T5, k));
    }
    for k in 1..=16 {
        out.push(ConditionId::new(Tag::T6, k));
    }
    for tag in [Tag::C15, Tag::C16, Tag::C17] {
        for k in 1..=6 {
            out.push(ConditionId::new(tag, k));
        }
    }
    out.push(ConditionId::new(Tag::P51, 0));
    out.push(ConditionId::new(Tag::P52, 0));
    out.push(ConditionId::new(Tag::P53, 0));
    out.push(ConditionId::new(Tag::Sig, 0));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    /// The scan neither verified nor refuted the condition within its
    /// bounds; the note says which search gave up.
    Open,
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Open => "open",
        })
    }
}

/// How many structures one carrier admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    None,
    Unique,
    Multiple,
}

impl Outcome {
    pub fn of(count: usize) -> Outcome {
        match count {
            0 => Outcome::None,
            1 => Outcome::Unique,
            _ => Outcome::Multiple,
        }
    }
}

/// A replayable fragment of the category: named carriers, hom tables
/// between them, and the tuples exhibiting the claim.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagram {
    pub objects: Vec<DiagramObject>,
    pub homs: Vec<DiagramHom>,
    pub tuples: Vec<(String, Vec<El>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramObject {
    pub name: String,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramHom {
    pub name: String,
    /// Indices into `objects`.
    pub src: usize,
    pub dst: usize,
    pub map: Vec<El>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub what: String,
    pub diagram: Diagram,
}

impl Witness {
    pub fn bare(what: impl Into<String>) -> Witness {
        Witness { what: what.into(), diagram: Diagram::default() }
    }
}

/// Accumulates a diagram while deduplicating objects by identity.
pub struct DiagramBuilder {
    ids: Vec<ObjId>,
    d: Diagram,
}

impl DiagramBuilder {
    pub fn new() -> DiagramBuilder {
        DiagramBuilder { ids: Vec::new(), d: Diagram::default() }
    }

    pub fn obj(&mut self, wc: &WorkingCategory, o: ObjId) -> usize {
        if let Some(k) = self.ids.iter().position(|&id| id == o) {
            return k;
        }
        self.ids.push(o);
        let base = wc.name(o).to_string();
        // Adjoined objects share generic names; qualify repeats.
        let name = if self.d.objects.iter().any(|t| t.name == base) {
            format!("{base}#{}", self.ids.len() - 1)
        } else {
            base
        };
        self.d.objects.push(DiagramObject { name, size: wc.size(o) });
        self.d.objects.len() - 1
    }

    pub fn hom(&mut self, wc: &WorkingCategory, name: impl Into<String>, h: &Hom) {
        let src = self.obj(wc, h.src);
        let dst = self.obj(wc, h.dst);
        self.d.homs.push(DiagramHom { name: name.into(), src, dst, map: h.map.clone() });
    }

    pub fn span(&mut self, wc: &WorkingCategory, prefix: &str, sp: &crate::category::Span) {
        self.hom(wc, format!("{prefix}.d"), &sp.d);
        self.hom(wc, format!("{prefix}.c"), &sp.c);
    }

    pub fn tuple(&mut self, name: impl Into<String>, els: &[El]) {
        self.d.tuples.push((name.into(), els.to_vec()));
    }

    pub fn done(self) -> Diagram {
        self.d
    }
}

impl Default for DiagramBuilder {
    fn default() -> Self {
        DiagramBuilder::new()
    }
}

#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub id: ConditionId,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub certificate: Option<Witness>,
    /// Some scan was cut by a bound or a work cap; the verdict holds for
    /// the explored scope.
    pub capped: bool,
    /// The effective class passed its closure prechecks.
    pub hypothesis_ok: bool,
    pub note: String,
    /// Search steps charged while evaluating this condition.
    pub work: u64,
}

/// Checker result before it is stamped with id, hypothesis flag and work.
#[derive(Clone, Debug)]
pub struct Eval {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub certificate: Option<Witness>,
    pub capped: bool,
    pub note: String,
}

impl Eval {
    pub fn holds(note: impl Into<String>, certificate: Option<Witness>, capped: bool) -> Eval {
        Eval { verdict: Verdict::True, witness: None, certificate, capped, note: note.into() }
    }

    pub fn fails(witness: Witness, capped: bool) -> Eval {
        let note = witness.what.clone();
        Eval { verdict: Verdict::False, witness: Some(witness), certificate: None, capped, note }
    }

    pub fn open(note: impl Into<String>, capped: bool) -> Eval {
        Eval { verdict: Verdict::Open, witness: None, certificate: None, capped, note: note.into() }
    }
}

/// Letter checked by each T6 item in 2..=14.
fn t6_letter(item: u8) -> Letter {
    match item {
        2 => Letter::A,
        3 => Letter::B,
        4 => Letter::C,
        5 => Letter::D,
        6 => Letter::E,
        7 => Letter::F,
        8 => Letter::K,
        9 => Letter::J,
        10 => Letter::M,
        11 => Letter::L,
        12 => Letter::H,
        13 => Letter::G,
        _ => Letter::I,
    }
}

/// Evaluate one condition against the battery's category, reusing every
/// memoized scan the battery already holds.
pub fn evaluate(bat: &mut Battery, id: ConditionId) -> Result<ConditionReport, CatError> {
    let class = id.effective_class(&bat.ambient);
    let work0 = bat.wc.work;
    let (hypothesis_ok, hyp_capped) = bat.precheck(&class)?;
    let ev = match (id.tag, id.item) {
        (Tag::T1, 1) => letters::letter(bat, &class, Letter::A)?,
        (Tag::T1, 2) => letters::letter(bat, &class, Letter::B)?,
        (Tag::T1, 3) => letters::letter(bat, &class, Letter::D)?,
        (Tag::T1, 4) => letters::letter(bat, &class, Letter::G)?,
        (Tag::T1, 5) => letters::letter(bat, &class, Letter::H)?,
        (Tag::T1, 6) => letters::unique_associative_family(bat, &class)?,
        (Tag::T5, k) => letters::letter(bat, &class, Letter::from_index(k))?,
        (Tag::T6, 1) => letters::natural_operation_condition(bat)?,
        (Tag::T6, 15) => letters::comparison_sections(bat)?,
        (Tag::T6, 16) => letters::local_coproducts(bat, &class)?,
        (Tag::T6, k) => letters::letter(bat, &class, t6_letter(k))?,
        (Tag::C15, 1) => letters::local_product_cospans_epic(bat)?,
        (Tag::C15, 2) => letters::reflexive_family(bat, &class, RelLaw::Equivalence)?,
        (Tag::C15, 3) => letters::reflexive_family(bat, &class, RelLaw::Preorder)?,
        (Tag::C15, 4) => letters::letter(bat, &class, Letter::G)?,
        (Tag::C15, 5) => letters::letter(bat, &class, Letter::H)?,
        (Tag::C15, 6) => letters::difunctional_family(bat, &class)?,
        (Tag::C16, 1) => letters::reflexive_family(bat, &class, RelLaw::Tolerance)?,
        (Tag::C16, 2) => letters::reflexive_family(bat, &class, RelLaw::Equivalence)?,
        (Tag::C16, 3) => letters::reflexive_family(bat, &class, RelLaw::Preorder)?,
        (Tag::C16, 4) => letters::letter(bat, &class, Letter::G)?,
        (Tag::C16, 5) => letters::letter(bat, &class, Letter::H)?,
        (Tag::C16, 6) => letters::difunctional_family(bat, &class)?,
        (Tag::C17, 1) => letters::natural_operation_condition(bat)?,
        (Tag::C17, 2) => letters::letter(bat, &class, Letter::B)?,
        (Tag::C17, 3) => letters::letter(bat, &class, Letter::D)?,
        (Tag::C17, 4) => letters::letter(bat, &class, Letter::G)?,
        (Tag::C17, 5) => letters::letter(bat, &class, Letter::H)?,
        (Tag::C17, 6) => letters::canonical_everywhere(bat, &class)?,
        (Tag::P51, _) => props::iso_iff_weakly_maltsev(bat, &class)?,
        (Tag::P52, _) => props::split_spans_are_local_products(bat, &class)?,
        (Tag::P53, _) => props::autonomy(bat, &class)?,
        (Tag::Sig, _) => props::signature_condition(bat)?,
        _ => return Err(CatError::Shape(format!("condition {id} out of catalog"))),
    };
    Ok(ConditionReport {
        id,
        verdict: ev.verdict,
        witness: ev.witness,
        certificate: ev.certificate,
        capped: ev.capped || hyp_capped,
        hypothesis_ok,
        note: ev.note,
        work: bat.wc.work - work0,
    })
}

/// One-shot evaluation with a fresh battery.
pub fn check_condition(
    wc: &WorkingCategory,
    class: &SpanClass,
    id: ConditionId,
) -> Result<ConditionReport, CatError> {
    let mut bat = Battery::new(wc, class);
    evaluate(&mut bat, id)
}

#[derive(Clone, Debug)]
pub struct MasterReport {
    /// The ambient class passed its closure prechecks, so the agreement
    /// set is actually an equivalence family.
    pub applicable: bool,
    pub consistent: bool,
    /// Common verdict of the decided members of the agreement set.
    pub agree: Option<Verdict>,
    /// First pair of members that split, if any.
    pub split: Option<(ConditionId, Verdict, ConditionId, Verdict)>,
}

#[derive(Clone, Debug)]
pub struct BatteryRun {
    pub reports: Vec<ConditionReport>,
    pub master: MasterReport,
}

/// Members of the equivalence family at a given ambient class: the letter
/// conditions always, a corollary family when the ambient class is the one
/// it pins, and the T6 items below the comparison-section tail. Open
/// verdicts abstain.
fn oracle_member(id: ConditionId, ambient: ClassKind) -> bool {
    match id.tag {
        Tag::T1 | Tag::T5 => true,
        Tag::T6 => ambient == ClassKind::All && (1..=14).contains(&id.item),
        Tag::C15 => ambient == ClassKind::StrongRelations,
        Tag::C16 => ambient == ClassKind::Relations,
        Tag::C17 => ambient == ClassKind::All,
        _ => false,
    }
}

pub fn master_verdict(ambient: ClassKind, reports: &[ConditionReport]) -> MasterReport {
    let mut applicable = true;
    let mut agree: Option<(ConditionId, Verdict)> = None;
    let mut split = None;
    for r in reports {
        if !oracle_member(r.id, ambient) {
            continue;
        }
        applicable &= r.hypothesis_ok;
        if r.verdict == Verdict::Open {
            continue;
        }
        match agree {
            None => agree = Some((r.id, r.verdict)),
            Some((id0, v0)) if v0 != r.verdict && split.is_none() => {
                split = Some((id0, v0, r.id, r.verdict));
            }
            _ => {}
        }
    }
    MasterReport {
        applicable,
        consistent: split.is_none(),
        agree: agree.map(|(_, v)| v),
        split,
    }
}

/// Evaluate the whole catalog over one battery and cross-check the
/// equivalence family.
pub fn run_battery(wc: &WorkingCategory, class: &SpanClass) -> Result<BatteryRun, CatError> {
    let mut bat = Battery::new(wc, class);
    let mut reports = Vec::new();
    for id in catalog() {
        reports.push(evaluate(&mut bat, id)?);
    }
    let master = master_verdict(class.kind, &reports);
    Ok(BatteryRun { reports, master })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_order_and_size() {
        let all = catalog();
        assert_eq!(all.len(), 6 + 15 + 16 + 6 + 6 + 6 + 4);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert!(all.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn id_round_trips_through_display() {
        for id in catalog() {
            let s = alloc::string::ToString::to_string(&id);
            let back: ConditionId = s.parse().expect("parse back");
            assert_eq!(back, id, "{s}");
        }
        assert!("T5.P".parse::<ConditionId>().is_err());
        assert!("T6.17".parse::<ConditionId>().is_err());
        assert!("T1.0".parse::<ConditionId>().is_err());
        assert_eq!("t5.g".parse::<ConditionId>().unwrap(), ConditionId::new(Tag::T5, 7));
    }

    #[test]
    fn oracle_set_tracks_ambient_class() {
        assert!(oracle_member(ConditionId::new(Tag::T6, 14), ClassKind::All));
        assert!(!oracle_member(ConditionId::new(Tag::T6, 15), ClassKind::All));
        assert!(!oracle_member(ConditionId::new(Tag::T6, 16), ClassKind::All));
        assert!(!oracle_member(ConditionId::new(Tag::T6, 2), ClassKind::Relations));
        assert!(oracle_member(ConditionId::new(Tag::C16, 6), ClassKind::Relations));
        assert!(!oracle_member(ConditionId::new(Tag::C16, 6), ClassKind::StrongRelations));
        assert!(oracle_member(ConditionId::new(Tag::T5, 1), ClassKind::Custom));
        assert!(!oracle_member(ConditionId::new(Tag::Sig, 0), ClassKind::All));
    }
}
