//! Classes of spans: the three canonical kinds plus extensional custom
//! classes, with membership up to isomorphism and the closure hypotheses
//! the verification battery quantifies over.
//!
//! A custom class carries its member spans extensionally; the canonical
//! kinds are intensional predicates on the legs. Hypotheses quantify over
//! the span scope of the category: every span of homs out of a base apex
//! plus every relation span (a subalgebra of a product of scope objects
//! with its projections). Relation feet range over the battery scope, not
//! just the bases: a relation witnessing a failure can need product feet
//! even when every base is too small to carry one. Whenever a bound or
//! work cap cuts a search short, the verdict carries a capped flag instead
//! of silently narrowing.

use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::hom::{search_maps, Candidates, SearchSpec};
use crate::algebra::El;
use crate::category::limits::{kp_construction, subuniverses};
use crate::category::predicates::{
    for_each_local_product, jointly_monic_witness, jointly_strongly_monic, regular_subobjects,
};
use crate::category::{CatError, Hom, Span, WorkingCategory};

/// Iso searches during membership tests give up after this many steps.
const ISO_WORK_CAP: u64 = 1 << 20;

/// At most this many relation spans are kept per foot pair, consumed in
/// the (size, lex) carrier order of the subuniverse enumeration, so a cut
/// keeps the small relations where counterexamples live.
const RELATIONS_PER_FEET: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    All,
    Relations,
    StrongRelations,
    Custom,
}

/// A class of spans over a fixed category. Membership of a custom class is
/// decided up to span isomorphism, so the member list may be given on any
/// isomorphic representatives; spans must live in the category they are
/// tested in.
#[derive(Clone, Debug)]
pub struct SpanClass {
    pub kind: ClassKind,
    pub name: String,
    /// Extensional members; consulted only for Custom classes.
    pub members: Vec<Span>,
}

impl SpanClass {
    pub fn all() -> SpanClass {
        SpanClass { kind: ClassKind::All, name: String::from("all"), members: Vec::new() }
    }

    pub fn relations() -> SpanClass {
        SpanClass {
            kind: ClassKind::Relations,
            name: String::from("relations"),
            members: Vec::new(),
        }
    }

    pub fn strong_relations() -> SpanClass {
        SpanClass {
            kind: ClassKind::StrongRelations,
            name: String::from("strong-relations"),
            members: Vec::new(),
        }
    }

    pub fn custom(name: impl Into<String>, members: Vec<Span>) -> SpanClass {
        SpanClass { kind: ClassKind::Custom, name: name.into(), members }
    }
}

/// Membership plus the caveat picked up along the way: a truncated
/// strong-monicity scope or an iso search that gave up leaves the answer
/// valid only up to the explored scope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub capped: bool,
}

pub fn member(wc: &mut WorkingCategory, class: &SpanClass, sp: &Span) -> Membership {
    match class.kind {
        ClassKind::All => Membership { member: true, capped: false },
        ClassKind::Relations => {
            Membership { member: jointly_monic_witness(wc, sp).is_none(), capped: false }
        }
        ClassKind::StrongRelations => {
            let rep = jointly_strongly_monic(wc, sp);
            Membership { member: rep.is_strong(), capped: rep.capped }
        }
        ClassKind::Custom => {
            let mut capped = false;
            for t in &class.members {
                let (iso, c) = span_iso(wc, sp, t);
                capped |= c;
                if iso.is_some() {
                    return Membership { member: true, capped };
                }
            }
            Membership { member: false, capped }
        }
    }
}

/// An isomorphism of spans over fixed feet: a category iso between the
/// apexes commuting with both legs. Candidates are restricted to matching
/// (d, c) fibers, so the search space is the product of the fibers.
pub fn span_iso(wc: &mut WorkingCategory, a: &Span, b: &Span) -> (Option<Hom>, bool) {
    if a.d.dst != b.d.dst || a.c.dst != b.c.dst {
        return (None, false);
    }
    let n = wc.size(a.apex);
    if n != wc.size(b.apex) {
        return (None, false);
    }
    let mut cands = Candidates::none(n, n);
    for x in 0..n {
        for v in 0..n as El {
            if b.d.map[v as usize] == a.d.map[x] && b.c.map[v as usize] == a.c.map[x] {
                cands.allow(x, v);
            }
        }
    }
    let va = wc.view(a.apex);
    let vb = wc.view(b.apex);
    let spec = SearchSpec { forced: &[], limit: 0, max_work: ISO_WORK_CAP };
    let out = search_maps(&va, &vb, &cands, &spec, &mut wc.work);
    let capped = out.capped();
    for map in out.maps() {
        let h = Hom { src: a.apex, dst: b.apex, map: map.clone() };
        if wc.category_iso(&h).is_some() {
            return (Some(h), capped);
        }
    }
    (None, capped)
}

/// Registers the subalgebra carried by a sorted subset of the apex and
/// returns the span restricted to it (legs composed with the inclusion).
pub fn restrict_span(
    wc: &mut WorkingCategory,
    sp: &Span,
    carrier: &[El],
) -> Result<Span, CatError> {
    let factors = wc.factors(sp.apex);
    let elems: Vec<Vec<El>> = carrier.iter().map(|&e| wc.coords(sp.apex, e)).collect();
    let (obj, emb) = wc.adjoin_tuples(factors, elems, "restricted span")?;
    let mut dmap = alloc::vec![0 as El; carrier.len()];
    let mut cmap = alloc::vec![0 as El; carrier.len()];
    for (k, &e) in carrier.iter().enumerate() {
        dmap[emb[k] as usize] = sp.d.map[e as usize];
        cmap[emb[k] as usize] = sp.c.map[e as usize];
    }
    Span::new(
        Hom { src: obj, dst: sp.d.dst, map: dmap },
        Hom { src: obj, dst: sp.c.dst, map: cmap },
    )
}

/// The span (D(d,c), dom, cod) induced by the kernel pair construction.
pub fn kp_span(wc: &mut WorkingCategory, sp: &Span) -> Result<Span, CatError> {
    let kp = kp_construction(wc, sp)?;
    Span::new(kp.dom, kp.cod)
}

/// |D(d,c)| without materializing it.
pub fn kp_size(wc: &WorkingCategory, sp: &Span) -> usize {
    let n = wc.size(sp.apex);
    let mut dfib = alloc::vec![0usize; wc.size(sp.d.dst)];
    let mut cfib = alloc::vec![0usize; wc.size(sp.c.dst)];
    for x in 0..n {
        dfib[sp.d.map[x] as usize] += 1;
        cfib[sp.c.map[x] as usize] += 1;
    }
    (0..n).map(|v| dfib[sp.d.map[v] as usize] * cfib[sp.c.map[v] as usize]).sum()
}

/// Quantification scope for span-indexed hypotheses.
pub struct SpanScope {
    pub spans: Vec<Span>,
    /// A product carrier above the bound was skipped, or a subuniverse
    /// family overflowed its cap.
    pub truncated: bool,
}

pub fn span_scope(wc: &mut WorkingCategory) -> Result<SpanScope, CatError> {
    fn push_unique(spans: &mut Vec<Span>, s: Span) {
        if !spans.contains(&s) {
            spans.push(s);
        }
    }
    let mut spans: Vec<Span> = Vec::new();
    for a in 0..wc.n_bases() {
        for x in 0..wc.n_bases() {
            for y in 0..wc.n_bases() {
                let fs = wc.homs(a, x);
                let gs = wc.homs(a, y);
                for f in fs.iter() {
                    for g in gs.iter() {
                        push_unique(&mut spans, Span::new(f.clone(), g.clone())?);
                    }
                }
            }
        }
    }
    let mut truncated = false;
    let feet = wc.battery_objects();
    for &x in feet.iter() {
        for &y in feet.iter() {
            if wc.size(x) * wc.size(y) > wc.bound {
                truncated = true;
                continue;
            }
            let (p, p1, p2) = wc.product_pair(x, y)?;
            let prod = Span::new(p1, p2)?;
            let (fam, cut) = subuniverses(wc, p, RELATIONS_PER_FEET);
            truncated |= cut;
            for carrier in &fam {
                if carrier.len() == wc.size(p) {
                    push_unique(&mut spans, prod.clone());
                } else {
                    push_unique(&mut spans, restrict_span(wc, &prod, carrier)?);
                }
            }
        }
    }
    Ok(SpanScope { spans, truncated })
}

/// Outcome of a closure hypothesis. The witness is the span demonstrating
/// failure: the member span whose kernel-pair span escapes the class, the
/// local-product span part the class misses, or the restricted span that
/// drops out under a regular mono.
#[derive(Clone, Debug)]
pub struct ClassReport {
    pub holds: bool,
    pub witness: Option<Span>,
    pub capped: bool,
}

impl ClassReport {
    fn trivial() -> ClassReport {
        ClassReport { holds: true, witness: None, capped: false }
    }
}

/// The member spans a hypothesis quantifies over: the extensional list for
/// custom classes, the member part of the span scope otherwise.
pub fn member_spans(
    wc: &mut WorkingCategory,
    class: &SpanClass,
) -> Result<(Vec<Span>, bool), CatError> {
    if class.kind == ClassKind::Custom {
        return Ok((class.members.clone(), false));
    }
    let scope = span_scope(wc)?;
    let mut out = Vec::new();
    let mut capped = scope.truncated;
    for s in scope.spans {
        let m = member(wc, class, &s);
        capped |= m.capped;
        if m.member {
            out.push(s);
        }
    }
    Ok((out, capped))
}

/// For every member span, the kernel-pair span is again a member.
/// Kernel-pair carriers larger than the square of the category bound are
/// skipped and reported as a cut.
pub fn closed_under_kp(
    wc: &mut WorkingCategory,
    class: &SpanClass,
) -> Result<ClassReport, CatError> {
    if class.kind == ClassKind::All {
        return Ok(ClassReport::trivial());
    }
    let (members, mut capped) = member_spans(wc, class)?;
    let cap = wc.bound * wc.bound;
    let mut witness = None;
    for s in &members {
        if kp_size(wc, s) > cap {
            capped = true;
            continue;
        }
        let induced = kp_span(wc, s)?;
        let m = member(wc, class, &induced);
        capped |= m.capped;
        if !m.member {
            witness = Some(s.clone());
            break;
        }
    }
    Ok(ClassReport { holds: witness.is_none(), witness, capped })
}

/// Every local product's span part is a member.
pub fn contains_local_products(wc: &mut WorkingCategory, class: &SpanClass) -> ClassReport {
    if class.kind == ClassKind::All {
        return ClassReport::trivial();
    }
    let mut truncated = false;
    let mut capped = false;
    let mut witness: Option<Span> = None;
    for_each_local_product(wc, &mut truncated, |wc, lp| {
        let part = Span::new(lp.ss.p1.clone(), lp.ss.p2.clone())
            .expect("split span projections share the pullback");
        let m = member(wc, class, &part);
        capped |= m.capped;
        if m.member {
            true
        } else {
            witness = Some(part);
            false
        }
    });
    ClassReport { holds: witness.is_none(), witness, capped: capped || truncated }
}

/// Every member span restricted along a regular mono into its apex is
/// again a member.
pub fn stable_under_regular_mono(
    wc: &mut WorkingCategory,
    class: &SpanClass,
) -> Result<ClassReport, CatError> {
    if class.kind == ClassKind::All {
        return Ok(ClassReport::trivial());
    }
    let (members, mut capped) = member_spans(wc, class)?;
    let mut witness = None;
    'outer: for s in &members {
        let (subs, truncated) = regular_subobjects(wc, s.apex);
        capped |= truncated;
        for (carrier, _, _) in &subs {
            if carrier.len() == wc.size(s.apex) {
                continue;
            }
            let restricted = restrict_span(wc, s, carrier)?;
            let m = member(wc, class, &restricted);
            capped |= m.capped;
            if !m.member {
                witness = Some(restricted);
                break 'outer;
            }
        }
    }
    Ok(ClassReport { holds: witness.is_none(), witness, capped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::{group_eqs, group_sig, z};
    use crate::algebra::{FiniteAlgebra, Signature};
    use crate::category::FrozenCategory;

    /// Abelian groups over the two smallest carriers.
    fn z2_battery() -> WorkingCategory {
        let sig = group_sig();
        let eqs = group_eqs(&sig);
        WorkingCategory::new(
            &FrozenCategory::new(sig, eqs, alloc::vec![z(1), z(2)], None, true, 16).unwrap(),
        )
    }

    fn finset2() -> WorkingCategory {
        let sig = Signature::empty();
        let bases = alloc::vec![
            FiniteAlgebra::new("s0", 1, &sig, alloc::vec![]).unwrap(),
            FiniteAlgebra::new("s1", 2, &sig, alloc::vec![]).unwrap(),
        ];
        WorkingCategory::new(
            &FrozenCategory::new(sig, alloc::vec![], bases, None, true, 16).unwrap(),
        )
    }

    #[test]
    fn canonical_memberships() {
        let mut wc = z2_battery();
        let (_, p1, p2) = wc.product_pair(1, 1).unwrap();
        let sp = Span::new(p1, p2).unwrap();
        assert!(member(&mut wc, &SpanClass::all(), &sp).member);
        assert!(member(&mut wc, &SpanClass::relations(), &sp).member);
        assert!(member(&mut wc, &SpanClass::strong_relations(), &sp).member);

        let mut fs = finset2();
        let bang = Hom { src: 1, dst: 0, map: alloc::vec![0, 0] };
        let t = Span::new(bang.clone(), bang).unwrap();
        assert!(member(&mut fs, &SpanClass::all(), &t).member);
        assert!(!member(&mut fs, &SpanClass::relations(), &t).member);
        // the induced triple span collapses its middle coordinate
        let induced = kp_span(&mut fs, &t).unwrap();
        assert_eq!(fs.size(induced.apex), 8);
        assert!(member(&mut fs, &SpanClass::all(), &induced).member);
        assert!(!member(&mut fs, &SpanClass::relations(), &induced).member);
    }

    #[test]
    fn membership_is_iso_invariant_on_the_scope() {
        let mut wc = z2_battery();
        let scope = span_scope(&mut wc).unwrap();
        assert!(!scope.truncated);
        assert!(scope.spans.len() > 10);
        let rel = SpanClass::relations();
        let strong = SpanClass::strong_relations();
        // auto-orbit checks stay on small apexes; big product apexes have
        // thousands of autos and add nothing to the invariance claim
        let small: Vec<Span> =
            scope.spans.iter().filter(|s| wc.size(s.apex) <= 4).cloned().collect();
        for s in &small {
            let m_rel = member(&mut wc, &rel, s);
            let m_str = member(&mut wc, &strong, s);
            if m_str.member {
                assert!(m_rel.member);
            }
            // abelian scope: monic and strongly monic coincide here
            assert_eq!(m_rel.member, m_str.member);
            let autos = wc.homs(s.apex, s.apex);
            for phi in autos.iter() {
                if wc.category_iso(phi).is_none() {
                    continue;
                }
                let moved =
                    Span::new(Hom::compose(&s.d, phi), Hom::compose(&s.c, phi)).unwrap();
                assert_eq!(member(&mut wc, &rel, &moved).member, m_rel.member);
                assert_eq!(member(&mut wc, &strong, &moved).member, m_str.member);
                let just_s = SpanClass::custom("one", alloc::vec![s.clone()]);
                assert!(member(&mut wc, &just_s, &moved).member);
            }
        }
    }

    #[test]
    fn custom_membership_up_to_iso() {
        let mut wc = z2_battery();
        let (p, p1, p2) = wc.product_pair(1, 1).unwrap();
        let prod = Span::new(p1.clone(), p2.clone()).unwrap();
        let custom = SpanClass::custom("product-only", alloc::vec![prod.clone()]);
        assert!(member(&mut wc, &custom, &prod).member);
        // same span with swapped legs is isomorphic over swapped feet
        assert!(member(&mut wc, &custom, &prod.swapped()).member);
        let diag: Vec<El> = (0..wc.size(p) as El)
            .filter(|&e| p1.map[e as usize] == p2.map[e as usize])
            .collect();
        let dspan = restrict_span(&mut wc, &prod, &diag).unwrap();
        assert!(!member(&mut wc, &custom, &dspan).member);
    }

    #[test]
    fn kernel_pair_closure() {
        let mut fs = finset2();
        assert!(closed_under_kp(&mut fs, &SpanClass::all()).unwrap().holds);
        let rep = closed_under_kp(&mut fs, &SpanClass::relations()).unwrap();
        assert!(rep.holds && rep.witness.is_none());
        // a single non-relation span: its triple span is not isomorphic to it
        let bang = Hom { src: 1, dst: 0, map: alloc::vec![0, 0] };
        let t = Span::new(bang.clone(), bang).unwrap();
        let custom = SpanClass::custom("point", alloc::vec![t.clone()]);
        let rep = closed_under_kp(&mut fs, &custom).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.witness.unwrap(), t);

        let mut wc = z2_battery();
        assert!(closed_under_kp(&mut wc, &SpanClass::relations()).unwrap().holds);
        assert!(closed_under_kp(&mut wc, &SpanClass::strong_relations()).unwrap().holds);
    }

    #[test]
    fn local_product_containment() {
        let mut wc = z2_battery();
        assert!(contains_local_products(&mut wc, &SpanClass::all()).holds);
        assert!(contains_local_products(&mut wc, &SpanClass::relations()).holds);
        assert!(contains_local_products(&mut wc, &SpanClass::strong_relations()).holds);
        // a class with only the point span misses every two-sided product part
        let id0 = wc.identity(0);
        let point = SpanClass::custom("just-a-point", alloc::vec![Span::new(
            id0.clone(),
            id0,
        )
        .unwrap()]);
        let rep = contains_local_products(&mut wc, &point);
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert!(wc.size(w.apex) > 1);
    }

    #[test]
    fn restriction_stability() {
        let mut wc = z2_battery();
        assert!(stable_under_regular_mono(&mut wc, &SpanClass::all()).unwrap().holds);
        assert!(stable_under_regular_mono(&mut wc, &SpanClass::relations()).unwrap().holds);
        assert!(
            stable_under_regular_mono(&mut wc, &SpanClass::strong_relations()).unwrap().holds
        );
        // the product span restricted to its diagonal leaves a one-span class
        let (p, p1, p2) = wc.product_pair(1, 1).unwrap();
        let prod = Span::new(p1, p2).unwrap();
        let custom = SpanClass::custom("product-only", alloc::vec![prod]);
        let rep = stable_under_regular_mono(&mut wc, &custom).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert!(wc.size(w.apex) < wc.size(p));
        assert!(member(&mut wc, &SpanClass::relations(), &w).member);
    }
}
