//! Standalone propositions: the weakly Mal'tsev biconditional, the
//! split-span characterization of local products, autonomy of canonical
//! pregroupoids, and containment of the class in the signature.

use alloc::format;
use alloc::vec::Vec;

use crate::category::predicates::{
    is_local_product, jointly_monic_witness, jointly_strongly_monic,
};
use crate::category::{CatError, Hom, Span, SplitSpan};
use crate::classes::{member, stable_under_regular_mono, SpanClass};
use crate::structures::Pregroupoid;

use super::letters::{self, Letter};
use super::ops;
use super::scope::{Battery, LETTER_WORK_CAP, SECTION_CAP, SQUARE_CAP};
use super::{DiagramBuilder, Eval, Verdict, Witness};

/// The structure comparison is an isomorphism exactly when the canonical
/// injections into every local product are jointly epic. The biconditional
/// is asserted for classes stable under restriction along regular monos
/// with strongly monic members; outside that gate a disagreement stays
/// undecided.
pub fn iso_iff_weakly_maltsev(bat: &mut Battery, class: &SpanClass) -> Result<Eval, CatError> {
    let (kp_ok, lp_ok) = bat.precheck(class)?;
    let stab = stable_under_regular_mono(&mut bat.wc, class)?;
    let mut gate = kp_ok && lp_ok && stab.holds;
    let mut gate_capped = stab.capped;
    if gate {
        let members = bat.member_set(class)?;
        gate_capped |= members.capped;
        for &si in &members.idx.clone() {
            let sp = bat.scope()?.spans[si].clone();
            let rep = jointly_strongly_monic(&mut bat.wc, &sp);
            gate_capped |= rep.capped;
            if !rep.is_strong() {
                gate = false;
                break;
            }
        }
    }
    let lhs = letters::letter(bat, class, Letter::A)?;
    let rhs = letters::local_product_cospans_epic(bat)?;
    let capped = lhs.capped || rhs.capped || gate_capped;
    match (lhs.verdict, rhs.verdict) {
        (Verdict::Open, _) | (_, Verdict::Open) => {
            Ok(Eval::open("one side of the biconditional is undecided", capped))
        }
        (l, r) if l == r => {
            let side = if l == Verdict::True { "both sides hold" } else { "both sides fail" };
            let hyp = if gate {
                "the class satisfies the stability hypotheses"
            } else {
                "the stability hypotheses do not hold, but the sides still agree"
            };
            Ok(Eval::holds(format!("{side}; {hyp}"), None, capped))
        }
        (l, _) => {
            if !gate {
                return Ok(Eval::open(
                    "the sides disagree, but the class fails the stability hypotheses, \
                     so the biconditional is not asserted",
                    capped,
                ));
            }
            let failing = if l == Verdict::False { lhs } else { rhs };
            let mut w = failing
                .witness
                .unwrap_or_else(|| Witness::bare("no witness recorded for the failing side"));
            w.what = format!(
                "the sides disagree under the stability hypotheses; failing side: {}",
                w.what
            );
            Ok(Eval::fails(w, capped))
        }
    }
}

/// Under the structure isomorphism, a commutative split span with jointly
/// monic member projections is already a local product, and conversely.
pub fn split_spans_are_local_products(
    bat: &mut Battery,
    class: &SpanClass,
) -> Result<Eval, CatError> {
    let premise = letters::letter(bat, class, Letter::A)?;
    if premise.verdict != Verdict::True {
        return Ok(Eval::open(
            "the structure comparison is not known to be an isomorphism; the \
             characterization is not asserted",
            premise.capped,
        ));
    }
    let budget0 = bat.wc.work;
    let mut capped = premise.capped;
    let mut scanned = 0usize;
    let objs = bat.wc.battery_objects().to_vec();
    let nb = bat.wc.n_bases();
    'scan: for a in 0..nb {
        for c in 0..nb {
            for &e in &objs {
                if bat.wc.work - budget0 > LETTER_WORK_CAP || scanned >= SQUARE_CAP {
                    capped = true;
                    break 'scan;
                }
                let p1s = bat.homs_capped(e, a);
                let p2s = bat.homs_capped(e, c);
                capped |= !p1s.complete || !p2s.complete;
                for p1 in p1s.homs.iter() {
                    let (e1s, c1) = ops::sections_of(&mut bat.wc, p1, SECTION_CAP);
                    capped |= c1;
                    if e1s.is_empty() {
                        continue;
                    }
                    for p2 in p2s.homs.iter() {
                        let (e2s, c2) = ops::sections_of(&mut bat.wc, p2, SECTION_CAP);
                        capped |= c2;
                        for e1 in &e1s {
                            for e2 in &e2s {
                                let Ok(ss) = SplitSpan::new(
                                    e1.clone(),
                                    p1.clone(),
                                    e2.clone(),
                                    p2.clone(),
                                ) else {
                                    continue;
                                };
                                scanned += 1;
                                let part = Span::new(p1.clone(), p2.clone())?;
                                let monic =
                                    jointly_monic_witness(&bat.wc, &part).is_none();
                                let m = member(&mut bat.wc, class, &part);
                                capped |= m.capped;
                                let five = ss.is_commutative() && monic && m.member;
                                let lp = is_local_product(&mut bat.wc, &ss).is_some();
                                if five != lp {
                                    let mut b = DiagramBuilder::new();
                                    b.hom(&bat.wc, "e1", e1);
                                    b.hom(&bat.wc, "p1", p1);
                                    b.hom(&bat.wc, "e2", e2);
                                    b.hom(&bat.wc, "p2", p2);
                                    let what = if five {
                                        "split span satisfying the characterization but \
                                         realized by no split-epi pullback"
                                    } else {
                                        "local product whose split span escapes the \
                                         characterization"
                                    };
                                    return Ok(Eval::fails(
                                        Witness { what: what.into(), diagram: b.done() },
                                        capped,
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Eval::holds(
        format!(
            "split spans agree with local products on all {scanned} candidates in scope"
        ),
        None,
        capped,
    ))
}

/// Under the structure isomorphism, every member span whose composite
/// filter forms member spans in both directions carries an associative,
/// interchange-satisfying structure.
pub fn autonomy(bat: &mut Battery, class: &SpanClass) -> Result<Eval, CatError> {
    let premise = letters::letter(bat, class, Letter::A)?;
    if premise.verdict != Verdict::True {
        return Ok(Eval::open(
            "the structure comparison is not known to be an isomorphism; autonomy is \
             not asserted",
            premise.capped,
        ));
    }
    let mut capped = premise.capped;
    let members = bat.member_set(class)?;
    capped |= members.capped;
    let mut checked = 0usize;
    for &si in &members.idx.clone() {
        let st = bat.span_stat(si)?;
        if st.skipped || !st.complete || st.pre.len() != 1 {
            capped |= st.skipped || !st.complete;
            continue;
        }
        let kp = st.kp.clone().unwrap();
        let sp = bat.scope()?.spans[si].clone();
        let s1 = Span::new(kp.dom.clone(), kp.cod.clone())?;
        let m1 = member(&mut bat.wc, class, &s1);
        capped |= m1.capped;
        if !m1.member {
            continue;
        }
        let (n0, n1) = (bat.wc.size(sp.d.dst), bat.wc.size(sp.c.dst));
        if n0 * n0 > bat.wc.bound || n1 * n1 > bat.wc.bound {
            capped = true;
            continue;
        }
        let dbar = {
            let f = Hom::compose(&sp.d, &kp.dom);
            let g = Hom::compose(&sp.d, &kp.cod);
            bat.wc.pair_hom(&f, &g)?
        };
        let cbar = {
            let f = Hom::compose(&sp.c, &kp.dom);
            let g = Hom::compose(&sp.c, &kp.cod);
            bat.wc.pair_hom(&f, &g)?
        };
        let s2 = Span::new(dbar, cbar)?;
        let m2 = member(&mut bat.wc, class, &s2);
        capped |= m2.capped;
        if !m2.member {
            continue;
        }
        checked += 1;
        let pg = Pregroupoid::new(kp.as_ref().clone(), st.pre[0].clone())?;
        let kock = pg.check_kock(&bat.wc)?;
        if !kock.is_valid() {
            let mut b = DiagramBuilder::new();
            b.span(&bat.wc, "span", &sp);
            b.tuple("p", &pg.p.map);
            return Ok(Eval::fails(
                Witness {
                    what: "member span with member filter spans whose structure is not \
                           associative"
                        .into(),
                    diagram: b.done(),
                },
                capped,
            ));
        }
        let auto = pg.check_autonomous(&bat.wc)?;
        if !auto.is_valid() {
            let mut b = DiagramBuilder::new();
            b.span(&bat.wc, "span", &sp);
            b.tuple("p", &pg.p.map);
            return Ok(Eval::fails(
                Witness {
                    what: "member span with member filter spans whose structure breaks \
                           the interchange law"
                        .into(),
                    diagram: b.done(),
                },
                capped,
            ));
        }
    }
    Ok(Eval::holds(
        format!(
            "every qualifying member span carries an associative, interchange-satisfying \
             structure ({checked} spans qualified)"
        ),
        None,
        capped,
    ))
}

/// The ambient class is contained in the signature: every member span,
/// used as a direction, makes all its frames uniquely admissible.
pub fn signature_condition(bat: &mut Battery) -> Result<Eval, CatError> {
    let ambient = bat.ambient.clone();
    let n = bat.member_set(&ambient)?.idx.len();
    let mut ev = letters::letter(bat, &ambient, Letter::H)?;
    match ev.verdict {
        Verdict::True => {
            ev.note = format!("every ambient member span lies in the signature ({n} spans)");
        }
        Verdict::False => {
            ev.note = format!("a member span escapes the signature: {}", ev.note);
            if let Some(w) = &mut ev.witness {
                w.what = format!("span outside the signature: {}", w.what);
            }
        }
        Verdict::Open => {}
    }
    Ok(ev)
}
