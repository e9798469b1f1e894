//! The letter conditions: forgetful comparisons between structured
//! internal graphs (or spans) and their underlying data, each evaluated
//! over the scoped quantification in the Battery. A verdict of False
//! always carries a replayable witness; True carries a certificate and a
//! capped flag whenever any scan was truncated.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::El;
use crate::category::predicates::{image_relation, jointly_epic, for_each_local_product};
use crate::category::{CatError, Hom, Span};
use crate::classes::{member, SpanClass};

use super::ops::{self, PseudoExistence};
use super::scope::{Battery, LETTER_WORK_CAP};
use super::{DiagramBuilder, Eval, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    M,
    N,
    O,
}

impl Letter {
    pub fn from_index(i: u8) -> Letter {
        use Letter::*;
        match i {
            1 => A,
            2 => B,
            3 => C,
            4 => D,
            5 => E,
            6 => F,
            7 => G,
            8 => H,
            9 => I,
            10 => J,
            11 => K,
            12 => L,
            13 => M,
            14 => N,
            _ => O,
        }
    }

    pub fn name(&self) -> &'static str {
        use Letter::*;
        match self {
            A => "A",
            B => "B",
            C => "C",
            D => "D",
            E => "E",
            F => "F",
            G => "G",
            H => "H",
            I => "I",
            J => "J",
            K => "K",
            L => "L",
            M => "M",
            N => "N",
            O => "O",
        }
    }
}

/// Relation laws a reflexive member relation is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelLaw {
    Tolerance,
    Preorder,
    Equivalence,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Section,
    Iso,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum GraphLevel {
    Unital,
    Category,
    Groupoid,
}

impl GraphLevel {
    fn what(&self) -> &'static str {
        match self {
            GraphLevel::Unital => "unital multiplication",
            GraphLevel::Category => "category structure",
            GraphLevel::Groupoid => "groupoid structure",
        }
    }
}

pub fn letter(bat: &mut Battery, class: &SpanClass, l: Letter) -> Result<Eval, CatError> {
    match l {
        Letter::A => graph_structures(bat, class, GraphLevel::Groupoid, Mode::Iso),
        Letter::B => graph_structures(bat, class, GraphLevel::Groupoid, Mode::Section),
        Letter::C => graph_structures(bat, class, GraphLevel::Category, Mode::Iso),
        Letter::D => graph_structures(bat, class, GraphLevel::Category, Mode::Section),
        Letter::E => graph_structures(bat, class, GraphLevel::Unital, Mode::Iso),
        Letter::F => graph_structures(bat, class, GraphLevel::Unital, Mode::Section),
        Letter::G => frame_compatibility(bat, class),
        Letter::H => dikite_admissibility(bat, class),
        Letter::I => pseudo_sections(bat, class),
        Letter::J => span_family(bat, class, false, Mode::Section),
        Letter::K => span_family(bat, class, false, Mode::Iso),
        Letter::L => span_family(bat, class, true, Mode::Section),
        Letter::M => span_family(bat, class, true, Mode::Iso),
        Letter::N => mkite_sections(bat, class, Mode::Section),
        Letter::O => mkite_sections(bat, class, Mode::Iso),
    }
}

fn graph_diagram(bat: &Battery, what: &str, g: &crate::structures::ReflexiveGraph) -> Witness {
    let mut b = DiagramBuilder::new();
    b.hom(&bat.wc, "d", &g.d);
    b.hom(&bat.wc, "c", &g.c);
    b.hom(&bat.wc, "e", &g.e);
    Witness { what: what.into(), diagram: b.done() }
}

fn span_diagram(bat: &Battery, what: &str, sp: &Span) -> Witness {
    let mut b = DiagramBuilder::new();
    b.span(&bat.wc, "span", sp);
    Witness { what: what.into(), diagram: b.done() }
}

/// Member graphs of the class, ascending by arrow-object size.
fn member_graphs(bat: &mut Battery, class: &SpanClass) -> Result<(Vec<usize>, bool), CatError> {
    let gs = bat.graphs()?;
    let mut capped = gs.capped;
    let mut idx = Vec::new();
    for (i, g) in gs.graphs.iter().enumerate() {
        let sp = Span::new(g.d.clone(), g.c.clone())?;
        let m = member(&mut bat.wc, class, &sp);
        capped |= m.capped;
        if m.member {
            idx.push(i);
        }
    }
    Ok((idx, capped))
}

/// Comparison between graphs-with-structure and reflexive graphs at one
/// structure level. Iso demands exactly one structure per member graph
/// and preservation along every graph morphism; Section demands at least
/// one everywhere and, when the choice is forced, the same preservation.
fn graph_structures(
    bat: &mut Battery,
    class: &SpanClass,
    level: GraphLevel,
    mode: Mode,
) -> Result<Eval, CatError> {
    let budget0 = bat.wc.work;
    let (members, mut capped) = member_graphs(bat, class)?;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in &members {
        let st = bat.graph_stats(i)?;
        let count = match level {
            GraphLevel::Unital => st.mults.len(),
            GraphLevel::Category => st.cats.len(),
            GraphLevel::Groupoid => st.grpds.len(),
        };
        if count == 0 {
            if !st.complete {
                capped = true;
                continue;
            }
            let g = bat.graphs()?.graphs[i].clone();
            let w = graph_diagram(
                bat,
                &format!("reflexive graph admitting no {}", level.what()),
                &g,
            );
            return Ok(Eval::fails(w, capped));
        }
        if count >= 2 && mode == Mode::Iso {
            let st = bat.graph_stats(i)?;
            let (m1, m2) = two_structures(&st, level);
            let g = bat.graphs()?.graphs[i].clone();
            let mut w = graph_diagram(
                bat,
                &format!("reflexive graph admitting two distinct {}s", level.what()),
                &g,
            );
            w.diagram.tuples.push(("m1".into(), m1));
            w.diagram.tuples.push(("m2".into(), m2));
            return Ok(Eval::fails(w, capped));
        }
        counts.insert(i, count);
    }
    if mode == Mode::Section && counts.values().any(|&c| c >= 2) {
        return Ok(Eval::open(
            format!(
                "every member graph carries a {}, but some carry several; \
                 no canonical choice was constructed",
                level.what()
            ),
            capped,
        ));
    }
    // All counts are one: the comparison functor is bijective on objects;
    // check preservation along every graph morphism.
    let live: Vec<usize> = counts.keys().copied().collect();
    for &i in &live {
        for &j in &live {
            if bat.wc.work - budget0 > LETTER_WORK_CAP {
                capped = true;
                break;
            }
            let maps = bat.graph_maps(i, j)?;
            capped |= !maps.complete;
            let sti = bat.graph_stats(i)?;
            let stj = bat.graph_stats(j)?;
            for (f1, _f0) in &maps.maps {
                if let Some((u, w)) = preservation_failure(&sti, &stj, f1, level) {
                    let gi = bat.graphs()?.graphs[i].clone();
                    let gj = bat.graphs()?.graphs[j].clone();
                    let mut b = DiagramBuilder::new();
                    b.hom(&bat.wc, "src.d", &gi.d);
                    b.hom(&bat.wc, "src.c", &gi.c);
                    b.hom(&bat.wc, "dst.d", &gj.d);
                    b.hom(&bat.wc, "dst.c", &gj.c);
                    b.hom(&bat.wc, "f", f1);
                    b.tuple("at pair", &[u, w]);
                    return Ok(Eval::fails(
                        Witness {
                            what: format!(
                                "graph morphism not preserving the unique {}",
                                level.what()
                            ),
                            diagram: b.done(),
                        },
                        capped,
                    ));
                }
            }
        }
    }
    let note = format!(
        "all {} member graphs carry exactly one {}, preserved by every graph morphism",
        live.len(),
        level.what()
    );
    let cert = match live.first() {
        Some(&i) => {
            let g = bat.graphs()?.graphs[i].clone();
            let st = bat.graph_stats(i)?;
            let mut w = graph_diagram(bat, "representative member graph with its structure", &g);
            let (m1, inv) = one_structure(&st, level);
            w.diagram.tuples.push(("m".into(), m1));
            if let Some(inv) = inv {
                w.diagram.tuples.push(("inv".into(), inv));
            }
            Some(w)
        }
        None => None,
    };
    Ok(Eval::holds(note, cert, capped))
}

fn structure_indices(st: &super::scope::GraphStats, level: GraphLevel) -> Vec<usize> {
    match level {
        GraphLevel::Unital => (0..st.mults.len()).collect(),
        GraphLevel::Category => st.cats.clone(),
        GraphLevel::Groupoid => st.grpds.iter().map(|&(k, _)| k).collect(),
    }
}

fn two_structures(st: &super::scope::GraphStats, level: GraphLevel) -> (Vec<El>, Vec<El>) {
    let idx = structure_indices(st, level);
    (st.mults[idx[0]].map.clone(), st.mults[idx[1]].map.clone())
}

fn one_structure(st: &super::scope::GraphStats, level: GraphLevel) -> (Vec<El>, Option<Vec<El>>) {
    let idx = structure_indices(st, level);
    let inv = match level {
        GraphLevel::Groupoid => st.grpds.first().map(|(_, i)| i.map.clone()),
        _ => None,
    };
    (st.mults[idx[0]].map.clone(), inv)
}

/// First composable pair where f1 fails to carry structure i to
/// structure j (or an inverse mismatch for groupoids).
fn preservation_failure(
    sti: &super::scope::GraphStats,
    stj: &super::scope::GraphStats,
    f1: &Hom,
    level: GraphLevel,
) -> Option<(El, El)> {
    let ki = structure_indices(sti, level)[0];
    let kj = structure_indices(stj, level)[0];
    let (mi, mj) = (&sti.mults[ki], &stj.mults[kj]);
    for (k, &(u, w)) in sti.pairs.pairs.iter().enumerate() {
        let el = sti.pairs.emb[k] as usize;
        let lhs = f1.map[mi.map[el] as usize];
        let el_j = stj.pairs.elem_of((f1.map[u as usize], f1.map[w as usize]))?;
        if lhs != mj.map[el_j as usize] {
            return Some((u, w));
        }
    }
    if level == GraphLevel::Groupoid {
        let ii = &sti.grpds[0].1;
        let ij = &stj.grpds[0].1;
        for u in 0..ii.map.len() {
            if f1.map[ii.map[u] as usize] != ij.map[f1.map[u] as usize] {
                return Some((u as El, u as El));
            }
        }
    }
    None
}

/// Comparison between spans-with-pregroupoid (optionally satisfying the
/// five-tuple law) and plain member spans.
fn span_family(
    bat: &mut Battery,
    class: &SpanClass,
    kock: bool,
    mode: Mode,
) -> Result<Eval, CatError> {
    let budget0 = bat.wc.work;
    let what = if kock { "five-law pregroupoid" } else { "pregroupoid" };
    let members = bat.member_set(class)?;
    let mut capped = members.capped;
    let mut counts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &si in &members.idx {
        let st = bat.span_stat(si)?;
        if st.skipped {
            capped = true;
            continue;
        }
        capped |= !st.complete;
        let keep: Vec<usize> = if kock {
            let flags = bat.kock_flags(si)?;
            (0..st.pre.len()).filter(|&k| flags[k]).collect()
        } else {
            (0..st.pre.len()).collect()
        };
        if keep.is_empty() {
            if !st.complete {
                continue;
            }
            let sp = bat.scope()?.spans[si].clone();
            let w = span_diagram(bat, &format!("member span admitting no {what}"), &sp);
            return Ok(Eval::fails(w, capped));
        }
        if keep.len() >= 2 && mode == Mode::Iso {
            let sp = bat.scope()?.spans[si].clone();
            let mut w =
                span_diagram(bat, &format!("member span admitting two distinct {what}s"), &sp);
            w.diagram.tuples.push(("p1".into(), st.pre[keep[0]].map.clone()));
            w.diagram.tuples.push(("p2".into(), st.pre[keep[1]].map.clone()));
            return Ok(Eval::fails(w, capped));
        }
        counts.insert(si, keep);
    }
    if mode == Mode::Section && counts.values().any(|k| k.len() >= 2) {
        if let Some(fam) = super::construct::natural_family(bat, class, kock)? {
            let note = format!(
                "every member span carries a {what}; a jointly natural choice exists \
                 ({} spans)",
                fam.len()
            );
            return Ok(Eval::holds(note, Some(fam.certificate(bat)), capped));
        }
        return Ok(Eval::open(
            format!(
                "every member span carries a {what}, but some carry several and no \
                 natural choice was constructed"
            ),
            capped,
        ));
    }
    // Forced family: verify naturality along every span morphism.
    let live: Vec<usize> = counts.keys().copied().collect();
    if let Some(w) = family_naturality(bat, &live, &counts, budget0, &mut capped)? {
        return Ok(Eval::fails(w, capped));
    }
    let note = format!(
        "all {} member spans carry exactly one {what}, natural along every span morphism",
        live.len()
    );
    let cert = match live.first() {
        Some(&si) => {
            let sp = bat.scope()?.spans[si].clone();
            let st = bat.span_stat(si)?;
            let mut w = span_diagram(bat, "representative member span with its structure", &sp);
            w.diagram.tuples.push(("p".into(), st.pre[counts[&si][0]].map.clone()));
            Some(w)
        }
        None => None,
    };
    Ok(Eval::holds(note, cert, capped))
}

/// First naturality failure of the forced family along any span morphism.
pub(super) fn family_naturality(
    bat: &mut Battery,
    live: &[usize],
    counts: &BTreeMap<usize, Vec<usize>>,
    budget0: u64,
    capped: &mut bool,
) -> Result<Option<Witness>, CatError> {
    for &i in live {
        for &j in live {
            if bat.wc.work - budget0 > LETTER_WORK_CAP {
                *capped = true;
                return Ok(None);
            }
            let maps = bat.span_maps(i, j)?;
            *capped |= !maps.complete;
            if maps.maps.is_empty() {
                continue;
            }
            let sti = bat.span_stat(i)?;
            let stj = bat.span_stat(j)?;
            let (kpi, kpj) = (sti.kp.clone().unwrap(), stj.kp.clone().unwrap());
            let pi = &sti.pre[counts[&i][0]];
            let pj = &stj.pre[counts[&j][0]];
            for f in &maps.maps {
                for (k, t) in kpi.triples.iter().enumerate() {
                    let el_i = kpi.emb[k] as usize;
                    let img = [
                        f.map[t[0] as usize],
                        f.map[t[1] as usize],
                        f.map[t[2] as usize],
                    ];
                    let el_j = kpj.elem_of(img).ok_or_else(|| {
                        CatError::Shape("span morphism does not preserve the triple filter".into())
                    })? as usize;
                    let got = pj.map[el_j];
                    let want = f.map[pi.map[el_i] as usize];
                    if got != want {
                        let spi = bat.scope()?.spans[i].clone();
                        let spj = bat.scope()?.spans[j].clone();
                        let mut b = DiagramBuilder::new();
                        b.span(&bat.wc, "src", &spi);
                        b.span(&bat.wc, "dst", &spj);
                        b.hom(&bat.wc, "f", f);
                        b.tuple("triple", t);
                        b.tuple("got", &[got]);
                        b.tuple("want", &[want]);
                        return Ok(Some(Witness {
                            what: "span morphism does not commute with the forced structures"
                                .into(),
                            diagram: b.done(),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Identity-block frame compatibility: over every pair of member spans
/// (relation with commuting sections, direction), every admissible frame
/// has exactly one filler.
fn frame_compatibility(bat: &mut Battery, class: &SpanClass) -> Result<Eval, CatError> {
    let budget0 = bat.wc.work;
    let members = bat.member_set(class)?;
    let mut capped = members.capped;
    let mut frames = 0u32;
    let idx = members.idx.clone();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for &ei in &idx {
        for &di in &idx {
            pairs.push((ei, di));
        }
    }
    let scope = bat.scope()?;
    pairs.sort_by_key(|&(ei, di)| {
        bat.wc.size(scope.spans[ei].apex) + bat.wc.size(scope.spans[di].apex)
    });
    if pairs.len() > super::scope::COMPAT_PAIR_CAP {
        pairs.truncate(super::scope::COMPAT_PAIR_CAP);
        capped = true;
    }
    for (ei, di) in pairs {
        if bat.wc.work - budget0 > LETTER_WORK_CAP {
            capped = true;
            break;
        }
        let cs = bat.compat_stats(ei, di)?;
        capped |= cs.capped;
        frames += cs.frames;
        if let Some(bad) = &cs.first_bad {
            let esp = bat.scope()?.spans[ei].clone();
            let dsp = bat.scope()?.spans[di].clone();
            let mut b = DiagramBuilder::new();
            b.span(&bat.wc, "rel", &esp);
            b.span(&bat.wc, "dir", &dsp);
            b.hom(&bat.wc, "e1", &bad.section.0);
            b.hom(&bat.wc, "e2", &bad.section.1);
            b.hom(&bat.wc, "alpha", &bad.alpha);
            b.hom(&bat.wc, "gamma", &bad.gamma);
            b.tuple("fillers", &[bad.count as El]);
            let what = if bad.count == 0 {
                "compatibility frame with no filler"
            } else {
                "compatibility frame with several fillers"
            };
            return Ok(Eval::fails(
                Witness { what: what.into(), diagram: b.done() },
                capped,
            ));
        }
    }
    Ok(Eval::holds(
        format!("every identity-block frame has exactly one filler ({frames} frames checked)"),
        None,
        capped,
    ))
}

/// Every directed kite whose direction is a member span admits exactly
/// one multiplication.
fn dikite_admissibility(bat: &mut Battery, class: &SpanClass) -> Result<Eval, CatError> {
    let budget0 = bat.wc.work;
    let members = bat.member_set(class)?;
    let mut capped = members.capped;
    let mut frames = 0u32;
    for &si in &members.idx.clone() {
        if bat.wc.work - budget0 > LETTER_WORK_CAP {
            capped = true;
            break;
        }
        let ds = bat.direction_stats(si)?;
        capped |= ds.capped;
        frames += ds.frames;
        if let Some(bad) = &ds.first_bad {
            let sp = bat.scope()?.spans[si].clone();
            let cos = bat.cospans()?;
            let case = &cos.cases[bad.case];
            let mut b = DiagramBuilder::new();
            b.span(&bat.wc, "dir", &sp);
            b.hom(&bat.wc, "f", &case.f);
            b.hom(&bat.wc, "r", &case.r);
            b.hom(&bat.wc, "g", &case.g);
            b.hom(&bat.wc, "s", &case.s);
            b.hom(&bat.wc, "alpha", &bad.alpha);
            b.hom(&bat.wc, "gamma", &bad.gamma);
            b.tuple("fillers", &[bad.count as El]);
            let what = if bad.count == 0 {
                "directed kite with no multiplication"
            } else {
                "directed kite with several multiplications"
            };
            return Ok(Eval::fails(
                Witness { what: what.into(), diagram: b.done() },
                capped,
            ));
        }
    }
    Ok(Eval::holds(
        format!("every directed kite over a member direction has exactly one multiplication ({frames} frames checked)"),
        None,
        capped,
    ))
}

/// Every member span carries a pseudo structure, and every structure map
/// on a commutative split square lifts uniquely through the square's
/// pullback.
fn pseudo_sections(bat: &mut Battery, class: &SpanClass) -> Result<Eval, CatError> {
    let budget0 = bat.wc.work;
    let members = bat.member_set(class)?;
    let mut capped = members.capped;
    for &si in &members.idx.clone() {
        let st = bat.span_stat(si)?;
        if st.skipped {
            capped = true;
            continue;
        }
        let (monic, n_pre) = (st.monic, st.pre.len());
        let sp = bat.scope()?.spans[si].clone();
        match ops::pseudo_exists(&mut bat.wc, &sp, monic, n_pre)? {
            PseudoExistence::Found => {}
            PseudoExistence::Absent(quad) => {
                let mut w =
                    span_diagram(bat, "member span admitting no pseudo structure", &sp);
                w.diagram.tuples.push(("quad".into(), quad.to_vec()));
                return Ok(Eval::fails(w, capped));
            }
            PseudoExistence::Unknown => capped = true,
        }
    }
    // Lifting along commutative split squares.
    let squares = bat.squares()?;
    capped |= squares.capped;
    let mut order: Vec<(usize, usize)> = Vec::new();
    for qi in 0..squares.cases.len() {
        for &di in &members.idx {
            order.push((qi, di));
        }
    }
    let scope = bat.scope()?;
    order.sort_by_key(|&(qi, di)| {
        bat.wc.size(squares.cases[qi].e.apex) + bat.wc.size(scope.spans[di].apex)
    });
    for (qi, di) in order {
        if bat.wc.work - budget0 > LETTER_WORK_CAP {
            capped = true;
            break;
        }
        let ls = bat.lift_stats(qi, di)?;
        capped |= ls.capped;
        if let Some(bad) = &ls.bad {
            let sqs = bat.squares()?;
            let sq = &sqs.cases[qi];
            let sp = bat.scope()?.spans[di].clone();
            let mut b = DiagramBuilder::new();
            b.span(&bat.wc, "sq", &sq.e);
            b.hom(&bat.wc, "e1", &sq.e1);
            b.hom(&bat.wc, "e2", &sq.e2);
            b.hom(&bat.wc, "f", &sq.f);
            b.hom(&bat.wc, "g", &sq.g);
            b.span(&bat.wc, "dir", &sp);
            b.hom(&bat.wc, "m", &bad.m);
            b.tuple("lifts", &[bad.count as El]);
            return Ok(Eval::fails(
                Witness {
                    what: "structure map on a split square without a unique lift".into(),
                    diagram: b.done(),
                },
                capped,
            ));
        }
    }
    Ok(Eval::holds(
        "every member span carries a pseudo structure and split-square maps lift uniquely"
            .into(),
        None,
        capped,
    ))
}

/// Comparison between multiplicative kites and directed kites, evaluated
/// through the induced-kite statistics: Iso requires every frame to have
/// exactly one filler; Section fails only on a frame with none.
fn mkite_sections(bat: &mut Battery, class: &SpanClass, mode: Mode) -> Result<Eval, CatError> {
    let budget0 = bat.wc.work;
    let members = bat.member_set(class)?;
    let mut capped = members.capped;
    let mut saw_many = false;
    for &si in &members.idx.clone() {
        if bat.wc.work - budget0 > LETTER_WORK_CAP {
            capped = true;
            break;
        }
        let ds = bat.direction_stats(si)?;
        capped |= ds.capped;
        let bad = match mode {
            Mode::Iso => ds.first_bad.clone(),
            Mode::Section => ds.first_zero.clone(),
        };
        if let Some(bad) = bad {
            let sp = bat.scope()?.spans[si].clone();
            let cos = bat.cospans()?;
            let case = &cos.cases[bad.case];
            let mut b = DiagramBuilder::new();
            b.span(&bat.wc, "dir", &sp);
            b.hom(&bat.wc, "f", &case.f);
            b.hom(&bat.wc, "g", &case.g);
            b.hom(&bat.wc, "alpha", &bad.alpha);
            b.hom(&bat.wc, "gamma", &bad.gamma);
            b.tuple("fillers", &[bad.count as El]);
            let what = if bad.count == 0 {
                "kite frame admitting no multiplication"
            } else {
                "kite frame admitting several multiplications"
            };
            return Ok(Eval::fails(Witness { what: what.into(), diagram: b.done() }, capped));
        }
        saw_many |= ds.first_bad.as_ref().map(|b| b.count >= 2).unwrap_or(false);
    }
    if mode == Mode::Section && saw_many {
        return Ok(Eval::open(
            "some kite frames have several multiplications; a functorial choice was not \
             constructed"
                .into(),
            capped,
        ));
    }
    Ok(Eval::holds(
        "every kite frame over a member direction is uniquely admissible; sections follow \
         from the induced directed kites"
            .into(),
        None,
        capped,
    ))
}

/// Exactly one pregroupoid everywhere, each satisfying the five-tuple law.
pub fn unique_associative_family(bat: &mut Battery, class: &SpanClass) -> Result<Eval, CatError> {
    let base = span_family(bat, class, false, Mode::Iso)?;
    if base.verdict != super::Verdict::True {
        return Ok(base);
    }
    let members = bat.member_set(class)?;
    for &si in &members.idx.clone() {
        let st = bat.span_stat(si)?;
        if st.skipped {
            continue;
        }
        let flags = bat.kock_flags(si)?;
        if let Some(k) = flags.iter().position(|&f| !f) {
            let sp = bat.scope()?.spans[si].clone();
            let mut w = span_diagram(
                bat,
                "unique pregroupoid violating the five-tuple associativity law",
                &sp,
            );
            w.diagram.tuples.push(("p".into(), st.pre[k].map.clone()));
            return Ok(Eval::fails(w, base.capped));
        }
    }
    let mut out = base;
    out.note = format!("{}; every structure satisfies the five-tuple law", out.note);
    Ok(out)
}

/// A single Mal'tsev operation natural across the whole battery.
pub fn natural_operation_condition(bat: &mut Battery) -> Result<Eval, CatError> {
    let nat = bat.natural()?;
    if let Some(ops) = &nat.ops {
        let mut b = DiagramBuilder::new();
        for (k, p) in ops.iter().enumerate() {
            if bat.wc.is_base(nat.carriers[k].base) {
                b.tuple(format!("p[{}]", bat.wc.name(nat.carriers[k].base)), &p.map);
            }
        }
        let cert = Witness {
            what: "jointly natural Mal'tsev operation on the battery".into(),
            diagram: b.done(),
        };
        return Ok(Eval::holds(
            "a single Mal'tsev operation is natural across the battery".into(),
            Some(cert),
            !nat.cand_complete || !nat.nat_complete,
        ));
    }
    if let Some(o) = nat.empty_base {
        if nat.cand_complete {
            let w = Witness::bare(format!(
                "object {} admits no Mal'tsev operation",
                bat.wc.name(o)
            ));
            return Ok(Eval::fails(w, false));
        }
        return Ok(Eval::open("candidate operation search was truncated".into(), true));
    }
    if nat.cand_complete && nat.nat_complete {
        if let Some(w) = &nat.witness {
            let mut b = DiagramBuilder::new();
            b.hom(&bat.wc, "h", &w.hom);
            b.tuple("at", &w.at);
            b.tuple("got", &[w.got]);
            b.tuple("want", &[w.want]);
            for (o, p) in &w.ops {
                b.tuple(format!("p[{}]", bat.wc.name(*o)), &p.map);
            }
            return Ok(Eval::fails(
                Witness {
                    what: "no candidate family is natural; first obstructing square shown"
                        .into(),
                    diagram: b.done(),
                },
                false,
            ));
        }
    }
    Ok(Eval::open(
        "the natural operation search was truncated before a verdict".into(),
        true,
    ))
}

/// The comparison from each split square into its pullback splits
/// uniquely.
pub fn comparison_sections(bat: &mut Battery) -> Result<Eval, CatError> {
    use crate::algebra::hom::{search_maps, Candidates, SearchSpec};
    let squares = bat.squares()?;
    let mut capped = squares.capped;
    for sq in squares.cases.iter() {
        let n_pb = bat.wc.size(sq.pb.obj);
        let n_e = bat.wc.size(sq.e.apex);
        let mut cands = Candidates::none(n_pb, n_e);
        for w in 0..n_e {
            let pair = (sq.e.d.map[w], sq.e.c.map[w]);
            if let Some(el) = sq.pb.elem_of(pair) {
                cands.allow(el as usize, w as El);
            }
        }
        if cands.first_empty(n_pb).is_some() {
            let mut b = DiagramBuilder::new();
            b.span(&bat.wc, "sq", &sq.e);
            b.hom(&bat.wc, "f", &sq.f);
            b.hom(&bat.wc, "g", &sq.g);
            return Ok(Eval::fails(
                Witness {
                    what: "split square whose comparison to the pullback hits an empty fiber"
                        .into(),
                    diagram: b.done(),
                },
                capped,
            ));
        }
        let mut forced = Vec::new();
        for a in 0..sq.f.map.len() {
            let sf = sq.s.map[sq.f.map[a] as usize];
            let el = sq.pb.elem_of((a as El, sf)).ok_or_else(|| {
                CatError::Shape("square injection misses the pullback".into())
            })?;
            forced.push((el, sq.e1.map[a]));
        }
        for c in 0..sq.g.map.len() {
            let rg = sq.r.map[sq.g.map[c] as usize];
            let el = sq.pb.elem_of((rg, c as El)).ok_or_else(|| {
                CatError::Shape("square injection misses the pullback".into())
            })?;
            forced.push((el, sq.e2.map[c]));
        }
        let vp = bat.wc.view(sq.pb.obj);
        let ve = bat.wc.view(sq.e.apex);
        let spec = SearchSpec { forced: &forced, limit: 2, max_work: ops::STRUCT_WORK_CAP };
        let out = search_maps(&vp, &ve, &cands, &spec, &mut bat.wc.work);
        capped |= out.capped();
        let n = out.maps().len();
        let definitive = n >= 2 || !out.capped();
        if definitive && n != 1 {
            let mut b = DiagramBuilder::new();
            b.span(&bat.wc, "sq", &sq.e);
            b.hom(&bat.wc, "e1", &sq.e1);
            b.hom(&bat.wc, "e2", &sq.e2);
            b.hom(&bat.wc, "f", &sq.f);
            b.hom(&bat.wc, "g", &sq.g);
            b.tuple("sections", &[n as El]);
            let what = if n == 0 {
                "split square whose pullback comparison has no unit-compatible section"
            } else {
                "split square whose pullback comparison has several sections"
            };
            return Ok(Eval::fails(Witness { what: what.into(), diagram: b.done() }, capped));
        }
    }
    Ok(Eval::holds(
        format!(
            "the comparison into the pullback splits uniquely on all {} squares",
            squares.cases.len()
        ),
        None,
        capped,
    ))
}

/// Identity-block frames restricted to local products: same filler
/// condition, quantified over the canonical squares only.
pub fn local_coproducts(bat: &mut Battery, class: &SpanClass) -> Result<Eval, CatError> {
    let budget0 = bat.wc.work;
    let members = bat.member_set(class)?;
    let squares = bat.squares()?;
    let mut capped = members.capped || squares.capped;
    let lp_squares: Vec<usize> = (0..squares.cases.len())
        .filter(|&qi| squares.cases[qi].from_local_product)
        .collect();
    let mut frames = 0u32;
    for &qi in &lp_squares {
        let (esp, e1, e2) = {
            let sq = &bat.squares()?.cases[qi];
            (sq.e.clone(), sq.e1.clone(), sq.e2.clone())
        };
        for &di in &members.idx.clone() {
            if bat.wc.work - budget0 > LETTER_WORK_CAP {
                capped = true;
                break;
            }
            let dsp = bat.scope()?.spans[di].clone();
            let monic =
                crate::category::predicates::jointly_monic_witness(&bat.wc, &dsp).is_none();
            let ascan = bat.homs_capped(esp.d.dst, dsp.apex);
            let mut scan = ops::ConfigScan { frames: 0, first_bad: None, capped: !ascan.complete };
            let budget = LETTER_WORK_CAP.saturating_sub(bat.wc.work - budget0).max(1);
            ops::config_scan(
                &mut bat.wc,
                &esp,
                &e1,
                &e2,
                &dsp,
                monic,
                &ascan.homs.clone(),
                budget,
                &mut scan,
            )?;
            frames += scan.frames;
            capped |= scan.capped;
            if let Some((alpha, gamma, count)) = scan.first_bad {
                let mut b = DiagramBuilder::new();
                b.span(&bat.wc, "lp", &esp);
                b.hom(&bat.wc, "e1", &e1);
                b.hom(&bat.wc, "e2", &e2);
                b.span(&bat.wc, "dir", &dsp);
                b.hom(&bat.wc, "alpha", &alpha);
                b.hom(&bat.wc, "gamma", &gamma);
                b.tuple("fillers", &[count as El]);
                let what = if count == 0 {
                    "local-product frame with no filler"
                } else {
                    "local-product frame with several fillers"
                };
                return Ok(Eval::fails(Witness { what: what.into(), diagram: b.done() }, capped));
            }
        }
    }
    Ok(Eval::holds(
        format!(
            "interpreted as identity-block frames over local products: every frame has \
             exactly one filler ({frames} frames over {} squares)",
            lp_squares.len()
        ),
        None,
        capped,
    ))
}

/// The two canonical injections into every local product are jointly
/// epic.
pub fn local_product_cospans_epic(bat: &mut Battery) -> Result<Eval, CatError> {
    let mut truncated = false;
    let mut lps = Vec::new();
    for_each_local_product(&mut bat.wc, &mut truncated, |_, lp| {
        lps.push(lp.clone());
        true
    });
    let mut capped = truncated;
    let mut n = 0usize;
    for lp in lps {
        n += 1;
        let rep = jointly_epic(&mut bat.wc, &lp.ss.e1, &lp.ss.e2);
        if !rep.epic {
            let mut b = DiagramBuilder::new();
            b.hom(&bat.wc, "e1", &lp.ss.e1);
            b.hom(&bat.wc, "e2", &lp.ss.e2);
            b.hom(&bat.wc, "p1", &lp.ss.p1);
            b.hom(&bat.wc, "p2", &lp.ss.p2);
            if let Some((_, u1, u2)) = &rep.witness {
                b.hom(&bat.wc, "u1", u1);
                b.hom(&bat.wc, "u2", u2);
            }
            return Ok(Eval::fails(
                Witness {
                    what: "local product whose canonical injections are not jointly epic"
                        .into(),
                    diagram: b.done(),
                },
                capped,
            ));
        }
    }
    Ok(Eval::holds(
        format!("canonical injections are jointly epic on all {n} local products"),
        None,
        capped,
    ))
}

/// Every reflexive member relation satisfies the law: Tolerance needs
/// symmetry, Preorder transitivity, Equivalence both.
pub fn reflexive_family(
    bat: &mut Battery,
    class: &SpanClass,
    law: RelLaw,
) -> Result<Eval, CatError> {
    let (members, mut capped) = member_graphs(bat, class)?;
    let mut n = 0usize;
    for &i in &members {
        let g = bat.graphs()?.graphs[i].clone();
        let sp = Span::new(g.d.clone(), g.c.clone())?;
        if crate::category::predicates::jointly_monic_witness(&bat.wc, &sp).is_some() {
            continue;
        }
        n += 1;
        let pairs = image_relation(&sp);
        let laws = ops::relation_laws(&pairs);
        let sym_needed = matches!(law, RelLaw::Tolerance | RelLaw::Equivalence);
        let trans_needed = matches!(law, RelLaw::Preorder | RelLaw::Equivalence);
        if sym_needed {
            if let Some((x, y)) = laws.symmetric {
                let mut w = graph_diagram(bat, "reflexive member relation that is not symmetric", &g);
                w.diagram.tuples.push(("pair".into(), alloc::vec![x, y]));
                return Ok(Eval::fails(w, capped));
            }
        }
        if trans_needed {
            if let Some((x, y, z)) = laws.transitive {
                let mut w =
                    graph_diagram(bat, "reflexive member relation that is not transitive", &g);
                w.diagram.tuples.push(("chain".into(), alloc::vec![x, y, z]));
                return Ok(Eval::fails(w, capped));
            }
        }
    }
    let what = match law {
        RelLaw::Tolerance => "a tolerance",
        RelLaw::Preorder => "a preorder",
        RelLaw::Equivalence => "an equivalence",
    };
    Ok(Eval::holds(
        format!("every reflexive member relation is {what} ({n} relations checked)"),
        None,
        capped,
    ))
}

/// Every member relation is difunctional.
pub fn difunctional_family(bat: &mut Battery, class: &SpanClass) -> Result<Eval, CatError> {
    let members = bat.member_set(class)?;
    let mut capped = members.capped;
    let mut n = 0usize;
    for &si in &members.idx.clone() {
        let sp = bat.scope()?.spans[si].clone();
        if crate::category::predicates::jointly_monic_witness(&bat.wc, &sp).is_some() {
            continue;
        }
        n += 1;
        let pairs = image_relation(&sp);
        if let Some(chain) = ops::difunctional_witness(&pairs) {
            let mut w = span_diagram(bat, "member relation that is not difunctional", &sp);
            let flat: Vec<El> =
                chain.iter().flat_map(|&(x, y)| alloc::vec![x, y]).collect();
            w.diagram.tuples.push(("zigzag".into(), flat));
            return Ok(Eval::fails(w, capped));
        }
    }
    Ok(Eval::holds(
        format!("every member relation is difunctional ({n} relations checked)"),
        None,
        capped,
    ))
}

/// Exactly one pregroupoid on every member span.
pub fn canonical_everywhere(bat: &mut Battery, class: &SpanClass) -> Result<Eval, CatError> {
    let members = bat.member_set(class)?;
    let mut capped = members.capped;
    let mut n = 0usize;
    for &si in &members.idx.clone() {
        let st = bat.span_stat(si)?;
        if st.skipped {
            capped = true;
            continue;
        }
        capped |= !st.complete;
        if st.pre.is_empty() && st.complete {
            let sp = bat.scope()?.spans[si].clone();
            let w = span_diagram(bat, "member span admitting no pregroupoid", &sp);
            return Ok(Eval::fails(w, capped));
        }
        if st.pre.len() >= 2 {
            let sp = bat.scope()?.spans[si].clone();
            let mut w =
                span_diagram(bat, "member span admitting two distinct pregroupoids", &sp);
            w.diagram.tuples.push(("p1".into(), st.pre[0].map.clone()));
            w.diagram.tuples.push(("p2".into(), st.pre[1].map.clone()));
            return Ok(Eval::fails(w, capped));
        }
        n += 1;
    }
    Ok(Eval::holds(
        format!("every member span carries exactly one pregroupoid ({n} spans checked)"),
        None,
        capped,
    ))
}
