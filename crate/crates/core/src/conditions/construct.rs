//! Constructions that produce internal structures rather than verdicts:
//! the canonical pregroupoid of a span, the groupoid a pregroupoid
//! induces on a reflexive graph, conversions between pregroupoids and
//! pseudo structures, natural choice families, and the kite
//! multiplication derived through the direction's triple filter.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::El;
use crate::category::limits::{box_construction, kp_construction, pullback_split};
use crate::category::{CatError, Hom, Span, WorkingCategory};
use crate::classes::SpanClass;
use crate::structures::{
    kite_of_graph, DirectedKite, InternalGroupoid, MultGraph, Multiplication, Pregroupoid,
    Pseudogroupoid, ReflexiveGraph,
};

use super::ops;
use super::scope::Battery;
use super::{DiagramBuilder, Witness};

fn shape(msg: &str) -> CatError {
    CatError::Shape(String::from(msg))
}

/// Pregroupoid structures on a span, up to `limit`, with a completeness
/// flag. Structures arrive through the induced kite on the kernel pairs
/// and are transported to tables on the triple filter.
pub fn pregroupoids(
    wc: &mut WorkingCategory,
    sp: &Span,
    limit: usize,
) -> Result<(Vec<Pregroupoid>, bool), CatError> {
    let kite = crate::structures::kite_of_span(wc, sp)?;
    let (pb, mults, complete) = ops::kite_multiplications(wc, &kite, limit)?;
    let kp = kp_construction(wc, sp)?;
    let mut out = Vec::new();
    for m in &mults {
        let p = ops::transport_to_triples(&kp, &pb, m)?;
        let pg = Pregroupoid::new(kp.clone(), p)?;
        if !pg.validate(wc)?.is_valid() {
            return Err(shape("kite multiplication did not transport to a pregroupoid"));
        }
        out.push(pg);
    }
    Ok((out, complete))
}

/// The canonical pregroupoid of a span: the unique structure on its
/// triple filter, when exactly one exists.
pub fn canonical_pregroupoid(
    wc: &mut WorkingCategory,
    sp: &Span,
) -> Result<Option<Pregroupoid>, CatError> {
    let (pgs, complete) = pregroupoids(wc, sp, 2)?;
    if complete && pgs.len() == 1 {
        Ok(pgs.into_iter().next())
    } else {
        Ok(None)
    }
}

/// Composition and inverse a pregroupoid induces on a reflexive graph
/// over the same span: m(u, w) = p(u, e d u, w) and i(u) = p(e d u, u, e c u).
/// None when the induced tables break a structure law.
pub fn groupoid_from_pregroupoid(
    wc: &mut WorkingCategory,
    graph: &ReflexiveGraph,
    pre: &Pregroupoid,
) -> Result<Option<InternalGroupoid>, CatError> {
    if pre.kp.span.d != graph.d || pre.kp.span.c != graph.c {
        return Err(shape("the pregroupoid does not live on the graph's span"));
    }
    let pairs = pullback_split(wc, &graph.d, &graph.c)?;
    let e = &graph.e;
    let mut map = vec![0 as El; wc.size(pairs.obj)];
    for (k, &(u, w)) in pairs.pairs.iter().enumerate() {
        let y = e.map[graph.d.map[u as usize] as usize];
        let v = pre
            .apply(u, y, w)
            .ok_or_else(|| shape("composable pair escapes the triple filter"))?;
        map[pairs.emb[k] as usize] = v;
    }
    let m = Hom { src: pairs.obj, dst: graph.c1, map };
    if !wc.check_hom(&m) {
        return Ok(None);
    }
    let mg = MultGraph::new(graph.clone(), pairs, m)?;
    if !mg.validate_category(wc)?.is_valid() {
        return Ok(None);
    }
    let n1 = wc.size(graph.c1);
    let mut imap = vec![0 as El; n1];
    for u in 0..n1 {
        let du = graph.d.map[u] as usize;
        let cu = graph.c.map[u] as usize;
        let v = pre
            .apply(e.map[du], u as El, e.map[cu])
            .ok_or_else(|| shape("inverse triple escapes the filter"))?;
        imap[u] = v;
    }
    let i = Hom { src: graph.c1, dst: graph.c1, map: imap };
    if !wc.check_hom(&i) {
        return Ok(None);
    }
    let gr = InternalGroupoid::new(mg, i)?;
    if !gr.validate(wc)?.is_valid() {
        return Ok(None);
    }
    Ok(Some(gr))
}

/// Extends a pregroupoid to the box filter by ignoring the fourth
/// corner: m(x,y,z,w) = p(x,y,z). The box laws follow from the triple
/// laws, so a validation failure is an engine fault.
pub fn pseudo_from_pregroupoid(
    wc: &mut WorkingCategory,
    pre: &Pregroupoid,
) -> Result<Pseudogroupoid, CatError> {
    let bx = box_construction(wc, &pre.kp.span)?;
    let mut map = vec![0 as El; wc.size(bx.obj)];
    for (k, q) in bx.quads.iter().enumerate() {
        let v = pre
            .apply(q[0], q[1], q[2])
            .ok_or_else(|| shape("box quad escapes the triple filter"))?;
        map[bx.emb[k] as usize] = v;
    }
    let m = Hom { src: bx.obj, dst: pre.kp.span.apex, map };
    let ps = Pseudogroupoid::new(bx, m)?;
    if !ps.validate(wc)?.is_valid() {
        return Err(shape("pregroupoid did not induce a pseudo structure"));
    }
    Ok(ps)
}

#[derive(Clone, Debug)]
pub enum ExtendError {
    /// A composable triple whose box admits no fourth corner.
    NonExtendable([El; 3]),
    /// The restricted table is not a morphism.
    NotHom,
    Cat(CatError),
}

impl From<CatError> for ExtendError {
    fn from(e: CatError) -> ExtendError {
        ExtendError::Cat(e)
    }
}

/// Restricts a pseudo structure to the triple filter by closing each
/// triple with any admissible fourth corner; the structure's
/// independence law makes the choice immaterial.
pub fn pseudo_to_pre(
    wc: &mut WorkingCategory,
    ps: &Pseudogroupoid,
) -> Result<Pregroupoid, ExtendError> {
    let sp = ps.bx.span.clone();
    let kp = kp_construction(wc, &sp)?;
    let mut map = vec![0 as El; wc.size(kp.obj)];
    let n = wc.size(sp.apex) as El;
    for (k, t) in kp.triples.iter().enumerate() {
        let [x, y, z] = *t;
        let mut found = None;
        for w in 0..n {
            if sp.d.map[z as usize] == sp.d.map[w as usize]
                && sp.c.map[w as usize] == sp.c.map[x as usize]
            {
                found = ps.bx.quad_elem([x, y, z, w]);
                if found.is_some() {
                    break;
                }
            }
        }
        let el = found.ok_or(ExtendError::NonExtendable([x, y, z]))?;
        map[kp.emb[k] as usize] = ps.m.map[el as usize];
    }
    let p = Hom { src: kp.obj, dst: sp.apex, map };
    if !wc.check_hom(&p) {
        return Err(ExtendError::NotHom);
    }
    let pg = Pregroupoid::new(kp, p)?;
    if !pg.validate(wc)?.is_valid() {
        return Err(ExtendError::Cat(shape("pseudo structure did not restrict to a pregroupoid")));
    }
    Ok(pg)
}

/// A choice of structure per member span that commutes with every span
/// morphism in scope.
pub struct NaturalFamily {
    /// (span, chosen table on its triple filter) per member.
    pub assignments: Vec<(Span, Hom)>,
}

impl NaturalFamily {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn certificate(&self, bat: &Battery) -> Witness {
        let mut b = DiagramBuilder::new();
        if let Some((sp, p)) = self.assignments.first() {
            b.span(&bat.wc, "span", sp);
            b.tuple("p", &p.map);
        }
        Witness {
            what: "natural choice of structures; representative member shown".into(),
            diagram: b.done(),
        }
    }
}

/// Attempts a canonical choice where spans carry several structures: the
/// unique associative one, when it exists everywhere. The family is
/// returned only if the choice commutes with every span morphism found
/// by a complete scan.
pub fn natural_family(
    bat: &mut Battery,
    class: &SpanClass,
    kock: bool,
) -> Result<Option<NaturalFamily>, CatError> {
    let budget0 = bat.wc.work;
    let members = bat.member_set(class)?;
    if members.capped {
        return Ok(None);
    }
    let mut counts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &si in &members.idx.clone() {
        let st = bat.span_stat(si)?;
        if st.skipped || !st.complete {
            return Ok(None);
        }
        let flags = bat.kock_flags(si)?;
        let keep: Vec<usize> = if kock {
            (0..st.pre.len()).filter(|&k| flags[k]).collect()
        } else {
            (0..st.pre.len()).collect()
        };
        let choice = match keep.len() {
            0 => return Ok(None),
            1 => keep[0],
            _ => {
                // Break ties by associativity when exactly one candidate
                // satisfies it.
                let assoc: Vec<usize> =
                    keep.iter().copied().filter(|&k| flags[k]).collect();
                if assoc.len() == 1 {
                    assoc[0]
                } else {
                    return Ok(None);
                }
            }
        };
        counts.insert(si, vec![choice]);
    }
    let live: Vec<usize> = counts.keys().copied().collect();
    let mut capped = false;
    let w = super::letters::family_naturality(bat, &live, &counts, budget0, &mut capped)?;
    if w.is_some() || capped {
        return Ok(None);
    }
    let scope = bat.scope()?;
    let mut assignments = Vec::new();
    for &si in &live {
        let st = bat.span_stat(si)?;
        assignments.push((scope.spans[si].clone(), st.pre[counts[&si][0]].clone()));
    }
    Ok(Some(NaturalFamily { assignments }))
}

/// A kite multiplication assembled through the direction span's triple
/// filter, with the flag showing whether the pullback's own filter
/// reproduces every element through the same assembly.
pub struct DerivedMultiplication {
    pub mult: Multiplication,
    pub roundtrip: bool,
}

/// Derives the kite multiplication from the unique structure on the
/// direction's triple filter: the filter carries a reflexive graph whose
/// own kite composes pairs of generated triples, and the middle
/// projection transports the composite back under the kite legs. None
/// when that intermediate structure is missing or ambiguous, or when the
/// assembled table breaks a kite law.
pub fn derive_multiplication(
    wc: &mut WorkingCategory,
    kite: &DirectedKite,
) -> Result<Option<DerivedMultiplication>, CatError> {
    let pb = pullback_split(wc, &kite.f, &kite.g)?;
    let (f, r, g, s) = (&kite.f, &kite.r, &kite.g, &kite.s);
    let (alpha, gamma) = (&kite.alpha, &kite.gamma);
    let na = wc.size(f.src);
    let nc = wc.size(g.src);
    let mut e1p = vec![0 as El; na];
    for a in 0..na {
        let sf = s.map[f.map[a] as usize];
        e1p[a] = pb
            .elem_of((a as El, sf))
            .ok_or_else(|| shape("kite pullback misses its first injection"))?;
    }
    let mut e2p = vec![0 as El; nc];
    for c in 0..nc {
        let rg = r.map[g.map[c] as usize];
        e2p[c] = pb
            .elem_of((rg, c as El))
            .ok_or_else(|| shape("kite pullback misses its second injection"))?;
    }

    // Direction-side filter, with roles swapped so that triples compose
    // like arrows: (x, y, z) with c x = c y and d y = d z.
    let kc = kp_construction(wc, &kite.span.swapped())?;
    let graph_d = ReflexiveGraph::new(kc.dom.clone(), kc.cod.clone(), kc.delta.clone())?;
    let kite_d = kite_of_graph(wc, &graph_d)?;
    let (pb_d, mults_d, complete_d) = ops::kite_multiplications(wc, &kite_d, 2)?;
    if mults_d.len() != 1 || !complete_d {
        return Ok(None);
    }
    let mu = &mults_d[0];

    let mut map = vec![0 as El; wc.size(pb.obj)];
    for (k, &(a, c)) in pb.pairs.iter().enumerate() {
        let aa = alpha.map[a as usize];
        let rgc = r.map[g.map[c as usize] as usize];
        let sfa = s.map[f.map[a as usize] as usize];
        let t1 = kc
            .elem_of([aa, aa, alpha.map[rgc as usize]])
            .ok_or_else(|| shape("generated triple escapes the swapped filter"))?;
        let gc = gamma.map[c as usize];
        let t2 = kc
            .elem_of([gamma.map[sfa as usize], gc, gc])
            .ok_or_else(|| shape("generated triple escapes the swapped filter"))?;
        let pair = pb_d
            .elem_of((t2, t1))
            .ok_or_else(|| shape("generated triples do not compose"))?;
        map[pb.emb[k] as usize] = kc.mid.map[mu.map[pair as usize] as usize];
    }
    let m = Hom { src: pb.obj, dst: kite.span.apex, map };
    if !wc.check_hom(&m) {
        return Ok(None);
    }
    let mult = Multiplication::new(kite.clone(), pb.clone(), m)?;
    if !mult.validate(wc)?.is_valid() {
        return Ok(None);
    }

    // Section property: assembling over the pullback's own filter must
    // reproduce each element.
    let sp_e = Span::new(pb.p1.clone(), pb.p2.clone())?;
    let ke = kp_construction(wc, &sp_e)?;
    let graph_e = ReflexiveGraph::new(ke.dom.clone(), ke.cod.clone(), ke.delta.clone())?;
    let kite_e = kite_of_graph(wc, &graph_e)?;
    let (pb_e, mults_e, complete_e) = ops::kite_multiplications(wc, &kite_e, 2)?;
    let mut roundtrip = false;
    if mults_e.len() == 1 && complete_e {
        let mue = &mults_e[0];
        roundtrip = true;
        for (k, &(a, c)) in pb.pairs.iter().enumerate() {
            let el = pb.emb[k];
            let rgc = r.map[g.map[c as usize] as usize] as usize;
            let sfa = s.map[f.map[a as usize] as usize] as usize;
            let t1 = ke
                .elem_of([e1p[a as usize], e1p[a as usize], e1p[rgc]])
                .ok_or_else(|| shape("injected triple escapes the pullback filter"))?;
            let t2 = ke
                .elem_of([e2p[sfa], e2p[c as usize], e2p[c as usize]])
                .ok_or_else(|| shape("injected triple escapes the pullback filter"))?;
            let pair = pb_e
                .elem_of((t2, t1))
                .ok_or_else(|| shape("injected triples do not compose"))?;
            if ke.mid.map[mue.map[pair as usize] as usize] != el {
                roundtrip = false;
                break;
            }
        }
    }
    Ok(Some(DerivedMultiplication { mult, roundtrip }))
}
