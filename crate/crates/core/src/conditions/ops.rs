//! Search primitives shared by the condition checkers: one filler engine
//! behind every unique-multiplication quantifier, section enumeration,
//! groupoid inverses, pregroupoid transport, relation laws, pseudo
//! structure existence, and the admissibility signature.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::hom::{search_maps, Candidates, SearchSpec};
use crate::algebra::El;
use crate::category::limits::{box_construction, KpConstruction, Pullback};
use crate::category::predicates::jointly_monic_witness;
use crate::category::{CatError, Hom, ObjId, Span, WorkingCategory};
use crate::classes::SpanClass;
use crate::structures::{
    DirectedKite, InternalGroupoid, MultGraph, Multiplication, Pseudogroupoid,
};

use super::scope::{Battery, CospanCase, SECTION_CAP};

/// Work budget for one structure-map search.
pub const STRUCT_WORK_CAP: u64 = 1 << 22;
/// Largest box carrier the pseudo search will materialize.
pub const BOX_QUADS_CAP: usize = 4096;
/// Filler solutions validated per pseudo search.
pub const PSEUDO_TRY: usize = 64;

pub struct Fillers {
    pub maps: Vec<Hom>,
    /// The search ran to exhaustion (or to its requested limit).
    pub complete: bool,
}

impl Fillers {
    /// Whether the filler count is provably not exactly one: two found,
    /// or an exhausted search with zero.
    pub fn is_bad(&self) -> bool {
        self.maps.len() >= 2 || (self.complete && self.maps.is_empty())
    }
}

/// Maps from `carrier` into the span apex with d·m and c·m pinned cellwise
/// by (gamma ∘ proj2, alpha ∘ proj1) and the listed cells forced. For a
/// jointly monic span the entire map is forced and no search runs.
#[allow(clippy::too_many_arguments)]
pub fn fillers_on(
    wc: &mut WorkingCategory,
    carrier: ObjId,
    proj1: &[El],
    proj2: &[El],
    forced: &[(El, El)],
    alpha: &[El],
    gamma: &[El],
    sp: &Span,
    monic: bool,
    limit: usize,
) -> Result<Fillers, CatError> {
    let n = wc.size(carrier);
    let napex = wc.size(sp.apex);
    let (d, c) = (&sp.d.map, &sp.c.map);
    let empty = || Fillers { maps: Vec::new(), complete: true };
    if monic {
        wc.work += n as u64;
        let mut lookup: BTreeMap<(El, El), El> = BTreeMap::new();
        for v in 0..napex {
            lookup.insert((d[v], c[v]), v as El);
        }
        let mut map = Vec::with_capacity(n);
        for w in 0..n {
            let td = d[gamma[proj2[w] as usize] as usize];
            let tc = c[alpha[proj1[w] as usize] as usize];
            match lookup.get(&(td, tc)) {
                Some(&v) => map.push(v),
                None => return Ok(empty()),
            }
        }
        if forced.iter().any(|&(e, v)| map[e as usize] != v) {
            return Ok(empty());
        }
        let h = Hom { src: carrier, dst: sp.apex, map };
        if wc.check_hom(&h) {
            return Ok(Fillers { maps: vec![h], complete: true });
        }
        return Ok(empty());
    }
    let mut by_sig: BTreeMap<(El, El), Vec<El>> = BTreeMap::new();
    for v in 0..napex {
        by_sig.entry((d[v], c[v])).or_default().push(v as El);
    }
    let mut cands = Candidates::none(n, napex);
    for w in 0..n {
        let td = d[gamma[proj2[w] as usize] as usize];
        let tc = c[alpha[proj1[w] as usize] as usize];
        if let Some(vs) = by_sig.get(&(td, tc)) {
            for &v in vs {
                cands.allow(w, v);
            }
        }
    }
    if cands.first_empty(n).is_some() {
        return Ok(empty());
    }
    let vs = wc.view(carrier);
    let vd = wc.view(sp.apex);
    let spec = SearchSpec { forced, limit, max_work: STRUCT_WORK_CAP };
    let out = search_maps(&vs, &vd, &cands, &spec, &mut wc.work);
    let complete = !out.capped();
    let maps = out
        .into_maps()
        .into_iter()
        .map(|map| Hom { src: carrier, dst: sp.apex, map })
        .collect();
    Ok(Fillers { maps, complete })
}

/// Multiplications on a directed kite: the filler engine on the split
/// pullback of (f, g), with the two injections forced to alpha and gamma.
pub fn kite_multiplications(
    wc: &mut WorkingCategory,
    kite: &DirectedKite,
    limit: usize,
) -> Result<(Pullback, Vec<Hom>, bool), CatError> {
    let pb = Multiplication::pullback(wc, kite)?;
    let monic = jointly_monic_witness(wc, &kite.span).is_none();
    let n_pb = wc.size(pb.obj);
    let mut proj1 = vec![0 as El; n_pb];
    let mut proj2 = vec![0 as El; n_pb];
    for (k, &(x, y)) in pb.pairs.iter().enumerate() {
        let el = pb.emb[k] as usize;
        proj1[el] = x;
        proj2[el] = y;
    }
    let mut forced = Vec::new();
    let pin = |x: El, y: El| {
        pb.elem_of((x, y))
            .ok_or_else(|| CatError::Shape("kite injection misses the pullback".into()))
    };
    for x in 0..wc.size(kite.a()) as El {
        let other = kite.s.map[kite.f.map[x as usize] as usize];
        forced.push((pin(x, other)?, kite.alpha.map[x as usize]));
    }
    for y in 0..wc.size(kite.c()) as El {
        let other = kite.r.map[kite.g.map[y as usize] as usize];
        forced.push((pin(other, y)?, kite.gamma.map[y as usize]));
    }
    let fill = fillers_on(
        wc,
        pb.obj,
        &proj1,
        &proj2,
        &forced,
        &kite.alpha.map,
        &kite.gamma.map,
        &kite.span,
        monic,
        limit,
    )?;
    Ok((pb, fill.maps, fill.complete))
}

/// Validated multiplications on a directed kite.
pub fn find_multiplications(
    wc: &mut WorkingCategory,
    kite: &DirectedKite,
    limit: usize,
) -> Result<(Vec<Multiplication>, bool), CatError> {
    let (pb, maps, complete) = kite_multiplications(wc, kite, limit)?;
    let mut out = Vec::new();
    for m in maps {
        let mul = Multiplication::new(kite.clone(), pb.clone(), m)?;
        if !mul.validate(wc)?.is_valid() {
            return Err(CatError::Shape("filler engine produced an invalid multiplication".into()));
        }
        out.push(mul);
    }
    Ok((out, complete))
}

/// Fillers for a frame (alpha, gamma) over a split cospan case, on the
/// shared pullback.
#[allow(clippy::too_many_arguments)]
pub fn pullback_fillers(
    wc: &mut WorkingCategory,
    pb: &Pullback,
    case: &CospanCase,
    alpha: &Hom,
    gamma: &Hom,
    sp: &Span,
    monic: bool,
    limit: usize,
) -> Result<Fillers, CatError> {
    let n_pb = wc.size(pb.obj);
    let mut proj1 = vec![0 as El; n_pb];
    let mut proj2 = vec![0 as El; n_pb];
    for (k, &(x, y)) in pb.pairs.iter().enumerate() {
        let el = pb.emb[k] as usize;
        proj1[el] = x;
        proj2[el] = y;
    }
    let mut forced = Vec::new();
    let pin = |x: El, y: El| {
        pb.elem_of((x, y))
            .ok_or_else(|| CatError::Shape("frame injection misses the pullback".into()))
    };
    for x in 0..alpha.map.len() {
        let other = case.s.map[case.f.map[x] as usize];
        forced.push((pin(x as El, other)?, alpha.map[x]));
    }
    for y in 0..gamma.map.len() {
        let other = case.r.map[case.g.map[y] as usize];
        forced.push((pin(other, y as El)?, gamma.map[y]));
    }
    fillers_on(wc, pb.obj, &proj1, &proj2, &forced, &alpha.map, &gamma.map, sp, monic, limit)
}

/// The same filler engine with explicit injections, for callers that built
/// the carrier themselves.
#[allow(clippy::too_many_arguments)]
pub fn raw_fillers(
    wc: &mut WorkingCategory,
    carrier: ObjId,
    pairs: &[(El, El)],
    emb: &[El],
    pbe1: &[El],
    alpha: &[El],
    pbe2: &[El],
    gamma: &[El],
    sp: &Span,
    monic: bool,
    limit: usize,
) -> Result<Fillers, CatError> {
    let n = wc.size(carrier);
    let mut proj1 = vec![0 as El; n];
    let mut proj2 = vec![0 as El; n];
    for (k, &(x, y)) in pairs.iter().enumerate() {
        let el = emb[k] as usize;
        proj1[el] = x;
        proj2[el] = y;
    }
    let mut forced = Vec::new();
    for (a, &el) in pbe1.iter().enumerate() {
        forced.push((el, alpha[a]));
    }
    for (c, &el) in pbe2.iter().enumerate() {
        forced.push((el, gamma[c]));
    }
    fillers_on(wc, carrier, &proj1, &proj2, &forced, alpha, gamma, sp, monic, limit)
}

/// All sections of f up to `cap`. A non-surjective hom has none.
pub fn sections_of(
    wc: &mut WorkingCategory,
    f: &Hom,
    cap: usize,
) -> Result<(Vec<Hom>, bool), CatError> {
    let ns = wc.size(f.src);
    let nd = wc.size(f.dst);
    let mut cands = Candidates::none(nd, ns);
    for (x, &b) in f.map.iter().enumerate() {
        cands.allow(b as usize, x as El);
    }
    if cands.first_empty(nd).is_some() {
        return Ok((Vec::new(), false));
    }
    let vd = wc.view(f.dst);
    let vs = wc.view(f.src);
    let spec = SearchSpec { forced: &[], limit: cap + 1, max_work: STRUCT_WORK_CAP };
    let out = search_maps(&vd, &vs, &cands, &spec, &mut wc.work);
    let capped = out.capped() || out.maps().len() > cap;
    let mut maps = out.into_maps();
    maps.truncate(cap);
    let homs = maps.into_iter().map(|map| Hom { src: f.dst, dst: f.src, map }).collect();
    Ok((homs, capped))
}

/// The unique two-sided inverse map of a multiplicative graph that is
/// already a category, if the graph is a groupoid.
pub fn groupoid_inverse(wc: &WorkingCategory, mg: &MultGraph) -> Option<Hom> {
    let g = &mg.graph;
    let n1 = wc.size(g.c1);
    let mut imap = Vec::with_capacity(n1);
    for u in 0..n1 as El {
        let (du, cu) = (g.d.map[u as usize], g.c.map[u as usize]);
        let mut found: Option<El> = None;
        for v in 0..n1 as El {
            if g.d.map[v as usize] != cu || g.c.map[v as usize] != du {
                continue;
            }
            let uv = mg.elem_of_pair(u, v)?;
            let vu = mg.elem_of_pair(v, u)?;
            if mg.m.map[uv as usize] == g.e.map[cu as usize]
                && mg.m.map[vu as usize] == g.e.map[du as usize]
            {
                if found.is_some() {
                    return None;
                }
                found = Some(v);
            }
        }
        imap.push(found?);
    }
    let i = Hom { src: g.c1, dst: g.c1, map: imap };
    if !wc.check_hom(&i) {
        return None;
    }
    let ig = InternalGroupoid::new(mg.clone(), i.clone()).ok()?;
    if ig.validate(wc).ok()?.is_valid() {
        Some(i)
    } else {
        None
    }
}

/// Transport a kite multiplication to the triple filter: the triple
/// (x, y, z) corresponds to the pullback pair ((x, y), (y, z)).
pub fn transport_to_triples(
    kp: &KpConstruction,
    pb: &Pullback,
    m: &Hom,
) -> Result<Hom, CatError> {
    let n = kp.triples.len();
    let mut map = vec![0 as El; n];
    for k in 0..n {
        let el = kp.emb[k] as usize;
        let u = kp.p1.map[el];
        let w = kp.p2.map[el];
        let pel = pb
            .elem_of((u, w))
            .ok_or_else(|| CatError::Shape("triple filter does not match the kite pullback".into()))?;
        map[el] = m.map[pel as usize];
    }
    Ok(Hom { src: kp.obj, dst: m.dst, map })
}

pub struct ConfigScan {
    pub frames: u32,
    /// (alpha, gamma, filler count) of the first bad frame.
    pub first_bad: Option<(Hom, Hom, usize)>,
    pub capped: bool,
}

/// Identity-block frames over a relation span with commuting sections
/// (e1, e2): enumerate every (alpha, gamma) satisfying the frame laws and
/// count fillers against the direction span. Stops at the first frame
/// whose count is provably not one, or when the budget runs out.
#[allow(clippy::too_many_arguments)]
pub fn config_scan(
    wc: &mut WorkingCategory,
    esp: &Span,
    e1: &Hom,
    e2: &Hom,
    dsp: &Span,
    monic: bool,
    ascan: &[Hom],
    budget: u64,
    scan: &mut ConfigScan,
) -> Result<(), CatError> {
    let start = wc.work;
    let ne = wc.size(esp.apex);
    let n_a = wc.size(esp.d.dst);
    let n_c = wc.size(esp.c.dst);
    let napex = wc.size(dsp.apex);
    let (d, c) = (dsp.d.map.clone(), dsp.c.map.clone());
    let p1 = esp.d.map.clone();
    let p2 = esp.c.map.clone();
    let aw: Vec<El> = (0..ne).map(|w| p1[e2.map[p2[w] as usize] as usize]).collect();
    let cw: Vec<El> = (0..ne).map(|w| p2[e1.map[p1[w] as usize] as usize]).collect();
    for alpha in ascan {
        if wc.work - start > budget {
            scan.capped = true;
            return Ok(());
        }
        wc.work += ne as u64;
        let balanced = (0..ne).all(|w| {
            d[alpha.map[p1[w] as usize] as usize] == d[alpha.map[aw[w] as usize] as usize]
        });
        if !balanced {
            continue;
        }
        // gamma is forced on the block composite and pinned cellwise by
        // the codomain law.
        let mut assigned = vec![El::MAX; n_c];
        let mut ok = true;
        for w in 0..ne {
            let t = alpha.map[aw[w] as usize];
            let y = cw[w] as usize;
            if assigned[y] == El::MAX {
                assigned[y] = t;
            } else if assigned[y] != t {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let mut cands = Candidates::full(n_c, napex);
        for w in 0..ne {
            let t = c[alpha.map[aw[w] as usize] as usize];
            cands.retain(p2[w] as usize, |v| c[v as usize] == t);
        }
        let forced_g: Vec<(El, El)> = assigned
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t != El::MAX)
            .map(|(y, &t)| (y as El, t))
            .collect();
        let vc = wc.view(esp.c.dst);
        let va = wc.view(dsp.apex);
        let remaining = budget.saturating_sub(wc.work - start).max(1);
        let spec = SearchSpec {
            forced: &forced_g,
            limit: SECTION_CAP,
            max_work: remaining.min(STRUCT_WORK_CAP),
        };
        let out = search_maps(&vc, &va, &cands, &spec, &mut wc.work);
        scan.capped |= out.capped() || out.maps().len() >= SECTION_CAP;
        for gmap in out.maps() {
            let gamma = Hom { src: esp.c.dst, dst: dsp.apex, map: gmap.clone() };
            scan.frames += 1;
            let mut forced = Vec::with_capacity(n_a + n_c);
            for a in 0..n_a {
                forced.push((e1.map[a], alpha.map[a]));
            }
            for y in 0..n_c {
                forced.push((e2.map[y], gamma.map[y]));
            }
            let fill = fillers_on(wc, esp.apex, &p1, &p2, &forced, &alpha.map, &gamma.map, dsp, monic, 2)?;
            scan.capped |= !fill.complete;
            if fill.is_bad() {
                scan.first_bad = Some((alpha.clone(), gamma, fill.maps.len()));
                return Ok(());
            }
        }
    }
    Ok(())
}

pub struct RelationLaws {
    /// A pair (x, y) in the relation with (y, x) missing.
    pub symmetric: Option<(El, El)>,
    /// A chain x R y R z with (x, z) missing.
    pub transitive: Option<(El, El, El)>,
}

pub fn relation_laws(pairs: &[(El, El)]) -> RelationLaws {
    let set: BTreeSet<(El, El)> = pairs.iter().copied().collect();
    let symmetric = pairs.iter().copied().find(|&(x, y)| !set.contains(&(y, x)));
    let mut transitive = None;
    'outer: for &(x, y) in pairs {
        for &(y2, z) in pairs {
            if y2 != y {
                continue;
            }
            if !set.contains(&(x, z)) {
                transitive = Some((x, y, z));
                break 'outer;
            }
        }
    }
    RelationLaws { symmetric, transitive }
}

/// A zig-zag x R y, z R y, z R w with (x, w) missing, if any.
pub fn difunctional_witness(pairs: &[(El, El)]) -> Option<[(El, El); 3]> {
    let set: BTreeSet<(El, El)> = pairs.iter().copied().collect();
    for &(x, y) in pairs {
        for &(z, y2) in pairs {
            if y2 != y {
                continue;
            }
            for &(z2, w) in pairs {
                if z2 != z {
                    continue;
                }
                if !set.contains(&(x, w)) {
                    return Some([(x, y), (z, y), (z, w)]);
                }
            }
        }
    }
    None
}

pub enum PseudoExistence {
    Found,
    /// No structure exists; the quad shape at fault.
    Absent([El; 4]),
    Unknown,
}

/// Whether a span carries a pseudo structure on its box. Any pregroupoid
/// transports, and on a jointly monic span the fourth projection is one;
/// otherwise run a bounded search on the box and validate each solution.
pub fn pseudo_exists(
    wc: &mut WorkingCategory,
    sp: &Span,
    monic: bool,
    pre_count: usize,
) -> Result<PseudoExistence, CatError> {
    if pre_count > 0 || monic {
        return Ok(PseudoExistence::Found);
    }
    let n = wc.size(sp.apex);
    let (d, c) = (&sp.d.map, &sp.c.map);
    let mut quads = 0usize;
    for x in 0..n {
        for y in 0..n {
            if d[x] != d[y] {
                continue;
            }
            for z in 0..n {
                if c[y] != c[z] {
                    continue;
                }
                for w in 0..n {
                    if d[z] == d[w] && c[w] == c[x] {
                        quads += 1;
                        if quads > BOX_QUADS_CAP {
                            return Ok(PseudoExistence::Unknown);
                        }
                    }
                }
            }
        }
    }
    let bx = box_construction(wc, sp)?;
    let nb = wc.size(bx.obj);
    let napex = n;
    let mut cands = Candidates::none(nb, napex);
    let mut forced = Vec::new();
    for (k, &[x, y, z, w]) in bx.quads.iter().enumerate() {
        let el = bx.emb[k];
        for v in 0..napex as El {
            if d[v as usize] == d[z as usize] && c[v as usize] == c[x as usize] {
                cands.allow(el as usize, v);
            }
        }
        if z == y && w == x {
            forced.push((el, x));
        }
        if x == y && w == z {
            forced.push((el, z));
        }
    }
    if let Some(e) = cands.first_empty(nb) {
        // Some quad's value cell is missing from the span image.
        let k = bx.emb.iter().position(|&el| el as usize == e).unwrap_or(e);
        return Ok(PseudoExistence::Absent(bx.quads[k]));
    }
    let vs = wc.view(bx.obj);
    let va = wc.view(sp.apex);
    let spec = SearchSpec { forced: &forced, limit: PSEUDO_TRY, max_work: STRUCT_WORK_CAP };
    let out = search_maps(&vs, &va, &cands, &spec, &mut wc.work);
    let exhaustive = !out.capped() && out.maps().len() < PSEUDO_TRY;
    for map in out.maps() {
        let m = Hom { src: bx.obj, dst: sp.apex, map: map.clone() };
        let ps = Pseudogroupoid::new(bx.clone(), m)?;
        if ps.validate(wc)?.is_valid() {
            return Ok(PseudoExistence::Found);
        }
    }
    if exhaustive {
        // Every candidate table violates independence of the fourth
        // variable; report the first quad pair shape.
        let quad = bx.quads.first().copied().unwrap_or([0; 4]);
        Ok(PseudoExistence::Absent(quad))
    } else {
        Ok(PseudoExistence::Unknown)
    }
}

/// The admissibility signature: every scope span (up to `size_bound`)
/// whose full frame scan finds exactly one filler everywhere.
pub fn maltsev_signature(
    wc: &WorkingCategory,
    size_bound: usize,
) -> Result<(SpanClass, bool), CatError> {
    let mut wc2 = wc.clone();
    wc2.bound = size_bound;
    let mut bat = Battery::new(&wc2, &SpanClass::all());
    let scope = bat.scope()?;
    let mut members = Vec::new();
    let mut capped = scope.truncated;
    for i in 0..scope.spans.len() {
        if bat.wc.size(scope.spans[i].apex) > size_bound {
            capped = true;
            continue;
        }
        let ds = bat.direction_stats(i)?;
        capped |= ds.capped;
        if ds.first_bad.is_none() && !ds.capped {
            members.push(scope.spans[i].clone());
        }
    }
    Ok((SpanClass::custom("signature", members), capped))
}
