//! Shared evaluation state for one (category, class) pair. Every scan a
//! checker needs — span scope, reflexive graphs, structure counts, frame
//! statistics, commutative split squares, the natural-operation search —
//! is memoized here so that conditions sharing a quantification pay for
//! it once. All scans run smallest-first so counterexamples surface
//! before any cap, and every truncation is recorded in the result it
//! truncated.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::algebra::hom::{search_maps, Candidates, SearchSpec};
use crate::algebra::{subalgebra_closure, El};
use crate::category::limits::{kp_construction, pullback_split, KpConstruction, Pullback};
use crate::category::predicates::{for_each_local_product, jointly_monic_witness};
use crate::category::{CatError, Hom, ObjId, Span, WorkingCategory};
use crate::classes::{
    closed_under_kp, contains_local_products, member, span_scope, ClassKind, SpanClass, SpanScope,
};
use crate::structures::{kite_of_graph, kite_of_span, MultGraph, Pregroupoid, ReflexiveGraph};

use super::ops;

/// Hom scans between derived objects stop after this many homs.
pub const HOM_SCAN_CAP: usize = 4096;
/// Work budget for one hom scan.
pub const HOM_WORK_CAP: u64 = 1 << 22;
/// Multiplications materialized per kite or span.
pub const MULT_CAP: usize = 64;
/// Sections enumerated per split epi.
pub const SECTION_CAP: usize = 64;
/// Reflexive-relation graphs kept per carrier object.
pub const REFL_CAP: usize = 128;
/// Commutative split squares kept in the square scope.
pub const SQUARE_CAP: usize = 256;
/// Mal'tsev candidates kept per base.
pub const NATURAL_CAP: usize = 16;
/// Work budget for the candidate search on one base.
pub const NATURAL_WORK_CAP: u64 = 1 << 22;
/// Joint assignments tried before the natural-operation search gives up.
pub const ASSIGN_CAP: usize = 256;
/// Frame-search work budget per span (direction statistics).
pub const SPAN_FRAME_WORK: u64 = 1 << 19;
/// Frame-search work budget per (relation, direction) pair.
pub const PAIR_FRAME_WORK: u64 = 1 << 17;
/// (relation, direction) pairs examined per compatibility scan.
pub const COMPAT_PAIR_CAP: usize = 1024;
/// Work budget for one whole-letter scan loop.
pub const LETTER_WORK_CAP: u64 = 1 << 25;

/// Key for per-class memo tables.
fn class_key(class: &SpanClass) -> u8 {
    match class.kind {
        ClassKind::All => 0,
        ClassKind::Relations => 1,
        ClassKind::StrongRelations => 2,
        ClassKind::Custom => 3,
    }
}

#[derive(Clone, Debug)]
pub struct HomScan {
    pub homs: Vec<Hom>,
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct MemberSet {
    /// Indices into the span scope, ordered by ascending apex size.
    pub idx: Vec<usize>,
    pub capped: bool,
}

#[derive(Clone, Debug)]
pub struct GraphScope {
    pub graphs: Vec<ReflexiveGraph>,
    pub capped: bool,
}

/// Structure counts for one reflexive graph: all multiplications up to the
/// cap, which of them are associative, and which of those invert.
pub struct GraphStats {
    pub pairs: Pullback,
    pub mults: Vec<Hom>,
    pub complete: bool,
    /// Indices into `mults` satisfying associativity.
    pub cats: Vec<usize>,
    /// (index into `mults`, inverse) for the groupoid structures.
    pub grpds: Vec<(usize, Hom)>,
}

pub struct GraphMaps {
    /// (arrow map, vertex map) pairs forming graph morphisms i -> j.
    pub maps: Vec<(Hom, Hom)>,
    pub complete: bool,
}

/// Pregroupoid structures on one scope span.
pub struct SpanStat {
    pub monic: bool,
    /// Kernel-pair carrier exceeded the square of the bound; no data.
    pub skipped: bool,
    pub kp: Option<Rc<KpConstruction>>,
    /// Operation tables on the triple filter.
    pub pre: Vec<Hom>,
    pub complete: bool,
}

pub struct SpanMaps {
    /// Apex maps extending to span morphisms i -> j.
    pub maps: Vec<Hom>,
    pub complete: bool,
}

/// One split cospan over base feet, with the shared pullback of (f, g).
pub struct CospanCase {
    pub f: Hom,
    pub r: Hom,
    pub g: Hom,
    pub s: Hom,
    pub pb: Rc<Pullback>,
}

pub struct CospanScope {
    pub cases: Vec<CospanCase>,
    pub capped: bool,
}

#[derive(Clone, Debug)]
pub struct BadFrame {
    pub case: usize,
    pub alpha: Hom,
    pub gamma: Hom,
    /// Fillers found: 0, or 2 meaning "at least two".
    pub count: usize,
}

/// Frame statistics for one span used as a direction: every split cospan,
/// every admissible (alpha, gamma) pair, and the first frame whose filler
/// count is not exactly one. The scan stops early only once a zero-count
/// frame is found, so `first_zero` distinguishes missing fillers from
/// ambiguous ones.
pub struct DirectionStats {
    pub frames: u32,
    pub first_bad: Option<BadFrame>,
    pub first_zero: Option<BadFrame>,
    pub capped: bool,
}

#[derive(Clone, Debug)]
pub struct BadPair {
    pub section: (Hom, Hom),
    pub alpha: Hom,
    pub gamma: Hom,
    pub count: usize,
}

/// Frame statistics for one (relation, direction) pair under the
/// compatibility quantifier.
pub struct CompatStats {
    pub frames: u32,
    pub first_bad: Option<BadPair>,
    pub capped: bool,
}

/// Section pairs (e1, e2) of a span's legs with commuting idempotents.
pub struct SectionPairs {
    pub pairs: Vec<(Hom, Hom)>,
    pub capped: bool,
}

/// A commutative split square: split projections out of E, a split cospan
/// under it, and the pullback of (f, g) with its canonical sections.
pub struct SquareCase {
    pub e: Span,
    pub e1: Hom,
    pub e2: Hom,
    pub f: Hom,
    pub r: Hom,
    pub g: Hom,
    pub s: Hom,
    pub pb: Rc<Pullback>,
    pub from_local_product: bool,
}

pub struct SquareScope {
    pub cases: Vec<SquareCase>,
    pub capped: bool,
}

#[derive(Clone, Debug)]
pub struct BadLift {
    pub m: Hom,
    pub count: usize,
}

pub struct LiftStats {
    pub scanned: u32,
    pub bad: Option<BadLift>,
    pub capped: bool,
}

/// Triple power of one object with its own index bookkeeping, so cells
/// can be addressed without trusting coordinate order of merged objects.
pub struct TripleCarrier {
    pub base: ObjId,
    pub obj: ObjId,
    pub emb: Rc<Vec<El>>,
    pub n: usize,
}

impl TripleCarrier {
    pub fn elem(&self, x: El, y: El, z: El) -> El {
        self.emb[(x as usize * self.n + y as usize) * self.n + z as usize]
    }
}

pub struct NaturalWitness {
    pub src: ObjId,
    pub dst: ObjId,
    pub hom: Hom,
    pub at: [El; 3],
    pub got: El,
    pub want: El,
    /// Operation tables of the assignment the square obstructs.
    pub ops: Vec<(ObjId, Hom)>,
}

/// Result of the natural Mal'tsev operation search over the battery
/// objects: either a jointly natural family, or the obstruction hit by
/// the first candidate assignment, or neither when a cap interfered.
pub struct NaturalOutcome {
    pub carriers: Vec<TripleCarrier>,
    /// Index-aligned with `carriers`; Some when a natural family exists.
    pub ops: Option<Vec<Hom>>,
    pub witness: Option<NaturalWitness>,
    /// A base with no Mal'tsev term operation at all.
    pub empty_base: Option<ObjId>,
    /// Candidate enumeration was exhaustive on every base.
    pub cand_complete: bool,
    /// Naturality was checked against complete hom scans.
    pub nat_complete: bool,
}

pub struct Battery {
    pub wc: WorkingCategory,
    pub ambient: SpanClass,
    scope: Option<Rc<SpanScope>>,
    members: BTreeMap<u8, Rc<MemberSet>>,
    prechecks: BTreeMap<u8, (bool, bool)>,
    homscans: BTreeMap<(ObjId, ObjId), Rc<HomScan>>,
    graphs: Option<Rc<GraphScope>>,
    gstats: BTreeMap<usize, Rc<GraphStats>>,
    gmaps: BTreeMap<(usize, usize), Rc<GraphMaps>>,
    sstats: BTreeMap<usize, Rc<SpanStat>>,
    kocks: BTreeMap<usize, Rc<Vec<bool>>>,
    smaps: BTreeMap<(usize, usize), Rc<SpanMaps>>,
    cospans: Option<Rc<CospanScope>>,
    dstats: BTreeMap<usize, Rc<DirectionStats>>,
    sections: BTreeMap<usize, Rc<SectionPairs>>,
    cstats: BTreeMap<(usize, usize), Rc<CompatStats>>,
    squares: Option<Rc<SquareScope>>,
    lifts: BTreeMap<(usize, usize), Rc<LiftStats>>,
    natural: Option<Rc<NaturalOutcome>>,
}

impl Battery {
    pub fn new(wc: &WorkingCategory, ambient: &SpanClass) -> Battery {
        Battery {
            wc: wc.clone(),
            ambient: ambient.clone(),
            scope: None,
            members: BTreeMap::new(),
            prechecks: BTreeMap::new(),
            homscans: BTreeMap::new(),
            graphs: None,
            gstats: BTreeMap::new(),
            gmaps: BTreeMap::new(),
            sstats: BTreeMap::new(),
            kocks: BTreeMap::new(),
            smaps: BTreeMap::new(),
            cospans: None,
            dstats: BTreeMap::new(),
            sections: BTreeMap::new(),
            cstats: BTreeMap::new(),
            squares: None,
            lifts: BTreeMap::new(),
            natural: None,
        }
    }

    /// Span quantification scope; custom ambient members are appended so
    /// user-supplied spans get statistics too.
    pub fn scope(&mut self) -> Result<Rc<SpanScope>, CatError> {
        if let Some(s) = &self.scope {
            return Ok(s.clone());
        }
        let mut sc = span_scope(&mut self.wc)?;
        if self.ambient.kind == ClassKind::Custom {
            for sp in self.ambient.members.clone() {
                if !sc.spans.contains(&sp) {
                    sc.spans.push(sp);
                }
            }
        }
        let rc = Rc::new(sc);
        self.scope = Some(rc.clone());
        Ok(rc)
    }

    /// Closure prechecks for a class: kernel pairs stay in the class and
    /// every local product's span part is a member.
    pub fn precheck(&mut self, class: &SpanClass) -> Result<(bool, bool), CatError> {
        let key = class_key(class);
        if let Some(&hit) = self.prechecks.get(&key) {
            return Ok(hit);
        }
        let kp = closed_under_kp(&mut self.wc, class)?;
        let lp = contains_local_products(&mut self.wc, class);
        let out = (kp.holds && lp.holds, kp.capped || lp.capped);
        self.prechecks.insert(key, out);
        Ok(out)
    }

    pub fn member_set(&mut self, class: &SpanClass) -> Result<Rc<MemberSet>, CatError> {
        let key = class_key(class);
        if let Some(m) = self.members.get(&key) {
            return Ok(m.clone());
        }
        let scope = self.scope()?;
        let mut capped = scope.truncated;
        let mut idx = Vec::new();
        for (i, sp) in scope.spans.iter().enumerate() {
            let m = member(&mut self.wc, class, sp);
            capped |= m.capped;
            if m.member {
                idx.push(i);
            }
        }
        idx.sort_by_key(|&i| (self.wc.size(scope.spans[i].apex), i));
        let rc = Rc::new(MemberSet { idx, capped });
        self.members.insert(key, rc.clone());
        Ok(rc)
    }

    /// All homs a -> b up to the scan cap, lexicographically first.
    pub fn homs_capped(&mut self, a: ObjId, b: ObjId) -> Rc<HomScan> {
        if let Some(h) = self.homscans.get(&(a, b)) {
            return h.clone();
        }
        let va = self.wc.view(a);
        let vb = self.wc.view(b);
        let cands = Candidates::full(self.wc.size(a), self.wc.size(b));
        let spec = SearchSpec { forced: &[], limit: HOM_SCAN_CAP + 1, max_work: HOM_WORK_CAP };
        let out = search_maps(&va, &vb, &cands, &spec, &mut self.wc.work);
        let capped = out.capped();
        let mut maps = out.into_maps();
        let complete = !capped && maps.len() <= HOM_SCAN_CAP;
        maps.truncate(HOM_SCAN_CAP);
        let homs = maps.into_iter().map(|map| Hom { src: a, dst: b, map }).collect();
        let rc = Rc::new(HomScan { homs, complete });
        self.homscans.insert((a, b), rc.clone());
        rc
    }

    /// Reflexive graphs in scope: every reflexive relation on a battery
    /// object reachable by the subalgebra walk from the diagonal, plus
    /// every hom-span graph over base objects with each of its units.
    pub fn graphs(&mut self) -> Result<Rc<GraphScope>, CatError> {
        if let Some(g) = &self.graphs {
            return Ok(g.clone());
        }
        let mut capped = false;
        let mut seen: BTreeSet<(ObjId, ObjId, Vec<El>, Vec<El>, Vec<El>)> = BTreeSet::new();
        let mut graphs: Vec<ReflexiveGraph> = Vec::new();
        let mut keep = |g: ReflexiveGraph, graphs: &mut Vec<ReflexiveGraph>| {
            let key = (g.c1, g.c0, g.d.map.clone(), g.c.map.clone(), g.e.map.clone());
            if seen.insert(key) {
                graphs.push(g);
            }
        };

        let mut objs: Vec<ObjId> = self.wc.battery_objects().iter().copied().collect();
        objs.sort_by_key(|&o| (self.wc.size(o), o));
        for x in objs {
            let n = self.wc.size(x);
            if n * n > self.wc.bound {
                capped = true;
                continue;
            }
            let (p, p1, p2) = self.wc.product_pair(x, x)?;
            let full = Span::new(p1.clone(), p2.clone())?;
            let np = self.wc.size(p);
            let diag: Vec<El> = (0..np as El)
                .filter(|&el| p1.map[el as usize] == p2.map[el as usize])
                .collect();
            let view = self.wc.view(p);
            let seed = subalgebra_closure(&view, &diag, &mut self.wc.work);
            // Walk upward from the diagonal, smallest carriers first.
            let mut found: BTreeSet<Vec<El>> = BTreeSet::new();
            let mut worklist: BTreeSet<(usize, Vec<El>)> = BTreeSet::new();
            worklist.insert((seed.len(), seed));
            while let Some(first) = worklist.iter().next().cloned() {
                worklist.remove(&first);
                let (_, carrier) = first;
                if !found.insert(carrier.clone()) {
                    continue;
                }
                if found.len() >= REFL_CAP {
                    capped = true;
                    break;
                }
                for el in 0..np as El {
                    if carrier.binary_search(&el).is_ok() {
                        continue;
                    }
                    let mut seedw = carrier.clone();
                    seedw.push(el);
                    let mut cl = subalgebra_closure(&view, &seedw, &mut self.wc.work);
                    cl.sort_unstable();
                    if !found.contains(&cl) {
                        worklist.insert((cl.len(), cl));
                    }
                }
            }
            let mut carriers: Vec<Vec<El>> = found.into_iter().collect();
            carriers.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            for carrier in carriers {
                let sp = if carrier.len() == np {
                    full.clone()
                } else {
                    crate::classes::restrict_span(&mut self.wc, &full, &carrier)?
                };
                let na = self.wc.size(sp.apex);
                let mut emap = vec![El::MAX; n];
                for el in 0..na {
                    if sp.d.map[el] == sp.c.map[el] {
                        emap[sp.d.map[el] as usize] = el as El;
                    }
                }
                if emap.iter().any(|&e| e == El::MAX) {
                    continue;
                }
                let e = Hom { src: x, dst: sp.apex, map: emap };
                keep(ReflexiveGraph::new(sp.d.clone(), sp.c.clone(), e)?, &mut graphs);
            }
        }

        for c1 in 0..self.wc.n_bases() {
            for c0 in 0..self.wc.n_bases() {
                let legs = self.homs_capped(c1, c0);
                capped |= !legs.complete;
                let n0 = self.wc.size(c0);
                let n1 = self.wc.size(c1);
                for d in legs.homs.iter() {
                    for c in legs.homs.iter() {
                        let mut cands = Candidates::none(n0, n1);
                        for u in 0..n1 {
                            if d.map[u] == c.map[u] {
                                cands.allow(d.map[u] as usize, u as El);
                            }
                        }
                        if cands.first_empty(n0).is_some() {
                            continue;
                        }
                        let v0 = self.wc.view(c0);
                        let v1 = self.wc.view(c1);
                        let spec = SearchSpec {
                            forced: &[],
                            limit: SECTION_CAP + 1,
                            max_work: HOM_WORK_CAP,
                        };
                        let out = search_maps(&v0, &v1, &cands, &spec, &mut self.wc.work);
                        capped |= out.capped() || out.maps().len() > SECTION_CAP;
                        for emap in out.maps().iter().take(SECTION_CAP) {
                            let e = Hom { src: c0, dst: c1, map: emap.clone() };
                            keep(
                                ReflexiveGraph::new(d.clone(), c.clone(), e)?,
                                &mut graphs,
                            );
                        }
                    }
                }
            }
        }

        graphs.sort_by(|a, b| {
            let ka = (self.wc.size(a.c1), self.wc.size(a.c0), &a.d.map, &a.c.map, &a.e.map);
            let kb = (self.wc.size(b.c1), self.wc.size(b.c0), &b.d.map, &b.c.map, &b.e.map);
            ka.cmp(&kb)
        });
        let rc = Rc::new(GraphScope { graphs, capped });
        self.graphs = Some(rc.clone());
        Ok(rc)
    }

    pub fn graph_stats(&mut self, gi: usize) -> Result<Rc<GraphStats>, CatError> {
        if let Some(s) = self.gstats.get(&gi) {
            return Ok(s.clone());
        }
        let g = self.graphs()?.graphs[gi].clone();
        let kite = kite_of_graph(&self.wc, &g)?;
        let (pairs, mults, complete) = ops::kite_multiplications(&mut self.wc, &kite, MULT_CAP)?;
        let mut cats = Vec::new();
        let mut grpds = Vec::new();
        for (k, m) in mults.iter().enumerate() {
            let mg = MultGraph::new(g.clone(), pairs.clone(), m.clone())?;
            if mg.validate_category(&self.wc)?.is_valid() {
                cats.push(k);
                if let Some(i) = ops::groupoid_inverse(&self.wc, &mg) {
                    grpds.push((k, i));
                }
            }
        }
        let rc = Rc::new(GraphStats { pairs, mults, complete, cats, grpds });
        self.gstats.insert(gi, rc.clone());
        Ok(rc)
    }

    /// Graph morphisms i -> j: the vertex map is forced by the arrow map,
    /// so scan arrow maps and keep the ones whose forced vertex map is a
    /// graph morphism.
    pub fn graph_maps(&mut self, i: usize, j: usize) -> Result<Rc<GraphMaps>, CatError> {
        if let Some(m) = self.gmaps.get(&(i, j)) {
            return Ok(m.clone());
        }
        let gs = self.graphs()?;
        let (gi, gj) = (gs.graphs[i].clone(), gs.graphs[j].clone());
        let scan = self.homs_capped(gi.c1, gj.c1);
        let mut maps = Vec::new();
        for f1 in &scan.homs {
            let f0 = Hom::compose(&gj.d, &Hom::compose(f1, &gi.e));
            let ok = Hom::compose(&gj.d, f1) == Hom::compose(&f0, &gi.d)
                && Hom::compose(&gj.c, f1) == Hom::compose(&f0, &gi.c)
                && Hom::compose(&gj.e, &f0) == Hom::compose(f1, &gi.e);
            if ok {
                maps.push((f1.clone(), f0));
            }
        }
        let rc = Rc::new(GraphMaps { maps, complete: scan.complete });
        self.gmaps.insert((i, j), rc.clone());
        Ok(rc)
    }

    /// Pregroupoid structures on scope span `si`, as operation tables on
    /// the triple filter; multiplications of the span kite are transported
    /// through the index bookkeeping of both constructions.
    pub fn span_stat(&mut self, si: usize) -> Result<Rc<SpanStat>, CatError> {
        if let Some(s) = self.sstats.get(&si) {
            return Ok(s.clone());
        }
        let sp = self.scope()?.spans[si].clone();
        let monic = jointly_monic_witness(&self.wc, &sp).is_none();
        let bound = self.wc.bound;
        if crate::classes::kp_size(&self.wc, &sp) > bound * bound {
            let rc = Rc::new(SpanStat {
                monic,
                skipped: true,
                kp: None,
                pre: Vec::new(),
                complete: false,
            });
            self.sstats.insert(si, rc.clone());
            return Ok(rc);
        }
        let kp = kp_construction(&mut self.wc, &sp)?;
        let kite = kite_of_span(&mut self.wc, &sp)?;
        let (pb, mults, complete) = ops::kite_multiplications(&mut self.wc, &kite, MULT_CAP)?;
        let mut pre = Vec::new();
        for m in &mults {
            let p = ops::transport_to_triples(&kp, &pb, m)?;
            let pg = Pregroupoid::new(kp.clone(), p.clone())?;
            if !pg.validate(&self.wc)?.is_valid() {
                return Err(CatError::Shape(format!(
                    "kite multiplication on span {si} does not transport to a pregroupoid"
                )));
            }
            pre.push(p);
        }
        let rc = Rc::new(SpanStat { monic, skipped: false, kp: Some(Rc::new(kp)), pre, complete });
        self.sstats.insert(si, rc.clone());
        Ok(rc)
    }

    /// Which pregroupoids of span `si` satisfy the five-tuple
    /// associativity law.
    pub fn kock_flags(&mut self, si: usize) -> Result<Rc<Vec<bool>>, CatError> {
        if let Some(k) = self.kocks.get(&si) {
            return Ok(k.clone());
        }
        let st = self.span_stat(si)?;
        let mut flags = Vec::new();
        if let Some(kp) = &st.kp {
            for p in &st.pre {
                let pg = Pregroupoid::new((**kp).clone(), p.clone())?;
                flags.push(pg.check_kock(&self.wc)?.is_valid());
            }
        }
        let rc = Rc::new(flags);
        self.kocks.insert(si, rc.clone());
        Ok(rc)
    }

    /// Apex maps extending to span morphisms i -> j. A candidate extends
    /// iff its leg composites factor through the feet, checked by a
    /// one-solution search for each foot map.
    pub fn span_maps(&mut self, i: usize, j: usize) -> Result<Rc<SpanMaps>, CatError> {
        if let Some(m) = self.smaps.get(&(i, j)) {
            return Ok(m.clone());
        }
        let scope = self.scope()?;
        let (si, sj) = (scope.spans[i].clone(), scope.spans[j].clone());
        let scan = self.homs_capped(si.apex, sj.apex);
        let mut complete = scan.complete;
        let mut maps = Vec::new();
        for f in &scan.homs {
            let d_ok = self.foot_factor(&si.d, &sj.d, f, &mut complete);
            if !d_ok {
                continue;
            }
            let c_ok = self.foot_factor(&si.c, &sj.c, f, &mut complete);
            if c_ok {
                maps.push(f.clone());
            }
        }
        let rc = Rc::new(SpanMaps { maps, complete });
        self.smaps.insert((i, j), rc.clone());
        Ok(rc)
    }

    /// There is a hom between the feet making the leg square commute:
    /// leg_j ∘ f = foot ∘ leg_i for some foot hom.
    fn foot_factor(&mut self, leg_i: &Hom, leg_j: &Hom, f: &Hom, complete: &mut bool) -> bool {
        let n_i = self.wc.size(leg_i.dst);
        let n_j = self.wc.size(leg_j.dst);
        let mut assigned = vec![El::MAX; n_i];
        for x in 0..leg_i.map.len() {
            let src = leg_i.map[x] as usize;
            let val = leg_j.map[f.map[x] as usize];
            if assigned[src] == El::MAX {
                assigned[src] = val;
            } else if assigned[src] != val {
                return false;
            }
        }
        let mut cands = Candidates::full(n_i, n_j);
        for (x, &v) in assigned.iter().enumerate() {
            if v != El::MAX {
                cands.retain(x, |t| t == v);
            }
        }
        let vi = self.wc.view(leg_i.dst);
        let vj = self.wc.view(leg_j.dst);
        let spec = SearchSpec { forced: &[], limit: 1, max_work: HOM_WORK_CAP };
        let out = search_maps(&vi, &vj, &cands, &spec, &mut self.wc.work);
        if out.capped() {
            *complete = false;
        }
        !out.maps().is_empty()
    }

    /// Split cospans over base triples with the shared pullback per
    /// (f, g), ordered by total foot size.
    pub fn cospans(&mut self) -> Result<Rc<CospanScope>, CatError> {
        if let Some(c) = &self.cospans {
            return Ok(c.clone());
        }
        let nb = self.wc.n_bases();
        let mut triples: Vec<(usize, usize, usize)> = Vec::new();
        for a in 0..nb {
            for b in 0..nb {
                for c in 0..nb {
                    triples.push((a, b, c));
                }
            }
        }
        triples.sort_by_key(|&(a, b, c)| {
            (self.wc.size(a) + self.wc.size(b) + self.wc.size(c), a, b, c)
        });
        let mut capped = false;
        let mut cases = Vec::new();
        for (a, b, c) in triples {
            let fs = self.homs_capped(a, b);
            let gs = self.homs_capped(c, b);
            capped |= !fs.complete || !gs.complete;
            for f in fs.homs.iter() {
                let (rs, rcap) = ops::sections_of(&mut self.wc, f, SECTION_CAP)?;
                capped |= rcap;
                if rs.is_empty() {
                    continue;
                }
                for g in gs.homs.iter() {
                    let (ss, scap) = ops::sections_of(&mut self.wc, g, SECTION_CAP)?;
                    capped |= scap;
                    if ss.is_empty() {
                        continue;
                    }
                    let pb = Rc::new(pullback_split(&mut self.wc, f, g)?);
                    for r in &rs {
                        for s in &ss {
                            cases.push(CospanCase {
                                f: f.clone(),
                                r: r.clone(),
                                g: g.clone(),
                                s: s.clone(),
                                pb: pb.clone(),
                            });
                        }
                    }
                }
            }
        }
        let rc = Rc::new(CospanScope { cases, capped });
        self.cospans = Some(rc.clone());
        Ok(rc)
    }

    /// Frame statistics for scope span `si` used as a direction: over
    /// every split cospan, every (alpha, gamma) satisfying the frame
    /// identities, count fillers on the pullback.
    pub fn direction_stats(&mut self, si: usize) -> Result<Rc<DirectionStats>, CatError> {
        if let Some(d) = self.dstats.get(&si) {
            return Ok(d.clone());
        }
        let sp = self.scope()?.spans[si].clone();
        let cos = self.cospans()?;
        let monic = jointly_monic_witness(&self.wc, &sp).is_none();
        let budget_start = self.wc.work;
        let mut st = DirectionStats {
            frames: 0,
            first_bad: None,
            first_zero: None,
            capped: cos.capped,
        };
        'cases: for (ci, case) in cos.cases.iter().enumerate() {
            let scan = self.homs_capped(case.f.src, sp.apex);
            st.capped |= !scan.complete;
            let (d, c) = (&sp.d.map, &sp.c.map);
            for alpha in &scan.homs {
                if self.wc.work - budget_start > SPAN_FRAME_WORK {
                    st.capped = true;
                    break 'cases;
                }
                // d alpha = d alpha r f, elementwise over A.
                let rf_ok = (0..alpha.map.len()).all(|x| {
                    let ax = alpha.map[x] as usize;
                    let arfx = alpha.map[case.r.map[case.f.map[x] as usize] as usize] as usize;
                    d[ax] == d[arfx]
                });
                if !rf_ok {
                    continue;
                }
                // gamma is forced on the image of s and constrained on
                // every other cell by c gamma = c alpha r g.
                let n_c = self.wc.size(case.g.src);
                let n_apex = self.wc.size(sp.apex);
                let mut cands = Candidates::full(n_c, n_apex);
                for y in 0..n_c {
                    let target = c[alpha.map[case.r.map[case.g.map[y] as usize] as usize] as usize];
                    cands.retain(y, |v| c[v as usize] == target);
                }
                let forced: Vec<(El, El)> = (0..case.s.map.len())
                    .map(|b| (case.s.map[b], alpha.map[case.r.map[b] as usize]))
                    .collect();
                let vc = self.wc.view(case.g.src);
                let va = self.wc.view(sp.apex);
                let spec = SearchSpec {
                    forced: &forced,
                    limit: SECTION_CAP,
                    max_work: PAIR_FRAME_WORK,
                };
                let out = search_maps(&vc, &va, &cands, &spec, &mut self.wc.work);
                st.capped |= out.capped();
                for gmap in out.maps() {
                    let gamma = Hom { src: case.g.src, dst: sp.apex, map: gmap.clone() };
                    st.frames += 1;
                    let fill = ops::pullback_fillers(
                        &mut self.wc,
                        &case.pb,
                        case,
                        alpha,
                        &gamma,
                        &sp,
                        monic,
                        2,
                    )?;
                    st.capped |= !fill.complete;
                    if fill.is_bad() {
                        let bad = BadFrame {
                            case: ci,
                            alpha: alpha.clone(),
                            gamma: gamma.clone(),
                            count: fill.maps.len(),
                        };
                        if st.first_bad.is_none() {
                            st.first_bad = Some(bad.clone());
                        }
                        if fill.maps.is_empty() {
                            st.first_zero = Some(bad);
                            break 'cases;
                        }
                    }
                }
            }
        }
        let rc = Rc::new(st);
        self.dstats.insert(si, rc.clone());
        Ok(rc)
    }

    /// Commuting section pairs of span `si`'s legs.
    pub fn section_pairs(&mut self, si: usize) -> Result<Rc<SectionPairs>, CatError> {
        if let Some(s) = self.sections.get(&si) {
            return Ok(s.clone());
        }
        let sp = self.scope()?.spans[si].clone();
        let (e1s, cap1) = ops::sections_of(&mut self.wc, &sp.d, SECTION_CAP)?;
        let (e2s, cap2) = ops::sections_of(&mut self.wc, &sp.c, SECTION_CAP)?;
        let mut pairs = Vec::new();
        for e1 in &e1s {
            for e2 in &e2s {
                let n = self.wc.size(sp.apex);
                let commute = (0..n).all(|w| {
                    let a = e1.map[sp.d.map[e2.map[sp.c.map[w] as usize] as usize] as usize];
                    let b = e2.map[sp.c.map[e1.map[sp.d.map[w] as usize] as usize] as usize];
                    a == b
                });
                if commute {
                    pairs.push((e1.clone(), e2.clone()));
                }
            }
        }
        let rc = Rc::new(SectionPairs { pairs, capped: cap1 || cap2 });
        self.sections.insert(si, rc.clone());
        Ok(rc)
    }

    /// Frame statistics for the compatibility quantifier on the pair
    /// (relation span `ei`, direction span `di`).
    pub fn compat_stats(&mut self, ei: usize, di: usize) -> Result<Rc<CompatStats>, CatError> {
        if let Some(c) = self.cstats.get(&(ei, di)) {
            return Ok(c.clone());
        }
        let scope = self.scope()?;
        let (esp, dsp) = (scope.spans[ei].clone(), scope.spans[di].clone());
        let secs = self.section_pairs(ei)?;
        let monic = jointly_monic_witness(&self.wc, &dsp).is_none();
        let budget_start = self.wc.work;
        let mut st = CompatStats { frames: 0, first_bad: None, capped: secs.capped };
        'pairs: for (e1, e2) in &secs.pairs {
            let mut scan = ops::ConfigScan {
                frames: 0,
                first_bad: None,
                capped: false,
            };
            let budget = SPAN_FRAME_WORK.saturating_sub(self.wc.work - budget_start);
            if budget == 0 {
                st.capped = true;
                break 'pairs;
            }
            let ascan = self.homs_capped(esp.d.dst, dsp.apex);
            scan.capped |= !ascan.complete;
            ops::config_scan(
                &mut self.wc,
                &esp,
                e1,
                e2,
                &dsp,
                monic,
                &ascan.homs,
                budget,
                &mut scan,
            )?;
            st.frames += scan.frames;
            st.capped |= scan.capped;
            if let Some((alpha, gamma, count)) = scan.first_bad {
                st.first_bad = Some(BadPair {
                    section: (e1.clone(), e2.clone()),
                    alpha,
                    gamma,
                    count,
                });
                break 'pairs;
            }
        }
        let rc = Rc::new(st);
        self.cstats.insert((ei, di), rc.clone());
        Ok(rc)
    }

    /// Commutative split squares: the canonical one over every local
    /// product, then scanned squares over split cospans with the apex
    /// drawn from battery objects and scope apexes.
    pub fn squares(&mut self) -> Result<Rc<SquareScope>, CatError> {
        if let Some(s) = &self.squares {
            return Ok(s.clone());
        }
        let mut capped = false;
        let mut seen: BTreeSet<Vec<Vec<El>>> = BTreeSet::new();
        let mut cases: Vec<SquareCase> = Vec::new();
        let mut keep = |case: SquareCase, cases: &mut Vec<SquareCase>| {
            let key = vec![
                case.e.d.map.clone(),
                case.e.c.map.clone(),
                case.e1.map.clone(),
                case.e2.map.clone(),
                case.f.map.clone(),
                case.r.map.clone(),
                case.g.map.clone(),
                case.s.map.clone(),
            ];
            if seen.insert(key) {
                cases.push(case);
            }
        };

        let mut truncated = false;
        let mut lps = Vec::new();
        for_each_local_product(&mut self.wc, &mut truncated, |_, lp| {
            lps.push(lp.clone());
            true
        });
        capped |= truncated;
        for lp in lps {
            let pb = Rc::new(pullback_split(&mut self.wc, &lp.f, &lp.g)?);
            keep(
                SquareCase {
                    e: Span::new(lp.ss.p1.clone(), lp.ss.p2.clone())?,
                    e1: lp.ss.e1.clone(),
                    e2: lp.ss.e2.clone(),
                    f: lp.f,
                    r: lp.r,
                    g: lp.g,
                    s: lp.s,
                    pb,
                    from_local_product: true,
                },
                &mut cases,
            );
        }

        let scope = self.scope()?;
        let mut eobjs: Vec<ObjId> = self.wc.battery_objects().iter().copied().collect();
        for sp in scope.spans.iter() {
            eobjs.push(sp.apex);
        }
        eobjs.sort_by_key(|&o| (self.wc.size(o), o));
        eobjs.dedup();
        let cos = self.cospans()?;
        capped |= cos.capped;
        'scan: for case in cos.cases.iter() {
            let (na, nc) = (self.wc.size(case.f.src), self.wc.size(case.g.src));
            for &eo in &eobjs {
                if self.wc.size(eo) > na * nc || self.wc.size(eo) > self.wc.bound {
                    continue;
                }
                if cases.len() >= SQUARE_CAP {
                    capped = true;
                    break 'scan;
                }
                let p1s = self.homs_capped(eo, case.f.src);
                let p2s = self.homs_capped(eo, case.g.src);
                capped |= !p1s.complete || !p2s.complete;
                // Bucket p2 candidates by their composite with g so the
                // square law f p1 = g p2 is a lookup, not a scan.
                let mut buckets: BTreeMap<Vec<El>, Vec<&Hom>> = BTreeMap::new();
                for p2 in &p2s.homs {
                    buckets.entry(Hom::compose(&case.g, p2).map).or_default().push(p2);
                }
                for p1 in &p1s.homs {
                    let Some(mates) = buckets.get(&Hom::compose(&case.f, p1).map) else {
                        continue;
                    };
                    let (e1s, c1) = ops::sections_of(&mut self.wc, p1, SECTION_CAP)?;
                    capped |= c1;
                    if e1s.is_empty() {
                        continue;
                    }
                    for p2 in mates {
                        let (e2s, c2) = ops::sections_of(&mut self.wc, p2, SECTION_CAP)?;
                        capped |= c2;
                        for e1 in &e1s {
                            // p2 e1 = s f
                            if Hom::compose(p2, e1) != Hom::compose(&case.s, &case.f) {
                                continue;
                            }
                            for e2 in &e2s {
                                if Hom::compose(p1, e2) != Hom::compose(&case.r, &case.g) {
                                    continue;
                                }
                                if Hom::compose(e1, &case.r) != Hom::compose(e2, &case.s) {
                                    continue;
                                }
                                if cases.len() >= SQUARE_CAP {
                                    capped = true;
                                    break 'scan;
                                }
                                keep(
                                    SquareCase {
                                        e: Span::new(p1.clone(), (*p2).clone())?,
                                        e1: e1.clone(),
                                        e2: e2.clone(),
                                        f: case.f.clone(),
                                        r: case.r.clone(),
                                        g: case.g.clone(),
                                        s: case.s.clone(),
                                        pb: case.pb.clone(),
                                        from_local_product: false,
                                    },
                                    &mut cases,
                                );
                            }
                        }
                    }
                }
            }
        }
        let rc = Rc::new(SquareScope { cases, capped });
        self.squares = Some(rc.clone());
        Ok(rc)
    }

    /// Lifting statistics for square `qi` against direction span `di`:
    /// every structure map on E must factor uniquely through the square's
    /// pullback.
    pub fn lift_stats(&mut self, qi: usize, di: usize) -> Result<Rc<LiftStats>, CatError> {
        if let Some(l) = self.lifts.get(&(qi, di)) {
            return Ok(l.clone());
        }
        let squares = self.squares()?;
        let sq = &squares.cases[qi];
        let (e, e1, e2) = (sq.e.clone(), sq.e1.clone(), sq.e2.clone());
        let (f, r, g, s) = (sq.f.clone(), sq.r.clone(), sq.g.clone(), sq.s.clone());
        let pb = sq.pb.clone();
        let sp = self.scope()?.spans[di].clone();
        let monic = jointly_monic_witness(&self.wc, &sp).is_none();
        let scan = self.homs_capped(e.apex, sp.apex);
        let budget_start = self.wc.work;
        let mut st = LiftStats { scanned: 0, bad: None, capped: !scan.complete };
        let n_e = self.wc.size(e.apex);
        // Canonical injections of the feet into the pullback.
        let pbe1: Vec<El> = (0..f.map.len())
            .map(|a| {
                let sf = s.map[f.map[a] as usize];
                pb.elem_of((a as El, sf)).expect("g s f = f pins the pair")
            })
            .collect();
        let pbe2: Vec<El> = (0..g.map.len())
            .map(|c| {
                let rg = r.map[g.map[c] as usize];
                pb.elem_of((rg, c as El)).expect("f r g = g pins the pair")
            })
            .collect();
        let (dm, cm) = (&sp.d.map, &sp.c.map);
        for m in &scan.homs {
            if self.wc.work - budget_start > SPAN_FRAME_WORK {
                st.capped = true;
                break;
            }
            // d m = d m e2 p2 and c m = c m e1 p1, elementwise over E.
            let ok = (0..n_e).all(|w| {
                let mw = m.map[w] as usize;
                let me2 = m.map[e2.map[e.c.map[w] as usize] as usize] as usize;
                let me1 = m.map[e1.map[e.d.map[w] as usize] as usize] as usize;
                dm[mw] == dm[me2] && cm[mw] == cm[me1]
            });
            if !ok {
                continue;
            }
            st.scanned += 1;
            // Lift to the pullback: forced on both injections, candidates
            // pinned by the leg equations.
            let alpha: Vec<El> = (0..pbe1.len()).map(|a| m.map[e1.map[a] as usize]).collect();
            let gamma: Vec<El> = (0..pbe2.len()).map(|c| m.map[e2.map[c] as usize]).collect();
            let fill = ops::raw_fillers(
                &mut self.wc,
                pb.obj,
                &pb.pairs,
                &pb.emb,
                &pbe1,
                &alpha,
                &pbe2,
                &gamma,
                &sp,
                monic,
                2,
            )?;
            st.capped |= !fill.complete;
            if fill.is_bad() {
                st.bad = Some(BadLift { m: m.clone(), count: fill.maps.len() });
                break;
            }
        }
        let rc = Rc::new(st);
        self.lifts.insert((qi, di), rc.clone());
        Ok(rc)
    }

    /// Search for a jointly natural Mal'tsev operation on the battery
    /// objects: candidates per base, pairwise naturality pruning, then a
    /// full verification of each surviving assignment in lex order.
    pub fn natural(&mut self) -> Result<Rc<NaturalOutcome>, CatError> {
        if let Some(n) = &self.natural {
            return Ok(n.clone());
        }
        let objs: Vec<ObjId> = self.wc.battery_objects().iter().copied().collect();
        let mut carriers = Vec::new();
        for &o in &objs {
            carriers.push(self.triple_carrier(o)?);
        }
        let mut cand_complete = true;
        let mut nat_complete = true;

        // Candidate operations per base object.
        let base_pos: Vec<usize> =
            (0..objs.len()).filter(|&k| self.wc.is_base(objs[k])).collect();
        let mut cands: Vec<Vec<Hom>> = Vec::new();
        for &k in &base_pos {
            let t = &carriers[k];
            let n = t.n;
            let mut forced: Vec<(El, El)> = Vec::new();
            for x in 0..n as El {
                for y in 0..n as El {
                    forced.push((t.elem(x, y, y), x));
                    forced.push((t.elem(y, y, x), x));
                }
            }
            forced.sort_unstable();
            forced.dedup();
            let vt = self.wc.view(t.obj);
            let vb = self.wc.view(t.base);
            let full = Candidates::full(self.wc.size(t.obj), n);
            let spec = SearchSpec {
                forced: &forced,
                limit: NATURAL_CAP + 1,
                max_work: NATURAL_WORK_CAP,
            };
            let out = search_maps(&vt, &vb, &full, &spec, &mut self.wc.work);
            cand_complete &= !out.capped() && out.maps().len() <= NATURAL_CAP;
            let list: Vec<Hom> = out
                .maps()
                .iter()
                .take(NATURAL_CAP)
                .map(|m| Hom { src: t.obj, dst: t.base, map: m.clone() })
                .collect();
            cands.push(list);
        }

        // Pairwise compatibility over base homs.
        let nb = base_pos.len();
        let mut compat: BTreeMap<(usize, usize), Vec<Vec<bool>>> = BTreeMap::new();
        for i in 0..nb {
            for j in 0..nb {
                let (ti, tj) = (base_pos[i], base_pos[j]);
                let homs = self.homs_capped(carriers[ti].base, carriers[tj].base);
                nat_complete &= homs.complete;
                let mut table = vec![vec![true; cands[j].len()]; cands[i].len()];
                for (a, pa) in cands[i].iter().enumerate() {
                    for (b, pb) in cands[j].iter().enumerate() {
                        table[a][b] = homs.homs.iter().all(|h| {
                            natural_square_ok(&carriers[ti], pa, &carriers[tj], pb, h).is_none()
                        });
                    }
                }
                compat.insert((i, j), table);
            }
        }

        // Assignments in lex order, verified in full against the battery.
        let mut witness: Option<NaturalWitness> = None;
        let mut empty_base: Option<ObjId> = None;
        let mut ops_found: Option<Vec<Hom>> = None;
        let mut tried = 0usize;
        let mut exhausted = true;
        let mut pick = vec![0usize; nb];
        let mut level = 0usize;
        if let Some(i) = cands.iter().position(|c| c.is_empty()) {
            empty_base = Some(carriers[base_pos[i]].base);
        } else if nb > 0 {
            'dfs: loop {
                if tried >= ASSIGN_CAP {
                    exhausted = false;
                    break;
                }
                if level == nb {
                    tried += 1;
                    match self.verify_assignment(&objs, &carriers, &base_pos, &cands, &pick)? {
                        Ok(ops) => {
                            ops_found = Some(ops);
                            break 'dfs;
                        }
                        Err((w, complete)) => {
                            nat_complete &= complete;
                            if witness.is_none() {
                                witness = Some(w);
                            }
                        }
                    }
                    level -= 1;
                    pick[level] += 1;
                }
                // Descend to the next consistent choice or backtrack.
                loop {
                    if pick[level] >= cands[level].len() {
                        if level == 0 {
                            break 'dfs;
                        }
                        pick[level] = 0;
                        level -= 1;
                        pick[level] += 1;
                        continue;
                    }
                    let consistent = (0..level).all(|p| {
                        compat[&(p, level)][pick[p]][pick[level]]
                            && compat[&(level, p)][pick[level]][pick[p]]
                    }) && compat[&(level, level)][pick[level]][pick[level]];
                    if consistent {
                        level += 1;
                        break;
                    }
                    pick[level] += 1;
                }
            }
        } else {
            // No bases means no battery; vacuous family.
            ops_found = Some(Vec::new());
        }

        let outcome = NaturalOutcome {
            carriers,
            ops: ops_found,
            witness,
            empty_base,
            cand_complete: cand_complete && exhausted,
            nat_complete,
        };
        let rc = Rc::new(outcome);
        self.natural = Some(rc.clone());
        Ok(rc)
    }

    /// Extend a base assignment componentwise to every battery object and
    /// verify naturality against all homs into bases.
    #[allow(clippy::type_complexity)]
    fn verify_assignment(
        &mut self,
        objs: &[ObjId],
        carriers: &[TripleCarrier],
        base_pos: &[usize],
        cands: &[Vec<Hom>],
        pick: &[usize],
    ) -> Result<Result<Vec<Hom>, (NaturalWitness, bool)>, CatError> {
        // Base index -> chosen op.
        let mut by_base: BTreeMap<usize, &Hom> = BTreeMap::new();
        for (i, &k) in base_pos.iter().enumerate() {
            let bidx = self.wc.factors(objs[k])[0];
            by_base.insert(bidx, &cands[i][pick[i]]);
        }
        let chosen_ops = || -> Vec<(ObjId, Hom)> {
            base_pos
                .iter()
                .enumerate()
                .map(|(i, &k)| (objs[k], cands[i][pick[i]].clone()))
                .collect()
        };
        // Componentwise tables for every battery object.
        let mut ops: Vec<Hom> = Vec::new();
        for (k, &o) in objs.iter().enumerate() {
            let t = &carriers[k];
            let n = t.n;
            let factors = self.wc.factors(o);
            let coords: Vec<Vec<El>> = (0..n).map(|u| self.wc.coords(o, u as El)).collect();
            // Per-factor base carriers and their triple tables.
            let mut fp: Vec<(&TripleCarrier, &Hom)> = Vec::new();
            for &bi in &factors {
                let pos = base_pos
                    .iter()
                    .position(|&bk| self.wc.factors(objs[bk])[0] == bi)
                    .ok_or_else(|| CatError::Shape(format!("battery factor {bi} has no base")))?;
                fp.push((&carriers[base_pos[pos]], by_base[&bi]));
            }
            let mut table = vec![0 as El; n * n * n];
            for x in 0..n as El {
                for y in 0..n as El {
                    for z in 0..n as El {
                        let mut vc = Vec::with_capacity(factors.len());
                        for (fi, (tc, op)) in fp.iter().enumerate() {
                            let (cx, cy, cz) = (
                                coords[x as usize][fi],
                                coords[y as usize][fi],
                                coords[z as usize][fi],
                            );
                            vc.push(op.map[tc.elem(cx, cy, cz) as usize]);
                        }
                        let v = self
                            .wc
                            .elem_from_coords(o, &vc)
                            .ok_or_else(|| CatError::Shape("battery object not a full product".into()))?;
                        table[(x as usize * n + y as usize) * n + z as usize] = v;
                    }
                }
            }
            let p = Hom {
                src: t.obj,
                dst: o,
                map: {
                    // Reindex through the carrier embedding.
                    let sz = self.wc.size(t.obj);
                    let mut m = vec![0 as El; sz];
                    for x in 0..n as El {
                        for y in 0..n as El {
                            for z in 0..n as El {
                                m[t.elem(x, y, z) as usize] =
                                    table[(x as usize * n + y as usize) * n + z as usize];
                            }
                        }
                    }
                    m
                },
            };
            if !self.wc.check_hom(&p) {
                return Err(CatError::Shape(
                    "componentwise extension of a base operation is not a hom".into(),
                ));
            }
            ops.push(p);
        }
        // Naturality against every hom into a base; homs into products
        // follow componentwise.
        let mut complete = true;
        for (uk, &u) in objs.iter().enumerate() {
            for (vk, &v) in objs.iter().enumerate() {
                if !self.wc.is_base(v) {
                    continue;
                }
                let scan = self.homs_capped(u, v);
                complete &= scan.complete;
                for h in &scan.homs {
                    if let Some((at, got, want)) =
                        natural_square_ok(&carriers[uk], &ops[uk], &carriers[vk], &ops[vk], h)
                    {
                        let w = NaturalWitness {
                            src: u,
                            dst: v,
                            hom: h.clone(),
                            at,
                            got,
                            want,
                            ops: chosen_ops(),
                        };
                        return Ok(Err((w, complete)));
                    }
                }
            }
        }
        Ok(Ok(ops))
    }

    fn triple_carrier(&mut self, o: ObjId) -> Result<TripleCarrier, CatError> {
        let n = self.wc.size(o);
        let factors = self.wc.factors(o);
        let mut f3 = Vec::with_capacity(factors.len() * 3);
        for _ in 0..3 {
            f3.extend_from_slice(&factors);
        }
        let mut elems = Vec::with_capacity(n * n * n);
        let coords: Vec<Vec<El>> = (0..n).map(|u| self.wc.coords(o, u as El)).collect();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let mut t = Vec::with_capacity(f3.len());
                    t.extend_from_slice(&coords[x]);
                    t.extend_from_slice(&coords[y]);
                    t.extend_from_slice(&coords[z]);
                    elems.push(t);
                }
            }
        }
        let (obj, emb) = self.wc.adjoin_tuples(f3, elems, "triple power")?;
        Ok(TripleCarrier { base: o, obj, emb, n })
    }
}

/// First naturality failure of (p_src, p_dst) against h, if any:
/// p_dst(h x, h y, h z) must equal h(p_src(x, y, z)).
fn natural_square_ok(
    ts: &TripleCarrier,
    ps: &Hom,
    td: &TripleCarrier,
    pd: &Hom,
    h: &Hom,
) -> Option<([El; 3], El, El)> {
    let n = ts.n as El;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let lhs = pd.map
                    [td.elem(h.map[x as usize], h.map[y as usize], h.map[z as usize]) as usize];
                let rhs = h.map[ps.map[ts.elem(x, y, z) as usize] as usize];
                if lhs != rhs {
                    return Some(([x, y, z], lhs, rhs));
                }
            }
        }
    }
    None
}
