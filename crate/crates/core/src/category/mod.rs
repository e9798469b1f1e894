//! Concrete categories of finite algebras: a frozen base category plus a
//! growing working extension that adjoins limit objects as subalgebras of
//! products, canonicalizes them to existing isomorphic objects, and
//! memoizes on-demand hom enumeration.

pub mod limits;
pub mod predicates;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::hom::{search_maps, Candidates, SearchSpec};
use crate::algebra::{
    is_homomorphism, Algebraic, AlgebraError, El, Equation, FiniteAlgebra, Signature,
};

pub type ObjId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatError {
    Algebra(AlgebraError),
    /// Construction produced an object that is neither isomorphic to an
    /// existing one nor allowed to be adjoined.
    MissingObject(String),
    NotSplitEpi { src: ObjId, dst: ObjId },
    UnknownAlgebra(String),
    BadHom { index: usize, msg: String },
    /// User hom list is missing the composite of entries f and g.
    NotClosed { f: usize, g: usize },
    MissingIdentity(String),
    Shape(String),
}

impl From<AlgebraError> for CatError {
    fn from(e: AlgebraError) -> Self {
        CatError::Algebra(e)
    }
}

impl fmt::Display for CatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatError::Algebra(e) => write!(f, "{e}"),
            CatError::MissingObject(m) => write!(f, "missing object: {m}"),
            CatError::NotSplitEpi { src, dst } => {
                write!(f, "no section found: object {src} -> {dst} is not a split epi")
            }
            CatError::UnknownAlgebra(n) => write!(f, "unknown algebra `{n}`"),
            CatError::BadHom { index, msg } => write!(f, "hom entry {index}: {msg}"),
            CatError::NotClosed { f: a, g: b } => {
                write!(f, "hom list not closed: composite of entries {a} and {b} is missing")
            }
            CatError::MissingIdentity(n) => write!(f, "hom list lacks the identity of `{n}`"),
            CatError::Shape(m) => write!(f, "diagram shape error: {m}"),
        }
    }
}

/// Morphism between working-category objects; `map[i]` is the image of
/// element i of the source carrier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hom {
    pub src: ObjId,
    pub dst: ObjId,
    pub map: Vec<El>,
}

impl Hom {
    /// f ∘ g (g applied first).
    pub fn compose(f: &Hom, g: &Hom) -> Hom {
        debug_assert_eq!(f.src, g.dst);
        Hom {
            src: g.src,
            dst: f.dst,
            map: g.map.iter().map(|&x| f.map[x as usize]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.dst && self.map.iter().enumerate().all(|(i, &v)| v as usize == i)
    }

    pub fn is_injective(&self) -> bool {
        injective(&self.map)
    }

    pub fn is_bijective(&self, dst_size: usize) -> bool {
        self.map.len() == dst_size && self.is_injective()
    }

    pub fn inverse(&self, dst_size: usize) -> Option<Hom> {
        if !self.is_bijective(dst_size) {
            return None;
        }
        let mut inv = alloc::vec![0 as El; dst_size];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v as usize] = i as El;
        }
        Some(Hom { src: self.dst, dst: self.src, map: inv })
    }
}

pub fn compose_maps(f: &[El], g: &[El]) -> Vec<El> {
    g.iter().map(|&x| f[x as usize]).collect()
}

pub fn injective(map: &[El]) -> bool {
    let top = map.iter().map(|&v| v as usize + 1).max().unwrap_or(0);
    let mut seen = alloc::vec![false; top];
    map.iter().all(|&v| !core::mem::replace(&mut seen[v as usize], true))
}

/// Span out of a common apex; both legs are working-category homs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub apex: ObjId,
    pub d: Hom,
    pub c: Hom,
}

impl Span {
    pub fn new(d: Hom, c: Hom) -> Result<Span, CatError> {
        if d.src != c.src {
            return Err(CatError::Shape(String::from("span legs must share their apex")));
        }
        Ok(Span { apex: d.src, d, c })
    }

    /// The span with swapped legs.
    pub fn swapped(&self) -> Span {
        Span { apex: self.apex, d: self.c.clone(), c: self.d.clone() }
    }
}

/// Split span: p₁e₁ = 1_A, p₂e₂ = 1_C.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSpan {
    pub e: ObjId,
    pub a: ObjId,
    pub c: ObjId,
    pub e1: Hom,
    pub p1: Hom,
    pub e2: Hom,
    pub p2: Hom,
}

impl SplitSpan {
    pub fn new(e1: Hom, p1: Hom, e2: Hom, p2: Hom) -> Result<SplitSpan, CatError> {
        let e = p1.src;
        if e2.dst != e || e1.dst != e || p2.src != e {
            return Err(CatError::Shape(String::from("split span legs must meet in one object")));
        }
        if p1.dst != e1.src || p2.dst != e2.src {
            return Err(CatError::Shape(String::from("split span sections must match projections")));
        }
        if !Hom::compose(&p1, &e1).is_identity() || !Hom::compose(&p2, &e2).is_identity() {
            return Err(CatError::Shape(String::from("split span retraction laws fail")));
        }
        Ok(SplitSpan { e, a: e1.src, c: e2.src, e1, p1, e2, p2 })
    }

    /// (e₁p₁)(e₂p₂) = (e₂p₂)(e₁p₁), Def's derived commutativity flag.
    pub fn is_commutative(&self) -> bool {
        let l = Hom::compose(&self.e1, &self.p1);
        let r = Hom::compose(&self.e2, &self.p2);
        Hom::compose(&l, &r) == Hom::compose(&r, &l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum ViewData {
    Base(usize),
    Derived(Rc<DerivedData>),
}

/// Subalgebra of a product of base algebras, as a sorted tuple list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedData {
    pub factors: Vec<usize>,
    pub elems: Vec<Vec<El>>,
}

impl DerivedData {
    pub fn index_of(&self, tuple: &[El]) -> Option<usize> {
        self.elems.binary_search_by(|e| e.as_slice().cmp(tuple)).ok()
    }
}

/// Self-contained algebra view of one object; cheap to clone.
#[derive(Clone)]
pub struct OwnedView {
    bases: Rc<Vec<FiniteAlgebra>>,
    data: ViewData,
}

impl Algebraic for OwnedView {
    fn size(&self) -> usize {
        match &self.data {
            ViewData::Base(i) => self.bases[*i].size,
            ViewData::Derived(d) => d.elems.len(),
        }
    }

    fn op_count(&self) -> usize {
        self.bases.first().map(|a| a.tables.len()).unwrap_or(0)
    }

    fn op_arity(&self, op: usize) -> usize {
        self.bases[0].arities[op]
    }

    fn apply(&self, op: usize, args: &[El]) -> El {
        match &self.data {
            ViewData::Base(i) => self.bases[*i].apply(op, args),
            ViewData::Derived(d) => {
                let mut out = Vec::with_capacity(d.factors.len());
                let mut buf = Vec::with_capacity(args.len());
                for (pos, &fi) in d.factors.iter().enumerate() {
                    buf.clear();
                    buf.extend(args.iter().map(|&a| d.elems[a as usize][pos]));
                    out.push(self.bases[fi].apply(op, &buf));
                }
                d.index_of(&out).expect("carrier not closed under operations") as El
            }
        }
    }
}

impl OwnedView {
    /// Like apply but returns None when the result tuple falls outside the
    /// carrier; used while testing closure of candidate subsets.
    pub fn apply_checked(&self, op: usize, args: &[El]) -> Option<El> {
        match &self.data {
            ViewData::Base(i) => Some(self.bases[*i].apply(op, args)),
            ViewData::Derived(d) => {
                let mut out = Vec::with_capacity(d.factors.len());
                let mut buf = Vec::with_capacity(args.len());
                for (pos, &fi) in d.factors.iter().enumerate() {
                    buf.clear();
                    buf.extend(args.iter().map(|&a| d.elems[a as usize][pos]));
                    out.push(self.bases[fi].apply(op, &buf));
                }
                d.index_of(&out).map(|i| i as El)
            }
        }
    }
}

/// Validated immutable category as loaded: base objects and (optionally) a
/// user-restricted hom list.
#[derive(Clone, Debug)]
pub struct FrozenCategory {
    pub sig: Signature,
    pub equations: Vec<Equation>,
    pub bases: Vec<FiniteAlgebra>,
    /// None = all homomorphisms.
    pub user_homs: Option<Vec<Hom>>,
    pub adjoin: bool,
    pub bound: usize,
}

impl FrozenCategory {
    pub fn new(
        sig: Signature,
        equations: Vec<Equation>,
        bases: Vec<FiniteAlgebra>,
        user_homs: Option<Vec<Hom>>,
        adjoin: bool,
        bound: usize,
    ) -> Result<FrozenCategory, CatError> {
        for (i, a) in bases.iter().enumerate() {
            if bases[..i].iter().any(|b| b.name == a.name) {
                return Err(CatError::UnknownAlgebra(format!("duplicate algebra `{}`", a.name)));
            }
            a.check_equations(&equations)?;
        }
        if let Some(homs) = &user_homs {
            for (i, h) in homs.iter().enumerate() {
                if h.src >= bases.len() || h.dst >= bases.len() {
                    return Err(CatError::BadHom {
                        index: i,
                        msg: String::from("object reference out of range"),
                    });
                }
                if h.map.len() != bases[h.src].size {
                    return Err(CatError::BadHom {
                        index: i,
                        msg: String::from("map length does not match source carrier"),
                    });
                }
                if !is_homomorphism(&h.map, &bases[h.src], &bases[h.dst]) {
                    return Err(CatError::BadHom {
                        index: i,
                        msg: String::from("map violates the homomorphism law"),
                    });
                }
            }
            for (o, b) in bases.iter().enumerate() {
                let id: Vec<El> = (0..b.size as El).collect();
                if !homs.iter().any(|h| h.src == o && h.dst == o && h.map == id) {
                    return Err(CatError::MissingIdentity(b.name.clone()));
                }
            }
            for (i, f) in homs.iter().enumerate() {
                for (j, g) in homs.iter().enumerate() {
                    if g.dst == f.src {
                        let comp = Hom::compose(f, g);
                        if !homs.iter().any(|h| *h == comp) {
                            return Err(CatError::NotClosed { f: i, g: j });
                        }
                    }
                }
            }
        }
        Ok(FrozenCategory { sig, equations, bases, user_homs, adjoin, bound })
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.bases.iter().position(|a| a.name == name)
    }
}

/// Canonicalization cap: give up on an isomorphism search after this many
/// elementary steps and keep the derived object instead.
const CANON_WORK_CAP: u64 = 1 << 16;

/// Fiber-constrained section searches converge quickly on anything split;
/// the cap only guards against pathological backtracking.
const SECTION_WORK_CAP: u64 = 1 << 24;

#[derive(Clone)]
pub struct WorkingCategory {
    pub sig: Signature,
    pub equations: Vec<Equation>,
    bases: Rc<Vec<FiniteAlgebra>>,
    objects: Vec<ViewData>,
    names: Vec<String>,
    user_homs: Option<Rc<Vec<Hom>>>,
    pub adjoin: bool,
    pub bound: usize,
    derived_key: BTreeMap<(Vec<usize>, Vec<Vec<El>>), (ObjId, Rc<Vec<El>>)>,
    hom_memo: BTreeMap<(ObjId, ObjId), Rc<Vec<Hom>>>,
    battery: Option<Rc<Vec<ObjId>>>,
    pub(crate) subs_memo: BTreeMap<ObjId, Rc<(Vec<Vec<El>>, bool)>>,
    pub(crate) epic_memo: BTreeMap<(ObjId, Vec<El>), (bool, Option<(ObjId, Hom, Hom)>)>,
    pub(crate) epic_unions_memo: BTreeMap<ObjId, Rc<Vec<Vec<El>>>>,
    pub work: u64,
}

impl WorkingCategory {
    pub fn new(fc: &FrozenCategory) -> WorkingCategory {
        let objects = (0..fc.bases.len()).map(ViewData::Base).collect();
        let names = fc.bases.iter().map(|a| a.name.clone()).collect();
        WorkingCategory {
            sig: fc.sig.clone(),
            equations: fc.equations.clone(),
            bases: Rc::new(fc.bases.clone()),
            objects,
            names,
            user_homs: fc.user_homs.clone().map(Rc::new),
            adjoin: fc.adjoin,
            bound: fc.bound,
            derived_key: BTreeMap::new(),
            hom_memo: BTreeMap::new(),
            battery: None,
            subs_memo: BTreeMap::new(),
            epic_memo: BTreeMap::new(),
            epic_unions_memo: BTreeMap::new(),
            work: 0,
        }
    }

    pub fn n_bases(&self) -> usize {
        self.bases.len()
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn is_base(&self, o: ObjId) -> bool {
        matches!(self.objects[o], ViewData::Base(_))
    }

    pub fn base_algebra(&self, i: usize) -> &FiniteAlgebra {
        &self.bases[i]
    }

    pub fn size(&self, o: ObjId) -> usize {
        match &self.objects[o] {
            ViewData::Base(i) => self.bases[*i].size,
            ViewData::Derived(d) => d.elems.len(),
        }
    }

    pub fn name(&self, o: ObjId) -> &str {
        &self.names[o]
    }

    pub fn view(&self, o: ObjId) -> OwnedView {
        OwnedView { bases: self.bases.clone(), data: self.objects[o].clone() }
    }

    /// Base-algebra indices whose product carries this object's tuples.
    pub fn factors(&self, o: ObjId) -> Vec<usize> {
        match &self.objects[o] {
            ViewData::Base(i) => alloc::vec![*i],
            ViewData::Derived(d) => d.factors.clone(),
        }
    }

    /// Flattened base coordinates of one element.
    pub fn coords(&self, o: ObjId, el: El) -> Vec<El> {
        match &self.objects[o] {
            ViewData::Base(_) => alloc::vec![el],
            ViewData::Derived(d) => d.elems[el as usize].clone(),
        }
    }

    pub fn elem_from_coords(&self, o: ObjId, coords: &[El]) -> Option<El> {
        match &self.objects[o] {
            ViewData::Base(_) => Some(coords[0]),
            ViewData::Derived(d) => d.index_of(coords).map(|i| i as El),
        }
    }

    pub fn tuples(&self, o: ObjId) -> Vec<Vec<El>> {
        match &self.objects[o] {
            ViewData::Base(i) => (0..self.bases[*i].size as El).map(|e| alloc::vec![e]).collect(),
            ViewData::Derived(d) => d.elems.clone(),
        }
    }

    pub fn identity(&self, o: ObjId) -> Hom {
        Hom { src: o, dst: o, map: (0..self.size(o) as El).collect() }
    }

    /// Deterministic hom set between two objects, memoized. User-restricted
    /// hom lists apply between base objects; homs touching adjoined objects
    /// are always the full homomorphism sets.
    pub fn homs(&mut self, a: ObjId, b: ObjId) -> Rc<Vec<Hom>> {
        if let Some(h) = self.hom_memo.get(&(a, b)) {
            return h.clone();
        }
        let list: Vec<Hom> = if let (Some(user), true) =
            (self.user_homs.clone(), self.is_base(a) && self.is_base(b))
        {
            let mut v: Vec<Hom> =
                user.iter().filter(|h| h.src == a && h.dst == b).cloned().collect();
            v.sort();
            v.dedup();
            v
        } else {
            let va = self.view(a);
            let vb = self.view(b);
            let maps = crate::algebra::hom::enumerate_maps(&va, &vb, &mut self.work);
            maps.into_iter().map(|map| Hom { src: a, dst: b, map }).collect()
        };
        let rc = Rc::new(list);
        self.hom_memo.insert((a, b), rc.clone());
        rc
    }

    /// First section of f in hom order, if any.
    pub fn section_of(&mut self, f: &Hom) -> Option<Hom> {
        // fiber-candidate search instead of hom enumeration: the hom set
        // out of a large target is astronomically bigger than the section
        // space, which is cut down elementwise by f∘r = 1
        let n_dst = self.size(f.dst);
        let n_src = self.size(f.src);
        let mut cands = Candidates::none(n_dst, n_src);
        for (x, &b) in f.map.iter().enumerate() {
            cands.allow(b as usize, x as El);
        }
        let dview = self.view(f.dst);
        let sview = self.view(f.src);
        let spec = SearchSpec { forced: &[], limit: 1, max_work: SECTION_WORK_CAP };
        let out = search_maps(&dview, &sview, &cands, &spec, &mut self.work);
        out.maps().first().map(|m| Hom { src: f.dst, dst: f.src, map: m.clone() })
    }

    /// Isomorphism in the working category: bijective hom whose inverse is
    /// again a hom of the category.
    pub fn category_iso(&mut self, f: &Hom) -> Option<Hom> {
        let inv = f.inverse(self.size(f.dst))?;
        if self.user_homs.is_some() && self.is_base(f.src) && self.is_base(f.dst) {
            let back = self.homs(f.dst, f.src);
            if !back.iter().any(|h| *h == inv) {
                return None;
            }
        }
        Some(inv)
    }

    /// Registers a subalgebra-of-product carrier, canonicalizing to the
    /// first existing isomorphic object when one exists. Returns the object
    /// and the embedding tuple-index → object element.
    pub fn adjoin_tuples(
        &mut self,
        factors: Vec<usize>,
        elems: Vec<Vec<El>>,
        what: &str,
    ) -> Result<(ObjId, Rc<Vec<El>>), CatError> {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]), "tuple carrier must be sorted");
        if elems.is_empty() {
            return Err(CatError::MissingObject(format!("{what}: empty carrier")));
        }
        let key = (factors.clone(), elems.clone());
        if let Some((obj, emb)) = self.derived_key.get(&key) {
            return Ok((*obj, emb.clone()));
        }
        let data = Rc::new(DerivedData { factors, elems });
        let dview = OwnedView { bases: self.bases.clone(), data: ViewData::Derived(data.clone()) };
        // canonicalize against existing objects of matching size, ascending id
        if self.user_homs.is_none() {
            for cand in 0..self.objects.len() {
                if self.size(cand) != data.elems.len() {
                    continue;
                }
                let cview = self.view(cand);
                let spec = SearchSpec { forced: &[], limit: 0, max_work: CANON_WORK_CAP };
                let full = Candidates::full(data.elems.len(), data.elems.len());
                let out = search_maps(&dview, &cview, &full, &spec, &mut self.work);
                if out.capped() {
                    continue;
                }
                if let Some(m) = out.maps().iter().find(|m| injective(m)) {
                    let emb = Rc::new(m.clone());
                    self.derived_key.insert(key, (cand, emb.clone()));
                    return Ok((cand, emb));
                }
            }
        }
        if !self.adjoin {
            return Err(CatError::MissingObject(format!(
                "{what}: not isomorphic to a listed object and limit adjunction is disabled"
            )));
        }
        let obj = self.objects.len();
        self.objects.push(ViewData::Derived(data.clone()));
        self.names.push(format!("lim{obj}"));
        let emb: Rc<Vec<El>> = Rc::new((0..data.elems.len() as El).collect());
        self.derived_key.insert(key, (obj, emb.clone()));
        Ok((obj, emb))
    }

    /// Product of two objects with projections, canonicalized.
    pub fn product_pair(&mut self, a: ObjId, b: ObjId) -> Result<(ObjId, Hom, Hom), CatError> {
        let fa = self.factors(a);
        let fb = self.factors(b);
        let ta = self.tuples(a);
        let tb = self.tuples(b);
        let mut factors = fa;
        factors.extend(fb);
        let mut elems = Vec::with_capacity(ta.len() * tb.len());
        let mut proj1 = Vec::with_capacity(ta.len() * tb.len());
        let mut proj2 = Vec::with_capacity(ta.len() * tb.len());
        for (i, x) in ta.iter().enumerate() {
            for (j, y) in tb.iter().enumerate() {
                let mut t = x.clone();
                t.extend_from_slice(y);
                elems.push(t);
                proj1.push(i as El);
                proj2.push(j as El);
            }
        }
        // cartesian over sorted parts in lex order is already sorted
        let (obj, emb) = self.adjoin_tuples(factors, elems, "product")?;
        let mut m1 = alloc::vec![0 as El; proj1.len()];
        let mut m2 = alloc::vec![0 as El; proj2.len()];
        for k in 0..proj1.len() {
            m1[emb[k] as usize] = proj1[k];
            m2[emb[k] as usize] = proj2[k];
        }
        Ok((
            obj,
            Hom { src: obj, dst: a, map: m1 },
            Hom { src: obj, dst: b, map: m2 },
        ))
    }

    /// Pairing ⟨f,g⟩ of two homs out of a shared source into the canonical
    /// product of their targets.
    pub fn pair_hom(&mut self, f: &Hom, g: &Hom) -> Result<Hom, CatError> {
        if f.src != g.src {
            return Err(CatError::Shape(String::from("pairing needs a shared source")));
        }
        let (p, p1, p2) = self.product_pair(f.dst, g.dst)?;
        let mut cell: BTreeMap<(El, El), El> = BTreeMap::new();
        for e in 0..self.size(p) as El {
            cell.insert((p1.map[e as usize], p2.map[e as usize]), e);
        }
        let map = f
            .map
            .iter()
            .zip(g.map.iter())
            .map(|(&a, &b)| cell[&(a, b)])
            .collect();
        Ok(Hom { src: f.src, dst: p, map })
    }

    /// Quantification scope for object-indexed conditions: the base objects
    /// plus all pairwise products within the bound, canonicalized, deduped,
    /// ascending.
    pub fn battery_objects(&mut self) -> Rc<Vec<ObjId>> {
        if let Some(b) = &self.battery {
            return b.clone();
        }
        let mut out: Vec<ObjId> = (0..self.n_bases()).collect();
        if self.adjoin {
            for a in 0..self.n_bases() {
                for b in 0..self.n_bases() {
                    if self.size(a) * self.size(b) <= self.bound {
                        if let Ok((p, _, _)) = self.product_pair(a, b) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        let rc = Rc::new(out);
        self.battery = Some(rc.clone());
        rc
    }

    /// Checks a map shape-wise and against the homomorphism law.
    pub fn check_hom(&self, h: &Hom) -> bool {
        h.src < self.objects.len()
            && h.dst < self.objects.len()
            && h.map.len() == self.size(h.src)
            && is_homomorphism(&h.map, &self.view(h.src), &self.view(h.dst))
    }
}

#[cfg(test)]
pub mod tests {
    use super::*;
    use crate::algebra::tests::{group_eqs, group_sig, z};

    pub fn abelian_frozen() -> FrozenCategory {
        let sig = group_sig();
        let eqs = {
            let mut e = group_eqs(&sig);
            e.push(Equation::parse(&sig, "mul(x,y)", "mul(y,x)").unwrap());
            e
        };
        let z1 = z(1);
        let z2 = z(2);
        let (mut v4, _, _) = crate::algebra::product(&z2, &z2);
        v4.name = String::from("Z2xZ2");
        let z4 = z(4);
        FrozenCategory::new(sig, eqs, alloc::vec![z1, z2, v4, z4], None, true, 16).unwrap()
    }

    #[test]
    fn hom_sets_and_composition() {
        let fc = abelian_frozen();
        let mut wc = WorkingCategory::new(&fc);
        assert_eq!(wc.homs(1, 1).len(), 2);
        assert_eq!(wc.homs(1, 3).len(), 2);
        assert_eq!(wc.homs(2, 2).len(), 16);
        assert_eq!(wc.homs(3, 3).len(), 4);
        assert_eq!(wc.homs(3, 2).len(), 4);
        let id = wc.identity(2);
        for h in wc.homs(2, 3).iter() {
            assert_eq!(&Hom::compose(h, &id), h);
        }
    }

    #[test]
    fn product_canonicalizes_to_base() {
        let fc = abelian_frozen();
        let mut wc = WorkingCategory::new(&fc);
        // Z2 × Z2 is the listed Klein-four object, not Z4
        let (p, p1, p2) = wc.product_pair(1, 1).unwrap();
        assert_eq!(p, 2);
        assert!(wc.check_hom(&p1) && wc.check_hom(&p2));
        // projections are jointly injective
        let n = wc.size(p);
        let mut seen = alloc::vec![false; 16];
        for e in 0..n {
            let k = (p1.map[e] as usize) * 4 + p2.map[e] as usize;
            assert!(!seen[k]);
            seen[k] = true;
        }
    }

    #[test]
    fn adjoin_dedups_and_canonicalizes_subobjects() {
        let fc = abelian_frozen();
        let mut wc = WorkingCategory::new(&fc);
        // diagonal of Z2×Z2 as a subalgebra: isomorphic to Z2 (object 1)
        let factors = alloc::vec![1usize, 1usize];
        let elems = alloc::vec![alloc::vec![0, 0], alloc::vec![1, 1]];
        let (o, emb) = wc.adjoin_tuples(factors.clone(), elems.clone(), "diag").unwrap();
        assert_eq!(o, 1);
        assert_eq!(emb.len(), 2);
        let (o2, emb2) = wc.adjoin_tuples(factors, elems, "diag").unwrap();
        assert_eq!(o, o2);
        assert_eq!(emb, emb2);
    }

    #[test]
    fn battery_objects_within_bound() {
        let fc = abelian_frozen();
        let mut wc = WorkingCategory::new(&fc);
        let objs = wc.battery_objects();
        assert!(objs.len() > 4);
        for &o in objs.iter() {
            assert!(wc.size(o) <= 16);
        }
        // canonical: products with Z1 fold back onto the other factor
        assert!(objs.contains(&1) && objs.contains(&2) && objs.contains(&3));
    }

    #[test]
    fn user_hom_validation() {
        let sig = group_sig();
        let eqs = group_eqs(&sig);
        let z2 = z(2);
        // identity missing
        let err = FrozenCategory::new(
            sig.clone(),
            eqs.clone(),
            alloc::vec![z2.clone()],
            Some(alloc::vec![]),
            true,
            16,
        )
        .unwrap_err();
        assert!(matches!(err, CatError::MissingIdentity(_)));
        // zero endomorphism alone is not closed with the identity? it is:
        // id∘id=id, id∘0=0, 0∘0=0 — this list is fine
        let homs = alloc::vec![
            Hom { src: 0, dst: 0, map: alloc::vec![0, 1] },
            Hom { src: 0, dst: 0, map: alloc::vec![0, 0] },
        ];
        assert!(FrozenCategory::new(sig.clone(), eqs.clone(), alloc::vec![z2.clone()], Some(homs), true, 16)
            .is_ok());
        // a non-homomorphism is rejected
        let bad = alloc::vec![
            Hom { src: 0, dst: 0, map: alloc::vec![0, 1] },
            Hom { src: 0, dst: 0, map: alloc::vec![1, 0] },
        ];
        let err =
            FrozenCategory::new(sig, eqs, alloc::vec![z2], Some(bad), true, 16).unwrap_err();
        assert!(matches!(err, CatError::BadHom { index: 1, .. }));
    }

    /// Element of the product-like object with the given projection values.
    pub fn pair_elem(p1: &Hom, p2: &Hom, x: El, y: El) -> El {
        (0..p1.map.len())
            .find(|&u| p1.map[u] == x && p2.map[u] == y)
            .expect("pair in product") as El
    }

    #[test]
    fn split_span_shape() {
        let fc = abelian_frozen();
        let mut wc = WorkingCategory::new(&fc);
        let (p, p1, p2) = wc.product_pair(1, 1).unwrap();
        // product injections x ↦ (x,0) and y ↦ (0,y)
        let e1 = Hom { src: 1, dst: p, map: (0..2).map(|x| pair_elem(&p1, &p2, x, 0)).collect() };
        let e2 = Hom { src: 1, dst: p, map: (0..2).map(|y| pair_elem(&p1, &p2, 0, y)).collect() };
        let ss = SplitSpan::new(e1, p1.clone(), e2, p2.clone()).unwrap();
        assert!(ss.is_commutative());
        let sp = Span::new(p1, p2).unwrap();
        assert_eq!(sp.apex, p);
    }
}
