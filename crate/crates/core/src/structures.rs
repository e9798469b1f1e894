//! Internal structures carried by a working category: reflexive graphs,
//! unital multiplicative graphs, internal categories and groupoids,
//! pregroupoids (plain, associative, autonomous), pseudogroupoids, and
//! directed kites with their multiplications and morphisms.
//!
//! Constructors that materialize derived objects (composable pairs, triple
//! and box filters) take `&mut WorkingCategory`; every validator is a pure
//! scan over frozen data, reporting the first broken identity in element
//! order plus a total violation count. Malformed data — wrong shapes, maps
//! that are not morphisms, stale pair tables — comes back as
//! `CatError::Shape`, never as a verdict.
//!
//! Composition convention: a composable pair is (u, w) with d(u) = c(w),
//! read as u after w, so dm = dπ₂ and cm = cπ₁ throughout. The groupoid
//! inverse laws in this convention are m(1, i) = ec and m(i, 1) = ed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::El;
use crate::category::limits::{
    kernel_pair, pullback_pairs, pullback_split, BoxConstruction, KpConstruction, Pullback,
};
use crate::category::{CatError, Hom, ObjId, Span, WorkingCategory};

/// A failed identity: which law broke, and the elements where it broke.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: &'static str,
    pub witness: Vec<El>,
}

/// First violation in element order plus the total count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub first: Option<Violation>,
    pub count: usize,
}

impl LawCheck {
    pub fn is_valid(&self) -> bool {
        self.first.is_none()
    }
}

struct Audit {
    first: Option<Violation>,
    count: usize,
}

impl Audit {
    fn new() -> Audit {
        Audit { first: None, count: 0 }
    }

    fn hit(&mut self, law: &'static str, witness: &[El]) {
        self.count += 1;
        if self.first.is_none() {
            self.first = Some(Violation { law, witness: witness.to_vec() });
        }
    }

    fn done(self) -> LawCheck {
        LawCheck { first: self.first, count: self.count }
    }
}

fn shape(msg: &str) -> CatError {
    CatError::Shape(String::from(msg))
}

fn need(cond: bool, msg: &str) -> Result<(), CatError> {
    if cond {
        Ok(())
    } else {
        Err(shape(msg))
    }
}

fn need_hom(wc: &WorkingCategory, h: &Hom, what: &str) -> Result<(), CatError> {
    if wc.check_hom(h) {
        Ok(())
    } else {
        Err(CatError::Shape(format!("{what} is not a morphism of the category")))
    }
}

/// Elements of `map`'s source grouped by image value.
fn classes_by(map: &[El], n_vals: usize) -> Vec<Vec<El>> {
    let mut cl = alloc::vec![Vec::new(); n_vals];
    for (x, &v) in map.iter().enumerate() {
        cl[v as usize].push(x as El);
    }
    cl
}

/// d, c: C₁ → C₀ with a common unit e: de = 1 = ce.
#[derive(Clone, Debug)]
pub struct ReflexiveGraph {
    pub c1: ObjId,
    pub c0: ObjId,
    pub d: Hom,
    pub c: Hom,
    pub e: Hom,
}

impl ReflexiveGraph {
    pub fn new(d: Hom, c: Hom, e: Hom) -> Result<ReflexiveGraph, CatError> {
        need(d.src == c.src && d.dst == c.dst, "graph legs need a common source and target")?;
        need(e.src == d.dst && e.dst == d.src, "graph unit must point back into the arrow object")?;
        Ok(ReflexiveGraph { c1: d.src, c0: d.dst, d, c, e })
    }

    fn shape_check(&self, wc: &WorkingCategory) -> Result<(), CatError> {
        need(self.d.src == self.c1 && self.d.dst == self.c0, "d leg out of shape")?;
        need(self.c.src == self.c1 && self.c.dst == self.c0, "c leg out of shape")?;
        need(self.e.src == self.c0 && self.e.dst == self.c1, "unit out of shape")?;
        need_hom(wc, &self.d, "d")?;
        need_hom(wc, &self.c, "c")?;
        need_hom(wc, &self.e, "e")
    }

    fn audit(&self, wc: &WorkingCategory, a: &mut Audit) {
        for b in 0..wc.size(self.c0) as El {
            let up = self.e.map[b as usize] as usize;
            if self.d.map[up] != b {
                a.hit("d e = 1", &[b]);
            }
            if self.c.map[up] != b {
                a.hit("c e = 1", &[b]);
            }
        }
    }

    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.shape_check(wc)?;
        let mut a = Audit::new();
        self.audit(wc, &mut a);
        Ok(a.done())
    }
}

/// Reflexive graph with a multiplication on its composable pairs.
#[derive(Clone, Debug)]
pub struct MultGraph {
    pub graph: ReflexiveGraph,
    /// C₂ = C₁×_{C₀}C₁, pairs (u, w) with d(u) = c(w).
    pub pairs: Pullback,
    pub m: Hom,
}

impl MultGraph {
    /// Materializes C₂ for the graph; d and c are split by e.
    pub fn composable_pairs(
        wc: &mut WorkingCategory,
        g: &ReflexiveGraph,
    ) -> Result<Pullback, CatError> {
        pullback_split(wc, &g.d, &g.c)
    }

    pub fn new(graph: ReflexiveGraph, pairs: Pullback, m: Hom) -> Result<MultGraph, CatError> {
        need(
            m.src == pairs.obj && m.dst == graph.c1,
            "multiplication must map composable pairs into the arrow object",
        )?;
        Ok(MultGraph { graph, pairs, m })
    }

    pub fn elem_of_pair(&self, u: El, w: El) -> Option<El> {
        self.pairs.elem_of((u, w))
    }

    fn shape_check(&self, wc: &WorkingCategory) -> Result<(), CatError> {
        self.graph.shape_check(wc)?;
        need(
            self.m.src == self.pairs.obj && self.m.dst == self.graph.c1,
            "multiplication out of shape",
        )?;
        need_hom(wc, &self.m, "m")?;
        let expect = pullback_pairs(wc, &self.graph.d, &self.graph.c);
        need(expect == self.pairs.pairs, "composable-pair table does not match the graph")?;
        for (k, &(u, w)) in self.pairs.pairs.iter().enumerate() {
            let el = self.pairs.emb[k] as usize;
            need(
                self.pairs.p1.map[el] == u && self.pairs.p2.map[el] == w,
                "pair projections disagree with the pair table",
            )?;
        }
        Ok(())
    }

    fn audit(&self, wc: &WorkingCategory, a: &mut Audit) {
        let (d, c, e) = (&self.graph.d.map, &self.graph.c.map, &self.graph.e.map);
        for (k, &(u, w)) in self.pairs.pairs.iter().enumerate() {
            let muw = self.m.map[self.pairs.emb[k] as usize] as usize;
            if d[muw] != d[w as usize] {
                a.hit("d m = d pi2", &[u, w]);
            }
            if c[muw] != c[u as usize] {
                a.hit("c m = c pi1", &[u, w]);
            }
        }
        for u in 0..wc.size(self.graph.c1) as El {
            // the unit pairs are composable whenever de = 1 = ce; on broken
            // graph data the missing pair counts against the unit law itself
            match self.elem_of_pair(u, e[d[u as usize] as usize]) {
                Some(el) if self.m.map[el as usize] == u => {}
                _ => a.hit("m(1, e d) = 1", &[u]),
            }
            match self.elem_of_pair(e[c[u as usize] as usize], u) {
                Some(el) if self.m.map[el as usize] == u => {}
                _ => a.hit("m(e c, 1) = 1", &[u]),
            }
        }
    }

    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.shape_check(wc)?;
        let mut a = Audit::new();
        self.graph.audit(wc, &mut a);
        self.audit(wc, &mut a);
        Ok(a.done())
    }

    /// Unital multiplicative graph laws plus associativity. Associativity is
    /// audited only once the unital laws hold, since its composite lookups
    /// depend on them.
    pub fn validate_category(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        let base = self.validate(wc)?;
        if !base.is_valid() {
            return Ok(base);
        }
        let mut a = Audit::new();
        self.audit_associative(&mut a);
        Ok(a.done())
    }

    fn audit_associative(&self, a: &mut Audit) {
        // triples (u, v, w) with (u, v) and (v, w) composable
        for (k, &(u, v)) in self.pairs.pairs.iter().enumerate() {
            let muv = self.m.map[self.pairs.emb[k] as usize];
            for (k2, &(v2, w)) in self.pairs.pairs.iter().enumerate() {
                if v2 != v {
                    continue;
                }
                let mvw = self.m.map[self.pairs.emb[k2] as usize];
                let lhs = self.elem_of_pair(muv, w).map(|el| self.m.map[el as usize]);
                let rhs = self.elem_of_pair(u, mvw).map(|el| self.m.map[el as usize]);
                if lhs.is_none() || rhs.is_none() || lhs != rhs {
                    a.hit("m(m x 1) = m(1 x m)", &[u, v, w]);
                }
            }
        }
    }
}

/// Internal groupoid: associative unital multiplicative graph with inverses.
#[derive(Clone, Debug)]
pub struct InternalGroupoid {
    pub mg: MultGraph,
    pub i: Hom,
}

impl InternalGroupoid {
    pub fn new(mg: MultGraph, i: Hom) -> Result<InternalGroupoid, CatError> {
        need(i.src == mg.graph.c1 && i.dst == mg.graph.c1, "inverse must be an endomap of arrows")?;
        Ok(InternalGroupoid { mg, i })
    }

    /// Category laws first, then the inverse laws. Inverse pairs that fail
    /// to be composable count against the inverse law they belong to.
    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        need(
            self.i.src == self.mg.graph.c1 && self.i.dst == self.mg.graph.c1,
            "inverse out of shape",
        )?;
        need_hom(wc, &self.i, "i")?;
        let cat = self.mg.validate_category(wc)?;
        if !cat.is_valid() {
            return Ok(cat);
        }
        let (d, c, e) = (&self.mg.graph.d.map, &self.mg.graph.c.map, &self.mg.graph.e.map);
        let mut a = Audit::new();
        for u in 0..wc.size(self.mg.graph.c1) as El {
            let iu = self.i.map[u as usize];
            match self.mg.elem_of_pair(u, iu) {
                Some(el) if self.mg.m.map[el as usize] == e[c[u as usize] as usize] => {}
                _ => a.hit("m(1, i) = e c", &[u]),
            }
            match self.mg.elem_of_pair(iu, u) {
                Some(el) if self.mg.m.map[el as usize] == e[d[u as usize] as usize] => {}
                _ => a.hit("m(i, 1) = e d", &[u]),
            }
        }
        Ok(a.done())
    }
}

/// Span with a partial Mal'tsev operation on its triple filter.
#[derive(Clone, Debug)]
pub struct Pregroupoid {
    pub kp: KpConstruction,
    pub p: Hom,
}

impl Pregroupoid {
    pub fn new(kp: KpConstruction, p: Hom) -> Result<Pregroupoid, CatError> {
        need(
            p.src == kp.obj && p.dst == kp.span.apex,
            "p must map the triple filter into the span apex",
        )?;
        Ok(Pregroupoid { kp, p })
    }

    pub fn apply(&self, x: El, y: El, z: El) -> Option<El> {
        self.kp.elem_of([x, y, z]).map(|el| self.p.map[el as usize])
    }

    /// Unchecked lookup; composable triples always resolve once validate
    /// has passed, which gates every caller below.
    fn at(&self, x: El, y: El, z: El) -> El {
        self.p.map[self.kp.elem_of([x, y, z]).expect("composable triple") as usize]
    }

    fn shape_check(&self, wc: &WorkingCategory) -> Result<(), CatError> {
        need(self.p.src == self.kp.obj && self.p.dst == self.kp.span.apex, "p out of shape")?;
        need_hom(wc, &self.p, "p")?;
        need_hom(wc, &self.kp.span.d, "d")?;
        need_hom(wc, &self.kp.span.c, "c")?;
        let (d, c) = (&self.kp.span.d.map, &self.kp.span.c.map);
        let n = wc.size(self.kp.span.apex) as El;
        let mut expect = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if d[x as usize] != d[y as usize] {
                    continue;
                }
                for z in 0..n {
                    if c[y as usize] == c[z as usize] {
                        expect.push([x, y, z]);
                    }
                }
            }
        }
        need(expect == self.kp.triples, "triple filter does not match the span")
    }

    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.shape_check(wc)?;
        let (d, c) = (&self.kp.span.d.map, &self.kp.span.c.map);
        let mut a = Audit::new();
        for (k, t) in self.kp.triples.iter().enumerate() {
            let v = self.p.map[self.kp.emb[k] as usize];
            let [x, y, z] = *t;
            if y == z && v != x {
                a.hit("p(x,y,y) = x", t);
            }
            if x == y && v != z {
                a.hit("p(y,y,z) = z", t);
            }
            if d[v as usize] != d[z as usize] {
                a.hit("d p(x,y,z) = d z", t);
            }
            if c[v as usize] != c[x as usize] {
                a.hit("c p(x,y,z) = c x", t);
            }
        }
        Ok(a.done())
    }

    /// Associativity: p(u,v,p(x,y,z)) = p(p(u,v,x),y,z) over all admissible
    /// five-tuples. Requires a valid pregroupoid.
    pub fn check_kock(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        if !self.validate(wc)?.is_valid() {
            return Err(shape("associativity needs the pregroupoid laws first"));
        }
        let sp = &self.kp.span;
        let dcl = classes_by(&sp.d.map, wc.size(sp.d.dst));
        let ccl = classes_by(&sp.c.map, wc.size(sp.c.dst));
        let n = wc.size(sp.apex) as El;
        let mut a = Audit::new();
        for u in 0..n {
            for &v in &dcl[sp.d.map[u as usize] as usize] {
                for &x in &ccl[sp.c.map[v as usize] as usize] {
                    for &y in &dcl[sp.d.map[x as usize] as usize] {
                        for &z in &ccl[sp.c.map[y as usize] as usize] {
                            let lhs = self.at(u, v, self.at(x, y, z));
                            let rhs = self.at(self.at(u, v, x), y, z);
                            if lhs != rhs {
                                a.hit("p(u,v,p(x,y,z)) = p(p(u,v,x),y,z)", &[u, v, x, y, z]);
                            }
                        }
                    }
                }
            }
        }
        Ok(a.done())
    }

    /// Interchange across a 3×3 grid of admissible entries. Requires an
    /// associative pregroupoid.
    pub fn check_autonomous(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        if !self.check_kock(wc)?.is_valid() {
            return Err(shape("the interchange law needs associativity first"));
        }
        let sp = &self.kp.span;
        let (d, c) = (&sp.d.map, &sp.c.map);
        let n0 = wc.size(sp.d.dst);
        let n1 = wc.size(sp.c.dst);
        let dcl = classes_by(d, n0);
        let ccl = classes_by(c, n1);
        let mut dccl = alloc::vec![alloc::vec![Vec::new(); n1]; n0];
        for x in 0..wc.size(sp.apex) {
            dccl[d[x] as usize][c[x] as usize].push(x as El);
        }
        let mut a = Audit::new();
        for x1 in 0..wc.size(sp.apex) as El {
            let dx1 = &dcl[d[x1 as usize] as usize];
            for &y1 in dx1 {
                for &x2 in dx1 {
                    for &y2 in dx1 {
                        for &z1 in &ccl[c[y1 as usize] as usize] {
                            for &z2 in &dccl[d[z1 as usize] as usize][c[y2 as usize] as usize] {
                                for &x3 in &ccl[c[x2 as usize] as usize] {
                                    for &y3 in
                                        &dccl[d[x3 as usize] as usize][c[y2 as usize] as usize]
                                    {
                                        for &z3 in &ccl[c[y2 as usize] as usize] {
                                            let lhs = self.at(
                                                self.at(x1, x2, x3),
                                                self.at(y1, y2, y3),
                                                self.at(z1, z2, z3),
                                            );
                                            let rhs = self.at(
                                                self.at(x1, y1, z1),
                                                self.at(x2, y2, z2),
                                                self.at(x3, y3, z3),
                                            );
                                            if lhs != rhs {
                                                a.hit(
                                                    "p(p(x1,x2,x3),p(y1,y2,y3),p(z1,z2,z3)) = p(p(x1,y1,z1),p(x2,y2,z2),p(x3,y3,z3))",
                                                    &[x1, y1, z1, x2, y2, z2, x3, y3, z3],
                                                );
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(a.done())
    }
}

/// Span with a four-variable operation on its box that projects away the
/// fourth variable.
#[derive(Clone, Debug)]
pub struct Pseudogroupoid {
    pub bx: BoxConstruction,
    pub m: Hom,
}

impl Pseudogroupoid {
    pub fn new(bx: BoxConstruction, m: Hom) -> Result<Pseudogroupoid, CatError> {
        need(m.src == bx.obj && m.dst == bx.span.apex, "m must map the box into the span apex")?;
        Ok(Pseudogroupoid { bx, m })
    }

    fn shape_check(&self, wc: &WorkingCategory) -> Result<(), CatError> {
        need(self.m.src == self.bx.obj && self.m.dst == self.bx.span.apex, "m out of shape")?;
        need_hom(wc, &self.m, "m")?;
        let (d, c) = (&self.bx.span.d.map, &self.bx.span.c.map);
        let n = wc.size(self.bx.span.apex) as El;
        let mut expect = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if d[x as usize] != d[y as usize] {
                    continue;
                }
                for z in 0..n {
                    if c[y as usize] != c[z as usize] {
                        continue;
                    }
                    for w in 0..n {
                        if d[z as usize] == d[w as usize] && c[w as usize] == c[x as usize] {
                            expect.push([x, y, z, w]);
                        }
                    }
                }
            }
        }
        need(expect == self.bx.quads, "box filter does not match the span")
    }

    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.shape_check(wc)?;
        let (d, c) = (&self.bx.span.d.map, &self.bx.span.c.map);
        let mut a = Audit::new();
        for (k, q) in self.bx.quads.iter().enumerate() {
            let v = self.m.map[self.bx.emb[k] as usize];
            let [x, y, z, w] = *q;
            if z == y && w == x && v != x {
                a.hit("m(x,y,y,x) = x", q);
            }
            if x == y && w == z && v != z {
                a.hit("m(y,y,z,z) = z", q);
            }
            if d[v as usize] != d[z as usize] {
                a.hit("d m(x,y,z,w) = d z", q);
            }
            if c[v as usize] != c[x as usize] {
                a.hit("c m(x,y,z,w) = c x", q);
            }
        }
        for (j, f) in self.bx.fives.iter().enumerate() {
            let de = self.bx.demb[j] as usize;
            let a1 = self.m.map[self.bx.r1.map[de] as usize];
            let a2 = self.m.map[self.bx.r2.map[de] as usize];
            if a1 != a2 {
                a.hit("m(x,y,z,w) = m(x,y,z,w')", f);
            }
        }
        Ok(a.done())
    }
}

/// A span of split epis over a span: fr = 1 = gs, αr = β = γs, dα = dβf,
/// cβg = cγ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedKite {
    pub f: Hom,
    pub r: Hom,
    pub s: Hom,
    pub g: Hom,
    pub alpha: Hom,
    pub beta: Hom,
    pub gamma: Hom,
    pub span: Span,
}

impl DirectedKite {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: Hom,
        r: Hom,
        s: Hom,
        g: Hom,
        alpha: Hom,
        beta: Hom,
        gamma: Hom,
        span: Span,
    ) -> Result<DirectedKite, CatError> {
        let (a, b, c) = (f.src, f.dst, g.src);
        need(r.src == b && r.dst == a, "r must section f")?;
        need(s.src == b && s.dst == c, "s must section g")?;
        need(g.dst == b, "g must land beside f")?;
        need(alpha.src == a && alpha.dst == span.apex, "alpha out of shape")?;
        need(beta.src == b && beta.dst == span.apex, "beta out of shape")?;
        need(gamma.src == c && gamma.dst == span.apex, "gamma out of shape")?;
        Ok(DirectedKite { f, r, s, g, alpha, beta, gamma, span })
    }

    pub fn a(&self) -> ObjId {
        self.f.src
    }

    pub fn b(&self) -> ObjId {
        self.f.dst
    }

    pub fn c(&self) -> ObjId {
        self.g.src
    }

    fn shape_check(&self, wc: &WorkingCategory) -> Result<(), CatError> {
        for (h, what) in [
            (&self.f, "f"),
            (&self.r, "r"),
            (&self.s, "s"),
            (&self.g, "g"),
            (&self.alpha, "alpha"),
            (&self.beta, "beta"),
            (&self.gamma, "gamma"),
            (&self.span.d, "d"),
            (&self.span.c, "c"),
        ] {
            need_hom(wc, h, what)?;
        }
        Ok(())
    }

    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.shape_check(wc)?;
        let mut a = Audit::new();
        let (d, c) = (&self.span.d.map, &self.span.c.map);
        for b in 0..wc.size(self.b()) as El {
            let bi = b as usize;
            if self.f.map[self.r.map[bi] as usize] != b {
                a.hit("f r = 1", &[b]);
            }
            if self.g.map[self.s.map[bi] as usize] != b {
                a.hit("g s = 1", &[b]);
            }
            if self.alpha.map[self.r.map[bi] as usize] != self.beta.map[bi] {
                a.hit("alpha r = beta", &[b]);
            }
            if self.gamma.map[self.s.map[bi] as usize] != self.beta.map[bi] {
                a.hit("gamma s = beta", &[b]);
            }
        }
        for x in 0..wc.size(self.a()) as El {
            let xi = x as usize;
            let left = d[self.alpha.map[xi] as usize];
            let right = d[self.beta.map[self.f.map[xi] as usize] as usize];
            if left != right {
                a.hit("d alpha = d beta f", &[x]);
            }
        }
        for y in 0..wc.size(self.c()) as El {
            let yi = y as usize;
            let left = c[self.beta.map[self.g.map[yi] as usize] as usize];
            let right = c[self.gamma.map[yi] as usize];
            if left != right {
                a.hit("c beta g = c gamma", &[y]);
            }
        }
        Ok(a.done())
    }
}

/// Multiplication on a directed kite: m: A×_B C → D with m(1, sf) = α,
/// m(rg, 1) = γ, dm = dγπ₂, cm = cαπ₁.
#[derive(Clone, Debug)]
pub struct Multiplication {
    pub kite: DirectedKite,
    pub pb: Pullback,
    pub m: Hom,
}

impl Multiplication {
    /// Materializes A×_B C for the kite (f and g are split by r and s).
    pub fn pullback(wc: &mut WorkingCategory, kite: &DirectedKite) -> Result<Pullback, CatError> {
        pullback_split(wc, &kite.f, &kite.g)
    }

    pub fn new(kite: DirectedKite, pb: Pullback, m: Hom) -> Result<Multiplication, CatError> {
        need(
            m.src == pb.obj && m.dst == kite.span.apex,
            "multiplication must map the kite pullback into the span apex",
        )?;
        Ok(Multiplication { kite, pb, m })
    }

    fn shape_check(&self, wc: &WorkingCategory) -> Result<(), CatError> {
        self.kite.shape_check(wc)?;
        need(
            self.m.src == self.pb.obj && self.m.dst == self.kite.span.apex,
            "multiplication out of shape",
        )?;
        need_hom(wc, &self.m, "m")?;
        let expect = pullback_pairs(wc, &self.kite.f, &self.kite.g);
        need(expect == self.pb.pairs, "pullback pairs do not match the kite cospan")?;
        for (k, &(x, y)) in self.pb.pairs.iter().enumerate() {
            let el = self.pb.emb[k] as usize;
            need(
                self.pb.p1.map[el] == x && self.pb.p2.map[el] == y,
                "pullback projections disagree with the pair table",
            )?;
        }
        Ok(())
    }

    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.shape_check(wc)?;
        let k = &self.kite;
        let (d, c) = (&k.span.d.map, &k.span.c.map);
        let mut a = Audit::new();
        for x in 0..wc.size(k.a()) as El {
            let other = k.s.map[k.f.map[x as usize] as usize];
            match self.pb.elem_of((x, other)) {
                Some(el) if self.m.map[el as usize] == k.alpha.map[x as usize] => {}
                _ => a.hit("m(1, s f) = alpha", &[x]),
            }
        }
        for y in 0..wc.size(k.c()) as El {
            let other = k.r.map[k.g.map[y as usize] as usize];
            match self.pb.elem_of((other, y)) {
                Some(el) if self.m.map[el as usize] == k.gamma.map[y as usize] => {}
                _ => a.hit("m(r g, 1) = gamma", &[y]),
            }
        }
        for (j, &(x, y)) in self.pb.pairs.iter().enumerate() {
            let v = self.m.map[self.pb.emb[j] as usize] as usize;
            if d[v] != d[k.gamma.map[y as usize] as usize] {
                a.hit("d m = d gamma pi2", &[x, y]);
            }
            if c[v] != c[k.alpha.map[x as usize] as usize] {
                a.hit("c m = c alpha pi1", &[x, y]);
            }
        }
        Ok(a.done())
    }
}

/// Reflexive graph as a directed kite: legs d, c, unit e on both wings,
/// identities for the outer maps.
pub fn kite_of_graph(wc: &WorkingCategory, g: &ReflexiveGraph) -> Result<DirectedKite, CatError> {
    let one = wc.identity(g.c1);
    DirectedKite::new(
        g.d.clone(),
        g.e.clone(),
        g.e.clone(),
        g.c.clone(),
        one.clone(),
        g.e.clone(),
        one,
        Span::new(g.d.clone(), g.c.clone())?,
    )
}

/// Span as a directed kite via its two kernel pairs, diagonals as sections.
pub fn kite_of_span(wc: &mut WorkingCategory, sp: &Span) -> Result<DirectedKite, CatError> {
    let kd = kernel_pair(wc, &sp.d)?;
    let kc = kernel_pair(wc, &sp.c)?;
    let n = wc.size(sp.apex) as El;
    let dd: Vec<El> = (0..n).map(|x| kd.elem_of((x, x)).expect("diagonal pair")).collect();
    let dc: Vec<El> = (0..n).map(|x| kc.elem_of((x, x)).expect("diagonal pair")).collect();
    DirectedKite::new(
        kd.p2.clone(),
        Hom { src: sp.apex, dst: kd.obj, map: dd },
        Hom { src: sp.apex, dst: kc.obj, map: dc },
        kc.p1.clone(),
        kd.p1.clone(),
        wc.identity(sp.apex),
        kc.p2.clone(),
        sp.clone(),
    )
}

/// The two kites of a multiplicative graph: one whose admissibility encodes
/// associativity, one whose admissibility encodes inverses.
pub fn kites_of_multgraph(
    wc: &WorkingCategory,
    mg: &MultGraph,
) -> Result<(DirectedKite, DirectedKite), CatError> {
    let g = &mg.graph;
    let n1 = wc.size(g.c1) as El;
    let unit_pair = |u: El, w: El| {
        mg.elem_of_pair(u, w).ok_or_else(|| shape("unit pair missing from the pair table"))
    };
    let e1: Vec<El> = (0..n1)
        .map(|u| unit_pair(u, g.e.map[g.d.map[u as usize] as usize]))
        .collect::<Result<_, _>>()?;
    let e2: Vec<El> = (0..n1)
        .map(|w| unit_pair(g.e.map[g.c.map[w as usize] as usize], w))
        .collect::<Result<_, _>>()?;
    let e1 = Hom { src: g.c1, dst: mg.pairs.obj, map: e1 };
    let e2 = Hom { src: g.c1, dst: mg.pairs.obj, map: e2 };
    let span = Span::new(g.d.clone(), g.c.clone())?;
    let assoc = DirectedKite::new(
        mg.pairs.p2.clone(),
        e2.clone(),
        e1.clone(),
        mg.pairs.p1.clone(),
        mg.m.clone(),
        wc.identity(g.c1),
        mg.m.clone(),
        span.clone(),
    )?;
    let inverse = DirectedKite::new(
        mg.m.clone(),
        e2,
        e1,
        mg.m.clone(),
        mg.pairs.p2.clone(),
        wc.identity(g.c1),
        mg.pairs.p1.clone(),
        span,
    )?;
    Ok((assoc, inverse))
}

/// Morphism of spans: three maps with both leg squares commuting.
#[derive(Clone, Debug)]
pub struct SpanMorphism {
    pub src: Span,
    pub dst: Span,
    pub f: Hom,
    pub f0: Hom,
    pub f1: Hom,
}

impl SpanMorphism {
    fn shape_check(&self, wc: &WorkingCategory) -> Result<(), CatError> {
        need(
            self.f.src == self.src.apex && self.f.dst == self.dst.apex,
            "apex map out of shape",
        )?;
        need(
            self.f0.src == self.src.d.dst && self.f0.dst == self.dst.d.dst,
            "left foot map out of shape",
        )?;
        need(
            self.f1.src == self.src.c.dst && self.f1.dst == self.dst.c.dst,
            "right foot map out of shape",
        )?;
        need_hom(wc, &self.f, "f")?;
        need_hom(wc, &self.f0, "f0")?;
        need_hom(wc, &self.f1, "f1")
    }

    fn audit(&self, wc: &WorkingCategory, a: &mut Audit) {
        for x in 0..wc.size(self.src.apex) as El {
            let xi = x as usize;
            let fx = self.f.map[xi] as usize;
            if self.dst.d.map[fx] != self.f0.map[self.src.d.map[xi] as usize] {
                a.hit("d' f = f0 d", &[x]);
            }
            if self.dst.c.map[fx] != self.f1.map[self.src.c.map[xi] as usize] {
                a.hit("c' f = f1 c", &[x]);
            }
        }
    }

    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.shape_check(wc)?;
        let mut a = Audit::new();
        self.audit(wc, &mut a);
        Ok(a.done())
    }
}

/// Morphism of reflexive graphs: arrow and object maps commuting with
/// d, c, and e.
#[derive(Clone, Debug)]
pub struct GraphMorphism {
    pub src: ReflexiveGraph,
    pub dst: ReflexiveGraph,
    pub f1: Hom,
    pub f0: Hom,
}

impl GraphMorphism {
    fn shape_check(&self, wc: &WorkingCategory) -> Result<(), CatError> {
        self.src.shape_check(wc)?;
        self.dst.shape_check(wc)?;
        need(self.f1.src == self.src.c1 && self.f1.dst == self.dst.c1, "arrow map out of shape")?;
        need(self.f0.src == self.src.c0 && self.f0.dst == self.dst.c0, "object map out of shape")?;
        need_hom(wc, &self.f1, "f1")?;
        need_hom(wc, &self.f0, "f0")
    }

    fn audit(&self, wc: &WorkingCategory, a: &mut Audit) {
        for x in 0..wc.size(self.src.c1) as El {
            let xi = x as usize;
            let fx = self.f1.map[xi] as usize;
            if self.dst.d.map[fx] != self.f0.map[self.src.d.map[xi] as usize] {
                a.hit("d' f1 = f0 d", &[x]);
            }
            if self.dst.c.map[fx] != self.f0.map[self.src.c.map[xi] as usize] {
                a.hit("c' f1 = f0 c", &[x]);
            }
        }
        for b in 0..wc.size(self.src.c0) as El {
            let bi = b as usize;
            if self.dst.e.map[self.f0.map[bi] as usize] != self.f1.map[self.src.e.map[bi] as usize]
            {
                a.hit("e' f0 = f1 e", &[b]);
            }
        }
    }

    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.shape_check(wc)?;
        let mut a = Audit::new();
        self.audit(wc, &mut a);
        Ok(a.done())
    }
}

/// Graph morphism as a directed kite over the target span: outer maps f₁,
/// middle map e'f₀.
pub fn morphism_kite(
    _wc: &WorkingCategory,
    gm: &GraphMorphism,
) -> Result<DirectedKite, CatError> {
    let beta = Hom::compose(&gm.dst.e, &gm.f0);
    DirectedKite::new(
        gm.src.d.clone(),
        gm.src.e.clone(),
        gm.src.e.clone(),
        gm.src.c.clone(),
        gm.f1.clone(),
        beta,
        gm.f1.clone(),
        Span::new(gm.dst.d.clone(), gm.dst.c.clone())?,
    )
}

/// Morphism of multiplicative graphs: graph morphism plus the induced
/// multiplication square.
#[derive(Clone, Debug)]
pub struct MultGraphMorphism {
    pub src: MultGraph,
    pub dst: MultGraph,
    pub f1: Hom,
    pub f0: Hom,
}

impl MultGraphMorphism {
    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.src.shape_check(wc)?;
        self.dst.shape_check(wc)?;
        let gm = GraphMorphism {
            src: self.src.graph.clone(),
            dst: self.dst.graph.clone(),
            f1: self.f1.clone(),
            f0: self.f0.clone(),
        };
        gm.shape_check(wc)?;
        let mut a = Audit::new();
        gm.audit(wc, &mut a);
        for (k, &(u, w)) in self.src.pairs.pairs.iter().enumerate() {
            let el = self.src.pairs.emb[k] as usize;
            let image = self
                .dst
                .elem_of_pair(self.f1.map[u as usize], self.f1.map[w as usize])
                .map(|el2| self.dst.m.map[el2 as usize]);
            if image != Some(self.f1.map[self.src.m.map[el] as usize]) {
                a.hit("m' (f1 x f1) = f1 m", &[u, w]);
            }
        }
        Ok(a.done())
    }
}

/// Morphism of pregroupoids: span morphism plus the induced p square.
#[derive(Clone, Debug)]
pub struct PregroupoidMorphism {
    pub src: Pregroupoid,
    pub dst: Pregroupoid,
    pub f: Hom,
    pub f0: Hom,
    pub f1: Hom,
}

impl PregroupoidMorphism {
    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.src.shape_check(wc)?;
        self.dst.shape_check(wc)?;
        let sm = SpanMorphism {
            src: self.src.kp.span.clone(),
            dst: self.dst.kp.span.clone(),
            f: self.f.clone(),
            f0: self.f0.clone(),
            f1: self.f1.clone(),
        };
        sm.shape_check(wc)?;
        let mut a = Audit::new();
        sm.audit(wc, &mut a);
        for (k, t) in self.src.kp.triples.iter().enumerate() {
            let el = self.src.kp.emb[k] as usize;
            let image = self.dst.apply(
                self.f.map[t[0] as usize],
                self.f.map[t[1] as usize],
                self.f.map[t[2] as usize],
            );
            if image != Some(self.f.map[self.src.p.map[el] as usize]) {
                a.hit("p' (f x f x f) = f p", t);
            }
        }
        Ok(a.done())
    }
}

/// Morphism of multiplicative dikites: all wing squares plus the induced
/// multiplication square.
#[derive(Clone, Debug)]
pub struct KiteMorphism {
    pub src: Multiplication,
    pub dst: Multiplication,
    pub ha: Hom,
    pub hb: Hom,
    pub hc: Hom,
    pub hd: Hom,
    pub h0: Hom,
    pub h1: Hom,
}

impl KiteMorphism {
    pub fn validate(&self, wc: &WorkingCategory) -> Result<LawCheck, CatError> {
        self.src.shape_check(wc)?;
        self.dst.shape_check(wc)?;
        let (sk, dk) = (&self.src.kite, &self.dst.kite);
        need(self.ha.src == sk.a() && self.ha.dst == dk.a(), "hA out of shape")?;
        need(self.hb.src == sk.b() && self.hb.dst == dk.b(), "hB out of shape")?;
        need(self.hc.src == sk.c() && self.hc.dst == dk.c(), "hC out of shape")?;
        need(
            self.hd.src == sk.span.apex && self.hd.dst == dk.span.apex,
            "hD out of shape",
        )?;
        need(
            self.h0.src == sk.span.d.dst && self.h0.dst == dk.span.d.dst,
            "h0 out of shape",
        )?;
        need(
            self.h1.src == sk.span.c.dst && self.h1.dst == dk.span.c.dst,
            "h1 out of shape",
        )?;
        for (h, what) in [
            (&self.ha, "hA"),
            (&self.hb, "hB"),
            (&self.hc, "hC"),
            (&self.hd, "hD"),
            (&self.h0, "h0"),
            (&self.h1, "h1"),
        ] {
            need_hom(wc, h, what)?;
        }
        let mut a = Audit::new();
        for x in 0..wc.size(sk.a()) as El {
            let xi = x as usize;
            if dk.f.map[self.ha.map[xi] as usize] != self.hb.map[sk.f.map[xi] as usize] {
                a.hit("f' hA = hB f", &[x]);
            }
            if dk.alpha.map[self.ha.map[xi] as usize] != self.hd.map[sk.alpha.map[xi] as usize] {
                a.hit("alpha' hA = hD alpha", &[x]);
            }
        }
        for b in 0..wc.size(sk.b()) as El {
            let bi = b as usize;
            if dk.r.map[self.hb.map[bi] as usize] != self.ha.map[sk.r.map[bi] as usize] {
                a.hit("r' hB = hA r", &[b]);
            }
            if dk.s.map[self.hb.map[bi] as usize] != self.hc.map[sk.s.map[bi] as usize] {
                a.hit("s' hB = hC s", &[b]);
            }
            if dk.beta.map[self.hb.map[bi] as usize] != self.hd.map[sk.beta.map[bi] as usize] {
                a.hit("beta' hB = hD beta", &[b]);
            }
        }
        for y in 0..wc.size(sk.c()) as El {
            let yi = y as usize;
            if dk.g.map[self.hc.map[yi] as usize] != self.hb.map[sk.g.map[yi] as usize] {
                a.hit("g' hC = hB g", &[y]);
            }
            if dk.gamma.map[self.hc.map[yi] as usize] != self.hd.map[sk.gamma.map[yi] as usize] {
                a.hit("gamma' hC = hD gamma", &[y]);
            }
        }
        for v in 0..wc.size(sk.span.apex) as El {
            let vi = v as usize;
            let hv = self.hd.map[vi] as usize;
            if dk.span.d.map[hv] != self.h0.map[sk.span.d.map[vi] as usize] {
                a.hit("d' hD = h0 d", &[v]);
            }
            if dk.span.c.map[hv] != self.h1.map[sk.span.c.map[vi] as usize] {
                a.hit("c' hD = h1 c", &[v]);
            }
        }
        for (k, &(x, y)) in self.src.pb.pairs.iter().enumerate() {
            let el = self.src.pb.emb[k] as usize;
            let image = self
                .dst
                .pb
                .elem_of((self.ha.map[x as usize], self.hc.map[y as usize]))
                .map(|el2| self.dst.m.map[el2 as usize]);
            if image != Some(self.hd.map[self.src.m.map[el] as usize]) {
                a.hit("m' (hA x hC) = hD m", &[x, y]);
            }
        }
        Ok(a.done())
    }
}

/// The morphism kinds the checker accepts.
#[derive(Clone, Debug)]
pub enum Morphism {
    Span(SpanMorphism),
    Graph(GraphMorphism),
    MultGraph(MultGraphMorphism),
    Pregroupoid(PregroupoidMorphism),
    Kite(KiteMorphism),
}

pub fn morphism_check(wc: &WorkingCategory, m: &Morphism) -> Result<LawCheck, CatError> {
    match m {
        Morphism::Span(sm) => sm.validate(wc),
        Morphism::Graph(gm) => gm.validate(wc),
        Morphism::MultGraph(mm) => mm.validate(wc),
        Morphism::Pregroupoid(pm) => pm.validate(wc),
        Morphism::Kite(km) => km.validate(wc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebraic, FiniteAlgebra, Signature};
    use crate::category::limits::{box_construction, kp_construction};
    use crate::category::tests::{abelian_frozen, pair_elem};
    use crate::category::FrozenCategory;

    fn abelian() -> WorkingCategory {
        WorkingCategory::new(&abelian_frozen())
    }

    fn finset(sizes: &[usize]) -> WorkingCategory {
        let sig = Signature::empty();
        let bases = sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| FiniteAlgebra::new(format!("s{i}"), n, &sig, alloc::vec![]).unwrap())
            .collect();
        WorkingCategory::new(
            &FrozenCategory::new(sig, alloc::vec![], bases, None, true, 16).unwrap(),
        )
    }

    /// Pair groupoid on a foot object: arrows are pairs (a, b): a → b.
    fn pair_groupoid(wc: &mut WorkingCategory, foot: ObjId) -> InternalGroupoid {
        let (c1, d, c) = wc.product_pair(foot, foot).unwrap();
        let nf = wc.size(foot) as El;
        let e = Hom {
            src: foot,
            dst: c1,
            map: (0..nf).map(|b| pair_elem(&d, &c, b, b)).collect(),
        };
        let i = Hom {
            src: c1,
            dst: c1,
            map: (0..wc.size(c1) as El)
                .map(|u| pair_elem(&d, &c, c.map[u as usize], d.map[u as usize]))
                .collect(),
        };
        let graph = ReflexiveGraph::new(d.clone(), c.clone(), e).unwrap();
        let pairs = MultGraph::composable_pairs(wc, &graph).unwrap();
        let mut m = alloc::vec![0 as El; pairs.pairs.len()];
        for (k, &(u, w)) in pairs.pairs.iter().enumerate() {
            // u: b → c after w: a → b is the arrow a → c
            m[pairs.emb[k] as usize] =
                pair_elem(&d, &c, d.map[w as usize], c.map[u as usize]);
        }
        let m = Hom { src: pairs.obj, dst: c1, map: m };
        let mg = MultGraph::new(graph, pairs, m).unwrap();
        InternalGroupoid::new(mg, i).unwrap()
    }

    /// x - y + z on a span apex carrying a group structure.
    fn maltsev_p(wc: &WorkingCategory, kp: &KpConstruction) -> Hom {
        let view = wc.view(kp.span.apex);
        let mut pm = alloc::vec![0 as El; kp.triples.len()];
        for (k, t) in kp.triples.iter().enumerate() {
            let iy = view.apply(1, &[t[1]]);
            pm[kp.emb[k] as usize] = view.apply(0, &[view.apply(0, &[t[0], iy]), t[2]]);
        }
        Hom { src: kp.obj, dst: kp.span.apex, map: pm }
    }

    #[test]
    fn pair_groupoid_on_z2_is_valid() {
        let mut wc = abelian();
        let gpd = pair_groupoid(&mut wc, 1);
        assert!(gpd.mg.graph.validate(&wc).unwrap().is_valid());
        assert!(gpd.mg.validate(&wc).unwrap().is_valid());
        assert!(gpd.mg.validate_category(&wc).unwrap().is_valid());
        assert!(gpd.validate(&wc).unwrap().is_valid());
    }

    #[test]
    fn identity_inverse_breaks_groupoid() {
        let mut wc = abelian();
        let gpd = pair_groupoid(&mut wc, 1);
        let bad = InternalGroupoid::new(gpd.mg.clone(), wc.identity(gpd.mg.graph.c1)).unwrap();
        let check = bad.validate(&wc).unwrap();
        let first = check.first.clone().unwrap();
        assert_eq!(first.law, "m(1, i) = e c");
        let (d, c) = (&bad.mg.graph.d, &bad.mg.graph.c);
        assert_eq!(first.witness, alloc::vec![pair_elem(d, c, 0, 1)]);
        // replay: the witness arrow is not a loop, so (u, u) is not composable
        let u = first.witness[0] as usize;
        assert_ne!(d.map[u], c.map[u]);
        assert!(bad.mg.elem_of_pair(u as El, u as El).is_none());
        // every non-loop breaks both inverse laws
        assert_eq!(check.count, 4);
    }

    #[test]
    fn one_object_structures_are_trivially_valid() {
        let wc = abelian();
        let id0 = wc.identity(0);
        let graph = ReflexiveGraph::new(id0.clone(), id0.clone(), id0.clone()).unwrap();
        assert!(graph.validate(&wc).unwrap().is_valid());
        let mut wc = wc;
        let pairs = MultGraph::composable_pairs(&mut wc, &graph).unwrap();
        assert_eq!(pairs.pairs.len(), 1);
        let m = Hom { src: pairs.obj, dst: 0, map: alloc::vec![0] };
        let mg = MultGraph::new(graph, pairs, m).unwrap();
        let gpd = InternalGroupoid::new(mg, wc.identity(0)).unwrap();
        assert!(gpd.validate(&wc).unwrap().is_valid());
    }

    #[test]
    fn unital_laws_match_kite_multiplications() {
        let mut wc = abelian();
        let gpd = pair_groupoid(&mut wc, 1);
        let mg = &gpd.mg;
        let kite = kite_of_graph(&wc, &mg.graph).unwrap();
        assert!(kite.validate(&wc).unwrap().is_valid());
        // the kite pullback of (d, c) is exactly the composable-pair table
        let candidates = wc.homs(mg.pairs.obj, mg.graph.c1);
        assert_eq!(candidates.len(), 64);
        let mut good = Vec::new();
        for m in candidates.iter() {
            let as_mg =
                MultGraph::new(mg.graph.clone(), mg.pairs.clone(), m.clone()).unwrap();
            let as_mult =
                Multiplication::new(kite.clone(), mg.pairs.clone(), m.clone()).unwrap();
            let lhs = as_mg.validate(&wc).unwrap().is_valid();
            let rhs = as_mult.validate(&wc).unwrap().is_valid();
            assert_eq!(lhs, rhs);
            if lhs {
                good.push(m.clone());
            }
        }
        // dm = dπ₂ and cm = cπ₁ pin every value on a pair groupoid
        assert_eq!(good.len(), 1);
        assert_eq!(good[0], mg.m);
        let (assoc, inverse) = kites_of_multgraph(&wc, mg).unwrap();
        assert!(assoc.validate(&wc).unwrap().is_valid());
        assert!(inverse.validate(&wc).unwrap().is_valid());
    }

    #[test]
    fn reflexive_graphs_match_kites_exhaustively() {
        let mut wc = abelian();
        let legs = wc.homs(2, 1);
        let units = wc.homs(1, 2);
        assert_eq!((legs.len(), units.len()), (4, 4));
        let mut valid = 0;
        for d in legs.iter() {
            for c in legs.iter() {
                for e in units.iter() {
                    let g = ReflexiveGraph::new(d.clone(), c.clone(), e.clone()).unwrap();
                    let gv = g.validate(&wc).unwrap().is_valid();
                    let kv =
                        kite_of_graph(&wc, &g).unwrap().validate(&wc).unwrap().is_valid();
                    assert_eq!(gv, kv);
                    valid += gv as usize;
                }
            }
        }
        // three surjections to Z2; equal pairs meet in 2 units, distinct in 1
        assert_eq!(valid, 12);
    }

    #[test]
    fn span_kite_carries_the_maltsev_multiplication() {
        let mut wc = abelian();
        let (_, p1, p2) = wc.product_pair(1, 1).unwrap();
        let sp = Span::new(p1, p2).unwrap();
        let kite = kite_of_span(&mut wc, &sp).unwrap();
        assert!(kite.validate(&wc).unwrap().is_valid());
        assert_eq!(kite.span, sp);
        let kp = kp_construction(&mut wc, &sp).unwrap();
        let p = maltsev_p(&wc, &kp);
        let pre = Pregroupoid::new(kp, p).unwrap();
        assert!(pre.validate(&wc).unwrap().is_valid());
        assert!(pre.check_kock(&wc).unwrap().is_valid());
        assert!(pre.check_autonomous(&wc).unwrap().is_valid());
        // the same operation is a multiplication on the span's kite
        let pb = Multiplication::pullback(&mut wc, &kite).unwrap();
        let mut mm = alloc::vec![0 as El; pb.pairs.len()];
        for (k, &(kd, kc)) in pb.pairs.iter().enumerate() {
            let x = kite.alpha.map[kd as usize];
            let y = kite.f.map[kd as usize];
            let z = kite.gamma.map[kc as usize];
            mm[pb.emb[k] as usize] = pre.apply(x, y, z).unwrap();
        }
        let m = Hom { src: pb.obj, dst: sp.apex, map: mm };
        let mult = Multiplication::new(kite, pb, m).unwrap();
        assert!(mult.validate(&wc).unwrap().is_valid());
    }

    #[test]
    fn twisted_maltsev_operation_fails_associativity() {
        let mut wc = finset(&[1, 3]);
        let bang = Hom { src: 1, dst: 0, map: alloc::vec![0, 0, 0] };
        let sp = Span::new(bang.clone(), bang).unwrap();
        let kp = kp_construction(&mut wc, &sp).unwrap();
        assert_eq!(kp.triples.len(), 27);
        // Mal'tsev but non-associative: every otherwise-free entry is 0
        const TABLE: [El; 27] = [
            0, 1, 2, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 2, 0, 0, 1, 2, 0, 0, 0, 2, 0, 0, 1, 2,
        ];
        let mut pm = alloc::vec![0 as El; 27];
        for k in 0..27 {
            pm[kp.emb[k] as usize] = TABLE[k];
        }
        let obj = kp.obj;
        let pre = Pregroupoid::new(kp, Hom { src: obj, dst: 1, map: pm }).unwrap();
        assert!(pre.validate(&wc).unwrap().is_valid());
        let kock = pre.check_kock(&wc).unwrap();
        let first = kock.first.unwrap();
        assert_eq!(first.witness, alloc::vec![0, 1, 0, 0, 1]);
        // replay: p(0,1,p(0,0,1)) = p(0,1,1) = 0 but p(p(0,1,0),0,1) = p(0,0,1) = 1
        let at = |x, y, z| pre.apply(x, y, z).unwrap();
        assert_eq!(at(0, 1, at(0, 0, 1)), 0);
        assert_eq!(at(at(0, 1, 0), 0, 1), 1);
        // autonomy is gated on associativity
        assert!(matches!(pre.check_autonomous(&wc), Err(CatError::Shape(_))));
        // x - y + z mod 3 on the same span is associative and autonomous
        let kp2 = kp_construction(&mut wc, &pre.kp.span).unwrap();
        let mut pm2 = alloc::vec![0 as El; 27];
        for (k, t) in kp2.triples.iter().enumerate() {
            pm2[kp2.emb[k] as usize] = (t[0] + 3 - t[1] + t[2]) % 3;
        }
        let obj2 = kp2.obj;
        let pre2 = Pregroupoid::new(kp2, Hom { src: obj2, dst: 1, map: pm2 }).unwrap();
        assert!(pre2.validate(&wc).unwrap().is_valid());
        assert!(pre2.check_kock(&wc).unwrap().is_valid());
        assert!(pre2.check_autonomous(&wc).unwrap().is_valid());
    }

    #[test]
    fn pseudogroupoid_on_the_product_span() {
        let mut wc = abelian();
        let (apex, p1, p2) = wc.product_pair(1, 1).unwrap();
        let sp = Span::new(p1, p2).unwrap();
        let bx = box_construction(&mut wc, &sp).unwrap();
        assert_eq!(bx.quads.len(), 16);
        let view = wc.view(apex);
        let mut mm = alloc::vec![0 as El; bx.quads.len()];
        for (k, q) in bx.quads.iter().enumerate() {
            let iy = view.apply(1, &[q[1]]);
            mm[bx.emb[k] as usize] = view.apply(0, &[view.apply(0, &[q[0], iy]), q[2]]);
        }
        let obj = bx.obj;
        let ps = Pseudogroupoid::new(bx, Hom { src: obj, dst: apex, map: mm }).unwrap();
        assert!(ps.validate(&wc).unwrap().is_valid());
        // both projections pin the fourth corner here, so every five-tuple
        // is diagonal and the fourth projection is itself a pseudogroupoid
        assert!(ps.bx.fives.iter().all(|f| f[3] == f[4]));
        let alt = Pseudogroupoid::new(ps.bx.clone(), ps.bx.q4.clone()).unwrap();
        assert!(alt.validate(&wc).unwrap().is_valid());
        assert_eq!(alt.m.map, ps.m.map);
    }

    #[test]
    fn fourth_projection_fails_on_a_loose_span() {
        let mut wc = finset(&[1, 2]);
        let bang = Hom { src: 1, dst: 0, map: alloc::vec![0, 0] };
        let sp = Span::new(bang.clone(), bang).unwrap();
        let bx = box_construction(&mut wc, &sp).unwrap();
        assert_eq!((bx.quads.len(), bx.fives.len()), (16, 32));
        // x xor y xor z ignores the fourth corner and satisfies every law
        let mut mm = alloc::vec![0 as El; bx.quads.len()];
        for (k, q) in bx.quads.iter().enumerate() {
            mm[bx.emb[k] as usize] = q[0] ^ q[1] ^ q[2];
        }
        let obj = bx.obj;
        let good = Pseudogroupoid::new(bx, Hom { src: obj, dst: 1, map: mm }).unwrap();
        assert!(good.validate(&wc).unwrap().is_valid());
        // the fourth projection satisfies every law except independence
        let bad = Pseudogroupoid::new(good.bx.clone(), good.bx.q4.clone()).unwrap();
        let check = bad.validate(&wc).unwrap();
        let first = check.first.unwrap();
        assert_eq!(first.law, "m(x,y,z,w) = m(x,y,z,w')");
        assert_eq!(first.witness, alloc::vec![0, 0, 0, 0, 1]);
        // half of the fives have unequal fourth corners
        assert_eq!(check.count, 16);
    }

    #[test]
    fn graph_morphism_matches_its_kite() {
        let wc = finset(&[2]);
        let id = wc.identity(0);
        let discrete = ReflexiveGraph::new(id.clone(), id.clone(), id.clone()).unwrap();
        let good = GraphMorphism {
            src: discrete.clone(),
            dst: discrete.clone(),
            f1: id.clone(),
            f0: id.clone(),
        };
        assert!(morphism_check(&wc, &Morphism::Graph(good.clone())).unwrap().is_valid());
        assert!(morphism_kite(&wc, &good).unwrap().validate(&wc).unwrap().is_valid());
        let swap = Hom { src: 0, dst: 0, map: alloc::vec![1, 0] };
        let bad = GraphMorphism { src: discrete.clone(), dst: discrete, f1: swap, f0: id };
        let check = morphism_check(&wc, &Morphism::Graph(bad.clone())).unwrap();
        let first = check.first.unwrap();
        assert_eq!(first.law, "d' f1 = f0 d");
        assert_eq!(first.witness, alloc::vec![0]);
        // replay: d'(f1(0)) = 1 but f0(d(0)) = 0
        assert_ne!(
            bad.dst.d.map[bad.f1.map[0] as usize],
            bad.f0.map[bad.src.d.map[0] as usize]
        );
        assert!(!morphism_kite(&wc, &bad).unwrap().validate(&wc).unwrap().is_valid());
    }

    #[test]
    fn reduction_induces_a_groupoid_morphism() {
        let mut wc = abelian();
        let g4 = pair_groupoid(&mut wc, 3);
        let g2 = pair_groupoid(&mut wc, 1);
        let mod2 = Hom { src: 3, dst: 1, map: alloc::vec![0, 1, 0, 1] };
        let (d4, c4) = (&g4.mg.graph.d, &g4.mg.graph.c);
        let (d2, c2) = (&g2.mg.graph.d, &g2.mg.graph.c);
        let f1 = Hom {
            src: g4.mg.graph.c1,
            dst: g2.mg.graph.c1,
            map: (0..wc.size(g4.mg.graph.c1) as El)
                .map(|x| {
                    pair_elem(
                        d2,
                        c2,
                        mod2.map[d4.map[x as usize] as usize],
                        mod2.map[c4.map[x as usize] as usize],
                    )
                })
                .collect(),
        };
        let fm = MultGraphMorphism {
            src: g4.mg.clone(),
            dst: g2.mg.clone(),
            f1,
            f0: mod2,
        };
        assert!(morphism_check(&wc, &Morphism::MultGraph(fm)).unwrap().is_valid());
        let idm = MultGraphMorphism {
            src: g2.mg.clone(),
            dst: g2.mg.clone(),
            f1: wc.identity(g2.mg.graph.c1),
            f0: wc.identity(1),
        };
        assert!(morphism_check(&wc, &Morphism::MultGraph(idm)).unwrap().is_valid());
    }

    #[test]
    fn pregroupoid_morphism_squares() {
        let mut wc = abelian();
        let (_, p1, p2) = wc.product_pair(1, 1).unwrap();
        let sp = Span::new(p1, p2).unwrap();
        let kp = kp_construction(&mut wc, &sp).unwrap();
        let p = maltsev_p(&wc, &kp);
        let src = Pregroupoid::new(kp, p).unwrap();
        let id1 = wc.identity(1);
        let loops = Span::new(id1.clone(), id1).unwrap();
        let kp2 = kp_construction(&mut wc, &loops).unwrap();
        let p2h = maltsev_p(&wc, &kp2);
        let dst = Pregroupoid::new(kp2, p2h).unwrap();
        assert!(dst.validate(&wc).unwrap().is_valid());
        // both feet collapse, so the only apex map over them is constant
        let zero2 = Hom { src: 1, dst: 1, map: alloc::vec![0, 0] };
        let zero4 = Hom { src: sp.apex, dst: 1, map: alloc::vec![0; 4] };
        let good = PregroupoidMorphism {
            src: src.clone(),
            dst: dst.clone(),
            f: zero4,
            f0: zero2.clone(),
            f1: zero2.clone(),
        };
        assert!(morphism_check(&wc, &Morphism::Pregroupoid(good)).unwrap().is_valid());
        let bad = PregroupoidMorphism {
            src: src.clone(),
            dst,
            f: Hom { src: sp.apex, dst: 1, map: alloc::vec![0; 4] },
            f0: wc.identity(1),
            f1: zero2,
        };
        let check = morphism_check(&wc, &Morphism::Pregroupoid(bad.clone())).unwrap();
        let first = check.first.unwrap();
        assert_eq!(first.law, "d' f = f0 d");
        let w = first.witness[0] as usize;
        assert_ne!(
            bad.dst.kp.span.d.map[bad.f.map[w] as usize],
            bad.f0.map[bad.src.kp.span.d.map[w] as usize]
        );
    }
}
