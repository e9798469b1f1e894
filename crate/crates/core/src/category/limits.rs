//! Finite limit constructions: kernel pairs, pullbacks, equalizers, and the
//! kernel-pair composites used by the structure conditions. Constructed
//! carriers are comprehension subsets of products, adjoined through the
//! working category so they canonicalize and dedup.

use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::El;

use super::{CatError, Hom, ObjId, Span, WorkingCategory};

/// Kernel pair of f: all (a, a') with f(a) = f(a'), as an object with its
/// two projections. `pairs` keeps the raw comprehension in sorted order;
/// `emb[k]` is the object element carrying `pairs[k]`.
#[derive(Clone, Debug)]
pub struct KernelPair {
    pub obj: ObjId,
    pub pairs: Vec<(El, El)>,
    pub emb: Rc<Vec<El>>,
    pub p1: Hom,
    pub p2: Hom,
}

impl KernelPair {
    pub fn index_of(&self, pair: (El, El)) -> Option<usize> {
        self.pairs.binary_search(&pair).ok()
    }

    pub fn elem_of(&self, pair: (El, El)) -> Option<El> {
        self.index_of(pair).map(|k| self.emb[k])
    }
}

fn adjoin_pair_set(
    wc: &mut WorkingCategory,
    x: ObjId,
    y: ObjId,
    pairs: &[(El, El)],
    what: &str,
) -> Result<(ObjId, Rc<Vec<El>>), CatError> {
    let mut factors = wc.factors(x);
    factors.extend(wc.factors(y));
    let elems: Vec<Vec<El>> = pairs
        .iter()
        .map(|&(a, b)| {
            let mut t = wc.coords(x, a);
            t.extend(wc.coords(y, b));
            t
        })
        .collect();
    wc.adjoin_tuples(factors, elems, what)
}

/// Pairs are sorted, and element coordinates are monotone in the element
/// index, so the adjoined tuple list is sorted too.
pub fn kernel_pair(wc: &mut WorkingCategory, f: &Hom) -> Result<KernelPair, CatError> {
    let n = wc.size(f.src);
    let mut pairs = Vec::new();
    for a in 0..n as El {
        for b in 0..n as El {
            if f.map[a as usize] == f.map[b as usize] {
                pairs.push((a, b));
            }
        }
    }
    let (obj, emb) = adjoin_pair_set(wc, f.src, f.src, &pairs, "kernel pair")?;
    let mut m1 = alloc::vec![0 as El; pairs.len()];
    let mut m2 = alloc::vec![0 as El; pairs.len()];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        m1[emb[k] as usize] = a;
        m2[emb[k] as usize] = b;
    }
    Ok(KernelPair {
        obj,
        pairs,
        emb,
        p1: Hom { src: obj, dst: f.src, map: m1 },
        p2: Hom { src: obj, dst: f.src, map: m2 },
    })
}

/// Raw pullback comprehension of a cospan f: A → B ← C : g, no adjunction.
pub fn pullback_pairs(wc: &WorkingCategory, f: &Hom, g: &Hom) -> Vec<(El, El)> {
    debug_assert_eq!(f.dst, g.dst);
    let na = wc.size(f.src);
    let nc = wc.size(g.src);
    let mut pairs = Vec::new();
    for a in 0..na as El {
        for c in 0..nc as El {
            if f.map[a as usize] == g.map[c as usize] {
                pairs.push((a, c));
            }
        }
    }
    pairs
}

#[derive(Clone, Debug)]
pub struct Pullback {
    pub obj: ObjId,
    pub pairs: Vec<(El, El)>,
    pub emb: Rc<Vec<El>>,
    pub p1: Hom,
    pub p2: Hom,
    /// Sections of f and g found during the split check.
    pub sec_f: Hom,
    pub sec_g: Hom,
}

impl Pullback {
    pub fn index_of(&self, pair: (El, El)) -> Option<usize> {
        self.pairs.binary_search(&pair).ok()
    }

    pub fn elem_of(&self, pair: (El, El)) -> Option<El> {
        self.index_of(pair).map(|k| self.emb[k])
    }
}

/// Pullback of a split epi along a split epi. Errors with NotSplitEpi when
/// either leg admits no section.
pub fn pullback_split(wc: &mut WorkingCategory, f: &Hom, g: &Hom) -> Result<Pullback, CatError> {
    if f.dst != g.dst {
        return Err(CatError::Shape(String::from("pullback needs a cospan")));
    }
    let sec_f = wc
        .section_of(f)
        .ok_or(CatError::NotSplitEpi { src: f.src, dst: f.dst })?;
    let sec_g = wc
        .section_of(g)
        .ok_or(CatError::NotSplitEpi { src: g.src, dst: g.dst })?;
    let pairs = pullback_pairs(wc, f, g);
    let (obj, emb) = adjoin_pair_set(wc, f.src, g.src, &pairs, "pullback")?;
    let mut m1 = alloc::vec![0 as El; pairs.len()];
    let mut m2 = alloc::vec![0 as El; pairs.len()];
    for (k, &(a, c)) in pairs.iter().enumerate() {
        m1[emb[k] as usize] = a;
        m2[emb[k] as usize] = c;
    }
    Ok(Pullback {
        obj,
        pairs,
        emb,
        p1: Hom { src: obj, dst: f.src, map: m1 },
        p2: Hom { src: obj, dst: g.src, map: m2 },
        sec_f,
        sec_g,
    })
}

#[derive(Clone, Debug)]
pub struct Equalizer {
    pub obj: ObjId,
    pub elems: Vec<El>,
    pub emb: Rc<Vec<El>>,
    pub incl: Hom,
}

/// Equalizer of a parallel pair; an empty comprehension is reported as a
/// missing object since empty carriers are not representable.
pub fn equalizer(wc: &mut WorkingCategory, u: &Hom, v: &Hom) -> Result<Equalizer, CatError> {
    if u.src != v.src || u.dst != v.dst {
        return Err(CatError::Shape(String::from("equalizer needs a parallel pair")));
    }
    let elems: Vec<El> = (0..wc.size(u.src) as El)
        .filter(|&x| u.map[x as usize] == v.map[x as usize])
        .collect();
    let factors = wc.factors(u.src);
    let tuples: Vec<Vec<El>> = elems.iter().map(|&x| wc.coords(u.src, x)).collect();
    let (obj, emb) = wc.adjoin_tuples(factors, tuples, "equalizer")?;
    let mut incl = alloc::vec![0 as El; elems.len()];
    for (k, &x) in elems.iter().enumerate() {
        incl[emb[k] as usize] = x;
    }
    Ok(Equalizer { obj, elems, emb, incl: Hom { src: obj, dst: u.src, map: incl } })
}

/// The composite D(d,c) of a span (D, d, c): triples (x, y, z) with
/// d(x) = d(y) and c(y) = c(z), together with the kernel pairs D(d), D(c)
/// it projects to and the canonical structure maps.
#[derive(Clone, Debug)]
pub struct KpConstruction {
    pub span: Span,
    pub kp_d: KernelPair,
    pub kp_c: KernelPair,
    pub obj: ObjId,
    pub triples: Vec<[El; 3]>,
    pub emb: Rc<Vec<El>>,
    /// D(d,c) → D picking x, y, z.
    pub dom: Hom,
    pub mid: Hom,
    pub cod: Hom,
    /// D → D(d,c), w ↦ (w,w,w).
    pub delta: Hom,
    /// D(d,c) → D(d), (x,y,z) ↦ (x,y); D(d,c) → D(c), (x,y,z) ↦ (y,z).
    pub p1: Hom,
    pub p2: Hom,
    /// D(d) → D(d,c), (x,y) ↦ (x,y,y); D(c) → D(d,c), (y,z) ↦ (y,y,z).
    pub e1: Hom,
    pub e2: Hom,
}

impl KpConstruction {
    pub fn index_of(&self, t: [El; 3]) -> Option<usize> {
        self.triples.binary_search(&t).ok()
    }

    pub fn elem_of(&self, t: [El; 3]) -> Option<El> {
        self.index_of(t).map(|k| self.emb[k])
    }
}

pub fn kp_construction(wc: &mut WorkingCategory, span: &Span) -> Result<KpConstruction, CatError> {
    let kp_d = kernel_pair(wc, &span.d)?;
    let kp_c = kernel_pair(wc, &span.c)?;
    let n = wc.size(span.apex) as El;
    let mut triples = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if span.d.map[x as usize] != span.d.map[y as usize] {
                continue;
            }
            for z in 0..n {
                if span.c.map[y as usize] == span.c.map[z as usize] {
                    triples.push([x, y, z]);
                }
            }
        }
    }
    let df = wc.factors(span.apex);
    let mut factors = df.clone();
    factors.extend(df.iter().copied());
    factors.extend(df.iter().copied());
    let elems: Vec<Vec<El>> = triples
        .iter()
        .map(|t| {
            let mut v = wc.coords(span.apex, t[0]);
            v.extend(wc.coords(span.apex, t[1]));
            v.extend(wc.coords(span.apex, t[2]));
            v
        })
        .collect();
    let (obj, emb) = wc.adjoin_tuples(factors, elems, "kernel-pair composite")?;
    let sz = triples.len();
    let mut dom = alloc::vec![0 as El; sz];
    let mut mid = alloc::vec![0 as El; sz];
    let mut cod = alloc::vec![0 as El; sz];
    let mut p1 = alloc::vec![0 as El; sz];
    let mut p2 = alloc::vec![0 as El; sz];
    for (k, t) in triples.iter().enumerate() {
        let e = emb[k] as usize;
        dom[e] = t[0];
        mid[e] = t[1];
        cod[e] = t[2];
        p1[e] = kp_d.elem_of((t[0], t[1])).expect("dom/mid lands in D(d)");
        p2[e] = kp_c.elem_of((t[1], t[2])).expect("mid/cod lands in D(c)");
    }
    let lookup = |t: [El; 3]| -> El {
        let k = triples.binary_search(&t).expect("triple in D(d,c)");
        emb[k]
    };
    let delta_map: Vec<El> = (0..n).map(|w| lookup([w, w, w])).collect();
    let e1_map: Vec<El> = kp_d.pairs.iter().map(|&(x, y)| lookup([x, y, y])).collect();
    let e1_map = reindex(&kp_d.emb, &e1_map);
    let e2_map: Vec<El> = kp_c.pairs.iter().map(|&(y, z)| lookup([y, y, z])).collect();
    let e2_map = reindex(&kp_c.emb, &e2_map);
    Ok(KpConstruction {
        span: span.clone(),
        obj,
        triples,
        emb,
        dom: Hom { src: obj, dst: span.apex, map: dom },
        mid: Hom { src: obj, dst: span.apex, map: mid },
        cod: Hom { src: obj, dst: span.apex, map: cod },
        delta: Hom { src: span.apex, dst: obj, map: delta_map },
        p1: Hom { src: obj, dst: kp_d.obj, map: p1 },
        p2: Hom { src: obj, dst: kp_c.obj, map: p2 },
        e1: Hom { src: kp_d.obj, dst: obj, map: e1_map },
        e2: Hom { src: kp_c.obj, dst: obj, map: e2_map },
        kp_d,
        kp_c,
    })
}

/// Turns a map indexed by raw comprehension position into one indexed by the
/// canonical object's elements.
fn reindex(emb: &[El], by_pos: &[El]) -> Vec<El> {
    let mut out = alloc::vec![0 as El; by_pos.len()];
    for (k, &v) in by_pos.iter().enumerate() {
        out[emb[k] as usize] = v;
    }
    out
}

/// The box D(□) of a span: quadruples (x, y, z, w) with d(x) = d(y),
/// c(y) = c(z), d(z) = d(w), c(w) = c(x); and D(⊡), the kernel pair of
/// ⟨q₁,q₂,q₃⟩, carried by 5-tuples (x, y, z, w, w').
#[derive(Clone, Debug)]
pub struct BoxConstruction {
    pub span: Span,
    pub obj: ObjId,
    pub quads: Vec<[El; 4]>,
    pub emb: Rc<Vec<El>>,
    pub q1: Hom,
    pub q2: Hom,
    pub q3: Hom,
    pub q4: Hom,
    pub dobj: ObjId,
    pub fives: Vec<[El; 5]>,
    pub demb: Rc<Vec<El>>,
    /// D(⊡) → D(□) keeping w resp. w'.
    pub r1: Hom,
    pub r2: Hom,
}

impl BoxConstruction {
    pub fn quad_elem(&self, q: [El; 4]) -> Option<El> {
        self.quads.binary_search(&q).ok().map(|k| self.emb[k])
    }
}

pub fn box_construction(wc: &mut WorkingCategory, span: &Span) -> Result<BoxConstruction, CatError> {
    let n = wc.size(span.apex) as El;
    let d = &span.d.map;
    let c = &span.c.map;
    let mut quads = Vec::new();
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
                        quads.push([x, y, z, w]);
                    }
                }
            }
        }
    }
    let df = wc.factors(span.apex);
    let mut factors = Vec::new();
    for _ in 0..4 {
        factors.extend(df.iter().copied());
    }
    let elems: Vec<Vec<El>> = quads
        .iter()
        .map(|q| {
            let mut v = Vec::new();
            for &e in q.iter() {
                v.extend(wc.coords(span.apex, e));
            }
            v
        })
        .collect();
    let (obj, emb) = wc.adjoin_tuples(factors.clone(), elems, "box")?;
    let sz = quads.len();
    let mut qm = [
        alloc::vec![0 as El; sz],
        alloc::vec![0 as El; sz],
        alloc::vec![0 as El; sz],
        alloc::vec![0 as El; sz],
    ];
    for (k, q) in quads.iter().enumerate() {
        for i in 0..4 {
            qm[i][emb[k] as usize] = q[i];
        }
    }
    // kernel pair of ⟨q₁,q₂,q₃⟩ as 5-tuples
    let mut fives = Vec::new();
    for a in &quads {
        for b in &quads {
            if a[0] == b[0] && a[1] == b[1] && a[2] == b[2] {
                fives.push([a[0], a[1], a[2], a[3], b[3]]);
            }
        }
    }
    fives.sort_unstable();
    let mut dfactors = Vec::new();
    for _ in 0..5 {
        dfactors.extend(df.iter().copied());
    }
    let delems: Vec<Vec<El>> = fives
        .iter()
        .map(|q| {
            let mut v = Vec::new();
            for &e in q.iter() {
                v.extend(wc.coords(span.apex, e));
            }
            v
        })
        .collect();
    let (dobj, demb) = wc.adjoin_tuples(dfactors, delems, "box kernel pair")?;
    let quad_elem = |q: [El; 4]| -> El {
        let k = quads.binary_search(&q).expect("quad in box");
        emb[k]
    };
    let r1_pos: Vec<El> =
        fives.iter().map(|f| quad_elem([f[0], f[1], f[2], f[3]])).collect();
    let r2_pos: Vec<El> =
        fives.iter().map(|f| quad_elem([f[0], f[1], f[2], f[4]])).collect();
    let r1 = reindex(&demb, &r1_pos);
    let r2 = reindex(&demb, &r2_pos);
    let [m1, m2, m3, m4] = qm;
    Ok(BoxConstruction {
        span: span.clone(),
        obj,
        quads,
        emb,
        q1: Hom { src: obj, dst: span.apex, map: m1 },
        q2: Hom { src: obj, dst: span.apex, map: m2 },
        q3: Hom { src: obj, dst: span.apex, map: m3 },
        q4: Hom { src: obj, dst: span.apex, map: m4 },
        dobj,
        fives,
        demb,
        r1: Hom { src: dobj, dst: obj, map: r1 },
        r2: Hom { src: dobj, dst: obj, map: r2 },
    })
}

/// All subuniverses of an object, by breadth-first closure growth: the
/// closure of the constants, each singleton closure, and every extension of
/// a known subuniverse by one outside element. Returns carriers as sorted
/// element lists in (size, lex) order. The cap bounds how many closed sets
/// are produced; the flag reports whether it was hit.
pub fn subuniverses(
    wc: &mut WorkingCategory,
    o: ObjId,
    cap: usize,
) -> (Vec<Vec<El>>, bool) {
    let view = wc.view(o);
    let n = wc.size(o);
    let mut seen: alloc::collections::BTreeSet<Vec<El>> = alloc::collections::BTreeSet::new();
    let mut queue: Vec<Vec<El>> = Vec::new();
    let mut capped = false;
    let push = |s: Vec<El>,
                    seen: &mut alloc::collections::BTreeSet<Vec<El>>,
                    queue: &mut Vec<Vec<El>>,
                    capped: &mut bool| {
        if seen.len() >= cap {
            *capped = true;
            return;
        }
        if !s.is_empty() && seen.insert(s.clone()) {
            queue.push(s);
        }
    };
    let base = crate::algebra::subalgebra_closure(&view, &[], &mut wc.work);
    push(base, &mut seen, &mut queue, &mut capped);
    for x in 0..n as El {
        let s = crate::algebra::subalgebra_closure(&view, &[x], &mut wc.work);
        push(s, &mut seen, &mut queue, &mut capped);
    }
    let mut qi = 0;
    while qi < queue.len() {
        let cur = queue[qi].clone();
        qi += 1;
        for x in 0..n as El {
            if cur.binary_search(&x).is_ok() {
                continue;
            }
            let mut seed = cur.clone();
            seed.push(x);
            let s = crate::algebra::subalgebra_closure(&view, &seed, &mut wc.work);
            push(s, &mut seen, &mut queue, &mut capped);
        }
    }
    let mut out: Vec<Vec<El>> = seen.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    (out, capped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::tests::abelian_frozen;
    use crate::category::WorkingCategory;

    fn setup() -> WorkingCategory {
        WorkingCategory::new(&abelian_frozen())
    }

    #[test]
    fn kernel_pair_matches_comprehension() {
        let mut wc = setup();
        // mod-2 quotient map out of Z4
        let f = Hom { src: 3, dst: 1, map: alloc::vec![0, 1, 0, 1] };
        assert!(wc.check_hom(&f));
        let kp = kernel_pair(&mut wc, &f).unwrap();
        let expect: Vec<(El, El)> = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .filter(|&(a, b)| a % 2 == b % 2)
            .collect();
        assert_eq!(kp.pairs, expect);
        assert_eq!(wc.size(kp.obj), 8);
        assert!(wc.check_hom(&kp.p1) && wc.check_hom(&kp.p2));
        for (k, &(a, b)) in kp.pairs.iter().enumerate() {
            let e = kp.emb[k] as usize;
            assert_eq!((kp.p1.map[e], kp.p2.map[e]), (a, b));
        }
    }

    #[test]
    fn kernel_pair_of_iso_is_diagonal() {
        let mut wc = setup();
        let id = wc.identity(2);
        let kp = kernel_pair(&mut wc, &id).unwrap();
        assert_eq!(kp.pairs.len(), 4);
        assert!(kp.pairs.iter().all(|&(a, b)| a == b));
        // canonicalized onto the Klein-four base itself
        assert_eq!(kp.obj, 2);
        assert_eq!(kp.p1, kp.p2);
        assert!(kp.p1.is_bijective(4));
    }

    #[test]
    fn pullback_requires_sections() {
        let mut wc = setup();
        // Z4 → Z2 mod 2 is epi but not split in groups
        let f = Hom { src: 3, dst: 1, map: alloc::vec![0, 1, 0, 1] };
        let err = pullback_split(&mut wc, &f, &f).unwrap_err();
        assert!(matches!(err, CatError::NotSplitEpi { .. }));
    }

    #[test]
    fn pullback_of_projection_along_itself() {
        let mut wc = setup();
        let (p, p1, _) = wc.product_pair(1, 1).unwrap();
        assert_eq!(p, 2);
        let pb = pullback_split(&mut wc, &p1, &p1).unwrap();
        assert_eq!(pb.pairs.len(), 8);
        for &(a, c) in &pb.pairs {
            assert_eq!(p1.map[a as usize], p1.map[c as usize]);
        }
        assert!(Hom::compose(&p1, &pb.sec_f).is_identity());
        assert!(wc.check_hom(&pb.p1) && wc.check_hom(&pb.p2));
    }

    #[test]
    fn equalizer_examples() {
        let sig = crate::algebra::tests::group_sig();
        let eqs = crate::algebra::tests::group_eqs(&sig);
        let z1 = crate::algebra::tests::z(1);
        let z3 = crate::algebra::tests::z(3);
        let fc = crate::category::FrozenCategory::new(
            sig,
            eqs,
            alloc::vec![z1, z3],
            None,
            true,
            16,
        )
        .unwrap();
        let mut wc = WorkingCategory::new(&fc);
        let id = wc.identity(1);
        let neg = Hom { src: 1, dst: 1, map: alloc::vec![0, 2, 1] };
        assert!(wc.check_hom(&neg));
        let eq = equalizer(&mut wc, &id, &neg).unwrap();
        assert_eq!(eq.elems, alloc::vec![0]);
        // one-element carrier canonicalizes to the trivial group
        assert_eq!(eq.obj, 0);
        assert_eq!(eq.incl.map, alloc::vec![0]);
        // equal maps: equalizer is the whole source
        let eq2 = equalizer(&mut wc, &id, &id).unwrap();
        assert_eq!(eq2.elems.len(), 3);
        assert!(eq2.incl.is_bijective(3));
    }

    #[test]
    fn empty_equalizer_is_missing_object() {
        use crate::algebra::{FiniteAlgebra, Signature};
        let sig = Signature::empty();
        let two = FiniteAlgebra::new("two", 2, &sig, alloc::vec![]).unwrap();
        let fc =
            crate::category::FrozenCategory::new(sig, alloc::vec![], alloc::vec![two], None, true, 16)
                .unwrap();
        let mut wc = WorkingCategory::new(&fc);
        let id = wc.identity(0);
        let swap = Hom { src: 0, dst: 0, map: alloc::vec![1, 0] };
        let err = equalizer(&mut wc, &id, &swap).unwrap_err();
        assert!(matches!(err, CatError::MissingObject(_)));
    }

    #[test]
    fn kp_construction_identity_span() {
        let mut wc = setup();
        let id = wc.identity(2);
        let span = Span::new(id.clone(), id).unwrap();
        let kc = kp_construction(&mut wc, &span).unwrap();
        assert_eq!(kc.triples.len(), 4);
        assert!(kc.triples.iter().all(|t| t[0] == t[1] && t[1] == t[2]));
        assert!(Hom::compose(&kc.dom, &kc.delta).is_identity());
        assert!(Hom::compose(&kc.mid, &kc.delta).is_identity());
        assert!(Hom::compose(&kc.cod, &kc.delta).is_identity());
    }

    #[test]
    fn kp_construction_on_product_projections() {
        let mut wc = setup();
        let (_, p1, p2) = wc.product_pair(1, 1).unwrap();
        let span = Span::new(p1, p2).unwrap();
        let kc = kp_construction(&mut wc, &span).unwrap();
        assert_eq!(kc.kp_d.pairs.len(), 8);
        assert_eq!(kc.kp_c.pairs.len(), 8);
        assert_eq!(kc.triples.len(), 16);
        // structure maps satisfy their defining identities
        for (k, t) in kc.triples.iter().enumerate() {
            let e = kc.emb[k] as usize;
            assert_eq!(kc.dom.map[e], t[0]);
            assert_eq!(kc.mid.map[e], t[1]);
            assert_eq!(kc.cod.map[e], t[2]);
        }
        assert!(wc.check_hom(&kc.p1) && wc.check_hom(&kc.p2));
        assert!(wc.check_hom(&kc.e1) && wc.check_hom(&kc.e2));
        // e₁ then the projections: p₁e₁ = 1, dom e₁ = p₁ of the kernel pair
        assert!(Hom::compose(&kc.p1, &kc.e1).is_identity());
        assert!(Hom::compose(&kc.p2, &kc.e2).is_identity());
        assert_eq!(Hom::compose(&kc.dom, &kc.e1), kc.kp_d.p1);
        assert_eq!(Hom::compose(&kc.cod, &kc.e2), kc.kp_c.p2);
    }

    #[test]
    fn box_counts_on_product_projections() {
        let mut wc = setup();
        let (_, p1, p2) = wc.product_pair(1, 1).unwrap();
        let span = Span::new(p1, p2).unwrap();
        let bx = box_construction(&mut wc, &span).unwrap();
        assert_eq!(bx.quads.len(), 16);
        // the fourth corner is forced here, so the box kernel pair collapses
        assert_eq!(bx.fives.len(), 16);
        assert_eq!(bx.r1, bx.r2);
        for (k, q) in bx.quads.iter().enumerate() {
            let e = bx.emb[k] as usize;
            assert_eq!(bx.q1.map[e], q[0]);
            assert_eq!(bx.q4.map[e], q[3]);
        }
        let terminal_span = {
            let to1 = Hom { src: 1, dst: 0, map: alloc::vec![0, 0] };
            Span::new(to1.clone(), to1).unwrap()
        };
        let bx2 = box_construction(&mut wc, &terminal_span).unwrap();
        assert_eq!(bx2.quads.len(), 16);
        assert_eq!(bx2.fives.len(), 32);
    }

    #[test]
    fn subuniverse_enumeration() {
        let mut wc = setup();
        // subgroups of Z4: {0}, {0,2}, Z4
        let (subs, capped) = subuniverses(&mut wc, 3, 1000);
        assert!(!capped);
        assert_eq!(
            subs,
            alloc::vec![alloc::vec![0], alloc::vec![0, 2], alloc::vec![0, 1, 2, 3]]
        );
        // subgroups of the Klein four group: trivial, three of order 2, full
        let (subs, _) = subuniverses(&mut wc, 2, 1000);
        assert_eq!(subs.len(), 5);
        assert_eq!(subs[0], alloc::vec![0]);
        assert_eq!(subs[4].len(), 4);
        let cap_hit = subuniverses(&mut wc, 3, 2);
        assert!(cap_hit.1);
        assert_eq!(cap_hit.0.len(), 2);
    }
}
