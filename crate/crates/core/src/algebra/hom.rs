//! Backtracking map search with forward propagation through operation
//! tables. Elements are branched in ascending index order and target values
//! tried ascending, so solutions come out lexicographically sorted; partial
//! assignments are closed under all operations before any further branching.

use super::{Algebraic, El};
use alloc::vec::Vec;

const UNSET: El = El::MAX;

/// Per-source-element sets of allowed target values, as bitsets.
#[derive(Clone, Debug)]
pub struct Candidates {
    words: usize,
    dst_size: usize,
    bits: Vec<u64>,
}

impl Candidates {
    pub fn full(src_size: usize, dst_size: usize) -> Candidates {
        let words = (dst_size + 63) / 64;
        let mut bits = alloc::vec![0u64; src_size * words.max(1)];
        for e in 0..src_size {
            for v in 0..dst_size {
                bits[e * words + v / 64] |= 1u64 << (v % 64);
            }
        }
        Candidates { words: words.max(1), dst_size, bits }
    }

    pub fn none(src_size: usize, dst_size: usize) -> Candidates {
        let words = ((dst_size + 63) / 64).max(1);
        Candidates { words, dst_size, bits: alloc::vec![0u64; src_size * words] }
    }

    pub fn allow(&mut self, e: usize, v: El) {
        self.bits[e * self.words + v as usize / 64] |= 1u64 << (v as usize % 64);
    }

    pub fn has(&self, e: usize, v: El) -> bool {
        self.bits[e * self.words + v as usize / 64] >> (v as usize % 64) & 1 == 1
    }

    pub fn retain(&mut self, e: usize, keep: impl Fn(El) -> bool) {
        for v in 0..self.dst_size {
            if self.has(e, v as El) && !keep(v as El) {
                self.bits[e * self.words + v / 64] &= !(1u64 << (v % 64));
            }
        }
    }

    pub fn count(&self, e: usize) -> u32 {
        self.bits[e * self.words..(e + 1) * self.words]
            .iter()
            .map(|w| w.count_ones())
            .sum()
    }

    pub fn vals(&self, e: usize) -> Vec<El> {
        let mut out = Vec::new();
        for w in 0..self.words {
            let mut word = self.bits[e * self.words + w];
            while word != 0 {
                let b = word.trailing_zeros();
                out.push((w * 64) as El + b as El);
                word &= word - 1;
            }
        }
        out
    }

    /// Index of the first element with an empty candidate set, if any.
    pub fn first_empty(&self, src_size: usize) -> Option<usize> {
        (0..src_size).find(|&e| self.count(e) == 0)
    }
}

pub struct SearchSpec<'a> {
    /// Seed assignments (element, value) applied before the search.
    pub forced: &'a [(El, El)],
    /// Stop after this many solutions; 0 = collect all.
    pub limit: usize,
    /// Abort after this many elementary steps; 0 = no cap.
    pub max_work: u64,
}

impl SearchSpec<'_> {
    pub const UNBOUNDED: SearchSpec<'static> = SearchSpec { forced: &[], limit: 0, max_work: 0 };
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Complete(Vec<Vec<El>>),
    /// Budget ran out; the list holds the solutions found so far.
    Capped(Vec<Vec<El>>),
}

impl SearchOutcome {
    pub fn maps(&self) -> &[Vec<El>] {
        match self {
            SearchOutcome::Complete(v) | SearchOutcome::Capped(v) => v,
        }
    }
    pub fn capped(&self) -> bool {
        matches!(self, SearchOutcome::Capped(_))
    }
    pub fn into_maps(self) -> Vec<Vec<El>> {
        match self {
            SearchOutcome::Complete(v) | SearchOutcome::Capped(v) => v,
        }
    }
}

#[derive(Clone)]
struct State {
    assign: Vec<El>,
    order: Vec<El>,
}

struct Ctx<'a, A: ?Sized, B: ?Sized> {
    src: &'a A,
    dst: &'a B,
    cands: &'a Candidates,
    limit: usize,
    budget: u64,
    spent: u64,
    capped: bool,
    out: Vec<Vec<El>>,
}

impl<'a, A: Algebraic + ?Sized, B: Algebraic + ?Sized> Ctx<'a, A, B> {
    fn done(&self) -> bool {
        self.capped || (self.limit != 0 && self.out.len() >= self.limit)
    }

    fn set(&mut self, st: &mut State, e: El, v: El) -> bool {
        let cur = st.assign[e as usize];
        if cur != UNSET {
            return cur == v;
        }
        if !self.cands.has(e as usize, v) {
            return false;
        }
        st.assign[e as usize] = v;
        st.order.push(e);
        true
    }

    /// Closes `st` under all operations, checking the homomorphism law on
    /// every tuple of assigned elements exactly once.
    fn propagate(&mut self, st: &mut State, mut qi: usize) -> bool {
        let mut args: Vec<El> = Vec::new();
        let mut vals: Vec<El> = Vec::new();
        while qi < st.order.len() {
            for op in 0..self.src.op_count() {
                let k = self.src.op_arity(op);
                if k == 0 {
                    continue;
                }
                let m = qi + 1;
                let mut idx = alloc::vec![0usize; k];
                'tuples: loop {
                    if idx.iter().any(|&i| i == qi) {
                        self.spent += 1;
                        if self.spent > self.budget {
                            self.capped = true;
                            return false;
                        }
                        args.clear();
                        vals.clear();
                        for &i in idx.iter() {
                            let a = st.order[i];
                            args.push(a);
                            vals.push(st.assign[a as usize]);
                        }
                        let r = self.src.apply(op, &args);
                        let v = self.dst.apply(op, &vals);
                        if !self.set(st, r, v) {
                            return false;
                        }
                    }
                    let mut i = k;
                    loop {
                        if i == 0 {
                            break 'tuples;
                        }
                        i -= 1;
                        idx[i] += 1;
                        if idx[i] < m {
                            break;
                        }
                        idx[i] = 0;
                    }
                }
            }
            qi += 1;
        }
        true
    }

    fn dfs(&mut self, st: State) {
        if self.done() {
            return;
        }
        let next = st.assign.iter().position(|&v| v == UNSET);
        let e = match next {
            None => {
                self.out.push(st.assign);
                return;
            }
            Some(e) => e,
        };
        for v in self.cands.vals(e) {
            if self.done() {
                return;
            }
            // charge the branch itself: operation-free signatures never
            // enter the tuple loop, and an uncharged branch walk would
            // make every budget meaningless exactly where the search
            // space is largest
            self.spent += 1;
            if self.spent > self.budget {
                self.capped = true;
                return;
            }
            let mut child = st.clone();
            let from = child.order.len();
            if self.set(&mut child, e as El, v) && self.propagate(&mut child, from) {
                self.dfs(child);
            }
            if self.capped {
                return;
            }
        }
    }
}

pub fn search_maps<A: Algebraic + ?Sized, B: Algebraic + ?Sized>(
    src: &A,
    dst: &B,
    cands: &Candidates,
    spec: &SearchSpec,
    work: &mut u64,
) -> SearchOutcome {
    let mut ctx = Ctx {
        src,
        dst,
        cands,
        limit: spec.limit,
        budget: if spec.max_work == 0 { u64::MAX } else { spec.max_work },
        spent: 0,
        capped: false,
        out: Vec::new(),
    };
    let mut st = State { assign: alloc::vec![UNSET; src.size()], order: Vec::new() };
    let mut ok = true;
    for op in 0..src.op_count() {
        if src.op_arity(op) == 0 {
            let e = src.apply(op, &[]);
            let v = dst.apply(op, &[]);
            if !ctx.set(&mut st, e, v) {
                ok = false;
                break;
            }
        }
    }
    if ok {
        for &(e, v) in spec.forced {
            if !ctx.set(&mut st, e, v) {
                ok = false;
                break;
            }
        }
    }
    if ok && ctx.propagate(&mut st, 0) {
        ctx.dfs(st);
    }
    *work += ctx.spent + 1;
    if ctx.capped {
        SearchOutcome::Capped(ctx.out)
    } else {
        SearchOutcome::Complete(ctx.out)
    }
}

/// All homomorphisms src → dst, lexicographically sorted by map.
pub fn enumerate_maps<A: Algebraic + ?Sized, B: Algebraic + ?Sized>(
    src: &A,
    dst: &B,
    work: &mut u64,
) -> Vec<Vec<El>> {
    let cands = Candidates::full(src.size(), dst.size());
    search_maps(src, dst, &cands, &SearchSpec::UNBOUNDED, work).into_maps()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::z;
    use crate::algebra::{for_each_tuple, is_homomorphism, product, FiniteAlgebra};
    use alloc::string::String;
    use alloc::vec::Vec;

    fn brute_force(src: &FiniteAlgebra, dst: &FiniteAlgebra) -> Vec<Vec<El>> {
        let mut out = Vec::new();
        for_each_tuple(dst.size, src.size, |map| {
            if is_homomorphism(map, src, dst) {
                out.push(map.to_vec());
            }
            true
        });
        out
    }

    #[test]
    fn hom_counts_match_brute_force() {
        let z1 = z(1);
        let z2 = z(2);
        let z3 = z(3);
        let z4 = z(4);
        let (v4, _, _) = product(&z2, &z2);
        let mut work = 0u64;
        let algs = [&z1, &z2, &z3, &z4, &v4];
        for a in algs {
            for b in algs {
                let fast = enumerate_maps(a, b, &mut work);
                let slow = brute_force(a, b);
                assert_eq!(fast, slow, "hom({},{})", a.name, b.name);
            }
        }
        assert_eq!(enumerate_maps(&z2, &z2, &mut work).len(), 2);
        assert_eq!(enumerate_maps(&z2, &z3, &mut work).len(), 1);
        assert_eq!(enumerate_maps(&z4, &z4, &mut work).len(), 4);
        assert_eq!(enumerate_maps(&v4, &v4, &mut work).len(), 16);
        assert_eq!(enumerate_maps(&z4, &v4, &mut work).len(), 4);
        assert_eq!(enumerate_maps(&v4, &z4, &mut work).len(), 4);
    }

    #[test]
    fn hom_order_is_lex() {
        let z2 = z(2);
        let mut work = 0u64;
        assert_eq!(
            enumerate_maps(&z2, &z2, &mut work),
            alloc::vec![alloc::vec![0, 0], alloc::vec![0, 1]]
        );
        // empty signature: all maps, lex order
        let sig = crate::algebra::Signature::empty();
        let two =
            FiniteAlgebra::new(String::from("two"), 2, &sig, alloc::vec![]).unwrap();
        let maps = enumerate_maps(&two, &two, &mut work);
        assert_eq!(
            maps,
            alloc::vec![
                alloc::vec![0, 0],
                alloc::vec![0, 1],
                alloc::vec![1, 0],
                alloc::vec![1, 1]
            ]
        );
    }

    #[test]
    fn forced_and_limited() {
        let z4 = z(4);
        let mut work = 0u64;
        // forcing 1 ↦ 1 pins the identity
        let cands = Candidates::full(4, 4);
        let spec = SearchSpec { forced: &[(1, 1)], limit: 0, max_work: 0 };
        let maps = search_maps(&z4, &z4, &cands, &spec, &mut work).into_maps();
        assert_eq!(maps, alloc::vec![alloc::vec![0, 1, 2, 3]]);
        // limit 1 returns the lex-first hom
        let spec = SearchSpec { forced: &[], limit: 1, max_work: 0 };
        let maps = search_maps(&z4, &z4, &cands, &spec, &mut work).into_maps();
        assert_eq!(maps, alloc::vec![alloc::vec![0, 0, 0, 0]]);
    }

    #[test]
    fn restricted_candidates() {
        let z4 = z(4);
        let mut work = 0u64;
        let mut cands = Candidates::full(4, 4);
        // forbid the zero map by requiring 1 ↦ odd
        cands.retain(1, |v| v % 2 == 1);
        let spec = SearchSpec { forced: &[], limit: 0, max_work: 0 };
        let maps = search_maps(&z4, &z4, &cands, &spec, &mut work).into_maps();
        assert_eq!(
            maps,
            alloc::vec![alloc::vec![0, 1, 2, 3], alloc::vec![0, 3, 2, 1]]
        );
        assert_eq!(cands.count(1), 2);
        assert_eq!(cands.vals(1), alloc::vec![1, 3]);
    }

    #[test]
    fn capped_search_reports_capped() {
        let (v4, _, _) = product(&z(2), &z(2));
        let mut work = 0u64;
        let cands = Candidates::full(4, 4);
        let spec = SearchSpec { forced: &[], limit: 0, max_work: 3 };
        let out = search_maps(&v4, &v4, &cands, &spec, &mut work);
        assert!(out.capped());
    }

    #[test]
    fn composition_closure() {
        // enumerate_maps(A,B) ∘ enumerate_maps(B,C) lands in enumerate_maps(A,C)
        let z2 = z(2);
        let z4 = z(4);
        let (v4, _, _) = product(&z2, &z2);
        let mut work = 0u64;
        let ab = enumerate_maps(&z4, &v4, &mut work);
        let bc = enumerate_maps(&v4, &z2, &mut work);
        let ac = enumerate_maps(&z4, &z2, &mut work);
        for f in &bc {
            for g in &ab {
                let comp: Vec<El> = (0..4).map(|x| f[g[x] as usize]).collect();
                assert!(ac.contains(&comp));
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn magma(size: usize) -> impl Strategy<Value = FiniteAlgebra> {
            proptest::collection::vec(0..size as El, size * size).prop_map(move |mul| {
                let sig = crate::algebra::Signature::new(&[("op", 2)]).unwrap();
                FiniteAlgebra::new(String::from("m"), size, &sig, alloc::vec![mul]).unwrap()
            })
        }

        proptest! {
            #[test]
            fn search_matches_brute_force(a in magma(3), b in magma(3)) {
                let mut work = 0u64;
                prop_assert_eq!(enumerate_maps(&a, &b, &mut work), brute_force(&a, &b));
            }

            #[test]
            fn closure_idempotent_monotone(a in magma(4), seed in proptest::collection::vec(0..4u32, 0..4)) {
                let mut work = 0u64;
                let c = crate::algebra::subalgebra_closure(&a, &seed, &mut work);
                let c2 = crate::algebra::subalgebra_closure(&a, &c, &mut work);
                prop_assert_eq!(&c2, &c);
                let bigger: Vec<El> = seed.iter().copied().chain([0]).collect();
                let d = crate::algebra::subalgebra_closure(&a, &bigger, &mut work);
                prop_assert!(c.iter().all(|e| d.contains(e)));
            }
        }
    }
}
