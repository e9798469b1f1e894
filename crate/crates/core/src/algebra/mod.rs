//! Finite universal algebra over a fixed signature: terms, equations,
//! operation tables, homomorphism checks, products, subalgebra closure.

pub mod hom;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Carrier element. Carriers are dense: an algebra of size n has elements 0..n-1.
pub type El = u32;

/// Variable names admitted in terms, in index order.
pub const VAR_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    ReservedName(String),
    DuplicateOperation(String),
    UnknownOperation(String),
    ArityMismatch { op: String, expected: usize, got: usize },
    Parse { at: usize, msg: String },
    BadTable { op: String, msg: String },
    CarrierEmpty,
    /// First equation failure: equation index plus the variable assignment
    /// (6 slots in x,y,z,u,v,w order, unused slots 0).
    VarietyViolation { equation: usize, env: Vec<El> },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::ReservedName(n) => write!(f, "operation name `{n}` is a reserved variable"),
            AlgebraError::DuplicateOperation(n) => write!(f, "duplicate operation `{n}`"),
            AlgebraError::UnknownOperation(n) => write!(f, "unknown operation `{n}`"),
            AlgebraError::ArityMismatch { op, expected, got } => {
                write!(f, "operation `{op}` expects {expected} arguments, got {got}")
            }
            AlgebraError::Parse { at, msg } => write!(f, "parse error at byte {at}: {msg}"),
            AlgebraError::BadTable { op, msg } => write!(f, "bad table for `{op}`: {msg}"),
            AlgebraError::CarrierEmpty => write!(f, "carrier must be non-empty"),
            AlgebraError::VarietyViolation { equation, env } => {
                write!(f, "equation {equation} fails at assignment {env:?}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    ops: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: AsRef<str>>(ops: &[(S, usize)]) -> Result<Self, AlgebraError> {
        let ops: Vec<(String, usize)> =
            ops.iter().map(|(n, a)| (String::from(n.as_ref()), *a)).collect();
        for (i, (name, _)) in ops.iter().enumerate() {
            if VAR_NAMES.contains(&name.as_str()) {
                return Err(AlgebraError::ReservedName(name.clone()));
            }
            if ops[..i].iter().any(|(n, _)| n == name) {
                return Err(AlgebraError::DuplicateOperation(name.clone()));
            }
        }
        Ok(Signature { ops })
    }

    pub fn empty() -> Self {
        Signature { ops: Vec::new() }
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    pub fn name(&self, op: usize) -> &str {
        &self.ops[op].0
    }

    pub fn arity(&self, op: usize) -> usize {
        self.ops[op].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|(n, _)| n == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.ops.iter().map(|(n, a)| (n.as_str(), *a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(u8),
    App(usize, Vec<Term>),
}

impl Term {
    /// Parses prefix notation: `mul(x, inv(y))`, constants as `e` or `e()`.
    pub fn parse(sig: &Signature, text: &str) -> Result<Term, AlgebraError> {
        let mut p = Parser { sig, bytes: text.as_bytes(), pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(AlgebraError::Parse { at: p.pos, msg: String::from("trailing input") });
        }
        Ok(t)
    }

    /// Bitmask over variable indices used by the term.
    pub fn vars_mask(&self) -> u8 {
        match self {
            Term::Var(v) => 1 << v,
            Term::App(_, args) => args.iter().fold(0, |m, t| m | t.vars_mask()),
        }
    }
}

struct Parser<'a> {
    sig: &'a Signature,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<&'a str, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(AlgebraError::Parse { at: start, msg: String::from("expected identifier") });
        }
        Ok(core::str::from_utf8(&self.bytes[start..self.pos]).unwrap())
    }

    fn term(&mut self) -> Result<Term, AlgebraError> {
        let at = self.pos;
        let name = self.ident()?;
        if let Some(v) = VAR_NAMES.iter().position(|n| *n == name) {
            return Ok(Term::Var(v as u8));
        }
        let op = self
            .sig
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownOperation(String::from(name)))?;
        let mut args = Vec::new();
        self.skip_ws();
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'(' {
            self.pos += 1;
            self.skip_ws();
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b')' {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    self.skip_ws();
                    match self.bytes.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            return Err(AlgebraError::Parse {
                                at: self.pos,
                                msg: String::from("expected `,` or `)`"),
                            })
                        }
                    }
                }
            }
        }
        if args.len() != self.sig.arity(op) {
            return Err(AlgebraError::ArityMismatch {
                op: String::from(name),
                expected: self.sig.arity(op),
                got: args.len(),
            });
        }
        let _ = at;
        Ok(Term::App(op, args))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn parse(sig: &Signature, lhs: &str, rhs: &str) -> Result<Equation, AlgebraError> {
        Ok(Equation { lhs: Term::parse(sig, lhs)?, rhs: Term::parse(sig, rhs)? })
    }

    pub fn vars_mask(&self) -> u8 {
        self.lhs.vars_mask() | self.rhs.vars_mask()
    }
}

/// Flat row-major tables: result of op(a1..ak) sits at index ((a1*n)+a2)*n+...+ak.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    pub arities: Vec<usize>,
    pub tables: Vec<Vec<El>>,
}

/// Calls `f` on every k-tuple over 0..n in lex order; stops early if `f`
/// returns false. Returns false on early stop.
pub fn for_each_tuple(n: usize, k: usize, mut f: impl FnMut(&[El]) -> bool) -> bool {
    let mut args = alloc::vec![0 as El; k];
    if n == 0 {
        return true;
    }
    loop {
        if !f(&args) {
            return false;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            args[i] += 1;
            if (args[i] as usize) < n {
                break;
            }
            args[i] = 0;
        }
    }
}

pub fn flat_index(size: usize, args: &[El]) -> usize {
    args.iter().fold(0usize, |acc, &a| acc * size + a as usize)
}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        size: usize,
        sig: &Signature,
        tables: Vec<Vec<El>>,
    ) -> Result<FiniteAlgebra, AlgebraError> {
        let name = name.into();
        if size == 0 {
            return Err(AlgebraError::CarrierEmpty);
        }
        if tables.len() != sig.op_count() {
            return Err(AlgebraError::BadTable {
                op: String::from("<signature>"),
                msg: format!("expected {} tables, got {}", sig.op_count(), tables.len()),
            });
        }
        for (op, table) in tables.iter().enumerate() {
            let want = size
                .checked_pow(sig.arity(op) as u32)
                .ok_or_else(|| AlgebraError::BadTable {
                    op: String::from(sig.name(op)),
                    msg: String::from("table too large"),
                })?;
            if table.len() != want {
                return Err(AlgebraError::BadTable {
                    op: String::from(sig.name(op)),
                    msg: format!("expected {} entries, got {}", want, table.len()),
                });
            }
            if let Some(&bad) = table.iter().find(|&&v| v as usize >= size) {
                return Err(AlgebraError::BadTable {
                    op: String::from(sig.name(op)),
                    msg: format!("entry {bad} outside carrier 0..{size}"),
                });
            }
        }
        let arities = (0..sig.op_count()).map(|op| sig.arity(op)).collect();
        Ok(FiniteAlgebra { name, size, arities, tables })
    }

    pub fn apply(&self, op: usize, args: &[El]) -> El {
        self.tables[op][flat_index(self.size, args)]
    }

    /// First equation violation in (equation, lex assignment) order, if any.
    pub fn check_equations(&self, eqs: &[Equation]) -> Result<(), AlgebraError> {
        for (i, eq) in eqs.iter().enumerate() {
            let mask = eq.vars_mask();
            let vars: Vec<usize> = (0..6).filter(|v| mask >> v & 1 == 1).collect();
            let mut env = [0 as El; 6];
            let total = self.size.checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
            for code in 0..total {
                let mut rest = code;
                for &v in vars.iter().rev() {
                    env[v] = (rest % self.size) as El;
                    rest /= self.size;
                }
                let l = eval_term(self, &eq.lhs, &env)?;
                let r = eval_term(self, &eq.rhs, &env)?;
                if l != r {
                    return Err(AlgebraError::VarietyViolation { equation: i, env: env.to_vec() });
                }
            }
        }
        Ok(())
    }
}

pub fn eval_term(alg: &FiniteAlgebra, term: &Term, env: &[El; 6]) -> Result<El, AlgebraError> {
    match term {
        Term::Var(v) => Ok(env[*v as usize]),
        Term::App(op, args) => {
            if *op >= alg.tables.len() {
                return Err(AlgebraError::UnknownOperation(format!("#{op}")));
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_term(alg, a, env)?);
            }
            Ok(alg.apply(*op, &vals))
        }
    }
}

/// Uniform element-indexed view of an algebra; implemented by base algebras
/// and by tuple-carrier subalgebras of products.
pub trait Algebraic {
    fn size(&self) -> usize;
    fn op_count(&self) -> usize;
    fn op_arity(&self, op: usize) -> usize;
    /// Result element index. Carriers are closed, so this is total.
    fn apply(&self, op: usize, args: &[El]) -> El;
}

impl Algebraic for FiniteAlgebra {
    fn size(&self) -> usize {
        self.size
    }
    fn op_count(&self) -> usize {
        self.tables.len()
    }
    fn op_arity(&self, op: usize) -> usize {
        self.arities[op]
    }
    fn apply(&self, op: usize, args: &[El]) -> El {
        self.tables[op][flat_index(self.size, args)]
    }
}

pub fn is_homomorphism<A: Algebraic + ?Sized, B: Algebraic + ?Sized>(
    map: &[El],
    src: &A,
    dst: &B,
) -> bool {
    if map.len() != src.size() || map.iter().any(|&v| (v as usize) >= dst.size()) {
        return false;
    }
    let mut mapped = Vec::new();
    for op in 0..src.op_count() {
        let k = src.op_arity(op);
        let ok = for_each_tuple(src.size(), k, |args| {
            let s = src.apply(op, args);
            mapped.clear();
            mapped.extend(args.iter().map(|&a| map[a as usize]));
            map[s as usize] == dst.apply(op, &mapped)
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Product algebra with pair (i,j) encoded as i*|b|+j, plus the two projections.
pub fn product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> (FiniteAlgebra, Vec<El>, Vec<El>) {
    let n = a.size * b.size;
    let mut tables = Vec::with_capacity(a.tables.len());
    for op in 0..a.tables.len() {
        let k = a.op_arity(op);
        let mut table = Vec::with_capacity(n.pow(k as u32));
        for_each_tuple(n, k, |args| {
            let left: Vec<El> = args.iter().map(|&p| p / b.size as El).collect();
            let right: Vec<El> = args.iter().map(|&p| p % b.size as El).collect();
            table.push(a.apply(op, &left) * b.size as El + b.apply(op, &right));
            true
        });
        tables.push(table);
    }
    let name = format!("{}x{}", a.name, b.name);
    let alg = FiniteAlgebra { name, size: n, arities: a.arities.clone(), tables };
    let p1: Vec<El> = (0..n).map(|p| (p / b.size) as El).collect();
    let p2: Vec<El> = (0..n).map(|p| (p % b.size) as El).collect();
    (alg, p1, p2)
}

/// Least subset containing `seed`, closed under all operations (constants included).
/// Result is sorted ascending.
pub fn subalgebra_closure<A: Algebraic + ?Sized>(alg: &A, seed: &[El], work: &mut u64) -> Vec<El> {
    let n = alg.size();
    let mut member = alloc::vec![false; n];
    let mut list: Vec<El> = Vec::new();
    for op in 0..alg.op_count() {
        if alg.op_arity(op) == 0 {
            let c = alg.apply(op, &[]);
            if !member[c as usize] {
                member[c as usize] = true;
                list.push(c);
            }
        }
    }
    for &s in seed {
        if !member[s as usize] {
            member[s as usize] = true;
            list.push(s);
        }
    }
    let mut qi = 0;
    while qi < list.len() {
        for op in 0..alg.op_count() {
            let k = alg.op_arity(op);
            if k == 0 {
                continue;
            }
            // tuples over list[0..=qi] containing index qi at least once
            let m = qi + 1;
            let mut idx = alloc::vec![0usize; k];
            loop {
                if idx.iter().any(|&i| i == qi) {
                    let args: Vec<El> = idx.iter().map(|&i| list[i]).collect();
                    *work += 1;
                    let r = alg.apply(op, &args);
                    if !member[r as usize] {
                        member[r as usize] = true;
                        list.push(r);
                    }
                }
                let mut i = k;
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < m {
                        done = false;
                        break;
                    }
                    idx[i] = 0;
                }
                if done {
                    break;
                }
            }
        }
        qi += 1;
    }
    list.sort_unstable();
    list
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn group_sig() -> Signature {
        Signature::new(&[("mul", 2), ("inv", 1), ("e", 0)]).unwrap()
    }

    pub fn group_eqs(sig: &Signature) -> Vec<Equation> {
        [
            ("mul(mul(x,y),z)", "mul(x,mul(y,z))"),
            ("mul(e,x)", "x"),
            ("mul(x,e)", "x"),
            ("mul(inv(x),x)", "e"),
            ("mul(x,inv(x))", "e"),
        ]
        .iter()
        .map(|(l, r)| Equation::parse(sig, l, r).unwrap())
        .collect()
    }

    pub fn z(n: usize) -> FiniteAlgebra {
        let sig = group_sig();
        let mut mul = Vec::new();
        for a in 0..n {
            for b in 0..n {
                mul.push(((a + b) % n) as El);
            }
        }
        let inv: Vec<El> = (0..n).map(|a| ((n - a) % n) as El).collect();
        FiniteAlgebra::new(format!("Z{n}"), n, &sig, alloc::vec![mul, inv, alloc::vec![0]])
            .unwrap()
    }

    #[test]
    fn eval_examples() {
        let sig = group_sig();
        let z2 = z(2);
        let t = Term::parse(&sig, "mul(x,x)").unwrap();
        assert_eq!(eval_term(&z2, &t, &[1, 0, 0, 0, 0, 0]).unwrap(), 0);
        let v = Term::parse(&sig, "x").unwrap();
        for k in 0..2 {
            assert_eq!(eval_term(&z2, &v, &[k, 0, 0, 0, 0, 0]).unwrap(), k);
        }
        let z3 = z(3);
        let ti = Term::parse(&sig, "inv(x)").unwrap();
        assert_eq!(eval_term(&z3, &ti, &[2, 0, 0, 0, 0, 0]).unwrap(), 1);
    }

    #[test]
    fn parse_errors() {
        let sig = group_sig();
        assert!(matches!(
            Term::parse(&sig, "mul(x)"),
            Err(AlgebraError::ArityMismatch { .. })
        ));
        assert!(matches!(
            Term::parse(&sig, "foo(x,y)"),
            Err(AlgebraError::UnknownOperation(_))
        ));
        assert!(matches!(Term::parse(&sig, "mul(x,y) z"), Err(AlgebraError::Parse { .. })));
        assert!(Term::parse(&sig, "e").is_ok());
        assert!(Term::parse(&sig, "e()").is_ok());
    }

    #[test]
    fn homomorphism_examples() {
        let z2 = z(2);
        assert!(is_homomorphism(&[0, 1], &z2, &z2));
        assert!(is_homomorphism(&[0, 0], &z2, &z2));
        // swap violates the constant e=0
        assert!(!is_homomorphism(&[1, 0], &z2, &z2));
    }

    #[test]
    fn variety_validation() {
        let sig = group_sig();
        let eqs = group_eqs(&sig);
        for n in 1..=4 {
            assert!(z(n).check_equations(&eqs).is_ok());
        }
        // boolean OR is a monoid but has no inverses: first failure is the
        // left-inverse law at x=1
        let bad = FiniteAlgebra::new(
            String::from("bad"),
            2,
            &sig,
            alloc::vec![alloc::vec![0, 1, 1, 1], alloc::vec![0, 1], alloc::vec![0]],
        )
        .unwrap();
        let err = bad.check_equations(&eqs).unwrap_err();
        match err {
            AlgebraError::VarietyViolation { equation, env } => {
                assert_eq!(equation, 3);
                assert_eq!(env[0], 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn product_examples() {
        let z2 = z(2);
        let z3 = z(3);
        let (p, p1, p2) = product(&z2, &z3);
        assert_eq!(p.size, 6);
        // mul((1,2),(1,2)) = (0,1)
        let a = 1 * 3 + 2;
        let r = p.apply(0, &[a as El, a as El]);
        assert_eq!(p1[r as usize], 0);
        assert_eq!(p2[r as usize], 1);
        // A × 1 isomorphic to A via π₁
        let z1 = z(1);
        let (q, q1, _) = product(&z3, &z1);
        assert_eq!(q.size, 3);
        assert_eq!(q1, alloc::vec![0, 1, 2]);
    }

    #[test]
    fn closure_examples() {
        let mut work = 0u64;
        let z4 = z(4);
        assert_eq!(subalgebra_closure(&z4, &[2], &mut work), alloc::vec![0, 2]);
        assert_eq!(
            subalgebra_closure(&z4, &[0, 1, 2, 3], &mut work),
            alloc::vec![0, 1, 2, 3]
        );
        // diagonal of Z2×Z2 is closed
        let z2 = z(2);
        let (p, _, _) = product(&z2, &z2);
        assert_eq!(subalgebra_closure(&p, &[0, 3], &mut work), alloc::vec![0, 3]);
        // closure is idempotent and monotone on Z4 seeds
        for seed in [&[][..], &[1][..], &[2][..], &[2, 3][..]] {
            let c = subalgebra_closure(&z4, seed, &mut work);
            assert_eq!(subalgebra_closure(&z4, &c, &mut work), c);
        }
    }
}
