//! Positive Boolean formulas over a fixed atom universe, kept in canonical
//! antichain CNF and interned.
//!
//! A formula is a set of clauses (conjunction), each clause a set of atoms
//! (disjunction). Canonical form: clauses are sorted atom vectors, no clause
//! contains another, clauses sorted by (length, lex). Two formulas are
//! logically equivalent iff their canonical forms are identical, so semantic
//! equality is [`FormulaId`] equality.
//!
//! `true` is the empty clause set; `false` is the single empty clause. Both
//! are first-class: `false` arises as the empty disjunction.

use std::collections::HashMap;
use std::fmt::Write as _;

/// Interned formula handle, valid for the store that created it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaId(u32);

impl FormulaId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

type Clause = Box<[u32]>;

/// Assignment of truth values to atoms, as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AtomSet {
    bits: Vec<u64>,
}

impl AtomSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        let mut s = Self::new();
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, atom: u32) {
        let word = atom as usize / 64;
        if word >= self.bits.len() {
            self.bits.resize(word + 1, 0);
        }
        self.bits[word] |= 1 << (atom % 64);
    }

    pub fn contains(&self, atom: u32) -> bool {
        let word = atom as usize / 64;
        word < self.bits.len() && self.bits[word] & (1 << (atom % 64)) != 0
    }
}

pub struct FormulaStore {
    atom_names: Vec<String>,
    formulas: Vec<Box<[Clause]>>,
    by_key: HashMap<Box<[Clause]>, FormulaId>,
}

impl FormulaStore {
    /// A store over a fixed universe of named atoms. Index 0 is `true`,
    /// index 1 is `false`.
    pub fn new(atom_names: Vec<String>) -> Self {
        let mut s = FormulaStore {
            atom_names,
            formulas: Vec::new(),
            by_key: HashMap::new(),
        };
        let t = s.intern(Box::new([]));
        let f = s.intern(Box::new([Box::new([]) as Clause]));
        debug_assert_eq!(t, FormulaId(0));
        debug_assert_eq!(f, FormulaId(1));
        s
    }

    pub fn atom_count(&self) -> usize {
        self.atom_names.len()
    }

    pub fn atom_name(&self, atom: u32) -> &str {
        &self.atom_names[atom as usize]
    }

    fn intern(&mut self, clauses: Box<[Clause]>) -> FormulaId {
        if let Some(&id) = self.by_key.get(&clauses) {
            return id;
        }
        let id = FormulaId(self.formulas.len() as u32);
        self.formulas.push(clauses.clone());
        self.by_key.insert(clauses, id);
        id
    }

    pub fn tru(&self) -> FormulaId {
        FormulaId(0)
    }

    pub fn fals(&self) -> FormulaId {
        FormulaId(1)
    }

    pub fn atom(&mut self, atom: u32) -> FormulaId {
        assert!((atom as usize) < self.atom_names.len(), "atom out of universe");
        self.intern(Box::new([Box::new([atom]) as Clause]))
    }

    pub fn clauses(&self, id: FormulaId) -> &[Clause] {
        &self.formulas[id.index()]
    }

    /// Minimal-clause canonical form: dedupe atoms, drop clauses containing
    /// another clause, order clauses by (length, lex).
    fn canonicalize(mut clauses: Vec<Vec<u32>>) -> Box<[Clause]> {
        for c in &mut clauses {
            c.sort_unstable();
            c.dedup();
        }
        clauses.sort_unstable_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
        clauses.dedup();
        let mut kept: Vec<Vec<u32>> = Vec::with_capacity(clauses.len());
        'outer: for c in clauses {
            // kept clauses are no longer than c; subset check suffices
            for k in &kept {
                if is_subset(k, &c) {
                    continue 'outer;
                }
            }
            kept.push(c);
        }
        kept.into_iter().map(Vec::into_boxed_slice).collect()
    }

    pub fn conj(&mut self, f: FormulaId, g: FormulaId) -> FormulaId {
        if f == self.tru() || g == self.fals() {
            return g;
        }
        if g == self.tru() || f == self.fals() {
            return f;
        }
        let mut clauses: Vec<Vec<u32>> = Vec::new();
        clauses.extend(self.clauses(f).iter().map(|c| c.to_vec()));
        clauses.extend(self.clauses(g).iter().map(|c| c.to_vec()));
        let canon = Self::canonicalize(clauses);
        self.intern(canon)
    }

    pub fn disj(&mut self, f: FormulaId, g: FormulaId) -> FormulaId {
        if f == self.tru() || g == self.fals() {
            return f;
        }
        if g == self.tru() || f == self.fals() {
            return g;
        }
        let mut clauses = Vec::with_capacity(self.clauses(f).len() * self.clauses(g).len());
        for cf in self.clauses(f) {
            for cg in self.clauses(g) {
                let mut c = Vec::with_capacity(cf.len() + cg.len());
                c.extend_from_slice(cf);
                c.extend_from_slice(cg);
                clauses.push(c);
            }
        }
        let canon = Self::canonicalize(clauses);
        self.intern(canon)
    }

    pub fn conj_all<I: IntoIterator<Item = FormulaId>>(&mut self, items: I) -> FormulaId {
        let mut acc = self.tru();
        for f in items {
            acc = self.conj(acc, f);
        }
        acc
    }

    pub fn disj_all<I: IntoIterator<Item = FormulaId>>(&mut self, items: I) -> FormulaId {
        let mut acc = self.fals();
        for f in items {
            acc = self.disj(acc, f);
        }
        acc
    }

    /// Logical implication `f => g`. On canonical monotone CNF this is clause
    /// subsumption: every clause of `g` contains some clause of `f`.
    pub fn implies(&self, f: FormulaId, g: FormulaId) -> bool {
        let fc = self.clauses(f);
        self.clauses(g)
            .iter()
            .all(|d| fc.iter().any(|c| is_subset(c, d)))
    }

    /// Evaluate under the assignment that makes exactly `assign` true.
    pub fn satisfied_by(&self, f: FormulaId, assign: &AtomSet) -> bool {
        self.clauses(f)
            .iter()
            .all(|c| c.iter().any(|&a| assign.contains(a)))
    }

    /// Homomorphic atom replacement within this store: conjunction over
    /// clauses of the disjunction of the mapped atoms.
    pub fn map_atoms(&mut self, f: FormulaId, map: &dyn Fn(u32) -> FormulaId) -> FormulaId {
        let clauses: Vec<Vec<u32>> = self.clauses(f).iter().map(|c| c.to_vec()).collect();
        let mut acc = self.tru();
        for c in clauses {
            let mut d = self.fals();
            for a in c {
                let m = map(a);
                d = self.disj(d, m);
            }
            acc = self.conj(acc, d);
        }
        acc
    }

    /// Like [`Self::map_atoms`], but the images live in `target`.
    pub fn map_atoms_into(
        &self,
        f: FormulaId,
        target: &mut FormulaStore,
        map: &dyn Fn(u32) -> FormulaId,
    ) -> FormulaId {
        let mut acc = target.tru();
        for c in self.clauses(f).iter() {
            let mut d = target.fals();
            for &a in c.iter() {
                let m = map(a);
                d = target.disj(d, m);
            }
            acc = target.conj(acc, d);
        }
        acc
    }

    pub fn render(&self, f: FormulaId) -> String {
        let cs = self.clauses(f);
        if cs.is_empty() {
            return "true".to_string();
        }
        if cs.len() == 1 && cs[0].is_empty() {
            return "false".to_string();
        }
        let mut out = String::new();
        for (i, c) in cs.iter().enumerate() {
            if i > 0 {
                out.push_str(" & ");
            }
            let parens = cs.len() > 1 && c.len() > 1;
            if parens {
                out.push('(');
            }
            for (j, &a) in c.iter().enumerate() {
                if j > 0 {
                    out.push_str(" | ");
                }
                let _ = write!(out, "{}", self.atom_names[a as usize]);
            }
            if parens {
                out.push(')');
            }
        }
        out
    }
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    // both sorted ascending
    let mut bi = 0;
    'outer: for &s in small {
        while bi < big.len() {
            match big[bi].cmp(&s) {
                std::cmp::Ordering::Less => bi += 1,
                std::cmp::Ordering::Equal => {
                    bi += 1;
                    continue 'outer;
                }
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> FormulaStore {
        FormulaStore::new(vec!["q0".into(), "qf".into(), "q2".into(), "q3".into()])
    }

    #[test]
    fn constants_and_units() {
        let mut s = store();
        let a = s.atom(0);
        let t = s.tru();
        let f = s.fals();
        assert_eq!(s.conj(a, t), a);
        assert_eq!(s.conj(t, a), a);
        assert_eq!(s.conj(a, f), f);
        assert_eq!(s.disj(a, f), a);
        assert_eq!(s.disj(f, a), a);
        assert_eq!(s.disj(a, t), t);
        assert_eq!(s.conj_all([]), t);
        assert_eq!(s.disj_all([]), f);
    }

    #[test]
    fn absorption_via_antichain_reduction() {
        let mut s = store();
        let a = s.atom(0);
        let b = s.atom(1);
        let a_or_b = s.disj(a, b);
        let a_and_b = s.conj(a, b);
        assert_eq!(s.conj(a, a_or_b), a);
        assert_eq!(s.disj(a, a_and_b), a);
    }

    #[test]
    fn idempotence_commutativity() {
        let mut s = store();
        let a = s.atom(0);
        let b = s.atom(1);
        assert_eq!(s.conj(a, a), a);
        assert_eq!(s.disj(a, a), a);
        assert_eq!(s.conj(a, b), s.conj(b, a));
        assert_eq!(s.disj(a, b), s.disj(b, a));
    }

    #[test]
    fn distributivity_is_canonical() {
        let mut s = store();
        let (a, b, c) = (s.atom(0), s.atom(1), s.atom(2));
        let ab = s.conj(a, b);
        let lhs = s.disj(ab, c);
        let ac = s.disj(a, c);
        let bc = s.disj(b, c);
        let rhs = s.conj(ac, bc);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn implies_is_a_partial_order_sample() {
        let mut s = store();
        let (a, b) = (s.atom(0), s.atom(1));
        let ab = s.conj(a, b);
        let aob = s.disj(a, b);
        let f = s.fals();
        let t = s.tru();
        assert!(s.implies(f, ab));
        assert!(s.implies(ab, a));
        assert!(s.implies(a, aob));
        assert!(s.implies(aob, t));
        assert!(!s.implies(a, b));
        assert!(!s.implies(aob, a));
        assert!(!s.implies(t, a));
        assert!(s.implies(a, a));
    }

    #[test]
    fn satisfaction() {
        let mut s = store();
        let (a, b) = (s.atom(0), s.atom(1));
        let ab = s.conj(a, b);
        let aob = s.disj(a, b);
        let only_a = AtomSet::from_indices([0u32]);
        let both = AtomSet::from_indices([0u32, 1]);
        let none = AtomSet::new();
        assert!(s.satisfied_by(s.tru(), &none));
        assert!(!s.satisfied_by(s.fals(), &both));
        assert!(s.satisfied_by(a, &only_a));
        assert!(!s.satisfied_by(b, &only_a));
        assert!(s.satisfied_by(aob, &only_a));
        assert!(!s.satisfied_by(ab, &only_a));
        assert!(s.satisfied_by(ab, &both));
    }

    #[test]
    fn map_atoms_is_homomorphic() {
        let mut s = store();
        let (a, b, c) = (s.atom(0), s.atom(1), s.atom(2));
        let ab = s.conj(a, b);
        let f = s.disj(ab, c);
        // map: 0 -> q2, 1 -> q2|q3, 2 -> false
        let q2 = s.atom(2);
        let q3 = s.atom(3);
        let q23 = s.disj(q2, q3);
        let fal = s.fals();
        let map = move |x: u32| match x {
            0 => q2,
            1 => q23,
            _ => fal,
        };
        let mapped = s.map_atoms(f, &map);
        // by hand: (q2 & (q2|q3)) | false = q2
        assert_eq!(mapped, q2);

        // identity map preserves the formula
        let mut s2 = store();
        let (a, b) = (s2.atom(0), s2.atom(1));
        let g = s2.disj(a, b);
        let ga = s2.conj(g, a);
        let ids: Vec<FormulaId> = (0..4).map(|i| s2.atom(i)).collect();
        let mapped = s2.map_atoms(ga, &move |x| ids[x as usize]);
        assert_eq!(mapped, ga);
    }

    #[test]
    fn false_propagates_through_map() {
        // the empty disjunction inside map_atoms yields false
        let mut s = store();
        let a = s.atom(0);
        let fal = s.fals();
        let mapped = s.map_atoms(a, &move |_| fal);
        assert_eq!(mapped, s.fals());
    }

    #[test]
    fn truth_table_agreement_small() {
        // canonical ops agree with brute-force evaluation over all assignments
        let mut s = store();
        let (a, b, c) = (s.atom(0), s.atom(1), s.atom(2));
        let ab = s.conj(a, b);
        let f1 = s.disj(ab, c);
        let bc = s.disj(b, c);
        let f2 = s.conj(a, bc);
        let both_conj = s.conj(f1, f2);
        let both_disj = s.disj(f1, f2);
        for bits in 0u32..8 {
            let assign = AtomSet::from_indices((0..3).filter(|&i| bits & (1 << i) != 0));
            let v1 = s.satisfied_by(f1, &assign);
            let v2 = s.satisfied_by(f2, &assign);
            assert_eq!(s.satisfied_by(both_conj, &assign), v1 && v2);
            assert_eq!(s.satisfied_by(both_disj, &assign), v1 || v2);
        }
    }

    #[test]
    fn rendering() {
        let mut s = store();
        let (a, b, c) = (s.atom(0), s.atom(1), s.atom(2));
        assert_eq!(s.render(s.tru()), "true");
        assert_eq!(s.render(s.fals()), "false");
        assert_eq!(s.render(a), "q0");
        let aob = s.disj(a, b);
        assert_eq!(s.render(aob), "q0 | qf");
        let both = s.conj(aob, c);
        assert_eq!(s.render(both), "q2 & (q0 | qf)");
    }
}
