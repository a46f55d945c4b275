//! Microbenchmarks for the formula lattice and automaton preprocessing.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hoig_core::automaton::{parse_nfa, Nfa};
use hoig_core::formula::{FormulaId, FormulaStore};

/// Deterministic pseudo-random clause sets, enough variety to exercise the
/// antichain normalisation.
fn formulas(store: &mut FormulaStore, atoms: u32, count: usize) -> Vec<FormulaId> {
    let mut state = 0x2545F4914F6CDD1Du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    (0..count)
        .map(|_| {
            let mut f = store.tru();
            for _ in 0..(next() % 4 + 1) {
                let mut clause = store.fals();
                for _ in 0..(next() % atoms as u64 + 1) {
                    let a = store.atom((next() % atoms as u64) as u32);
                    clause = store.disj(clause, a);
                }
                f = store.conj(f, clause);
            }
            f
        })
        .collect()
}

fn lattice_ops(c: &mut Criterion) {
    let mut store = FormulaStore::new((0..8).map(|a| format!("x{a}")).collect());
    let fs = formulas(&mut store, 8, 64);
    c.bench_function("conj over 8 atoms", |b| {
        b.iter(|| {
            for i in 0..fs.len() {
                let g = fs[(i * 31 + 7) % fs.len()];
                black_box(store.conj(fs[i], g));
            }
        })
    });
    c.bench_function("disj over 8 atoms", |b| {
        b.iter(|| {
            for i in 0..fs.len() {
                let g = fs[(i * 31 + 7) % fs.len()];
                black_box(store.disj(fs[i], g));
            }
        })
    });
    c.bench_function("implies over 8 atoms", |b| {
        b.iter(|| {
            for i in 0..fs.len() {
                let g = fs[(i * 31 + 7) % fs.len()];
                black_box(store.implies(fs[i], g));
            }
        })
    });
}

const WIDE_NFA: &str = "
    states q0 q1 q2 q3 q4 q5;
    initial q0;
    final q5;
    trans q0 a q1; trans q1 a q2; trans q2 a q3; trans q3 a q4; trans q4 a q5;
    trans q0 b q0; trans q1 b q1; trans q2 b q2; trans q3 b q3; trans q4 b q4;
    trans q5 b q5; trans q5 a q5; trans q2 a q1; trans q3 b q1;
";

fn closure(c: &mut Criterion) {
    let raw = parse_nfa(WIDE_NFA).unwrap();
    let alphabet = vec!["a".to_string(), "b".to_string()];
    c.bench_function("accepting-set closure, 6 states", |b| {
        b.iter(|| {
            let nfa = Nfa::bind(&raw, &alphabet).unwrap();
            black_box(nfa.acc_closure().members().len())
        })
    });
}

criterion_group!(benches, lattice_ops, closure);
criterion_main!(benches);
