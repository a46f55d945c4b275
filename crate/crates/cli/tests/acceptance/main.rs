//! Acceptance suite: seven end-to-end checks, one per release criterion,
//! each printing a single summary line. Run with `--nocapture` to see them.

mod catalog;
mod oracles;

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hoig_core::domain::{leq_values, meet_values, ModelKind, DEFAULT_DOMAIN_CAP};
use hoig_core::scheme::{Instance, Owner};
use hoig_core::solver::{check_transfer, Solver, Valuation, DEFAULT_MAX_ITERS};
use hoig_core::strategy::{oracle_attractor, oracle_bounded_a_win, simulate_exhaustive, OracleOutcome};
use hoig_core::term::NonTerminalSym;

fn parse(entry: &catalog::CatalogEntry) -> Instance {
    Instance::parse(&entry.scheme_text, entry.nfa_text).unwrap_or_else(|e| {
        panic!("{} x {}: {e}", entry.scheme_name, entry.nfa_name);
    })
}

fn solver(inst: &Instance, model: ModelKind) -> Solver<'_> {
    Solver::new(inst, model, DEFAULT_DOMAIN_CAP, DEFAULT_MAX_ITERS)
}

/// Criterion 1: the worked doubling example. Winner E under both
/// interpretations, the state-atom solution at the start symbol is exactly
/// the initial-state atom, within 10 iterations and one second.
#[test]
fn criterion_1_worked_example() {
    let entry = catalog::transfer_catalog()
        .into_iter()
        .find(|e| e.scheme_name == "doubling" && e.nfa_name == "only_b")
        .unwrap();
    let inst = parse(&entry);
    let started = Instant::now();
    let mut opt = solver(&inst, ModelKind::Optimized);
    let report = opt.solve().unwrap();
    assert_eq!(report.winner, Owner::E, "optimized winner");
    assert!(report.iterations <= 10, "iterations {} > 10", report.iterations);
    let sol = opt.solution_at(inst.scheme.sig.start, &[]).unwrap();
    let initial_atom = opt.model.formulas.atom(inst.nfa.initial() as u32);
    assert_eq!(sol, initial_atom, "start solution must be the initial-state atom");

    let mut abs = solver(&inst, ModelKind::Abstract);
    let abs_report = abs.solve().unwrap();
    assert_eq!(abs_report.winner, Owner::E, "set-atom winner");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 1, "took {elapsed:?}");
    println!(
        "criterion 1: pass — doubling/only_b winner E in both interpretations, \
         {} iterations, start solution = initial atom, {} ms",
        report.iterations,
        elapsed.as_millis()
    );
}

/// Criterion 2: translating the set-atom solution yields the state-atom
/// solution exactly, across the transfer catalog, zero mismatches.
#[test]
fn criterion_2_exact_transfer() {
    let entries = catalog::transfer_catalog();
    assert!(entries.len() >= 20, "catalog too small: {}", entries.len());
    let mut orders = BTreeSet::new();
    let mut ground_points = 0usize;
    let mut function_points = 0usize;
    for (i, entry) in entries.iter().enumerate() {
        let inst = parse(entry);
        let report = check_transfer(&inst, DEFAULT_DOMAIN_CAP, DEFAULT_MAX_ITERS, 8, 1000 + i as u64)
            .unwrap_or_else(|e| panic!("{} x {}: {e}", entry.scheme_name, entry.nfa_name));
        assert!(
            report.exact(),
            "{} x {}: mismatches {:?}, image match {}",
            entry.scheme_name,
            entry.nfa_name,
            report.mismatches,
            report.image_matches
        );
        orders.insert(entry.order);
        ground_points += report.ground_points;
        function_points += report.function_points;
    }
    assert_eq!(orders, BTreeSet::from([0, 1, 2]));
    println!(
        "criterion 2: pass — {} instances (orders 0-2), zero mismatches, \
         {ground_points} ground and {function_points} sampled solution points compared",
        entries.len()
    );
}

/// Criterion 3: on finite-position instances the attractor construction
/// agrees with the solver everywhere, and every A verdict is confirmed by
/// bounded search within depth 30.
#[test]
fn criterion_3_oracle_equivalence() {
    let entries = catalog::oracle_catalog();
    assert!(entries.len() >= 30, "catalog too small: {}", entries.len());
    let mut a_confirmed = 0usize;
    let mut e_count = 0usize;
    for entry in &entries {
        let inst = parse(entry);
        let winner = solver(&inst, ModelKind::Optimized).winner().unwrap();
        let outcome = oracle_attractor(&inst, 200_000);
        let expected = match winner {
            Owner::E => OracleOutcome::EWins,
            Owner::A => OracleOutcome::AWins,
        };
        assert_eq!(
            outcome, expected,
            "{} x {}: solver {winner}, attractor {outcome:?}",
            entry.scheme_name, entry.nfa_name
        );
        match winner {
            Owner::A => {
                assert!(
                    oracle_bounded_a_win(&inst, 30),
                    "{} x {}: bounded search misses the A win",
                    entry.scheme_name,
                    entry.nfa_name
                );
                a_confirmed += 1;
            }
            Owner::E => e_count += 1,
        }
    }
    println!(
        "criterion 3: pass — {} instances, attractor agreement 100% \
         ({e_count} E / {a_confirmed} A), every A verdict confirmed at depth <= 30",
        entries.len()
    );
}

/// Criterion 4: wherever the solver declares E, the extracted strategy
/// survives every adversary line to depth 20 with the invariant intact.
#[test]
fn criterion_4_strategy_soundness() {
    let entries = catalog::strategy_catalog();
    let mut total_nodes = 0usize;
    let mut games = 0usize;
    for entry in &entries {
        let inst = parse(entry);
        let mut s = solver(&inst, ModelKind::Optimized);
        if s.winner().unwrap() != Owner::E {
            continue;
        }
        let report = simulate_exhaustive(&mut s, 20).unwrap_or_else(|e| {
            panic!("{} x {}: {e}", entry.scheme_name, entry.nfa_name);
        });
        total_nodes += report.nodes;
        games += 1;
    }
    assert!(total_nodes >= 10_000, "only {total_nodes} play nodes");
    println!(
        "criterion 4: pass — {games} E-games simulated exhaustively to depth 20, \
         zero refutations, invariant held at all {total_nodes} nodes"
    );
}

/// Criterion 5: connectives, implication, and atom substitution agree with
/// truth-table evaluation on 1,000 random pairs per operation.
#[test]
fn criterion_5_formula_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pairs = 1000usize;
    for _ in 0..pairs {
        let atoms = rng.random_range(1..=8u32);
        let left = oracles::random_clauses(&mut rng, atoms);
        let right = oracles::random_clauses(&mut rng, atoms);
        let mut st = oracles::formula_universe(atoms);
        let f = oracles::build(&mut st, &left);
        let g = oracles::build(&mut st, &right);
        let c = st.conj(f, g);
        let d = st.disj(f, g);
        let mut entails = true;
        for assign in 0..1u32 << atoms {
            let set = oracles::assign_set(assign, atoms);
            let (sf, sg) = (oracles::ref_sat(&left, assign), oracles::ref_sat(&right, assign));
            assert_eq!(st.satisfied_by(c, &set), sf && sg, "conj at {assign:b}");
            assert_eq!(st.satisfied_by(d, &set), sf || sg, "disj at {assign:b}");
            entails &= !sf || sg;
        }
        assert_eq!(st.implies(f, g), entails, "implies");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..pairs {
        let src_atoms = rng.random_range(1..=3u32);
        let dst_atoms = rng.random_range(1..=4u32);
        let clauses = oracles::random_clauses(&mut rng, src_atoms);
        let images: Vec<oracles::Clauses> = (0..src_atoms)
            .map(|_| oracles::random_clauses(&mut rng, dst_atoms))
            .collect();
        let mut dst = oracles::formula_universe(dst_atoms);
        let image_ids: Vec<_> = images.iter().map(|c| oracles::build(&mut dst, c)).collect();
        let mut src = oracles::formula_universe(src_atoms);
        let f = oracles::build(&mut src, &clauses);
        let mapped = src.map_atoms_into(f, &mut dst, &|a| image_ids[a as usize]);
        for assign in 0..1u32 << dst_atoms {
            let set = oracles::assign_set(assign, dst_atoms);
            let lifted: u32 = (0..src_atoms)
                .filter(|&a| oracles::ref_sat(&images[a as usize], assign))
                .map(|a| 1 << a)
                .sum();
            assert_eq!(
                dst.satisfied_by(mapped, &set),
                oracles::ref_sat(&clauses, lifted),
                "atom substitution at {assign:b}"
            );
        }
    }
    println!(
        "criterion 5: pass — conj/disj/implies/map_atoms each agree with \
         truth tables on {pairs} random pairs (up to 8 atoms), zero discrepancies"
    );
}

/// Criterion 6: the evaluator's laws — applying a lambda equals substituting
/// its argument, and evaluation is monotone in the valuation. The fixpoint
/// loop's own descending-chain assertion backs the third law across the
/// entire suite.
#[test]
fn criterion_6_semantics_laws() {
    let started = Instant::now();
    let entry = catalog::oracle_catalog()
        .into_iter()
        .find(|e| e.scheme_name == "carrier_e" && e.nfa_name == "trailing_b")
        .unwrap();
    let inst = parse(&entry);
    let mut s = solver(&inst, ModelKind::Optimized);

    let sig = &inst.scheme.sig;
    let f_sym = NonTerminalSym(
        sig.nonterminals.iter().position(|d| d.name == "F").unwrap() as u32,
    );
    let nt_syms: Vec<NonTerminalSym> =
        (0..sig.nonterminal_count()).map(|i| NonTerminalSym(i as u32)).collect();
    let elems: Vec<Vec<hoig_core::ValueId>> = nt_syms
        .iter()
        .map(|&nt| {
            let kind = sig.nonterminal_kind(nt);
            let kb = inst.kinds.borrow();
            s.domains
                .enumerate(&kb, &mut s.model, &mut s.values, kind)
                .unwrap()
                .elems
                .clone()
        })
        .collect();
    let unary_nt = {
        let kind = sig.nonterminal_kind(f_sym);
        inst.terms.borrow_mut().nonterminal(f_sym, kind)
    };
    let ground = inst.kinds.borrow_mut().ground();

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pick = |rng: &mut ChaCha8Rng| {
        Valuation(
            nt_syms
                .iter()
                .enumerate()
                .map(|(i, &nt)| (nt, *elems[i].choose(rng).unwrap()))
                .collect(),
        )
    };

    // Applying a lambda to an argument equals evaluating the substituted
    // body: 500 random well-kinded redexes under random valuations.
    for _ in 0..500 {
        let body = oracles::random_ground_term(&mut rng, &inst, unary_nt, 4, true);
        let arg = oracles::random_ground_term(&mut rng, &inst, unary_nt, 3, false);
        let (redex, substituted) = {
            let mut kinds = inst.kinds.borrow_mut();
            let mut terms = inst.terms.borrow_mut();
            let lam = terms.lambda(&mut kinds, ground, "x", body);
            let redex = terms.app(&kinds, lam, arg).unwrap();
            let substituted = terms.substitute(&kinds, body, &[arg]).unwrap();
            (redex, substituted)
        };
        let valn = pick(&mut rng);
        let via_apply = s.eval_term(redex, &[], &valn).unwrap();
        let via_subst = s.eval_term(substituted, &[], &valn).unwrap();
        assert_eq!(
            s.values.as_ground(via_apply),
            s.values.as_ground(via_subst),
            "beta law violated"
        );
    }

    // Evaluation is monotone: on 500 ordered valuation pairs (built by
    // pointwise meet), the evaluated results stay ordered.
    for _ in 0..500 {
        let term = oracles::random_ground_term(&mut rng, &inst, unary_nt, 5, false);
        let hi = pick(&mut rng);
        let other = pick(&mut rng);
        let lo = Valuation(
            hi.0.iter()
                .map(|(&nt, &v)| (nt, meet_values(&mut s.model, &mut s.values, v, other.0[&nt])))
                .collect(),
        );
        let rlo = s.eval_term(term, &[], &lo).unwrap();
        let rhi = s.eval_term(term, &[], &hi).unwrap();
        assert!(
            leq_values(&s.model, &s.values, rlo, rhi),
            "evaluation not monotone"
        );
    }

    println!(
        "criterion 6: pass — beta law on 500 redexes, monotone evaluation on \
         500 valuation pairs, descending-chain assertion armed suite-wide \
         ({} ms)",
        started.elapsed().as_millis()
    );
}

/// Criterion 7: degenerate inputs — a single-rule scheme, an empty-language
/// automaton, and an all-accepting automaton — match golden CLI output.
#[test]
fn criterion_7_degenerate_goldens() {
    let cases: &[(&str, &str, &str, Owner)] = &[
        ("single_rule", "only_b", "single_rule__only_b", Owner::A),
        ("single_rule", "all_accepting", "single_rule__all_accepting", Owner::E),
        ("loop_or_end", "empty_language", "loop_or_end__empty_language", Owner::E),
        ("chooser", "empty_language", "chooser__empty_language", Owner::A),
        ("chooser", "all_accepting", "chooser__all_accepting", Owner::E),
    ];
    let base = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/acceptance");
    for &(scheme, nfa, golden, winner) in cases {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_hoig"))
            .arg("solve")
            .arg("--json")
            .arg(format!("{base}/fixtures/{scheme}.hrs"))
            .arg(format!("{base}/fixtures/{nfa}.nfa"))
            .output()
            .unwrap();
        assert!(out.status.success(), "{scheme} x {nfa}: {:?}", out.status);
        let mut got: serde_json::Value = serde_json::from_slice(&out.stdout)
            .unwrap_or_else(|e| panic!("{scheme} x {nfa}: bad JSON: {e}"));
        got["elapsed_ms"] = serde_json::Value::from(0);
        assert_eq!(
            got["report"]["winner"],
            serde_json::Value::from(winner.to_string()),
            "{scheme} x {nfa}: winner"
        );
        let golden_path = format!("{base}/golden/{golden}.json");
        let want: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&golden_path).unwrap_or_else(|e| {
                panic!("missing golden {golden_path}: {e}");
            }))
            .unwrap();
        assert_eq!(got, want, "{scheme} x {nfa}: drifted from {golden_path}");
    }
    println!(
        "criterion 7: pass — {} degenerate pairings match their golden reports \
         (single-rule scheme, empty-language and all-accepting automata)",
        cases.len()
    );
}
