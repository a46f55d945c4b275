//! Strategy extraction, play simulation, and independent game oracles.
//!
//! A play position is a closed ground term together with the forward state
//! set: the automaton states reachable on the letters emitted so far. The
//! extracted strategy maintains the invariant that the position's solution
//! formula is satisfied when exactly the forward states are assumed true;
//! on outermost-innermost rewriting this is equivalent to evaluating the
//! whole prefix-wrapped term against the initial state. Plays use the
//! optimized interpretation, whose atoms are the automaton states.
//!
//! The oracles are deliberately independent of the fixpoint solver: a
//! breadth-first attractor over the reachable position graph (exact when the
//! graph is finite, `Unknown` beyond the budget), and a depth-bounded
//! refutation search that can confirm wins of the second player.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::automaton::{LetterId, StateSet};
use crate::domain::ModelKind;
use crate::formula::AtomSet;
use crate::scheme::{Instance, Owner};
use crate::solver::{Solver, SolverError};
use crate::term::{NonTerminalSym, TermId, TermNode};

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("strategy invariant failed at {at}")]
    Refuted { at: String, trace: Vec<String> },
    #[error("no rule of {nonterminal} satisfies the invariant")]
    NoSatisfyingChoice {
        nonterminal: String,
        trace: Vec<String>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayStep {
    pub owner: Owner,
    pub nonterminal: String,
    pub rule: usize,
    /// Word emitted up to and including this step.
    pub prefix: String,
    /// Solution formula of the position reached by this step.
    pub formula: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayTrace {
    pub steps: Vec<PlayStep>,
    /// The finished word, if the play ended.
    pub word: Option<String>,
    pub outcome: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExhaustiveReport {
    /// Positions visited across all adversary branches.
    pub nodes: usize,
    /// Plays that finished in an accepted word.
    pub completed: usize,
    /// Longest rewrite sequence explored.
    pub deepest: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleOutcome {
    EWins,
    AWins,
    Unknown { explored: usize },
}

/// Strip emitted letters off the focus, pushing the forward set through the
/// automaton. Letters are recorded in emission order.
fn peel(
    inst: &Instance,
    mut t: TermId,
    mut fwd: StateSet,
    emitted: &mut Vec<LetterId>,
) -> (TermId, StateSet) {
    let terms = inst.terms.borrow();
    loop {
        if let TermNode::App { func, arg } = terms.node(t) {
            if let TermNode::Terminal(sym) = terms.node(func) {
                if let Some(l) = inst.scheme.sig.letter_of(sym) {
                    emitted.push(l);
                    fwd = inst.nfa.post(l, fwd);
                    t = arg;
                    continue;
                }
            }
        }
        break;
    }
    (t, fwd)
}

fn is_end(inst: &Instance, t: TermId) -> bool {
    matches!(inst.terms.borrow().node(t), TermNode::Terminal(sym) if sym == inst.scheme.sig.end)
}

/// The non-terminal heading a (peeled, non-end) position and its successor
/// per rule.
fn successors(inst: &Instance, t: TermId) -> (NonTerminalSym, Vec<TermId>) {
    let (head, args) = inst.terms.borrow().spine(t);
    let nt = match inst.terms.borrow().node(head) {
        TermNode::NonTerminal(nt) => nt,
        other => unreachable!("peeled positions are headed by a non-terminal, found {other:?}"),
    };
    let succ = inst
        .scheme
        .rules_of(nt)
        .iter()
        .map(|r| {
            let kinds = inst.kinds.borrow();
            inst.terms
                .borrow_mut()
                .substitute(&kinds, r.body, &args)
                .expect("rule body arity matches the application")
        })
        .collect();
    (nt, succ)
}

fn fwd_atoms(fwd: StateSet) -> AtomSet {
    AtomSet::from_indices(fwd.iter().map(|q| q as u32))
}

fn invariant_holds(solver: &mut Solver, t: TermId, fwd: StateSet) -> Result<bool, SolverError> {
    let f = solver.eval_on_solution(t)?;
    Ok(solver.model.formulas.satisfied_by(f, &fwd_atoms(fwd)))
}

fn render_word(inst: &Instance, letters: &[LetterId]) -> String {
    letters
        .iter()
        .map(|&l| inst.nfa.letter_name(l))
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_position(solver: &Solver, t: TermId, fwd: StateSet) -> String {
    let inst = solver.instance();
    let kinds = inst.kinds.borrow();
    let terms = inst.terms.borrow();
    format!(
        "{} with forward states {}",
        terms.render(&kinds, t, &inst.scheme.sig),
        inst.nfa.render_state_set(fwd)
    )
}

/// Pick the least rule whose successor keeps the invariant.
fn extract_choice(
    solver: &mut Solver,
    succs: &[TermId],
    fwd: StateSet,
) -> Result<Option<usize>, SolverError> {
    for (i, &s) in succs.iter().enumerate() {
        if invariant_holds(solver, s, fwd)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

struct ExhaustiveState {
    nodes: usize,
    completed: usize,
    deepest: usize,
    budget: usize,
    emitted: Vec<LetterId>,
    /// (owner, non-terminal, rule, letters emitted after the move); rendered
    /// only when a refutation is reported.
    trace: Vec<(Owner, NonTerminalSym, usize, usize)>,
}

fn render_trace(inst: &Instance, st: &ExhaustiveState) -> Vec<String> {
    st.trace
        .iter()
        .map(|&(owner, nt, rule, upto)| {
            let name = &inst.scheme.sig.nonterminals[nt.0 as usize].name;
            format!(
                "{owner} {name} {rule} | {}",
                render_word(inst, &st.emitted[..upto.min(st.emitted.len())])
            )
        })
        .collect()
}

/// Execute the extracted strategy against every adversary line of play up to
/// the rewrite depth, checking the invariant at every position reached.
pub fn simulate_exhaustive(
    solver: &mut Solver,
    depth: usize,
) -> Result<ExhaustiveReport, StrategyError> {
    assert_eq!(
        solver.model.which,
        ModelKind::Optimized,
        "plays run against the optimized interpretation"
    );
    let inst = solver.instance();
    let init = StateSet::singleton(inst.nfa.initial());
    let mut st = ExhaustiveState {
        nodes: 0,
        completed: 0,
        deepest: 0,
        budget: depth,
        emitted: Vec::new(),
        trace: Vec::new(),
    };
    let (t, fwd) = peel(inst, inst.start_term(), init, &mut st.emitted);
    exhaustive_rec(solver, t, fwd, depth, &mut st)?;
    Ok(ExhaustiveReport {
        nodes: st.nodes,
        completed: st.completed,
        deepest: st.deepest,
    })
}

fn exhaustive_rec(
    solver: &mut Solver,
    t: TermId,
    fwd: StateSet,
    depth: usize,
    st: &mut ExhaustiveState,
) -> Result<(), StrategyError> {
    let inst = solver.instance();
    st.nodes += 1;
    st.deepest = st.deepest.max(st.budget - depth);
    if !invariant_holds(solver, t, fwd)? {
        return Err(StrategyError::Refuted {
            at: render_position(solver, t, fwd),
            trace: render_trace(inst, st),
        });
    }
    if is_end(inst, t) {
        // The invariant certifies acceptance; cross-check with the automaton.
        if !inst.nfa.accepts(&st.emitted) {
            return Err(StrategyError::Refuted {
                at: format!("finished word {}", render_word(inst, &st.emitted)),
                trace: render_trace(inst, st),
            });
        }
        st.completed += 1;
        return Ok(());
    }
    if depth == 0 {
        return Ok(());
    }
    let (nt, succs) = successors(inst, t);
    let owner = inst.scheme.sig.owner(nt);
    let chosen: Vec<usize> = match owner {
        Owner::E => {
            let Some(i) = extract_choice(solver, &succs, fwd)? else {
                return Err(StrategyError::NoSatisfyingChoice {
                    nonterminal: inst.scheme.sig.nonterminals[nt.0 as usize].name.clone(),
                    trace: render_trace(inst, st),
                });
            };
            vec![i]
        }
        Owner::A => (0..succs.len()).collect(),
    };
    for i in chosen {
        let mark = st.emitted.len();
        let (t2, fwd2) = peel(inst, succs[i], fwd, &mut st.emitted);
        st.trace.push((owner, nt, i, st.emitted.len()));
        exhaustive_rec(solver, t2, fwd2, depth - 1, st)?;
        st.trace.pop();
        st.emitted.truncate(mark);
    }
    Ok(())
}

/// Play one game: the extracted strategy answers for E, a seeded random
/// adversary answers for A. Stops after `depth` rewrites.
pub fn play_random(
    solver: &mut Solver,
    depth: usize,
    seed: u64,
) -> Result<PlayTrace, StrategyError> {
    assert_eq!(
        solver.model.which,
        ModelKind::Optimized,
        "plays run against the optimized interpretation"
    );
    let inst = solver.instance();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = StateSet::singleton(inst.nfa.initial());
    let mut emitted = Vec::new();
    let (mut t, mut fwd) = peel(inst, inst.start_term(), init, &mut emitted);
    let mut steps = Vec::new();
    let mut lines = Vec::new();
    for _ in 0..depth {
        if !invariant_holds(solver, t, fwd)? {
            return Err(StrategyError::Refuted {
                at: render_position(solver, t, fwd),
                trace: lines,
            });
        }
        if is_end(inst, t) {
            break;
        }
        let (nt, succs) = successors(inst, t);
        let owner = inst.scheme.sig.owner(nt);
        let name = inst.scheme.sig.nonterminals[nt.0 as usize].name.clone();
        let i = match owner {
            Owner::E => match extract_choice(solver, &succs, fwd)? {
                Some(i) => i,
                None => {
                    return Err(StrategyError::NoSatisfyingChoice {
                        nonterminal: name,
                        trace: lines,
                    })
                }
            },
            Owner::A => rng.random_range(0..succs.len()),
        };
        let (t2, fwd2) = peel(inst, succs[i], fwd, &mut emitted);
        t = t2;
        fwd = fwd2;
        let f = solver.eval_on_solution(t)?;
        let step = PlayStep {
            owner,
            nonterminal: name,
            rule: i,
            prefix: render_word(inst, &emitted),
            formula: solver.model.formulas.render(f),
        };
        lines.push(format!(
            "{} {} {} | {} | {}",
            step.owner, step.nonterminal, step.rule, step.prefix, step.formula
        ));
        steps.push(step);
    }
    let (word, outcome) = if is_end(inst, t) {
        if !invariant_holds(solver, t, fwd)? || !inst.nfa.accepts(&emitted) {
            return Err(StrategyError::Refuted {
                at: format!("finished word {}", render_word(inst, &emitted)),
                trace: lines,
            });
        }
        (
            Some(render_word(inst, &emitted)),
            "accepted".to_string(),
        )
    } else {
        (None, "depth exhausted".to_string())
    };
    Ok(PlayTrace {
        steps,
        word,
        outcome,
    })
}

/// Exact winner over the reachable position graph, when it closes within the
/// node budget: the second player wins exactly the positions in the backward
/// attractor of the rejected end positions.
pub fn oracle_attractor(inst: &Instance, budget: usize) -> OracleOutcome {
    let init = StateSet::singleton(inst.nfa.initial());
    let finals = inst.nfa.finals();
    let mut scratch = Vec::new();
    let root = peel(inst, inst.start_term(), init, &mut scratch);

    let mut index: HashMap<(TermId, StateSet), usize> = HashMap::new();
    let mut nodes: Vec<(TermId, StateSet)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut owner_of: Vec<Option<Owner>> = Vec::new();
    index.insert(root, 0);
    nodes.push(root);
    let mut next = 0;
    while next < nodes.len() {
        if nodes.len() > budget {
            return OracleOutcome::Unknown {
                explored: nodes.len(),
            };
        }
        let (t, fwd) = nodes[next];
        next += 1;
        if is_end(inst, t) {
            succ.push(Vec::new());
            owner_of.push(None);
            continue;
        }
        let (nt, bodies) = successors(inst, t);
        let mut edges = Vec::with_capacity(bodies.len());
        for b in bodies {
            scratch.clear();
            let child = peel(inst, b, fwd, &mut scratch);
            let id = *index.entry(child).or_insert_with(|| {
                nodes.push(child);
                nodes.len() - 1
            });
            edges.push(id);
        }
        succ.push(edges);
        owner_of.push(Some(inst.scheme.sig.owner(nt)));
    }

    // Least fixpoint of the rejecting attractor; no subsumption, plain
    // iteration over the explicit graph.
    let n = nodes.len();
    let mut awin = vec![false; n];
    for i in 0..n {
        if owner_of[i].is_none() {
            let (_, fwd) = nodes[i];
            awin[i] = fwd.inter(finals).is_empty();
        }
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            if awin[i] {
                continue;
            }
            let new = match owner_of[i] {
                None => false,
                Some(Owner::E) => succ[i].iter().all(|&j| awin[j]),
                Some(Owner::A) => succ[i].iter().any(|&j| awin[j]),
            };
            if new {
                awin[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if awin[0] {
        OracleOutcome::AWins
    } else {
        OracleOutcome::EWins
    }
}

/// Can the second player force a rejected finished word within `depth`
/// rewrites? Sound for confirming second-player wins; a `false` merely means
/// no refutation was found at this depth.
pub fn oracle_bounded_a_win(inst: &Instance, depth: usize) -> bool {
    let init = StateSet::singleton(inst.nfa.initial());
    let mut scratch = Vec::new();
    let (t, fwd) = peel(inst, inst.start_term(), init, &mut scratch);
    let mut memo = HashMap::new();
    bounded_rec(inst, t, fwd, depth, &mut memo)
}

fn bounded_rec(
    inst: &Instance,
    t: TermId,
    fwd: StateSet,
    depth: usize,
    memo: &mut HashMap<(TermId, StateSet, usize), bool>,
) -> bool {
    if is_end(inst, t) {
        return fwd.inter(inst.nfa.finals()).is_empty();
    }
    if depth == 0 {
        return false;
    }
    let key = (t, fwd, depth);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let (nt, bodies) = successors(inst, t);
    let owner = inst.scheme.sig.owner(nt);
    let mut scratch = Vec::new();
    let result = match owner {
        Owner::E => bodies.into_iter().all(|b| {
            scratch.clear();
            let (t2, fwd2) = peel(inst, b, fwd, &mut scratch);
            bounded_rec(inst, t2, fwd2, depth - 1, memo)
        }),
        Owner::A => bodies.into_iter().any(|b| {
            scratch.clear();
            let (t2, fwd2) = peel(inst, b, fwd, &mut scratch);
            bounded_rec(inst, t2, fwd2, depth - 1, memo)
        }),
    };
    memo.insert(key, result);
    result
}
