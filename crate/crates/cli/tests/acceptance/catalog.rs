//! Instance catalog for the acceptance suite: schemes of orders 0-2 crossed
//! with small automata. Oracle instances are restricted to schemes whose
//! positions never grow, so enumerative game search terminates.

/// All automata stay within 4 states and share the two-letter alphabet, and
/// their accepting-set closures stay small enough for the set-atom
/// interpretation to enumerate.
pub const NFAS: &[(&str, &str)] = &[
    (
        "only_b",
        "states q0 qf; initial q0; final qf;\n         trans q0 b qf;",
    ),
    (
        "trailing_b",
        "states q0 qf; initial q0; final qf;\n         trans q0 a q0; trans q0 b qf; trans qf b qf;",
    ),
    (
        "even_as",
        "states e0 o1; initial e0; final e0;\n         trans e0 a o1; trans o1 a e0; trans e0 b e0; trans o1 b o1;",
    ),
    (
        "b_star_a",
        "states s0 f1; initial s0; final f1;\n         trans s0 b s0; trans s0 a f1;",
    ),
    (
        "contains_ab",
        "states q0 q1 q2; initial q0; final q2;\n         trans q0 b q0; trans q0 a q1; trans q1 a q1;\n         trans q1 b q2; trans q2 a q2; trans q2 b q2;",
    ),
    (
        "all_accepting",
        "states q0; initial q0; final q0;\n         trans q0 a q0; trans q0 b q0;",
    ),
    ("empty_language", "states q0; initial q0; final;"),
    (
        "len_le_2",
        "states q0 q1 q2; initial q0; final q0 q1 q2;\n         trans q0 a q1; trans q0 b q1; trans q1 a q2; trans q1 b q2;",
    ),
];

const PRELUDE: &str = "terminal a : o -> o;\nterminal b : o -> o;\nterminal end : o;\n";

pub struct SchemeSpec {
    pub name: &'static str,
    pub order: u32,
    /// Positions reachable by rewriting stay finite (no argument growth).
    pub finite_positions: bool,
    pub body: &'static str,
}

pub const SCHEMES: &[SchemeSpec] = &[
    SchemeSpec {
        name: "loop_or_b_e",
        order: 0,
        finite_positions: true,
        body: "nonterminal S : o owner E;\nstart S;\nrule S = a S;\nrule S = b end;\n",
    },
    SchemeSpec {
        name: "loop_or_b_a",
        order: 0,
        finite_positions: true,
        body: "nonterminal S : o owner A;\nstart S;\nrule S = a S;\nrule S = b end;\n",
    },
    SchemeSpec {
        name: "loop_or_a_e",
        order: 0,
        finite_positions: true,
        body: "nonterminal S : o owner E;\nstart S;\nrule S = b S;\nrule S = a end;\n",
    },
    SchemeSpec {
        name: "free_choice_a",
        order: 0,
        finite_positions: true,
        body: "nonterminal S : o owner A;\nstart S;\nrule S = a S;\nrule S = b S;\nrule S = end;\n",
    },
    SchemeSpec {
        name: "alternating",
        order: 0,
        finite_positions: true,
        body: "nonterminal S : o owner E;\nnonterminal T : o owner A;\nstart S;\nrule S = a T;\nrule S = b end;\nrule T = b S;\nrule T = a end;\n",
    },
    SchemeSpec {
        name: "single_rule",
        order: 0,
        finite_positions: true,
        body: "nonterminal S : o owner E;\nstart S;\nrule S = end;\n",
    },
    SchemeSpec {
        name: "carrier_e",
        order: 1,
        finite_positions: true,
        body: "nonterminal S : o owner E;\nnonterminal F : o -> o owner A;\nstart S;\nrule S = F end;\nrule F = \\x:o. a (F x);\nrule F = \\x:o. b x;\n",
    },
    SchemeSpec {
        name: "carrier_a",
        order: 1,
        finite_positions: true,
        body: "nonterminal S : o owner A;\nnonterminal F : o -> o owner E;\nstart S;\nrule S = F end;\nrule F = \\x:o. b (F x);\nrule F = \\x:o. a x;\n",
    },
    SchemeSpec {
        name: "grower",
        order: 1,
        finite_positions: false,
        body: "nonterminal S : o owner E;\nnonterminal F : o -> o owner A;\nstart S;\nrule S = F end;\nrule F = \\x:o. a (F (b x));\nrule F = \\x:o. b x;\n",
    },
    SchemeSpec {
        name: "identity_or_a",
        order: 1,
        finite_positions: true,
        body: "nonterminal S : o owner A;\nnonterminal F : o -> o owner A;\nstart S;\nrule S = F (b end);\nrule F = \\x:o. x;\nrule F = \\x:o. a (F x);\n",
    },
    SchemeSpec {
        name: "doubling",
        order: 2,
        finite_positions: false,
        body: "nonterminal S : o owner E;\nnonterminal H : (o -> o) -> o -> o owner A;\nstart S;\nrule S = H a end;\nrule S = b end;\nrule H = \\f:o -> o. \\x:o. f (f x);\nrule H = \\f:o -> o. \\x:o. H (H f) x;\n",
    },
    SchemeSpec {
        name: "apply_once_or_twice",
        order: 2,
        finite_positions: false,
        body: "nonterminal S : o owner E;\nnonterminal G : (o -> o) -> o -> o owner A;\nstart S;\nrule S = G b end;\nrule G = \\f:o -> o. \\x:o. f x;\nrule G = \\f:o -> o. \\x:o. f (f x);\n",
    },
    SchemeSpec {
        name: "doubling_eager",
        order: 2,
        finite_positions: false,
        body: "nonterminal S : o owner E;\nnonterminal H : (o -> o) -> o -> o owner E;\nstart S;\nrule S = H a end;\nrule S = b end;\nrule H = \\f:o -> o. \\x:o. f (f x);\nrule H = \\f:o -> o. \\x:o. H (H f) x;\n",
    },
];

pub struct CatalogEntry {
    pub scheme_name: &'static str,
    pub nfa_name: &'static str,
    pub order: u32,
    pub scheme_text: String,
    pub nfa_text: &'static str,
}

fn scheme_by_name(name: &str) -> &'static SchemeSpec {
    SCHEMES.iter().find(|s| s.name == name).expect("scheme name")
}

fn nfa_by_name(name: &str) -> &'static str {
    NFAS.iter().find(|(n, _)| *n == name).expect("nfa name").1
}

fn entry(scheme: &str, nfa: &str) -> CatalogEntry {
    let s = scheme_by_name(scheme);
    CatalogEntry {
        scheme_name: s.name,
        nfa_name: NFAS.iter().find(|(n, _)| *n == nfa).expect("nfa name").0,
        order: s.order,
        scheme_text: format!("{PRELUDE}{}", s.body),
        nfa_text: nfa_by_name(nfa),
    }
}

/// Instances for the interpretation-transfer check: all three orders, paired
/// with automata whose closures keep both interpretations enumerable.
pub fn transfer_catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for s in [
        "loop_or_b_e",
        "loop_or_b_a",
        "loop_or_a_e",
        "free_choice_a",
        "alternating",
        "single_rule",
    ] {
        for n in ["only_b", "trailing_b"] {
            out.push(entry(s, n));
        }
    }
    for s in ["carrier_e", "carrier_a", "grower", "identity_or_a"] {
        for n in ["even_as", "b_star_a"] {
            out.push(entry(s, n));
        }
    }
    for s in ["doubling", "apply_once_or_twice", "doubling_eager"] {
        for n in ["only_b", "all_accepting"] {
            out.push(entry(s, n));
        }
    }
    out
}

/// Instances whose position graphs are finite: every order-0/1 scheme without
/// argument growth, crossed with the full automaton list.
pub fn oracle_catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for s in SCHEMES.iter().filter(|s| s.finite_positions) {
        for (n, _) in NFAS {
            out.push(entry(s.name, n));
        }
    }
    out
}

/// Instances for exhaustive strategy simulation: the finite-position schemes
/// plus order-2 pairings where adversary branching stays shallow.
pub fn strategy_catalog() -> Vec<CatalogEntry> {
    let mut out = oracle_catalog();
    out.push(entry("doubling", "only_b"));
    out.push(entry("doubling_eager", "only_b"));
    out
}
