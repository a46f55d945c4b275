//! Shared inputs for unit tests across modules.

use crate::scheme::Instance;

/// Two-rule scheme over letters {a, b}: S chooses (owner E) between
/// `H a end` and `b end`; H (owner A) chooses between double application
/// and self-composition. Generates words from b·{a}* ∪ {} depending on
/// the players' choices.
pub const DOUBLING_SCHEME: &str = "\
terminal a : o -> o;
terminal b : o -> o;
terminal end : o;
nonterminal S : o owner E;
nonterminal H : (o -> o) -> o -> o owner A;
start S;
rule S = H a end;
rule S = b end;
rule H = \\f:(o -> o). \\x:o. f (f x);
rule H = \\f:(o -> o). \\x:o. H (H f) x;
";

/// Accepts exactly the single-letter word `b`.
pub const ONLY_B_NFA: &str = "\
states q0 qf;
initial q0;
final qf;
trans q0 b qf;
";

pub fn doubling_instance() -> Instance {
    Instance::parse(DOUBLING_SCHEME, ONLY_B_NFA).expect("fixture parses")
}
