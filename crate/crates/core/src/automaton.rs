//! Nondeterministic finite automata over the scheme's letter alphabet.
//!
//! States are dense indices packed into a 32-bit set. The alphabet is fixed
//! at construction (it comes from the scheme, not from the transition table),
//! so a letter without transitions is a valid letter whose `pre` is empty.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use thiserror::Error;

pub const MAX_STATES: usize = 32;

/// Set of NFA states as a bitmask; state `i` is bit `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet(pub u32);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn singleton(state: usize) -> Self {
        StateSet(1 << state)
    }

    pub fn contains(self, state: usize) -> bool {
        self.0 & (1 << state) != 0
    }

    pub fn insert(&mut self, state: usize) {
        self.0 |= 1 << state;
    }

    pub fn union(self, other: StateSet) -> StateSet {
        StateSet(self.0 | other.0)
    }

    pub fn inter(self, other: StateSet) -> StateSet {
        StateSet(self.0 & other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_STATES).filter(move |&i| self.contains(i))
    }
}

/// Letter index into the alphabet shared with the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterId(pub u32);

impl LetterId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error)]
pub enum NfaError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("automaton has {0} states; at most {MAX_STATES} are supported")]
    TooManyStates(usize),
    #[error("duplicate state name {0}")]
    DuplicateState(String),
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("transition letter {0} is not in the alphabet")]
    UnknownLetter(String),
    #[error("missing `{0}` declaration")]
    MissingSection(&'static str),
}

/// Parsed automaton text, before the alphabet is fixed.
#[derive(Debug, Clone)]
pub struct RawNfa {
    pub states: Vec<String>,
    pub initial: String,
    pub finals: Vec<String>,
    pub transitions: Vec<(String, String, String)>,
}

#[derive(Debug)]
pub struct Nfa {
    state_names: Vec<String>,
    alphabet: Vec<String>,
    initial: usize,
    finals: StateSet,
    /// pre[letter][state] = states with a `letter` edge into `state`
    pre_mask: Vec<Vec<StateSet>>,
    /// post[letter][state] = states reached from `state` by `letter`
    post_mask: Vec<Vec<StateSet>>,
}

impl Nfa {
    /// Bind a parsed automaton to an alphabet. Transitions over letters not
    /// in the alphabet are rejected; letters without transitions are fine.
    pub fn bind(raw: &RawNfa, alphabet: &[String]) -> Result<Nfa, NfaError> {
        if raw.states.len() > MAX_STATES {
            return Err(NfaError::TooManyStates(raw.states.len()));
        }
        let mut index = HashMap::new();
        for (i, name) in raw.states.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(NfaError::DuplicateState(name.clone()));
            }
        }
        let state = |name: &String| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| NfaError::UnknownState(name.clone()))
        };
        let letter_index: HashMap<&str, usize> = alphabet
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();

        let initial = state(&raw.initial)?;
        let mut finals = StateSet::EMPTY;
        for f in &raw.finals {
            finals.insert(state(f)?);
        }
        let n = raw.states.len();
        let mut pre_mask = vec![vec![StateSet::EMPTY; n]; alphabet.len()];
        let mut post_mask = vec![vec![StateSet::EMPTY; n]; alphabet.len()];
        for (from, letter, to) in &raw.transitions {
            let Some(&l) = letter_index.get(letter.as_str()) else {
                return Err(NfaError::UnknownLetter(letter.clone()));
            };
            let (f, t) = (state(from)?, state(to)?);
            pre_mask[l][t].insert(f);
            post_mask[l][f].insert(t);
        }
        Ok(Nfa {
            state_names: raw.states.clone(),
            alphabet: alphabet.to_vec(),
            initial,
            finals,
            pre_mask,
            post_mask,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.state_names[state]
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn letter_name(&self, letter: LetterId) -> &str {
        &self.alphabet[letter.index()]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> StateSet {
        self.finals
    }

    /// States with a `letter` edge into some state of `set`.
    pub fn pre(&self, letter: LetterId, set: StateSet) -> StateSet {
        let masks = &self.pre_mask[letter.index()];
        set.iter().fold(StateSet::EMPTY, |acc, q| acc.union(masks[q]))
    }

    /// States reached from `set` by one `letter` edge.
    pub fn post(&self, letter: LetterId, set: StateSet) -> StateSet {
        let masks = &self.post_mask[letter.index()];
        set.iter().fold(StateSet::EMPTY, |acc, q| acc.union(masks[q]))
    }

    pub fn accepts(&self, word: &[LetterId]) -> bool {
        let mut cur = StateSet::singleton(self.initial);
        for &l in word {
            cur = self.post(l, cur);
        }
        !cur.inter(self.finals).is_empty()
    }

    /// States from which `word` can reach a final state: the fold of `pre`
    /// over the word, rightmost letter first, starting from the finals.
    pub fn acc_of_word(&self, word: &[LetterId]) -> StateSet {
        let mut cur = self.finals;
        for &l in word.iter().rev() {
            cur = self.pre(l, cur);
        }
        cur
    }

    /// Least family containing the finals and closed under `pre` for every
    /// letter of the alphabet. The empty set is an ordinary member when
    /// reachable. Each member keeps one witness word with that acceptance set.
    pub fn acc_closure(&self) -> AccClosure {
        let mut members = Vec::new();
        let mut witnesses = Vec::new();
        let mut index = HashMap::new();
        let mut queue = VecDeque::new();
        index.insert(self.finals, 0usize);
        members.push(self.finals);
        witnesses.push(Vec::new());
        queue.push_back(0usize);
        while let Some(i) = queue.pop_front() {
            let set = members[i];
            for l in 0..self.alphabet.len() {
                let p = self.pre(LetterId(l as u32), set);
                if !index.contains_key(&p) {
                    let mut w = Vec::with_capacity(witnesses[i].len() + 1);
                    w.push(LetterId(l as u32));
                    w.extend_from_slice(&witnesses[i]);
                    index.insert(p, members.len());
                    queue.push_back(members.len());
                    members.push(p);
                    witnesses.push(w);
                }
            }
        }
        AccClosure { members, witnesses, index }
    }

    pub fn render_state_set(&self, set: StateSet) -> String {
        let mut out = String::from("{");
        for (k, q) in set.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", self.state_names[q]);
        }
        out.push('}');
        out
    }
}

/// Backward-reachable acceptance sets with BFS witnesses.
#[derive(Debug)]
pub struct AccClosure {
    members: Vec<StateSet>,
    witnesses: Vec<Vec<LetterId>>,
    index: HashMap<StateSet, usize>,
}

impl AccClosure {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> StateSet {
        self.members[i]
    }

    pub fn members(&self) -> &[StateSet] {
        &self.members
    }

    pub fn witness(&self, i: usize) -> &[LetterId] {
        &self.witnesses[i]
    }

    pub fn position(&self, set: StateSet) -> Option<usize> {
        self.index.get(&set).copied()
    }
}

/// Parse the automaton surface syntax:
///
/// ```text
/// states q0 qf;
/// initial q0;
/// final qf;
/// trans q0 b qf;
/// ```
///
/// `#` starts a comment. `final` may list zero states; repeated `final` and
/// `trans` declarations accumulate.
pub fn parse_nfa(text: &str) -> Result<RawNfa, NfaError> {
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<String> = None;
    let mut finals: Vec<String> = Vec::new();
    let mut saw_final = false;
    let mut transitions = Vec::new();

    let mut tokens = tokenize(text)?;
    while !tokens.is_empty() {
        let (keyword, line, col) = tokens.remove(0);
        let mut item = Vec::new();
        loop {
            if tokens.is_empty() {
                return Err(NfaError::Syntax {
                    line,
                    col,
                    msg: format!("declaration `{keyword}` is missing `;`"),
                });
            }
            let (tok, _, _) = tokens.remove(0);
            if tok == ";" {
                break;
            }
            item.push(tok);
        }
        match keyword.as_str() {
            "states" => {
                if states.is_some() {
                    return Err(NfaError::Syntax { line, col, msg: "duplicate `states` declaration".into() });
                }
                if item.is_empty() {
                    return Err(NfaError::Syntax { line, col, msg: "`states` needs at least one state".into() });
                }
                states = Some(item);
            }
            "initial" => {
                if initial.is_some() {
                    return Err(NfaError::Syntax { line, col, msg: "duplicate `initial` declaration".into() });
                }
                if item.len() != 1 {
                    return Err(NfaError::Syntax { line, col, msg: "`initial` needs exactly one state".into() });
                }
                initial = Some(item.into_iter().next().unwrap());
            }
            "final" => {
                saw_final = true;
                finals.extend(item);
            }
            "trans" => {
                if item.len() != 3 {
                    return Err(NfaError::Syntax {
                        line,
                        col,
                        msg: "`trans` needs `from letter to`".into(),
                    });
                }
                let mut it = item.into_iter();
                transitions.push((it.next().unwrap(), it.next().unwrap(), it.next().unwrap()));
            }
            other => {
                return Err(NfaError::Syntax {
                    line,
                    col,
                    msg: format!("unknown declaration `{other}`"),
                });
            }
        }
    }

    let states = states.ok_or(NfaError::MissingSection("states"))?;
    let initial = initial.ok_or(NfaError::MissingSection("initial"))?;
    if !saw_final {
        return Err(NfaError::MissingSection("final"));
    }
    Ok(RawNfa { states, initial, finals, transitions })
}

fn tokenize(text: &str) -> Result<Vec<(String, usize, usize)>, NfaError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut chars = line.char_indices().peekable();
        while let Some(&(i, c)) = chars.peek() {
            let col = i + 1;
            if c.is_whitespace() {
                chars.next();
            } else if c == ';' {
                chars.next();
                out.push((";".to_string(), ln + 1, col));
            } else if c.is_alphanumeric() || c == '_' {
                let mut tok = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        tok.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((tok, ln + 1, col));
            } else {
                return Err(NfaError::Syntax {
                    line: ln + 1,
                    col,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(out)
}
