//! Finite and omega automata used on the oracle side: the prefix DFA for
//! the language of extendable input prefixes, DFA minimization, and
//! deterministic parity automata with the lasso-language product lift.

use std::collections::HashMap;
use std::error::Error;
use std::fmt;

use crate::lasso::{Alphabet, Lasso, Letter};

/// A tracker cell: either dead (`-`) or a 1-based position in the stored word.
type Tracker = Option<u8>;

/// State of the prefix DFA: the first k letters read (padded with `#` while
/// shorter), plus one tracker per candidate loop start.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct PrefixState {
    /// `None` encodes the `#` padding.
    word: Vec<Option<Letter>>,
    trackers: Vec<Tracker>,
}

impl PrefixState {
    fn accepting(&self) -> bool {
        self.trackers.iter().any(|t| t.is_some())
    }
}

/// Deterministic finite automaton accepting exactly the finite words that
/// extend to some infinite word whose input projection is representable by a
/// lasso of length `k`. Only reachable states are materialized.
pub struct PrefixDfa {
    pub k: usize,
    alphabet: Alphabet,
    states: Vec<PrefixState>,
    trans: Vec<Vec<u32>>,
    accepting: Vec<bool>,
}

/// Forward exploration from `(#^k, (1,2,…,k))`, applying the tracker update
/// cases verbatim:
/// dead if the stored letter mismatches or the tracker is dead, advance while
/// inside the word, and wrap to the tracker's own index at the end.
pub fn build_prefix_dfa(alphabet: &Alphabet, k: usize) -> PrefixDfa {
    assert!(k >= 1, "lasso bound must be positive");
    assert!(!alphabet.is_empty(), "need at least one input proposition");
    let letters: Vec<Letter> = alphabet.letters().collect();

    let initial = PrefixState {
        word: vec![None; k],
        trackers: (1..=k as u8).map(Some).collect(),
    };

    let mut index: HashMap<PrefixState, u32> = HashMap::new();
    let mut states = vec![initial.clone()];
    index.insert(initial, 0);
    let mut trans: Vec<Vec<u32>> = Vec::new();
    let mut frontier = 0usize;

    while frontier < states.len() {
        let state = states[frontier].clone();
        let mut row = Vec::with_capacity(letters.len());
        for &a in &letters {
            let succ = step(&state, a, k);
            let id = match index.get(&succ) {
                Some(&id) => id,
                None => {
                    let id = states.len() as u32;
                    states.push(succ.clone());
                    index.insert(succ, id);
                    id
                }
            };
            row.push(id);
        }
        trans.push(row);
        frontier += 1;
    }

    let accepting = states.iter().map(|s| s.accepting()).collect();
    PrefixDfa {
        k,
        alphabet: alphabet.clone(),
        states,
        trans,
        accepting,
    }
}

fn step(state: &PrefixState, a: Letter, k: usize) -> PrefixState {
    if let Some(m) = state.word.iter().position(|c| c.is_none()) {
        // still filling the stored word: (w·α·#^{m-1}, t)
        let mut word = state.word.clone();
        word[m] = Some(a);
        return PrefixState {
            word,
            trackers: state.trackers.clone(),
        };
    }
    // full word: update each tracker
    let w = |i: u8| state.word[i as usize - 1].unwrap();
    let trackers = state
        .trackers
        .iter()
        .enumerate()
        .map(|(j0, t)| match *t {
            None => None,
            Some(i) if w(i) != a => None,
            Some(i) if (i as usize) < k => Some(i + 1),
            Some(_) => Some(j0 as u8 + 1), // i = k and w(i) = α: wrap to j
        })
        .collect();
    PrefixState {
        word: state.word.clone(),
        trackers,
    }
}

impl PrefixDfa {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Standard DFA acceptance; the empty word is accepted.
    pub fn accepts(&self, word: &[Letter]) -> bool {
        let mut q = 0u32;
        for &a in word {
            q = self.trans[q as usize][a.0 as usize];
        }
        self.accepting[q as usize]
    }

    /// Successor state id, for product constructions.
    fn step_id(&self, q: u32, a: Letter) -> u32 {
        self.trans[q as usize][a.0 as usize]
    }

    pub fn is_accepting_state(&self, q: u32) -> bool {
        self.accepting[q as usize]
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph prefix_dfa {\n  rankdir=LR;\n");
        for (i, s) in self.states.iter().enumerate() {
            let word: Vec<String> = s
                .word
                .iter()
                .map(|c| match c {
                    None => "#".to_string(),
                    Some(l) => self.alphabet.format_letter(*l),
                })
                .collect();
            let trackers: Vec<String> = s
                .trackers
                .iter()
                .map(|t| match t {
                    None => "-".to_string(),
                    Some(i) => i.to_string(),
                })
                .collect();
            let shape = if self.accepting[i] {
                "doublecircle"
            } else {
                "circle"
            };
            out.push_str(&format!(
                "  q{} [shape={}, label=\"{}|({})\"];\n",
                i,
                shape,
                word.join(""),
                trackers.join(",")
            ));
        }
        for (i, row) in self.trans.iter().enumerate() {
            for (a, &succ) in row.iter().enumerate() {
                out.push_str(&format!(
                    "  q{} -> q{} [label=\"{}\"];\n",
                    i,
                    succ,
                    self.alphabet.format_letter(Letter(a as u32))
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// A plain total DFA, the result of minimization.
pub struct Dfa {
    pub n_letters: usize,
    pub trans: Vec<Vec<u32>>,
    pub accepting: Vec<bool>,
}

impl Dfa {
    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        let mut q = 0u32;
        for &a in word {
            q = self.trans[q as usize][a.0 as usize];
        }
        self.accepting[q as usize]
    }
}

/// Language-preserving minimization by Moore partition refinement: start from
/// the accepting/rejecting split and refine by successor-class signatures
/// until stable, then collapse classes. Unreachable states never existed
/// (the construction is reachable-only).
pub fn minimize_dfa(dfa: &PrefixDfa) -> Dfa {
    let n = dfa.states.len();
    let n_letters = dfa.alphabet.letter_count();
    let mut class: Vec<u32> = dfa.accepting.iter().map(|&a| a as u32).collect();
    loop {
        let mut sig_index: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        let mut next: Vec<u32> = Vec::with_capacity(n);
        for q in 0..n {
            let sig: Vec<u32> = (0..n_letters)
                .map(|a| class[dfa.trans[q][a] as usize])
                .collect();
            let key = (class[q], sig);
            let fresh = sig_index.len() as u32;
            let id = *sig_index.entry(key).or_insert(fresh);
            next.push(id);
        }
        if next == class {
            break;
        }
        class = next;
    }

    // representative order: class of the initial state becomes state 0
    let class_count = *class.iter().max().unwrap() as usize + 1;
    let mut remap = vec![u32::MAX; class_count];
    let mut order = 0u32;
    // walk states in BFS id order so numbering is deterministic
    let mut pending = vec![class[0]];
    remap[class[0] as usize] = 0;
    order += 1;
    while let Some(c) = pending.pop() {
        for q in 0..n {
            if class[q] != c {
                continue;
            }
            for a in 0..n_letters {
                let sc = class[dfa.trans[q][a] as usize];
                if remap[sc as usize] == u32::MAX {
                    remap[sc as usize] = order;
                    order += 1;
                    pending.push(sc);
                }
            }
        }
    }

    let mut trans = vec![vec![0u32; n_letters]; order as usize];
    let mut accepting = vec![false; order as usize];
    for q in 0..n {
        let c = remap[class[q] as usize] as usize;
        accepting[c] = dfa.accepting[q];
        for a in 0..n_letters {
            trans[c][a] = remap[class[dfa.trans[q][a] as usize] as usize];
        }
    }
    Dfa {
        n_letters,
        trans,
        accepting,
    }
}

/// Positive Boolean combination of states, the general transition shape of
/// an alternating automaton. The operations below only handle the
/// deterministic case (a single state).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PosBool {
    State(u32),
    And(Vec<PosBool>),
    Or(Vec<PosBool>),
}

impl PosBool {
    fn single_state(&self) -> Option<u32> {
        match self {
            PosBool::State(q) => Some(*q),
            _ => None,
        }
    }
}

/// Parity automaton: accepts when the highest color occurring infinitely
/// often along the run is even.
pub struct ParityAutomaton {
    pub n_letters: usize,
    pub colors: Vec<u32>,
    pub initial: Vec<u32>,
    /// trans[state][letter]
    pub trans: Vec<Vec<PosBool>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutomataError {
    Nondeterministic,
}

impl fmt::Display for AutomataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutomataError::Nondeterministic => {
                write!(f, "operation requires a deterministic parity automaton")
            }
        }
    }
}

impl Error for AutomataError {}

impl ParityAutomaton {
    /// Single-state automaton with the given color on every letter.
    pub fn single_state(n_letters: usize, color: u32) -> ParityAutomaton {
        ParityAutomaton {
            n_letters,
            colors: vec![color],
            initial: vec![0],
            trans: vec![vec![PosBool::State(0); n_letters]],
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1
            && self
                .trans
                .iter()
                .all(|row| row.iter().all(|t| t.single_state().is_some()))
    }

    pub fn state_count(&self) -> usize {
        self.colors.len()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph parity {\n  rankdir=LR;\n");
        for (i, &c) in self.colors.iter().enumerate() {
            let shape = if c % 2 == 0 { "doublecircle" } else { "circle" };
            out.push_str(&format!(
                "  q{i} [shape={shape}, label=\"q{i}:{c}\"];\n"
            ));
        }
        for (i, row) in self.trans.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                if let Some(succ) = t.single_state() {
                    out.push_str(&format!("  q{i} -> q{succ} [label=\"{a}\"];\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Product of a deterministic parity automaton over trace letters with the
/// prefix DFA running on the input projection (the low `input_bits` of each
/// letter). States keep the parity color while the DFA component is
/// accepting and are recolored to 0 (accepting) once it leaves — words whose
/// input projection is not lasso-representable at `k` are accepted outright.
pub fn lift_parity(
    a: &ParityAutomaton,
    dfa: &PrefixDfa,
    input_bits: usize,
) -> Result<ParityAutomaton, AutomataError> {
    if !a.is_deterministic() {
        return Err(AutomataError::Nondeterministic);
    }
    let n_letters = a.n_letters;
    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pairs: Vec<(u32, u32)> = vec![(a.initial[0], 0)];
    index.insert(pairs[0], 0);
    let mut trans: Vec<Vec<PosBool>> = Vec::new();
    let mut frontier = 0usize;
    while frontier < pairs.len() {
        let (q, qh) = pairs[frontier];
        let mut row = Vec::with_capacity(n_letters);
        for letter in 0..n_letters as u32 {
            let qs = a.trans[q as usize][letter as usize]
                .single_state()
                .expect("checked deterministic");
            let qhs = dfa.step_id(qh, Letter(letter).restrict(input_bits));
            let pair = (qs, qhs);
            let id = match index.get(&pair) {
                Some(&id) => id,
                None => {
                    let id = pairs.len() as u32;
                    pairs.push(pair);
                    index.insert(pair, id);
                    id
                }
            };
            row.push(PosBool::State(id));
        }
        trans.push(row);
        frontier += 1;
    }
    let colors = pairs
        .iter()
        .map(|&(q, qh)| {
            if dfa.is_accepting_state(qh) {
                a.colors[q as usize]
            } else {
                0
            }
        })
        .collect();
    Ok(ParityAutomaton {
        n_letters,
        colors,
        initial: vec![0],
        trans,
    })
}

/// Run a deterministic parity automaton on a lasso word: follow the run until
/// an (automaton state, lasso base position) pair repeats and check that the
/// highest color on that cycle is even.
pub fn parity_accepts_lasso(a: &ParityAutomaton, trace: &Lasso) -> Result<bool, AutomataError> {
    if !a.is_deterministic() {
        return Err(AutomataError::Nondeterministic);
    }
    let len = trace.len();
    let lp = trace.loop_start();
    let mut seen: HashMap<(u32, usize), usize> = HashMap::new();
    let mut run: Vec<u32> = Vec::new();
    let mut q = a.initial[0];
    let mut pos = 0usize;
    loop {
        if let Some(&first) = seen.get(&(q, pos)) {
            let max_color = run[first..]
                .iter()
                .map(|&s| a.colors[s as usize])
                .max()
                .expect("cycle is nonempty");
            return Ok(max_color % 2 == 0);
        }
        seen.insert((q, pos), run.len());
        run.push(q);
        q = a.trans[q as usize][trace.at(pos).0 as usize]
            .single_state()
            .expect("checked deterministic");
        pos = if pos + 1 < len { pos + 1 } else { lp };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso::{all_lassos, enumerate_k_words, representable_at};

    fn binary() -> Alphabet {
        Alphabet::from_names(&["r"])
    }

    const A: Letter = Letter(1); // {r}
    const B: Letter = Letter(0); // {}

    #[test]
    fn k1_examples() {
        let dfa = build_prefix_dfa(&binary(), 1);
        assert!(dfa.accepts(&[A, A, A]));
        assert!(!dfa.accepts(&[A, B]));
    }

    #[test]
    fn accepts_short_words() {
        for k in 1..=4 {
            let dfa = build_prefix_dfa(&binary(), k);
            for len in 0..=k {
                for w in words_of_len(2, len) {
                    assert!(dfa.accepts(&w), "k={k} len={len}");
                }
            }
        }
    }

    #[test]
    fn k2_examples() {
        let dfa = build_prefix_dfa(&binary(), 2);
        assert!(dfa.accepts(&[A, B, A, B, A]));
        assert!(!dfa.accepts(&[A, B, B, A]));
    }

    fn words_of_len(n_letters: u32, len: usize) -> Vec<Vec<Letter>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..n_letters).map(move |a| {
                        let mut w2 = w.clone();
                        w2.push(Letter(a));
                        w2
                    })
                })
                .collect();
        }
        out
    }

    /// Brute-force prefix language: prefixes of unrollings of all length-k lassos.
    fn brute_prefixes(n_letters: u32, k: usize, max_len: usize) -> std::collections::HashSet<Vec<Letter>> {
        let letters: Vec<Letter> = (0..n_letters).map(Letter).collect();
        let mut set = std::collections::HashSet::new();
        for l in all_lassos(&letters, k) {
            let u = l.unroll(max_len);
            for end in 0..=max_len {
                set.insert(u[..end].to_vec());
            }
        }
        set
    }

    #[test]
    fn agrees_with_brute_force() {
        for bits in 1..=2usize {
            let alpha = if bits == 1 {
                binary()
            } else {
                Alphabet::from_names(&["r", "s"])
            };
            for k in 1..=3 {
                let dfa = build_prefix_dfa(&alpha, k);
                let max_len = 2 * k + 2;
                let brute = brute_prefixes(alpha.letter_count() as u32, k, max_len);
                for len in 0..=max_len {
                    for w in words_of_len(alpha.letter_count() as u32, len) {
                        assert_eq!(
                            dfa.accepts(&w),
                            brute.contains(&w),
                            "bits={bits} k={k} w={w:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn rejecting_sink_is_closed() {
        let dfa = build_prefix_dfa(&binary(), 3);
        for (i, s) in dfa.states.iter().enumerate() {
            if s.word.iter().all(|c| c.is_some()) && !s.accepting() {
                for &succ in &dfa.trans[i] {
                    assert!(!dfa.accepting[succ as usize]);
                }
            }
        }
    }

    #[test]
    fn minimize_preserves_language() {
        let dfa = build_prefix_dfa(&binary(), 2);
        let min = minimize_dfa(&dfa);
        for len in 0..=8 {
            for w in words_of_len(2, len) {
                assert_eq!(dfa.accepts(&w), min.accepts(&w), "{w:?}");
            }
        }
        assert!(min.state_count() <= dfa.state_count());
    }

    #[test]
    fn minimized_size_lower_bound() {
        assert!(minimize_dfa(&build_prefix_dfa(&binary(), 3)).state_count() >= 4);
        assert!(minimize_dfa(&build_prefix_dfa(&binary(), 4)).state_count() >= 8);
    }

    #[test]
    fn lift_accept_all_and_none() {
        let alpha = Alphabet::from_names(&["r", "g"]);
        let dfa = build_prefix_dfa(&binary(), 2);
        let accept_all = ParityAutomaton::single_state(alpha.letter_count(), 2);
        let accept_none = ParityAutomaton::single_state(alpha.letter_count(), 1);
        let lift_all = lift_parity(&accept_all, &dfa, 1).unwrap();
        let lift_none = lift_parity(&accept_none, &dfa, 1).unwrap();

        let letters: Vec<Letter> = alpha.letters().collect();
        for len in 1..=4usize {
            for l in all_lassos(&letters, len) {
                assert!(parity_accepts_lasso(&lift_all, &l).unwrap(), "{l:?}");
                let rep = representable_at(&l.project(1), 2);
                assert_eq!(
                    parity_accepts_lasso(&lift_none, &l).unwrap(),
                    !rep,
                    "{l:?}"
                );
            }
        }
    }

    #[test]
    fn lift_language_equation() {
        // product acceptance = (representable ∧ base accepts) ∨ ¬representable
        let alpha = Alphabet::from_names(&["r", "g"]);
        let k = 2;
        let dfa = build_prefix_dfa(&binary(), k);
        // 2-state automaton: toggles on {r}-letters, colors 1 and 2
        let n_letters = alpha.letter_count();
        let base = ParityAutomaton {
            n_letters,
            colors: vec![1, 2],
            initial: vec![0],
            trans: (0..2)
                .map(|q| {
                    (0..n_letters as u32)
                        .map(|a| {
                            if Letter(a).contains(0) {
                                PosBool::State(1 - q)
                            } else {
                                PosBool::State(q)
                            }
                        })
                        .collect()
                })
                .collect(),
        };
        let lifted = lift_parity(&base, &dfa, 1).unwrap();
        let letters: Vec<Letter> = alpha.letters().collect();
        for len in 1..=k + 1 {
            for l in all_lassos(&letters, len) {
                let rep = representable_at(&l.project(1), k);
                let base_acc = parity_accepts_lasso(&base, &l).unwrap();
                let expect = (rep && base_acc) || !rep;
                assert_eq!(parity_accepts_lasso(&lifted, &l).unwrap(), expect, "{l:?}");
            }
        }
    }

    #[test]
    fn parity_simple_cases() {
        let accept_all = ParityAutomaton::single_state(2, 2);
        let word = Lasso::new(vec![B], vec![A, B]);
        assert!(parity_accepts_lasso(&accept_all, &word).unwrap());
        let reject_all = ParityAutomaton::single_state(2, 1);
        assert!(!parity_accepts_lasso(&reject_all, &word).unwrap());
    }

    #[test]
    fn nondeterministic_rejected() {
        let mut a = ParityAutomaton::single_state(2, 2);
        a.trans[0][0] = PosBool::Or(vec![PosBool::State(0), PosBool::State(0)]);
        assert_eq!(
            parity_accepts_lasso(&a, &Lasso::constant(B)).unwrap_err(),
            AutomataError::Nondeterministic
        );
        let dfa = build_prefix_dfa(&binary(), 1);
        assert!(lift_parity(&a, &dfa, 1).is_err());
    }

    #[test]
    fn enumerate_words_matches_dfa_on_bases() {
        // base words u·v of canonical k-words are accepted
        let dfa = build_prefix_dfa(&binary(), 3);
        let letters: Vec<Letter> = binary().letters().collect();
        for w in enumerate_k_words(&letters, 3) {
            assert!(dfa.accepts(&w.unroll(7)));
        }
    }

    #[test]
    fn dot_export_mentions_states() {
        let dfa = build_prefix_dfa(&binary(), 1);
        let dot = dfa.to_dot();
        assert!(dot.contains("doublecircle"));
        assert!(dot.starts_with("digraph"));
    }
}
