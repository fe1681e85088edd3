//! Transition systems, trace generation, environment composition, and the
//! exhaustive oracles: lasso-precise model checking, full system enumeration,
//! brute-force synthesis and exact satisfaction rates.

use std::error::Error;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lasso::{enumerate_k_words, Alphabet, Lasso, Letter};
use crate::ltl::{eval_on_lasso, EvalError, Ltl};
use crate::specfile::SpecFile;

/// Deterministic 2^O-labeled 2^I-transition system. State 0 is initial;
/// `trans[state][input_letter]` is total by construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransitionSystem {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Output letter per state (mask over the output atoms alone).
    pub labels: Vec<Letter>,
    pub trans: Vec<Vec<u32>>,
}

impl TransitionSystem {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn input_letter_count(&self) -> usize {
        1usize << self.inputs.len()
    }

    /// Trace letter for a state under an input: inputs in the low bits,
    /// the state's output label above them.
    fn trace_letter(&self, state: u32, input: Letter) -> Letter {
        Letter(self.labels[state as usize].0 << self.inputs.len()).union(input)
    }

    /// Run the system on `u·v^ω` until a (state, input base position) pair
    /// repeats; the induced trace is a lasso of length at most `n·k`.
    pub fn trace_on_input(&self, input: &Lasso) -> Lasso {
        let len = input.len();
        let lp = input.loop_start();
        // (state, base position) pairs repeat within n·len steps
        let mut seen: Vec<Vec<Option<u32>>> = vec![vec![None; len]; self.size()];
        let mut letters: Vec<Letter> = Vec::new();
        let mut state = 0u32;
        let mut pos = 0usize;
        loop {
            if let Some(first) = seen[state as usize][pos] {
                let stem = letters[..first as usize].to_vec();
                let cycle = letters[first as usize..].to_vec();
                return Lasso::new(stem, cycle);
            }
            seen[state as usize][pos] = Some(letters.len() as u32);
            let a = input.at(pos);
            letters.push(self.trace_letter(state, a));
            state = self.trans[state as usize][a.0 as usize];
            pos = if pos + 1 < len { pos + 1 } else { lp };
        }
    }

    /// First canonical length-k input word whose trace violates `phi`, if any.
    pub fn find_violation(&self, phi: &Ltl, k: usize) -> Result<Option<Lasso>, EvalError> {
        let input_alpha = Alphabet::new(self.inputs.clone());
        let trace_alpha = input_alpha.concat(&Alphabet::new(self.outputs.clone()));
        let letters: Vec<Letter> = input_alpha.letters().collect();
        for word in enumerate_k_words(&letters, k) {
            let trace = self.trace_on_input(&word);
            if !eval_on_lasso(phi, &trace, &trace_alpha)? {
                return Ok(Some(word));
            }
        }
        Ok(None)
    }

    /// Whether every trace on a k-lasso-representable input satisfies `phi`.
    pub fn models_lasso_precise(&self, phi: &Ltl, k: usize) -> Result<bool, EvalError> {
        Ok(self.find_violation(phi, k)?.is_none())
    }

    /// Exact fraction of canonical length-k input words whose trace
    /// satisfies `phi`.
    pub fn satisfaction_rate(&self, phi: &Ltl, k: usize) -> Result<Rate, EvalError> {
        let input_alpha = Alphabet::new(self.inputs.clone());
        let trace_alpha = input_alpha.concat(&Alphabet::new(self.outputs.clone()));
        let letters: Vec<Letter> = input_alpha.letters().collect();
        let words = enumerate_k_words(&letters, k);
        let total = words.len() as u64;
        let mut sat = 0u64;
        for word in &words {
            if eval_on_lasso(phi, &self.trace_on_input(word), &trace_alpha)? {
                sat += 1;
            }
        }
        Ok(Rate { sat, total })
    }

    pub fn to_dot(&self) -> String {
        let out_alpha = Alphabet::new(self.outputs.clone());
        let in_alpha = Alphabet::new(self.inputs.clone());
        let mut s = String::from("digraph system {\n  rankdir=LR;\n");
        for (i, &label) in self.labels.iter().enumerate() {
            s.push_str(&format!(
                "  t{} [shape={}, label=\"t{}|{}\"];\n",
                i,
                if i == 0 { "box" } else { "circle" },
                i,
                out_alpha.format_letter(label)
            ));
        }
        for (t, row) in self.trans.iter().enumerate() {
            for (a, &succ) in row.iter().enumerate() {
                s.push_str(&format!(
                    "  t{} -> t{} [label=\"{}\"];\n",
                    t,
                    succ,
                    in_alpha.format_letter(Letter(a as u32))
                ));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Exact rational in [0, 1]: satisfied canonical words over all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rate {
    pub sat: u64,
    pub total: u64,
}

impl Rate {
    pub fn as_f64(&self) -> f64 {
        self.sat as f64 / self.total as f64
    }

    pub fn is_one(&self) -> bool {
        self.sat == self.total
    }
}

impl PartialOrd for Rate {
    fn partial_cmp(&self, other: &Rate) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rate {
    fn cmp(&self, other: &Rate) -> std::cmp::Ordering {
        // compare sat/total by cross multiplication
        (self.sat as u128 * other.total as u128).cmp(&(other.sat as u128 * self.total as u128))
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.sat, self.total)
    }
}

/// JSON shape for systems, with labels as atom-name lists per state and
/// successors per (state, input letter in binary counting order).
#[derive(Serialize, Deserialize)]
struct SystemJson {
    states: usize,
    inputs: Vec<String>,
    outputs: Vec<String>,
    labels: Vec<Vec<String>>,
    trans: Vec<Vec<u32>>,
}

impl TransitionSystem {
    pub fn to_json(&self) -> String {
        let out_alpha = Alphabet::new(self.outputs.clone());
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                self.outputs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| l.contains(*i))
                    .map(|(_, a)| a.clone())
                    .collect()
            })
            .collect();
        let _ = out_alpha;
        serde_json::to_string_pretty(&SystemJson {
            states: self.size(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            labels,
            trans: self.trans.clone(),
        })
        .expect("system serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<TransitionSystem, Box<dyn Error>> {
        let j: SystemJson = serde_json::from_str(text)?;
        if j.labels.len() != j.states || j.trans.len() != j.states {
            return Err("state count does not match labels/trans".into());
        }
        let out_alpha = Alphabet::new(j.outputs.clone());
        let n_letters = 1usize << j.inputs.len();
        let mut labels = Vec::with_capacity(j.states);
        for row in &j.labels {
            let mut letter = Letter::EMPTY;
            for name in row {
                let bit = out_alpha
                    .index_of(name)
                    .ok_or_else(|| format!("unknown output atom '{name}'"))?;
                letter = letter.with(bit);
            }
            labels.push(letter);
        }
        for row in &j.trans {
            if row.len() != n_letters {
                return Err("transition row width must be 2^|inputs|".into());
            }
            for &s in row {
                if s as usize >= j.states {
                    return Err(format!("successor {s} out of range").into());
                }
            }
        }
        Ok(TransitionSystem {
            inputs: j.inputs,
            outputs: j.outputs,
            labels,
            trans: j.trans,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardExceeded {
    pub candidates: u128,
    pub ceiling: u64,
}

impl fmt::Display for GuardExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "candidate space of {} systems exceeds the resource ceiling {}",
            self.candidates, self.ceiling
        )
    }
}

impl Error for GuardExceeded {}

pub const DEFAULT_CANDIDATE_CEILING: u64 = 100_000_000;

/// Number of labeled deterministic systems of size `n`:
/// `n^(n·2^|I|) · 2^(n·|O|)`.
pub fn system_count(n: usize, n_inputs: usize, n_outputs: usize) -> u128 {
    let trans_slots = n as u32 * (1u32 << n_inputs);
    let mut count: u128 = 1;
    for _ in 0..trans_slots {
        count = count.saturating_mul(n as u128);
    }
    count.saturating_mul(1u128 << (n * n_outputs).min(127))
}

/// Canonical enumeration of every system of size `n` exactly once. Index 0
/// is the all-zero system; labels vary fastest (binary counter, state 0's
/// bits least significant), then successors in row-major (state, letter)
/// order as a base-n counter.
#[derive(Debug)]
pub struct SystemEnumerator {
    n: usize,
    inputs: Vec<String>,
    outputs: Vec<String>,
    count: u128,
}

impl SystemEnumerator {
    pub fn new(
        n: usize,
        inputs: &[String],
        outputs: &[String],
        ceiling: u64,
    ) -> Result<SystemEnumerator, GuardExceeded> {
        assert!(n >= 1);
        let count = system_count(n, inputs.len(), outputs.len());
        if count > ceiling as u128 {
            return Err(GuardExceeded {
                candidates: count,
                ceiling,
            });
        }
        Ok(SystemEnumerator {
            n,
            inputs: inputs.to_vec(),
            outputs: outputs.to_vec(),
            count,
        })
    }

    pub fn count(&self) -> u64 {
        self.count as u64
    }

    pub fn by_index(&self, index: u64) -> TransitionSystem {
        let n = self.n;
        let label_bits = n * self.outputs.len();
        let label_part = index & ((1u64 << label_bits) - 1).max(0);
        let mut trans_part = index >> label_bits;

        let labels = (0..n)
            .map(|t| {
                Letter(((label_part >> (t * self.outputs.len())) as u32)
                    & ((1u32 << self.outputs.len()) - 1))
            })
            .collect();

        let n_letters = 1usize << self.inputs.len();
        let mut trans = vec![vec![0u32; n_letters]; n];
        for t in 0..n {
            for a in 0..n_letters {
                trans[t][a] = (trans_part % n as u64) as u32;
                trans_part /= n as u64;
            }
        }
        TransitionSystem {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            labels,
            trans,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = TransitionSystem> + '_ {
        (0..self.count()).map(|i| self.by_index(i))
    }
}

/// First system in canonical order that is a k-lasso-precise implementation.
pub fn brute_force_synth(
    spec: &SpecFile,
    n: usize,
    k: usize,
    ceiling: u64,
) -> Result<Option<TransitionSystem>, GuardExceeded> {
    let en = SystemEnumerator::new(n, &spec.inputs, &spec.outputs, ceiling)?;
    let found = (0..en.count()).into_par_iter().find_first(|&i| {
        en.by_index(i)
            .models_lasso_precise(&spec.formula, k)
            .expect("spec atoms are declared")
    });
    Ok(found.map(|i| en.by_index(i)))
}

/// Exact maximum satisfaction rate over all systems of size `n`, with the
/// earliest maximizer in canonical order. Short-circuits on rate 1.
pub fn brute_force_max_rate(
    spec: &SpecFile,
    n: usize,
    k: usize,
    ceiling: u64,
) -> Result<(TransitionSystem, Rate), GuardExceeded> {
    let en = SystemEnumerator::new(n, &spec.inputs, &spec.outputs, ceiling)?;
    if let Some(i) = (0..en.count()).into_par_iter().find_first(|&i| {
        en.by_index(i)
            .models_lasso_precise(&spec.formula, k)
            .expect("spec atoms are declared")
    }) {
        let sys = en.by_index(i);
        let rate = sys.satisfaction_rate(&spec.formula, k).unwrap();
        debug_assert!(rate.is_one());
        return Ok((sys, rate));
    }
    let best = (0..en.count())
        .into_par_iter()
        .map(|i| {
            let rate = en
                .by_index(i)
                .satisfaction_rate(&spec.formula, k)
                .expect("spec atoms are declared");
            (rate, i)
        })
        .reduce(
            || (Rate { sat: 0, total: 1 }, u64::MAX),
            |a, b| {
                // highest rate wins; ties go to the smaller index
                match a.0.cmp(&b.0) {
                    std::cmp::Ordering::Greater => a,
                    std::cmp::Ordering::Less => b,
                    std::cmp::Ordering::Equal => {
                        if a.1 <= b.1 {
                            a
                        } else {
                            b
                        }
                    }
                }
            },
        );
    Ok((en.by_index(best.1), best.0))
}

/// Finite-state environment: a 2^I-labeled 2^O-transition system. The label
/// is the input it feeds the system; it advances on the system's output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Environment {
    /// Input letter emitted per state.
    pub labels: Vec<Letter>,
    /// trans[state][output_letter]
    pub trans: Vec<Vec<u32>>,
}

impl Environment {
    pub fn size(&self) -> usize {
        self.labels.len()
    }
}

/// All environments of size `n` for the given interface, in canonical order.
pub fn enumerate_environments(
    n: usize,
    n_inputs: usize,
    n_outputs: usize,
    ceiling: u64,
) -> Result<Vec<Environment>, GuardExceeded> {
    // structurally a system with the roles swapped
    let ins: Vec<String> = (0..n_outputs).map(|i| format!("o{i}")).collect();
    let outs: Vec<String> = (0..n_inputs).map(|i| format!("i{i}")).collect();
    let en = SystemEnumerator::new(n, &ins, &outs, ceiling)?;
    Ok(en
        .iter()
        .map(|s| Environment {
            labels: s.labels,
            trans: s.trans,
        })
        .collect())
}

/// Compose a system with an environment into its single trace lasso.
///
/// Stepping discipline: at step i the letter is `ι(s_i) ∪ o(t_i)`; the system
/// advances on the environment's current input, and the environment then
/// advances on the output of the system's next state.
pub fn compose_trace(sys: &TransitionSystem, env: &Environment) -> Lasso {
    let mut seen: Vec<Vec<Option<u32>>> = vec![vec![None; env.size()]; sys.size()];
    let mut letters: Vec<Letter> = Vec::new();
    let mut t = 0u32;
    let mut s = 0u32;
    loop {
        if let Some(first) = seen[t as usize][s as usize] {
            return Lasso::new(
                letters[..first as usize].to_vec(),
                letters[first as usize..].to_vec(),
            );
        }
        seen[t as usize][s as usize] = Some(letters.len() as u32);
        let input = env.labels[s as usize];
        letters.push(sys.trace_letter(t, input));
        let t_next = sys.trans[t as usize][input.0 as usize];
        s = env.trans[s as usize][sys.labels[t_next as usize].0 as usize];
        t = t_next;
    }
}

/// Whether the single trace of the closed composition satisfies `phi`.
pub fn check_under_env(
    sys: &TransitionSystem,
    env: &Environment,
    phi: &Ltl,
) -> Result<bool, EvalError> {
    let trace_alpha =
        Alphabet::new(sys.inputs.clone()).concat(&Alphabet::new(sys.outputs.clone()));
    eval_on_lasso(phi, &compose_trace(sys, env), &trace_alpha)
}
