//! Lasso-shaped ultimately periodic words.
//!
//! A lasso `(u, v)` with `v` nonempty denotes the infinite word `u·v^ω`; its
//! length is `|u·v|`. Everything downstream (the model-checking oracle, the
//! prefix DFA, the QBF encoding) is phrased in terms of lassos over letters
//! that are subsets of a declared proposition set, represented here as
//! bitmasks.

use std::fmt;

/// A letter: a set of atomic propositions encoded as a bitmask. Bit `i`
/// corresponds to atom `i` of the owning [`Alphabet`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Letter(pub u32);

impl Letter {
    pub const EMPTY: Letter = Letter(0);

    pub fn contains(self, bit: usize) -> bool {
        self.0 >> bit & 1 == 1
    }

    pub fn with(self, bit: usize) -> Letter {
        Letter(self.0 | 1 << bit)
    }

    /// Keep only the low `bits` propositions.
    pub fn restrict(self, bits: usize) -> Letter {
        Letter(self.0 & ((1u32 << bits) - 1))
    }

    pub fn union(self, other: Letter) -> Letter {
        Letter(self.0 | other.0)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{:b}", self.0)
    }
}

/// An ordered set of atomic proposition names. The position of a name fixes
/// its bit in every [`Letter`] over this alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    atoms: Vec<String>,
}

impl Alphabet {
    pub fn new(atoms: Vec<String>) -> Alphabet {
        assert!(atoms.len() <= 20, "alphabet too wide");
        Alphabet { atoms }
    }

    pub fn from_names(names: &[&str]) -> Alphabet {
        Alphabet::new(names.iter().map(|s| s.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    /// Number of distinct letters, `2^|atoms|`.
    pub fn letter_count(&self) -> usize {
        1usize << self.atoms.len()
    }

    /// All letters in binary counting order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.letter_count() as u32).map(Letter)
    }

    pub fn letter_of(&self, names: &[&str]) -> Letter {
        let mut l = Letter::EMPTY;
        for n in names {
            let bit = self
                .index_of(n)
                .unwrap_or_else(|| panic!("atom {n} not in alphabet"));
            l = l.with(bit);
        }
        l
    }

    /// Render a letter as the brace-set of its true atoms, e.g. `{r,g}`.
    pub fn format_letter(&self, l: Letter) -> String {
        let names: Vec<&str> = self
            .atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| l.contains(*i))
            .map(|(_, a)| a.as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// Alphabet for the concatenation `self ++ other` (self keeps the low bits).
    pub fn concat(&self, other: &Alphabet) -> Alphabet {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Alphabet::new(atoms)
    }
}

/// The index-remapping function mapping a position `j` of the infinite word
/// `u·v^ω` to the base position holding its letter, for a lasso of length `k`
/// whose loop starts at `j_prime` (= `|u|`):
/// `j` itself when `j < k`, and `((j - k) mod (k - j_prime)) + j_prime`
/// otherwise.
pub fn delta(j: usize, k: usize, j_prime: usize) -> usize {
    assert!(j_prime < k, "loop start {j_prime} out of range for k={k}");
    if j < k {
        j
    } else {
        (j - k) % (k - j_prime) + j_prime
    }
}

/// A lasso word `u·v^ω` over some alphabet; `cycle` (= `v`) is nonempty.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lasso {
    stem: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl Lasso {
    pub fn new(stem: Vec<Letter>, cycle: Vec<Letter>) -> Lasso {
        assert!(!cycle.is_empty(), "lasso period must be nonempty");
        Lasso { stem, cycle }
    }

    /// Constant word `a^ω`.
    pub fn constant(letter: Letter) -> Lasso {
        Lasso::new(Vec::new(), vec![letter])
    }

    pub fn stem(&self) -> &[Letter] {
        &self.stem
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// `|u| + |v|`, the paper's lasso length k.
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    /// Index where the loop starts, `|u|`.
    pub fn loop_start(&self) -> usize {
        self.stem.len()
    }

    /// Letter at position `j` of the infinite word.
    pub fn at(&self, j: usize) -> Letter {
        let k = self.len();
        let p = delta(j, k, self.loop_start());
        if p < self.stem.len() {
            self.stem[p]
        } else {
            self.cycle[p - self.stem.len()]
        }
    }

    /// The base `u·v` as a single finite word.
    pub fn base(&self) -> Vec<Letter> {
        let mut b = self.stem.clone();
        b.extend_from_slice(&self.cycle);
        b
    }

    /// First `len` letters of `u·v^ω`.
    pub fn unroll(&self, len: usize) -> Vec<Letter> {
        (0..len).map(|j| self.at(j)).collect()
    }

    /// Projection onto the low `bits` propositions.
    pub fn project(&self, bits: usize) -> Lasso {
        Lasso {
            stem: self.stem.iter().map(|l| l.restrict(bits)).collect(),
            cycle: self.cycle.iter().map(|l| l.restrict(bits)).collect(),
        }
    }

    /// Exact equality of the denoted infinite words, decided by comparing
    /// unrollings of length `max(|u1|,|u2|) + lcm(|v1|,|v2|)`.
    pub fn word_eq(&self, other: &Lasso) -> bool {
        let bound = self.stem.len().max(other.stem.len()) + lcm(self.cycle.len(), other.cycle.len());
        (0..bound).all(|j| self.at(j) == other.at(j))
    }

    /// Render with an alphabet, e.g. `stem=[{r}] cycle=[{} {r,g}]`.
    pub fn display(&self, alphabet: &Alphabet) -> String {
        let fmt_word = |w: &[Letter]| {
            w.iter()
                .map(|&l| alphabet.format_letter(l))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!("stem=[{}] cycle=[{}]", fmt_word(&self.stem), fmt_word(&self.cycle))
    }
}

/// The 2k-unrolling of a length-k lasso. Two length-k lassos denote the same
/// infinite word exactly when their canonical words are equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalWord {
    pub k: usize,
    pub letters: Vec<Letter>,
}

impl CanonicalWord {
    pub fn of(lasso: &Lasso) -> CanonicalWord {
        let k = lasso.len();
        CanonicalWord {
            k,
            letters: lasso.unroll(2 * k),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// All lassos of length exactly `k` over `letters`, i.e. every split
/// `(|u|, u·v)` in order of ascending stem length, then base letters as a
/// base-|letters| counter.
pub fn all_lassos(letters: &[Letter], k: usize) -> Vec<Lasso> {
    assert!(k >= 1);
    let n = letters.len();
    let mut out = Vec::new();
    for stem_len in 0..k {
        let mut digits = vec![0usize; k];
        'words: loop {
            let word: Vec<Letter> = digits.iter().map(|&i| letters[i]).collect();
            out.push(Lasso::new(
                word[..stem_len].to_vec(),
                word[stem_len..].to_vec(),
            ));
            // advance the base-n counter; last digit is least significant
            let mut pos = k;
            loop {
                if pos == 0 {
                    break 'words;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < n {
                    continue 'words;
                }
                digits[pos] = 0;
            }
        }
    }
    out
}

/// One canonical representative per distinct infinite word in `L_k`(Σ^ω):
/// the lexicographically least `(|u|, u·v)` among the equal length-k lassos.
/// Deduplication is by exact word equality.
pub fn enumerate_k_words(letters: &[Letter], k: usize) -> Vec<Lasso> {
    let mut reps: Vec<Lasso> = Vec::new();
    for cand in all_lassos(letters, k) {
        if !reps.iter().any(|r| r.word_eq(&cand)) {
            reps.push(cand);
        }
    }
    reps
}

/// Whether some lasso of length exactly `k` denotes the same infinite word.
/// Any such lasso must have base `unroll(l, k)`, so it suffices to try every
/// split of that base.
pub fn representable_at(l: &Lasso, k: usize) -> bool {
    let base = l.unroll(k);
    (0..k).any(|split| {
        let cand = Lasso::new(base[..split].to_vec(), base[split..].to_vec());
        cand.word_eq(l)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn la(bits: u32) -> Letter {
        Letter(bits)
    }

    const A: Letter = Letter(0);
    const B: Letter = Letter(1);

    #[test]
    fn delta_examples() {
        assert_eq!(delta(1, 3, 0), 1);
        assert_eq!(delta(3, 3, 0), 0);
        assert_eq!(delta(5, 3, 1), 1);
    }

    #[test]
    #[should_panic]
    fn delta_rejects_bad_loop_start() {
        delta(0, 3, 3);
    }

    #[test]
    fn unroll_examples() {
        let l = Lasso::new(vec![], vec![A]);
        assert_eq!(l.unroll(3), vec![A, A, A]);
        let l = Lasso::new(vec![A], vec![B]);
        assert_eq!(l.unroll(4), vec![A, B, B, B]);
        let c = la(2);
        let l = Lasso::new(vec![A], vec![B, c]);
        assert_eq!(l.unroll(5), vec![A, B, c, B, c]);
    }

    #[test]
    fn word_eq_examples() {
        // a^ω is induced by (a, a) and (ε, aa)
        let l1 = Lasso::new(vec![], vec![A, A]);
        let l2 = Lasso::new(vec![A], vec![A]);
        assert!(l1.word_eq(&l2));

        let l1 = Lasso::new(vec![], vec![A, B]);
        let l2 = Lasso::new(vec![], vec![B, A]);
        assert!(!l1.word_eq(&l2));

        // a(ba)^ω = (ab)(ab)^ω = abab...
        let l1 = Lasso::new(vec![A], vec![B, A]);
        let l2 = Lasso::new(vec![A, B], vec![A, B]);
        assert!(l1.word_eq(&l2));
    }

    #[test]
    fn enumerate_counts() {
        let two = [A, B];
        assert_eq!(enumerate_k_words(&two, 1).len(), 2);
        assert_eq!(enumerate_k_words(&two, 2).len(), 6);
        assert_eq!(enumerate_k_words(&two, 3).len(), 18);
        let four: Vec<Letter> = (0..4).map(Letter).collect();
        assert_eq!(enumerate_k_words(&four, 1).len(), 4);
    }

    #[test]
    fn enumerate_bounds() {
        let two = [A, B];
        for k in 1..=5 {
            let words = enumerate_k_words(&two, k);
            let count = words.len();
            assert!(count <= k * 2usize.pow(k as u32));
            assert!(count >= 2usize.pow(k as u32));
            // stable across runs: recompute
            assert_eq!(enumerate_k_words(&two, k).len(), count);
        }
    }

    #[test]
    fn representable_examples() {
        assert!(representable_at(&Lasso::new(vec![], vec![A]), 3));
        assert!(!representable_at(&Lasso::new(vec![], vec![A, B]), 1));
        assert!(representable_at(&Lasso::new(vec![A], vec![B]), 2));
    }

    #[test]
    fn delta_matches_unroll() {
        // Δ-correctness: unroll(l, 5k)[j] = base[Δ(j, k, |u|)]
        let two = [A, B];
        for k in 1..=5 {
            for l in all_lassos(&two, k) {
                let base = l.base();
                let unrolled = l.unroll(5 * k);
                for (j, &x) in unrolled.iter().enumerate() {
                    assert_eq!(x, base[delta(j, k, l.loop_start())]);
                }
            }
        }
    }

    #[test]
    fn monotone_representability() {
        // every length-k word stays representable at any k' in (k, k+3]
        let two = [A, B];
        for k in 1..=4 {
            for w in enumerate_k_words(&two, k) {
                for kp in k + 1..=k + 3 {
                    assert!(representable_at(&w, kp), "k={k} k'={kp} {w:?}");
                }
            }
        }
    }

    #[test]
    fn canonical_word_soundness() {
        // equal 2k-unrollings ⇔ word_eq, for same-length lassos
        let two = [A, B];
        for k in 1..=5 {
            let lassos = all_lassos(&two, k);
            for l1 in &lassos {
                for l2 in &lassos {
                    assert_eq!(
                        CanonicalWord::of(l1) == CanonicalWord::of(l2),
                        l1.word_eq(l2),
                        "{l1:?} vs {l2:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn alphabet_formatting() {
        let alpha = Alphabet::from_names(&["r", "g"]);
        assert_eq!(alpha.format_letter(Letter(0)), "{}");
        assert_eq!(alpha.format_letter(Letter(3)), "{r,g}");
        assert_eq!(alpha.letter_of(&["g"]), Letter(2));
    }
}
