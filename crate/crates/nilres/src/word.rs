use num_bigint::BigInt;
use num_traits::Zero;

/// A word in the generators: a sequence of letters x_i^e with 0-based
/// generator indices. Adjacent letters on the same generator are merged and
/// zero exponents dropped, but no other rewriting happens here.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<(usize, BigInt)>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn new(letters: Vec<(usize, BigInt)>) -> Self {
        let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(letters.len());
        for (g, e) in letters {
            if e.is_zero() {
                continue;
            }
            if let Some(last) = out.last_mut() {
                if last.0 == g {
                    last.1 += &e;
                    if last.1.is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            out.push((g, e));
        }
        Word { letters: out }
    }

    pub fn gen(g: usize, e: impl Into<BigInt>) -> Self {
        Word::new(vec![(g, e.into())])
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[(usize, BigInt)] {
        &self.letters
    }

    pub fn inverse(&self) -> Word {
        let mut letters: Vec<(usize, BigInt)> = self
            .letters
            .iter()
            .rev()
            .map(|(g, e)| (*g, -e.clone()))
            .collect();
        letters.retain(|(_, e)| !e.is_zero());
        Word { letters }
    }

    /// Smallest generator index appearing, if any.
    pub fn min_gen(&self) -> Option<usize> {
        self.letters.iter().map(|(g, _)| *g).min()
    }
}
