use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ParseError, WordError};
use crate::words::{cyclic_reduce, generator_of, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSymbol {
    pub id: usize,
    pub name: String,
}

/// Generators and relators. Relators are kept cyclically reduced and
/// non-empty; the list may be empty (free group).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        relators: impl IntoIterator<Item = Word>,
    ) -> Result<Self, ParseError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(ParseError::DuplicateGenerator(n.clone()));
            }
        }
        let mut p = Presentation { names, relators: Vec::new() };
        for r in relators {
            p.push_relator(r).map_err(|e| match e {
                WordError::UnknownGenerator { letter, .. } => ParseError::UndeclaredGenerator {
                    name: format!("#{letter}"),
                    line: 0,
                    column: 0,
                },
            })?;
        }
        Ok(p)
    }

    /// Presentation on generators named `prefix1, prefix2, ...`.
    pub fn with_rank(prefix: &str, ngens: usize, relators: impl IntoIterator<Item = Word>) -> Self {
        let names: Vec<String> = (1..=ngens).map(|i| format!("{prefix}{i}")).collect();
        Self::new(names, relators).expect("relators must fit the rank")
    }

    /// Free group of the given rank.
    pub fn free(ngens: usize) -> Self {
        Self::with_rank("f", ngens, [])
    }

    /// Appends a relator after cyclic reduction. Trivial relators are dropped.
    pub fn push_relator(&mut self, r: Word) -> Result<(), WordError> {
        for (pos, &l) in r.letters().iter().enumerate() {
            if generator_of(l) >= self.names.len() {
                return Err(WordError::UnknownGenerator { letter: l, position: pos });
            }
        }
        let (core, _) = cyclic_reduce(&r);
        if !core.is_empty() {
            self.relators.push(core);
        }
        Ok(())
    }

    /// Copy with extra relators appended: the quotient by their normal closure.
    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Result<Self, WordError> {
        let mut p = self.clone();
        for r in extra {
            p.push_relator(r)?;
        }
        Ok(p)
    }

    pub fn ngens(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> impl Iterator<Item = GeneratorSymbol> + '_ {
        self.names.iter().enumerate().map(|(id, name)| GeneratorSymbol { id, name: name.clone() })
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Generator `name` as a word; panics on unknown names.
    pub fn gen(&self, name: &str) -> Word {
        Word::generator(self.generator_index(name).unwrap_or_else(|| panic!("no generator {name}")))
    }

    /// Renders a word with the power notation of the presentation grammar.
    pub fn format_word(&self, w: &Word) -> String {
        format_letters(&self.names, w.letters())
    }

    /// Single-line `<a,b | r1, r2>` form.
    pub fn to_bracket_string(&self) -> String {
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_word(r)).collect();
        format!("<{} | {}>", self.names.join(","), rels.join(", "))
    }

    /// `.pres` file contents.
    pub fn to_pres_string(&self) -> String {
        let mut s = format!("gens: {}\n", self.names.join(" "));
        for r in &self.relators {
            s.push_str("rel: ");
            s.push_str(&self.format_word(r));
            s.push('\n');
        }
        s
    }

    /// SHA-256 of the `.pres` rendering, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_pres_string().as_bytes()))
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_bracket_string())
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_bracket_string())
    }
}

pub(crate) fn format_letters(names: &[String], letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut j = i;
        while j < letters.len() && letters[j] == l {
            j += 1;
        }
        let run = (j - i) as i64 * l.signum() as i64;
        let name = &names[generator_of(l)];
        if run == 1 {
            parts.push(name.clone());
        } else {
            parts.push(format!("{name}^{run}"));
        }
        i = j;
    }
    parts.join("*")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relators_are_cyclically_reduced() {
        let r = Word::reduce([-1, 2, 2, 1]);
        let p = Presentation::new(["u", "w"], [r]).unwrap();
        assert_eq!(p.relators()[0].letters(), &[2, 2]);
    }

    #[test]
    fn trivial_relators_dropped() {
        let p = Presentation::new(["x"], [Word::reduce([1, -1])]).unwrap();
        assert!(p.relators().is_empty());
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(Presentation::new(["x", "x"], []).is_err());
    }

    #[test]
    fn formatting_compresses_runs() {
        let p = Presentation::new(["u", "w"], []).unwrap();
        assert_eq!(p.format_word(&Word::reduce([1, 1, 1, -2, -2])), "u^3*w^-2");
        assert_eq!(p.format_word(&Word::identity()), "1");
    }
}
