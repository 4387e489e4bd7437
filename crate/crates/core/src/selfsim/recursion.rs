use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::error::{invalid, Error, Result};
use crate::treeauto::Portrait;

/// A generator or its formal inverse inside a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub symbol: usize,
    pub inverse: bool,
}

pub type Word = Vec<Letter>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub left: Word,
    pub right: Word,
    pub swap: bool,
}

/// Wreath-recursion definitions `s = (left, right)σ^swap` for a finite set of
/// symbols, plus named words in those symbols.
#[derive(Debug)]
pub struct RecursionSystem {
    symbols: Vec<String>,
    rules: Vec<Option<Rule>>,
    derived: Vec<(String, Word)>,
    unfolded: Mutex<Vec<Vec<Portrait>>>,
}

impl Clone for RecursionSystem {
    fn clone(&self) -> Self {
        Self {
            symbols: self.symbols.clone(),
            rules: self.rules.clone(),
            derived: self.derived.clone(),
            unfolded: Mutex::new(Vec::new()),
        }
    }
}

impl RecursionSystem {
    pub fn new(symbols: &[&str]) -> Self {
        Self {
            symbols: symbols.iter().map(|s| s.to_string()).collect(),
            rules: vec![None; symbols.len()],
            derived: Vec::new(),
            unfolded: Mutex::new(Vec::new()),
        }
    }

    /// Add `name = (left, right)` (with a root swap when `swap`). Words are
    /// whitespace-separated symbols, each optionally suffixed with `^-1`;
    /// `id` or the empty string denotes the empty word.
    pub fn with_rule(mut self, name: &str, left: &str, right: &str, swap: bool) -> Result<Self> {
        let idx = self.symbol_index(name)?;
        let rule = Rule {
            left: self.parse_word(left)?,
            right: self.parse_word(right)?,
            swap,
        };
        self.rules[idx] = Some(rule);
        self.unfolded.lock().unwrap().clear();
        Ok(self)
    }

    pub fn with_derived(mut self, name: &str, word: &str) -> Result<Self> {
        let w = self.parse_word(word)?;
        self.derived.push((name.to_string(), w));
        Ok(self)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn derived_names(&self) -> impl Iterator<Item = &str> {
        self.derived.iter().map(|(n, _)| n.as_str())
    }

    pub fn rule(&self, name: &str) -> Result<&Rule> {
        let idx = self.symbol_index(name)?;
        self.rules[idx]
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("symbol {name} has no rule")))
    }

    pub fn symbol_index(&self, name: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::InvalidArgument(format!("undeclared symbol {name:?}")))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut word = Vec::new();
        for token in text.split_whitespace() {
            if token == "id" {
                continue;
            }
            let (name, inverse) = match token.strip_suffix("^-1") {
                Some(base) => (base, true),
                None => (token, false),
            };
            word.push(Letter {
                symbol: self.symbol_index(name)?,
                inverse,
            });
        }
        Ok(word)
    }

    fn check_complete(&self) -> Result<()> {
        for (name, rule) in self.symbols.iter().zip(&self.rules) {
            if rule.is_none() {
                return invalid(format!("symbol {name} has no rule"));
            }
        }
        Ok(())
    }

    /// Unfoldings of every symbol at `level`, in declaration order.
    pub fn unfold_all(&self, level: usize) -> Result<Vec<Portrait>> {
        self.check_complete()?;
        let mut table = self.unfolded.lock().unwrap();
        if table.is_empty() {
            table.push(vec![Portrait::identity(0)?; self.symbols.len()]);
        }
        while table.len() <= level {
            let prev = table.last().unwrap().clone();
            let next = self
                .rules
                .iter()
                .map(|rule| {
                    let rule = rule.as_ref().unwrap();
                    let left = eval_word(&rule.left, &prev)?;
                    let right = eval_word(&rule.right, &prev)?;
                    Portrait::from_sections(&left, &right, rule.swap)
                })
                .collect::<Result<Vec<_>>>()?;
            table.push(next);
        }
        Ok(table[level].clone())
    }

    pub fn unfold_generator(&self, name: &str, level: usize) -> Result<Portrait> {
        let idx = self.symbol_index(name)?;
        Ok(self.unfold_all(level)?[idx])
    }

    pub fn evaluate(&self, word: &Word, level: usize) -> Result<Portrait> {
        let gens = self.unfold_all(level)?;
        eval_word(word, &gens)
    }

    /// Evaluate a symbol or a derived word by name.
    pub fn evaluate_named(&self, name: &str, level: usize) -> Result<Portrait> {
        if let Some((_, w)) = self.derived.iter().find(|(n, _)| n == name) {
            return self.evaluate(w, level);
        }
        self.unfold_generator(name, level)
    }

    pub fn evaluate_text(&self, word: &str, level: usize) -> Result<Portrait> {
        let w = self.parse_word(word)?;
        self.evaluate(&w, level)
    }

    pub fn format_word(&self, word: &Word) -> String {
        if word.is_empty() {
            return "id".into();
        }
        word.iter()
            .map(|l| {
                let s = &self.symbols[l.symbol];
                if l.inverse {
                    format!("{s}^-1")
                } else {
                    s.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn eval_word(word: &Word, gens: &[Portrait]) -> Result<Portrait> {
    let level = gens.first().map(Portrait::level).unwrap_or(0);
    let mut acc = Portrait::identity(level)?;
    let mut inverses: HashMap<usize, Portrait> = HashMap::new();
    for letter in word {
        let g = if letter.inverse {
            *inverses
                .entry(letter.symbol)
                .or_insert_with(|| gens[letter.symbol].invert())
        } else {
            gens[letter.symbol]
        };
        acc = acc.mul(&g);
    }
    Ok(acc)
}

impl fmt::Display for RecursionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, rule) in self.symbols.iter().zip(&self.rules) {
            match rule {
                Some(r) => writeln!(
                    f,
                    "{name} = ({}, {}){}",
                    self.format_word(&r.left),
                    self.format_word(&r.right),
                    if r.swap { "σ" } else { "" }
                )?,
                None => writeln!(f, "{name} = ?")?,
            }
        }
        for (name, w) in &self.derived {
            writeln!(f, "{name} := {}", self.format_word(w))?;
        }
        Ok(())
    }
}

/// The generators of the geometric group of `f(x) = 2/(x-1)^2`:
/// `a1 = σ`, `a2 = (a3^-1, a2^-1)σ`, `a3 = (a2, a3)`, together with
/// `γ1 = a2 a3^-1`, `γ2 = a3^-1 a2`, `β1 = a1 a3 a1 a3^-1` and
/// `β2 = a3^-1 a1 a3 a1`.
pub fn builtin_system_f() -> RecursionSystem {
    RecursionSystem::new(&["a1", "a2", "a3"])
        .with_rule("a1", "id", "id", true)
        .and_then(|s| s.with_rule("a2", "a3^-1", "a2^-1", true))
        .and_then(|s| s.with_rule("a3", "a2", "a3", false))
        .and_then(|s| s.with_derived("gamma1", "a2 a3^-1"))
        .and_then(|s| s.with_derived("gamma2", "a3^-1 a2"))
        .and_then(|s| s.with_derived("beta1", "a1 a3 a1 a3^-1"))
        .and_then(|s| s.with_derived("beta2", "a3^-1 a1 a3 a1"))
        .expect("builtin system is well formed")
}
