//! Finite alphabets, words, and the marked product alphabets used when
//! compiling formulas with free variables.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of a symbol inside its alphabet.
pub type Letter = u32;

/// A word is a sequence of letter indices.
pub type Word = Vec<Letter>;

/// Serialized form of the left endmarker.
pub const LEFT_MARK: &str = "^";
/// Serialized form of the right endmarker.
pub const RIGHT_MARK: &str = "$";

#[derive(Debug)]
struct Inner {
    symbols: Vec<String>,
    index: HashMap<String, Letter>,
    marked: Option<(Alphabet, usize)>,
}

/// A finite ordered set of printable tokens. Cloning is cheap.
#[derive(Clone)]
pub struct Alphabet(Arc<Inner>);

fn check_token(token: &str) -> Result<()> {
    if token.is_empty() {
        return Err(Error::InvalidAlphabet("empty symbol".into()));
    }
    if token == LEFT_MARK || token == RIGHT_MARK || token == "-" {
        return Err(Error::InvalidAlphabet(format!("`{token}` is reserved")));
    }
    if token
        .chars()
        .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '#' | ',' | '/' | '>'))
    {
        return Err(Error::InvalidAlphabet(format!("bad symbol `{token}`")));
    }
    Ok(())
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet must be non-empty".into()));
        }
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            check_token(s)?;
            if index.insert(s.clone(), i as Letter).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet(Arc::new(Inner {
            symbols,
            index,
            marked: None,
        })))
    }

    /// Product alphabet `base × {0,1}^bits`. The letter for `(a, v)` has index
    /// `a * 2^bits + v`, bit `j` of `v` belonging to the `j`-th variable.
    pub fn marked(base: &Alphabet, bits: usize) -> Alphabet {
        if bits == 0 {
            return base.clone();
        }
        let width = 1usize << bits;
        let mut symbols = Vec::with_capacity(base.len() * width);
        for s in base.symbols() {
            for v in 0..width {
                let mut tok = s.clone();
                tok.push(':');
                for j in 0..bits {
                    tok.push(if v >> j & 1 == 1 { '1' } else { '0' });
                }
                symbols.push(tok);
            }
        }
        let index = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as Letter))
            .collect();
        Alphabet(Arc::new(Inner {
            symbols,
            index,
            marked: Some((base.clone(), bits)),
        }))
    }

    /// This alphabet followed by the two endmarker tokens, for automata that
    /// read whole tapes `^ u $`. The endmarkers get the two last indices.
    pub fn with_endmarkers(&self) -> Alphabet {
        let mut symbols = self.0.symbols.clone();
        symbols.push(LEFT_MARK.to_string());
        symbols.push(RIGHT_MARK.to_string());
        let index = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as Letter))
            .collect();
        Alphabet(Arc::new(Inner {
            symbols,
            index,
            marked: None,
        }))
    }

    /// Base alphabet and bit count when this is a marked product alphabet.
    pub fn marking(&self) -> Option<(&Alphabet, usize)> {
        self.0.marked.as_ref().map(|(b, k)| (b, *k))
    }

    pub fn len(&self) -> usize {
        self.0.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.0.symbols
    }

    pub fn symbol(&self, letter: Letter) -> &str {
        &self.0.symbols[letter as usize]
    }

    pub fn letter(&self, symbol: &str) -> Result<Letter> {
        self.0
            .index
            .get(symbol)
            .copied()
            .ok_or_else(|| Error::SymbolNotInAlphabet(symbol.to_string()))
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.0.index.contains_key(symbol)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.len() as Letter
    }

    fn single_char(&self) -> bool {
        self.0.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word. Alphabets of one-character symbols accept packed words
    /// (`aab`); otherwise symbols are separated by whitespace. `-` and the
    /// empty string denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "-" {
            return Ok(Vec::new());
        }
        if self.single_char() && !text.contains(char::is_whitespace) {
            text.chars()
                .map(|c| self.letter(c.encode_utf8(&mut [0; 4])))
                .collect()
        } else {
            text.split_whitespace().map(|s| self.letter(s)).collect()
        }
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        let sep = if self.single_char() { "" } else { " " };
        word.iter()
            .map(|&l| self.symbol(l))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// All words of length exactly `len`, in lexicographic order.
    pub fn words_of_length(&self, len: usize) -> WordsOfLength {
        WordsOfLength {
            size: self.len() as Letter,
            current: Some(vec![0; len]),
        }
    }

    /// All words with `min_len <= |w| <= max_len` in length-lexicographic order.
    pub fn words_up_to(&self, min_len: usize, max_len: usize) -> impl Iterator<Item = Word> + '_ {
        (min_len..=max_len).flat_map(move |n| self.words_of_length(n))
    }
}

/// Iterator over the words of a fixed length.
pub struct WordsOfLength {
    size: Letter,
    current: Option<Word>,
}

impl Iterator for WordsOfLength {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.size {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.symbols == other.0.symbols
    }
}

impl Eq for Alphabet {}

impl std::hash::Hash for Alphabet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.symbols.hash(state);
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.symbols.iter()).finish()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.symbols.join(" "))
    }
}
