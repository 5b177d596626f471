//! Uncased WordPiece tokenization compatible with BERT `vocab.txt` files.
//!
//! Every sub-token keeps the byte span of the input text it came from, so
//! word-level spans can be mapped onto sub-tokens.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use crate::error::{Error, Result};

pub const PAD: &str = "[PAD]";
pub const UNK: &str = "[UNK]";
pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";
pub const MASK: &str = "[MASK]";

const MAX_CHARS_PER_WORD: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub ids: Vec<u32>,
    /// Byte span in the input for each id; `None` for special tokens.
    pub offsets: Vec<Option<(usize, usize)>>,
    /// True when content was cut to fit the maximum length.
    pub truncated: bool,
}

impl Encoding {
    /// Number of non-special tokens.
    pub fn content_len(&self) -> usize {
        self.offsets.iter().filter(|o| o.is_some()).count()
    }
}

#[derive(Debug, Clone)]
pub struct WordPiece {
    vocab: HashMap<String, u32>,
    tokens: Vec<String>,
    lowercase: bool,
    pad: u32,
    unk: u32,
    cls: u32,
    sep: u32,
}

/// A normalized character with the byte span of its source character.
type NormChar = (char, usize, usize);

impl WordPiece {
    pub fn from_tokens(tokens: Vec<String>, lowercase: bool) -> Result<Self> {
        let mut vocab = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            vocab.entry(t.clone()).or_insert(i as u32);
        }
        let id = |t: &str| vocab.get(t).copied().ok_or_else(|| Error::Tokenizer(format!("vocabulary lacks {t}")));
        let (pad, unk, cls, sep) = (id(PAD)?, id(UNK)?, id(CLS)?, id(SEP)?);
        Ok(WordPiece { vocab, tokens, lowercase, pad, unk, cls, sep })
    }

    pub fn from_vocab_file(path: &Path, lowercase: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tokens(text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect(), lowercase)
    }

    pub fn save_vocab(&self, path: &Path) -> Result<()> {
        let mut s = self.tokens.join("\n");
        s.push('\n');
        std::fs::write(path, s).map_err(|e| Error::io(path, e))
    }

    pub fn vocab_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn lowercase(&self) -> bool {
        self.lowercase
    }

    pub fn pad_id(&self) -> u32 {
        self.pad
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.vocab.get(token).copied()
    }

    /// Splits on whitespace and punctuation after cleaning and case folding.
    fn basic_words(&self, text: &str) -> Vec<Vec<NormChar>> {
        let mut words: Vec<Vec<NormChar>> = Vec::new();
        let mut cur: Vec<NormChar> = Vec::new();
        for (start, c) in text.char_indices() {
            let end = start + c.len_utf8();
            if c == '\0' || c == '\u{fffd}' || (c.is_control() && !c.is_whitespace()) {
                continue;
            }
            if c.is_whitespace() {
                if !cur.is_empty() {
                    words.push(std::mem::take(&mut cur));
                }
                continue;
            }
            let isolated = is_punctuation(c) || is_cjk(c);
            if isolated && !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
            let mut piece: Vec<NormChar> = Vec::new();
            if self.lowercase {
                for lc in c.to_lowercase() {
                    if is_combining_mark(lc) {
                        continue;
                    }
                    piece.push((strip_accent(lc), start, end));
                }
            } else {
                piece.push((c, start, end));
            }
            if isolated {
                if !piece.is_empty() {
                    words.push(piece);
                }
            } else {
                cur.extend(piece);
            }
        }
        if !cur.is_empty() {
            words.push(cur);
        }
        words
    }

    fn wordpiece(&self, word: &[NormChar], out_ids: &mut Vec<u32>, out_offsets: &mut Vec<Option<(usize, usize)>>) {
        let span = |a: usize, b: usize| Some((word[a].1, word[b - 1].2));
        if word.len() > MAX_CHARS_PER_WORD {
            out_ids.push(self.unk);
            out_offsets.push(span(0, word.len()));
            return;
        }
        let chars: Vec<char> = word.iter().map(|c| c.0).collect();
        let mut pieces = Vec::new();
        let mut start = 0;
        while start < chars.len() {
            let mut end = chars.len();
            let mut found = None;
            while start < end {
                let mut s: String = chars[start..end].iter().collect();
                if start > 0 {
                    s.insert_str(0, "##");
                }
                if let Some(&id) = self.vocab.get(&s) {
                    found = Some(id);
                    break;
                }
                end -= 1;
            }
            match found {
                Some(id) => {
                    pieces.push((id, start, end));
                    start = end;
                }
                None => {
                    out_ids.push(self.unk);
                    out_offsets.push(span(0, word.len()));
                    return;
                }
            }
        }
        for (id, a, b) in pieces {
            out_ids.push(id);
            out_offsets.push(span(a, b));
        }
    }

    /// Content sub-tokens of `text` without special tokens.
    pub fn tokenize(&self, text: &str) -> (Vec<u32>, Vec<Option<(usize, usize)>>) {
        let mut ids = Vec::new();
        let mut offsets = Vec::new();
        for word in self.basic_words(text) {
            self.wordpiece(&word, &mut ids, &mut offsets);
        }
        (ids, offsets)
    }

    /// `[CLS] tokens [SEP]`, cutting tokens from the right to fit `max_len`.
    pub fn encode(&self, text: &str, max_len: usize) -> Encoding {
        let (mut ids, mut offsets) = self.tokenize(text);
        let room = max_len.saturating_sub(2);
        let truncated = ids.len() > room;
        ids.truncate(room);
        offsets.truncate(room);
        ids.insert(0, self.cls);
        offsets.insert(0, None);
        ids.push(self.sep);
        offsets.push(None);
        Encoding { ids, offsets, truncated }
    }

    /// Builds a vocabulary covering every word and character in `texts`.
    pub fn build_vocab<'a, I: IntoIterator<Item = &'a str>>(texts: I, lowercase: bool) -> Result<Self> {
        let probe = WordPiece { vocab: HashMap::new(), tokens: Vec::new(), lowercase, pad: 0, unk: 0, cls: 0, sep: 0 };
        let mut words: BTreeMap<String, usize> = BTreeMap::new();
        let mut chars: BTreeSet<char> = BTreeSet::new();
        for t in texts {
            for w in probe.basic_words(t) {
                chars.extend(w.iter().map(|c| c.0));
                *words.entry(w.iter().map(|c| c.0).collect()).or_default() += 1;
            }
        }
        let mut tokens: Vec<String> = [PAD, UNK, CLS, SEP, MASK].iter().map(|s| s.to_string()).collect();
        let mut seen: BTreeSet<String> = tokens.iter().cloned().collect();
        let mut push = |t: String, tokens: &mut Vec<String>| {
            if seen.insert(t.clone()) {
                tokens.push(t);
            }
        };
        for c in &chars {
            push(c.to_string(), &mut tokens);
        }
        for c in &chars {
            push(format!("##{c}"), &mut tokens);
        }
        for w in words.keys() {
            push(w.clone(), &mut tokens);
        }
        Self::from_tokens(tokens, lowercase)
    }
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c as u32, 0x00A1..=0x00BF | 0x2010..=0x2027 | 0x2030..=0x205E | 0x3000..=0x303F | 0xFF01..=0xFF0F)
}

fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x4E00..=0x9FFF | 0x3400..=0x4DBF | 0x20000..=0x2A6DF | 0x2A700..=0x2B73F
        | 0x2B740..=0x2B81F | 0x2B820..=0x2CEAF | 0xF900..=0xFAFF | 0x2F800..=0x2FA1F)
}

fn is_combining_mark(c: char) -> bool {
    matches!(c as u32, 0x0300..=0x036F | 0x1AB0..=0x1AFF | 0x1DC0..=0x1DFF | 0x20D0..=0x20FF | 0xFE20..=0xFE2F)
}

/// Removes diacritics from precomposed Latin letters (lowercase input).
fn strip_accent(c: char) -> char {
    const TABLE: &[(&str, char)] = &[
        ("àáâãäåāăą", 'a'),
        ("çćĉċč", 'c'),
        ("ďđ", 'd'),
        ("èéêëēĕėęě", 'e'),
        ("ĝğġģ", 'g'),
        ("ĥħ", 'h'),
        ("ìíîïĩīĭįı", 'i'),
        ("ĵ", 'j'),
        ("ķ", 'k'),
        ("ĺļľŀł", 'l'),
        ("ñńņňŉ", 'n'),
        ("òóôõöøōŏő", 'o'),
        ("ŕŗř", 'r'),
        ("śŝşš", 's'),
        ("ţťŧ", 't'),
        ("ùúûüũūŭůűų", 'u'),
        ("ŵ", 'w'),
        ("ýÿŷ", 'y'),
        ("źżž", 'z'),
    ];
    if c.is_ascii() {
        return c;
    }
    TABLE.iter().find(|(set, _)| set.contains(c)).map(|&(_, base)| base).unwrap_or(c)
}
