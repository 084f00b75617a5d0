use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read};

use super::TextPrepError;

const PREFIXES: &[&str] = &["meng", "meny", "men", "mem", "per", "ber", "ter", "me", "di", "ke", "se", "pe"];
const SUFFIXES: &[&str] = &["kan", "lah", "kah", "nya", "an", "i"];
/// Nasal prefixes that elide the stem's initial consonant.
const NASAL_PREFIXES: &[&str] = &["meng", "meny", "men", "mem"];
const ELIDED_CONSONANTS: &[char] = &['p', 't', 'k', 's'];
const MIN_STEM: usize = 3;

/// Dictionary normalization followed by rule-based affix stripping for
/// Indonesian.
#[derive(Debug, Clone, Default)]
pub struct Stemmer {
    normalization: HashMap<String, String>,
    /// Normalization outputs; returned unchanged.
    targets: HashSet<String>,
    /// Known stems consulted while choosing how to strip.
    roots: HashSet<String>,
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

impl Stemmer {
    /// Builds a stemmer, resolving chained normalization entries
    /// (`a→b`, `b→c` becomes `a→c`). Cycles are rejected.
    pub fn new(normalization: HashMap<String, String>, roots: HashSet<String>) -> Result<Self, TextPrepError> {
        let mut resolved = HashMap::with_capacity(normalization.len());
        for from in normalization.keys() {
            let mut to = &normalization[from];
            let mut hops = 0;
            while let Some(next) = normalization.get(to) {
                if next == to {
                    break;
                }
                to = next;
                hops += 1;
                if hops > normalization.len() {
                    return Err(TextPrepError::NormalizationCycle(from.clone()));
                }
            }
            resolved.insert(from.clone(), to.clone());
        }
        let targets = resolved.values().cloned().collect();
        Ok(Stemmer {
            normalization: resolved,
            targets,
            roots,
        })
    }

    /// The bundled Indonesian normalization map and known-stem list.
    pub fn indonesian() -> Self {
        let map = read_normalization(include_str!("data/normalization_id.csv").as_bytes()).expect("bundled map parses");
        let roots = read_word_list(include_str!("data/root_words_id.txt").as_bytes()).expect("bundled roots parse");
        Stemmer::new(map, roots).expect("bundled map is acyclic")
    }

    pub fn normalization(&self) -> &HashMap<String, String> {
        &self.normalization
    }

    pub fn roots(&self) -> &HashSet<String> {
        &self.roots
    }

    /// Normalizes then stems one lowercase token.
    pub fn stem(&self, token: &str) -> String {
        if let Some(to) = self.normalization.get(token) {
            return to.clone();
        }
        if self.targets.contains(token) || self.roots.contains(token) {
            return token.to_string();
        }
        self.strip_affixes(token)
    }

    fn strip_affixes(&self, token: &str) -> String {
        let len = char_len(token);
        let prefixes: Vec<&str> = PREFIXES
            .iter()
            .copied()
            .filter(|p| token.starts_with(p) && len - p.len() >= MIN_STEM)
            .collect();
        let suffixes: Vec<&str> = SUFFIXES
            .iter()
            .copied()
            .filter(|s| token.ends_with(s) && len - s.len() >= MIN_STEM)
            .collect();

        // Dictionary-guided search: suffix only, prefix only, then both.
        for s in &suffixes {
            let residue = &token[..token.len() - s.len()];
            if self.roots.contains(residue) {
                return residue.to_string();
            }
        }
        for p in &prefixes {
            if let Some(hit) = self.root_after_prefix(p, &token[p.len()..]) {
                return hit;
            }
        }
        for p in &prefixes {
            for s in &suffixes {
                if p.len() + s.len() + MIN_STEM > token.len() {
                    continue;
                }
                if let Some(hit) = self.root_after_prefix(p, &token[p.len()..token.len() - s.len()]) {
                    return hit;
                }
            }
        }

        // Plain strip: longest prefix, then longest suffix, each only if the
        // stem keeps at least MIN_STEM characters.
        let mut stem = token;
        if let Some(p) = prefixes.first() {
            stem = &stem[p.len()..];
        }
        if let Some(s) = SUFFIXES.iter().find(|s| stem.ends_with(*s) && char_len(stem) - s.len() >= MIN_STEM) {
            stem = &stem[..stem.len() - s.len()];
        }
        stem.to_string()
    }

    /// A known stem for `residue` left by `prefix`, restoring an elided
    /// initial consonant after nasal prefixes.
    fn root_after_prefix(&self, prefix: &str, residue: &str) -> Option<String> {
        if NASAL_PREFIXES.contains(&prefix) && residue.starts_with(is_vowel) {
            for c in ELIDED_CONSONANTS {
                let candidate = format!("{c}{residue}");
                if self.roots.contains(&candidate) {
                    return Some(candidate);
                }
            }
        }
        self.roots.contains(residue).then(|| residue.to_string())
    }
}

/// Two-column `from,to` CSV; a leading `from,to` header is optional.
pub fn read_normalization<R: Read>(reader: R) -> Result<HashMap<String, String>, TextPrepError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut map = HashMap::new();
    for (i, row) in csv.records().enumerate() {
        let row = row.map_err(|e| TextPrepError::Normalization(e.to_string()))?;
        if row.len() != 2 {
            return Err(TextPrepError::Normalization(format!("row {} has {} columns, expected 2", i + 1, row.len())));
        }
        let (from, to) = (row[0].to_lowercase(), row[1].to_lowercase());
        if i == 0 && from == "from" && to == "to" {
            continue;
        }
        if from.is_empty() || to.is_empty() {
            return Err(TextPrepError::Normalization(format!("row {} has an empty column", i + 1)));
        }
        map.insert(from, to);
    }
    Ok(map)
}

/// One lowercase word per line; blank lines and `#` comments ignored.
pub fn read_word_list<R: Read>(reader: R) -> Result<HashSet<String>, TextPrepError> {
    let mut out = HashSet::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        let word = line.trim();
        if word.is_empty() || word.starts_with('#') {
            continue;
        }
        out.insert(word.to_lowercase());
    }
    Ok(out)
}
