//! Text-prompt generation by traversing attribute combinations.
//!
//! A template holds named slots such as `{age}` that are filled from the
//! attribute list of the same name. `{A}` and `{a}` expand to an indefinite
//! article (`A`/`An`, `a`/`an`) chosen by the word that follows it.

use std::collections::BTreeMap;

use crate::error::{PipelineError, Result};
use crate::rng::PipelineRng;

#[derive(Clone, Debug, PartialEq)]
pub struct PromptSpec {
    pub template: String,
    pub attributes: BTreeMap<String, Vec<String>>,
}

fn list(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl Default for PromptSpec {
    fn default() -> Self {
        let attributes = BTreeMap::from([
            ("gender".to_string(), list(&["man", "woman"])),
            ("age".to_string(), list(&["young", "middle-aged", "elderly", "teenage"])),
            ("hair_length".to_string(), list(&["short", "long", "shoulder-length"])),
            ("hair_color".to_string(), list(&["black", "brown", "blonde", "red", "gray"])),
            ("accessory".to_string(), list(&["glasses", "a hat", "no accessories"])),
            (
                "clothing".to_string(),
                list(&["casual jeans", "a business suit", "a summer dress", "a hoodie", "a leather jacket"]),
            ),
            (
                "action".to_string(),
                list(&["striking a pose", "smiling at the camera", "waving", "looking to the side"]),
            ),
            ("emotion".to_string(), list(&["happy", "calm", "surprised", "thoughtful"])),
            ("occupation".to_string(), list(&["teacher", "chef", "doctor", "artist"])),
        ]);
        Self {
            template: "{A} {age} {gender} with {hair_color} {hair_length} hair, wearing {clothing}, {action}."
                .to_string(),
            attributes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Piece {
    Text(String),
    Slot(String),
    Article { capital: bool },
}

fn parse(template: &str) -> Result<Vec<Piece>> {
    let mut pieces = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find(['{', '}']) {
        if rest.as_bytes()[open] == b'}' {
            return Err(PipelineError::Template(format!("unmatched '}}' in {template:?}")));
        }
        if open > 0 {
            pieces.push(Piece::Text(rest[..open].to_string()));
        }
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| PipelineError::Template(format!("unclosed '{{' in {template:?}")))?;
        let name = &after[..close];
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(PipelineError::Template(format!("malformed slot {{{name}}}")));
        }
        pieces.push(match name {
            "A" => Piece::Article { capital: true },
            "a" => Piece::Article { capital: false },
            _ => Piece::Slot(name.to_string()),
        });
        rest = &after[close + 1..];
    }
    if !rest.is_empty() {
        pieces.push(Piece::Text(rest.to_string()));
    }
    Ok(pieces)
}

impl PromptSpec {
    /// Attribute names in order of first use in the template.
    pub fn slots(&self) -> Result<Vec<String>> {
        let mut names: Vec<String> = Vec::new();
        for piece in parse(&self.template)? {
            if let Piece::Slot(name) = piece {
                if !names.contains(&name) {
                    names.push(name);
                }
            }
        }
        Ok(names)
    }

    pub fn validate(&self) -> Result<()> {
        for name in self.slots()? {
            match self.attributes.get(&name) {
                None => return Err(PipelineError::Template(format!("slot {{{name}}} has no attribute list"))),
                Some(values) if values.is_empty() => {
                    return Err(PipelineError::Template(format!("attribute list {name:?} is empty")))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Number of distinct prompts the template can produce.
    pub fn combinations(&self) -> Result<u64> {
        self.validate()?;
        self.slots()?.iter().try_fold(1u64, |acc, name| {
            acc.checked_mul(self.attributes[name].len() as u64)
                .ok_or_else(|| PipelineError::Template("attribute cross product overflows".into()))
        })
    }

    pub fn render(&self, choice: &BTreeMap<&str, &str>) -> Result<String> {
        let pieces = parse(&self.template)?;
        let mut words: Vec<String> = Vec::with_capacity(pieces.len());
        for piece in &pieces {
            words.push(match piece {
                Piece::Text(t) => t.clone(),
                Piece::Slot(name) => choice
                    .get(name.as_str())
                    .ok_or_else(|| PipelineError::Template(format!("no value for {{{name}}}")))?
                    .to_string(),
                Piece::Article { .. } => String::new(),
            });
        }
        for (i, piece) in pieces.iter().enumerate() {
            if let Piece::Article { capital } = piece {
                let next = words[i + 1..].concat();
                let vowel = next
                    .trim_start()
                    .chars()
                    .next()
                    .is_some_and(|c| "aeiouAEIOU".contains(c));
                words[i] = match (vowel, capital) {
                    (true, true) => "An",
                    (true, false) => "an",
                    (false, true) => "A",
                    (false, false) => "a",
                }
                .to_string();
            }
        }
        Ok(words.concat())
    }

    /// Renders the combination with mixed-radix index `index`; the first slot
    /// varies slowest.
    fn render_index(&self, slots: &[String], mut index: u64) -> Result<String> {
        let mut choice = BTreeMap::new();
        for name in slots.iter().rev() {
            let values = &self.attributes[name];
            let n = values.len() as u64;
            choice.insert(name.as_str(), values[(index % n) as usize].as_str());
            index /= n;
        }
        self.render(&choice)
    }
}

/// Up to `limit` distinct prompts, sampled without replacement from the
/// attribute cross product in an order fixed by `seed`.
pub fn generate_prompts(spec: &PromptSpec, limit: usize, seed: u64) -> Result<Vec<String>> {
    if limit == 0 {
        return Err(PipelineError::Template("limit must be at least 1".into()));
    }
    let total = spec.combinations()?;
    let slots = spec.slots()?;
    let mut rng = PipelineRng::new(seed);
    rng.sample_indices(total, limit as u64)
        .into_iter()
        .map(|i| spec.render_index(&slots, i))
        .collect()
}
