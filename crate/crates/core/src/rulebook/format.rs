//! Line-oriented rule file format.
//!
//! ```text
//! # comment
//! contexts standard emergency
//! vocab headlightsOff routePlanned
//! exclusive fog_lights_on fog_lights_off
//! rule r226a standard | visibilitySeriouslyReduced | | must headlights_on, should fog_lights_on
//! ```
//!
//! Header lines may appear anywhere; a file is read in two passes so any
//! permutation of its lines yields the same [`RuleBase`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::PathBuf;

use thiserror::Error;

use crate::rule_core::{ActionPair, Atom, ContextId, CoreError, Label, Rule, RuleBase, Situation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("duplicate rule name `{name}` (first defined on line {first_line})")]
    DuplicateRule { name: String, first_line: usize },
    #[error("rule `{rule}` uses undeclared context `{context}`")]
    UndeclaredContext { rule: String, context: String },
    #[error("malformed atom `{0}`")]
    MalformedAtom(String),
    #[error("malformed identifier `{0}`")]
    MalformedIdentifier(String),
    #[error("rule `{0}` has an empty action list")]
    EmptyActionList(String),
    #[error("unknown label `{0}` (expected `must` or `should`)")]
    UnknownLabel(String),
    #[error("unknown directive `{0}` (expected contexts, vocab, exclusive or rule)")]
    UnknownDirective(String),
    #[error("malformed stanza: {0}")]
    Malformed(String),
}

impl ParseError {
    fn new(line: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, kind }
    }
}

/// Where each rule of a parsed file came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleSource {
    pub path: Option<PathBuf>,
    /// Rule name to (first line, last line), 1-based.
    pub line_spans: BTreeMap<String, (usize, usize)>,
}

impl RuleSource {
    pub fn span(&self, rule: &str) -> Option<(usize, usize)> {
        self.line_spans.get(rule).copied()
    }
}

impl fmt::Display for RuleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            Some(p) => write!(f, "{}", p.display()),
            None => f.write_str("<memory>"),
        }
    }
}

pub fn parse_rulefile(text: &str) -> Result<RuleBase, ParseError> {
    parse_with_source(text, None).map(|(rb, _)| rb)
}

pub fn parse_with_source(
    text: &str,
    path: Option<PathBuf>,
) -> Result<(RuleBase, RuleSource), ParseError> {
    let mut builder = RuleBase::builder();
    let mut rule_lines: Vec<(usize, &str)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match keyword {
            "contexts" => {
                for word in rest.split_whitespace() {
                    let ctx = ContextId::new(word).map_err(|_| {
                        ParseError::new(lineno, ParseErrorKind::MalformedIdentifier(word.into()))
                    })?;
                    builder.declare_context(ctx);
                }
            }
            "vocab" => {
                for word in rest.split_whitespace() {
                    builder.declare_atom(atom(lineno, word)?);
                }
            }
            "exclusive" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                if words.len() != 2 {
                    return Err(ParseError::new(
                        lineno,
                        ParseErrorKind::Malformed("`exclusive` takes exactly two atoms".into()),
                    ));
                }
                builder.declare_exclusive(atom(lineno, words[0])?, atom(lineno, words[1])?);
            }
            "rule" => rule_lines.push((lineno, rest)),
            other => {
                return Err(ParseError::new(
                    lineno,
                    ParseErrorKind::UnknownDirective(other.to_string()),
                ))
            }
        }
    }

    let mut source = RuleSource {
        path,
        line_spans: BTreeMap::new(),
    };
    for (lineno, body) in rule_lines {
        let rule = parse_rule(lineno, body)?;
        if let Some(&(first_line, _)) = source.line_spans.get(rule.name()) {
            return Err(ParseError::new(
                lineno,
                ParseErrorKind::DuplicateRule {
                    name: rule.name().to_string(),
                    first_line,
                },
            ));
        }
        let name = rule.name().to_string();
        builder.add_rule(rule).map_err(|e| match e {
            CoreError::UndeclaredContext { rule, context } => {
                ParseError::new(lineno, ParseErrorKind::UndeclaredContext { rule, context })
            }
            other => ParseError::new(lineno, ParseErrorKind::Malformed(other.to_string())),
        })?;
        source.line_spans.insert(name, (lineno, lineno));
    }
    Ok((builder.build(), source))
}

fn atom(line: usize, word: &str) -> Result<Atom, ParseError> {
    Atom::new(word).map_err(|_| ParseError::new(line, ParseErrorKind::MalformedAtom(word.into())))
}

fn atom_list(line: usize, field: &str) -> Result<BTreeSet<Atom>, ParseError> {
    let field = field.trim();
    if field.is_empty() {
        return Ok(BTreeSet::new());
    }
    field.split(',').map(|w| atom(line, w.trim())).collect()
}

fn parse_rule(line: usize, body: &str) -> Result<Rule, ParseError> {
    let fields: Vec<&str> = body.split('|').collect();
    if fields.len() != 4 {
        return Err(ParseError::new(
            line,
            ParseErrorKind::Malformed(format!(
                "expected `rule <name> <context> | beliefs | intentions | actions`, found {} field(s)",
                fields.len()
            )),
        ));
    }
    let head: Vec<&str> = fields[0].split_whitespace().collect();
    if head.len() != 2 {
        return Err(ParseError::new(
            line,
            ParseErrorKind::Malformed("rule header must be `<name> <context>`".into()),
        ));
    }
    let name = head[0];
    if Atom::new(name).is_err() {
        return Err(ParseError::new(line, ParseErrorKind::MalformedIdentifier(name.into())));
    }
    let context = ContextId::new(head[1])
        .map_err(|_| ParseError::new(line, ParseErrorKind::MalformedIdentifier(head[1].into())))?;
    let beliefs = atom_list(line, fields[1])?;
    let intentions = atom_list(line, fields[2])?;

    let actions = fields[3].trim();
    if actions.is_empty() {
        return Err(ParseError::new(line, ParseErrorKind::EmptyActionList(name.into())));
    }
    let mut pairs = BTreeSet::new();
    for item in actions.split(',') {
        let words: Vec<&str> = item.split_whitespace().collect();
        let [label, action] = words.as_slice() else {
            return Err(ParseError::new(
                line,
                ParseErrorKind::Malformed(format!("action `{}` is not `<label> <action>`", item.trim())),
            ));
        };
        let label: Label = label
            .parse()
            .map_err(|_| ParseError::new(line, ParseErrorKind::UnknownLabel(label.to_string())))?;
        pairs.insert(ActionPair::new(label, atom(line, action)?));
    }

    Rule::new(name, Situation { context, beliefs, intentions }, pairs)
        .map_err(|e| ParseError::new(line, ParseErrorKind::Malformed(e.to_string())))
}

fn join_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> String {
    atoms
        .into_iter()
        .map(Atom::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical text: declarations first, then rules by name with sorted atoms.
pub fn serialize_rulebase(rb: &RuleBase) -> String {
    let mut out = String::new();
    if !rb.contexts().is_empty() {
        let names: Vec<&str> = rb.contexts().iter().map(ContextId::as_str).collect();
        writeln!(out, "contexts {}", names.join(" ")).unwrap();
    }

    let mut implied: BTreeSet<&Atom> = BTreeSet::new();
    for rule in rb.rules() {
        implied.extend(rule.atoms());
    }
    for (a, b) in rb.exclusions() {
        implied.insert(a);
        implied.insert(b);
    }
    let extra: Vec<&str> = rb
        .vocabulary()
        .iter()
        .filter(|a| !implied.contains(a))
        .map(Atom::as_str)
        .collect();
    if !extra.is_empty() {
        writeln!(out, "vocab {}", extra.join(" ")).unwrap();
    }
    for (a, b) in rb.exclusions() {
        writeln!(out, "exclusive {a} {b}").unwrap();
    }

    for rule in rb.rules() {
        write!(out, "rule {} {}", rule.name(), rule.context()).unwrap();
        let actions = rule
            .ap()
            .iter()
            .map(|p| format!("{} {}", p.label, p.action))
            .collect::<Vec<_>>()
            .join(", ");
        for field in [join_atoms(rule.beliefs()), join_atoms(rule.intentions()), actions] {
            out.push_str(" |");
            if !field.is_empty() {
                out.push(' ');
                out.push_str(&field);
            }
        }
        out.push('\n');
    }
    out
}
