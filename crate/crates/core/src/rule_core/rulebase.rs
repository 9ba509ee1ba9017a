use std::collections::{BTreeMap, BTreeSet};

use super::{is_applicable, ActionPair, Atom, ContextId, CoreError, Rule, Situation};

/// Immutable, context-indexed rule collection.
///
/// Rules are stored sorted by name; `by_context` holds indices into that list.
/// All queries take `&self`, so a `RuleBase` can be shared across threads.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleBase {
    rules: Vec<Rule>,
    by_context: BTreeMap<ContextId, Vec<usize>>,
    contexts: BTreeSet<ContextId>,
    vocabulary: BTreeSet<Atom>,
    exclusions: BTreeSet<(Atom, Atom)>,
}

/// Recommended directives plus query atoms the corpus never mentions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Advice {
    pub directives: Vec<ActionPair>,
    pub unknown_atoms: BTreeSet<Atom>,
}

impl RuleBase {
    pub fn builder() -> RuleBaseBuilder {
        RuleBaseBuilder::default()
    }

    pub fn empty() -> Self {
        RuleBase::default()
    }

    /// Builds a rule base declaring every context the rules use.
    pub fn from_rules(rules: impl IntoIterator<Item = Rule>) -> Result<Self, CoreError> {
        let mut builder = RuleBase::builder();
        for rule in rules {
            builder.declare_context(rule.context().clone());
            builder.add_rule(rule)?;
        }
        Ok(builder.build())
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rules in ascending name order.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules
            .binary_search_by(|r| r.name().cmp(name))
            .ok()
            .map(|i| &self.rules[i])
    }

    pub fn contexts(&self) -> &BTreeSet<ContextId> {
        &self.contexts
    }

    pub fn vocabulary(&self) -> &BTreeSet<Atom> {
        &self.vocabulary
    }

    /// Declared mutually exclusive action atoms, each pair stored in ascending order.
    pub fn exclusions(&self) -> &BTreeSet<(Atom, Atom)> {
        &self.exclusions
    }

    pub fn are_exclusive(&self, a: &Atom, b: &Atom) -> bool {
        let key = if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        self.exclusions.contains(&key)
    }

    /// Rules declaring the given context, in name order.
    pub fn rules_in_context<'a>(&'a self, context: &ContextId) -> impl Iterator<Item = &'a Rule> + 'a {
        self.by_context
            .get(context)
            .into_iter()
            .flatten()
            .map(move |&i| &self.rules[i])
    }

    /// Copy of this rule base keeping only the rules of one context.
    pub fn restricted_to(&self, context: &ContextId) -> RuleBase {
        let mut builder = RuleBase::builder();
        for ctx in &self.contexts {
            builder.declare_context(ctx.clone());
        }
        for atom in &self.vocabulary {
            builder.declare_atom(atom.clone());
        }
        for (a, b) in &self.exclusions {
            builder.declare_exclusive(a.clone(), b.clone());
        }
        for rule in self.rules_in_context(context) {
            builder
                .add_rule(rule.clone())
                .expect("rules of a valid rule base stay valid");
        }
        builder.build()
    }

    pub fn applicable_rules<'a>(&'a self, situation: &'a Situation) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules_in_context(situation.context())
            .filter(move |r| is_applicable(situation, r))
    }

    /// Sorted, deduplicated union of the action pairs of every applicable rule.
    pub fn recommended(&self, situation: &Situation) -> Vec<ActionPair> {
        let mut out: Vec<ActionPair> = Vec::new();
        for rule in self.applicable_rules(situation) {
            out.extend(rule.ap().iter().cloned());
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn advise(&self, situation: &Situation) -> Advice {
        Advice {
            directives: self.recommended(situation),
            unknown_atoms: self.unknown_atoms(situation),
        }
    }

    /// Query atoms absent from the corpus vocabulary.
    pub fn unknown_atoms(&self, situation: &Situation) -> BTreeSet<Atom> {
        situation
            .atoms()
            .filter(|a| !self.vocabulary.contains(*a))
            .cloned()
            .collect()
    }

    /// Names of the applicable rules that produce `pair` in `situation`.
    pub fn sources_of(&self, situation: &Situation, pair: &ActionPair) -> Vec<String> {
        self.applicable_rules(situation)
            .filter(|r| r.ap().contains(pair))
            .map(|r| r.name().to_string())
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct RuleBaseBuilder {
    rules: BTreeMap<String, Rule>,
    contexts: BTreeSet<ContextId>,
    vocabulary: BTreeSet<Atom>,
    exclusions: BTreeSet<(Atom, Atom)>,
}

impl RuleBaseBuilder {
    pub fn declare_context(&mut self, context: ContextId) -> &mut Self {
        self.contexts.insert(context);
        self
    }

    pub fn declare_atom(&mut self, atom: Atom) -> &mut Self {
        self.vocabulary.insert(atom);
        self
    }

    pub fn declare_exclusive(&mut self, a: Atom, b: Atom) -> &mut Self {
        self.vocabulary.insert(a.clone());
        self.vocabulary.insert(b.clone());
        if a <= b {
            self.exclusions.insert((a, b));
        } else {
            self.exclusions.insert((b, a));
        }
        self
    }

    pub fn has_rule(&self, name: &str) -> bool {
        self.rules.contains_key(name)
    }

    pub fn add_rule(&mut self, rule: Rule) -> Result<&mut Self, CoreError> {
        if !self.contexts.contains(rule.context()) {
            return Err(CoreError::UndeclaredContext {
                rule: rule.name().to_string(),
                context: rule.context().to_string(),
            });
        }
        if self.rules.contains_key(rule.name()) {
            return Err(CoreError::DuplicateRule(rule.name().to_string()));
        }
        self.vocabulary.extend(rule.atoms().cloned());
        self.rules.insert(rule.name().to_string(), rule);
        Ok(self)
    }

    pub fn build(self) -> RuleBase {
        let rules: Vec<Rule> = self.rules.into_values().collect();
        let mut by_context: BTreeMap<ContextId, Vec<usize>> = BTreeMap::new();
        for (i, rule) in rules.iter().enumerate() {
            by_context.entry(rule.context().clone()).or_default().push(i);
        }
        RuleBase {
            rules,
            by_context,
            contexts: self.contexts,
            vocabulary: self.vocabulary,
            exclusions: self.exclusions,
        }
    }
}
