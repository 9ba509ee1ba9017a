use std::collections::BTreeSet;

use proptest::prelude::*;
use roadrules_core::rule_core::*;
use roadrules_core::rulebook::{parse_rulefile, serialize_rulebase};

const ATOMS: [&str; 12] = [
    "a0", "a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8", "a9", "a10", "a11",
];
const ACTIONS: [&str; 6] = ["go", "not_go", "halt", "not_halt", "signal", "wait"];
const CONTEXTS: [&str; 2] = ["standard", "emergency"];

#[derive(Debug, Clone)]
struct RawRule {
    context: usize,
    beliefs: Vec<usize>,
    intentions: Vec<usize>,
    pairs: Vec<(bool, usize)>,
}

#[derive(Debug, Clone)]
struct RawSituation {
    context: usize,
    beliefs: Vec<usize>,
    intentions: Vec<usize>,
}

fn raw_rule() -> impl Strategy<Value = RawRule> {
    (
        0..CONTEXTS.len(),
        prop::collection::vec(0..ATOMS.len(), 0..4),
        prop::collection::vec(0..ATOMS.len(), 0..3),
        prop::collection::vec((any::<bool>(), 0..ACTIONS.len()), 1..4),
    )
        .prop_map(|(context, beliefs, intentions, pairs)| RawRule {
            context,
            beliefs,
            intentions,
            pairs,
        })
}

fn raw_situation() -> impl Strategy<Value = RawSituation> {
    (
        0..CONTEXTS.len(),
        prop::collection::vec(0..ATOMS.len(), 0..10),
        prop::collection::vec(0..ATOMS.len(), 0..6),
    )
        .prop_map(|(context, beliefs, intentions)| RawSituation {
            context,
            beliefs,
            intentions,
        })
}

fn build(raw: &[RawRule]) -> RuleBase {
    let rules = raw.iter().enumerate().map(|(i, r)| {
        let trigger = Situation::parse(
            CONTEXTS[r.context],
            r.beliefs.iter().map(|&b| ATOMS[b]),
            r.intentions.iter().map(|&b| ATOMS[b]),
        )
        .unwrap();
        let pairs = r.pairs.iter().map(|&(must, a)| {
            let label = if must { Label::Must } else { Label::Should };
            ActionPair::new(label, Atom::new(ACTIONS[a]).unwrap())
        });
        Rule::new(format!("r{i}"), trigger, pairs).unwrap()
    });
    RuleBase::from_rules(rules).unwrap()
}

fn situation(raw: &RawSituation) -> Situation {
    Situation::parse(
        CONTEXTS[raw.context],
        raw.beliefs.iter().map(|&b| ATOMS[b]),
        raw.intentions.iter().map(|&b| ATOMS[b]),
    )
    .unwrap()
}

/// Straight from the definitions, on plain strings: a rule applies when the
/// contexts are equal and every trigger atom occurs in the situation; the
/// answer is every pair of every applicable rule, must before should, then by
/// action name, without repeats.
fn oracle(raw: &[RawRule], s: &RawSituation) -> Vec<String> {
    let mut out: Vec<(u8, String)> = Vec::new();
    for r in raw {
        let applies = r.context == s.context
            && r.beliefs.iter().all(|b| s.beliefs.contains(b))
            && r.intentions.iter().all(|i| s.intentions.contains(i));
        if applies {
            for &(must, a) in &r.pairs {
                let entry = (if must { 0 } else { 1 }, ACTIONS[a].to_string());
                if !out.contains(&entry) {
                    out.push(entry);
                }
            }
        }
    }
    out.sort();
    out.into_iter()
        .map(|(l, a)| format!("{}-{}", if l == 0 { "must" } else { "should" }, a))
        .collect()
}

fn render(pairs: &[ActionPair]) -> Vec<String> {
    pairs.iter().map(ToString::to_string).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn engine_matches_oracle(
        raw in prop::collection::vec(raw_rule(), 0..50),
        s in raw_situation(),
    ) {
        let rb = build(&raw);
        prop_assert_eq!(render(&rb.recommended(&situation(&s))), oracle(&raw, &s));
    }

    #[test]
    fn more_beliefs_never_lose_directives(
        raw in prop::collection::vec(raw_rule(), 0..50),
        s in raw_situation(),
        extra in prop::collection::vec(0..ATOMS.len(), 1..4),
    ) {
        let rb = build(&raw);
        let before: BTreeSet<ActionPair> = rb.recommended(&situation(&s)).into_iter().collect();
        let mut bigger = s.clone();
        bigger.beliefs.extend(extra);
        let after: BTreeSet<ActionPair> = rb.recommended(&situation(&bigger)).into_iter().collect();
        prop_assert!(before.is_subset(&after));
    }

    #[test]
    fn only_the_queried_context_matters(
        raw in prop::collection::vec(raw_rule(), 0..50),
        s in raw_situation(),
    ) {
        let rb = build(&raw);
        let s = situation(&s);
        let restricted = rb.restricted_to(s.context());
        prop_assert_eq!(rb.recommended(&s), restricted.recommended(&s));
    }

    #[test]
    fn output_is_sorted_and_unique_and_repeatable(
        raw in prop::collection::vec(raw_rule(), 0..50),
        s in raw_situation(),
    ) {
        let rb = build(&raw);
        let s = situation(&s);
        let out = rb.recommended(&s);
        prop_assert!(out.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(&out, &rb.recommended(&s));
        prop_assert!(out.iter().all(|p| rb.applicable_rules(&s).any(|r| r.ap().contains(p))));
    }

    #[test]
    fn serialization_round_trips(
        raw in prop::collection::vec(raw_rule(), 0..50),
        s in raw_situation(),
    ) {
        let rb = build(&raw);
        let text = serialize_rulebase(&rb);
        let back = parse_rulefile(&text).unwrap();
        prop_assert_eq!(serialize_rulebase(&back), text);
        let s = situation(&s);
        prop_assert_eq!(back.recommended(&s), rb.recommended(&s));
    }
}

#[test]
fn applicability_is_subset_and_context() {
    let rule = Rule::new(
        "r1",
        Situation::parse("standard", ["a0", "a1"], ["a2"]).unwrap(),
        [ActionPair::must("go").unwrap()],
    )
    .unwrap();
    let yes = Situation::parse("standard", ["a0", "a1", "a5"], ["a2", "a3"]).unwrap();
    let wrong_context = Situation::parse("emergency", ["a0", "a1"], ["a2"]).unwrap();
    let missing_belief = Situation::parse("standard", ["a0"], ["a2"]).unwrap();
    let belief_as_intention = Situation::parse("standard", ["a0"], ["a1", "a2"]).unwrap();
    assert!(is_applicable(&yes, &rule));
    assert!(!is_applicable(&wrong_context, &rule));
    assert!(!is_applicable(&missing_belief, &rule));
    assert!(!is_applicable(&belief_as_intention, &rule));
}
