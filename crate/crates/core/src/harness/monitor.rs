use crate::agents::{interpret_directives, Scene};
use crate::rule_core::{ActionPair, RuleBase, Situation};
use crate::simworld::{Scenario, VehicleCommand, World};

use super::{HarnessError, Violation};

/// Runtime compliance monitor. It re-derives the directives for the situation
/// the subject reports and checks the executed command against each of them,
/// whatever the agent chose to accept.
pub struct Monitor<'a> {
    rules: &'a RuleBase,
    gap: usize,
}

impl<'a> Monitor<'a> {
    pub fn new(rules: &'a RuleBase, gap: usize) -> Self {
        Monitor { rules, gap }
    }

    pub fn check(
        &self,
        world: &World,
        scenario: &Scenario,
        reported: &Situation,
        executed: &VehicleCommand,
    ) -> Result<(Vec<ActionPair>, Vec<Violation>), HarnessError> {
        let obs = world.observe(scenario.subject, scenario.radius)?;
        let directives = self.rules.recommended(reported);
        let scene = Scene::new(&obs, self.gap);
        let constraints = interpret_directives(&directives)?;
        let violations = constraints
            .iter()
            .filter(|d| !scene.admits(d.constraint, executed))
            .map(|d| Violation {
                step: world.step_number(),
                pair: d.pair.clone(),
                rules: self.rules.sources_of(reported, &d.pair),
                severity: d.pair.label,
            })
            .collect();
        Ok((directives, violations))
    }
}
