use std::collections::BTreeSet;

use roadrules_core::agents::*;
use roadrules_core::rule_core::{ActionPair, Atom, Label, RuleBase};
use roadrules_core::rulebook::load_named_corpus;
use roadrules_core::simworld::*;

fn corpus() -> RuleBase {
    load_named_corpus("uk_highway_sample").unwrap()
}

/// A northbound single-lane ring (x = 1 of a 3-wide torus) with a stop line
/// and light at (1, 10) and the goal at (1, 2).
fn signal_road(subject_y: usize, speed: u8, phase_offset: u32) -> (World, Goal) {
    let dims = Dims::new(3, 20);
    let mut cells = vec![Cell::OFFROAD; dims.cell_count()];
    for y in 0..20 {
        cells[dims.index(Pos::new(1, y))] = Cell::lane(Heading::N, 0);
    }
    let line = Pos::new(1, 10);
    cells[dims.index(line)].light = Some(LightId(1));
    let map = GridMap::new(dims, cells, BTreeSet::from([(line, Heading::N)])).unwrap();
    let light = TrafficLight::new(LightId(1), vec![line], DEFAULT_DURATIONS, phase_offset);
    let subject = VehicleState {
        id: VehicleId(0),
        position: Pos::new(1, subject_y),
        heading: Heading::N,
        speed,
        max_speed: 2,
        lamps: Lamps::default(),
        kind: VehicleKind::Subject,
    };
    let goal = Goal::new(&map, BTreeSet::from([Pos::new(1, 2)]));
    (World::new(map, [light], [subject]).unwrap(), goal)
}

fn atoms(set: &BTreeSet<Atom>) -> Vec<&str> {
    set.iter().map(Atom::as_str).collect()
}

#[test]
fn red_light_three_cells_ahead_is_perceived() {
    let (world, goal) = signal_road(13, 1, 0);
    let obs = world.observe(VehicleId(0), 4).unwrap();
    let s = perceive(&obs, &goal);
    assert!(atoms(&s.beliefs).contains(&"driving"));
    assert!(atoms(&s.beliefs).contains(&"lightRed"));
    assert!(atoms(&s.intentions).contains(&"approachingTrafficLight"));
}

#[test]
fn light_outside_the_radius_is_not_perceived() {
    let (world, goal) = signal_road(15, 1, 0);
    let obs = world.observe(VehicleId(0), 4).unwrap();
    let s = perceive(&obs, &goal);
    for a in ["lightRed", "lightRedAmber", "lightGreen", "lightAmber"] {
        assert!(!atoms(&s.beliefs).contains(&a));
    }
    assert!(s.intentions.is_empty());
}

#[test]
fn overtaken_vehicle_behind_in_left_lane() {
    let s = load_scenario("overtake", 1).unwrap();
    let map = s.world.map().clone();
    let subject = VehicleState {
        id: VehicleId(0),
        position: Pos::new(2, 13),
        heading: Heading::N,
        speed: 2,
        max_speed: 2,
        lamps: Lamps::default(),
        kind: VehicleKind::Subject,
    };
    let slow = VehicleState {
        id: VehicleId(1),
        position: Pos::new(1, 15),
        max_speed: 1,
        speed: 1,
        kind: VehicleKind::Traffic,
        ..subject.clone()
    };
    let world = World::new(map, [], [subject, slow]).unwrap();
    let obs = world.observe(VehicleId(0), 4).unwrap();
    let sit = perceive(&obs, &s.goal);
    assert!(atoms(&sit.beliefs).contains(&"inRightLane"));
    assert!(atoms(&sit.beliefs).contains(&"overtakeComplete"));
    assert!(!atoms(&sit.beliefs).contains(&"slowVehicleAhead"));
}

#[test]
fn reactive_stops_before_a_red_light() {
    let rb = corpus();
    let (world, goal) = signal_road(11, 2, 0);
    let obs = world.observe(VehicleId(0), 4).unwrap();
    let agent = Agent::new(PolicyKind::Reactive, &rb, 4);
    let (cmd, record) = agent.decide(&obs, &goal).unwrap();
    assert!(record.accepted.contains(&ActionPair::must("stop_at_white_line").unwrap()));
    let mv = plan_move(&obs, obs.me(), &cmd);
    assert!(!mv.crosses(Pos::new(1, 10)));
    assert_eq!(mv.target(), Pos::new(1, 10));
}

#[test]
fn morally_bankrupt_keeps_the_right_lane_after_overtaking() {
    let rb = corpus();
    let s = load_scenario("overtake", 1).unwrap();
    let subject = VehicleState {
        id: VehicleId(0),
        position: Pos::new(2, 13),
        heading: Heading::N,
        speed: 2,
        max_speed: 2,
        lamps: Lamps::default(),
        kind: VehicleKind::Subject,
    };
    let slow = VehicleState {
        id: VehicleId(1),
        position: Pos::new(1, 15),
        speed: 1,
        max_speed: 1,
        kind: VehicleKind::Traffic,
        ..subject.clone()
    };
    let world = World::new(s.world.map().clone(), [], [subject, slow]).unwrap();
    let obs = world.observe(VehicleId(0), 4).unwrap();

    let bankrupt = Agent::new(PolicyKind::MorallyBankrupt, &rb, 4);
    let (cmd, record) = bankrupt.decide(&obs, &s.goal).unwrap();
    let should_return = ActionPair::should("return_to_left_lane").unwrap();
    assert!(record.directives.contains(&should_return));
    assert!(!record.accepted.contains(&should_return));
    assert_eq!(cmd.lateral, Lateral::Keep);

    let reactive = Agent::new(PolicyKind::Reactive, &rb, 4);
    let (cmd, _) = reactive.decide(&obs, &s.goal).unwrap();
    assert_eq!(cmd.lateral, Lateral::ChangeLeft);
}

#[test]
fn fog_lights_off_sets_the_lamp() {
    let rb = corpus();
    let (world, goal) = signal_road(18, 0, 0);
    let mut v = world.vehicle(VehicleId(0)).unwrap().clone();
    v.lamps.fog_lights = true;
    let world = World::new(world.map().clone(), world.lights().values().cloned(), [v]).unwrap();
    let obs = world.observe(VehicleId(0), 4).unwrap();
    let agent = Agent::new(PolicyKind::Reactive, &rb, 4);
    let (cmd, record) = agent.decide(&obs, &goal).unwrap();
    assert!(record.accepted.contains(&ActionPair::must("fog_lights_off").unwrap()));
    assert_eq!(cmd.lamps.get(&Lamp::FogLights), Some(&false));

    let scene = Scene::new(&obs, 4);
    let lamp = interpret_directives(&[ActionPair::must("fog_lights_off").unwrap()]).unwrap();
    assert!(scene.admits(lamp[0].constraint, &cmd));
    assert!(!scene.admits(lamp[0].constraint, &VehicleCommand::hold()));
}

#[test]
fn no_directives_no_constraints() {
    assert!(interpret_directives(&[]).unwrap().is_empty());
}

#[test]
fn stop_line_one_cell_ahead_at_speed_two_admits_only_slowing() {
    let (world, _) = signal_road(11, 2, 0);
    let obs = world.observe(VehicleId(0), 4).unwrap();
    let scene = Scene::new(&obs, 4);
    let stop = interpret_directives(&[ActionPair::must("stop_at_white_line").unwrap()]).unwrap();
    let admissible: BTreeSet<Longitudinal> = VehicleCommand::movements()
        .filter(|c| scene.is_safe(&scene.plan(c)))
        .filter(|c| scene.admits(stop[0].constraint, c))
        .map(|c| c.longitudinal)
        .collect();
    // Hand check: hold/accelerate keep speed 2 and reach (1,9), past the line
    // at (1,10); decelerate stops on the line; stop stays put.
    assert_eq!(
        admissible,
        BTreeSet::from([Longitudinal::Decelerate, Longitudinal::Stop])
    );
}

#[test]
fn abstract_actions_have_no_constraint() {
    let pairs: Vec<ActionPair> = ["consideration_others", "drive_care_attention", "not_drive_dangerously"]
        .into_iter()
        .map(|a| ActionPair::must(a).unwrap())
        .collect();
    assert!(interpret_directives(&pairs).unwrap().is_empty());
}

#[test]
fn unregistered_action_is_a_hard_error() {
    let pair = ActionPair::must("fly").unwrap();
    let err = interpret_directives(&[pair]).unwrap_err();
    assert!(err.to_string().contains("fly"));
}

#[test]
fn every_corpus_action_is_registered() {
    let rb = corpus();
    for rule in rb.rules() {
        for pair in rule.ap() {
            assert!(meaning(&pair.action).is_some(), "{} in {}", pair.action, rule.name());
        }
    }
}

#[test]
fn perception_speaks_the_corpus_vocabulary() {
    let rb = corpus();
    for atom in PerceptionMap::standard().atoms() {
        assert!(rb.vocabulary().contains(&Atom::new(atom).unwrap()), "{atom}");
    }
}

#[test]
fn perception_is_deterministic() {
    for name in SCENARIO_NAMES {
        let s = load_scenario(name, 3).unwrap();
        let obs = s.world.observe(s.subject, s.radius).unwrap();
        assert_eq!(perceive(&obs, &s.goal), perceive(&obs, &s.goal));
    }
}

#[test]
fn filters_follow_the_policy() {
    let must = ActionPair::must("stop_vehicle").unwrap();
    let should = ActionPair::should("give_way_oncoming").unwrap();
    let pairs = [must.clone(), should.clone()];
    assert_eq!(PolicyKind::Reactive.filter().apply(&pairs), pairs);
    assert_eq!(PolicyKind::Proactive.filter().apply(&pairs), pairs);
    assert_eq!(PolicyKind::MorallyBankrupt.filter().apply(&pairs), vec![must]);
    assert!(!PolicyKind::MorallyBankrupt.filter().accepts(&should));
    assert_eq!(should.label, Label::Should);
}

#[test]
fn empty_rule_base_gives_the_greedy_command() {
    let rb = RuleBase::empty();
    let (world, goal) = signal_road(11, 2, 0);
    let obs = world.observe(VehicleId(0), 4).unwrap();
    let (cmd, record) = Agent::new(PolicyKind::Reactive, &rb, 4).decide(&obs, &goal).unwrap();
    assert!(record.directives.is_empty());
    // Nothing forbids running the light.
    assert_eq!(cmd, VehicleCommand::hold());
}

#[test]
fn prediction_moves_the_observer_and_holds_others() {
    let s = load_scenario("overtake", 1).unwrap();
    let obs = s.world.observe(s.subject, s.radius).unwrap();
    let cmd = VehicleCommand::new(Longitudinal::Accelerate, Lateral::Keep);
    let next = predict(&obs, &cmd);
    assert_eq!(next.step, obs.step + 1);
    assert_eq!(next.me().position, Pos::new(1, 25));
    assert_eq!(next.me().speed, 1);
}

#[test]
fn policy_names_round_trip() {
    for k in PolicyKind::ALL {
        assert_eq!(k.as_str().parse::<PolicyKind>().unwrap(), k);
    }
    assert!("careful".parse::<PolicyKind>().is_err());
}

#[test]
fn proactive_looks_one_step_ahead() {
    let rb = corpus();
    let (world, goal) = signal_road(14, 2, 0);
    let obs = world.observe(VehicleId(0), 4).unwrap();
    let (p_cmd, p_rec) = Agent::new(PolicyKind::Proactive, &rb, 4).decide(&obs, &goal).unwrap();
    let (r_cmd, r_rec) = Agent::new(PolicyKind::Reactive, &rb, 4).decide(&obs, &goal).unwrap();
    let predicted = p_rec.predicted.expect("prediction recorded");
    assert!(predicted.contains(&ActionPair::must("stop_at_white_line").unwrap()));
    assert!(r_rec.predicted.is_none());
    assert_eq!(p_cmd, r_cmd);
}
