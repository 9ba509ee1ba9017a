use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use roadrules_core::simworld::*;

fn ring_map(width: usize, height: usize) -> GridMap {
    // One eastbound lane on every row.
    let cells = vec![Cell::lane(Heading::E, 0); width * height];
    GridMap::new(Dims::new(width, height), cells, BTreeSet::new()).unwrap()
}

fn car(id: u32, x: usize, y: usize, heading: Heading, speed: u8) -> VehicleState {
    VehicleState {
        id: VehicleId(id),
        position: Pos::new(x, y),
        heading,
        speed,
        max_speed: 2,
        lamps: Lamps::default(),
        kind: if id == 0 {
            VehicleKind::Subject
        } else {
            VehicleKind::Traffic
        },
    }
}

fn holds(world: &World) -> BTreeMap<VehicleId, VehicleCommand> {
    world
        .vehicles()
        .keys()
        .map(|id| (*id, VehicleCommand::hold()))
        .collect()
}

#[test]
fn constant_speed_on_a_ring() {
    let mut world = World::new(ring_map(7, 1), [], [car(0, 0, 0, Heading::E, 2)]).unwrap();
    for t in 1..=20u64 {
        world = world.step(&holds(&world)).unwrap().world;
        let expected = (2 * t % 7) as usize;
        assert_eq!(world.vehicle(VehicleId(0)).unwrap().position, Pos::new(expected, 0));
    }
}

#[test]
fn moving_off_the_east_edge_wraps() {
    let world = World::new(ring_map(10, 10), [], [car(0, 9, 4, Heading::E, 1)]).unwrap();
    let next = world.step(&holds(&world)).unwrap().world;
    assert_eq!(next.vehicle(VehicleId(0)).unwrap().position, Pos::new(0, 4));
}

#[test]
fn contention_reverts_both_claimants() {
    // The car behind at speed 2 and the car ahead at speed 1 both claim (2,2).
    let map = ring_map(5, 5);
    let a = car(1, 0, 2, Heading::E, 2);
    let b = car(2, 1, 2, Heading::E, 1);
    let world = World::new(map, [], [a, b]).unwrap();
    let result = world.step(&holds(&world)).unwrap();
    assert_eq!(
        result.events,
        vec![SimEvent::Contention {
            cell: Pos::new(2, 2),
            vehicles: vec![VehicleId(1), VehicleId(2)],
        }]
    );
    assert_eq!(result.world.vehicle(VehicleId(1)).unwrap().position, Pos::new(0, 2));
    assert_eq!(result.world.vehicle(VehicleId(2)).unwrap().position, Pos::new(1, 2));
    assert_eq!(result.world.vehicle(VehicleId(1)).unwrap().speed, 0);
}

#[test]
fn entering_a_kept_cell_is_a_collision() {
    let world = World::new(
        ring_map(10, 1),
        [],
        [car(0, 0, 0, Heading::E, 1), car(1, 1, 0, Heading::E, 0)],
    )
    .unwrap();
    let result = world.step(&holds(&world)).unwrap();
    assert!(result.collided());
    assert!(result.events.contains(&SimEvent::Collision {
        vehicle: VehicleId(0),
        other: VehicleId(1),
        cell: Pos::new(1, 0),
    }));
}

#[test]
fn following_at_equal_speed_is_not_a_collision() {
    let world = World::new(
        ring_map(10, 1),
        [],
        [car(0, 0, 0, Heading::E, 1), car(1, 1, 0, Heading::E, 1)],
    )
    .unwrap();
    let result = world.step(&holds(&world)).unwrap();
    assert!(result.events.is_empty());
}

#[test]
fn command_errors() {
    let world = World::new(ring_map(5, 1), [], [car(0, 0, 0, Heading::E, 0)]).unwrap();
    assert!(matches!(
        world.step(&BTreeMap::new()),
        Err(SimError::MissingCommand(VehicleId(0)))
    ));
    assert!(matches!(
        world.step_with([
            (VehicleId(0), VehicleCommand::hold()),
            (VehicleId(0), VehicleCommand::stop())
        ]),
        Err(SimError::DuplicateCommand(VehicleId(0)))
    ));
    let mut extra = holds(&world);
    extra.insert(VehicleId(9), VehicleCommand::hold());
    assert!(matches!(world.step(&extra), Err(SimError::UnknownVehicle(VehicleId(9)))));
}

#[test]
fn turn_away_from_a_junction_is_blocked() {
    let world = World::new(ring_map(5, 5), [], [car(0, 0, 0, Heading::E, 1)]).unwrap();
    let cmd = VehicleCommand::new(Longitudinal::Hold, Lateral::TurnRight);
    let result = world.step_with([(VehicleId(0), cmd)]).unwrap();
    assert_eq!(result.events, vec![SimEvent::Blocked { vehicle: VehicleId(0) }]);
    assert_eq!(result.world.vehicle(VehicleId(0)).unwrap().position, Pos::new(0, 0));
}

#[test]
fn corner_observer_sees_the_opposite_corner() {
    let world = World::new(
        ring_map(10, 10),
        [],
        [car(0, 0, 0, Heading::E, 0), car(1, 9, 9, Heading::E, 0)],
    )
    .unwrap();
    let obs = world.observe(VehicleId(0), 2).unwrap();
    assert!(obs.sees(Pos::new(9, 9)));
    assert!(obs.vehicles.contains_key(&VehicleId(1)));
    assert_eq!(obs.cells.len(), 25);
}

#[test]
fn zero_radius_sees_only_own_cell() {
    let world = World::new(
        ring_map(10, 10),
        [],
        [car(0, 4, 4, Heading::E, 0), car(1, 5, 4, Heading::E, 0)],
    )
    .unwrap();
    let obs = world.observe(VehicleId(0), 0).unwrap();
    assert_eq!(obs.cells.keys().copied().collect::<Vec<_>>(), vec![Pos::new(4, 4)]);
    assert_eq!(obs.vehicles.keys().copied().collect::<Vec<_>>(), vec![VehicleId(0)]);
}

#[test]
fn lights_tick_once_per_step() {
    let light = TrafficLight::new(LightId(1), vec![Pos::new(2, 0)], [4, 1, 4, 1], 0);
    let mut world = World::new(ring_map(5, 1), [light], [car(0, 0, 0, Heading::E, 0)]).unwrap();
    let mut seen = Vec::new();
    for _ in 0..10 {
        seen.push(world.light_phase(LightId(1)).unwrap());
        world = world.step(&holds(&world)).unwrap().world;
    }
    use Phase::*;
    assert_eq!(seen, [Red, Red, Red, Red, RedAmber, Green, Green, Green, Green, Amber]);
}

#[test]
fn shipped_scenarios_load_for_all_seeds() {
    for name in SCENARIO_NAMES {
        for seed in 0..20 {
            let s = load_scenario(name, seed).unwrap();
            let subject = s.world.vehicle(s.subject).unwrap();
            assert!(s.goal.distance(subject.position) < DistanceField::UNREACHABLE, "{name}");
        }
    }
    assert!(matches!(load_scenario("nowhere", 1), Err(SimError::UnknownScenario(_))));
}

#[test]
fn seeding_is_deterministic() {
    for name in SCENARIO_NAMES {
        let a = load_scenario(name, 7).unwrap();
        let b = load_scenario(name, 7).unwrap();
        assert_eq!(a.world, b.world);
    }
}

#[test]
fn map_errors_carry_line_numbers() {
    let text = "name: x\nsize: 2 1\n---\n^S ?\n";
    match parse_scenario(text) {
        Err(SimError::MapParse { line, .. }) => assert_eq!(line, 4),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn distance_field_counts_turns_as_one_move() {
    let s = load_scenario("right_turn", 1).unwrap();
    assert_eq!(s.goal.distance(Pos::new(6, 10)), 0);
    assert_eq!(s.goal.distance(Pos::new(3, 10)), 3);
    assert_eq!(s.goal.distance(Pos::new(1, 10)), 4);
    assert_eq!(s.goal.distance(Pos::new(1, 11)), 5);
}

#[test]
fn scripted_traffic_never_runs_into_a_stopped_car() {
    let template = parse_scenario(scenario_text("traffic_light").unwrap()).unwrap();
    let mut world = template.instantiate(1).unwrap().world;
    // Drive only traffic; park the subject out of the way by stopping it.
    for _ in 0..30 {
        let cmds: BTreeMap<_, _> = world
            .vehicles()
            .keys()
            .map(|id| {
                let cmd = if *id == VehicleId(0) {
                    VehicleCommand::stop()
                } else {
                    scripted_command(&world, *id)
                };
                (*id, cmd)
            })
            .collect();
        let result = world.step(&cmds).unwrap();
        assert!(!result.collided());
        world = result.world;
    }
}

// Brute force: a cell is visible iff some offset in [-r, r]^2 reaches it.
fn oracle_visible(dims: Dims, c: Pos, r: usize) -> BTreeSet<Pos> {
    let mut out = BTreeSet::new();
    for x in 0..dims.width {
        for y in 0..dims.height {
            let p = Pos::new(x, y);
            let r = r as i64;
            let hit = (-r..=r).any(|dx| {
                (-r..=r).any(|dy| {
                    (c.x as i64 + dx).rem_euclid(dims.width as i64) == x as i64
                        && (c.y as i64 + dy).rem_euclid(dims.height as i64) == y as i64
                })
            });
            if hit {
                out.insert(p);
            }
        }
    }
    out
}

fn world_strategy() -> impl Strategy<Value = (World, usize)> {
    (2usize..9, 2usize..9, 0usize..6).prop_flat_map(|(w, h, r)| {
        let n = w * h;
        (
            Just((w, h, r)),
            proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..n.min(6) + 1),
            proptest::collection::vec(0u8..3, 6),
        )
            .prop_map(|((w, h, r), idx, speeds)| {
                let vehicles: Vec<_> = idx
                    .iter()
                    .enumerate()
                    .map(|(i, &cell)| car(i as u32, cell % w, cell / w, Heading::E, speeds[i]))
                    .collect();
                (World::new(ring_map(w, h), [], vehicles).unwrap(), r)
            })
    })
}

proptest! {
    #[test]
    fn observation_matches_oracle((world, r) in world_strategy()) {
        for id in world.vehicles().keys() {
            let me = world.vehicle(*id).unwrap();
            let obs = world.observe(*id, r).unwrap();
            let expected = oracle_visible(world.dims(), me.position, r);
            let got: BTreeSet<Pos> = obs.cells.keys().copied().collect();
            prop_assert_eq!(&got, &expected);
            let seen: BTreeSet<VehicleId> = obs.vehicles.keys().copied().collect();
            let oracle: BTreeSet<VehicleId> = world
                .vehicles()
                .values()
                .filter(|v| expected.contains(&v.position))
                .map(|v| v.id)
                .collect();
            prop_assert_eq!(seen, oracle);
        }
    }

    #[test]
    fn visibility_is_symmetric((world, r) in world_strategy()) {
        for a in world.vehicles().keys() {
            for b in world.vehicles().keys() {
                let ab = world.observe(*a, r).unwrap().vehicles.contains_key(b);
                let ba = world.observe(*b, r).unwrap().vehicles.contains_key(a);
                prop_assert_eq!(ab, ba);
            }
        }
    }

    #[test]
    fn command_order_does_not_matter(
        (world, _r) in world_strategy(),
        lon in proptest::collection::vec(0usize..4, 6),
        rotate in 0usize..6,
    ) {
        let mut pairs: Vec<(VehicleId, VehicleCommand)> = world
            .vehicles()
            .keys()
            .enumerate()
            .map(|(i, id)| (*id, VehicleCommand::new(Longitudinal::ALL[lon[i]], Lateral::Keep)))
            .collect();
        let forward = world.step_with(pairs.clone()).unwrap();
        let k = rotate % pairs.len();
        pairs.rotate_left(k);
        pairs.reverse();
        let shuffled = world.step_with(pairs).unwrap();
        prop_assert_eq!(forward.world, shuffled.world);
        prop_assert_eq!(forward.events, shuffled.events);
    }

    #[test]
    fn no_two_vehicles_share_a_cell_after_a_step(
        (world, _r) in world_strategy(),
        lon in proptest::collection::vec(0usize..4, 6),
    ) {
        let cmds = world
            .vehicles()
            .keys()
            .enumerate()
            .map(|(i, id)| (*id, VehicleCommand::new(Longitudinal::ALL[lon[i]], Lateral::Keep)));
        let result = world.step_with(cmds).unwrap();
        if !result.collided() {
            let cells: BTreeSet<Pos> = result.world.vehicles().values().map(|v| v.position).collect();
            prop_assert_eq!(cells.len(), result.world.vehicles().len());
        }
    }
}
