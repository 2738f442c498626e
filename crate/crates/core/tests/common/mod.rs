//! Random generators and brute-force oracles shared by the property suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use inloop_core::envs::step;
use inloop_core::protocol::{parse_command, Dialect, Response};
use inloop_core::world::{
    check_forest, initial_state, load_scenario, Door, FlatGraph, Location, ObjectId, Scenario,
    WorldState,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn id(s: &str) -> ObjectId {
    ObjectId::new(s).unwrap()
}

/// A connected flat with 1..=max_rooms rooms and at most max_doors doors
/// (never fewer than a spanning tree needs). Door numbers are shuffled so
/// declaration order and id order disagree.
pub fn random_flat(rng: &mut ChaCha8Rng, max_rooms: usize, max_doors: usize) -> FlatGraph {
    let n = rng.gen_range(1..=max_rooms);
    let rooms: Vec<String> = (0..n).map(|i| format!("room {}", i + 1)).collect();
    let mut pairs = Vec::new();
    for i in 1..n {
        pairs.push((rng.gen_range(0..i), i));
    }
    let extra = if n > 1 { rng.gen_range(0..=max_doors.saturating_sub(n - 1)) } else { 0 };
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            pairs.push((a, b));
        }
    }
    pairs.shuffle(rng);
    let mut numbers: Vec<usize> = (1..=pairs.len()).collect();
    numbers.shuffle(rng);
    let doors = pairs
        .into_iter()
        .zip(numbers)
        .map(|((a, b), k)| {
            let (from, to) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            Door {
                id: id(&format!("door{k}")),
                from: rooms[from].clone(),
                to: rooms[to].clone(),
            }
        })
        .collect();
    FlatGraph { rooms, doors }
}

pub fn exploration_scenario(g: &FlatGraph, start: &str) -> Scenario {
    let doors: serde_json::Map<String, serde_json::Value> = g
        .doors
        .iter()
        .map(|d| (d.id.to_string(), json!({"from": d.from, "to": d.to})))
        .collect();
    let text = json!({
        "kind": "exploration",
        "rooms": g.rooms,
        "doors": doors,
        "start_room": start,
        "task": {"type": "explore"},
    })
    .to_string();
    load_scenario(&text).unwrap()
}

/// Fewest doors to every reachable room, found by enumerating every simple
/// path out of `from`.
pub fn brute_force_distances(g: &FlatGraph, from: &str, bidirectional: bool) -> BTreeMap<String, usize> {
    fn walk(
        g: &FlatGraph,
        room: &str,
        bidirectional: bool,
        visited: &mut BTreeSet<String>,
        depth: usize,
        best: &mut BTreeMap<String, usize>,
    ) {
        let known = best.entry(room.to_string()).or_insert(depth);
        *known = (*known).min(depth);
        for d in &g.doors {
            let next = if d.from == room {
                &d.to
            } else if bidirectional && d.to == room {
                &d.from
            } else {
                continue;
            };
            if visited.insert(next.clone()) {
                walk(g, next, bidirectional, visited, depth + 1, best);
                visited.remove(next);
            }
        }
    }
    let mut best = BTreeMap::new();
    let mut visited = BTreeSet::from([from.to_string()]);
    walk(g, from, bidirectional, &mut visited, 0, &mut best);
    best
}

const KINDS: [&str; 6] = ["fork", "knife", "plate", "glass", "ball", "lamp"];
const FURNITURE: [&str; 4] = ["table", "box", "shelf", "cupboard"];

/// A random search or manipulation room, built as scenario JSON and loaded
/// through the normal validator.
pub fn random_room(rng: &mut ChaCha8Rng, manipulation: bool) -> Scenario {
    let count = rng.gen_range(1..=5);
    let mut furniture = serde_json::Map::new();
    let mut holders: Vec<(String, bool)> = vec![("floor".into(), false)];
    let mut surfaces = Vec::new();
    for i in 0..count {
        let name = format!("{}{}", FURNITURE.choose(rng).unwrap(), i + 1);
        let interior = rng.gen_bool(0.6);
        let openable = interior && rng.gen_bool(0.8);
        // the first one always has a surface so a table task is possible
        let surface = i == 0 || !interior || rng.gen_bool(0.7);
        furniture.insert(
            name.clone(),
            json!({"openable": openable, "surface": surface, "interior": interior}),
        );
        if surface {
            holders.push((name.clone(), false));
            surfaces.push(name.clone());
        }
        if interior {
            holders.push((name.clone(), true));
        }
    }
    let mut objects = serde_json::Map::new();
    let mut names = Vec::new();
    for i in 0..rng.gen_range(0..=10) {
        let name = format!("{}{}", KINDS.choose(rng).unwrap(), 10 + i);
        let (holder, inside) = holders.choose(rng).unwrap();
        let key = if *inside { "in" } else { "on" };
        objects.insert(name.clone(), json!({ key: holder }));
        names.push(name);
    }
    let (kind, task) = if manipulation {
        let mut kinds: Vec<String> = names
            .iter()
            .map(|n| n.trim_end_matches(|c: char| c.is_ascii_digit()).to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if kinds.is_empty() {
            kinds.push("fork".into());
        }
        (
            "manipulation",
            json!({"type": "dress_table", "persons": rng.gen_range(1..=2), "table": surfaces[0], "kinds": kinds}),
        )
    } else {
        let target = names.choose(rng).cloned().unwrap_or_else(|| surfaces[0].clone());
        ("search", json!({"type": "find", "target": target}))
    };
    let text = json!({"kind": kind, "furniture": furniture, "objects": objects, "task": task}).to_string();
    load_scenario(&text).unwrap()
}

/// A command sequence over the scenario's ids plus a stranger; mostly
/// well-formed, sometimes not. Commands favour furniture for moves and looks
/// and objects for TAKE/PUT, and often aim at the furniture last visited, so
/// that a good share of them succeed.
pub fn random_lines(rng: &mut ChaCha8Rng, s: &Scenario, manipulation: bool, len: usize) -> Vec<String> {
    let furniture: Vec<String> = s.furniture.keys().map(|k| k.to_string()).collect();
    let mut objects: Vec<String> = s.objects.keys().map(|k| k.to_string()).collect();
    objects.push("ghost1".into());
    let (on, inside) = if manipulation { ("LOOK ON", "LOOK IN") } else { ("LOOK_ON", "LOOK_INSIDE") };
    let mut focus = furniture[0].clone();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let place = |rng: &mut ChaCha8Rng, focus: &str| -> String {
            match rng.gen_range(0..10) {
                0..=4 => focus.to_string(),
                5..=8 => furniture.choose(rng).unwrap().clone(),
                _ => objects.choose(rng).unwrap().clone(),
            }
        };
        let list = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(1..=3);
            let mut v: Vec<String> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.9) {
                        objects.choose(rng).unwrap().clone()
                    } else {
                        furniture.choose(rng).unwrap().clone()
                    }
                })
                .collect();
            v.sort();
            v.dedup();
            v.join(",")
        };
        let line = match rng.gen_range(0..12) {
            0 | 1 => {
                focus = furniture.choose(rng).unwrap().clone();
                format!("GOTO {focus}")
            }
            2 => format!("OPEN {}", place(rng, &focus)),
            3 => format!("CLOSE {}", place(rng, &focus)),
            4 | 5 => format!("{on} {}", place(rng, &focus)),
            6 | 7 => format!("{inside} {}", place(rng, &focus)),
            8 => format!("TAKE {}", list(rng)),
            9 => format!("PUT {} ON {}", list(rng), place(rng, &focus)),
            10 => format!("PUT {} IN {}", list(rng), place(rng, &focus)),
            _ => ["", "JUMP", "GOTO", "pass door1", "TAKE a1,,b2"].choose(rng).unwrap().to_string(),
        };
        out.push(line);
    }
    out
}

/// Independent oracle for a listing: exactly the objects recorded at `loc`.
pub fn expected_listing(w: &WorldState, loc: &Location) -> Vec<String> {
    let mut v: Vec<String> = w
        .placement
        .iter()
        .filter(|(_, l)| *l == loc)
        .map(|(o, _)| o.to_string())
        .collect();
    v.sort();
    v
}

pub fn sorted(objs: &[ObjectId]) -> Vec<String> {
    let mut v: Vec<String> = objs.iter().map(|o| o.to_string()).collect();
    v.sort();
    v
}

/// Counts of what a checked run exercised, so callers can tell the checks
/// were not vacuous.
#[derive(Debug, Default, Clone, Copy)]
pub struct RunStats {
    pub steps: usize,
    pub listings: usize,
    pub refusals: usize,
}

/// Steps `lines` through the environment asserting: listings show exactly
/// what is at that spot (never a closed interior), refusals leave the
/// serialized state untouched, and the set of objects and the containment
/// forest survive every step.
pub fn check_run(s: &Scenario, lines: &[String], dialect: Dialect) -> RunStats {
    let mut stats = RunStats::default();
    let mut w = initial_state(s);
    let objects: Vec<_> = w.placement.keys().cloned().collect();
    for line in lines {
        let Ok(c) = parse_command(line, dialect) else { continue };
        let r = step(s, &w, &c);
        stats.steps += 1;
        match &r.response {
            Response::SeenOn(f, objs) => {
                assert_eq!(sorted(objs), expected_listing(&w, &Location::OnSurface(f.clone())), "{line}");
            }
            Response::SeenIn(f, objs) => {
                assert!(w.is_open(f), "looked into closed {f}");
                assert_eq!(sorted(objs), expected_listing(&w, &Location::Inside(f.clone())), "{line}");
            }
            _ => {}
        }
        if matches!(r.response, Response::SeenOn(..) | Response::SeenIn(..)) {
            stats.listings += 1;
        }
        if r.response.is_impossible() {
            stats.refusals += 1;
            assert_eq!(serde_json::to_string(&r.state).unwrap(), serde_json::to_string(&w).unwrap(), "{line}");
            assert!(r.violation.is_some());
        }
        w = r.state;
        let now: Vec<_> = w.placement.keys().cloned().collect();
        assert_eq!(now, objects, "object set changed after {line}");
        check_forest(s, &w).unwrap();
    }
    stats
}
