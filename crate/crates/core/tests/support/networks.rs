//! Random small transit networks and an exhaustive earliest-arrival oracle.

use getgoing_core::directions::{MapDataset, Place, PlaceKind, TransitLine, WalkEdge};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub map: MapDataset,
    pub from: String,
    pub to: String,
    pub depart_after: u32,
}

/// Up to 6 stops, up to 3 lines with up to 3 runs each, a few walk links.
pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=6);
    let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let places = ids
        .iter()
        .map(|id| Place {
            id: id.clone(),
            canonical_name: format!("Stop {id}"),
            aliases: Vec::new(),
            kind: PlaceKind::Landmark,
            streets: Vec::new(),
            lat: 40.0,
            lon: -80.0,
        })
        .collect();
    let lines = (0..rng.gen_range(1..=3).max(rng.gen_range(1..=3)))
        .map(|li| {
            let mut stops = ids.clone();
            stops.shuffle(&mut rng);
            stops.truncate(rng.gen_range(2..=n).max(rng.gen_range(2..=n)));
            let mut departures: Vec<u32> = (0..rng.gen_range(1..=3))
                .map(|_| rng.gen_range(20..150))
                .collect();
            departures.sort_unstable();
            departures.dedup();
            TransitLine {
                id: format!("L{li}"),
                line_number: format!("{}", 10 + li),
                inter_stop_minutes: (1..stops.len()).map(|_| rng.gen_range(1..=15)).collect(),
                stops,
                departures,
            }
        })
        .collect();
    let mut walks: Vec<WalkEdge> = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            walks.push(WalkEdge {
                from: ids[a].clone(),
                to: ids[b].clone(),
                minutes: rng.gen_range(5..=40),
            });
        }
    }
    let from = rng.gen_range(0..n);
    let to = (from + rng.gen_range(1..n)) % n;
    Case {
        map: MapDataset::new(places, lines, walks, Vec::new()).expect("generated network is valid"),
        from: ids[from].clone(),
        to: ids[to].clone(),
        depart_after: rng.gen_range(0..40),
    }
}

/// Earliest arrival over every simple sequence of walks and boardings
/// (any run, any alighting stop), found by depth-first enumeration.
pub fn brute_force(map: &MapDataset, from: &str, to: &str, depart_after: u32) -> Option<u32> {
    let mut best = None;
    let mut visited = vec![from.to_string()];
    dfs(map, from, to, depart_after, &mut visited, &mut best);
    best
}

fn dfs(
    map: &MapDataset,
    here: &str,
    to: &str,
    t: u32,
    visited: &mut Vec<String>,
    best: &mut Option<u32>,
) {
    if here == to {
        *best = Some(best.map_or(t, |b: u32| b.min(t)));
        return;
    }
    let mut moves: Vec<(String, u32)> = Vec::new();
    for w in map.walks() {
        if w.from == here {
            moves.push((w.to.clone(), t + w.minutes));
        }
        if w.to == here {
            moves.push((w.from.clone(), t + w.minutes));
        }
    }
    for line in map.lines() {
        let Some(i) = line.stops.iter().position(|s| s == here) else {
            continue;
        };
        for &run in &line.departures {
            let board = run + line.inter_stop_minutes[..i].iter().sum::<u32>();
            if board < t {
                continue;
            }
            for j in i + 1..line.stops.len() {
                let arrive = run + line.inter_stop_minutes[..j].iter().sum::<u32>();
                moves.push((line.stops[j].clone(), arrive));
            }
        }
    }
    for (next, arrive) in moves {
        if visited.contains(&next) {
            continue;
        }
        visited.push(next.clone());
        dfs(map, &next, to, arrive, visited, best);
        visited.pop();
    }
}
