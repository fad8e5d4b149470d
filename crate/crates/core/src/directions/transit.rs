use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::{Itinerary, MapDataset, Place, RouteStep, StepKind};

/// Longest chain of bus rides the planner will consider.
pub const MAX_BUS_LEGS: usize = 5;

/// Search state: a place reached by a given sequence of line numbers.
type Key = (usize, Vec<String>);

#[derive(Debug, Clone)]
struct Label {
    arrive: u32,
    steps: usize,
    prev: Option<(Key, Hop)>,
}

#[derive(Debug, Clone)]
struct Hop {
    kind: StepKind,
    from: usize,
    to: usize,
    line: Option<usize>,
    depart: u32,
    arrive: u32,
}

fn walk_links(dataset: &MapDataset) -> Vec<Vec<(usize, u32)>> {
    let mut adj = vec![Vec::new(); dataset.places().len()];
    for w in dataset.walks() {
        let (a, b) = (
            dataset.place_index(&w.from).unwrap(),
            dataset.place_index(&w.to).unwrap(),
        );
        adj[a].push((b, w.minutes));
        adj[b].push((a, w.minutes));
    }
    adj
}

/// Earliest-arrival transit itineraries, one per distinct line-number
/// sequence, sorted by arrival, then step count, then line numbers.
///
/// Labels are keyed by place and line sequence and settled in arrival
/// order; each place settles at most `max_alternatives` of them. The first
/// label settled at a place is its earliest arrival, so the best itinerary
/// is exact and later ones are the best found within that bound.
///
/// Boarding takes the first run at or after the rider reaches the stop.
/// Walk legs before the first bus are shifted to arrive just in time.
/// Returns an empty list when the destination cannot be reached today.
pub fn plan_transit(
    dataset: &MapDataset,
    from: &Place,
    to: &Place,
    depart_after: u32,
    max_alternatives: usize,
) -> Vec<Itinerary> {
    let (Some(src), Some(dst)) = (dataset.place_index(&from.id), dataset.place_index(&to.id))
    else {
        return Vec::new();
    };
    if src == dst || max_alternatives == 0 {
        return Vec::new();
    }
    let walks = walk_links(dataset);
    let lines = dataset.lines();
    let stop_lists: Vec<Vec<usize>> = lines
        .iter()
        .map(|l| {
            l.stops
                .iter()
                .map(|s| dataset.place_index(s).unwrap())
                .collect()
        })
        .collect();
    let offsets: Vec<Vec<u32>> = lines.iter().map(|l| l.offsets()).collect();

    let mut labels: BTreeMap<Key, Label> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    let start: Key = (src, Vec::new());
    labels.insert(
        start.clone(),
        Label {
            arrive: depart_after,
            steps: 0,
            prev: None,
        },
    );
    heap.push(Reverse((depart_after, 0usize, start)));

    let mut settled = vec![0usize; dataset.places().len()];
    let mut found: Vec<Key> = Vec::new();
    while let Some(Reverse((time, steps, key))) = heap.pop() {
        if labels
            .get(&key)
            .is_some_and(|l| (l.arrive, l.steps) < (time, steps))
        {
            continue;
        }
        let (here, ref seq) = key;
        if settled[here] == max_alternatives {
            continue;
        }
        settled[here] += 1;
        if here == dst {
            found.push(key.clone());
            if found.len() == max_alternatives {
                break;
            }
            continue;
        }
        // Stepping off and back onto the same line number never helps.
        let last_line = labels[&key]
            .prev
            .as_ref()
            .and_then(|(_, h)| h.line)
            .map(|li| lines[li].line_number.as_str());
        let mut relax = |next: Key, hop: Hop, heap: &mut BinaryHeap<Reverse<(u32, usize, Key)>>| {
            let cand = (hop.arrive, steps + 1);
            let improves = labels.get(&next).is_none_or(|l| cand < (l.arrive, l.steps));
            if improves {
                labels.insert(
                    next.clone(),
                    Label {
                        arrive: hop.arrive,
                        steps: steps + 1,
                        prev: Some((key.clone(), hop)),
                    },
                );
                heap.push(Reverse((cand.0, cand.1, next)));
            }
        };
        for &(there, minutes) in &walks[here] {
            let hop = Hop {
                kind: StepKind::Walk,
                from: here,
                to: there,
                line: None,
                depart: time,
                arrive: time + minutes,
            };
            relax((there, seq.clone()), hop, &mut heap);
        }
        if seq.len() >= MAX_BUS_LEGS {
            continue;
        }
        for (li, line) in lines.iter().enumerate() {
            if last_line == Some(line.line_number.as_str()) {
                continue;
            }
            let Some(i) = stop_lists[li].iter().position(|&s| s == here) else {
                continue;
            };
            let Some(run) = line
                .departures
                .iter()
                .find(|&&d| d + offsets[li][i] >= time)
            else {
                continue;
            };
            let mut next_seq = seq.clone();
            next_seq.push(line.line_number.clone());
            for j in i + 1..stop_lists[li].len() {
                let hop = Hop {
                    kind: StepKind::Bus,
                    from: here,
                    to: stop_lists[li][j],
                    line: Some(li),
                    depart: run + offsets[li][i],
                    arrive: run + offsets[li][j],
                };
                relax((stop_lists[li][j], next_seq.clone()), hop, &mut heap);
            }
        }
    }

    found
        .iter()
        .map(|key| build(dataset, &labels, key))
        .collect()
}

fn build(dataset: &MapDataset, labels: &BTreeMap<Key, Label>, end: &Key) -> Itinerary {
    let mut hops = Vec::new();
    let mut key = end;
    while let Some((prev, hop)) = &labels[key].prev {
        hops.push(hop.clone());
        key = prev;
    }
    hops.reverse();
    // Leave as late as possible for the walk that leads to the first bus.
    if let Some(first_bus) = hops.iter().position(|h| h.kind == StepKind::Bus) {
        let mut t = hops[first_bus].depart;
        for h in hops[..first_bus].iter_mut().rev() {
            let len = h.arrive - h.depart;
            h.arrive = t;
            h.depart = t - len;
            t = h.depart;
        }
    }
    let places = dataset.places();
    let lines = dataset.lines();
    let steps = hops
        .into_iter()
        .map(|h| {
            let line = h.line.map(|li| &lines[li]);
            RouteStep::new(
                h.kind,
                &places[h.from],
                &places[h.to],
                line.map(|l| l.line_number.clone()),
                None,
                h.depart,
                h.arrive,
            )
        })
        .collect();
    Itinerary::new(steps)
}
