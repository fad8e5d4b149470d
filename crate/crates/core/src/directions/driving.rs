use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{DirectionsError, Itinerary, MapDataset, Place, RouteStep, StepKind};

/// Shortest driving route over the road graph.
///
/// Consecutive segments on the same street become a single Drive step.
/// Among equally short routes the one with fewer segments wins, then the one
/// whose place indices sort first.
pub fn plan_driving(
    dataset: &MapDataset,
    from: &Place,
    to: &Place,
    depart_at: u32,
) -> Result<Itinerary, DirectionsError> {
    let unreachable = || DirectionsError::Unreachable {
        from: from.canonical_name.clone(),
        to: to.canonical_name.clone(),
    };
    let (Some(src), Some(dst)) = (dataset.place_index(&from.id), dataset.place_index(&to.id))
    else {
        return Err(unreachable());
    };
    if src == dst {
        return Err(DirectionsError::SamePlace(from.canonical_name.clone()));
    }
    let n = dataset.places().len();
    let mut adj: Vec<Vec<(usize, u32, usize)>> = vec![Vec::new(); n];
    for (ri, r) in dataset.roads().iter().enumerate() {
        let (a, b) = (
            dataset.place_index(&r.from).unwrap(),
            dataset.place_index(&r.to).unwrap(),
        );
        adj[a].push((b, r.travel_minutes, ri));
        adj[b].push((a, r.travel_minutes, ri));
    }
    for edges in &mut adj {
        edges.sort_unstable();
    }

    let mut best: Vec<Option<(u32, usize)>> = vec![None; n];
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    best[src] = Some((0, 0));
    heap.push(Reverse((0u32, 0usize, src)));
    while let Some(Reverse((d, hops, u))) = heap.pop() {
        if best[u].is_some_and(|b| b < (d, hops)) {
            continue;
        }
        if u == dst {
            break;
        }
        for &(v, minutes, road) in &adj[u] {
            let cand = (d + minutes, hops + 1);
            if best[v].is_none_or(|b| cand < b) {
                best[v] = Some(cand);
                prev[v] = Some((u, road));
                heap.push(Reverse((cand.0, cand.1, v)));
            }
        }
    }
    if best[dst].is_none() {
        return Err(unreachable());
    }

    let mut path = Vec::new();
    let mut at = dst;
    while let Some((u, road)) = prev[at] {
        path.push((u, at, road));
        at = u;
    }
    path.reverse();

    let places = dataset.places();
    let roads = dataset.roads();
    let mut steps: Vec<RouteStep> = Vec::new();
    let mut clock = depart_at;
    for (u, v, road) in path {
        let r = &roads[road];
        let arrive = clock + r.travel_minutes;
        match steps.last_mut() {
            Some(last) if last.street.as_deref() == Some(r.name.as_str()) => {
                last.to = (&places[v]).into();
                last.arrive = arrive;
            }
            _ => steps.push(RouteStep::new(
                StepKind::Drive,
                &places[u],
                &places[v],
                None,
                Some(r.name.clone()),
                clock,
                arrive,
            )),
        }
        clock = arrive;
    }
    Ok(Itinerary::new(steps))
}
