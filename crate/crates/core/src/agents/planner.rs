use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::world::{normalize_room, FlatGraph, ObjectId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("no path from {from:?} to {to:?}")]
    Unreachable { from: String, to: String },
    #[error("unknown room {0:?}")]
    UnknownRoom(String),
}

/// Shortest door sequence from `from` to `to`.
///
/// With `bidirectional = false` a door can only be passed in its recorded
/// `from -> to` orientation. Neighbours are expanded in door-id order, so
/// among equally short paths the one found first by that order wins.
pub fn bfs_shortest_doors(
    g: &FlatGraph,
    from: &str,
    to: &str,
    bidirectional: bool,
) -> Result<Vec<ObjectId>, PlanError> {
    for room in [from, to] {
        if !g.contains_room(room) {
            return Err(PlanError::UnknownRoom(room.to_string()));
        }
    }
    let (start, goal) = (normalize_room(from), normalize_room(to));
    if start == goal {
        return Ok(Vec::new());
    }

    let mut doors: Vec<_> = g.doors.iter().collect();
    doors.sort_by(|a, b| a.id.cmp(&b.id));

    // room -> (previous room, door used)
    let mut parent: BTreeMap<String, (String, ObjectId)> = BTreeMap::new();
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(room) = queue.pop_front() {
        for door in &doors {
            let (a, b) = (normalize_room(&door.from), normalize_room(&door.to));
            let next = if a == room {
                b
            } else if bidirectional && b == room {
                a
            } else {
                continue;
            };
            if next == start || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), (room.clone(), door.id.clone()));
            if next == goal {
                let mut path = Vec::new();
                let mut cursor = goal;
                while cursor != start {
                    let (prev, door) = parent[&cursor].clone();
                    path.push(door);
                    cursor = prev;
                }
                path.reverse();
                return Ok(path);
            }
            queue.push_back(next);
        }
    }
    Err(PlanError::Unreachable {
        from: from.to_string(),
        to: to.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::load_scenario;

    const FLAT7: &str = include_str!("../../../../assets/scenarios/flat7.json");

    fn ids(list: &[&str]) -> Vec<ObjectId> {
        list.iter().map(|s| ObjectId::new(*s).unwrap()).collect()
    }

    #[test]
    fn flat7_paths() {
        let g = load_scenario(FLAT7).unwrap().flat;
        assert_eq!(
            bfs_shortest_doors(&g, "living room", "play room", true).unwrap(),
            ids(&["door3", "door6"])
        );
        assert_eq!(bfs_shortest_doors(&g, "corridor", "corridor", true).unwrap(), vec![]);
        assert_eq!(bfs_shortest_doors(&g, "corridor", "corridor", false).unwrap(), vec![]);
        assert_eq!(
            bfs_shortest_doors(&g, "kitchen", "bathroom", true).unwrap(),
            ids(&["door8", "door4"])
        );
        assert_eq!(
            bfs_shortest_doors(&g, "dining room", "bathroom", false).unwrap(),
            ids(&["door1", "door8", "door4"])
        );
        // forward-only: door6 points out of the play room
        assert!(matches!(
            bfs_shortest_doors(&g, "living room", "play room", false),
            Err(PlanError::Unreachable { .. })
        ));
        assert!(matches!(
            bfs_shortest_doors(&g, "attic", "kitchen", true),
            Err(PlanError::UnknownRoom(_))
        ));
    }
}
