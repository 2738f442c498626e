use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::protocol::FlatDescription;
use crate::world::{normalize_room, FlatGraph};

/// How well a reported flat description matches the real flat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapScore {
    pub rooms_matched: usize,
    pub rooms_total: usize,
    pub doors_matched: usize,
    pub doors_total: usize,
    pub extraneous_rooms: usize,
    pub extraneous_doors: usize,
}

impl MapScore {
    pub fn is_perfect(&self) -> bool {
        self.rooms_matched == self.rooms_total
            && self.doors_matched == self.doors_total
            && self.extraneous_rooms == 0
            && self.extraneous_doors == 0
    }
}

/// Rooms match by normalized name. A door matches when its id exists and it
/// joins the same two rooms, in either orientation; any other reported door
/// is extraneous.
pub fn score_flat_description(fd: &FlatDescription, truth: &FlatGraph) -> MapScore {
    let true_rooms: BTreeSet<String> = truth.rooms.iter().map(|r| normalize_room(r)).collect();
    let reported: BTreeSet<String> = fd.rooms.iter().map(|r| normalize_room(r)).collect();
    let rooms_matched = reported.intersection(&true_rooms).count();

    let ends = |a: &str, b: &str| -> BTreeSet<String> {
        [normalize_room(a), normalize_room(b)].into_iter().collect()
    };
    let doors_matched = fd
        .doors
        .iter()
        .filter(|(id, d)| {
            let id = id.trim().to_ascii_lowercase();
            truth
                .doors
                .iter()
                .any(|t| t.id.as_str() == id && ends(&t.from, &t.to) == ends(&d.from, &d.to))
        })
        .count();

    MapScore {
        rooms_matched,
        rooms_total: true_rooms.len(),
        doors_matched,
        doors_total: truth.doors.len(),
        extraneous_rooms: reported.len() - rooms_matched,
        extraneous_doors: fd.doors.len() - doors_matched,
    }
}
