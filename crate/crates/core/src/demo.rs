//! Bundled escape-room scene used by the examples and tests.

use crate::scene::Scene;

pub const ESCAPE_ROOM_JSON: &str = include_str!("../data/escape_room.json");

/// Desk, chair, radio, coffee machine with its brew button, key, door and a
/// few props, with four authored anchors.
pub fn escape_room() -> Scene {
    Scene::from_json(ESCAPE_ROOM_JSON).expect("bundled scene is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scene_round_trips() {
        let s = escape_room();
        assert!(s.objects.len() >= 5);
        for name in ["Desk", "Chair", "Radio", "Brew Button", "Key"] {
            assert!(s.objects.iter().any(|o| o.name == name), "{name}");
        }
        assert_eq!(s.anchor_points().len(), 4);
        assert_eq!(Scene::from_json(&s.to_json()).unwrap(), s);
    }
}
