//! The description store and its CSV file.
//!
//! Columns: `scene_name,anchor_index,yaw_degrees,description`, UTF-8 with a
//! header row and RFC-4180 quoting.

use crate::anchors::{enumerate_views, nearest_view, AnchorError, AnchorPoint, ViewKey};
use crate::scene::Pose;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

pub const CSV_HEADER: [&str; 4] = ["scene_name", "anchor_index", "yaw_degrees", "description"];

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed description CSV at line {line}: {reason}")]
    CsvFormat { line: u64, reason: String },
    #[error("no description for {0}")]
    MissingEntry(ViewKey),
    #[error(transparent)]
    Anchors(#[from] AnchorError),
}

impl StoreError {
    fn format(line: u64, reason: impl Into<String>) -> Self {
        StoreError::CsvFormat {
            line,
            reason: reason.into(),
        }
    }
}

/// Which backend wrote the descriptions. The CSV does not record it, so
/// loaded stores report `Unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Generator {
    Vlm,
    Template,
    #[default]
    Unknown,
}

/// Pre-baked description text per view.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DescriptionStore {
    pub scene_name: String,
    pub generator: Generator,
    entries: BTreeMap<ViewKey, String>,
}

impl DescriptionStore {
    pub fn new(scene_name: impl Into<String>, generator: Generator) -> Self {
        DescriptionStore {
            scene_name: scene_name.into(),
            generator,
            entries: BTreeMap::new(),
        }
    }

    /// Inserts a description. Empty text is rejected.
    pub fn insert(&mut self, key: ViewKey, text: impl Into<String>) -> bool {
        let text = text.into();
        if text.is_empty() {
            return false;
        }
        self.entries.insert(key, text);
        true
    }

    pub fn get(&self, key: &ViewKey) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ViewKey, &str)> {
        self.entries.iter().map(|(k, v)| (k, v.as_str()))
    }

    /// Fails with the first view of `anchors` that has no entry, or if the
    /// store holds views for anchors that are not in the list.
    pub fn check_complete(&self, anchors: &[AnchorPoint]) -> Result<(), StoreError> {
        let views = enumerate_views(anchors)?;
        if let Some(missing) = views.iter().find(|k| !self.entries.contains_key(k)) {
            return Err(StoreError::MissingEntry(*missing));
        }
        if views.len() != self.entries.len() {
            let extra = self
                .entries
                .keys()
                .find(|k| !views.contains(k))
                .expect("extra key exists when sizes differ");
            return Err(StoreError::MissingEntry(*extra));
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        self.write_rows(&mut w)
            .expect("writing to memory cannot fail");
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
    }

    fn write_rows<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> csv::Result<()> {
        w.write_record(CSV_HEADER)?;
        for (k, text) in &self.entries {
            w.write_record([
                self.scene_name.as_str(),
                &k.anchor_index.to_string(),
                &k.yaw().to_string(),
                text.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self, StoreError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(reader);
        let headers = r
            .headers()
            .map_err(|e| StoreError::format(1, e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(StoreError::format(
                1,
                format!("expected header {:?}", CSV_HEADER.join(",")),
            ));
        }
        let mut store: Option<DescriptionStore> = None;
        for record in r.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                StoreError::format(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let scene_name = &record[0];
            let anchor_index: usize = record[1]
                .parse()
                .map_err(|_| StoreError::format(line, "anchor_index is not an integer"))?;
            let yaw: u16 = record[2]
                .parse()
                .map_err(|_| StoreError::format(line, "yaw_degrees is not an integer"))?;
            let key = ViewKey::new(anchor_index, yaw).ok_or_else(|| {
                StoreError::format(line, format!("yaw {yaw} is not a preset view"))
            })?;
            let s =
                store.get_or_insert_with(|| DescriptionStore::new(scene_name, Generator::Unknown));
            if s.scene_name != scene_name {
                return Err(StoreError::format(line, "rows name different scenes"));
            }
            if s.entries.contains_key(&key) {
                return Err(StoreError::format(line, format!("duplicate row for {key}")));
            }
            if !s.insert(key, &record[3]) {
                return Err(StoreError::format(line, "empty description"));
            }
        }
        store.ok_or_else(|| StoreError::format(2, "no description rows"))
    }

    pub fn from_csv_str(text: &str) -> Result<Self, StoreError> {
        Self::from_csv_reader(text.as_bytes())
    }
}

pub fn save_store(store: &DescriptionStore, path: impl AsRef<Path>) -> Result<(), StoreError> {
    std::fs::write(path, store.to_csv_string())?;
    Ok(())
}

pub fn load_store(path: impl AsRef<Path>) -> Result<DescriptionStore, StoreError> {
    let file = std::fs::File::open(path)?;
    DescriptionStore::from_csv_reader(std::io::BufReader::new(file))
}

/// Runtime lookup: the description of the view nearest to `pose`. Purely in
/// memory.
pub fn lookup_description<'a>(
    store: &'a DescriptionStore,
    anchors: &[AnchorPoint],
    pose: &Pose,
) -> Result<&'a str, StoreError> {
    let key = nearest_view(anchors, pose)?;
    store.get(&key).ok_or(StoreError::MissingEntry(key))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn key(a: usize, y: u16) -> ViewKey {
        ViewKey::new(a, y).unwrap()
    }

    #[test]
    fn quoting_round_trips() {
        let mut s = DescriptionStore::new("escape, room", Generator::Template);
        s.insert(key(0, 0), "A desk, a chair and a \"radio\".\nNext line.");
        s.insert(key(0, 45), "Café · naïve");
        let text = s.to_csv_string();
        let back = DescriptionStore::from_csv_str(&text).unwrap();
        assert_eq!(back.scene_name, s.scene_name);
        assert_eq!(
            back.entries().collect::<Vec<_>>(),
            s.entries().collect::<Vec<_>>()
        );
        assert_eq!(back.generator, Generator::Unknown);
    }

    #[test]
    fn row_count_matches_entries() {
        let anchors: Vec<AnchorPoint> = (0..4)
            .map(|i| AnchorPoint {
                index: i,
                position: Vec3::ZERO,
            })
            .collect();
        let mut s = DescriptionStore::new("room", Generator::Template);
        for k in enumerate_views(&anchors).unwrap() {
            s.insert(k, format!("The scene in front of you is view {k}."));
        }
        let text = s.to_csv_string();
        assert_eq!(text.lines().count(), 33);
        assert!(text.starts_with("scene_name,anchor_index,yaw_degrees,description\n"));
        s.check_complete(&anchors).unwrap();
        assert!(matches!(
            s.check_complete(&anchors[..3]),
            Err(StoreError::MissingEntry(_))
        ));
    }

    #[test]
    fn schema_errors_carry_line_numbers() {
        let missing_yaw = "scene_name,anchor_index,description\nroom,0,hello\n";
        assert!(matches!(
            DescriptionStore::from_csv_str(missing_yaw),
            Err(StoreError::CsvFormat { line: 1, .. })
        ));
        let bad_yaw =
            "scene_name,anchor_index,yaw_degrees,description\nroom,0,0,ok\nroom,0,30,bad\n";
        assert!(matches!(
            DescriptionStore::from_csv_str(bad_yaw),
            Err(StoreError::CsvFormat { line: 3, .. })
        ));
        let short_row = "scene_name,anchor_index,yaw_degrees,description\nroom,0,0\n";
        assert!(matches!(
            DescriptionStore::from_csv_str(short_row),
            Err(StoreError::CsvFormat { line: 2, .. })
        ));
        let empty = "scene_name,anchor_index,yaw_degrees,description\nroom,0,0,\n";
        assert!(matches!(
            DescriptionStore::from_csv_str(empty),
            Err(StoreError::CsvFormat { line: 2, .. })
        ));
        let dup = "scene_name,anchor_index,yaw_degrees,description\nroom,0,0,a\nroom,0,0,b\n";
        assert!(matches!(
            DescriptionStore::from_csv_str(dup),
            Err(StoreError::CsvFormat { line: 3, .. })
        ));
    }

    #[test]
    fn lookup_uses_nearest_view() {
        let anchors = vec![
            AnchorPoint {
                index: 0,
                position: Vec3::new(0.0, 1.6, 0.0),
            },
            AnchorPoint {
                index: 1,
                position: Vec3::new(4.0, 1.6, 0.0),
            },
        ];
        let mut s = DescriptionStore::new("room", Generator::Template);
        for k in enumerate_views(&anchors).unwrap() {
            s.insert(k, format!("{}-{}", k.anchor_index, k.yaw()));
        }
        let pose = Pose::new(Vec3::new(0.0, 1.6, 0.0), 0.0);
        assert_eq!(lookup_description(&s, &anchors, &pose).unwrap(), "0-0");
        let pose = Pose::new(Vec3::new(3.0, 1.0, 1.0), 100.0);
        assert_eq!(lookup_description(&s, &anchors, &pose).unwrap(), "1-90");
        let partial = DescriptionStore::new("room", Generator::Template);
        assert!(matches!(
            lookup_description(&partial, &anchors, &pose),
            Err(StoreError::MissingEntry(_))
        ));
    }
}
