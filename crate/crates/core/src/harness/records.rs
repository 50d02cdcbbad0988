use std::collections::HashSet;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result, SchemaError};
use crate::geometry::{normalize_coords, BBox, Point2, Trajectory, COORD_RANGE};
use crate::parser::{Answer, TaskKind};

/// Minimum ground-truth trajectory length for the distance metrics.
pub const MIN_GT_POINTS: usize = 2;

/// One evaluation example.
///
/// `ground_truth` is always in normalized `[0, 1000)` coordinates: when the
/// input line carries `image_size`, its `gt` is read as pixels and normalized
/// on load. Predictions are expected in normalized coordinates either way.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub id: String,
    pub task: TaskKind,
    pub instruction: String,
    pub prediction: String,
    pub ground_truth: Answer<f64>,
    pub image_size: Option<(f64, f64)>,
    /// 1-based line in the source file.
    pub line: usize,
}

#[derive(Debug, Default)]
pub struct LoadedRecords {
    pub records: Vec<EvalRecord>,
    pub errors: Vec<SchemaError>,
}

impl LoadedRecords {
    pub fn of_task(&self, task: TaskKind) -> impl Iterator<Item = &EvalRecord> {
        self.records.iter().filter(move |r| r.task == task)
    }

    /// Converts collected schema errors into an error.
    pub fn into_valid(self) -> Result<Vec<EvalRecord>> {
        if self.errors.is_empty() {
            Ok(self.records)
        } else {
            Err(Error::Schema(self.errors))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    task: TaskKind,
    #[serde(default)]
    instruction: String,
    prediction: String,
    gt: Value,
    #[serde(default)]
    image_size: Option<[f64; 2]>,
}

/// Reads JSONL records. Blank lines are skipped; lines that fail validation
/// are reported with their line number and do not produce a record.
pub fn load_records(path: &Path) -> Result<LoadedRecords> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let loaded = read_records(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    if loaded.records.is_empty() && loaded.errors.is_empty() {
        return Err(Error::EmptyDataset(path.to_path_buf()));
    }
    Ok(loaded)
}

pub fn read_records<R: BufRead>(reader: R) -> Result<LoadedRecords> {
    let mut out = LoadedRecords::default();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io("<input>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line, line_no) {
            Ok(rec) => {
                if seen.insert(rec.id.clone()) {
                    out.records.push(rec);
                } else {
                    out.errors.push(SchemaError {
                        line: line_no,
                        message: format!("duplicate id `{}`", rec.id),
                    });
                }
            }
            Err(message) => out.errors.push(SchemaError {
                line: line_no,
                message,
            }),
        }
    }
    Ok(out)
}

fn parse_line(line: &str, line_no: usize) -> std::result::Result<EvalRecord, String> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let image_size = match raw.image_size {
        Some([w, h]) if w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite() => Some((w, h)),
        Some([w, h]) => return Err(format!("image_size must be positive, got [{w}, {h}]")),
        None => None,
    };
    let ground_truth = parse_gt(&raw.gt, raw.task, image_size)?;
    Ok(EvalRecord {
        id: raw.id,
        task: raw.task,
        instruction: raw.instruction,
        prediction: raw.prediction,
        ground_truth,
        image_size,
        line: line_no,
    })
}

fn parse_gt(
    gt: &Value,
    task: TaskKind,
    image_size: Option<(f64, f64)>,
) -> std::result::Result<Answer<f64>, String> {
    let items = gt.as_array().ok_or("gt must be an array")?;
    let num = |v: &Value| {
        v.as_f64()
            .ok_or_else(|| format!("gt value `{v}` is not a number"))
    };
    let points: Vec<Point2<f64>> = match task {
        TaskKind::Affordance => {
            if items.len() != 4 {
                return Err(format!(
                    "affordance gt needs 4 numbers, got {}",
                    items.len()
                ));
            }
            vec![
                Point2::new(num(&items[0])?, num(&items[1])?),
                Point2::new(num(&items[2])?, num(&items[3])?),
            ]
        }
        TaskKind::Trajectory => {
            if items.len() < MIN_GT_POINTS {
                return Err(format!(
                    "trajectory gt needs at least {MIN_GT_POINTS} points, got {}",
                    items.len()
                ));
            }
            items
                .iter()
                .map(|p| match p.as_array().map(Vec::as_slice) {
                    Some([x, y]) => Ok(Point2::new(num(x)?, num(y)?)),
                    _ => Err(format!("trajectory gt point `{p}` is not an [x, y] pair")),
                })
                .collect::<std::result::Result<_, _>>()?
        }
    };

    let points = match image_size {
        Some((w, h)) => normalize_coords(&points, w, h).map_err(|e| e.to_string())?,
        None => {
            let ok = |v: f64| (0.0..COORD_RANGE).contains(&v);
            if !points.iter().all(|p| ok(p.x) && ok(p.y)) {
                return Err(
                    "gt coordinates must lie in [0, 1000) when image_size is absent".into(),
                );
            }
            points
        }
    };

    match task {
        TaskKind::Affordance => {
            let b = BBox::new(points[0].x, points[0].y, points[1].x, points[1].y)
                .map_err(|e| e.to_string())?;
            Ok(Answer::Affordance(b))
        }
        TaskKind::Trajectory => Trajectory::new(points)
            .map(Answer::Trajectory)
            .map_err(|e| e.to_string()),
    }
}
