//! Structured response validation and answer extraction.
//!
//! A well-formed response has the shape
//!
//! ```text
//! <think>REASONING</think><answer>PAYLOAD</answer>
//! ```
//!
//! where PAYLOAD is a bracketed numeric array: `[x1,y1,x2,y2]` for an
//! affordance box, `[[x,y],[x,y],...]` for a trajectory. Whitespace is
//! allowed anywhere inside the payload. Text outside the two tag spans is
//! ignored. Every coordinate must lie in `[0, 1000)`, and trajectories must
//! have between 3 and 10 points.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::geometry::{in_coord_range, BBox, Point2, Trajectory};
use crate::scalar::Scalar;

pub const THINK_OPEN: &str = "<think>";
pub const THINK_CLOSE: &str = "</think>";
pub const ANSWER_OPEN: &str = "<answer>";
pub const ANSWER_CLOSE: &str = "</answer>";

/// Inclusive bounds on the number of predicted trajectory points.
pub const MIN_TRAJECTORY_POINTS: usize = 3;
pub const MAX_TRAJECTORY_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Affordance,
    Trajectory,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Affordance => "affordance",
            TaskKind::Trajectory => "trajectory",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Violation {
    MissingThink,
    MissingAnswer,
    BadTagOrder,
    UnparseableAnswer,
    PointCountOutOfRange,
    CoordOutOfRange,
    DegenerateBox,
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::MissingThink => "MISSING_THINK",
            Violation::MissingAnswer => "MISSING_ANSWER",
            Violation::BadTagOrder => "BAD_TAG_ORDER",
            Violation::UnparseableAnswer => "UNPARSEABLE_ANSWER",
            Violation::PointCountOutOfRange => "POINT_COUNT_OUT_OF_RANGE",
            Violation::CoordOutOfRange => "COORD_OUT_OF_RANGE",
            Violation::DegenerateBox => "DEGENERATE_BOX",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Outcome of format validation. Violations are sorted and de-duplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormatVerdict {
    pub compliant: bool,
    pub violations: Vec<Violation>,
}

impl FormatVerdict {
    fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        violations.dedup();
        Self {
            compliant: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, v: Violation) -> bool {
        self.violations.contains(&v)
    }
}

/// A decoded answer payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub enum Answer<S> {
    Affordance(BBox<S>),
    Trajectory(Trajectory<S>),
}

impl<S: Scalar> Answer<S> {
    pub fn kind(&self) -> TaskKind {
        match self {
            Answer::Affordance(_) => TaskKind::Affordance,
            Answer::Trajectory(_) => TaskKind::Trajectory,
        }
    }

    pub fn as_bbox(&self) -> Option<&BBox<S>> {
        match self {
            Answer::Affordance(b) => Some(b),
            Answer::Trajectory(_) => None,
        }
    }

    pub fn as_trajectory(&self) -> Option<&Trajectory<S>> {
        match self {
            Answer::Trajectory(t) => Some(t),
            Answer::Affordance(_) => None,
        }
    }

    /// Renders the payload in the canonical bracketed form.
    pub fn to_payload(&self) -> String {
        match self {
            Answer::Affordance(b) => {
                let [x1, y1, x2, y2] = b.corners();
                format!("[{x1},{y1},{x2},{y2}]")
            }
            Answer::Trajectory(t) => {
                let pairs: Vec<String> = t
                    .points()
                    .iter()
                    .map(|p| format!("[{},{}]", p.x, p.y))
                    .collect();
                format!("[{}]", pairs.join(","))
            }
        }
    }
}

/// Parsed answer together with the verbatim reasoning span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct ParsedAnswer<S> {
    pub reasoning: String,
    pub answer: Answer<S>,
}

impl<S: Scalar> ParsedAnswer<S> {
    pub fn kind(&self) -> TaskKind {
        self.answer.kind()
    }
}

/// Verdict plus, when the answer span decodes for the task, the parsed answer.
///
/// `parsed` may be present on a non-compliant response (for instance a
/// trajectory with too many points); reward code gates on `verdict`.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis<S> {
    pub verdict: FormatVerdict,
    pub parsed: Option<ParsedAnswer<S>>,
}

/// Wraps a payload in the canonical response template.
pub fn render_response(reasoning: &str, payload: &str) -> String {
    format!("{THINK_OPEN}{reasoning}{THINK_CLOSE}{ANSWER_OPEN}{payload}{ANSWER_CLOSE}")
}

/// Canonical serialization of an answer as a complete response.
pub fn render_answer<S: Scalar>(reasoning: &str, answer: &Answer<S>) -> String {
    render_response(reasoning, &answer.to_payload())
}

pub fn validate_format<S: Scalar>(response: &str, task: TaskKind) -> FormatVerdict {
    analyze::<S>(response, task).verdict
}

/// Validates the tag structure and decodes the answer span.
pub fn analyze<S: Scalar>(response: &str, task: TaskKind) -> Analysis<S> {
    let mut violations = Vec::new();
    let think = locate_span(response, THINK_OPEN, THINK_CLOSE);
    let answer = locate_span(response, ANSWER_OPEN, ANSWER_CLOSE);

    match think {
        Span::Missing => violations.push(Violation::MissingThink),
        Span::Malformed => violations.push(Violation::BadTagOrder),
        Span::One { .. } => {}
    }
    match answer {
        Span::Missing => violations.push(Violation::MissingAnswer),
        Span::Malformed => violations.push(Violation::BadTagOrder),
        Span::One { .. } => {}
    }
    if let (
        Span::One { end: think_end, .. },
        Span::One {
            start: answer_start,
            ..
        },
    ) = (&think, &answer)
    {
        if think_end > answer_start {
            violations.push(Violation::BadTagOrder);
        }
    }

    let reasoning = match think {
        Span::One { inner, .. } => inner.to_string(),
        _ => String::new(),
    };

    let mut parsed = None;
    if let Span::One { inner, .. } = answer {
        match parse_payload::<S>(inner, task) {
            Ok(ans) => {
                violations.extend(payload_violations(&ans));
                parsed = Some(ParsedAnswer {
                    reasoning,
                    answer: ans,
                });
            }
            Err(v) => violations.push(v),
        }
    }

    Analysis {
        verdict: FormatVerdict::from_violations(violations),
        parsed,
    }
}

/// Validates a bare payload (no tags), as produced by models that skip the
/// reasoning span. Only payload-level violations can appear.
pub fn analyze_payload<S: Scalar>(payload: &str, task: TaskKind) -> Analysis<S> {
    match parse_payload::<S>(payload, task) {
        Ok(answer) => Analysis {
            verdict: FormatVerdict::from_violations(payload_violations(&answer)),
            parsed: Some(ParsedAnswer {
                reasoning: String::new(),
                answer,
            }),
        },
        Err(v) => Analysis {
            verdict: FormatVerdict::from_violations(vec![v]),
            parsed: None,
        },
    }
}

fn payload_violations<S: Scalar>(answer: &Answer<S>) -> Vec<Violation> {
    let mut out = Vec::new();
    match answer {
        Answer::Affordance(b) => {
            if !b.corners().iter().all(|&v| in_coord_range(v)) {
                out.push(Violation::CoordOutOfRange);
            }
            if b.is_degenerate() {
                out.push(Violation::DegenerateBox);
            }
        }
        Answer::Trajectory(t) => {
            if !(MIN_TRAJECTORY_POINTS..=MAX_TRAJECTORY_POINTS).contains(&t.len()) {
                out.push(Violation::PointCountOutOfRange);
            }
            if !t
                .points()
                .iter()
                .all(|p| in_coord_range(p.x) && in_coord_range(p.y))
            {
                out.push(Violation::CoordOutOfRange);
            }
        }
    }
    out
}

/// Decodes a bare payload for the given task kind.
pub fn parse_payload<S: Scalar>(payload: &str, task: TaskKind) -> Result<Answer<S>, Violation> {
    match task {
        TaskKind::Affordance => parse_bbox(payload).map(Answer::Affordance),
        TaskKind::Trajectory => parse_trajectory(payload).map(Answer::Trajectory),
    }
}

/// Parses `[x1,y1,x2,y2]`; inverted corners are swapped.
pub fn parse_bbox<S: Scalar>(payload: &str) -> Result<BBox<S>, Violation> {
    let items = parse_array(payload)?;
    if items.len() != 4 {
        return Err(Violation::UnparseableAnswer);
    }
    let mut v = [S::zero(); 4];
    for (slot, item) in v.iter_mut().zip(&items) {
        *slot = number(item)?;
    }
    BBox::new(v[0], v[1], v[2], v[3]).map_err(|_| Violation::UnparseableAnswer)
}

/// Parses `[[x,y],...]` preserving point order.
pub fn parse_trajectory<S: Scalar>(payload: &str) -> Result<Trajectory<S>, Violation> {
    let items = parse_array(payload)?;
    let mut points = Vec::with_capacity(items.len());
    for item in &items {
        let pair = item.as_array().ok_or(Violation::UnparseableAnswer)?;
        if pair.len() != 2 {
            return Err(Violation::UnparseableAnswer);
        }
        points.push(Point2::new(number(&pair[0])?, number(&pair[1])?));
    }
    Trajectory::new(points).map_err(|_| Violation::UnparseableAnswer)
}

fn parse_array(payload: &str) -> Result<Vec<Value>, Violation> {
    match serde_json::from_str::<Value>(payload.trim()) {
        Ok(Value::Array(items)) => Ok(items),
        _ => Err(Violation::UnparseableAnswer),
    }
}

fn number<S: Scalar>(v: &Value) -> Result<S, Violation> {
    v.as_f64()
        .and_then(S::from_f64)
        .filter(|x| x.is_finite())
        .ok_or(Violation::UnparseableAnswer)
}

enum Span<'a> {
    Missing,
    Malformed,
    One {
        start: usize,
        end: usize,
        inner: &'a str,
    },
}

/// Finds the single `open ... close` span. More than one of either tag, or a
/// close tag before its open tag, is malformed; a missing half is missing.
fn locate_span<'a>(text: &'a str, open: &str, close: &str) -> Span<'a> {
    let opens: Vec<usize> = text.match_indices(open).map(|(i, _)| i).collect();
    let closes: Vec<usize> = text.match_indices(close).map(|(i, _)| i).collect();
    match (opens.as_slice(), closes.as_slice()) {
        ([], _) | (_, []) if opens.len() <= 1 && closes.len() <= 1 => Span::Missing,
        ([o], [c]) if o + open.len() <= *c => Span::One {
            start: *o,
            end: c + close.len(),
            inner: &text[o + open.len()..*c],
        },
        _ => Span::Malformed,
    }
}
