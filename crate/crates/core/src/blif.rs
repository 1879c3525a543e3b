//! Minimal BLIF subset: one single-output model given as an on-set PLA cover.
//!
//! Accepted grammar, in order: `.model`, `.inputs` (repeatable, with
//! trailing-backslash continuation), `.outputs` with exactly one name, one
//! `.names` over all declared inputs in declared order, cover rows with
//! output `1`, `.end`. Comments start with `#`. Every rejection carries the
//! offending line number.

use thiserror::Error;

use crate::cobdd::{BoolOp, CobddError, CobddManager, FuncHandle, VarId};
use crate::solver::{ControllerSpec, SpecError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlifError {
    #[error("line {line}: expected `{expected}`, found `{found}`")]
    UnexpectedDirective {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: `.model` takes exactly one name")]
    BadModelName { line: usize },
    #[error("line {line}: duplicate input name `{name}`")]
    DuplicateInput { line: usize, name: String },
    #[error("line {line}: `.outputs` must declare exactly one output")]
    MultipleOutputs { line: usize },
    #[error("line {line}: `.names` must list all {want} inputs in declared order plus the output")]
    NamesSignatureMismatch { line: usize, want: usize },
    #[error("line {line}: pattern has {got} characters, expected {want}")]
    PatternLength {
        line: usize,
        got: usize,
        want: usize,
    },
    #[error("line {line}: invalid pattern character `{ch}` (expected 0, 1 or -)")]
    PatternChar { line: usize, ch: char },
    #[error("line {line}: cover row must be `<pattern> 1`; off-set rows are not supported")]
    BadCoverRow { line: usize },
    #[error("line {line}: text after `.end`")]
    TrailingContent { line: usize },
    #[error("line {line}: unterminated line continuation")]
    DanglingContinuation { line: usize },
    #[error("unexpected end of file: missing `{0}`")]
    UnexpectedEof(&'static str),
}

/// One row of the PLA cover; a product term over the declared inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternBit {
    Zero,
    One,
    DontCare,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cube {
    pub bits: Vec<PatternBit>,
}

impl Cube {
    /// Whether the assignment (one bit per declared input) satisfies this
    /// product term.
    pub fn matches(&self, assignment: &[bool]) -> bool {
        debug_assert_eq!(self.bits.len(), assignment.len());
        self.bits.iter().zip(assignment).all(|(p, &a)| match p {
            PatternBit::Zero => !a,
            PatternBit::One => a,
            PatternBit::DontCare => true,
        })
    }
}

/// A parsed single-output model: the relation is the OR of the cover rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlifModel {
    pub name: String,
    pub inputs: Vec<String>,
    pub output: String,
    pub cover: Vec<Cube>,
}

impl BlifModel {
    /// Direct cube-list evaluation; this is the ground truth the verification
    /// oracle uses, independent of any diagram computation.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.cover.iter().any(|c| c.matches(assignment))
    }

    /// Renders the model back to BLIF text accepted by [`parse_blif`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(".model {}\n", self.name));
        out.push_str(&format!(".inputs {}\n", self.inputs.join(" ")));
        out.push_str(&format!(".outputs {}\n", self.output));
        out.push_str(&format!(
            ".names {} {}\n",
            self.inputs.join(" "),
            self.output
        ));
        for cube in &self.cover {
            for bit in &cube.bits {
                out.push(match bit {
                    PatternBit::Zero => '0',
                    PatternBit::One => '1',
                    PatternBit::DontCare => '-',
                });
            }
            out.push_str(" 1\n");
        }
        out.push_str(".end\n");
        out
    }
}

/// A logical line after comment stripping and backslash splicing, tagged
/// with the physical line number it started on.
fn logical_lines(text: &str) -> Result<Vec<(usize, String)>, BlifError> {
    let mut out: Vec<(usize, String)> = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let without_comment = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = without_comment.trim_end();
        let (content, continues) = match trimmed.strip_suffix('\\') {
            Some(rest) => (rest, true),
            None => (trimmed, false),
        };
        match pending.take() {
            Some((start, mut acc)) => {
                acc.push(' ');
                acc.push_str(content);
                if continues {
                    pending = Some((start, acc));
                } else {
                    out.push((start, acc));
                }
            }
            None => {
                if continues {
                    pending = Some((line_no, content.to_string()));
                } else if !content.trim().is_empty() {
                    out.push((line_no, content.to_string()));
                }
            }
        }
    }
    if pending.is_some() {
        return Err(BlifError::DanglingContinuation { line: last_line });
    }
    Ok(out)
}

/// Parses the BLIF subset described in the module docs.
pub fn parse_blif(text: &str) -> Result<BlifModel, BlifError> {
    let lines = logical_lines(text)?;
    let mut it = lines.into_iter().peekable();

    let (line, content) = it.next().ok_or(BlifError::UnexpectedEof(".model"))?;
    let mut tokens = content.split_whitespace();
    if tokens.next() != Some(".model") {
        return Err(BlifError::UnexpectedDirective {
            line,
            expected: ".model",
            found: first_token(&content),
        });
    }
    let name = match (tokens.next(), tokens.next()) {
        (Some(n), None) => n.to_string(),
        _ => return Err(BlifError::BadModelName { line }),
    };

    let mut inputs: Vec<String> = Vec::new();
    let mut saw_inputs = false;
    while let Some((_, content)) = it.peek() {
        if !content.trim_start().starts_with(".inputs") {
            break;
        }
        let (line, content) = it.next().unwrap();
        saw_inputs = true;
        for tok in content.split_whitespace().skip(1) {
            if inputs.iter().any(|n| n == tok) {
                return Err(BlifError::DuplicateInput {
                    line,
                    name: tok.to_string(),
                });
            }
            inputs.push(tok.to_string());
        }
    }
    if !saw_inputs {
        let (line, content) = it.next().ok_or(BlifError::UnexpectedEof(".inputs"))?;
        return Err(BlifError::UnexpectedDirective {
            line,
            expected: ".inputs",
            found: first_token(&content),
        });
    }

    let (line, content) = it.next().ok_or(BlifError::UnexpectedEof(".outputs"))?;
    let mut tokens = content.split_whitespace();
    if tokens.next() != Some(".outputs") {
        return Err(BlifError::UnexpectedDirective {
            line,
            expected: ".outputs",
            found: first_token(&content),
        });
    }
    let output = match (tokens.next(), tokens.next()) {
        (Some(n), None) => n.to_string(),
        _ => return Err(BlifError::MultipleOutputs { line }),
    };

    let (line, content) = it.next().ok_or(BlifError::UnexpectedEof(".names"))?;
    let mut tokens = content.split_whitespace();
    if tokens.next() != Some(".names") {
        if content.trim_start().starts_with(".outputs") {
            return Err(BlifError::MultipleOutputs { line });
        }
        return Err(BlifError::UnexpectedDirective {
            line,
            expected: ".names",
            found: first_token(&content),
        });
    }
    let signature: Vec<&str> = tokens.collect();
    let expected: Vec<&str> = inputs
        .iter()
        .map(String::as_str)
        .chain(std::iter::once(output.as_str()))
        .collect();
    if signature != expected {
        return Err(BlifError::NamesSignatureMismatch {
            line,
            want: inputs.len(),
        });
    }

    let mut cover = Vec::new();
    let mut ended = false;
    for (line, content) in it.by_ref() {
        let trimmed = content.trim();
        if trimmed == ".end" {
            ended = true;
            break;
        }
        if trimmed.starts_with('.') {
            if trimmed.starts_with(".outputs") {
                return Err(BlifError::MultipleOutputs { line });
            }
            return Err(BlifError::UnexpectedDirective {
                line,
                expected: "cover row or .end",
                found: first_token(trimmed),
            });
        }
        let mut parts = trimmed.split_whitespace();
        let (pattern, out_bit) = match (parts.next(), parts.next(), parts.next()) {
            (Some(p), Some(o), None) => (p, o),
            _ => return Err(BlifError::BadCoverRow { line }),
        };
        if out_bit != "1" {
            return Err(BlifError::BadCoverRow { line });
        }
        if pattern.chars().count() != inputs.len() {
            return Err(BlifError::PatternLength {
                line,
                got: pattern.chars().count(),
                want: inputs.len(),
            });
        }
        let bits = pattern
            .chars()
            .map(|ch| match ch {
                '0' => Ok(PatternBit::Zero),
                '1' => Ok(PatternBit::One),
                '-' => Ok(PatternBit::DontCare),
                ch => Err(BlifError::PatternChar { line, ch }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        cover.push(Cube { bits });
    }
    if !ended {
        return Err(BlifError::UnexpectedEof(".end"));
    }
    if let Some((line, _)) = it.next() {
        return Err(BlifError::TrailingContent { line });
    }

    Ok(BlifModel {
        name,
        inputs,
        output,
        cover,
    })
}

fn first_token(content: &str) -> String {
    content.split_whitespace().next().unwrap_or("").to_string()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildSpecError {
    #[error("`{0}` is not an input of the model")]
    UnknownName(String),
    #[error("input `{0}` is neither a state nor an action variable")]
    UnassignedInput(String),
    #[error("`{0}` is listed as both a state and an action variable")]
    Overlap(String),
    #[error("`{0}` is listed twice")]
    DuplicateName(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Cobdd(#[from] CobddError),
}

/// Builds a [`ControllerSpec`] from a parsed model and the state/action
/// partition of its inputs. Manager variables follow BLIF declaration order;
/// action-bit priority follows `action_names` order.
pub fn build_spec(
    model: &BlifModel,
    state_names: &[String],
    action_names: &[String],
) -> Result<ControllerSpec, BuildSpecError> {
    let mut seen: Vec<&str> = Vec::new();
    for name in state_names.iter().chain(action_names) {
        if !model.inputs.contains(name) {
            return Err(BuildSpecError::UnknownName(name.clone()));
        }
        if seen.contains(&name.as_str()) {
            let overlap = state_names.contains(name) && action_names.contains(name);
            return Err(if overlap {
                BuildSpecError::Overlap(name.clone())
            } else {
                BuildSpecError::DuplicateName(name.clone())
            });
        }
        seen.push(name);
    }
    for input in &model.inputs {
        if !seen.contains(&input.as_str()) {
            return Err(BuildSpecError::UnassignedInput(input.clone()));
        }
    }

    let mut manager = CobddManager::new(model.inputs.clone())?;
    let k = build_cover(&mut manager, &model.cover)?;
    let to_ids = |names: &[String]| -> Vec<VarId> {
        names
            .iter()
            .map(|n| manager.var_by_name(n).expect("name checked above"))
            .collect()
    };
    let state_vars = to_ids(state_names);
    let action_vars = to_ids(action_names);
    Ok(ControllerSpec::new(manager, k, state_vars, action_vars)?)
}

/// OR of cubes, each cube an AND of literals built bottom-up.
fn build_cover(manager: &mut CobddManager, cover: &[Cube]) -> Result<FuncHandle, CobddError> {
    let mut k = manager.constant(false);
    for cube in cover {
        let mut acc = manager.constant(true);
        let f = manager.constant(false);
        for (i, bit) in cube.bits.iter().enumerate().rev() {
            let var = VarId::new(i as u16);
            acc = match bit {
                PatternBit::One => manager.mk_node(var, acc, f)?,
                PatternBit::Zero => manager.mk_node(var, f, acc)?,
                PatternBit::DontCare => acc,
            };
        }
        k = manager.apply(BoolOp::Or, k, acc)?;
    }
    Ok(k)
}
