//! Synthesis problem files: input/output proposition declarations plus an
//! LTL formula over them.
//!
//! Format (UTF-8 text, one section per line, `#` starts a comment):
//!
//! ```text
//! [inputs] r w
//! [outputs] g
//! [ltl] G(!w -> X !g) & G(r -> F g)
//! ```

use std::error::Error;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::lasso::Alphabet;
use crate::ltl::{parse_ltl, Ltl};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub formula: Ltl,
}

#[derive(Debug, Clone)]
pub struct SpecError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl Error for SpecError {}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SpecFile {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>, formula: Ltl) -> SpecFile {
        SpecFile {
            inputs,
            outputs,
            formula,
        }
    }

    pub fn parse(text: &str) -> Result<SpecFile, SpecError> {
        let mut inputs: Option<(usize, Vec<String>)> = None;
        let mut outputs: Option<(usize, Vec<String>)> = None;
        let mut ltl_text: Option<(usize, String)> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| SpecError { line: line_no, msg };
            if let Some(rest) = line.strip_prefix("[inputs]") {
                if inputs.is_some() {
                    return Err(err("duplicate [inputs] section".into()));
                }
                inputs = Some((line_no, split_names(rest)));
            } else if let Some(rest) = line.strip_prefix("[outputs]") {
                if outputs.is_some() {
                    return Err(err("duplicate [outputs] section".into()));
                }
                outputs = Some((line_no, split_names(rest)));
            } else if let Some(rest) = line.strip_prefix("[ltl]") {
                if ltl_text.is_some() {
                    return Err(err("duplicate [ltl] section".into()));
                }
                ltl_text = Some((line_no, rest.trim().to_string()));
            } else {
                return Err(err(format!("unrecognized line: {line}")));
            }
        }

        let (in_line, inputs) = inputs.ok_or(SpecError {
            line: 0,
            msg: "missing [inputs] section".into(),
        })?;
        let (out_line, outputs) = outputs.ok_or(SpecError {
            line: 0,
            msg: "missing [outputs] section".into(),
        })?;
        let (ltl_line, ltl_text) = ltl_text.ok_or(SpecError {
            line: 0,
            msg: "missing [ltl] section".into(),
        })?;

        for (line, names) in [(in_line, &inputs), (out_line, &outputs)] {
            for n in names {
                if !is_identifier(n) {
                    return Err(SpecError {
                        line,
                        msg: format!("'{n}' is not a valid atom name"),
                    });
                }
            }
        }
        for i in &inputs {
            if outputs.contains(i) {
                return Err(SpecError {
                    line: out_line,
                    msg: format!("atom '{i}' declared both input and output"),
                });
            }
        }
        let mut declared = inputs.clone();
        declared.extend(outputs.iter().cloned());
        for (i, a) in declared.iter().enumerate() {
            if declared[..i].contains(a) {
                return Err(SpecError {
                    line: in_line,
                    msg: format!("atom '{a}' declared twice"),
                });
            }
        }

        let formula = parse_ltl(&ltl_text, &declared).map_err(|e| SpecError {
            line: ltl_line,
            msg: e.to_string(),
        })?;

        Ok(SpecFile {
            inputs,
            outputs,
            formula,
        })
    }

    pub fn load(path: &Path) -> Result<SpecFile, Box<dyn Error>> {
        let text = fs::read_to_string(path)?;
        Ok(SpecFile::parse(&text)?)
    }

    /// Alphabet of input letters; input atom `i` is bit `i`.
    pub fn input_alphabet(&self) -> Alphabet {
        Alphabet::new(self.inputs.clone())
    }

    /// Alphabet of trace letters: input atoms at the low bits, output atoms
    /// above them.
    pub fn trace_alphabet(&self) -> Alphabet {
        self.input_alphabet()
            .concat(&Alphabet::new(self.outputs.clone()))
    }

    /// Render in the file format; parses back to an equal spec.
    pub fn to_text(&self) -> String {
        format!(
            "[inputs] {}\n[outputs] {}\n[ltl] {}\n",
            self.inputs.join(" "),
            self.outputs.join(" "),
            self.formula
        )
    }
}

fn split_names(rest: &str) -> Vec<String> {
    rest.split_whitespace().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_in_any_order() {
        let text = "# arbiter\n[outputs] g\n\n[ltl] G(r -> F g)\n[inputs] r\n";
        let spec = SpecFile::parse(text).unwrap();
        assert_eq!(spec.inputs, vec!["r"]);
        assert_eq!(spec.outputs, vec!["g"]);
    }

    #[test]
    fn missing_section_is_an_error() {
        let text = "[inputs] r\n[outputs] g\n";
        let err = SpecFile::parse(text).unwrap_err();
        assert!(err.msg.contains("[ltl]"));
    }

    #[test]
    fn overlap_and_undeclared_are_errors() {
        let err = SpecFile::parse("[inputs] a\n[outputs] a\n[ltl] a\n").unwrap_err();
        assert!(err.msg.contains("both"));
        let err = SpecFile::parse("[inputs] a\n[outputs] b\n[ltl] a & c\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.msg.contains("undeclared"));
    }

    #[test]
    fn text_round_trip() {
        let spec =
            SpecFile::parse("[inputs] r w\n[outputs] g\n[ltl] G(!w -> X !g) & G(r -> F g)\n")
                .unwrap();
        let again = SpecFile::parse(&spec.to_text()).unwrap();
        assert_eq!(spec, again);
    }
}
