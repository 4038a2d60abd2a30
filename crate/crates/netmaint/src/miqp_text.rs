//! Line-oriented text format for [`MiqpModel`].
//!
//! ```text
//! MIQP 1
//! DIMS <n> <j> <t> <k>
//! BIGM <real>
//! VAR <name> <C|B> <lower> <upper>          one line per variable, in index order
//! OBJ MAX <constant>
//! OBJLIN <var> <coef>
//! OBJQUAD <var> <var> <coef>
//! CON <name> <LE|GE|EQ> <rhs> [<var> <coef>]...
//! END
//! ```
//!
//! Tokens are separated by single spaces. Reals use the shortest decimal
//! form that reads back to the same `f64`; `inf` and `-inf` denote
//! infinite bounds. Lines starting with `#` and blank lines are ignored.
//! Sections must appear in the order shown.

use std::collections::HashMap;
use std::fmt::Write as _;

use netmaint_core::miqp::{Constraint, MiqpModel, ModelDims, Objective, Sense, VarKind, Variable};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("MIQP line {line}: {message}")]
pub struct MiqpParseError {
    pub line: usize,
    pub message: String,
}

fn sense_token(s: Sense) -> &'static str {
    match s {
        Sense::Le => "LE",
        Sense::Ge => "GE",
        Sense::Eq => "EQ",
    }
}

pub fn write_miqp(model: &MiqpModel) -> String {
    let mut out = String::new();
    let d = &model.dims;
    let name = |i: usize| model.variables[i].name.as_str();
    // Writing to a String cannot fail.
    let _ = writeln!(out, "MIQP 1");
    let _ = writeln!(out, "DIMS {} {} {} {}", d.n, d.j, d.t, d.k);
    let _ = writeln!(out, "BIGM {:?}", model.big_m);
    for v in &model.variables {
        let kind = match v.kind {
            VarKind::Continuous => "C",
            VarKind::Binary => "B",
        };
        let _ = writeln!(out, "VAR {} {} {:?} {:?}", v.name, kind, v.lower, v.upper);
    }
    let _ = writeln!(out, "OBJ MAX {:?}", model.objective.constant);
    for &(k, c) in &model.objective.linear {
        let _ = writeln!(out, "OBJLIN {} {:?}", name(k), c);
    }
    for &(k, l, c) in &model.objective.quadratic {
        let _ = writeln!(out, "OBJQUAD {} {} {:?}", name(k), name(l), c);
    }
    for con in &model.constraints {
        let _ = write!(out, "CON {} {} {:?}", con.name, sense_token(con.sense), con.rhs);
        for &(k, c) in &con.terms {
            let _ = write!(out, " {} {:?}", name(k), c);
        }
        out.push('\n');
    }
    out.push_str("END\n");
    out
}

struct Parser<'a> {
    lines: std::iter::Peekable<Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a>>,
    last_line: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let iter: Box<dyn Iterator<Item = (usize, Vec<&'a str>)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
                .map(|(i, l)| (i, l.split_whitespace().collect())),
        );
        Self { lines: iter.peekable(), last_line: 0 }
    }

    fn err<T>(&self, line: usize, message: impl Into<String>) -> Result<T, MiqpParseError> {
        Err(MiqpParseError { line, message: message.into() })
    }

    fn next(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>), MiqpParseError> {
        match self.lines.next() {
            Some((line, tokens)) => {
                self.last_line = line;
                if tokens[0] != keyword {
                    return self.err(line, format!("expected {keyword}, found {}", tokens[0]));
                }
                Ok((line, tokens))
            }
            None => self.err(self.last_line + 1, format!("unexpected end of input, expected {keyword}")),
        }
    }

    fn peek_is(&mut self, keyword: &str) -> bool {
        self.lines.peek().is_some_and(|(_, t)| t[0] == keyword)
    }
}

fn arity(line: usize, tokens: &[&str], expected: usize) -> Result<(), MiqpParseError> {
    if tokens.len() != expected {
        return Err(MiqpParseError {
            line,
            message: format!("{} takes {} fields, found {}", tokens[0], expected - 1, tokens.len() - 1),
        });
    }
    Ok(())
}

fn real(line: usize, token: &str) -> Result<f64, MiqpParseError> {
    token.parse().map_err(|_| MiqpParseError { line, message: format!("invalid number {token:?}") })
}

fn integer(line: usize, token: &str) -> Result<usize, MiqpParseError> {
    token.parse().map_err(|_| MiqpParseError { line, message: format!("invalid count {token:?}") })
}

fn lookup(names: &HashMap<String, usize>, line: usize, token: &str) -> Result<usize, MiqpParseError> {
    names.get(token).copied().ok_or_else(|| MiqpParseError { line, message: format!("unknown variable {token:?}") })
}

pub fn parse_miqp(text: &str) -> Result<MiqpModel, MiqpParseError> {
    let mut p = Parser::new(text);
    let (line, header) = p.next("MIQP")?;
    if header.len() != 2 || header[1] != "1" {
        return p.err(line, "unsupported format version");
    }
    let (line, t) = p.next("DIMS")?;
    arity(line, &t, 5)?;
    let dims = ModelDims { n: integer(line, t[1])?, j: integer(line, t[2])?, t: integer(line, t[3])?, k: integer(line, t[4])? };
    let (line, t) = p.next("BIGM")?;
    arity(line, &t, 2)?;
    let big_m = real(line, t[1])?;

    let mut variables = Vec::new();
    let mut names = HashMap::new();
    while p.peek_is("VAR") {
        let (line, t) = p.next("VAR")?;
        arity(line, &t, 5)?;
        let kind = match t[2] {
            "C" => VarKind::Continuous,
            "B" => VarKind::Binary,
            other => return p.err(line, format!("invalid variable kind {other:?}")),
        };
        if names.insert(t[1].to_owned(), variables.len()).is_some() {
            return p.err(line, format!("duplicate variable {:?}", t[1]));
        }
        variables.push(Variable { name: t[1].to_owned(), kind, lower: real(line, t[3])?, upper: real(line, t[4])? });
    }
    if variables.len() != dims.variable_count() {
        return p.err(p.last_line, format!("expected {} variables, found {}", dims.variable_count(), variables.len()));
    }

    let (line, t) = p.next("OBJ")?;
    arity(line, &t, 3)?;
    if t[1] != "MAX" {
        return p.err(line, "objective sense must be MAX");
    }
    let mut objective = Objective { constant: real(line, t[2])?, ..Objective::default() };
    while p.peek_is("OBJLIN") {
        let (line, t) = p.next("OBJLIN")?;
        arity(line, &t, 3)?;
        objective.linear.push((lookup(&names, line, t[1])?, real(line, t[2])?));
    }
    while p.peek_is("OBJQUAD") {
        let (line, t) = p.next("OBJQUAD")?;
        arity(line, &t, 4)?;
        objective.quadratic.push((lookup(&names, line, t[1])?, lookup(&names, line, t[2])?, real(line, t[3])?));
    }

    let mut constraints = Vec::new();
    while p.peek_is("CON") {
        let (line, t) = p.next("CON")?;
        if t.len() < 4 || t.len() % 2 != 0 {
            return p.err(line, "CON needs a name, sense, rhs and variable/coefficient pairs");
        }
        let sense = match t[2] {
            "LE" => Sense::Le,
            "GE" => Sense::Ge,
            "EQ" => Sense::Eq,
            other => return p.err(line, format!("invalid sense {other:?}")),
        };
        let terms = t[4..]
            .chunks(2)
            .map(|pair| Ok((lookup(&names, line, pair[0])?, real(line, pair[1])?)))
            .collect::<Result<Vec<_>, MiqpParseError>>()?;
        constraints.push(Constraint { name: t[1].to_owned(), terms, sense, rhs: real(line, t[3])? });
    }
    if constraints.len() != dims.constraint_count() {
        return p.err(p.last_line, format!("expected {} constraints, found {}", dims.constraint_count(), constraints.len()));
    }
    let (line, t) = p.next("END")?;
    arity(line, &t, 1)?;
    if let Some((line, t)) = p.lines.next() {
        return p.err(line, format!("unexpected {} after END", t[0]));
    }
    Ok(MiqpModel { dims, big_m, variables, objective, constraints })
}
