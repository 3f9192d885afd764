//! Manifold definition files.
//!
//! ```text
//! # comments run to the end of the line
//! [manifold]
//! name = example
//! mode = chart            # chart | frame
//! basis = x y z
//!
//! [symbols]
//! c = constant
//! f = function            # chart only; `function of x z` restricts the variables
//! w = rule 0, 0, w        # derivative along each basis direction
//!
//! [metric]
//! exp(2*z^3), 0, 0
//! 0, exp(-2*z^3), 0
//! 0, 0, 1
//!
//! [brackets]              # frame only: [e1, e2] = -2 e3
//! e1 e2 e3 = -2
//!
//! [structure]
//! phi = 0, 1, 0; 1, 0, 0; 0, 0, 0     # row i holds component i of phi(e_j)
//! xi = 0, 0, 1
//! eta = 0, 0, 1
//! diagnostic = false      # true records axiom violations instead of failing
//!
//! [fields]
//! vector Z = x, y, z
//! scalar u = (x^2 - y^2 + z^2)/2
//!
//! [soliton]
//! potential = Z           # field name | xi | grad:<scalar name or expression>
//! lambda = -1
//! delta = 1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use paracontact::geometry::{GeometryError, ManifoldModel, TensorField};
use paracontact::soliton::{Potential, SolitonData, SolitonError};
use paracontact::structures::{builtin, ParacontactStructure, StructureError};
use paracontact::symbolic::{parse_expr, undeclared_symbols, DerivationSpec, SymbolKind, SymbolicError};
use paracontact::Expr;
use thiserror::Error;

const SECTIONS: [&str; 7] = [
    "manifold",
    "symbols",
    "metric",
    "brackets",
    "structure",
    "fields",
    "soliton",
];

#[derive(Debug, Error, PartialEq)]
pub enum LoadError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("[{section}]{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Semantic {
        section: String,
        line: Option<usize>,
        message: String,
    },
    #[error("builtin `{uri}`: {message}")]
    Builtin { uri: String, message: String },
}

fn semantic(section: &str, line: Option<usize>, message: impl Into<String>) -> LoadError {
    LoadError::Semantic {
        section: section.to_string(),
        line,
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Vector(TensorField),
    Scalar(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolitonEntry {
    /// Reference as written: a field name, `xi` or `grad:<fn>`.
    pub potential: String,
    pub lambda: Expr,
    pub delta: Expr,
}

/// A loaded definition: model, optional structure, named fields and
/// soliton data.
#[derive(Clone, Debug)]
pub struct Manifold {
    pub model: ManifoldModel,
    pub structure: Option<ParacontactStructure>,
    pub fields: Vec<(String, Field)>,
    pub soliton: Option<SolitonEntry>,
}

impl Manifold {
    fn from_structure(s: ParacontactStructure) -> Self {
        Manifold {
            model: s.model().clone(),
            structure: Some(s),
            fields: Vec::new(),
            soliton: None,
        }
    }

    pub fn spec(&self) -> &DerivationSpec {
        self.model.spec()
    }

    pub fn declare(&mut self, name: &str, kind: SymbolKind) -> Result<(), GeometryError> {
        self.model.declare(name, kind.clone())?;
        if let Some(s) = &mut self.structure {
            s.declare(name, kind).map_err(|e| match e {
                StructureError::Geometry(g) => g,
                other => GeometryError::Invalid(other.to_string()),
            })?;
        }
        Ok(())
    }

    /// Parse an expression, declaring every unknown identifier as a
    /// constant. Returns the names that were added.
    pub fn parse_declaring(&mut self, text: &str) -> Result<(Expr, Vec<String>), SymbolicError> {
        let added = undeclared_symbols(text, self.spec())?;
        for name in &added {
            self.declare(name, SymbolKind::Constant)
                .map_err(|e| SymbolicError::InvalidDeclaration(e.to_string()))?;
        }
        Ok((parse_expr(text, self.spec())?, added))
    }

    pub fn field(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// Resolve a potential reference: a vector field name, `xi`,
    /// `grad:<scalar field name or expression>` or a component list
    /// `[a, b, c]`.
    pub fn resolve_potential(&self, text: &str) -> Result<Potential, String> {
        let text = text.trim();
        if let Some(f) = text.strip_prefix("grad:") {
            let f = f.trim();
            return match self.field(f) {
                Some(Field::Scalar(u)) => Ok(Potential::Gradient(u.clone())),
                Some(Field::Vector(_)) => Err(format!("`{f}` is a vector field, not a function")),
                None => parse_expr(f, self.spec())
                    .map(Potential::Gradient)
                    .map_err(|e| format!("potential function: {e}")),
            };
        }
        if let Some(inner) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let comps = split_top(inner, ',')
                .into_iter()
                .map(|(_, c)| parse_expr(c.trim(), self.spec()).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            if comps.len() != self.model.dim() {
                return Err(format!("expected {} components, got {}", self.model.dim(), comps.len()));
            }
            return Ok(Potential::Field(TensorField::vector(comps)));
        }
        match self.field(text) {
            Some(Field::Vector(z)) => return Ok(Potential::Field(z.clone())),
            Some(Field::Scalar(_)) => return Err(format!("`{text}` is a function; use grad:{text}")),
            None => {}
        }
        if text == "xi" {
            if let Some(s) = &self.structure {
                return Ok(Potential::Field(s.xi().clone()));
            }
            return Err("`xi` needs a structure".into());
        }
        Err(format!("unknown potential `{text}`"))
    }

    pub fn soliton_data(&self) -> Option<Result<SolitonData, String>> {
        let entry = self.soliton.as_ref()?;
        Some(self.resolve_potential(&entry.potential).and_then(|p| {
            SolitonData::new(p, entry.lambda.clone(), entry.delta.clone()).map_err(|e: SolitonError| e.to_string())
        }))
    }
}

/// Load a file path or a `builtin:<name>[?key=value&...]` URI.
pub fn load(source: &str) -> Result<Manifold, LoadError> {
    if let Some(rest) = source.strip_prefix("builtin:") {
        return load_builtin(source, rest);
    }
    let text = std::fs::read_to_string(source).map_err(|e| LoadError::Io {
        path: source.to_string(),
        message: e.to_string(),
    })?;
    parse_manifold(&text)
}

fn load_builtin(uri: &str, rest: &str) -> Result<Manifold, LoadError> {
    let (name, query) = rest.split_once('?').unwrap_or((rest, ""));
    let mut params = BTreeMap::new();
    for pair in query.split('&').filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| LoadError::Builtin {
            uri: uri.to_string(),
            message: format!("parameter `{pair}` is not key=value"),
        })?;
        params.insert(k.to_string(), v.to_string());
    }
    let s = builtin(name, &params).map_err(|e| LoadError::Builtin {
        uri: uri.to_string(),
        message: e.to_string(),
    })?;
    Ok(Manifold::from_structure(s))
}

#[derive(Debug)]
struct Line<'a> {
    number: usize,
    /// 1-based column of `text`'s first character.
    column: usize,
    text: &'a str,
}

#[derive(Debug, Default)]
struct Section<'a> {
    line: usize,
    lines: Vec<Line<'a>>,
}

fn trimmed(number: usize, raw: &str, from: usize) -> Option<Line<'_>> {
    let body = raw.split('#').next().unwrap_or("");
    let text = body.trim();
    if text.is_empty() {
        return None;
    }
    let lead = body.len() - body.trim_start().len();
    Some(Line {
        number,
        column: from + raw[..lead].chars().count(),
        text,
    })
}

fn split_sections(text: &str) -> Result<BTreeMap<&'static str, Section<'_>>, LoadError> {
    let mut sections: BTreeMap<&'static str, Section<'_>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (i, raw) in text.lines().enumerate() {
        let Some(line) = trimmed(i + 1, raw, 1) else { continue };
        if let Some(rest) = line.text.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| LoadError::Parse {
                line: line.number,
                column: line.column,
                message: "section header is missing `]`".into(),
            })?;
            let name = name.trim();
            let Some(known) = SECTIONS.iter().find(|s| **s == name) else {
                return Err(LoadError::Parse {
                    line: line.number,
                    column: line.column + 1,
                    message: format!("unknown section `{name}`"),
                });
            };
            if sections.contains_key(known) {
                return Err(LoadError::Parse {
                    line: line.number,
                    column: line.column,
                    message: format!("section `{name}` appears twice"),
                });
            }
            sections.insert(
                known,
                Section {
                    line: line.number,
                    lines: Vec::new(),
                },
            );
            current = Some(known);
            continue;
        }
        let Some(name) = current else {
            return Err(LoadError::Parse {
                line: line.number,
                column: line.column,
                message: "content before the first section".into(),
            });
        };
        sections.get_mut(name).expect("current section exists").lines.push(line);
    }
    Ok(sections)
}

/// `key = value` with the column of the value.
fn key_value<'a>(line: &Line<'a>) -> Result<(&'a str, Line<'a>), LoadError> {
    let Some(eq) = line.text.find('=') else {
        return Err(LoadError::Parse {
            line: line.number,
            column: line.column,
            message: "expected `key = value`".into(),
        });
    };
    let key = line.text[..eq].trim();
    let raw = &line.text[eq + 1..];
    let value = raw.trim();
    let lead = raw.len() - raw.trim_start().len();
    let column = line.column + line.text[..eq + 1].chars().count() + raw[..lead].chars().count();
    Ok((
        key,
        Line {
            number: line.number,
            column,
            text: value,
        },
    ))
}

/// Split at `sep` outside parentheses, with byte offsets of each piece.
fn split_top(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out
}

fn sub_line<'a>(line: &Line<'a>, offset: usize, piece: &'a str) -> Line<'a> {
    let lead = piece.len() - piece.trim_start().len();
    Line {
        number: line.number,
        column: line.column + line.text[..offset].chars().count() + piece[..lead].chars().count(),
        text: piece.trim(),
    }
}

fn parse_at(line: &Line<'_>, section: &str, spec: &DerivationSpec) -> Result<Expr, LoadError> {
    if line.text.is_empty() {
        return Err(LoadError::Parse {
            line: line.number,
            column: line.column,
            message: "missing expression".into(),
        });
    }
    parse_expr(line.text, spec).map_err(|e| match e {
        SymbolicError::Syntax { position, message } => LoadError::Parse {
            line: line.number,
            column: line.column + line.text[..position.min(line.text.len())].chars().count(),
            message,
        },
        other => semantic(section, Some(line.number), other.to_string()),
    })
}

fn parse_list(line: &Line<'_>, section: &str, spec: &DerivationSpec, n: usize) -> Result<Vec<Expr>, LoadError> {
    let pieces = split_top(line.text, ',');
    if pieces.len() != n {
        return Err(semantic(
            section,
            Some(line.number),
            format!("expected {n} comma-separated entries, found {}", pieces.len()),
        ));
    }
    pieces
        .into_iter()
        .map(|(off, p)| parse_at(&sub_line(line, off, p), section, spec))
        .collect()
}

fn section_keys<'a>(
    section: &Section<'a>,
    name: &str,
    allowed: &[&str],
) -> Result<BTreeMap<&'a str, Line<'a>>, LoadError> {
    let mut out = BTreeMap::new();
    for line in &section.lines {
        let (key, value) = key_value(line)?;
        if !allowed.contains(&key) {
            return Err(semantic(name, Some(line.number), format!("unknown key `{key}`")));
        }
        if out.insert(key, value).is_some() {
            return Err(semantic(name, Some(line.number), format!("`{key}` given twice")));
        }
    }
    Ok(out)
}

fn require<'a, 'b>(
    keys: &'b BTreeMap<&str, Line<'a>>,
    key: &str,
    section: &str,
    at: usize,
) -> Result<&'b Line<'a>, LoadError> {
    keys.get(key)
        .ok_or_else(|| semantic(section, Some(at), format!("missing `{key}`")))
}

pub fn parse_manifold(text: &str) -> Result<Manifold, LoadError> {
    let sections = split_sections(text)?;
    let manifold = sections
        .get("manifold")
        .ok_or_else(|| semantic("manifold", None, "section is required"))?;
    let keys = section_keys(manifold, "manifold", &["name", "mode", "basis", "dimension"])?;
    let name = keys.get("name").map_or("manifold", |l| l.text).to_string();
    let mode = require(&keys, "mode", "manifold", manifold.line)?;
    let frame = match mode.text {
        "chart" => false,
        "frame" => true,
        other => {
            return Err(semantic(
                "manifold",
                Some(mode.number),
                format!("mode must be chart or frame, not `{other}`"),
            ))
        }
    };
    let basis_line = require(&keys, "basis", "manifold", manifold.line)?;
    let basis: Vec<&str> = basis_line.text.split_whitespace().collect();
    if basis.is_empty() {
        return Err(semantic("manifold", Some(basis_line.number), "basis is empty"));
    }
    if let Some(d) = keys.get("dimension") {
        let n: usize = d.text.parse().map_err(|_| {
            semantic(
                "manifold",
                Some(d.number),
                format!("dimension `{}` is not a number", d.text),
            )
        })?;
        if n != basis.len() {
            return Err(semantic(
                "manifold",
                Some(d.number),
                format!("dimension {n} does not match {} basis labels", basis.len()),
            ));
        }
    }
    let n = basis.len();
    let mut spec = if frame {
        DerivationSpec::frame(&basis)
    } else {
        DerivationSpec::chart(&basis)
    };
    if let Some(sec) = sections.get("symbols") {
        declare_symbols(&mut spec, sec)?;
    }

    let metric_sec = sections
        .get("metric")
        .ok_or_else(|| semantic("metric", None, "section is required"))?;
    if metric_sec.lines.len() != n {
        return Err(semantic(
            "metric",
            Some(metric_sec.line),
            format!("expected {n} rows, found {}", metric_sec.lines.len()),
        ));
    }
    let metric = metric_sec
        .lines
        .iter()
        .map(|l| parse_list(l, "metric", &spec, n))
        .collect::<Result<Vec<_>, _>>()?;

    let mut brackets = Vec::new();
    if let Some(sec) = sections.get("brackets") {
        if !frame {
            return Err(semantic(
                "brackets",
                Some(sec.line),
                "brackets are only allowed in frame mode",
            ));
        }
        for line in &sec.lines {
            let (lhs, value) = key_value(line)?;
            let idx: Vec<&str> = lhs.split_whitespace().collect();
            if idx.len() != 3 {
                return Err(semantic(
                    "brackets",
                    Some(line.number),
                    "expected `a b c = coefficient`",
                ));
            }
            let mut ijk = [0usize; 3];
            for (slot, label) in ijk.iter_mut().zip(&idx) {
                *slot = spec
                    .direction_index(label)
                    .ok_or_else(|| semantic("brackets", Some(line.number), format!("unknown basis label `{label}`")))?;
            }
            brackets.push((ijk[0], ijk[1], ijk[2], parse_at(&value, "brackets", &spec)?));
        }
    }
    let model = if frame {
        ManifoldModel::frame(&name, spec, metric, &brackets)
    } else {
        ManifoldModel::chart(&name, spec, metric)
    }
    .map_err(|e| match e {
        GeometryError::MetricNotSymmetric { i, j } => semantic(
            "metric",
            Some(metric_sec.lines[i].number),
            format!(
                "not symmetric: g({0}, {1}) differs from g({1}, {0})",
                basis[i], basis[j]
            ),
        ),
        GeometryError::BracketAntisymmetry { .. } | GeometryError::Jacobi { .. } => {
            semantic("brackets", None, e.to_string())
        }
        _ => semantic("metric", None, e.to_string()),
    })?;

    let structure = match sections.get("structure") {
        Some(sec) => Some(parse_structure(sec, &model)?),
        None => None,
    };
    let mut m = Manifold {
        model,
        structure,
        fields: Vec::new(),
        soliton: None,
    };
    if let Some(sec) = sections.get("fields") {
        parse_fields(sec, &mut m)?;
    }
    if let Some(sec) = sections.get("soliton") {
        let keys = section_keys(sec, "soliton", &["potential", "lambda", "delta"])?;
        let potential = require(&keys, "potential", "soliton", sec.line)?;
        let lambda = parse_at(require(&keys, "lambda", "soliton", sec.line)?, "soliton", m.spec())?;
        let delta_line = require(&keys, "delta", "soliton", sec.line)?;
        let delta = parse_at(delta_line, "soliton", m.spec())?;
        if delta.is_zero() {
            return Err(semantic("soliton", Some(delta_line.number), "delta must be nonzero"));
        }
        m.resolve_potential(potential.text)
            .map_err(|e| semantic("soliton", Some(potential.number), e))?;
        m.soliton = Some(SolitonEntry {
            potential: potential.text.to_string(),
            lambda,
            delta,
        });
    }
    Ok(m)
}

fn declare_symbols(spec: &mut DerivationSpec, sec: &Section<'_>) -> Result<(), LoadError> {
    // Rules may mention any declared symbol, so they are parsed against a
    // table where every name already exists.
    let mut entries = Vec::new();
    for line in &sec.lines {
        let (name, value) = key_value(line)?;
        entries.push((name, value, line.number));
    }
    let mut lookahead = spec.clone();
    for (name, _, number) in &entries {
        lookahead
            .declare_constant(name)
            .map_err(|e| semantic("symbols", Some(*number), e.to_string()))?;
    }
    for (name, value, number) in &entries {
        let mut words = value.text.splitn(2, char::is_whitespace);
        let kind = match words.next().unwrap_or("") {
            "constant" => SymbolKind::Constant,
            "function" => {
                let rest = words.next().unwrap_or("").trim();
                let depends_on = match rest.strip_prefix("of") {
                    Some(vars) => vars
                        .split_whitespace()
                        .map(|v| {
                            spec.direction_index(v)
                                .ok_or_else(|| semantic("symbols", Some(*number), format!("unknown coordinate `{v}`")))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                    None if rest.is_empty() => (0..spec.dim()).collect(),
                    None => {
                        return Err(semantic(
                            "symbols",
                            Some(*number),
                            "expected `function of <coordinates>`",
                        ))
                    }
                };
                SymbolKind::Function { depends_on }
            }
            "rule" => {
                let rest = words.next().unwrap_or("");
                let offset = value.text.len() - rest.len();
                let line = sub_line(value, offset, rest);
                SymbolKind::Rule(parse_list(&line, "symbols", &lookahead, spec.dim())?)
            }
            other => {
                return Err(semantic(
                    "symbols",
                    Some(*number),
                    format!("`{other}` is not constant, function or rule"),
                ))
            }
        };
        spec.declare(name, kind)
            .map_err(|e| semantic("symbols", Some(*number), e.to_string()))?;
    }
    Ok(())
}

fn parse_structure(sec: &Section<'_>, model: &ManifoldModel) -> Result<ParacontactStructure, LoadError> {
    let n = model.dim();
    let spec = model.spec();
    let keys = section_keys(sec, "structure", &["phi", "xi", "eta", "diagnostic"])?;
    let phi_line = require(&keys, "phi", "structure", sec.line)?;
    let rows = split_top(phi_line.text, ';');
    if rows.len() != n {
        return Err(semantic(
            "structure",
            Some(phi_line.number),
            format!("phi needs {n} rows separated by `;`, found {}", rows.len()),
        ));
    }
    let mut phi = TensorField::zeros(n, 1, 1);
    for (i, (off, row)) in rows.into_iter().enumerate() {
        for (j, e) in parse_list(&sub_line(phi_line, off, row), "structure", spec, n)?
            .into_iter()
            .enumerate()
        {
            phi.set(&[i, j], e);
        }
    }
    let xi = TensorField::vector(parse_list(
        require(&keys, "xi", "structure", sec.line)?,
        "structure",
        spec,
        n,
    )?);
    let eta = TensorField::covector(parse_list(
        require(&keys, "eta", "structure", sec.line)?,
        "structure",
        spec,
        n,
    )?);
    let diagnostic = match keys.get("diagnostic").map(|l| (l.text, l.number)) {
        None | Some(("false", _)) => false,
        Some(("true", _)) => true,
        Some((other, line)) => {
            return Err(semantic(
                "structure",
                Some(line),
                format!("diagnostic must be true or false, not `{other}`"),
            ))
        }
    };
    let built = if diagnostic {
        ParacontactStructure::diagnostic(model.clone(), phi, xi, eta)
    } else {
        ParacontactStructure::new(model.clone(), phi, xi, eta)
    };
    built.map_err(|e| semantic("structure", None, e.to_string()))
}

fn parse_fields(sec: &Section<'_>, m: &mut Manifold) -> Result<(), LoadError> {
    for line in &sec.lines {
        let (lhs, value) = key_value(line)?;
        let mut words = lhs.split_whitespace();
        let (kind, name) = match (words.next(), words.next(), words.next()) {
            (Some(k), Some(n), None) => (k, n),
            _ => {
                return Err(semantic(
                    "fields",
                    Some(line.number),
                    "expected `vector NAME = ...` or `scalar NAME = ...`",
                ))
            }
        };
        if m.field(name).is_some() || name == "xi" {
            return Err(semantic(
                "fields",
                Some(line.number),
                format!("field `{name}` defined twice"),
            ));
        }
        let field = match kind {
            "vector" => Field::Vector(TensorField::vector(parse_list(
                &value,
                "fields",
                m.spec(),
                m.model.dim(),
            )?)),
            "scalar" => Field::Scalar(parse_at(&value, "fields", m.spec())?),
            other => {
                return Err(semantic(
                    "fields",
                    Some(line.number),
                    format!("unknown field kind `{other}`"),
                ))
            }
        };
        m.fields.push((name.to_string(), field));
    }
    Ok(())
}

/// Render a definition in the file format; `parse_manifold` reads it back
/// to an identical model.
pub fn print_manifold(m: &Manifold) -> String {
    let model = &m.model;
    let spec = model.spec();
    let labels = model.labels();
    let r = |e: &Expr| e.render(Some(labels));
    let list = |v: Vec<&Expr>| v.into_iter().map(r).collect::<Vec<_>>().join(", ");
    let n = model.dim();
    let mut out = String::new();
    let _ = writeln!(out, "[manifold]");
    let _ = writeln!(out, "name = {}", model.name());
    let _ = writeln!(out, "mode = {}", if model.is_frame() { "frame" } else { "chart" });
    let _ = writeln!(out, "dimension = {n}");
    let _ = writeln!(out, "basis = {}", labels.join(" "));

    let declared: Vec<_> = spec
        .symbols()
        .filter(|(_, k)| !matches!(k, SymbolKind::Coordinate(_)))
        .collect();
    if !declared.is_empty() {
        let _ = writeln!(out, "\n[symbols]");
        for (name, kind) in declared {
            let text = match kind {
                SymbolKind::Constant => "constant".to_string(),
                SymbolKind::Function { depends_on } => {
                    let vars: Vec<&str> = depends_on.iter().map(|&d| labels[d].as_str()).collect();
                    format!("function of {}", vars.join(" "))
                }
                SymbolKind::Rule(rules) => format!("rule {}", list(rules.iter().collect())),
                SymbolKind::Coordinate(_) => unreachable!(),
            };
            let _ = writeln!(out, "{name} = {text}");
        }
    }

    let _ = writeln!(out, "\n[metric]");
    for i in 0..n {
        let _ = writeln!(out, "{}", list((0..n).map(|j| model.g(i, j)).collect()));
    }

    if model.is_frame() {
        let _ = writeln!(out, "\n[brackets]");
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = model.c(i, j, k);
                    if !c.is_zero() {
                        let _ = writeln!(out, "{} {} {} = {}", labels[i], labels[j], labels[k], r(c));
                    }
                }
            }
        }
    }

    if let Some(s) = &m.structure {
        let _ = writeln!(out, "\n[structure]");
        let rows: Vec<String> = (0..n)
            .map(|i| list((0..n).map(|j| s.phi().get(&[i, j])).collect()))
            .collect();
        let _ = writeln!(out, "phi = {}", rows.join("; "));
        let _ = writeln!(out, "xi = {}", list(s.xi().components().iter().collect()));
        let _ = writeln!(out, "eta = {}", list(s.eta().components().iter().collect()));
        let _ = writeln!(out, "diagnostic = {}", s.is_diagnostic());
    }

    if !m.fields.is_empty() {
        let _ = writeln!(out, "\n[fields]");
        for (name, f) in &m.fields {
            match f {
                Field::Vector(v) => {
                    let _ = writeln!(out, "vector {name} = {}", list(v.components().iter().collect()));
                }
                Field::Scalar(u) => {
                    let _ = writeln!(out, "scalar {name} = {}", r(u));
                }
            }
        }
    }

    if let Some(sol) = &m.soliton {
        let _ = writeln!(out, "\n[soliton]");
        let _ = writeln!(out, "potential = {}", sol.potential);
        let _ = writeln!(out, "lambda = {}", r(&sol.lambda));
        let _ = writeln!(out, "delta = {}", r(&sol.delta));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = "\
# flat para-cosymplectic space
[manifold]
name = flat
mode = chart
basis = x y z

[symbols]
d = constant

[metric]
1, 0, 0
0, -1, 0
0, 0, 1

[structure]
phi = 0, 1, 0; 1, 0, 0; 0, 0, 0
xi = 0, 0, 1
eta = 0, 0, 1

[fields]
vector Z = x, y, z
scalar u = (x^2 - y^2 + z^2)/2

[soliton]
potential = Z
lambda = -d
delta = d
";

    #[test]
    fn loads_a_chart_file() {
        let m = parse_manifold(FLAT).unwrap();
        assert_eq!(m.model.dim(), 3);
        assert!(m.structure.as_ref().unwrap().axioms_hold());
        assert!(matches!(m.field("u"), Some(Field::Scalar(_))));
        assert!(m.soliton_data().unwrap().is_ok());
        assert!(matches!(m.resolve_potential("grad:u"), Ok(Potential::Gradient(_))));
        assert!(matches!(m.resolve_potential("[1, 0, x]"), Ok(Potential::Field(_))));
        assert!(m.resolve_potential("W").is_err());
    }

    #[test]
    fn print_round_trips() {
        let m = parse_manifold(FLAT).unwrap();
        let text = print_manifold(&m);
        let again = parse_manifold(&text).unwrap();
        assert_eq!(again.model.metric(), m.model.metric());
        assert_eq!(print_manifold(&again), text);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let bad = FLAT.replace("0, -1, 0", "0, -1 +, 0");
        match parse_manifold(&bad) {
            Err(LoadError::Parse { line, column, .. }) => {
                assert_eq!(line, 12);
                assert!(column >= 7, "column {column}");
            }
            other => panic!("{other:?}"),
        }
        let err = parse_manifold("x = 1\n").unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 1, column: 1, .. }));
        let err = parse_manifold("[manifold]\n[nope]\n").unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 2, .. }));
    }

    #[test]
    fn semantic_errors_name_the_section() {
        let bad = FLAT.replace("0, -1, 0\n", "0, -1, 2\n");
        match parse_manifold(&bad) {
            Err(LoadError::Semantic { section, .. }) => assert_eq!(section, "metric"),
            other => panic!("{other:?}"),
        }
        let bad = FLAT.replace("0, 0, 1\n\n[structure]", "0, 0\n\n[structure]");
        assert!(matches!(parse_manifold(&bad), Err(LoadError::Semantic { section, .. }) if section == "metric"));
        let bad = FLAT.replace("basis = x y z", "basis = x y z\ndimension = 4");
        assert!(matches!(parse_manifold(&bad), Err(LoadError::Semantic { section, .. }) if section == "manifold"));
    }

    #[test]
    fn builtin_uris() {
        let m = load("builtin:example_5_1?u=0").unwrap();
        assert!(m.model.is_frame());
        let m2 = parse_manifold(&print_manifold(&m)).unwrap();
        assert_eq!(m2.model.structure_functions(), m.model.structure_functions());
        assert!(!load("builtin:example_5_2").unwrap().model.is_frame());
        assert!(matches!(load("builtin:nope"), Err(LoadError::Builtin { .. })));
        assert!(matches!(
            load("builtin:example_5_1?v=1"),
            Err(LoadError::Builtin { .. })
        ));
    }

    #[test]
    fn frame_files_with_rules() {
        let text = "\
[manifold]
mode = frame
basis = e1 e2 e3
[symbols]
w = rule 0, 0, w
[metric]
1, 0, 0
0, -1, 0
0, 0, 1
[brackets]
e1 e2 e3 = -2
e3 e2 e1 = 1
e3 e1 e2 = 1
";
        let m = parse_manifold(text).unwrap();
        assert_eq!(m.model.c(1, 0, 2), &Expr::int(2));
        let again = parse_manifold(&print_manifold(&m)).unwrap();
        assert_eq!(print_manifold(&again), print_manifold(&m));
    }
}
