//! SpaceEx export of the bounded affine automaton, and a reader for the
//! subset this module writes.
//!
//! Three files are written side by side: the model (`.xml`), the analysis
//! configuration (`.cfg`) and a JSON companion holding the affine fit and the
//! model in structured form. Numbers are written in shortest round-trip form
//! so reading a model back reproduces every coefficient bit for bit.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use unicycle_core::linearize::{Constraint, Flow, LinearExpr, Location, Relation, Transition};
use unicycle_core::{AffineModel, BoundedHybridModel};

use crate::error::{Error, Result};
use crate::numfmt::exact;
use crate::FORMAT_VERSION;

const NAMESPACE: &str = "http://www-verimag.imag.fr/xml-namespaces/sspaceex";

/// Contents of the JSON companion file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Companion {
    pub format_version: u32,
    pub affine_model: AffineModel,
    pub hybrid_model: BoundedHybridModel,
}

/// Paths of one exported model.
#[derive(Debug, Clone, PartialEq)]
pub struct ExportPaths {
    pub xml: PathBuf,
    pub cfg: PathBuf,
    pub json: PathBuf,
}

impl ExportPaths {
    pub fn for_xml(xml: impl AsRef<Path>) -> Self {
        let xml = xml.as_ref().to_path_buf();
        ExportPaths { cfg: xml.with_extension("cfg"), json: xml.with_extension("json"), xml }
    }
}

pub fn format_expr(e: &LinearExpr) -> String {
    let mut s = String::new();
    let mut push = |coeff: f64, body: String| {
        let neg = coeff.is_sign_negative();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&body);
    };
    for (var, c) in &e.terms {
        let body = if c.abs() == 1.0 { var.clone() } else { format!("{}*{var}", exact(c.abs())) };
        push(*c, body);
    }
    if e.constant != 0.0 || e.terms.is_empty() {
        push(e.constant, exact(e.constant.abs()));
    }
    s
}

pub fn format_constraint(c: &Constraint) -> String {
    format!("{} {} {}", format_expr(&c.expr), c.relation.symbol(), exact(c.bound))
}

fn conjunction(cs: &[Constraint]) -> String {
    cs.iter().map(format_constraint).collect::<Vec<_>>().join(" & ")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_xml(m: &BoundedHybridModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<sspaceex xmlns="{NAMESPACE}" version="0.2" math="SpaceEx">"#);
    let _ = writeln!(s, r#"  <component id="{}">"#, m.name);
    for v in &m.variables {
        let _ = writeln!(
            s,
            r#"    <param name="{v}" type="real" local="false" d1="1" d2="1" dynamics="any" controlled="true"/>"#
        );
    }
    for u in &m.inputs {
        let _ = writeln!(
            s,
            r#"    <param name="{u}" type="real" local="false" d1="1" d2="1" dynamics="any" controlled="false"/>"#
        );
    }
    let mut labels: Vec<&str> = Vec::new();
    for t in &m.transitions {
        if !labels.contains(&t.label.as_str()) {
            labels.push(&t.label);
        }
    }
    for l in &labels {
        let _ = writeln!(s, r#"    <param name="{l}" type="label" local="false"/>"#);
    }
    let ids: HashMap<&str, usize> = m.locations.iter().enumerate().map(|(i, l)| (l.name.as_str(), i + 1)).collect();
    for (i, loc) in m.locations.iter().enumerate() {
        let _ = writeln!(s, r#"    <location id="{}" name="{}">"#, i + 1, loc.name);
        if !loc.invariant.is_empty() {
            let _ = writeln!(s, "      <invariant>{}</invariant>", escape(&conjunction(&loc.invariant)));
        }
        let flow: Vec<String> = loc.flows.iter().map(|f| format!("{}' == {}", f.variable, format_expr(&f.rhs))).collect();
        let _ = writeln!(s, "      <flow>{}</flow>", escape(&flow.join(" & ")));
        let _ = writeln!(s, "    </location>");
    }
    for t in &m.transitions {
        let _ = writeln!(s, r#"    <transition source="{}" target="{}">"#, ids[t.source.as_str()], ids[t.target.as_str()]);
        let _ = writeln!(s, "      <label>{}</label>", t.label);
        if !t.guard.is_empty() {
            let _ = writeln!(s, "      <guard>{}</guard>", escape(&conjunction(&t.guard)));
        }
        let _ = writeln!(s, "    </transition>");
    }
    let _ = writeln!(s, "  </component>");
    let _ = writeln!(s, "</sspaceex>");
    s
}

/// Analysis settings written into the `.cfg` file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    pub sampling_time: f64,
    pub time_horizon: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings { sampling_time: 0.01, time_horizon: 10.0 }
    }
}

pub fn write_cfg(m: &BoundedHybridModel, settings: &AnalysisSettings) -> String {
    let mut initially = format!("loc({})=={}", m.name, m.initial_location);
    if !m.initial.is_empty() {
        initially.push_str(" & ");
        initially.push_str(&conjunction(&m.initial));
    }
    let mut s = String::new();
    let _ = writeln!(s, "system = \"{}\"", m.name);
    let _ = writeln!(s, "initially = \"{initially}\"");
    let _ = writeln!(s, "forbidden = \"loc({})=={}\"", m.name, m.forbidden_location);
    let _ = writeln!(s, "scenario = \"supp\"");
    let _ = writeln!(s, "directions = \"oct\"");
    let _ = writeln!(s, "sampling-time = {}", exact(settings.sampling_time));
    let _ = writeln!(s, "time-horizon = {}", exact(settings.time_horizon));
    let _ = writeln!(s, "iter-max = -1");
    let _ = writeln!(s, "output-variables = \"{}\"", m.variables.join(","));
    let _ = writeln!(s, "output-format = \"TXT\"");
    let _ = writeln!(s, "rel-err = 1.0e-12");
    let _ = writeln!(s, "abs-err = 1.0e-15");
    s
}

pub fn companion_json(model: &BoundedHybridModel, affine: &AffineModel) -> String {
    let c = Companion { format_version: FORMAT_VERSION, affine_model: affine.clone(), hybrid_model: model.clone() };
    let mut s = serde_json::to_string_pretty(&c).expect("companion serialises");
    s.push('\n');
    s
}

/// Writes `.xml`, `.cfg` and `.json` next to each other.
pub fn export_verification_model(
    model: &BoundedHybridModel,
    affine: &AffineModel,
    xml_path: impl AsRef<Path>,
) -> Result<ExportPaths> {
    let paths = ExportPaths::for_xml(xml_path);
    if let Some(dir) = paths.xml.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let settings = AnalysisSettings::default();
    for (path, text) in [
        (&paths.xml, write_xml(model)),
        (&paths.cfg, write_cfg(model, &settings)),
        (&paths.json, companion_json(model, affine)),
    ] {
        fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok(paths)
}

pub fn read_companion(path: impl AsRef<Path>) -> Result<Companion> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
}

fn tokenize(s: &str) -> std::result::Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    i += 1;
                    if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                        i += 1;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Token::Num(text.parse().map_err(|_| format!("bad number `{text}`"))?));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

/// Parses `[-] term {(+|-) term}` where a term is `num`, `var` or `num*var`.
pub fn parse_expr(s: &str) -> std::result::Result<LinearExpr, String> {
    let tokens = tokenize(s)?;
    let mut e = LinearExpr::default();
    let mut i = 0;
    let mut first = true;
    while i < tokens.len() || first {
        let mut sign = 1.0;
        match tokens.get(i) {
            Some(Token::Plus) if !first => i += 1,
            Some(Token::Minus) => {
                sign = -1.0;
                i += 1;
            }
            _ if first => {}
            other => return Err(format!("expected + or -, found {other:?} in `{s}`")),
        }
        first = false;
        match (tokens.get(i), tokens.get(i + 1), tokens.get(i + 2)) {
            (Some(Token::Num(c)), Some(Token::Star), Some(Token::Ident(v))) => {
                e.terms.push((v.clone(), sign * c));
                i += 3;
            }
            (Some(Token::Num(c)), _, _) => {
                e.constant += sign * c;
                i += 1;
            }
            (Some(Token::Ident(v)), _, _) => {
                e.terms.push((v.clone(), sign));
                i += 1;
            }
            _ => return Err(format!("expected a term in `{s}`")),
        }
    }
    Ok(e)
}

pub fn parse_constraint(s: &str) -> std::result::Result<Constraint, String> {
    for rel in [Relation::Le, Relation::Ge, Relation::Eq] {
        if let Some((lhs, rhs)) = s.split_once(rel.symbol()) {
            let expr = parse_expr(lhs)?;
            let bound = parse_expr(rhs)?;
            if !bound.terms.is_empty() {
                return Err(format!("right-hand side must be a constant in `{s}`"));
            }
            return Ok(Constraint { expr, relation: rel, bound: bound.constant });
        }
    }
    Err(format!("no relation in `{s}`"))
}

fn parse_conjunction(s: &str) -> std::result::Result<Vec<Constraint>, String> {
    s.split('&').map(str::trim).filter(|c| !c.is_empty()).map(parse_constraint).collect()
}

fn parse_flows(s: &str) -> std::result::Result<Vec<Flow>, String> {
    s.split('&')
        .map(|part| {
            let (lhs, rhs) = part.split_once("==").ok_or_else(|| format!("bad flow `{part}`"))?;
            let variable = lhs.trim().strip_suffix('\'').ok_or_else(|| format!("bad flow `{part}`"))?.trim().to_string();
            Ok(Flow { variable, rhs: parse_expr(rhs)? })
        })
        .collect()
}

/// Parsed `.xml` and `.cfg` pair.
pub fn read_verification_model(xml_path: impl AsRef<Path>) -> Result<BoundedHybridModel> {
    let paths = ExportPaths::for_xml(xml_path);
    let xml = fs::read_to_string(&paths.xml).map_err(|e| Error::io(&paths.xml, e))?;
    let cfg = fs::read_to_string(&paths.cfg).map_err(|e| Error::io(&paths.cfg, e))?;
    let mut model = parse_xml(&xml).map_err(|message| Error::Format { path: paths.xml.clone(), message })?;
    parse_cfg(&cfg, &mut model).map_err(|message| Error::Format { path: paths.cfg.clone(), message })?;
    Ok(model)
}

/// Reads the component; the initial and forbidden sets are left empty.
pub fn parse_xml(text: &str) -> std::result::Result<BoundedHybridModel, String> {
    let doc = roxmltree::Document::parse(text).map_err(|e| e.to_string())?;
    let component = doc
        .descendants()
        .find(|n| n.has_tag_name((NAMESPACE, "component")))
        .ok_or("no component element")?;
    let mut model = BoundedHybridModel {
        name: component.attribute("id").ok_or("component without id")?.to_string(),
        variables: Vec::new(),
        inputs: Vec::new(),
        locations: Vec::new(),
        transitions: Vec::new(),
        initial_location: String::new(),
        initial: Vec::new(),
        forbidden_location: String::new(),
    };
    let mut names: HashMap<String, String> = HashMap::new();
    let child_text = |n: roxmltree::Node, tag: &str| {
        n.children().find(|c| c.has_tag_name((NAMESPACE, tag))).map(|c| c.text().unwrap_or("").to_string())
    };
    for n in component.children().filter(|n| n.is_element()) {
        match n.tag_name().name() {
            "param" if n.attribute("type") == Some("real") => {
                let name = n.attribute("name").ok_or("param without name")?.to_string();
                if n.attribute("controlled") == Some("false") {
                    model.inputs.push(name);
                } else {
                    model.variables.push(name);
                }
            }
            "param" => {}
            "location" => {
                let id = n.attribute("id").ok_or("location without id")?;
                let name = n.attribute("name").ok_or("location without name")?.to_string();
                names.insert(id.to_string(), name.clone());
                let invariant = child_text(n, "invariant").map(|s| parse_conjunction(&s)).transpose()?.unwrap_or_default();
                let flows = child_text(n, "flow").map(|s| parse_flows(&s)).transpose()?.unwrap_or_default();
                model.locations.push(Location { name, flows, invariant });
            }
            "transition" => {
                let lookup = |attr: &str| -> std::result::Result<String, String> {
                    let id = n.attribute(attr).ok_or(format!("transition without {attr}"))?;
                    names.get(id).cloned().ok_or(format!("unknown location id {id}"))
                };
                model.transitions.push(Transition {
                    source: lookup("source")?,
                    target: lookup("target")?,
                    label: child_text(n, "label").unwrap_or_default().trim().to_string(),
                    guard: child_text(n, "guard").map(|s| parse_conjunction(&s)).transpose()?.unwrap_or_default(),
                });
            }
            other => return Err(format!("unexpected element `{other}`")),
        }
    }
    Ok(model)
}

fn cfg_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| {
        let (k, v) = l.split_once('=')?;
        (k.trim() == key).then(|| v.trim().trim_matches('"'))
    })
}

fn parse_loc_atom(atom: &str, system: &str) -> Option<String> {
    let rest = atom.trim().strip_prefix(&format!("loc({system})"))?;
    Some(rest.trim().strip_prefix("==")?.trim().to_string())
}

/// Fills in the initial and forbidden sets from a `.cfg` file.
pub fn parse_cfg(text: &str, model: &mut BoundedHybridModel) -> std::result::Result<(), String> {
    let system = cfg_value(text, "system").ok_or("missing system")?;
    if system != model.name {
        return Err(format!("system `{system}` does not match component `{}`", model.name));
    }
    let initially = cfg_value(text, "initially").ok_or("missing initially")?;
    let mut atoms = initially.split('&');
    model.initial_location =
        atoms.next().and_then(|a| parse_loc_atom(a, system)).ok_or("initially must start with loc(...)==")?;
    model.initial = atoms.map(parse_constraint).collect::<std::result::Result<_, _>>()?;
    let forbidden = cfg_value(text, "forbidden").ok_or("missing forbidden")?;
    model.forbidden_location = parse_loc_atom(forbidden, system).ok_or("forbidden must be loc(...)==")?;
    Ok(())
}
