//! Structured-text model files, native trace files, and a minimal XES-subset
//! reader for trace interchange.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::core_net::PetriNet;
use crate::data_model::{int_set, DataModel, Domain, Value};
use crate::dawnet::{DawNet, DawNetError, WriteSpec};
use crate::guard::{self};
use crate::trace::{Event, Trace};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("model is invalid: {0}")]
    Model(#[from] DawNetError),
    #[error("xes: {0}")]
    Xes(String),
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses one value literal: integer, quoted string, or boolean.
fn parse_value(line: usize, text: &str) -> Result<Value, FormatError> {
    let t = text.trim();
    if let Some(stripped) = t.strip_prefix('"') {
        let inner = stripped
            .strip_suffix('"')
            .ok_or_else(|| err(line, format!("unterminated string literal: {t}")))?;
        return Ok(Value::Str(inner.to_string()));
    }
    match t {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    t.parse::<i64>()
        .map(Value::Int)
        .map_err(|_| err(line, format!("expected a value literal, found '{t}'")))
}

fn parse_value_set(line: usize, text: &str) -> Result<BTreeSet<Value>, FormatError> {
    let t = text.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| err(line, format!("expected a {{...}} value set, found '{t}'")))?;
    let mut out = BTreeSet::new();
    for part in split_top_level(inner) {
        let p = part.trim();
        if !p.is_empty() {
            out.insert(parse_value(line, p)?);
        }
    }
    Ok(out)
}

/// Splits on commas, respecting quoted strings.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut in_str = false;
    for c in s.chars() {
        match c {
            '"' => {
                in_str = !in_str;
                cur.push(c);
            }
            ',' if !in_str => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

/// Parses the model format:
///
/// ```text
/// net loan
/// place start
/// var request in { 0, 5000 } ordered
/// var level in 0..3
/// trans T1 {
///   guard request <= 5000
///   write request in { 0, 5000 }
///   write level := delete
/// }
/// arc start -> T1
/// ```
pub fn parse_model(text: &str) -> Result<DawNet, FormatError> {
    let mut name = None;
    let mut places: Vec<String> = Vec::new();
    let mut variables: Vec<(String, Domain)> = Vec::new();
    let mut transitions: Vec<String> = Vec::new();
    let mut arcs: Vec<(String, String)> = Vec::new();
    let mut writes: BTreeMap<String, WriteSpec> = BTreeMap::new();
    let mut guard_texts: Vec<(usize, String, String)> = Vec::new();
    let mut current_trans: Option<String> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(t) = &current_trans {
            if line == "}" {
                current_trans = None;
                continue;
            }
            if let Some(rest) = line.strip_prefix("guard ") {
                guard_texts.push((line_no, t.clone(), rest.trim().to_string()));
                continue;
            }
            if let Some(rest) = line.strip_prefix("write ") {
                if let Some((v, _)) = rest.split_once(":=") {
                    let target = rest.split_once(":=").unwrap().1.trim();
                    if target != "delete" {
                        return Err(err(line_no, "expected 'write v := delete'"));
                    }
                    writes
                        .entry(t.clone())
                        .or_default()
                        .insert(v.trim().to_string(), BTreeSet::new());
                } else if let Some((v, set)) = rest.split_once(" in ") {
                    let values = parse_value_set(line_no, set)?;
                    if values.is_empty() {
                        return Err(err(line_no, "empty write set; use ':= delete'"));
                    }
                    writes
                        .entry(t.clone())
                        .or_default()
                        .insert(v.trim().to_string(), values);
                } else {
                    return Err(err(line_no, "expected 'write v in {..}' or 'write v := delete'"));
                }
                continue;
            }
            return Err(err(line_no, format!("unexpected line inside trans block: '{line}'")));
        }
        if let Some(rest) = line.strip_prefix("net ") {
            name = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("place ") {
            places.push(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("var ") {
            let (v, spec) = rest
                .split_once(" in ")
                .ok_or_else(|| err(line_no, "expected 'var NAME in DOMAIN'"))?;
            let spec = spec.trim();
            let (domain_text, ordered) = match spec.strip_suffix(" ordered") {
                Some(d) => (d.trim(), true),
                None => (spec, false),
            };
            let domain = if domain_text.starts_with('{') {
                let values = parse_value_set(line_no, domain_text)?;
                if ordered {
                    if !values.iter().all(|v| matches!(v, Value::Int(_))) {
                        return Err(err(
                            line_no,
                            "'ordered' auto-generates the natural order and needs integers",
                        ));
                    }
                    Domain::int_ordered(values)
                } else {
                    Domain::unordered(values)
                }
            } else if let Some((lo, hi)) = domain_text.split_once("..") {
                let lo: i64 = lo
                    .trim()
                    .parse()
                    .map_err(|_| err(line_no, "bad range lower bound"))?;
                let hi: i64 = hi
                    .trim()
                    .parse()
                    .map_err(|_| err(line_no, "bad range upper bound"))?;
                if lo > hi {
                    return Err(err(line_no, "empty integer range"));
                }
                let values = int_set(lo..=hi);
                if ordered {
                    Domain::int_ordered(values)
                } else {
                    Domain::unordered(values)
                }
            } else {
                return Err(err(line_no, "expected '{..}' or 'LO..HI' domain"));
            };
            variables.push((v.trim().to_string(), domain));
        } else if let Some(rest) = line.strip_prefix("trans ") {
            let rest = rest.trim();
            if let Some(t) = rest.strip_suffix('{') {
                let t = t.trim().to_string();
                transitions.push(t.clone());
                current_trans = Some(t);
            } else {
                transitions.push(rest.to_string());
            }
        } else if let Some(rest) = line.strip_prefix("arc ") {
            let (from, to) = rest
                .split_once("->")
                .ok_or_else(|| err(line_no, "expected 'arc FROM -> TO'"))?;
            arcs.push((from.trim().to_string(), to.trim().to_string()));
        } else {
            return Err(err(line_no, format!("unrecognized line: '{line}'")));
        }
    }
    if current_trans.is_some() {
        return Err(err(text.lines().count(), "unterminated trans block"));
    }
    let _ = name;
    let net = PetriNet::new(places, transitions, arcs).map_err(DawNetError::from)?;
    let data = DataModel::new(variables);
    let mut guards = BTreeMap::new();
    for (line_no, t, g) in guard_texts {
        let parsed = guard::parse(&g, &data)
            .map_err(|e| err(line_no, format!("guard of '{t}': {e}")))?;
        guards.insert(t, parsed);
    }
    Ok(DawNet::new(net, data, writes, guards)?)
}

fn print_value(v: &Value) -> String {
    v.to_string()
}

fn print_value_set(set: &BTreeSet<Value>) -> String {
    let parts: Vec<String> = set.iter().map(print_value).collect();
    format!("{{ {} }}", parts.join(", "))
}

/// Prints a model in canonical form: sections in fixed order, entries
/// sorted, so `print(parse(print(parse(x))))` is byte-identical to
/// `print(parse(x))`.
pub fn print_model(w: &DawNet, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "net {name}");
    out.push('\n');
    for p in w.net().places() {
        let _ = writeln!(out, "place {p}");
    }
    out.push('\n');
    for v in w.data().variables() {
        let domain = w.data().domain(v).expect("declared variable");
        let ordered = if domain.is_ordered() { " ordered" } else { "" };
        let _ = writeln!(out, "var {v} in {}{ordered}", print_value_set(domain.values()));
    }
    out.push('\n');
    for t in w.net().transitions() {
        let guard = w.guard(t).expect("guards are total");
        let spec = w.write_spec(t);
        if guard.is_true() && spec.is_none_or(WriteSpec::is_empty) {
            let _ = writeln!(out, "trans {t}");
            continue;
        }
        let _ = writeln!(out, "trans {t} {{");
        if !guard.is_true() {
            let _ = writeln!(out, "  guard {guard}");
        }
        if let Some(spec) = spec {
            for (v, set) in spec {
                if set.is_empty() {
                    let _ = writeln!(out, "  write {v} := delete");
                } else {
                    let _ = writeln!(out, "  write {v} in {}", print_value_set(set));
                }
            }
        }
        let _ = writeln!(out, "}}");
    }
    out.push('\n');
    for (from, to) in w.net().arcs() {
        let _ = writeln!(out, "arc {from} -> {to}");
    }
    out
}

/// Parses the native trace format, one event per line:
/// `transition { var = value, ... ; deleted: v1, v2 }`.
pub fn parse_trace(text: &str) -> Result<Trace, FormatError> {
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, payload) = match line.split_once('{') {
            None => (line.trim(), None),
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix('}')
                    .ok_or_else(|| err(line_no, "unterminated '{'"))?;
                (name.trim(), Some(inner))
            }
        };
        if name.is_empty() {
            return Err(err(line_no, "missing transition name"));
        }
        let mut event = Event::new(name);
        if let Some(inner) = payload {
            let (writes_part, deleted_part) = match inner.split_once(';') {
                Some((w, d)) => (w, Some(d)),
                None => (inner, None),
            };
            for part in split_top_level(writes_part) {
                let p = part.trim();
                if p.is_empty() {
                    continue;
                }
                let (v, value) = p
                    .split_once('=')
                    .ok_or_else(|| err(line_no, format!("expected 'var = value', found '{p}'")))?;
                event = event.with_write(v.trim(), parse_value(line_no, value)?);
            }
            if let Some(d) = deleted_part {
                let d = d.trim();
                let list = d
                    .strip_prefix("deleted:")
                    .ok_or_else(|| err(line_no, "expected 'deleted: v1, v2' after ';'"))?;
                for v in list.split(',') {
                    let v = v.trim();
                    if !v.is_empty() {
                        event = event.with_delete(v);
                    }
                }
            }
        }
        events.push(event);
    }
    Ok(Trace::new(events))
}

/// Prints a trace in canonical native form.
pub fn print_trace(trace: &Trace) -> String {
    let mut out = String::new();
    for e in &trace.events {
        if e.writes.is_empty() && e.deletes.is_empty() {
            let _ = writeln!(out, "{}", e.transition);
            continue;
        }
        let writes: Vec<String> = e
            .writes
            .iter()
            .map(|(v, val)| format!("{v} = {}", print_value(val)))
            .collect();
        let mut line = format!("{} {{ {}", e.transition, writes.join(", "));
        if !e.deletes.is_empty() {
            if !e.writes.is_empty() {
                line.push(' ');
            }
            let dels: Vec<&str> = e.deletes.iter().map(String::as_str).collect();
            let _ = write!(line, "; deleted: {}", dels.join(", "));
        }
        line.push_str(" }");
        let _ = writeln!(out, "{}", line.replace("{ ;", "{;"));
    }
    out
}

/// Reads the XES subset: per event, `concept:name` names the transition and
/// string/int/boolean attributes become observed writes. `lifecycle:`,
/// `time:` and other `concept:` attributes are ignored; any other attribute
/// element type is rejected.
pub fn parse_xes(text: &str) -> Result<Vec<Trace>, FormatError> {
    use quick_xml::events::Event as XmlEvent;
    use quick_xml::Reader;

    let mut reader = Reader::from_str(text);
    reader.trim_text(true);
    let mut traces: Vec<Trace> = Vec::new();
    let mut current_trace: Option<Vec<Event>> = None;
    let mut current_event: Option<(Option<String>, BTreeMap<String, Value>)> = None;
    loop {
        let ev = reader
            .read_event()
            .map_err(|e| FormatError::Xes(format!("malformed XML: {e}")))?;
        match ev {
            XmlEvent::Eof => break,
            XmlEvent::Start(ref e) | XmlEvent::Empty(ref e) => {
                let tag = String::from_utf8_lossy(e.name().as_ref()).to_string();
                let self_closing = matches!(ev, XmlEvent::Empty(_));
                match tag.as_str() {
                    "log" => {}
                    "trace" => {
                        if !self_closing {
                            current_trace = Some(Vec::new());
                        } else {
                            traces.push(Trace::empty());
                        }
                    }
                    "event" => {
                        if current_trace.is_none() {
                            return Err(FormatError::Xes("event outside a trace".into()));
                        }
                        current_event = Some((None, BTreeMap::new()));
                        if self_closing {
                            return Err(FormatError::Xes(
                                "event without a concept:name attribute".into(),
                            ));
                        }
                    }
                    "string" | "int" | "boolean" | "date" | "float" | "id" | "list"
                    | "container" => {
                        let mut key = None;
                        let mut value = None;
                        for attr in e.attributes() {
                            let attr =
                                attr.map_err(|e| FormatError::Xes(format!("bad attribute: {e}")))?;
                            let k = String::from_utf8_lossy(attr.key.as_ref()).to_string();
                            let v = String::from_utf8_lossy(&attr.value).to_string();
                            match k.as_str() {
                                "key" => key = Some(v),
                                "value" => value = Some(v),
                                _ => {}
                            }
                        }
                        let Some(key) = key else { continue };
                        // Attributes outside events (log/trace globals) are
                        // ignored wholesale.
                        let Some((name, writes)) = current_event.as_mut() else {
                            continue;
                        };
                        if key == "concept:name" {
                            *name = value;
                            continue;
                        }
                        if key.starts_with("lifecycle:")
                            || key.starts_with("time:")
                            || key.starts_with("concept:")
                            || key.starts_with("org:")
                        {
                            continue;
                        }
                        let value = value.ok_or_else(|| {
                            FormatError::Xes(format!("attribute '{key}' has no value"))
                        })?;
                        let parsed = match tag.as_str() {
                            "string" => Value::Str(value),
                            "int" => Value::Int(value.parse().map_err(|_| {
                                FormatError::Xes(format!("bad int value for '{key}': {value}"))
                            })?),
                            "boolean" => Value::Bool(value.parse().map_err(|_| {
                                FormatError::Xes(format!("bad boolean value for '{key}': {value}"))
                            })?),
                            "date" => continue,
                            other => {
                                return Err(FormatError::Xes(format!(
                                    "unsupported attribute type '{other}' for key '{key}'"
                                )))
                            }
                        };
                        writes.insert(key, parsed);
                    }
                    other => {
                        return Err(FormatError::Xes(format!("unsupported element '{other}'")))
                    }
                }
            }
            XmlEvent::End(ref e) => {
                let tag = String::from_utf8_lossy(e.name().as_ref()).to_string();
                match tag.as_str() {
                    "event" => {
                        let (name, writes) = current_event
                            .take()
                            .ok_or_else(|| FormatError::Xes("stray </event>".into()))?;
                        let name = name.ok_or_else(|| {
                            FormatError::Xes("event without a concept:name attribute".into())
                        })?;
                        let mut event = Event::new(name);
                        for (k, v) in writes {
                            event = event.with_write(k, v);
                        }
                        if let Some(t) = current_trace.as_mut() {
                            t.push(event);
                        }
                    }
                    "trace" => {
                        let events = current_trace
                            .take()
                            .ok_or_else(|| FormatError::Xes("stray </trace>".into()))?;
                        traces.push(Trace::new(events));
                    }
                    _ => {}
                }
            }
            _ => {}
        }
    }
    Ok(traces)
}
