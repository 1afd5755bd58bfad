//! Mulan-style multi-label data: a dense ARFF file plus an XML label list.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::MultiLabelDataset;
use crate::error::{Error, Result};
use crate::kernel::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum ArffAttribute {
    Numeric(String),
    Nominal(String, Vec<String>),
    /// String and date attributes; carried through parsing but never used as features.
    Other(String),
}

impl ArffAttribute {
    pub fn name(&self) -> &str {
        match self {
            ArffAttribute::Numeric(n) | ArffAttribute::Nominal(n, _) | ArffAttribute::Other(n) => n,
        }
    }
}

/// Parsed ARFF contents. Data cells are kept as raw tokens (`None` for `?`)
/// together with the source line number of each row.
#[derive(Debug, Clone)]
pub struct ArffData {
    pub relation: String,
    pub attributes: Vec<ArffAttribute>,
    pub rows: Vec<(usize, Vec<Option<String>>)>,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Splits on unquoted commas, honouring single/double quotes and backslash escapes.
fn split_fields(s: &str) -> std::result::Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut was_quoted = false;
    let mut chars = s.chars();
    while let Some(ch) = chars.next() {
        match quote {
            Some(q) => {
                if ch == '\\' {
                    match chars.next() {
                        Some(e) => cur.push(e),
                        None => return Err("dangling escape".into()),
                    }
                } else if ch == q {
                    quote = None;
                } else {
                    cur.push(ch);
                }
            }
            None => match ch {
                '\'' | '"' => {
                    quote = Some(ch);
                    was_quoted = true;
                }
                ',' => {
                    out.push(finish_field(&cur, was_quoted));
                    cur.clear();
                    was_quoted = false;
                }
                _ => cur.push(ch),
            },
        }
    }
    if quote.is_some() {
        return Err("unterminated quote".into());
    }
    out.push(finish_field(&cur, was_quoted));
    Ok(out)
}

fn finish_field(raw: &str, quoted: bool) -> String {
    if quoted {
        raw.to_string()
    } else {
        raw.trim().to_string()
    }
}

/// Reads one possibly-quoted token from the start of `s`; returns it and the remainder.
fn take_token(s: &str) -> std::result::Result<(String, &str), String> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    match chars.next() {
        None => Err("expected a name".into()),
        Some((_, q @ ('\'' | '"'))) => {
            let mut name = String::new();
            let mut escaped = false;
            for (i, ch) in chars {
                if escaped {
                    name.push(ch);
                    escaped = false;
                } else if ch == '\\' {
                    escaped = true;
                } else if ch == q {
                    return Ok((name, &s[i + ch.len_utf8()..]));
                } else {
                    name.push(ch);
                }
            }
            Err("unterminated quoted name".into())
        }
        Some(_) => {
            let end = s
                .find(|c: char| c.is_whitespace() || c == '{')
                .unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
    }
}

fn strip_keyword<'a>(line: &'a str, keyword: &str) -> Option<&'a str> {
    let head = line.get(..keyword.len())?;
    if head.eq_ignore_ascii_case(keyword) {
        let rest = &line[keyword.len()..];
        if rest.is_empty() || rest.starts_with(char::is_whitespace) {
            return Some(rest);
        }
    }
    None
}

/// Parses dense ARFF text. `path` is used only for error messages.
pub fn parse_arff(text: &str, path: &Path) -> Result<ArffData> {
    let mut relation = String::new();
    let mut attributes = Vec::new();
    let mut rows = Vec::new();
    let mut in_data = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            if let Some(rest) = strip_keyword(line, "@relation") {
                relation = take_token(rest)
                    .map(|(n, _)| n)
                    .unwrap_or_default();
            } else if let Some(rest) = strip_keyword(line, "@attribute") {
                let (name, rest) = take_token(rest).map_err(|m| parse_err(path, lineno, m))?;
                let ty = rest.trim();
                let attr = if ty.starts_with('{') {
                    let inner = ty
                        .strip_prefix('{')
                        .and_then(|t| t.trim_end().strip_suffix('}'))
                        .ok_or_else(|| parse_err(path, lineno, "unterminated nominal set"))?;
                    let values = split_fields(inner).map_err(|m| parse_err(path, lineno, m))?;
                    ArffAttribute::Nominal(name, values)
                } else {
                    let kw = ty.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
                    match kw.as_str() {
                        "numeric" | "real" | "integer" => ArffAttribute::Numeric(name),
                        "string" | "date" => ArffAttribute::Other(name),
                        "" => return Err(parse_err(path, lineno, "attribute without a type")),
                        other => {
                            return Err(parse_err(
                                path,
                                lineno,
                                format!("unsupported attribute type '{other}'"),
                            ))
                        }
                    }
                };
                attributes.push(attr);
            } else if strip_keyword(line, "@data").is_some() {
                in_data = true;
            } else {
                return Err(parse_err(path, lineno, format!("unexpected header line '{line}'")));
            }
            continue;
        }

        if line.starts_with('{') {
            return Err(parse_err(path, lineno, "sparse ARFF rows are not supported"));
        }
        let fields = split_fields(line).map_err(|m| parse_err(path, lineno, m))?;
        if fields.len() != attributes.len() {
            return Err(parse_err(
                path,
                lineno,
                format!("expected {} values, found {}", attributes.len(), fields.len()),
            ));
        }
        let cells = fields
            .into_iter()
            .map(|f| if f == "?" { None } else { Some(f) })
            .collect();
        rows.push((lineno, cells));
    }
    if !in_data {
        return Err(parse_err(path, text.lines().count(), "missing @data section"));
    }
    Ok(ArffData {
        relation,
        attributes,
        rows,
    })
}

/// Label names from a Mulan XML label file, in document order. Nested
/// (hierarchical) labels are flattened.
pub fn parse_label_xml(text: &str) -> Result<Vec<String>> {
    let doc = roxmltree::Document::parse(text)
        .map_err(|e| Error::Schema(format!("label XML: {e}")))?;
    let names: Vec<String> = doc
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == "label")
        .map(|n| {
            n.attribute("name")
                .map(str::to_string)
                .ok_or_else(|| Error::Schema("label element without a name".into()))
        })
        .collect::<Result<_>>()?;
    if names.is_empty() {
        return Err(Error::Schema("label XML lists no labels".into()));
    }
    Ok(names)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

enum Column {
    Numeric(usize),
    OneHot(usize, String),
}

/// Loads a Mulan dataset. Attributes named in the XML become label columns in
/// XML order; remaining numeric attributes become features in ARFF order and
/// nominal ones are one-hot encoded as `name=value` columns.
pub fn load_mulan(arff_path: impl AsRef<Path>, xml_path: impl AsRef<Path>) -> Result<MultiLabelDataset> {
    let arff_path = arff_path.as_ref();
    let arff = parse_arff(&read(arff_path)?, arff_path)?;
    let label_names = parse_label_xml(&read(xml_path.as_ref())?)?;

    let mut label_attr = Vec::with_capacity(label_names.len());
    for name in &label_names {
        let pos = arff
            .attributes
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| Error::Schema(format!("label '{name}' is not an ARFF attribute")))?;
        label_attr.push(pos);
    }

    let mut columns = Vec::new();
    let mut feature_names = Vec::new();
    for (i, attr) in arff.attributes.iter().enumerate() {
        if label_attr.contains(&i) {
            continue;
        }
        match attr {
            ArffAttribute::Numeric(n) => {
                columns.push(Column::Numeric(i));
                feature_names.push(n.clone());
            }
            ArffAttribute::Nominal(n, values) => {
                for v in values {
                    columns.push(Column::OneHot(i, v.clone()));
                    feature_names.push(format!("{n}={v}"));
                }
            }
            ArffAttribute::Other(_) => {}
        }
    }

    let n = arff.rows.len();
    let d = columns.len();
    let c = label_names.len();
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n * c);
    let mut missing = Vec::new();

    for (r, (lineno, cells)) in arff.rows.iter().enumerate() {
        for (j, col) in columns.iter().enumerate() {
            let (attr, value) = match col {
                Column::Numeric(a) | Column::OneHot(a, _) => (*a, cells[*a].as_deref()),
            };
            let v = match (col, value) {
                (_, None) => {
                    missing.push((r, j));
                    0.0
                }
                (Column::Numeric(_), Some(s)) => s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    parse_err(
                        arff_path,
                        *lineno,
                        format!("attribute '{}': '{s}' is not a number", arff.attributes[attr].name()),
                    )
                })?,
                (Column::OneHot(_, level), Some(s)) => {
                    if let ArffAttribute::Nominal(name, values) = &arff.attributes[attr] {
                        if !values.iter().any(|v| v == s) {
                            return Err(parse_err(
                                arff_path,
                                *lineno,
                                format!("attribute '{name}': '{s}' is not a declared nominal value"),
                            ));
                        }
                    }
                    if s == level {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            features.push(v);
        }
        for (name, &a) in label_names.iter().zip(&label_attr) {
            let v = match cells[a].as_deref().map(str::trim) {
                Some("1") | Some("1.0") => 1.0,
                Some("0") | Some("0.0") => 0.0,
                other => {
                    return Err(Error::Data(format!(
                        "{}:{lineno}: label '{name}' has non-binary value {}",
                        arff_path.display(),
                        other.unwrap_or("?")
                    )))
                }
            };
            labels.push(v);
        }
    }

    let mut ds = MultiLabelDataset::new(
        DenseMatrix::from_vec(n, d, features)?,
        DenseMatrix::from_vec(n, c, labels)?,
        feature_names,
        label_names,
    )?;
    ds.missing = missing;
    Ok(ds)
}

fn quote_name(name: &str) -> String {
    let plain = !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '\'' | '"' | '{' | '}' | '%' | '\\'));
    if plain {
        name.to_string()
    } else {
        let escaped = name.replace('\\', "\\\\").replace('\'', "\\'");
        format!("'{escaped}'")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

/// Writes `ds` as a dense ARFF file (all features numeric, labels `{0,1}`)
/// plus the matching XML label list.
pub fn write_mulan(
    ds: &MultiLabelDataset,
    relation: &str,
    arff_path: impl AsRef<Path>,
    xml_path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}\n", quote_name(relation));
    for name in &ds.feature_names {
        let _ = writeln!(out, "@attribute {} numeric", quote_name(name));
    }
    for name in &ds.label_names {
        let _ = writeln!(out, "@attribute {} {{0,1}}", quote_name(name));
    }
    out.push_str("\n@data\n");
    let d = ds.num_features();
    let mut is_missing = vec![false; ds.len() * d];
    for &(r, c) in &ds.missing {
        is_missing[r * d + c] = true;
    }
    for r in 0..ds.len() {
        let mut cells: Vec<String> = ds
            .features
            .row(r)
            .iter()
            .enumerate()
            .map(|(c, v)| if is_missing[r * d + c] { "?".into() } else { format!("{v:?}") })
            .collect();
        cells.extend(ds.labels.row(r).iter().map(|&v| if v == 1.0 { "1" } else { "0" }.to_string()));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let arff_path: PathBuf = arff_path.as_ref().into();
    fs::write(&arff_path, out).map_err(|e| Error::io(&arff_path, e))?;

    let mut xml = String::from(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<labels xmlns=\"http://mulan.sourceforge.net/labels\">\n",
    );
    for name in &ds.label_names {
        let _ = writeln!(xml, "<label name=\"{}\"></label>", xml_escape(name));
    }
    xml.push_str("</labels>\n");
    let xml_path: PathBuf = xml_path.as_ref().into();
    fs::write(&xml_path, xml).map_err(|e| Error::io(&xml_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_ARFF: &str = "% toy\n@relation toy\n\n@attribute f1 numeric\n@ATTRIBUTE 'f 2' REAL\n@attribute lab1 {0,1}\n@attribute lab2 {0,1}\n\n@data\n0.5,1,1,0\n1.5,-2,0,0\n2.5,3e-1,1,1\n";
    const SMALL_XML: &str = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<labels xmlns=\"http://mulan.sourceforge.net/labels\">\n<label name=\"lab1\"></label>\n<label name=\"lab2\"></label>\n</labels>\n";

    fn write_pair(dir: &Path, arff: &str, xml: &str) -> (PathBuf, PathBuf) {
        let a = dir.join("d.arff");
        let x = dir.join("d.xml");
        fs::write(&a, arff).unwrap();
        fs::write(&x, xml).unwrap();
        (a, x)
    }

    #[test]
    fn loads_hand_written_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let (a, x) = write_pair(dir.path(), SMALL_ARFF, SMALL_XML);
        let ds = load_mulan(&a, &x).unwrap();
        assert_eq!(ds.features.shape(), (3, 2));
        assert_eq!(ds.labels.shape(), (3, 2));
        assert_eq!(ds.features.as_slice(), &[0.5, 1.0, 1.5, -2.0, 2.5, 0.3]);
        assert_eq!(ds.labels.as_slice(), &[1.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(ds.feature_names, vec!["f1", "f 2"]);
        assert_eq!(ds.label_names, vec!["lab1", "lab2"]);
    }

    #[test]
    fn label_order_follows_xml() {
        let dir = tempfile::tempdir().unwrap();
        let xml = SMALL_XML.replace("lab1", "tmp").replace("lab2", "lab1").replace("tmp", "lab2");
        let (a, x) = write_pair(dir.path(), SMALL_ARFF, &xml);
        let ds = load_mulan(&a, &x).unwrap();
        assert_eq!(ds.label_names, vec!["lab2", "lab1"]);
        assert_eq!(ds.labels.row(0), &[0.0, 1.0]);
    }

    #[test]
    fn attribute_absent_from_xml_becomes_feature() {
        let dir = tempfile::tempdir().unwrap();
        let xml = SMALL_XML.replace("<label name=\"lab2\"></label>\n", "");
        let (a, x) = write_pair(dir.path(), SMALL_ARFF, &xml);
        let ds = load_mulan(&a, &x).unwrap();
        assert_eq!(ds.label_names, vec!["lab1"]);
        // lab2 is nominal {0,1}, so it is one-hot encoded
        assert_eq!(ds.feature_names, vec!["f1", "f 2", "lab2=0", "lab2=1"]);
        assert_eq!(ds.features.row(2), &[2.5, 0.3, 0.0, 1.0]);
    }

    #[test]
    fn missing_label_is_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let xml = SMALL_XML.replace("lab2", "nope");
        let (a, x) = write_pair(dir.path(), SMALL_ARFF, &xml);
        assert!(matches!(load_mulan(&a, &x), Err(Error::Schema(_))));
    }

    #[test]
    fn malformed_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let arff = SMALL_ARFF.replace("1.5,-2,0,0", "1.5,0,0");
        let (a, x) = write_pair(dir.path(), &arff, SMALL_XML);
        match load_mulan(&a, &x) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 11),
            other => panic!("expected parse error, got {other:?}"),
        }
        let arff = SMALL_ARFF.replace("1.5,-2,0,0", "abc,-2,0,0");
        let (a, x) = write_pair(dir.path(), &arff, SMALL_XML);
        assert!(matches!(load_mulan(&a, &x), Err(Error::Parse { line: 11, .. })));
    }

    #[test]
    fn non_binary_label_is_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let arff = SMALL_ARFF
            .replace("@attribute lab2 {0,1}", "@attribute lab2 numeric")
            .replace("1.5,-2,0,0", "1.5,-2,0,2");
        let (a, x) = write_pair(dir.path(), &arff, SMALL_XML);
        assert!(matches!(load_mulan(&a, &x), Err(Error::Data(_))));
    }

    #[test]
    fn nominal_features_and_missing_values() {
        let arff = "@relation r\n@attribute colour {red,'dark blue',green}\n@attribute x numeric\n@attribute y {0,1}\n@data\nred,1,1\n'dark blue',?,0\n?,3,1\n";
        let xml = "<labels><label name=\"y\"/></labels>";
        let dir = tempfile::tempdir().unwrap();
        let (a, x) = write_pair(dir.path(), arff, xml);
        let ds = load_mulan(&a, &x).unwrap();
        assert_eq!(
            ds.feature_names,
            vec!["colour=red", "colour=dark blue", "colour=green", "x"]
        );
        assert_eq!(ds.features.row(0), &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(ds.features.row(1)[..3], [0.0, 1.0, 0.0]);
        assert_eq!(ds.missing, vec![(1, 3), (2, 0), (2, 1), (2, 2)]);
    }

    #[test]
    fn sparse_rows_rejected() {
        let arff = "@relation r\n@attribute x numeric\n@attribute y {0,1}\n@data\n{0 1, 1 1}\n";
        assert!(matches!(
            parse_arff(arff, Path::new("s.arff")),
            Err(Error::Parse { line: 5, .. })
        ));
    }

    #[test]
    fn write_then_reload_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let (a, x) = write_pair(dir.path(), SMALL_ARFF, SMALL_XML);
        let mut ds = load_mulan(&a, &x).unwrap();
        ds.feature_names[0] = "odd, 'name'".into();
        ds.features.set(1, 1, 0.1 + 0.2);
        let a2 = dir.path().join("w.arff");
        let x2 = dir.path().join("w.xml");
        write_mulan(&ds, "round trip", &a2, &x2).unwrap();
        let back = load_mulan(&a2, &x2).unwrap();
        assert_eq!(back, ds);
    }
}
