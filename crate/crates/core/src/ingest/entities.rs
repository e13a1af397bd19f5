//! XML entity resolution for the DBLP dump.
//!
//! The dump references named entities (`&uuml;`, `&eacute;`, ...) that are
//! declared in the external `dblp.dtd` file rather than in the document
//! itself. The parser therefore carries an [`EntityTable`] loaded from that
//! DTD (or from an internal DOCTYPE subset). Character references and the
//! five predefined XML entities always resolve.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{LensError, Result};

#[derive(Debug, Default, Clone)]
pub struct EntityTable {
    map: HashMap<String, String>,
}

impl EntityTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads `<!ENTITY name "value">` declarations from a DTD file.
    pub fn from_dtd_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| LensError::io_context(format!("reading DTD {}", path.display()), e))?;
        let mut table = Self::new();
        table.parse_declarations(&text);
        Ok(table)
    }

    /// Scans `text` for general entity declarations and records them.
    /// Parameter entities (`<!ENTITY % ...>`) are skipped.
    pub fn parse_declarations(&mut self, text: &str) {
        let mut rest = text;
        while let Some(pos) = rest.find("<!ENTITY") {
            rest = &rest[pos + "<!ENTITY".len()..];
            let Some(end) = rest.find('>') else { break };
            let decl = &rest[..end];
            rest = &rest[end + 1..];

            let decl = decl.trim();
            if decl.starts_with('%') {
                continue;
            }
            let mut parts = decl.splitn(2, char::is_whitespace);
            let Some(name) = parts.next() else { continue };
            let Some(value_part) = parts.next() else {
                continue;
            };
            let value_part = value_part.trim();
            let quote = match value_part.chars().next() {
                Some(q @ ('"' | '\'')) => q,
                _ => continue, // SYSTEM/PUBLIC external entity, not resolvable here
            };
            let inner = &value_part[1..];
            let Some(close) = inner.find(quote) else {
                continue;
            };
            let value = resolve_char_refs(&inner[..close]);
            self.map.insert(name.to_string(), value);
        }
    }

    /// Resolves one entity name, including the predefined XML five.
    pub fn resolve(&self, name: &str) -> Option<&str> {
        match name {
            "amp" => Some("&"),
            "lt" => Some("<"),
            "gt" => Some(">"),
            "apos" => Some("'"),
            "quot" => Some("\""),
            _ => self.map.get(name).map(String::as_str),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Replaces `&#NNN;` / `&#xHH;` character references inside an entity
/// replacement value, so lookups return plain text.
fn resolve_char_refs(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    let mut rest = value;
    while let Some(start) = rest.find("&#") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        match after.find(';') {
            Some(semi) => {
                let num = &after[..semi];
                let code = if let Some(hex) = num.strip_prefix(['x', 'X']) {
                    u32::from_str_radix(hex, 16).ok()
                } else {
                    num.parse::<u32>().ok()
                };
                match code.and_then(char::from_u32) {
                    Some(c) => out.push(c),
                    None => {
                        out.push_str("&#");
                        out.push_str(num);
                        out.push(';');
                    }
                }
                rest = &after[semi + 1..];
            }
            None => {
                out.push_str("&#");
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_declarations_and_resolves_char_refs() {
        let mut t = EntityTable::new();
        t.parse_declarations(
            r#"<!ENTITY uuml "&#252;">
               <!ENTITY % pe "ignored">
               <!ENTITY reg '&#174;'>"#,
        );
        assert_eq!(t.resolve("uuml"), Some("\u{fc}"));
        assert_eq!(t.resolve("reg"), Some("\u{ae}"));
        assert_eq!(t.resolve("pe"), None);
    }

    #[test]
    fn predefined_entities_always_resolve() {
        let t = EntityTable::new();
        assert_eq!(t.resolve("amp"), Some("&"));
        assert_eq!(t.resolve("lt"), Some("<"));
        assert_eq!(t.resolve("nope"), None);
    }
}
