//! Author name normalization.
//!
//! DBLP already disambiguates people; we only canonicalize the textual form:
//! trim, collapse internal whitespace runs to a single space. Diacritics are
//! preserved (they are part of the identity), as are DBLP homonym suffixes
//! like "0001".

/// Returns the canonical form of an author name, or `None` if the name is
/// empty after trimming.
///
/// Idempotent: `normalize_author_name(n(x)) == n(x)`.
pub fn normalize_author_name(raw: &str) -> Option<String> {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for token in raw.split_whitespace() {
        if pending_space {
            out.push(' ');
        }
        out.push_str(token);
        pending_space = true;
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapses_whitespace() {
        assert_eq!(
            normalize_author_name("  John\t  Doe \n").as_deref(),
            Some("John Doe")
        );
    }

    #[test]
    fn keeps_diacritics_and_suffixes() {
        assert_eq!(
            normalize_author_name("J\u{f6}rg M\u{fc}ller 0002").as_deref(),
            Some("J\u{f6}rg M\u{fc}ller 0002")
        );
    }

    #[test]
    fn empty_is_none() {
        assert_eq!(normalize_author_name(" \t "), None);
    }
}
