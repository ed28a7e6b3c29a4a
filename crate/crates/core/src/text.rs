//! Surface-text normalization shared by signatures and matching.

use unicode_normalization::UnicodeNormalization;

/// Normalizes an entity surface form for comparison.
///
/// NFC, superscript markers removed (`p52^Shc`, `p52^{Shc}` and `p52Shc`
/// all compare equal), lower-cased, whitespace collapsed.
pub fn normalize_surface(text: &str) -> String {
    let composed: String = text.nfc().collect();
    let mut out = String::with_capacity(composed.len());
    let mut chars = composed.chars().peekable();
    let mut brace_depth = 0usize;
    let mut pending_space = false;
    while let Some(c) = chars.next() {
        match c {
            '^' => {
                if chars.peek() == Some(&'{') {
                    chars.next();
                    brace_depth += 1;
                }
            }
            '}' if brace_depth > 0 => brace_depth -= 1,
            c if c.is_whitespace() => pending_space = !out.is_empty(),
            c => {
                if pending_space {
                    out.push(' ');
                    pending_space = false;
                }
                out.extend(c.to_lowercase());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superscript_markers_are_stripped() {
        assert_eq!(normalize_surface("p52^Shc"), "p52shc");
        assert_eq!(normalize_surface("p52^{Shc}"), "p52shc");
        assert_eq!(normalize_surface("p52Shc"), "p52shc");
    }

    #[test]
    fn case_and_whitespace() {
        assert_eq!(normalize_surface("  EPHB1 "), "ephb1");
        assert_eq!(normalize_surface("p38   kinase"), "p38 kinase");
    }

    #[test]
    fn nfc_composition() {
        // "e" + combining acute vs precomposed
        assert_eq!(normalize_surface("caf\u{0065}\u{0301}"), normalize_surface("caf\u{00e9}"));
    }
}
