//! Script-agnostic text normalization shared by the graph loader and the
//! query parser.

use unicode_normalization::UnicodeNormalization;

/// NFKC, lower-case, collapse whitespace runs to one space, trim.
pub fn normalize(text: &str) -> String {
    let folded: String = text.nfkc().flat_map(char::to_lowercase).collect();
    let mut out = String::with_capacity(folded.len());
    for word in folded.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Characters of scripts written without spaces between words.
pub(crate) fn is_unsegmented(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x30FF      // hiragana, katakana
        | 0x3400..=0x4DBF    // CJK ext A
        | 0x4E00..=0x9FFF    // CJK unified
        | 0xF900..=0xFAFF    // CJK compatibility
        | 0xAC00..=0xD7AF    // hangul syllables
        | 0x0E00..=0x0E7F    // thai
        | 0x20000..=0x2FFFF)
}

/// A word character of a space-segmented script. Matches may not start or
/// end in the middle of a run of these.
pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() && !is_unsegmented(c)
}

/// True when `chars[start..end]` does not cut through a word on either side.
pub(crate) fn on_word_boundary(chars: &[char], start: usize, end: usize) -> bool {
    if start >= end || end > chars.len() {
        return false;
    }
    let left_ok = start == 0 || !(is_word_char(chars[start - 1]) && is_word_char(chars[start]));
    let right_ok = end == chars.len() || !(is_word_char(chars[end - 1]) && is_word_char(chars[end]));
    left_ok && right_ok
}
