//! Catalog files: `C <ref> ; <title> ; <payload>`, one item per line.

use std::collections::HashMap;

use proxfence::{Catalog, ContentItem};

use crate::error::ParseError;
use crate::trace::{split_cols, trimmed_col};

/// Parses a catalog. The payload is everything after the second `;`, so it
/// may itself contain semicolons.
pub fn parse_catalog(text: &str, file: &str) -> Result<Catalog, ParseError> {
    let mut items = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let at = |col: usize, msg: String| ParseError::new(file, line_no, col, msg);
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let pieces = split_cols(line, ';');
        if pieces.len() < 3 {
            return Err(at(
                trimmed_col(1, line),
                "expected `C <ref> ; <title> ; <payload>`".into(),
            ));
        }
        let (hc, head) = pieces[0];
        let words = crate::lexer::fields(head, hc);
        let (ref_col, content_ref) = match words.as_slice() {
            [(_, "C"), (c, r)] => (*c, *r),
            [(c, "C")] => return Err(at(*c, "missing content ref after `C`".into())),
            [(_, "C"), _, (c, w), ..] => {
                return Err(at(*c, format!("content ref may not contain spaces, found `{w}`")))
            }
            [(c, w), ..] => return Err(at(*c, format!("expected `C`, found `{w}`"))),
            [] => return Err(at(hc, "missing `C <ref>`".into())),
        };
        if content_ref.contains(',') {
            return Err(at(
                ref_col,
                format!("content ref may not contain `,`, found `{content_ref}`"),
            ));
        }
        if let Some(first) = seen.get(content_ref) {
            return Err(at(
                ref_col,
                format!("duplicate content ref `{content_ref}`, first listed on line {first}"),
            ));
        }
        seen.insert(content_ref.to_owned(), line_no);
        let title = pieces[1].1.trim();
        let payload_col = pieces[2].0;
        let payload = line.chars().skip(payload_col - 1).collect::<String>();
        items.push(ContentItem::new(content_ref, title, payload.trim()).map_err(|e| at(ref_col, e.to_string()))?);
    }
    Catalog::new(items).map_err(|e| ParseError::new(file, 1, 1, e.to_string()))
}
