//! Per-line tokenizer for the rule DSL.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    /// Double-quoted string, escapes resolved.
    Str,
    /// One of `(`, `)`, `,`, `:=`.
    Sym,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: usize,
    /// 1-based character column of the first character.
    pub col: usize,
}

impl Token {
    pub fn is_word(&self, w: &str) -> bool {
        self.kind == TokenKind::Word && self.text == w
    }

    pub fn is_sym(&self, s: &str) -> bool {
        self.kind == TokenKind::Sym && self.text == s
    }

    pub fn describe(&self) -> String {
        match self.kind {
            TokenKind::Str => format!("string \"{}\"", self.text),
            _ => format!("`{}`", self.text),
        }
    }
}

/// Splits one line into tokens. Errors carry the 1-based column.
pub fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, (usize, String)> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut text = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err((col, "unterminated string".into())),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => match chars.get(i + 1) {
                        Some(e @ ('"' | '\\')) => {
                            text.push(*e);
                            i += 2;
                        }
                        _ => return Err((i + 1, "invalid escape, only \\\" and \\\\ are allowed".into())),
                    },
                    Some(ch) => {
                        text.push(*ch);
                        i += 1;
                    }
                }
            }
            out.push(Token {
                kind: TokenKind::Str,
                text,
                line: line_no,
                col,
            });
        } else if matches!(c, '(' | ')' | ',') {
            out.push(Token {
                kind: TokenKind::Sym,
                text: c.to_string(),
                line: line_no,
                col,
            });
            i += 1;
        } else if c == ':' && chars.get(i + 1) == Some(&'=') {
            out.push(Token {
                kind: TokenKind::Sym,
                text: ":=".into(),
                line: line_no,
                col,
            });
            i += 2;
        } else {
            let start = i;
            while i < chars.len() {
                let ch = chars[i];
                if ch.is_whitespace()
                    || matches!(ch, '(' | ')' | ',' | '"')
                    || (ch == ':' && chars.get(i + 1) == Some(&'='))
                {
                    break;
                }
                i += 1;
            }
            out.push(Token {
                kind: TokenKind::Word,
                text: chars[start..i].iter().collect(),
                line: line_no,
                col,
            });
        }
    }
    Ok(out)
}

/// Whitespace-separated fields of `s` with the 1-based character column
/// each starts at, counting from `base`.
pub fn fields(s: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in s.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (true, Some((c, b))) => {
                out.push((base + c, &s[b..byte]));
                start = None;
            }
            (false, None) => start = Some((col, byte)),
            _ => {}
        }
    }
    if let Some((c, b)) = start {
        out.push((base + c, &s[b..]));
    }
    out
}

/// Quotes a string for the DSL.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}
