//! Scan trace files: `T <tick> ; <nodeid>=<rssi> ; ...`, one snapshot per line.

use std::fmt::Write as _;

use proxfence::{NodeId, Rssi, ScanSnapshot, Tick};

use crate::error::ParseError;

/// Splits on `sep`, yielding each piece with the character column where it
/// starts (1-based).
pub(crate) fn split_cols(line: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut col = 1;
    for piece in line.split(sep) {
        out.push((col, piece));
        col += piece.chars().count() + 1;
    }
    out
}

/// Column of the first non-blank character of a piece starting at `col`.
pub(crate) fn trimmed_col(col: usize, piece: &str) -> usize {
    col + piece.chars().take_while(|c| c.is_whitespace()).count()
}

/// Parses a whole trace. A node listed twice on one line keeps its
/// strongest reading.
pub fn parse_trace(text: &str, file: &str) -> Result<Vec<ScanSnapshot>, ParseError> {
    let mut out: Vec<ScanSnapshot> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (snap, tick_col) = parse_line(line, line_no, file)?;
        if let Some(prev) = out.last() {
            if snap.tick() <= prev.tick() {
                return Err(ParseError::new(
                    file,
                    line_no,
                    tick_col,
                    format!("tick {} does not follow tick {}", snap.tick(), prev.tick()),
                ));
            }
        }
        out.push(snap);
    }
    Ok(out)
}

fn parse_line(line: &str, line_no: usize, file: &str) -> Result<(ScanSnapshot, usize), ParseError> {
    let at = |col: usize, msg: String| ParseError::new(file, line_no, col, msg);
    let pieces = split_cols(line, ';');
    let (head_col, head) = pieces[0];
    let words: Vec<(usize, &str)> = crate::lexer::fields(head, head_col);
    match words.as_slice() {
        [(_, "T"), (tc, tick)] => {
            let tick: u64 = tick
                .parse()
                .map_err(|_| at(*tc, format!("expected a non-negative integer tick, found `{tick}`")))?;
            let mut snap = ScanSnapshot::empty(Tick(tick));
            for &(col, piece) in &pieces[1..] {
                let col = trimmed_col(col, piece);
                let piece = piece.trim();
                let Some(eq) = piece.rfind('=') else {
                    return Err(at(col, format!("expected <nodeid>=<rssi>, found `{piece}`")));
                };
                let (node, value) = (piece[..eq].trim_end(), &piece[eq + 1..]);
                let node = NodeId::new(node).map_err(|e| at(col, e.to_string()))?;
                let value_col = col + piece[..=eq].chars().count();
                let rssi = value
                    .trim()
                    .parse::<i32>()
                    .map_err(|_| at(value_col, format!("expected an integer rssi, found `{}`", value.trim())))
                    .and_then(|v| Rssi::new(v).map_err(|e| at(value_col, e.to_string())))?;
                snap.record(node, rssi);
            }
            Ok((snap, *tc))
        }
        [(c, w), ..] if *w != "T" => Err(at(*c, format!("expected `T`, found `{w}`"))),
        [(c, _)] | [(c, _), _] => Err(at(*c, "missing tick after `T`".into())),
        [_, _, (c, w), ..] => Err(at(*c, format!("unexpected `{w}` before `;`"))),
        [] => Err(at(head_col, "missing `T <tick>`".into())),
    }
}

/// Renders snapshots in the trace format, readings in node-key order.
pub fn write_trace(trace: &[ScanSnapshot]) -> String {
    let mut out = String::new();
    for snap in trace {
        let _ = write!(out, "T {}", snap.tick());
        for (node, rssi) in snap.iter() {
            let _ = write!(out, " ; {}={}", node, rssi.dbm());
        }
        out.push('\n');
    }
    out
}
