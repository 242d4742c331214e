//! World files for the simulator.
//!
//! ```text
//! P p0=-40 n=2.5 sigma=2 sens=-95 seed=7
//! B cafe-wifi 0 0
//! B bus-tag 0 5 -> 40 5 @ 1.5
//! D alice 3 4 -> 10 4 @ 1 -> 10 0 @ 0.5 ADV prox://id/alice
//! ```
//!
//! Omitted `P` keys keep their defaults. Beacons may move like devices, and a
//! device can advertise a node id that other devices' scans pick up.

use proxfence::{NodeId, RadioParams, World};

use crate::error::ParseError;
use crate::lexer::fields;

pub const DEFAULT_SEED: u64 = 0;

type Path = Vec<(f64, f64, f64)>;

enum Entity {
    Beacon {
        node: NodeId,
        x: f64,
        y: f64,
        path: Path,
    },
    Device {
        id: String,
        x: f64,
        y: f64,
        path: Path,
        advertises: Option<NodeId>,
    },
}

pub fn parse_world(text: &str, file: &str) -> Result<World, ParseError> {
    let mut params = RadioParams::default();
    let mut seed = DEFAULT_SEED;
    let mut params_line: Option<usize> = None;
    let mut entities: Vec<(usize, usize, Entity)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let at = |col: usize, msg: String| ParseError::new(file, line_no, col, msg);
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let words = fields(line, 1);
        let (kind_col, kind) = words[0];
        match kind {
            "P" => {
                if let Some(first) = params_line {
                    return Err(at(kind_col, format!("radio parameters already given on line {first}")));
                }
                params_line = Some(line_no);
                for &(col, kv) in &words[1..] {
                    let Some((key, value)) = kv.split_once('=') else {
                        return Err(at(col, format!("expected <key>=<value>, found `{kv}`")));
                    };
                    let value_col = col + key.chars().count() + 1;
                    let num = || {
                        value
                            .parse::<f64>()
                            .map_err(|_| at(value_col, format!("expected a number for `{key}`, found `{value}`")))
                    };
                    match key {
                        "p0" => params.p0 = num()?,
                        "n" => params.n = num()?,
                        "sigma" => params.sigma = num()?,
                        "sens" => params.sensitivity = num()?,
                        "seed" => {
                            seed = value.parse().map_err(|_| {
                                at(
                                    value_col,
                                    format!("expected a non-negative integer seed, found `{value}`"),
                                )
                            })?
                        }
                        _ => {
                            return Err(at(
                                col,
                                format!("unknown parameter `{key}`, expected p0, n, sigma, sens or seed"),
                            ))
                        }
                    }
                }
                params.validate().map_err(|e| at(kind_col, e.to_string()))?;
            }
            "B" | "D" => {
                let Some(&(id_col, id)) = words.get(1) else {
                    return Err(at(kind_col, format!("missing id after `{kind}`")));
                };
                let mut rest = Words {
                    words: &words[2..],
                    end: words[words.len() - 1],
                    at: &at,
                };
                let x = rest.number("x coordinate")?;
                let y = rest.number("y coordinate")?;
                let mut path = Vec::new();
                let mut advertises = None;
                while let Some((col, w)) = rest.next_opt() {
                    match w {
                        "->" => {
                            let wx = rest.number("waypoint x")?;
                            let wy = rest.number("waypoint y")?;
                            rest.expect("@")?;
                            let (speed_col, _) = rest.peek_or("speed")?;
                            let speed = rest.number("speed")?;
                            if !(speed.is_finite() && speed > 0.0) {
                                return Err(at(speed_col, format!("speed must be positive, got {speed}")));
                            }
                            path.push((wx, wy, speed));
                        }
                        "ADV" if kind == "D" && advertises.is_none() => {
                            let (node_col, node) = rest.peek_or("advertised node id")?;
                            rest.next_opt();
                            advertises = Some(NodeId::new(node).map_err(|e| at(node_col, e.to_string()))?);
                            if let Some((c, w)) = rest.next_opt() {
                                return Err(at(c, format!("unexpected `{w}` after the advertised id")));
                            }
                        }
                        _ => return Err(at(col, format!("expected `->` or end of line, found `{w}`"))),
                    }
                }
                let entity = if kind == "B" {
                    Entity::Beacon {
                        node: NodeId::new(id).map_err(|e| at(id_col, e.to_string()))?,
                        x,
                        y,
                        path,
                    }
                } else {
                    Entity::Device {
                        id: id.to_owned(),
                        x,
                        y,
                        path,
                        advertises,
                    }
                };
                entities.push((line_no, id_col, entity));
            }
            other => return Err(at(kind_col, format!("expected `B`, `D` or `P`, found `{other}`"))),
        }
    }

    let mut world =
        World::new(params, seed).map_err(|e| ParseError::new(file, params_line.unwrap_or(1), 1, e.to_string()))?;
    for (line_no, col, entity) in entities {
        let added = match entity {
            Entity::Beacon { node, x, y, path } => world.add_beacon(node, x, y, &path),
            Entity::Device {
                id,
                x,
                y,
                path,
                advertises,
            } => world.add_device(id, x, y, &path, advertises),
        };
        added.map_err(|e| ParseError::new(file, line_no, col, e.to_string()))?;
    }
    Ok(world)
}

struct Words<'a, 'b, F> {
    words: &'a [(usize, &'b str)],
    end: (usize, &'b str),
    at: &'a F,
}

impl<'a, 'b, F: Fn(usize, String) -> ParseError> Words<'a, 'b, F> {
    fn next_opt(&mut self) -> Option<(usize, &'b str)> {
        let (first, rest) = self.words.split_first()?;
        self.words = rest;
        Some(*first)
    }

    fn peek_or(&self, what: &str) -> Result<(usize, &'b str), ParseError> {
        self.words
            .first()
            .copied()
            .ok_or_else(|| (self.at)(self.end.0, format!("expected {what} after `{}`", self.end.1)))
    }

    fn number(&mut self, what: &str) -> Result<f64, ParseError> {
        let (col, w) = self.peek_or(what)?;
        self.next_opt();
        match w.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err((self.at)(col, format!("expected {what}, found `{w}`"))),
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        let (col, w) = self.peek_or(&format!("`{sym}`"))?;
        self.next_opt();
        if w == sym {
            Ok(())
        } else {
            Err((self.at)(col, format!("expected `{sym}`, found `{w}`")))
        }
    }
}
