//! Content visibility driven by rule firings, plus identity-bearing beacon
//! names for peer discovery and publisher-carried content.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use crate::error::{Error, Result};
use crate::model::{NodeId, Rssi, ScanSnapshot, Tick};
use crate::rules::{ActionSpec, Firing, RuleSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentItem {
    pub content_ref: String,
    pub title: String,
    pub payload: String,
}

impl ContentItem {
    pub fn new(content_ref: impl Into<String>, title: impl Into<String>, payload: impl Into<String>) -> Result<Self> {
        let content_ref = content_ref.into();
        if content_ref.trim().is_empty() {
            return Err(Error::EmptyContentRef);
        }
        Ok(ContentItem {
            content_ref,
            title: title.into(),
            payload: payload.into(),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    items: BTreeMap<String, ContentItem>,
}

impl Catalog {
    pub fn new(items: Vec<ContentItem>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in items {
            if map.contains_key(&item.content_ref) {
                return Err(Error::DuplicateContentRef(item.content_ref));
            }
            map.insert(item.content_ref.clone(), item);
        }
        Ok(Catalog { items: map })
    }

    pub fn get(&self, content_ref: &str) -> Option<&ContentItem> {
        self.items.get(content_ref)
    }

    pub fn contains(&self, content_ref: &str) -> bool {
        self.items.contains_key(content_ref)
    }

    pub fn items(&self) -> impl Iterator<Item = &ContentItem> {
        self.items.values()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Checks that every SHOW/HIDE action resolves to a catalog entry.
    pub fn validate_actions<'a>(&self, actions: impl IntoIterator<Item = &'a ActionSpec>) -> Result<()> {
        for action in actions {
            if let Some(r) = action.content_ref() {
                if !self.contains(r) {
                    return Err(Error::UnknownContentRef(r.to_owned()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilitySet {
    pub tick: Tick,
    pub visible: BTreeSet<String>,
}

impl fmt::Display for VisibilitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.visible.is_empty() {
            write!(f, "V {} ; -", self.tick)
        } else {
            let refs: Vec<&str> = self.visible.iter().map(String::as_str).collect();
            write!(f, "V {} ; {}", self.tick, refs.join(","))
        }
    }
}

/// Applies firings in order: SHOW adds, HIDE removes, EMIT is ignored.
/// The tick is taken from the firings, or `tick` when there are none.
pub fn visible_content(catalog: &Catalog, firings: &[Firing], tick: Tick) -> Result<VisibilitySet> {
    let mut visible = BTreeSet::new();
    for firing in firings {
        match &firing.action {
            ActionSpec::Show(r) => {
                if !catalog.contains(r) {
                    return Err(Error::UnknownContentRef(r.clone()));
                }
                visible.insert(r.clone());
            }
            ActionSpec::Hide(r) => {
                if !catalog.contains(r) {
                    return Err(Error::UnknownContentRef(r.clone()));
                }
                visible.remove(r);
            }
            ActionSpec::Emit(_) => {}
        }
    }
    let tick = firings.first().map_or(tick, |f| f.tick);
    Ok(VisibilitySet { tick, visible })
}

/// Per-tick visibility over a trace, e.g. a device watching for content
/// that a moving publisher carries on its own beacon.
pub fn visibility_timeline(catalog: &Catalog, rules: &RuleSet, trace: &[ScanSnapshot]) -> Result<Vec<VisibilitySet>> {
    trace
        .iter()
        .map(|s| visible_content(catalog, &rules.evaluate(s), s.tick()))
        .collect()
}

pub fn mobile_beacon_visibility(
    catalog: &Catalog,
    rules: &RuleSet,
    trace: &[ScanSnapshot],
) -> Result<Vec<VisibilitySet>> {
    visibility_timeline(catalog, rules, trace)
}

/// Everything outside the RFC 3986 unreserved set is escaped.
const USER_ID_ESCAPE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// A user identifier packed into a broadcastable node name,
/// `prox://id/<percent-encoded id>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeaconIdentity {
    user_id: String,
    encoded: String,
}

impl BeaconIdentity {
    pub const SCHEME: &'static str = "prox://id";
    pub const MAX_USER_ID: usize = 128;

    pub fn encode(user_id: &str) -> Result<Self> {
        if user_id.is_empty() {
            return Err(Error::EmptyUserId);
        }
        let len = user_id.chars().count();
        if len > Self::MAX_USER_ID {
            return Err(Error::IdTooLong(len));
        }
        let encoded = format!("{}/{}", Self::SCHEME, utf8_percent_encode(user_id, USER_ID_ESCAPE));
        if encoded.len() > NodeId::MAX_LEN {
            return Err(Error::IdTooLong(encoded.len()));
        }
        Ok(BeaconIdentity {
            user_id: user_id.to_owned(),
            encoded,
        })
    }

    /// Parses a node name back into an identity. Returns `None` for names
    /// outside the scheme, empty ids and invalid escapes.
    pub fn decode(node: &NodeId) -> Option<Self> {
        let text = node.as_str();
        let prefix = format!("{}/", Self::SCHEME);
        let head = text.get(..prefix.len())?;
        if !head.eq_ignore_ascii_case(&prefix) {
            return None;
        }
        let tail = &text[prefix.len()..];
        let user_id = percent_decode_str(tail).decode_utf8().ok()?.into_owned();
        if user_id.is_empty() || user_id.chars().count() > Self::MAX_USER_ID {
            return None;
        }
        Some(BeaconIdentity {
            user_id,
            encoded: text.to_owned(),
        })
    }

    pub fn user_id(&self) -> &str {
        &self.user_id
    }

    pub fn encoded(&self) -> &str {
        &self.encoded
    }

    pub fn node_id(&self) -> NodeId {
        NodeId::new(&self.encoded).expect("encoded identity fits a node id")
    }
}

pub fn encode_identity(user_id: &str) -> Result<BeaconIdentity> {
    BeaconIdentity::encode(user_id)
}

/// Users advertising an identity beacon in this snapshot, in node order.
pub fn discover_peers(snapshot: &ScanSnapshot) -> Vec<(String, Rssi)> {
    snapshot
        .iter()
        .filter_map(|(node, rssi)| BeaconIdentity::decode(node).map(|id| (id.user_id, rssi)))
        .collect()
}
