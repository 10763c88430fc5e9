//! What the index stores per resource.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::clock::Timestamp;
use crate::domain::{normalize_tag, GroupId, ResourceId};
use crate::memento::CaptureSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Title,
    Tags,
    Subjects,
    Description,
    Comments,
}

impl Field {
    pub const ALL: [Field; 5] = [
        Field::Title,
        Field::Tags,
        Field::Subjects,
        Field::Description,
        Field::Comments,
    ];

    pub fn weight(self) -> u32 {
        match self {
            Field::Title => 3,
            Field::Tags | Field::Subjects => 2,
            Field::Description | Field::Comments => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Title => "title",
            Field::Tags => "tags",
            Field::Subjects => "subjects",
            Field::Description => "description",
            Field::Comments => "comments",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Facet {
    Group,
    Collector,
    Creator,
    Language,
    MediaType,
    Tag,
    SourceService,
}

impl Facet {
    pub const ALL: [Facet; 7] = [
        Facet::Group,
        Facet::Collector,
        Facet::Creator,
        Facet::Language,
        Facet::MediaType,
        Facet::Tag,
        Facet::SourceService,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Facet::Group => "group",
            Facet::Collector => "collector",
            Facet::Creator => "creator",
            Facet::Language => "language",
            Facet::MediaType => "media_type",
            Facet::Tag => "tag",
            Facet::SourceService => "source_service",
        }
    }

    /// Canonical form of a filter value for this facet.
    pub fn normalize_value(self, raw: &str) -> String {
        match self {
            Facet::Tag => normalize_tag(raw),
            _ => raw.trim().to_owned(),
        }
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Facet {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Facet::ALL
            .into_iter()
            .find(|f| f.as_str() == key)
            .ok_or_else(|| SearchError::InvalidFacetField(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDocument {
    pub resource_id: ResourceId,
    pub group_id: GroupId,
    pub subgroup_id: Option<GroupId>,
    /// Normalized URL, used to suppress duplicate live results.
    pub url: String,
    pub title: String,
    pub description: String,
    pub subjects: Vec<String>,
    pub comments_text: Vec<String>,
    pub tags: Vec<String>,
    pub facets: BTreeMap<Facet, Vec<String>>,
    pub captures: CaptureSpan,
    /// Whether the owning group is public.
    pub public: bool,
}

impl IndexDocument {
    pub fn latest_capture_at(&self) -> Option<Timestamp> {
        self.captures.last
    }

    pub fn field_text(&self, field: Field) -> String {
        match field {
            Field::Title => self.title.clone(),
            Field::Description => self.description.clone(),
            Field::Subjects => self.subjects.join(" ; "),
            Field::Tags => self.tags.join(" ; "),
            Field::Comments => self.comments_text.join(" ; "),
        }
    }

    pub fn facet_values(&self, facet: Facet) -> &[String] {
        self.facets.get(&facet).map(Vec::as_slice).unwrap_or(&[])
    }
}
