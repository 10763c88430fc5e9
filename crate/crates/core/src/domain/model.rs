//! Entities persisted by the domain store.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clock::Timestamp;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl std::str::FromStr for $name {
            type Err = std::num::ParseIntError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.parse().map($name)
            }
        }
    };
}

id_type!(UserId);
id_type!(GroupId);
id_type!(ResourceId);
id_type!(AnnotationId);
id_type!(
    /// Activity ids are allocated from their own strictly increasing sequence.
    ActivityId
);

impl UserId {
    /// Actor recorded for ingestion, updates and operator commands.
    pub const SYSTEM: UserId = UserId(0);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Admin,
    Curator,
    Member,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserAccount {
    pub id: UserId,
    pub username: String,
    pub display_name: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct UserRecord {
    pub account: UserAccount,
    pub password_hash: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupOrigin {
    Ingested,
    UserCreated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRef {
    pub external_id: String,
    pub portal_link: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub id: GroupId,
    pub title: String,
    pub description: String,
    pub origin: GroupOrigin,
    pub read_only: bool,
    pub source_ref: Option<SourceRef>,
    pub parent_group: Option<GroupId>,
    pub created_by: UserId,
    pub created_at: Timestamp,
    pub collecting_institution: Option<String>,
    pub subjects: Vec<String>,
    pub collectors: Vec<String>,
    /// Readable without membership. Always true for ingested groups.
    pub public: bool,
}

impl Group {
    pub fn is_subgroup(&self) -> bool {
        self.parent_group.is_some()
    }

    /// The group that owns memberships and url uniqueness for this group.
    pub fn root(&self) -> GroupId {
        self.parent_group.unwrap_or(self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MediaType {
    #[default]
    Webpage,
    Image,
    Video,
    File,
}

impl MediaType {
    pub fn as_str(self) -> &'static str {
        match self {
            MediaType::Webpage => "webpage",
            MediaType::Image => "image",
            MediaType::Video => "video",
            MediaType::File => "file",
        }
    }

    pub fn parse(raw: &str) -> Option<Self> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "webpage" | "web" => Some(MediaType::Webpage),
            "image" => Some(MediaType::Image),
            "video" => Some(MediaType::Video),
            "file" => Some(MediaType::File),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResourceSource {
    #[default]
    ArchiveCollection,
    LiveWeb,
    Upload,
}

impl ResourceSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ResourceSource::ArchiveCollection => "archive_collection",
            ResourceSource::LiveWeb => "live_web",
            ResourceSource::Upload => "upload",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Availability {
    Live,
    Gone,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resource {
    pub id: ResourceId,
    pub group_id: GroupId,
    pub subgroup_id: Option<GroupId>,
    pub url: String,
    pub original_url: String,
    pub title: String,
    pub description: String,
    pub subjects: Vec<String>,
    pub collector: String,
    pub creator: String,
    pub publisher: String,
    pub language: String,
    pub format: String,
    pub resource_type: String,
    pub media_type: MediaType,
    pub source: ResourceSource,
    pub added_by: UserId,
    pub added_at: Timestamp,
    pub thumbnail_ref: Option<String>,
    pub availability: Availability,
}

/// Descriptive fields supplied when a resource is created.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NewResource {
    #[serde(alias = "url")]
    pub original_url: String,
    pub subgroup_id: Option<GroupId>,
    pub title: String,
    pub description: String,
    pub subjects: Vec<String>,
    pub collector: String,
    pub creator: String,
    pub publisher: String,
    pub language: String,
    pub format: String,
    pub resource_type: String,
    pub media_type: MediaType,
    pub source: ResourceSource,
    pub availability: Availability,
}

impl NewResource {
    pub fn for_url(url: impl Into<String>) -> Self {
        Self {
            original_url: url.into(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    IngestedArchive,
    OnDemandArchive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureRecord {
    pub resource_id: ResourceId,
    pub capture_datetime: Timestamp,
    pub capture_uri: String,
    pub provenance: Provenance,
}

/// A capture before it is attached to a resource.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewCapture {
    pub capture_datetime: Timestamp,
    pub capture_uri: String,
    pub provenance: Provenance,
}

impl CaptureRecord {
    pub fn key(&self) -> (Timestamp, &str) {
        (self.capture_datetime, self.capture_uri.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: AnnotationId,
    pub resource_id: ResourceId,
    pub author: UserId,
    pub text: String,
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagAssignment {
    pub resource_id: ResourceId,
    pub tag: String,
    pub author: UserId,
    pub created_at: Timestamp,
}

/// Trims, lower-cases and collapses internal whitespace runs to one space.
pub fn normalize_tag(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionType {
    TagAdded,
    TagRemoved,
    CommentAdded,
    SearchExecuted,
    ResourceAdded,
    ResourceEdited,
    ResourceDeleted,
    ResourceMoved,
    ResourceCopied,
    GroupCreated,
    GroupJoined,
    GroupLeft,
    GroupEdited,
    GroupMerged,
    GroupCopied,
    SubgroupCreated,
    SubgroupDeleted,
    ArchiveNowRequested,
    ExportPerformed,
}

impl ActionType {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionType::TagAdded => "tag_added",
            ActionType::TagRemoved => "tag_removed",
            ActionType::CommentAdded => "comment_added",
            ActionType::SearchExecuted => "search_executed",
            ActionType::ResourceAdded => "resource_added",
            ActionType::ResourceEdited => "resource_edited",
            ActionType::ResourceDeleted => "resource_deleted",
            ActionType::ResourceMoved => "resource_moved",
            ActionType::ResourceCopied => "resource_copied",
            ActionType::GroupCreated => "group_created",
            ActionType::GroupJoined => "group_joined",
            ActionType::GroupLeft => "group_left",
            ActionType::GroupEdited => "group_edited",
            ActionType::GroupMerged => "group_merged",
            ActionType::GroupCopied => "group_copied",
            ActionType::SubgroupCreated => "subgroup_created",
            ActionType::SubgroupDeleted => "subgroup_deleted",
            ActionType::ArchiveNowRequested => "archive_now_requested",
            ActionType::ExportPerformed => "export_performed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "ref", rename_all = "snake_case")]
pub enum Subject {
    Group(GroupId),
    Resource(ResourceId),
    Query(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityLogEntry {
    pub id: ActivityId,
    pub actor: UserId,
    pub action_type: ActionType,
    pub subject: Subject,
    pub timestamp: Timestamp,
    pub details: BTreeMap<String, String>,
    /// Groups (including subgroups) the subject belonged to when the action
    /// happened. Drives per-group activity summaries after deletes and moves.
    pub groups: Vec<GroupId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberRole {
    Owner,
    Member,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub user: UserId,
    pub group: GroupId,
    pub member_role: MemberRole,
    pub joined_at: Timestamp,
}

/// Per-collection harvest bookkeeping for incremental updates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrawlCursor {
    pub external_id: String,
    pub last_crawled_at: Timestamp,
    pub latest_capture_at: Option<Timestamp>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tag_normalization() {
        assert_eq!(normalize_tag("  Photo   Gallery "), "photo gallery");
        assert_eq!(normalize_tag("\tTIBET\n"), "tibet");
        assert_eq!(normalize_tag("   "), "");
    }

    proptest! {
        #[test]
        fn tag_normalization_idempotent(raw in "\\PC{0,24}") {
            let once = normalize_tag(&raw);
            prop_assert_eq!(normalize_tag(&once), once);
        }
    }
}
