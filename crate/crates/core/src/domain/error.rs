use crate::domain::model::{GroupId, ResourceId, UserId};
use crate::urlnorm::InvalidUrl;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("title must not be empty")]
    EmptyTitle,
    #[error("unknown user {0}")]
    UnknownUser(UserId),
    #[error("username {0:?} is already taken")]
    DuplicateUsername(String),
    #[error("unknown group {0}")]
    UnknownGroup(GroupId),
    #[error("unknown resource {0}")]
    UnknownResource(ResourceId),
    #[error("group {0} is read only")]
    ReadOnlyGroup(GroupId),
    #[error("user {user} is not a member of group {group}")]
    NotAMember { user: UserId, group: GroupId },
    #[error("user {user} is already a member of group {group}")]
    AlreadyMember { user: UserId, group: GroupId },
    #[error("the sole owner of group {0} cannot leave it")]
    SoleOwnerCannotLeave(GroupId),
    #[error("{url} is already in group {group}")]
    DuplicateUrlInGroup { group: GroupId, url: String },
    #[error("field {0:?} cannot be edited")]
    FieldNotEditable(String),
    #[error("subgroups cannot contain subgroups")]
    NestingTooDeep,
    #[error("group {subgroup} is not a subgroup of {group}")]
    InvalidSubgroup { group: GroupId, subgroup: GroupId },
    #[error("merging needs at least two distinct source groups")]
    FewerThanTwoSources,
    #[error("value must not be empty")]
    EmptyValue,
    #[error("text is {len} characters long; the limit is {max}")]
    TextTooLong { len: usize, max: usize },
    #[error("tag {0:?} is already assigned")]
    DuplicateTag(String),
    #[error("tag {0:?} is not assigned")]
    UnknownTag(String),
    #[error("capture at {0} lies in the future")]
    CaptureInFuture(String),
    #[error(transparent)]
    InvalidUrl(#[from] InvalidUrl),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("storage failure: {0}")]
    Storage(String),
}

impl DomainError {
    /// Stable machine-readable name used by the API error mapping.
    pub fn code(&self) -> &'static str {
        match self {
            DomainError::EmptyTitle => "EmptyTitle",
            DomainError::UnknownUser(_) => "UnknownUser",
            DomainError::DuplicateUsername(_) => "DuplicateUsername",
            DomainError::UnknownGroup(_) => "UnknownGroup",
            DomainError::UnknownResource(_) => "UnknownResource",
            DomainError::ReadOnlyGroup(_) => "ReadOnlyGroup",
            DomainError::NotAMember { .. } => "NotAMember",
            DomainError::AlreadyMember { .. } => "AlreadyMember",
            DomainError::SoleOwnerCannotLeave(_) => "SoleOwnerCannotLeave",
            DomainError::DuplicateUrlInGroup { .. } => "DuplicateUrlInGroup",
            DomainError::FieldNotEditable(_) => "FieldNotEditable",
            DomainError::NestingTooDeep => "NestingTooDeep",
            DomainError::InvalidSubgroup { .. } => "InvalidSubgroup",
            DomainError::FewerThanTwoSources => "FewerThanTwoSources",
            DomainError::EmptyValue => "EmptyValue",
            DomainError::TextTooLong { .. } => "TextTooLong",
            DomainError::DuplicateTag(_) => "DuplicateTag",
            DomainError::UnknownTag(_) => "UnknownTag",
            DomainError::CaptureInFuture(_) => "CaptureInFuture",
            DomainError::InvalidUrl(_) => "InvalidUrl",
            DomainError::InvalidArgument(_) => "InvalidArgument",
            DomainError::Storage(_) => "Storage",
        }
    }
}

impl From<std::io::Error> for DomainError {
    fn from(err: std::io::Error) -> Self {
        DomainError::Storage(err.to_string())
    }
}

impl From<serde_json::Error> for DomainError {
    fn from(err: serde_json::Error) -> Self {
        DomainError::Storage(err.to_string())
    }
}
