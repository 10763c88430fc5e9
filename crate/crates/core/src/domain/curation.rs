//! Curation operations on groups, resources, annotations and memberships.
//!
//! Every successful mutating operation commits exactly one activity entry.
//! Checks run in a fixed order: existence, read-only, membership, then
//! operation-specific validation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::clock::{format_iso, Timestamp};
use crate::domain::error::DomainError;
use crate::domain::model::*;
use crate::domain::state::{Op, State};
use crate::domain::store::{Store, Tx};
use crate::urlnorm::normalize_url;

pub const MAX_COMMENT_CHARS: usize = 10_000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewGroup {
    pub title: String,
    pub description: String,
    pub public: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupPatch {
    pub title: Option<String>,
    pub description: Option<String>,
    pub public: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipAction {
    Join,
    Leave,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipChange {
    Joined(Membership),
    Left { user: UserId, group: GroupId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferMode {
    Copy,
    Move,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annotate {
    Comment(String),
    AddTag(String),
    RemoveTag(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnotateOutcome {
    Comment(Annotation),
    Tag(TagAssignment),
    TagRemoved { resource: ResourceId, tag: String },
}

/// Editable resource metadata. `url` and provenance fields are immutable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ResourcePatch {
    pub title: Option<String>,
    pub description: Option<String>,
    pub subjects: Option<Vec<String>>,
    pub creator: Option<String>,
    pub publisher: Option<String>,
    pub language: Option<String>,
    pub format: Option<String>,
    pub resource_type: Option<String>,
    pub media_type: Option<MediaType>,
}

impl ResourcePatch {
    pub const EDITABLE: [&'static str; 9] = [
        "title",
        "description",
        "subjects",
        "creator",
        "publisher",
        "language",
        "format",
        "resource_type",
        "media_type",
    ];

    /// Builds a patch from a partial field map, rejecting fields outside the
    /// editable set.
    pub fn from_map(map: &serde_json::Map<String, serde_json::Value>) -> Result<Self, DomainError> {
        let mut patch = ResourcePatch::default();
        for (key, value) in map {
            let text = || {
                value
                    .as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| DomainError::InvalidArgument(format!("{key} must be a string")))
            };
            match key.as_str() {
                "title" => patch.title = Some(text()?),
                "description" => patch.description = Some(text()?),
                "creator" => patch.creator = Some(text()?),
                "publisher" => patch.publisher = Some(text()?),
                "language" => patch.language = Some(text()?),
                "format" => patch.format = Some(text()?),
                "resource_type" => patch.resource_type = Some(text()?),
                "media_type" => {
                    let raw = text()?;
                    patch.media_type = Some(MediaType::parse(&raw).ok_or_else(|| {
                        DomainError::InvalidArgument(format!("unknown media type {raw:?}"))
                    })?);
                }
                "subjects" => {
                    let list = value
                        .as_array()
                        .and_then(|items| {
                            items
                                .iter()
                                .map(|v| v.as_str().map(str::to_owned))
                                .collect::<Option<Vec<_>>>()
                        })
                        .ok_or_else(|| {
                            DomainError::InvalidArgument("subjects must be a list of strings".into())
                        })?;
                    patch.subjects = Some(list);
                }
                other => return Err(DomainError::FieldNotEditable(other.to_owned())),
            }
        }
        Ok(patch)
    }

    pub fn changed_fields(&self) -> Vec<&'static str> {
        let set = [
            self.title.is_some(),
            self.description.is_some(),
            self.subjects.is_some(),
            self.creator.is_some(),
            self.publisher.is_some(),
            self.language.is_some(),
            self.format.is_some(),
            self.resource_type.is_some(),
            self.media_type.is_some(),
        ];
        Self::EDITABLE
            .iter()
            .zip(set)
            .filter_map(|(name, on)| on.then_some(*name))
            .collect()
    }

    fn apply(&self, res: &mut Resource) {
        if let Some(v) = &self.title {
            res.title = v.clone();
        }
        if let Some(v) = &self.description {
            res.description = v.clone();
        }
        if let Some(v) = &self.subjects {
            res.subjects = v.clone();
        }
        if let Some(v) = &self.creator {
            res.creator = v.clone();
        }
        if let Some(v) = &self.publisher {
            res.publisher = v.clone();
        }
        if let Some(v) = &self.language {
            res.language = v.clone();
        }
        if let Some(v) = &self.format {
            res.format = v.clone();
        }
        if let Some(v) = &self.resource_type {
            res.resource_type = v.clone();
        }
        if let Some(v) = self.media_type {
            res.media_type = v;
        }
    }
}

/// A resource together with everything attached to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceView {
    pub resource: Resource,
    pub tags: Vec<TagAssignment>,
    pub comments: Vec<Annotation>,
    pub captures: Vec<CaptureRecord>,
}

/// Collection metadata written through the ingestion path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestedCollection {
    pub external_id: String,
    pub title: String,
    pub institution: String,
    pub description: String,
    pub subjects: Vec<String>,
    pub collectors: Vec<String>,
    pub portal_link: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestedSeed {
    pub resource: NewResource,
    pub captures: Vec<NewCapture>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SyncDelta {
    pub group_id: Option<GroupId>,
    pub created: bool,
    pub metadata_updated: bool,
    pub resources_added: usize,
    pub resources_updated: usize,
    pub captures_added: usize,
    /// `(url, reason)` for seeds or captures that could not be stored.
    pub rejected: Vec<(String, String)>,
}

impl SyncDelta {
    pub fn is_noop(&self) -> bool {
        !self.created
            && !self.metadata_updated
            && self.resources_added == 0
            && self.resources_updated == 0
            && self.captures_added == 0
    }
}

fn details<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

fn join_ids<T: std::fmt::Display>(ids: impl IntoIterator<Item = T>) -> String {
    ids.into_iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

// Lookups and checks shared by the operations.

fn group_of(state: &State, id: GroupId) -> Result<&Group, DomainError> {
    state.groups.get(&id).ok_or(DomainError::UnknownGroup(id))
}

fn resource_of(state: &State, id: ResourceId) -> Result<&Resource, DomainError> {
    state.resources.get(&id).ok_or(DomainError::UnknownResource(id))
}

fn require_user(state: &State, id: UserId) -> Result<&UserAccount, DomainError> {
    state
        .users
        .get(&id)
        .map(|r| &r.account)
        .ok_or(DomainError::UnknownUser(id))
}

fn is_admin(state: &State, user: UserId) -> bool {
    user == UserId::SYSTEM
        || state
            .users
            .get(&user)
            .is_some_and(|r| r.account.role == Role::Admin)
}

fn is_member(state: &State, user: UserId, group: &Group) -> bool {
    state.memberships.contains_key(&(group.root(), user))
}

fn check_writable(group: &Group) -> Result<(), DomainError> {
    if group.read_only {
        Err(DomainError::ReadOnlyGroup(group.id))
    } else {
        Ok(())
    }
}

fn check_member(state: &State, actor: UserId, group: &Group) -> Result<(), DomainError> {
    if is_admin(state, actor) || is_member(state, actor, group) {
        Ok(())
    } else {
        Err(DomainError::NotAMember {
            user: actor,
            group: group.root(),
        })
    }
}

fn can_read(state: &State, actor: UserId, group: &Group) -> bool {
    let root = state.groups.get(&group.root()).unwrap_or(group);
    root.public || is_admin(state, actor) || is_member(state, actor, group)
}

fn check_readable(state: &State, actor: UserId, group: &Group) -> Result<(), DomainError> {
    if can_read(state, actor, group) {
        Ok(())
    } else {
        Err(DomainError::NotAMember {
            user: actor,
            group: group.root(),
        })
    }
}

/// Resolves a group-or-subgroup id to `(root, subgroup)`.
fn placement(group: &Group) -> (GroupId, Option<GroupId>) {
    match group.parent_group {
        Some(parent) => (parent, Some(group.id)),
        None => (group.id, None),
    }
}

fn scope(root: GroupId, sub: Option<GroupId>) -> Vec<GroupId> {
    std::iter::once(root).chain(sub).collect()
}

fn resources_in(state: &State, group: &Group) -> Vec<Resource> {
    let (root, sub) = placement(group);
    state
        .resources_of(root)
        .filter(|r| sub.is_none() || r.subgroup_id == sub)
        .cloned()
        .collect()
}

fn check_captures(now: Timestamp, captures: &[NewCapture]) -> Result<(), DomainError> {
    match captures.iter().find(|c| c.capture_datetime > now) {
        Some(c) => Err(DomainError::CaptureInFuture(format_iso(&c.capture_datetime))),
        None => Ok(()),
    }
}

/// Emits ops that duplicate `src` (with captures, tags and comments) into a
/// new resource at the given placement. Authorship of comments and tags is
/// kept.
fn duplicate_resource(
    tx: &mut Tx<'_>,
    src: &Resource,
    root: GroupId,
    sub: Option<GroupId>,
    actor: UserId,
) -> Resource {
    let state = tx.state;
    let id = ResourceId(tx.alloc());
    let copy = Resource {
        id,
        group_id: root,
        subgroup_id: sub,
        added_by: actor,
        added_at: tx.now,
        ..src.clone()
    };
    tx.push(Op::PutResource(copy.clone()));
    for capture in state.captures_of(src.id) {
        tx.push(Op::AddCapture(CaptureRecord {
            resource_id: id,
            ..capture.clone()
        }));
    }
    for tag in state.tags_of(src.id) {
        tx.push(Op::PutTag(TagAssignment {
            resource_id: id,
            ..tag.clone()
        }));
    }
    for ann in state.annotations_of(src.id) {
        let ann_id = AnnotationId(tx.alloc());
        tx.push(Op::PutAnnotation(Annotation {
            id: ann_id,
            resource_id: id,
            ..ann.clone()
        }));
    }
    tx.upserted(id);
    copy
}

fn new_user_group(tx: &mut Tx<'_>, title: &str, description: &str, actor: UserId) -> Group {
    let id = GroupId(tx.alloc());
    let group = Group {
        id,
        title: title.trim().to_owned(),
        description: description.to_owned(),
        origin: GroupOrigin::UserCreated,
        read_only: false,
        source_ref: None,
        parent_group: None,
        created_by: actor,
        created_at: tx.now,
        collecting_institution: None,
        subjects: Vec::new(),
        collectors: Vec::new(),
        public: false,
    };
    tx.push(Op::PutGroup(group.clone()));
    if actor != UserId::SYSTEM {
        tx.push(Op::PutMembership(Membership {
            user: actor,
            group: id,
            member_role: MemberRole::Owner,
            joined_at: tx.now,
        }));
    }
    group
}

impl Store {
    // ---- users -----------------------------------------------------------

    /// Registers an account. `password_hash` is stored as given.
    pub fn create_user(
        &self,
        username: &str,
        display_name: &str,
        role: Role,
        password_hash: String,
    ) -> Result<UserAccount, DomainError> {
        let username = username.trim();
        if username.is_empty() {
            return Err(DomainError::EmptyValue);
        }
        self.commit(|tx| {
            if tx.state.usernames.contains_key(username) {
                return Err(DomainError::DuplicateUsername(username.to_owned()));
            }
            let account = UserAccount {
                id: UserId(tx.alloc()),
                username: username.to_owned(),
                display_name: display_name.to_owned(),
                role,
            };
            tx.push(Op::PutUser(UserRecord {
                account: account.clone(),
                password_hash,
            }));
            Ok(account)
        })
    }

    pub fn user(&self, id: UserId) -> Result<UserAccount, DomainError> {
        self.read(|s| require_user(s, id).cloned())
    }

    pub fn users(&self) -> Vec<UserAccount> {
        self.read(|s| s.users.values().map(|r| r.account.clone()).collect())
    }

    pub(crate) fn credentials(&self, username: &str) -> Option<(UserAccount, String)> {
        self.read(|s| {
            let id = s.usernames.get(username)?;
            let rec = s.users.get(id)?;
            Some((rec.account.clone(), rec.password_hash.clone()))
        })
    }

    // ---- groups ----------------------------------------------------------

    pub fn create_group(
        &self,
        title: &str,
        description: &str,
        creator: UserId,
    ) -> Result<Group, DomainError> {
        self.create_group_with(
            NewGroup {
                title: title.into(),
                description: description.into(),
                public: false,
            },
            creator,
        )
    }

    pub fn create_group_with(&self, spec: NewGroup, creator: UserId) -> Result<Group, DomainError> {
        if spec.title.trim().is_empty() {
            return Err(DomainError::EmptyTitle);
        }
        self.commit(|tx| {
            require_user(tx.state, creator)?;
            let mut group = new_user_group(tx, &spec.title, &spec.description, creator);
            if spec.public {
                group.public = true;
                tx.push(Op::PutGroup(group.clone()));
            }
            tx.log(
                creator,
                ActionType::GroupCreated,
                Subject::Group(group.id),
                vec![group.id],
                details([("title", group.title.clone())]),
            );
            Ok(group)
        })
    }

    pub fn edit_group(
        &self,
        id: GroupId,
        patch: GroupPatch,
        actor: UserId,
    ) -> Result<Group, DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let group = group_of(state, id)?;
            check_writable(group)?;
            check_member(state, actor, group)?;
            let mut fields = Vec::new();
            let mut updated = group.clone();
            if let Some(title) = &patch.title {
                if title.trim().is_empty() {
                    return Err(DomainError::EmptyTitle);
                }
                updated.title = title.trim().to_owned();
                fields.push("title");
            }
            if let Some(description) = &patch.description {
                updated.description = description.clone();
                fields.push("description");
            }
            if let Some(public) = patch.public {
                if group.is_subgroup() {
                    return Err(DomainError::FieldNotEditable("public".into()));
                }
                updated.public = public;
                fields.push("public");
            }
            if fields.is_empty() {
                return Err(DomainError::InvalidArgument("no fields to change".into()));
            }
            tx.push(Op::PutGroup(updated.clone()));
            for r in state.resources_of(group.root()) {
                if group.is_subgroup() && r.subgroup_id != Some(id) {
                    continue;
                }
                tx.upserted(r.id);
            }
            tx.log(
                actor,
                ActionType::GroupEdited,
                Subject::Group(id),
                scope(group.root(), group.parent_group.map(|_| id)),
                details([("fields", fields.join(","))]),
            );
            Ok(updated)
        })
    }

    pub fn set_membership(
        &self,
        user: UserId,
        group: GroupId,
        action: MembershipAction,
    ) -> Result<MembershipChange, DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let g = group_of(state, group)?;
            check_writable(g)?;
            if g.is_subgroup() {
                return Err(DomainError::InvalidArgument(
                    "memberships belong to top-level groups".into(),
                ));
            }
            require_user(state, user)?;
            let existing = state.memberships.get(&(group, user));
            match action {
                MembershipAction::Join => {
                    if existing.is_some() {
                        return Err(DomainError::AlreadyMember { user, group });
                    }
                    let m = Membership {
                        user,
                        group,
                        member_role: MemberRole::Member,
                        joined_at: tx.now,
                    };
                    tx.push(Op::PutMembership(m.clone()));
                    tx.log(
                        user,
                        ActionType::GroupJoined,
                        Subject::Group(group),
                        vec![group],
                        BTreeMap::new(),
                    );
                    Ok(MembershipChange::Joined(m))
                }
                MembershipAction::Leave => {
                    let m = existing.ok_or(DomainError::NotAMember { user, group })?;
                    if m.member_role == MemberRole::Owner {
                        let owners = state
                            .memberships
                            .range((group, UserId(0))..=(group, UserId(u64::MAX)))
                            .filter(|(_, m)| m.member_role == MemberRole::Owner)
                            .count();
                        if owners <= 1 {
                            return Err(DomainError::SoleOwnerCannotLeave(group));
                        }
                    }
                    tx.push(Op::DeleteMembership(user, group));
                    tx.log(
                        user,
                        ActionType::GroupLeft,
                        Subject::Group(group),
                        vec![group],
                        BTreeMap::new(),
                    );
                    Ok(MembershipChange::Left { user, group })
                }
            }
        })
    }

    pub fn create_subgroup(
        &self,
        parent: GroupId,
        title: &str,
        actor: UserId,
    ) -> Result<Group, DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let p = group_of(state, parent)?;
            check_writable(p)?;
            if p.is_subgroup() {
                return Err(DomainError::NestingTooDeep);
            }
            check_member(state, actor, p)?;
            if title.trim().is_empty() {
                return Err(DomainError::EmptyTitle);
            }
            let sub = Group {
                id: GroupId(tx.alloc()),
                title: title.trim().to_owned(),
                description: String::new(),
                origin: GroupOrigin::UserCreated,
                read_only: p.read_only,
                source_ref: None,
                parent_group: Some(parent),
                created_by: actor,
                created_at: tx.now,
                collecting_institution: None,
                subjects: Vec::new(),
                collectors: Vec::new(),
                public: p.public,
            };
            tx.push(Op::PutGroup(sub.clone()));
            tx.log(
                actor,
                ActionType::SubgroupCreated,
                Subject::Group(sub.id),
                vec![parent, sub.id],
                details([("title", sub.title.clone())]),
            );
            Ok(sub)
        })
    }

    /// Deletes a subgroup; its resources move up to the parent group.
    pub fn delete_subgroup(&self, subgroup: GroupId, actor: UserId) -> Result<(), DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let sub = group_of(state, subgroup)?;
            check_writable(sub)?;
            let Some(parent) = sub.parent_group else {
                return Err(DomainError::InvalidArgument(format!(
                    "group {subgroup} is not a subgroup"
                )));
            };
            check_member(state, actor, sub)?;
            let moved: Vec<Resource> = state
                .resources_of(parent)
                .filter(|r| r.subgroup_id == Some(subgroup))
                .cloned()
                .collect();
            for mut r in moved {
                r.subgroup_id = None;
                tx.upserted(r.id);
                tx.push(Op::PutResource(r));
            }
            tx.push(Op::DeleteGroup(subgroup));
            tx.log(
                actor,
                ActionType::SubgroupDeleted,
                Subject::Group(subgroup),
                vec![parent, subgroup],
                details([("title", sub.title.clone())]),
            );
            Ok(())
        })
    }

    pub fn merge_groups(
        &self,
        sources: &[GroupId],
        new_title: &str,
        actor: UserId,
    ) -> Result<Group, DomainError> {
        let mut distinct = Vec::new();
        for id in sources {
            if !distinct.contains(id) {
                distinct.push(*id);
            }
        }
        if distinct.len() < 2 {
            return Err(DomainError::FewerThanTwoSources);
        }
        if new_title.trim().is_empty() {
            return Err(DomainError::EmptyTitle);
        }
        self.commit(|tx| {
            let state = tx.state;
            require_user(state, actor).or_else(|e| {
                if actor == UserId::SYSTEM {
                    Ok(&SYSTEM_ACCOUNT)
                } else {
                    Err(e)
                }
            })?;
            let mut source_groups = Vec::with_capacity(distinct.len());
            for id in &distinct {
                let g = group_of(state, *id)?;
                check_readable(state, actor, g)?;
                source_groups.push(g);
            }

            struct Merged {
                base: Resource,
                captures: BTreeSet<(Timestamp, String, Provenance)>,
                tags: BTreeMap<String, TagAssignment>,
                comments: Vec<Annotation>,
            }
            let mut order: Vec<String> = Vec::new();
            let mut merged: HashMap<String, Merged> = HashMap::new();
            for g in &source_groups {
                for r in resources_in(state, g) {
                    let entry = merged.entry(r.url.clone()).or_insert_with(|| {
                        order.push(r.url.clone());
                        Merged {
                            base: r.clone(),
                            captures: BTreeSet::new(),
                            tags: BTreeMap::new(),
                            comments: Vec::new(),
                        }
                    });
                    for c in state.captures_of(r.id) {
                        entry
                            .captures
                            .insert((c.capture_datetime, c.capture_uri.clone(), c.provenance));
                    }
                    for t in state.tags_of(r.id) {
                        entry.tags.entry(t.tag.clone()).or_insert_with(|| t.clone());
                    }
                    entry
                        .comments
                        .extend(state.annotations_of(r.id).iter().cloned());
                }
            }

            let group = new_user_group(tx, new_title, "", actor);
            for url in &order {
                let m = &merged[url];
                let id = ResourceId(tx.alloc());
                tx.push(Op::PutResource(Resource {
                    id,
                    group_id: group.id,
                    subgroup_id: None,
                    added_by: actor,
                    added_at: tx.now,
                    ..m.base.clone()
                }));
                for (when, uri, provenance) in &m.captures {
                    tx.push(Op::AddCapture(CaptureRecord {
                        resource_id: id,
                        capture_datetime: *when,
                        capture_uri: uri.clone(),
                        provenance: *provenance,
                    }));
                }
                for t in m.tags.values() {
                    tx.push(Op::PutTag(TagAssignment {
                        resource_id: id,
                        ..t.clone()
                    }));
                }
                for a in &m.comments {
                    let ann_id = AnnotationId(tx.alloc());
                    tx.push(Op::PutAnnotation(Annotation {
                        id: ann_id,
                        resource_id: id,
                        ..a.clone()
                    }));
                }
                tx.upserted(id);
            }
            tx.log(
                actor,
                ActionType::GroupMerged,
                Subject::Group(group.id),
                vec![group.id],
                details([
                    ("sources", join_ids(&distinct)),
                    ("resource_count", order.len().to_string()),
                ]),
            );
            Ok(group)
        })
    }

    /// Copies a group into a new editable group owned by `actor`, including
    /// subgroups, captures, tags and comments.
    pub fn copy_group(&self, source: GroupId, actor: UserId) -> Result<Group, DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let src = group_of(state, source)?;
            check_readable(state, actor, src)?;
            if actor != UserId::SYSTEM {
                require_user(state, actor)?;
            }
            let mut group = new_user_group(tx, &src.title, &src.description, actor);
            group.collecting_institution = src.collecting_institution.clone();
            group.subjects = src.subjects.clone();
            group.collectors = src.collectors.clone();
            tx.push(Op::PutGroup(group.clone()));

            let mut sub_map = HashMap::new();
            if !src.is_subgroup() {
                for child in state.children.get(&source).into_iter().flatten() {
                    let child = &state.groups[child];
                    let sub = Group {
                        id: GroupId(tx.alloc()),
                        parent_group: Some(group.id),
                        read_only: false,
                        origin: GroupOrigin::UserCreated,
                        created_by: actor,
                        created_at: tx.now,
                        public: group.public,
                        ..child.clone()
                    };
                    sub_map.insert(child.id, sub.id);
                    tx.push(Op::PutGroup(sub));
                }
            }
            let resources = resources_in(state, src);
            for r in &resources {
                let sub = if src.is_subgroup() {
                    None
                } else {
                    r.subgroup_id.and_then(|s| sub_map.get(&s).copied())
                };
                duplicate_resource(tx, r, group.id, sub, actor);
            }
            tx.log(
                actor,
                ActionType::GroupCopied,
                Subject::Group(group.id),
                vec![group.id],
                details([
                    ("source", source.to_string()),
                    ("resource_count", resources.len().to_string()),
                ]),
            );
            Ok(group)
        })
    }

    pub fn group(&self, id: GroupId) -> Result<Group, DomainError> {
        self.read(|s| group_of(s, id).cloned())
    }

    pub fn groups(&self) -> Vec<Group> {
        self.read(|s| s.groups.values().cloned().collect())
    }

    pub fn subgroups(&self, id: GroupId) -> Vec<Group> {
        self.read(|s| {
            s.children
                .get(&id)
                .into_iter()
                .flatten()
                .filter_map(|c| s.groups.get(c).cloned())
                .collect()
        })
    }

    pub fn group_by_external_id(&self, external_id: &str) -> Option<Group> {
        self.read(|s| {
            s.groups
                .values()
                .find(|g| {
                    g.origin == GroupOrigin::Ingested
                        && g.source_ref
                            .as_ref()
                            .is_some_and(|r| r.external_id == external_id)
                })
                .cloned()
        })
    }

    /// Case-insensitive substring filter over title and description, ordered
    /// by title. An empty filter returns every group.
    pub fn find_groups(&self, text: &str) -> Vec<Group> {
        let needle = text.trim().to_lowercase();
        let mut found: Vec<Group> = self.read(|s| {
            s.groups
                .values()
                .filter(|g| {
                    needle.is_empty()
                        || g.title.to_lowercase().contains(&needle)
                        || g.description.to_lowercase().contains(&needle)
                })
                .cloned()
                .collect()
        });
        found.sort_by(|a, b| a.title.cmp(&b.title).then(a.id.cmp(&b.id)));
        found
    }

    pub fn memberships(&self, group: GroupId) -> Vec<Membership> {
        self.read(|s| {
            s.memberships
                .range((group, UserId(0))..=(group, UserId(u64::MAX)))
                .map(|(_, m)| m.clone())
                .collect()
        })
    }

    pub fn membership(&self, user: UserId, group: GroupId) -> Option<Membership> {
        self.read(|s| {
            let root = s.groups.get(&group).map(Group::root).unwrap_or(group);
            s.memberships.get(&(root, user)).cloned()
        })
    }

    /// Top-level groups `user` belongs to.
    pub fn member_groups(&self, user: UserId) -> BTreeSet<GroupId> {
        self.read(|s| {
            s.memberships
                .keys()
                .filter(|(_, u)| *u == user)
                .map(|(g, _)| *g)
                .collect()
        })
    }

    pub fn can_read_group(&self, actor: Option<UserId>, group: GroupId) -> Result<bool, DomainError> {
        self.read(|s| {
            let g = group_of(s, group)?;
            Ok(match actor {
                Some(user) => can_read(s, user, g),
                None => s.groups.get(&g.root()).unwrap_or(g).public,
            })
        })
    }

    /// The checks every mutation of `group` performs, without mutating.
    pub fn check_can_mutate(&self, actor: UserId, group: GroupId) -> Result<(), DomainError> {
        self.read(|s| {
            let g = group_of(s, group)?;
            check_writable(g)?;
            check_member(s, actor, g)
        })
    }

    // ---- resources -------------------------------------------------------

    /// Adds a resource to a group or subgroup. `data.subgroup_id`, when set,
    /// must be a subgroup of `group`.
    pub fn add_resource(
        &self,
        group: GroupId,
        data: NewResource,
        captures: Vec<NewCapture>,
        actor: UserId,
    ) -> Result<Resource, DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let target = group_of(state, group)?;
            check_writable(target)?;
            check_member(state, actor, target)?;
            let (root, mut sub) = placement(target);
            if let Some(requested) = data.subgroup_id {
                let ok = state
                    .groups
                    .get(&requested)
                    .is_some_and(|g| g.parent_group == Some(root))
                    && sub.is_none_or(|s| s == requested);
                if !ok {
                    return Err(DomainError::InvalidSubgroup {
                        group: root,
                        subgroup: requested,
                    });
                }
                sub = Some(requested);
            }
            let url = normalize_url(&data.original_url)?;
            if state.by_url.contains_key(&(root, url.clone())) {
                return Err(DomainError::DuplicateUrlInGroup { group: root, url });
            }
            check_captures(tx.now, &captures)?;
            let res = Resource {
                id: ResourceId(tx.alloc()),
                group_id: root,
                subgroup_id: sub,
                url,
                original_url: data.original_url.clone(),
                title: data.title,
                description: data.description,
                subjects: data.subjects,
                collector: data.collector,
                creator: data.creator,
                publisher: data.publisher,
                language: data.language,
                format: data.format,
                resource_type: data.resource_type,
                media_type: data.media_type,
                source: data.source,
                added_by: actor,
                added_at: tx.now,
                thumbnail_ref: None,
                availability: data.availability,
            };
            tx.push(Op::PutResource(res.clone()));
            for c in captures {
                tx.push(Op::AddCapture(CaptureRecord {
                    resource_id: res.id,
                    capture_datetime: c.capture_datetime,
                    capture_uri: c.capture_uri,
                    provenance: c.provenance,
                }));
            }
            tx.upserted(res.id);
            tx.log(
                actor,
                ActionType::ResourceAdded,
                Subject::Resource(res.id),
                scope(root, sub),
                details([("url", res.url.clone())]),
            );
            Ok(res)
        })
    }

    pub fn edit_resource_metadata(
        &self,
        resource: ResourceId,
        patch: &ResourcePatch,
        actor: UserId,
    ) -> Result<Resource, DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let res = resource_of(state, resource)?;
            let group = group_of(state, res.group_id)?;
            check_writable(group)?;
            check_member(state, actor, group)?;
            let fields = patch.changed_fields();
            if fields.is_empty() {
                return Err(DomainError::InvalidArgument("no fields to change".into()));
            }
            let mut updated = res.clone();
            patch.apply(&mut updated);
            tx.push(Op::PutResource(updated.clone()));
            tx.upserted(resource);
            tx.log(
                actor,
                ActionType::ResourceEdited,
                Subject::Resource(resource),
                scope(res.group_id, res.subgroup_id),
                details([("fields", fields.join(","))]),
            );
            Ok(updated)
        })
    }

    /// Hard delete. Captures, comments and tags go with the resource.
    pub fn remove_resource(&self, resource: ResourceId, actor: UserId) -> Result<(), DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let res = resource_of(state, resource)?;
            let group = group_of(state, res.group_id)?;
            check_writable(group)?;
            check_member(state, actor, group)?;
            tx.push(Op::DeleteResource(resource));
            tx.removed(resource);
            tx.log(
                actor,
                ActionType::ResourceDeleted,
                Subject::Resource(resource),
                scope(res.group_id, res.subgroup_id),
                details([("url", res.url.clone())]),
            );
            Ok(())
        })
    }

    /// Copies or moves a resource into `target` (a group or subgroup).
    pub fn transfer_resource(
        &self,
        resource: ResourceId,
        target: GroupId,
        mode: TransferMode,
        actor: UserId,
    ) -> Result<Resource, DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let res = resource_of(state, resource)?;
            let dest = group_of(state, target)?;
            check_writable(dest)?;
            let source_group = group_of(state, res.group_id)?;
            if mode == TransferMode::Move {
                check_writable(source_group)?;
            }
            check_member(state, actor, dest)?;
            if mode == TransferMode::Move {
                check_member(state, actor, source_group)?;
            }
            let (root, sub) = placement(dest);
            let same_group = root == res.group_id;
            let collides = match mode {
                TransferMode::Move if same_group => sub == res.subgroup_id,
                _ => state.by_url.contains_key(&(root, res.url.clone())),
            };
            if collides {
                return Err(DomainError::DuplicateUrlInGroup {
                    group: root,
                    url: res.url.clone(),
                });
            }
            match mode {
                TransferMode::Copy => {
                    let copy = duplicate_resource(tx, res, root, sub, actor);
                    tx.log(
                        actor,
                        ActionType::ResourceCopied,
                        Subject::Resource(copy.id),
                        scope(root, sub),
                        details([
                            ("source_resource", resource.to_string()),
                            ("source_group", res.group_id.to_string()),
                        ]),
                    );
                    Ok(copy)
                }
                TransferMode::Move => {
                    let moved = Resource {
                        group_id: root,
                        subgroup_id: sub,
                        ..res.clone()
                    };
                    tx.push(Op::PutResource(moved.clone()));
                    tx.upserted(resource);
                    let mut groups = scope(res.group_id, res.subgroup_id);
                    for g in scope(root, sub) {
                        if !groups.contains(&g) {
                            groups.push(g);
                        }
                    }
                    tx.log(
                        actor,
                        ActionType::ResourceMoved,
                        Subject::Resource(resource),
                        groups,
                        details([
                            ("from_group", res.group_id.to_string()),
                            ("to_group", target.to_string()),
                        ]),
                    );
                    Ok(moved)
                }
            }
        })
    }

    pub fn annotate_resource(
        &self,
        resource: ResourceId,
        annotation: Annotate,
        actor: UserId,
    ) -> Result<AnnotateOutcome, DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let res = resource_of(state, resource)?;
            let group = group_of(state, res.group_id)?;
            check_writable(group)?;
            check_member(state, actor, group)?;
            let groups = scope(res.group_id, res.subgroup_id);
            let outcome = match annotation {
                Annotate::Comment(text) => {
                    if text.trim().is_empty() {
                        return Err(DomainError::EmptyValue);
                    }
                    let len = text.chars().count();
                    if len > MAX_COMMENT_CHARS {
                        return Err(DomainError::TextTooLong {
                            len,
                            max: MAX_COMMENT_CHARS,
                        });
                    }
                    let ann = Annotation {
                        id: AnnotationId(tx.alloc()),
                        resource_id: resource,
                        author: actor,
                        text,
                        created_at: tx.now,
                    };
                    tx.push(Op::PutAnnotation(ann.clone()));
                    tx.log(
                        actor,
                        ActionType::CommentAdded,
                        Subject::Resource(resource),
                        groups,
                        details([("annotation", ann.id.to_string())]),
                    );
                    AnnotateOutcome::Comment(ann)
                }
                Annotate::AddTag(raw) => {
                    let tag = normalize_tag(&raw);
                    if tag.is_empty() {
                        return Err(DomainError::EmptyValue);
                    }
                    if state.tags.get(&resource).is_some_and(|m| m.contains_key(&tag)) {
                        return Err(DomainError::DuplicateTag(tag));
                    }
                    let assignment = TagAssignment {
                        resource_id: resource,
                        tag: tag.clone(),
                        author: actor,
                        created_at: tx.now,
                    };
                    tx.push(Op::PutTag(assignment.clone()));
                    tx.log(
                        actor,
                        ActionType::TagAdded,
                        Subject::Resource(resource),
                        groups,
                        details([("tag", tag)]),
                    );
                    AnnotateOutcome::Tag(assignment)
                }
                Annotate::RemoveTag(raw) => {
                    let tag = normalize_tag(&raw);
                    if tag.is_empty() {
                        return Err(DomainError::EmptyValue);
                    }
                    if !state.tags.get(&resource).is_some_and(|m| m.contains_key(&tag)) {
                        return Err(DomainError::UnknownTag(tag));
                    }
                    tx.push(Op::DeleteTag(resource, tag.clone()));
                    tx.log(
                        actor,
                        ActionType::TagRemoved,
                        Subject::Resource(resource),
                        groups,
                        details([("tag", tag.clone())]),
                    );
                    AnnotateOutcome::TagRemoved { resource, tag }
                }
            };
            tx.upserted(resource);
            Ok(outcome)
        })
    }

    /// Records an on-demand archive request against a resource and attaches
    /// the resulting capture, if any. Captures are deduplicated on
    /// `(datetime, uri)`.
    pub fn record_archive_now(
        &self,
        resource: ResourceId,
        actor: UserId,
        capture: Option<NewCapture>,
        info: BTreeMap<String, String>,
    ) -> Result<(), DomainError> {
        self.commit(|tx| {
            let state = tx.state;
            let res = resource_of(state, resource)?;
            let group = group_of(state, res.group_id)?;
            check_writable(group)?;
            check_member(state, actor, group)?;
            if let Some(c) = capture {
                check_captures(tx.now, std::slice::from_ref(&c))?;
                tx.push(Op::AddCapture(CaptureRecord {
                    resource_id: resource,
                    capture_datetime: c.capture_datetime,
                    capture_uri: c.capture_uri,
                    provenance: c.provenance,
                }));
                tx.upserted(resource);
            }
            tx.log(
                actor,
                ActionType::ArchiveNowRequested,
                Subject::Resource(resource),
                scope(res.group_id, res.subgroup_id),
                info,
            );
            Ok(())
        })
    }

    /// Stores the outcome of thumbnail resolution. Part of adding a resource,
    /// so it is not logged separately.
    pub fn set_thumbnail(
        &self,
        resource: ResourceId,
        thumbnail_ref: Option<String>,
        availability: Availability,
    ) -> Result<Resource, DomainError> {
        self.commit(|tx| {
            let res = resource_of(tx.state, resource)?;
            if res.thumbnail_ref == thumbnail_ref && res.availability == availability {
                return Ok(res.clone());
            }
            let updated = Resource {
                thumbnail_ref,
                availability,
                ..res.clone()
            };
            tx.push(Op::PutResource(updated.clone()));
            Ok(updated)
        })
    }

    pub fn resource(&self, id: ResourceId) -> Result<Resource, DomainError> {
        self.read(|s| resource_of(s, id).cloned())
    }

    /// Resources of a group; for a top-level group this includes resources
    /// filed in its subgroups.
    pub fn resources_in_group(&self, id: GroupId) -> Result<Vec<Resource>, DomainError> {
        self.read(|s| Ok(resources_in(s, group_of(s, id)?)))
    }

    pub fn resource_count(&self) -> usize {
        self.read(|s| s.resources.len())
    }

    pub fn resource_ids(&self) -> Vec<ResourceId> {
        self.read(|s| s.resources.keys().copied().collect())
    }

    pub fn captures(&self, id: ResourceId) -> Result<Vec<CaptureRecord>, DomainError> {
        self.read(|s| {
            resource_of(s, id)?;
            Ok(s.captures_of(id).to_vec())
        })
    }

    pub fn comments(&self, id: ResourceId) -> Result<Vec<Annotation>, DomainError> {
        self.read(|s| {
            resource_of(s, id)?;
            Ok(s.annotations_of(id).to_vec())
        })
    }

    pub fn tags(&self, id: ResourceId) -> Result<Vec<TagAssignment>, DomainError> {
        self.read(|s| {
            resource_of(s, id)?;
            Ok(s.tags_of(id).cloned().collect())
        })
    }

    pub fn resource_view(&self, id: ResourceId) -> Result<ResourceView, DomainError> {
        self.read(|s| {
            let resource = resource_of(s, id)?.clone();
            Ok(ResourceView {
                resource,
                tags: s.tags_of(id).cloned().collect(),
                comments: s.annotations_of(id).to_vec(),
                captures: s.captures_of(id).to_vec(),
            })
        })
    }

    // ---- activity --------------------------------------------------------

    /// Newest-first activity for a group and its subgroups, strictly after
    /// `since`.
    pub fn group_activity_summary(
        &self,
        group: GroupId,
        since: Option<Timestamp>,
        limit: usize,
    ) -> Result<Vec<ActivityLogEntry>, DomainError> {
        if limit == 0 {
            return Err(DomainError::InvalidArgument("limit must be positive".into()));
        }
        self.read(|s| {
            let g = group_of(s, group)?;
            let mut ids: BTreeSet<GroupId> = BTreeSet::from([group]);
            if !g.is_subgroup() {
                ids.extend(s.children.get(&group).into_iter().flatten().copied());
            }
            Ok(s.activity
                .iter()
                .rev()
                .filter(|e| since.is_none_or(|t| e.timestamp > t))
                .filter(|e| e.groups.iter().any(|id| ids.contains(id)))
                .take(limit)
                .cloned()
                .collect())
        })
    }

    pub fn activity(&self) -> Vec<ActivityLogEntry> {
        self.read(|s| s.activity.clone())
    }

    pub fn activity_count(&self) -> usize {
        self.read(|s| s.activity.len())
    }

    pub fn log_search(
        &self,
        actor: UserId,
        query: &str,
        groups: Vec<GroupId>,
        info: BTreeMap<String, String>,
    ) -> Result<ActivityLogEntry, DomainError> {
        self.commit(|tx| {
            if actor != UserId::SYSTEM {
                require_user(tx.state, actor)?;
            }
            tx.log(
                actor,
                ActionType::SearchExecuted,
                Subject::Query(query.to_owned()),
                groups,
                info,
            );
            Ok(())
        })?;
        Ok(self.read(|s| s.activity.last().cloned().expect("entry just appended")))
    }

    pub fn log_export(
        &self,
        group: GroupId,
        actor: UserId,
        info: BTreeMap<String, String>,
    ) -> Result<(), DomainError> {
        self.commit(|tx| {
            let g = group_of(tx.state, group)?;
            tx.log(
                actor,
                ActionType::ExportPerformed,
                Subject::Group(group),
                scope(g.root(), g.parent_group.map(|_| group)),
                info,
            );
            Ok(())
        })
    }

    // ---- ingestion path --------------------------------------------------

    pub fn cursors(&self) -> Vec<CrawlCursor> {
        self.read(|s| s.cursors.values().cloned().collect())
    }

    pub fn cursor(&self, external_id: &str) -> Option<CrawlCursor> {
        self.read(|s| s.cursors.get(external_id).cloned())
    }

    pub fn meta(&self, key: &str) -> Option<String> {
        self.read(|s| s.meta.get(key).cloned())
    }

    pub fn set_meta(&self, key: &str, value: &str) -> Result<(), DomainError> {
        self.commit(|tx| {
            if tx.state.meta.get(key).map(String::as_str) != Some(value) {
                tx.push(Op::SetMeta(key.to_owned(), value.to_owned()));
            }
            Ok(())
        })
    }

    /// Privileged write path for ingestion and incremental updates. Creates
    /// or refreshes the read-only mirror of an external collection: new seeds
    /// become resources, changed source metadata overwrites stored values, and
    /// unseen captures are appended. Seeds already present are never removed.
    pub fn sync_ingested_collection(
        &self,
        collection: &IngestedCollection,
        seeds: Vec<IngestedSeed>,
    ) -> Result<SyncDelta, DomainError> {
        if collection.title.trim().is_empty() {
            return Err(DomainError::EmptyTitle);
        }
        self.commit(|tx| {
            let state = tx.state;
            let mut delta = SyncDelta::default();
            let existing = state.groups.values().find(|g| {
                g.origin == GroupOrigin::Ingested
                    && g.source_ref
                        .as_ref()
                        .is_some_and(|r| r.external_id == collection.external_id)
            });
            let fresh = Group {
                id: existing.map(|g| g.id).unwrap_or(GroupId(0)),
                title: collection.title.trim().to_owned(),
                description: collection.description.clone(),
                origin: GroupOrigin::Ingested,
                read_only: true,
                source_ref: Some(SourceRef {
                    external_id: collection.external_id.clone(),
                    portal_link: collection.portal_link.clone(),
                }),
                parent_group: None,
                created_by: UserId::SYSTEM,
                created_at: existing.map(|g| g.created_at).unwrap_or(tx.now),
                collecting_institution: Some(collection.institution.clone())
                    .filter(|s| !s.is_empty()),
                subjects: collection.subjects.clone(),
                collectors: collection.collectors.clone(),
                public: true,
            };
            let group = match existing {
                Some(g) if *g == fresh => g.clone(),
                Some(_) => {
                    delta.metadata_updated = true;
                    tx.push(Op::PutGroup(fresh.clone()));
                    for r in state.resources_of(fresh.id) {
                        tx.upserted(r.id);
                    }
                    fresh
                }
                None => {
                    let group = Group {
                        id: GroupId(tx.alloc()),
                        ..fresh
                    };
                    delta.created = true;
                    tx.push(Op::PutGroup(group.clone()));
                    group
                }
            };
            delta.group_id = Some(group.id);

            let mut latest: Option<Timestamp> = state
                .resources_of(group.id)
                .filter_map(|r| state.captures_of(r.id).last())
                .map(|c| c.capture_datetime)
                .max();
            let mut seen_urls = HashMap::new();
            for seed in seeds {
                let url = match normalize_url(&seed.resource.original_url) {
                    Ok(u) => u,
                    Err(e) => {
                        delta
                            .rejected
                            .push((seed.resource.original_url.clone(), e.to_string()));
                        continue;
                    }
                };
                if seen_urls.insert(url.clone(), ()).is_some() {
                    delta
                        .rejected
                        .push((seed.resource.original_url.clone(), "duplicate seed url".into()));
                    continue;
                }
                let (valid, future): (Vec<_>, Vec<_>) = seed
                    .captures
                    .into_iter()
                    .partition(|c| c.capture_datetime <= tx.now);
                for c in future {
                    delta.rejected.push((
                        url.clone(),
                        format!("capture {} lies in the future", format_iso(&c.capture_datetime)),
                    ));
                }
                let data = seed.resource;
                let existing_id = state.by_url.get(&(group.id, url.clone())).copied();
                let (rid, known): (ResourceId, BTreeSet<(Timestamp, String)>) = match existing_id {
                    None => {
                        let id = ResourceId(tx.alloc());
                        tx.push(Op::PutResource(Resource {
                            id,
                            group_id: group.id,
                            subgroup_id: None,
                            url: url.clone(),
                            original_url: data.original_url,
                            title: data.title,
                            description: data.description,
                            subjects: data.subjects,
                            collector: data.collector,
                            creator: data.creator,
                            publisher: data.publisher,
                            language: data.language,
                            format: data.format,
                            resource_type: data.resource_type,
                            media_type: data.media_type,
                            source: ResourceSource::ArchiveCollection,
                            added_by: UserId::SYSTEM,
                            added_at: tx.now,
                            thumbnail_ref: None,
                            availability: data.availability,
                        }));
                        delta.resources_added += 1;
                        tx.upserted(id);
                        (id, BTreeSet::new())
                    }
                    Some(id) => {
                        let current = &state.resources[&id];
                        let refreshed = Resource {
                            original_url: data.original_url,
                            title: data.title,
                            description: data.description,
                            subjects: data.subjects,
                            collector: data.collector,
                            creator: data.creator,
                            publisher: data.publisher,
                            language: data.language,
                            format: data.format,
                            resource_type: data.resource_type,
                            media_type: data.media_type,
                            ..current.clone()
                        };
                        if refreshed != *current {
                            tx.push(Op::PutResource(refreshed));
                            delta.resources_updated += 1;
                            tx.upserted(id);
                        }
                        let known = state
                            .captures_of(id)
                            .iter()
                            .map(|c| (c.capture_datetime, c.capture_uri.clone()))
                            .collect();
                        (id, known)
                    }
                };
                let mut added_here = BTreeSet::new();
                for c in valid {
                    let key = (c.capture_datetime, c.capture_uri.clone());
                    if known.contains(&key) || !added_here.insert(key) {
                        continue;
                    }
                    latest = latest.max(Some(c.capture_datetime));
                    tx.push(Op::AddCapture(CaptureRecord {
                        resource_id: rid,
                        capture_datetime: c.capture_datetime,
                        capture_uri: c.capture_uri,
                        provenance: c.provenance,
                    }));
                    delta.captures_added += 1;
                }
                if !added_here.is_empty() {
                    tx.upserted(rid);
                }
            }

            let cursor = CrawlCursor {
                external_id: collection.external_id.clone(),
                last_crawled_at: tx.now,
                latest_capture_at: latest,
            };
            if state.cursors.get(&collection.external_id) != Some(&cursor) {
                tx.push(Op::PutCursor(cursor));
            }
            if delta.created {
                tx.log(
                    UserId::SYSTEM,
                    ActionType::GroupCreated,
                    Subject::Group(group.id),
                    vec![group.id],
                    details([
                        ("external_id", collection.external_id.clone()),
                        ("resources_added", delta.resources_added.to_string()),
                        ("captures_added", delta.captures_added.to_string()),
                    ]),
                );
            } else if !delta.is_noop() {
                tx.log(
                    UserId::SYSTEM,
                    ActionType::GroupEdited,
                    Subject::Group(group.id),
                    vec![group.id],
                    details([
                        ("external_id", collection.external_id.clone()),
                        ("resources_added", delta.resources_added.to_string()),
                        ("resources_updated", delta.resources_updated.to_string()),
                        ("captures_added", delta.captures_added.to_string()),
                    ]),
                );
            }
            Ok(delta)
        })
    }
}

static SYSTEM_ACCOUNT: UserAccount = UserAccount {
    id: UserId::SYSTEM,
    username: String::new(),
    display_name: String::new(),
    role: Role::Admin,
};
