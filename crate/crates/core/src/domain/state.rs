//! In-memory state of the domain store and the low-level mutations that
//! transactions are made of. Every committed transaction is a list of [`Op`]s;
//! the same list is written to the log and applied here, so replaying the log
//! reproduces the state exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::domain::model::*;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "v", rename_all = "snake_case")]
pub(crate) enum Op {
    PutUser(UserRecord),
    PutGroup(Group),
    DeleteGroup(GroupId),
    PutResource(Resource),
    /// Also drops the resource's captures, annotations and tags.
    DeleteResource(ResourceId),
    AddCapture(CaptureRecord),
    PutAnnotation(Annotation),
    PutTag(TagAssignment),
    DeleteTag(ResourceId, String),
    PutMembership(Membership),
    DeleteMembership(UserId, GroupId),
    AppendActivity(ActivityLogEntry),
    PutCursor(CrawlCursor),
    SetMeta(String, String),
}

#[derive(Debug, Default)]
pub(crate) struct State {
    pub seq: u64,
    pub next_id: u64,
    pub next_activity_id: u64,
    pub users: BTreeMap<UserId, UserRecord>,
    pub groups: BTreeMap<GroupId, Group>,
    pub resources: BTreeMap<ResourceId, Resource>,
    pub captures: BTreeMap<ResourceId, Vec<CaptureRecord>>,
    pub annotations: BTreeMap<ResourceId, Vec<Annotation>>,
    pub tags: BTreeMap<ResourceId, BTreeMap<String, TagAssignment>>,
    pub memberships: BTreeMap<(GroupId, UserId), Membership>,
    pub activity: Vec<ActivityLogEntry>,
    pub cursors: BTreeMap<String, CrawlCursor>,
    pub meta: BTreeMap<String, String>,
    // Derived lookups, rebuilt on load.
    pub usernames: HashMap<String, UserId>,
    pub by_group: HashMap<GroupId, BTreeSet<ResourceId>>,
    pub by_url: HashMap<(GroupId, String), ResourceId>,
    pub children: HashMap<GroupId, BTreeSet<GroupId>>,
}

impl State {
    pub fn new() -> Self {
        Self {
            next_id: 1,
            next_activity_id: 1,
            ..Self::default()
        }
    }

    pub fn apply(&mut self, op: Op) {
        match op {
            Op::PutUser(rec) => {
                self.bump(rec.account.id.0);
                if let Some(prev) = self.users.get(&rec.account.id) {
                    self.usernames.remove(&prev.account.username);
                }
                self.usernames
                    .insert(rec.account.username.clone(), rec.account.id);
                self.users.insert(rec.account.id, rec);
            }
            Op::PutGroup(group) => {
                self.bump(group.id.0);
                if let Some(parent) = group.parent_group {
                    self.children.entry(parent).or_default().insert(group.id);
                }
                self.groups.insert(group.id, group);
            }
            Op::DeleteGroup(id) => {
                if let Some(group) = self.groups.remove(&id) {
                    if let Some(parent) = group.parent_group {
                        if let Some(kids) = self.children.get_mut(&parent) {
                            kids.remove(&id);
                        }
                    }
                }
                self.children.remove(&id);
                self.by_group.remove(&id);
                self.memberships.retain(|(g, _), _| *g != id);
            }
            Op::PutResource(res) => {
                self.bump(res.id.0);
                if let Some(prev) = self.resources.get(&res.id) {
                    let (g, url) = (prev.group_id, prev.url.clone());
                    self.unlink_resource(res.id, g, url);
                }
                self.by_group.entry(res.group_id).or_default().insert(res.id);
                self.by_url.insert((res.group_id, res.url.clone()), res.id);
                self.resources.insert(res.id, res);
            }
            Op::DeleteResource(id) => {
                if let Some(prev) = self.resources.remove(&id) {
                    self.unlink_resource(id, prev.group_id, prev.url);
                }
                self.captures.remove(&id);
                self.annotations.remove(&id);
                self.tags.remove(&id);
            }
            Op::AddCapture(capture) => {
                let list = self.captures.entry(capture.resource_id).or_default();
                if !list.iter().any(|c| c.key() == capture.key()) {
                    let at = list.partition_point(|c| c.key() <= capture.key());
                    list.insert(at, capture);
                }
            }
            Op::PutAnnotation(ann) => {
                self.bump(ann.id.0);
                let list = self.annotations.entry(ann.resource_id).or_default();
                match list.iter_mut().find(|a| a.id == ann.id) {
                    Some(slot) => *slot = ann,
                    None => list.push(ann),
                }
            }
            Op::PutTag(tag) => {
                self.tags
                    .entry(tag.resource_id)
                    .or_default()
                    .insert(tag.tag.clone(), tag);
            }
            Op::DeleteTag(resource, tag) => {
                if let Some(set) = self.tags.get_mut(&resource) {
                    set.remove(&tag);
                    if set.is_empty() {
                        self.tags.remove(&resource);
                    }
                }
            }
            Op::PutMembership(m) => {
                self.memberships.insert((m.group, m.user), m);
            }
            Op::DeleteMembership(user, group) => {
                self.memberships.remove(&(group, user));
            }
            Op::AppendActivity(entry) => {
                self.next_activity_id = self.next_activity_id.max(entry.id.0 + 1);
                self.activity.push(entry);
            }
            Op::PutCursor(cursor) => {
                self.cursors.insert(cursor.external_id.clone(), cursor);
            }
            Op::SetMeta(key, value) => {
                self.meta.insert(key, value);
            }
        }
    }

    fn bump(&mut self, id: u64) {
        self.next_id = self.next_id.max(id + 1);
    }

    fn unlink_resource(&mut self, id: ResourceId, group: GroupId, url: String) {
        if let Some(set) = self.by_group.get_mut(&group) {
            set.remove(&id);
        }
        if self.by_url.get(&(group, url.clone())) == Some(&id) {
            self.by_url.remove(&(group, url));
        }
    }

    pub fn resources_of(&self, group: GroupId) -> impl Iterator<Item = &Resource> + '_ {
        self.by_group
            .get(&group)
            .into_iter()
            .flat_map(|ids| ids.iter())
            .filter_map(|id| self.resources.get(id))
    }

    pub fn captures_of(&self, id: ResourceId) -> &[CaptureRecord] {
        self.captures.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn annotations_of(&self, id: ResourceId) -> &[Annotation] {
        self.annotations.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn tags_of(&self, id: ResourceId) -> impl Iterator<Item = &TagAssignment> + '_ {
        self.tags.get(&id).into_iter().flat_map(|m| m.values())
    }

    pub fn to_snapshot(&self) -> Snapshot {
        Snapshot {
            schema_version: super::store::SCHEMA_VERSION,
            seq: self.seq,
            next_id: self.next_id,
            next_activity_id: self.next_activity_id,
            users: self.users.values().cloned().collect(),
            groups: self.groups.values().cloned().collect(),
            resources: self.resources.values().cloned().collect(),
            captures: self.captures.values().flatten().cloned().collect(),
            annotations: self.annotations.values().flatten().cloned().collect(),
            tags: self
                .tags
                .values()
                .flat_map(|m| m.values())
                .cloned()
                .collect(),
            memberships: self.memberships.values().cloned().collect(),
            activity: self.activity.clone(),
            cursors: self.cursors.values().cloned().collect(),
            meta: self.meta.clone(),
        }
    }

    pub fn from_snapshot(snap: Snapshot) -> Self {
        let mut state = State::new();
        let ops = snap
            .users
            .into_iter()
            .map(Op::PutUser)
            .chain(snap.groups.into_iter().map(Op::PutGroup))
            .chain(snap.resources.into_iter().map(Op::PutResource))
            .chain(snap.captures.into_iter().map(Op::AddCapture))
            .chain(snap.annotations.into_iter().map(Op::PutAnnotation))
            .chain(snap.tags.into_iter().map(Op::PutTag))
            .chain(snap.memberships.into_iter().map(Op::PutMembership))
            .chain(snap.activity.into_iter().map(Op::AppendActivity))
            .chain(snap.cursors.into_iter().map(Op::PutCursor))
            .chain(snap.meta.into_iter().map(|(k, v)| Op::SetMeta(k, v)));
        for op in ops {
            state.apply(op);
        }
        state.seq = snap.seq;
        state.next_id = state.next_id.max(snap.next_id);
        state.next_activity_id = state.next_activity_id.max(snap.next_activity_id);
        state
    }
}

/// Serialized form of the whole store. Field order and collection order are
/// deterministic so two equal states serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct Snapshot {
    pub schema_version: u32,
    pub seq: u64,
    pub next_id: u64,
    pub next_activity_id: u64,
    pub users: Vec<UserRecord>,
    pub groups: Vec<Group>,
    pub resources: Vec<Resource>,
    pub captures: Vec<CaptureRecord>,
    pub annotations: Vec<Annotation>,
    pub tags: Vec<TagAssignment>,
    pub memberships: Vec<Membership>,
    pub activity: Vec<ActivityLogEntry>,
    pub cursors: Vec<CrawlCursor>,
    pub meta: BTreeMap<String, String>,
}
