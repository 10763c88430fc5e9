//! Endpoint table and handlers.

use std::collections::BTreeMap;

use percent_encoding::percent_decode_str;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::auth::{authorize, Action, Grant};
use super::error::ApiError;
use super::session::SessionToken;
use super::{ApiRequest, ApiResponse, App, Method, MAX_BODY_BYTES};
use crate::clock::{parse_iso, Timestamp};
use crate::domain::*;
use crate::ingest::resolve_thumbnail;
use crate::memento::{
    aggregate_captures_by_month, archive_status, capture_span, request_archive_now, ArchiveOutcome,
};
use crate::search::{federated_search, Facet, QuerySpec, SearchError, Visibility};

type Result<T> = std::result::Result<T, ApiError>;

pub(super) fn handle(app: &App, req: &ApiRequest) -> Result<ApiResponse> {
    if req.body.len() > MAX_BODY_BYTES {
        return Err(ApiError::new(413, "PayloadTooLarge", "request body exceeds 20 MiB"));
    }
    let segments: Vec<String> = req
        .path
        .trim_matches('/')
        .split('/')
        .map(|s| percent_decode_str(s).decode_utf8_lossy().into_owned())
        .collect();
    let segs: Vec<&str> = segments.iter().map(String::as_str).collect();
    let ctx = Ctx { app, req };
    use Method::*;
    match (segs.as_slice(), req.method) {
        (["api", "session"], Post) => ctx.open_session(),
        (["api", "groups"], Get) => ctx.list_groups(),
        (["api", "groups"], Post) => ctx.create_group(),
        (["api", "groups", "merge"], Post) => ctx.merge_groups(),
        (["api", "groups", id], Get) => ctx.get_group(group_id(id)?),
        (["api", "groups", id], Patch) => ctx.edit_group(group_id(id)?),
        (["api", "groups", id], Delete) => ctx.delete_subgroup(group_id(id)?),
        (["api", "groups", id, "members"], Post) => ctx.join(group_id(id)?),
        (["api", "groups", id, "members", "me"], Delete) => ctx.leave(group_id(id)?),
        (["api", "groups", id, "resources"], Post) => ctx.add_resource(group_id(id)?),
        (["api", "groups", id, "subgroups"], Post) => ctx.create_subgroup(group_id(id)?),
        (["api", "groups", id, "copy"], Post) => ctx.copy_group(group_id(id)?),
        (["api", "groups", id, "activity"], Get) => ctx.activity(group_id(id)?),
        (["api", "resources", id], Get) => ctx.get_resource(resource_id(id)?),
        (["api", "resources", id], Patch) => ctx.edit_resource(resource_id(id)?),
        (["api", "resources", id], Delete) => ctx.delete_resource(resource_id(id)?),
        (["api", "resources", id, "transfer"], Post) => ctx.transfer(resource_id(id)?),
        (["api", "resources", id, "annotations"], Post) => ctx.comment(resource_id(id)?),
        (["api", "resources", id, "tags", tag], Post) => ctx.tag(resource_id(id)?, tag, true),
        (["api", "resources", id, "tags", tag], Delete) => ctx.tag(resource_id(id)?, tag, false),
        (["api", "resources", id, "timeline"], Get) => ctx.timeline(resource_id(id)?),
        (["api", "resources", id, "captures"], Get) => ctx.captures(resource_id(id)?),
        (["api", "resources", id, "archive-now"], Post) => ctx.archive_now(resource_id(id)?),
        (["api", "search"], Get) => ctx.search(),
        (["api", "url-status"], Get) => ctx.url_status(),
        (path, _) if known_path(path) => Err(ApiError::method_not_allowed()),
        _ => Err(ApiError::route_not_found()),
    }
}

fn known_path(segs: &[&str]) -> bool {
    matches!(
        segs,
        ["api", "session"]
            | ["api", "groups"]
            | ["api", "groups", _]
            | ["api", "groups", _, "members" | "resources" | "subgroups" | "copy" | "activity"]
            | ["api", "groups", _, "members", "me"]
            | ["api", "resources", _]
            | ["api", "resources", _, "transfer" | "annotations" | "timeline" | "captures" | "archive-now"]
            | ["api", "resources", _, "tags", _]
            | ["api", "search"]
            | ["api", "url-status"]
    )
}

fn group_id(raw: &str) -> Result<GroupId> {
    raw.parse().map_err(|_| ApiError::route_not_found())
}

fn resource_id(raw: &str) -> Result<ResourceId> {
    raw.parse().map_err(|_| ApiError::route_not_found())
}

#[derive(Deserialize)]
struct Credentials {
    username: String,
    password: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MergeBody {
    sources: Vec<GroupId>,
    title: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TitleBody {
    title: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransferBody {
    target: GroupId,
    mode: TransferMode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommentBody {
    text: String,
}

#[derive(Deserialize)]
struct CaptureBody {
    capture_datetime: Timestamp,
    capture_uri: String,
}

#[derive(Serialize)]
struct GroupDetail {
    group: Group,
    subgroups: Vec<Group>,
    resources: Vec<Resource>,
    member_count: usize,
}

struct Ctx<'a> {
    app: &'a App,
    req: &'a ApiRequest,
}

impl Ctx<'_> {
    fn store(&self) -> &Store {
        &self.app.store
    }

    fn body<T: DeserializeOwned>(&self) -> Result<T> {
        let bytes: &[u8] = if self.req.body.iter().all(u8::is_ascii_whitespace) {
            b"{}"
        } else {
            &self.req.body
        };
        serde_json::from_slice(bytes).map_err(|e| ApiError::malformed(format!("invalid JSON body: {e}")))
    }

    fn param(&self, key: &str) -> Option<&str> {
        self.req
            .query
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// A presented token must be valid; absence is allowed.
    fn optional_session(&self) -> Result<Option<SessionToken>> {
        match &self.req.token {
            None => Ok(None),
            Some(t) => self.app.session(t).map(Some).ok_or_else(ApiError::unauthenticated),
        }
    }

    fn session(&self) -> Result<SessionToken> {
        self.optional_session()?.ok_or_else(ApiError::unauthenticated)
    }

    fn grant(&self, action: Action) -> Result<Grant> {
        let session = self.session()?;
        authorize(self.store(), &session, action)
    }

    fn check_readable(&self, group: GroupId) -> Result<()> {
        let session = self.optional_session()?;
        if self.store().can_read_group(session.as_ref().map(|s| s.user), group)? {
            Ok(())
        } else {
            Err(match session {
                None => ApiError::unauthenticated(),
                Some(s) => DomainError::NotAMember {
                    user: s.user,
                    group,
                }
                .into(),
            })
        }
    }

    fn readable_resource(&self, id: ResourceId) -> Result<Resource> {
        let res = self.store().resource(id)?;
        self.check_readable(res.group_id)?;
        Ok(res)
    }

    // ---- sessions and groups ------------------------------------------

    fn open_session(&self) -> Result<ApiResponse> {
        let c: Credentials = self.body()?;
        Ok(ApiResponse::created(self.app.open_session(&c.username, &c.password)?))
    }

    fn list_groups(&self) -> Result<ApiResponse> {
        let session = self.optional_session()?;
        let user = session.map(|s| s.user);
        let text = self.param("query").unwrap_or_default();
        let mut visible = Vec::new();
        for g in self.store().find_groups(text) {
            if self.store().can_read_group(user, g.id)? {
                visible.push(g);
            }
        }
        Ok(ApiResponse::ok(visible))
    }

    fn create_group(&self) -> Result<ApiResponse> {
        let spec: NewGroup = self.body()?;
        let grant = self.grant(Action::CreateGroup)?;
        Ok(ApiResponse::created(self.store().create_group_with(spec, grant.actor())?))
    }

    fn get_group(&self, id: GroupId) -> Result<ApiResponse> {
        let group = self.store().group(id)?;
        self.check_readable(id)?;
        Ok(ApiResponse::ok(GroupDetail {
            subgroups: self.store().subgroups(id),
            resources: self.store().resources_in_group(id)?,
            member_count: self.store().memberships(group.root()).len(),
            group,
        }))
    }

    fn edit_group(&self, id: GroupId) -> Result<ApiResponse> {
        let patch: GroupPatch = self.body()?;
        let grant = self.grant(Action::MutateGroup(id))?;
        Ok(ApiResponse::ok(self.store().edit_group(id, patch, grant.actor())?))
    }

    fn delete_subgroup(&self, id: GroupId) -> Result<ApiResponse> {
        let grant = self.grant(Action::MutateGroup(id))?;
        self.store().delete_subgroup(id, grant.actor())?;
        Ok(ApiResponse::no_content())
    }

    fn join(&self, id: GroupId) -> Result<ApiResponse> {
        let grant = self.grant(Action::ChangeMembership(id))?;
        match self
            .store()
            .set_membership(grant.actor(), id, MembershipAction::Join)?
        {
            MembershipChange::Joined(m) => Ok(ApiResponse::created(m)),
            MembershipChange::Left { .. } => Err(ApiError::internal(&"join reported a leave")),
        }
    }

    fn leave(&self, id: GroupId) -> Result<ApiResponse> {
        let grant = self.grant(Action::ChangeMembership(id))?;
        self.store()
            .set_membership(grant.actor(), id, MembershipAction::Leave)?;
        Ok(ApiResponse::no_content())
    }

    fn add_resource(&self, id: GroupId) -> Result<ApiResponse> {
        let mut body: Value = self.body()?;
        let captures: Vec<CaptureBody> = match body.as_object_mut().and_then(|o| o.remove("captures")) {
            None | Some(Value::Null) => Vec::new(),
            Some(v) => serde_json::from_value(v)
                .map_err(|e| ApiError::malformed(format!("invalid captures: {e}")))?,
        };
        let explicit_availability = body.get("availability").is_some();
        let mut data: NewResource = serde_json::from_value(body)
            .map_err(|e| ApiError::malformed(format!("invalid resource: {e}")))?;
        if !explicit_availability && data.source == ResourceSource::LiveWeb {
            data.availability = Availability::Live;
        }
        let grant = self.grant(Action::MutateGroup(id))?;
        let captures = captures
            .into_iter()
            .map(|c| NewCapture {
                capture_datetime: c.capture_datetime,
                capture_uri: c.capture_uri,
                provenance: Provenance::IngestedArchive,
            })
            .collect();
        let res = self.store().add_resource(id, data, captures, grant.actor())?;
        let (thumb, availability) = resolve_thumbnail(
            &res,
            self.app.screenshots.as_ref(),
            self.app.config.thumbnail_timeout,
        );
        let res = self
            .store()
            .set_thumbnail(res.id, thumb.reference().map(str::to_owned), availability)?;
        Ok(ApiResponse::created(json!({ "resource": res, "thumbnail": thumb })))
    }

    fn create_subgroup(&self, id: GroupId) -> Result<ApiResponse> {
        let body: TitleBody = self.body()?;
        let grant = self.grant(Action::MutateGroup(id))?;
        Ok(ApiResponse::created(
            self.store().create_subgroup(id, &body.title, grant.actor())?,
        ))
    }

    fn merge_groups(&self) -> Result<ApiResponse> {
        let body: MergeBody = self.body()?;
        let grant = self.grant(Action::Derive(body.sources.clone()))?;
        Ok(ApiResponse::created(
            self.store()
                .merge_groups(&body.sources, &body.title, grant.actor())?,
        ))
    }

    fn copy_group(&self, id: GroupId) -> Result<ApiResponse> {
        let grant = self.grant(Action::Derive(vec![id]))?;
        Ok(ApiResponse::created(self.store().copy_group(id, grant.actor())?))
    }

    fn activity(&self, id: GroupId) -> Result<ApiResponse> {
        self.store().group(id)?;
        self.check_readable(id)?;
        let since = match self.param("since") {
            None | Some("") => None,
            Some(raw) => Some(parse_iso(raw).ok_or_else(|| {
                ApiError::new(422, "InvalidArgument", "since must be an ISO 8601 UTC timestamp")
            })?),
        };
        let limit = match self.param("limit") {
            None | Some("") => 50,
            Some(raw) => raw
                .parse()
                .map_err(|_| ApiError::new(422, "InvalidArgument", "limit must be a positive integer"))?,
        };
        Ok(ApiResponse::ok(
            self.store().group_activity_summary(id, since, limit)?,
        ))
    }

    // ---- resources ------------------------------------------------------

    fn get_resource(&self, id: ResourceId) -> Result<ApiResponse> {
        self.readable_resource(id)?;
        Ok(ApiResponse::ok(self.store().resource_view(id)?))
    }

    fn edit_resource(&self, id: ResourceId) -> Result<ApiResponse> {
        let map: serde_json::Map<String, Value> = self.body()?;
        let grant = self.grant(Action::MutateResource(id))?;
        let patch = ResourcePatch::from_map(&map)?;
        Ok(ApiResponse::ok(
            self.store().edit_resource_metadata(id, &patch, grant.actor())?,
        ))
    }

    fn delete_resource(&self, id: ResourceId) -> Result<ApiResponse> {
        let grant = self.grant(Action::MutateResource(id))?;
        self.store().remove_resource(id, grant.actor())?;
        Ok(ApiResponse::no_content())
    }

    fn transfer(&self, id: ResourceId) -> Result<ApiResponse> {
        let body: TransferBody = self.body()?;
        let grant = self.grant(Action::Transfer {
            resource: id,
            target: body.target,
            mode: body.mode,
        })?;
        let res = self
            .store()
            .transfer_resource(id, body.target, body.mode, grant.actor())?;
        Ok(match body.mode {
            TransferMode::Copy => ApiResponse::created(res),
            TransferMode::Move => ApiResponse::ok(res),
        })
    }

    fn comment(&self, id: ResourceId) -> Result<ApiResponse> {
        let body: CommentBody = self.body()?;
        let grant = self.grant(Action::MutateResource(id))?;
        match self
            .store()
            .annotate_resource(id, Annotate::Comment(body.text), grant.actor())?
        {
            AnnotateOutcome::Comment(a) => Ok(ApiResponse::created(a)),
            other => Err(ApiError::internal(&format!("unexpected outcome {other:?}"))),
        }
    }

    fn tag(&self, id: ResourceId, tag: &str, add: bool) -> Result<ApiResponse> {
        let grant = self.grant(Action::MutateResource(id))?;
        let op = if add {
            Annotate::AddTag(tag.to_owned())
        } else {
            Annotate::RemoveTag(tag.to_owned())
        };
        Ok(match self.store().annotate_resource(id, op, grant.actor())? {
            AnnotateOutcome::Tag(t) => ApiResponse::created(t),
            _ => ApiResponse::no_content(),
        })
    }

    fn timeline(&self, id: ResourceId) -> Result<ApiResponse> {
        self.readable_resource(id)?;
        let captures = self.store().captures(id)?;
        Ok(ApiResponse::ok(json!({
            "buckets": aggregate_captures_by_month(&captures),
            "span": capture_span(&captures),
        })))
    }

    fn captures(&self, id: ResourceId) -> Result<ApiResponse> {
        self.readable_resource(id)?;
        Ok(ApiResponse::ok(self.store().captures(id)?))
    }

    fn archive_now(&self, id: ResourceId) -> Result<ApiResponse> {
        let grant = self.grant(Action::MutateResource(id))?;
        let res = self.store().resource(id)?;
        let now = self.store().now();
        let receipt = request_archive_now(
            &res.url,
            self.app.transport.as_ref(),
            &self.app.config.save_base_url,
            now,
        )?;
        let capture = match (&receipt.outcome, &receipt.capture_uri) {
            (ArchiveOutcome::Accepted, Some(uri)) => Some(NewCapture {
                capture_datetime: receipt.capture_datetime().min(now),
                capture_uri: uri.clone(),
                provenance: Provenance::OnDemandArchive,
            }),
            _ => None,
        };
        let mut info = BTreeMap::new();
        info.insert("outcome".to_owned(), receipt.outcome.as_str().to_owned());
        info.insert("request_uri".to_owned(), receipt.request_uri.clone());
        if let Some(uri) = &receipt.capture_uri {
            info.insert("capture_uri".to_owned(), uri.clone());
        }
        self.store()
            .record_archive_now(id, grant.actor(), capture, info)?;
        Ok(ApiResponse::ok(receipt))
    }

    // ---- discovery ------------------------------------------------------

    fn search(&self) -> Result<ApiResponse> {
        let session = self.session()?;
        let params: Vec<(&str, &str)> = self
            .req
            .query
            .iter()
            .map(|(k, v)| {
                let key = match k.as_str() {
                    "type" => "media_type",
                    "source" => "source_service",
                    other => other,
                };
                (key, v.as_str())
            })
            .filter(|(_, v)| !v.is_empty())
            .collect();
        let q = QuerySpec::from_params(params)?;
        let account = self.store().user(session.user)?;
        let visibility = if account.role == Role::Admin {
            Visibility::All
        } else {
            Visibility::PublicPlus(self.store().member_groups(session.user))
        };
        let page = federated_search(&q, &self.app.index, &visibility, self.app.provider.as_ref())?;

        let mut info = BTreeMap::new();
        info.insert("query".to_owned(), q.terms.clone());
        info.insert(
            "media_type".to_owned(),
            q.media_type.map(|m| m.as_str().to_owned()).unwrap_or_default(),
        );
        let filters: BTreeMap<String, String> = q
            .filters
            .iter()
            .map(|(f, v)| (f.as_str().to_owned(), v.clone()))
            .collect();
        info.insert(
            "filters".to_owned(),
            serde_json::to_string(&filters).map_err(|e| ApiError::internal(&e))?,
        );
        info.insert("result_count".to_owned(), page.total.to_string());
        info.insert("page".to_owned(), q.page.to_string());
        let groups = q
            .filters
            .get(&Facet::Group)
            .and_then(|g| g.parse::<GroupId>().ok())
            .into_iter()
            .collect();
        self.store().log_search(session.user, &q.terms, groups, info)?;
        Ok(ApiResponse::ok(page))
    }

    fn url_status(&self) -> Result<ApiResponse> {
        self.optional_session()?;
        let url = self
            .param("url")
            .ok_or_else(|| ApiError::from(SearchError::InvalidQuery("url is required".into())))?;
        let status = archive_status(url, self.app.transport.as_ref(), &self.app.config.cdx_base_url)?;
        Ok(ApiResponse::ok(status))
    }
}
