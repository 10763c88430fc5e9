mod common;

use aw_core::clock::format_iso;
use aw_core::domain::*;
use aw_core::memento::{cdx_query_url, HttpResponse};
use aw_core::search::{FixtureProvider, LiveResult};
use aw_core::service::{ApiRequest, Method};
use chrono::Duration;
use common::domain::ingested;
use common::{t0, TestApp, PASSWORD};
use serde_json::{json, Value};

fn hrwa(t: &TestApp, n: usize) -> GroupId {
    let urls: Vec<String> = (0..n).map(|i| format!("http://hr{i}.example.org/")).collect();
    let g = ingested(t.app.store(), "1068", &urls);
    t.app.refresh_index();
    g
}

fn group(t: &TestApp, token: &str, title: &str) -> u64 {
    let body = t.ok(ApiRequest::post("/api/groups").bearer(token).json(json!({ "title": title })));
    t.id(&body)
}

fn add(t: &TestApp, token: &str, g: u64, body: Value) -> u64 {
    let res = t.ok(ApiRequest::post(&format!("/api/groups/{g}/resources")).bearer(token).json(body));
    res["resource"]["id"].as_u64().unwrap()
}

fn code(t: &TestApp, req: ApiRequest) -> (u16, String) {
    let r = t.call(req);
    (r.status, r.error_code().unwrap_or_default().to_owned())
}

fn searches(t: &TestApp) -> usize {
    t.app
        .store()
        .activity()
        .iter()
        .filter(|e| e.action_type == ActionType::SearchExecuted)
        .count()
}

#[test]
fn session_lifecycle() {
    let t = TestApp::new();
    let r = t.call(ApiRequest::post("/api/session").json(json!({ "username": "cato", "password": PASSWORD })));
    assert_eq!(r.status, 201);
    assert_eq!(r.body["expires_at"], json!(format_iso(&(t0() + Duration::hours(24)))));
    assert_eq!(r.body["token"].as_str().unwrap().len(), 22);

    for (user, pw) in [("cato", "wrong"), ("nobody", PASSWORD)] {
        let got = code(&t, ApiRequest::post("/api/session").json(json!({ "username": user, "password": pw })));
        assert_eq!(got, (401, "InvalidCredentials".into()));
    }
    assert_eq!(code(&t, ApiRequest::post("/api/session").json(json!({ "username": 3 }))).0, 400);
}

#[test]
fn expired_token_is_rejected_everywhere() {
    let t = TestApp::new();
    let g = group(&t, &t.curator, "mine");
    t.clock.advance(Duration::hours(24) + Duration::seconds(1));
    for req in [
        ApiRequest::get("/api/search").param("q", "x"),
        ApiRequest::get(&format!("/api/groups/{g}")),
        ApiRequest::post("/api/groups").json(json!({ "title": "t" })),
        ApiRequest::post(&format!("/api/groups/{g}/resources")).json(json!({ "url": "http://a.org/" })),
        ApiRequest::get("/api/groups"),
    ] {
        assert_eq!(code(&t, req.bearer(&t.curator)), (401, "Unauthenticated".into()));
    }
}

#[test]
fn routing_errors() {
    let t = TestApp::new();
    assert_eq!(code(&t, ApiRequest::get("/api/nothing")), (404, "RouteNotFound".into()));
    assert_eq!(code(&t, ApiRequest::get("/api/groups/abc")), (404, "RouteNotFound".into()));
    assert_eq!(code(&t, ApiRequest::new(Method::Put, "/api/groups")), (405, "MethodNotAllowed".into()));
    let mut big = ApiRequest::post("/api/groups").bearer(&t.curator);
    big.body = vec![b' '; 20 * 1024 * 1024 + 1];
    assert_eq!(code(&t, big).0, 413);
    let mut bad = ApiRequest::post("/api/groups").bearer(&t.curator);
    bad.body = b"{not json".to_vec();
    assert_eq!(code(&t, bad), (400, "MalformedRequest".into()));
}

#[test]
fn group_visibility_and_membership() {
    let t = TestApp::new();
    let g = group(&t, &t.curator, "Climate Justice");
    let path = format!("/api/groups/{g}");
    assert_eq!(code(&t, ApiRequest::get(&path)), (401, "Unauthenticated".into()));
    assert_eq!(code(&t, ApiRequest::get(&path).bearer(&t.member)), (403, "NotAMember".into()));
    let detail = t.ok(ApiRequest::get(&path).bearer(&t.curator));
    assert_eq!(detail["member_count"], 1);

    let joined = t.call(ApiRequest::post(&format!("{path}/members")).bearer(&t.member));
    assert_eq!(joined.status, 201);
    assert_eq!(joined.body["member_role"], "member");
    assert_eq!(
        code(&t, ApiRequest::post(&format!("{path}/members")).bearer(&t.member)),
        (409, "AlreadyMember".into())
    );
    assert_eq!(
        code(&t, ApiRequest::delete(&format!("{path}/members/me")).bearer(&t.curator)),
        (409, "SoleOwnerCannotLeave".into())
    );
    assert_eq!(t.call(ApiRequest::delete(&format!("{path}/members/me")).bearer(&t.member)).status, 204);

    // Ingested groups are public.
    let hr = hrwa(&t, 2);
    let body = t.ok(ApiRequest::get(&format!("/api/groups/{}", hr.0)));
    assert_eq!(body["resources"].as_array().unwrap().len(), 2);
    let listed = t.ok(ApiRequest::get("/api/groups").param("query", "collection"));
    assert_eq!(listed.as_array().unwrap().len(), 1);
}

#[test]
fn authorization_examples() {
    let t = TestApp::new();
    let hr = hrwa(&t, 1);
    let ingested_res = t.app.store().resources_in_group(hr).unwrap()[0].id.0;
    let got = code(
        &t,
        ApiRequest::patch(&format!("/api/resources/{ingested_res}"))
            .bearer(&t.admin)
            .json(json!({ "title": "x" })),
    );
    assert_eq!(got, (403, "ReadOnlyGroup".into()));

    let g = group(&t, &t.member, "mine");
    let r = add(&t, &t.member, g, json!({ "url": "http://a.org/", "title": "A" }));
    assert_eq!(
        code(&t, ApiRequest::post(&format!("/api/resources/{r}/tags/x")).bearer(&t.outsider)),
        (403, "NotAMember".into())
    );
    assert_eq!(
        code(&t, ApiRequest::patch(&format!("/api/resources/{r}")).bearer(&t.member).json(json!({ "url": "http://b/" }))),
        (422, "FieldNotEditable".into())
    );
    assert_eq!(
        code(&t, ApiRequest::post(&format!("/api/groups/{g}/resources")).bearer(&t.member).json(json!({ "url": "http://A.org:80/" }))),
        (409, "DuplicateUrlInGroup".into())
    );
}

#[test]
fn resource_workflow() {
    let t = TestApp::build(|app| app.with_fixed_screenshot(b"png".to_vec()));
    let g = group(&t, &t.curator, "mine");
    let live = t.ok(
        ApiRequest::post(&format!("/api/groups/{g}/resources"))
            .bearer(&t.curator)
            .json(json!({ "url": "http://live.example/", "title": "Live", "source": "live_web" })),
    );
    assert_eq!(live["thumbnail"]["kind"], "image");
    assert_eq!(live["resource"]["availability"], "live");
    assert!(live["resource"]["thumbnail_ref"].as_str().unwrap().starts_with("sha256:"));

    let r = add(
        &t,
        &t.curator,
        g,
        json!({
            "url": "http://www.tibetinfonet.net/",
            "title": "TibetInfoNet",
            "availability": "gone",
            "captures": [
                { "capture_datetime": "2015-07-31T00:00:00Z", "capture_uri": "https://w/2" },
                { "capture_datetime": "2008-05-01T00:00:00Z", "capture_uri": "https://w/1" },
                { "capture_datetime": "2008-05-20T00:00:00Z", "capture_uri": "https://w/3" }
            ]
        }),
    );
    let timeline = t.ok(ApiRequest::get(&format!("/api/resources/{r}/timeline")).bearer(&t.curator));
    assert_eq!(timeline["span"]["count"], 3);
    assert_eq!(timeline["span"]["first"], "2008-05-01T00:00:00Z");
    assert_eq!(timeline["span"]["last"], "2015-07-31T00:00:00Z");
    assert_eq!(timeline["buckets"].as_array().unwrap().len(), 2);
    let caps = t.ok(ApiRequest::get(&format!("/api/resources/{r}/captures")).bearer(&t.curator));
    assert_eq!(caps.as_array().unwrap().len(), 3);

    let c = t.call(ApiRequest::post(&format!("/api/resources/{r}/annotations")).bearer(&t.curator).json(json!({ "text": "archive monthly" })));
    assert_eq!(c.status, 201);
    assert_eq!(t.call(ApiRequest::post(&format!("/api/resources/{r}/tags/Photo%20Gallery")).bearer(&t.curator)).status, 201);
    assert_eq!(
        code(&t, ApiRequest::post(&format!("/api/resources/{r}/tags/photo%20gallery")).bearer(&t.curator)),
        (409, "DuplicateTag".into())
    );
    let view = t.ok(ApiRequest::get(&format!("/api/resources/{r}")).bearer(&t.curator));
    assert_eq!(view["tags"][0]["tag"], "photo gallery");
    assert_eq!(t.call(ApiRequest::delete(&format!("/api/resources/{r}/tags/photo%20gallery")).bearer(&t.curator)).status, 204);

    let edited = t.ok(ApiRequest::patch(&format!("/api/resources/{r}")).bearer(&t.curator).json(json!({ "title": "Tibet" })));
    assert_eq!(edited["title"], "Tibet");

    let other = group(&t, &t.curator, "other");
    let copy = t.call(ApiRequest::post(&format!("/api/resources/{r}/transfer")).bearer(&t.curator).json(json!({ "target": other, "mode": "copy" })));
    assert_eq!(copy.status, 201);
    let third = group(&t, &t.curator, "third");
    let moved = t.call(ApiRequest::post(&format!("/api/resources/{r}/transfer")).bearer(&t.curator).json(json!({ "target": third, "mode": "move" })));
    assert_eq!(moved.status, 200);
    assert_eq!(moved.body["group_id"], third);

    assert_eq!(t.call(ApiRequest::delete(&format!("/api/resources/{r}")).bearer(&t.curator)).status, 204);
    assert_eq!(code(&t, ApiRequest::get(&format!("/api/resources/{r}")).bearer(&t.curator)), (404, "UnknownResource".into()));
}

#[test]
fn subgroups_merge_and_copy() {
    let t = TestApp::new();
    let hr = hrwa(&t, 3);
    let g = group(&t, &t.curator, "mine");
    let sub = t.call(ApiRequest::post(&format!("/api/groups/{g}/subgroups")).bearer(&t.curator).json(json!({ "title": "photos" })));
    assert_eq!(sub.status, 201);
    let sub_id = t.id(&sub.body);
    assert_eq!(
        code(&t, ApiRequest::post(&format!("/api/groups/{sub_id}/subgroups")).bearer(&t.curator).json(json!({ "title": "deeper" }))),
        (422, "NestingTooDeep".into())
    );
    assert_eq!(
        code(&t, ApiRequest::post(&format!("/api/groups/{}/subgroups", hr.0)).bearer(&t.curator).json(json!({ "title": "x" }))),
        (403, "ReadOnlyGroup".into())
    );
    assert_eq!(t.call(ApiRequest::delete(&format!("/api/groups/{sub_id}")).bearer(&t.curator)).status, 204);

    let copy = t.call(ApiRequest::post(&format!("/api/groups/{}/copy", hr.0)).bearer(&t.member));
    assert_eq!(copy.status, 201);
    assert_eq!(copy.body["read_only"], false);
    let copied = t.id(&copy.body);
    let merged = t.call(
        ApiRequest::post("/api/groups/merge")
            .bearer(&t.member)
            .json(json!({ "sources": [hr.0, copied], "title": "merged" })),
    );
    assert_eq!(merged.status, 201);
    let detail = t.ok(ApiRequest::get(&format!("/api/groups/{}", t.id(&merged.body))).bearer(&t.member));
    assert_eq!(detail["resources"].as_array().unwrap().len(), 3);
    assert_eq!(
        code(&t, ApiRequest::post("/api/groups/merge").bearer(&t.member).json(json!({ "sources": [g], "title": "x" }))),
        (403, "NotAMember".into())
    );
    assert_eq!(
        code(&t, ApiRequest::post("/api/groups/merge").bearer(&t.member).json(json!({ "sources": [copied], "title": "x" }))),
        (422, "FewerThanTwoSources".into())
    );
}

#[test]
fn search_emits_one_usage_record() {
    let provider = FixtureProvider::new().with(
        "human rights",
        vec![LiveResult {
            url: "http://live.example/hr".into(),
            title: "Live human rights".into(),
            snippet: String::new(),
        }],
    );
    let t = TestApp::build(|app| app.with_provider(std::sync::Arc::new(provider)));
    let hr = hrwa(&t, 4);
    let before = searches(&t);
    let page = t.ok(ApiRequest::get("/api/search").param("q", "human rights").bearer(&t.member));
    assert_eq!(searches(&t), before + 1);
    assert_eq!(page["total"], 5);
    let results = page["results"].as_array().unwrap();
    assert!(results[..4].iter().all(|r| r["source"] == "archive"));
    assert_eq!(results[4]["source"], "live_web");

    let entry = t.app.store().activity().pop().unwrap();
    assert_eq!(entry.action_type, ActionType::SearchExecuted);
    assert_eq!(entry.details["query"], "human rights");
    assert_eq!(entry.details["result_count"], "5");

    let filtered = t.ok(
        ApiRequest::get("/api/search")
            .param("q", "human rights")
            .param("group", &hr.0.to_string())
            .param("type", "")
            .bearer(&t.member),
    );
    assert_eq!(filtered["total"], 4);
    let entry = t.app.store().activity().pop().unwrap();
    assert!(entry.details["filters"].contains("group"));
    assert_eq!(searches(&t), before + 2);

    // Failed searches are not logged.
    assert_eq!(code(&t, ApiRequest::get("/api/search").param("q", "x").param("page", "0").bearer(&t.member)).0, 422);
    assert_eq!(code(&t, ApiRequest::get("/api/search").param("q", "x")).0, 401);
    assert_eq!(searches(&t), before + 2);
}

#[test]
fn private_groups_stay_out_of_search() {
    let t = TestApp::new();
    let g = group(&t, &t.curator, "secret");
    add(&t, &t.curator, g, json!({ "url": "http://hidden.example/", "title": "zebra crossing" }));
    let find = |token: &str| t.ok(ApiRequest::get("/api/search").param("q", "zebra").bearer(token))["total"].clone();
    assert_eq!(find(&t.curator), 1);
    assert_eq!(find(&t.member), 0);
    assert_eq!(find(&t.admin), 1);
}

#[test]
fn archive_now_records_receipt_and_activity() {
    let t = TestApp::new();
    let g = group(&t, &t.curator, "mine");
    let r = add(&t, &t.curator, g, json!({ "url": "http://example.org/" }));
    t.transport.route(
        "https://web.archive.org/save/http://example.org/",
        HttpResponse::new(200, "").with_header("Content-Location", "/web/20160630115959/http://example.org/"),
    );
    let receipt = t.ok(ApiRequest::post(&format!("/api/resources/{r}/archive-now")).bearer(&t.curator));
    assert_eq!(receipt["outcome"], "accepted");
    assert_eq!(receipt["capture_uri"], "https://web.archive.org/web/20160630115959/http://example.org/");
    let caps = t.app.store().captures(ResourceId(r)).unwrap();
    assert_eq!(caps.len(), 1);
    assert_eq!(caps[0].provenance, Provenance::OnDemandArchive);
    let entry = t.app.store().activity().pop().unwrap();
    assert_eq!(entry.action_type, ActionType::ArchiveNowRequested);
    assert_eq!(entry.details["outcome"], "accepted");

    let hr = hrwa(&t, 1);
    let ingested_res = t.app.store().resources_in_group(hr).unwrap()[0].id.0;
    assert_eq!(
        code(&t, ApiRequest::post(&format!("/api/resources/{ingested_res}/archive-now")).bearer(&t.admin)),
        (403, "ReadOnlyGroup".into())
    );
}

#[test]
fn url_status_and_activity_endpoints() {
    let t = TestApp::new();
    let url = "http://www.tibetinfonet.net/";
    let cdx = "https://web.archive.org/cdx/search/cdx";
    t.transport.route(
        &cdx_query_url(cdx, url, 1),
        HttpResponse::new(200, r#"[["timestamp","original"],["20080501000000","http://www.tibetinfonet.net/"]]"#),
    );
    t.transport.route(
        &cdx_query_url(cdx, url, -1),
        HttpResponse::new(200, r#"[["timestamp","original"],["20150731000000","http://www.tibetinfonet.net/"]]"#),
    );
    let st = t.ok(ApiRequest::get("/api/url-status").param("url", url));
    assert_eq!(st["status"], "indexed");
    assert_eq!(st["last_capture"], "2015-07-31T00:00:00Z");
    assert_eq!(code(&t, ApiRequest::get("/api/url-status").param("url", "ftp://x")), (422, "InvalidUrl".into()));
    assert_eq!(code(&t, ApiRequest::get("/api/url-status").param("url", "http://down.example/")).0, 502);

    let g = group(&t, &t.curator, "mine");
    t.clock.advance(Duration::seconds(10));
    add(&t, &t.curator, g, json!({ "url": "http://a.org/" }));
    let all = t.ok(ApiRequest::get(&format!("/api/groups/{g}/activity")).bearer(&t.curator));
    let types: Vec<&str> = all.as_array().unwrap().iter().map(|e| e["action_type"].as_str().unwrap()).collect();
    assert_eq!(types, vec!["resource_added", "group_created"]);
    let since = format_iso(&t0());
    let recent = t.ok(ApiRequest::get(&format!("/api/groups/{g}/activity")).param("since", &since).bearer(&t.curator));
    assert_eq!(recent.as_array().unwrap().len(), 1);
    assert_eq!(
        code(&t, ApiRequest::get(&format!("/api/groups/{g}/activity")).param("limit", "0").bearer(&t.curator)).0,
        422
    );
}
