mod common;

use std::sync::Arc;
use std::time::Duration;

use axum::http::{Method, StatusCode};
use common::{complete, cycle, gml, k33, path, unzip, zip_of, TestApi};
use oga_server::{Worker, WorkerConfig};
use serde_json::{json, Value};

#[tokio::test]
async fn upload_is_pending_until_the_worker_runs() {
    let api = TestApi::new(|_| {});
    let r = api
        .post("/graphs?format=gml&name=K4&tags=small,platonic", gml(false, 4, &complete(4)))
        .await;
    assert_eq!(r.status, StatusCode::CREATED);
    let body = r.json();
    let id = body["id"].as_str().unwrap();
    assert_eq!(body["uri"], format!("/graphs/{id}"));
    assert_eq!(r.header("location"), Some(format!("/graphs/{id}").as_str()));

    let rec = api.get(&format!("/graphs/{id}")).await;
    assert_eq!(rec.status, StatusCode::OK);
    assert_eq!(rec.json()["status"], "pending-analysis");
    assert_eq!(rec.json()["metadata"]["creator"], "alice");
    assert_eq!(api.get(&format!("/graphs/{id}/image.svg")).await.status, StatusCode::NOT_FOUND);

    assert_eq!(api.drain().await, 1);
    let rec = api.get(&format!("/graphs/{id}")).await.json();
    assert_eq!(rec["status"], "analyzed");
    assert_eq!(rec["properties"]["is_planar"], true);
    assert_eq!(rec["properties"]["vertex_connectivity"], 3);
    assert_eq!(rec["image"], format!("/graphs/{id}/image.svg"));
    let svg = api.get(&format!("/graphs/{id}/image.svg")).await;
    assert_eq!(svg.status, StatusCode::OK);
    assert_eq!(svg.header("content-type"), Some("image/svg+xml"));
    assert!(String::from_utf8(svg.body).unwrap().contains("<svg"));
    assert_eq!(api.drain().await, 0);
}

#[tokio::test]
async fn upload_errors() {
    let api = TestApi::new(|c| c.max_upload_bytes = 4096);
    let r = api.post("/graphs?format=gml&name=bad", "graph [\n  node [ id 0 ]\n  edge [ source 0 target ]\n]").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let e = r.json();
    assert_eq!(e["error"], "parse-failed");
    assert_eq!(e["line"], 3);
    assert!(e["column"].as_u64().unwrap() > 0);

    let r = api.send(Method::POST, "/graphs?format=gml&name=x", None, gml(false, 2, &[(0, 1)])).await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
    assert_eq!(r.header("www-authenticate"), Some("Bearer"));
    let r = api.send(Method::POST, "/graphs?format=gml&name=x", Some("nope"), gml(false, 2, &[(0, 1)])).await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);

    let r = api.post("/graphs?format=gml&name=big", gml(false, 400, &path(400))).await;
    assert_eq!(r.status, StatusCode::PAYLOAD_TOO_LARGE);

    let r = api.post("/graphs?format=gml", gml(false, 2, &[(0, 1)])).await;
    assert_eq!(r.json()["error"], "invalid-metadata");
    let r = api.post("/graphs?format=pajek&name=x", gml(false, 2, &[(0, 1)])).await;
    assert_eq!(r.json()["error"], "unknown-format");
    // detection from content
    let r = api.post("/graphs?name=sniffed", gml(false, 2, &[(0, 1)])).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(api.store.search(&oga_archive::SearchQuery::all(), 0, 10).unwrap().total, 1);
}

#[tokio::test]
async fn open_mode_and_license_ack() {
    let api = TestApi::new(|c| {
        c.open_mode = true;
        c.require_license_ack = true;
    });
    let body = gml(false, 3, &cycle(3));
    let send = |q: &'static str| api.send(Method::POST, q, None, body.clone());
    assert_eq!(send("/graphs?format=gml&name=t&creator=bob").await.json()["error"], "license-ack-required");
    assert_eq!(send("/graphs?format=gml&name=t&license_ack=true").await.json()["error"], "invalid-metadata");
    let r = send("/graphs?format=gml&name=t&creator=bob&license_ack=true").await;
    assert_eq!(r.status, StatusCode::CREATED);
    let id = r.json()["id"].as_str().unwrap().to_string();
    assert_eq!(api.get(&format!("/graphs/{id}")).await.json()["metadata"]["creator"], "bob");
    // a bad token is still refused in open mode
    let r = api.send(Method::POST, "/graphs?format=gml&name=t&creator=b&license_ack=1", Some("x"), body.clone()).await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn guests_can_read_everything_public() {
    let api = TestApi::new(|_| {});
    let id = api.upload("C5", "", gml(false, 5, &cycle(5))).await;
    api.drain().await;
    for uri in [
        format!("/graphs/{id}"),
        format!("/graphs/{id}/image.svg"),
        format!("/graphs/{id}/download"),
        format!("/graphs/{id}/download?format=graphml"),
        "/search?all=true".to_string(),
        "/collections".to_string(),
        "/healthz".to_string(),
    ] {
        assert_eq!(api.get(&uri).await.status, StatusCode::OK, "{uri}");
    }
    let r = api
        .send(Method::PATCH, &format!("/graphs/{id}/metadata"), None, br#"{"name":"x"}"#.to_vec())
        .await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
    assert_eq!(api.get("/graphs/01ARZ3NDEKTSV4RRFFQ69G5FAV").await.status, StatusCode::NOT_FOUND);
    assert_eq!(api.get("/graphs/not-an-id").await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn download_converts_and_reports_losses() {
    let api = TestApi::new(|_| {});
    let original = gml(false, 3, &cycle(3));
    let id = api.upload("tri", "", original.clone()).await;
    let r = api.get(&format!("/graphs/{id}/download")).await;
    assert_eq!(r.body, original);
    assert!(r.header("content-disposition").unwrap().contains(&format!("{id}.gml")));

    let r = api.get(&format!("/graphs/{id}/download?format=dimacs")).await;
    assert_eq!(r.status, StatusCode::OK);
    let report: Value = serde_json::from_str(r.header("x-loss-report").unwrap()).unwrap();
    let labels = report["dropped_items"].as_array().unwrap().iter().find(|d| d["kind"] == "node-label").cloned();
    assert_eq!(labels.unwrap()["count"], 3, "{report}");
    assert!(String::from_utf8(r.body).unwrap().contains("p edge 3 3"));

    let r = api.get(&format!("/graphs/{id}/download?format=graphml")).await;
    assert_eq!(r.header("content-type"), Some("application/xml"));
    let report: Value = serde_json::from_str(r.header("x-loss-report").unwrap()).unwrap();
    assert_eq!(report["dropped_items"], json!([]));
    assert_eq!(api.get(&format!("/graphs/{id}/download?format=png")).await.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn metadata_comments_references_and_properties() {
    let api = TestApi::new(|_| {});
    let id = api.upload("K5", "", gml(false, 5, &complete(5))).await;
    let base = format!("/graphs/{id}");

    let r = api
        .patch(
            &format!("{base}/metadata"),
            json!({
                "description": "complete graph",
                "creation_method": "generated by hand",
                "tags": ["biology", {"value": "social", "kind": "application-domain"}]
            })
            .to_string(),
        )
        .await;
    assert_eq!(r.status, StatusCode::OK, "{}", String::from_utf8_lossy(&r.body));
    assert_eq!(r.json()["creation_method"], "generated by hand");
    let r = api.patch(&format!("{base}/metadata"), json!({"name": ""}).to_string()).await;
    assert_eq!(r.json()["error"], "invalid-metadata");

    let r = api.post(&format!("{base}/comments"), json!({"text": "nice"}).to_string()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["author"], "alice");
    let r = api
        .post(
            &format!("{base}/references"),
            json!({"kind": "website", "citation_or_url": "https://example.org/k5"}).to_string(),
        )
        .await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&r.body));

    let r = api.post(&format!("{base}/properties"), json!({"crossing_number": 1}).to_string()).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["crossing_number"], 1);
    let r = api.post(&format!("{base}/properties"), json!({"is_planar": true}).to_string()).await;
    assert_eq!(r.json()["error"], "field-not-user-settable");
    let r = api.post(&format!("{base}/properties"), json!({"girth": 3}).to_string()).await;
    assert_eq!(r.json()["error"], "unknown-property");

    let rec = api.get(&base).await.json();
    let meta = &rec["metadata"];
    assert_eq!(meta["comments"][0]["text"], "nice");
    assert_eq!(meta["references"][0]["citation_or_url"], "https://example.org/k5");
    assert_eq!(meta["tags"].as_array().unwrap().len(), 2);
    assert_eq!(rec["user_properties"]["crossing_number"], 1);

    let r = api.send(Method::DELETE, &base, Some(&api.token.clone()), Vec::new()).await;
    assert_eq!(r.status, StatusCode::NO_CONTENT);
    assert_eq!(api.get(&base).await.status, StatusCode::GONE);
}

#[tokio::test]
async fn search_parameters() {
    let api = TestApi::new(|_| {});
    let small = api.upload("small", "tags=biology", gml(false, 5, &cycle(5))).await;
    let mid = api.upload("mid", "tags=biology", gml(false, 20, &cycle(20))).await;
    let other = api.upload("other", "tags=social", gml(false, 20, &path(20))).await;
    let k5 = api.upload("k5", "tags=biology", gml(false, 5, &complete(5))).await;
    api.drain().await;
    let ids = |v: Value| -> Vec<String> {
        v["results"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap().to_string()).collect()
    };

    let r = api.get("/search?tag=biology&min_nodes=10&max_nodes=100").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(ids(r.json()), vec![mid.clone()]);
    let all_bio = ids(api.get("/search?tag=biology").await.json());
    assert_eq!(all_bio.len(), 3);
    let planar = ids(api.get("/search?tag=biology&planar=true").await.json());
    assert!(planar.contains(&small) && planar.contains(&mid) && !planar.contains(&k5));
    assert_eq!(ids(api.get("/search?q=OTH").await.json()), vec![other]);
    assert_eq!(ids(api.get("/search?all=true&page_size=2").await.json()).len(), 2);
    let page = api.get("/search?all=true&page_size=3&page=1").await.json();
    assert_eq!(page["total"], 4);
    assert_eq!(page["results"].as_array().unwrap().len(), 1);
    let first = &api.get("/search?all=true").await.json()["results"][0];
    assert_eq!(first["thumbnail"], format!("/graphs/{}/image.svg", first["id"].as_str().unwrap()));
    assert_eq!(first["is_planar"], false);

    assert_eq!(api.get("/search?planar=maybe").await.status, StatusCode::BAD_REQUEST);
    assert_eq!(api.get("/search").await.json()["error"], "invalid-query");
    assert_eq!(api.get("/search?min_girth=3").await.json()["error"], "unknown-property");
    let window = ids(api.get("/search?from=2000-01-01&to=2999-12-31").await.json());
    assert_eq!(window.len(), 4);
    assert!(ids(api.get("/search?to=2000-01-01").await.json()).is_empty());
}

async fn tally(api: &TestApi, a: &str, b: &str, property: &str) -> String {
    let r = api.get(&format!("/compare?ids={a},{b}")).await;
    assert_eq!(r.status, StatusCode::OK, "{}", String::from_utf8_lossy(&r.body));
    let view = r.json();
    let row = view["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["property"] == property)
        .unwrap()
        .clone();
    row["tally"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn compare_tallies() {
    let api = TestApi::new(|_| {});
    let k4 = api.upload("K4", "", gml(false, 4, &complete(4))).await;
    let k5 = api.upload("K5", "", gml(false, 5, &complete(5))).await;
    let r = api.get(&format!("/compare?ids={k4},{k5}")).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["error"], "analysis-pending");

    let c4 = api.upload("C4", "", gml(false, 4, &cycle(4))).await;
    let k33 = api.upload("K33", "", gml(false, 6, &k33())).await;
    api.drain().await;
    assert_eq!(tally(&api, &k4, &k5, "is_planar").await, "some");
    assert_eq!(tally(&api, &k4, &c4, "is_connected").await, "all");
    assert_eq!(tally(&api, &k5, &k33, "is_planar").await, "none");

    let view = api.get(&format!("/compare?ids={k4}&ids={k5}")).await.json();
    assert_eq!(view["names"], json!(["K4", "K5"]));
    assert_eq!(api.get(&format!("/compare?ids={k4}")).await.status, StatusCode::BAD_REQUEST);
    let r = api.get(&format!("/compare?ids={k4},01ARZ3NDEKTSV4RRFFQ69G5FAV")).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let nine = vec![k4.as_str(); 9].join(",");
    assert_eq!(api.get(&format!("/compare?ids={nine}")).await.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn collections() {
    let api = TestApi::new(|_| {});
    let a = api.upload("a", "", gml(false, 3, &cycle(3))).await;
    let r = api.post("/collections", json!({"name": "teaching", "description": "small"}).to_string()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let cid = r.json()["id"].as_str().unwrap().to_string();
    let members = format!("/collections/{cid}/members");
    let add = |g: String| api.post(&members, json!({ "graph_id": g }).to_string());
    assert_eq!(add(a.clone()).await.status, StatusCode::CREATED);
    assert_eq!(add(a.clone()).await.status, StatusCode::CONFLICT);
    assert_eq!(add("01ARZ3NDEKTSV4RRFFQ69G5FAV".into()).await.status, StatusCode::NOT_FOUND);
    let c = api.get(&format!("/collections/{cid}")).await.json();
    assert_eq!(c["member_graph_ids"], json!([a]));
    assert_eq!(api.get("/collections").await.json()["collections"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn zip_import_and_export() {
    let api = TestApi::new(|_| {});
    let zip = zip_of(&[
        ("one.gml", &gml(false, 3, &cycle(3))),
        ("nested/two.gml", &gml(true, 2, &[(0, 1)])),
        ("bad.gml", b"graph [ node [ id 0 ] edge [ source 0 "),
    ]);
    let r = api.post("/import?tags=imported", zip).await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    assert_eq!(v["committed"], 2);
    let results = v["results"].as_array().unwrap();
    let bad = results.iter().find(|e| e["filename"] == "bad.gml").unwrap();
    assert_eq!(bad["error"]["error"], "parse-failed");
    assert!(bad["error"]["line"].is_u64());
    let ids: Vec<String> = results.iter().filter_map(|e| e["id"].as_str().map(str::to_string)).collect();
    assert_eq!(ids.len(), 2);
    let names = api.get("/search?tag=imported").await.json();
    assert_eq!(names["total"], 2);

    let r = api.get(&format!("/export?ids={}&format=graphml", ids.join(","))).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.header("content-type"), Some("application/zip"));
    let files = unzip(&r.body);
    let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    for id in &ids {
        assert!(names.contains(&format!("{id}.graphml").as_str()), "{names:?}");
        assert!(names.contains(&format!("losses/{id}.json").as_str()));
    }
    let manifest = &files.iter().find(|(n, _)| n == "manifest.txt").unwrap().1;
    assert!(String::from_utf8_lossy(manifest).contains("one\tgraphml"));

    // the export imports back under the manifest names
    let again = api.post("/import", r.body).await.json();
    assert_eq!(again["committed"], 2);

    let r = api.post("/import", b"not a zip".to_vec()).await;
    assert_eq!(r.json()["error"], "corrupt-archive");
    assert_eq!(api.get("/export?ids=x").await.status, StatusCode::NOT_FOUND);
    assert_eq!(api.get(&format!("/export?ids={}", ids[0])).await.status, StatusCode::BAD_REQUEST);
    let r = api.post("/import?format=bad.gml:dimacs", zip_of(&[("bad.gml", b"p edge 2 1\ne 1 2\n")])).await;
    assert_eq!(r.json()["committed"], 1);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn background_worker_processes_uploads() {
    let api = TestApi::new(|_| {});
    let worker = Worker::spawn(
        Arc::clone(&api.store),
        WorkerConfig {
            poll_interval: Duration::from_millis(50),
            ..WorkerConfig::default()
        },
    );
    let mut ids = Vec::new();
    for n in 3..8 {
        ids.push(api.upload(&format!("C{n}"), "", gml(false, n, &cycle(n))).await);
    }
    for id in &ids {
        let rec = api.wait_done(id, Duration::from_secs(30)).await;
        assert_eq!(rec["status"], "analyzed");
        assert_eq!(rec["properties"]["vertex_connectivity"], 2);
    }
    worker.shutdown().await;
}

#[tokio::test]
async fn reprocessing_is_idempotent() {
    let api = TestApi::new(|_| {});
    let id = api.upload("K33", "", gml(false, 6, &k33())).await;
    api.drain().await;
    let before = api.get(&format!("/graphs/{id}")).await.json();
    let gid = id.parse().unwrap();
    let cfg = api.state.config.worker.clone();
    assert!(!oga_server::worker::run_job(&api.store, &gid, &cfg).unwrap());
    let props = oga_core::analysis::analyze(&api.store.canonical(&gid).unwrap(), &cfg.analysis).unwrap();
    assert_eq!(serde_json::to_value(props).unwrap(), before["properties"]);
    assert_eq!(api.get(&format!("/graphs/{id}")).await.json(), before);
}
