use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graphsci_core::bench::parse_raw_log;
use graphsci_core::linkpred::{auc, evaluate};
use graphsci_core::{betweenness, pagerank, top_k, Graph, PageRankConfig};
use serde_json::Value;

fn graphsci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphsci"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn sample() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/got_sample.csv")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ingest_reports_clean_summary() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ok.csv", "Source,Target,weight\na,b,1\nb,c,2.5\nc,a,4\n");
    let v = json(&graphsci(&["ingest", "--input", s(&input)]));
    assert_eq!(v["valid"], true);
    assert_eq!(v["rows"], 3);
    assert_eq!(v["nodes"], 3);
    assert_eq!(v["edges"], 3);
    assert_eq!(v["duplicates_resolved"], 0);
    assert_eq!(v["self_loops_dropped"], 0);
}

#[test]
fn ingest_cites_bad_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.csv", "Source,Target,weight\na,b,1\nb,c,heavy\n");
    let out = graphsci(&["ingest", "--input", s(&input)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 2"), "{err}");
    assert!(out.stdout.is_empty());

    let header = write(dir.path(), "header.csv", "src,dst,w\na,b,1\n");
    assert!(!graphsci(&["ingest", "--input", s(&header)]).status.success());
}

#[test]
fn ingest_sample_matches_line_count_and_dedup() {
    let text = fs::read_to_string(sample()).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let mut pairs = BTreeSet::new();
    let mut nodes = BTreeSet::new();
    for r in &rows {
        nodes.insert(r[0]);
        nodes.insert(r[1]);
        if r[0] != r[1] {
            pairs.insert((r[0].min(r[1]), r[0].max(r[1])));
        }
    }
    let v = json(&graphsci(&["ingest", "--input", s(&sample()), "--validate-only"]));
    assert_eq!(v["rows"], rows.len());
    assert_eq!(v["nodes"], nodes.len());
    assert_eq!(v["edges"], pairs.len());
    assert_eq!(v["duplicates_resolved"], rows.len() - pairs.len());
}

#[test]
fn ingest_writes_deduplicated_edges() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "dup.csv", "Source,Target,weight\na,b,1\nb,a,3\nc,c,1\n");
    let out = dir.path().join("clean.csv");
    json(&graphsci(&["ingest", "--input", s(&input), "--out", s(&out)]));
    assert_eq!(fs::read_to_string(&out).unwrap(), "Source,Target,weight\na,b,3\n");
    let skipped = dir.path().join("skipped.csv");
    json(&graphsci(&[
        "ingest",
        "--input",
        s(&input),
        "--out",
        s(&skipped),
        "--validate-only",
    ]));
    assert!(!skipped.exists());
}

#[test]
fn q2_on_star_names_the_center() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = std::iter::once("Source,Target,weight\n".to_string())
        .chain((1..=6).map(|i| format!("hub,leaf{i},1\n")))
        .collect();
    let input = write(dir.path(), "star.csv", &body);
    let v = json(&graphsci(&["query", "q2", "--input", s(&input)]));
    for r in v["results"].as_array().unwrap() {
        let scores = r["scores"].as_array().unwrap();
        assert_eq!(scores.len(), 1);
        assert_eq!(scores[0]["node"], "hub");
    }
}

#[test]
fn q3_on_two_triangles_finds_two_communities() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "tri.csv",
        "Source,Target,weight\na,b,1\nb,c,1\nc,a,1\nx,y,1\ny,z,1\nz,x,1\n",
    );
    let v = json(&graphsci(&["query", "q3", "--input", s(&input), "--seed", "4"]));
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    for r in results {
        assert_eq!(r["community_count"], 2);
        let mut members: Vec<Vec<String>> = serde_json::from_value(r["members"].clone()).unwrap();
        for m in &mut members {
            m.sort();
        }
        members.sort();
        assert_eq!(members, vec![vec!["a", "b", "c"], vec!["x", "y", "z"]]);
    }
}

#[test]
fn q1_equals_library_composition() {
    let (g, _) = Graph::from_csv_path(sample()).unwrap();
    let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
    let bc = betweenness(&g);
    let v = json(&graphsci(&["query", "q1", "--input", s(&sample()), "--k", "5"]));
    let results = v["results"].as_array().unwrap();
    assert_eq!(results[0]["algorithm"], "pagerank");
    assert_eq!(results[1]["algorithm"], "betweenness");
    for (r, scores) in results.iter().zip([&pr, &bc]) {
        let expected = serde_json::to_value(top_k(scores, 5)).unwrap();
        assert_eq!(r["scores"], expected);
    }
    assert_eq!(results[0]["config"]["damping"], 0.85);
    assert_eq!(results[0]["config"]["max_iterations"], 20);
}

#[test]
fn q4_leading_nodes_lie_within_depth_bound() {
    let v = json(&graphsci(&["query", "q4", "--input", s(&sample()), "--k", "4"]));
    let depths: Vec<u64> = serde_json::from_value(v["bfs"]["depths"].clone()).unwrap();
    assert!(depths.iter().all(|&d| d <= 5));
    assert!(depths.windows(2).all(|w| w[0] <= w[1]));
    let leading = v["leading"].as_array().unwrap();
    assert_eq!(leading.len(), 4);
    let degrees: Vec<u64> = leading.iter().map(|l| l["mst_degree"].as_u64().unwrap()).collect();
    assert!(degrees.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(v["bfs"]["start"], v["mst"]["start"]);
}

fn planted_csv(dir: &Path) -> PathBuf {
    let g = graphsci_core::generate::planted_partition(2, 40, 0.3, 0.02, 5).unwrap();
    let mut body = String::from("Source,Target,weight\n");
    for (u, v, w) in graphsci_core::Topology::edge_list(&g) {
        body.push_str(&format!(
            "{},{},{}\n",
            graphsci_core::Topology::name(&g, u),
            graphsci_core::Topology::name(&g, v),
            w
        ));
    }
    write(dir, "planted.csv", &body)
}

#[test]
fn predict_single_feature_gets_full_importance() {
    let dir = tempfile::tempdir().unwrap();
    let input = planted_csv(dir.path());
    let config = write(
        dir.path(),
        "m1.toml",
        "name = \"m1\"\nfeatures = [\"common_neighbors\"]\n[forest]\nn_trees = 20\n",
    );
    let v = json(&graphsci(&["predict", "--input", s(&input), "--config", s(&config)]));
    let imp = &v["models"][0]["report"]["importances"];
    assert_eq!(imp.as_array().unwrap().len(), 1);
    assert_eq!(imp[0]["feature"], "common_neighbors");
    assert_eq!(imp[0]["importance"], 1.0);
}

#[test]
fn predict_report_recomputes_from_score_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = planted_csv(dir.path());
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/models.toml");
    let scores_path = dir.path().join("scores.csv");
    let v = json(&graphsci(&[
        "predict",
        "--input",
        s(&input),
        "--config",
        s(&config),
        "--out",
        s(&scores_path),
    ]));
    let text = fs::read_to_string(&scores_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("model,source,target,label,score"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    for m in v["models"].as_array().unwrap() {
        let name = m["name"].as_str().unwrap();
        let mine: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == name).collect();
        let labels: Vec<bool> = mine.iter().map(|r| r[3] == "1").collect();
        let scores: Vec<f64> = mine.iter().map(|r| r[4].parse().unwrap()).collect();
        let report = evaluate(&scores, &labels, 0.5).unwrap();
        assert_eq!(m["report"]["auc"].as_f64().unwrap(), auc(&scores, &labels).unwrap());
        assert_eq!(m["report"]["accuracy"].as_f64().unwrap(), report.accuracy);
        assert_eq!(m["report"]["precision"].as_f64().unwrap(), report.precision);
        assert_eq!(m["report"]["recall"].as_f64().unwrap(), report.recall);
    }
}

#[test]
fn predict_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let input = planted_csv(dir.path());
    let config = write(dir.path(), "bad.toml", "name = \"x\"\nlearning_rate = 3\n");
    let out = graphsci(&["predict", "--input", s(&input), "--config", s(&config)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("learning_rate"));
}

#[test]
fn bench_writes_report_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("bench");
    let v = json(&graphsci(&[
        "bench",
        "--input",
        s(&sample()),
        "--algorithm",
        "pagerank",
        "--repetitions",
        "2",
        "--out",
        s(&out_dir),
    ]));
    assert_eq!(v[0]["algorithm"], "pagerank");
    assert_eq!(v[0]["repetitions"], 2);
    let mut files: Vec<PathBuf> = fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 2);
    let log = files.iter().find(|p| p.extension().unwrap() == "log").unwrap();
    let report = files.iter().find(|p| p.extension().unwrap() == "json").unwrap();
    let samples = parse_raw_log(&fs::read_to_string(log).unwrap()).unwrap();
    let report: Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(samples.len(), 2);
    assert_eq!(report["first_run_seconds"].as_f64().unwrap(), samples[0]);
    assert_eq!(report["subsequent_mean_seconds"].as_f64().unwrap(), samples[1]);
    assert_eq!(report["subsequent_std_seconds"].as_f64().unwrap(), 0.0);
}

#[test]
fn bench_rejects_unknown_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let out = graphsci(&[
        "bench",
        "--input",
        s(&sample()),
        "--algorithm",
        "dijkstra",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dijkstra"));
}

#[test]
fn table_format_is_human_readable() {
    let out = graphsci(&["--format", "table", "query", "q2", "--input", s(&sample()), "--k", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("pagerank") && text.contains("betweenness"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}

#[test]
fn generate_round_trips_through_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.csv");
    let out = graphsci(&[
        "generate",
        "--nodes",
        "50",
        "--edges",
        "120",
        "--duplicates",
        "4",
        "--seed",
        "2",
        "--out",
        s(&path),
    ]);
    assert!(out.status.success());
    let v = json(&graphsci(&["ingest", "--input", s(&path)]));
    assert_eq!(v["rows"], 124);
    assert_eq!(v["edges"], 120);
    assert_eq!(v["duplicates_resolved"], 4);
}
