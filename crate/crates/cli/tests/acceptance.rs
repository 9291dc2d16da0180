//! One PASS/FAIL line per acceptance criterion. Exits 0 regardless unless
//! `ACCEPTANCE_STRICT=1` is set, so known failures stay visible without
//! breaking the workspace test run.

use std::process::Command;
use std::time::{Duration, Instant};

use orbitlab::battery::{self, Row};

struct Check {
    criterion: u32,
    run: fn() -> Row,
    limit: Option<Duration>,
}

fn battery_json(dir: &std::path::Path) -> Result<serde_json::Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_orbitlab"))
        .args(["battery", "--out"])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(dir.join("battery.json")).map_err(|e| e.to_string())?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    v.as_object_mut()
        .ok_or("report is not an object")?
        .remove("timestamp");
    v["stdout"] = serde_json::Value::String(String::from_utf8_lossy(&out.stdout).into_owned());
    Ok(v)
}

fn determinism() -> Row {
    let tmp = tempfile::tempdir().expect("temp dir");
    let a = battery_json(&tmp.path().join("a"));
    let b = battery_json(&tmp.path().join("b"));
    let (pass, observed) = match (a, b) {
        (Ok(a), Ok(b)) if a == b => (true, "identical battery.json and stdout".to_string()),
        (Ok(_), Ok(_)) => (false, "reports differ".to_string()),
        (Err(e), _) | (_, Err(e)) => (false, e),
    };
    Row {
        criterion: 12,
        name: "two battery runs agree".into(),
        expected: "identical reports, timestamp excluded".into(),
        observed,
        pass,
    }
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let checks = [
        Check {
            criterion: 1,
            run: battery::criterion_1,
            limit: secs(1),
        },
        Check {
            criterion: 2,
            run: battery::criterion_2,
            limit: None,
        },
        Check {
            criterion: 3,
            run: battery::criterion_3,
            limit: secs(1),
        },
        Check {
            criterion: 4,
            run: battery::criterion_4,
            limit: secs(60),
        },
        Check {
            criterion: 5,
            run: battery::criterion_5,
            limit: None,
        },
        Check {
            criterion: 6,
            run: battery::criterion_6,
            limit: None,
        },
        Check {
            criterion: 7,
            run: battery::criterion_7,
            limit: None,
        },
        Check {
            criterion: 8,
            run: battery::criterion_8,
            limit: None,
        },
        Check {
            criterion: 9,
            run: battery::criterion_9,
            limit: secs(30),
        },
        Check {
            criterion: 10,
            run: battery::criterion_10,
            limit: None,
        },
        Check {
            criterion: 11,
            run: battery::criterion_11,
            limit: None,
        },
        Check {
            criterion: 12,
            run: determinism,
            limit: None,
        },
    ];
    let mut failed = 0;
    for c in &checks {
        let t = Instant::now();
        let row = (c.run)();
        let took = t.elapsed();
        assert_eq!(row.criterion, c.criterion);
        let in_time = c.limit.is_none_or(|l| took < l);
        let pass = row.pass && in_time;
        if !pass {
            failed += 1;
        }
        let limit = c
            .limit
            .map(|l| format!(" (limit {}s)", l.as_secs()))
            .unwrap_or_default();
        println!(
            "criterion {:>2}: {} {} [{:.2}s{limit}] expected {}; observed {}",
            c.criterion,
            if pass { "PASS" } else { "FAIL" },
            row.name,
            took.as_secs_f64(),
            row.expected,
            row.observed
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
