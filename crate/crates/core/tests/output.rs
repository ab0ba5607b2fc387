use sirtail_core::asymptotics::poisson_tail_constant;
use sirtail_core::fading::FadingModel;
use sirtail_core::montecarlo::{scaled_tail_curve, TailConfig, WindowPolicy};
use sirtail_core::output::{to_json, write_tail_csv, CSV_HEADER, SCHEMA};
use sirtail_core::pathloss::PathLossModel;
use sirtail_core::pointproc::ProcessModel;

fn config() -> TailConfig {
    TailConfig {
        process: ProcessModel::Ginibre { alpha: 0.5 },
        fading: FadingModel::Nakagami { m: 2.0 },
        pathloss: PathLossModel::BoundedPowerLog { d: 2, beta: 2.5, a: 1.0 },
        window: WindowPolicy::default(),
        n: 2_000,
        seed: 77,
    }
}

#[test]
fn rerunning_a_config_reproduces_the_file() {
    let render = |c: &TailConfig| {
        let curve = scaled_tail_curve(c, &[2.0, 20.0]).unwrap();
        let mut buf = Vec::new();
        write_tail_csv(&mut buf, c, &curve.estimates).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let first = render(&config());
    // the embedded config alone is enough to regenerate the file
    let line = first.lines().next().unwrap();
    let json = line.strip_prefix(&format!("# {SCHEMA} config=")).unwrap();
    let parsed: TailConfig = serde_json::from_str(json).unwrap();
    assert_eq!(parsed, config());
    assert_eq!(render(&parsed), first);
    assert_eq!(first.lines().nth(1).unwrap(), CSV_HEADER.join(","));
    assert!(first.lines().nth(2).unwrap().ends_with("z^(1/beta)*(d*beta/ln z)^(a/beta)"));
}

#[test]
fn json_envelope() {
    let c = poisson_tail_constant(2.0).unwrap();
    let text = to_json(&serde_json::json!({"beta": 2.0}), &c).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    assert_eq!(v["config"]["beta"], 2.0);
    assert!((v["result"]["value"].as_f64().unwrap() - std::f64::consts::FRAC_2_PI).abs() < 1e-9);
    assert_eq!(v["result"]["abs_error_estimate"], 0.0);
}
