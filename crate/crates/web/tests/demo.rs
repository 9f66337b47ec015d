use bpdirac_web::{basis_curves_json, spectrum_json, two_photon_json};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn curves_sum_to_one() {
    for (kind, order, count, n) in [("bpoly", 12, 0, 13), ("bspline", 5, 14, 14)] {
        let v = parse(basis_curves_json(kind, order, count, 10.0, 41));
        let curves: Vec<Vec<f64>> = v["curves"].as_array().unwrap().iter().map(floats).collect();
        assert_eq!(curves.len(), n);
        let r = floats(&v["r"]);
        assert_eq!((r[0], r[40]), (0.0, 10.0));
        for i in 0..r.len() - 1 {
            let s: f64 = curves.iter().map(|c| c[i]).sum();
            assert!((s - 1.0).abs() < 1e-12, "{kind} at r = {}: {s}", r[i]);
        }
    }
    assert!(basis_curves_json("chebyshev", 4, 0, 1.0, 5).is_err());
}

#[test]
fn levels_follow_closed_form() {
    let v = parse(spectrum_json(1.0, -1, 24, 30.0, 24, 3));
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    assert_eq!(levels[0]["state"], "1s1/2");
    assert!(levels[0]["rel_diff"].as_f64().unwrap() < 1e-9);
    let p = parse(spectrum_json(1.0, 1, 24, 30.0, 24, 3));
    assert_eq!(p["levels"][0]["state"], "2p1/2");
    assert!(spectrum_json(1.0, 0, 24, 30.0, 24, 3).is_err());
}

#[test]
fn photon_spectrum_is_symmetric() {
    let v = parse(two_photon_json(1.0, 20, 30.0, 24, 10));
    let (vel, len) = (floats(&v["velocity"]), floats(&v["length"]));
    assert_eq!(vel.len(), 9);
    for j in 0..vel.len() {
        let k = vel.len() - 1 - j;
        assert!((vel[j] / vel[k] - 1.0).abs() < 1e-12);
        assert!((len[j] / vel[j] - 1.0).abs() < 1e-4);
    }
    let total: f64 = v["total_length"].as_str().unwrap().parse().unwrap();
    assert!((total / 8.229 - 1.0).abs() < 1e-3, "{total}");
}
