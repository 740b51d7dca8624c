//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;

use nsbox::audit;
use nsbox::decompose::{full_canonical, local_content, local_membership, Tag};
use nsbox::measures::{bell_strengths, MeasureReport};
use nsbox::ns::{NsBox, Vertex};
use nsbox::quantum::{born_box, Paulis};
use nsbox::sampling::Sampler;
use nsbox::scenarios::{self, piecewise_forms};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

const ME_POINTS: [f64; 4] = [0.5, 0.64, 0.75, 1.0];

fn max_entangled(p: f64) -> NsBox {
    scenarios::find("max-entangled")
        .unwrap()
        .born_box(p)
        .unwrap()
}

fn c1() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in ME_POINTS {
        let r = MeasureReport::new(&max_entangled(p));
        let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
        for (got, want) in [
            (r.bell[0][0], 2.0 * (a + b)),
            (r.mermin[1][1], 2.0 * a),
            (r.g, 4.0 * b),
            (r.q, 2.0 * (a - b)),
            (r.t, 2.0 * (a + b)),
            (r.c, 0.0),
        ] {
            worst = worst.max((got - want).abs());
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max deviation {worst:.3e} over p in {ME_POINTS:?}"),
    )
}

fn c2() -> Outcome {
    let r = MeasureReport::new(&max_entangled(0.5));
    let d = (r.bell[0][0] - 2.0 * 2f64.sqrt()).abs();
    let tsirelson = d <= 1e-10 && r.chsh_violated;
    let r1 = MeasureReport::new(&max_entangled(1.0));
    let m = (r1.mermin[1][1] - 2.0).abs();
    let mermin = m <= 1e-10 && r1.steering_violated && !r1.chsh_violated;
    outcome(
        tsirelson && mermin,
        format!(
            "|B00 - 2sqrt2| = {d:.3e}, chsh {}; |M11 - 2| = {m:.3e}, steering {}, chsh {}",
            r.chsh_violated, r1.steering_violated, r1.chsh_violated
        ),
    )
}

fn c3() -> Outcome {
    let p = Paulis::standard();
    let rows = audit::scenario_audit(11, 1e-9, &p, &p).unwrap();
    let worst = rows
        .iter()
        .map(|r| r.max_abs_deviation.max(r.additivity_deviation))
        .fold(0.0, f64::max);
    let failed: Vec<&str> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.scenario.as_str())
        .collect();

    // Both branches of every piecewise form, at and around the boundary.
    let mut branch: f64 = 0.0;
    for pw in piecewise_forms() {
        let spec = scenarios::find(pw.scenario).unwrap();
        branch = branch.max(((pw.left)(pw.boundary) - (pw.right)(pw.boundary)).abs());
        for x in [pw.boundary - 0.05, pw.boundary, pw.boundary + 0.05] {
            let r = MeasureReport::new(&spec.born_box(x).unwrap());
            branch = branch.max((pw.field.value(&r) - pw.eval(x)).abs());
        }
    }
    outcome(
        failed.is_empty() && rows.len() == 16 && branch <= 1e-8,
        format!(
            "{} families x 11 points, max deviation {worst:.3e}; piecewise branches {branch:.3e}; failing {failed:?}",
            rows.len()
        ),
    )
}

fn c4() -> Outcome {
    let mut s = Sampler::new(0xA4);
    let mut min_slack = f64::INFINITY;
    for _ in 0..10_000 {
        let r = MeasureReport::new(&s.quantum_box());
        min_slack = min_slack.min(4.0 - (r.g + 2.0 * r.q));
    }
    outcome(
        min_slack >= -1e-7,
        format!("10000 quantum boxes, min slack {min_slack:.6}"),
    )
}

fn c5() -> Outcome {
    let mut s = Sampler::new(0xA5);
    let mut disagreements = 0;
    let mut violating = 0;
    for _ in 0..10_000 {
        let b = s.ns_box();
        let max_b = bell_strengths(&b.correlators())
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max);
        let feasible = local_membership(&b).unwrap().feasible;
        if max_b > 2.0 {
            violating += 1;
        }
        if feasible != (max_b <= 2.0 + 1e-7) && (max_b - 2.0).abs() > 1e-7 {
            disagreements += 1;
        }
    }
    outcome(
        disagreements == 0,
        format!("10000 boxes ({violating} outside the facets), {disagreements} disagreements"),
    )
}

fn c6() -> Outcome {
    let mut s = Sampler::new(0xA6);
    let mut worst_product: f64 = 0.0;
    for _ in 0..1_000 {
        let st = s.product_state();
        let set = s.settings();
        worst_product = worst_product.max(MeasureReport::new(&born_box(&st, &set).unwrap()).t);
    }
    let mut min_other = f64::INFINITY;
    let mut seen = 0;
    while seen < 1_000 {
        let b = s.ns_box();
        if b.is_product(1e-9) {
            continue;
        }
        seen += 1;
        min_other = min_other.min(MeasureReport::new(&b).t);
    }
    outcome(
        worst_product <= 1e-9 && min_other > 1e-6,
        format!("product max T {worst_product:.3e}; non-product min T {min_other:.6}"),
    )
}

fn c7() -> Outcome {
    let mut s = Sampler::new(0xA7);
    let mut worst: f64 = 0.0;
    for k in 0..1_000 {
        let b = if k % 2 == 0 {
            s.ns_box()
        } else {
            s.quantum_box()
        };
        let op = s.lro();
        let (r0, r1) = (
            MeasureReport::new(&b),
            MeasureReport::new(&b.apply_lro(&op)),
        );
        worst = worst
            .max((r0.g - r1.g).abs())
            .max((r0.q - r1.q).abs())
            .max((r0.t - r1.t).abs());
    }
    outcome(
        worst <= 1e-10,
        format!("1000 (box, relabeling) pairs, max change {worst:.3e}"),
    )
}

fn c8() -> Outcome {
    let mut weights: f64 = 0.0;
    let mut me_ok = true;
    for p in ME_POINTS {
        match full_canonical(&max_entangled(p)) {
            Ok(d) => {
                let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
                weights = weights
                    .max((d.weight(Tag::PRPart) - b).abs())
                    .max((d.weight(Tag::MerminPart) - (a - b)).abs());
            }
            Err(_) => me_ok = false,
        }
    }
    let rows = audit::decomposition_audit(11).unwrap();
    let (mut g, mut q, mut rec, mut w): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for r in &rows {
        g = g.max(r.residual_g);
        q = q.max(r.residual_q);
        rec = rec.max(r.reconstruction_error);
        w = w.max(r.weight_deviation);
    }
    let pass = me_ok && weights <= 1e-8 && rows.iter().all(|r| r.pass);
    outcome(
        pass,
        format!(
            "max-entangled weights {weights:.3e}; {} scenarios: residual G {g:.3e}, Q {q:.3e}, reconstruction {rec:.3e}, weights {w:.3e}",
            rows.len()
        ),
    )
}

fn c9() -> Outcome {
    let cases = [
        (
            "deterministic",
            NsBox::vertex(&Vertex::Deterministic {
                alpha: 1,
                beta: 0,
                gamma: 1,
                epsilon: 1,
            }),
            1.0,
        ),
        ("PR", NsBox::pr(0, 0, 0), 0.0),
        (
            "isotropic PR 0.75",
            NsBox::pr(0, 0, 0).with_noise(0.75).unwrap(),
            0.5,
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, b, want) in &cases {
        let got = local_content(b).unwrap().objective;
        worst = worst.max((got - want).abs());
        parts.push(format!("{name} {got:.9}"));
    }
    outcome(worst <= 1e-7, parts.join(", "))
}

fn c10() -> Outcome {
    let mut s = Sampler::new(0xAA);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let (p1, p2, l) = (s.ns_box(), s.ns_box(), s.unit());
        let m = NsBox::mix(&[p1, p2], &[l, 1.0 - l]).unwrap();
        let (bm, b1, b2) = (
            bell_strengths(&m.correlators()),
            bell_strengths(&p1.correlators()),
            bell_strengths(&p2.correlators()),
        );
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max(bm[a][b] - (l * b1[a][b] + (1.0 - l) * b2[a][b]));
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("10000 triples, max excess {worst:.3e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("maximally entangled sweep", c1),
        ("Tsirelson and Mermin points", c2),
        ("scenario closed forms", c3),
        ("monogamy G+2Q<=4", c4),
        ("facet/LP equivalence", c5),
        ("T characterization", c6),
        ("relabeling invariance", c7),
        ("canonical decompositions", c8),
        ("local content", c9),
        ("Bell subadditivity", c10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
