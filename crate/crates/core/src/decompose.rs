//! Canonical convex decompositions and linear-programming analysis of the local
//! (Bell) polytope.
//!
//! The canonical decompositions first rotate the box with a local reversible
//! operation so that its largest signed Bell value sits at label `(0,0,0)`, then
//! peel off a PR part of weight `G/4` and a Mermin part of weight `Q/2`. The
//! components are reported in the frame of the input box.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{lp_solve, Constraint, LpStatus};
use crate::measures::{bell_discord_of, bell_value, mermin_discord_of};
use crate::ns::{indices, max_abs_diff, CorrelatorForm, Lro, NsBox, Probs, Vertex};

/// Most negative residual entry accepted (and clamped to zero).
pub const RESIDUAL_NEG_TOL: f64 = 1e-7;
/// Largest `G` or `Q` a residual may carry and still count as local and pure.
pub const RESIDUAL_PURITY_TOL: f64 = 1e-7;
/// Below this remaining weight the residual is dropped.
pub const DEGENERATE_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    PRPart,
    MerminPart,
    LocalResidual,
    NoisePart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    pub component: NsBox,
    pub tag: Tag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub terms: Vec<Term>,
    pub degenerate: bool,
    /// The operation that brought the input into canonical orientation.
    pub orientation: Lro,
    /// `gamma` of the Mermin part `(P_PR^000 + P_PR^11gamma) / 2`, in the oriented frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mermin_gamma: Option<u8>,
}

impl Decomposition {
    /// Total weight carried by terms with `tag`.
    pub fn weight(&self, tag: Tag) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.tag == tag)
            .map(|t| t.weight)
            .sum()
    }

    pub fn component(&self, tag: Tag) -> Option<&NsBox> {
        self.terms
            .iter()
            .find(|t| t.tag == tag)
            .map(|t| &t.component)
    }

    /// Weighted sum of the components.
    pub fn reconstruct(&self) -> Probs {
        let mut out = [[[[0.0; 2]; 2]; 2]; 2];
        for t in &self.terms {
            for [i, j, m, n] in indices() {
                out[i][j][m][n] += t.weight * t.component.p(i, j, m, n);
            }
        }
        out
    }
}

/// The affine split behind the canonical decompositions, computed without any
/// validity requirement on the residual.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSplit {
    pub orientation: Lro,
    /// `G / 4`.
    pub pr_weight: f64,
    /// `Q / 2` (zero for the Bell-only split).
    pub mermin_weight: f64,
    pub mermin_gamma: Option<u8>,
    /// PR part in the input frame.
    pub pr: NsBox,
    /// Mermin part in the input frame.
    pub mermin: Option<NsBox>,
    /// Normalised remainder in the input frame; may have negative entries.
    /// `None` when the split is degenerate.
    pub residual: Option<Probs>,
    pub residual_g: f64,
    pub residual_q: f64,
    pub residual_min: f64,
    pub degenerate: bool,
}

impl CanonicalSplit {
    pub fn residual_weight(&self) -> f64 {
        1.0 - self.pr_weight - self.mermin_weight
    }

    /// Weighted sum of the parts; reproduces the input whenever the split is
    /// not degenerate.
    pub fn reconstruct(&self) -> Probs {
        let mut out = [[[[0.0; 2]; 2]; 2]; 2];
        let rw = self.residual_weight();
        for [i, j, m, n] in indices() {
            let mut v = self.pr_weight * self.pr.p(i, j, m, n);
            if let Some(mb) = &self.mermin {
                v += self.mermin_weight * mb.p(i, j, m, n);
            }
            if let Some(r) = &self.residual {
                v += rw * r[i][j][m][n];
            }
            out[i][j][m][n] = v;
        }
        out
    }
}

/// Signed Bell label `(alpha, beta, gamma)` with the largest value; ties go to the
/// lexicographically smallest label.
pub fn dominant_bell_label(b: &NsBox) -> (u8, u8, u8) {
    let c = b.correlators();
    let values: Vec<((u8, u8, u8), f64)> = (0..8u8)
        .map(|k| {
            let l = (k >> 2, (k >> 1) & 1, k & 1);
            (l, bell_value(&c, l.0, l.1, l.2))
        })
        .collect();
    let max = values.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .find(|x| x.1 >= max - TIE_TOL)
        .map(|x| x.0)
        .unwrap_or((0, 0, 0))
}

/// First operation, in code order, that takes `P_PR^{alpha beta gamma}` to
/// `P_PR^000` and so moves the dominant Bell value of `b` to label `(0,0,0)`.
pub fn canonical_orientation(b: &NsBox) -> Lro {
    let (a, be, g) = dominant_bell_label(b);
    let source = NsBox::pr(a, be, g);
    let target = NsBox::pr(0, 0, 0);
    Lro::all()
        .find(|op| source.apply_lro(op) == target)
        .expect("the relabeling group acts transitively on PR boxes")
}

fn scaled_add(acc: &mut Probs, w: f64, p: &Probs) {
    for [i, j, m, n] in indices() {
        acc[i][j][m][n] += w * p[i][j][m][n];
    }
}

fn min_entry(p: &Probs) -> f64 {
    p.iter()
        .flatten()
        .flatten()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn mermin_part(gamma: u8) -> NsBox {
    NsBox::mix(&[NsBox::pr(0, 0, 0), NsBox::pr(1, 1, gamma)], &[0.5, 0.5])
        .expect("average of two PR boxes")
}

fn split(b: &NsBox, with_mermin: bool) -> CanonicalSplit {
    let orientation = canonical_orientation(b);
    let back = orientation.inverse();
    let oriented = b.apply_lro(&orientation);
    let c = oriented.correlators();
    let pr_weight = bell_discord_of(&c) / 4.0;
    let mermin_weight = if with_mermin {
        mermin_discord_of(&c) / 2.0
    } else {
        0.0
    };
    let rest = 1.0 - pr_weight - mermin_weight;
    let degenerate = rest < DEGENERATE_TOL;
    let pr0 = NsBox::pr(0, 0, 0);

    let remainder = |mermin: Option<&NsBox>| -> Probs {
        let mut r = *oriented.probs();
        scaled_add(&mut r, -pr_weight, pr0.probs());
        if let Some(mb) = mermin {
            scaled_add(&mut r, -mermin_weight, mb.probs());
        }
        if !degenerate {
            for [i, j, m, n] in indices() {
                r[i][j][m][n] /= rest;
            }
        }
        r
    };

    let (gamma, mermin_oriented, residual_oriented) = if with_mermin {
        let m0 = mermin_part(0);
        let m1 = mermin_part(1);
        let r0 = remainder(Some(&m0));
        let r1 = remainder(Some(&m1));
        if min_entry(&r1) > min_entry(&r0) + TIE_TOL {
            (Some(1), Some(m1), r1)
        } else {
            (Some(0), Some(m0), r0)
        }
    } else {
        (None, None, remainder(None))
    };

    let residual = (!degenerate).then(|| back.apply_to_probs(&residual_oriented));
    let (residual_g, residual_q, residual_min) = match &residual {
        Some(r) => {
            let rc = CorrelatorForm::from_probs(r);
            (bell_discord_of(&rc), mermin_discord_of(&rc), min_entry(r))
        }
        None => (0.0, 0.0, 0.0),
    };

    CanonicalSplit {
        orientation,
        pr_weight,
        mermin_weight,
        mermin_gamma: gamma,
        pr: pr0.apply_lro(&back),
        mermin: mermin_oriented.map(|m| m.apply_lro(&back)),
        residual,
        residual_g,
        residual_q,
        residual_min,
        degenerate,
    }
}

/// Bell-only canonical split of `b` (PR part plus remainder).
pub fn bell_split(b: &NsBox) -> CanonicalSplit {
    split(b, false)
}

/// Canonical split of `b` into PR part, Mermin part and remainder.
pub fn canonical_split(b: &NsBox) -> CanonicalSplit {
    split(b, true)
}

fn into_decomposition(s: CanonicalSplit, check_q: bool) -> Result<Decomposition> {
    let rest = s.residual_weight();
    if rest < -DEGENERATE_TOL {
        return Err(Error::ResidualInvalid(format!(
            "part weights sum to {} > 1",
            s.pr_weight + s.mermin_weight
        )));
    }
    let mut terms = vec![Term {
        weight: s.pr_weight,
        component: s.pr,
        tag: Tag::PRPart,
    }];
    if let Some(mb) = s.mermin {
        terms.push(Term {
            weight: s.mermin_weight,
            component: mb,
            tag: Tag::MerminPart,
        });
    }
    if let Some(r) = s.residual {
        if let Some(idx) = indices().find(|&[i, j, m, n]| r[i][j][m][n] < -RESIDUAL_NEG_TOL) {
            let [i, j, m, n] = idx;
            return Err(Error::ResidualInvalid(format!(
                "entry {idx:?} = {:e}",
                r[i][j][m][n]
            )));
        }
        if s.residual_g > RESIDUAL_PURITY_TOL {
            return Err(Error::ResidualInvalid(format!(
                "remainder keeps Bell discord {:e}",
                s.residual_g
            )));
        }
        if check_q && s.residual_q > RESIDUAL_PURITY_TOL {
            return Err(Error::ResidualInvalid(format!(
                "remainder keeps Mermin discord {:e}",
                s.residual_q
            )));
        }
        let component = NsBox::with_tolerance(r, RESIDUAL_NEG_TOL)
            .map_err(|e| Error::ResidualInvalid(e.to_string()))?;
        terms.push(Term {
            weight: rest,
            component,
            tag: Tag::LocalResidual,
        });
    }
    Ok(Decomposition {
        terms,
        degenerate: s.degenerate,
        orientation: s.orientation,
        mermin_gamma: s.mermin_gamma,
    })
}

/// `b = G' P_PR + (1 - G') P_L` with `G' = G/4`.
pub fn bell_canonical(b: &NsBox) -> Result<Decomposition> {
    into_decomposition(bell_split(b), false)
}

/// `b = G' P_PR + Q' P_M + (1 - G' - Q') P_L` with `G' = G/4`, `Q' = Q/2`.
pub fn full_canonical(b: &NsBox) -> Result<Decomposition> {
    into_decomposition(canonical_split(b), true)
}

/// Outcome of a local-polytope linear program. `weights[l]` is the weight of the
/// deterministic box with label `l = 8 alpha + 4 beta + 2 gamma + epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpResult {
    pub feasible: bool,
    pub objective: f64,
    pub weights: [f64; 16],
    pub iterations: usize,
}

impl LpResult {
    /// `sum_l weights[l] P_D^l`.
    pub fn combination(&self) -> Probs {
        let mut out = [[[[0.0; 2]; 2]; 2]; 2];
        for (w, d) in self.weights.iter().zip(deterministic_boxes()) {
            scaled_add(&mut out, *w, d.probs());
        }
        out
    }
}

fn deterministic_boxes() -> Vec<NsBox> {
    Vertex::all_deterministic()
        .map(|v| NsBox::vertex(&v))
        .collect()
}

fn entry_rows(rhs: &Probs) -> Vec<Constraint> {
    let dets = deterministic_boxes();
    indices()
        .map(|[i, j, m, n]| {
            Constraint::new(
                dets.iter().map(|d| d.p(i, j, m, n)).collect(),
                rhs[i][j][m][n],
            )
        })
        .collect()
}

fn to_weights(x: &[f64]) -> [f64; 16] {
    let mut w = [0.0; 16];
    w.copy_from_slice(x);
    w
}

/// Feasibility of `sum q_l P_D^l = b`, `sum q_l = 1`, `q >= 0`.
pub fn local_membership(b: &NsBox) -> Result<LpResult> {
    let mut eq = vec![Constraint::new(vec![1.0; 16], 1.0)];
    eq.extend(entry_rows(b.probs()));
    let sol = lp_solve(&[0.0; 16], &eq, &[])?;
    let feasible = sol.status == LpStatus::Optimal;
    Ok(LpResult {
        feasible,
        objective: if feasible { 1.0 } else { 0.0 },
        weights: to_weights(&sol.x),
        iterations: sol.iterations,
    })
}

/// Largest total weight of deterministic boxes that fits under `b` entrywise.
pub fn local_content(b: &NsBox) -> Result<LpResult> {
    let sol = lp_solve(&[1.0; 16], &[], &entry_rows(b.probs()))?;
    Ok(LpResult {
        feasible: sol.status == LpStatus::Optimal,
        objective: sol.objective.clamp(0.0, 1.0),
        weights: to_weights(&sol.x),
        iterations: sol.iterations,
    })
}

/// Largest entrywise gap between `b` and the recombined decomposition.
pub fn reconstruction_error(b: &NsBox, d: &Decomposition) -> f64 {
    max_abs_diff(b.probs(), &d.reconstruct())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{bell_discord, mermin_discord};
    use approx::assert_abs_diff_eq;

    fn iso_pr(p: f64) -> NsBox {
        NsBox::pr(0, 0, 0).with_noise(p).unwrap()
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(canonical_orientation(&NsBox::pr(0, 0, 0)), Lro::identity());
        assert_eq!(
            canonical_orientation(&NsBox::white_noise()),
            Lro::identity()
        );
        let g = canonical_orientation(&NsBox::pr(0, 0, 1));
        assert_eq!(NsBox::pr(0, 0, 1).apply_lro(&g), NsBox::pr(0, 0, 0));
        let flip = Lro {
            bob: crate::ns::LocalRelabel {
                flip_input: false,
                alpha: false,
                beta: true,
            },
            ..Lro::identity()
        };
        assert_eq!(g, flip);
    }

    #[test]
    fn orientation_of_every_pr_box() {
        for v in Vertex::all_pr() {
            let b = NsBox::vertex(&v);
            let g = canonical_orientation(&b);
            assert_eq!(b.apply_lro(&g), NsBox::pr(0, 0, 0), "{v:?}");
            // No earlier code works.
            for op in Lro::all().take_while(|op| op.code() < g.code()) {
                assert_ne!(b.apply_lro(&op), NsBox::pr(0, 0, 0));
            }
        }
    }

    #[test]
    fn orientation_moves_dominant_value_to_origin() {
        let b = NsBox::mix(
            &[NsBox::pr(1, 1, 0), NsBox::deterministic(1, 0, 0, 1)],
            &[0.7, 0.3],
        )
        .unwrap();
        let oriented = b.apply_lro(&canonical_orientation(&b));
        let c = oriented.correlators();
        let best = (0..8u8)
            .map(|k| bell_value(&c, k >> 2, (k >> 1) & 1, k & 1))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(bell_value(&c, 0, 0, 0), best, epsilon = 1e-12);
    }

    #[test]
    fn bell_canonical_examples() {
        let d = bell_canonical(&iso_pr(0.6)).unwrap();
        assert_abs_diff_eq!(d.weight(Tag::PRPart), 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(d.weight(Tag::LocalResidual), 0.4, epsilon = 1e-12);
        let r = d.component(Tag::LocalResidual).unwrap();
        assert!(r.max_abs_diff(&NsBox::white_noise()) < 1e-12);

        let det = NsBox::deterministic(0, 0, 0, 0);
        let d = bell_canonical(&det).unwrap();
        assert_abs_diff_eq!(d.weight(Tag::PRPart), 0.0);
        assert!(d.component(Tag::LocalResidual).unwrap().max_abs_diff(&det) < 1e-12);

        let half = NsBox::mix(&[NsBox::pr(0, 0, 0), det], &[0.5, 0.5]).unwrap();
        let d = bell_canonical(&half).unwrap();
        assert_abs_diff_eq!(d.weight(Tag::PRPart), 0.5, epsilon = 1e-12);
        assert!(d.component(Tag::LocalResidual).unwrap().max_abs_diff(&det) < 1e-12);
        assert!(reconstruction_error(&half, &d) < 1e-12);
    }

    #[test]
    fn pr_box_is_degenerate() {
        let d = bell_canonical(&NsBox::pr(1, 0, 1)).unwrap();
        assert!(d.degenerate);
        assert_eq!(d.terms.len(), 1);
        assert_eq!(d.terms[0].component, NsBox::pr(1, 0, 1));
        assert_abs_diff_eq!(d.terms[0].weight, 1.0);
    }

    #[test]
    fn full_canonical_on_noise_and_mermin() {
        let d = full_canonical(&NsBox::white_noise()).unwrap();
        assert_eq!(d.weight(Tag::PRPart), 0.0);
        assert_eq!(d.weight(Tag::MerminPart), 0.0);
        assert_eq!(d.component(Tag::LocalResidual), Some(&NsBox::white_noise()));

        for v in Vertex::all_mermin() {
            let b = NsBox::vertex(&v);
            let d = full_canonical(&b).unwrap();
            assert!(d.degenerate, "{v:?}");
            assert_abs_diff_eq!(d.weight(Tag::MerminPart), 1.0, epsilon = 1e-12);
            assert!(reconstruction_error(&b, &d) < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn full_canonical_mixed_box() {
        // 0.3 PR + 0.4 Mermin + 0.3 noise, then scrambled by a relabeling.
        let b = NsBox::mix(
            &[
                NsBox::pr(0, 0, 0),
                NsBox::mermin(0, 0, 0),
                NsBox::white_noise(),
            ],
            &[0.3, 0.4, 0.3],
        )
        .unwrap()
        .apply_lro(&Lro::from_code(0b1011010));
        let d = full_canonical(&b).unwrap();
        assert!(reconstruction_error(&b, &d) < 1e-12);
        let r = d.component(Tag::LocalResidual).unwrap();
        assert!(bell_discord(r) < 1e-12 && mermin_discord(r) < 1e-12);
        let total: f64 = d.terms.iter().map(|t| t.weight).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn impure_remainder_is_reported() {
        let b = NsBox::mix(
            &[NsBox::pr(0, 0, 0), NsBox::pr(0, 1, 0), NsBox::pr(1, 0, 0)],
            &[0.4, 0.3, 0.3],
        )
        .unwrap();
        let s = bell_split(&b);
        assert!(s.residual_g > 1e-3);
        assert!(max_abs_diff(&s.reconstruct(), b.probs()) < 1e-12);
        assert!(matches!(bell_canonical(&b), Err(Error::ResidualInvalid(_))));
    }

    #[test]
    fn membership_examples() {
        let n = local_membership(&NsBox::white_noise()).unwrap();
        assert!(n.feasible);
        assert!(max_abs_diff(&n.combination(), NsBox::white_noise().probs()) < 1e-9);
        assert!(!local_membership(&NsBox::pr(0, 0, 0)).unwrap().feasible);
        assert!(local_membership(&iso_pr(0.5)).unwrap().feasible);
        assert!(!local_membership(&iso_pr(0.5 + 1e-6)).unwrap().feasible);
    }

    #[test]
    fn local_content_examples() {
        for v in Vertex::all_deterministic() {
            let r = local_content(&NsBox::vertex(&v)).unwrap();
            assert_abs_diff_eq!(r.objective, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(local_content(&NsBox::pr(0, 1, 1)).unwrap().objective, 0.0);
        assert_abs_diff_eq!(
            local_content(&NsBox::white_noise()).unwrap().objective,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn local_content_matches_duality_certificate() {
        // Primal: each deterministic box with exactly one cell off the PR support
        // fits under iso-PR(3/4) with weight 1/16; dual: unit prices on the eight
        // off-support cells, each of mass 1/16.
        let b = iso_pr(0.75);
        let pr = NsBox::pr(0, 0, 0);
        let mut primal = 0.0;
        for d in Vertex::all_deterministic().map(|v| NsBox::vertex(&v)) {
            let off = indices()
                .filter(|&[i, j, m, n]| d.p(i, j, m, n) > 0.0 && pr.p(i, j, m, n) == 0.0)
                .count();
            if off == 1 {
                primal += 1.0 / 16.0;
            }
        }
        let dual: f64 = indices()
            .filter(|&[i, j, m, n]| pr.p(i, j, m, n) == 0.0)
            .map(|[i, j, m, n]| b.p(i, j, m, n))
            .sum();
        assert_abs_diff_eq!(primal, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(dual, 0.5, epsilon = 1e-15);
        let r = local_content(&b).unwrap();
        assert_abs_diff_eq!(r.objective, 0.5, epsilon = 1e-9);
        let fit = r.combination();
        for [i, j, m, n] in indices() {
            assert!(fit[i][j][m][n] <= b.p(i, j, m, n) + 1e-12);
        }
    }

    #[test]
    fn local_content_along_noise_segment() {
        // 1 - 2(p - 1/2) above the facet, 1 below.
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let expect = if p <= 0.5 { 1.0 } else { 2.0 - 2.0 * p };
            let r = local_content(&iso_pr(p)).unwrap();
            assert_abs_diff_eq!(r.objective, expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn decomposition_json_roundtrip() {
        let d = full_canonical(&iso_pr(0.3)).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("\"PRPart\""));
        let back: Decomposition = serde_json::from_str(&text).unwrap();
        assert_eq!(back.terms.len(), d.terms.len());
        assert_eq!(back.orientation, d.orientation);
    }
}
