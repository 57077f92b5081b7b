//! Bimodal Kripke frames, the subset-frame construction, the eight frame
//! conditions, and the reconstruction of a space from a frame.
//!
//! Note on relation labeling: the effort relation fixes the point and
//! shrinks the open, the knowledge relation fixes the open and moves the
//! point. This is forced by the satisfaction clauses — the modal
//! correspondence test below (relational truth versus direct evaluation)
//! pins it down executably.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::space::{SubsetSpace, World};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const MAX_WORLDS: usize = 64;
/// Cap on enumerated subsets while checking the intersection condition.
const COND7_SUBSET_CAP: u64 = 1 << 20;

/// A finite frame with two accessibility relations, stored as per-world
/// successor masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimodalFrame {
    worlds: Vec<String>,
    r_effort: Vec<u64>,
    r_knowledge: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct FrameFile {
    worlds: Vec<String>,
    r_effort: Vec<(String, String)>,
    r_knowledge: Vec<(String, String)>,
}

impl BimodalFrame {
    pub fn new(
        worlds: Vec<String>,
        effort: &[(usize, usize)],
        knowledge: &[(usize, usize)],
    ) -> Result<BimodalFrame> {
        let n = worlds.len();
        if n == 0 || n > MAX_WORLDS {
            return Err(Error::InvalidFrame(format!(
                "frame must have 1..={MAX_WORLDS} worlds, got {n}"
            )));
        }
        let mut sorted = worlds.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return Err(Error::InvalidFrame("duplicate world names".into()));
        }
        let mut r_effort = vec![0u64; n];
        let mut r_knowledge = vec![0u64; n];
        for &(a, b) in effort {
            if a >= n || b >= n {
                return Err(Error::InvalidFrame(format!("effort pair ({a},{b}) out of range")));
            }
            r_effort[a] |= 1 << b;
        }
        for &(a, b) in knowledge {
            if a >= n || b >= n {
                return Err(Error::InvalidFrame(format!(
                    "knowledge pair ({a},{b}) out of range"
                )));
            }
            r_knowledge[a] |= 1 << b;
        }
        Ok(BimodalFrame {
            worlds,
            r_effort,
            r_knowledge,
        })
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn effort_succ(&self, i: usize) -> u64 {
        self.r_effort[i]
    }

    pub fn knowledge_succ(&self, i: usize) -> u64 {
        self.r_knowledge[i]
    }

    pub fn from_json(text: &str) -> Result<BimodalFrame> {
        let file: FrameFile = serde_json::from_str(text)?;
        let index = |name: &str| -> Result<usize> {
            file.worlds
                .iter()
                .position(|w| w == name)
                .ok_or_else(|| Error::InvalidFrame(format!("unknown world {name:?}")))
        };
        let effort = file
            .r_effort
            .iter()
            .map(|(a, b)| Ok((index(a)?, index(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let knowledge = file
            .r_knowledge
            .iter()
            .map(|(a, b)| Ok((index(a)?, index(b)?)))
            .collect::<Result<Vec<_>>>()?;
        BimodalFrame::new(file.worlds, &effort, &knowledge)
    }

    pub fn to_json(&self) -> String {
        let pairs = |rel: &[u64]| -> Vec<(String, String)> {
            let mut out = Vec::new();
            for (a, &mask) in rel.iter().enumerate() {
                for b in 0..self.worlds.len() {
                    if mask >> b & 1 == 1 {
                        out.push((self.worlds[a].clone(), self.worlds[b].clone()));
                    }
                }
            }
            out
        };
        serde_json::to_string_pretty(&FrameFile {
            worlds: self.worlds.clone(),
            r_effort: pairs(&self.r_effort),
            r_knowledge: pairs(&self.r_knowledge),
        })
        .expect("frame serializes")
    }
}

/// The subset frame of a space: worlds are the pairs (x, U) with x ∈ U;
/// effort shrinks the open at a fixed point, knowledge moves the point
/// within a fixed open. Also returns the (point, open) behind each world.
pub fn subset_frame(space: &SubsetSpace) -> Result<(BimodalFrame, Vec<World>)> {
    let opens = space.opens();
    let mut worlds: Vec<World> = Vec::new();
    for (oi, &u) in opens.iter().enumerate() {
        for x in 0..space.point_count() {
            if u >> x & 1 == 1 {
                worlds.push(World { point: x, open: oi });
            }
        }
    }
    worlds.sort();
    if worlds.len() > MAX_WORLDS {
        return Err(Error::InvalidFrame(format!(
            "subset frame would have {} worlds (cap {MAX_WORLDS})",
            worlds.len()
        )));
    }
    let names: Vec<String> = worlds
        .iter()
        .map(|w| format!("{}@{{{}}}", space.points()[w.point], space.point_names(opens[w.open]).join(",")))
        .collect();
    let mut effort = Vec::new();
    let mut knowledge = Vec::new();
    for (i, a) in worlds.iter().enumerate() {
        for (j, b) in worlds.iter().enumerate() {
            if a.point == b.point && opens[b.open] & !opens[a.open] == 0 {
                effort.push((i, j));
            }
            if a.open == b.open {
                knowledge.push((i, j));
            }
        }
    }
    Ok((BimodalFrame::new(names, &effort, &knowledge)?, worlds))
}

// ---------------------------------------------------------------------------
// conditions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ConditionStatus {
    Holds,
    /// World indices witnessing the failure.
    Fails { witness: Vec<usize> },
    NotEvaluated { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    /// Verdicts for conditions 1–8, in order: effort preorder, knowledge
    /// equivalence, commutation R1R2 ⊆ R2R1, ending points, extensionality,
    /// union, intersection, strongly generated.
    pub conditions: Vec<ConditionStatus>,
}

impl ConditionReport {
    pub fn holds(&self, condition: usize) -> bool {
        matches!(self.conditions[condition - 1], ConditionStatus::Holds)
    }

    pub fn all_refutable_hold_up_to(&self, last: usize) -> bool {
        self.conditions[..last]
            .iter()
            .all(|c| !matches!(c, ConditionStatus::Fails { .. }))
    }
}

pub fn check_conditions(frame: &BimodalFrame) -> ConditionReport {
    let n = frame.world_count();
    let r1 = &frame.r_effort;
    let r2 = &frame.r_knowledge;
    let mut r1_pred = vec![0u64; n];
    for s in 0..n {
        for t in 0..n {
            if r1[s] >> t & 1 == 1 {
                r1_pred[t] |= 1 << s;
            }
        }
    }
    // compositions, left to right: (s, u) ∈ AB iff ∃a: sAa and aBu
    let compose = |a: &[u64], b: &[u64]| -> Vec<u64> {
        (0..n)
            .map(|s| {
                (0..n)
                    .filter(|&x| a[s] >> x & 1 == 1)
                    .fold(0u64, |acc, x| acc | b[x])
            })
            .collect()
    };
    let r1r2 = compose(r1, r2);
    let r2r1 = compose(r2, r1);

    let mut out = Vec::new();

    // 1: effort reflexive and transitive
    out.push('c1: {
        for s in 0..n {
            if r1[s] >> s & 1 != 1 {
                break 'c1 ConditionStatus::Fails { witness: vec![s] };
            }
        }
        for s in 0..n {
            for t in 0..n {
                if r1[s] >> t & 1 == 1 && r1[t] & !r1[s] != 0 {
                    let u = (0..n).find(|&u| r1[t] >> u & 1 == 1 && r1[s] >> u & 1 != 1);
                    break 'c1 ConditionStatus::Fails {
                        witness: vec![s, t, u.unwrap()],
                    };
                }
            }
        }
        ConditionStatus::Holds
    });

    // 2: knowledge is an equivalence
    out.push('c2: {
        for s in 0..n {
            if r2[s] >> s & 1 != 1 {
                break 'c2 ConditionStatus::Fails { witness: vec![s] };
            }
            for t in 0..n {
                if r2[s] >> t & 1 == 1 {
                    if r2[t] >> s & 1 != 1 {
                        break 'c2 ConditionStatus::Fails { witness: vec![s, t] };
                    }
                    if r2[t] & !r2[s] != 0 {
                        let u = (0..n).find(|&u| r2[t] >> u & 1 == 1 && r2[s] >> u & 1 != 1);
                        break 'c2 ConditionStatus::Fails {
                            witness: vec![s, t, u.unwrap()],
                        };
                    }
                }
            }
        }
        ConditionStatus::Holds
    });

    // 3: R1R2 ⊆ R2R1
    out.push('c3: {
        for s in 0..n {
            if r1r2[s] & !r2r1[s] != 0 {
                let u = (0..n).find(|&u| r1r2[s] >> u & 1 == 1 && r2r1[s] >> u & 1 != 1);
                break 'c3 ConditionStatus::Fails {
                    witness: vec![s, u.unwrap()],
                };
            }
        }
        ConditionStatus::Holds
    });

    // 4: ending points for effort
    out.push('c4: {
        for s in 0..n {
            let ok = (0..n).any(|s0| {
                (0..n).all(|t| r1[s] >> t & 1 != 1 || r1[t] >> s0 & 1 == 1)
            });
            if !ok {
                break 'c4 ConditionStatus::Fails { witness: vec![s] };
            }
        }
        ConditionStatus::Holds
    });

    // 5: extensionality — classes that see each other pairwise through
    // common effort successors force equal worlds
    let matches = |s: usize, s2: usize| -> bool {
        (0..n).all(|t| {
            r2[s] >> t & 1 != 1
                || (0..n).any(|t2| r2[s2] >> t2 & 1 == 1 && r1[t] & r1[t2] != 0)
        })
    };
    out.push('c5: {
        for s in 0..n {
            for s2 in 0..n {
                if s != s2 && r1[s] & r1[s2] != 0 && matches(s, s2) && matches(s2, s) {
                    break 'c5 ConditionStatus::Fails { witness: vec![s, s2] };
                }
            }
        }
        ConditionStatus::Holds
    });

    // 6: union — a common upper bound forces a covering world
    out.push('c6: {
        for s1 in 0..n {
            for s2 in 0..n {
                if !(0..n).any(|s| r2r1[s] >> s1 & 1 == 1 && r2r1[s] >> s2 & 1 == 1) {
                    continue;
                }
                let ok = (0..n).any(|s_p| {
                    (0..n).all(|t| {
                        r2[s_p] >> t & 1 != 1
                            || r1r2[t] >> s1 & 1 == 1
                            || r1r2[t] >> s2 & 1 == 1
                    })
                });
                if !ok {
                    break 'c6 ConditionStatus::Fails { witness: vec![s1, s2] };
                }
            }
        }
        ConditionStatus::Holds
    });

    // 7: intersection — only subsets with a common effort successor matter,
    // so enumerate subsets of each successor's predecessor set
    out.push(check_intersection_condition(n, r1, r2, &r1_pred, &r1r2));

    // 8: strongly generated
    out.push('c8: {
        if (0..n).any(|s| r2r1[s].count_ones() as usize == n) {
            break 'c8 ConditionStatus::Holds;
        }
        ConditionStatus::Fails { witness: vec![] }
    });

    ConditionReport { conditions: out }
}

fn check_intersection_condition(
    n: usize,
    r1: &[u64],
    r2: &[u64],
    r1_pred: &[u64],
    r1r2: &[u64],
) -> ConditionStatus {
    let mut total: u64 = 0;
    for s0 in 0..n {
        let preds = r1_pred[s0];
        let k = preds.count_ones();
        total = total.saturating_add(1u64.checked_shl(k).unwrap_or(u64::MAX));
        if total > COND7_SUBSET_CAP {
            return ConditionStatus::NotEvaluated {
                reason: format!(
                    "subset enumeration exceeds {COND7_SUBSET_CAP} work units"
                ),
            };
        }
    }
    let mut seen: std::collections::HashSet<u64> = std::collections::HashSet::new();
    for s0 in 0..n {
        let preds = r1_pred[s0];
        let members: Vec<usize> = (0..n).filter(|&i| preds >> i & 1 == 1).collect();
        for bits in 1u64..1 << members.len() {
            let subset: u64 = members
                .iter()
                .enumerate()
                .filter(|(j, _)| bits >> j & 1 == 1)
                .fold(0u64, |acc, (_, &i)| acc | 1 << i);
            if !seen.insert(subset) {
                continue;
            }
            // T: worlds that occur in some admissible family {tᵢ}
            let idx: Vec<usize> = (0..n).filter(|&i| subset >> i & 1 == 1).collect();
            let mut t_set = 0u64;
            for t0 in 0..n {
                if idx.iter().all(|&si| r2[si] & r1_pred[t0] != 0) {
                    for &si in &idx {
                        t_set |= r2[si] & r1_pred[t0];
                    }
                }
            }
            let ok = (0..n).any(|s_p| {
                (0..n).all(|t| t_set >> t & 1 != 1 || r1r2[t] >> s_p & 1 == 1)
            });
            if !ok {
                return ConditionStatus::Fails { witness: idx };
            }
        }
    }
    let _ = r1;
    ConditionStatus::Holds
}

// ---------------------------------------------------------------------------
// frame → space
// ---------------------------------------------------------------------------

/// Rebuilds a space from a frame satisfying conditions 1–7: points are the
/// effort endpoints, each knowledge class contributes the subset of its
/// members' endpoints. Returns the space and the world ↦ (point, open)
/// bijection, verified to be an isomorphism onto the subset frame of the
/// result.
pub fn frame_to_space(frame: &BimodalFrame) -> Result<(SubsetSpace, Vec<World>)> {
    let report = check_conditions(frame);
    if !report.all_refutable_hold_up_to(7) {
        return Err(Error::FrameConditionsViolated(
            serde_json::to_string(&report.conditions).expect("report serializes"),
        ));
    }
    let n = frame.world_count();
    let r1 = &frame.r_effort;
    let r2 = &frame.r_knowledge;
    // endpoint of s: the unique t with sR1t and t'R1t for all successors t'
    let endpoint = |s: usize| -> Result<usize> {
        let cands: Vec<usize> = (0..n)
            .filter(|&t| {
                r1[s] >> t & 1 == 1 && (0..n).all(|t2| r1[s] >> t2 & 1 != 1 || r1[t2] >> t & 1 == 1)
            })
            .collect();
        match cands.as_slice() {
            [t] => Ok(*t),
            _ => Err(Error::FrameConditionsViolated(format!(
                "world {s} has {} ending points; extensionality should force one",
                cands.len()
            ))),
        }
    };
    let endpoints: Vec<usize> = (0..n).map(endpoint).collect::<Result<Vec<_>>>()?;
    let mut point_worlds: Vec<usize> = endpoints.clone();
    point_worlds.sort_unstable();
    point_worlds.dedup();
    if point_worlds.len() > crate::space::MAX_POINTS {
        return Err(Error::InvalidFrame("too many points".into()));
    }
    let point_names: Vec<String> = point_worlds
        .iter()
        .map(|&w| frame.worlds[w].clone())
        .collect();
    let point_of = |w: usize| -> usize {
        point_worlds.iter().position(|&p| p == w).expect("endpoint indexed")
    };
    // one open per knowledge class
    let mut class_masks: Vec<u64> = Vec::new();
    let mut class_of_world: Vec<u64> = vec![0; n];
    for s in 0..n {
        let mut mask = 0u64;
        for t in 0..n {
            if r2[s] >> t & 1 == 1 {
                mask |= 1 << point_of(endpoints[t]);
            }
        }
        class_of_world[s] = mask;
        if !class_masks.contains(&mask) {
            class_masks.push(mask);
        }
    }
    let space = SubsetSpace::new_partial(point_names.clone(), class_masks)?;
    // space construction sorts names; map back
    let reindex: Vec<usize> = point_worlds
        .iter()
        .map(|&w| space.point_index(&frame.worlds[w]).expect("name kept"))
        .collect();
    let witness: Vec<World> = (0..n)
        .map(|s| {
            let mut mask = 0u64;
            for (old, &new) in reindex.iter().enumerate() {
                if class_of_world[s] >> old & 1 == 1 {
                    mask |= 1 << new;
                }
            }
            World {
                point: reindex[point_of(endpoints[s])],
                open: space.open_index(mask).expect("class mask recorded"),
            }
        })
        .collect();

    // verify the witness is an isomorphism onto the rebuilt subset frame
    let (rebuilt, rebuilt_worlds) = subset_frame(&space)?;
    if rebuilt.world_count() != n {
        return Err(Error::FrameConditionsViolated(format!(
            "rebuilt frame has {} worlds, original {n}",
            rebuilt.world_count()
        )));
    }
    let to_rebuilt: Vec<usize> = witness
        .iter()
        .map(|w| {
            rebuilt_worlds
                .iter()
                .position(|rw| rw == w)
                .ok_or_else(|| {
                    Error::FrameConditionsViolated(format!("world {w:?} missing in rebuilt frame"))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut seen = vec![false; n];
    for &i in &to_rebuilt {
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::FrameConditionsViolated(
                "witness map is not injective".into(),
            ));
        }
    }
    for s in 0..n {
        for t in 0..n {
            let e1 = frame.r_effort[s] >> t & 1 == 1;
            let e2 = rebuilt.r_effort[to_rebuilt[s]] >> to_rebuilt[t] & 1 == 1;
            let k1 = frame.r_knowledge[s] >> t & 1 == 1;
            let k2 = rebuilt.r_knowledge[to_rebuilt[s]] >> to_rebuilt[t] & 1 == 1;
            if e1 != e2 || k1 != k2 {
                return Err(Error::FrameConditionsViolated(format!(
                    "relations disagree at ({s},{t}) under the witness map"
                )));
            }
        }
    }
    Ok((space, witness))
}

// ---------------------------------------------------------------------------
// relational evaluation
// ---------------------------------------------------------------------------

/// Truth mask of `f` over the frame's worlds, with □ read along the effort
/// relation and K along the knowledge relation. Atom values are world
/// masks.
pub fn kripke_truth(frame: &BimodalFrame, val: &BTreeMap<String, u64>, f: &Formula) -> u64 {
    use Formula::*;
    let n = frame.world_count();
    let full: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    match f {
        Top => full,
        Bot => 0,
        Atom(a) => val.get(a).copied().unwrap_or(0) & full,
        Not(g) => !kripke_truth(frame, val, g) & full,
        And(a, b) => kripke_truth(frame, val, a) & kripke_truth(frame, val, b),
        Or(a, b) => kripke_truth(frame, val, a) | kripke_truth(frame, val, b),
        Implies(a, b) => {
            (!kripke_truth(frame, val, a) | kripke_truth(frame, val, b)) & full
        }
        Iff(a, b) => {
            !(kripke_truth(frame, val, a) ^ kripke_truth(frame, val, b)) & full
        }
        K(g) => {
            let tg = kripke_truth(frame, val, g);
            (0..n)
                .filter(|&s| frame.r_knowledge[s] & !tg == 0)
                .fold(0, |acc, s| acc | 1 << s)
        }
        L(g) => {
            let tg = kripke_truth(frame, val, g);
            (0..n)
                .filter(|&s| frame.r_knowledge[s] & tg != 0)
                .fold(0, |acc, s| acc | 1 << s)
        }
        Box(g) => {
            let tg = kripke_truth(frame, val, g);
            (0..n)
                .filter(|&s| frame.r_effort[s] & !tg == 0)
                .fold(0, |acc, s| acc | 1 << s)
        }
        Dia(g) => {
            let tg = kripke_truth(frame, val, g);
            (0..n)
                .filter(|&s| frame.r_effort[s] & tg != 0)
                .fold(0, |acc, s| acc | 1 << s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::space::Model;

    fn chain_space() -> SubsetSpace {
        SubsetSpace::new(vec!["a".into(), "b".into()], vec![0b00, 0b01, 0b11]).unwrap()
    }

    #[test]
    fn subset_frame_chain() {
        let (frame, worlds) = subset_frame(&chain_space()).unwrap();
        assert_eq!(frame.world_count(), 3);
        assert_eq!(worlds.len(), 3);
        // (a,{a}) reachable from (a,{a,b}) by effort; knowledge partitions by open
        let i_small = worlds.iter().position(|w| w.point == 0 && w.open == 1).unwrap();
        let i_big = worlds.iter().position(|w| w.point == 0 && w.open == 2).unwrap();
        let i_b = worlds.iter().position(|w| w.point == 1 && w.open == 2).unwrap();
        assert_eq!(frame.effort_succ(i_big) >> i_small & 1, 1);
        assert_eq!(frame.effort_succ(i_small) >> i_big & 1, 0);
        assert_eq!(frame.knowledge_succ(i_big), (1 << i_big) | (1 << i_b));
        assert_eq!(frame.knowledge_succ(i_small), 1 << i_small);
    }

    #[test]
    fn subset_frame_degenerate_cases() {
        let single = SubsetSpace::new(vec!["p".into()], vec![0b1]).unwrap();
        let (frame, _) = subset_frame(&single).unwrap();
        assert_eq!(frame.world_count(), 1);
        assert_eq!(frame.effort_succ(0), 1);
        assert_eq!(frame.knowledge_succ(0), 1);

        // two points, only the full open: knowledge total, effort identity
        let mstar = SubsetSpace::new(vec!["x1".into(), "x2".into()], vec![0b00, 0b11]).unwrap();
        let (frame, _) = subset_frame(&mstar).unwrap();
        assert_eq!(frame.world_count(), 2);
        assert_eq!(frame.effort_succ(0), 0b01);
        assert_eq!(frame.effort_succ(1), 0b10);
        assert_eq!(frame.knowledge_succ(0), 0b11);
    }

    #[test]
    fn conditions_hold_on_subset_frames() {
        let (frame, _) = subset_frame(&chain_space()).unwrap();
        let report = check_conditions(&frame);
        for (i, c) in report.conditions.iter().enumerate() {
            assert_eq!(*c, ConditionStatus::Holds, "condition {}", i + 1);
        }
    }

    #[test]
    fn nontransitive_effort_fails_condition_1() {
        let frame = BimodalFrame::new(
            vec!["s".into(), "t".into(), "u".into()],
            &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)],
            &[(0, 0), (1, 1), (2, 2)],
        )
        .unwrap();
        let report = check_conditions(&frame);
        assert!(matches!(
            report.conditions[0],
            ConditionStatus::Fails { .. }
        ));
    }

    #[test]
    fn missing_top_fails_only_condition_8() {
        // frame of the space with opens {{a},{b}}: no world sees all worlds
        let frame = BimodalFrame::new(
            vec!["a".into(), "b".into()],
            &[(0, 0), (1, 1)],
            &[(0, 0), (1, 1)],
        )
        .unwrap();
        let report = check_conditions(&frame);
        for i in 1..=7 {
            assert!(report.holds(i), "condition {i}");
        }
        assert!(matches!(
            report.conditions[7],
            ConditionStatus::Fails { .. }
        ));
    }

    #[test]
    fn frame_roundtrip_chain() {
        let (frame, _) = subset_frame(&chain_space()).unwrap();
        let (space, witness) = frame_to_space(&frame).unwrap();
        // ∅ hosts no worlds and is unrecoverable
        assert_eq!(space.opens(), &[0b01, 0b11]);
        assert_eq!(space.point_count(), 2);
        assert_eq!(witness.len(), 3);
    }

    #[test]
    fn one_world_frame_roundtrip() {
        let frame =
            BimodalFrame::new(vec!["w".into()], &[(0, 0)], &[(0, 0)]).unwrap();
        let (space, witness) = frame_to_space(&frame).unwrap();
        assert_eq!(space.point_count(), 1);
        assert_eq!(space.opens(), &[0b1]);
        assert_eq!(witness, vec![World { point: 0, open: 0 }]);
    }

    #[test]
    fn effort_meet_knowledge_is_identity() {
        let (frame, _) = subset_frame(&chain_space()).unwrap();
        for s in 0..frame.world_count() {
            let both = frame.effort_succ(s) & frame.knowledge_succ(s);
            assert_eq!(both, 1 << s);
        }
    }

    #[test]
    fn modal_correspondence_with_eval() {
        let space = chain_space();
        let model = Model::new(
            space.clone(),
            [("A".to_string(), 0b01u64)].into_iter().collect(),
        )
        .unwrap();
        let (frame, worlds) = subset_frame(&space).unwrap();
        // lift atoms to world masks
        let mut val = BTreeMap::new();
        for (a, &mask) in model.valuation() {
            let wmask = worlds
                .iter()
                .enumerate()
                .filter(|(_, w)| mask >> w.point & 1 == 1)
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            val.insert(a.clone(), wmask);
        }
        for s in ["A", "K A", "[] A", "<> K A", "L ~A", "[] L A -> A", "K [] A -> [] K A"] {
            let f = parse(s).unwrap();
            let truth = kripke_truth(&frame, &val, &f);
            for (i, w) in worlds.iter().enumerate() {
                assert_eq!(
                    truth >> i & 1 == 1,
                    crate::semantics::eval(&model, *w, &f).unwrap(),
                    "{s} at {w:?}"
                );
            }
        }
    }

    #[test]
    fn frame_json_roundtrip() {
        let (frame, _) = subset_frame(&chain_space()).unwrap();
        let text = frame.to_json();
        let back = BimodalFrame::from_json(&text).unwrap();
        assert_eq!(frame, back);

        assert!(BimodalFrame::from_json(
            r#"{"worlds":["w"],"r_effort":[["w","v"]],"r_knowledge":[]}"#
        )
        .is_err());
    }
}
