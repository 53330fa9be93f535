//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Everything is exact; there are no tolerances anywhere.

mod common;

use std::panic::AssertUnwindSafe;

use common::{expectation_weights, full_grid, space, GridKind};
use gqp::hyperreal::rat;
use gqp::{
    canonical_structure, check_derived_lemmas, check_equipartition_sweep, check_gqp,
    check_gqp_lemmas, check_postulate, classify_family, conjecture_check, derive_plausibility,
    enumerate_total_extensions, expectation_structure, hyperreal_structure, replay_gqp_lemma,
    replay_gqp_witness, replay_lemma, replay_postulate, Act, CheckOptions, CheckReport,
    ConditionalPreferenceStructure, Event, EventRelation, GqpLemmaId, LemmaId, PostulateId,
    ProbabilityModel, StateSpace, StructureBuilder,
};

fn criterion<F: FnOnce()>(number: u32, name: &str, body: F) {
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(body));
    println!(
        "acceptance criterion {number:02} [{name}]: {}",
        if outcome.is_ok() { "PASS" } else { "FAIL" }
    );
    if let Err(cause) = outcome {
        std::panic::resume_unwind(cause);
    }
}

const CORE: [PostulateId; 7] = [
    PostulateId::Q0,
    PostulateId::Q1,
    PostulateId::Q2,
    PostulateId::Q3,
    PostulateId::Q4,
    PostulateId::Q5,
    PostulateId::Q6,
];

fn assert_passes(p: &ConditionalPreferenceStructure, id: PostulateId, label: &str) {
    let report = check_postulate(p, id).unwrap();
    assert!(
        report.passed,
        "{} failed on {label}: {} violations, first witness {:?}",
        report.subject, report.violation_count, report.witnesses.first()
    );
}

#[test]
fn criterion_01_expectation_models_pass_all_postulates() {
    criterion(1, "expectation models pass Q0-Q6 and Q'4", || {
        let entries = common::expectation_grid();
        assert!(!entries.is_empty());
        for entry in &entries {
            for id in CORE {
                assert_passes(&entry.structure, id, &entry.label);
            }
            assert_passes(&entry.structure, PostulateId::QPrime4, &entry.label);
        }
    });
}

#[test]
fn criterion_02_hyperreal_and_ranked_models_pass_core_and_break_qprime4() {
    criterion(2, "hyperreal and ranked models pass Q0-Q6; Q'4 breaks", || {
        let mut hyperreal_break = 0;
        let mut ranked_break = 0;
        let entries: Vec<_> = full_grid()
            .into_iter()
            .filter(|e| e.kind != GridKind::Expectation)
            .collect();
        for entry in &entries {
            for id in CORE {
                assert_passes(&entry.structure, id, &entry.label);
            }
            let q4p = check_postulate(&entry.structure, PostulateId::QPrime4).unwrap();
            if !q4p.passed {
                assert!(!q4p.witnesses.is_empty(), "failing report must carry witnesses");
                for w in &q4p.witnesses {
                    assert!(
                        replay_postulate(
                            &entry.structure,
                            PostulateId::QPrime4,
                            w,
                            CheckOptions::default()
                        )
                        .unwrap(),
                        "witness does not replay on {}",
                        entry.label
                    );
                }
                match entry.kind {
                    GridKind::Hyperreal { infinitesimal: true } => hyperreal_break += 1,
                    GridKind::Ranked => ranked_break += 1,
                    _ => {}
                }
            }
        }
        assert!(hyperreal_break > 0, "no infinitesimal-weight model broke Q'4");
        assert!(ranked_break > 0, "no ranked model broke Q'4");
    });
}

#[test]
fn criterion_03_derived_lemma_suite_passes_on_every_grid_structure() {
    criterion(3, "all eleven derived lemmas pass", || {
        for entry in full_grid() {
            let reports = check_derived_lemmas(&entry.structure).unwrap();
            assert_eq!(reports.len(), LemmaId::ALL.len());
            for report in reports {
                assert!(
                    report.passed,
                    "{} failed on {}: {:?}",
                    report.subject,
                    entry.label,
                    report.witnesses.first()
                );
            }
        }
    });
}

#[test]
fn criterion_04_derived_relations_are_generalized_qualitative_probabilities() {
    criterion(4, "derived relations pass the axioms", || {
        for entry in full_grid() {
            let r = derive_plausibility(&entry.structure).unwrap();
            let report = check_gqp(&r);
            assert!(
                report.passed,
                "axioms failed on {}: {:?}",
                entry.label,
                report.witnesses.first()
            );
        }
    });
}

#[test]
fn criterion_05_negligibility_properties_hold_exhaustively() {
    criterion(5, "modularity and the whole derived-property suite", || {
        for entry in full_grid() {
            let r = derive_plausibility(&entry.structure).unwrap();
            let reports = check_gqp_lemmas(&r, Some(&entry.structure)).unwrap();
            assert_eq!(reports.len(), GqpLemmaId::ALL.len());
            let modularity = reports
                .iter()
                .find(|rep| rep.subject == GqpLemmaId::NegligibleModularity.as_str())
                .expect("modularity report present");
            assert!(modularity.checked_count > 0);
            for report in reports {
                assert!(
                    report.passed,
                    "{} failed on {}: {:?}",
                    report.subject,
                    entry.label,
                    report.witnesses.first()
                );
            }
        }
    });
}

#[test]
fn criterion_06_canonical_roundtrip_is_identity() {
    criterion(6, "canonical structure satisfies Q1-Q6 and R; round trip", || {
        for entry in full_grid() {
            let r = derive_plausibility(&entry.structure).unwrap();
            let canonical = canonical_structure(&r).unwrap();
            for id in [
                PostulateId::Q1,
                PostulateId::Q2,
                PostulateId::Q3,
                PostulateId::Q4,
                PostulateId::Q5,
                PostulateId::Q6,
                PostulateId::R,
            ] {
                assert_passes(&canonical, id, &format!("canonical of {}", entry.label));
            }
            let derived = derive_plausibility(&canonical).unwrap();
            assert_eq!(derived, r, "round trip changed the relation on {}", entry.label);
        }
    });
}

#[test]
fn criterion_07_family_classification() {
    criterion(7, "family flags per model kind", || {
        for entry in full_grid() {
            let r = derive_plausibility(&entry.structure).unwrap();
            let flags = classify_family(&r);
            assert!(
                flags.criterion_agrees,
                "complementation criterion disagrees with standardness on {}",
                entry.label
            );
            if flags.purely_nonstandard {
                assert!(flags.total, "purely non-standard but not total on {}", entry.label);
            }
            match entry.kind {
                GridKind::Expectation => {
                    assert!(flags.total && flags.standard, "family of {}", entry.label);
                }
                GridKind::Ranked => {
                    assert!(
                        flags.total && flags.purely_nonstandard,
                        "family of {}",
                        entry.label
                    );
                }
                GridKind::Hyperreal { infinitesimal } => {
                    assert!(flags.total, "family of {}", entry.label);
                    if infinitesimal {
                        assert!(!flags.standard, "family of {}", entry.label);
                    }
                }
            }
        }
    });
}

#[test]
fn criterion_08_equipartition_indifference_under_the_splice_postulate() {
    criterion(8, "value-equivalent acts are indifferent wherever Q7 holds", || {
        let mut qualified = 0;
        for entry in full_grid() {
            let q7 = check_postulate(&entry.structure, PostulateId::Q7).unwrap();
            assert!(
                q7.passed,
                "Q7 failed on {}: {:?}",
                entry.label,
                q7.witnesses.first()
            );
            qualified += 1;
            let sweep = check_equipartition_sweep(&entry.structure).unwrap();
            assert!(
                sweep.passed,
                "equipartition failed on {}: {:?}",
                entry.label,
                sweep.witnesses.first()
            );
            assert!(sweep.checked_count > 0, "sweep checked nothing on {}", entry.label);
        }
        assert!(qualified > 0);
    });
}

#[test]
fn criterion_09_conjecture_instrumentation_on_two_states() {
    criterion(9, "extension intersection equals the base on every 2-state relation", || {
        let sp = space(2);
        let mut gqp_count = 0;
        for code in 0u32..(1 << 16) {
            let mut pairs = Vec::new();
            for a in 0..4u32 {
                for b in 0..4u32 {
                    if code >> (4 * a + b) & 1 != 0 {
                        pairs.push((Event(a), Event(b)));
                    }
                }
            }
            let r = EventRelation::from_pairs(sp.clone(), &pairs).unwrap();
            if !check_gqp(&r).passed {
                continue;
            }
            gqp_count += 1;
            let report = conjecture_check(&r).unwrap();
            assert!(
                report.passed,
                "intersection differs from base {:?}: {:?}",
                r.pairs(),
                report.witnesses.first()
            );
        }
        // Hand count of the valid relations over a two-state algebra.
        assert_eq!(gqp_count, 9);

        // The documented incomparable-atoms example has exactly three total
        // extensions.
        let base = EventRelation::subset_order(space(2)).unwrap();
        let ext = enumerate_total_extensions(&base).unwrap();
        assert_eq!(ext.extensions.len(), 3);
        assert!(conjecture_check(&base).unwrap().passed);
    });
}

/// Builds deliberately broken structures and relations, collects every
/// witness emitted anywhere, and replays them all.
#[test]
fn criterion_10_every_witness_replays_to_a_genuine_violation() {
    criterion(10, "100% witness soundness", || {
        let mut replayed = 0u32;

        // Broken transitivity.
        {
            let sp = StateSpace::new(["a"]).unwrap();
            let scale = common::three_values();
            let acts = gqp::ActSet::enumerate_all(&sp, &scale, 100).unwrap();
            let s = sp.full_event();
            let lo = acts.id_of(&Act::constant(1, 0)).unwrap();
            let mid = acts.id_of(&Act::constant(1, 1)).unwrap();
            let hi = acts.id_of(&Act::constant(1, 2)).unwrap();
            let mut b = StructureBuilder::new(sp, scale, acts).unwrap();
            b.add_pair(s, lo, hi);
            b.add_pair(s, hi, mid);
            b.close_preorder();
            b.remove_pair(s, lo, mid);
            let p = b.build();
            let report = check_postulate(&p, PostulateId::Q1).unwrap();
            assert!(!report.passed);
            for w in &report.witnesses {
                assert!(replay_postulate(&p, PostulateId::Q1, w, CheckOptions::default()).unwrap());
                replayed += 1;
            }
        }

        // Broken union monotonicity: remove one union-event pair from an
        // expectation model, then replay every witness of every failing
        // postulate and lemma report.
        {
            let m = ProbabilityModel::standard(space(2), vec![rat(1, 2), rat(1, 2)]).unwrap();
            let good = expectation_structure(&m, &common::two_values()).unwrap();
            let s = good.space().full_event();
            let f = good.act_id(&Act::new(vec![0, 0])).unwrap();
            let g = good.act_id(&Act::new(vec![1, 0])).unwrap();
            let mut b = StructureBuilder::new(
                good.space().clone(),
                good.scale().clone(),
                good.acts().clone(),
            )
            .unwrap();
            for (event, x, y) in good.relation_pairs() {
                b.add_pair(event, x, y);
            }
            b.remove_pair(s, f, g);
            let broken = b.build();

            let q3 = check_postulate(&broken, PostulateId::Q3).unwrap();
            assert!(!q3.passed, "removing a union pair must break Q3");
            for w in &q3.witnesses {
                assert!(replay_postulate(&broken, PostulateId::Q3, w, CheckOptions::default())
                    .unwrap());
                replayed += 1;
            }
            for report in check_derived_lemmas(&broken).unwrap() {
                let id = LemmaId::ALL
                    .iter()
                    .copied()
                    .find(|id| id.as_str() == report.subject)
                    .unwrap();
                for w in &report.witnesses {
                    assert!(replay_lemma(&broken, id, w).unwrap());
                    replayed += 1;
                }
            }
        }

        // Q'4 counterexamples from the model grid.
        for entry in full_grid() {
            let q4p = check_postulate(&entry.structure, PostulateId::QPrime4).unwrap();
            for w in &q4p.witnesses {
                assert!(replay_postulate(
                    &entry.structure,
                    PostulateId::QPrime4,
                    w,
                    CheckOptions::default()
                )
                .unwrap());
                replayed += 1;
            }
        }

        // A relation violating the absorption axiom, plus its lemma echoes.
        {
            let mut r = EventRelation::subset_order(space(2)).unwrap();
            r.set(Event(0b01), Event(0b10));
            r.set(Event(0b11), Event(0b01));
            let r = r.reflexive_transitive_closure();
            let report = check_gqp(&r);
            assert!(!report.passed);
            for w in &report.witnesses {
                assert!(replay_gqp_witness(&r, w));
                replayed += 1;
            }
            for lem in check_gqp_lemmas(&r, None).unwrap() {
                let id = GqpLemmaId::ALL
                    .iter()
                    .copied()
                    .find(|id| id.as_str() == lem.subject)
                    .unwrap();
                for w in &lem.witnesses {
                    assert!(replay_gqp_lemma(&r, id, w, None).unwrap());
                    replayed += 1;
                }
            }
        }

        assert!(replayed >= 10, "expected a meaningful witness corpus, got {replayed}");
    });
}

#[test]
fn criterion_11_degree_zero_weights_reproduce_the_expectation_relations() {
    criterion(11, "hyperreal generator at degree zero equals expectation", || {
        let scales = [common::two_values(), common::three_values(), common::tied_values()];
        for weights in expectation_weights() {
            let n = weights.len();
            for scale in &scales {
                let m = ProbabilityModel::standard(space(n), weights.clone()).unwrap();
                let pe = expectation_structure(&m, scale).unwrap();
                let ph = hyperreal_structure(&m, scale).unwrap();
                for event in pe.space().events() {
                    for f in pe.acts().ids() {
                        for g in pe.acts().ids() {
                            assert_eq!(
                                pe.le_ids(event, f, g),
                                ph.le_ids(event, f, g),
                                "relations differ at event {event:?}"
                            );
                        }
                    }
                }
            }
        }
    });
}

/// Witness invariant shared by every report: passed iff no witnesses, and
/// the violation count is consistent.
#[allow(dead_code)]
fn assert_report_invariants(report: &CheckReport) {
    assert_eq!(report.passed, report.witnesses.is_empty());
    assert_eq!(report.passed, report.violation_count == 0);
}
