use modelbench_core::measures::d1::{loaded_score, parse_status_score, warning_score};
use modelbench_core::measures::d2::{collect_labels, diversity, label_presence};
use modelbench_core::measures::d3::{construct_frequency, construct_presence, match_constructs, presence_score};
use modelbench_core::measures::d4::{connectivity, containment_depth, degrees, model_size};
use modelbench_core::measures::builtin_catalog;
use modelbench_core::profile::LexicalMeasures;
use modelbench_core::{IrEdge, IrGraph, IrNode, Properties};
use proptest::prelude::*;

const ECORE_TYPES: [&str; 5] = ["EClass", "EAttribute", "EPackage", "Unknown", "EDataType"];
const EDGE_TYPES: [&str; 4] = ["Contains_Classifier", "Typed", "Reference", "Odd"];

fn graph_strategy() -> impl Strategy<Value = IrGraph> {
    (0usize..=20).prop_flat_map(|n| {
        let nodes = prop::collection::vec((0..ECORE_TYPES.len(), prop::option::of("[A-Za-z ]{0,12}")), n);
        let edges = prop::collection::vec((0..n.max(1), 0..n.max(1), any::<bool>(), 0..EDGE_TYPES.len()), 0..=40);
        (Just(n), nodes, edges)
    })
    .prop_map(|(n, nodes, edges)| IrGraph {
        id: "g".into(),
        nodes: nodes
            .into_iter()
            .enumerate()
            .map(|(i, (t, name))| IrNode {
                id: format!("n{i}"),
                node_type: ECORE_TYPES[t].into(),
                name,
                data: Properties::new(),
            })
            .collect(),
        edges: if n == 0 {
            Vec::new()
        } else {
            edges
                .into_iter()
                .enumerate()
                .map(|(i, (s, t, c, ty))| IrEdge {
                    id: format!("e{i}"),
                    edge_type: EDGE_TYPES[ty].into(),
                    name: None,
                    source: format!("n{s}"),
                    target: format!("n{t}"),
                    is_containment: c,
                    data: Properties::new(),
                })
                .collect()
        },
        ..IrGraph::default()
    })
}

fn in_range(score: f64) -> bool {
    (0.0..=100.0).contains(&score)
}

proptest! {
    #[test]
    fn d1_scores_in_range(success in 0u64..500, partial in 0u64..500, failed in 0u64..500, warned in 0u64..500,
                          loaded in 0u64..10_000, skipped in 0u64..10_000) {
        let n = success + partial + failed;
        if let Some(s) = parse_status_score(n, success, partial) {
            prop_assert!(in_range(s));
        }
        if let Some(s) = warning_score(n, warned.min(n)) {
            prop_assert!(in_range(s));
        }
        prop_assert!(in_range(loaded_score(loaded, skipped)));
    }

    #[test]
    fn d1_m1_monotone(success in 0u64..100, partial in 1u64..100, failed in 0u64..100) {
        let n = success + partial + failed;
        let base = parse_status_score(n, success, partial).unwrap();
        // partial -> success
        prop_assert!(parse_status_score(n, success + 1, partial - 1).unwrap() >= base);
        if success > 0 {
            // success -> failure
            prop_assert!(parse_status_score(n, success - 1, partial).unwrap() <= base);
        }
    }

    #[test]
    fn presence_score_in_range(cov in 0.0f64..=100.0, u in 0.0f64..=1.0) {
        prop_assert!(in_range(presence_score(cov, u)));
    }

    #[test]
    fn structural_invariants(g in graph_strategy()) {
        let deg: u64 = degrees(&g).iter().sum();
        prop_assert_eq!(deg, 2 * g.edges.len() as u64);

        let c = connectivity(&g);
        let n = g.nodes.len() as u64;
        if n >= 1 {
            prop_assert!(1 <= c.n_components && c.n_components <= n);
        } else {
            prop_assert_eq!(c.n_components, 0);
        }
        prop_assert!(c.n_isolated <= c.n_components);
        prop_assert!(c.largest_component_size <= n);

        let d = containment_depth(&g);
        prop_assert!(d.max_depth <= n);
        prop_assert_eq!(d.n_roots + d.n_contained, n);
    }

    #[test]
    fn ttr_bounds(g in graph_strategy()) {
        let labels = collect_labels(&g, &LexicalMeasures::default());
        let (total, vocab, ttr) = diversity(&labels.labels);
        if let Some(ttr) = ttr {
            prop_assert!(ttr <= 1.0 && ttr >= 1.0 / total as f64);
            prop_assert!(vocab <= total);
        } else {
            prop_assert_eq!(total, 0);
        }
    }

    #[test]
    fn dataset_aggregates_ignore_model_order(gs in prop::collection::vec(graph_strategy(), 1..6)) {
        let catalog = builtin_catalog("Ecore").unwrap();
        let graphs: Vec<IrGraph> = gs
            .into_iter()
            .enumerate()
            .map(|(i, mut g)| { g.id = format!("m{i}"); g })
            .collect();
        let lex = LexicalMeasures::default();
        let forward: Vec<_> = graphs.iter().map(|g| (g.id.clone(), collect_labels(g, &lex))).collect();
        let backward: Vec<_> = forward.iter().rev().cloned().collect();
        prop_assert_eq!(label_presence(&forward).dataset, label_presence(&backward).dataset);

        let matched: Vec<_> = graphs.iter().map(|g| (g.id.clone(), match_constructs(g, &catalog))).collect();
        let reversed: Vec<_> = matched.iter().rev().cloned().collect();
        let (a, b) = (construct_presence(&matched, &catalog), construct_presence(&reversed, &catalog));
        prop_assert_eq!(&a.dataset, &b.dataset);
        if let Some(s) = a.dataset.score {
            prop_assert!(in_range(s));
        }
        let (a, b) = (construct_frequency(&matched, &catalog), construct_frequency(&reversed, &catalog));
        prop_assert_eq!(&a.dataset, &b.dataset);
        if let Some(s) = a.dataset.score {
            prop_assert!(in_range(s));
        }

        let refs: Vec<&IrGraph> = graphs.iter().collect();
        let rev: Vec<&IrGraph> = graphs.iter().rev().collect();
        prop_assert_eq!(model_size(&refs).dataset, model_size(&rev).dataset);
    }
}
