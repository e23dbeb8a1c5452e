use std::fs;
use std::path::PathBuf;

use mcc_cover::engine::{run_hyper_stage, CoverTest, SolveOptions, SolveStatus};
use mcc_cover::harness::{experiment_graph, RandomModel};
use mcc_cover::hyper::DEFAULT_HYPEREDGE_LIMIT;
use mcc_cover::oracle::min_vertex_cover_exact;
use mcc_cover::{build_h, pad_to_power_of_two, parse_graph, solve, LabeledGraph};

const INDICES: [u64; 4] = [50229, 83634, 98599, 127933];

fn fixture(index: u64) -> LabeledGraph {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/fixtures/stage1_failure_{index}.txt"));
    parse_graph(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fixtures_come_from_the_rotation_stream() {
    for idx in INDICES {
        let (_, g) = experiment_graph(RandomModel::Rotation, 4, 0.3, 12345, idx);
        assert_eq!(g, fixture(idx), "index {idx}");
    }
}

#[test]
fn stage_two_rescues_stage_one_failures() {
    let h = build_h(4, false).unwrap();
    for idx in INDICES {
        let g = fixture(idx);
        let min = min_vertex_cover_exact(&g).unwrap().min_size;
        for matlab_2plus in [false, true] {
            let opts = SolveOptions { matlab_2plus, verify_with_oracle: true, ..Default::default() };
            let r = solve(&g, &h, &opts).unwrap();
            assert_eq!(r.status, SolveStatus::Applicable { stage: 2 }, "index {idx}");
            assert!(!r.stages[0].is_clique);
            let grade = r.stages[0].found_grade.unwrap();
            assert_eq!(r.stages[1].from_grade, grade);
            assert!(r.stages[1].found_grade.unwrap() >= grade);
            assert_eq!(r.cover.len(), min);
            assert!(g.is_vertex_cover(r.cover));
        }
        let stage_one_only = solve(&g, &h, &SolveOptions { max_stage: 1, ..Default::default() }).unwrap();
        assert_eq!(stage_one_only.status, SolveStatus::NotApplicable { max_stage: 1 });
        assert!(stage_one_only.cover.is_empty());
    }
}

#[test]
fn hyperedge_engine_at_t2_on_failures() {
    let h = build_h(4, false).unwrap();
    for idx in INDICES {
        let g = fixture(idx);
        let r = solve(&g, &h, &SolveOptions::default()).unwrap();
        let padded = pad_to_power_of_two(&g);
        let mut cover = CoverTest::new(&padded);
        let from = r.stages[0].found_grade.unwrap();
        let t2 = run_hyper_stage(&h, 2, from, &mut cover, DEFAULT_HYPEREDGE_LIMIT).unwrap();
        assert_eq!((t2.is_clique, t2.i_labels), (r.stages[1].is_clique, r.stages[1].i_labels), "index {idx}");
    }
}
