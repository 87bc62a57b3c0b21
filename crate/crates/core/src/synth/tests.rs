use super::*;
use crate::interp::{run, Verdict};
use crate::syntax::{parse, print, print_expr};

fn passes(p: &Program, extra: &str) -> bool {
    let src = format!("{}\nlet () = assert ({extra})\n", print(p));
    let q = parse(&src).unwrap();
    run(&q, FuelPolicy::default()).asserts.last().unwrap().verdict == Verdict::Pass
}

#[test]
fn length_from_two_examples() {
    let p = parse("let length x1 = (??)\n\nlet () = assert (length [0; 0; 0] = 3)\n\nlet () = assert (length [0; 0] = 2)").unwrap();
    let s = synthesize(&p, &SynthOptions::default()).unwrap();
    assert!(passes(&s.program, "length [0; 0; 0; 0] = 4"), "{}", print(&s.program));
    assert!(s.probability > 0.0 && s.probability <= 1.0);
    assert_eq!(s.fills.len(), 2);
    for f in &s.fills {
        assert!(s.program.find_expr(*f).unwrap().attrs.is_pending());
    }
}

#[test]
fn append_from_two_examples() {
    let p = parse(
        "let append x1 x2 = (??)\n\nlet () = assert (append [1; 2] [3] = [1; 2; 3])\n\nlet () = assert (append [] [4] = [4])",
    )
    .unwrap();
    let s = synthesize(&p, &SynthOptions::default()).unwrap();
    assert!(passes(&s.program, "append [5] [6; 7] = [5; 6; 7]"), "{}", print(&s.program));
}

#[test]
fn single_leaf_is_the_most_likely_passing_term() {
    let p = parse("let f x1 = (??)\n\nlet () = assert (f 1 = 2)\n\nlet () = assert (f 5 = 6)").unwrap();
    let s = synthesize(&p, &SynthOptions::default()).unwrap();
    assert_eq!(print(&s.program).lines().next().unwrap(), "let f x1 = (x1 + 1 [@synth])");
    let expect = 0.20 * 0.27 * 0.040 * (0.52 * 0.73 * 0.31) * (0.066 * 0.52 * 0.26);
    assert!((s.probability - expect).abs() < 1e-15);
}

#[test]
fn refines_unknown_function_from_io_examples() {
    let p = parse("let f = (??)\n\nlet () = assert (f 3 = 4)\n\nlet () = assert (f 0 = 1)").unwrap();
    let s = synthesize(&p, &SynthOptions::default()).unwrap();
    assert!(passes(&s.program, "f 10 = 11"), "{}", print(&s.program));
}

#[test]
fn no_holes_means_nothing_to_search() {
    let p = parse("let f x = x\n\nlet () = assert (f 1 = 1)").unwrap();
    assert_eq!(synthesize(&p, &SynthOptions::default()).unwrap_err(), SynthError::SearchExhausted);
}

#[test]
fn cancellation_stops_the_search() {
    let p = parse("let f x1 = (??)\n\nlet () = assert (f 1 = 1000)\n\nlet () = assert (f 2 = 7)").unwrap();
    let flag = Arc::new(AtomicBool::new(true));
    let opts = SynthOptions { cancel: Some(flag), ..Default::default() };
    assert_eq!(synthesize(&p, &opts).unwrap_err(), SynthError::Cancelled);
}

#[test]
fn soft_limit_reports_timeout() {
    let p = parse("let f x1 = (??)\n\nlet () = assert (f 1 = 1000)\n\nlet () = assert (f 2 = 7)").unwrap();
    let opts = SynthOptions { soft_limit: Duration::ZERO, ..Default::default() };
    assert_eq!(synthesize(&p, &opts).unwrap_err(), SynthError::Timeout);
}

fn rule(src: &str, fills: &[(usize, bool)], refinement: Option<refine::Refinement>, originals: &[(NodeId, Attrs)]) -> Option<Heuristic> {
    let p = parse(src).unwrap();
    let mut ids = Vec::new();
    p.walk_exprs(&mut |e| {
        if e.attrs.is_pending() {
            ids.push(e.id)
        }
    });
    let watch: HashSet<NodeId> = ids.iter().copied().collect();
    let r = run_with(&p, &RunOptions { fuel: FuelPolicy::default(), lean: true, watch: Some(&watch) });
    let fills: Vec<(NodeId, bool)> = fills.iter().map(|(i, c)| (ids[*i], *c)).collect();
    Filled { program: &p, run: &r, fills, refinement: refinement.as_ref(), originals }.violation()
}

#[test]
fn heuristic_a_failing_assertion() {
    let src = "let f x1 = (x1 [@synth])\n\nlet () = assert (f 1 = 2)";
    assert_eq!(rule(src, &[(0, false)], None, &[]), Some(Heuristic::AssertionsPass));
    let src = "let f x1 = (x1 + 1 [@synth])\n\nlet () = assert (f 1 = 2)";
    assert_eq!(rule(src, &[(0, false)], None, &[]), None);
}

#[test]
fn heuristic_b_two_constant_holes() {
    let src = "let f x1 =\n  match x1 with\n  | [] -> (0 [@synth])\n  | hd :: tail -> (5 [@synth])\n\n\
               let () = assert (f [] = 0)\n\nlet () = assert (f [1] = 5)";
    assert_eq!(rule(src, &[(0, true), (1, true)], None, &[]), Some(Heuristic::OneConstant));
    assert_eq!(rule(src, &[(0, true), (1, false)], None, &[]), None);
}

#[test]
fn heuristic_c_unused_parameter() {
    let src = "let f x1 = (0 [@synth])\n\nlet () = assert (f 5 = 0)";
    let p = parse(src).unwrap();
    let root = p.bindings().next().unwrap().expr.id;
    let rf = refine::Refinement { hole: root, params: vec!["x1".into()], holes: vec![] };
    assert_eq!(rule(src, &[(0, true)], Some(rf.clone()), &[]), Some(Heuristic::ParamsUsed));
    let src = "let f x1 = (x1 - 5 [@synth])\n\nlet () = assert (f 5 = 0)";
    assert_eq!(rule(src, &[(0, false)], Some(rf), &[]), None);
}

#[test]
fn heuristic_d_rejected_term() {
    let src = "let f x1 = (x1 + 1 [@synth])\n\nlet () = assert (f 1 = 2)";
    let p = parse(src).unwrap();
    let fill = pending_fills(&p)[0];
    let hash = not_hash(p.find_expr(fill).unwrap());
    let rejected = Attrs { not_hashes: vec![hash], ..Attrs::default() };
    assert_eq!(rule(src, &[(0, false)], None, &[(fill, rejected)]), Some(Heuristic::NotRejected));
    let other = Attrs { not_hashes: vec!["0000000000000000".into()], ..Attrs::default() };
    assert_eq!(rule(src, &[(0, false)], None, &[(fill, other)]), None);
}

#[test]
fn heuristic_e_unevaluated_fill() {
    let src = "let f x1 = (x1 + 1 [@synth])\n\nlet g y = (y [@synth])\n\nlet () = assert (f 1 = 2)";
    assert_eq!(rule(src, &[(0, false), (1, false)], None, &[]), Some(Heuristic::FillsEvaluated));
}

#[test]
fn rejected_fill_is_not_offered_again() {
    let p = parse("let f x1 = (??)\n\nlet () = assert (f 1 = 2)\n\nlet () = assert (f 5 = 6)").unwrap();
    let first = synthesize(&p, &SynthOptions::default()).unwrap();
    let fill = first.fills[0];
    let old = print_expr(&first.program.find_expr(fill).unwrap().without_attrs());
    let rejected = reject_fill(&first.program, fill).unwrap();
    let hole = rejected.find_expr(fill).unwrap();
    assert!(hole.is_hole());
    assert_eq!(hole.attrs.not_hashes.len(), 1);
    assert!(print(&rejected).contains("[@not "));
    let second = synthesize(&rejected, &SynthOptions::default()).unwrap();
    let new = print_expr(&second.program.find_expr(fill).unwrap().without_attrs());
    assert_ne!(old, new);
    assert!(passes(&second.program, "f 9 = 10"), "{}", print(&second.program));
    assert!(second.probability <= first.probability);
}

#[test]
fn accept_and_reject_bookkeeping() {
    let p = parse("let f x1 = (x1 + 1 [@not 0123456789abcdef] [@synth])").unwrap();
    let id = pending_fills(&p)[0];
    let a = accept_fill(&p, id).unwrap();
    assert_eq!(print(&a), "let f x1 = x1 + 1\n");
    assert_eq!(accept_fill(&a, id), Err(FillError::NotPending(id)));
    assert_eq!(reject_fill(&a, NodeId(9999)), Err(FillError::UnknownNode(NodeId(9999))));
    let r = reject_fill(&p, id).unwrap();
    let hole = r.find_expr(id).unwrap();
    assert!(hole.is_hole() && !hole.attrs.is_pending());
    assert_eq!(hole.attrs.not_hashes.len(), 2);
    assert!(pending_fills(&r).is_empty());
}

#[test]
fn mirror_from_two_examples() {
    let p = parse(
        "type 'a ltree = Leaf | Node of 'a ltree * 'a * 'a ltree\n\n\
         let mirror x1 = (??)\n\n\
         let () = assert (mirror (Node (Leaf, 1, Leaf)) = Node (Leaf, 1, Leaf))\n\n\
         let () = assert (mirror (Node (Node (Leaf, 1, Node (Leaf, 2, Leaf)), 3, Node (Node (Leaf, 4, Leaf), 5, Leaf))) = Node (Node (Leaf, 5, Node (Leaf, 4, Leaf)), 3, Node (Node (Leaf, 2, Leaf), 1, Leaf)))",
    )
    .unwrap();
    let s = synthesize(&p, &SynthOptions::default()).unwrap();
    assert!(
        passes(&s.program, "mirror (Node (Node (Node (Leaf, 5, Leaf), 6, Leaf), 7, Node (Leaf, 8, Node (Leaf, 9, Leaf)))) = Node (Node (Node (Leaf, 9, Leaf), 8, Leaf), 7, Node (Leaf, 6, Node (Leaf, 5, Leaf)))"),
        "{}",
        print(&s.program)
    );
}
