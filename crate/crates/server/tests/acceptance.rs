//! One PASS/FAIL line per headline criterion. Runs without the test harness
//! so the lines always reach stdout.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::Gen;
use manipos::action::{CanvasPath, DragSource, DropTarget, ValueRef};
use manipos::{Action, ActionError, Config, Session, SessionError};
use manipos_core::interp::{run, run_with, FuelPolicy, Payload, RunOptions, Verdict};
use manipos_core::nonlinear::{pipeline, reorder, scope};
use manipos_core::synth::{
    accept_fill, pending_fills, reject_fill, score, synthesize, Filled, Heuristic, Pcfg, Recency, SynthOptions,
};
use manipos_core::syntax::{not_hash, parse, parse_expr, print, Attrs, ExprKind, NodeId, Program};
use manipos_core::types::CtorTable;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("pcfg-anchor", pcfg_anchor),
        ("hole-semantics", hole_semantics),
        ("fuel", fuel),
        ("reordering", reordering),
        ("case-split", case_split),
        ("synthesis", synthesis),
        ("heuristics", heuristics),
        ("bimodality", bimodality),
        ("latency", latency),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(note) => println!("PASS {}. {name} ({secs:.2} s) {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.2} s) {why}", i + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn passes(p: &Program, extra: &str) -> bool {
    let src = format!("{}\nlet () = assert ({extra})\n", print(p));
    let q = parse(&src).unwrap();
    run(&q, FuelPolicy::default()).asserts.last().unwrap().verdict == Verdict::Pass
}

fn pcfg_anchor() -> Outcome {
    let t = Instant::now();
    let scope = Recency(vec!["tail".into(), "hd".into(), "list".into()]);
    let p = score(Pcfg::builtin(), &CtorTable::new(&[]), &scope, &parse_expr("tail", &[]).unwrap()).map_err(|e| e.to_string())?;
    let anchor = 0.52 * 0.73 * 0.31;
    ensure!((p - anchor).abs() < 1e-9, "score {p} vs {anchor}");
    ensure!((p * 100.0).round() == 12.0, "{p} does not round to 12%");
    ensure!(t.elapsed() < Duration::from_millis(100), "took {:?}", t.elapsed());
    Ok(format!("p = {p:.6}"))
}

fn hole_semantics() -> Outcome {
    let t = Instant::now();
    for seed in 0..500 {
        let src = Gen::new(seed, 20).program(6);
        let p = parse(&src).map_err(|e| format!("seed {seed}: {e:?}"))?;
        catch_unwind(|| run(&p, FuelPolicy::default())).map_err(|_| format!("seed {seed} crashed"))?;
    }
    let p = parse("let e = (??) + (??)\n\nlet c = 1 + e\n\nlet t = ((??), 1)\n\nlet l = (??) :: []\n").unwrap();
    let r = run(&p, FuelPolicy::default());
    let v = |n: &str| r.top_env.lookup(n).unwrap().clone();
    ensure!(v("e").is_bomb() && v("c").is_bomb(), "eliminations did not bomb");
    let t_val = v("t");
    ensure!(matches!(t_val.payload(), Payload::Tuple(xs) if xs[0].is_hole()), "tuple lost its hole");
    ensure!(v("l").as_list().is_some_and(|xs| xs[0].is_hole()), "list lost its hole");
    ensure!(t.elapsed() < Duration::from_secs(10), "took {:?}", t.elapsed());
    Ok("500 programs".into())
}

fn fuel() -> Outcome {
    let src = "let rec length list =\n  let length2 = length (??) in\n  (??)\n\n\
               let () = assert (length [1; 2] = 2)\n\nlet later = 40 + 2\n";
    let t = Instant::now();
    let r = run(&parse(src).unwrap(), FuelPolicy::default());
    let elapsed = t.elapsed();
    ensure!(r.top_env.lookup("later").is_some_and(|v| v.to_string() == "42"), "later binding not evaluated");
    let longest = r.trace.item_spans.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
    ensure!(longest <= 1000, "trace of {longest} entries for one binding");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("longest binding trace {longest}"))
}

fn reordering() -> Outcome {
    let t = Instant::now();
    let tangled = "let a = 1\n\nlet c =\n  let x = (a, b, c, d) in\n  let a = 0 in\n  x\n\nlet b = 2\n";
    let q = pipeline(&parse(tangled).unwrap()).map_err(|e| e.to_string())?;
    ensure!(scope::program_free_vars(&q).is_empty(), "unbound uses remain:\n{}", print(&q));
    ensure!(q.top_binding("c").is_some_and(|c| c.rec), "c is not rec");
    ensure!(q.top_binding("d").is_some_and(|d| d.expr.is_hole()), "d missing or not a hole");
    for seed in 0..1000 {
        let p = parse(&Gen::new(seed, 0).scrambled(6, false)).unwrap();
        let once = reorder(&p).map_err(|e| e.to_string())?;
        ensure!(reorder(&once).unwrap().same_structure(&once), "seed {seed} not idempotent");
    }
    ensure!(t.elapsed() < Duration::from_secs(10), "took {:?}", t.elapsed());
    Ok("1000 random programs".into())
}

fn apply(text: &str, a: &Action) -> Result<String, ActionError> {
    let synth = |p: &Program| synthesize(p, &SynthOptions::default()).map(|s| s.program);
    manipos::action::apply_to_text(text, a, &synth)
}

fn holes_of(p: &Program) -> Vec<NodeId> {
    let mut out = Vec::new();
    p.walk_exprs(&mut |e| {
        if e.is_hole() {
            out.push(e.id)
        }
    });
    out
}

fn drag_tail(text: &str, hole: NodeId) -> Result<String, String> {
    let p = parse(text).unwrap();
    let b = p.top_binding("length").unwrap();
    let ExprKind::Fun(param, _) = &b.expr.kind else { return Err("length is not a function".into()) };
    let a = Action::DragDrop {
        source: DragSource::Value(ValueRef { node: param.id.0, frame: 1, path: vec![("::".into(), 1)] }),
        target: DropTarget::Node(hole.0),
    };
    apply(text, &a).map_err(|e| e.to_string())
}

fn case_split() -> Outcome {
    let t = Instant::now();
    let src = "let rec length list =\n  let one = 1 in\n  let length2 = length (??) in\n  (??)\n\n\
               let () = assert (length [1; 2] = 2)\n";
    let first = drag_tail(src, holes_of(&parse(src).unwrap())[0])?;
    let p = parse(&first).unwrap();
    let body = &p.top_binding("length").unwrap().expr;
    let ExprKind::Fun(_, body) = &body.kind else { return Err("not a function".into()) };
    let ExprKind::Let(one, rest) = &body.kind else { return Err(format!("`one` not hoisted:\n{first}")) };
    ensure!(one.pat.as_var() == Some("one"), "`one` not hoisted:\n{first}");
    let ExprKind::Match(_, branches) = &rest.kind else { return Err(format!("no case split:\n{first}")) };
    ensure!(branches.len() == 2 && branches[0].body.is_hole(), "nil branch is not a hole:\n{first}");
    let mentions_call = |e: &manipos_core::syntax::Expr| {
        let mut found = false;
        e.walk(&mut |x| {
            if let ExprKind::App(f, args) = &x.kind {
                found |= f.as_var() == Some("length") && args[0].as_var() == Some("tail");
            }
        });
        found
    };
    ensure!(mentions_call(&branches[1].body) && !mentions_call(&branches[0].body), "`length tail` misplaced:\n{first}");
    ensure!(pipeline(&p).unwrap().same_structure(&p), "not a fixed point");

    // The same extraction into the remaining hole reuses the split.
    let last = *holes_of(&p).last().unwrap();
    let second = drag_tail(&first, last)?;
    let q = parse(&second).unwrap();
    let mut matches = 0;
    q.walk_exprs(&mut |e| matches += matches!(e.kind, ExprKind::Match(..)) as usize);
    ensure!(matches == 1 && !second.contains("tail2"), "second extraction re-split:\n{second}");
    ensure!(second == first.replace("length tail in\n      (??)", "length tail in\n      tail"), "{second}");
    ensure!(t.elapsed() < Duration::from_secs(1), "took {:?}", t.elapsed());
    Ok(String::new())
}

fn synthesis() -> Outcome {
    let cases = [
        (
            "length",
            "let length x1 = (??)\n\nlet () = assert (length [0; 0; 0] = 3)\n\nlet () = assert (length [0; 0] = 2)\n",
            "length [0; 0; 0; 0] = 4",
        ),
        (
            "append",
            "let append x1 x2 = (??)\n\nlet () = assert (append [1; 2] [3] = [1; 2; 3])\n\nlet () = assert (append [] [4] = [4])\n",
            "append [5] [6; 7] = [5; 6; 7]",
        ),
        (
            "mirror",
            "type 'a ltree = Leaf | Node of 'a ltree * 'a * 'a ltree\n\n\
             let mirror x1 = (??)\n\n\
             let () = assert (mirror (Node (Leaf, 1, Leaf)) = Node (Leaf, 1, Leaf))\n\n\
             let () = assert (mirror (Node (Node (Leaf, 1, Node (Leaf, 2, Leaf)), 3, Node (Node (Leaf, 4, Leaf), 5, Leaf))) \
             = Node (Node (Leaf, 5, Node (Leaf, 4, Leaf)), 3, Node (Node (Leaf, 2, Leaf), 1, Leaf)))\n",
            "mirror (Node (Node (Node (Leaf, 5, Leaf), 6, Leaf), 7, Node (Leaf, 8, Node (Leaf, 9, Leaf)))) \
             = Node (Node (Node (Leaf, 9, Leaf), 8, Leaf), 7, Node (Leaf, 6, Node (Leaf, 5, Leaf)))",
        ),
    ];
    let mut ok = Vec::new();
    let mut notes = Vec::new();
    for (name, sketch, held_out) in cases {
        let t = Instant::now();
        let got = synthesize(&parse(sketch).unwrap(), &SynthOptions::default());
        let secs = t.elapsed().as_secs_f64();
        match got {
            Ok(s) if secs < 40.0 && passes(&s.program, held_out) => ok.push(name),
            Ok(_) => notes.push(format!("{name}: wrong or late ({secs:.1} s)")),
            Err(e) => notes.push(format!("{name}: {e}")),
        }
        notes.push(format!("{name} {secs:.2} s"));
    }
    ensure!(ok.len() >= 2, "{} of 3 [{}]", ok.len(), notes.join(", "));
    Ok(format!("{}/3 [{}]", ok.len(), notes.join(", ")))
}

fn violation(src: &str, constant: &[bool], refine_root: bool, originals: &[(NodeId, Attrs)]) -> Option<Heuristic> {
    let p = parse(src).unwrap();
    let ids = pending_fills(&p);
    let watch: HashSet<NodeId> = ids.iter().copied().collect();
    let r = run_with(&p, &RunOptions { fuel: FuelPolicy::default(), lean: true, watch: Some(&watch) });
    let fills = ids.iter().copied().zip(constant.iter().copied()).collect();
    let rf = refine_root.then(|| manipos_core::synth::refine::Refinement {
        hole: p.bindings().next().unwrap().expr.id,
        params: vec!["x1".into()],
        holes: vec![],
    });
    Filled { program: &p, run: &r, fills, refinement: rf.as_ref(), originals }.violation()
}

fn heuristics() -> Outcome {
    let rules = [
        ("a", violation("let f x1 = (x1 [@synth])\n\nlet () = assert (f 1 = 2)", &[false], false, &[]), Heuristic::AssertionsPass),
        (
            "b",
            violation(
                "let f x1 =\n  match x1 with\n  | [] -> (0 [@synth])\n  | hd :: tail -> (5 [@synth])\n\n\
                 let () = assert (f [] = 0)\n\nlet () = assert (f [1] = 5)",
                &[true, true],
                false,
                &[],
            ),
            Heuristic::OneConstant,
        ),
        ("c", violation("let f x1 = (0 [@synth])\n\nlet () = assert (f 5 = 0)", &[true], true, &[]), Heuristic::ParamsUsed),
        (
            "e",
            violation("let f x1 = (x1 + 1 [@synth])\n\nlet g y = (y [@synth])\n\nlet () = assert (f 1 = 2)", &[false, false], false, &[]),
            Heuristic::FillsEvaluated,
        ),
    ];
    for (name, got, want) in rules {
        ensure!(got == Some(want), "rule ({name}) gave {got:?}");
    }
    let good = "let f x1 = (x1 + 1 [@synth])\n\nlet () = assert (f 1 = 2)";
    ensure!(violation(good, &[false], true, &[]).is_none(), "a passing candidate was rejected");
    let fill = pending_fills(&parse(good).unwrap())[0];
    let rejected = Attrs { not_hashes: vec![not_hash(parse(good).unwrap().find_expr(fill).unwrap())], ..Attrs::default() };
    ensure!(violation(good, &[false], false, &[(fill, rejected)]) == Some(Heuristic::NotRejected), "rule (d) missed");

    // A rejected fill is never offered again at the same hole.
    let p = parse("let f x1 = (??)\n\nlet () = assert (f 1 = 2)\n\nlet () = assert (f 5 = 6)").unwrap();
    let first = synthesize(&p, &SynthOptions::default()).map_err(|e| e.to_string())?;
    let id = first.fills[0];
    let old = not_hash(first.program.find_expr(id).unwrap());
    let again = synthesize(&reject_fill(&first.program, id).unwrap(), &SynthOptions::default()).map_err(|e| e.to_string())?;
    ensure!(not_hash(again.program.find_expr(id).unwrap()) != old, "rejected term re-offered");
    ensure!(accept_fill(&again.program, id).is_ok(), "re-offered fill not pending");
    Ok(String::new())
}

const BASES: [&str; 3] = [
    "let rec length list =\n  (??)\n\nlet () = assert (length [0; 0; 0] = 3)\n\nlet () = assert (length [0; 0] = 2)\n",
    "let xs = [1; 2]\n\nlet rec length list =\n  match list with\n  | [] -> 0\n  | hd :: tail -> 1 + length tail\n\n\
     let n = length xs\n\nlet () = assert (length xs = 2)\n",
    "let f x1 = (x1 + 1 [@synth])   \n\n\nlet () = assert (f 1 = 2)\n",
];

const TEXTS: [&str; 12] = ["1", "x + 1", "(??)", "[0; 0]", "length", "fun y -> y", "1 +", "hd", "z", "n * 2", "(1, 2)", "let"];

fn random_action(rng: &mut StdRng, p: &Program) -> Action {
    let id = |rng: &mut StdRng| rng.gen_range(0..p.next_id + 2);
    let text = |rng: &mut StdRng| TEXTS[rng.gen_range(0..TEXTS.len())].to_string();
    let funs: Vec<u32> = p.bindings().filter(|b| matches!(b.expr.kind, ExprKind::Fun(..))).map(|b| b.id.0).collect();
    let fun = |rng: &mut StdRng| if funs.is_empty() { 0 } else { funs[rng.gen_range(0..funs.len())] };
    let vref = |rng: &mut StdRng| ValueRef {
        node: rng.gen_range(0..p.next_id + 1),
        frame: rng.gen_range(0..4),
        path: if rng.gen_bool(0.5) { vec![] } else { vec![("::".into(), rng.gen_range(0..2))] },
    };
    match rng.gen_range(0..14) {
        0 => Action::AddCode { canvas_path: CanvasPath::Top, text: text(rng) },
        1 => Action::AddCode { canvas_path: CanvasPath::Function(NodeId(fun(rng))), text: text(rng) },
        2 | 3 => Action::EditNode { node_id: id(rng), text: text(rng) },
        4 => Action::DeleteNode { node_id: id(rng) },
        5 => Action::DragDrop {
            source: if rng.gen_bool(0.5) { DragSource::Node(id(rng)) } else { DragSource::Value(vref(rng)) },
            target: if rng.gen_bool(0.7) { DropTarget::Node(id(rng)) } else { DropTarget::Canvas(CanvasPath::Top) },
        },
        6 => Action::SetPos { node_id: id(rng), x: rng.gen_range(0..500), y: rng.gen_range(0..500) },
        7 => Action::Destruct { value_ref: vref(rng) },
        8 => Action::FocusFrame { function_node_id: fun(rng), frame_no: rng.gen_range(0..4) },
        9 => Action::AddAssertColumn { function_node_id: fun(rng), args: vec!["[1; 2]".into()], expected: "2".into() },
        10 => Action::AcceptFill { node_id: id(rng) },
        11 => Action::RejectFill { node_id: id(rng) },
        12 => Action::Undo,
        _ => Action::Redo,
    }
}

fn bimodality() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("prog.ml");
    let mut rng = StdRng::seed_from_u64(7);
    let (mut steps, mut applied) = (0usize, 0usize);
    for seq in 0..10_000u32 {
        let base = BASES[seq as usize % BASES.len()];
        fs::write(&path, base).unwrap();
        let mut s = Session::open(&path, Config::default()).map_err(|e| e.to_string())?;
        for _ in 0..rng.gen_range(1..=5) {
            let p = s.program().map_err(|e| format!("seq {seq}: {e}"))?;
            let a = random_action(&mut rng, &p);
            match s.handle(&a, None) {
                Ok(_) => applied += 1,
                Err(SessionError::Action(_)) => {}
                Err(e) => return Err(format!("seq {seq}: {e}")),
            }
            steps += 1;
            let disk = fs::read_to_string(&path).unwrap();
            ensure!(parse(&disk).is_ok(), "seq {seq}: {a:?} left unparseable text:\n{disk}");
            let doc = s.document();
            ensure!(doc.error.is_none(), "seq {seq}: render error after {a:?}");
        }
        loop {
            match s.handle(&Action::Undo, None) {
                Ok(_) => {}
                Err(SessionError::Action(ActionError::NothingToUndo)) => break,
                Err(e) => return Err(format!("seq {seq}: undo failed: {e}")),
            }
        }
        ensure!(fs::read_to_string(&path).unwrap() == base, "seq {seq}: undo-all did not restore bytes");
    }
    Ok(format!("10000 sequences, {steps} actions, {applied} applied"))
}

fn latency() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("exercises.ml");
    fs::write(&path, include_str!("../fixtures/exercises.ml")).unwrap();
    let mut s = Session::open(&path, Config::default()).map_err(|e| e.to_string())?;
    s.document();
    let mut rng = StdRng::seed_from_u64(11);
    let mut times = Vec::new();
    while times.len() < 200 {
        let p = s.program().unwrap();
        let a = random_action(&mut rng, &p);
        if matches!(a, Action::Undo | Action::Redo) {
            continue;
        }
        let t = Instant::now();
        let r = s.handle(&a, None);
        s.document();
        times.push(t.elapsed());
        if r.is_ok() && !matches!(a, Action::FocusFrame { .. }) {
            let _ = s.handle(&Action::Undo, None);
        }
    }
    times.sort();
    let median = times[times.len() / 2];
    ensure!(median < Duration::from_millis(200), "median {median:?}");
    Ok(format!("median {:.1} ms, max {:.1} ms", median.as_secs_f64() * 1e3, times.last().unwrap().as_secs_f64() * 1e3))
}
