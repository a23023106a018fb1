//! End-to-end acceptance gate: one test per criterion, each printing a
//! pass line. Heavy corpus criteria parallelize across worker threads.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use buchic::automaton::{self, Acceptance, Automaton};
use buchic::bench::{self, Outcome, Pipeline};
use buchic::complement::{Limits, SliceConfig};
use buchic::oracle::{self, Verdict};
use buchic::parity;
use buchic::preopt::{self, SimKind};
use buchic::randgen::{self, GenSpec};
use buchic::slice::{self, Decoration, Slice};

fn a_fig1() -> Automaton {
    let mut a = Automaton::new(
        vec!["p".into(), "!p".into()],
        2,
        0,
        Acceptance::Buchi(BTreeSet::from([1])),
    )
    .unwrap();
    for (src, sym, dst) in [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 1)] {
        a.add_transition(src, sym, dst).unwrap();
    }
    a
}

fn nbw_corpus(count: usize, ns: &[usize], rs: &[f64], fs: &[f64], seed: u64) -> Vec<Automaton> {
    (0..count)
        .map(|i| {
            let spec = GenSpec {
                n: ns[i % ns.len()],
                alphabet_size: 2,
                transition_density: rs[(i / ns.len()) % rs.len()],
                acceptance_density: fs[(i / ns.len() / rs.len()) % fs.len()],
                seed: seed + i as u64,
            };
            randgen::generate(&spec).unwrap()
        })
        .collect()
}

/// Seeded deterministic parity automaton: one successor per (state,
/// symbol), priorities uniform in 0..=max_priority.
fn random_dpw(n: usize, sigma: usize, max_priority: u32, seed: u64) -> Automaton {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let priorities: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=max_priority)).collect();
    let alphabet = randgen::default_alphabet(sigma);
    let mut a = Automaton::new(alphabet, n, 0, Acceptance::Parity(priorities)).unwrap();
    for q in 0..n {
        for s in 0..sigma {
            a.add_transition(q, s, rng.gen_range(0..n)).unwrap();
        }
    }
    a
}

fn parallel_for(count: usize, body: impl Fn(usize) + Sync) {
    let jobs = std::thread::available_parallelism().map_or(4, |p| p.get());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(count.max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                body(i);
            });
        }
    });
}

fn assert_pass(v: Verdict, context: &str) {
    if let Verdict::Fail { witness, in_a, in_b } = v {
        panic!("{context}: witness {witness} (in a: {in_a}, in b: {in_b})");
    }
}

#[test]
fn criterion_1_figure_trace() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.oaf");
    buchic::oaf::write_oaf(&path, &a_fig1()).unwrap();

    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_buchic"))
            .args(args)
            .output()
            .unwrap();
        assert!(out.status.success(), "trace failed: {:?}", out);
        String::from_utf8(out.stdout).unwrap()
    };
    let plain = run(&["trace", "--in", path.to_str().unwrap(), "--word", "p,!p,p"]);
    assert_eq!(plain, "{q0}\n{q1}|{q0}\n{q1}|{q0}\n{q1}|{q0}\n");

    let decorated = run(&[
        "trace",
        "--in",
        path.to_str().unwrap(),
        "--word",
        "p,!p,p,!p",
        "--decorated",
    ]);
    assert_eq!(
        decorated,
        "{q0}\n{q1}0|{q0}1\n{q1}*|{q0}1\n{q1}0|{q0}1\n{q1}*|{q0}1\n"
    );
    assert!(start.elapsed().as_secs_f64() < 1.0, "trace took too long");
    println!("criterion 1 — figure-level trace reproduction: pass");
}

#[test]
fn criterion_2_oracle_soundness_all_constructions() {
    let corpus = nbw_corpus(200, &[4, 5, 6, 7], &[1.5, 2.0, 2.5], &[0.3, 0.5], 0xC2);
    let limits = Limits { max_states: 2_000_000, deadline: None };
    let flag_sets: Vec<SliceConfig> = (0..8)
        .map(|m| SliceConfig {
            use_d: m & 1 != 0,
            use_r: m & 2 != 0,
            use_m: m & 4 != 0,
        })
        .collect();
    parallel_for(corpus.len(), |i| {
        let a = &corpus[i];
        for cfg in &flag_sets {
            for (preopt_p, preopt_a) in
                [(false, false), (true, false), (false, true), (true, true)]
            {
                let pipeline = Pipeline {
                    preopt_p,
                    preopt_a,
                    construction: bench::Construction::Slice(*cfg),
                };
                let c = bench::complement_with(a, &pipeline, &limits)
                    .unwrap_or_else(|e| panic!("automaton {i}, {pipeline}: {e}"));
                let c = automaton::prune_dead(&c).unwrap();
                assert_pass(
                    oracle::check_complement(a, &c, 3, 4).unwrap(),
                    &format!("automaton {i}, {pipeline}"),
                );
            }
        }
    });
    println!("criterion 2 — oracle soundness of every construction: pass");
}

fn random_decorated_slice(a: &Automaton, rng: &mut ChaCha8Rng) -> Slice {
    loop {
        let k = rng.gen_range(1..=3usize.min(a.num_states()));
        let mut states: Vec<usize> = (0..a.num_states()).collect();
        states.shuffle(rng);
        let used = rng.gen_range(k..=a.num_states());
        let mut nodes = Vec::new();
        let mut pool = states[..used].to_vec();
        for i in 0..k {
            let take = if i + 1 == k {
                pool.len()
            } else {
                rng.gen_range(1..=pool.len() - (k - i - 1))
            };
            let set: BTreeSet<usize> = pool.drain(..take).collect();
            let d = match rng.gen_range(0..3) {
                0 => Decoration::Zero,
                1 => Decoration::Star,
                _ => Decoration::One,
            };
            nodes.push((set, d));
        }
        if let Ok(s) = Slice::decorated(nodes) {
            return s;
        }
    }
}

#[test]
fn criterion_3_lemma_suite() {
    let pool = nbw_corpus(20, &[4, 5, 6, 7], &[1.5, 2.0, 2.5], &[0.3, 0.5], 0xC3);
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3C3);
    for trial in 0..10_000 {
        let a = &pool[rng.gen_range(0..pool.len())];
        let s = random_decorated_slice(a, &mut rng);
        let sym = rng.gen_range(0..a.alphabet().len());
        let succ = |x: &Slice| slice::decorated_successor(a, x, sym, true).unwrap().unwrap();

        // merging two adjacent mergible nodes first must not change the
        // merged successor
        let merged_first = slice::merge_ij(&s, 1, 2).unwrap();
        assert_eq!(
            slice::merge(&succ(&merged_first)).unwrap(),
            slice::merge(&succ(&s)).unwrap(),
            "trial {trial}: merge_12 successor mismatch for {s}"
        );

        // a fully merged slice must step to exactly the merged successor
        // whenever that successor survives the doomed filter
        let t = succ(&s);
        if !t.is_bottom() && !t.is_doomed().unwrap() {
            let stepped = succ(&slice::merge(&s).unwrap());
            assert_eq!(
                slice::merge(&stepped).unwrap(),
                slice::merge(&t).unwrap(),
                "trial {trial}: merged-slice successor mismatch for {s}"
            );
        }
    }
    println!("criterion 3 — decorated-slice lemma suite (10,000 samples): pass");
}

#[test]
fn criterion_4_conversion_equivalence() {
    let failures = Mutex::new(Vec::<String>::new());
    parallel_for(100, |i| {
        let n = 2 + i % 5; // 2..=6
        let d = random_dpw(n, 2, 4, 0xC4 + i as u64);
        let c = parity::complement_dpw(&d).unwrap();
        let typical = parity::parity_to_buchi_typical(&c).unwrap();
        let improved = parity::parity_to_buchi_improved(&c).unwrap();
        let t_reach = automaton::reachable(&typical).len();
        let i_reach = automaton::reachable(&improved).len();
        if i_reach > t_reach {
            failures.lock().unwrap().push(format!(
                "dpw {i}: improved reachable {i_reach} > typical {t_reach}"
            ));
            return;
        }
        assert_pass(
            oracle::check_equivalent(&typical, &improved, 3, 4).unwrap(),
            &format!("dpw {i}: typical vs improved"),
        );
        assert_pass(
            oracle::check_complement(&d, &typical, 3, 4).unwrap(),
            &format!("dpw {i}: original vs typical"),
        );
        assert_pass(
            oracle::check_complement(&d, &improved, 3, 4).unwrap(),
            &format!("dpw {i}: original vs improved"),
        );
    });
    let failures = failures.into_inner().unwrap();
    assert!(failures.is_empty(), "{failures:?}");
    println!("criterion 4 — typical/improved conversion equivalence: pass");
}

/// All elementary cycles of the digraph, as vertex lists. Each cycle is
/// enumerated once, rooted at its smallest vertex.
fn elementary_cycles(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn dfs(
        v: usize,
        root: usize,
        adj: &[Vec<usize>],
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        cycles: &mut Vec<Vec<usize>>,
    ) {
        for &w in &adj[v] {
            if w == root {
                cycles.push(path.clone());
            } else if w > root && !on_path[w] {
                path.push(w);
                on_path[w] = true;
                dfs(w, root, adj, path, on_path, cycles);
                on_path[w] = false;
                path.pop();
            }
        }
    }
    let mut cycles = Vec::new();
    for root in 0..adj.len() {
        let mut on_path = vec![false; adj.len()];
        on_path[root] = true;
        dfs(root, root, adj, &mut vec![root], &mut on_path, &mut cycles);
    }
    cycles
}

#[test]
fn criterion_5_acceptance_maximization_oracle() {
    let corpus = nbw_corpus(200, &[3, 4, 5, 6], &[1.5, 2.0, 2.5], &[0.3, 0.5], 0xC5);
    for (i, a) in corpus.iter().enumerate() {
        let out = preopt::maximize_acceptance(a).unwrap();
        let f = a.buchi_states().unwrap();
        let adj: Vec<Vec<usize>> = (0..a.num_states())
            .map(|q| {
                (0..a.alphabet().len())
                    .flat_map(|s| a.successors(q, s).iter().copied())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect()
            })
            .collect();
        let cycles = elementary_cycles(&adj);
        let expected: BTreeSet<usize> = (0..a.num_states())
            .filter(|q| {
                f.contains(q)
                    || cycles
                        .iter()
                        .filter(|c| c.contains(q))
                        .all(|c| c.iter().any(|v| f.contains(v)))
            })
            .collect();
        assert_eq!(
            out.buchi_states().unwrap(),
            &expected,
            "automaton {i}: maximized set disagrees with cycle oracle"
        );
        assert_pass(
            oracle::check_equivalent(a, &out, 3, 4).unwrap(),
            &format!("automaton {i}: maximization changed the language"),
        );
    }
    println!("criterion 5 — acceptance maximization matches cycle oracle: pass");
}

fn naive_simulation(a: &Automaton, kind: SimKind) -> Vec<Vec<bool>> {
    let n = a.num_states();
    let syms = a.alphabet().len();
    let moves: Vec<Vec<Vec<usize>>> = match kind {
        SimKind::Direct => (0..n)
            .map(|q| (0..syms).map(|s| a.successors(q, s).iter().copied().collect()).collect())
            .collect(),
        SimKind::Reverse => {
            let mut pred = vec![vec![Vec::new(); syms]; n];
            for (src, s, dst) in a.transitions() {
                pred[dst][s].push(src);
            }
            pred
        }
    };
    let local = |p: usize, q: usize| -> bool {
        let acc_ok = match a.acceptance() {
            Acceptance::Buchi(f) => !f.contains(&p) || f.contains(&q),
            Acceptance::Parity(pr) => pr[p] == pr[q],
        };
        acc_ok && (kind == SimKind::Direct || p != a.initial() || q == a.initial())
    };
    let mut rel: Vec<Vec<bool>> = (0..n).map(|p| (0..n).map(|q| local(p, q)).collect()).collect();
    loop {
        let transfer = |p: usize, q: usize| {
            (0..syms).all(|s| {
                moves[p][s]
                    .iter()
                    .all(|&pp| moves[q][s].iter().any(|&qq| rel[pp][qq]))
            })
        };
        let next: Vec<Vec<bool>> = (0..n)
            .map(|p| (0..n).map(|q| rel[p][q] && transfer(p, q)).collect())
            .collect();
        if next == rel {
            return rel;
        }
        rel = next;
    }
}

#[test]
fn criterion_6_simulation_fixpoint_oracle() {
    let buchi = nbw_corpus(50, &[3, 4, 5, 6], &[1.5, 2.0, 2.5], &[0.3, 0.5], 0xC6);
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6C6);
    let parity_corpus: Vec<Automaton> = buchi
        .iter()
        .take(50)
        .map(|a| {
            let mut p = a.clone();
            let priorities = (0..p.num_states()).map(|_| rng.gen_range(0..=3)).collect();
            p.set_acceptance(Acceptance::Parity(priorities)).unwrap();
            p
        })
        .collect();
    for (i, a) in buchi.iter().chain(parity_corpus.iter()).enumerate() {
        for kind in [SimKind::Direct, SimKind::Reverse] {
            let got = preopt::compute_simulation(a, kind);
            let want = naive_simulation(a, kind);
            for p in 0..a.num_states() {
                for q in 0..a.num_states() {
                    assert_eq!(
                        got.contains(p, q),
                        want[p][q],
                        "automaton {i}, {kind:?}: pair ({p},{q})"
                    );
                }
            }
        }
        let simplified = match a.acceptance() {
            Acceptance::Buchi(_) => preopt::simplify_nbw(a).unwrap(),
            Acceptance::Parity(_) => preopt::simplify(a),
        };
        assert!(simplified.num_states() <= a.num_states());
        assert!(simplified.num_transitions() <= a.num_transitions());
        assert_pass(
            oracle::check_equivalent(a, &simplified, 3, 4).unwrap(),
            &format!("automaton {i}: simplification changed the language"),
        );
    }
    println!("criterion 6 — simulation fixpoint matches naive oracle: pass");
}

#[test]
fn criterion_7_directional_benchmark() {
    // 11 transition densities x 10 acceptance densities x 5 automata
    let mut specs = Vec::new();
    for ri in 0..11 {
        for fi in 0..10 {
            for k in 0..5 {
                specs.push(GenSpec {
                    n: 8,
                    alphabet_size: 2,
                    transition_density: 1.0 + 0.2 * ri as f64,
                    acceptance_density: 0.1 * (fi + 1) as f64,
                    seed: 0xC700 + (ri * 10 + fi) as u64 * 5 + k,
                });
            }
        }
    }
    let basic: Pipeline = "slice".parse().unwrap();
    let improved: Pipeline = "slice+ADRM".parse().unwrap();
    let records = Mutex::new(Vec::new());
    parallel_for(specs.len(), |i| {
        let a = randgen::generate(&specs[i]).unwrap();
        for p in [&basic, &improved] {
            let mut r = bench::run_task(&a, p, 10_000, 200_000).unwrap();
            r.task_id = format!("t{i:03}");
            records.lock().unwrap().push(r);
        }
    });
    let records = records.into_inner().unwrap();
    let stats = bench::aggregate_stats(&records).unwrap();
    let of = |name: &str| stats.iter().find(|s| s.pipeline == name).unwrap();
    let b = of("slice");
    let v = of("slice+ADRM");
    let done = |name: &str| {
        records
            .iter()
            .filter(|r| r.pipeline == name && r.outcome == Outcome::Done)
            .count()
    };
    assert!(b.effective_samples > 0, "no effective samples");
    assert!(
        v.mean_s_r.unwrap() < b.mean_s_r.unwrap(),
        "mean S_R not improved: {:?} vs {:?}",
        v.mean_s_r,
        b.mean_s_r
    );
    assert!(
        done("slice+ADRM") >= done("slice"),
        "improved variant finished fewer tasks"
    );
    println!(
        "criterion 7 — directional benchmark (550 automata, meanSR {} vs {}): pass",
        v.mean_s_r.unwrap(),
        b.mean_s_r.unwrap()
    );
}

#[test]
fn criterion_8_statistics_engine() {
    use num_rational::Rational64;
    let rec = |task: &str, pipeline: &str, outcome: Outcome, s_r: usize, s_l: usize| {
        let done = outcome == Outcome::Done;
        bench::BenchRecord {
            task_id: task.into(),
            pipeline: pipeline.into(),
            outcome,
            wall_millis: 0,
            s_r: done.then_some(s_r),
            s_l: done.then_some(s_l),
            universal: done.then_some(s_l == 0),
        }
    };
    // three-way tie on S_R splits 1/3 each; a timeout drops the task from
    // the effective samples entirely
    let records = vec![
        rec("t1", "p1", Outcome::Done, 4, 2),
        rec("t1", "p2", Outcome::Done, 4, 3),
        rec("t1", "p3", Outcome::Done, 4, 2),
        rec("t2", "p1", Outcome::Done, 9, 1),
        rec("t2", "p2", Outcome::Timeout, 0, 0),
        rec("t2", "p3", Outcome::BudgetExceeded, 0, 0),
        rec("t3", "p1", Outcome::Done, 6, 4),
        rec("t3", "p2", Outcome::Done, 2, 2),
        rec("t3", "p3", Outcome::Done, 8, 2),
    ];
    let stats = bench::aggregate_stats(&records).unwrap();
    let of = |name: &str| stats.iter().find(|s| s.pipeline == name).unwrap();
    assert_eq!(of("p1").effective_samples, 2);
    assert_eq!(of("p2").timeouts, 1);
    assert_eq!(of("p3").memouts, 1);
    assert_eq!(of("p1").win_share_s_r, Rational64::new(1, 3));
    assert_eq!(of("p2").win_share_s_r, Rational64::new(1, 3) + Rational64::from_integer(1));
    assert_eq!(of("p3").win_share_s_r, Rational64::new(1, 3));
    let total: Rational64 = stats.iter().map(|s| s.win_share_s_r).sum();
    assert_eq!(total, Rational64::from_integer(2));
    let total: Rational64 = stats.iter().map(|s| s.win_share_s_l).sum();
    assert_eq!(total, Rational64::from_integer(2));
    assert_eq!(of("p1").mean_s_r, Some(Rational64::from_integer(5)));
    assert_eq!(of("p1").mean_s_l, Some(Rational64::from_integer(3)));
    assert_eq!(of("p1").live_to_reachable, Some(Rational64::new(3, 5)));
    // single pipeline, single task
    let single = bench::aggregate_stats(&[rec("t", "p", Outcome::Done, 7, 0)]).unwrap();
    assert_eq!(single[0].win_share_s_r, Rational64::from_integer(1));
    assert_eq!(single[0].mean_s_r, Some(Rational64::from_integer(7)));
    println!("criterion 8 — exact-rational statistics engine: pass");
}

#[test]
fn criterion_9_round_trip() {
    let mut corpus = nbw_corpus(120, &[4, 5, 6, 7, 8], &[1.0, 1.5, 2.0, 2.5], &[0.3, 0.5], 0xC9);
    for i in 0..40 {
        corpus.push(random_dpw(2 + i % 6, 2, 4, 0xC900 + i as u64));
    }
    corpus.push(a_fig1());
    for (i, a) in corpus.iter().enumerate() {
        let text = buchic::oaf::emit_oaf(a);
        assert_eq!(text, buchic::oaf::emit_oaf(a), "automaton {i}: emit not deterministic");
        let back = buchic::oaf::parse_oaf(&text)
            .unwrap_or_else(|e| panic!("automaton {i}: re-parse failed: {e}"));
        assert_eq!(&back, a, "automaton {i}: round trip not structural identity");
        assert_eq!(buchic::oaf::emit_oaf(&back), text, "automaton {i}: emit unstable");
    }
    println!("criterion 9 — serialization round trip: pass");
}

#[test]
fn complement_cli_when_budget_is_generous() {
    // CLI-level smoke test tying the subcommands together
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.oaf");
    let output = dir.path().join("out.oaf");
    buchic::oaf::write_oaf(&input, &a_fig1()).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_buchic"))
        .args([
            "complement",
            "--in",
            input.to_str().unwrap(),
            "--heuristics",
            "A,D,R,M",
            "--out",
            output.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let status = Command::new(env!("CARGO_BIN_EXE_buchic"))
        .args([
            "check",
            "--a",
            input.to_str().unwrap(),
            "--b",
            output.to_str().unwrap(),
            "--mode",
            "complement",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    // a failing check exits 1
    let status = Command::new(env!("CARGO_BIN_EXE_buchic"))
        .args([
            "check",
            "--a",
            input.to_str().unwrap(),
            "--b",
            input.to_str().unwrap(),
            "--mode",
            "complement",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // a usage error exits 2
    let status = Command::new(env!("CARGO_BIN_EXE_buchic"))
        .args(["complement", "--in", "/nonexistent.oaf"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
