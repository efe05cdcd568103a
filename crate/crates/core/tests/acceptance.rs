//! Acceptance gate: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::*;
use moba_tutor::analytics::{
    aggregate, experiment_report, kda_factor, read_rows, Condition, MatchRecord, Phase, ScoreLine,
};
use moba_tutor::arena::{
    effective_speed, new_match, step, ArenaConfig, CastTarget, Command, CommandSet, EventKind, GameState,
    Haste, SpellSlot, StatusEffect, StatusKind, Team, UnitId, Vec2,
};
use moba_tutor::bt::{tick, Blackboard, Status};
use moba_tutor::harness::{
    replay, resimulate_matches, run_experiment, run_match, verify, ExperimentInputs, ExperimentSpec, MatchSession,
    MatchSetup, NoviceControl,
};
use moba_tutor::tips::{evaluate, ThrottleState, TipTable};
use moba_tutor::tutor::{default_tree, registry, TutorConfig, TutorState, TutorView};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};

type Verdict = Result<String, String>;

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("kda oracle", kda_oracle),
        ("bt semantics", bt_semantics),
        ("determinism and replay", determinism_replay),
        ("tip oracle equivalence", tip_oracle),
        ("follow contract", follow_contract),
        ("kit contracts", kit_contracts),
        ("priority soundness", priority_soundness),
        ("directional effect", directional_effect),
        ("aggregation", aggregation),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let verdict = check();
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs `f` over `items` on all cores, keeping input order.
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<U>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn kda_oracle() -> Verdict {
    let started = Instant::now();
    let mut cases = 0;
    for k in 0..=20 {
        for d in 0..=20 {
            for a in 0..=20 {
                let got = kda_factor(k, d, a).map_err(|e| e.to_string())?;
                let want = kda_reference(k, d, a);
                ensure(got == want, || format!("K={k} D={d} A={a}: {got} != {want}"))?;
                cases += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    ensure(kda_factor(2, 0, 3) == Ok(5.0), || "K=2 D=0 A=3 should be 5".into())?;
    ensure(kda_factor(0, 0, 0) == Ok(0.0), || "all-zero should be 0".into())?;
    ensure(kda_factor(3, 2, 4) == Ok(3.5), || "K=3 D=2 A=4 should be 3.5".into())?;
    ensure(kda_factor(-1, 0, 0).is_err(), || "negative input accepted".into())?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases}/9261 exact, zero-death branch checked"))
}

fn bt_semantics() -> Verdict {
    let started = Instant::now();
    let reg = status_registry(9);
    let mut trees = 0usize;
    let mut cases = 0usize;
    for shape in shapes(3) {
        let numbered = number(&shape, &mut 0);
        let tree = to_bt(&numbered);
        trees += 1;
        for assign in assignments(leaf_count(&numbered)) {
            let mut run = RefRun::default();
            let want = ref_eval(&numbered, &assign, &mut run);
            let requesting: Vec<usize> = run
                .leaves
                .iter()
                .copied()
                .filter(|&i| !is_condition_leaf(i) && assign[i] != Status::Failure)
                .collect();
            let mut board = Blackboard::new(assign.clone());
            let got = tick(&tree, &reg, &mut board).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("{tree:?} with {assign:?}: {got:?} != {want:?}"))?;
            ensure(board.evaluations() == run.touched, || {
                format!("{tree:?} with {assign:?}: visited {} nodes, reference {}", board.evaluations(), run.touched)
            })?;
            ensure(board.request().copied() == requesting.first().copied(), || {
                format!("{tree:?} with {assign:?}: kept request {:?}", board.request())
            })?;
            ensure(board.dropped_requests() == requesting.len().saturating_sub(1), || {
                format!("{tree:?} with {assign:?}: dropped {}", board.dropped_requests())
            })?;
            cases += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{trees} trees, {cases} status assignments, statuses and visit counts equal"))
}

fn determinism_replay() -> Verdict {
    let arena = ArenaConfig::default();
    let seeds: Vec<u64> = (0..100).collect();
    let results = par_map(&seeds, |&seed| -> Result<(), String> {
        let condition = Condition::ALL[seed as usize % 3];
        let setup = MatchSetup::new(arena.clone(), condition);
        let a = run_match(&setup, seed).map_err(|e| e.to_string())?;
        let b = run_match(&setup, seed).map_err(|e| e.to_string())?;
        ensure(a.log == b.log, || format!("seed {seed}: re-run log differs"))?;
        verify(&a.record, &a.log).map_err(|e| format!("seed {seed}: {e}"))?;
        let r = replay(&b.log).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(r.scorelines == a.record.scorelines, || format!("seed {seed}: scorelines differ"))?;
        resimulate_matches(&arena, &a.log).map_err(|e| format!("seed {seed}: {e}"))
    });
    let ok = results.iter().filter(|r| r.is_ok()).count();
    if let Some(Err(e)) = results.iter().find(|r| r.is_err()) {
        return Err(format!("{ok}/100 equal; first failure: {e}"));
    }
    Ok(format!("{ok}/100 seeds: identical re-runs, equal scorelines, byte-identical resimulation"))
}

fn tip_oracle() -> Verdict {
    const TICKS: u64 = 10_000;
    let table = TipTable::default_table();
    let setup = MatchSetup::new(arena_with_ticks(TICKS), Condition::SupportPlusTips);
    let mut observed = 0u64;
    let mut fired = 0usize;
    let mut by_rule: BTreeMap<String, usize> = BTreeMap::new();
    let mut seed = 11;
    let mut emitted = Vec::new();
    while observed < TICKS {
        let mut session = MatchSession::new(&setup, seed, NoviceControl::Scripted).map_err(|e| e.to_string())?;
        let partner = session.tutor.as_ref().expect("tutor enabled").partner;
        while !session.finished() && observed < TICKS {
            let engine: BTreeSet<(String, UnitId)> = evaluate(&session.state, partner, &table, &mut ThrottleState::disabled())
                .into_iter()
                .map(|t| (t.rule, t.recipients[0]))
                .collect();
            let brute = brute_fires(&session.state, partner, &table);
            ensure(engine == brute, || {
                format!(
                    "seed {seed} tick {}: engine-only {:?}, oracle-only {:?}",
                    session.state.tick,
                    engine.difference(&brute).collect::<Vec<_>>(),
                    brute.difference(&engine).collect::<Vec<_>>()
                )
            })?;
            fired += engine.len();
            for (rule, _) in &engine {
                *by_rule.entry(rule.clone()).or_default() += 1;
            }
            let events = session.tick(&CommandSet::new()).map_err(|e| e.to_string())?;
            emitted.extend(events.into_iter().filter_map(|e| match e.kind {
                EventKind::TipEmitted { tip } => Some(tip),
                _ => None,
            }));
            observed += 1;
        }
        seed += 1;
    }
    ensure(by_rule.len() == table.rules().len(), || format!("not every rule fired: {by_rule:?}"))?;
    let mut last: BTreeMap<(String, UnitId), u64> = BTreeMap::new();
    for tip in &emitted {
        let cooldown = table.rule(&tip.rule).expect("known rule").cooldown;
        for &r in &tip.recipients {
            if let Some(prev) = last.insert((tip.rule.clone(), r), tip.tick) {
                ensure(tip.tick - prev >= cooldown, || {
                    format!("{} to {r} at {} and {prev}, cooldown {cooldown}", tip.rule, tip.tick)
                })?;
            }
        }
    }
    Ok(format!(
        "{observed} ticks, {fired} unthrottled firings match the oracle {by_rule:?}; {} throttled tips respect cooldowns",
        emitted.len()
    ))
}

fn follow_contract() -> Verdict {
    let mut arena = arena_with_ticks(2000);
    arena.game.wave_interval = 100_000;
    let mut state = new_match(&arena).map_err(|e| e.to_string())?;
    let (partner, tutor_hero) = (UnitId(1), UnitId(2));
    let cfg = TutorConfig::for_team_size(arena.game.heroes_per_team);
    let tutor = TutorState::new(&state, tutor_hero, cfg.clone(), default_tree()).map_err(|e| e.to_string())?;
    ensure(tutor.partner == partner, || format!("tutor picked {}", tutor.partner))?;
    state.unit_mut(tutor_hero).expect("tutor").haste = Some(Haste {
        trigger: cfg.passive_trigger,
        boost_pct: cfg.passive_boost_pct,
    });
    let route = [
        Vec2::new(120.0, 470.0),
        Vec2::new(260.0, 480.0),
        Vec2::new(170.0, 330.0),
        Vec2::new(90.0, 420.0),
        Vec2::new(240.0, 520.0),
        Vec2::new(130.0, 260.0),
    ];
    let mut leg = 0;
    let step_len = state.unit(tutor_hero).expect("tutor").move_speed;
    let (mut active, mut within) = (0u32, 0u32);
    for _ in 0..1000 {
        let mut commands = CommandSet::new();
        let p = state.unit(partner).expect("partner");
        if p.pos.distance(route[leg]) < 1e-6 {
            leg = (leg + 1) % route.len();
        }
        commands.insert(partner, Command::MoveTo { pos: route[leg] });
        let decision = tutor.decide(&state).map_err(|e| e.to_string())?;
        commands.insert(tutor_hero, decision.command);
        step(&mut state, &commands);
        if decision.branch == 5 {
            active += 1;
            let d = state.unit(partner).expect("p").pos.distance(state.unit(tutor_hero).expect("t").pos);
            if d >= cfg.min_separation - 1e-9 && d <= cfg.follow_distance + step_len + 1e-9 {
                within += 1;
            }
        }
    }
    ensure(active >= 900, || format!("follow branch active only {active}/1000 ticks"))?;
    let share = f64::from(within) / f64::from(active);
    ensure(share >= 0.95, || format!("{within}/{active} follow ticks in band ({:.1}%)", share * 100.0))?;
    Ok(format!("{within}/{active} follow ticks within band ({:.1}%)", share * 100.0))
}

fn support_id(state: &GameState) -> UnitId {
    state
        .team_heroes(Team::Blue)
        .find(|u| u.kit.as_deref() == Some("support"))
        .map(|u| u.id)
        .expect("a blue support")
}

fn learn_all(state: &mut GameState, hero: UnitId) {
    let u = state.unit_mut(hero).expect("hero");
    u.mana = u.max_mana;
    for sp in &mut u.spells {
        sp.rank = 1;
        sp.cooldown_remaining = 0;
    }
}

fn kit_contracts() -> Verdict {
    let mut notes = Vec::new();
    // a runner keeps its success count, so each property gets a fresh one
    let runner = || {
        TestRunner::new(PropConfig {
            cases: 256,
            failure_persistence: None,
            ..PropConfig::default()
        })
    };

    // heals stay within max_hp
    let base = new_match(&ArenaConfig::default()).map_err(|e| e.to_string())?;
    let strat = (proptest::collection::vec(0.01f64..=1.0, 2), -60.0f64..60.0, -60.0f64..60.0, any::<bool>());
    runner()
        .run(&strat, |(fracs, dx, dy, ult)| {
            let mut s = base.clone();
            let sup = support_id(&s);
            learn_all(&mut s, sup);
            let ally = UnitId(1);
            let center = Vec2::new(200.0, 450.0);
            for (id, frac) in [(ally, fracs[0]), (sup, fracs[1])] {
                let u = s.unit_mut(id).unwrap();
                u.hp = u.max_hp * frac;
            }
            s.unit_mut(ally).unwrap().pos = center;
            s.unit_mut(sup).unwrap().pos = Vec2::new(center.x + dx, center.y + dy);
            let mut cmds = CommandSet::new();
            let cmd = if ult {
                Command::Cast { slot: SpellSlot::R, target: CastTarget::Caster }
            } else {
                Command::Cast { slot: SpellSlot::W, target: CastTarget::Unit(ally) }
            };
            cmds.insert(sup, cmd);
            for _ in 0..3 {
                step(&mut s, &cmds);
                for u in s.units.values() {
                    prop_assert!(u.hp <= u.max_hp && u.hp >= 0.0, "{} hp {} of {}", u.id, u.hp, u.max_hp);
                }
            }
            Ok(())
        })
        .map_err(|e| format!("heal bound: {e}"))?;
    notes.push("heal bound 256 cases".to_string());

    // global team heal reaches exactly the living allies
    let mut five = ArenaConfig::default();
    five.game.heroes_per_team = 5;
    five.game.roster.blue.clear();
    five.game.roster.red.clear();
    let base5 = new_match(&five).map_err(|e| e.to_string())?;
    runner()
        .run(&proptest::collection::vec(any::<bool>(), 5), |alive| {
            let mut s = base5.clone();
            let sup = support_id(&s);
            learn_all(&mut s, sup);
            let blue = s.hero_ids(Team::Blue);
            for (id, &keep) in blue.iter().zip(&alive) {
                let u = s.unit_mut(*id).unwrap();
                u.hp = u.max_hp * 0.5;
                if !keep && *id != sup {
                    u.alive = false;
                    u.hp = 0.0;
                    u.respawn_at = Some(10_000);
                }
            }
            let living: BTreeSet<UnitId> = s.team_heroes(Team::Blue).filter(|u| u.alive).map(|u| u.id).collect();
            let cmds = CommandSet::from([(sup, Command::Cast { slot: SpellSlot::R, target: CastTarget::Caster })]);
            let events = step(&mut s, &cmds);
            let cast: Vec<BTreeSet<UnitId>> = events
                .iter()
                .filter_map(|e| match &e.kind {
                    EventKind::SpellCast { caster, slot: SpellSlot::R, affected, .. } if *caster == sup => {
                        Some(affected.iter().copied().collect())
                    }
                    _ => None,
                })
                .collect();
            let healed: BTreeSet<UnitId> = events
                .iter()
                .filter_map(|e| match &e.kind {
                    EventKind::Heal { src, dst, .. } if *src == sup => Some(*dst),
                    _ => None,
                })
                .collect();
            prop_assert_eq!(cast.len(), 1);
            prop_assert_eq!(&cast[0], &living);
            prop_assert_eq!(&healed, &living);
            Ok(())
        })
        .map_err(|e| format!("global heal set: {e}"))?;
    notes.push("global heal set 256 cases".to_string());

    // a silenced tutor never casts
    let setup = MatchSetup::new(arena_with_ticks(3000), Condition::SupportOnly);
    let casts_by = |silence: bool| -> Result<(usize, usize), String> {
        let mut session = MatchSession::new(&setup, 5, NoviceControl::Scripted).map_err(|e| e.to_string())?;
        let hero = session.tutor.as_ref().unwrap().hero;
        let (mut casts, mut rejected) = (0, 0);
        while !session.finished() {
            if silence {
                let now = session.state.tick;
                let u = session.state.unit_mut(hero).unwrap();
                u.statuses.retain(|s| s.kind != StatusKind::Silence);
                u.statuses.push(StatusEffect { kind: StatusKind::Silence, expires_at: now + 5 });
            }
            for e in session.tick(&CommandSet::new()).map_err(|e| e.to_string())? {
                match e.kind {
                    EventKind::SpellCast { caster, .. } if caster == hero => casts += 1,
                    EventKind::CommandRejected { hero: h, command: Command::Cast { .. }, .. } if h == hero => rejected += 1,
                    _ => {}
                }
            }
        }
        Ok((casts, rejected))
    };
    let (free_casts, _) = casts_by(false)?;
    let (silenced_casts, rejected) = casts_by(true)?;
    ensure(free_casts > 0, || "unsilenced tutor never cast; check is vacuous".into())?;
    ensure(silenced_casts == 0, || format!("silenced tutor cast {silenced_casts} spells"))?;
    notes.push(format!("silenced tutor 0 casts ({rejected} rejected attempts, {free_casts} casts unsilenced)"));

    // passive haste applies iff moving toward an ally under the trigger
    let cfg = TutorConfig::default();
    let haste = Haste { trigger: cfg.passive_trigger, boost_pct: cfg.passive_boost_pct };
    let strat = (0.01f64..=1.0, (50.0f64..550.0, 50.0f64..550.0), (50.0f64..550.0, 50.0f64..550.0), -3.2f64..3.2, any::<bool>());
    runner()
        .run(&strat, |(frac, (tx, ty), (ax, ay), angle, ally_alive)| {
            let mut s = base.clone();
            let sup = support_id(&s);
            let ally = UnitId(1);
            {
                let a = s.unit_mut(ally).unwrap();
                a.pos = Vec2::new(ax, ay);
                a.hp = a.max_hp * frac;
                a.alive = ally_alive;
            }
            let t = s.unit_mut(sup).unwrap();
            t.pos = Vec2::new(tx, ty);
            t.haste = Some(haste);
            let t = s.unit(sup).unwrap().clone();
            let dir = Vec2::new(angle.cos(), angle.sin());
            let toward = ally_alive && frac < haste.trigger && (Vec2::new(ax, ay) - t.pos).dot(dir) > 0.0;
            let want = if toward { t.move_speed * (1.0 + haste.boost_pct / 100.0) } else { t.move_speed };
            prop_assert!((effective_speed(&s, &t, dir) - want).abs() < 1e-12);
            Ok(())
        })
        .map_err(|e| format!("passive speed: {e}"))?;
    notes.push("passive speed 256 cases".to_string());
    Ok(notes.join(", "))
}

fn priority_soundness() -> Verdict {
    let setup = MatchSetup::new(ArenaConfig::default(), Condition::SupportPlusTips);
    let seeds: Vec<u64> = (100..110).collect();
    let results = par_map(&seeds, |&seed| -> Result<[usize; 6], String> {
        let mut session = MatchSession::new(&setup, seed, NoviceControl::Scripted).map_err(|e| e.to_string())?;
        let tutor = session.tutor.clone().expect("tutor enabled");
        let branches = tutor.tree.root().children().to_vec();
        let mut counts = [0usize; 6];
        while !session.finished() {
            let snapshot = session.state.clone();
            let before = session.trace.len();
            session.tick(&CommandSet::new()).map_err(|e| e.to_string())?;
            if session.trace.len() == before {
                continue;
            }
            let d = session.trace.last().expect("decision").clone();
            let k = d.branch as usize;
            counts[k] += 1;
            let earlier = if k == 0 { branches.len() } else { k - 1 };
            let view = TutorView::observe(&snapshot, tutor.hero, tutor.partner, &tutor.config).expect("tutor alive");
            for (j, branch) in branches.iter().enumerate().take(earlier) {
                let mut board = Blackboard::new(view.clone());
                let status = tick(branch, registry(), &mut board).map_err(|e| e.to_string())?;
                ensure(status == Status::Failure && board.request().is_none(), || {
                    format!("seed {seed} tick {}: fired branch {k} but branch {} evaluates {status:?}", d.tick, j + 1)
                })?;
            }
        }
        Ok(counts)
    });
    let mut total = [0usize; 6];
    for r in results {
        let c = r?;
        for i in 0..6 {
            total[i] += c[i];
        }
    }
    let checked: usize = total.iter().sum();
    ensure(total[1..5].iter().all(|&c| c > 0), || format!("some branch never fired: {total:?}"))?;
    Ok(format!("{checked} decisions over 10 matches, per-branch counts {:?}", &total[1..]))
}

fn directional_effect() -> Verdict {
    let started = Instant::now();
    let inputs = ExperimentInputs::default();
    let mut spec = ExperimentSpec::new(Condition::ALL.to_vec(), 30);
    spec.novice.tip_compliance = 1.0;
    let compliant = run_experiment(&spec, &inputs, |_| Ok(())).map_err(|e| e.to_string())?;
    let mut spec0 = ExperimentSpec::new(vec![Condition::SupportPlusTips], 30);
    spec0.novice.tip_compliance = 0.0;
    let ignoring = run_experiment(&spec0, &inputs, |_| Ok(())).map_err(|e| e.to_string())?;
    let mean = |c: Condition| compliant.reports.iter().find(|r| r.condition == c).map(|r| r.mean).unwrap_or(f64::NAN);
    let (b, s, t1) = (mean(Condition::Baseline), mean(Condition::SupportOnly), mean(Condition::SupportPlusTips));
    let t0 = ignoring.reports[0].mean;
    let elapsed = started.elapsed();
    let detail = format!("baseline {b:.6}, support_only {s:.6}, tips c=1 {t1:.6}, tips c=0 {t0:.6}");
    ensure(b <= s && s <= t1 && t1 >= t0, || format!("ordering violated: {detail}"))?;
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}; {detail}"))?;
    Ok(detail)
}

fn record(id: &str, phase: Option<Phase>, line: ScoreLine) -> MatchRecord {
    MatchRecord {
        match_id: id.into(),
        seed: 0,
        config_hash: String::new(),
        condition: if phase == Some(Phase::WithTutor) { Condition::SupportPlusTips } else { Condition::Baseline },
        group: phase.map(|_| Condition::SupportPlusTips),
        phase,
        duration_ticks: 1,
        winner: None,
        novice: line.player,
        tutor: None,
        scorelines: vec![line],
        event_log: String::new(),
        log_checksum: String::new(),
    }
}

fn aggregation() -> Verdict {
    let p = UnitId(1);
    let line = |k, d, a| ScoreLine { player: p, kills: k, deaths: d, assists: a };
    let series: Vec<MatchRecord> =
        [2, 4, 6].iter().map(|&k| record(&format!("m{k}"), None, line(k, 1, 0))).collect();
    let r = aggregate(&series, p).map_err(|e| e.to_string())?;
    let (mean, sd) = (format!("{:.6}", r.mean), format!("{:.6}", r.stddev));
    ensure(mean == "4.000000" && sd == "2.000000", || format!("mean {mean}, stddev {sd}"))?;
    let records = vec![
        record("b0", Some(Phase::Before), line(1, 3, 0)),
        record("b1", Some(Phase::Before), line(2, 7, 1)),
        record("b2", Some(Phase::Before), line(0, 0, 5)),
        record("t0", Some(Phase::WithTutor), line(4, 3, 3)),
    ];
    let report = experiment_report(&records, p).map_err(|e| e.to_string())?;
    let csv = report.to_csv();
    let back = read_rows(&csv).map_err(|e| e.to_string())?;
    ensure(back == report.rows, || format!("round trip changed rows:\n{csv}"))?;
    ensure(back[2].report.is_none(), || "empty after phase not absent".into())?;
    Ok(format!("mean {mean}, stddev {sd}; {}-row csv round-trips exactly", back.len()))
}
