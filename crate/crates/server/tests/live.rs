use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use moba_tutor::arena::{ArenaConfig, Command, Vec2};
use moba_tutor::harness::resimulate_matches;
use moba_tutor_server::protocol::{ClientMessage, Role, ServerMessage};
use moba_tutor_server::{ServeOptions, Server};
use serde_json::Value;
use tokio::net::TcpStream;
use tokio::task::JoinHandle;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{connect_async, MaybeTlsStream, WebSocketStream};

type Client = WebSocketStream<MaybeTlsStream<TcpStream>>;

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/messages.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn short_arena(max_ticks: u64) -> ArenaConfig {
    let mut arena = ArenaConfig::default();
    arena.game.max_ticks = max_ticks;
    arena
}

async fn start(opts: ServeOptions) -> (String, JoinHandle<moba_tutor::harness::MatchOutcome>) {
    let server = Server::bind("127.0.0.1:0", opts).await.unwrap();
    let url = format!("ws://{}/match", server.local_addr().unwrap());
    (url, tokio::spawn(async move { server.run().await.unwrap() }))
}

async fn send(client: &mut Client, msg: &ClientMessage) {
    client.send(Message::text(serde_json::to_string(msg).unwrap())).await.unwrap();
}

async fn send_raw(client: &mut Client, text: &str) {
    client.send(Message::text(text.to_string())).await.unwrap();
}

/// Next text frame, checked against the published schema. `None` once closed.
async fn next(client: &mut Client, validator: &jsonschema::Validator) -> Option<ServerMessage> {
    loop {
        let frame = tokio::time::timeout(Duration::from_secs(10), client.next()).await.expect("frame in time");
        match frame {
            Some(Ok(Message::Text(t))) => {
                let value: Value = serde_json::from_str(&t).unwrap();
                assert!(validator.is_valid(&value), "frame violates schema: {t}");
                return Some(serde_json::from_value(value).unwrap());
            }
            Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return None,
            Some(Ok(_)) => continue,
        }
    }
}

async fn join(url: &str, role: Role, validator: &jsonschema::Validator) -> (Client, ServerMessage) {
    let (mut client, _) = connect_async(url).await.unwrap();
    send(&mut client, &ClientMessage::join(role)).await;
    let welcome = next(&mut client, validator).await.unwrap();
    (client, welcome)
}

#[tokio::test]
async fn player_sees_snapshots_moves_and_low_health_tip() {
    const INJECT_AT: u64 = 60;
    let validator = schema();
    let mut opts = ServeOptions::tutored(short_arena(120), 7);
    opts.tick_rate = Some(100);
    let novice = moba_tutor::harness::MatchSession::new(&opts.setup, 7, moba_tutor::harness::NoviceControl::External)
        .unwrap()
        .roles
        .novice;
    opts.injector = Some(Box::new(move |state| {
        if state.tick == INJECT_AT {
            let u = state.unit_mut(novice).unwrap();
            u.hp = u.max_hp * 0.2;
        }
    }));
    let (url, handle) = start(opts).await;
    let (mut client, welcome) = join(&url, Role::Player, &validator).await;
    let ServerMessage::Welcome { hero, snapshot_every, .. } = welcome else { panic!("expected welcome, got {welcome:?}") };
    assert_eq!(hero, Some(novice));
    assert_eq!(snapshot_every, 2);

    let mut last_tick = None;
    let mut start_pos = None;
    let mut moved_after = None;
    let mut snapshots_since_move = None;
    let mut sent_at = None;
    let mut tip_tick = None;
    let mut winner_seen = false;
    while let Some(msg) = next(&mut client, &validator).await {
        match msg {
            ServerMessage::Snapshot { snapshot, .. } => {
                if let Some(prev) = last_tick {
                    assert!(snapshot.tick > prev, "snapshots move forward");
                    assert!(snapshot.tick - prev <= 2, "one snapshot every 2 ticks ({prev} -> {})", snapshot.tick);
                }
                last_tick = Some(snapshot.tick);
                assert!(snapshot.events.iter().all(|e| e.tick <= snapshot.tick), "no snapshot precedes its events");
                assert!(!snapshot.cooldowns.is_empty(), "players get their own cooldowns");
                let me = snapshot.units.iter().find(|u| u.id == novice).unwrap();
                match (start_pos, sent_at) {
                    (None, _) => {
                        start_pos = Some(me.pos);
                        let target = Vec2 { x: me.pos.x + 200.0, y: me.pos.y - 200.0 };
                        send(&mut client, &ClientMessage::command(Command::MoveTo { pos: target })).await;
                        sent_at = Some(snapshot.tick);
                        snapshots_since_move = Some(0);
                    }
                    (Some(p), Some(_)) if moved_after.is_none() => {
                        let n = snapshots_since_move.as_mut().unwrap();
                        *n += 1;
                        if me.pos.distance(p) > 1.0 {
                            moved_after = Some(*n);
                        }
                    }
                    _ => {}
                }
            }
            ServerMessage::Tip { tip, .. } if tip.rule == "low_health" && tip.tick >= INJECT_AT => {
                if tip_tick.is_none() {
                    assert!(tip.recipients.contains(&novice));
                    assert!(last_tick.is_some_and(|t| t <= tip.tick), "tip arrives before later snapshots");
                    tip_tick = Some(tip.tick);
                }
            }
            ServerMessage::End { .. } => winner_seen = true,
            ServerMessage::Error { message, .. } => panic!("server error: {message}"),
            _ => {}
        }
    }
    assert!(winner_seen, "end frame before close");
    let moved = moved_after.expect("MoveTo took effect");
    assert!(moved <= 2, "MoveTo visible after {moved} snapshots");
    let tip = tip_tick.expect("low_health tip delivered");
    assert!(tip - INJECT_AT <= 2, "tip at tick {tip}, forced low health at {INJECT_AT}");
    let outcome = handle.await.unwrap();
    assert!(outcome.log.ends_with('\n'));
    assert!(outcome.events.iter().any(|e| matches!(
        &e.kind,
        moba_tutor::arena::EventKind::CommandIssued { hero, command: Command::MoveTo { .. } } if *hero == novice
    )));
}

#[tokio::test]
async fn live_command_stream_resimulates_byte_for_byte() {
    let validator = schema();
    let arena = short_arena(150);
    let mut opts = ServeOptions::tutored(arena.clone(), 11);
    opts.tick_rate = Some(200);
    let (url, handle) = start(opts).await;
    let (mut player, _) = join(&url, Role::Player, &validator).await;
    let (mut spectator, welcome) = join(&url, Role::Spectator, &validator).await;
    assert!(matches!(welcome, ServerMessage::Welcome { hero: None, role: Role::Spectator, .. }));
    let mut n = 0u32;
    while let Some(msg) = next(&mut player, &validator).await {
        if let ServerMessage::Snapshot { snapshot, .. } = msg {
            n += 1;
            if n % 5 == 0 {
                let pos = Vec2 { x: 300.0 + n as f64 * 10.0, y: 1700.0 };
                send(&mut player, &ClientMessage::command(Command::MoveTo { pos })).await;
            }
            if n == 12 {
                send_raw(&mut player, r#"{"v":1,"type":"ping","pos":{"x":500.0,"y":1500.0},"kind":"Caution"}"#).await;
            }
            assert!(snapshot.tick <= 150);
        }
    }
    let mut spectator_snapshots = 0;
    while let Some(msg) = next(&mut spectator, &validator).await {
        if let ServerMessage::Snapshot { snapshot, .. } = msg {
            assert!(snapshot.cooldowns.is_empty());
            spectator_snapshots += 1;
        }
    }
    assert!(spectator_snapshots > 0);
    let outcome = handle.await.unwrap();
    let issued = outcome
        .events
        .iter()
        .filter(|e| matches!(e.kind, moba_tutor::arena::EventKind::CommandIssued { hero, .. } if hero == outcome.record.novice))
        .count();
    assert!(issued >= 2, "player commands were recorded");
    resimulate_matches(&arena, &outcome.log).unwrap();
}

async fn expect_error_then_close(client: &mut Client, validator: &jsonschema::Validator, needle: &str) {
    loop {
        match next(client, validator).await {
            Some(ServerMessage::Error { message, .. }) => {
                assert!(message.contains(needle), "{message:?} should mention {needle:?}");
                break;
            }
            Some(_) => continue,
            None => panic!("closed without an error frame"),
        }
    }
    while let Some(msg) = next(client, validator).await {
        assert!(!matches!(msg, ServerMessage::Error { .. }));
    }
}

#[tokio::test]
async fn protocol_violations_close_with_an_error_frame() {
    let validator = schema();
    let mut opts = ServeOptions::tutored(short_arena(400), 3);
    opts.tick_rate = Some(100);
    let (url, handle) = start(opts).await;

    let (mut early, _) = connect_async(&url).await.unwrap();
    send(&mut early, &ClientMessage::command(Command::Idle)).await;
    expect_error_then_close(&mut early, &validator, "join").await;

    let (mut old, _) = connect_async(&url).await.unwrap();
    send_raw(&mut old, r#"{"v":2,"type":"join","role":"player"}"#).await;
    expect_error_then_close(&mut old, &validator, "version").await;

    let (mut junk, _) = connect_async(&url).await.unwrap();
    send_raw(&mut junk, "not json").await;
    expect_error_then_close(&mut junk, &validator, "malformed").await;

    let (mut spectator, _) = join(&url, Role::Spectator, &validator).await;
    send(&mut spectator, &ClientMessage::command(Command::Idle)).await;
    expect_error_then_close(&mut spectator, &validator, "spectators").await;

    let (mut player, welcome) = join(&url, Role::Player, &validator).await;
    assert!(matches!(welcome, ServerMessage::Welcome { hero: Some(_), .. }));
    let (mut second, _) = connect_async(&url).await.unwrap();
    send(&mut second, &ClientMessage::join(Role::Player)).await;
    expect_error_then_close(&mut second, &validator, "taken").await;

    send(&mut player, &ClientMessage::join(Role::Player)).await;
    expect_error_then_close(&mut player, &validator, "already joined").await;

    // The slot reopens after the player is dropped, and the hero stands idle.
    let (mut again, welcome) = join(&url, Role::Player, &validator).await;
    let ServerMessage::Welcome { hero: Some(hero), .. } = welcome else { panic!("expected a hero") };
    let _ = again.close(None).await;
    let outcome = handle.await.unwrap();
    let last = outcome
        .events
        .iter()
        .rev()
        .find_map(|e| match &e.kind {
            moba_tutor::arena::EventKind::CommandIssued { hero: h, command } if *h == hero => Some(*command),
            _ => None,
        })
        .expect("disconnect issues an idle order");
    assert_eq!(last, Command::Idle);
}

#[test]
fn schema_accepts_our_frames_and_rejects_others() {
    let validator = schema();
    let ok = [
        r#"{"v":1,"type":"join","role":"spectator"}"#,
        r#"{"v":1,"type":"command","command":{"cmd":"Cast","slot":"R","target":"caster"}}"#,
        r#"{"v":1,"type":"end","winner":"Blue"}"#,
    ];
    let bad = [
        r#"{"v":2,"type":"end","winner":null}"#,
        r#"{"v":1,"type":"join","role":"coach"}"#,
        r#"{"v":1,"type":"command","command":{"cmd":"Teleport"}}"#,
        r#"{"type":"ping","pos":{"x":0,"y":0},"kind":"Danger"}"#,
    ];
    for text in ok {
        assert!(validator.is_valid(&serde_json::from_str(text).unwrap()), "{text}");
    }
    for text in bad {
        assert!(!validator.is_valid(&serde_json::from_str(text).unwrap()), "{text}");
    }
    for msg in [ClientMessage::join(Role::Player), ClientMessage::command(Command::Attack { target: moba_tutor::arena::UnitId(4) })] {
        assert!(validator.is_valid(&serde_json::to_value(&msg).unwrap()));
    }
}
