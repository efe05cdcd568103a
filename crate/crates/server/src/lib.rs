//! Live host for one tutored match. A browser client joins `/match` over a
//! WebSocket, plays the novice hero and receives snapshots, tips and events;
//! the tutor and all other heroes run server-side.

pub mod protocol;

use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::ws::{close_code, CloseFrame, Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use futures_util::{SinkExt, StreamExt};
use moba_tutor::analytics::Condition;
use moba_tutor::arena::{Command, CommandSet, EventKind, GameState, UnitId};
use moba_tutor::harness::{HarnessError, MatchOutcome, MatchSession, MatchSetup, NoviceControl};
use tokio::net::TcpListener;
use tokio::sync::{broadcast, mpsc, oneshot};

use protocol::{is_notable, Broadcast, ClientMessage, Role, ServerMessage, PROTOCOL_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("simulation task failed: {0}")]
    Join(String),
}

/// Mutates the state before a tick is simulated. Lets tests stage situations a
/// client cannot reach quickly; anything it does is outside the event log.
pub type Injector = Box<dyn FnMut(&mut GameState) + Send>;

pub struct ServeOptions {
    pub setup: MatchSetup,
    pub seed: u64,
    /// Ticks per second; defaults to the config's tick rate.
    pub tick_rate: Option<u32>,
    pub snapshot_every: u64,
    pub injector: Option<Injector>,
}

impl ServeOptions {
    pub fn new(setup: MatchSetup, seed: u64) -> Self {
        Self { setup, seed, tick_rate: None, snapshot_every: 2, injector: None }
    }

    pub fn tutored(arena: moba_tutor::arena::ArenaConfig, seed: u64) -> Self {
        Self::new(MatchSetup::new(arena, Condition::SupportPlusTips), seed)
    }
}

struct Shared {
    welcome_config: Box<moba_tutor::arena::ArenaConfig>,
    tick_rate: u32,
    snapshot_every: u64,
    novice: UnitId,
    player_taken: AtomicBool,
    commands: mpsc::UnboundedSender<(UnitId, Command)>,
    frames: broadcast::Sender<Arc<Broadcast>>,
    ended: Mutex<Option<Arc<Broadcast>>>,
}

/// A bound server whose match starts when `run` is awaited.
pub struct Server {
    listener: TcpListener,
    opts: ServeOptions,
}

impl Server {
    pub async fn bind(addr: impl tokio::net::ToSocketAddrs, opts: ServeOptions) -> Result<Self, ServerError> {
        Ok(Self { listener: TcpListener::bind(addr).await?, opts })
    }

    pub fn local_addr(&self) -> Result<SocketAddr, ServerError> {
        Ok(self.listener.local_addr()?)
    }

    /// Plays the match in real time and returns its outcome once it has ended
    /// and every connection has been closed.
    pub async fn run(self) -> Result<MatchOutcome, ServerError> {
        let Server { listener, mut opts } = self;
        let session = MatchSession::new(&opts.setup, opts.seed, NoviceControl::External)?;
        let tick_rate = opts.tick_rate.unwrap_or(opts.setup.arena.game.tick_rate).max(1);
        let snapshot_every = opts.snapshot_every.max(1);
        let (cmd_tx, cmd_rx) = mpsc::unbounded_channel();
        let (frames, _) = broadcast::channel(1024);
        let shared = Arc::new(Shared {
            welcome_config: Box::new(opts.setup.arena.clone()),
            tick_rate,
            snapshot_every,
            novice: session.roles.novice,
            player_taken: AtomicBool::new(false),
            commands: cmd_tx,
            frames: frames.clone(),
            ended: Mutex::new(None),
        });
        let app = Router::new().route("/match", get(upgrade)).with_state(shared.clone());
        let (done_tx, done_rx) = oneshot::channel::<()>();
        let http = tokio::spawn(async move {
            axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = done_rx.await;
                })
                .await
        });
        let injector = opts.injector.take();
        let period = Duration::from_secs_f64(1.0 / tick_rate as f64);
        let sim = tokio::spawn(simulate(session, shared, cmd_rx, injector, period, snapshot_every));
        let outcome = sim.await.map_err(|e| ServerError::Join(e.to_string()))?;
        let _ = done_tx.send(());
        http.await.map_err(|e| ServerError::Join(e.to_string()))??;
        outcome
    }
}

async fn simulate(
    mut session: MatchSession,
    shared: Arc<Shared>,
    mut commands: mpsc::UnboundedReceiver<(UnitId, Command)>,
    mut injector: Option<Injector>,
    period: Duration,
    snapshot_every: u64,
) -> Result<MatchOutcome, ServerError> {
    let mut clock = tokio::time::interval(period);
    clock.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    let mut pending = Vec::new();
    let send = |b: Broadcast| {
        let _ = shared.frames.send(Arc::new(b));
    };
    send(Broadcast::snapshot(&session.state, Vec::new()));
    while !session.finished() {
        clock.tick().await;
        // Commands received during the previous tick apply together; the last
        // one per hero wins.
        let mut set = CommandSet::new();
        while let Ok((hero, command)) = commands.try_recv() {
            set.insert(hero, command);
        }
        if let Some(f) = injector.as_mut() {
            f(&mut session.state);
        }
        let events = session.tick(&set)?;
        for e in &events {
            match &e.kind {
                EventKind::TipEmitted { tip } => send(Broadcast::Tip(tip.clone())),
                _ if is_notable(e) => send(Broadcast::Event(e.clone())),
                _ => {}
            }
        }
        pending.extend(events);
        if session.state.tick.is_multiple_of(snapshot_every) || session.finished() {
            send(Broadcast::snapshot(&session.state, std::mem::take(&mut pending)));
        }
    }
    let end = Arc::new(Broadcast::End(session.state.winner));
    *shared.ended.lock().expect("end lock") = Some(end.clone());
    let _ = shared.frames.send(end);
    log::info!("match ended at tick {} winner {:?}", session.state.tick, session.state.winner);
    let id = format!("live-{}", session.seed);
    Ok(session.finish(id))
}

async fn upgrade(ws: WebSocketUpgrade, State(shared): State<Arc<Shared>>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, shared))
}

async fn send_msg(socket: &mut futures_util::stream::SplitSink<WebSocket, Message>, msg: &ServerMessage) -> bool {
    socket.send(Message::Text(msg.to_text().into())).await.is_ok()
}

async fn violation(mut sink: futures_util::stream::SplitSink<WebSocket, Message>, reason: String) {
    log::debug!("closing connection: {reason}");
    let _ = send_msg(&mut sink, &ServerMessage::error(reason.clone())).await;
    let frame = CloseFrame { code: close_code::PROTOCOL, reason: reason.chars().take(100).collect::<String>().into() };
    let _ = sink.send(Message::Close(Some(frame))).await;
}

fn parse(msg: &Message) -> Result<Option<ClientMessage>, String> {
    let text = match msg {
        Message::Text(t) => t.as_str(),
        Message::Binary(_) => return Err("binary frames are not supported".into()),
        _ => return Ok(None),
    };
    let parsed: ClientMessage = serde_json::from_str(text).map_err(|e| format!("malformed message: {e}"))?;
    if parsed.version() != PROTOCOL_VERSION {
        return Err(format!("unsupported protocol version {}", parsed.version()));
    }
    Ok(Some(parsed))
}

async fn connection(socket: WebSocket, shared: Arc<Shared>) {
    let (mut sink, mut stream) = socket.split();
    let role = loop {
        match stream.next().await {
            Some(Ok(Message::Close(_))) | Some(Err(_)) | None => return,
            Some(Ok(m)) => match parse(&m) {
                Ok(None) => continue,
                Ok(Some(ClientMessage::Join { role, .. })) => break role,
                Ok(Some(_)) => return violation(sink, "first message must be join".into()).await,
                Err(e) => return violation(sink, e).await,
            },
        }
    };
    if role == Role::Player && shared.player_taken.swap(true, Ordering::SeqCst) {
        return violation(sink, "player slot already taken".into()).await;
    }
    let hero = (role == Role::Player).then_some(shared.novice);
    let mut frames = shared.frames.subscribe();
    let welcome = ServerMessage::Welcome {
        v: PROTOCOL_VERSION,
        role,
        hero,
        tick_rate: shared.tick_rate,
        snapshot_every: shared.snapshot_every,
        config: shared.welcome_config.clone(),
    };
    if !send_msg(&mut sink, &welcome).await {
        return release(&shared, role);
    }
    let ended = shared.ended.lock().expect("end lock").clone();
    if let Some(end) = ended {
        let _ = send_msg(&mut sink, &end.for_viewer(hero)).await;
        let _ = sink.send(Message::Close(None)).await;
        return release(&shared, role);
    }
    loop {
        tokio::select! {
            frame = frames.recv() => match frame {
                Ok(frame) => {
                    if !send_msg(&mut sink, &frame.for_viewer(hero)).await {
                        break;
                    }
                    if matches!(*frame, Broadcast::End(_)) {
                        let _ = sink.send(Message::Close(None)).await;
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(n)) => log::warn!("viewer lagged by {n} frames"),
                Err(broadcast::error::RecvError::Closed) => break,
            },
            incoming = stream.next() => match incoming {
                Some(Ok(Message::Close(_))) | Some(Err(_)) | None => break,
                Some(Ok(m)) => {
                    let command = match parse(&m) {
                        Ok(None) => continue,
                        Ok(Some(ClientMessage::Join { .. })) => Err("already joined".to_string()),
                        Ok(Some(ClientMessage::Command { command, .. })) => Ok(command),
                        Ok(Some(ClientMessage::Ping { pos, kind, .. })) => Ok(Command::Ping { pos, kind }),
                        Err(e) => Err(e),
                    };
                    let result = command.and_then(|c| match hero {
                        Some(h) => Ok((h, c)),
                        None => Err("spectators cannot issue commands".to_string()),
                    });
                    match result {
                        Ok(cmd) => {
                            let _ = shared.commands.send(cmd);
                        }
                        Err(e) => {
                            violation(sink, e).await;
                            return release(&shared, role);
                        }
                    }
                }
            },
        }
    }
    release(&shared, role);
}

/// A departed player's hero is ordered to stand idle and the slot reopens.
fn release(shared: &Shared, role: Role) {
    if role == Role::Player {
        let _ = shared.commands.send((shared.novice, Command::Idle));
        shared.player_taken.store(false, Ordering::SeqCst);
    }
}
