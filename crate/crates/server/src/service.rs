use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use dots_polygons::boxes::{BoxesJson, BoxesState};
use dots_polygons::geometry::{Point, Rat};
use dots_polygons::polygon_game::{GameStateJson, Player, PolygonGameState, Variant};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ServiceError;
use crate::fixtures;
use crate::game::{AiPolicy, Game, Hint, Move, Outcome};

pub const DEFAULT_AI_BUDGET: u64 = 20_000;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreateConfig {
    /// `polygons` (default) or `boxes`; ignored for fixtures.
    pub kind: Option<String>,
    pub variant: Option<Variant>,
    pub points: Option<Value>,
    /// A full polygon state, as written by `to_json`.
    pub state: Option<Value>,
    /// `{width, height}` or a full boxes state.
    pub board: Option<Value>,
    pub fixture: Option<String>,
    pub ai_side: Option<Player>,
    pub ai_policy: Option<AiPolicy>,
    pub ai_budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LogEntry {
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: Move,
    pub outcome: Outcome,
    pub by_ai: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Session {
    pub id: String,
    pub initial: Game,
    pub game: Game,
    pub ai_side: Option<Player>,
    pub ai_policy: AiPolicy,
    pub ai_budget: u64,
    pub move_log: Vec<LogEntry>,
    pub created_at: u64,
    pub updated_at: u64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Render {
    /// Float approximations of the point coordinates.
    pub points: Vec<[f64; 2]>,
    pub score_r: f64,
    pub score_b: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    #[serde(flatten)]
    pub session: Session,
    pub to_move: Player,
    pub game_over: bool,
    pub score_r: Rat,
    pub score_b: Rat,
    pub render: Render,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MoveResponse {
    pub outcome: Outcome,
    pub ai_replies: Vec<LogEntry>,
    pub session: SessionView,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HintResponse {
    pub to_move: Player,
    pub moves: Vec<Hint>,
}

impl Session {
    /// Play the log forward from the initial state.
    pub fn replay(&self) -> Result<Game, ServiceError> {
        let mut g = self.initial.clone();
        for (k, e) in self.move_log.iter().enumerate() {
            if g.to_move() != e.player {
                return Err(ServiceError::Storage(format!("log entry {k} has the wrong player")));
            }
            let (n, o) = g.apply(&e.mv)?;
            if o != e.outcome {
                return Err(ServiceError::Storage(format!("log entry {k} replays to a different outcome")));
            }
            g = n;
        }
        Ok(g)
    }

    pub fn view(&self) -> SessionView {
        let points = match &self.game {
            Game::Polygons(s) => s.points().iter().map(|p| [p.x.to_f64(), p.y.to_f64()]).collect(),
            Game::Boxes(_) => Vec::new(),
        };
        let (score_r, score_b) = (self.game.score(Player::R), self.game.score(Player::B));
        SessionView {
            to_move: self.game.to_move(),
            game_over: self.game.is_terminal(),
            render: Render { points, score_r: score_r.to_f64(), score_b: score_b.to_f64() },
            score_r,
            score_b,
            session: self.clone(),
        }
    }

    fn push(&mut self, player: Player, mv: Move, by_ai: bool) -> Result<Outcome, ServiceError> {
        let (n, outcome) = self.game.apply(&mv)?;
        self.game = n;
        self.move_log.push(LogEntry { player, mv, outcome: outcome.clone(), by_ai });
        self.updated_at = now_ms();
        Ok(outcome)
    }

    /// Let the AI move while it is its turn. Returns the appended entries.
    fn run_ai(&mut self) -> Result<Vec<LogEntry>, ServiceError> {
        let start = self.move_log.len();
        while let Some(ai) = self.ai_side {
            if self.game.is_terminal() || self.game.to_move() != ai {
                break;
            }
            let mv = self.game.ai_move(self.ai_policy, self.ai_budget);
            self.push(ai, mv, true)?;
        }
        Ok(self.move_log[start..].to_vec())
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

fn parse_points(v: &Value) -> Result<Vec<Point>, ServiceError> {
    serde_json::from_value(v.clone()).map_err(|e| ServiceError::InvalidPoints(e.to_string()))
}

/// Build the starting position described by a config.
pub fn initial_game(cfg: &CreateConfig) -> Result<Game, ServiceError> {
    if let Some(name) = &cfg.fixture {
        return fixtures::load(name);
    }
    match cfg.kind.as_deref().unwrap_or("polygons") {
        "polygons" => {
            if let Some(st) = &cfg.state {
                let j: GameStateJson =
                    serde_json::from_value(st.clone()).map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
                return PolygonGameState::from_json(j)
                    .map(Game::Polygons)
                    .map_err(|e| ServiceError::InvalidConfig(e.to_string()));
            }
            let pts = cfg
                .points
                .as_ref()
                .ok_or_else(|| ServiceError::InvalidConfig("points, state or fixture required".into()))?;
            let pts = parse_points(pts)?;
            PolygonGameState::new_game(pts, cfg.variant.unwrap_or(Variant::Simple))
                .map(Game::Polygons)
                .map_err(|e| ServiceError::InvalidPoints(e.to_string()))
        }
        "boxes" => {
            let b = cfg.board.as_ref().ok_or_else(|| ServiceError::InvalidConfig("board required".into()))?;
            if let Ok(j) = serde_json::from_value::<BoxesJson>(b.clone()) {
                return BoxesState::from_json(j).map(Game::Boxes).map_err(|e| ServiceError::InvalidConfig(e.to_string()));
            }
            let dim = |k: &str| b.get(k).and_then(Value::as_u64).map(|v| v as u32);
            match (dim("width"), dim("height")) {
                (Some(w), Some(h)) => {
                    BoxesState::new(w, h).map(Game::Boxes).map_err(|e| ServiceError::InvalidConfig(e.to_string()))
                }
                _ => Err(ServiceError::InvalidConfig("board needs width and height".into())),
            }
        }
        other => Err(ServiceError::InvalidConfig(format!("unknown game kind {other}"))),
    }
}

#[derive(Clone, Debug, Default)]
pub struct ServiceConfig {
    /// Sessions idle for longer are dropped.
    pub ttl: Option<Duration>,
    /// Directory for JSON snapshots, one file per session.
    pub snapshot_dir: Option<PathBuf>,
}

type Slot = Arc<RwLock<Session>>;

/// In-memory session store. Moves on one session are serialized by its
/// write lock; reads share the read lock.
#[derive(Default)]
pub struct Service {
    sessions: RwLock<HashMap<String, Slot>>,
    cfg: ServiceConfig,
}

impl Service {
    pub fn new(cfg: ServiceConfig) -> Self {
        Service { sessions: RwLock::new(HashMap::new()), cfg }
    }

    /// Reload every snapshot in the configured directory.
    pub fn load_snapshots(&self) -> Result<usize, ServiceError> {
        let Some(dir) = &self.cfg.snapshot_dir else { return Ok(0) };
        let io = |e: std::io::Error| ServiceError::Storage(e.to_string());
        let mut n = 0;
        for entry in std::fs::read_dir(dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(io)?;
            let s: Session = serde_json::from_str(&text).map_err(|e| ServiceError::Storage(e.to_string()))?;
            s.replay()?;
            self.sessions.write().unwrap().insert(s.id.clone(), Arc::new(RwLock::new(s)));
            n += 1;
        }
        Ok(n)
    }

    fn persist(&self, s: &Session) -> Result<(), ServiceError> {
        if let Some(dir) = &self.cfg.snapshot_dir {
            let text = serde_json::to_string(s).map_err(|e| ServiceError::Storage(e.to_string()))?;
            std::fs::write(dir.join(format!("{}.json", s.id)), text).map_err(|e| ServiceError::Storage(e.to_string()))?;
        }
        Ok(())
    }

    fn evict_idle(&self) {
        let Some(ttl) = self.cfg.ttl else { return };
        let cutoff = now_ms().saturating_sub(ttl.as_millis() as u64);
        self.sessions.write().unwrap().retain(|_, s| s.try_read().map(|s| s.updated_at >= cutoff).unwrap_or(true));
    }

    fn slot(&self, id: &str) -> Result<Slot, ServiceError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn create(&self, cfg: &CreateConfig) -> Result<SessionView, ServiceError> {
        self.evict_idle();
        let game = initial_game(cfg)?;
        let t = now_ms();
        let mut s = Session {
            id: uuid::Uuid::new_v4().simple().to_string(),
            initial: game.clone(),
            game,
            ai_side: cfg.ai_side,
            ai_policy: cfg.ai_policy.unwrap_or_default(),
            ai_budget: cfg.ai_budget.unwrap_or(DEFAULT_AI_BUDGET),
            move_log: Vec::new(),
            created_at: t,
            updated_at: t,
        };
        s.run_ai()?;
        self.persist(&s)?;
        let view = s.view();
        self.sessions.write().unwrap().insert(s.id.clone(), Arc::new(RwLock::new(s)));
        Ok(view)
    }

    pub fn get(&self, id: &str) -> Result<SessionView, ServiceError> {
        Ok(self.slot(id)?.read().unwrap().view())
    }

    pub fn hint(&self, id: &str) -> Result<HintResponse, ServiceError> {
        let slot = self.slot(id)?;
        let s = slot.read().unwrap();
        Ok(HintResponse { to_move: s.game.to_move(), moves: s.game.hint() })
    }

    /// Apply a human move, then the AI's replies. `player`, when given,
    /// must be the side to move. A rejected move leaves the session as is.
    pub fn post_move(&self, id: &str, mv: Move, player: Option<Player>) -> Result<MoveResponse, ServiceError> {
        let slot = self.slot(id)?;
        let mut s = slot.write().unwrap();
        if s.game.is_terminal() {
            return Err(ServiceError::GameOver);
        }
        let mover = s.game.to_move();
        if Some(mover) == s.ai_side || player.is_some_and(|p| p != mover) {
            return Err(ServiceError::NotYourTurn);
        }
        let mut next = s.clone();
        let outcome = next.push(mover, mv, false)?;
        let ai_replies = next.run_ai()?;
        self.persist(&next)?;
        *s = next;
        Ok(MoveResponse { outcome, ai_replies, session: s.view() })
    }
}
