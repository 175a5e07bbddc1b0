"""HTTP service hosting live human-teaching sessions.

A session pairs a human (one colour) against the learning computer for a
planned number of games.  The server is the single source of truth: it
validates every move, lists the human's legal moves in each view, applies
the learning updates, advances finished games automatically, and writes a
model checkpoint after every completed game so a crashed session resumes
at the last game boundary.

The resource API is versioned under /api/v1:

    POST   /api/v1/sessions             create a session
    GET    /api/v1/sessions             list sessions
    GET    /api/v1/sessions/{id}        current board view
    POST   /api/v1/sessions/{id}/moves  submit the human move
    DELETE /api/v1/sessions/{id}        abort the session
    GET    /api/v1/sessions/{id}/report per-game records and aggregates

Errors carry a machine-readable code: the board-rule codes from the rules
engine plus "unknown-session", "out-of-turn", "session-over", "busy", and
"bad-request".  Sessions are isolated single-writer state machines; a
second simultaneous mutation receives 409 "busy".  No authentication:
session ids are unguessable tokens and the tool is meant for a desk or a
classroom, not the open internet.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .agents import AgentSpec
from .game import (
    Color,
    Coord,
    GameConfig,
    IllegalMoveError,
    Move,
    MoveKind,
)
from .model import TdParams, init_network
from .runner import (
    SESSION_LIVE,
    GameRecord,
    HcSession,
    ProtocolError,
    aggregate_records,
    derive_seed,
)
from .store import load_model, save_model

ERROR_UNKNOWN_SESSION = "unknown-session"
ERROR_OUT_OF_TURN = "out-of-turn"
ERROR_SESSION_OVER = "session-over"
ERROR_BUSY = "busy"
ERROR_BAD_REQUEST = "bad-request"


def _error(status_code: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status_code, detail={"code": code, "message": message})


def move_to_dict(move: Optional[Move]) -> Optional[dict]:
    if move is None:
        return None
    return {
        "kind": move.kind.value,
        "from": None if move.source is None else {"col": move.source.col, "row": move.source.row},
        "to": {"col": move.dest.col, "row": move.dest.row},
    }


def move_from_dict(data: dict) -> Move:
    try:
        kind = MoveKind(data["kind"])
        source = data.get("from")
        dest = data["to"]
        return Move(
            kind,
            None if source is None else Coord(int(source["col"]), int(source["row"])),
            Coord(int(dest["col"]), int(dest["row"])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise _error(422, ERROR_BAD_REQUEST, f"malformed move payload: {exc}")


class CreateSessionRequest(BaseModel):
    human_color: str = Field(default="white", pattern="^(white|black)$")
    games: int = Field(default=40, ge=1, le=10_000)
    n: int = 8
    a: int = 2
    beta: int = 10
    max_plies: int = 1000
    exploit_prob: float = Field(default=0.9, ge=0.0, le=1.0)
    learning_rate: float = Field(default=0.01, gt=0.0)
    seed: Optional[int] = Field(default=None, ge=0)
    model_prefix: Optional[str] = None  # load nets from <data>/models/<prefix>.*.json


class MoveRequest(BaseModel):
    kind: str
    from_: Optional[dict] = Field(default=None, alias="from")
    to: dict

    model_config = {"populate_by_name": True}


class ManagedSession:
    """One live session plus its lock and on-disk layout."""

    def __init__(self, session_id: str, session: HcSession, directory: Optional[str]):
        self.id = session_id
        self.session = session
        self.directory = directory
        self.lock = threading.Lock()
        self.meta: dict = {}

    def checkpoint(self, record: GameRecord) -> None:
        if self.directory is None:
            return
        ckpt_dir = os.path.join(self.directory, "checkpoints")
        os.makedirs(ckpt_dir, exist_ok=True)
        for color, name in ((Color.WHITE, "white"), (Color.BLACK, "black")):
            net = self.session.nets[color]
            save_model(
                net,
                self.session.config,
                os.path.join(ckpt_dir, f"game_{record.game_index:04d}.{name}.json"),
            )
            save_model(net, self.session.config, os.path.join(self.directory, f"latest.{name}.json"))
        self.persist_meta()

    def persist_meta(self) -> None:
        if self.directory is None:
            return
        os.makedirs(self.directory, exist_ok=True)
        payload = dict(self.meta)
        payload.update(
            {
                "status": self.session.status,
                "game_index": self.session.game_index,
                "records": [r.to_dict() for r in self.session.records],
            }
        )
        with open(os.path.join(self.directory, "session.json"), "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)


class SessionManager:
    def __init__(self, data_dir: Optional[str] = None, default_seed: int = 0):
        self.data_dir = data_dir
        self.default_seed = default_seed
        self.sessions: dict = {}
        self._create_lock = threading.Lock()
        if data_dir is not None:
            os.makedirs(os.path.join(data_dir, "sessions"), exist_ok=True)
            self._recover()

    # -- lifecycle ------------------------------------------------------------

    def create(self, request: CreateSessionRequest) -> ManagedSession:
        try:
            config = GameConfig(
                n=request.n, a=request.a, beta=request.beta, max_plies=request.max_plies
            )
        except ValueError as exc:
            raise _error(422, ERROR_BAD_REQUEST, str(exc))
        session_id = secrets.token_urlsafe(12)
        seed = request.seed if request.seed is not None else derive_seed(
            self.default_seed, len(self.sessions), 1
        )
        human = Color.WHITE if request.human_color == "white" else Color.BLACK
        white_net, black_net = self._nets_for(request, config, seed)
        directory = (
            os.path.join(self.data_dir, "sessions", session_id)
            if self.data_dir is not None
            else None
        )
        managed = ManagedSession(session_id, None, directory)  # session set just below
        session = HcSession(
            config=config,
            human_color=human,
            games_planned=request.games,
            white_net=white_net,
            black_net=black_net,
            td=TdParams(learning_rate=request.learning_rate),
            computer=AgentSpec(kind="learner", exploit_prob=request.exploit_prob),
            session_seed=seed,
            on_game_complete=managed.checkpoint,
        )
        managed.session = session
        managed.meta = {
            "id": session_id,
            "human_color": request.human_color,
            "games_planned": request.games,
            "seed": seed,
            "exploit_prob": request.exploit_prob,
            "learning_rate": request.learning_rate,
            "config": {
                "n": config.n,
                "a": config.a,
                "beta": config.beta,
                "max_plies": config.max_plies,
            },
        }
        with self._create_lock:
            self.sessions[session_id] = managed
        managed.persist_meta()
        return managed

    def _nets_for(self, request: CreateSessionRequest, config: GameConfig, seed: int):
        if request.model_prefix is None:
            return (
                init_network(config, Color.WHITE, seed=derive_seed(seed, 101)),
                init_network(config, Color.BLACK, seed=derive_seed(seed, 102)),
            )
        if self.data_dir is None:
            raise _error(404, ERROR_BAD_REQUEST, "this server has no model directory")
        base = os.path.join(self.data_dir, "models", request.model_prefix)
        try:
            white = load_model(base + ".white.json")
            black = load_model(base + ".black.json")
        except FileNotFoundError:
            raise _error(
                404, ERROR_BAD_REQUEST, f"unknown model id {request.model_prefix!r}"
            )
        if white.config != config or black.config != config:
            raise _error(
                422, ERROR_BAD_REQUEST, "model was trained on a different board configuration"
            )
        return white.net, black.net

    def _recover(self) -> None:
        """Rebuild sessions from disk, resuming at the last completed game."""
        root = os.path.join(self.data_dir, "sessions")
        for session_id in sorted(os.listdir(root)):
            meta_path = os.path.join(root, session_id, "session.json")
            if not os.path.exists(meta_path):
                continue
            with open(meta_path, encoding="utf-8") as fh:
                meta = json.load(fh)
            directory = os.path.join(root, session_id)
            try:
                white = load_model(os.path.join(directory, "latest.white.json")).net
                black = load_model(os.path.join(directory, "latest.black.json")).net
            except FileNotFoundError:
                config = GameConfig(**meta["config"])
                white = init_network(config, Color.WHITE, seed=derive_seed(meta["seed"], 101))
                black = init_network(config, Color.BLACK, seed=derive_seed(meta["seed"], 102))
            config = GameConfig(**meta["config"])
            records = [GameRecord.from_dict(r) for r in meta.get("records", [])]
            managed = ManagedSession(session_id, None, directory)
            session = HcSession.resume(
                config=config,
                human_color=Color.WHITE if meta["human_color"] == "white" else Color.BLACK,
                games_planned=meta["games_planned"],
                white_net=white,
                black_net=black,
                td=TdParams(learning_rate=meta.get("learning_rate", 0.01)),
                computer=AgentSpec(kind="learner", exploit_prob=meta.get("exploit_prob", 0.9)),
                session_seed=meta["seed"],
                completed_records=records,
                status=meta.get("status", SESSION_LIVE),
                on_game_complete=managed.checkpoint,
            )
            managed.session = session
            managed.meta = meta
            self.sessions[session_id] = managed

    def get(self, session_id: str) -> ManagedSession:
        managed = self.sessions.get(session_id)
        if managed is None:
            raise _error(404, ERROR_UNKNOWN_SESSION, f"no session {session_id!r}")
        return managed


def board_view(managed: ManagedSession) -> dict:
    """The complete client-facing view; legality always computed server-side."""
    session = managed.session
    state = session.state
    cells = [
        {"col": coord.col, "row": coord.row, "color": color.name.lower()}
        for coord, color in state.occupied()
    ]
    records = session.records
    return {
        "session_id": managed.id,
        "session_status": session.status,
        "game_index": session.game_index,
        "games_planned": session.games_planned,
        "human_color": session.human_color.name.lower(),
        "computer_color": session.computer_color.name.lower(),
        "config": managed.meta.get("config", {}),
        "cells": cells,
        "white_reserve": state.white_base,
        "black_reserve": state.black_base,
        "to_move": state.to_move.name.lower(),
        "ply": state.ply,
        "game_status": state.status.value,
        "human_to_move": session.human_to_move,
        "computer_thinking": managed.lock.locked(),
        "legal_moves": [move_to_dict(m) for m in session.human_legal_moves()],
        "last_move": move_to_dict(session.last_move),
        "move_counts": {
            "white": session.move_counts[Color.WHITE],
            "black": session.move_counts[Color.BLACK],
        },
        "tally": {
            "white_wins": sum(1 for r in records if r.winner == "white"),
            "black_wins": sum(1 for r in records if r.winner == "black"),
            "draws": sum(1 for r in records if r.winner == "draw"),
        },
        "records": [r.to_dict() for r in records],
    }


def create_app(
    data_dir: Optional[str] = None,
    ui_dir: Optional[str] = None,
    default_seed: int = 0,
) -> FastAPI:
    app = FastAPI(title="baseraid teaching service", version="1")
    manager = SessionManager(data_dir=data_dir, default_seed=default_seed)
    app.state.manager = manager

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(request: CreateSessionRequest):
        managed = manager.create(request)
        return board_view(managed)

    @app.get("/api/v1/sessions")
    def list_sessions():
        return [
            {
                "session_id": m.id,
                "status": m.session.status,
                "game_index": m.session.game_index,
                "games_planned": m.session.games_planned,
                "human_color": m.session.human_color.name.lower(),
            }
            for m in manager.sessions.values()
        ]

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return board_view(manager.get(session_id))

    @app.post("/api/v1/sessions/{session_id}/moves")
    def submit_move(session_id: str, request: MoveRequest):
        managed = manager.get(session_id)
        move = move_from_dict(
            {"kind": request.kind, "from": request.from_, "to": request.to}
        )
        if not managed.lock.acquire(blocking=False):
            raise _error(409, ERROR_BUSY, "another move is being processed")
        try:
            session = managed.session
            if session.status != SESSION_LIVE:
                raise _error(409, ERROR_SESSION_OVER, f"session is {session.status}")
            if not session.human_to_move:
                raise _error(409, ERROR_OUT_OF_TURN, "it is not your turn")
            try:
                step = session.play_human_move(move)
            except IllegalMoveError as exc:
                raise _error(400, exc.rule, str(exc))
            except ProtocolError as exc:
                raise _error(409, ERROR_OUT_OF_TURN, str(exc))
            managed.persist_meta()
            view = board_view(managed)
            view["accepted_move"] = move_to_dict(step.human_move)
            view["computer_reply"] = move_to_dict(step.computer_move)
            view["finished_games"] = [r.to_dict() for r in step.finished_records]
            return view
        finally:
            managed.lock.release()

    @app.delete("/api/v1/sessions/{session_id}")
    def abort_session(session_id: str):
        managed = manager.get(session_id)
        with managed.lock:
            managed.session.abort()
            managed.persist_meta()
        return board_view(managed)

    @app.get("/api/v1/sessions/{session_id}/report")
    def session_report(session_id: str):
        managed = manager.get(session_id)
        records = managed.session.records
        return {
            "session_id": managed.id,
            "status": managed.session.status,
            "records": [r.to_dict() for r in records],
            "aggregates": aggregate_records(records),
        }

    if ui_dir is not None and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
