"""HTTP service exposing systems, actions, scenarios and games.

Sessions live in process memory (optionally snapshotted to JSON files); each
holds an initial system plus the committed action log, so undo replays the
log minus its last entry. Handlers solve synchronously; this is a desk tool,
not a throughput service.

Error codes: 400 malformed body or schema, 404 unknown id, 409 action not
applicable, 422 system validation failures, 503 solver capability exceeded.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import document as doc
from .games import (
    GameError,
    auction_new,
    auction_solutions,
    auction_step,
    find_dominant,
    find_pure_nash,
    payoff_matrix,
)
from .interventions import ActionError, apply_action
from .model import FinancialSystem, InputError, InvalidSystemError, validate_system
from .scenarios import build_scenario, list_scenarios
from .solver import SolverCapabilityError, SolverConfig, find_solutions

__all__ = ["create_app", "SessionStore"]


@dataclass
class Session:
    id: str
    initial: FinancialSystem
    current: FinancialSystem
    actions: list = field(default_factory=list)
    scenario: Optional[str] = None
    params: dict = field(default_factory=dict)
    players: tuple = ()
    kind: str = "document"
    auction: Optional[object] = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory session registry with optional JSON snapshots."""

    def __init__(self, snapshot_dir: Optional[str] = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.snapshot_dir = snapshot_dir
        if snapshot_dir:
            os.makedirs(snapshot_dir, exist_ok=True)

    def create(self, system: FinancialSystem, **meta) -> Session:
        session = Session(
            id=uuid.uuid4().hex[:12], initial=system, current=system, **meta
        )
        with self._lock:
            self._sessions[session.id] = session
        self.snapshot(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session

    def snapshot(self, session: Session) -> None:
        if not self.snapshot_dir:
            return
        payload = {
            "id": session.id,
            "document": doc.system_to_document(session.initial),
            "actions": [doc.action_to_dict(a) for a in session.actions],
            "scenario": session.scenario,
            "params": session.params,
        }
        path = os.path.join(self.snapshot_dir, f"{session.id}.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)


def _error(status: int, exc: Exception) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": str(exc)})


async def _body(request: Request) -> dict:
    raw = await request.body()
    if not raw:
        return {}
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise doc.DocumentError(f"invalid JSON body: {exc.msg}") from None
    if not isinstance(data, dict):
        raise doc.DocumentError("request body must be a JSON object")
    return data


def _parse_bool(raw: Optional[str], name: str) -> bool:
    if raw is None:
        return False
    lowered = raw.lower()
    if lowered in ("1", "true", "yes"):
        return True
    if lowered in ("0", "false", "no"):
        return False
    raise doc.DocumentError(f"query parameter {name} must be a boolean, got {raw!r}")


def _parse_float(raw: Optional[str], name: str) -> Optional[float]:
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise doc.DocumentError(f"query parameter {name} must be a number, got {raw!r}") from None


def _session_payload(session: Session) -> dict:
    return {
        "id": session.id,
        "system": doc.system_to_document(session.current),
        "actions": [doc.action_to_dict(a) for a in session.actions],
        "scenario": session.scenario,
        "params": session.params,
        "players": list(session.players),
        "kind": session.kind,
    }


def create_app(
    snapshot_dir: Optional[str] = None, config: SolverConfig = SolverConfig()
) -> FastAPI:
    app = FastAPI(title="netclear", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(snapshot_dir)
    app.state.store = store
    base_config = config

    def _validated(system: FinancialSystem) -> FinancialSystem:
        report = validate_system(system)
        if not report.ok:
            raise InvalidSystemError(report.violations)
        return system

    def _config(tol: Optional[float]) -> SolverConfig:
        if tol is None:
            return base_config
        if tol <= 0:
            raise doc.DocumentError(f"tol must be > 0, got {tol}")
        return SolverConfig(tolerance=tol)

    @app.exception_handler(doc.DocumentError)
    async def _on_document(request, exc):
        return _error(400, exc)

    @app.exception_handler(InputError)
    async def _on_input(request, exc):
        return _error(400, exc)

    @app.exception_handler(InvalidSystemError)
    async def _on_invalid(request, exc):
        return _error(422, exc)

    @app.exception_handler(ActionError)
    async def _on_action(request, exc):
        return _error(409, exc)

    @app.exception_handler(GameError)
    async def _on_game(request, exc):
        return _error(409, exc)

    @app.exception_handler(SolverCapabilityError)
    async def _on_capability(request, exc):
        return _error(503, exc)

    @app.exception_handler(KeyError)
    async def _on_missing(request, exc):
        return JSONResponse(status_code=404, content={"error": f"unknown id {exc.args[0]!r}"})

    @app.post("/systems", status_code=201)
    async def create_system(request: Request):
        body = await _body(request)
        document = body.get("document", body)
        system = _validated(doc.parse_document(document))
        session = store.create(system)
        return _session_payload(session)

    @app.get("/systems/{session_id}")
    async def get_system(session_id: str):
        return _session_payload(store.get(session_id))

    @app.get("/systems/{session_id}/solutions")
    async def get_solutions(session_id: str, request: Request):
        session = store.get(session_id)
        want_all = _parse_bool(request.query_params.get("all"), "all")
        tol = _parse_float(request.query_params.get("tol"), "tol")
        solutions = find_solutions(session.current, _config(tol))
        payload = doc.solution_set_to_dict(solutions)
        payload["all"] = want_all
        if not want_all:
            payload["solutions"] = payload["solutions"][:1]
        return payload

    def _decoded_action(session: Session, body: dict):
        data = body.get("action", body)
        if not data:
            raise doc.DocumentError("missing action object")
        return doc.action_from_dict(session.current, data)

    @app.post("/systems/{session_id}/actions/preview")
    async def preview_action(session_id: str, request: Request):
        from .interventions import assess

        session = store.get(session_id)
        body = await _body(request)
        action = _decoded_action(session, body)
        acting = body.get("acting")
        if acting is not None and not isinstance(acting, str):
            raise doc.DocumentError("acting must be a bank id string")
        report = assess(session.current, action, acting=acting, config=base_config)
        return doc.effect_report_to_dict(report)

    @app.post("/systems/{session_id}/actions/commit")
    async def commit_action(session_id: str, request: Request):
        session = store.get(session_id)
        action = _decoded_action(session, await _body(request))
        with session.lock:
            modified = _validated(apply_action(session.current, action))
            session.current = modified
            session.actions.append(action)
            store.snapshot(session)
            solutions = find_solutions(modified, base_config)
        payload = _session_payload(session)
        payload["solutions"] = doc.solution_set_to_dict(solutions)
        return payload

    @app.post("/systems/{session_id}/undo")
    async def undo_action(session_id: str, request: Request):
        session = store.get(session_id)
        with session.lock:
            if not session.actions:
                raise ActionError("nothing to undo")
            replay = session.actions[:-1]
            current = session.initial
            for past in replay:
                current = apply_action(current, past)
            session.current = current
            session.actions = replay
            store.snapshot(session)
            solutions = find_solutions(current, base_config)
        payload = _session_payload(session)
        payload["solutions"] = doc.solution_set_to_dict(solutions)
        return payload

    @app.get("/scenarios")
    async def get_scenarios():
        return {"scenarios": list_scenarios()}

    @app.post("/scenarios/{name}", status_code=201)
    async def create_scenario(name: str, request: Request):
        body = await _body(request)
        params = body.get("params", body)
        if not isinstance(params, dict):
            raise doc.DocumentError("params must be an object")
        try:
            scenario = build_scenario(name, **params)
        except GameError as exc:
            if "unknown scenario" in str(exc):
                raise KeyError(name) from None
            raise InvalidSystemError((str(exc),)) from None
        auction = None
        if scenario.kind == "auction":
            auction = auction_new(
                scenario.params["epsilon"],
                e_u=scenario.params.get("e_u", 0.0),
                e_v=scenario.params.get("e_v", 0.0),
            )
        session = store.create(
            scenario.system,
            scenario=scenario.name,
            params=dict(scenario.params),
            players=tuple(scenario.players),
            kind=scenario.kind,
            auction=auction,
        )
        payload = _session_payload(session)
        if auction is not None:
            payload["auction"] = doc.auction_state_to_dict(auction)
        return payload

    @app.get("/games/{name}/matrix")
    async def get_matrix(name: str, request: Request):
        params = {}
        for key in ("gamma0", "delta", "epsilon"):
            value = _parse_float(request.query_params.get(key), key)
            if value is not None:
                params[key] = value
        k_raw = request.query_params.get("k")
        if k_raw is not None:
            try:
                params["k"] = int(k_raw)
            except ValueError:
                raise doc.DocumentError(f"query parameter k must be an integer, got {k_raw!r}") from None
        tol = _parse_float(request.query_params.get("tol"), "tol")
        try:
            scenario = build_scenario(name, **params)
        except GameError as exc:
            if "unknown scenario" in str(exc):
                raise KeyError(name) from None
            raise InvalidSystemError((str(exc),)) from None
        matrix = payoff_matrix(scenario, _config(tol))
        payload = doc.matrix_to_dict(matrix)
        payload["nash"] = [list(p) for p in find_pure_nash(matrix)]
        payload["dominant"] = {p: find_dominant(matrix, p) for p in matrix.players}
        return payload

    @app.post("/auction/{session_id}/step")
    async def step_auction(session_id: str, request: Request):
        session = store.get(session_id)
        body = await _body(request)
        player = body.get("player")
        if not isinstance(player, str):
            raise doc.DocumentError("missing string field 'player'")
        with session.lock:
            if session.auction is None:
                raise GameError("session is not a dollar auction")
            session.auction = auction_step(session.auction, player)
            state = session.auction
        payload = {
            "id": session.id,
            "state": doc.auction_state_to_dict(state),
            "move": doc.auction_move_to_dict(state.history[-1]),
            "outcome": doc.auction_outcome_to_dict(auction_solutions(state)),
        }
        return payload

    return app
