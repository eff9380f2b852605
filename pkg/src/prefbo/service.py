"""HTTP session service for live, externally judged duels.

A session owns one optimization run: the server proposes pairs, an outside
judge (human UI or script) posts which one won, and the server computes
the next pair with the hallucination-conditioned GP.  Interactive fidelity
trades for latency: chains warm-start with a reduced burn-in instead of
the experiment harness's cold 1000-sweep chains.

State machine per session: awaiting_feedback -> computing ->
awaiting_feedback, ending at finished; operations on one session are
serialized by a per-session lock, so concurrent sessions never block each
other.
"""

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np

from prefbo import acquisition as acq
from prefbo import approx, gibbs, skew
from prefbo.duels import Duel, DuelDataset
from prefbo.kernels import KernelConfig, build_joint_covariance
from prefbo.loop import initial_lengthscales

__all__ = ["SessionManager", "ServiceError", "create_app",
           "INTERACTIVE_BURN_IN"]

INTERACTIVE_BURN_IN = 200
PRESENTATIONS = {"color_rgb": 3, "point_2d": 2, "raw_vector": None}
GRID_1D = 101
GRID_2D = 21


class ServiceError(Exception):
    def __init__(self, status_code, message):
        super().__init__(message)
        self.status_code = status_code
        self.message = message


@dataclass
class _Session:
    id: str
    dimension: int
    domain: np.ndarray
    presentation: str
    method: str
    rng: np.random.Generator
    max_rounds: int = None
    data: DuelDataset = None
    kernel: KernelConfig = None
    init_remaining: list = field(default_factory=list)
    pending: tuple = None
    round: int = 0
    status: str = "awaiting_feedback"
    warm_state: np.ndarray = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    grid_cache: tuple = None

    @property
    def recommendation(self):
        if len(self.data) == 0:
            return None
        return self.data.duels[-1].winner


def _uniform_pair(rng, domain):
    lo, hi = domain[:, 0], domain[:, 1]
    return rng.uniform(lo, hi), rng.uniform(lo, hi)


class SessionManager:
    """All session logic, HTTP-free; the FastAPI layer is a thin adapter."""

    def __init__(self, session_dir=None, seed=None):
        self.sessions = {}
        self.session_dir = session_dir
        self._seed_seq = np.random.SeedSequence(seed)
        self._registry_lock = threading.Lock()
        if session_dir:
            os.makedirs(session_dir, exist_ok=True)

    # -- persistence -------------------------------------------------------
    def _log(self, session, event, payload):
        if not self.session_dir:
            return
        path = os.path.join(self.session_dir, f"{session.id}.jsonl")
        with open(path, "a") as fh:
            fh.write(json.dumps({"event": event, "ts": time.time(),
                                 **payload}) + "\n")

    # -- operations --------------------------------------------------------
    def create_session(self, dimension, presentation="raw_vector",
                       bounds=None, method="hb_ei", init_pairs=None,
                       max_rounds=None, seed=None):
        dimension = int(dimension)
        if dimension < 1:
            raise ServiceError(400, "dimension must be a positive integer")
        expected = PRESENTATIONS.get(presentation, "missing")
        if expected == "missing":
            raise ServiceError(400, f"unknown presentation {presentation!r}")
        if expected is not None and dimension != expected:
            raise ServiceError(
                400, f"presentation {presentation!r} requires dimension {expected}")
        if method != "hb_ei":
            raise ServiceError(400, "only the hb_ei method is served")
        if bounds is None:
            domain = np.tile([0.0, 1.0], (dimension, 1))
        else:
            domain = np.asarray(bounds, float)
            if domain.shape != (dimension, 2) or (domain[:, 0] >= domain[:, 1]).any():
                raise ServiceError(400, "bounds must be d rows of [lo, hi] with lo < hi")
        if init_pairs is None:
            init_pairs = 3 * dimension
        if init_pairs < 1:
            raise ServiceError(400, "init_pairs must be >= 1")
        if max_rounds is not None and max_rounds < init_pairs:
            raise ServiceError(400, "max_rounds must cover the initial pairs")
        with self._registry_lock:
            child = self._seed_seq.spawn(1)[0]
        rng = np.random.default_rng(seed if seed is not None else child)
        session = _Session(
            id=uuid.uuid4().hex, dimension=dimension, domain=domain,
            presentation=presentation, method=method, rng=rng,
            max_rounds=max_rounds, data=DuelDataset(dimension),
            kernel=KernelConfig(initial_lengthscales(domain)))
        session.init_remaining = [
            _uniform_pair(rng, domain) for _ in range(init_pairs)]
        session.pending = session.init_remaining.pop(0)
        session.round = 1
        self.sessions[session.id] = session
        self._log(session, "created", {
            "dimension": dimension, "presentation": presentation,
            "bounds": domain.tolist(), "method": method,
            "init_pairs": init_pairs, "max_rounds": max_rounds})
        self._log(session, "presented", self._duel_payload(session))
        return self._duel_response(session)

    def _get(self, session_id):
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError(404, f"no session {session_id!r}")
        return session

    def _duel_payload(self, session):
        if session.pending is None:
            return {"round": session.round, "duel": None}
        x_a, x_b = session.pending
        return {"round": session.round,
                "duel": {"a": x_a.tolist(), "b": x_b.tolist()}}

    def _duel_response(self, session):
        rec = session.recommendation
        return {"session_id": session.id, "status": session.status,
                "dimension": session.dimension,
                "presentation": session.presentation,
                "recommendation": None if rec is None else rec.tolist(),
                **self._duel_payload(session)}

    def pending_duel(self, session_id):
        session = self._get(session_id)
        with session.lock:
            return self._duel_response(session)

    def submit_outcome(self, session_id, winner, round=None):
        session = self._get(session_id)
        if winner not in ("a", "b"):
            raise ServiceError(400, "winner must be 'a' or 'b'")
        with session.lock:
            if session.status == "finished":
                raise ServiceError(409, "session is finished")
            if session.status != "awaiting_feedback" or session.pending is None:
                raise ServiceError(409, "no feedback expected right now")
            if round is not None and round != session.round:
                raise ServiceError(
                    409, f"stale outcome for round {round}; current round "
                         f"is {session.round}")
            session.status = "computing"
            try:
                x_a, x_b = session.pending
                w, l = (x_a, x_b) if winner == "a" else (x_b, x_a)
                session.data = session.data.append(Duel(w, l))
                session.pending = None
                self._log(session, "outcome",
                          {"round": session.round, "winner": winner})
                if session.max_rounds is not None \
                        and len(session.data) >= session.max_rounds:
                    session.status = "finished"
                    return self._duel_response(session)
                if session.init_remaining:
                    session.pending = session.init_remaining.pop(0)
                else:
                    session.pending = self._propose(session)
                session.round += 1
                session.status = "awaiting_feedback"
                self._log(session, "presented", self._duel_payload(session))
                return self._duel_response(session)
            except ServiceError:
                raise
            except Exception:
                session.status = "awaiting_feedback"
                raise

    def _propose(self, session):
        """One warm-started optimization step; returns the next (x1, x2)."""
        data = session.data
        if len(data) % 10 == 0:
            session.kernel = approx.optimize_hyperparameters(
                data, session.kernel, restarts=2, maxiter=25)
        x1 = session.recommendation
        jc0 = build_joint_covariance([], data, session.kernel)
        burn = None if session.warm_state is not None else INTERACTIVE_BURN_IN
        v = gibbs.hallucination(jc0.sigma_vv, session.rng, burn_in=burn,
                                warm_start=session.warm_state)
        session.warm_state = v
        gp = skew.HallucinationGP(data, session.kernel, jc0, v)
        incumbent = float(gp.predict(x1[None, :])[0][0])

        def score(X):
            mean, var = gp.predict(X)
            return acq.ei(mean, np.sqrt(var), incumbent)

        a_cfg = acq.AcquisitionConfig(kind="hb_ei")
        x2 = acq.maximize_acquisition(score, session.domain, a_cfg,
                                      session.rng)
        return x1, x2

    def session_state(self, session_id):
        session = self._get(session_id)
        with session.lock:
            rec = session.recommendation
            return {
                "session_id": session.id,
                "status": session.status,
                "round": session.round,
                "dimension": session.dimension,
                "presentation": session.presentation,
                "method": session.method,
                "history": [{"winner": d.winner.tolist(),
                             "loser": d.loser.tolist()}
                            for d in session.data.duels],
                "recommendation": None if rec is None else rec.tolist(),
                "pending_duel": self._duel_payload(session)["duel"],
                "posterior": self._posterior_grid(session),
            }

    def _posterior_grid(self, session):
        """Mean and 90% band on a presentation grid; d <= 2 only."""
        d = session.dimension
        if d > 2 or len(session.data) == 0:
            return None
        t = len(session.data)
        if session.grid_cache is not None and session.grid_cache[0] == t:
            return session.grid_cache[1]
        lo, hi = session.domain[:, 0], session.domain[:, 1]
        if d == 1:
            pts = np.linspace(lo[0], hi[0], GRID_1D)[:, None]
        else:
            g0 = np.linspace(lo[0], hi[0], GRID_2D)
            g1 = np.linspace(lo[1], hi[1], GRID_2D)
            pts = np.stack(np.meshgrid(g0, g1, indexing="ij"),
                           axis=-1).reshape(-1, 2)
        jc = build_joint_covariance(pts, session.data, session.kernel)
        chain = gibbs.ChainConfig(n_samples=200,
                                  burn_in=INTERACTIVE_BURN_IN)
        batch = gibbs.gibbs_chain(jc.sigma_vv, chain, session.rng)
        mean = skew.posterior_mean(jc, batch).value
        idx = np.arange(len(pts))
        lower = skew.quantile_batch(jc, batch, idx, 0.05)
        upper = skew.quantile_batch(jc, batch, idx, 0.95)
        payload = {"shape": "grid1d" if d == 1 else "grid2d",
                   "points": pts.tolist(), "mean": mean.tolist(),
                   "lower": lower.tolist(), "upper": upper.tolist()}
        session.grid_cache = (t, payload)
        return payload


def create_app(session_dir=None, seed=None):
    """FastAPI app serving the documented session endpoints, CORS enabled."""
    from fastapi import FastAPI, Request
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse

    manager = SessionManager(session_dir=session_dir, seed=seed)
    app = FastAPI(title="prefbo duel sessions")
    app.state.manager = manager
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status_code,
                            content={"error": exc.message})

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict):
        allowed = {"dimension", "presentation", "bounds", "method",
                   "init_pairs", "max_rounds", "seed"}
        unknown = set(body) - allowed
        if unknown:
            raise ServiceError(400, f"unknown fields: {sorted(unknown)}")
        if "dimension" not in body:
            raise ServiceError(400, "dimension is required")
        return manager.create_session(**body)

    @app.get("/sessions/{session_id}")
    async def session_state(session_id: str):
        return manager.session_state(session_id)

    @app.get("/sessions/{session_id}/duel")
    async def pending_duel(session_id: str):
        return manager.pending_duel(session_id)

    @app.post("/sessions/{session_id}/outcome")
    async def submit_outcome(session_id: str, body: dict):
        if "winner" not in body:
            raise ServiceError(400, "winner is required")
        unknown = set(body) - {"winner", "round"}
        if unknown:
            raise ServiceError(400, f"unknown fields: {sorted(unknown)}")
        return manager.submit_outcome(session_id, body["winner"],
                                      round=body.get("round"))

    return app
