"""Shared test utilities: hypothesis strategies, reference oracles, stub server."""

from __future__ import annotations

import json
import re
import threading
import time
from fractions import Fraction
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from hypothesis import strategies as st

from xarjudge.model import (
    EvaluationPool,
    EventWindow,
    ExplanationCandidate,
    HighLevelEvent,
    ModelRoster,
    WindowCase,
)

MODEL_NAMES = ["proto", "lime", "gradcam", "m4", "m5"]
# whitespace variants collide after canonicalization; case variants must not
TEXT_ATOMS = ["kitchen", " kitchen ", "kitchen  stove", "kitchen stove", "Kitchen",
              "bed", "bed\tpressure", "bed pressure", "tv on"]


@st.composite
def rosters(draw, max_models=3, max_activities=2):
    k = draw(st.integers(1, max_models))
    ids = tuple(MODEL_NAMES[:k])
    ids = tuple(draw(st.permutations(ids)))
    acts = tuple(draw(st.lists(st.sampled_from(["cooking", "sleeping", "eating"]),
                               min_size=1, max_size=max_activities, unique=True)))
    return ModelRoster(ids, acts)


@st.composite
def cases_for(draw, roster: ModelRoster, window_id: str):
    duration = draw(st.sampled_from([30.0, 60.0, 90.0]))
    offsets = sorted(draw(st.lists(st.floats(0, duration), max_size=3)))
    events = tuple(HighLevelEvent(f"event {i}", o) for i, o in enumerate(offsets))
    activity = draw(st.sampled_from(roster.activity_set))
    texts = [draw(st.sampled_from(TEXT_ATOMS)) for _ in roster.model_ids]
    order = draw(st.permutations(list(roster.model_ids)))
    cands = tuple(ExplanationCandidate(m, texts[roster.model_ids.index(m)]) for m in order)
    return WindowCase(EventWindow(window_id, duration, activity, events), cands)


@st.composite
def pools(draw, max_models=3, max_windows=5):
    roster = draw(rosters(max_models=max_models))
    n = draw(st.integers(1, max_windows))
    cases = tuple(draw(cases_for(roster, f"w{i:02d}")) for i in range(n))
    return EvaluationPool(roster, cases)


@st.composite
def single_cases(draw, max_models=5):
    roster = draw(rosters(max_models=max_models))
    return roster, draw(cases_for(roster, "w00"))


def canon(text: str) -> str:
    # independent of xarjudge.prompts.canonicalize on purpose
    return re.sub(r"\s+", " ", text).strip()


class RecordingJudge:
    """Wraps a judge and keeps every (bundle, raw completion) pair by window."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = []
        self._lock = threading.Lock()

    def complete(self, bundle):
        resp = self.inner.complete(bundle)
        with self._lock:
            self.calls.append((bundle, resp.raw_text))
        return resp


def recorded_text_verdicts(calls):
    """Translate recorded completions into verdicts keyed by explanation text.

    Uses its own reading of the last line so the oracle never touches the
    production parser or the option labels' contributor lists.
    """
    out = {}
    for bundle, raw in calls:
        label_text = {o.label: o.text for o in bundle.options}
        last = raw.strip().splitlines()[-1]
        if last.startswith("FINAL:"):
            out[bundle.window_id] = ("best", label_text[last.split(":", 1)[1].strip()])
        else:
            pairs = [p.strip().split("=") for p in last.split(":", 1)[1].split(";")]
            out[bundle.window_id] = ("likert", {label_text[a.strip()]: int(b) for a, b in pairs})
    return out


def naive_pool_loop(pool: EvaluationPool, text_verdicts: dict):
    """Direct transcription of the pool loop: no dedup step, no parallelism."""
    H = list(pool.roster.model_ids)
    scores = {h: 0 for h in H}
    kind = None
    for case in pool.cases:
        w = case.window
        predictions = {h: [] for h in H}
        explanations = {h: [] for h in H}
        for h in H:
            predictions[h].append(w.predicted_activity)
            explanations[h].append([c.text for c in case.candidates if c.model_id == h][0])
        kind, answer = text_verdicts[w.window_id]
        if kind == "best":
            S = {h: 1 if canon(explanations[h][0]) == answer else 0 for h in H}
        else:
            S = {h: answer[canon(explanations[h][0])] for h in H}
        for h in H:
            scores[h] += S[h]
    P = len(pool.cases)
    if kind == "best":
        normalized = {h: float(Fraction(scores[h], P)) for h in H}
    else:
        normalized = {h: float((Fraction(scores[h], P) - 1) / 4) for h in H}
    best = max(scores.values())
    argmax = [h for h in H if scores[h] == best]
    return scores, normalized, argmax


def pair_count_tau(a, b):
    """Kendall tau by explicit enumeration of ordered index pairs."""
    n = len(a)
    conc = disc = 0
    for i in range(n):
        for j in range(n):
            if i < j:
                x, y = a[i], a[j]
                if b.index(x) < b.index(y):
                    conc += 1
                else:
                    disc += 1
    return (conc - disc) / (n * (n - 1) / 2)


# --- stub chat-completions server -------------------------------------------------


class StubChatServer:
    """Local HTTP server answering POST /v1/chat/completions from a script.

    ``script`` is a list of (status, content) consumed in order; the last entry
    repeats. Tracks requests, bodies, and the peak number of in-flight requests.
    """

    def __init__(self, script, delay: float = 0.0):
        self.script = list(script)
        self.delay = delay
        self.requests = []
        self.in_flight = 0
        self.max_in_flight = 0
        self._lock = threading.Lock()
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                with stub._lock:
                    stub.in_flight += 1
                    stub.max_in_flight = max(stub.max_in_flight, stub.in_flight)
                    stub.requests.append({"path": self.path, "body": body,
                                          "auth": self.headers.get("Authorization")})
                    idx = len(stub.requests) - 1
                    status, content = stub.script[min(idx, len(stub.script) - 1)]
                try:
                    if stub.delay:
                        time.sleep(stub.delay)
                    if callable(content):
                        content = content(body)
                    if status == 200:
                        payload = json.dumps({"choices": [{"message": {"role": "assistant",
                                                                       "content": content}}]})
                    else:
                        payload = json.dumps({"error": {"message": str(content)}})
                    data = payload.encode()
                    self.send_response(status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                finally:
                    with stub._lock:
                        stub.in_flight -= 1

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.server.daemon_threads = True
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}/v1"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()


# --- plain seeded generators (exact case counts for the acceptance suite) ----------


def random_roster(rng, max_models=3, max_activities=2) -> ModelRoster:
    ids = MODEL_NAMES[:rng.randint(1, max_models)]
    rng.shuffle(ids)
    acts = rng.sample(["cooking", "sleeping", "eating"], rng.randint(1, max_activities))
    return ModelRoster(tuple(ids), tuple(acts))


def random_case(rng, roster: ModelRoster, window_id: str) -> WindowCase:
    duration = rng.choice([30.0, 60.0, 90.0])
    offsets = sorted(rng.uniform(0, duration) for _ in range(rng.randint(0, 3)))
    events = tuple(HighLevelEvent(f"event {i}", o) for i, o in enumerate(offsets))
    order = list(roster.model_ids)
    rng.shuffle(order)
    cands = tuple(ExplanationCandidate(m, rng.choice(TEXT_ATOMS)) for m in order)
    return WindowCase(EventWindow(window_id, duration, rng.choice(roster.activity_set), events), cands)


def random_pool(rng, max_models=3, max_windows=5) -> EvaluationPool:
    roster = random_roster(rng, max_models)
    n = rng.randint(1, max_windows)
    return EvaluationPool(roster, tuple(random_case(rng, roster, f"w{i:02d}") for i in range(n)))
