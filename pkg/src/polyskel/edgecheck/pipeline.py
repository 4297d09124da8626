"""Full skeleton computation: ledger, rhombus scan, then per-pair resolution."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..core import (EDGE, NON_EDGE, SOURCE_EXACT, SOURCE_NUMERIC, UNKNOWN, PairLedger,
                    VertexSet, make_ledger)
from ..errors import DomainError
from ..faces import face_cost, restrict_face
from ..rhombus import rhombus_scan
from .lp import EdgeVerdict, NonEdgeCertificate, Status, exact_edge_test, separates
from .numeric import DEFAULT_MAX_ITER, numeric_search

log = logging.getLogger(__name__)

METHODS = ("pipeline", "exact", "numeric")


@dataclass
class SkeletonConfig:
    method: str = "pipeline"
    threads: int = 1
    seed: int = 0
    max_iter: int = DEFAULT_MAX_ITER
    use_faces: bool = True
    keep_certificates: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}; pick one of {METHODS}")
        if self.threads < 1:
            raise DomainError("threads must be at least 1")


@dataclass
class PairResult:
    status: int
    source: int
    iterations: int = 0
    certificate: object = None


def pair_seed(seed: int, a: int, b: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(a), int(b)])


def lift_certificate(vs: VertexSet, a: int, b: int, cost, face) -> tuple:
    """Turn a cost vector that works on the face into one that works on vs."""
    alpha = vs.array[a].astype(object)
    fc = face_cost(vs.array[a], vs.array[b]).astype(object)
    inside = np.zeros(len(vs), dtype=bool)
    inside[np.asarray(face, dtype=np.int64)] = True
    outside = np.flatnonzero(~inside)
    cur = np.array([int(x) for x in cost], dtype=object)
    if len(outside):
        gaps = (vs.array[outside].astype(object) - alpha) @ cur
        worst = max(int(x) for x in gaps)
        cur = cur + (max(worst, 0) + 1) * fc
    return tuple(int(x) for x in cur)


def resolve_pair(vs: VertexSet, a: int, b: int, config: SkeletonConfig,
                 binary: bool | None = None) -> PairResult:
    """Decide one pair according to ``config.method``.

    Pure function of its inputs: the numeric stage draws from a seed derived
    from (config.seed, a, b), so results do not depend on scheduling.
    """
    if binary is None:
        binary = vs.is_binary()
    if binary and config.use_faces:
        face = restrict_face(vs, a, b)
    else:
        face = np.arange(len(vs))
    its = 0
    if config.method in ("pipeline", "numeric"):
        res = numeric_search(vs, a, b, config.max_iter, pair_seed(config.seed, a, b),
                             members=face)
        its = res.iterations
        if res.verified:
            cert = None
            if config.keep_certificates:
                cert = lift_certificate(vs, a, b, res.certificate, face) if len(face) < len(vs) \
                    else res.certificate
            return PairResult(EDGE, SOURCE_NUMERIC, its, cert)
        if config.method == "numeric":
            return PairResult(UNKNOWN, SOURCE_NUMERIC, its)
    if len(face) < len(vs):
        sub = vs.subset(face)
        ia = int(np.searchsorted(face, a))
        ib = int(np.searchsorted(face, b))
        verdict = exact_edge_test(sub, ia, ib)
        cert = None
        if config.keep_certificates:
            if verdict.is_edge:
                cert = lift_certificate(vs, a, b, verdict.certificate, face)
            else:
                w = {int(face[i]): x for i, x in verdict.certificate.weights.items()}
                cert = NonEdgeCertificate(w, verdict.certificate.t)
    else:
        verdict = exact_edge_test(vs, a, b)
        cert = verdict.certificate if config.keep_certificates else None
    status = EDGE if verdict.is_edge else NON_EDGE
    return PairResult(status, SOURCE_EXACT, its, cert)


def verify_pair(vs: VertexSet, a: int, b: int, method: str = "pipeline", seed: int = 0,
                max_iter: int = DEFAULT_MAX_ITER) -> EdgeVerdict:
    """Single-pair verdict with a certificate expressed on the full vertex set."""
    a, b = int(a), int(b)
    if a == b:
        raise DomainError("a pair needs two distinct vertices")
    cfg = SkeletonConfig(method=method, seed=seed, max_iter=max_iter, keep_certificates=True)
    res = resolve_pair(vs, a, b, cfg)
    if res.status == EDGE:
        return EdgeVerdict(Status.EDGE, res.certificate)
    if res.status == NON_EDGE:
        return EdgeVerdict(Status.NON_EDGE, res.certificate)
    return EdgeVerdict(Status.INDETERMINATE, None)


@dataclass
class SkeletonTiming:
    ledger: float = 0.0
    rhombus: float = 0.0
    verify: float = 0.0
    unknown_after_scan: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return self.ledger + self.rhombus + self.verify


def compute_skeleton(vs: VertexSet, config: SkeletonConfig | None = None,
                     timing: SkeletonTiming | None = None, **kwargs) -> PairLedger:
    """Resolve every pair of ``vs`` to edge or non-edge.

    Keyword arguments are forwarded to :class:`SkeletonConfig`.  With
    ``method="numeric"`` pairs the search fails to verify stay unknown.
    """
    config = config or SkeletonConfig(**kwargs)
    if len(vs) < 2:
        raise DomainError("a skeleton needs at least two vertices")
    timing = timing if timing is not None else SkeletonTiming()
    t0 = time.perf_counter()
    led = make_ledger(vs, with_keys=True)
    t1 = time.perf_counter()
    rhombus_scan(led, vs)
    led.sum_keys = None
    t2 = time.perf_counter()
    todo = np.flatnonzero(led.status == UNKNOWN)
    timing.unknown_after_scan = len(todo)
    binary = vs.is_binary()
    pairs = list(zip(led.a[todo].tolist(), led.b[todo].tolist()))

    def work(pair):
        return resolve_pair(vs, pair[0], pair[1], config, binary)

    if config.threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(work, pairs, chunksize=1))
    else:
        results = [work(p) for p in pairs]
    certs = {}
    for k, res in zip(todo, results):
        led.status[k] = res.status
        led.source[k] = res.source
        led.iterations[k] = res.iterations
        if res.certificate is not None:
            certs[(int(led.a[k]), int(led.b[k]))] = res.certificate
    if config.keep_certificates:
        led.certificates = certs
    t3 = time.perf_counter()
    timing.ledger, timing.rhombus, timing.verify = t1 - t0, t2 - t1, t3 - t2
    log.info("skeleton: %d pairs, %d unknown after scan, %s", len(led), len(todo), led.counts())
    return led


def exact_skeleton(vs: VertexSet) -> list[tuple[int, int]]:
    """Edges by running the exact test on every pair, with no shortcuts."""
    out = []
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            if exact_edge_test(vs, a, b).is_edge:
                out.append((a, b))
    return out
