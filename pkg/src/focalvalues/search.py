"""Randomized search for systems with a vanishing focal-value prefix.

Trials are indexed by a global counter; every trial is a pure function
of (seed, stream, counter), so the hit set is independent of worker
count and a run can be resumed exactly.  Workers process chunks of the
counter range; results are collected in counter order, which keeps hit
logs byte-identical across worker counts and across interrupt/resume.

Two strategies:
  rejection     all 14 coefficients uniform; survive if s_1..s_t vanish
  parametrized  12 coefficients uniform, the two designated cubic
                coordinates solved so that s_1 = s_2 = 0 exactly,
                cutting two powers of p off the expected search cost

The hot loop runs in the numba kernel when available; the pure-Python
reference kernel is the fallback and the semantics authority.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from . import _kernel_ref as _ref
from .engine import COEFFICIENT_WEIGHTS, PolySystem, focal_values
from .prng import residue, trial_base
from .rings import PrimeField

try:
    import numpy as _np

    from . import _kernel_nb as _nb
except ImportError:  # pragma: no cover - numba/numpy not installed
    _np = None
    _nb = None

log = logging.getLogger(__name__)

__all__ = [
    "SearchConfig",
    "SearchStats",
    "SearchCheckpoint",
    "HitRecord",
    "CheckpointError",
    "IndeterminateCoordinate",
    "search_run",
    "sample_raw",
    "sample_parametrized",
    "solve_in_coordinate",
    "regenerate_trial",
    "verify_hit",
]

HIT_FORMAT = "focal-hits/1"
CHECKPOINT_FORMAT = "focal-checkpoint/1"
CONFIG_DIGEST_FORMAT = "focal-search/1"

CUBIC_COORDS = frozenset(i for i, w in enumerate(COEFFICIENT_WEIGHTS) if w == 2)

_STRATEGIES = {"rejection": _ref.STRATEGY_REJECTION,
               "parametrized": _ref.STRATEGY_PARAMETRIZED}


class CheckpointError(RuntimeError):
    """Checkpoint missing, corrupted, or from a different configuration."""


class IndeterminateCoordinate(ValueError):
    """s_j does not depend on the designated coordinate for this system."""


@dataclass(frozen=True)
class SearchConfig:
    p: int = 29
    target_depth: int = 1
    strategy: str = "rejection"
    coords: tuple[int, int] = (3, 13)  # q30, p03
    seed: int = 0
    stream: int = 0
    budget: int = 100_000
    convention: str = "N1"
    eval_cap: Optional[int] = None
    workers: int = 1
    chunk_size: int = 16384
    hit_log_path: Optional[str] = None
    checkpoint_path: Optional[str] = None
    checkpoint_interval_s: float = 5.0
    force_reference: bool = False

    def resolved_cap(self) -> int:
        if self.eval_cap is not None:
            return self.eval_cap
        return min((self.p - 5) // 2, max(self.target_depth + 4, 12))

    def validate(self):
        PrimeField(self.p)  # primality and range
        if self.p >= 1 << 20:
            raise ValueError("search kernels require p < 2^20; use the engine directly")
        if self.target_depth < 1:
            raise ValueError("target depth must be >= 1")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.strategy not in _STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.convention not in ("N1", "N2"):
            raise ValueError(f"unknown convention {self.convention!r}")
        if not (0 <= self.seed < 1 << 63 and 0 <= self.stream < 1 << 63):
            raise ValueError("seed and stream must fit in 63 bits")
        cap = self.resolved_cap()
        floor = max(self.target_depth, 2 if self.strategy == "parametrized" else 1)
        if cap < floor:
            raise ValueError(
                f"evaluation cap {cap} below required depth {floor}: evaluating "
                f"N focal values needs p >= 2N+5, so p = {self.p} supports depth "
                f"<= {(self.p - 5) // 2} and depth {floor} needs p >= {2 * floor + 5}"
            )
        if self.p < 2 * cap + 5:
            raise ValueError(
                f"p = {self.p} too small for depth cap {cap}: need p >= 2N+5 = {2 * cap + 5}"
            )
        if self.strategy == "parametrized":
            a, b = self.coords
            if a == b or not {a, b} <= CUBIC_COORDS:
                raise ValueError(
                    "designated solve coordinates must be two distinct cubic "
                    f"coefficient indices (choices: {sorted(CUBIC_COORDS)})"
                )
        if self.workers < 1 or self.chunk_size < 1:
            raise ValueError("workers and chunk size must be positive")

    def digest(self) -> str:
        """Digest of the semantic fields: two configs with equal digest
        draw identical trial sequences."""
        payload = json.dumps(
            [CONFIG_DIGEST_FORMAT, self.p, self.target_depth, self.strategy,
             list(self.coords), self.seed, self.stream, self.convention,
             self.resolved_cap()],
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class SearchStats:
    trials: int = 0
    accepted: int = 0
    hits: int = 0
    depth_hist: list[int] = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def rejected(self) -> int:
        return self.trials - self.accepted

    def survivors(self) -> list[int]:
        """survivors[d] = accepted trials with depth >= d (non-increasing)."""
        out, total = [], 0
        for n in reversed(self.depth_hist):
            total += n
            out.append(total)
        return out[::-1]

    @property
    def trials_per_s(self) -> float:
        return self.trials / self.elapsed_s if self.elapsed_s > 0 else 0.0


@dataclass(frozen=True)
class HitRecord:
    p: int
    coeffs: tuple[int, ...]
    depth: int
    next_value: int
    seed: int
    stream: int
    counter: int
    strategy: str
    convention: str

    def to_line(self) -> str:
        return json.dumps(
            {"format": HIT_FORMAT, "p": self.p, "coeffs": list(self.coeffs),
             "depth": self.depth, "next_value": self.next_value,
             "seed": self.seed, "stream": self.stream, "counter": self.counter,
             "strategy": self.strategy, "convention": self.convention},
            separators=(",", ":"),
        )

    @classmethod
    def from_line(cls, line: str) -> "HitRecord":
        obj = json.loads(line)
        if obj.get("format") != HIT_FORMAT:
            raise ValueError(f"unsupported hit record format {obj.get('format')!r}")
        return cls(
            p=obj["p"], coeffs=tuple(obj["coeffs"]), depth=obj["depth"],
            next_value=obj["next_value"], seed=obj["seed"], stream=obj["stream"],
            counter=obj["counter"], strategy=obj["strategy"],
            convention=obj["convention"],
        )


@dataclass
class SearchCheckpoint:
    config_digest: str
    trials_done: int
    accepted: int
    hits: int
    depth_hist: list[int]
    elapsed_s: float

    def save(self, path: str):
        body = {
            "format": CHECKPOINT_FORMAT,
            "config_digest": self.config_digest,
            "trials_done": self.trials_done,
            "accepted": self.accepted,
            "hits": self.hits,
            "depth_hist": self.depth_hist,
            "elapsed_s": round(self.elapsed_s, 3),
        }
        body["checksum"] = _payload_checksum(body)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(body, fh, indent=1)
            fh.write("\n")
        os.replace(tmp, path)  # atomic on POSIX

    @classmethod
    def load(cls, path: str) -> "SearchCheckpoint":
        try:
            with open(path) as fh:
                body = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
        if body.get("format") != CHECKPOINT_FORMAT:
            raise CheckpointError(f"unsupported checkpoint format {body.get('format')!r}")
        stored = body.pop("checksum", None)
        if stored != _payload_checksum(body):
            raise CheckpointError(f"checkpoint {path} failed its integrity check")
        return cls(
            config_digest=body["config_digest"], trials_done=body["trials_done"],
            accepted=body["accepted"], hits=body["hits"],
            depth_hist=list(body["depth_hist"]), elapsed_s=body["elapsed_s"],
        )


def _payload_checksum(body: dict) -> str:
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# ---------------------------------------------------------------------------
# parametrization constants

@lru_cache(maxsize=32)
def _parametrized_constants(p: int, coord1: int, coord2: int, convention: str):
    """(b1inv, beta, c2q): the draw-independent pieces of the two-step
    solve.  s_1 = A + b1*x1 + c1*x2 on cubic coordinates (b1, c1 integer
    constants), so s_1 = 0 is the line x1 = alpha + beta*t, x2 = t; the
    leading coefficient of s_2 on that line is likewise constant."""
    F = PrimeField(p)

    def s_j(coeffs, j):
        seq, _ = focal_values(PolySystem.cubic(F, coeffs), j, convention)
        return seq.values[j - 1]

    unit1 = [0] * 14
    unit1[coord1] = 1
    unit2 = [0] * 14
    unit2[coord2] = 1
    b1 = s_j(unit1, 1)
    c1 = s_j(unit2, 1)
    if b1 == 0:
        raise ValueError(
            f"s_1 does not involve coordinate {coord1} mod {p}; "
            "pick a different first solve coordinate"
        )
    b1inv = F.invert(b1)
    beta = (p - c1) * b1inv % p

    def v(t):
        coeffs = [0] * 14
        coeffs[coord1] = beta * t % p
        coeffs[coord2] = t % p
        return s_j(coeffs, 2)

    c2q = (v(2) - 2 * v(1)) * F.invert(2) % p
    return b1inv, beta, c2q


def _sqrt_table(p: int) -> list[int]:
    """tab[a] = smaller square root of a, or -1 for non-residues."""
    tab = [-1] * p
    for r in range((p + 1) // 2, -1, -1):
        tab[r * r % p] = r
    return tab


def _build_setup(config: SearchConfig):
    F = PrimeField(config.p)
    inv = [0] + F.invert_range(config.p - 1)[1:]
    sqrt_tab = _sqrt_table(config.p)
    if config.strategy == "parametrized":
        b1inv, beta, c2q = _parametrized_constants(
            config.p, config.coords[0], config.coords[1], config.convention
        )
    else:
        b1inv = beta = c2q = 0
    return (config.p, config.resolved_cap(), _STRATEGIES[config.strategy],
            config.convention == "N2", config.coords[0], config.coords[1],
            b1inv, beta, c2q, inv, sqrt_tab)


# ---------------------------------------------------------------------------
# public sampling / solving operations

def sample_raw(seed: int, stream: int, counter: int, p: int) -> PolySystem:
    """Uniform system: 14 independent residues from the trial's stream."""
    base = trial_base(seed, stream, counter)
    F = PrimeField(p)
    return PolySystem.cubic(F, [residue(base, i, p) for i in range(14)])


def sample_parametrized(
    seed: int, stream: int, counter: int, config: SearchConfig
) -> Optional[PolySystem]:
    """One parametrized draw: s_1 = s_2 = 0 exactly, or None when the
    quadratic has no root mod p (a normal rejection)."""
    setup = _build_setup(config)
    status, _, _, coeffs = _ref.run_trial(seed, stream, counter, setup)
    if status != _ref.ACCEPTED:
        return None
    return PolySystem.cubic(PrimeField(config.p), coeffs)


def regenerate_trial(seed: int, stream: int, counter: int, config: SearchConfig):
    """Replay one trial; returns (accepted, depth, next_value, coeffs)."""
    status, depth, nxt, coeffs = _ref.run_trial(seed, stream, counter, _build_setup(config))
    return status == _ref.ACCEPTED, depth, nxt, coeffs


def verify_hit(record: HitRecord, config: Optional[SearchConfig] = None) -> bool:
    """Recompute a hit record from scratch, both from its coefficients
    and from its PRNG provenance.

    The record does not carry the designated solve coordinates or the
    evaluation cap, so provenance replay assumes the defaults unless
    the originating config is passed in.
    """
    if config is None:
        config = SearchConfig(
            p=record.p, target_depth=max(record.depth, 1), strategy=record.strategy,
            convention=record.convention, budget=1,
        )
    ok, depth, nxt, coeffs = regenerate_trial(
        record.seed, record.stream, record.counter, config
    )
    if not ok or tuple(coeffs) != record.coeffs:
        return False
    if depth != record.depth or nxt != record.next_value:
        return False
    # independent recheck through the generic engine
    F = PrimeField(record.p)
    seq, _ = focal_values(
        PolySystem.cubic(F, record.coeffs),
        min(record.depth + 1, config.resolved_cap()),
        record.convention,
    )
    prefix = seq.values[: record.depth]
    if any(v != 0 for v in prefix):
        return False
    if record.depth < config.resolved_cap():
        return seq.values[record.depth] == record.next_value
    return record.next_value == 0


def solve_in_coordinate(sys: PolySystem, coord: int, j: int) -> list[int]:
    """Roots of s_j as a univariate polynomial in the coord coefficient.

    The polynomial is recovered exactly by evaluating at deg+1 points
    (weighted degree 2j caps the degree at 2j/weight).  Raises
    IndeterminateCoordinate when s_j is identically zero along the
    coordinate, meaning any value works.
    """
    F = sys.ring
    if not isinstance(F, PrimeField):
        raise TypeError("solve_in_coordinate operates over a prime field")
    p = F.p
    weight = COEFFICIENT_WEIGHTS[coord]
    deg = (2 * j) // weight
    if p <= max(deg, 2 * j):
        raise ValueError(f"p = {p} too small to interpolate degree {deg}")
    base = list(sys.coefficient_vector())
    ys = []
    for t in range(deg + 1):
        coeffs = list(base)
        coeffs[coord] = t
        seq, _ = focal_values(PolySystem.cubic(F, coeffs), j)
        ys.append(seq.values[j - 1])
    poly = _interpolate(F, list(range(deg + 1)), ys)
    while poly and poly[-1] == 0:
        poly.pop()
    if not poly:
        raise IndeterminateCoordinate(
            f"s_{j} is identically zero in coordinate {coord} for this system"
        )
    return _poly_roots(F, poly)


def _interpolate(F: PrimeField, xs: list[int], ys: list[int]) -> list[int]:
    """Lagrange interpolation; coefficients ascending."""
    p = F.p
    n = len(xs)
    out = [0] * n
    for i in range(n):
        # numerator prod_{m != i} (x - x_m), denominator prod (x_i - x_m)
        num = [1]
        denom = 1
        for m in range(n):
            if m == i:
                continue
            num = _poly_mul_linear(num, (-xs[m]) % p, p)
            denom = denom * (xs[i] - xs[m]) % p
        scale = ys[i] * F.invert(denom) % p
        for k, c in enumerate(num):
            out[k] = (out[k] + scale * c) % p
    return out


def _poly_mul_linear(poly: list[int], c0: int, p: int) -> list[int]:
    """poly * (x + c0) mod p."""
    out = [0] * (len(poly) + 1)
    for i, a in enumerate(poly):
        out[i] = (out[i] + a * c0) % p
        out[i + 1] = (out[i + 1] + a) % p
    return out


def _poly_roots(F: PrimeField, poly: list[int]) -> list[int]:
    """Roots in F_p of a nonzero polynomial, ascending residue order."""
    p = F.p
    deg = len(poly) - 1
    if deg == 0:
        return []
    if deg == 1:
        b, a = poly
        return [(-b) * F.invert(a) % p]
    if deg == 2:
        c0, c1, c2 = poly
        disc = (c1 * c1 - 4 * c2 * c0) % p
        roots = F.sqrt(disc)
        inv2a = F.invert(2 * c2 % p)
        return sorted({(-c1 + r) * inv2a % p for r in roots})
    if p > 1 << 16:
        raise ValueError(f"refusing brute-force root scan for degree {deg} at p = {p}")
    return [x for x in range(p)
            if sum(c * pow(x, k, p) for k, c in enumerate(poly)) % p == 0]


# ---------------------------------------------------------------------------
# the orchestrator

def _eval_chunk_reference(setup, seed, stream, start, n, target):
    cap = setup[1]
    hist = [0] * (cap + 1)
    hits = []
    done = 0
    accepted = 0
    while done < n:
        pr, ac, h, hs = _ref.run_chunk(
            seed, stream, start + done, n - done, setup, target, max_hits=4096
        )
        done += pr
        accepted += ac
        hist = [a + b for a, b in zip(hist, h)]
        hits.extend(hs)
    return n, accepted, hist, hits


def _make_numba_evaluator(setup):
    """Bind the lookup tables as int64 arrays once; chunks share them
    read-only across worker threads."""
    (p, cap, strategy, conv_n2, coord1, coord2, b1inv, beta, c2q,
     inv, sqrt_tab) = setup
    inv_a = _np.asarray(inv, dtype=_np.int64)
    sqrt_a = _np.asarray(sqrt_tab, dtype=_np.int64)
    conv_flag = 1 if conv_n2 else 0

    def evaluate(seed, stream, start, n, target):
        hist = _np.zeros(cap + 1, dtype=_np.int64)
        buf = _np.zeros((4096, 17), dtype=_np.int64)
        hits = []
        done = 0
        accepted = 0
        while done < n:
            pr, ac, nh = _nb.run_chunk(
                _np.uint64(seed), _np.uint64(stream), start + done, n - done,
                p, cap, target, strategy, conv_flag,
                coord1, coord2, b1inv, beta, c2q, inv_a, sqrt_a, hist, buf,
            )
            done += pr
            accepted += ac
            for row in buf[:nh]:
                hits.append((int(row[0]), int(row[1]), int(row[2]),
                             tuple(int(x) for x in row[3:17])))
        return n, accepted, hist.tolist(), hits

    return evaluate


def _truncate_hit_log(path: str, keep: int):
    """Drop any records beyond the checkpointed count (crash repair)."""
    if not os.path.exists(path):
        if keep:
            raise CheckpointError(f"checkpoint expects {keep} hits but {path} is missing")
        return
    with open(path, "r+") as fh:
        offset = 0
        for _ in range(keep):
            line = fh.readline()
            if not line:
                raise CheckpointError(
                    f"hit log {path} has fewer records than the checkpoint claims"
                )
            offset = fh.tell()
        fh.seek(offset)
        fh.truncate()


def search_run(
    config: SearchConfig,
    resume: bool = False,
    progress: Optional[Callable[[SearchStats], None]] = None,
    collect_hits: bool = True,
) -> tuple[SearchStats, list[HitRecord]]:
    """Run the configured search to its trial budget.

    Returns final stats and the hit records (also appended to the hit
    log when one is configured).  With resume=True the run continues
    from the checkpoint, reproducing exactly the uninterrupted
    sequence.
    """
    config.validate()
    setup = _build_setup(config)
    cap = config.resolved_cap()
    digest = config.digest()

    stats = SearchStats(depth_hist=[0] * (cap + 1))
    start_at = 0
    if resume:
        if not config.checkpoint_path:
            raise CheckpointError("resume requested without a checkpoint path")
        ck = SearchCheckpoint.load(config.checkpoint_path)
        if ck.config_digest != digest:
            raise CheckpointError(
                "checkpoint was produced by a different search configuration"
            )
        start_at = ck.trials_done
        stats = SearchStats(
            trials=ck.trials_done, accepted=ck.accepted, hits=ck.hits,
            depth_hist=list(ck.depth_hist), elapsed_s=ck.elapsed_s,
        )
        if config.hit_log_path:
            _truncate_hit_log(config.hit_log_path, ck.hits)
    elif config.hit_log_path and os.path.exists(config.hit_log_path):
        os.remove(config.hit_log_path)

    use_numba = _nb is not None and not config.force_reference
    if not use_numba and not config.force_reference:
        log.warning("numba unavailable: search falls back to the slow reference kernel")
    if use_numba:
        evaluator = _make_numba_evaluator(setup)
    else:
        def evaluator(seed, stream, start, n, target):
            return _eval_chunk_reference(setup, seed, stream, start, n, target)

    hit_records: list[HitRecord] = []
    log_fh = open(config.hit_log_path, "a") if config.hit_log_path else None
    t0 = time.perf_counter()
    base_elapsed = stats.elapsed_s
    last_ck = t0

    def current_elapsed():
        return base_elapsed + (time.perf_counter() - t0)

    def write_checkpoint():
        if config.checkpoint_path:
            SearchCheckpoint(
                config_digest=digest, trials_done=stats.trials,
                accepted=stats.accepted, hits=stats.hits,
                depth_hist=list(stats.depth_hist), elapsed_s=current_elapsed(),
            ).save(config.checkpoint_path)

    chunks = [
        (s, min(config.chunk_size, config.budget - s))
        for s in range(start_at, config.budget, config.chunk_size)
    ]
    def job(args):
        start, n = args
        return evaluator(config.seed, config.stream, start, n,
                         config.target_depth)

    def consume(results):
        nonlocal last_ck
        for n, accepted, hist, hits in results:
            stats.trials += n
            stats.accepted += accepted
            for d, cnt in enumerate(hist):
                stats.depth_hist[d] += cnt
            for counter, depth, nxt, coeffs in hits:
                rec = HitRecord(
                    p=config.p, coeffs=coeffs, depth=depth, next_value=nxt,
                    seed=config.seed, stream=config.stream, counter=counter,
                    strategy=config.strategy, convention=config.convention,
                )
                stats.hits += 1
                if collect_hits:
                    hit_records.append(rec)
                if log_fh:
                    log_fh.write(rec.to_line() + "\n")
            if log_fh and hits:
                log_fh.flush()
            now = time.perf_counter()
            if now - last_ck >= config.checkpoint_interval_s:
                stats.elapsed_s = current_elapsed()
                write_checkpoint()
                last_ck = now
            if progress is not None:
                stats.elapsed_s = current_elapsed()
                progress(stats)

    try:
        if config.workers == 1:
            consume(map(job, chunks))
        else:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                consume(pool.map(job, chunks))
    finally:
        if log_fh:
            log_fh.close()
    stats.elapsed_s = current_elapsed()
    write_checkpoint()
    return stats, hit_records
