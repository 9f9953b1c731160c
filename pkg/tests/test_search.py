"""Search orchestration: determinism, checkpoints, hit logs, stats."""

import json
import os

import pytest

from focalvalues.engine import PolySystem, first_nonzero
from focalvalues.rings import PrimeField
from focalvalues.search import (
    CheckpointError,
    HitRecord,
    SearchCheckpoint,
    SearchConfig,
    search_run,
    verify_hit,
)


def cfg_with(tmp_path, name="", **kw):
    base = dict(p=29, target_depth=1, strategy="rejection", seed=1,
                budget=20_000, chunk_size=2048, checkpoint_interval_s=0.0)
    base.update(kw)
    if name:
        base.setdefault("hit_log_path", str(tmp_path / f"{name}.jsonl"))
    return SearchConfig(**base)


def test_zero_budget(tmp_path):
    stats, hits = search_run(cfg_with(tmp_path, budget=0))
    assert stats.trials == 0 and stats.accepted == 0 and stats.hits == 0
    assert not hits


def test_budget_accounted_exactly(tmp_path):
    stats, _ = search_run(cfg_with(tmp_path, budget=12_345))
    assert stats.trials == 12_345
    assert stats.accepted == 12_345  # rejection strategy accepts everything


def test_survivors_monotone(tmp_path):
    stats, _ = search_run(cfg_with(tmp_path, budget=30_000))
    surv = stats.survivors()
    assert all(a >= b for a, b in zip(surv, surv[1:]))
    assert surv[0] == stats.accepted


def test_parametrized_never_below_depth_two(tmp_path):
    stats, _ = search_run(cfg_with(tmp_path, strategy="parametrized",
                                   target_depth=2, budget=20_000))
    assert stats.depth_hist[0] == 0 and stats.depth_hist[1] == 0
    assert stats.accepted < stats.trials  # some quadratics had no root
    assert stats.hits == stats.accepted  # every accepted trial has depth >= 2


def test_worker_count_independence(tmp_path):
    logs = []
    for w in (1, 4, 8):
        cfg = cfg_with(tmp_path, f"w{w}", workers=w, budget=30_000)
        search_run(cfg)
        logs.append(open(cfg.hit_log_path, "rb").read())
    assert logs[0] == logs[1] == logs[2]
    assert logs[0]  # nonempty


def test_reference_kernel_equivalence(tmp_path):
    a = cfg_with(tmp_path, "nb", budget=4_096)
    b = cfg_with(tmp_path, "ref", budget=4_096, force_reference=True)
    sa, _ = search_run(a)
    sb, _ = search_run(b)
    assert open(a.hit_log_path, "rb").read() == open(b.hit_log_path, "rb").read()
    assert sa.depth_hist == sb.depth_hist


def test_interrupt_resume_byte_identical(tmp_path):
    ck = str(tmp_path / "ck.json")
    kw = dict(strategy="parametrized", target_depth=3, seed=9)
    full = cfg_with(tmp_path, "full", budget=24_000, **kw)
    search_run(full)

    part = cfg_with(tmp_path, "part", budget=10_000, checkpoint_path=ck, **kw)
    search_run(part)
    cont = cfg_with(tmp_path, "part", budget=24_000, checkpoint_path=ck, **kw)
    s2, _ = search_run(cont, resume=True)
    assert open(full.hit_log_path, "rb").read() == open(part.hit_log_path, "rb").read()
    s3, _ = search_run(full)
    assert (s2.trials, s2.accepted, s2.hits, s2.depth_hist) == (
        s3.trials, s3.accepted, s3.hits, s3.depth_hist)


def test_resume_repairs_orphan_log_tail(tmp_path):
    ck = str(tmp_path / "ck.json")
    part = cfg_with(tmp_path, "r", budget=8_192, checkpoint_path=ck)
    search_run(part)
    # simulate a crash that flushed extra hits after the last checkpoint
    with open(part.hit_log_path, "a") as fh:
        fh.write('{"format":"focal-hits/1","orphan":true}\n')
    cont = cfg_with(tmp_path, "r", budget=16_384, checkpoint_path=ck)
    search_run(cont, resume=True)
    ref = cfg_with(tmp_path, "ref", budget=16_384)
    search_run(ref)
    assert open(part.hit_log_path, "rb").read() == open(ref.hit_log_path, "rb").read()


def test_checkpoint_tamper_detected(tmp_path):
    ck = str(tmp_path / "ck.json")
    cfg = cfg_with(tmp_path, "t", budget=4_096, checkpoint_path=ck)
    search_run(cfg)
    body = json.load(open(ck))
    body["trials_done"] += 64
    json.dump(body, open(ck, "w"))
    with pytest.raises(CheckpointError, match="integrity"):
        search_run(cfg_with(tmp_path, "t", budget=8_192, checkpoint_path=ck),
                   resume=True)


def test_checkpoint_digest_mismatch(tmp_path):
    ck = str(tmp_path / "ck.json")
    search_run(cfg_with(tmp_path, "d", budget=4_096, checkpoint_path=ck))
    other = cfg_with(tmp_path, "d", budget=8_192, checkpoint_path=ck, seed=2)
    with pytest.raises(CheckpointError, match="different search configuration"):
        search_run(other, resume=True)


def test_checkpoint_round_trip(tmp_path):
    path = str(tmp_path / "c.json")
    ck = SearchCheckpoint("abc", 10, 8, 2, [5, 2, 1], 1.25)
    ck.save(path)
    assert SearchCheckpoint.load(path) == ck
    assert not os.path.exists(path + ".tmp")


def test_hit_record_round_trip_and_verify(tmp_path):
    cfg = cfg_with(tmp_path, strategy="parametrized", target_depth=4,
                   budget=60_000, seed=4)
    stats, hits = search_run(cfg)
    assert hits, "expected at least one depth-4 hit in 60k parametrized trials"
    for rec in hits[:5]:
        line = rec.to_line()
        assert HitRecord.from_line(line) == rec
        assert verify_hit(rec, cfg)
        # recorded system really has the recorded depth
        sys = PolySystem.cubic(PrimeField(rec.p), rec.coeffs)
        fn = first_nonzero(sys, cfg.resolved_cap())
        assert (fn or 0) - 1 == rec.depth or (fn is None and rec.depth == cfg.resolved_cap())
    bad = HitRecord(
        p=hits[0].p, coeffs=hits[0].coeffs, depth=hits[0].depth + 1,
        next_value=hits[0].next_value, seed=hits[0].seed, stream=hits[0].stream,
        counter=hits[0].counter, strategy=hits[0].strategy,
        convention=hits[0].convention,
    )
    assert not verify_hit(bad, cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(p=30, budget=1).validate()  # not prime
    with pytest.raises(ValueError):
        SearchConfig(p=29, target_depth=0, budget=1).validate()
    with pytest.raises(ValueError, match="2N\\+5"):
        SearchConfig(p=7, target_depth=3, budget=1).validate()
    with pytest.raises(ValueError, match="2N\\+5"):
        SearchConfig(p=31, target_depth=3, eval_cap=14, budget=1).validate()
    with pytest.raises(ValueError):
        SearchConfig(p=29, strategy="annealing", budget=1).validate()
    with pytest.raises(ValueError, match="cubic"):
        SearchConfig(p=29, strategy="parametrized", coords=(3, 3), budget=1).validate()
    SearchConfig(p=29, budget=1).validate()


def test_digest_stability():
    a = SearchConfig(p=29, seed=1, budget=100)
    b = SearchConfig(p=29, seed=1, budget=999_999, workers=8, chunk_size=64)
    assert a.digest() == b.digest()  # budget/workers/chunking are not semantic
    c = SearchConfig(p=29, seed=2, budget=100)
    assert a.digest() != c.digest()
