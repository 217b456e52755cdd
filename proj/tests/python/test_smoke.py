import math
import os
from pathlib import Path

import pytest

import rrcstorm

GOLDEN = Path(os.environ.get("RRCSTORM_GOLDEN_DIR", Path(__file__).resolve().parents[1] / "golden"))


def test_model_rows():
    row = rrcstorm.full_model(2757, 16, 132.07, connected_benign=8)
    assert row["accepted"] == 8
    assert row["rejected"] == 356
    assert round(row["drop_time_ms"]) == 61
    assert row["availability_pct"] == pytest.approx(2.20, abs=0.01)
    assert round(rrcstorm.drop_time_ms(2700, 16, 132.07)) == 121
    assert rrcstorm.availability_rate([16], [346]) == pytest.approx(4.42, abs=0.005)
    with pytest.raises(ValueError):
        rrcstorm.availability_rate([], [])


def test_simulated_attack():
    r = rrcstorm.simulate("paper-attack-0", seed=3, duration_ms=2500)
    assert r["period_accepted"] == 16
    assert 115 <= r["drop_time_ms"] <= 160
    states = [v["state"] for v in r["verdicts"]]
    assert "attack" in states
    assert states.index("attack") < states.index("overload")
    assert all(e["kind"] != "msg5" for e in r["trace"])


def test_determinism_and_replay(tmp_path):
    a = rrcstorm.simulate("paper-attack-0", seed=5, duration_ms=1500)
    b = rrcstorm.simulate("paper-attack-0", seed=5, duration_ms=1500)
    assert a["trace"] == b["trace"]
    path = tmp_path / "t.rrctrace.jsonl"
    rrcstorm.write_trace(path, a["trace"])
    back = rrcstorm.read_trace(path)
    assert back == a["trace"]
    assert rrcstorm.run_stream(back) == a["verdicts"]


def test_golden_trace_reads():
    trace = rrcstorm.read_trace(GOLDEN / "attack-short-seed1.rrctrace.jsonl")
    assert len(trace) == 400
    verdicts = rrcstorm.run_stream(trace)
    lines = (GOLDEN / "attack-short-seed1.verdicts.jsonl").read_text().splitlines()
    assert len(verdicts) == len(lines)


def test_detector_rules():
    assert rrcstorm.classify(2, 2, 2) == "normal"
    assert rrcstorm.classify(80, 16, 0) == "attack"
    assert rrcstorm.classify(80, 0, 0) == "overload"
    assert rrcstorm.classify(80, 16, 16) == "high_load"
    with pytest.raises(ValueError):
        rrcstorm.run_stream([], r1_threshold=1.0)


def test_truncated_poisson():
    xs = rrcstorm.truncated_poisson_samples(100_000, seed=4)
    assert set(xs) <= {0, 1, 2, 3}
    p = [math.exp(-2) * 2**k / math.factorial(k) for k in range(4)]
    oracle = sum(k * pk for k, pk in enumerate(p)) / sum(p)
    assert abs(sum(xs) / len(xs) - oracle) < 0.02


def test_table_and_latency():
    rows = rrcstorm.table1()
    assert [r["n_accepted"] for r in rows if r["source"] == "theoretical"] == [16, 12, 8, 4]
    summary = rrcstorm.latency_campaign("paper-attack-0", reps=3)
    assert summary["detected"] == 3
    assert "paper-normal" in rrcstorm.preset_names()


def test_bad_config():
    with pytest.raises(ValueError):
        rrcstorm.simulate("paper-attack-0", no_such_key=1)
    with pytest.raises(ValueError):
        rrcstorm.simulate("not-a-preset")
