import csv
import io
import json
import math

import pytest

from macfb import bounds, cli
from macfb.model import ChannelParams


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    assert out.count("\n") == 1
    return json.loads(out)


def run_csv(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    rows = list(csv.reader(io.StringIO(out)))
    assert len({len(r) for r in rows}) == 1
    return rows[0], rows[1:]


def test_rd_examples():
    assert run_json("rd", "--sigma2", "1", "--rho", "0", "--d1", "0.5", "--d2", "0.25") == {
        "rate_bits": 1.5, "region": "PRODUCT", "r_s1_given_s2": 0.5, "r_s2_given_s1": 1.0}
    res = run_json("rd", "--sigma2", "1", "--rho", "0", "--d1", "2", "--d2", "2")
    assert res["rate_bits"] == 0.0 and res["region"] == "ZERO_RATE"
    res = run_json("rd", "--sigma2", "1", "--rho", "0.5", "--d1", "0.5", "--d2", "0.95")
    assert res["rate_bits"] == pytest.approx(0.5, abs=1e-15) and res["region"] == "R1_DOMINANT"


def test_uncoded_threshold():
    res = run_json("uncoded", "--rho", "0.5", "--p", repr(2 / 3), "--noise", "1")
    assert res == {"d1": 0.5, "d2": 0.5, "optimal": True, "threshold_margin": 0.0}


def test_bound_trivial_and_threshold():
    res = run_json("bound", "--rho", "0.5", "--d1", "1", "--d2", "1", "--p1", "1", "--p2", "2")
    assert res["feasible"] is True and "symmetric_lower_bound" not in res
    res = run_json("bound", "--rho", "0.5", "--d1", "0.5", "--d2", "0.5", "--snr", repr(2 / 3))
    assert res["feasible"] and res["witness_rho_hat"] == pytest.approx(0.5, abs=1e-9)
    assert res["symmetric_lower_bound"] == pytest.approx(0.5, abs=1e-9)
    assert max(abs(res[k]) for k in ("slack_sum", "slack_rate1", "slack_rate2")) <= 1e-9
    res = run_json("bound", "--rho", "0.5", "--d1", "0.49", "--d2", "0.5", "--snr", repr(2 / 3))
    assert res["feasible"] is False and res["witness_rho_hat"] is None


def test_separation_commands():
    res = run_json("separation", "--rho", "0.5", "--snr", repr(2 / 3), "--d1", "0.5", "--d2", "0.5")
    assert res["achievable"] is False and res["r1"] is None
    res = run_json("separation", "--rho", "0.5", "--snr", "1")
    assert res["d1"] == pytest.approx(res["d2"])
    ok = run_json("separation", "--rho", "0.5", "--snr", "1", "--d1", repr(res["d1"] * 1.000001),
                  "--d2", repr(res["d2"] * 1.000001))
    assert ok["achievable"] is True


def test_simulate_deterministic():
    argv = ("simulate", "--rho", "0.5", "--p", repr(2 / 3), "--samples", "50000", "--seed", "42", "--blocks", "8")
    a, b = run(*argv), run(*argv)
    assert a == b and a[0] == 0
    res = json.loads(a[1])
    assert res["seed"] == 42 and res["samples"] == 50000 and res["analytic_d1"] == pytest.approx(0.5)


def test_float_format_round_trips():
    for x in (0.1, 2 / 3, 1e-300, 123456789.123, 0.0, 5.0, 1e22):
        s = cli.fmt(x)
        assert float(s) == x and ("." in s or "e" in s)
    assert cli.to_json({"a": float("nan"), "b": None, "c": True, "d": 3}) == '{"a": null, "b": null, "c": true, "d": 3}'


def test_sweep_columns_and_values():
    header, rows = run_csv("sweep", "--rho", "0.5", "--snr-min", repr(2 / 3), "--snr-max", "1e6",
                           "--points", "3", "--log")
    assert header == list(cli.SWEEP_COLUMNS)
    first, last = rows[0], rows[-1]
    assert float(first[1]) == pytest.approx(float(first[3]), abs=1e-9)
    assert first[4] == "true" and last[4] == "false"
    assert float(last[5]) * math.sqrt(1e6) == pytest.approx(math.sqrt(0.75) / 2, rel=0.02)
    assert float(last[6]) == pytest.approx(math.sqrt(0.75) / 2 / 1000)


def test_sweep_single_row_and_reproducible():
    argv = ("sweep", "--rho", "0.3", "--snr-min", "2", "--snr-max", "2", "--points", "1")
    _, rows = run_csv(*argv)
    assert len(rows) == 1
    assert run(*argv) == run(*argv)
    code, _, err = run("sweep", "--rho", "0.3", "--snr-min", "1", "--snr-max", "2", "--points", "1")
    assert code == 2 and "error" in json.loads(err)


def test_trace_columns_and_symmetry():
    header, rows = run_csv("trace", "--rho", "0.5", "--p", repr(2 / 3), "--resolution", "4")
    assert header == list(cli.TRACE_COLUMNS)
    by_d1 = {float(r[0]): r for r in rows}
    # the threshold uncoded point sits on the necessary frontier
    assert float(by_d1[0.5][1]) == pytest.approx(0.5, rel=1e-9)
    for r in rows:
        if r[1] and r[2]:
            assert float(r[2]) >= float(r[1]) * (1 - 1e-9)
        if not r[1]:
            assert r[3] == ""
    # swapping the roles of the users maps the frontier onto itself
    for r in rows:
        if r[1] and float(r[1]) < 1:
            back = bounds.necessary_frontier(1, 0.5, ChannelParams.symmetric(2 / 3), [float(r[1])])[0]
            assert back <= float(r[0]) * (1 + 1e-9)


def test_trace_empty_fields():
    _, rows = run_csv("trace", "--rho", "0.5", "--p1", "0.5", "--p2", "1", "--resolution", "5")
    assert rows[0][1:] == ["", "", ""]


@pytest.mark.parametrize("argv", [
    ("uncoded", "--rho", "2", "--snr", "1"),
    ("uncoded", "--rho", "0.5", "--snr", "1", "--p", "2"),
    ("uncoded", "--rho", "0.5", "--p", "1", "--p1", "1", "--p2", "1"),
    ("uncoded", "--rho", "0.5"),
    ("rd", "--rho", "0.5", "--d1", "-1", "--d2", "0.5"),
    ("bogus",),
    ("simulate", "--rho", "0.5", "--snr", "1", "--samples", "0"),
])
def test_domain_errors_exit_2(argv):
    code, out, err = run(*argv)
    assert code == 2 and out == ""
    assert err.count("\n") == 1 and "error" in json.loads(err)


def test_numeric_failure_exit_3():
    code, out, err = run("simulate", "--rho", "0.5", "--var1", "1e300", "--var2", "1e300",
                         "--p1", "1", "--p2", "1", "--noise", "1e300", "--samples", "1000", "--blocks", "2")
    assert code == 3 and "block 0" in json.loads(err)["error"]
