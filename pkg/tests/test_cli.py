import gzip
import json
from datetime import date
from pathlib import Path

import pytest

from helpers import simple_rib_file
from moasscope.cli import main
from moasscope.synth import CollectorSpec, EventSpec, Scenario


@pytest.fixture()
def synth_out(tmp_path):
    sc = Scenario(
        seed=3,
        start_date=date(2022, 6, 1),
        window_days=40,
        collectors=(CollectorSpec("rc00", 8), CollectorSpec("rc01", 8)),
        background_prefixes=5,
        events=(
            EventSpec(
                "StableMoas",
                prefix="151.80.0.0/22",
                origins=(3333, 12859),
                start_day=1,
                end_day=40,
                visibility={3333: 9, 12859: 2},
            ),
            EventSpec(
                "ShortHijack",
                prefix="185.40.0.0/24",
                origins=(2914, 398465),
                start_day=10,
                end_day=12,
                visibility={2914: 4, 398465: 2},
            ),
        ),
    )
    scenario_path = tmp_path / "scenario.json"
    sc.save(scenario_path)
    data_dir = tmp_path / "data"
    assert main(["synth", str(scenario_path), "--out", str(data_dir)]) == 0
    return data_dir


def run_args(data_dir: Path, out_dir: Path, *extra: str) -> list[str]:
    return [
        "run",
        "--ribs", str(data_dir / "ribs"),
        "--out", str(out_dir),
        "--window-start", "2022-06-01",
        "--window-end", "2022-07-10",
        *extra,
    ]


def test_run_end_to_end(synth_out, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(run_args(synth_out, out)) == 0
    printed = capsys.readouterr().out
    assert "checks_ok=True" in printed
    assert (out / "profiles" / "profiles.csv").is_file()
    assert (out / "figures" / "fig3.csv").is_file()
    assert json.loads((out / "run_summary.json").read_text())["longlived_prefixes"] == 1


def test_run_missing_ribs_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--ribs", str(tmp_path / "nope"), "--out", str(tmp_path / "o"),
              "--window-start", "2022-06-01", "--window-end", "2022-06-30"])
    assert exc.value.code == 2


def test_empty_window_is_usage_error(synth_out, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(run_args(synth_out, tmp_path / "o", "--window-start", "2022-07-10",
                      "--window-end", "2022-06-01"))
    assert exc.value.code == 2


def test_missing_window_is_usage_error(synth_out, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--ribs", str(synth_out / "ribs"), "--out", str(tmp_path / "o")])
    assert exc.value.code == 2


def test_stage_commands_compose(synth_out, tmp_path, capsys):
    out = tmp_path / "out"
    base = ["--out", str(out)]
    assert main(["detect", "--ribs", str(synth_out / "ribs"),
                 "--window-start", "2022-06-01", "--window-end", "2022-07-10", *base]) == 0
    assert main(["lifetime", *base]) == 0
    assert main(["rpki", "--roas", str(synth_out / "missing-roas"), *base]) == 0
    assert main(["enrich", *base,
                 "--as-rel", str(synth_out / "aux" / "as-rel"),
                 "--as2org", str(synth_out / "aux" / "as2org"),
                 "--asdb", str(synth_out / "aux" / "asdb"),
                 "--hypergiants", str(synth_out / "aux" / "hypergiants.json"),
                 "--anycast", str(synth_out / "aux" / "anycast_prefixes.txt")]) == 0
    assert main(["report", *base]) == 0
    out_text = capsys.readouterr().out
    assert "check" in out_text
    assert (out / "figures" / "fig7-left.csv").is_file()


def test_missing_asdb_degrades_to_na(synth_out, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(run_args(synth_out, out,
                         "--as-rel", str(synth_out / "aux" / "as-rel"),
                         "--as2org", str(synth_out / "aux" / "as2org")))
    assert code == 0
    err = capsys.readouterr().err
    assert "asdb" in err and "NA" in err
    profiles = (out / "profiles" / "profiles.csv").read_text().splitlines()
    header = profiles[0].split(",")
    row = profiles[1].split(",")
    assert row[header.index("business_status")] == "NA"
    assert row[header.index("rel_class")] != "NA"


def test_report_rejects_unknown_figure(synth_out, tmp_path):
    out = tmp_path / "out"
    main(run_args(synth_out, out))
    with pytest.raises(SystemExit) as exc:
        main(["report", "--out", str(out), "--figures", "fig99"])
    assert exc.value.code == 2


def test_convert_round_trip(tmp_path, capsys):
    raw = simple_rib_file(
        [("192.0.2.1", 65010)],
        [("193.0.0.0/21", [(0, [("seq", [65010, 3333])])])],
    )
    mrt_path = tmp_path / "bview.20220613.0800.gz"
    mrt_path.write_bytes(gzip.compress(raw))
    out_dir = tmp_path / "jsonl"
    assert main(["convert", str(mrt_path), "--collector", "rrc10", "--out", str(out_dir)]) == 0
    target = out_dir / "bview.20220613.0800.jsonl"
    line = json.loads(target.read_text().splitlines()[0])
    assert line["prefix"] == "193.0.0.0/21"
    assert line["collector"] == "rrc10"
    assert line["path"] == [65010, 3333]


def test_convert_to_stdout(tmp_path, capsys):
    raw = simple_rib_file([("192.0.2.1", 65010)],
                          [("193.0.0.0/21", [(0, [("seq", [65010, 3333])])])])
    path = tmp_path / "bview.bin"
    path.write_bytes(raw)
    assert main(["convert", str(path), "--collector", "rrc10"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out.splitlines()[0])["peer_asn"] == 65010


def test_knee_on_lifetime_csv(synth_out, tmp_path, capsys):
    out = tmp_path / "out"
    main(run_args(synth_out, out))
    csv_path = out / "lifetimes" / "lifetimes.s1.csv"
    assert main(["knee", str(csv_path)]) == 0
    printed = capsys.readouterr().out
    assert "knee_days=" in printed and "short_lived_fraction=" in printed


def test_knee_no_knee_exits_1(tmp_path, capsys):
    path = tmp_path / "lifetimes.csv"
    path.write_text(
        "prefix,family,first_day,last_day,max_lifetime_days,observability,longevity,n_segments\n"
        + "".join(f"10.0.{i}.0/24,4,2022-06-01,2022-06-10,10,1.000000,ShortLived,1\n" for i in range(5))
    )
    assert main(["knee", str(path)]) == 1
    assert "no knee" in capsys.readouterr().err


def test_knee_raw_curve_sqrt(tmp_path, capsys):
    path = tmp_path / "curve.csv"
    rows = ["x,y"] + [f"{i / 100},{(i / 100) ** 0.5}" for i in range(101)]
    path.write_text("\n".join(rows) + "\n")
    assert main(["knee", str(path), "--raw-curve"]) == 0
    assert "knee=0.25" in capsys.readouterr().out


def test_config_file_with_flag_override(synth_out, tmp_path, monkeypatch):
    out = tmp_path / "out"
    config = {
        "ribs_dir": str(synth_out / "ribs"),
        "out_dir": str(out),
        "window_start": "2022-06-01",
        "window_end": "2022-07-10",
        "sensitivity": 0,
    }
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps(config))
    monkeypatch.setenv("MOASSCOPE_CONFIG", str(config_path))
    assert main(["run", "--sensitivity", "1"]) == 0
    knee = json.loads((out / "lifetimes" / "knee.json").read_text())
    assert knee["sensitivity"] == 1  # flag beat the config file
