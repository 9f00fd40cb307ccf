import csv
import io

from pebblegraph import bench
from pebblegraph.cli import main
from pebblegraph.generate import shelf_scene


def small_cfg(**kw):
    base = dict(ks=(2,), bs=(1,), trials=1, time_limit=20.0, samples_per_mode=120,
                connection_neighbors=8)
    base.update(kw)
    return bench.BenchConfig(**base)


def test_single_cell_single_row():
    rows = bench.run_bench({"shelf": shelf_scene(bays=2, k=2)}, small_cfg())
    assert len(rows) == 1
    assert set(rows[0]) == set(bench.COLUMNS)
    assert rows[0]["success"] == 1


def test_grid_row_count_and_order():
    rows = bench.run_bench({"shelf": shelf_scene(bays=2, k=2)},
                           small_cfg(ks=(2, 3), bs=(1, 2), trials=2))
    assert len(rows) == 2 * 2 * 2
    keys = [(r["k"], r["b"], r["trial"]) for r in rows]
    assert keys == sorted(keys)


def test_trial_seed_shared_across_b():
    assert bench.trial_seed(0, 3, 1, 4) == bench.trial_seed(0, 3, 2, 4)
    assert bench.trial_seed(0, 3, 1, 4) != bench.trial_seed(0, 3, 1, 5)
    assert bench.trial_seed(0, 3, 1, 4) != bench.trial_seed(1, 3, 1, 4)


def test_csv_and_summary():
    rows = [
        {c: "" for c in bench.COLUMNS} | {"scene": "s", "k": 2, "b": 1, "trial": t,
                                          "success": t % 2, "wall_time": 1.0 + t}
        for t in range(4)
    ]
    text = bench.rows_to_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert list(parsed[0]) == bench.COLUMNS and len(parsed) == 4
    summary = bench.summarize(rows)
    assert summary[(2, 1)] == {"trials": 4, "success": 0.5, "mean_time": 2.5}


def test_cli_bench(tmp_path, capsys):
    from pebblegraph.scene import dump_scene
    d = tmp_path / "scenes"
    d.mkdir()
    (d / "tiny.json").write_text(dump_scene(shelf_scene(bays=2, k=2)))
    (d / "tiny.roadmap.json").write_text("ignored")
    out = tmp_path / "bench.csv"
    assert main(["bench", str(d), "--k", "2", "--b", "1", "2", "--trials", "1",
                 "--samples", "120", "--out", str(out)]) == 0
    parsed = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(parsed) == 2 and {r["scene"] for r in parsed} == {"tiny"}
    assert "success" in capsys.readouterr().out


def test_cli_bench_empty_dir(tmp_path):
    assert main(["bench", str(tmp_path), "--out", str(tmp_path / "b.csv")]) == 2
