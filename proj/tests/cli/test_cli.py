import csv
import json
import os
import random
import subprocess
from pathlib import Path

import jsonschema
import pytest

LBM = os.environ.get("LBM_BIN", "lbm")
ROOT = Path(__file__).resolve().parents[2]
DATA = ROOT / "data"
SCHEMAS = ROOT / "schemas"


def run(*args, out=None, check=True):
    argv = [LBM]
    if out is not None:
        argv += ["-o", str(out)]
    argv += [str(a) for a in args]
    proc = subprocess.run(argv, capture_output=True, text=True, timeout=300)
    if check and proc.returncode != 0:
        raise AssertionError(f"{argv} exited {proc.returncode}: {proc.stderr}")
    return proc


def load(path):
    with open(path) as f:
        return json.load(f)


def validate(path, schema):
    doc = load(path)
    jsonschema.validate(doc, load(SCHEMAS / f"{schema}.schema.json"))
    return doc


def check_manifest(out, command):
    m = validate(out / "manifest.json", "manifest")
    assert m["command"] == command
    for p in m["outputs"]:
        assert Path(p).exists()
    return m


def compile_xor(tmp):
    out = tmp / "xor"
    run("compile", "--wff", DATA / "xor.lbm", "--eps", "0.5", out=out)
    return out / "rbm.json"


def planted_3cnf(n, m, seed):
    rng = random.Random(seed)
    plant = [rng.random() < 0.5 for _ in range(n)]
    clauses = []
    while len(clauses) < m:
        vs = rng.sample(range(n), 3)
        lits = [v + 1 if rng.random() < 0.5 else -(v + 1) for v in vs]
        if any((lit > 0) == plant[abs(lit) - 1] for lit in lits):
            clauses.append(lits)
    return clauses


def write_cnf(path, n, clauses):
    lines = [f"p cnf {n} {len(clauses)}"] + [" ".join(map(str, c)) + " 0" for c in clauses]
    path.write_text("\n".join(lines) + "\n")


# compile


def test_compile_xor(tmp_path):
    rbm = validate(compile_xor(tmp_path), "rbm")
    assert rbm["n_visible"] == 3 and rbm["n_hidden"] == 4
    assert rbm["variables"] == ["x", "y", "z"]
    listing = (tmp_path / "xor" / "energy.txt").read_text()
    assert listing.startswith("E = -h1(")
    assert listing.count("h") == 4
    check_manifest(tmp_path / "xor", "compile")


def test_compile_nixon(tmp_path):
    run("compile", "--weighted", DATA / "nixon.lbm", out=tmp_path)
    rbm = validate(tmp_path / "rbm.json", "rbm")
    assert rbm["n_visible"] == 4 and rbm["n_hidden"] == 7


def test_compile_dimacs_hidden_count(tmp_path):
    clauses = planted_3cnf(12, 30, seed=5)
    write_cnf(tmp_path / "f.cnf", 12, clauses)
    run("compile", "--dimacs", tmp_path / "f.cnf", out=tmp_path)
    rbm = validate(tmp_path / "rbm.json", "rbm")
    assert rbm["n_hidden"] == sum(len(c) for c in clauses)


def test_compile_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.lbm"
    bad.write_text("x & (y |\n")
    p = run("compile", "--wff", bad, out=tmp_path, check=False)
    assert p.returncode == 2
    assert "line" in p.stderr


def test_compile_error_exit_3_and_dimacs_tautology(tmp_path):
    p = run("--eps", "1.5", "compile", "--wff", DATA / "xor.lbm", out=tmp_path, check=False)
    assert p.returncode == 3
    taut = tmp_path / "taut.cnf"
    taut.write_text("p cnf 1 1\n1 -1 0\n")
    # rejected while reading the file, so reported with its position
    p = run("compile", "--dimacs", taut, out=tmp_path, check=False)
    assert p.returncode == 2
    assert "line 2" in p.stderr


def test_missing_input_exit_2(tmp_path):
    p = run("compile", "--wff", tmp_path / "nope.lbm", out=tmp_path, check=False)
    assert p.returncode == 2


def test_bad_flag_exit_2():
    assert run("compile", "--bogus", check=False).returncode == 2
    assert run("models", check=False).returncode == 2


# models


def xor_truth(x, y, z):
    return (x != y) == bool(z)


def test_models_xor_exact(tmp_path):
    rbm = compile_xor(tmp_path)
    run("models", rbm, out=tmp_path / "m")
    doc = validate(tmp_path / "m" / "models.json", "models")
    bits = {m["bits"] for m in doc["models"]}
    assert bits == {f"{x}{y}{z}" for x in (0, 1) for y in (0, 1) for z in (0, 1) if xor_truth(x, y, z)}
    energies = [m["free_energy"] for m in doc["models"]]
    assert energies == sorted(energies)
    check_manifest(tmp_path / "m", "models")


def test_models_clamped(tmp_path):
    rbm = compile_xor(tmp_path)
    run("models", rbm, "--clamp", "x=1, y=0", out=tmp_path / "m")
    doc = validate(tmp_path / "m" / "models.json", "models")
    assert [m["assignment"] for m in doc["models"]] == [{"x": 1, "y": 0, "z": 1}]
    assert doc["clamp"] == {"x": 1, "y": 0}


def test_models_falsifying_clamp_is_empty(tmp_path):
    rbm = compile_xor(tmp_path)
    p = run("models", rbm, "--clamp", "x=1,y=1,z=1", out=tmp_path / "m")
    assert p.returncode == 0
    assert validate(tmp_path / "m" / "models.json", "models")["models"] == []


def test_models_unknown_variable_exit_2(tmp_path):
    rbm = compile_xor(tmp_path)
    p = run("models", rbm, "--clamp", "w=1", out=tmp_path / "m", check=False)
    assert p.returncode == 2
    assert "w" in p.stderr


def test_models_sample_mode(tmp_path):
    rbm = compile_xor(tmp_path)
    run("--tau", "0.25", "--max-samples", "4000", "models", rbm, "--mode", "sample", out=tmp_path / "m")
    doc = validate(tmp_path / "m" / "models.json", "models")
    assert doc["samples_drawn"] == 4000
    for m in doc["models"]:
        a = m["assignment"]
        assert xor_truth(a["x"], a["y"], a["z"])
    assert len(doc["models"]) == 4


def test_models_guard_exit_4(tmp_path):
    clauses = planted_3cnf(24, 20, seed=1)
    write_cnf(tmp_path / "big.cnf", 24, clauses)
    run("compile", "--dimacs", tmp_path / "big.cnf", out=tmp_path / "c")
    p = run("models", tmp_path / "c" / "rbm.json", out=tmp_path / "m", check=False)
    assert p.returncode == 4


# sat, maxsat


def test_maxsat_four_clauses(tmp_path):
    run("maxsat", DATA / "maxsat4.cnf", "--prove", out=tmp_path)
    doc = validate(tmp_path / "maxsat.json", "maxsat")
    assert doc["satisfied"] == 3 and doc["total"] == 4
    assert doc["optimum_proved"]
    check_manifest(tmp_path, "maxsat")


def test_maxsat_weighted(tmp_path):
    run("maxsat", DATA / "nixon.wcnf", "--prove", out=tmp_path)
    doc = validate(tmp_path / "maxsat.json", "maxsat")
    assert doc["satisfied"] == 2010 and doc["total"] == 2020


def test_sat_planted(tmp_path):
    n = 20
    clauses = planted_3cnf(n, 85, seed=11)
    write_cnf(tmp_path / "p.cnf", n, clauses)
    run("sat", tmp_path / "p.cnf", out=tmp_path)
    doc = validate(tmp_path / "sat.json", "sat")
    assert doc["status"] == "SAT" and doc["verified"]
    x = doc["assignment"]
    for c in clauses:
        assert any((lit > 0) == bool(x[abs(lit) - 1]) for lit in c)


def test_sat_unsatisfiable_is_unknown(tmp_path):
    p = run("--time-budget", "0.2", "sat", DATA / "maxsat4.cnf", out=tmp_path)
    assert p.returncode == 0
    doc = validate(tmp_path / "sat.json", "sat")
    assert doc["status"] == "UNKNOWN" and doc["assignment"] is None


def test_sat_corrupt_file_exit_2(tmp_path):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 2 1\n1 x 0\n")
    assert run("sat", bad, out=tmp_path, check=False).returncode == 2
    assert run("maxsat", bad, out=tmp_path, check=False).returncode == 2


# experiments


def test_coverage_reaches_full(tmp_path):
    run("--tau", "0.25", "--max-samples", "1000000", "experiment", "coverage", "--M", "10", "--N", "5", "--runs", "20",
        out=tmp_path)
    doc = validate(tmp_path / "coverage.json", "coverage")
    assert doc["model_count"] == 31
    assert doc["all_full"] and doc["min_accuracy"] == 1.0
    with open(tmp_path / "coverage.csv") as f:
        rows = list(csv.DictReader(f))
    means = [float(r["coverage_mean"]) for r in rows]
    assert means == sorted(means)
    assert means[-1] == 1.0
    check_manifest(tmp_path, "experiment coverage")


def test_coverage_guard_exit_4(tmp_path):
    p = run("experiment", "coverage", "--M", "25", "--N", "10", "--runs", "1", out=tmp_path, check=False)
    assert p.returncode == 4


def test_linearity(tmp_path):
    run("experiment", "linearity", "--clauses", "20", "--vars", "10", "--c", "1,5,10", out=tmp_path)
    doc = validate(tmp_path / "linearity.json", "linearity")
    assert [r["c"] for r in doc["results"]] == [1, 5, 10]
    for r in doc["results"]:
        assert r["max_linearity_error"] < 1e-9
        with open(tmp_path / r["file"]) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 2**10
        for row in rows:
            assert abs(float(row["min_energy"]) + 0.5 * float(row["satisfied_count"])) < 1e-9
    assert doc["results"][-1]["pearson"] > 0.99


def test_landscape(tmp_path):
    run("experiment", "landscape", "--dimacs", DATA / "sat2.cnf", "--c", "0.1,0.5,1,5", out=tmp_path)
    doc = validate(tmp_path / "landscape.json", "landscape")
    assert len(doc["results"]) == 4
    for r in doc["results"]:
        with open(tmp_path / r["file"]) as f:
            assert len(list(csv.DictReader(f))) == 41 * 41
    # the only model is x = (0, 0), i.e. both thetas at the lower bound
    assert doc["results"][-1]["argmin"] == [-10, -10]


def test_landscape_needs_two_vars(tmp_path):
    p = run("experiment", "landscape", "--dimacs", DATA / "nixon.wcnf", out=tmp_path, check=False)
    assert p.returncode == 2


def test_timing(tmp_path):
    run("--tau", "0.25", "experiment", "timing", "--M", "4", "--N-max", "3", "--runs", "3", out=tmp_path)
    doc = validate(tmp_path / "timing.json", "timing")
    assert [r["N"] for r in doc["rows"]] == [1, 2, 3]


# train


def test_train_with_knowledge(tmp_path):
    run("train", DATA / "xor.csv", "--knowledge", DATA / "xor.lbm", "--hidden", "0", "--epochs", "10",
        "--label", "z", out=tmp_path)
    doc = validate(tmp_path / "metrics.json", "metrics")
    assert doc["epochs"][0]["epoch"] == 0
    assert doc["epochs"][0]["gap"] < 0
    assert doc["n_hidden"] == 4
    validate(tmp_path / "rbm.json", "rbm")
    check_manifest(tmp_path, "train")


def test_train_from_scratch(tmp_path):
    run("train", DATA / "xor.csv", "--hidden", "100", "--epochs", "5000", "--lr", "0.1", "--init-scale", "0.5",
        "--label", "z", out=tmp_path)
    doc = validate(tmp_path / "metrics.json", "metrics")
    assert len(doc["epochs"]) == 5001
    assert doc["final_gap"] < 0
    assert doc["label_accuracy"] == 1.0


def test_train_knowledge_mismatch_exit_2(tmp_path):
    p = run("train", DATA / "xor.csv", "--knowledge", DATA / "nixon.lbm", out=tmp_path, check=False)
    assert p.returncode == 2


def test_train_empty_data_exit_2(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert run("train", empty, out=tmp_path / "o", check=False).returncode == 2
    header_only = tmp_path / "header.csv"
    header_only.write_text("x,y\n")
    assert run("train", header_only, out=tmp_path / "o", check=False).returncode == 2


# run contract


@pytest.mark.parametrize(
    "args,files",
    [
        (["models", "{xor}", "--mode", "sample", "--tau", "0.5"], ["models.json"]),
        (["experiment", "coverage", "--M", "5", "--N", "3", "--runs", "4"], ["coverage.csv", "coverage.json"]),
        (["maxsat", str(DATA / "nixon.wcnf")], ["maxsat.json"]),
        (["train", str(DATA / "xor.csv"), "--epochs", "50"], ["rbm.json", "metrics.json"]),
    ],
)
def test_reruns_are_byte_identical(tmp_path, args, files):
    xor = compile_xor(tmp_path)
    args = [a.replace("{xor}", str(xor)) for a in args]
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        run("--seed", "17", *args, out=out)
        docs = {}
        for name in files:
            text = (out / name).read_text()
            if name.endswith(".json"):
                # wall-clock fields are the only permitted difference
                doc = json.loads(text)
                doc.pop("seconds", None)
                doc.pop("time_seconds", None)
                text = json.dumps(doc)
            docs[name] = text
        outs.append(docs)
        m = load(out / "manifest.json")
        assert m["seed"] == 17
    assert outs[0] == outs[1]


def test_seed_changes_samples(tmp_path):
    runs = []
    for seed in (1, 2):
        out = tmp_path / f"s{seed}"
        run("--seed", seed, "--tau", "0.5", "experiment", "coverage", "--M", "6", "--N", "4", "--runs", "2", out=out)
        runs.append((out / "coverage.csv").read_text())
    assert runs[0] != runs[1]


def test_manifest_records_input_hash(tmp_path):
    import hashlib

    run("compile", "--wff", DATA / "xor.lbm", out=tmp_path)
    m = check_manifest(tmp_path, "compile")
    digest = hashlib.sha256((DATA / "xor.lbm").read_bytes()).hexdigest()
    assert [i["sha256"] for i in m["inputs"]] == [digest]
    assert m["config"]["global"]["eps"] == 0.5


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("eps = 0.25\nseed = 9\n")
    run("--config", cfg, "compile", "--wff", DATA / "xor.lbm", out=tmp_path / "a")
    assert load(tmp_path / "a" / "rbm.json")["eps"] == 0.25
    assert load(tmp_path / "a" / "manifest.json")["seed"] == 9
    run("--config", cfg, "--eps", "0.75", "compile", "--wff", DATA / "xor.lbm", out=tmp_path / "b")
    assert load(tmp_path / "b" / "rbm.json")["eps"] == 0.75


def test_threads_env(tmp_path):
    env = dict(os.environ, LBM_THREADS="2")
    subprocess.run([LBM, "-o", str(tmp_path), "compile", "--wff", str(DATA / "xor.lbm")], env=env, check=True,
                   capture_output=True)
    assert load(tmp_path / "manifest.json")["config"]["global"]["threads"] == 2
