#!/usr/bin/env python3
"""End-to-end checks of the qhjm command-line tool.

usage: check_cli.py QHJM_BINARY SCHEMA_JSON [--only NAME]
"""
import json
import math
import os
import subprocess
import sys
import tempfile

import jsonschema

BIN, SCHEMA = sys.argv[1], sys.argv[2]
ONLY = sys.argv[sys.argv.index("--only") + 1] if "--only" in sys.argv else None
validator = jsonschema.Draft202012Validator(json.load(open(SCHEMA)))
failures = []
checks = 0


def run(*args, env=None, expect=0):
    e = dict(os.environ)
    e.pop("QHJM_SEED", None)
    e.update(env or {})
    p = subprocess.run([BIN, *args], capture_output=True, text=True, env=e)
    if p.returncode != expect:
        raise AssertionError(f"{args}: exit {p.returncode}, wanted {expect}\n{p.stderr}")
    return p


def report(*args, env=None):
    p = run(*args, env=env)
    doc = json.loads(p.stdout)
    errors = sorted(validator.iter_errors(doc), key=str)
    if errors:
        raise AssertionError(f"{args}: schema: {errors[0].message} at {list(errors[0].absolute_path)}")
    return doc


def check(name):
    def wrap(fn):
        global checks
        if ONLY is not None and name != ONLY:
            return fn
        if ONLY is None and name.startswith("noisy"):
            return fn
        checks += 1
        try:
            fn()
            print(f"ok    {name}")
        except AssertionError as err:
            failures.append(name)
            print(f"FAIL  {name}: {err}")
        return fn
    return wrap


def near(a, b, tol):
    if abs(a - b) > tol:
        raise AssertionError(f"{a} differs from {b} by more than {tol}")


@check("decompose_sigma3")
def _():
    d = report("decompose", "sigma3", "--r", "1")["results"]
    near(d["explained_variance"], 0.800, 1e-3)


@check("decompose_sigma2")
def _():
    d = report("decompose", "sigma2", "--r", "2")["results"]
    near(d["normalized_eigenvalues"][0], 0.8576, 1e-3)
    near(d["normalized_eigenvalues"][1], 0.1424, 1e-3)
    near(d["eigenvalues"][0], 0.8576 * d["trace"], 1e-3 * d["trace"])


@check("decompose_identity")
def _():
    d = report("decompose", "identity3", "--r", "3")["results"]
    near(d["explained_variance"], 1.0, 1e-12)


@check("decompose_file")
def _():
    with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as f:
        f.write("# covariance\n4, 0\n0 1\n")
    d = report("decompose", f.name, "--r", "2", "--tenors", "0.5", "1.0")["results"]
    near(d["factors"]["factors"][0][0], 2.0, 1e-12)
    near(d["factors"]["factors"][1][1], 1.0, 1e-12)


@check("qpca_sigma2_noiseless")
def _():
    d = report("qpca", "sigma2", "--bits", "2", "--shots", "8192", "--seed", "7")["results"]
    if not d["trace"]["converged"] or len(d["trace"]["iterations"]) > 4:
        raise AssertionError("did not converge within 4 iterations")
    o = d["oracle"]["eigenvector"]
    v = d["eigenvector"]["vector"]
    overlap = complex(sum(complex(*a).conjugate() * complex(*b) for a, b in zip(o, v)))
    fid = abs(overlap) ** 2
    if fid < 0.999:
        raise AssertionError(f"eigenvector fidelity {fid}")
    near(fid, d["oracle"]["fidelity"], 1e-9)
    if d["ambiguity"]["verdict"] != "K=1":
        raise AssertionError("ambiguity verdict")


@check("qpca_bits_zero")
def _():
    p = run("qpca", "sigma2", "--bits", "0", "--seed", "1", expect=2)
    if "n_bits" not in p.stderr:
        raise AssertionError(p.stderr)


@check("qpca_degenerate_projection")
def _():
    with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as f:
        f.write("1 0\n0 0\n")
    p = run("qpca", f.name, "--bits", "2", "--target", "01", "--seed", "1", expect=3)
    if "increase n_bits" not in p.stderr:
        raise AssertionError(p.stderr)


@check("seed_required")
def _():
    run("qpca", "sigma2", expect=2)
    run("hjm", "--sigma", "0.01", expect=2)


@check("seed_from_environment")
def _():
    a = run("qpca", "sigma2", "--seed", "5").stdout
    b = run("qpca", "sigma2", env={"QHJM_SEED": "5"}).stdout
    if a != b:
        raise AssertionError("environment seed does not match --seed")
    run("qpca", "sigma2", env={"QHJM_SEED": "x"}, expect=2)


@check("bad_inputs")
def _():
    run("decompose", "/nonexistent/matrix.txt", expect=2)
    run("decompose", "sigma3", "--r", "4", expect=2)
    run("hjm", "--seed", "1", expect=2)
    run("--format", "csv", "decompose", "sigma3", expect=2)
    run("frobnicate", expect=2)


@check("hjm_sigma3_martingale")
def _():
    d = report("hjm", "--factors-from", "sigma3", "--r", "1", "--paths", "100000", "--dt", "0.00396",
               "--horizon", "0.5", "--seed", "11")["results"]
    for row in d["martingale"]:
        if row["abs_error"] > 3 * row["std_error"]:
            raise AssertionError(row)


@check("hjm_zero_volatility")
def _():
    d = report("hjm", "--paths", "1", "--sigma", "0", "--seed", "3")["results"]
    for row in d["martingale"]:
        near(row["mc_estimate"], row["bond_price"], 1e-10)
        near(row["bond_price"], math.exp(-0.03 * row["maturity"]), 1e-12)


@check("hjm_quantum_factor")
def _():
    d = report("hjm", "--factors-from", "sigma3", "--quantum", "--quantum-bits", "1", "--paths", "2000",
               "--horizon", "0.5", "--seed", "2")["results"]
    f = d["factors"]
    if f["provenance"] != "quantum" or d["quantum"] is None:
        raise AssertionError("quantum provenance missing")
    ref = [0.669, 0.516, 0.536]
    row = f["factors"][0]
    cos = sum(a * b for a, b in zip(row, ref)) / math.sqrt(sum(a * a for a in row) * sum(b * b for b in ref))
    if cos ** 2 < 0.99:
        raise AssertionError(f"direction fidelity {cos ** 2}")


@check("history_pipeline")
def _():
    import random
    rnd = random.Random(4)
    path = os.path.join(tempfile.mkdtemp(), "history.csv")
    f = [0.020, 0.022, 0.025]
    with open(path, "w") as out:
        out.write("date,tenor_1m,tenor_3m,tenor_6m\n")
        for k in range(400):
            out.write(f"d{k:04d}," + ",".join(f"{x:.6f}" for x in f) + "\n")
            z = rnd.gauss(0, 1)
            f = [x + 0.0006 * z + 0.0001 * rnd.gauss(0, 1) for x in f]
    d = report("ingest-check", path)["results"]
    if d["observations"] != 400 or d["leading_explained_variance"] < 0.8:
        raise AssertionError(d)
    h = report("hjm", "--history", path, "--r", "2", "--paths", "2000", "--horizon", "0.5", "--seed", "9")["results"]
    if len(h["factors"]["factors"]) != 2:
        raise AssertionError("factor count")
    with open(path, "a") as out:
        out.write("d9999,0.01,oops,0.02\n")
    p = run("ingest-check", path, expect=2)
    if "line 402" not in p.stderr:
        raise AssertionError(p.stderr)


@check("byte_identical_reruns")
def _():
    tmp = tempfile.mkdtemp()
    for args in (["qpca", "sigma2", "--bits", "2", "--seed", "7"],
                 ["qpca", "sigma2", "--bits", "3", "--noise", "0.08", "--seed", "7", "--shots", "2000"],
                 ["hjm", "--factors-from", "sigma3", "--paths", "3000", "--horizon", "0.5", "--seed", "11"]):
        a, b = os.path.join(tmp, "a.json"), os.path.join(tmp, "b.json")
        run(*args, "--output", a)
        run(*args, "--output", b)
        if open(a, "rb").read() != open(b, "rb").read():
            raise AssertionError(f"{args}: reports differ")
        if "time" in json.load(open(a)).get("provenance", {}):
            raise AssertionError("timestamp present")


@check("noisy_decoherence_sigma2")
def _():
    d = report("qpca", "sigma2", "--bits", "3", "--noise", "0.08", "--seed", "7")["results"]
    tv = d["refinement"]["tv_to_uniform"]
    print(f"      eigenvalue-register TV to uniform = {tv:.4f} (bound 0.25)")
    if tv > 0.25:
        raise AssertionError(f"TV {tv:.4f} > 0.25")


print(f"{checks - len(failures)}/{checks} checks passed")
sys.exit(1 if failures else 0)
