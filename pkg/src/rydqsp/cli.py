"""Command-line entry point: compile, estimate, sweep, verify and physical.

Exit codes: 0 success, 1 usage or input error, 2 verification failure.
Every artifact is written to a temporary file in the target directory and
renamed into place, so readers never see a partial file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .ebgc import CircuitError, account
from .eit import (
    EitParams,
    PhysicalError,
    conditional_errors,
    reported_parameter_example,
    reported_parameters,
    total_error_ohe,
)
from .layout import LayoutError, LayoutSpec
from .lcu import (
    compile_block_encoding,
    compile_controlled_walk,
    compile_lcu,
    compile_walk,
    grouped_plan,
    ohe_plan,
    packed_plan,
)
from .pauli import HamiltonianError, build_disordered_heisenberg, parse_hamiltonian_json
from .planners import CSV_FIELDS, METHODS, PlanError, SimulationJob, compare, heisenberg_jobs, plan, time_policy
from .qsp import QspError, QspSequence
from .verify import (
    random_instance,
    verify_block_encoding,
    verify_lr_decimation,
    verify_qsp_end_to_end,
    verify_reflection_identity,
    verify_walk_chebyshev,
    walk_eigenphase_deviation,
)

COMMANDS = ("compile", "estimate", "sweep", "verify", "physical")
FORMATS = ("json", "csv", "table")
VERIFY_TOL = {"block": 1e-9, "walk": 1e-8, "reflection": 1e-9, "qsp": 1e-8}

INPUT_ERRORS = (HamiltonianError, CircuitError, QspError, PhysicalError, LayoutError, PlanError,
                OSError)


class UsageError(ValueError):
    pass


class VerificationFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    output: str | None = None
    seed: int = 0
    format: str = "json"
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")
        for name, path in self.inputs.items():
            if not os.path.isfile(path):
                raise UsageError(f"--{name}: no such file {path!r}")


# output


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".rqsp-", dir=d)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _table(rows: list[dict], fields) -> str:
    cells = [[_cell(r.get(f)) for f in fields] for r in rows]
    widths = [max(len(f), *(len(c[i]) for c in cells)) for i, f in enumerate(fields)]
    lines = ["  ".join(f.rjust(w) for f, w in zip(fields, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: list[dict], fields=CSV_FIELDS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_cell(r.get(f)) for f in fields])
    return buf.getvalue()


def _parse_cell(field_name: str, text: str):
    if text == "":
        return None
    if field_name == "method":
        return text
    if field_name in ("n_site", "ancillae", "k_star", "r_segments", "l"):
        return int(text)
    return float(text)


def read_sweep_csv(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return [{h: _parse_cell(h, c) for h, c in zip(header, row)} for row in reader]


# inputs


def _spec_from(cfg: RunConfig):
    if "hamiltonian" in cfg.inputs:
        with open(cfg.inputs["hamiltonian"]) as fh:
            return parse_hamiltonian_json(fh.read())
    n = cfg.options.get("heisenberg")
    if n is None:
        raise UsageError("give --hamiltonian FILE or --heisenberg N")
    return build_disordered_heisenberg(n, cfg.seed)


def _layout_from(cfg: RunConfig) -> LayoutSpec | None:
    if "layout" not in cfg.inputs:
        return None
    with open(cfg.inputs["layout"]) as fh:
        return LayoutSpec.from_json(fh.read())


def parse_range(text: str) -> list[int]:
    try:
        a, b, s = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"range {text!r} is not START:STOP:STEP") from None
    if s <= 0 or a < 2 or b < a:
        raise UsageError(f"range {text!r} needs 2 <= START <= STOP and STEP > 0")
    return list(range(a, b + 1, s))


# commands


_PLANS = {"grouped": grouped_plan, "ohe": ohe_plan, "packed": packed_plan}
_CIRCUITS = {
    "block": compile_block_encoding,
    "lcu": compile_lcu,
    "walk": compile_walk,
    "cw": compile_controlled_walk,
    "cw-exact": lambda p: compile_controlled_walk(p, "exact"),
}


def cmd_compile(cfg: RunConfig) -> int:
    spec = _spec_from(cfg)
    plan_name = cfg.options.get("plan", "grouped")
    lcu_plan = _PLANS[plan_name](spec)
    circuit = _CIRCUITS[cfg.options.get("circuit", "walk")](lcu_plan)
    report = account(circuit, lcu_plan.tree)
    if cfg.output:
        write_atomic(cfg.output, circuit.to_json() + "\n")
    sys.stdout.write(_dumps({"plan": plan_name, "circuit": cfg.options.get("circuit", "walk"),
                             "n_qubits": circuit.n_qubits, "report": report.to_dict()}))
    return 0


def _job(cfg: RunConfig, spec, method: str) -> SimulationJob:
    t = cfg.options.get("time")
    if t is None:
        t = time_policy(cfg.options.get("time_policy", "4n"), spec.n_site)
    return SimulationJob(spec, t, cfg.options.get("epsilon", 1e-3), method,
                         layout=_layout_from(cfg),
                         normalization=cfg.options.get("normalization", "bond"),
                         pf_charge=cfg.options.get("pf_charge", "composed"))


def cmd_estimate(cfg: RunConfig) -> int:
    spec = _spec_from(cfg)
    report = plan(_job(cfg, spec, cfg.options.get("method", "qsp")))
    if cfg.format == "json":
        _emit(cfg, _dumps(report.to_dict()))
    elif cfg.format == "csv":
        _emit(cfg, rows_to_csv([report.row()]))
    else:
        _emit(cfg, _table([report.row()], CSV_FIELDS))
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    sizes = parse_range(cfg.options.get("heisenberg_range", "10:100:10"))
    methods = tuple(cfg.options.get("methods") or METHODS)
    jobs = heisenberg_jobs(sizes, cfg.options.get("epsilon", 1e-3),
                           cfg.options.get("time_policy", "4n"), cfg.seed, methods,
                           normalization=cfg.options.get("normalization", "bond"),
                           pf_charge=cfg.options.get("pf_charge", "composed"))
    rows = compare(jobs)
    if cfg.options.get("gnuplot"):
        text = _gnuplot(rows, sizes, methods)
    elif cfg.format == "table":
        text = _table(rows, CSV_FIELDS + ("ebgc_ratio", "depth_ratio"))
    elif cfg.format == "json":
        text = _dumps(rows)
    else:
        text = rows_to_csv(rows)
    _emit(cfg, text)
    return 0


def _gnuplot(rows, sizes, methods) -> str:
    by = {(r["n_site"], r["method"]): r for r in rows}
    head = ["# n_site"] + [f"{m}_{q}" for m in methods for q in ("ebgc", "depth")]
    lines = [" ".join(head)]
    for n in sizes:
        vals = [str(n)] + [repr(float(by[(n, m)][q])) for m in methods for q in ("ebgc", "depth")]
        lines.append(" ".join(vals))
    return "\n".join(lines) + "\n"


def cmd_verify(cfg: RunConfig) -> int:
    check = cfg.options.get("check", "block")
    rng = np.random.default_rng(cfg.seed)
    if check == "lr":
        rep = verify_lr_decimation(cfg.options.get("n", 10), cfg.options.get("t", 0.5),
                                   cfg.options.get("l_values") or (2, 3, 4), cfg.seed)
        ok = bool(rep.strictly_decreasing and rep.mu > 0 and abs(rep.r) > 0.95)
        result = {"check": "lr", "defects": list(rep.defects), "mu": rep.mu, "r": rep.r,
                  "ok": ok}
    else:
        inst = random_instance(rng, cfg.options.get("n", 2), cfg.options.get("terms", 4))
        if check == "block":
            dev = verify_block_encoding(inst)
        elif check == "reflection":
            dev = verify_reflection_identity(inst)
        elif check == "walk":
            k = cfg.options.get("k", 4)
            dev = max([walk_eigenphase_deviation(inst)]
                      + [verify_walk_chebyshev(inst, j) for j in range(1, k + 1)])
        elif check == "qsp":
            seq = QspSequence(tuple(rng.uniform(-math.pi, math.pi, cfg.options.get("phases", 4))))
            dev = verify_qsp_end_to_end(inst, seq)
        else:
            raise UsageError(f"unknown check {check!r}")
        dev = float(dev)
        ok = bool(dev < VERIFY_TOL[check])
        result = {"check": check, "max_deviation": dev, "tolerance": VERIFY_TOL[check], "ok": ok}
    _emit(cfg, _dumps(result))
    if not ok:
        raise VerificationFailure(f"{check} check failed: {json.dumps(result, sort_keys=True)}")
    return 0


def cmd_physical(cfg: RunConfig) -> int:
    n_gates = cfg.options.get("n_gates", 100)
    if "params" in cfg.inputs:
        with open(cfg.inputs["params"]) as fh:
            params = EitParams.from_json(fh.read())
        report = conditional_errors(params)
    elif cfg.options.get("reported_example"):
        params = reported_parameters()
        report = reported_parameter_example()
    else:
        raise UsageError("give --params FILE or --reported-example")
    out = report.to_dict()
    out[f"total_error_{n_gates}_gates"] = total_error_ohe(params, n_gates)
    _emit(cfg, _dumps(out))
    return 0


HANDLERS = {"compile": cmd_compile, "estimate": cmd_estimate, "sweep": cmd_sweep,
            "verify": cmd_verify, "physical": cmd_physical}


def run(cfg: RunConfig) -> int:
    return HANDLERS[cfg.command](cfg)


# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rqsp", description="Rydberg LCU/QSP compiler and resource estimator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt="json"):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=FORMATS, default=fmt)

    def hamiltonian(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--hamiltonian", metavar="FILE")
        g.add_argument("--heisenberg", type=int, metavar="N")

    def policy(sp):
        sp.add_argument("--epsilon", type=float, default=1e-3)
        sp.add_argument("--normalization", choices=("bond", "none"), default="bond")
        sp.add_argument("--pf-charge", choices=("composed", "literal"), default="composed")

    c = sub.add_parser("compile", help="compile a circuit and print its resource report")
    hamiltonian(c)
    c.add_argument("--plan", choices=tuple(_PLANS), default="grouped")
    c.add_argument("--circuit", choices=tuple(_CIRCUITS), default="walk")
    common(c)

    e = sub.add_parser("estimate", help="resource estimate for one simulation job")
    hamiltonian(e)
    t = e.add_mutually_exclusive_group()
    t.add_argument("--time", type=float)
    t.add_argument("--time-policy", default="4n")
    e.add_argument("--method", choices=METHODS, default="qsp")
    e.add_argument("--layout", metavar="FILE")
    policy(e)
    common(e)

    s = sub.add_parser("sweep", help="method comparison over a range of chain sizes")
    s.add_argument("--heisenberg-range", default="10:100:10")
    s.add_argument("--time-policy", default="4n")
    s.add_argument("--methods", nargs="+", choices=METHODS)
    s.add_argument("--gnuplot", action="store_true")
    policy(s)
    common(s, fmt="csv")

    v = sub.add_parser("verify", help="dense oracle check on a seeded random instance")
    v.add_argument("--check", choices=("block", "walk", "reflection", "qsp", "lr"),
                   default="block")
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--terms", type=int, default=4)
    v.add_argument("--k", type=int, default=4)
    v.add_argument("--phases", type=int, default=4)
    v.add_argument("--t", type=float, default=0.5)
    v.add_argument("--l-values", type=int, nargs="+")
    common(v)

    ph = sub.add_parser("physical", help="EIT error model report")
    g = ph.add_mutually_exclusive_group()
    g.add_argument("--params", metavar="FILE")
    g.add_argument("--reported-example", action="store_true")
    ph.add_argument("--n-gates", type=int, default=100)
    common(ph)
    return p


_INPUT_KEYS = ("hamiltonian", "layout", "params")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns).copy()
    command = d.pop("command")
    inputs = {k: d.pop(k) for k in _INPUT_KEYS if d.get(k) is not None}
    for k in _INPUT_KEYS:
        d.pop(k, None)
    out, seed, fmt = d.pop("out"), d.pop("seed"), d.pop("format")
    if command == "verify" and d.get("n") is None:
        d["n"] = 10 if d.get("check") == "lr" else 2
    options = {k: v for k, v in d.items() if v is not None}
    return RunConfig(command, inputs, out, seed, fmt, options)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(build_parser().parse_args(argv))
        return run(cfg)
    except VerificationFailure as exc:
        sys.stderr.write(f"verification-failure: {exc}\n")
        return 2
    except (UsageError, *INPUT_ERRORS) as exc:
        msg = str(exc).replace("\n", " ")
        sys.stderr.write(f"error: {type(exc).__name__}: {msg}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
