"""Command-line front end.

Subcommands ``thresholds``, ``fidelities``, ``verify``, ``mbqc-check`` and
``graph``.  Exit codes: 0 success, 1 verification failure, 2 bad
configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import analysis, verify
from .protocols import PROTOCOLS, get_protocol

DEFAULT_DEPTHS = {"deutsch": (0, 1, 2, 4, 7), "bennett": (0, 1, 2, 4, 7), "code-513": (0, 1, 2, 3)}
DEFAULT_TABLE_PROTOCOLS = ("deutsch", "code-513")
DEFAULT_NOISE_GRID = (0.01, 0.03, 0.05, 0.10)
GRAPH_CONSTANTS = (
    ("linear-cluster", analysis.QMIN_LINEAR_CLUSTER),
    ("ghz", analysis.QMIN_GHZ),
    ("linear-cluster-bit-flip", analysis.QMIN_BIT_FLIP),
)
CONFIG_KEYS = {
    "protocol", "depth", "noise_grid", "format", "seed", "convention", "out", "workers", "mode",
    "qmin", "curves", "construction", "inputs",
}


class ConfigError(ValueError):
    pass


# --- parsing --------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def read_config(path: str) -> dict[str, str]:
    """Plain ``key = value`` lines; ``#`` starts a comment; dashes and underscores are interchangeable."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; command-line flags take precedence")
    common.add_argument("--format", choices=("csv", "json", "table"), default=None)
    common.add_argument("--out", help="write output to FILE instead of stdout")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--protocol", default=None, help=f"one or more of {', '.join(PROTOCOLS)} (comma-separated)")
    model.add_argument("--depth", default=None, help="comma-separated concatenation depths")
    model.add_argument("--convention", choices=analysis.CONVENTIONS, default=None)
    model.add_argument("--mode", choices=("detect", "correct"), default=None, help="code-513 acceptance rule")

    parser = argparse.ArgumentParser(prog="mbpurify", description="Measurement-based entanglement purification workbench")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("thresholds", parents=[common, model], help="noise thresholds 1-p per protocol and depth")
    fid = sub.add_parser("fidelities", parents=[common, model], help="reachable fidelities over a noise grid")
    fid.add_argument("--noise-grid", dest="noise_grid", default=None, help="comma-separated 1-p values")
    ver = sub.add_parser("verify", parents=[common], help="noise-commutation and oracle suites")
    ver.add_argument("--inputs", type=int, default=None, help="random [[5,1,3]] oracle inputs")
    mb = sub.add_parser("mbqc-check", parents=[common], help="measurement-based layer invariants")
    mb.add_argument("--inputs", type=int, default=None, help="random read-in inputs")
    mb.add_argument("--construction", default=None, help="resource construction whose outcome table is used")
    gr = sub.add_parser("graph", parents=[common], help="graph-state thresholds from q_min constants")
    gr.add_argument("--qmin", default=None, help="comma-separated q_min values (replaces the built-in constants)")
    gr.add_argument("--curves", default=None, help="emit enumerator fidelity curves for N-vertex cluster and GHZ graphs")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags (flags win) into a validated run config."""
    cfg = {"format": "table", "seed": verify.DEFAULT_SEED, "workers": os.cpu_count() or 1,
           "convention": analysis.DEFAULT_CONVENTION, "mode": "detect"}
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for key, value in vars(args).items():
        if key not in ("config", "command") and value is not None:
            cfg[key] = value
    cfg["command"] = args.command
    if cfg["format"] not in ("csv", "json", "table"):
        raise ConfigError(f"unknown format {cfg['format']!r}")
    if cfg["convention"] not in analysis.CONVENTIONS:
        raise ConfigError(f"unknown convention {cfg['convention']!r}")
    if cfg["mode"] not in ("detect", "correct"):
        raise ConfigError(f"unknown mode {cfg['mode']!r}")
    for key in ("seed", "workers", "inputs", "curves"):
        if key in cfg:
            try:
                cfg[key] = int(cfg[key])
            except ValueError:
                raise ConfigError(f"{key} must be an integer") from None
    if cfg["workers"] < 1:
        raise ConfigError("workers must be positive")
    protocols = cfg.get("protocol")
    protocols = list(DEFAULT_TABLE_PROTOCOLS) if protocols is None else [p.strip() for p in str(protocols).split(",")]
    for p in protocols:
        if p not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {p!r}; choose from {', '.join(PROTOCOLS)}")
    cfg["protocol"] = protocols
    if "depth" in cfg:
        depths = _int_list(cfg["depth"])
        if any(d < 0 for d in depths):
            raise ConfigError("depths must be non-negative")
        cfg["depth"] = depths
    grid = _float_list(cfg["noise_grid"]) if "noise_grid" in cfg else list(DEFAULT_NOISE_GRID)
    if any(not 0.0 <= g <= 1.0 for g in grid):
        raise ConfigError("noise grid values must lie in [0, 1]")
    cfg["noise_grid"] = grid
    if "qmin" in cfg:
        qs = _float_list(cfg["qmin"])
        if any(not 0.0 < q < 1.0 for q in qs):
            raise ConfigError("q_min values must lie in (0, 1)")
        cfg["qmin"] = qs
    return cfg


# --- work items -------------------------------------------------------------------


def _threshold_job(job):
    protocol, depth, convention, mode = job
    return analysis.threshold(protocol, depth, convention, mode)


def _fidelity_job(job):
    protocol, depth, one_minus_p, convention, mode = job
    spec = analysis.NoisyProtocolSpec(protocol, depth, 1.0 - one_minus_p, convention, mode)
    return analysis.reachable_fidelity_record(spec)


def _pmap(fn, jobs, workers):
    if workers == 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


def _depths(cfg, protocol):
    return cfg.get("depth") or list(DEFAULT_DEPTHS[protocol])


def cmd_thresholds(cfg) -> list[dict]:
    jobs = [(p, d, cfg["convention"], cfg["mode"]) for p in cfg["protocol"] for d in _depths(cfg, p)]
    values = _pmap(_threshold_job, jobs, cfg["workers"])
    rows = [
        {"protocol": p, "depth": d, "mapping": get_protocol(p, d).mapping, "threshold": v}
        for (p, d, _, _), v in zip(jobs, values)
    ]
    rows.append({"protocol": "asymptotic", "depth": None, "mapping": "inf->1",
                 "threshold": 1.0 - analysis.asymptotic_threshold_bipartite()})
    return rows


def cmd_fidelities(cfg) -> list[dict]:
    jobs = [
        (p, d, g, cfg["convention"], cfg["mode"])
        for p in cfg["protocol"] for d in _depths(cfg, p) for g in cfg["noise_grid"]
    ]
    recs = _pmap(_fidelity_job, jobs, cfg["workers"])
    rows = []
    for (p, d, g, _, _), rec in zip(jobs, recs):
        rec = rec or {}
        rows.append({
            "protocol": p,
            "mapping": get_protocol(p, d).mapping,
            "one_minus_p": g,
            "fixed_point_fidelity": rec.get("fixed_point_fidelity"),
            "success_prob_round1": rec.get("success_prob_round1"),
            "rounds_to_converge": rec.get("rounds_to_converge"),
        })
    return rows


def linear_cluster(n: int) -> np.ndarray:
    a = np.zeros((n, n), dtype=int)
    for k in range(n - 1):
        a[k, k + 1] = a[k + 1, k] = 1
    return a


def star_graph(n: int) -> np.ndarray:
    """GHZ state up to local unitaries."""
    a = np.zeros((n, n), dtype=int)
    a[0, 1:] = a[1:, 0] = 1
    return a


def cmd_graph(cfg) -> list[dict]:
    consts = list(GRAPH_CONSTANTS)
    if "qmin" in cfg:
        consts = [(f"q{k}", q) for k, q in enumerate(cfg["qmin"])]
    rows = []
    for name, q in consts:
        p_min = analysis.graph_threshold_from_qmin(q)
        rows.append({"graph": name, "q_min": q, "p_min": p_min, "one_minus_p": 1.0 - p_min})
    n = cfg.get("curves")
    if n:
        grid = np.round(np.linspace(0.5, 1.0, 26), 10)
        for name, adj in (("linear-cluster", linear_cluster(n)), ("ghz", star_graph(n))):
            for p in grid:
                rows.append({"graph": f"{name}-{n}", "p": float(p), "fidelity": analysis.graph_fidelity_lwn(adj, float(p))})
    return rows


# --- rendering --------------------------------------------------------------------


def _pct(v):
    return "n/a" if v is None else f"{100 * v:.1f}"


def render_records(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    fields = []
    for r in rows:
        fields += [k for k in r if k not in fields]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: "" if r.get(k) is None else repr(r[k]) if isinstance(r.get(k), float) else r.get(k) for k in fields})
        return buf.getvalue()
    raise ValueError(fmt)


def _aligned(header: list[str], body: list[list[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *body)]
    fmt = " | ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), "-+-".join("-" * w for w in widths)]
    lines += [fmt.format(*row) for row in body]
    return "\n".join(lines) + "\n"


def render_table(command: str, rows: list[dict]) -> str:
    if command == "thresholds":
        body = [[r["protocol"], "" if r["depth"] is None else str(r["depth"]), r["mapping"], _pct(r["threshold"])]
                for r in rows]
        return _aligned(["protocol", "depth", "mapping", "threshold %"], body)
    if command == "fidelities":
        grid = list(dict.fromkeys(r["one_minus_p"] for r in rows))
        cells: dict[tuple, dict] = {}
        for r in rows:
            cells.setdefault((r["protocol"], r["mapping"]), {})[r["one_minus_p"]] = r["fixed_point_fidelity"]
        header = ["protocol", "mapping"] + [f"1-p={100 * g:g}%" for g in grid]
        body = [[p, m] + [_pct(c.get(g)) for g in grid] for (p, m), c in cells.items()]
        return _aligned(header, body)
    if command == "graph":
        consts = [r for r in rows if "q_min" in r]
        out = _aligned(["graph", "q_min", "p_min", "1-p %"],
                       [[r["graph"], f"{r['q_min']:g}", f"{r['p_min']:.4f}", _pct(r["one_minus_p"])] for r in consts])
        curves = [r for r in rows if "fidelity" in r]
        if curves:
            out += "\n" + _aligned(["graph", "p", "fidelity"], [[r["graph"], f"{r['p']:.2f}", f"{r['fidelity']:.6f}"] for r in curves])
        return out
    raise ValueError(command)


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        return render_records(report["checks"], "csv")
    body = [[c["name"], "pass" if c["passed"] else "FAIL",
             "-" if c["max_deviation"] is None else f"{c['max_deviation']:.3e}", str(c["cases"])]
            for c in report["checks"]]
    status = "all checks passed" if report["passed"] else "verification FAILED"
    return _aligned(["check", "result", "max deviation", "cases"], body) + f"{report['suite']} seed={report['seed']}: {status}\n"


def run(cfg: dict) -> tuple[str, int]:
    command = cfg["command"]
    if command in ("verify", "mbqc-check"):
        if command == "verify":
            report = verify.run_verify(cfg["seed"], code_inputs=cfg.get("inputs", 3))
        else:
            report = verify.run_mbqc_check(cfg["seed"], cfg.get("inputs", 50), cfg.get("construction", "jamiolkowski"))
        fmt = cfg["format"] if cfg.get("_format_given") else "json"
        return render_report(report, fmt), 0 if report["passed"] else 1
    rows = {"thresholds": cmd_thresholds, "fidelities": cmd_fidelities, "graph": cmd_graph}[command](cfg)
    if cfg["format"] == "table":
        return render_table(command, rows), 0
    return render_records(rows, cfg["format"]), 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        cfg["_format_given"] = args.format is not None or (args.config and "format" in read_config(args.config))
        text, code = run(cfg)
    except (ConfigError, analysis.BracketError) as exc:
        print(f"mbpurify: error: {exc}", file=sys.stderr)
        return 2
    if cfg.get("out"):
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
