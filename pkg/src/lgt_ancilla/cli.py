"""Scenario runner.

A scenario is an INI-style file::

    [system]
    group = Z2
    lattice = 2x2
    boundary = open

    [state]
    kind = product            # product | staggered_vacuum | random | random_gauge_invariant
    seed = 7                  # random kinds only
    links = e                 # product: default link element or "singlet"
    link_states = (0,0,1)=a; (1,0,2)=a
    occupied = (0,0); (1,1)

    [couplings]
    lambda_gm = 1.0
    lambda_b = 1.0

    [request plaq]
    kind = wilson             # wilson | meson | hamiltonian
    loop = rect:(0,0,1,1)
    mode = measure            # measure | excite

    [request m1]
    kind = meson
    path = auto:(0,0)->(1,0)
    which = M                 # M | M' | meson

Requests run in file order.  All sections are validated, and the Hilbert
space size is checked, before any state is allocated.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import re
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .gauge_ops import gauge_project
from .group import build_group
from .hilbert import DimensionError, MAX_DIM, build_layout, embed, prepare_state, random_state, required_dim
from .lattice import build_lattice, format_path, parse_loop, parse_path
from .protocols import compile_meson, compile_wilson, execute, parse_schedule, run_hamiltonian, run_meson, run_wilson
from .protocols.execute import ExcitationResult

DEFAULT_TOLERANCE = 1e-10
STATE_KINDS = ("product", "staggered_vacuum", "random", "random_gauge_invariant")


class ConfigError(ValueError):
    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + msg)


@dataclass
class Request:
    rid: str
    kind: str
    spec: str = ""
    mode: str = "measure"
    which: str = "M"
    line: int | None = None


@dataclass
class ScenarioConfig:
    group: str
    lattice: tuple[int, int]
    boundary: str = "open"
    state: dict = field(default_factory=dict)
    couplings: dict = field(default_factory=dict)
    requests: list[Request] = field(default_factory=list)
    crosscheck: bool = False
    source: str = ""

    def echo(self) -> dict:
        return {
            "group": self.group,
            "lattice": f"{self.lattice[0]}x{self.lattice[1]}",
            "boundary": self.boundary,
            "state": {k: v for k, v in self.state.items() if not k.startswith("_")},
            "couplings": self.couplings,
            "requests": [
                {"id": r.rid, "kind": r.kind, "spec": r.spec, "mode": r.mode, "which": r.which} for r in self.requests
            ],
        }


# ------------------------------------------------------------------ parsing


def _key_lines(text: str) -> dict[tuple[str, str], tuple[int, int]]:
    """Line and column of every ``key = value`` entry, keyed by (section, key)."""
    out: dict[tuple[str, str], tuple[int, int]] = {}
    section = ""
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("["):
            section = line.strip("[]").strip()
            out[(section, "")] = (n, 1)
        elif "=" in line and not line.startswith(("#", ";")):
            key = line.split("=", 1)[0].strip().lower()
            col = raw.index("=") + 2
            out[(section, key)] = (n, col)
    return out


def _strip_comment(value: str) -> str:
    return re.split(r"\s+#", value, maxsplit=1)[0].strip()


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    """Parse and validate a scenario; errors carry line and column."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("expected 'key = value' or a [section] header", lineno) from None
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None)) from None
    lines = _key_lines(text)

    def where(section: str, key: str = "") -> tuple[int | None, int | None]:
        return lines.get((section, key), (None, None))

    def get(section: str, key: str, default=None, required: bool = False) -> str | None:
        if not parser.has_option(section, key):
            if required:
                raise ConfigError(f"[{section}] missing required key {key!r}", where(section)[0])
            return default
        return _strip_comment(parser.get(section, key))

    if not parser.has_section("system"):
        raise ConfigError("missing [system] section")
    group = get("system", "group", required=True)
    try:
        build_group(group)
    except ValueError as exc:
        raise ConfigError(str(exc), *where("system", "group")) from None
    lat = get("system", "lattice", required=True)
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", lat)
    if not m:
        raise ConfigError(f"lattice must look like 3x3, got {lat!r}", *where("system", "lattice"))
    boundary = get("system", "boundary", "open")
    if boundary not in ("open", "periodic"):
        raise ConfigError(f"boundary must be open or periodic, got {boundary!r}", *where("system", "boundary"))
    crosscheck = get("system", "crosscheck", "no").lower() in ("1", "yes", "true", "on")

    cfg = ScenarioConfig(group, (int(m.group(1)), int(m.group(2))), boundary, crosscheck=crosscheck, source=source)
    try:
        geo = build_lattice(*cfg.lattice, boundary)
    except ValueError as exc:
        raise ConfigError(str(exc), *where("system", "lattice")) from None

    state = dict(parser.items("state")) if parser.has_section("state") else {}
    state = {k: _strip_comment(v) for k, v in state.items()}
    state.setdefault("kind", "product")
    if state["kind"] not in STATE_KINDS:
        raise ConfigError(f"state kind must be one of {STATE_KINDS}, got {state['kind']!r}", *where("state", "kind"))
    if "seed" in state:
        try:
            state["seed"] = int(state["seed"])
        except ValueError:
            raise ConfigError(f"seed must be an integer, got {state['seed']!r}", *where("state", "seed")) from None
    cfg.state = state
    try:
        _state_spec(cfg, geo)
    except (ValueError, KeyError, IndexError) as exc:
        raise ConfigError(f"bad state: {exc}", *where("state")) from None

    if parser.has_section("couplings"):
        for key in parser.options("couplings"):
            try:
                cfg.couplings[key] = float(get("couplings", key))
            except ValueError:
                raise ConfigError(f"coupling {key} must be a number", *where("couplings", key)) from None
        unknown = set(cfg.couplings) - {"lambda_gm", "lambda_b"}
        if unknown:
            raise ConfigError(f"unknown couplings {sorted(unknown)}", *where("couplings"))

    for section in parser.sections():
        if section in ("system", "state", "couplings"):
            continue
        m = re.fullmatch(r"request\s+(\S+)", section)
        if not m:
            raise ConfigError(f"unknown section [{section}]", *where(section))
        rid = m.group(1)
        if any(r.rid == rid for r in cfg.requests):
            raise ConfigError(f"duplicate request id {rid!r}", *where(section))
        kind = get(section, "kind", required=True)
        req = Request(rid, kind, line=where(section)[0])
        req.mode = get(section, "mode", "measure")
        req.which = get(section, "which", "M")
        if req.mode not in ("measure", "excite"):
            raise ConfigError(f"mode must be measure or excite, got {req.mode!r}", *where(section, "mode"))
        try:
            if kind == "wilson":
                req.spec = get(section, "loop", required=True)
                parse_loop(geo, req.spec)
            elif kind == "meson":
                req.spec = get(section, "path", required=True)
                path = parse_path(geo, req.spec)
                if req.which not in ("M", "M'", "meson"):
                    raise ConfigError(f"which must be M, M' or meson, got {req.which!r}", *where(section, "which"))
                if path.start == path.end:
                    raise ValueError("meson endpoints must differ")
                if req.mode == "excite" and req.which == "meson":
                    raise ValueError("excitation needs which = M or M'")
            elif kind == "hamiltonian":
                if req.mode != "measure":
                    raise ValueError("hamiltonian requests only support mode = measure")
            else:
                raise ConfigError(f"request kind must be wilson, meson or hamiltonian, got {kind!r}", *where(section, "kind"))
        except ConfigError:
            raise
        except ValueError as exc:
            key = {"wilson": "loop", "meson": "path"}.get(kind, "kind")
            raise ConfigError(f"request {rid}: {exc}", *where(section, key)) from None
        cfg.requests.append(req)
    return cfg


def load_config(path: str) -> ScenarioConfig:
    with open(path) as fh:
        return parse_config(fh.read(), source=path)


# ------------------------------------------------------------------ execution


def _tuple(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.strip().strip("()").split(","))


def _state_spec(cfg: ScenarioConfig, geo) -> dict | str:
    """Translate the [state] section into a ``prepare_state`` spec (product kinds only)."""
    st = cfg.state
    if st["kind"] == "staggered_vacuum":
        return "staggered_vacuum"
    if st["kind"] != "product":
        if "seed" not in st:
            raise ValueError(f"{st['kind']} needs a seed")
        return {}
    spec: dict = {}
    if st.get("links"):
        spec["links"] = st["links"]
    if st.get("link_states"):
        spec["link_states"] = {}
        for item in st["link_states"].split(";"):
            if item.strip():
                link, val = item.split("=")
                spec["link_states"][geo.canonical_link(_tuple(link))] = val.strip()
    if st.get("occupied"):
        spec["occupied"] = {}
        for item in st["occupied"].split(";"):
            if item.strip():
                v = geo.normalize(_tuple(item))
                spec["occupied"][v] = "full"
    # validate element names and links eagerly
    group = build_group(cfg.group)
    for val in [spec.get("links")] + list(spec.get("link_states", {}).values()):
        if val is not None and str(val).lower() not in ("singlet", "0"):
            group.element(val)
    for link in spec.get("link_states", {}):
        geo.link_index(link)
    return spec


def build_system(cfg: ScenarioConfig, seed: int | None = None):
    """Group, geometry and initial physical state.  The size guard runs first."""
    group = build_group(cfg.group)
    geo = build_lattice(*cfg.lattice, cfg.boundary)
    n_anc = 1 if cfg.requests else 0
    need = required_dim(group, geo, n_anc)
    if need > MAX_DIM:
        raise DimensionError(need, MAX_DIM, f"{cfg.group} on {cfg.lattice[0]}x{cfg.lattice[1]} with ancilla")
    layout = build_layout(group, geo, False)
    kind = cfg.state["kind"]
    if kind in ("random", "random_gauge_invariant"):
        s = cfg.state["seed"] if seed is None else seed
        state = random_state(layout, s)
        if kind == "random_gauge_invariant":
            state = gauge_project(state)
    else:
        state = prepare_state(layout, _state_spec(cfg, geo))
    return group, geo, state


def run_request(req: Request, state, geo, couplings: dict, crosscheck: bool) -> dict:
    rec = {"id": req.rid, "kind": req.kind, "spec": req.spec, "mode": req.mode}
    if req.kind == "wilson":
        res = run_wilson(state, parse_loop(geo, req.spec), req.mode, crosscheck)
    elif req.kind == "meson":
        rec["which"] = req.which
        path = parse_path(geo, req.spec)
        rec["spec"] = format_path(path) if req.spec.startswith("auto") else req.spec
        res = run_meson(state, path, req.which, req.mode, crosscheck)
    else:
        rec["spec"] = f"lambda_gm={couplings.get('lambda_gm', 0.0)} lambda_b={couplings.get('lambda_b', 0.0)}"
        res = run_hamiltonian(state, couplings.get("lambda_gm", 0.0), couplings.get("lambda_b", 0.0), crosscheck)
    if isinstance(res, ExcitationResult):
        # an excitation is summarized by its norm; agreement is the vector residual
        rec.update(value_re=res.norm, value_im=0.0, norm=res.norm, gate_count=res.gate_count)
        rec["ancilla_overlap"] = res.ancilla_overlap
        if crosscheck:
            rec.update(oracle_re=res.norm, oracle_im=0.0, difference=res.residual)
        rec["wall_time"] = res.wall_time
        return rec
    rec.update(value_re=res.value.real, value_im=res.value.imag, norm=res.norm, gate_count=res.gate_count)
    if crosscheck:
        rec.update(oracle_re=complex(res.oracle).real, oracle_im=complex(res.oracle).imag, difference=res.difference)
    rec["wall_time"] = res.wall_time
    return rec


def run_scenario(cfg: ScenarioConfig, seed: int | None = None, crosscheck: bool = False, parallel: bool = False) -> dict:
    """Execute every request; returns the output document."""
    crosscheck = crosscheck or cfg.crosscheck
    _, geo, state = build_system(cfg, seed)
    if parallel and len(cfg.requests) > 1:
        with ThreadPoolExecutor() as pool:
            futures = [pool.submit(run_request, r, state.copy(), geo, cfg.couplings, crosscheck) for r in cfg.requests]
            records = [f.result() for f in futures]
    else:
        records = [run_request(r, state, geo, cfg.couplings, crosscheck) for r in cfg.requests]
    eff_seed = seed if seed is not None else cfg.state.get("seed")
    return {"config": cfg.echo(), "seed": eff_seed, "crosscheck": crosscheck, "results": records}


def export_schedule(cfg: ScenarioConfig, rid: str) -> str:
    """Wire-format gate schedule of one request."""
    match = [r for r in cfg.requests if r.rid == rid]
    if not match:
        raise KeyError(f"unknown request id {rid!r}")
    req = match[0]
    geo = build_lattice(*cfg.lattice, cfg.boundary)
    if req.kind == "wilson":
        sched = compile_wilson(parse_loop(geo, req.spec), req.mode)
    elif req.kind == "meson":
        if req.which == "meson":
            raise ValueError("schedules hold one Hermitian part; use which = M or M'")
        sched = compile_meson(parse_path(geo, req.spec), req.which, req.mode)
    else:
        raise ValueError("hamiltonian requests expand to many schedules; export individual terms")
    sched.header = {
        "group": cfg.group,
        "lattice": f"{cfg.lattice[0]}x{cfg.lattice[1]} {cfg.boundary}",
        "request": f"{req.rid} {req.kind} {req.spec} mode={req.mode}" + (f" which={req.which}" if req.kind == "meson" else ""),
    }
    return sched.to_text()


def replay_schedule(text: str, state):
    """Parse an exported schedule and run it on a fresh embedding of ``state``."""
    return execute(parse_schedule(text), embed(state))


# ------------------------------------------------------------------ output

CSV_FIELDS = [
    "id", "kind", "spec", "mode", "which", "value_re", "value_im", "oracle_re", "oracle_im",
    "difference", "norm", "gate_count", "ancilla_overlap", "wall_time",
]


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for rec in doc["results"]:
        w.writerow({k: ("" if rec.get(k) is None else rec.get(k, "")) for k in CSV_FIELDS})
    return buf.getvalue()


def _write_atomic(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def all_agree(doc: dict, tolerance: float) -> bool:
    diffs = [r.get("difference") for r in doc["results"] if "difference" in r]
    return all(d is not None and d < tolerance for d in diffs)


# ------------------------------------------------------------------ self test


def selftest(out=None) -> bool:
    """Small embedded invariant suite; prints one line per check."""
    out = out or sys.stdout
    import numpy as np

    from .fermions import dense_mode_operators
    from .lattice import rectangle_loop, shortest_path
    from .protocols import stator_residual

    checks = []
    for label in ("Z2", "Z3", "S3"):
        g = build_group(label)
        g.check_axioms()
        worst = max(g.rep_residuals().values())
        checks.append((f"group {label} axioms and representation", worst < 1e-12))
    ops = dense_mode_operators(4)
    eye = np.eye(16)
    bad = 0.0
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            bad = max(bad, np.abs(a @ b + b @ a).max(), np.abs(a @ b.conj().T + b.conj().T @ a - (i == j) * eye).max())
    checks.append(("anticommutation on 4 modes", bad == 0.0))
    for label in ("Z2", "S3"):
        geo = build_lattice(2, 2)
        lay = build_layout(build_group(label), geo, False)
        psi = random_state(lay, 0)
        loop = rectangle_loop(geo, (0, 0), 1, 1)
        checks.append((f"stator residual {label} plaquette", stator_residual(psi, loop) < 1e-12))
        r = run_meson(psi, shortest_path(geo, (0, 0), (1, 1)), "meson")
        checks.append((f"meson protocol vs oracle {label}", r.difference < 1e-10))
    ok = True
    for name, passed in checks:
        out.write(f"{'PASS' if passed else 'FAIL'}  {name}\n")
        ok &= passed
    return ok


# ------------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lgt-ancilla", description="Run ancilla measurement scenarios on lattice gauge states.")
    p.add_argument("--config", help="scenario file")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, help="override the state seed")
    p.add_argument("--check-oracle", action="store_true", help="cross-check every request against the direct oracle")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE, help="agreement bound for the exit status")
    p.add_argument("--export-schedule", metavar="ID", help="write the gate schedule of one request instead of running")
    p.add_argument("--parallel", action="store_true", help="run requests concurrently on cloned states")
    p.add_argument("--selftest", action="store_true", help="run the embedded invariant checks")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.selftest:
        return 0 if selftest() else 1
    if not args.config:
        print("error: --config is required", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        if args.export_schedule:
            _write_atomic(args.out, export_schedule(cfg, args.export_schedule))
            return 0
        doc = run_scenario(cfg, args.seed, args.check_oracle, args.parallel)
    except (ConfigError, DimensionError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return 2
    doc["tolerance"] = args.tolerance
    _write_atomic(args.out, to_json(doc) if args.format == "json" else to_csv(doc))
    return 0 if all_agree(doc, args.tolerance) else 1


if __name__ == "__main__":
    sys.exit(main())
