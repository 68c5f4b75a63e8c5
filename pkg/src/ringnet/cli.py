"""``ringnet`` command-line front end.

Every subcommand fills one :class:`Report`; the text and JSON renderers print
the same verdicts, matrices and sets from it.  State and control values on
the command line use the DSL literal convention: ``0`` is the zero label,
other numbers are labels.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import __version__
from .decompose import (
    LinearNetwork,
    combined_control_verdicts,
    linear_controllability,
    product_network,
    verify_decomposition,
)
from .dsl import format_network, parse_network, parse_network_file, resolve_ring
from .errors import AssrMismatchError, BudgetExceeded, DslError, RingNetError, VerificationError
from .network import (
    attractors,
    compile_assr,
    control_fixed_points,
    controllability,
    default_budget,
    fixed_points,
    is_control,
    observability,
    stabilizable_to,
    state_labels,
    synchronizable,
    trajectory,
)
from .represent import represent_network
from .ring import dump_rings, enumerate_rings, find_isomorphisms, load_rings, verify
from .stp import LogicalMatrix

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str]
    fmt: str = "text"
    budget: int = 10**6
    steps: int = 10
    seed: int = 0
    fail_on_negative: bool = True
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.fmt not in ("text", "json"):
            raise ValueError("format must be text or json")


@dataclass
class Report:
    command: str
    verdicts: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)
    errata: list = field(default_factory=list)
    text: list = field(default_factory=list)  # free-form blocks (DSL, serialized rings, tables)
    negative: bool = False
    mismatch: bool = False

    def as_json(self) -> dict:
        out = {"command": self.command, "verdicts": self.verdicts, "matrices": self.matrices, "sets": self.sets, "errata": self.errata}
        if self.text:
            out["text"] = self.text
        return out

    def render_text(self) -> str:
        lines = [f"# {self.command}"]
        for block in self.text:
            lines.append(block.rstrip("\n"))
        for k, v in self.verdicts.items():
            lines.append(f"{k}: {_fmt_value(v)}")
        for k, v in self.matrices.items():
            lines.append(f"{k} = {v}")
        for k, v in self.sets.items():
            lines.append(f"{k}: {_fmt_value(v)}")
        for e in self.errata:
            lines.append(f"note: {e}")
        return "\n".join(lines) + "\n"


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt_value(x)}" for k, x in v.items()) + "}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


# ---------------------------------------------------------------------------
# helpers


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _lit(label: int, k: int) -> int:
    return 0 if label == k else label


def _state_text(labels, k) -> str:
    return "(" + ",".join(str(_lit(v, k)) for v in labels) + ")"


def _parse_labels(text: str, k: int, width: int, what: str) -> tuple[int, ...]:
    try:
        vals = [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise DslError(f"{what} must be comma-separated integers, got {text!r}") from None
    if len(vals) != width:
        raise DslError(f"{what} needs {width} values, got {len(vals)}")
    for v in vals:
        if not 0 <= v < k:
            raise DslError(f"{what} value {v} outside [0, {k - 1}]")
    return tuple(v if v else k for v in vals)


def _bool_rows(C: np.ndarray) -> list[str]:
    return ["".join("1" if b else "0" for b in row) for row in C]


# ---------------------------------------------------------------------------
# subcommands


def cmd_ring_verify(cfg: RunConfig) -> Report:
    rep = Report("ring verify")
    rings = load_rings(_read(cfg.inputs[0]), check=False)
    all_ok = True
    for i, R in enumerate(rings, 1):
        ax = verify(R)
        key = R.name or f"ring{i}"
        rep.verdicts[key] = {**ax.as_dict(), "commutative_ring": ax.is_commutative_ring}
        all_ok &= ax.is_commutative_ring
    rep.negative = not all_ok
    return rep


def cmd_ring_enum(cfg: RunConfig) -> Report:
    k = int(cfg.inputs[0])
    rep = Report("ring enum")
    rings = enumerate_rings(k, time_budget=cfg.options.get("time_budget"))
    rep.verdicts["count"] = len(rings)
    rep.text.append(dump_rings(rings))
    for R in rings:
        rep.matrices[f"{R.name}.add"] = repr(R.add)
        rep.matrices[f"{R.name}.mul"] = repr(R.mul)
    return rep


def cmd_ring_iso(cfg: RunConfig) -> Report:
    R = load_rings(_read(cfg.inputs[0]))[0]
    S = load_rings(_read(cfg.inputs[1]))[0]
    isos = find_isomorphisms(R, S)
    rep = Report("ring iso")
    rep.verdicts["isomorphic"] = bool(isos)
    rep.sets["isomorphisms"] = [list(p) for p in isos]
    rep.negative = not isos
    return rep


def _load_net(path: str):
    return parse_network_file(path)


def cmd_net_compile(cfg: RunConfig) -> Report:
    net = _load_net(cfg.inputs[0])
    A = compile_assr(net, cfg.budget, cross_check=cfg.options.get("cross_check", False))
    rep = Report("net compile")
    rep.matrices["L" if is_control(net) else "M"] = repr(A.M)
    for v, c in enumerate(A.components):
        rep.matrices[f"{net.state_names[v]}"] = repr(c)
    if A.output is not None:
        rep.matrices["E"] = repr(A.output)
    return rep


def cmd_net_simulate(cfg: RunConfig) -> Report:
    net = _load_net(cfg.inputs[0])
    k = net.ring.k
    x0 = cfg.options.get("x0")
    if x0 is None:
        raise DslError("simulate needs --x0")
    x0 = _parse_labels(x0, k, net.n, "--x0")
    controls = None
    if is_control(net) and net.m:
        us = cfg.options.get("u") or []
        if len(us) == 1 and ";" in us[0]:
            us = us[0].split(";")
        if not us:
            raise DslError("a control network needs --u values")
        parsed = [_parse_labels(u, k, net.m, "--u") for u in us]
        controls = [parsed[t % len(parsed)] for t in range(cfg.steps)]  # cycle the given inputs
    A = compile_assr(net, cfg.budget)
    traj = trajectory(A, x0, controls, cfg.steps)
    rep = Report("net simulate")
    rows = []
    header = "t  index  " + " ".join(net.state_names)
    table = [header]
    for t, s in enumerate(traj):
        labels = state_labels(s, k, net.n)
        rows.append({"t": t, "index": s, "state": [_lit(v, k) for v in labels]})
        table.append(f"{t:<2} {s:<6} " + " ".join(str(_lit(v, k)) for v in labels))
    rep.text.append("\n".join(table))
    rep.sets["trajectory"] = rows
    return rep


def cmd_net_analyze(cfg: RunConfig) -> Report:
    net = _load_net(cfg.inputs[0])
    k, n = net.ring.k, net.n
    A = compile_assr(net, cfg.budget)
    rep = Report("net analyze")
    if not is_control(net) or net.m == 0:
        fps = fixed_points(A.M)
        rep.verdicts["fixed_point_count"] = len(fps)
        rep.sets["fixed_points"] = [{"index": s, "state": _state_text(state_labels(s, k, n), k)} for s in fps]
        rep.sets["attractors"] = [{"cycle": a.cycle, "basin_size": a.basin_size} for a in attractors(A.M)]
        return rep
    ctrl = controllability(A)
    cfps = control_fixed_points(A)
    rep.verdicts["completely_controllable"] = ctrl.complete
    rep.sets["control_fixed_points"] = cfps
    rep.sets["globally_reachable"] = ctrl.reachable
    rep.sets["stabilizable_to"] = [s for s in cfps if stabilizable_to(A, s)]
    rep.sets["synchronizable_to"] = [_state_text(t, k) for t in synchronizable(A, n, k)]
    if cfg.options.get("show_closure"):
        rep.sets["controllability_rows"] = _bool_rows(ctrl.C)
    if net.p:
        obs = observability(A, A.output, budget=cfg.budget)
        rep.verdicts["observable"] = obs.observable
        rep.sets["indistinguishable_pairs"] = [list(p) for p in obs.indistinguishable]
    rep.negative = not ctrl.complete
    return rep


def cmd_decompose(cfg: RunConfig) -> Report:
    net = _load_net(cfg.inputs[0])
    res = verify_decomposition(net, cfg.budget, cross_check=cfg.options.get("cross_check", False))
    rep = Report("decompose")
    for i, f in enumerate(res.factor_networks, 1):
        rep.text.append(f"## factor {i}\n" + format_network(f))
        rep.matrices[f"M{i}"] = repr(res.factor_assrs[i - 1].M)
    rep.matrices["M"] = repr(res.original)
    rep.matrices["M_star"] = repr(res.combined)
    rep.verdicts["recombined_equals_direct"] = res.equal
    rep.verdicts.update(res.verdicts)
    if is_control(net) and net.m:
        v = combined_control_verdicts(net, "controllable", budget=cfg.budget)
        rep.verdicts["completely_controllable"] = v.combined
        if v.direct is not None and not v.agrees:
            rep.errata.append("factor-wise and direct controllability differ (reachability times can disagree between factors)")
        if net.p:
            o = combined_control_verdicts(net, "observable", budget=cfg.budget)
            rep.verdicts["observable"] = o.combined
            rep.sets["indistinguishable_pairs"] = [list(p) for p in o.details["pairs"]]
            if o.direct is not None and not o.agrees:
                rep.mismatch = True
                rep.errata.append("factor-wise and direct observability differ")
    rep.mismatch |= not res.equal
    return rep


def cmd_product(cfg: RunConfig) -> Report:
    n1, n2 = _load_net(cfg.inputs[0]), _load_net(cfg.inputs[1])
    P = product_network(n1, n2)
    rep = Report("product")
    rep.text.append(format_network(P))
    res = verify_decomposition(P, cfg.budget)
    rep.verdicts["factors_recovered"] = all(
        a.M == b.M for a, b in zip(res.factor_assrs, (compile_assr(n1, cfg.budget), compile_assr(n2, cfg.budget)))
    )
    rep.mismatch = not rep.verdicts["factors_recovered"]
    return rep


def cmd_represent(cfg: RunConfig) -> Report:
    src = cfg.inputs[0]
    nodes = cfg.options.get("nodes")
    if os.path.exists(src):
        source = _load_net(src)
        if is_control(source):
            raise DslError("represent takes an autonomous network or a transition matrix")
    else:
        try:
            source = LogicalMatrix.parse(src)
        except ValueError as exc:
            raise DslError(f"{src!r} is neither a file nor a matrix like d6[4,6,1,3,2,5]: {exc}") from None
    res = represent_network(source, nodes)
    rep = Report("represent")
    rep.text.append(format_network(res.network))
    rep.matrices["source"] = repr(res.source)
    rep.matrices["recompiled"] = repr(res.assr.M)
    rep.verdicts["verified"] = res.verified
    again = compile_assr(parse_network(format_network(res.network)), cfg.budget)
    rep.verdicts["reparsed_verified"] = again.M == res.source
    rep.mismatch = not (res.verified and rep.verdicts["reparsed_verified"])
    return rep


# -- linear files -----------------------------------------------------------


def parse_linear(text: str, base_dir: str | None = None) -> LinearNetwork:
    """``linear ring=<decl> n=<n> m=<m> p=<p> [@crt]`` header, then ``A = [[..]]``, ``B``, ``C`` rows.

    Entries follow the DSL literal rule: over a prime field they are residues,
    over a product ring they are labels (``0`` is the zero), and ``@crt``
    reads them as residues mod |R| mapped through the CRT isomorphism.
    ``n``, ``m``, ``p`` are optional; when given they are checked.
    """
    header = None
    mats: dict[str, Any] = {}
    where: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            words = line.split()
            if words[0] != "linear":
                raise DslError("first line must start with 'linear'", lineno, 1)
            header = {"crt": False, "line": lineno}
            for w in words[1:]:
                key, eq, val = w.partition("=")
                if w == "@crt":
                    header["crt"] = True
                elif eq and key == "ring":
                    header["ring"] = val
                elif eq and key in ("n", "m", "p"):
                    if not val.isdigit():
                        raise DslError(f"{key} must be a non-negative integer", lineno, 1)
                    header[key] = int(val)
                else:
                    raise DslError(f"unknown header field {w!r}", lineno, 1)
            if "ring" not in header:
                raise DslError("header needs ring=<decl>", lineno, 1)
            continue
        name, eq, rhs = line.partition("=")
        name = name.strip()
        if not eq or name not in ("A", "B", "C"):
            raise DslError(f"expected A = ..., B = ... or C = ..., found {line!r}", lineno, 1)
        if name in mats:
            raise DslError(f"{name} given twice", lineno, 1)
        try:
            mats[name] = json.loads(rhs)
        except json.JSONDecodeError as exc:
            raise DslError(f"{name} is not a nested list: {exc.msg}", lineno, len(name) + 3 + exc.colno) from None
        if not isinstance(mats[name], list) or not all(isinstance(r, list) and all(isinstance(v, int) for v in r) for r in mats[name]):
            raise DslError(f"{name} must be a list of integer rows", lineno, 1)
        where[name] = lineno
    if header is None:
        raise DslError("empty linear file", 1, 1)
    if "A" not in mats:
        raise DslError("A is required", header["line"], 1)
    decl = header["ring"] + (" @crt" if header["crt"] else "")
    spec = resolve_ring(decl, base_dir, header["line"], 1)
    R = spec.ring
    for name, M in mats.items():
        for r in M:
            for v in r:
                if not spec.crt and not 0 <= v < R.k:
                    raise DslError(f"{name} entry {v} outside [0, {R.k - 1}]", where[name], 1)
    try:
        if spec.crt:
            lin = LinearNetwork.from_residues(R.k, mats["A"], mats.get("B"), mats.get("C"), ring=R)
        else:
            conv = lambda M: None if M is None else [[v if v else R.k for v in r] for r in M]
            lin = LinearNetwork(R, conv(mats["A"]), conv(mats.get("B")), conv(mats.get("C")))
    except RingNetError as exc:
        raise DslError(str(exc), header["line"], 1) from None
    for key in ("n", "m", "p"):
        if key in header and header[key] != getattr(lin, key):
            raise DslError(f"header says {key}={header[key]} but the matrices give {getattr(lin, key)}", header["line"], 1)
    return lin


def cmd_linear_analyze(cfg: RunConfig) -> Report:
    path = cfg.inputs[0]
    lin = parse_linear(_read(path), os.path.dirname(os.path.abspath(path)))
    rep = Report("linear analyze")
    res = linear_controllability(lin, cfg.budget)
    for i, (sub, a, C) in enumerate(zip(res.factor_networks, res.factor_assrs, res.factor_closures), 1):
        rep.sets[f"A{i}"] = sub.residues(sub.A)
        if sub.B:
            rep.sets[f"B{i}"] = sub.residues(sub.B)
        if sub.C:
            rep.sets[f"C{i}_output"] = sub.residues(sub.C)
        rep.matrices[f"L{i}"] = repr(a.M)
        for j, comp in enumerate(a.components, 1):
            rep.matrices[f"L{i}_{j}"] = repr(comp)
        rep.sets[f"controllability_matrix_{i}"] = _bool_rows(C)
        rep.verdicts[f"factor_{i}_completely_controllable"] = bool(res.factor_verdicts[i - 1])
    rep.verdicts["completely_controllable"] = res.combined
    if res.cross_checked:
        rep.verdicts["direct_completely_controllable"] = res.direct
        if not res.agrees:
            rep.mismatch = True
            rep.errata.append("combined factor verdict disagrees with the direct computation")
    else:
        rep.errata.append("direct computation skipped: state space over budget")
    rep.negative = not res.combined
    return rep


COMMANDS = {
    ("ring", "verify"): (cmd_ring_verify, 1),
    ("ring", "enum"): (cmd_ring_enum, 1),
    ("ring", "iso"): (cmd_ring_iso, 2),
    ("net", "compile"): (cmd_net_compile, 1),
    ("net", "simulate"): (cmd_net_simulate, 1),
    ("net", "analyze"): (cmd_net_analyze, 1),
    ("decompose",): (cmd_decompose, 1),
    ("product",): (cmd_product, 2),
    ("represent",): (cmd_represent, 1),
    ("linear", "analyze"): (cmd_linear_analyze, 1),
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS, help="report format")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="state-space budget (default RINGNET_BUDGET or 1e6)")
    common.add_argument("--steps", type=int, default=argparse.SUPPRESS, help="trajectory length")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for sampled runs")
    common.add_argument("--no-fail-negative", action="store_true", default=argparse.SUPPRESS,
                        help="exit 0 even when an analysis verdict is negative")

    p = argparse.ArgumentParser(prog="ringnet", description="Networks over finite rings.", parents=[common])
    p.add_argument("--version", action="version", version=f"ringnet {__version__}")
    sub = p.add_subparsers(dest="group", required=True)

    ring = sub.add_parser("ring", help="ring tables: verify, enumerate, compare").add_subparsers(dest="action", required=True)
    s = ring.add_parser("verify", parents=[common], help="check the ring axioms for every ring in a file")
    s.add_argument("file")
    s = ring.add_parser("enum", parents=[common], help="all commutative rings with identity of order k")
    s.add_argument("k")
    s.add_argument("--time-budget", type=float, default=None, help="seconds before giving up")
    s = ring.add_parser("iso", parents=[common], help="isomorphisms between two rings")
    s.add_argument("file1")
    s.add_argument("file2")

    net = sub.add_parser("net", help="network files: compile, simulate, analyze").add_subparsers(dest="action", required=True)
    s = net.add_parser("compile", parents=[common], help="structure matrices in delta notation")
    s.add_argument("file")
    s.add_argument("--cross-check", action="store_true", help="also build matrices symbolically and compare")
    s = net.add_parser("simulate", parents=[common], help="trajectory table")
    s.add_argument("file")
    s.add_argument("--x0", required=True, help="initial state, e.g. 0,1,4")
    s.add_argument("--u", action="append", help="control values per step (repeat, or ';'-separated); cycled")
    s = net.add_parser("analyze", parents=[common], help="fixed points, attractors, control properties")
    s.add_argument("file")
    s.add_argument("--show-closure", action="store_true", help="print the controllability matrix rows")

    s = sub.add_parser("decompose", parents=[common], help="factor networks over a product ring")
    s.add_argument("file")
    s.add_argument("--cross-check", action="store_true")
    s = sub.add_parser("product", parents=[common], help="product network of two networks")
    s.add_argument("file1")
    s.add_argument("file2")
    s = sub.add_parser("represent", parents=[common], help="realize a map as a network over Z^kappa")
    s.add_argument("source", help="network file or a matrix like d6[4,6,1,3,2,5]")
    s.add_argument("--nodes", type=int, default=None, help="node count of a matrix source")
    lin = sub.add_parser("linear", help="linear networks").add_subparsers(dest="action", required=True)
    s = lin.add_parser("analyze", parents=[common], help="per-factor and combined controllability")
    s.add_argument("file")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    key = (ns.group,) + ((ns.action,) if getattr(ns, "action", None) else ())
    positional = [getattr(ns, a) for a in ("file", "k", "file1", "file2", "source") if getattr(ns, a, None) is not None]
    options = {}
    for opt in ("time_budget", "cross_check", "x0", "u", "show_closure", "nodes"):
        if hasattr(ns, opt):
            options[opt] = getattr(ns, opt)
    return RunConfig(
        subcommand=" ".join(key),
        inputs=positional,
        fmt=getattr(ns, "format", "text"),
        budget=getattr(ns, "budget", None) or default_budget(),
        steps=getattr(ns, "steps", 10),
        seed=getattr(ns, "seed", 0),
        fail_on_negative=not getattr(ns, "no_fail_negative", False),
        options=options,
    )


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    key = tuple(cfg.subcommand.split())
    if key not in COMMANDS:
        err.write(f"ringnet: unknown command {cfg.subcommand!r}\n")
        return EXIT_INPUT
    fn, _ = COMMANDS[key]
    try:
        rep = fn(cfg)
    except (AssrMismatchError, VerificationError) as exc:
        err.write(f"ringnet: mismatch: {exc}\n")
        return EXIT_MISMATCH
    except DslError as exc:
        err.write(f"ringnet: {exc}\n")
        return EXIT_INPUT
    except BudgetExceeded as exc:
        err.write(f"ringnet: {exc}\n")
        return EXIT_INPUT
    except (RingNetError, ValueError) as exc:
        err.write(f"ringnet: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        err.write(f"ringnet: {exc}\n")
        return EXIT_INPUT
    if cfg.fmt == "json":
        out.write(json.dumps(_jsonable(rep.as_json()), indent=2) + "\n")
    else:
        out.write(rep.render_text())
    if rep.mismatch:
        return EXIT_MISMATCH
    if rep.negative and cfg.fail_on_negative:
        return EXIT_NEGATIVE
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        parser.error(str(exc))
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
