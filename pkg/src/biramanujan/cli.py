"""Command-line entry point: ``biramanujan <subcommand> ...``.

Exit codes: 0 success or valid, 1 verification or oracle failure, 2 invalid
input, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .enclosure import DEFAULT_BITS, Interval
from .exact_poly import PolyError, RatPoly, max_root

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3

log = logging.getLogger("biramanujan")


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{name} must be an integer, got {raw!r}") from None


def default_workers() -> int:
    return _env_int("BIRAMANUJAN_WORKERS", len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity")
                    else (os.cpu_count() or 1))


@dataclass
class RunConfig:
    subcommand: str
    n: int | None = None
    k: int | None = None
    d: int | None = None
    inputs: list[Path] = field(default_factory=list)
    output: Path | None = None
    precision_bits: int = DEFAULT_BITS
    cap: int = 10**6
    seed: int = 0
    workers: int = 1
    json: bool = False
    theta: Fraction | None = None
    u: Fraction | None = None
    m: int | None = None
    check: str | None = None

    def validate(self) -> None:
        for name in ("n", "k", "d"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.cap < 1:
            raise ValueError("the enumeration cap must be positive")
        if self.precision_bits < 8:
            raise ValueError("precision must be at least 8 bits")
        if self.workers < 1:
            raise ValueError("worker count must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


class _Out:
    """Collects human-readable lines and a JSON payload; prints one of them."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.payload: dict = {}

    def line(self, text: str) -> None:
        if not self.as_json:
            print(text)

    def finish(self) -> None:
        if self.as_json:
            print(json.dumps(self.payload, indent=2, sort_keys=True))


def _poly_json(p: RatPoly) -> list[str]:
    return [str(c) for c in p.coeffs]


def _bracket_json(p: RatPoly) -> dict | None:
    if p.degree < 1:
        return None
    b = max_root(p)
    return {"lo": str(b.lo), "hi": str(b.hi), "approx": float(b.mid)}


def _interval_json(iv: Interval) -> dict:
    return {"lo": str(iv.lo), "hi": str(iv.hi), "approx": float(iv.mid)}


# -- subcommands ------------------------------------------------------------

def cmd_construct(cfg: RunConfig, out: _Out) -> int:
    from .builder import construct
    from .verify import certify_ramanujan, graph_to_text

    n, k, d = cfg.n, cfg.k, cfg.d
    res = construct(n, k, d, workers=cfg.workers)
    cert = certify_ramanujan(res.adjacency, n, k, d, cfg.precision_bits)
    outdir = cfg.output or Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"graph_n{n}_k{k}_d{d}"
    files = {
        "graph": outdir / f"{stem}.txt",
        "trail": outdir / f"{stem}.trail.txt",
        "certificate": outdir / f"{stem}.cert.txt",
    }
    files["graph"].write_text(graph_to_text(res.adjacency, n, k, d))
    files["trail"].write_text(res.trail_text())
    files["certificate"].write_text(cert.to_text())
    out.line(f"constructed ({n}, {k}, {d}) graph in {len(res.trail)} greedy steps")
    out.line(f"lambda2 (numeric) = {cert.lambda2:.12g}")
    out.line(f"bound sqrt(d-1)+sqrt(kd-1) squared = {cert.bound_enclosure.format(20)}")
    out.line(f"certificate: {'VALID' if cert.valid else 'INVALID'} ({cert.roots_above_bound} roots above bound)")
    for key, path in files.items():
        out.line(f"wrote {key}: {path}")
    out.payload = {"certificate": cert.to_dict(), "files": {k_: str(v) for k_, v in files.items()},
                   "steps": len(res.trail)}
    return EXIT_OK if cert.valid else EXIT_FAIL


def cmd_verify(cfg: RunConfig, out: _Out) -> int:
    from .verify import StructureError, certify_ramanujan, check_biregular, graph_from_text

    A, n, k, d = graph_from_text(cfg.inputs[0].read_text(), cfg.k, cfg.d)
    if not check_biregular(A, n, k, d):
        out.line(f"graph is not ({n}, {k}, {d})-biregular")
        out.payload = {"n": n, "k": k, "d": d, "biregular": False, "valid": False}
        return EXIT_FAIL
    try:
        cert = certify_ramanujan(A, n, k, d, cfg.precision_bits)
    except StructureError as exc:
        out.line(str(exc))
        out.payload = {"n": n, "k": k, "d": d, "biregular": True, "valid": False, "error": str(exc)}
        return EXIT_FAIL
    if cfg.output:
        cfg.output.write_text(cert.to_text())
    out.line(cert.to_text().rstrip())
    out.payload = {"biregular": True, **cert.to_dict()}
    return EXIT_OK if cert.valid else EXIT_FAIL


def cmd_convolve(cfg: RunConfig, out: _Out) -> int:
    from .rect_conv import ConvDims, rect_conv

    p = RatPoly.from_text(cfg.inputs[0].read_text())
    q = RatPoly.from_text(cfg.inputs[1].read_text())
    r = rect_conv(p, q, ConvDims(cfg.m, cfg.n), check=True)
    text = r.to_text()
    if cfg.output:
        cfg.output.write_text(text)
    if out.as_json:
        out.payload = {"m": cfg.m, "n": cfg.n, "result": _poly_json(r), "display": repr(r)}
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bound(cfg: RunConfig, out: _Out) -> int:
    from .rect_conv import BoundParams, ConvDims, cor_ok_bound, r_bound, ramanujan_bound, u_star

    k, d, bits = cfg.k, cfg.d, cfg.precision_bits
    n = cfg.n or 1
    m = k * n
    theta = cfg.theta if cfg.theta is not None else Fraction(k)
    rb = ramanujan_bound(k, d, bits)
    out.line(f"ramanujan sqrt(d-1)+sqrt(kd-1) = {rb.format(30)}")
    out.payload = {"k": k, "d": d, "n": n, "m": m, "theta": str(theta), "ramanujan": _interval_json(rb)}
    if theta >= 2:
        co = cor_ok_bound(theta, m, n, d, bits)
        out.line(f"cor_ok(theta={theta}, m={m}, n={n}) = {co.format(30)}")
        out.payload["cor_ok"] = _interval_json(co)
    else:
        out.line(f"cor_ok: not stated for theta={theta} < 2")
    u_opt = None
    if theta >= 2 and d >= 2:
        u_opt = u_star(theta, m, n, d, bits)
        out.line(f"u_star = {u_opt.format(30)}")
        out.payload["u_star"] = _interval_json(u_opt)
    u = cfg.u if cfg.u is not None else (u_opt.mid if u_opt is not None else Fraction(0))
    rv = r_bound(BoundParams(theta, d, ConvDims(m, n), u), bits)
    # R bounds the largest root of the d-fold convolution, a squared singular value
    out.line(f"R(u={float(u):.12g}) = {rv.format(30)}  (sqrt = {rv.sqrt(bits).format(30)})")
    out.payload["r_bound"] = {"u": str(u), **_interval_json(rv)}
    return EXIT_OK


def cmd_expected_poly(cfg: RunConfig, out: _Out) -> int:
    from .builder import full_bipartite_poly, node_gram_poly, state_from_text

    state = state_from_text(cfg.inputs[0].read_text())
    p = node_gram_poly(state)
    full = full_bipartite_poly(p, state.n, state.k, state.d)
    br = _bracket_json(p)
    out.line(f"reduced node polynomial: {p!r}")
    out.line(f"expected bipartite polynomial: {full!r}")
    out.line("largest nontrivial root: " + ("none" if br is None else f"~{br['approx']:.15g}"))
    if cfg.output:
        cfg.output.write_text(p.to_text())
    out.payload = {"reduced": _poly_json(p), "bipartite": _poly_json(full), "maxroot": br}
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, out: _Out) -> int:
    from .checks import CHECKS, run_check

    if cfg.check == "list":
        for name, fn in CHECKS.items():
            out.line(f"{name}: {(fn.__doc__ or '').strip().splitlines()[0]}")
        out.payload = {"checks": list(CHECKS)}
        return EXIT_OK
    names = list(CHECKS) if cfg.check == "all" else [cfg.check]
    for name in names:
        if name not in CHECKS:
            raise ValueError(f"unknown check {name!r}; run 'oracle list'")
    reports = []
    for name in names:
        rep = run_check(name, cap=cfg.cap, seed=cfg.seed)
        out.line(rep.line())
        reports.append(rep.to_dict())
    out.payload = {"reports": reports, "passed": all(r["passed"] for r in reports)}
    return EXIT_OK if all(r["passed"] for r in reports) else EXIT_FAIL


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "convolve": cmd_convolve,
    "bound": cmd_bound,
    "expected-poly": cmd_expected_poly,
    "oracle": cmd_oracle,
}


def run(cfg: RunConfig) -> int:
    from .oracles import CapExceeded
    from .rect_conv import DomainError
    from .verify import GraphFormatError

    out = _Out(cfg.json)
    try:
        cfg.validate()
        code = COMMANDS[cfg.subcommand](cfg, out)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, PolyError, DomainError, GraphFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out.finish()
    return code


# -- argument parsing -------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--bits", type=int, default=DEFAULT_BITS, dest="precision_bits",
                        help="precision of bound enclosures (default %(default)s)")
    common.add_argument("--cap", type=int, default=None, help="enumeration cap (env BIRAMANUJAN_ENUM_CAP)")
    common.add_argument("--seed", type=int, default=0, help="seed for Monte-Carlo checks")
    common.add_argument("--workers", type=int, default=None, help="worker processes (env BIRAMANUJAN_WORKERS)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="biramanujan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("construct", parents=[common], help="greedy construction + certificate")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("d", type=int)
    p.add_argument("-o", "--out-dir", type=Path, dest="output", help="output directory (default .)")

    p = sub.add_parser("verify", parents=[common], help="certify a graph file")
    p.add_argument("graph", type=Path)
    p.add_argument("k", type=int)
    p.add_argument("d", type=int)
    p.add_argument("-o", "--output", type=Path, help="write the certificate here")

    p = sub.add_parser("convolve", parents=[common], help="rectangular additive convolution of two poly files")
    p.add_argument("p", type=Path)
    p.add_argument("q", type=Path)
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("bound", parents=[common], help="print the spectral bounds")
    p.add_argument("k", type=int)
    p.add_argument("d", type=int)
    p.add_argument("--n", type=int, default=None, help="right side size (m = kn; default 1)")
    p.add_argument("--theta", type=_fraction, default=None, help="squared singular value (default k)")
    p.add_argument("--u", type=_fraction, default=None, help="parameter of R(u) (default u_star)")

    p = sub.add_parser("expected-poly", parents=[common], help="node polynomial of a partial build state")
    p.add_argument("state", type=Path)
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("oracle", parents=[common], help="run a named oracle check ('list', 'all')")
    p.add_argument("check")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cmd = ns.subcommand
    cfg = RunConfig(
        subcommand=cmd,
        precision_bits=ns.precision_bits,
        cap=ns.cap if ns.cap is not None else _env_int("BIRAMANUJAN_ENUM_CAP", 10**6),
        seed=ns.seed,
        workers=ns.workers if ns.workers is not None else default_workers(),
        json=ns.json,
        output=getattr(ns, "output", None),
    )
    if cmd == "construct":
        cfg.n, cfg.k, cfg.d = ns.n, ns.k, ns.d
    elif cmd == "verify":
        cfg.inputs, cfg.k, cfg.d = [ns.graph], ns.k, ns.d
    elif cmd == "convolve":
        cfg.inputs, cfg.m, cfg.n = [ns.p, ns.q], ns.m, ns.n
    elif cmd == "bound":
        cfg.k, cfg.d, cfg.n, cfg.theta, cfg.u = ns.k, ns.d, ns.n, ns.theta, ns.u
    elif cmd == "expected-poly":
        cfg.inputs = [ns.state]
    elif cmd == "oracle":
        cfg.check = ns.check
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
