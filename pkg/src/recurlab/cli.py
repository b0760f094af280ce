"""Command line front end.

Seven subcommands share one pattern: read a JSON config, run the
computation, print a one-line summary, and drop deterministic report files
into --out-dir in the formats requested.  Values in the config file take
precedence over command-line override flags; flags fill gaps the config
leaves open.  Unknown config keys are rejected with the full field path so
typos fail loudly instead of silently running defaults.

Exit codes: 0 success, 1 computational failure, 2 bad usage or bad config.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import dynamics, natset, opcore, perturbed_rotation as pr, report

_MISSING = object()


class ConfigError(Exception):
    pass


class Cfg:
    """A config object with path-aware diagnostics and unknown-key rejection."""

    def __init__(self, data, path: str = "") -> None:
        if not isinstance(data, dict):
            where = f" at {path!r}" if path else ""
            raise ConfigError(f"config{where} must be a JSON object")
        self.data = data
        self.path = path

    def _at(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def allow(self, *keys: str) -> "Cfg":
        for k in self.data:
            if k not in keys:
                raise ConfigError(
                    f"unknown config key {self._at(k)!r}; "
                    f"allowed here: {', '.join(sorted(keys))}")
        return self

    def has(self, key: str) -> bool:
        return key in self.data

    def raw(self, key: str, default=_MISSING):
        if key in self.data:
            return self.data[key]
        if default is _MISSING:
            raise ConfigError(f"missing required config key {self._at(key)!r}")
        return default

    def sub(self, key: str) -> "Cfg":
        return Cfg(self.raw(key), self._at(key))

    def opt_sub(self, key: str) -> Optional["Cfg"]:
        return self.sub(key) if key in self.data else None

    # Typed getters validate only values actually present in the file; an
    # absent key returns the default untouched.

    def get_int(self, key: str, default=_MISSING, minimum: Optional[int] = None) -> int:
        if key not in self.data:
            return self.raw(key, default)
        v = self.data[key]
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{self._at(key)!r} must be an integer")
        if minimum is not None and v < minimum:
            raise ConfigError(f"{self._at(key)!r} must be >= {minimum}")
        return v

    def get_num(self, key: str, default=_MISSING) -> float:
        if key not in self.data:
            return self.raw(key, default)
        v = self.data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{self._at(key)!r} must be a number")
        return float(v)

    def get_str(self, key: str, default=_MISSING) -> str:
        if key not in self.data:
            return self.raw(key, default)
        v = self.data[key]
        if not isinstance(v, str):
            raise ConfigError(f"{self._at(key)!r} must be a string")
        return v

    def get_bool(self, key: str, default=_MISSING) -> bool:
        if key not in self.data:
            return self.raw(key, default)
        v = self.data[key]
        if not isinstance(v, bool):
            raise ConfigError(f"{self._at(key)!r} must be true or false")
        return v

    def get_list(self, key: str, default=_MISSING) -> list:
        if key not in self.data:
            return self.raw(key, default)
        v = self.data[key]
        if not isinstance(v, list):
            raise ConfigError(f"{self._at(key)!r} must be an array")
        return v


def _parse_complex(v, where: str) -> complex:
    if isinstance(v, bool):
        raise ConfigError(f"{where}: expected a number or [re, im]")
    if isinstance(v, (int, float)):
        return complex(v)
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)):
        return complex(v[0], v[1])
    raise ConfigError(f"{where}: expected a number or [re, im]")


def _parse_norm(v, where: str) -> float:
    if v == "sup":
        return opcore.SUP
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: norm must be \"sup\" or a number >= 1")
    if v < 1:
        raise ConfigError(f"{where}: norm exponent must be >= 1")
    return float(v)


# ---------------------------------------------------------------------------
# builders from config

def family_set(cfg: Cfg, horizon: int) -> natset.NatSet:
    kind = cfg.get_str("kind")
    if kind == "explicit":
        cfg.allow("kind", "members")
        members = cfg.get_list("members")
        if not all(isinstance(m, int) and not isinstance(m, bool) for m in members):
            raise ConfigError(f"{cfg._at('members')!r} must hold integers")
        gen = natset.Explicit(tuple(members))
    elif kind == "progression":
        cfg.allow("kind", "start", "diff")
        gen = natset.ArithmeticProgression(cfg.get_int("start", minimum=0),
                                           cfg.get_int("diff", minimum=1))
    elif kind == "multiples":
        cfg.allow("kind", "p")
        gen = natset.Multiples(cfg.get_int("p", minimum=1))
    elif kind == "ip":
        cfg.allow("kind", "generators")
        gens = cfg.get_list("generators")
        if not all(isinstance(g, int) and not isinstance(g, bool) for g in gens):
            raise ConfigError(f"{cfg._at('generators')!r} must hold integers")
        gen = natset.IpClosure(tuple(gens))
    elif kind == "rotation-return":
        cfg.allow("kind", "modulus", "eps")
        gen = natset.RotationReturn(cfg.get_int("modulus", minimum=1), cfg.get_num("eps"))
    elif kind == "delta":
        cfg.allow("kind", "base")
        base = family_set(cfg.sub("base"), horizon)
        gen = natset.DeltaOf(base)
    elif kind in ("union", "intersection"):
        cfg.allow("kind", "parts")
        parts = cfg.get_list("parts")
        sets = [family_set(Cfg(p, f"{cfg._at('parts')}[{i}]"), horizon)
                for i, p in enumerate(parts)]
        if not sets:
            raise ConfigError(f"{cfg._at('parts')!r} must not be empty")
        acc = sets[0]
        for s in sets[1:]:
            acc = acc.union(s) if kind == "union" else acc.intersection(s)
        return acc
    else:
        raise ConfigError(f"{cfg._at('kind')!r}: unknown family kind {kind!r}")
    return gen.materialize(horizon)


def operator_from(cfg: Cfg) -> pr.PerturbedRotation:
    cfg.allow("foldN", "mesh", "targets", "dimCap", "norm", "rule", "minLevels")
    fold_n = cfg.get_int("foldN", minimum=1)
    mesh = cfg.get_list("mesh", None)
    if mesh is None:
        mesh_vals = pr.DEFAULT_MESH
    else:
        try:
            mesh_vals = tuple(Fraction(str(v)) for v in mesh)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{cfg._at('mesh')!r}: {exc}") from None
    targets = []
    for i, t in enumerate(cfg.get_list("targets", [])):
        if not isinstance(t, list):
            raise ConfigError(f"{cfg._at('targets')}[{i}] must be an array")
        targets.append(tuple(_parse_complex(c, f"{cfg._at('targets')}[{i}][{j}]")
                             for j, c in enumerate(t)))
    dim_cap = cfg.get_int("dimCap", None, minimum=1) if cfg.has("dimCap") else None
    p = _parse_norm(cfg.raw("norm", 2), cfg._at("norm"))
    rule = cfg.get_str("rule", "dyadic-sq")
    min_levels = cfg.get_int("minLevels", 0, minimum=0)
    try:
        return pr.build_operator(fold_n, mesh_vals, targets, dim_cap, p, rule, min_levels)
    except pr.ConstructionError as exc:
        raise ConfigError(str(exc)) from None


def vector_from(cfg: Cfg, op: pr.PerturbedRotation) -> opcore.Vec:
    kind = cfg.get_str("kind")
    if kind == "basis":
        cfg.allow("kind", "index")
        return opcore.basis_vec(cfg.get_int("index", minimum=1), op.dim_cap, op.p)
    if kind == "dyadic-comb":
        cfg.allow("kind")
        return opcore.dyadic_comb(op.dim_cap, op.p)
    if kind == "entries":
        cfg.allow("kind", "values")
        vals = [_parse_complex(v, f"{cfg._at('values')}[{i}]")
                for i, v in enumerate(cfg.get_list("values"))]
        return opcore.vec_of(vals, op.dim_cap, op.p)
    raise ConfigError(f"{cfg._at('kind')!r}: unknown vector kind {kind!r}")


def head_basis(op: pr.PerturbedRotation) -> list[opcore.Vec]:
    return [opcore.basis_vec(i, op.dim_cap, op.p) for i in range(1, op.head + 1)]


def _normalized(x: opcore.Vec) -> opcore.Vec:
    n = x.norm()
    if n == 0:
        raise ConfigError("cannot normalize the zero vector")
    return opcore.Vec(x.coords / n, x.p)


# ---------------------------------------------------------------------------
# output plumbing

def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class Sink:
    def __init__(self, out_dir: str, formats: Sequence[str]) -> None:
        self.out_dir = out_dir
        self.formats = tuple(formats)
        os.makedirs(out_dir, exist_ok=True)
        self.written: list[str] = []

    def want(self, fmt: str) -> bool:
        return fmt in self.formats

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def json(self, name: str, record: dict) -> None:
        if self.want("json"):
            p = self.path(name)
            report.write_json(p, record)
            self.written.append(p)

    def csv(self, name: str, header, rows) -> None:
        if self.want("csv"):
            p = self.path(name)
            report.write_csv(p, header, rows)
            self.written.append(p)

    def svg(self, name: str, text: str) -> None:
        if self.want("svg"):
            p = self.path(name)
            report.write_svg(p, text)
            self.written.append(p)


def _pick(cfg: Cfg, key: str, flag_value, default=_MISSING):
    """Config beats flag; flag beats default; missing everywhere is an error."""
    if cfg.has(key):
        return cfg.raw(key)
    if flag_value is not None:
        return flag_value
    if default is _MISSING:
        raise ConfigError(f"missing required config key {key!r} "
                          f"(no command-line fallback given)")
    return default


def _require_int(value, name: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name!r} must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name!r} must be >= {minimum}")
    return value


def _require_num(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name!r} must be a number")
    return float(value)


# ---------------------------------------------------------------------------
# subcommands

def cmd_families(cfg: Cfg, args, sink: Sink) -> int:
    cfg.allow("family", "horizon", "window")
    horizon = _require_int(_pick(cfg, "horizon", args.horizon), "horizon", 0)
    window = _require_int(_pick(cfg, "window", args.window, max(1, horizon // 10)),
                          "window", 1)
    a = family_set(cfg.sub("family"), horizon)
    prof = natset.density_profile(a, window)
    payload = {"set": a.to_json_dict(), "density": prof.to_json_dict()}
    sink.json("family-report.json", report.make_record("family", cfg.data, payload))
    sink.csv("family-elements.csv", ["element"], [[e] for e in a.elements])
    if sink.want("svg"):
        xs, ys = [], []
        count = 0
        idx = 0
        for n in range(1, horizon + 1):
            while idx < len(a.elements) and a.elements[idx] <= n:
                if a.elements[idx] >= 1:
                    count += 1
                idx += 1
            xs.append(float(n))
            ys.append(count / n)
        sink.svg("family-density.svg", report.line_plot_svg(
            "Prefix density", "N", "count([1,N]) / N", [("density", xs, ys)]))
    print(f"family horizon={horizon} size={len(a)} "
          f"upperBanach={_frac_str(prof.upper_banach)} "
          f"lowerBanach={_frac_str(prof.lower_banach)}")
    return 0


def cmd_construct(cfg: Cfg, args, sink: Sink) -> int:
    cfg.allow("operator")
    op = operator_from(cfg.sub("operator"))
    desc = op.descriptor()
    h = report.descriptor_hash(desc)
    ladder = [{"level": k, "modulus": str(op.modulus.m(k))}
              for k in range(1, op.levels + 1)]
    grid_rows = [{"level": e.level, "mesh": e.mesh,
                  "alpha": [[c.real, c.imag] for c in e.alpha]}
                 for e in op.grid.entries]
    certs = [{"j": j, "bound": _frac_str(op.modulus.coupling_sum(j))}
             for j in range(op.head, min(op.levels - 1, op.head + 6) + 1)]
    payload = {"descriptor": desc, "descriptorHash": h, "ladder": ladder,
               "grid": grid_rows, "couplingBounds": certs,
               "normEquivUpper": op.grid.norm_equiv_upper()}
    sink.json("operator.json", report.make_record("construct", cfg.data, payload))
    sink.csv("grid.csv", ["level", "mesh", "coefficients"],
             [[e.level, e.mesh,
               ";".join(f"{c.real:+.12g}{c.imag:+.12g}j" for c in e.alpha)]
              for e in op.grid.entries])
    print(f"operator foldN={op.fold_n} levels={op.levels} dimCap={op.dim_cap} "
          f"hash={h[:12]}")
    return 0


def cmd_rigidity(cfg: Cfg, args, sink: Sink) -> int:
    cfg.allow("operator", "jMax", "samples")
    op = operator_from(cfg.sub("operator"))
    j_max = _require_int(_pick(cfg, "jMax", args.j_max, op.levels - 1), "jMax", 1)
    if j_max > op.levels - 1:
        raise ConfigError(f"jMax must be <= levels - 1 = {op.levels - 1}")
    if cfg.has("samples"):
        samples = [_normalized(vector_from(Cfg(v, f"samples[{i}]"), op))
                   for i, v in enumerate(cfg.get_list("samples"))]
    else:
        samples = head_basis(op) + [_normalized(opcore.dyadic_comb(op.dim_cap, op.p))]
    rows = []
    worst = 0.0
    all_within = True
    for j in range(1, j_max + 1):
        r = pr.rigidity_defect(op, j, samples)
        worst = max(worst, r.defect)
        if r.defect > r.bound + 1e-12:
            all_within = False
        rows.append(r)
    payload = {"jMax": j_max, "samples": len(samples), "allWithinBound": all_within,
               "points": [{"j": r.level, "returnTime": str(op.modulus.m(r.level)),
                           "defect": r.defect, "bound": r.bound,
                           "boundExact": _frac_str(r.bound_exact)} for r in rows]}
    sink.json("rigidity.json", report.make_record("rigidity", cfg.data, payload))
    sink.csv("rigidity.csv", ["j", "returnTime", "defect", "bound", "boundExact"],
             [[r.level, str(op.modulus.m(r.level)), repr(r.defect), repr(r.bound),
               _frac_str(r.bound_exact)] for r in rows])
    if sink.want("svg"):
        js = [float(r.level) for r in rows]
        sink.svg("rigidity.svg", report.line_plot_svg(
            "Rotation return defect", "j", "norm defect at time m_j",
            [("defect", js, [max(r.defect, 1e-17) for r in rows]),
             ("bound", js, [max(r.bound, 1e-17) for r in rows])], log_y=True))
    print(f"rigidity jMax={j_max} worstDefect={worst:.6g} allWithinBound={all_within}")
    return 0


def cmd_orbit(cfg: Cfg, args, sink: Sink) -> int:
    cfg.allow("operator", "vector", "eps", "horizon", "window")
    op = operator_from(cfg.sub("operator"))
    x = vector_from(cfg.sub("vector"), op)
    eps = _require_num(_pick(cfg, "eps", args.eps), "eps")
    horizon = _require_int(_pick(cfg, "horizon", args.horizon), "horizon", 0)
    window = _require_int(_pick(cfg, "window", args.window, max(1, horizon // 10)),
                          "window", 1)
    try:
        hits = dynamics.return_set(op, x, eps, horizon)
    except dynamics.DynamicsError as exc:
        raise ConfigError(str(exc)) from None
    prof = natset.density_profile(hits, window)
    payload = {"eps": eps, "returnSet": hits.to_json_dict(),
               "density": prof.to_json_dict(),
               "descriptorHash": report.descriptor_hash(op.descriptor())}
    sink.json("orbit.json", report.make_record("orbit", cfg.data, payload))
    if sink.want("csv") or sink.want("svg"):
        ns = list(range(horizon + 1))
        ds = [dynamics._displacement(op, n, x) for n in ns]
        sink.csv("orbit.csv", ["n", "displacement"],
                 [[n, repr(d)] for n, d in zip(ns, ds)])
        sink.svg("orbit.svg", report.line_plot_svg(
            "Orbit displacement", "n", "distance from start",
            [("displacement", [float(n) for n in ns], ds),
             ("eps", [0.0, float(horizon)], [eps, eps])]))
    print(f"orbit eps={eps:g} horizon={horizon} returns={len(hits)} "
          f"upperBanach={_frac_str(prof.upper_banach)}")
    return 0


def cmd_qr_search(cfg: Cfg, args, sink: Sink) -> int:
    cfg.allow("operator", "rotationOnly", "epsSchedule", "samples", "maxLevel",
              "multipliers", "neighbors", "scanHead")
    op = operator_from(cfg.sub("operator"))
    rotation_only = cfg.get_bool("rotationOnly", False)
    schedule = [_require_num(e, f"epsSchedule[{i}]")
                for i, e in enumerate(cfg.get_list("epsSchedule"))]
    max_level = cfg.get_int("maxLevel", op.levels, minimum=1)
    multipliers = cfg.get_list("multipliers", [1])
    neighbors = cfg.get_bool("neighbors", False)
    scan_head = cfg.get_int("scanHead", 0, minimum=0)
    candidates = pr.lattice_candidates(op.modulus, max_level,
                                       tuple(multipliers), neighbors, scan_head)
    if cfg.has("samples"):
        samples = [vector_from(Cfg(v, f"samples[{i}]"), op)
                   for i, v in enumerate(cfg.get_list("samples"))]
    else:
        samples = head_basis(op)
    target = op.rotation_part() if rotation_only else op
    try:
        result = dynamics.quasi_rigidity_search(target, samples, schedule, candidates)
    except dynamics.DynamicsError as exc:
        raise ConfigError(str(exc)) from None
    if isinstance(result, dynamics.QrWitness):
        payload = {"found": True,
                   "times": [str(t) for t in result.times],
                   "defects": list(result.defects)}
        line = (f"qr found steps={len(result.times)} "
                f"times={[str(t) for t in result.times]}")
    else:
        payload = {"found": False, "step": result.step, "eps": result.eps,
                   "bestDefect": result.best_defect, "bestTime": str(result.best_time),
                   "floor": result.floor, "certified": result.certified}
        line = (f"qr failed step={result.step} eps={result.eps:g} "
                f"bestDefect={result.best_defect:.6g} certified={result.certified}")
    payload["rotationOnly"] = rotation_only
    payload["candidates"] = len(candidates)
    sink.json("qr-search.json", report.make_record("qr-search", cfg.data, payload))
    print(line)
    return 0


def cmd_period(cfg: Cfg, args, sink: Sink) -> int:
    cfg.allow("family", "horizon", "window", "delta")
    horizon = _require_int(_pick(cfg, "horizon", args.horizon), "horizon", 0)
    window = _require_int(_pick(cfg, "window", args.window, max(1, horizon // 10)),
                          "window", 1)
    delta = _require_num(_pick(cfg, "delta", args.delta), "delta")
    a = family_set(cfg.sub("family"), horizon)
    try:
        cls = dynamics.classify_period_by_density(a, window, delta)
    except dynamics.DynamicsError as exc:
        raise ConfigError(str(exc)) from None
    exact = dynamics.detect_period(a)
    payload = {"classification": cls.to_json_dict(), "exactPeriod": exact}
    sink.json("period.json", report.make_record("period", cfg.data, payload))
    print(f"period dense={cls.dense} bound={cls.bound} period={cls.period} "
          f"exact={exact}")
    return 0


def cmd_krylov(cfg: Cfg, args, sink: Sink) -> int:
    cfg.allow("operator", "vector", "depth", "depths")
    op = operator_from(cfg.sub("operator"))
    x = vector_from(cfg.sub("vector"), op)
    if cfg.has("depths"):
        depths = [_require_int(d, f"depths[{i}]", 1)
                  for i, d in enumerate(cfg.get_list("depths"))]
    else:
        top = cfg.get_int("depth", min(op.dim_cap, 64), minimum=1)
        depths = sorted({min(1 << i, top) for i in range(top.bit_length() + 1)})
    ranks = [opcore.krylov_rank(op, x, d) for d in depths]
    payload = {"depths": depths, "ranks": ranks}
    sink.json("krylov.json", report.make_record("krylov", cfg.data, payload))
    sink.csv("krylov.csv", ["depth", "rank"], list(zip(depths, ranks)))
    if sink.want("svg"):
        sink.svg("krylov.svg", report.line_plot_svg(
            "Orbit span growth", "depth", "rank",
            [("rank", [float(d) for d in depths], [float(r) for r in ranks])]))
    print(f"krylov depth={depths[-1]} rank={ranks[-1]}")
    return 0


# ---------------------------------------------------------------------------
# entry point

_COMMANDS = {
    "families": cmd_families,
    "construct": cmd_construct,
    "rigidity": cmd_rigidity,
    "orbit": cmd_orbit,
    "qr-search": cmd_qr_search,
    "period": cmd_period,
    "krylov": cmd_krylov,
}


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors, so exit 1 rather than
    # argparse's default 2 (reserved for internal failures)
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    top = _Parser(
        prog="recurlab",
        description="Return-time experiments on truncated sequence space operators.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out-dir", default=".", help="directory for report files")
        p.add_argument("--format", action="append", choices=["json", "csv", "svg"],
                       help="output format, repeatable (default: json)")

    p = sub.add_parser("families", help="materialize a set family and profile it")
    common(p)
    p.add_argument("--horizon", type=int)
    p.add_argument("--window", type=int)

    p = sub.add_parser("construct", help="build the operator and dump its anatomy")
    common(p)

    p = sub.add_parser("rigidity", help="rotation return defects along the ladder")
    common(p)
    p.add_argument("--j-max", type=int)

    p = sub.add_parser("orbit", help="return set and density profile of one vector")
    common(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--horizon", type=int)
    p.add_argument("--window", type=int)

    p = sub.add_parser("qr-search", help="greedy shrinking-defect return time search")
    common(p)

    p = sub.add_parser("period", help="density threshold period classification")
    common(p)
    p.add_argument("--horizon", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--delta", type=float)

    p = sub.add_parser("krylov", help="orbit span rank growth")
    common(p)
    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return 1
    formats = args.format if args.format else ["json"]
    sink = Sink(args.out_dir, formats)
    try:
        cfg = Cfg(data)
        return _COMMANDS[args.command](cfg, args, sink)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (natset.NatSetError, opcore.OpcoreError, pr.ConstructionError,
            pr.GridResolutionError, dynamics.DynamicsError, OverflowError) as exc:
        # the libraries raise these only on rejected input values, so the
        # configuration is still at fault
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        # anything unanticipated is our bug, not the user's
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
