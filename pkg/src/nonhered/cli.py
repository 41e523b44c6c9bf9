"""Command line: weights, construct, verify, defect (plus pair/norm for debugging).

Exit codes: 0 pass, 1 verification failure, 2 construction failure,
3 configuration or state error.
"""
import argparse
import configparser
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field, fields

import numpy as np

EXIT_OK, EXIT_VERIFY, EXIT_CONSTRUCT, EXIT_CONFIG = 0, 1, 2, 3

log = logging.getLogger("nonhered")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    alpha: float = 0.5
    Q: float = 256.0
    n_lattice: int = 12
    trunc: int = 12
    R: float = 25.0
    jacobi_nodes: int = 256
    u0: float = 16.0
    X: float = 1.0e4
    tail_floor: float = -1.3
    orientations: list = field(default_factory=lambda: ["L2-L1", "L1-L2"])
    R_list: list = field(default_factory=lambda: [40.0, 120.0, 250.0, 300.0])
    node_budget: float = 2.0e8
    seed: int = 0
    out: str = "out"

    RANGES = {"alpha": (0.0, 1.0), "Q": (2.0, 1e9), "n_lattice": (1, 40), "trunc": (1, 40),
              "R": (3.0, 1e4), "jacobi_nodes": (16, 4096), "u0": (4.0, 1e5), "X": (100.0, 1e7),
              "tail_floor": (-10.0, -1.0), "node_budget": (1e4, 1e11), "seed": (0, 2 ** 32)}

    def validate(self):
        for k, (lo, hi) in self.RANGES.items():
            v = getattr(self, k)
            if not lo <= v <= hi or (k == "alpha" and v in (lo, hi)):
                raise ConfigError(f"{k} = {v} outside [{lo}, {hi}]")
        if self.Q != round(self.Q):
            raise ConfigError("Q must be an integer")
        if self.trunc > self.n_lattice:
            raise ConfigError("trunc must not exceed n_lattice")
        bad = set(self.orientations) - {"L2-L1", "L1-L2"}
        if bad:
            raise ConfigError(f"unknown orientation(s) {sorted(bad)}")
        if not self.R_list or min(self.R_list) < 3:
            raise ConfigError("R_list needs radii >= 3")
        return self

    def hash_fields(self):
        """Fields that determine the construction (not output paths or the defect block)."""
        return {k: getattr(self, k) for k in ("alpha", "Q", "n_lattice", "trunc", "R",
                                              "jacobi_nodes", "u0", "X")}


PROFILES = {
    "demo": {"alpha": 0.5, "Q": 256.0, "n_lattice": 12, "trunc": 12},
    "certified": {"alpha": 0.5, "Q": 1.0e5, "n_lattice": 12, "trunc": 12},
}


def _coerce(name, text):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    if name not in kinds:
        raise ConfigError(f"unknown key {name!r}")
    kind = kinds[name]
    try:
        if kind is list or kind == "list":
            items = [t.strip() for t in text.split(",") if t.strip()]
            return [float(t) for t in items] if name == "R_list" else items
        if kind in (int, "int"):
            return int(float(text))
        if kind in (float, "float"):
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def load_config(path=None, profile=None, overrides=None):
    """Profile defaults, then the key = value file, then command-line overrides."""
    values = dict(PROFILES.get(profile or "demo", {}))
    if profile and profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}")
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string("[run]\n" + text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        for k, v in cp["run"].items():
            values[k] = _coerce(k, v)
    values.update(overrides or {})
    return RunConfig(**values).validate()


def atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _json(obj):
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer, np.bool_)):
            return o.item()
        if isinstance(o, complex):
            return [o.real, o.imag]
        raise TypeError(type(o).__name__)
    return json.dumps(obj, indent=1, sort_keys=True, default=default)


# -- commands -------------------------------------------------------------------

def cmd_weights(cfg):
    from .weights import (WeightSpec, K_asymptotic_report, K_scaled, check_class,
                          conjugate_profile, legendre_second, legendre_transform)
    spec = WeightSpec.canonical(cfg.alpha)
    ys = np.geomspace(20.0, 500.0, 25)
    rep = K_asymptotic_report(spec, ys)
    rows = [(r["y"], r["K_scaled"], K_scaled(spec, -r["y"]), r["log_K"], r["ratio"])
            for r in rep["rows"]]
    atomic_write(os.path.join(cfg.out, "kasymp.csv"),
                 csv_text(["y", "K_scaled", "K_scaled_neg", "log_K", "ratio"], rows))
    prof = conjugate_profile(spec)
    yc = np.concatenate([np.linspace(0.0, 1.0, 11), np.geomspace(1.5, 1e3, 30)])
    conj = [(float(y), float(legendre_transform(spec, y)), float(prof.htilde(y)),
             float(prof.htilde_prime(y)), float(prof.htilde_second(y)),
             float(legendre_second(spec, y)) if y > prof.flat_region_halfwidth else 0.0)
            for y in yc]
    atomic_write(os.path.join(cfg.out, "conjugate.csv"),
                 csv_text(["y", "htilde_numeric", "htilde", "htilde_prime", "htilde_second",
                           "htilde_second_numeric"], conj))
    cls = check_class(spec)
    summary = {"class": cls, "kasymp": {k: rep[k] for k in ("c1", "c2", "spread")},
               "flat_region_halfwidth": prof.flat_region_halfwidth}
    atomic_write(os.path.join(cfg.out, "weights.json"), _json(summary))
    print(f"class check: {'pass' if cls['passed'] else 'FAIL'}; K ratio in "
          f"[{rep['c1']:.5g}, {rep['c2']:.5g}]")
    return EXIT_OK if cls["passed"] else EXIT_VERIFY


def cmd_construct(cfg):
    from .construct import ConstructionError, construct
    try:
        st = construct(alpha=cfg.alpha, Q=cfg.Q, N_lat=cfg.n_lattice, trunc=cfg.trunc, R=cfg.R,
                       jacobi_nodes=cfg.jacobi_nodes, u0=cfg.u0, X=cfg.X,
                       hash_fields=cfg.hash_fields())
    except ConstructionError as exc:
        print(f"construction failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCT
    atomic_write(os.path.join(cfg.out, "state.json"), st.to_json())
    u = st.lattice.u[:st.trunc]
    atomic_write(os.path.join(cfg.out, "betas.csv"),
                 csv_text(["n", "u_n", "beta_n", "beta_minus_half"],
                          [(i + 1, float(u[i]), float(b), float(b - 0.5))
                           for i, b in enumerate(st.beta)]))
    gap = 1.0 - np.array(st.residuals["off_diagonal_sums"])
    atomic_write(os.path.join(cfg.out, "dsolve.csv"),
                 csv_text(["n", "u_n", "v_n", "d_n", "gamma_n", "row_gap"],
                          [(i + 1, float(u[i]), float(st.v[i]), float(st.d[i]),
                            float(st.Gamma[i]), float(gap[i])) for i in range(st.trunc)]))
    print(f"constructed Q={cfg.Q:g}: max|d_n| = {np.max(np.abs(st.d)):.4f}, "
          f"{st.lambda2.size} zeros in radius {cfg.R:g}")
    return EXIT_OK


def _load_state(cfg):
    from .construct import ConstructionState
    path = os.path.join(cfg.out, "state.json")
    try:
        with open(path, encoding="utf-8") as fh:
            st = ConstructionState.from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load state {path}: {exc}") from exc
    from .construct import config_hash
    if st.config_hash != config_hash(cfg.hash_fields()):
        raise ConfigError("state.json does not match the configuration (hash mismatch)")
    return st


def cmd_verify(cfg):
    from .construct import rebuild
    from .verify import run_all
    st = _load_state(cfg)
    built = rebuild(st)
    rep = run_all(built)
    doc = rep.to_dict()
    atomic_write(os.path.join(cfg.out, "report.json"), _json(doc))
    rows = [(c["name"], "pass" if c["passed"] else ("inconclusive" if c["inconclusive"] else "fail"),
             int(c["exploratory"]),
             c["measured"] if isinstance(c["measured"], (int, float, str)) else json.dumps(c["measured"]),
             c["bound"] if isinstance(c["bound"], (int, float, str)) or c["bound"] is None
             else json.dumps(c["bound"]), float(c["error_budget"]))
            for c in doc["checks"]]
    atomic_write(os.path.join(cfg.out, "residuals.csv"),
                 csv_text(["check", "status", "exploratory", "measured", "bound", "error_budget"],
                          rows))
    for c in doc["checks"]:
        tag = "pass" if c["passed"] else "FAIL"
        print(f"{tag:4s} {c['name']}" + ("  (exploratory)" if c["exploratory"] else ""))
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_defect(cfg):
    from .construct import rebuild
    from .verify import defect_experiment, defect_monotone
    st = _load_state(cfg)
    built = rebuild(st)
    rows, info = defect_experiment(built, R_list=cfg.R_list, orientations=cfg.orientations,
                                   node_budget=cfg.node_budget)
    atomic_write(os.path.join(cfg.out, "defect.csv"),
                 csv_text(["R", "orientation", "candidate", "residual", "error_budget"],
                          [(r.R, r.orientation, r.candidate, r.residual, r.error_budget)
                           for r in rows]))
    info["monotone"] = defect_monotone(rows)
    info["inconclusive_rows"] = sum(r.inconclusive for r in rows)
    atomic_write(os.path.join(cfg.out, "defect.json"), _json(info))
    print(f"{len(rows)} rows; curves non-increasing: {info['monotone']}")
    return EXIT_OK if info["monotone"] else EXIT_VERIFY


def cmd_pair(cfg, which, lam):
    """Debug: (g, sigma) for g = g_lam taken from the stored state."""
    from .construct import GEval, rebuild
    from .xform import pair_entire, sigma_time
    built = rebuild(_load_state(cfg))
    st = built.state
    if which == "v":
        target = ("v", int(lam))
    else:
        i = int(np.argmin(np.abs(st.lambda2 - lam)))
        target = ("z", float(st.lambda2_a[i]), float(st.lambda2_o[i]))
    r = pair_entire(built.space, GEval(built.products, target), sigma_time(), X=cfg.X)
    print(_json({"value": [r.value.real, r.value.imag], "error_bound": r.error_bound}))
    return EXIT_OK


def cmd_norm(cfg, what):
    """Debug: plane norm against the exact norm for sigma or a unit kernel at Q."""
    from .xform import Space, TimeRepEval, kernel_time, plane_norm, sigma_time
    sp = Space(cfg.alpha, cfg.jacobi_nodes, cfg.u0)
    f = sigma_time() if what == "sigma" else kernel_time(cfg.Q, 0.0, 1.0 / sp.sqrtA0)
    r = plane_norm(sp, TimeRepEval(sp, f))
    exact = sp.inner_time(f, f).real
    print(_json({"value": r["value"], "error_bound": r["tail_estimate"], "exact": exact}))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="nonhered", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("weights", "construct", "verify", "defect", "pair", "norm"):
        s = sub.add_parser(name)
        s.add_argument("--config", help="key = value configuration file")
        s.add_argument("--out", help="output directory")
        s.add_argument("--profile", choices=sorted(PROFILES), default=None)
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one configuration key")
        if name == "pair":
            s.add_argument("--kind", choices=["v", "z"], default="v")
            s.add_argument("--lam", type=float, default=0.0,
                           help="index n (kind v) or approximate zero location (kind z)")
        if name == "norm":
            s.add_argument("--what", choices=["sigma", "kernel"], default="sigma")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        overrides = {}
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            overrides[k.strip()] = _coerce(k.strip(), v.strip())
        if args.out:
            overrides["out"] = args.out
        cfg = load_config(args.config, args.profile, overrides)
        if args.command == "weights":
            return cmd_weights(cfg)
        if args.command == "construct":
            return cmd_construct(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "defect":
            return cmd_defect(cfg)
        if args.command == "pair":
            return cmd_pair(cfg, args.kind, args.lam)
        return cmd_norm(cfg, args.what)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
