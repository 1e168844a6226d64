"""Command-line front end.

    ncorr compare --n 2 --N 20 --T 200 --matrices 10000
    ncorr --config run.cfg --command decay --out decay.jsonl

Configuration is resolved as defaults < ``--config`` file < explicit flags.
The config file is flat ``key = value`` text (``#`` comments; keys are the
long flag names with or without dashes).  Every run writes one canonical
``config`` record followed by one JSON record per result, each embedding the
resolved configuration; a human-readable table goes to standard output.

Exit codes: 0 pass, 1 tolerance failure, 2 configuration error,
3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import ConfigError, NcorrError, NumericalError
from .results import CorrelationResult

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

COMMANDS = ("compare", "sample", "verify_jstar", "decay", "zeta", "plotdata")
METHODS = ("mc", "determinant", "contour", "contour_full", "rs_main")

# command-specific meaning of --tolerance when it is not given
DEFAULT_TOLERANCE = {
    "compare": 3.0,        # pairwise discrepancy, in combined-error units
    "sample": 0.0,
    "verify_jstar": 1e-10,  # max relative deviation
    "decay": 0.9,          # slope must be <= -tolerance * N * eps
    "zeta": 0.05,          # relative deviation from the prediction
    "plotdata": 0.0,
}


@dataclass
class RunConfig:
    command: str = "compare"
    n: int = 2
    N: int = 20
    T: float = 1.0
    q: str = "1"
    phi_width: float | None = None
    phi_eps: float = 0.2
    phi_c: float = 1.0
    g_width: float = 1.0
    delta: float | None = None
    tmax: float | None = None
    nodes: int | None = None
    matrices: int = 10000
    seed: int = 0
    zeros: str | None = None
    out: str | None = None
    tolerance: float | None = None
    force_conjectural: bool = False
    methods: str = "mc,determinant,contour,rs_main"
    parallel: bool = False

    # -- derived -------------------------------------------------------------
    @property
    def q_value(self) -> int | None:
        return None if self.q == "full" else int(self.q)

    @property
    def tol(self) -> float:
        return DEFAULT_TOLERANCE[self.command] if self.tolerance is None else self.tolerance

    @property
    def method_list(self) -> list[str]:
        return [m.strip() for m in self.methods.split(",") if m.strip()]

    def validate(self) -> None:
        """Reject invalid settings, naming the violated constraint."""
        if self.command not in COMMANDS:
            raise ConfigError(f"command must be one of {', '.join(COMMANDS)} (got {self.command!r})")
        if not 1 <= self.n <= 3:
            raise ConfigError(f"n must satisfy 1 <= n <= 3 (got {self.n})")
        if self.N < 1:
            raise ConfigError(f"N must be >= 1 (got {self.N})")
        if not self.T > 0:
            raise ConfigError(f"T must be > 0 (got {self.T})")
        if self.q != "full":
            try:
                qv = int(self.q)
            except ValueError:
                raise ConfigError(f"q must be a positive integer or 'full' (got {self.q!r})") from None
            if qv < 1:
                raise ConfigError(f"q must be >= 1 (got {qv})")
        if not self.g_width > 0:
            raise ConfigError("g-width must be > 0")
        if self.delta is not None and not self.delta > 0:
            raise ConfigError("delta must be > 0")
        if self.matrices < 1:
            raise ConfigError("matrices must be >= 1")
        if self.tolerance is not None and self.tolerance < 0:
            raise ConfigError("tolerance must be >= 0")
        bad = [m for m in self.method_list if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
        if self.command == "zeta" and not self.zeros:
            raise ConfigError("the zeta command needs --zeros FILE")
        self.phi()  # support budget check

    # -- model objects -----------------------------------------------------------
    def phi(self):
        from .test_functions import PhiSpec

        if self.q != "full":
            q = float(self.q)
        elif self.phi_width is None:
            q = 1.0
        else:
            # full J* has no support restriction: pick the smallest level that admits s
            q = float(max(1, math.ceil((self.n * self.phi_width + self.phi_eps) / 2)))
        return PhiSpec(self.n, q=q, eps=self.phi_eps, s=self.phi_width, c=self.phi_c)

    def weights(self):
        from .test_functions import WeightSpec

        return tuple(WeightSpec(self.g_width) for _ in range(self.n))

    def contour(self):
        from .contour import ContourSpec

        return ContourSpec(delta=self.delta, t_max=self.tmax, nodes_per_axis=self.nodes)

    def resolved(self) -> dict[str, Any]:
        d = asdict(self)
        d["tolerance"] = self.tol
        return d


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str) -> Any:
    typ = str(_FIELD_TYPES[key])
    if raw.lower() in ("none", "") and "None" in typ:
        return None
    try:
        if typ.startswith("bool"):
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ.startswith("int"):
            return int(raw)
        if typ.startswith("float"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {typ}") from None
    return raw


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Flat ``key = value`` file; unknown keys are configuration errors."""
    out: dict[str, Any] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key == "config" or key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ncorr",
        description="Cross-validate n-correlation estimators for CUE eigenangles and zeta zeros.")
    S = argparse.SUPPRESS
    # no ``choices`` here: argparse would test the absent default against them;
    # RunConfig.validate rejects unknown commands instead
    p.add_argument("command_pos", nargs="?", metavar="COMMAND", default=None,
                   help=f"one of {', '.join(COMMANDS)} (same as --command)")
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--command", choices=COMMANDS, default=S)
    p.add_argument("--n", type=int, default=S, help="correlation order (1..3)")
    p.add_argument("--N", type=int, default=S, help="matrix size")
    p.add_argument("--T", type=float, default=S, help="weight scale T")
    p.add_argument("--q", default=S, help="truncation level (integer) or 'full'")
    p.add_argument("--phi-width", type=float, default=S, help="per-coordinate half-width s of Phi")
    p.add_argument("--phi-eps", type=float, default=S, help="support margin eps (budget 2q - eps)")
    p.add_argument("--phi-c", type=float, default=S, help="constant multiplying Phi")
    p.add_argument("--g-width", type=float, default=S, help="half-width Delta of each g")
    p.add_argument("--delta", type=float, default=S, help="contour abscissa (default: scaled with N)")
    p.add_argument("--tmax", type=float, default=S, help="contour truncation height")
    p.add_argument("--nodes", type=int, default=S, help="lattice points per 2 pi")
    p.add_argument("--matrices", type=int, default=S, help="Monte Carlo sample count")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--zeros", default=S, help="zeta-zero ordinate file")
    p.add_argument("--out", default=S, help="write JSON-lines records here")
    p.add_argument("--tolerance", type=float, default=S,
                   help="pass threshold (meaning depends on the command)")
    p.add_argument("--force-conjectural", action="store_true", default=S,
                   help="evaluate zeta statistics outside the proven support range")
    p.add_argument("--methods", default=S, help="comma list from " + ",".join(METHODS))
    p.add_argument("--parallel", action="store_true", default=S,
                   help="run independent methods concurrently")
    return p


def resolve_config(argv: list[str] | None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    values: dict[str, Any] = {}
    if args.get("config"):
        values.update(read_config_file(args.pop("config")))
    args.pop("config", None)
    pos = args.pop("command_pos", None)
    if pos is not None:
        if "command" in args and args["command"] != pos:
            raise ConfigError("positional command and --command disagree")
        args["command"] = pos
    for key, value in args.items():
        values[key] = str(value) if key == "q" else value
    if "q" in values:
        values["q"] = str(values["q"])
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# commands

@dataclass
class Outcome:
    passed: bool
    records: list[dict]
    table: list[str]


def _result_record(cfg: RunConfig, label: str, res: CorrelationResult) -> dict:
    rec = json.loads(res.to_record())
    rec.update({"type": "result", "label": label, "config": cfg.resolved()})
    return rec


def _method_runners(cfg: RunConfig) -> dict[str, Callable[[], CorrelationResult]]:
    from .contour import BigF, correlation_contour, correlation_contour_q1
    from .empirical import mc_wrapped_weighted, wrapped_determinantal_value
    from .rmt import cached_batch
    from .rs_main import rs_main

    phi, weights = cfg.phi(), cfg.weights()

    def mc():
        if cfg.n > 2:
            raise ConfigError("Monte Carlo comparison implemented for n <= 2")
        batch = cached_batch(cfg.N, cfg.matrices, cfg.seed)
        support = cfg.n * cfg.g_width / cfg.T
        method = "poisson" if support < 1 else "direct"
        return mc_wrapped_weighted(batch, phi, weights, cfg.N, cfg.T, method=method)

    def determinant():
        return wrapped_determinantal_value(phi, weights, cfg.N, cfg.T)

    def contour():
        F = BigF(phi, weights, cfg.N, cfg.T)
        if cfg.q_value == 1:
            return correlation_contour_q1(F, cfg.contour())
        return correlation_contour(F, cfg.contour(), cfg.q_value)

    def contour_full():
        return correlation_contour(BigF(phi, weights, cfg.N, cfg.T), cfg.contour(), None)

    def rs():
        val = rs_main(cfg.n, cfg.N, cfg.T, phi, weights)
        # the main term carries an O(N) residual against its N T size
        return CorrelationResult(val, abs(val) / cfg.T, "rs_main", {"n": cfg.n, "N": cfg.N, "T": cfg.T})

    return {"mc": mc, "determinant": determinant, "contour": contour,
            "contour_full": contour_full, "rs_main": rs}


def pairwise_discrepancy(a: CorrelationResult, b: CorrelationResult) -> float:
    """|a - b| over the combined error, with a 1e-9 relative floor so exact
    methods are not held to better than double-precision-level agreement."""
    diff = abs(a.value - b.value)
    scale = math.hypot(a.error, b.error) + 1e-9 * max(abs(a.value), abs(b.value))
    return diff / scale if scale > 0 else (0.0 if diff == 0 else math.inf)


def cmd_compare(cfg: RunConfig) -> Outcome:
    runners = _method_runners(cfg)
    chosen = cfg.method_list
    if cfg.parallel:
        with ThreadPoolExecutor(max_workers=len(chosen)) as pool:
            futures = {m: pool.submit(runners[m]) for m in chosen}
            results = {m: f.result() for m, f in futures.items()}
    else:
        results = {m: runners[m]() for m in chosen}
    records = [_result_record(cfg, m, r) for m, r in results.items()]
    table = [f"{'method':<12s} {'value':>22s} {'error':>11s}"]
    for m, r in results.items():
        table.append(f"{m:<12s} {r.real:22.14g} {r.error:11.3e}")
    passed = True
    table.append("")
    table.append(f"{'pair':<25s} {'discrepancy':>12s} {'status':>7s}")
    for i, a in enumerate(chosen):
        for b in chosen[i + 1:]:
            d = pairwise_discrepancy(results[a], results[b])
            ok = d <= cfg.tol
            passed &= ok
            table.append(f"{a + ' vs ' + b:<25s} {d:12.4g} {'ok' if ok else 'FAIL':>7s}")
            records.append({"type": "discrepancy", "pair": [a, b], "sigma": repr(float(d)),
                            "passed": bool(ok), "config": cfg.resolved()})
    return Outcome(passed, records, table)


def cmd_sample(cfg: RunConfig) -> Outcome:
    from .rmt import cache_dir, cached_batch

    batch = cached_batch(cfg.N, cfg.matrices, cfg.seed)
    path = cache_dir() / f"samples_N{cfg.N}_seed{cfg.seed}_count{cfg.matrices}.txt"
    rec = {"type": "sample", "N": cfg.N, "count": len(batch), "seed": cfg.seed,
           "path": str(path), "config": cfg.resolved()}
    return Outcome(True, [rec], [f"{len(batch)} samples of N={cfg.N} cached at {path}"])


def cmd_verify_jstar(cfg: RunConfig) -> Outcome:
    from .jstar import verify_worked_examples

    rep = verify_worked_examples(cfg.N, trials=100, tol=cfg.tol, seed=cfg.seed)
    rec = {"type": "verify_jstar", "N": cfg.N, "max_deviation":
           {k: repr(float(v)) for k, v in sorted(rep.max_deviation.items())},
           "passed": bool(rep.passed), "config": cfg.resolved()}
    return Outcome(rep.passed, [rec], rep.lines())


def cmd_decay(cfg: RunConfig) -> Outcome:
    from .contour import BigF, decay_probe

    F = BigF(cfg.phi(), cfg.weights(), cfg.N, cfg.T)
    deltas = [0.2, 0.3, 0.4, 0.5, 0.6]
    probe = decay_probe(F, deltas, 1, cfg.contour())
    threshold = -cfg.tol * cfg.N * cfg.phi_eps
    ok = probe.slope <= threshold
    rows = [{"delta": r.delta, "peak": repr(r.peak), "suppression": repr(r.suppression),
             "integral_re": repr(r.integral.real), "integral_im": repr(r.integral.imag)}
            for r in probe.rows]
    rec = {"type": "decay", "stratum": 1, "slope": repr(probe.slope), "threshold": repr(threshold),
           "rows": rows, "passed": bool(ok), "config": cfg.resolved()}
    return Outcome(ok, [rec], probe.table() + [f"threshold {threshold:.4f}: {'ok' if ok else 'FAIL'}"])


def cmd_zeta(cfg: RunConfig) -> Outcome:
    from .zeta import FejerProfile, load_zeros, montgomery_statistic, zeta_n_correlation

    zeros = load_zeros(cfg.zeros)
    width = 1.0 if cfg.phi_width is None else min(cfg.phi_width, 1.0)
    mont = montgomery_statistic(zeros, FejerProfile(width))
    corr = zeta_n_correlation(zeros, cfg.phi(), cfg.weights(), force=cfg.force_conjectural)
    table = [f"{'statistic':<22s} {'value':>16s} {'prediction':>16s} {'rel.dev':>10s}",
             f"{'montgomery (a=%g)' % width:<22s} {mont.value:16.10g} {mont.prediction:16.10g} "
             f"{mont.relative_deviation:10.4f}",
             f"{'n-correlation n=%d' % cfg.n:<22s} {corr.value:16.10g} {corr.rs_prediction:16.10g} "
             f"{corr.relative_deviation:10.4f}" + ("  (conjectural)" if corr.conjectural else "")]
    ok = mont.relative_deviation < cfg.tol and corr.relative_deviation < cfg.tol
    recs = [
        {"type": "montgomery", "value": repr(mont.value), "prediction": repr(mont.prediction),
         "count": mont.count, "T_cut": repr(mont.T_cut), "normalisation": mont.normalisation,
         "window": mont.window, "config": cfg.resolved()},
        {"type": "zeta_n_correlation", "value": repr(corr.value),
         "prediction": repr(corr.rs_prediction), "conjectural": corr.conjectural,
         "T_weight": repr(corr.T_weight), "logscale": repr(corr.logscale),
         "normalisation": corr.normalisation, "config": cfg.resolved()},
    ]
    return Outcome(ok, recs, table)


def pair_density_columns(cfg: RunConfig, bins: int = 60, u_max: float = 3.0):
    """Histogram of rescaled nearest-and-further differences with the sine-kernel
    prediction 1 - (sin pi u / pi u)^2 alongside."""
    edges = np.linspace(0.0, u_max, bins + 1)
    counts = np.zeros(bins)
    if cfg.zeros:
        from .zeta import load_zeros, unfold

        x = unfold(load_zeros(cfg.zeros).ordinates)
        total = x.size
        for off in range(1, x.size):
            d = x[off:] - x[:-off]
            if d.min() > u_max:
                break
            counts += np.histogram(d, edges)[0]
        source = "zeros"
    else:
        from .rmt import cached_batch

        batch = cached_batch(cfg.N, cfg.matrices, cfg.seed)
        a = batch.angles
        diff = np.mod(a[:, :, None] - a[:, None, :], 2 * np.pi) * cfg.N / (2 * np.pi)
        iu = ~np.eye(cfg.N, dtype=bool)
        counts = np.histogram(diff[:, iu], edges)[0].astype(float)
        total = a.size
        source = "cue"
    width = edges[1] - edges[0]
    centres = 0.5 * (edges[1:] + edges[:-1])
    density = counts / (total * width)
    prediction = 1.0 - np.sinc(centres) ** 2
    return source, centres, density, prediction


def cmd_plotdata(cfg: RunConfig) -> Outcome:
    source, u, dens, pred = pair_density_columns(cfg)
    lines = [f"# pair correlation density ({source}); columns: u empirical sine_kernel"]
    lines += [f"{a:.6f} {b:.8f} {c:.8f}" for a, b, c in zip(u, dens, pred)]
    rec = {"type": "plotdata", "source": source, "u": [repr(float(v)) for v in u],
           "empirical": [repr(float(v)) for v in dens], "prediction": [repr(float(v)) for v in pred],
           "config": cfg.resolved()}
    return Outcome(True, [rec], lines)


DISPATCH = {
    "compare": cmd_compare,
    "sample": cmd_sample,
    "verify_jstar": cmd_verify_jstar,
    "decay": cmd_decay,
    "zeta": cmd_zeta,
    "plotdata": cmd_plotdata,
}


def run(cfg: RunConfig) -> tuple[int, Outcome]:
    outcome = DISPATCH[cfg.command](cfg)
    return (EXIT_PASS if outcome.passed else EXIT_FAIL), outcome


def write_records(cfg: RunConfig, outcome: Outcome, stream) -> None:
    stream.write(json.dumps({"type": "config", "config": cfg.resolved()}, sort_keys=True) + "\n")
    for rec in outcome.records:
        stream.write(json.dumps(rec, sort_keys=True) + "\n")


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = resolve_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_PASS
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        code, outcome = run(cfg)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, NcorrError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print("\n".join(outcome.table))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            write_records(cfg, outcome, fh)
    print(f"status: {'PASS' if code == EXIT_PASS else 'FAIL'}")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
