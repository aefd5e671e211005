"""Command-line front end: `actionlab <subcommand> [--config run.json] [flags]`.

Every subcommand writes <subcommand>.json (and <subcommand>.csv with --csv)
into --out.  Reports embed the validated config, its hash, package versions
and the tolerances used; wall-clock data goes to a separate *.meta.json file
so the reports themselves are byte-reproducible.  Exit codes: 0 when every
assertion of the run passes, 1 on a failed assertion or a rejected input
(SlopeHitsLengthSpectrum and friends), 2 on usage and config errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from . import __version__
from .discrete_action import action_Ar, grad_Ar, random_admissible_loop
from .flat_geometry import FlatTorus
from .hamiltonians import RadialProfile, SlopeHitsLengthSpectrum, profile_from_dict, quadratic_capped
from .index_pair import IndexPairSpec, Cutoff, build_pair, certify_exit, largest_passing_eps
from .lagrangian import StandardFormLoop, loop_from_dict, maslov_index
from .orbit_solver import dissect_orbit, enumerate_orbits, random_seed_loop, solve_critical
from .presets import PRESETS, get_preset
from .quad_forms import build_Br_gamma, coordinate_triple, stabilization_report, stdcal_negative_index, DEFAULT_S_GRID
from .spectral import inertia, hessian, suspension_check
from .verification import CHECKS, Effort, clean, run_checks

SUBCOMMANDS = ("orbits", "grad-check", "spectrum", "maslov", "stabilize", "index-pair", "verify")


# ------------------------------------------------------------------ config


class ProfileConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["quadratic_capped"] = "quadratic_capped"
    mu: float = Field(3.0, gt=0)
    slope: float | None = Field(None, gt=0)
    eps: float | None = Field(None, gt=0)

    def build(self) -> RadialProfile:
        return quadratic_capped(self.mu, self.slope, self.eps)


class StabilizeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n1: int = Field(0, ge=0, le=3)
    k: int = Field(1, ge=1, le=3)
    dims: tuple[int, int, int] = (1, 0, 0)
    s_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_S_GRID))

    @field_validator("dims")
    @classmethod
    def _dims(cls, v):
        if min(v) < 0 or sum(v) == 0:
            raise ValueError("dims must be non-negative with a positive sum")
        return v

    @field_validator("s_grid")
    @classmethod
    def _grid(cls, v):
        if not v or any(not 0 < s < 2 * np.pi for s in v):
            raise ValueError("s values must lie in (0, 2 pi)")
        return v


class IndexPairConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    window: tuple[float, float] = (-0.05, 0.4)
    samples: int = Field(500, ge=1)
    seeds: list[int] = Field(default_factory=lambda: [0, 1, 2])
    perturbation_ladder: bool = False
    spec: dict | None = None

    @field_validator("window")
    @classmethod
    def _window(cls, v):
        if not v[0] < v[1]:
            raise ValueError("window needs a < b")
        return v


class RunConfig(BaseModel):
    """Everything a run depends on; missing sections take the circle_pair defaults."""

    model_config = ConfigDict(extra="forbid")
    preset: str | None = "circle_pair"
    torus: list[float] | None = None
    profile: ProfileConfig | dict | None = None
    r: int | None = Field(None, ge=3, le=64)
    seed: int = Field(0, ge=0, lt=2**64)
    tol: float = Field(1e-10, gt=0)
    grad_tol: float = Field(1e-6, gt=0)
    grad_loops: int = Field(50, ge=1)
    solver_seeds: int = Field(10, ge=0)
    loop: dict | None = None
    maslov_dims: tuple[int, int, int] = (2, 1, 1)
    stabilize: StabilizeConfig = Field(default_factory=StabilizeConfig)
    index_pair: IndexPairConfig = Field(default_factory=IndexPairConfig)
    checks: list[int] = Field(default_factory=lambda: sorted(CHECKS))
    effort: Literal["full", "quick"] = "full"

    @field_validator("preset")
    @classmethod
    def _preset(cls, v):
        if v is not None and v not in PRESETS:
            raise ValueError(f"unknown preset {v!r}; choose from {sorted(PRESETS)}")
        return v

    @field_validator("torus")
    @classmethod
    def _torus(cls, v):
        if v is not None and (not 1 <= len(v) <= 3 or any(x <= 0 for x in v)):
            raise ValueError("torus needs 1 to 3 positive lattice lengths")
        return v

    @field_validator("checks")
    @classmethod
    def _checks(cls, v):
        bad = [c for c in v if c not in CHECKS]
        if bad:
            raise ValueError(f"unknown check ids {bad}")
        return sorted(set(v))

    @model_validator(mode="after")
    def _geometry(self):
        if self.preset is None and (self.torus is None or self.profile is None or self.r is None):
            raise ValueError("without a preset, torus, profile and r are all required")
        return self

    def geometry(self) -> tuple[FlatTorus, RadialProfile, int]:
        preset = get_preset(self.preset) if self.preset else None
        torus = FlatTorus(tuple(self.torus)) if self.torus else preset.torus
        if self.profile is None:
            profile = preset.profile
        elif isinstance(self.profile, ProfileConfig):
            profile = self.profile.build()
        else:
            profile = profile_from_dict(self.profile)
        r = self.r if self.r is not None else preset.r
        return torus, profile, r

    def effort_sizes(self) -> Effort:
        return Effort.quick() if self.effort == "quick" else Effort()


class ConfigError(ValueError):
    pass


def load_config(path: str | None, overrides: dict) -> RunConfig:
    data = {}
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {path}: {err}") from None
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig.model_validate(data)
    except ValidationError as err:
        lines = [f"{'.'.join(str(p) for p in e['loc']) or '<root>'}: {e['msg']}" for e in err.errors()]
        raise ConfigError("invalid config:\n  " + "\n  ".join(lines)) from None


def config_hash(config: RunConfig) -> str:
    text = json.dumps(config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# --------------------------------------------------------------- commands


def cmd_orbits(config: RunConfig):
    torus, profile, r = config.geometry()
    families = enumerate_orbits(torus, profile)
    rng = np.random.default_rng(config.seed)
    landed, misses = {}, 0
    for _ in range(config.solver_seeds):
        try:
            rep = solve_critical(torus, profile, random_seed_loop(torus, r, rng), tol=config.tol, families=families)
        except RuntimeError:
            misses += 1
            continue
        if rep.matched_family is None:
            misses += 1
        else:
            key = ",".join(map(str, rep.matched_family.winding))
            landed[key] = landed.get(key, 0) + 1
    rows = [[",".join(map(str, f.winding)), f.radius, f.action, f.family_dim] for f in families]
    result = {
        "torus": torus.to_dict(),
        "profile": profile.params,
        "families": [f.to_dict() for f in families],
        "solver_seeds": config.solver_seeds,
        "solver_misses": misses,
        "solver_landings": dict(sorted(landed.items())),
    }
    return result, misses == 0, (["winding", "radius", "action", "family_dim"], rows)


def _central_difference(func, v, step=1e-6):
    out = np.zeros_like(v)
    for i in range(v.size):
        e = np.zeros_like(v)
        e[i] = step
        out[i] = (func(v + e) - func(v - e)) / (2 * step)
    return out


def cmd_grad_check(config: RunConfig):
    torus, profile, r = config.geometry()
    rng = np.random.default_rng(config.seed)
    rows = []
    for k in range(config.grad_loops):
        loop = random_admissible_loop(torus, r, rng, p_scale=0.5)
        exact = grad_Ar(torus, profile, loop)
        numeric = _central_difference(lambda v: action_Ar(torus, profile, loop.with_vector(v)), loop.vector())
        rows.append([k, float(np.linalg.norm(exact)), float(np.linalg.norm(exact - numeric) / np.linalg.norm(numeric))])
    worst = max(row[2] for row in rows)
    result = {"r": r, "loops": config.grad_loops, "max_relative_error": worst, "tolerance": config.grad_tol}
    return result, worst < config.grad_tol, (["loop", "grad_norm", "relative_error"], rows)


def cmd_spectrum(config: RunConfig):
    torus, profile, r = config.geometry()
    families = enumerate_orbits(torus, profile)
    rows, out, ok = [], [], True
    for fam in families:
        loop = dissect_orbit(torus, profile, fam, np.zeros(torus.dim), r)
        rep = inertia(hessian(torus, profile, loop))
        sus = suspension_check(torus, profile, loop)
        ok &= rep.stable and sus.passed and rep.n_zero >= torus.dim
        out.append({"winding": list(fam.winding), "action": fam.action, "inertia": list(rep.signature),
                    "stable": rep.stable, "suspension": sus.to_dict()})
        rows.append([",".join(map(str, fam.winding)), fam.action, *rep.signature, sus.passed])
    result = {"r": r, "families": out}
    return result, bool(ok), (["winding", "action", "n_neg", "n_zero", "n_pos", "suspension_passed"], rows)


def cmd_maslov(config: RunConfig):
    if config.loop is not None:
        loop = loop_from_dict(config.loop)
        expected = loop.expected_maslov() if isinstance(loop, StandardFormLoop) else None
    else:
        loop = StandardFormLoop.from_dims(*config.maslov_dims)
        expected = loop.expected_maslov()
    index = maslov_index(loop)
    result = {"maslov_index": index, "expected": expected, "n": loop.n}
    ok = expected is None or index == expected
    return result, ok, (["maslov_index", "expected"], [[index, expected]])


def cmd_stabilize(config: RunConfig):
    st = config.stabilize
    _, _, r = config.geometry()
    r = r if r % 2 else r + 1
    rep = stabilization_report(st.k, r, s_grid=st.s_grid)
    dp, dm, d0 = st.dims
    form = build_Br_gamma(st.n1, r, None, *coordinate_triple(dp, dm, d0))
    n_neg = form.inertia().n_neg
    expected = stdcal_negative_index(st.n1, dp + dm + d0, r, dp, d0)
    result = {"stabilization": rep.to_dict(), "B_gamma": {"n1": st.n1, "dims": list(st.dims), "r": r, "n_neg": n_neg,
                                                          "expected": expected}}
    rows = [[row["s"], row["n_neg"], row["n_neg"] - rep.base_neg, row["n_zero"]] for row in rep.rows]
    return result, rep.passed and n_neg == expected, (["s", "n_neg", "jump", "n_zero"], rows)


def _spec_from_dict(data: dict, r: int) -> IndexPairSpec:
    a, b = data["window"]
    cuts = tuple(Cutoff(c["kind"], c["s"], c["t"]) for c in data["cutoffs"])
    return IndexPairSpec(a, b, int(data.get("r", r)), cuts)


def cmd_index_pair(config: RunConfig):
    torus, profile, r = config.geometry()
    ip = config.index_pair
    spec = _spec_from_dict(ip.spec, r) if ip.spec else build_pair(torus, profile, r, ip.window, seed=config.seed)
    certs = [certify_exit(torus, profile, spec, ip.samples, config.seed + s) for s in ip.seeds]
    result = {"spec": spec.to_dict(), "certificates": [c.to_dict() for c in certs]}
    if ip.perturbation_ladder:
        eps, ladder = largest_passing_eps(torus, profile, spec, seed=config.seed)
        result["largest_passing_eps"] = eps
        result["ladder"] = ladder
    rows = [[c.seed, c.samples, c.exits_through_B, c.violations, c.returns, c.stalled] for c in certs]
    return result, all(c.passed for c in certs), (["seed", "samples", "exits_B", "violations", "returns", "stalled"], rows)


def cmd_verify(config: RunConfig):
    results = run_checks(config.checks, config.seed, config.effort_sizes())
    for res in results:
        print(res.line())
    rows = [[res.id, "PASS" if res.passed else "FAIL", res.title] for res in results]
    result = {"effort": config.effort_sizes().to_dict(), "checks": [res.to_dict() for res in results]}
    return result, all(res.passed for res in results), (["id", "status", "title"], rows)


COMMANDS = {
    "orbits": cmd_orbits,
    "grad-check": cmd_grad_check,
    "spectrum": cmd_spectrum,
    "maslov": cmd_maslov,
    "stabilize": cmd_stabilize,
    "index-pair": cmd_index_pair,
    "verify": cmd_verify,
}


# ----------------------------------------------------------------- output


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in clean(rows):
        writer.writerow(row)
    return buf.getvalue()


def build_report(command: str, config: RunConfig, result: dict, passed: bool) -> dict:
    return clean({
        "command": command,
        "passed": passed,
        "seed": config.seed,
        "config": config.model_dump(mode="json"),
        "config_hash": config_hash(config),
        "versions": {"actionlab": __version__, "numpy": np.__version__},
        "tolerances": {"tol": config.tol, "grad_tol": config.grad_tol},
        "result": result,
    })


def run(command: str, config: RunConfig, out: Path, want_json: bool = True, want_csv: bool = False) -> int:
    started = time.time()
    try:
        result, passed, table = COMMANDS[command](config)
    except SlopeHitsLengthSpectrum as err:
        print(f"SlopeHitsLengthSpectrum: {err}", file=sys.stderr)
        return 1
    report = build_report(command, config, result, bool(passed))
    out.mkdir(parents=True, exist_ok=True)
    stem = command.replace("-", "_")
    if want_json:
        (out / f"{stem}.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    if want_csv:
        (out / f"{stem}.csv").write_text(_csv_text(*table))
    meta = {"started_unix": started, "elapsed_s": time.time() - started, "argv": sys.argv[1:]}
    (out / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"{command}: {'pass' if passed else 'FAIL'} (seed {config.seed}) -> {out}")
    return 0 if passed else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="actionlab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="RunConfig JSON file")
    parser.add_argument("--out", default="reports", help="output directory (default: reports)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--r", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--json", dest="json", action="store_true", default=True, help="write the JSON report (default)")
    parser.add_argument("--no-json", dest="json", action="store_false")
    parser.add_argument("--csv", action="store_true", help="also write a CSV table")
    parser.add_argument("--quick", action="store_true", help="verify with reduced sample sizes")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    overrides = {"seed": args.seed, "r": args.r, "tol": args.tol, "effort": "quick" if args.quick else None}
    try:
        config = load_config(args.config, overrides)
    except ConfigError as err:
        print(err, file=sys.stderr)
        return 2
    return run(args.command, config, Path(args.out), args.json, args.csv)


if __name__ == "__main__":
    sys.exit(main())
