"""Named checks over a parsed model file, and their reports.

Every check takes the parsed file and a tuple of argument names.  A final
argument ``twisted`` runs the check on the twisted model instead of the base.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .exterior import CoframeModel, Form, Report, VectorValuedTwoForm, exterior_derivative, validate_model
from .hermitian import (
    apply_all,
    bismut_torsion,
    is_skt,
    kaehler_form,
    nijenhuis,
    torsion_form,
)
from .modelfile import CheckCall, ModelFile
from .quaternionic import (
    hkt_twist_condition,
    hypercomplex_twist_condition,
    is_hkt,
    is_hypercomplex,
    is_instanton,
    sl_volume_check,
    volume_twist_condition,
)
from .scalar import Scalar
from .twist import (
    bracket_nijenhuis,
    build_twisted_model,
    dc11_transfer,
    dc_transfer,
    dual_twist_data,
    nijenhuis_transfer,
    torsion_transfer,
    twist_integrability,
    validate_twist_data,
)

__all__ = [
    "SCHEMA",
    "DEFAULT_SEED",
    "CheckReport",
    "CheckError",
    "CHECKS",
    "run_check",
    "run_checks",
    "machine_report",
    "text_report",
]

SCHEMA = "twistkit.report/1"
DEFAULT_SEED = 20240101


class CheckError(ValueError):
    """Bad check invocation: unknown check, wrong arguments, missing data."""


@dataclass
class CheckReport:
    check: str
    verdict: str  # "pass" | "fail" | "error"
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, str] = field(default_factory=dict)
    error: str | None = None
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        # timing is left out so that reports are reproducible byte for byte
        out = {"check": self.check, "verdict": self.verdict, "checks": self.checks, "witnesses": self.witnesses}
        if self.error is not None:
            out["error"] = self.error
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "CheckReport":
        d = json.loads(line)
        return cls(d["check"], d["verdict"], d.get("checks", {}), d.get("witnesses", {}), d.get("error"))


class _Context:
    """Parsed file plus lazily built derived data, shared between checks."""

    def __init__(self, mf: ModelFile, seed: int):
        self.mf = mf
        self.seed = seed
        self._W = None

    @property
    def M(self) -> CoframeModel:
        return self.mf.model

    @property
    def T(self):
        if self.mf.twist is None:
            raise CheckError("the file has no [TWIST] section")
        return self.mf.twist

    @property
    def W(self) -> CoframeModel:
        if self._W is None:
            self._W = build_twisted_model(self.M, self.T)
        return self._W

    def target(self, args) -> tuple[CoframeModel, tuple]:
        if args and args[-1] == "twisted":
            return self.W, args[:-1]
        return self.M, args

    def _lookup(self, table: dict, name: str, kind: str):
        if name not in table:
            known = ", ".join(sorted(table)) or "none"
            raise CheckError(f"unknown {kind} {name!r} (declared: {known})")
        return table[name]

    def complex(self, name):
        return self._lookup(self.mf.structures.complex, name, "complex structure")

    def metric(self, name):
        return self._lookup(self.mf.structures.metrics, name, "metric")

    def triple(self, name):
        self._lookup(self.mf.structures.hypercomplex, name, "hypercomplex triple")
        return self.mf.structures.triple(name)

    def form(self, name):
        return self._lookup(self.mf.structures.forms, name, "form")


def _arity(args, n, usage):
    if len(args) != n:
        raise CheckError(f"expected {usage}")


def _fmt(model: CoframeModel, value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (Form, VectorValuedTwoForm, Scalar)):
        return model.format(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(model, v) for v in value) + "]"
    return str(value)


def _from_report(model: CoframeModel, rep: Report):
    return dict(rep.checks), {k: _fmt(model, v) for k, v in rep.witnesses.items()}


# -- individual checks ------------------------------------------------------------
# each returns (checks: dict[str, bool], witnesses: dict[str, str])

def _validate_model(ctx, args):
    M, args = ctx.target(args)
    _arity(args, 0, "validate_model or validate_model(twisted)")
    return _from_report(M, validate_model(M))


def _validate_twist_data(ctx, args):
    _arity(args, 0, "no arguments")
    return _from_report(ctx.M, validate_twist_data(ctx.M, ctx.T))


def _twist_integrability(ctx, args):
    _arity(args, 1, "twist_integrability(I)")
    return _from_report(ctx.M, twist_integrability(ctx.M, ctx.T, ctx.complex(args[0]), ctx.mf.orbit))


def _nijenhuis(ctx, args):
    M, args = ctx.target(args)
    _arity(args, 1, "nijenhuis(I) or nijenhuis(I, twisted)")
    N = nijenhuis(M, ctx.complex(args[0]))
    return {"N = 0": N.is_zero()}, {"N": _fmt(M, N)}


def _nijenhuis_transfer(ctx, args):
    _arity(args, 1, "nijenhuis_transfer(I)")
    Jc = ctx.complex(args[0])
    direct = nijenhuis(ctx.W, Jc)
    predicted = nijenhuis_transfer(ctx.M, ctx.T, Jc)
    # the bracket rule reproduces the formula; the model built from d_W has the opposite sign on F
    N_I = nijenhuis(ctx.M, Jc)
    return ({"N_W = N_I + (1 - L_I) F": direct == predicted},
            {"N_W": _fmt(ctx.W, direct), "N_I + (1 - L_I) F": _fmt(ctx.M, predicted),
             "N_W = N_I - (1 - L_I) F": _fmt(ctx.M, direct == N_I - (predicted - N_I)),
             "bracket rule gives N_I + (1 - L_I) F": _fmt(ctx.M, bracket_nijenhuis(ctx.M, ctx.T, Jc) == predicted)})


def _kaehler(ctx, args):
    M, args = ctx.target(args)
    _arity(args, 2, "kaehler(g, I) or kaehler(g, I, twisted)")
    d_omega = exterior_derivative(M, kaehler_form(ctx.metric(args[0]), ctx.complex(args[1])))
    return {"domega = 0": d_omega.is_zero()}, {"domega": _fmt(M, d_omega)}


def _bismut_torsion(ctx, args):
    M, args = ctx.target(args)
    _arity(args, 2, "bismut_torsion(g, I) or bismut_torsion(g, I, twisted)")
    c = bismut_torsion(M, ctx.metric(args[0]), ctx.complex(args[1]))
    return {"integrable": True}, {"c": _fmt(M, c)}


def _is_skt(ctx, args):
    M, args = ctx.target(args)
    _arity(args, 2, "is_skt(g, I) or is_skt(g, I, twisted)")
    return _from_report(M, is_skt(M, ctx.metric(args[0]), ctx.complex(args[1])))


def _strong_torsion(ctx, args):
    # dc = 0 for c = -I d omega, with no integrability requirement
    M, args = ctx.target(args)
    _arity(args, 2, "strong_torsion(g, I) or strong_torsion(g, I, twisted)")
    c = torsion_form(M, ctx.metric(args[0]), ctx.complex(args[1]))
    dc = exterior_derivative(M, c)
    return {"dc = 0": dc.is_zero()}, {"c": _fmt(M, c), "dc": _fmt(M, dc)}


def _torsion_transfer(ctx, args):
    _arity(args, 2, "torsion_transfer(g, I)")
    g, Jc = ctx.metric(args[0]), ctx.complex(args[1])
    direct = bismut_torsion(ctx.W, g, Jc)
    predicted = torsion_transfer(ctx.M, ctx.T, g, Jc)
    return ({"c_W = c - a^-1 IF ^ xi^flat": direct == predicted},
            {"c_W": _fmt(ctx.W, direct), "c - a^-1 IF ^ xi^flat": _fmt(ctx.M, predicted)})


def _dc_transfer(ctx, args):
    _arity(args, 2, "dc_transfer(g, I)")
    g, Jc = ctx.metric(args[0]), ctx.complex(args[1])
    c_W = bismut_torsion(ctx.W, g, Jc)
    direct = exterior_derivative(ctx.W, c_W)
    predicted = dc_transfer(ctx.M, ctx.T, g, Jc)
    checks = {"dc_W = predicted dc_W": direct == predicted}
    wit = {"dc_W": _fmt(ctx.W, direct), "c_W": _fmt(ctx.W, c_W)}
    if all(apply_all(Jc, F) == F for F in ctx.T.F):
        # instanton case: the short form must agree as well
        short = dc11_transfer(ctx.M, ctx.T, g, Jc)
        checks["instanton formula = general formula"] = short == predicted
        wit["instanton formula"] = _fmt(ctx.M, short)
    return checks, wit


def _is_hypercomplex(ctx, args):
    M, args = ctx.target(args)
    _arity(args, 1, "is_hypercomplex(H) or is_hypercomplex(H, twisted)")
    return _from_report(M, is_hypercomplex(M, ctx.triple(args[0])))


def _is_hkt(ctx, args):
    M, args = ctx.target(args)
    _arity(args, 2, "is_hkt(g, H) or is_hkt(g, H, twisted)")
    return _from_report(M, is_hkt(M, ctx.metric(args[0]), ctx.triple(args[1])))


def _hkt_twist_condition(ctx, args):
    _arity(args, 2, "hkt_twist_condition(g, H)")
    return _from_report(ctx.M, hkt_twist_condition(ctx.M, ctx.T, ctx.metric(args[0]), ctx.triple(args[1])))


def _hypercomplex_twist_condition(ctx, args):
    _arity(args, 1, "hypercomplex_twist_condition(H)")
    return _from_report(ctx.M, hypercomplex_twist_condition(ctx.T, ctx.triple(args[0]), ctx.M))


def _is_instanton(ctx, args):
    _arity(args, 1, "is_instanton(H)")
    ok = is_instanton(ctx.T.F, ctx.triple(args[0]))
    return {"F in S^2 E": ok}, {}


def _volume_twist_condition(ctx, args):
    _arity(args, 2, "volume_twist_condition(I, Theta)")
    rep = volume_twist_condition(ctx.M, ctx.T, ctx.complex(args[0]), ctx.form(args[1]))
    return _from_report(ctx.M, rep)


def _sl_volume_check(ctx, args):
    M, args = ctx.target(args)
    _arity(args, 2, "sl_volume_check(H, Theta) or sl_volume_check(H, Theta, twisted)")
    return _from_report(M, sl_volume_check(M, ctx.triple(args[0]), ctx.form(args[1])))


def _round_trip(ctx, args):
    _arity(args, 0, "no arguments")
    M, T, W = ctx.M, ctx.T, ctx.W
    dual = dual_twist_data(M, T)
    rep = validate_twist_data(W, dual)
    back = build_twisted_model(W, dual)
    checks = {
        "dual data valid": rep.passed,
        "zeta _| F_W = -d(a^-1)": rep.checks.get("da = -xi _| F", False),
        "untwist recovers d": back == M,
    }
    wit = {"zeta": _fmt(W, list(dual.xi)), "F_W": _fmt(W, list(dual.F))}
    return checks, wit


def _random_form(rng: random.Random, M: CoframeModel) -> Form:
    degree = rng.randint(0, M.dim - 1) if M.dim else 0
    out = Form.zero(degree)
    for _ in range(3):
        idx = sorted(rng.sample(range(M.dim), degree))
        coeff = Scalar(rng.randint(-3, 3))
        for x in M.coordinates:
            coeff = coeff + Scalar.var(x) * rng.randint(-2, 2)
        out = out + Form.basis(*idx) * coeff if degree else out + Form.function(coeff)
    return out


def _d_squared(ctx, args):
    if len(args) > 1:
        raise CheckError("expected d_squared or d_squared(samples)")
    samples = int(args[0]) if args else 20
    rng = random.Random(ctx.seed)
    models = [("M", ctx.M)] + ([("W", ctx.W)] if ctx.mf.twist is not None else [])
    checks, wit = {}, {}
    for label, model in models:
        bad = None
        for _ in range(samples):
            alpha = _random_form(rng, model)
            dd = exterior_derivative(model, exterior_derivative(model, alpha))
            if not dd.is_zero():
                bad = alpha
                break
        checks[f"d^2 = 0 on {label}"] = bad is None
        if bad is not None:
            wit[f"counterexample on {label}"] = _fmt(model, bad)
    return checks, wit


CHECKS: dict[str, Callable] = {
    "validate_model": _validate_model,
    "validate_twist_data": _validate_twist_data,
    "twist_integrability": _twist_integrability,
    "nijenhuis": _nijenhuis,
    "nijenhuis_transfer": _nijenhuis_transfer,
    "kaehler": _kaehler,
    "bismut_torsion": _bismut_torsion,
    "is_skt": _is_skt,
    "strong_torsion": _strong_torsion,
    "torsion_transfer": _torsion_transfer,
    "dc_transfer": _dc_transfer,
    "is_hypercomplex": _is_hypercomplex,
    "is_hkt": _is_hkt,
    "hkt_twist_condition": _hkt_twist_condition,
    "hypercomplex_twist_condition": _hypercomplex_twist_condition,
    "is_instanton": _is_instanton,
    "volume_twist_condition": _volume_twist_condition,
    "sl_volume_check": _sl_volume_check,
    "round_trip": _round_trip,
    "d_squared": _d_squared,
}


def run_check(ctx: _Context, call: CheckCall) -> CheckReport:
    start = time.perf_counter()
    try:
        fn = CHECKS.get(call.name)
        if fn is None:
            raise CheckError(f"unknown check {call.name!r}")
        checks, wit = fn(ctx, call.args)
        verdict = "pass" if all(checks.values()) else "fail"
        rep = CheckReport(str(call), verdict, checks, wit)
    except Exception as exc:  # a failing precondition must not stop the other checks
        rep = CheckReport(str(call), "error", error=f"{type(exc).__name__}: {exc}")
    rep.seconds = time.perf_counter() - start
    return rep


def run_checks(mf: ModelFile, only=None, seed: int = DEFAULT_SEED, jobs: int = 1) -> list[CheckReport]:
    """Run the file's checks in order; ``only`` filters by check name."""
    calls = [c for c in mf.checks if not only or c.name in only or str(c) in only]
    ctx = _Context(mf, seed)
    if jobs > 1 and len(calls) > 1:
        if mf.twist is not None:
            try:
                ctx.W  # build once before the threads share it
            except Exception:
                pass
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda c: run_check(ctx, c), calls))
    return [run_check(ctx, c) for c in calls]


def machine_report(reports: list[CheckReport], source: str, model_name: str | None, seed: int) -> str:
    """Line-delimited JSON: a header, one line per check, and a summary."""
    counts = {v: sum(r.verdict == v for r in reports) for v in ("pass", "fail", "error")}
    lines = [json.dumps({"schema": SCHEMA, "file": source, "model": model_name, "seed": seed})]
    lines += [r.to_json() for r in reports]
    lines.append(json.dumps({"summary": counts}))
    return "\n".join(lines) + "\n"


def text_report(reports: list[CheckReport], source: str, model_name: str | None, seed: int) -> str:
    out = [f"{source}: model {model_name or '?'} (seed {seed})"]
    for r in reports:
        out.append(f"{r.verdict.upper():5} {r.check}  [{r.seconds * 1000:.0f} ms]")
        if r.error:
            out.append(f"      error: {r.error}")
        for name, ok in r.checks.items():
            out.append(f"      {'ok  ' if ok else 'FAIL'} {name}")
        for name, text in r.witnesses.items():
            out.append(f"      {name} = {text}")
    counts = {v: sum(r.verdict == v for r in reports) for v in ("pass", "fail", "error")}
    out.append(f"{counts['pass']} passed, {counts['fail']} failed, {counts['error']} errors")
    return "\n".join(out) + "\n"
