"""Declarative job runner and self-check entry point.

A job spec is a JSON object::

    {
      "base": {"p": 5, "f": 1, "precision": 10, "name": "F"},
      "extensions": [
        {"name": "E", "kind": "eisenstein", "over": "F", "poly": "x^2-5"},
        {"name": "U", "kind": "unramified", "over": "F", "degree": 3},
        {"name": "EU", "kind": "compositum", "of": ["E", "U"]}
      ],
      "characters": [
        {"name": "xi", "field": "E", "conductor": 3,
         "images": [[order, power], ...],
         "uniformizer": {"root": [order, power], "p_half_power": 0}}
      ],
      "params": [
        {"name": "m", "kind": "monomial", "E": "E", "F": "F", "xi": "xi", "chi": "chi"},
        {"name": "g", "kind": "phi", "of": "m"},
        {"name": "h", "kind": "gl", "E": "E", "F": "F", "theta": "xi", "beta": {"pi_power": -2}}
      ],
      "tasks": [{"id": "t1", "op": "gl_epsilon", "args": {"param": "g"}, "options": {}}],
      "guard": 400000
    }

Character images are angles ``power/order`` on the generators that
``print-generators`` lists for ``(field, conductor)``.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .characters import QuasiCharacter, beta_of_theta
from .cyclo import CycloNumber
from .epsilon import (
    SIGN_CONVENTION,
    EpsilonValue,
    GLParam,
    OracleRequired,
    conductor_pi,
    gauss_sum,
    gl_epsilon,
    lambda_tame,
    tate_epsilon,
)
from .langlands import (
    ConfigurationError,
    MonomialParam,
    PairInput,
    base_change,
    central_char,
    det_induced,
    pair_epsilon,
    pair_epsilon_galois,
    phi_forward,
)
from .localfield import (
    DEFAULT_GUARD,
    DEFAULT_PRECISION,
    FieldError,
    InstanceTooLarge,
    LocalField,
    PrecisionError,
    compositum,
    extend_eisenstein,
    extend_unramified,
    make_base,
    unit_group,
)

SCHEMA = "locfac-report/1"

EXIT_OK, EXIT_SPEC, EXIT_PRECISION, EXIT_SELFCHECK = 0, 2, 3, 4


class SpecError(Exception):
    """A job spec problem, carrying a machine-readable code and exit status."""

    def __init__(self, code: str, message: str, status: int = EXIT_SPEC):
        super().__init__(message)
        self.code = code
        self.status = status

    def to_json(self) -> dict:
        return {"error": {"code": self.code, "message": str(self)}}


def _need(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise SpecError("invalid-spec", f"{where}: missing '{key}'")
    return obj[key]


def _angle(pair, where: str) -> Fraction:
    try:
        order, power = pair
        return Fraction(int(power), int(order))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecError("invalid-spec", f"{where}: expected [order, power]") from exc


# ---------------------------------------------------------------------------
# spec resolution

class Context:
    """Fields, characters and parameters declared by a spec, built on demand."""

    def __init__(self, spec: dict):
        if not isinstance(spec, dict):
            raise SpecError("invalid-spec", "spec must be a JSON object")
        self.spec = spec
        self.guard = int(spec.get("guard", DEFAULT_GUARD))
        self._decl = {}
        for section in ("extensions", "characters", "params"):
            for item in spec.get(section, []):
                name = _need(item, "name", section)
                if name in self._decl:
                    raise SpecError("duplicate-name", f"name '{name}' declared twice")
                self._decl[name] = (section, item)
        base = _need(spec, "base", "spec")
        self.base_name = base.get("name", "F")
        if self.base_name in self._decl:
            raise SpecError("duplicate-name", f"name '{self.base_name}' declared twice")
        self._built: dict = {}
        self._building: list = []

    # generic lookup with cycle detection
    def get(self, name: str, section: str):
        if name == self.base_name and section == "extensions":
            if name not in self._built:
                b = self.spec["base"]
                try:
                    self._built[name] = make_base(int(_need(b, "p", "base")), int(b.get("f", 1)),
                                                  int(b.get("precision", DEFAULT_PRECISION)), name)
                except (FieldError, ValueError) as exc:
                    raise SpecError("invalid-field", f"base: {exc}") from exc
            return self._built[name]
        if name not in self._decl:
            raise SpecError("unresolved-ref", f"unknown {section[:-1]} '{name}'")
        kind, item = self._decl[name]
        if kind != section:
            raise SpecError("unresolved-ref", f"'{name}' is declared in {kind}, not {section}")
        if name in self._built:
            return self._built[name]
        if name in self._building:
            cycle = " -> ".join(self._building + [name])
            raise SpecError("cyclic-ref", f"dependency cycle {cycle}")
        self._building.append(name)
        try:
            obj = getattr(self, "_build_" + section)(item)
        finally:
            self._building.pop()
        self._built[name] = obj
        return obj

    def field(self, name: str) -> LocalField:
        return self.get(name, "extensions")

    def character(self, name: str) -> QuasiCharacter:
        return self.get(name, "characters")

    def param(self, name: str):
        return self.get(name, "params")

    def _build_extensions(self, item: dict) -> LocalField:
        name = item["name"]
        kind = _need(item, "kind", name)
        try:
            if kind == "unramified":
                return extend_unramified(self.field(_need(item, "over", name)), int(_need(item, "degree", name)), name)
            if kind == "eisenstein":
                return extend_eisenstein(self.field(_need(item, "over", name)), _need(item, "poly", name), name)
            if kind == "compositum":
                a, b = _need(item, "of", name)
                return compositum(self.field(a), self.field(b), name)
        except (FieldError, ValueError) as exc:
            raise SpecError("invalid-field", f"{name}: {exc}") from exc
        raise SpecError("invalid-spec", f"{name}: unknown extension kind '{kind}'")

    def _build_characters(self, item: dict) -> QuasiCharacter:
        name = item["name"]
        L = self.field(_need(item, "field", name))
        a = int(item.get("conductor", 0))
        if a > 1 and L.q ** (a - 1) > self.guard:
            raise SpecError("guard-limit", f"{name}: unit group table q^{a - 1} exceeds guard {self.guard}",
                            EXIT_PRECISION)
        images = [_angle(x, name) for x in item.get("images", [])]
        unif = item.get("uniformizer", {})
        pi_angle = _angle(unif.get("root", [1, 0]), name)
        try:
            chi = QuasiCharacter(L, a, images, pi_angle, int(unif.get("p_half_power", 0)))
        except ValueError as exc:
            raise SpecError("invalid-character", f"{name}: {exc}") from exc
        if chi.conductor != a:
            raise SpecError("invalid-character", f"{name}: declared conductor {a}, actual {chi.conductor}")
        return chi

    def _build_params(self, item: dict):
        name = item["name"]
        kind = _need(item, "kind", name)
        try:
            if kind == "monomial":
                chi = self.character(item["chi"]) if "chi" in item else None
                return MonomialParam(self.field(_need(item, "E", name)), self.field(_need(item, "F", name)),
                                     self.character(_need(item, "xi", name)), chi)
            if kind == "phi":
                m = self.param(_need(item, "of", name))
                if not isinstance(m, MonomialParam):
                    raise SpecError("invalid-param", f"{name}: 'of' must name a monomial parameter")
                return phi_forward(m)
            if kind == "gl":
                E, F = self.field(_need(item, "E", name)), self.field(_need(item, "F", name))
                theta = self.character(_need(item, "theta", name))
                chi = self.character(item["chi"]) if "chi" in item else QuasiCharacter.trivial(F)
                if item.get("level1"):
                    return GLParam(E, F, theta, None, chi, level1=True)
                beta = self._beta(E, item["beta"], name) if "beta" in item else beta_of_theta(theta)
                return GLParam(E, F, theta, beta, chi)
        except ConfigurationError as exc:
            raise SpecError("configuration", f"{name}: {exc}") from exc
        except (FieldError, ValueError) as exc:
            raise SpecError("invalid-param", f"{name}: {exc}") from exc
        raise SpecError("invalid-spec", f"{name}: unknown param kind '{kind}'")

    @staticmethod
    def _beta(E: LocalField, data: dict, name: str):
        if "pi_power" in data:
            return E.pi_power(int(data["pi_power"]))
        return E.element(_need(data, "coords", name + ".beta"), int(data.get("shift", 0)))

    def check_guard(self, size: int, what: str):
        if size > self.guard:
            raise SpecError("guard-limit", f"{what}: enumeration of size {size} exceeds guard {self.guard}",
                            EXIT_PRECISION)


# ---------------------------------------------------------------------------
# tasks

def _cyclo_option(data) -> CycloNumber:
    if "root" in data:
        return CycloNumber.root_of_unity(_angle(data["root"], "lambda_oracle"))
    return CycloNumber.from_json(data)


def _eps_json(e: EpsilonValue) -> dict:
    return e.to_json()


def _options(task: dict) -> dict:
    opts = dict(task.get("options", {}))
    conv = opts.pop("sign_convention", SIGN_CONVENTION)
    if conv != SIGN_CONVENTION:
        raise SpecError("invalid-option", f"sign_convention {conv!r} unsupported (only {SIGN_CONVENTION!r})")
    return opts


def _tate_size(L: LocalField, a: int) -> int:
    return (L.q - 1) * L.q ** max(a - 1, 0)


def _task_lambda_tame(ctx: Context, args: dict, opts: dict) -> tuple[dict, list]:
    E, F = ctx.field(_need(args, "E", "lambda_tame")), ctx.field(_need(args, "F", "lambda_tame"))
    try:
        lam = lambda_tame(E, F)
    except (ValueError, FieldError) as exc:
        raise SpecError("configuration", f"lambda_tame: {exc}") from exc
    return {"constant": lam.to_json()}, []


def _task_conductor(ctx, args, opts):
    chi = ctx.character(_need(args, "character", "conductor"))
    return {"conductor": chi.conductor}, []


def _task_gauss_sum(ctx, args, opts):
    chi = ctx.character(_need(args, "character", "gauss_sum"))
    ctx.check_guard(chi.field.q, "gauss_sum")
    try:
        return {"constant": gauss_sum(chi).to_json()}, []
    except ValueError as exc:
        raise SpecError("configuration", f"gauss_sum: {exc}") from exc


def _task_tate_epsilon(ctx, args, opts):
    chi = ctx.character(_need(args, "character", "tate_epsilon"))
    ctx.check_guard(_tate_size(chi.field, chi.conductor), "tate_epsilon")
    return {"epsilon": _eps_json(tate_epsilon(chi))}, []


def _task_gl_epsilon(ctx, args, opts):
    g = ctx.param(_need(args, "param", "gl_epsilon"))
    if isinstance(g, MonomialParam):
        g = phi_forward(g)
    trace: list = []
    lam = _cyclo_option(opts["lambda_oracle"]) if "lambda_oracle" in opts else None
    eps = gl_epsilon(g, wild_lambda=lam, trace=trace, variant=opts.get("variant", "corrected"))
    return {"epsilon": _eps_json(eps), "conductor": conductor_pi(g)}, trace


def _task_conductor_pi(ctx, args, opts):
    g = ctx.param(_need(args, "param", "conductor_pi"))
    if isinstance(g, MonomialParam):
        g = phi_forward(g)
    return {"conductor": conductor_pi(g)}, []


def _task_phi_forward(ctx, args, opts):
    m = ctx.param(_need(args, "param", "phi_forward"))
    if not isinstance(m, MonomialParam):
        raise SpecError("invalid-param", "phi_forward: needs a monomial parameter")
    g = phi_forward(m)
    same = det_induced(m) == central_char(g)
    return {"gl_param": g.to_json(), "determinant_matches_central_character": same}, []


def _task_base_change(ctx, args, opts):
    g = ctx.param(_need(args, "param", "base_change"))
    if isinstance(g, MonomialParam):
        g = phi_forward(g)
    K = ctx.field(_need(args, "field", "base_change"))
    return {"gl_param": base_change(g, K).to_json()}, []


def _task_pair_epsilon(ctx, args, opts):
    pi1 = ctx.param(_need(args, "pi1", "pair_epsilon"))
    m2 = ctx.param(_need(args, "m2", "pair_epsilon"))
    if isinstance(pi1, MonomialParam):
        pi1 = phi_forward(pi1)
    if not isinstance(m2, MonomialParam):
        raise SpecError("invalid-param", "pair_epsilon: m2 must be a monomial parameter")
    lam = _cyclo_option(opts["lambda_oracle"]) if "lambda_oracle" in opts else None
    trace: list = []
    eps = pair_epsilon(PairInput(pi1, m2), w=opts.get("w"), wild_lambda=lam, trace=trace,
                       variant=opts.get("variant", "corrected"))
    return {"epsilon": _eps_json(eps)}, trace


def _task_pair_epsilon_galois(ctx, args, opts):
    m1 = ctx.param(_need(args, "m1", "pair_epsilon_galois"))
    m2 = ctx.param(_need(args, "m2", "pair_epsilon_galois"))
    if not (isinstance(m1, MonomialParam) and isinstance(m2, MonomialParam)):
        raise SpecError("invalid-param", "pair_epsilon_galois: both arguments must be monomial")
    return {"epsilon": _eps_json(pair_epsilon_galois(m1, m2))}, []


def _task_unit_group(ctx, args, opts):
    L = ctx.field(_need(args, "field", "unit_group"))
    n = int(_need(args, "n", "unit_group"))
    return _generators_json(ctx, L, n), []


TASKS = {
    "lambda_tame": _task_lambda_tame,
    "conductor": _task_conductor,
    "gauss_sum": _task_gauss_sum,
    "tate_epsilon": _task_tate_epsilon,
    "gl_epsilon": _task_gl_epsilon,
    "conductor_pi": _task_conductor_pi,
    "phi_forward": _task_phi_forward,
    "base_change": _task_base_change,
    "pair_epsilon": _task_pair_epsilon,
    "pair_epsilon_galois": _task_pair_epsilon_galois,
    "unit_group": _task_unit_group,
}


def _generators_json(ctx: Context, L: LocalField, n: int) -> dict:
    if n > 1:
        ctx.check_guard(L.q ** (n - 1), f"unit group of {L.name} at level {n}")
    group = unit_group(L, n)
    return {
        "field": L.name, "n": n, "orders": list(group.orders),
        "generators": [g.to_json() for g in group.generators()],
    }


def run_task(ctx: Context, task: dict) -> dict:
    op = _need(task, "op", "task")
    if op not in TASKS:
        raise SpecError("unknown-op", f"unknown op '{op}'")
    opts = _options(task)
    try:
        result, trace = TASKS[op](ctx, task.get("args", {}), opts)
    except SpecError:
        raise
    except OracleRequired as exc:
        raise SpecError("oracle-required", f"{op}: {exc}") from exc
    except ConfigurationError as exc:
        raise SpecError("configuration", f"{op}: {exc}") from exc
    except InstanceTooLarge as exc:
        raise SpecError("guard-limit", f"{op}: {exc}", EXIT_PRECISION) from exc
    except PrecisionError as exc:
        raise SpecError("precision", f"{op}: {exc}", EXIT_PRECISION) from exc
    return {"id": task.get("id"), "op": op, "inputs": task, "result": result, "trace": trace}


def validate(ctx: Context) -> None:
    """Resolve every declared name before any task runs."""
    for section in ("extensions", "characters", "params"):
        for item in ctx.spec.get(section, []):
            ctx.get(item["name"], section)
    for task in ctx.spec.get("tasks", []):
        op = _need(task, "op", "task")
        if op not in TASKS:
            raise SpecError("unknown-op", f"unknown op '{op}'")
        _options(task)
        for key, ref in task.get("args", {}).items():
            if key == "n":
                continue
            if key in ("field", "E", "F"):
                ctx.field(ref)
            elif key == "character":
                ctx.character(ref)
            else:
                ctx.param(ref)


# worker processes rebuild the context once from the spec
_WORKER_CTX: Context | None = None


def _worker_init(spec: dict) -> None:
    global _WORKER_CTX
    _WORKER_CTX = Context(spec)


def _worker_run(index: int) -> dict:
    ctx = _WORKER_CTX
    try:
        return {"ok": run_task(ctx, ctx.spec["tasks"][index])}
    except SpecError as exc:
        return {"error": (exc.code, str(exc), exc.status)}


def _json_default(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, CycloNumber):
        return obj.to_json()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def run(spec: dict, workers: int = 1) -> dict:
    ctx = Context(spec)
    validate(ctx)
    tasks = spec.get("tasks", [])
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init, initargs=(spec,)) as pool:
            outs = list(pool.map(_worker_run, range(len(tasks))))
        results = []
        for out in outs:
            if "error" in out:
                code, msg, status = out["error"]
                raise SpecError(code, msg, status)
            results.append(out["ok"])
    else:
        results = [run_task(ctx, t) for t in tasks]
    groups = []
    for item in spec.get("characters", []):
        chi = ctx.character(item["name"])
        groups.append(dict(_generators_json(ctx, chi.field, chi.level), character=item["name"]))
    fields = [ctx.field(ctx.base_name).describe()]
    fields += [ctx.field(item["name"]).describe() for item in spec.get("extensions", [])]
    return {
        "schema": SCHEMA,
        "sign_convention": SIGN_CONVENTION,
        "fields": fields,
        "unit_groups": groups,
        "tasks": results,
    }


def selfcheck(profile: str = "small", faults: tuple = ()) -> dict:
    from .suites import BRANCHES, run_all

    results, cov = run_all(profile, faults)
    missing = [b for b in BRANCHES if cov.counts.get(b, 0) == 0]
    return {
        "schema": SCHEMA,
        "profile": profile,
        "faults": list(faults),
        "suites": [r.to_json() for r in results],
        "lines": [r.line() for r in results],
        "coverage": {"branches": dict(cov.counts), "missing": missing, "complete": not missing},
        "passed": all(r.passed for r in results) and not missing,
    }


# ---------------------------------------------------------------------------

def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SpecError("io", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError("invalid-json", f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="locfac", description="Exact local constants of supercuspidal parameters")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a JSON job spec")
    p_run.add_argument("spec")
    p_run.add_argument("--out")
    p_run.add_argument("--workers", type=int, default=1)
    p_self = sub.add_parser("selfcheck", help="run the consistency suites")
    p_self.add_argument("--profile", choices=["small", "full"], default="small")
    p_self.add_argument("--out")
    p_self.add_argument("--inject-fault", action="append", default=[], choices=["lambda"],
                        help="corrupt a reference table to check that the matching suite fails")
    p_gen = sub.add_parser("print-generators", help="list unit-group generators used to declare characters")
    p_gen.add_argument("spec")
    p_gen.add_argument("field")
    p_gen.add_argument("n", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            report = run(_load(args.spec), max(1, args.workers))
            _emit(dumps(report), args.out)
            return EXIT_OK
        if args.command == "print-generators":
            ctx = Context(_load(args.spec))
            _emit(dumps(_generators_json(ctx, ctx.field(args.field), args.n)), None)
            return EXIT_OK
        report = selfcheck(args.profile, tuple(args.inject_fault))
        for line in report["lines"]:
            print(line, file=sys.stderr)
        _emit(dumps(report), args.out)
        return EXIT_OK if report["passed"] else EXIT_SELFCHECK
    except SpecError as exc:
        sys.stdout.write(dumps(exc.to_json()))
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
