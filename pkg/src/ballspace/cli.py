"""``ballspace`` command line.

Reports are JSON on stdout with a fixed key order (``--human`` switches to
plain text); diagnostics go to stderr.  Exit codes: 0 all checks passed or
theorem certified, 1 a check or hypothesis failed, 2 structural or usage
error.
"""

from __future__ import annotations

import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import __version__
from .balls import (
    check_strongly_contractive,
    ck_assignment,
    ck_ball,
    ckinf_assignment,
    ckinf_ball,
    ckinf_singleton,
    ot_assignment,
    ot_ball,
    singleton_descent,
)
from .core import BallSpaceError, Violation, format_ext
from .functions import (
    LSC_NOTE,
    CkInfFunction,
    check_ot_axioms,
    ck_to_ot,
    generate_instance,
    generate_ot,
)
from .instance import InstanceFile, parse_instance, serialize_instance
from .lemmas import verify_instance
from .theorems import (
    CKINF_THEOREMS,
    MultiMap,
    SelfMap,
    Theorem,
    caristi_fp,
    caristi_fp_multi,
    ekeland_altered,
    ekeland_basic,
    ekeland_usual,
    flower_petal,
    oettli_thera,
    solve_ckinf,
    takahashi,
)

THEOREM_IDS = [t.value for t in Theorem] + [f"{t.value}-ckinf" for t in CKINF_THEOREMS]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Abort(Exception):
    """Structural problem detected while running a command (exit 2)."""


# -- report helpers -------------------------------------------------------


def _violation(v: Violation, labels) -> dict:
    return {
        "condition": v.condition,
        "witness": [labels[w] for w in v.witness],
        "detail": v.detail,
        "text": v.render(labels),
    }


def _check(name: str, violations, labels, **extra) -> dict:
    out = {"name": name, "verdict": "fail" if violations else "pass"}
    out.update(extra)
    out["violations"] = [_violation(v, labels) for v in violations]
    return out


def _members(members, labels) -> list[str]:
    return [labels[y] for y in sorted(members)]


def _trace(trace, labels) -> dict:
    return {
        "start": labels[trace.chain[0]],
        "terminal": labels[trace.terminal],
        "trace": trace.render(labels),
        "balls": [_members(b, labels) for b in trace.balls],
    }


def _render_human(report: dict) -> str:
    lines = [f"{report['command']}: {report['status'].upper()}"]
    if "error" in report:
        lines.append(f"  error: {report['error']}")
    for c in report.get("checks", []):
        lines.append(f"  [{c['verdict']}] {c['name']}")
        for key in ("infima", "lsc", "min", "ck_elements"):
            if key in c:
                val = c[key]
                if isinstance(val, dict):
                    val = ", ".join(f"{k}={v}" for k, v in val.items())
                elif isinstance(val, list):
                    val = ", ".join(val)
                lines.append(f"      {key}: {val}")
        for v in c["violations"]:
            lines.append(f"      {v['text']}  {v['detail']}".rstrip())
    for b in report.get("balls", []):
        lines.append(f"  B_{b['center']} = {{{','.join(b['members'])}}}")
    for t in report.get("traces", []):
        lines.append(f"  {t['trace']}   terminal {t['terminal']}")
    cert = report.get("certificate")
    if cert:
        lines.append(f"  theorem: {cert['theorem']}")
        lines.append(f"  witness: {cert['witness']}")
        if cert["trace"]:
            lines.append(f"  trace:   {cert['trace']['trace']}")
        for part in ("hypothesis", "conclusion"):
            for v in cert[part]:
                lines.append(f"  {part} failed: {v['text']}  {v['detail']}".rstrip())
    for inst in report.get("instances", []):
        bad = [r for r in inst["results"] if r["verdict"] != "pass"]
        lines.append(f"  seed {inst['seed']} ({inst['points']} points): {'ok' if not bad else 'FAIL'}")
        for r in bad:
            for v in r["violations"]:
                lines.append(f"      {r['name']}: {v['text']}")
    return "\n".join(lines) + "\n"


def _emit(report: dict, human: bool) -> None:
    text = _render_human(report) if human else json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    out = click.get_binary_stream("stdout")
    out.write(text.encode("utf-8"))
    out.flush()


def _finish(command: str, digest: dict | None, body: dict, failed: bool, human: bool):
    report = {"command": command}
    if digest is not None:
        report["instance"] = digest
    report.update(body)
    code = EXIT_FAIL if failed else EXIT_OK
    report["status"] = "fail" if failed else "pass"
    report["exit_code"] = code
    _emit(report, human)
    sys.exit(code)


def _error(command: str, message: str, human: bool):
    click.echo(f"ballspace {command}: {message}", err=True)
    _emit({"command": command, "status": "error", "error": message, "exit_code": EXIT_USAGE}, human)
    sys.exit(EXIT_USAGE)


def _load(path: str) -> tuple[InstanceFile, dict]:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise _Abort(f"instance is not UTF-8: {exc}") from None
    inst = parse_instance(text)
    digest = {"sha256": hashlib.sha256(raw).hexdigest(), "points": len(inst.labels)}
    return inst, digest


def _space(inst: InstanceFile):
    if inst.metric_violations():
        raise _Abort("metric axioms violated; run check-metric for details")
    return inst.space()


def _run(command: str, human: bool, fn):
    try:
        fn()
    except (_Abort, BallSpaceError) as exc:
        _error(command, str(exc), human)


human_option = click.option("--human", is_flag=True, help="Plain-text report instead of JSON.")
instance_arg = click.argument("instance", type=click.Path(exists=True, dir_okay=False))


@click.group()
@click.version_option(__version__)
def cli():
    """Verify ball-space properties and certify fixed-point theorems on finite instances."""


@cli.command("check-metric")
@instance_arg
@human_option
def check_metric(instance, human):
    """Check the metric axioms of the instance's distance matrix."""

    def go():
        inst, digest = _load(instance)
        violations = inst.metric_violations()
        _finish("check-metric", digest, {"checks": [_check("metric", violations, inst.labels)]}, bool(violations), human)

    _run("check-metric", human, go)


@cli.command("check-ot")
@instance_arg
@human_option
def check_ot(instance, human):
    """Check the OT axioms (an instance with ``ck`` is checked through its OT embedding)."""

    def go():
        inst, digest = _load(instance)
        space = _space(inst)
        phi = inst.ot_function()
        if phi is None:
            if inst.ck is None:
                raise _Abort("check-ot needs an 'ot' or 'ck' block")
            phi = ck_to_ot(inst.ck_function())
        report = check_ot_axioms(phi, space)
        labels = inst.labels
        checks = [
            _check(
                "ot-axioms",
                report.violations,
                labels,
                infima={labels[x]: format_ext(v) for x, v in enumerate(report.infima)},
                lsc=report.lsc,
            )
        ]
        _finish("check-ot", digest, {"checks": checks}, not report.ok, human)

    _run("check-ot", human, go)


@cli.command("check-ck")
@instance_arg
@human_option
def check_ck(instance, human):
    """Check a CK or CK-infinity function and the contractivity of its balls."""

    def go():
        inst, digest = _load(instance)
        space = _space(inst)
        labels = inst.labels
        checks = []
        if inst.ck is not None:
            varphi = inst.ck_function()
            checks.append(_check("ck-function", [], labels, min=str(min(varphi.values)), lsc=LSC_NOTE))
            checks.append(_check("ck-strongly-contractive", check_strongly_contractive(ck_assignment(space, varphi)), labels))
        elif inst.ckinf is not None:
            phit = inst.ckinf_function()
            elems = phit.ck_elements()
            checks.append(
                _check("ckinf-function", [], labels, min=str(min(phit.values)), lsc=LSC_NOTE,
                       ck_elements=[labels[x] for x in elems])
            )
            bad = []
            for x0 in elems:
                b0 = ckinf_ball(space, phit, x0).members
                bad += check_strongly_contractive(ckinf_assignment(space, phit, b0))
            checks.append(_check("ckinf-strongly-contractive", bad, labels))
        else:
            raise _Abort("check-ck needs a 'ck' or 'ckinf' block")
        failed = any(c["verdict"] == "fail" for c in checks)
        _finish("check-ck", digest, {"checks": checks}, failed, human)

    _run("check-ck", human, go)


def _ball_fn(inst: InstanceFile, space):
    if inst.ck is not None:
        phi = inst.ck_function()
        return "CK", lambda x: ck_ball(space, phi, x)
    if inst.ckinf is not None:
        phi = inst.ckinf_function()
        return "CK_INF", lambda x: ckinf_ball(space, phi, x)
    if inst.ot is not None:
        phi = inst.ot_function()
        return "OT", lambda x: ot_ball(space, phi, x)
    raise _Abort("instance has no ck, ckinf or ot block")


@cli.command("balls")
@instance_arg
@human_option
def balls_cmd(instance, human):
    """Print every ball B_x as a sorted member list."""

    def go():
        inst, digest = _load(instance)
        space = _space(inst)
        origin, ball = _ball_fn(inst, space)
        rows = [{"center": inst.labels[x], "members": _members(ball(x).members, inst.labels)} for x in space.points]
        _finish("balls", digest, {"origin": origin, "balls": rows}, False, human)

    _run("balls", human, go)


@cli.command("descend")
@instance_arg
@click.option("--start", help="Start label (default: every point).")
@human_option
def descend(instance, start, human):
    """Singleton descent from each start point."""

    def go():
        inst, digest = _load(instance)
        space = _space(inst)
        labels = inst.labels
        starts = list(space.points) if start is None else [space.index(start)]
        checks, traces = [], []
        if inst.ckinf is not None:
            phit = inst.ckinf_function()
            traces = [_trace(ckinf_singleton(space, phit, x), labels) for x in starts]
        else:
            if inst.ck is not None:
                asg = ck_assignment(space, inst.ck_function())
            elif inst.ot is not None:
                asg = ot_assignment(space, inst.ot_function())
            else:
                raise _Abort("instance has no ck, ckinf or ot block")
            violations = check_strongly_contractive(asg)
            checks.append(_check("strongly-contractive", violations, labels))
            if not violations:
                traces = [_trace(singleton_descent(asg, x, check=False), labels) for x in starts]
        _finish("descend", digest, {"checks": checks, "traces": traces}, any(c["verdict"] == "fail" for c in checks), human)

    _run("descend", human, go)


def _need(problem: dict, key: str, theorem: str):
    if key not in problem:
        raise _Abort(f"{theorem} needs problem.{key}")
    return problem[key]


def _solve(theorem_id: str, inst: InstanceFile, space):
    p = inst.problem
    if theorem_id.endswith("-ckinf"):
        theorem = Theorem(theorem_id[: -len("-ckinf")])
        if inst.ckinf is not None:
            phit = inst.ckinf_function()
        elif inst.ck is not None:
            phit = CkInfFunction(inst.ck)
        else:
            raise _Abort(f"{theorem_id} needs a 'ckinf' or 'ck' block")
        kwargs = {}
        if theorem is Theorem.CARISTI:
            kwargs["f"] = SelfMap(_need(p, "f", theorem_id))
        elif theorem is Theorem.CARISTI_MULTI:
            kwargs["F"] = MultiMap(_need(p, "F", theorem_id))
        elif theorem is Theorem.EKELAND_ALTERED:
            kwargs.update(gamma=_need(p, "gamma", theorem_id), x0=_need(p, "x0", theorem_id))
        elif theorem is Theorem.EKELAND_USUAL:
            kwargs.update(
                eps=_need(p, "eps", theorem_id), gamma=_need(p, "gamma", theorem_id),
                delta=_need(p, "delta", theorem_id), x0=_need(p, "x0", theorem_id),
            )
        return solve_ckinf(theorem, space, phit, **kwargs)

    theorem = Theorem(theorem_id)
    if theorem is Theorem.FLOWER_PETAL:
        return flower_petal(space, _need(p, "M", theorem_id), _need(p, "x0", theorem_id),
                            _need(p, "b", theorem_id), _need(p, "gamma", theorem_id))
    if inst.ot is not None:
        phi = inst.ot_function()
    elif inst.ck is not None:
        phi = ck_to_ot(inst.ck_function())
    else:
        raise _Abort(f"{theorem_id} needs an 'ot' or 'ck' block")
    if theorem is Theorem.CARISTI:
        return caristi_fp(space, phi, SelfMap(_need(p, "f", theorem_id)))
    if theorem is Theorem.CARISTI_MULTI:
        return caristi_fp_multi(space, phi, MultiMap(_need(p, "F", theorem_id)))
    if theorem is Theorem.EKELAND_BASIC:
        return ekeland_basic(space, phi)
    if theorem is Theorem.EKELAND_ALTERED:
        return ekeland_altered(space, phi, _need(p, "gamma", theorem_id), _need(p, "x0", theorem_id))
    if theorem is Theorem.EKELAND_USUAL:
        return ekeland_usual(space, phi, _need(p, "eps", theorem_id), _need(p, "gamma", theorem_id),
                             _need(p, "delta", theorem_id), _need(p, "x0", theorem_id))
    if theorem is Theorem.TAKAHASHI:
        return takahashi(space, phi, _need(p, "x0", theorem_id))
    return oettli_thera(space, phi, _need(p, "x0", theorem_id), _need(p, "psi", theorem_id))


@cli.command("solve")
@click.argument("theorem", type=click.Choice(THEOREM_IDS))
@instance_arg
@human_option
def solve(theorem, instance, human):
    """Certify THEOREM on INSTANCE (suffix -ckinf selects the CK-infinity form)."""
    command = f"solve {theorem}"

    def go():
        inst, digest = _load(instance)
        space = _space(inst)
        labels = inst.labels
        cert = _solve(theorem, inst, space)
        body = {
            "certificate": {
                "theorem": cert.theorem,
                "valid": cert.valid,
                "witness": None if cert.witness is None else labels[cert.witness],
                "trace": None if cert.trace is None else _trace(cert.trace, labels),
                "hypothesis": [_violation(v, labels) for v in cert.hypothesis],
                "conclusion": [_violation(v, labels) for v in cert.conclusion],
            }
        }
        _finish(command, digest, body, not cert.valid, human)

    _run(command, human, go)


def _size_for_seed(seed: int) -> int:
    return 2 + seed % 11


def _verify_generated(seed: int) -> dict:
    n = _size_for_seed(seed)
    g = generate_instance(seed, n)
    results = verify_instance(g.space, ck=g.ck, ckinf=g.ckinf, ot=g.ot)
    return _instance_results(seed, g.space.labels, results)


def _instance_results(seed, labels, results) -> dict:
    return {
        "seed": seed,
        "points": len(labels),
        "results": [
            {
                "name": r.name,
                "verdict": "pass" if r.ok else "fail",
                "checked": r.checked,
                "violations": [_violation(v, labels) for v in r.violations],
            }
            for r in results
        ],
    }


@cli.command("verify-lemmas")
@click.argument("instance", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", default=1, show_default=True, type=int, help="First seed for generated instances.")
@click.option("--count", default=20, show_default=True, type=click.IntRange(min=0), help="Number of generated instances.")
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1), help="Worker processes.")
@human_option
def verify_lemmas(instance, seed, count, jobs, human):
    """Run the property suite on INSTANCE, or on generated instances when none is given."""

    def go():
        if instance is not None:
            inst, digest = _load(instance)
            space = _space(inst)
            results = verify_instance(
                space, ck=inst.ck_function(), ckinf=inst.ckinf_function(), ot=inst.ot_function()
            )
            body = {"instances": [_instance_results(None, inst.labels, results)]}
        else:
            digest = None
            seeds = list(range(seed, seed + count))
            if jobs > 1:
                with ProcessPoolExecutor(max_workers=jobs) as pool:
                    rows = list(pool.map(_verify_generated, seeds))
            else:
                rows = [_verify_generated(s) for s in seeds]
            body = {"generator": {"seed": seed, "count": count}, "instances": rows}
        failed = any(r["verdict"] != "pass" for i in body["instances"] for r in i["results"])
        _finish("verify-lemmas", digest, body, failed, human)

    _run("verify-lemmas", human, go)


@cli.command("gen")
@click.argument("seed", type=int)
@click.argument("n", type=click.IntRange(min=1))
def gen(seed, n):
    """Write a generated OT instance (SEED, N points) to stdout."""
    try:
        space, phi = generate_ot(seed, n)
    except BallSpaceError as exc:
        _error("gen", str(exc), False)
    inst = InstanceFile(space.labels, space.dist, ot=phi.values)
    out = click.get_binary_stream("stdout")
    out.write(serialize_instance(inst).encode("utf-8"))
    out.flush()


def main(argv=None):
    cli.main(args=argv, prog_name="ballspace")


if __name__ == "__main__":
    main()
