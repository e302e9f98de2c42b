"""Random inputs that satisfy each theorem's hypotheses by construction."""

import random
from fractions import Fraction

from ballspace import (
    PLUS_INFINITY,
    CkInfFunction,
    MultiMap,
    OtFunction,
    SelfMap,
    ckinf_ball,
    generate_instance,
    ot_ball,
)
from ballspace.functions import shortest_path_closure


def size_for(seed):
    return 2 + seed % 11


def rng_for(tag, seed):
    return random.Random(f"support:{tag}:{seed}")


def moves(space, phi, x, y):
    # brute-force form of y in B_x, independent of the ball code
    return phi(x, y) is not PLUS_INFINITY and space.d(x, y) <= -phi(x, y)


def ckinf_moves(space, pt, x, y, gamma=1):
    if pt[x] is PLUS_INFINITY:
        return True
    return pt[y] is not PLUS_INFINITY and pt[y] + gamma * space.d(x, y) <= pt[x]


def self_map(rng, ball_of, points):
    return SelfMap(tuple(rng.choice(sorted(ball_of(x))) for x in points))


def multi_map(rng, ball_of, points):
    images = []
    for x in points:
        s = {rng.choice(sorted(ball_of(x)))}
        s |= {y for y in points if rng.random() < 0.3}
        images.append(frozenset(s))
    return MultiMap(tuple(images))


def ot_inputs(seed):
    """Generated instance plus maps drawn from its OT balls."""
    g = generate_instance(seed, size_for(seed))
    rng = rng_for("ot", seed)
    ball = lambda x: ot_ball(g.space, g.ot, x).members
    return g, self_map(rng, ball, g.space.points), multi_map(rng, ball, g.space.points), rng


def ckinf_inputs(seed):
    g = generate_instance(seed, size_for(seed))
    rng = rng_for("ckinf", seed)
    ball = lambda x: ckinf_ball(g.space, g.ckinf, x).members
    return g, self_map(rng, ball, g.space.points), multi_map(rng, ball, g.space.points), rng


def gamma_draw(rng):
    return Fraction(rng.randint(1, 12), rng.randint(1, 4))


def usual_params(phi, x0, gamma):
    eps = max(Fraction(0), -phi.row_min(x0))
    return eps, gamma, eps / gamma


def takahashi_ot(space, rng):
    """Closure of ``k d(y,m) - k d(x,m)`` plus nonnegative noise with zero weight into m.

    Every point other than m moves straight to m, and row m has minimum 0.
    """
    n = len(space)
    m = rng.randrange(n)
    k = rng.randint(1, 3)
    p = [k * space.d(x, m) for x in space.points]
    w = []
    for x in space.points:
        row = []
        for y in space.points:
            if x == y or y == m:
                row.append(p[y] - p[x])
            elif rng.random() < 0.15:
                row.append(PLUS_INFINITY)
            else:
                row.append(p[y] - p[x] + Fraction(rng.randint(0, 8), 4))
        w.append(row)
    return OtFunction(tuple(tuple(r) for r in shortest_path_closure(w))), m


def takahashi_ckinf(space, rng):
    n = len(space)
    m = rng.randrange(n)
    k = rng.randint(1, 3)
    vals = [
        PLUS_INFINITY if x != m and rng.random() < 0.25 else k * space.d(x, m)
        for x in space.points
    ]
    return CkInfFunction(tuple(vals)), m


def oettli_psi(space, phi, x0, rng):
    """Immovable points of B_x0 plus a random extra set."""
    b0 = [x for x in space.points if moves(space, phi, x0, x)]
    stuck = {x for x in b0 if not any(y != x and moves(space, phi, x, y) for y in space.points)}
    return frozenset(stuck | {y for y in space.points if rng.random() < 0.3})


def petal_config(space, rng):
    n = len(space)
    b = rng.randrange(n)
    rest = [x for x in space.points if x != b]
    M = frozenset(rng.sample(rest, rng.randint(1, len(rest))))
    return M, rng.choice(sorted(M)), b, gamma_draw(rng)


# golden instance per solver id
GOLDEN_FOR = {
    "caristi": "caristi.json",
    "caristi-multi": "caristi_multi.json",
    "ekeland-basic": "ck3.json",
    "ekeland-altered": "ekeland_altered.json",
    "ekeland-usual": "ekeland_usual.json",
    "flower-petal": "flower_petal.json",
    "takahashi": "takahashi.json",
    "oettli-thera": "oettli_thera.json",
    "caristi-ckinf": "ckinf.json",
    "caristi-multi-ckinf": "ckinf.json",
    "ekeland-basic-ckinf": "ckinf.json",
    "ekeland-altered-ckinf": "ckinf.json",
    "ekeland-usual-ckinf": "ckinf.json",
    "takahashi-ckinf": "ckinf.json",
}

# planted hypothesis violations: solver id, file, expected hypothesis witnesses
PLANTED = [
    ("caristi", "caristi_violation.json", [("caristi", (1,))]),
    ("caristi-ckinf", "caristi_violation.json", [("caristi", (1,))]),
    ("caristi-multi", "caristi_multi_violation.json", [("caristi-multi", (1,)), ("caristi-multi", (2,))]),
    ("caristi-multi-ckinf", "caristi_multi_violation.json", [("caristi-multi", (1,)), ("caristi-multi", (2,))]),
    ("takahashi", "takahashi_violation.json", [("takahashi", (1,))]),
    ("oettli-thera", "oettli_thera_violation.json", [("oettli-thera", (2,))]),
    ("ekeland-basic", "truncated_counterexample.json", [("OT(c)", (0, 1, 2)), ("OT(c)", (0, 1, 3)), ("OT(c)", (0, 2, 3))]),
]


def _ext_lt(u, v):
    if v is PLUS_INFINITY:
        return u is not PLUS_INFINITY
    return u is not PLUS_INFINITY and u < v


def ot_conclusion_holds(theorem, space, phi, a, *, f=None, F=None, gamma=None, x0=None, eps=None, delta=None, psi=None):
    """Brute-force re-check of an OT-form conclusion for witness a."""
    pts = space.points
    if theorem == "caristi":
        return f(a) == a
    if theorem == "caristi-multi":
        return a in F(a)
    if theorem == "ekeland-basic":
        return all(not moves(space, phi, a, x) for x in pts if x != a)
    if theorem == "ekeland-altered":
        strict = all(
            phi(a, x) is PLUS_INFINITY or gamma * space.d(a, x) > -phi(a, x) for x in pts if x != a
        )
        return strict and phi(x0, a) is not PLUS_INFINITY and gamma * space.d(x0, a) <= -phi(x0, a)
    if theorem == "ekeland-usual":
        if space.d(a, x0) > delta:
            return False
        at_a = phi(a, a)
        return all(_ext_lt(at_a, phi(a, x) if phi(a, x) is PLUS_INFINITY else phi(a, x) + gamma * space.d(x, a))
                   for x in pts if x != a)
    if theorem == "takahashi":
        return moves(space, phi, x0, a) and min(phi(a, x) for x in pts if phi(a, x) is not PLUS_INFINITY) == 0
    if theorem == "oettli-thera":
        return moves(space, phi, x0, a) and a in psi
    raise KeyError(theorem)


def petal_conclusion_holds(space, M, x0, b, gamma, a):
    def inside(p, y):
        return gamma * space.d(y, p) + space.d(y, b) <= space.d(p, b)

    return a in M and inside(x0, a) and all(not inside(a, y) for y in M if y != a)


def ckinf_conclusion_holds(theorem, space, pt, a, *, f=None, F=None, gamma=None, x0=None, eps=None, delta=None):
    pts = space.points
    if pt[a] is PLUS_INFINITY:
        return False

    def strict(g):
        return all(_ext_lt(pt[a], pt[x] if pt[x] is PLUS_INFINITY else pt[x] + g * space.d(a, x)) for x in pts if x != a)

    if theorem == "caristi":
        return f(a) == a
    if theorem == "caristi-multi":
        return a in F(a)
    if theorem == "ekeland-basic":
        return strict(1)
    if theorem == "ekeland-altered":
        return strict(gamma) and ckinf_moves(space, pt, x0, a, gamma)
    if theorem == "ekeland-usual":
        return space.d(a, x0) <= delta and strict(gamma)
    if theorem == "takahashi":
        return pt[a] == min(v for v in pt.values if v is not PLUS_INFINITY)
    raise KeyError(theorem)


def generated_case(theorem_id, seed):
    """Hypothesis-satisfying inputs for ``theorem_id`` on generated instance ``seed``.

    Returns ``(run, holds)``: ``run()`` gives the certificate and
    ``holds(a)`` re-checks the conclusion for a witness by brute force.
    """
    from ballspace import (
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

    if theorem_id.endswith("-ckinf"):
        name = theorem_id[: -len("-ckinf")]
        g, f, F, rng = ckinf_inputs(seed)
        space, pt = g.space, g.ckinf
        kw = {}
        if name == "caristi":
            kw = {"f": f}
        elif name == "caristi-multi":
            kw = {"F": F}
        elif name == "ekeland-altered":
            kw = {"gamma": gamma_draw(rng), "x0": rng.choice(space.points)}
        elif name == "ekeland-usual":
            x0 = rng.choice(pt.ck_elements())
            gamma = gamma_draw(rng)
            eps = pt[x0] - min(pt[x] for x in pt.ck_elements())
            kw = {"gamma": gamma, "x0": x0, "eps": eps, "delta": eps / gamma}
        elif name == "takahashi":
            pt, _ = takahashi_ckinf(space, rng)
        start = rng.choice(space.points)
        return (
            lambda: solve_ckinf(name, space, pt, start=start, **kw),
            lambda a: ckinf_conclusion_holds(name, space, pt, a, **kw),
        )

    g, f, F, rng = ot_inputs(seed)
    space, phi = g.space, g.ot
    x0 = rng.choice(space.points)
    if theorem_id == "caristi":
        return lambda: caristi_fp(space, phi, f), lambda a: ot_conclusion_holds("caristi", space, phi, a, f=f)
    if theorem_id == "caristi-multi":
        return lambda: caristi_fp_multi(space, phi, F), lambda a: ot_conclusion_holds("caristi-multi", space, phi, a, F=F)
    if theorem_id == "ekeland-basic":
        return lambda: ekeland_basic(space, phi, x0), lambda a: ot_conclusion_holds("ekeland-basic", space, phi, a)
    if theorem_id == "ekeland-altered":
        gamma = gamma_draw(rng)
        return (
            lambda: ekeland_altered(space, phi, gamma, x0),
            lambda a: ot_conclusion_holds("ekeland-altered", space, phi, a, gamma=gamma, x0=x0),
        )
    if theorem_id == "ekeland-usual":
        eps, gamma, delta = usual_params(phi, x0, gamma_draw(rng))
        return (
            lambda: ekeland_usual(space, phi, eps, gamma, delta, x0),
            lambda a: ot_conclusion_holds("ekeland-usual", space, phi, a, gamma=gamma, x0=x0, delta=delta),
        )
    if theorem_id == "flower-petal":
        M, p0, b, gamma = petal_config(space, rng)
        return lambda: flower_petal(space, M, p0, b, gamma), lambda a: petal_conclusion_holds(space, M, p0, b, gamma, a)
    if theorem_id == "takahashi":
        tphi, _ = takahashi_ot(space, rng)
        return lambda: takahashi(space, tphi, x0), lambda a: ot_conclusion_holds("takahashi", space, tphi, a, x0=x0)
    if theorem_id == "oettli-thera":
        psi = oettli_psi(space, phi, x0, rng)
        return lambda: oettli_thera(space, phi, x0, psi), lambda a: ot_conclusion_holds("oettli-thera", space, phi, a, x0=x0, psi=psi)
    raise KeyError(theorem_id)


# exit codes expected from each command on each golden file; files not listed give 0
EXPECTED_EXIT = {
    ("asymmetric_metric.json", "check-metric"): 1,
    ("asymmetric_metric.json", "check-ot"): 2,
    ("asymmetric_metric.json", "check-ck"): 2,
    ("asymmetric_metric.json", "balls"): 2,
    ("asymmetric_metric.json", "descend"): 2,
    ("ckinf.json", "check-ot"): 2,
    ("flower_petal.json", "check-ot"): 2,
    ("flower_petal.json", "check-ck"): 2,
    ("flower_petal.json", "balls"): 2,
    ("flower_petal.json", "descend"): 2,
    ("truncated_counterexample.json", "check-ot"): 1,
    ("truncated_counterexample.json", "check-ck"): 2,
    ("single_point.json", "check-ck"): 2,
    ("takahashi_violation.json", "check-ck"): 2,
}

SUITE_COMMANDS = ("check-metric", "check-ot", "check-ck", "balls", "descend", "verify-lemmas")


def golden_files():
    from conftest import GOLDEN

    return sorted(GOLDEN.glob("*.json"))


def run_cli(args):
    """Run the CLI in-process; returns (exit code, stdout bytes)."""
    from click.testing import CliRunner

    from ballspace.cli import cli

    result = CliRunner().invoke(cli, [str(a) for a in args])
    return result.exit_code, result.stdout_bytes


def cli_suite():
    """Every command and every solver on every golden file, as {args: (exit, bytes)}."""
    from ballspace.cli import THEOREM_IDS

    out = {}
    for path in golden_files():
        for command in SUITE_COMMANDS:
            out[(command, path.name)] = run_cli([command, path])
        for theorem in THEOREM_IDS:
            out[("solve", theorem, path.name)] = run_cli(["solve", theorem, path])
    return out
