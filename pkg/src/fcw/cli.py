"""
Command-line driver.

    fcw baker scene.json
    fcw aw scene.json --deg 6
    fcw dw scene.json --order 2 --deg 2
    fcw dual scene.json
    fcw codim scene.json --order 6 --deg 8
    fcw gamma scene.json --p "z^2"
    fcw cm-check scene.json
    fcw verify --suite core

Exit status: 0 when every requested check passes, 1 when a check fails,
2 for unreadable or invalid input.
"""

import argparse
import json
import sys
from dataclasses import dataclass

from fcw.exact import Poly, parse_rf, scalar

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class SceneError(ValueError):
    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__("%s: %s" % (pointer or "/", message))


@dataclass
class Scene:
    point: object
    order: object = None
    degree: object = None
    p: object = None
    cm: object = None
    suite: object = None


def _scalar_at(v, pointer):
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise SceneError(pointer, "expected a rational number as a string such as \"1/2\"")
    try:
        return scalar(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise SceneError(pointer, "not a rational number (%s)" % exc)


def _poly_at(v, pointer, var="z"):
    if isinstance(v, list):
        return Poly([_scalar_at(c, "%s/%d" % (pointer, i)) for i, c in enumerate(v)])
    if isinstance(v, str):
        try:
            f = parse_rf(v, var)
        except Exception as exc:
            raise SceneError(pointer, "cannot parse polynomial (%s)" % exc)
        if not f.is_polynomial():
            raise SceneError(pointer, "expected a polynomial in %s" % var)
        return f.num
    raise SceneError(pointer, "expected a coefficient list or an expression")


def _count_at(v, pointer):
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SceneError(pointer, "expected a nonnegative integer")
    return v


def parse_scene(data):
    from fcw.calogero_moser import CMError, CMTriple
    from fcw.grassmannian import GrError, GrPoint, PointCondition

    if not isinstance(data, dict):
        raise SceneError("", "scene must be a JSON object")
    conds = data.get("conditions", [])
    if not isinstance(conds, list):
        raise SceneError("/conditions", "expected a list")
    parsed = []
    for i, c in enumerate(conds):
        ptr = "/conditions/%d" % i
        if not isinstance(c, dict):
            raise SceneError(ptr, "expected an object with lambda and jet")
        if "points" in c or isinstance(c.get("lambda"), list):
            raise SceneError(ptr, "Gr-ad only: a condition must be supported at a single point")
        if "lambda" not in c:
            raise SceneError(ptr + "/lambda", "missing")
        lam = _scalar_at(c["lambda"], ptr + "/lambda")
        jet = c.get("jet")
        if not isinstance(jet, list) or not jet:
            raise SceneError(ptr + "/jet", "expected a nonempty list of coefficient strings")
        cs = tuple(_scalar_at(v, "%s/jet/%d" % (ptr, k)) for k, v in enumerate(jet))
        try:
            parsed.append(PointCondition(lam, cs))
        except GrError as exc:
            raise SceneError(ptr + "/jet", str(exc))
    scene = Scene(GrPoint(parsed))
    box = data.get("box")
    if box is not None:
        if not isinstance(box, dict):
            raise SceneError("/box", "expected an object with order and degree")
        if "order" in box:
            scene.order = _count_at(box["order"], "/box/order")
        if "degree" in box:
            scene.degree = _count_at(box["degree"], "/box/degree")
    if "p" in data:
        scene.p = _poly_at(data["p"], "/p")
    if "cm" in data:
        cm = data["cm"]
        if not isinstance(cm, dict):
            raise SceneError("/cm", "expected an object with X and Y")
        mats = {}
        for key in ("X", "Y"):
            m = cm.get(key)
            if not isinstance(m, list) or any(not isinstance(r, list) for r in m):
                raise SceneError("/cm/" + key, "expected a list of rows")
            mats[key] = [[_scalar_at(v, "/cm/%s/%d/%d" % (key, i, j)) for j, v in enumerate(r)] for i, r in enumerate(m)]
        try:
            scene.cm = CMTriple(mats["X"], mats["Y"])
        except CMError as exc:
            raise SceneError("/cm", str(exc))
    if "suite" in data:
        scene.suite = data["suite"]
    return scene


def load_scene(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SceneError("", "cannot read %s (%s)" % (path, exc.strerror))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError("", "invalid JSON: %s" % exc)
    return parse_scene(data)


# ---------------------------------------------------------------- commands

def _box(args, scene, m, d):
    order = args.order if args.order is not None else (scene.order if scene.order is not None else m)
    degree = args.deg if args.deg is not None else (scene.degree if scene.degree is not None else d)
    return order, degree


def cmd_baker(args, scene):
    from fcw.baker import compute_baker, wave_operator

    data = compute_baker(scene.point)
    K = wave_operator(scene.point, args.cutoff, data)
    text = [str(data), "K = %s" % K]
    return EXIT_OK, text, {"baker": data.to_json(), "wave_operator": K.to_json()}


def cmd_aw(args, scene):
    from fcw.exact import format_poly
    from fcw.grassmannian import spectral_algebra

    d = args.deg if args.deg is not None else (scene.degree if scene.degree is not None else 8)
    A = spectral_algebra(scene.point, d)
    text = ["staircase {%s}" % ",".join(str(k) for k in A.staircase)]
    text += ["  %s" % format_poly(p, "z") for p in A.basis]
    return EXIT_OK, text, {"spectral_algebra": A.to_json()}


def cmd_dw(args, scene):
    from fcw.grassmannian import operator_space_basis

    m, d = _box(args, scene, 2, 2)
    box = operator_space_basis(scene.point, scene.point, m, d)
    text = ["D(W) box order<=%d degree<=%d: dim %d" % (m, d, box.dim)]
    from fcw.odo import format_op

    text += ["  %s" % format_op(op, "z") for op in box.basis]
    return EXIT_OK, text, {"box": box.to_json()}


def cmd_dual(args, scene):
    from fcw.baker import bispectral_dual

    b = bispectral_dual(scene.point)
    back = bispectral_dual(b) == scene.point
    text = ["b(W): %s" % b.describe(), "b(b(W)) = W: %s" % back]
    return (EXIT_OK if back else EXIT_FAIL), text, {"dual": b.to_json(), "involutive": back}


def cmd_codim(args, scene):
    from fcw.grassmannian import operator_space_basis
    from fcw.mad import symbol_codimensions

    m, d = _box(args, scene, 6, 8)
    rep = symbol_codimensions(operator_space_basis(scene.point, scene.point, m, d))
    text = [
        "box order<=%d degree<=%d, widened to %d,%d" % (m, d, rep.widened[0], rep.widened[1]),
        "gr_D missing %s  codim %d" % (_mono_list(rep.missing_d), rep.codim_d),
        "gr_x missing %s  codim %d" % (_mono_list(rep.missing_x), rep.codim_x),
        "stable %s, equal %s" % (rep.stable, rep.equal),
    ]
    text += ["violation: %s" % v for v in rep.violations]
    ok = rep.equal and not rep.violations
    return (EXIT_OK if ok else EXIT_FAIL), text, {"codim": rep.to_json()}


def _mono_list(ms):
    def mono(t, j):
        parts = []
        if t:
            parts.append("z" if t == 1 else "z^%d" % t)
        if j:
            parts.append("zeta" if j == 1 else "zeta^%d" % j)
        return "*".join(parts) or "1"

    return "{%s}" % ", ".join(mono(t, j) for t, j in ms)


def cmd_gamma(args, scene):
    from fcw.grassmannian import gamma_act_on_point, maps_into, operator_space_basis
    from fcw.odo import gamma_conjugate

    p = _poly_at(args.p, "--p") if args.p is not None else scene.p
    if p is None:
        raise SceneError("/p", "the gamma command needs a polynomial p (scene field or --p)")
    Wp = gamma_act_on_point(scene.point, p)
    back = gamma_act_on_point(Wp, -p) == scene.point
    m, d = _box(args, scene, 2, 2)
    W = scene.point
    bad = [D for D in operator_space_basis(W, W, m, d).basis if not maps_into(gamma_conjugate(D, p), Wp, Wp)]
    text = [
        "gamma_p W: %s" % Wp.describe(),
        "round trip: %s" % back,
        "conjugated D(W) box order<=%d degree<=%d lands in D(gamma_p W): %s" % (m, d, not bad),
    ]
    ok = back and not bad
    return (EXIT_OK if ok else EXIT_FAIL), text, {"point": Wp.to_json(), "round_trip": back, "equivariant": not bad}


def cmd_cm(args, scene):
    from fcw.calogero_moser import gamma_act_cm, rank_one_check

    if scene.cm is None:
        raise SceneError("/cm", "the cm-check command needs a cm field with X and Y")
    t = scene.cm
    ok = rank_one_check(t)
    text = ["n = %d, rank([X,Y] + I) = 1: %s" % (t.n, ok)]
    out = {"n": t.n, "rank_one": ok}
    p = _poly_at(args.p, "--p") if args.p is not None else scene.p
    if ok and p is not None:
        s = gamma_act_cm(t, p)
        kept = rank_one_check(s)
        text.append("after gamma_p: rank one %s" % kept)
        out["gamma"] = s.to_json()
        out["gamma_rank_one"] = kept
        ok = ok and kept
    return (EXIT_OK if ok else EXIT_FAIL), text, out


def cmd_verify(args, scene):
    from fcw.suites import run_suite

    name = args.suite or (scene.suite if scene is not None and scene.suite else "core")
    try:
        results = run_suite(name)
    except KeyError as exc:
        raise SceneError("/suite", str(exc.args[0]))
    text = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    text.append("%d/%d passed" % (passed, len(results)))
    ok = passed == len(results)
    return (EXIT_OK if ok else EXIT_FAIL), text, {"suite": name, "results": [r.to_json() for r in results]}


COMMANDS = {
    "baker": cmd_baker,
    "aw": cmd_aw,
    "dw": cmd_dw,
    "dual": cmd_dual,
    "codim": cmd_codim,
    "gamma": cmd_gamma,
    "cm-check": cmd_cm,
    "verify": cmd_verify,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="fcw", description="Exact computations with rings of differential operators on framed curves.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("scene", nargs="?", help="scene JSON file (not needed for verify)")
    ap.add_argument("--deg", type=int, help="degree bound")
    ap.add_argument("--order", type=int, help="order bound for operator boxes")
    ap.add_argument("--cutoff", type=int, default=-8, help="lowest power of D kept in series (default -8)")
    ap.add_argument("--p", help='polynomial for the gamma action, e.g. "z^2"')
    ap.add_argument("--json", metavar="PATH", help="also write a JSON report to PATH")
    ap.add_argument("--suite", choices=["core", "extended"], help="suite for verify")
    return ap


def run_command(args):
    """Returns (exit status, text lines, JSON report)."""
    for flag in ("deg", "order"):
        v = getattr(args, flag)
        if v is not None and v < 0:
            raise SceneError("--" + flag, "must be nonnegative")
    scene = None
    if args.scene is not None:
        scene = load_scene(args.scene)
    elif args.command != "verify":
        raise SceneError("", "command %s needs a scene file" % args.command)
    return COMMANDS[args.command](args, scene)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        status, text, report = run_command(args)
    except SceneError as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_FAIL
    for line in text:
        print(line)
    if args.json:
        report = dict(report, command=args.command, status=status)
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
