"""Batch command-line front end.  Every command prints one JSON document.

Exit codes: 0 all certificates pass, 1 a certificate or precondition
failed (the JSON carries ``error`` or ``ok: false``), 2 bad flags.
Scalars are base-p digit strings, least significant digit first.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .precision import INF, PrecisionError, is_prime

COMMANDS = ("kubota-leopoldt", "coleman-check", "mellin", "eval-character", "gauss-sum",
            "epsilon", "yager", "tower-compat", "amice")


@dataclass
class RunConfig:
    p: int = 5
    digits: int = 12
    guard: int = 4
    pi_terms: int = 64
    level: int = 2
    seed: int = 0
    json_out: str | None = None
    args: dict = field(default_factory=dict)

    def validate(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.digits < 1:
            raise ValueError("--digits must be positive")
        if not 0 <= self.guard < self.digits:
            raise ValueError("--guard must satisfy 0 <= guard < digits")
        if self.pi_terms < 1:
            raise ValueError("--pi-terms must be positive")
        if self.level < 1:
            raise ValueError("--level must be at least 1")

    def echo(self) -> dict:
        # the output path is not echoed so that golden files do not depend on it
        out = asdict(self)
        out.pop("json_out")
        return out


def threads() -> int:
    raw = os.environ.get("PADIC_LAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise SystemExit(_usage_error(f"PADIC_LAB_THREADS must be an integer, got {raw!r}"))
    return max(1, n)


def _usage_error(msg: str) -> int:
    print(f"padic-lab: {msg}", file=sys.stderr)
    return 2


def pmap(fn, items):
    """Ordered map, parallel up to PADIC_LAB_THREADS."""
    items = list(items)
    n = threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _clean(x):
    if isinstance(x, float):
        if x == INF:
            return "inf"
        if x == -INF:
            return "-inf"
        return int(x) if x == int(x) else repr(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _elem_json(e) -> object:
    from .scalar import PadicScalar
    return e.digits() if isinstance(e, PadicScalar) else e.to_json()


def _char(cfg: RunConfig, ns):
    from .measures import CharacterSpec
    return CharacterSpec(cfg.p, ns.tame, ns.wild_level, ns.weight, ns.wild)


# -- commands -------------------------------------------------------------------------

def cmd_kubota_leopoldt(cfg: RunConfig, ns) -> tuple[dict, bool]:
    from .coleman import kubota_leopoldt
    ks = [int(k) for k in ns.k.split(",")]
    res = pmap(lambda k: kubota_leopoldt(cfg.p, ns.a, k, cfg.digits, cfg.pi_terms, cfg.guard), ks)
    for r in res:
        if "certified" in r:
            r["oracle_agrees"] = r.pop("certified")
    ok = all(r.get("oracle_agrees", True) for r in res)
    return {"moments": res}, ok


def cmd_coleman_check(cfg: RunConfig, ns) -> tuple[dict, bool]:
    from .coleman import ColemanSeries, interpolation_check
    cs = ColemanSeries.cyclotomic(cfg.p, ns.a, cfg.digits, cfg.pi_terms)
    interp = {n: interpolation_check(cs, ns.a, n) for n in range(1, cfg.level + 1)}
    nd = cs.norm_defect()
    ok = all(v == INF for v in interp.values()) and nd == INF
    return {"a": ns.a, "interpolation_residual": interp, "norm_defect": nd,
            "norm_checked_mod": {"p_power": cfg.digits, "pi_power": cfg.pi_terms}}, ok


def _measure(cfg: RunConfig, ns, level: int):
    from .measures import GroupAlgebraMeasure
    if ns.measure == "dirac":
        return GroupAlgebraMeasure.dirac(cfg.p, level, ns.g, cfg.digits)
    return GroupAlgebraMeasure.random(cfg.p, level, cfg.digits, ns.count, random.Random(cfg.seed))


def cmd_mellin(cfg: RunConfig, ns) -> tuple[dict, bool]:
    from .measures import mellin, mellin_inverse, required_level
    p = cfg.p
    L = required_level(cfg.digits, cfg.pi_terms, p)
    mu = _measure(cfg, ns, L)
    F = mellin(mu, cfg.pi_terms)
    show = min(ns.show, F.M)
    out = {"measure_level": L, "series": [_elem_json(F.coeff(k)) for k in range(show)],
           "terms_shown": show, "psi_vanishes": F.psi_vanishes()}
    ok = out["psi_vanishes"]
    try:
        back = mellin_inverse(F, cfg.level)
        ref = mu.reduce(cfg.level)
        d = (back - ref.with_prec(back.prec)).valuation()
        out["round_trip"] = {"level": cfg.level, "certified": back.prec,
                             "agree": d >= back.prec}
        ok = ok and d >= back.prec
    except PrecisionError as e:
        out["round_trip"] = {"level": cfg.level, "error": str(e)}
    return out, ok


def cmd_eval_character(cfg: RunConfig, ns) -> tuple[dict, bool]:
    from .measures import (SeriesRoute, characters_up_to, dual_route_check, eval_character, mellin,
                           required_level)
    p = cfg.p
    L = required_level(cfg.digits, cfg.pi_terms, p)
    mu = _measure(cfg, ns, L)
    route = SeriesRoute(mellin(mu, cfg.pi_terms))
    if ns.all:
        chars = characters_up_to(p, cfg.level, range(-ns.max_weight, ns.max_weight + 1))
    else:
        chars = [_char(cfg, ns)]

    def one(eta):
        rec = {"character": eta.to_json(), "value": _elem_json(eval_character(mu, eta))}
        rec["dual_route"] = dual_route_check(mu, eta, route=route)
        return rec

    # the series route caches per (weight, conductor); fill it in order first
    for eta in chars:
        route.at_root(eta.weight, eta.conductor)
    res = pmap(one, chars)
    return {"measure_level": L, "evaluations": res}, all(r["dual_route"]["agree"] for r in res)


def cmd_gauss_sum(cfg: RunConfig, ns) -> tuple[dict, bool]:
    from .epsilon import gauss_product_check, gauss_sum
    from .rings import wrap
    eta = _char(cfg, ns).finite_part()
    tau = gauss_sum(eta, cfg.digits)
    R = tau.ring
    sq = wrap(R, R.mul(tau.raw, tau.raw, cfg.p ** cfg.digits), cfg.digits)
    out = {"character": eta.to_json(), "conductor": eta.conductor, "tau": tau.to_json(),
           "tau_squared": sq.to_json(), "product_identity": gauss_product_check(eta, cfg.digits)}
    ok = out["product_identity"]
    if eta.wild_level < 2 and (2 * eta.tame) % (cfg.p - 1) == 0 and eta.tame:
        # quadratic: tau^2 = omega(-1) p^n
        target = eta.omega_minus_one() * cfg.p ** eta.conductor
        out["tau_squared_expected"] = target
        out["tau_squared_ok"] = (sq - wrap(R, R.from_int(target), cfg.digits)).is_zero()
        ok = ok and out["tau_squared_ok"]
    return out, ok


def cmd_epsilon(cfg: RunConfig, ns) -> tuple[dict, bool]:
    from .epsilon import WeilCharacter, epsilon_factor, gamma_star, l_factor
    om = WeilCharacter(_char(cfg, ns), 0, Fraction(ns.frob))
    res = epsilon_factor(om, cfg.digits)
    return {"character": om.to_json(), "epsilon_inverse": res.to_json(),
            "l_factor": [str(c) for c in l_factor(om)],
            "gamma_star_at_1_plus_j": str(gamma_star(om.weight))}, res.agree


def _degrees(ns) -> list[int]:
    ds = [int(d) for d in ns.degrees.split(",")]
    if any(b % a for a, b in zip(ds, ds[1:])):
        raise ValueError("each degree must divide the next")
    return ds


def cmd_yager(cfg: RunConfig, ns) -> tuple[dict, bool]:
    from .rings import make_unramified
    from .yager import (CharacterHost, find_normal_basis_gen, period_identity_defect, reduce_yager,
                        relative_trace, yager_map, _subfield_element)
    ds = _degrees(ns)
    base, top = ds[0], ds[-1]
    amb = make_unramified(cfg.p, cfg.digits, top)
    prec, mod = cfg.digits, cfg.p ** cfg.digits
    rng = random.Random(cfg.seed)
    levels = []
    ok = True
    for d in ds[1:]:
        x, cert = find_normal_basis_gen(amb, base, d, prec)
        z = _subfield_element(amb, d, rng, mod)
        y = yager_map(z, amb, base, d, prec)
        semi = y.semilinearity_defect()
        host = CharacterHost(amb, y.order, prec)
        gen = yager_map(x, amb, base, d, prec)
        periods = [period_identity_defect(gen, j, host) for j in range(y.order)]
        rec = {"degree": d, "normal_basis_rank": cert.rank, "normal_basis_needed": cert.needed,
               "semilinearity_defect": semi, "period_identity_defect": min(periods)}
        ok = ok and cert.ok and semi == INF and min(periods) == INF
        levels.append(rec)
    reduce_ok = 0
    for _ in range(ns.samples):
        z = _subfield_element(amb, top, rng, mod)
        mid = ds[-2]
        lhs = reduce_yager(yager_map(z, amb, base, top, prec), mid)
        rhs = yager_map(relative_trace(amb, z, mid, top, mod), amb, base, mid, prec)
        reduce_ok += lhs == rhs
    ok = ok and reduce_ok == ns.samples
    return {"degrees": ds, "defining_poly": amb.modulus, "levels": levels,
            "reduce_equals_trace": f"{reduce_ok}/{ns.samples}"}, ok


def cmd_tower_compat(cfg: RunConfig, ns) -> tuple[dict, bool]:
    from .measures import GroupAlgebraMeasure
    from .rings import make_unramified
    from .yager import check_tower_compat, corrupt_tower, lift_tower
    ds = _degrees(ns)
    amb = make_unramified(cfg.p, cfg.digits, ds[-1])
    rng = random.Random(cfg.seed)
    z = GroupAlgebraMeasure.random(cfg.p, cfg.level, cfg.digits, ns.count, rng)
    h0 = GroupAlgebraMeasure(cfg.p, cfg.level, {g: amb.from_int(c) for g, c in z.entries.items()},
                             cfg.digits, amb)
    tower = lift_tower(amb, ds[0], ds, h0, rng)
    rep = check_tower_compat(tower)
    out = {"degrees": ds, "lifted": rep}
    ok = rep["compatible"]
    if ns.corrupt is not None:
        bad = check_tower_compat(corrupt_tower(tower, ns.corrupt))
        out["corrupted"] = dict(bad, level_index=ns.corrupt)
        ok = ok and not bad["compatible"]
    return out, ok


def cmd_amice(cfg: RunConfig, ns) -> tuple[dict, bool]:
    from .amice import (CellDistribution2D, basis_element, convolve, growth_constant, order_norm,
                        shear_pullback, shear_pullback_basis, shear_pushforward)
    p, nmax = cfg.p, ns.n_max
    hs = [Fraction(1, 2), Fraction(1)]
    integ = {}
    for a in (1, 2):
        worst = INF
        for h in hs:
            for n1 in range(nmax + 1):
                for n2 in range(nmax + 1):
                    worst = min(worst, order_norm(shear_pullback_basis(p, n1, n2, a, h)))
        integ[a] = worst
    f = basis_element(p, 2, 3, (0, 1))
    group_law = shear_pullback(shear_pullback(f, 1), 2) == shear_pullback(f, 3)
    D = CellDistribution2D.dirac_times_haar(p, (ns.bilevel, ns.bilevel))
    good = growth_constant(shear_pushforward(D, 1, coordinate=2), (0, 1))
    bad = growth_constant(shear_pushforward(D, 1, coordinate=1), (0, 1))
    rng = random.Random(cfg.seed)
    sup = 0
    for _ in range(ns.samples):
        o1 = (Fraction(rng.randrange(4), 4), Fraction(rng.randrange(4), 4))
        o2 = (Fraction(rng.randrange(4), 4), Fraction(rng.randrange(4), 4))
        m1 = CellDistribution2D.random(p, (2, 2), o1, rng)
        m2 = CellDistribution2D.random(p, (2, 2), o2, rng)
        c = growth_constant(convolve(m1, m2), (o1[0] + o2[0], o1[1] + o2[1])).C
        sup += c >= growth_constant(m1, o1).C + growth_constant(m2, o2).C
    out = {"shear_integrality_min_norm": integ, "n_max": nmax, "h_values": [str(h) for h in hs],
           "shear_group_law": group_law,
           "negative_test": {"right_coordinate": {"C": good.C, "bounded": good.bounded},
                             "wrong_coordinate": {"C": bad.C, "bounded": bad.bounded}},
           "convolution_superadditive": f"{sup}/{ns.samples}"}
    ok = (all(v >= 0 for v in integ.values()) and group_law and good.bounded and not bad.bounded
          and sup == ns.samples)
    return out, ok


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


# -- argument parsing --------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(_usage_error(message))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=5)
    common.add_argument("--digits", type=int, default=12, help="p-adic precision N")
    common.add_argument("--guard", type=int, default=4)
    common.add_argument("--pi-terms", type=int, default=64, dest="pi_terms")
    common.add_argument("--level", type=int, default=2)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json-out", default=None, dest="json_out")

    chars = argparse.ArgumentParser(add_help=False)
    chars.add_argument("--tame", type=int, default=1)
    chars.add_argument("--wild-level", type=int, default=0, dest="wild_level")
    chars.add_argument("--wild", type=int, default=1)
    chars.add_argument("--weight", type=int, default=0)

    meas = argparse.ArgumentParser(add_help=False)
    meas.add_argument("--measure", choices=("dirac", "random"), default="dirac")
    meas.add_argument("--g", type=int, default=1, help="group element for the Dirac measure")
    meas.add_argument("--count", type=int, default=5, help="support size of a random measure")

    ap = _Parser(prog="padic-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("kubota-leopoldt", parents=[common])
    s.add_argument("--a", type=int, default=2)
    s.add_argument("--k", default="4", help="moment index or comma list")
    s = sub.add_parser("coleman-check", parents=[common])
    s.add_argument("--a", type=int, default=2)
    s = sub.add_parser("mellin", parents=[common, meas])
    s.add_argument("--show", type=int, default=8, help="series coefficients printed")
    s = sub.add_parser("eval-character", parents=[common, meas, chars])
    s.add_argument("--all", action="store_true", help="every character with conductor <= level")
    s.add_argument("--max-weight", type=int, default=3, dest="max_weight")
    sub.add_parser("gauss-sum", parents=[common, chars])
    s = sub.add_parser("epsilon", parents=[common, chars])
    s.add_argument("--frob", default="1", help="value of the finite part at Frobenius (rational unit)")
    s = sub.add_parser("yager", parents=[common])
    s.add_argument("--degrees", default="1,3,9")
    s.add_argument("--samples", type=int, default=5)
    s = sub.add_parser("tower-compat", parents=[common])
    s.add_argument("--degrees", default="1,3,9")
    s.add_argument("--count", type=int, default=3)
    s.add_argument("--corrupt", type=int, default=None, help="level index to corrupt")
    s = sub.add_parser("amice", parents=[common])
    s.add_argument("--n-max", type=int, default=6, dest="n_max")
    s.add_argument("--bilevel", type=int, default=3)
    s.add_argument("--samples", type=int, default=10)
    return ap


_COMMON = ("p", "digits", "guard", "pi_terms", "level", "seed", "json_out")


def run(argv=None) -> tuple[int, str]:
    """Parse, dispatch and render; returns (exit status, JSON text)."""
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as e:
        return (e.code if isinstance(e.code, int) else 2), ""
    extra = {k: v for k, v in sorted(vars(ns).items()) if k not in _COMMON and k != "command"}
    cfg = RunConfig(**{k: getattr(ns, k) for k in _COMMON}, args=extra)
    doc = {"command": ns.command, "config": cfg.echo()}
    try:
        cfg.validate()
        result, ok = HANDLERS[ns.command](cfg, ns)
        doc["result"] = _clean(result)
        doc["ok"] = bool(ok)
        status = 0 if ok else 1
    except (ValueError, ArithmeticError) as e:
        doc["error"] = {"type": type(e).__name__, "message": str(e)}
        doc["ok"] = False
        status = 1
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if cfg.json_out:
        with open(cfg.json_out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return status, text


def main(argv=None) -> int:
    status, text = run(argv)
    if text:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
