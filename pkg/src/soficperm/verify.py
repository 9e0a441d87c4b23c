"""Re-validation of emitted artifacts.

Each check recomputes the claimed inequality from the stored inputs and
witnesses, using plain loops where the producer used vectorised code.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .expansion import ExpansionCertificate, Verdict, check_expander_exact, refute_expander_sampled
from .perm import GenTuple, Perm, cycle
from .serialize import SCHEMA, dumps, parse_rational, tuple_digest


@dataclass
class VerifyReport:
    kind: str
    checks: list = field(default_factory=list)

    def add(self, name: str, ok, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)


# plain-loop primitives, kept apart from the numpy kernels on purpose

def _mismatch(p: list, q: list) -> int:
    return sum(1 for a, b in zip(p, q) if a != b)


def _comp(p: list, q: list) -> list:
    return [p[i] for i in q]


def _inv(p: list) -> list:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return out


def _inversions(p: list) -> int:
    n = len(p)
    return sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])


def _boundary(perms, members, n) -> int:
    S = set(members)
    total = 0
    for p in perms:
        image = {p[i] for i in S}
        total += len(S ^ image)
    return total


# -- per kind -----------------------------------------------------------------

def verify_expander(env: dict, rep: VerifyReport) -> None:
    res = env["result"]
    t = GenTuple.from_json(res["tuple"])
    cert = ExpansionCertificate.from_json(res["certificate"])
    rep.add("digest", cert.digest == tuple_digest(t))
    perms = [p.to_list() for p in t.perms]
    if cert.verdict is Verdict.REFUTED:
        w = cert.witness
        size = len(w)
        bnd = _boundary(perms, w.members, t.n)
        rep.add("witness admissible", 0 < size and 2 * size <= t.n, f"|S|={size}")
        rep.add("witness violates", cert.lambda_ * size >= bnd, f"boundary {bnd}/{t.n}")
    elif cert.verdict is Verdict.EXACT_PASS:
        again = check_expander_exact(t, cert.lambda_, limit=max(t.n, 1))
        rep.add("exact recomputation", again.verdict is Verdict.EXACT_PASS and again.min_ratio == cert.min_ratio)
    else:
        again = refute_expander_sampled(t, cert.lambda_, cert.trials, cert.seed)
        rep.add("seeded search reproduces", again.verdict is cert.verdict and again.min_ratio == cert.min_ratio)


def verify_census(env: dict, rep: VerifyReport) -> None:
    from .cli import census_reports, parse_degrees, parse_rationals

    cfg = env["config"]
    again = [r.to_json() for r in census_reports(cfg["prop"], parse_degrees(cfg["n"]),
                                                  parse_rationals(cfg["param"]), cfg["b"],
                                                  cfg["samples"], cfg["seed"], cfg["radius"])]
    rep.add("recount matches", json.loads(dumps(again)) == env["result"], f"{len(again)} reports")
    if cfg["prop"] == "S":
        for r in env["result"]:
            lam = parse_rational(r["parameter"])
            n = r["n"]
            b = json.loads(r["notes"].split("=", 1)[1])
            a = cycle(n).to_list()
            bad = 0
            for w in r["witnesses"]:
                c, p = w["c"], w["conjugator"]
                pinv = _inv(p)
                cost = (_mismatch(a, _comp(_comp(p, a), pinv))
                        + _mismatch(b, _comp(_comp(p, c), pinv)))
                if Fraction(cost, n) != parse_rational(w["value"]) or Fraction(cost, n) >= lam:
                    bad += 1
            rep.add(f"S witnesses n={n}", bad == 0, f"{len(r['witnesses'])} checked")


def verify_deamplify(env: dict, rep: VerifyReport) -> None:
    from .deamplify import intertwiner_defect

    res = env["result"]
    x, y = GenTuple.from_json(res["x"]), GenTuple.from_json(res["y"])
    u = Perm(res["u"])
    d = res["deamplify"]
    v = d["v"]
    eps = intertwiner_defect(x, y, u)
    rep.add("eps", eps == parse_rational(d["eps"]))
    achieved = max(Fraction(_mismatch(_comp(v, xt.to_list()), _comp(yt.to_list(), v)), x.n)
                   for xt, yt in zip(x.perms, y.perms))
    rep.add("achieved", achieved == parse_rational(d["achieved"]), str(achieved))
    lam = parse_rational(d["lambda"])
    k = x.k
    bound = 20 * k * k * eps / lam
    rep.add("bound", bound == parse_rational(d["certified_bound"]))
    if d["guarantee"] == "CERTIFIED":
        rep.add("achieved <= bound", achieved <= bound)
        rep.add("trace >= 1/2", parse_rational(d["tr_pj"]) >= Fraction(1, 2))
        cert = res.get("y_certificate")
        ok = cert is not None and cert["verdict"] == "EXACT_PASS" and parse_rational(cert["lambda"]) >= lam
        if ok:
            again = check_expander_exact(y, parse_rational(cert["lambda"]), limit=max(y.n, 1))
            ok = again.verdict is Verdict.EXACT_PASS
        rep.add("y certificate", ok)


def verify_convexity(env: dict, rep: VerifyReport) -> None:
    from .cli import convexity_experiment

    again = convexity_experiment(env["config"]["experiment"])
    rep.add("recomputation matches", json.loads(dumps(again)) == env["result"])
    rep.add("all blocks recovered", all(b["recovered_exactly"] and b["decomposes"] for b in env["result"]["blocks"]))


def verify_strange(env: dict, rep: VerifyReport) -> None:
    from .census import in_K, in_T
    from .strange import k_evaluate, k_sample

    res = env["result"]
    p = Perm(res["p"])
    pl = p.to_list()
    n = p.n
    delta = parse_rational(res["delta"])
    cox = Fraction(2 * _inversions(pl), n * (n - 1)) if n > 1 else Fraction(0)
    rep.add("coxeter", cox == parse_rational(res["coxeter"]), str(cox))
    rep.add("coxeter < 2 delta", cox < 2 * delta)
    sizes = res["sizes"]
    start, diag = 0, True
    for s in sizes:
        diag &= all(start <= pl[i] < start + s for i in range(start, start + s))
        start += s
    rep.add("block diagonal", diag and start == n)
    bound = Fraction(sum(s * (s - 1) for s in sizes), n * (n - 1))
    rep.add("coxeter <= block bound", cox <= bound)
    mem = in_T(p, delta)
    rep.add("T membership", mem.member == res["t_member"] and mem.worst_fix == parse_rational(
        res["freeness_worst"]["fix_trace"]))
    kref = res["k_refutation"]
    if kref["mode"] == "exhaustive":
        k = in_K(p, delta, limit=n)
        rep.add("exhaustive K", k.member == (kref["verdict"] == "MEMBER"))
    else:
        B, labels = k_sample(n, p, sizes, kref["trials"], kref["seed"])
        violate, probe, fail = k_evaluate(B, p, delta)
        rep.add("sample size", len(labels) == kref["trials"], str(len(labels)))
        rep.add("K verdict reproduces",
                (kref["verdict"] == "REFUTED") == bool(violate.any()))
        rep.add("commutant probe", int(probe.sum()) == kref["probe_count"]
                and int(fail.sum()) == kref["probe_failures"])
        if kref["witness"] is not None:
            b = kref["witness"]
            a = cycle(n).to_list()
            u = _mismatch(b, list(range(n)))
            v = _mismatch(_comp(a, b), _comp(b, a))
            w = _mismatch(_comp(pl, b), _comp(b, pl))
            rep.add("K witness violates", Fraction(u, n) > 22 * max(Fraction(v, n), Fraction(w, n), delta))


def verify_family(env: dict, rep: VerifyReport) -> None:
    from .words import freeness_defect

    res = env["result"]
    n = res["n"]
    a = cycle(n)
    members = [Perm(m) for m in res["members"]]
    sep = parse_rational(res["separation"])
    k = res["requested"]
    rep.add("distinct", len({tuple(m.to_list()) for m in members}) == len(members))
    for i, (m, cj) in enumerate(zip(members, res["expander_certs"])):
        t = GenTuple([a, m])
        env_i = {"result": {"tuple": t.to_json(), "certificate": cj}}
        sub = VerifyReport("expander")
        verify_expander(env_i, sub)
        rep.add(f"member {i} expander", sub.ok and cj["verdict"] != "REFUTED")
        fd = freeness_defect(t, res["radius"])
        rep.add(f"member {i} freeness", fd == parse_rational(res["freeness"][i]) and fd < Fraction(1, k))
    al = a.to_list()
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            ev = res["pairwise_evidence"][i][j]
            p = ev["conjugator"]
            pinv = _inv(p)
            # d_S((a, c_i), (a, c_j)) attained by p: sum of d_H(x_t, p y_t p^-1)
            x = [al, members[i].to_list()]
            y = [al, members[j].to_list()]
            cost = sum(_mismatch(xt, _comp(_comp(p, yt), pinv)) for xt, yt in zip(x, y))
            val = parse_rational(ev["value"])
            ok = Fraction(cost, n) == val and val > sep
            if ev["mode"] == "EXACT":
                from .conjugacy import s_distance_exact
                ok = ok and s_distance_exact(GenTuple([a, members[i]]), GenTuple([a, members[j]]),
                                             limit=n).value == val
            rep.add(f"pair {i},{j} ({ev['mode']})", ok, str(val))


def verify_rate(env: dict, rep: VerifyReport) -> None:
    verify_census(env, rep)


VERIFIERS = {
    "expander": verify_expander,
    "census": verify_census,
    "rate": verify_rate,
    "deamplify": verify_deamplify,
    "convexity": verify_convexity,
    "strange": verify_strange,
    "family": verify_family,
}


def verify_envelope(env: dict) -> VerifyReport:
    kind = env.get("kind", "?")
    rep = VerifyReport(kind)
    rep.add("schema", env.get("schema") == SCHEMA, str(env.get("schema")))
    fn = VERIFIERS.get(kind)
    if fn is None:
        rep.add("known kind", False, kind)
        return rep
    try:
        fn(env, rep)
    except (KeyError, ValueError, TypeError) as exc:
        rep.add("artifact readable", False, repr(exc))
    return rep


def verify_file(path) -> VerifyReport:
    try:
        env = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        rep = VerifyReport("?")
        rep.add("readable", False, repr(exc))
        return rep
    return verify_envelope(env)
