"""Check suites over a chart system and the report they produce.

A report is a list of records sorted by check id.  Each record carries the
anchor string of the statement it tests, a status (pass, fail, skipped) and,
on failure, a witness.  With ``timing=False`` (the default) no wall-clock
data is recorded, so equal inputs give byte-identical reports.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

from .algebroid import (AXIOMS, CorruptedAlgebroid, VertexAlgebroid, frame_identity_residuals,
                        verify_axioms)
from .charts import ChartSystem
from .cocycles import CocycleCache, cech_consistency, dual_compare, h_tangent_natural
from .envelope import (W1Element, build_susy, classical_q, conformal_weight, fermionic_charge,
                       generator_claims, log_derivative_action, parity_parts, sample_monomial,
                       transform_susy)
from .errors import ParseError, WorkbenchError
from .kernel import RatFunc
from .sampling import SamplePool
from .supergeometry import SuperScalar

SUITES = ("axioms", "cocycles", "susy", "gradings")
SCHEMA = "chiralgerbe.report"
SCHEMA_VERSION = 1
STATUSES = ("pass", "fail", "skipped")

AXIOM_ANCHORS = {
    "2.1.1": "(2.1.1)", "2.1.2": "(2.1.2)", "2.1.3": "(2.1.3)", "2.1.4": "(2.1.4)",
    "d-equivariant": "§2.1", "A1": "(A1)", "A2": "(A2)", "A3": "(A3)", "A4": "(A4)",
    "A5": "(A5)", "supersymmetry": "§2.3", "c-skew": "§2.3",
}


@dataclass
class CheckRecord:
    id: str
    suite: str
    anchor: str
    status: str
    detail: str = ""
    witness: dict | None = None
    wall_time: float | None = None


@dataclass
class CheckReport:
    spec: str
    seed: int
    samples: int
    suites: list
    records: list = field(default_factory=list)

    def count(self, status: str) -> int:
        return sum(r.status == status for r in self.records)

    @property
    def failed(self) -> bool:
        return self.count("fail") > 0

    def record(self, check_id: str):
        for r in self.records:
            if r.id == check_id:
                return r
        raise KeyError(check_id)


@dataclass
class SuiteOptions:
    samples: int = 200
    bound: int = 3
    degree: int = 2
    timing: bool = False
    corrupt_c: bool = False


def _pool(system: ChartSystem, seed: int, tag: str, opts: SuiteOptions) -> SamplePool:
    # one stream per check, so a record does not depend on which suites ran
    return SamplePool(system.ambient, seed=f"{seed}:{tag}", bound=opts.bound, degree=opts.degree)


def _error_witness(exc: Exception) -> dict:
    return {"error": type(exc).__name__, "residual": str(exc)}


class _Runner:
    def __init__(self, system: ChartSystem, seed: int, opts: SuiteOptions):
        self.system = system
        self.seed = seed
        self.opts = opts
        self.records: list[CheckRecord] = []
        self._cache = None

    @property
    def cache(self) -> CocycleCache:
        if self._cache is None:
            self._cache = CocycleCache(self.system)
        return self._cache

    def run(self, check_id: str, suite: str, anchor: str, fn):
        """fn returns (passed, detail, witness); exceptions count as failures."""
        start = time.perf_counter()
        try:
            passed, detail, witness = fn()
            status = "pass" if passed else "fail"
        except WorkbenchError as exc:
            status, detail, witness = "fail", "raised", _error_witness(exc)
        rec = CheckRecord(check_id, suite, anchor, status, detail,
                          None if status == "pass" else witness)
        if self.opts.timing:
            rec.wall_time = round(time.perf_counter() - start, 3)
        self.records.append(rec)

    def skip(self, check_id: str, suite: str, anchor: str, reason: str):
        self.records.append(CheckRecord(check_id, suite, anchor, "skipped", reason))

    # -- suites ----------------------------------------------------------
    def axioms(self):
        s = self.system
        amb = s.ambient
        V = VertexAlgebroid(s.frame(s.reference))
        if self.opts.corrupt_c:
            a = SuperScalar.const(amb, RatFunc.var(amb[0], 1))
            V = CorruptedAlgebroid(V, a)
        for name in AXIOMS:
            def fn(name=name):
                pool = _pool(s, self.seed, "axiom:" + name, self.opts)
                (res,) = verify_axioms(V, pool, [name], self.opts.samples)
                return res.passed, f"{res.samples} samples", res.witness
            self.run(f"axioms.{name}", "axioms", AXIOM_ANCHORS[name], fn)
        for c in s.charts[1:]:
            def fn(c=c):
                bad = frame_identity_residuals(s.frame(c))
                nonzero = {k: v for k, v in bad.items() if v}
                witness = {k: [f"{idx}: {r!r}" for idx, r in v] for k, v in nonzero.items()}
                return not nonzero, "Jacobian and trace identities", witness or None
            self.run(f"axioms.frame-identities[{c}]", "axioms", "(3.3.1)–(3.3.5)", fn)

    def _triples(self):
        s = self.system
        if s.triples:
            return [tuple(t) for t in s.triples]
        if len(s.charts) >= 3:
            return [tuple(s.charts[:3])]
        return [(s.charts[0], s.charts[1], s.charts[0])]

    def cocycles(self):
        s, cache = self.system, self.cache
        ref = s.reference
        kind = s.bundle.kind
        pairs = [(ref, c) for c in s.charts[1:]]
        for u, v in pairs:
            def fn_h(u=u, v=v):
                cache.h(u, v)  # raises if the two paths differ
                return True, "definitional vs closed form", None
            self.run(f"cocycles.h[{u}>{v}]", "cocycles", "(4.1.5)–(4.1.6)", fn_h)

            def fn_b(u=u, v=v):
                b = cache.b(u, v)
                return b.table == b.closed, "definitional vs closed form", \
                    {"definitional": repr(b.table), "closed": repr(b.closed)}
            self.run(f"cocycles.b[{u}>{v}]", "cocycles", "Magic Lemma 4.3", fn_b)
        for tri in self._triples():
            def fn_a(tri=tri):
                a = cache.a(*tri)
                ok = a.table == {k: a.closed[k] for k in a.table}
                return ok, "definitional vs closed form", \
                    {"definitional": repr(a.table), "closed": repr(a.closed)}
            self.run(f"cocycles.a[{','.join(tri)}]", "cocycles", "Theorem 5.6", fn_a)
        if kind == "tangent":
            for u, v in pairs:
                def fn(u=u, v=v):
                    h = cache.h(u, v).matrix
                    want = h_tangent_natural(s.change(u, v))
                    return h == want, "h^{ij} = 2 tau_p tau_j(g^{ip})", \
                        {"h": repr(h), "expected": repr(want)}
                self.run(f"cocycles.h-natural[{u}>{v}]", "cocycles", "(6.1.4)", fn)
        elif kind == "cotangent":
            for u, v in pairs:
                def fn(u=u, v=v):
                    h = cache.h(u, v).matrix
                    return h.is_zero(), "h = 0", {"h": repr(h)}
                self.run(f"cocycles.h-natural[{u}>{v}]", "cocycles", "Theorem 6.4", fn)
        if kind in ("tangent", "cotangent"):
            def fn_vanish():
                nonzero = [f"b[{u}>{v}]" for u, v in pairs if not cache.b(u, v).is_zero()]
                nonzero += [f"a[{','.join(t)}]" for t in self._triples()
                            if not cache.a(*t).is_zero()]
                return not nonzero, "a = b = 0 for natural frames", {"nonzero": nonzero}
            self.run("cocycles.natural-vanishing", "cocycles", "Theorem 6.4", fn_vanish)
        else:
            self.skip("cocycles.natural-vanishing", "cocycles", "Theorem 6.4",
                      "requires natural frames of T or Omega")

        def fn_dual():
            rep = dual_compare(s, self._triples()[0])
            flags = {"a": rep.a_equal, "b": rep.b_equal, "a_E": rep.a_e_equal,
                     "b_E": rep.b_e_equal}
            return rep.passed, "bundle vs dual bundle", {k: v for k, v in flags.items() if not v}
        self.run("cocycles.duality", "cocycles", "Lemma 5.7", fn_dual)
        if len(s.charts) >= 4:
            def fn_cech():
                rep = cech_consistency(s)
                w = {"closed": rep.closed, "alternating_sum_zero": rep.alternating_sum_zero,
                     "mixed": rep.mixed}
                return rep.passed, "closedness and Cech relations on four charts", w
            self.run("cocycles.cech", "cocycles", "§5.8", fn_cech)
        else:
            self.skip("cocycles.cech", "cocycles", "§5.8", "requires at least four charts")

    def susy(self):
        s = self.system
        anchor = "Theorem 6.25"
        if s.bundle.kind != "cotangent":
            self.skip("susy.transform", "susy", anchor, "requires cotangent natural frames")
            return
        sq = build_susy(s.frame(s.reference))
        for c in s.charts[1:]:
            def fn(c=c):
                fc = s.change(s.reference, c)
                tr = transform_susy(sq, fc, check=False)
                bad = {k: {"definitional": repr(tr.deltas[k]), "closed": repr(tr.closed[k])}
                       for k in "QJGL" if tr.deltas[k] != tr.closed[k]}
                return not bad, "Q, J, G, L differences", bad
            self.run(f"susy.transform[{s.reference}>{c}]", "susy", anchor, fn)

            def fn_cl(c=c):
                old, new = classical_q(s.frame(s.reference)), classical_q(s.frame(c))
                return old == new, "classical Q is frame independent", \
                    {"source": repr(old), "target": repr(new)}
            self.run(f"susy.classical-q[{s.reference}>{c}]", "susy", "(6.7.1)", fn_cl)

    def gradings(self):
        s = self.system
        n, m = s.ambient
        ids = [("gradings.generator-claims", "Claims 7.1.1/7.1.2"),
               ("gradings.quadruple", "Claim 7.2.2"),
               ("gradings.log-derivative", "Lemma 7.2.1"),
               ("gradings.charge-parity", "§7.2")]
        if n != m:
            for cid, anchor in ids:
                self.skip(cid, "gradings", anchor,
                          "requires as many odd generators as even variables")
            return
        amb = s.ambient

        def fn_claims():
            res = generator_claims(amb)
            bad = [f"{r.name} on {r.generator}: {r.detail}" for r in res if not r.passed]
            return not bad, f"{len(res)} generator claims", {"failures": bad}
        self.run(ids[0][0], "gradings", ids[0][1], fn_claims)

        def fn_quad():
            sq = build_susy(s.frame(s.reference))
            got = {k: (fermionic_charge(x), conformal_weight(x))
                   for k, x in zip("QJGL", (sq.Q, sq.J, sq.G, sq.L))}
            want = {"Q": (1, 1), "J": (0, 1), "G": (-1, 2), "L": (0, 2)}
            return got == want, "charge and weight of Q, J, G, L", \
                {"got": repr(got), "expected": repr(want)}
        self.run(ids[1][0], "gradings", ids[1][1], fn_quad)

        def fn_log():
            pool = _pool(s, self.seed, "log-derivative", self.opts)
            x = RatFunc.var(n, 1)
            for _ in range(self.opts.samples):
                y = W1Element(amb, pool.scalar(), pool.vector(), pool.covector())
                for a in (x, x * x, 1 + x):
                    r = log_derivative_action(a, y)
                    if not r.is_zero():
                        return False, "", {"a": repr(a), "y": repr(y), "residual": repr(r)}
            return True, f"{self.opts.samples} samples x 3 functions", None
        self.run(ids[2][0], "gradings", ids[2][1], fn_log)

        def fn_parity():
            pool = _pool(s, self.seed, "charge-parity", self.opts)
            for _ in range(self.opts.samples):
                mono = sample_monomial(pool)
                (p,) = parity_parts(mono)
                if fermionic_charge(mono) % 2 != p:
                    return False, "", {"monomial": repr(mono), "parity": p}
            return True, f"{self.opts.samples} monomials", None
        self.run(ids[3][0], "gradings", ids[3][1], fn_parity)


def run_suite(system: ChartSystem, suites=SUITES, seed: int = 0,
              options: SuiteOptions | None = None) -> CheckReport:
    opts = options or SuiteOptions()
    suites = list(suites)
    if not suites:
        raise ValueError("no suites selected")
    unknown = [x for x in suites if x not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    runner = _Runner(system, seed, opts)
    for name in SUITES:
        if name in suites:
            getattr(runner, name)()
    records = sorted(runner.records, key=lambda r: r.id)
    return CheckReport(system.name, seed, opts.samples, [x for x in SUITES if x in suites], records)


# -- rendering ---------------------------------------------------------------

def summary_line(report: CheckReport) -> str:
    return (f"{report.count('pass')} passed, {report.count('fail')} failed, "
            f"{report.count('skipped')} skipped")


def render_text(report: CheckReport) -> str:
    lines = [f"spec {report.spec}  seed {report.seed}  samples {report.samples}"]
    for suite in report.suites:
        lines.append("")
        lines.append(f"[{suite}]")
        for r in report.records:
            if r.suite != suite:
                continue
            head = f"  {r.status.upper():7} {r.id}  {r.anchor}"
            if r.detail:
                head += f"  ({r.detail})"
            if r.wall_time is not None:
                head += f"  {r.wall_time:.3f}s"
            lines.append(head)
            if r.witness:
                for k, v in r.witness.items():
                    lines.append(f"      {k}: {v}")
    lines.append("")
    lines.append(summary_line(report))
    return "\n".join(lines) + "\n"


def render_machine(report: CheckReport) -> str:
    doc = {"schema": SCHEMA, "version": SCHEMA_VERSION, "spec": report.spec,
           "seed": report.seed, "samples": report.samples, "suites": report.suites,
           "totals": {s: report.count(s) for s in STATUSES},
           "records": [asdict(r) for r in report.records]}
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def parse_machine(text: str) -> CheckReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc.msg), exc.lineno, exc.colno) from None
    if doc.get("schema") != SCHEMA:
        raise ParseError("not a check report", 1, 1)
    if doc.get("version") != SCHEMA_VERSION:
        raise ParseError(f"unsupported report version {doc.get('version')!r}", 1, 1)
    records = [CheckRecord(**r) for r in doc["records"]]
    for r in records:
        if r.status not in STATUSES:
            raise ParseError(f"bad status {r.status!r} in record {r.id}", 1, 1)
    report = CheckReport(doc["spec"], doc["seed"], doc["samples"], doc["suites"], records)
    if {s: report.count(s) for s in STATUSES} != doc["totals"]:
        raise ParseError("totals do not match the records", 1, 1)
    return report


def emit_report(report: CheckReport, fmt: str = "text") -> str:
    if fmt == "text":
        return render_text(report)
    if fmt == "machine":
        return render_machine(report)
    raise ValueError(f"unknown format {fmt!r}")
