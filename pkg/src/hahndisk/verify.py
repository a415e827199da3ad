"""Independent checkers for transcripts, certificates and division traces.

Everything here is re-derived from the raw transcript numbers with direct
rational formulas; this module never imports the builder or the division
code, only the series engine and the shared value-group helpers.  A check
failure is reported with the stage or step it belongs to, so a single
mutated field in a document is pinpointed rather than merely rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .config import InstanceConfig
from .errors import HahndiskError
from .fields import GroundField, ResidueField
from .series import TruncatedSeries
from .tate import SubstitutionMap, TateRing
from .valgroup import EXACT, as_fraction, is_in_zp, omega, smallest_zp_point


@dataclass
class Finding:
    ok: bool
    where: str
    message: str


class Report:
    def __init__(self):
        self.findings = []

    def check(self, ok: bool, where: str, message: str) -> bool:
        self.findings.append(Finding(bool(ok), where, message))
        return bool(ok)

    def fail(self, where: str, message: str):
        self.findings.append(Finding(False, where, message))

    def note(self, where: str, message: str):
        self.findings.append(Finding(True, where, message))

    @property
    def ok(self) -> bool:
        return all(f.ok for f in self.findings)

    def failures(self):
        return [f for f in self.findings if not f.ok]

    def text(self, verbose: bool = False) -> str:
        lines = []
        for f in self.findings:
            if verbose or not f.ok:
                mark = "ok " if f.ok else "FAIL"
                lines.append(f"{mark} [{f.where}] {f.message}")
        lines.append(f"{'PASS' if self.ok else 'FAIL'}: "
                     f"{len(self.findings)} checks, {len(self.failures())} failures")
        return "\n".join(lines)


# -- raw transcript access ----------------------------------------------------


@dataclass
class _Row:
    m: int
    omega: Fraction
    v_e: Fraction
    b: int
    v_eps: Fraction


def _rows(doc) -> list:
    rows = []
    for raw in doc["stages"]:
        rows.append(
            _Row(
                m=int(raw["m"]),
                omega=as_fraction(raw["omega"]),
                v_e=as_fraction(raw["v_e"]),
                b=int(raw["b"]),
                v_eps=as_fraction(raw["v_eps"]),
            )
        )
    return rows


def _w(row: _Row, gamma_x: Fraction) -> Fraction:
    return row.v_e + row.omega * gamma_x


def _stage_weight(row: _Row, p: int, gamma_x: Fraction) -> Fraction:
    return p ** row.b * _w(row, gamma_x)


def _fw_weight(row: _Row, p: int, gamma_x: Fraction, v_c: Fraction) -> Fraction:
    if row.omega >= 0:
        return row.omega * p ** row.b * gamma_x
    return (-row.omega) * p ** row.b * (v_c - gamma_x)


def _d_requirement(row, p, gamma_x, v_c) -> Fraction:
    return _fw_weight(row, p, gamma_x, v_c) - _stage_weight(row, p, gamma_x)


def _constraints_hold(rows, idx, b, p, gamma_x, v_s, guard, guarded) -> bool:
    """The exact stage inequalities at Frobenius exponent b (index 0-based)."""
    row = rows[idx]
    w = _w(row, gamma_x)
    scale = p ** b
    if not scale * w > idx + 1:
        return False
    if not row.v_eps / scale < v_s - w:
        return False
    for prev in rows[:idx]:
        gap = p ** (b - prev.b) * w
        if not gap > 1 + v_s:
            return False
        if guarded and not gap > guard:
            return False
    return True


# -- formula-level reconstruction ----------------------------------------------


def _image_series(rows, idx, p, gamma_x, v_c, guard, field: ResidueField) -> TruncatedSeries:
    """The certificate image of stage idx+1, straight from the transcript:
    scaled committed stage terms from this stage on, bounded below by the
    tail guard for everything not committed."""
    row = rows[idx]
    scale = p ** row.b
    prec = row.v_eps / scale + guard
    terms = {}
    for later in rows[idx:]:
        t_exp = (row.v_eps + p ** later.b * later.v_e) / scale
        x_exp = Fraction(later.omega * p ** later.b, scale)
        key = (t_exp, x_exp)
        terms[key] = (terms.get(key, 0) + 1) % p
    return TruncatedSeries(field.profile, terms, prec)


def _preimage_series(rows, idx, p, v_c, ring: TateRing) -> TruncatedSeries:
    row = rows[idx]
    scale = p ** row.b
    terms = {(row.v_eps / scale, Fraction(0), Fraction(0), Fraction(1, scale)): 1}
    for prev in rows[:idx]:
        if prev.omega >= 0:
            d_t = row.v_eps + p ** prev.b * prev.v_e
            x1 = Fraction(prev.omega * p ** prev.b, scale)
            x2 = Fraction(0)
        else:
            d_t = row.v_eps + p ** prev.b * (prev.v_e + prev.omega * v_c)
            x1 = Fraction(0)
            x2 = Fraction(-prev.omega * p ** prev.b, scale)
        key = (d_t / scale, x1, x2, Fraction(0))
        terms[key] = (terms.get(key, 0) - 1) % p
    return TruncatedSeries(ring.profile, terms, EXACT)


def _alpha_series(rows, p, work_prec, field: ResidueField) -> TruncatedSeries:
    prec = min(work_prec, Fraction(len(rows) + 1))
    terms = {}
    for row in rows:
        key = (p ** row.b * row.v_e, Fraction(row.omega * p ** row.b))
        terms[key] = (terms.get(key, 0) + 1) % p
    return TruncatedSeries(field.profile, terms, prec)


def _adapted_facts(image: TruncatedSeries, row: _Row, v_s: Fraction, rep: Report, where: str):
    lead = image.leading()
    if lead is None:
        rep.fail(where, "image has no resolved leading term")
        return
    w0, exps, coeff = lead
    rep.check(0 <= w0 < v_s, where, f"leading value {w0} inside [0, {v_s})")
    rep.check(exps[1] == row.omega, where,
              f"leading exponent {exps[1]} matches stage exponent {row.omega}")
    residual = image - TruncatedSeries.monomial(image.profile, coeff, exps)
    res_val = residual.val_lower()
    rep.check(res_val is None or res_val > 1 + v_s, where,
              f"residual valuation {res_val} beyond {1 + v_s}")


# -- plan verification ----------------------------------------------------------


def verify_plan(doc: dict, report: Report | None = None) -> Report:
    rep = report if report is not None else Report()
    if doc.get("kind") != "plan":
        rep.fail("plan", "document kind is not 'plan'")
        return rep
    try:
        config = InstanceConfig.from_dict(doc["instance"])
        rows = _rows(doc)
        v_c = as_fraction(doc["v_c"])
        guard = as_fraction(doc["tail_guard"])
        m_base = int(doc["m_base"])
    except (KeyError, TypeError, ValueError, HahndiskError) as exc:
        rep.fail("plan", f"malformed transcript: {exc}")
        return rep
    p, gamma_x, v_s = config.p, config.gamma_x, config.v_s
    field = ResidueField(GroundField(p), gamma_x)
    ring = TateRing(GroundField(p), 3)

    rep.check(v_c == smallest_zp_point(gamma_x, gamma_x + v_s, p), "plan",
              f"v_c = {v_c} is the canonical point of ({gamma_x}, {gamma_x + v_s})")
    rep.check(guard == config.work_prec, "plan",
              f"tail guard {guard} equals work_prec {config.work_prec}")
    rep.check(1 <= m_base <= len(rows) and m_base == config.stages, "plan",
              f"base length {m_base} consistent with {len(rows)} committed stages")
    rep.check([r.m for r in rows] == list(range(1, len(rows) + 1)), "plan",
              "stage indices are contiguous from 1")
    rep.check(len({r.omega for r in rows}) == len(rows), "plan",
              "stage exponents are pairwise distinct")

    for idx, row in enumerate(rows):
        where = f"stage {row.m}"
        ok_member = rep.check(
            is_in_zp(row.omega, p) and is_in_zp(row.v_e, p) and is_in_zp(row.v_eps, p),
            where, "omega, v_e, v_eps lie in Z[1/p]")
        rep.check(isinstance(row.b, int) and row.b >= 0, where,
                  "Frobenius exponent is a nonnegative integer")
        if not ok_member:
            continue
        if row.m <= m_base:
            rep.check(row.omega == omega(row.m, p), where,
                      f"exponent {row.omega} follows the fixed enumeration")
        lo = -row.omega * gamma_x
        rep.check(row.v_e == smallest_zp_point(lo, lo + v_s, p), where,
                  f"v_e = {row.v_e} is the canonical point of ({lo}, {lo + v_s})")
        want_eps = max(
            [Fraction(0)] + [_d_requirement(r, p, gamma_x, v_c) for r in rows[:idx]]
        )
        rep.check(row.v_eps == want_eps, where,
                  f"v_eps = {row.v_eps} equals the divisibility demand {want_eps}")
        w = _w(row, gamma_x)
        rep.check(0 < w < v_s, where, f"stage weight seed {w} inside (0, {v_s})")
        if row.m == 1:
            rep.check(row.b == 0, where, "opening stage has Frobenius exponent 0")
            continue
        guarded = row.m > m_base
        rep.check(
            _constraints_hold(rows, idx, row.b, p, gamma_x, v_s, guard, guarded),
            where, f"growth, window and separation hold at b = {row.b}")
        minimal = all(
            not _constraints_hold(rows, idx, bb, p, gamma_x, v_s, guard, guarded)
            for bb in range(row.b)
        )
        rep.check(minimal, where, f"b = {row.b} is minimal")

    if rep.ok:
        for idx, row in enumerate(rows):
            image = _image_series(rows, idx, p, gamma_x, v_c, guard, field)
            _adapted_facts(image, row, v_s, rep, f"stage {row.m} image")

    summary = doc.get("summary")
    if summary is not None and rep.ok:
        alpha = _alpha_series(rows, p, config.work_prec, field)
        rep.check(summary.get("alpha_valuation") == str(alpha.val_lower()),
                  "summary", "alpha valuation matches")
        rep.check(summary.get("alpha_precision") == str(alpha.precision),
                  "summary", "alpha precision matches")
        rep.check(summary.get("certificates_verified") == len(rows),
                  "summary", "certificate count matches")
        rep.check(summary.get("witness_valuation") == str(gamma_x),
                  "summary", "witness valuation is gamma_x")
        rep.check(summary.get("witness_in_value_group") is False,
                  "summary", "witness valuation lies outside Z[1/p]")
        x_img = field.x_power(1)
        cx_inv = field.monomial(1, v_c, -1)
        relation_zero = x_img * cx_inv - field.monomial(1, v_c, 0)
        rep.check(
            summary.get("relation_maps_to_zero") is True
            and relation_zero.is_zero and relation_zero.precision is EXACT,
            "summary", "product relation maps to the exact zero")
    return rep


# -- certificate verification ----------------------------------------------------


def verify_certificate(doc: dict, report: Report | None = None) -> Report:
    rep = report if report is not None else Report()
    if doc.get("kind") != "certificate":
        rep.fail("certificate", "document kind is not 'certificate'")
        return rep
    verify_plan(doc.get("plan", {}), rep)
    if not rep.ok:
        return rep
    config = InstanceConfig.from_dict(doc["plan"]["instance"])
    rows = _rows(doc["plan"])
    v_c = as_fraction(doc["plan"]["v_c"])
    guard = as_fraction(doc["plan"]["tail_guard"])
    p = config.p
    field = ResidueField(GroundField(p), config.gamma_x)
    ring = TateRing(GroundField(p), 3)
    try:
        m = int(doc["m"])
        q = as_fraction(doc["q"])
        recorded_pre = ring.parse(doc["preimage"])
        recorded_img = field.parse(doc["image"])
    except (KeyError, TypeError, ValueError, HahndiskError) as exc:
        rep.fail("certificate", f"malformed certificate: {exc}")
        return rep
    where = f"certificate stage {m}"
    if not rep.check(1 <= m <= len(rows), where, "stage index is committed"):
        return rep
    row = rows[m - 1]
    rep.check(q == row.omega, where, f"exponent {q} matches stage exponent")
    rep.check(as_fraction(doc["v_s"]) == config.v_s, where, "v_s matches the instance")
    image = _image_series(rows, m - 1, p, config.gamma_x, v_c, guard, field)
    preimage = _preimage_series(rows, m - 1, p, v_c, ring)
    rep.check(recorded_img == image, where,
              "recorded image equals the transcript-derived image")
    rep.check(recorded_pre == preimage, where,
              "recorded preimage equals the transcript-derived preimage")
    rep.check(all(exps[0] >= 0 for exps in preimage.terms), where,
              "preimage lies in the unit-ball subring")
    _adapted_facts(image, row, config.v_s, rep, where)
    lead = doc.get("leading", {})
    got = image.leading()
    if got is not None:
        w0, exps, coeff = got
        rep.check(
            lead.get("t_exp") == str(exps[0])
            and lead.get("x_exp") == str(exps[1])
            and lead.get("coeff") == coeff,
            where, "recorded leading monomial matches")
    rep.check(all(c.get("ok") is True for c in doc.get("checks", [])), where,
              "recorded checks all passed")
    return rep


# -- trace verification -----------------------------------------------------------


def _slice_terms(beta: TruncatedSeries, m: int, v_s: Fraction) -> TruncatedSeries:
    lo, hi = m + v_s, m + 1 + v_s
    kept = {e: c for e, c in beta.terms.items() if lo <= beta.profile.weight(e) < hi}
    return TruncatedSeries(beta.profile, kept, EXACT)


def verify_trace(doc: dict, report: Report | None = None) -> Report:
    rep = report if report is not None else Report()
    if doc.get("kind") != "trace":
        rep.fail("trace", "document kind is not 'trace'")
        return rep
    verify_plan(doc.get("plan", {}), rep)
    if not rep.ok:
        return rep
    import hashlib

    config = InstanceConfig.from_dict(doc["plan"]["instance"])
    rows = _rows(doc["plan"])
    v_c = as_fraction(doc["plan"]["v_c"])
    guard = as_fraction(doc["plan"]["tail_guard"])
    p, v_s = config.p, config.v_s
    ground = GroundField(p)
    field = ResidueField(ground, config.gamma_x)
    ring = TateRing(ground, 3)
    by_exponent = {row.omega: idx for idx, row in enumerate(rows)}

    try:
        target_text = doc["target"]
        target = field.parse(target_text)
        steps = doc["steps"]
    except (KeyError, TypeError, HahndiskError) as exc:
        rep.fail("trace", f"malformed trace: {exc}")
        return rep
    rep.check(
        doc.get("target_sha256") == hashlib.sha256(target_text.encode()).hexdigest(),
        "trace", "target digest matches")
    val0 = target.val_lower()
    rep.check(val0 is None or val0 >= v_s, "trace",
              f"target valuation {val0} is normalized to >= {v_s}")

    beta = target
    a = ring.zero()
    for rec in steps:
        m = int(rec["m"])
        where = f"step {m}"
        if not rep.check(as_fraction(rec["bound"]) == m + v_s, where,
                         "recorded bound is the band floor"):
            return rep
        try:
            rec_beta = field.parse(rec["beta"])
            rec_band = field.parse(rec["band"])
            rec_e = ring.parse(rec["e"])
            rec_a = ring.parse(rec["a_after"])
            rec_next = field.parse(rec["beta_after"])
        except HahndiskError as exc:
            rep.fail(where, f"malformed step record: {exc}")
            return rep
        if not rep.check(rec_beta == beta, where,
                         "recorded residual matches the replayed chain"):
            return rep
        val = beta.val_lower()
        rep.check(val is None or val >= m + v_s, where,
                  f"residual valuation {val} >= {m + v_s}")
        band = _slice_terms(beta, m, v_s)
        if not rep.check(rec_band == band, where, "recorded band matches"):
            return rep
        groups = {}
        for exps, c in band.terms.items():
            groups.setdefault(exps[1], {})[exps] = c
        f_e = field.zero()
        e_m = ring.zero()
        t_m_res = field.monomial(1, m, 0)
        t_m_ring = ring.monomial(1, m, (0, 0, 0))
        order = sorted(groups, key=lambda qq: (
            min(band.profile.weight(e) for e in groups[qq]), qq))
        ok_groups = True
        for q in order:
            idx = by_exponent.get(q)
            if idx is None:
                rep.fail(where, f"no committed stage for exponent {q}")
                ok_groups = False
                break
            image = _image_series(rows, idx, p, config.gamma_x, v_c, guard, field)
            preimage = _preimage_series(rows, idx, p, v_c, ring)
            w0, lexps, lcoeff = image.leading()
            part = TruncatedSeries(field.profile, groups[q], EXACT)
            d = part * (field.monomial(lcoeff, *lexps) * t_m_res).invert()
            d_val = d.val_lower()
            if not rep.check(d_val is not None and d_val > 0, where,
                             f"quotient for exponent {q} has valuation {d_val} > 0"):
                ok_groups = False
                break
            d_ring = TruncatedSeries(
                ring.profile,
                {(a0, Fraction(0), Fraction(0), Fraction(0)): c
                 for (a0, _), c in d.terms.items()},
                d.precision)
            e_m = e_m + d_ring * t_m_ring * preimage
            f_e = f_e + d * t_m_res * image
        if not ok_groups:
            return rep
        beta_next = beta - f_e
        a_next = a + e_m
        if not rep.check(rec_e == e_m, where, "recorded correction matches"):
            return rep
        rep.check(rec_a == a_next, where, "recorded approximant matches")
        rep.check(rec_next == beta_next, where, "recorded next residual matches")
        gap = e_m.val_lower()
        rep.check(gap is None or gap >= m, where,
                  f"approximant moved by valuation {gap} >= {m}")
        val_next = beta_next.val_lower()
        rep.check(val_next is None or val_next >= m + 1 + v_s, where,
                  f"contracted residual valuation {val_next} >= {m + 1 + v_s}")
        beta, a = beta_next, a_next

    final = doc.get("final", {})
    try:
        rec_final = field.parse(final["residual"])
    except (KeyError, HahndiskError) as exc:
        rep.fail("final", f"malformed final record: {exc}")
        return rep
    rep.check(rec_final == beta, "final", "recorded final residual matches")
    rep.check(as_fraction(final.get("bound", "0")) == len(steps) + v_s, "final",
              "final bound is steps + v_s")
    val = beta.val_lower()
    rep.check(val is None or val >= len(steps) + v_s, "final",
              f"final residual valuation {val} >= {len(steps) + v_s}")
    recorded_val = final.get("val_lower")
    want_val = "EXACT" if val is None else str(val)
    rep.check(recorded_val == want_val, "final", "recorded residual valuation matches")

    # Generic-route consistency: evaluating the final approximant through the
    # substitution map must agree with target - residual on resolved terms.
    alpha = _alpha_series(rows, p, config.work_prec, field)
    sub = SubstitutionMap(ring, field,
                          (field.x_power(1), field.monomial(1, v_c, -1), alpha))
    diff = sub.apply(a, config.work_prec) + beta - target
    rep.check(not diff.terms, "final",
              "substitution route agrees with the certificate route")
    return rep


def verify_document(doc: dict) -> Report:
    kind = doc.get("kind")
    if kind == "plan":
        return verify_plan(doc)
    if kind == "certificate":
        return verify_certificate(doc)
    if kind == "trace":
        return verify_trace(doc)
    rep = Report()
    rep.fail("document", f"unknown document kind {kind!r}")
    return rep
