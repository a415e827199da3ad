"""The independent checker must accept honest documents and localize any
single tampered field."""

import copy
import random
from fractions import Fraction

from hahndisk.builder import (
    build_adapted,
    build_plan,
    certificate_to_doc,
    plan_summary,
    plan_to_doc,
)
from hahndisk.division import run_division, trace_to_doc
from hahndisk.verify import verify_certificate, verify_document, verify_plan, verify_trace

from conftest import rand_normalized_target

F = Fraction


def full_plan_doc(plan, residue, ring3):
    return plan_to_doc(plan, summary=plan_summary(plan, residue, ring3))


class TestPlanVerification:
    def test_accepts_fresh_plan(self, plan, residue, ring3):
        report = verify_plan(full_plan_doc(plan, residue, ring3))
        assert report.ok, report.text()

    def test_rejects_wrong_kind(self):
        report = verify_plan({"kind": "nonsense"})
        assert not report.ok

    def test_stage_mutations_are_localized(self, plan, residue, ring3):
        doc = full_plan_doc(plan, residue, ring3)
        mutations = [
            ("stage 5", lambda d: d["stages"][4].__setitem__("b", 10)),
            ("stage 5", lambda d: d["stages"][4].__setitem__("b", 12)),
            ("stage 7", lambda d: d["stages"][6].__setitem__("v_eps", "2125765")),
            ("stage 1", lambda d: d["stages"][0].__setitem__("v_e", "2/9")),
            ("stage 3", lambda d: d["stages"][2].__setitem__("omega", "5")),
            ("plan", lambda d: d.__setitem__("v_c", "7/9")),
            ("summary", lambda d: d["summary"].__setitem__("alpha_valuation", "2/9")),
        ]
        for where, mutate in mutations:
            tampered = copy.deepcopy(doc)
            mutate(tampered)
            report = verify_plan(tampered)
            assert not report.ok
            assert any(f.where == where for f in report.failures()), (
                where, report.text())


class TestCertificateVerification:
    def test_accepts_fresh_certificates(self, plan, residue, ring3):
        for m in (1, 2, 7, 12):
            cert = build_adapted(plan, m, residue, ring3)
            report = verify_certificate(certificate_to_doc(plan, cert))
            assert report.ok, report.text()

    def test_image_tamper_detected(self, plan, residue, ring3):
        cert = build_adapted(plan, 2, residue, ring3)
        doc = certificate_to_doc(plan, cert)
        doc["image"] = doc["image"].replace("1 t^", "2 t^", 1)
        report = verify_certificate(doc)
        assert not report.ok
        assert any("stage 2" in f.where for f in report.failures())

    def test_leading_tamper_detected(self, plan, residue, ring3):
        cert = build_adapted(plan, 3, residue, ring3)
        doc = certificate_to_doc(plan, cert)
        doc["leading"]["coeff"] = 2
        report = verify_certificate(doc)
        assert not report.ok


class TestTraceVerification:
    def make_trace_doc(self, cfg, residue, ring3, seed=29, steps=5):
        plan = build_plan(cfg)
        rng = random.Random(seed)
        beta = rand_normalized_target(rng, residue, cfg.v_s)
        trace = run_division(plan, residue, ring3, beta, steps)
        return trace_to_doc(trace)

    def test_accepts_fresh_trace(self, cfg, residue, ring3):
        report = verify_trace(self.make_trace_doc(cfg, residue, ring3))
        assert report.ok, report.text()

    def test_step_mutations_are_localized(self, cfg, residue, ring3):
        doc = self.make_trace_doc(cfg, residue, ring3)
        step = len(doc["steps"]) // 2

        def bump_coeff(text):
            lines = text.splitlines()
            for i, line in enumerate(lines):
                if not line.startswith("O("):
                    coeff = int(line.split()[0])
                    lines[i] = " ".join(["1" if coeff == 2 else "2"]
                                        + line.split()[1:])
                    return "\n".join(lines) + "\n"
            return "O(1)\n"  # replace an empty record with junk

        mutations = [
            (f"step {step}", lambda d: d["steps"][step].__setitem__(
                "beta", bump_coeff(d["steps"][step]["beta"]))),
            (f"step {step}", lambda d: d["steps"][step].__setitem__(
                "e", bump_coeff(d["steps"][step]["e"]))),
            (f"step {step}", lambda d: d["steps"][step].__setitem__(
                "bound", "1/8")),
            ("final", lambda d: d["final"].__setitem__("val_lower", "99")),
            ("trace", lambda d: d.__setitem__("target_sha256", "0" * 64)),
        ]
        for where, mutate in mutations:
            tampered = copy.deepcopy(doc)
            mutate(tampered)
            report = verify_trace(tampered)
            assert not report.ok
            assert any(f.where == where for f in report.failures()), (
                where, report.text())


class TestDispatch:
    def test_routes_by_kind(self, plan, residue, ring3):
        assert verify_document(full_plan_doc(plan, residue, ring3)).ok
        cert = build_adapted(plan, 1, residue, ring3)
        assert verify_document(certificate_to_doc(plan, cert)).ok
        assert not verify_document({"kind": "mystery"}).ok
