"""Regenerate the JSON case fixtures and rule files under fixtures/.

    python scripts/build_fixtures.py [outdir]

The safe-driver case follows the Tim/Jon scenario; the ArduCopter fragment
reproduces the exported C29/C30/S30 snippet and the nodes around it that the
semantic checks exercise.  Each ``invalid_*`` case breaks exactly one
structural invariant and each ``malformed_*`` document fails to load.
"""

from __future__ import annotations

import copy
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def claim(id, desc, objects, properties, environments=(), **extra):
    d = {"id": id, "kind": "claim", "description": desc, "objects": list(objects),
         "properties": list(properties), "environments": list(environments)}
    d.update(extra)
    return d


def evidence(id, desc, objects, properties, environments, artefact, uri, **extra):
    d = claim(id, desc, objects, properties, environments, **extra)
    d.update(kind="evidence", artefact=artefact, uri=uri)
    return d


def side_claim(id, desc, objects, properties, environments, justification):
    d = claim(id, desc, objects, properties, environments)
    d.update(kind="side_claim", justification=justification)
    return d


def argument(id, desc):
    return {"id": id, "kind": "argument", "description": desc}


def defeater(id, desc, objects, properties, environments, target, status):
    d = claim(id, desc, objects, properties, environments)
    d.update(kind="defeater", defeats=target, defeater_status=status)
    return d


def theory(id, desc, objects, properties, environments=(), **extra):
    d = claim(id, desc, objects, properties, environments, **extra)
    d["kind"] = "theory_claim"
    return d


def edges(*triples):
    out = []
    for t in triples:
        parent, child = t[0], t[1]
        kind = t[2] if len(t) > 2 else "supports"
        out.append({"parent": parent, "child": child, "kind": kind})
    return out


def case(root, nodes, edge_list, vocabulary=None):
    return {"root": root, "nodes": nodes, "edges": edge_list, "vocabulary": vocabulary or {}}


# ---------------------------------------------------------------- safe driver

ENV = ["football_trip"]


def safedriver(status="resolved"):
    nodes = [
        claim("C1", "Tim is a safe driver", ["tim"], ["safe_driver"], ENV),
        argument("A1", "Argue over licensing, experience, driving record and conduct"),
        side_claim("S1", "Licensing, experience, record and conduct cover safe driving", ["driving_qualities"],
                   ["sufficient_for_safety"], ENV,
                   "A licensed, experienced driver with a clean record who drives responsibly is safe"),
        claim("C2", "Tim holds a valid driver's license", ["tim"], ["licensed"], ENV),
        claim("C3", "Tim is an experienced driver", ["tim"], ["experienced"], ENV),
        claim("C4", "Tim has a clean driving record", ["tim"], ["clean_record"], ENV),
        claim("C5", "Tim drives responsibly", ["tim"], ["drives_responsibly"], ENV),
        claim("C6", "Tim knows the route to the football game", ["tim"], ["knows_route"], ENV),
        argument("A2", "Argue over violations and accidents"),
        claim("C10", "Tim has no traffic violations", ["tim"], ["no_violations"], ENV),
        claim("C13", "Tim has not been involved in any accidents", ["tim"], ["accident_free"], ENV),
        evidence("E10", "DMV license record", ["tim"], ["license_on_record"], ENV, "dmv_license_record",
                 "file:dmv/license.pdf"),
        evidence("E11", "Driving log with more than 200 hours", ["tim"], ["logged_driving_hours"], ENV,
                 "driving_log", "file:logs/driving.csv"),
        evidence("E12", "DMV violation history", ["tim"], ["no_recorded_violations"], ENV,
                 "dmv_violation_history", "file:dmv/violations.pdf"),
        evidence("E13", "DMV accident history", ["tim"], ["no_recorded_accidents"], ENV,
                 "dmv_accident_history", "file:dmv/accidents.pdf"),
        evidence("E14", "Planned route to the stadium", ["tim"], ["route_planned"], ENV,
                 "route_plan", "file:trip/route.gpx"),
        evidence("E17", "Testimonials from friends and teachers", ["tim"], ["good_driving_testimonials"], ENV,
                 "testimonials", "file:testimonials.txt"),
        defeater("D1", "Testimonials mention a minor road incident not recorded by the DMV", ["testimonials"],
                 ["report_minor_incident"], ENV, "C13", status),
    ]
    e = edges(
        ("C1", "A1"), ("A1", "S1", "side-supports"), ("A1", "C2"), ("A1", "C3"), ("A1", "C4"), ("A1", "C5"),
        ("A1", "C6"), ("C4", "A2"), ("A2", "C10"), ("A2", "C13"),
        ("C2", "E10"), ("C3", "E11"), ("C10", "E12"), ("C13", "E13"), ("C5", "E17"), ("C6", "E14"),
        ("D1", "C13", "defeats"),
    )
    voc = {"types": ["person", "environment"], "instances": {"person": ["tim"], "environment": ["football_trip"]}}
    return case("C1", nodes, e, voc)


# ---------------------------------------------------------------- arducopter

AENV = ["arducopterEnv"]
SW = ["arducopter_software"]
DIST = {"mode": "distributive"}


def arducopter(status="resolved"):
    nodes = [
        claim("C29", "ArduCopter Software is fit for purpose in its operating environment", SW,
              ["fit_for_purpose"], AENV),
        argument("A29", "Argue via the overarching properties"),
        claim("C30", "ArduCopter Software possesses the overarching properties", SW,
              ["posses_overarching_properties"], AENV),
        side_claim("S30", "Overarching properties are an accepted means of compliance", ["overarching_properties"],
                   ["explored_as_means_of_compliance"], AENV,
                   "The use of overarching properties is being explored as a means of compliance"),
        argument("A30", "Argue over intent, correctness and innocuity"),
        claim("C31", "ArduCopter Software meets its intent", SW, ["meets_intent"], AENV, relationship=DIST),
        claim("C32", "ArduCopter Software is correct", SW, ["is_correct"], AENV, relationship=DIST),
        claim("C33", "ArduCopter Software is innocuous", SW, ["is_innocuous"], AENV, relationship=DIST),
        evidence("E31", "Requirements validation review", SW, ["requirements_validated"], AENV,
                 "requirements_review", "file:reviews/requirements.pdf"),
        argument("A32", "Argue over testing, assessment and static analysis"),
        claim("C34", "ArduCopter Software meets the DO-178C requirements-based testing objectives", SW,
              ["requirementsbased_testcases_passed", "requirements_testcase_coverage_achieved",
               "structural_coverage_achieved"], AENV, relationship={"mode": "joint"}),
        evidence("E34", "Test campaign report", SW, ["tests_executed"], AENV, "test_report", "file:tr.pdf"),
        claim("C40", "The design assessment process is complete", ["design_assessment"], ["process_complete"],
              AENV, relationship=DIST),
        evidence("E40", "Design assessment sign-off", ["design_assessment"], ["signed_off"], AENV,
                 "design_signoff", "file:assessments/design.pdf"),
        claim("C41", "A security assessment was performed", ["security_assessment"], ["performed"], AENV,
              relationship=DIST),
        evidence("E41", "Security assessment report", ["security_assessment"], ["reported"], AENV,
                 "security_report", "file:assessments/security.pdf"),
        claim("C102", "ArduCopter Software is statically analyzed", SW, ["statically_analyzed"], AENV,
              theory_ref={"theory": "C107", "binding": {"SW": "arducopter_software", "Env": "arducopterEnv"},
                          "correspondence": {"C102": "C107", "C103": "C108", "E103": "E108"}}),
        claim("C103", "The static analysis tool is qualified for ArduCopter Software", SW,
              ["analysis_tool_qualified"], AENV),
        evidence("E103", "Reviewed static analysis results", SW, ["analysis_results_reviewed"], AENV,
                 "static_analysis_report", "file:sa/report.html"),
        evidence("E33", "Hazard analysis showing no unintended behaviour", SW, ["hazards_mitigated"], AENV,
                 "hazard_analysis", "file:safety/hazards.pdf"),
        defeater("D102", "The static analyser may not cover concurrency defects", ["static_analyzer"],
                 ["misses_concurrency_defects"], AENV, "C102", status),
        theory("C107", "Theory of static analysis: SW is statically analyzed in Env", ["SW"],
               ["statically_analyzed"], ["Env"]),
        theory("C108", "The analysis tool is qualified for SW", ["SW"], ["analysis_tool_qualified"], ["Env"]),
        evidence("E108", "Reviewed analysis results for SW", ["SW"], ["analysis_results_reviewed"], ["Env"],
                 "analysis_results", "file:theory/analysis"),
    ]
    e = edges(
        ("C29", "A29"), ("A29", "C30"), ("A29", "S30", "side-supports"),
        ("C30", "A30"), ("A30", "C31"), ("A30", "C32"), ("A30", "C33"),
        ("C31", "E31"), ("C32", "A32"), ("A32", "C34"), ("A32", "C40"), ("A32", "C41"), ("A32", "C102"),
        ("C34", "E34"), ("C40", "E40"), ("C41", "E41"), ("C102", "C103"), ("C103", "E103"), ("C33", "E33"),
        ("D102", "C102", "defeats"), ("C102", "C107", "applies-theory"),
        ("C107", "C108"), ("C108", "E108"),
    )
    voc = {
        "types": ["software", "environment", "assessment"],
        "instances": {
            "software": ["arducopter_software"],
            "environment": ["arducopterEnv"],
            "assessment": ["design_assessment", "security_assessment"],
        },
        "properties": ["fit_for_purpose", "meets_intent", "is_correct", "is_innocuous", "process_complete"],
        "environments": ["arducopterEnv"],
        "variable_types": {"SW": "software", "Env": "environment"},
    }
    return case("C29", nodes, e, voc)


ARDUCOPTER_RULES = """\
% Semantic rules for the ArduCopter fragment.
%% consistency
:- safe(X), hazardous(X).
:- no_vulnerabilities(X), residual_security_risks(X).
%% adequacy
overarching_properties: meets_intent(X), is_correct(X), is_innocuous(X)
do178c_requirements_test_conformance_achieved: requirementsbased_testcases_passed(X), requirements_testcase_coverage_achieved(X), structural_coverage_achieved(X)
%% completeness
assessments_complete: assessment => process_complete
%% harmony
:- achieves_DAL_C_DO178c_requirement_testing(X), achieves_DAL_A_DO178c_code_coverage(X).
"""


# ---------------------------------------------------------------- consistency

def consistency():
    env = ["railEnv"]
    nodes = [
        claim("C1", "Train operation is acceptable", ["train"], ["acceptable_operation"], env),
        argument("A1", "Argue over safety and security of the train"),
        claim("C2", "The train is safe", ["train"], ["safe"], env, relationship=DIST),
        claim("C3", "The train is hazardous", ["train"], ["hazardous"], env, relationship=DIST),
        claim("C4", "The signalling software has no vulnerabilities", ["signalling_software"],
              ["no_vulnerabilities"], env, relationship=DIST),
        evidence("E2", "Safety case report", ["train"], ["safety_reviewed"], env, "safety_case", "file:safety.pdf"),
        evidence("E3", "Hazard log", ["train"], ["hazards_logged"], env, "hazard_log", "file:hazards.csv"),
        evidence("E4", "Penetration test report", ["signalling_software"], ["pen_tested"], env, "pentest",
                 "file:pentest.pdf"),
    ]
    e = edges(("C1", "A1"), ("A1", "C2"), ("A1", "C3"), ("A1", "C4"), ("C2", "E2"), ("C3", "E3"), ("C4", "E4"))
    voc = {"types": ["vehicle", "software"], "instances": {"vehicle": ["train"], "software": ["signalling_software"]}}
    return case("C1", nodes, e, voc)


CONSISTENCY_RULES = """\
%% consistency
:- safe(X), hazardous(X).
:- no_vulnerabilities(X), residual_security_risks(X).
"""


# ---------------------------------------------------------------- harmony

def harmony(second_object="arducopter_software"):
    joint = {"mode": "joint"}
    nodes = [
        claim("C1", "ArduCopter software meets its DO-178C objectives", SW, ["meets_do178c_objectives"], AENV),
        argument("A1", "Argue via DO-178C verification theories"),
        claim("C2", "Requirement testing of ArduCopter software achieves DAL C", SW,
              ["achieves_DAL_C_DO178c_requirement_testing"], AENV,
              theory_ref={"theory": "T1", "binding": {"X": "arducopter_software"},
                          "correspondence": {"C2": "T1", "E2": "T1E"}}),
        evidence("E2", "Requirement test results", SW, ["requirement_tests_passed"], AENV, "req_tests",
                 "file:tests/req.xml"),
        claim("C3", f"Code coverage of {second_object} achieves DAL A", [second_object],
              ["achieves_DAL_A_DO178c_code_coverage"], AENV,
              theory_ref={"theory": "T2", "binding": {"X": second_object},
                          "correspondence": {"C3": "T2", "E3": "T2E"}}),
        evidence("E3", "MC/DC coverage report", [second_object], ["mcdc_coverage_measured"], AENV,
                 "coverage_report", "file:tests/coverage.xml"),
        theory("T1", "Theory: X achieves DAL C requirement testing", ["X"],
               ["achieves_DAL_C_DO178c_requirement_testing"], AENV, relationship=joint),
        evidence("T1E", "Requirement test results for X", ["X"], ["requirement_tests_passed"], AENV,
                 "req_tests", "file:theory/req"),
        theory("T2", "Theory: X achieves DAL A code coverage", ["X"], ["achieves_DAL_A_DO178c_code_coverage"], AENV,
               relationship=joint),
        evidence("T2E", "MC/DC coverage report for X", ["X"], ["mcdc_coverage_measured"], AENV,
                 "coverage_report", "file:theory/coverage"),
    ]
    e = edges(
        ("C1", "A1"), ("A1", "C2"), ("A1", "C3"), ("C2", "E2"), ("C3", "E3"),
        ("C2", "T1", "applies-theory"), ("C3", "T2", "applies-theory"), ("T1", "T1E"), ("T2", "T2E"),
    )
    voc = {
        "types": ["software", "environment"],
        "instances": {"software": sorted({"arducopter_software", second_object}), "environment": ["arducopterEnv"]},
        "variable_types": {"X": "software"},
    }
    return case("C1", nodes, e, voc)


HARMONY_RULES = """\
%% harmony
% inharmonious_DAL_theories
:- achieves_DAL_C_DO178c_requirement_testing(X), achieves_DAL_A_DO178c_code_coverage(X).
"""


# ---------------------------------------------------------------- invalid / malformed

def _node(doc, nid):
    return next(n for n in doc["nodes"] if n["id"] == nid)


def invalid_cases():
    """One structurally invalid case per invariant, keyed by the diagnostic rule it trips."""
    base = safedriver()
    out = {}

    def variant(name, mutate):
        doc = copy.deepcopy(base)
        mutate(doc)
        out[name] = doc

    variant("cycle", lambda d: d["edges"].append({"parent": "C13", "child": "C4", "kind": "supports"}))
    variant("unreachable", lambda d: d["nodes"].append(claim("C99", "An orphan claim", ["tim"], ["orphaned"], ENV)))
    variant("root_kind", lambda d: d.update(root="E10"))
    variant("defeats_source", lambda d: d["edges"].append({"parent": "C2", "child": "C13", "kind": "defeats"}))
    variant("evidence_artefact", lambda d: (_node(d, "E10").pop("artefact"), _node(d, "E10").pop("uri")))
    variant("side_claim_justification", lambda d: _node(d, "S1").pop("justification"))
    variant("variable_outside_theory", lambda d: _node(d, "C2").update(objects=["X"]))
    variant("variable_property", lambda d: _node(d, "C3").update(properties=["Experienced"]))
    variant("positional_arity", lambda d: _node(d, "C5").update(
        properties=["drives_responsibly", "obeys_limits"], relationship={"mode": "positional"}))
    variant("argument_ope", lambda d: _node(d, "A2").update(objects=["tim"], properties=["p"], environments=[]))
    variant("bad_identifier", lambda d: _node(d, "C6").update(objects=["Tim's car"]))
    variant("defeater_status", lambda d: _node(d, "D1").update(defeater_status="pending"))
    variant("root_has_parent", lambda d: d["edges"].append({"parent": "C13", "child": "C1", "kind": "supports"}))
    variant("undeclared_type", lambda d: d["vocabulary"]["instances"].update(vehicle=["tims_car"]))

    doc = arducopter()
    _node(doc, "C102")["theory_ref"]["binding"].pop("Env")
    out["binding_domain"] = doc
    doc = arducopter()
    _node(doc, "C102")["theory_ref"]["theory"] = "C103"
    out["theory_ref_target"] = doc
    return out


def malformed_documents():
    doc = safedriver()
    dangling = copy.deepcopy(doc)
    dangling["edges"].append({"parent": "C1", "child": "C404", "kind": "supports"})
    duplicate = copy.deepcopy(doc)
    duplicate["nodes"].append(claim("C2", "Duplicate", ["tim"], ["licensed"], ENV))
    no_target = copy.deepcopy(doc)
    _node(no_target, "D1").pop("defeats")
    return {
        "dangling": json.dumps(dangling, indent=2) + "\n",
        "duplicate": json.dumps(duplicate, indent=2) + "\n",
        "no_target": json.dumps(no_target, indent=2) + "\n",
        "syntax": '{\n  "root": "C1",\n  "nodes": [\n    {"id": "C1", "kind": "claim",}\n  ]\n}\n',
    }


def build(outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    for sub in ("invalid", "malformed"):
        (outdir / sub).mkdir(exist_ok=True)

    def write(name, doc):
        (outdir / name).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

    write("minimal.case.json", case("C1", [claim("C1", "The system is fit for purpose", ["system"], ["fit"])], []))
    write("safedriver.case.json", safedriver("resolved"))
    write("safedriver_defeated.case.json", safedriver("unresolved"))
    write("arducopter.case.json", arducopter("resolved"))
    write("arducopter_defeated.case.json", arducopter("unresolved"))
    write("consistency.case.json", consistency())
    write("harmony.case.json", harmony())
    write("harmony_disjoint.case.json", harmony("flight_controller_firmware"))
    (outdir / "arducopter.rules").write_text(ARDUCOPTER_RULES, encoding="utf-8")
    (outdir / "consistency.rules").write_text(CONSISTENCY_RULES, encoding="utf-8")
    (outdir / "harmony.rules").write_text(HARMONY_RULES, encoding="utf-8")
    for name, doc in invalid_cases().items():
        write(f"invalid/{name}.case.json", doc)
    for name, text in malformed_documents().items():
        (outdir / "malformed" / f"{name}.case.json").write_text(text, encoding="utf-8")


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "fixtures"
    build(target)
    print(f"fixtures written to {target}")
