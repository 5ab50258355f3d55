"""End-to-end smoke tests for the Python bindings.

These assume the compiled module is importable (the build tree's python/
directory is put on PYTHONPATH by the ctest harness).
"""

import json

import chorm

CHOR = """\
rec X {
  start c[C], u[U] on a as k;
  com u[U].password() -> c[C].pwd over k;
  start c[C], f[F] on b as kp;
  com c[C].pwd -> f[F].y over kp;
  if check(y)@f then
    sel f[F] -> c[C] : ok over kp;
    com c[C].file -> f[F].z over kp
  else
    sel f[F] -> c[C] : quit over kp;
    X
}
"""

PROTOCOLS = """\
protocol Ga { U -> C : <string> ; end }
protocol Gb {
  C -> F : <string> ;
  F -> C {
    ok: C -> F : <file> ; end,
    quit: end
  }
}
"""

ENV = {
    "functions": {
        "password": {"sig": ["->", "string"], "values": ["pwd123"]},
        "check": {"sig": ["string", "->", "bool"], "values": [True]},
    },
    "bindings": {"c.file": {"sort": "file", "value": "contents"}},
}


def test_parse_roundtrip():
    doc = chorm.parse_choreography(CHOR)
    assert doc["ok"]
    again = chorm.parse_choreography(doc["pretty"])
    assert again["ok"]
    assert again["pretty"] == doc["pretty"]


def test_parse_error_reports_position():
    doc = chorm.parse_choreography("com u[U].x ->")
    assert not doc["ok"]
    assert doc["error"]["line"] >= 1


def test_typecheck_ok():
    report = chorm.typecheck(CHOR, PROTOCOLS, json.dumps(ENV))
    assert report["ok"], report["errors"]


def test_typecheck_rejects_wrong_sort():
    bad = CHOR.replace("c[C].file", "c[C].42")
    report = chorm.typecheck(bad, PROTOCOLS, json.dumps(ENV))
    assert not report["ok"]
    assert any("sort" in e["message"] for e in report["errors"])


def test_run_produces_trace():
    doc = chorm.run(CHOR, ENV, fuel=32)
    assert doc["ok"]
    assert doc["startCount"] >= 2
    kinds = [s["event"]["kind"] for s in doc["steps"]]
    assert "com" in kinds and "sel" in kinds


def test_merge_single_session():
    doc = chorm.merge(CHOR)
    assert doc["ok"]
    merged = doc["merged"]
    assert merged.count("start ") == 1
    # Every interaction now runs over the one fresh session.
    assert "over " + doc["session"] in merged


def test_extract_after_merge():
    merged = chorm.merge(CHOR)
    assert merged["ok"]
    doc = chorm.extract(merged["merged"], json.dumps(ENV))
    assert doc["ok"]
    assert doc["type"]["type"] == "rec"


def test_mesh_member():
    merged = chorm.merge(CHOR)
    extracted = chorm.extract(merged["merged"], json.dumps(ENV))
    candidate = "protocol G { %s }" % extracted["pretty"]
    report = chorm.mesh(candidate, PROTOCOLS)
    assert report["member"], report.get("failing")


def test_mesh_non_member():
    report = chorm.mesh("protocol Bad { U -> F : <int> ; end }", PROTOCOLS)
    assert not report["member"]
    assert report["failing"]


def test_verify_passes():
    doc = chorm.verify(CHOR, env_json=ENV, depth=10)
    assert doc["soundness"]["passed"]
    assert doc["completeness"]["passed"]
