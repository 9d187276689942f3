"""Validates `report --format json` output against the published schema."""

import json
import pathlib
import subprocess
import sys

import jsonschema

cli, root = sys.argv[1], pathlib.Path(sys.argv[2])
schema = json.loads((root / "docs" / "report.schema.json").read_text())
curves = sorted((root / "tests" / "fixtures").glob("*/*.curve"))
curves += sorted((root / "tests" / "fixtures" / "odd").glob("*/*.curve"))[::25]
failures = 0
for path in curves:
    run = subprocess.run([cli, "report", str(path), "--format", "json"], capture_output=True, text=True)
    if run.returncode not in (0, 2):
        print(f"FAIL {path}: exit {run.returncode} {run.stderr.strip()}")
        failures += 1
        continue
    try:
        report = json.loads(run.stdout)
        jsonschema.validate(report, schema)
        expected = "complete" if run.returncode == 0 else "partial"
        assert report["status"] == expected, f"status {report['status']} but exit {run.returncode}"
        assert len(report["local"]) == len(report["places"])
    except (jsonschema.ValidationError, AssertionError, json.JSONDecodeError) as exc:
        print(f"FAIL {path}: {exc}")
        failures += 1
print(f"{len(curves) - failures}/{len(curves)} reports valid")
sys.exit(1 if failures else 0)
