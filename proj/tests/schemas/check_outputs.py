"""Runs the CLI over the acceptance manifest suite and validates every JSON
output against the shipped schemas and every CSV for a header row."""

import argparse
import fnmatch
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema

BY_COMMAND = {
    "film": {"film.json": "film"},
    "bath": {"bath.json": "bath"},
    "fit-sweep": {"fit.json": "sweep_fit"},
    "simulate": {"trace.json": "trace"},
    "analyze": {"fit.json": "mode_fit"},
    "track": {"stats.json": "track_stats"},
    "fit-power": {"fit.json": "power_fit"},
    "repro": {
        "fit_*.json": "repro_sweep_fit",
        "fits.json": "repro_power_fits",
        "thermal_fit.json": "repro_thermal_fit",
        "track_stats.json": "repro_track_stats",
    },
}


def schema_for(command, name, value):
    if name == "manifest.json":
        return "manifest"
    if name == "checks.json":
        return "checks"
    for pattern, schema in BY_COMMAND.get(command, {}).items():
        if fnmatch.fnmatch(name, pattern):
            return schema
    if isinstance(value, list):
        return "table"
    return None


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--acceptance", required=True)
    ap.add_argument("--schemas", required=True, type=pathlib.Path)
    ap.add_argument("--work", required=True, type=pathlib.Path)
    args = ap.parse_args()

    schemas = {p.name.removesuffix(".schema.json"): json.loads(p.read_text()) for p in args.schemas.glob("*.schema.json")}
    for s in schemas.values():
        jsonschema.Draft202012Validator.check_schema(s)

    shutil.rmtree(args.work, ignore_errors=True)
    root = args.work / "runs"
    subprocess.run([args.acceptance, "--only", "AC-9", "--cli", args.cli, "--keep", str(root)], check=True)
    cli = [args.cli]
    subprocess.run(cli + ["backaction", "--config", str(root / "cooling.cfg"), "--format", "json",
                          "--out", str(root / "backaction-json")], check=True, capture_output=True)
    subprocess.run(cli + ["film", "--zeta", "2.4", "--format", "json", "--out", str(root / "film-json")],
                   check=True, capture_output=True)

    # A shortened tracking figure; exit 5 only means a statistical check missed.
    fig3 = subprocess.run(cli + ["repro", "fig3", "--track-points", "600", "--out", str(root / "repro-fig3")],
                          capture_output=True)

    failures = []
    if fig3.returncode not in (0, 5):
        failures.append(f"repro fig3 exited with {fig3.returncode}")

    def validate(value, schema, where):
        try:
            jsonschema.validate(value, schemas[schema])
        except jsonschema.ValidationError as e:
            failures.append(f"{where}: {schema}: {e.message}")

    checked = 0
    for manifest in sorted(root.glob("*/manifest.json")):
        command = json.loads(manifest.read_text())["subcommand"]
        for f in sorted(manifest.parent.iterdir()):
            if f.suffix == ".json":
                value = json.loads(f.read_text())
                schema = schema_for(command, f.name, value)
                if schema is None:
                    failures.append(f"{f}: no schema for this output")
                    continue
                validate(value, schema, f)
                checked += 1
            elif f.suffix == ".csv":
                header = f.read_text().split("\n", 1)[0].split(",")
                if not header or any(not h or h[0] in "0123456789-+." for h in header):
                    failures.append(f"{f}: missing header row")
                checked += 1

    replay = subprocess.run(cli + ["replay", "--manifest", str(root / "film" / "manifest.json"),
                                   "--out", str(args.work / "film-replay")], capture_output=True, text=True)
    validate(json.loads(replay.stdout), "replay", "replay stdout")
    bad = subprocess.run(cli + ["bath", "--temperature", "0.53", "--out", str(args.work / "bad")],
                         capture_output=True, text=True)
    if bad.returncode != 2:
        failures.append(f"usage error exited with {bad.returncode}")
    validate(json.loads(bad.stderr), "error", "error stderr")

    for line in failures:
        print("FAIL", line)
    print(f"{checked} output files checked, {len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
