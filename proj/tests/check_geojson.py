# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Runs the CLI on the simulated fixture, exports the overlay and validates it with jsonschema."""

import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

POSITION = {
    "type": "array",
    "minItems": 2,
    "maxItems": 3,
    "prefixItems": [
        {"type": "number", "minimum": -180, "maximum": 180},
        {"type": "number", "minimum": -90, "maximum": 90},
    ],
    "items": {"type": "number"},
}

NULLABLE_NUMBER = {"type": ["number", "null"]}

OVERLAY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["type", "features"],
    "properties": {
        "type": {"const": "FeatureCollection"},
        "features": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["type", "geometry", "properties"],
                "properties": {
                    "type": {"const": "Feature"},
                    "geometry": {
                        "type": "object",
                        "required": ["type", "coordinates"],
                        "properties": {
                            "type": {"const": "LineString"},
                            "coordinates": {"type": "array", "minItems": 2, "items": POSITION},
                        },
                    },
                    "properties": {
                        "type": "object",
                        "required": ["speed_kmh", "bucket", "direction", "ts_ms", "segment_id"],
                        "additionalProperties": False,
                        "properties": {
                            "speed_kmh": {"type": ["number", "null"], "minimum": 0},
                            "bucket": {"enum": ["green", "orange", "red", "brown", "nodata"]},
                            "direction": {"enum": ["outgoing", "incoming"]},
                            "ts_ms": {"type": ["integer", "null"]},
                            "segment_id": {"type": "string"},
                            "road": {"type": "string"},
                            "from_along_m": NULLABLE_NUMBER,
                            "to_along_m": NULLABLE_NUMBER,
                        },
                    },
                },
            },
        },
    },
}


def bucket_for(speed):
    if speed is None:
        return "nodata"
    if speed >= 45:
        return "green"
    if speed >= 30:
        return "orange"
    if speed >= 20:
        return "red"
    return "brown"


def estimated_targets(line):
    snap = json.loads(line)
    return sum((t["outgoing_kmh"] is not None) + (t["incoming_kmh"] is not None)
               for seg in snap["segments"] for t in seg["targets"])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--cli", required=True)
    parser.add_argument("--fixtures", required=True)
    args = parser.parse_args()
    fixtures = pathlib.Path(args.fixtures)

    with tempfile.TemporaryDirectory() as tmp:
        log = pathlib.Path(tmp) / "snapshots.jsonl"
        snapshot = pathlib.Path(tmp) / "snapshot.json"
        overlay = pathlib.Path(tmp) / "overlay.geojson"
        subprocess.run(
            [args.cli, "run", "--graph", str(fixtures / "london_graph.json"),
             "--cameras", str(fixtures / "london_cameras.json"),
             "--query-file", str(fixtures / "brixton_congestion.veql"),
             "--input", "simulate:" + str(fixtures / "scenario_22.json"),
             "--no-pacing", "--snapshot-log", str(log)],
            check=True, stdout=subprocess.DEVNULL)
        # Traffic has left the road by the end of the run; export the busiest snapshot instead.
        lines = log.read_text().splitlines()
        snapshot.write_text(max(lines, key=estimated_targets) + "\n")
        subprocess.run([args.cli, "export-overlay", "--snapshot", str(snapshot), "--out", str(overlay)],
                       check=True, stdout=subprocess.DEVNULL)
        doc = json.loads(overlay.read_text())

    jsonschema.Draft202012Validator.check_schema(OVERLAY_SCHEMA)
    errors = list(jsonschema.Draft202012Validator(OVERLAY_SCHEMA).iter_errors(doc))
    for e in errors[:5]:
        print("schema violation at", "/".join(map(str, e.absolute_path)), ":", e.message)
    features = doc["features"]
    if not features:
        errors.append("empty overlay")
    colored = 0
    for f in features:
        props = f["properties"]
        if props["bucket"] != bucket_for(props["speed_kmh"]):
            errors.append(f"bucket {props['bucket']} inconsistent with speed {props['speed_kmh']}")
        colored += props["speed_kmh"] is not None
    if colored == 0:
        errors.append("no span carries a speed")
    print(f"{len(features)} features, {colored} with speed, {len(errors)} problems")
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
