#    Licensed under the Apache License, Version 2.0 (the "License");
#    you may not use this file except in compliance with the License.
#    You may obtain a copy of the License at
#
#        https://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS,
#    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#    See the License for the specific language governing permissions and
#    limitations under the License.

"""Writes the London fixture graph, camera registry and 22-camera scenario into fixtures/."""

import argparse
import json
import math
import pathlib

EARTH_RADIUS_M = 6371008.8
MAIN_SPEED_KMH = 48.0
SPUR_SPEED_KMH = 32.0


def haversine(a, b):
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def polyline(start, end, count, wiggle):
    pts = []
    for i in range(count):
        t = i / (count - 1)
        lat = start[0] + (end[0] - start[0]) * t
        lon = start[1] + (end[1] - start[1]) * t + wiggle * math.sin(i * 1.3)
        pts.append((round(lat, 7), round(lon, 7)))
    return pts


class Graph:
    def __init__(self):
        self.nodes = {}
        self.edges = []

    def add_node(self, nid, pt):
        self.nodes[nid] = pt

    def link(self, a, b, speed=None):
        length = round(haversine(self.nodes[a], self.nodes[b]), 3)
        for u, v in ((a, b), (b, a)):
            e = {"from": u, "to": v, "length_m": length}
            if speed is not None:
                e["max_speed_kmh"] = speed
            self.edges.append(e)

    def to_json(self):
        return {
            "default_max_speed_kmh": MAIN_SPEED_KMH,
            "nodes": [{"id": n, "lat": p[0], "lon": p[1]} for n, p in sorted(self.nodes.items())],
            "edges": self.edges,
        }


def build_road(graph, base_id, start, end, count, wiggle, spurs):
    pts = polyline(start, end, count, wiggle)
    ids = [base_id + i for i in range(count)]
    for nid, pt in zip(ids, pts):
        graph.add_node(nid, pt)
    for a, b in zip(ids, ids[1:]):
        graph.link(a, b)
    for k, (at, spur_id) in enumerate(spurs):
        lat, lon = pts[at]
        graph.add_node(spur_id, (round(lat + 0.0002 * (1 if k % 2 else -1), 7), round(lon + 0.0011, 7)))
        graph.link(ids[at], spur_id, SPUR_SPEED_KMH)
    return ids


def camera(cid, road, node, pt, flip):
    c = {
        "id": cid,
        "lat": pt[0],
        "lon": pt[1],
        "road_name": road,
        "image_width_px": 352,
        "image_height_px": 288,
        "meters_per_pixel": 0.1,
        "refresh_seconds": 10,
        "clip_seconds": 9,
        "nearest_node": node,
    }
    if flip:
        c["flip_direction"] = True
    return c


def place_cameras(graph, ids, prefix, road, count, flips):
    cams = []
    for k in range(count):
        node = ids[round(k * (len(ids) - 1) / (count - 1))]
        cams.append(camera(f"{prefix}{k + 1}", road, node, graph.nodes[node], (k + 1) in flips))
    return cams


def vehicles_for(cams, first_id, speeds, stationary_cams, classes, offsets):
    out = []
    path = [c["id"] for c in cams]
    vid = first_id
    for i, speed in enumerate(speeds):
        direction = "outgoing" if i % 2 == 0 else "incoming"
        out.append({
            "id": vid,
            "entry_ms": 3000 * i + 1500,
            "speed_mps": speed,
            "direction": direction,
            "class": classes[i % len(classes)],
            "camera_path": path if direction == "outgoing" else list(reversed(path)),
        })
        vid += 1
    for k, cam_id in enumerate(stationary_cams):
        out.append({
            "id": vid,
            # Two seconds into a clip, so the whole dwell is recorded.
            "entry_ms": offsets[cam_id] + 22000 + 10000 * k,
            "speed_mps": 0.0,
            "direction": "stationary",
            "class": "car",
            "lane": "outgoing" if k % 2 == 0 else "incoming",
            "dwell_s": 4.0,
            "camera_path": [cam_id],
        })
        vid += 1
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "fixtures"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    g = Graph()
    brixton = build_road(g, 1000, (51.4810, -0.1107), (51.4460, -0.1230), 40, 0.00004,
                         [(5, 3001), (14, 3002), (27, 3003)])
    kennington = build_road(g, 2000, (51.4975, -0.1110), (51.4832, -0.1094), 17, 0.00003, [(8, 3004)])
    g.link(kennington[-1], brixton[0])

    cams = place_cameras(g, brixton, "C", "Brixton Road", 12, {3, 8})
    cams += place_cameras(g, kennington, "K", "Kennington Road", 10, {5})

    # Offsets stagger the clip schedules so windows close at different times per camera.
    sim_cams = [{"id": c["id"], "offset_ms": (i * 700) % 10000} for i, c in enumerate(cams)]
    speeds_b = [8.0, 9.5, 11.0, 12.5, 8.7, 10.2, 11.8, 12.9, 9.1, 10.6]
    speeds_k = [8.4, 9.9, 11.3, 12.2, 9.0, 10.4, 11.6, 12.7, 8.9, 10.1]
    classes = ["car", "car", "bus", "car", "truck", "motorcycle", "car", "car", "bus", "car"]
    offsets = {c["id"]: c["offset_ms"] for c in sim_cams}
    vehicles = vehicles_for(cams[:12], 1, speeds_b, ["C4", "C9"], classes, offsets)
    vehicles += vehicles_for(cams[12:], 101, speeds_k, ["K3", "K7"], classes, offsets)
    scenario = {
        "start_ms": 1700000000000,
        "fps": 30,
        "cycles": 56,
        "noise_px": 0,
        "min_confidence": 0.85,
        "max_confidence": 0.95,
        "cameras": sim_cams,
        "vehicles": vehicles,
    }

    (out / "london_graph.json").write_text(json.dumps(g.to_json(), indent=1) + "\n")
    (out / "london_cameras.json").write_text(json.dumps(cams, indent=1) + "\n")
    (out / "scenario_22.json").write_text(json.dumps(scenario, indent=1) + "\n")
    (out / "brixton_congestion.veql").write_text(
        "Select Traffic_Congestion(Object) from Brixton Road WHERE Object = 'Car' OR Object = 'Bus' "
        "OR Object = 'Truck' OR Object = 'Motorcycle' WITHIN Time_Window = 4.5 sec WITH CONFIDENCE > 40%\n")
    print(f"{len(g.nodes)} nodes, {len(g.edges)} edges, {len(cams)} cameras, {len(vehicles)} vehicles")


if __name__ == "__main__":
    main()
