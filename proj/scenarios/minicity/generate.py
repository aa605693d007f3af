"""Regenerates the synthetic mini-city inputs (locations, road, hourly demand)."""
import csv
import math
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

LOCATIONS = [
    # id, name, passthrough, distance offset km, time offset min
    (0, "north", False, 0.0, 0.0),
    (1, "center", False, 0.0, 0.0),
    (2, "south", False, 0.0, 0.0),
    (3, "bridge", True, 9.0, 12.0),
]

# symmetric base distances (km) between zone centroids; diagonal is intra-zone travel
DIST = [
    [4.5, 7.8, 14.0, 6.0],
    [7.8, 3.8, 7.2, 8.2],
    [14.0, 7.2, 5.0, 15.2],
    [6.0, 8.2, 15.2, 0.0],
]
SPEED_KMH = 30.0


def hourly_profile(hour):
    # morning and evening bumps on top of a night floor
    am = math.exp(-((hour - 8.0) ** 2) / 4.0)
    pm = math.exp(-((hour - 17.5) ** 2) / 5.0)
    return 0.15 + 1.2 * am + 1.0 * pm + (0.35 if 10 <= hour <= 15 else 0.0)


def main():
    rng = random.Random(20240611)
    with open(HERE / "locations.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "name", "is_passthrough", "distance_offset_km", "time_offset_min"])
        for row in LOCATIONS:
            w.writerow([row[0], row[1], "true" if row[2] else "false", row[3], row[4]])

    with open(HERE / "road.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["origin", "dest", "distance_km", "travel_time_min"])
        for o in range(4):
            for d in range(4):
                if o == 3 and d == 3:
                    continue
                km = DIST[o][d]
                w.writerow([o, d, km, round(km / SPEED_KMH * 60.0, 1)])

    # attractiveness of each zone as origin in the morning / destination in the evening
    weight = [1.0, 1.6, 0.9, 0.7]
    with open(HERE / "demand.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["origin", "dest", "hour", "volume"])
        # no wrap-around arcs: the last hour is left free so every trip can finish
        for hour in range(23):
            for o in range(4):
                for d in range(4):
                    if o == 3 and d == 3:
                        continue
                    base = 4.0 * weight[o] * weight[d] * hourly_profile(hour)
                    if hour < 12 and d == 1:
                        base *= 1.5
                    if hour >= 15 and o == 1:
                        base *= 1.4
                    vol = round(base * rng.uniform(0.8, 1.2), 1)
                    if vol > 0:
                        w.writerow([o, d, hour, vol])


if __name__ == "__main__":
    main()
