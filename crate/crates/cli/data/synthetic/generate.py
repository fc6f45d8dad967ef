"""Regenerates the daily macro series in this directory.

prices.csv comes from the CLI itself:
    crashskew simulate --n 918 --seed 20170103 --start 2017-01-04 --out prices.csv
"""
import csv
import datetime as dt
import math
import random

START = dt.date(2017, 1, 2)  # one calendar day before the first price
END = dt.date(2020, 7, 10)
OUTBREAK = dt.date(2020, 1, 21)
rng = random.Random(20200121)


def days():
    d = START
    while d <= END:
        yield d
        d += dt.timedelta(days=1)


def write(name, rows):
    with open(name, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["date", "value"])
        w.writerows(rows)


def cases(d):
    if d < OUTBREAK:
        return 0
    t = (d - OUTBREAK).days
    wave1 = 30000 * math.exp(-((t - 85) / 25) ** 2)
    wave2 = 60000 * math.exp(-((t - 170) / 20) ** 2)
    early = 3 * t if t < 40 else 0
    return max(0, round((wave1 + wave2 + early) * rng.lognormvariate(0, 0.15)))


def index(level, vol, stress):
    x = math.log(level)
    out = []
    for d in days():
        target = math.log(level * (stress if d >= dt.date(2020, 3, 1) else 1.0))
        x += 0.2 * (target - x) + rng.gauss(0, vol)
        out.append((d.isoformat(), f"{math.exp(x):.2f}"))
    return out


def emv_id():
    out = []
    for d in days():
        p = 0.95 if d >= dt.date(2020, 2, 20) else 0.08
        v = rng.expovariate(1 / (40 if p > 0.5 else 0.6)) if rng.random() < p else 0.0
        out.append((d.isoformat(), f"{v:.2f}"))
    return out


write("cases.csv", [(d.isoformat(), cases(d)) for d in days()])
write("epu.csv", index(90, 0.35, 4.0))
write("emu.csv", index(60, 0.30, 5.0))
write("emv_id.csv", emv_id())
