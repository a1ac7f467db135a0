"""Deterministic NSL-KDD-shaped corpus for demos and tests.

The real KDDTrain+/KDDTest+ files are not redistributable with this package.
This generator writes lines in the same 43-field layout (41 features, label,
difficulty) with a class mix close to NSL-KDD's training split. Attack
subtypes draw from narrow value sets so their encodings repeat, and a small
share of normal sessions imitate attack traffic so exact matching produces
some false positives.

Usage::

    python -m dnaids.synth train.txt --records 20000 --seed 1
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

from .dataset import load_schema

NAMES = [d.name for d in load_schema()]

# (label, weight, profile). Profile values: constant, list (uniform choice)
# or (lo, hi) inclusive integer range. Unlisted features are 0.
_RATE = [0.0, 0.0, 0.0, 0.01, 0.02, 0.05, 0.5, 1.0]
_PROFILES = [
    ("normal", 5300, {
        "protocol_type": ["tcp", "tcp", "tcp", "udp", "icmp"],
        "service": ["http", "http", "smtp", "ftp_data", "domain_u", "private", "ftp", "telnet",
                    "ecr_i", "urp_i", "pop_3", "finger", "auth", "ntp_u", "other"],
        "flag": ["SF"] * 12 + ["REJ", "S0", "RSTO", "S1"],
        "duration": [0] * 9 + [1, 2, 5, (10, 3000)],
        "src_bytes": (0, 4000),
        "dst_bytes": [0, (100, 9000), (100, 60000)],
        "hot": [0] * 8 + [1, 2],
        "logged_in": [1, 1, 1, 0],
        "count": (1, 30),
        "srv_count": (1, 40),
        "same_srv_rate": [1.0, 1.0, 0.9, 0.5],
        "diff_srv_rate": [0.0, 0.0, 0.06, 0.1],
        "srv_diff_host_rate": _RATE,
        "dst_host_count": (1, 255),
        "dst_host_srv_count": (1, 255),
        "dst_host_same_srv_rate": [1.0, 1.0, 0.5, 0.12, 0.02],
        "dst_host_diff_srv_rate": _RATE,
        "dst_host_same_src_port_rate": _RATE,
        "dst_host_srv_diff_host_rate": _RATE,
        "dst_host_rerror_rate": _RATE,
    }),
    # Normal sessions that imitate attack traffic.
    ("normal", 30, {
        "protocol_type": "icmp", "service": "ecr_i", "flag": "SF",
        "src_bytes": [520, 1032], "count": (500, 511), "srv_count": (500, 511),
        "same_srv_rate": 1.0, "dst_host_count": 255, "dst_host_srv_count": 255,
        "dst_host_same_srv_rate": 1.0, "dst_host_same_src_port_rate": [0.9, 1.0],
    }),
    ("normal", 25, {
        "protocol_type": "tcp", "service": ["private", "other"], "flag": "REJ",
        "count": (1, 4), "srv_count": 1, "rerror_rate": 1.0, "srv_rerror_rate": 1.0,
        "same_srv_rate": [0.01, 0.02, 1.0], "diff_srv_rate": [0.06, 0.07],
        "dst_host_count": 255, "dst_host_srv_count": (1, 3),
        "dst_host_rerror_rate": 1.0, "dst_host_srv_rerror_rate": 1.0,
        "dst_host_diff_srv_rate": [0.06, 0.07],
    }),
    ("neptune", 3300, {
        "protocol_type": "tcp", "service": ["private", "private", "http", "telnet", "ftp_data",
                                            "finger", "other", "smtp"],
        "flag": ["S0", "S0", "S0", "REJ"],
        "count": (100, 300), "srv_count": (1, 25),
        "serror_rate": 1.0, "srv_serror_rate": 1.0, "same_srv_rate": [0.05, 0.06, 0.07],
        "diff_srv_rate": [0.06, 0.07], "dst_host_count": 255, "dst_host_srv_count": (1, 25),
        "dst_host_same_srv_rate": [0.05, 0.06, 0.07], "dst_host_diff_srv_rate": [0.06, 0.07],
        "dst_host_serror_rate": 1.0, "dst_host_srv_serror_rate": 1.0,
    }),
    ("smurf", 210, {
        "protocol_type": "icmp", "service": "ecr_i", "flag": "SF",
        "src_bytes": [520, 1032], "count": (500, 511), "srv_count": (500, 511),
        "same_srv_rate": 1.0, "dst_host_count": 255, "dst_host_srv_count": 255,
        "dst_host_same_srv_rate": 1.0, "dst_host_same_src_port_rate": [0.9, 1.0],
    }),
    ("back", 75, {
        "protocol_type": "tcp", "service": "http", "flag": ["SF", "RSTR"],
        "src_bytes": [54540], "dst_bytes": (7000, 8400), "hot": 2, "logged_in": 1,
        "num_compromised": 1, "count": (1, 5), "srv_count": (1, 5), "same_srv_rate": 1.0,
        "dst_host_count": (1, 255), "dst_host_srv_count": (1, 255), "dst_host_same_srv_rate": 1.0,
    }),
    ("teardrop", 70, {
        "protocol_type": "udp", "service": "private", "flag": "SF", "src_bytes": 28,
        "wrong_fragment": 3, "count": (1, 100), "srv_count": (1, 100), "same_srv_rate": 1.0,
        "dst_host_count": (1, 255), "dst_host_srv_count": (1, 255), "dst_host_same_srv_rate": 1.0,
    }),
    ("pod", 20, {
        "protocol_type": "icmp", "service": ["ecr_i", "tim_i"], "flag": "SF", "src_bytes": 1480,
        "wrong_fragment": 1, "count": (1, 4), "srv_count": (1, 4), "same_srv_rate": 1.0,
        "dst_host_count": (1, 255), "dst_host_srv_count": (1, 50),
    }),
    ("land", 2, {
        "protocol_type": "tcp", "service": ["finger", "telnet", "http"], "flag": "S0", "land": 1,
        "count": 1, "srv_count": 1, "serror_rate": 1.0, "srv_serror_rate": 1.0,
        "same_srv_rate": 1.0, "dst_host_count": (1, 10), "dst_host_srv_count": (1, 10),
    }),
    ("satan", 290, {
        "protocol_type": ["tcp", "tcp", "udp"], "service": ["private", "other", "finger", "ftp",
                                                            "telnet", "smtp", "domain"],
        "flag": ["REJ", "S0", "SF", "RSTO"], "count": (1, 5), "srv_count": 1,
        "rerror_rate": [0.5, 1.0], "srv_rerror_rate": 1.0, "same_srv_rate": [0.01, 0.02, 1.0],
        "diff_srv_rate": [0.06, 0.07], "dst_host_count": 255, "dst_host_srv_count": (1, 3),
        "dst_host_rerror_rate": [0.5, 1.0], "dst_host_srv_rerror_rate": 1.0,
        "dst_host_diff_srv_rate": [0.06, 0.07],
    }),
    ("ipsweep", 285, {
        "protocol_type": "icmp", "service": ["eco_i", "ecr_i"], "flag": "SF", "src_bytes": [8, 18],
        "count": (1, 3), "srv_count": (1, 30), "same_srv_rate": 1.0,
        "srv_diff_host_rate": [0.5, 1.0], "dst_host_count": (1, 80), "dst_host_srv_count": (1, 80),
        "dst_host_same_srv_rate": 1.0, "dst_host_same_src_port_rate": 1.0,
        "dst_host_srv_diff_host_rate": [0.5, 1.0],
    }),
    ("portsweep", 230, {
        "protocol_type": "tcp", "service": ["private", "other"], "flag": ["REJ", "RSTR", "SH"],
        "duration": [0, 0, (1, 40000)], "count": (1, 3), "srv_count": (1, 3),
        "rerror_rate": [0.5, 1.0], "srv_rerror_rate": [0.5, 1.0], "same_srv_rate": 1.0,
        "dst_host_count": (1, 255), "dst_host_srv_count": (1, 5),
        "dst_host_same_src_port_rate": 1.0, "dst_host_rerror_rate": [0.5, 1.0],
    }),
    ("nmap", 120, {
        "protocol_type": ["tcp", "icmp", "udp"], "service": ["private", "eco_i", "other"],
        "flag": ["SF", "S0", "REJ"], "count": (1, 2), "srv_count": (1, 2), "same_srv_rate": 1.0,
        "dst_host_count": (1, 255), "dst_host_srv_count": (1, 5),
        "dst_host_same_src_port_rate": 1.0, "dst_host_srv_diff_host_rate": [0.0, 0.5],
    }),
    ("warezclient", 70, {
        "protocol_type": "tcp", "service": ["ftp_data", "ftp"], "flag": "SF",
        "duration": (0, 15000), "src_bytes": (200, 3000), "dst_bytes": 0, "hot": (0, 28),
        "logged_in": 1, "is_guest_login": 1, "count": (1, 3), "srv_count": (1, 3),
        "same_srv_rate": 1.0, "dst_host_count": (1, 255), "dst_host_srv_count": (1, 255),
    }),
    ("guess_passwd", 5, {
        "protocol_type": "tcp", "service": "telnet", "flag": ["RSTO", "SF"], "duration": (1, 5),
        "src_bytes": (100, 130), "dst_bytes": (170, 180), "num_failed_logins": 1,
        "count": 1, "srv_count": 1, "same_srv_rate": 1.0, "dst_host_count": (1, 255),
        "dst_host_srv_count": (1, 255),
    }),
    ("warezmaster", 2, {
        "protocol_type": "tcp", "service": "ftp", "flag": "SF", "duration": (5, 15000),
        "src_bytes": (300, 400), "dst_bytes": (4000, 6000000), "hot": (1, 3), "logged_in": 1,
        "is_guest_login": 1, "count": 1, "srv_count": 1, "same_srv_rate": 1.0,
        "dst_host_count": (1, 5), "dst_host_srv_count": (1, 5),
    }),
    ("imap", 1, {"protocol_type": "tcp", "service": "imap4", "flag": ["SH", "S0", "SF"],
                 "count": (1, 5), "srv_count": (1, 5), "dst_host_count": (1, 255)}),
    ("ftp_write", 1, {"protocol_type": "tcp", "service": ["ftp", "ftp_data", "login"],
                      "flag": "SF", "logged_in": 1, "num_file_creations": (1, 2),
                      "count": 1, "srv_count": 1, "dst_host_count": (1, 10)}),
    ("multihop", 1, {"protocol_type": "tcp", "service": ["ftp_data", "telnet"], "flag": "SF",
                     "duration": (0, 2000), "hot": (0, 3), "logged_in": 1, "count": 1,
                     "srv_count": 1, "dst_host_count": (1, 10)}),
    ("phf", 1, {"protocol_type": "tcp", "service": "http", "flag": "SF", "src_bytes": 51,
                "dst_bytes": 8127, "hot": 3, "logged_in": 1, "count": 1, "srv_count": 1,
                "dst_host_count": (1, 50)}),
    ("spy", 1, {"protocol_type": "tcp", "service": "telnet", "flag": "SF",
                "duration": (10000, 30000), "hot": (0, 2), "logged_in": 1, "count": 1,
                "srv_count": 1, "dst_host_count": (1, 5)}),
    ("buffer_overflow", 2, {"protocol_type": "tcp", "service": ["telnet", "ftp_data"],
                            "flag": "SF", "duration": (0, 300), "src_bytes": (1000, 2000),
                            "hot": (1, 5), "logged_in": 1, "root_shell": 1,
                            "num_file_creations": (0, 2), "count": 1, "srv_count": 1,
                            "dst_host_count": (1, 30)}),
    ("rootkit", 1, {"protocol_type": ["tcp", "udp"], "service": ["telnet", "ftp_data", "private"],
                    "flag": "SF", "hot": (0, 2), "logged_in": 1, "root_shell": [0, 1],
                    "count": 1, "srv_count": 1, "dst_host_count": (1, 30)}),
    ("loadmodule", 1, {"protocol_type": "tcp", "service": "telnet", "flag": "SF",
                       "hot": (1, 2), "logged_in": 1, "root_shell": 1, "count": 1,
                       "srv_count": 1, "dst_host_count": (1, 10)}),
    ("perl", 1, {"protocol_type": "tcp", "service": "telnet", "flag": "SF", "hot": (1, 2),
                 "logged_in": 1, "root_shell": 1, "num_root": (1, 3), "count": 1,
                 "srv_count": 1, "dst_host_count": (1, 5)}),
]

_INT_FEATURES = {"duration", "src_bytes", "dst_bytes", "land", "wrong_fragment", "urgent", "hot",
                 "num_failed_logins", "logged_in", "num_compromised", "root_shell",
                 "su_attempted", "num_root", "num_file_creations", "num_shells",
                 "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login",
                 "count", "srv_count", "dst_host_count", "dst_host_srv_count"}
_UNSEEN_SERVICES = ["http_8001", "aol", "harvest"]


def _draw(rng: random.Random, spec):
    if isinstance(spec, list):
        return _draw(rng, rng.choice(spec))
    if isinstance(spec, tuple):
        return rng.randint(*spec)
    return spec


def _fmt(name, value):
    if isinstance(value, str):
        return value
    if name in _INT_FEATURES:
        return str(int(value))
    return f"{float(value):.2f}"


def generate_lines(n: int, seed: int = 0, unseen_rate: float = 0.0, difficulty: bool = True):
    """Yield ``n`` record lines. ``unseen_rate`` injects services absent from training data."""
    rng = random.Random(seed)
    weights = [w for _, w, _ in _PROFILES]
    for _ in range(n):
        label, _, profile = rng.choices(_PROFILES, weights)[0]
        fields = []
        for name in NAMES:
            value = _draw(rng, profile.get(name, 0))
            fields.append(_fmt(name, value))
        if unseen_rate and rng.random() < unseen_rate:
            fields[2] = rng.choice(_UNSEEN_SERVICES)
        fields.append(label)
        if difficulty:
            fields.append(str(rng.randint(5, 21)))
        yield ",".join(fields)


def write_corpus(path, n: int, seed: int = 0, unseen_rate: float = 0.0) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for line in generate_lines(n, seed, unseen_rate):
            fh.write(line + "\n")
    return path


def main(argv=None):
    ap = argparse.ArgumentParser(prog="python -m dnaids.synth", description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--records", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--unseen-rate", type=float, default=0.0)
    args = ap.parse_args(argv)
    write_corpus(args.out, args.records, args.seed, args.unseen_rate)


if __name__ == "__main__":
    main()
