"""Run ledger, fairness and throughput metrics, and tabular reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

NA = "n/a"


@dataclass
class MetricsLedger:
    """Cumulative counters of one run. Delays are in slots."""

    slots: int
    slot_duration: float
    packet_bits: int
    flows: dict[int, int]                 # flow id -> source node
    gateways: tuple[int, ...]
    links: tuple[tuple[int, int], ...] = ()
    generated_by_gw: dict[int, dict[int, int]] = field(default_factory=dict)
    delivered_by_gw: dict[int, dict[int, int]] = field(default_factory=dict)
    delays: dict[int, list[int]] = field(default_factory=dict)
    hops: dict[int, list[tuple[int, int]]] = field(default_factory=dict)  # (gateway, hops)
    backlog: dict[int, int] = field(default_factory=dict)
    link_rate: np.ndarray | None = None          # in lowest-rate units x slots
    link_rate_by_gw: np.ndarray | None = None
    gateway_relays: int = 0
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        for f in self.flows:
            self.generated_by_gw.setdefault(f, {g: 0 for g in self.gateways})
            self.delivered_by_gw.setdefault(f, {g: 0 for g in self.gateways})
            self.delays.setdefault(f, [])
            self.hops.setdefault(f, [])
            self.backlog.setdefault(f, 0)

    def generated(self, f: int) -> int:
        return sum(self.generated_by_gw[f].values())

    def delivered(self, f: int) -> int:
        return sum(self.delivered_by_gw[f].values())

    def mean_delay(self, f: int) -> float | None:
        d = self.delays[f]
        return sum(d) / len(d) if d else None


def jain_index(values) -> float:
    xs = [float(x) for x in values]
    if not xs:
        raise ValueError("Jain's index of an empty sample")
    if any(not x > 0 for x in xs):
        raise ValueError("Jain's index needs strictly positive values")
    s = math.fsum(xs)
    return s * s / (len(xs) * math.fsum(x * x for x in xs))


def flow_throughput(ledger: MetricsLedger) -> dict[int, float]:
    """Delivered bits per second of each flow."""
    if ledger.slots <= 0:
        raise ValueError("throughput needs at least one slot")
    span = ledger.slots * ledger.slot_duration
    return {f: ledger.delivered(f) * ledger.packet_bits / span for f in ledger.flows}


def _jain_or_na(values):
    try:
        return jain_index(values)
    except ValueError:
        return NA


def fairness(ledger: MetricsLedger) -> dict[str, float | str]:
    """JFI over throughput, 1/mean delay and throughput/mean delay."""
    thr = flow_throughput(ledger)
    delay = {f: ledger.mean_delay(f) for f in ledger.flows}
    inv = [1.0 / d if d else 0.0 for d in delay.values()]
    ratio = [thr[f] / delay[f] if delay[f] else 0.0 for f in ledger.flows]
    return {
        "jfi_throughput": _jain_or_na(thr.values()),
        "jfi_inverse_delay": _jain_or_na(inv),
        "jfi_throughput_over_delay": _jain_or_na(ratio),
    }


def summary(ledger: MetricsLedger) -> dict:
    thr = flow_throughput(ledger) if ledger.slots > 0 else {f: 0.0 for f in ledger.flows}
    all_delays = [d for f in ledger.flows for d in ledger.delays[f]]
    out = {
        "aggregate_throughput_mbps": math.fsum(thr.values()) / 1e6,
        "total_generated": sum(ledger.generated(f) for f in ledger.flows),
        "total_received": sum(ledger.delivered(f) for f in ledger.flows),
        "total_backlog": sum(ledger.backlog.values()),
        "mean_delay_slots": (sum(all_delays) / len(all_delays)) if all_delays else NA,
        "gateway_relays": ledger.gateway_relays,
    }
    if ledger.slots > 0:
        out.update(fairness(ledger))
    return out


def _fmt(x):
    if x is None:
        return NA
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def report_tables(ledger: MetricsLedger) -> dict[str, tuple[list[str], list[list]]]:
    """Named tables as (header, rows); undefined cells are ``n/a``."""
    thr = flow_throughput(ledger) if ledger.slots > 0 else {f: 0.0 for f in ledger.flows}
    gws = ledger.gateways

    flows_hdr = (["flow", "source", "generated", "delivered"]
                 + [f"delivered_gw{g}" for g in gws]
                 + ["backlog", "throughput_mbps", "mean_delay_slots"])
    flows_rows = []
    for f, src in sorted(ledger.flows.items()):
        flows_rows.append([f, src, ledger.generated(f), ledger.delivered(f)]
                          + [ledger.delivered_by_gw[f][g] for g in gws]
                          + [ledger.backlog[f], thr[f] / 1e6, ledger.mean_delay(f)])

    ratio_hdr = ["flow", "source"] + [h for g in gws for h in
                                      (f"sent_gw{g}", f"received_gw{g}", f"percent_gw{g}")]
    ratio_rows = []
    for f, src in sorted(ledger.flows.items()):
        row = [f, src]
        for g in gws:
            sent = ledger.generated_by_gw[f][g]
            got = ledger.delivered_by_gw[f][g]
            row += [sent, got, 100.0 * got / sent if sent else None]
        ratio_rows.append(row)

    s = summary(ledger)
    fair_rows = [[k, s.get(k, NA)] for k in
                 ("jfi_throughput", "jfi_inverse_delay", "jfi_throughput_over_delay")]
    summary_rows = [[k, v] for k, v in s.items() if not k.startswith("jfi")]
    return {
        "flows": (flows_hdr, flows_rows),
        "gateway_ratio": (ratio_hdr, ratio_rows),
        "fairness": (["metric", "value"], fair_rows),
        "summary": (["metric", "value"], summary_rows),
    }


def manifest_header(manifest: dict) -> str:
    return "".join(f"# {k}: {manifest[k]}\n" for k in sorted(manifest))


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_csv(header, rows, manifest: dict | None = None) -> str:
    buf = io.StringIO()
    if manifest:
        buf.write(manifest_header(manifest))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def run_stem(manifest: dict) -> str:
    return (f"{manifest['policy']}_N{manifest['nodes']}_C{manifest['channels']}"
            f"_seed{manifest['seed']}_T{manifest['slots']}")


def write_reports(ledger: MetricsLedger, out_dir) -> list[Path]:
    """One CSV per table plus a JSON summary; returns the written paths."""
    out_dir = Path(out_dir)
    stem = run_stem(ledger.manifest)
    written = []
    for name, (hdr, rows) in report_tables(ledger).items():
        p = out_dir / f"{stem}_{name}.csv"
        atomic_write(p, to_csv(hdr, rows, ledger.manifest))
        written.append(p)
    doc = {"manifest": ledger.manifest, "summary": summary(ledger),
           "flows": {str(f): {"source": s,
                              "generated": ledger.generated(f),
                              "delivered": ledger.delivered(f),
                              "mean_delay_slots": ledger.mean_delay(f)}
                     for f, s in sorted(ledger.flows.items())}}
    p = out_dir / f"{stem}_summary.json"
    atomic_write(p, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    written.append(p)
    return written
