"""Daily boil-off accounting from per-event vent masses."""
from __future__ import annotations

from .config import BogReportInput
from .record import RunRecord

ROWS = ("refuelling", "storage", "overnight", "total")


def bog_report(inp: BogReportInput) -> RunRecord:
    """Low and high daily BOG (kg) by source, with a column-sum check.

    The computed refuelling and total rows are compared with the printed
    reference values; any difference larger than ``tolerance`` kg is flagged
    and kept in the summary rather than corrected.
    """
    inp.validate()
    refuel = {
        "low": inp.first_fill_low + inp.subsequent_count_low * inp.subsequent_low,
        "high": inp.first_fill_high + inp.subsequent_count_high * inp.subsequent_high,
    }
    storage = {"low": inp.storage, "high": inp.storage}
    overnight = {"low": inp.overnight_per_aircraft * inp.aircraft_low,
                 "high": inp.overnight_per_aircraft * inp.aircraft_high}
    total = {c: refuel[c] + storage[c] + overnight[c] for c in ("low", "high")}
    table = {"refuelling": refuel, "storage": storage, "overnight": overnight, "total": total}

    rec = RunRecord("bog-report", tables={"bog": table})
    printed = {
        ("refuelling", "low"): inp.printed_refuel_low,
        ("refuelling", "high"): inp.printed_refuel_high,
        ("total", "low"): inp.printed_total_low,
        ("total", "high"): inp.printed_total_high,
    }
    for row in ROWS:
        for col in ("low", "high"):
            rec.summary[f"{row}_{col}_kg"] = table[row][col]
    for (row, col), ref in printed.items():
        diff = table[row][col] - ref
        rec.summary[f"{row}_{col}_printed_kg"] = ref
        rec.summary[f"{row}_{col}_deviation_kg"] = diff
        if abs(diff) > inp.tolerance:
            rec.flag(f"{row}-{col}-mismatch")
    return rec
