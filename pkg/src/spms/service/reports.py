"""Occupancy and billing reports: pure functions of the recovered state."""

from __future__ import annotations

import io

from spms.service.state import ServiceState


def occupancy_report(state: ServiceState, csv: bool = False) -> str:
    rows = []
    for lot_id in sorted(state.lots):
        lot = state.lots[lot_id]
        counts = {"FREE": 0, "RESERVED": 0, "OCCUPIED": 0, "OUT_OF_SERVICE": 0}
        for slot_state in lot["slots"].values():
            counts[slot_state] += 1
        rows.append(
            (
                lot_id,
                lot["name"],
                counts["FREE"],
                counts["RESERVED"],
                counts["OCCUPIED"],
                counts["OUT_OF_SERVICE"],
                len(lot["slots"]),
            )
        )
    out = io.StringIO()
    if csv:
        out.write("lot_id,name,free,reserved,occupied,out_of_service,total\n")
        for row in rows:
            out.write(",".join(str(v) for v in row) + "\n")
    else:
        out.write(f"{'LOT':<8}{'NAME':<20}{'FREE':>6}{'RESV':>6}{'OCC':>6}{'OOS':>6}{'TOTAL':>7}\n")
        for row in rows:
            lot_id, name, free, resv, occ, oos, total = row
            out.write(f"{lot_id:<8}{name:<20}{free:>6}{resv:>6}{occ:>6}{oos:>6}{total:>7}\n")
    return out.getvalue()


def billing_report(state: ServiceState, csv: bool = False) -> str:
    rows = []
    total = 0
    for bill_id in sorted(state.bills):
        bill = state.bills[bill_id]
        session = state.sessions[bill["session_id"]]
        rows.append(
            (
                bill_id,
                bill["session_id"],
                session["lot_id"],
                session["slot_id"],
                session["reservation_id"] or "-",
                bill["duration_minutes"],
                bill["base_fee_minor"],
                bill["extras_fee_minor"],
                bill["total_minor"],
                bill.get("currency", ""),
            )
        )
        total += bill["total_minor"]
    out = io.StringIO()
    if csv:
        out.write(
            "bill_id,session_id,lot_id,slot_id,reservation_id,"
            "duration_minutes,base_fee_minor,extras_fee_minor,total_minor,currency\n"
        )
        for row in rows:
            out.write(",".join(str(v) for v in row) + "\n")
    else:
        out.write(
            f"{'BILL':<9}{'SESSION':<9}{'LOT':<6}{'SLOT':<6}{'RESV':<9}"
            f"{'MIN':>6}{'BASE':>8}{'EXTRAS':>8}{'TOTAL':>8}\n"
        )
        for row in rows:
            bill_id, sid, lot, slot, rid, minutes, base, extras, amount, _ = row
            out.write(
                f"{bill_id:<9}{sid:<9}{lot:<6}{slot:<6}{rid:<9}"
                f"{minutes:>6}{base:>8}{extras:>8}{amount:>8}\n"
            )
        out.write(f"sessions: {len(rows)}  grand total minor units: {total}\n")
    return out.getvalue()
