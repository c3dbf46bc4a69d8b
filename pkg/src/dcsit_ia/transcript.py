"""JSON transcript of a run: per slot, who sent what and what each receiver saw."""

import json


def _c(z):
    return [float(z.real), float(z.imag)]


def slot_entry(rec):
    active = {}
    for tx, (syms, c) in sorted(rec.active.items()):
        active[str(tx)] = {"symbols": [s.spec.label() for s in syms],
                           "coeffs": [_c(z) for z in c]}
    observations = {}
    for j in range(rec.h.shape[0]):
        # y_j(t) as a functional of the active symbols: h_ji(t) * c
        observations[str(j + 1)] = {str(tx): [_c(rec.h[j, tx - 1] * z) for z in c]
                                    for tx, (_, c) in sorted(rec.active.items())}
    return {"t": rec.t, "phase": rec.phase, "active": active, "observations": observations}


def transcript(report):
    """Plain-data transcript of an :class:`EndToEndReport`."""
    return {"channel": report.channel, "K": report.K, "seed": report.seed,
            "slots": [slot_entry(r) for r in report.link.slots]}


def dumps(report):
    return json.dumps(transcript(report), sort_keys=True, separators=(",", ":"))


def dump(report, path):
    with open(path, "w") as fh:
        fh.write(dumps(report))
