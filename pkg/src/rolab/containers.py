"""Versioned JSON containers for trained pieces (train once, infer later).

Floats are written in base-10 with up to 17 significant digits (repr), which
round-trips IEEE doubles exactly.
"""
import json

import numpy as np
import scipy.sparse as sp

from .dynamics import NormStats
from .enhance import AttentionBank, ResidualWeights, TrainedObserver
from .reservoir import Readout, ReservoirSpec, ReservoirWeights

FORMAT = "rolab-container"
VERSION = 1


def _arr(a):
    return np.asarray(a, dtype=np.float64).tolist()


def _sparse_out(m):
    coo = m.tocoo()
    return {"dim": int(m.shape[0]), "rows": coo.row.tolist(),
            "cols": coo.col.tolist(), "values": _arr(coo.data)}


def _sparse_in(d):
    return sp.csr_matrix(
        (np.array(d["values"]), (np.array(d["rows"]), np.array(d["cols"]))),
        shape=(d["dim"], d["dim"]))


def _readout_out(r):
    return {"w_out": _arr(r.w_out), "bias": _arr(r.bias),
            "feature_kind": r.feature_kind}


def _readout_in(d):
    return Readout(w_out=np.array(d["w_out"]), bias=np.array(d["bias"]),
                   feature_kind=d["feature_kind"])


def _bank_out(b):
    if b is None:
        return None
    return {"u_h": _arr(b.u_h), "state_mean": _arr(b.state_mean),
            "centers": _arr(b.centers), "sigma": b.sigma,
            "center_indices": [int(i) for i in b.center_indices]
            if b.center_indices is not None else None}


def _bank_in(d):
    if d is None:
        return None
    idx = d.get("center_indices")
    return AttentionBank(u_h=np.array(d["u_h"]),
                         state_mean=np.array(d["state_mean"]),
                         centers=np.array(d["centers"]), sigma=d["sigma"],
                         center_indices=np.array(idx) if idx is not None else None)


def save_weights(weights, path):
    payload = {"format": FORMAT, "version": VERSION, "kind": "weights",
               "a": _sparse_out(weights.a), "w_in": _arr(weights.w_in)}
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_weights(path):
    with open(path) as fh:
        payload = _checked(json.load(fh), "weights")
    return ReservoirWeights(a=_sparse_in(payload["a"]),
                            w_in=np.array(payload["w_in"]))


def save_readout(readout, path):
    payload = {"format": FORMAT, "version": VERSION, "kind": "readout"}
    payload.update(_readout_out(readout))
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_readout(path):
    with open(path) as fh:
        payload = _checked(json.load(fh), "readout")
    return _readout_in(payload)


def save_observer(observer, path):
    o = observer
    payload = {
        "format": FORMAT, "version": VERSION, "kind": "observer",
        "variant": o.variant,
        "spec": o.spec.__dict__,
        "input_vars": o.input_vars,
        "target_names": o.target_names,
        "square_targets": list(o.square_targets),
        "washout": o.washout,
        "norm_stats": {"mean": _arr(o.norm_stats.mean),
                       "scale": _arr(o.norm_stats.scale),
                       "var_names": o.norm_stats.var_names},
        "basic": {"a": _sparse_out(o.basic_weights.a),
                  "w_in": _arr(o.basic_weights.w_in),
                  "readout": _readout_out(o.basic_readout),
                  "bank": _bank_out(o.basic_bank)},
        "meta": o.meta,
    }
    if o.has_residual:
        payload["residual"] = {
            "lam": o.lam,
            "b": _sparse_out(o.residual_weights.b),
            "w_in": _arr(o.residual_weights.w_in),
            "readout": _readout_out(o.residual_readout),
            "bank": _bank_out(o.residual_bank),
        }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_observer(path):
    with open(path) as fh:
        p = _checked(json.load(fh), "observer")
    basic = p["basic"]
    residual = p.get("residual")
    return TrainedObserver(
        variant=p["variant"],
        spec=ReservoirSpec(**p["spec"]),
        input_vars=p["input_vars"],
        target_names=p["target_names"],
        square_targets=tuple(p["square_targets"]),
        washout=p["washout"],
        norm_stats=NormStats(mean=np.array(p["norm_stats"]["mean"]),
                             scale=np.array(p["norm_stats"]["scale"]),
                             var_names=p["norm_stats"]["var_names"]),
        basic_weights=ReservoirWeights(a=_sparse_in(basic["a"]),
                                       w_in=np.array(basic["w_in"])),
        basic_readout=_readout_in(basic["readout"]),
        basic_bank=_bank_in(basic.get("bank")),
        lam=residual["lam"] if residual else None,
        residual_weights=ResidualWeights(b=_sparse_in(residual["b"]),
                                         w_in=np.array(residual["w_in"]))
        if residual else None,
        residual_readout=_readout_in(residual["readout"]) if residual else None,
        residual_bank=_bank_in(residual.get("bank")) if residual else None,
        meta=p.get("meta", {}),
    )


def _checked(payload, kind):
    if payload.get("format") != FORMAT:
        raise ValueError("not a rolab container")
    if payload.get("version") != VERSION:
        raise ValueError(f"unsupported container version {payload.get('version')}")
    if payload.get("kind") != kind:
        raise ValueError(f"expected a {kind} container, got {payload.get('kind')}")
    return payload
