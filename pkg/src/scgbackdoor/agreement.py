"""Decider versus oracle on one query.

The two agree when their verdicts match and, for a non-identifiable query,
the decider's witness sketch embeds in a candidate FTCG of the oracle's
window.  The oracle sees the query after pruning, effect by effect.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle
from .cone import CausalQuery, validate_query
from .decider import IBCVerdict, decide, preprocess
from .graph import SCG


@dataclass
class CheckResult:
    agree: bool
    verdict: IBCVerdict
    oracle_identifiable: bool
    reason: str = ""
    oracle_witness: object = None
    embedded: object = None
    explored: int = 0

    def to_json(self):
        out = {"agree": self.agree, "decider": self.verdict.to_json(),
               "oracle": {"identifiable": self.oracle_identifiable, "explored": self.explored}}
        if self.oracle_witness is not None:
            out["oracle"]["witness"] = self.oracle_witness.to_json()
        if self.reason:
            out["reason"] = self.reason
        return out


def _spec_for(g, q, consistency, window, max_lag):
    dw, dl = oracle.default_window(q)
    if window is not None:
        # windows are given relative to the effect time
        window = (window[0] + q.effect.time, window[1] + q.effect.time)
    return oracle.EnumSpec(g, window or dw, dl if max_lag is None else max_lag, consistency)


def _check_one(g, q, consistency, window, max_lag, budget, engine):
    verdict = decide(g, q, consistency)
    core, _ = preprocess(g, q)
    if not core.interventions:
        ok = verdict.identifiable
        return CheckResult(ok, verdict, True, "" if ok else "nothing left after pruning")
    spec = _spec_for(g, core, consistency, window, max_lag)
    cd = oracle.oracle_cd(spec, core, budget, engine="paths" if engine == "auto" else engine)
    region = cd.__contains__
    found = oracle.witness_search(spec, core, region, budget, engine)
    res = CheckResult(False, verdict, not found.exists_witness, oracle_witness=found.witness,
                      explored=found.explored)
    if verdict.identifiable != res.oracle_identifiable:
        res.reason = "verdicts differ"
        return res
    if verdict.identifiable:
        res.agree = True
        return res
    w = verdict.witness
    f = oracle.embed_witness(spec, core, w.path, region)
    if f is None:
        path = oracle.embed_through(spec, core, w.intervention, w.fork, region, budget)
        if path is None:
            res.reason = f"witness sketch {w.path} does not embed"
            return res
        res.embedded = path
    else:
        res.embedded = w.path
    res.agree = True
    return res


def oracle_check(g: SCG, q: CausalQuery, consistency=False, window=None, max_lag=None,
                 budget=None, engine="auto"):
    """CheckResult for the query; multi-effect queries are checked per effect."""
    validate_query(g, q)
    if len(q.effects) == 1:
        return _check_one(g, q, consistency, window, max_lag, budget, engine)
    parts = [_check_one(g, CausalQuery(q.interventions, [y]), consistency, window, max_lag,
                        budget, engine) for y in q.effects]
    verdict = decide(g, q, consistency)
    bad = next((p for p in parts if not p.agree), None)
    oracle_ok = all(p.oracle_identifiable for p in parts)
    if bad is not None:
        return CheckResult(False, verdict, oracle_ok, bad.reason, bad.oracle_witness)
    return CheckResult(verdict.identifiable == oracle_ok, verdict, oracle_ok,
                       explored=sum(p.explored for p in parts))
