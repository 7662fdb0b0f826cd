"""Reference model and random workloads for the ledger's access-control rules."""

from __future__ import annotations

import random

from provenzk.crypto import KeyPair
from provenzk.errors import LedgerError
from provenzk.ledger import Ledger, Policy

CLASSES = ("health", "finance", "census")
FUNCS = ("aa" * 32, "bb" * 32, "cc" * 32)
ACTORS = ("alice", "bob", "carol", "dave")
KEYS = [KeyPair.generate(seed=900 + i).pk for i in range(4)]


class Model:
    """Plain re-statement of the policy rules, kept separate from the ledger code."""

    def __init__(self):
        self.providers = {}  # id -> (owner, classes)
        self.tokens = {}  # id -> dict

    def register(self, tid, owner, classes):
        self.providers[tid] = (owner, set(classes))

    def may_mint(self, actor, data_class):
        return any(o == actor and data_class in c for o, c in self.providers.values())

    def mint(self, tid, minter, analyst, policy):
        self.tokens[tid] = dict(minter=minter, analyst=analyst, cls=policy.data_class,
                                expiry=policy.expiry, max=policy.max_uses,
                                funcs=set(policy.allowed_function_ids), uses=0, revoked=False)

    def grant_allowed(self, tid, actor, data_class, fid, now):
        t = self.tokens.get(tid)
        return (t is not None and not t["revoked"] and t["analyst"] == actor
                and t["cls"] == data_class and now < t["expiry"] and t["uses"] < t["max"]
                and fid in t["funcs"])


def random_workload(ledger: Ledger, steps: int, seed: int, model: Model | None = None):
    """Drive ``ledger`` with one random transaction per step.

    Returns (grants, policy violations, model disagreements); logical time never
    decreases.
    """
    rng = random.Random(seed)
    model = model or Model()
    now = 0
    grants = violations = disagreements = 0
    for _ in range(steps):
        now += rng.choice((0, 0, 1, 2))
        op = rng.random()
        actor = rng.choice(ACTORS)
        try:
            if op < 0.08 or not model.providers:
                classes = rng.sample(CLASSES, rng.randint(1, 2))
                tid = ledger.register_provider(actor, rng.choice(KEYS), classes, ts=now)
                model.register(tid, actor, classes)
            elif op < 0.25 or not model.tokens:
                if rng.random() < 0.8:
                    actor = rng.choice([o for o, _ in model.providers.values()])
                cls = rng.choice(CLASSES)
                policy = Policy.make(cls, now + rng.randint(0, 40), rng.randint(0, 6),
                                     rng.sample(FUNCS, rng.randint(1, 3)))
                expect_ok = model.may_mint(actor, cls)
                try:
                    tid = ledger.mint_access_token(actor, rng.choice(ACTORS), policy, ts=now)
                except LedgerError:
                    disagreements += expect_ok
                else:
                    disagreements += not expect_ok
                    model.mint(tid, actor, ledger.token(tid).analyst, policy)
            elif op < 0.3:
                tid = rng.choice(list(model.tokens))
                if rng.random() < 0.6:
                    actor = model.tokens[tid]["minter"]
                try:
                    ledger.revoke(actor, tid, ts=now)
                except LedgerError:
                    disagreements += actor == model.tokens[tid]["minter"]
                else:
                    disagreements += actor != model.tokens[tid]["minter"]
                    model.tokens[tid]["revoked"] = True
            else:
                recent = list(model.tokens)[-6:]  # older tokens are mostly spent
                tid = rng.choice(recent + [999])
                t = model.tokens.get(tid)
                if t is not None and rng.random() < 0.8:
                    actor = t["analyst"]
                cls = t["cls"] if t is not None and rng.random() < 0.85 else rng.choice(CLASSES)
                fid = rng.choice(sorted(t["funcs"]) if t is not None and rng.random() < 0.8
                                 else FUNCS)
                allowed = model.grant_allowed(tid, actor, cls, fid, now)
                decision = ledger.check_access(actor, tid, cls, fid, now)
                if decision.granted:
                    grants += 1
                    tok = ledger.token(tid)
                    if now >= tok.policy.expiry or tok.uses > tok.policy.max_uses or tok.revoked:
                        violations += 1
                    t["uses"] += 1
                disagreements += decision.granted != allowed
        except LedgerError:
            pass
    return grants, violations, disagreements
