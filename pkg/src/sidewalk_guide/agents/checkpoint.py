"""Versioned JSON checkpoints for trained agents.

JSON keeps exact float round-trips (shortest-repr encoding), so a
save/load cycle reproduces weights and table entries bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import DqnAgent, QLearningAgent, ReinforceAgent, SarsaAgent

FORMAT_VERSION = 1


class CheckpointError(Exception):
    pass


def _state_key(state: tuple) -> str:
    return "|".join(state)


def _parse_key(key: str) -> tuple:
    return tuple(key.split("|"))


def save_agent(agent, path: str | Path) -> None:
    record: dict = {"format": FORMAT_VERSION, "algorithm": agent.kind}
    if agent.kind in ("qlearning", "sarsa"):
        t = agent.table
        record["hyper"] = {"alpha": t.alpha, "gamma": t.gamma}
        record["table"] = {_state_key(k): list(map(float, v)) for k, v in t.table.items()}
    elif agent.kind == "dqn":
        m = agent.model
        record["hyper"] = {
            "state_dim": m.state_dim, "gamma": m.gamma, "lr": m.lr,
            "hidden": list(m.hidden), "batch_size": m.batch_size,
            "train_interval": m.train_interval,
            "target_sync_interval": m.target_sync_interval,
        }
        record["weights"] = [w.tolist() for w in m.network.weights]
        record["biases"] = [b.tolist() for b in m.network.biases]
    elif agent.kind == "reinforce":
        record["hyper"] = {"state_dim": agent.state_dim, "gamma": agent.gamma,
                           "lr": agent.lr, "hidden": agent.hidden}
        record["weights"] = [w.tolist() for w in agent.network.weights]
        record["biases"] = [b.tolist() for b in agent.network.biases]
    else:
        raise CheckpointError(f"cannot checkpoint agent kind {agent.kind!r}")
    Path(path).write_text(json.dumps(record))


def load_agent(path: str | Path):
    try:
        record = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot load checkpoint: {exc}") from None
    if record.get("format") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format {record.get('format')!r}")
    algo = record.get("algorithm")
    hyper = record.get("hyper", {})
    if algo in ("qlearning", "sarsa"):
        agent = QLearningAgent(**hyper) if algo == "qlearning" else SarsaAgent(**hyper)
        for key, vals in record["table"].items():
            agent.table.table[_parse_key(key)] = np.array(vals)
        return agent
    if algo == "dqn":
        agent = DqnAgent(
            state_dim=hyper["state_dim"], gamma=hyper["gamma"], lr=hyper["lr"],
            hidden=tuple(hyper["hidden"]), batch_size=hyper["batch_size"],
            train_interval=hyper["train_interval"],
            target_sync_interval=hyper["target_sync_interval"],
        )
        _load_net(agent.model.network, record)
        agent.model.target_network.copy_weights_from(agent.model.network)
        return agent
    if algo == "reinforce":
        agent = ReinforceAgent(state_dim=hyper["state_dim"], gamma=hyper["gamma"],
                               lr=hyper["lr"], hidden=hyper["hidden"])
        _load_net(agent.network, record)
        return agent
    raise CheckpointError(f"unknown checkpoint algorithm {algo!r}")


def _load_net(network, record: dict) -> None:
    weights = [np.array(w) for w in record["weights"]]
    biases = [np.array(b) for b in record["biases"]]
    if [w.shape for w in weights] != [w.shape for w in network.weights]:
        raise CheckpointError("checkpoint layer shapes do not match")
    network.weights = weights
    network.biases = biases
