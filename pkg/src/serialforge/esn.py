"""Integer echo state network driven by a compiled bit-serial circuit.

The reservoir update is x(n) = f(W_in u(n) + W x(n-1)) with a sparse
random recurrent matrix W, a dense random input matrix W_in, and an
integer activation f (arithmetic right shift, then saturating clamp to
the state range).  A trained linear readout maps the reservoir to the
targets.

Two interchangeable backends compute the recurrent product W x: plain
integer matrix arithmetic, and a compiled bit-serial netlist for W
transposed (the circuit computes row-vector-times-matrix).  The netlist
run extends its output window with enough sign-extension cycles to
cover the worst-case dot product, so the two backends agree exactly and
a whole trajectory is bit-identical either way.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields

import numpy as np

from .circuit import compile_netlist
from .csd import csd_transform
from .matrix import gen_element_sparse, pn_split
from .rng import derive_seed, stream
from .sim import simulate

ACTIVATIONS = ("shift_clamp", "identity_clamp")
SCHEMES = ("pn", "csd")
BACKENDS = ("reference", "netlist")


@dataclass
class EsnConfig:
    input_dim: int = 1
    reservoir_dim: int = 64
    weight_bitwidth: int = 4
    state_bitwidth: int = 4
    element_sparsity: float = 0.75
    activation: str = "shift_clamp"
    shift: int = 4
    scheme: str = "csd"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.input_dim < 1 or self.reservoir_dim < 1:
            raise ValueError("input_dim and reservoir_dim must be positive")
        if self.weight_bitwidth < 1 or self.state_bitwidth < 1:
            raise ValueError("bitwidths must be positive")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.shift < 0:
            raise ValueError("shift must be non-negative")

    @classmethod
    def from_json(cls, path: str) -> "EsnConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**doc)


class EchoStateNetwork:
    """Reservoir with fixed random integer weights and a chosen backend."""

    def __init__(self, config: EsnConfig):
        self.config = config
        self.w = gen_element_sparse(
            config.reservoir_dim,
            config.reservoir_dim,
            config.weight_bitwidth,
            True,
            config.element_sparsity,
            derive_seed(config.seed, "reservoir-weights"),
        )
        self.w_in = gen_element_sparse(
            config.reservoir_dim,
            config.input_dim,
            config.weight_bitwidth,
            True,
            0.0,
            derive_seed(config.seed, "input-weights"),
        )
        self.state = np.zeros(config.reservoir_dim, dtype=np.int64)
        self._netlist = None

    def reset(self) -> None:
        self.state = np.zeros(self.config.reservoir_dim, dtype=np.int64)

    def _recurrent_netlist(self):
        if self._netlist is None:
            wt = self.w.transposed()
            if self.config.scheme == "csd":
                pair = csd_transform(wt, derive_seed(self.config.seed, "reservoir-csd"))
            else:
                pair = pn_split(wt)
            # Window wide enough for the worst-case recurrent dot
            # product, so the serial result is always exact.
            state_max = 1 << (self.config.state_bitwidth - 1)
            bound = int(np.abs(self.w.data).sum(axis=1).max(initial=0)) * state_max
            needed = (1 if bound == 0 else bound.bit_length() + 1)
            base = self.config.state_bitwidth + pair.bitwidth
            self._netlist = compile_netlist(
                pair, self.config.state_bitwidth, extra_extension=max(0, needed - base)
            )
        return self._netlist

    def _pre_activation(self, u: np.ndarray, backend: str) -> np.ndarray:
        if backend == "reference":
            recurrent = self.w.data @ self.state
        elif backend == "netlist":
            result = simulate(self._recurrent_netlist(), self.state.tolist())
            recurrent = np.asarray(result.outputs, dtype=np.int64)
        else:
            raise ValueError(f"backend must be one of {BACKENDS}")
        return self.w_in.data @ u + recurrent

    def step(self, u, backend: str = "reference") -> np.ndarray:
        """Advance one time step and return the new state."""
        cfg = self.config
        u = np.asarray(list(u), dtype=np.int64)
        if u.shape != (cfg.input_dim,):
            raise ValueError(f"input must have shape ({cfg.input_dim},)")
        lo, hi = -(1 << (cfg.state_bitwidth - 1)), (1 << (cfg.state_bitwidth - 1)) - 1
        if u.size and (u.min() < lo or u.max() > hi):
            raise ValueError(f"inputs must lie in the state range [{lo}, {hi}]")
        pre = self._pre_activation(u, backend)
        if cfg.activation == "shift_clamp":
            pre = pre >> cfg.shift
        self.state = np.clip(pre, lo, hi)
        return self.state

    def run(self, inputs, backend: str = "reference") -> np.ndarray:
        """Drive the reservoir through a (steps, input_dim) sequence and
        return the (steps, reservoir_dim) state trajectory."""
        inputs = np.asarray(inputs, dtype=np.int64)
        if inputs.ndim == 1:
            inputs = inputs[:, None]
        states = np.zeros((len(inputs), self.config.reservoir_dim), dtype=np.int64)
        for t in range(len(inputs)):
            states[t] = self.step(inputs[t], backend)
        return states


def init(config: EsnConfig) -> EchoStateNetwork:
    return EchoStateNetwork(config)


def train_readout(
    states: np.ndarray, targets: np.ndarray, ridge_lambda: float = 1e-9
) -> np.ndarray:
    """Ridge-regressed linear readout.

    Solves (X'X + lambda I) W' = X'Y for feature matrix X (steps x
    features) and targets Y (steps x outputs); returns W (outputs x
    features) so predictions are X @ W.T.
    """
    x = np.asarray(states, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or len(x) != len(y):
        raise ValueError("states and targets must be 2-D with matching step counts")
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be non-negative")
    gram = x.T @ x + ridge_lambda * np.eye(x.shape[1])
    try:
        solution = np.linalg.solve(gram, x.T @ y)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            "readout system is singular; use ridge_lambda > 0 to regularize"
        ) from exc
    return solution.T


TASKS = ("sine", "recall")


def _task_data(config: EsnConfig, task: str, steps: int) -> tuple[np.ndarray, np.ndarray, str]:
    state_max = (1 << (config.state_bitwidth - 1)) - 1
    if task == "sine":
        if config.input_dim != 1:
            raise ValueError("the sine task needs input_dim = 1")
        n = np.arange(steps + 1)
        wave = np.round(state_max * np.sin(2 * math.pi * n / 25.0)).astype(np.int64)
        return wave[:-1, None], wave[1:, None], "sine"
    if task == "recall" or task.startswith("recall:"):
        delay = int(task.split(":", 1)[1]) if ":" in task else 0
        if delay < 0:
            raise ValueError("recall delay must be non-negative")
        rng = stream(config.seed, f"recall-input-{delay}")
        u = rng.integers(
            -(state_max + 1), state_max, size=(steps, config.input_dim),
            endpoint=True, dtype=np.int64,
        )
        y = np.zeros_like(u)
        if delay < steps:
            y[delay:] = u[: steps - delay]
        return u, y, f"recall:{delay}"
    raise ValueError(f"task must be 'sine' or 'recall[:delay]', got {task!r}")


def demo_task(
    config: EsnConfig,
    task: str,
    backend: str = "reference",
    steps: int = 260,
    washout: int = 20,
    train_fraction: float = 0.7,
    ridge_lambda: float = 1e-9,
) -> dict:
    """Train a readout on a benchmark task and report train/test MSE.

    The readout regresses from [state, input] features, the standard
    reservoir-computing arrangement, so a zero-delay recall reduces to
    reading the input feature back out.  Everything is seeded, so the
    report is bit-identical across runs with the same config.
    """
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}")
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    if washout < 0 or steps <= washout + 4:
        raise ValueError("steps must comfortably exceed washout")
    inputs, targets, task_name = _task_data(config, task, steps)
    esn = EchoStateNetwork(config)
    states = esn.run(inputs, backend)
    feats = np.hstack([states, inputs]).astype(np.float64)[washout:]
    y = targets.astype(np.float64)[washout:]
    n_train = int(round(train_fraction * len(feats)))
    w_out = train_readout(feats[:n_train], y[:n_train], ridge_lambda)
    pred_train = feats[:n_train] @ w_out.T
    pred_test = feats[n_train:] @ w_out.T
    train_mse = float(np.mean((pred_train - y[:n_train]) ** 2))
    test_mse = float(np.mean((pred_test - y[n_train:]) ** 2))
    return {
        "task": task_name,
        "backend": backend,
        "reservoir_dim": config.reservoir_dim,
        "steps": steps,
        "washout": washout,
        "train_steps": n_train,
        "test_steps": len(feats) - n_train,
        "train_mse": train_mse,
        "test_mse": test_mse,
        "target_variance": float(np.var(y[n_train:])),
        "seed": config.seed,
    }
