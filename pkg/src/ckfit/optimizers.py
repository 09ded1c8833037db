"""First-order optimizers operating on flat numpy parameter vectors.

Update rules and default hyperparameters mirror the Keras optimizers of the
TensorFlow 2.x line (epsilon 1e-7, Adagrad accumulator 0.1, Adadelta rho 0.95,
Nadam momentum decay 0.96, ...). Each optimizer owns its slot vectors and a
step counter; ``step`` returns the new parameter vector.
"""
from __future__ import annotations

import numpy as np

from .errors import UsageError


class Optimizer:
    name = "base"
    defaults: dict = {}

    def __init__(self, learning_rate=0.01, **hyper):
        if not learning_rate > 0:
            raise UsageError("learning rate must be > 0")
        unknown = set(hyper) - set(self.defaults)
        if unknown:
            raise UsageError(f"{self.name} does not take {sorted(unknown)}")
        self.lr = float(learning_rate)
        self.hyper = {**self.defaults, **hyper}
        self.slots: dict[str, np.ndarray] = {}
        self.iterations = 0

    def _slot(self, key, like, fill=0.0):
        if key not in self.slots:
            self.slots[key] = np.full_like(like, fill, dtype=float)
        return self.slots[key]

    def step(self, params, grads):
        params = np.asarray(params, dtype=float)
        grads = np.asarray(grads, dtype=float)
        if params.shape != grads.shape:
            raise UsageError(f"parameter shape {params.shape} does not match gradient shape {grads.shape}")
        self.iterations += 1
        return self._update(params, grads, self.iterations)

    def _update(self, params, grads, t):
        raise NotImplementedError

    def config(self):
        return {"name": self.name, "learning_rate": self.lr, **self.hyper}

    def __repr__(self):
        return f"{type(self).__name__}(lr={self.lr}, step={self.iterations})"


class SGD(Optimizer):
    name = "sgd"

    def _update(self, params, grads, t):
        return params - self.lr * grads


class SGDMomentum(Optimizer):
    name = "sgd-momentum"
    defaults = {"momentum": 0.9}

    def _update(self, params, grads, t):
        v = self._slot("velocity", params)
        v *= self.hyper["momentum"]
        v -= self.lr * grads
        return params + v


class SGDNesterov(Optimizer):
    name = "sgd-nesterov"
    defaults = {"momentum": 0.9}

    def _update(self, params, grads, t):
        mom = self.hyper["momentum"]
        v = self._slot("velocity", params)
        v *= mom
        v -= self.lr * grads
        return params + mom * v - self.lr * grads


class Adagrad(Optimizer):
    name = "adagrad"
    defaults = {"initial_accumulator_value": 0.1, "epsilon": 1e-7}

    def _update(self, params, grads, t):
        acc = self._slot("accumulator", params, self.hyper["initial_accumulator_value"])
        acc += grads * grads
        return params - self.lr * grads / (np.sqrt(acc) + self.hyper["epsilon"])


class Adadelta(Optimizer):
    name = "adadelta"
    defaults = {"rho": 0.95, "epsilon": 1e-7}

    def _update(self, params, grads, t):
        rho, eps = self.hyper["rho"], self.hyper["epsilon"]
        acc_g = self._slot("accumulated_grad", params)
        acc_dx = self._slot("accumulated_delta", params)
        acc_g[:] = rho * acc_g + (1 - rho) * grads * grads
        delta = np.sqrt(acc_dx + eps) / np.sqrt(acc_g + eps) * grads
        acc_dx[:] = rho * acc_dx + (1 - rho) * delta * delta
        return params - self.lr * delta


class Adam(Optimizer):
    name = "adam"
    defaults = {"beta_1": 0.9, "beta_2": 0.999, "epsilon": 1e-7}
    amsgrad = False

    def _update(self, params, grads, t):
        b1, b2, eps = self.hyper["beta_1"], self.hyper["beta_2"], self.hyper["epsilon"]
        m = self._slot("m", params)
        v = self._slot("v", params)
        m += (grads - m) * (1 - b1)
        v += (grads * grads - v) * (1 - b2)
        if self.amsgrad:
            vmax = self._slot("vhat_max", params)
            np.maximum(vmax, v, out=vmax)
            v = vmax
        step = self.lr * np.sqrt(1 - b2 ** t) / (1 - b1 ** t)
        return params - step * m / (np.sqrt(v) + eps)


class AMSGrad(Adam):
    name = "amsgrad"
    amsgrad = True


class Adamax(Optimizer):
    name = "adamax"
    defaults = {"beta_1": 0.9, "beta_2": 0.999, "epsilon": 1e-7}

    def _update(self, params, grads, t):
        b1, b2, eps = self.hyper["beta_1"], self.hyper["beta_2"], self.hyper["epsilon"]
        m = self._slot("m", params)
        u = self._slot("u", params)
        m += (grads - m) * (1 - b1)
        np.maximum(b2 * u, np.abs(grads), out=u)
        return params - self.lr / (1 - b1 ** t) * m / (u + eps)


class Nadam(Optimizer):
    """Adam with Nesterov momentum and the 0.96**(0.004 t) momentum schedule."""

    name = "nadam"
    defaults = {"beta_1": 0.9, "beta_2": 0.999, "epsilon": 1e-7}

    def __init__(self, learning_rate=0.01, **hyper):
        super().__init__(learning_rate, **hyper)
        self._u_product = 1.0

    def _update(self, params, grads, t):
        b1, b2, eps = self.hyper["beta_1"], self.hyper["beta_2"], self.hyper["epsilon"]
        m = self._slot("m", params)
        v = self._slot("v", params)
        u_t = b1 * (1.0 - 0.5 * 0.96 ** (0.004 * t))
        u_next = b1 * (1.0 - 0.5 * 0.96 ** (0.004 * (t + 1)))
        prod = self._u_product * u_t
        self._u_product = prod
        prod_next = prod * u_next
        m += (grads - m) * (1 - b1)
        v += (grads * grads - v) * (1 - b2)
        m_hat = u_next * m / (1 - prod_next) + (1 - u_t) * grads / (1 - prod)
        v_hat = v / (1 - b2 ** t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + eps)


class FTRL(Optimizer):
    """Follow-the-regularized-leader (proximal form).

    The linear slot is seeded from the starting parameters, so a warm start
    (e.g. the least-squares init) is kept instead of being pulled to zero.
    From all-zero parameters this is the textbook update.
    """

    name = "ftrl"
    defaults = {"learning_rate_power": -0.5, "initial_accumulator_value": 0.1,
                "l1_regularization_strength": 0.0, "l2_regularization_strength": 0.0}

    def _update(self, params, grads, t):
        p = -self.hyper["learning_rate_power"]
        l1 = self.hyper["l1_regularization_strength"]
        l2 = self.hyper["l2_regularization_strength"]
        fresh = "linear" not in self.slots
        acc = self._slot("accumulator", params, self.hyper["initial_accumulator_value"])
        lin = self._slot("linear", params)
        if fresh:
            # warm start: choose z so the proximal solution reproduces the initial params
            lin[:] = -params * (acc ** p / self.lr + 2.0 * l2)
        new_acc = acc + grads * grads
        sigma = (new_acc ** p - acc ** p) / self.lr
        lin += grads - sigma * params
        quad = new_acc ** p / self.lr + 2.0 * l2
        acc[:] = new_acc
        shrunk = np.sign(lin) * l1 - lin
        return np.where(np.abs(lin) > l1, shrunk / quad, 0.0)


OPTIMIZERS = {cls.name: cls for cls in (SGD, SGDMomentum, SGDNesterov, Adagrad, Adadelta,
                                        Adam, Adamax, Nadam, AMSGrad, FTRL)}


def make_optimizer(name: str, learning_rate: float, **hyper) -> Optimizer:
    key = name.lower().replace("_", "-")
    if key not in OPTIMIZERS:
        raise UsageError(f"unknown optimizer {name!r}; choose from {', '.join(OPTIMIZERS)}")
    return OPTIMIZERS[key](learning_rate, **hyper)
