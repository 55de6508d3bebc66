"""
The from-scratch network core on a toy regression
=================================================

Everything the agents learn with is plain numpy: Dense, Relu, Tanh, Adam,
and hand-written backward passes.  This fits sin(3x) with a small MLP,
spot-checks one analytic gradient against central differences, and plots
the fit.  No autograd anywhere.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from asvnav.config import output_root
from asvnav.nn import Adam, Dense, Tanh


class MLP:
    """Dense-Tanh-Dense-Tanh-Dense stack with the layer protocol."""

    def __init__(self, sizes, rng):
        self.layers = []
        for n_in, n_out in zip(sizes, sizes[1:]):
            self.layers.append(Dense(n_in, n_out, rng))
            self.layers.append(Tanh())
        self.layers.pop()  # linear output

    def forward(self, x):
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, dy):
        for layer in reversed(self.layers):
            dy = layer.backward(dy)
        return dy

    def param_items(self):
        for i, layer in enumerate(self.layers):
            if isinstance(layer, Dense):
                yield from layer.param_items(f"dense{i}")


rng = np.random.default_rng(0)
x = np.linspace(-1.0, 1.0, 256)[:, None]
y = np.sin(3.0 * x)

net = MLP([1, 32, 32, 1], rng)
opt = Adam(net, lr=3e-3)

# squared-error loss; dL/dpred = 2 (pred - y) / n
for step in range(1, 2001):
    pred = net.forward(x)
    err = pred - y
    loss = float((err * err).mean())
    net.backward(2.0 * err / err.size)
    opt.step()
    if step in (1, 100, 500, 2000):
        print(f"step {step:4d}  mse {loss:.6f}")

# gradient spot check: perturb one weight, compare to the stored gradient
w_layer = net.layers[0]
pred = net.forward(x)
net.backward(2.0 * (pred - y) / y.size)
analytic = w_layer.dW[0, 0]
h = 1e-6
keep = w_layer.W[0, 0]
w_layer.W[0, 0] = keep + h
up = float(((net.forward(x) - y) ** 2).mean())
w_layer.W[0, 0] = keep - h
dn = float(((net.forward(x) - y) ** 2).mean())
w_layer.W[0, 0] = keep
fd = (up - dn) / (2.0 * h)
print(f"\nd(mse)/dW[0,0]: analytic {analytic:+.8f}, "
      f"central difference {fd:+.8f}, "
      f"relative error {abs(analytic - fd) / max(1e-12, abs(fd)):.2e}")

out = os.path.join(output_root(), "demos", "neural_core")
os.makedirs(out, exist_ok=True)
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(x[:, 0], y[:, 0], label="sin(3x)")
ax.plot(x[:, 0], net.forward(x)[:, 0], "--", label="MLP fit")
ax.legend()
fig.savefig(os.path.join(out, "fit.svg"), bbox_inches="tight")
plt.close(fig)
print(f"wrote {os.path.join(out, 'fit.svg')}")
