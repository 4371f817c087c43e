"""
The gradient family on a quadratic and on XOR
=============================================
"""

import numpy as np

from mostopt import xornet
from mostopt.gradopt import METHODS, GradConfig, minimize
from mostopt.core import RandomSource

# %%
# An ill-conditioned quadratic, 500 steps each. AdaGrad and AdaDelta start
# slowly with these settings; AdaDelta ignores eta altogether.
A = np.diag([1.0, 25.0])
quad = lambda w: (float(0.5 * w @ A @ w), A @ w)
for m in METHODS:
    w, tr = minimize(quad, [1.0, 1.0], GradConfig(m, eta=0.01), max_steps=500)
    print(f"{m:9s} f = {tr[-1].value:.3e}")

# %%
# Adam on the 2-2-1 network (ReLU hidden layer, cross entropy), stopping at
# loss 0.01. Some starts get stuck with dead units; that is the network, not
# the optimiser.
data = xornet.xor_dataset()
for seed in range(1, 6):
    w0 = xornet.initial_weights(RandomSource(seed))
    w, tr = minimize(xornet.value_and_grad(data), w0, GradConfig("adam"), max_steps=50000, tol=0.01)
    y = xornet.outputs(w, data, xornet.GRADIENT_NET)
    print(seed, tr[-1].step, np.array2string(y, precision=4))
