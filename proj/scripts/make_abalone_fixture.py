#!/usr/bin/env python3
"""Generates the abalone-like benchmark fixture in data/.

Produces 4177 rows of 7 correlated physical measurements (lengths and
weights driven by a latent age), a 3-class label (age group), and a small
ReLU network trained to a deliberately imperfect validation accuracy
(target band 0.55-0.72), written in the plain-text weights format the
engine loads.

Outputs (all deterministic for a fixed seed):
  data/abalone_features.csv  headerless, 7 comma-separated values per row
  data/abalone_labels.csv    ground-truth class per row (for accuracy checks)
  data/abalone_network.txt   stobb-weights v1
Validation split convention: the last 20% of rows.
"""

import pathlib

import numpy as np
import torch
import torch.nn as nn

SEED = 20260823
N = 4177
D = 7
CLASSES = 3
HIDDEN = [32, 32, 32, 32]
VAL_FRACTION = 0.2


def synthesize(rng: np.random.Generator):
    # latent age in years; classes are terciles (young / adult / old)
    age = rng.gamma(shape=9.0, scale=1.2, size=N)
    cuts = np.quantile(age, [1 / 3, 2 / 3])
    labels = np.digitize(age, cuts)

    # size grows as a power law of age; the individual variation level caps
    # the achievable accuracy of any model at roughly the target band
    size = 0.16 * age**0.55 * rng.lognormal(0.0, 0.07, N)

    def noisy(base, rel):
        return base * rng.lognormal(0.0, rel, N)

    length = noisy(size, 0.08)
    diameter = noisy(0.80 * length, 0.06)
    height = noisy(0.35 * length, 0.12)
    whole = noisy(1.95 * length**2.8, 0.10)
    shucked = noisy(0.43 * whole, 0.12)
    viscera = noisy(0.22 * whole, 0.14)
    shell = noisy(0.29 * whole, 0.12)

    x = np.stack([length, diameter, height, whole, shucked, viscera, shell], axis=1)
    return x.astype(np.float64), labels.astype(np.int64)


def build_net() -> nn.Sequential:
    dims = [D] + HIDDEN + [CLASSES]
    layers = []
    for i in range(len(dims) - 1):
        layers.append(nn.Linear(dims[i], dims[i + 1]))
        if i < len(dims) - 2:
            layers.append(nn.ReLU())
    return nn.Sequential(*layers)


def train(x, y):
    n_val = int(N * VAL_FRACTION)
    xt = torch.tensor(x, dtype=torch.float64)
    yt = torch.tensor(y)
    x_train, y_train = xt[:-n_val], yt[:-n_val]
    x_val, y_val = xt[-n_val:], yt[-n_val:]

    net = build_net().double()
    opt = torch.optim.Adam(net.parameters(), lr=3e-3)
    loss_fn = nn.CrossEntropyLoss()
    for epoch in range(2000):
        opt.zero_grad()
        loss = loss_fn(net(x_train), y_train)
        loss.backward()
        opt.step()

    with torch.no_grad():
        train_acc = (net(x_train).argmax(1) == y_train).double().mean().item()
        val_acc = (net(x_val).argmax(1) == y_val).double().mean().item()
    return net, train_acc, val_acc


def write_weights(net: nn.Sequential, path: pathlib.Path):
    linears = [m for m in net if isinstance(m, nn.Linear)]
    lines = ["stobb-weights v1", f"input_dim {D}", f"classes {CLASSES}",
             f"layers {len(linears)}"]
    for i, lin in enumerate(linears):
        w = lin.weight.detach().numpy()  # [out, in], row-major like the loader
        b = lin.bias.detach().numpy()
        lines.append(f"layer {i} {w.shape[1]} {w.shape[0]}")
        for row in w:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(" ".join(repr(float(v)) for v in b))
    path.write_text("\n".join(lines) + "\n")


def main():
    rng = np.random.default_rng(SEED)
    torch.manual_seed(SEED)
    x, y = synthesize(rng)
    net, train_acc, val_acc = train(x, y)
    print(f"train accuracy {train_acc:.4f}, validation accuracy {val_acc:.4f}")
    if not (0.55 <= val_acc <= 0.72):
        raise SystemExit("validation accuracy outside the target band; retune noise")

    out = pathlib.Path(__file__).resolve().parent.parent / "data"
    out.mkdir(exist_ok=True)
    with open(out / "abalone_features.csv", "w") as f:
        for row in x:
            f.write(",".join(repr(float(v)) for v in row) + "\n")
    with open(out / "abalone_labels.csv", "w") as f:
        for v in y:
            f.write(f"{v}\n")
    write_weights(net, out / "abalone_network.txt")
    print(f"wrote {N} rows to {out}")


if __name__ == "__main__":
    main()
