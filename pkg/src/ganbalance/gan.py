"""Adversarial training of a minority-class sample generator.

The generator maps 100-dimensional noise through two ReLU hidden layers (100
units, then one per output feature), batch normalization, and a sigmoid output
so samples land in (0,1) like the min-max-scaled data.  The discriminator is
three 36-unit sigmoid layers, each followed by 20% dropout, and a sigmoid
output.  Each epoch performs one discriminator update (real rows labeled 1,
generated rows labeled 0, binary cross-entropy) followed by one generator
update through the frozen discriminator using the non-saturating loss (fakes
scored against label 1).  Both sides use Adam at the same learning rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ganbalance import nn
from ganbalance.data import Dataset
from ganbalance.errors import PreconditionError

NOISE_DIM = 100
GENERATOR_HIDDEN = 100
DISCRIMINATOR_HIDDEN = 36
DISCRIMINATOR_DROPOUT = 0.2


@dataclass
class GanTrainConfig:
    epochs: int = 10000
    learning_rate: float = 1e-5
    batch_size: int = 64  # capped at the number of positive rows
    noise_dim: int = NOISE_DIM
    seed: int = 0
    log_every: int = 1
    noise_distribution: str = "normal"  # or "uniform"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.noise_distribution not in ("normal", "uniform"):
            raise ValueError(f"unknown noise distribution {self.noise_distribution!r}")


@dataclass
class GanTrainingLog:
    epochs: list = field(default_factory=list)
    gen_loss: list = field(default_factory=list)
    disc_loss: list = field(default_factory=list)
    disc_acc: list = field(default_factory=list)

    def append(self, epoch: int, gen_loss: float, disc_loss: float, disc_acc: float):
        self.epochs.append(epoch)
        self.gen_loss.append(gen_loss)
        self.disc_loss.append(disc_loss)
        self.disc_acc.append(disc_acc)

    def __len__(self) -> int:
        return len(self.epochs)


def generator_spec(feature_dim: int = 30, noise_dim: int = NOISE_DIM):
    return [
        nn.dense(noise_dim, GENERATOR_HIDDEN),
        nn.relu(GENERATOR_HIDDEN),
        nn.dense(GENERATOR_HIDDEN, feature_dim),
        nn.relu(feature_dim),
        nn.batchnorm(feature_dim),
        nn.dense(feature_dim, feature_dim),
        nn.sigmoid(feature_dim),
    ]


def discriminator_spec(feature_dim: int = 30):
    h = DISCRIMINATOR_HIDDEN
    spec = [nn.dense(feature_dim, h), nn.sigmoid(h), nn.dropout(h, DISCRIMINATOR_DROPOUT)]
    for _ in range(2):
        spec += [nn.dense(h, h), nn.sigmoid(h), nn.dropout(h, DISCRIMINATOR_DROPOUT)]
    spec += [nn.dense(h, 1), nn.sigmoid(1)]
    return spec


def _generator_dims(generator: nn.NetworkState) -> tuple[int, int]:
    """(noise_dim, feature_dim) recovered from the trained parameter shapes."""
    dense_layers = [p for p in generator.layers if isinstance(p, nn.DenseParams)]
    if not dense_layers:
        raise PreconditionError("state holds no dense layers; not a generator")
    return dense_layers[0].weights.shape[0], dense_layers[-1].weights.shape[1]


def sample_noise(
    n: int,
    rng: np.random.Generator,
    dim: int = NOISE_DIM,
    distribution: str = "normal",
) -> np.ndarray:
    if n < 1:
        raise PreconditionError("need at least one noise row")
    if distribution == "normal":
        return rng.standard_normal((n, dim))
    if distribution == "uniform":
        return rng.random((n, dim))
    raise ValueError(f"unknown noise distribution {distribution!r}")


def train_gan(
    positives: Dataset, config: GanTrainConfig, hook=None
) -> tuple[nn.NetworkState, GanTrainingLog]:
    """Train the adversarial pair on minority rows.

    ``hook(kind, epoch)``, when given, is called after every parameter update
    with kind "disc" or "gen"; tests use it to audit the alternation.
    Returns the trained generator state and the per-epoch log.
    """
    x = positives.features
    if x.shape[0] < 2:
        raise PreconditionError("need at least 2 minority rows to train")
    if not np.all(positives.labels == 1):
        raise PreconditionError("generator trains on label-1 rows only")
    if x.min() < 0.0 or x.max() > 1.0:
        raise PreconditionError("minority features must lie in [0, 1]")

    feature_dim = x.shape[1]
    rng = np.random.default_rng(config.seed)
    gen_spec = generator_spec(feature_dim, config.noise_dim)
    disc_spec = discriminator_spec(feature_dim)
    gen_state = nn.init_state(gen_spec, rng)
    disc_state = nn.init_state(disc_spec, rng)
    gen_opt = nn.init_adam(gen_state, config.learning_rate)
    disc_opt = nn.init_adam(disc_state, config.learning_rate)

    n = x.shape[0]
    batch = min(config.batch_size, n)
    real_labels = np.ones((batch, 1))
    fake_labels = np.zeros((batch, 1))
    disc_targets = np.vstack([real_labels, fake_labels])
    log = GanTrainingLog()

    for epoch in range(1, config.epochs + 1):
        # discriminator step: real batch vs freshly generated batch
        real = x[rng.choice(n, size=batch, replace=False)]
        noise = sample_noise(batch, rng, config.noise_dim, config.noise_distribution)
        fake, _ = nn.forward(gen_spec, gen_state, noise, mode="train")
        disc_in = np.vstack([real, fake])
        disc_out, disc_cache = nn.forward(
            disc_spec, disc_state, disc_in, mode="train", rng=rng
        )
        disc_loss = nn.loss_bce(disc_out, disc_targets)
        disc_acc = float(np.mean((disc_out > 0.5).astype(np.int64) == disc_targets))
        grads = nn.backward(disc_spec, disc_state, disc_cache, "bce", disc_targets)
        nn.adam_step(disc_state, grads, disc_opt)
        if hook is not None:
            hook("disc", epoch)

        # generator step: push fakes toward the discriminator's "real" label
        noise = sample_noise(batch, rng, config.noise_dim, config.noise_distribution)
        fake, gen_cache = nn.forward(gen_spec, gen_state, noise, mode="train")
        disc_out, disc_cache = nn.forward(
            disc_spec, disc_state, fake, mode="train", rng=rng
        )
        gen_loss = nn.loss_bce(disc_out, real_labels)
        disc_grads = nn.backward(disc_spec, disc_state, disc_cache, "bce", real_labels)
        gen_grads = nn.backward_from(gen_spec, gen_state, gen_cache, disc_grads.wrt_input)
        nn.adam_step(gen_state, gen_grads, gen_opt)
        if hook is not None:
            hook("gen", epoch)

        if epoch % config.log_every == 0 or epoch == config.epochs:
            log.append(epoch, gen_loss, disc_loss, disc_acc)

    return gen_state, log


def generate(
    generator: nn.NetworkState,
    n: int,
    rng: np.random.Generator,
    noise_distribution: str = "normal",
) -> np.ndarray:
    """Sample n synthetic minority rows; every value is strictly in (0, 1).

    Runs in inference mode (no dropout, running batchnorm statistics), so the
    output depends only on the parameters and the rng.
    """
    if n < 1:
        raise PreconditionError("need n >= 1 generated rows")
    noise_dim, feature_dim = _generator_dims(generator)
    spec = generator_spec(feature_dim, noise_dim)
    noise = sample_noise(n, rng, noise_dim, noise_distribution)
    out, _ = nn.forward(spec, generator, noise, mode="infer")
    # sigmoid saturates to exactly 0.0/1.0 in float64 for |z| > ~37; nudge
    # back inside the open interval the downstream contract expects
    return np.clip(out, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


def write_log_csv(log: GanTrainingLog, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("epoch,gen_loss,disc_loss,disc_acc\n")
        for e, g, d, a in zip(log.epochs, log.gen_loss, log.disc_loss, log.disc_acc):
            fh.write(f"{e},{g:.6f},{d:.6f},{a:.6f}\n")


def write_samples_csv(samples: np.ndarray, path) -> None:
    header = ",".join(f"f{i}" for i in range(samples.shape[1]))
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in samples:
            fh.write(",".join(f"{v:.9f}" for v in row) + "\n")
