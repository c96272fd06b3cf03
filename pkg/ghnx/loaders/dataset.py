"""Desk-scale image classification task

Images are oriented sinusoidal gratings: a class fixes the orientation and
the spatial frequency, each sample draws a phase, an amplitude and per-channel
gains, and Gaussian noise is added. Separating the classes takes oriented
filters, so the task rewards architectures with useful convolutions.

File format (all integers little-endian)::

    b"GHND"
    uint32 version, count, channels, height, width, num_classes
    uint8  pixels[count * channels * height * width]   (N, C, H, W order)
    uint8  labels[count]
"""
from collections import namedtuple
import logging
import pathlib

import numpy as np

from ..errors import InputError
from ..candidate.network import Batch
from ..tensor import Tensor


logger = logging.getLogger(__name__)

MAGIC = b"GHND"
VERSION = 1
_HEADER = np.dtype("<u4")


_Dataset = namedtuple("_Dataset", ["images", "labels", "num_classes"])


class Dataset(_Dataset):
    """Labelled uint8 images

    Parameters
    ----------
    images: ndarray of uint8 (N, C, H, W)
       pixels
    labels: ndarray of int (N,)
       class indices
    num_classes: int
       number of classes
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        if self.images.ndim != 4 or self.images.dtype != np.uint8:
            raise InputError("images must be a uint8 array of shape (N, C, H, W)")
        if self.labels.shape != (self.images.shape[0],):
            emsg = (
                f"{self.labels.shape[0]} labels for "
                f"{self.images.shape[0]} images"
            )
            raise InputError(emsg)
        if len(self.labels) and (self.labels.min() < 0 or
                                 self.labels.max() >= self.num_classes):
            raise InputError(f"labels must lie in [0, {self.num_classes})")

    def __len__(self):
        return self.images.shape[0]

    @property
    def image_shape(self):
        return tuple(self.images.shape[1:])

    def batch(self, indices=None):
        """Batch of the given samples (all by default), pixels in [-0.5, 0.5]"""
        if indices is None:
            indices = np.arange(len(self))
        indices = np.asarray(indices)
        images = self.images[indices].astype(np.float64) / 255.0 - 0.5
        return Batch(Tensor(images), self.labels[indices].astype(np.int64))

    def batches(self, size):
        """Consecutive batches of at most `size` samples"""
        for start in range(0, len(self), size):
            yield self.batch(np.arange(start, min(start + size, len(self))))


def generate_gratings(count, num_classes=10, channels=3, size=16, noise=0.3,
                      seed=0):
    """Synthetic grating images with balanced labels

    Parameters
    ----------
    count: int
       number of images
    num_classes: int
       classes; half the classes use a low and half a high frequency, and
       each frequency spreads its classes evenly over orientations
    channels, size: int
       image channels and (square) side length
    noise: float
       standard deviation of the additive Gaussian noise
    seed: int or SeedSequence
       random source

    Returns
    -------
    Dataset
    """
    if count < 1 or num_classes < 2 or channels < 1 or size < 2:
        emsg = (
            f"invalid task size: count={count}, num_classes={num_classes}, "
            f"channels={channels}, size={size}"
        )
        raise InputError(emsg)
    rng = np.random.default_rng(seed)
    norient = -(-num_classes // 2)
    labels = rng.permutation(np.arange(count) % num_classes)

    theta = np.pi * (labels % norient) / norient
    freq = np.where(labels < norient, 2.0, 4.0)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=count)
    amp = rng.uniform(0.6, 1.0, size=count)
    gain = rng.uniform(0.5, 1.0, size=(count, channels))

    y, x = np.mgrid[0:size, 0:size] / size
    proj = (np.cos(theta)[:, None, None] * x + np.sin(theta)[:, None, None] * y)
    wave = np.sin(2.0 * np.pi * freq[:, None, None] * proj
                  + phase[:, None, None])
    signal = (amp[:, None, None, None] * gain[:, :, None, None]
              * wave[:, None, :, :])
    signal = signal + noise * rng.standard_normal(signal.shape)
    pixels = np.clip(0.5 + 0.5 * signal, 0.0, 1.0)
    images = np.round(pixels * 255.0).astype(np.uint8)
    return Dataset(images, labels.astype(np.int64), int(num_classes))


def write_dataset(path, ds):
    """Write a dataset in the GHND format"""
    path = pathlib.Path(path)
    n, c, h, w = ds.images.shape
    header = np.array([VERSION, n, c, h, w, ds.num_classes], dtype=_HEADER)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(ds.images).tobytes())
        f.write(ds.labels.astype(np.uint8).tobytes())
    logger.info("wrote %d images to %s", n, path)


def read_dataset(path):
    """Read a GHND dataset file

    Raises
    ------
    InputError
       if the magic, version or payload size is wrong
    """
    raw = pathlib.Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise InputError(f"{path}: not a GHND dataset file")
    header = np.frombuffer(raw, dtype=_HEADER, count=6, offset=4)
    version, n, c, h, w, ncls = (int(v) for v in header)
    if version != VERSION:
        raise InputError(f"{path}: dataset version {version} is not {VERSION}")
    start = 4 + header.nbytes
    npix = n * c * h * w
    if len(raw) != start + npix + n:
        emsg = (
            f"{path}: payload holds {len(raw) - start} bytes, header "
            f"announces {npix + n}"
        )
        raise InputError(emsg)
    images = np.frombuffer(raw, dtype=np.uint8, count=npix, offset=start)
    labels = np.frombuffer(raw, dtype=np.uint8, count=n, offset=start + npix)
    return Dataset(images.reshape(n, c, h, w).copy(),
                   labels.astype(np.int64), ncls)
