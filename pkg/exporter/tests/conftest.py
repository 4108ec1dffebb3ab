"""Shared fixtures: tiny TorchScript networks and synthetic frame directories."""

import os

import cv2
import numpy as np
import pytest
import torch


class _ConvNet(torch.nn.Module):
    def __init__(self, channels: int, stride: int = 1):
        super().__init__()
        self.conv = torch.nn.Conv2d(3, channels, 3, stride=stride, padding=1)

    def forward(self, x):
        return self.conv(x)


class _ExplodingNet(torch.nn.Module):
    def forward(self, x):
        if x.numel() >= 0:
            raise RuntimeError("synthetic inference failure")
        return x


class _PairNet(torch.nn.Module):
    def forward(self, x):
        return x, x


def _save_scripted(module: torch.nn.Module, path) -> str:
    module.eval()
    torch.jit.script(module).save(str(path))
    return str(path)


@pytest.fixture(scope="session")
def model_path(tmp_path_factory):
    torch.manual_seed(1234)
    return _save_scripted(_ConvNet(150), tmp_path_factory.mktemp("m150") / "seg150.pt")


@pytest.fixture(scope="session")
def small_model_path(tmp_path_factory):
    torch.manual_seed(99)
    return _save_scripted(_ConvNet(4), tmp_path_factory.mktemp("m4") / "seg4.pt")


@pytest.fixture(scope="session")
def halving_model_path(tmp_path_factory):
    torch.manual_seed(7)
    return _save_scripted(_ConvNet(4, stride=2), tmp_path_factory.mktemp("mhalf") / "half.pt")


@pytest.fixture(scope="session")
def exploding_model_path(tmp_path_factory):
    return _save_scripted(_ExplodingNet(), tmp_path_factory.mktemp("boom") / "boom.pt")


@pytest.fixture(scope="session")
def pair_model_path(tmp_path_factory):
    return _save_scripted(_PairNet(), tmp_path_factory.mktemp("pair") / "pair.pt")


def write_frames(path: str, count: int, h: int = 16, w: int = 20, seed: int = 42,
                 pattern: str = "in%06d.png", start: int = 1) -> None:
    os.makedirs(path, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(count):
        frame = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
        assert cv2.imwrite(os.path.join(path, pattern % (start + i)), frame)


@pytest.fixture(scope="session")
def frames_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("frames")
    write_frames(str(path), 10)
    return str(path)
