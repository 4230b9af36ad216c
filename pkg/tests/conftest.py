import sys
from pathlib import Path

import numpy as np
import pytest
from skimage import color, data, transform

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = []


def record_acceptance(label, passed, detail="", status=None):
    """Log one criterion; ``status`` overrides PASS/FAIL (e.g. WARN, SKIP)."""
    tag = status or ("PASS" if passed else "FAIL")
    line = f"[{tag}] {label}" + (f": {detail}" if detail else "")
    _ACCEPTANCE.append(line)
    print(line)


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


_NATURAL = {
    "camera": lambda: data.camera() / 255.0,
    "astronaut": lambda: color.rgb2gray(data.astronaut()),
    "coffee": lambda: color.rgb2gray(data.coffee()),
    "chelsea": lambda: color.rgb2gray(data.chelsea()),
    "rocket": lambda: color.rgb2gray(data.rocket()),
}

_COLOR = {
    "astronaut": data.astronaut,
    "coffee": data.coffee,
    "chelsea": data.chelsea,
    "rocket": data.rocket,
}


def natural_plane(name, shape):
    img = transform.resize(_NATURAL[name](), shape, anti_aliasing=True)
    return np.clip(img, 0.0, 1.0)


def natural_planes(shape=(64, 64)):
    return {k: natural_plane(k, shape) for k in _NATURAL}


def natural_pair(name, shape):
    """An RGB image and a synthetic NIR plane built from it.

    The NIR stand-in leans on the red channel, as vegetation and skin do in
    real NIR, and adds a fine texture the RGB image lacks.
    """
    rgb = np.clip(transform.resize(_COLOR[name]() / 255.0, shape, anti_aliasing=True), 0, 1)
    yy, xx = np.indices(shape)
    texture = 0.04 * np.sin(xx / 2.3) * np.cos(yy / 3.1)
    nir = np.clip(0.6 * rgb[..., 0] + 0.3 * rgb[..., 1] + 0.1 * rgb[..., 2] + texture, 0, 1)
    return rgb, nir


@pytest.fixture
def rng():
    return np.random.default_rng(20161008)


def write_dataset(root, names=("astronaut", "coffee"), shape=(64, 72), category="scene"):
    """Write ``<category>/<nnnn>_rgb.png`` / ``_nir.png`` pairs under ``root``."""
    from PIL import Image

    folder = Path(root) / category
    folder.mkdir(parents=True, exist_ok=True)
    for n, name in enumerate(names):
        rgb, nir = natural_pair(name, shape)
        Image.fromarray(np.round(rgb * 255).astype(np.uint8)).save(folder / f"{n:04d}_rgb.png")
        Image.fromarray(np.round(nir * 255).astype(np.uint8)).save(folder / f"{n:04d}_nir.png")
    return Path(root)
