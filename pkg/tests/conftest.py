import numpy as np
import pytest

from waveshift.filter_bank import default_dual_tree_bank
from waveshift.image_io import write_pgm


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def qbank():
    return default_dual_tree_bank()


def _gray_u8(img):
    img = np.asarray(img)
    if img.ndim == 3:
        img = np.rint(img[..., :3].astype(float) @ np.array([0.299, 0.587, 0.114]))
    return np.clip(img, 0, 255).astype(np.uint8)


def build_natural_corpus(directory):
    """Write 23 grayscale PGM photographs and micrographs into ``directory``.

    Sources are the sample images bundled with scikit-image and
    scikit-learn; the two largest images also contribute off-center tiles.
    """
    skdata = pytest.importorskip("skimage.data")
    datasets = pytest.importorskip("sklearn.datasets")
    names = [
        "astronaut", "brick", "camera", "cell", "chelsea", "clock", "coffee", "coins",
        "grass", "gravel", "hubble_deep_field", "immunohistochemistry", "moon",
        "retina", "rocket",
    ]
    images = {n: _gray_u8(getattr(skdata, n)()) for n in names}
    for img, n in zip(datasets.load_sample_images().images, ["china", "flower"]):
        images[n] = _gray_u8(img)
    retina = images["retina"]
    h = retina.shape[0] // 2
    for i, (a, b) in enumerate([(0, 0), (0, h), (h, 0), (h, h)]):
        images[f"retina_q{i}"] = retina[a : a + h, b : b + h]
    hubble = images["hubble_deep_field"]
    images["hubble_left"] = hubble[:, :500]
    images["hubble_right"] = hubble[:, 500:]
    for name, img in images.items():
        write_pgm(directory / f"{name}.pgm", img)
    return directory


@pytest.fixture(scope="session")
def natural_corpus(tmp_path_factory):
    return build_natural_corpus(tmp_path_factory.mktemp("corpus"))


_CRITERIA = {}


@pytest.fixture
def report():
    """Record one acceptance verdict; the terminal summary lists them all."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})"
        _CRITERIA[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
