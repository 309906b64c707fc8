import random

import numpy as np
import pytest

import ncdm


def text(seed, words=80):
    rng = random.Random(seed)
    vocab = ["cell", "track", "radius", "growth", "motion", "sample", "value", "noise"]
    return " ".join(rng.choice(vocab) + str(rng.randint(0, 50)) for _ in range(words))


def noise(seed, n=2048):
    return random.Random(seed).randbytes(n)


def test_wilson_matches_published_interval():
    lo, hi = ncdm.wilson_ci(0.87, 86)
    assert (round(lo, 2), round(hi, 2)) == (0.78, 0.93)


def test_distances_and_bounds():
    eng = ncdm.Engine("deflate", framing="length-prefixed")
    a, b = noise(1), noise(2)
    assert eng.pairwise(a, a) < 0.1
    assert eng.pairwise(a, b) > 0.9
    items = [text(s) for s in range(5)]
    assert eng.ncd(items) <= eng.ncd_exact(items) + 1e-9
    assert eng.ncd(items) == eng.ncd(list(reversed(items)))


def test_distance_matrix_follows_input_order():
    eng = ncdm.Engine("deflate", framing="length-prefixed")
    items = [noise(5, 3000), noise(6, 1000), noise(5, 3000)]
    m = eng.distance_matrix(items)
    assert m.shape == (3, 3)
    assert np.allclose(m, m.T)
    assert m[0, 2] < 0.1 and m[0, 1] > 0.9


def near_copies(base_seed, count, seed):
    rng = random.Random(seed)
    base = bytearray(noise(base_seed, 1500))
    out = []
    for _ in range(count):
        c = bytearray(base)
        for _ in range(10):
            c[rng.randrange(len(c))] = rng.randrange(256)
        out.append(bytes(c))
    return out


def test_classify_and_loocv():
    eng = ncdm.Engine("deflate", framing="length-prefixed")
    classes = {"a": near_copies(1, 5, 10), "b": near_copies(2, 5, 11)}
    for method in ("delta", "min-distance"):
        label, scores = eng.classify(near_copies(1, 1, 12)[0], classes, method=method)
        assert label == "a" and set(scores) == {"a", "b"}
    report = eng.loocv(classes, method="min-distance")
    assert report["n"] == 10 and report["accuracy"] == 1.0
    lo, hi = report["ci"]
    assert lo <= report["accuracy"] <= hi


def test_split_returns_a_partition():
    eng = ncdm.Engine("deflate", framing="length-prefixed")
    items = [noise(1)] * 3 + [noise(2)] * 3
    a, b, margin = eng.split(items, restarts=3, seed=4)
    assert sorted(a + b) == list(range(6))
    assert len(a) >= 2 and len(b) >= 2


def test_image_pipeline():
    img = np.zeros((28, 28), dtype=np.uint8)
    img[8:20, 12:16] = 200
    t = ncdm.otsu_threshold(img)
    assert 0 <= t < 200
    bits = ncdm.image_to_bitstream(img, scale=4)
    assert len(bits) == 112 * 112 and set(bits) <= set(b"01")


def test_errors_are_typed():
    eng = ncdm.Engine("deflate")
    with pytest.raises(ncdm.InvalidArgument):
        ncdm.wilson_ci(0.5, 0)
    with pytest.raises(ncdm.Error):
        eng.ncd1([b"only one"])
