import oracles


def test_frozen_oracles_reproduce():
    fresh = oracles.compute()
    frozen = oracles.load()
    assert fresh.keys() == frozen.keys()

    def same(a, b):
        if isinstance(a, dict):
            return a.keys() == b.keys() and all(same(a[k], b[k]) for k in a)
        if isinstance(a, list):
            return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
        return abs(a - b) <= 1e-12 * max(1.0, abs(a))

    assert same(fresh, frozen)
