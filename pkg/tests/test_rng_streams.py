from euclid_engine.rng_streams import derive_rng, stream_label


def test_same_path_same_stream():
    a = derive_rng(42, 1, 2, 3).integers(0, 2**61 - 1, size=8).tolist()
    b = derive_rng(42, 1, 2, 3).integers(0, 2**61 - 1, size=8).tolist()
    assert a == b


def test_distinct_paths_differ():
    draws = {tuple(derive_rng(42, 0, 0, t).integers(0, 2**61 - 1, size=4).tolist()) for t in range(20)}
    assert len(draws) == 20
    assert derive_rng(41, 0).integers(0, 2**61 - 1) != derive_rng(42, 0).integers(0, 2**61 - 1)


def test_label():
    assert stream_label(42, (3, 0, 7)) == "42:3/0/7"
