"""Smoke tests for the python bindings: shapes, invariants, determinism."""

import numpy as np
import pytest

import neurogrow as ng


def make_net(seed=0, hidden=(6,), in_dim=4, out_dim=3, head=None):
    head = head if head is not None else ng.OutputHead.identity
    return ng.Network.make_mlp(in_dim, list(hidden), out_dim, head, seed)


def test_forward_shapes_and_determinism():
    net = make_net(seed=1)
    x = np.random.default_rng(0).random((5, 4))
    y1 = net.forward(x)
    y2 = net.forward(x)
    assert y1.shape == (5, 3)
    np.testing.assert_array_equal(y1, y2)

    same = make_net(seed=1)
    np.testing.assert_array_equal(same.forward(x), y1)


def test_kaiming_init_statistics():
    w = ng.kaiming_init(500, 200, 7)
    assert w.shape == (500, 200)
    assert abs(w.std() - np.sqrt(2.0 / 200)) < 0.005


def test_swe_extend_is_function_preserving_at_zero_lr():
    net = make_net(seed=2)
    x = np.random.default_rng(1).random((8, 4))
    before = net.forward(x)
    targets = np.random.default_rng(2).random((8, 3))
    ng.swe_extend(net, 0, 3, x, targets=targets, lr=0.0, stage=1, seed=3)
    assert net.hidden_widths == [9]
    np.testing.assert_allclose(net.forward(x), before, atol=1e-12)
    assert net.birth_stages(0) == [0] * 6 + [1] * 3


def test_extenders_grow_width():
    for extend in (ng.kaiming_extend, ng.frobenius_extend):
        net = make_net(seed=3)
        extend(net, 0, 2, stage=1, seed=4)
        assert net.hidden_widths == [8]


def test_probe_gradients_and_svod_budget():
    net = make_net(seed=4, hidden=(5, 5))
    x = np.random.default_rng(3).random((16, 4))
    targets = np.random.default_rng(4).random((16, 3))
    grads = ng.probe_gradients(net, 0, 8, x, targets=targets, seed=5)
    assert len(grads) == 8
    plan = ng.svod_allocate(net, 7, 8, x, targets=targets, seed=6)
    assert sum(plan) == 7
    assert len(plan) == 2


def test_ras_allocate_budget():
    plan = ng.ras_allocate(10, 3, seed=7)
    assert sum(plan) == 10


def test_train_and_inactivity_on_blobs():
    x, labels = ng.synthetic_blobs(3, 32, 5, 0.05, 8)
    net = make_net(seed=5, hidden=(8,), in_dim=5, out_dim=3, head=ng.OutputHead.logits)
    metrics = ng.train(net, x, labels=labels, epochs=20, batch_size=16,
                       lr=1e-2, loss=ng.LossKind.softmax_ce, seed=9, n_classes=3)
    assert len(metrics) == 20
    assert metrics[-1][1] > metrics[0][1] or metrics[-1][1] == 1.0  # accuracy improves

    report = ng.measure_inactivity(net, x)
    assert report["total_neurons"] == 8
    assert 0 <= report["inactive_total"] <= 8


def test_grad_check_small():
    net = make_net(seed=6, hidden=(4,), in_dim=3, out_dim=2)
    x = np.random.default_rng(5).random((3, 3)) + 0.1
    targets = np.random.default_rng(6).random((3, 2))
    assert ng.grad_check(net, x, targets=targets) < 1e-5


def test_save_load_round_trip(tmp_path):
    net = make_net(seed=7)
    x = np.random.default_rng(7).random((4, 4))
    path = str(tmp_path / "net.ngrow")
    ng.save_network(net, path)
    back = ng.load_network(path)
    np.testing.assert_array_equal(back.forward(x), net.forward(x))


def test_load_network_rejects_garbage(tmp_path):
    path = tmp_path / "junk.ngrow"
    path.write_bytes(b"not a network")
    with pytest.raises(Exception, match="magic"):
        ng.load_network(str(path))
