"""Neural core: gradient oracles, optimizer algebra, checkpoints."""

import math

import numpy as np
import pytest

from asvnav.networks import Actor, QuantileCritic, ValueNet
from asvnav.nn import (
    Adam,
    Dense,
    DivergenceError,
    cosine_embed,
    hard_update,
    load_checkpoint,
    load_params,
    params_dict,
    save_checkpoint,
    soft_update,
    zero_grads,
)
from gradcheck import (
    check_activation,
    check_actor,
    check_actor_chain_quantile,
    check_actor_chain_value,
    check_dense,
    check_encoder,
    check_quantile_critic,
    check_value_net,
    make_small_actor,
    make_small_critic,
    _small_obs,
)


def test_cosine_embed_zero_tau():
    out = cosine_embed(np.array([[0.0]]), 64)
    assert np.all(out == 1.0)


def test_cosine_embed_one_tau():
    out = cosine_embed(np.array([[1.0]]), 8)[0, 0]
    assert out == pytest.approx([1, -1, 1, -1, 1, -1, 1, -1])


def test_cosine_embed_half_tau():
    out = cosine_embed(np.array([[0.5]]), 4)[0, 0]
    assert out[2] == pytest.approx(-1.0)


def test_cosine_embed_rejects_out_of_range():
    with pytest.raises(ValueError):
        cosine_embed(np.array([1.5]), 8)
    with pytest.raises(ValueError):
        cosine_embed(np.array([-0.1]), 8)


def test_dense_gradients_match_fd():
    assert check_dense(cases=30) < 1e-6


def test_relu_gradients_match_fd():
    assert check_activation("relu", cases=30) < 1e-6


def test_tanh_gradients_match_fd():
    assert check_activation("tanh", cases=30) < 1e-6


def test_encoder_gradients_match_fd():
    assert check_encoder(cases=20) < 1e-6


def test_quantile_critic_gradients_match_fd():
    assert check_quantile_critic(cases=15) < 1e-6


def test_value_net_gradients_match_fd():
    assert check_value_net(cases=15) < 1e-6


def test_actor_gradients_match_fd():
    assert check_actor(cases=15) < 1e-6


def test_actor_chain_gradients_match_fd():
    assert check_actor_chain_quantile(cases=10) < 1e-4
    assert check_actor_chain_value(cases=10) < 1e-4


def test_linear_net_matches_closed_form():
    # no activation in the loop: dW of sum(x W + b) is x^T 1, db is 1
    rng = np.random.default_rng(0)
    layer = Dense(3, 2, rng)
    x = rng.normal(size=(4, 3))
    layer.forward(x)
    layer.backward(np.ones((4, 2)))
    assert layer.dW == pytest.approx(x.T @ np.ones((4, 2)))
    assert layer.db == pytest.approx(np.full(2, 4.0))


def test_zero_output_gradient_gives_zero_param_gradients():
    rng = np.random.default_rng(1)
    net = make_small_critic(rng)
    ego, objs, mask = _small_obs(rng)
    taus = rng.uniform(0.0, 1.0, size=(2, 3))
    action = rng.uniform(-1, 1, size=(2, 2))
    net.forward(ego, objs, mask, taus, action)
    zero_grads(net)
    da = net.backward(np.zeros((2, 3, 1)))
    assert np.all(da == 0.0)
    for _, _, g in net.param_items():
        assert np.all(g == 0.0)


def test_zero_weights_zero_critic_output():
    rng = np.random.default_rng(2)
    net = make_small_critic(rng)
    for _, p, _ in net.param_items():
        p[:] = 0.0
    ego, objs, mask = _small_obs(rng)
    taus = rng.uniform(0.0, 1.0, size=(2, 3))
    action = rng.uniform(-1, 1, size=(2, 2))
    out = net.forward(ego, objs, mask, taus, action)
    assert np.all(out == 0.0)


def test_actor_output_strictly_bounded():
    rng = np.random.default_rng(3)
    net = make_small_actor(rng)
    for _, p, _ in net.param_items():
        p[:] = rng.normal(size=p.shape)
    ego, objs, mask = _small_obs(rng)
    a = net.forward(ego, objs, mask)
    assert np.all(np.abs(a) < 1000.0)


def test_forward_purity():
    rng = np.random.default_rng(4)
    net = make_small_critic(rng)
    ego, objs, mask = _small_obs(rng)
    taus = rng.uniform(0.0, 1.0, size=(2, 3))
    action = rng.uniform(-1, 1, size=(2, 2))
    a = net.forward(ego, objs, mask, taus, action)
    b = net.forward(ego, objs, mask, taus, action)
    assert np.array_equal(a, b)


def test_critic_action_input_contract():
    rng = np.random.default_rng(5)
    net = make_small_critic(rng, action_dim=2)
    ego, objs, mask = _small_obs(rng)
    taus = rng.uniform(0.0, 1.0, size=(2, 3))
    with pytest.raises(ValueError):
        net.forward(ego, objs, mask, taus)
    discrete = make_small_critic(rng, action_dim=0, n_out=5)
    with pytest.raises(ValueError):
        discrete.forward(ego, objs, mask, taus, np.zeros((2, 2)))


def test_dense_shape_mismatch_rejected():
    rng = np.random.default_rng(6)
    layer = Dense(3, 2, rng)
    with pytest.raises(ValueError):
        layer.forward(np.zeros((4, 5)))


def test_adam_zero_gradient_leaves_params_unchanged():
    rng = np.random.default_rng(7)
    net = make_small_actor(rng)
    before = {n: p.copy() for n, p, _ in net.param_items()}
    opt = Adam(net, lr=1e-3)
    zero_grads(net)
    opt.step()
    opt.step()
    for n, p, _ in net.param_items():
        assert np.array_equal(p, before[n])


def test_adam_moves_against_gradient():
    rng = np.random.default_rng(8)
    layer = Dense(1, 1, rng)

    class W:
        def param_items(self):
            yield from layer.param_items("l")

    opt = Adam(W(), lr=1e-2)
    history = [float(layer.W[0, 0])]
    for _ in range(20):
        layer.dW[:] = 1.0   # constant positive gradient
        layer.db[:] = 0.0
        opt.step()
        history.append(float(layer.W[0, 0]))
    assert all(b < a for a, b in zip(history, history[1:]))


def test_adam_deterministic_across_twins():
    nets = []
    for _ in range(2):
        rng = np.random.default_rng(9)
        nets.append(make_small_actor(rng))
    opts = [Adam(n, lr=1e-3) for n in nets]
    rng = np.random.default_rng(10)
    ego, objs, mask = _small_obs(rng)
    r = rng.normal(size=(2, 2))
    for net, opt in zip(nets, opts):
        net.forward(ego, objs, mask)
        zero_grads(net)
        net.backward(r)
        opt.step()
    for (na, pa, _), (nb, pb, _) in zip(nets[0].param_items(),
                                        nets[1].param_items()):
        assert np.array_equal(pa, pb)


def test_adam_raises_on_nonfinite_gradient():
    rng = np.random.default_rng(11)
    layer = Dense(2, 2, rng)

    class W:
        def param_items(self):
            yield from layer.param_items("l")

    opt = Adam(W(), lr=1e-3)
    layer.dW[0, 0] = np.nan
    with pytest.raises(DivergenceError):
        opt.step()


def test_soft_update_blends():
    rng = np.random.default_rng(12)
    online = Dense(2, 2, rng)
    target = Dense(2, 2, rng)

    class W:
        def __init__(self, l):
            self.l = l

        def param_items(self):
            yield from self.l.param_items("l")

    online.W[:] = 2.0
    target.W[:] = 0.0
    soft_update(W(target), W(online), beta=0.5)
    assert np.all(target.W == 1.0)
    soft_update(W(target), W(online), beta=0.0)
    assert np.all(target.W == 1.0)
    soft_update(W(target), W(online), beta=1.0)
    assert np.all(target.W == 2.0)


def test_hard_update_copies():
    rng = np.random.default_rng(13)
    a = make_small_actor(rng)
    b = make_small_actor(np.random.default_rng(14))
    hard_update(b, a)
    for (_, pa, _), (_, pb, _) in zip(a.param_items(), b.param_items()):
        assert np.array_equal(pa, pb)


def test_fixed_seed_identical_networks():
    a = make_small_critic(np.random.default_rng(15))
    b = make_small_critic(np.random.default_rng(15))
    for (_, pa, _), (_, pb, _) in zip(a.param_items(), b.param_items()):
        assert np.array_equal(pa, pb)


def test_checkpoint_roundtrip(tmp_path):
    rng = np.random.default_rng(16)
    net = make_small_actor(rng)
    path = tmp_path / "net.ckpt"
    meta = {"kind": "actor", "widths": [5]}
    save_checkpoint(str(path), meta, params_dict(net))
    meta2, arrays = load_checkpoint(str(path))
    assert meta2 == meta
    fresh = make_small_actor(np.random.default_rng(99))
    load_params(fresh, arrays)
    ego, objs, mask = _small_obs(rng)
    assert np.array_equal(net.forward(ego, objs, mask),
                          fresh.forward(ego, objs, mask))


def test_checkpoint_bytes_deterministic(tmp_path):
    rng = np.random.default_rng(17)
    net = make_small_critic(rng)
    p1 = tmp_path / "a.ckpt"
    p2 = tmp_path / "b.ckpt"
    save_checkpoint(str(p1), {"kind": "critic"}, params_dict(net))
    save_checkpoint(str(p2), {"kind": "critic"}, params_dict(net))
    assert p1.read_bytes() == p2.read_bytes()


def test_checkpoint_rejects_wrong_magic(tmp_path):
    path = tmp_path / "bogus.ckpt"
    path.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(ValueError):
        load_checkpoint(str(path))


def test_load_params_shape_mismatch(tmp_path):
    rng = np.random.default_rng(18)
    net = make_small_actor(rng)
    arrays = params_dict(net)
    bad = {k: (v if i else np.zeros((1, 1)))
           for i, (k, v) in enumerate(arrays.items())}
    with pytest.raises(ValueError):
        load_params(net, bad)
