import math

import numpy as np
import pytest
import torch

from credgraph.features import META_DIM
from credgraph.temporal import (BiLstm, EngagementAttention, TemporalEncoder,
                                attention_weights, bilstm_encode,
                                engagement_inputs, news_representation,
                                temporal_representation)
from tests.fdcheck import finite_difference_check

F64 = torch.float64


def t64(data):
    return torch.as_tensor(np.asarray(data), dtype=F64)


class TestEngagementInputs:
    def test_empty(self):
        assert engagement_inputs([], []).shape[0] == 0

    def test_single(self):
        out = engagement_inputs([np.ones(4)], [np.array([0.5, 1, 0, 0, 0])])
        assert out.shape == (1, 9)
        assert out[0].numpy() == pytest.approx([1, 1, 1, 1, 0.5, 1, 0, 0, 0])

    def test_order_preserved(self):
        zs = [np.full(2, i) for i in range(3)]
        ms = [np.full(5, 10 + i) for i in range(3)]
        out = engagement_inputs(zs, ms)
        for i in range(3):
            assert out[i, 0].item() == i
            assert out[i, 2].item() == 10 + i


def scalar_lstm_oracle(inputs, w_x, w_h, b, hidden):
    """Plain-python per-element LSTM recurrence (i, f, g, o gate order)."""
    sig = lambda v: 1.0 / (1.0 + math.exp(-v))
    h = [0.0] * hidden
    c = [0.0] * hidden
    outs = []
    for x in inputs:
        gates = []
        for row in range(4 * hidden):
            acc = b[row]
            for k, xv in enumerate(x):
                acc += w_x[row][k] * xv
            for k in range(hidden):
                acc += w_h[row][k] * h[k]
            gates.append(acc)
        new_h, new_c = [], []
        for j in range(hidden):
            i_g = sig(gates[j])
            f_g = sig(gates[hidden + j])
            g_g = math.tanh(gates[2 * hidden + j])
            o_g = sig(gates[3 * hidden + j])
            cj = f_g * c[j] + i_g * g_g
            new_c.append(cj)
            new_h.append(o_g * math.tanh(cj))
        h, c = new_h, new_c
        outs.append(list(h))
    return outs


class TestBiLstm:
    def test_zero_weights_zero_inputs(self):
        lstm = BiLstm(3, 2)
        with torch.no_grad():
            for p in lstm.parameters():
                p.zero_()
        hf, hb = bilstm_encode(torch.zeros(4, 3, dtype=F64), lstm)
        assert not hf.detach().numpy().any()
        assert not hb.detach().numpy().any()

    def test_single_step_directions_agree(self):
        # On a length-1 sequence both directions see the same input, but
        # with independent weights; tie the weights to get equality.
        lstm = BiLstm(3, 2)
        with torch.no_grad():
            lstm.w_x_b.copy_(lstm.w_x_f)
            lstm.w_h_b.copy_(lstm.w_h_f)
            lstm.b_b.copy_(lstm.b_f)
        x = t64([[0.3, -1.0, 0.7]])
        hf, hb = bilstm_encode(x, lstm)
        assert torch.equal(hf[0], hb[0])

    def test_length3_matches_scalar_oracle(self):
        g = torch.Generator().manual_seed(42)
        lstm = BiLstm(3, 2, generator=g)
        x = t64([[0.1, 0.5, -0.2], [1.0, -1.0, 0.3], [0.0, 0.2, 0.9]])
        hf, hb = bilstm_encode(x, lstm)

        w_x = lstm.w_x_f.detach().numpy().tolist()
        w_h = lstm.w_h_f.detach().numpy().tolist()
        b = lstm.b_f.detach().numpy().tolist()
        want_f = scalar_lstm_oracle(x.numpy().tolist(), w_x, w_h, b, 2)
        assert hf.detach().numpy() == pytest.approx(np.array(want_f), abs=1e-10)

        w_x = lstm.w_x_b.detach().numpy().tolist()
        w_h = lstm.w_h_b.detach().numpy().tolist()
        b = lstm.b_b.detach().numpy().tolist()
        want_rev = scalar_lstm_oracle(x.numpy().tolist()[::-1], w_x, w_h, b, 2)
        want_b = np.array(want_rev[::-1])  # index-aligned with inputs
        assert hb.detach().numpy() == pytest.approx(want_b, abs=1e-10)

    def test_empty_sequence_rejected(self):
        lstm = BiLstm(3, 2)
        with pytest.raises(ValueError):
            bilstm_encode(torch.zeros(0, 3, dtype=F64), lstm)

    def test_padding_does_not_leak(self):
        g = torch.Generator().manual_seed(7)
        lstm = BiLstm(2, 2, generator=g)
        x2 = t64([[1.0, 2.0], [3.0, 4.0]])
        hf_solo, hb_solo = bilstm_encode(x2, lstm)
        batch = torch.zeros(1, 5, 2, dtype=F64)
        batch[0, :2] = x2
        hf_pad, hb_pad = lstm(batch, [2])
        assert torch.allclose(hf_pad[0, :2], hf_solo, atol=1e-15)
        assert torch.allclose(hb_pad[0, :2], hb_solo, atol=1e-15)
        assert not hf_pad[0, 2:].detach().numpy().any()


def make_attention(proj_hidden, proj_meta):
    attn = EngagementAttention(len(proj_hidden), len(proj_hidden[0]) if False else 1, META_DIM)
    return attn


class TestAttentionWeights:
    def build(self, d=2, e=1):
        attn = EngagementAttention(d, e, META_DIM)
        with torch.no_grad():
            attn.proj_hidden.copy_(t64([[1.0], [0.0]]))
            attn.proj_meta.zero_()
        return attn

    def test_equal_logits_give_half_half(self):
        attn = self.build()
        w = attention_weights(t64([1.0, 0.0]), t64([[0.4], [0.4]]),
                              torch.zeros(2, META_DIM, dtype=F64), attn)
        assert w.detach().numpy() == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_one_zero_closed_form(self):
        attn = self.build()
        w = attention_weights(t64([1.0, 0.0]), t64([[1.0], [0.0]]),
                              torch.zeros(2, META_DIM, dtype=F64), attn)
        e = math.e
        assert w.detach().numpy() == pytest.approx(
            [e / (e + 1), 1 / (e + 1)], abs=1e-12)
        assert w[0].item() == pytest.approx(0.7311, abs=5e-5)
        assert w[1].item() == pytest.approx(0.2689, abs=5e-5)

    def test_shift_invariance(self):
        # Adding a constant to every logit via the meta projection leaves
        # the weights unchanged.
        attn = self.build()
        with torch.no_grad():
            attn.proj_meta.copy_(t64([[7.0], [0], [0], [0], [0]]))
        hidden = t64([[1.0], [0.0], [0.25]])
        metas_zero = torch.zeros(3, META_DIM, dtype=F64)
        metas_shift = metas_zero.clone()
        metas_shift[:, 0] = 1.0  # adds 7.0 to every logit
        w0 = attention_weights(t64([1.0, 0.0]), hidden, metas_zero, attn)
        w1 = attention_weights(t64([1.0, 0.0]), hidden, metas_shift, attn)
        assert torch.allclose(w0, w1, atol=1e-12)

    def test_weights_sum_to_one(self):
        g = torch.Generator().manual_seed(3)
        attn = EngagementAttention(4, 2, META_DIM, generator=g)
        rng = np.random.default_rng(0)
        for _ in range(20):
            n = int(rng.integers(1, 8))
            w = attention_weights(t64(rng.normal(size=4)),
                                  t64(rng.normal(size=(n, 2))),
                                  t64(rng.normal(size=(n, META_DIM))), attn)
            assert w.sum().item() == pytest.approx(1.0, abs=1e-9)
            assert (w >= 0).all()

    def test_length_mismatch_rejected(self):
        attn = self.build()
        with pytest.raises(ValueError):
            attention_weights(t64([1.0, 0.0]), t64([[1.0]]),
                              torch.zeros(2, META_DIM, dtype=F64), attn)


class TestTemporalRepresentation:
    def test_single_engagement_concatenates_states(self):
        hf = t64([[1.0, 2.0]])
        hb = t64([[3.0, 4.0]])
        v = temporal_representation(t64([1.0]), hf, hb)
        assert v.numpy() == pytest.approx([1, 2, 3, 4])

    def test_zero_engagements_zero_vector(self):
        v = temporal_representation(t64([]), torch.zeros(0, 3, dtype=F64),
                                    torch.zeros(0, 3, dtype=F64))
        assert v.shape == (6,)
        assert not v.numpy().any()

    def test_weighted_sum_oracle(self):
        hf = t64([[1.0, 0.0], [0.0, 2.0]])
        hb = t64([[4.0, 4.0], [-4.0, 0.0]])
        v = temporal_representation(t64([0.25, 0.75]), hf, hb)
        # hand-computed: 0.25*[1,0]+0.75*[0,2] ; 0.25*[4,4]+0.75*[-4,0]
        assert v.numpy() == pytest.approx([0.25, 1.5, -2.0, 1.0])


class TestNewsRepresentation:
    def test_zero_engagements_equals_structural(self):
        z = t64([0.3, -0.4, 0.5])
        out = news_representation(torch.zeros(3, dtype=F64), z)
        assert torch.equal(out, z)

    def test_zero_structural_equals_temporal(self):
        v = t64([1.0, 2.0, 3.0])
        out = news_representation(v, torch.zeros(3, dtype=F64))
        assert torch.equal(out, v)

    def test_elementwise_sum(self):
        rng = np.random.default_rng(8)
        a, b = rng.normal(size=4), rng.normal(size=4)
        out = news_representation(t64(a), t64(b))
        assert out.numpy() == pytest.approx(a + b)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            news_representation(torch.zeros(4, dtype=F64), torch.zeros(6, dtype=F64))


class TestTemporalEncoderBatch:
    def test_zero_length_rows_give_zero_output(self):
        g = torch.Generator().manual_seed(1)
        enc = TemporalEncoder(4, 2, META_DIM, generator=g)
        user_emb = torch.zeros(2, 3, 4, dtype=F64)
        user_emb[1] = torch.randn(3, 4, generator=g, dtype=F64)
        metas = torch.zeros(2, 3, META_DIM, dtype=F64)
        v, w = enc(user_emb, metas, [0, 3], torch.randn(2, 4, generator=g, dtype=F64))
        assert not v[0].detach().numpy().any()
        assert not w[0].detach().numpy().any()
        assert w[1].sum().item() == pytest.approx(1.0, abs=1e-9)

    def test_mismatched_hidden_dim_rejected(self):
        with pytest.raises(ValueError):
            TemporalEncoder(5, 2, META_DIM)

    def test_gradients_match_finite_differences(self):
        g = torch.Generator().manual_seed(9)
        enc = TemporalEncoder(4, 2, META_DIM, generator=g)
        user_emb = torch.randn(2, 3, 4, generator=g, dtype=F64)
        metas = torch.rand(2, 3, META_DIM, generator=g, dtype=F64)
        z_struct = torch.randn(2, 4, generator=g, dtype=F64)
        probe_v = torch.randn(2, 4, generator=g, dtype=F64)
        probe_w = torch.randn(2, 3, generator=g, dtype=F64)

        def loss_fn():
            v, w = enc(user_emb, metas, [3, 2], z_struct)
            return (v * probe_v).sum() + (w * probe_w).sum()

        name, err = finite_difference_check(loss_fn, enc)
        assert err <= 1e-4, (name, err)
