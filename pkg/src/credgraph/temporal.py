"""Temporal engagement encoder.

An article's time-ordered engagements (user embedding ++ meta vector) run
through a bidirectional LSTM; per-step attention weights combine the
forward/backward hidden states into the temporal representation, which is
added to the article's structural embedding to form the news
representation. The attention query is the article's structural embedding,
which is available before aggregation.

Articles without engagements get a zero temporal representation, so their
news representation degrades to the structural one.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
import torch
from torch import nn

from .encoder import DTYPE

# LSTM gate order within stacked weights: input, forget, cell, output.


class BiLstm(nn.Module):
    """Manual bidirectional LSTM with zero initial states.

    Backward hidden states are reported index-aligned with the inputs:
    row i of the backward sequence is the state after consuming inputs
    n-1, ..., i.
    """

    def __init__(self, input_dim: int, hidden_dim: int,
                 generator: Optional[torch.Generator] = None):
        super().__init__()
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        bound = 1.0 / math.sqrt(hidden_dim)

        def uniform(*shape):
            t = torch.empty(*shape, dtype=DTYPE)
            t.uniform_(-bound, bound, generator=generator)
            return nn.Parameter(t)

        self.w_x_f = uniform(4 * hidden_dim, input_dim)
        self.w_h_f = uniform(4 * hidden_dim, hidden_dim)
        self.b_f = uniform(4 * hidden_dim)
        self.w_x_b = uniform(4 * hidden_dim, input_dim)
        self.w_h_b = uniform(4 * hidden_dim, hidden_dim)
        self.b_b = uniform(4 * hidden_dim)
        with torch.no_grad():  # forget-gate bias starts at 1
            self.b_f[hidden_dim:2 * hidden_dim] = 1.0
            self.b_b[hidden_dim:2 * hidden_dim] = 1.0

    def _run(self, x: torch.Tensor, mask: torch.Tensor, w_x, w_h, b) -> torch.Tensor:
        batch, steps, _ = x.shape
        e = self.hidden_dim
        h = torch.zeros(batch, e, dtype=x.dtype)
        c = torch.zeros(batch, e, dtype=x.dtype)
        outs = []
        for t in range(steps):
            gates = x[:, t] @ w_x.T + h @ w_h.T + b
            i = torch.sigmoid(gates[:, 0:e])
            f = torch.sigmoid(gates[:, e:2 * e])
            g = torch.tanh(gates[:, 2 * e:3 * e])
            o = torch.sigmoid(gates[:, 3 * e:4 * e])
            m = mask[:, t:t + 1].to(x.dtype)
            c = m * (f * c + i * g) + (1 - m) * c
            h_new = o * torch.tanh(c)
            h = m * h_new + (1 - m) * h
            outs.append(m * h_new)
        return torch.stack(outs, dim=1)

    @staticmethod
    def _reverse_padded(x: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        batch, steps = x.shape[0], x.shape[1]
        pos = torch.arange(steps).expand(batch, steps)
        lens = lengths[:, None]
        idx = torch.where(pos < lens, lens - 1 - pos, pos)
        return torch.gather(x, 1, idx[..., None].expand_as(x))

    def forward(self, x: torch.Tensor, lengths) -> tuple[torch.Tensor, torch.Tensor]:
        """x: (batch, steps, input_dim); returns index-aligned (Hf, Hb),
        zeroed past each sequence's length."""
        if not isinstance(lengths, torch.Tensor):
            lengths = torch.as_tensor(np.asarray(lengths), dtype=torch.long)
        steps = x.shape[1]
        mask = torch.arange(steps)[None, :] < lengths[:, None]
        h_fwd = self._run(x, mask, self.w_x_f, self.w_h_f, self.b_f)
        x_rev = self._reverse_padded(x, lengths)
        h_rev = self._run(x_rev, mask, self.w_x_b, self.w_h_b, self.b_b)
        h_bwd = self._reverse_padded(h_rev, lengths)
        return h_fwd, h_bwd


class EngagementAttention(nn.Module):
    """Per-engagement softmax weights from the article query, the combined
    hidden state, and the engagement meta vector."""

    def __init__(self, article_dim: int, hidden_dim: int, meta_dim: int,
                 generator: Optional[torch.Generator] = None):
        super().__init__()
        bound = 1.0 / math.sqrt(hidden_dim)

        def uniform(*shape):
            t = torch.empty(*shape, dtype=DTYPE)
            t.uniform_(-bound, bound, generator=generator)
            return nn.Parameter(t)

        self.proj_hidden = uniform(article_dim, hidden_dim)   # query-key map
        self.proj_meta = uniform(meta_dim, 1)

    def logits(self, query: torch.Tensor, hidden: torch.Tensor,
               metas: torch.Tensor) -> torch.Tensor:
        # query: (batch, d); hidden: (batch, steps, e); metas: (batch, steps, l)
        qm = query @ self.proj_hidden                      # (batch, e)
        return torch.einsum("be,ble->bl", qm, hidden) + (metas @ self.proj_meta)[..., 0]

    def forward(self, query, hidden, metas, mask) -> torch.Tensor:
        """Masked, max-stabilized softmax over steps; zero-length rows get
        all-zero weights."""
        logit = self.logits(query, hidden, metas)
        neg_inf = torch.tensor(float("-inf"), dtype=logit.dtype)
        logit = torch.where(mask, logit, neg_inf)
        any_valid = mask.any(dim=1, keepdim=True)
        stable = logit - torch.where(
            any_valid, logit.max(dim=1, keepdim=True).values, torch.zeros_like(any_valid, dtype=logit.dtype))
        expw = torch.where(mask, torch.exp(stable), torch.zeros_like(stable))
        denom = expw.sum(dim=1, keepdim=True).clamp(min=1e-300)
        return torch.where(any_valid, expw / denom, torch.zeros_like(expw))


class TemporalEncoder(nn.Module):
    """BiLstm + attention; maps padded engagement batches to temporal
    representations of dimension 2 * hidden_dim."""

    def __init__(self, article_dim: int, hidden_dim: int, meta_dim: int,
                 generator: Optional[torch.Generator] = None):
        super().__init__()
        if 2 * hidden_dim != article_dim:
            raise ValueError(
                f"temporal output 2*{hidden_dim} must equal article dim {article_dim}")
        self.lstm = BiLstm(article_dim + meta_dim, hidden_dim, generator)
        self.attention = EngagementAttention(article_dim, hidden_dim, meta_dim, generator)

    def forward(self, user_emb: torch.Tensor, metas: torch.Tensor, lengths,
                z_struct: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """user_emb: (batch, steps, d); metas: (batch, steps, meta);
        z_struct: (batch, d). Returns (v_temp (batch, 2e), weights)."""
        if not isinstance(lengths, torch.Tensor):
            lengths = torch.as_tensor(np.asarray(lengths), dtype=torch.long)
        x = torch.cat([user_emb, metas], dim=2)
        h_fwd, h_bwd = self.lstm(x, lengths)
        mask = torch.arange(x.shape[1])[None, :] < lengths[:, None]
        weights = self.attention(z_struct, h_fwd + h_bwd, metas, mask)
        v_fwd = torch.einsum("bl,ble->be", weights, h_fwd)
        v_bwd = torch.einsum("bl,ble->be", weights, h_bwd)
        return torch.cat([v_fwd, v_bwd], dim=1), weights


# ---------------------------------------------------------------------------
# Single-sequence functional forms (the shapes the contracts are stated in)
# ---------------------------------------------------------------------------

def engagement_inputs(user_embeddings: Sequence[torch.Tensor],
                      metas: Sequence[np.ndarray]) -> torch.Tensor:
    """Concatenate each engaged user's embedding with its meta vector,
    preserving sequence order. Empty sequences give an empty tensor."""
    if len(user_embeddings) != len(metas):
        raise ValueError("embedding/meta length mismatch")
    if len(user_embeddings) == 0:
        return torch.empty(0, 0, dtype=DTYPE)
    rows = [
        torch.cat([torch.as_tensor(z, dtype=DTYPE),
                   torch.as_tensor(m, dtype=DTYPE)])
        for z, m in zip(user_embeddings, metas)
    ]
    return torch.stack(rows)


def bilstm_encode(inputs: torch.Tensor, lstm: BiLstm) -> tuple[torch.Tensor, torch.Tensor]:
    """Run one unpadded sequence (steps, input_dim) through the BiLstm."""
    if inputs.shape[0] == 0:
        raise ValueError("empty engagement sequence")
    h_fwd, h_bwd = lstm(inputs[None], [inputs.shape[0]])
    return h_fwd[0], h_bwd[0]


def attention_weights(query: torch.Tensor, hidden: torch.Tensor,
                      metas: torch.Tensor, attn: EngagementAttention) -> torch.Tensor:
    """Softmax attention over one sequence; ``hidden`` is the combined
    (forward + backward) state sequence."""
    if hidden.shape[0] != metas.shape[0]:
        raise ValueError("hidden/meta length mismatch")
    if hidden.shape[0] == 0:
        raise ValueError("empty sequence")
    mask = torch.ones(1, hidden.shape[0], dtype=torch.bool)
    return attn(query[None], hidden[None], metas[None], mask)[0]


def temporal_representation(weights: torch.Tensor, h_fwd: torch.Tensor,
                            h_bwd: torch.Tensor) -> torch.Tensor:
    """Attention-weighted sums of forward and backward states, concatenated.
    An empty sequence yields the zero vector (dimension from the states)."""
    if h_fwd.shape != h_bwd.shape or weights.shape[0] != h_fwd.shape[0]:
        raise ValueError("misaligned attention inputs")
    if h_fwd.shape[0] == 0:
        return torch.zeros(2 * h_fwd.shape[1] if h_fwd.dim() == 2 else 0, dtype=DTYPE)
    return torch.cat([weights @ h_fwd, weights @ h_bwd])


def news_representation(v_temp: torch.Tensor, z_struct: torch.Tensor) -> torch.Tensor:
    """Elementwise sum of the temporal and structural representations."""
    if v_temp.shape != z_struct.shape:
        raise ValueError(f"dimension mismatch {tuple(v_temp.shape)} vs {tuple(z_struct.shape)}")
    return v_temp + z_struct
