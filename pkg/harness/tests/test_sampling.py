import math

import torch
import torch.nn.functional as F

from cs_harness.sampling import filter_logits


def finite_count(logits):
    return int(torch.isfinite(logits).sum().item())


class TestFilterLogits:
    def test_top_k_keeps_at_most_k(self):
        logits = torch.arange(20, dtype=torch.float)
        filtered = filter_logits(logits, top_k=5, top_p=1.0)
        assert finite_count(filtered) == 5
        assert torch.isfinite(filtered[15:]).all()

    def test_top_p_keeps_minimal_nucleus(self):
        # probabilities 0.5, 0.3, 0.2: nucleus at 0.9 is the first two plus
        # the one that crosses the boundary? mass before token 3 is 0.8 < 0.9,
        # so token 3 survives; nothing after it does
        probs = torch.tensor([0.5, 0.3, 0.15, 0.05])
        logits = probs.log()
        filtered = filter_logits(logits, top_k=0, top_p=0.9)
        assert torch.isfinite(filtered[:3]).all()
        assert not torch.isfinite(filtered[3])

    def test_top_p_always_keeps_the_argmax(self):
        logits = torch.tensor([10.0, -10.0, -10.0])
        filtered = filter_logits(logits, top_k=0, top_p=0.1)
        assert torch.isfinite(filtered[0])
        assert finite_count(filtered) == 1

    def test_mixed_truncation_on_a_logged_step(self):
        torch.manual_seed(0)
        logits = torch.randn(50)
        filtered = filter_logits(logits, top_k=5, top_p=0.9)
        kept = torch.isfinite(filtered)
        # never more than top-k survivors
        assert int(kept.sum().item()) <= 5
        # survivors are exactly the highest-logit tokens among the kept count
        top_idx = torch.topk(logits, int(kept.sum().item())).indices
        assert set(top_idx.tolist()) == set(torch.nonzero(kept).flatten().tolist())
        # all sampling mass lives inside the kept set
        probs = F.softmax(filtered, dim=-1)
        assert math.isclose(float(probs[kept].sum()), 1.0, rel_tol=1e-6)
        draws = torch.multinomial(probs, 200, replacement=True)
        assert kept[draws].all()

    def test_unfiltered_when_k_covers_vocab_and_p_is_one(self):
        logits = torch.randn(10)
        filtered = filter_logits(logits, top_k=10, top_p=1.0)
        assert finite_count(filtered) == 10
