import numpy as np
import pytest

from autodiff import Tensor
from autodiff.gradcheck import max_gradient_error
from decoder.models.model import ClassifierBank, RefineStageParams
from decoder.service.decoder import (
    attention_heads,
    classifier_self_attention,
    decode,
    grouping_scores,
    momentum_update,
    query_features,
    semantic_scores,
)
from utils.exceptions import CapacityError, DimensionError


def _close_gate(params: RefineStageParams) -> None:
    params.phi1.weight.values[...] = 0.0
    params.phi1.bias.values[...] = -50.0
    params.out.weight.values[...] = 0.0
    params.out.bias.values[...] = 0.0


# ==================== Score heads ====================

def test_grouping_scores_examples():
    g = grouping_scores(Tensor([[1.0, 0.0]]), Tensor([[1.0, 0.0], [0.0, 1.0]])).values
    assert g[0, 0] == pytest.approx(0.7310585786, abs=1e-10)
    assert g[0, 1] == 0.5
    assert np.all(grouping_scores(Tensor(np.zeros((3, 4))), Tensor(np.ones((5, 4)))).values == 0.5)


def test_semantic_scores_examples():
    assert semantic_scores(Tensor([[1.0, 1.0]]), Tensor([[1.0, 1.0]])).values[0, 0] == pytest.approx(0.8807970780, abs=1e-10)
    out = semantic_scores(Tensor(np.zeros((5, 3))), Tensor(np.ones((2, 3)))).values
    assert out.shape == (2, 5) and np.all(out == 0.5)
    with pytest.raises(DimensionError):
        semantic_scores(Tensor(np.zeros((5, 3))), Tensor(np.ones((2, 4))))


def test_query_features_examples():
    F = Tensor([[2.0, 4.0], [6.0, 8.0]])
    assert np.array_equal(query_features(Tensor([[1.0, 0.0]]), F).values, [[1.0, 2.0]])
    assert np.allclose(query_features(Tensor([[1.0, 1.0]]), F).values, F.values.mean(axis=0))
    assert np.array_equal(query_features(Tensor([[0.0, 0.0]]), F).values, [[0.0, 0.0]])


# ==================== Refinement ====================

def test_momentum_midpoint(rng):
    params = RefineStageParams(4, 2, rng)
    params.phi1.weight.values[...] = 0.0
    params.phi1.bias.values[...] = 0.0
    f_theta = Tensor(rng.normal(size=(3, 4)))
    theta = Tensor(rng.normal(size=(3, 4)))
    expected = 0.5 * params.phi2(f_theta).values + 0.5 * theta.values
    assert np.allclose(momentum_update(f_theta, theta, params).values, expected)


def test_momentum_gate_limits(rng):
    params = RefineStageParams(4, 2, rng)
    f_theta = Tensor(rng.normal(size=(3, 4)))
    theta = Tensor(rng.normal(size=(3, 4)))
    params.phi1.weight.values[...] = 0.0
    params.phi1.bias.values[...] = -60.0
    assert np.allclose(momentum_update(f_theta, theta, params).values, theta.values)
    params.phi1.bias.values[...] = 60.0
    assert np.allclose(momentum_update(f_theta, theta, params).values, params.phi2(f_theta).values)


def test_attention_rows_sum_to_one(rng):
    params = RefineStageParams(8, 4, rng)
    _, weights = attention_heads(Tensor(rng.normal(size=(6, 8))), params)
    assert len(weights) == 4
    for w in weights:
        assert w.shape == (6, 6)
        assert np.allclose(w.sum(axis=1), 1.0)


def test_single_classifier_attends_to_itself(rng):
    params = RefineStageParams(4, 2, rng)
    _, weights = attention_heads(Tensor(rng.normal(size=(1, 4))), params)
    assert all(w[0, 0] == 1.0 for w in weights)


def test_identical_classifiers_stay_identical(rng):
    params = RefineStageParams(6, 3, rng)
    row = rng.normal(size=6)
    out = classifier_self_attention(Tensor(np.stack([row, row, rng.normal(size=6)])), params).values
    assert np.allclose(out[0], out[1])


def test_heads_must_divide_channels(rng):
    with pytest.raises(DimensionError):
        RefineStageParams(6, 4, rng)


def test_bank_needs_room_for_things(rng):
    with pytest.raises(CapacityError):
        ClassifierBank(2, 4, 5, n_stuff=2, rng=rng)
    bank = ClassifierBank(6, 4, 5, n_stuff=2, rng=rng)
    assert list(bank.reserved_slots()) == [4, 5]


# ==================== Decode ====================

@pytest.mark.parametrize("S", [1, 2, 3, 4, 5])
def test_one_output_per_stage(rng, S):
    bank = ClassifierBank(5, 4, 3, rng=rng)
    stages = [RefineStageParams(4, 2, rng) for _ in range(S)]
    outputs = decode(Tensor(rng.normal(size=(9, 4))), bank, stages)
    assert len(outputs) == S
    for out in outputs:
        assert out.grouping_scores.shape == (5, 9)
        assert out.semantic_scores.shape == (5, 3)
        assert np.all((out.grouping_scores.values > 0) & (out.grouping_scores.values < 1))


def test_closed_gate_keeps_initial_scores(rng):
    bank = ClassifierBank(5, 4, 3, rng=rng)
    stages = [RefineStageParams(4, 2, rng) for _ in range(3)]
    for params in stages:
        _close_gate(params)
    initial = []
    outputs = decode(Tensor(rng.normal(size=(9, 4))), bank, stages, initial=initial)
    for out in outputs:
        assert np.allclose(out.grouping_scores.values, initial[0].grouping_scores.values, atol=1e-12)
        assert np.allclose(out.semantic_scores.values, initial[0].semantic_scores.values, atol=1e-12)


def test_without_refinement_every_stage_repeats_stage_zero(rng):
    bank = ClassifierBank(5, 4, 3, rng=rng)
    stages = [RefineStageParams(4, 2, rng) for _ in range(3)]
    outputs = decode(Tensor(rng.normal(size=(9, 4))), bank, stages, refine_classifiers=False)
    assert len(outputs) == 3
    assert all(np.array_equal(o.grouping_scores.values, outputs[0].grouping_scores.values) for o in outputs)


def test_permuting_the_classifiers_permutes_every_stage(rng):
    bank = ClassifierBank(6, 4, 3, rng=rng)
    stages = [RefineStageParams(4, 2, rng) for _ in range(3)]
    features = Tensor(rng.normal(size=(9, 4)))
    perm = rng.permutation(6)
    permuted = ClassifierBank(6, 4, 3, rng=rng)
    permuted.theta.values[...] = bank.theta.values[perm]
    permuted.psi.values[...] = bank.psi.values

    for out, out_p in zip(decode(features, bank, stages), decode(features, permuted, stages)):
        assert np.allclose(out_p.grouping_logits.values, out.grouping_logits.values[perm], atol=1e-10)
        assert np.allclose(out_p.semantic_logits.values, out.semantic_logits.values[perm], atol=1e-10)
        assert np.allclose(out_p.refined_theta.values, out.refined_theta.values[perm], atol=1e-10)


def test_decode_needs_a_stage(rng):
    with pytest.raises(DimensionError):
        decode(Tensor(np.ones((3, 4))), ClassifierBank(2, 4, 1, rng=rng), [])


def _decode_gradient_error(seed: int) -> float:
    rng = np.random.default_rng(seed)
    bank = ClassifierBank(4, 6, 3, rng=rng)
    stages = [RefineStageParams(6, 2, rng) for _ in range(2)]
    features = Tensor(rng.normal(size=(8, 6)))
    wg = Tensor(rng.normal(size=(4, 8)))
    ws = Tensor(rng.normal(size=(4, 3)))

    def loss():
        last = decode(features, bank, stages)[-1]
        return (last.grouping_scores * wg).sum() + (last.semantic_scores * ws).sum()

    params = bank.parameters() + [p for s in stages for p in s.parameters()]
    return max_gradient_error(loss, params)


@pytest.mark.parametrize("seed", range(3))
def test_decode_gradient_matches_finite_differences(seed):
    assert _decode_gradient_error(seed) < 1e-4


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_decode_gradient_over_many_seeds(seed):
    assert _decode_gradient_error(seed) < 1e-4
