import itertools
import math

import numpy as np
import pytest

from autodiff import Tensor
from autodiff import functional as F
from autodiff.gradcheck import max_gradient_error
from decoder.models.model import StageOutput
from decoder.service.decoder import score_heads
from matching.models.model import Assignment, LossWeights
from matching.service.hungarian import assignment_cost, hungarian_match, solve_assignment
from matching.service.losses import dice_loss, focal_loss, mask_bce_loss
from matching.service.matcher import assign, build_cost_matrix, reserved_slots, stage_loss, supervise, total_loss
from scenes.models.model import GroundTruth
from utils.exceptions import CapacityError, ContractError


def brute_force_minimum(cost: np.ndarray) -> float:
    M, N = cost.shape
    return min(sum(cost[r, c] for r, c in zip(range(M), cols)) for cols in itertools.permutations(range(N), M))


def random_stage(rng, N, K, T, C=4):
    return score_heads(
        Tensor(rng.normal(size=(N, C)), requires_grad=True),
        Tensor(rng.normal(size=(K, C))),
        Tensor(rng.normal(size=(T, C)), requires_grad=True),
    )


def two_car_scene():
    # points 0-3 car A, 4-6 car B, 7-11 road, 12-13 sidewalk
    labels = np.array([0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3])
    return GroundTruth.from_group_labels(labels, np.array([1, 1, 4, 5]))


# ==================== Losses ====================

def test_dice_examples():
    assert dice_loss(Tensor([0.5, 0.5]), np.array([1.0, 0.0])).item() == pytest.approx(0.5, abs=1e-6)
    assert dice_loss(Tensor([1.0, 0.0, 1.0]), np.array([1.0, 0.0, 1.0])).item() == pytest.approx(0.0, abs=1e-6)
    assert dice_loss(Tensor([1.0, 0.0]), np.array([0.0, 1.0])).item() == pytest.approx(1.0, abs=1e-6)


def test_dice_falls_as_the_prediction_moves_towards_the_mask(rng):
    for _ in range(50):
        g = (rng.uniform(size=12) > 0.5).astype(float)
        p0 = rng.uniform(size=12)
        path = [dice_loss(Tensor((1.0 - t) * p0 + t * g), g).item() for t in np.linspace(0.0, 1.0, 21)]
        assert all(later <= earlier + 1e-12 for earlier, later in zip(path, path[1:]))
        assert path[-1] == pytest.approx(0.0, abs=1e-6)


def test_bce_examples():
    assert mask_bce_loss(Tensor(np.zeros(6)), np.array([1, 0, 1, 1, 0, 0.0])).item() == pytest.approx(math.log(2.0))
    assert mask_bce_loss(Tensor([40.0, -40.0]), np.array([1.0, 0.0])).item() == pytest.approx(0.0, abs=1e-12)
    x = np.array([0.3, -1.2, 2.0])
    g = np.array([1.0, 0.0, 1.0])
    assert mask_bce_loss(Tensor(x), g).item() == pytest.approx(mask_bce_loss(Tensor(-x), 1.0 - g).item())


def test_focal_examples():
    assert focal_loss(Tensor([0.0]), 1).item() == pytest.approx(0.25 * 0.25 * math.log(2.0))
    assert focal_loss(Tensor([0.0]), 1).item() == pytest.approx(0.04332, abs=1e-5)
    assert focal_loss(Tensor([30.0, -30.0, -30.0]), 1).item() == pytest.approx(0.0, abs=1e-12)
    assert focal_loss(Tensor([-30.0, -30.0]), None).item() == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ContractError):
        focal_loss(Tensor([0.0, 0.0]), 3)


@pytest.mark.parametrize("seed", range(50))
def test_loss_gradients(seed):
    rng = np.random.default_rng(seed)
    x = Tensor(rng.normal(size=7), requires_grad=True)
    g = (rng.uniform(size=7) > 0.5).astype(float)

    assert max_gradient_error(lambda: dice_loss(F.sigmoid(x), g), [x]) < 1e-4
    assert max_gradient_error(lambda: mask_bce_loss(x, g), [x]) < 1e-4
    assert max_gradient_error(lambda: focal_loss(x, 3), [x]) < 1e-4


# ==================== Hungarian ====================

def test_diagonal_zero_gives_identity():
    cost = np.ones((4, 4)) - np.eye(4)
    assert solve_assignment(cost) == [(0, 0), (1, 1), (2, 2), (3, 3)]


def test_single_row_takes_the_row_minimum():
    assignment = hungarian_match(np.array([[3.0, 1.0, 2.0, 1.0]]))
    assert assignment.pairs == [(0, 1)]
    assert assignment.unmatched == {0, 2, 3}


def test_matches_exhaustive_search():
    rng = np.random.default_rng(0)
    for trial in range(1000):
        N = int(rng.integers(1, 8))
        M = int(rng.integers(1, N + 1))
        cost = rng.integers(0, 20, size=(M, N)).astype(float) if trial % 2 else rng.uniform(size=(M, N))
        assignment = hungarian_match(cost)
        assert len(assignment.pairs) == M
        assert assignment_cost(cost, assignment) == pytest.approx(brute_force_minimum(cost), abs=1e-12)


def test_hungarian_contract_errors():
    with pytest.raises(CapacityError):
        solve_assignment(np.zeros((3, 2)))
    with pytest.raises(ContractError):
        solve_assignment(np.array([[0.0, np.inf]]))
    assert solve_assignment(np.zeros((0, 3))) == []


def test_assignment_rejects_double_use():
    with pytest.raises(ValueError):
        Assignment(n_classifiers=3, pairs=[(0, 1), (1, 1)], unmatched={0, 2})


# ==================== Matcher ====================

def test_reserved_slots_are_last(taxonomy):
    assert reserved_slots(taxonomy, 10) == {4: 8, 5: 9}


def test_cost_matrix_shape_and_entry(rng, taxonomy):
    gt = two_car_scene()
    stage = random_stage(rng, 6, gt.K, taxonomy.T)
    w = LossWeights()
    cost = build_cost_matrix(stage, gt, taxonomy, w)
    assert cost.shape == (2, 4)
    i, j = 2, 1
    expected = (
        w.alpha * dice_loss(stage.grouping_scores[i], gt.masks[j].astype(float)).item()
        + w.beta * focal_loss(stage.semantic_logits[i], 1, w.focal_alpha, w.focal_gamma).item()
        + w.gamma * mask_bce_loss(stage.grouping_logits[i], gt.masks[j].astype(float)).item()
    )
    assert cost[j, i] == pytest.approx(expected, rel=1e-10)


def test_perfect_prediction_costs_nothing(taxonomy):
    gt = two_car_scene()
    logits = np.full((6, gt.K), -40.0)
    logits[3, gt.masks[0]] = 40.0
    sem = np.full((6, taxonomy.T), -40.0)
    sem[3, 0] = 40.0
    stage = StageOutput(
        grouping_logits=Tensor(logits),
        grouping_scores=Tensor(1.0 / (1.0 + np.exp(-logits))),
        semantic_logits=Tensor(sem),
        semantic_scores=Tensor(1.0 / (1.0 + np.exp(-sem))),
        refined_theta=Tensor(np.zeros((6, 4))),
    )
    cost = build_cost_matrix(stage, gt, taxonomy, LossWeights())
    assert cost[0, 3] == pytest.approx(0.0, abs=1e-6)
    assert cost[0].argmin() == 3


def test_stuff_goes_to_reserved_slots(rng, taxonomy):
    gt = two_car_scene()
    stage = random_stage(rng, 6, gt.K, taxonomy.T)
    assignment = assign(stage, gt, taxonomy, LossWeights())
    assert assignment.classifier_of(2) == 4
    assert assignment.classifier_of(3) == 5
    assert {assignment.classifier_of(0), assignment.classifier_of(1)} <= {0, 1, 2, 3}
    cost = build_cost_matrix(stage, gt, taxonomy, LossWeights())
    thing_pairs = [(0, assignment.classifier_of(0)), (1, assignment.classifier_of(1))]
    assert sum(cost[j, i] for j, i in thing_pairs) == pytest.approx(brute_force_minimum(cost))


def test_scene_without_things(rng, taxonomy):
    gt = GroundTruth.from_group_labels(np.array([0, 0, 1, 1, 1]), np.array([5, 4]))
    assignment = assign(random_stage(rng, 4, 5, taxonomy.T), gt, taxonomy, LossWeights())
    assert sorted(assignment.pairs) == [(0, 3), (1, 2)]
    assert assignment.unmatched == {0, 1}


def test_too_many_things_for_the_bank(rng, taxonomy):
    gt = two_car_scene()
    with pytest.raises(CapacityError):
        assign(random_stage(rng, 3, gt.K, taxonomy.T), gt, taxonomy, LossWeights())


def test_hand_composed_single_stage_loss(rng, taxonomy):
    # one car over all points, no stuff present, two classifiers plus the two reserved slots
    gt = GroundTruth.from_group_labels(np.zeros(5, dtype=np.int64), np.array([1]))
    stage = random_stage(rng, 4, 5, taxonomy.T)
    w = LossWeights()
    loss, assignment = stage_loss(stage, gt, taxonomy, w)
    i = assignment.classifier_of(0)
    mask = np.ones(5)
    expected = (
        w.alpha * dice_loss(stage.grouping_scores[i], mask).item()
        + w.gamma * mask_bce_loss(stage.grouping_logits[i], mask).item()
        + w.beta * sum(
            focal_loss(stage.semantic_logits[r], 1 if r == i else None, w.focal_alpha, w.focal_gamma).item()
            for r in range(4)
        )
    )
    assert loss.item() == pytest.approx(expected, rel=1e-10)


def test_loss_ignores_ground_truth_order(rng, taxonomy):
    gt = two_car_scene()
    order = np.array([3, 1, 2, 0])
    shuffled = GroundTruth(masks=gt.masks[order], classes=gt.classes[order])
    stages = [random_stage(rng, 6, gt.K, taxonomy.T) for _ in range(2)]
    w = LossWeights()
    assert total_loss(stages, gt, taxonomy, w).item() == pytest.approx(total_loss(stages, shuffled, taxonomy, w).item(), rel=1e-10)


def test_loss_ignores_the_order_of_thing_classifiers(rng, taxonomy):
    gt = two_car_scene()
    N, C = 6, 4
    features = Tensor(rng.normal(size=(gt.K, C)))
    psi = Tensor(rng.normal(size=(taxonomy.T, C)))
    thetas = [rng.normal(size=(N, C)) for _ in range(2)]
    free = N - len(taxonomy.stuff_classes)
    order = np.concatenate([rng.permutation(free), np.arange(free, N)])
    w = LossWeights()

    stages = [score_heads(Tensor(theta), features, psi) for theta in thetas]
    permuted = [score_heads(Tensor(theta[order]), features, psi) for theta in thetas]
    assert total_loss(permuted, gt, taxonomy, w).item() == pytest.approx(total_loss(stages, gt, taxonomy, w).item(), rel=1e-9)


def test_total_is_mean_of_stage_losses(rng, taxonomy):
    gt = two_car_scene()
    stages = [random_stage(rng, 6, gt.K, taxonomy.T) for _ in range(3)]
    total, per_stage, assignments = supervise(stages, gt, taxonomy, LossWeights())
    assert len(per_stage) == len(assignments) == 3
    assert total.item() == pytest.approx(np.mean([s.item() for s in per_stage]))


def test_void_points_are_not_supervised(rng, taxonomy):
    labels = np.array([0, 0, 0, -1, 1, 1])
    gt = GroundTruth.from_group_labels(labels, np.array([1, 4]))
    stage = random_stage(rng, 5, 6, taxonomy.T)
    loss, _ = stage_loss(stage, gt, taxonomy, LossWeights())
    with_void = loss.item()
    logits = stage.grouping_logits.values.copy()
    logits[:, 3] += 100.0
    moved = stage.model_copy(update={"grouping_logits": Tensor(logits), "grouping_scores": Tensor(1.0 / (1.0 + np.exp(-logits)))})
    assert stage_loss(moved, gt, taxonomy, LossWeights())[0].item() == pytest.approx(with_void)


def test_absent_stuff_slot_only_gets_class_negatives(rng, taxonomy):
    # a car on sidewalk, no road in the scene
    gt = GroundTruth.from_group_labels(np.array([0, 0, 1, 1, 1]), np.array([1, 5]))
    stage = random_stage(rng, 5, 5, taxonomy.T)
    road_slot = reserved_slots(taxonomy, 5)[4]
    loss, _ = stage_loss(stage, gt, taxonomy, LossWeights())

    logits = stage.grouping_logits.values.copy()
    logits[road_slot] = rng.normal(size=5) * 10.0
    moved = stage.model_copy(update={"grouping_logits": Tensor(logits), "grouping_scores": Tensor(1.0 / (1.0 + np.exp(-logits)))})
    assert stage_loss(moved, gt, taxonomy, LossWeights())[0].item() == pytest.approx(loss.item(), rel=1e-12)


@pytest.mark.parametrize("seed", range(50))
def test_total_loss_gradient(seed, taxonomy):
    rng = np.random.default_rng(seed)
    gt = two_car_scene()
    theta = Tensor(rng.normal(size=(6, 4)), requires_grad=True)
    psi = Tensor(rng.normal(size=(taxonomy.T, 4)), requires_grad=True)
    features = Tensor(rng.normal(size=(gt.K, 4)))
    fixed = [assign(score_heads(theta, features, psi), gt, taxonomy, LossWeights())]

    def loss():
        return total_loss([score_heads(theta, features, psi)], gt, taxonomy, LossWeights(), assignments=fixed)

    assert max_gradient_error(loss, [theta, psi]) < 1e-4
