import logging
import tempfile
from pathlib import Path

from fastapi import APIRouter, File, Form, HTTPException, UploadFile, status

from scenes.service.taxonomies import PRESETS, get_taxonomy
from utils.exceptions import PupsError
from ..models.model import PQReport
from ..service.evaluator import evaluate_kitti_files

router = APIRouter()
logger = logging.getLogger(__name__)


@router.get("/taxonomies", summary="List the built-in class taxonomies")
async def list_taxonomies():
    out = []
    for name in sorted(PRESETS):
        taxonomy = get_taxonomy(name)
        out.append({
            "name": name,
            "classes": {str(k): v for k, v in taxonomy.class_names.items()},
            "thing_classes": taxonomy.thing_classes,
            "stuff_classes": taxonomy.stuff_classes,
        })
    return out


@router.post(
    "/evaluate",
    response_model=PQReport,
    status_code=status.HTTP_200_OK,
    summary="Score a predicted .label file against a ground-truth .label file",
    description="Both files hold one little-endian uint32 per point (semantic label in the lower 16 bits, instance ID in the upper 16). Returns PQ/SQ/RQ/PQ† with thing and stuff splits.",
)
async def evaluate_labels(
    pred_labels: UploadFile = File(...),
    gt_labels: UploadFile = File(...),
    taxonomy: str = Form("toy"),
    min_points: int = Form(1),
) -> PQReport:
    try:
        tax = get_taxonomy(taxonomy)
    except KeyError as exc:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(exc)) from exc

    with tempfile.TemporaryDirectory() as tmp_dir:
        pred_path = Path(tmp_dir) / "pred.label"
        gt_path = Path(tmp_dir) / "gt.label"
        pred_path.write_bytes(await pred_labels.read())
        gt_path.write_bytes(await gt_labels.read())
        try:
            return evaluate_kitti_files(pred_path, gt_path, tax, min_points=min_points)
        except PupsError as exc:
            logger.error(f"Evaluation of {pred_labels.filename} failed: {exc}")
            raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(exc)) from exc
