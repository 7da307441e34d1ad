import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from panoptic.api.api import router as panoptic_router
from utils import config as settings

logging.basicConfig(level=getattr(logging, settings.log_level.upper(), logging.INFO))

# Allow CORS (if needed)
origins = ["*"]
app = FastAPI(
    title="PUPS panoptic evaluation",
    openapi_tags=[
        {
            "name": "panoptic",
            "description": "Panoptic quality (PQ, SQ, RQ, PQ†) of predicted SemanticKITTI .label files against ground truth, for the built-in class taxonomies."
        }
    ]
)
app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(panoptic_router, prefix="/panoptic", tags=["panoptic"])


@app.get("/health")
async def health_check():
    return {"status": "healthy", "service": "pups-panoptic"}


@app.get("/")
async def root():
    return {
        "message": "Point-level panoptic segmentation evaluation service",
        "endpoints": {
            "evaluate": "/panoptic/evaluate",
            "taxonomies": "/panoptic/taxonomies",
            "health_check": "/health"
        }
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("main:app", host="0.0.0.0", port=8000)
