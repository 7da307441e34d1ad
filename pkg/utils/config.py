import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

############# Run Configuration ###############
# Uses environment variables from .env file, with local defaults
profile = os.getenv("PUPS_PROFILE", "toy")
out_dir = os.getenv("PUPS_OUT_DIR", "runs")
workers = int(os.getenv("PUPS_WORKERS", "4"))
log_level = os.getenv("PUPS_LOG_LEVEL", "INFO")
taxonomy_name = os.getenv("PUPS_TAXONOMY", "toy")

############## Checkpoint Format ###############
checkpoint_magic = b"PUPS"
checkpoint_version = 1

####################### Profile Defaults #########################
# Section-wise defaults; a run config document overrides these key by key.
PROFILES = {
    "toy": {
        "model": {"channels": 32, "classifiers": 16, "stages": 3, "heads": 4, "hidden": 32, "neighbors": 16, "refine": True},
        "loss": {"alpha": 4.0, "beta": 1.0, "gamma": 1.0, "focal_gamma": 2.0, "focal_alpha": 0.25},
        "optim": {"lr": 0.002, "weight_decay": 0.05, "epochs": 6, "batch_size": 4, "lr_milestone": 4, "lr_decay": 0.1, "grad_clip": 10.0},
        "data": {"train_scenes": 2000, "val_scenes": 200},
        "augment": {"flip": True, "rotate": True, "scale": True, "scale_range": [0.95, 1.05]},
        "cutmix": {"enabled": True, "mode": "context", "samples_per_class": {2: 1, 3: 2}, "max_attempts": 10, "min_separation": 1.0, "random_yaw": True},
    },
    "full": {
        "model": {"channels": 128, "classifiers": 100, "stages": 3, "heads": 8, "hidden": 128, "neighbors": 16, "refine": True},
        "loss": {"alpha": 4.0, "beta": 1.0, "gamma": 1.0, "focal_gamma": 2.0, "focal_alpha": 0.25},
        "optim": {"lr": 0.002, "weight_decay": 0.05, "epochs": 80, "batch_size": 4, "lr_milestone": 50, "lr_decay": 0.1, "grad_clip": 10.0},
        "data": {"train_scenes": 19000, "val_scenes": 4000},
        "augment": {"flip": True, "rotate": True, "scale": True, "scale_range": [0.95, 1.05]},
        "cutmix": {"enabled": True, "mode": "context", "samples_per_class": {2: 1, 3: 1}, "max_attempts": 10, "min_separation": 1.0, "random_yaw": True},
    },
}
