import os
import sys
import json
import logging
from pathlib import Path

# Add the repository root to the Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from schemas.files import ComponentEntry, MixtureFile
from services import storage

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

# Five-component reference mixture, (weight, mean, spread)
REFERENCE_COMPONENTS = [
    (0.2, -2.0, 0.2),
    (0.2, -1.0, 0.075),
    (0.1, 0.0, 0.1),
    (0.3, 1.0, 0.1),
    (0.2, 2.0, 0.1),
]

def reference_mixture(spread_is_variance: bool = True) -> MixtureFile:
    """Reference mixture with its spread read as a variance or as a standard deviation"""
    key = "variance" if spread_is_variance else "stddev"
    return MixtureFile(
        dim=1,
        components=[
            ComponentEntry(**{"weight": w, "mean": [m], key: [s]})
            for w, m, s in REFERENCE_COMPONENTS
        ],
    )

def standard_normal() -> MixtureFile:
    return MixtureFile(dim=1, components=[ComponentEntry(weight=1.0, mean=[0.0], variance=[1.0])])

def example_experiment() -> dict:
    """Small sweep that finishes in a few seconds"""
    return {
        "true_model": json.loads(reference_mixture().json(exclude_none=True)),
        "kappa_bar": 0.5,
        "delta_list": [0.01, 0.1],
        "M_list": [200, 2000],
        "batches_per_cell": 10,
        "seed": 2024,
        "theta_tol": 1e-7,
    }

def main() -> None:
    """Write the reference fixtures under data/"""
    try:
        DATA_DIR.mkdir(parents=True, exist_ok=True)
        fixtures = {
            "reference_mixture.json": reference_mixture().json(indent=2, exclude_none=True),
            "reference_mixture_stddev.json": reference_mixture(False).json(indent=2, exclude_none=True),
            "standard_normal.json": standard_normal().json(indent=2, exclude_none=True),
            "experiment_example.json": json.dumps(example_experiment(), indent=2),
        }
        for name, text in fixtures.items():
            path = storage.write_json(text, DATA_DIR / name)
            logger.info(f"Wrote {path}")
    except Exception as e:
        logger.error(f"Fixture generation failed: {str(e)}")
        raise

if __name__ == "__main__":
    main()
