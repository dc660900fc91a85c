import csv
import json
import logging
import os

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")
HAMILTONIAN_DIR = os.path.join(DATA_DIR, "hamiltonians")
FCIDUMP_DIR = os.path.join(DATA_DIR, "fcidump")
CODE_DIR = os.path.join(DATA_DIR, "codes")


def save_json(data, filepath):
    """Saves data to a JSON file, creating the parent directory if needed."""
    parent = os.path.dirname(os.path.abspath(filepath))
    os.makedirs(parent, exist_ok=True)
    with open(filepath, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=4)
    logger.debug("Data saved to %s", filepath)


def load_json(filepath):
    """Loads data from a JSON file; None when missing or unreadable."""
    if not os.path.exists(filepath):
        logger.debug("File not found: %s", filepath)
        return None
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            return json.load(f)
    except IOError as e:
        logger.error("Error loading JSON from %s: %s", filepath, e)
    except json.JSONDecodeError as e:
        logger.error("Error decoding JSON from %s: %s", filepath, e)
    return None


def save_csv(rows, header, filepath):
    """Writes rows (sequences) under a header line."""
    parent = os.path.dirname(os.path.abspath(filepath))
    os.makedirs(parent, exist_ok=True)
    with open(filepath, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


# --- Code artifacts ---
def code_artifact_path(name):
    return os.path.join(CODE_DIR, f"{name}.json")


def save_code_artifact(artifact, filepath):
    save_json(artifact, filepath)


def load_code_artifact(filepath):
    data = load_json(filepath)
    if data is None:
        raise FileNotFoundError(f"No readable code artifact at {filepath}")
    if not isinstance(data, dict):
        raise ValueError(f"Code artifact {filepath} is not a JSON object")
    return data


# --- Hamiltonian files ---
def hamiltonian_path(name):
    """Resolve a bundled Hamiltonian by name ('hubbard_dimer') or return a path unchanged."""
    if os.path.exists(name):
        return name
    for directory, suffix in ((HAMILTONIAN_DIR, ".ham"), (FCIDUMP_DIR, ".fcidump")):
        candidate = os.path.join(directory, f"{name}{suffix}")
        if os.path.exists(candidate):
            return candidate
    return name


def list_available_hamiltonians():
    """Names of bundled native Hamiltonian and FCIDUMP files."""
    names = []
    for directory, suffix in ((HAMILTONIAN_DIR, ".ham"), (FCIDUMP_DIR, ".fcidump")):
        if os.path.exists(directory):
            names.extend(f[: -len(suffix)] for f in os.listdir(directory) if f.endswith(suffix))
    return sorted(names)


if __name__ == '__main__':
    logging.basicConfig(level=logging.DEBUG)
    print("Available Hamiltonians:", list_available_hamiltonians())
    print("hubbard_dimer ->", hamiltonian_path("hubbard_dimer"))
