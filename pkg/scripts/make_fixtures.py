"""Regenerate procedurally built fixture scenes."""
from pathlib import Path

from pebblegraph.generate import shelf_scene
from pebblegraph.scene import dump_scene

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    out = ROOT / "scenes" / "bench" / "shelf20.json"
    out.write_text(dump_scene(shelf_scene()))
    print(f"wrote {out}")
