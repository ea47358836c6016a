"""Rewrite the shipped model files from the example registry.

Run after changing an example; the golden tests compare against these files.
"""

from pathlib import Path

from twistkit.modelfile import format_model_file
from twistkit.zoo import default_examples, skt_non_instanton

OUT = Path(__file__).resolve().parent.parent / "src" / "twistkit" / "models"


def main():
    OUT.mkdir(exist_ok=True)
    examples = default_examples() + [skt_non_instanton(1, 1, base="J")]
    for ex in examples:
        mf = ex.to_model_file()
        path = OUT / f"{mf.name}.model"
        path.write_text(format_model_file(mf))
        print(path.relative_to(OUT.parent.parent.parent))


if __name__ == "__main__":
    main()
