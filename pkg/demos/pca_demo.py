"""Project style-clustered synthetic embeddings onto their first two PCs.

Three "styles" get three separated centers in a 128-dimensional space; the
PCA projection recovers the clusters in 2-D. Writes pca_demo.svg next to
this script.

Run with:  python3 demos/pca_demo.py
"""
import os

import numpy as np

from grooveprobe.projection import fit_pca, project

STYLES = ("funk", "pop", "rock")
PER_STYLE = 15
DIM = 128


def main():
    rng = np.random.default_rng(1)
    centers = 3.0 * rng.standard_normal((len(STYLES), DIM))
    X = np.vstack(
        [centers[i] + rng.standard_normal((PER_STYLE, DIM)) for i in range(len(STYLES))]
    )
    labels = [s for s in STYLES for _ in range(PER_STYLE)]

    model = fit_pca(X, 2)
    scores = project(model, X)
    print("explained variance ratio:", np.round(model.explained_variance_ratio, 3))
    for style in STYLES:
        pts = scores[[i for i, s in enumerate(labels) if s == style]]
        print(f"  {style:<5} center ({pts[:, 0].mean(): .2f}, {pts[:, 1].mean(): .2f})"
              f"  spread {pts.std(axis=0).sum():.2f}")

    # minimal SVG scatter, colored by style
    colors = dict(zip(STYLES, ("#c0392b", "#2980b9", "#27ae60")))
    lo, hi = scores.min() - 1, scores.max() + 1
    scale = 400 / (hi - lo)
    parts = ['<svg xmlns="http://www.w3.org/2000/svg" width="440" height="440">']
    for (x, y), style in zip(scores, labels):
        cx = 20 + (x - lo) * scale
        cy = 420 - (y - lo) * scale
        parts.append(
            f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="4" fill="{colors[style]}"/>'
        )
    parts.append("</svg>")
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "pca_demo.svg")
    with open(out, "w") as fh:
        fh.write("\n".join(parts) + "\n")
    print("wrote", out)


if __name__ == "__main__":
    main()
