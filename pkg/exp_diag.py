"""Diagnostics for the heterophilous acceptance instance (scratch, not shipped)."""
import os
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
import sys

import numpy as np

from gfclust import (
    EncoderConfig, FilterConfig, SyntheticSpec, TrainConfig,
    generate_synthetic, true_homophily_report, apply_filter,
)
from gfclust.training import TrainingPipeline
from gfclust.filters import build_joint_aggregation
from gfclust.encoders import EmbeddingPair, encode
from gfclust.clustering import kmeans, accuracy


def best_kmeans_acc(x, labels, c=4, tries=4):
    best_inertia, best_acc = np.inf, 0.0
    for s in range(tries):
        r = kmeans(x, c, seed=s)
        if r.inertia < best_inertia:
            best_inertia, best_acc = r.inertia, accuracy(r.labels, labels)
    return best_acc


def class_kernel(s_rw, labels, c=4):
    out = np.zeros((c, c))
    for i in range(c):
        for j in range(c):
            out[i, j] = s_rw[np.ix_(labels == i, labels == j)].mean()
    return out


def main(mu=6.0, sig=0.5, pair_sep=0.15, d=32, latent=16, hidden=64, pre=60, k=2, seed=0):
    spec = SyntheticSpec(n_nodes=1000, n_clusters=4, n_views=2, p_in=0.005, p_out=0.1,
                         n_features=d, mean_separation=mu, noise_scale=sig,
                         mean_layout="paired", pair_separation=pair_sep, seed=seed)
    g = generate_synthetic(spec)
    labels = g.labels
    print("true hr:", [round(h, 3) for h in true_homophily_report(g)])
    print("raw X kmeans ACC:", best_kmeans_acc(g.features, labels))

    cfg = TrainConfig(epochs=0, encoder=EncoderConfig(latent_dim=latent, hidden_dim=hidden, epochs=pre),
                      filter=FilterConfig(order=k), seed=0, detach_s=False)
    pipe = TrainingPipeline(g, cfg)
    print("bootstrap pseudo ACC:", accuracy(pipe.pseudo, labels), " hr:", [round(h, 3) for h in pipe.hr])

    for v, (px, pa) in enumerate(pipe.models):
        z_x = encode(px, g.features)
        z_a = encode(pa, g.adjacencies[v])
        s_rw = build_joint_aggregation(EmbeddingPair(z_x=z_x, z_a=z_a)).s_rw
        print(f"view {v}: z_x ACC {best_kmeans_acc(z_x, labels):.3f}  z_a ACC {best_kmeans_acc(z_a, labels):.3f}")
        kern = class_kernel(s_rw, labels)
        print("  class kernel of s_rw (x1000):")
        print(np.array_str(kern * 1000, precision=2, suppress_small=True))
        hr_v = 0.02
        for name, fc in [
            ("hybrid@hr=0.02", FilterConfig(order=k, hr=hr_v)),
            ("low_pass", FilterConfig(order=k, family="low_pass")),
            ("high_pass", FilterConfig(order=k, family="high_pass")),
        ]:
            h = apply_filter(s_rw, g.features, fc)
            acc = best_kmeans_acc(h, labels)
            # is the collided pair separated by the filter output?
            m0 = h[labels == 0].mean(axis=0); m1 = h[labels == 1].mean(axis=0)
            spread = 0.5 * (h[labels == 0].std() + h[labels == 1].std()) * np.sqrt(h.shape[1])
            print(f"  {name}: ACC {acc:.3f} pair-mean-dist {np.linalg.norm(m0-m1):.3f} pair-spread {spread:.3f}")


if __name__ == "__main__":
    kwargs = {}
    for arg in sys.argv[1:]:
        key, value = arg.split("=")
        kwargs[key] = float(value) if "." in value else int(value)
    main(**kwargs)


def sweep():
    from gfclust.graphs import random_walk_normalize
    for latent, hidden, pre in [(4, 32, 100), (8, 48, 100), (8, 48, 150), (16, 64, 150)]:
        spec = SyntheticSpec(n_nodes=1000, n_clusters=4, n_views=2, p_in=0.005, p_out=0.1,
                             n_features=32, mean_separation=6.0, noise_scale=0.5,
                             mean_layout="paired", pair_separation=0.15, seed=0)
        g = generate_synthetic(spec)
        labels = g.labels
        cfg = TrainConfig(epochs=0, encoder=EncoderConfig(latent_dim=latent, hidden_dim=hidden, epochs=pre),
                          filter=FilterConfig(order=2), seed=0, detach_s=False)
        pipe = TrainingPipeline(g, cfg)
        line = f"lat={latent} hid={hidden} pre={pre}: boot={accuracy(pipe.pseudo, labels):.3f}"
        for v, (px, pa) in enumerate(pipe.models):
            z_x = encode(px, g.features); z_a = encode(pa, g.adjacencies[v])
            s_rw = build_joint_aggregation(EmbeddingPair(z_x=z_x, z_a=z_a)).s_rw
            hy = best_kmeans_acc(apply_filter(s_rw, g.features, FilterConfig(order=2, hr=0.02)), labels)
            lp = best_kmeans_acc(apply_filter(s_rw, g.features, FilterConfig(order=2, family="low_pass")), labels)
            a_rw = random_walk_normalize(g.adjacencies[v]).a_rw
            raw = best_kmeans_acc(apply_filter(a_rw, g.features, FilterConfig(order=2, hr=0.02)), labels)
            line += f" | v{v}: hy={hy:.3f} lp={lp:.3f} rawhy={raw:.3f}"
        print(line, flush=True)


if "sweep" in sys.argv:
    sweep()
