"""Scratch experiment driver for acceptance instance tuning (not shipped)."""
import os
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
import sys
import time

import numpy as np

from gfclust import (
    EncoderConfig, FilterConfig, SyntheticSpec, TrainConfig,
    generate_synthetic, train, true_homophily_report,
)
from gfclust.cli import apply_variant


def run_once(g, cfg, variant=None):
    if variant:
        cfg = apply_variant(cfg, variant)
    t0 = time.time()
    rep = train(g, cfg)
    return rep.final, time.time() - t0


def ac1(n=1000, d=32, latent=16, hidden=64, pre=40, ep=15, T=5, mu=6.0, sig=1.0, seed=0, tseed=0):
    spec = SyntheticSpec(n_nodes=n, n_clusters=4, n_views=2, p_in=0.1, p_out=0.005,
                         n_features=d, mean_separation=mu, noise_scale=sig, seed=seed)
    g = generate_synthetic(spec)
    true_hr = true_homophily_report(g)
    cfg = TrainConfig(epochs=ep, hr_refresh_interval=T,
                      encoder=EncoderConfig(latent_dim=latent, hidden_dim=hidden, epochs=pre),
                      filter=FilterConfig(order=2), seed=tseed, detach_s=False)
    final, dt = run_once(g, cfg)
    hr_err = max(abs(e - t) for e, t in zip(final["hr"], true_hr))
    print(f"AC1 n={n} d={d} lat={latent} hid={hidden} pre={pre} ep={ep} mu={mu} sig={sig} "
          f"seed={seed}/{tseed}: ACC={final['acc']:.3f} hr_err={hr_err:.3f} "
          f"true_hr={[round(h,3) for h in true_hr]} est={[round(h,3) for h in final['hr']]} {dt:.0f}s")
    return final["acc"], hr_err, dt


def ac2(n=1000, d=32, latent=16, hidden=64, pre=40, ep=15, T=5, mu=6.0, sig=1.0,
        layout="paired", pair_sep=0.15, seed=0, tseeds=(0,), variants=("low_pass_only",)):
    spec = SyntheticSpec(n_nodes=n, n_clusters=4, n_views=2, p_in=0.005, p_out=0.1,
                         n_features=d, mean_separation=mu, noise_scale=sig,
                         mean_layout=layout, pair_separation=pair_sep, seed=seed)
    g = generate_synthetic(spec)
    print(f"AC2 true_hr={[round(h,3) for h in true_homophily_report(g)]} layout={layout} "
          f"pair_sep={pair_sep} mu={mu} sig={sig}")
    rows = {}
    for tseed in tseeds:
        cfg = TrainConfig(epochs=ep, hr_refresh_interval=T,
                          encoder=EncoderConfig(latent_dim=latent, hidden_dim=hidden, epochs=pre),
                          filter=FilterConfig(order=2), seed=tseed, detach_s=False)
        final, dt = run_once(g, cfg)
        rows.setdefault("default", []).append(final["acc"])
        line = f"  tseed={tseed}: default={final['acc']:.3f} ({dt:.0f}s)"
        for variant in variants:
            vf, vdt = run_once(g, cfg, variant)
            rows.setdefault(variant, []).append(vf["acc"])
            line += f" {variant}={vf['acc']:.3f} ({vdt:.0f}s)"
        print(line, flush=True)
    meds = {k: float(np.median(v)) for k, v in rows.items()}
    print(f"  medians: {meds}")
    if "low_pass_only" in rows:
        diffs = [a - b for a, b in zip(rows["default"], rows["low_pass_only"])]
        print(f"  paired diff median vs low_pass_only: {float(np.median(diffs)):.3f}")
    return rows


if __name__ == "__main__":
    mode = sys.argv[1] if len(sys.argv) > 1 else "ac1"
    if mode == "ac1":
        ac1()
    elif mode == "ac1small":
        ac1(pre=30, ep=10)
    elif mode == "ac2probe":
        ac2(pre=30, ep=10, tseeds=(0,), variants=("low_pass_only", "raw_adjacency"))
    elif mode == "ac2spread":
        ac2(pre=30, ep=10, layout="spread", tseeds=(0,), variants=("low_pass_only", "raw_adjacency"))
