"""Seeded random hyperparameter search on a held-out slice of the
training images, then a final run with the winning configuration.
"""

import dataclasses

from mtvqa import harness

bundle = harness.synthetic_bundle(120, 50, noise_std=0.15, seed=3)
model_cfg = harness.model_config_for_bundle(bundle, embed_dim=12, filters_per_width=6,
                                            hidden_dim=32, img_compress_dim=16)
base = harness.TrainConfig(max_epochs_nadam=20, max_epochs_sgd=5, patience=8)

space = {
    "nadam_lr": ("log", 1e-4, 3e-3),
    "batch_size": ("choice", [16, 32, 64]),
    "sgd_lr": ("log", 1e-4, 1e-2),
}
best, trials = harness.search_hyperparams(space, budget=6, seed=1, bundle=bundle,
                                          model_cfg=model_cfg, base_train_cfg=base)
for t in trials:
    cfg = t["config"]
    print(f"trial {t['trial']}: lr={cfg['nadam_lr']:.5f} batch={cfg['batch_size']:3d} "
          f"sgd_lr={cfg['sgd_lr']:.5f} -> holdout {t['val_accuracy']:.2f}%")
print(f"\nbest: lr={best.nadam_lr:.5f} batch={best.batch_size} sgd_lr={best.sgd_lr:.5f}")

report = harness.run_experiment("mtl_vs_stl", bundle, model_cfg,
                                dataclasses.replace(best, max_epochs_nadam=40),
                                seeds=(0,))
for label, _, total in report.rows:
    print(f"{label:12s} total {'-' if total is None else f'{total:.2f}%'}")
