"""Run the comparison protocols on a small synthetic corpus and write the
table-shaped reports.

Uses reduced sizes so the whole script finishes in about a minute; the
command line runs the same protocols at larger scale (see the README).
"""

from pathlib import Path

from mtvqa import harness
from mtvqa.reports import experiment_to_markdown, write_experiment_reports

bundle = harness.synthetic_bundle(150, 60, noise_std=0.2, seed=5)
model_cfg = harness.model_config_for_bundle(bundle, embed_dim=12, filters_per_width=6,
                                            hidden_dim=32, img_compress_dim=16)
train_cfg = harness.TrainConfig(batch_size=32, max_epochs_nadam=25, max_epochs_sgd=5,
                                patience=8)

outdir = Path(__file__).with_name("experiment_reports")
for kind in ("mtl_vs_stl", "architecture_control", "shared_info_control"):
    report = harness.run_experiment(kind, bundle, model_cfg, train_cfg, seeds=(0, 1))
    write_experiment_reports(outdir / kind, report)
    print(experiment_to_markdown(report))

print(f"reports written under {outdir}")
