"""Memorize a tiny noise-free corpus with the combined multi-question
network and render the loss curves to an SVG.

Answers are exact functions of the image features here, so a model with
enough capacity should push training accuracy toward 100 percent.
"""

from pathlib import Path

from mtvqa import harness
from mtvqa.corpus import SyntheticSceneConfig
from mtvqa.models import build_model
from mtvqa.reports import svg_line_plot
from mtvqa.textenc import random_embeddings

scene = SyntheticSceneConfig(num_images=30, nouns=("ball", "box", "chair", "lamp"),
                             colours=("red", "green", "blue", "white"),
                             grid_size=2, sizes=("small", "large"), max_count=2,
                             noise_std=0.0, seed=303, max_objects=2)
bundle = harness.synthetic_bundle(30, 0, seed=303, scene=scene)
train_set = bundle.train_combined[:64]
enc = bundle.encode_combined(train_set)
print(f"{len(train_set)} combined examples, {len(bundle.answer_vocab)} answers")

model_cfg = harness.model_config_for_bundle(bundle, embed_dim=24, filters_per_width=12,
                                            hidden_dim=96, img_compress_dim=48)
model = build_model("mtl_simple", model_cfg,
                    random_embeddings(bundle.vocab, model_cfg.embed_dim, seed=303),
                    seed=303)
tcfg = harness.TrainConfig(batch_size=8, max_epochs_nadam=200, max_epochs_sgd=0,
                           patience=200, min_delta=0.0, val_fraction=0.02,
                           seed=303, keep="last")
model, history = harness.train(model, enc, tcfg)

report = harness.evaluate(model, enc)
print(f"training accuracy after {len(history.records)} epochs: "
      f"{report.total_accuracy:.2f}%")
for qtype in enc.tasks:
    acc = report.accuracy(qtype)
    if acc is not None:
        print(f"  {qtype.value:8s} {acc:6.2f}%  ({report.counts[qtype]} slots)")

out = Path(__file__).with_name("overfit_loss.svg")
svg_line_plot({"train loss": [r.train_loss for r in history.records],
               "validation loss": [r.val_loss for r in history.records]},
              out, title="tiny-corpus memorization")
print(f"loss curves written to {out}")
