# %% [markdown]
# # Choosing the penalty factor
#
# The sweep starts at gamma = 1 and grows it by a step proportional to the
# ratio of distortion to penalty of the last trained model. Each candidate
# is scored by its weighted distortion on the validation samples.

# %%
import numpy as np

from robust_fcm import ModelConfig, PenaltyVariant, tune_gamma
from robust_fcm.dataio import synth_two_class_image
from robust_fcm.evaluation import kde_peak_centroids, preprocess
from robust_fcm.experiments import noisy_image

image = preprocess(noisy_image(synth_two_class_image(), "gauss:10", 0), "N01")
config = ModelConfig(n_clusters=2, penalty=PenaltyVariant("SII", "Grid8"))
idx = np.arange(image.n_samples)
res = tune_gamma(image, (idx, idx), config, t_gamma=10, init_centroids=kde_peak_centroids(image, 2)[:, None])

for g, e in res.trace:
    print(f"gamma {g:8.3f}   E {e:10.3f}")
print("selected", res.best_gamma)

# %% [markdown]
# Validating on the training pixels favors the smallest penalty: a stronger
# penalty pulls memberships away from the pure distortion minimizer. The
# sweep is a model-selection heuristic and the segmentation accuracy of the
# chosen model should still be checked against ground truth when available.
