"""One dictionary classifier: bags, distances, pyramids and 1-NN."""

import numpy as np

from tdeclf.dictionary import (
    BOSS_DISTANCE,
    HISTOGRAM_INTERSECTION,
    MemberParams,
    boss_distance,
    build_individual,
    histogram_intersection,
    pyramid_bags,
)
from tdeclf.sfa import unpack_key
from tdeclf.synthetic import shape_dataset

# the BOSS distance only looks at words in the first bag
a, b = {"x": 1, "y": 1}, {"x": 3}
print("boss(a, b) =", boss_distance(a, b), " boss(b, a) =", boss_distance(b, a))
print("intersection =", histogram_intersection({"x": 3, "y": 1}, {"x": 1, "z": 5}))

# a two-level pyramid tags each word with the half of the series it starts in
bag = pyramid_bags([1, 1, 2, 2, 2, 3], m=8, h=2)
for key, count in sorted(bag.items()):
    print(unpack_key(key, 2), count)

train = shape_dataset(30, 60, 3, seed=0)
test = shape_dataset(60, 60, 3, seed=1)
for distance in (BOSS_DISTANCE, HISTOGRAM_INTERSECTION):
    params = MemberParams(word_length=8, alphabet_size=4, window_length=20, normalise=True,
                          levels=2, binning="MCB")
    member = build_individual(train, params, use_bigrams=False, distance=distance)
    acc = np.mean(member.predict(test.X) == test.y)
    print(f"{distance}: LOOCV {member.train_accuracy:.3f}, test {acc:.3f}, "
          f"vocabulary {len(member.vocabulary)} words")
