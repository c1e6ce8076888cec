#pragma once

#include "cec/types.hpp"

#include <utility>

namespace cec {

// Draws a labeled pool from K Gaussian bumps centered on unit-norm class
// anchors; the anchors double as the zero-shot class head. Labels follow
// class_weights; an outlier_fraction of samples is drawn uniformly on the
// sphere instead of around its anchor. Deterministic for a fixed seed.
std::pair<EmbeddingPool, ClassHead> generate_synthetic(const SyntheticSpec& spec);

}  // namespace cec
