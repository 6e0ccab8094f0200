#pragma once

#include <optional>
#include <vector>

#include "occtrack/appearance.hpp"
#include "occtrack/geometry.hpp"

namespace occtrack {

/// One scored detection. Appearance inputs are optional: a precomputed
/// embedding, or a feature map plus keypoint heatmaps for the pose-guided
/// path (which takes precedence when both are present).
struct Detection {
  BoundingBox box;
  double score = 0.0;
  Embedding embedding;  // size 0 = absent
  std::optional<FeatureMap> feature_map;
  std::optional<KeypointHeatmaps> heatmaps;
};

struct FrameObservations {
  int frame = 0;
  std::vector<Detection> detections;
};

}  // namespace occtrack
