#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "occtrack/detections.hpp"
#include "occtrack/metrics.hpp"

namespace occtrack {

/// Piecewise-constant velocity, in pixels per frame, active from start_frame.
struct VelocityPhase {
  int start_frame = 1;
  double vx = 0.0;
  double vy = 0.0;
};

struct AgentSpec {
  CenterBox start;
  std::vector<VelocityPhase> schedule;  // sorted by start_frame
  double depth = 0.0;                   // smaller = nearer the camera
  int latent_index = 0;                 // identity basis vector
  bool detectable = true;               // false: prop that only occludes
};

enum class OcclusionMode { ClipVisible, FullBox };

struct ScenarioSpec {
  std::uint64_t seed = 0;
  int duration = 100;  // frames, 1-based
  double image_width = 1000.0;
  double image_height = 600.0;
  std::vector<AgentSpec> agents;
  double detection_noise_std = 0.0;  // pixels
  double visibility_floor = 0.25;    // below: detection dropped entirely
  OcclusionMode mode = OcclusionMode::ClipVisible;
  double embedding_noise_std = 0.05;
  int embedding_dim = 16;
  bool synth_tensors = false;  // attach feature maps and keypoint heatmaps
};

struct SimulatedDetection {
  BoundingBox box;
  double score = 0.0;
  int agent = -1;          // ground-truth identity (agent index)
  double visibility = 1.0;
  Embedding embedding;
  Eigen::Matrix<double, 6, 1> part_visibility = Eigen::Matrix<double, 6, 1>::Ones();
  std::optional<FeatureMap> feature_map;
  std::optional<KeypointHeatmaps> heatmaps;
};

struct SimulatedFrame {
  int frame = 0;
  std::vector<int> gt_agents;
  std::vector<BoundingBox> gt_boxes;
  std::vector<SimulatedDetection> detections;
  std::vector<double> agent_visibility;  // one entry per agent in spec order
};

struct Simulation {
  ScenarioSpec spec;
  std::vector<SimulatedFrame> frames;
  TrackTable ground_truth;          // ids are agent index + 1
  std::vector<Embedding> latents;   // one per agent
};

/// Run the scenario. Output is a deterministic function of the spec.
Simulation generate(const ScenarioSpec& spec);

/// Canned scenario families: cross, follow, linger, crowd. The seed jitters
/// geometry and drives all noise; unknown names throw.
ScenarioSpec standard_suite(const std::string& name, std::uint64_t seed);

std::vector<std::string> standard_suite_names();

/// Detection stream view for feeding the tracker.
std::vector<FrameObservations> to_observations(const Simulation& sim);

/// Reproducible normal sampler (Box-Muller over mt19937_64 bits), so
/// generated scenarios do not depend on the standard library's
/// distribution implementations.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : state_(seed) {}
  double operator()(double stddev);
  double uniform(double lo, double hi);

 private:
  double next_unit();
  std::uint64_t next_bits();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace occtrack
