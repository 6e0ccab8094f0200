#include "occtrack/association.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace occtrack {

Eigen::VectorXd occlusion_thresholds(const std::vector<TrackingState>& statuses,
                                     double theta0, double offset) {
  if (offset < 0.0) throw std::invalid_argument("occlusion_thresholds: offset < 0");
  Eigen::VectorXd out(static_cast<Eigen::Index>(statuses.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const TrackingState s = statuses[static_cast<std::size_t>(i)];
    out(i) = s == TrackingState::Tracked ? theta0 : std::min(theta0 + offset, 1.0);
  }
  return out;
}

Eigen::MatrixXd gated_embedding_distance(const Eigen::MatrixXd& d_cos,
                                         const Eigen::MatrixXd& d_iou,
                                         double theta_emb,
                                         const Eigen::VectorXd& iou_thresholds) {
  if (d_cos.rows() != d_iou.rows() || d_cos.cols() != d_iou.cols())
    throw std::invalid_argument("gated_embedding_distance: matrix shapes differ");
  if (iou_thresholds.size() != d_cos.rows())
    throw std::invalid_argument("gated_embedding_distance: one threshold per row required");
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(d_cos.rows(), d_cos.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (d_cos(i, j) < theta_emb && d_iou(i, j) < iou_thresholds(i))
        out(i, j) = d_cos(i, j);
  return out;
}

Eigen::MatrixXd fused_distance(const Eigen::MatrixXd& d_iou,
                               const Eigen::MatrixXd& d_cos_hat) {
  if (d_iou.rows() != d_cos_hat.rows() || d_iou.cols() != d_cos_hat.cols())
    throw std::invalid_argument("fused_distance: matrix shapes differ");
  return d_iou.cwiseMin(d_cos_hat);
}

namespace {

// Shortest-augmenting-path assignment with potentials. Requires a square
// matrix; returns for each column the assigned row. Ties in the augmenting
// step resolve to the lowest column index, so output is deterministic.
std::vector<int> solve_square_assignment(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = a(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_of_col(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j)
    row_of_col[static_cast<std::size_t>(j - 1)] = p[static_cast<std::size_t>(j)] - 1;
  return row_of_col;
}

}  // namespace

MatchResult hungarian(const Eigen::MatrixXd& cost, double gate) {
  MatchResult result;
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) {
    for (int i = 0; i < rows; ++i) result.unmatched_rows.push_back(i);
    for (int j = 0; j < cols; ++j) result.unmatched_cols.push_back(j);
    return result;
  }
  if (!cost.allFinite()) throw std::invalid_argument("hungarian: non-finite cost entry");

  const int n = std::max(rows, cols);
  double pad = gate;
  if (!std::isfinite(pad)) pad = cost.maxCoeff() + 1.0;
  Eigen::MatrixXd square = Eigen::MatrixXd::Constant(n, n, pad);
  square.topLeftCorner(rows, cols) = cost;

  const std::vector<int> row_of_col = solve_square_assignment(square);

  std::vector<char> row_matched(static_cast<std::size_t>(rows), 0);
  std::vector<char> col_matched(static_cast<std::size_t>(cols), 0);
  for (int j = 0; j < cols; ++j) {
    const int i = row_of_col[static_cast<std::size_t>(j)];
    if (i < rows && cost(i, j) < gate) {
      result.matches.emplace_back(i, j);
      row_matched[static_cast<std::size_t>(i)] = 1;
      col_matched[static_cast<std::size_t>(j)] = 1;
    }
  }
  std::sort(result.matches.begin(), result.matches.end());
  for (int i = 0; i < rows; ++i)
    if (!row_matched[static_cast<std::size_t>(i)]) result.unmatched_rows.push_back(i);
  for (int j = 0; j < cols; ++j)
    if (!col_matched[static_cast<std::size_t>(j)]) result.unmatched_cols.push_back(j);
  return result;
}

TwoStageResult associate_two_stage(const AssociationTracks& tracks,
                                   const std::vector<BoundingBox>& high_boxes,
                                   const std::vector<Embedding>& high_embeddings,
                                   const std::vector<BoundingBox>& low_boxes,
                                   const AssociationParams& params) {
  const std::size_t n_tracks = tracks.boxes.size();
  if (tracks.states.size() != n_tracks || tracks.active.size() != n_tracks ||
      tracks.embeddings.size() != n_tracks)
    throw std::invalid_argument("associate_two_stage: track field sizes differ");
  if (!high_embeddings.empty() && high_embeddings.size() != high_boxes.size())
    throw std::invalid_argument("associate_two_stage: one embedding slot per detection");

  TwoStageResult out;

  // Stage 1: occlusion-aware fused distance over all tracklets.
  const Eigen::MatrixXd d_iou = iou_distance_matrix(tracks.boxes, high_boxes);
  Eigen::MatrixXd d_cos = Eigen::MatrixXd::Ones(d_iou.rows(), d_iou.cols());
  for (Eigen::Index i = 0; i < d_cos.rows(); ++i) {
    const Embedding& te = tracks.embeddings[static_cast<std::size_t>(i)];
    if (te.size() == 0) continue;
    for (Eigen::Index j = 0; j < d_cos.cols(); ++j) {
      if (high_embeddings.empty()) break;
      const Embedding& de = high_embeddings[static_cast<std::size_t>(j)];
      if (de.size() == 0 || de.size() != te.size()) continue;
      // Halved cosine distance keeps appearance costs in [0, 1].
      d_cos(i, j) = 0.5 * cosine_distance(te, de);
    }
  }
  const Eigen::VectorXd thresholds =
      occlusion_thresholds(tracks.states, params.theta_iou, params.offset);
  const Eigen::MatrixXd d_cos_hat =
      gated_embedding_distance(d_cos, d_iou, params.theta_emb, thresholds);
  out.high = hungarian(fused_distance(d_iou, d_cos_hat), params.stage1_gate);

  // Stage 2: remaining active tracklets against low-score detections,
  // IoU distance only.
  std::vector<int> candidates;
  for (int row : out.high.unmatched_rows)
    if (tracks.active[static_cast<std::size_t>(row)]) candidates.push_back(row);

  std::vector<BoundingBox> candidate_boxes;
  candidate_boxes.reserve(candidates.size());
  for (int row : candidates) candidate_boxes.push_back(tracks.boxes[static_cast<std::size_t>(row)]);

  MatchResult low = hungarian(iou_distance_matrix(candidate_boxes, low_boxes),
                              params.stage2_gate);
  for (auto& [row, col] : low.matches) row = candidates[static_cast<std::size_t>(row)];
  for (int& row : low.unmatched_rows) row = candidates[static_cast<std::size_t>(row)];
  out.low = std::move(low);
  return out;
}

}  // namespace occtrack
