#include "occtrack/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace occtrack {

bool BoundingBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

bool CenterBox::valid() const {
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

CenterBox tlwh_to_center(const BoundingBox& b) {
  return {b.x + b.w / 2.0, b.y + b.h / 2.0, b.w, b.h};
}

BoundingBox center_to_tlwh(const CenterBox& c) {
  return {c.cx - c.w / 2.0, c.cy - c.h / 2.0, c.w, c.h};
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  if (iw <= 0.0) return 0.0;
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

std::optional<BoundingBox> intersection(const BoundingBox& a, const BoundingBox& b) {
  const double x1 = std::max(a.x, b.x);
  const double y1 = std::max(a.y, b.y);
  const double x2 = std::min(a.right(), b.right());
  const double y2 = std::min(a.bottom(), b.bottom());
  if (x2 - x1 <= 0.0 || y2 - y1 <= 0.0) return std::nullopt;
  return BoundingBox{x1, y1, x2 - x1, y2 - y1};
}

Eigen::MatrixXd iou_distance_matrix(const std::vector<BoundingBox>& rows,
                                    const std::vector<BoundingBox>& cols) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      d(i, j) = 1.0 - iou(rows[static_cast<std::size_t>(i)],
                          cols[static_cast<std::size_t>(j)]);
  return d;
}

}  // namespace occtrack
