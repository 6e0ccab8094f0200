#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace occtrack {

/// Axis-aligned rectangle in pixel coordinates, stored as top-left corner
/// plus size. Width and height must be positive and finite.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  bool valid() const;

  Eigen::Vector4d to_vector() const { return {x, y, w, h}; }
  static BoundingBox from_vector(const Eigen::Vector4d& v) {
    return {v(0), v(1), v(2), v(3)};
  }
};

/// The same rectangle parameterized by its center point.
struct CenterBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool valid() const;
};

CenterBox tlwh_to_center(const BoundingBox& b);
BoundingBox center_to_tlwh(const CenterBox& c);

/// Intersection-over-union of two boxes, in [0, 1]. Boxes are treated as
/// closed continuous rectangles; a zero-area overlap yields exactly 0.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Overlap rectangle of a and b, or nullopt when the interiors are disjoint.
std::optional<BoundingBox> intersection(const BoundingBox& a, const BoundingBox& b);

/// Entry (i, j) = 1 - iou(rows[i], cols[j]). Empty inputs give an empty matrix.
Eigen::MatrixXd iou_distance_matrix(const std::vector<BoundingBox>& rows,
                                    const std::vector<BoundingBox>& cols);

}  // namespace occtrack
