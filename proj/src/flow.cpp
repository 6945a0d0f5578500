// SPDX-License-Identifier: Apache-2.0

#include "spm/flow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "spm/errors.hpp"

namespace spm {

std::vector<double> DisplacementField::magnitudes() const {
  std::vector<double> out(displacement.size());
  for (std::size_t i = 0; i < displacement.size(); ++i)
    out[i] = displacement[i].norm();
  return out;
}

DisplacementField displacement_field(const AnnField& field,
                                     const Decomposition& query,
                                     const ExemplarLibrary& library) {
  if (field.superpixel_count() != query.size())
    throw DomainError("ANN field does not cover the query decomposition");
  DisplacementField out;
  out.displacement.resize(query.size());
  for (int i = 0; i < query.size(); ++i) {
    const Match best = field.best(i);
    const LibraryEntry& entry = library.entry(best.image_id);
    Eigen::Vector2d matched =
        entry.decomposition.superpixels[best.superpixel_id].barycenter;
    matched.x() *= static_cast<double>(query.width()) / entry.image.width();
    matched.y() *= static_cast<double>(query.height()) / entry.image.height();
    out.displacement[i] = matched - query.superpixels[i].barycenter;
  }
  return out;
}

namespace {

// HSV (hue degrees, s, v in [0,1]) to RGB.
Eigen::Vector3f hsv_to_rgb(double hue, double saturation, double value) {
  const double c = value * saturation;
  const double hp = hue / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0.0, g = 0.0, b = 0.0;
  if (hp < 1.0) {
    r = c; g = x;
  } else if (hp < 2.0) {
    r = x; g = c;
  } else if (hp < 3.0) {
    g = c; b = x;
  } else if (hp < 4.0) {
    g = x; b = c;
  } else if (hp < 5.0) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = value - c;
  return Eigen::Vector3f(static_cast<float>(r + m), static_cast<float>(g + m),
                         static_cast<float>(b + m));
}

}  // namespace

ImageGrid render_flow(const DisplacementField& field,
                      const Decomposition& decomp) {
  if (static_cast<int>(field.displacement.size()) != decomp.size())
    throw DomainError("field does not cover the decomposition");

  double max_magnitude = 0.0;
  for (const auto& d : field.displacement)
    max_magnitude = std::max(max_magnitude, d.norm());

  std::vector<Eigen::Vector3f> colors(decomp.size(),
                                      Eigen::Vector3f::Ones());
  if (max_magnitude > 0.0) {
    for (int i = 0; i < decomp.size(); ++i) {
      const Eigen::Vector2d& d = field.displacement[i];
      const double magnitude = d.norm();
      if (magnitude == 0.0) continue;  // stays white
      double hue = std::atan2(d.y(), d.x()) * 180.0 / std::numbers::pi;
      if (hue < 0.0) hue += 360.0;
      colors[i] = hsv_to_rgb(hue, magnitude / max_magnitude, 1.0);
    }
  }

  ImageGrid image(decomp.width(), decomp.height(), 3, 1.0f);
  for (int y = 0; y < decomp.height(); ++y)
    for (int x = 0; x < decomp.width(); ++x) {
      const Eigen::Vector3f& rgb = colors[decomp.superpixel_at(x, y)];
      for (int c = 0; c < 3; ++c) image(x, y, c) = rgb[c];
    }
  return image;
}

Eigen::Matrix<double, 2, 3> fit_affine(
    const std::vector<Eigen::Vector2d>& src,
    const std::vector<Eigen::Vector2d>& dst) {
  if (src.size() != dst.size() || src.size() < 3)
    throw DomainError("affine fit needs >= 3 correspondences");
  Eigen::MatrixXd design(src.size(), 3);
  Eigen::MatrixXd target(src.size(), 2);
  for (std::size_t i = 0; i < src.size(); ++i) {
    design.row(i) << src[i].x(), src[i].y(), 1.0;
    target.row(i) = dst[i].transpose();
  }
  const Eigen::MatrixXd solution =
      design.colPivHouseholderQr().solve(target);  // 3x2
  Eigen::Matrix<double, 2, 3> affine;
  affine = solution.transpose();
  return affine;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  std::nth_element(values.begin(), values.begin() + mid - 1,
                   values.begin() + mid);
  return 0.5 * (values[mid - 1] + upper);
}

}  // namespace spm
