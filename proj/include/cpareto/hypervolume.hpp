#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "cpareto/error.hpp"
#include "cpareto/pareto.hpp"

namespace cpareto {

namespace detail {

// Area of the union of boxes [ref, p] for maximization points (x, y).
inline double hypervolume_2d(std::vector<std::pair<double, double>> pts, double rx, double ry) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second > b.second;
  });
  double area = 0.0;
  double covered_y = ry;
  for (const auto& [x, y] : pts) {
    if (y > covered_y) {
      area += (x - rx) * (y - covered_y);
      covered_y = y;
    }
  }
  return area;
}

}  // namespace detail

/// Lebesgue measure of the region dominated by `front` and bounded below by
/// `ref` (maximization). Exact for 2 and 3 objectives.
inline double hypervolume(std::span<const ObjectiveVector> front, std::span<const double> ref) {
  const std::size_t dim = ref.size();
  detail::require(dim == 2 || dim == 3, Errc::DimensionUnsupported,
                  "exact hypervolume is implemented for 2 or 3 objectives only");
  for (const auto& p : front) {
    detail::require(p.size() == dim, Errc::LengthMismatch, "point dimension differs from reference");
    for (std::size_t i = 0; i < dim; ++i)
      detail::require(p[i] >= ref[i], Errc::PointBelowReference, "point does not dominate the reference point");
  }
  if (front.empty()) return 0.0;

  if (dim == 2) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : front) pts.emplace_back(p[0], p[1]);
    return detail::hypervolume_2d(std::move(pts), ref[0], ref[1]);
  }

  // Slice along the third objective.
  std::vector<const ObjectiveVector*> by_z;
  for (const auto& p : front) by_z.push_back(&p);
  std::sort(by_z.begin(), by_z.end(), [](const auto* a, const auto* b) { return (*a)[2] > (*b)[2]; });

  double volume = 0.0;
  std::vector<std::pair<double, double>> active;
  for (std::size_t i = 0; i < by_z.size(); ++i) {
    active.emplace_back((*by_z[i])[0], (*by_z[i])[1]);
    const double z_hi = (*by_z[i])[2];
    const double z_lo = i + 1 < by_z.size() ? (*by_z[i + 1])[2] : ref[2];
    if (z_hi > z_lo) volume += detail::hypervolume_2d(active, ref[0], ref[1]) * (z_hi - z_lo);
  }
  return volume;
}

}  // namespace cpareto
