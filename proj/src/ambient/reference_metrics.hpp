// reference_metrics.hpp - factories for the catalog reference metrics.

#pragma once

#include "gaussflow/ambient.hpp"

#include <memory>

namespace gaussflow {

std::shared_ptr<const ReferenceMetric> make_flat_metric(int n, bool periodic, double period);
std::shared_ptr<const ReferenceMetric> make_sphere_metric(int n, double radius);
std::shared_ptr<const ReferenceMetric> make_hyperbolic_metric(int n, double scale);
std::shared_ptr<const ReferenceMetric> make_product_spheres_metric(double r1, double r2);
std::shared_ptr<const ReferenceMetric> make_warped_metric(int n, const WarpProfile& profile);
std::shared_ptr<const ReferenceMetric> make_grid_metric(const GridTable& table);

}  // namespace gaussflow
