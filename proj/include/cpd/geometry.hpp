#pragma once

#include "cpd/model.hpp"

namespace cpd {

/// Wraps an azimuth into [0, 360).
double wrap_azimuth(double az);

/// Magnitude of the shortest azimuth rotation from `from` to `to`, in [0, 180].
double azimuth_offset(double from, double to);

/// Linear interpolation at fraction f in [0, 1]; azimuth follows the shortest arc.
Pointing interpolate(const Pointing& a, const Pointing& b, double f);

}  // namespace cpd
