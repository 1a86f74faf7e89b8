#include "cpd/geometry.hpp"

#include <cmath>

namespace cpd {

double wrap_azimuth(double az) {
  double w = std::fmod(az, 360.0);
  if (w < 0) w += 360.0;
  // fmod of a tiny negative can land exactly on 360 after the shift.
  if (w >= 360.0) w -= 360.0;
  return w;
}

double azimuth_offset(double from, double to) {
  const double d = std::fabs(wrap_azimuth(to - from));
  return d > 180.0 ? 360.0 - d : d;
}

Pointing interpolate(const Pointing& a, const Pointing& b, double f) {
  double d = wrap_azimuth(b.az - a.az);
  if (d > 180.0) d -= 360.0;
  return {wrap_azimuth(a.az + f * d), a.el + f * (b.el - a.el)};
}

}  // namespace cpd
