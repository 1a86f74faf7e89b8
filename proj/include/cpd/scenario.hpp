#pragma once

#include <cstdint>

#include "cpd/model.hpp"

namespace cpd {

/// Desk-scale Mars-Earth backhaul network: a polar Walker Star constellation
/// at Mars, medium Earth orbit relays and up to three deep-space ground sites.
/// Visibility comes from circular orbits sampled on a fixed step; nothing is
/// propagated from real ephemerides.
struct ScenarioSpec {
  int n_sources = 4;
  int n_relays = 1;
  int n_ground = 3;
  Seconds horizon = 86400;
  Seconds slice_duration = 600;
  std::uint64_t seed = 1;

  Seconds sample_step = 60;
  Seconds min_window = 120;
  int planes = 4;
  double source_altitude_km = 500.0;
  double relay_altitude_km = 5000.0;
  double relay_inclination_deg = 55.0;
  double elevation_mask_deg = 10.0;
  double mars_distance_km = 1.0e8;
  // Fraction of an orbital period used to jitter initial phases.
  double phase_jitter = 0.05;
  // Intra- and inter-plane source links and relay-relay links.
  bool crosslinks = true;

  BitRate deep_space_rate = 50'000'000;
  BitRate near_earth_rate = 1'200'000'000;
};

/// Throws std::invalid_argument for negative counts or horizon < slice.
Scenario generate_scenario(const ScenarioSpec& spec);

}  // namespace cpd
