#include "cpd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "cpd/geometry.hpp"

namespace cpd {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;
constexpr double kMuMars = 42828.37;       // km^3/s^2
constexpr double kMarsRadius = 3389.5;     // km
constexpr double kMuEarth = 398600.4418;   // km^3/s^2
constexpr double kEarthRadius = 6378.137;  // km
constexpr double kEarthRotation = 7.2921159e-5;  // rad/s
constexpr double kLightSpeed = 299792.458;       // km/s
constexpr double kGrazing = 100.0;               // km of atmosphere kept clear

struct Vec {
  double x = 0, y = 0, z = 0;
  Vec operator+(const Vec& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec operator-(const Vec& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec cross(const Vec& o) const { return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x}; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec unit() const { return *this * (1.0 / norm()); }
};

// Position plus a local frame: for ground sites east/north/up, for
// spacecraft along-track/cross-track/radial.
struct State {
  Vec pos;
  Vec e1;  // east or along-track
  Vec e2;  // north or cross-track
  Vec up;  // up or radial
};

struct Orbit {
  Vec center;
  double radius = 0;
  double mean_motion = 0;  // rad/s
  double raan = 0;
  double inclination = 0;
  double phase = 0;

  State at(double t) const {
    const double u = phase + mean_motion * t;
    const double co = std::cos(raan), so = std::sin(raan), ci = std::cos(inclination), si = std::sin(inclination);
    const double cu = std::cos(u), su = std::sin(u);
    const Vec r{co * cu - so * su * ci, so * cu + co * su * ci, su * si};
    const Vec v{-co * su - so * cu * ci, -so * su + co * cu * ci, cu * si};
    return {center + r * radius, v, r.cross(v), r};
  }
};

struct Site {
  double lat = 0;
  double lon = 0;

  State at(double t) const {
    const double th = lon + kEarthRotation * t;
    const double cl = std::cos(lat), sl = std::sin(lat), ct = std::cos(th), st = std::sin(th);
    const Vec up{cl * ct, cl * st, sl};
    return {up * kEarthRadius, {-st, ct, 0.0}, {-sl * ct, -sl * st, cl}, up};
  }
};

enum class Kind { Source, Relay, Ground };

struct Body {
  std::string id;
  Kind kind;
  Orbit orbit;
  Site site;
  State at(double t) const { return kind == Kind::Ground ? site.at(t) : orbit.at(t); }
};

double round6(double v) { return std::round(v * 1e6) / 1e6; }

Pointing look(const State& from, const Vec& target) {
  const Vec d = (target - from.pos).unit();
  const double el = std::asin(std::clamp(d.dot(from.up), -1.0, 1.0)) / kDeg;
  const double az = std::atan2(d.dot(from.e1), d.dot(from.e2)) / kDeg;
  // atan2(east, north) for sites; for spacecraft the same call yields the
  // angle from cross-track toward along-track.
  Pointing p{wrap_azimuth(round6(az)), std::clamp(round6(el), -90.0, 90.0)};
  if (p.az >= 360.0) p.az = 0.0;
  return p;
}

bool blocked(const Vec& a, const Vec& b, const Vec& center, double radius) {
  const Vec ab = b - a;
  const double t = std::clamp((center - a).dot(ab) / ab.dot(ab), 0.0, 1.0);
  return ((a + ab * t) - center).norm() < radius;
}

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec) {
  if (spec.n_sources < 0 || spec.n_relays < 0 || spec.n_ground < 0 || spec.n_ground > 3)
    throw std::invalid_argument("node counts must be non-negative (at most 3 ground sites)");
  if (spec.slice_duration <= 0 || spec.horizon < spec.slice_duration)
    throw std::invalid_argument("horizon must cover at least one slice");
  if (spec.sample_step <= 0 || spec.planes <= 0) throw std::invalid_argument("invalid sampling or plane count");

  std::mt19937_64 rng(spec.seed);
  const Vec mars{spec.mars_distance_km, 0.0, 0.0};
  std::vector<Body> bodies;

  const int per_plane = std::max(1, (spec.n_sources + spec.planes - 1) / spec.planes);
  const double a_src = kMarsRadius + spec.source_altitude_km;
  const double n_src = std::sqrt(kMuMars / (a_src * a_src * a_src));
  for (int j = 0; j < spec.n_sources; ++j) {
    const int plane = j / per_plane;
    const int slot = j % per_plane;
    Body b;
    char id[32];
    std::snprintf(id, sizeof id, "mars-sat-%02d", j);
    b.id = id;
    b.kind = Kind::Source;
    b.orbit.center = mars;
    b.orbit.radius = a_src;
    b.orbit.mean_motion = n_src;
    b.orbit.raan = plane * kPi / spec.planes;
    b.orbit.inclination = 90.0 * kDeg;
    b.orbit.phase = 2.0 * kPi * slot / per_plane + plane * kPi / std::max(1, spec.n_sources) +
                    2.0 * kPi * spec.phase_jitter * (uniform(rng) - 0.5);
    bodies.push_back(b);
  }
  const double a_rel = kEarthRadius + spec.relay_altitude_km;
  const double n_rel = std::sqrt(kMuEarth / (a_rel * a_rel * a_rel));
  for (int j = 0; j < spec.n_relays; ++j) {
    Body b;
    char id[32];
    std::snprintf(id, sizeof id, "earth-relay-%02d", j);
    b.id = id;
    b.kind = Kind::Relay;
    b.orbit.center = {};
    b.orbit.radius = a_rel;
    b.orbit.mean_motion = n_rel;
    b.orbit.raan = 2.0 * kPi * j / std::max(1, spec.n_relays);
    b.orbit.inclination = spec.relay_inclination_deg * kDeg;
    b.orbit.phase = kPi * j / std::max(1, spec.n_relays) + 2.0 * kPi * spec.phase_jitter * (uniform(rng) - 0.5);
    bodies.push_back(b);
  }
  const struct {
    const char* id;
    double lat, lon;
  } sites[] = {{"gs-goldstone", 35.4, -116.9}, {"gs-madrid", 40.4, -4.2}, {"gs-canberra", -35.4, 148.98}};
  for (int j = 0; j < spec.n_ground; ++j) {
    Body b;
    b.id = sites[j].id;
    b.kind = Kind::Ground;
    b.site = {sites[j].lat * kDeg, sites[j].lon * kDeg};
    bodies.push_back(b);
  }

  Scenario sc;
  sc.meta.name = "mars-earth-s" + std::to_string(spec.n_sources) + "-r" + std::to_string(spec.n_relays);
  sc.meta.horizon = spec.horizon;
  sc.meta.slice_duration = spec.slice_duration;
  sc.meta.seed = spec.seed;
  sc.meta.notes =
      "synthetic circular-orbit visibility approximation (no ephemerides); polar walker star at mars, " +
      std::to_string(spec.planes) + " planes, " + std::to_string(static_cast<int>(spec.source_altitude_km)) +
      " km";
  sc.presets = {{"ipn", ipn_preset()}, {"leo", leo_preset()}};

  auto terminal = [](std::string id, BitRate rate, const std::string& preset) {
    Terminal t;
    t.id = std::move(id);
    t.bit_rate = rate;
    t.preset = preset;
    t.retarget = *builtin_preset(preset);
    return t;
  };
  for (const auto& b : bodies) {
    Node n;
    n.id = b.id;
    switch (b.kind) {
      case Kind::Source:
        n.role = NodeRole::Source;
        n.body = "mars-orbit";
        n.terminals = {terminal("t0", spec.deep_space_rate, "ipn")};
        break;
      case Kind::Relay:
        n.role = NodeRole::Relay;
        n.body = "earth-orbit";
        n.terminals = {terminal("t0", spec.near_earth_rate, "ipn"), terminal("t1", spec.near_earth_rate, "leo")};
        break;
      case Kind::Ground:
        n.role = NodeRole::Sink;
        n.body = "earth-surface";
        n.terminals = {terminal("t0", spec.near_earth_rate, "leo")};
        break;
    }
    sc.nodes.push_back(std::move(n));
  }

  // Candidate pairs with the terminal each side uses.
  struct Pair {
    int a, b;
    const char* ta;
    const char* tb;
  };
  std::vector<Pair> pairs;
  std::vector<int> src, rel, gnd;
  for (int i = 0; i < static_cast<int>(bodies.size()); ++i) {
    (bodies[i].kind == Kind::Source ? src : bodies[i].kind == Kind::Relay ? rel : gnd).push_back(i);
  }
  for (int s : src) {
    for (int g : gnd) pairs.push_back({s, g, "t0", "t0"});
    for (int r : rel) pairs.push_back({s, r, "t0", "t0"});
  }
  for (int r : rel) {
    for (int g : gnd) pairs.push_back({r, g, "t1", "t0"});
  }
  if (spec.crosslinks) {
    // Every line-of-sight pair, as an orbital propagator would report it.
    for (std::size_t x = 0; x < src.size(); ++x) {
      for (std::size_t y = x + 1; y < src.size(); ++y) pairs.push_back({src[x], src[y], "t0", "t0"});
    }
    for (std::size_t x = 0; x < rel.size(); ++x) {
      for (std::size_t y = x + 1; y < rel.size(); ++y) pairs.push_back({rel[x], rel[y], "t1", "t1"});
    }
  }

  const double mask = std::sin(spec.elevation_mask_deg * kDeg);
  auto visible = [&](const Body& a, const Body& b, double t) {
    const State sa = a.at(t), sb = b.at(t);
    if (a.kind == Kind::Ground || b.kind == Kind::Ground) {
      const State& g = a.kind == Kind::Ground ? sa : sb;
      const State& o = a.kind == Kind::Ground ? sb : sa;
      if ((o.pos - g.pos).unit().dot(g.up) < mask) return false;
    } else if (blocked(sa.pos, sb.pos, {}, kEarthRadius + kGrazing)) {
      return false;
    }
    return !blocked(sa.pos, sb.pos, mars, kMarsRadius + kGrazing);
  };

  struct Raw {
    Seconds start, end;
    int a, b;
    const char *ta, *tb;
  };
  std::vector<Raw> raws;
  for (const auto& p : pairs) {
    Seconds run_start = -1, last = -1;
    for (Seconds t = 0; t <= spec.horizon; t += spec.sample_step) {
      if (visible(bodies[p.a], bodies[p.b], static_cast<double>(t))) {
        if (run_start < 0) run_start = t;
        last = t;
      } else if (run_start >= 0) {
        if (last - run_start >= spec.min_window) raws.push_back({run_start, last, p.a, p.b, p.ta, p.tb});
        run_start = -1;
      }
    }
    if (run_start >= 0 && last - run_start >= spec.min_window) raws.push_back({run_start, last, p.a, p.b, p.ta, p.tb});
  }

  for (const auto& r : raws) {
    for (int dir = 0; dir < 2; ++dir) {
      const int tx = dir == 0 ? r.a : r.b;
      const int rx = dir == 0 ? r.b : r.a;
      ContactWindow w;
      w.tx_node = bodies[tx].id;
      w.rx_node = bodies[rx].id;
      w.tx_terminal = dir == 0 ? r.ta : r.tb;
      w.rx_terminal = dir == 0 ? r.tb : r.ta;
      w.start = r.start;
      w.end = r.end;
      auto geometry = [&](Seconds t) {
        const State s_tx = bodies[tx].at(static_cast<double>(t));
        const State s_rx = bodies[rx].at(static_cast<double>(t));
        return EndpointGeometry{look(s_tx, s_rx.pos), look(s_rx, s_tx.pos)};
      };
      w.geometry = geometry(w.start);
      w.geometry_end = geometry(w.end);
      for (Seconds t = (w.start / spec.slice_duration + 1) * spec.slice_duration; t < w.end; t += spec.slice_duration)
        w.track.push_back({t, geometry(t)});
      const State s0 = bodies[tx].at(static_cast<double>(w.start));
      const State s1 = bodies[rx].at(static_cast<double>(w.start));
      w.owlt = static_cast<Seconds>(std::llround((s1.pos - s0.pos).norm() / kLightSpeed));
      sc.windows.push_back(std::move(w));
    }
  }
  std::sort(sc.windows.begin(), sc.windows.end(), [](const ContactWindow& x, const ContactWindow& y) {
    return std::tie(x.start, x.tx_node, x.rx_node, x.end) < std::tie(y.start, y.tx_node, y.rx_node, y.end);
  });
  for (std::size_t i = 0; i < sc.windows.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "w%05zu", i);
    sc.windows[i].id = id;
  }
  return sc;
}

}  // namespace cpd
