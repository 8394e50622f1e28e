#include "reflectspde/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "reflectspde/rng.hpp"

namespace rspde {

double total_variation(std::span<const SpectralField> increments) {
  double acc = 0.0;
  for (const auto& d : increments) acc += norm_h(d);
  return acc;
}

double total_variation(const PathRecord& path) {
  double acc = 0.0;
  for (double m : path.masses) acc += m;
  return acc;
}

namespace {

void require_states(const PathRecord& path) {
  if (path.states.size() != path.l_increments.size() + 1)
    throw std::invalid_argument("path record was simulated without keeping states");
}

}  // namespace

double variational_gap(const PathRecord& path, std::span<const SpectralField> test) {
  require_states(path);
  const std::size_t steps = path.l_increments.size();
  if (test.size() < steps) throw DimensionError("test path is shorter than the simulated path");
  for (std::size_t j = 0; j < steps; ++j)
    if (norm_h(test[j]) > 1.0 + 1e-12)
      throw std::invalid_argument("test path leaves the unit ball at step " + std::to_string(j));
  double acc = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    if (path.masses[j] == 0.0) continue;
    acc += inner_h(test[j], path.l_increments[j]) - inner_h(path.states[j], path.l_increments[j]);
  }
  return acc;
}

double shadow_gap(const PathRecord& path) {
  require_states(path);
  double acc = 0.0;
  for (std::size_t j = 0; j < path.l_increments.size(); ++j) {
    if (path.masses[j] == 0.0) continue;
    const SpectralField& x = path.states[j];
    acc += inner_h(project_ball(x) - x, path.l_increments[j]);
  }
  return acc;
}

double psi_bump(double r, double delta) {
  const double s = 1.0 - delta - r;
  return s > 0.0 ? s * s : 0.0;
}

double boundary_leak(const PathRecord& path, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("boundary_leak needs 0 < delta < 1");
  double acc = 0.0;
  for (std::size_t j = 0; j < path.masses.size(); ++j)
    if (path.masses[j] > 0.0) acc += psi_bump(path.radii[j], delta) * path.masses[j];
  return acc;
}

SpectralField TestPathFamily::value(std::size_t p, std::size_t j) const {
  SpectralField out(dirs_.front().space_ptr());
  for (std::size_t i = 0; i < dirs_.size(); ++i) out.axpy(coefficient(p, i, j), dirs_[i]);
  return out;
}

std::vector<SpectralField> TestPathFamily::path(std::size_t p) const {
  std::vector<SpectralField> out;
  out.reserve(times_.size());
  for (std::size_t j = 0; j < times_.size(); ++j) out.push_back(value(p, j));
  return out;
}

double TestPathFamily::max_norm(std::size_t p) const {
  double m = 0.0;
  for (std::size_t j = 0; j < times_.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < dirs_.size(); ++i) s += coefficient(p, i, j) * coefficient(p, i, j);
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

std::vector<double> TestPathFamily::gaps(const PathRecord& path) const {
  require_states(path);
  const std::size_t steps = path.l_increments.size();
  if (times_.size() < steps) throw DimensionError("test family is shorter than the path");
  const std::size_t nd = dirs_.size();
  const std::size_t nt = times_.size();
  std::vector<double> proj(nd * nt, 0.0);
  double base = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    if (path.masses[j] == 0.0) continue;
    const SpectralField& dl = path.l_increments[j];
    base += inner_h(path.states[j], dl);
    for (std::size_t i = 0; i < nd; ++i) proj[i * nt + j] = inner_h(dirs_[i], dl);
  }
  std::vector<double> out(count(), -base);
  for (std::size_t p = 0; p < count(); ++p) {
    const auto& c = coef_[p];
    double acc = 0.0;
    for (std::size_t k = 0; k < nd * nt; ++k) acc += c[k] * proj[k];
    out[p] += acc;
  }
  return out;
}

TestPathFamily make_test_paths(std::uint64_t seed, std::size_t count,
                               std::span<const double> times, const SpacePtr& space,
                               const ProjectFn& constrain) {
  if (count < 1) throw std::invalid_argument("make_test_paths needs count >= 1");
  if (times.empty()) throw std::invalid_argument("make_test_paths needs a time grid");
  TestPathFamily fam;
  fam.times_.assign(times.begin(), times.end());

  // Gram–Schmidt in H over the leading admissible basis directions.
  constexpr std::size_t kMaxDirs = 4;
  for (std::size_t b = 0; b < space->size() && fam.dirs_.size() < kMaxDirs; ++b) {
    SpectralField d = SpectralField::unit(space, b);
    if (constrain) d = constrain(d);
    for (const auto& e : fam.dirs_) d.axpy(-inner_h(d, e), e);
    const double r = norm_h(d);
    if (r < 1e-8) continue;
    fam.dirs_.push_back(d * (1.0 / r));
  }
  if (fam.dirs_.empty()) throw std::invalid_argument("no admissible test direction");

  const std::size_t nd = fam.dirs_.size();
  const std::size_t nt = times.size();
  const double t0 = times.front();
  const double span_t = std::max(times.back() - t0, 1e-300);
  constexpr int kFreqs = 3;
  const KeyedRng rng(seed, Stream::TestPaths);

  for (std::size_t p = 0; p < count; ++p) {
    std::vector<double> c(nd * nt, 0.0);
    if (p == 1 || p == 2) {
      const double s = p == 1 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < nt; ++j) c[j] = s;
    } else if (p >= 3) {
      // Per-direction mean and kFreqs cos/sin amplitudes, then a radius
      // biased towards the sphere.
      std::vector<double> a(nd * (1 + 2 * kFreqs));
      for (std::size_t m = 0; m < a.size(); m += 2) {
        const auto z = rng.normal2(static_cast<std::uint32_t>(p), 0, static_cast<std::uint32_t>(m / 2));
        a[m] = z[0];
        if (m + 1 < a.size()) a[m + 1] = z[1];
      }
      for (std::size_t i = 0; i < nd; ++i) {
        const double* ai = a.data() + i * (1 + 2 * kFreqs);
        for (std::size_t j = 0; j < nt; ++j) {
          const double th = 2.0 * std::numbers::pi * (times[j] - t0) / span_t;
          double v = ai[0];
          for (int f = 1; f <= kFreqs; ++f)
            v += (ai[2 * f - 1] * std::cos(f * th) + ai[2 * f] * std::sin(f * th)) / f;
          c[i * nt + j] = v;
        }
      }
      double m = 0.0;
      for (std::size_t j = 0; j < nt; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < nd; ++i) s += c[i * nt + j] * c[i * nt + j];
        m = std::max(m, std::sqrt(s));
      }
      const double u = rng.uniform2(static_cast<std::uint32_t>(p), 1, 0)[0];
      const double scale = std::pow(u, 0.25) / std::max(m, 1e-300);
      for (double& v : c) v *= scale;
    }
    fam.coef_.push_back(std::move(c));
  }
  return fam;
}

ReflectionSummary summarize(const PathRecord& path, std::size_t bins, double profile_max) {
  ReflectionSummary s;
  s.masses = path.masses;
  s.total_variation = total_variation(path);
  s.profile_max = profile_max;
  s.support_profile.assign(std::max<std::size_t>(bins, 1), 0.0);
  const double w = profile_max / static_cast<double>(s.support_profile.size());
  for (std::size_t j = 0; j < path.masses.size(); ++j) {
    if (path.masses[j] == 0.0) continue;
    auto b = static_cast<std::size_t>(path.radii[j] / w);
    b = std::min(b, s.support_profile.size() - 1);
    s.support_profile[b] += path.masses[j];
  }
  return s;
}

}  // namespace rspde
