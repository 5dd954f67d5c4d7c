#include "support/surrogate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gfs/rng.hpp"
#include "gfs/text.hpp"

namespace gfs::testing {

std::vector<Sample> surrogate_airfoil(std::uint64_t seed, std::size_t rows) {
  constexpr std::array<double, 21> kFreq = {200,  250,  315,  400,  500,  630,   800,   1000,  1250,  1600, 2000,
                                            2500, 3150, 4000, 5000, 6300, 8000, 10000, 12500, 16000, 20000};
  constexpr std::array<double, 6> kChord = {0.0254, 0.0508, 0.1016, 0.1524, 0.2286, 0.3048};
  constexpr std::array<double, 4> kVelocity = {31.7, 39.6, 55.5, 71.3};
  constexpr std::array<double, 27> kAngle = {0,    1.5,  2,    2.7,  3,    3.3,  4,    4.2,  4.8,
                                             5.3,  5.4,  6.7,  7.2,  7.3,  8.4,  8.9,  9.5,  9.9,
                                             11.2, 12.3, 12.6, 12.7, 15.4, 15.6, 17.4, 19.7, 22.2};
  Rng rng(seed);
  std::vector<Sample> out;
  std::vector<double> raw_spl;
  // Every (chord, velocity) pair, with a seeded subset of angles and a
  // contiguous frequency band per configuration, until the row budget is met.
  while (out.size() < rows) {
    for (double chord : kChord) {
      for (double velocity : kVelocity) {
        const double angle = kAngle[rng.below(kAngle.size())];
        const double reynolds = velocity * chord / 1.5e-5;
        const double lr = std::log10(reynolds);
        double thickness = chord * std::pow(10.0, 3.0187 - 1.5397 * lr + 0.1059 * lr * lr) *
                           std::pow(10.0, 0.0679 * angle);
        thickness = std::clamp(thickness, 0.00040068, 0.0584);
        const double mach = velocity / 340.46;
        const double st_peak = 0.02 * std::pow(mach, -0.6) * std::pow(10.0, 0.0054 * (angle - 1.33) * (angle - 1.33));
        const std::size_t band = 8 + rng.below(8);
        const std::size_t start = rng.below(kFreq.size() - band + 1);
        for (std::size_t f = start; f < start + band && out.size() < rows; ++f) {
          const double strouhal = kFreq[f] * thickness / velocity;
          const double shape = std::log10(strouhal / st_peak);
          const double spl = 10.0 * std::log10(thickness * std::pow(mach, 5) * 0.4572 / (1.22 * 1.22)) -
                             18.0 * shape * shape + 0.6 * rng.normal();
          out.push_back({kFreq[f], angle, chord, velocity, thickness, 0.0});
          raw_spl.push_back(spl);
        }
      }
    }
  }
  const auto [lo, hi] = std::minmax_element(raw_spl.begin(), raw_spl.end());
  const double a = *lo, b = *hi;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].noise = 103.38 + (raw_spl[i] - a) / (b - a) * (140.987 - 103.38);
  }
  // Exact endpoints, independent of rounding in the affine map.
  out[static_cast<std::size_t>(lo - raw_spl.begin())].noise = 103.38;
  out[static_cast<std::size_t>(hi - raw_spl.begin())].noise = 140.987;
  return out;
}

void write_dat(const std::vector<Sample>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const Sample& s : rows) {
    const auto v = s.columns();
    for (std::size_t c = 0; c < v.size(); ++c) out << (c ? "\t" : "") << format_double(v[c]);
    out << '\n';
  }
}

Matrix blobs(const std::vector<std::vector<double>>& centers, std::size_t per_blob, double spread, std::uint64_t seed) {
  const auto dims = static_cast<Eigen::Index>(centers.front().size());
  Matrix m(static_cast<Eigen::Index>(centers.size() * per_blob), dims);
  Rng rng(seed);
  Eigen::Index row = 0;
  for (const auto& c : centers) {
    for (std::size_t i = 0; i < per_blob; ++i, ++row) {
      for (Eigen::Index j = 0; j < dims; ++j) m(row, j) = c[static_cast<std::size_t>(j)] + rng.uniform(-spread, spread);
    }
  }
  return m;
}

}  // namespace gfs::testing
