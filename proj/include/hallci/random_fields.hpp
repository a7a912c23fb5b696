#pragma once

#include <random>
#include <vector>

#include "hallci/spectral.hpp"

namespace hallci {

// Random real field with modes |k_i| <= K, coefficients O(1) decaying mildly.
inline SpectralField random_field(const Grid& g, int comps, int K, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  SpectralField f(g, comps);
  std::vector<cplx> v(comps), w(comps);
  for (int x = -K; x <= K; ++x)
    for (int y = -K; y <= K; ++y)
      for (int z = -K; z <= K; ++z) {
        const Wavevector k{x, y, z};
        const Key key = pack(k), neg = pack(-k);
        if (neg < key) continue;
        const double damp = 1.0 / (1.0 + 0.2 * k.norm2());
        for (int c = 0; c < comps; ++c) v[c] = damp * cplx(nd(rng), key == neg ? 0.0 : nd(rng));
        f.push(k, v.data());
        if (neg != key) {
          for (int c = 0; c < comps; ++c) w[c] = std::conj(v[c]);
          f.push(-k, w.data());
        }
      }
  f.finalize();
  return f;
}

inline SpectralField random_solenoidal(const Grid& g, int K, unsigned seed) {
  return leray_project(random_field(g, 3, K, seed));
}

}  // namespace hallci
