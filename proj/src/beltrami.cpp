#include "hallci/beltrami.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hallci {

namespace {

// Positive representatives (numerators over 3) of the two families.
constexpr IVec3 kFamilies[2][6] = {
    {{1, -2, -2}, {1, 2, -2}, {2, -2, 1}, {2, -1, 2}, {2, 1, -2}, {2, 2, 1}},
    {{1, -2, 2}, {1, 2, 2}, {2, -2, -1}, {2, -1, -2}, {2, 1, 2}, {2, 2, -1}},
};
constexpr int kDen = 3;

std::vector<IVec3> orbit() {
  std::vector<IVec3> out;
  IVec3 base = {1, 2, 2};
  std::sort(base.begin(), base.end());
  do {
    for (int s = 0; s < 8; ++s)
      out.push_back({(s & 1 ? -1 : 1) * base[0], (s & 2 ? -1 : 1) * base[1], (s & 4 ? -1 : 1) * base[2]});
  } while (std::next_permutation(base.begin(), base.end()));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int idot(const IVec3& a, const IVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
IVec3 icross(const IVec3& a, const IVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Direction make_direction(const IVec3& xi, const IVec3& A, int pair, bool positive) {
  Direction d;
  d.xi_num = xi;
  d.A_num = A;
  IVec3 c = icross(xi, A);  // = den^2 (xi x A) in true units
  for (int i = 0; i < 3; ++i) {
    if (c[i] % kDen != 0) throw std::logic_error("catalog: xi x A not rational over the common denominator");
    d.xiA_num[i] = c[i] / kDen;
  }
  d.den = kDen;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 3; ++i) {
    d.xi[i] = double(xi[i]) / kDen;
    d.A[i] = double(A[i]) / kDen;
    d.xiA[i] = double(d.xiA_num[i]) / kDen;
    d.B[i] = cplx(d.A[i] * s, d.xiA[i] * s);
  }
  d.pair = pair;
  d.positive = positive;
  return d;
}

}  // namespace

Eigen::Matrix<double, 6, 1> svec(const Mat3& m) {
  Eigen::Matrix<double, 6, 1> v;
  v << m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(0, 2), m(1, 2);
  return v;
}

Mat3 unsvec(const Eigen::Matrix<double, 6, 1>& v) {
  Mat3 m;
  m << v[0], v[3], v[4], v[3], v[1], v[5], v[4], v[5], v[2];
  return m;
}

std::vector<DirectionSet> build_direction_sets(int count) {
  if (count < 1) throw std::invalid_argument("build_direction_sets: count must be >= 1");
  if (count > 2) throw std::runtime_error("build_direction_sets: the catalog holds two disjoint families");
  const auto orb = orbit();
  std::vector<DirectionSet> out;
  for (int a = 0; a < count; ++a) {
    DirectionSet ds;
    ds.alpha = a + 1;
    ds.N0 = kDen;
    int pair = 0;
    for (const IVec3& xi : kFamilies[a]) {
      // First orbit member orthogonal to xi; A_{-xi} = A_xi.
      auto it = std::find_if(orb.begin(), orb.end(), [&](const IVec3& v) { return idot(v, xi) == 0; });
      if (it == orb.end()) throw std::logic_error("catalog: no orthogonal partner");
      const IVec3 mxi = {-xi[0], -xi[1], -xi[2]};
      ds.directions.push_back(make_direction(xi, *it, pair, true));
      ds.directions.push_back(make_direction(mxi, *it, pair, false));
      ++pair;
    }
    GammaSolver gs(ds);
    ds.eps_gamma = gs.positivity_radius();
    out.push_back(std::move(ds));
  }
  return out;
}

GammaSolver::GammaSolver(const DirectionSet& ds) : ds_(ds) {
  const std::size_t P = ds.pairs();
  if (P < 6) throw std::invalid_argument("GammaSolver: need at least 6 pairs");
  basis_.resize(6, Eigen::Index(P));
  for (std::size_t p = 0; p < P; ++p) {
    const Direction& d = ds.directions[2 * p];
    Mat3 M = Mat3::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M(i, j) -= d.xi[i] * d.xi[j];
    basis_.col(Eigen::Index(p)) = svec(M);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(basis_);
  if (cod.rank() < 6) throw std::runtime_error("GammaSolver: directions do not span symmetric matrices");
  solve_ = cod.pseudoInverse();
}

Eigen::VectorXd GammaSolver::gamma_sq_pairs(const Mat3& R) const { return solve_ * svec(R); }

std::vector<double> GammaSolver::gamma(const Mat3& R) const {
  const double dist = distance(R);
  if (ds_.eps_gamma > 0 && dist > ds_.eps_gamma * (1 + 1e-12))
    throw std::domain_error("gamma: |R - Id|_F = " + std::to_string(dist) + " exceeds eps_gamma = " +
                            std::to_string(ds_.eps_gamma));
  const Eigen::VectorXd c = gamma_sq_pairs(R);
  std::vector<double> g(ds_.size());
  for (std::size_t i = 0; i < ds_.size(); ++i) g[i] = std::sqrt(std::max(c[Eigen::Index(i / 2)], 0.0));
  return g;
}

Mat3 GammaSolver::reconstruct(std::span<const double> gamma_per_direction) const {
  Mat3 R = Mat3::Zero();
  for (std::size_t i = 0; i < ds_.size(); ++i) {
    const Direction& d = ds_.directions[i];
    Mat3 M = Mat3::Identity();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) M(a, b) -= d.xi[a] * d.xi[b];
    R += 0.5 * gamma_per_direction[i] * gamma_per_direction[i] * M;
  }
  return R;
}

double GammaSolver::positivity_radius(double floor) const {
  const Eigen::VectorXd c0 = gamma_sq_pairs(Mat3::Identity());
  double eps = std::numeric_limits<double>::infinity();
  for (Eigen::Index p = 0; p < solve_.rows(); ++p) {
    // Frobenius dual norm: off-diagonal svec slots carry two matrix entries.
    double g2 = 0;
    for (int m = 0; m < 6; ++m) g2 += (m < 3 ? 1.0 : 0.5) * solve_(p, m) * solve_(p, m);
    eps = std::min(eps, (c0[p] - floor) / std::sqrt(g2));
  }
  return std::max(eps, 0.0);
}

double GammaSolver::min_coefficient_on_sphere(double radius, int samples, unsigned seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double mn = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Mat3 D;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) D(i, j) = D(j, i) = nd(rng);
    D *= radius / D.norm();
    mn = std::min(mn, gamma_sq_pairs(Mat3::Identity() + D).minCoeff());
  }
  return mn;
}

SpectralField beltrami_wave(const Grid& g, const DirectionSet& ds, std::span<const cplx> a, int lambda) {
  if (a.size() != ds.size()) throw std::invalid_argument("beltrami_wave: one amplitude per direction");
  SpectralField W(g, 3);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Direction& d = ds.directions[i];
    const cplx ao = a[DirectionSet::opposite(i)];
    if (std::abs(ao - std::conj(a[i])) > 1e-14 * (1 + std::abs(a[i])))
      throw std::invalid_argument("beltrami_wave: amplitudes break a_{-xi} = conj(a_xi)");
    Wavevector k;
    int* kk[3] = {&k.x, &k.y, &k.z};
    for (int c = 0; c < 3; ++c) {
      if ((lambda * d.xi_num[c]) % d.den != 0)
        throw std::invalid_argument("beltrami_wave: lambda*xi not integer (lambda must be a multiple of " +
                                    std::to_string(d.den) + ")");
      *kk[c] = lambda * d.xi_num[c] / d.den;
    }
    if (a[i] == cplx{}) continue;
    W.push(k, {a[i] * d.B[0], a[i] * d.B[1], a[i] * d.B[2]});
  }
  W.finalize();
  return W;
}

Eigen::Matrix3cd mean_outer(const SpectralField& f, const SpectralField& g) {
  if (f.components() != 3 || g.components() != 3) throw std::invalid_argument("mean_outer: vector fields");
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  for (std::size_t i = 0; i < f.modes(); ++i) {
    const cplx* gr = g.find(-f.k(i));
    if (!gr) continue;
    const cplx* fr = f.row(i);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) m(a, b) += fr[a] * gr[b];
  }
  return m;
}

}  // namespace hallci
