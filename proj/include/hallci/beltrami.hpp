#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "hallci/spectral.hpp"

namespace hallci {

using Vec3 = std::array<double, 3>;
using IVec3 = std::array<int, 3>;
using Mat3 = Eigen::Matrix3d;

struct Direction {
  // Rational vectors num/den with |xi| = |A| = 1 and A.xi = 0.
  IVec3 xi_num, A_num, xiA_num;
  int den = 1;
  Vec3 xi, A, xiA;
  std::array<cplx, 3> B;  // (A + i xi x A)/sqrt2
  int pair = 0;           // index of the +/- pair
  bool positive = true;   // representative of Lambda^+
};

struct DirectionSet {
  int alpha = 1;
  // Directions 2p and 2p+1 are xi_p and -xi_p.
  std::vector<Direction> directions;
  int N0 = 1;
  double eps_gamma = 0.0;

  std::size_t size() const { return directions.size(); }
  std::size_t pairs() const { return directions.size() / 2; }
  static std::size_t opposite(std::size_t i) { return i ^ 1u; }
};

// Disjoint families from the built-in catalog (the (1,2,2)/3 orbit), with
// eps_gamma measured. count must be 1 or 2.
std::vector<DirectionSet> build_direction_sets(int count);

// Coefficients of R = 1/2 sum_xi gamma_xi^2 (Id - xi (x) xi). The map
// R -> gamma^2 is affine.
class GammaSolver {
 public:
  explicit GammaSolver(const DirectionSet& ds);

  // gamma^2 per pair, no ball check.
  Eigen::VectorXd gamma_sq_pairs(const Mat3& R) const;
  // gamma per direction; throws std::domain_error outside the eps_gamma ball.
  std::vector<double> gamma(const Mat3& R) const;
  Mat3 reconstruct(std::span<const double> gamma_per_direction) const;
  static double distance(const Mat3& R) { return (R - Mat3::Identity()).norm(); }

  // Closed-form positivity radius: min_p (c_p(Id) - floor) / |grad c_p|_F.
  double positivity_radius(double floor = 1e-6) const;
  // Smallest coefficient over `samples` random symmetric R on the sphere
  // |R - Id|_F = radius.
  double min_coefficient_on_sphere(double radius, int samples, unsigned seed) const;

  const DirectionSet& directions() const { return ds_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

 private:
  DirectionSet ds_;
  Eigen::MatrixXd basis_;  // 6 x pairs, columns svec(Id - xi xi)
  Eigen::MatrixXd solve_;  // pairs x 6, pseudo-inverse
};

// svec order (xx, yy, zz, xy, xz, yz).
Eigen::Matrix<double, 6, 1> svec(const Mat3& m);
Mat3 unsvec(const Eigen::Matrix<double, 6, 1>& v);

// W = sum_xi a_xi B_xi e^{i lambda xi.x}; a indexed like ds.directions and
// satisfying a_{-xi} = conj(a_xi).
SpectralField beltrami_wave(const Grid& g, const DirectionSet& ds, std::span<const cplx> a, int lambda);

// Mean of f (x) g for complex coefficient lists: sum_k f(k) (x) g(-k).
Eigen::Matrix3cd mean_outer(const SpectralField& f, const SpectralField& g);

}  // namespace hallci
