#include "hallci/identities.hpp"

#include <cmath>
#include <stdexcept>

#include "hallci/norms.hpp"
#include "hallci/transform.hpp"

namespace hallci {

namespace {

void require_solenoidal(const SpectralField& B, const char* who) {
  if (B.components() != 3) throw std::invalid_argument(std::string(who) + ": vector field expected");
  const double scale = std::max(1.0, max_abs_coeff(B) * std::max(1, support_linf(B)));
  const double d = max_abs_coeff(divergence(B));
  if (d > 1e-10 * scale)
    throw std::invalid_argument(std::string(who) + ": B is not divergence-free (|div B| = " + std::to_string(d) + ")");
}

// (v . grad) A, component by component.
SpectralField advect(const SpectralField& v, const SpectralField& A) {
  return stack3(dot(v, gradient(component(A, 0))), dot(v, gradient(component(A, 1))),
                dot(v, gradient(component(A, 2))));
}

double sup(const SpectralField& f) { return f.empty() ? 0.0 : lp_norm(f, kInf); }

}  // namespace

SpectralField hall_curl_form(const SpectralField& B) {
  require_solenoidal(B, "hall_curl_form");
  const SpectralField J = curl(B);
  return curl(curl(cross(J, B)));
}

namespace {

SpectralField div_form_unchecked(const SpectralField& B) {
  const SpectralField J = curl(B);
  const SpectralField K = curl(J);
  return divergence(dealiased_product(K, B, Product::SymOuter)) - laplacian(cross(J, B)) -
         0.5 * gradient(dot(J, J));
}

}  // namespace

SpectralField hall_div_form(const SpectralField& B) {
  require_solenoidal(B, "hall_div_form");
  return div_form_unchecked(B);
}

SpectralField hall_form_gap(const SpectralField& B) {
  const SpectralField J = curl(B);
  const SpectralField K = curl(J);
  return cross(K, J) + cross(B, curl(K)) - 0.5 * gradient(dot(J, J));
}

HallForms hall_forms(const SpectralField& B) {
  HallForms h;
  h.curl_form = hall_curl_form(B);
  h.div_form = hall_div_form(B);
  const SpectralField d = h.curl_form - h.div_form;
  h.residual = l2_norm(d);
  const double scale = std::max(l2_norm(h.curl_form), l2_norm(h.div_form));
  if (scale == 0) return h;
  h.projected_relative = l2_norm(leray_project(d)) / scale;
  h.gap_residual = l2_norm(d - hall_form_gap(B)) / scale;
  return h;
}

std::vector<IdentityResidual> vector_identity_suite(const SpectralField& A, const SpectralField& B,
                                                      const SpectralField& phi) {
  if (A.components() != 3 || B.components() != 3 || phi.components() != 1)
    throw std::invalid_argument("vector_identity_suite: (vector, vector, scalar) expected");
  std::vector<IdentityResidual> out;
  auto add = [&](const char* name, const SpectralField& lhs, const SpectralField& rhs) {
    out.push_back({name, sup(lhs - rhs)});
  };

  add("curl(phi A) = phi curl A + grad phi x A", curl(times(phi, A)), times(phi, curl(A)) + cross(gradient(phi), A));

  SpectralField gAB = times(component(B, 0), gradient(component(A, 0)));
  for (int j = 1; j < 3; ++j) gAB += times(component(B, j), gradient(component(A, j)));
  for (int j = 0; j < 3; ++j) gAB += times(component(A, j), gradient(component(B, j)));
  add("grad(A.B) = B_j grad A_j + A_j grad B_j", gradient(dot(A, B)), gAB);

  add("div(A x B) = curl A . B - A . curl B", divergence(cross(A, B)), dot(curl(A), B) - dot(A, curl(B)));

  const SpectralField cAB = curl(cross(A, B));
  add("curl(A x B) = A div B - B div A + (B.grad)A - (A.grad)B", cAB,
      times(divergence(B), A) - times(divergence(A), B) + advect(B, A) - advect(A, B));
  // First-index divergence of B A^T - A B^T is our divergence of A B^T - B A^T.
  add("curl(A x B) = div(B A^T - A B^T)", cAB,
      divergence(dealiased_product(A, B, Product::Outer) - dealiased_product(B, A, Product::Outer)));

  add("curl curl A = grad div A - Laplacian A", curl(curl(A)), gradient(divergence(A)) - laplacian(A));
  add("Laplacian curl B = curl Laplacian B", laplacian(curl(B)), curl(laplacian(B)));
  return out;
}

double nse_closeness(const Grid& g, const DirectionSet& ds, std::size_t pair, const IntermittencyParams& p,
                     double amplitude) {
  p.validate(false);
  if (pair >= ds.pairs()) throw std::invalid_argument("nse_closeness: pair index out of range");
  const SpectralField B = (amplitude / p.lambda) * intermittent_pair(g, ds, pair, 1.0, p, 0.0).value;
  if (2 * support_linf(B) > g.kmax())
    throw BandOverflow("nse_closeness: quadratic terms exceed the grid band; use a larger n");
  const SpectralField J = curl(B);
  const SpectralField nse = divergence(dealiased_product(J, J, Product::Outer));
  // eta W is not solenoidal (div = grad eta . W), so the precondition is skipped.
  const SpectralField diff = div_form_unchecked(B) - nse;
  const double num = l2_norm(diff), den = l2_norm(nse);
  const double scale = p.lambda * l2_norm_sq(J) / std::sqrt(kTorusVolume);
  if (den <= 1e-10 * scale) {
    if (num <= 1e-10 * scale) return 0.0;
    return num / std::max(scale, 1e-300);
  }
  return num / den;
}

}  // namespace hallci
