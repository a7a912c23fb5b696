#include "hallci/stress.hpp"

#include <cmath>
#include <stdexcept>

#include "hallci/identities.hpp"
#include "hallci/norms.hpp"
#include "hallci/transform.hpp"

namespace hallci {

namespace {

double rel_l2(const SpectralField& diff, const SpectralField& ref) {
  const double d = l2_norm(diff), r = l2_norm(ref);
  if (r == 0) return d;
  return d / r;
}

SpectralField curlcurl(const SpectralField& f) { return curl(curl(f)); }

SpectralField outer(const SpectralField& a, const SpectralField& b) {
  return dealiased_product(a, b, Product::Outer);
}

}  // namespace

SpectralField residual_of_level(const FieldJet& B, const FieldJet& J, HallForm form) {
  if (B.value.components() != 3 || J.value.components() != 3)
    throw std::invalid_argument("residual_of_level: vector fields expected");
  const double js = std::max(1.0, max_abs_coeff(J.value));
  if (max_abs_coeff(curl(B.value) - J.value) > 1e-8 * js ||
      max_abs_coeff(curl(B.rate) - J.rate) > 1e-8 * std::max(1.0, max_abs_coeff(J.rate)))
    throw std::invalid_argument("residual_of_level: J is not curl B");
  SpectralField N = form == HallForm::Curl ? curlcurl(cross(J.value, B.value)) : hall_div_form(B.value);
  return J.rate + N - laplacian(J.value);
}

SpectralField traceless(const SpectralField& T) {
  if (T.components() != 6) throw std::invalid_argument("traceless: 6-layout tensor expected");
  return map_modes(T, 6, [](const Wavevector&, const cplx* s, cplx* o) {
    const cplx tr = (s[0] + s[1] + s[2]) / 3.0;
    for (int c = 0; c < 6; ++c) o[c] = s[c];
    for (int c = 0; c < 3; ++c) o[c] -= tr;
  });
}

SpectralField solenoidal_anti_divergence(const SpectralField& f) { return anti_divergence(leray_project(f)); }

LinearPart linear_part(const Increment& inc, const SpectralField& B_q, const SpectralField& J_q) {
  LinearPart L;
  const FieldJet v = inc.v(), w = inc.w();
  const SpectralField dt_pc = inc.w_p.rate + inc.w_c.rate;
  const SpectralField alt = (1.0 / inc.lambda) * curl(inc.w_p.rate);
  L.dual_route = rel_l2(dt_pc - alt, inc.w_p.rate);
  SpectralField vec = dt_pc - laplacian(w.value);
  if (!B_q.empty()) vec += curlcurl(cross(J_q, v.value) + cross(w.value, B_q));
  L.vec = vec;
  L.tensor = solenoidal_anti_divergence(vec);
  return L;
}

CorrectorPart corrector_part(const Increment& inc, bool regrouped_parts) {
  CorrectorPart C;
  const SpectralField w = inc.w().value;
  const SpectralField& vt = inc.v_t.value;
  const SpectralField& wt = inc.w_t.value;
  C.M1 = cross(w, vt);
  C.M2 = cross(w, inc.v_c.value) + cross(inc.w_c.value + wt, inc.v_p.value);
  C.p_tilde = dot(w, wt);
  C.vec = curlcurl(C.M1 + C.M2);
  C.tensor = solenoidal_anti_divergence(C.vec);
  if (regrouped_parts) {
    const SpectralField K = curl(w);
    // R_cor1 = K (x) v^t + v^t (x) K + grad(w x v^t); gradient of a vector is d_j f_i.
    C.R_cor1 = outer(K, vt) + outer(vt, K) + gradient(C.M1);
    C.R_cor2 = dealiased_product(K, inc.v_c.value, Product::SymOuter);
    C.R_cor3 = dealiased_product(curl(inc.w_c.value + wt), inc.v_p.value, Product::SymOuter);
    const SpectralField lhs = divergence(C.R_cor1);
    const SpectralField rhs = curlcurl(C.M1) + 2.0 * laplacian(C.M1) + gradient(C.p_tilde);
    C.rcorr_literal = rel_l2(lhs - rhs, lhs);
    const SpectralField missing = cross(K, wt) + cross(vt, curl(K));
    C.rcorr_corrected = rel_l2(lhs - (rhs - missing), lhs);
  }
  return C;
}

OscillationPart oscillation_part(const Increment& inc, const SpectralField& R_q, const AmplitudeSet* amps,
                                 const std::vector<DirectionSet>* families) {
  OscillationPart O;
  const double lam = inc.lambda;
  const SpectralField& vp = inc.v_p.value;
  O.vpvp = (0.5 * lam * lam) * dealiased_product(vp, vp, Product::SymOuter);
  const SpectralField cc = curlcurl(cross(inc.w_p.value, vp));
  O.D = solenoidal_anti_divergence(cc - divergence(sym_to_full(O.vpvp)));
  O.R_bv = O.vpvp + solenoidal_anti_divergence(inc.w_t.rate);
  if (!R_q.empty()) O.R_bv += R_q;
  O.vec = cc + inc.w_t.rate;

  const double wps = max_abs_coeff(inc.w_p.value);
  if (wps > 0) {
    O.lambda_vp = max_abs_coeff(lam * vp - (inc.w_p.value - inc.W_eps1)) / wps;
    O.curl_wp = max_abs_coeff(curl(inc.w_p.value) - lam * inc.w_p.value - curl(inc.W_eps1)) / (lam * wps);
  }
  if (amps && families) {
    Mat3 target = Mat3::Zero();
    for (const AmplitudeEntry& e : amps->entries) {
      double a2 = 0;
      for (std::size_t m = 0; m < e.a.modes(); ++m) a2 += std::norm(e.a.row(m)[0]);
      const Direction& d = (*families)[std::size_t(e.family)].directions[2 * e.pair];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) target(i, j) += a2 * ((i == j ? 1.0 : 0.0) - d.xi[i] * d.xi[j]);
    }
    const std::vector<double> m = mean(O.vpvp);
    Mat3 got;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) got(i, j) = m[std::size_t(sym_index(i, j))];
    const double tn = target.norm();
    O.mean_cancellation = tn > 0 ? (got - target).norm() / tn : (got.norm() > 0 ? 1.0 : 0.0);
  }
  return O;
}

StressDecomposition assemble(const FieldJet& B_next, const FieldJet& J_next, LinearPart lin, CorrectorPart cor,
                             OscillationPart osc, const SpectralField& extra, const AssembleOptions& opt) {
  StressDecomposition S;
  S.total = traceless(lin.tensor + cor.tensor + osc.D + osc.R_bv);
  SpectralField target = residual_of_level(B_next, J_next);
  if (!extra.empty()) target += extra;
  const SpectralField pt = leray_project(target);
  const SpectralField pd = leray_project(divergence(sym_to_full(S.total)));
  const double tn = l2_norm(pt), dn = l2_norm(pt - pd);
  S.reassembly = tn > 0 ? dn / tn : dn;
  if (opt.throw_on_mismatch && S.reassembly > opt.tolerance)
    throw std::runtime_error("assemble: reassembly mismatch " + std::to_string(S.reassembly));
  if (opt.norms) {
    const double p = opt.p_near_one;
    auto add = [&](const std::string& name, const SpectralField& f) {
      S.norms.push_back({name, lp_norm(f, p), l2_norm(f)});
    };
    add("linear", lin.tensor);
    add("corrector", cor.tensor);
    add("M1", cor.M1);
    add("M2", cor.M2);
    add("p_tilde", cor.p_tilde);
    if (cor.rcorr_literal >= 0) {
      add("R_cor1", cor.R_cor1);
      add("R_cor2", cor.R_cor2);
      add("R_cor3", cor.R_cor3);
    }
    add("oscillation_bv", osc.R_bv);
    add("D", osc.D);
    add("total", S.total);
  }
  S.linear = std::move(lin);
  S.corrector = std::move(cor);
  S.oscillation = std::move(osc);
  return S;
}

}  // namespace hallci
