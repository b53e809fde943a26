#include "robustirs/lemma_terms.hpp"

namespace robustirs {

LinkModel link_model(const ChannelSet& ch, const UncertaintySet& u, Link link, bool use_irs) {
  LinkModel m;
  const bool alice = link == Link::Alice;
  m.h = alice ? ch.h_u : ch.h_e;
  m.h_irs = alice ? ch.h_iu : ch.h_ie;
  m.G = cascaded_channel(m.h_irs, ch.H_i);
  m.xi_h = alice ? u.xi_uh : u.xi_eh;
  m.xi_g = use_irs ? (alice ? u.xi_ug : u.xi_eg) : 0.0;
  return m;
}

CVec lift(const CVec& w, const CVec& v) {
  const Eigen::Index n = w.size(), m = v.size();
  CVec p(n + n * m);
  p.head(n) = w;
  for (Eigen::Index j = 0; j < n; ++j) p.segment(n + j * m, m) = w(j) * v.conjugate();
  return p;
}

CVec uncertainty_coordinates(const CVec& dh, const CMat& dG) {
  const Eigen::Index n = dh.size();
  if (dG.cols() != n) throw DimensionMismatch("uncertainty_coordinates: dG must have N columns");
  const Eigen::Index m = dG.rows();
  CVec x(n + n * m);
  x.head(n) = dh;
  for (Eigen::Index j = 0; j < n; ++j) x.segment(n + j * m, m) = dG.col(j).conjugate();
  return x;
}

cplx nominal_signal(const LinkModel& link, const CVec& w, const CVec& v) {
  return link.h.dot(w) + v.dot(link.G * w);
}

double signal_power(const LinkModel& link, const CVec& w, const CVec& v, const CVec& dh,
                    const CMat& dG) {
  const cplx s = (link.h + dh).dot(w) + v.dot((link.G + dG) * w);
  return std::norm(s);
}

RVec free_parameters(FreeBlock free, const CVec& w, const CVec& v) {
  const CVec& z = free == FreeBlock::W ? w : v;
  RVec theta(2 * z.size());
  theta.head(z.size()) = z.real();
  theta.tail(z.size()) = z.imag();
  return theta;
}

double Lemma1Terms::quadratic_form(const CVec& x, const RVec& th) const {
  const CMat A = A_tilde(th);
  const CVec a = a_tilde(th);
  return x.dot(A * x).real() + 2.0 * a.dot(x).real() + a0(th);
}

Lemma1Terms lemma1_terms(const LinkModel& model, Link link, const CVec& w_k, const CVec& v_k,
                         FreeBlock free) {
  const Eigen::Index n = model.h.size();
  const Eigen::Index m = model.G.rows();
  if (w_k.size() != n || v_k.size() != m || model.G.cols() != n)
    throw DimensionMismatch("lemma1_terms: iterate dimensions do not match the channels");
  const Eigen::Index K = n + n * m;
  const cplx I(0.0, 1.0);

  Lemma1Terms t;
  t.link = link;
  t.free = free;
  t.w_k = w_k;
  t.v_k = v_k;
  t.p_k = lift(w_k, v_k);
  const CVec q = uncertainty_coordinates(model.h, model.G);  // s = q^H p
  t.s_k = q.dot(t.p_k);

  if (free == FreeBlock::W) {
    t.p.constant = CVec::Zero(K);
    for (int part = 0; part < 2; ++part)
      for (Eigen::Index j = 0; j < n; ++j) {
        CVec e = CVec::Zero(n);
        e(j) = part == 0 ? cplx(1.0) : I;
        t.p.coeff.push_back(lift(e, v_k));
      }
  } else {
    t.p.constant = CVec::Zero(K);
    t.p.constant.head(n) = w_k;
    for (int part = 0; part < 2; ++part)
      for (Eigen::Index i = 0; i < m; ++i) {
        // d conj(v_i) / d Re v_i = 1, d conj(v_i) / d Im v_i = -j.
        const cplx dv = part == 0 ? cplx(1.0) : -I;
        CVec e = CVec::Zero(K);
        for (Eigen::Index j = 0; j < n; ++j) e(n + j * m + i) = w_k(j) * dv;
        t.p.coeff.push_back(e);
      }
  }
  const std::size_t P = t.p.coeff.size();
  t.s.constant = q.dot(t.p.constant);
  for (const auto& pc : t.p.coeff) t.s.coeff.push_back(q.dot(pc));

  const cplx sk_conj = std::conj(t.s_k);
  t.Z = t.p_k * t.p_k.adjoint();
  t.z_vec = sk_conj * t.p_k;
  t.z_scalar = std::norm(t.s_k);

  t.C.constant = t.p_k * t.p.constant.adjoint();
  t.c1.constant = sk_conj * t.p.constant;
  t.c2.constant = std::conj(t.s.constant) * t.p_k;
  t.c.constant = sk_conj * t.s.constant;
  for (std::size_t k = 0; k < P; ++k) {
    t.C.coeff.push_back(t.p_k * t.p.coeff[k].adjoint());
    t.c1.coeff.push_back(sk_conj * t.p.coeff[k]);
    t.c2.coeff.push_back(std::conj(t.s.coeff[k]) * t.p_k);
    t.c.coeff.push_back(sk_conj * t.s.coeff[k]);
  }

  t.A_tilde.constant = t.C.constant + t.C.constant.adjoint() - t.Z;
  t.a_tilde.constant = t.c1.constant + t.c2.constant - t.z_vec;
  t.a0.constant = 2.0 * t.c.constant.real() - t.z_scalar;
  for (std::size_t k = 0; k < P; ++k) {
    t.A_tilde.coeff.push_back(t.C.coeff[k] + t.C.coeff[k].adjoint());
    t.a_tilde.coeff.push_back(t.c1.coeff[k] + t.c2.coeff[k]);
    t.a0.coeff.push_back(2.0 * t.c.coeff[k].real());
  }
  return t;
}

}  // namespace robustirs
