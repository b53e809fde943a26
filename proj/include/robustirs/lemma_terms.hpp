#pragma once

#include <vector>

#include "robustirs/jitter_uncertainty.hpp"
#include "robustirs/robust_config.hpp"

namespace robustirs {

enum class Link { Alice, Eve };
enum class FreeBlock { W, V };

/// X(theta) = constant + sum_k theta_k coeff[k], theta real.
template <class T>
struct AffineMap {
  T constant;
  std::vector<T> coeff;

  [[nodiscard]] T operator()(const RVec& theta) const {
    T out = constant;
    for (std::size_t k = 0; k < coeff.size(); ++k) out += theta(static_cast<Eigen::Index>(k)) * coeff[k];
    return out;
  }
};

/// Nominal channels and radii of one receiver.
struct LinkModel {
  CVec h;      // direct channel
  CMat G;      // cascaded channel diag(h_irs^H) H_I
  CVec h_irs;  // IRS -> receiver
  double xi_h = 0.0;
  double xi_g = 0.0;
  double noise = 0.0;

  [[nodiscard]] int num_antennas() const { return static_cast<int>(h.size()); }
  [[nodiscard]] int num_elements() const { return static_cast<int>(G.rows()); }
};

/// Without an IRS the cascaded radius is zeroed (v is pinned to 0).
LinkModel link_model(const ChannelSet& ch, const UncertaintySet& u, Link link, bool use_irs = true);

/// p(w, v) = [w; kron(w, conj(v))], so that x^H p = dh^H w + v^H dG w for
/// x = [dh; vec(conj(dG))] (column-major vec).
CVec lift(const CVec& w, const CVec& v);
CVec uncertainty_coordinates(const CVec& dh, const CMat& dG);

/// (h^H + v^H G) w.
cplx nominal_signal(const LinkModel& link, const CVec& w, const CVec& v);
/// |((h + dh)^H + v^H (G + dG)) w|^2.
double signal_power(const LinkModel& link, const CVec& w, const CVec& v, const CVec& dh,
                    const CMat& dG);

/// Real parameters of the free block: [Re w; Im w] or [Re v; Im v].
RVec free_parameters(FreeBlock free, const CVec& w, const CVec& v);

/// First-order minorant of the signal power around (w_k, v_k), affine in the
/// free block with the other block held at its iterate value:
///   f(x) = x^H A x + 2 Re{a^H x} + a0,
///   A = C + C^H - Z,  a = c1 + c2 - z,  a0 = 2 Re{c} - z.
struct Lemma1Terms {
  Link link = Link::Alice;
  FreeBlock free = FreeBlock::W;
  CVec w_k, v_k;
  CVec p_k;
  cplx s_k;

  AffineMap<CVec> p;
  AffineMap<cplx> s;

  AffineMap<CMat> C;   // p_k p^H
  CMat Z;              // p_k p_k^H
  AffineMap<CVec> c1;  // conj(s_k) p
  AffineMap<CVec> c2;  // conj(s) p_k
  CVec z_vec;          // conj(s_k) p_k
  AffineMap<cplx> c;   // conj(s_k) s
  double z_scalar = 0.0;  // |s_k|^2

  AffineMap<CMat> A_tilde;
  AffineMap<CVec> a_tilde;
  AffineMap<double> a0;

  [[nodiscard]] RVec theta(const CVec& w, const CVec& v) const { return free_parameters(free, w, v); }
  [[nodiscard]] double quadratic_form(const CVec& x, const RVec& theta) const;
};

Lemma1Terms lemma1_terms(const LinkModel& model, Link link, const CVec& w_k, const CVec& v_k,
                         FreeBlock free);

}  // namespace robustirs
