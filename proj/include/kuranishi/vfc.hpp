#pragma once

#include "kuranishi/perturb.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace kuranishi {

class VfcError : public std::runtime_error {
 public:
  enum class Kind { Orientation, Ambiguous, Confinement, SignMismatch, NonTransverse, Dimension };
  VfcError(Kind kind, const std::string& what, std::vector<Witness> witnesses = {})
      : std::runtime_error(what), kind_(kind), witnesses_(std::move(witnesses)) {}
  Kind kind() const { return kind_; }
  const std::vector<Witness>& witnesses() const { return witnesses_; }

 private:
  Kind kind_;
  std::vector<Witness> witnesses_;
};

// Transition consistency of the declared frames: for every change I -> J and sample y,
//   s_I s_J sign det(FU_J^{-1} [dphi FU_I | N]) sign det(FE_J^{-1} [hat_phi FE_I | ds_J N]) = +1
// with N any basis of the normal complement of im dphi.
Verdict validate_orientation(const Atlas& atlas, const CheckOptions& opt);
// Every frame sign flipped, or only that of `chart`.
Atlas reverse_orientation(const Atlas& atlas);
Atlas reverse_orientation(const Atlas& atlas, const IndexSet& chart);

struct SignedZero {
  IndexSet chart;
  Vec point;
  int sign = 0;
  double sigma_min = 0.0;
  int cls = -1;
};

struct OrientedClass {
  std::vector<std::size_t> members;  // indices into OrientedZeroSet::zeros
  int sign = 0;
  double confinement = 0.0;  // depth inside pi(C) of the best representative
};

struct OrientedZeroSet {
  std::vector<SignedZero> zeros;
  std::vector<OrientedClass> classes;
  int count = 0;
  double separation = std::numeric_limits<double>::infinity();  // between distinct classes
  Json to_json() const;
};

// Zeros of s_I + nu_I on V_I, per chart.
std::vector<SignedZero> find_perturbed_zeros(const ReductionContext& ctx, const SectionField& nu,
                                             const CheckOptions& opt);
// Classes by matching phi_IJ images (and images in common supersets) within tol.id.
OrientedZeroSet glue_zero_set(const ReductionContext& ctx, std::vector<SignedZero> zeros, const CheckOptions& opt);
int orientation_sign(const Atlas& atlas, const SectionField& nu, const IndexSet& I, const Vec& z);
// Orientation validation, zeros, gluing, signs and the signed count.
OrientedZeroSet vfc_count(const ReductionContext& ctx, const SectionField& nu, const CheckOptions& opt);

// nu(t, x) = (1 - chi(t)) nu0(x) + chi(t) nu1(x), constant near t = 0 and t = 1.
class ConcordanceField : public SectionField {
 public:
  ConcordanceField(const SectionField& nu0, const SectionField& nu1) : nu0_(nu0), nu1_(nu1) {}
  Vec eval(const IndexSet& J, const Vec& tx) const override;
  static double chi(double t);

 private:
  const SectionField& nu0_;
  const SectionField& nu1_;
};

class SlicedField : public SectionField {
 public:
  SlicedField(const SectionField& nu, double t) : nu_(nu), t_(t) {}
  Vec eval(const IndexSet& J, const Vec& x) const override;

 private:
  const SectionField& nu_;
  double t_;
};

struct InvarianceOptions {
  CheckOptions check;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<ReductionStyle> styles{ReductionStyle::Flag, ReductionStyle::Top};
  std::vector<double> norm_scales{1.0, 2.0};
  // Applied to the perturbation of run i before counting (test hook for engineered defects).
  std::function<void(Perturbation&, std::size_t run)> tamper;
};

// Counts over seeds x reductions x norm scalings must agree, and the product concordance
// with an interpolated perturbation must reproduce the boundary counts.
Verdict invariance_check(const Atlas& tame, const InvarianceOptions& opt);

// Reduction, nesting and sigma for a tame d = 0 atlas.
ReductionContext reduce_for_count(const Atlas& tame, ReductionStyle style, double norm_scale, const CheckOptions& opt);

}  // namespace kuranishi
