#pragma once

#include "kuranishi/kernels.hpp"
#include "kuranishi/refine.hpp"

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace kuranishi {

class PerturbError : public std::runtime_error {
 public:
  enum class Kind { Transversality, Budget, Confinement, Inversion };
  PerturbError(Kind kind, const std::string& what, double worst = 0.0, std::vector<Witness> witnesses = {})
      : std::runtime_error(what), kind_(kind), worst_(worst), witnesses_(std::move(witnesses)) {}
  Kind kind() const { return kind_; }
  double worst() const { return worst_; }
  const std::vector<Witness>& witnesses() const { return witnesses_; }

 private:
  Kind kind_;
  double worst_;
  std::vector<Witness> witnesses_;
};

// A family of maps nu_J : U_J -> E_J.
class SectionField {
 public:
  virtual ~SectionField() = default;
  virtual Vec eval(const IndexSet& J, const Vec& x) const = 0;
  // Central differences with step fd_step.
  virtual Mat jacobian(const IndexSet& J, const Vec& x) const;
  static constexpr double fd_step = 1e-6;
};

class ZeroField : public SectionField {
 public:
  explicit ZeroField(const Atlas& atlas) : atlas_(atlas) {}
  Vec eval(const IndexSet& J, const Vec&) const override { return Vec::Zero(atlas_.chart(J).obstruction_dim); }
  Mat jacobian(const IndexSet& J, const Vec& x) const override {
    return Mat::Zero(atlas_.chart(J).obstruction_dim, x.size());
  }

 private:
  const Atlas& atlas_;
};

// coeff * bump(|x - center|^2 / radius^2)
struct LocalBump {
  Vec center;
  double radius = 0.0;
  Vec coeff;
};

struct ChartPerturbation {
  IndexSet index;
  int level = 1;                 // |J|
  std::vector<IndexSet> lower;   // charts pushed forward, in processing order
  double r_in = 0.0, r_out = 0.0;        // blend weights around each core N^{level-1/2}_JI
  double beta_in = 0.0, beta_out = 0.0;  // global cutoff
  std::vector<LocalBump> bumps;
  double tilde_bound = 0.0;  // sup of the extension, inherited from lower charts
  double budget = 0.0;       // amplitude allowed for the bumps
  double bound = 0.0;        // sup ||nu_J||_J <= bound < sigma
  int attempts = 0;
  double min_transversality = std::numeric_limits<double>::infinity();
};

// nu_J = beta * blend_I( hat_phi_IJ nu_I(y_I(x)) ) + sum of bumps
class Perturbation : public SectionField {
 public:
  std::shared_ptr<const ReductionContext> ctx;
  std::uint64_t seed = 0;
  double sigma_used = 0.0;
  std::map<IndexSet, ChartPerturbation> charts;
  Json ledger = Json::object();

  Vec eval(const IndexSet& J, const Vec& x) const override;
  // Pushforward-and-extension part only.
  Vec extension(const IndexSet& J, const Vec& x) const;
  Vec extension_of(const ChartPerturbation& cp, const Vec& x) const;
  Vec bump_part(const IndexSet& J, const Vec& x) const;
  // Basic components nu^i_J.
  std::vector<Vec> components(const IndexSet& J, const Vec& x) const;
  // Every bump coefficient multiplied by c (nu is linear in them).
  Perturbation scaled(double c) const;
  bool identical(const Perturbation& o) const;

  Json to_json() const;
};

struct PerturbOptions {
  CheckOptions check;
  int max_attempts = 8;
  Exec exec = default_exec();
};

struct ChartZero {
  IndexSet chart;
  Vec point;
  double sigma_min = 0.0;
  double residual = 0.0;
};
// Zeros of s_J + nu_J by Newton from a grid over V^level_J (over V_J when level < 0);
// seed != 0 jitters the grid.
std::vector<ChartZero> chart_zeros(const ReductionContext& ctx, const SectionField& nu, const IndexSet& J,
                                   double level, int density, std::uint64_t seed = 0, Exec exec = default_exec());
double transversality_margin(const Atlas& atlas, const SectionField& nu, const IndexSet& J, const Vec& x);

// Values of the lower perturbations transported to chart J on the cores N^k_JI;
// nullopt away from every core.
std::optional<Vec> pushforward_mu(const Perturbation& p, const IndexSet& J, const Vec& x, double k);

Perturbation build_adapted(const ReductionContext& ctx, std::uint64_t seed, const PerturbOptions& opt = {});
Perturbation perturbation_from_json(const ReductionContext& ctx, const Json& j);

// Conditions a)-e) re-checked on fresh samples; one verdict per condition plus
// the derivative admissibility at core samples.
std::vector<Verdict> verify_conditions(const Perturbation& p, const CheckOptions& opt);
Verdict verify_adapted(const Perturbation& p, const CheckOptions& opt);

}  // namespace kuranishi
