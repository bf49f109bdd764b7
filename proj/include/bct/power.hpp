#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bct/biclique.hpp"
#include "bct/design.hpp"
#include "bct/exec.hpp"
#include "bct/negraph.hpp"

namespace bct {

/// Assignments in the ±1 coding used by the power analysis. Built either from
/// a 0/1 design (1 -> +1) or from a biclique's labels (a -> +1, b -> -1).
/// Columns holding a single sign are kept but flagged as degenerate.
class SignedAssignmentView {
 public:
  /// columns[k][i] in {-1, +1}.
  SignedAssignmentView(std::size_t n_units, std::vector<std::vector<std::int8_t>> columns);

  static SignedAssignmentView from_design(const AssignmentSet& design);
  static SignedAssignmentView from_biclique(const NullExposureGraph& g, const Biclique& c);

  std::size_t n_units() const { return n_units_; }
  std::size_t n_columns() const { return plus_.size(); }
  std::span<const std::int8_t> column(std::size_t k) const {
    return {data_.data() + k * n_units_, n_units_};
  }
  std::size_t plus_count(std::size_t k) const { return plus_[k]; }
  bool degenerate(std::size_t k) const { return plus_[k] == 0 || plus_[k] == n_units_; }
  std::size_t degenerate_count() const;

 private:
  std::size_t n_units_;
  std::vector<std::int8_t> data_;
  std::vector<std::size_t> plus_;
};

/// z-tilde: +1/n_plus on treated entries, -1/n_minus on control entries, so
/// that ztilde(z) . Y is the difference in means and ztilde(z) . z = 2.
/// Throws DegenerateColumnError if z has a single sign.
std::vector<double> ztilde(std::span<const std::int8_t> z);

struct PRhoEstimate {
  double p_hat = 0.0;
  double rho_hat = 0.0;
  /// Columns that entered rho-hat (both signs present).
  std::size_t usable_columns = 0;
  /// Set when fewer than two usable columns exist and rho-hat fell back to 0.
  bool rho_defaulted = false;
};

/// p-hat averages the treated fraction over every column; rho-hat averages
/// ztilde(z_l) . z_k / 2 over ordered pairs of non-degenerate columns and is
/// clipped below at 0.
PRhoEstimate estimate_p_rho(const SignedAssignmentView& view);

struct PowerInputs {
  std::size_t n_units = 0;
  std::size_t n_assignments = 0;
  double p_hat = 0.5;
  double rho_hat = 0.0;
  double tau = 0.0;
  double sigma = 1.0;
  double alpha = 0.05;

  void validate() const;
};

/// (tau / sigma) * sqrt(N p(1-p) (1-rho)).
double theta_hat(const PowerInputs& in);

/// Theta-hat with tau / sigma = 1, computed from the view. Zero when every
/// column is degenerate.
double theta_zero(const SignedAssignmentView& view);

/// Closed-form average power of the randomization test:
///   integral of F_bin(floor(m alpha) - 1; m - 1, Phi(z - theta)) phi(z) dz.
/// Returns 0 when floor(m alpha) = 0 (no rejection is possible). Throws
/// NumericError if the quadrature error estimate exceeds 1e-8.
double power_formula(double theta, std::size_t m, double alpha);

/// floor(m alpha), robust to representation error in alpha.
std::size_t rejection_budget(std::size_t m, double alpha);

struct McEstimate {
  double estimate = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo evaluation of the same probability: draw Z_1..Z_m standard
/// normal and count how often #{k >= 2 : Z_k >= Z_1 + theta} <= floor(m alpha) - 1.
/// Replicate r uses stream r of `seed`.
McEstimate mc_power_oracle(double theta, std::size_t m, double alpha, std::size_t reps,
                           std::uint64_t seed, Exec exec = Exec::Parallel);

/// Average power of the randomization test on a fixed assignment set under
/// Y(z) = (tau / 2) z + Y0, estimated over `draws` base-outcome draws. Each
/// draw rejects for assignment k iff T(z_k, Y(z_k)) is strictly greater than
/// the ceil(m (1 - alpha))-th smallest of {T(z_l, Y(z_k))}_l. Every column
/// must be non-degenerate.
McEstimate empirical_average_power(const SignedAssignmentView& design, const OutcomeModel& model,
                                   double alpha, std::size_t draws, std::uint64_t seed,
                                   Exec exec = Exec::Parallel);

/// Sylvester-Hadamard columns 1..n-1 of order n (a power of two): balanced,
/// mutually orthogonal assignments with p = 1/2 and rho = 0.
SignedAssignmentView hadamard_design(std::size_t n);

}  // namespace bct
