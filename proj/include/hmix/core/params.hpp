#pragma once

#include <stdexcept>
#include <string>

namespace hmix {

/// Raised when a parameter violates its domain. `field()` names the offender
/// using the same spelling as the command-line flag.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Model { Discrete, Continuous };

const char* to_string(Model model) noexcept;
Model model_from_string(const std::string& name);

/// Lattice size and reservoir parameters for both models.
///
/// The discrete model is parameterized by the injection parameters beta in
/// (0,1); the densities rho = beta / (1 - beta) are derived from them. The
/// continuous model uses the temperatures directly. Equal boundary values
/// (equilibrium) are admitted.
class ChainParams {
 public:
  ChainParams(int n, double beta_a, double beta_b, double t_a, double t_b);

  static ChainParams discrete(int n, double beta_a, double beta_b) {
    return {n, beta_a, beta_b, 1.0, 1.0};
  }
  static ChainParams continuous(int n, double t_a, double t_b) {
    return {n, 0.5, 0.5, t_a, t_b};
  }

  int n() const noexcept { return n_; }
  double beta_a() const noexcept { return beta_a_; }
  double beta_b() const noexcept { return beta_b_; }
  double rho_a() const noexcept { return rho_a_; }
  double rho_b() const noexcept { return rho_b_; }
  double t_a() const noexcept { return t_a_; }
  double t_b() const noexcept { return t_b_; }

  /// Injection rate of a discrete reservoir, sum_k beta^k / k = -log(1 - beta).
  double injection_rate_a() const noexcept { return injection_a_; }
  double injection_rate_b() const noexcept { return injection_b_; }

  friend bool operator==(const ChainParams&, const ChainParams&) = default;

 private:
  int n_;
  double beta_a_, beta_b_;
  double rho_a_, rho_b_;
  double t_a_, t_b_;
  double injection_a_, injection_b_;
};

double density_from_beta(double beta);
double beta_from_density(double rho);

/// A chain together with the model whose invariant measure is requested.
/// The mixing interval [lo, hi] is (rho_A, rho_B) or (T_A, T_B).
struct MixtureSpec {
  ChainParams params;
  Model model;

  int n() const noexcept { return params.n(); }
  double lo() const noexcept {
    return model == Model::Discrete ? params.rho_a() : params.t_a();
  }
  double hi() const noexcept {
    return model == Model::Discrete ? params.rho_b() : params.t_b();
  }
  bool degenerate() const noexcept { return lo() == hi(); }
};

}  // namespace hmix
