#include "hmix/core/params.hpp"

#include <cmath>

namespace hmix {

const char* to_string(Model model) noexcept {
  return model == Model::Discrete ? "discrete" : "continuous";
}

Model model_from_string(const std::string& name) {
  if (name == "discrete") return Model::Discrete;
  if (name == "continuous") return Model::Continuous;
  throw ParameterError("model", "expected 'discrete' or 'continuous', got '" + name + "'");
}

double density_from_beta(double beta) { return beta / (1.0 - beta); }

double beta_from_density(double rho) { return rho / (1.0 + rho); }

ChainParams::ChainParams(int n, double beta_a, double beta_b, double t_a, double t_b)
    : n_(n), beta_a_(beta_a), beta_b_(beta_b), t_a_(t_a), t_b_(t_b) {
  if (n < 1) throw ParameterError("n", "number of sites must be >= 1");
  if (!(beta_a > 0.0 && beta_a < 1.0)) throw ParameterError("beta-a", "must lie in (0,1)");
  if (!(beta_b > 0.0 && beta_b < 1.0)) throw ParameterError("beta-b", "must lie in (0,1)");
  if (beta_a > beta_b) throw ParameterError("beta-b", "must satisfy beta-a <= beta-b");
  if (!(t_a > 0.0 && std::isfinite(t_a))) throw ParameterError("t-a", "must be a positive finite temperature");
  if (!(t_b > 0.0 && std::isfinite(t_b))) throw ParameterError("t-b", "must be a positive finite temperature");
  if (t_a > t_b) throw ParameterError("t-b", "must satisfy t-a <= t-b");
  rho_a_ = density_from_beta(beta_a);
  rho_b_ = density_from_beta(beta_b);
  injection_a_ = -std::log1p(-beta_a);
  injection_b_ = -std::log1p(-beta_b);
}

}  // namespace hmix
