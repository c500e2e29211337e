#include "pushift/prior_cost.hpp"

namespace pushift {

TestCondition::TestCondition(double train_prior_, double test_prior_, double fp_cost_)
    : train_prior(train_prior_), test_prior(test_prior_), fp_cost(fp_cost_) {
  check_probability(train_prior, "train_prior");
  check_probability(test_prior, "test_prior");
  check_probability(fp_cost, "fp_cost");
}

double alpha_from_shift(double train_prior, double test_prior) {
  check_probability(train_prior, "train_prior");
  check_probability(test_prior, "test_prior");
  const double pi = train_prior, pip = test_prior;
  return (pi - pi * pip) / (pip + pi - 2.0 * pi * pip);
}

double prior_from_alpha(double train_prior, double fp_cost) {
  check_probability(train_prior, "train_prior");
  check_probability(fp_cost, "fp_cost");
  const double pi = train_prior, a = fp_cost;
  return (pi - a * pi) / (pi + a - 2.0 * a * pi);
}

double unify_prior(double test_prior, double fp_cost) {
  check_probability(test_prior, "test_prior");
  check_probability(fp_cost, "fp_cost");
  const double pip = test_prior, a = fp_cost;
  return (pip - a * pip) / (pip + a - 2.0 * a * pip);
}

double unify_alpha(double train_prior, double pi_unif) {
  check_probability(train_prior, "train_prior");
  check_probability(pi_unif, "pi_unif");
  const double pi = train_prior, pu = pi_unif;
  return (pi - pi * pu) / (pu + pi - 2.0 * pi * pu);
}

UnifiedCondition reduce(const TestCondition& condition) {
  const double pi_unif = unify_prior(condition.test_prior, condition.fp_cost);
  const double alpha_unif = unify_alpha(condition.train_prior, pi_unif);
  return {pi_unif, alpha_unif};
}

}  // namespace pushift
