#ifndef PUSHIFT_PRIOR_COST_HPP
#define PUSHIFT_PRIOR_COST_HPP

#include "pushift/common.hpp"

namespace pushift {

// A PU classification task: training prior pi, test prior pi', and the
// false-positive cost alpha (false-negative cost is 1 - alpha).
struct TestCondition {
  double train_prior;
  double test_prior;
  double fp_cost;

  TestCondition(double train_prior, double test_prior, double fp_cost);

  // gamma = pi' - pi, always in (-pi, 1 - pi).
  double shift() const { return test_prior - train_prior; }
};

// Canonical reduction of a combined shift + asymmetric-cost task.
// alpha_unif equals 0.5 exactly when pi_unif equals the training prior.
struct UnifiedCondition {
  double pi_unif;
  double alpha_unif;
};

// Cost equivalent to shifting the class prior from train_prior to test_prior:
// (pi - pi*pi') / (pi' + pi - 2*pi*pi').
double alpha_from_shift(double train_prior, double test_prior);

// Test prior equivalent to a false-positive cost; exact inverse of
// alpha_from_shift in its second argument.
double prior_from_alpha(double train_prior, double fp_cost);

// Folds a cost into a test prior: the shift-only view of a combined task.
double unify_prior(double test_prior, double fp_cost);

// Folds a canonical prior back into a cost: the asymmetric-only view.
double unify_alpha(double train_prior, double pi_unif);

// Reduces the combined task to the canonical (pi_unif, alpha_unif) pair.
// All three problem views share one Bayes sign.
UnifiedCondition reduce(const TestCondition& condition);

}  // namespace pushift

#endif  // PUSHIFT_PRIOR_COST_HPP
