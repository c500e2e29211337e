#ifndef PUSHIFT_DATA_HPP
#define PUSHIFT_DATA_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>

#include "pushift/common.hpp"
#include "pushift/risk.hpp"

namespace pushift {

struct LabeledDataset {
  Matrix patterns;
  std::vector<int> labels;  // +1 / -1
  std::string name;

  Eigen::Index size() const { return patterns.rows(); }
  Eigen::Index dim() const { return patterns.cols(); }
};

// Source label -> {+1,-1}. Default maps {1,+1}->+1 and {-1,0,2}->-1.
using LabelMap = std::map<double, int>;
LabelMap default_label_map();
// One "<source> <+1|-1>" pair per line; '#' starts a comment.
LabelMap parse_label_map(std::istream& in);

// Sparse "label idx:value ..." lines with 1-based strictly increasing
// indices; patterns are densified and zero-padded to the widest index.
LabeledDataset parse_libsvm(std::istream& in, const LabelMap& labels = default_label_map());
void serialize_libsvm(const LabeledDataset& data, std::ostream& out);

// Dense "label,x1,...,xd" rows; set has_header to skip the first line.
LabeledDataset parse_csv(std::istream& in, bool has_header,
                         const LabelMap& labels = default_label_map());
void serialize_csv(const LabeledDataset& data, std::ostream& out);

// Axis-aligned Gaussian class conditionals with analytic densities.
struct SyntheticScenario {
  Vector pos_mean;
  Vector pos_var;
  Vector neg_mean;
  Vector neg_var;
  double train_prior;

  SyntheticScenario(Vector pos_mean, Vector pos_var, Vector neg_mean, Vector neg_var,
                    double train_prior);
  int dim() const { return static_cast<int>(pos_mean.size()); }
};

enum class Component { Positive, Negative, Unlabeled, Test };

// Exact density of the requested component; Test needs the test prior.
double synth_density(const SyntheticScenario& scenario, const Eigen::Ref<const Vector>& x,
                     Component which, double test_prior = 0.5);

// sign[pi' p_p(x)/p_t(x) - alpha] with exact densities; sign(0) = +1.
double bayes_reference(const SyntheticScenario& scenario, double test_prior, double fp_cost,
                       const Eigen::Ref<const Vector>& x);

using Classifier = std::function<double(const Eigen::Ref<const Vector>&)>;

// Monte Carlo accuracy of the classifier on draws at the test prior.
double bayes_accuracy(const SyntheticScenario& scenario, double test_prior,
                      const Classifier& classify, long n_draws = 1000000,
                      std::uint64_t seed = 20240901);

struct PUScenarioConfig {
  int n_p;
  int n_u;
  int n_test;
  double train_prior;
  double test_prior;
  std::uint64_t seed;

  PUScenarioConfig(int n_p, int n_u, int n_test, double train_prior, double test_prior,
                   std::uint64_t seed);
};

// PU training sample from a labeled pool: positives drawn uniformly with
// replacement from the positive class, unlabeled points from a Bernoulli(pi)
// class mixture. Also draws the labeled test set at the test prior.
std::pair<PUSample, LabeledDataset> sample_pu(const LabeledDataset& data,
                                              const PUScenarioConfig& config);
PUSample make_pu_sample(const LabeledDataset& data, int n_p, int n_u, double train_prior,
                        std::uint64_t seed);

// Scenario-based draws (the class conditionals sampled directly).
PUSample draw_pu(const SyntheticScenario& scenario, int n_p, int n_u, std::uint64_t seed);
LabeledDataset draw_labeled(const SyntheticScenario& scenario, int n, double prior,
                            std::uint64_t seed);

// Two interleaved crescents of Gaussians; a nonlinear benchmark substitute.
LabeledDataset make_banana(int n, double prior, std::uint64_t seed);

std::string scenario_to_json(const SyntheticScenario& scenario);
SyntheticScenario scenario_from_json(const std::string& text);

}  // namespace pushift

#endif  // PUSHIFT_DATA_HPP
