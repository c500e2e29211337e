#include "pushift/risk.hpp"

#include <cmath>
#include <stdexcept>

namespace pushift {

namespace {

// Every estimator here is an affine combination of three sample means:
//   risk = a_pp * mean_p[l(g)] + a_pm * mean_p[l(-g)] + a_u * mean_u[l(-g)]
// and the nn variants clamp the implicit negative-class part:
//   risk = b_p * mean_p[l(g)] + s * max(0, mean_u[l(-g)] - pi * mean_p[l(-g)])
// The shift coefficients are built so that test_prior == train_prior
// collapses bit-exactly onto the ordinary PU coefficients.
struct Coeffs {
  double a_pp, a_pm, a_u;
};

Coeffs plain_coeffs(const RiskSpec& spec, double pi) {
  switch (spec.mode) {
    case RiskSpec::Mode::Pu:
      return {pi, -pi, 1.0};
    case RiskSpec::Mode::PuShift: {
      const double r = (1.0 - spec.test_prior) / (1.0 - pi);
      return {spec.test_prior, -(pi * r), r};
    }
    case RiskSpec::Mode::PuAsym:
      return {pi * (1.0 - spec.fp_cost), -(pi * spec.fp_cost), spec.fp_cost};
  }
  throw std::logic_error("unknown risk mode");
}

struct NnCoeffs {
  double b_p, scale;
};

NnCoeffs nn_coeffs(const RiskSpec& spec, double pi) {
  if (spec.mode == RiskSpec::Mode::Pu) return {pi, 1.0};
  return {spec.test_prior, (1.0 - spec.test_prior) / (1.0 - pi)};
}

void validate(const RiskSpec& spec) {
  if (spec.mode == RiskSpec::Mode::PuShift) check_probability(spec.test_prior, "test_prior");
  if (spec.mode == RiskSpec::Mode::PuAsym) {
    check_probability(spec.fp_cost, "fp_cost");
    if (spec.non_negative)
      throw std::invalid_argument(
          "no non-negative estimator for the asymmetric mode; convert via prior_from_alpha");
  }
}

struct LossMeans {
  double mp_pos;  // mean_p[l(g)]
  double mp_neg;  // mean_p[l(-g)]
  double mu_neg;  // mean_u[l(-g)]
};

LossMeans loss_means(Loss loss, const Vector& scores_p, const Vector& scores_u) {
  LossMeans m{0, 0, 0};
  for (double z : scores_p) {
    m.mp_pos += loss_value(loss, z);
    m.mp_neg += loss_value(loss, -z);
  }
  for (double z : scores_u) m.mu_neg += loss_value(loss, -z);
  m.mp_pos /= static_cast<double>(scores_p.size());
  m.mp_neg /= static_cast<double>(scores_p.size());
  m.mu_neg /= static_cast<double>(scores_u.size());
  return m;
}

double risk_from_scores(const RiskSpec& spec, double pi, const Vector& scores_p,
                        const Vector& scores_u) {
  const LossMeans m = loss_means(spec.loss, scores_p, scores_u);
  if (spec.non_negative) {
    const auto [b_p, scale] = nn_coeffs(spec, pi);
    return b_p * m.mp_pos + scale * std::max(0.0, m.mu_neg - pi * m.mp_neg);
  }
  const auto [a_pp, a_pm, a_u] = plain_coeffs(spec, pi);
  return a_pp * m.mp_pos + a_pm * m.mp_neg + a_u * m.mu_neg;
}

}  // namespace

PUSample::PUSample(Matrix positives_, Matrix unlabeled_, double train_prior_)
    : positives(std::move(positives_)), unlabeled(std::move(unlabeled_)),
      train_prior(train_prior_) {
  if (positives.rows() < 1 || unlabeled.rows() < 1)
    throw std::invalid_argument("PU sample needs at least one positive and one unlabeled pattern");
  if (positives.cols() != unlabeled.cols())
    throw std::invalid_argument("positive and unlabeled patterns disagree on dimensionality");
  check_probability(train_prior, "train_prior");
}

RiskSpec RiskSpec::pu(Loss loss, bool non_negative) {
  RiskSpec s;
  s.loss = loss;
  s.mode = Mode::Pu;
  s.non_negative = non_negative;
  return s;
}

RiskSpec RiskSpec::pu_shift(Loss loss, double test_prior, bool non_negative) {
  check_probability(test_prior, "test_prior");
  RiskSpec s;
  s.loss = loss;
  s.mode = Mode::PuShift;
  s.test_prior = test_prior;
  s.non_negative = non_negative;
  return s;
}

RiskSpec RiskSpec::pu_asym(Loss loss, double fp_cost) {
  check_probability(fp_cost, "fp_cost");
  RiskSpec s;
  s.loss = loss;
  s.mode = Mode::PuAsym;
  s.fp_cost = fp_cost;
  return s;
}

double empirical_pu_risk(const LinearModel& model, const PUSample& sample, Loss loss) {
  return risk_value(RiskSpec::pu(loss), model, sample);
}

double empirical_shift_risk(const LinearModel& model, const PUSample& sample, double test_prior,
                            Loss loss) {
  return risk_value(RiskSpec::pu_shift(loss, test_prior), model, sample);
}

double empirical_asym_risk(const LinearModel& model, const PUSample& sample, double fp_cost,
                           Loss loss) {
  return risk_value(RiskSpec::pu_asym(loss, fp_cost), model, sample);
}

double nn_pu_risk(const LinearModel& model, const PUSample& sample, Loss loss) {
  return risk_value(RiskSpec::pu(loss, true), model, sample);
}

double nn_shift_risk(const LinearModel& model, const PUSample& sample, double test_prior,
                     Loss loss) {
  return risk_value(RiskSpec::pu_shift(loss, test_prior, true), model, sample);
}

double risk_value(const RiskSpec& spec, const LinearModel& model, const PUSample& sample) {
  validate(spec);
  return risk_from_scores(spec, sample.train_prior, model.predict_scores(sample.positives),
                          model.predict_scores(sample.unlabeled));
}

Vector risk_gradient(const RiskSpec& spec, const LinearModel& model, const PUSample& sample) {
  return risk_gradient(spec, model.weights, FeaturizedPU(model.map, sample));
}

ShiftRiskDecomposition decompose_shift_risk(const LinearModel& model, const PUSample& sample,
                                            double test_prior, Loss loss) {
  check_probability(test_prior, "test_prior");
  const auto slope = linear_odd_slope(loss);
  if (!slope)
    throw std::invalid_argument("decomposition requires a linear-odd loss");
  const double pi = sample.train_prior;
  const double gamma = test_prior - pi;
  const Vector sp = model.predict_scores(sample.positives);
  const Vector su = model.predict_scores(sample.unlabeled);
  const LossMeans m = loss_means(loss, sp, su);
  ShiftRiskDecomposition d{};
  d.linear_term = *slope * pi * sp.mean();
  d.gamma_term = gamma * (m.mp_pos + pi / (1.0 - pi) * m.mp_neg);
  d.unlabeled_term = (1.0 - gamma / (1.0 - pi)) * m.mu_neg;
  return d;
}

FeaturizedPU::FeaturizedPU(const FeatureMap& map, const PUSample& sample)
    : phi_p(map.apply_all(sample.positives)), phi_u(map.apply_all(sample.unlabeled)),
      train_prior(sample.train_prior) {}

double risk_value(const RiskSpec& spec, const Eigen::Ref<const Vector>& weights,
                  const FeaturizedPU& data) {
  validate(spec);
  return risk_from_scores(spec, data.train_prior, data.phi_p * weights, data.phi_u * weights);
}

Vector risk_gradient(const RiskSpec& spec, const Eigen::Ref<const Vector>& weights,
                     const FeaturizedPU& data) {
  validate(spec);
  const double pi = data.train_prior;
  const Vector zp = data.phi_p * weights;
  const Vector zu = data.phi_u * weights;
  const double np = static_cast<double>(zp.size());
  const double nu = static_cast<double>(zu.size());

  Vector gp_pos(zp.size()), gp_neg(zp.size()), gu_neg(zu.size());
  for (Eigen::Index i = 0; i < zp.size(); ++i) {
    gp_pos[i] = loss_subgradient(spec.loss, zp[i]);
    gp_neg[i] = loss_subgradient(spec.loss, -zp[i]);
  }
  for (Eigen::Index j = 0; j < zu.size(); ++j) gu_neg[j] = loss_subgradient(spec.loss, -zu[j]);

  // d/dw mean[l(g)] = phi' gp / n ; d/dw mean[l(-g)] = -phi' gn / n
  const Vector d_mp_pos = data.phi_p.transpose() * gp_pos / np;
  const Vector d_mp_neg = -(data.phi_p.transpose() * gp_neg) / np;
  const Vector d_mu_neg = -(data.phi_u.transpose() * gu_neg) / nu;

  if (spec.non_negative) {
    double mu_neg = 0, mp_neg = 0;
    for (Eigen::Index j = 0; j < zu.size(); ++j) mu_neg += loss_value(spec.loss, -zu[j]);
    for (Eigen::Index i = 0; i < zp.size(); ++i) mp_neg += loss_value(spec.loss, -zp[i]);
    const double rneg = mu_neg / nu - pi * (mp_neg / np);
    const auto [b_p, scale] = nn_coeffs(spec, pi);
    Vector grad = b_p * d_mp_pos;
    if (rneg >= 0.0) grad += scale * (d_mu_neg - pi * d_mp_neg);
    return grad;
  }
  const auto [a_pp, a_pm, a_u] = plain_coeffs(spec, pi);
  return a_pp * d_mp_pos + a_pm * d_mp_neg + a_u * d_mu_neg;
}

}  // namespace pushift
