#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pushift/bench.hpp"
#include "pushift/data.hpp"
#include "pushift/density_ratio.hpp"
#include "pushift/losses.hpp"
#include "pushift/model.hpp"
#include "pushift/optimizer.hpp"
#include "pushift/prior_cost.hpp"
#include "pushift/risk.hpp"

namespace py = pybind11;
using namespace pushift;

PYBIND11_MODULE(pushift, m) {
  m.doc() = "PU classification under class-prior shift and asymmetric error";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  // prior/cost calculus
  m.def("alpha_from_shift", &alpha_from_shift, py::arg("train_prior"), py::arg("test_prior"));
  m.def("prior_from_alpha", &prior_from_alpha, py::arg("train_prior"), py::arg("fp_cost"));
  m.def("unify_prior", &unify_prior, py::arg("test_prior"), py::arg("fp_cost"));
  m.def("unify_alpha", &unify_alpha, py::arg("train_prior"), py::arg("pi_unif"));
  m.def(
      "reduce",
      [](double pi, double pi_prime, double alpha) {
        const auto u = reduce(TestCondition(pi, pi_prime, alpha));
        return std::make_pair(u.pi_unif, u.alpha_unif);
      },
      py::arg("train_prior"), py::arg("test_prior"), py::arg("fp_cost"),
      "Unified (pi_unif, alpha_unif) for a combined shift + cost task.");

  // losses
  py::enum_<Loss>(m, "Loss")
      .value("zero_one", Loss::ZeroOne)
      .value("squared", Loss::Squared)
      .value("logistic", Loss::Logistic)
      .value("double_hinge", Loss::DoubleHinge);
  m.def("loss_value", &loss_value, py::arg("loss"), py::arg("margin"));
  m.def("loss_subgradient", &loss_subgradient, py::arg("loss"), py::arg("margin"));
  m.def("linear_odd_slope", &linear_odd_slope, py::arg("loss"));
  m.def("loss_from_name", &loss_from_name, py::arg("name"));

  // models
  py::class_<FeatureMap>(m, "FeatureMap")
      .def_static("raw_with_bias", &FeatureMap::raw_with_bias, py::arg("input_dim"))
      .def_static("gaussian", &FeatureMap::gaussian, py::arg("centers"), py::arg("bandwidth"))
      .def_property_readonly("dim", &FeatureMap::dim)
      .def_property_readonly("input_dim", &FeatureMap::input_dim)
      .def("apply", &FeatureMap::apply, py::arg("x"))
      .def("apply_all", &FeatureMap::apply_all, py::arg("patterns"));
  py::class_<LinearModel>(m, "LinearModel")
      .def(py::init<FeatureMap, Vector>(), py::arg("map"), py::arg("weights"))
      .def_readonly("weights", &LinearModel::weights)
      .def_readonly("map", &LinearModel::map)
      .def("predict_score", &LinearModel::predict_score, py::arg("x"))
      .def("predict_label", &LinearModel::predict_label, py::arg("x"))
      .def("predict_scores", &LinearModel::predict_scores, py::arg("patterns"))
      .def("to_json", [](const LinearModel& model) { return model_to_json(model); });
  m.def("model_from_json", &model_from_json, py::arg("text"));
  m.def("pick_centers", &pick_centers, py::arg("pool"), py::arg("max_centers"), py::arg("seed"));
  m.def("median_pairwise_distance", &median_pairwise_distance, py::arg("pool"),
        py::arg("subsample_cap") = 500, py::arg("seed") = 0);
  m.def("bandwidth_candidates", &bandwidth_candidates, py::arg("median_distance"));

  // risks
  py::class_<PUSample>(m, "PUSample")
      .def(py::init<Matrix, Matrix, double>(), py::arg("positives"), py::arg("unlabeled"),
           py::arg("train_prior"))
      .def_readonly("positives", &PUSample::positives)
      .def_readonly("unlabeled", &PUSample::unlabeled)
      .def_readonly("train_prior", &PUSample::train_prior);
  py::class_<RiskSpec>(m, "RiskSpec")
      .def_static("pu", &RiskSpec::pu, py::arg("loss"), py::arg("non_negative") = false)
      .def_static("pu_shift", &RiskSpec::pu_shift, py::arg("loss"), py::arg("test_prior"),
                  py::arg("non_negative") = false)
      .def_static("pu_asym", &RiskSpec::pu_asym, py::arg("loss"), py::arg("fp_cost"));
  m.def("empirical_pu_risk", &empirical_pu_risk, py::arg("model"), py::arg("sample"),
        py::arg("loss"));
  m.def("empirical_shift_risk", &empirical_shift_risk, py::arg("model"), py::arg("sample"),
        py::arg("test_prior"), py::arg("loss"));
  m.def("empirical_asym_risk", &empirical_asym_risk, py::arg("model"), py::arg("sample"),
        py::arg("fp_cost"), py::arg("loss"));
  m.def("nn_pu_risk", &nn_pu_risk, py::arg("model"), py::arg("sample"), py::arg("loss"));
  m.def("nn_shift_risk", &nn_shift_risk, py::arg("model"), py::arg("sample"),
        py::arg("test_prior"), py::arg("loss"));
  m.def("risk_value",
        py::overload_cast<const RiskSpec&, const LinearModel&, const PUSample&>(&risk_value),
        py::arg("spec"), py::arg("model"), py::arg("sample"));
  m.def("risk_gradient",
        py::overload_cast<const RiskSpec&, const LinearModel&, const PUSample&>(&risk_gradient),
        py::arg("spec"), py::arg("model"), py::arg("sample"));
  m.def(
      "decompose_shift_risk",
      [](const LinearModel& model, const PUSample& sample, double test_prior, Loss loss) {
        const auto d = decompose_shift_risk(model, sample, test_prior, loss);
        return std::make_tuple(d.linear_term, d.gamma_term, d.unlabeled_term);
      },
      py::arg("model"), py::arg("sample"), py::arg("test_prior"), py::arg("loss"));

  // training
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("beta1", &TrainConfig::beta1)
      .def_readwrite("beta2", &TrainConfig::beta2)
      .def_readwrite("epsilon", &TrainConfig::epsilon)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("seed", &TrainConfig::seed);
  m.def("train", &train, py::arg("spec"), py::arg("sample"), py::arg("map"), py::arg("config"));

  // density ratios
  py::enum_<RatioDirection>(m, "RatioDirection")
      .value("p_over_u", RatioDirection::POverU)
      .value("u_over_p", RatioDirection::UOverP);
  py::class_<UlsifGrid>(m, "UlsifGrid")
      .def(py::init<>())
      .def_readwrite("bandwidth_factors", &UlsifGrid::bandwidth_factors)
      .def_readwrite("regularizations", &UlsifGrid::regularizations)
      .def_readwrite("folds", &UlsifGrid::folds)
      .def_readwrite("max_centers", &UlsifGrid::max_centers);
  py::class_<RatioModel>(m, "RatioModel")
      .def_readonly("direction", &RatioModel::direction)
      .def_readonly("centers", &RatioModel::centers)
      .def_readonly("bandwidth", &RatioModel::bandwidth)
      .def_readonly("regularization", &RatioModel::regularization)
      .def_readonly("coefficients", &RatioModel::coefficients)
      .def("to_json", [](const RatioModel& model) { return ratio_model_to_json(model); });
  m.def("ratio_model_from_json", &ratio_model_from_json, py::arg("text"));
  m.def("fit_ulsif", &fit_ulsif, py::arg("numerator"), py::arg("denominator"),
        py::arg("direction"), py::arg("grid") = UlsifGrid{}, py::arg("seed") = 0);
  m.def("ratio_at", &ratio_at, py::arg("model"), py::arg("x"));
  m.def("ratio_at_all", &ratio_at_all, py::arg("model"), py::arg("patterns"));
  m.def("dr_classify", &dr_classify, py::arg("model"), py::arg("train_prior"),
        py::arg("alpha_unif"), py::arg("x"));
  m.def(
      "check_ratio_bounds",
      [](const RatioModel& model, double train_prior, const Matrix& points, double tolerance,
         bool clip) {
        const auto report = check_ratio_bounds(model, train_prior, points, tolerance, clip);
        return std::make_pair(report.violation_fraction, report.values);
      },
      py::arg("model"), py::arg("train_prior"), py::arg("points"), py::arg("tolerance") = 1e-9,
      py::arg("clip") = false);
  m.def("shift_ratio_transform", &shift_ratio_transform, py::arg("u_over_p_value"),
        py::arg("train_prior"), py::arg("gamma"));

  // data and synthetic scenarios
  py::class_<SyntheticScenario>(m, "SyntheticScenario")
      .def(py::init<Vector, Vector, Vector, Vector, double>(), py::arg("pos_mean"),
           py::arg("pos_var"), py::arg("neg_mean"), py::arg("neg_var"), py::arg("train_prior"))
      .def_readonly("train_prior", &SyntheticScenario::train_prior)
      .def("to_json", [](const SyntheticScenario& s) { return scenario_to_json(s); });
  m.def("scenario_from_json", &scenario_from_json, py::arg("text"));
  py::enum_<Component>(m, "Component")
      .value("positive", Component::Positive)
      .value("negative", Component::Negative)
      .value("unlabeled", Component::Unlabeled)
      .value("test", Component::Test);
  m.def("synth_density", &synth_density, py::arg("scenario"), py::arg("x"), py::arg("which"),
        py::arg("test_prior") = 0.5);
  m.def("bayes_reference", &bayes_reference, py::arg("scenario"), py::arg("test_prior"),
        py::arg("fp_cost"), py::arg("x"));
  m.def("bayes_accuracy", &bayes_accuracy, py::arg("scenario"), py::arg("test_prior"),
        py::arg("classifier"), py::arg("n_draws") = 1000000, py::arg("seed") = 20240901);
  m.def(
      "draw_pu",
      [](const SyntheticScenario& s, int n_p, int n_u, std::uint64_t seed) {
        PUSample sample = draw_pu(s, n_p, n_u, seed);
        return std::make_tuple(sample.positives, sample.unlabeled, sample.train_prior);
      },
      py::arg("scenario"), py::arg("n_p"), py::arg("n_u"), py::arg("seed"));
  m.def(
      "draw_labeled",
      [](const SyntheticScenario& s, int n, double prior, std::uint64_t seed) {
        const LabeledDataset d = draw_labeled(s, n, prior, seed);
        return std::make_pair(d.patterns, d.labels);
      },
      py::arg("scenario"), py::arg("n"), py::arg("prior"), py::arg("seed"));
  m.def(
      "make_banana",
      [](int n, double prior, std::uint64_t seed) {
        const LabeledDataset d = make_banana(n, prior, seed);
        return std::make_pair(d.patterns, d.labels);
      },
      py::arg("n"), py::arg("prior") = 0.5, py::arg("seed") = 0);

  // benchmark harness
  m.def(
      "bench_from_json",
      [](const std::string& config_json, const std::string& format) {
        const ResultTable table = run_benchmark(config_from_json(config_json));
        return emit_table(table, format == "markdown" ? TableFormat::Markdown : TableFormat::Csv);
      },
      py::arg("config_json"), py::arg("format") = "csv",
      "Run a benchmark config and return the formatted table.");

  auto counters_mod = m.def_submodule("counters", "fit/train call instrumentation");
  counters_mod.def("train_calls", &counters::train_calls);
  counters_mod.def("ulsif_fits", &counters::ulsif_fits);
  counters_mod.def("reset", &counters::reset);
}
